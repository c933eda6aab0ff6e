//! Turns an [`ExperimentSpec`] into links and per-subflow routes.
//!
//! Every path is a forward bottleneck plus a reverse link of the same
//! propagation delay that carries ACKs. Each subflow additionally gets a
//! private access link at ten times its path rate so that senders are
//! serialized separately before they meet at the bottleneck.

use serde::Serialize;

use super::config::{ConfigError, ExperimentSpec, Topology};
use crate::sim::{Link, SimTime};

pub type LinkId = usize;

/// Access links run at this multiple of the path rate.
pub const ACCESS_RATE_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkRole {
    Bottleneck,
    Reverse,
    Access,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    pub forward: Vec<LinkId>,
    pub reverse: Vec<LinkId>,
}

#[derive(Debug, Clone)]
pub struct Network {
    pub links: Vec<Link>,
    pub roles: Vec<LinkRole>,
    /// Path each link belongs to.
    pub link_paths: Vec<usize>,
    /// Forward bottleneck of each path.
    pub bottlenecks: Vec<LinkId>,
    /// `routes[flow][subflow]`.
    pub routes: Vec<Vec<Route>>,
}

impl Network {
    /// `(flow, subflow)` pairs whose forward route crosses `link`.
    pub fn senders_on(&self, link: LinkId) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (f, routes) in self.routes.iter().enumerate() {
            for (s, route) in routes.iter().enumerate() {
                if route.forward.contains(&link) {
                    out.push((f, s));
                }
            }
        }
        out
    }
}

/// Validates the experiment and builds its network, whatever the topology.
pub fn build_network(spec: &ExperimentSpec) -> Result<Network, ConfigError> {
    spec.validate()?;
    let mut links = Vec::new();
    let mut roles = Vec::new();
    let mut link_paths = Vec::new();
    let mut bottlenecks = Vec::new();
    let mut reverse = Vec::new();

    for (i, p) in spec.paths.iter().enumerate() {
        let delay = SimTime::from_secs_f64(p.prop_delay);
        bottlenecks.push(links.len());
        links.push(Link::new(format!("path{i}"), p.rate_bps, delay, Some(p.queue_capacity)));
        roles.push(LinkRole::Bottleneck);
        link_paths.push(i);

        reverse.push(links.len());
        links.push(Link::new(
            format!("path{i}-rev"),
            p.rate_bps,
            delay,
            spec.reverse_queue_capacity,
        ));
        roles.push(LinkRole::Reverse);
        link_paths.push(i);
    }

    let mut routes = Vec::with_capacity(spec.flows.len());
    for (f, flow) in spec.flows.iter().enumerate() {
        let mut flow_routes = Vec::with_capacity(flow.subflows.len());
        for (s, &path) in flow.subflows.iter().enumerate() {
            let access = links.len();
            links.push(Link::new(
                format!("access-f{f}s{s}"),
                spec.paths[path].rate_bps * ACCESS_RATE_FACTOR,
                SimTime::ZERO,
                None,
            ));
            roles.push(LinkRole::Access);
            link_paths.push(path);
            flow_routes.push(Route {
                forward: vec![access, bottlenecks[path]],
                reverse: vec![reverse[path]],
            });
        }
        routes.push(flow_routes);
    }

    Ok(Network {
        links,
        roles,
        link_paths,
        bottlenecks,
        routes,
    })
}

fn expect_topology(spec: &ExperimentSpec, topology: Topology) -> Result<(), ConfigError> {
    if spec.topology != topology {
        return Err(ConfigError::new(
            "topology",
            format!("expected {}, got {}", topology.as_str(), spec.topology.as_str()),
        ));
    }
    Ok(())
}

/// All subflows and competitors share one bottleneck.
pub fn build_shared_bottleneck(spec: &ExperimentSpec) -> Result<Network, ConfigError> {
    expect_topology(spec, Topology::SharedBottleneck)?;
    build_network(spec)
}

/// One private bottleneck per subflow of each multipath flow; single-path
/// flows add background load on whichever path they name.
pub fn build_disjoint_paths(spec: &ExperimentSpec) -> Result<Network, ConfigError> {
    expect_topology(spec, Topology::DisjointPaths)?;
    build_network(spec)
}
