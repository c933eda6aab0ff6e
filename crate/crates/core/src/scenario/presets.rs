//! Canonical experiments used by the tests and sample configs.

use super::config::{ExperimentSpec, FlowSpec, PathSpec, Topology};
use crate::cc::Algorithm;

/// One two-subflow flow running `alg` against a single-path Reno flow on a
/// 10 Mb/s bottleneck with 40 ms RTT.
pub fn friendliness(alg: Algorithm) -> ExperimentSpec {
    ExperimentSpec::new(
        Topology::SharedBottleneck,
        vec![PathSpec::with_bdp_queue(10e6, 0.02)],
        vec![FlowSpec::mptcp(alg, vec![0, 0]), FlowSpec::sptcp(0)],
    )
    .with_duration(60.0)
    .with_jain_flows(vec![0, 1])
}

/// A two-path flow whose second path also carries a single-path Reno flow.
/// Path 0 is idle apart from the multipath flow.
pub fn congestion_balance(alg: Algorithm) -> ExperimentSpec {
    ExperimentSpec::new(
        Topology::DisjointPaths,
        vec![
            PathSpec::with_bdp_queue(10e6, 0.02),
            PathSpec::with_bdp_queue(10e6, 0.02),
        ],
        vec![FlowSpec::mptcp(alg, vec![0, 1]), FlowSpec::sptcp(1)],
    )
    .with_duration(60.0)
}

/// A single two-subflow flow alone on a bottleneck whose buffer is twice the
/// bandwidth-delay product.
pub fn queue_draining(alg: Algorithm) -> ExperimentSpec {
    let mut path = PathSpec::with_bdp_queue(10e6, 0.02);
    path.queue_capacity = 2 * PathSpec::bdp_packets(path.rate_bps, path.prop_delay);
    ExperimentSpec::new(
        Topology::SharedBottleneck,
        vec![path],
        vec![FlowSpec::mptcp(alg, vec![0, 0])],
    )
    .with_duration(60.0)
}

/// One flow over two identical disjoint paths.
pub fn symmetric_disjoint(alg: Algorithm) -> ExperimentSpec {
    ExperimentSpec::new(
        Topology::DisjointPaths,
        vec![
            PathSpec::with_bdp_queue(10e6, 0.02),
            PathSpec::with_bdp_queue(10e6, 0.02),
        ],
        vec![FlowSpec::mptcp(alg, vec![0, 1])],
    )
    .with_duration(60.0)
}

/// Two identical flows on one bottleneck. For `Reno` these are three
/// single-path flows instead.
pub fn symmetric_competitors(alg: Algorithm) -> ExperimentSpec {
    let flows = if alg.is_coupled() {
        vec![FlowSpec::mptcp(alg, vec![0, 0]), FlowSpec::mptcp(alg, vec![0, 0])]
    } else {
        vec![FlowSpec::sptcp(0), FlowSpec::sptcp(0), FlowSpec::sptcp(0)]
    };
    let topology = if alg.is_coupled() {
        Topology::SharedBottleneck
    } else {
        Topology::PartiallyShared
    };
    ExperimentSpec::new(topology, vec![PathSpec::with_bdp_queue(10e6, 0.02)], flows).with_duration(60.0)
}

/// Three disjoint paths with 20, 50 and 100 ms RTT and different rates.
pub fn heterogeneous(alg: Algorithm) -> ExperimentSpec {
    ExperimentSpec::new(
        Topology::DisjointPaths,
        vec![
            PathSpec::with_bdp_queue(10e6, 0.01),
            PathSpec::with_bdp_queue(5e6, 0.025),
            PathSpec::with_bdp_queue(2e6, 0.05),
        ],
        vec![FlowSpec::mptcp(alg, vec![0, 1, 2])],
    )
    .with_duration(60.0)
}
