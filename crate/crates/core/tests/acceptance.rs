//! Acceptance checks. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero if any fails.

#[path = "support/oracle.rs"]
mod oracle;

use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mpsim::cc::{
    balia_alpha, balia_on_ack, balia_on_loss, lia_alpha, lia_on_ack, olia_alpha, olia_classify, olia_on_ack,
    wvegas_delta, wvegas_on_round, Algorithm, ConnectionCcState, Phase, SubflowCcState, SubflowId,
};
use mpsim::metrics::{summarize, RunSummary};
use mpsim::output::run_experiment;
use mpsim::scenario::{presets, simulate, ExperimentSpec, OutputOptions, RunOutcome};
use mpsim::sim::seeded_rng;

const FORMULA_BUDGET: Duration = Duration::from_secs(1);
const RUN_BUDGET: Duration = Duration::from_secs(15);
/// Scenario criteria average over these seeds.
const SEEDS: std::ops::RangeInclusive<u64> = 1..=10;
const COUPLED: [Algorithm; 3] = [Algorithm::Lia, Algorithm::Olia, Algorithm::Balia];

struct Report {
    failures: usize,
}

impl Report {
    fn record(&mut self, id: u32, name: &str, pass: bool, detail: String) {
        println!(
            "criterion {id} {name}: {} ({detail})",
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            self.failures += 1;
        }
    }
}

/// Every simulated run passes through here so that the capacity and
/// runtime bounds cover all scenarios.
#[derive(Default)]
struct Runs {
    slowest: Duration,
    capacity_violations: Vec<String>,
    count: usize,
}

impl Runs {
    fn run(&mut self, spec: &ExperimentSpec) -> (RunOutcome, RunSummary) {
        let t = Instant::now();
        let out = simulate(spec).expect("simulation runs");
        self.slowest = self.slowest.max(t.elapsed());
        self.count += 1;
        for link in &out.network.links {
            if link.stats.transmitted_bits as f64 > link.rate_bps * spec.duration {
                self.capacity_violations
                    .push(format!("{} seed {}", link.name, spec.seed));
            }
        }
        let s = summarize(&out);
        (out, s)
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn conn(alg: Algorithm, states: Vec<SubflowCcState>) -> ConnectionCcState {
    ConnectionCcState::new(
        alg,
        states
            .into_iter()
            .map(|s| s.in_phase(Phase::CongestionAvoidance))
            .collect(),
    )
}

fn single_path_reduction(report: &mut Report) {
    let t = Instant::now();
    let mut rng = seeded_rng(2024);
    let mut worst: f64 = 0.0;
    let mut loss_exact = true;
    for _ in 0..1000 {
        let w = 1.0 + 999.0 * rng.next_f64();
        let tau = 0.001 + 0.999 * rng.next_f64();
        let target = 1.0 / w;
        for alg in COUPLED {
            let c = conn(alg, vec![SubflowCcState::new(w).with_rtt(tau)]);
            let next = match alg {
                Algorithm::Lia => lia_on_ack(&c, SubflowId(0)),
                Algorithm::Olia => olia_on_ack(&c, SubflowId(0)),
                _ => balia_on_ack(&c, SubflowId(0)),
            }
            .unwrap();
            worst = worst.max(((next - w) - target).abs());
        }
        let c = conn(Algorithm::Balia, vec![SubflowCcState::new(w).with_rtt(tau)]);
        let alpha = balia_alpha(&c, SubflowId(0)).unwrap();
        let after = balia_on_loss(&c, SubflowId(0)).unwrap().cwnd;
        // below two segments the one-segment floor applies
        loss_exact &= alpha == 1.0 && after == (w / 2.0).max(1.0);
    }
    let elapsed = t.elapsed();
    report.record(
        1,
        "single-path reduction",
        worst <= 1e-12 && loss_exact && elapsed < FORMULA_BUDGET,
        format!("max |inc - 1/w| = {worst:.2e}, BALIA halving exact: {loss_exact}, {elapsed:.2?}"),
    );
}

fn hand_values(report: &mut Report) {
    let t = Instant::now();
    let mut bad: Vec<String> = Vec::new();
    let mut check = |label: &str, got: f64, oracle: f64, expected: f64| {
        if !(close(got, oracle, 1e-9) && close(oracle, expected, 1e-4)) {
            bad.push(format!("{label}: got {got}, oracle {oracle}, hand {expected}"));
        }
    };
    let rtts = |v: &[(f64, f64)]| v.iter().map(|&(w, tau)| SubflowCcState::new(w).with_rtt(tau)).collect();

    // LIA
    for (w, tau, alpha) in [([10.0, 10.0], [0.1, 0.1], 0.5), ([10.0, 20.0], [0.1, 0.2], 0.75)] {
        let c = conn(Algorithm::Lia, rtts(&[(w[0], tau[0]), (w[1], tau[1])]));
        check("lia alpha", lia_alpha(&c).unwrap(), oracle::lia_alpha(&w, &tau), alpha);
        let r = 1;
        check(
            "lia increment",
            lia_on_ack(&c, SubflowId(r)).unwrap() - w[r],
            oracle::lia_increment(&w, &tau, r),
            0.025,
        );
    }

    // OLIA alphas: |R|=2 with C={2}, W={1}; |R|=3 with C={2,3}, W={1}
    let c = conn(
        Algorithm::Olia,
        vec![
            SubflowCcState::new(20.0).with_rtt(0.1).with_loss_history(1_000_000, 0),
            SubflowCcState::new(10.0).with_rtt(0.1).with_loss_history(5_000_000, 0),
        ],
    );
    let (big, _, collected) = oracle::olia_sets(&[20.0, 10.0], &[1e6, 5e6]);
    let sets = olia_classify(&c);
    for (r, expected) in [(0, -0.5), (1, 0.5)] {
        check(
            "olia alpha",
            olia_alpha(&c, SubflowId(r), &sets),
            oracle::olia_alpha(2, &big, &collected, r),
            expected,
        );
    }
    for (r, expected) in [(1, 0.0611111), (0, -0.0027778)] {
        check(
            "olia increment",
            olia_on_ack(&c, SubflowId(r)).unwrap() - c.subflows[r].cwnd,
            oracle::olia_increment(&[20.0, 10.0], &[0.1, 0.1], &[1e6, 5e6], r),
            expected,
        );
    }
    let c3 = conn(
        Algorithm::Olia,
        vec![
            SubflowCcState::new(30.0).with_rtt(0.1).with_loss_history(1_000_000, 0),
            SubflowCcState::new(10.0).with_rtt(0.1).with_loss_history(5_000_000, 0),
            SubflowCcState::new(12.0).with_rtt(0.1).with_loss_history(5_000_000, 0),
        ],
    );
    let (big, _, collected) = oracle::olia_sets(&[30.0, 10.0, 12.0], &[1e6, 5e6, 5e6]);
    let sets = olia_classify(&c3);
    for (r, expected) in [(0, -1.0 / 3.0), (1, 1.0 / 6.0), (2, 1.0 / 6.0)] {
        check(
            "olia alpha",
            olia_alpha(&c3, SubflowId(r), &sets),
            oracle::olia_alpha(3, &big, &collected, r),
            expected,
        );
    }

    // BALIA
    let c = conn(Algorithm::Balia, rtts(&[(10.0, 0.1), (10.0, 0.1)]));
    check(
        "balia increment",
        balia_on_ack(&c, SubflowId(0)).unwrap() - 10.0,
        oracle::balia_increment(&[10.0, 10.0], &[0.1, 0.1], 0),
        0.025,
    );
    let c = conn(Algorithm::Balia, rtts(&[(10.0, 0.1), (10.0, 0.2)]));
    check(
        "balia increment",
        balia_on_ack(&c, SubflowId(1)).unwrap() - 10.0,
        oracle::balia_increment(&[10.0, 10.0], &[0.1, 0.2], 1),
        0.02,
    );
    check(
        "balia decrement",
        balia_on_loss(&c, SubflowId(1)).unwrap().cwnd,
        10.0 - oracle::balia_decrement(10.0, oracle::balia_alpha(&[10.0, 10.0], &[0.1, 0.2], 1)),
        2.5,
    );

    // wVegas
    for (w, base, avg, expected) in [(10.0, 0.1, 0.125, 2.0), (20.0, 0.05, 0.1, 10.0)] {
        let s = SubflowCcState::new(w).with_rtts(avg, base, avg);
        check(
            "wvegas delta",
            wvegas_delta(&s).unwrap(),
            oracle::wvegas_delta(w, base, avg),
            expected,
        );
    }
    let mut s = SubflowCcState::new(12.0).with_rtts(0.3, 0.1, 0.3);
    s.queue_delay_est = Some(0.05);
    // δ = 8 matches α, so the window holds before the backoff
    s.vegas_alpha = 8.0;
    let c = conn(Algorithm::WVegas, vec![s]);
    check(
        "wvegas backoff",
        wvegas_on_round(&c, SubflowId(0)).unwrap().cwnd,
        oracle::wvegas_backoff(12.0, 0.1, 0.3),
        2.0,
    );

    let elapsed = t.elapsed();
    report.record(
        2,
        "hand values against oracle",
        bad.is_empty() && elapsed < FORMULA_BUDGET,
        if bad.is_empty() {
            format!("all match within 1e-9, {elapsed:.2?}")
        } else {
            bad.join("; ")
        },
    );
}

fn olia_zero_sum(report: &mut Report) {
    let t = Instant::now();
    let mut rng = seeded_rng(77);
    let mut draw = |n: usize| (rng.next_f64() * n as f64) as usize;
    let (mut with_c, mut worst, mut mismatched) = (0, 0.0f64, 0);
    for _ in 0..10_000 {
        let n = 2 + draw(7);
        // small value sets make ties and overlaps between W and B common
        let w: Vec<f64> = (0..n).map(|_| 1.0 + draw(6) as f64 * 10.0).collect();
        let ell: Vec<f64> = (0..n).map(|_| (1 + draw(6)) as f64 * 1000.0).collect();
        let states = w
            .iter()
            .zip(&ell)
            .map(|(&w, &l)| SubflowCcState::new(w).with_rtt(0.05).with_loss_history(l as u64, 0))
            .collect();
        let c = conn(Algorithm::Olia, states);
        let sets = olia_classify(&c);
        let (_, _, collected) = oracle::olia_sets(&w, &ell);
        let lib: Vec<usize> = sets.collected.iter().map(|r| r.0).collect();
        if lib != collected {
            mismatched += 1;
        }
        let sum: f64 = (0..n).map(|r| olia_alpha(&c, SubflowId(r), &sets)).sum();
        if sets.collected.is_empty() {
            if (0..n).any(|r| olia_alpha(&c, SubflowId(r), &sets) != 0.0) {
                mismatched += 1;
            }
        } else {
            with_c += 1;
            worst = worst.max(sum.abs());
        }
    }
    let elapsed = t.elapsed();
    report.record(
        3,
        "OLIA zero-sum",
        worst <= 1e-12 && mismatched == 0 && with_c > 1000 && elapsed < FORMULA_BUDGET,
        format!("{with_c} of 10000 cases with C non-empty, max |sum| = {worst:.2e}, set mismatches {mismatched}, {elapsed:.2?}"),
    );
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn range(v: &[f64]) -> String {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    format!("[{lo:.3}, {hi:.3}]")
}

fn friendliness(report: &mut Report, runs: &mut Runs) {
    let ratios = |runs: &mut Runs, alg| -> Vec<f64> {
        SEEDS
            .map(|seed| {
                let (_, s) = runs.run(&presets::friendliness(alg).with_seed(seed));
                s.flow_goodput(0) / s.flow_goodput(1)
            })
            .collect()
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for alg in COUPLED {
        let r = ratios(runs, alg);
        let m = mean(&r);
        pass &= (0.4..=1.6).contains(&m);
        parts.push(format!("{alg} {m:.3} {}", range(&r)));
    }
    let r = ratios(runs, Algorithm::Reno);
    let m = mean(&r);
    pass &= m > 1.7;
    parts.push(format!("uncoupled {m:.3} {}", range(&r)));
    report.record(
        4,
        "friendliness",
        pass && runs.slowest < RUN_BUDGET,
        format!("mean MPTCP/Reno goodput over seeds 1-10: {}", parts.join(", ")),
    );
}

fn congestion_balance(report: &mut Report, runs: &mut Runs) {
    let fraction = |runs: &mut Runs, alg| -> Vec<f64> {
        SEEDS
            .map(|seed| {
                let (_, s) = runs.run(&presets::congestion_balance(alg).with_seed(seed));
                s.flows[0].subflows[0].goodput_bps / s.flow_goodput(0)
            })
            .collect()
    };
    let base = mean(&fraction(runs, Algorithm::Reno));
    let mut pass = true;
    let mut parts = vec![format!("uncoupled {base:.3}")];
    for alg in [Algorithm::Lia, Algorithm::Olia, Algorithm::Balia, Algorithm::WVegas] {
        let f = fraction(runs, alg);
        let m = mean(&f);
        let ok = m - base >= 0.10;
        pass &= ok;
        parts.push(format!("{alg} {m:.3} {}{}", range(&f), if ok { "" } else { " short" }));
    }
    report.record(
        5,
        "congestion balance",
        pass && runs.slowest < RUN_BUDGET,
        format!("mean share on uncongested path: {}", parts.join(", ")),
    );
}

fn queue_draining(report: &mut Report, runs: &mut Runs) {
    let measure = |runs: &mut Runs, alg| -> (f64, u64) {
        let mut delay = Vec::new();
        let mut drops = 0;
        for seed in SEEDS {
            let (out, s) = runs.run(&presets::queue_draining(alg).with_seed(seed));
            let b = &s.links[out.network.bottlenecks[0]];
            delay.push(b.mean_queue_delay);
            drops += b.drops_after_warmup;
        }
        (mean(&delay), drops)
    };
    let (lia_delay, lia_drops) = measure(runs, Algorithm::Lia);
    let (vegas_delay, vegas_drops) = measure(runs, Algorithm::WVegas);
    report.record(
        6,
        "wVegas queue draining",
        vegas_delay < lia_delay && vegas_drops < lia_drops && runs.slowest < RUN_BUDGET,
        format!(
            "mean queue delay {:.2} ms vs LIA {:.2} ms, drops {vegas_drops} vs {lia_drops} over seeds 1-10",
            vegas_delay * 1e3,
            lia_delay * 1e3
        ),
    );
}

fn determinism(report: &mut Report) {
    let mut specs = Vec::new();
    for alg in Algorithm::ALL {
        specs.push(presets::friendliness(alg));
        specs.push(presets::congestion_balance(alg));
        specs.push(presets::symmetric_competitors(alg));
    }
    specs.push(presets::queue_draining(Algorithm::Lia));
    specs.push(presets::queue_draining(Algorithm::WVegas));

    let mut differing = Vec::new();
    let mut files = 0;
    for (i, spec) in specs.iter().enumerate() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        run_experiment(spec, a.path(), &OutputOptions::default()).unwrap();
        run_experiment(spec, b.path(), &OutputOptions::default()).unwrap();
        let mut names: Vec<_> = fs::read_dir(a.path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        for name in names {
            files += 1;
            if fs::read(a.path().join(&name)).ok() != fs::read(b.path().join(&name)).ok() {
                differing.push(format!("scenario {i} {}", name.to_string_lossy()));
            }
        }
    }
    report.record(
        7,
        "determinism",
        differing.is_empty() && files == 4 * specs.len(),
        if differing.is_empty() {
            format!("{} scenarios, {files} files byte-identical", specs.len())
        } else {
            differing.join("; ")
        },
    );
}

fn capacity_and_fairness(report: &mut Report, runs: &mut Runs) {
    let mut worst = (1.0f64, String::new());
    for alg in Algorithm::ALL {
        for seed in SEEDS {
            let (_, s) = runs.run(&presets::symmetric_competitors(alg).with_seed(seed));
            let j = s.jain_index.unwrap_or(0.0);
            if j < worst.0 {
                worst = (j, format!("{alg} seed {seed}"));
            }
        }
    }
    let violations = &runs.capacity_violations;
    report.record(
        8,
        "capacity and fairness",
        violations.is_empty() && worst.0 >= 0.95,
        format!(
            "{} runs, capacity violations: {}, lowest Jain {:.4} ({})",
            runs.count,
            if violations.is_empty() {
                "none".to_owned()
            } else {
                violations.join(", ")
            },
            worst.0,
            worst.1
        ),
    );
}

fn main() -> ExitCode {
    let mut report = Report { failures: 0 };
    let mut runs = Runs::default();
    single_path_reduction(&mut report);
    hand_values(&mut report);
    olia_zero_sum(&mut report);
    friendliness(&mut report, &mut runs);
    congestion_balance(&mut report, &mut runs);
    queue_draining(&mut report, &mut runs);
    determinism(&mut report);
    capacity_and_fairness(&mut report, &mut runs);
    println!("slowest simulation run: {:.2?}", runs.slowest);
    if report.failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", report.failures);
        ExitCode::FAILURE
    }
}
