//! Acceptance criteria. Each prints one `PASS` or `FAIL` line; the process
//! exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use macwalk::dynamics::{float_row, sample_step, simulate, RngSeed};
use macwalk::kernels::successors;
use macwalk::tilings::{from_plane_partition, terminal_trajectories, to_plane_partition, PlanePartition};
use macwalk::verify::{
    boltzmann, branching, hl_generator, jack_limit, link_convergence, normalization, specializations,
    BoltzmannSpec, BranchingSpec, HlGeneratorSpec, JackLimitSpec, LinkSpec, NormalizationSpec,
    SpecializationSpec, SuiteReport,
};
use macwalk::{kernels::upsilon, ParticleConfig, QTParams, Scalar};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const NORMALIZATION_BUDGET: Duration = Duration::from_secs(60);
const BRANCHING_BUDGET: Duration = Duration::from_secs(60);
const ABSORPTION_BUDGET: Duration = Duration::from_secs(120);
const JACK_TOLERANCE: f64 = 0.05;
const HL_FACTOR: f64 = 10.0;
const LINK_BOUND_FACTOR: f64 = 10.0;
const LINK_BOUND_SHIFT: i64 = 6;
const CHI_SQUARE_LEVEL: f64 = 1e-3;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn from_reports(reports: &[SuiteReport], elapsed: Duration, budget: Option<Duration>) -> Outcome {
        let mut detail: Vec<String> = Vec::new();
        let mut passed = true;
        for r in reports {
            detail.push(format!("{}: {} cases", r.suite, r.cases));
            for (k, v) in &r.metrics {
                detail.push(format!("{} = {:.3e}", k, v));
            }
            if let Some(c) = &r.counterexample {
                detail.push(format!("counterexample: {}", c));
            }
            passed &= r.passed;
        }
        if let Some(b) = budget {
            if elapsed > b {
                passed = false;
                detail.push(format!("over budget of {:?}", b));
            }
        }
        detail.push(format!("{:.1?}", elapsed));
        Outcome {
            passed,
            detail: detail.join("; "),
        }
    }
}

fn exact(q: (i64, i64), t: (i64, i64)) -> QTParams {
    QTParams::exact(q, t).unwrap()
}

fn cfg(v: &[usize]) -> ParticleConfig {
    ParticleConfig::new(v.to_vec()).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn criterion_normalization() -> Outcome {
    let spec = NormalizationSpec {
        max_m: 5,
        max_x: 12,
        params: vec![
            exact((1, 3), (1, 2)),
            exact((2, 5), (2, 5)),
            exact((1, 7), (3, 4)),
            exact((0, 1), (1, 2)),
        ],
    };
    let (r, el) = timed(|| normalization(&spec, upsilon));
    Outcome::from_reports(&[r], el, Some(NORMALIZATION_BUDGET))
}

fn criterion_branching() -> Outcome {
    let spec = BranchingSpec {
        max_size: 8,
        max_n: 6,
        params: exact((1, 3), (1, 2)),
    };
    let (r, el) = timed(|| branching(&spec));
    Outcome::from_reports(&[r], el, Some(BRANCHING_BUDGET))
}

fn criterion_links() -> Outcome {
    let spec = LinkSpec {
        params: exact((1, 3), (1, 2)),
        max_m: 3,
        max_x: 6,
        max_n: 12,
        convergence_params: QTParams::float(0.3, 0.5).unwrap(),
        levels: vec![8, 12, 16, 20],
        convergence_max_m: 3,
        convergence_max_x: 6,
        bound_factor: LINK_BOUND_FACTOR,
        bound_shift: LINK_BOUND_SHIFT,
    };
    let (r, el) = timed(|| link_convergence(&spec));
    Outcome::from_reports(&[r], el, None)
}

fn criterion_specializations() -> Outcome {
    let spec = SpecializationSpec {
        max_m: 3,
        max_x: 8,
        schur: vec![Scalar::ratio(2, 5), Scalar::ratio(1, 3)],
        hall_littlewood: vec![Scalar::ratio(1, 2), Scalar::ratio(3, 4)],
    };
    let (r, el) = timed(|| specializations(&spec));
    Outcome::from_reports(&[r], el, None)
}

fn criterion_jack() -> Outcome {
    let spec = JackLimitSpec {
        alpha: Scalar::ratio(1, 2),
        b: Scalar::ratio(1, 3),
        levels: vec![50, 100, 200],
        max_m: 2,
        offset_bound: 3,
        tolerance: JACK_TOLERANCE,
        exact_max_m: 3,
    };
    let (r, el) = timed(|| jack_limit(&spec));
    Outcome::from_reports(&[r], el, None)
}

fn criterion_hl() -> Outcome {
    let spec = HlGeneratorSpec {
        eps: Scalar::ratio(1, 1000),
        points: vec![cfg(&[3, 1, 0]), cfg(&[5, 2, 0]), cfg(&[4])],
        factor: HL_FACTOR,
        rate_max_m: 5,
        rate_max_x: 12,
    };
    let (r, el) = timed(|| hl_generator(&spec));
    Outcome::from_reports(&[r], el, None)
}

fn criterion_boltzmann() -> Outcome {
    let spec = BoltzmannSpec {
        seed: 1,
        count: 200,
        max_m: 4,
        max_x: 8,
        params: exact((1, 3), (1, 2)),
        schur_q: Scalar::ratio(2, 5),
        volume_starts: vec![cfg(&[2, 0]), cfg(&[3, 1]), cfg(&[4, 2, 0])],
        volume_max_len: 6,
    };
    let (r, el) = timed(|| boltzmann(&spec));
    Outcome::from_reports(&[r], el, None)
}

/// `π_{i,λ_i} ≥ λ_i − x_m` for every nonempty row.
fn front_wall_holds(pp: &PlanePartition) -> bool {
    let coords = pp.x0().coords();
    let xm = coords[coords.len() - 1] as i64;
    pp.rows()
        .iter()
        .all(|row| row.is_empty() || row[row.len() - 1] as i64 >= row.len() as i64 - xm)
}

fn criterion_bijection() -> Outcome {
    let start = Instant::now();
    let params = exact((1, 3), (1, 2));
    let mut failures: Vec<String> = Vec::new();
    let mut cases = 0usize;
    let mut check = |traj: &macwalk::dynamics::Trajectory, params: &QTParams, failures: &mut Vec<String>| {
        cases += 1;
        let pp = match to_plane_partition(traj) {
            Ok(pp) => pp,
            Err(e) => {
                failures.push(format!("{}: {}", traj.x0, e));
                return;
            }
        };
        if pp.shape() != &traj.x0.minus_delta() {
            failures.push(format!("{}: shape {} ≠ x0 − δ", traj.x0, pp.shape()));
        }
        if !front_wall_holds(&pp) {
            failures.push(format!("{}: front wall violated by {:?}", traj.x0, pp.rows()));
        }
        match from_plane_partition(&pp, params) {
            Ok(back) if &back == traj => {}
            Ok(_) => failures.push(format!("{}: round trip differs for {:?}", traj.x0, traj.moves)),
            Err(e) => failures.push(format!("{}: {}", traj.x0, e)),
        }
    };
    for x0 in [
        cfg(&[2, 0]),
        cfg(&[3, 1]),
        cfg(&[4, 2, 0]),
        cfg(&[3, 0]),
        cfg(&[4, 1, 0]),
        cfg(&[5]),
        cfg(&[2, 1, 0]),
    ] {
        for traj in terminal_trajectories(&x0, 6, &params) {
            check(&traj, &params, &mut failures);
        }
    }
    let float = QTParams::float(0.3, 0.5).unwrap();
    let cascade = cfg(&[7, 6, 3, 1]);
    for rep in 0..1000 {
        match simulate(&cascade, &float, &mut RngSeed(2024).stream(rep), 10_000) {
            Ok(traj) => check(&traj, &float, &mut failures),
            Err(e) => failures.push(format!("replicate {}: {}", rep, e)),
        }
    }
    let mut detail = format!("{} trajectories; {:.1?}", cases, start.elapsed());
    if let Some(f) = failures.first() {
        detail = format!("{}; first failure: {}", detail, f);
    }
    Outcome {
        passed: failures.is_empty(),
        detail,
    }
}

fn criterion_absorption() -> Outcome {
    let start = Instant::now();
    let params = QTParams::float(0.3, 0.5).unwrap();
    let x0 = cfg(&[7, 6, 3, 1]);
    let runs: Vec<Option<usize>> = macwalk::dynamics::par_replicates(RngSeed(7), 1000, |_, rng| {
        simulate(&x0, &params, rng, 10_000)
            .ok()
            .filter(|t| t.terminal)
            .map(|t| t.len())
    });
    let absorbed = runs.iter().filter(|r| r.is_some()).count();
    let longest = runs.iter().flatten().max().copied().unwrap_or(0);

    // one-step frequencies from a state with all eight moves open
    let x = cfg(&[7, 4, 1]);
    let row = float_row(&x, &params);
    let samples = 100_000u64;
    let draws: Vec<ParticleConfig> =
        macwalk::dynamics::par_replicates(RngSeed(11), samples, |_, rng| sample_step(&x, &params, rng));
    let observed: Vec<u64> = row
        .iter()
        .map(|(y, _)| draws.iter().filter(|d| *d == y).count() as u64)
        .collect();
    let stat: f64 = row
        .iter()
        .zip(&observed)
        .map(|((_, p), &o)| {
            let e = p * samples as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let df = (row.len() - 1) as f64;
    let critical = ChiSquared::new(df).unwrap().inverse_cdf(1.0 - CHI_SQUARE_LEVEL);
    let rows_match = successors(&x).len() == row.len() && observed.iter().sum::<u64>() == samples;
    let elapsed = start.elapsed();
    let passed = absorbed == 1000 && stat <= critical && rows_match && elapsed <= ABSORPTION_BUDGET;
    Outcome {
        passed,
        detail: format!(
            "{}/1000 absorbed, longest {} steps; chi-square {:.2} vs {:.2} (df {}); {:.1?}",
            absorbed, longest, stat, critical, df, elapsed
        ),
    }
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("1 normalization", criterion_normalization),
        ("2 branching", criterion_branching),
        ("3 link normalization and convergence", criterion_links),
        (
            "4 Schur and Hall-Littlewood specializations",
            criterion_specializations,
        ),
        ("5 Jack limit", criterion_jack),
        ("6 Hall-Littlewood continuous limit", criterion_hl),
        ("7 Gibbs property", criterion_boltzmann),
        ("8 trajectory bijection", criterion_bijection),
        ("9 absorption", criterion_absorption),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = run();
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{} [{}] {}", tag, name, outcome.detail);
        if !outcome.passed {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
