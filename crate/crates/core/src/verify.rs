//! Check suites over finite grids, shared by the command line and the
//! acceptance tests. Every suite reports the first counterexample in grid
//! order, so reports are deterministic under any thread count.

use std::collections::BTreeMap;
use std::fmt::Display;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Field, Mode, QTParams, Scalar};
use crate::dynamics::{cont_rates, hl_generator_check, RngSeed};
use crate::error::{Error, Result};
use crate::kernels::{
    jack_successors, successors, upsilon, upsilon_hl, upsilon_jack, upsilon_schur, JackConfig,
};
use crate::macdonald::{lambda_link, principal_spec_in, psi_duality_check, psi_in};
use crate::partitions::{enumerate_interlacing, ParticleConfig, Partition};
use crate::tilings::{
    boltzmann_factor, gibbs_check, seeded_contexts, terminal_trajectories, volume_normalized_prob,
};
use crate::try_with_qt;

pub const SUITES: [&str; 8] = [
    "normalization",
    "branching",
    "duality",
    "specializations",
    "boltzmann",
    "jack-limit",
    "hl-generator",
    "link-convergence",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub cases: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
}

impl SuiteReport {
    fn new(suite: &str) -> SuiteReport {
        SuiteReport {
            suite: suite.to_string(),
            passed: true,
            cases: 0,
            counterexample: None,
            metrics: BTreeMap::new(),
        }
    }

    /// Records a batch; the first failure of the whole suite is kept.
    fn absorb(&mut self, cases: usize, failure: Option<String>) {
        self.cases += cases as u64;
        if let Some(f) = failure {
            if self.passed {
                self.passed = false;
                self.counterexample = Some(f);
            }
        }
    }

    fn fail(&mut self, msg: impl Display) {
        self.absorb(0, Some(msg.to_string()));
    }
}

/// The kernel under test by the normalization suite.
pub type Kernel = fn(&ParticleConfig, &ParticleConfig, &QTParams) -> Scalar;

/// Harness fixture: the stay probability off `δ_m` is inflated by 1/1000.
pub fn corrupted_upsilon(x: &ParticleConfig, y: &ParticleConfig, params: &QTParams) -> Scalar {
    let v = upsilon(x, y, params);
    if x != y || x.is_delta() {
        return v;
    }
    let bump = match params.mode() {
        Mode::Exact => Scalar::ratio(1001, 1000),
        Mode::Float => Scalar::Float(1.001),
    };
    v.try_mul(&bump).expect("same mode")
}

/// First failure over `items`, in order.
fn first_failure<T, F>(items: &[T], check: F) -> Option<String>
where
    T: Sync,
    F: Fn(&T) -> Option<String> + Sync + Send,
{
    items.par_iter().find_map_first(check)
}

fn configs(max_m: usize, max_x: usize) -> Vec<ParticleConfig> {
    (1..=max_m)
        .flat_map(|m| ParticleConfig::all_up_to(m, max_x))
        .collect()
}

fn sum(mut values: impl Iterator<Item = Scalar>, mode: Mode) -> Result<Scalar> {
    let zero = match mode {
        Mode::Exact => Scalar::int(0),
        Mode::Float => Scalar::Float(0.0),
    };
    values.try_fold(zero, |acc, v| acc.try_add(&v))
}

fn is_unit(s: &Scalar) -> bool {
    match s {
        Scalar::Exact(_) => s.is_one(),
        Scalar::Float(v) => (v - 1.0).abs() <= 1e-12,
    }
}

fn params_label(p: &QTParams) -> String {
    format!("q = {}, t = {}", p.q(), p.t())
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizationSpec {
    pub max_m: usize,
    pub max_x: usize,
    pub params: Vec<QTParams>,
}

/// Rows of `kernel` sum to 1 (exactly in exact mode).
pub fn normalization(spec: &NormalizationSpec, kernel: Kernel) -> SuiteReport {
    let mut report = SuiteReport::new("normalization");
    let grid = configs(spec.max_m, spec.max_x);
    for params in &spec.params {
        let failure = first_failure(&grid, |x| {
            let row = successors(x).into_iter().map(|y| kernel(x, &y, params));
            match sum(row, params.mode()) {
                Ok(s) if is_unit(&s) => None,
                Ok(s) => Some(format!("x = {}, {}: row sum {}", x, params_label(params), s)),
                Err(e) => Some(format!("x = {}, {}: {}", x, params_label(params), e)),
            }
        });
        report.absorb(grid.len(), failure);
    }
    report
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchingSpec {
    pub max_size: usize,
    pub max_n: usize,
    pub params: QTParams,
}

/// `P_λ(1,…,t^{N−1}) = Σ_{μ≺λ} ψ_{λ/μ} t^{(N−1)(|λ|−|μ|)} P_μ(1,…,t^{N−2})`.
pub fn branching(spec: &BranchingSpec) -> SuiteReport {
    let mut report = SuiteReport::new("branching");
    let cases: Vec<(Partition, usize)> = Partition::all_up_to(spec.max_size)
        .into_iter()
        .flat_map(|lam| {
            let lo = lam.len().max(1);
            (lo..=spec.max_n).map(move |n| (lam.clone(), n))
        })
        .collect();
    let params = &spec.params;
    let failure = first_failure(&cases, |(lam, n)| {
        let check = || -> Result<bool> {
            let lhs = principal_spec_in_scalar(lam, *n, params)?;
            let terms = enumerate_interlacing(lam)
                .into_iter()
                .filter(|mu| mu.len() < *n)
                .map(|mu| branching_term(lam, &mu, *n, params))
                .collect::<Result<Vec<_>>>()?;
            let rhs = sum(terms.into_iter(), params.mode())?;
            Ok(match params.mode() {
                Mode::Exact => lhs == rhs,
                Mode::Float => lhs.approx_eq(&rhs, 1e-12)?,
            })
        };
        match check() {
            Ok(true) => None,
            Ok(false) => Some(format!("λ = {}, N = {}, {}", lam, n, params_label(params))),
            Err(e) => Some(format!("λ = {}, N = {}: {}", lam, n, e)),
        }
    });
    report.absorb(cases.len(), failure);
    report
}

fn principal_spec_in_scalar(lam: &Partition, n: usize, params: &QTParams) -> Result<Scalar> {
    try_with_qt!(params, |q, t| principal_spec_in(lam, n, q, t))
}

fn branching_term(lam: &Partition, mu: &Partition, n: usize, params: &QTParams) -> Result<Scalar> {
    let k = ((n - 1) * (lam.size() - mu.size())) as i64;
    try_with_qt!(params, |q, t| Ok(psi_in(lam, mu, q, t)
        * t.powi(k)
        * principal_spec_in(mu, n - 1, q, t)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualitySpec {
    pub max_size: usize,
    pub params: QTParams,
}

/// `ψ_{λ/μ}(q,t) = ψ′_{λ′/μ′}(t,q)` on every interlacing pair.
pub fn duality(spec: &DualitySpec) -> SuiteReport {
    let mut report = SuiteReport::new("duality");
    let pairs: Vec<(Partition, Partition)> = Partition::all_up_to(spec.max_size)
        .into_iter()
        .flat_map(|lam| {
            enumerate_interlacing(&lam)
                .into_iter()
                .map(move |mu| (lam.clone(), mu))
        })
        .collect();
    let failure = first_failure(&pairs, |(lam, mu)| {
        (!psi_duality_check(lam, mu, &spec.params))
            .then(|| format!("λ = {}, μ = {}, {}", lam, mu, params_label(&spec.params)))
    });
    report.absorb(pairs.len(), failure);
    report
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecializationSpec {
    pub max_m: usize,
    pub max_x: usize,
    /// Values of `q = t` for the Schur comparison.
    pub schur: Vec<Scalar>,
    /// Values of `t` for the Hall–Littlewood comparison at `q = 0`.
    pub hall_littlewood: Vec<Scalar>,
}

/// `Υ|_{t=q} = Υ^Schur` and `Υ|_{q=0} = Υ^HL` on every successor.
pub fn specializations(spec: &SpecializationSpec) -> SuiteReport {
    let mut report = SuiteReport::new("specializations");
    let grid = configs(spec.max_m, spec.max_x);
    let same = |a: Scalar, b: Scalar| match (&a, &b) {
        (Scalar::Exact(_), Scalar::Exact(_)) => a == b,
        _ => a.approx_eq(&b, 1e-12).unwrap_or(false),
    };
    for q in &spec.schur {
        let params = match QTParams::schur(q.clone()) {
            Ok(p) => p,
            Err(e) => {
                report.fail(e);
                continue;
            }
        };
        let failure = first_failure(&grid, |x| {
            successors(x)
                .into_iter()
                .find_map(|y| match upsilon_schur(x, &y, q) {
                    Ok(s) if same(upsilon(x, &y, &params), s.clone()) => None,
                    Ok(s) => Some(format!(
                        "Schur q = {}: x = {}, y = {}: {} vs {}",
                        q,
                        x,
                        y,
                        upsilon(x, &y, &params),
                        s
                    )),
                    Err(e) => Some(format!("Schur q = {}: x = {}, y = {}: {}", q, x, y, e)),
                })
        });
        report.absorb(grid.len(), failure);
    }
    for t in &spec.hall_littlewood {
        let params = match QTParams::hall_littlewood(t.clone()) {
            Ok(p) => p,
            Err(e) => {
                report.fail(e);
                continue;
            }
        };
        let failure = first_failure(&grid, |x| {
            successors(x)
                .into_iter()
                .find_map(|y| match upsilon_hl(x, &y, t) {
                    Ok(s) if same(upsilon(x, &y, &params), s.clone()) => None,
                    Ok(s) => Some(format!(
                        "HL t = {}: x = {}, y = {}: {} vs {}",
                        t,
                        x,
                        y,
                        upsilon(x, &y, &params),
                        s
                    )),
                    Err(e) => Some(format!("HL t = {}: x = {}, y = {}: {}", t, x, y, e)),
                })
        });
        report.absorb(grid.len(), failure);
    }
    report
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoltzmannSpec {
    pub seed: u64,
    pub count: usize,
    pub max_m: usize,
    pub max_x: usize,
    pub params: QTParams,
    /// `q = t` value for the Schur checks.
    pub schur_q: Scalar,
    /// Starts for the exhaustive `q^{vol}` check.
    pub volume_starts: Vec<ParticleConfig>,
    pub volume_max_len: usize,
}

/// Kernel ratios of seeded four-state contexts equal the Boltzmann factor;
/// the factor is `q` at `t = q`; Schur trajectory weights are `∝ q^{vol}`.
pub fn boltzmann(spec: &BoltzmannSpec) -> SuiteReport {
    let mut report = SuiteReport::new("boltzmann");
    let contexts = match seeded_contexts(RngSeed(spec.seed), spec.count, spec.max_m, spec.max_x) {
        Ok(c) => c,
        Err(e) => {
            report.fail(format!("context generation: {}", e));
            return report;
        }
    };
    let failure = first_failure(&contexts, |ctx| match gibbs_check(ctx, &spec.params) {
        Ok(true) => None,
        Ok(false) => Some(format!(
            "x = {}, y = {}, z = {}, k = {}, {}: kernel ratio differs from Boltzmann factor",
            ctx.x,
            ctx.y,
            ctx.z,
            ctx.k,
            params_label(&spec.params)
        )),
        Err(e) => Some(format!(
            "x = {}, y = {}, z = {}, k = {}: {}",
            ctx.x, ctx.y, ctx.z, ctx.k, e
        )),
    });
    report.absorb(contexts.len(), failure);

    let schur = match QTParams::schur(spec.schur_q.clone()) {
        Ok(p) => p,
        Err(e) => {
            report.fail(e);
            return report;
        }
    };
    let failure = first_failure(&contexts, |ctx| match boltzmann_factor(ctx, &schur) {
        Ok(f) if f == spec.schur_q => None,
        Ok(f) => Some(format!(
            "Schur factor {} ≠ q at x = {}, y = {}, z = {}, k = {}",
            f, ctx.x, ctx.y, ctx.z, ctx.k
        )),
        Err(e) => Some(format!("Schur factor at x = {}: {}", ctx.x, e)),
    });
    report.absorb(contexts.len(), failure);

    for x0 in &spec.volume_starts {
        let trajs = terminal_trajectories(x0, spec.volume_max_len, &schur);
        let weights: Vec<Result<Scalar>> = trajs
            .par_iter()
            .map(|t| volume_normalized_prob(t, &schur))
            .collect();
        let failure = match weights.first() {
            None => Some(format!("no terminal trajectories from {}", x0)),
            Some(Err(e)) => Some(format!("x0 = {}: {}", x0, e)),
            Some(Ok(base)) => weights.iter().zip(&trajs).find_map(|(w, traj)| match w {
                Ok(w) if w == base => None,
                Ok(w) => Some(format!(
                    "x0 = {}: prob/q^vol = {} vs {} for moves {:?}",
                    x0, w, base, traj.moves
                )),
                Err(e) => Some(format!("x0 = {}: {}", x0, e)),
            }),
        };
        report.absorb(trajs.len(), failure);
    }
    report
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JackLimitSpec {
    pub alpha: Scalar,
    pub b: Scalar,
    /// Increasing values of `L`.
    pub levels: Vec<u32>,
    pub max_m: usize,
    /// Offsets range over `[−offset_bound, offset_bound]`.
    pub offset_bound: i64,
    pub tolerance: f64,
    /// Largest `m` for the exact Jack row sums.
    pub exact_max_m: usize,
}

fn jack_grid(max_m: usize, bound: i64, alpha: &Scalar) -> Vec<JackConfig> {
    let width = (2 * bound) as usize;
    (1..=max_m)
        .flat_map(|m| ParticleConfig::all_up_to(m, width))
        .filter_map(|c| JackConfig::new(c.signed().iter().map(|v| v - bound).collect(), alpha.clone()).ok())
        .collect()
}

/// Largest `|Υ_m(x(L), y(L)) − Υ^Jack(X, Y)|` with `x_i(L) = n_i + L`,
/// `t = b^{1/L}` and `q = t^α`.
pub fn jack_limit_error(spec: &JackLimitSpec, level: u32) -> Result<f64> {
    let (alpha, b) = (spec.alpha.to_f64(), spec.b.to_f64());
    let t = b.powf(1.0 / level as f64);
    let params = QTParams::float(t.powf(alpha), t)?;
    let fb = Scalar::Float(b);
    let grid = jack_grid(spec.max_m, spec.offset_bound, &Scalar::Float(alpha));
    let shift = level as i64;
    let errs = grid
        .par_iter()
        .map(|xj| -> Result<f64> {
            let x = ParticleConfig::from_signed(xj.translate(shift).offsets())?;
            let mut worst = 0.0f64;
            for yj in jack_successors(xj) {
                let y = ParticleConfig::from_signed(yj.translate(shift).offsets())?;
                let lhs = upsilon(&x, &y, &params).to_f64();
                let rhs = upsilon_jack(xj, &yj, &fb)?.to_f64();
                worst = worst.max((lhs - rhs).abs());
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

/// Errors shrink across `levels` and end below the tolerance; Jack rows sum
/// to 1 exactly.
pub fn jack_limit(spec: &JackLimitSpec) -> SuiteReport {
    let mut report = SuiteReport::new("jack-limit");
    let mut previous: Option<(u32, f64)> = None;
    for &level in &spec.levels {
        match jack_limit_error(spec, level) {
            Ok(err) => {
                report.metrics.insert(format!("error_L{}", level), err);
                let mut failure = None;
                if let Some((pl, pe)) = previous {
                    if err >= pe {
                        failure = Some(format!(
                            "error {} at L = {} does not improve on {} at L = {}",
                            err, level, pe, pl
                        ));
                    }
                }
                report.absorb(1, failure);
                previous = Some((level, err));
            }
            Err(e) => report.fail(format!("L = {}: {}", level, e)),
        }
    }
    match previous {
        Some((level, err)) if err > spec.tolerance => report.fail(format!(
            "error {} at L = {} exceeds {}",
            err, level, spec.tolerance
        )),
        None => report.fail("no levels configured"),
        _ => {}
    }

    let grid = jack_grid(spec.exact_max_m, spec.offset_bound, &spec.alpha);
    let failure = first_failure(&grid, |xj| {
        let row: Result<Vec<Scalar>> = jack_successors(xj)
            .iter()
            .map(|yj| upsilon_jack(xj, yj, &spec.b))
            .collect();
        match row.and_then(|r| sum(r.into_iter(), spec.b.mode())) {
            Ok(s) if is_unit(&s) => None,
            Ok(s) => Some(format!("Jack offsets {:?}: row sum {}", xj.offsets(), s)),
            Err(e) => Some(format!("Jack offsets {:?}: {}", xj.offsets(), e)),
        }
    });
    report.absorb(grid.len(), failure);
    report
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HlGeneratorSpec {
    pub eps: Scalar,
    pub points: Vec<ParticleConfig>,
    /// Pass iff error ≤ `factor · eps` at every point.
    pub factor: f64,
    pub rate_max_m: usize,
    pub rate_max_x: usize,
}

/// HL rows at `t = 1 − ε` match the block-jump generator to `O(ε)`; total
/// clock rate equals `|x| − C(m, 2)`.
pub fn hl_generator(spec: &HlGeneratorSpec) -> SuiteReport {
    let mut report = SuiteReport::new("hl-generator");
    let bound = spec.factor * spec.eps.to_f64();
    for x in &spec.points {
        match hl_generator_check(x, &spec.eps) {
            Ok(err) => {
                let e = err.to_f64();
                report.metrics.insert(format!("error_{}", x), e);
                let failure = (e > bound).then(|| format!("x = {}: error {} > {}", x, e, bound));
                report.absorb(1, failure);
            }
            Err(e) => report.fail(format!("x = {}: {}", x, e)),
        }
    }
    let grid = configs(spec.rate_max_m, spec.rate_max_x);
    let failure = first_failure(&grid, |x| {
        let total: u64 = cont_rates(x).iter().map(|&(_, r)| r).sum();
        (total != x.excess() as u64).then(|| format!("x = {}: total rate {} ≠ {}", x, total, x.excess()))
    });
    report.absorb(grid.len(), failure);
    report
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    /// Exact parameters for the row sums.
    pub params: QTParams,
    pub max_m: usize,
    pub max_x: usize,
    pub max_n: usize,
    /// Float parameters for the convergence check.
    pub convergence_params: QTParams,
    /// Increasing values of `N`.
    pub levels: Vec<usize>,
    pub convergence_max_m: usize,
    pub convergence_max_x: usize,
    /// Pass iff the final error is ≤ `bound_factor · t^{N − bound_shift}`.
    pub bound_factor: f64,
    pub bound_shift: i64,
}

/// Largest `|Λ^N_{N−1}(π(x), π̄(y)) − Υ_m(x, y)|` over the convergence grid.
pub fn link_error(spec: &LinkSpec, n: usize) -> Result<f64> {
    let params = &spec.convergence_params;
    let grid = configs(spec.convergence_max_m, spec.convergence_max_x);
    let errs = grid
        .par_iter()
        .map(|x| -> Result<f64> {
            let mut worst = 0.0f64;
            for y in successors(x) {
                let link = lambda_link(x, &y, n, params)?.to_f64();
                let ups = upsilon(x, &y, params).to_f64();
                worst = worst.max((link - ups).abs());
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

/// Exact link row sums on every admissible `N`, then convergence to `Υ_m`.
pub fn link_convergence(spec: &LinkSpec) -> SuiteReport {
    let mut report = SuiteReport::new("link-convergence");
    let cases: Vec<(ParticleConfig, usize)> = configs(spec.max_m, spec.max_x)
        .into_iter()
        .flat_map(|x| {
            let lo = (x.coords()[0] + 2).saturating_sub(x.m()).max(1);
            (lo..=spec.max_n).map(move |n| (x.clone(), n))
        })
        .collect();
    let params = &spec.params;
    let failure = first_failure(&cases, |(x, n)| {
        let row: Result<Vec<Scalar>> = successors(x)
            .iter()
            .map(|y| lambda_link(x, y, *n, params))
            .collect();
        match row.and_then(|r| sum(r.into_iter(), params.mode())) {
            Ok(s) if is_unit(&s) => None,
            Ok(s) => Some(format!(
                "x = {}, N = {}, {}: link row sum {}",
                x,
                n,
                params_label(params),
                s
            )),
            Err(e) => Some(format!("x = {}, N = {}: {}", x, n, e)),
        }
    });
    report.absorb(cases.len(), failure);

    let mut previous: Option<(usize, f64)> = None;
    for &n in &spec.levels {
        match link_error(spec, n) {
            Ok(err) => {
                report.metrics.insert(format!("error_N{}", n), err);
                let mut failure = None;
                if let Some((pn, pe)) = previous {
                    if err >= pe {
                        failure = Some(format!(
                            "error {} at N = {} does not improve on {} at N = {}",
                            err, n, pe, pn
                        ));
                    }
                }
                report.absorb(1, failure);
                previous = Some((n, err));
            }
            Err(e) => report.fail(format!("N = {}: {}", n, e)),
        }
    }
    match previous {
        Some((n, err)) => {
            let t = spec.convergence_params.t().to_f64();
            let bound = spec.bound_factor * t.powi(n as i32 - spec.bound_shift as i32);
            report.metrics.insert("bound".into(), bound);
            if err > bound {
                report.fail(format!("error {} at N = {} exceeds {}", err, n, bound));
            }
        }
        None => report.fail("no levels configured"),
    }
    report
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub normalization: NormalizationSpec,
    pub branching: BranchingSpec,
    pub duality: DualitySpec,
    pub specializations: SpecializationSpec,
    pub boltzmann: BoltzmannSpec,
    pub jack_limit: JackLimitSpec,
    pub hl_generator: HlGeneratorSpec,
    pub link_convergence: LinkSpec,
}

/// Runs one named suite, or all of them for `"all"`.
pub fn run(name: &str, spec: &CheckSpec, kernel: Kernel) -> Result<Vec<SuiteReport>> {
    if name == "all" {
        return SUITES
            .iter()
            .map(|s| run(s, spec, kernel).map(|mut v| v.remove(0)))
            .collect::<Result<Vec<_>>>();
    }
    let report = match name {
        "normalization" => normalization(&spec.normalization, kernel),
        "branching" => branching(&spec.branching),
        "duality" => duality(&spec.duality),
        "specializations" => specializations(&spec.specializations),
        "boltzmann" => boltzmann(&spec.boltzmann),
        "jack-limit" => jack_limit(&spec.jack_limit),
        "hl-generator" => hl_generator(&spec.hl_generator),
        "link-convergence" => link_convergence(&spec.link_convergence),
        other => return Err(Error::Parse(format!("unknown suite {:?}", other))),
    };
    Ok(vec![report])
}
