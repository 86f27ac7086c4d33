//! Discrete-time simulation to absorption, trajectory probabilities, and the
//! continuous-time block-jump process with its Hall–Littlewood cross-check.
//!
//! Randomness comes from ChaCha20 (`rand_chacha::ChaCha20Rng`). A run keyed by
//! `(seed, replicate)` uses the generator built by `seed_from_u64(seed)` with
//! stream id `replicate`, starting at word position 0. Each discrete step
//! draws exactly one `f64`; each continuous event draws one exponential time,
//! one clock selector and one block start, in that order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Field, QTPair, QTParams, Scalar};
use crate::error::{Error, Result};
use crate::kernels::{move_mask, successors, upsilon, upsilon_hl_in, upsilon_row_in};
use crate::partitions::ParticleConfig;

pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

/// Root of a family of independent, reproducible random streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// The generator of replicate `index`.
    pub fn stream(self, index: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.0);
        rng.set_stream(index);
        rng
    }
}

/// Runs `job` once per replicate `0..runs` in parallel; results are in
/// replicate order whatever the thread count.
pub fn par_replicates<T, J>(seed: RngSeed, runs: u64, job: J) -> Vec<T>
where
    T: Send,
    J: Fn(u64, &mut ChaCha20Rng) -> T + Sync,
{
    (0..runs)
        .into_par_iter()
        .map(|r| job(r, &mut seed.stream(r)))
        .collect()
}

/// Float probabilities of the row of `x`, in successor order. Exact rows are
/// evaluated exactly and converted once.
pub fn float_row(x: &ParticleConfig, params: &QTParams) -> Vec<(ParticleConfig, f64)> {
    match params.pair() {
        QTPair::Float(q, t) => upsilon_row_in(x, &q, &t),
        QTPair::Exact(q, t) => upsilon_row_in(x, q, t)
            .into_iter()
            .map(|(y, p)| (y, p.to_f64()))
            .collect(),
    }
}

/// Inverse-CDF draw from a row; leftover mass goes to the last entry.
fn draw<'a, R: Rng + ?Sized>(row: &'a [(ParticleConfig, f64)], rng: &mut R) -> &'a ParticleConfig {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (y, p) in row {
        acc += p;
        if u < acc {
            return y;
        }
    }
    &row.last().expect("every row has at least one successor").0
}

/// One step of the walk from `x`.
pub fn sample_step<R: Rng + ?Sized>(x: &ParticleConfig, params: &QTParams, rng: &mut R) -> ParticleConfig {
    let row = float_row(x, params);
    draw(&row, rng).clone()
}

/// A discrete path from `x0`, stored as per-step move masks.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub params: QTParams,
    pub x0: ParticleConfig,
    pub moves: Vec<Vec<bool>>,
    pub terminal: bool,
}

#[derive(Serialize, Deserialize)]
struct TrajectoryJson {
    m: usize,
    q: Scalar,
    t: Scalar,
    x0: ParticleConfig,
    moves: Vec<Vec<u8>>,
    terminal: bool,
}

impl Trajectory {
    /// `x0, x1, …`, validating every step.
    pub fn configs(&self) -> Result<Vec<ParticleConfig>> {
        let m = self.x0.m();
        let mut out = vec![self.x0.clone()];
        for (k, mask) in self.moves.iter().enumerate() {
            if mask.len() != m {
                return Err(Error::InvalidTrajectory(format!(
                    "step {} has {} bits for {} particles",
                    k,
                    mask.len(),
                    m
                )));
            }
            let cur = out.last().expect("starts nonempty");
            let next: Vec<i64> = cur
                .signed()
                .iter()
                .zip(mask)
                .map(|(&c, &b)| c - b as i64)
                .collect();
            let y = ParticleConfig::from_signed(&next)
                .map_err(|e| Error::InvalidTrajectory(format!("step {} leaves the state space: {}", k, e)))?;
            out.push(y);
        }
        Ok(out)
    }

    pub fn final_config(&self) -> Result<ParticleConfig> {
        Ok(self.configs()?.pop().expect("starts nonempty"))
    }

    /// Replays the path and checks the absorption bookkeeping.
    pub fn validate(&self) -> Result<()> {
        let configs = self.configs()?;
        let last = configs.last().expect("starts nonempty");
        if configs[..configs.len() - 1].iter().any(|c| c.is_delta()) {
            return Err(Error::InvalidTrajectory("continues after absorption".into()));
        }
        if self.terminal {
            if !last.is_delta() {
                return Err(Error::InvalidTrajectory(format!(
                    "marked terminal but ends at {}",
                    last
                )));
            }
            let jumps: usize = self.moves.iter().flatten().filter(|&&b| b).count();
            if jumps != self.x0.excess() {
                return Err(Error::InvalidTrajectory(format!(
                    "{} jumps from {} (expected {})",
                    jumps,
                    self.x0,
                    self.x0.excess()
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn to_json(&self) -> String {
        let repr = TrajectoryJson {
            m: self.x0.m(),
            q: self.params.q().clone(),
            t: self.params.t().clone(),
            x0: self.x0.clone(),
            moves: self
                .moves
                .iter()
                .map(|s| s.iter().map(|&b| b as u8).collect())
                .collect(),
            terminal: self.terminal,
        };
        serde_json::to_string(&repr).expect("trajectory serializes")
    }

    pub fn from_json(text: &str) -> Result<Trajectory> {
        let repr: TrajectoryJson =
            serde_json::from_str(text).map_err(|e| Error::InvalidTrajectory(e.to_string()))?;
        if repr.m != repr.x0.m() {
            return Err(Error::InvalidTrajectory(format!(
                "m = {} but x0 has {} particles",
                repr.m,
                repr.x0.m()
            )));
        }
        let mut moves = Vec::with_capacity(repr.moves.len());
        for step in &repr.moves {
            let bits: Option<Vec<bool>> = step
                .iter()
                .map(|&b| match b {
                    0 => Some(false),
                    1 => Some(true),
                    _ => None,
                })
                .collect();
            moves.push(bits.ok_or_else(|| Error::InvalidTrajectory("move bits must be 0 or 1".into()))?);
        }
        let traj = Trajectory {
            params: QTParams::new(repr.q, repr.t)?,
            x0: repr.x0,
            moves,
            terminal: repr.terminal,
        };
        traj.validate()?;
        Ok(traj)
    }
}

/// Runs the walk until `δ_m` or until `max_steps` steps have been taken.
pub fn simulate<R: Rng + ?Sized>(
    x0: &ParticleConfig,
    params: &QTParams,
    rng: &mut R,
    max_steps: u64,
) -> Result<Trajectory> {
    if max_steps == 0 {
        return Err(Error::OutOfRange("max_steps must be at least 1".into()));
    }
    let mut x = x0.clone();
    let mut moves = Vec::new();
    while !x.is_delta() && (moves.len() as u64) < max_steps {
        let y = sample_step(&x, params, rng);
        moves.push(move_mask(&x.signed(), &y.signed()).expect("successors differ by one-step masks"));
        x = y;
    }
    Ok(Trajectory {
        params: params.clone(),
        x0: x0.clone(),
        moves,
        terminal: x.is_delta(),
    })
}

/// `∏_k Υ(x_k, x_{k+1})` along the path.
pub fn trajectory_prob(traj: &Trajectory, params: &QTParams) -> Result<Scalar> {
    let configs = traj.configs()?;
    let mut acc = match params.mode() {
        crate::algebra::Mode::Exact => Scalar::int(1),
        crate::algebra::Mode::Float => Scalar::Float(1.0),
    };
    for w in configs.windows(2) {
        acc = acc.try_mul(&upsilon(&w[0], &w[1], params))?;
    }
    Ok(acc)
}

/// Clock rates `(i, i·(x_i − x_{i+1} − 1))` for `i = 1..m`, with `x_{m+1} = −1`.
pub fn cont_rates(x: &ParticleConfig) -> Vec<(usize, u64)> {
    let xs = x.signed();
    let m = xs.len();
    (0..m)
        .map(|k| {
            let below = if k + 1 < m { xs[k + 1] } else { -1 };
            (k + 1, ((k + 1) as i64 * (xs[k] - below - 1)) as u64)
        })
        .collect()
}

/// Moves particles `j..=i` (1-based) one step left, if the result is valid.
pub fn apply_block(x: &ParticleConfig, i: usize, j: usize) -> Result<ParticleConfig> {
    if j == 0 || j > i || i > x.m() {
        return Err(Error::Domain(format!("no block {}..{} in {}", j, i, x)));
    }
    let ys: Vec<i64> = x
        .signed()
        .iter()
        .enumerate()
        .map(|(k, &c)| if (j - 1..i).contains(&k) { c - 1 } else { c })
        .collect();
    ParticleConfig::from_signed(&ys)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContEvent {
    pub time: f64,
    pub i: usize,
    pub j: usize,
}

/// A continuous-time run: its events and where it stopped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContRun {
    pub x0: ParticleConfig,
    pub events: Vec<ContEvent>,
    #[serde(rename = "final")]
    pub final_config: ParticleConfig,
    pub absorbed: bool,
}

/// Event-driven simulation up to time `t_max` or absorption.
pub fn simulate_cont<R: Rng + ?Sized>(x0: &ParticleConfig, rng: &mut R, t_max: f64) -> Result<ContRun> {
    if t_max.is_nan() || t_max <= 0.0 {
        return Err(Error::OutOfRange(format!("t_max = {} must be positive", t_max)));
    }
    let mut x = x0.clone();
    let mut now = 0.0;
    let mut events = Vec::new();
    loop {
        let rates = cont_rates(&x);
        let total: u64 = rates.iter().map(|r| r.1).sum();
        if total == 0 {
            break;
        }
        let hold = Exp::new(total as f64).expect("positive rate").sample(rng);
        if now + hold > t_max {
            break;
        }
        now += hold;
        let mut pick = rng.random_range(0..total);
        let i = rates
            .iter()
            .find(|&&(_, r)| {
                if pick < r {
                    true
                } else {
                    pick -= r;
                    false
                }
            })
            .expect("pick below total")
            .0;
        let j = rng.random_range(1..=i);
        x = apply_block(&x, i, j).expect("positive rate leaves room for the block");
        events.push(ContEvent { time: now, i, j });
    }
    Ok(ContRun {
        x0: x0.clone(),
        events,
        absorbed: x.is_delta(),
        final_config: x,
    })
}

/// Largest discrepancy between the Hall–Littlewood row at `t = 1 − ε`,
/// divided by `ε`, and the block-jump rates; the diagonal is compared through
/// `(1 − Υ(x, x))/ε ≈ |x| − C(m, 2)`.
pub fn hl_generator_check(x: &ParticleConfig, eps: &Scalar) -> Result<Scalar> {
    let e = eps.to_f64();
    if !(e > 0.0 && e < 0.1) {
        return Err(Error::OutOfRange(format!("eps = {} must lie in (0, 0.1)", eps)));
    }
    match eps {
        Scalar::Exact(r) => Ok(Scalar::Exact(generator_error(x, r))),
        Scalar::Float(f) => Ok(Scalar::Float(generator_error(x, f))),
    }
}

fn generator_error<F: Field>(x: &ParticleConfig, eps: &F) -> F {
    let t = eps.one_minus();
    let xs = x.signed();
    let m = xs.len();
    let mut worst = F::zero();
    for y in successors(x) {
        let p = upsilon_hl_in(x, &y, &t);
        let mv = move_mask(&xs, &y.signed()).expect("successor");
        let moved: Vec<usize> = (0..m).filter(|&k| mv[k]).collect();
        let err = if moved.is_empty() {
            let target = F::from_int(x.excess() as i64);
            (p.one_minus() / eps.clone() - target).abs()
        } else {
            let contiguous = moved.windows(2).all(|w| w[1] == w[0] + 1);
            let target = if contiguous {
                let i = *moved.last().expect("nonempty");
                let below = if i + 1 < m { xs[i + 1] } else { -1 };
                F::from_int(xs[i] - below - 1)
            } else {
                F::zero()
            };
            (p / eps.clone() - target).abs()
        };
        if err > worst {
            worst = err;
        }
    }
    worst
}
