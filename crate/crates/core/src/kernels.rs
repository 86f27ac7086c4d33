//! One-step transition kernels of the noncolliding walks and their Schur,
//! Hall–Littlewood and Jack degenerations.
//!
//! Every row is indexed by [`successors`], whose order (move masks read as
//! binary numbers, bit `i` set when particle `i+1` moves) is shared by all
//! consumers.

use crate::algebra::{pochhammer_inf_ratio_in, Field, QTParams, Scalar};
use crate::error::{Error, Result};
use crate::macdonald::psi_prime_in;
use crate::partitions::ParticleConfig;
use crate::{try_with_qt, with_qt};

fn binom2(m: usize) -> i64 {
    (m * m.saturating_sub(1) / 2) as i64
}

/// Particles that move in the step `x → y`, or `None` when some
/// `y_i − x_i ∉ {−1, 0}`.
pub fn move_mask(x: &[i64], y: &[i64]) -> Option<Vec<bool>> {
    if x.len() != y.len() {
        return None;
    }
    x.iter()
        .zip(y)
        .map(|(&a, &b)| match a - b {
            0 => Some(false),
            1 => Some(true),
            _ => None,
        })
        .collect()
}

/// All `y ∈ 𝕎_m` with `y_i − x_i ∈ {−1, 0}`, in mask order.
pub fn successors(x: &ParticleConfig) -> Vec<ParticleConfig> {
    let m = x.m();
    (0u64..1 << m)
        .filter_map(|mask| {
            let ys: Option<Vec<usize>> = x
                .coords()
                .iter()
                .enumerate()
                .map(|(i, &c)| c.checked_sub(((mask >> i) & 1) as usize))
                .collect();
            ParticleConfig::new(ys?).ok()
        })
        .collect()
}

fn is_successor(x: &ParticleConfig, y: &ParticleConfig) -> Option<Vec<bool>> {
    move_mask(&x.signed(), &y.signed())
}

/// `V_{t,q}(y) / V_{t,q}(x)`, one paired Pochhammer ratio per `(i, j)`.
fn vandermonde_ratio_in<F: Field>(x: &[i64], y: &[i64], q: &F, t: &F) -> Result<F> {
    let m = x.len();
    let mut acc = F::one();
    for i in 0..m {
        for j in i + 1..m {
            let gap = (j - i) as i64;
            let dx = x[i] - x[j] - gap + 1;
            let dy = y[i] - y[j] - gap + 1;
            let zx = q.powi(gap) * &t.powi(dx);
            let zy = q.powi(gap - 1) * &t.powi(dy);
            acc = acc * &pochhammer_inf_ratio_in(&zx, t, dy - dx)?;
            acc = acc * &pochhammer_inf_ratio_in(&zy, t, dx - dy)?;
        }
    }
    Ok(acc)
}

/// `Υ_m(x, y)` for any `y` with `y_i − x_i ∈ {−1, 0}`, including targets
/// outside `𝕎_m` (collisions or `y_m = −1`), where it evaluates to 0.
pub fn upsilon_raw_in<F: Field>(x: &ParticleConfig, y: &[i64], q: &F, t: &F) -> Result<F> {
    let xs = x.signed();
    let mv = move_mask(&xs, y)
        .ok_or_else(|| Error::Domain(format!("{:?} is not a one-step target of {}", y, x)))?;
    let m = xs.len();
    let mut acc = t.powi(-binom2(m)) * &vandermonde_ratio_in(&xs, y, q, t)?;
    for i in 0..m {
        for j in i + 1..m {
            if mv[i] || !mv[j] {
                continue;
            }
            let gap = (j - i) as i64;
            let e = xs[i] - xs[j] - gap;
            let num =
                (t.powi(e + 1) * &q.powi(gap - 1)).one_minus() * &(t.powi(e) * &q.powi(gap + 1)).one_minus();
            let den = (t.powi(e + 1) * &q.powi(gap)).one_minus() * &(t.powi(e) * &q.powi(gap)).one_minus();
            acc = acc * &num / den;
        }
    }
    for (i, &moves) in mv.iter().enumerate() {
        let k = (m - 1 - i) as i64;
        acc = acc
            * &if moves {
                t.powi(k) - q.powi(k) * &t.powi(xs[i])
            } else {
                t.powi(xs[i])
            };
    }
    Ok(acc)
}

/// `Υ_m(x, y)`, zero unless `y` is a successor of `x`.
pub fn upsilon_in<F: Field>(x: &ParticleConfig, y: &ParticleConfig, q: &F, t: &F) -> F {
    if x.m() != y.m() || is_successor(x, y).is_none() {
        return F::zero();
    }
    upsilon_raw_in(x, &y.signed(), q, t).expect("successor steps keep every factor finite")
}

/// `Υ_m(x, y)` through the Pieri form
/// `t^{…} · V(y)/V(x) · ψ'_{(x−δ)/(y−δ)}(t, q) · ∏_{moves} (1 − q^{m−i} t^{x_i−m+i})`.
pub fn upsilon_factored_in<F: Field>(x: &ParticleConfig, y: &ParticleConfig, q: &F, t: &F) -> F {
    let Some(mv) = (x.m() == y.m()).then(|| is_successor(x, y)).flatten() else {
        return F::zero();
    };
    let (xs, ys) = (x.signed(), y.signed());
    let m = xs.len();
    let shifted = |i: usize| xs[i] - (m - 1 - i) as i64;
    let exponent =
        -binom2(m) + xs.iter().sum::<i64>() + (0..m).map(|i| shifted(i) * (ys[i] - xs[i])).sum::<i64>();
    let mut acc = t.powi(exponent)
        * &vandermonde_ratio_in(&xs, &ys, q, t).expect("successor steps keep every factor finite")
        * &psi_prime_in(&x.minus_delta(), &y.minus_delta(), t, q);
    for i in (0..m).filter(|&i| mv[i]) {
        acc = acc * &(q.powi((m - 1 - i) as i64) * &t.powi(shifted(i))).one_minus();
    }
    acc
}

pub fn upsilon(x: &ParticleConfig, y: &ParticleConfig, params: &QTParams) -> Scalar {
    with_qt!(params, |q, t| upsilon_in(x, y, q, t))
}

pub fn upsilon_factored(x: &ParticleConfig, y: &ParticleConfig, params: &QTParams) -> Scalar {
    with_qt!(params, |q, t| upsilon_factored_in(x, y, q, t))
}

/// Kernel value at a target that need not lie in `𝕎_m`.
pub fn upsilon_unfiltered(x: &ParticleConfig, y: &[i64], params: &QTParams) -> Result<Scalar> {
    try_with_qt!(params, |q, t| upsilon_raw_in(x, y, q, t))
}

pub fn upsilon_row_in<F: Field>(x: &ParticleConfig, q: &F, t: &F) -> Vec<(ParticleConfig, F)> {
    successors(x)
        .into_iter()
        .map(|y| {
            let p = upsilon_in(x, &y, q, t);
            (y, p)
        })
        .collect()
}

/// The probability row of `x`, in successor order.
pub fn upsilon_row(x: &ParticleConfig, params: &QTParams) -> Vec<(ParticleConfig, Scalar)> {
    successors(x)
        .into_iter()
        .map(|y| {
            let p = upsilon(x, &y, params);
            (y, p)
        })
        .collect()
}

/// Schur kernel `q^{−C(m,2)+(m−1)(|x|−|y|)} ∏_{i<j} (q^{y_j}−q^{y_i})/(q^{x_j}−q^{x_i}) ∏_i (q^{x_i} | 1−q^{x_i})`.
pub fn upsilon_schur_in<F: Field>(x: &ParticleConfig, y: &ParticleConfig, q: &F) -> F {
    let Some(mv) = (x.m() == y.m()).then(|| is_successor(x, y)).flatten() else {
        return F::zero();
    };
    let (xs, ys) = (x.signed(), y.signed());
    let m = xs.len();
    let size_drop: i64 = mv.iter().filter(|&&b| b).count() as i64;
    let mut acc = q.powi(-binom2(m) + (m as i64 - 1) * size_drop);
    for i in 0..m {
        for j in i + 1..m {
            acc = acc * &(q.powi(ys[j]) - q.powi(ys[i])) / (q.powi(xs[j]) - q.powi(xs[i]));
        }
        let qx = q.powi(xs[i]);
        acc = acc * &if mv[i] { qx.one_minus() } else { qx };
    }
    acc
}

fn open_unit(s: &Scalar, what: &str) -> Result<()> {
    let v = s.to_f64();
    let ok = match s {
        Scalar::Exact(r) => *r > Field::zero() && *r < Field::one(),
        Scalar::Float(_) => v > 0.0 && v < 1.0,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("{} = {} must lie in (0, 1)", what, s)))
    }
}

pub fn upsilon_schur(x: &ParticleConfig, y: &ParticleConfig, q: &Scalar) -> Result<Scalar> {
    open_unit(q, "q")?;
    Ok(match q {
        Scalar::Exact(q) => Scalar::Exact(upsilon_schur_in(x, y, q)),
        Scalar::Float(q) => Scalar::Float(upsilon_schur_in(x, y, q)),
    })
}

/// Hall–Littlewood kernel, the `q = 0` product form.
pub fn upsilon_hl_in<F: Field>(x: &ParticleConfig, y: &ParticleConfig, t: &F) -> F {
    let Some(mv) = (x.m() == y.m()).then(|| is_successor(x, y)).flatten() else {
        return F::zero();
    };
    let xs = x.signed();
    let m = xs.len();
    let last = t.powi(xs[m - 1]);
    let mut acc = t.powi(-binom2(m)) * &if mv[m - 1] { last.one_minus() } else { last };
    for i in 0..m - 1 {
        acc = acc
            * &if mv[i] {
                t.powi((m - 1 - i) as i64)
            } else {
                t.powi(xs[i])
            };
        if mv[i] && !mv[i + 1] {
            acc = acc * &t.powi(xs[i] - xs[i + 1] - 1).one_minus();
        }
    }
    acc
}

pub fn upsilon_hl(x: &ParticleConfig, y: &ParticleConfig, t: &Scalar) -> Result<Scalar> {
    open_unit(t, "t")?;
    Ok(match t {
        Scalar::Exact(t) => Scalar::Exact(upsilon_hl_in(x, y, t)),
        Scalar::Float(t) => Scalar::Float(upsilon_hl_in(x, y, t)),
    })
}

/// Jack-limit configuration: integer offsets `n_1 > … > n_m` and `α > 0`,
/// with positions `X_i = n_i − i(α−1)` so that `X_i − X_{i+1} ≥ α`.
#[derive(Clone, Debug, PartialEq)]
pub struct JackConfig {
    offsets: Vec<i64>,
    alpha: Scalar,
}

impl JackConfig {
    pub fn new(offsets: Vec<i64>, alpha: Scalar) -> Result<JackConfig> {
        if offsets.is_empty() || offsets.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidConfig(format!(
                "Jack offsets {:?} must be nonempty and strictly decreasing",
                offsets
            )));
        }
        if alpha.to_f64() <= 0.0 {
            return Err(Error::OutOfRange(format!("alpha = {} must be positive", alpha)));
        }
        Ok(JackConfig { offsets, alpha })
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn alpha(&self) -> &Scalar {
        &self.alpha
    }

    pub fn m(&self) -> usize {
        self.offsets.len()
    }

    /// All offsets shifted by `c`.
    pub fn translate(&self, c: i64) -> JackConfig {
        JackConfig {
            offsets: self.offsets.iter().map(|&n| n + c).collect(),
            alpha: self.alpha.clone(),
        }
    }
}

/// Offsets decreased by 0 or 1 with strict order kept, in mask order.
pub fn jack_successors(x: &JackConfig) -> Vec<JackConfig> {
    let m = x.m();
    (0u64..1 << m)
        .filter_map(|mask| {
            let ys: Vec<i64> = (0..m).map(|i| x.offsets[i] - ((mask >> i) & 1) as i64).collect();
            JackConfig::new(ys, x.alpha.clone()).ok()
        })
        .collect()
}

/// `b^{m−k} (1−b)^k ∏_{i<j} ((X_i − α·1_i) − (X_j − α·1_j)) / (X_i − X_j)`,
/// where `k` particles move.
pub fn upsilon_jack_in<F: Field>(x: &[i64], y: &[i64], alpha: &F, b: &F) -> F {
    let Some(mv) = move_mask(x, y) else {
        return F::zero();
    };
    if y.windows(2).any(|w| w[0] <= w[1]) {
        return F::zero();
    }
    let m = x.len();
    let pos = |i: usize| F::from_int(x[i]) - F::from_int(i as i64 + 1) * &(alpha.clone() - F::one());
    let shifted = |i: usize| if mv[i] { pos(i) - alpha.clone() } else { pos(i) };
    let k = mv.iter().filter(|&&b| b).count() as i64;
    let mut acc = b.powi(m as i64 - k) * &b.one_minus().powi(k);
    for i in 0..m {
        for j in i + 1..m {
            acc = acc * &(shifted(i) - shifted(j)) / (pos(i) - pos(j));
        }
    }
    acc
}

pub fn upsilon_jack(x: &JackConfig, y: &JackConfig, b: &Scalar) -> Result<Scalar> {
    open_unit(b, "b")?;
    if x.alpha != y.alpha {
        return Err(Error::Domain("Jack configurations with different alpha".into()));
    }
    match (&x.alpha, b) {
        (Scalar::Exact(a), Scalar::Exact(b)) => {
            Ok(Scalar::Exact(upsilon_jack_in(&x.offsets, &y.offsets, a, b)))
        }
        (Scalar::Float(a), Scalar::Float(b)) => {
            Ok(Scalar::Float(upsilon_jack_in(&x.offsets, &y.offsets, a, b)))
        }
        _ => Err(Error::ModeMismatch),
    }
}
