//! Branching data of Macdonald polynomials: Pieri coefficients, principal
//! specializations, hook products, and the finite-`N` link between
//! `N` and `N − 1` variables pulled back to particle configurations.

use crate::algebra::{Field, QTParams, Scalar};
use crate::error::{Error, Result};
use crate::partitions::{interlaces, ParticleConfig, Partition};
use crate::{try_with_qt, with_qt};

/// `x^0, …, x^n`.
fn powers<F: Field>(x: &F, n: usize) -> Vec<F> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = F::one();
    for _ in 0..=n {
        out.push(acc.clone());
        acc = acc * x;
    }
    out
}

/// `(z; q)_∞ / (z·q^s; q)_∞` for `z = q^e·c`, with `e + s ≥ 0`.
///
/// Only nonnegative powers of `q` are formed, so `q = 0` is allowed.
fn q_shift_ratio<F: Field>(q: &F, e: i64, c: &F, s: i64) -> F {
    debug_assert!(e >= 0 && e + s >= 0);
    let factor = |k: i64| (q.powi(e + k) * c).one_minus();
    if s >= 0 {
        (0..s).fold(F::one(), |acc, k| acc * &factor(k))
    } else {
        F::one() / (s..0).fold(F::one(), |acc, k| acc * &factor(k))
    }
}

/// `ψ_{λ/μ}(q, t)`, zero unless `μ ≺ λ`.
///
/// Each ratio `𝖿(q^a t^c)/𝖿(q^b t^c)` with `𝖿(u) = (tu;q)_∞/(qu;q)_∞` is the
/// finite product `(q^a t^{c+1}; q)_∞/(q^b t^{c+1}; q)_∞ · (q^{b+1} t^c; q)_∞/(q^{a+1} t^c; q)_∞`.
/// The product runs over `1 ≤ i ≤ j ≤ ℓ(μ)`.
pub fn psi_in<F: Field>(lambda: &Partition, mu: &Partition, q: &F, t: &F) -> F {
    if !interlaces(mu, lambda) {
        return F::zero();
    }
    let n = mu.len();
    let tp = powers(t, n + 1);
    let (lam, mu) = (|i: usize| lambda[i - 1] as i64, |i: usize| mu[i - 1] as i64);
    let mut acc = F::one();
    for i in 1..=n {
        for j in i..=n {
            let c = j - i;
            let d = lam(i) - mu(i);
            // 𝖿(q^{μ_i−μ_j} t^c) / 𝖿(q^{λ_i−μ_j} t^c)
            acc = acc * &q_shift_ratio(q, mu(i) - mu(j), &tp[c + 1], d);
            acc = acc * &q_shift_ratio(q, lam(i) - mu(j) + 1, &tp[c], -d);
            // 𝖿(q^{λ_i−λ_{j+1}} t^c) / 𝖿(q^{μ_i−λ_{j+1}} t^c)
            acc = acc * &q_shift_ratio(q, lam(i) - lam(j + 1), &tp[c + 1], -d);
            acc = acc * &q_shift_ratio(q, mu(i) - lam(j + 1) + 1, &tp[c], d);
        }
    }
    acc
}

pub fn psi(lambda: &Partition, mu: &Partition, params: &QTParams) -> Scalar {
    with_qt!(params, |q, t| psi_in(lambda, mu, q, t))
}

/// Whether `λ_i − μ_i ∈ {0, 1}` for all `i`, i.e. the columns interlace.
pub fn is_vertical_strip(lambda: &Partition, mu: &Partition) -> bool {
    interlaces(&mu.conjugate(), &lambda.conjugate())
}

/// `ψ'_{λ/μ}(q, t)`, zero unless the columns of `μ` and `λ` interlace.
pub fn psi_prime_in<F: Field>(lambda: &Partition, mu: &Partition, q: &F, t: &F) -> F {
    if !is_vertical_strip(lambda, mu) {
        return F::zero();
    }
    let n = lambda.len();
    let stays: Vec<usize> = (0..n).filter(|&i| lambda[i] == mu[i]).collect();
    let grows: Vec<usize> = (0..n).filter(|&i| lambda[i] == mu[i] + 1).collect();
    let mut num = F::one();
    let mut den = F::one();
    for &i in &stays {
        for &j in grows.iter().filter(|&&j| j > i) {
            let c = (j - i) as i64;
            let qm = q.powi((mu[i] - mu[j]) as i64);
            let ql = q.powi((lambda[i] - lambda[j]) as i64);
            num = num * &(qm.clone() * &t.powi(c - 1)).one_minus();
            num = num * &(ql.clone() * &t.powi(c + 1)).one_minus();
            den = den * &(qm * &t.powi(c)).one_minus();
            den = den * &(ql * &t.powi(c)).one_minus();
        }
    }
    num / den
}

pub fn psi_prime(lambda: &Partition, mu: &Partition, params: &QTParams) -> Scalar {
    with_qt!(params, |q, t| psi_prime_in(lambda, mu, q, t))
}

/// `ψ_{λ/μ}(q,t) = ψ'_{λ'/μ'}(t,q)`, compared in the mode of `params`.
pub fn psi_duality_check(lambda: &Partition, mu: &Partition, params: &QTParams) -> bool {
    let (lc, mc) = (lambda.conjugate(), mu.conjugate());
    let lhs = with_qt!(params, |q, t| psi_in(lambda, mu, q, t));
    let rhs = with_qt!(params, |q, t| psi_prime_in(&lc, &mc, t, q));
    lhs == rhs
}

/// Principal specialization `P_λ(1, t, …, t^{N−1})` split as `t^e · rest`,
/// where `e = n(λ)`. Keeping the monomial apart avoids float underflow for
/// the large partitions produced by [`embed_pi`].
pub fn principal_spec_factored_in<F: Field>(lambda: &Partition, n: usize, q: &F, t: &F) -> Result<(u64, F)> {
    if lambda.len() > n {
        return Err(Error::Domain(format!("{} has more than {} rows", lambda, n)));
    }
    let width = lambda[0];
    let conj = lambda.conjugate();
    let qp = powers(q, width);
    let tp = powers(t, n + 1);
    let mut num = F::one();
    let mut den = F::one();
    for (i, j) in lambda.cells() {
        let arm = lambda[i - 1] - j;
        let leg = conj[j - 1] - i;
        num = num * &(qp[j - 1].clone() * &tp[n + 1 - i]).one_minus();
        den = den * &(qp[arm].clone() * &tp[leg + 1]).one_minus();
    }
    Ok((lambda.n_stat() as u64, num / den))
}

pub fn principal_spec_in<F: Field>(lambda: &Partition, n: usize, q: &F, t: &F) -> Result<F> {
    let (e, rest) = principal_spec_factored_in(lambda, n, q, t)?;
    Ok(t.powi(e as i64) * &rest)
}

pub fn principal_spec(lambda: &Partition, n: usize, params: &QTParams) -> Result<Scalar> {
    try_with_qt!(params, |q, t| principal_spec_in(lambda, n, q, t))
}

/// `c_ν(q,t) = ∏_□ (1 − q^{a(□)} t^{l(□)+1})`.
pub fn hook_c_in<F: Field>(nu: &Partition, q: &F, t: &F) -> F {
    let conj = nu.conjugate();
    nu.cells().fold(F::one(), |acc, (i, j)| {
        let (a, l) = (nu[i - 1] - j, conj[j - 1] - i);
        acc * &(q.powi(a as i64) * &t.powi(l as i64 + 1)).one_minus()
    })
}

/// `c'_ν(q,t) = ∏_□ (1 − q^{a(□)+1} t^{l(□)})`.
pub fn hook_c_prime_in<F: Field>(nu: &Partition, q: &F, t: &F) -> F {
    let conj = nu.conjugate();
    nu.cells().fold(F::one(), |acc, (i, j)| {
        let (a, l) = (nu[i - 1] - j, conj[j - 1] - i);
        acc * &(q.powi(a as i64 + 1) * &t.powi(l as i64)).one_minus()
    })
}

pub fn hook_c(nu: &Partition, params: &QTParams) -> Scalar {
    with_qt!(params, |q, t| hook_c_in(nu, q, t))
}

pub fn hook_c_prime(nu: &Partition, params: &QTParams) -> Scalar {
    with_qt!(params, |q, t| hook_c_prime_in(nu, q, t))
}

fn check_embedding_domain(x: &ParticleConfig, n: usize) -> Result<()> {
    let m = x.m();
    if n == 0 || x.coords()[0] + 2 > n + m {
        return Err(Error::Domain(format!(
            "{} does not fit N = {} (need x_1 ≤ N + m − 2)",
            x, n
        )));
    }
    Ok(())
}

/// `π(x) ∈ 𝕐(N)`: `{λ_i − i} = {0, …, N+m−1} ∖ {x_1, …, x_m}`.
pub fn embed_pi(x: &ParticleConfig, n: usize) -> Result<Partition> {
    check_embedding_domain(x, n)?;
    let m = x.m();
    let holes: Vec<usize> = (0..n + m).rev().filter(|v| !x.coords().contains(v)).collect();
    Partition::new(holes.iter().enumerate().map(|(i, &h)| h + i + 1).collect())
}

/// `π̄(y) ∈ 𝕐(N−1)`: `{μ_i − i} = {1, …, N+m−1} ∖ {y_1+1, …, y_m+1}`.
pub fn embed_pi_bar(y: &ParticleConfig, n: usize) -> Result<Partition> {
    check_embedding_domain(y, n)?;
    let m = y.m();
    let holes: Vec<usize> = (1..n + m)
        .rev()
        .filter(|&v| !y.coords().contains(&(v - 1)))
        .collect();
    Partition::new(holes.iter().enumerate().map(|(i, &h)| h + i + 1).collect())
}

/// `Λ^N_{N−1}(π(x), π̄(y))` at `x_j = t^{j−1}`:
/// `ψ_{λ/μ} · t^{(N−1)(|λ|−|μ|)} · P_μ(1,…,t^{N−2}) / P_λ(1,…,t^{N−1})`.
pub fn lambda_link_in<F: Field>(x: &ParticleConfig, y: &ParticleConfig, n: usize, q: &F, t: &F) -> Result<F> {
    check_embedding_domain(x, n)?;
    if x.m() != y.m() {
        return Err(Error::Domain("configurations of different sizes".into()));
    }
    let one_step = x
        .coords()
        .iter()
        .zip(y.coords())
        .all(|(&a, &b)| a == b || a == b + 1);
    if !one_step {
        return Ok(F::zero());
    }
    let lambda = embed_pi(x, n)?;
    let mu = embed_pi_bar(y, n)?;
    let (e_lam, p_lam) = principal_spec_factored_in(&lambda, n, q, t)?;
    let (e_mu, p_mu) = principal_spec_factored_in(&mu, n - 1, q, t)?;
    let shift = ((n - 1) * (lambda.size() - mu.size())) as i64 + e_mu as i64 - e_lam as i64;
    Ok(psi_in(&lambda, &mu, q, t) * &t.powi(shift) * &p_mu / p_lam)
}

pub fn lambda_link(x: &ParticleConfig, y: &ParticleConfig, n: usize, params: &QTParams) -> Result<Scalar> {
    try_with_qt!(params, |q, t| lambda_link_in(x, y, n, q, t))
}
