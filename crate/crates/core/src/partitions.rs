//! Partitions, Young-diagram statistics, interlacing, and the particle
//! configuration space `𝕎_m`.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weakly decreasing sequence of nonnegative integers. Trailing zeros are
/// dropped on construction; indexing past the last part yields 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

/// Arm, leg, coarm and coleg of one cell of a Young diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoxStats {
    pub arm: usize,
    pub leg: usize,
    pub coarm: usize,
    pub coleg: usize,
}

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Partition> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!(
                "{:?} is not weakly decreasing",
                parts
            )));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Partition {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of positive parts, `ℓ(λ)`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `|λ|`.
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Column lengths `λ'_j = #{i : λ_i ≥ j}`.
    pub fn conjugate(&self) -> Partition {
        let width = self.parts.first().copied().unwrap_or(0);
        let parts = (1..=width)
            .map(|j| self.parts.iter().take_while(|&&p| p >= j).count())
            .collect();
        Partition { parts }
    }

    /// `n(λ) = Σ_i (i−1) λ_i`.
    pub fn n_stat(&self) -> usize {
        self.parts.iter().enumerate().map(|(i, &p)| i * p).sum()
    }

    /// Whether the 1-indexed cell `(i, j)` lies in the diagram.
    pub fn contains_cell(&self, i: usize, j: usize) -> bool {
        i >= 1 && j >= 1 && self[i - 1] >= j
    }

    /// Statistics of the 1-indexed cell `(i, j)`, or `None` outside the diagram.
    pub fn box_stats(&self, i: usize, j: usize) -> Option<BoxStats> {
        if !self.contains_cell(i, j) {
            return None;
        }
        let col_len = self.parts.iter().take_while(|&&p| p >= j).count();
        Some(BoxStats {
            arm: self[i - 1] - j,
            leg: col_len - i,
            coarm: j - 1,
            coleg: i - 1,
        })
    }

    /// All cells `(i, j)`, 1-indexed, row by row.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (1..=p).map(move |j| (i + 1, j)))
    }

    /// Every partition of size at most `max_size`.
    pub fn all_up_to(max_size: usize) -> Vec<Partition> {
        fn extend(rest: usize, cap: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
            out.push(Partition {
                parts: prefix.clone(),
            });
            for p in (1..=cap.min(rest)).rev() {
                prefix.push(p);
                extend(rest - p, p, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        extend(max_size, max_size, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<usize>) -> Result<Partition> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Vec<usize> {
        p.parts
    }
}

impl Index<usize> for Partition {
    type Output = usize;
    fn index(&self, i: usize) -> &usize {
        self.parts.get(i).unwrap_or(&0)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", p)?;
        }
        write!(f, ")")
    }
}

/// `μ ≺ λ`: `λ_1 ≥ μ_1 ≥ λ_2 ≥ μ_2 ≥ …`.
pub fn interlaces(mu: &Partition, lambda: &Partition) -> bool {
    let n = mu.len().max(lambda.len());
    (0..n).all(|i| lambda[i] >= mu[i] && mu[i] >= lambda[i + 1])
}

/// All `μ ≺ λ`, ordered lexicographically on the part vector read from its last
/// entry (so `λ = (2,1)` gives `(1), (2), (1,1), (2,1)`).
pub fn enumerate_interlacing(lambda: &Partition) -> Vec<Partition> {
    let n = lambda.len();
    let mut out = Vec::new();
    let mut current = vec![0usize; n];
    // The last coordinate varies slowest.
    fn rec(k: usize, lambda: &Partition, current: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if k == 0 {
            out.push(Partition::new(current.clone()).expect("interlacing keeps order"));
            return;
        }
        let i = k - 1;
        for v in lambda[i + 1]..=lambda[i] {
            current[i] = v;
            rec(k - 1, lambda, current, out);
        }
    }
    rec(n, lambda, &mut current, &mut out);
    out
}

/// A configuration `x_1 > x_2 > … > x_m ≥ 0` of `m ≥ 1` particles.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct ParticleConfig {
    coords: Vec<usize>,
}

impl ParticleConfig {
    pub fn new(coords: Vec<usize>) -> Result<ParticleConfig> {
        if coords.is_empty() {
            return Err(Error::InvalidConfig("at least one particle required".into()));
        }
        if coords.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidConfig(format!(
                "{:?} is not strictly decreasing",
                coords
            )));
        }
        Ok(ParticleConfig { coords })
    }

    /// Validates signed coordinates, as they come from the outside world.
    pub fn from_signed(coords: &[i64]) -> Result<ParticleConfig> {
        if let Some(c) = coords.iter().find(|&&c| c < 0) {
            return Err(Error::InvalidConfig(format!("coordinate {} is negative", c)));
        }
        ParticleConfig::new(coords.iter().map(|&c| c as usize).collect())
    }

    /// The staircase `δ_m = (m−1, …, 1, 0)`.
    pub fn delta(m: usize) -> ParticleConfig {
        ParticleConfig {
            coords: (0..m).rev().collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn signed(&self) -> Vec<i64> {
        self.coords.iter().map(|&c| c as i64).collect()
    }

    /// `|x|`.
    pub fn size(&self) -> usize {
        self.coords.iter().sum()
    }

    pub fn is_delta(&self) -> bool {
        let m = self.m();
        self.coords.iter().enumerate().all(|(i, &c)| c == m - 1 - i)
    }

    /// `|x| − binom(m, 2)`: boxes of `x − δ_m`.
    pub fn excess(&self) -> usize {
        let m = self.m();
        self.size() - m * (m - 1) / 2
    }

    /// The partition `x − δ_m`.
    pub fn minus_delta(&self) -> Partition {
        let m = self.m();
        Partition::new(
            self.coords
                .iter()
                .enumerate()
                .map(|(i, &c)| c - (m - 1 - i))
                .collect(),
        )
        .expect("strict decrease gives a partition")
    }

    /// Every configuration of `m` particles with `x_1 ≤ max_x`, in increasing
    /// lexicographic order.
    pub fn all_up_to(m: usize, max_x: usize) -> Vec<ParticleConfig> {
        fn rec(k: usize, upper: usize, prefix: &mut Vec<usize>, out: &mut Vec<ParticleConfig>) {
            if k == 0 {
                out.push(ParticleConfig {
                    coords: prefix.clone(),
                });
                return;
            }
            // Remaining k particles need values k−1, …, 0 at least.
            for v in (k - 1)..=upper {
                prefix.push(v);
                if v > 0 || k == 1 {
                    rec(k - 1, v.saturating_sub(1), prefix, out);
                }
                prefix.pop();
            }
        }
        if m == 0 || max_x + 1 < m {
            return Vec::new();
        }
        let mut out = Vec::new();
        rec(m, max_x, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

impl TryFrom<Vec<i64>> for ParticleConfig {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<ParticleConfig> {
        ParticleConfig::from_signed(&v)
    }
}

impl From<ParticleConfig> for Vec<i64> {
    fn from(x: ParticleConfig) -> Vec<i64> {
        x.signed()
    }
}

impl fmt::Display for ParticleConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, ")")
    }
}
