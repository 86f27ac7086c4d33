//! Trajectories absorbed at `δ_m` as plane partitions with a cascade front
//! wall, their volume, and the Boltzmann factors of elementary box moves.
//!
//! For a terminal trajectory let `τ_i(j)` be the first time particle `i` sits
//! strictly below level `j + m − i` (column `j` of row `i`). Then
//! `π_{i,j} = τ_i(j) + j − x_m(0) − 1`, with `x(0)` the start. Rows weakly
//! decrease because a particle moves at most one step per time unit, columns
//! decrease because particles never collide, and the front wall
//! `π_{i,λ_i} ≥ λ_i − x_m` says that nothing moves before time 1.

pub mod render;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Field, QTParams, Scalar};
use crate::dynamics::{simulate, RngSeed, Trajectory};
use crate::error::{Error, Result};
use crate::kernels::{move_mask, successors, upsilon};
use crate::partitions::{ParticleConfig, Partition};
use crate::with_qt;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PlanePartitionJson", into = "PlanePartitionJson")]
pub struct PlanePartition {
    x0: ParticleConfig,
    shape: Partition,
    rows: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct PlanePartitionJson {
    x0: ParticleConfig,
    shape: Partition,
    rows: Vec<Vec<usize>>,
}

impl TryFrom<PlanePartitionJson> for PlanePartition {
    type Error = Error;
    fn try_from(j: PlanePartitionJson) -> Result<PlanePartition> {
        let pp = PlanePartition::new(j.x0, j.rows)?;
        if pp.shape != j.shape {
            return Err(Error::InvalidPlanePartition(format!(
                "shape {} does not match x0 − δ_m = {}",
                j.shape, pp.shape
            )));
        }
        Ok(pp)
    }
}

impl From<PlanePartition> for PlanePartitionJson {
    fn from(pp: PlanePartition) -> PlanePartitionJson {
        PlanePartitionJson {
            x0: pp.x0,
            shape: pp.shape,
            rows: pp.rows,
        }
    }
}

impl PlanePartition {
    /// Validates shape `x0 − δ_m`, weak decrease along rows and columns, and
    /// the front wall. Empty rows may be omitted.
    pub fn new(x0: ParticleConfig, mut rows: Vec<Vec<usize>>) -> Result<PlanePartition> {
        let shape = x0.minus_delta();
        while rows.last().is_some_and(|r| r.is_empty()) {
            rows.pop();
        }
        let bad = |msg: String| Err(Error::InvalidPlanePartition(msg));
        if rows.len() != shape.len() {
            return bad(format!("{} nonempty rows for shape {}", rows.len(), shape));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != shape[i] {
                return bad(format!(
                    "row {} has {} entries, shape wants {}",
                    i + 1,
                    row.len(),
                    shape[i]
                ));
            }
            if row.windows(2).any(|w| w[0] < w[1]) {
                return bad(format!("row {} increases", i + 1));
            }
            if i > 0 && row.iter().zip(&rows[i - 1]).any(|(a, b)| a > b) {
                return bad(format!("column increases below row {}", i));
            }
        }
        let xm = *x0.coords().last().expect("nonempty config");
        for (i, row) in rows.iter().enumerate() {
            let lam = shape[i];
            if row[lam - 1] + xm < lam {
                return bad(format!(
                    "front wall: π_{{{},{}}} = {} < {}",
                    i + 1,
                    lam,
                    row[lam - 1],
                    lam - xm
                ));
            }
        }
        Ok(PlanePartition { x0, shape, rows })
    }

    pub fn x0(&self) -> &ParticleConfig {
        &self.x0
    }

    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `π_{i,j}` with 1-based indices.
    pub fn entry(&self, i: usize, j: usize) -> Option<usize> {
        self.rows.get(i.checked_sub(1)?)?.get(j.checked_sub(1)?).copied()
    }
}

/// `Σ π_{i,j}`.
pub fn volume(pp: &PlanePartition) -> usize {
    pp.rows.iter().flatten().sum()
}

pub fn to_plane_partition(traj: &Trajectory) -> Result<PlanePartition> {
    traj.validate()?;
    if !traj.terminal {
        return Err(Error::InvalidTrajectory("trajectory is not absorbed".into()));
    }
    let configs = traj.configs()?;
    let x0 = &traj.x0;
    let m = x0.m();
    let xm = x0.coords()[m - 1];
    let shape = x0.minus_delta();
    let rows = (0..shape.len())
        .map(|i| {
            (1..=shape[i])
                .map(|j| {
                    let level = j + m - 1 - i;
                    let tau = configs.iter().take_while(|c| c.coords()[i] >= level).count();
                    tau + j - xm - 1
                })
                .collect()
        })
        .collect();
    PlanePartition::new(x0.clone(), rows)
}

/// The unique terminal trajectory whose plane partition is `pp`.
pub fn from_plane_partition(pp: &PlanePartition, params: &QTParams) -> Result<Trajectory> {
    let x0 = pp.x0.clone();
    let m = x0.m();
    let xm = x0.coords()[m - 1];
    // τ_i(j) = π_{i,j} − j + x_m + 1; particle i jumps at step τ − 1 → τ.
    let jumps: Vec<Vec<usize>> = pp
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, &p)| p + xm + 1 - (j + 1))
                .collect()
        })
        .collect();
    let len = jumps.iter().flatten().copied().max().unwrap_or(0);
    let mut moves = vec![vec![false; m]; len];
    for (i, row) in jumps.iter().enumerate() {
        for &tau in row {
            if tau == 0 || moves[tau - 1][i] {
                return Err(Error::InvalidPlanePartition(format!(
                    "row {} does not describe unit steps",
                    i + 1
                )));
            }
            moves[tau - 1][i] = true;
        }
    }
    let traj = Trajectory {
        params: params.clone(),
        x0,
        moves,
        terminal: true,
    };
    traj.validate()
        .map_err(|e| Error::InvalidPlanePartition(format!("no trajectory: {}", e)))?;
    Ok(traj)
}

/// `ω(a,b) = (1−t^{a−b+1}q^{b−1})(1−t^{a−b}q^{b+1}) / ((1−t^{a−b+1}q^b)(1−t^{a−b}q^b))`.
pub fn omega_in<F: Field>(a: i64, b: i64, q: &F, t: &F) -> Result<F> {
    if q.is_zero() && b < 1 {
        return Err(Error::DivisionByZero);
    }
    let d = a - b;
    let num = (t.powi(d + 1) * &q.powi(b - 1)).one_minus() * &(t.powi(d) * &q.powi(b + 1)).one_minus();
    let den = (t.powi(d + 1) * &q.powi(b)).one_minus() * &(t.powi(d) * &q.powi(b)).one_minus();
    num.checked_div(&den)
}

pub fn omega(a: i64, b: i64, params: &QTParams) -> Result<Scalar> {
    crate::try_with_qt!(params, |q, t| omega_in(a, b, q, t))
}

/// Three consecutive states `x → y → z` and the variant `x → w → z` with
/// `w = y − e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoltzmannContext {
    pub x: ParticleConfig,
    pub y: ParticleConfig,
    pub z: ParticleConfig,
    pub w: ParticleConfig,
    /// 1-based index of the particle whose jump is advanced.
    pub k: usize,
}

impl BoltzmannContext {
    /// Builds `w` from `y` and checks that all four steps are one-step moves.
    pub fn new(
        x: ParticleConfig,
        y: ParticleConfig,
        z: ParticleConfig,
        k: usize,
    ) -> Result<BoltzmannContext> {
        let m = x.m();
        if k == 0 || k > m || y.m() != m || z.m() != m {
            return Err(Error::Domain(format!("no particle {} in {}", k, x)));
        }
        let mut ws = y.signed();
        ws[k - 1] -= 1;
        let w = ParticleConfig::from_signed(&ws)?;
        for (a, b) in [(&x, &y), (&y, &z), (&x, &w), (&w, &z)] {
            if move_mask(&a.signed(), &b.signed()).is_none() {
                return Err(Error::Domain(format!("{} → {} is not a one-step move", a, b)));
            }
        }
        Ok(BoltzmannContext { x, y, z, w, k })
    }
}

fn boltzmann_factor_in<F: Field>(ctx: &BoltzmannContext, q: &F, t: &F) -> Result<F> {
    let (x, y, z) = (ctx.x.signed(), ctx.y.signed(), ctx.z.signed());
    let k = ctx.k - 1;
    let m = x.len();
    let pick = |on_first: bool, a: i64, b: i64| -> Result<F> {
        if on_first {
            Ok(F::one())
        } else {
            omega_in(a, b, q, t)
        }
    };
    let mut num = t.clone();
    let mut den = F::one();
    for i in 0..k {
        let b = (k - i) as i64;
        num = num * &pick(z[i] == y[i] - 1, y[i] - y[k], b)?;
        den = den * &pick(y[i] == x[i] - 1, x[i] - x[k], b)?;
    }
    for j in k + 1..m {
        let b = (j - k) as i64;
        num = num * &pick(y[j] == x[j], x[k] - x[j], b)?;
        den = den * &pick(z[j] == y[j], y[k] - y[j] - 1, b)?;
    }
    num.checked_div(&den)
}

/// Closed-form Boltzmann factor of an elementary box move.
pub fn boltzmann_factor(ctx: &BoltzmannContext, params: &QTParams) -> Result<Scalar> {
    crate::try_with_qt!(params, |q, t| boltzmann_factor_in(ctx, q, t))
}

/// `Υ(x,y)Υ(y,z) / (Υ(x,w)Υ(w,z))`.
pub fn kernel_ratio(ctx: &BoltzmannContext, params: &QTParams) -> Result<Scalar> {
    let num = upsilon(&ctx.x, &ctx.y, params).try_mul(&upsilon(&ctx.y, &ctx.z, params))?;
    let den = upsilon(&ctx.x, &ctx.w, params).try_mul(&upsilon(&ctx.w, &ctx.z, params))?;
    if num.is_zero() || den.is_zero() {
        return Err(Error::Domain("a kernel value of the context vanishes".into()));
    }
    num.try_div(&den)
}

/// Whether the kernel ratio equals the closed-form factor (exactly in Exact
/// mode, to 1e−12 relative in Float mode).
pub fn gibbs_check(ctx: &BoltzmannContext, params: &QTParams) -> Result<bool> {
    let lhs = kernel_ratio(ctx, params)?;
    let rhs = boltzmann_factor(ctx, params)?;
    lhs.approx_eq(&rhs, 1e-12)
}

/// Every elementary move available along a trajectory: times where some
/// particle `k` stays and then jumps, and jumping one step earlier stays in
/// `𝕎_m`.
pub fn contexts_from_trajectory(traj: &Trajectory) -> Result<Vec<BoltzmannContext>> {
    let configs = traj.configs()?;
    let mut out = Vec::new();
    for win in configs.windows(3) {
        let (x, y, z) = (&win[0], &win[1], &win[2]);
        for k in 1..=x.m() {
            let (xk, yk, zk) = (x.coords()[k - 1], y.coords()[k - 1], z.coords()[k - 1]);
            if xk == yk && zk + 1 == yk {
                if let Ok(ctx) = BoltzmannContext::new(x.clone(), y.clone(), z.clone(), k) {
                    out.push(ctx);
                }
            }
        }
    }
    Ok(out)
}

/// `count` contexts drawn from simulated trajectories with `m ≤ max_m` and
/// `x_1 ≤ max_x`; deterministic in `seed`.
pub fn seeded_contexts(
    seed: RngSeed,
    count: usize,
    max_m: usize,
    max_x: usize,
) -> Result<Vec<BoltzmannContext>> {
    let sim_params = QTParams::float(0.3, 0.6)?;
    let mut out = Vec::with_capacity(count);
    let mut replicate = 0u64;
    while out.len() < count {
        let mut rng = seed.stream(replicate);
        let m = 1 + (replicate as usize) % max_m;
        replicate += 1;
        let mut levels: Vec<usize> = (0..=max_x).collect();
        for i in 0..m {
            let j = rng.random_range(i..levels.len());
            levels.swap(i, j);
        }
        let mut coords = levels[..m].to_vec();
        coords.sort_unstable_by(|a, b| b.cmp(a));
        let x0 = ParticleConfig::new(coords)?;
        let traj = simulate(&x0, &sim_params, &mut rng, 10_000)?;
        let found = contexts_from_trajectory(&traj)?;
        if let Some(i) = (!found.is_empty()).then(|| rng.random_range(0..found.len())) {
            out.push(found[i].clone());
        }
        if replicate > 1_000_000 {
            return Err(Error::Domain("no contexts found".into()));
        }
    }
    Ok(out)
}

/// `q^{vol}` weight ratio helper: `prob / q^{vol}` in the mode of `params`.
pub fn volume_normalized_prob(traj: &Trajectory, params: &QTParams) -> Result<Scalar> {
    let pp = to_plane_partition(traj)?;
    let p = crate::dynamics::trajectory_prob(traj, params)?;
    let qv = with_qt!(params, |q, _t| q.powi(volume(&pp) as i64));
    p.try_div(&qv)
}

/// Every trajectory from `x0` absorbed at `δ_m` in at most `max_len` steps,
/// in breadth-first mask order.
pub fn terminal_trajectories(x0: &ParticleConfig, max_len: usize, params: &QTParams) -> Vec<Trajectory> {
    let mut out = Vec::new();
    let mut frontier = vec![(x0.clone(), Vec::<Vec<bool>>::new())];
    if x0.is_delta() {
        return vec![Trajectory {
            params: params.clone(),
            x0: x0.clone(),
            moves: vec![],
            terminal: true,
        }];
    }
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (x, moves) in frontier {
            for y in successors(&x) {
                let mut ms = moves.clone();
                ms.push(move_mask(&x.signed(), &y.signed()).unwrap());
                if y.is_delta() {
                    out.push(Trajectory {
                        params: params.clone(),
                        x0: x0.clone(),
                        moves: ms,
                        terminal: true,
                    });
                } else {
                    next.push((y, ms));
                }
            }
        }
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Rational;

    fn cfg(v: &[usize]) -> ParticleConfig {
        ParticleConfig::new(v.to_vec()).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn exact() -> QTParams {
        QTParams::exact((1, 3), (1, 2)).unwrap()
    }

    /// All absorbed trajectories from `x0` with at most `max_len` steps.
    #[test]
    fn empty_partition_at_delta() {
        let d = ParticleConfig::delta(3);
        let traj = Trajectory {
            params: exact(),
            x0: d.clone(),
            moves: vec![],
            terminal: true,
        };
        let pp = to_plane_partition(&traj).unwrap();
        assert!(pp.is_empty());
        assert_eq!(volume(&pp), 0);
        assert_eq!(from_plane_partition(&pp, &exact()).unwrap(), traj);
    }

    #[test]
    fn four_particle_start_shape_and_wall() {
        let x0 = cfg(&[7, 6, 3, 1]);
        let params = QTParams::float(0.3, 0.5).unwrap();
        for rep in 0..50 {
            let traj = simulate(&x0, &params, &mut RngSeed(7).stream(rep), 10_000).unwrap();
            let pp = to_plane_partition(&traj).unwrap();
            assert_eq!(pp.shape(), &Partition::new(vec![4, 4, 2, 1]).unwrap());
            assert!(pp.entry(4, 1).is_some());
            assert!(pp.entry(3, 2).unwrap() >= 1);
            assert!(pp.entry(2, 4).unwrap() >= 3);
            assert!(pp.entry(1, 4).unwrap() >= 3);
            assert_eq!(from_plane_partition(&pp, &params).unwrap(), traj);
        }
    }

    #[test]
    fn volume_examples() {
        let pp = PlanePartition::new(cfg(&[3]), vec![vec![2, 1, 1]]).unwrap();
        assert_eq!(volume(&pp), 4);
        let single = PlanePartition::new(cfg(&[2, 0]), vec![vec![1]]).unwrap();
        assert_eq!(volume(&single), 1);
        assert!(PlanePartition::new(cfg(&[2, 0]), vec![vec![0]]).is_err());
        let zeros = PlanePartition::new(cfg(&[2, 1]), vec![vec![0], vec![0]]).unwrap();
        assert_eq!(volume(&zeros), 0);
    }

    #[test]
    fn invalid_partitions_are_rejected() {
        assert!(PlanePartition::new(cfg(&[3, 1]), vec![vec![1, 2], vec![1]]).is_err());
        assert!(PlanePartition::new(cfg(&[3, 1]), vec![vec![1, 1], vec![2]]).is_err());
        assert!(PlanePartition::new(cfg(&[3, 1]), vec![vec![1, 1]]).is_err());
        // front wall π_{1,2} ≥ 2 − 0 for x0 = (3, 0)
        assert!(PlanePartition::new(cfg(&[3, 0]), vec![vec![1, 1]]).is_err());
        assert!(PlanePartition::new(cfg(&[3, 0]), vec![vec![2, 2]]).is_ok());
    }

    fn all_plane_partitions(x0: &ParticleConfig, max_entry: usize) -> Vec<PlanePartition> {
        let shape = x0.minus_delta();
        let cells: Vec<(usize, usize)> = shape.cells().collect();
        let mut out = Vec::new();
        let mut vals = vec![0usize; cells.len()];
        loop {
            let mut rows: Vec<Vec<usize>> = (0..shape.len()).map(|i| vec![0; shape[i]]).collect();
            for (c, &(i, j)) in cells.iter().enumerate() {
                rows[i - 1][j - 1] = vals[c];
            }
            if let Ok(pp) = PlanePartition::new(x0.clone(), rows) {
                out.push(pp);
            }
            let mut c = 0;
            loop {
                if c == cells.len() {
                    return out;
                }
                vals[c] += 1;
                if vals[c] <= max_entry {
                    break;
                }
                vals[c] = 0;
                c += 1;
            }
        }
    }

    #[test]
    fn bijection_on_small_starts() {
        let params = exact();
        for x0 in [
            cfg(&[2, 0]),
            cfg(&[3, 1]),
            cfg(&[4, 2, 0]),
            cfg(&[3, 0]),
            cfg(&[4, 1, 0]),
            cfg(&[5]),
        ] {
            let max_len = 6;
            let trajs = terminal_trajectories(&x0, max_len, &params);
            assert!(!trajs.is_empty());
            for traj in &trajs {
                let pp = to_plane_partition(traj).unwrap();
                assert_eq!(pp.shape(), &x0.minus_delta());
                assert_eq!(&from_plane_partition(&pp, &params).unwrap(), traj);
            }
            // Trajectories of length ≤ L are exactly the partitions with max τ ≤ L.
            let xm = x0.coords()[x0.m() - 1];
            let bound = max_len + x0.minus_delta()[0];
            let pps: Vec<PlanePartition> = all_plane_partitions(&x0, bound)
                .into_iter()
                .filter(|pp| {
                    pp.rows().iter().all(|row| {
                        row.iter()
                            .enumerate()
                            .all(|(j, &p)| p + xm + 1 - (j + 1) <= max_len)
                    })
                })
                .collect();
            assert_eq!(pps.len(), trajs.len(), "{}", x0);
            for pp in pps {
                let traj = from_plane_partition(&pp, &params).unwrap();
                assert_eq!(to_plane_partition(&traj).unwrap(), pp);
            }
        }
    }

    #[test]
    fn schur_weights_follow_volume() {
        let params = QTParams::exact((2, 5), (2, 5)).unwrap();
        for x0 in [cfg(&[2, 0]), cfg(&[3, 1]), cfg(&[4, 2, 0])] {
            let trajs = terminal_trajectories(&x0, 6, &params);
            let base = volume_normalized_prob(&trajs[0], &params).unwrap();
            for traj in &trajs[1..] {
                assert_eq!(
                    volume_normalized_prob(traj, &params).unwrap(),
                    base,
                    "{:?}",
                    traj.moves
                );
            }
        }
    }

    #[test]
    fn omega_examples() {
        let (q, t) = (r(1, 3), r(1, 2));
        for a in 1..6 {
            for b in 1..4 {
                assert!(omega_in(a, b, &q, &q).unwrap().is_one());
            }
        }
        let expected = (r(1, 1) - &t) * (r(1, 1) + &q) / (r(1, 1) - q.clone() * &t);
        assert_eq!(omega_in(1, 1, &q, &t).unwrap(), expected);
        // q = 0, b = 1: (1 − t^a)(1)/(1·1)
        assert_eq!(omega_in(3, 1, &r(0, 1), &t).unwrap(), r(1, 1) - t.powi(3));
        assert!(omega_in(3, 0, &r(0, 1), &t).is_err());
    }

    #[test]
    fn boltzmann_single_particle_and_schur() {
        let ctx = BoltzmannContext::new(cfg(&[4]), cfg(&[4]), cfg(&[3]), 1).unwrap();
        assert_eq!(boltzmann_factor(&ctx, &exact()).unwrap(), Scalar::ratio(1, 2));
        assert!(gibbs_check(&ctx, &exact()).unwrap());
        let schur = QTParams::exact((2, 5), (2, 5)).unwrap();
        for m in 1..=3 {
            for x in ParticleConfig::all_up_to(m, 6) {
                for y in successors(&x) {
                    for z in successors(&y) {
                        for k in 1..=m {
                            if x.coords()[k - 1] != y.coords()[k - 1]
                                || z.coords()[k - 1] + 1 != y.coords()[k - 1]
                            {
                                continue;
                            }
                            if let Ok(ctx) = BoltzmannContext::new(x.clone(), y.clone(), z.clone(), k) {
                                assert_eq!(boltzmann_factor(&ctx, &schur).unwrap(), Scalar::ratio(2, 5));
                                assert!(gibbs_check(&ctx, &schur).unwrap());
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn boltzmann_matches_kernel_ratio() {
        let ctxs = seeded_contexts(RngSeed(2024), 60, 4, 8).unwrap();
        assert_eq!(ctxs.len(), 60);
        for ctx in &ctxs {
            assert_eq!(
                kernel_ratio(ctx, &exact()).unwrap(),
                boltzmann_factor(ctx, &exact()).unwrap(),
                "{:?}",
                ctx
            );
        }
        assert_eq!(ctxs, seeded_contexts(RngSeed(2024), 60, 4, 8).unwrap());
    }

    #[test]
    fn plane_partition_json() {
        let pp = PlanePartition::new(cfg(&[3, 1]), vec![vec![2, 1], vec![1]]).unwrap();
        let text = serde_json::to_string(&pp).unwrap();
        assert_eq!(text, r#"{"x0":[3,1],"shape":[2,1],"rows":[[2,1],[1]]}"#);
        assert_eq!(serde_json::from_str::<PlanePartition>(&text).unwrap(), pp);
        assert!(
            serde_json::from_str::<PlanePartition>(r#"{"x0":[3,1],"shape":[2,1],"rows":[[1,2],[1]]}"#)
                .is_err()
        );
        assert!(
            serde_json::from_str::<PlanePartition>(r#"{"x0":[3,1],"shape":[2],"rows":[[2,1],[1]]}"#).is_err()
        );
    }
}
