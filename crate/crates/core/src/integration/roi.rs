//! Resolution-of-identity Gram matrices `G = sum_nodes w |z><z|`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mc::{chunk_points, MC_CHUNK, MC_RNG_NAME};
use super::quadrature::QuadratureGrid;
use crate::error::{Error, Result};
use crate::fock::{enumerate_sector, OccupationState, SectorBasis, SectorSpec};
use crate::states::{
    charge_amplitude, fixed_n_amplitude, overlap_su2_kernel, overlap_su3_kernel, Ket, SpherePoint,
};
use crate::C64;

/// A coherent-state family placed under the resolution integral.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilySpec {
    Su2Fixed { n: u32 },
    Su2Charge { q: i64, r_max: u32 },
    Su3Fixed { n: u32 },
    Su3Charge { q: i64, l: i64, p_max: u32 },
    SunFixed { modes: usize, n: u32 },
    SunCharge { charges: Vec<i64>, cutoff: u32 },
}

impl FamilySpec {
    pub fn modes(&self) -> usize {
        match self {
            Self::Su2Fixed { .. } | Self::Su2Charge { .. } => 2,
            Self::Su3Fixed { .. } | Self::Su3Charge { .. } => 3,
            Self::SunFixed { modes, .. } => *modes,
            Self::SunCharge { charges, .. } => charges.len() + 1,
        }
    }

    pub fn is_charge(&self) -> bool {
        matches!(self, Self::Su2Charge { .. } | Self::Su3Charge { .. } | Self::SunCharge { .. })
    }

    pub fn sector_spec(&self) -> SectorSpec {
        match self {
            Self::Su2Fixed { n } => SectorSpec::fixed_total(2, *n),
            Self::Su3Fixed { n } => SectorSpec::fixed_total(3, *n),
            Self::SunFixed { modes, n } => SectorSpec::fixed_total(*modes, *n),
            Self::Su2Charge { q, r_max } => SectorSpec::su2_charge(*q, *r_max),
            Self::Su3Charge { q, l, p_max } => SectorSpec::su3_charge_hyper(*q, *l, *p_max),
            Self::SunCharge { charges, cutoff } => SectorSpec::sun_charges(charges.clone(), *cutoff),
        }
    }

    pub fn basis(&self) -> Result<Arc<SectorBasis>> {
        if let Self::SunFixed { modes, .. } = self {
            if *modes < 2 {
                return Err(Error::InvalidSpec("SU(N) family needs N >= 2".into()));
            }
        }
        Ok(Arc::new(enumerate_sector(&self.sector_spec())?))
    }

    /// Amplitude of this family's state at `z` on one basis state.
    pub fn amplitude(&self, z: &[C64], occ: &OccupationState) -> C64 {
        if self.is_charge() {
            charge_amplitude(z, occ)
        } else {
            fixed_n_amplitude(z, occ)
        }
    }

    pub fn amplitudes(&self, basis: &SectorBasis, z: &[C64]) -> Vec<C64> {
        basis.states().iter().map(|s| self.amplitude(z, s)).collect()
    }

    pub fn ket(&self, z: &SpherePoint) -> Result<Ket> {
        if z.dim() != self.modes() {
            return Err(Error::ModeMismatch { expected: self.modes(), found: z.dim() });
        }
        let basis = self.basis()?;
        let amps = self.amplitudes(&basis, z.coords());
        Ket::new(basis, amps)
    }

    /// Closed-form Gram constant: `pi^N` for charge families,
    /// `pi^N n! / (n + N - 1)!` at fixed `n`.
    pub fn roi_constant(&self) -> f64 {
        let n_modes = self.modes() as i32;
        let pi_n = PI.powi(n_modes);
        match self {
            Self::Su2Fixed { n } | Self::Su3Fixed { n } | Self::SunFixed { n, .. } => {
                let ratio: f64 = (1..n_modes).map(|k| 1.0 / (f64::from(*n) + f64::from(k))).product();
                pi_n * ratio
            }
            _ => pi_n,
        }
    }

    /// Gram constant from the exact Beta-moment oracle, as `rational * pi^N`.
    ///
    /// Each diagonal entry is `coefficient^2 * (2 pi)^N * beta_moment(occ)`;
    /// fails if the entries disagree.
    pub fn roi_constant_exact(&self) -> Result<(BigRational, u32)> {
        let basis = self.basis()?;
        let n_modes = self.modes();
        let two_n = BigRational::from_integer(BigInt::from(2).pow(n_modes as u32));
        let mut value: Option<BigRational> = None;
        for s in basis.states() {
            let exps = s.counts();
            let top = if self.is_charge() { s.total() + n_modes as u64 - 1 } else { s.total() };
            let mut coef2 = BigRational::from_integer(factorial(top));
            for &e in exps {
                coef2 /= BigRational::from_integer(factorial(u64::from(e)));
            }
            let entry = coef2 * beta_moment(exps) * two_n.clone();
            match &value {
                None => value = Some(entry),
                Some(v) if *v == entry => {}
                Some(v) => {
                    return Err(Error::InvalidSpec(format!(
                        "diagonal entries differ ({v} vs {entry}): not a multiple of the identity"
                    )))
                }
            }
        }
        Ok((value.unwrap_or_else(BigRational::one), n_modes as u32))
    }

    /// Radial degree and phase frequency the Gram matrix needs.
    pub fn required_exactness(&self) -> Result<(usize, usize)> {
        Ok(basis_requirements(&*self.basis()?))
    }
}

/// `(max total occupation, max |n_i - n'_i|)` over a basis.
pub fn basis_requirements(basis: &SectorBasis) -> (usize, usize) {
    let degree = basis.max_total() as usize;
    let modes = basis.modes();
    let mut freq = 0u32;
    for i in 0..modes {
        let (lo, hi) = basis
            .states()
            .iter()
            .fold((u32::MAX, 0u32), |(lo, hi), s| (lo.min(s.count(i)), hi.max(s.count(i))));
        if hi >= lo {
            freq = freq.max(hi - lo);
        }
    }
    (degree, freq as usize)
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `int prod r_i dr_i delta(sum r_i^2 - 1) prod (r_i^2)^{a_i}
///  = prod a_i! / (2^N (sum a_i + N - 1)!)`, exactly.
pub fn beta_moment(exponents: &[u32]) -> BigRational {
    let n = exponents.len() as u32;
    let total: u64 = exponents.iter().map(|&a| u64::from(a)).sum();
    let num = exponents.iter().fold(BigInt::one(), |acc, &a| acc * factorial(u64::from(a)));
    let den = BigInt::from(2).pow(n) * factorial(total + u64::from(n) - 1);
    BigRational::new(num, den)
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Pairwise reduction over a fixed partition; order does not depend on threads.
pub(crate) fn tree_reduce<T>(mut parts: Vec<T>, add: impl Fn(T, T) -> T) -> Option<T> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(add(a, b)),
                None => next.push(a),
            }
        }
        parts = next;
    }
    parts.pop()
}

fn check_grid(family_modes: usize, grid: &QuadratureGrid, degree: usize, freq: usize) -> Result<()> {
    if grid.sphere_dim() != family_modes {
        return Err(Error::ModeMismatch { expected: family_modes, found: grid.sphere_dim() });
    }
    if !grid.covers(degree, freq) {
        let ex = grid.exactness();
        return Err(Error::ExactnessInsufficient {
            need_degree: degree,
            need_frequency: freq,
            have_degree: ex.max_radial_degree,
            have_frequency: ex.max_phase_frequency,
        });
    }
    Ok(())
}

fn add_matrices(a: DMatrix<C64>, b: DMatrix<C64>) -> DMatrix<C64> {
    a + b
}

/// Gram matrix over a product grid.
///
/// Every entry's integrand is a radial function times one phase factor per mode,
/// so the product-node sum equals (radial node sum) times the product of the
/// per-circle phase sums; both are accumulated node by node.
pub fn roi_matrix(family: &FamilySpec, grid: &QuadratureGrid) -> Result<DMatrix<C64>> {
    let basis = family.basis()?;
    let (degree, freq) = basis_requirements(&basis);
    check_grid(family.modes(), grid, degree, freq)?;
    let dim = basis.dim();

    // Radial part: amplitudes at the real point (sqrt u_1, ..., sqrt u_N).
    let radial = grid.radial_nodes();
    let partials: Vec<DMatrix<C64>> = radial
        .par_chunks(256)
        .map(|chunk| {
            let mut acc = DMatrix::<C64>::zeros(dim, dim);
            for node in chunk {
                let z: Vec<C64> = node.u.iter().map(|u| C64::new(u.sqrt(), 0.0)).collect();
                let rho = family.amplitudes(&basis, &z);
                for k in 0..dim {
                    for l in 0..dim {
                        acc[(k, l)] += rho[k] * rho[l].conj() * node.weight;
                    }
                }
            }
            acc
        })
        .collect();
    let radial_part = tree_reduce(partials, add_matrices).unwrap_or_else(|| DMatrix::zeros(dim, dim));

    // Phase part: per-circle sums of e^{i (n_k - n_l) theta_t}.
    let phases = grid.phases();
    let pw = grid.phase_weight();
    let max_shift = basis.max_total() as i64;
    let circle: Vec<C64> = (-max_shift..=max_shift)
        .map(|d| phases.iter().map(|t| C64::from_polar(pw, d as f64 * t)).sum())
        .collect();
    let circle_sum = |d: i64| circle[(d + max_shift) as usize];

    let states = basis.states();
    Ok(DMatrix::from_fn(dim, dim, |k, l| {
        let phase: C64 = (0..basis.modes())
            .map(|i| circle_sum(i64::from(states[k].count(i)) - i64::from(states[l].count(i))))
            .product();
        radial_part[(k, l)] * phase
    }))
}

/// Gram matrix by direct summation over explicit weighted nodes, in fixed
/// chunks with a tree reduction.
pub fn roi_matrix_nodewise(family: &FamilySpec, grid: &QuadratureGrid) -> Result<DMatrix<C64>> {
    let basis = family.basis()?;
    let (degree, freq) = basis_requirements(&basis);
    check_grid(family.modes(), grid, degree, freq)?;
    let dim = basis.dim();
    let chunk = 4096;
    let chunks = grid.len().div_ceil(chunk);
    let partials: Vec<DMatrix<C64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = DMatrix::<C64>::zeros(dim, dim);
            for i in c * chunk..((c + 1) * chunk).min(grid.len()) {
                let (z, w) = grid.node(i);
                accumulate(&mut acc, &family.amplitudes(&basis, z.coords()), w);
            }
            acc
        })
        .collect();
    Ok(tree_reduce(partials, add_matrices).unwrap_or_else(|| DMatrix::zeros(dim, dim)))
}

fn accumulate(acc: &mut DMatrix<C64>, amps: &[C64], w: f64) {
    let dim = amps.len();
    for k in 0..dim {
        let a = amps[k] * w;
        for l in 0..dim {
            acc[(k, l)] += a * amps[l].conj();
        }
    }
}

/// Max-abs entry of `G - c I`.
pub fn roi_residual(g: &DMatrix<C64>, c: f64) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..g.nrows() {
        for l in 0..g.ncols() {
            let target = if k == l { c } else { 0.0 };
            worst = worst.max((g[(k, l)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Monte Carlo estimate of the Gram matrix under the uniform sphere law,
/// scaled by the sphere measure `pi^N / (N-1)!`.
#[derive(Debug, Clone)]
pub struct McRoiEstimate {
    pub gram: DMatrix<C64>,
    /// Standard error of each diagonal entry.
    pub diag_stderr: Vec<f64>,
    /// `tr(G) / dim`, the estimated Gram constant.
    pub constant: f64,
    pub constant_stderr: f64,
    pub count: usize,
    pub seed: u64,
    pub rng: &'static str,
}

pub fn sphere_measure(n: usize) -> f64 {
    PI.powi(n as i32) / (1..n).map(|k| k as f64).product::<f64>()
}

pub fn mc_roi(family: &FamilySpec, count: usize, seed: u64) -> Result<McRoiEstimate> {
    if count == 0 {
        return Err(Error::InvalidOrder("Monte Carlo needs at least one sample".into()));
    }
    let basis = family.basis()?;
    let n = family.modes();
    let dim = basis.dim();
    let chunks = count.div_ceil(MC_CHUNK);
    // Per chunk: Gram sum, squared diagonal terms, squared trace terms.
    let partials: Vec<(DMatrix<C64>, Vec<f64>, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = MC_CHUNK.min(count - c * MC_CHUNK);
            let mut acc = DMatrix::<C64>::zeros(dim, dim);
            let mut sq = vec![0.0; dim];
            let mut tr_sq = 0.0;
            for z in chunk_points(n, seed, c, len) {
                let amps = family.amplitudes(&basis, z.coords());
                accumulate(&mut acc, &amps, 1.0);
                let mut tr = 0.0;
                for (s, a) in sq.iter_mut().zip(&amps) {
                    *s += a.norm_sqr().powi(2);
                    tr += a.norm_sqr();
                }
                tr_sq += tr * tr;
            }
            (acc, sq, tr_sq)
        })
        .collect();
    let (sum, sumsq, trsq) = tree_reduce(partials, |(a, sa, ta), (b, sb, tb)| {
        (a + b, sa.iter().zip(&sb).map(|(x, y)| x + y).collect(), ta + tb)
    })
    .expect("at least one chunk");
    let vol = sphere_measure(n);
    let cf = count as f64;
    let mean = sum / C64::new(cf, 0.0);
    let stderr = |second: f64, m: f64| {
        let var = (second / cf - m * m).max(0.0) * cf / (cf - 1.0).max(1.0);
        vol * (var / cf).sqrt()
    };
    let diag_stderr = (0..dim).map(|k| stderr(sumsq[k], mean[(k, k)].re)).collect();
    let tr_mean = mean.trace().re;
    let d = dim as f64;
    Ok(McRoiEstimate {
        constant: vol * tr_mean / d,
        constant_stderr: stderr(trsq, tr_mean) / d,
        gram: mean * C64::new(vol, 0.0),
        diag_stderr,
        count,
        seed,
        rng: MC_RNG_NAME,
    })
}

/// `(1/c_n) int dmu(w) <w|z>_q |w>_n` on `FixedTotal(2, n)`: the projection of
/// the SU(2) charge state onto spin `n/2`, rebuilt from the overlap kernel.
pub fn project_su2_charge_onto_fixed_n(
    z: &SpherePoint,
    q: i64,
    n: u32,
    grid: &QuadratureGrid,
) -> Result<Ket> {
    let family = FamilySpec::Su2Fixed { n };
    integrate_kernel(&family, grid, |w| overlap_su2_kernel(w, z, n, q))
}

/// SU(3) analog of [`project_su2_charge_onto_fixed_n`].
pub fn project_su3_charge_onto_fixed_n(
    z: &SpherePoint,
    q: i64,
    l: i64,
    n: u32,
    grid: &QuadratureGrid,
) -> Result<Ket> {
    let family = FamilySpec::Su3Fixed { n };
    integrate_kernel(&family, grid, |w| overlap_su3_kernel(w, z, n, q, l))
}

fn integrate_kernel(
    family: &FamilySpec,
    grid: &QuadratureGrid,
    kernel: impl Fn(&SpherePoint) -> Result<C64> + Sync,
) -> Result<Ket> {
    let basis = family.basis()?;
    let n = basis.max_total() as usize;
    check_grid(family.modes(), grid, n, n)?;
    let dim = basis.dim();
    let chunk = 4096;
    let chunks = grid.len().div_ceil(chunk);
    let partials = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<Vec<C64>> {
            let mut acc = vec![C64::default(); dim];
            for i in c * chunk..((c + 1) * chunk).min(grid.len()) {
                let (w, weight) = grid.node(i);
                let k = kernel(&w)? * weight;
                if k == C64::default() {
                    continue;
                }
                for (a, amp) in acc.iter_mut().zip(family.amplitudes(&basis, w.coords())) {
                    *a += k * amp;
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let sum = tree_reduce(partials, |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect())
        .unwrap_or_else(|| vec![C64::default(); dim]);
    let inv = 1.0 / family.roi_constant();
    Ket::new(basis, sum.into_iter().map(|a| a * inv).collect())
}

/// Rebuilds the first `terms` rungs of `|z>_q` from fixed-spin states via the
/// overlap kernel. Only `n` with `n - q` even contribute; the result lives on
/// `SU2Charge(q, terms - 1)` (zero ket on `SU2Charge(q, 0)` when `terms == 0`).
pub fn reconstruct_charge_from_fixed_n(
    z: &SpherePoint,
    q: i64,
    terms: u32,
    grid: &QuadratureGrid,
) -> Result<Ket> {
    let target = Arc::new(enumerate_sector(&SectorSpec::su2_charge(q, terms.saturating_sub(1)))?);
    reconstruct(target, terms, |n| project_su2_charge_onto_fixed_n(z, q, n, grid))
}

/// SU(3) version on `SU3ChargeHyper(q, l, terms - 1)`.
pub fn reconstruct_su3_charge_from_fixed_n(
    z: &SpherePoint,
    q: i64,
    l: i64,
    terms: u32,
    grid: &QuadratureGrid,
) -> Result<Ket> {
    let target =
        Arc::new(enumerate_sector(&SectorSpec::su3_charge_hyper(q, l, terms.saturating_sub(1)))?);
    reconstruct(target, terms, |n| project_su3_charge_onto_fixed_n(z, q, l, n, grid))
}

fn reconstruct(
    target: Arc<SectorBasis>,
    terms: u32,
    project: impl Fn(u32) -> Result<Ket>,
) -> Result<Ket> {
    let mut amps = vec![C64::default(); target.dim()];
    if terms > 0 {
        for (slot, state) in amps.iter_mut().zip(target.states()) {
            let total = u32::try_from(state.total())
                .map_err(|_| Error::InvalidSpec("occupation too large".into()))?;
            *slot = project(total)?.amplitude_of(state);
        }
    }
    Ket::new(target, amps)
}
