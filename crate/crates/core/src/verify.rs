//! Named numerical checks of the algebraic and analytic identities.
//!
//! Every check returns a [`CheckReport`] with a max-norm residual. Identities
//! exact in exact arithmetic use `1e-12`; those that go through quadrature or
//! large factorial ratios use `1e-10` or `1e-8`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{enumerate_sector, Constraint, SectorBasis, SectorSpec};
use crate::integration::{
    mc_roi, mc_sphere, rational_to_f64, reconstruct_charge_from_fixed_n,
    reconstruct_su3_charge_from_fixed_n, roi_matrix, roi_residual, FamilySpec, QuadratureGrid,
};
use crate::operators::{
    apply, commutator, eriksson_generators, number_total, su2_generators, su3_generators,
    su3_hypercharge, sun_cartan_charges, GeneratorSet, SparseOperator,
};
use crate::states::{
    euler_to_sphere, group_action_su2, group_action_su2_expm, overlap, overlap_su2_kernel,
    overlap_su3_kernel, pair_cs_bhaumik, su2_charge_cs, su2_fixed_spin, su3_charge_cs, su3_fixed_n,
    sun_charge_cs, sun_fixed_n, EulerAngles, Ket, PlanePoint, SpherePoint,
};
use crate::C64;

pub const EXACT_TOL: f64 = 1e-12;
pub const QUADRATURE_TOL: f64 = 1e-10;
pub const CHARGE_ROI_TOL: f64 = 1e-8;

/// Outcome of one check. `passed` is `residual <= tolerance` (false for NaN).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub parameters: BTreeMap<String, String>,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Wall-clock time; `None` when a report must be reproducible byte for byte.
    pub runtime_ms: Option<f64>,
}

impl CheckReport {
    fn finish(name: &str, params: Params, residual: f64, tolerance: f64, start: Instant) -> Self {
        Self {
            check_name: name.to_string(),
            parameters: params.0,
            residual,
            tolerance,
            passed: residual <= tolerance,
            runtime_ms: Some(start.elapsed().as_secs_f64() * 1e3),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn without_timing(mut self) -> Self {
        self.runtime_ms = None;
        self
    }

    /// `key=value` pairs joined by `;`.
    pub fn params_string(&self) -> String {
        self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }
}

#[derive(Default)]
struct Params(BTreeMap<String, String>);

impl Params {
    fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.0.insert(key.to_string(), value.to_string());
        self
    }
}

fn fmt_c(z: &[C64]) -> String {
    z.iter().map(|c| format!("{}{:+}i", c.re, c.im)).collect::<Vec<_>>().join(",")
}

/// Largest amplitude difference between kets on bases with the same states.
fn max_amp_diff(a: &Ket, b: &Ket) -> Result<f64> {
    if a.basis().states() != b.basis().states() {
        return Err(Error::SectorMismatch(format!(
            "{} vs {}",
            a.basis().spec(),
            b.basis().spec()
        )));
    }
    Ok(a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

fn max_abs_amp(k: &Ket) -> f64 {
    k.amplitudes().iter().map(|a| a.norm()).fold(0.0, f64::max)
}

/// `max_{a,b} || [T^a, T^b] - i f^{abc} T^c ||_max`.
pub fn check_lie_algebra(gens: &GeneratorSet) -> Result<CheckReport> {
    let start = Instant::now();
    let g = &gens.generators;
    let Some(basis) = gens.basis() else {
        return Err(Error::SectorMismatch("empty generator set".into()));
    };
    if let Some(bad) = g.iter().find(|t| t.domain() != basis || t.codomain() != basis) {
        return Err(Error::SectorMismatch(format!(
            "generator on {} in a set on {}",
            bad.domain().spec(),
            basis.spec()
        )));
    }
    let f = &gens.structure_constants;
    let mut residual = 0.0f64;
    for a in 0..g.len() {
        for b in a + 1..g.len() {
            let mut rhs = SparseOperator::zero(basis.clone(), basis.clone());
            for (c, tc) in g.iter().enumerate() {
                let fabc = f.get(a, b, c);
                if fabc != 0.0 {
                    rhs = rhs.add(&tc.scale(C64::new(0.0, fabc)))?;
                }
            }
            residual = residual.max(commutator(&g[a], &g[b])?.sub(&rhs)?.max_abs());
        }
    }
    let params = Params::default()
        .with("group", format!("{:?}", gens.group))
        .with("generators", g.len())
        .with("sector", basis.spec());
    Ok(CheckReport::finish("lie_algebra", params, residual, EXACT_TOL, start))
}

/// `J.J = C (C + 2) / 4` on a two-mode fixed-total sector.
pub fn check_casimir(basis: Arc<SectorBasis>) -> Result<CheckReport> {
    let start = Instant::now();
    if basis.modes() != 2 {
        return Err(Error::ModeMismatch { expected: 2, found: basis.modes() });
    }
    if !matches!(basis.spec().constraint, Constraint::FixedTotal { .. }) {
        return Err(Error::SectorMismatch(format!(
            "{} is not number-preserving under the generators",
            basis.spec()
        )));
    }
    let jj = su2_generators(basis.clone())?.quadratic_casimir()?;
    let rhs = SparseOperator::diagonal(basis.clone(), |s| {
        let c = s.total() as f64;
        C64::new(0.25 * c * (c + 2.0), 0.0)
    });
    let residual = jj.sub(&rhs)?.max_abs();
    let params = Params::default().with("sector", basis.spec());
    Ok(CheckReport::finish("casimir", params, residual, EXACT_TOL, start))
}

/// `|| A x - lambda x || / max(1, ||x||)`.
pub fn check_eigen(op: &SparseOperator, ket: &Ket, lambda: C64) -> Result<CheckReport> {
    let start = Instant::now();
    if !op.is_endomorphism() || op.domain() != ket.basis() {
        return Err(Error::SectorMismatch(format!(
            "operator on {} applied to a ket on {}",
            op.domain().spec(),
            ket.basis().spec()
        )));
    }
    let diff = apply(op, ket)?.sub(&ket.scale(lambda))?;
    let residual = diff.norm2().sqrt() / ket.norm2().sqrt().max(1.0);
    let tol = if op.is_diagonal() { EXACT_TOL } else { QUADRATURE_TOL };
    let params = Params::default()
        .with("sector", ket.basis().spec())
        .with("lambda", fmt_c(&[lambda]));
    Ok(CheckReport::finish("eigen", params, residual, tol, start))
}

/// Interior and top-rung residuals of `f(C) a1 a2 |z>_q = z1 z2 |z>_q`,
/// each as a max-norm relative to `max(1, max |amplitude|)`.
pub fn nonlinear_relation_residuals(z: &SpherePoint, q: i64, r_max: u32) -> Result<(f64, f64)> {
    let ket = su2_charge_cs(z, q, r_max)?;
    let basis = ket.basis().clone();
    let a1a2 = SparseOperator::monomial(basis.clone(), basis.clone(), &[], &[0, 1], C64::new(1.0, 0.0))?;
    let f = SparseOperator::diagonal(basis.clone(), |s| {
        let c = s.total() as f64;
        C64::new(1.0 / ((c + 3.0) * (c + 2.0)).sqrt(), 0.0)
    });
    let lhs = apply(&f.mul(&a1a2)?, &ket)?;
    let zz = z.coords()[0] * z.coords()[1];
    let diff = lhs.sub(&ket.scale(zz))?;
    let scale = max_abs_amp(&ket).max(1.0);
    let top = basis.max_total();
    let (mut interior, mut boundary) = (0.0f64, 0.0f64);
    for (s, d) in basis.states().iter().zip(diff.amplitudes()) {
        if s.total() + 2 <= top {
            interior = interior.max(d.norm());
        } else {
            boundary = boundary.max(d.norm());
        }
    }
    Ok((interior / scale, boundary / scale))
}

/// `f(C) a1 a2 |z>_q = z1 z2 |z>_q` with `f(C) = 1/sqrt((C+3)(C+2))`, on
/// every rung but the last.
pub fn check_nonlinear_relation(z: &SpherePoint, q: i64, r_max: u32) -> Result<CheckReport> {
    let start = Instant::now();
    if r_max < 2 {
        return Err(Error::InvalidSpec(format!("need r_max >= 2, got {r_max}")));
    }
    let (interior, _) = nonlinear_relation_residuals(z, q, r_max)?;
    let params = Params::default()
        .with("z", fmt_c(z.coords()))
        .with("q", q)
        .with("r_max", r_max);
    Ok(CheckReport::finish("nonlinear_relation", params, interior, EXACT_TOL, start))
}

/// 3 x 3 x 3 grid of Euler angles spanning the full ranges.
pub fn euler_grid_27() -> Vec<EulerAngles> {
    let thetas = [0.0, 0.5 * PI, 2.7];
    let phis = [0.0, 1.3, 4.9];
    let psis = [0.0, 2.2, 5.6];
    let mut out = Vec::with_capacity(27);
    for &theta in &thetas {
        for &phi in &phis {
            for &psi in &psis {
                out.push(EulerAngles { theta, phi, psi });
            }
        }
    }
    out
}

/// Exponential-chain rotation versus the fixed-spin state at `euler_to_sphere`
/// and versus the closed-form rotation coefficients.
pub fn check_group_action(two_j: u32, grid: &[EulerAngles]) -> Result<CheckReport> {
    let start = Instant::now();
    let mut residual = 0.0f64;
    for a in grid {
        let chain = group_action_su2_expm(a, two_j)?;
        let oscillator = su2_fixed_spin(&euler_to_sphere(a), two_j)?;
        let closed = group_action_su2(a, two_j)?;
        residual = residual
            .max(max_amp_diff(&chain, &oscillator)?)
            .max(max_amp_diff(&closed, &oscillator)?);
    }
    let params = Params::default()
        .with("j", f64::from(two_j) / 2.0)
        .with("angles", grid.len());
    Ok(CheckReport::finish("group_action", params, residual, QUADRATURE_TOL, start))
}

fn family_label(f: &FamilySpec) -> String {
    serde_json::to_string(f).unwrap_or_default()
}

/// Gram matrix on the smallest certified grid against `expected * I`.
pub fn check_roi(family: &FamilySpec, expected_constant: f64) -> Result<CheckReport> {
    let start = Instant::now();
    let (degree, freq) = family.required_exactness()?;
    let grid = QuadratureGrid::minimal(family.modes(), degree, freq)?;
    let g = roi_matrix(family, &grid)?;
    let residual = roi_residual(&g, expected_constant);
    let tol = if family.is_charge() { CHARGE_ROI_TOL } else { QUADRATURE_TOL };
    let params = Params::default()
        .with("family", family_label(family))
        .with("constant", expected_constant)
        .with("dim", g.nrows())
        .with("radial_order", grid.radial_order())
        .with("phase_points", grid.phase_points());
    Ok(CheckReport::finish("roi", params, residual, tol, start))
}

/// Closed-form Gram constant against the exact Beta-moment value, relative.
pub fn check_roi_constant(family: &FamilySpec) -> Result<CheckReport> {
    let start = Instant::now();
    let (r, p) = family.roi_constant_exact()?;
    let exact = rational_to_f64(&r) * PI.powi(p as i32);
    let closed = family.roi_constant();
    let residual = (exact - closed).abs() / closed;
    let params = Params::default()
        .with("family", family_label(family))
        .with("exact", format!("{r} pi^{p}"));
    Ok(CheckReport::finish("roi_constant", params, residual, EXACT_TOL, start))
}

/// Monte Carlo estimate of the Gram constant `tr(G) / dim`: deviation from
/// `expected` in units of its standard error. Passes within `sigmas`.
pub fn check_mc_roi(family: &FamilySpec, expected: f64, count: usize, seed: u64, sigmas: f64) -> Result<CheckReport> {
    let start = Instant::now();
    let est = mc_roi(family, count, seed)?;
    let residual = (est.constant - expected).abs() / est.constant_stderr;
    let worst_entry = (0..est.gram.nrows())
        .map(|k| (est.gram[(k, k)].re - expected).abs() / est.diag_stderr[k])
        .fold(0.0, f64::max);
    let params = Params::default()
        .with("family", family_label(family))
        .with("estimate", est.constant)
        .with("stderr", est.constant_stderr)
        .with("worst_diagonal_sigma", worst_entry)
        .with("count", count)
        .with("seed", seed)
        .with("rng", est.rng);
    Ok(CheckReport::finish("mc_roi_sigma", params, residual, sigmas, start))
}

/// Monte Carlo error scaling: mean over seeds of `err(4c) / err(c)` for the
/// `SU2Fixed(2)` Gram matrix, with `err` the max-abs deviation from the grid
/// value. Expected near `0.5`; passes at `<= 0.7`.
pub fn check_mc_convergence(count: usize, seeds: u64, seed: u64) -> Result<CheckReport> {
    let start = Instant::now();
    let family = FamilySpec::Su2Fixed { n: 2 };
    let (d, f) = family.required_exactness()?;
    let exact = roi_matrix(&family, &QuadratureGrid::minimal(2, d, f)?)?;
    let err = |n: usize, s: u64| -> Result<f64> {
        Ok((mc_roi(&family, n, s)?.gram - &exact).camax())
    };
    let mut ratio_sum = 0.0;
    for k in 0..seeds {
        let s = seed.wrapping_add(2 * k);
        ratio_sum += err(4 * count, s.wrapping_add(1))? / err(count, s)?;
    }
    let residual = ratio_sum / seeds.max(1) as f64;
    let params = Params::default().with("count", count).with("seeds", seeds).with("seed", seed);
    Ok(CheckReport::finish("mc_convergence", params, residual, 0.7, start))
}

/// Kernels against numerical inner products of the constructed states, for
/// random points and admissible labels. Off the selection rule both sides must
/// vanish exactly; any nonzero value there makes the residual infinite.
pub fn check_overlap_kernels(trials: usize, seed: u64) -> Result<CheckReport> {
    let start = Instant::now();
    if trials == 0 {
        return Err(Error::InvalidSpec("need at least one trial".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p2: Vec<SpherePoint> = mc_sphere(2, 2 * trials, seed).collect();
    let p3: Vec<SpherePoint> = mc_sphere(3, 2 * trials, seed.wrapping_add(1)).collect();
    let mut residual = 0.0f64;
    let mut off_rule = 0.0f64;
    for t in 0..trials {
        let (w, z) = (&p2[2 * t], &p2[2 * t + 1]);
        let n: u32 = rng.random_range(0..=10);
        let p = rng.random_range(0..=n);
        let q = i64::from(n) - 2 * i64::from(p);
        let fixed = su2_fixed_spin(w, n)?;
        let charge = su2_charge_cs(z, q, n)?;
        let numeric = overlap(&fixed, &charge)?;
        residual = residual.max((overlap_su2_kernel(w, z, n, q)? - numeric).norm());
        // Parity mismatch: disjoint sectors.
        let off = overlap_su2_kernel(w, z, n + 1, q)?;
        let off_numeric = overlap(&su2_fixed_spin(w, n + 1)?, &charge)?;
        off_rule = off_rule.max(off.norm()).max(off_numeric.norm());

        let (w, z) = (&p3[2 * t], &p3[2 * t + 1]);
        let pp: i64 = rng.random_range(0..=2);
        let l: i64 = rng.random_range(0..=3);
        let q: i64 = rng.random_range(-3..=l);
        let n = (3 * pp + 2 * l - q) as u32;
        let fixed = su3_fixed_n(w, n)?;
        let charge = su3_charge_cs(z, q, l, pp as u32)?;
        let numeric = overlap(&fixed, &charge)?;
        residual = residual.max((overlap_su3_kernel(w, z, n, q, l)? - numeric).norm());
        for dn in [1, 2] {
            let off = overlap_su3_kernel(w, z, n + dn, q, l)?;
            let off_numeric = overlap(&su3_fixed_n(w, n + dn)?, &charge)?;
            off_rule = off_rule.max(off.norm()).max(off_numeric.norm());
        }
    }
    if off_rule != 0.0 {
        residual = f64::INFINITY;
    }
    let params = Params::default()
        .with("trials", trials)
        .with("seed", seed)
        .with("off_rule_max", off_rule);
    Ok(CheckReport::finish("overlap_kernels", params, residual, QUADRATURE_TOL, start))
}

/// Rebuilds the first `terms` SU(2) ladder amplitudes from fixed-spin states.
pub fn check_reconstruction_su2(z: &SpherePoint, q: i64, terms: u32) -> Result<CheckReport> {
    let start = Instant::now();
    if terms == 0 {
        return Err(Error::InvalidSpec("need at least one term".into()));
    }
    let top = q.unsigned_abs() as usize + 2 * (terms as usize - 1);
    let grid = QuadratureGrid::minimal(2, top, top)?;
    let rebuilt = reconstruct_charge_from_fixed_n(z, q, terms, &grid)?;
    let direct = su2_charge_cs(z, q, terms - 1)?;
    let residual = max_amp_diff(&rebuilt, &direct)?;
    let params = Params::default().with("z", fmt_c(z.coords())).with("q", q).with("terms", terms);
    Ok(CheckReport::finish("reconstruction_su2", params, residual, CHARGE_ROI_TOL, start))
}

/// SU(3) analog of [`check_reconstruction_su2`].
pub fn check_reconstruction_su3(z: &SpherePoint, q: i64, l: i64, terms: u32) -> Result<CheckReport> {
    let start = Instant::now();
    if terms == 0 {
        return Err(Error::InvalidSpec("need at least one term".into()));
    }
    let top = (2 * l - q) as usize + 3 * (terms as usize - 1);
    let grid = QuadratureGrid::minimal(3, top, top)?;
    let rebuilt = reconstruct_su3_charge_from_fixed_n(z, q, l, terms, &grid)?;
    let direct = su3_charge_cs(z, q, l, terms - 1)?;
    let residual = max_amp_diff(&rebuilt, &direct)?;
    let params = Params::default()
        .with("z", fmt_c(z.coords()))
        .with("q", q)
        .with("l", l)
        .with("terms", terms);
    Ok(CheckReport::finish("reconstruction_su3", params, residual, CHARGE_ROI_TOL, start))
}

/// SU(N) constructors at `N = 2, 3` against the dedicated SU(2)/SU(3) ones.
/// Residual is the largest amplitude difference, required to be exactly zero.
pub fn check_sun_consistency(draws: usize, seed: u64) -> Result<CheckReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p2: Vec<SpherePoint> = mc_sphere(2, draws, seed).collect();
    let p3: Vec<SpherePoint> = mc_sphere(3, draws, seed.wrapping_add(1)).collect();
    let mut residual = 0.0f64;
    for t in 0..draws {
        let cutoff: u32 = rng.random_range(0..=8);
        let n: u32 = rng.random_range(0..=8);

        // Nonnegative partial charge sums: q >= 0 at N = 2.
        let q: i64 = rng.random_range(0..=5);
        let z = &p2[t];
        residual = residual
            .max(max_amp_diff(&sun_charge_cs(z, &[q], cutoff)?, &su2_charge_cs(z, q, cutoff)?)?)
            .max(max_amp_diff(&sun_fixed_n(z, n)?, &su2_fixed_spin(z, n)?)?);

        let l: i64 = rng.random_range(0..=4);
        let q: i64 = rng.random_range(-4..=l);
        let z = &p3[t];
        residual = residual
            .max(max_amp_diff(&sun_charge_cs(z, &[q, l - q], cutoff)?, &su3_charge_cs(z, q, l, cutoff)?)?)
            .max(max_amp_diff(&sun_fixed_n(z, n)?, &su3_fixed_n(z, n)?)?);
    }
    let params = Params::default().with("draws", draws).with("seed", seed);
    Ok(CheckReport::finish("sun_consistency", params, residual, 0.0, start))
}

/// `a1 a2 |zeta>_q = zeta |zeta>_q` on all but the top rung of the pair state.
pub fn check_pair_states(zeta: PlanePoint, q: i64, cutoff: u32) -> Result<CheckReport> {
    let start = Instant::now();
    let ket = pair_cs_bhaumik(zeta, q, cutoff)?;
    let basis = ket.basis().clone();
    let a1a2 = SparseOperator::monomial(basis.clone(), basis.clone(), &[], &[0, 1], C64::new(1.0, 0.0))?;
    let diff = apply(&a1a2, &ket)?.sub(&ket.scale(zeta.zeta()))?;
    let top = basis.max_total();
    let residual = basis
        .states()
        .iter()
        .zip(diff.amplitudes())
        .filter(|(s, _)| s.total() + 2 <= top)
        .map(|(_, d)| d.norm())
        .fold(0.0, f64::max)
        / max_abs_amp(&ket).max(1.0);
    let params = Params::default()
        .with("zeta", fmt_c(&[zeta.zeta()]))
        .with("q", q)
        .with("cutoff", cutoff);
    Ok(CheckReport::finish("pair_states", params, residual, EXACT_TOL, start))
}

/// Three-oscillator generators against the SU(3) ones:
/// `J1 = 2 Q7`, `J2 = -2 Q5`, `J3 = 2 Q2`.
pub fn check_eriksson_identification(basis: Arc<SectorBasis>) -> Result<CheckReport> {
    let start = Instant::now();
    let j = eriksson_generators(basis.clone())?.generators;
    let q = su3_generators(basis.clone())?.generators;
    let pairs = [(0usize, 6usize, 2.0), (1, 4, -2.0), (2, 1, 2.0)];
    let mut residual = 0.0f64;
    for (ji, qa, s) in pairs {
        residual = residual.max(j[ji].sub(&q[qa].scale(C64::new(s, 0.0)))?.max_abs());
    }
    let params = Params::default().with("sector", basis.spec());
    Ok(CheckReport::finish("eriksson_identification", params, residual, EXACT_TOL, start))
}

fn basis(spec: SectorSpec) -> Result<Arc<SectorBasis>> {
    Ok(Arc::new(enumerate_sector(&spec)?))
}

/// Eigenvalue relations for random parameters: charge and total number on the
/// charge families, total number and `J.J` on fixed-spin states, total number
/// and the SU(3) Casimir on symmetric-representation states.
pub fn check_eigen_relations(draws: usize, seed: u64) -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p2: Vec<SpherePoint> = mc_sphere(2, draws, seed).collect();
    let p3: Vec<SpherePoint> = mc_sphere(3, draws, seed.wrapping_add(1)).collect();
    let mut out = Vec::new();
    let re = |x: f64| C64::new(x, 0.0);
    for t in 0..draws {
        let (z2, z3) = (&p2[t], &p3[t]);
        let q: i64 = rng.random_range(-6..=6);
        let r_max: u32 = rng.random_range(0..=10);
        let ket = su2_charge_cs(z2, q, r_max)?;
        let charge = sun_cartan_charges(ket.basis().clone())?.remove(0);
        out.push(check_eigen(&charge, &ket, re(q as f64))?.with_param("relation", "Q |z>_q"));

        let n: u32 = rng.random_range(0..=10);
        let ket = su2_fixed_spin(z2, n)?;
        let b = ket.basis().clone();
        out.push(check_eigen(&number_total(b.clone()), &ket, re(f64::from(n)))?.with_param("relation", "C |z>_n"));
        let j = f64::from(n) / 2.0;
        let jj = su2_generators(b)?.quadratic_casimir()?;
        out.push(check_eigen(&jj, &ket, re(j * (j + 1.0)))?.with_param("relation", "J.J |z>_n"));

        let l: i64 = rng.random_range(0..=5);
        let q: i64 = rng.random_range(-5..=l);
        let p_max: u32 = rng.random_range(0..=6);
        let ket = su3_charge_cs(z3, q, l, p_max)?;
        let b = ket.basis().clone();
        let q1 = sun_cartan_charges(b.clone())?.remove(0);
        out.push(check_eigen(&q1, &ket, re(q as f64))?.with_param("relation", "Q1 |z>_{q,l}"));
        out.push(
            check_eigen(&su3_hypercharge(b)?, &ket, re((2 * l - q) as f64))?
                .with_param("relation", "Q2 |z>_{q,l}"),
        );

        let n: u32 = rng.random_range(0..=7);
        let ket = su3_fixed_n(z3, n)?;
        let b = ket.basis().clone();
        out.push(check_eigen(&number_total(b.clone()), &ket, re(f64::from(n)))?.with_param("relation", "C |z>_n (SU3)"));
        let nf = f64::from(n);
        let cas = su3_generators(b)?.quadratic_casimir()?;
        out.push(
            check_eigen(&cas, &ket, re(nf * (nf + 3.0) / 3.0))?.with_param("relation", "Q.Q |z>_n"),
        );
    }
    Ok(out)
}

/// The full regression suite at default parameters.
pub fn default_suite(seed: u64) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for n in 0..=8 {
        out.push(check_lie_algebra(&su2_generators(basis(SectorSpec::fixed_total(2, n))?)?)?);
    }
    for n in 0..=5 {
        out.push(check_lie_algebra(&su3_generators(basis(SectorSpec::fixed_total(3, n))?)?)?);
    }
    for n in 0..=10 {
        out.push(check_casimir(basis(SectorSpec::fixed_total(2, n))?)?);
    }
    out.extend(check_eigen_relations(10, seed)?);
    let z = SpherePoint::from_unnormalized(vec![C64::new(0.6, 0.2), C64::new(-0.3, 0.7)])?;
    for q in [0, 1, 3] {
        out.push(check_nonlinear_relation(&z, q, 10)?);
    }
    let grid = euler_grid_27();
    for two_j in [1, 2, 3, 4, 6] {
        out.push(check_group_action(two_j, &grid)?);
    }
    let families = [
        FamilySpec::Su2Fixed { n: 3 },
        FamilySpec::Su2Fixed { n: 10 },
        FamilySpec::Su3Fixed { n: 4 },
        FamilySpec::Su2Charge { q: 2, r_max: 10 },
        FamilySpec::Su3Charge { q: 1, l: 2, p_max: 6 },
        FamilySpec::SunCharge { charges: vec![1, 0, 1], cutoff: 4 },
    ];
    for f in &families {
        out.push(check_roi_constant(f)?);
        out.push(check_roi(f, f.roi_constant())?);
    }
    out.push(check_overlap_kernels(100, seed)?);
    out.push(check_reconstruction_su2(&z, 1, 4)?);
    let z3 = SpherePoint::from_unnormalized(vec![C64::new(0.5, -0.1), C64::new(0.2, 0.4), C64::new(-0.3, 0.6)])?;
    out.push(check_reconstruction_su3(&z3, 1, 1, 4)?);
    out.push(check_sun_consistency(20, seed)?);
    for q in [0, 2] {
        out.push(check_pair_states(PlanePoint::new(C64::new(1.1, -0.7))?, q, 30)?);
    }
    let b3 = basis(SectorSpec::fixed_total(3, 4))?;
    out.push(check_lie_algebra(&eriksson_generators(b3.clone())?)?);
    out.push(check_eriksson_identification(b3)?);
    out.push(check_mc_convergence(4096, 10, seed)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(spec: SectorSpec) -> Arc<SectorBasis> {
        basis(spec).unwrap()
    }

    #[test]
    fn passed_tracks_residual() {
        let r = CheckReport::finish("x", Params::default(), f64::NAN, 1.0, Instant::now());
        assert!(!r.passed);
        let r = CheckReport::finish("x", Params::default(), 1.0, 1.0, Instant::now());
        assert!(r.passed);
    }

    #[test]
    fn lie_algebra_examples() {
        assert!(check_lie_algebra(&su2_generators(b(SectorSpec::fixed_total(2, 6))).unwrap()).unwrap().passed);
        assert!(check_lie_algebra(&su3_generators(b(SectorSpec::fixed_total(3, 4))).unwrap()).unwrap().passed);
        let mut single = su2_generators(b(SectorSpec::fixed_total(2, 3))).unwrap();
        single.generators.truncate(1);
        assert_eq!(check_lie_algebra(&single).unwrap().residual, 0.0);
    }

    #[test]
    fn lie_algebra_rejects_mixed_sectors() {
        let mut g = su2_generators(b(SectorSpec::fixed_total(2, 3))).unwrap();
        g.generators[1] = su2_generators(b(SectorSpec::fixed_total(2, 4))).unwrap().generators[1].clone();
        assert!(matches!(check_lie_algebra(&g), Err(Error::SectorMismatch(_))));
    }

    #[test]
    fn casimir_examples() {
        for n in [0, 2, 7] {
            assert!(check_casimir(b(SectorSpec::fixed_total(2, n))).unwrap().passed);
        }
        assert!(matches!(
            check_casimir(b(SectorSpec::fixed_total(3, 2))),
            Err(Error::ModeMismatch { .. })
        ));
    }

    #[test]
    fn eigen_rejects_wrong_sector() {
        let z = SpherePoint::from_unnormalized(vec![C64::new(0.6, 0.0), C64::new(0.8, 0.0)]).unwrap();
        let ket = su2_charge_cs(&z, 3, 4).unwrap();
        let op = number_total(b(SectorSpec::fixed_total(2, 3)));
        assert!(matches!(check_eigen(&op, &ket, C64::new(3.0, 0.0)), Err(Error::SectorMismatch(_))));
        let q = sun_cartan_charges(ket.basis().clone()).unwrap().remove(0);
        assert!(check_eigen(&q, &ket, C64::new(3.0, 0.0)).unwrap().passed);
        assert!(!check_eigen(&q, &ket, C64::new(2.0, 0.0)).unwrap().passed);
    }

    #[test]
    fn nonlinear_relation_needs_interior_restriction() {
        let z = SpherePoint::from_unnormalized(vec![C64::new(0.6, 0.2), C64::new(-0.3, 0.7)]).unwrap();
        let (interior, boundary) = nonlinear_relation_residuals(&z, 2, 10).unwrap();
        assert!(interior <= EXACT_TOL);
        assert!(boundary > 1e-6);
        let e1 = SpherePoint::new(vec![C64::new(1.0, 0.0), C64::default()]).unwrap();
        assert_eq!(check_nonlinear_relation(&e1, 0, 5).unwrap().residual, 0.0);
        assert!(check_nonlinear_relation(&z, 0, 1).is_err());
    }

    #[test]
    fn group_action_identity_is_exact() {
        let id = [EulerAngles { theta: 0.0, phi: 0.0, psi: 0.0 }];
        assert!(check_group_action(3, &id).unwrap().residual < 1e-15);
        assert!(check_group_action(1, &euler_grid_27()).unwrap().passed);
    }

    #[test]
    fn roi_examples() {
        let f = FamilySpec::Su2Fixed { n: 3 };
        assert!(check_roi(&f, PI * PI / 4.0).unwrap().passed);
        assert!(!check_roi(&f, PI * PI / 3.0).unwrap().passed);
        assert!(check_roi(&FamilySpec::Su2Charge { q: 2, r_max: 10 }, PI * PI).unwrap().passed);
        assert!(check_roi(&FamilySpec::Su3Charge { q: 1, l: 2, p_max: 6 }, PI.powi(3)).unwrap().passed);
    }

    #[test]
    fn reports_are_reproducible() {
        let a = check_overlap_kernels(20, 7).unwrap();
        let b = check_overlap_kernels(20, 7).unwrap();
        assert_eq!(a.residual.to_bits(), b.residual.to_bits());
        assert!(a.passed);
    }

    #[test]
    fn eriksson_checks() {
        let b3 = b(SectorSpec::fixed_total(3, 3));
        assert!(check_lie_algebra(&eriksson_generators(b3.clone()).unwrap()).unwrap().passed);
        assert!(check_eriksson_identification(b3).unwrap().passed);
    }
}
