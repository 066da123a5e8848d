//! Coherent-state families as explicit kets.
//!
//! Fixed-representation states are unit norm on the sphere. Charge states are
//! left unnormalized: their norm varies over the sphere and the resolution of
//! identity is stated for the unnormalized family.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{enumerate_sector, OccupationState, SectorBasis, SectorSpec};
use crate::operators::{apply, apply_dense, hermitian_expm, su2_generators, SparseOperator};
use crate::special::ln_factorial;
use crate::C64;

/// Tolerance on `sum |z_i|^2 = 1`.
pub const SPHERE_TOL: f64 = 1e-12;
/// Relative tail bound for the comparison-family normalization series.
pub const SERIES_TAIL_TOL: f64 = 1e-14;

/// Complex amplitude vector over a sector basis.
#[derive(Debug, Clone)]
pub struct Ket {
    basis: Arc<SectorBasis>,
    amps: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KetJson {
    pub basis: SectorSpec,
    pub amps: Vec<[f64; 2]>,
}

impl Ket {
    pub fn new(basis: Arc<SectorBasis>, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::SectorMismatch(format!(
                "{} amplitudes for a basis of dimension {}",
                amps.len(),
                basis.dim()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidPoint("non-finite amplitude".into()));
        }
        Ok(Self { basis, amps })
    }

    pub(crate) fn from_parts(basis: Arc<SectorBasis>, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), basis.dim());
        Self { basis, amps }
    }

    pub fn from_fn(basis: Arc<SectorBasis>, f: impl Fn(&OccupationState) -> C64) -> Self {
        let amps = basis.states().iter().map(f).collect();
        Self { basis, amps }
    }

    pub fn zero(basis: Arc<SectorBasis>) -> Self {
        let amps = vec![C64::default(); basis.dim()];
        Self { basis, amps }
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Amplitude on `occ`, zero when it is outside the sector.
    pub fn amplitude_of(&self, occ: &OccupationState) -> C64 {
        self.basis.position(occ).map(|i| self.amps[i]).unwrap_or_default()
    }

    pub fn norm2(&self) -> f64 {
        self.amps.iter().map(C64::norm_sqr).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { basis: self.basis.clone(), amps: self.amps.iter().map(|a| a * s).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_sector(self, other)?;
        let amps = self.amps.iter().zip(&other.amps).map(|(a, b)| a - b).collect();
        Ok(Self { basis: self.basis.clone(), amps })
    }

    /// Euclidean norm of the entries selected by `keep`.
    pub fn masked_norm(&self, keep: impl Fn(&OccupationState) -> bool) -> f64 {
        self.basis
            .states()
            .iter()
            .zip(&self.amps)
            .filter(|(s, _)| keep(s))
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn to_json(&self) -> KetJson {
        KetJson {
            basis: self.basis.spec().clone(),
            amps: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    pub fn from_json(json: &KetJson) -> Result<Self> {
        let basis = Arc::new(enumerate_sector(&json.basis)?);
        Self::new(basis, json.amps.iter().map(|[re, im]| C64::new(*re, *im)).collect())
    }
}

fn same_sector(x: &Ket, y: &Ket) -> Result<()> {
    if x.basis != y.basis {
        return Err(Error::SectorMismatch(format!(
            "{} vs {}",
            x.basis.spec(),
            y.basis.spec()
        )));
    }
    Ok(())
}

/// `<x|y>`, conjugate-linear in `x`. Both kets must share a sector.
pub fn inner(x: &Ket, y: &Ket) -> Result<C64> {
    same_sector(x, y)?;
    Ok(x.amps.iter().zip(&y.amps).map(|(a, b)| a.conj() * b).sum())
}

/// `<x|y>` for kets on different sectors of the same Fock space; only shared
/// occupation states contribute.
pub fn overlap(x: &Ket, y: &Ket) -> Result<C64> {
    if x.basis.modes() != y.basis.modes() {
        return Err(Error::ModeMismatch { expected: x.basis.modes(), found: y.basis.modes() });
    }
    Ok(x.basis
        .states()
        .iter()
        .zip(&x.amps)
        .filter_map(|(s, a)| y.basis.position(s).map(|j| a.conj() * y.amps[j]))
        .sum())
}

pub fn norm2(x: &Ket) -> f64 {
    x.norm2()
}

/// `<x|A|x>` (not divided by the norm).
pub fn expectation(op: &SparseOperator, x: &Ket) -> Result<C64> {
    if !op.is_endomorphism() {
        return Err(Error::SectorMismatch("expectation needs an endomorphism".into()));
    }
    inner(x, &apply(op, x)?)
}

/// Point `(z_1, ..., z_N)` on the unit sphere `S^{2N-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    coords: Vec<C64>,
}

impl SpherePoint {
    pub fn new(coords: Vec<C64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidPoint("sphere point needs at least one coordinate".into()));
        }
        let n2: f64 = coords.iter().map(C64::norm_sqr).sum();
        if !n2.is_finite() || (n2 - 1.0).abs() > SPHERE_TOL {
            return Err(Error::InvalidPoint(format!("sum |z_i|^2 = {n2}, expected 1")));
        }
        Ok(Self { coords })
    }

    /// Rescales onto the sphere; rejects the zero vector.
    pub fn from_unnormalized(coords: Vec<C64>) -> Result<Self> {
        let n2: f64 = coords.iter().map(C64::norm_sqr).sum();
        if n2 <= 0.0 || !n2.is_finite() {
            return Err(Error::InvalidPoint("cannot normalize a zero or non-finite vector".into()));
        }
        let s = 1.0 / n2.sqrt();
        Ok(Self { coords: coords.into_iter().map(|c| c * s).collect() })
    }

    /// Normalizes only when the input is already within `tol` of unit norm.
    pub fn normalize_if_close(coords: Vec<C64>, tol: f64) -> Result<Self> {
        let n2: f64 = coords.iter().map(C64::norm_sqr).sum();
        if (n2 - 1.0).abs() > tol {
            return Err(Error::InvalidPoint(format!(
                "sum |z_i|^2 = {n2} is not within {tol:e} of 1"
            )));
        }
        Self::from_unnormalized(coords)
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    fn expect_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::ModeMismatch { expected: n, found: self.dim() });
        }
        Ok(())
    }
}

/// Euler angles of `exp(i phi J3) exp(i theta J2) exp(i psi J3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
}

impl EulerAngles {
    pub fn new(theta: f64, phi: f64, psi: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) || !phi.is_finite() || !psi.is_finite() {
            return Err(Error::InvalidPoint(format!(
                "Euler angles need theta in [0, pi] and finite phi, psi (got {theta}, {phi}, {psi})"
            )));
        }
        Ok(Self { theta, phi, psi })
    }
}

/// Point of the complex plane carrying the comparison families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    zeta: C64,
}

impl PlanePoint {
    pub fn new(zeta: C64) -> Result<Self> {
        if !zeta.re.is_finite() || !zeta.im.is_finite() {
            return Err(Error::InvalidPoint("plane point must be finite".into()));
        }
        Ok(Self { zeta })
    }

    pub fn zeta(&self) -> C64 {
        self.zeta
    }
}

fn sector(spec: SectorSpec) -> Result<Arc<SectorBasis>> {
    Ok(Arc::new(enumerate_sector(&spec)?))
}

fn monomial(z: &[C64], occ: &OccupationState) -> C64 {
    z.iter().zip(occ.counts()).map(|(zi, &n)| zi.powu(n)).product()
}

fn ln_factorial_product(occ: &OccupationState) -> f64 {
    occ.counts().iter().map(|&n| ln_factorial(u64::from(n))).sum()
}

/// `sqrt(n! / prod n_i!)`, the fixed-representation coefficient.
pub fn fixed_n_coefficient(occ: &OccupationState) -> f64 {
    (0.5 * (ln_factorial(occ.total()) - ln_factorial_product(occ))).exp()
}

/// `sqrt((n_1 + ... + n_N + N - 1)! / prod n_i!)`, shared by every charge family.
pub fn charge_coefficient(occ: &OccupationState) -> f64 {
    let top = occ.total() + occ.modes() as u64 - 1;
    (0.5 * (ln_factorial(top) - ln_factorial_product(occ))).exp()
}

/// Amplitude of the fixed-representation family on one occupation state.
pub fn fixed_n_amplitude(z: &[C64], occ: &OccupationState) -> C64 {
    monomial(z, occ) * fixed_n_coefficient(occ)
}

/// Amplitude of the charge families on one occupation state.
pub fn charge_amplitude(z: &[C64], occ: &OccupationState) -> C64 {
    monomial(z, occ) * charge_coefficient(occ)
}

/// Canonical coherent state `sum_n z^n / sqrt(n!) |n>`, `n <= cutoff`, unnormalized.
pub fn canonical_cs(z: C64, cutoff: u32) -> Result<Ket> {
    let basis = sector(SectorSpec::plain_truncation(1, cutoff))?;
    Ok(Ket::from_fn(basis, |s| {
        let n = s.count(0);
        z.powu(n) * (-0.5 * ln_factorial(u64::from(n))).exp()
    }))
}

/// Fixed-`n` coherent state on `N = z.dim()` modes.
pub fn sun_fixed_n(z: &SpherePoint, n: u32) -> Result<Ket> {
    if z.dim() < 2 {
        return Err(Error::ModeMismatch { expected: 2, found: z.dim() });
    }
    let basis = sector(SectorSpec::fixed_total(z.dim(), n))?;
    Ok(Ket::from_fn(basis, |s| fixed_n_amplitude(z.coords(), s)))
}

/// Spin-`n/2` coherent state on two modes.
pub fn su2_fixed_spin(z: &SpherePoint, n: u32) -> Result<Ket> {
    z.expect_dim(2)?;
    sun_fixed_n(z, n)
}

/// Symmetric-representation SU(3) coherent state.
pub fn su3_fixed_n(z: &SpherePoint, n: u32) -> Result<Ket> {
    z.expect_dim(3)?;
    sun_fixed_n(z, n)
}

fn charge_ket(z: &SpherePoint, spec: SectorSpec) -> Result<Ket> {
    z.expect_dim(spec.mode_count)?;
    let basis = sector(spec)?;
    Ok(Ket::from_fn(basis, |s| charge_amplitude(z.coords(), s)))
}

/// Fixed SU(2) charge state on the ladder `SU2Charge(q, r_max)`.
pub fn su2_charge_cs(z: &SpherePoint, q: i64, r_max: u32) -> Result<Ket> {
    charge_ket(z, SectorSpec::su2_charge(q, r_max))
}

/// Fixed charge and hypercharge SU(3) state on `|p+l, p+l-q, p>`.
pub fn su3_charge_cs(z: &SpherePoint, q: i64, l: i64, p_max: u32) -> Result<Ket> {
    charge_ket(z, SectorSpec::su3_charge_hyper(q, l, p_max))
}

/// SU(N) charge state with Cartan eigenvalues `q_l` of `N_l - N_{l+1}`.
pub fn sun_charge_cs(z: &SpherePoint, charges: &[i64], cutoff: u32) -> Result<Ket> {
    charge_ket(z, SectorSpec::sun_charges(charges.to_vec(), cutoff))
}

/// Ratio of the squared amplitude of the first omitted rung to the last kept one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailReport {
    pub ratio: f64,
    /// `ratio < 1`; the partial norm sum is not yet reliable otherwise.
    pub convergent: bool,
}

/// Tail diagnostic for a charge ladder (each rung adds one boson to every mode).
pub fn charge_tail(z: &SpherePoint, spec: &SectorSpec) -> Result<TailReport> {
    z.expect_dim(spec.mode_count)?;
    let basis = enumerate_sector(spec)?;
    let last = basis
        .states()
        .last()
        .ok_or_else(|| Error::InvalidSpec("empty sector".into()))?;
    if matches!(
        spec.constraint,
        crate::fock::Constraint::FixedTotal { .. } | crate::fock::Constraint::PlainTruncation { .. }
    ) {
        return Err(Error::InvalidSpec(format!("{spec} is not a charge ladder")));
    }
    let next = OccupationState::new(last.counts().iter().map(|c| c + 1).collect())?;
    let log_ratio = 2.0 * (charge_coefficient(&next).ln() - charge_coefficient(last).ln());
    let weight: f64 = z.coords().iter().map(C64::norm_sqr).product();
    let ratio = log_ratio.exp() * weight;
    Ok(TailReport { ratio, convergent: ratio < 1.0 })
}

/// SU(2) fixed-spin / fixed-charge overlap kernel `_n<w|z>_q`.
pub fn overlap_su2_kernel(w: &SpherePoint, z: &SpherePoint, n: u32, q: i64) -> Result<C64> {
    w.expect_dim(2)?;
    z.expect_dim(2)?;
    let n = i64::from(n);
    if (n - q).rem_euclid(2) != 0 {
        return Ok(C64::default());
    }
    let p = (n - q) / 2;
    if p < 0 || p + q < 0 {
        return Ok(C64::default());
    }
    let (n, p, pq) = (n as u64, p as u64, (p + q) as u64);
    let coef = (0.5 * (ln_factorial(n) + ln_factorial(n + 1)) - ln_factorial(pq) - ln_factorial(p)).exp();
    let (w, z) = (w.coords(), z.coords());
    Ok((w[0].conj() * z[0]).powu(pq as u32) * (w[1].conj() * z[1]).powu(p as u32) * coef)
}

/// SU(3) symmetric-representation / charge overlap kernel `_n<w|z>_{q,l}`.
pub fn overlap_su3_kernel(w: &SpherePoint, z: &SpherePoint, n: u32, q: i64, l: i64) -> Result<C64> {
    w.expect_dim(3)?;
    z.expect_dim(3)?;
    if l < 0 || l < q {
        return Err(Error::InvalidSpec(format!("need l >= max(0, q), got q = {q}, l = {l}")));
    }
    let n = i64::from(n);
    let offset = 2 * l - q;
    if (n - offset).rem_euclid(3) != 0 || n < offset {
        return Ok(C64::default());
    }
    let p = (n - offset) / 3;
    let (a, b, c) = ((p + l) as u64, (p + l - q) as u64, p as u64);
    let n = n as u64;
    let coef = (0.5 * (ln_factorial(n) + ln_factorial(n + 2))
        - ln_factorial(a)
        - ln_factorial(b)
        - ln_factorial(c))
    .exp();
    let (w, z) = (w.coords(), z.coords());
    Ok((w[0].conj() * z[0]).powu(a as u32)
        * (w[1].conj() * z[1]).powu(b as u32)
        * (w[2].conj() * z[2]).powu(c as u32)
        * coef)
}

/// `z_1 = e^{i psi/2} e^{i phi/2} cos(theta/2)`, `z_2 = e^{i psi/2} e^{-i phi/2} sin(theta/2)`.
pub fn euler_to_sphere(angles: &EulerAngles) -> SpherePoint {
    let half = 0.5 * angles.theta;
    let z1 = C64::from_polar(half.cos(), 0.5 * (angles.psi + angles.phi));
    let z2 = C64::from_polar(half.sin(), 0.5 * (angles.psi - angles.phi));
    SpherePoint { coords: vec![z1, z2] }
}

/// Rotated highest-weight state from the closed-form coefficients
/// `e^{i j psi} C_m(theta, phi)` on `|j+m, j-m>`.
pub fn group_action_su2(angles: &EulerAngles, two_j: u32) -> Result<Ket> {
    let basis = sector(SectorSpec::fixed_total(2, two_j))?;
    let (s, c) = (0.5 * angles.theta).sin_cos();
    Ok(Ket::from_fn(basis, |occ| {
        let (up, down) = (occ.count(0), occ.count(1));
        let m = 0.5 * (f64::from(up) - f64::from(down));
        let j = 0.5 * f64::from(two_j);
        let phase = C64::from_polar(1.0, j * angles.psi + m * angles.phi);
        phase * fixed_n_coefficient(occ) * s.powi(down as i32) * c.powi(up as i32)
    }))
}

/// The same rotation built from matrix exponentials of the Schwinger generators,
/// `exp(i phi J3) exp(-i theta J2) exp(i psi J3) |2j, 0>`.
///
/// The polar rotation carries `-theta`: with `J2 = sigma_y / 2` in the fundamental,
/// `exp(+i theta J2)` sends `|1,0>` to `cos|1,0> - sin|0,1>`, while the closed-form
/// coefficients have `+sin`.
pub fn group_action_su2_expm(angles: &EulerAngles, two_j: u32) -> Result<Ket> {
    let basis = sector(SectorSpec::fixed_total(2, two_j))?;
    let gens = su2_generators(basis.clone())?;
    let highest = Ket::from_fn(basis, |s| {
        if s.count(1) == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::default()
        }
    });
    let j2 = &gens.generators[1];
    let j3 = &gens.generators[2];
    let step = apply_dense(&hermitian_expm(j3, angles.psi)?, &highest)?;
    let step = apply_dense(&hermitian_expm(j2, -angles.theta)?, &step)?;
    apply_dense(&hermitian_expm(j3, angles.phi)?, &step)
}

/// Normalization `(sum_k t_k)^{-1/2}` of a positive series given in log form,
/// summed until the next term is below [`SERIES_TAIL_TOL`] of the sum and the
/// terms are decreasing.
fn series_normalization(log_term: impl Fn(u64) -> f64) -> f64 {
    // Terms are log-concave in k; start from the peak so scaling stays finite.
    let mut peak_k = 0u64;
    let mut peak = log_term(0);
    loop {
        let next = log_term(peak_k + 1);
        if next <= peak {
            break;
        }
        peak = next;
        peak_k += 1;
    }
    let mut sum = 0.0f64;
    for k in (0..peak_k).rev() {
        sum += (log_term(k) - peak).exp();
    }
    let mut k = peak_k;
    loop {
        let t = (log_term(k) - peak).exp();
        sum += t;
        if t < SERIES_TAIL_TOL * sum {
            break;
        }
        k += 1;
    }
    (-0.5 * (peak + sum.ln())).exp()
}

/// Pair coherent state `N_q sum_n zeta^n / sqrt(n!(n+q)!) |n+q, n>`, `n <= cutoff`.
pub fn pair_cs_bhaumik(zeta: PlanePoint, q: i64, cutoff: u32) -> Result<Ket> {
    if q < 0 {
        return Err(Error::InvalidSpec(format!("pair states need q >= 0, got {q}")));
    }
    let qu = q as u64;
    let z = zeta.zeta();
    let log_abs = z.norm().ln();
    let norm = series_normalization(|n| {
        let base = ln_factorial(n) + ln_factorial(n + qu);
        if n == 0 {
            -base
        } else {
            2.0 * n as f64 * log_abs - base
        }
    });
    let basis = sector(SectorSpec::su2_charge(q, cutoff))?;
    Ok(Ket::from_fn(basis, |s| {
        let n = s.count(1);
        let log_den = 0.5 * (ln_factorial(u64::from(n)) + ln_factorial(u64::from(n) + qu));
        z.powu(n) * (norm * (-log_den).exp())
    }))
}

/// Three-mode comparison state on `|m+y+qbar, m+2y-qbar, m>`, normalized by its
/// convergent series. Lives on `SU3ChargeHyper(2 qbar - y, qbar + y, cutoff)`.
pub fn fan_su3_cs(zeta: PlanePoint, qbar: i64, y: i64, cutoff: u32) -> Result<Ket> {
    let (a, b) = (y + qbar, 2 * y - qbar);
    if a < 0 || b < 0 {
        return Err(Error::InvalidSpec(format!(
            "occupations y+qbar = {a} and 2y-qbar = {b} must be non-negative"
        )));
    }
    let (a, b) = (a as u64, b as u64);
    let z = zeta.zeta();
    let log_abs = z.norm().ln();
    let log_den = |m: u64| ln_factorial(m) + ln_factorial(m + a) + ln_factorial(m + b);
    let norm = series_normalization(|m| {
        if m == 0 {
            -log_den(0)
        } else {
            2.0 * m as f64 * log_abs - log_den(m)
        }
    });
    let basis = sector(SectorSpec::su3_charge_hyper(2 * qbar - y, qbar + y, cutoff))?;
    Ok(Ket::from_fn(basis, |s| {
        let m = s.count(2);
        z.powu(m) * (norm * (-0.5 * log_den(u64::from(m))).exp())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{sun_cartan_charges, su3_hypercharge, number_total};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn occ(x: &[u32]) -> OccupationState {
        OccupationState::new(x.to_vec()).unwrap()
    }

    fn sp(v: &[C64]) -> SpherePoint {
        SpherePoint::from_unnormalized(v.to_vec()).unwrap()
    }

    #[test]
    fn canonical_cases() {
        let k = canonical_cs(C64::default(), 4).unwrap();
        assert_eq!(k.amplitudes()[0], c(1.0, 0.0));
        assert!(k.amplitudes()[1..].iter().all(|a| *a == C64::default()));
        let k = canonical_cs(c(1.0, 0.0), 4).unwrap();
        assert_relative_eq!(k.amplitude_of(&occ(&[2])).re, 0.5f64.sqrt(), epsilon = 1e-15);
        let z = c(0.8, -0.6);
        let k = canonical_cs(z, 60).unwrap();
        assert_relative_eq!(k.norm2(), z.norm_sqr().exp(), max_relative = 1e-14);
    }

    #[test]
    fn su2_fixed_spin_cases() {
        let z = sp(&[c(0.6, 0.1), c(-0.3, 0.7)]);
        let k = su2_fixed_spin(&z, 1).unwrap();
        assert_eq!(k.amplitudes(), &[z.coords()[0], z.coords()[1]]);
        let h = 0.5f64.sqrt();
        let k = su2_fixed_spin(&SpherePoint::new(vec![c(h, 0.0), c(h, 0.0)]).unwrap(), 2).unwrap();
        let want = [0.5, h, 0.5];
        for (a, w) in k.amplitudes().iter().zip(want) {
            assert_relative_eq!(a.re, w, epsilon = 1e-15);
        }
        assert!(su2_fixed_spin(&sp(&[c(1.0, 0.0); 3]), 2).is_err());
    }

    #[test]
    fn su2_charge_cases() {
        let h = 0.5f64.sqrt();
        let z = SpherePoint::new(vec![c(h, 0.0), c(0.0, h)]).unwrap();
        let k = su2_charge_cs(&z, 0, 3).unwrap();
        assert_relative_eq!(k.amplitudes()[0].re, 1.0, epsilon = 1e-15);
        let k = su2_charge_cs(&z, 1, 3).unwrap();
        let want = 12f64.sqrt() / (2.0 * 2f64.sqrt());
        assert_relative_eq!(k.amplitude_of(&occ(&[2, 1])).norm(), want, max_relative = 1e-14);
        assert_relative_eq!(want, 1.224744871391589, epsilon = 1e-12);
        let q = &sun_cartan_charges(k.basis().clone()).unwrap()[0];
        let diff = apply(q, &k).unwrap().sub(&k.scale(c(1.0, 0.0))).unwrap();
        assert_eq!(diff.norm2(), 0.0);
    }

    #[test]
    fn negative_charge_is_mode_mirror() {
        let z = sp(&[c(0.3, 0.2), c(0.5, -0.6)]);
        let swapped = sp(&[z.coords()[1], z.coords()[0]]);
        let neg = su2_charge_cs(&z, -3, 5).unwrap();
        let pos = su2_charge_cs(&swapped, 3, 5).unwrap();
        for (s, a) in neg.basis().states().iter().zip(neg.amplitudes()) {
            let mirror = occ(&[s.count(1), s.count(0)]);
            assert_eq!(*a, pos.amplitude_of(&mirror));
        }
    }

    #[test]
    fn su3_cases() {
        let z = sp(&[c(0.2, 0.3), c(-0.5, 0.1), c(0.4, 0.4)]);
        let k = su3_fixed_n(&z, 1).unwrap();
        assert_eq!(k.amplitudes(), z.coords());
        let k = su3_fixed_n(&SpherePoint::new(vec![c(1.0, 0.0), C64::default(), C64::default()]).unwrap(), 2).unwrap();
        assert_eq!(k.amplitude_of(&occ(&[2, 0, 0])), c(1.0, 0.0));
        assert_eq!(k.norm2(), 1.0);

        let k = su3_charge_cs(&z, 0, 0, 2).unwrap();
        assert_relative_eq!(k.amplitudes()[0].re, 2f64.sqrt(), epsilon = 1e-15);
        let k = su3_charge_cs(&z, 1, 1, 2).unwrap();
        let want = z.coords()[0] * 6f64.sqrt();
        assert!((k.amplitude_of(&occ(&[1, 0, 0])) - want).norm() < 1e-15);
        let q = sun_cartan_charges(k.basis().clone()).unwrap();
        let y = su3_hypercharge(k.basis().clone()).unwrap();
        assert_eq!(apply(&q[0], &k).unwrap().sub(&k).unwrap().norm2(), 0.0);
        assert_eq!(apply(&y, &k).unwrap().sub(&k.scale(c(1.0, 0.0))).unwrap().norm2(), 0.0);
        assert!(su3_charge_cs(&z, 2, 1, 2).is_err());
    }

    #[test]
    fn sun_cases() {
        let z2 = sp(&[c(0.1, 0.9), c(0.4, -0.2)]);
        assert_eq!(sun_fixed_n(&z2, 5).unwrap().amplitudes(), su2_fixed_spin(&z2, 5).unwrap().amplitudes());
        let z4 = sp(&[c(0.1, 0.2), c(0.3, -0.4), c(-0.5, 0.6), c(0.7, 0.05)]);
        assert_eq!(sun_fixed_n(&z4, 1).unwrap().amplitudes(), z4.coords());
        assert_relative_eq!(sun_fixed_n(&z4, 5).unwrap().norm2(), 1.0, epsilon = 1e-13);
        let k = sun_charge_cs(&z4, &[0, 0, 0], 2).unwrap();
        assert_relative_eq!(k.amplitudes()[0].re, 6f64.sqrt(), epsilon = 1e-14);
        assert!(sun_charge_cs(&z4, &[0, -1, 0], 2).is_err());
    }

    #[test]
    fn tail_ratio_matches_closed_form() {
        let z = sp(&[c(0.6, 0.2), c(0.3, -0.5)]);
        for (q, r) in [(0i64, 4u32), (2, 10), (5, 12)] {
            let t = charge_tail(&z, &SectorSpec::su2_charge(q, r)).unwrap();
            let (qf, rf) = (q as f64, f64::from(r));
            let want = (qf + 2.0 * rf + 2.0) * (qf + 2.0 * rf + 3.0) / ((qf + rf + 1.0) * (rf + 1.0))
                * (z.coords()[0] * z.coords()[1]).norm_sqr();
            assert_relative_eq!(t.ratio, want, max_relative = 1e-12);
        }
        // |z1 z2| = 1/2 sits on the divergence boundary.
        let h = 0.5f64.sqrt();
        let t = charge_tail(&SpherePoint::new(vec![c(h, 0.0), c(h, 0.0)]).unwrap(), &SectorSpec::su2_charge(0, 30)).unwrap();
        assert!(!t.convergent);
        assert!(charge_tail(&z, &SectorSpec::fixed_total(2, 3)).is_err());
    }

    #[test]
    fn kernels_and_selection_rules() {
        let w = sp(&[c(0.3, -0.1), c(0.2, 0.8)]);
        let z = sp(&[c(-0.6, 0.2), c(0.5, 0.5)]);
        assert_eq!(overlap_su2_kernel(&w, &z, 1, 0).unwrap(), C64::default());
        let k = overlap_su2_kernel(&w, &z, 2, 0).unwrap();
        let want = (w.coords()[0].conj() * z.coords()[0]) * (w.coords()[1].conj() * z.coords()[1]) * 12f64.sqrt();
        assert!((k - want).norm() < 1e-14);

        let w3 = sp(&[c(0.3, -0.1), c(0.2, 0.8), c(0.1, 0.1)]);
        let z3 = sp(&[c(-0.6, 0.2), c(0.5, 0.5), c(0.2, -0.3)]);
        assert_eq!(overlap_su3_kernel(&w3, &z3, 3, 0, 1).unwrap(), C64::default());
        let k = overlap_su3_kernel(&w3, &z3, 2, 0, 1).unwrap();
        let want = (w3.coords()[0].conj() * z3.coords()[0]) * (w3.coords()[1].conj() * z3.coords()[1]) * 48f64.sqrt();
        assert!((k - want).norm() < 1e-13);
    }

    #[test]
    fn euler_points() {
        let z = euler_to_sphere(&EulerAngles::new(0.0, 0.0, 0.0).unwrap());
        assert_eq!(z.coords(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        let z = euler_to_sphere(&EulerAngles::new(std::f64::consts::PI, 0.0, 0.0).unwrap());
        assert!((z.coords()[0]).norm() < 1e-16 && (z.coords()[1] - c(1.0, 0.0)).norm() < 1e-16);
        assert!(EulerAngles::new(-0.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn group_action_spin_half() {
        let a = EulerAngles::new(1.1, -0.7, 2.3).unwrap();
        let k = group_action_su2(&a, 1).unwrap();
        let (s, co) = (0.55f64.sin(), 0.55f64.cos());
        let psi = C64::from_polar(1.0, 1.15);
        let want = [psi * C64::from_polar(co, -0.35), psi * C64::from_polar(s, 0.35)];
        for (x, y) in k.amplitudes().iter().zip(want) {
            assert!((x - y).norm() < 1e-15);
        }
        let e = group_action_su2_expm(&a, 1).unwrap();
        assert!(e.sub(&k).unwrap().norm2().sqrt() < 1e-14);
        let id = group_action_su2(&EulerAngles::new(0.0, 0.0, 0.0).unwrap(), 4).unwrap();
        assert_eq!(id.amplitudes()[0], c(1.0, 0.0));
        assert!(id.amplitudes()[1..].iter().all(|x| *x == C64::default()));
    }

    #[test]
    fn pair_states() {
        let k = pair_cs_bhaumik(PlanePoint::new(C64::default()).unwrap(), 3, 6).unwrap();
        assert_relative_eq!(k.amplitudes()[0].re, 1.0, epsilon = 1e-15);
        assert!(k.amplitudes()[1..].iter().all(|a| *a == C64::default()));
        let k = pair_cs_bhaumik(PlanePoint::new(c(0.7, 0.4)).unwrap(), 1, 40).unwrap();
        assert_relative_eq!(k.norm2(), 1.0, epsilon = 1e-13);
        assert!(pair_cs_bhaumik(PlanePoint::new(c(0.7, 0.4)).unwrap(), -1, 4).is_err());
    }

    #[test]
    fn fan_states() {
        let k = fan_su3_cs(PlanePoint::new(C64::default()).unwrap(), 1, 2, 4).unwrap();
        assert_eq!(k.basis().state(0), &occ(&[3, 3, 0]));
        assert_relative_eq!(k.amplitudes()[0].re, 1.0, epsilon = 1e-15);
        let k = fan_su3_cs(PlanePoint::new(c(0.9, -0.2)).unwrap(), 2, 1, 60).unwrap();
        assert_relative_eq!(k.norm2(), 1.0, epsilon = 1e-13);
        let q = sun_cartan_charges(k.basis().clone()).unwrap();
        let y = su3_hypercharge(k.basis().clone()).unwrap();
        assert_eq!(apply(&q[0], &k).unwrap().sub(&k.scale(c(3.0, 0.0))).unwrap().norm2(), 0.0);
        assert_eq!(apply(&y, &k).unwrap().sub(&k.scale(c(3.0, 0.0))).unwrap().norm2(), 0.0);
        assert!(fan_su3_cs(PlanePoint::new(c(0.1, 0.0)).unwrap(), 3, 1, 4).is_err());
    }

    #[test]
    fn inner_products() {
        let w = sp(&[c(0.3, -0.1), c(0.2, 0.8)]);
        let z = sp(&[c(-0.6, 0.2), c(0.5, 0.5)]);
        let x = su2_fixed_spin(&w, 1).unwrap();
        let y = su2_fixed_spin(&z, 1).unwrap();
        let want = w.coords()[0].conj() * z.coords()[0] + w.coords()[1].conj() * z.coords()[1];
        assert!((inner(&x, &y).unwrap() - want).norm() < 1e-15);
        assert_eq!(inner(&x, &x).unwrap().re, x.norm2());
        assert!(inner(&x, &su2_fixed_spin(&z, 2).unwrap()).is_err());
        assert_eq!(overlap(&x, &su2_fixed_spin(&z, 2).unwrap()).unwrap(), C64::default());

        let k = su2_charge_cs(&z, 2, 6).unwrap();
        let g = su2_generators(k.basis().clone()).unwrap();
        let e = expectation(&g.generators[2], &k).unwrap();
        assert_relative_eq!(e.re, 1.0 * k.norm2(), max_relative = 1e-14);
        assert!(e.im.abs() < 1e-12);
        let c_op = number_total(k.basis().clone());
        assert!(expectation(&c_op, &k).unwrap().im.abs() < 1e-12);
    }

    #[test]
    fn ket_json_roundtrip() {
        let z = sp(&[c(0.3, -0.1), c(0.2, 0.8)]);
        let k = su2_charge_cs(&z, 1, 2).unwrap();
        let json = serde_json::to_string(&k.to_json()).unwrap();
        assert!(json.starts_with(r#"{"basis":{"modes":2,"kind":"su2_charge","q":1,"r_max":2},"amps":[["#));
        let back = Ket::from_json(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.amplitudes(), k.amplitudes());
    }

    #[test]
    fn sphere_point_validation() {
        assert!(SpherePoint::new(vec![c(1.0, 0.0), c(0.1, 0.0)]).is_err());
        assert!(SpherePoint::normalize_if_close(vec![c(1.0 + 1e-10, 0.0), c(0.0, 0.0)], 1e-9).is_ok());
        assert!(SpherePoint::normalize_if_close(vec![c(1.1, 0.0)], 1e-9).is_err());
        assert!(SpherePoint::from_unnormalized(vec![C64::default(); 2]).is_err());
    }
}
