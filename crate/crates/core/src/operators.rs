//! Sparse second-quantized operators on sector bases.
//!
//! Operators store canonical coordinate triplets sorted by `(row, col)` with
//! duplicates summed and exact zeros dropped. Every builder drops components
//! whose image leaves the codomain, which is the only place truncation of the
//! infinite Fock space enters; checks built on top restrict themselves to
//! states away from that boundary.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{OccupationState, SectorBasis};
use crate::states::Ket;
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Hermiticity tolerance for [`hermitian_expm`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Largest sector `hermitian_expm` will densify.
pub const MAX_DENSE_DIM: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    Raise,
    Lower,
}

/// Complex sparse matrix from one sector to another.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    domain: Arc<SectorBasis>,
    codomain: Arc<SectorBasis>,
    entries: Vec<(usize, usize, C64)>,
}

/// JSON export format: parallel arrays of row, column, real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorTriplets {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl SparseOperator {
    /// Canonicalizes arbitrary triplets. Panics on out-of-range indices.
    pub fn from_triplets(
        domain: Arc<SectorBasis>,
        codomain: Arc<SectorBasis>,
        triplets: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Self {
        let mut acc: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        for (r, c, v) in triplets {
            assert!(r < codomain.dim() && c < domain.dim(), "triplet ({r}, {c}) out of range");
            *acc.entry((r, c)).or_default() += v;
        }
        let entries = acc
            .into_iter()
            .filter(|(_, v)| *v != C64::new(0.0, 0.0))
            .map(|((r, c), v)| (r, c, v))
            .collect();
        Self { domain, codomain, entries }
    }

    pub fn zero(domain: Arc<SectorBasis>, codomain: Arc<SectorBasis>) -> Self {
        Self { domain, codomain, entries: Vec::new() }
    }

    pub fn identity(basis: Arc<SectorBasis>) -> Self {
        Self::diagonal(basis, |_| ONE)
    }

    /// Diagonal operator with entries `f(state)`.
    pub fn diagonal(basis: Arc<SectorBasis>, f: impl Fn(&OccupationState) -> C64) -> Self {
        let triplets: Vec<_> = basis.states().iter().enumerate().map(|(i, s)| (i, i, f(s))).collect();
        Self::from_triplets(basis.clone(), basis, triplets)
    }

    /// Normal-ordered monomial `coeff * a†_{c_1} ... a†_{c_k} a_{a_1} ... a_{a_m}`.
    pub fn monomial(
        domain: Arc<SectorBasis>,
        codomain: Arc<SectorBasis>,
        creations: &[usize],
        annihilations: &[usize],
        coeff: C64,
    ) -> Result<Self> {
        check_same_width(&domain, &codomain)?;
        let modes = domain.modes();
        for &m in creations.iter().chain(annihilations) {
            if m >= modes {
                return Err(Error::ModeOutOfRange { mode: m, modes });
            }
        }
        let mut triplets = Vec::new();
        for (col, state) in domain.states().iter().enumerate() {
            if let Some((image, amp)) = apply_monomial(state, creations, annihilations) {
                if let Some(row) = codomain.position(&image) {
                    triplets.push((row, col, coeff * amp));
                }
            }
        }
        Ok(Self::from_triplets(domain, codomain, triplets))
    }

    /// `sum_ij m[i][j] a†_i a_j` on a basis, as used by every Schwinger generator.
    pub fn bilinear(basis: Arc<SectorBasis>, m: &DMatrix<C64>) -> Result<Self> {
        let modes = basis.modes();
        if m.nrows() != modes || m.ncols() != modes {
            return Err(Error::ModeMismatch { expected: m.nrows(), found: modes });
        }
        let mut out = Self::zero(basis.clone(), basis.clone());
        for i in 0..modes {
            for j in 0..modes {
                if m[(i, j)] != C64::new(0.0, 0.0) {
                    let term = Self::monomial(basis.clone(), basis.clone(), &[i], &[j], m[(i, j)])?;
                    out = out.add(&term)?;
                }
            }
        }
        Ok(out)
    }

    pub fn domain(&self) -> &Arc<SectorBasis> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<SectorBasis> {
        &self.codomain
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_endomorphism(&self) -> bool {
        self.domain == self.codomain
    }

    /// Entry at `(row, col)`, zero when absent.
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries
            .binary_search_by(|(r, c, _)| (*r, *c).cmp(&(row, col)))
            .map(|k| self.entries[k].2)
            .unwrap_or_default()
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::SectorMismatch(format!(
                "{} -> {} vs {} -> {}",
                self.domain.spec(),
                self.codomain.spec(),
                other.domain.spec(),
                other.codomain.spec()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self::from_triplets(
            self.domain.clone(),
            self.codomain.clone(),
            self.entries.iter().chain(&other.entries).copied(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_triplets(
            self.domain.clone(),
            self.codomain.clone(),
            self.entries.iter().map(|&(r, c, v)| (r, c, v * s)),
        )
    }

    /// Composition `self * rhs` (apply `rhs` first).
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if rhs.codomain != self.domain {
            return Err(Error::SectorMismatch(format!(
                "cannot compose: inner codomain {} differs from outer domain {}",
                rhs.codomain.spec(),
                self.domain.spec()
            )));
        }
        // Row-major lookup of rhs by its row index, which is self's column index.
        let mut rhs_rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); rhs.codomain.dim()];
        for &(r, c, v) in &rhs.entries {
            rhs_rows[r].push((c, v));
        }
        let mut triplets = Vec::new();
        for &(r, k, a) in &self.entries {
            for &(c, b) in &rhs_rows[k] {
                triplets.push((r, c, a * b));
            }
        }
        Ok(Self::from_triplets(rhs.domain.clone(), self.codomain.clone(), triplets))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.codomain.clone(),
            self.domain.clone(),
            self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())),
        )
    }

    /// Largest entry magnitude; zero for the empty operator.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.2.norm()).fold(0.0, f64::max)
    }

    /// `max |A - A†|`; `None` when the operator is not an endomorphism.
    pub fn hermiticity_residual(&self) -> Option<f64> {
        if !self.is_endomorphism() {
            return None;
        }
        Some(self.sub(&self.adjoint()).expect("same shape").max_abs())
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries.iter().all(|(r, c, _)| r == c)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.codomain.dim(), self.domain.dim());
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn to_triplets(&self) -> OperatorTriplets {
        OperatorTriplets {
            rows: self.entries.iter().map(|e| e.0).collect(),
            cols: self.entries.iter().map(|e| e.1).collect(),
            re: self.entries.iter().map(|e| e.2.re).collect(),
            im: self.entries.iter().map(|e| e.2.im).collect(),
        }
    }
}

fn check_same_width(domain: &SectorBasis, codomain: &SectorBasis) -> Result<()> {
    if domain.modes() != codomain.modes() {
        return Err(Error::SectorMismatch(format!(
            "domain has {} modes, codomain {}",
            domain.modes(),
            codomain.modes()
        )));
    }
    Ok(())
}

/// Applies annihilators right to left, then creators; returns the image state and
/// the product of square-root factors, or `None` if the state is annihilated.
fn apply_monomial(
    state: &OccupationState,
    creations: &[usize],
    annihilations: &[usize],
) -> Option<(OccupationState, f64)> {
    let mut current = state.clone();
    let mut amp = 1.0f64;
    for &m in annihilations.iter().rev() {
        let n = current.count(m);
        if n == 0 {
            return None;
        }
        amp *= f64::from(n).sqrt();
        current = current.shifted(m, -1)?;
    }
    for &m in creations.iter().rev() {
        let n = current.count(m);
        amp *= f64::from(n + 1).sqrt();
        current = current.shifted(m, 1)?;
    }
    Some((current, amp))
}

/// Single-mode creation or annihilation operator between two sectors.
pub fn ladder(
    mode: usize,
    kind: LadderKind,
    domain: Arc<SectorBasis>,
    codomain: Arc<SectorBasis>,
) -> Result<SparseOperator> {
    check_same_width(&domain, &codomain)?;
    if mode >= domain.modes() {
        return Err(Error::ModeOutOfRange { mode, modes: domain.modes() });
    }
    let (creations, annihilations): (&[usize], &[usize]) = match kind {
        LadderKind::Raise => (&[mode][..], &[][..]),
        LadderKind::Lower => (&[][..], &[mode][..]),
    };
    let any_nonzero_image = domain
        .states()
        .iter()
        .any(|s| kind == LadderKind::Raise || s.count(mode) > 0);
    let op = SparseOperator::monomial(domain, codomain, creations, annihilations, ONE)?;
    if any_nonzero_image && op.nnz() == 0 {
        return Err(Error::SectorMismatch(format!(
            "codomain {} holds no image of mode {mode} {kind:?} on {}",
            op.codomain.spec(),
            op.domain.spec()
        )));
    }
    Ok(op)
}

/// Diagonal total number operator `sum_i N_i`, the Casimir `C`.
pub fn number_total(basis: Arc<SectorBasis>) -> SparseOperator {
    SparseOperator::diagonal(basis, |s| C64::new(s.total() as f64, 0.0))
}

/// Diagonal `N_mode`.
pub fn number(basis: Arc<SectorBasis>, mode: usize) -> Result<SparseOperator> {
    if mode >= basis.modes() {
        return Err(Error::ModeOutOfRange { mode, modes: basis.modes() });
    }
    Ok(SparseOperator::diagonal(basis, |s| C64::new(f64::from(s.count(mode)), 0.0)))
}

/// `AB - BA` for two endomorphisms of the same sector.
pub fn commutator(a: &SparseOperator, b: &SparseOperator) -> Result<SparseOperator> {
    if !a.is_endomorphism() || !b.is_endomorphism() || a.domain != b.domain {
        return Err(Error::SectorMismatch(
            "commutator needs endomorphisms of one sector".into(),
        ));
    }
    a.mul(b)?.sub(&b.mul(a)?)
}

/// Matrix-vector product.
pub fn apply(op: &SparseOperator, ket: &Ket) -> Result<Ket> {
    if **ket.basis() != *op.domain {
        return Err(Error::SectorMismatch(format!(
            "ket lives on {}, operator acts on {}",
            ket.basis().spec(),
            op.domain.spec()
        )));
    }
    let mut out = vec![C64::new(0.0, 0.0); op.codomain.dim()];
    let amps = ket.amplitudes();
    for &(r, c, v) in &op.entries {
        out[r] += v * amps[c];
    }
    Ok(Ket::from_parts(op.codomain.clone(), out))
}

/// `exp(i t H)` for Hermitian `H`, via the dense eigendecomposition.
pub fn hermitian_expm(h: &SparseOperator, t: f64) -> Result<DMatrix<C64>> {
    let residual = h.hermiticity_residual().ok_or_else(|| {
        Error::SectorMismatch("exponential needs an endomorphism".into())
    })?;
    let dim = h.domain.dim();
    if dim > MAX_DENSE_DIM {
        return Err(Error::DimensionTooLarge { dim, max: MAX_DENSE_DIM });
    }
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let dense = h.to_dense();
    // Exact symmetrization so the eigensolver sees a Hermitian matrix bit for bit.
    let dense = (&dense + dense.adjoint()).scale(0.5);
    let eig = dense.symmetric_eigen();
    let phases = eig.eigenvalues.map(|lambda| (I * (t * lambda)).exp());
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (mut col, phase) in scaled.column_iter_mut().zip(phases.iter()) {
        col *= *phase;
    }
    Ok(scaled * v.adjoint())
}

/// Dense matrix-vector product for kets, used with [`hermitian_expm`].
pub fn apply_dense(u: &DMatrix<C64>, ket: &Ket) -> Result<Ket> {
    if u.ncols() != ket.dim() || u.nrows() != ket.dim() {
        return Err(Error::SectorMismatch(format!(
            "dense {}x{} matrix vs ket of dimension {}",
            u.nrows(),
            u.ncols(),
            ket.dim()
        )));
    }
    let v = nalgebra::DVector::from_column_slice(ket.amplitudes());
    let out = u * v;
    Ok(Ket::from_parts(ket.basis().clone(), out.iter().copied().collect()))
}

/// Which Lie algebra a generator set realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Su2,
    Su3,
}

/// Real structure constants `f^{abc}`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    dim: usize,
    values: Vec<f64>,
}

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.values[(a * self.dim + b) * self.dim + c]
    }

    /// Largest violation of total antisymmetry.
    pub fn antisymmetry_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let f = self.get(a, b, c);
                    worst = worst
                        .max((f + self.get(b, a, c)).abs())
                        .max((f + self.get(a, c, b)).abs())
                        .max((f + self.get(c, b, a)).abs());
                }
            }
        }
        worst
    }
}

/// Pauli matrices or Gell-Mann matrices (not halved).
pub fn fundamental_matrices(group: Group) -> Vec<DMatrix<C64>> {
    let z = C64::new(0.0, 0.0);
    let r = |x: f64| C64::new(x, 0.0);
    match group {
        Group::Su2 => vec![
            DMatrix::from_row_slice(2, 2, &[z, ONE, ONE, z]),
            DMatrix::from_row_slice(2, 2, &[z, -I, I, z]),
            DMatrix::from_row_slice(2, 2, &[ONE, z, z, -ONE]),
        ],
        Group::Su3 => {
            let s = 1.0 / 3f64.sqrt();
            vec![
                DMatrix::from_row_slice(3, 3, &[z, ONE, z, ONE, z, z, z, z, z]),
                DMatrix::from_row_slice(3, 3, &[z, -I, z, I, z, z, z, z, z]),
                DMatrix::from_row_slice(3, 3, &[ONE, z, z, z, -ONE, z, z, z, z]),
                DMatrix::from_row_slice(3, 3, &[z, z, ONE, z, z, z, ONE, z, z]),
                DMatrix::from_row_slice(3, 3, &[z, z, -I, z, z, z, I, z, z]),
                DMatrix::from_row_slice(3, 3, &[z, z, z, z, z, ONE, z, ONE, z]),
                DMatrix::from_row_slice(3, 3, &[z, z, z, z, z, -I, z, I, z]),
                DMatrix::from_row_slice(3, 3, &[r(s), z, z, z, r(s), z, z, z, r(-2.0 * s)]),
            ]
        }
    }
}

/// `f^{abc} = -2i tr([T^a, T^b] T^c)` with `T = sigma/2` or `lambda/2`.
pub fn structure_constants_from_fundamental(group: Group) -> StructureConstants {
    let t: Vec<DMatrix<C64>> =
        fundamental_matrices(group).into_iter().map(|m| m.scale(0.5)).collect();
    let d = t.len();
    let mut values = vec![0.0; d * d * d];
    for a in 0..d {
        for b in 0..d {
            let comm = &t[a] * &t[b] - &t[b] * &t[a];
            for c in 0..d {
                let f = -2.0 * I * (&comm * &t[c]).trace();
                values[(a * d + b) * d + c] = f.re;
            }
        }
    }
    StructureConstants { dim: d, values }
}

fn levi_civita() -> StructureConstants {
    let mut values = vec![0.0; 27];
    for (a, b, c, s) in [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0), (1, 0, 2, -1.0), (2, 1, 0, -1.0), (0, 2, 1, -1.0)] {
        values[(a * 3 + b) * 3 + c] = s;
    }
    StructureConstants { dim: 3, values }
}

/// Operators realizing a Lie algebra on one sector, with the constants they obey.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub group: Group,
    pub generators: Vec<SparseOperator>,
    pub structure_constants: StructureConstants,
}

impl GeneratorSet {
    pub fn basis(&self) -> Option<&Arc<SectorBasis>> {
        self.generators.first().map(SparseOperator::domain)
    }

    /// `sum_a (T^a)^2`.
    pub fn quadratic_casimir(&self) -> Result<SparseOperator> {
        let basis = self
            .basis()
            .ok_or_else(|| Error::SectorMismatch("empty generator set".into()))?
            .clone();
        let mut acc = SparseOperator::zero(basis.clone(), basis);
        for g in &self.generators {
            acc = acc.add(&g.mul(g)?)?;
        }
        Ok(acc)
    }
}

fn schwinger_set(basis: Arc<SectorBasis>, group: Group, modes: usize) -> Result<GeneratorSet> {
    if basis.modes() != modes {
        return Err(Error::ModeMismatch { expected: modes, found: basis.modes() });
    }
    let generators = fundamental_matrices(group)
        .iter()
        .map(|m| SparseOperator::bilinear(basis.clone(), &m.scale(0.5)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneratorSet {
        group,
        generators,
        structure_constants: structure_constants_from_fundamental(group),
    })
}

/// `J^a = (1/2) a†_i sigma^a_ij a_j` on a two-mode basis.
pub fn su2_generators(basis: Arc<SectorBasis>) -> Result<GeneratorSet> {
    schwinger_set(basis, Group::Su2, 2)
}

/// `Q^a = (1/2) a†_i lambda^a_ij a_j` on a three-mode basis.
pub fn su3_generators(basis: Arc<SectorBasis>) -> Result<GeneratorSet> {
    schwinger_set(basis, Group::Su3, 3)
}

/// Three-oscillator angular momentum `J^i = -i eps_ijk a†_j a_k`.
pub fn eriksson_generators(basis: Arc<SectorBasis>) -> Result<GeneratorSet> {
    if basis.modes() != 3 {
        return Err(Error::ModeMismatch { expected: 3, found: basis.modes() });
    }
    let eps = levi_civita();
    let generators = (0..3)
        .map(|i| {
            let m = DMatrix::from_fn(3, 3, |j, k| -I * eps.get(i, j, k));
            SparseOperator::bilinear(basis.clone(), &m)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneratorSet { group: Group::Su2, generators, structure_constants: eps })
}

/// Cartan charges `Q_l = N_l - N_{l+1}`, `l = 1..N-1`.
pub fn sun_cartan_charges(basis: Arc<SectorBasis>) -> Result<Vec<SparseOperator>> {
    let modes = basis.modes();
    if modes < 2 {
        return Err(Error::ModeMismatch { expected: 2, found: modes });
    }
    Ok((0..modes - 1)
        .map(|l| {
            SparseOperator::diagonal(basis.clone(), |s| {
                C64::new(f64::from(s.count(l)) - f64::from(s.count(l + 1)), 0.0)
            })
        })
        .collect())
}

/// SU(3) hypercharge-type operator `N_1 + N_2 - 2 N_3`.
pub fn su3_hypercharge(basis: Arc<SectorBasis>) -> Result<SparseOperator> {
    if basis.modes() != 3 {
        return Err(Error::ModeMismatch { expected: 3, found: basis.modes() });
    }
    Ok(SparseOperator::diagonal(basis, |s| {
        C64::new(f64::from(s.count(0)) + f64::from(s.count(1)) - 2.0 * f64::from(s.count(2)), 0.0)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{enumerate_sector, SectorSpec};

    fn basis(spec: SectorSpec) -> Arc<SectorBasis> {
        Arc::new(enumerate_sector(&spec).unwrap())
    }

    fn occ(c: &[u32]) -> OccupationState {
        OccupationState::new(c.to_vec()).unwrap()
    }

    #[test]
    fn raising_the_vacuum() {
        let vac = basis(SectorSpec::fixed_total(2, 0));
        let one = basis(SectorSpec::fixed_total(2, 1));
        let a1d = ladder(0, LadderKind::Raise, vac.clone(), one.clone()).unwrap();
        assert_eq!(a1d.entries(), &[(0, 0, ONE)]);
        assert_eq!(one.state(0), &occ(&[1, 0]));
    }

    #[test]
    fn lowering_uses_sqrt_n() {
        let three = basis(SectorSpec::fixed_total(2, 3));
        let two = basis(SectorSpec::fixed_total(2, 2));
        let a1 = ladder(0, LadderKind::Lower, three.clone(), two.clone()).unwrap();
        let col = three.index_of(&occ(&[2, 1])).unwrap().unwrap();
        let row = two.index_of(&occ(&[1, 1])).unwrap().unwrap();
        assert!((a1.get(row, col) - C64::new(2f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn ladder_errors() {
        let b = basis(SectorSpec::fixed_total(2, 1));
        assert!(matches!(
            ladder(2, LadderKind::Raise, b.clone(), b.clone()),
            Err(Error::ModeOutOfRange { .. })
        ));
        assert!(matches!(
            ladder(0, LadderKind::Raise, b.clone(), b.clone()),
            Err(Error::SectorMismatch(_))
        ));
        let vac = basis(SectorSpec::fixed_total(2, 0));
        // Lowering the vacuum annihilates every state; nothing to mismatch.
        assert_eq!(ladder(0, LadderKind::Lower, vac.clone(), b).unwrap().nnz(), 0);
    }

    #[test]
    fn bosonic_commutator_on_truncated_space() {
        let b = basis(SectorSpec::plain_truncation(2, 4));
        let a1 = ladder(0, LadderKind::Lower, b.clone(), b.clone()).unwrap();
        let a1d = ladder(0, LadderKind::Raise, b.clone(), b.clone()).unwrap();
        let a2d = ladder(1, LadderKind::Raise, b.clone(), b.clone()).unwrap();
        let c11 = commutator(&a1, &a1d).unwrap();
        let c12 = commutator(&a1, &a2d).unwrap();
        for (i, s) in b.states().iter().enumerate() {
            if s.count(0) <= 3 {
                assert!((c11.get(i, i) - ONE).norm() < 1e-14, "{s}");
                for j in 0..b.dim() {
                    if j != i {
                        assert_eq!(c11.get(i, j), C64::default());
                    }
                }
            }
            if s.count(0) <= 3 && s.count(1) <= 3 {
                for j in 0..b.dim() {
                    assert!(c12.get(i, j).norm() < 1e-14);
                }
            }
        }
        // Only the boundary row n_1 = 4 deviates.
        let top = b.index_of(&occ(&[4, 0])).unwrap().unwrap();
        assert!((c11.get(top, top) - C64::new(-4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn number_operator_cases() {
        let b = basis(SectorSpec::fixed_total(2, 3));
        let n = number_total(b.clone());
        assert!(n.sub(&SparseOperator::identity(b).scale(C64::new(3.0, 0.0))).unwrap().max_abs() == 0.0);
        let c = basis(SectorSpec::su2_charge(1, 2));
        let n = number_total(c);
        let diag: Vec<f64> = (0..3).map(|i| n.get(i, i).re).collect();
        assert_eq!(diag, vec![1.0, 3.0, 5.0]);
        let vac = basis(SectorSpec::fixed_total(3, 0));
        assert_eq!(number_total(vac).nnz(), 0);
    }

    #[test]
    fn su2_fundamental_and_algebra() {
        let g = su2_generators(basis(SectorSpec::fixed_total(2, 1))).unwrap();
        let j3 = g.generators[2].to_dense();
        assert!((j3[(0, 0)].re - 0.5).abs() < 1e-15 && (j3[(1, 1)].re + 0.5).abs() < 1e-15);
        let b2 = basis(SectorSpec::fixed_total(2, 2));
        let g = su2_generators(b2.clone()).unwrap();
        let lhs = commutator(&g.generators[0], &g.generators[1]).unwrap();
        assert_eq!(lhs.sub(&g.generators[2].scale(I)).unwrap().max_abs(), 0.0);
        let jj = g.quadratic_casimir().unwrap();
        let target = SparseOperator::identity(b2).scale(C64::new(2.0, 0.0));
        assert!(jj.sub(&target).unwrap().max_abs() < 1e-12);
        assert!(su2_generators(basis(SectorSpec::fixed_total(3, 1))).is_err());
    }

    #[test]
    fn su3_fundamental_entries() {
        let g = su3_generators(basis(SectorSpec::fixed_total(3, 1))).unwrap();
        let q3 = g.generators[2].to_dense();
        let q8 = g.generators[7].to_dense();
        let s = 1.0 / (2.0 * 3f64.sqrt());
        for (k, (a, b)) in [(0.5, s), (-0.5, s), (0.0, -2.0 * s)].iter().enumerate() {
            assert!((q3[(k, k)].re - a).abs() < 1e-15);
            assert!((q8[(k, k)].re - b).abs() < 1e-15);
        }
        // 2 Q^1 swaps |100> and |010>.
        let q1 = g.generators[0].scale(C64::new(2.0, 0.0)).to_dense();
        assert_eq!(q1[(0, 1)], ONE);
        assert_eq!(q1[(1, 0)], ONE);
        assert_eq!(q1[(2, 2)], C64::default());
        let b2 = basis(SectorSpec::fixed_total(3, 2));
        let c = number_total(b2.clone());
        for q in su3_generators(b2).unwrap().generators {
            assert_eq!(commutator(&c, &q).unwrap().max_abs(), 0.0);
            assert!(q.hermiticity_residual().unwrap() < 1e-15);
        }
    }

    #[test]
    fn structure_constants() {
        let f2 = structure_constants_from_fundamental(Group::Su2);
        assert_eq!(f2, levi_civita());
        let f3 = structure_constants_from_fundamental(Group::Su3);
        assert!((f3.get(0, 1, 2) - 1.0).abs() < 1e-14);
        // f^{458} = sqrt(3)/2
        assert!((f3.get(3, 4, 7) - 3f64.sqrt() / 2.0).abs() < 1e-14);
        assert!((f3.get(0, 3, 6) - 0.5).abs() < 1e-14);
        assert!(f3.antisymmetry_residual() < 1e-13);
    }

    #[test]
    fn commutator_cases() {
        let b = basis(SectorSpec::fixed_total(2, 4));
        let g = su2_generators(b.clone()).unwrap();
        assert_eq!(commutator(&g.generators[2], &g.generators[2]).unwrap().nnz(), 0);
        let r = commutator(&g.generators[0], &g.generators[1]).unwrap();
        assert!(r.sub(&g.generators[2].scale(I)).unwrap().max_abs() < 1e-14);

        let t = basis(SectorSpec::plain_truncation(2, 3));
        let n1 = number(t.clone(), 0).unwrap();
        let hop = SparseOperator::monomial(t.clone(), t.clone(), &[0], &[1], ONE).unwrap();
        let c = commutator(&n1, &hop).unwrap();
        assert!(c.sub(&hop).unwrap().max_abs() < 1e-14);

        let other = basis(SectorSpec::fixed_total(2, 3));
        assert!(commutator(&n1, &number_total(other)).is_err());
    }

    #[test]
    fn expm_cases() {
        let b = basis(SectorSpec::fixed_total(2, 1));
        let g = su2_generators(b.clone()).unwrap();
        let u = hermitian_expm(&g.generators[1], 0.0).unwrap();
        assert!((u - DMatrix::identity(2, 2)).camax() < 1e-15);
        // exp(i pi sigma_y / 2) = i sigma_y: |1,0> -> -|0,1>.
        let u = hermitian_expm(&g.generators[1], std::f64::consts::PI).unwrap();
        assert!(u[(0, 0)].norm() < 1e-15);
        assert!((u[(1, 0)] + ONE).norm() < 1e-15);
        assert!((u[(0, 1)] - ONE).norm() < 1e-15);

        let hop = SparseOperator::monomial(b.clone(), b.clone(), &[0], &[1], ONE).unwrap();
        assert!(matches!(hermitian_expm(&hop, 1.0), Err(Error::NotHermitian { .. })));
        let big = basis(SectorSpec::fixed_total(2, 2000));
        assert!(matches!(
            hermitian_expm(&number_total(big), 1.0),
            Err(Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn expm_is_unitary() {
        let b = basis(SectorSpec::fixed_total(2, 6));
        let g = su2_generators(b).unwrap();
        for theta in [0.37, 1.9, -2.6, 5.1] {
            let u = hermitian_expm(&g.generators[1], theta).unwrap();
            let r = (u.adjoint() * &u - DMatrix::<C64>::identity(7, 7)).camax();
            assert!(r <= 1e-11, "theta = {theta}: {r}");
        }
    }

    #[test]
    fn cartan_charges() {
        let b = basis(SectorSpec::fixed_total(4, 4));
        let q = sun_cartan_charges(b.clone()).unwrap();
        let i = b.index_of(&occ(&[2, 1, 1, 0])).unwrap().unwrap();
        let vals: Vec<f64> = q.iter().map(|op| op.get(i, i).re).collect();
        assert_eq!(vals, vec![1.0, 0.0, 1.0]);
        for a in &q {
            for c in &q {
                assert_eq!(commutator(a, c).unwrap().nnz(), 0);
            }
        }
        let b3 = basis(SectorSpec::fixed_total(3, 3));
        let q = sun_cartan_charges(b3.clone()).unwrap();
        let hyper = q[0].add(&q[1].scale(C64::new(2.0, 0.0))).unwrap();
        assert_eq!(hyper.sub(&su3_hypercharge(b3).unwrap()).unwrap().max_abs(), 0.0);
        let b2 = basis(SectorSpec::fixed_total(2, 3));
        let q = sun_cartan_charges(b2.clone()).unwrap();
        let j3 = &su2_generators(b2).unwrap().generators[2];
        assert!(q[0].sub(&j3.scale(C64::new(2.0, 0.0))).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn eriksson_matches_su3_generators() {
        let b = basis(SectorSpec::fixed_total(3, 2));
        let e = eriksson_generators(b.clone()).unwrap();
        let q = su3_generators(b.clone()).unwrap().generators;
        let two = C64::new(2.0, 0.0);
        assert!(e.generators[0].sub(&q[6].scale(two)).unwrap().max_abs() < 1e-15);
        assert!(e.generators[1].sub(&q[4].scale(-two)).unwrap().max_abs() < 1e-15);
        assert!(e.generators[2].sub(&q[1].scale(two)).unwrap().max_abs() < 1e-15);
        let lhs = commutator(&e.generators[0], &e.generators[1]).unwrap();
        assert!(lhs.sub(&e.generators[2].scale(I)).unwrap().max_abs() < 1e-14);
        let c = number_total(b);
        for j in &e.generators {
            assert_eq!(commutator(&c, j).unwrap().nnz(), 0);
        }
    }

    #[test]
    fn triplets_export() {
        let b = basis(SectorSpec::fixed_total(2, 1));
        let j2 = &su2_generators(b).unwrap().generators[1];
        let t = j2.to_triplets();
        assert_eq!(t.rows, vec![0, 1]);
        assert_eq!(t.cols, vec![1, 0]);
        assert_eq!(t.im, vec![-0.5, 0.5]);
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.starts_with(r#"{"rows":[0,1],"cols":[1,0],"re":"#));
    }
}
