//! Constrained multimode Fock bases.
//!
//! A [`SectorBasis`] enumerates the occupation states `|n_1, ..., n_N>` selected
//! by a [`SectorSpec`]. States are ordered by total occupation, then in
//! descending lexicographic order of the counts, so `FixedTotal(2)` on two modes
//! reads `|2,0>, |1,1>, |0,2>` and every charge ladder runs up its rungs.

use std::cmp::Reverse;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boson counts per mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OccupationState(Vec<u32>);

impl OccupationState {
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidSpec("occupation state needs at least one mode".into()));
        }
        Ok(Self(counts))
    }

    /// Builds a state from signed counts, returning `None` if any is negative.
    pub fn from_signed(counts: &[i64]) -> Option<Self> {
        counts
            .iter()
            .map(|&c| u32::try_from(c).ok())
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn count(&self, mode: usize) -> u32 {
        self.0[mode]
    }

    /// Copy with `delta` added to one mode's count; `None` if it would go negative.
    pub fn shifted(&self, mode: usize, delta: i64) -> Option<Self> {
        let next = i64::from(self.0[mode]) + delta;
        let next = u32::try_from(next).ok()?;
        let mut counts = self.0.clone();
        counts[mode] = next;
        Some(Self(counts))
    }

    fn sort_key(&self) -> (u64, Reverse<&[u32]>) {
        (self.total(), Reverse(self.0.as_slice()))
    }
}

impl fmt::Display for OccupationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ">")
    }
}

/// The conserved-quantity constraint selecting a sector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    /// Total occupation fixed to `n`.
    FixedTotal { n: u32 },
    /// Two modes with `n_1 - n_2 = q`, ladder rungs `r = 0..=r_max`.
    /// For `q >= 0` the rungs are `|q+r, r>`; for `q < 0` they are `|r, r-q>`.
    Su2Charge { q: i64, r_max: u32 },
    /// Three modes on the ladder `|p+l, p+l-q, p>`, `p = 0..=p_max`.
    Su3ChargeHyper { q: i64, l: i64, p_max: u32 },
    /// `N` modes with `n_i - n_{i+1} = q_i`, `n_N = 0..=cutoff`.
    SunCharges { charges: Vec<i64>, cutoff: u32 },
    /// Every mode capped at `n_max` bosons.
    PlainTruncation { n_max: u32 },
}

/// Mode count plus constraint. Serializes as `{"modes": N, "kind": ..., params}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SectorSpec {
    #[serde(rename = "modes")]
    pub mode_count: usize,
    #[serde(flatten)]
    pub constraint: Constraint,
}

impl SectorSpec {
    pub fn fixed_total(modes: usize, n: u32) -> Self {
        Self { mode_count: modes, constraint: Constraint::FixedTotal { n } }
    }

    pub fn su2_charge(q: i64, r_max: u32) -> Self {
        Self { mode_count: 2, constraint: Constraint::Su2Charge { q, r_max } }
    }

    pub fn su3_charge_hyper(q: i64, l: i64, p_max: u32) -> Self {
        Self { mode_count: 3, constraint: Constraint::Su3ChargeHyper { q, l, p_max } }
    }

    pub fn sun_charges(charges: Vec<i64>, cutoff: u32) -> Self {
        Self { mode_count: charges.len() + 1, constraint: Constraint::SunCharges { charges, cutoff } }
    }

    pub fn plain_truncation(modes: usize, n_max: u32) -> Self {
        Self { mode_count: modes, constraint: Constraint::PlainTruncation { n_max } }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode_count == 0 {
            return Err(Error::InvalidSpec("mode count must be at least 1".into()));
        }
        let want_modes = |n: usize| {
            if self.mode_count == n {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!(
                    "{:?} needs {n} modes, got {}",
                    self.constraint, self.mode_count
                )))
            }
        };
        match &self.constraint {
            Constraint::FixedTotal { .. } | Constraint::PlainTruncation { .. } => Ok(()),
            Constraint::Su2Charge { .. } => want_modes(2),
            Constraint::Su3ChargeHyper { q, l, .. } => {
                want_modes(3)?;
                if *l < 0 || l < q {
                    return Err(Error::InvalidSpec(format!(
                        "SU(3) ladder needs l >= max(0, q), got q = {q}, l = {l}"
                    )));
                }
                Ok(())
            }
            Constraint::SunCharges { charges, .. } => {
                if charges.is_empty() {
                    return Err(Error::InvalidSpec("SU(N) charges need N >= 2".into()));
                }
                want_modes(charges.len() + 1)?;
                let mut partial = 0i64;
                for (i, q) in charges.iter().enumerate().rev() {
                    partial += q;
                    if partial < 0 {
                        return Err(Error::InvalidSpec(format!(
                            "partial charge sum from index {} is {partial} < 0",
                            i + 1
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Offsets `n_i - n_N` of an SU(N) ladder, one per mode.
    fn sun_offsets(charges: &[i64]) -> Vec<i64> {
        let mut offsets = vec![0i64; charges.len() + 1];
        for i in (0..charges.len()).rev() {
            offsets[i] = offsets[i + 1] + charges[i];
        }
        offsets
    }

    /// Whether `occ` lies in this sector.
    pub fn contains(&self, occ: &OccupationState) -> bool {
        if occ.modes() != self.mode_count {
            return false;
        }
        let c: Vec<i64> = occ.counts().iter().map(|&x| i64::from(x)).collect();
        match &self.constraint {
            Constraint::FixedTotal { n } => occ.total() == u64::from(*n),
            Constraint::PlainTruncation { n_max } => occ.counts().iter().all(|x| x <= n_max),
            Constraint::Su2Charge { q, r_max } => {
                let rung = if *q >= 0 { c[1] } else { c[0] };
                c[0] - c[1] == *q && rung <= i64::from(*r_max)
            }
            Constraint::Su3ChargeHyper { q, l, p_max } => {
                let p = c[2];
                p <= i64::from(*p_max) && c[0] == p + l && c[1] == p + l - q
            }
            Constraint::SunCharges { charges, cutoff } => {
                let last = c[c.len() - 1];
                last <= i64::from(*cutoff)
                    && Self::sun_offsets(charges)
                        .iter()
                        .zip(&c)
                        .all(|(off, ni)| *ni == last + off)
            }
        }
    }
}

impl fmt::Display for SectorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.constraint {
            Constraint::FixedTotal { n } => write!(f, "FixedTotal(n={n}, N={})", self.mode_count),
            Constraint::Su2Charge { q, r_max } => write!(f, "SU2Charge(q={q}, r_max={r_max})"),
            Constraint::Su3ChargeHyper { q, l, p_max } => {
                write!(f, "SU3ChargeHyper(q={q}, l={l}, p_max={p_max})")
            }
            Constraint::SunCharges { charges, cutoff } => {
                write!(f, "SUNCharges(q={charges:?}, cutoff={cutoff})")
            }
            Constraint::PlainTruncation { n_max } => {
                write!(f, "PlainTruncation(n_max={n_max}, N={})", self.mode_count)
            }
        }
    }
}

/// Ordered enumeration of a sector with a reverse index.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    spec: SectorSpec,
    states: Vec<OccupationState>,
    index: HashMap<OccupationState, usize>,
}

impl PartialEq for SectorBasis {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl SectorBasis {
    pub fn spec(&self) -> &SectorSpec {
        &self.spec
    }

    pub fn states(&self) -> &[OccupationState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &OccupationState {
        &self.states[i]
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn modes(&self) -> usize {
        self.spec.mode_count
    }

    /// Position of `occ`, or `None` when it is outside the sector.
    pub fn index_of(&self, occ: &OccupationState) -> Result<Option<usize>> {
        if occ.modes() != self.modes() {
            return Err(Error::ModeMismatch { expected: self.modes(), found: occ.modes() });
        }
        Ok(self.index.get(occ).copied())
    }

    /// Lookup without the mode check, for callers that already hold a state of
    /// the right width.
    pub(crate) fn position(&self, occ: &OccupationState) -> Option<usize> {
        self.index.get(occ).copied()
    }

    /// Largest total occupation of any state.
    pub fn max_total(&self) -> u64 {
        self.states.iter().map(OccupationState::total).max().unwrap_or(0)
    }
}

/// Enumerates the states of `spec` in canonical order.
pub fn enumerate_sector(spec: &SectorSpec) -> Result<SectorBasis> {
    spec.validate()?;
    let modes = spec.mode_count;
    let states: Vec<OccupationState> = match &spec.constraint {
        Constraint::FixedTotal { n } => {
            let mut out = Vec::new();
            let mut counts = vec![0u32; modes];
            compositions_desc(*n, 0, &mut counts, &mut out);
            out
        }
        Constraint::PlainTruncation { n_max } => {
            let side = *n_max as usize + 1;
            let total = side.checked_pow(modes as u32).ok_or_else(|| {
                Error::InvalidSpec(format!("truncated space {side}^{modes} is too large"))
            })?;
            let mut out: Vec<OccupationState> = (0..total)
                .map(|mut k| {
                    let mut counts = vec![0u32; modes];
                    for c in counts.iter_mut().rev() {
                        *c = (k % side) as u32;
                        k /= side;
                    }
                    OccupationState(counts)
                })
                .collect();
            out.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
            out
        }
        Constraint::Su2Charge { q, r_max } => (0..=i64::from(*r_max))
            .map(|r| {
                let counts = if *q >= 0 { [q + r, r] } else { [r, r - q] };
                OccupationState::from_signed(&counts).expect("validated ladder")
            })
            .collect(),
        Constraint::Su3ChargeHyper { q, l, p_max } => (0..=i64::from(*p_max))
            .map(|p| OccupationState::from_signed(&[p + l, p + l - q, p]).expect("validated ladder"))
            .collect(),
        Constraint::SunCharges { charges, cutoff } => {
            let offsets = SectorSpec::sun_offsets(charges);
            (0..=i64::from(*cutoff))
                .map(|last| {
                    let counts: Vec<i64> = offsets.iter().map(|o| last + o).collect();
                    OccupationState::from_signed(&counts).expect("validated ladder")
                })
                .collect()
        }
    };
    let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    Ok(SectorBasis { spec: spec.clone(), states, index })
}

fn compositions_desc(remaining: u32, mode: usize, counts: &mut [u32], out: &mut Vec<OccupationState>) {
    if mode + 1 == counts.len() {
        counts[mode] = remaining;
        out.push(OccupationState(counts.to_vec()));
        return;
    }
    for c in (0..=remaining).rev() {
        counts[mode] = c;
        compositions_desc(remaining - c, mode + 1, counts, out);
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Sector dimension from its closed form, without enumerating.
pub fn sector_dimension(spec: &SectorSpec) -> Result<usize> {
    spec.validate()?;
    let modes = spec.mode_count as u64;
    let dim = match &spec.constraint {
        Constraint::FixedTotal { n } => binomial(u64::from(*n) + modes - 1, modes - 1),
        Constraint::PlainTruncation { n_max } => (u64::from(*n_max) + 1).pow(modes as u32),
        Constraint::Su2Charge { r_max, .. } => u64::from(*r_max) + 1,
        Constraint::Su3ChargeHyper { p_max, .. } => u64::from(*p_max) + 1,
        Constraint::SunCharges { cutoff, .. } => u64::from(*cutoff) + 1,
    };
    Ok(dim as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn occ(c: &[u32]) -> OccupationState {
        OccupationState::new(c.to_vec()).unwrap()
    }

    #[test]
    fn fixed_total_two_modes_ordering() {
        let b = enumerate_sector(&SectorSpec::fixed_total(2, 2)).unwrap();
        assert_eq!(b.states(), &[occ(&[2, 0]), occ(&[1, 1]), occ(&[0, 2])]);
        assert_eq!(b.index_of(&occ(&[1, 1])).unwrap(), Some(1));
        assert_eq!(b.index_of(&occ(&[2, 1])).unwrap(), None);
        assert!(matches!(b.index_of(&occ(&[1, 1, 0])), Err(Error::ModeMismatch { .. })));
    }

    #[test]
    fn closed_form_dimensions() {
        assert_eq!(enumerate_sector(&SectorSpec::fixed_total(3, 2)).unwrap().dim(), 6);
        assert_eq!(sector_dimension(&SectorSpec::fixed_total(2, 5)).unwrap(), 6);
        assert_eq!(sector_dimension(&SectorSpec::su3_charge_hyper(1, 2, 4)).unwrap(), 5);
        assert_eq!(sector_dimension(&SectorSpec::fixed_total(4, 3)).unwrap(), 20);
    }

    #[test]
    fn fixed_total_matches_brute_force() {
        for modes in 1..=5usize {
            for n in 0..=6u32 {
                let spec = SectorSpec::fixed_total(modes, n);
                let side = n as usize + 1;
                let brute = (0..side.pow(modes as u32))
                    .filter(|&k| {
                        let mut k = k;
                        let mut s = 0;
                        for _ in 0..modes {
                            s += k % side;
                            k /= side;
                        }
                        s == n as usize
                    })
                    .count();
                assert_eq!(sector_dimension(&spec).unwrap(), brute);
                assert_eq!(enumerate_sector(&spec).unwrap().dim(), brute);
            }
        }
    }

    #[test]
    fn charge_ladders() {
        let b = enumerate_sector(&SectorSpec::su2_charge(3, 0)).unwrap();
        assert_eq!(b.states(), &[occ(&[3, 0])]);
        let b = enumerate_sector(&SectorSpec::su2_charge(1, 2)).unwrap();
        assert_eq!(b.states(), &[occ(&[1, 0]), occ(&[2, 1]), occ(&[3, 2])]);
        assert_eq!(b.index_of(&occ(&[2, 1])).unwrap(), Some(1));
        let b = enumerate_sector(&SectorSpec::su2_charge(-2, 1)).unwrap();
        assert_eq!(b.states(), &[occ(&[0, 2]), occ(&[1, 3])]);
        let b = enumerate_sector(&SectorSpec::su3_charge_hyper(-1, 0, 1)).unwrap();
        assert_eq!(b.states(), &[occ(&[0, 1, 0]), occ(&[1, 2, 1])]);
        let b = enumerate_sector(&SectorSpec::sun_charges(vec![1, 0, 1], 1)).unwrap();
        assert_eq!(b.states(), &[occ(&[2, 1, 1, 0]), occ(&[3, 2, 2, 1])]);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(enumerate_sector(&SectorSpec::su3_charge_hyper(2, 1, 3)).is_err());
        assert!(enumerate_sector(&SectorSpec::su3_charge_hyper(0, -1, 3)).is_err());
        assert!(enumerate_sector(&SectorSpec::sun_charges(vec![1, -2], 3)).is_err());
        assert!(enumerate_sector(&SectorSpec::sun_charges(vec![-1, 1], 3)).is_ok());
        let bad = SectorSpec { mode_count: 3, constraint: Constraint::Su2Charge { q: 0, r_max: 1 } };
        assert!(enumerate_sector(&bad).is_err());
    }

    #[test]
    fn plain_truncation_is_graded() {
        let b = enumerate_sector(&SectorSpec::plain_truncation(2, 1)).unwrap();
        assert_eq!(b.states(), &[occ(&[0, 0]), occ(&[1, 0]), occ(&[0, 1]), occ(&[1, 1])]);
    }

    #[test]
    fn spec_json_shape() {
        let spec = SectorSpec::su3_charge_hyper(1, 2, 4);
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"modes":3,"kind":"su3_charge_hyper","q":1,"l":2,"p_max":4}"#);
        let back: SectorSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }
}
