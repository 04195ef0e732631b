//! The Rashba spin-boson Hamiltonian on a truncated basis, built twice:
//! directly from ladder and Pauli operators, and from the osp(2,2)
//! generators. Both must agree entrywise.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fock::{
    boson_operators, commutator, interior_projector, osp22_generators, pauli_operators, BasisState,
    FockBasis, Osp22Set, TruncatedOperator,
};
use crate::params::DimensionlessParams;

/// A half-integer eigenvalue of `K = N − σ₀/2`, stored as `2K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KValue(i64);

impl KValue {
    pub fn from_twice(twice: i64) -> Self {
        debug_assert!(twice % 2 != 0, "K is always half-integer");
        Self(twice)
    }

    pub fn of(state: BasisState) -> Self {
        Self(2 * (state.n1 as i64 - state.n2 as i64) - state.spin.sigma0())
    }

    /// Sector holding spin-up states with `n₁ − n₂ = m` and spin-down states
    /// with `n₁ − n₂ = m + 1`, i.e. `K = m + 1/2`.
    pub fn from_offset(m: i64) -> Self {
        Self(2 * m + 1)
    }

    pub fn offset(self) -> i64 {
        (self.0 - 1).div_euclid(2)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for KValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2", self.0)
    }
}

impl Serialize for KValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.as_f64())
    }
}

/// Ladder-operator form in units of `ħω`:
/// `(n₁ + n₂ + 1) + (r/2)(n₁ − n₂) − κ[(a₂⁺ − a₁)σ₊ + (a₂ − a₁⁺)σ₋] + b·σ₀`.
pub fn build_direct(basis: FockBasis, p: &DimensionlessParams) -> TruncatedOperator {
    let a = boson_operators(basis);
    let s = pauli_operators(basis);
    let id = TruncatedOperator::identity(basis);
    let n1 = &a.a1_dag * &a.a1;
    let n2 = &a.a2_dag * &a.a2;
    let (r, b, kappa) = (p.r_f64(), p.b_f64(), p.kappa_f64());

    let oscillator = &(&n1 + &n2) + &id;
    let cyclotron = (&n1 - &n2).scale(0.5 * r);
    let coupling = &(&(&a.a2_dag - &a.a1) * &s.raising) + &(&(&a.a2 - &a.a1_dag) * &s.lowering);
    let zeeman = s.diagonal.scale(b);
    &(&(&oscillator + &cyclotron) - &coupling.scale(kappa)) + &zeeman
}

/// Generator form in units of `ħω`: `2J₀ + (r/2)N − κ[V₊ − V₋ + W₋ − W₊] + 2b(N − K)`.
pub fn build_algebraic(g: &Osp22Set, p: &DimensionlessParams) -> TruncatedOperator {
    let (r, b, kappa) = (p.r_f64(), p.b_f64(), p.kappa_f64());
    let odd = &(&(&g.v_plus - &g.v_minus) + &g.w_minus) - &g.w_plus;
    let zeeman = (&g.number - &g.conserved).scale(2.0 * b);
    &(&(&g.j_zero.scale(2.0) + &g.number.scale(0.5 * r)) - &odd.scale(kappa)) + &zeeman
}

#[derive(Clone, Debug)]
pub struct HamiltonianPair {
    pub direct: TruncatedOperator,
    pub algebraic: TruncatedOperator,
    pub params: DimensionlessParams,
    pub basis: FockBasis,
    generators: Osp22Set,
}

pub fn build_pair(basis: FockBasis, p: &DimensionlessParams) -> HamiltonianPair {
    let generators = osp22_generators(basis);
    HamiltonianPair {
        direct: build_direct(basis, p),
        algebraic: build_algebraic(&generators, p),
        params: p.clone(),
        basis,
        generators,
    }
}

impl HamiltonianPair {
    pub fn generators(&self) -> &Osp22Set {
        &self.generators
    }

    /// Largest `|H_direct − H_algebraic|` entry seen from the interior.
    pub fn max_difference(&self, margin: usize) -> Result<f64> {
        let p = interior_projector(self.basis, margin)?;
        Ok((&self.direct - &self.algebraic).max_abs_projected(&p))
    }

    /// `‖[K, H]·P_interior‖_max`
    pub fn conserved_commutator_residual(&self, margin: usize) -> Result<f64> {
        let p = interior_projector(self.basis, margin)?;
        Ok(commutator(&self.generators.conserved, &self.direct)?.max_abs_projected(&p))
    }
}

/// One conserved-`K` block of the truncated Hamiltonian.
#[derive(Clone, Debug)]
pub struct KSector {
    pub k_value: KValue,
    /// All basis indices carrying this `K`, in basis order.
    pub member_indices: Vec<usize>,
    /// Members within `margin` of the truncation, where the coupling reaches
    /// states that were cut away.
    pub edge_indices: Vec<usize>,
    /// `H` restricted to `member_indices`.
    pub h_block: DMatrix<Complex64>,
}

impl KSector {
    pub fn dimension(&self) -> usize {
        self.member_indices.len()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(self.h_block.clone())
    }

    /// The block with the edge rows and columns removed.
    pub fn interior_block(&self) -> DMatrix<Complex64> {
        let keep: Vec<usize> = self
            .member_indices
            .iter()
            .enumerate()
            .filter(|(_, idx)| !self.edge_indices.contains(idx))
            .map(|(pos, _)| pos)
            .collect();
        DMatrix::from_fn(keep.len(), keep.len(), |i, k| self.h_block[(keep[i], keep[k])])
    }

    pub fn summary(&self, lowest: usize) -> SectorSummary {
        let mut ev = self.eigenvalues();
        ev.truncate(lowest);
        SectorSummary {
            k_value: self.k_value,
            dimension: self.dimension(),
            lowest_eigenvalues: ev,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorSummary {
    pub k_value: KValue,
    pub dimension: usize,
    pub lowest_eigenvalues: Vec<f64>,
}

/// Sorted eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Partitions the basis by the exact label `2K = 2(n₁ − n₂) − σ₀` and cuts
/// the Hamiltonian into the corresponding blocks, ordered by `K`.
pub fn k_sectors(pair: &HamiltonianPair, margin: usize) -> Result<Vec<KSector>> {
    if margin < 1 {
        return Err(Error::InvalidArgument("sector margin must be >= 1".into()));
    }
    let basis = pair.basis;
    if margin > basis.n1_max().min(basis.n2_max()) {
        return Err(Error::MarginTooLarge { margin, basis });
    }
    let mut groups: BTreeMap<KValue, Vec<usize>> = BTreeMap::new();
    for (i, s) in basis.states().enumerate() {
        groups.entry(KValue::of(s)).or_default().push(i);
    }
    let h = pair.direct.entries();
    Ok(groups
        .into_iter()
        .map(|(k_value, members)| {
            let edge_indices = members
                .iter()
                .copied()
                .filter(|&i| {
                    let s = basis.state(i);
                    s.n1 + margin > basis.n1_max() || s.n2 + margin > basis.n2_max()
                })
                .collect();
            let h_block = DMatrix::from_fn(members.len(), members.len(), |a, c| h[(members[a], members[c])]);
            KSector { k_value, member_indices: members, edge_indices, h_block }
        })
        .collect())
}

/// Closed-form decoupled energy `n₁ + n₂ + 1 + (r/2)(n₁ − n₂) + b·σ₀`.
pub fn decoupled_energy(state: BasisState, r: f64, b: f64) -> f64 {
    let (n1, n2) = (state.n1 as f64, state.n2 as f64);
    n1 + n2 + 1.0 + 0.5 * r * (n1 - n2) + b * state.spin.sigma0() as f64
}

/// True when both states carry the same `K`.
pub fn same_sector(a: BasisState, b: BasisState) -> bool {
    KValue::of(a) == KValue::of(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Spin;

    fn params(r: &str, b: &str, k: &str) -> DimensionlessParams {
        DimensionlessParams::parse(r, b, k).unwrap()
    }

    #[test]
    fn decoupled_isotropic_is_diagonal() {
        let basis = FockBasis::square(4);
        let pair = build_pair(basis, &params("0", "0", "0"));
        for (i, s) in basis.states().enumerate() {
            for k in 0..basis.dim() {
                let expected = if i == k { (s.n1 + s.n2 + 1) as f64 } else { 0.0 };
                assert!((pair.direct.entries()[(i, k)] - Complex64::new(expected, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn coupling_matrix_element() {
        let basis = FockBasis::square(3);
        let pair = build_pair(basis, &params("1/2", "1/4", "3/10"));
        let bra = BasisState::new(0, 1, Spin::Up);
        let ket = BasisState::new(0, 0, Spin::Down);
        assert!((pair.direct.element(bra, ket).re + 0.3).abs() < 1e-15);
        let bra = BasisState::new(1, 0, Spin::Down);
        let ket = BasisState::new(0, 0, Spin::Up);
        assert!((pair.direct.element(bra, ket).re - 0.3).abs() < 1e-15);
    }

    #[test]
    fn double_build_agrees() {
        let pair = build_pair(FockBasis::square(6), &params("1/2", "1/4", "3/10"));
        assert!(pair.max_difference(2).unwrap() < 1e-13);
        assert!(pair.direct.hermiticity_defect() < 1e-13);
        assert!(pair.algebraic.hermiticity_defect() < 1e-13);
    }

    #[test]
    fn k_values_of_low_states() {
        assert_eq!(KValue::of(BasisState::new(0, 0, Spin::Up)), KValue::from_twice(1));
        assert_eq!(KValue::of(BasisState::new(1, 0, Spin::Down)), KValue::from_twice(1));
        assert_eq!(KValue::from_offset(-3).offset(), -3);
        assert_eq!(KValue::from_offset(2).as_f64(), 2.5);
    }

    #[test]
    fn sectors_partition_and_decouple() {
        let basis = FockBasis::square(5);
        let pair = build_pair(basis, &params("1/3", "-1/5", "7/10"));
        let sectors = k_sectors(&pair, 1).unwrap();
        // n1 - n2 spans -5..=5 for each spin, giving 2K in -11..=11.
        assert_eq!(sectors.len(), 12);
        let mut seen: Vec<usize> = sectors.iter().flat_map(|s| s.member_indices.clone()).collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..basis.dim()).collect::<Vec<_>>());

        for (i, a) in basis.states().enumerate() {
            for (k, b) in basis.states().enumerate() {
                if !same_sector(a, b) {
                    assert_eq!(pair.direct.entries()[(i, k)], Complex64::new(0.0, 0.0));
                }
            }
        }
        assert!(pair.conserved_commutator_residual(1).unwrap() < 1e-13);

        let mut union: Vec<f64> = sectors.iter().flat_map(KSector::eigenvalues).collect();
        union.sort_by(f64::total_cmp);
        let full = hermitian_eigenvalues(pair.direct.entries().clone());
        for (a, b) in union.iter().zip(&full) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn edge_rows_are_tagged() {
        let basis = FockBasis::square(3);
        let pair = build_pair(basis, &params("0", "0", "1"));
        let sectors = k_sectors(&pair, 1).unwrap();
        let half = sectors.iter().find(|s| s.k_value == KValue::from_twice(1)).unwrap();
        // Members: up (n,n) for n <= 3 and down (n+1,n) for n <= 2.
        assert_eq!(half.dimension(), 7);
        assert_eq!(half.edge_indices.len(), 2);
        assert_eq!(half.interior_block().nrows(), 5);
    }

    #[test]
    fn decoupled_closed_form() {
        let basis = FockBasis::square(4);
        let p = params("3/5", "2/7", "0");
        let pair = build_pair(basis, &p);
        let mut expected: Vec<f64> = basis.states().map(|s| decoupled_energy(s, 0.6, 2.0 / 7.0)).collect();
        expected.sort_by(f64::total_cmp);
        let got = hermitian_eigenvalues(pair.direct.entries().clone());
        for (a, b) in got.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
