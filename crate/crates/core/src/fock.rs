//! Truncated two-mode Fock space ⊗ spin-½ and the osp(2,2) generators.
//!
//! States `|n₁, n₂, s⟩` are enumerated with `n₁` slowest and the spin last,
//! spin-up first. Ladder operators are cut at `n_max`, so canonical relations
//! fail on the top rung; relation checks are therefore judged on an interior
//! projector that keeps a margin away from the cut.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    /// Eigenvalue of `σ₀ = diag(−1, 1)`.
    pub fn sigma0(self) -> i64 {
        match self {
            Spin::Up => -1,
            Spin::Down => 1,
        }
    }

    fn offset(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BasisState {
    pub n1: usize,
    pub n2: usize,
    pub spin: Spin,
}

impl BasisState {
    pub fn new(n1: usize, n2: usize, spin: Spin) -> Self {
        Self { n1, n2, spin }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FockBasis {
    n1_max: usize,
    n2_max: usize,
}

impl FockBasis {
    pub fn new(n1_max: usize, n2_max: usize) -> Self {
        Self { n1_max, n2_max }
    }

    pub fn square(n_max: usize) -> Self {
        Self::new(n_max, n_max)
    }

    pub fn n1_max(&self) -> usize {
        self.n1_max
    }

    pub fn n2_max(&self) -> usize {
        self.n2_max
    }

    pub fn dim(&self) -> usize {
        (self.n1_max + 1) * (self.n2_max + 1) * 2
    }

    /// Index of a state, `None` when it lies outside the truncation.
    pub fn index(&self, state: BasisState) -> Option<usize> {
        (state.n1 <= self.n1_max && state.n2 <= self.n2_max)
            .then(|| (state.n1 * (self.n2_max + 1) + state.n2) * 2 + state.spin.offset())
    }

    pub fn state(&self, index: usize) -> BasisState {
        assert!(index < self.dim(), "index {index} out of range for {self:?}");
        let spin = if index % 2 == 0 { Spin::Up } else { Spin::Down };
        let mode = index / 2;
        BasisState::new(mode / (self.n2_max + 1), mode % (self.n2_max + 1), spin)
    }

    pub fn states(&self) -> impl Iterator<Item = BasisState> + '_ {
        (0..self.dim()).map(move |i| self.state(i))
    }
}

/// A dense complex matrix acting on a [`FockBasis`].
///
/// The arithmetic operators panic on mismatched bases; [`commutator`] and
/// [`anticommutator`] report the mismatch as an error instead.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedOperator {
    basis: FockBasis,
    entries: DMatrix<Complex64>,
}

impl TruncatedOperator {
    pub fn zeros(basis: FockBasis) -> Self {
        let d = basis.dim();
        Self { basis, entries: DMatrix::zeros(d, d) }
    }

    pub fn identity(basis: FockBasis) -> Self {
        let d = basis.dim();
        Self { basis, entries: DMatrix::identity(d, d) }
    }

    pub fn from_entries(basis: FockBasis, entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != basis.dim() || entries.ncols() != basis.dim() {
            return Err(Error::InvalidArgument(format!(
                "matrix is {}x{}, basis dimension is {}",
                entries.nrows(),
                entries.ncols(),
                basis.dim()
            )));
        }
        Ok(Self { basis, entries })
    }

    /// Builds an operator from its action on basis kets: `action(ket)` yields
    /// `(bra, amplitude)` pairs; bras outside the truncation are dropped.
    pub fn from_action<F, I>(basis: FockBasis, action: F) -> Self
    where
        F: Fn(BasisState) -> I,
        I: IntoIterator<Item = (BasisState, f64)>,
    {
        let mut op = Self::zeros(basis);
        for (col, ket) in basis.states().enumerate() {
            for (bra, amp) in action(ket) {
                if let Some(row) = basis.index(bra) {
                    op.entries[(row, col)] += Complex64::new(amp, 0.0);
                }
            }
        }
        op
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn element(&self, bra: BasisState, ket: BasisState) -> Complex64 {
        match (self.basis.index(bra), self.basis.index(ket)) {
            (Some(i), Some(k)) => self.entries[(i, k)],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self { basis: self.basis, entries: self.entries.adjoint() }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { basis: self.basis, entries: &self.entries * Complex64::new(c, 0.0) }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of `self · projector`, i.e. the defect seen from the
    /// projected subspace.
    pub fn max_abs_projected(&self, projector: &TruncatedOperator) -> f64 {
        (self * projector).max_abs()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.check_basis(rhs)?;
        // Ladder-operator products are very sparse; skip zero entries of the right factor.
        let n = self.entries.nrows();
        let mut entries = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                let b = rhs.entries[(k, j)];
                if b.re != 0.0 || b.im != 0.0 {
                    entries.column_mut(j).axpy(b, &self.entries.column(k), Complex64::new(1.0, 0.0));
                }
            }
        }
        Ok(Self { basis: self.basis, entries })
    }

    fn check_basis(&self, rhs: &Self) -> Result<()> {
        if self.basis != rhs.basis {
            return Err(Error::BasisMismatch { left: self.basis, right: rhs.basis });
        }
        Ok(())
    }
}

impl Add for &TruncatedOperator {
    type Output = TruncatedOperator;
    fn add(self, rhs: &TruncatedOperator) -> TruncatedOperator {
        assert_eq!(self.basis, rhs.basis, "basis mismatch");
        TruncatedOperator { basis: self.basis, entries: &self.entries + &rhs.entries }
    }
}

impl Sub for &TruncatedOperator {
    type Output = TruncatedOperator;
    fn sub(self, rhs: &TruncatedOperator) -> TruncatedOperator {
        assert_eq!(self.basis, rhs.basis, "basis mismatch");
        TruncatedOperator { basis: self.basis, entries: &self.entries - &rhs.entries }
    }
}

impl Mul for &TruncatedOperator {
    type Output = TruncatedOperator;
    fn mul(self, rhs: &TruncatedOperator) -> TruncatedOperator {
        self.try_mul(rhs).expect("basis mismatch")
    }
}

/// `AB − BA`
pub fn commutator(a: &TruncatedOperator, b: &TruncatedOperator) -> Result<TruncatedOperator> {
    Ok(&a.try_mul(b)? - &b.try_mul(a)?)
}

/// `AB + BA`
pub fn anticommutator(a: &TruncatedOperator, b: &TruncatedOperator) -> Result<TruncatedOperator> {
    Ok(&a.try_mul(b)? + &b.try_mul(a)?)
}

#[derive(Clone, Debug)]
pub struct BosonOperators {
    pub a1: TruncatedOperator,
    pub a1_dag: TruncatedOperator,
    pub a2: TruncatedOperator,
    pub a2_dag: TruncatedOperator,
}

pub fn boson_operators(basis: FockBasis) -> BosonOperators {
    let a1_dag = TruncatedOperator::from_action(basis, |s| {
        [(BasisState::new(s.n1 + 1, s.n2, s.spin), ((s.n1 + 1) as f64).sqrt())]
    });
    let a2_dag = TruncatedOperator::from_action(basis, |s| {
        [(BasisState::new(s.n1, s.n2 + 1, s.spin), ((s.n2 + 1) as f64).sqrt())]
    });
    BosonOperators {
        a1: a1_dag.adjoint(),
        a1_dag,
        a2: a2_dag.adjoint(),
        a2_dag,
    }
}

/// `σ₊`, `σ₋` and `σ₀ = diag(−1, 1)` on the (up, down) spin factor.
#[derive(Clone, Debug)]
pub struct PauliOperators {
    pub raising: TruncatedOperator,
    pub lowering: TruncatedOperator,
    pub diagonal: TruncatedOperator,
}

pub fn pauli_operators(basis: FockBasis) -> PauliOperators {
    let raising = TruncatedOperator::from_action(basis, |s| match s.spin {
        Spin::Down => Some((BasisState::new(s.n1, s.n2, Spin::Up), 1.0)),
        Spin::Up => None,
    });
    let diagonal = TruncatedOperator::from_action(basis, |s| [(s, s.spin.sigma0() as f64)]);
    PauliOperators { lowering: raising.adjoint(), raising, diagonal }
}

/// Orthogonal projector onto `n₁ ≤ n1_max − margin`, `n₂ ≤ n2_max − margin`.
pub fn interior_projector(basis: FockBasis, margin: usize) -> Result<TruncatedOperator> {
    if margin > basis.n1_max.min(basis.n2_max) {
        return Err(Error::MarginTooLarge { margin, basis });
    }
    Ok(TruncatedOperator::from_action(basis, |s| {
        (s.n1 + margin <= basis.n1_max && s.n2 + margin <= basis.n2_max).then_some((s, 1.0))
    }))
}

/// The even generators `J±, J₀`, the number operator `N`, the odd generators
/// `V±, W±`, the total number `J` and the conserved `K`.
#[derive(Clone, Debug)]
pub struct Osp22Set {
    pub j_plus: TruncatedOperator,
    pub j_minus: TruncatedOperator,
    pub j_zero: TruncatedOperator,
    pub number: TruncatedOperator,
    pub v_plus: TruncatedOperator,
    pub v_minus: TruncatedOperator,
    pub w_plus: TruncatedOperator,
    pub w_minus: TruncatedOperator,
    pub j_total: TruncatedOperator,
    pub conserved: TruncatedOperator,
    pub bosons: BosonOperators,
    pub pauli: PauliOperators,
}

impl Osp22Set {
    pub fn basis(&self) -> FockBasis {
        self.j_plus.basis()
    }
}

pub fn osp22_generators(basis: FockBasis) -> Osp22Set {
    let b = boson_operators(basis);
    let s = pauli_operators(basis);
    let id = TruncatedOperator::identity(basis);
    let n1 = &b.a1_dag * &b.a1;
    let n2 = &b.a2_dag * &b.a2;

    let j_zero = (&(&n1 + &n2) + &id).scale(0.5);
    let number = &n1 - &n2;
    let j_total = (&number - &s.diagonal).scale(0.5);
    let conserved = &number - &s.diagonal.scale(0.5);

    Osp22Set {
        j_plus: &b.a1_dag * &b.a2_dag,
        j_minus: &b.a2 * &b.a1,
        j_zero,
        number,
        v_plus: &s.raising * &b.a2_dag,
        v_minus: &s.raising * &b.a1,
        w_plus: &s.lowering * &b.a1_dag,
        w_minus: &s.lowering * &b.a2,
        j_total,
        conserved,
        bosons: b,
        pauli: s,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bracket {
    Commutator,
    Anticommutator,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub relation_name: String,
    pub bracket: Bracket,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Residual with the right-hand side negated; `None` when the stated
    /// right-hand side is zero.
    pub negated_rhs_residual: Option<f64>,
}

impl RelationCheck {
    /// The relation fails as stated but holds with its right-hand side negated.
    pub fn sign_flip_suspected(&self) -> bool {
        !self.pass && self.negated_rhs_residual.is_some_and(|r| r <= self.tolerance)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub margin: usize,
    pub tolerance: f64,
    pub n1_max: usize,
    pub n2_max: usize,
    pub relations: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_pass(&self) -> bool {
        self.relations.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationCheck> {
        self.relations.iter().filter(|r| !r.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.relations.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<&RelationCheck> {
        self.relations.iter().find(|r| r.relation_name == name)
    }
}

struct Relation<'a> {
    name: String,
    bracket: Bracket,
    lhs: (&'a TruncatedOperator, &'a TruncatedOperator),
    rhs: Vec<(f64, &'a TruncatedOperator)>,
}

fn relation_table(g: &Osp22Set) -> Vec<Relation<'_>> {
    use Bracket::*;
    fn rel<'a>(
        name: &str,
        bracket: Bracket,
        a: &'a TruncatedOperator,
        b: &'a TruncatedOperator,
        rhs: Vec<(f64, &'a TruncatedOperator)>,
    ) -> Relation<'a> {
        Relation { name: name.to_string(), bracket, lhs: (a, b), rhs }
    }
    let (jp, jm, j0, jt, k) = (&g.j_plus, &g.j_minus, &g.j_zero, &g.j_total, &g.conserved);
    let (vp, vm, wp, wm) = (&g.v_plus, &g.v_minus, &g.w_plus, &g.w_minus);

    let mut table = vec![
        rel("[J+,J-] = -2J0", Commutator, jp, jm, vec![(-2.0, j0)]),
        rel("[J0,J+] = J+", Commutator, j0, jp, vec![(1.0, jp)]),
        rel("[J0,J-] = -J-", Commutator, j0, jm, vec![(-1.0, jm)]),
        rel("[J,J+] = 0", Commutator, jt, jp, vec![]),
        rel("[J,J-] = 0", Commutator, jt, jm, vec![]),
        rel("[J,J0] = 0", Commutator, jt, j0, vec![]),
        rel("[J0,V+] = V+/2", Commutator, j0, vp, vec![(0.5, vp)]),
        rel("[J0,V-] = -V-/2", Commutator, j0, vm, vec![(-0.5, vm)]),
        rel("[J0,W+] = W+/2", Commutator, j0, wp, vec![(0.5, wp)]),
        rel("[J0,W-] = -W-/2", Commutator, j0, wm, vec![(-0.5, wm)]),
        rel("[J+,V-] = V+", Commutator, jp, vm, vec![(1.0, vp)]),
        rel("[J-,V+] = V-", Commutator, jm, vp, vec![(1.0, vm)]),
        rel("[J+,W-] = W+", Commutator, jp, wm, vec![(1.0, wp)]),
        rel("[J-,W+] = W-", Commutator, jm, wp, vec![(1.0, wm)]),
        rel("[J,W+] = -W+/2", Commutator, jt, wp, vec![(-0.5, wp)]),
        rel("[J,W-] = -W-/2", Commutator, jt, wm, vec![(-0.5, wm)]),
        rel("[J,V+] = V+/2", Commutator, jt, vp, vec![(0.5, vp)]),
        rel("[J,V-] = V-/2", Commutator, jt, vm, vec![(0.5, vm)]),
        rel("[J+,V+] = 0", Commutator, jp, vp, vec![]),
        rel("[J-,V-] = 0", Commutator, jm, vm, vec![]),
        rel("[J+,W+] = 0", Commutator, jp, wp, vec![]),
        rel("[J-,W-] = 0", Commutator, jm, wm, vec![]),
        rel("{V+,W+} = J+", Anticommutator, vp, wp, vec![(1.0, jp)]),
        rel("{V-,W-} = J-", Anticommutator, vm, wm, vec![(1.0, jm)]),
        rel("{V+,W-} = J0 - J", Anticommutator, vp, wm, vec![(1.0, j0), (-1.0, jt)]),
        rel("{V-,W+} = -J0 - J", Anticommutator, vm, wp, vec![(-1.0, j0), (-1.0, jt)]),
        rel("{V+,V+} = 0", Anticommutator, vp, vp, vec![]),
        rel("{V-,V-} = 0", Anticommutator, vm, vm, vec![]),
        rel("{V+,V-} = 0", Anticommutator, vp, vm, vec![]),
        rel("{W+,W+} = 0", Anticommutator, wp, wp, vec![]),
        rel("{W-,W-} = 0", Anticommutator, wm, wm, vec![]),
        rel("{W+,W-} = 0", Anticommutator, wp, wm, vec![]),
    ];
    for (label, op) in [("J+", jp), ("J-", jm), ("J0", j0), ("V+", vp), ("V-", vm), ("W+", wp), ("W-", wm)] {
        table.push(rel(&format!("[K,{label}] = 0"), Commutator, k, op, vec![]));
    }
    table
}

/// Checks every superalgebra relation on the interior of the truncation.
///
/// Failures are data: each entry carries its residual, and the residual with
/// the right-hand side negated so sign slips can be told apart from genuine
/// structural failures.
pub fn verify_relations(set: &Osp22Set, margin: usize, tol: f64) -> Result<RelationReport> {
    if margin < 2 {
        return Err(Error::InvalidArgument(format!(
            "relation checks need margin >= 2, got {margin}"
        )));
    }
    let basis = set.basis();
    let projector = interior_projector(basis, margin)?;
    let relations = relation_table(set)
        .into_iter()
        .map(|rel| {
            let (a, b) = rel.lhs;
            let lhs = match rel.bracket {
                Bracket::Commutator => commutator(a, b)?,
                Bracket::Anticommutator => anticommutator(a, b)?,
            };
            let rhs = rel
                .rhs
                .iter()
                .fold(TruncatedOperator::zeros(basis), |acc, (c, op)| &acc + &op.scale(*c));
            let residual = (&lhs - &rhs).max_abs_projected(&projector);
            let negated_rhs_residual =
                (!rel.rhs.is_empty()).then(|| (&lhs + &rhs).max_abs_projected(&projector));
            Ok(RelationCheck {
                relation_name: rel.name,
                bracket: rel.bracket,
                residual,
                tolerance: tol,
                pass: residual <= tol,
                negated_rhs_residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RelationReport {
        margin,
        tolerance: tol,
        n1_max: basis.n1_max(),
        n2_max: basis.n2_max(),
        relations,
    })
}
