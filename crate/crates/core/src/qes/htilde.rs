use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::BlockConstants;
use crate::poly::Poly;
use crate::rational::{int, Rational};

use super::block::Coefficient;

/// A two-component polynomial in `z`: `p[n]` and `q[n]` are the `zⁿ`
/// coefficients of the upper and lower entries.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolynomialSpinor<T> {
    pub p: Vec<T>,
    pub q: Vec<T>,
}

impl<T: Clone + Default> PolynomialSpinor<T> {
    /// Unpacks a block vector in the order `p₀, q₁, p₁, …, p_j, q_{j+1}`;
    /// `q[0]` is set to zero.
    pub fn from_block_vector(v: &[T]) -> Self {
        assert!(v.len() % 2 == 0 && !v.is_empty(), "block vectors have even length");
        let j1 = v.len() / 2;
        let mut q = vec![T::default(); j1 + 1];
        let mut p = Vec::with_capacity(j1);
        for (i, x) in v.iter().enumerate() {
            match Coefficient::at(i) {
                Coefficient::P(_) => p.push(x.clone()),
                Coefficient::Q(m) => q[m as usize] = x.clone(),
            }
        }
        Self { p, q }
    }

    /// Packs into block order for `j`, ignoring `q[0]` and anything of
    /// higher degree than the block holds.
    pub fn to_block_vector(&self, j: u32) -> Vec<T> {
        let get = |v: &[T], n: usize| v.get(n).cloned().unwrap_or_default();
        (0..2 * (j as usize + 1))
            .map(|i| match Coefficient::at(i) {
                Coefficient::P(n) => get(&self.p, n as usize),
                Coefficient::Q(m) => get(&self.q, m as usize),
            })
            .collect()
    }
}

/// Result of applying the operator to an in-block spinor.
///
/// `spinor` holds the image restricted to the block (degree `<= j` upper,
/// `1..=j+1` lower). The two leak coefficients are the only components that
/// can fall outside: the upper `z^{j+1}` term and the lower constant term.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HtildeImage {
    #[serde(serialize_with = "ser_rational_spinor")]
    pub spinor: PolynomialSpinor<Rational>,
    #[serde(with = "crate::rational::as_string")]
    pub upper_leak: Rational,
    #[serde(with = "crate::rational::as_string")]
    pub lower_leak: Rational,
}

fn ser_rational_spinor<S: serde::Serializer>(
    s: &PolynomialSpinor<Rational>,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    let strings = |v: &[Rational]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
    PolynomialSpinor { p: strings(&s.p), q: strings(&s.q) }.serialize(ser)
}

impl HtildeImage {
    pub fn is_in_block(&self) -> bool {
        self.upper_leak.is_zero() && self.lower_leak.is_zero()
    }
}

/// Applies the reduced operator
///
/// ```text
/// upper = 2z p' + ε₊ p − κ (q/z − (z q)')
/// lower = 2z q' + (ε₋ − 2) q + κ (p + j z p − z² p')
/// ```
///
/// to `φ = (p, q)` with `deg p <= j`, `deg q <= j + 1` and `q(0) = 0`.
pub fn htilde_apply(phi: &PolynomialSpinor<Rational>, bc: &BlockConstants, kappa: &Rational) -> Result<HtildeImage> {
    let j = bc.j as usize;
    let out_of_block = |reason: String| Error::SpinorOutOfBlock { j: bc.j, reason };
    let p = Poly::new(phi.p.clone());
    let q = Poly::new(phi.q.clone());
    if p.degree().is_some_and(|d| d > j) {
        return Err(out_of_block(format!("upper component has degree {} > {j}", p.degree().unwrap())));
    }
    if q.degree().is_some_and(|d| d > j + 1) {
        return Err(out_of_block(format!("lower component has degree {} > {}", q.degree().unwrap(), j + 1)));
    }
    let q_over_z = q
        .shift_down(1)
        .ok_or_else(|| out_of_block("lower component has a nonzero constant term".into()))?;

    let two = Poly::constant(int(2));
    let k = Poly::constant(kappa.clone());
    let upper = &(&(&two * &p.derivative().shift_up(1)) + &p.scale(&bc.eps_plus()))
        - &(&k * &(&q_over_z - &q.shift_up(1).derivative()));
    let lower = &(&(&two * &q.derivative().shift_up(1)) + &q.scale(&(bc.eps_minus() - int(2))))
        + &(&k * &(&(&p + &p.shift_up(1).scale(&int(j as i64))) - &p.derivative().shift_up(2)));

    debug_assert!(upper.degree().is_none_or(|d| d <= j + 1));
    debug_assert!(lower.degree().is_none_or(|d| d <= j + 1));

    let up: Vec<Rational> = (0..=j).map(|n| upper.coeff(n)).collect();
    let mut low: Vec<Rational> = (0..=j + 1).map(|n| lower.coeff(n)).collect();
    let upper_leak = upper.coeff(j + 1);
    let lower_leak = std::mem::replace(&mut low[0], Rational::zero());
    Ok(HtildeImage {
        spinor: PolynomialSpinor { p: up, q: low },
        upper_leak,
        lower_leak,
    })
}

/// Matrix of the operator on the block basis, read off column by column by
/// applying it to each basis spinor.
pub fn operator_matrix(bc: &BlockConstants, kappa: &Rational) -> Result<Vec<Vec<Rational>>> {
    let d = 2 * (bc.j as usize + 1);
    let mut cols = Vec::with_capacity(d);
    for c in 0..d {
        let mut e = vec![Rational::zero(); d];
        e[c] = int(1);
        let image = htilde_apply(&PolynomialSpinor::from_block_vector(&e), bc, kappa)?;
        cols.push(image.spinor.to_block_vector(bc.j));
    }
    Ok((0..d).map(|r| (0..d).map(|c| cols[c][r].clone()).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qes::build_block;
    use crate::rational::frac;

    fn bc(j: u32) -> BlockConstants {
        BlockConstants { j, eps_j: frac(3, 7), eps_b: frac(-2, 5) }
    }

    #[test]
    fn operator_matrix_equals_recurrence_block() {
        for j in 0..5 {
            let kappa = frac(5, 3);
            let m = operator_matrix(&bc(j), &kappa).unwrap();
            assert_eq!(m.as_slice(), build_block(&bc(j), &kappa).rows());
        }
    }

    #[test]
    fn leaks_are_the_boundary_terms() {
        let j = 2;
        let kappa = frac(1, 2);
        let phi = PolynomialSpinor { p: vec![int(3), int(0), int(0)], q: vec![int(0), int(0), int(0), int(4)] };
        let image = htilde_apply(&phi, &bc(j), &kappa).unwrap();
        assert_eq!(image.lower_leak, &kappa * int(3));
        assert_eq!(image.upper_leak, &kappa * int(4) * int(j as i64 + 2));
        assert!(!image.is_in_block());
    }

    #[test]
    fn rejects_out_of_block_input() {
        let phi = PolynomialSpinor { p: vec![int(1)], q: vec![int(1)] };
        assert!(matches!(htilde_apply(&phi, &bc(1), &int(1)), Err(Error::SpinorOutOfBlock { .. })));
        let phi = PolynomialSpinor { p: vec![int(0), int(0), int(1)], q: vec![] };
        assert!(htilde_apply(&phi, &bc(1), &int(1)).is_err());
    }

    #[test]
    fn block_vector_roundtrip() {
        let v: Vec<Rational> = (1..=6).map(int).collect();
        let s = PolynomialSpinor::from_block_vector(&v);
        assert_eq!(s.p, vec![int(1), int(3), int(5)]);
        assert_eq!(s.q, vec![int(0), int(2), int(4), int(6)]);
        assert_eq!(s.to_block_vector(2), v);
    }
}
