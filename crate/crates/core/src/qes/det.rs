use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{int, Rational};

use super::block::QesBlock;

/// `det(C − E·I)` for one block, as an exact polynomial in `E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnergyPolynomial {
    pub j: u32,
    pub poly: Poly,
}

impl Serialize for EnergyPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("EnergyPolynomial", 3)?;
        st.serialize_field("j", &self.j)?;
        st.serialize_field("degree", &self.poly.degree())?;
        st.serialize_field("coefficients", &self.poly.to_strings())?;
        st.end()
    }
}

fn shifted_entry(block: &QesBlock, i: usize, k: usize) -> Poly {
    let c = block.entry(i, k).clone();
    if i == k {
        Poly::linear(c, int(-1))
    } else {
        Poly::constant(c)
    }
}

/// Three-term continuant `f_k = a_k f_{k−1} − b_{k−1} c_{k−1} f_{k−2}`.
pub fn continuant_determinant(block: &QesBlock) -> Result<Poly> {
    if !block.is_tridiagonal() {
        return Err(Error::Consistency(format!("block j = {} is not tridiagonal", block.j())));
    }
    let mut prev = Poly::constant(int(1));
    let mut cur = shifted_entry(block, 0, 0);
    for k in 1..block.dim() {
        let off: Rational = block.entry(k - 1, k) * block.entry(k, k - 1);
        let next = &(&shifted_entry(block, k, k) * &cur) - &prev.scale(&off);
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(cur)
}

/// Fraction-free Gaussian elimination over `Q[E]`.
pub fn bareiss_determinant(block: &QesBlock) -> Poly {
    let n = block.dim();
    let mut m: Vec<Vec<Poly>> = (0..n).map(|i| (0..n).map(|k| shifted_entry(block, i, k)).collect()).collect();
    let mut sign = int(1);
    let mut prev = Poly::constant(int(1));
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return Poly::zero(),
            }
        }
        for i in k + 1..n {
            for c in k + 1..n {
                let num = &(&m[k][k] * &m[i][c]) - &(&m[i][k] * &m[k][c]);
                m[i][c] = num.exact_div(&prev).expect("Bareiss step divides exactly");
            }
        }
        prev = m[k][k].clone();
    }
    m[n - 1][n - 1].scale(&sign)
}

/// Evaluates the determinant both ways and insists that they agree.
pub fn det_polynomial(block: &QesBlock) -> Result<EnergyPolynomial> {
    let a = continuant_determinant(block)?;
    let b = bareiss_determinant(block);
    if a != b {
        return Err(Error::Consistency(format!(
            "determinant mismatch for j = {}: continuant {a}, elimination {b}",
            block.j()
        )));
    }
    if a.degree() != Some(block.dim()) || a.leading().is_none_or(|c| c.is_zero()) {
        return Err(Error::Consistency(format!("unexpected determinant degree for j = {}", block.j())));
    }
    Ok(EnergyPolynomial { j: block.j(), poly: a })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::BlockConstants;
    use crate::qes::build_block;
    use crate::rational::frac;

    #[test]
    fn j0_is_product_of_diagonal() {
        let bc = BlockConstants { j: 0, eps_j: frac(1, 2), eps_b: frac(1, 3) };
        let d = det_polynomial(&build_block(&bc, &frac(9, 2))).unwrap();
        let expected = &Poly::linear(frac(5, 6), int(-1)) * &Poly::linear(frac(1, 6), int(-1));
        assert_eq!(d.poly, expected);
    }

    #[test]
    fn continuant_matches_elimination() {
        for j in 0..5 {
            let bc = BlockConstants { j, eps_j: frac(-7, 11), eps_b: frac(3, 13) };
            let block = build_block(&bc, &frac(17, 10));
            assert_eq!(continuant_determinant(&block).unwrap(), bareiss_determinant(&block));
        }
    }

    #[test]
    fn leading_coefficient_is_unit() {
        let bc = BlockConstants { j: 3, eps_j: frac(1, 5), eps_b: frac(1, 7) };
        let d = det_polynomial(&build_block(&bc, &int(2))).unwrap();
        assert_eq!(d.poly.degree(), Some(8));
        assert_eq!(*d.poly.leading().unwrap(), int(1));
    }
}
