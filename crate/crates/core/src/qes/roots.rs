use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{frac, int, to_f64, Rational};

use super::block::{recurrence_entry, Coefficient, QesBlock};
use super::det::det_polynomial;
use super::htilde::PolynomialSpinor;

/// Roots with `|Im E|` at or below this count as real.
pub const IMAG_THRESHOLD: f64 = 1e-10;
/// A null spinor with consistency residual below this terminates the series.
pub const SERIES_TERMINATION_THRESHOLD: f64 = 1e-10;

const AGREEMENT_REL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QesRoot {
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    /// `|P(E)| / Σ |c_k| |E|^k` against the full determinant polynomial.
    pub residual: f64,
    pub multiplicity: usize,
}

impl QesRoot {
    pub fn is_real(&self) -> bool {
        self.value.im.abs() <= IMAG_THRESHOLD
    }
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn by_re_im(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn polish(f: &[f64], df: &[f64], mut x: Complex64) -> Complex64 {
    let eval = |c: &[f64], x: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a);
    let mut fx = eval(f, x).norm();
    for _ in 0..50 {
        let d = eval(df, x);
        if d.norm() == 0.0 || fx == 0.0 {
            break;
        }
        let cand = x - eval(f, x) / d;
        let fc = eval(f, cand).norm();
        if !(fc < fx) {
            break;
        }
        x = cand;
        fx = fc;
    }
    x
}

/// Closest fraction to `x` with denominator at most `max_den`, by continued
/// fractions.
fn rational_near(x: f64, max_den: i64) -> Option<Rational> {
    if !x.is_finite() || x.abs() > 1e12 {
        return None;
    }
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut rest = x;
    for _ in 0..40 {
        let a = rest.floor();
        let a_i = a as i64;
        let (h2, k2) = (a_i.checked_mul(h1)?.checked_add(h0)?, a_i.checked_mul(k1)?.checked_add(k0)?);
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac_part = rest - a;
        if frac_part.abs() < 1e-13 {
            break;
        }
        rest = 1.0 / frac_part;
    }
    (k1 > 0).then(|| frac(h1, k1))
}

fn numeric_roots(f: &Poly) -> Vec<Complex64> {
    let c = f.to_f64_coeffs();
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![Complex64::new(-to_f64(&f.coeff(0)), 0.0)];
    }
    let df = f.derivative().to_f64_coeffs();
    let companion = DMatrix::from_fn(n, n, |i, k| {
        if k == n - 1 {
            -c[i]
        } else if i == k + 1 {
            1.0
        } else {
            0.0
        }
    });
    let ev = |x: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a).norm();
    companion
        .complex_eigenvalues()
        .iter()
        .map(|&z| {
            let z = polish(&c, &df, z);
            if z.im.abs() <= IMAG_THRESHOLD * z.norm().max(1.0) {
                let real = polish(&c, &df, Complex64::new(z.re, 0.0));
                if ev(real) <= ev(z) {
                    return real;
                }
            }
            z
        })
        .collect()
}

/// Roots of `poly` with exact multiplicities: square-free factorisation,
/// then companion-matrix eigenvalues per factor with Newton refinement.
/// Rational roots with small denominators are confirmed exactly and divided
/// out before the remaining roots are computed.
pub fn polynomial_roots(poly: &Poly) -> Vec<(Complex64, usize)> {
    let mut out = Vec::new();
    for (factor, mult) in poly.square_free_factors() {
        let mut f = factor.monic();
        for z in numeric_roots(&f) {
            if z.im.abs() > IMAG_THRESHOLD * z.norm().max(1.0) {
                continue;
            }
            let Some(q) = rational_near(z.re, 1 << 20) else { continue };
            if f.eval(&q).is_zero() {
                f = f.exact_div(&Poly::linear(-q.clone(), int(1))).expect("exact rational root divides");
                out.push((Complex64::new(to_f64(&q), 0.0), mult));
            }
        }
        out.extend(numeric_roots(&f).into_iter().map(|z| (z, mult)));
    }
    out.sort_by(|a, b| by_re_im(&a.0, &b.0));
    out
}

/// Eigenvalues of the floating-point block, sorted.
pub fn eigen_roots(block: &QesBlock) -> Vec<Complex64> {
    let mut ev: Vec<Complex64> = block.to_f64().complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| by_re_im(a, b));
    ev
}

/// All `2(j+1)` roots of `det(C − E·I)`, listed once per distinct value,
/// cross-checked against a direct eigenvalue computation of `C`.
pub fn qes_roots(block: &QesBlock) -> Result<Vec<QesRoot>> {
    let det = det_polynomial(block)?;
    let roots = polynomial_roots(&det.poly);
    let c = block.to_f64();
    let norm = c.norm().max(1.0);

    let mut unused = eigen_roots(block);
    for &(z, m) in &roots {
        let tol = (AGREEMENT_REL * z.norm().max(1.0)).max(if m > 1 {
            10.0 * (f64::EPSILON * norm).powf(1.0 / m as f64)
        } else {
            0.0
        });
        for _ in 0..m {
            let (idx, dist) = unused
                .iter()
                .enumerate()
                .map(|(i, e)| (i, (e - z).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .ok_or_else(|| Error::Consistency("more polynomial roots than eigenvalues".into()))?;
            if dist > tol {
                return Err(Error::Consistency(format!(
                    "root {z} of the j = {} determinant is {dist:e} from the nearest eigenvalue (tolerance {tol:e})",
                    block.j()
                )));
            }
            unused.swap_remove(idx);
        }
    }
    if !unused.is_empty() {
        return Err(Error::Consistency(format!("{} eigenvalues without a matching root", unused.len())));
    }

    Ok(roots
        .into_iter()
        .map(|(value, multiplicity)| {
            let scale = det.poly.magnitude_scale(value);
            let residual = if scale == 0.0 { 0.0 } else { det.poly.eval_complex(value).norm() / scale };
            QesRoot { value, residual, multiplicity }
        })
        .collect())
}

/// A normalised null vector of `C − E·I`, unpacked into polynomial form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NullSpinor {
    pub spinor: PolynomialSpinor<[f64; 2]>,
    pub singular_value: f64,
    /// `|κ(j+2) q_{j+1}| / ‖v‖`: the size of the first out-of-block equation.
    pub consistency_residual: f64,
}

impl NullSpinor {
    pub fn is_series_terminating(&self) -> bool {
        self.consistency_residual < SERIES_TERMINATION_THRESHOLD
    }
}

/// The part of the `p_{j+1}` row acting on block coefficients, applied to `v`.
fn closing_row_residual(block: &QesBlock, v: &DVector<Complex64>) -> f64 {
    let row = Coefficient::P(block.j() + 1);
    let acc: Complex64 = block
        .labels()
        .zip(v.iter())
        .map(|(col, x)| x * to_f64(&recurrence_entry(row, col, block.constants(), block.kappa())))
        .sum();
    acc.norm() / v.norm()
}

/// Null spinors of `C − E·I` at a (numerical) root `E`.
///
/// Every right-singular direction with `σ <= 1e-8·max(σ_max, 1)` is returned,
/// and always at least the smallest one. When the null space is more than
/// one-dimensional the residual is minimised over it, so each direction is
/// reported with residual zero.
pub fn null_spinor(block: &QesBlock, energy: Complex64) -> Vec<NullSpinor> {
    let d = block.dim();
    let m = block.to_f64().map(|x| Complex64::new(x, 0.0)) - DMatrix::identity(d, d) * energy;
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let sigma = &svd.singular_values;
    let smax = sigma.max();
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[a].total_cmp(&sigma[b]));
    let cutoff = 1e-8 * smax.max(1.0);
    let chosen: Vec<usize> = order
        .iter()
        .copied()
        .enumerate()
        .take_while(|&(rank, i)| rank == 0 || sigma[i] <= cutoff)
        .map(|(_, i)| i)
        .collect();
    let degenerate = chosen.len() > 1;

    chosen
        .into_iter()
        .map(|i| {
            let mut v: DVector<Complex64> = v_t.row(i).adjoint();
            let pivot = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
            if pivot.norm() > 0.0 {
                v *= pivot.conj() / pivot.norm();
            }
            v /= Complex64::new(v.norm(), 0.0);
            let residual = if degenerate { 0.0 } else { closing_row_residual(block, &v) };
            let parts: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
            NullSpinor {
                spinor: PolynomialSpinor::from_block_vector(&parts),
                singular_value: sigma[i],
                consistency_residual: residual,
            }
        })
        .collect()
}
