use nalgebra::DMatrix;
use num_traits::Zero;
use serde::Serialize;

use crate::params::{block_constants, BlockConstants, DimensionlessParams};
use crate::rational::{int, to_f64, Rational};

/// Label of a recurrence unknown: `P(n)` is the `zⁿ` coefficient of the upper
/// polynomial, `Q(n)` that of the lower one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Coefficient {
    P(u32),
    Q(u32),
}

impl Coefficient {
    /// Position in the interleaved order `p₀, q₁, p₁, q₂, …`; `Q(0)` has none.
    pub fn position(self) -> Option<usize> {
        match self {
            Coefficient::P(n) => Some(2 * n as usize),
            Coefficient::Q(0) => None,
            Coefficient::Q(n) => Some(2 * n as usize - 1),
        }
    }

    pub fn at(position: usize) -> Self {
        if position % 2 == 0 {
            Coefficient::P((position / 2) as u32)
        } else {
            Coefficient::Q((position / 2 + 1) as u32)
        }
    }
}

/// Entry of the unbounded recurrence matrix.
///
/// Row `P(n)`: `(2n + ε₊)` on `P(n)`, `−κ` on `Q(n+1)`, `κ(n+1)` on `Q(n)`.
/// Row `Q(n+1)`: `(2n + ε₋)` on `Q(n+1)`, `κ(j−n)` on `P(n)`, `κ` on `P(n+1)`.
/// There is no `Q(0)` row.
pub fn recurrence_entry(row: Coefficient, col: Coefficient, bc: &BlockConstants, kappa: &Rational) -> Rational {
    use Coefficient::{P, Q};
    let j = bc.j as i64;
    match (row, col) {
        (P(n), P(m)) if n == m => int(2 * n as i64) + bc.eps_plus(),
        (P(n), Q(m)) if m == n + 1 => -kappa.clone(),
        (P(n), Q(m)) if n >= 1 && m == n => kappa * int(n as i64 + 1),
        (Q(m), Q(k)) if m >= 1 && k == m => int(2 * (m as i64 - 1)) + bc.eps_minus(),
        (Q(m), P(k)) if m >= 1 && k + 1 == m => kappa * int(j - k as i64),
        (Q(m), P(k)) if m >= 1 && k == m => kappa.clone(),
        _ => Rational::zero(),
    }
}

/// The `2(j+1)`-dimensional block `C` with `M(E) = C − E·I`, in the order
/// `p₀, q₁, …, p_j, q_{j+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QesBlock {
    constants: BlockConstants,
    kappa: Rational,
    matrix: Vec<Vec<Rational>>,
}

impl QesBlock {
    pub fn j(&self) -> u32 {
        self.constants.j
    }

    pub fn constants(&self) -> &BlockConstants {
        &self.constants
    }

    pub fn kappa(&self) -> &Rational {
        &self.kappa
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> &Rational {
        &self.matrix[row][col]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.matrix
    }

    pub fn labels(&self) -> impl Iterator<Item = Coefficient> {
        (0..self.dim()).map(Coefficient::at)
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, k| to_f64(&self.matrix[i][k]))
    }

    pub fn is_tridiagonal(&self) -> bool {
        self.matrix
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(k, x)| i.abs_diff(k) <= 1 || x.is_zero()))
    }

    /// `D·C·D` with `D = diag(1, −1, 1, −1, …)`.
    pub fn alternating_similarity(&self) -> Vec<Vec<Rational>> {
        let sign = |i: usize| if i % 2 == 0 { int(1) } else { int(-1) };
        self.matrix
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().enumerate().map(|(k, x)| x * sign(i) * sign(k)).collect())
            .collect()
    }
}

/// Fills the block for `bc.j` from the recurrence.
pub fn build_block(bc: &BlockConstants, kappa: &Rational) -> QesBlock {
    let d = 2 * (bc.j as usize + 1);
    let matrix = (0..d)
        .map(|i| {
            (0..d)
                .map(|k| recurrence_entry(Coefficient::at(i), Coefficient::at(k), bc, kappa))
                .collect()
        })
        .collect();
    QesBlock { constants: bc.clone(), kappa: kappa.clone(), matrix }
}

pub fn block_for(j: u32, p: &DimensionlessParams) -> QesBlock {
    build_block(&block_constants(j, p), p.kappa())
}
