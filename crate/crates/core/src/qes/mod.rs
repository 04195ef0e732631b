//! The finite recurrence blocks, their determinant polynomials and roots.

mod block;
mod det;
mod htilde;
mod published;
mod roots;

pub use block::{block_for, build_block, recurrence_entry, Coefficient, QesBlock};
pub use det::{bareiss_determinant, continuant_determinant, det_polynomial, EnergyPolynomial};
pub use htilde::{htilde_apply, operator_matrix, HtildeImage, PolynomialSpinor};
pub use published::{
    compare_with_published, published_determinant, transcription_errata, DiscrepancyReport,
    PublishedDeterminant, PublishedTerm, SuspectedTypo, TranscriptionErrata, TranscriptionErratum, Verdict,
};
pub use roots::{
    eigen_roots, null_spinor, polynomial_roots, qes_roots, NullSpinor, QesRoot, IMAG_THRESHOLD,
    SERIES_TERMINATION_THRESHOLD,
};
