//! Dense complex kernels.

mod compound;
mod eigen;
mod lu;
mod matrix;
mod qr;
mod svd;

pub use compound::{compound_matrix, gram_pairing, subsets};
pub use eigen::{general_eigenvalues, hermitian_eigen, hermitian_eigenvalues, sort_eigenvalues, HermitianEigen};
pub use lu::{inverse, lu_det, LogDet, Lu};
pub use matrix::{inner, vec_norm, ComplexMatrix};
pub use qr::{householder_qr, GradedProduct, Qr};
pub use svd::{op_norm, svd, SvdResult};
