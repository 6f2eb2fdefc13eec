//! LLL reduction, nullspace lattices and completeness certificates.

pub mod gso;
pub mod lll;
pub mod nullspace;

pub use gso::{check_lll, gram_schmidt, is_lll_reduced, Gso, LllViolation};
pub use lll::{lll_reduce, lll_reduce_rational, stacked, ReductionResult};
pub use nullspace::{
    coeff_vector, completeness_certificate, lattice_coords, nearest_plane, nullspace_basis, sublattice_det_check,
    unimodular_column_reduction, CompletenessCertificate,
};

impl ReductionResult {
    /// Checks the sublattice determinant bound for every prefix of the reduced basis.
    pub fn sublattice_checks(&self) -> crate::Result<Vec<bool>> {
        (1..=self.reduced.cols()).map(|l| sublattice_det_check(&self.reduced, l)).collect()
    }
}
