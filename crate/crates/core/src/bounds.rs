//! Closed-form bounds and separability criteria.
//!
//! For a density matrix rho with marginal rho_A:
//!   * `mb_lower_bound_c2`:    C^2 >= 2 [Tr rho^2 - Tr rho_A^2]
//!   * `purity_upper_bound_c2`: C^2 <= 2 [1 - Tr rho_A^2]
//!   * `d_upper_bound`:        D^2 <= det(I - rho_A)
//!   * `d_lower_bound`:        det(I - rho_A) - det(I - rho), which is <= 0
//!     for every separable state; a positive value certifies entanglement
//!     and conjecturally lower-bounds D^2.
//!
//! Lower-bound values are returned unclamped (they may be negative and then
//! hold vacuously), since experiments compare the raw numbers.

use crate::error::{Error, Result};
use crate::linalg::{det_hermitian, hermitian_eigensystem, ComplexMatrix, Subsystem, HERMITICITY_TOL};
use crate::states::{reduced_density, DensityMatrix, PSD_TOL};
use serde::Serialize;

/// Values of `d_lower_bound` above this threshold certify entanglement;
/// below it the determinant noise floor makes the witness inconclusive.
pub const WITNESS_TOL: f64 = 1e-12;

/// Outcome of the determinant separability witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    EntangledCertified,
    Inconclusive,
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Witness::EntangledCertified => write!(f, "entangled_certified"),
            Witness::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// All closed-form bound values for one state.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundReport {
    pub mb_lower_c2: f64,
    pub purity_upper_c2: f64,
    pub d_upper: f64,
    pub d_lower: f64,
    pub witness_entangled: bool,
}

impl BoundReport {
    pub fn evaluate(rho: &DensityMatrix) -> Self {
        BoundReport {
            mb_lower_c2: mb_lower_bound_c2(rho),
            purity_upper_c2: purity_upper_bound_c2(rho),
            d_upper: d_upper_bound(rho),
            d_lower: d_lower_bound(rho),
            witness_entangled: separability_witness(rho) == Witness::EntangledCertified,
        }
    }
}

fn marginal_purity(rho: &DensityMatrix) -> f64 {
    let red = reduced_density(rho, Subsystem::A);
    red.data().iter().map(|z| z.norm_sqr()).sum()
}

/// 2 [Tr rho^2 - Tr rho_A^2]; may be negative, returned raw.
pub fn mb_lower_bound_c2(rho: &DensityMatrix) -> f64 {
    2.0 * (rho.purity() - marginal_purity(rho))
}

/// 2 [1 - Tr rho_A^2].
pub fn purity_upper_bound_c2(rho: &DensityMatrix) -> f64 {
    2.0 * (1.0 - marginal_purity(rho))
}

fn det_gap(m: &ComplexMatrix) -> f64 {
    let gap = ComplexMatrix::identity(m.rows()).sub(m).expect("shapes agree");
    det_hermitian(&gap).expect("I - Hermitian input stays Hermitian")
}

/// det(I - rho_A), the upper bound on D^2.
pub fn d_upper_bound(rho: &DensityMatrix) -> f64 {
    det_gap(&reduced_density(rho, Subsystem::A))
}

/// det(I - rho_A) - det(I - rho); positive values certify entanglement and
/// may be negative (vacuously true lower bound), returned raw.
pub fn d_lower_bound(rho: &DensityMatrix) -> f64 {
    d_upper_bound(rho) - det_gap(rho.matrix())
}

/// Determinant witness: certify entanglement when the separability
/// inequality det(I - rho_A) - det(I - rho) <= 0 is violated beyond noise.
/// The criterion is necessary, not sufficient, so the negative outcome is
/// `Inconclusive`.
pub fn separability_witness(rho: &DensityMatrix) -> Witness {
    if d_lower_bound(rho) > WITNESS_TOL {
        Witness::EntangledCertified
    } else {
        Witness::Inconclusive
    }
}

/// Result of a majorization comparison x < y (x majorized by y).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MajorizationCheck {
    /// Partial sums ordered correctly AND totals agree.
    pub holds: bool,
    /// Diagnostics: totals agreed within 1e-10. When two spectra are
    /// compared a mismatch signals an invalid input rather than a mere
    /// majorization failure.
    pub totals_match: bool,
}

/// Check x < y: after descending sort and zero padding to equal length,
/// every partial sum of x is bounded by the matching partial sum of y
/// (tolerance 1e-12) and the totals agree (tolerance 1e-10).
pub fn majorizes(x: &[f64], y: &[f64]) -> MajorizationCheck {
    let n = x.len().max(y.len());
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.resize(n, 0.0);
    ys.resize(n, 0.0);
    xs.sort_by(|a, b| b.partial_cmp(a).expect("finite components"));
    ys.sort_by(|a, b| b.partial_cmp(a).expect("finite components"));

    let mut sum_x = 0.0;
    let mut sum_y = 0.0;
    let mut partials_ok = true;
    for k in 0..n {
        sum_x += xs[k];
        sum_y += ys[k];
        if k + 1 < n && sum_x > sum_y + 1e-12 {
            partials_ok = false;
        }
    }
    let totals_match = (sum_x - sum_y).abs() <= 1e-10;
    MajorizationCheck {
        holds: partials_ok && totals_match,
        totals_match,
    }
}

/// Spectral majorization checks lambda(rho) < lambda(rho_A) and the B-side
/// analogue. A `false` on either side certifies entanglement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NielsenKempe {
    pub pass_a: bool,
    pub pass_b: bool,
}

pub fn nielsen_kempe_check(rho: &DensityMatrix) -> NielsenKempe {
    let spectrum = hermitian_eigensystem(rho.matrix())
        .expect("density matrix is Hermitian")
        .eigenvalues;
    let spec_a = hermitian_eigensystem(&reduced_density(rho, Subsystem::A))
        .expect("marginal is Hermitian")
        .eigenvalues;
    let spec_b = hermitian_eigensystem(&reduced_density(rho, Subsystem::B))
        .expect("marginal is Hermitian")
        .eigenvalues;
    NielsenKempe {
        pass_a: majorizes(&spectrum, &spec_a).holds,
        pass_b: majorizes(&spectrum, &spec_b).holds,
    }
}

/// Verify det(A + B) >= det(A) + det(B) for Hermitian PSD inputs of equal
/// dimension (the determinant superadditivity backing the D^2 upper bound).
pub fn det_superadditivity_check(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<bool> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::Dimension(format!(
            "superadditivity check needs equal shapes, got {}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "superadditivity check needs square matrices, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    for (name, m) in [("first", a), ("second", b)] {
        if m.hermiticity_error() > HERMITICITY_TOL {
            return Err(Error::Domain(format!(
                "{name} argument is not Hermitian within tolerance"
            )));
        }
        let eig = hermitian_eigensystem(m)?;
        if eig.eigenvalues[0] < -PSD_TOL {
            return Err(Error::Domain(format!(
                "{name} argument is not PSD: min eigenvalue {:.3e}",
                eig.eigenvalues[0]
            )));
        }
    }
    let sum = a.add(b)?;
    Ok(det_hermitian(&sum)? >= det_hermitian(a)? + det_hermitian(b)? - 1e-12)
}
