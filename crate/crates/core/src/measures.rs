//! Concurrence-type functionals on explicit states.
//!
//! Pure-state concurrence comes in two independently computed forms (the
//! marginal-purity expression and the twofold-copy observable built from
//! antisymmetric projectors); the second exists purely as a numerical
//! cross-check of the first. Wootters' spin-flip formula gives the exact
//! two-qubit mixed-state value, and D-concurrence is sqrt(det(I - rho_A))
//! on pure states.

use crate::error::{Error, Result};
use crate::linalg::{det_hermitian, det_lu_in_place, hermitian_eigensystem, ComplexMatrix, Subsystem};
use crate::states::{DensityMatrix, PureState};
use num_complex::Complex64;

/// Radicands closer to zero than this are treated as floating noise and
/// clamped; anything more negative is a genuine domain violation.
const RADICAND_NOISE: f64 = 1e-12;

/// Which pure-state functional a value (or a roof optimization) refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Concurrence,
    DConcurrence,
}

impl MeasureKind {
    /// Evaluate the pure-state functional.
    pub fn eval_pure(&self, psi: &PureState) -> Result<f64> {
        match self {
            MeasureKind::Concurrence => concurrence_pure(psi).map(|m| m.value),
            MeasureKind::DConcurrence => d_concurrence_pure(psi).map(|m| m.value),
        }
    }
}

impl std::fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeasureKind::Concurrence => write!(f, "concurrence"),
            MeasureKind::DConcurrence => write!(f, "d_concurrence"),
        }
    }
}

/// A non-negative measure value tagged with the functional it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureValue {
    pub value: f64,
    pub kind: MeasureKind,
}

impl MeasureValue {
    fn new(value: f64, kind: MeasureKind) -> Self {
        debug_assert!(value.is_finite() && value >= 0.0);
        Self { value, kind }
    }
}

fn clamped_sqrt(radicand: f64, context: &str) -> Result<f64> {
    if radicand < -RADICAND_NOISE {
        return Err(Error::Numerical(format!(
            "{context}: radicand {radicand:.3e} below the -1e-12 noise window"
        )));
    }
    Ok(radicand.max(0.0).sqrt())
}

fn frobenius_sq(m: &ComplexMatrix) -> f64 {
    m.data().iter().map(|z| z.norm_sqr()).sum()
}

/// Pure-state concurrence sqrt(2 [1 - Tr rho_A^2]).
pub fn concurrence_pure(psi: &PureState) -> Result<MeasureValue> {
    let red = psi.reduced(Subsystem::A);
    // Tr rho^2 = sum |rho_ij|^2 for Hermitian rho.
    let radicand = 2.0 * (1.0 - frobenius_sq(&red));
    let value = clamped_sqrt(radicand, "concurrence_pure")?;
    Ok(MeasureValue::new(value, MeasureKind::Concurrence))
}

/// Swap operator on C^d (x) C^d.
fn swap_operator(d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m.set(i * d + j, j * d + i, Complex64::new(1.0, 0.0));
        }
    }
    m
}

/// Projector onto the antisymmetric subspace of C^d (x) C^d: (I - SWAP)/2.
fn antisymmetric_projector(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d * d)
        .sub(&swap_operator(d))
        .expect("shapes agree")
        .scale(Complex64::new(0.5, 0.0))
}

/// Pure-state concurrence evaluated as the twofold-copy observable
/// sqrt(<Psi (x) Psi| 4 P_-^A (x) P_-^B |Psi (x) Psi>).
///
/// Independent cross-check of [`concurrence_pure`]: it builds the projector
/// matrix explicitly and never touches a partial trace.
pub fn concurrence_pure_twofold(psi: &PureState) -> Result<MeasureValue> {
    let (d_a, d_b) = (psi.d_a(), psi.d_b());
    let amps = psi.amplitudes();

    // |Psi> (x) |Psi> regrouped from (A1 B1 A2 B2) to (A1 A2 B1 B2) so the
    // copy pairs line up with P_-^A (x) P_-^B.
    let dim = d_a * d_a * d_b * d_b;
    let mut doubled = vec![Complex64::new(0.0, 0.0); dim];
    for a1 in 0..d_a {
        for b1 in 0..d_b {
            for a2 in 0..d_a {
                for b2 in 0..d_b {
                    let idx = ((a1 * d_a + a2) * d_b + b1) * d_b + b2;
                    doubled[idx] = amps[a1 * d_b + b1] * amps[a2 * d_b + b2];
                }
            }
        }
    }

    let observable = antisymmetric_projector(d_a)
        .tensor(&antisymmetric_projector(d_b))
        .scale(Complex64::new(4.0, 0.0));
    let applied = observable.matvec(&doubled)?;
    let expectation: Complex64 = doubled
        .iter()
        .zip(&applied)
        .map(|(a, b)| a.conj() * b)
        .sum();
    let value = clamped_sqrt(expectation.re, "concurrence_pure_twofold")?;
    Ok(MeasureValue::new(value, MeasureKind::Concurrence))
}

/// sigma_y (x) sigma_y in the computational basis.
fn spin_flip_operator() -> ComplexMatrix {
    let mut y = ComplexMatrix::zeros(4, 4);
    y.set(0, 3, Complex64::new(-1.0, 0.0));
    y.set(1, 2, Complex64::new(1.0, 0.0));
    y.set(2, 1, Complex64::new(1.0, 0.0));
    y.set(3, 0, Complex64::new(-1.0, 0.0));
    y
}

/// Hermitian square root of a PSD matrix, clamping eigenvalue noise at zero.
fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigensystem(m)?;
    let n = m.rows();
    let v = &eig.eigenvectors;
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let root = lambda.max(0.0).sqrt();
        if root == 0.0 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                let add = v.get(i, k) * v.get(j, k).conj() * root;
                out.set(i, j, out.get(i, j) + add);
            }
        }
    }
    Ok(out)
}

/// Wootters' exact two-qubit mixed-state concurrence:
/// max{l1 - l2 - l3 - l4, 0} with l_i the decreasing square roots of the
/// eigenvalues of rho (sy (x) sy) rho* (sy (x) sy).
///
/// The eigenvalues are taken from the Hermitian-equivalent PSD form
/// sqrt(rho) (sy (x) sy) rho* (sy (x) sy) sqrt(rho), which shares the
/// spectrum and keeps the solver Hermitian-only.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<MeasureValue> {
    if rho.d_a() != 2 || rho.d_b() != 2 {
        return Err(Error::Dimension(format!(
            "Wootters concurrence requires a two-qubit state, got dA={}, dB={}",
            rho.d_a(),
            rho.d_b()
        )));
    }
    let y = spin_flip_operator();
    let root = sqrt_psd(rho.matrix())?;
    let flipped = y.matmul(&rho.matrix().conj())?.matmul(&y)?;
    let herm = root.matmul(&flipped)?.matmul(&root)?;
    let eig = hermitian_eigensystem(&herm)?;
    // Eigenvalues within the solver's noise floor of zero are flushed to
    // exact zero before the square root; the root would otherwise amplify
    // 1e-15-level noise into 1e-8-level lambdas.
    let floor = 1e-14 * eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    let mut lambdas = Vec::with_capacity(4);
    for &v in &eig.eigenvalues {
        if v < -RADICAND_NOISE {
            return Err(Error::Numerical(format!(
                "spin-flip spectrum has eigenvalue {v:.3e} below the noise window"
            )));
        }
        lambdas.push(if v <= floor { 0.0 } else { v.sqrt() });
    }
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let value = (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0);
    Ok(MeasureValue::new(value, MeasureKind::Concurrence))
}

/// Two-qubit pure-state concurrence in its determinant form 2 sqrt(det rho_A).
pub fn concurrence_two_qubit_pure(psi: &PureState) -> Result<MeasureValue> {
    if psi.d_a() != 2 || psi.d_b() != 2 {
        return Err(Error::Dimension(format!(
            "two-qubit concurrence form requires dA=dB=2, got ({}, {})",
            psi.d_a(),
            psi.d_b()
        )));
    }
    let det = det_hermitian(&psi.reduced(Subsystem::A))?;
    let value = 2.0 * clamped_sqrt(det, "concurrence_two_qubit_pure")?;
    Ok(MeasureValue::new(value, MeasureKind::Concurrence))
}

/// Pure-state D-concurrence sqrt(det(I - rho_A)).
pub fn d_concurrence_pure(psi: &PureState) -> Result<MeasureValue> {
    d_concurrence_side(psi, Subsystem::A)
}

/// Exploratory variant traced over the other side, sqrt(det(I - rho_B)).
/// The defining formula uses rho_A; equality of the two sides for dA != dB
/// is not established, so this is exposed separately.
pub fn d_concurrence_pure_b(psi: &PureState) -> Result<MeasureValue> {
    d_concurrence_side(psi, Subsystem::B)
}

fn d_concurrence_side(psi: &PureState, keep: Subsystem) -> Result<MeasureValue> {
    let red = psi.reduced(keep);
    let gap = ComplexMatrix::identity(red.rows())
        .sub(&red)
        .expect("shapes agree");
    let det = det_hermitian(&gap)?;
    let value = clamped_sqrt(det, "d_concurrence_pure")?;
    Ok(MeasureValue::new(value, MeasureKind::DConcurrence))
}

/// Weighted measure contribution of an unnormalized ensemble member:
/// returns ||phi||^2 * measure(phi / ||phi||) without allocating.
///
/// `red` is scratch of length d_a * d_a. Radicand noise is clamped at zero;
/// by construction the inputs cannot leave the valid domain by more than
/// floating noise.
pub(crate) fn weighted_measure_unnormalized(
    kind: MeasureKind,
    phi: &[Complex64],
    d_a: usize,
    d_b: usize,
    red: &mut [Complex64],
) -> f64 {
    debug_assert_eq!(phi.len(), d_a * d_b);
    debug_assert_eq!(red.len(), d_a * d_a);
    let weight: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
    if weight < 1e-18 {
        return 0.0;
    }
    // Unnormalized reduced operator of phi on side A.
    for i in 0..d_a {
        for j in i..d_a {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..d_b {
                s += phi[i * d_b + k] * phi[j * d_b + k].conj();
            }
            red[i * d_a + j] = s;
            if i != j {
                red[j * d_a + i] = s.conj();
            }
        }
    }
    match kind {
        MeasureKind::Concurrence => {
            // w * sqrt(2 (1 - Tr rho_A^2)) = sqrt(2 (w^2 - Tr rho_u^2)).
            let fro: f64 = red.iter().map(|z| z.norm_sqr()).sum();
            (2.0 * (weight * weight - fro)).max(0.0).sqrt()
        }
        MeasureKind::DConcurrence => {
            // w * sqrt(det(I - rho_u / w)).
            let inv = 1.0 / weight;
            for i in 0..d_a {
                for j in 0..d_a {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    red[i * d_a + j] = Complex64::new(delta, 0.0) - red[i * d_a + j] * inv;
                }
            }
            let det = det_lu_in_place(red, d_a).re;
            weight * det.max(0.0).sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell_state, density_from_pure, haar_random_pure, max_entangled, random_isometry, werner_state};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn product_zero_plus() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(2, 2, vec![c(s, 0.0), c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap()
    }

    #[test]
    fn concurrence_vanishes_on_product_states() {
        let psi = product_zero_plus();
        assert!(concurrence_pure(&psi).unwrap().value < 1e-7);
        assert!(concurrence_pure_twofold(&psi).unwrap().value < 1e-7);
        assert!(d_concurrence_pure(&psi).unwrap().value < 1e-7);
    }

    #[test]
    fn concurrence_of_bell_state_is_one() {
        let bell = bell_state();
        assert!((concurrence_pure(&bell).unwrap().value - 1.0).abs() < 1e-12);
        assert!((concurrence_pure_twofold(&bell).unwrap().value - 1.0).abs() < 1e-12);
        assert!((concurrence_two_qubit_pure(&bell).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn concurrence_of_max_entangled_qutrit() {
        let psi = max_entangled(3);
        let expected = (2.0f64 * (1.0 - 1.0 / 3.0)).sqrt();
        assert!((concurrence_pure(&psi).unwrap().value - expected).abs() < 1e-12);
    }

    #[test]
    fn d_concurrence_closed_forms() {
        assert!((d_concurrence_pure(&bell_state()).unwrap().value - 0.5).abs() < 1e-12);
        let expected = (8.0f64 / 27.0).sqrt();
        assert!((d_concurrence_pure(&max_entangled(3)).unwrap().value - expected).abs() < 1e-12);
    }

    #[test]
    fn twofold_oracle_agrees_with_marginal_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (d_a, d_b) in [(2, 2), (2, 3), (3, 2), (3, 3), (2, 4), (3, 4)] {
            for _ in 0..30 {
                let psi = haar_random_pure(d_a, d_b, &mut rng);
                let a = concurrence_pure(&psi).unwrap().value;
                let b = concurrence_pure_twofold(&psi).unwrap().value;
                assert!((a - b).abs() <= 1e-10, "dims ({d_a},{d_b}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn concurrence_symmetric_under_traced_side() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..50 {
            let psi = haar_random_pure(3, 4, &mut rng);
            let via_a = concurrence_pure(&psi).unwrap().value;
            let red_b = psi.reduced(Subsystem::B);
            let via_b = (2.0 * (1.0 - frobenius_sq(&red_b))).max(0.0).sqrt();
            assert!((via_a - via_b).abs() < 1e-12);
        }
    }

    #[test]
    fn wootters_on_bell_projector() {
        let rho = density_from_pure(&bell_state());
        assert!((wootters_concurrence(&rho).unwrap().value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn wootters_on_werner_example() {
        // C^2(rho_f) = f^2, so f = -1/2 gives C = 1/2.
        let rho = werner_state(2, -0.5).unwrap();
        assert!((wootters_concurrence(&rho).unwrap().value - 0.5).abs() < 1e-10);
    }

    #[test]
    fn wootters_on_pure_product_is_zero() {
        let rho = density_from_pure(&product_zero_plus());
        assert!(wootters_concurrence(&rho).unwrap().value < 1e-7);
    }

    #[test]
    fn wootters_rejects_non_two_qubit_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let rho = crate::states::ginibre_random_density(2, 3, 6, &mut rng).unwrap();
        assert!(matches!(
            wootters_concurrence(&rho),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn wootters_matches_pure_determinant_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..50 {
            let psi = haar_random_pure(2, 2, &mut rng);
            let exact = concurrence_two_qubit_pure(&psi).unwrap().value;
            let mixed = wootters_concurrence(&density_from_pure(&psi)).unwrap().value;
            assert!((exact - mixed).abs() <= 1e-8);
        }
    }

    #[test]
    fn two_qubit_determinant_form_examples() {
        let ket00 = PureState::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        assert!(concurrence_two_qubit_pure(&ket00).unwrap().value < 1e-12);

        let theta = std::f64::consts::PI / 6.0;
        let psi = PureState::new(
            2,
            2,
            vec![c(theta.cos(), 0.0), c(0.0, 0.0), c(0.0, 0.0), c(theta.sin(), 0.0)],
        )
        .unwrap();
        let expected = (2.0 * theta).sin(); // = sqrt(3)/2 at pi/6
        assert!((concurrence_two_qubit_pure(&psi).unwrap().value - expected).abs() < 1e-12);
        assert!((expected - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_qubit_determinant_form_is_side_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..50 {
            let psi = haar_random_pure(2, 2, &mut rng);
            let via_a = concurrence_two_qubit_pure(&psi).unwrap().value;
            let det_b = det_hermitian(&psi.reduced(Subsystem::B)).unwrap();
            let via_b = 2.0 * det_b.max(0.0).sqrt();
            assert!((via_a - via_b).abs() < 1e-12);
            assert!((via_a - concurrence_pure(&psi).unwrap().value).abs() < 1e-12);
        }
    }

    #[test]
    fn proposition_one_pure_two_qubit_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        for _ in 0..200 {
            let psi = haar_random_pure(2, 2, &mut rng);
            let d = d_concurrence_pure(&psi).unwrap().value;
            let half_c = concurrence_two_qubit_pure(&psi).unwrap().value / 2.0;
            assert!((d - half_c).abs() <= 1e-10);
        }
    }

    #[test]
    fn measures_invariant_under_local_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        for (d_a, d_b) in [(2, 2), (2, 3)] {
            let psi = haar_random_pure(d_a, d_b, &mut rng);
            let u = random_isometry(d_a, d_a, &mut rng);
            let v = random_isometry(d_b, d_b, &mut rng);
            let rotated_amps = u.tensor(&v).matvec(psi.amplitudes()).unwrap();
            let rotated = PureState::new(d_a, d_b, rotated_amps).unwrap();
            for (f, tol) in [
                (concurrence_pure as fn(&PureState) -> Result<MeasureValue>, 1e-10),
                (concurrence_pure_twofold, 1e-10),
                (d_concurrence_pure, 1e-10),
                (d_concurrence_pure_b, 1e-10),
            ] {
                let before = f(&psi).unwrap().value;
                let after = f(&rotated).unwrap().value;
                assert!((before - after).abs() <= tol);
            }
        }
    }

    #[test]
    fn weighted_contribution_matches_public_measures() {
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        for (d_a, d_b) in [(2, 2), (2, 3), (3, 3)] {
            let n = d_a * d_b;
            let mut red = vec![c(0.0, 0.0); d_a * d_a];
            for _ in 0..20 {
                let phi: Vec<Complex64> = (0..n)
                    .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect();
                let weight: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
                let normed: Vec<Complex64> =
                    phi.iter().map(|z| z / weight.sqrt()).collect();
                let psi = PureState::new(d_a, d_b, normed).unwrap();
                for kind in [MeasureKind::Concurrence, MeasureKind::DConcurrence] {
                    let fast = weighted_measure_unnormalized(kind, &phi, d_a, d_b, &mut red);
                    let slow = weight * kind.eval_pure(&psi).unwrap();
                    assert!((fast - slow).abs() <= 1e-10 * slow.max(1.0));
                }
            }
        }
    }

    #[test]
    fn radicand_clamp_window_is_enforced() {
        assert!(clamped_sqrt(-0.5e-12, "test").unwrap() == 0.0);
        assert!(matches!(
            clamped_sqrt(-1e-6, "test"),
            Err(Error::Numerical(_))
        ));
    }
}
