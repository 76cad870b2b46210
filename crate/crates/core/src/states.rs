//! Bipartite state types and generators.
//!
//! All bipartite objects carry their subsystem dimensions `(dA, dB)` and use
//! the composite index `i * dB + k`. Random generators take an explicit RNG
//! so every experiment is reproducible from a seed; a single RNG instance
//! must not be shared across concurrent callers.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, ComplexMatrix, Subsystem};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Absolute floor on density-matrix eigenvalues; anything below is rejected
/// at construction because downstream determinants are sign-sensitive.
pub const PSD_TOL: f64 = 1e-9;

/// Normalized bipartite pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    d_a: usize,
    d_b: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(d_a: usize, d_b: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if d_a < 2 || d_b < 2 {
            return Err(Error::Dimension(format!(
                "bipartite state requires dA >= 2 and dB >= 2, got ({d_a}, {d_b})"
            )));
        }
        if amplitudes.len() != d_a * d_b {
            return Err(Error::Dimension(format!(
                "amplitude count {} does not match dA*dB = {}",
                amplitudes.len(),
                d_a * d_b
            )));
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Domain("amplitudes contain a non-finite entry".into()));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "state vector is not normalized: |norm - 1| = {:.3e}",
                (norm - 1.0).abs()
            )));
        }
        Ok(Self {
            d_a,
            d_b,
            amplitudes,
        })
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Reduced density matrix of one subsystem, computed directly from the
    /// amplitudes. Hermitian by construction.
    pub fn reduced(&self, keep: Subsystem) -> ComplexMatrix {
        reduced_of_amplitudes(&self.amplitudes, self.d_a, self.d_b, keep)
    }
}

pub(crate) fn reduced_of_amplitudes(
    amps: &[Complex64],
    d_a: usize,
    d_b: usize,
    keep: Subsystem,
) -> ComplexMatrix {
    match keep {
        Subsystem::A => {
            let mut out = ComplexMatrix::zeros(d_a, d_a);
            for i in 0..d_a {
                for j in i..d_a {
                    let mut s = Complex64::new(0.0, 0.0);
                    for k in 0..d_b {
                        s += amps[i * d_b + k] * amps[j * d_b + k].conj();
                    }
                    out.set(i, j, s);
                    if i != j {
                        out.set(j, i, s.conj());
                    }
                }
            }
            out
        }
        Subsystem::B => {
            let mut out = ComplexMatrix::zeros(d_b, d_b);
            for k in 0..d_b {
                for l in k..d_b {
                    let mut s = Complex64::new(0.0, 0.0);
                    for i in 0..d_a {
                        s += amps[i * d_b + k] * amps[i * d_b + l].conj();
                    }
                    out.set(k, l, s);
                    if k != l {
                        out.set(l, k, s.conj());
                    }
                }
            }
            out
        }
    }
}

/// Hermitian, positive-semidefinite, unit-trace bipartite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    d_a: usize,
    d_b: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(d_a: usize, d_b: usize, matrix: ComplexMatrix) -> Result<Self> {
        if d_a < 2 || d_b < 2 {
            return Err(Error::Dimension(format!(
                "bipartite state requires dA >= 2 and dB >= 2, got ({d_a}, {d_b})"
            )));
        }
        let n = d_a * d_b;
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, expected {n}x{n} for dA={d_a}, dB={d_b}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herm = matrix.hermiticity_error();
        if herm > 1e-10 {
            return Err(Error::Domain(format!(
                "density matrix is not Hermitian: max deviation {herm:.3e}"
            )));
        }
        let tr = matrix.trace()?;
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::Domain(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        let eig = hermitian_eigensystem(&matrix)?;
        if eig.eigenvalues[0] < -PSD_TOL {
            return Err(Error::Domain(format!(
                "density matrix is not positive semidefinite: min eigenvalue {:.3e}",
                eig.eigenvalues[0]
            )));
        }
        Ok(Self { d_a, d_b, matrix })
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Tr(rho^2).
    pub fn purity(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let prod = self.matrix.get(i, j) * self.matrix.get(j, i);
                acc += prod.re;
            }
        }
        acc
    }

    /// Ascending spectrum.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eigensystem(&self.matrix)?.eigenvalues)
    }
}

/// Weighted pure-state ensemble representing some density matrix.
#[derive(Debug, Clone)]
pub struct Decomposition {
    weights: Vec<f64>,
    members: Vec<PureState>,
}

impl Decomposition {
    pub fn new(weights: Vec<f64>, members: Vec<PureState>) -> Result<Self> {
        if weights.len() != members.len() || weights.is_empty() {
            return Err(Error::Dimension(format!(
                "ensemble has {} weights but {} members",
                weights.len(),
                members.len()
            )));
        }
        if weights.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::Domain("ensemble weights must be >= 0".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!(
                "ensemble weights sum to {total}, expected 1 within 1e-10"
            )));
        }
        let (d_a, d_b) = (members[0].d_a(), members[0].d_b());
        if members.iter().any(|m| m.d_a() != d_a || m.d_b() != d_b) {
            return Err(Error::Dimension(
                "ensemble members have inconsistent dimensions".into(),
            ));
        }
        Ok(Self { weights, members })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn members(&self) -> &[PureState] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Assemble sum_i p_i |psi_i><psi_i|.
    pub fn assemble(&self) -> ComplexMatrix {
        let n = self.members[0].dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (p, psi) in self.weights.iter().zip(&self.members) {
            let amps = psi.amplitudes();
            for i in 0..n {
                for j in 0..n {
                    let v = out.get(i, j) + amps[i] * amps[j].conj() * *p;
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Max-abs deviation between the assembled ensemble and `rho`.
    pub fn reconstruction_error(&self, rho: &DensityMatrix) -> f64 {
        self.assemble()
            .sub(rho.matrix())
            .map(|d| d.max_abs())
            .unwrap_or(f64::INFINITY)
    }
}

/// Rank-1 projector |psi><psi|.
pub fn density_from_pure(psi: &PureState) -> DensityMatrix {
    let n = psi.dim();
    let amps = psi.amplitudes();
    let m = ComplexMatrix::from_fn(n, n, |i, j| amps[i] * amps[j].conj());
    DensityMatrix::new(psi.d_a(), psi.d_b(), m).expect("outer product of a unit vector is a state")
}

/// Reduced density matrix of a mixed state; delegates to the partial trace.
pub fn reduced_density(rho: &DensityMatrix, keep: Subsystem) -> ComplexMatrix {
    rho.matrix()
        .partial_trace(rho.d_a(), rho.d_b(), keep)
        .expect("stored dimensions are consistent")
}

/// Werner family rho_f = [(N - f) I + (N f - 1) P] / (N^3 - N) on C^N (x) C^N,
/// where P is the swap operator. Spectrum: (1+f)/(N(N+1)) on the symmetric
/// subspace, (1-f)/(N(N-1)) on the antisymmetric one.
pub fn werner_state(n: usize, f: f64) -> Result<DensityMatrix> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "Werner state requires N >= 2, got {n}"
        )));
    }
    if !(-1.0..=1.0).contains(&f) || !f.is_finite() {
        return Err(Error::Domain(format!(
            "Werner parameter must satisfy -1 <= f <= 1, got {f}"
        )));
    }
    let dim = n * n;
    let denom = (n * n * n - n) as f64;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for i in 0..n {
        for j in 0..n {
            // (N - f) I
            let diag = m.get(i * n + j, i * n + j) + Complex64::new((n as f64 - f) / denom, 0.0);
            m.set(i * n + j, i * n + j, diag);
            // (N f - 1) P with P = sum |ij><ji|
            let swap = m.get(i * n + j, j * n + i) + Complex64::new((n as f64 * f - 1.0) / denom, 0.0);
            m.set(i * n + j, j * n + i, swap);
        }
    }
    DensityMatrix::new(n, n, m)
}

/// Haar-random bipartite pure state: i.i.d. standard complex Gaussian
/// amplitudes, normalized.
pub fn haar_random_pure<R: Rng + ?Sized>(d_a: usize, d_b: usize, rng: &mut R) -> PureState {
    let n = d_a * d_b;
    let mut amps: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut amps {
        *z /= norm;
    }
    PureState::new(d_a, d_b, amps).expect("normalized Gaussian vector is a valid state")
}

/// PSD, unit-trace matrix G G^dag / Tr(G G^dag) with G a d x rank complex
/// Gaussian matrix.
pub(crate) fn ginibre_matrix<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, rank, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let m = g.matmul(&g.adjoint()).expect("shapes agree by construction");
    let tr = m.trace().expect("square").re;
    m.scale(Complex64::new(1.0 / tr, 0.0))
}

/// Random density matrix of bounded rank from the Ginibre ensemble.
pub fn ginibre_random_density<R: Rng + ?Sized>(
    d_a: usize,
    d_b: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let n = d_a * d_b;
    if rank == 0 || rank > n {
        return Err(Error::Domain(format!(
            "rank must satisfy 1 <= rank <= dA*dB = {n}, got {rank}"
        )));
    }
    let m = ginibre_matrix(n, rank, rng);
    DensityMatrix::new(d_a, d_b, m)
}

/// Convex combination of random product states: separable by construction.
/// Each factor is rank-1 with probability 1/2, otherwise full-rank Ginibre.
pub fn random_separable<R: Rng + ?Sized>(
    d_a: usize,
    d_b: usize,
    terms: usize,
    rng: &mut R,
) -> DensityMatrix {
    assert!(terms >= 1, "separable mixture needs at least one term");
    let n = d_a * d_b;
    let mut weights: Vec<f64> = (0..terms).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut m = ComplexMatrix::zeros(n, n);
    for &w in &weights {
        let rank_a = if rng.random::<bool>() { 1 } else { d_a };
        let rank_b = if rng.random::<bool>() { 1 } else { d_b };
        let fa = ginibre_matrix(d_a, rank_a, rng);
        let fb = ginibre_matrix(d_b, rank_b, rng);
        m = m
            .add(&fa.tensor(&fb).scale(Complex64::new(w, 0.0)))
            .expect("accumulator shape is fixed");
    }
    DensityMatrix::new(d_a, d_b, m).expect("convex mix of product states is a state")
}

/// Maximally entangled state (1/sqrt(d)) sum_i |ii>.
pub fn max_entangled(d: usize) -> PureState {
    assert!(d >= 2, "maximally entangled state needs d >= 2");
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        amps[i * d + i] = amp;
    }
    PureState::new(d, d, amps).expect("constructed normalized")
}

/// Two-qubit Bell state (|00> + |11>)/sqrt(2).
pub fn bell_state() -> PureState {
    max_entangled(2)
}

/// Random matrix with orthonormal columns (modified Gram-Schmidt with
/// reorthogonalization on complex Gaussian columns).
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(
        rows >= cols && cols >= 1,
        "isometry needs rows >= cols >= 1"
    );
    let mut q: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    while q.len() < cols {
        let mut v: Vec<Complex64> = (0..rows)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        for _ in 0..2 {
            for col in &q {
                let overlap: Complex64 = col.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ci) in v.iter_mut().zip(col) {
                    *vi -= overlap * ci;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue; // degenerate draw, retry
        }
        for z in &mut v {
            *z /= norm;
        }
        q.push(v);
    }
    ComplexMatrix::from_fn(rows, cols, |i, j| q[j][i])
}

// --- JSON wire formats -----------------------------------------------------
//
// DensityMatrix: {"dA": n, "dB": m, "matrix": [[re, im], ...]} row-major.
// PureState:     {"dA": n, "dB": m, "amplitudes": [[re, im], ...]}.

#[derive(Serialize, Deserialize)]
struct DensityMatrixRepr {
    #[serde(rename = "dA")]
    d_a: usize,
    #[serde(rename = "dB")]
    d_b: usize,
    matrix: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct PureStateRepr {
    #[serde(rename = "dA")]
    d_a: usize,
    #[serde(rename = "dB")]
    d_b: usize,
    amplitudes: Vec<[f64; 2]>,
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DensityMatrixRepr {
            d_a: self.d_a,
            d_b: self.d_b,
            matrix: self.matrix.data().iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = DensityMatrixRepr::deserialize(deserializer)?;
        let n = repr.d_a * repr.d_b;
        if repr.matrix.len() != n * n {
            return Err(D::Error::custom(format!(
                "field `matrix` has {} entries, expected {} for dA={}, dB={}",
                repr.matrix.len(),
                n * n,
                repr.d_a,
                repr.d_b
            )));
        }
        let data = repr
            .matrix
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        let m = ComplexMatrix::new(n, n, data)
            .map_err(|e| D::Error::custom(format!("field `matrix`: {e}")))?;
        DensityMatrix::new(repr.d_a, repr.d_b, m)
            .map_err(|e| D::Error::custom(format!("field `matrix`: {e}")))
    }
}

impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PureStateRepr {
            d_a: self.d_a,
            d_b: self.d_b,
            amplitudes: self.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PureStateRepr::deserialize(deserializer)?;
        let amps = repr
            .amplitudes
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        PureState::new(repr.d_a, repr.d_b, amps)
            .map_err(|e| D::Error::custom(format!("field `amplitudes`: {e}")))
    }
}

impl Serialize for Decomposition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            weights: &'a [f64],
            members: Vec<Vec<[f64; 2]>>,
        }
        Repr {
            weights: &self.weights,
            members: self
                .members
                .iter()
                .map(|m| m.amplitudes().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
        .serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::det_hermitian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn density_from_pure_basis_state() {
        let psi = PureState::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let rho = density_from_pure(&psi);
        assert!((rho.matrix().get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((rho.purity() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn density_from_pure_bell_corners() {
        let rho = density_from_pure(&bell_state());
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((rho.matrix().get(i, j) - c(0.5, 0.0)).norm() < 1e-15);
        }
        assert!((rho.matrix().get(1, 1)).norm() < 1e-15);
    }

    #[test]
    fn density_from_pure_has_unit_purity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let psi = haar_random_pure(3, 2, &mut rng);
            let rho = density_from_pure(&psi);
            assert!((rho.purity() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_reduced_matches_partial_trace_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = haar_random_pure(2, 3, &mut rng);
        let rho = density_from_pure(&psi);
        for keep in [Subsystem::A, Subsystem::B] {
            let direct = psi.reduced(keep);
            let via_trace = reduced_density(&rho, keep);
            assert!(direct.sub(&via_trace).unwrap().max_abs() < 1e-13);
        }
    }

    #[test]
    fn werner_half_is_maximally_mixed() {
        let rho = werner_state(2, 0.5).unwrap();
        let expected = ComplexMatrix::identity(4).scale(c(0.25, 0.0));
        assert!(rho.matrix().sub(&expected).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn werner_minus_half_spectrum() {
        let rho = werner_state(2, -0.5).unwrap();
        let eig = rho.eigenvalues().unwrap();
        let expected = [1.0 / 12.0, 1.0 / 12.0, 1.0 / 12.0, 0.75];
        for (got, want) in eig.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn werner_spectrum_closed_form_sweep() {
        for n in [2usize, 3, 4] {
            for f in [-1.0, -0.5, 0.0, 0.5, 1.0] {
                let rho = werner_state(n, f).unwrap();
                let sym = (1.0 + f) / (n as f64 * (n as f64 + 1.0));
                let anti = (1.0 - f) / (n as f64 * (n as f64 - 1.0));
                let mut expected: Vec<f64> = std::iter::repeat(sym)
                    .take(n * (n + 1) / 2)
                    .chain(std::iter::repeat(anti).take(n * (n - 1) / 2))
                    .collect();
                expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let eig = rho.eigenvalues().unwrap();
                for (got, want) in eig.iter().zip(expected) {
                    assert!(
                        (got - want).abs() < 1e-12,
                        "N={n} f={f}: eigenvalue {got} expected {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn werner_marginals_are_maximally_mixed() {
        for n in [2usize, 3] {
            for f in [-0.7, 0.3, 1.0] {
                let rho = werner_state(n, f).unwrap();
                assert!((rho.matrix().trace().unwrap() - c(1.0, 0.0)).norm() < 1e-12);
                let expected = ComplexMatrix::identity(n).scale(c(1.0 / n as f64, 0.0));
                for keep in [Subsystem::A, Subsystem::B] {
                    let red = reduced_density(&rho, keep);
                    assert!(red.sub(&expected).unwrap().max_abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn werner_rejects_out_of_range_parameters() {
        assert!(matches!(werner_state(1, 0.0), Err(Error::Domain(_))));
        assert!(matches!(werner_state(2, 1.5), Err(Error::Domain(_))));
        assert!(matches!(werner_state(2, -1.0001), Err(Error::Domain(_))));
        assert!(matches!(werner_state(2, f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn haar_draws_are_normalized_and_reproducible() {
        let mut rng_a = ChaCha8Rng::seed_from_u64(99);
        let mut rng_b = ChaCha8Rng::seed_from_u64(99);
        let psi_a = haar_random_pure(2, 2, &mut rng_a);
        let psi_b = haar_random_pure(2, 2, &mut rng_b);
        assert_eq!(psi_a.amplitudes(), psi_b.amplitudes());
        let norm: f64 = psi_a.amplitudes().iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_mean_marginal_purity_matches_known_moment() {
        // E[Tr rho_A^2] = (dA + dB) / (dA*dB + 1) = 0.8 at dA = dB = 2.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let samples = 10_000;
        let mut acc = 0.0;
        for _ in 0..samples {
            let psi = haar_random_pure(2, 2, &mut rng);
            let red = psi.reduced(Subsystem::A);
            acc += red.data().iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        let mean = acc / samples as f64;
        assert!((mean - 0.8).abs() < 0.01, "mean purity {mean}");
    }

    #[test]
    fn ginibre_rank_one_is_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = ginibre_random_density(2, 2, 1, &mut rng).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ginibre_full_rank_is_psd_and_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = ginibre_random_density(2, 3, 6, &mut rng).unwrap();
        let eig = rho.eigenvalues().unwrap();
        assert!(eig[0] >= -1e-12);
        let mut rng2 = ChaCha8Rng::seed_from_u64(5);
        let rho2 = ginibre_random_density(2, 3, 6, &mut rng2).unwrap();
        assert_eq!(rho.matrix().data(), rho2.matrix().data());
    }

    #[test]
    fn ginibre_rejects_bad_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        assert!(matches!(
            ginibre_random_density(2, 2, 0, &mut rng),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            ginibre_random_density(2, 2, 5, &mut rng),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn separable_single_pure_term_is_product_pure() {
        // Find a deterministic seed whose single term drew two rank-1 factors.
        let mut found = None;
        for seed in 0..32 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_separable(2, 2, 1, &mut rng);
            if (rho.purity() - 1.0).abs() < 1e-10 {
                found = Some(rho);
                break;
            }
        }
        let rho = found.expect("some seed draws two pure factors");
        // Purification check: the top eigenvector is a product state, so
        // I - rho_A is singular.
        let eig = hermitian_eigensystem(rho.matrix()).unwrap();
        let n = rho.dim();
        let top: Vec<Complex64> = (0..n).map(|i| eig.eigenvectors.get(i, n - 1)).collect();
        let psi = PureState::new(2, 2, top).unwrap();
        let gap = ComplexMatrix::identity(2).sub(&psi.reduced(Subsystem::A)).unwrap();
        assert!(det_hermitian(&gap).unwrap().abs() < 1e-10);
    }

    #[test]
    fn max_entangled_marginals() {
        for d in [2usize, 3] {
            let psi = max_entangled(d);
            let red = psi.reduced(Subsystem::A);
            let expected = ComplexMatrix::identity(d).scale(c(1.0 / d as f64, 0.0));
            assert!(red.sub(&expected).unwrap().max_abs() < 1e-15);
        }
    }

    #[test]
    fn random_isometry_has_orthonormal_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = random_isometry(6, 3, &mut rng);
        let gram = u.adjoint().matmul(&u).unwrap();
        assert!(gram.sub(&ComplexMatrix::identity(3)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn density_matrix_json_round_trip() {
        let rho = werner_state(2, -0.5).unwrap();
        let json = serde_json::to_string(&rho).unwrap();
        assert!(json.contains("\"dA\":2"));
        assert!(json.contains("\"matrix\""));
        let back: DensityMatrix = serde_json::from_str(&json).unwrap();
        assert!(rho.matrix().sub(back.matrix()).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn pure_state_json_round_trip() {
        let psi = bell_state();
        let json = serde_json::to_string(&psi).unwrap();
        let back: PureState = serde_json::from_str(&json).unwrap();
        assert_eq!(psi.amplitudes(), back.amplitudes());
    }

    #[test]
    fn density_matrix_json_rejects_invalid_states() {
        // Wrong trace.
        let bad = r#"{"dA":2,"dB":2,"matrix":[[2,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]]}"#;
        let err = serde_json::from_str::<DensityMatrix>(bad).unwrap_err();
        assert!(err.to_string().contains("trace"));
        // Wrong entry count.
        let short = r#"{"dA":2,"dB":2,"matrix":[[1,0]]}"#;
        let err = serde_json::from_str::<DensityMatrix>(short).unwrap_err();
        assert!(err.to_string().contains("matrix"));
        // Missing field.
        let missing = r#"{"dA":2,"matrix":[]}"#;
        let err = serde_json::from_str::<DensityMatrix>(missing).unwrap_err();
        assert!(err.to_string().contains("dB"));
    }

    #[test]
    fn decomposition_validates_weights() {
        let psi = bell_state();
        assert!(Decomposition::new(vec![0.5, 0.5], vec![psi.clone(), psi.clone()]).is_ok());
        assert!(matches!(
            Decomposition::new(vec![0.5, 0.4], vec![psi.clone(), psi.clone()]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            Decomposition::new(vec![1.5, -0.5], vec![psi.clone(), psi]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn decomposition_reconstructs_source() {
        let rho = werner_state(2, -0.5).unwrap();
        let eig = hermitian_eigensystem(rho.matrix()).unwrap();
        let mut weights = Vec::new();
        let mut members = Vec::new();
        for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda <= 1e-12 {
                continue;
            }
            weights.push(lambda);
            let col: Vec<Complex64> = (0..4).map(|i| eig.eigenvectors.get(i, j)).collect();
            members.push(PureState::new(2, 2, col).unwrap());
        }
        let dec = Decomposition::new(weights, members).unwrap();
        assert!(dec.reconstruction_error(&rho) < 1e-12);
    }
}
