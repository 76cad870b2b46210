//! Convex-roof minimization over pure-state decompositions.
//!
//! Every decomposition of rho with rank r arises from the eigenensemble
//! {mu_j, |v_j>} through an m x r matrix u with orthonormal columns:
//! sqrt(p_i) |psi_i> = sum_j u_ij sqrt(mu_j) |v_j>. The optimizer walks this
//! isometry manifold with two-row complex Givens rotations (which preserve
//! orthonormality exactly) and a derivative-free golden-section line search
//! per rotation angle, restarted from random isometries. The result is an
//! upper estimate of the roof value: any decomposition upper-bounds the
//! minimum.

use crate::bounds::{d_lower_bound, mb_lower_bound_c2};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, ComplexMatrix};
use crate::measures::{weighted_measure_unnormalized, MeasureKind};
use crate::states::{random_isometry, Decomposition, DensityMatrix, PureState};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Eigenvalues of rho below this cutoff do not count toward its rank; the
/// corresponding eigenvectors would only contribute noise members.
pub const RANK_CUTOFF: f64 = 1e-12;

/// Ensemble members below this weight are pruned from decompositions.
const WEIGHT_CUTOFF: f64 = 1e-14;

/// Search parameters for [`minimize_roof`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoofConfig {
    /// Requested ensemble size m; the effective size is clamped into
    /// [rank, rank^2] (rank^2 members suffice for roof computations).
    pub ensemble_size: usize,
    /// Independent random restarts of the local search.
    pub restarts: usize,
    /// Maximum coordinate sweeps per restart.
    pub max_iterations: usize,
    /// Stop a restart when no rotation in a sweep exceeds this angle.
    pub step_tolerance: f64,
    /// Stop a restart when a full sweep improves the objective by less.
    pub value_tolerance: f64,
    /// Seed for the restart RNG streams.
    pub rng_seed: u64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        Self {
            ensemble_size: 16,
            restarts: 20,
            max_iterations: 2000,
            step_tolerance: 1e-7,
            value_tolerance: 1e-9,
            rng_seed: 0,
        }
    }
}

impl RoofConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            rng_seed: seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        if self.max_iterations < 1 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if !(self.step_tolerance > 0.0) || !(self.value_tolerance > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Best decomposition found by [`minimize_roof`], its average measure value,
/// and the tightest applicable closed-form lower bound.
#[derive(Debug, Clone)]
pub struct RoofEstimate {
    /// Best average measure across restarts (an upper estimate of the roof).
    pub value: f64,
    pub decomposition: Decomposition,
    /// Closed-form lower bound on the same scale as `value`.
    pub lower_bracket: f64,
    /// Whether the two best restarts agreed within 10 * value_tolerance.
    pub converged: bool,
    pub config: RoofConfig,
}

impl Serialize for RoofEstimate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("RoofEstimate", 7)?;
        s.serialize_field("value", &self.value)?;
        s.serialize_field("lower_bracket", &self.lower_bracket)?;
        s.serialize_field("converged", &self.converged)?;
        s.serialize_field("weights", &self.decomposition.weights())?;
        let members: Vec<Vec<[f64; 2]>> = self
            .decomposition
            .members()
            .iter()
            .map(|m| m.amplitudes().iter().map(|z| [z.re, z.im]).collect())
            .collect();
        s.serialize_field("members", &members)?;
        s.serialize_field("config", &self.config)?;
        s.serialize_field("seed", &self.config.rng_seed)?;
        s.end()
    }
}

/// Eigenensemble of rho restricted to eigenvalues above [`RANK_CUTOFF`],
/// ordered by decreasing eigenvalue.
fn kept_eigenensemble(rho: &DensityMatrix) -> (Vec<f64>, ComplexMatrix) {
    let eig = hermitian_eigensystem(rho.matrix()).expect("density matrix is Hermitian");
    let n = rho.dim();
    let kept: Vec<usize> = (0..n)
        .rev()
        .filter(|&j| eig.eigenvalues[j] > RANK_CUTOFF)
        .collect();
    let values: Vec<f64> = kept.iter().map(|&j| eig.eigenvalues[j]).collect();
    let vectors = ComplexMatrix::from_fn(n, kept.len(), |i, j| eig.eigenvectors.get(i, kept[j]));
    (values, vectors)
}

/// Realize the decomposition of `rho` selected by an isometry `u` (m x r,
/// orthonormal columns, r = rank of rho). Members with negligible weight are
/// pruned; the result is verified to reassemble `rho` within 1e-8.
pub fn decomposition_from_isometry(rho: &DensityMatrix, u: &ComplexMatrix) -> Result<Decomposition> {
    let (mu, vectors) = kept_eigenensemble(rho);
    let rank = mu.len();
    if u.cols() != rank {
        return Err(Error::Domain(format!(
            "isometry has {} columns but rank(rho) = {rank}",
            u.cols()
        )));
    }
    if u.rows() < rank {
        return Err(Error::Domain(format!(
            "isometry has {} rows, fewer than rank(rho) = {rank}",
            u.rows()
        )));
    }
    let gram = u.adjoint().matmul(u)?;
    let gram_err = gram.sub(&ComplexMatrix::identity(rank))?.max_abs();
    if gram_err > 1e-10 {
        return Err(Error::Domain(format!(
            "matrix is not an isometry: ||u^dag u - I||_max = {gram_err:.3e}"
        )));
    }

    let n = rho.dim();
    let roots: Vec<f64> = mu.iter().map(|&x| x.sqrt()).collect();
    let mut weights = Vec::new();
    let mut members = Vec::new();
    for i in 0..u.rows() {
        let mut phi = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..rank {
            let coeff = u.get(i, j) * roots[j];
            for (x, amp) in phi.iter_mut().enumerate() {
                *amp += coeff * vectors.get(x, j);
            }
        }
        let weight: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
        if weight < WEIGHT_CUTOFF {
            continue;
        }
        let norm = weight.sqrt();
        for z in &mut phi {
            *z /= norm;
        }
        weights.push(weight);
        members.push(PureState::new(rho.d_a(), rho.d_b(), phi)?);
    }
    let dec = Decomposition::new(weights, members)?;
    let err = dec.reconstruction_error(rho);
    if err > 1e-8 {
        return Err(Error::Numerical(format!(
            "decomposition fails to reassemble rho: max deviation {err:.3e}"
        )));
    }
    Ok(dec)
}

/// Ensemble average sum_i p_i measure(psi_i).
pub fn average_measure(dec: &Decomposition, measure: MeasureKind) -> Result<f64> {
    let mut acc = 0.0;
    for (p, psi) in dec.weights().iter().zip(dec.members()) {
        acc += p * measure.eval_pure(psi)?;
    }
    Ok(acc)
}

/// One restart's local search state: unnormalized members (m rows of length
/// n), the isometry rows that generate them, and cached contributions.
struct Restart {
    m: usize,
    n: usize,
    rank: usize,
    d_a: usize,
    d_b: usize,
    kind: MeasureKind,
    u: Vec<Complex64>,        // m x rank, row-major
    members: Vec<Complex64>,  // m x n, row-major, member i = u_i . diag(sqrt mu) . V^T
    contrib: Vec<f64>,
    red: Vec<Complex64>,      // d_a x d_a scratch
    row_a: Vec<Complex64>,    // candidate rotated rows
    row_b: Vec<Complex64>,
}

const LINE_GRID: usize = 6;
const GOLDEN_ITERS: usize = 30;
const PROBE_ANGLE: f64 = 1e-4;

impl Restart {
    fn new(
        kind: MeasureKind,
        d_a: usize,
        d_b: usize,
        rank: usize,
        m: usize,
        scaled_vectors: &[Complex64], // n x rank, row-major: sqrt(mu_j) V[x, j]
        rng: &mut ChaCha8Rng,
    ) -> Self {
        let n = d_a * d_b;
        let iso = random_isometry(m, rank, rng);
        let mut u = vec![Complex64::new(0.0, 0.0); m * rank];
        for i in 0..m {
            for j in 0..rank {
                u[i * rank + j] = iso.get(i, j);
            }
        }
        let mut members = vec![Complex64::new(0.0, 0.0); m * n];
        for i in 0..m {
            for x in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..rank {
                    s += u[i * rank + j] * scaled_vectors[x * rank + j];
                }
                members[i * n + x] = s;
            }
        }
        let mut red = vec![Complex64::new(0.0, 0.0); d_a * d_a];
        let contrib = (0..m)
            .map(|i| {
                weighted_measure_unnormalized(kind, &members[i * n..(i + 1) * n], d_a, d_b, &mut red)
            })
            .collect();
        Self {
            m,
            n,
            rank,
            d_a,
            d_b,
            kind,
            u,
            members,
            contrib,
            red,
            row_a: vec![Complex64::new(0.0, 0.0); n],
            row_b: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    fn total(&self) -> f64 {
        self.contrib.iter().sum()
    }

    /// Joint contribution of rows p, q after rotating by angle `theta` with
    /// phase `w` (|w| = 1), without mutating the state.
    fn pair_value(&mut self, p: usize, q: usize, theta: f64, w: Complex64) -> f64 {
        let (c, s) = (theta.cos(), theta.sin());
        let n = self.n;
        let rp = &self.members[p * n..(p + 1) * n];
        let rq = &self.members[q * n..(q + 1) * n];
        for x in 0..n {
            self.row_a[x] = c * rp[x] + s * w * rq[x];
            self.row_b[x] = -s * w.conj() * rp[x] + c * rq[x];
        }
        // Split borrows: scratch buffers are disjoint from members.
        let va = weighted_measure_unnormalized(
            self.kind,
            &self.row_a,
            self.d_a,
            self.d_b,
            &mut self.red,
        );
        let vb = weighted_measure_unnormalized(
            self.kind,
            &self.row_b,
            self.d_a,
            self.d_b,
            &mut self.red,
        );
        va + vb
    }

    /// Apply the rotation to the stored members and isometry rows.
    fn apply(&mut self, p: usize, q: usize, theta: f64, w: Complex64) {
        let (c, s) = (theta.cos(), theta.sin());
        let n = self.n;
        for x in 0..n {
            let a = self.members[p * n + x];
            let b = self.members[q * n + x];
            self.members[p * n + x] = c * a + s * w * b;
            self.members[q * n + x] = -s * w.conj() * a + c * b;
        }
        let r = self.rank;
        for j in 0..r {
            let a = self.u[p * r + j];
            let b = self.u[q * r + j];
            self.u[p * r + j] = c * a + s * w * b;
            self.u[q * r + j] = -s * w.conj() * a + c * b;
        }
        self.contrib[p] = weighted_measure_unnormalized(
            self.kind,
            &self.members[p * n..(p + 1) * n],
            self.d_a,
            self.d_b,
            &mut self.red,
        );
        self.contrib[q] = weighted_measure_unnormalized(
            self.kind,
            &self.members[q * n..(q + 1) * n],
            self.d_a,
            self.d_b,
            &mut self.red,
        );
    }

    /// Line-search the rotation angle for one row pair and phase. The
    /// objective is pi/2-periodic in the angle, so a coarse grid covers
    /// (-pi/4, pi/4] and golden-section refines around the best point; when
    /// neither the grid nor small probe angles beat the baseline the
    /// direction is flat and the search is skipped.
    fn best_angle(&mut self, p: usize, q: usize, w: Complex64) -> Option<(f64, f64)> {
        let base = self.contrib[p] + self.contrib[q];
        let span = std::f64::consts::FRAC_PI_2;
        let spacing = span / LINE_GRID as f64;
        let mut best_theta = 0.0;
        let mut best_val = base;
        for k in 0..LINE_GRID {
            let theta = -span / 2.0 + (k as f64 + 0.5) * spacing;
            let v = self.pair_value(p, q, theta, w);
            if v < best_val {
                best_val = v;
                best_theta = theta;
            }
        }
        if best_theta == 0.0 {
            // Coarse grid saw nothing; probe for a shallow slope at zero.
            let up = self.pair_value(p, q, PROBE_ANGLE, w);
            let down = self.pair_value(p, q, -PROBE_ANGLE, w);
            if up >= base && down >= base {
                return None;
            }
            if up < down {
                best_theta = PROBE_ANGLE;
                best_val = up;
            } else {
                best_theta = -PROBE_ANGLE;
                best_val = down;
            }
        }
        // Golden-section refinement around the winning point.
        let gr = (5f64.sqrt() - 1.0) / 2.0;
        let mut lo = best_theta - spacing;
        let mut hi = best_theta + spacing;
        let mut t1 = hi - gr * (hi - lo);
        let mut t2 = lo + gr * (hi - lo);
        let mut f1 = self.pair_value(p, q, t1, w);
        let mut f2 = self.pair_value(p, q, t2, w);
        for _ in 0..GOLDEN_ITERS {
            if f1 <= f2 {
                hi = t2;
                t2 = t1;
                f2 = f1;
                t1 = hi - gr * (hi - lo);
                f1 = self.pair_value(p, q, t1, w);
            } else {
                lo = t1;
                t1 = t2;
                f1 = f2;
                t2 = lo + gr * (hi - lo);
                f2 = self.pair_value(p, q, t2, w);
            }
        }
        let (theta, val) = if f1 <= f2 { (t1, f1) } else { (t2, f2) };
        let (theta, val) = if val < best_val {
            (theta, val)
        } else {
            (best_theta, best_val)
        };
        if val < base && theta != 0.0 {
            Some((theta, val))
        } else {
            None
        }
    }

    /// One full coordinate sweep. Returns (objective improvement, max angle).
    fn sweep(&mut self) -> (f64, f64) {
        let before = self.total();
        let mut max_step = 0.0f64;
        // Four rotation phases: {1, i} span every first-order direction, and
        // the two intermediate phases let the period-wide line search escape
        // saddle points that are flat along the first two.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phases = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(s, s),
            Complex64::new(s, -s),
        ];
        for p in 0..self.m {
            for q in (p + 1)..self.m {
                for w in phases {
                    if let Some((theta, _)) = self.best_angle(p, q, w) {
                        self.apply(p, q, theta, w);
                        max_step = max_step.max(theta.abs());
                    }
                }
            }
        }
        ((before - self.total()).max(0.0), max_step)
    }

    fn isometry(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.m, self.rank, |i, j| self.u[i * self.rank + j])
    }
}

/// Multi-start local minimization of the ensemble-averaged measure over all
/// decompositions of `rho`. Restarts run in parallel on independent RNG
/// streams and are combined by (value, restart index) lexicographic minimum,
/// so the result is deterministic for a fixed seed regardless of scheduling.
pub fn minimize_roof(
    rho: &DensityMatrix,
    measure: MeasureKind,
    cfg: &RoofConfig,
) -> Result<RoofEstimate> {
    cfg.validate()?;
    let (mu, vectors) = kept_eigenensemble(rho);
    let rank = mu.len();
    if cfg.ensemble_size < rank {
        return Err(Error::Config(format!(
            "ensemble_size {} is below rank(rho) = {rank}",
            cfg.ensemble_size
        )));
    }
    let m = cfg.ensemble_size.min(rank * rank);

    let lower_bracket = match measure {
        MeasureKind::Concurrence => mb_lower_bound_c2(rho).max(0.0).sqrt(),
        MeasureKind::DConcurrence => d_lower_bound(rho).max(0.0).sqrt(),
    };

    // A pure state has a single decomposition: itself.
    if rank == 1 {
        let dec = decomposition_from_isometry(rho, &ComplexMatrix::identity(1))?;
        let value = average_measure(&dec, measure)?;
        return Ok(RoofEstimate {
            value,
            decomposition: dec,
            lower_bracket,
            converged: true,
            config: cfg.clone(),
        });
    }

    let n = rho.dim();
    let mut scaled = vec![Complex64::new(0.0, 0.0); n * rank];
    for x in 0..n {
        for j in 0..rank {
            scaled[x * rank + j] = vectors.get(x, j) * mu[j].sqrt();
        }
    }

    let outcomes: Vec<Result<(f64, ComplexMatrix)>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
            rng.set_stream(restart as u64);
            let mut state = Restart::new(
                measure,
                rho.d_a(),
                rho.d_b(),
                rank,
                m,
                &scaled,
                &mut rng,
            );
            for _ in 0..cfg.max_iterations {
                let (gain, max_step) = state.sweep();
                if gain < cfg.value_tolerance || max_step < cfg.step_tolerance {
                    break;
                }
            }
            // Recompute the value through the public decomposition path so
            // the reported number is exactly the ensemble average.
            let dec = decomposition_from_isometry(rho, &state.isometry())?;
            let value = average_measure(&dec, measure)?;
            Ok((value, state.isometry()))
        })
        .collect();

    let mut results = Vec::with_capacity(cfg.restarts);
    for outcome in outcomes {
        results.push(outcome?);
    }
    let best_idx = (0..results.len())
        .min_by(|&a, &b| {
            (results[a].0, a)
                .partial_cmp(&(results[b].0, b))
                .expect("objective values are finite")
        })
        .expect("at least one restart");
    let mut values: Vec<f64> = results.iter().map(|(v, _)| *v).collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let converged = values.len() < 2 || values[1] - values[0] <= 10.0 * cfg.value_tolerance;

    let decomposition = decomposition_from_isometry(rho, &results[best_idx].1)?;
    let value = average_measure(&decomposition, measure)?;
    Ok(RoofEstimate {
        value,
        decomposition,
        lower_bracket,
        converged,
        config: cfg.clone(),
    })
}
