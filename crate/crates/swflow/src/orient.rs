//! Orientation transport along paths of symmetric matrices.
//!
//! The determinant route fixes a constant stabilizer `K: V -> H` for the whole
//! path, carries an orthonormal frame of `ker [T_t | K]` along the samples by
//! orthogonal projection, and compares the canonical trivializations of the
//! determinant line at the two endpoints. The spectral-flow route returns
//! `(-1)^SF`.

use crate::detsign::{self, DetError, LinearMapData, StabilizerData};
use crate::linalg;
use crate::specflow::{self, HermitianPath, SfConfig, SfError};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OtError {
    #[error("endpoint t = {t} is singular (smallest |eigenvalue| {min_eig:e})")]
    SingularEndpoint { t: f64, min_eig: f64 },
    #[error("kernel frame projection stays rank-deficient near t = {0}")]
    RefinementFailed(f64),
    #[error("no stabilizer found for the path")]
    StabilizerFailed,
    #[error(transparent)]
    Sf(#[from] SfError),
    #[error(transparent)]
    Det(#[from] DetError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OtConfig {
    pub sf: SfConfig,
    /// Minimum number of uniform samples used by the frame transport.
    pub min_samples: usize,
    /// Maximum bisection depth between consecutive samples.
    pub max_depth: usize,
    /// Smallest admissible singular value of the projected frame.
    pub overlap_min: f64,
    /// Endpoints with smallest `|eigenvalue| <= singular_tol * max(1, |T|)` count as singular.
    pub singular_tol: f64,
}

impl Default for OtConfig {
    fn default() -> Self {
        Self { sf: SfConfig::default(), min_samples: 16, max_depth: 30, overlap_min: 0.5, singular_tol: 1e-10 }
    }
}

/// Variations of the determinant route used to test choice independence.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DetRouteOptions {
    /// Number of random columns appended to the stabilizer.
    pub extra_directions: usize,
    /// Replace the initial kernel frame by a random orthonormal frame of the same span.
    pub randomize_frame: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportReport {
    pub eps_det: i8,
    pub eps_sf: i8,
    pub sf: i64,
    pub stabilizer_dim: usize,
}

impl TransportReport {
    pub fn agrees(&self) -> bool {
        self.eps_det == self.eps_sf
    }
}

fn sign_of(x: f64) -> i8 {
    if x < 0.0 {
        -1
    } else {
        1
    }
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    linalg::eigvalsh(m).iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn is_singular(m: &DMatrix<f64>, tol: f64) -> Option<f64> {
    let ev = linalg::eigvalsh(m);
    let min = ev.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
    (min <= tol * m.amax().max(1.0)).then_some(min)
}

/// Eigenvectors of `m` with `|eigenvalue| < tau`.
fn small_eigenvectors(m: &DMatrix<f64>, tau: f64) -> DMatrix<f64> {
    let (vals, vecs) = linalg::eigh(m);
    let idx: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].abs() < tau).collect();
    DMatrix::from_fn(m.nrows(), idx.len(), |r, c| vecs[(r, idx[c])])
}

fn sample_points(path: &HermitianPath, min_samples: usize) -> Vec<f64> {
    let (a, b) = path.interval();
    let n = path.grid().len().max(min_samples).max(2);
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// A constant stabilizer for the whole path: the span of eigenvectors whose
/// eigenvalues are small compared to the variation of the path near each sample.
pub fn path_stabilizer(path: &HermitianPath, cfg: &OtConfig) -> Result<StabilizerData, OtError> {
    let ts = sample_points(path, cfg.min_samples);
    let mats: Vec<DMatrix<f64>> = ts.iter().map(|&t| path.eval(t)).collect();
    let n = path.dim();
    let steps: Vec<f64> = mats.windows(2).map(|w| spectral_norm(&(&w[1] - &w[0]))).collect();
    let mut cols = DMatrix::zeros(n, 0);
    for (i, m) in mats.iter().enumerate() {
        let left = if i > 0 { steps[i - 1] } else { 0.0 };
        let right = steps.get(i).copied().unwrap_or(0.0);
        let tau = left.max(right) + cfg.singular_tol * m.amax().max(1.0);
        if linalg::eigvalsh(m).iter().all(|x| x.abs() >= tau) {
            continue;
        }
        let e = small_eigenvectors(m, tau);
        if e.ncols() > 0 {
            cols = linalg::hcat(&cols, &e);
        }
    }
    Ok(StabilizerData::new(linalg::orth(&cols, 1e-8)))
}

struct FrameTransport<'a> {
    path: &'a HermitianPath,
    k: &'a StabilizerData,
    cfg: &'a OtConfig,
}

enum StepFailure {
    Unstable(f64),
    Refinement(f64),
}

impl FrameTransport<'_> {
    fn kernel(&self, t: f64) -> Result<DMatrix<f64>, StepFailure> {
        let m = self.path.eval(t);
        let tk = self.k.stabilized(&m);
        if linalg::min_singular(&tk) <= 1e-8 * m.amax().max(1.0) {
            return Err(StepFailure::Unstable(t));
        }
        Ok(linalg::wide_null_space(&tk, self.k.dim()))
    }

    fn step(&self, t0: f64, e0: &DMatrix<f64>, t1: f64, depth: usize) -> Result<DMatrix<f64>, StepFailure> {
        let b1 = self.kernel(t1)?;
        let m = b1.transpose() * e0;
        if m.nrows() == 0 || linalg::min_singular(&m) >= self.cfg.overlap_min {
            return Ok(b1 * linalg::polar(&m));
        }
        if depth >= self.cfg.max_depth {
            return Err(StepFailure::Refinement(t0));
        }
        let mid = 0.5 * (t0 + t1);
        let em = self.step(t0, e0, mid, depth + 1)?;
        self.step(mid, &em, t1, depth + 1)
    }

    /// Frames of `ker [T | K]` at both ends, the second obtained by transport.
    fn run(&self, e_start: DMatrix<f64>) -> Result<DMatrix<f64>, StepFailure> {
        let ts = sample_points(self.path, self.cfg.min_samples);
        let mut e = e_start;
        for w in ts.windows(2) {
            e = self.step(w[0], &e, w[1], 0)?;
        }
        Ok(e)
    }
}

fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    loop {
        let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let q = linalg::orth(&g, 1e-8);
        if q.ncols() == n {
            return q;
        }
    }
}

/// Coefficient of the `Psi_T`-normalized element of `det T` in the trivialization
/// `E (x) 1^*` of `det(ker T_K) (x) (det V)^*`.
fn endpoint_coefficient(t: &DMatrix<f64>, k: &StabilizerData, frame: &DMatrix<f64>) -> Result<f64, OtError> {
    let data = LinearMapData::new(t.clone());
    let probe = data.det_element(1.0);
    let psi = detsign::psi_t(&data, &probe)?;
    let unit = data.det_element(1.0 / psi);
    let image = detsign::phi_k(&data, k, &unit)?;
    let ident = DMatrix::identity(k.dim(), k.dim());
    Ok(image.coeff_in(frame, &ident))
}

fn det_route<R: Rng + ?Sized>(
    path: &HermitianPath,
    cfg: &OtConfig,
    opts: DetRouteOptions,
    mut rng: Option<&mut R>,
) -> Result<(i8, usize), OtError> {
    let (a, _) = path.interval();
    let n = path.dim();
    let mut k = path_stabilizer(path, cfg)?;
    if opts.extra_directions > 0 {
        if let Some(r) = rng.as_deref_mut() {
            let extra = DMatrix::from_fn(n, opts.extra_directions, |_, _| r.sample::<f64, _>(StandardNormal));
            k = StabilizerData::new(linalg::hcat(&k.k, &extra));
        }
    }
    for _ in 0..=2 * n {
        let ft = FrameTransport { path, k: &k, cfg };
        let start = match ft.kernel(a) {
            Ok(e) => e,
            Err(_) => {
                k = enlarge(&k, &path.eval(a));
                continue;
            }
        };
        let start = match (opts.randomize_frame, rng.as_deref_mut()) {
            (true, Some(r)) if start.ncols() > 0 => &start * random_orthogonal(r, start.ncols()),
            _ => start,
        };
        match ft.run(start.clone()) {
            Ok(end) => {
                let (_, b) = path.interval();
                let ca = endpoint_coefficient(&path.eval(a), &k, &start)?;
                let cb = endpoint_coefficient(&path.eval(b), &k, &end)?;
                return Ok((sign_of(ca) * sign_of(cb), k.dim()));
            }
            Err(StepFailure::Unstable(t)) => k = enlarge(&k, &path.eval(t)),
            Err(StepFailure::Refinement(t)) => return Err(OtError::RefinementFailed(t)),
        }
    }
    Err(OtError::StabilizerFailed)
}

/// Adds the weakest cokernel direction of `[T | K]` to the stabilizer.
fn enlarge(k: &StabilizerData, m: &DMatrix<f64>) -> StabilizerData {
    let tk = k.stabilized(m);
    let (_, vecs) = linalg::eigh(&(&tk * tk.transpose()));
    let col = vecs.columns(0, 1).into_owned();
    StabilizerData::new(linalg::hcat(&k.k, &col))
}

/// Orientation transport by determinant-line trivialization; endpoints must be invertible.
pub fn orientation_transport_det(path: &HermitianPath, cfg: &OtConfig) -> Result<i8, OtError> {
    orientation_transport_det_with::<rand::rngs::StdRng>(path, cfg, DetRouteOptions::default(), None)
}

/// [`orientation_transport_det`] with an enlarged stabilizer or a randomized initial frame.
pub fn orientation_transport_det_with<R: Rng + ?Sized>(
    path: &HermitianPath,
    cfg: &OtConfig,
    opts: DetRouteOptions,
    rng: Option<&mut R>,
) -> Result<i8, OtError> {
    let (a, b) = path.interval();
    for t in [a, b] {
        if let Some(min_eig) = is_singular(&path.eval(t), cfg.singular_tol) {
            return Err(OtError::SingularEndpoint { t, min_eig });
        }
    }
    Ok(det_route(path, cfg, opts, rng)?.0)
}

/// Determinant-line transport allowing singular endpoints, each trivialized by `Psi_T`.
pub fn orientation_transport_canonical(path: &HermitianPath, cfg: &OtConfig) -> Result<i8, OtError> {
    Ok(det_route::<rand::rngs::StdRng>(path, cfg, DetRouteOptions::default(), None)?.0)
}

/// Orientation transport as `(-1)^SF`.
pub fn orientation_transport_sf(path: &HermitianPath, cfg: &OtConfig) -> Result<i8, OtError> {
    let sf = specflow::spectral_flow(path, &cfg.sf)?.sf;
    Ok(if sf.rem_euclid(2) == 0 { 1 } else { -1 })
}

/// Both routes with the spectral flow and the stabilizer dimension.
pub fn transport(path: &HermitianPath, cfg: &OtConfig) -> Result<TransportReport, OtError> {
    let (eps_det, stabilizer_dim) = det_route::<rand::rngs::StdRng>(path, cfg, DetRouteOptions::default(), None)?;
    let sf = specflow::spectral_flow(path, &cfg.sf)?.sf;
    Ok(TransportReport { eps_det, eps_sf: if sf.rem_euclid(2) == 0 { 1 } else { -1 }, sf, stabilizer_dim })
}

/// Outcome of the structural checks of [`ot_axioms`].
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    /// `eps(P (+) Q) = eps(P) eps(Q)`.
    pub direct_sum: bool,
    /// `eps(P # Q) = eps(P) eps(Q)`; `None` when the paths do not share the junction.
    pub concat: Option<bool>,
    /// `eps(P # P^-1) = 1`.
    pub inverse: bool,
    /// Transport is constant along the straight-line homotopy from `P` to the
    /// segment joining its endpoints.
    pub homotopy: bool,
}

impl AxiomReport {
    pub fn all(&self) -> bool {
        self.direct_sum && self.concat.unwrap_or(true) && self.inverse && self.homotopy
    }
}

/// Product laws, inverse law and homotopy invariance for the canonical determinant route.
pub fn ot_axioms(p: &HermitianPath, q: &HermitianPath, cfg: &OtConfig) -> Result<AxiomReport, OtError> {
    let eps = |x: &HermitianPath| orientation_transport_canonical(x, cfg);
    let (ep, eq) = (eps(p)?, eps(q)?);
    let direct_sum = eps(&p.direct_sum(q))? == ep * eq;
    let concat = match p.concat(q) {
        Ok(pq) => Some(eps(&pq)? == ep * eq),
        Err(_) => None,
    };
    let inverse = eps(&p.concat(&p.reversed())?)? == 1;
    let (a, b) = p.interval();
    let (pa, pb) = (p.eval(a), p.eval(b));
    let mut homotopy = true;
    for s in [0.25, 0.5, 0.75, 1.0] {
        let (pc, pa, pb) = (p.clone(), pa.clone(), pb.clone());
        let h = HermitianPath::new(a, b, p.grid().len(), move |t| {
            let line = &pa + (&pb - &pa) * ((t - a) / (b - a));
            pc.eval(t) * (1.0 - s) + line * s
        })?;
        if eps(&h)? != ep {
            homotopy = false;
        }
    }
    Ok(AxiomReport { direct_sum, concat, inverse, homotopy })
}
