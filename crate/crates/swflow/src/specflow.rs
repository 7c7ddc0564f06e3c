//! Spectral flow of one-parameter families of symmetric matrices.
//!
//! The flow counts eigenvalues crossing zero with sign, after shifting the
//! family to `T + delta` for a small `delta > 0`: zero eigenvalues at the
//! endpoints are pushed to the positive side. Equivalently, it is the signed
//! number of eigenvalues of `T` passing the level `-delta`, upward crossings
//! counting `+1`.

use crate::clifford3::C64;
use crate::linalg;
use nalgebra::DMatrix;
use std::sync::Arc;
use thiserror::Error;

pub type MatFn = Arc<dyn Fn(f64) -> DMatrix<f64> + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SfError {
    #[error("sample at t = {t} is not symmetric (asymmetry {asym:e})")]
    NotSymmetric { t: f64, asym: f64 },
    #[error("parameter {t} lies outside [{a}, {b}]")]
    OutOfDomain { t: f64, a: f64, b: f64 },
    #[error("invalid interval [{0}, {1}]")]
    BadInterval(f64, f64),
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("paths do not share the junction point (gap {0:e})")]
    EndpointMismatch(f64),
    #[error("no admissible shift found after {0} halvings")]
    DeltaSearchFailed(usize),
    #[error("family does not vanish at the origin (max entry {0:e})")]
    NotZeroAtOrigin(f64),
    #[error("derivative at the origin has a repeated eigenvalue (gap {0:e})")]
    DegenerateDerivative(f64),
}

/// A continuously differentiable family of real symmetric matrices on `[a, b]`.
#[derive(Clone)]
pub struct HermitianPath {
    a: f64,
    b: f64,
    grid: Vec<f64>,
    dim: usize,
    value: MatFn,
    derivative: Option<MatFn>,
    realified: bool,
    fd_step: f64,
}

impl std::fmt::Debug for HermitianPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HermitianPath")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("samples", &self.grid.len())
            .field("dim", &self.dim)
            .field("realified", &self.realified)
            .finish()
    }
}

/// Realification of a complex matrix: each entry `h` becomes `[[re, -im], [im, re]]`
/// acting on interleaved `(re, im)` coordinates.
pub fn realify(h: &DMatrix<C64>) -> DMatrix<f64> {
    let (r, c) = h.shape();
    let mut out = DMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = h[(i, j)];
            out[(2 * i, 2 * j)] = z.re;
            out[(2 * i, 2 * j + 1)] = -z.im;
            out[(2 * i + 1, 2 * j)] = z.im;
            out[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    out
}

fn uniform_grid(a: f64, b: f64, samples: usize) -> Vec<f64> {
    let n = samples.max(2);
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

impl HermitianPath {
    /// A path from a matrix-valued function, validated for symmetry on a uniform grid.
    pub fn new<F>(a: f64, b: f64, samples: usize, f: F) -> Result<Self, SfError>
    where
        F: Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
    {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(SfError::BadInterval(a, b));
        }
        let value: MatFn = Arc::new(f);
        let grid = uniform_grid(a, b, samples);
        let dim = value(a).nrows();
        for &t in &grid {
            let m = value(t);
            if m.nrows() != dim || m.ncols() != dim {
                return Err(SfError::Dimension(dim, m.nrows()));
            }
            let asym = linalg::asymmetry(&m);
            if asym > 1e-12 * m.amax().max(1.0) {
                return Err(SfError::NotSymmetric { t, asym });
            }
        }
        Ok(Self { a, b, grid, dim, value, derivative: None, realified: false, fd_step: 1e-5 * (b - a) })
    }

    /// A path of complex Hermitian matrices, realified on ingest.
    pub fn from_hermitian<F>(a: f64, b: f64, samples: usize, f: F) -> Result<Self, SfError>
    where
        F: Fn(f64) -> DMatrix<C64> + Send + Sync + 'static,
    {
        let mut p = Self::new(a, b, samples, move |t| realify(&f(t)))?;
        p.realified = true;
        Ok(p)
    }

    /// The straight line `(1-t) m0 + t m1` on `[0, 1]`.
    pub fn linear(m0: DMatrix<f64>, m1: DMatrix<f64>, samples: usize) -> Result<Self, SfError> {
        if m0.shape() != m1.shape() {
            return Err(SfError::Dimension(m0.nrows(), m1.nrows()));
        }
        let d = &m1 - &m0;
        let d2 = d.clone();
        Ok(Self::new(0.0, 1.0, samples, move |t| &m0 + &d * t)?.with_derivative(move |_| d2.clone()))
    }

    /// The constant family on `[a, b]`.
    pub fn constant(m: DMatrix<f64>, a: f64, b: f64) -> Result<Self, SfError> {
        let n = m.nrows();
        Ok(Self::new(a, b, 2, move |_| m.clone())?.with_derivative(move |_| DMatrix::zeros(n, n)))
    }

    pub fn with_derivative<F>(mut self, d: F) -> Self
    where
        F: Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(d));
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.grid = uniform_grid(self.a, self.b, samples);
        self
    }

    /// Marks the path as the realification of a complex-linear family.
    pub fn mark_realified(mut self) -> Self {
        self.realified = true;
        self
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_realified(&self) -> bool {
        self.realified
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn eval(&self, t: f64) -> DMatrix<f64> {
        (self.value)(t)
    }

    /// Derivative at `t`: analytic when supplied, else a central difference with
    /// step `1e-5 (b - a)`.
    pub fn derivative_at(&self, t: f64) -> DMatrix<f64> {
        match &self.derivative {
            Some(d) => d(t),
            None => {
                let h = self.fd_step;
                ((self.value)(t + h) - (self.value)(t - h)) / (2.0 * h)
            }
        }
    }

    /// Sampled values on the grid.
    pub fn values(&self) -> Vec<DMatrix<f64>> {
        self.grid.iter().map(|&t| self.eval(t)).collect()
    }

    /// The same family traversed backwards on the same interval.
    pub fn reversed(&self) -> Self {
        let (a, b) = (self.a, self.b);
        let v = self.value.clone();
        let me = self.clone();
        let mut out = self.clone();
        out.value = Arc::new(move |t| v(a + b - t));
        out.derivative = match &self.derivative {
            Some(d) => {
                let d = d.clone();
                Some(Arc::new(move |t| -d(a + b - t)))
            }
            None => Some(Arc::new(move |t| -me.derivative_at(a + b - t))),
        };
        out
    }

    /// Affine reparametrization onto `[a2, b2]`.
    pub fn reparametrized(&self, a2: f64, b2: f64) -> Self {
        let (a, b) = (self.a, self.b);
        let scale = (b - a) / (b2 - a2);
        let map = move |s: f64| a + (s - a2) * scale;
        let me = self.clone();
        let me2 = self.clone();
        let samples = self.grid.len();
        Self {
            a: a2,
            b: b2,
            grid: uniform_grid(a2, b2, samples),
            dim: self.dim,
            value: Arc::new(move |s| me.eval(map(s))),
            derivative: Some(Arc::new(move |s| me2.derivative_at(map(s)) * scale)),
            realified: self.realified,
            fd_step: 1e-5 * (b2 - a2),
        }
    }

    /// Block direct sum, the second path reparametrized onto the first's interval.
    pub fn direct_sum(&self, other: &HermitianPath) -> Self {
        let q = other.reparametrized(self.a, self.b);
        let (p1, p2, q1, q2) = (self.clone(), self.clone(), q.clone(), q.clone());
        Self {
            a: self.a,
            b: self.b,
            grid: uniform_grid(self.a, self.b, self.grid.len().max(q.grid.len())),
            dim: self.dim + q.dim,
            value: Arc::new(move |t| linalg::block_diag(&p1.eval(t), &q1.eval(t))),
            derivative: Some(Arc::new(move |t| {
                linalg::block_diag(&p2.derivative_at(t), &q2.derivative_at(t))
            })),
            realified: self.realified && q.realified,
            fd_step: self.fd_step,
        }
    }

    /// Concatenation: `self` on `[a, b]` followed by `other` shifted to `[b, b + (b' - a')]`.
    pub fn concat(&self, other: &HermitianPath) -> Result<Self, SfError> {
        if self.dim != other.dim {
            return Err(SfError::Dimension(self.dim, other.dim));
        }
        let gap = (self.eval(self.b) - other.eval(other.a)).amax();
        if gap > 1e-12 {
            return Err(SfError::EndpointMismatch(gap));
        }
        let mid = self.b;
        let end = self.b + (other.b - other.a);
        let q = other.reparametrized(mid, end);
        let (p1, p2, q1, q2) = (self.clone(), self.clone(), q.clone(), q.clone());
        let mut grid: Vec<f64> = self.grid.clone();
        grid.extend(q.grid.iter().skip(1));
        Ok(Self {
            a: self.a,
            b: end,
            grid,
            dim: self.dim,
            value: Arc::new(move |t| if t <= mid { p1.eval(t) } else { q1.eval(t) }),
            derivative: Some(Arc::new(move |t| {
                if t <= mid {
                    p2.derivative_at(t)
                } else {
                    q2.derivative_at(t)
                }
            })),
            realified: self.realified && other.realified,
            fd_step: self.fd_step,
        })
    }
}

/// Numerical tolerances and the shift policy of [`spectral_flow`].
#[derive(Debug, Clone, PartialEq)]
pub struct SfConfig {
    /// Upper bound for the initial shift.
    pub delta_cap: f64,
    /// Maximum number of shift halvings.
    pub max_halvings: usize,
    /// Crossing operators with smallest `|eigenvalue| < degeneracy_tol * |T'|` are degenerate.
    pub degeneracy_tol: f64,
    /// Width of the bracket at which crossing localization stops.
    pub root_tol: f64,
    /// Kernel threshold relative to the path scale at a located crossing.
    pub kernel_tol: f64,
    /// Maximum interval bisection depth.
    pub max_depth: usize,
}

impl Default for SfConfig {
    fn default() -> Self {
        Self {
            delta_cap: 1e-3,
            max_halvings: 20,
            degeneracy_tol: 1e-10,
            root_tol: 1e-10,
            kernel_tol: 1e-8,
            max_depth: 48,
        }
    }
}

/// A located crossing of the shifted family.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingRecord {
    pub t: f64,
    pub kernel_dim: usize,
    pub crossing_signature: i64,
    pub crossing_det_sign: i8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFlowReport {
    pub sf: i64,
    pub delta_used: f64,
    pub crossings: Vec<CrossingRecord>,
    pub refinement_depth: usize,
    pub halvings: usize,
}

/// The crossing operator `Proj_ker o T'(t)` restricted to the numerical kernel
/// `{|lambda| < tol}` of `T(t)`.
pub fn crossing_operator(path: &HermitianPath, t: f64, tol: f64) -> Result<DMatrix<f64>, SfError> {
    let (a, b) = path.interval();
    if t < a || t > b {
        return Err(SfError::OutOfDomain { t, a, b });
    }
    Ok(shifted_crossing_operator(path, t, 0.0, tol).0)
}

fn shifted_crossing_operator(
    path: &HermitianPath,
    t: f64,
    shift: f64,
    tol: f64,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let (vals, vecs) = linalg::eigh(&path.eval(t));
    let idx: Vec<usize> = (0..vals.len()).filter(|&i| (vals[i] + shift).abs() < tol).collect();
    let v = DMatrix::from_fn(vecs.nrows(), idx.len(), |r, c| vecs[(r, idx[c])]);
    let d = path.derivative_at(t);
    (v.transpose() * d * &v, v)
}

/// Signature and determinant sign of a symmetric matrix.
pub fn signature(c: &DMatrix<f64>) -> (i64, i8) {
    let ev = linalg::eigvalsh(c);
    let pos = ev.iter().filter(|&&x| x > 0.0).count() as i64;
    let neg = ev.iter().filter(|&&x| x < 0.0).count() as i64;
    let det = if ev.iter().any(|&x| x == 0.0) {
        0
    } else if neg % 2 == 0 {
        1
    } else {
        -1
    };
    (pos - neg, det)
}

struct Degenerate;

struct Sweep<'p> {
    path: &'p HermitianPath,
    cfg: &'p SfConfig,
    delta: f64,
    scale: f64,
    crossings: Vec<CrossingRecord>,
    depth: usize,
}

fn count_below(vals: &[f64], delta: f64) -> i64 {
    vals.iter().filter(|&&x| x + delta < 0.0).count() as i64
}

impl Sweep<'_> {
    fn eig(&self, t: f64) -> Vec<f64> {
        linalg::eigvalsh(&self.path.eval(t))
    }

    /// Number of roots of the quadratic interpolant through `(0, g0)`, `(1/2, gm)`,
    /// `(1, g1)` in the left and right halves.
    fn interpolant_roots(g0: f64, gm: f64, g1: f64) -> (usize, usize) {
        let c = 2.0 * (g0 - 2.0 * gm + g1);
        let b = g1 - g0 - c;
        let mut roots = Vec::new();
        if c.abs() <= 1e-14 * (g0.abs() + gm.abs() + g1.abs()) {
            if b != 0.0 {
                roots.push(-g0 / b);
            }
        } else {
            let disc = b * b - 4.0 * c * g0;
            if disc >= 0.0 {
                let r = disc.sqrt();
                let q = -0.5 * (b + b.signum() * r);
                if q != 0.0 {
                    roots.push(g0 / q);
                    roots.push(q / c);
                } else {
                    roots.push(0.0);
                }
            }
        }
        let left = roots.iter().filter(|&&s| (0.0..=0.5).contains(&s)).count();
        let right = roots.iter().filter(|&&s| s > 0.5 && s <= 1.0).count();
        (left, right)
    }

    fn resolve(&mut self, t0: f64, v0: &[f64], t1: f64, v1: &[f64], depth: usize) -> Result<(), Degenerate> {
        self.depth = self.depth.max(depth);
        let d = self.delta;
        let m = 0.5 * (t0 + t1);
        let vm = self.eig(m);
        let last = depth >= self.cfg.max_depth || t1 - t0 < self.cfg.root_tol;
        let mut split = false;
        let mut left = Vec::new();
        let mut right = Vec::new();
        for i in 0..v0.len() {
            let (g0, gm, g1) = (v0[i] + d, vm[i] + d, v1[i] + d);
            let (cl, cr) = ((g0 < 0.0) != (gm < 0.0), (gm < 0.0) != (g1 < 0.0));
            if cl {
                left.push(i);
            }
            if cr {
                right.push(i);
            }
            let (rl, rr) = Self::interpolant_roots(g0, gm, g1);
            if rl > 1 || rr > 1 || (cl && cr) {
                split = true;
            }
        }
        if !split || last {
            let mark = self.crossings.len();
            let ok_left = self.locate(t0, v0, m, &vm, &left)?;
            let ok_right = self.locate(m, &vm, t1, v1, &right)?;
            if ok_left && ok_right {
                return Ok(());
            }
            self.crossings.truncate(mark);
            if last {
                return Err(Degenerate);
            }
        }
        self.resolve(t0, v0, m, &vm, depth + 1)?;
        self.resolve(m, &vm, t1, v1, depth + 1)
    }

    /// Finds the crossings of the sorted branches `idx` between two samples.
    /// Returns `false` if their signatures do not account for the change in
    /// the count of negative eigenvalues.
    fn locate(&mut self, ta: f64, va: &[f64], tb: f64, vb: &[f64], idx: &[usize]) -> Result<bool, Degenerate> {
        let expected = count_below(va, self.delta) - count_below(vb, self.delta);
        if idx.is_empty() {
            return Ok(expected == 0);
        }
        let mut roots: Vec<f64> = idx.iter().map(|&j| self.root(ta, va[j], tb, vb[j], j)).collect();
        roots.sort_by(f64::total_cmp);
        let mut groups: Vec<f64> = Vec::new();
        for r in roots {
            if groups.last().is_none_or(|&g| r - g > 1e3 * self.cfg.root_tol) {
                groups.push(r);
            }
        }
        let mut found = Vec::new();
        let mut total = 0;
        for &t in &groups {
            let rec = self.crossing_at(t)?;
            total += rec.crossing_signature;
            found.push(rec);
        }
        if total != expected {
            return Ok(false);
        }
        self.crossings.extend(found);
        Ok(true)
    }

    /// Illinois-safeguarded regula falsi on the sorted eigenvalue `j` of `T + delta`.
    fn root(&self, mut ta: f64, va: f64, mut tb: f64, vb: f64, j: usize) -> f64 {
        let d = self.delta;
        let (mut fa, mut fb) = (va + d, vb + d);
        let mut side = 0i8;
        let mut best = if fa.abs() < fb.abs() { ta } else { tb };
        for _ in 0..200 {
            if tb - ta < self.cfg.root_tol {
                break;
            }
            let mut t = (ta * fb - tb * fa) / (fb - fa);
            if !(t > ta && t < tb) {
                t = 0.5 * (ta + tb);
            }
            let ft = self.eig(t)[j] + d;
            best = t;
            if ft == 0.0 {
                break;
            }
            if (ft < 0.0) == (fa < 0.0) {
                ta = t;
                fa = ft;
                if side == -1 {
                    fb *= 0.5;
                }
                side = -1;
            } else {
                tb = t;
                fb = ft;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            }
            if ft.abs() <= 1e-15 * self.scale {
                break;
            }
        }
        best
    }

    fn crossing_at(&self, t: f64) -> Result<CrossingRecord, Degenerate> {
        let dnorm = linalg::one_norm(&self.path.derivative_at(t));
        let tnorm = linalg::one_norm(&self.path.eval(t));
        let (a, b) = self.path.interval();
        let tol = self.cfg.kernel_tol * (tnorm + dnorm * (b - a)).max(f64::MIN_POSITIVE);
        let (c, _) = shifted_crossing_operator(self.path, t, self.delta, tol);
        let ev = linalg::eigvalsh(&c);
        if ev.is_empty() || ev.iter().any(|x| x.abs() < self.cfg.degeneracy_tol * dnorm.max(f64::MIN_POSITIVE)) {
            return Err(Degenerate);
        }
        let (sig, det) = signature(&c);
        Ok(CrossingRecord { t, kernel_dim: c.nrows(), crossing_signature: sig, crossing_det_sign: det })
    }
}

/// Smallest eigenvalue modulus above the kernel threshold.
fn smallest_nonzero(vals: &[f64], thr: f64) -> Option<f64> {
    vals.iter().map(|x| x.abs()).filter(|&x| x > thr).min_by(f64::total_cmp)
}

/// Spectral flow of `T + delta`, the shift chosen below every nonzero endpoint
/// eigenvalue modulus and halved while a crossing stays degenerate.
pub fn spectral_flow(path: &HermitianPath, cfg: &SfConfig) -> Result<SpectralFlowReport, SfError> {
    let (a, b) = path.interval();
    let va = linalg::eigvalsh(&path.eval(a));
    let vb = linalg::eigvalsh(&path.eval(b));
    let scale = va.iter().chain(vb.iter()).fold(0.0f64, |m, x| m.max(x.abs()));
    let thr = cfg.kernel_tol * scale.max(f64::MIN_POSITIVE);
    let gap = [smallest_nonzero(&va, thr), smallest_nonzero(&vb, thr)]
        .into_iter()
        .flatten()
        .fold(f64::INFINITY, f64::min);
    let mut delta = 0.5 * gap.min(cfg.delta_cap);
    let samples: Vec<(f64, Vec<f64>)> = path.grid().iter().map(|&t| (t, linalg::eigvalsh(&path.eval(t)))).collect();
    for halvings in 0..=cfg.max_halvings {
        let mut sweep = Sweep {
            path,
            cfg,
            delta,
            scale: scale.max(1.0),
            crossings: Vec::new(),
            depth: 0,
        };
        let mut ok = true;
        for w in samples.windows(2) {
            if sweep.resolve(w[0].0, &w[0].1, w[1].0, &w[1].1, 0).is_err() {
                ok = false;
                break;
            }
        }
        if ok {
            let sf = sweep.crossings.iter().map(|c| c.crossing_signature).sum();
            return Ok(SpectralFlowReport {
                sf,
                delta_used: delta,
                crossings: sweep.crossings,
                refinement_depth: sweep.depth,
                halvings,
            });
        }
        delta *= 0.5;
    }
    Err(SfError::DeltaSearchFailed(cfg.max_halvings))
}

/// Spectral flow of the direct sum of two paths.
pub fn sf_direct_sum(p1: &HermitianPath, p2: &HermitianPath, cfg: &SfConfig) -> Result<i64, SfError> {
    Ok(spectral_flow(&p1.direct_sum(p2), cfg)?.sf)
}

/// Spectral flow of the concatenation of two paths sharing the junction point.
pub fn sf_concat(p1: &HermitianPath, p2: &HermitianPath, cfg: &SfConfig) -> Result<i64, SfError> {
    Ok(spectral_flow(&p1.concat(p2)?, cfg)?.sf)
}

/// Eigenvalue branches of a family with `A(0) = 0` and simple `A'(0)`.
#[derive(Debug, Clone)]
pub struct DegenerateTrack {
    /// First derivatives `lambda_i'(0)`, the eigenvalues of `A'(0)` in ascending order.
    pub slopes: Vec<f64>,
    /// Matching unit eigenvectors as columns.
    pub vectors: DMatrix<f64>,
    /// Second derivatives `lambda_i''(0) = d/dt <A'_t v_t, v_t>` at `t = 0`.
    pub second_derivatives: Vec<f64>,
}

/// Eigen-decomposition of `B_t = A_t / t`, which extends smoothly to `B_0 = A'(0)`.
fn quotient_eigen(path: &HermitianPath, t: f64) -> (nalgebra::DVector<f64>, DMatrix<f64>) {
    if t == 0.0 {
        linalg::eigh(&path.derivative_at(0.0))
    } else {
        linalg::eigh(&(path.eval(t) / t))
    }
}

impl DegenerateTrack {
    /// Branch values `lambda_i(t) = t mu_i(t)` with `mu_i` the ordered eigenvalues of `A_t / t`.
    pub fn branches(path: &HermitianPath, t: f64) -> Vec<f64> {
        quotient_eigen(path, t).0.iter().map(|m| m * t).collect()
    }
}

/// Tracks the eigenvalue branches of a family vanishing at `t = 0` through the
/// factorization `A_t = t B_t`.
pub fn track_degenerate_eigenvalue(path: &HermitianPath, gap_min: f64) -> Result<DegenerateTrack, SfError> {
    let (a, b) = path.interval();
    if 0.0 < a || 0.0 > b {
        return Err(SfError::OutOfDomain { t: 0.0, a, b });
    }
    let a0 = path.eval(0.0);
    if a0.amax() > 1e-12 {
        return Err(SfError::NotZeroAtOrigin(a0.amax()));
    }
    let (slopes, vectors) = quotient_eigen(path, 0.0);
    let gap = slopes.as_slice().windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if gap <= gap_min {
        return Err(SfError::DegenerateDerivative(gap));
    }
    let h = 1e-4 * (b - a);
    let g = |t: f64| -> Vec<f64> {
        let (_, v) = quotient_eigen(path, t);
        let d = path.derivative_at(t);
        (0..v.ncols()).map(|i| (v.column(i).transpose() * &d * v.column(i))[(0, 0)]).collect()
    };
    let (gp, gm) = (g(h), g(-h));
    let second_derivatives = gp.iter().zip(&gm).map(|(p, m)| (p - m) / (2.0 * h)).collect();
    Ok(DegenerateTrack { slopes: slopes.iter().copied().collect(), vectors, second_derivatives })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_path(f: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static, a: f64, b: f64) -> HermitianPath {
        HermitianPath::new(a, b, 9, move |t| DMatrix::from_diagonal(&nalgebra::DVector::from_vec(f(t)))).unwrap()
    }

    #[test]
    fn crossing_operator_of_diag() {
        let p = diag_path(|t| vec![t, 1.0], -1.0, 1.0);
        let c = crossing_operator(&p, 0.0, 1e-8).unwrap();
        assert_eq!(c.shape(), (1, 1));
        assert!((c[(0, 0)] - 1.0).abs() < 1e-8);
        let q = diag_path(|t| vec![t, -t], -1.0, 1.0);
        let c = crossing_operator(&q, 0.0, 1e-8).unwrap();
        assert_eq!(signature(&c).0, 0);
        let c = crossing_operator(&p, 0.5, 1e-8).unwrap();
        assert_eq!(c.nrows(), 0);
    }

    #[test]
    fn simple_flows() {
        let cfg = SfConfig::default();
        assert_eq!(spectral_flow(&diag_path(|t| vec![t, 1.0], -1.0, 1.0), &cfg).unwrap().sf, 1);
        let r = spectral_flow(&diag_path(|t| vec![t, -t], -1.0, 1.0), &cfg).unwrap();
        assert_eq!(r.sf, 0);
        assert_eq!(r.crossings.len(), 2);
        assert_eq!(spectral_flow(&diag_path(|_| vec![0.0, 2.0], 0.0, 1.0), &cfg).unwrap().sf, 0);
    }

    #[test]
    fn endpoint_convention() {
        let cfg = SfConfig::default();
        // zero at the start with positive slope is not counted, at the end it is
        assert_eq!(spectral_flow(&diag_path(|t| vec![t, 1.0], 0.0, 1.0), &cfg).unwrap().sf, 0);
        assert_eq!(spectral_flow(&diag_path(|t| vec![t, 1.0], -1.0, 0.0), &cfg).unwrap().sf, 1);
        assert_eq!(spectral_flow(&diag_path(|t| vec![-t, 1.0], 0.0, 1.0), &cfg).unwrap().sf, -1);
    }

    #[test]
    fn realify_doubles_spectrum() {
        let h = DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 2.0), C64::new(0.0, -2.0), C64::new(-1.0, 0.0)]);
        let ev = linalg::eigvalsh(&realify(&h));
        let r = 5f64.sqrt();
        for (x, y) in ev.iter().zip([-r, -r, r, r]) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_track_quadratic_branch() {
        let p = diag_path(|t| vec![t * t, t], -1.0, 1.0).with_derivative(|t| {
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0 * t, 1.0]))
        });
        let tr = track_degenerate_eigenvalue(&p, 1e-6).unwrap();
        assert_eq!(tr.slopes, vec![0.0, 1.0]);
        assert!((tr.second_derivatives[0] - 2.0).abs() < 1e-8);
        assert!(tr.second_derivatives[1].abs() < 1e-8);
        let shifted = diag_path(|t| vec![t + 1.0, t], -1.0, 1.0);
        assert!(matches!(track_degenerate_eigenvalue(&shifted, 1e-6), Err(SfError::NotZeroAtOrigin(_))));
    }

    #[test]
    fn concat_rejects_gap() {
        let p = diag_path(|t| vec![t], 0.0, 1.0);
        let q = diag_path(|t| vec![t + 5.0], 0.0, 1.0);
        assert!(matches!(p.concat(&q), Err(SfError::EndpointMismatch(_))));
    }
}
