//! Real determinant lines with Knudsen–Mumford sign conventions.
//!
//! A determinant line `det V` is a weighted line of weight `dim V`. Swapping
//! tensor factors of weights `w, w'` costs `(-1)^{w w'}` and pairing a dual of
//! weight `-w` with a line of weight `w` costs `(-1)^{w(w-1)/2}`.
//!
//! Elements of `det(ker T) (x) det(coker T)^*` are stored as a coefficient times
//! the wedge of an explicit frame of the kernel, tensored with the dual of the
//! wedge of an explicit frame of the cokernel.

use crate::linalg;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Relative singular-value threshold for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetError {
    #[error("weight mismatch: dual has weight {dual}, line has weight {line}")]
    WeightMismatch { dual: i64, line: i64 },
    #[error("labels of the dual and the line do not match")]
    LabelMismatch,
    #[error("sequence is not exact at node {node} (residual {residual:e})")]
    NotExact { node: usize, residual: f64 },
    #[error("map dimensions do not compose at node {0}")]
    Shape(usize),
    #[error("the map K does not stabilize T: [T | K] has rank {rank}, needs {rows}")]
    NotStabilizer { rank: usize, rows: usize },
    #[error("operator is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("element lives in a different determinant line")]
    Incompatible,
}

/// `(-1)^{w w'}`.
pub fn swap_sign(w: i64, w2: i64) -> f64 {
    if (w * w2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(-1)^{w(w-1)/2}`.
pub fn pair_sign(w: i64) -> f64 {
    if (w * (w - 1) / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(-1)^{(n0+n1)(n0+n1+1)/2}`, the sign of the stabilizer isomorphism.
pub fn phi_sign(n0: usize, n1: usize) -> f64 {
    let s = (n0 + n1) as i64;
    parity(s * (s + 1) / 2)
}

/// `(-1)^{n1 n2 + n2(n2+1)/2}`, the sign relating stabilizers `K1` and `K1 + K2`.
pub fn phi1_sign(n1: usize, n2: usize) -> f64 {
    let (a, b) = (n1 as i64, n2 as i64);
    parity(a * b + b * (b + 1) / 2)
}

/// `(-1)^{n0(n0+1)/2}`, the sign of the trivialization of a symmetric operator.
pub fn psi_sign(n0: usize) -> f64 {
    let n = n0 as i64;
    parity(n * (n + 1) / 2)
}

fn parity(e: i64) -> f64 {
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// A weighted line element `coeff * (l_1 ^ ... ^ l_k)` or its dual.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedLine {
    pub basis_label: Vec<String>,
    pub coeff: f64,
    pub weight: i64,
    pub dual: bool,
}

impl WeightedLine {
    /// The determinant line of a space spanned by the labelled basis.
    pub fn det(labels: &[&str], coeff: f64) -> Self {
        Self {
            basis_label: labels.iter().map(|s| s.to_string()).collect(),
            coeff,
            weight: labels.len() as i64,
            dual: false,
        }
    }

    /// Dual element: `(c e)^* = c^{-1} e^*`, weight negated.
    pub fn dualize(&self) -> Self {
        Self {
            basis_label: self.basis_label.clone(),
            coeff: 1.0 / self.coeff,
            weight: -self.weight,
            dual: !self.dual,
        }
    }
}

/// `u (x) u' -> (-1)^{w w'} u' (x) u`; returns the sign and the swapped pair.
pub fn weighted_swap(u: &WeightedLine, v: &WeightedLine) -> (f64, WeightedLine, WeightedLine) {
    (swap_sign(u.weight, v.weight), v.clone(), u.clone())
}

/// `u^* (x) v -> (-1)^{w(w-1)/2} u^*[v]` with `w` the weight of `v`.
pub fn weighted_pair(dual: &WeightedLine, x: &WeightedLine) -> Result<f64, DetError> {
    if !dual.dual || x.dual || dual.weight != -x.weight {
        return Err(DetError::WeightMismatch { dual: dual.weight, line: x.weight });
    }
    let perm: Option<Vec<usize>> = x
        .basis_label
        .iter()
        .map(|l| dual.basis_label.iter().position(|d| d == l))
        .collect();
    let mut perm = perm.ok_or(DetError::LabelMismatch)?;
    if perm.len() != dual.basis_label.len() {
        return Err(DetError::LabelMismatch);
    }
    let mut sign = 1.0;
    for i in 0..perm.len() {
        while perm[i] != i {
            let j = perm[i];
            if perm[j] == j {
                return Err(DetError::LabelMismatch);
            }
            perm.swap(i, j);
            sign = -sign;
        }
    }
    Ok(pair_sign(x.weight) * dual.coeff * x.coeff * sign)
}

/// A real linear map with cached orthonormal frames of its kernel and cokernel.
#[derive(Debug, Clone)]
pub struct LinearMapData {
    pub matrix: DMatrix<f64>,
    pub kernel: DMatrix<f64>,
    pub cokernel: DMatrix<f64>,
    pub rank: usize,
}

impl LinearMapData {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        let rank = linalg::rank(&matrix, RANK_TOL);
        let kernel = linalg::smallest_right_singular(&matrix, matrix.ncols() - rank);
        let cokernel = linalg::smallest_right_singular(&matrix.transpose(), matrix.nrows() - rank);
        Self { matrix, kernel, cokernel, rank }
    }

    pub fn dim_ker(&self) -> usize {
        self.kernel.ncols()
    }

    pub fn dim_coker(&self) -> usize {
        self.cokernel.ncols()
    }

    /// The element `coeff * (ker frame) (x) (coker frame)^*` of `det T`.
    pub fn det_element(&self, coeff: f64) -> DetElement {
        DetElement { num: self.kernel.clone(), den: self.cokernel.clone(), coeff }
    }
}

/// A map `K: V -> H_2` used to stabilize operators `H_1 -> H_2`.
#[derive(Debug, Clone)]
pub struct StabilizerData {
    pub k: DMatrix<f64>,
}

impl StabilizerData {
    pub fn new(k: DMatrix<f64>) -> Self {
        Self { k }
    }

    pub fn dim(&self) -> usize {
        self.k.ncols()
    }

    /// The inclusion of the orthogonal complement of the range of `t`.
    pub fn cokernel_inclusion(t: &LinearMapData) -> Self {
        Self { k: t.cokernel.clone() }
    }

    /// `T_K = [T | K] : H_1 (+) V -> H_2`.
    pub fn stabilized(&self, t: &DMatrix<f64>) -> DMatrix<f64> {
        linalg::hcat(t, &self.k)
    }

    pub fn stabilizes(&self, t: &DMatrix<f64>) -> bool {
        linalg::rank(&self.stabilized(t), RANK_TOL) == t.nrows()
    }

    /// Direct sum `K1 + K2 : V1 (+) V2 -> H_2`.
    pub fn sum(&self, other: &StabilizerData) -> Self {
        Self { k: linalg::hcat(&self.k, &other.k) }
    }
}

/// `coeff * (num_1 ^ ... ^ num_a) (x) (den_1 ^ ... ^ den_b)^*`, the frames given
/// as matrix columns.
#[derive(Debug, Clone)]
pub struct DetElement {
    pub num: DMatrix<f64>,
    pub den: DMatrix<f64>,
    pub coeff: f64,
}

impl DetElement {
    pub fn weight(&self) -> i64 {
        self.num.ncols() as i64 - self.den.ncols() as i64
    }

    /// Coefficient with respect to orthonormal frames `num_basis`, `den_basis`
    /// spanning the same subspaces.
    pub fn coeff_in(&self, num_basis: &DMatrix<f64>, den_basis: &DMatrix<f64>) -> f64 {
        let a = linalg::det(&(num_basis.transpose() * &self.num));
        let b = linalg::det(&(den_basis.transpose() * &self.den));
        self.coeff * a / b
    }
}

/// An exact sequence `0 -> V_n -> ... -> V_0 -> 0`; `maps[i]` is `f_{i+1}: V_{i+1} -> V_i`.
#[derive(Debug, Clone)]
pub struct ExactSequence {
    pub maps: Vec<DMatrix<f64>>,
    dims: Vec<usize>,
}

impl ExactSequence {
    pub fn new(maps: Vec<DMatrix<f64>>) -> Result<Self, DetError> {
        let n = maps.len();
        let mut dims = Vec::with_capacity(n + 1);
        for (i, f) in maps.iter().enumerate() {
            if i == 0 {
                dims.push(f.nrows());
            } else if maps[i - 1].ncols() != f.nrows() {
                return Err(DetError::Shape(i));
            }
            dims.push(f.ncols());
        }
        if n == 0 {
            dims.push(0);
        }
        let seq = Self { maps, dims };
        seq.check_exact()?;
        Ok(seq)
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn dim(&self, i: usize) -> usize {
        self.dims[i]
    }

    /// Rank of `f_i : V_i -> V_{i-1}`, zero for `i = 0`.
    fn rank_of(&self, i: usize) -> usize {
        if i == 0 || i > self.maps.len() {
            0
        } else {
            linalg::rank(&self.maps[i - 1], RANK_TOL)
        }
    }

    fn check_exact(&self) -> Result<(), DetError> {
        let n = self.maps.len();
        for i in 0..=n {
            let incoming = if i < n { self.rank_of(i + 1) } else { 0 };
            let outgoing = self.rank_of(i);
            if incoming + outgoing != self.dims[i] {
                return Err(DetError::NotExact { node: i, residual: f64::NAN });
            }
            if i >= 1 && i < n {
                let comp = &self.maps[i - 1] * &self.maps[i];
                let scale = self.maps[i - 1].norm() * self.maps[i].norm();
                let res = comp.amax();
                if res > RANK_TOL * scale.max(1.0) {
                    return Err(DetError::NotExact { node: i, residual: res });
                }
            }
        }
        Ok(())
    }

    /// `d_i = det[f_{i+1}(omega_{i+1}) | omega_i]`, coordinates in the standard basis of `V_i`.
    fn node_coordinate(&self, omegas: &[DMatrix<f64>], i: usize) -> f64 {
        let n = self.maps.len();
        let pushed = if i < n {
            &self.maps[i] * &omegas[i + 1]
        } else {
            DMatrix::zeros(self.dims[i], 0)
        };
        linalg::det(&linalg::hcat(&pushed, &omegas[i]))
    }

    /// The scalar of the canonical isomorphism
    /// `(x)_k det V_{n-2k} -> (x)_k det V_{n-1-2k}` relative to standard bases,
    /// evaluated through the adapted basis `omegas`.
    pub fn induced_isomorphism(&self, omegas: &[DMatrix<f64>]) -> f64 {
        let n = self.maps.len();
        let mut ratio = 1.0;
        for i in 0..=n {
            let d = self.node_coordinate(omegas, i);
            if (n - i) % 2 == 0 {
                ratio /= d;
            } else {
                ratio *= d;
            }
        }
        ratio
    }
}

/// An adapted basis `omega_i` in `Lambda^{c_i} V_i`, `c_i = rank f_i`: each
/// `omega_i` spans a complement of `ker f_i`. With an RNG, the complement, the
/// frame inside it, and kernel components are all randomized.
pub fn adapted_basis<R: Rng + ?Sized>(
    seq: &ExactSequence,
    mut rng: Option<&mut R>,
) -> Vec<DMatrix<f64>> {
    let n = seq.maps.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let dim = seq.dims[i];
        if i == 0 {
            out.push(DMatrix::zeros(dim, 0));
            continue;
        }
        let f = &seq.maps[i - 1];
        let c = seq.rank_of(i);
        let row_space = linalg::orth(&f.transpose(), RANK_TOL);
        let mut omega = row_space.columns(0, c).into_owned();
        if let Some(r) = rng.as_deref_mut() {
            let kernel = linalg::smallest_right_singular(f, dim - c);
            let mix = random_invertible(r, c);
            let shear = random_gaussian(r, kernel.ncols(), c);
            omega = &omega * mix + &kernel * shear;
        }
        out.push(omega);
    }
    out
}

pub(crate) fn random_gaussian<R: Rng + ?Sized>(rng: &mut R, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub(crate) fn random_invertible<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    loop {
        let m = random_gaussian(rng, n, n) + DMatrix::identity(n, n) * 0.5;
        if linalg::singular_values(&m).last().is_some_and(|&s| s > 0.1) {
            return m;
        }
    }
}

/// Frames entering the explicit stabilizer isomorphism.
struct PhiFrames {
    /// Orthonormal basis of `ker T_K` in `H_1 (+) V`.
    ker_tk: DMatrix<f64>,
    /// `eta`: vectors of `ker T_K` whose `V`-components span `ker F`.
    eta: DMatrix<f64>,
    /// `omega`: vectors of `V` mapped by `F` onto a basis of `coker T`.
    omega: DMatrix<f64>,
}

fn phi_frames<R: Rng + ?Sized>(
    t: &LinearMapData,
    k: &StabilizerData,
    xi: &DMatrix<f64>,
    rng: Option<&mut R>,
) -> Result<PhiFrames, DetError> {
    let (m, n1) = (t.matrix.nrows(), t.matrix.ncols());
    let v = k.dim();
    let tk = k.stabilized(&t.matrix);
    let rk = linalg::rank(&tk, RANK_TOL);
    if rk != m {
        return Err(DetError::NotStabilizer { rank: rk, rows: m });
    }
    let ker_tk = linalg::smallest_right_singular(&tk, n1 + v - m);
    let xi_emb = linalg::vcat(xi, &DMatrix::zeros(v, xi.ncols()));
    let xi_on = linalg::orth(&xi_emb, 1e-8);
    // Complement of ker T inside ker T_K.
    let proj = DMatrix::identity(n1 + v, n1 + v) - &xi_on * xi_on.transpose();
    let comp = linalg::leading_left_singular(&(proj * &ker_tk), ker_tk.ncols() - xi.ncols());
    // F = Proj_coker o K in coordinates of the cokernel frame.
    let f = t.cokernel.transpose() * &k.k;
    let n0 = t.dim_coker();
    let omega_base = linalg::orth(&f.transpose(), RANK_TOL).columns(0, n0).into_owned();
    let (eta, omega) = match rng {
        None => (comp, omega_base),
        Some(r) => {
            let c = comp.ncols();
            let eta = &comp * random_invertible(r, c) + &xi_emb * random_gaussian(r, xi.ncols(), c);
            let ker_f = linalg::smallest_right_singular(&f, v - n0);
            let omega = &omega_base * random_invertible(r, n0)
                + &ker_f * random_gaussian(r, ker_f.ncols(), n0);
            (eta, omega)
        }
    };
    Ok(PhiFrames { ker_tk, eta, omega })
}

/// The canonical isomorphism `det T -> det(ker T_K) (x) (det V)^*`.
///
/// For an adapted basis `xi (x) (P_V(eta) ^ omega)` of the sequence
/// `0 -> ker T -> ker T_K -> V -> coker T -> 0` it sends `xi (x) F(omega)^*` to
/// `(-1)^{(n0+n1)(n0+n1+1)/2} (xi ^ eta) (x) (P_V(eta) ^ omega)^*`, with
/// `n0 = dim coker T` and `n1 = dim V`. The output frames are returned as-is;
/// use [`DetElement::coeff_in`] to compare against fixed bases.
pub fn phi_k(
    t: &LinearMapData,
    k: &StabilizerData,
    x: &DetElement,
) -> Result<DetElement, DetError> {
    phi_k_with::<rand::rngs::ThreadRng>(t, k, x, None)
}

/// [`phi_k`] with an optional RNG randomizing the adapted basis.
pub fn phi_k_with<R: Rng + ?Sized>(
    t: &LinearMapData,
    k: &StabilizerData,
    x: &DetElement,
    rng: Option<&mut R>,
) -> Result<DetElement, DetError> {
    let (m, n1) = (t.matrix.nrows(), t.matrix.ncols());
    if x.num.nrows() != n1 || x.den.nrows() != m || x.num.ncols() != t.dim_ker()
        || x.den.ncols() != t.dim_coker()
    {
        return Err(DetError::Incompatible);
    }
    let v = k.dim();
    let frames = phi_frames(t, k, &x.num, rng)?;
    // F(omega) against the element's own cokernel frame.
    let f_omega = &k.k * &frames.omega;
    let f = linalg::det(&(x.den.transpose() * f_omega)) / linalg::det(&(x.den.transpose() * &x.den));
    let xi_emb = linalg::vcat(&x.num, &DMatrix::zeros(v, x.num.ncols()));
    let num = linalg::hcat(&xi_emb, &frames.eta);
    let pv_eta = frames.eta.rows(n1, v).into_owned();
    let den = linalg::hcat(&pv_eta, &frames.omega);
    let sign = phi_sign(t.dim_coker(), v);
    debug_assert_eq!(num.ncols(), frames.ker_tk.ncols());
    Ok(DetElement { num, den, coeff: x.coeff * f * sign })
}

/// Orthonormal basis of `ker T_K`, the reference frame for coefficients of [`phi_k`] outputs.
pub fn stabilized_kernel(t: &DMatrix<f64>, k: &StabilizerData) -> DMatrix<f64> {
    let tk = k.stabilized(t);
    linalg::smallest_right_singular(&tk, tk.ncols() - t.nrows())
}

/// The isomorphism `det(ker T_{K1}) (x) (det V1)^* -> det(ker T_{K1+K2}) (x) det(V1 (+) V2)^*`:
/// `eta1 (x) omega1^* -> (-1)^{n1 n2 + n2(n2+1)/2} (eta1 ^ eta2) (x) (omega1 ^ P(eta2))^*`.
pub fn phi_1(
    t: &DMatrix<f64>,
    k1: &StabilizerData,
    k2: &StabilizerData,
    y: &DetElement,
) -> Result<DetElement, DetError> {
    let n = t.ncols();
    let (v1, v2) = (k1.dim(), k2.dim());
    let ksum = k1.sum(k2);
    let tk1 = k1.stabilized(t);
    let r1 = linalg::rank(&tk1, RANK_TOL);
    if r1 != t.nrows() {
        return Err(DetError::NotStabilizer { rank: r1, rows: t.nrows() });
    }
    let ker_sum = stabilized_kernel(t, &ksum);
    let ker1 = stabilized_kernel(t, k1);
    let ker1_emb = linalg::vcat(&ker1, &DMatrix::zeros(v2, ker1.ncols()));
    let proj = DMatrix::identity(n + v1 + v2, n + v1 + v2) - &ker1_emb * ker1_emb.transpose();
    let eta2 = linalg::leading_left_singular(&(proj * &ker_sum), ker_sum.ncols() - ker1.ncols());
    if eta2.ncols() != v2 {
        return Err(DetError::NotStabilizer { rank: eta2.ncols(), rows: v2 });
    }
    let eta1 = linalg::vcat(&y.num, &DMatrix::zeros(v2, y.num.ncols()));
    let omega1 = linalg::vcat(&y.den, &DMatrix::zeros(v2, y.den.ncols()));
    let p_eta2 = eta2.rows(n, v1 + v2).into_owned();
    Ok(DetElement {
        num: linalg::hcat(&eta1, &eta2),
        den: linalg::hcat(&omega1, &p_eta2),
        coeff: y.coeff * phi1_sign(v1, v2),
    })
}

/// Outcome of a composition check.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposeCheck {
    pub ok: bool,
    pub direct: f64,
    pub composed: f64,
}

/// Verifies `Phi_1 o Phi_{K1} = Phi_{K1+K2}` on the kernel/cokernel frame element of `det T`.
pub fn phi_compose_check(
    t: &LinearMapData,
    k1: &StabilizerData,
    k2: &StabilizerData,
) -> Result<ComposeCheck, DetError> {
    let x = t.det_element(1.0);
    let ksum = k1.sum(k2);
    let ker_sum = stabilized_kernel(&t.matrix, &ksum);
    let ident = DMatrix::identity(ksum.dim(), ksum.dim());
    let direct = phi_k(t, &ksum, &x)?.coeff_in(&ker_sum, &ident);
    let y = phi_k(t, k1, &x)?;
    let composed = phi_1(&t.matrix, k1, k2, &y)?.coeff_in(&ker_sum, &ident);
    let ok = direct.signum() == composed.signum()
        && (direct - composed).abs() <= 1e-10 * direct.abs().max(1.0);
    Ok(ComposeCheck { ok, direct, composed })
}

/// The trivialization `Psi_T(xi (x) omega^*) = (-1)^{n0(n0+1)/2} omega^*[xi]` of
/// `det T` for symmetric `T`, where the cokernel is identified with the kernel.
pub fn psi_t(t: &LinearMapData, x: &DetElement) -> Result<f64, DetError> {
    let asym = linalg::asymmetry(&t.matrix);
    if asym > 1e-12 * t.matrix.amax().max(1.0) {
        return Err(DetError::NotSymmetric(asym));
    }
    if x.num.ncols() != x.den.ncols() || x.num.nrows() != x.den.nrows() {
        return Err(DetError::Incompatible);
    }
    let n0 = x.den.ncols();
    if n0 == 0 {
        return Ok(x.coeff);
    }
    // omega^*[xi]: coordinates of xi relative to the frame omega.
    let gram = x.den.transpose() * &x.den;
    let proj = x.den.transpose() * &x.num;
    let coords = gram.lu().solve(&proj).ok_or(DetError::Incompatible)?;
    Ok(psi_sign(n0) * x.coeff * linalg::det(&coords))
}
