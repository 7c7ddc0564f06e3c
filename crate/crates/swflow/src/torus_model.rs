//! Fourier-truncated operators on the flat torus `R^3 / (2 pi Z)^3`.
//!
//! Fields are stored by Fourier coefficients on the modes `|k|_inf <= N`,
//! ordered lexicographically. The volume is normalized to one, so the `L^2`
//! product is the sum of coefficient products.
//!
//! Imaginary-valued forms `i w` are stored by the coefficients of the real form
//! `w`, which satisfy `w_{-k} = conj(w_k)`. Their real coordinates are the
//! zero-mode coefficients followed by `sqrt(2) Re w_k`, `sqrt(2) Im w_k` for
//! every mode `k` after zero in the mode order, which makes the coordinates
//! `L^2`-orthonormal. Spinor coordinates interleave the real and imaginary
//! parts of each complex coefficient.

use crate::clifford3::{self, Form, Spinor, C64};
use crate::linalg;
use crate::specflow::{realify, HermitianPath, SfError};
use nalgebra::{DMatrix, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

const I: C64 = C64::new(0.0, 1.0);
const ZERO: C64 = C64::new(0.0, 0.0);
const BINOM3: [usize; 4] = [1, 3, 3, 1];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TorusError {
    #[error("cutoff must be at least 1")]
    CutoffTooSmall,
    #[error("mode radius {needed} exceeds the available margin {available}")]
    MarginExceeded { needed: usize, available: usize },
    #[error("expected {expected} coordinates, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("field has no form of degree {0}")]
    Degree(usize),
    #[error("fields live on different truncations ({0} vs {1})")]
    Truncation(usize, usize),
    #[error("n_max must be at least 2")]
    TowerWindow,
    #[error(transparent)]
    Path(#[from] SfError),
}

pub type Mode = [i64; 3];

/// Modes `k in Z^3` with `|k|_inf <= N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusTruncation {
    n: usize,
}

impl TorusTruncation {
    pub fn new(n: usize) -> Result<Self, TorusError> {
        if n == 0 {
            return Err(TorusError::CutoffTooSmall);
        }
        Ok(Self { n })
    }

    pub fn cutoff(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> usize {
        2 * self.n + 1
    }

    pub fn num_modes(&self) -> usize {
        self.side().pow(3)
    }

    /// Index of the zero mode.
    pub fn center(&self) -> usize {
        (self.num_modes() - 1) / 2
    }

    pub fn mode(&self, i: usize) -> Mode {
        let s = self.side();
        let n = self.n as i64;
        [(i / (s * s)) as i64 - n, ((i / s) % s) as i64 - n, (i % s) as i64 - n]
    }

    pub fn index(&self, k: Mode) -> Option<usize> {
        let n = self.n as i64;
        if k.iter().any(|x| x.abs() > n) {
            return None;
        }
        let s = self.side();
        Some((((k[0] + n) as usize * s) + (k[1] + n) as usize) * s + (k[2] + n) as usize)
    }

    /// Index of `-k`.
    pub fn negate(&self, i: usize) -> usize {
        self.num_modes() - 1 - i
    }

    pub fn modes(&self) -> Vec<Mode> {
        (0..self.num_modes()).map(|i| self.mode(i)).collect()
    }

    pub fn spinor_dim(&self) -> usize {
        4 * self.num_modes()
    }

    pub fn form_dim(&self, degree: usize) -> usize {
        BINOM3[degree] * self.num_modes()
    }

    fn check(&self, n: usize) -> Result<(), TorusError> {
        if self.n == n {
            Ok(())
        } else {
            Err(TorusError::Truncation(self.n, n))
        }
    }
}

pub fn inf_norm(k: Mode) -> usize {
    k.iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0)
}

/// Constant connection offset `i alpha_j dx^j`; `alpha` and `alpha + 2 m` are gauge equivalent.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FlatConnection {
    pub alpha: Vector3<f64>,
}

impl FlatConnection {
    pub fn new(alpha: Vector3<f64>) -> Self {
        Self { alpha }
    }

    pub fn trivial() -> Self {
        Self::default()
    }

    /// The gauge-equivalent connection `alpha + 2 m e_j`.
    pub fn gauge_shift(&self, j: usize, m: i64) -> Self {
        let mut alpha = self.alpha;
        alpha[j] += 2.0 * m as f64;
        Self { alpha }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Spinor,
    Form(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
    Real,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisLabel {
    pub field: FieldKind,
    pub mode: Mode,
    pub component: usize,
    pub part: Part,
}

pub fn spinor_labels(trunc: &TorusTruncation) -> Vec<BasisLabel> {
    let mut out = Vec::with_capacity(trunc.spinor_dim());
    for i in 0..trunc.num_modes() {
        for component in 0..2 {
            for part in [Part::Re, Part::Im] {
                out.push(BasisLabel { field: FieldKind::Spinor, mode: trunc.mode(i), component, part });
            }
        }
    }
    out
}

pub fn form_labels(trunc: &TorusTruncation, degree: usize) -> Vec<BasisLabel> {
    let comps = BINOM3[degree];
    let mut out = Vec::with_capacity(trunc.form_dim(degree));
    let field = FieldKind::Form(degree);
    for i in trunc.center()..trunc.num_modes() {
        let mode = trunc.mode(i);
        if i == trunc.center() {
            for component in 0..comps {
                out.push(BasisLabel { field, mode, component, part: Part::Real });
            }
        } else {
            for component in 0..comps {
                for part in [Part::Re, Part::Im] {
                    out.push(BasisLabel { field, mode, component, part });
                }
            }
        }
    }
    out
}

/// A real matrix acting between labelled coordinate spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    pub matrix: DMatrix<f64>,
    pub domain: Vec<BasisLabel>,
    pub codomain: Vec<BasisLabel>,
}

impl TruncatedOperator {
    pub fn dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.matrix.is_square()
    }

    /// Indices of coordinates whose mode lies within `radius`.
    pub fn interior_indices(labels: &[BasisLabel], radius: usize) -> Vec<usize> {
        (0..labels.len()).filter(|&i| inf_norm(labels[i].mode) <= radius).collect()
    }
}

/// Matrix of a linear map given on real coordinates, column by column.
pub fn assemble<F: Fn(&[f64]) -> Vec<f64>>(dim_in: usize, dim_out: usize, f: F) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim_out, dim_in);
    let mut e = vec![0.0; dim_in];
    for j in 0..dim_in {
        e[j] = 1.0;
        let col = f(&e);
        debug_assert_eq!(col.len(), dim_out);
        m.set_column(j, &nalgebra::DVector::from_vec(col));
        e[j] = 0.0;
    }
    m
}

/// A spinor field by its Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    n: usize,
    pub coeffs: Vec<Spinor>,
}

impl SpinorField {
    pub fn zeros(trunc: &TorusTruncation) -> Self {
        Self { n: trunc.n, coeffs: vec![Spinor::zeros(); trunc.num_modes()] }
    }

    /// The constant field with value `s`.
    pub fn constant(trunc: &TorusTruncation, s: Spinor) -> Self {
        let mut f = Self::zeros(trunc);
        f.coeffs[trunc.center()] = s;
        f
    }

    pub fn truncation(&self) -> TorusTruncation {
        TorusTruncation { n: self.n }
    }

    /// Independent standard normal real and imaginary parts on modes within `radius`.
    pub fn random<R: Rng + ?Sized>(trunc: &TorusTruncation, radius: usize, rng: &mut R) -> Self {
        let mut f = Self::zeros(trunc);
        for i in 0..trunc.num_modes() {
            if inf_norm(trunc.mode(i)) <= radius {
                for c in 0..2 {
                    f.coeffs[i][c] = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
                }
            }
        }
        f
    }

    pub fn to_real(&self) -> Vec<f64> {
        self.coeffs.iter().flat_map(|s| [s[0].re, s[0].im, s[1].re, s[1].im]).collect()
    }

    pub fn from_real(trunc: &TorusTruncation, x: &[f64]) -> Result<Self, TorusError> {
        if x.len() != trunc.spinor_dim() {
            return Err(TorusError::Dimension { expected: trunc.spinor_dim(), found: x.len() });
        }
        let coeffs = x
            .chunks(4)
            .map(|c| Spinor::new(C64::new(c[0], c[1]), C64::new(c[2], c[3])))
            .collect();
        Ok(Self { n: trunc.n, coeffs })
    }

    /// Largest `|k|_inf` carrying a nonzero coefficient.
    pub fn radius(&self) -> usize {
        let t = self.truncation();
        (0..self.coeffs.len())
            .filter(|&i| self.coeffs[i] != Spinor::zeros())
            .map(|i| inf_norm(t.mode(i)))
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|s| *s == Spinor::zeros())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { n: self.n, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { n: self.n, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::from(-1.0)))
    }

    /// Hermitian `L^2` product `int <self, other>`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| clifford3::inner(a, b)).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner(self).re
    }

    fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&i| self.coeffs[i] != Spinor::zeros()).collect()
    }
}

/// An imaginary-valued differential form `i w` of a fixed degree, stored by the
/// coefficients of `w` (mode-major, component-minor).
#[derive(Debug, Clone, PartialEq)]
pub struct FormField {
    n: usize,
    degree: usize,
    pub coeffs: Vec<C64>,
}

impl FormField {
    pub fn zeros(trunc: &TorusTruncation, degree: usize) -> Result<Self, TorusError> {
        if degree > 3 {
            return Err(TorusError::Degree(degree));
        }
        Ok(Self { n: trunc.n, degree, coeffs: vec![ZERO; trunc.form_dim(degree)] })
    }

    /// The constant form with real component values `values`.
    pub fn constant(trunc: &TorusTruncation, degree: usize, values: &[f64]) -> Result<Self, TorusError> {
        let mut f = Self::zeros(trunc, degree)?;
        if values.len() != BINOM3[degree] {
            return Err(TorusError::Dimension { expected: BINOM3[degree], found: values.len() });
        }
        let c = trunc.center();
        for (j, &v) in values.iter().enumerate() {
            f.coeffs[c * BINOM3[degree] + j] = C64::from(v);
        }
        Ok(f)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn comps(&self) -> usize {
        BINOM3[self.degree]
    }

    pub fn truncation(&self) -> TorusTruncation {
        TorusTruncation { n: self.n }
    }

    pub fn get(&self, mode_index: usize, comp: usize) -> C64 {
        self.coeffs[mode_index * self.comps() + comp]
    }

    fn set_mirrored(&mut self, mode_index: usize, comp: usize, v: C64) {
        let t = self.truncation();
        let c = self.comps();
        self.coeffs[mode_index * c + comp] = v;
        self.coeffs[t.negate(mode_index) * c + comp] = v.conj();
    }

    /// Real component values of the zero mode.
    pub fn constant_part(&self) -> Vec<f64> {
        let c = self.truncation().center();
        (0..self.comps()).map(|j| self.get(c, j).re).collect()
    }

    pub fn to_real(&self) -> Vec<f64> {
        let t = self.truncation();
        let comps = self.comps();
        let mut out = Vec::with_capacity(self.coeffs.len());
        let s2 = std::f64::consts::SQRT_2;
        for i in t.center()..t.num_modes() {
            for j in 0..comps {
                let z = self.get(i, j);
                if i == t.center() {
                    out.push(z.re);
                } else {
                    out.push(s2 * z.re);
                    out.push(s2 * z.im);
                }
            }
        }
        out
    }

    pub fn from_real(trunc: &TorusTruncation, degree: usize, x: &[f64]) -> Result<Self, TorusError> {
        let mut f = Self::zeros(trunc, degree)?;
        if x.len() != f.coeffs.len() {
            return Err(TorusError::Dimension { expected: f.coeffs.len(), found: x.len() });
        }
        let comps = f.comps();
        let s2 = std::f64::consts::SQRT_2;
        let mut pos = 0;
        for i in trunc.center()..trunc.num_modes() {
            for j in 0..comps {
                if i == trunc.center() {
                    f.coeffs[i * comps + j] = C64::from(x[pos]);
                    pos += 1;
                } else {
                    f.set_mirrored(i, j, C64::new(x[pos], x[pos + 1]) / s2);
                    pos += 2;
                }
            }
        }
        Ok(f)
    }

    /// Standard normal real coordinates on modes within `radius`.
    pub fn random<R: Rng + ?Sized>(
        trunc: &TorusTruncation,
        degree: usize,
        radius: usize,
        rng: &mut R,
    ) -> Result<Self, TorusError> {
        let labels = form_labels(trunc, degree);
        let x: Vec<f64> = labels
            .iter()
            .map(|l| if inf_norm(l.mode) <= radius { rng.sample(StandardNormal) } else { 0.0 })
            .collect();
        Self::from_real(trunc, degree, &x)
    }

    /// A single real Fourier mode: `amp cos(k.x)` (or `amp sin(k.x)`) in component `comp`.
    pub fn single_mode(
        trunc: &TorusTruncation,
        degree: usize,
        k: Mode,
        comp: usize,
        amp: f64,
        sine: bool,
    ) -> Result<Self, TorusError> {
        let mut f = Self::zeros(trunc, degree)?;
        let i = trunc.index(k).ok_or(TorusError::MarginExceeded { needed: inf_norm(k), available: trunc.n })?;
        if i == trunc.center() {
            if !sine {
                let c = f.comps();
                f.coeffs[i * c + comp] = C64::from(amp);
            }
            return Ok(f);
        }
        let v = if sine { C64::new(0.0, -0.5 * amp) } else { C64::from(0.5 * amp) };
        f.set_mirrored(i, comp, v);
        Ok(f)
    }

    pub fn radius(&self) -> usize {
        let t = self.truncation();
        let c = self.comps();
        (0..self.coeffs.len())
            .filter(|&i| self.coeffs[i] != ZERO)
            .map(|i| inf_norm(t.mode(i / c)))
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, degree: self.degree, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree);
        Self {
            n: self.n,
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Real `L^2` product of the underlying real forms.
    pub fn dot(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a * b.conj()).re).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn support(&self) -> Vec<usize> {
        let c = self.comps();
        let mut s: Vec<usize> = (0..self.coeffs.len()).filter(|&i| self.coeffs[i] != ZERO).map(|i| i / c).collect();
        s.dedup();
        s
    }
}

fn mode_add(a: Mode, b: Mode) -> Mode {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn mode_sub(a: Mode, b: Mode) -> Mode {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn mode_vec(k: Mode) -> Vector3<f64> {
    Vector3::new(k[0] as f64, k[1] as f64, k[2] as f64)
}

/// Exterior derivative `d: Omega^p -> Omega^{p+1}`, wedge with `i k` mode by mode.
pub fn d_field(f: &FormField) -> Result<FormField, TorusError> {
    if f.degree >= 3 {
        return Err(TorusError::Degree(f.degree + 1));
    }
    let t = f.truncation();
    let mut out = FormField::zeros(&t, f.degree + 1)?;
    let (ci, co) = (f.comps(), out.comps());
    for i in 0..t.num_modes() {
        let k = mode_vec(t.mode(i));
        let ik = Form::new(1, vec![I * k[0], I * k[1], I * k[2]]).expect("degree one");
        let w = Form::new(f.degree, f.coeffs[i * ci..(i + 1) * ci].to_vec()).expect("valid degree");
        let dw = ik.wedge(&w).expect("degree at most three");
        out.coeffs[i * co..(i + 1) * co].copy_from_slice(&dw.coeffs);
    }
    Ok(out)
}

/// Pointwise Hodge star.
pub fn star_field(f: &FormField) -> FormField {
    let t = f.truncation();
    let mut out = FormField::zeros(&t, 3 - f.degree).expect("valid degree");
    let (ci, co) = (f.comps(), out.comps());
    for i in 0..t.num_modes() {
        let w = Form::new(f.degree, f.coeffs[i * ci..(i + 1) * ci].to_vec()).expect("valid degree");
        let sw = clifford3::hodge_star(&w).expect("valid degree");
        out.coeffs[i * co..(i + 1) * co].copy_from_slice(&sw.coeffs);
    }
    out
}

/// Codifferential `d^* = (-1)^{3(p+1)+1} * d *` on `p`-forms.
pub fn codiff_field(f: &FormField) -> Result<FormField, TorusError> {
    if f.degree == 0 {
        return Err(TorusError::Degree(0));
    }
    let sign = if (3 * (f.degree + 1) + 1) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(star_field(&d_field(&star_field(f))?).scale(sign))
}

fn form_operator<F: Fn(&FormField) -> FormField>(
    trunc: &TorusTruncation,
    from: usize,
    to: usize,
    f: F,
) -> TruncatedOperator {
    let matrix = assemble(trunc.form_dim(from), trunc.form_dim(to), |x| {
        f(&FormField::from_real(trunc, from, x).expect("dimension")).to_real()
    });
    TruncatedOperator { matrix, domain: form_labels(trunc, from), codomain: form_labels(trunc, to) }
}

/// `d` on forms of degree `0`, `1` or `2`.
pub fn exterior_d(trunc: &TorusTruncation, degree: usize) -> Result<TruncatedOperator, TorusError> {
    if degree > 2 {
        return Err(TorusError::Degree(degree));
    }
    Ok(form_operator(trunc, degree, degree + 1, |f| d_field(f).expect("degree")))
}

pub fn codifferential(trunc: &TorusTruncation, degree: usize) -> Result<TruncatedOperator, TorusError> {
    if degree == 0 || degree > 3 {
        return Err(TorusError::Degree(degree));
    }
    Ok(form_operator(trunc, degree, degree - 1, |f| codiff_field(f).expect("degree")))
}

pub fn hodge(trunc: &TorusTruncation, degree: usize) -> Result<TruncatedOperator, TorusError> {
    if degree > 3 {
        return Err(TorusError::Degree(degree));
    }
    Ok(form_operator(trunc, degree, 3 - degree, star_field))
}

/// The `2x2` block `sigma.(k + alpha/2)` of the Dirac operator at mode `k`.
pub fn dirac_block(k: Mode, alpha: &Vector3<f64>) -> clifford3::Endo {
    let v = mode_vec(k) + alpha * 0.5;
    let s = clifford3::pauli();
    s[0] * C64::from(v[0]) + s[1] * C64::from(v[1]) + s[2] * C64::from(v[2])
}

/// Complex matrix of the Dirac operator on spinor coefficients.
pub fn dirac_complex(trunc: &TorusTruncation, conn: &FlatConnection) -> DMatrix<C64> {
    let m = trunc.num_modes();
    let mut out = DMatrix::from_element(2 * m, 2 * m, ZERO);
    for i in 0..m {
        let b = dirac_block(trunc.mode(i), &conn.alpha);
        for r in 0..2 {
            for c in 0..2 {
                out[(2 * i + r, 2 * i + c)] = b[(r, c)];
            }
        }
    }
    out
}

/// Applies the Dirac operator of a flat connection.
pub fn dirac_apply(conn: &FlatConnection, psi: &SpinorField) -> SpinorField {
    let t = psi.truncation();
    let mut out = SpinorField::zeros(&t);
    for i in 0..t.num_modes() {
        out.coeffs[i] = dirac_block(t.mode(i), &conn.alpha) * psi.coeffs[i];
    }
    out
}

/// The realified Dirac operator, block diagonal over modes.
pub fn fourier_dirac(trunc: &TorusTruncation, conn: &FlatConnection) -> TruncatedOperator {
    let labels = spinor_labels(trunc);
    TruncatedOperator { matrix: realify(&dirac_complex(trunc, conn)), domain: labels.clone(), codomain: labels }
}

/// The multiset `{+-|k + alpha/2|}` with each value doubled by realification, sorted.
pub fn analytic_dirac_spectrum(trunc: &TorusTruncation, conn: &FlatConnection) -> Vec<f64> {
    let mut out = Vec::with_capacity(trunc.spinor_dim());
    for k in trunc.modes() {
        let r = (mode_vec(k) + conn.alpha * 0.5).norm();
        out.extend([r, r, -r, -r]);
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Realified Dirac family `alpha_0 + t (alpha_1 - alpha_0)`, `t in [0, 1]`.
pub fn dirac_family_path(
    trunc: &TorusTruncation,
    alpha0: Vector3<f64>,
    alpha1: Vector3<f64>,
    samples: usize,
) -> Result<HermitianPath, TorusError> {
    let tr = *trunc;
    let dir = alpha1 - alpha0;
    let deriv = {
        let m = tr.num_modes();
        let s = clifford3::pauli();
        let b = (s[0] * C64::from(dir[0]) + s[1] * C64::from(dir[1]) + s[2] * C64::from(dir[2])) * C64::from(0.5);
        let mut out = DMatrix::from_element(2 * m, 2 * m, ZERO);
        for i in 0..m {
            for r in 0..2 {
                for c in 0..2 {
                    out[(2 * i + r, 2 * i + c)] = b[(r, c)];
                }
            }
        }
        realify(&out)
    };
    let path = HermitianPath::new(0.0, 1.0, samples, move |t| {
        realify(&dirac_complex(&tr, &FlatConnection::new(alpha0 + dir * t)))
    })?
    .with_derivative(move |_| deriv.clone())
    .mark_realified();
    Ok(path)
}

/// Diagonal model of a magnetic Dirac family over one period `r in [0, 1]`:
/// `|d|` zero-mode towers `-sgn(d)(n + r)` and gapped towers
/// `+-sqrt(2 max(|d|, 1) m + (n + r)^2)`, `m = 1, 2`, for `|n| <= n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MagneticTowerFamily {
    pub flux: i64,
    pub n_max: usize,
}

impl MagneticTowerFamily {
    pub fn new(flux: i64, n_max: usize) -> Result<Self, TorusError> {
        if n_max < 2 {
            return Err(TorusError::TowerWindow);
        }
        Ok(Self { flux, n_max })
    }

    pub fn dim(&self) -> usize {
        let w = 2 * self.n_max + 1;
        self.flux.unsigned_abs() as usize * w + 4 * w
    }

    fn entries(&self, r: f64) -> (Vec<f64>, Vec<f64>) {
        let nm = self.n_max as i64;
        let sgn = self.flux.signum() as f64;
        let level = 2.0 * self.flux.unsigned_abs().max(1) as f64;
        let mut vals = Vec::with_capacity(self.dim());
        let mut ders = Vec::with_capacity(self.dim());
        for _ in 0..self.flux.unsigned_abs() {
            for n in -nm..=nm {
                vals.push(-sgn * (n as f64 + r));
                ders.push(-sgn);
            }
        }
        for m in 1..=2 {
            for n in -nm..=nm {
                let x = n as f64 + r;
                let e = (level * m as f64 + x * x).sqrt();
                vals.extend([e, -e]);
                ders.extend([x / e, -x / e]);
            }
        }
        (vals, ders)
    }

    /// Spectral flow predicted by the wall-crossing pairing: `-1/2 * (2d)`.
    pub fn pairing(&self) -> i64 {
        -self.flux
    }

    pub fn path(&self, samples: usize) -> Result<HermitianPath, TorusError> {
        let me = *self;
        let me2 = *self;
        let diag = |v: Vec<f64>| DMatrix::from_diagonal(&nalgebra::DVector::from_vec(v));
        Ok(HermitianPath::new(0.0, 1.0, samples, move |r| diag(me.entries(r).0))?
            .with_derivative(move |r| diag(me2.entries(r).1)))
    }
}

pub fn magnetic_family_path(d: i64, n_max: usize, samples: usize) -> Result<HermitianPath, TorusError> {
    MagneticTowerFamily::new(d, n_max)?.path(samples)
}

/// Complex matrix of multiplication by the real function with coefficients
/// `g` (one component of `f`) on spinor coefficients, projected onto the truncation.
fn multiplication_complex(trunc: &TorusTruncation, f: &FormField, comp: usize) -> DMatrix<C64> {
    let m = trunc.num_modes();
    let mut out = DMatrix::from_element(2 * m, 2 * m, ZERO);
    let support = f.support();
    for q in 0..m {
        let kq = trunc.mode(q);
        for &p in &support {
            let g = f.get(p, comp);
            if g == ZERO {
                continue;
            }
            if let Some(k) = trunc.index(mode_add(trunc.mode(p), kq)) {
                out[(2 * k, 2 * q)] += g;
                out[(2 * k + 1, 2 * q + 1)] += g;
            }
        }
    }
    out
}

fn pauli_kron(m: &DMatrix<C64>, sigma: &clifford3::Endo) -> DMatrix<C64> {
    let n = m.nrows() / 2;
    let mut out = DMatrix::from_element(2 * n, 2 * n, ZERO);
    for i in 0..n {
        for j in 0..n {
            let g = m[(2 * i, 2 * j)];
            if g == ZERO {
                continue;
            }
            for r in 0..2 {
                for c in 0..2 {
                    out[(2 * i + r, 2 * j + c)] = g * sigma[(r, c)];
                }
            }
        }
    }
    out
}

/// Residual `|D_{A+a}^2 - (nabla^* nabla + c(F_a)/2)|_inf` on the sub-block of
/// modes `|k|_inf <= N - radius(a)`, for a connection perturbation `a` of radius
/// at most `mode_margin`.
pub fn weitzenbock_check(
    trunc: &TorusTruncation,
    conn: &FlatConnection,
    a: &FormField,
    mode_margin: usize,
) -> Result<f64, TorusError> {
    trunc.check(a.n)?;
    if a.degree != 1 {
        return Err(TorusError::Degree(a.degree));
    }
    let r = a.radius();
    if r > mode_margin || r > trunc.n {
        return Err(TorusError::MarginExceeded { needed: r, available: mode_margin.min(trunc.n) });
    }
    let m = trunc.num_modes();
    let s = clifford3::pauli();
    let mult: Vec<DMatrix<C64>> = (0..3).map(|j| multiplication_complex(trunc, a, j)).collect();
    let half = C64::from(0.5);
    // Left side: (D_A + c(a)/2)^2 with c(i beta) = beta.sigma.
    let mut d = dirac_complex(trunc, conn);
    for j in 0..3 {
        d += pauli_kron(&mult[j], &s[j]) * half;
    }
    let lhs = &d * &d;
    // Right side: sum_j H_j^2 with nabla_j = i H_j, plus c(F)/2.
    let mut rhs = DMatrix::from_element(2 * m, 2 * m, ZERO);
    for j in 0..3 {
        let mut h = &mult[j] * half;
        for i in 0..m {
            let v = trunc.mode(i)[j] as f64 + 0.5 * conn.alpha[j];
            h[(2 * i, 2 * i)] += v;
            h[(2 * i + 1, 2 * i + 1)] += v;
        }
        rhs += &h * &h;
    }
    // F = da = i dbeta; c(e_i) c(e_j) = -sigma_i sigma_j.
    let f = d_field(a)?;
    let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
    for (c, &(i, j)) in pairs.iter().enumerate() {
        let phi = multiplication_complex(trunc, &f, c);
        let ce = (s[i] * s[j]) * C64::from(-1.0);
        rhs += pauli_kron(&phi, &ce) * (I * half);
    }
    let keep: Vec<usize> = (0..2 * m).filter(|&x| inf_norm(trunc.mode(x / 2)) + r <= trunc.n).collect();
    let mut res = 0.0f64;
    for &p in &keep {
        for &q in &keep {
            res = res.max((lhs[(p, q)] - rhs[(p, q)]).norm());
        }
    }
    Ok(res)
}

/// Result of a pointwise product: the projected field and whether any mode was dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Projected<T> {
    pub field: T,
    pub spilled: bool,
}

/// `q(psi, phi)`, the polarization of `q(psi) = -1/2 <c(e_j) psi, psi> e^j`, as a 1-form field.
pub fn q_bilin_field(psi: &SpinorField, phi: &SpinorField) -> Projected<FormField> {
    let t = psi.truncation();
    let s = clifford3::pauli();
    let mut out = FormField::zeros(&t, 1).expect("degree one");
    let mut spilled = false;
    let (sp, sf) = (psi.support(), phi.support());
    let quarter = C64::from(0.25);
    let mut add = |p: usize, q: usize, a: &Spinor, b: &Spinor| {
        // coefficient of e^{i(k_q - k_p) x} in a_p^dagger sigma b_q
        match t.index(mode_sub(t.mode(q), t.mode(p))) {
            Some(k) => {
                for j in 0..3 {
                    out.coeffs[3 * k + j] += (a.adjoint() * s[j] * b)[(0, 0)] * quarter;
                }
            }
            None => spilled = true,
        }
    };
    for &p in &sf {
        for &q in &sp {
            add(p, q, &phi.coeffs[p], &psi.coeffs[q]);
        }
    }
    for &p in &sp {
        for &q in &sf {
            add(p, q, &psi.coeffs[p], &phi.coeffs[q]);
        }
    }
    Projected { field: out, spilled }
}

/// `q(psi)` as a 1-form field.
pub fn q_field(psi: &SpinorField) -> Projected<FormField> {
    q_bilin_field(psi, psi)
}

/// Clifford multiplication `c(a) psi` by an imaginary 1-form, `c(i beta) = beta.sigma`.
pub fn clifford_field(a: &FormField, psi: &SpinorField) -> Projected<SpinorField> {
    let t = psi.truncation();
    let s = clifford3::pauli();
    let mut out = SpinorField::zeros(&t);
    let mut spilled = false;
    for p in a.support() {
        let b = Vector3::new(a.get(p, 0), a.get(p, 1), a.get(p, 2));
        let m = s[0] * b[0] + s[1] * b[1] + s[2] * b[2];
        for q in psi.support() {
            match t.index(mode_add(t.mode(p), t.mode(q))) {
                Some(k) => out.coeffs[k] += m * psi.coeffs[q],
                None => spilled = true,
            }
        }
    }
    Projected { field: out, spilled }
}

/// Multiplication `f psi` by an imaginary function `f = i g`.
pub fn function_mul(f: &FormField, psi: &SpinorField) -> Projected<SpinorField> {
    let t = psi.truncation();
    let mut out = SpinorField::zeros(&t);
    let mut spilled = false;
    for p in f.support() {
        let g = f.get(p, 0) * I;
        for q in psi.support() {
            match t.index(mode_add(t.mode(p), t.mode(q))) {
                Some(k) => out.coeffs[k] += psi.coeffs[q] * g,
                None => spilled = true,
            }
        }
    }
    Projected { field: out, spilled }
}

/// The imaginary function `i Im <phi, psi>` pointwise.
pub fn im_inner_field(phi: &SpinorField, psi: &SpinorField) -> Projected<FormField> {
    let t = psi.truncation();
    let mut out = FormField::zeros(&t, 0).expect("degree zero");
    let mut spilled = false;
    let half_inv_i = C64::new(0.0, -0.5);
    for &p in &psi.support() {
        for &q in &phi.support() {
            match t.index(mode_sub(t.mode(q), t.mode(p))) {
                Some(k) => {
                    let a = (psi.coeffs[p].adjoint() * phi.coeffs[q])[(0, 0)];
                    out.coeffs[k] += a * half_inv_i;
                }
                None => spilled = true,
            }
        }
    }
    for &p in &phi.support() {
        for &q in &psi.support() {
            match t.index(mode_sub(t.mode(q), t.mode(p))) {
                Some(k) => {
                    let a = (phi.coeffs[p].adjoint() * psi.coeffs[q])[(0, 0)];
                    out.coeffs[k] -= a * half_inv_i;
                }
                None => spilled = true,
            }
        }
    }
    Projected { field: out, spilled }
}

/// Largest eigenvalue gap ratio helper: sorted eigenvalues of a square operator.
pub fn spectrum(op: &TruncatedOperator) -> Vec<f64> {
    linalg::eigvalsh(&op.matrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_indexing_round_trips() {
        let t = TorusTruncation::new(2).unwrap();
        for i in 0..t.num_modes() {
            assert_eq!(t.index(t.mode(i)), Some(i));
            let k = t.mode(i);
            assert_eq!(t.mode(t.negate(i)), [-k[0], -k[1], -k[2]]);
        }
        assert_eq!(t.mode(t.center()), [0, 0, 0]);
        assert!(TorusTruncation::new(0).is_err());
    }

    #[test]
    fn real_coordinates_round_trip() {
        let t = TorusTruncation::new(1).unwrap();
        let x: Vec<f64> = (0..t.form_dim(1)).map(|i| i as f64 * 0.1 - 1.0).collect();
        let f = FormField::from_real(&t, 1, &x).unwrap();
        for (a, b) in f.to_real().iter().zip(&x) {
            assert!((a - b).abs() < 1e-14);
        }
        let n: f64 = x.iter().map(|v| v * v).sum();
        assert!((f.dot(&f) - n).abs() < 1e-12);
    }

    #[test]
    fn dirac_kernel_at_trivial_connection() {
        let t = TorusTruncation::new(1).unwrap();
        let ev = spectrum(&fourier_dirac(&t, &FlatConnection::trivial()));
        assert_eq!(ev.iter().filter(|x| x.abs() < 1e-12).count(), 4);
    }

    #[test]
    fn magnetic_tower_dimensions() {
        let m = MagneticTowerFamily::new(-3, 2).unwrap();
        assert_eq!(m.path(5).unwrap().dim(), 3 * 5 + 20);
        assert!(MagneticTowerFamily::new(1, 1).is_err());
    }
}
