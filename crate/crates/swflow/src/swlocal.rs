//! Seiberg-Witten map, Chern-Simons-Dirac functional, Hessian, gauge operators
//! and the extended Hessian on the truncated flat torus.
//!
//! A configuration is a spinor field together with a connection offset
//! `i beta` relative to the trivial flat connection. The spinor connection is
//! `nabla = d + 1/2 A`, so `D_A psi = D_0 psi + 1/2 c(A - A_0) psi`.

use crate::clifford3::{self, Spinor, C64};
use crate::linalg;
use crate::orient::{self, OtConfig, OtError};
use crate::specflow::{self, HermitianPath, SfError};
use crate::torus_model::{
    self as tm, assemble, form_labels, spinor_labels, FlatConnection, FormField, SpinorField, TorusError,
    TorusTruncation, TruncatedOperator,
};
use nalgebra::{DMatrix, Vector3};
use rand::Rng;
use thiserror::Error;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SwError {
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Transport(#[from] OtError),
    #[error(transparent)]
    Path(#[from] SfError),
    #[error("spinor term of the functional is not real (imaginary part {0:e})")]
    NotReal(f64),
    #[error("configuration {0} is reducible")]
    Reducible(usize),
    #[error("spinor is not of unit norm (|psi|^2 = {0})")]
    NonUnit(f64),
    #[error("kappa vanishes; the crossing is degenerate")]
    DegenerateKappa,
    #[error("connection form must be a 1-form")]
    ConnectionDegree,
    #[error("fields live on different truncations")]
    Truncation,
    #[error("sign routes disagree: {0} vs {1}")]
    RouteMismatch(i8, i8),
}

/// A pair `(psi, A)` with `A = A_0 + i beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub psi: SpinorField,
    pub conn: FormField,
}

impl Configuration {
    pub fn new(psi: SpinorField, conn: FormField) -> Result<Self, SwError> {
        if conn.degree() != 1 {
            return Err(SwError::ConnectionDegree);
        }
        if psi.truncation() != conn.truncation() {
            return Err(SwError::Truncation);
        }
        Ok(Self { psi, conn })
    }

    /// The reducible configuration `(0, A_0 + i alpha)`.
    pub fn reducible(trunc: &TorusTruncation, alpha: Vector3<f64>) -> Self {
        Self {
            psi: SpinorField::zeros(trunc),
            conn: FormField::constant(trunc, 1, alpha.as_slice()).expect("degree one"),
        }
    }

    /// Spinor and connection offset with standard normal coordinates on modes within `radius`.
    pub fn random<R: Rng + ?Sized>(trunc: &TorusTruncation, radius: usize, rng: &mut R) -> Self {
        Self {
            psi: SpinorField::random(trunc, radius, rng),
            conn: FormField::random(trunc, 1, radius, rng).expect("degree one"),
        }
    }

    pub fn truncation(&self) -> TorusTruncation {
        self.psi.truncation()
    }

    /// Harmonic part of the connection offset.
    pub fn alpha(&self) -> Vector3<f64> {
        Vector3::from_column_slice(&self.conn.constant_part())
    }

    pub fn is_reducible(&self) -> bool {
        self.psi.is_zero()
    }

    /// Action of a constant gauge transformation `gamma in U(1)`.
    pub fn gauge(&self, gamma: C64) -> Self {
        Self { psi: self.psi.scale(gamma), conn: self.conn.clone() }
    }

    /// `(1 - t) self + t other`.
    pub fn lerp(&self, other: &Self, t: f64) -> Self {
        Self {
            psi: self.psi.scale(C64::from(1.0 - t)).add(&other.psi.scale(C64::from(t))),
            conn: self.conn.scale(1.0 - t).add(&other.conn.scale(t)),
        }
    }
}

/// A tangent vector `(phi, a)` or, for the extended operator, `(phi, a, f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub phi: SpinorField,
    pub a: FormField,
    pub f: Option<FormField>,
}

impl TangentVector {
    pub fn to_real(&self) -> Vec<f64> {
        let mut x = self.phi.to_real();
        x.extend(self.a.to_real());
        if let Some(f) = &self.f {
            x.extend(f.to_real());
        }
        x
    }

    pub fn from_real(trunc: &TorusTruncation, x: &[f64], extended: bool) -> Result<Self, SwError> {
        let (ns, na) = (trunc.spinor_dim(), trunc.form_dim(1));
        let nf = if extended { trunc.form_dim(0) } else { 0 };
        if x.len() != ns + na + nf {
            return Err(TorusError::Dimension { expected: ns + na + nf, found: x.len() }.into());
        }
        Ok(Self {
            phi: SpinorField::from_real(trunc, &x[..ns])?,
            a: FormField::from_real(trunc, 1, &x[ns..ns + na])?,
            f: if extended { Some(FormField::from_real(trunc, 0, &x[ns + na..])?) } else { None },
        })
    }

    /// Real `L^2` product.
    pub fn dot(&self, other: &Self) -> f64 {
        let mut s = self.phi.inner(&other.phi).re + self.a.dot(&other.a);
        if let (Some(f), Some(g)) = (&self.f, &other.f) {
            s += f.dot(g);
        }
        s
    }

    pub fn gauge(&self, gamma: C64) -> Self {
        Self { phi: self.phi.scale(gamma), a: self.a.clone(), f: self.f.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            phi: self.phi.sub(&other.phi),
            a: self.a.sub(&other.a),
            f: match (&self.f, &other.f) {
                (Some(f), Some(g)) => Some(f.sub(g)),
                _ => None,
            },
        }
    }

    pub fn max_abs(&self) -> f64 {
        let s = self.phi.coeffs.iter().flat_map(|c| c.iter().map(|z| z.norm())).fold(0.0, f64::max);
        let f = self.f.as_ref().map_or(0.0, |f| f.max_abs());
        s.max(self.a.max_abs()).max(f)
    }
}

/// A closed 2-form `eta = d beta + h` with constant `h`, components `(12, 13, 23)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub beta: FormField,
    pub harmonic: Vector3<f64>,
}

impl Perturbation {
    pub fn zero(trunc: &TorusTruncation) -> Self {
        Self { beta: FormField::zeros(trunc, 1).expect("degree one"), harmonic: Vector3::zeros() }
    }

    pub fn eta(&self) -> FormField {
        let t = self.beta.truncation();
        let h = FormField::constant(&t, 2, self.harmonic.as_slice()).expect("degree two");
        tm::d_field(&self.beta).expect("degree one").add(&h)
    }

    /// `*eta` as a 1-form.
    pub fn star_eta(&self) -> FormField {
        tm::star_field(&self.eta())
    }
}

fn check_margins(c: &Configuration) -> Result<(), SwError> {
    let n = c.truncation().cutoff();
    let (rp, rc) = (c.psi.radius(), c.conn.radius());
    if c.psi.is_zero() {
        return Ok(());
    }
    if 2 * rp > n || rp + rc > n {
        return Err(TorusError::MarginExceeded { needed: (2 * rp).max(rp + rc), available: n }.into());
    }
    Ok(())
}

/// `D_A phi` for the configuration's connection, projected onto the truncation.
fn dirac_a(c: &Configuration, phi: &SpinorField) -> SpinorField {
    let d0 = tm::dirac_apply(&FlatConnection::trivial(), phi);
    d0.add(&tm::clifford_field(&c.conn, phi).field.scale(C64::from(0.5)))
}

fn curl(a: &FormField) -> FormField {
    tm::star_field(&tm::d_field(a).expect("degree one"))
}

/// `SW(psi, A) = (D_A psi, 1/2 q(psi) - *F_A)`.
pub fn sw_map(c: &Configuration) -> Result<TangentVector, SwError> {
    check_margins(c)?;
    let q = tm::q_field(&c.psi).field;
    Ok(TangentVector { phi: dirac_a(c, &c.psi), a: q.scale(0.5).sub(&curl(&c.conn)), f: None })
}

/// `SW(psi, A) - (0, *eta)`.
pub fn sw_map_perturbed(c: &Configuration, eta: &Perturbation) -> Result<TangentVector, SwError> {
    let mut out = sw_map(c)?;
    out.a = out.a.sub(&eta.star_eta());
    Ok(out)
}

/// `1/2 int <psi, D_A psi> - 1/2 int beta ^ d beta` relative to the trivial flat connection.
pub fn csd(c: &Configuration) -> Result<f64, SwError> {
    check_margins(c)?;
    let spin = c.psi.inner(&dirac_a(c, &c.psi)) * 0.5;
    if spin.im.abs() > 1e-12 * spin.norm().max(1.0) {
        return Err(SwError::NotReal(spin.im));
    }
    Ok(spin.re - 0.5 * c.conn.dot(&curl(&c.conn)))
}

fn hessian_apply(c: &Configuration, phi: &SpinorField, a: &FormField) -> (SpinorField, FormField) {
    let s = dirac_a(c, phi).add(&tm::clifford_field(a, &c.psi).field.scale(C64::from(0.5)));
    let f = tm::q_bilin_field(&c.psi, phi).field.sub(&curl(a));
    (s, f)
}

/// The Hessian `F(phi, a) = (D_A phi + 1/2 c(a) psi, q(psi, phi) - *da)`, projected onto the truncation.
pub fn hessian_f(c: &Configuration) -> Result<TruncatedOperator, SwError> {
    check_margins(c)?;
    let t = c.truncation();
    let (ns, na) = (t.spinor_dim(), t.form_dim(1));
    let matrix = assemble(ns + na, ns + na, |x| {
        let phi = SpinorField::from_real(&t, &x[..ns]).expect("dimension");
        let a = FormField::from_real(&t, 1, &x[ns..]).expect("dimension");
        let (s, f) = hessian_apply(c, &phi, &a);
        let mut out = s.to_real();
        out.extend(f.to_real());
        out
    });
    let mut labels = spinor_labels(&t);
    labels.extend(form_labels(&t, 1));
    Ok(TruncatedOperator { matrix, domain: labels.clone(), codomain: labels })
}

/// Linearized gauge action `G f = (-f psi, 2 df)`.
pub fn gauge_g(c: &Configuration, f: &FormField) -> Result<TangentVector, SwError> {
    check_margins(c)?;
    Ok(TangentVector {
        phi: tm::function_mul(f, &c.psi).field.scale(C64::from(-1.0)),
        a: tm::d_field(f)?.scale(2.0),
        f: None,
    })
}

/// Adjoint `G^*(phi, a) = 2 d^* a - i Im <phi, psi>`.
pub fn gauge_gstar(c: &Configuration, v: &TangentVector) -> Result<FormField, SwError> {
    check_margins(c)?;
    let div = tm::codiff_field(&v.a)?.scale(2.0);
    Ok(div.sub(&tm::im_inner_field(&v.phi, &c.psi).field))
}

/// Largest coefficient of `d^* q(psi) - i Im <D_A psi, psi>`.
pub fn dastq_residual(c: &Configuration) -> Result<f64, SwError> {
    check_margins(c)?;
    let q = tm::q_field(&c.psi).field;
    let lhs = tm::codiff_field(&q)?;
    let rhs = tm::im_inner_field(&dirac_a(c, &c.psi), &c.psi).field;
    Ok(lhs.sub(&rhs).max_abs())
}

fn extended_apply(c: &Configuration, phi: &SpinorField, a: &FormField, f: &FormField) -> Vec<f64> {
    let (s, b) = hessian_apply(c, phi, a);
    let s = s.sub(&tm::function_mul(f, &c.psi).field);
    let b = b.add(&tm::d_field(f).expect("degree zero").scale(2.0));
    let g = tm::codiff_field(a)
        .expect("degree one")
        .scale(2.0)
        .sub(&tm::im_inner_field(phi, &c.psi).field);
    let mut out = s.to_real();
    out.extend(b.to_real());
    out.extend(g.to_real());
    out
}

/// The extended Hessian `T = [[F, G], [G^*, 0]]` on `(phi, a, f)`.
pub fn extended_t(c: &Configuration) -> Result<TruncatedOperator, SwError> {
    check_margins(c)?;
    let t = c.truncation();
    let (ns, na, nf) = (t.spinor_dim(), t.form_dim(1), t.form_dim(0));
    let dim = ns + na + nf;
    let matrix = assemble(dim, dim, |x| {
        let phi = SpinorField::from_real(&t, &x[..ns]).expect("dimension");
        let a = FormField::from_real(&t, 1, &x[ns..ns + na]).expect("dimension");
        let f = FormField::from_real(&t, 0, &x[ns + na..]).expect("dimension");
        extended_apply(c, &phi, &a, &f)
    });
    let mut labels = spinor_labels(&t);
    labels.extend(form_labels(&t, 1));
    labels.extend(form_labels(&t, 0));
    Ok(TruncatedOperator { matrix, domain: labels.clone(), codomain: labels })
}

/// The extended Hessian along the straight segment of configurations from `c0`
/// to `c1`; the operator depends affinely on the configuration.
pub fn extended_path(c0: &Configuration, c1: &Configuration, samples: usize) -> Result<HermitianPath, SwError> {
    let t0 = extended_t(c0)?.matrix;
    let t1 = extended_t(c1)?.matrix;
    Ok(HermitianPath::linear(t0, t1, samples)?)
}

/// Signs and spectral flows behind `eps(psi, A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsReport {
    pub eps: i8,
    pub sf: i64,
    pub eps_base: Option<i8>,
    pub sf_base: Option<i64>,
}

fn transport_sign(path: &HermitianPath, cfg: &OtConfig) -> Result<(i8, i64), SwError> {
    let r = orient::transport(path, cfg)?;
    if !r.agrees() {
        return Err(SwError::RouteMismatch(r.eps_det, r.eps_sf));
    }
    Ok((r.eps_det, r.sf))
}

/// `eps(psi, A)`, the orientation transport of the extended Hessian along
/// `t -> (t psi, A)`. With a base connection `A_0` it is also computed along
/// the segment from `(0, A_0)` and the two values must agree.
pub fn eps_config(c: &Configuration, base: Option<&Configuration>, cfg: &OtConfig) -> Result<EpsReport, SwError> {
    let start = Configuration { psi: SpinorField::zeros(&c.truncation()), conn: c.conn.clone() };
    let (eps, sf) = if c.is_reducible() { (1, 0) } else { transport_sign(&extended_path(&start, c, 9)?, cfg)? };
    let (eps_base, sf_base) = match base {
        None => (None, None),
        Some(b) => {
            let b0 = Configuration { psi: SpinorField::zeros(&b.truncation()), conn: b.conn.clone() };
            let (e, s) = transport_sign(&extended_path(&b0, c, 9)?, cfg)?;
            if e != eps {
                return Err(SwError::RouteMismatch(eps, e));
            }
            (Some(e), Some(s))
        }
    };
    Ok(EpsReport { eps, sf, eps_base, sf_base })
}

/// Signed count `sum eps(c)` and its relative form `eps(c_0) sum (-1)^{SF(c_0 -> c)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedCount {
    pub total: i64,
    pub relative: i64,
}

pub fn signed_count(configs: &[Configuration], cfg: &OtConfig) -> Result<SignedCount, SwError> {
    if let Some(i) = configs.iter().position(|c| c.is_reducible()) {
        return Err(SwError::Reducible(i));
    }
    let Some(first) = configs.first() else {
        return Ok(SignedCount { total: 0, relative: 0 });
    };
    let eps: Vec<i8> = configs
        .iter()
        .map(|c| eps_config(c, None, cfg).map(|r| r.eps))
        .collect::<Result<_, _>>()?;
    let total = eps.iter().map(|&e| e as i64).sum();
    let mut relative = 0i64;
    for c in configs {
        let sf = specflow::spectral_flow(&extended_path(first, c, 9)?, &cfg.sf)?.sf;
        relative += if sf.rem_euclid(2) == 0 { 1 } else { -1 };
    }
    Ok(SignedCount { total, relative: eps[0] as i64 * relative })
}

fn check_unit(psi: &SpinorField) -> Result<(), SwError> {
    let n = psi.norm_sqr();
    if (n - 1.0).abs() > 1e-10 {
        return Err(SwError::NonUnit(n));
    }
    Ok(())
}

/// `kappa = 1/2 <c(omega_0) psi_0, psi_0>` for a constant imaginary 1-form `i omega_0`.
pub fn kappa(psi0: &SpinorField, omega0: &Vector3<f64>) -> Result<f64, SwError> {
    check_unit(psi0)?;
    let m = clifford3::clifford_im_matrix(&clifford3::ImCovector { alpha: *omega0 });
    let v: C64 = psi0.coeffs.iter().map(|s| clifford3::inner(&(m * s), s)).sum();
    Ok(0.5 * v.re)
}

/// Compression of `d/dr D_{A_0 + r omega_0} = 1/2 c(omega_0)` onto `span_R(psi_0, i psi_0)`.
pub fn dirac_crossing_compression(psi0: &SpinorField, omega0: &Vector3<f64>) -> Result<DMatrix<f64>, SwError> {
    check_unit(psi0)?;
    let t = psi0.truncation();
    let conn = FormField::constant(&t, 1, omega0.as_slice())?;
    let basis = [psi0.clone(), psi0.scale(I)];
    let images: Vec<SpinorField> =
        basis.iter().map(|b| tm::clifford_field(&conn, b).field.scale(C64::from(0.5))).collect();
    Ok(DMatrix::from_fn(2, 2, |i, j| basis[i].inner(&images[j]).re))
}

/// Compression of the `psi`-derivative of the extended Hessian onto the given tangent vectors.
fn crossing_compression(psi0: &SpinorField, basis: &[TangentVector]) -> DMatrix<f64> {
    let t = psi0.truncation();
    let c1 = Configuration::new(psi0.clone(), FormField::zeros(&t, 1).expect("degree one")).expect("valid");
    let zero_psi = Configuration { psi: SpinorField::zeros(&t), conn: c1.conn.clone() };
    let z = |v: &TangentVector| -> Vec<f64> {
        let f = v.f.clone().expect("extended vector");
        let one = extended_apply(&c1, &v.phi, &v.a, &f);
        let zero = extended_apply(&zero_psi, &v.phi, &v.a, &f);
        one.iter().zip(&zero).map(|(x, y)| x - y).collect()
    };
    let images: Vec<Vec<f64>> = basis.iter().map(z).collect();
    let coords: Vec<Vec<f64>> = basis.iter().map(|b| b.to_real()).collect();
    DMatrix::from_fn(basis.len(), basis.len(), |i, j| {
        coords[i].iter().zip(&images[j]).map(|(x, y)| x * y).sum()
    })
}

fn tangent(phi: SpinorField, a: FormField, f: FormField) -> TangentVector {
    TangentVector { phi, a, f: Some(f) }
}

/// Crossing matrix on the basis `(psi_0, i psi_0, omega_0/|omega_0|, i)`.
pub fn crossing_matrix_b1(psi0: &SpinorField, omega0: &Vector3<f64>) -> Result<DMatrix<f64>, SwError> {
    let k = kappa(psi0, omega0)?;
    if k == 0.0 || omega0.norm() == 0.0 {
        return Err(SwError::DegenerateKappa);
    }
    let t = psi0.truncation();
    let zs = SpinorField::zeros(&t);
    let za = FormField::zeros(&t, 1)?;
    let zf = FormField::zeros(&t, 0)?;
    let w = omega0 / omega0.norm();
    let basis = [
        tangent(psi0.clone(), za.clone(), zf.clone()),
        tangent(psi0.scale(I), za.clone(), zf.clone()),
        tangent(zs.clone(), FormField::constant(&t, 1, w.as_slice())?, zf),
        tangent(zs, za, FormField::constant(&t, 0, &[1.0])?),
    ];
    Ok(crossing_compression(psi0, &basis))
}

/// Crossing matrix on the basis `(psi_0, i psi_0, i)`.
pub fn crossing_matrix_b0(psi0: &SpinorField) -> Result<DMatrix<f64>, SwError> {
    check_unit(psi0)?;
    let t = psi0.truncation();
    let za = FormField::zeros(&t, 1)?;
    let zf = FormField::zeros(&t, 0)?;
    let basis = [
        tangent(psi0.clone(), za.clone(), zf.clone()),
        tangent(psi0.scale(I), za.clone(), zf),
        tangent(SpinorField::zeros(&t), za, FormField::constant(&t, 0, &[1.0])?),
    ];
    Ok(crossing_compression(psi0, &basis))
}

/// Numerical kernel dimension of a symmetric operator.
pub fn kernel_dim(op: &TruncatedOperator, tol: f64) -> usize {
    linalg::eigvalsh(&op.matrix).iter().filter(|x| x.abs() < tol).count()
}

/// The constant unit spinor `(1, 0)`.
pub fn unit_spinor(trunc: &TorusTruncation) -> SpinorField {
    SpinorField::constant(trunc, Spinor::new(C64::from(1.0), C64::from(0.0)))
}
