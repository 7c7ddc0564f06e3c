//! Euclidean Clifford algebra of R^3 acting on C^2.
//!
//! Clifford multiplication by the basis vector `e_j` is `-i sigma_j`, with the
//! Pauli matrices `sigma_j`. Under this choice the complex volume element
//! `-e_1 e_2 e_3` acts as the identity. The Hermitian product on spinors is
//! linear in the first slot: `<phi, psi> = sum_i phi_i conj(psi_i)`.
//!
//! Imaginary-valued covectors `i alpha_j e^j` are stored by their real
//! coefficients `alpha`. Differential forms of any degree are stored by their
//! complex coefficients on increasing multi-indices.

use nalgebra::{Matrix2, Vector2, Vector3};
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;
pub type Spinor = Vector2<C64>;
pub type Endo = Matrix2<C64>;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormError {
    #[error("form degree {0} is outside 0..=3")]
    InvalidDegree(usize),
    #[error("expected {expected} coefficients for degree {degree}, found {found}")]
    CoefficientCount { degree: usize, expected: usize, found: usize },
}

/// An imaginary-valued covector `i alpha_j e^j`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ImCovector {
    pub alpha: Vector3<f64>,
}

impl ImCovector {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Self {
        Self { alpha: Vector3::new(a1, a2, a3) }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Real scalar product `<i alpha, i beta> = alpha . beta`.
    pub fn dot(&self, other: &ImCovector) -> f64 {
        self.alpha.dot(&other.alpha)
    }

    pub fn norm(&self) -> f64 {
        self.alpha.norm()
    }

    /// The covector as a degree-one form with imaginary coefficients.
    pub fn to_form(&self) -> Form {
        Form {
            degree: 1,
            coeffs: self.alpha.iter().map(|&a| C64::new(0.0, a)).collect(),
        }
    }
}

/// Pauli matrices `sigma_1, sigma_2, sigma_3`.
pub fn pauli() -> [Endo; 3] {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    [
        Matrix2::new(z, o, o, z),
        Matrix2::new(z, -I, I, z),
        Matrix2::new(o, z, z, -o),
    ]
}

/// Hermitian product, complex linear in the first argument.
pub fn inner(phi: &Spinor, psi: &Spinor) -> C64 {
    phi[0] * psi[0].conj() + phi[1] * psi[1].conj()
}

pub fn norm_sqr(psi: &Spinor) -> f64 {
    psi[0].norm_sqr() + psi[1].norm_sqr()
}

/// Matrix of Clifford multiplication by a real vector, `-i v.sigma`.
pub fn clifford_matrix(v: &Vector3<f64>) -> Endo {
    let s = pauli();
    (s[0] * C64::from(v[0]) + s[1] * C64::from(v[1]) + s[2] * C64::from(v[2])) * (-I)
}

pub fn clifford_mul(v: &Vector3<f64>, psi: &Spinor) -> Spinor {
    clifford_matrix(v) * psi
}

/// Matrix of Clifford multiplication by an imaginary covector, `c(i alpha) = alpha.sigma`.
pub fn clifford_im_matrix(a: &ImCovector) -> Endo {
    clifford_matrix(&a.alpha) * I
}

pub fn clifford_im(a: &ImCovector, psi: &Spinor) -> Spinor {
    clifford_im_matrix(a) * psi
}

/// The quadratic map `q(psi) = -1/2 <c(e_j) psi, psi> e^j`.
pub fn q_map(psi: &Spinor) -> ImCovector {
    let mut alpha = Vector3::zeros();
    for j in 0..3 {
        let v = clifford_mul(&Vector3::ith(j, 1.0), psi);
        let val = inner(&v, psi) * (-0.5);
        alpha[j] = val.im;
    }
    ImCovector { alpha }
}

/// The symmetric real-bilinear form polarising `q`.
pub fn q_bilin(psi: &Spinor, phi: &Spinor) -> ImCovector {
    let mut alpha = Vector3::zeros();
    for j in 0..3 {
        let v = clifford_mul(&Vector3::ith(j, 1.0), psi);
        let val = inner(&v, phi) * (-0.5);
        alpha[j] = val.im;
    }
    ImCovector { alpha }
}

/// `psi* (x) psi - 1/2 |psi|^2 id`, the endomorphism `phi -> <phi, psi> psi - 1/2 |psi|^2 phi`.
pub fn q_endo(psi: &Spinor) -> Endo {
    let outer = psi * psi.adjoint();
    outer - Endo::identity() * C64::from(0.5 * norm_sqr(psi))
}

/// Complex volume element `-e_1 e_2 e_3` in the spin representation.
pub fn complex_volume() -> Endo {
    let e = |j| clifford_matrix(&Vector3::ith(j, 1.0));
    -(e(0) * e(1) * e(2))
}

/// A differential form on R^3 with complex coefficients on increasing multi-indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Form {
    pub degree: usize,
    pub coeffs: Vec<C64>,
}

const BINOM3: [usize; 4] = [1, 3, 3, 1];

/// Increasing multi-indices of the given degree in lexicographic order.
pub fn multi_indices(degree: usize) -> Vec<Vec<usize>> {
    match degree {
        0 => vec![vec![]],
        1 => vec![vec![0], vec![1], vec![2]],
        2 => vec![vec![0, 1], vec![0, 2], vec![1, 2]],
        3 => vec![vec![0, 1, 2]],
        _ => Vec::new(),
    }
}

fn index_of(multi: &[usize]) -> usize {
    multi_indices(multi.len())
        .iter()
        .position(|m| m.as_slice() == multi)
        .expect("increasing multi-index")
}

/// Sign of the permutation sorting `v`, or zero when entries repeat.
fn sort_sign(v: &mut [usize]) -> i32 {
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return 0;
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return 0;
    }
    sign
}

impl Form {
    pub fn new(degree: usize, coeffs: Vec<C64>) -> Result<Self, FormError> {
        if degree > 3 {
            return Err(FormError::InvalidDegree(degree));
        }
        if coeffs.len() != BINOM3[degree] {
            return Err(FormError::CoefficientCount {
                degree,
                expected: BINOM3[degree],
                found: coeffs.len(),
            });
        }
        Ok(Self { degree, coeffs })
    }

    pub fn real(degree: usize, coeffs: &[f64]) -> Result<Self, FormError> {
        Self::new(degree, coeffs.iter().map(|&x| C64::from(x)).collect())
    }

    pub fn zero(degree: usize) -> Result<Self, FormError> {
        if degree > 3 {
            return Err(FormError::InvalidDegree(degree));
        }
        Ok(Self { degree, coeffs: vec![C64::new(0.0, 0.0); BINOM3[degree]] })
    }

    /// The volume form `e^1 ^ e^2 ^ e^3`.
    pub fn volume() -> Self {
        Self { degree: 3, coeffs: vec![C64::from(1.0)] }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { degree: self.degree, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn sub(&self, other: &Form) -> Self {
        assert_eq!(self.degree, other.degree);
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Complex-bilinear wedge product.
    pub fn wedge(&self, other: &Form) -> Result<Form, FormError> {
        let deg = self.degree + other.degree;
        let mut out = Form::zero(deg)?;
        for (i, mi) in multi_indices(self.degree).iter().enumerate() {
            for (j, mj) in multi_indices(other.degree).iter().enumerate() {
                let mut joined: Vec<usize> = mi.iter().chain(mj.iter()).copied().collect();
                let sign = sort_sign(&mut joined);
                if sign != 0 {
                    out.coeffs[index_of(&joined)] +=
                        self.coeffs[i] * other.coeffs[j] * f64::from(sign);
                }
            }
        }
        Ok(out)
    }

    /// Pointwise scalar product `sum_I a_I conj(b_I)` of the coefficient vectors.
    pub fn hermitian_dot(&self, other: &Form) -> C64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum()
    }
}

/// Hodge star for the Euclidean metric and the orientation `e^1 ^ e^2 ^ e^3`.
///
/// The sign of each basis image is read off from `e^I ^ *e^I = dv`.
pub fn hodge_star(w: &Form) -> Result<Form, FormError> {
    if w.degree > 3 {
        return Err(FormError::InvalidDegree(w.degree));
    }
    let target = 3 - w.degree;
    let mut out = Form::zero(target)?;
    for (i, mi) in multi_indices(w.degree).iter().enumerate() {
        let comp: Vec<usize> = (0..3).filter(|k| !mi.contains(k)).collect();
        let mut joined: Vec<usize> = mi.iter().chain(comp.iter()).copied().collect();
        let sign = sort_sign(&mut joined);
        out.coeffs[index_of(&comp)] += w.coeffs[i] * f64::from(sign);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn clifford_e3_on_up_spinor() {
        let psi = Spinor::new(c(1.0, 0.0), c(0.0, 0.0));
        let out = clifford_mul(&Vector3::new(0.0, 0.0, 1.0), &psi);
        assert_eq!(out, Spinor::new(c(0.0, -1.0), c(0.0, 0.0)));
    }

    #[test]
    fn clifford_im_e3_on_up_spinor() {
        let psi = Spinor::new(c(1.0, 0.0), c(0.0, 0.0));
        let out = clifford_im(&ImCovector::new(0.0, 0.0, 1.0), &psi);
        assert_eq!(out, psi);
    }

    #[test]
    fn q_of_up_spinor() {
        let psi = Spinor::new(c(1.0, 0.0), c(0.0, 0.0));
        assert_eq!(q_map(&psi).alpha, Vector3::new(0.0, 0.0, 0.5));
        let endo = q_endo(&psi);
        assert_eq!(endo, Endo::new(c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)));
    }

    #[test]
    fn volume_element_is_identity() {
        assert!((complex_volume() - Endo::identity()).norm() < 1e-15);
    }

    #[test]
    fn star_of_e1() {
        let e1 = Form::real(1, &[1.0, 0.0, 0.0]).unwrap();
        let s = hodge_star(&e1).unwrap();
        assert_eq!(s, Form::real(2, &[0.0, 0.0, 1.0]).unwrap());
        assert_eq!(hodge_star(&Form::volume()).unwrap(), Form::real(0, &[1.0]).unwrap());
    }

    #[test]
    fn invalid_degree() {
        assert_eq!(Form::zero(4), Err(FormError::InvalidDegree(4)));
        let bad = Form { degree: 5, coeffs: vec![] };
        assert!(hodge_star(&bad).is_err());
    }
}
