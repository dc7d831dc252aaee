//! U(n), its image U(2n,ℝ) ⊂ Sp(n,ℝ), torus elements and generating functions.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const UNITARY_TOL: f64 = 1e-10;
const SINGULAR_B: f64 = 1e-8;
const SINGULAR_L: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    m: DMatrix<Complex64>,
}

impl UnitaryMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidArgument("unitary matrix must be square".into()));
        }
        let r = unitarity_residual(&m);
        if !(r <= UNITARY_TOL) {
            return Err(Error::NonUnitary(r));
        }
        Ok(UnitaryMatrix { m })
    }

    /// Row-major entries.
    pub fn from_rows(n: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidArgument(format!("expected {} entries", n * n)));
        }
        UnitaryMatrix::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<Complex64>) -> Self {
        UnitaryMatrix { m }
    }

    pub fn identity(n: usize) -> Self {
        UnitaryMatrix { m: DMatrix::identity(n, n) }
    }

    pub fn scalar(n: usize, theta: f64) -> Self {
        UnitaryMatrix { m: DMatrix::identity(n, n) * Complex64::from_polar(1.0, theta) }
    }

    pub fn diagonal(thetas: &[f64]) -> Self {
        let d: Vec<Complex64> = thetas.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        UnitaryMatrix { m: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)) }
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn mul(&self, other: &UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix { m: &self.m * &other.m }
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        UnitaryMatrix { m: self.m.adjoint() }
    }

    pub fn conj(&self) -> UnitaryMatrix {
        UnitaryMatrix { m: self.m.map(|z| z.conj()) }
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    pub fn residual(&self) -> f64 {
        unitarity_residual(&self.m)
    }
}

fn unitarity_residual(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let p = m * m.adjoint() - DMatrix::<Complex64>::identity(n, n);
    p.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// [[A, −B], [B, A]] with A + iB ∈ U(n).
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticRotation {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

impl SymplecticRotation {
    pub fn from_blocks(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self> {
        let s = SymplecticRotation { a, b };
        let r = s.block_residual();
        if !(r <= UNITARY_TOL) {
            return Err(Error::NonUnitary(r));
        }
        Ok(s)
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn full(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut s = DMatrix::zeros(2 * n, 2 * n);
        s.view_mut((0, 0), (n, n)).copy_from(&self.a);
        s.view_mut((0, n), (n, n)).copy_from(&(-&self.b));
        s.view_mut((n, 0), (n, n)).copy_from(&self.b);
        s.view_mut((n, n), (n, n)).copy_from(&self.a);
        s
    }

    /// max of ‖AAᵀ + BBᵀ − I‖ and ‖ABᵀ − BAᵀ‖.
    pub fn block_residual(&self) -> f64 {
        let n = self.n();
        let r1 = &self.a * self.a.transpose() + &self.b * self.b.transpose() - DMatrix::<f64>::identity(n, n);
        let r2 = &self.a * self.b.transpose() - &self.b * self.a.transpose();
        max_abs(&r1).max(max_abs(&r2))
    }
}

/// Angles reduced to [0, 2π).
#[derive(Debug, Clone, PartialEq)]
pub struct TorusElement {
    theta: Vec<f64>,
}

impl TorusElement {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("torus angle"));
        }
        Ok(TorusElement { theta: theta.into_iter().map(crate::transforms::reduce_angle).collect() })
    }

    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn to_unitary(&self) -> UnitaryMatrix {
        UnitaryMatrix::diagonal(&self.theta)
    }
}

/// W(x, x') = ½Px·x − Lx·x' + ½Qx'·x' with Maslov index m (mod 4).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingFunction {
    pub p: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub l: DMatrix<f64>,
    pub m: u8,
}

impl GeneratingFunction {
    pub fn new(p: DMatrix<f64>, q: DMatrix<f64>, l: DMatrix<f64>, m: u8) -> Result<Self> {
        let sym = max_abs(&(&p - p.transpose())).max(max_abs(&(&q - q.transpose())));
        if sym > 1e-12 {
            return Err(Error::InvalidArgument(format!("P and Q must be symmetric (asymmetry {sym:e})")));
        }
        let det = l.determinant();
        if !(det.abs() > SINGULAR_L) {
            return Err(Error::SingularL(det.abs()));
        }
        Ok(GeneratingFunction { p, q, l, m: m % 4 })
    }

    pub fn n(&self) -> usize {
        self.l.nrows()
    }

    pub fn eval(&self, x: &[f64], xp: &[f64]) -> f64 {
        let n = self.n();
        let mut w = 0.0;
        for i in 0..n {
            for j in 0..n {
                w += 0.5 * self.p[(i, j)] * x[i] * x[j] - self.l[(i, j)] * x[j] * xp[i] + 0.5 * self.q[(i, j)] * xp[i] * xp[j];
            }
        }
        w
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// J = [[0, I], [−I, 0]].
pub fn standard_j(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

pub fn symplectic_residual(s: &DMatrix<f64>) -> f64 {
    let n = s.nrows() / 2;
    let j = standard_j(n);
    max_abs(&(s * &j * s.transpose() - j))
}

/// ι(A + iB) = [[A, −B], [B, A]].
pub fn iota(u: &UnitaryMatrix) -> Result<SymplecticRotation> {
    let r = u.residual();
    if !(r <= UNITARY_TOL) {
        return Err(Error::NonUnitary(r));
    }
    Ok(SymplecticRotation { a: u.m.map(|z| z.re), b: u.m.map(|z| z.im) })
}

pub fn torus_to_rotation(t: &TorusElement) -> SymplecticRotation {
    let a = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(t.n(), t.angles().iter().map(|x| x.cos())));
    let b = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(t.n(), t.angles().iter().map(|x| x.sin())));
    SymplecticRotation { a, b }
}

/// Phase-space matrix of the operator realized by `apply_unitary(U)`: ι(Ū) = [[A, B], [−B, A]].
/// With this convention apply_unitary(e^{iθ}) is the FrFT F_θ and apply_unitary(iI) = ℱ.
pub fn operator_matrix(u: &UnitaryMatrix) -> DMatrix<f64> {
    SymplecticRotation { a: u.m.map(|z| z.re), b: u.m.map(|z| -z.im) }.full()
}

pub fn torus_operator_matrix(t: &TorusElement) -> DMatrix<f64> {
    operator_matrix(&t.to_unitary())
}

fn blocks(s: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    if !s.is_square() || s.nrows() % 2 != 0 || s.nrows() == 0 {
        return Err(Error::InvalidArgument("symplectic matrix must be 2n×2n".into()));
    }
    let n = s.nrows() / 2;
    Ok((
        s.view((0, 0), (n, n)).into_owned(),
        s.view((0, n), (n, n)).into_owned(),
        s.view((n, 0), (n, n)).into_owned(),
        s.view((n, n), (n, n)).into_owned(),
    ))
}

/// P = DB⁻¹, L = B⁻¹, Q = B⁻¹A; m = 0 if det L > 0 else 1.
pub fn generating_function_of(s: &DMatrix<f64>) -> Result<GeneratingFunction> {
    let (a, b, _c, d) = blocks(s)?;
    let det = b.determinant();
    if !(det.abs() > SINGULAR_B) {
        return Err(Error::SingularB(det.abs()));
    }
    let binv = b.clone().try_inverse().ok_or(Error::SingularB(det.abs()))?;
    let p = &d * &binv;
    let q = &binv * &a;
    let p = (&p + p.transpose()) * 0.5;
    let q = (&q + q.transpose()) * 0.5;
    let m = if det > 0.0 { 0 } else { 1 };
    GeneratingFunction::new(p, q, binv, m)
}

/// S_W = [[L⁻¹Q, L⁻¹], [PL⁻¹Q − Lᵀ, PL⁻¹]].
pub fn free_matrix_from_w(w: &GeneratingFunction) -> Result<DMatrix<f64>> {
    let n = w.n();
    let det = w.l.determinant();
    let linv = w.l.clone().try_inverse().ok_or(Error::SingularL(det.abs()))?;
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    s.view_mut((0, 0), (n, n)).copy_from(&(&linv * &w.q));
    s.view_mut((0, n), (n, n)).copy_from(&linv);
    s.view_mut((n, 0), (n, n)).copy_from(&(&w.p * &linv * &w.q - w.l.transpose()));
    s.view_mut((n, n), (n, n)).copy_from(&(&w.p * &linv));
    Ok(s)
}

/// Smallest singular value of the upper-right block.
pub fn b_sigma_min(s: &DMatrix<f64>) -> f64 {
    let n = s.nrows() / 2;
    let b = s.view((0, n), (n, n)).into_owned();
    b.singular_values().iter().cloned().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2, TAU};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn iota_examples() {
        let id = iota(&UnitaryMatrix::identity(2)).unwrap().full();
        assert_eq!(id, DMatrix::identity(4, 4));
        let i = iota(&UnitaryMatrix::from_rows(1, &[c(0.0, 1.0)]).unwrap()).unwrap().full();
        assert_eq!(i, DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
        let th = 0.7;
        let r = iota(&UnitaryMatrix::scalar(1, th)).unwrap().full();
        let expected = DMatrix::from_row_slice(2, 2, &[th.cos(), -th.sin(), th.sin(), th.cos()]);
        assert!(max_abs(&(r - expected)) < 1e-15);
        assert!(iota(&UnitaryMatrix::from_matrix_unchecked(DMatrix::from_element(1, 1, c(2.0, 0.0)))).is_err());
    }

    #[test]
    fn torus_rotation_examples() {
        let t = TorusElement::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(torus_to_rotation(&t).full(), DMatrix::identity(4, 4));
        let t = TorusElement::new(vec![FRAC_PI_2]).unwrap();
        let r = torus_to_rotation(&t).full();
        assert!(max_abs(&(r - DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]))) < 1e-15);
        let t = TorusElement::new(vec![FRAC_PI_2, 0.0]).unwrap();
        let r = torus_to_rotation(&t);
        assert!(r.block_residual() < 1e-15);
        assert!((r.a()[(1, 1)] - 1.0).abs() < 1e-15 && (r.b()[(0, 0)] - 1.0).abs() < 1e-15);
        assert!(TorusElement::new(vec![f64::NAN]).is_err());
        assert!((TorusElement::new(vec![-1.0]).unwrap().angles()[0] - (TAU - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn generating_function_of_j() {
        let w = generating_function_of(&standard_j(2)).unwrap();
        assert_eq!(w.p, DMatrix::zeros(2, 2));
        assert_eq!(w.q, DMatrix::zeros(2, 2));
        assert_eq!(w.l, DMatrix::identity(2, 2));
        assert_eq!(free_matrix_from_w(&w).unwrap(), standard_j(2));
    }

    #[test]
    fn torus_generating_function() {
        let t = TorusElement::new(vec![FRAC_PI_4]).unwrap();
        let w = generating_function_of(&torus_operator_matrix(&t)).unwrap();
        assert!((w.p[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((w.q[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((w.l[(0, 0)] - SQRT_2).abs() < 1e-12);
        let literal = generating_function_of(&torus_to_rotation(&t).full()).unwrap();
        assert!((literal.l[(0, 0)] + SQRT_2).abs() < 1e-12);
        assert_eq!(literal.m, 1);
    }

    #[test]
    fn singular_b() {
        assert!(matches!(generating_function_of(&DMatrix::identity(2, 2)), Err(Error::SingularB(_))));
    }

    #[test]
    fn round_trip_random_w() {
        let p = DMatrix::from_row_slice(2, 2, &[0.3, -0.7, -0.7, 1.2]);
        let q = DMatrix::from_row_slice(2, 2, &[-0.4, 0.25, 0.25, 0.9]);
        for l in [DMatrix::identity(2, 2), DMatrix::from_row_slice(2, 2, &[1.1, 0.3, -0.2, 0.8])] {
            let w = GeneratingFunction::new(p.clone(), q.clone(), l, 0).unwrap();
            let s = free_matrix_from_w(&w).unwrap();
            assert!(symplectic_residual(&s) < 1e-10);
            let back = generating_function_of(&s).unwrap();
            assert!(max_abs(&(back.p - &w.p)) < 1e-10);
            assert!(max_abs(&(back.q - &w.q)) < 1e-10);
            assert!(max_abs(&(back.l - &w.l)) < 1e-10);
        }
    }
}
