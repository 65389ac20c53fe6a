//! Small dense complex matrices (dimension 1, 2 or 4).
//!
//! Everything here is sized for the coin spaces of the walks: Pauli
//! matrices, the four-dimensional Dirac representation, exponentials of
//! small generators, determinants and the eigenvalues of unitaries.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{QwError, Result};

pub const MAX_DIM: usize = 4;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Tolerance used when checking unitarity / anti-Hermiticity of inputs.
pub const STRUCTURE_TOL: f64 = 1e-12;

/// Iteration cap for the shifted QR eigenvalue solver, per eigenvalue.
pub const QR_MAX_ITER: usize = 200;

/// A `d x d` complex matrix, `d <= 4`, stored row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct CMat {
    d: usize,
    e: [Complex64; MAX_DIM * MAX_DIM],
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat({}x{}) [", self.d, self.d)?;
        for r in 0..self.d {
            write!(f, "  ")?;
            for c in 0..self.d {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.d && c < self.d);
        &self.e[r * self.d + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.d && c < self.d);
        &mut self.e[r * self.d + c]
    }
}

impl CMat {
    /// Zero matrix. Panics if `d` is 0 or larger than [`MAX_DIM`].
    pub fn zeros(d: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&d), "matrix dimension {d} unsupported");
        CMat {
            d,
            e: [ZERO; MAX_DIM * MAX_DIM],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d);
        for i in 0..d {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn scalar(d: usize, z: Complex64) -> Self {
        Self::identity(d).scale(z)
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a
    /// perfect square of a supported dimension.
    pub fn from_row_major(entries: &[Complex64]) -> Result<Self> {
        let d = match entries.len() {
            1 => 1,
            4 => 2,
            9 => 3,
            16 => 4,
            len => {
                return Err(QwError::ShapeMismatch(format!(
                    "{len} entries do not form a supported square matrix"
                )))
            }
        };
        let mut m = Self::zeros(d);
        m.e[..d * d].copy_from_slice(entries);
        if m.entries().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QwError::Invalid("matrix entries must be finite".into()));
        }
        Ok(m)
    }

    pub fn from_rows<const D: usize>(rows: [[Complex64; D]; D]) -> Self {
        let mut m = Self::zeros(D);
        for (r, row) in rows.iter().enumerate() {
            for (c, z) in row.iter().enumerate() {
                m[(r, c)] = *z;
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Row-major entries.
    #[inline]
    pub fn entries(&self) -> &[Complex64] {
        &self.e[..self.d * self.d]
    }

    pub fn scale(&self, z: Complex64) -> Self {
        let mut out = *self;
        out.e[..self.d * self.d].iter_mut().for_each(|x| *x *= z);
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.d);
        for r in 0..self.d {
            for c in 0..self.d {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.d).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.d)
            .map(|c| (0..self.d).map(|r| self[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_norm() < tol
    }

    /// `max |(U U^† - Id)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        (*self * self.adjoint() - Self::identity(self.d)).max_norm()
    }

    /// `max |(A + A^†)_ij|`.
    pub fn anti_hermitian_defect(&self) -> f64 {
        (*self + self.adjoint()).max_norm()
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() <= STRUCTURE_TOL
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.d);
        for _ in 0..k {
            out = out * *self;
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.d);
        (0..self.d)
            .map(|r| (0..self.d).map(|c| self[(r, c)] * v[c]).sum())
            .collect()
    }

    /// Kronecker product; the result must still fit in [`MAX_DIM`].
    pub fn kron(&self, other: &CMat) -> Result<Self> {
        let d = self.d * other.d;
        if d > MAX_DIM {
            return Err(QwError::UnsupportedDim(d));
        }
        let mut out = Self::zeros(d);
        for r1 in 0..self.d {
            for c1 in 0..self.d {
                for r2 in 0..other.d {
                    for c2 in 0..other.d {
                        out[(r1 * other.d + r2, c1 * other.d + c2)] =
                            self[(r1, c1)] * other[(r2, c2)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> Complex64 {
        let d = self.d;
        let mut a = *self;
        let mut det = ONE;
        for col in 0..d {
            let pivot = (col..d)
                .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
                .unwrap();
            if a[(pivot, col)] == ZERO {
                return ZERO;
            }
            if pivot != col {
                for c in 0..d {
                    let tmp = a[(col, c)];
                    a[(col, c)] = a[(pivot, c)];
                    a[(pivot, c)] = tmp;
                }
                det = -det;
            }
            let p = a[(col, col)];
            det *= p;
            for r in col + 1..d {
                let f = a[(r, col)] / p;
                for c in col..d {
                    let sub = f * a[(col, c)];
                    a[(r, c)] -= sub;
                }
            }
        }
        det
    }
}

impl Add for CMat {
    type Output = CMat;
    fn add(self, rhs: CMat) -> CMat {
        assert_eq!(self.d, rhs.d, "dimension mismatch in CMat add");
        let mut out = self;
        for (x, y) in out.e.iter_mut().zip(rhs.e.iter()) {
            *x += *y;
        }
        out
    }
}

impl Sub for CMat {
    type Output = CMat;
    fn sub(self, rhs: CMat) -> CMat {
        assert_eq!(self.d, rhs.d, "dimension mismatch in CMat sub");
        let mut out = self;
        for (x, y) in out.e.iter_mut().zip(rhs.e.iter()) {
            *x -= *y;
        }
        out
    }
}

impl Neg for CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        self.scale(-ONE)
    }
}

impl Mul for CMat {
    type Output = CMat;
    #[inline]
    fn mul(self, rhs: CMat) -> CMat {
        assert_eq!(self.d, rhs.d, "dimension mismatch in CMat mul");
        let d = self.d;
        let mut out = CMat::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.e[r * d + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..d {
                    out.e[r * d + c] += a * rhs.e[k * d + c];
                }
            }
        }
        out
    }
}

/// Pauli matrix `sigma^i`; index 0 is the 2x2 identity.
pub fn pauli(i: usize) -> Result<CMat> {
    let m = match i {
        0 => CMat::from_rows([[ONE, ZERO], [ZERO, ONE]]),
        1 => CMat::from_rows([[ZERO, ONE], [ONE, ZERO]]),
        2 => CMat::from_rows([[ZERO, -I], [I, ZERO]]),
        3 => CMat::from_rows([[ONE, ZERO], [ZERO, -ONE]]),
        _ => return Err(QwError::PauliIndex(i)),
    };
    Ok(m)
}

/// The four-dimensional Dirac matrices `alpha^i = sigma^3 (x) sigma^i`
/// and `beta = sigma^2 (x) sigma^0`.
#[derive(Debug, Clone, Copy)]
pub struct DiracRep {
    pub alpha: [CMat; 3],
    pub beta: CMat,
}

pub fn dirac_rep() -> DiracRep {
    let s = |i| pauli(i).expect("valid Pauli index");
    let alpha = [1, 2, 3].map(|i| s(3).kron(&s(i)).expect("4x4 fits"));
    let beta = s(2).kron(&s(0)).expect("4x4 fits");
    DiracRep { alpha, beta }
}

/// Exponential of an anti-Hermitian matrix; the result is unitary.
pub fn mat_exp(a: &CMat) -> Result<CMat> {
    let defect = a.anti_hermitian_defect();
    if defect > STRUCTURE_TOL {
        return Err(QwError::NotAntiHermitian(defect));
    }
    Ok(mat_exp_unchecked(a))
}

/// Exponential of an arbitrary small matrix by scaling and squaring a
/// truncated Taylor series.
///
/// The series is cut once a term drops below `1e-18` relative to the
/// partial sum. Used directly for the real-exponent factors
/// `exp(-eps * alpha * A)` of the determinant scaling check, which are not
/// unitary.
pub fn mat_exp_unchecked(a: &CMat) -> CMat {
    let d = a.dim();
    let norm = a.one_norm();
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = a.scale(Complex64::new(0.5f64.powi(squarings as i32), 0.0));

    let mut sum = CMat::identity(d);
    let mut term = CMat::identity(d);
    for k in 1..=64u32 {
        term = (term * scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = sum + term;
        if term.max_norm() <= 1e-18 * sum.max_norm() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Eigenvalues of a unitary matrix, sorted by principal argument.
pub fn eigenphases(u: &CMat) -> Result<Vec<Complex64>> {
    let defect = u.unitarity_defect();
    if defect > 1e-10 {
        return Err(QwError::NotUnitary(defect));
    }
    let mut ev = eigenvalues(u)?;
    ev.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    Ok(ev)
}

/// Eigenvalues of a general small complex matrix by shifted QR iteration
/// on the upper Hessenberg form.
pub fn eigenvalues(a: &CMat) -> Result<Vec<Complex64>> {
    let d = a.dim();
    let mut h = hessenberg(a);
    let mut out = Vec::with_capacity(d);
    let mut hi = d;
    let scale = a.max_norm().max(f64::MIN_POSITIVE);

    while hi > 0 {
        if hi == 1 {
            out.push(h[(0, 0)]);
            break;
        }
        let mut iter = 0;
        loop {
            // Look for a negligible subdiagonal entry in the active block.
            let mut split = None;
            for k in (1..hi).rev() {
                let sub = h[(k, k - 1)].norm();
                let diag = h[(k, k)].norm() + h[(k - 1, k - 1)].norm();
                if sub <= f64::EPSILON * diag.max(scale * 1e-3) {
                    h[(k, k - 1)] = ZERO;
                    split = Some(k);
                    break;
                }
            }
            if split == Some(hi - 1) {
                out.push(h[(hi - 1, hi - 1)]);
                hi -= 1;
                break;
            }
            if iter >= QR_MAX_ITER {
                return Err(QwError::NoConvergence(QR_MAX_ITER));
            }
            let lo = split.unwrap_or(0);
            let shift = if iter > 0 && iter % 11 == 0 {
                // exceptional shift to break cycles
                h[(hi - 1, hi - 1)] + Complex64::new(0.75 * h[(hi - 1, hi - 2)].norm(), 0.0)
            } else {
                wilkinson_shift(&h, hi)
            };
            qr_step(&mut h, lo, hi, shift);
            iter += 1;
        }
    }
    out.reverse();
    Ok(out)
}

fn wilkinson_shift(h: &CMat, hi: usize) -> Complex64 {
    let a = h[(hi - 2, hi - 2)];
    let b = h[(hi - 2, hi - 1)];
    let c = h[(hi - 1, hi - 2)];
    let d = h[(hi - 1, hi - 1)];
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr * 0.25 - det).sqrt();
    let l1 = tr * 0.5 + disc;
    let l2 = tr * 0.5 - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicitly shifted QR step on rows/cols `lo..hi` using Givens
/// rotations; the full matrix is updated so that it stays similar to the
/// input.
fn qr_step(h: &mut CMat, lo: usize, hi: usize, shift: Complex64) {
    let d = h.dim();
    for i in lo..hi {
        h[(i, i)] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi - 1 {
        let x = h[(k, k)];
        let y = h[(k + 1, k)];
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (ONE, ZERO)
        } else {
            (x / r, y / r)
        };
        // G = [[c*, s*], [-s, c]] applied from the left on rows k, k+1
        for col in 0..d {
            let a = h[(k, col)];
            let b = h[(k + 1, col)];
            h[(k, col)] = c.conj() * a + s.conj() * b;
            h[(k + 1, col)] = -s * a + c * b;
        }
        rots.push((k, c, s));
    }
    for (k, c, s) in rots {
        // right-multiply by G^dagger on columns k, k+1
        for row in 0..d {
            let a = h[(row, k)];
            let b = h[(row, k + 1)];
            h[(row, k)] = a * c + b * s;
            h[(row, k + 1)] = -a * s.conj() + b * c.conj();
        }
    }
    for i in lo..hi {
        h[(i, i)] += shift;
    }
}

/// Householder reduction to upper Hessenberg form.
fn hessenberg(a: &CMat) -> CMat {
    let d = a.dim();
    let mut h = *a;
    for k in 0..d.saturating_sub(2) {
        let mut v = [ZERO; MAX_DIM];
        let alpha_norm = (k + 1..d).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        for i in k + 1..d {
            v[i] = h[(i, k)];
        }
        v[k + 1] += phase * alpha_norm;
        let vnorm2: f64 = (k + 1..d).map(|i| v[i].norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H <- (I - 2vv*/|v|^2) H (I - 2vv*/|v|^2)
        for col in 0..d {
            let dot: Complex64 = (k + 1..d).map(|i| v[i].conj() * h[(i, col)]).sum();
            let f = dot * (2.0 / vnorm2);
            for i in k + 1..d {
                h[(i, col)] -= v[i] * f;
            }
        }
        for row in 0..d {
            let dot: Complex64 = (k + 1..d).map(|i| h[(row, i)] * v[i]).sum();
            let f = dot * (2.0 / vnorm2);
            for i in k + 1..d {
                h[(row, i)] -= f * v[i].conj();
            }
        }
        for i in k + 2..d {
            h[(i, k)] = ZERO;
        }
    }
    h
}
