//! Translation-invariant lattice operators as finite Laurent polynomials in
//! the translations, with matrix coefficients.
//!
//! A term `M_o` at offset `o` acts as `(S psi)(x) = sum_o M_o psi(x - eps o)`,
//! so `translation(axis, +1)` moves a point mass one site forward.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{QwError, Result};
use crate::lattice::{eps_match, Field};
use crate::tensoralg::CMat;

/// Coefficients with max-norm below this are dropped.
pub const PRUNE_TOL: f64 = 1e-15;

/// Integer lattice offset; components beyond the stencil's dimension are 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Offset(pub [i32; 3]);

impl Offset {
    pub const ORIGIN: Offset = Offset([0; 3]);

    pub fn axis(axis: usize, power: i32) -> Self {
        let mut o = [0; 3];
        o[axis] = power;
        Offset(o)
    }

    pub fn neg(self) -> Self {
        Offset(self.0.map(|x| -x))
    }

    pub fn add(self, other: Offset) -> Self {
        Offset([
            self.0[0] + other.0[0],
            self.0[1] + other.0[1],
            self.0[2] + other.0[2],
        ])
    }

    pub fn radius(&self) -> i32 {
        self.0.iter().map(|x| x.abs()).max().unwrap_or(0)
    }
}

/// A translation-invariant operator on `d`-component fields over an
/// `n`-dimensional lattice with spacing `eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilOp {
    n: usize,
    d: usize,
    eps: f64,
    terms: BTreeMap<Offset, CMat>,
}

impl StencilOp {
    pub fn zero(n: usize, d: usize, eps: f64) -> Self {
        assert!((1..=3).contains(&n), "lattice dimension {n} unsupported");
        StencilOp {
            n,
            d,
            eps,
            terms: BTreeMap::new(),
        }
    }

    /// Constant stencil: `m` at the origin only.
    pub fn constant(n: usize, eps: f64, m: CMat) -> Self {
        let mut s = Self::zero(n, m.dim(), eps);
        s.insert(Offset::ORIGIN, m);
        s
    }

    pub fn identity(n: usize, d: usize, eps: f64) -> Self {
        Self::constant(n, eps, CMat::identity(d))
    }

    /// Scalar (`d = 1`) constant.
    pub fn scalar(n: usize, eps: f64, z: Complex64) -> Self {
        Self::constant(n, eps, CMat::scalar(1, z))
    }

    /// The scalar translation `tau_axis^power`.
    pub fn translation(n: usize, eps: f64, axis: usize, power: i32) -> Result<Self> {
        if axis >= n {
            return Err(QwError::AxisOutOfRange { axis, n });
        }
        let mut s = Self::zero(n, 1, eps);
        s.insert(Offset::axis(axis, power), CMat::identity(1));
        Ok(s)
    }

    /// Builds a stencil from explicit terms; repeated offsets accumulate.
    pub fn from_terms<I>(n: usize, d: usize, eps: f64, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Offset, CMat)>,
    {
        let mut s = Self::zero(n, d, eps);
        for (o, m) in terms {
            if m.dim() != d {
                return Err(QwError::ShapeMismatch(format!(
                    "coefficient of dimension {} in a d={d} stencil",
                    m.dim()
                )));
            }
            if o.0[n..].iter().any(|&x| x != 0) {
                return Err(QwError::ShapeMismatch(format!(
                    "offset {:?} has components beyond n={n}",
                    o.0
                )));
            }
            s.accumulate(o, m);
        }
        s.prune();
        Ok(s)
    }

    #[inline]
    pub fn ndim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic offset order.
    pub fn terms(&self) -> impl Iterator<Item = (&Offset, &CMat)> {
        self.terms.iter()
    }

    pub fn offsets(&self) -> impl Iterator<Item = &Offset> {
        self.terms.keys()
    }

    pub fn coefficient(&self, o: &Offset) -> CMat {
        self.terms.get(o).copied().unwrap_or_else(|| CMat::zeros(self.d))
    }

    /// Largest offset component in absolute value.
    pub fn radius(&self) -> i32 {
        self.terms.keys().map(Offset::radius).max().unwrap_or(0)
    }

    fn insert(&mut self, o: Offset, m: CMat) {
        if !m.is_zero(PRUNE_TOL) {
            self.terms.insert(o, m);
        }
    }

    fn accumulate(&mut self, o: Offset, m: CMat) {
        match self.terms.get_mut(&o) {
            Some(existing) => *existing = *existing + m,
            None => {
                self.terms.insert(o, m);
            }
        }
    }

    fn prune(&mut self) {
        self.terms.retain(|_, m| !m.is_zero(PRUNE_TOL));
    }

    fn check_compatible(&self, other: &StencilOp) -> Result<()> {
        if self.n != other.n || self.d != other.d || !eps_match(self.eps, other.eps) {
            return Err(QwError::ShapeMismatch(format!(
                "stencils (n={}, d={}, eps={}) and (n={}, d={}, eps={})",
                self.n, self.d, self.eps, other.n, other.d, other.eps
            )));
        }
        Ok(())
    }

    /// Lifts a scalar stencil to `d` components: every coefficient `c`
    /// becomes `c * m`.
    pub fn tensor(&self, m: &CMat) -> Result<StencilOp> {
        if self.d != 1 {
            return Err(QwError::ShapeMismatch("tensor expects a scalar stencil".into()));
        }
        let terms = self.terms.iter().map(|(o, c)| (*o, m.scale(c[(0, 0)])));
        Self::from_terms(self.n, m.dim(), self.eps, terms)
    }

    pub fn scale(&self, z: Complex64) -> StencilOp {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|m| *m = m.scale(z));
        out.prune();
        out
    }

    pub fn add(&self, other: &StencilOp) -> Result<StencilOp> {
        Self::combine(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)], &[self, other])
    }

    pub fn sub(&self, other: &StencilOp) -> Result<StencilOp> {
        Self::combine(&[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)], &[self, other])
    }

    /// Linear combination `sum_i coeffs[i] * ops[i]`.
    pub fn combine(coeffs: &[Complex64], ops: &[&StencilOp]) -> Result<StencilOp> {
        if coeffs.len() != ops.len() || ops.is_empty() {
            return Err(QwError::ShapeMismatch(format!(
                "{} coefficients for {} stencils",
                coeffs.len(),
                ops.len()
            )));
        }
        let first = ops[0];
        let mut out = Self::zero(first.n, first.d, first.eps);
        for (z, op) in coeffs.iter().zip(ops) {
            first.check_compatible(op)?;
            for (o, m) in &op.terms {
                out.accumulate(*o, m.scale(*z));
            }
        }
        out.prune();
        Ok(out)
    }

    /// Operator product `self * other` (apply `other` first).
    pub fn compose(&self, other: &StencilOp) -> Result<StencilOp> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.n, self.d, self.eps);
        for (o1, m1) in &self.terms {
            for (o2, m2) in &other.terms {
                out.accumulate(o1.add(*o2), *m1 * *m2);
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> StencilOp {
        let mut out = Self::identity(self.n, self.d, self.eps);
        for _ in 0..k {
            out = out.compose(self).expect("same shape");
        }
        out
    }

    /// Hilbert-space adjoint: the term at `o` is `M_{-o}^dagger`.
    pub fn adjoint(&self) -> StencilOp {
        let mut out = Self::zero(self.n, self.d, self.eps);
        for (o, m) in &self.terms {
            out.terms.insert(o.neg(), m.adjoint());
        }
        out
    }

    /// Scalar stencil of coefficient traces.
    pub fn trace_stencil(&self) -> StencilOp {
        let mut out = Self::zero(self.n, 1, self.eps);
        for (o, m) in &self.terms {
            out.insert(*o, CMat::scalar(1, m.trace()));
        }
        out
    }

    /// Momentum-space matrix `sum_o M_o exp(-i eps k.o)`.
    pub fn symbol(&self, k: &[f64]) -> CMat {
        assert_eq!(k.len(), self.n, "momentum dimension mismatch");
        let mut acc = CMat::zeros(self.d);
        for (o, m) in &self.terms {
            let phase: f64 = (0..self.n).map(|a| k[a] * o.0[a] as f64).sum::<f64>() * self.eps;
            acc = acc + m.scale(Complex64::from_polar(1.0, -phase));
        }
        acc
    }

    /// Scalar value of the symbol of a `d = 1` stencil.
    pub fn scalar_symbol(&self, k: &[f64]) -> Complex64 {
        assert_eq!(self.d, 1, "scalar_symbol on a matrix stencil");
        self.symbol(k)[(0, 0)]
    }

    /// Largest coefficient difference over the union of offsets.
    pub fn distance(&self, other: &StencilOp) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self.sub(other)?.terms.values().map(CMat::max_norm).fold(0.0, f64::max))
    }

    /// Applies the stencil to a field with periodic wrapping.
    ///
    /// A scalar stencil applied to a `d`-component field acts on each
    /// component. Terms are summed in lexicographic offset order at every
    /// site, so the result does not depend on the thread count.
    pub fn apply(&self, f: &Field) -> Result<Field> {
        let grid = f.grid();
        let broadcast = self.d == 1 && f.components() > 1;
        if grid.ndim() != self.n
            || !(self.d == f.components() || broadcast)
            || !eps_match(grid.eps(), self.eps)
        {
            return Err(QwError::ShapeMismatch(format!(
                "stencil (n={}, d={}, eps={}) on field (n={}, d={}, eps={})",
                self.n,
                self.d,
                self.eps,
                grid.ndim(),
                f.components(),
                grid.eps()
            )));
        }
        let d = f.components();
        let shifts: Vec<([i64; 3], &CMat)> = self
            .terms
            .iter()
            .map(|(o, m)| (o.0.map(|x| -(x as i64)), m))
            .collect();
        let mut out = Field::zeros(grid, d);
        out.data_mut()
            .par_chunks_mut(d)
            .enumerate()
            .for_each(|(site, dst)| {
                let coords = grid.coords(site);
                for (shift, m) in &shifts {
                    let src = f.site(grid.shifted_site(&coords, shift));
                    if broadcast {
                        let z = m[(0, 0)];
                        for (o, s) in dst.iter_mut().zip(src) {
                            *o += z * s;
                        }
                    } else {
                        for (r, o) in dst.iter_mut().enumerate() {
                            for (c, s) in src.iter().enumerate() {
                                *o += m[(r, c)] * s;
                            }
                        }
                    }
                }
            });
        Ok(out)
    }

    /// Text dump, one line per term: `o1 .. on | re im re im ...`
    /// (row-major coefficient entries), offsets in lexicographic order.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (o, m) in &self.terms {
            let offs: Vec<String> = o.0[..self.n].iter().map(|x| x.to_string()).collect();
            let _ = write!(s, "{} |", offs.join(" "));
            for z in m.entries() {
                let _ = write!(s, " {:e} {:e}", z.re, z.im);
            }
            s.push('\n');
        }
        s
    }

    /// Parses the output of [`StencilOp::dump`].
    pub fn parse_dump(n: usize, d: usize, eps: f64, text: &str) -> Result<StencilOp> {
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| QwError::Parse(format!("line {}: {msg}", lineno + 1));
            let (lhs, rhs) = line.split_once('|').ok_or_else(|| err("missing '|'"))?;
            let offs: Vec<i32> = lhs
                .split_whitespace()
                .map(|t| t.parse::<i32>().map_err(|e| err(&e.to_string())))
                .collect::<Result<_>>()?;
            if offs.len() != n {
                return Err(err("wrong number of offset components"));
            }
            let vals: Vec<f64> = rhs
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| err(&e.to_string())))
                .collect::<Result<_>>()?;
            if vals.len() != 2 * d * d {
                return Err(err("wrong number of coefficient entries"));
            }
            let entries: Vec<Complex64> =
                vals.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
            let mut o = [0; 3];
            o[..n].copy_from_slice(&offs);
            terms.push((Offset(o), CMat::from_row_major(&entries)?));
        }
        Self::from_terms(n, d, eps, terms)
    }
}

/// The exact shift factor `exp(-eps sigma d/dx_axis)` for an involution
/// `sigma`: `(tau + tau^-1)/2 Id + (tau - tau^-1)/2 sigma`.
pub fn shift_factor(n: usize, eps: f64, sigma: &CMat, axis: usize) -> Result<StencilOp> {
    let d = sigma.dim();
    let half = Complex64::new(0.5, 0.0);
    let fwd = StencilOp::translation(n, eps, axis, 1)?;
    let back = StencilOp::translation(n, eps, axis, -1)?;
    let even = StencilOp::combine(&[half, half], &[&fwd, &back])?;
    let odd = StencilOp::combine(&[half, -half], &[&fwd, &back])?;
    even.tensor(&CMat::identity(d))?.add(&odd.tensor(sigma)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Grid;
    use crate::tensoralg::pauli;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn translation_identity_and_inverse() {
        let t0 = StencilOp::translation(2, 0.1, 0, 0).unwrap();
        assert_eq!(t0, StencilOp::identity(2, 1, 0.1));
        let t = StencilOp::translation(2, 0.1, 0, 1).unwrap();
        let ti = StencilOp::translation(2, 0.1, 0, -1).unwrap();
        assert_eq!(t.compose(&ti).unwrap(), StencilOp::identity(2, 1, 0.1));
        assert_eq!(t.adjoint(), ti);
        assert!(matches!(
            StencilOp::translation(2, 0.1, 2, 1),
            Err(QwError::AxisOutOfRange { .. })
        ));
    }

    #[test]
    fn translation_moves_delta_forward() {
        let g = Grid::new(&[8], 0.1).unwrap();
        let t = StencilOp::translation(1, 0.1, 0, 1).unwrap();
        let f = Field::delta(&g, 0, &[c(1.0, 0.0)]);
        let out = t.apply(&f).unwrap();
        assert_eq!(out, Field::delta(&g, 1, &[c(1.0, 0.0)]));
    }

    #[test]
    fn combine_cancels_and_checks_shapes() {
        let t = StencilOp::translation(1, 0.1, 0, 1).unwrap();
        let z = StencilOp::combine(&[c(1.0, 0.0), c(-1.0, 0.0)], &[&t, &t]).unwrap();
        assert!(z.is_zero());
        let other = StencilOp::translation(2, 0.1, 0, 1).unwrap();
        assert!(StencilOp::combine(&[c(1.0, 0.0), c(1.0, 0.0)], &[&t, &other]).is_err());
        assert!(StencilOp::combine(&[c(1.0, 0.0)], &[&t, &t]).is_err());
    }

    #[test]
    fn cosh_stencil() {
        let t = StencilOp::translation(1, 0.1, 0, 1).unwrap();
        let ti = StencilOp::translation(1, 0.1, 0, -1).unwrap();
        let cosh = StencilOp::combine(&[c(0.5, 0.0), c(0.5, 0.0)], &[&t, &ti]).unwrap();
        assert_eq!(cosh.num_terms(), 2);
        assert_eq!(cosh.coefficient(&Offset::axis(0, 1))[(0, 0)], c(0.5, 0.0));
        assert_eq!(cosh.coefficient(&Offset::axis(0, -1))[(0, 0)], c(0.5, 0.0));
        let k = [0.7];
        assert!((cosh.scalar_symbol(&k) - c((0.07f64).cos(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn trace_of_identity() {
        let s = StencilOp::identity(3, 4, 0.1).trace_stencil();
        assert_eq!(s, StencilOp::scalar(3, 0.1, c(4.0, 0.0)));
    }

    #[test]
    fn symbol_of_translation() {
        let t = StencilOp::translation(2, 0.2, 0, 1).unwrap();
        let k = [1.3, -0.4];
        let want = Complex64::from_polar(1.0, -1.3 * 0.2);
        assert!((t.scalar_symbol(&k) - want).norm() < 1e-15);
    }

    #[test]
    fn shift_factor_symbol_is_exponential() {
        let s1 = pauli(1).unwrap();
        let sf = shift_factor(1, 0.1, &s1, 0).unwrap();
        let kappa = 2.3;
        let want = crate::tensoralg::mat_exp(&s1.scale(c(0.0, -kappa * 0.1))).unwrap();
        assert!((sf.symbol(&[kappa]) - want).max_norm() < 1e-15);
    }

    #[test]
    fn scalar_stencil_broadcasts_over_components() {
        let g = Grid::new(&[4], 0.1).unwrap();
        let t = StencilOp::translation(1, 0.1, 0, 1).unwrap();
        let f = Field::delta(&g, 2, &[c(1.0, 0.0), c(0.0, 2.0)]);
        let out = t.apply(&f).unwrap();
        assert_eq!(out.site(3), &[c(1.0, 0.0), c(0.0, 2.0)]);
    }

    #[test]
    fn apply_rejects_mismatched_field() {
        let g = Grid::new(&[4, 4], 0.1).unwrap();
        let f = Field::zeros(&g, 2);
        let s = StencilOp::identity(1, 2, 0.1);
        assert!(s.apply(&f).is_err());
        let s = StencilOp::identity(2, 2, 0.2);
        assert!(s.apply(&f).is_err());
    }

    #[test]
    fn dump_golden() {
        let s1 = pauli(1).unwrap();
        let sf = shift_factor(1, 0.1, &s1, 0).unwrap();
        let want = "\
-1 | 5e-1 0e0 -5e-1 0e0 -5e-1 0e0 5e-1 0e0
1 | 5e-1 0e0 5e-1 0e0 5e-1 0e0 5e-1 0e0
";
        assert_eq!(sf.dump(), want);
        let back = StencilOp::parse_dump(1, 2, 0.1, want).unwrap();
        assert_eq!(back, sf);
        assert!(StencilOp::parse_dump(1, 2, 0.1, "0 1 | 1 0").is_err());
    }
}
