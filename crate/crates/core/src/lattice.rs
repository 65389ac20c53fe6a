//! Periodic lattice wavefunctions and the split-step walk evolution.
//!
//! Sites are stored row-major over the axes (last axis fastest) and the
//! components of one site are contiguous.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;

use crate::error::{QwError, Result};
use crate::tensoralg::{mat_exp, CMat};

/// Grid geometry shared by fields and stencils.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    sizes: Vec<usize>,
    eps: f64,
}

impl Grid {
    /// Periodic grid with the given per-axis sizes (each positive and even).
    pub fn new(sizes: &[usize], eps: f64) -> Result<Self> {
        if sizes.is_empty() || sizes.len() > 3 {
            return Err(QwError::ShapeMismatch(format!(
                "lattice dimension {} unsupported",
                sizes.len()
            )));
        }
        if let Some(&bad) = sizes.iter().find(|&&s| s == 0 || s % 2 != 0) {
            return Err(QwError::OddGrid(bad));
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(QwError::NonPositiveEps(eps));
        }
        Ok(Grid {
            sizes: sizes.to_vec(),
            eps,
        })
    }

    #[inline]
    pub fn ndim(&self) -> usize {
        self.sizes.len()
    }

    #[inline]
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    #[inline]
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn num_sites(&self) -> usize {
        self.sizes.iter().product()
    }

    /// Row-major strides, last axis fastest.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.ndim()];
        for a in (0..self.ndim().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * self.sizes[a + 1];
        }
        strides
    }

    pub fn coords(&self, mut site: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for a in (0..self.ndim()).rev() {
            out[a] = site % self.sizes[a];
            site /= self.sizes[a];
        }
        out
    }

    /// Site index of `coords + shift`, wrapped periodically.
    #[inline]
    pub fn shifted_site(&self, coords: &[usize; 3], shift: &[i64; 3]) -> usize {
        let mut idx = 0usize;
        for a in 0..self.ndim() {
            let n = self.sizes[a] as i64;
            let c = (coords[a] as i64 + shift[a]).rem_euclid(n) as usize;
            idx = idx * self.sizes[a] + c;
        }
        idx
    }

    fn same_as(&self, other: &Grid) -> bool {
        self.sizes == other.sizes && eps_match(self.eps, other.eps)
    }

    /// Momentum on `axis` for integer wave number `n`: `2 pi n / (N eps)`.
    pub fn momentum_quantum(&self, axis: usize) -> f64 {
        2.0 * PI / (self.sizes[axis] as f64 * self.eps)
    }

    /// Checks that `k` is commensurate with the grid and returns the integer
    /// wave numbers.
    pub fn wave_numbers(&self, k: &[f64]) -> Result<Vec<i64>> {
        if k.len() != self.ndim() {
            return Err(QwError::ShapeMismatch(format!(
                "momentum has {} components, lattice has {}",
                k.len(),
                self.ndim()
            )));
        }
        k.iter()
            .enumerate()
            .map(|(axis, &kj)| {
                let q = self.momentum_quantum(axis);
                let n = kj / q;
                let nearest = n.round();
                if (n - nearest).abs() > 1e-9 {
                    Err(QwError::NonCommensurate {
                        axis,
                        given: kj,
                        suggestion: nearest * q,
                    })
                } else {
                    Ok(nearest as i64)
                }
            })
            .collect()
    }
}

pub(crate) fn eps_match(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// A `d`-component complex wavefunction on a periodic lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    d: usize,
    data: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: &Grid, d: usize) -> Self {
        assert!(d >= 1, "field needs at least one component");
        Field {
            grid: grid.clone(),
            d,
            data: vec![Complex64::new(0.0, 0.0); grid.num_sites() * d],
        }
    }

    pub fn from_data(grid: &Grid, d: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.num_sites() * d {
            return Err(QwError::ShapeMismatch(format!(
                "{} amplitudes for {} sites x {} components",
                data.len(),
                grid.num_sites(),
                d
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QwError::Invalid("field amplitudes must be finite".into()));
        }
        Ok(Field {
            grid: grid.clone(),
            d,
            data,
        })
    }

    /// Same value `v` at every site.
    pub fn constant(grid: &Grid, v: &[Complex64]) -> Self {
        let mut f = Field::zeros(grid, v.len());
        f.data.chunks_mut(v.len()).for_each(|c| c.copy_from_slice(v));
        f
    }

    /// Point mass `v` at `site`.
    pub fn delta(grid: &Grid, site: usize, v: &[Complex64]) -> Self {
        let mut f = Field::zeros(grid, v.len());
        f.site_mut(site).copy_from_slice(v);
        f
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn components(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    #[inline]
    pub fn site(&self, site: usize) -> &[Complex64] {
        &self.data[site * self.d..(site + 1) * self.d]
    }

    #[inline]
    pub fn site_mut(&mut self, site: usize) -> &mut [Complex64] {
        &mut self.data[site * self.d..(site + 1) * self.d]
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `<self, other>` (antilinear in `self`).
    pub fn inner(&self, other: &Field) -> Result<Complex64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.data.iter_mut().for_each(|z| *z /= n);
        }
        self
    }

    pub fn scaled(mut self, z: Complex64) -> Self {
        self.data.iter_mut().for_each(|x| *x *= z);
        self
    }

    pub fn add_assign(&mut self, other: &Field) -> Result<()> {
        self.check_same_shape(other)?;
        self.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(a, b)| *a += b);
        Ok(())
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Field {
            grid: self.grid.clone(),
            d: self.d,
            data,
        })
    }

    /// Periodic translation by an integer number of sites along `axis`:
    /// `out(x) = self(x - shift)`.
    pub fn roll(&self, axis: usize, shift: i64) -> Result<Field> {
        if axis >= self.grid.ndim() {
            return Err(QwError::AxisOutOfRange {
                axis,
                n: self.grid.ndim(),
            });
        }
        let mut delta = [0i64; 3];
        delta[axis] = -shift;
        let mut out = Field::zeros(&self.grid, self.d);
        let d = self.d;
        for site in 0..self.grid.num_sites() {
            let src = self.grid.shifted_site(&self.grid.coords(site), &delta);
            out.data[site * d..(site + 1) * d].copy_from_slice(self.site(src));
        }
        Ok(out)
    }

    pub(crate) fn check_same_shape(&self, other: &Field) -> Result<()> {
        if !self.grid.same_as(&other.grid) || self.d != other.d {
            return Err(QwError::ShapeMismatch(format!(
                "fields on {:?}x{} and {:?}x{}",
                self.grid.sizes, self.d, other.grid.sizes, other.d
            )));
        }
        Ok(())
    }

    /// Writes the snapshot CSV `x1,...,xn,component,re,im` with integer site
    /// coordinates.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.grid.ndim();
        let header: Vec<String> = (1..=n).map(|a| format!("x{a}")).collect();
        writeln!(w, "{},component,re,im", header.join(","))?;
        for site in 0..self.grid.num_sites() {
            let coords = self.grid.coords(site);
            let xs: Vec<String> = coords[..n].iter().map(|c| c.to_string()).collect();
            for (comp, z) in self.site(site).iter().enumerate() {
                writeln!(w, "{},{},{},{}", xs.join(","), comp, z.re, z.im)?;
            }
        }
        Ok(())
    }

    /// Reads a snapshot written by [`Field::write_csv`] onto `grid`.
    pub fn read_csv<R: BufRead>(grid: &Grid, d: usize, r: R) -> Result<Field> {
        let n = grid.ndim();
        let mut f = Field::zeros(grid, d);
        let strides = grid.strides();
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| QwError::Parse(e.to_string()))?;
            if lineno == 0 || line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != n + 3 {
                return Err(QwError::Parse(format!("line {}: expected {} columns", lineno + 1, n + 3)));
            }
            let num = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| QwError::Parse(format!("line {}: {e}", lineno + 1)))
            };
            let mut site = 0;
            for a in 0..n {
                let c = num(cols[a])? as usize;
                if c >= grid.sizes()[a] {
                    return Err(QwError::Parse(format!("line {}: coordinate out of range", lineno + 1)));
                }
                site += c * strides[a];
            }
            let comp = num(cols[n])? as usize;
            if comp >= d {
                return Err(QwError::Parse(format!("line {}: component out of range", lineno + 1)));
            }
            f.data[site * d + comp] = Complex64::new(num(cols[n + 1])?, num(cols[n + 2])?);
        }
        Ok(f)
    }
}

/// SplitMix64 stream with the helpers the experiments need.
#[derive(Debug, Clone)]
pub struct SeededRng(SplitMix64);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform momentum in the Brillouin zone `[-pi/eps, pi/eps)^n`.
    pub fn brillouin(&mut self, n: usize, eps: f64) -> Vec<f64> {
        (0..n).map(|_| self.uniform(-PI / eps, PI / eps)).collect()
    }
}

/// Unit-norm field with real and imaginary parts uniform in `[-1, 1)`.
pub fn random_field(seed: u64, grid: &Grid, d: usize) -> Field {
    let mut rng = SeededRng::new(seed);
    let data = (0..grid.num_sites() * d)
        .map(|_| {
            let re = rng.uniform(-1.0, 1.0);
            let im = rng.uniform(-1.0, 1.0);
            Complex64::new(re, im)
        })
        .collect();
    Field {
        grid: grid.clone(),
        d,
        data,
    }
    .normalized()
}

/// Unit-norm plane wave `v exp(i k.x)`; `k` must be commensurate with the
/// grid.
pub fn plane_wave(k: &[f64], v: &[Complex64], grid: &Grid) -> Result<Field> {
    let wave = grid.wave_numbers(k)?;
    let d = v.len();
    let mut f = Field::zeros(grid, d);
    for site in 0..grid.num_sites() {
        let coords = grid.coords(site);
        // phase from integer arithmetic so that commensurate waves are exact
        // up to one rounding of the angle
        let phase: f64 = (0..grid.ndim())
            .map(|a| {
                let n = grid.sizes()[a] as i64;
                let m = (wave[a] * coords[a] as i64).rem_euclid(n);
                2.0 * PI * m as f64 / n as f64
            })
            .sum();
        let e = Complex64::from_polar(1.0, phase);
        for (c, vc) in f.site_mut(site).iter_mut().zip(v) {
            *c = vc * e;
        }
    }
    Ok(f.normalized())
}

/// One factor of a walk operator.
#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    /// Pointwise unitary `exp(-i * angle * generator)`.
    Coin { generator: CMat, angle: f64 },
    /// `exp(-eps * sigma * d/dx_axis)` for an involution `sigma`: the +1
    /// eigencomponent moves one site forward along `axis`, the -1
    /// eigencomponent one site back.
    Shift { involution: CMat, axis: usize },
}

/// A walk written as an ordered operator product, leftmost factor applied
/// last.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkSpec {
    pub n: usize,
    pub d: usize,
    pub mass: f64,
    pub eps: f64,
    pub factors: Vec<Factor>,
}

impl WalkSpec {
    pub fn new(n: usize, d: usize, mass: f64, eps: f64, factors: Vec<Factor>) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(QwError::NonPositiveEps(eps));
        }
        for f in &factors {
            match f {
                Factor::Coin { generator, .. } => {
                    if generator.dim() != d {
                        return Err(QwError::ShapeMismatch("coin generator dimension".into()));
                    }
                }
                Factor::Shift { involution, axis } => {
                    if involution.dim() != d {
                        return Err(QwError::ShapeMismatch("shift involution dimension".into()));
                    }
                    if *axis >= n {
                        return Err(QwError::AxisOutOfRange { axis: *axis, n });
                    }
                    let defect = (*involution * *involution - CMat::identity(d)).max_norm();
                    if defect > 1e-12 {
                        return Err(QwError::Invalid(format!(
                            "shift matrix is not an involution (defect {defect:e})"
                        )));
                    }
                }
            }
        }
        Ok(WalkSpec {
            n,
            d,
            mass,
            eps,
            factors,
        })
    }
}

/// Evolves `f` by one walk step, applying the factors right to left.
///
/// Coins act site by site. A shift splits each site into the `+-1`
/// eigenspaces of its involution via the projectors `(Id +- sigma)/2` and
/// translates them in opposite directions.
pub fn split_step_apply(w: &WalkSpec, f: &Field) -> Result<Field> {
    if f.components() != w.d || f.grid().ndim() != w.n || !eps_match(f.grid().eps(), w.eps) {
        return Err(QwError::ShapeMismatch(format!(
            "walk (n={}, d={}, eps={}) vs field (n={}, d={}, eps={})",
            w.n,
            w.d,
            w.eps,
            f.grid().ndim(),
            f.components(),
            f.grid().eps()
        )));
    }
    let mut cur = f.clone();
    for factor in w.factors.iter().rev() {
        cur = match factor {
            Factor::Coin { generator, angle } => {
                let u = mat_exp(&generator.scale(Complex64::new(0.0, -angle)))?;
                apply_coin(&u, &cur)
            }
            Factor::Shift { involution, axis } => apply_shift(involution, *axis, &cur),
        };
    }
    Ok(cur)
}

fn apply_coin(u: &CMat, f: &Field) -> Field {
    let d = f.components();
    let mut out = f.clone();
    out.data_mut().par_chunks_mut(d).for_each(|site| {
        let v = u.mul_vec(site);
        site.copy_from_slice(&v);
    });
    out
}

fn apply_shift(sigma: &CMat, axis: usize, f: &Field) -> Field {
    let d = f.components();
    let grid = f.grid().clone();
    let half = Complex64::new(0.5, 0.0);
    let id = CMat::identity(d);
    let p_plus = (id + *sigma).scale(half);
    let p_minus = (id - *sigma).scale(half);
    let mut back = [0i64; 3];
    back[axis] = -1;
    let mut fwd = [0i64; 3];
    fwd[axis] = 1;
    let mut out = Field::zeros(&grid, d);
    out.data_mut()
        .par_chunks_mut(d)
        .enumerate()
        .for_each(|(site, dst)| {
            let coords = grid.coords(site);
            // +1 eigencomponent arrives from x - eps, -1 from x + eps
            let from_behind = f.site(grid.shifted_site(&coords, &back));
            let from_ahead = f.site(grid.shifted_site(&coords, &fwd));
            let a = p_plus.mul_vec(from_behind);
            let b = p_minus.mul_vec(from_ahead);
            for ((o, x), y) in dst.iter_mut().zip(a).zip(b) {
                *o = x + y;
            }
        });
    out
}
