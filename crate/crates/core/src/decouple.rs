//! Decoupled (scalar, multi-step) forms of a walk.
//!
//! For a walk operator `W` with characteristic polynomial
//! `det(lambda - W) = lambda^s - e1 lambda^(s-1) + e2 lambda^(s-2) - ...`,
//! every trajectory `psi(t + eps) = W psi(t)` satisfies, componentwise,
//! `psi(t + s eps) = sum_{k<s} a_k psi(t + k eps)`. The coefficients
//! `e_j` live in the commutative algebra of scalar stencils and are
//! obtained from the power traces `tr(W^j)` by Newton's identities.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{QwError, Result};
use crate::lattice::{Field, SeededRng};
use crate::stencil::StencilOp;
use crate::tensoralg::{eigenphases, CMat};

/// Default angular tolerance for clustering eigenphases.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// `psi(t + s eps) = sum_{k<s} a[k] psi(t + k eps)` with scalar stencils
/// `a[k]`. The leading coefficient is implicitly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoupledForm {
    pub a: Vec<StencilOp>,
    pub eps: f64,
}

impl DecoupledForm {
    pub fn new(a: Vec<StencilOp>) -> Result<Self> {
        let first = a
            .first()
            .ok_or_else(|| QwError::Invalid("decoupled form needs at least one coefficient".into()))?;
        if a.iter().any(|s| s.dim() != 1 || s.ndim() != first.ndim()) {
            return Err(QwError::ShapeMismatch(
                "decoupled-form coefficients must be scalar stencils on one lattice".into(),
            ));
        }
        let eps = first.eps();
        Ok(DecoupledForm { a, eps })
    }

    /// Number of time steps `s`.
    pub fn order(&self) -> usize {
        self.a.len()
    }

    pub fn ndim(&self) -> usize {
        self.a[0].ndim()
    }

    /// Symbols `a_k(k)` of the coefficients.
    pub fn coefficient_symbols(&self, k: &[f64]) -> Vec<Complex64> {
        self.a.iter().map(|s| s.scalar_symbol(k)).collect()
    }

    /// `p(lambda) = lambda^s - sum_k a_k(k) lambda^k`.
    pub fn polynomial_at(&self, lambda: Complex64, k: &[f64]) -> Complex64 {
        let coeffs = self.coefficient_symbols(k);
        let mut p = lambda.powu(self.order() as u32);
        for (j, a) in coeffs.iter().enumerate() {
            p -= a * lambda.powu(j as u32);
        }
        p
    }

    /// Spacetime symbol on the plane wave `exp(i(k.x - omega t))`, where
    /// the time translation acts as `exp(-i omega eps)`.
    pub fn spacetime_symbol(&self, omega: f64, k: &[f64]) -> Complex64 {
        self.polynomial_at(Complex64::from_polar(1.0, -omega * self.eps), k)
    }

    /// `max |(W(k)^s - sum_j a_j(k) W(k)^j)_ij|`: the Cayley-Hamilton defect
    /// at momentum `k`.
    pub fn cayley_hamilton_defect(&self, w: &StencilOp, k: &[f64]) -> f64 {
        let sym = w.symbol(k);
        let d = sym.dim();
        let coeffs = self.coefficient_symbols(k);
        let mut power = CMat::identity(d);
        let mut acc = CMat::zeros(d);
        for a in &coeffs {
            acc = acc + power.scale(*a);
            power = power * sym;
        }
        (power - acc).max_norm()
    }
}

/// Elementary symmetric functions `e_1..e_d` of the eigenvalues of `W`,
/// as scalar stencils, from power traces via Newton's identities:
/// `j e_j = sum_{i=1..j} (-1)^(i-1) e_(j-i) p_i`.
pub fn elementary_stencils(w: &StencilOp) -> Result<Vec<StencilOp>> {
    let d = w.dim();
    if d != 2 && d != 4 {
        return Err(QwError::UnsupportedDim(d));
    }
    let (n, eps) = (w.ndim(), w.eps());
    let mut power = w.clone();
    let mut traces = Vec::with_capacity(d);
    for j in 1..=d {
        if j > 1 {
            power = power.compose(w)?;
        }
        traces.push(power.trace_stencil());
    }
    let mut e: Vec<StencilOp> = vec![StencilOp::scalar(n, eps, Complex64::new(1.0, 0.0))];
    for j in 1..=d {
        let mut acc = StencilOp::zero(n, 1, eps);
        for i in 1..=j {
            let term = e[j - i].compose(&traces[i - 1])?;
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc = StencilOp::combine(
                &[Complex64::new(1.0, 0.0), Complex64::new(sign, 0.0)],
                &[&acc, &term],
            )?;
        }
        e.push(acc.scale(Complex64::new(1.0 / j as f64, 0.0)));
    }
    e.remove(0);
    Ok(e)
}

/// Decoupled form from the characteristic polynomial of `W`:
/// `a_(s-j) = (-1)^(j+1) e_j`.
pub fn char_poly_stencils(w: &StencilOp) -> Result<DecoupledForm> {
    let e = elementary_stencils(w)?;
    let s = e.len();
    let mut a = vec![StencilOp::zero(w.ndim(), 1, w.eps()); s];
    for (idx, ej) in e.into_iter().enumerate() {
        let j = idx + 1;
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        a[s - j] = ej.scale(Complex64::new(sign, 0.0));
    }
    DecoupledForm::new(a)
}

/// How a probed momentum was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    Random,
    Origin,
    Axis,
}

impl SampleKind {
    pub fn name(self) -> &'static str {
        match self {
            SampleKind::Random => "random",
            SampleKind::Origin => "origin",
            SampleKind::Axis => "axis",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSample {
    pub k: Vec<f64>,
    pub kind: SampleKind,
    /// Cluster sizes, largest first; `(1, 1, ...)` means all distinct.
    pub pattern: Vec<usize>,
    pub accidental: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyReport {
    pub samples: Vec<ProbeSample>,
    /// Pattern shared by a strict majority of the random samples, if any.
    pub generic: Option<Vec<usize>>,
    /// Fraction of random samples showing the generic pattern.
    pub generic_fraction: f64,
}

impl DegeneracyReport {
    /// True when the generic pattern has only singleton clusters, i.e. the
    /// characteristic polynomial is generically the minimal one.
    pub fn generically_distinct(&self) -> bool {
        self.generic
            .as_ref()
            .is_some_and(|p| p.iter().all(|&m| m == 1))
    }

    pub fn accidental(&self) -> impl Iterator<Item = &ProbeSample> {
        self.samples.iter().filter(|s| s.accidental)
    }
}

/// Groups eigenphases whose angular distance (on the circle) is within
/// `tol`, returning cluster sizes largest first.
pub fn multiplicity_pattern(eigs: &[Complex64], tol: f64) -> Vec<usize> {
    let mut angles: Vec<f64> = eigs.iter().map(|z| z.arg()).collect();
    angles.sort_by(f64::total_cmp);
    let n = angles.len();
    if n == 0 {
        return Vec::new();
    }
    let gap = |a: f64, b: f64| {
        let d = (b - a).rem_euclid(2.0 * PI);
        d.min(2.0 * PI - d)
    };
    // find a break point on the circle so clusters do not straddle it
    let start = (0..n)
        .find(|&i| gap(angles[(i + n - 1) % n], angles[i]) > tol)
        .unwrap_or(0);
    let mut sizes = Vec::new();
    let mut current = 1;
    for step in 1..n {
        let prev = angles[(start + step - 1) % n];
        let next = angles[(start + step) % n];
        if gap(prev, next) <= tol {
            current += 1;
        } else {
            sizes.push(current);
            current = 1;
        }
    }
    sizes.push(current);
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

#[derive(Debug, Clone, Copy)]
pub struct ProbeConfig {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            samples: 200,
            tol: DEGENERACY_TOL,
            seed: 7,
        }
    }
}

/// Clusters the eigenphases of `W(k)` at random Brillouin-zone momenta,
/// the origin and one point per axis (`k_axis = pi / (2 eps)`), and reports
/// the generic multiplicity pattern plus every sample that departs from it.
pub fn degeneracy_probe(w: &StencilOp, cfg: &ProbeConfig) -> Result<DegeneracyReport> {
    if cfg.samples == 0 {
        return Err(QwError::Invalid("degeneracy probe needs at least one sample".into()));
    }
    let (n, eps) = (w.ndim(), w.eps());
    let mut rng = SeededRng::new(cfg.seed);
    let mut points: Vec<(Vec<f64>, SampleKind)> = (0..cfg.samples)
        .map(|_| (rng.brillouin(n, eps), SampleKind::Random))
        .collect();
    points.push((vec![0.0; n], SampleKind::Origin));
    for axis in 0..n {
        let mut k = vec![0.0; n];
        k[axis] = PI / (2.0 * eps);
        points.push((k, SampleKind::Axis));
    }

    let mut samples = Vec::with_capacity(points.len());
    for (k, kind) in points {
        let eigs = eigenphases(&w.symbol(&k))?;
        samples.push(ProbeSample {
            pattern: multiplicity_pattern(&eigs, cfg.tol),
            k,
            kind,
            accidental: false,
        });
    }

    let random: Vec<&Vec<usize>> = samples
        .iter()
        .filter(|s| s.kind == SampleKind::Random)
        .map(|s| &s.pattern)
        .collect();
    let mut generic = None;
    let mut generic_fraction = 0.0;
    for candidate in &random {
        let count = random.iter().filter(|p| p == &candidate).count();
        if 2 * count > random.len() {
            generic = Some((*candidate).clone());
            generic_fraction = count as f64 / random.len() as f64;
            break;
        }
    }
    if let Some(g) = &generic {
        for s in &mut samples {
            s.accidental = &s.pattern != g;
        }
    }
    Ok(DegeneracyReport {
        samples,
        generic,
        generic_fraction,
    })
}

/// `psi(t + s eps) = sum_k a_k psi(t + k eps)`; `history` is oldest first.
pub fn recurrence_step(dec: &DecoupledForm, history: &[Field]) -> Result<Field> {
    if history.len() != dec.order() {
        return Err(QwError::HistoryLength {
            expected: dec.order(),
            got: history.len(),
        });
    }
    let mut out = Field::zeros(history[0].grid(), history[0].components());
    for (a, slice) in dec.a.iter().zip(history) {
        out.add_assign(&a.apply(slice)?)?;
    }
    Ok(out)
}

/// Evolves `f0` under `W` for `steps` steps and measures, for every window
/// of `s + 1` consecutive slices, the sup-norm of
/// `psi(t + s eps) - sum_k a_k psi(t + k eps)`. Entry `t` of the result is
/// the window starting at slice `t`.
pub fn residual(w: &StencilOp, dec: &DecoupledForm, f0: &Field, steps: usize) -> Result<Vec<f64>> {
    let s = dec.order();
    if steps < s {
        return Err(QwError::Invalid(format!(
            "need at least {s} steps for an order-{s} form, got {steps}"
        )));
    }
    let mut slices = Vec::with_capacity(steps + 1);
    slices.push(f0.clone());
    for _ in 0..steps {
        let next = w.apply(slices.last().unwrap())?;
        slices.push(next);
    }
    slices
        .windows(s + 1)
        .map(|win| {
            let predicted = recurrence_step(dec, &win[..s])?;
            Ok(win[s].sub(&predicted)?.max_abs())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{random_field, Grid};
    use crate::walks::{dirac2p1, weyl3p1};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_walk_gives_binomial() {
        let id = StencilOp::identity(2, 2, 0.1);
        let dec = char_poly_stencils(&id).unwrap();
        assert_eq!(dec.order(), 2);
        assert!(dec.a[1].distance(&StencilOp::scalar(2, 0.1, c(2.0))).unwrap() < 1e-15);
        assert!(dec.a[0].distance(&StencilOp::scalar(2, 0.1, c(-1.0))).unwrap() < 1e-15);
    }

    #[test]
    fn rejects_unsupported_dimension() {
        let s = StencilOp::identity(1, 3, 0.1);
        assert_eq!(char_poly_stencils(&s).unwrap_err(), QwError::UnsupportedDim(3));
    }

    #[test]
    fn weyl_form_is_trace_and_minus_one() {
        let w = weyl3p1(0.1).unwrap();
        let dec = char_poly_stencils(&w.stencil).unwrap();
        assert_eq!(dec.order(), 2);
        assert!(dec.a[1].distance(&w.stencil.trace_stencil()).unwrap() < 1e-15);
        assert!(dec.a[0].distance(&StencilOp::scalar(3, 0.1, c(-1.0))).unwrap() < 1e-12);
    }

    #[test]
    fn two_step_recurrence_formula() {
        let w = dirac2p1(0.35, 0.1).unwrap();
        let dec = char_poly_stencils(&w.stencil).unwrap();
        let g = Grid::new(&[8, 8], 0.1).unwrap();
        let f = random_field(1, &g, 2);
        let f1 = random_field(2, &g, 2);
        let next = recurrence_step(&dec, &[f.clone(), f1.clone()]).unwrap();
        let want = w.stencil.trace_stencil().apply(&f1).unwrap().sub(&f).unwrap();
        assert!(next.sub(&want).unwrap().max_abs() < 1e-12);

        let zero = Field::zeros(&g, 2);
        let out = recurrence_step(&dec, &[zero.clone(), zero.clone()]).unwrap();
        assert_eq!(out.max_abs(), 0.0);

        assert_eq!(
            recurrence_step(&dec, &[f]).unwrap_err(),
            QwError::HistoryLength { expected: 2, got: 1 }
        );
    }

    #[test]
    fn residual_needs_enough_steps() {
        let w = dirac2p1(0.35, 0.1).unwrap();
        let dec = char_poly_stencils(&w.stencil).unwrap();
        let g = Grid::new(&[4, 4], 0.1).unwrap();
        let f = random_field(1, &g, 2);
        assert!(residual(&w.stencil, &dec, &f, 1).is_err());
        assert_eq!(residual(&w.stencil, &dec, &f, 2).unwrap().len(), 1);
    }

    #[test]
    fn multiplicity_patterns() {
        let e = |a: f64| Complex64::from_polar(1.0, a);
        assert_eq!(multiplicity_pattern(&[e(0.1), e(0.1), e(-0.2)], 1e-8), vec![2, 1]);
        assert_eq!(multiplicity_pattern(&[e(PI - 1e-10), e(-PI + 1e-10)], 1e-8), vec![2]);
        assert_eq!(multiplicity_pattern(&[c(1.0), c(1.0), c(1.0), c(1.0)], 1e-8), vec![4]);
        assert_eq!(multiplicity_pattern(&[e(0.0), e(1.0), e(2.0), e(3.0)], 1e-8), vec![1, 1, 1, 1]);
    }

    #[test]
    fn massless_origin_is_fully_degenerate() {
        let w = dirac2p1(0.0, 0.1).unwrap();
        let cfg = ProbeConfig {
            samples: 20,
            ..ProbeConfig::default()
        };
        let report = degeneracy_probe(&w.stencil, &cfg).unwrap();
        let origin = report
            .samples
            .iter()
            .find(|s| s.kind == SampleKind::Origin)
            .unwrap();
        assert_eq!(origin.pattern, vec![2]);
        assert!(origin.accidental);
        assert_eq!(report.generic, Some(vec![1, 1]));
    }
}
