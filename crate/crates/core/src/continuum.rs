//! Numerical continuum-limit checks.
//!
//! Plane waves are taken as `exp(i(k.x - omega t))` throughout, so a time
//! step acts as `exp(-i omega eps)` and `tau_j` as `exp(-i k_j eps)`. With
//! this convention the continuum symbol of the Klein-Gordon operator
//! `box + m^2` is `-omega^2 + |k|^2 + m^2`.

use num_complex::Complex64;
use serde::Serialize;

use crate::decouple::DecoupledForm;
use crate::error::{QwError, Result};
use crate::stencil::StencilOp;
use crate::tensoralg::{eigenphases, mat_exp_unchecked, CMat};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionRow {
    pub k: Vec<f64>,
    pub branch: usize,
    /// `-arg(lambda) / eps`, in `(-pi/eps, pi/eps]`.
    pub omega_eps: f64,
    pub omega_cont: f64,
    pub abs_err: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DispersionTable {
    pub rows: Vec<DispersionRow>,
}

impl DispersionTable {
    pub fn max_abs_err(&self) -> f64 {
        self.rows.iter().map(|r| r.abs_err).fold(0.0, f64::max)
    }
}

/// Eigenfrequencies of `W(k)` for each momentum, each matched to the
/// nearest continuum branch `+-sqrt(|k|^2 + m^2)` (ties go to `+`).
pub fn dispersion(w: &StencilOp, m: f64, ks: &[Vec<f64>]) -> Result<DispersionTable> {
    let eps = w.eps();
    let mut rows = Vec::with_capacity(ks.len() * w.dim());
    for k in ks {
        let eigs = eigenphases(&w.symbol(k))?;
        let energy = (k.iter().map(|x| x * x).sum::<f64>() + m * m).sqrt();
        for (branch, lambda) in eigs.iter().enumerate() {
            let omega_eps = -lambda.arg() / eps;
            let up = (omega_eps - energy).abs();
            let down = (omega_eps + energy).abs();
            let omega_cont = if up <= down { energy } else { -energy };
            rows.push(DispersionRow {
                k: k.clone(),
                branch,
                omega_eps,
                omega_cont,
                abs_err: up.min(down),
            });
        }
    }
    Ok(DispersionTable { rows })
}

/// Least-squares slope of `log(error)` against `log(eps)`.
pub fn convergence_order(errs: &[(f64, f64)]) -> Result<f64> {
    if errs.len() < 3 {
        return Err(QwError::Invalid(format!(
            "need at least 3 (eps, error) points, got {}",
            errs.len()
        )));
    }
    if let Some(&(_, e)) = errs.iter().find(|(_, e)| !(*e > 0.0)) {
        return Err(QwError::ExactToRoundoff(e));
    }
    if errs.windows(2).any(|p| !(p[1].0 < p[0].0)) || errs.iter().any(|(h, _)| !(*h > 0.0)) {
        return Err(QwError::Invalid("eps values must be positive and strictly decreasing".into()));
    }
    let pts: Vec<(f64, f64)> = errs.iter().map(|(h, e)| (h.ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// True when every error is strictly smaller than the previous one.
pub fn strictly_decreasing(errs: &[(f64, f64)]) -> bool {
    errs.windows(2).all(|p| p[1].1 < p[0].1)
}

/// Continuum target `(-omega^2 + |k|^2 + m^2)^(s/2)` for an order-`s`
/// decoupled form.
pub fn klein_gordon_target(omega: f64, k: &[f64], m: f64, order: usize) -> f64 {
    let base = -omega * omega + k.iter().map(|x| x * x).sum::<f64>() + m * m;
    base.powi((order / 2) as i32)
}

/// For each `eps`, builds the decoupled form, evaluates its spacetime
/// symbol at `(omega, k)`, divides by `eps^s` and returns the distance to
/// the continuum target.
pub fn symbol_limit_check<F>(
    mut family: F,
    omega: f64,
    k: &[f64],
    m: f64,
    eps_list: &[f64],
) -> Result<Vec<(f64, f64)>>
where
    F: FnMut(f64) -> Result<DecoupledForm>,
{
    eps_list
        .iter()
        .map(|&eps| {
            let dec = family(eps)?;
            let s = dec.order();
            let p = dec.spacetime_symbol(omega, k) / eps.powi(s as i32);
            let target = klein_gordon_target(omega, k, m, s);
            Ok((eps, (p - target).norm()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaRow {
    pub eps: f64,
    pub ratio: Complex64,
    pub target: Complex64,
    pub abs_err: f64,
}

/// `det(Id - prod_i exp(-eps alpha_i A_i)) / eps^d` against
/// `det(sum_i alpha_i A_i)` for each `eps`.
pub fn lemma_scaling_check(alphas: &[CMat], a: &[f64], eps_list: &[f64]) -> Result<Vec<LemmaRow>> {
    let first = alphas
        .first()
        .ok_or_else(|| QwError::Invalid("need at least one matrix".into()))?;
    let d = first.dim();
    if alphas.iter().any(|m| m.dim() != d) {
        return Err(QwError::ShapeMismatch("matrices of different dimension".into()));
    }
    if alphas.len() != a.len() {
        return Err(QwError::ShapeMismatch(format!(
            "{} matrices but {} coefficients",
            alphas.len(),
            a.len()
        )));
    }
    let generator = alphas
        .iter()
        .zip(a)
        .fold(CMat::zeros(d), |acc, (m, x)| acc + m.scale(Complex64::new(*x, 0.0)));
    let target = generator.det();
    let id = CMat::identity(d);
    eps_list
        .iter()
        .map(|&eps| {
            let product = alphas.iter().zip(a).fold(id, |acc, (m, x)| {
                acc * mat_exp_unchecked(&m.scale(Complex64::new(-eps * x, 0.0)))
            });
            let ratio = (id - product).det() / eps.powi(d as i32);
            Ok(LemmaRow {
                eps,
                ratio,
                target,
                abs_err: (ratio - target).norm(),
            })
        })
        .collect()
}
