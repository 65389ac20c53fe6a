//! A two-step scalar scheme on the body-centred cube corners whose
//! continuum limit is the (unsquared) Klein-Gordon operator.
//!
//! `A+` carries the four even-parity corners with weight `exp(-i m eps)/4`
//! and `A-` the four odd-parity corners with weight `exp(i m eps)/4`. The
//! scheme is `T^2 - (A+ + A-) T + 1`. The variant with `-1` as constant term
//! is kept for comparison only: it does not preserve constant fields and
//! has no Klein-Gordon limit.

use num_complex::Complex64;
use serde::Serialize;

use crate::decouple::DecoupledForm;
use crate::error::{QwError, Result};
use crate::stencil::{Offset, StencilOp};
use crate::tensoralg::CMat;

/// Constant term of the two-step scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstantSign {
    /// `T^2 - (A+ + A-) T + 1`.
    #[default]
    Corrected,
    /// `T^2 - (A+ + A-) T - 1`.
    Literal,
}

const EVEN_CORNERS: [[i32; 3]; 4] = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];
const ODD_CORNERS: [[i32; 3]; 4] = [[1, 1, -1], [1, -1, 1], [-1, 1, 1], [-1, -1, -1]];

/// The corner stencils `(A+, A-)`.
pub fn a_stencils(m: f64, eps: f64) -> Result<(StencilOp, StencilOp)> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(QwError::NonPositiveEps(eps));
    }
    let corner = |corners: [[i32; 3]; 4], phase: f64| {
        let w = CMat::scalar(1, Complex64::from_polar(0.25, phase));
        StencilOp::from_terms(3, 1, eps, corners.map(|o| (Offset(o), w)))
    };
    Ok((corner(EVEN_CORNERS, -m * eps)?, corner(ODD_CORNERS, m * eps)?))
}

pub fn conjecture_form(m: f64, eps: f64, sign: ConstantSign) -> Result<DecoupledForm> {
    let (plus, minus) = a_stencils(m, eps)?;
    let a1 = plus.add(&minus)?;
    // psi(t+2) = a1 psi(t+1) + a0 psi(t)
    let a0 = match sign {
        ConstantSign::Corrected => -1.0,
        ConstantSign::Literal => 1.0,
    };
    DecoupledForm::new(vec![StencilOp::scalar(3, eps, Complex64::new(a0, 0.0)), a1])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeRoots {
    pub k: Vec<f64>,
    /// Symbol of `A+ + A-` at `k`.
    pub a_hat: Complex64,
    /// Moduli of the two roots of `lambda^2 - a_hat lambda + 1`, larger
    /// first.
    pub moduli: [f64; 2],
}

impl ModeRoots {
    pub fn max_modulus(&self) -> f64 {
        self.moduli[0]
    }
}

/// Per-momentum root moduli of the characteristic equation of the
/// corrected scheme.
pub fn stability_spectrum(m: f64, eps: f64, ks: &[Vec<f64>]) -> Result<Vec<ModeRoots>> {
    let (plus, minus) = a_stencils(m, eps)?;
    let a1 = plus.add(&minus)?;
    ks.iter()
        .map(|k| {
            if k.len() != 3 {
                return Err(QwError::ShapeMismatch("momentum must have 3 components".into()));
            }
            let a_hat = a1.scalar_symbol(k);
            let disc = (a_hat * a_hat - 4.0).sqrt();
            let r1 = ((a_hat + disc) * 0.5).norm();
            let r2 = ((a_hat - disc) * 0.5).norm();
            Ok(ModeRoots {
                k: k.clone(),
                a_hat,
                moduli: [r1.max(r2), r1.min(r2)],
            })
        })
        .collect()
}
