//! The Dirac walks in 2+1 and 3+1 dimensions and the massless Weyl walk,
//! each available as a factor list (for split-step evolution) and as a
//! stencil (for the algebra).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{QwError, Result};
use crate::lattice::{Factor, WalkSpec};
use crate::stencil::{shift_factor, Offset, StencilOp};
use crate::tensoralg::{dirac_rep, mat_exp, pauli, CMat};

/// A walk in both of its representations.
#[derive(Debug, Clone)]
pub struct Walk {
    pub spec: WalkSpec,
    pub stencil: StencilOp,
}

/// Where the mass coin sits in the operator product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MassPlacement {
    /// Leftmost factor, applied after the shifts (the standard ordering).
    #[default]
    Outermost,
    /// Rightmost factor, applied before the shifts. Same trace and
    /// determinant, hence the same decoupled form, but a different walk.
    Innermost,
}

/// The shipped walk families, as named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkKind {
    Dirac2,
    Dirac3,
    Weyl3,
}

impl WalkKind {
    pub const ALL: [WalkKind; 3] = [WalkKind::Dirac2, WalkKind::Dirac3, WalkKind::Weyl3];

    pub fn name(self) -> &'static str {
        match self {
            WalkKind::Dirac2 => "dirac2",
            WalkKind::Dirac3 => "dirac3",
            WalkKind::Weyl3 => "weyl3",
        }
    }

    /// Spatial dimension.
    pub fn ndim(self) -> usize {
        match self {
            WalkKind::Dirac2 => 2,
            WalkKind::Dirac3 | WalkKind::Weyl3 => 3,
        }
    }

    /// Coin dimension.
    pub fn components(self) -> usize {
        match self {
            WalkKind::Dirac2 | WalkKind::Weyl3 => 2,
            WalkKind::Dirac3 => 4,
        }
    }

    /// The Weyl walk is massless whatever mass is requested.
    pub fn effective_mass(self, m: f64) -> f64 {
        match self {
            WalkKind::Weyl3 => 0.0,
            _ => m,
        }
    }

    pub fn build(self, m: f64, eps: f64) -> Result<Walk> {
        match self {
            WalkKind::Dirac2 => dirac2p1(m, eps),
            WalkKind::Dirac3 => dirac3p1(m, eps),
            WalkKind::Weyl3 => weyl3p1(eps),
        }
    }
}

impl fmt::Display for WalkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WalkKind {
    type Err = QwError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirac2" => Ok(WalkKind::Dirac2),
            "dirac3" => Ok(WalkKind::Dirac3),
            "weyl3" => Ok(WalkKind::Weyl3),
            other => Err(QwError::Invalid(format!(
                "unknown walk '{other}' (expected dirac2, dirac3 or weyl3)"
            ))),
        }
    }
}

fn check_params(m: f64, eps: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(QwError::NonPositiveEps(eps));
    }
    if !(m >= 0.0) || !m.is_finite() {
        return Err(QwError::NegativeMass(m));
    }
    Ok(())
}

/// Assembles a walk from its factors, building the stencil as the ordered
/// product of exact coin and shift stencils.
fn assemble(n: usize, d: usize, m: f64, eps: f64, factors: Vec<Factor>) -> Result<Walk> {
    let spec = WalkSpec::new(n, d, m, eps, factors)?;
    let mut stencil = StencilOp::identity(n, d, eps);
    for factor in &spec.factors {
        let s = match factor {
            Factor::Coin { generator, angle } => {
                let u = mat_exp(&generator.scale(Complex64::new(0.0, -angle)))?;
                StencilOp::constant(n, eps, u)
            }
            Factor::Shift { involution, axis } => shift_factor(n, eps, involution, *axis)?,
        };
        stencil = stencil.compose(&s)?;
    }
    Ok(Walk { spec, stencil })
}

fn with_mass(coin: Factor, shifts: Vec<Factor>, placement: MassPlacement) -> Vec<Factor> {
    let mut factors = shifts;
    match placement {
        MassPlacement::Outermost => factors.insert(0, coin),
        MassPlacement::Innermost => factors.push(coin),
    }
    factors
}

/// `exp(-i eps m sigma^2) exp(-eps sigma^1 d_1) exp(-eps sigma^3 d_2)`.
pub fn dirac2p1(m: f64, eps: f64) -> Result<Walk> {
    dirac2p1_with(m, eps, MassPlacement::Outermost)
}

pub fn dirac2p1_with(m: f64, eps: f64, placement: MassPlacement) -> Result<Walk> {
    check_params(m, eps)?;
    let coin = Factor::Coin {
        generator: pauli(2)?,
        angle: eps * m,
    };
    let shifts = vec![
        Factor::Shift {
            involution: pauli(1)?,
            axis: 0,
        },
        Factor::Shift {
            involution: pauli(3)?,
            axis: 1,
        },
    ];
    assemble(2, 2, m, eps, with_mass(coin, shifts, placement))
}

/// `exp(-i eps m beta) prod_j exp(-eps alpha^j d_j)` with
/// `alpha^j = sigma^3 (x) sigma^j`, `beta = sigma^2 (x) Id`.
pub fn dirac3p1(m: f64, eps: f64) -> Result<Walk> {
    dirac3p1_with(m, eps, MassPlacement::Outermost)
}

pub fn dirac3p1_with(m: f64, eps: f64, placement: MassPlacement) -> Result<Walk> {
    check_params(m, eps)?;
    let rep = dirac_rep();
    let coin = Factor::Coin {
        generator: rep.beta,
        angle: eps * m,
    };
    let shifts = (0..3)
        .map(|axis| Factor::Shift {
            involution: rep.alpha[axis],
            axis,
        })
        .collect();
    assemble(3, 4, m, eps, with_mass(coin, shifts, placement))
}

/// `exp(-eps sigma^1 d_1) exp(-eps sigma^2 d_2) exp(-eps sigma^3 d_3)`.
pub fn weyl3p1(eps: f64) -> Result<Walk> {
    check_params(0.0, eps)?;
    let factors = (0..3)
        .map(|axis| {
            Ok(Factor::Shift {
                involution: pauli(axis + 1)?,
                axis,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(3, 2, 0.0, eps, factors)
}

/// The 2+1 Dirac walk written out entry by entry:
///
/// ```text
/// W_ll = (c-s)/2 tx ty      + (c+s)/2 tx^-1 ty
/// W_lr = (c-s)/2 tx ty^-1   - (c+s)/2 tx^-1 ty^-1
/// W_rl = (c+s)/2 tx ty      - (c-s)/2 tx^-1 ty
/// W_rr = (c+s)/2 tx ty^-1   + (c-s)/2 tx^-1 ty^-1
/// ```
///
/// with `c = cos(eps m)`, `s = sin(eps m)`. Used as an independent check on
/// the factor product.
pub fn dirac2p1_closed_form(m: f64, eps: f64) -> Result<StencilOp> {
    check_params(m, eps)?;
    let (s, c) = (eps * m).sin_cos();
    let minus = (c - s) / 2.0;
    let plus = (c + s) / 2.0;
    let mut blocks: Vec<(Offset, CMat)> = Vec::new();
    let entry = |row: usize, col: usize, v: f64| {
        let mut mat = CMat::zeros(2);
        mat[(row, col)] = Complex64::new(v, 0.0);
        mat
    };
    let o = |x: i32, y: i32| Offset([x, y, 0]);
    // (l, l)
    blocks.push((o(1, 1), entry(0, 0, minus)));
    blocks.push((o(-1, 1), entry(0, 0, plus)));
    // (l, r)
    blocks.push((o(1, -1), entry(0, 1, minus)));
    blocks.push((o(-1, -1), entry(0, 1, -plus)));
    // (r, l)
    blocks.push((o(1, 1), entry(1, 0, plus)));
    blocks.push((o(-1, 1), entry(1, 0, -minus)));
    // (r, r)
    blocks.push((o(1, -1), entry(1, 1, plus)));
    blocks.push((o(-1, -1), entry(1, 1, minus)));
    StencilOp::from_terms(2, 2, eps, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirac2_matches_block_formulas() {
        for (m, eps) in [(0.35, 0.1), (0.0, 0.1), (1.7, 0.3)] {
            let w = dirac2p1(m, eps).unwrap();
            let closed = dirac2p1_closed_form(m, eps).unwrap();
            assert!(w.stencil.distance(&closed).unwrap() <= 1e-15, "m={m} eps={eps}");
        }
    }

    #[test]
    fn massless_dirac2_is_pure_shift_mixture() {
        let w = dirac2p1(0.0, 0.1).unwrap();
        let tx_ty = w.stencil.coefficient(&Offset([1, 1, 0]));
        assert_eq!(tx_ty[(0, 0)], Complex64::new(0.5, 0.0));
        assert_eq!(tx_ty[(1, 0)], Complex64::new(0.5, 0.0));
        assert_eq!(w.stencil.num_terms(), 4);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(dirac2p1(0.3, 0.0).unwrap_err(), QwError::NonPositiveEps(0.0));
        assert_eq!(dirac3p1(-1.0, 0.1).unwrap_err(), QwError::NegativeMass(-1.0));
        assert!(weyl3p1(-0.1).is_err());
    }

    #[test]
    fn symbols_at_zero_momentum_are_identity_when_massless() {
        for kind in WalkKind::ALL {
            let w = kind.build(0.0, 0.1).unwrap();
            let k = vec![0.0; kind.ndim()];
            let sym = w.stencil.symbol(&k);
            assert!((sym - CMat::identity(kind.components())).max_norm() < 1e-15, "{kind}");
        }
    }

    #[test]
    fn walk_names_round_trip() {
        for kind in WalkKind::ALL {
            assert_eq!(kind.name().parse::<WalkKind>().unwrap(), kind);
        }
        assert!("dirac4".parse::<WalkKind>().is_err());
    }

    #[test]
    fn mass_placement_changes_the_walk() {
        let a = dirac2p1(0.35, 0.1).unwrap();
        let b = dirac2p1_with(0.35, 0.1, MassPlacement::Innermost).unwrap();
        assert!(a.stencil.distance(&b.stencil).unwrap() > 1e-3);
        assert!(
            a.stencil
                .trace_stencil()
                .distance(&b.stencil.trace_stencil())
                .unwrap()
                < 1e-15
        );
    }
}
