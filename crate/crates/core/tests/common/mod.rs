#![allow(dead_code)]

use num_complex::Complex64;
use qwalk::lattice::SeededRng;
use qwalk::stencil::{Offset, StencilOp};
use qwalk::tensoralg::CMat;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_matrix(rng: &mut SeededRng, d: usize) -> CMat {
    let entries: Vec<Complex64> = (0..d * d)
        .map(|_| c(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)))
        .collect();
    CMat::from_row_major(&entries).unwrap()
}

/// Stencil with `terms` random coefficients at random offsets of radius
/// at most `radius`.
pub fn random_stencil(rng: &mut SeededRng, n: usize, d: usize, eps: f64, terms: usize, radius: i32) -> StencilOp {
    let span = (2 * radius + 1) as f64;
    let list: Vec<(Offset, CMat)> = (0..terms)
        .map(|_| {
            let mut o = [0i32; 3];
            for x in o.iter_mut().take(n) {
                *x = (rng.unit() * span).floor() as i32 - radius;
            }
            (Offset(o), random_matrix(rng, d))
        })
        .collect();
    StencilOp::from_terms(n, d, eps, list).unwrap()
}
