#![allow(dead_code)]

use crdisc_core::circle::CircleGrid;
use crdisc_core::manifolds::{extend_with_collar, model_sector_hypersurface, polynomial_model, shared, Monomial, SharedModel, Side};
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn grid(n: usize) -> CircleGrid {
    CircleGrid::new(n).unwrap()
}

pub fn sector(k: u32, side: Side) -> SharedModel {
    shared(model_sector_hypersurface(k, 0.05, side).unwrap())
}

/// `h_1 = |w|^2 Re w + 3 x_1 |w|^2`, `h_2 = |w|^2 Im w - x_2 |w|^2`.
pub fn coupled_model() -> SharedModel {
    let terms = vec![
        Monomial { x: vec![0, 0], a: vec![2], b: vec![1], coef: vec![c(0.5, 0.0), c(0.0, -0.5)] },
        Monomial { x: vec![0, 0], a: vec![1], b: vec![2], coef: vec![c(0.5, 0.0), c(0.0, 0.5)] },
        Monomial { x: vec![1, 0], a: vec![1], b: vec![1], coef: vec![c(3.0, 0.0), c(0.0, 0.0)] },
        Monomial { x: vec![0, 1], a: vec![1], b: vec![1], coef: vec![c(0.0, 0.0), c(-1.0, 0.0)] },
    ];
    shared(polynomial_model(2, 1, terms).unwrap())
}

pub fn coupled_collar() -> SharedModel {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    shared(extend_with_collar(coupled_model(), &[s, s]).unwrap())
}
