mod common;

use common::{c, coupled_model, sector};
use crdisc_core::manifolds::*;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn complex_sum(model: &PolynomialModel, x: &[f64], w: &[Complex64]) -> Vec<Complex64> {
    let d = x.len();
    let mut out = vec![c(0.0, 0.0); d];
    for t in model.terms() {
        let mut v = c(1.0, 0.0);
        for (xi, &e) in x.iter().zip(&t.x) {
            v *= xi.powi(e as i32);
        }
        for ((wk, &a), &b) in w.iter().zip(&t.a).zip(&t.b) {
            v *= wk.powu(a) * wk.conj().powu(b);
        }
        for (o, cf) in out.iter_mut().zip(&t.coef) {
            *o += cf * v;
        }
    }
    out
}

fn coupled_polynomial() -> PolynomialModel {
    let terms = vec![
        Monomial { x: vec![0, 0], a: vec![2], b: vec![1], coef: vec![c(0.5, 0.0), c(0.0, -0.5)] },
        Monomial { x: vec![0, 0], a: vec![1], b: vec![2], coef: vec![c(0.5, 0.0), c(0.0, 0.5)] },
        Monomial { x: vec![1, 0], a: vec![1], b: vec![1], coef: vec![c(3.0, 0.0), c(0.0, 0.0)] },
        Monomial { x: vec![0, 1], a: vec![1], b: vec![1], coef: vec![c(0.0, 0.0), c(-1.0, 0.0)] },
        Monomial { x: vec![1, 1], a: vec![3], b: vec![0], coef: vec![c(0.2, 0.1), c(0.0, 0.0)] },
        Monomial { x: vec![1, 1], a: vec![0], b: vec![3], coef: vec![c(0.2, -0.1), c(0.0, 0.0)] },
    ];
    polynomial_model(2, 1, terms).unwrap()
}

#[test]
fn sector_values_on_the_defining_branches() {
    for k in [2u32, 3, 4] {
        let h = model_sector_hypersurface(k, 0.05, Side::Plus).unwrap();
        let rho = 0.3;
        assert_eq!(h.eval_vec(&[0.0], &[c(rho, 0.0)], 0.0)[0], 0.0);
        let far = h.eval_vec(&[0.0], &[Complex64::from_polar(rho, PI)], 0.0)[0];
        let expect = -2.0 * (-1f64).powi(k as i32) * rho.powi(k as i32);
        assert!((far - expect).abs() < 1e-14, "k={k}: {far} vs {expect}");
        let (inner, _) = h.half_angles();
        assert_eq!(h.profile(inner).0, 0.0);
        assert!((inner - PI * (1.0 / (2.0 * k as f64) + 0.025)).abs() < 1e-15);
    }
}

#[test]
fn sector_order_is_finite_and_bounded() {
    for k in [2u32, 3, 4] {
        for side in [Side::Plus, Side::Minus] {
            let est = weighted_vanishing_order(&*sector(k, side), k + 2, 7).unwrap();
            let kh = est.k_hat.expect("finite order");
            assert!(kh <= k + 1, "k={k} {side:?}: {kh}");
        }
    }
}

#[test]
fn defining_jacobian_matches_finite_differences() {
    let h = coupled_model();
    let x = [0.03, -0.02];
    let w = [c(0.1, 0.05)];
    let p = ManifoldPoint::on_graph(&*h, &x, &w);
    let jac = defining_jacobian(&*h, &p).unwrap();
    // rho(z, w) = y - h(x, w), z = x + i y; d rho / d z_l = (d/dx_l - i d/dy_l) / 2.
    let step = 1e-6;
    for j in 0..2 {
        for l in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[l] += step;
            xm[l] -= step;
            let dhdx = (h.eval_vec(&xp, &w, 0.0)[j] - h.eval_vec(&xm, &w, 0.0)[j]) / (2.0 * step);
            let dy = if j == l { 1.0 } else { 0.0 };
            let fd = c(-0.5 * dhdx, -0.5 * dy);
            assert!((jac[j * 2 + l] - fd).norm() < 1e-6, "({j},{l}): {} vs {fd}", jac[j * 2 + l]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_models_are_real(x1 in -0.5..0.5f64, x2 in -0.5..0.5f64, wr in -0.5..0.5f64, wi in -0.5..0.5f64) {
        let model = coupled_polynomial();
        let x = [x1, x2];
        let w = [c(wr, wi)];
        let full = complex_sum(&model, &x, &w);
        let vals = model.eval_vec(&x, &w, 0.0);
        for (z, v) in full.iter().zip(&vals) {
            prop_assert!(z.im.abs() <= 1e-12 * z.norm().max(1.0));
            prop_assert!((z.re - v).abs() <= 1e-15);
        }
    }

    #[test]
    fn collar_at_zero_is_the_base(x1 in -0.5..0.5f64, wr in -0.5..0.5f64, wi in -0.5..0.5f64, k in 2u32..5) {
        let base = sector(k, Side::Plus);
        let collar = extend_with_collar(base.clone(), &[1.0]).unwrap();
        let w = [c(wr, wi)];
        let a = base.eval_vec(&[x1], &w, 0.0)[0];
        let b = collar.eval_vec(&[x1], &w, 0.0)[0];
        prop_assert!((a - b).abs() <= 1e-15);
        let mut dt = [0.0];
        collar.d_t(&[x1], &w, 0.3, &mut dt);
        prop_assert_eq!(dt[0], 1.0);
    }

    #[test]
    fn minus_side_sits_above_the_barrier(r in 0.0..0.5f64, phi in -PI..PI, k in 2u32..5, x in -0.1..0.1f64) {
        let h = model_sector_hypersurface(k, 0.05, Side::Minus).unwrap();
        let z = Complex64::from_polar(r, phi);
        let val = h.eval_vec(&[x], &[z], 0.0)[0] + 2.0 * z.powu(k).re;
        prop_assert!(val >= -1e-12, "{val}");
    }
}
