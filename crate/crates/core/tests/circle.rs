mod common;

use common::{c, grid};
use crdisc_core::circle::*;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn trig_poly(g: &CircleGrid, a: &[f64], b: &[f64]) -> RealFunction {
    RealFunction::from_angle(g, |t| {
        let mut s = 0.0;
        for (m, (am, bm)) in a.iter().zip(b).enumerate() {
            let m = (m + 1) as f64;
            s += am * (m * t).cos() + bm * (m * t).sin();
        }
        s
    })
}

fn conjugate_poly(g: &CircleGrid, a: &[f64], b: &[f64]) -> RealFunction {
    // Harmonic conjugate of sum a_m cos + b_m sin, shifted to vanish at theta = 0.
    let raw = |t: f64| {
        let mut s = 0.0;
        for (m, (am, bm)) in a.iter().zip(b).enumerate() {
            let m = (m + 1) as f64;
            s += am * (m * t).sin() - bm * (m * t).cos();
        }
        s
    };
    let at0 = raw(0.0);
    RealFunction::from_angle(g, |t| raw(t) - at0)
}

fn coeff_strategy(len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (prop::collection::vec(-1.0..1.0f64, len), prop::collection::vec(-1.0..1.0f64, len))
}

#[test]
fn t1_matches_closed_form_conjugate_up_to_quarter_degree() {
    let g = grid(1024);
    let deg = 256;
    let a: Vec<f64> = (0..deg).map(|m| ((m * 7 + 3) % 11) as f64 / 11.0 - 0.5).collect();
    let b: Vec<f64> = (0..deg).map(|m| ((m * 5 + 1) % 13) as f64 / 13.0 - 0.5).collect();
    let got = hilbert_t1(&trig_poly(&g, &a, &b));
    let want = conjugate_poly(&g, &a, &b);
    assert!(got.sub(&want).sup_norm() <= 1e-10);
}

#[test]
fn fourier_roundtrip_against_direct_sum() {
    let g = grid(256);
    let f = ComplexFunction::from_angle(&g, |t| c((3.0 * t).sin() + 0.2 * t, (t * t).cos()));
    let spec = fourier_coeffs(&f);
    for m in [-128i64, -5, 0, 1, 17, 127] {
        let direct: Complex64 = (0..256)
            .map(|j| f.at(j) * Complex64::from_polar(1.0, -(m as f64) * g.theta(j)))
            .sum::<Complex64>()
            / 256.0;
        assert!((spec.coeff(m) - direct).norm() < 1e-12);
    }
    let back = spec.synthesize(&g).unwrap();
    assert!(back.sub(&f).sup_norm() <= 1e-12);
}

#[test]
fn radial_derivative_of_collar_bump_matches_dense_sampling() {
    use crdisc_core::deformation::{bump_chi, BumpSpec};
    let g = grid(2048);
    let chi = bump_chi(&BumpSpec::at_antipode(PI / 8.0), &g).unwrap();
    let est = radial_derivative_at_one(&chi, 0.9).unwrap().value;
    // One-sided fourth-order difference of the extension along r at tau = 1.
    let ext = |r: f64| harmonic_extension(&chi, c(r, 0.0)).unwrap().re;
    let h = 1e-3;
    let fd = (25.0 * chi.vertex_value() - 48.0 * ext(1.0 - h) + 36.0 * ext(1.0 - 2.0 * h) - 16.0 * ext(1.0 - 3.0 * h)
        + 3.0 * ext(1.0 - 4.0 * h))
        / (12.0 * h);
    assert!(((est - fd) / fd).abs() < 1e-4, "est {est} fd {fd}");
}

#[test]
fn grid_spacing_examples() {
    assert_eq!(grid(256).theta(1), 2.0 * PI / 256.0);
    assert_eq!(grid(1024).spacing(), 2.0 * PI / 1024.0);
    assert_eq!(grid(256).tau(0), c(1.0, 0.0));
    assert!(CircleGrid::new(255).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn t1_twice_is_minus_identity_up_to_constant((a, b) in coeff_strategy(40)) {
        let g = grid(1024);
        let f = trig_poly(&g, &a, &b);
        let tt = hilbert_t1(&hilbert_t1(&f)).add(&f);
        prop_assert!(tt.max() - tt.min() <= 1e-10);
    }

    #[test]
    fn t1_vanishes_exactly_at_vertex(vals in prop::collection::vec(-10.0..10.0f64, 256)) {
        let g = grid(256);
        let f = RealFunction::new(&g, vals).unwrap();
        prop_assert_eq!(hilbert_t1(&f).vertex_value(), 0.0);
    }

    #[test]
    fn u_plus_i_t1u_is_holomorphic((a, b) in coeff_strategy(60), k in -5.0..5.0f64) {
        let g = grid(512);
        let u = trig_poly(&g, &a, &b);
        let v = hilbert_t1(&u).add(&RealFunction::constant(&g, k));
        prop_assert!(holomorphic_defect(&u.with_imag(&v)) <= 1e-10);
    }

    #[test]
    fn extension_at_centre_is_mean(vals in prop::collection::vec(-3.0..3.0f64, 256)) {
        let g = grid(256);
        let mean = vals.iter().sum::<f64>() / 256.0;
        let f = RealFunction::new(&g, vals).unwrap();
        let z = harmonic_extension(&f, c(0.0, 0.0)).unwrap();
        prop_assert!((z.re - mean).abs() <= 1e-12);
    }
}
