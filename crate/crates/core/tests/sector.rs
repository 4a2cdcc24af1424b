mod common;

use common::{c, grid, sector};
use crdisc_core::circle::ComplexFunction;
use crdisc_core::manifolds::{shared, FlatModel, Side};
use crdisc_core::sector::*;
use crdisc_core::spaces::{centered_second_derivative, f2alpha_norm};
use std::f64::consts::PI;

fn datum_norm(w: &[ComplexFunction], alpha: f64) -> f64 {
    w.iter().map(|f| f2alpha_norm(&f.re(), alpha).unwrap().total + f2alpha_norm(&f.im(), alpha).unwrap().total).sum()
}

const NU_LIST: [f64; 5] = [8.0, 16.0, 32.0, 64.0, 128.0];

#[test]
fn log_branch_is_principal() {
    let g = grid(4096);
    for j in 1..g.len() {
        let arg = (c(1.0, 0.0) - g.tau(j)).ln().im;
        assert!(arg > -PI / 2.0 && arg < PI / 2.0);
    }
}

#[test]
fn approximants_are_uniformly_bounded() {
    let g = grid(2048);
    let spec = SectorSpec::scalar(0.6, 0.1).unwrap();
    let w = sector_boundary(&spec, &g);
    let base = datum_norm(&w, 0.6);
    for nu in NU_LIST {
        let wn = smooth_approximant(&spec, &g, nu).unwrap();
        assert!(datum_norm(&wn, 0.6) <= 2.0 * base, "nu={nu}");
    }
}

#[test]
fn approximant_second_derivative_grows_with_nu() {
    let g = grid(4096);
    let spec = SectorSpec::scalar(0.6, 0.1).unwrap();
    let mut last = 0.0;
    for nu in NU_LIST {
        let wn = &smooth_approximant(&spec, &g, nu).unwrap()[0];
        let d2 = centered_second_derivative(&wn.re()).sup_norm().max(centered_second_derivative(&wn.im()).sup_norm());
        assert!(d2.is_finite() && d2 > last, "nu={nu}: {d2}");
        last = d2;
    }
}

#[test]
fn approximants_converge_pointwise_and_in_sup() {
    let g = grid(2048);
    let spec = SectorSpec::scalar(0.6, 0.1).unwrap();
    let w = &sector_boundary(&spec, &g)[0];
    let sup = |nu: f64| smooth_approximant(&spec, &g, nu).unwrap()[0].sub(w).sup_norm();
    assert!(sup(64.0) < sup(8.0));
    let j = g.antipode();
    let at = |nu: f64| (smooth_approximant(&spec, &g, nu).unwrap()[0].at(j) - w.at(j)).norm();
    assert!(at(1e4) < at(1e2) && at(1e2) < at(10.0));
}

#[test]
fn f_gap_halves_from_nu_8_to_128() {
    let g = grid(4096);
    let spec = SectorSpec::scalar(0.6, 0.1).unwrap();
    let w = sector_boundary(&spec, &g);
    let err = |nu: f64| approximation_error(&w, &smooth_approximant(&spec, &g, nu).unwrap(), 0.55).unwrap();
    assert!(err(128.0) < err(8.0) / 2.0);
    assert_eq!(approximation_error(&w, &w, 0.55).unwrap(), 0.0);
}

#[test]
fn smooth_datum_error_decays_like_one_over_nu() {
    let g = grid(2048);
    let spec = SectorSpec::scalar(1.0, 0.1).unwrap();
    let w = sector_boundary(&spec, &g);
    let ks: Vec<f64> = NU_LIST
        .iter()
        .map(|&nu| nu * approximation_error(&w, &smooth_approximant(&spec, &g, nu).unwrap(), 0.5).unwrap())
        .collect();
    // nu * error stays within a factor 2 over a 16-fold range of nu.
    let k = ks.iter().cloned().fold(0.0, f64::max);
    assert!(k.is_finite() && ks.iter().cloned().fold(f64::INFINITY, f64::min) > 0.5 * k, "K values {ks:?}");
}

#[test]
fn flat_model_has_no_gaps() {
    let g = grid(1024);
    let spec = SectorSpec::scalar(0.6, 0.1).unwrap();
    let t = convergence_study(&spec, &shared(FlatModel { d: 1, m: 1 }), 3, &NU_LIST, 0.55, &g).unwrap();
    for row in &t.rows {
        assert!(row.converged);
        assert_eq!((row.c1gamma_gap, row.radial_gap), (0.0, 0.0));
    }
}

#[test]
fn sector_model_c1beta_gap_decreases() {
    let g = grid(2048);
    let spec = SectorSpec::scalar(0.4, 0.05).unwrap();
    let t = convergence_study(&spec, &sector(3, Side::Plus), 3, &NU_LIST, 0.38, &g).unwrap();
    assert!(t.rows.iter().all(|r| r.converged));
    for w in t.rows.windows(2) {
        assert!(w[1].c1gamma_gap < w[0].c1gamma_gap, "{:?}", t.rows);
    }
}

#[test]
fn sector_model_radial_gap_shrinks_tenfold() {
    let g = grid(2048);
    let spec = SectorSpec::scalar(0.4, 0.05).unwrap();
    let t = convergence_study(&spec, &sector(3, Side::Plus), 3, &NU_LIST, 0.38, &g).unwrap();
    let first = t.rows[0].radial_gap;
    let last = t.rows[4].radial_gap;
    assert!(last <= 0.1 * first, "radial gap {first:e} -> {last:e} (ratio {:.3})", last / first);
}
