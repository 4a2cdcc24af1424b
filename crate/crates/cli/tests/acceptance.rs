//! Acceptance suite: one PASS/FAIL line per criterion on stdout, then an
//! assertion on the criterion. Lines go straight to the process stdout so
//! they show up whether or not the test harness captures output.

use std::f64::consts::PI;
use std::io::Write;

use crdisc::{run_experiment, validate_config, ExperimentResult};
use crdisc_core::bishop::{bishop_residual, solve_bishop, SolveOptions};
use crdisc_core::circle::{holomorphic_defect, hilbert_t1, CircleGrid, ComplexFunction, RealFunction};
use crdisc_core::manifolds::{model_sector_hypersurface, shared, FlatModel, PolynomialModel, Side};
use crdisc_core::sector::{sector_boundary, SectorSpec};
use num_complex::Complex64;
use serde_json::json;

fn report(n: u32, title: &str, pass: bool, detail: &str) {
    let line = format!("acceptance criterion {n} [{}] {title}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
}

fn experiment(mut cfg: serde_json::Value) -> ExperimentResult {
    let dir = tempfile::tempdir().unwrap();
    cfg["output_dir"] = json!(dir.path());
    let cfg = validate_config(&cfg.to_string()).unwrap();
    run_experiment(&cfg).unwrap()
}

fn metric(r: &ExperimentResult, key: &str) -> f64 {
    *r.metrics.get(key).unwrap_or_else(|| panic!("missing metric {key}"))
}

/// Deterministic coefficients in [-1, 1].
fn coeff(m: usize, salt: u64) -> f64 {
    let mut x = (m as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt;
    x ^= x >> 31;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 29;
    (x >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

#[test]
fn criterion_1_transform_exactness() {
    let g = CircleGrid::new(1024).unwrap();
    let deg = g.len() / 4;
    let mut worst = 0.0f64;
    for seed in 0..4u64 {
        let (a, b): (Vec<f64>, Vec<f64>) = (0..=deg).map(|m| (coeff(m, 2 * seed), coeff(m, 2 * seed + 1))).unzip();
        let f = RealFunction::from_angle(&g, |t| (0..=deg).map(|m| a[m] * (m as f64 * t).cos() + b[m] * (m as f64 * t).sin()).sum());
        // Conjugate series, shifted to vanish at tau = 1.
        let conj = |t: f64| (1..=deg).map(|m| a[m] * (m as f64 * t).sin() - b[m] * (m as f64 * t).cos()).sum::<f64>();
        let c0 = conj(0.0);
        let want = RealFunction::from_angle(&g, |t| conj(t) - c0);
        worst = worst.max(hilbert_t1(&f).sub(&want).sup_norm());
    }
    let cos_err = hilbert_t1(&RealFunction::from_angle(&g, f64::cos)).sub(&RealFunction::from_angle(&g, f64::sin)).sup_norm();
    let const_err = hilbert_t1(&RealFunction::constant(&g, 2.5)).sup_norm();
    let pass = worst <= 1e-10 && cos_err <= 1e-12 && const_err <= 1e-12;
    report(1, "transform exactness", pass, &format!("degree {deg} err {worst:.2e}, T1(cos)-sin {cos_err:.2e}, T1(const) {const_err:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_2_bishop_certification() {
    let c = Complex64::new;
    let g = CircleGrid::new(2048).unwrap();

    let flat = shared(FlatModel { d: 1, m: 1 });
    let w = vec![ComplexFunction::from_angle(&g, |t| c(0.1 * (1.0 - t.cos()), -0.1 * t.sin()))];
    let (disc, _) = solve_bishop(&flat, &w, &[0.25], &[c(0.0, 0.0)], None, &SolveOptions::default()).unwrap();
    let flat_ok = bishop_residual(&disc) == 0.0 && disc.u()[0].values().iter().all(|&x| x == 0.25);

    let (cc, rho) = (0.7, 0.3);
    let lewy = shared(PolynomialModel::from_w_terms(&[((1, 1), cc)]).unwrap());
    let w = vec![ComplexFunction::from_angle(&g, |t| c(rho * (t.cos() - 1.0), rho * t.sin()))];
    let (disc, _) = solve_bishop(&lewy, &w, &[0.0], &[c(0.0, 0.0)], None, &SolveOptions::default()).unwrap();
    let lewy_err = disc.u()[0].sub(&RealFunction::from_angle(&g, |t| 2.0 * cc * rho * rho * t.sin())).sup_norm();

    let h = shared(model_sector_hypersurface(3, 0.05, Side::Plus).unwrap());
    let w = sector_boundary(&SectorSpec::scalar(0.4, 0.05).unwrap(), &g);
    let (disc, rep) = solve_bishop(&h, &w, &[0.0], &[c(0.0, 0.0)], None, &SolveOptions::default()).unwrap();
    let cert = disc.certificate();
    let z_defect = holomorphic_defect(&disc.z()[0]);
    let w_defect = holomorphic_defect(&disc.w()[0]);
    let solve_ok = rep.converged && rep.final_residual <= 1e-10 && rep.picard_iterations <= 100;
    let invariants_ok = cert.attachment <= 1e-8 && z_defect <= 1e-8 && w_defect <= 1e-8;
    let pass = flat_ok && lewy_err <= 1e-10 && solve_ok && invariants_ok;
    report(
        2,
        "Bishop solver certification",
        pass,
        &format!(
            "flat exact {flat_ok}, closed form {lewy_err:.2e}, sector residual {:.2e} in {} Picard, attachment {:.2e}, defect U+iV {z_defect:.2e}, defect W {w_defect:.2e}",
            rep.final_residual, rep.picard_iterations, cert.attachment
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_3_regularity_law() {
    let r = experiment(json!({"name": "composition-regularity", "grid_N": 2048, "sector": {"alpha": 0.4, "scale": 0.05}}));
    report(
        3,
        "regularity of the composition",
        r.pass,
        &format!(
            "gamma {:.2}, fitted exponent of U' {:.3}, c1gamma drift N=2048..4096 {:.2}%",
            metric(&r, "gamma"),
            metric(&r, "holder_exponent"),
            100.0 * metric(&r, "c1gamma_drift")
        ),
    );
    assert!(r.pass);
}

#[test]
fn criterion_4_approximation_rate() {
    let r = experiment(json!({"name": "approximation-rate", "grid_N": 2048, "sector": {"alpha": 0.6, "scale": 0.05}, "nu_list": [8, 16, 32, 64, 128]}));
    let (f, radial) = (metric(&r, "f_gap_ratio"), metric(&r, "radial_gap_ratio"));
    report(
        4,
        "smooth approximation",
        r.pass,
        &format!("alpha' {:.2}: F gap ratio nu=128/8 {f:.3} (need <= 0.5), radial gap ratio {radial:.3} (need <= 0.1)", metric(&r, "alpha_prime")),
    );
    assert!(r.pass);
}

#[test]
fn criterion_5_derivative_law() {
    let r = experiment(json!({"name": "eq103", "grid_N": 2048, "sector": {"alpha": 0.4, "scale": 0.2}, "bump": {"width": PI / 8.0}}));
    report(
        5,
        "first-order deformation law",
        r.pass,
        &format!(
            "flat {:.1e}; model widths pi/4, pi/8, pi/16: {:.2e}, {:.2e}, {:.2e}",
            metric(&r, "flat_rel_error"),
            metric(&r, "rel_error_wide"),
            metric(&r, "rel_error"),
            metric(&r, "rel_error_narrow")
        ),
    );
    assert!(r.pass);
}

#[test]
fn criterion_6_dichotomy() {
    let r = experiment(json!({"name": "dichotomy", "grid_N": 2048, "etas": [0, 1e-3, 2e-3, 4e-3, 1e-2]}));
    report(
        6,
        "propagation versus obstruction",
        r.pass,
        &format!(
            "plus min response/eta {:.3e} (need >= 1e-3); minus boundary_min {:.1e}, interior gap {:.2e}, vertex_block min {:.2e}",
            metric(&r, "plus_min_response_ratio"),
            metric(&r, "minus_boundary_min"),
            metric(&r, "minus_interior_gap"),
            metric(&r, "minus_vertex_block_min")
        ),
    );
    assert!(r.pass);
}

#[test]
fn criterion_7_sweep_rank() {
    let r = experiment(json!({"name": "sweep-rank", "grid_N": 2048}));
    report(
        7,
        "swept manifold rank",
        r.pass,
        &format!(
            "rank {} (target {}), half step {}, gap ratio {:.2e}",
            metric(&r, "jacobian_rank"),
            metric(&r, "target_rank"),
            metric(&r, "jacobian_rank_half_step"),
            metric(&r, "gap_ratio")
        ),
    );
    assert!(r.pass);
}

#[test]
fn criterion_8_chain_transport() {
    let r = experiment(json!({"name": "chain-propagation", "grid_N": 2048}));
    report(
        8,
        "chain transport",
        r.pass,
        &format!("N vs 2N max diff {:.2e}, identity chain error {:e}", metric(&r, "refinement_diff"), metric(&r, "identity_error")),
    );
    assert!(r.pass);
}
