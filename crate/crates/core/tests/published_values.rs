//! Quoted numbers checked at the tolerances attached to them. Several of these
//! disagree with what the method produces; see the project notes.

mod common;

use anharm::perturbation::{curvature_grid, curvature_oracle, degenerate_slope, response_model};
use anharm::scan::{hellmann_feynman_check, uniform_grid};
use anharm::{
    convergence_study, find_avoided_crossing, fit_response_a, scan_field, second_order_c1, FieldFamily, FitWindow,
    PivotRule, ScanConfig,
};
use common::double_well;

fn shallow40() -> FieldFamily<f64> {
    FieldFamily::new(double_well(-2.0, 1.0), 40, PivotRule::Half).unwrap()
}

#[test]
fn c1_full_sum_at_n40() {
    let c1 = second_order_c1(&shallow40().spectrum(0.0).unwrap());
    assert!((c1 + 3.392128193573).abs() <= 1e-6, "c1 = {c1}");
}

#[test]
fn c1_curvature_oracle() {
    let scan = scan_field(&double_well(-2.0, 1.0), &curvature_grid(1e-3), &ScanConfig::new(40, 1)).unwrap();
    let c1 = curvature_oracle(&scan, 0, 1e-3).unwrap();
    assert!((c1 + 3.39213).abs() <= 1e-4, "oracle = {c1}");
}

#[test]
fn quoted_transition_element() {
    let slope = degenerate_slope(&shallow40().spectrum(0.0).unwrap());
    assert!((slope + 0.853104).abs() <= 1e-5, "-|Q01| = {slope}");
}

#[test]
fn caption_tanh_model_tracks_ground_state() {
    let grid = uniform_grid(0.0, 0.3, 0.01).unwrap();
    let scan = scan_field(&double_well(-2.0, 1.0), &grid, &ScanConfig::new(40, 1)).unwrap();
    let e0 = scan.energies[0][0];
    let worst = grid
        .iter()
        .zip(&scan.energies[0])
        .map(|(&p, &e)| (response_model(e0, -0.8531, 3.9762, p) - e).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 5e-3, "max deviation {worst}");
}

#[test]
fn fitted_amplitude_near_table_value() {
    let c1 = second_order_c1(&shallow40().spectrum(0.0).unwrap());
    let grid = uniform_grid(0.0, 0.6, 0.01).unwrap();
    let scan = scan_field(&double_well(-2.0, 1.0), &grid, &ScanConfig::new(40, 1)).unwrap();
    let a = fit_response_a(&scan, c1, 0.6).unwrap();
    assert!((a + 0.93).abs() <= 0.02, "a = {a}");
}

#[test]
fn fitted_amplitude_exceeds_transition_element() {
    let res = shallow40().spectrum(0.0).unwrap();
    let c1 = second_order_c1(&res);
    let grid = uniform_grid(0.0, 0.6, 0.01).unwrap();
    let scan = scan_field(&double_well(-2.0, 1.0), &grid, &ScanConfig::new(40, 1)).unwrap();
    let a = fit_response_a(&scan, c1, 0.6).unwrap();
    let q01 = -degenerate_slope(&res);
    assert!(a.abs() >= q01, "|a| = {} < |Q01| = {q01}", a.abs());
}

#[test]
fn deep_well_diagonal_elements() {
    let fam = FieldFamily::new(double_well(-4.0, 1.0), 50, PivotRule::Half).unwrap();
    let x = find_avoided_crossing(&fam, 1, (0.3, 1.2)).unwrap();
    assert!((x.p1 - 0.70724).abs() <= 1e-4);
    assert!((x.models.q_lo + 0.05912).abs() <= 2e-4);
    assert!((x.models.q_hi + 0.05902).abs() <= 2e-4);
    assert!((x.models.c2 + 39.30905).abs() <= 0.05);
    assert!(x.gap_min > 0.0);
}

#[test]
fn local_models_track_levels() {
    let fam = FieldFamily::new(double_well(-4.0, 1.0), 50, PivotRule::Half).unwrap();
    let x = find_avoided_crossing(&fam, 1, (0.3, 1.2)).unwrap();
    for k in -20..=20 {
        let dp = k as f64 * 1e-3;
        let e = fam.spectrum(x.p1 + dp).unwrap();
        let lo = (x.models.predict_lo(dp) - e.eigenvalues()[1]).abs();
        let hi = (x.models.predict_hi(dp) - e.eigenvalues()[2]).abs();
        assert!(lo.max(hi) <= 1e-3, "dp = {dp}: {lo:.2e} / {hi:.2e}");
    }
}

#[test]
fn hellmann_feynman_on_hundredth_grid() {
    let grid = uniform_grid(-0.5, 0.5, 0.01).unwrap();
    let scan = scan_field(&double_well(-2.0, 1.0), &grid, &ScanConfig::new(40, 2)).unwrap();
    let r = hellmann_feynman_check(&scan).unwrap();
    assert!(r <= 1e-4, "residual {r}");
}

#[test]
fn convergence_rows() {
    let table = convergence_study(&double_well(-2.0, 1.0), &[10, 20, 30, 40], FitWindow { p_max: 0.6, step: 0.01 }).unwrap();
    let r = &table.rows;
    assert!((r[0].r0_squared - 0.59).abs() < 0.005);
    assert!((r[0].e0 + 0.299479413549).abs() < 1e-11);
    assert!((r[0].e1 - 0.046558837188).abs() < 1e-11);
    assert!((r[2].e0 + 0.299521367416).abs() < 5e-13 && (r[3].e0 + 0.299521367416).abs() < 5e-13);
    assert!((r[0].e0 - r[3].e0).abs() > (r[1].e0 - r[3].e0).abs());
    // the two-level coefficient is the one the table lists; N = 10 is off by 4e-7
    let listed = [-3.390313017166, -3.392128162181, -3.392128193573, -3.392128193573];
    for (k, (row, c1)) in r.iter().zip(listed).enumerate() {
        let tol = if k == 0 { 1e-6 } else { 1e-9 };
        assert!((row.c1_single - c1).abs() < tol, "N={}: {}", row.n_basis, row.c1_single);
    }
}
