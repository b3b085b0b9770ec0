mod common;

use anharm::basis::expectation_in_level;
use anharm::hamiltonian::matrix_element;
use anharm::{assemble, eigh, BasisSpec, Model, PivotRule, SymmetricBandMatrix};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn eigh_matches_jacobi_on_seeded_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..20 {
        let n = rng.gen_range(3..=12);
        let a = random_symmetric(&mut rng, n);
        let expect = jacobi_eigenvalues(&a, n);
        let got = eigh(&SymmetricBandMatrix::from_dense(n, a).unwrap()).unwrap();
        for (x, y) in got.eigenvalues.iter().zip(&expect) {
            assert!((x - y).abs() <= 1e-11, "n={n}: {x} vs {y}");
        }
    }
}

#[test]
fn jacobi_oracle_sanity() {
    let ev = jacobi_eigenvalues(&[2.0, 1.0, 1.0, 2.0], 2);
    assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
}

#[test]
fn hermite_oracle_is_orthonormal() {
    for s in 0..6 {
        for t in 0..6 {
            let overlap: f64 = (0..8001)
                .map(|k| -12.0 + k as f64 * 24.0 / 8000.0)
                .map(|q| hermite_function(s, 0.7, q) * hermite_function(t, 0.7, q))
                .sum::<f64>()
                * 24.0
                / 8000.0;
            let want = if s == t { 1.0 } else { 0.0 };
            assert!((overlap - want).abs() < 1e-12, "{s} {t} {overlap}");
        }
    }
}

#[test]
fn matrix_elements_match_quadrature() {
    let models = [
        double_well(-2.0, 1.0),
        double_well(-4.0, 1.0).with_field(0.7),
        Model::new(vec![0.3, -0.5, 0.8, 0.2, 0.1, -0.05, 0.02], 1.3, 0.9).unwrap(),
    ];
    for model in &models {
        for n in [4, 7, 10] {
            let basis = BasisSpec::optimized(model, n, PivotRule::Half).unwrap();
            let h = assemble(model, &basis).unwrap();
            for s in 0..n {
                for t in 0..n {
                    let q = quadrature_element(model, basis.r0, s, t);
                    assert!((h.get(s, t) - q).abs() <= 1e-8, "n={n} ({s},{t}): {} vs {q}", h.get(s, t));
                    assert!((matrix_element(model, basis.r0, s, t) - q).abs() <= 1e-8);
                }
            }
        }
    }
}

#[test]
fn level_expectation_matches_quadrature() {
    let model = double_well(-2.0, 1.0);
    for r in [0.4, 0.58, 0.9] {
        for t in [0, 5, 20] {
            let want = quadrature_level_energy(&model, r, t);
            let got = expectation_in_level(&model, r, t).unwrap();
            assert!((got - want).abs() <= 1e-8 * (1.0 + want.abs()), "r={r} t={t}: {got} vs {want}");
        }
    }
}

#[test]
fn transition_element_matches_quadrature() {
    use anharm::perturbation::degenerate_slope;
    let fam = anharm::FieldFamily::new(double_well(-2.0, 1.0), 40, PivotRule::Half).unwrap();
    let res = fam.spectrum(0.0).unwrap();
    let r = fam.basis.r0;
    let psi = |n: usize, q: f64| -> f64 {
        res.coefficients(n).iter().enumerate().map(|(s, c)| c * hermite_function(s, r, q)).sum()
    };
    let h = 16.0 / 4000.0;
    let q01: f64 = (0..=4000).map(|k| -8.0 + k as f64 * h).map(|q| psi(0, q) * q * psi(1, q)).sum::<f64>() * h;
    assert!((q01.abs() + degenerate_slope(&res)).abs() < 1e-10, "{q01}");
    assert!((q01.abs() - 1.0832).abs() < 1e-3);
}
