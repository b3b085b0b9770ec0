#![allow(dead_code)]

use anharm::{DoubleWellParams, Model};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `αq²/2 + βq⁴/4`; unlike [`DoubleWellParams`] this also accepts `α ≥ 0`.
pub fn double_well(alpha: f64, beta: f64) -> Model<f64> {
    match DoubleWellParams::new(alpha, beta, 0.0) {
        Ok(params) => Model::double_well(&params, 1.0, 1.0).unwrap(),
        Err(_) => Model::new(vec![0.0, 0.0, alpha / 2.0, 0.0, beta / 4.0], 1.0, 1.0).unwrap(),
    }
}

/// Symmetric matrix with entries uniform in [-1, 1], row-major.
pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let x = rng.gen_range(-1.0..1.0);
            a[i * n + j] = x;
            a[j * n + i] = x;
        }
    }
    a
}

/// Cyclic Jacobi rotations; ascending eigenvalues.
pub fn jacobi_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j].powi(2))
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let kp = m[k * n + p];
                    let kq = m[k * n + q];
                    m[k * n + p] = c * kp - s * kq;
                    m[k * n + q] = s * kp + c * kq;
                }
                for k in 0..n {
                    let pk = m[p * n + k];
                    let qk = m[q * n + k];
                    m[p * n + k] = c * pk - s * qk;
                    m[q * n + k] = s * pk + c * qk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// Oscillator eigenfunction from the explicit physicists' Hermite polynomial.
pub fn hermite_function(n: usize, r: f64, q: f64) -> f64 {
    let x = q / r;
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    let h = match n {
        0 => h0,
        _ => {
            for k in 1..n {
                let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
                h0 = h1;
                h1 = h2;
            }
            h1
        }
    };
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    let norm = 1.0 / (2f64.powi(n as i32) * fact * std::f64::consts::PI.sqrt() * r).sqrt();
    norm * h * (-0.5 * x * x).exp()
}

fn trapezoid(half_width: f64, points: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = 2.0 * half_width / (points - 1) as f64;
    let mut sum = 0.0;
    for k in 0..points {
        let q = -half_width + k as f64 * h;
        let w = if k == 0 || k == points - 1 { 0.5 } else { 1.0 };
        sum += w * f(q);
    }
    sum * h
}

/// ⟨s|H|t⟩ by quadrature, using φ_t'' = ((q/r)² − (2t+1)) φ_t / r².
pub fn quadrature_element(model: &Model<f64>, r: f64, s: usize, t: usize) -> f64 {
    let kin = model.hbar() * model.hbar() / (2.0 * model.mass());
    trapezoid(16.0 * r, 8001, |q| {
        let x = q / r;
        let phi_t = hermite_function(t, r, q);
        let second = (x * x - (2 * t + 1) as f64) / (r * r) * phi_t;
        hermite_function(s, r, q) * (-kin * second + model.potential_value(q) * phi_t)
    })
}

/// ⟨t|H|t⟩ by quadrature.
pub fn quadrature_level_energy(model: &Model<f64>, r: f64, t: usize) -> f64 {
    quadrature_element(model, r, t, t)
}
