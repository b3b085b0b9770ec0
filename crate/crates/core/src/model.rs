//! Polynomial oscillator Hamiltonians `H = P²/2m + Σ λ_i Q^i`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A validated one-dimensional Hamiltonian with polynomial potential.
///
/// Coefficients are stored densely from `λ_0`; trailing zeros are trimmed so
/// `lambdas().len() == degree() + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Model<T> {
    lambdas: Vec<T>,
    mass: T,
    hbar: T,
}

impl<T: Scalar> Model<T> {
    pub fn new(lambdas: Vec<T>, mass: T, hbar: T) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::InvalidModel("coefficient list is empty".into()));
        }
        if lambdas.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidModel("coefficients must be finite".into()));
        }
        if !(mass > T::zero()) || !mass.is_finite() {
            return Err(Error::InvalidModel("mass must be positive".into()));
        }
        if !(hbar > T::zero()) || !hbar.is_finite() {
            return Err(Error::InvalidModel("hbar must be positive".into()));
        }
        let degree = lambdas
            .iter()
            .rposition(|l| *l != T::zero())
            .ok_or_else(|| Error::InvalidModel("all coefficients are zero".into()))?;
        if degree < 2 || degree % 2 == 1 {
            return Err(Error::InvalidModel(format!(
                "degree must be even and at least 2, got {degree}"
            )));
        }
        if lambdas[degree] < T::zero() {
            return Err(Error::InvalidModel(
                "leading coefficient must be positive".into(),
            ));
        }
        let mut lambdas = lambdas;
        lambdas.truncate(degree + 1);
        Ok(Self {
            lambdas,
            mass,
            hbar,
        })
    }

    /// Double well `α Q²/2 + β Q⁴/4 − pQ`.
    pub fn double_well(params: &DoubleWellParams<T>, mass: T, hbar: T) -> Result<Self> {
        let quarter = T::of(0.25);
        let half = T::of(0.5);
        Self::new(
            vec![
                T::zero(),
                -params.p,
                params.alpha * half,
                T::zero(),
                params.beta * quarter,
            ],
            mass,
            hbar,
        )
    }

    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }

    pub fn lambda(&self, i: usize) -> T {
        self.lambdas.get(i).copied().unwrap_or_else(T::zero)
    }

    pub fn degree(&self) -> usize {
        self.lambdas.len() - 1
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    /// `ħ²/m`, the combination that sets the kinetic scale.
    pub fn kinetic_scale(&self) -> T {
        self.hbar * self.hbar / self.mass
    }

    /// True when every odd coefficient vanishes.
    pub fn is_even(&self) -> bool {
        self.lambdas.iter().skip(1).step_by(2).all(|l| *l == T::zero())
    }

    /// The same system with an extra linear term `−pQ` on top of the current one.
    pub fn with_field(&self, p: T) -> Self {
        let mut lambdas = self.lambdas.clone();
        lambdas[1] = lambdas[1] - p;
        Self {
            lambdas,
            mass: self.mass,
            hbar: self.hbar,
        }
    }

    /// `V(q) = Σ λ_i q^i` by Horner's rule.
    pub fn potential_value(&self, q: T) -> T {
        self.lambdas
            .iter()
            .rev()
            .fold(T::zero(), |acc, &l| acc * q + l)
    }
}

/// Parameters of the tilted double well `α Q²/2 + β Q⁴/4 − pQ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleWellParams<T> {
    pub alpha: T,
    pub beta: T,
    pub p: T,
}

impl<T: Scalar> DoubleWellParams<T> {
    pub fn new(alpha: T, beta: T, p: T) -> Result<Self> {
        if !(alpha < T::zero()) {
            return Err(Error::InvalidModel("alpha must be negative".into()));
        }
        if !(beta > T::zero()) {
            return Err(Error::InvalidModel(
                "leading coefficient must be positive".into(),
            ));
        }
        if !p.is_finite() {
            return Err(Error::InvalidModel("field strength must be finite".into()));
        }
        Ok(Self { alpha, beta, p })
    }

    /// Classical minima `±√(−α/β)` of the untilted well.
    pub fn well_position(&self) -> T {
        (-self.alpha / self.beta).sqrt()
    }
}

/// Large-field well depth `−(3/4)(4λ₄)^{−1/3} p^{4/3}` of `λ₄Q⁴ − pQ`.
pub fn well_depth_asymptotic<T: Scalar>(lambda4: T, p: T) -> Result<T> {
    if !(lambda4 > T::zero()) {
        return Err(Error::InvalidArgument("lambda4 must be positive".into()));
    }
    if !(p > T::zero()) {
        return Err(Error::InvalidArgument("p must be positive".into()));
    }
    let third = T::one() / T::of(3.0);
    Ok(-T::of(0.75) * (T::of(4.0) * lambda4).powf(-third) * p.powf(T::of(4.0) * third))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shallow(p: f64) -> Model<f64> {
        Model::double_well(&DoubleWellParams::new(-2.0, 1.0, p).unwrap(), 1.0, 1.0).unwrap()
    }

    #[test]
    fn harmonic_model() {
        let m = Model::new(vec![0.0, 0.0, 0.5], 1.0, 1.0).unwrap();
        assert_eq!(m.degree(), 2);
        assert!(m.is_even());
    }

    #[test]
    fn explicit_shallow_well_in_field() {
        let m = Model::new(vec![0.0, -0.2, -1.0, 0.0, 0.25], 1.0, 1.0).unwrap();
        assert_eq!(m.degree(), 4);
        assert_eq!(m, shallow(0.2));
    }

    #[test]
    fn rejects_unbounded_and_unphysical() {
        let err = Model::new(vec![0.0, 0.0, 1.0, 0.0, -1.0], 1.0, 1.0).unwrap_err();
        assert_eq!(
            err,
            Error::InvalidModel("leading coefficient must be positive".into())
        );
        assert!(Model::new(vec![0.0, 0.0, 0.0, 1.0], 1.0, 1.0).is_err());
        assert!(Model::new(vec![0.0, 1.0], 1.0, 1.0).is_err());
        assert!(Model::<f64>::new(vec![], 1.0, 1.0).is_err());
        assert!(Model::new(vec![0.0, 0.0, 0.5], 0.0, 1.0).is_err());
        assert!(Model::new(vec![0.0, 0.0, 0.5], 1.0, -1.0).is_err());
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let m = Model::new(vec![0.0, 0.0, 0.5, 0.0, 0.0], 1.0, 1.0).unwrap();
        assert_eq!(m.degree(), 2);
        assert_eq!(m.lambdas().len(), 3);
    }

    #[test]
    fn double_well_mapping() {
        assert_eq!(shallow(0.0).lambdas(), &[0.0, 0.0, -1.0, 0.0, 0.25]);
        let deep = DoubleWellParams::new(-4.0, 1.0, 0.70724).unwrap();
        let m = Model::double_well(&deep, 1.0, 1.0).unwrap();
        assert_eq!(m.lambdas(), &[0.0, -0.70724, -2.0, 0.0, 0.25]);

        let (a, b) = (shallow(0.3), shallow(-0.3));
        assert_eq!(a.lambda(1), -b.lambda(1));
        assert_eq!(&a.lambdas()[2..], &b.lambdas()[2..]);
        assert!(DoubleWellParams::new(2.0, 1.0, 0.0).is_err());
        assert!(DoubleWellParams::new(-2.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn with_field_adds_linear_term() {
        assert_eq!(shallow(0.0).with_field(0.2), shallow(0.2));
    }

    #[test]
    fn potential_values() {
        let m = shallow(0.0);
        assert_eq!(m.potential_value(0.0), 0.0);
        assert!((m.potential_value(2f64.sqrt()) + 1.0).abs() < 1e-15);
        for q in [0.1, 0.7, 1.3, 2.9] {
            assert_eq!(m.potential_value(q), m.potential_value(-q));
        }
    }

    #[test]
    fn asymptotic_prefactor() {
        let pref: f64 = well_depth_asymptotic(1.0, 1.0).unwrap();
        assert!((pref + 0.47247).abs() < 5e-6, "{pref}");
        assert!((pref - (-0.4725)).abs() < 5e-5);
        assert!(well_depth_asymptotic(0.25f64, 1e-12).unwrap().abs() < 1e-15);
        assert!(well_depth_asymptotic(0.25, 0.0).is_err());
        assert!(well_depth_asymptotic(0.0, 1.0).is_err());
    }

    fn grid_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
        // coarse grid then a fine grid around the best point
        let coarse = 20_000;
        let h = (hi - lo) / coarse as f64;
        let best = (0..=coarse)
            .map(|k| lo + h * k as f64)
            .min_by(|a, b| f(*a).total_cmp(&f(*b)))
            .unwrap();
        let fine = 20_000;
        let h2 = 2.0 * h / fine as f64;
        (0..=fine)
            .map(|k| f(best - h + h2 * k as f64))
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn asymptotic_depth_matches_grid_minimum() {
        let exact = grid_min(|q| 0.25 * q.powi(4) - 8.0 * q, 0.0, 5.0);
        let formula = well_depth_asymptotic(0.25, 8.0).unwrap();
        assert!(((exact - formula) / exact).abs() < 1e-6);
    }

    #[test]
    fn asymptotic_depth_bounds_full_potential() {
        for p in [10.0, 100.0] {
            let m = shallow(p);
            let exact = grid_min(|q| m.potential_value(q), -20.0, 20.0);
            assert!(well_depth_asymptotic(0.25, p).unwrap() >= exact);
        }
    }

    #[test]
    fn generic_over_f32() {
        let m = Model::<f32>::new(vec![0.0, 0.0, -1.0, 0.0, 0.25], 1.0, 1.0).unwrap();
        assert!((m.potential_value(2f32.sqrt()) + 1.0).abs() < 1e-6);
    }
}
