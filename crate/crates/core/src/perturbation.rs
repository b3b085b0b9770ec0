//! Field response of the low-lying spectrum: second-order and degenerate
//! perturbation theory, the `tanh` interpolation between them, the large-field
//! asymptote, and local models around avoided crossings.

use crate::eigen::SpectralResult;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::scan::{FieldFamily, FieldScan};
use crate::search::golden_section;
use crate::wavefunction::{apply_position, position_matrix};

/// `⟨ψ_level|Q|ψ_m⟩` for every eigenstate `m` of the basis.
pub fn position_row<T: Scalar>(result: &SpectralResult<T>, level: usize) -> Vec<T> {
    let xv = apply_position(result.basis.r0, result.coefficients(level));
    (0..result.eigenvalues().len())
        .map(|m| {
            result
                .coefficients(m)
                .iter()
                .zip(&xv)
                .map(|(&a, &b)| a * b)
                .sum()
        })
        .collect()
}

/// Individual terms `|Q_{lm}|²/(E_l − E_m)` of the second-order sum; the
/// `m = level` entry is zero.
pub fn second_order_terms<T: Scalar>(result: &SpectralResult<T>, level: usize) -> Vec<T> {
    let e = result.eigenvalues();
    position_row(result, level)
        .into_iter()
        .enumerate()
        .map(|(m, q)| {
            if m == level {
                T::zero()
            } else {
                q * q / (e[level] - e[m])
            }
        })
        .collect()
}

/// Full second-order coefficient of `E_level(p)` in the field.
pub fn second_order_coefficient<T: Scalar>(result: &SpectralResult<T>, level: usize) -> T {
    second_order_terms(result, level).into_iter().sum()
}

/// `c1 = Σ_{m≠0} |Q_{0m}|²/(E_0 − E_m)`, the `p²` coefficient of `E_0(p)`.
pub fn second_order_c1<T: Scalar>(result: &SpectralResult<T>) -> T {
    second_order_coefficient(result, 0)
}

/// Two-level truncation `|Q_{01}|²/(E_0 − E_1)` of [`second_order_c1`].
pub fn single_term_c1<T: Scalar>(result: &SpectralResult<T>) -> T {
    let e = result.eigenvalues();
    let q01 = position_row(result, 0)[1];
    q01 * q01 / (e[0] - e[1])
}

/// `−|Q_{01}|`, the linear slope when the ground doublet is treated as degenerate.
pub fn degenerate_slope<T: Scalar>(result: &SpectralResult<T>) -> T {
    -position_row(result, 0)[1].abs()
}

/// Field grid `{−δ, −δ/2, 0, δ/2, δ}` needed by [`curvature_oracle`].
pub fn curvature_grid<T: Scalar>(delta: T) -> Vec<T> {
    let half = delta * T::of(0.5);
    vec![-delta, -half, T::zero(), half, delta]
}

/// Half the second derivative of `E_level(p)` at `p = 0` by central
/// differences with steps `δ` and `δ/2`, Richardson-extrapolated.
pub fn curvature_oracle<T: Scalar>(scan: &FieldScan<T>, level: usize, delta: T) -> Result<T> {
    let tol = delta * T::of(1e-6);
    let grid = curvature_grid(delta);
    let idx: Vec<usize> = grid
        .iter()
        .map(|&p| scan.index_of(p, tol))
        .collect::<Option<_>>()
        .ok_or(Error::InsufficientData {
            what: "curvature oracle (needs p = 0, ±δ/2, ±δ)",
            needed: 5,
            got: scan.p_values.len(),
        })?;
    if level >= scan.levels {
        return Err(Error::InvalidArgument(format!(
            "level {level} not in scan of {} levels",
            scan.levels
        )));
    }
    let e = |k: usize| scan.energies[level][idx[k]];
    let two = T::of(2.0);
    let half = delta * T::of(0.5);
    let coarse = (e(4) - two * e(2) + e(0)) / (two * delta * delta);
    let fine = (e(3) - two * e(2) + e(1)) / (two * half * half);
    Ok((T::of(4.0) * fine - coarse) / T::of(3.0))
}

/// `E_0(0) + a p tanh(ω p)`.
pub fn response_model<T: Scalar>(e0: T, a: T, omega: T, p: T) -> T {
    e0 + a * p * (omega * p).tanh()
}

/// Coefficients of the small/intermediate-field ground-state response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseCoefficients<T> {
    pub e0_at_zero: T,
    pub c1: T,
    pub q01_abs: T,
    pub a: T,
    /// `c1 / a`.
    pub omega: T,
}

impl<T: Scalar> ResponseCoefficients<T> {
    /// Parameter-free choice `a = −|Q01|`, `ω = c1/a`.
    pub fn from_perturbation(result: &SpectralResult<T>) -> Self {
        let c1 = second_order_c1(result);
        let q01_abs = -degenerate_slope(result);
        Self {
            e0_at_zero: result.eigenvalues()[0],
            c1,
            q01_abs,
            a: -q01_abs,
            omega: c1 / -q01_abs,
        }
    }

    /// Same, with `a` replaced by a fitted value.
    pub fn with_fitted_a(self, a: T) -> Self {
        Self {
            a,
            omega: self.c1 / a,
            ..self
        }
    }

    pub fn predict(&self, p: T) -> T {
        response_model(self.e0_at_zero, self.a, self.omega, p)
    }
}

/// Least-squares `a` in `shift(p) ≈ a p tanh((c1/a) p)`, searched on `[−3, −0.1]`.
pub fn fit_tanh_amplitude<T: Scalar>(p: &[T], shift: &[T], c1: T) -> Result<T> {
    if p.len() < 5 {
        return Err(Error::InsufficientData {
            what: "tanh fit window",
            needed: 5,
            got: p.len(),
        });
    }
    let objective = |a: T| -> T {
        p.iter()
            .zip(shift)
            .map(|(&x, &y)| {
                let r = y - a * x * (c1 / a * x).tanh();
                r * r
            })
            .sum()
    };
    let (a, _) = golden_section(objective, T::of(-3.0), T::of(-0.1), T::of(1e-10));
    Ok(a)
}

/// Fits `a` to the ground-state curve of `scan` over `0 ≤ p ≤ p_max`, with
/// `ω = c1/a` tied to the second-order coefficient.
pub fn fit_response_a<T: Scalar>(scan: &FieldScan<T>, c1: T, p_max: T) -> Result<T> {
    let zero = scan
        .index_of(T::zero(), T::of(1e-12))
        .ok_or_else(|| Error::InvalidArgument("fit needs the point p = 0 in the scan".into()))?;
    let e0 = scan.energies[0][zero];
    // grid points are sums of steps, so admit p_max up to rounding
    let edge = p_max + T::of(1e-9) * (T::one() + p_max.abs());
    let (p, e) = scan.window(0, T::zero(), edge);
    let shift: Vec<T> = e.iter().map(|&x| x - e0).collect();
    fit_tanh_amplitude(&p, &shift, c1)
}

/// Linear fit `E ≈ A + B p^{4/3}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticFit<T> {
    pub intercept: T,
    pub slope: T,
    pub max_residual: T,
}

pub fn asymptotic_fit_points<T: Scalar>(p: &[T], e: &[T]) -> Result<AsymptoticFit<T>> {
    if p.len() < 5 || p.len() != e.len() {
        return Err(Error::InsufficientData {
            what: "asymptotic fit",
            needed: 5,
            got: p.len().min(e.len()),
        });
    }
    let power = T::of(4.0) / T::of(3.0);
    let x: Vec<T> = p.iter().map(|&v| v.powf(power)).collect();
    let n = T::of_usize(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = e.iter().copied().sum::<T>() / n;
    let sxy: T = x.iter().zip(e).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let sxx: T = x.iter().map(|&a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = x
        .iter()
        .zip(e)
        .map(|(&a, &b)| (b - intercept - slope * a).abs())
        .fold(T::zero(), T::max);
    Ok(AsymptoticFit {
        intercept,
        slope,
        max_residual,
    })
}

/// Large-field fit of the ground-state curve in `scan`.
pub fn asymptotic_fit<T: Scalar>(scan: &FieldScan<T>) -> Result<AsymptoticFit<T>> {
    asymptotic_fit_points(&scan.p_values, &scan.energies[0])
}

/// Second-order expansions of two repelling levels about `p1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalModels<T> {
    pub p1: T,
    pub level_lo: usize,
    pub e_lo: T,
    pub e_hi: T,
    /// `⟨ψ_lo|Q|ψ_lo⟩` at `p1`.
    pub q_lo: T,
    /// `⟨ψ_hi|Q|ψ_hi⟩` at `p1`.
    pub q_hi: T,
    /// `|Q_{lo,hi}|²/(E_lo − E_hi)`.
    pub c2: T,
}

impl<T: Scalar> LocalModels<T> {
    pub fn level_hi(&self) -> usize {
        self.level_lo + 1
    }

    /// `E_lo(p1 + Δp) ≈ E_lo − Q_lo Δp + c2 Δp²`.
    ///
    /// The linear term follows from `∂H/∂p = −Q`.
    pub fn predict_lo(&self, dp: T) -> T {
        self.e_lo - self.q_lo * dp + self.c2 * dp * dp
    }

    /// `E_hi(p1 + Δp) ≈ E_hi − Q_hi Δp − c2 Δp²`.
    pub fn predict_hi(&self, dp: T) -> T {
        self.e_hi - self.q_hi * dp - self.c2 * dp * dp
    }
}

/// Local models for levels `level_lo` and `level_lo + 1` from the spectrum at `p1`.
pub fn local_models<T: Scalar>(
    result: &SpectralResult<T>,
    p1: T,
    level_lo: usize,
) -> Result<LocalModels<T>> {
    let hi = level_lo + 1;
    if hi >= result.eigenvalues().len() {
        return Err(Error::InvalidArgument(format!(
            "level {hi} outside basis of size {}",
            result.eigenvalues().len()
        )));
    }
    let q = position_matrix(result, hi + 1)?;
    let e = result.eigenvalues();
    let q12 = q.get(level_lo, hi);
    Ok(LocalModels {
        p1,
        level_lo,
        e_lo: e[level_lo],
        e_hi: e[hi],
        q_lo: q.get(level_lo, level_lo),
        q_hi: q.get(hi, hi),
        c2: q12 * q12 / (e[level_lo] - e[hi]),
    })
}

/// Located minimum of the gap between two adjacent levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingAnalysis<T> {
    pub p1: T,
    pub gap_min: T,
    pub models: LocalModels<T>,
}

impl<T: Scalar> CrossingAnalysis<T> {
    pub fn level_lo(&self) -> usize {
        self.models.level_lo
    }

    pub fn level_hi(&self) -> usize {
        self.models.level_hi()
    }
}

/// Number of coarse samples before golden-section refinement.
pub const COARSE_POINTS: usize = 41;

/// Finds the field `p1` in `bracket` where `E_{lo+1} − E_lo` is smallest.
///
/// A 41-point pre-scan picks the best interval, then golden-section search
/// narrows it to `|Δp| ≤ 1e-7`. A gap that is monotone (or flat) over the
/// whole bracket is reported as [`Error::NoCrossing`].
pub fn find_avoided_crossing<T: Scalar>(
    family: &FieldFamily<T>,
    level_lo: usize,
    bracket: (T, T),
) -> Result<CrossingAnalysis<T>> {
    let (lo, hi) = bracket;
    if !(lo < hi) {
        return Err(Error::InvalidArgument("bracket needs lo < hi".into()));
    }
    if level_lo + 1 >= family.basis.n_basis {
        return Err(Error::InvalidArgument(format!(
            "level {} outside basis of size {}",
            level_lo + 1,
            family.basis.n_basis
        )));
    }
    let gap_at = |p: T| -> Result<T> {
        let res = family.spectrum(p)?;
        let e = res.eigenvalues();
        Ok(e[level_lo + 1] - e[level_lo])
    };

    let step = (hi - lo) / T::of_usize(COARSE_POINTS - 1);
    let ps: Vec<T> = (0..COARSE_POINTS)
        .map(|k| if k + 1 == COARSE_POINTS { hi } else { lo + step * T::of_usize(k) })
        .collect();
    let gaps = ps.iter().map(|&p| gap_at(p)).collect::<Result<Vec<T>>>()?;

    let (imin, gmin) = gaps
        .iter()
        .copied()
        .enumerate()
        .fold((0, T::infinity()), |b, (i, g)| if g < b.1 { (i, g) } else { b });
    let gmax = gaps.iter().copied().fold(T::neg_infinity(), T::max);
    let flat = gmax - gmin <= T::of(1e-10) * (T::one() + gmax.abs());
    let non_increasing = gaps.windows(2).all(|w| w[1] <= w[0]);
    let non_decreasing = gaps.windows(2).all(|w| w[1] >= w[0]);
    if flat || non_increasing || non_decreasing {
        return Err(Error::NoCrossing {
            lo: level_lo,
            hi: level_lo + 1,
            from: lo.to_f64_lossy(),
            to: hi.to_f64_lossy(),
        });
    }

    let a = ps[imin.saturating_sub(1)];
    let b = ps[(imin + 1).min(COARSE_POINTS - 1)];
    let mut failure = None;
    let (p1, _) = golden_section(
        |p| match gap_at(p) {
            Ok(g) => g,
            Err(e) => {
                failure.get_or_insert(e);
                T::infinity()
            }
        },
        a,
        b,
        T::of(1e-7),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let res = family.spectrum(p1)?;
    let models = local_models(&res, p1, level_lo)?;
    Ok(CrossingAnalysis {
        p1,
        gap_min: models.e_hi - models.e_lo,
        models,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::PivotRule;
    use crate::model::{DoubleWellParams, Model};
    use crate::scan::{scan_field, uniform_grid, ScanConfig};

    fn well(alpha: f64) -> Model<f64> {
        Model::double_well(&DoubleWellParams::new(alpha, 1.0, 0.0).unwrap(), 1.0, 1.0).unwrap()
    }

    fn harmonic(l2: f64) -> Model<f64> {
        Model::new(vec![0.0, 0.0, l2], 1.0, 1.0).unwrap()
    }

    #[test]
    fn harmonic_second_order_is_exact() {
        for l2 in [0.3, 0.5, 2.0] {
            let fam = FieldFamily::new(harmonic(l2), 30, PivotRule::Half).unwrap();
            let res = fam.spectrum(0.0).unwrap();
            let exact = -1.0 / (4.0 * l2);
            assert!((second_order_c1(&res) - exact).abs() < 1e-12);
            assert!((single_term_c1(&res) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_kills_even_terms() {
        let fam = FieldFamily::new(well(-2.0), 40, PivotRule::Half).unwrap();
        let res = fam.spectrum(0.0).unwrap();
        for (m, term) in second_order_terms(&res, 0).iter().enumerate() {
            if m % 2 == 0 {
                assert!(term.abs() <= 1e-12, "m={m}: {term}");
            }
        }
        assert!(single_term_c1(&res) < 0.0);
        assert!(second_order_c1(&res) < single_term_c1(&res));
    }

    #[test]
    fn curvature_oracle_harmonic() {
        let l2: f64 = 0.5;
        let scan = scan_field(&harmonic(l2), &curvature_grid(1e-3), &ScanConfig::new(30, 1)).unwrap();
        let c = curvature_oracle(&scan, 0, 1e-3).unwrap();
        assert!((c + 1.0 / (4.0 * l2)).abs() < 1e-8, "{c}");
        let missing = scan_field(&harmonic(l2), &[0.0, 1e-3], &ScanConfig::new(30, 1)).unwrap();
        assert!(curvature_oracle(&missing, 0, 1e-3).is_err());
    }

    #[test]
    fn curvature_oracle_matches_full_sum_and_first_level_rises() {
        let base = well(-2.0);
        let scan = scan_field(&base, &curvature_grid(1e-3), &ScanConfig::new(40, 2)).unwrap();
        let fam = FieldFamily::new(base, 40, PivotRule::Half).unwrap();
        let res = fam.spectrum(0.0).unwrap();
        let oracle = curvature_oracle(&scan, 0, 1e-3).unwrap();
        assert!((oracle - second_order_c1(&res)).abs() < 1e-6);
        assert!(curvature_oracle(&scan, 1, 1e-3).unwrap() > 0.0);
        assert!(curvature_oracle(&scan, 2, 1e-3).is_err());
    }

    #[test]
    fn degenerate_slope_properties() {
        let fam = FieldFamily::new(well(-2.0), 40, PivotRule::Half).unwrap();
        let plus = degenerate_slope(&fam.spectrum(0.0).unwrap());
        assert!(plus < 0.0);

        let deep = FieldFamily::new(well(-8.0), 60, PivotRule::Half).unwrap();
        let slope = degenerate_slope(&deep.spectrum(0.0).unwrap());
        let well_pos = 8f64.sqrt();
        assert!((slope + well_pos).abs() < 0.05 * well_pos, "{slope}");
    }

    #[test]
    fn response_model_limits() {
        assert_eq!(response_model(-0.3, -0.9, 3.7, 0.0), -0.3);
        let (a, w, p): (f64, f64, f64) = (-0.8531, 3.9762, 1e-4);
        let v = response_model(0.0, a, w, p);
        assert!(((v - a * w * p * p) / (a * w * p * p)).abs() < 1e-7);
        // relative error of the quadratic term is (ωp)²/3
        assert!(((v - a * w * p * p) / (a * w * p * p)).abs() < (w * p).powi(2) / 3.0 * 1.01);
    }

    #[test]
    fn tanh_fit_recovers_synthetic_amplitude() {
        let c1 = -3.4;
        let a_true = -0.9;
        let p: Vec<f64> = (0..=60).map(|k| 0.01 * k as f64).collect();
        let shift: Vec<f64> = p.iter().map(|&x| response_model(0.0, a_true, c1 / a_true, x)).collect();
        let a = fit_tanh_amplitude(&p, &shift, c1).unwrap();
        assert!((a - a_true).abs() < 1e-8, "{a}");
        assert!(fit_tanh_amplitude(&p[..4], &shift[..4], c1).is_err());
    }

    #[test]
    fn asymptotic_fit_on_exact_law() {
        let p: Vec<f64> = (0..7).map(|k| 20.0 + 10.0 * k as f64).collect();
        let e: Vec<f64> = p.iter().map(|&x| 1.5 - 0.75 * x.powf(4.0 / 3.0)).collect();
        let fit = asymptotic_fit_points(&p, &e).unwrap();
        assert!((fit.slope + 0.75).abs() < 1e-12);
        assert!((fit.intercept - 1.5).abs() < 1e-9);
        assert!(asymptotic_fit_points(&p[..4], &e[..4]).is_err());
    }

    #[test]
    fn harmonic_has_no_crossing() {
        let fam = FieldFamily::new(harmonic(0.5), 20, PivotRule::Half).unwrap();
        match find_avoided_crossing(&fam, 0, (0.0, 1.0)) {
            Err(Error::NoCrossing { lo: 0, hi: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shallow_tunnel_splitting_is_gap_minimum() {
        let fam = FieldFamily::new(well(-2.0), 40, PivotRule::Half).unwrap();
        let found = find_avoided_crossing(&fam, 0, (-0.2, 0.2)).unwrap();
        assert!(found.p1.abs() < 1e-6, "{}", found.p1);
        let grid = uniform_grid(-0.2, 0.2, 0.01).unwrap();
        let scan = scan_field(&well(-2.0), &grid, &ScanConfig::new(40, 2)).unwrap();
        let min_gap = (0..grid.len())
            .map(|j| scan.energies[1][j] - scan.energies[0][j])
            .fold(f64::INFINITY, f64::min);
        assert!(found.gap_min <= min_gap + 1e-12);
        assert!(matches!(
            find_avoided_crossing(&fam, 0, (0.0, 0.2)),
            Err(Error::NoCrossing { .. })
        ));
    }

    #[test]
    fn local_model_signs() {
        let fam = FieldFamily::new(well(-4.0), 50, PivotRule::Half).unwrap();
        let res = fam.spectrum(0.70724).unwrap();
        let m = local_models(&res, 0.70724, 1).unwrap();
        assert!(m.c2 < 0.0);
        assert_eq!(m.predict_lo(0.0), m.e_lo);
        let d = 1e-3;
        let curv_lo = (m.predict_lo(d) + m.predict_lo(-d) - 2.0 * m.e_lo) / (2.0 * d * d);
        let curv_hi = (m.predict_hi(d) + m.predict_hi(-d) - 2.0 * m.e_hi) / (2.0 * d * d);
        assert!(curv_lo < 0.0 && curv_hi > 0.0);
        assert!(local_models(&res, 0.70724, 49).is_err());
    }
}
