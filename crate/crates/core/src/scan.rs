//! Sweeps over the external field `p`, convergence studies in the basis size,
//! and the CSV form of a sweep.

use std::io::{self, BufRead, Write};

use rayon::prelude::*;

use crate::basis::{BasisSpec, PivotRule};
use crate::eigen::{solve, SpectralResult};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::perturbation::{fit_response_a, second_order_c1, single_term_c1};
use crate::scalar::Scalar;
use crate::wavefunction::position_diagonal;

/// A field-free model together with the basis used for every field value.
///
/// The optimal scale does not involve `λ1`, so one basis serves the whole
/// family `H(p) = H(0) − pQ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldFamily<T> {
    pub base: Model<T>,
    pub basis: BasisSpec<T>,
}

impl<T: Scalar> FieldFamily<T> {
    pub fn new(base: Model<T>, n_basis: usize, rule: PivotRule) -> Result<Self> {
        let basis = BasisSpec::optimized(&base, n_basis, rule)?;
        Ok(Self { base, basis })
    }

    pub fn model_at(&self, p: T) -> Model<T> {
        self.base.with_field(p)
    }

    pub fn spectrum(&self, p: T) -> Result<SpectralResult<T>> {
        solve(&self.model_at(p), &self.basis).map_err(|e| Error::ScanFailed {
            p: p.to_f64_lossy(),
            source: Box::new(e),
        })
    }
}

/// Lowest `levels` eigenvalues and diagonal position elements over a field grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldScan<T> {
    pub p_values: Vec<T>,
    pub levels: usize,
    /// `energies[n][j] = E_n(p_j)`.
    pub energies: Vec<Vec<T>>,
    /// `q_diag[n][j] = ⟨ψ_n|Q|ψ_n⟩` at `p_j`.
    pub q_diag: Vec<Vec<T>>,
    pub basis: BasisSpec<T>,
}

/// Knobs for [`scan_field`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub n_basis: usize,
    pub levels: usize,
    pub pivot: PivotRule,
    /// Re-solve for `r0` at every `p` instead of reusing one basis; diagnostic only.
    pub reoptimize_per_p: bool,
}

impl ScanConfig {
    pub fn new(n_basis: usize, levels: usize) -> Self {
        Self {
            n_basis,
            levels,
            pivot: PivotRule::Half,
            reoptimize_per_p: false,
        }
    }
}

/// `p_min, p_min + step, …` up to and including `p_max` (within rounding).
pub fn uniform_grid<T: Scalar>(p_min: T, p_max: T, step: T) -> Result<Vec<T>> {
    if !(step > T::zero()) || !(p_max >= p_min) {
        return Err(Error::InvalidArgument(
            "grid needs step > 0 and p_max >= p_min".into(),
        ));
    }
    let count = ((p_max - p_min) / step + T::of(1e-9))
        .floor()
        .to_usize()
        .ok_or_else(|| Error::InvalidArgument("grid too large".into()))?;
    Ok((0..=count).map(|k| p_min + step * T::of_usize(k)).collect())
}

/// Diagonalises `H(p)` for every `p` in an ascending grid.
///
/// `r0` is optimised once. Points are evaluated in parallel but stored in
/// grid order, so output does not depend on the thread count.
pub fn scan_field<T: Scalar>(base: &Model<T>, p_grid: &[T], config: &ScanConfig) -> Result<FieldScan<T>> {
    if p_grid.is_empty() {
        return Err(Error::InvalidArgument("field grid is empty".into()));
    }
    if p_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument(
            "field grid must be strictly ascending".into(),
        ));
    }
    if config.levels == 0 || config.levels * 4 > config.n_basis {
        return Err(Error::InvalidArgument(format!(
            "levels must be between 1 and N/4 = {}, got {}",
            config.n_basis / 4,
            config.levels
        )));
    }
    let family = FieldFamily::new(base.clone(), config.n_basis, config.pivot)?;
    let levels = config.levels;

    let per_point: Vec<(Vec<T>, Vec<T>)> = p_grid
        .par_iter()
        .map(|&p| {
            let res = if config.reoptimize_per_p {
                let model = family.model_at(p);
                BasisSpec::optimized(&model, config.n_basis, config.pivot)
                    .and_then(|b| solve(&model, &b))
                    .map_err(|e| Error::ScanFailed {
                        p: p.to_f64_lossy(),
                        source: Box::new(e),
                    })?
            } else {
                family.spectrum(p)?
            };
            Ok((
                res.eigenvalues()[..levels].to_vec(),
                position_diagonal(&res, levels),
            ))
        })
        .collect::<Result<_>>()?;

    let mut energies = vec![Vec::with_capacity(p_grid.len()); levels];
    let mut q_diag = vec![Vec::with_capacity(p_grid.len()); levels];
    for (e, q) in per_point {
        for n in 0..levels {
            energies[n].push(e[n]);
            q_diag[n].push(q[n]);
        }
    }
    Ok(FieldScan {
        p_values: p_grid.to_vec(),
        levels,
        energies,
        q_diag,
        basis: family.basis,
    })
}

impl<T: Scalar> FieldScan<T> {
    /// Index of the grid point equal to `p` within `tol`.
    pub fn index_of(&self, p: T, tol: T) -> Option<usize> {
        self.p_values.iter().position(|&x| (x - p).abs() <= tol)
    }

    /// `(p, E_level(p))` for grid points inside `[lo, hi]`.
    pub fn window(&self, level: usize, lo: T, hi: T) -> (Vec<T>, Vec<T>) {
        self.p_values
            .iter()
            .zip(&self.energies[level])
            .filter(|(p, _)| **p >= lo && **p <= hi)
            .map(|(&p, &e)| (p, e))
            .unzip()
    }

    /// CSV: header `p,E0,…,E{K−1},Q00,…,Q{K−1}{K−1}`, 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut header = vec!["p".to_string()];
        header.extend((0..self.levels).map(|n| format!("E{n}")));
        header.extend((0..self.levels).map(|n| format!("Q{n}{n}")));
        writeln!(out, "{}", header.join(","))?;
        for (j, p) in self.p_values.iter().enumerate() {
            let mut line = format!("{:.11e}", p);
            for column in self.energies.iter().chain(&self.q_diag) {
                line.push_str(&format!(",{:.11e}", column[j]));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    /// Reads a CSV written by [`FieldScan::write_csv`]. The basis is not part
    /// of the file and must be supplied.
    pub fn read_csv<R: BufRead>(input: R, basis: BasisSpec<T>) -> Result<Self> {
        let bad = |line: usize, what: String| {
            Error::InvalidArgument(format!("scan csv line {line}: {what}"))
        };
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| bad(1, "missing header".into()))?
            .map_err(|e| bad(1, e.to_string()))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.first() != Some(&"p") || cols.len().is_multiple_of(2) || cols.len() < 3 {
            return Err(bad(1, format!("unexpected header {header:?}")));
        }
        let levels = (cols.len() - 1) / 2;
        let mut scan = FieldScan {
            p_values: Vec::new(),
            levels,
            energies: vec![Vec::new(); levels],
            q_diag: vec![Vec::new(); levels],
            basis,
        };
        for (k, line) in lines.enumerate() {
            let lineno = k + 2;
            let line = line.map_err(|e| bad(lineno, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let values = line
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map(T::of)
                        .map_err(|e| bad(lineno, format!("{s:?}: {e}")))
                })
                .collect::<Result<Vec<T>>>()?;
            if values.len() != cols.len() {
                return Err(bad(
                    lineno,
                    format!("expected {} fields, got {}", cols.len(), values.len()),
                ));
            }
            scan.p_values.push(values[0]);
            for n in 0..levels {
                scan.energies[n].push(values[1 + n]);
                scan.q_diag[n].push(values[1 + levels + n]);
            }
        }
        Ok(scan)
    }
}

/// `max |(E_n(p+h) − E_n(p−h))/2h + Q_nn(p)|` over levels and interior points
/// of a uniform grid.
pub fn hellmann_feynman_check<T: Scalar>(scan: &FieldScan<T>) -> Result<T> {
    let p = &scan.p_values;
    if p.len() < 3 {
        return Err(Error::InsufficientData {
            what: "Hellmann-Feynman check",
            needed: 3,
            got: p.len(),
        });
    }
    let h = p[1] - p[0];
    let tol = T::of(1e-9) * (T::one() + h.abs());
    if p.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > tol) {
        return Err(Error::InvalidArgument("grid is not uniform".into()));
    }
    let mut worst = T::zero();
    for n in 0..scan.levels {
        let e = &scan.energies[n];
        for j in 1..p.len() - 1 {
            let slope = (e[j + 1] - e[j - 1]) / (p[j + 1] - p[j - 1]);
            worst = worst.max((slope + scan.q_diag[n][j]).abs());
        }
    }
    Ok(worst)
}

/// Fit window `p ∈ [0, p_max]` sampled with `step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWindow<T> {
    pub p_max: T,
    pub step: T,
}

/// One row of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow<T> {
    pub n_basis: usize,
    pub r0_squared: T,
    pub e0: T,
    pub e1: T,
    /// Full second-order coefficient.
    pub c1: T,
    /// Two-level approximation `|Q01|²/(E0 − E1)`.
    pub c1_single: T,
    pub a: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable<T> {
    pub rows: Vec<ConvergenceRow<T>>,
}

/// Spectrum and response coefficients for each basis size, with `t = ⌊N/2⌋`.
pub fn convergence_study<T: Scalar>(
    base: &Model<T>,
    n_list: &[usize],
    window: FitWindow<T>,
) -> Result<ConvergenceTable<T>> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "basis sizes must be strictly ascending".into(),
        ));
    }
    let grid = uniform_grid(T::zero(), window.p_max, window.step)?;
    let rows = n_list
        .iter()
        .map(|&n| {
            let family = FieldFamily::new(base.clone(), n, PivotRule::Half)?;
            let res = family.spectrum(T::zero())?;
            let c1 = second_order_c1(&res);
            let scan = scan_field(base, &grid, &ScanConfig::new(n, 1))?;
            let a = fit_response_a(&scan, c1, window.p_max)?;
            Ok(ConvergenceRow {
                n_basis: n,
                r0_squared: family.basis.r0_squared(),
                e0: res.eigenvalues()[0],
                e1: res.eigenvalues()[1],
                c1,
                c1_single: single_term_c1(&res),
                a,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ConvergenceTable { rows })
}

impl<T: Scalar> ConvergenceTable<T> {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "N,r0_squared,E0,E1,c1,c1_single,a")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
                r.n_basis, r.r0_squared, r.e0, r.e1, r.c1, r.c1_single, r.a
            )?;
        }
        Ok(())
    }
}
