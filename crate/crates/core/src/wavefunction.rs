//! Position-space wavefunctions and position-operator matrix elements.

use std::io::{self, Write};

use crate::eigen::SpectralResult;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Normalised oscillator eigenfunctions `φ_0(q) … φ_{count−1}(q)` of length scale `r0`.
///
/// Uses the three-term recurrence on the normalised functions,
/// `φ_{n+1} = √(2/(n+1)) ξ φ_n − √(n/(n+1)) φ_{n−1}` with `ξ = q/r0`,
/// so no Hermite polynomial is ever formed explicitly.
pub fn ho_functions<T: Scalar>(count: usize, r0: T, q: T) -> Vec<T> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let xi = q / r0;
    let phi0 = (T::PI() * r0 * r0).powf(T::of(-0.25)) * (-(xi * xi) * T::of(0.5)).exp();
    out.push(phi0);
    if count == 1 {
        return out;
    }
    out.push(T::SQRT_2() * xi * phi0);
    for n in 1..count - 1 {
        let nf = T::of_usize(n);
        let next = (T::of(2.0) / (nf + T::one())).sqrt() * xi * out[n]
            - (nf / (nf + T::one())).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// `φ_s(q)` for one index.
pub fn ho_function<T: Scalar>(s: usize, r0: T, q: T) -> T {
    ho_functions(s + 1, r0, q)[s]
}

/// Uniform grid `q_min, …, q_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub q_min: T,
    pub q_max: T,
    pub n_points: usize,
}

impl<T: Scalar> GridSpec<T> {
    pub fn new(q_min: T, q_max: T, n_points: usize) -> Result<Self> {
        if !(q_min < q_max) {
            return Err(Error::InvalidArgument("grid needs q_min < q_max".into()));
        }
        if n_points < 2 {
            return Err(Error::InvalidArgument("grid needs at least 2 points".into()));
        }
        Ok(Self {
            q_min,
            q_max,
            n_points,
        })
    }

    /// `[−5, 5]` with 1001 points.
    pub fn figure_default() -> Self {
        Self {
            q_min: T::of(-5.0),
            q_max: T::of(5.0),
            n_points: 1001,
        }
    }

    pub fn step(&self) -> T {
        (self.q_max - self.q_min) / T::of_usize(self.n_points - 1)
    }

    pub fn points(&self) -> Vec<T> {
        let h = self.step();
        (0..self.n_points)
            .map(|k| {
                if k + 1 == self.n_points {
                    self.q_max
                } else {
                    self.q_min + h * T::of_usize(k)
                }
            })
            .collect()
    }
}

/// `ψ_n(q) = Σ_s c_{n,s} φ_s(q)` on every grid point.
pub fn eigenstate_on_grid<T: Scalar>(
    result: &SpectralResult<T>,
    n: usize,
    grid: &GridSpec<T>,
) -> Vec<T> {
    let c = result.coefficients(n);
    grid.points()
        .into_iter()
        .map(|q| {
            ho_functions(c.len(), result.basis.r0, q)
                .iter()
                .zip(c)
                .map(|(&phi, &ci)| phi * ci)
                .sum()
        })
        .collect()
}

/// Several eigenstates tabulated on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionGrid<T> {
    pub grid: GridSpec<T>,
    pub q: Vec<T>,
    /// `values[n][k] = ψ_n(q_k)`.
    pub values: Vec<Vec<T>>,
}

impl<T: Scalar> PositionGrid<T> {
    pub fn tabulate(result: &SpectralResult<T>, states: usize, grid: GridSpec<T>) -> Result<Self> {
        if states > result.eigenvalues().len() {
            return Err(Error::InvalidArgument(format!(
                "requested {states} states from a basis of {}",
                result.eigenvalues().len()
            )));
        }
        let q = grid.points();
        let n_basis = result.basis.n_basis;
        let mut values = vec![Vec::with_capacity(q.len()); states];
        for &x in &q {
            let phis = ho_functions(n_basis, result.basis.r0, x);
            for (n, column) in values.iter_mut().enumerate() {
                column.push(
                    phis.iter()
                        .zip(result.coefficients(n))
                        .map(|(&p, &c)| p * c)
                        .sum(),
                );
            }
        }
        Ok(Self { grid, q, values })
    }

    /// CSV with header `q,psi_0,psi_1,…` and 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let header = std::iter::once("q".to_string())
            .chain((0..self.values.len()).map(|n| format!("psi_{n}")))
            .collect::<Vec<_>>()
            .join(",");
        writeln!(out, "{header}")?;
        for (k, q) in self.q.iter().enumerate() {
            let mut line = format!("{:.11e}", q);
            for column in &self.values {
                line.push_str(&format!(",{:.11e}", column[k]));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// `Q_{mn} = ⟨ψ_m|Q|ψ_n⟩` for the lowest `k` eigenstates.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionMatrix<T> {
    k: usize,
    elements: Vec<T>,
}

impl<T: Scalar> PositionMatrix<T> {
    pub fn size(&self) -> usize {
        self.k
    }

    pub fn get(&self, m: usize, n: usize) -> T {
        self.elements[m * self.k + n]
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.k).map(|n| self.get(n, n)).collect()
    }
}

/// `X v` with `X = (r0/√2)(a + a†)` truncated to the basis.
pub(crate) fn apply_position<T: Scalar>(r0: T, v: &[T]) -> Vec<T> {
    let scale = r0 / T::SQRT_2();
    let n = v.len();
    (0..n)
        .map(|s| {
            let down = if s > 0 {
                T::of_usize(s).sqrt() * v[s - 1]
            } else {
                T::zero()
            };
            let up = if s + 1 < n {
                T::of_usize(s + 1).sqrt() * v[s + 1]
            } else {
                T::zero()
            };
            scale * (down + up)
        })
        .collect()
}

/// Position matrix in the eigenbasis, `Vᵀ X V` restricted to `k × k`.
pub fn position_matrix<T: Scalar>(
    result: &SpectralResult<T>,
    k: usize,
) -> Result<PositionMatrix<T>> {
    let n_states = result.eigenvalues().len();
    if k > n_states {
        return Err(Error::InvalidArgument(format!(
            "requested {k} states from a basis of {n_states}"
        )));
    }
    let xv: Vec<Vec<T>> = (0..k)
        .map(|n| apply_position(result.basis.r0, result.coefficients(n)))
        .collect();
    let mut elements = vec![T::zero(); k * k];
    for m in 0..k {
        for n in m..k {
            let value: T = result
                .coefficients(m)
                .iter()
                .zip(&xv[n])
                .map(|(&a, &b)| a * b)
                .sum();
            elements[m * k + n] = value;
            elements[n * k + m] = value;
        }
    }
    Ok(PositionMatrix { k, elements })
}

/// `⟨ψ_n|Q|ψ_n⟩` for the lowest `k` states, without building the full matrix.
pub fn position_diagonal<T: Scalar>(result: &SpectralResult<T>, k: usize) -> Vec<T> {
    (0..k)
        .map(|n| {
            let c = result.coefficients(n);
            apply_position(result.basis.r0, c)
                .iter()
                .zip(c)
                .map(|(&a, &b)| a * b)
                .sum()
        })
        .collect()
}

/// Lowest-`k` states that keep at least `threshold` of their norm in the top
/// two basis functions, i.e. states the truncation is cutting off.
pub fn unconverged_states<T: Scalar>(
    result: &SpectralResult<T>,
    k: usize,
    threshold: T,
) -> Vec<usize> {
    (0..k.min(result.eigenvalues().len()))
        .filter(|&n| {
            let c = result.coefficients(n);
            let tail: T = c.iter().rev().take(2).map(|&x| x * x).sum();
            tail >= threshold
        })
        .collect()
}
