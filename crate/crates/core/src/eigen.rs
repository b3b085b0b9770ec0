//! Dense symmetric eigensolver: Householder reduction to tridiagonal form
//! followed by implicit-shift QL iterations (EISPACK `tred2`/`tql2`).

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::hamiltonian::{assemble, SymmetricBandMatrix};
use crate::model::Model;
use crate::scalar::Scalar;

/// Iteration cap per eigenvalue in the QL phase.
pub const MAX_SWEEPS: usize = 50;

/// Full spectrum of a real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigendecomposition<T> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// `vectors[n * dim + s]` is component `s` of eigenvector `n`.
    vectors: Vec<T>,
    dim: usize,
}

impl<T: Scalar> Eigendecomposition<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coefficients of eigenvector `n`.
    pub fn vector(&self, n: usize) -> &[T] {
        &self.vectors[n * self.dim..(n + 1) * self.dim]
    }

    /// `max |VᵀV − I|`.
    pub fn orthonormality_defect(&self) -> T {
        let mut worst = T::zero();
        for a in 0..self.dim {
            for b in a..self.dim {
                let dot: T = self
                    .vector(a)
                    .iter()
                    .zip(self.vector(b))
                    .map(|(&x, &y)| x * y)
                    .sum();
                let target = if a == b { T::one() } else { T::zero() };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// `max |H v_n − E_n v_n|` for column `n`.
    pub fn residual(&self, matrix: &SymmetricBandMatrix<T>, n: usize) -> T {
        let v = self.vector(n);
        let e = self.eigenvalues[n];
        (0..self.dim)
            .map(|s| {
                let hv: T = matrix.row(s).iter().zip(v).map(|(&h, &x)| h * x).sum();
                (hv - e * v[s]).abs()
            })
            .fold(T::zero(), T::max)
    }
}

/// All eigenvalues (ascending) and orthonormal eigenvectors of `matrix`.
///
/// Each eigenvector is normalised so that its largest-magnitude component is
/// positive. The iteration is deterministic.
pub fn eigh<T: Scalar>(matrix: &SymmetricBandMatrix<T>) -> Result<Eigendecomposition<T>> {
    let n = matrix.dim();
    if matrix.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    if n == 0 {
        return Ok(Eigendecomposition {
            eigenvalues: Vec::new(),
            vectors: Vec::new(),
            dim: 0,
        });
    }
    let mut v = matrix.as_slice().to_vec();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tred2(n, &mut v, &mut d, &mut e);
    tql2(n, &mut v, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));

    let mut vectors = Vec::with_capacity(n * n);
    for &col in &order {
        let start = vectors.len();
        vectors.extend((0..n).map(|k| v[k * n + col]));
        let column = &mut vectors[start..];
        let pivot = column
            .iter()
            .copied()
            .fold(T::zero(), |best, x| if x.abs() > best.abs() { x } else { best });
        if pivot < T::zero() {
            column.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(Eigendecomposition {
        eigenvalues: order.iter().map(|&i| d[i]).collect(),
        vectors,
        dim: n,
    })
}

// Householder reduction; on exit `v` holds the accumulated transformation,
// `d` the diagonal and `e[1..]` the subdiagonal.
fn tred2<T: Scalar>(n: usize, v: &mut [T], d: &mut [T], e: &mut [T]) {
    let at = |r: usize, c: usize| r * n + c;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for dk in d.iter().take(i) {
            scale = scale + dk.abs();
        }
        if scale == T::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = T::zero();
                v[at(j, i)] = T::zero();
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk = *dk / scale;
                h = h + *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h = h - f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = T::zero();
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in j + 1..i {
                    g = g + v[at(k, j)] * d[k];
                    e[k] = e[k] + v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = T::zero();
            for j in 0..i {
                e[j] = e[j] / h;
                f = f + e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] = e[j] - hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] = v[at(k, j)] - (f * e[k] + g * d[k]);
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = T::zero();
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = T::one();
        let h = d[i + 1];
        if h != T::zero() {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = T::zero();
                for k in 0..=i {
                    g = g + v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] = v[at(k, j)] - g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = T::zero();
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = T::zero();
    }
    v[at(n - 1, n - 1)] = T::one();
    e[0] = T::zero();
}

// Implicit QL on the tridiagonal (d, e), rotating the columns of `v`.
fn tql2<T: Scalar>(n: usize, v: &mut [T], d: &mut [T], e: &mut [T]) -> Result<()> {
    let at = |r: usize, c: usize| r * n + c;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();

    let mut f = T::zero();
    let mut tst1 = T::zero();
    let eps = T::EPS;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_SWEEPS {
                    return Err(Error::NoConvergence {
                        index: l,
                        sweeps: MAX_SWEEPS,
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (T::of(2.0) * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[at(k, i + 1)];
                        v[at(k, i + 1)] = s * v[at(k, i)] + c * h;
                        v[at(k, i)] = c * v[at(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = T::zero();
    }
    Ok(())
}

/// Eigenstates of a model in a given oscillator basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult<T> {
    pub eigen: Eigendecomposition<T>,
    pub basis: BasisSpec<T>,
}

impl<T: Scalar> SpectralResult<T> {
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigen.eigenvalues
    }

    /// Basis coefficients of eigenstate `n`.
    pub fn coefficients(&self, n: usize) -> &[T] {
        self.eigen.vector(n)
    }
}

/// Assembles `H` in `basis` and diagonalises it.
pub fn solve<T: Scalar>(model: &Model<T>, basis: &BasisSpec<T>) -> Result<SpectralResult<T>> {
    let h = assemble(model, basis)?;
    Ok(SpectralResult {
        eigen: eigh(&h)?,
        basis: *basis,
    })
}

/// `(E0, E1, E1 − E0)`.
pub fn ground_state_pair<T: Scalar>(result: &SpectralResult<T>) -> (T, T, T) {
    let e = result.eigenvalues();
    (e[0], e[1], e[1] - e[0])
}
