//! Matrix representation of `H` in a truncated oscillator basis.

use std::io::{self, Write};

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::scalar::{binomial, factorial, Scalar};

/// One term `c · (a†)^dagger_power a^a_power` of the normal-ordered `(a + a†)^i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderedTerm<T> {
    pub dagger_power: usize,
    pub a_power: usize,
    pub coefficient: T,
}

/// Normal-ordered expansion
/// `(a + a†)^i = Σ_k Σ_j i!/(2^k k!) (a†)^{i−2k−j} a^j / (j! (i−2k−j)!)`.
pub fn ordered_power<T: Scalar>(i: usize) -> Vec<OrderedTerm<T>> {
    let fi: T = factorial(i);
    let mut terms = Vec::new();
    for k in 0..=i / 2 {
        let pair = fi / (T::of(2.0).powi(k as i32) * factorial::<T>(k));
        for j in 0..=i - 2 * k {
            let m = i - 2 * k - j;
            terms.push(OrderedTerm {
                dagger_power: m,
                a_power: j,
                coefficient: pair / (factorial::<T>(j) * factorial::<T>(m)),
            });
        }
    }
    terms
}

/// `⟨t−j+m| (a†)^m a^j |t⟩ / (j! m!) = √(t! (t−j+m)!) / (j! (t−j)! m!)`.
///
/// Evaluated as `√(C(t,j) · C(t−j+m, m) / (j! m!))`, which stays finite for
/// any representable `t` since `j` and `m` never exceed the potential degree.
/// Returns `None` when `j > t` (the annihilators empty the state).
pub fn factorial_ratio<T: Scalar>(t: usize, j: usize, m: usize) -> Option<T> {
    if j > t {
        return None;
    }
    let u = t - j;
    let num = binomial::<T>(t, j) * binomial::<T>(u + m, m);
    let den = factorial::<T>(j) * factorial::<T>(m);
    Some((num / den).sqrt())
}

/// Dense symmetric matrix whose entries vanish outside a band.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricBandMatrix<T> {
    dim: usize,
    bandwidth: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymmetricBandMatrix<T> {
    pub fn zeros(dim: usize, bandwidth: usize) -> Self {
        Self {
            dim,
            bandwidth: bandwidth.min(dim.saturating_sub(1)),
            data: vec![T::zero(); dim * dim],
        }
    }

    /// Wraps a row-major dense matrix, checking exact symmetry and finiteness.
    pub fn from_dense(dim: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        let mut bandwidth = 0;
        for s in 0..dim {
            for t in 0..s {
                if data[s * dim + t] != data[t * dim + s] {
                    return Err(Error::InvalidArgument(format!(
                        "matrix is not symmetric at ({s}, {t})"
                    )));
                }
                if data[s * dim + t] != T::zero() {
                    bandwidth = bandwidth.max(s - t);
                }
            }
        }
        Ok(Self {
            dim,
            bandwidth,
            data,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    #[inline]
    pub fn get(&self, s: usize, t: usize) -> T {
        self.data[s * self.dim + t]
    }

    /// Sets both `(s, t)` and `(t, s)`.
    pub fn set(&mut self, s: usize, t: usize, value: T) {
        self.data[s * self.dim + t] = value;
        self.data[t * self.dim + s] = value;
    }

    pub fn row(&self, s: usize) -> &[T] {
        &self.data[s * self.dim..(s + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// `self + c·other`, entrywise.
    pub fn add_scaled(&self, c: T, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        Self {
            dim: self.dim,
            bandwidth: self.bandwidth.max(other.bandwidth),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + c * b)
                .collect(),
        }
    }

    /// Plain-text dump: one row per line, 17 significant digits.
    pub fn write_dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        for s in 0..self.dim {
            let line = self
                .row(s)
                .iter()
                .map(|x| format!("{:.16e}", x))
                .collect::<Vec<_>>()
                .join(" ");
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

fn kinetic_element<T: Scalar>(model: &Model<T>, r: T, s: usize, t: usize) -> T {
    let pref = model.kinetic_scale() / (T::of(4.0) * r * r);
    if s == t {
        pref * T::of_usize(2 * t + 1)
    } else if s + 2 == t {
        -pref * T::of_usize(t * (t - 1)).sqrt()
    } else if s == t + 2 {
        -pref * T::of_usize((t + 1) * (t + 2)).sqrt()
    } else {
        T::zero()
    }
}

/// `λ_i (r/√2)^i i!/(2^k k!)` for every nonzero `λ_i` and every `k`, indexed `[i][k]`.
fn potential_prefactors<T: Scalar>(model: &Model<T>, r: T) -> Vec<Vec<T>> {
    model
        .lambdas()
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            if l == T::zero() {
                return Vec::new();
            }
            let fi: T = factorial(i);
            // (r/√2)^i with the even part of the power of two taken exactly
            let mut li = l * r.powi(i as i32) / T::of(2.0).powi((i / 2) as i32);
            if i % 2 == 1 {
                li = li * T::FRAC_1_SQRT_2();
            }
            (0..=i / 2)
                .map(|k| li * fi / (T::of(2.0).powi(k as i32) * factorial::<T>(k)))
                .collect()
        })
        .collect()
}

/// `⟨s|H|t⟩` evaluated directly, without using symmetry.
pub fn matrix_element<T: Scalar>(model: &Model<T>, r: T, s: usize, t: usize) -> T {
    let pref = potential_prefactors(model, r);
    let mut acc = kinetic_element(model, r, s, t);
    for (i, by_k) in pref.iter().enumerate() {
        for (k, &c) in by_k.iter().enumerate() {
            for j in 0..=i - 2 * k {
                let m = i - 2 * k - j;
                if t + m != s + j {
                    continue;
                }
                if let Some(f) = factorial_ratio::<T>(t, j, m) {
                    acc = acc + c * f;
                }
            }
        }
    }
    acc
}

/// Assembles `⟨s|H|t⟩` for `s, t < N`.
///
/// Elements come from the untruncated operator algebra; rows and columns
/// at or beyond `N` are dropped afterwards. Only the lower triangle is
/// evaluated and then mirrored, so the result is exactly symmetric.
pub fn assemble<T: Scalar>(model: &Model<T>, basis: &BasisSpec<T>) -> Result<SymmetricBandMatrix<T>> {
    let n = basis.n_basis;
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "basis size must be at least 2, got {n}"
        )));
    }
    let r = basis.r0;
    let mut h = SymmetricBandMatrix::zeros(n, model.degree().max(2));
    let pref = potential_prefactors(model, r);

    for t in 0..n {
        let mut column = vec![T::zero(); h.bandwidth + 1];
        for (d, slot) in column.iter_mut().enumerate().take(3) {
            if t + d < n {
                *slot = kinetic_element(model, r, t + d, t);
            }
        }
        for (i, by_k) in pref.iter().enumerate() {
            for (k, &c) in by_k.iter().enumerate() {
                for j in 0..=i - 2 * k {
                    let m = i - 2 * k - j;
                    // lower triangle only: s = t + m − j ≥ t
                    if m < j || t + m - j >= n {
                        continue;
                    }
                    if let Some(f) = factorial_ratio::<T>(t, j, m) {
                        column[m - j] = column[m - j] + c * f;
                    }
                }
            }
        }
        for (d, &v) in column.iter().enumerate() {
            if t + d < n {
                h.set(t + d, t, v);
            }
        }
    }
    Ok(h)
}

/// Position operator `(r0/√2)(a + a†)` in the truncated basis.
pub fn position_operator<T: Scalar>(basis: &BasisSpec<T>) -> SymmetricBandMatrix<T> {
    let n = basis.n_basis;
    let mut x = SymmetricBandMatrix::zeros(n, 1);
    let scale = basis.r0 / T::SQRT_2();
    for t in 0..n - 1 {
        x.set(t + 1, t, scale * T::of_usize(t + 1).sqrt());
    }
    x
}
