//! Choice of the harmonic-oscillator basis: the pivot level `t` and the
//! length scale `r0` that minimises `⟨t|H|t⟩`.

use crate::error::{Error, Result};
use crate::model::Model;
use crate::scalar::{factorial, falling_factorial, Scalar};

/// Truncated oscillator basis `{|0⟩, …, |N−1⟩}` with length scale `r0`
/// (`m ω0 r0² = ħ`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSpec<T> {
    pub n_basis: usize,
    pub pivot: usize,
    pub r0: T,
}

/// How the pivot level is chosen from the truncation size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// `t = ⌊N/2⌋`.
    #[default]
    Half,
    /// `t = 0`, i.e. a variational Gaussian.
    Zero,
    Level(usize),
}

impl PivotRule {
    pub fn pivot(self, n_basis: usize) -> usize {
        match self {
            PivotRule::Half => pivot_choice(n_basis),
            PivotRule::Zero => 0,
            PivotRule::Level(t) => t,
        }
    }
}

impl<T: Scalar> BasisSpec<T> {
    /// Basis with `r0` solved from the stationarity condition in the pivot level.
    pub fn optimized(model: &Model<T>, n_basis: usize, rule: PivotRule) -> Result<Self> {
        check_size(n_basis)?;
        let pivot = rule.pivot(n_basis);
        if pivot >= n_basis {
            return Err(Error::InvalidArgument(format!(
                "pivot level {pivot} outside basis of size {n_basis}"
            )));
        }
        let r0 = optimize_r(model, pivot)?;
        Ok(Self {
            n_basis,
            pivot,
            r0,
        })
    }

    /// Basis with a caller-supplied length scale.
    pub fn with_scale(n_basis: usize, pivot: usize, r0: T) -> Result<Self> {
        check_size(n_basis)?;
        if !(r0 > T::zero()) || !r0.is_finite() {
            return Err(Error::InvalidArgument("basis scale must be positive".into()));
        }
        Ok(Self {
            n_basis,
            pivot,
            r0,
        })
    }

    pub fn r0_squared(&self) -> T {
        self.r0 * self.r0
    }
}

fn check_size(n_basis: usize) -> Result<()> {
    if n_basis < 2 {
        return Err(Error::InvalidArgument(format!(
            "basis size must be at least 2, got {n_basis}"
        )));
    }
    Ok(())
}

/// `t = ⌊N/2⌋`.
pub fn pivot_choice(n_basis: usize) -> usize {
    n_basis / 2
}

/// `⟨t|ξ^i|t⟩` for the dimensionless coordinate `ξ = q/r`, zero for odd `i`.
pub fn level_moment<T: Scalar>(i: usize, t: usize) -> T {
    if i % 2 == 1 {
        return T::zero();
    }
    let h = i / 2;
    let two = T::of(2.0);
    let fi: T = factorial(i);
    (0..=h)
        .map(|k| {
            // t!/(t-h+k)! vanishes when the lowering would pass the ground state
            let lowering: T = falling_factorial(t, h - k);
            if lowering == T::zero() {
                return T::zero();
            }
            let fk: T = factorial(k);
            let fhk: T = factorial(h - k);
            fi * lowering / (two.powi((h + k) as i32) * fk * fhk * fhk)
        })
        .sum()
}

fn check_scale<T: Scalar>(r: T) -> Result<()> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(Error::InvalidArgument("length scale r must be positive".into()));
    }
    Ok(())
}

/// `⟨t|H|t⟩` in the oscillator basis of length scale `r`.
pub fn expectation_in_level<T: Scalar>(model: &Model<T>, r: T, t: usize) -> Result<T> {
    check_scale(r)?;
    Ok(expectation_raw(model.lambdas(), model.kinetic_scale(), r, t))
}

/// `∂⟨t|H|t⟩/∂(r²)`; zero at the optimal scale.
pub fn stationarity_residual<T: Scalar>(model: &Model<T>, r: T, t: usize) -> Result<T> {
    check_scale(r)?;
    Ok(residual_raw(model.lambdas(), model.kinetic_scale(), r, t))
}

pub(crate) fn expectation_raw<T: Scalar>(lambdas: &[T], kinetic: T, r: T, t: usize) -> T {
    let level = T::of_usize(2 * t + 1);
    let kin = kinetic * level / (T::of(4.0) * r * r);
    let pot: T = lambdas
        .iter()
        .enumerate()
        .step_by(2)
        .filter(|(_, l)| **l != T::zero())
        .map(|(i, &l)| l * r.powi(i as i32) * level_moment::<T>(i, t))
        .sum();
    kin + pot
}

pub(crate) fn residual_raw<T: Scalar>(lambdas: &[T], kinetic: T, r: T, t: usize) -> T {
    let level = T::of_usize(2 * t + 1);
    let r2 = r * r;
    let kin = -kinetic * level / (T::of(4.0) * r2 * r2);
    let pot: T = lambdas
        .iter()
        .enumerate()
        .step_by(2)
        .skip(1)
        .filter(|(_, l)| **l != T::zero())
        .map(|(i, &l)| {
            T::of_usize(i / 2) * l * r.powi(i as i32 - 2) * level_moment::<T>(i, t)
        })
        .sum();
    kin + pot
}

const MAX_DOUBLINGS: usize = 60;

/// Optimal basis scale `r0 > 0` for pivot level `t`.
///
/// Closed form for harmonic models, a safeguarded Newton iteration on the
/// cubic in `r0²` for quartic ones, bracketing bisection otherwise.
pub fn optimize_r<T: Scalar>(model: &Model<T>, t: usize) -> Result<T> {
    match model.degree() {
        2 => Ok((model.kinetic_scale() / (T::of(2.0) * model.lambda(2)))
            .sqrt()
            .sqrt()),
        4 => quartic_r0_squared(model, t).map(|x| x.sqrt()),
        _ => bisect_r0(model, t),
    }
}

/// Coefficients `(A, B, C)` of `A x³ + B x² − C = 0`, `x = r0²`, for quartic models.
pub fn quartic_cubic_coefficients<T: Scalar>(model: &Model<T>, t: usize) -> (T, T, T) {
    let level = T::of_usize(2 * t + 1);
    let tt = T::of_usize(2 * t * t + 2 * t + 1);
    (
        T::of(6.0) * model.lambda(4) * tt,
        T::of(2.0) * model.lambda(2) * level,
        level * model.kinetic_scale(),
    )
}

fn quartic_r0_squared<T: Scalar>(model: &Model<T>, t: usize) -> Result<T> {
    let (a, b, c) = quartic_cubic_coefficients(model, t);
    let f = |x: T| (a * x + b) * x * x - c;
    let df = |x: T| (T::of(3.0) * a * x + T::of(2.0) * b) * x;

    let lambda2 = model.lambda(2).abs();
    let mut x = if lambda2 > T::zero() {
        (model.kinetic_scale() / (T::of(2.0) * lambda2)).sqrt()
    } else {
        T::one()
    };

    // f(0) = −C < 0 and f → +∞, so [lo, hi] always brackets the single positive root.
    let mut lo = T::zero();
    let mut hi = x;
    let mut doublings = 0;
    while f(hi) <= T::zero() {
        lo = hi;
        hi = hi * T::of(2.0);
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::RootNotBracketed {
                doublings: MAX_DOUBLINGS,
            });
        }
    }
    if x <= lo || x >= hi {
        x = (lo + hi) * T::of(0.5);
    }

    let tol = T::of(4.0) * T::EPS;
    for _ in 0..200 {
        let fx = f(x);
        if fx == T::zero() {
            return Ok(x);
        }
        if fx < T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let d = df(x);
        let newton = x - fx / d;
        let next = if d > T::zero() && newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) * T::of(0.5)
        };
        if (next - x).abs() <= tol * next.abs() || (hi - lo) <= tol * hi {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

fn bisect_r0<T: Scalar>(model: &Model<T>, t: usize) -> Result<T> {
    let res = |r: T| residual_raw(model.lambdas(), model.kinetic_scale(), r, t);
    let two = T::of(2.0);
    let (mut lo, mut hi) = (T::one(), T::one());
    let start = res(T::one());
    if start == T::zero() {
        return Ok(T::one());
    }
    let mut steps = 0;
    if start < T::zero() {
        while res(hi) < T::zero() {
            lo = hi;
            hi = hi * two;
            steps += 1;
            if steps > MAX_DOUBLINGS {
                return Err(Error::RootNotBracketed {
                    doublings: MAX_DOUBLINGS,
                });
            }
        }
    } else {
        while res(lo) > T::zero() {
            hi = lo;
            lo = lo / two;
            steps += 1;
            if steps > MAX_DOUBLINGS {
                return Err(Error::RootNotBracketed {
                    doublings: MAX_DOUBLINGS,
                });
            }
        }
    }
    let tol = T::of(1e-14).max(T::of(4.0) * T::EPS);
    while hi - lo > tol * hi {
        let mid = (lo + hi) * T::of(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if res(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * T::of(0.5))
}
