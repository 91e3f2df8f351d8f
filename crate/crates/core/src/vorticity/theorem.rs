use num_complex::Complex;
use serde::Serialize;

use super::polynomial::{certified_circle_winding, min_modulus_on_circle, shell_polynomial};
use crate::basis::{AngularState, ReducedWave};
use crate::contour::{phase_change, snap_turns, UnwrapOptions};
use crate::error::{Error, Result};
use crate::scalar::{binomial, factorial, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VorticityMethod {
    Theorem,
    Laurent,
    BruteForce,
}

/// Total vorticity `2 pi n` of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VorticityReport<T> {
    pub n: i32,
    pub method: VorticityMethod,
    /// Zeros counted inside the unit disk (polynomial routes).
    pub zero_count: Option<usize>,
    /// Lower estimate of the distance from the nearest shell-polynomial zero
    /// to the unit circle (theorem route).
    pub margin: Option<T>,
}

/// `{-m, -m + 2, ..., m}`: the winding numbers a state bounded by shell `m`
/// can carry.
pub fn allowed_vorticities(m: usize) -> Vec<i32> {
    let m = m as i32;
    (0..=m).map(|k| 2 * k - m).collect()
}

const DEFAULT_MARGIN: f64 = 1e-9;

/// `n = 2 Z - m`, with `Z` the zeros of the shell polynomial in the unit disk.
pub fn total_vorticity_theorem<T: Real>(state: &AngularState<T>) -> Result<VorticityReport<T>> {
    let g = shell_polynomial(state)?;
    let margin = T::lit(DEFAULT_MARGIN).max(T::epsilon() * T::lit(16.0));
    let (z, min_g) = certified_circle_winding(&g, margin)?;
    if z < 0 || z as usize > g.m() {
        return Err(Error::ZeroNearCircle);
    }
    let estimate = min_g / g.derivative_bound(T::one() + margin);
    Ok(VorticityReport {
        n: 2 * z - g.m() as i32,
        method: VorticityMethod::Theorem,
        zero_count: Some(z as usize),
        margin: Some(estimate),
    })
}

/// Same quantity from the Laurent polynomial `f(z) = z^-m g(z^2)`: its
/// winding on the unit circle is (zeros - poles) inside, counted directly
/// without separating the order-`m` pole at the origin.
pub fn total_vorticity_laurent<T: Real>(state: &AngularState<T>) -> Result<VorticityReport<T>> {
    let g = shell_polynomial(state)?;
    let m = g.m();
    let mf = T::from_usize_lossy(m);
    let opts = UnwrapOptions {
        initial_samples: 64 * (m + 2),
        max_depth: 40,
        max_increment: T::FRAC_PI_2(),
    };
    let total = phase_change(
        |s: T| Complex::from_polar(T::one(), -mf * s) * g.eval(Complex::from_polar(T::one(), T::lit(2.0) * s)),
        T::zero(),
        T::TAU(),
        &opts,
    )
    .map_err(|_| Error::ZeroNearCircle)?;
    let n = snap_turns(total, T::lit(1e-6)).map_err(|_| Error::ZeroNearCircle)?;
    Ok(VorticityReport {
        n,
        method: VorticityMethod::Laurent,
        zero_count: usize::try_from(n + m as i32).ok(),
        margin: None,
    })
}

/// Phase winding of `psi` around the circle `eta = eta_probe` at time `t`.
/// Valid when every node lies inside the probe circle; see
/// [`node_free_radius`].
pub fn total_vorticity_bruteforce<T: Real>(
    state: &AngularState<T>,
    eta_probe: T,
    t: T,
    base_samples: usize,
) -> Result<VorticityReport<T>> {
    if !(eta_probe > T::zero()) {
        return Err(Error::InvalidInput("probe radius must be positive".into()));
    }
    let wave = ReducedWave::new(state);
    let opts = UnwrapOptions {
        initial_samples: base_samples.max(8),
        max_depth: 30,
        max_increment: T::FRAC_PI_2(),
    };
    // chi_00 is real and positive, so arg psi = arg(psi / chi_00)
    let total = phase_change(
        |phi: T| {
            let (s, c) = phi.sin_cos();
            wave.value(eta_probe * c, eta_probe * s, t)
        },
        T::zero(),
        T::TAU(),
        &opts,
    )?;
    let n = snap_turns(total, T::lit(1e-6))?;
    Ok(VorticityReport {
        n,
        method: VorticityMethod::BruteForce,
        zero_count: None,
        margin: None,
    })
}

/// Radius outside which `psi` has no zeros at any time.
///
/// On `|z| = R` the leading monomials of the top shell contribute at least
/// `R^m min|g|` in modulus, while all remaining monomials of the reduced wave
/// function are bounded by a polynomial of degree `m - 1` in `R`. Where the
/// first dominates the second, `psi` cannot vanish. Returns `None` when
/// `min|g|` on the unit circle cannot be bounded away from zero.
pub fn node_free_radius<T: Real>(state: &AngularState<T>) -> Option<T> {
    let g = shell_polynomial(state).ok()?;
    let gmin = min_modulus_on_circle(&g);
    if !(gmin > T::zero()) {
        return None;
    }
    let m = state.m();
    // (|a_pq|, exponent, weight) for every sub-leading monomial
    let mut monomials: Vec<(T, i32)> = Vec::new();
    for (p, q, c) in state.terms() {
        if c.norm_sqr() == T::zero() {
            continue;
        }
        let a = c.norm() / (factorial::<T>(p) * factorial::<T>(q)).sqrt();
        for k in 0..=p.min(q) {
            if k == 0 && p + q == m {
                continue;
            }
            let w = factorial::<T>(k) * binomial::<T>(p, k) * binomial::<T>(q, k);
            monomials.push((a * w, (p + q - 2 * k) as i32));
        }
    }
    let dominated = |r: T| {
        let rest = monomials
            .iter()
            .fold(T::zero(), |acc, &(w, e)| acc + w * r.powi(e));
        r.powi(m as i32) * gmin > rest
    };
    let mut hi = T::one();
    while !dominated(hi) {
        hi = hi * T::lit(2.0);
        if hi > T::lit(1e8) {
            return None;
        }
    }
    let mut lo = hi / T::lit(2.0);
    if dominated(lo) {
        return Some(lo.max(T::zero()));
    }
    for _ in 0..40 {
        let mid = (lo + hi) / T::lit(2.0);
        if dominated(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}
