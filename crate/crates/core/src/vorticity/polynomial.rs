use num_complex::Complex;

use crate::basis::AngularState;
use crate::contour::{phase_change_certified, snap_turns, UnwrapOptions};
use crate::error::{Error, Result};
use crate::scalar::{factorial, Real};

/// `g(z) = sum_k C_{k, m-k} / sqrt(k! (m-k)!) z^k`, built from the highest
/// energy shell. Its zeros inside the unit disk fix the total vorticity.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellPolynomial<T> {
    m: usize,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> ShellPolynomial<T> {
    /// Coefficients in ascending powers; the length is `m + 1`.
    pub fn new(coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("empty coefficient list".into()));
        }
        if coeffs.iter().all(|c| c.norm_sqr() == T::zero()) {
            return Err(Error::EmptyShell);
        }
        Ok(Self {
            m: coeffs.len() - 1,
            coeffs,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(T::zero(), T::zero()), |acc, c| acc * z + c)
    }

    /// `max |g'(z)|` over `|z| <= radius`, bounded by `sum k |g_k| radius^(k-1)`.
    pub fn derivative_bound(&self, radius: T) -> T {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .fold(T::zero(), |acc, (k, c)| {
                acc + T::from_usize_lossy(k) * c.norm() * radius.powi(k as i32 - 1)
            })
    }
}

pub fn shell_polynomial<T: Real>(state: &AngularState<T>) -> Result<ShellPolynomial<T>> {
    let m = state.m();
    let coeffs = (0..=m)
        .map(|k| {
            let s = (factorial::<T>(k) * factorial::<T>(m - k)).sqrt();
            state.coefficient(k, m - k) / s
        })
        .collect();
    ShellPolynomial::new(coeffs)
}

fn circle_options<T: Real>(m: usize) -> UnwrapOptions<T> {
    UnwrapOptions {
        initial_samples: 32 * (m + 2),
        max_depth: 40,
        max_increment: T::FRAC_PI_2(),
    }
}

/// Winding of `g` along the unit circle with every arc certified free of
/// zeros within `margin` of the circle. Returns the winding and the smallest
/// certified lower bound of `|g|` met along the way.
pub(crate) fn certified_circle_winding<T: Real>(
    poly: &ShellPolynomial<T>,
    margin: T,
) -> Result<(i32, T)> {
    // |d g(e^{i s}) / ds| <= lipschitz on the circle itself
    let lipschitz = poly.derivative_bound(T::one());
    let required = poly.derivative_bound(T::one() + margin) * margin;
    let mut min_bound = T::infinity();
    let total = phase_change_certified(
        |s: T| poly.eval(Complex::from_polar(T::one(), s)),
        T::zero(),
        T::TAU(),
        &circle_options(poly.m),
        |a, b, fa, fb| {
            let lower = (fa.norm() + fb.norm()) / T::lit(2.0) - lipschitz * (b - a) / T::lit(2.0);
            if lower > required {
                min_bound = min_bound.min(lower);
                true
            } else {
                false
            }
        },
    )
    .map_err(|_| Error::ZeroNearCircle)?;
    let n = snap_turns(total, T::lit(1e-6)).map_err(|_| Error::ZeroNearCircle)?;
    Ok((n, min_bound))
}

/// Number of zeros (with multiplicity) of `g` strictly inside the unit disk,
/// from the argument principle. Fails with `ZeroNearCircle` unless every
/// zero is certified to be farther than `margin` from the circle.
pub fn zeros_in_unit_disk<T: Real>(poly: &ShellPolynomial<T>, margin: T) -> Result<usize> {
    let (n, _) = certified_circle_winding(poly, margin)?;
    if n < 0 || n as usize > poly.m {
        return Err(Error::ZeroNearCircle);
    }
    Ok(n as usize)
}

/// Certified lower bound of `min |g|` on the unit circle (zero when the bound
/// cannot be made positive).
pub fn min_modulus_on_circle<T: Real>(poly: &ShellPolynomial<T>) -> T {
    match certified_circle_winding(poly, T::zero()) {
        Ok((_, b)) => b.max(T::zero()),
        Err(_) => T::zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::random_state;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn m1_shell_is_linear() {
        let s = AngularState::from_terms(1, &[(1, 0, c(0.8, 0.0)), (0, 1, c(0.6, 0.0))]).unwrap();
        let g = shell_polynomial(&s).unwrap();
        assert_eq!(g.coefficients(), &[c(0.6, 0.0), c(0.8, 0.0)]);
        assert_eq!(zeros_in_unit_disk(&g, 1e-9).unwrap(), 1);
    }

    #[test]
    fn pure_chi20_has_double_root_at_origin() {
        let g = shell_polynomial(&AngularState::<f64>::pure(2, 0)).unwrap();
        let h = 0.5f64.sqrt();
        let want = [c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)];
        for (a, b) in g.coefficients().iter().zip(&want) {
            assert!((a - b).norm() < 1e-15);
        }
        assert_eq!(zeros_in_unit_disk(&g, 1e-9).unwrap(), 2);
    }

    #[test]
    fn empty_shell_is_rejected() {
        let s = AngularState::from_terms(2, &[(0, 0, c(1.0, 0.0)), (1, 0, c(1.0, 0.0))]).unwrap();
        assert!(matches!(shell_polynomial(&s), Err(Error::EmptyShell)));
    }

    #[test]
    fn zero_on_circle_is_detected() {
        let g = ShellPolynomial::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(zeros_in_unit_disk(&g, 1e-9), Err(Error::ZeroNearCircle)));
        let g = ShellPolynomial::new(vec![c(1.0 + 1e-6, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(zeros_in_unit_disk(&g, 1e-3), Err(Error::ZeroNearCircle)));
        assert_eq!(zeros_in_unit_disk(&g, 1e-9).unwrap(), 0);
    }

    #[test]
    fn shell_polynomial_is_large_eta_limit() {
        // P(eta e^{i phi}) / eta^m -> e^{-i m T} e^{-i m phi} g(e^{2 i phi})
        let s = random_state(2, 77);
        let g = shell_polynomial(&s).unwrap();
        let w = crate::basis::ReducedWave::new(&s);
        let eta = 1e12;
        for k in 0..8 {
            let phi = 0.7 * k as f64;
            let t = 0.3 * k as f64;
            let p = w.value(eta * phi.cos(), eta * phi.sin(), t) / eta.powi(2);
            let want = Complex::from_polar(1.0, -2.0 * t - 2.0 * phi)
                * g.eval(Complex::from_polar(1.0, 2.0 * phi));
            assert!((p - want).norm() < 1e-10 * want.norm().max(1.0));
        }
    }
}
