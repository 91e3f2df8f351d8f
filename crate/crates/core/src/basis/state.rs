use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{norm_tolerance, Real};

pub type ComplexAmplitude<T> = Complex<T>;

/// Shell bound `m` for a basis of `big_m = (m + 1)(m + 2) / 2` states.
pub fn shell_from_basis_size(big_m: usize) -> Option<usize> {
    (0..=big_m).find(|&m| basis_len(m) >= big_m).filter(|&m| basis_len(m) == big_m)
}

/// Number of basis states with energy index at most `m`: `(m + 1)(m + 2) / 2`.
pub fn basis_len(m: usize) -> usize {
    (m + 1) * (m + 2) / 2
}

/// Dense storage position of the pair `(a, b)`.
pub fn dense_index(a: usize, b: usize) -> usize {
    let n = a + b;
    n * (n + 1) / 2 + a
}

/// All index pairs `(a, b)` with `a + b <= m`, in dense storage order.
pub fn shell_indices(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=m).flat_map(|n| (0..=n).map(move |a| (a, n - a)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint<T> {
    pub eta: T,
    pub phi: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianPoint<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> PolarPoint<T> {
    /// Builds a polar point with the angle reduced into `[0, 2pi)`.
    pub fn new(eta: T, phi: T) -> Self {
        let tau = T::TAU();
        let mut phi = phi % tau;
        if phi < T::zero() {
            phi += tau;
        }
        if phi >= tau {
            phi = T::zero();
        }
        Self { eta, phi }
    }

    pub fn to_cartesian(self) -> CartesianPoint<T> {
        let (s, c) = self.phi.sin_cos();
        CartesianPoint {
            x: self.eta * c,
            y: self.eta * s,
        }
    }
}

impl<T: Real> CartesianPoint<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn to_polar(self) -> PolarPoint<T> {
        PolarPoint::new(self.x.hypot(self.y), self.y.atan2(self.x))
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

fn check_len<T>(m: usize, coeffs: &[T]) -> Result<()> {
    if coeffs.len() != basis_len(m) {
        return Err(Error::InvalidInput(format!(
            "m = {m} needs {} coefficients, got {}",
            basis_len(m),
            coeffs.len()
        )));
    }
    Ok(())
}

fn norm_sqr<T: Real>(coeffs: &[Complex<T>]) -> T {
    coeffs.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr())
}

fn check_finite<T: Real>(coeffs: &[Complex<T>]) -> Result<()> {
    if coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("non-finite coefficient".into()))
    }
}

fn rescale<T: Real>(coeffs: &mut [Complex<T>]) -> Result<()> {
    let n2 = norm_sqr(coeffs);
    if !(n2 > T::zero()) {
        return Err(Error::InvalidInput("all coefficients vanish".into()));
    }
    let s = n2.sqrt().recip();
    coeffs.iter_mut().for_each(|c| *c = *c * s);
    Ok(())
}

macro_rules! oscillator_state {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name<T> {
            m: usize,
            coeffs: Vec<Complex<T>>,
        }

        impl<T: Real> $name<T> {
            /// Accepts coefficients whose norm is within the normalisation
            /// tolerance of 1 and rescales them to unit norm.
            pub fn new(m: usize, coeffs: Vec<Complex<T>>) -> Result<Self> {
                check_len(m, &coeffs)?;
                check_finite(&coeffs)?;
                let n2 = norm_sqr(&coeffs);
                if (n2 - T::one()).abs() > norm_tolerance::<T>() {
                    return Err(Error::Normalization {
                        norm: n2.to_f64_lossy(),
                    });
                }
                let mut coeffs = coeffs;
                rescale(&mut coeffs)?;
                Ok(Self { m, coeffs })
            }

            /// Rescales arbitrary (not all zero) coefficients to unit norm.
            pub fn normalized(m: usize, mut coeffs: Vec<Complex<T>>) -> Result<Self> {
                check_len(m, &coeffs)?;
                check_finite(&coeffs)?;
                rescale(&mut coeffs)?;
                Ok(Self { m, coeffs })
            }

            /// Builds a normalised state from sparse `(a, b, amplitude)` terms.
            pub fn from_terms(m: usize, terms: &[(usize, usize, Complex<T>)]) -> Result<Self> {
                let mut coeffs = vec![Complex::new(T::zero(), T::zero()); basis_len(m)];
                for &(a, b, c) in terms {
                    if a + b > m {
                        return Err(Error::InvalidInput(format!(
                            "index ({a}, {b}) exceeds shell bound m = {m}"
                        )));
                    }
                    coeffs[dense_index(a, b)] += c;
                }
                Self::normalized(m, coeffs)
            }

            /// A single basis state.
            pub fn pure(a: usize, b: usize) -> Self {
                let m = a + b;
                let mut coeffs = vec![Complex::new(T::zero(), T::zero()); basis_len(m)];
                coeffs[dense_index(a, b)] = Complex::new(T::one(), T::zero());
                Self { m, coeffs }
            }

            /// Energy shell bound.
            pub fn m(&self) -> usize {
                self.m
            }

            /// Number of basis states, `(m + 1)(m + 2) / 2`.
            pub fn label_m(&self) -> usize {
                basis_len(self.m)
            }

            pub fn coefficients(&self) -> &[Complex<T>] {
                &self.coeffs
            }

            pub fn coefficient(&self, a: usize, b: usize) -> Complex<T> {
                if a + b > self.m {
                    Complex::new(T::zero(), T::zero())
                } else {
                    self.coeffs[dense_index(a, b)]
                }
            }

            /// Iterates `(a, b, amplitude)` in dense order.
            pub fn terms(&self) -> impl Iterator<Item = (usize, usize, Complex<T>)> + '_ {
                shell_indices(self.m).zip(self.coeffs.iter()).map(|((a, b), c)| (a, b, *c))
            }

            pub fn norm_sqr(&self) -> T {
                norm_sqr(&self.coeffs)
            }

            pub fn cast<U: Real>(&self) -> $name<U> {
                $name {
                    m: self.m,
                    coeffs: self
                        .coeffs
                        .iter()
                        .map(|c| Complex::new(U::lit(c.re.to_f64_lossy()), U::lit(c.im.to_f64_lossy())))
                        .collect(),
                }
            }

            pub(crate) fn from_raw(m: usize, coeffs: Vec<Complex<T>>) -> Self {
                debug_assert_eq!(coeffs.len(), basis_len(m));
                Self { m, coeffs }
            }
        }
    };
}

oscillator_state!(
    AngularState,
    "State expanded in the angular basis `chi_{n_d n_g}` (simultaneous eigenstates of energy and angular momentum)."
);
oscillator_state!(
    CartesianState,
    "State expanded in the Cartesian product basis `psi_{n_x n_y}`."
);

impl<T: Real> AngularState<T> {
    /// Mirror image: swaps `n_d` and `n_g` and conjugates every amplitude.
    pub fn reflected(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (a, b, c) in self.terms() {
            coeffs[dense_index(b, a)] = c.conj();
        }
        Self { m: self.m, coeffs }
    }
}
