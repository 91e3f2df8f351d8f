use num_complex::Complex;

use super::state::{basis_len, dense_index, AngularState, CartesianState};
use crate::scalar::{binomial, factorial, Real};

fn i_pow<T: Real>(k: usize, sign: i32) -> Complex<T> {
    // (sign * i)^k
    let (o, z) = (T::one(), T::zero());
    match (k % 4, sign >= 0) {
        (0, _) => Complex::new(o, z),
        (1, true) | (3, false) => Complex::new(z, o),
        (2, _) => Complex::new(-o, z),
        _ => Complex::new(z, -o),
    }
}

/// Unitary block mapping one energy shell `n` of angular amplitudes onto
/// Cartesian amplitudes: `D_{n_x, n - n_x} = sum_{n_d} U[n_x][n_d] C_{n_d, n - n_d}`.
///
/// Derived by expanding `(a_d^+)^{n_d} (a_g^+)^{n_g}` with
/// `a_d^+ = (a_x^+ + i a_y^+) / sqrt 2` and `a_g^+ = (a_x^+ - i a_y^+) / sqrt 2`.
pub fn shell_transform<T: Real>(n: usize) -> Vec<Vec<Complex<T>>> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut u = vec![vec![zero; n + 1]; n + 1];
    let pre = T::lit(2.0).powi(-(n as i32)).sqrt();
    for p in 0..=n {
        let q = n - p;
        let norm = (factorial::<T>(p) * factorial::<T>(q)).sqrt();
        for j in 0..=p {
            for l in 0..=q {
                let nx = j + l;
                let w = binomial::<T>(p, j)
                    * binomial::<T>(q, l)
                    * (factorial::<T>(nx) * factorial::<T>(n - nx)).sqrt()
                    * pre
                    / norm;
                let ph = i_pow::<T>(p - j, 1) * i_pow::<T>(q - l, -1);
                u[nx][p] = u[nx][p] + ph * w;
            }
        }
    }
    u
}

pub fn angular_to_cartesian<T: Real>(state: &AngularState<T>) -> CartesianState<T> {
    let m = state.m();
    let zero = Complex::new(T::zero(), T::zero());
    let mut d = vec![zero; basis_len(m)];
    for n in 0..=m {
        let u = shell_transform::<T>(n);
        for nx in 0..=n {
            d[dense_index(nx, n - nx)] = (0..=n)
                .map(|nd| u[nx][nd] * state.coefficient(nd, n - nd))
                .fold(zero, |a, b| a + b);
        }
    }
    CartesianState::from_raw(m, d)
}

pub fn cartesian_to_angular<T: Real>(state: &CartesianState<T>) -> AngularState<T> {
    let m = state.m();
    let zero = Complex::new(T::zero(), T::zero());
    let mut c = vec![zero; basis_len(m)];
    for n in 0..=m {
        let u = shell_transform::<T>(n);
        for nd in 0..=n {
            c[dense_index(nd, n - nd)] = (0..=n)
                .map(|nx| u[nx][nd].conj() * state.coefficient(nx, n - nx))
                .fold(zero, |a, b| a + b);
        }
    }
    AngularState::from_raw(m, c)
}
