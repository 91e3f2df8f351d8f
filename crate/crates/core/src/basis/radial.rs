use num_complex::Complex;

use super::state::{basis_len, dense_index};
use crate::scalar::{binomial, factorial, Real};

/// Radial polynomial `f_{n_d n_g}(eta)` of the angular basis,
/// `chi_{n_d n_g} = e^{i (n_d - n_g) phi} f_{n_d n_g}(eta) chi_00`.
///
/// Closed form of the raising-operator construction (an associated Laguerre
/// polynomial in `eta^2`):
/// `f = (n_d! n_g!)^{-1/2} sum_k (-1)^k k! C(n_d, k) C(n_g, k) eta^{n_d + n_g - 2k}`.
pub fn eval_f<T: Real>(nd: usize, ng: usize, eta: T) -> T {
    let n = nd + ng;
    let mut sum = T::zero();
    for k in 0..=nd.min(ng) {
        let c = factorial::<T>(k) * binomial::<T>(nd, k) * binomial::<T>(ng, k);
        let term = c * eta.powi((n - 2 * k) as i32);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum / (factorial::<T>(nd) * factorial::<T>(ng)).sqrt()
}

/// `d f_{n_d n_g} / d eta`.
pub fn eval_f_derivative<T: Real>(nd: usize, ng: usize, eta: T) -> T {
    let n = nd + ng;
    let mut sum = T::zero();
    for k in 0..=nd.min(ng) {
        let p = n - 2 * k;
        if p == 0 {
            continue;
        }
        let c = factorial::<T>(k) * binomial::<T>(nd, k) * binomial::<T>(ng, k);
        let term = c * T::from_usize_lossy(p) * eta.powi(p as i32 - 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum / (factorial::<T>(nd) * factorial::<T>(ng)).sqrt()
}

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence.
pub fn hermite<T: Real>(n: usize, x: T) -> T {
    let two = T::lit(2.0);
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = two * x;
    for k in 1..n {
        let next = two * x * cur - two * T::from_usize_lossy(k) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Complex Hermite polynomials `H_{p,q}(z, conj z)` for every `p + q <= m`,
/// dense-indexed. They satisfy `chi_{p q} = H_{p,q} chi_00 / sqrt(p! q!)` with
/// `z = Q_x + i Q_y`, and obey `H_{p+1,q} = z H_{p,q} - q H_{p,q-1}`.
pub fn complex_hermite_table<T: Real>(m: usize, z: Complex<T>) -> Vec<Complex<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut h = vec![zero; basis_len(m)];
    let zc = z.conj();
    let mut pow = Complex::new(T::one(), T::zero());
    for q in 0..=m {
        h[dense_index(0, q)] = pow;
        pow = pow * zc;
    }
    for p in 0..m {
        for q in 0..=(m - p - 1) {
            let mut v = z * h[dense_index(p, q)];
            if q > 0 {
                v = v - h[dense_index(p, q - 1)] * T::from_usize_lossy(q);
            }
            h[dense_index(p + 1, q)] = v;
        }
    }
    h
}
