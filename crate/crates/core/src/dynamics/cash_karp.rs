//! Embedded 5(4) Runge-Kutta pair with Cash-Karp coefficients.

use crate::scalar::Real;

const C: [f64; 6] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0];

const A: [[f64; 5]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
    [3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0, 0.0, 0.0],
    [-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0, 0.0],
    [
        1631.0 / 55296.0,
        175.0 / 512.0,
        575.0 / 13824.0,
        44275.0 / 110592.0,
        253.0 / 4096.0,
    ],
];

// fifth-order weights
const B5: [f64; 6] = [
    37.0 / 378.0,
    0.0,
    250.0 / 621.0,
    125.0 / 594.0,
    0.0,
    512.0 / 1771.0,
];

// embedded fourth-order weights
const B4: [f64; 6] = [
    2825.0 / 27648.0,
    0.0,
    18575.0 / 48384.0,
    13525.0 / 55296.0,
    277.0 / 14336.0,
    1.0 / 4.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CashKarpStep<T, const N: usize> {
    /// Fifth-order solution at `t + h`.
    pub y: [T; N],
    /// Difference between the fifth- and fourth-order solutions.
    pub error: [T; N],
}

/// One Cash-Karp step of `dy/dt = f(t, y)` (six evaluations of `f`).
pub fn cash_karp_step<T, const N: usize, E, F>(
    f: &mut F,
    t: T,
    y: &[T; N],
    h: T,
) -> Result<CashKarpStep<T, N>, E>
where
    T: Real,
    F: FnMut(T, &[T; N]) -> Result<[T; N], E>,
{
    let mut k = [[T::zero(); N]; 6];
    for s in 0..6 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = T::lit(A[s][j]);
            if a != T::zero() {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = f(t + h * T::lit(C[s]), &ys)?;
    }
    let mut out = *y;
    let mut error = [T::zero(); N];
    for s in 0..6 {
        let b5 = T::lit(B5[s]);
        let db = T::lit(B5[s] - B4[s]);
        for i in 0..N {
            out[i] += h * b5 * k[s][i];
            error[i] += h * db * k[s][i];
        }
    }
    Ok(CashKarpStep { y: out, error })
}
