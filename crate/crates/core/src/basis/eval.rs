use num_complex::Complex;

use super::radial::{complex_hermite_table, eval_f, eval_f_derivative, hermite};
use super::state::{dense_index, AngularState, CartesianPoint, CartesianState, PolarPoint};
use crate::scalar::{factorial, Real};

/// Unit-normalised Gaussian ground state `chi_00 = pi^{-1/2} exp(-eta^2 / 2)`.
pub fn ground_state<T: Real>(eta: T) -> T {
    (-(eta * eta) / T::lit(2.0)).exp() / T::PI().sqrt()
}

fn time_phases<T: Real>(m: usize, t: T) -> Vec<Complex<T>> {
    (0..=m)
        .map(|n| Complex::from_polar(T::one(), -T::from_usize_lossy(n) * t))
        .collect()
}

/// `psi(eta, phi, T)` from the angular expansion.
pub fn eval_psi_angular<T: Real>(state: &AngularState<T>, p: PolarPoint<T>, t: T) -> Complex<T> {
    let phases = time_phases(state.m(), t);
    let mut sum = Complex::new(T::zero(), T::zero());
    for (nd, ng, c) in state.terms() {
        if c.norm_sqr() == T::zero() {
            continue;
        }
        let l = T::from_usize_lossy(nd) - T::from_usize_lossy(ng);
        let e = phases[nd + ng] * Complex::from_polar(T::one(), l * p.phi);
        sum = sum + c * e * eval_f(nd, ng, p.eta);
    }
    sum * ground_state(p.eta)
}

/// `psi(Q_x, Q_y, T)` from the Cartesian (Hermite product) expansion.
pub fn eval_psi_cartesian<T: Real>(
    state: &CartesianState<T>,
    p: CartesianPoint<T>,
    t: T,
) -> Complex<T> {
    let m = state.m();
    let phases = time_phases(m, t);
    let hx: Vec<T> = (0..=m).map(|n| hermite(n, p.x)).collect();
    let hy: Vec<T> = (0..=m).map(|n| hermite(n, p.y)).collect();
    let two = T::lit(2.0);
    let mut sum = Complex::new(T::zero(), T::zero());
    for (nx, ny, d) in state.terms() {
        let n = nx + ny;
        let norm = (two.powi(n as i32) * factorial::<T>(nx) * factorial::<T>(ny)).sqrt();
        sum = sum + d * phases[n] * (hx[nx] * hy[ny] / norm);
    }
    let eta2 = p.x * p.x + p.y * p.y;
    sum * ground_state(eta2.sqrt())
}

/// Analytic `(d psi / d eta, d psi / d phi)` of the angular expansion.
pub fn grad_psi<T: Real>(
    state: &AngularState<T>,
    p: PolarPoint<T>,
    t: T,
) -> (Complex<T>, Complex<T>) {
    let phases = time_phases(state.m(), t);
    let g = ground_state(p.eta);
    let mut d_eta = Complex::new(T::zero(), T::zero());
    let mut d_phi = Complex::new(T::zero(), T::zero());
    for (nd, ng, c) in state.terms() {
        if c.norm_sqr() == T::zero() {
            continue;
        }
        let l = T::from_usize_lossy(nd) - T::from_usize_lossy(ng);
        let ce = c * phases[nd + ng] * Complex::from_polar(T::one(), l * p.phi);
        let f = eval_f(nd, ng, p.eta);
        // d/deta (f chi_00) = (f' - eta f) chi_00
        d_eta = d_eta + ce * (eval_f_derivative(nd, ng, p.eta) - p.eta * f);
        d_phi = d_phi + ce * Complex::new(T::zero(), l) * f;
    }
    (d_eta * g, d_phi * g)
}

/// `psi / chi_00` and its Cartesian gradient at one point.
#[derive(Debug, Clone, Copy)]
pub struct ReducedSample<T> {
    pub value: Complex<T>,
    pub dx: Complex<T>,
    pub dy: Complex<T>,
    /// Incoherent magnitude `sqrt(sum |term|^2)` of the expansion at this
    /// point; the natural scale against which `|value|` is judged small.
    pub scale: T,
}

impl<T: Real> ReducedSample<T> {
    /// Cartesian velocity `Im(grad psi / psi)`. The Gaussian factor is real,
    /// so it drops out of the phase gradient.
    pub fn velocity(&self) -> (T, T) {
        let inv = self.value.inv();
        ((self.dx * inv).im, (self.dy * inv).im)
    }
}

/// Evaluator for the reduced wave function `P = psi / chi_00`, a polynomial in
/// `(Q_x, Q_y)`. Working with `P` keeps values representable far outside the
/// Born bulk, where `chi_00` underflows.
#[derive(Debug, Clone)]
pub struct ReducedWave<T> {
    m: usize,
    // (p, q, C_{pq} / sqrt(p! q!)) for the non-zero coefficients
    terms: Vec<(usize, usize, Complex<T>)>,
}

impl<T: Real> ReducedWave<T> {
    pub fn new(state: &AngularState<T>) -> Self {
        let terms = state
            .terms()
            .filter(|(_, _, c)| c.norm_sqr() > T::zero())
            .map(|(p, q, c)| {
                let s = (factorial::<T>(p) * factorial::<T>(q)).sqrt();
                (p, q, c / s)
            })
            .collect();
        Self { m: state.m(), terms }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn value(&self, x: T, y: T, t: T) -> Complex<T> {
        let h = complex_hermite_table(self.m, Complex::new(x, y));
        let phases = time_phases(self.m, t);
        self.terms.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &(p, q, a)| {
            acc + a * phases[p + q] * h[dense_index(p, q)]
        })
    }

    pub fn sample(&self, x: T, y: T, t: T) -> ReducedSample<T> {
        let h = complex_hermite_table(self.m, Complex::new(x, y));
        let phases = time_phases(self.m, t);
        let zero = Complex::new(T::zero(), T::zero());
        let (mut value, mut dz, mut dzc) = (zero, zero, zero);
        let mut scale2 = T::zero();
        for &(p, q, a) in &self.terms {
            let ae = a * phases[p + q];
            let term = ae * h[dense_index(p, q)];
            value = value + term;
            scale2 += term.norm_sqr();
            if p > 0 {
                dz = dz + ae * h[dense_index(p - 1, q)] * T::from_usize_lossy(p);
            }
            if q > 0 {
                dzc = dzc + ae * h[dense_index(p, q - 1)] * T::from_usize_lossy(q);
            }
        }
        // d/dx = d/dz + d/dzbar, d/dy = i (d/dz - d/dzbar)
        let i = Complex::new(T::zero(), T::one());
        ReducedSample {
            value,
            dx: dz + dzc,
            dy: i * (dz - dzc),
            scale: scale2.sqrt(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{angular_to_cartesian, random_state};
    use std::f64::consts::PI;

    #[test]
    fn ground_state_is_real_gaussian() {
        let s = AngularState::<f64>::pure(0, 0);
        for &(eta, phi) in &[(0.0, 0.0), (1.2, 2.0), (3.0, 5.5)] {
            let v = eval_psi_angular(&s, PolarPoint::new(eta, phi), 0.0);
            assert_eq!(v.im, 0.0);
            assert!((v.re - ground_state(eta)).abs() < 1e-15);
        }
        // unit L2 norm on the plane: int 2 pi eta chi^2 deta = 1
        let n = 200_000;
        let h = 12.0 / n as f64;
        let integral: f64 = (0..n)
            .map(|k| {
                let e = (k as f64 + 0.5) * h;
                2.0 * PI * e * ground_state(e).powi(2) * h
            })
            .sum();
        assert!((integral - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pure_chi10_on_unit_circle() {
        let s = AngularState::<f64>::pure(1, 0);
        let v = eval_psi_angular(&s, PolarPoint::new(1.0, 0.0), 0.0);
        assert!((v.re - ground_state(1.0)).abs() < 1e-15);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn cartesian_ground_and_odd_parity() {
        let g = CartesianState::<f64>::pure(0, 0);
        let v = eval_psi_cartesian(&g, CartesianPoint::new(0.0, 0.0), 0.0);
        assert!(v.re > 0.0 && v.im == 0.0);
        let s = CartesianState::<f64>::pure(1, 0);
        let v = eval_psi_cartesian(&s, CartesianPoint::new(0.0, 0.7), 0.3);
        assert_eq!(v.norm(), 0.0);
    }

    #[test]
    fn angular_derivative_vanishes_without_angular_momentum() {
        for (a, b) in [(0, 0), (1, 1), (2, 2)] {
            let s = AngularState::<f64>::pure(a, b);
            let (_, dphi) = grad_psi(&s, PolarPoint::new(1.3, 0.4), 0.7);
            assert_eq!(dphi.norm(), 0.0);
        }
    }

    #[test]
    fn reduced_wave_matches_angular_evaluation() {
        let s = random_state(3, 11);
        let w = ReducedWave::new(&s);
        for &(eta, phi, t) in &[(0.5, 0.1, 0.0), (2.5, 4.0, 1.1), (7.0, 2.2, -3.0)] {
            let p = PolarPoint::new(eta, phi);
            let c = p.to_cartesian();
            let psi = eval_psi_angular(&s, p, t);
            let red = w.value(c.x, c.y, t) * ground_state(eta);
            assert!((psi - red).norm() < 1e-12 * psi.norm().max(1e-300));
        }
    }

    #[test]
    fn reduced_gradient_matches_finite_difference() {
        let s = random_state(4, 3);
        let w = ReducedWave::new(&s);
        let (x, y, t, h) = (0.9, -1.4, 0.6, 1e-6);
        let smp = w.sample(x, y, t);
        let fdx = (w.value(x + h, y, t) - w.value(x - h, y, t)) / (2.0 * h);
        let fdy = (w.value(x, y + h, t) - w.value(x, y - h, t)) / (2.0 * h);
        assert!((smp.dx - fdx).norm() < 1e-7 * smp.scale.max(1.0));
        assert!((smp.dy - fdy).norm() < 1e-7 * smp.scale.max(1.0));
    }

    #[test]
    fn f32_evaluation_tracks_f64() {
        let s64 = random_state(2, 5);
        let s32: AngularState<f32> = s64.cast();
        let p64 = PolarPoint::new(1.1, 0.3);
        let a = eval_psi_angular(&s64, p64, 0.2);
        let b = eval_psi_angular(&s32, PolarPoint::new(1.1f32, 0.3), 0.2);
        assert!((a.re - b.re as f64).abs() < 1e-5 && (a.im - b.im as f64).abs() < 1e-5);
        let c = angular_to_cartesian(&s32);
        let d = eval_psi_cartesian(&c, p64.cast_to_f32().to_cartesian(), 0.2);
        assert!((a.re - d.re as f64).abs() < 1e-5);
    }

    trait CastF32 {
        fn cast_to_f32(self) -> PolarPoint<f32>;
    }
    impl CastF32 for PolarPoint<f64> {
        fn cast_to_f32(self) -> PolarPoint<f32> {
            PolarPoint::new(self.eta as f32, self.phi as f32)
        }
    }
}
