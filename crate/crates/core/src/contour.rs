//! Phase unwrapping along closed contours.
//!
//! The accumulated change of `arg f` is summed from principal-value
//! increments between neighbouring samples. Arcs whose increment reaches
//! `max_increment` are bisected, so the unwrapped total is unambiguous once
//! every increment is below `pi / 2`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct UnwrapOptions<T> {
    /// Equally spaced samples before refinement.
    pub initial_samples: usize,
    /// Maximum number of bisections of any initial arc.
    pub max_depth: u32,
    /// Largest accepted phase increment between neighbouring samples.
    pub max_increment: T,
}

impl<T: Real> Default for UnwrapOptions<T> {
    fn default() -> Self {
        Self {
            initial_samples: 64,
            max_depth: 24,
            max_increment: T::FRAC_PI_2(),
        }
    }
}

/// Principal value of `arg(b / a)`.
pub fn phase_increment<T: Real>(a: Complex<T>, b: Complex<T>) -> T {
    let r = b * a.conj();
    r.im.atan2(r.re)
}

/// Unwrapped change of `arg f(s)` for `s` running from `s0` to `s1`.
pub fn phase_change<T, F>(f: F, s0: T, s1: T, opts: &UnwrapOptions<T>) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> Complex<T>,
{
    phase_change_certified(f, s0, s1, opts, |_, _, _, _| true)
}

/// As [`phase_change`], with an extra per-arc acceptance test
/// `accept(s_a, s_b, f_a, f_b)`. Arcs failing it are bisected like arcs with
/// too large an increment; running out of depth is an error either way.
pub fn phase_change_certified<T, F, A>(
    mut f: F,
    s0: T,
    s1: T,
    opts: &UnwrapOptions<T>,
    mut accept: A,
) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> Complex<T>,
    A: FnMut(T, T, Complex<T>, Complex<T>) -> bool,
{
    let n = opts.initial_samples.max(3);
    let ds = (s1 - s0) / T::from_usize_lossy(n);
    let mut eval = |s: T| -> Result<Complex<T>> {
        let v = f(s);
        if v.norm_sqr() > T::zero() && v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::AmbiguousWinding)
        }
    };
    let first = eval(s0)?;
    let mut total = T::zero();
    let mut prev = first;
    for k in 0..n {
        let a = s0 + ds * T::from_usize_lossy(k);
        let b = if k + 1 == n { s1 } else { a + ds };
        let fb = if k + 1 == n { first_or(&mut eval, b, s1, s0, first)? } else { eval(b)? };
        // depth-first refinement; the stack keeps arcs in order
        let mut stack = vec![(a, b, prev, fb, 0u32)];
        while let Some((sa, sb, fa, fb, depth)) = stack.pop() {
            let d = phase_increment(fa, fb);
            if d.abs() < opts.max_increment && accept(sa, sb, fa, fb) {
                total += d;
                continue;
            }
            if depth >= opts.max_depth {
                return Err(Error::AmbiguousWinding);
            }
            let mid = (sa + sb) / T::lit(2.0);
            let fm = eval(mid)?;
            stack.push((mid, sb, fm, fb, depth + 1));
            stack.push((sa, mid, fa, fm, depth + 1));
        }
        prev = fb;
    }
    Ok(total)
}

// For a closed contour the last sample coincides with the first; reuse it so
// the total is an exact multiple of 2 pi up to rounding of the increments.
fn first_or<T: Real>(
    eval: &mut impl FnMut(T) -> Result<Complex<T>>,
    b: T,
    s1: T,
    s0: T,
    first: Complex<T>,
) -> Result<Complex<T>> {
    if (s1 - s0).abs() == T::TAU() {
        Ok(first)
    } else {
        eval(b)
    }
}

/// Integer winding number of `f` around the closed parameter circle
/// `s in [0, 2 pi]`. Fails when the unwrapped total is farther than
/// `max_deviation` (in turns) from an integer.
pub fn winding_number<T, F>(f: F, opts: &UnwrapOptions<T>, max_deviation: T) -> Result<i32>
where
    T: Real,
    F: FnMut(T) -> Complex<T>,
{
    let total = phase_change(f, T::zero(), T::TAU(), opts)?;
    snap_turns(total, max_deviation)
}

/// Converts a closed-contour phase change into whole turns.
pub fn snap_turns<T: Real>(total_phase: T, max_deviation: T) -> Result<i32> {
    let turns = total_phase / T::TAU();
    let n = turns.round();
    if (turns - n).abs() > max_deviation {
        return Err(Error::AmbiguousWinding);
    }
    n.to_i32().ok_or(Error::AmbiguousWinding)
}
