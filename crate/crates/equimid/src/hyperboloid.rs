//! Exact equidistant function for the hyperboloid of revolution
//! `f(t) = sqrt(|t|^2 + 1)`, used as the golden reference for the
//! numerical paths.
//!
//! Inverting the abscissa map reduces to the cubic
//! `t^3 - ((s^2 - 3)/2) t - s = 0`, solved in closed form: the Cardano
//! expression inside the breakpoint interval and the trigonometric root
//! outside it.

use crate::{c, linalg, Scalar};

/// The breakpoints `±sqrt(3) * sqrt(cbrt(4) + cbrt(2) + 1)` separating
/// the one-real-root regime from the three-real-root regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicBranchDomain<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> CubicBranchDomain<T> {
    pub fn new() -> Self {
        let three = c::<T>(3.0);
        let upper = three.sqrt() * (c::<T>(4.0).cbrt() + c::<T>(2.0).cbrt() + T::one()).sqrt();
        CubicBranchDomain {
            lower: -upper,
            upper,
        }
    }

    pub fn contains(&self, s: T) -> bool {
        self.lower <= s && s <= self.upper
    }
}

impl<T: Scalar> Default for CubicBranchDomain<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Residual of the defining cubic, `t^3 - ((s^2 - 3)/2) t - s`.
pub fn cubic_residual<T: Scalar>(s: T, t: T) -> T {
    t * t * t - (s * s - c(3.0)) * c(0.5) * t - s
}

/// Invert the univariate abscissa map in closed form; total on the reals.
pub fn x_inverse_1d<T: Scalar>(s: T) -> T {
    let dom = CubicBranchDomain::new();
    let half = c::<T>(0.5);
    let s2 = s * s;
    if dom.contains(s) {
        // single real root (Cardano); the discriminant is nonnegative on
        // this interval and only rounding can push it below zero
        let disc = s2 * c(0.25) - (s2 - c(3.0)).powi(3) / c(216.0);
        let root = num_traits::Float::max(disc, T::zero()).sqrt();
        (s * half + root).cbrt() + (s * half - root).cbrt()
    } else {
        // three real roots; the one matching the sign of s is the
        // trigonometric expression below
        let q = (s2 - c(3.0)) / c(6.0);
        let rad = (s2 - c(3.0)).powi(3) / (c::<T>(54.0) * s2) - T::one();
        let rad = num_traits::Float::max(rad, T::zero());
        let mag = c::<T>(2.0) * q.sqrt() * (rad.sqrt().atan() / c(3.0)).cos();
        if s < T::zero() {
            -mag
        } else {
            mag
        }
    }
}

/// Invert the abscissa map in `n` dimensions: zero maps to zero, and
/// otherwise the parameter points along `s` with magnitude given by the
/// univariate inverse of `|s|`.
pub fn x_inverse_nd<T: Scalar>(s: &[T]) -> Vec<T> {
    let norm = linalg::norm(s);
    if norm == T::zero() {
        return vec![T::zero(); s.len()];
    }
    let mag = x_inverse_1d(norm);
    let scale = mag / norm;
    s.iter().map(|&si| si * scale).collect()
}

/// The equidistant function value from the closed form, univariate.
pub fn golden_g_1d<T: Scalar>(s: T) -> T {
    height_at(x_inverse_1d(s))
}

/// The equidistant function value from the closed form, any dimension.
pub fn golden_g<T: Scalar>(s: &[T]) -> T {
    height_at(linalg::norm(&x_inverse_nd(s)))
}

/// `y(t)` along a radial direction with `r = |t|`:
/// `sqrt(r^2+1) sqrt(2r^2+1) / (sqrt(r^2+1) + sqrt(2r^2+1))`.
fn height_at<T: Scalar>(r: T) -> T {
    let r2 = r * r;
    let a = (r2 + T::one()).sqrt();
    let b = (r2 + r2 + T::one()).sqrt();
    a * b / (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    const X1: f64 = 1.449489742783178;
    const Y1: f64 = 0.7785390719815306;

    /// Forward abscissa map for the univariate hyperboloid, used as the
    /// independent check on the closed-form inverse.
    fn forward_x(t: f64) -> f64 {
        let f = (t * t + 1.0).sqrt();
        t + t * f / (f + (2.0 * t * t + 1.0).sqrt())
    }

    #[test]
    fn breakpoint_value() {
        let dom = CubicBranchDomain::<f64>::new();
        assert!((dom.upper - 3.3973469510176934).abs() < 1e-14);
        assert_eq!(dom.lower, -dom.upper);
    }

    #[test]
    fn origin_maps_to_origin() {
        assert_eq!(x_inverse_1d(0.0f64), 0.0);
        assert_eq!(x_inverse_nd(&[0.0f64, 0.0]), vec![0.0, 0.0]);
        assert!((golden_g_1d(0.0f64) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn inverse_recovers_the_frozen_point() {
        let t = x_inverse_1d(X1);
        assert!((t - 1.0).abs() < 1e-9, "{t}");
        assert!((golden_g_1d(X1) - Y1).abs() < 1e-12);
    }

    #[test]
    fn branches_agree_at_the_breakpoint() {
        let dom = CubicBranchDomain::<f64>::new();
        for s in [dom.upper, dom.lower] {
            // evaluate both branch formulas directly at the breakpoint
            let s2 = s * s;
            let disc: f64 = s2 / 4.0 - (s2 - 3.0).powi(3) / 216.0;
            let root = disc.max(0.0).sqrt();
            let cardano = (s / 2.0 + root).cbrt() + (s / 2.0 - root).cbrt();
            let rad = ((s2 - 3.0).powi(3) / (54.0 * s2) - 1.0).max(0.0);
            let mag = 2.0 * ((s2 - 3.0) / 6.0).sqrt() * (rad.sqrt().atan() / 3.0).cos();
            let trig = if s < 0.0 { -mag } else { mag };
            assert!(
                (cardano - trig).abs() < 1e-9,
                "s={s}: cardano {cardano} vs trig {trig}"
            );
        }
    }

    #[test]
    fn golden_spot_values() {
        // frozen from solving x(t) = s independently at high precision
        let cases: [(f64, f64, f64); 4] = [
            (2.5, 1.7479309134522327, 1.1473193199933815),
            (5.0, 3.524035731726886, 2.128933489033977),
            (-5.0, -3.524035731726886, 2.128933489033977),
            (0.7, 0.47329128146975386, 0.5764018810632001),
        ];
        for (s, t_expect, g_expect) in cases {
            let t = x_inverse_1d(s);
            assert!((t - t_expect).abs() < 1e-10, "s={s}: t={t}");
            let g = golden_g_1d(s);
            assert!((g - g_expect).abs() < 1e-12, "s={s}: g={g}");
        }
    }

    #[test]
    fn inverse_satisfies_cubic_and_forward_map() {
        let mut s = -10.0f64;
        while s <= 10.0 {
            let t = x_inverse_1d(s);
            let resid = cubic_residual(s, t).abs();
            assert!(
                resid <= 1e-9 * (1.0 + s.abs().powi(3)),
                "s={s}: residual {resid}"
            );
            assert!((forward_x(t) - s).abs() < 1e-9 * (1.0 + s.abs()), "s={s}");
            s += 0.0917;
        }
    }

    #[test]
    fn sign_of_the_root_follows_the_abscissa() {
        for s in [0.01f64, 0.5, 2.0, 3.39, 3.41, 7.0] {
            assert!(x_inverse_1d(s) > 0.0, "s={s}");
            assert!(x_inverse_1d(-s) < 0.0, "s={s}");
        }
    }

    #[test]
    fn radial_reduction_in_two_dimensions() {
        let t = x_inverse_nd(&[X1, 0.0]);
        assert!((t[0] - 1.0).abs() < 1e-9);
        assert!(t[1].abs() < 1e-15);
        assert!((golden_g(&[X1, 0.0]) - Y1).abs() < 1e-12);

        // arbitrary direction: G depends only on |s|
        let s = 2.7f64;
        let dir = [0.6, -0.8];
        let v = [s * dir[0], s * dir[1]];
        assert!((golden_g(&v) - golden_g_1d(s)).abs() < 1e-12);
    }

    #[test]
    fn nd_branch_agreement_at_the_breakpoint() {
        let dom = CubicBranchDomain::<f64>::new();
        let eps = 1e-12;
        let below = golden_g(&[dom.upper - eps, 0.0]);
        let above = golden_g(&[dom.upper + eps, 0.0]);
        assert!((below - above).abs() < 1e-9, "{below} vs {above}");
    }
}
