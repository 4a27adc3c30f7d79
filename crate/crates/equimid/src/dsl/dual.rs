//! Forward-mode dual numbers. Nesting `Dual<Dual<T>>` yields
//! Hessian-vector products without a tape.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::Scalar;

/// Number-like values an expression can be evaluated over: the scalar
/// itself, or (nested) dual numbers over it.
pub(crate) trait Num<T: Scalar>:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(c: T) -> Self;
    /// Innermost real part; used for branch decisions (min/max/abs).
    fn re(self) -> T;
    fn is_zero(self) -> bool;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn abs(self) -> Self;
    fn powf(self, e: Self) -> Self;
    fn min2(self, o: Self) -> Self;
    fn max2(self, o: Self) -> Self;
}

impl<T: Scalar> Num<T> for T {
    fn constant(c: T) -> Self {
        c
    }
    fn re(self) -> T {
        self
    }
    fn is_zero(self) -> bool {
        self == T::zero()
    }
    fn sqrt(self) -> Self {
        num_traits::Float::sqrt(self)
    }
    fn exp(self) -> Self {
        num_traits::Float::exp(self)
    }
    fn ln(self) -> Self {
        num_traits::Float::ln(self)
    }
    fn abs(self) -> Self {
        num_traits::Float::abs(self)
    }
    fn powf(self, e: Self) -> Self {
        num_traits::Float::powf(self, e)
    }
    fn min2(self, o: Self) -> Self {
        num_traits::Float::min(self, o)
    }
    fn max2(self, o: Self) -> Self {
        num_traits::Float::max(self, o)
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Dual<N> {
    pub v: N,
    pub d: N,
}

impl<N> Dual<N> {
    pub fn new(v: N, d: N) -> Self {
        Dual { v, d }
    }
}

impl<N: Add<Output = N>> Add for Dual<N> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual::new(self.v + o.v, self.d + o.d)
    }
}

impl<N: Sub<Output = N>> Sub for Dual<N> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual::new(self.v - o.v, self.d - o.d)
    }
}

impl<N: Copy + Add<Output = N> + Mul<Output = N>> Mul for Dual<N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Dual::new(self.v * o.v, self.v * o.d + self.d * o.v)
    }
}

impl<N: Copy + Sub<Output = N> + Mul<Output = N> + Div<Output = N>> Div for Dual<N> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        Dual::new(self.v / o.v, (self.d * o.v - self.v * o.d) / (o.v * o.v))
    }
}

impl<N: Neg<Output = N>> Neg for Dual<N> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.v, -self.d)
    }
}

impl<T: Scalar, N: Num<T>> Num<T> for Dual<N> {
    fn constant(c: T) -> Self {
        Dual::new(N::constant(c), N::constant(T::zero()))
    }
    fn re(self) -> T {
        self.v.re()
    }
    fn is_zero(self) -> bool {
        self.v.is_zero() && self.d.is_zero()
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let two = N::constant(T::from_f64(2.0).unwrap());
        Dual::new(s, self.d / (two * s))
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        Dual::new(e, self.d * e)
    }
    fn ln(self) -> Self {
        Dual::new(self.v.ln(), self.d / self.v)
    }
    fn abs(self) -> Self {
        if self.v.re() < T::zero() {
            -self
        } else {
            self
        }
    }
    fn powf(self, e: Self) -> Self {
        let val = self.v.powf(e.v);
        let one = N::constant(T::one());
        let mut d = N::constant(T::zero());
        if !self.d.is_zero() {
            d = d + e.v * self.v.powf(e.v - one) * self.d;
        }
        if !e.d.is_zero() {
            d = d + val * self.v.ln() * e.d;
        }
        Dual::new(val, d)
    }
    fn min2(self, o: Self) -> Self {
        if self.v.re() <= o.v.re() {
            self
        } else {
            o
        }
    }
    fn max2(self, o: Self) -> Self {
        if self.v.re() >= o.v.re() {
            self
        } else {
            o
        }
    }
}
