//! Truncated Taylor jets used as the differentiation substrate.
//!
//! A [`Jet2`] carries value, gradient and Hessian of a scalar field at a
//! point; a [`Jet1`] carries value and gradient. Arithmetic on jets applies
//! the Leibniz and chain rules exactly, so curvature quantities built from
//! second derivatives of closed-form fields are exact up to rounding.
//!
//! Geometric code is written once against [`Scalar`] and instantiated at the
//! order it needs. Taking a partial derivative lowers the order by one
//! ([`Lower::partial`]), which is how a covariant derivative of a `Jet2`
//! field produces a `Jet1` field.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// Largest manifold dimension the fixed-size jets support.
pub const MAX_DIM: usize = 6;

/// Real scalar types geometric code can be written against.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + From<f64>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + AddAssign
    + SubAssign
{
    fn value(&self) -> f64;

    fn zero() -> Self {
        Self::from(0.0)
    }

    fn one() -> Self {
        Self::from(1.0)
    }

    fn is_finite(&self) -> bool;

    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;

    fn recip(self) -> Self {
        Self::one() / self
    }

    fn powi(self, k: i32) -> Self {
        if k < 0 {
            return self.powi(-k).recip();
        }
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self;
        }
        acc
    }
}

/// Scalars that can be differentiated, yielding a scalar one order lower.
pub trait Lower: Scalar {
    type Down: Scalar;

    /// Partial derivative along coordinate (or frame) direction `i`.
    fn partial(&self, i: usize) -> Self::Down;

    /// Drops the highest-order information.
    fn truncate(&self) -> Self::Down;

    /// Directional derivative `Σ dir[i] ∂_i self`.
    fn directional(&self, dir: &[Self::Down]) -> Self::Down {
        let mut acc = Self::Down::zero();
        for (i, d) in dir.iter().enumerate() {
            acc += *d * self.partial(i);
        }
        acc
    }
}

impl Scalar for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn recip(self) -> Self {
        1.0 / self
    }
    fn powi(self, k: i32) -> Self {
        f64::powi(self, k)
    }
}

/// Value and gradient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet1 {
    pub v: f64,
    pub g: [f64; MAX_DIM],
}

/// Value, gradient and (symmetric) Hessian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub g: [f64; MAX_DIM],
    pub h: [[f64; MAX_DIM]; MAX_DIM],
}

impl Jet1 {
    pub fn constant(v: f64) -> Self {
        Jet1 {
            v,
            g: [0.0; MAX_DIM],
        }
    }

    pub fn variable(v: f64, i: usize) -> Self {
        let mut j = Jet1::constant(v);
        j.g[i] = 1.0;
        j
    }

    fn chain(self, f: f64, df: f64) -> Self {
        let mut g = [0.0; MAX_DIM];
        for (o, a) in g.iter_mut().zip(self.g.iter()) {
            *o = df * a;
        }
        Jet1 { v: f, g }
    }
}

impl Jet2 {
    pub fn constant(v: f64) -> Self {
        Jet2 {
            v,
            g: [0.0; MAX_DIM],
            h: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    /// The coordinate function `x_i` evaluated at `v`.
    pub fn variable(v: f64, i: usize) -> Self {
        let mut j = Jet2::constant(v);
        j.g[i] = 1.0;
        j
    }

    /// Seeds the coordinate functions at a point.
    pub fn seed(point: &[f64]) -> Vec<Jet2> {
        assert!(point.len() <= MAX_DIM, "dimension exceeds MAX_DIM");
        point
            .iter()
            .enumerate()
            .map(|(i, &x)| Jet2::variable(x, i))
            .collect()
    }

    /// Constant jets at a point: every derivative vanishes.
    pub fn seed_constant(point: &[f64]) -> Vec<Jet2> {
        point.iter().map(|&x| Jet2::constant(x)).collect()
    }

    fn chain(self, f: f64, df: f64, ddf: f64) -> Self {
        let mut out = Jet2::constant(f);
        for i in 0..MAX_DIM {
            out.g[i] = df * self.g[i];
            for j in 0..MAX_DIM {
                out.h[i][j] = df * self.h[i][j] + ddf * self.g[i] * self.g[j];
            }
        }
        out
    }
}

impl From<f64> for Jet1 {
    fn from(v: f64) -> Self {
        Jet1::constant(v)
    }
}

impl From<f64> for Jet2 {
    fn from(v: f64) -> Self {
        Jet2::constant(v)
    }
}

macro_rules! linear_ops {
    ($t:ty, $($field:ident),+) => {
        impl Add for $t {
            type Output = $t;
            fn add(mut self, o: $t) -> $t {
                self.v += o.v;
                $( linear_ops!(@zip self.$field, o.$field, +=); )+
                self
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(mut self, o: $t) -> $t {
                self.v -= o.v;
                $( linear_ops!(@zip self.$field, o.$field, -=); )+
                self
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(mut self) -> $t {
                self.v = -self.v;
                $( linear_ops!(@scale self.$field, -1.0); )+
                self
            }
        }
        impl Mul<f64> for $t {
            type Output = $t;
            fn mul(mut self, s: f64) -> $t {
                self.v *= s;
                $( linear_ops!(@scale self.$field, s); )+
                self
            }
        }
        impl Div<f64> for $t {
            type Output = $t;
            fn div(self, s: f64) -> $t {
                self * (1.0 / s)
            }
        }
        impl Add<f64> for $t {
            type Output = $t;
            fn add(mut self, s: f64) -> $t {
                self.v += s;
                self
            }
        }
        impl Sub<f64> for $t {
            type Output = $t;
            fn sub(mut self, s: f64) -> $t {
                self.v -= s;
                self
            }
        }
        impl Mul<$t> for f64 {
            type Output = $t;
            fn mul(self, j: $t) -> $t {
                j * self
            }
        }
        impl Add<$t> for f64 {
            type Output = $t;
            fn add(self, j: $t) -> $t {
                j + self
            }
        }
        impl Sub<$t> for f64 {
            type Output = $t;
            fn sub(self, j: $t) -> $t {
                -j + self
            }
        }
        impl AddAssign for $t {
            fn add_assign(&mut self, o: $t) {
                *self = *self + o;
            }
        }
        impl SubAssign for $t {
            fn sub_assign(&mut self, o: $t) {
                *self = *self - o;
            }
        }
    };
    (@zip $a:expr, $b:expr, $op:tt) => {
        for (x, y) in $a.iter_mut().zip($b.iter()) {
            linear_ops!(@elem x, y, $op);
        }
    };
    (@elem $x:ident, $y:ident, +=) => { add_elem($x, $y) };
    (@elem $x:ident, $y:ident, -=) => { sub_elem($x, $y) };
    (@scale $a:expr, $s:expr) => {
        for x in $a.iter_mut() {
            scale_elem(x, $s);
        }
    };
}

trait Elem {
    fn add_e(&mut self, o: &Self);
    fn sub_e(&mut self, o: &Self);
    fn scale_e(&mut self, s: f64);
}

impl Elem for f64 {
    fn add_e(&mut self, o: &Self) {
        *self += *o;
    }
    fn sub_e(&mut self, o: &Self) {
        *self -= *o;
    }
    fn scale_e(&mut self, s: f64) {
        *self *= s;
    }
}

impl Elem for [f64; MAX_DIM] {
    fn add_e(&mut self, o: &Self) {
        for (x, y) in self.iter_mut().zip(o.iter()) {
            *x += *y;
        }
    }
    fn sub_e(&mut self, o: &Self) {
        for (x, y) in self.iter_mut().zip(o.iter()) {
            *x -= *y;
        }
    }
    fn scale_e(&mut self, s: f64) {
        for x in self.iter_mut() {
            *x *= s;
        }
    }
}

fn add_elem<E: Elem>(x: &mut E, y: &E) {
    x.add_e(y)
}
fn sub_elem<E: Elem>(x: &mut E, y: &E) {
    x.sub_e(y)
}
fn scale_elem<E: Elem>(x: &mut E, s: f64) {
    x.scale_e(s)
}

linear_ops!(Jet1, g);
linear_ops!(Jet2, g, h);

impl Mul for Jet1 {
    type Output = Jet1;
    fn mul(self, o: Jet1) -> Jet1 {
        let mut g = [0.0; MAX_DIM];
        for i in 0..MAX_DIM {
            g[i] = self.v * o.g[i] + o.v * self.g[i];
        }
        Jet1 { v: self.v * o.v, g }
    }
}

impl Div for Jet1 {
    type Output = Jet1;
    fn div(self, o: Jet1) -> Jet1 {
        self * o.recip()
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        let mut out = Jet2::constant(self.v * o.v);
        for i in 0..MAX_DIM {
            out.g[i] = self.v * o.g[i] + o.v * self.g[i];
            for j in 0..MAX_DIM {
                out.h[i][j] = self.v * o.h[i][j]
                    + o.v * self.h[i][j]
                    + self.g[i] * o.g[j]
                    + o.g[i] * self.g[j];
            }
        }
        out
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip()
    }
}

impl Scalar for Jet1 {
    fn value(&self) -> f64 {
        self.v
    }
    fn is_finite(&self) -> bool {
        self.v.is_finite() && self.g.iter().all(|x| x.is_finite())
    }
    fn sin(self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.v.ln(), 1.0 / self.v)
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s)
    }
    fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r)
    }
}

impl Scalar for Jet2 {
    fn value(&self) -> f64 {
        self.v
    }
    fn is_finite(&self) -> bool {
        self.v.is_finite()
            && self.g.iter().all(|x| x.is_finite())
            && self.h.iter().flatten().all(|x| x.is_finite())
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(self.v.ln(), r, -r * r)
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }
    fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
}

impl Lower for Jet1 {
    type Down = f64;
    fn partial(&self, i: usize) -> f64 {
        self.g[i]
    }
    fn truncate(&self) -> f64 {
        self.v
    }
}

impl Lower for Jet2 {
    type Down = Jet1;
    fn partial(&self, i: usize) -> Jet1 {
        Jet1 {
            v: self.g[i],
            g: self.h[i],
        }
    }
    fn truncate(&self) -> Jet1 {
        Jet1 {
            v: self.v,
            g: self.g,
        }
    }
}

/// Truncates every component of a vector.
pub fn truncate_vec<S: Lower>(v: &[S]) -> Vec<S::Down> {
    v.iter().map(Lower::truncate).collect()
}

/// Values of every component of a vector.
pub fn values<S: Scalar>(v: &[S]) -> Vec<f64> {
    v.iter().map(Scalar::value).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_on_coordinates() {
        let x = Jet2::seed(&[0.3, -1.2]);
        let f = x[0] * x[0] * x[1];
        assert_eq!(f.v, 0.3 * 0.3 * -1.2);
        assert!((f.g[0] - 2.0 * 0.3 * -1.2).abs() < 1e-15);
        assert!((f.g[1] - 0.09).abs() < 1e-15);
        assert!((f.h[0][0] - 2.0 * -1.2).abs() < 1e-15);
        assert!((f.h[0][1] - 0.6).abs() < 1e-15);
        assert_eq!(f.h[0][1], f.h[1][0]);
        assert_eq!(f.h[1][1], 0.0);
    }

    #[test]
    fn quotient_and_sqrt() {
        let x = Jet2::variable(2.0, 0);
        let f = (x * x + 1.0).sqrt() / x;
        // f = sqrt(x²+1)/x, f' = -1/(x² sqrt(x²+1))
        let s5 = 5.0_f64.sqrt();
        assert!((f.v - s5 / 2.0).abs() < 1e-15);
        assert!((f.g[0] + 1.0 / (4.0 * s5)).abs() < 1e-15);
        // f'' = (3x²+2)/(x³ (x²+1)^{3/2})
        let expect = 14.0 / (8.0 * 5.0 * s5);
        assert!((f.h[0][0] - expect).abs() < 1e-14);
    }

    #[test]
    fn partial_lowers_order() {
        let x = Jet2::seed(&[0.5, 0.25]);
        let f = (x[0] * x[1]).sin();
        let d0 = f.partial(0);
        // ∂0 f = x1 cos(x0 x1)
        let p = 0.125_f64;
        assert!((d0.v - 0.25 * p.cos()).abs() < 1e-15);
        // ∂1∂0 f = cos(p) - x0 x1 sin(p)
        assert!((d0.g[1] - (p.cos() - p * p.sin())).abs() < 1e-15);
        assert_eq!(f.truncate().g, f.g);
        let dir = [Jet1::constant(2.0), Jet1::constant(-1.0)];
        let dd = f.directional(&dir);
        assert!((dd.v - (2.0 * f.g[0] - f.g[1])).abs() < 1e-15);
    }

    #[test]
    fn negative_powers() {
        let x = Jet1::variable(2.0, 0);
        let f = x.powi(-2);
        assert!((f.v - 0.25).abs() < 1e-15);
        assert!((f.g[0] + 0.25).abs() < 1e-15);
    }
}
