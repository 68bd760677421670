//! Truncated bivariate Taylor arithmetic.
//!
//! A [`Jet2`] of order `N` holds the Taylor coefficients
//! `c[i,j] = (1/(i! j!)) * d^{i+j} g / du^i dv^j` of a scalar quantity `g` at a fixed
//! base point, for all `i + j <= N`. Coefficients are stored densely in graded
//! lexicographic order: degree by degree, and inside a degree by increasing `j`.
//!
//! All arithmetic is exact truncation: the result of any operation carries the Taylor
//! coefficients of the composite function up to the jet order. Binary operations on
//! jets of different orders truncate to the smaller order.

use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Highest supported jet order.
pub const MAX_ORDER: usize = 7;
/// Storage size for a jet of order [`MAX_ORDER`].
pub const MAX_COEFFS: usize = coeff_count(MAX_ORDER);

/// Number of coefficients of a jet of the given order.
pub const fn coeff_count(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// Dense storage position of the multi-index `(i, j)`.
#[inline]
pub const fn coeff_index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

#[derive(Clone, Copy, PartialEq)]
pub struct Jet2 {
    order: usize,
    c: [f64; MAX_COEFFS],
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet2")
            .field("order", &self.order)
            .field("coeffs", &self.coeffs())
            .finish()
    }
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        Err(Error::OrderTooHigh {
            requested: order,
            max: MAX_ORDER,
        })
    } else {
        Ok(())
    }
}

impl Jet2 {
    /// Zero jet. Panics if `order > MAX_ORDER`; use [`Jet2::try_zero`] for a checked version.
    pub fn zero(order: usize) -> Self {
        Self::try_zero(order).expect("jet order out of range")
    }

    pub fn try_zero(order: usize) -> Result<Self> {
        check_order(order)?;
        Ok(Jet2 {
            order,
            c: [0.0; MAX_COEFFS],
        })
    }

    pub fn constant(value: f64, order: usize) -> Self {
        let mut j = Self::zero(order);
        j.c[0] = value;
        j
    }

    /// The coordinate function `u` expanded at `u0`.
    pub fn variable_u(u0: f64, order: usize) -> Self {
        let mut j = Self::constant(u0, order);
        if order >= 1 {
            j.c[coeff_index(1, 0)] = 1.0;
        }
        j
    }

    /// The coordinate function `v` expanded at `v0`.
    pub fn variable_v(v0: f64, order: usize) -> Self {
        let mut j = Self::constant(v0, order);
        if order >= 1 {
            j.c[coeff_index(0, 1)] = 1.0;
        }
        j
    }

    /// Builds a jet from coefficients in graded-lexicographic order.
    pub fn from_coeffs(order: usize, coeffs: &[f64]) -> Result<Self> {
        let mut j = Self::try_zero(order)?;
        if coeffs.len() != coeff_count(order) {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients for order {order}, got {}",
                coeff_count(order),
                coeffs.len()
            )));
        }
        j.c[..coeffs.len()].copy_from_slice(coeffs);
        Ok(j)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn len(&self) -> usize {
        coeff_count(self.order)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c[..self.len()]
    }

    /// Coefficient of `du^i dv^j`; zero beyond the order.
    #[inline]
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order {
            0.0
        } else {
            self.c[coeff_index(i, j)]
        }
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, value: f64) {
        assert!(i + j <= self.order, "multi-index beyond jet order");
        self.c[coeff_index(i, j)] = value;
    }

    /// Value at the base point.
    #[inline]
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// First partials `(g_u, g_v)` at the base point.
    #[inline]
    pub fn gradient(&self) -> [f64; 2] {
        [self.coeff(1, 0), self.coeff(0, 1)]
    }

    /// Second partials `[[g_uu, g_uv], [g_uv, g_vv]]` at the base point.
    pub fn hessian(&self) -> [[f64; 2]; 2] {
        let uv = self.coeff(1, 1);
        [
            [2.0 * self.coeff(2, 0), uv],
            [uv, 2.0 * self.coeff(0, 2)],
        ]
    }

    /// The mixed partial derivative `d^{i+j} g / du^i dv^j` at the base point.
    pub fn derivative(&self, i: usize, j: usize) -> f64 {
        self.coeff(i, j) * factorial(i) * factorial(j)
    }

    /// Discards every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.order {
            return *self;
        }
        let mut out = *self;
        out.order = order;
        for v in out.c[coeff_count(order)..].iter_mut() {
            *v = 0.0;
        }
        out
    }

    /// Evaluates the truncated polynomial at the offset `(du, dv)`.
    pub fn eval_offset(&self, du: f64, dv: f64) -> f64 {
        let mut acc = 0.0;
        for d in 0..=self.order {
            for j in 0..=d {
                let i = d - j;
                acc += self.c[coeff_index(i, j)] * du.powi(i as i32) * dv.powi(j as i32);
            }
        }
        acc
    }

    /// `dg/du` as a jet of one order less.
    pub fn partial_u(&self) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::OrderExhausted);
        }
        let mut out = Self::zero(self.order - 1);
        for d in 0..self.order {
            for j in 0..=d {
                let i = d - j;
                out.c[coeff_index(i, j)] = (i + 1) as f64 * self.c[coeff_index(i + 1, j)];
            }
        }
        Ok(out)
    }

    /// `dg/dv` as a jet of one order less.
    pub fn partial_v(&self) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::OrderExhausted);
        }
        let mut out = Self::zero(self.order - 1);
        for d in 0..self.order {
            for j in 0..=d {
                let i = d - j;
                out.c[coeff_index(i, j)] = (j + 1) as f64 * self.c[coeff_index(i, j + 1)];
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for v in out.c[..self.len()].iter_mut() {
            *v *= s;
        }
        out
    }

    pub fn add_scalar(&self, s: f64) -> Self {
        let mut out = *self;
        out.c[0] += s;
        out
    }

    fn binary(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        let order = self.order.min(other.order);
        let mut out = Self::zero(order);
        for k in 0..coeff_count(order) {
            out.c[k] = op(self.c[k], other.c[k]);
        }
        out
    }

    /// Truncated Cauchy product.
    pub fn mul_jet(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut out = Self::zero(order);
        for d1 in 0..=order {
            for j1 in 0..=d1 {
                let a = self.c[coeff_index(d1 - j1, j1)];
                if a == 0.0 {
                    continue;
                }
                let i1 = d1 - j1;
                for d2 in 0..=(order - d1) {
                    for j2 in 0..=d2 {
                        let i2 = d2 - j2;
                        out.c[coeff_index(i1 + i2, j1 + j2)] += a * other.c[coeff_index(i2, j2)];
                    }
                }
            }
        }
        out
    }

    pub fn square(&self) -> Self {
        self.mul_jet(self)
    }

    fn division_guard(&self) -> Result<()> {
        let b0 = self.c[0];
        let mag = self.coeffs().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if b0 == 0.0 || !b0.is_finite() || b0.abs() < 16.0 * f64::EPSILON * mag {
            return Err(Error::DivisionByZeroJet(b0));
        }
        Ok(())
    }

    /// `self / other`, solved coefficient by coefficient in graded order.
    pub fn div(&self, other: &Self) -> Result<Self> {
        other.division_guard()?;
        let order = self.order.min(other.order);
        let b0 = other.c[0];
        let mut out = Self::zero(order);
        for d in 0..=order {
            for j in 0..=d {
                let i = d - j;
                let mut acc = self.c[coeff_index(i, j)];
                // subtract sum over (i2,j2) != (0,0) of b[i2,j2] * c[i-i2, j-j2]
                for i2 in 0..=i {
                    for j2 in 0..=j {
                        if i2 == 0 && j2 == 0 {
                            continue;
                        }
                        acc -= other.c[coeff_index(i2, j2)] * out.c[coeff_index(i - i2, j - j2)];
                    }
                }
                out.c[coeff_index(i, j)] = acc / b0;
            }
        }
        Ok(out)
    }

    pub fn recip(&self) -> Result<Self> {
        Self::constant(1.0, self.order).div(self)
    }

    /// Composes a univariate function with this jet, given its scaled derivatives
    /// `taylor[k] = g^{(k)}(a0) / k!` at the constant term `a0`.
    pub fn compose(&self, taylor: &[f64]) -> Self {
        let order = self.order;
        let mut h = *self;
        h.c[0] = 0.0;
        let mut acc = Self::constant(taylor.get(order).copied().unwrap_or(0.0), order);
        for k in (0..order).rev() {
            acc = acc.mul_jet(&h);
            acc.c[0] += taylor[k];
        }
        acc
    }

    pub fn sqrt(&self) -> Result<Self> {
        let a0 = self.c[0];
        if !(a0 > 0.0) {
            return Err(Error::NegativeSqrtJet(a0));
        }
        Ok(self.compose(&power_series(a0, 0.5, self.order)))
    }

    /// Real power `self^p`; requires a positive constant term.
    pub fn powf(&self, p: f64) -> Result<Self> {
        let a0 = self.c[0];
        if !(a0 > 0.0) {
            return Err(Error::NonPositiveJet(a0));
        }
        Ok(self.compose(&power_series(a0, p, self.order)))
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::constant(1.0, self.order);
        for _ in 0..n {
            acc = acc.mul_jet(self);
        }
        acc
    }

    pub fn sin(&self) -> Self {
        let a0 = self.c[0];
        let (s, c) = a0.sin_cos();
        let taylor: Vec<f64> = (0..=self.order)
            .map(|k| {
                let d = match k % 4 {
                    0 => s,
                    1 => c,
                    2 => -s,
                    _ => -c,
                };
                d / factorial(k)
            })
            .collect();
        self.compose(&taylor)
    }

    pub fn cos(&self) -> Self {
        let a0 = self.c[0];
        let (s, c) = a0.sin_cos();
        let taylor: Vec<f64> = (0..=self.order)
            .map(|k| {
                let d = match k % 4 {
                    0 => c,
                    1 => -s,
                    2 => -c,
                    _ => s,
                };
                d / factorial(k)
            })
            .collect();
        self.compose(&taylor)
    }

    pub fn exp(&self) -> Self {
        let e = self.c[0].exp();
        let taylor: Vec<f64> = (0..=self.order).map(|k| e / factorial(k)).collect();
        self.compose(&taylor)
    }

    pub fn ln(&self) -> Result<Self> {
        let a0 = self.c[0];
        if !(a0 > 0.0) {
            return Err(Error::NonPositiveJet(a0));
        }
        let taylor: Vec<f64> = (0..=self.order)
            .map(|k| {
                if k == 0 {
                    a0.ln()
                } else {
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    sign / (k as f64 * a0.powi(k as i32))
                }
            })
            .collect();
        Ok(self.compose(&taylor))
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.coeffs().iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Scaled derivatives of `x^p` at `a0`: `binom(p, k) a0^{p-k}`.
fn power_series(a0: f64, p: f64, order: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(order + 1);
    let mut binom = 1.0;
    for k in 0..=order {
        out.push(binom * a0.powf(p - k as f64));
        binom *= (p - k as f64) / (k as f64 + 1.0);
    }
    out
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

impl Index<(usize, usize)> for Jet2 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(i + j <= self.order, "multi-index beyond jet order");
        &self.c[coeff_index(i, j)]
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        self.binary(&rhs, |a, b| a + b)
    }
}

impl AddAssign for Jet2 {
    fn add_assign(&mut self, rhs: Jet2) {
        *self = *self + rhs;
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        self.binary(&rhs, |a, b| a - b)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        self.mul_jet(&rhs)
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(rhs)
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        rhs.scale(self)
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: f64) -> Jet2 {
        self.add_scalar(rhs)
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: f64) -> Jet2 {
        self.add_scalar(-rhs)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

/// Derivative of `field` along the vector field `direction = (dir_u, dir_v)`:
/// `field_u * dir_u + field_v * dir_v`, one order lower than `field`.
pub fn directional_jet_derivative(field: &Jet2, direction: [&Jet2; 2]) -> Result<Jet2> {
    let du = field.partial_u()?;
    let dv = field.partial_v()?;
    Ok(du * *direction[0] + dv * *direction[1])
}

/// A vector in R^3 whose components are jets at a common base point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JetVec3 {
    pub x: Jet2,
    pub y: Jet2,
    pub z: Jet2,
}

impl JetVec3 {
    pub fn new(x: Jet2, y: Jet2, z: Jet2) -> Self {
        debug_assert!(x.order() == y.order() && y.order() == z.order());
        JetVec3 { x, y, z }
    }

    pub fn constant(v: [f64; 3], order: usize) -> Self {
        JetVec3::new(
            Jet2::constant(v[0], order),
            Jet2::constant(v[1], order),
            Jet2::constant(v[2], order),
        )
    }

    pub fn order(&self) -> usize {
        self.x.order().min(self.y.order()).min(self.z.order())
    }

    pub fn components(&self) -> [&Jet2; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub fn value(&self) -> [f64; 3] {
        [self.x.value(), self.y.value(), self.z.value()]
    }

    fn map(&self, f: impl Fn(&Jet2) -> Jet2) -> Self {
        JetVec3::new(f(&self.x), f(&self.y), f(&self.z))
    }

    fn try_map(&self, f: impl Fn(&Jet2) -> Result<Jet2>) -> Result<Self> {
        Ok(JetVec3::new(f(&self.x)?, f(&self.y)?, f(&self.z)?))
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map(|c| c.truncate(order))
    }

    pub fn partial_u(&self) -> Result<Self> {
        self.try_map(Jet2::partial_u)
    }

    pub fn partial_v(&self) -> Result<Self> {
        self.try_map(Jet2::partial_v)
    }

    pub fn dot(&self, other: &Self) -> Jet2 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn dot_const(&self, v: [f64; 3]) -> Jet2 {
        self.x * v[0] + self.y * v[1] + self.z * v[2]
    }

    pub fn cross(&self, o: &Self) -> Self {
        JetVec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn scale(&self, s: &Jet2) -> Self {
        self.map(|c| *c * *s)
    }

    pub fn scale_f64(&self, s: f64) -> Self {
        self.map(|c| c.scale(s))
    }

    pub fn div(&self, s: &Jet2) -> Result<Self> {
        let r = s.recip()?;
        Ok(self.scale(&r))
    }

    pub fn norm_sq(&self) -> Jet2 {
        self.dot(self)
    }

    pub fn norm(&self) -> Result<Jet2> {
        self.norm_sq().sqrt()
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm()?;
        self.div(&n)
    }

    /// Applies a constant 3x3 matrix (row major).
    pub fn linear(&self, m: &[[f64; 3]; 3]) -> Self {
        let row = |r: &[f64; 3]| self.x * r[0] + self.y * r[1] + self.z * r[2];
        JetVec3::new(row(&m[0]), row(&m[1]), row(&m[2]))
    }
}

impl Add for JetVec3 {
    type Output = JetVec3;
    fn add(self, o: JetVec3) -> JetVec3 {
        JetVec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for JetVec3 {
    type Output = JetVec3;
    fn sub(self, o: JetVec3) -> JetVec3 {
        JetVec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for JetVec3 {
    type Output = JetVec3;
    fn neg(self) -> JetVec3 {
        self.scale_f64(-1.0)
    }
}

/// `det(a, b, c)` of three jet vectors.
pub fn det3(a: &JetVec3, b: &JetVec3, c: &JetVec3) -> Jet2 {
    a.cross(b).dot(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u_squared_is_a_single_monomial() {
        let u = Jet2::variable_u(0.0, 2);
        let sq = u * u;
        assert_eq!(sq.coeff(2, 0), 1.0);
        for (k, c) in sq.coeffs().iter().enumerate() {
            if k != coeff_index(2, 0) {
                assert_eq!(*c, 0.0);
            }
        }
    }

    #[test]
    fn sin_times_cos() {
        let u = Jet2::variable_u(0.0, 2);
        let v = Jet2::variable_v(0.0, 2);
        let g = u.sin() * v.cos();
        assert!((g.coeff(1, 0) - 1.0).abs() < 1e-15);
        assert_eq!(g.coeff(1, 1), 0.0);
        assert_eq!(g.coeff(0, 2), 0.0);
        assert_eq!(g.coeff(2, 0), 0.0);
    }

    #[test]
    fn geometric_series() {
        let u = Jet2::variable_u(0.0, 3);
        let g = (u + 1.0).recip().unwrap();
        let expect = [1.0, -1.0, 1.0, -1.0];
        for (k, e) in expect.iter().enumerate() {
            assert!((g.coeff(k, 0) - e).abs() < 1e-15);
        }
    }

    #[test]
    fn division_errors() {
        let u = Jet2::variable_u(0.0, 2);
        assert!(matches!(
            Jet2::constant(1.0, 2).div(&u),
            Err(Error::DivisionByZeroJet(_))
        ));
        assert!(matches!(u.sqrt(), Err(Error::NegativeSqrtJet(_))));
        assert!(matches!(
            Jet2::constant(-1.0, 1).sqrt(),
            Err(Error::NegativeSqrtJet(_))
        ));
        assert!(matches!(
            Jet2::constant(1.0, 0).partial_u(),
            Err(Error::OrderExhausted)
        ));
        assert!(Jet2::try_zero(MAX_ORDER + 1).is_err());
    }

    #[test]
    fn directional_derivative_examples() {
        let u = Jet2::variable_u(0.0, 2);
        let v = Jet2::variable_v(0.0, 2);
        let one = Jet2::constant(1.0, 2);
        let zero = Jet2::zero(2);
        let d = directional_jet_derivative(&u, [&one, &zero]).unwrap();
        assert_eq!(d.value(), 1.0);
        assert_eq!(d.order(), 1);
        let g = u * u + v;
        let d = directional_jet_derivative(&g, [&zero, &one]).unwrap();
        assert_eq!(d.value(), 1.0);
    }

    #[test]
    fn sqrt_and_pow_agree() {
        let u = Jet2::variable_u(0.3, 5);
        let v = Jet2::variable_v(-0.2, 5);
        let g = u * u + v * v + 1.0;
        let a = g.sqrt().unwrap();
        let b = g.powf(0.5).unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).abs() < 1e-14);
        }
        let back = a * a;
        for (x, y) in back.coeffs().iter().zip(g.coeffs()) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn exp_ln_roundtrip() {
        let u = Jet2::variable_u(0.7, 6);
        let v = Jet2::variable_v(0.1, 6);
        let g = u * v + u.sin() + 2.0;
        let r = g.ln().unwrap().exp();
        for (x, y) in r.coeffs().iter().zip(g.coeffs()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn eval_offset_matches_function() {
        let u = Jet2::variable_u(0.4, 7);
        let v = Jet2::variable_v(0.9, 7);
        let g = (u * v).sin() + v.exp();
        let (du, dv) = (1e-2, -2e-2);
        let exact = ((0.4 + du) * (0.9 + dv) as f64).sin() + (0.9f64 + dv).exp();
        assert!((g.eval_offset(du, dv) - exact).abs() < 1e-14);
    }
}
