//! Forward-mode dual numbers with two infinitesimal directions.
//!
//! `Dual { v, dx, dy }` carries a value and its partial derivatives in `x`
//! and `y`. Evaluating a rational function on `Dual::var_x(x)` and
//! `Dual::var_y(y)` gives the exact gradient when the underlying scalar is
//! exact.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Field;

#[derive(Debug, Clone, PartialEq)]
pub struct Dual<S> {
    pub v: S,
    pub dx: S,
    pub dy: S,
}

impl<S: Field> Dual<S> {
    pub fn constant(v: S) -> Self {
        Dual {
            v,
            dx: S::zero(),
            dy: S::zero(),
        }
    }

    pub fn var_x(v: S) -> Self {
        Dual {
            v,
            dx: S::one(),
            dy: S::zero(),
        }
    }

    pub fn var_y(v: S) -> Self {
        Dual {
            v,
            dx: S::zero(),
            dy: S::one(),
        }
    }
}

impl<S: Field> Add for Dual<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual {
            v: self.v + o.v,
            dx: self.dx + o.dx,
            dy: self.dy + o.dy,
        }
    }
}

impl<S: Field> Sub for Dual<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual {
            v: self.v - o.v,
            dx: self.dx - o.dx,
            dy: self.dy - o.dy,
        }
    }
}

impl<S: Field> Mul for Dual<S> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Dual {
            dx: self.dx * o.v.clone() + self.v.clone() * o.dx,
            dy: self.dy * o.v.clone() + self.v.clone() * o.dy,
            v: self.v * o.v,
        }
    }
}

impl<S: Field> Div for Dual<S> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.v / o.v.clone();
        Dual {
            dx: (self.dx - q.clone() * o.dx) / o.v.clone(),
            dy: (self.dy - q.clone() * o.dy) / o.v,
            v: q,
        }
    }
}

impl<S: Field> Neg for Dual<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual {
            v: -self.v,
            dx: -self.dx,
            dy: -self.dy,
        }
    }
}

impl<S: Field> Field for Dual<S> {
    fn zero() -> Self {
        Dual::constant(S::zero())
    }
    fn one() -> Self {
        Dual::constant(S::one())
    }
    fn from_i64(v: i64) -> Self {
        Dual::constant(S::from_i64(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Exact};

    #[test]
    fn product_and_quotient_rules() {
        let x = Dual::var_x(q(3, 1));
        let y = Dual::var_y(q(4, 1));
        // f = x^2 y / (x + y)
        let f = x.clone() * x.clone() * y.clone() / (x + y);
        assert_eq!(f.v, q(36, 7));
        // df/dx = (2xy(x+y) - x^2 y) / (x+y)^2 = (168 - 36) / 49
        assert_eq!(f.dx, q(132, 49));
        // df/dy = (x^2(x+y) - x^2 y) / (x+y)^2 = 27 / 49
        assert_eq!(f.dy, q(27, 49));
    }

    #[test]
    fn constants_have_no_derivative() {
        let c: Dual<Exact> = Dual::from_i64(5);
        let x = Dual::var_x(q(1, 2));
        let f = c * x;
        assert_eq!(f.dx, q(5, 1));
        assert_eq!(f.dy, q(0, 1));
    }
}
