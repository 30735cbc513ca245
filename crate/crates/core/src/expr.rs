//! Closed catalog of coefficient expressions in `x` and `t`.
//!
//! Coefficients, sources and data of a problem are built from constants, `x`,
//! `t`, the four arithmetic operations, constant real powers and
//! `sin`/`cos`/`exp`. Every expression can be differentiated symbolically, which
//! the diagnostics rely on (`φ₀''`, `q₀'`, `∂_t^k u` of manufactured solutions).

use alloc::boxed::Box;
use core::fmt;
use core::ops;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    X,
    T,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// `base^exponent` with a constant real exponent.
    Pow(Box<Expr>, f64),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn constant(c: f64) -> Self {
        Expr::Const(c)
    }

    pub fn zero() -> Self {
        Expr::Const(0.0)
    }

    pub fn one() -> Self {
        Expr::Const(1.0)
    }

    pub fn x() -> Self {
        Expr::X
    }

    pub fn t() -> Self {
        Expr::T
    }

    pub fn sin(self) -> Self {
        match self {
            Expr::Const(c) => Expr::Const(libm::sin(c)),
            e => Expr::Sin(Box::new(e)),
        }
    }

    pub fn cos(self) -> Self {
        match self {
            Expr::Const(c) => Expr::Const(libm::cos(c)),
            e => Expr::Cos(Box::new(e)),
        }
    }

    pub fn exp(self) -> Self {
        match self {
            Expr::Const(c) => Expr::Const(libm::exp(c)),
            e => Expr::Exp(Box::new(e)),
        }
    }

    pub fn powf(self, exponent: f64) -> Self {
        match self {
            _ if exponent == 0.0 => Expr::one(),
            e if exponent == 1.0 => e,
            Expr::Const(c) => Expr::Const(libm::pow(c, exponent)),
            e => Expr::Pow(Box::new(e), exponent),
        }
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// True when the expression does not mention `var`.
    pub fn is_free_of(&self, var: Var) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::X => var != Var::X,
            Expr::T => var != Var::T,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => {
                a.is_free_of(var)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_free_of(var) && b.is_free_of(var)
            }
        }
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::X => x,
            Expr::T => t,
            Expr::Neg(a) => -a.eval(x, t),
            Expr::Add(a, b) => a.eval(x, t) + b.eval(x, t),
            Expr::Sub(a, b) => a.eval(x, t) - b.eval(x, t),
            Expr::Mul(a, b) => a.eval(x, t) * b.eval(x, t),
            Expr::Div(a, b) => a.eval(x, t) / b.eval(x, t),
            Expr::Pow(a, e) => libm::pow(a.eval(x, t), *e),
            Expr::Sin(a) => libm::sin(a.eval(x, t)),
            Expr::Cos(a) => libm::cos(a.eval(x, t)),
            Expr::Exp(a) => libm::exp(a.eval(x, t)),
        }
    }

    /// Symbolic partial derivative.
    pub fn diff(&self, var: Var) -> Expr {
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::X => Expr::Const(if var == Var::X { 1.0 } else { 0.0 }),
            Expr::T => Expr::Const(if var == Var::T { 1.0 } else { 0.0 }),
            Expr::Neg(a) => -a.diff(var),
            Expr::Add(a, b) => a.diff(var) + b.diff(var),
            Expr::Sub(a, b) => a.diff(var) - b.diff(var),
            Expr::Mul(a, b) => a.diff(var) * (**b).clone() + (**a).clone() * b.diff(var),
            Expr::Div(a, b) => {
                let num = a.diff(var) * (**b).clone() - (**a).clone() * b.diff(var);
                num / (**b).clone().powf(2.0)
            }
            Expr::Pow(a, e) => Expr::Const(*e) * (**a).clone().powf(e - 1.0) * a.diff(var),
            Expr::Sin(a) => (**a).clone().cos() * a.diff(var),
            Expr::Cos(a) => -((**a).clone().sin()) * a.diff(var),
            Expr::Exp(a) => self.clone() * a.diff(var),
        }
    }

    /// `n`-th partial derivative.
    pub fn diff_n(&self, var: Var, n: u32) -> Expr {
        (0..n).fold(self.clone(), |e, _| e.diff(var))
    }

    /// Replaces `t` by a constant.
    pub fn at_time(&self, t0: f64) -> Expr {
        self.substitute(Var::T, t0)
    }

    pub fn substitute(&self, var: Var, value: f64) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::X if var == Var::X => Expr::Const(value),
            Expr::T if var == Var::T => Expr::Const(value),
            Expr::X => Expr::X,
            Expr::T => Expr::T,
            Expr::Neg(a) => -a.substitute(var, value),
            Expr::Add(a, b) => a.substitute(var, value) + b.substitute(var, value),
            Expr::Sub(a, b) => a.substitute(var, value) - b.substitute(var, value),
            Expr::Mul(a, b) => a.substitute(var, value) * b.substitute(var, value),
            Expr::Div(a, b) => a.substitute(var, value) / b.substitute(var, value),
            Expr::Pow(a, e) => a.substitute(var, value).powf(*e),
            Expr::Sin(a) => a.substitute(var, value).sin(),
            Expr::Cos(a) => a.substitute(var, value).cos(),
            Expr::Exp(a) => a.substitute(var, value).exp(),
        }
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Self {
        Expr::Const(c)
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(a) => *a,
            e => Expr::Neg(Box::new(e)),
        }
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Const(a), Expr::Const(b)) => Expr::Const(a + b),
            (Expr::Const(0.0), e) | (e, Expr::Const(0.0)) => e,
            (a, b) => Expr::Add(Box::new(a), Box::new(b)),
        }
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Const(a), Expr::Const(b)) => Expr::Const(a - b),
            (e, Expr::Const(0.0)) => e,
            (Expr::Const(0.0), e) => -e,
            (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Const(a), Expr::Const(b)) => Expr::Const(a * b),
            (Expr::Const(0.0), _) | (_, Expr::Const(0.0)) => Expr::zero(),
            (Expr::Const(1.0), e) | (e, Expr::Const(1.0)) => e,
            (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Const(a), Expr::Const(b)) => Expr::Const(a / b),
            (Expr::Const(0.0), _) => Expr::zero(),
            (e, Expr::Const(1.0)) => e,
            (a, b) => Expr::Div(Box::new(a), Box::new(b)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::X => f.write_str("x"),
            Expr::T => f.write_str("t"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "{a}/({b})"),
            Expr::Pow(a, e) => write!(f, "({a})^({e})"),
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn derivatives_of_catalog_terms() {
        let u = (Expr::one() + Expr::t().powf(2.0)) * Expr::x().sin();
        let ut = u.diff(Var::T);
        let uxx = u.diff_n(Var::X, 2);
        for &(x, t) in &[(0.3, 0.7), (1.2, 0.0), (2.9, 1.5)] {
            assert_relative_eq!(ut.eval(x, t), 2.0 * t * libm::sin(x), epsilon = 1e-15);
            assert_relative_eq!(uxx.eval(x, t), -(1.0 + t * t) * libm::sin(x), epsilon = 1e-15);
        }
    }

    #[test]
    fn quotient_and_exp_rules_match_finite_differences() {
        let e = (Expr::x() * Expr::t()).exp() / (Expr::one() + Expr::x().powf(2.0));
        let dx = e.diff(Var::X);
        let h = 1e-6;
        let (x, t) = (0.4, 0.9);
        let fd = (e.eval(x + h, t) - e.eval(x - h, t)) / (2.0 * h);
        assert_relative_eq!(dx.eval(x, t), fd, max_relative = 1e-8);
    }

    #[test]
    fn constant_folding_and_substitution() {
        let e = Expr::constant(2.0) * Expr::t() + Expr::x();
        assert!(e.diff(Var::X).as_const() == Some(1.0));
        assert_eq!(e.at_time(0.0), Expr::X);
        assert!(e.at_time(0.0).is_free_of(Var::T));
        assert!(!e.is_free_of(Var::T));
    }

    #[test]
    fn fractional_power_of_zero_time_is_zero() {
        let e = Expr::t().powf(1.5);
        assert_eq!(e.eval(0.0, 0.0), 0.0);
        assert_relative_eq!(e.eval(0.0, 4.0), 8.0);
    }
}
