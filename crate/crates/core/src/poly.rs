//! Dense univariate polynomials with exact rational coefficients.

use crate::exact::Rational;
use num_traits::Zero;
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// Polynomial over `Rational`, coefficients stored in ascending degree order.
///
/// Canonical form: empty vector for the zero polynomial, nonzero leading
/// coefficient otherwise. Evaluation at a rational point is exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RPoly {
    coeffs: Vec<Rational>,
}

impl RPoly {
    pub fn zero() -> Self {
        RPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// Build from ascending-degree coefficients; trailing zeros are stripped.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        let mut p = RPoly { coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Coefficient of s^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exact evaluation by Horner's rule.
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Adds `c` to the coefficient of s^i.
    pub fn add_term(&mut self, i: usize, c: Rational) {
        if self.coeffs.len() <= i {
            self.coeffs.resize(i + 1, Rational::zero());
        }
        self.coeffs[i] += c;
        self.normalize();
    }
}

impl Add for RPoly {
    type Output = RPoly;
    fn add(self, rhs: RPoly) -> RPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + rhs.coeff(i));
        }
        RPoly::from_coeffs(out)
    }
}

impl Sub for RPoly {
    type Output = RPoly;
    fn sub(self, rhs: RPoly) -> RPoly {
        self + (-rhs)
    }
}

impl Neg for RPoly {
    type Output = RPoly;
    fn neg(self) -> RPoly {
        RPoly::from_coeffs(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl fmt::Display for RPoly {
    /// Descending-degree rendering, e.g. `1/3 s^3 + 1/2 s^2 + 1/6 s - 1/120`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let one = Rational::from(num_bigint::BigInt::from(1));
        let mut first = true;
        for i in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            let mag = if c < &Rational::zero() { -c.clone() } else { c.clone() };
            if first {
                if c < &Rational::zero() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c < &Rational::zero() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if mag != one {
                        write!(f, "{mag} ")?;
                    }
                    if i == 1 {
                        write!(f, "s")?;
                    } else {
                        write!(f, "s^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};

    #[test]
    fn canonical_form() {
        let p = RPoly::from_coeffs(vec![rat_int(1), rat_int(0), rat_int(0)]);
        assert_eq!(p.degree(), Some(0));
        assert!(RPoly::from_coeffs(vec![rat_int(0)]).is_zero());
    }

    #[test]
    fn exact_eval() {
        // p(s) = s^2/2 - 1/3 at s = 5/7
        let p = RPoly::from_coeffs(vec![rat(-1, 3), rat_int(0), rat(1, 2)]);
        assert_eq!(p.eval(&rat(5, 7)), rat(-23, 294));
    }

    #[test]
    fn display_format() {
        let a2 = RPoly::from_coeffs(vec![rat_int(0), rat(1, 6), rat(1, 2), rat(1, 3)]);
        assert_eq!(a2.to_string(), "1/3 s^3 + 1/2 s^2 + 1/6 s");
        let b0 = RPoly::from_coeffs(vec![rat(1, 2), rat_int(-1)]);
        assert_eq!(b0.to_string(), "-s + 1/2");
        let a3 = RPoly::from_coeffs(vec![rat(-1, 120), rat_int(0), rat(1, 4), rat(1, 2), rat(1, 4)]);
        assert_eq!(a3.to_string(), "1/4 s^4 + 1/2 s^3 + 1/4 s^2 - 1/120");
        assert_eq!(RPoly::zero().to_string(), "0");
    }
}
