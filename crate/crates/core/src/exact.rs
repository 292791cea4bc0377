//! Exact rational combinatorics: Bernoulli numbers, the Laurent coefficients
//! of 1/(1-e^{-t}), Bernoulli-like polynomials, Faulhaber power sums, harmonic
//! numbers, and the correction constants r_n, r̂_n, ã_j.
//!
//! Everything here is exact; no rounding ever happens. Small memo tables are
//! shared behind mutexes and grow monotonically.

use crate::error::{Error, Result};
use crate::poly::RPoly;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use std::sync::Mutex;

/// Exact arbitrary-size rational, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// `p/q` as a `Rational`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Integer `n` as a `Rational`.
pub fn rat_int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

/// Exact `n!` as a `BigInt`.
pub fn factorial(n: u32) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, k| acc * k)
}

/// Exact binomial coefficient C(n, k); zero for k > n.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= n as u64 - i as u64;
        den *= i as u64 + 1;
    }
    num / den
}

static BERNOULLI: Lazy<Mutex<Vec<Rational>>> =
    Lazy::new(|| Mutex::new(vec![Rational::one()]));

/// Bernoulli number B_k in the generating-function convention with B_1 = -1/2.
///
/// Computed by the defining convolution recurrence
/// sum_{j=0}^{k} C(k+1, j) B_j = 0 with memoization.
pub fn bernoulli_number(k: u32) -> Rational {
    let mut table = BERNOULLI.lock().unwrap();
    while table.len() <= k as usize {
        let m = table.len() as u32;
        let mut acc = Rational::zero();
        for (j, bj) in table.iter().enumerate() {
            acc += Rational::from(binomial(m + 1, j as u32)) * bj;
        }
        let next = -acc / Rational::from(BigInt::from(m as u64 + 1));
        table.push(next);
    }
    table[k as usize].clone()
}

/// Laurent coefficient b_k of 1/(1-e^{-t}) = sum_{k>=-1} b_k t^k.
///
/// b_{-1} = 1 and b_k = (-1)^{k+1} B_{k+1}/(k+1)! for k >= 0.
pub fn b_coeff(k: i32) -> Rational {
    assert!(k >= -1, "b_coeff requires k >= -1, got {k}");
    if k == -1 {
        return Rational::one();
    }
    let k = k as u32;
    let sign = if k % 2 == 0 { -1 } else { 1 };
    rat_int(sign) * bernoulli_number(k + 1) / Rational::from(factorial(k + 1))
}

/// The degree-(k+1) polynomial b_k(s) = sum_{j=0}^{k+1} (-1)^j b_{k-j} s^j / j!.
///
/// Satisfies b_k(0) = b_k.
pub fn b_poly(k: u32) -> RPoly {
    let coeffs = (0..=k + 1)
        .map(|j| {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            rat_int(sign) * b_coeff(k as i32 - j as i32) / Rational::from(factorial(j))
        })
        .collect();
    RPoly::from_coeffs(coeffs)
}

/// Polynomial P_k with P_k(s) = sum_{j=0}^{s-1} j^k for integer s >= 1,
/// under the convention 0^0 = 1 (so P_0(s) = s).
///
/// For k >= 1 the constant term is zero:
/// P_k(s) = (-1)^{k+1} k! sum_{j=1}^{k+1} (-1)^j b_{k-j} s^j / j!.
pub fn faulhaber_poly(k: u32) -> RPoly {
    if k == 0 {
        return RPoly::from_coeffs(vec![Rational::zero(), Rational::one()]);
    }
    let sign = if k % 2 == 0 { -1 } else { 1 };
    let kfac = Rational::from(factorial(k)) * rat_int(sign);
    let mut coeffs = vec![Rational::zero()];
    for j in 1..=k + 1 {
        let jsign = if j % 2 == 0 { 1 } else { -1 };
        coeffs.push(
            &kfac * rat_int(jsign) * b_coeff(k as i32 - j as i32)
                / Rational::from(factorial(j)),
        );
    }
    RPoly::from_coeffs(coeffs)
}

static HARMONIC: Lazy<Mutex<Vec<Rational>>> =
    Lazy::new(|| Mutex::new(vec![Rational::zero()]));

/// Harmonic number H_n = 1 + 1/2 + ... + 1/n, with H_0 = 0.
pub fn harmonic(n: u32) -> Rational {
    let mut table = HARMONIC.lock().unwrap();
    while table.len() <= n as usize {
        let m = table.len() as u64;
        let next = table.last().unwrap() + Rational::new(BigInt::one(), BigInt::from(m));
        table.push(next);
    }
    table[n as usize].clone()
}

/// The rational correction r_n = sum_{h=-1}^{n-1} b_h (-1)^{n-h+1}/(n-h)! H_{n-h}.
///
/// r_{-1} = 0 (empty sum).
pub fn r_n(n: i32) -> Rational {
    assert!(n >= -1, "r_n requires n >= -1, got {n}");
    let mut acc = Rational::zero();
    for h in -1..n {
        let d = (n - h) as u32;
        let sign = if d % 2 == 0 { -1 } else { 1 };
        acc += b_coeff(h) * rat_int(sign) * harmonic(d) / Rational::from(factorial(d));
    }
    acc
}

/// The unscaled correction r̂_n, a double sum over the b-coefficients.
///
/// Satisfies r_n = ((-1)^n / n!) r̂_n.
pub fn r_hat(n: u32) -> Rational {
    let nfac = Rational::from(factorial(n));
    let mut acc = Rational::zero();
    for j in 1..=n as i32 + 1 {
        for h in -1..=(n as i32 - j) {
            let sign = if (j + h) % 2 == 0 { 1 } else { -1 };
            acc += rat_int(sign) * b_coeff(h) * &nfac
                / (Rational::from(factorial((n as i32 - h - j) as u32))
                    * Rational::from(factorial(j as u32))
                    * rat_int(j as i64));
        }
    }
    acc
}

/// Coefficient ã_j of the shifted asymptotic polynomial Ã_n(s):
/// ã_j = sum_{k=-1}^{n-j} b_k (-1)^{k+1} n! / ((n-k-j)! j!).
pub fn tilde_a(n: u32, j: u32) -> Result<Rational> {
    if j > n + 1 {
        return Err(Error::Domain(format!(
            "tilde_a: j must lie in [0, {}], got {j}",
            n + 1
        )));
    }
    let nfac = Rational::from(factorial(n));
    let mut acc = Rational::zero();
    for k in -1..=(n as i32 - j as i32) {
        let sign = if k % 2 == 0 { -1 } else { 1 };
        acc += b_coeff(k) * rat_int(sign) * &nfac
            / (Rational::from(factorial((n as i32 - k - j as i32) as u32))
                * Rational::from(factorial(j)));
    }
    Ok(acc)
}

/// The shift-of-variable correction sum_{k=1}^{n+1} ((-1)^{k+1}/k) ã_k.
///
/// Equals r̂_n identically.
pub fn shift_correction(n: u32) -> Rational {
    let mut acc = Rational::zero();
    for k in 1..=n + 1 {
        let sign = if k % 2 == 0 { -1 } else { 1 };
        acc += rat_int(sign) * tilde_a(n, k).expect("k <= n+1 by construction")
            / rat_int(k as i64);
    }
    acc
}

/// Sum of |b_k| for k in [-1, n]; used by truncation bounds.
pub fn b_abs_sum(n: i32) -> Rational {
    (-1..=n).map(|k| b_coeff(k).abs()).fold(Rational::zero(), |a, x| a + x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_small_values() {
        assert_eq!(bernoulli_number(0), rat_int(1));
        assert_eq!(bernoulli_number(1), rat(-1, 2));
        assert_eq!(bernoulli_number(2), rat(1, 6));
        assert_eq!(bernoulli_number(12), rat(-691, 2730));
    }

    #[test]
    fn bernoulli_recurrence_cross_check() {
        // independent summation of the defining recurrence at a higher index
        for k in [13u32, 20] {
            let mut acc = Rational::zero();
            for j in 0..=k {
                acc += Rational::from(binomial(k + 1, j)) * bernoulli_number(j);
            }
            assert!(acc.is_zero(), "recurrence fails at k = {k}");
        }
    }

    #[test]
    fn b_coeff_paper_expansion() {
        // 1/(1-e^{-t}) = 1/t + 1/2 + t/12 - t^3/720 + ...
        assert_eq!(b_coeff(-1), rat_int(1));
        assert_eq!(b_coeff(0), rat(1, 2));
        assert_eq!(b_coeff(1), rat(1, 12));
        assert_eq!(b_coeff(2), rat_int(0));
        assert_eq!(b_coeff(3), rat(-1, 720));
    }

    #[test]
    fn even_b_coefficients_vanish() {
        for k in 1..=25 {
            assert!(b_coeff(2 * k).is_zero(), "b_{} should vanish", 2 * k);
        }
    }

    #[test]
    fn b_poly_small() {
        assert_eq!(b_poly(0), RPoly::from_coeffs(vec![rat(1, 2), rat_int(-1)]));
        assert_eq!(
            b_poly(1),
            RPoly::from_coeffs(vec![rat(1, 12), rat(-1, 2), rat(1, 2)])
        );
    }

    #[test]
    fn b_poly_at_zero_is_b_coeff() {
        for k in 0..=20 {
            assert_eq!(b_poly(k).eval(&Rational::zero()), b_coeff(k as i32));
        }
    }

    #[test]
    fn faulhaber_matches_brute_force() {
        for k in 0..=10u32 {
            let p = faulhaber_poly(k);
            for s in 1..=100i64 {
                let brute: BigInt = (0..s)
                    .map(|j| {
                        if j == 0 && k == 0 {
                            BigInt::one() // 0^0 = 1
                        } else {
                            BigInt::from(j).pow(k)
                        }
                    })
                    .sum();
                let v = p.eval(&rat_int(s));
                assert!(v.is_integer(), "P_{k}({s}) not an integer");
                assert_eq!(v.to_integer(), brute, "P_{k}({s})");
            }
        }
    }

    #[test]
    fn faulhaber_convention_examples() {
        assert_eq!(faulhaber_poly(2).eval(&rat_int(4)), rat_int(14));
        assert_eq!(faulhaber_poly(0).eval(&rat_int(3)), rat_int(3));
        assert!(faulhaber_poly(7).eval(&Rational::zero()).is_zero());
    }

    #[test]
    fn faulhaber_from_b_poly_identity() {
        // sum_{j<s} j^k = (-1)^k k! (b_k - b_k(s)) as polynomials
        for k in 1..=10u32 {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let scale = rat_int(sign) * Rational::from(factorial(k));
            let expected =
                (RPoly::constant(b_coeff(k as i32)) - b_poly(k)).scale(&scale);
            assert_eq!(faulhaber_poly(k), expected, "k = {k}");
        }
    }

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(0), Rational::zero());
        assert_eq!(harmonic(2), rat(3, 2));
        assert_eq!(harmonic(4), rat(25, 12));
    }

    #[test]
    fn harmonic_binomial_identity() {
        // sum_{k=1}^{n} (-1)^k C(n,k)/k = -H_n
        for n in 1..=30u32 {
            let mut acc = Rational::zero();
            for k in 1..=n {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                acc += rat_int(sign) * Rational::from(binomial(n, k)) / rat_int(k as i64);
            }
            assert_eq!(acc, -harmonic(n), "n = {n}");
        }
    }

    #[test]
    fn r_n_paper_values() {
        assert_eq!(r_n(-1), Rational::zero());
        assert_eq!(r_n(0), rat_int(1));
        assert_eq!(r_n(1), rat(-1, 4));
        assert_eq!(r_n(2), rat(1, 72));
        assert_eq!(r_n(3), rat(1, 288));
    }

    #[test]
    fn r_hat_values_and_scaling() {
        assert_eq!(r_hat(0), rat_int(1));
        assert_eq!(r_hat(1), rat(1, 4));
        for n in 0..=12u32 {
            let sign = if n % 2 == 0 { 1 } else { -1 };
            let scaled = rat_int(sign) * r_hat(n) / Rational::from(factorial(n));
            assert_eq!(scaled, r_n(n as i32), "n = {n}");
        }
    }

    #[test]
    fn tilde_a_values() {
        assert_eq!(tilde_a(0, 1).unwrap(), rat_int(1));
        assert_eq!(tilde_a(0, 0).unwrap(), rat(1, 2));
        assert_eq!(tilde_a(1, 2).unwrap(), rat(1, 2));
        assert!(tilde_a(1, 3).is_err());
    }

    #[test]
    fn shift_correction_equals_r_hat() {
        assert_eq!(shift_correction(0), rat_int(1));
        assert_eq!(shift_correction(1), rat(1, 4));
        for n in 0..=10u32 {
            assert_eq!(shift_correction(n), r_hat(n), "n = {n}");
        }
    }

    #[test]
    fn pure_across_threads() {
        let handles: Vec<_> = (0..4)
            .map(|_| {
                std::thread::spawn(|| {
                    (bernoulli_number(30), r_n(10), harmonic(50), r_hat(9))
                })
            })
            .collect();
        let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        for w in results.windows(2) {
            assert_eq!(w[0], w[1]);
        }
    }
}
