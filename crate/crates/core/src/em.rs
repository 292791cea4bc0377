//! Independent Euler–Maclaurin oracle: computes S_n from partial sums of
//! k^n log k (and of k^n for n <= -1), and builds the exact asymptotic
//! polynomials A_n(s), B_n(s) of the expansion
//! sum_{k<=s} k^n log k = A_n(s) log s + B_n(s) + S_n + O(1/s).
//!
//! The estimate is the partial sum minus the exact polynomial terms minus the
//! decaying Euler–Maclaurin correction terms; its error is O(s^{n-2J-1}).

use crate::exact::{bernoulli_number, factorial, harmonic, rat_int, Rational};
use crate::poly::RPoly;
use crate::real::{PrecisionPolicy, Real};
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Closed form of d^m/dx^m [x^n log x] = log_coeff x^{n-m} log x + plain_coeff x^{n-m}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EMDerivative {
    pub n: u32,
    pub m: u32,
    pub log_coeff: Rational,
    pub plain_coeff: Rational,
    /// n - m
    pub power: i32,
}

/// Derivative coefficients of x^n log x, m >= 1.
///
/// For m <= n both coefficients are falling-factorial/harmonic expressions;
/// for m > n the log part is gone and the plain part alternates in sign.
pub fn em_derivative(n: u32, m: u32) -> EMDerivative {
    assert!(m >= 1, "derivative order must be >= 1");
    let (log_coeff, plain_coeff) = if m <= n {
        let ff = Rational::from(factorial(n) / factorial(n - m));
        let pc = &ff * (harmonic(n) - harmonic(n - m));
        (ff, pc)
    } else {
        let sign = if (m - n - 1) % 2 == 0 { 1 } else { -1 };
        let pc = rat_int(sign) * Rational::from(factorial(n) * factorial(m - n - 1));
        (Rational::zero(), pc)
    };
    EMDerivative {
        n,
        m,
        log_coeff,
        plain_coeff,
        power: n as i32 - m as i32,
    }
}

/// B_{2j}/(2j)!, the Euler–Maclaurin weight of the (2j-1)-th derivative.
fn em_weight(j: u32) -> Rational {
    bernoulli_number(2 * j) / Rational::from(factorial(2 * j))
}

/// The exact asymptotic polynomials A_n (log-coefficient) and B_n (pure part).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsymptoticExpansion {
    pub n: u32,
    /// coefficient polynomial of log s; degree n+1, may carry a constant term
    pub a: RPoly,
    /// pure polynomial part; degree n+1, zero constant term
    pub b: RPoly,
    pub order_used: u32,
}

/// Builds A_n, B_n by collecting the Euler–Maclaurin terms of nonnegative
/// power: the integral term, half of f(s), and the derivative terms with
/// 2j-1 <= n. Constants are excluded from B (they belong to S_n).
pub fn asymptotic_polys(n: u32, j_max: u32) -> AsymptoticExpansion {
    assert!(2 * j_max >= n + 1, "order too low for degree {n}");
    let mut a = RPoly::zero();
    let mut b = RPoly::zero();
    a.add_term(n as usize + 1, rat_int(1) / rat_int(n as i64 + 1));
    a.add_term(n as usize, rat_int(1) / rat_int(2));
    b.add_term(
        n as usize + 1,
        rat_int(-1) / rat_int((n as i64 + 1) * (n as i64 + 1)),
    );
    let mut j = 1;
    while 2 * j - 1 <= n {
        let d = em_derivative(n, 2 * j - 1);
        let w = em_weight(j);
        let pow = d.power as usize; // n - (2j-1) >= 0 here
        a.add_term(pow, &w * &d.log_coeff);
        if pow >= 1 {
            b.add_term(pow, &w * &d.plain_coeff);
        }
        j += 1;
    }
    AsymptoticExpansion { n, a, b, order_used: j_max }
}

/// s^k as an exact rational for integer s >= 1 and any integer k.
pub(crate) fn int_pow(s: u32, k: i32) -> Rational {
    let p = BigInt::from(s as u64).pow(k.unsigned_abs());
    if k >= 0 {
        Rational::from(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// Euler–Maclaurin estimate of S_n for n >= 0:
/// partial sum - A_n(s) log s - B_n(s) - sum over the decaying terms
/// (2j-1 > n, j <= J) of w_j f^{(2j-1)}(s), with error O(s^{n-2J-1}).
///
/// Everything except the partial sum and log s is assembled in exact rational
/// arithmetic.
pub fn em_estimate(n: u32, s: u32, j_terms: u32, p: &PrecisionPolicy) -> Real {
    assert!(s >= 2, "need s >= 2");
    assert!(2 * j_terms + 1 > n + 1, "remainder would not decay");
    // the partial sum has magnitude ~ s^{n+1} log s while the result is O(1)
    let boost = 12 + ((n as f64 + 1.0) * (s as f64).log10()).ceil() as u32;
    let wp = p.boosted(boost);

    let expansion = asymptotic_polys(n, j_terms);
    // exact rational accumulators for the log and plain parts
    let mut log_part = expansion.a.eval(&rat_int(s as i64));
    let mut plain_part = expansion.b.eval(&rat_int(s as i64));
    let mut j = 1;
    while 2 * j - 1 <= n {
        j += 1;
    }
    while j <= j_terms {
        let d = em_derivative(n, 2 * j - 1);
        let w = em_weight(j);
        let sp = int_pow(s, d.power);
        log_part += &w * &d.log_coeff * &sp;
        plain_part += &w * &d.plain_coeff * &sp;
        j += 1;
    }

    // ascending partial sum, exact k^n times high-precision log k
    let mut partial = Real::zero(&wp);
    for k in 2..=s {
        let kn = Real::from_bigint(&BigInt::from(k as u64).pow(n), &wp);
        let lk = Real::from_u64(k as u64, &wp).ln().expect("k >= 2");
        partial = partial.add(&kn.mul(&lk));
    }

    let log_s = Real::from_u64(s as u64, &wp).ln().expect("s >= 2");
    let lp = Real::from_rational(&log_part, &wp);
    let pp = Real::from_rational(&plain_part, &wp);
    partial.sub(&lp.mul(&log_s)).sub(&pp).with_policy(&p.boosted(2))
}

/// Euler–Maclaurin estimate of S_n for n <= -1 (sums of plain powers).
///
/// Returns gamma for n = -1 and zeta(-n) for n <= -2. Entirely exact rational
/// arithmetic except for the single log s term (n = -1 only).
pub fn em_estimate_power(n: i32, s: u32, j_terms: u32, p: &PrecisionPolicy) -> Real {
    assert!(n <= -1, "use em_estimate for n >= 0");
    assert!(s >= 2 && j_terms >= 1);
    let wp = p.boosted(12);

    // exact partial sum of k^n
    let mut partial = Rational::zero();
    for k in 1..=s {
        partial += int_pow(k, n);
    }
    // growth term of the integral; log s handled separately for n = -1
    let growth = if n == -1 {
        Rational::zero()
    } else {
        int_pow(s, n + 1) / rat_int(n as i64 + 1)
    };
    let half_fs = int_pow(s, n) / rat_int(2);
    // derivative terms: f^{(2j-1)}(x) = n(n-1)...(n-2j+2) x^{n-2j+1}
    let mut corr = Rational::zero();
    for j in 1..=j_terms {
        let m = 2 * j - 1;
        let mut falling = Rational::one();
        for i in 0..m {
            falling *= rat_int(n as i64 - i as i64);
        }
        corr += em_weight(j) * falling * int_pow(s, n - m as i32);
    }
    let exact = partial - growth - half_fs - corr;

    let mut out = Real::from_rational(&exact, &wp);
    if n == -1 {
        let log_s = Real::from_u64(s as u64, &wp).ln().expect("s >= 2");
        out = out.sub(&log_s);
    }
    out.with_policy(&p.boosted(2))
}

/// Default (s, J) for an Euler–Maclaurin run that must reach `digits` digits:
/// fixed s per sign of n, J sized so the remainder s^{n-2J-1} lands at least
/// 8 digits below the target.
pub fn default_em_params(n: i32, digits: u32) -> (u32, u32) {
    let s: u32 = if n >= 0 { 50 } else { 200 };
    let need = (digits as f64 + 8.0) / (s as f64).log10() + n as f64 - 1.0;
    let j_need = (need / 2.0).ceil().max(1.0) as u32;
    let floor = if n >= 0 { n as u32 + 8 } else { 8 };
    (s, j_need.max(floor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::real;

    fn assert_close(a: &Real, b: &Real, tol_exp: i32, what: &str) {
        let p = PrecisionPolicy::new(40);
        let tol = Real::pow10(tol_exp, &p);
        let diff = a.sub(b).abs();
        assert!(
            diff < tol,
            "{what}: diff {} exceeds 1e{tol_exp}",
            diff.to_decimal_string(5)
        );
    }

    #[test]
    fn derivative_examples() {
        let d = em_derivative(1, 1);
        assert_eq!(d.log_coeff, rat_int(1));
        assert_eq!(d.plain_coeff, rat_int(1));
        let d = em_derivative(0, 3);
        assert!(d.log_coeff.is_zero());
        assert_eq!(d.plain_coeff, rat_int(2));
        let d = em_derivative(3, 5);
        assert_eq!(d.plain_coeff, rat_int(-6));
        assert_eq!(d.power, -2);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        // central differences of x^n log x at x = 3; tiny h at very high
        // working precision so the h^{-m} amplification stays harmless
        let wp = PrecisionPolicy::new(160);
        let x0 = Real::from_u64(3, &wp);
        let h = Real::pow10(-13, &wp);
        for n in 0..=4u32 {
            for m in 1..=9u32 {
                let d = em_derivative(n, m);
                // h^{-m} sum_{i=0}^{m} (-1)^i C(m,i) f(x + (m/2 - i) h)
                let mut acc = Real::zero(&wp);
                for i in 0..=m {
                    let offset = Real::from_i64(m as i64 - 2 * i as i64, &wp)
                        .mul(&h)
                        .mul_pow2(-1);
                    let x = x0.add(&offset);
                    let fx = x.powi(n).mul(&x.ln().unwrap());
                    let c = Real::from_bigint(&crate::exact::binomial(m, i), &wp);
                    let term = fx.mul(&c);
                    acc = if i % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
                }
                let fd = acc.div(&h.powi(m));
                let expected = {
                    let xp = Real::from_rational(&int_pow(3, d.power), &wp);
                    let lc = Real::from_rational(&d.log_coeff, &wp);
                    let pc = Real::from_rational(&d.plain_coeff, &wp);
                    lc.mul(&x0.ln().unwrap()).add(&pc).mul(&xp)
                };
                let rel = fd.sub(&expected).abs().div(&expected.abs());
                let tol = Real::pow10(-20, &wp);
                assert!(
                    rel < tol,
                    "n={n} m={m}: relative error {}",
                    rel.to_decimal_string(5)
                );
            }
        }
    }

    #[test]
    fn asymptotic_polys_match_displayed_expansions() {
        let e1 = asymptotic_polys(1, 4);
        assert_eq!(e1.a, RPoly::from_coeffs(vec![rat(1, 12), rat(1, 2), rat(1, 2)]));
        assert_eq!(e1.b, RPoly::from_coeffs(vec![rat_int(0), rat_int(0), rat(-1, 4)]));

        let e2 = asymptotic_polys(2, 4);
        assert_eq!(
            e2.a,
            RPoly::from_coeffs(vec![rat_int(0), rat(1, 6), rat(1, 2), rat(1, 3)])
        );
        assert_eq!(
            e2.b,
            RPoly::from_coeffs(vec![rat_int(0), rat(1, 12), rat_int(0), rat(-1, 9)])
        );

        let e3 = asymptotic_polys(3, 4);
        assert_eq!(
            e3.a,
            RPoly::from_coeffs(vec![rat(-1, 120), rat_int(0), rat(1, 4), rat(1, 2), rat(1, 4)])
        );
        assert_eq!(
            e3.b,
            RPoly::from_coeffs(vec![rat_int(0), rat_int(0), rat(1, 12), rat_int(0), rat(-1, 16)])
        );
    }

    #[test]
    fn em_reproduces_stirling_constant() {
        let p = PrecisionPolicy::new(30);
        let est = em_estimate(0, 50, 8, &p);
        // S_0 = log(2 pi)/2
        let two_pi = real::pi(&p).mul_pow2(1);
        let expected = two_pi.ln().unwrap().mul_pow2(-1);
        assert_close(&est, &expected, -27, "S_0 vs log(2pi)/2");
        assert!(est.to_decimal_string(30).starts_with("0.918938"));
    }

    #[test]
    fn em_glaisher_and_higher() {
        let p = PrecisionPolicy::new(30);
        assert!(em_estimate(1, 50, 8, &p)
            .to_decimal_string(30)
            .starts_with("0.24875447703378426254725299"));
        assert!(em_estimate(2, 50, 9, &p)
            .to_decimal_string(30)
            .starts_with("0.030448457058393270780251530"));
        // Bendersky's decimal-log datum for n=3 converts to -0.0206563541...
        assert!(em_estimate(3, 50, 10, &p)
            .to_decimal_string(30)
            .starts_with("-0.02065635413555207892219475"));
    }

    #[test]
    fn em_power_gamma_self_consistent() {
        let p = PrecisionPolicy::new(30);
        let a = em_estimate_power(-1, 100, 6, &p);
        let b = em_estimate_power(-1, 200, 8, &p);
        assert_close(&a, &b, -28, "gamma at (100,6) vs (200,8)");
        assert!(a.to_decimal_string(20).starts_with("0.57721566490153286"));
    }

    #[test]
    fn em_power_basel() {
        let p = PrecisionPolicy::new(30);
        let est = em_estimate_power(-2, 50, 6, &p);
        let pi = real::pi(&p);
        let basel = pi.mul(&pi).div(&Real::from_u64(6, &p));
        assert_close(&est, &basel, -20, "zeta(2) vs pi^2/6");
    }

    #[test]
    fn em_power_zeta3_within_series_bracket() {
        // direct series oracle: zeta(3) - sum_{k<=N} k^-3 lies strictly
        // between the integral tail bounds 1/(2(N+1)^2) and 1/(2N^2)
        let p = PrecisionPolicy::new(30);
        let est = em_estimate_power(-3, 50, 8, &p);
        let n = 2000u32;
        let mut series = Real::zero(&p.boosted(10));
        for k in 1..=n {
            series = series.add(&Real::from_rational(&int_pow(k, -3), &p.boosted(10)));
        }
        let lo = series.add(&Real::from_rational(
            &(rat_int(1) / rat_int(2 * (n as i64 + 1) * (n as i64 + 1))),
            &p,
        ));
        let hi = series.add(&Real::from_rational(
            &(rat_int(1) / rat_int(2 * n as i64 * n as i64)),
            &p,
        ));
        assert!(lo < est && est < hi, "zeta(3) outside series bracket");
    }

    #[test]
    fn em_stability_under_doubling_s() {
        // |em(n, s) - em(n, 2s)| < 10 (2s)^{n-2J-1}
        let p = PrecisionPolicy::new(35);
        for n in 0..=4u32 {
            let j = n + 3;
            let a = em_estimate(n, 25, j, &p);
            let b = em_estimate(n, 50, j, &p);
            let bound = Real::from_rational(
                &(rat_int(10) * int_pow(50, n as i32 - 2 * j as i32 - 1)),
                &p,
            );
            assert!(
                a.sub(&b).abs() < bound,
                "n={n}: EM remainder decays slower than predicted"
            );
        }
    }

    #[test]
    fn default_params_reach_requested_digits() {
        let (s, j) = default_em_params(0, 30);
        assert_eq!(s, 50);
        assert!(j >= 8);
        let (s, j) = default_em_params(-1, 30);
        assert_eq!(s, 200);
        assert!(j >= 8);
        // 60-digit request needs a deeper tail
        let (_, j60) = default_em_params(0, 60);
        assert!(j60 > j);
    }
}
