//! Numerical certification of the identity-level claims: the higher Frullani
//! identities, the classical generator integral, the harmonic-number
//! integral, the Malmstén formula at integer points, and the inter-constant
//! relations.
//!
//! Each check compares an integral side against an independently computed
//! closed-form or exact side at tolerance 10^-(digits-3). Checks never abort
//! on disagreement; they return a report with pass = false.

use crate::constants::{prefactor, s_tilde, stirling_ramanujan, upsilon};
use crate::error::Result;
use crate::exact::{binomial, factorial, harmonic, r_hat, r_n, rat, rat_int, Rational};
use crate::integrand::{IntegrandSpec, KernelKind};
use crate::quad::integrate_certified;
use crate::real::{PrecisionPolicy, Real};
use num_traits::{Signed, ToPrimitive, Zero};

/// Outcome of one identity check.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub name: String,
    pub n: Option<i32>,
    pub s: Option<Rational>,
    pub lhs: Real,
    pub rhs: Real,
    pub abs_diff: Real,
    pub tolerance: Real,
    pub pass: bool,
}

fn make_report(
    name: impl Into<String>,
    n: Option<i32>,
    s: Option<Rational>,
    lhs: Real,
    rhs: Real,
    digits: u32,
) -> IdentityReport {
    let p = PrecisionPolicy::new(digits);
    let tolerance = Real::pow10(-(digits as i32) + 3, &p);
    let abs_diff = lhs.sub(&rhs).abs();
    let pass = abs_diff <= tolerance;
    IdentityReport { name: name.into(), n, s, lhs, rhs, abs_diff, tolerance, pass }
}

fn work_policy(digits: u32) -> PrecisionPolicy {
    PrecisionPolicy::with_guard(digits, 15)
}

fn digits_for_scale(digits: u32, scale: &Rational) -> u32 {
    let extra = scale.abs().to_f64().map(|v| v.log10().ceil().max(0.0)).unwrap_or(0.0);
    digits + extra as u32 + 2
}

/// Theorem-level Frullani identity with an injected polynomial part; the
/// canonical entry point computes that part from binomials and harmonic
/// numbers. Keeping it a parameter lets tests verify suite sensitivity.
pub fn check_frullani_with(
    n: u32,
    s: &Rational,
    digits: u32,
    poly_part: &Rational,
) -> Result<IdentityReport> {
    let wp = work_policy(digits);
    let pref = prefactor(n as i32);
    let spec = IntegrandSpec::new(KernelKind::Frullani { n, s: s.clone() })?;
    let q = integrate_certified(&spec, digits_for_scale(digits, &pref))?;
    let rhs = Real::from_rational(poly_part, &wp)
        .add(&q.value.mul(&Real::from_rational(&pref, &wp)));
    // lhs = (s+1)^n log(s+1), all rational except the log
    let sp1 = s + rat_int(1);
    let lhs = Real::from_rational(&num_traits::pow::pow(sp1.clone(), n as usize), &wp)
        .mul(&Real::from_rational(&sp1, &wp).ln()?);
    Ok(make_report(
        format!("frullani (s+1)^{n} log(s+1)"),
        Some(n as i32),
        Some(s.clone()),
        lhs,
        rhs,
        digits,
    ))
}

/// sum_{k=1}^{n} C(n,k) (H_n - H_{n-k}) s^k, the exact polynomial side.
pub fn frullani_poly_part(n: u32, s: &Rational) -> Rational {
    let mut acc = Rational::zero();
    let hn = harmonic(n);
    let mut sk = Rational::from(num_bigint::BigInt::from(1));
    for k in 1..=n {
        sk *= s;
        acc += Rational::from(binomial(n, k)) * (&hn - harmonic(n - k)) * &sk;
    }
    acc
}

/// Higher Frullani identity: (s+1)^n log(s+1) against polynomial part plus
/// the certified kernel integral.
pub fn check_frullani(n: u32, s: &Rational, digits: u32) -> Result<IdentityReport> {
    check_frullani_with(n, s, digits, &frullani_poly_part(n, s))
}

/// Primitive generator integral: 1/(s+1) = int t e^{-st} e^{-t} dt/t.
pub fn check_generator(s: &Rational, digits: u32) -> Result<IdentityReport> {
    let wp = work_policy(digits);
    let spec = IntegrandSpec::new(KernelKind::Generator { s: s.clone() })?;
    let q = integrate_certified(&spec, digits + 2)?;
    let lhs = Real::from_rational(&(s + rat_int(1)).recip(), &wp);
    Ok(make_report("generator 1/(s+1)", None, Some(s.clone()), lhs, q.value, digits))
}

/// Harmonic-number integral: H_n = int (1-e^{-nt})/(1-e^{-t}) e^{-t} dt.
pub fn check_harmonic_integral(n: u32, digits: u32) -> Result<IdentityReport> {
    let wp = work_policy(digits);
    let spec = IntegrandSpec::new(KernelKind::Harmonic { n })?;
    let q = integrate_certified(&spec, digits + 2)?;
    let lhs = Real::from_rational(&harmonic(n), &wp);
    Ok(make_report("harmonic H_n", Some(n as i32), None, lhs, q.value, digits))
}

/// Malmstén formula at an integer point: the integral against log(s!)
/// computed from the exact factorial.
pub fn check_malmsten(s: u32, digits: u32) -> Result<IdentityReport> {
    let wp = work_policy(digits);
    let name = "malmsten log Gamma(s+1)";
    if s == 0 {
        // the s = 0 integrand vanishes identically; log 0! = 0
        let zero = Real::zero(&wp);
        return Ok(make_report(name, None, Some(rat_int(0)), zero.clone(), zero, digits));
    }
    let spec = IntegrandSpec::new(KernelKind::Malmsten { s: rat_int(s as i64) })?;
    let q = integrate_certified(&spec, digits + 2)?;
    let lhs = Real::from_bigint(&factorial(s), &wp).ln()?;
    Ok(make_report(name, None, Some(rat_int(s as i64)), lhs, q.value, digits))
}

/// Relation S_n = (-1)^{n+1} n! (Upsilon_n - r_n) with an injected r value.
pub fn check_stirling_relation_with(
    n: i32,
    digits: u32,
    r: &Rational,
    s_n: &Real,
    upsilon_n: &Real,
) -> IdentityReport {
    let wp = work_policy(digits);
    let rhs = upsilon_n
        .sub(&Real::from_rational(r, &wp))
        .mul(&Real::from_rational(&prefactor(n), &wp));
    make_report(
        "relation S = (-1)^{n+1} n! (Upsilon - r)",
        Some(n),
        None,
        s_n.clone(),
        rhs,
        digits,
    )
}

/// Relation S_n = S̃_n + r̂_n with an injected r̂ value.
pub fn check_shift_relation_with(
    n: i32,
    digits: u32,
    rhat: &Rational,
    s_n: &Real,
    s_tilde_n: &Real,
) -> IdentityReport {
    let wp = work_policy(digits);
    let rhs = s_tilde_n.add(&Real::from_rational(rhat, &wp));
    make_report("relation S = S~ + r^", Some(n), None, s_n.clone(), rhs, digits)
}

/// The fixed verification matrix. Ordering is deterministic: Frullani rows
/// first (n-major, s-minor), then generator, harmonic, Malmstén, then the
/// constants-module relation checks for n in 0..=3.
pub fn run_suite(digits: u32) -> Result<Vec<IdentityReport>> {
    let mut reports = Vec::new();
    let s_grid = [rat(1, 2), rat_int(1), rat_int(2), rat_int(10)];
    for n in 0..=5u32 {
        for s in &s_grid {
            reports.push(check_frullani(n, s, digits)?);
        }
    }
    for s in [rat_int(0), rat_int(1), rat_int(9)] {
        reports.push(check_generator(&s, digits)?);
    }
    for n in [1u32, 4, 25] {
        reports.push(check_harmonic_integral(n, digits)?);
    }
    for s in [0u32, 1, 3, 10] {
        reports.push(check_malmsten(s, digits)?);
    }
    for n in 0..=3i32 {
        let s_n = stirling_ramanujan(n, digits)?;
        let y_n = upsilon(n, digits)?;
        let st_n = s_tilde(n, digits)?;
        reports.push(check_stirling_relation_with(n, digits, &r_n(n), &s_n.value, &y_n.value));
        reports.push(check_shift_relation_with(n, digits, &r_hat(n as u32), &s_n.value, &st_n.value));
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::b_coeff;

    #[test]
    fn frullani_n0_is_log2() {
        let rep = check_frullani(0, &rat_int(1), 20).unwrap();
        assert!(rep.pass, "diff {}", rep.abs_diff.to_decimal_string(3));
        assert!(rep.lhs.to_decimal_string(10).starts_with("0.693147180"));
        assert!(frullani_poly_part(0, &rat_int(1)).is_zero());
    }

    #[test]
    fn frullani_n1_polynomial_part() {
        // C(1,1)(H_1 - H_0) s = s
        assert_eq!(frullani_poly_part(1, &rat_int(1)), rat_int(1));
        let rep = check_frullani(1, &rat_int(1), 20).unwrap();
        assert!(rep.pass);
        // both sides 2 log 2
        assert!(rep.lhs.to_decimal_string(10).starts_with("1.386294361"));
    }

    #[test]
    fn generator_examples() {
        for (s, digits) in [(rat_int(1), 20u32), (rat_int(0), 20), (rat_int(9), 30)] {
            let rep = check_generator(&s, digits).unwrap();
            assert!(rep.pass, "s={s}: diff {}", rep.abs_diff.to_decimal_string(3));
        }
    }

    #[test]
    fn harmonic_examples() {
        let rep = check_harmonic_integral(1, 20).unwrap();
        assert!(rep.pass);
        let rep = check_harmonic_integral(4, 20).unwrap();
        assert!(rep.pass);
        assert!(rep.lhs.to_decimal_string(10).starts_with("2.083333333"));
    }

    #[test]
    fn malmsten_examples() {
        let rep = check_malmsten(0, 20).unwrap();
        assert!(rep.pass && rep.abs_diff.is_zero());
        let rep = check_malmsten(1, 20).unwrap();
        assert!(rep.pass, "log 1! diff {}", rep.abs_diff.to_decimal_string(3));
        let rep = check_malmsten(3, 20).unwrap();
        assert!(rep.pass);
        assert!(rep.lhs.to_decimal_string(10).starts_with("1.791759469")); // log 6
    }

    #[test]
    fn relation_checks_pass_and_feel_mutations() {
        let digits = 20;
        let n = 2;
        let s_n = stirling_ramanujan(n, digits).unwrap();
        let y_n = upsilon(n, digits).unwrap();
        let ok = check_stirling_relation_with(n, digits, &r_n(n), &s_n.value, &y_n.value);
        assert!(ok.pass);
        // r_2 + 1e-10 must break the relation
        let perturbed = r_n(n) + rat(1, 10_000_000_000);
        let bad = check_stirling_relation_with(n, digits, &perturbed, &s_n.value, &y_n.value);
        assert!(!bad.pass, "perturbed r_n still passed");
    }

    #[test]
    fn suite_is_deterministic() {
        let a = run_suite(10).unwrap();
        let b = run_suite(10).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.name, y.name);
            assert_eq!(x.pass, y.pass);
            assert_eq!(
                x.abs_diff.to_decimal_string(20),
                y.abs_diff.to_decimal_string(20)
            );
            assert_eq!(x.lhs.to_decimal_string(20), y.lhs.to_decimal_string(20));
        }
    }

    #[test]
    fn frullani_sensitive_to_poly_part() {
        let s = rat_int(2);
        let good = frullani_poly_part(3, &s);
        let bad = &good + rat(1, 10_000_000_000);
        let rep = check_frullani_with(3, &s, 20, &bad).unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn shift_relation_sensitive_to_b_coefficient() {
        // recompute r̂_2 from a perturbed b_1 through the double sum; the
        // shifted value must break the S = S~ + r^ check
        let digits = 20;
        let n = 2u32;
        let s_n = stirling_ramanujan(n as i32, digits).unwrap();
        let st_n = s_tilde(n as i32, digits).unwrap();
        let good = check_shift_relation_with(n as i32, digits, &r_hat(n), &s_n.value, &st_n.value);
        assert!(good.pass);
        let mut rhat_mut = Rational::zero();
        for j in 1..=n as i32 + 1 {
            for h in -1..=(n as i32 - j) {
                let b = if h == 1 {
                    b_coeff(h) + rat(1, 10_000_000_000)
                } else {
                    b_coeff(h)
                };
                let sign = if (j + h) % 2 == 0 { 1 } else { -1 };
                rhat_mut += rat_int(sign) * b * Rational::from(factorial(n))
                    / (Rational::from(factorial((n as i32 - h - j) as u32))
                        * Rational::from(factorial(j as u32))
                        * rat_int(j as i64));
            }
        }
        assert_ne!(rhat_mut, r_hat(n));
        let bad = check_shift_relation_with(n as i32, digits, &rhat_mut, &s_n.value, &st_n.value);
        assert!(!bad.pass, "perturbed b_1 did not surface");
    }
}
