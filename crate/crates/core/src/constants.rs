//! Front-end computation of the constants: S_n, S̃_n, Upsilon_n, gamma,
//! log A, and zeta(m), each available through the exponential-period integral
//! and through the Euler–Maclaurin oracle.
//!
//! The exact prefactor (-1)^{n+1} n! is applied outside quadrature, after
//! certification, so the quadrature error budget is independent of n!.

use crate::em::{default_em_params, em_estimate, em_estimate_power, int_pow};
use crate::error::{Error, Result};
use crate::exact::{bernoulli_number, factorial, r_hat, r_n, rat_int, Rational};
use crate::integrand::{IntegrandSpec, KernelKind};
use crate::quad::integrate_certified;
use crate::real::{PrecisionPolicy, Real};
use num_traits::{Signed, ToPrimitive};
use std::fmt;

/// Which constant family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstantKind {
    S,
    STilde,
    Upsilon,
    Gamma,
    GlaisherLog,
    Zeta,
}

impl ConstantKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConstantKind::S => "S",
            ConstantKind::STilde => "S_tilde",
            ConstantKind::Upsilon => "Upsilon",
            ConstantKind::Gamma => "gamma",
            ConstantKind::GlaisherLog => "glaisher_log",
            ConstantKind::Zeta => "zeta",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "S" => Some(ConstantKind::S),
            "S_tilde" | "s_tilde" | "Stilde" => Some(ConstantKind::STilde),
            "Upsilon" | "upsilon" | "Y" => Some(ConstantKind::Upsilon),
            "gamma" => Some(ConstantKind::Gamma),
            "glaisher_log" | "logA" | "log_A" => Some(ConstantKind::GlaisherLog),
            "zeta" => Some(ConstantKind::Zeta),
            _ => None,
        }
    }
}

impl fmt::Display for ConstantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Integral,
    EulerMaclaurin,
    Both,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Integral => "integral",
            Method::EulerMaclaurin => "euler_maclaurin",
            Method::Both => "both",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "integral" => Some(Method::Integral),
            "euler_maclaurin" | "euler-maclaurin" | "em" => Some(Method::EulerMaclaurin),
            "both" => Some(Method::Both),
            _ => None,
        }
    }
}

/// How a value was produced, for provenance records.
#[derive(Clone, Debug)]
pub enum Provenance {
    Quadrature { nodes: u64, truncation_t: String },
    EulerMaclaurin { s: u32, j: u32 },
    Relation { base: &'static str },
}

/// One computed constant with its certification data.
#[derive(Clone, Debug)]
pub struct ConstantResult {
    pub kind: ConstantKind,
    pub n: i32,
    pub digits: u32,
    pub method_used: Method,
    pub value: Real,
    pub decimal: String,
    pub error_bound: Real,
    pub provenance: Provenance,
}

fn finish(
    kind: ConstantKind,
    n: i32,
    digits: u32,
    method_used: Method,
    value: Real,
    error_bound: Real,
    provenance: Provenance,
) -> ConstantResult {
    let decimal = value.to_decimal_string(digits);
    ConstantResult { kind, n, digits, method_used, value, decimal, error_bound, provenance }
}

/// (-1)^{n+1} n! for n >= 0; the n = -1 integrand already carries its
/// prefactor (it is the classical gamma integrand).
pub fn prefactor(n: i32) -> Rational {
    if n < 0 {
        return rat_int(1);
    }
    let sign = if n % 2 == 0 { -1 } else { 1 };
    rat_int(sign) * Rational::from(factorial(n as u32))
}

fn digits_for_prefactor(digits: u32, pref: &Rational) -> u32 {
    let extra = pref.abs().to_f64().map(|v| v.log10().ceil().max(0.0)).unwrap_or(0.0);
    digits + extra as u32
}

/// Certified integral of `kind`'s kernel, scaled by an exact rational.
fn certified_scaled(
    kernel: KernelKind,
    scale: &Rational,
    out_kind: ConstantKind,
    n: i32,
    digits: u32,
) -> Result<ConstantResult> {
    let spec = IntegrandSpec::new(kernel)?;
    let q = integrate_certified(&spec, digits_for_prefactor(digits, scale))?;
    let p = PrecisionPolicy::new(digits);
    let scale_r = Real::from_rational(scale, &PrecisionPolicy::with_guard(digits, 20));
    let value = q.value.mul(&scale_r);
    let bound = q.error_estimate.mul(&scale_r.abs());
    Ok(finish(
        out_kind,
        n,
        digits,
        Method::Integral,
        value.with_policy(&p.boosted(8)),
        bound,
        Provenance::Quadrature {
            nodes: q.nodes_used,
            truncation_t: q.truncation_t.to_decimal_string(4),
        },
    ))
}

/// S_n by the exponential-period integral: (-1)^{n+1} n! times the certified
/// integral of the regularized kernel (prefactor 1 for n = -1).
pub fn stirling_ramanujan(n: i32, digits: u32) -> Result<ConstantResult> {
    if n < -1 {
        return Err(Error::Domain(format!("S_n requires n >= -1, got {n}")));
    }
    certified_scaled(KernelKind::Stirling { n }, &prefactor(n), ConstantKind::S, n, digits)
}

/// Upsilon_n by direct certified quadrature (no prefactor).
pub fn upsilon(n: i32, digits: u32) -> Result<ConstantResult> {
    if n < -1 {
        return Err(Error::Domain(format!("Upsilon_n requires n >= -1, got {n}")));
    }
    certified_scaled(
        KernelKind::Upsilon { n },
        &rat_int(1),
        ConstantKind::Upsilon,
        n,
        digits,
    )
}

/// S̃_n = (-1)^{n+1} n! Upsilon_n, computed by its own quadrature run.
pub fn s_tilde(n: i32, digits: u32) -> Result<ConstantResult> {
    if n < 0 {
        return Err(Error::Domain(format!("S̃_n requires n >= 0, got {n}")));
    }
    certified_scaled(
        KernelKind::Upsilon { n },
        &prefactor(n),
        ConstantKind::STilde,
        n,
        digits,
    )
}

/// zeta(m) from the Riemann integral representation: kernel integral divided
/// by Gamma(m) = (m-1)!.
pub fn zeta_integral(m: u32, digits: u32) -> Result<ConstantResult> {
    if m < 2 {
        return Err(Error::Domain(format!("zeta integral requires m >= 2, got {m}")));
    }
    let inv_gamma = Rational::new(1.into(), factorial(m - 1));
    certified_scaled(
        KernelKind::Zeta { m },
        &inv_gamma,
        ConstantKind::Zeta,
        m as i32,
        digits,
    )
}

/// Euler–Maclaurin route for S_n (n >= -1), with (s, J) sized for `digits`.
pub fn stirling_em(n: i32, digits: u32) -> Result<ConstantResult> {
    if n < -1 {
        return Err(Error::Domain(format!("S_n requires n >= -1, got {n}")));
    }
    let (s, j) = default_em_params(n, digits);
    let p = PrecisionPolicy::new(digits);
    let value = if n >= 0 {
        em_estimate(n as u32, s, j, &p)
    } else {
        em_estimate_power(n, s, j, &p)
    };
    let bound = em_remainder_bound(n, s, j, &p);
    Ok(finish(ConstantKind::S, n, digits, Method::EulerMaclaurin, value, bound,
        Provenance::EulerMaclaurin { s, j }))
}

/// Four times the first omitted Euler–Maclaurin term; the standard envelope
/// for the remainder of this asymptotic correction series.
fn em_remainder_bound(n: i32, s: u32, j: u32, p: &PrecisionPolicy) -> Real {
    let jn = j + 1;
    let w = bernoulli_number(2 * jn) / Rational::from(factorial(2 * jn));
    let m = 2 * jn - 1;
    let deriv_mag = if n >= 0 {
        let d = crate::em::em_derivative(n as u32, m);
        // |log_coeff| log s + |plain_coeff|, log s < s
        d.log_coeff.abs() * rat_int(s as i64) + d.plain_coeff.abs()
    } else {
        let mut falling = rat_int(1);
        for i in 0..m {
            falling *= rat_int(n as i64 - i as i64);
        }
        falling.abs()
    };
    let term = w.abs() * deriv_mag * int_pow(s, n - m as i32);
    Real::from_rational(&(term * rat_int(4)), p)
        .add(&Real::pow10(-(p.target_digits as i32) - 6, p))
}

/// Euler–Maclaurin route for the other kinds, derived from S_n through the
/// exact relations (Upsilon_n = r_n + (-1)^{n+1} S_n / n!, S̃_n = S_n - r̂_n).
pub fn upsilon_em(n: i32, digits: u32) -> Result<ConstantResult> {
    let s = stirling_em(n, digits)?;
    if n < 0 {
        // r_{-1} = 0: Upsilon_{-1} coincides with S_{-1}
        return Ok(ConstantResult {
            kind: ConstantKind::Upsilon,
            provenance: Provenance::Relation { base: "S via Euler-Maclaurin" },
            ..s
        });
    }
    let p = PrecisionPolicy::with_guard(digits, 20);
    let inv_pref = prefactor(n).recip();
    let scale = Real::from_rational(&inv_pref, &p);
    let value = Real::from_rational(&r_n(n), &p).add(&s.value.mul(&scale));
    let bound = s.error_bound.mul(&scale.abs());
    Ok(finish(ConstantKind::Upsilon, n, digits, Method::EulerMaclaurin, value, bound,
        Provenance::Relation { base: "S via Euler-Maclaurin" }))
}

pub fn s_tilde_em(n: i32, digits: u32) -> Result<ConstantResult> {
    if n < 0 {
        return Err(Error::Domain(format!("S̃_n requires n >= 0, got {n}")));
    }
    let s = stirling_em(n, digits)?;
    let p = PrecisionPolicy::with_guard(digits, 20);
    let value = s.value.sub(&Real::from_rational(&r_hat(n as u32), &p));
    Ok(finish(ConstantKind::STilde, n, digits, Method::EulerMaclaurin, value,
        s.error_bound.clone(), Provenance::Relation { base: "S via Euler-Maclaurin" }))
}

/// zeta(m) by the Euler–Maclaurin power oracle (n = -m).
pub fn zeta_em(m: u32, digits: u32) -> Result<ConstantResult> {
    if m < 2 {
        return Err(Error::Domain(format!("zeta requires m >= 2, got {m}")));
    }
    let n = -(m as i32);
    let (s, j) = default_em_params(n, digits);
    let p = PrecisionPolicy::new(digits);
    let value = em_estimate_power(n, s, j, &p);
    let bound = em_remainder_bound(n, s, j, &p);
    Ok(finish(ConstantKind::Zeta, m as i32, digits, Method::EulerMaclaurin, value, bound,
        Provenance::EulerMaclaurin { s, j }))
}

/// A computed constant, possibly with a second-method cross check.
#[derive(Clone, Debug)]
pub struct Computation {
    pub results: Vec<ConstantResult>,
    /// |integral - euler_maclaurin| when both methods ran
    pub agreement: Option<Real>,
}

/// Computes one constant by the requested method(s), normalizing the aliased
/// kinds (gamma = S_{-1}, log A = S_1).
pub fn compute(kind: ConstantKind, n: i32, digits: u32, method: Method) -> Result<Computation> {
    if digits < 1 || digits > 10_000 {
        return Err(Error::Domain(format!("digits must lie in [1, 10000], got {digits}")));
    }
    let (eff_kind, eff_n) = match kind {
        ConstantKind::Gamma => (ConstantKind::S, -1),
        ConstantKind::GlaisherLog => (ConstantKind::S, 1),
        k => (k, n),
    };
    let integral = |k: ConstantKind, n: i32| -> Result<ConstantResult> {
        match k {
            ConstantKind::S => stirling_ramanujan(n, digits),
            ConstantKind::STilde => s_tilde(n, digits),
            ConstantKind::Upsilon => upsilon(n, digits),
            ConstantKind::Zeta => {
                if n < 2 {
                    return Err(Error::Domain("zeta requires n >= 2".into()));
                }
                zeta_integral(n as u32, digits)
            }
            _ => unreachable!("aliases normalized"),
        }
    };
    let em = |k: ConstantKind, n: i32| -> Result<ConstantResult> {
        match k {
            ConstantKind::S => stirling_em(n, digits),
            ConstantKind::STilde => s_tilde_em(n, digits),
            ConstantKind::Upsilon => upsilon_em(n, digits),
            ConstantKind::Zeta => {
                if n < 2 {
                    return Err(Error::Domain("zeta requires n >= 2".into()));
                }
                zeta_em(n as u32, digits)
            }
            _ => unreachable!("aliases normalized"),
        }
    };
    let mut results = Vec::new();
    match method {
        Method::Integral => results.push(integral(eff_kind, eff_n)?),
        Method::EulerMaclaurin => results.push(em(eff_kind, eff_n)?),
        Method::Both => {
            results.push(integral(eff_kind, eff_n)?);
            results.push(em(eff_kind, eff_n)?);
        }
    }
    // restore the requested alias name on the outputs
    for r in &mut results {
        if kind == ConstantKind::Gamma || kind == ConstantKind::GlaisherLog {
            r.kind = kind;
        }
    }
    let agreement = if results.len() == 2 {
        Some(results[0].value.sub(&results[1].value).abs())
    } else {
        None
    };
    Ok(Computation { results, agreement })
}

/// One row of the S_n comparison table.
#[derive(Clone, Debug)]
pub struct TableRow {
    pub n: i32,
    pub integral: ConstantResult,
    pub euler_maclaurin: ConstantResult,
    pub agreement: Real,
}

/// S_n for n in [-1, max_n] by both methods, with the agreement column.
pub fn constants_table(max_n: i32, digits: u32) -> Result<Vec<TableRow>> {
    if max_n < 0 {
        return Err(Error::Domain("table requires max_n >= 0".into()));
    }
    (-1..=max_n)
        .map(|n| {
            let integral = stirling_ramanujan(n, digits)?;
            let em = stirling_em(n, digits)?;
            let agreement = integral.value.sub(&em.value).abs();
            Ok(TableRow { n, integral, euler_maclaurin: em, agreement })
        })
        .collect()
}
