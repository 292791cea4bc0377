//! Error-controlled integration over (0, infinity): truncate at T using the
//! rigorous tail bound, then integrate (0, T] with a tanh-sinh (double
//! exponential) rule refined until two successive levels agree.
//!
//! Budget split: tail <= target/4, refinement <= target/4, the rest is
//! rounding reserve. The double-run certificate in `integrate_certified`
//! validates the whole chain empirically.

use crate::error::{Error, Result};
use crate::integrand::{magnitude_bound_f64, tail_bound, IntegrandSpec, KernelEvaluator};
use crate::real::{self, PrecisionPolicy, Real};
use rayon::prelude::*;

/// Result of one improper-integral evaluation.
#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: Real,
    /// Claimed absolute error: refinement difference plus truncation tail bound.
    pub error_estimate: Real,
    pub nodes_used: u64,
    pub truncation_t: Real,
}

/// Hard cap on refinement levels; reaching it means the integrand or the
/// precision request is mis-specified.
pub const MAX_REFINEMENTS: u32 = 20;

fn digits_of_target(target: &Real) -> u32 {
    match target.exponent2() {
        Some(e) => ((-(e as f64)) * std::f64::consts::LOG10_2).ceil().max(1.0) as u32 + 1,
        None => 30,
    }
}

/// Picks the truncation point: smallest integer T with tail <= target/4.
fn choose_truncation(spec: &IntegrandSpec, target: &Real, d_target: u32) -> Result<(Real, Real)> {
    let p = PrecisionPolicy::new(30);
    let budget = target.mul_pow2(-2);
    let c = magnitude_bound_f64(spec, 1.0).ln().max(0.0);
    let mut t_f = (d_target as f64 + 2.0) * std::f64::consts::LN_10 + c + 2.0;
    t_f = t_f.max(spec.crossover_t0.max(1.0) + 1.0).ceil();
    for _ in 0..60 {
        let t = Real::from_f64(t_f, &p);
        let tb = tail_bound(spec, &t)?;
        if tb <= budget {
            return Ok((t, tb));
        }
        t_f = (t_f * 1.25).ceil();
    }
    Err(Error::Domain("could not place a truncation point".into()))
}

struct NodePlan {
    u_max: f64,
    first_level: u32,
}

fn plan_nodes(spec: &IntegrandSpec, t_f: f64, d_target: u32) -> NodePlan {
    let m = magnitude_bound_f64(spec, t_f);
    // cutoff where transformed terms drop below the budget, with slack for
    // a few thousand node contributions
    let l = (d_target as f64 + 6.0) * std::f64::consts::LN_10 + (m * t_f).max(1.0).ln() + 9.0;
    let u_max = (2.0 * l / std::f64::consts::PI).asinh() + 0.05;
    NodePlan { u_max, first_level: 2 }
}

struct TanhSinh {
    t_trunc: Real,
    pi: Real,
    u_max: f64,
}

impl TanhSinh {
    /// Transformed integrand at u: weight(u) * f(t(u)), with
    /// t(u) = T / (1 + e^{-pi sinh u}) evaluated cancellation-free on both
    /// sides, and weight = T pi cosh(u) E / (1 + E)^2, E = e^{-pi sinh u}.
    fn eval_at(&self, ev: &KernelEvaluator, u: &Real) -> Result<Real> {
        let eu = u.exp();
        let eu_inv = eu.recip();
        let sinh_u = eu.sub(&eu_inv).mul_pow2(-1);
        let cosh_u = eu.add(&eu_inv).mul_pow2(-1);
        let e2 = self.pi.neg().mul(&sinh_u).exp();
        let one_plus = e2.one_like().add(&e2);
        let t = self.t_trunc.div(&one_plus);
        if t.is_zero() {
            return Ok(t);
        }
        let w = self
            .t_trunc
            .mul(&self.pi)
            .mul(&cosh_u)
            .mul(&e2)
            .div(&one_plus.mul(&one_plus));
        Ok(ev.eval(&t)?.mul(&w))
    }

    /// Sum of the transformed integrand over `us`, reduced in ascending-u
    /// order regardless of evaluation parallelism.
    fn sum_level(&self, ev: &KernelEvaluator, us: &[Real]) -> Result<(Real, u64)> {
        let terms: Vec<Result<Real>> = us
            .par_iter()
            .map(|u| self.eval_at(ev, u))
            .collect();
        let mut acc = self.t_trunc.zero_like();
        for term in terms {
            acc = acc.add(&term?);
        }
        Ok((acc, us.len() as u64))
    }
}

/// Integrates the spec's kernel over (0, infinity) to absolute accuracy
/// `target_abs_error`: truncation via the rigorous tail bound, tanh-sinh
/// refinement on (0, T] until two successive levels differ by at most a
/// quarter of the target.
pub fn integrate(spec: &IntegrandSpec, target_abs_error: &Real) -> Result<QuadResult> {
    if target_abs_error.is_zero() || target_abs_error.is_negative() {
        return Err(Error::Domain("target_abs_error must be positive".into()));
    }
    let d_target = digits_of_target(target_abs_error);
    let (t_trunc, tail) = choose_truncation(spec, target_abs_error, d_target)?;
    let t_f = t_trunc.to_f64_approx();
    let plan = plan_nodes(spec, t_f, d_target);

    // guards: kernel growth in T, plus room for summing thousands of terms
    let order_guard = PrecisionPolicy::kernel_guard(spec.kind.order(), t_f);
    let wp = PrecisionPolicy::with_guard(d_target, 14 + order_guard + 8);
    let series_budget = target_abs_error.mul_pow2(-3);
    let ev = KernelEvaluator::new(spec, &wp, &series_budget)?;

    let ts = TanhSinh {
        t_trunc: t_trunc.with_policy(&wp),
        pi: real::pi(&wp),
        u_max: plan.u_max,
    };
    let refine_budget = target_abs_error.mul_pow2(-2);

    let mut nodes_used: u64 = 0;
    let mut prev: Option<Real> = None;
    let mut last_delta: Option<Real> = None;
    for level in plan.first_level..=MAX_REFINEMENTS {
        let h_inv = 1u64 << level;
        let j_max = (ts.u_max * h_inv as f64).floor() as i64;
        // level > first: only odd multiples of h are new
        let us: Vec<Real> = (-j_max..=j_max)
            .filter(|j| level == plan.first_level || j.rem_euclid(2) != 0)
            .map(|j| {
                Real::from_i64(j, &wp).mul_pow2(-(level as i32))
            })
            .collect();
        let (sum, n) = ts.sum_level(&ev, &us)?;
        nodes_used += n;
        let value = match &prev {
            None => sum.mul_pow2(-(level as i32)),
            Some(p) => p.mul_pow2(-1).add(&sum.mul_pow2(-(level as i32))),
        };
        if let Some(p) = &prev {
            let delta = value.sub(p).abs();
            if delta <= refine_budget {
                return Ok(QuadResult {
                    value,
                    error_estimate: delta.add(&tail),
                    nodes_used,
                    truncation_t: t_trunc,
                });
            }
            last_delta = Some(delta);
        }
        prev = Some(value);
    }
    Err(Error::NonConverged {
        max_refinements: MAX_REFINEMENTS,
        last_delta: last_delta
            .map(|d| d.to_decimal_string(3))
            .unwrap_or_else(|| "n/a".into()),
    })
}

/// Double-run certificate: integrates at `target_digits` and again at
/// `target_digits + 15`, requires agreement to 10^(-target_digits), and
/// returns the higher-precision result (error estimate widened by the
/// observed disagreement, node count covering both runs).
pub fn integrate_certified(spec: &IntegrandSpec, target_digits: u32) -> Result<QuadResult> {
    assert!(target_digits >= 1);
    let p_lo = PrecisionPolicy::new(target_digits);
    let p_hi = PrecisionPolicy::new(target_digits + 15);
    let run_lo = integrate(spec, &Real::pow10(-(target_digits as i32) - 2, &p_lo))?;
    let run_hi = integrate(spec, &Real::pow10(-(target_digits as i32) - 17, &p_hi))?;
    let diff = run_lo.value.sub(&run_hi.value).abs();
    let tol = Real::pow10(-(target_digits as i32), &p_lo);
    if diff > tol {
        return Err(Error::CertificationFailed {
            digits: target_digits,
            diff: diff.to_decimal_string(3),
        });
    }
    Ok(QuadResult {
        value: run_hi.value,
        error_estimate: run_hi.error_estimate.add(&diff),
        nodes_used: run_lo.nodes_used + run_hi.nodes_used,
        truncation_t: run_hi.truncation_t,
    })
}
