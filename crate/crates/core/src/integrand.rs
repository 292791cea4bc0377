//! The integrand families: regularized Stirling and Upsilon kernels, higher
//! Frullani kernels, the harmonic-number kernel, the zeta kernel, the
//! Malmstén kernel, and the primitive generator kernel.
//!
//! Every kernel is evaluated by one of two branches: a power-series branch
//! below the crossover point (the series for 1/(1-e^{-t}) converges for
//! |t| < 2 pi), and a direct branch above it. The series branch avoids the
//! catastrophic cancellation of subtracting a truncated Laurent expansion
//! from the nearly equal function value at small t.

use crate::error::{Error, Result};
use crate::exact::{b_abs_sum, b_coeff, factorial, r_n, rat, rat_int, Rational};
use crate::real::{PrecisionPolicy, Real};

use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rational lower bound of 2 pi; substituting it for 2 pi in the geometric
/// envelope |b_k| <= 4 / (2 pi)^{k+1} keeps every tail bound rigorous.
fn two_pi_low() -> Rational {
    rat(628318, 100000)
}

/// Rational upper bound of 2 pi.
fn two_pi_high() -> Rational {
    rat(628319, 100000)
}

/// Which integrand family, with its order/shift parameters.
///
/// Shift parameters are exact rationals so that series coefficients and tail
/// constants stay exact.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelKind {
    /// Theorem-style regularized kernel including the r_n t^{n+1} subtraction;
    /// n = -1 degenerates to the classical Euler integrand for gamma.
    Stirling { n: i32 },
    /// Same without the r_n subtraction.
    Upsilon { n: i32 },
    /// Higher Frullani kernel of order n with shift s > 0.
    Frullani { n: u32, s: Rational },
    /// (1 - e^{-nt})/(1 - e^{-t}) e^{-t}, n >= 1.
    Harmonic { n: u32 },
    /// t^{m-1} e^{-t}/(1 - e^{-t}), m >= 2.
    Zeta { m: u32 },
    /// (s + (e^{-st} - 1)/(1 - e^{-t})) e^{-t}/t, s > 0.
    Malmsten { s: Rational },
    /// e^{-(s+1)t}, s >= 0; closed form 1/(s+1).
    Generator { s: Rational },
}

impl KernelKind {
    /// The power-of-t order driving guard-digit growth (0 if none).
    pub fn order(&self) -> i32 {
        match self {
            KernelKind::Stirling { n } | KernelKind::Upsilon { n } => (*n).max(0) + 1,
            KernelKind::Frullani { n, .. } => *n as i32 + 1,
            KernelKind::Zeta { m } => *m as i32 - 1,
            _ => 0,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            KernelKind::Stirling { n } | KernelKind::Upsilon { n } if *n < -1 => Err(
                Error::Domain(format!("kernel order must be >= -1, got {n}")),
            ),
            KernelKind::Frullani { s, .. } | KernelKind::Malmsten { s }
                if !s.is_positive() =>
            {
                Err(Error::Domain(format!("shift s must be > 0, got {s}")))
            }
            KernelKind::Harmonic { n } if *n < 1 => {
                Err(Error::Domain("harmonic kernel requires n >= 1".into()))
            }
            KernelKind::Zeta { m } if *m < 2 => Err(Error::Domain(
                "zeta kernel requires m >= 2 (integral diverges at 0 otherwise)".into(),
            )),
            KernelKind::Generator { s } if s.is_negative() => {
                Err(Error::Domain(format!("generator shift must be >= 0, got {s}")))
            }
            _ => Ok(()),
        }
    }
}

/// One integrand with its branch metadata.
#[derive(Clone, Debug)]
pub struct IntegrandSpec {
    pub kind: KernelKind,
    /// Branch crossover; must lie strictly inside (0, 2 pi).
    pub crossover_t0: f64,
    /// Minimum number of series terms; the evaluator extends this until the
    /// rigorous truncation bound meets its budget.
    pub series_terms: Option<u32>,
}

/// Process-wide evaluation overrides, set once by the CLI before any
/// computation (flags only; no environment configuration).
static EVAL_OVERRIDES: once_cell::sync::OnceCell<(Option<f64>, Option<u32>)> =
    once_cell::sync::OnceCell::new();

/// Installs crossover / series-term floors for every spec built afterwards.
/// Returns an error if the crossover is out of range or already set.
pub fn set_eval_overrides(crossover: Option<f64>, series_floor: Option<u32>) -> Result<()> {
    if let Some(t0) = crossover {
        if !(t0 > 0.0 && Rational::from_float(t0).map_or(false, |q| q < two_pi_low())) {
            return Err(Error::Domain(format!(
                "crossover must lie strictly in (0, 2pi), got {t0}"
            )));
        }
    }
    EVAL_OVERRIDES
        .set((crossover, series_floor))
        .map_err(|_| Error::Domain("evaluation overrides already set".into()))
}

impl IntegrandSpec {
    pub fn new(kind: KernelKind) -> Result<Self> {
        kind.validate()?;
        let (crossover, series) = EVAL_OVERRIDES.get().copied().unwrap_or((None, None));
        let spec = IntegrandSpec {
            kind,
            crossover_t0: crossover.unwrap_or(1.0),
            series_terms: series.map(|k| k.max(4)),
        };
        Ok(spec)
    }

    pub fn with_crossover(mut self, t0: f64) -> Result<Self> {
        if !(t0 > 0.0 && Rational::from_float(t0).map_or(false, |q| q < two_pi_low())) {
            return Err(Error::Domain(format!(
                "crossover must lie strictly in (0, 2pi), got {t0}"
            )));
        }
        self.crossover_t0 = t0;
        Ok(self)
    }

    pub fn with_series_terms(mut self, k: u32) -> Self {
        self.series_terms = Some(k.max(4));
        self
    }

    /// Default term count: roughly one digit per log10(2pi / t0), plus slack.
    pub fn default_series_terms(&self, target_digits: u32) -> u32 {
        let per_term = (std::f64::consts::TAU / self.crossover_t0).log10();
        (target_digits as f64 / per_term).ceil() as u32 + 10
    }

    pub fn crossover_rational(&self) -> Rational {
        Rational::from_float(self.crossover_t0).expect("validated finite crossover")
    }
}

/// A kernel bound C(n, s) with |kernel(t)| <= C e^{-t} poly(t) for t >= 1;
/// `poly_degree` is zero except for the zeta family.
fn envelope_constant(kind: &KernelKind) -> (Rational, u32) {
    match kind {
        KernelKind::Stirling { n } => {
            (rat_int(2) + b_abs_sum(*n) + r_n(*n).abs(), 0)
        }
        KernelKind::Upsilon { n } => (rat_int(2) + b_abs_sum(*n), 0),
        KernelKind::Frullani { n, s } => {
            let mut e = Rational::zero();
            let mut sp = Rational::one();
            for k in 0..=*n {
                if k > 0 {
                    sp *= s;
                }
                e += &sp / Rational::from(factorial(k));
            }
            (rat_int(1) + e, 0)
        }
        KernelKind::Harmonic { .. } => (rat_int(2), 0),
        KernelKind::Zeta { m } => (rat_int(2), m - 1),
        KernelKind::Malmsten { s } => (s + rat_int(2), 0),
        KernelKind::Generator { .. } => (rat_int(1), 0),
    }
}

/// Rigorous upper bound on the truncated improper-integral tail
/// int_T^inf |kernel(t)| dt, valid for T >= max(crossover, 1).
///
/// Every family satisfies |kernel(t)| <= C t^d e^{-t} there, and
/// int_T^inf t^d e^{-t} dt = e^{-T} d! sum_{i<=d} T^i/i! exactly.
pub fn tail_bound(spec: &IntegrandSpec, t_trunc: &Real) -> Result<Real> {
    let p = PrecisionPolicy::new(30);
    let t_f = t_trunc.to_f64_approx();
    if t_f < spec.crossover_t0.max(1.0) - 1e-9 {
        return Err(Error::Domain(format!(
            "tail bound requires T >= max(crossover, 1), got {t_f}"
        )));
    }
    // a slightly smaller rational T keeps the bound an upper bound
    let t_lo = Rational::from_float(t_f * (1.0 - 1e-12)).expect("finite T");

    if let KernelKind::Generator { s } = &spec.kind {
        // exact closed form e^{-(s+1)T} / (s+1)
        let sp1 = s + rat_int(1);
        let exponent = Real::from_rational(&(-(&sp1) * &t_lo), &p);
        return Ok(exponent.exp().div(&Real::from_rational(&sp1, &p)));
    }

    let (c, d) = envelope_constant(&spec.kind);
    // G_d(T) = d! sum_{i=0}^{d} T^i / i!
    let mut g = Rational::zero();
    let dfac = Rational::from(factorial(d));
    for i in 0..=d {
        let ti = num_traits::pow::pow(t_lo.clone(), i as usize);
        g += &dfac * ti / Rational::from(factorial(i));
    }
    let coeff = Real::from_rational(&(c * g), &p);
    let exponent = Real::from_rational(&(-t_lo), &p);
    // 1-ulp slack so rounding cannot shave the bound
    Ok(coeff.mul(&exponent.exp()).mul(&Real::from_rational(&rat(1048577, 1048576), &p)))
}

/// Crude f64 magnitude bound of the kernel over (0, T], for node planning only.
pub fn magnitude_bound_f64(spec: &IntegrandSpec, t_trunc: f64) -> f64 {
    let (c, d) = envelope_constant(&spec.kind);
    let c = c.to_f64().unwrap_or(4.0);
    let near_zero = match &spec.kind {
        KernelKind::Harmonic { n } => *n as f64,
        KernelKind::Malmsten { s } => s.to_f64().unwrap_or(1.0).powi(2) + 1.0,
        KernelKind::Frullani { n, s } => {
            let s = s.to_f64().unwrap_or(1.0);
            s.powi(*n as i32 + 1) / factorial(*n + 1).to_f64().unwrap_or(1.0) + 1.0
        }
        _ => 2.0,
    };
    (c * t_trunc.powi(d as i32)).max(near_zero).max(1.0)
}

/// Coefficients and branch data for repeated kernel evaluation at one
/// precision. Construction converts all exact coefficients once.
pub struct KernelEvaluator {
    kind: KernelKind,
    policy: PrecisionPolicy,
    t0: Real,
    /// ascending powers of t for the series branch
    series: Vec<Real>,
    /// constant term subtracted after the series (the r_n correction)
    series_const: Option<Real>,
    /// direct-branch prefix coefficients (family dependent, see eval_direct)
    direct: Vec<Real>,
    terms: u32,
}

impl KernelEvaluator {
    /// Builds an evaluator whose series truncation error at the crossover is
    /// rigorously below `series_budget`. Series length starts from the spec's
    /// floor (or the digit-based default) and extends as needed.
    pub fn new(
        spec: &IntegrandSpec,
        policy: &PrecisionPolicy,
        series_budget: &Real,
    ) -> Result<Self> {
        spec.kind.validate()?;
        let floor = spec
            .series_terms
            .unwrap_or_else(|| spec.default_series_terms(policy.target_digits));
        let t0q = spec.crossover_rational();
        let mut terms = floor.max(4);
        loop {
            let bound = series_tail_bound_rational(&spec.kind, terms, &t0q);
            let bound_ok = match &bound {
                Some(b) => Real::from_rational(b, policy) <= *series_budget,
                None => false,
            };
            if bound_ok {
                break;
            }
            if terms > 100_000 {
                return Err(Error::Domain(
                    "series truncation bound cannot meet the error budget".into(),
                ));
            }
            terms += (terms / 4).max(8);
        }

        let (series, series_const, direct) = build_coeffs(&spec.kind, terms, policy);
        Ok(KernelEvaluator {
            kind: spec.kind.clone(),
            policy: *policy,
            t0: Real::from_rational(&t0q, policy),
            series,
            series_const,
            direct,
            terms,
        })
    }

    pub fn terms_used(&self) -> u32 {
        self.terms
    }

    /// Rigorous bound on the series truncation error at argument t (<= t0).
    pub fn series_tail_bound(&self, t: &Real) -> Real {
        let tq = Rational::from_float(t.to_f64_approx() * (1.0 + 1e-12))
            .unwrap_or_else(|| self.kind_t0_rational());
        match series_tail_bound_rational(&self.kind, self.terms, &tq) {
            Some(b) => Real::from_rational(&b, &self.policy),
            None => Real::from_u64(u64::MAX, &self.policy),
        }
    }

    fn kind_t0_rational(&self) -> Rational {
        Rational::from_float(self.t0.to_f64_approx()).unwrap_or_else(|| rat_int(1))
    }

    /// Kernel value at t > 0, accurate at the evaluator's working precision.
    pub fn eval(&self, t: &Real) -> Result<Real> {
        if t.is_zero() || t.is_negative() {
            return Err(Error::Domain("kernel argument must be positive".into()));
        }
        if *t < self.t0 {
            Ok(self.eval_series(t))
        } else {
            Ok(self.eval_direct(t))
        }
    }

    /// Series branch; valid for 0 < t < 2 pi, used below the crossover.
    pub fn eval_series(&self, t: &Real) -> Real {
        let et = t.neg().exp();
        match &self.kind {
            KernelKind::Stirling { .. }
            | KernelKind::Upsilon { .. }
            | KernelKind::Frullani { .. } => {
                let mut acc = horner(&self.series, t);
                if let Some(c) = &self.series_const {
                    acc = acc.sub(c);
                }
                acc.mul(&et)
            }
            KernelKind::Zeta { m } => {
                let acc = horner(&self.series, t);
                let tp = t.powi(m - 2);
                acc.mul(&tp).mul(&et)
            }
            KernelKind::Malmsten { .. } => horner(&self.series, t).mul(&et),
            KernelKind::Harmonic { n } => {
                // sum_{j=1}^{n} e^{-jt}, ascending j
                let mut acc = et.clone();
                let mut q = et.clone();
                for _ in 2..=*n {
                    q = q.mul(&et);
                    acc = acc.add(&q);
                }
                acc
            }
            KernelKind::Generator { .. } => self.eval_direct(t),
        }
    }

    /// Direct branch; used from the crossover upward. Below t = 1 (possible
    /// only with a lowered crossover) precision is boosted to absorb the
    /// cancellation between the Laurent prefix and the function value.
    pub fn eval_direct(&self, t: &Real) -> Real {
        let t = &self.boost_small_t(t);
        let et = t.neg().exp();
        match &self.kind {
            KernelKind::Stirling { n } | KernelKind::Upsilon { n } => {
                let d = one_minus_exp_recip(&et);
                // prefix 1/t + b_0 + b_1 t + ... + b_n t^n
                let mut p = t.recip();
                if *n >= 0 {
                    p = p.add(&horner(&self.direct, t));
                }
                let mut num = d.sub(&p);
                if let Some(r) = &self.series_const {
                    // r_n t^{n+1}
                    num = num.sub(&r.mul(&t.powi((*n + 1) as u32)));
                }
                let den = t.powi((*n + 1).max(0) as u32);
                num.mul(&et).div(&den)
            }
            KernelKind::Frullani { n, s: _ } => {
                let st = self.direct.last().expect("shift").mul(t);
                let est = st.neg().exp();
                let prefix = horner(&self.direct[..self.direct.len() - 1], t);
                est.sub(&prefix).mul(&et).div(&t.powi(n + 1))
            }
            KernelKind::Harmonic { n } => {
                let d = one_minus_exp_recip(&et);
                // small integers are exact at any precision
                let ent = t.neg().mul(&Real::from_u64(*n as u64, &self.policy)).exp();
                et.one_like().sub(&ent).mul(&d).mul(&et)
            }
            KernelKind::Zeta { m } => {
                let d = one_minus_exp_recip(&et);
                t.powi(m - 1).mul(&et).mul(&d)
            }
            KernelKind::Malmsten { .. } => {
                let s = &self.direct[0];
                let d = one_minus_exp_recip(&et);
                let st = s.mul(t);
                let est = st.neg().exp();
                s.add(&est.sub(&est.one_like()).mul(&d)).mul(&et).div(t)
            }
            KernelKind::Generator { .. } => {
                let sp1 = &self.direct[0];
                sp1.mul(t).neg().exp()
            }
        }
    }

    fn boost_small_t(&self, t: &Real) -> Real {
        let tf = t.to_f64_approx();
        if tf < 1.0 && tf > 0.0 {
            let extra = ((self.kind.order() as f64 + 1.0) * (1.0 / tf).log10()).ceil() as u32;
            t.with_policy(&self.policy.boosted(extra + 4))
        } else {
            t.clone()
        }
    }
}

/// 1/(1 - e^{-t}) given e^{-t}.
fn one_minus_exp_recip(et: &Real) -> Real {
    et.one_like().sub(et).recip()
}

fn horner(coeffs: &[Real], t: &Real) -> Real {
    let mut acc = match coeffs.last() {
        Some(c) => c.clone(),
        None => return t.zero_like(),
    };
    for c in coeffs.iter().rev().skip(1) {
        acc = acc.mul(t).add(c);
    }
    acc
}

/// (series coefficients ascending in t, optional subtracted constant,
/// direct-branch coefficients).
fn build_coeffs(
    kind: &KernelKind,
    terms: u32,
    p: &PrecisionPolicy,
) -> (Vec<Real>, Option<Real>, Vec<Real>) {
    let conv = |q: &Rational| Real::from_rational(q, p);
    match kind {
        KernelKind::Stirling { n } | KernelKind::Upsilon { n } => {
            let series = (0..terms)
                .map(|i| conv(&b_coeff(n + 1 + i as i32)))
                .collect();
            let series_const = match kind {
                KernelKind::Stirling { n } => {
                    let r = r_n(*n);
                    if r.is_zero() {
                        None
                    } else {
                        Some(conv(&r))
                    }
                }
                _ => None,
            };
            let direct = (0..=*n).map(|k| conv(&b_coeff(k))).collect();
            (series, series_const, direct)
        }
        KernelKind::Frullani { n, s } => {
            let mut c = Rational::one();
            let neg_s = -s.clone();
            // prefix (-s)^k / k! for k = 0..n, then powers continue for the series
            let mut direct: Vec<Real> = Vec::with_capacity(*n as usize + 2);
            direct.push(conv(&c));
            for k in 1..=*n {
                c = c * &neg_s / rat_int(k as i64);
                direct.push(conv(&c));
            }
            let mut series = Vec::with_capacity(terms as usize);
            for i in 0..terms {
                c = c * &neg_s / rat_int((*n + 1 + i) as i64);
                series.push(conv(&c));
            }
            direct.push(conv(s)); // shift itself, for e^{-st}
            (series, None, direct)
        }
        KernelKind::Zeta { .. } => {
            // t/(1 - e^{-t}) = sum_{k>=-1} b_k t^{k+1}
            let series = (0..terms)
                .map(|i| conv(&b_coeff(i as i32 - 1)))
                .collect();
            (series, None, Vec::new())
        }
        KernelKind::Malmsten { s } => {
            // c_m = sum_{j=1}^{m+1} (-s)^j / j! b_{m-j}, series sum_{m>=1} c_m t^{m-1}
            let neg_s = -s.clone();
            let mut spow = vec![Rational::one()];
            for j in 1..=terms as usize + 1 {
                let last = spow.last().unwrap() * &neg_s / rat_int(j as i64);
                spow.push(last); // (-s)^j / j!
            }
            let series = (1..=terms)
                .map(|m| {
                    let mut cm = Rational::zero();
                    for j in 1..=m as usize + 1 {
                        cm += &spow[j] * b_coeff(m as i32 - j as i32);
                    }
                    conv(&cm)
                })
                .collect();
            (series, None, vec![conv(s)])
        }
        KernelKind::Harmonic { .. } => (Vec::new(), None, Vec::new()),
        KernelKind::Generator { s } => {
            (Vec::new(), None, vec![conv(&(s + rat_int(1)))])
        }
    }
}

/// Rigorous rational bound on the omitted series tail at argument t (exact
/// rational <= crossover). `None` means the bound diverges for this length.
fn series_tail_bound_rational(kind: &KernelKind, terms: u32, t: &Rational) -> Option<Rational> {
    let c_low = two_pi_low();
    let geo = |start_power: u32, scale: Rational| -> Option<Rational> {
        // sum_{i >= K} 4 (t/C)^i / C^extra-type bounds; caller passes scale
        let ratio = t / &c_low;
        if ratio >= Rational::one() {
            return None;
        }
        let tk = num_traits::pow::pow(t.clone(), start_power as usize);
        Some(scale * tk / (Rational::one() - ratio))
    };
    match kind {
        KernelKind::Stirling { n } | KernelKind::Upsilon { n } => {
            // sum_{i>=K} |b_{n+1+i}| t^i <= 4 t^K / (C^{n+2+K} (1 - t/C))
            let scale = rat_int(4)
                / num_traits::pow::pow(c_low.clone(), (*n + 2 + terms as i32) as usize);
            geo(terms, scale)
        }
        KernelKind::Zeta { .. } => {
            // coefficients b_{i-1} on t^i: |b_{i-1}| <= 4/C^i
            let scale = rat_int(4) / num_traits::pow::pow(c_low.clone(), terms as usize);
            geo(terms, scale)
        }
        KernelKind::Frullani { n, s } => {
            // factorial tail: first omitted term s^{n+1+K} t^K/(n+1+K)!
            let k0 = *n + 1 + terms;
            let q = s * t / rat_int(k0 as i64 + 1);
            if q >= Rational::one() {
                return None;
            }
            let a = num_traits::pow::pow(s.clone(), k0 as usize)
                * num_traits::pow::pow(t.clone(), terms as usize)
                / Rational::from(factorial(k0));
            Some(a / (Rational::one() - q))
        }
        KernelKind::Malmsten { s } => {
            // |c_m| <= s^{m+1}/(m+1)! + s^m/(2 m!) + 4 e^{2 pi s} / (2 pi)^{m+1}
            let k = terms;
            let st = s * t;
            let q1 = &st / rat_int(k as i64 + 3);
            let q2 = &st / rat_int(k as i64 + 2);
            let q3 = t / &c_low;
            if q1 >= Rational::one() || q2 >= Rational::one() || q3 >= Rational::one() {
                return None;
            }
            let stk = num_traits::pow::pow(st.clone(), k as usize);
            let tk = num_traits::pow::pow(t.clone(), k as usize);
            let t1 = s * s * &stk / Rational::from(factorial(k + 2))
                / (Rational::one() - q1);
            let t2 = s * &stk / (rat_int(2) * Rational::from(factorial(k + 1)))
                / (Rational::one() - q2);
            // rational upper bound on e^{2 pi s}: exp(x) <= 4^ceil(x) via e < 4
            let x = (&two_pi_high() * s).to_f64().unwrap_or(f64::INFINITY);
            if !x.is_finite() {
                return None;
            }
            let e2pis = num_traits::pow::pow(rat_int(4), x.ceil().max(1.0) as usize);
            let t3 = rat_int(4) * e2pis
                / num_traits::pow::pow(c_low.clone(), k as usize + 2)
                * tk
                / (Rational::one() - q3);
            Some(t1 + t2 + t3)
        }
        KernelKind::Harmonic { .. } | KernelKind::Generator { .. } => {
            Some(Rational::zero()) // finite closed forms, nothing truncated
        }
    }
}

// Convenience single-shot evaluators used by tests and by the spec's
// per-operation surface. Quadrature builds a `KernelEvaluator` instead.

fn eval_once(kind: KernelKind, t: &Real, p: &PrecisionPolicy) -> Result<Real> {
    let spec = IntegrandSpec::new(kind)?;
    let budget = Real::pow10(-(p.target_digits as i32) - 2, p);
    let ev = KernelEvaluator::new(&spec, p, &budget)?;
    ev.eval(t)
}

pub fn eval_stirling_kernel(n: i32, t: &Real, p: &PrecisionPolicy) -> Result<Real> {
    eval_once(KernelKind::Stirling { n }, t, p)
}

pub fn eval_upsilon_kernel(n: i32, t: &Real, p: &PrecisionPolicy) -> Result<Real> {
    eval_once(KernelKind::Upsilon { n }, t, p)
}

pub fn eval_frullani_kernel(n: u32, s: &Rational, t: &Real, p: &PrecisionPolicy) -> Result<Real> {
    eval_once(KernelKind::Frullani { n, s: s.clone() }, t, p)
}

pub fn eval_zeta_kernel(m: u32, t: &Real, p: &PrecisionPolicy) -> Result<Real> {
    eval_once(KernelKind::Zeta { m }, t, p)
}

pub fn eval_malmsten_kernel(s: &Rational, t: &Real, p: &PrecisionPolicy) -> Result<Real> {
    eval_once(KernelKind::Malmsten { s: s.clone() }, t, p)
}
