//! Arbitrary-precision real arithmetic with explicit per-value precision.
//!
//! Backed by `astro-float`, which rounds every operation correctly at the
//! requested bit precision (Ziv loops internally), so results are
//! deterministic and independent of evaluation history. Precision is always
//! carried on the value itself; there is no ambient global precision.

use crate::error::{Error, Result};
use crate::exact::Rational;
use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

const RM: RoundingMode = RoundingMode::ToEven;

/// log2(10), rounded up a little; used to size binary precision from digits.
const LOG2_10: f64 = 3.321928094887363;

thread_local! {
    // Per-thread constants cache. Cached constants are correctly rounded on
    // retrieval, so sharing granularity does not affect results.
    static CONSTS: RefCell<Consts> =
        RefCell::new(Consts::new().expect("constants cache allocation"));
}

/// Requested decimal precision plus guard digits; working precision in bits
/// is derived as ceil((target + guard) * log2(10)).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub target_digits: u32,
    pub guard_digits: u32,
}

impl PrecisionPolicy {
    /// Policy with the default guard of 12 digits (the contract requires >= 10).
    pub fn new(target_digits: u32) -> Self {
        Self::with_guard(target_digits, 12)
    }

    pub fn with_guard(target_digits: u32, guard_digits: u32) -> Self {
        assert!(target_digits >= 1, "target_digits must be positive");
        assert!(guard_digits >= 10, "guard_digits must be at least 10");
        PrecisionPolicy { target_digits, guard_digits }
    }

    pub fn working_bits(&self) -> usize {
        (((self.target_digits + self.guard_digits) as f64) * LOG2_10).ceil() as usize
    }

    /// Same target with `extra` additional guard digits.
    pub fn boosted(&self, extra: u32) -> Self {
        PrecisionPolicy {
            target_digits: self.target_digits,
            guard_digits: self.guard_digits + extra,
        }
    }

    /// Guard growth for evaluating an order-`n` kernel at argument `t`:
    /// ceil((n+1) * log10(max(1, t))) digits absorb the polynomially large
    /// intermediates subtracted against an O(1) result.
    pub fn kernel_guard(n: i32, t_upper: f64) -> u32 {
        let m = t_upper.max(1.0);
        (((n.max(0) + 1) as f64) * m.log10()).ceil().max(0.0) as u32
    }
}

/// An arbitrary-precision real value tagged with its working precision in bits.
///
/// Binary operations round correctly at the larger of the two operand
/// precisions; the rounding error of every operation is below 1 ulp at the
/// stated precision.
#[derive(Clone, Debug)]
pub struct Real {
    x: BigFloat,
    bits: usize,
}

impl Real {
    fn wrap(x: BigFloat, bits: usize) -> Self {
        debug_assert!(!x.is_nan() && !x.is_inf(), "non-finite Real");
        Real { x, bits }
    }

    pub fn zero(p: &PrecisionPolicy) -> Self {
        Real::wrap(BigFloat::new(p.working_bits()), p.working_bits())
    }

    pub fn from_u64(v: u64, p: &PrecisionPolicy) -> Self {
        let bits = p.working_bits();
        Real::wrap(BigFloat::from_u64(v, bits), bits)
    }

    pub fn from_i64(v: i64, p: &PrecisionPolicy) -> Self {
        let bits = p.working_bits();
        Real::wrap(BigFloat::from_i64(v, bits), bits)
    }

    /// Exact conversion (f64 values are dyadic rationals).
    pub fn from_f64(v: f64, p: &PrecisionPolicy) -> Self {
        let bits = p.working_bits().max(64);
        Real::wrap(BigFloat::from_f64(v, bits), bits)
    }

    /// Exact conversion of a big integer, then one correct rounding if the
    /// integer needs more bits than the working precision.
    pub fn from_bigint(v: &BigInt, p: &PrecisionPolicy) -> Self {
        let bits = p.working_bits();
        Real::wrap(bigint_to_bigfloat(v, bits), bits)
    }

    /// Nearest representable value of `q` at the working precision: both parts
    /// are converted exactly, then divided with one correct rounding.
    pub fn from_rational(q: &Rational, p: &PrecisionPolicy) -> Self {
        let bits = p.working_bits();
        if q.is_zero() {
            return Self::zero(p);
        }
        let exact_bits = |n: &BigInt| (n.magnitude().bits() as usize + 64).max(bits);
        let num = bigint_to_bigfloat(q.numer(), exact_bits(q.numer()));
        let den = bigint_to_bigfloat(q.denom(), exact_bits(q.denom()));
        Real::wrap(num.div(&den, bits, RM), bits)
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Re-rounds to the working precision of `p` (correctly rounded).
    pub fn with_policy(&self, p: &PrecisionPolicy) -> Self {
        let bits = p.working_bits();
        let mut x = self.x.clone();
        x.set_precision(bits, RM).expect("set_precision");
        Real::wrap(x, bits)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero()
    }

    /// 1 at this value's precision.
    pub fn one_like(&self) -> Self {
        Real::wrap(BigFloat::from_u64(1, self.bits), self.bits)
    }

    /// 0 at this value's precision.
    pub fn zero_like(&self) -> Self {
        Real::wrap(BigFloat::new(self.bits), self.bits)
    }

    pub fn is_negative(&self) -> bool {
        self.x.is_negative() && !self.x.is_zero()
    }

    pub fn neg(&self) -> Self {
        Real::wrap(self.x.neg(), self.bits)
    }

    pub fn abs(&self) -> Self {
        let mut x = self.x.clone();
        x.set_sign(Sign::Pos);
        Real::wrap(x, self.bits)
    }

    pub fn add(&self, rhs: &Real) -> Self {
        let bits = self.bits.max(rhs.bits);
        Real::wrap(self.x.add(&rhs.x, bits, RM), bits)
    }

    pub fn sub(&self, rhs: &Real) -> Self {
        let bits = self.bits.max(rhs.bits);
        Real::wrap(self.x.sub(&rhs.x, bits, RM), bits)
    }

    pub fn mul(&self, rhs: &Real) -> Self {
        let bits = self.bits.max(rhs.bits);
        Real::wrap(self.x.mul(&rhs.x, bits, RM), bits)
    }

    pub fn div(&self, rhs: &Real) -> Self {
        let bits = self.bits.max(rhs.bits);
        Real::wrap(self.x.div(&rhs.x, bits, RM), bits)
    }

    pub fn recip(&self) -> Self {
        Real::wrap(self.x.reciprocal(self.bits, RM), self.bits)
    }

    /// Integer power t^n (n >= 0), correctly rounded.
    pub fn powi(&self, n: u32) -> Self {
        Real::wrap(self.x.powi(n as usize, self.bits, RM), self.bits)
    }

    pub fn exp(&self) -> Self {
        CONSTS.with(|cc| Real::wrap(self.x.exp(self.bits, RM, &mut cc.borrow_mut()), self.bits))
    }

    pub fn ln(&self) -> Result<Self> {
        if self.is_zero() || self.is_negative() {
            return Err(Error::Domain("log of non-positive value".into()));
        }
        CONSTS.with(|cc| {
            Ok(Real::wrap(self.x.ln(self.bits, RM, &mut cc.borrow_mut()), self.bits))
        })
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.is_negative() {
            return Err(Error::Domain("sqrt of negative value".into()));
        }
        Ok(Real::wrap(self.x.sqrt(self.bits, RM), self.bits))
    }

    /// Multiplies by 2^k exactly.
    pub fn mul_pow2(&self, k: i32) -> Self {
        if self.x.is_zero() {
            return self.clone();
        }
        let mut x = self.x.clone();
        let e = x.exponent().expect("finite");
        x.set_exponent(e + k);
        Real::wrap(x, self.bits)
    }

    pub fn cmp_abs(&self, rhs: &Real) -> Ordering {
        match self.x.abs_cmp(&rhs.x) {
            Some(v) if v < 0 => Ordering::Less,
            Some(v) if v > 0 => Ordering::Greater,
            _ => Ordering::Equal,
        }
    }

    /// Binary magnitude: the e with |x| in [2^(e-1), 2^e), or None for zero.
    pub fn exponent2(&self) -> Option<i32> {
        if self.x.is_zero() {
            None
        } else {
            self.x.exponent()
        }
    }

    /// Crude f64 view for planning decisions only (never for results).
    pub fn to_f64_approx(&self) -> f64 {
        if self.x.is_zero() {
            return 0.0;
        }
        let (words, _mb, sign, e, _) = self.x.as_raw_parts().expect("finite");
        let mut top = 0.0f64;
        // words are little-endian; fold the top two for 53+ bits
        let n = words.len();
        let wbits = astro_float::WORD_BIT_SIZE as i32;
        for i in 0..2.min(n) {
            top += words[n - 1 - i] as f64 * (2f64).powi(-wbits * (i as i32 + 1));
        }
        let v = top * (2f64).powi(e);
        if sign == Sign::Neg {
            -v
        } else {
            v
        }
    }

    /// 10^k at this value's precision.
    pub fn pow10(k: i32, p: &PrecisionPolicy) -> Self {
        let ten = Real::from_u64(10, p);
        let v = ten.powi(k.unsigned_abs());
        if k < 0 {
            v.recip()
        } else {
            v
        }
    }

    /// Decimal rendering with round-to-nearest (half-even) at `digits`
    /// significant digits. Fixed-point notation while the decimal exponent is
    /// moderate, scientific (`d.dddde-12`) otherwise.
    pub fn to_decimal_string(&self, digits: u32) -> String {
        decimal_string(self, digits)
    }
}

/// pi at the working precision of `p`, correctly rounded.
pub fn pi(p: &PrecisionPolicy) -> Real {
    let bits = p.working_bits();
    CONSTS.with(|cc| Real::wrap(cc.borrow_mut().pi(bits, RM), bits))
}

/// ln(10) at the working precision of `p`, correctly rounded.
pub fn ln_10(p: &PrecisionPolicy) -> Real {
    let bits = p.working_bits();
    CONSTS.with(|cc| Real::wrap(cc.borrow_mut().ln_10(bits, RM), bits))
}

impl PartialEq for Real {
    fn eq(&self, rhs: &Real) -> bool {
        self.partial_cmp(rhs) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, rhs: &Real) -> Option<Ordering> {
        self.x.cmp(&rhs.x).map(|v| v.cmp(&0))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.bits as f64 / LOG2_10).floor() as u32;
        write!(f, "{}", decimal_string(self, digits.max(1)))
    }
}

/// Exact BigInt -> BigFloat conversion (via hexadecimal digits, which map
/// exactly onto binary), with one correct rounding if `bits` is too small.
fn bigint_to_bigfloat(v: &BigInt, bits: usize) -> BigFloat {
    if v.is_zero() {
        return BigFloat::new(bits);
    }
    let hex = v.magnitude().to_str_radix(16);
    let p = bits.max(4 * hex.len() + 64);
    let mut x = CONSTS.with(|cc| BigFloat::parse(&hex, Radix::Hex, p, RM, &mut cc.borrow_mut()));
    if v.is_negative() {
        x = x.neg();
    }
    x.set_precision(bits, RM).expect("set_precision");
    x
}

/// value = sign * M * 2^(e - mb) with M the mantissa integer of `mb` bits.
fn raw_to_bigint(x: &BigFloat) -> (BigInt, i64) {
    let (words, mb, sign, e, _) = x.as_raw_parts().expect("finite");
    let wbits = astro_float::WORD_BIT_SIZE;
    let mut bytes = Vec::with_capacity(words.len() * wbits / 8);
    for w in words {
        bytes.extend_from_slice(&w.to_le_bytes());
    }
    let m = BigUint::from_bytes_le(&bytes);
    let m = BigInt::from(m);
    let m = if sign == Sign::Neg { -m } else { m };
    // stored word array may be wider than mb; the value scale uses the
    // actual bit width of the words
    let total_bits = (words.len() * wbits) as i64;
    let _ = mb;
    (m, e as i64 - total_bits)
}

/// round(a / b) with ties to even, for positive b.
fn div_round_half_even(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = num_integer::Integer::div_rem(a, b);
    // div_rem truncates toward zero; remainder carries the sign of a
    let two_r: BigInt = r.abs() * 2;
    let go_away = match two_r.cmp(&b.abs()) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => num_integer::Integer::is_odd(&q),
    };
    if go_away {
        if a.is_negative() {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

/// |x| * 10^q rounded to the nearest integer (half-even).
fn scaled_abs_integer(m: &BigInt, e2: i64, q: i32) -> BigInt {
    let mut num = m.abs();
    let mut den = BigInt::from(1u8);
    if q >= 0 {
        num *= BigInt::from(10u8).pow(q as u32);
    } else {
        den *= BigInt::from(10u8).pow((-q) as u32);
    }
    if e2 >= 0 {
        num <<= e2 as u64;
    } else {
        den <<= (-e2) as u64;
    }
    div_round_half_even(&num, &den)
}

fn decimal_string(v: &Real, digits: u32) -> String {
    let digits = digits.max(1);
    if v.is_zero() {
        return "0".into();
    }
    let (m, e2) = raw_to_bigint(&v.x);
    let neg = m.is_negative();

    // decimal exponent estimate from the binary one, corrected below
    let e_bin = v.exponent2().expect("nonzero") as f64;
    let mut d10 = (e_bin * std::f64::consts::LOG10_2).floor() as i32;
    let mut scaled;
    loop {
        scaled = scaled_abs_integer(&m, e2, digits as i32 - 1 - d10);
        let ndig = scaled.to_string().len() as i32;
        if ndig > digits as i32 {
            d10 += 1;
        } else if ndig < digits as i32 {
            d10 -= 1;
        } else {
            break;
        }
    }

    let digit_str = scaled.to_string();
    let sign = if neg { "-" } else { "" };
    // fixed notation for moderate exponents, scientific otherwise
    if d10 >= -6 && d10 < digits as i32 + 6 {
        if d10 >= digits as i32 - 1 {
            // integer with trailing zeros
            let zeros = "0".repeat((d10 - digits as i32 + 1) as usize);
            format!("{sign}{digit_str}{zeros}")
        } else if d10 >= 0 {
            let (int_part, frac_part) = digit_str.split_at(d10 as usize + 1);
            format!("{sign}{int_part}.{frac_part}")
        } else {
            let zeros = "0".repeat((-d10 - 1) as usize);
            format!("{sign}0.{zeros}{digit_str}")
        }
    } else {
        let (head, tail) = digit_str.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{d10}")
        } else {
            format!("{sign}{head}.{tail}e{d10}")
        }
    }
}
