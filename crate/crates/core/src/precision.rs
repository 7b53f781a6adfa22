//! Arbitrary-precision real arithmetic and the guard-digit policy.
//!
//! [`Real`] is a binary floating-point number with a [`BigInt`] mantissa and an
//! unbounded exponent. Every value carries its own precision in bits; a binary
//! operation is performed at the larger of its operands' precisions and rounded
//! to nearest once. Callers create their values through a [`PrecisionContext`],
//! so in practice every quantity of a computation shares one precision.
//!
//! Precision is specified externally in decimal digits. A context with `W`
//! working digits uses `ceil(W * log2(10)) + 8` bits, which keeps the relative
//! rounding error of one field operation below `10^(1 - W)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Float, One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub(crate) const LOG2_10: f64 = std::f64::consts::LOG2_10;
pub(crate) const LOG10_2: f64 = std::f64::consts::LOG10_2;

/// Smallest number of guard digits a context may carry.
pub const MIN_GUARD_DIGITS: u64 = 32;

/// Guard digits added per expected iteration.
pub const GUARD_DIGITS_PER_ITERATION: u64 = 8;

/// Denominators accepted by [`pow_rational`].
pub const SUPPORTED_DENOMINATORS: [i64; 6] = [1, 2, 3, 4, 6, 12];

/// Number of bits used to carry `digits` decimal digits.
pub fn digits_to_bits(digits: u64) -> u64 {
    (digits as f64 * LOG2_10).ceil() as u64 + 8
}

/// Working precision of a computation.
///
/// `working_digits = target_digits + guard_digits`, with at least
/// [`MIN_GUARD_DIGITS`] guard digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionContext {
    target_digits: u64,
    working_digits: u64,
    guard_digits: u64,
    max_iterations: u32,
}

/// Builds the context for an iteration of the given order (2, 3 or 4).
///
/// `max_iterations = ceil(log(target) / log(order)) + 3` and
/// `guard_digits = 32 + 8 * max_iterations`.
pub fn make_context(target_digits: u64, algorithm_order: u32) -> Result<PrecisionContext> {
    if target_digits == 0 {
        return Err(Error::InvalidDigits);
    }
    if !(2..=4).contains(&algorithm_order) {
        return Err(Error::UnsupportedOrder(algorithm_order));
    }
    let max_iterations = ceil_log(target_digits, algorithm_order) + 3;
    let guard_digits = MIN_GUARD_DIGITS + GUARD_DIGITS_PER_ITERATION * max_iterations as u64;
    PrecisionContext::new(target_digits, guard_digits, max_iterations)
}

/// Smallest `k` with `base^k >= value`, computed without floating point.
fn ceil_log(value: u64, base: u32) -> u32 {
    let mut k = 0;
    let mut power: u128 = 1;
    while power < value as u128 {
        power *= base as u128;
        k += 1;
    }
    k
}

impl PrecisionContext {
    pub fn new(target_digits: u64, guard_digits: u64, max_iterations: u32) -> Result<Self> {
        if target_digits == 0 {
            return Err(Error::InvalidDigits);
        }
        if guard_digits < MIN_GUARD_DIGITS {
            return Err(Error::PrecisionInsufficient(format!(
                "{guard_digits} guard digits, at least {MIN_GUARD_DIGITS} required"
            )));
        }
        if max_iterations == 0 {
            return Err(Error::Domain("max_iterations must be at least 1".into()));
        }
        Ok(Self {
            target_digits,
            working_digits: target_digits + guard_digits,
            guard_digits,
            max_iterations,
        })
    }

    pub fn target_digits(&self) -> u64 {
        self.target_digits
    }

    pub fn working_digits(&self) -> u64 {
        self.working_digits
    }

    pub fn guard_digits(&self) -> u64 {
        self.guard_digits
    }

    pub fn max_iterations(&self) -> u32 {
        self.max_iterations
    }

    /// Internal precision in bits.
    pub fn bits(&self) -> u64 {
        digits_to_bits(self.working_digits)
    }

    /// Same target and iteration budget with a different guard.
    pub fn with_guard_digits(&self, guard_digits: u64) -> Result<Self> {
        Self::new(self.target_digits, guard_digits, self.max_iterations)
    }

    /// The context used for two-precision stability checks.
    pub fn with_doubled_guard(&self) -> Self {
        Self {
            working_digits: self.target_digits + 2 * self.guard_digits,
            guard_digits: 2 * self.guard_digits,
            ..*self
        }
    }

    pub fn zero(&self) -> Real {
        Real::zero(self.bits())
    }

    pub fn one(&self) -> Real {
        self.int(1)
    }

    pub fn int(&self, value: i64) -> Real {
        Real::from_i64(value, self.bits())
    }

    /// `p / q` rounded once to the working precision.
    pub fn ratio(&self, p: i64, q: i64) -> Real {
        Real::from_ratio(&BigInt::from(p), &BigInt::from(q), self.bits())
    }

    pub fn rational(&self, r: Rational64) -> Real {
        self.ratio(*r.numer(), *r.denom())
    }

    /// Parses an exact decimal string (`12`, `-0.75`, `1.5e-3`).
    pub fn parse(&self, text: &str) -> Result<Real> {
        Real::parse_decimal(text, self.bits())
    }

    /// `10^exponent` at working precision.
    pub fn pow10(&self, exponent: i64) -> Real {
        let ten_k = BigInt::from(10u32).pow(exponent.unsigned_abs());
        if exponent >= 0 {
            Real::from_bigint(ten_k, self.bits())
        } else {
            Real::from_ratio(&BigInt::one(), &ten_k, self.bits())
        }
    }
}

/// Arbitrary-precision binary floating-point number `mant * 2^exp`.
#[derive(Clone, Debug)]
pub struct Real {
    mant: BigInt,
    exp: i64,
    bits: u64,
}

/// Truncated decimal expansion: `0.d1 d2 d3 ... * 10^(exponent + 1)`, i.e. the
/// first digit has weight `10^exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digits {
    pub negative: bool,
    pub digits: String,
    pub exponent: i64,
}

impl Real {
    pub fn zero(bits: u64) -> Self {
        Self {
            mant: BigInt::zero(),
            exp: 0,
            bits,
        }
    }

    pub fn from_i64(value: i64, bits: u64) -> Self {
        Self::from_bigint(BigInt::from(value), bits)
    }

    pub fn from_bigint(value: BigInt, bits: u64) -> Self {
        Self::from_parts(value, 0, bits)
    }

    /// Exact conversion of a finite `f64`, then rounded to `bits`.
    pub fn from_f64(value: f64, bits: u64) -> Self {
        assert!(value.is_finite(), "non-finite f64 {value}");
        let (mantissa, exponent, sign) = value.integer_decode();
        let mant = BigInt::from(mantissa) * sign as i64;
        Self::from_parts(mant, exponent as i64, bits)
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt, bits: u64) -> Self {
        divide_mantissas(num, 0, den, 0, bits)
    }

    pub fn parse_decimal(text: &str, bits: u64) -> Result<Self> {
        let err = || Error::Parse(text.to_string());
        let s = text.trim();
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let (coeff, exp10) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], body[i + 1..].parse::<i64>().map_err(|_| err())?),
            None => (body, 0),
        };
        let (int_part, frac_part) = match coeff.find('.') {
            Some(i) => (&coeff[..i], &coeff[i + 1..]),
            None => (coeff, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let all_digits = format!("{int_part}{frac_part}");
        let mut mant = all_digits.parse::<BigInt>().map_err(|_| err())?;
        if negative {
            mant = -mant;
        }
        let scale = exp10 - frac_part.len() as i64;
        let ten_k = BigInt::from(10u32).pow(scale.unsigned_abs());
        Ok(if scale >= 0 {
            Self::from_bigint(mant * ten_k, bits)
        } else {
            Self::from_ratio(&mant, &ten_k, bits)
        })
    }

    fn from_parts(mant: BigInt, exp: i64, bits: u64) -> Self {
        let mut r = Self { mant, exp, bits };
        r.normalize();
        r
    }

    /// Rounds the mantissa to `bits` (nearest, ties away from zero) and strips
    /// trailing zero bits.
    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let len = self.mant.bits();
        if len > self.bits {
            let shift = len - self.bits;
            let sign = self.mant.sign();
            let mag = self.mant.magnitude();
            let mut q: BigUint = mag >> shift;
            if mag.bit(shift - 1) {
                q += 1u32;
            }
            let mut exp = self.exp + shift as i64;
            if q.bits() > self.bits {
                q >>= 1;
                exp += 1;
            }
            self.mant = BigInt::from_biguint(sign, q);
            self.exp = exp;
        }
        if let Some(tz) = self.mant.trailing_zeros() {
            if tz > 0 {
                self.mant >>= tz;
                self.exp += tz as i64;
            }
        }
    }

    /// Precision in bits.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Precision in decimal digits.
    pub fn digits(&self) -> u64 {
        (self.bits as f64 * LOG10_2).floor() as u64
    }

    /// Re-rounds to a new precision.
    pub fn with_bits(&self, bits: u64) -> Self {
        Self::from_parts(self.mant.clone(), self.exp, bits)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn abs(&self) -> Self {
        Self {
            mant: self.mant.abs(),
            ..self.clone()
        }
    }

    /// Exact multiplication by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self {
            exp: self.exp + k,
            ..self.clone()
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        Self::from_parts(&self.mant * k, self.exp, self.bits)
    }

    pub fn div_int(&self, k: &BigInt) -> Self {
        divide_mantissas(&self.mant, self.exp, k, 0, self.bits)
    }

    /// `self^k` by repeated squaring.
    pub fn powi(&self, k: u32) -> Self {
        let mut result = Real::from_i64(1, self.bits);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn recip(&self) -> Self {
        &Real::from_i64(1, self.bits) / self
    }

    /// Position of the leading bit: `2^(top-1) <= |self| < 2^top`.
    fn top(&self) -> i64 {
        self.exp + self.mant.bits() as i64
    }

    /// Splits `|self|` into `f * 2^e` with `f` in `[1, 2)`.
    fn frexp(&self) -> (f64, i64) {
        let len = self.mant.bits();
        let mag = self.mant.magnitude();
        let (head, dropped) = if len > 63 {
            (mag >> (len - 63), len - 63)
        } else {
            (mag.clone(), 0)
        };
        let head = head.to_u64().expect("63-bit head fits in u64") as f64;
        let head_len = len.min(63);
        let f = head / 2f64.powi(head_len as i32 - 1);
        (f, self.exp + dropped as i64 + head_len as i64 - 1)
    }

    /// `log10 |self|` as a hardware float; `-inf` for zero.
    pub fn log10_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (f, e) = self.frexp();
        f.log10() + e as f64 * LOG10_2
    }

    /// Nearest `f64` (saturating to 0 / infinity out of range).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let (f, e) = self.frexp();
        let v = f * 2f64.powi(e.clamp(-1100, 1100) as i32);
        if self.is_negative() {
            -v
        } else {
            v
        }
    }

    fn cmp_abs(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        match self.top().cmp(&other.top()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let base = self.exp.min(other.exp);
        let a = self.mant.magnitude() << (self.exp - base) as u64;
        let b = other.mant.magnitude() << (other.exp - base) as u64;
        a.cmp(&b)
    }

    /// Truncated (toward zero) decimal expansion with `sig` significant digits.
    pub fn to_digits(&self, sig: usize) -> Digits {
        assert!(sig > 0);
        if self.is_zero() {
            return Digits {
                negative: false,
                digits: "0".repeat(sig),
                exponent: 0,
            };
        }
        let mut exponent = self.log10_abs().floor() as i64;
        loop {
            let n = self.floor_scaled_abs(sig as i64 - 1 - exponent);
            let text = n.to_string();
            match text.len().cmp(&sig) {
                Ordering::Less => exponent -= 1,
                Ordering::Greater => exponent += 1,
                Ordering::Equal => {
                    return Digits {
                        negative: self.is_negative(),
                        digits: text,
                        exponent,
                    };
                }
            }
        }
    }

    /// `floor(|self| * 10^k)`, exact.
    fn floor_scaled_abs(&self, k: i64) -> BigUint {
        let mut num = self.mant.magnitude().clone();
        let mut den = BigUint::one();
        if self.exp >= 0 {
            num <<= self.exp as u64;
        } else {
            den <<= (-self.exp) as u64;
        }
        let ten_k = BigUint::from(10u32).pow(k.unsigned_abs());
        if k >= 0 {
            num *= ten_k;
        } else {
            den *= ten_k;
        }
        num / den
    }

    fn add_signed(&self, other: &Self, negate: bool) -> Self {
        let bits = self.bits.max(other.bits);
        let rhs = if negate { -&other.mant } else { other.mant.clone() };
        if other.is_zero() {
            return self.with_bits(bits);
        }
        if self.is_zero() {
            return Self::from_parts(rhs, other.exp, bits);
        }
        let top = self.top().max(other.top());
        let base = self.exp.min(other.exp).max(top - bits as i64 - 16);
        let sum = align(&self.mant, self.exp, base) + align(&rhs, other.exp, base);
        Self::from_parts(sum, base, bits)
    }
}

/// Mantissa rescaled to exponent `base`; bits below `base` are truncated.
fn align(mant: &BigInt, exp: i64, base: i64) -> BigInt {
    if exp >= base {
        mant << (exp - base) as u64
    } else {
        let mag = mant.magnitude() >> (base - exp) as u64;
        BigInt::from_biguint(mant.sign(), mag)
    }
}

fn divide_mantissas(num: &BigInt, num_exp: i64, den: &BigInt, den_exp: i64, bits: u64) -> Real {
    assert!(!den.is_zero(), "division by zero");
    if num.is_zero() {
        return Real::zero(bits);
    }
    let shift = (bits as i64 + 2 + den.bits() as i64 - num.bits() as i64).max(0);
    let (q, r) = (num << shift as u64).div_rem(den);
    // sticky bit so that round-to-nearest never sees an exact tie by accident
    let sticky = match (r.is_zero(), q.is_negative()) {
        (true, _) => 0,
        (false, true) => -1,
        (false, false) => 1,
    };
    let q = (q << 1u32) + BigInt::from(sticky);
    Real::from_parts(q, num_exp - den_exp - shift - 1, bits)
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Real {}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.mant.sign(), other.mant.sign());
        let rank = |s: Sign| match s {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        };
        match rank(sa).cmp(&rank(sb)) {
            Ordering::Equal => {}
            ord => return ord,
        }
        match sa {
            Sign::Minus => other.cmp_abs(self),
            _ => self.cmp_abs(other),
        }
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            mant: -self.mant,
            ..self
        }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            mant: -&self.mant,
            ..self.clone()
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let f: fn(&Real, &Real) -> Real = $body;
                f(self, rhs)
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.add_signed(b, false));
forward_binop!(Sub, sub, |a, b| a.add_signed(b, true));
forward_binop!(Mul, mul, |a, b| Real::from_parts(
    &a.mant * &b.mant,
    a.exp + b.exp,
    a.bits.max(b.bits)
));
forward_binop!(Div, div, |a, b| divide_mantissas(
    &a.mant,
    a.exp,
    &b.mant,
    b.exp,
    a.bits.max(b.bits)
));

impl fmt::Display for Real {
    /// Scientific notation, truncated to the carried precision (or `{:.N}`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f.precision().map(|p| p + 1).unwrap_or(self.digits().max(1) as usize);
        let d = self.to_digits(sig);
        let sign = if d.negative { "-" } else { "" };
        let (head, tail) = d.digits.split_at(1);
        if tail.is_empty() {
            write!(f, "{sign}{head}e{}", d.exponent)
        } else {
            write!(f, "{sign}{head}.{tail}e{}", d.exponent)
        }
    }
}

fn newton_root_step(y: &Real, x: &Real, n: u32) -> Real {
    let n_big = BigInt::from(n);
    let correction = x / &y.powi(n - 1);
    (y.mul_int(&BigInt::from(n - 1)) + correction).div_int(&n_big)
}

/// Non-negative `n`-th root by Newton iteration.
///
/// Seeded from a hardware estimate, the precision doubles each step until the
/// working precision is reached; iteration then continues at full precision
/// until two successive iterates agree.
pub fn nth_root(x: &Real, n: u32) -> Result<Real> {
    if n == 0 {
        return Err(Error::Domain("zeroth root".into()));
    }
    if x.is_negative() {
        return Err(Error::Domain(format!("root of negative number {x:.6}")));
    }
    if x.is_zero() || n == 1 {
        return Ok(x.clone());
    }
    let bits = x.bits();
    let (f, e) = x.frexp();
    let k = e.div_euclid(n as i64);
    let r = e.rem_euclid(n as i64);
    let seed = (f * 2f64.powi(r as i32)).powf(1.0 / n as f64);
    let mut y = Real::from_f64(seed, 64).mul_pow2(k);

    let mut p = 48u64;
    while p < bits {
        p = (2 * p).min(bits);
        let work = p + 16;
        y = newton_root_step(&y.with_bits(work), &x.with_bits(work), n);
    }

    let mut y = y.with_bits(bits);
    let tolerance = y.log10_abs() - (bits as f64 - 2.0) * LOG10_2;
    for _ in 0..16 {
        let next = newton_root_step(&y, x, n);
        let delta = (&next - &y).abs();
        y = next;
        if delta.is_zero() || delta.log10_abs() <= tolerance {
            break;
        }
    }
    Ok(y)
}

/// `x^(p/q)` for `x > 0` and `q` in [`SUPPORTED_DENOMINATORS`].
pub fn pow_rational(x: &Real, p: i64, q: i64) -> Result<Real> {
    if q <= 0 {
        return Err(Error::UnsupportedExponent(q));
    }
    let g = p.gcd(&q);
    let (p, q) = if g == 0 { (0, 1) } else { (p / g, q / g) };
    if !SUPPORTED_DENOMINATORS.contains(&q) {
        return Err(Error::UnsupportedExponent(q));
    }
    if !x.is_positive() {
        return Err(Error::Domain(format!("rational power of non-positive number {x:.6}")));
    }
    let magnitude =
        u32::try_from(p.unsigned_abs()).map_err(|_| Error::Domain(format!("exponent numerator {p} too large")))?;
    let powered = x.powi(magnitude);
    let root = if q == 1 { powered } else { nth_root(&powered, q as u32)? };
    Ok(if p < 0 { root.recip() } else { root })
}

/// `x^r` for a rational exponent with supported denominator.
pub fn pow_ratio(x: &Real, r: Rational64) -> Result<Real> {
    pow_rational(x, *r.numer(), *r.denom())
}

/// Number of leading significant decimal digits on which `value` agrees with
/// `reference`: `floor(-log10 |value - reference| / |reference|)`, capped at the
/// precision both carry.
pub fn matching_digits(value: &Real, reference: &Real) -> u64 {
    let cap = value.digits().min(reference.digits());
    let diff = value - reference;
    if diff.is_zero() {
        return cap;
    }
    let scale = if reference.is_zero() {
        0.0
    } else {
        reference.log10_abs()
    };
    let agree = scale - diff.log10_abs();
    if agree <= 0.0 {
        0
    } else {
        (agree.floor() as u64).min(cap)
    }
}
