//! Truncated evaluation of the hypergeometric-type series
//!
//! ```text
//! sum_k (p)_k (q)_k / (k!)^2 * (a + b k) * z^k
//! ```
//!
//! with a certified tail bound, and the oracle quantities built on it: the
//! Ramanujan-type couple at `z = 1/2`, its products `s0^w * s1` (the limits of
//! the iterations) and the normalized ellipse perimeter.

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::precision::{pow_ratio, PrecisionContext, Real};

/// Extra bits carried while summing, absorbing the rounding of a few thousand
/// accumulated terms.
const SUMMATION_GUARD_BITS: u64 = 32;

/// Largest argument accepted by [`ellipse_factor`].
pub const ELLIPSE_MAX_ARGUMENT: (i64, i64) = (99, 100);

/// One series `sum_k (p)_k (q)_k / (k!)^2 (a + b k) z^k`.
///
/// `stride` records the power the caller raised its variable to (`z = x^stride`);
/// the evaluator itself only sees `z`.
#[derive(Clone, Debug)]
pub struct SeriesSpec {
    pub p: Rational64,
    pub q: Rational64,
    pub a: Real,
    pub b: Real,
    pub z: Real,
    pub stride: u32,
}

/// The couple `(s0, s1) = (sum c_k / 2^k, sum k c_k / 2^k)` with
/// `c_k = (s)_k (1-s)_k / (k!)^2`.
#[derive(Clone, Debug)]
pub struct CoupleValues {
    pub s0: Real,
    pub s1: Real,
}

/// Zeroth and first moments `(sum c_k z^k, sum k c_k z^k)` and the number of
/// terms summed.
fn moments(
    p: Rational64,
    q: Rational64,
    z: &Real,
    weights: (f64, f64),
    ctx: &PrecisionContext,
) -> Result<(Real, Real, u64)> {
    let zero = Rational64::zero();
    if p <= zero || q <= zero || p > Rational64::one() || q > Rational64::one() {
        return Err(Error::UnsupportedParameter(format!(
            "Pochhammer pair ({p}, {q}) outside (0, 1]"
        )));
    }
    if z.is_negative() {
        return Err(Error::Domain(format!("series argument {z:.12} is negative")));
    }
    let one = ctx.one();
    if *z >= one {
        return Err(Error::Divergence(format!("{z:.12}")));
    }

    let bits = ctx.bits() + SUMMATION_GUARD_BITS;
    let z = z.with_bits(bits);
    let mut term = Real::from_i64(1, bits);
    let mut s0 = Real::zero(bits);
    let mut s1 = Real::zero(bits);
    if z.is_zero() {
        return Ok((term, s1, 1));
    }

    let (pn, pd) = (BigInt::from(*p.numer()), BigInt::from(*p.denom()));
    let (qn, qd) = (BigInt::from(*q.numer()), BigInt::from(*q.denom()));
    let pq_den = &pd * &qd;
    let tail_factor = z.log10_abs() - (&one - &z).log10_abs();
    let limit = -(ctx.working_digits() as f64);
    let (wa, wb) = (weights.0.abs(), weights.1.abs());

    let mut k: u64 = 0;
    loop {
        s0 = &s0 + &term;
        if k > 0 {
            s1 = &s1 + term.mul_int(&BigInt::from(k));
        }
        let weight = (wa + wb * k as f64).max(1.0);
        let bound = term.log10_abs() + weight.log10() + tail_factor + ((k + 1) as f64).log10();
        if term.is_zero() || bound < limit {
            break;
        }
        let kb = BigInt::from(k);
        let num = (&pn + &kb * &pd) * (&qn + &kb * &qd);
        let den = BigInt::from(k + 1).pow(2) * &pq_den;
        term = (&term * &z).mul_int(&num).div_int(&den);
        k += 1;
    }
    Ok((s0, s1, k + 1))
}

/// Sum of the series to absolute truncation error `<= 10^(2 - working_digits)`.
///
/// Terms follow `term_{k+1} = term_k (p+k)(q+k)/(1+k)^2 z`; summation stops once
/// `|term_k| max(1, |a| + |b| k) z/(1-z) (1+k) < 10^(-working_digits)`. The
/// coefficient ratio never exceeds 1 for `p, q` in `(0, 1]`, so the geometric
/// majorant with ratio `z` bounds the tail.
pub fn evaluate_series(spec: &SeriesSpec, ctx: &PrecisionContext) -> Result<Real> {
    let weights = (spec.a.to_f64(), spec.b.to_f64());
    evaluate_series_counted(spec, weights, ctx).map(|(v, _)| v)
}

fn evaluate_series_counted(spec: &SeriesSpec, weights: (f64, f64), ctx: &PrecisionContext) -> Result<(Real, u64)> {
    let (s0, s1, terms) = moments(spec.p, spec.q, &spec.z, weights, ctx)?;
    Ok(((&spec.a * &s0 + &spec.b * &s1).with_bits(ctx.bits()), terms))
}

/// The couple parameters wired to an algebraic transformation.
pub fn is_supported_couple(s: Rational64) -> bool {
    s == Rational64::new(1, 2) || s == Rational64::new(1, 3)
}

/// `(s0, s1)` for `s` in `{1/2, 1/3}`.
pub fn ramanujan_couple(s: Rational64, ctx: &PrecisionContext) -> Result<CoupleValues> {
    if !is_supported_couple(s) {
        return Err(Error::UnsupportedParameter(format!("couple parameter s = {s}")));
    }
    let half = ctx.ratio(1, 2);
    let (s0, s1, _) = moments(s, Rational64::one() - s, &half, (0.0, 1.0), ctx)?;
    Ok(CoupleValues {
        s0: s0.with_bits(ctx.bits()),
        s1: s1.with_bits(ctx.bits()),
    })
}

/// `s0^w * s1`, the limit of the iteration family attached to `s`.
pub fn couple_product(s: Rational64, w: Rational64, ctx: &PrecisionContext) -> Result<Real> {
    let couple = ramanujan_couple(s, ctx)?;
    Ok(pow_ratio(&couple.s0, w)? * couple.s1)
}

/// Argument `z = 1 - b^2/a^2` of the perimeter series, after validating the axes.
pub fn ellipse_argument(semi_major: &Real, semi_minor: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if !semi_minor.is_positive() {
        return Err(Error::Domain(format!(
            "semi-minor axis {semi_minor:.12} is not positive"
        )));
    }
    if semi_minor > semi_major {
        return Err(Error::Domain(format!(
            "semi-minor axis {semi_minor:.12} exceeds semi-major axis {semi_major:.12}"
        )));
    }
    let ratio = semi_minor / semi_major;
    Ok(ctx.one() - &ratio * &ratio)
}

/// `F = sum_k ((1/2)_k / k!)^2 (1 + 2k) (1 - b^2/a^2)^k`, so that the perimeter
/// is `P(a, b) = 2 pi b^2 / a * F`.
pub fn ellipse_factor(semi_major: &Real, semi_minor: &Real, ctx: &PrecisionContext) -> Result<Real> {
    let z = ellipse_argument(semi_major, semi_minor, ctx)?;
    let (n, d) = ELLIPSE_MAX_ARGUMENT;
    if z > ctx.ratio(n, d) {
        return Err(Error::SlowConvergence(format!("{z:.12}")));
    }
    let half = Rational64::new(1, 2);
    evaluate_series(
        &SeriesSpec {
            p: half,
            q: half,
            a: ctx.one(),
            b: ctx.int(2),
            z,
            stride: 1,
        },
        ctx,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::matching_digits;
    use proptest::prelude::*;

    // Reference digits from direct summation in an independent multiprecision
    // package, each cross-checked against its Gamma closed form.
    const S0_HALF: &str = "1.18034059901609622604533794055848858723371663488144729951586";
    const S1_HALF: &str = "0.269676300594189678333967861177776366382934482721520065169973";
    const S0_THIRD: &str = "1.15959526696392836576999205157002088194516526343978285526311";
    const S1_THIRD: &str = "0.237724709270886618335876366403885994916790250080181318572945";
    const SQRT3_OVER_2PI: &str = "0.275664447710896024755663249156484720698693240183320326399683";
    const INV_PI: &str = "0.318309886183790671537767526745028724068919291480912897495335";
    const CUBIC_W2: &str = "0.319659188835780347507737341877593752327986604428950207478224";
    const F_2_1: &str = "3.08392885038008007290003646515522098968140592702187458537513";

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40, 32, 1).unwrap()
    }

    fn close(x: &Real, reference: &str, digits: u64) {
        let r = ctx().parse(reference).unwrap();
        let got = matching_digits(x, &r);
        assert!(got >= digits, "{x:.40} vs {reference}: {got}");
    }

    fn spec(p: (i64, i64), q: (i64, i64), a: Real, b: Real, z: Real) -> SeriesSpec {
        SeriesSpec {
            p: Rational64::new(p.0, p.1),
            q: Rational64::new(q.0, q.1),
            a,
            b,
            z,
            stride: 1,
        }
    }

    #[test]
    fn zero_argument_returns_constant_weight() {
        let c = ctx();
        let v = evaluate_series(&spec((1, 2), (1, 2), c.ratio(7, 3), c.int(5), c.zero()), &c).unwrap();
        assert_eq!(v, c.ratio(7, 3));
    }

    #[test]
    fn geometric_series() {
        let c = ctx();
        let v = evaluate_series(&spec((1, 1), (1, 1), c.one(), c.zero(), c.ratio(1, 2)), &c).unwrap();
        assert!(matching_digits(&v, &c.int(2)) >= c.working_digits() - 2);
        let v = evaluate_series(&spec((1, 1), (1, 1), c.zero(), c.one(), c.ratio(1, 3)), &c).unwrap();
        // sum k z^k = z / (1-z)^2
        assert!(matching_digits(&v, &c.ratio(3, 4)) >= c.working_digits() - 2);
    }

    #[test]
    fn central_series_at_one_half() {
        let c = ctx();
        let v = evaluate_series(&spec((1, 2), (1, 2), c.one(), c.zero(), c.ratio(1, 2)), &c).unwrap();
        close(&v, S0_HALF, 58);
    }

    #[test]
    fn couples() {
        let c = ctx();
        let half = ramanujan_couple(Rational64::new(1, 2), &c).unwrap();
        close(&half.s0, S0_HALF, 58);
        close(&half.s1, S1_HALF, 58);
        let third = ramanujan_couple(Rational64::new(1, 3), &c).unwrap();
        close(&third.s0, S0_THIRD, 58);
        close(&third.s1, S1_THIRD, 58);
        close(&(&third.s0 * &third.s1), SQRT3_OVER_2PI, 58);
        for s in [&half, &third] {
            assert!(s.s0 > c.one() && s.s1.is_positive() && s.s1 < s.s0);
        }
    }

    #[test]
    fn unsupported_couple() {
        let c = ctx();
        assert!(matches!(
            ramanujan_couple(Rational64::new(1, 4), &c),
            Err(Error::UnsupportedParameter(_))
        ));
        assert!(couple_product(Rational64::new(1, 6), Rational64::one(), &c).is_err());
        assert!(matches!(
            couple_product(Rational64::new(1, 2), Rational64::new(1, 5), &c),
            Err(Error::UnsupportedExponent(5))
        ));
    }

    #[test]
    fn couple_products() {
        let c = ctx();
        let half = Rational64::new(1, 2);
        close(&couple_product(half, Rational64::one(), &c).unwrap(), INV_PI, 58);
        let s1 = ramanujan_couple(half, &c).unwrap().s1;
        assert_eq!(couple_product(half, Rational64::zero(), &c).unwrap(), s1);
        close(
            &couple_product(Rational64::new(1, 3), Rational64::from(2), &c).unwrap(),
            CUBIC_W2,
            58,
        );
    }

    #[test]
    fn reflection_between_couple_products() {
        // cp(3) * cp(1/3)^3 == cp(1)^4 follows from Gamma(1/4) Gamma(3/4) = pi sqrt(2)
        let c = PrecisionContext::new(150, 40, 1).unwrap();
        let half = Rational64::new(1, 2);
        let lhs = couple_product(half, Rational64::from(3), &c).unwrap()
            * couple_product(half, Rational64::new(1, 3), &c).unwrap().powi(3);
        let rhs = couple_product(half, Rational64::one(), &c).unwrap().powi(4);
        assert!(matching_digits(&lhs, &rhs) >= c.working_digits() - 10);
    }

    #[test]
    fn divergence_and_domain() {
        let c = ctx();
        let s = spec((1, 2), (1, 2), c.one(), c.zero(), c.one());
        assert!(matches!(evaluate_series(&s, &c), Err(Error::Divergence(_))));
        let s = spec((1, 2), (1, 2), c.one(), c.zero(), c.int(-1));
        assert!(matches!(evaluate_series(&s, &c), Err(Error::Domain(_))));
        let s = spec((3, 2), (1, 2), c.one(), c.zero(), c.ratio(1, 2));
        assert!(matches!(evaluate_series(&s, &c), Err(Error::UnsupportedParameter(_))));
    }

    #[test]
    fn ellipse_factor_values() {
        let c = ctx();
        assert_eq!(ellipse_factor(&c.int(3), &c.int(3), &c).unwrap(), c.one());
        close(&ellipse_factor(&c.int(2), &c.int(1), &c).unwrap(), F_2_1, 58);
    }

    #[test]
    fn ellipse_factor_rejections() {
        let c = ctx();
        let thin = c.parse("0.09").unwrap();
        assert!(matches!(
            ellipse_factor(&c.one(), &thin, &c),
            Err(Error::SlowConvergence(_))
        ));
        // z = 0.99 exactly is still accepted
        let edge = c.parse("0.1").unwrap();
        assert!(ellipse_factor(&c.one(), &edge, &c).is_ok());
        assert!(matches!(ellipse_factor(&c.one(), &c.zero(), &c), Err(Error::Domain(_))));
        assert!(matches!(ellipse_factor(&c.one(), &c.int(2), &c), Err(Error::Domain(_))));
    }

    /// Plain summation of a fixed number of terms.
    fn brute_force(p: Rational64, q: Rational64, a: i64, b: i64, z: &Real, terms: u64, bits: u64) -> Real {
        let mut term = Real::from_i64(1, bits);
        let mut sum = Real::zero(bits);
        for k in 0..terms {
            sum = &sum + &term * Real::from_i64(a + b * k as i64, bits);
            let kr = Rational64::from(k as i64);
            let f = (p + kr) * (q + kr) / Rational64::from(((k + 1) * (k + 1)) as i64);
            term = &term * z * Real::from_ratio(&(*f.numer()).into(), &(*f.denom()).into(), bits);
        }
        sum
    }

    #[test]
    fn truncation_is_certified() {
        let c = ctx();
        let half = Rational64::new(1, 2);
        let third = Rational64::new(1, 3);
        let cases = [
            (half, half, c.ratio(1, 2)),
            (half, half, c.ratio(99, 100)),
            (third, Rational64::one() - third, c.ratio(9, 10)),
        ];
        for (p, q, z) in cases {
            let s = SeriesSpec {
                p,
                q,
                a: c.one(),
                b: c.int(2),
                z: z.clone(),
                stride: 1,
            };
            let (value, terms) = evaluate_series_counted(&s, (1.0, 2.0), &c).unwrap();
            let doubled = brute_force(p, q, 1, 2, &z, 2 * terms, c.bits() + 64);
            let bound = c.pow10(2 - c.working_digits() as i64);
            assert!((&value - &doubled).abs() <= bound, "z = {z:.4}, {terms} terms");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn eccentricity_is_scale_free(a in 1.0f64..50.0, ratio in 0.1f64..1.0, scale in 0.01f64..100.0) {
            let c = ctx();
            let a = Real::from_f64(a, c.bits());
            let b = &a * Real::from_f64(ratio, c.bits());
            let s = Real::from_f64(scale, c.bits());
            let f1 = ellipse_factor(&a, &b, &c).unwrap();
            let f2 = ellipse_factor(&(&a * &s), &(&b * &s), &c).unwrap();
            prop_assert!(matching_digits(&f1, &f2) >= c.working_digits() - 4);
        }
    }
}
