//! Algebraic descend maps `x -> t` and the matching self-replication maps
//! `(a, b) -> (alpha, beta)`.
//!
//! For the quadratic case, with `S(z) = sum_k ((1/2)_k / k!)^2 z^k`,
//!
//! ```text
//! S(x^2) = (1 + t) S(t^2)
//! sum_k ((1/2)_k / k!)^2 (a + b k) x^(2k) = sum_k ((1/2)_k / k!)^2 (alpha + beta k) t^(2k)
//! ```
//!
//! The cubic map uses the Pochhammer pair `(1/3, 2/3)`, the factor `1 + 2t` and
//! stride 3; the quartic map the pair `(1/2, 1/2)`, the factor `(1 + t)^2` and
//! stride 4.
//!
//! The descend maps are evaluated in a cancellation-free form: with
//! `y = (1 - x^m)^(1/m)` the numerator `1 - y` is rewritten as
//! `x^m / (1 + y + ... + y^(m-1))`, so `t` keeps full relative precision even
//! when `x` is far below the working epsilon.

use crate::error::{Error, Result};
use crate::precision::{nth_root, Real};

/// Coefficients produced by a replication map.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplicatedCoefficients {
    pub alpha: Real,
    pub beta: Real,
}

fn check_unit_interval(x: &Real, what: &str) -> Result<()> {
    let one = Real::from_i64(1, x.bits());
    if x.is_negative() || *x >= one {
        return Err(Error::Domain(format!("{what} = {x:.12} outside [0, 1)")));
    }
    Ok(())
}

/// `t = (1 - sqrt(1 - x^2)) / (1 + sqrt(1 - x^2))`.
pub fn quad_descend(x: &Real) -> Result<Real> {
    check_unit_interval(x, "x")?;
    let one = Real::from_i64(1, x.bits());
    let x2 = x * x;
    let y = nth_root(&(&one - &x2), 2)?;
    let den = &one + &y;
    Ok(x2 / (&den * &den))
}

/// `t = (1 - (1 - x^3)^(1/3)) / (1 + 2 (1 - x^3)^(1/3))`.
pub fn cubic_descend(x: &Real) -> Result<Real> {
    check_unit_interval(x, "x")?;
    let one = Real::from_i64(1, x.bits());
    let x3 = x.powi(3);
    let y = nth_root(&(&one - &x3), 3)?;
    let sum = &one + &y + &y * &y;
    let den = &sum * (&one + y.mul_pow2(1));
    Ok(x3 / den)
}

/// `t = (1 - (1 - x^4)^(1/4)) / (1 + (1 - x^4)^(1/4))`.
pub fn quartic_descend(x: &Real) -> Result<Real> {
    check_unit_interval(x, "x")?;
    let one = Real::from_i64(1, x.bits());
    let x4 = x.powi(4);
    let y = nth_root(&(&one - &x4), 4)?;
    let one_plus_y = &one + &y;
    let den = &one_plus_y * &one_plus_y * (&one + &y * &y);
    Ok(x4 / den)
}

/// `alpha = a(1+t) + b t(1+t)/(1-t)`, `beta = 2b (1+t)^2/(1-t)`.
pub fn quad_replicate(a: &Real, b: &Real, t: &Real) -> Result<ReplicatedCoefficients> {
    check_unit_interval(t, "t")?;
    let one = Real::from_i64(1, t.bits());
    let one_plus_t = &one + t;
    let one_minus_t = &one - t;
    let alpha = a * &one_plus_t + b * t * &one_plus_t / &one_minus_t;
    let beta = (b * &one_plus_t * &one_plus_t / &one_minus_t).mul_pow2(1);
    Ok(ReplicatedCoefficients { alpha, beta })
}

/// `alpha = a(1+2t) + 2b t(1+2t)(1-t^3)/(1-t)^3`,
/// `beta = 3b (1-t^3)(1+2t)^2/(1-t)^3`.
pub fn cubic_replicate(a: &Real, b: &Real, t: &Real) -> Result<ReplicatedCoefficients> {
    check_unit_interval(t, "t")?;
    let one = Real::from_i64(1, t.bits());
    let one_plus_2t = &one + t.mul_pow2(1);
    let cube_ratio = (&one - t.powi(3)) / (&one - t).powi(3);
    let shared = b * &one_plus_2t * &cube_ratio;
    let alpha = a * &one_plus_2t + (&shared * t).mul_pow2(1);
    let beta = (&shared * &one_plus_2t).mul_int(&3.into());
    Ok(ReplicatedCoefficients { alpha, beta })
}

/// `alpha = a(1+t)^2 + 2b t(1+t^2)(1+t)^2/(1-t)^3`,
/// `beta = 4b (1+t^2)(1+t)^3/(1-t)^3`.
pub fn quartic_replicate(a: &Real, b: &Real, t: &Real) -> Result<ReplicatedCoefficients> {
    check_unit_interval(t, "t")?;
    let one = Real::from_i64(1, t.bits());
    let one_plus_t = &one + t;
    let one_plus_t_sq = &one_plus_t * &one_plus_t;
    let one_minus_t_cubed = (&one - t).powi(3);
    let shared = b * (&one + t * t) * &one_plus_t_sq / &one_minus_t_cubed;
    let alpha = a * &one_plus_t_sq + (&shared * t).mul_pow2(1);
    let beta = (&shared * &one_plus_t).mul_pow2(2);
    Ok(ReplicatedCoefficients { alpha, beta })
}
