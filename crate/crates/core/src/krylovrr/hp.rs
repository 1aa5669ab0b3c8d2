//! Exact conversions between rationals and arbitrary-precision binary floats,
//! and deterministic decimal formatting of computed values.

use std::fmt;

use astro_float::{BigFloat, RoundingMode, Sign, WORD_BIT_SIZE};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::quadnum::rat_to_f64;
use crate::Rat;

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

/// Exact integer-valued float; the full bit pattern is carried unrounded.
pub(crate) fn big_from_bigint(n: &BigInt) -> BigFloat {
    if n.is_zero() {
        return BigFloat::from_words(&[0], Sign::Pos, 0);
    }
    let words = n.magnitude().to_u64_digits();
    let bits = (words.len() * WORD_BIT_SIZE) as i32;
    let sign = if n.is_negative() { Sign::Neg } else { Sign::Pos };
    BigFloat::from_words(&words, sign, bits)
}

/// `r` rounded to `p` bits.
pub(crate) fn big_from_rat(r: &Rat, p: usize) -> BigFloat {
    big_from_bigint(r.numer()).div(&big_from_bigint(r.denom()), p, RM)
}

/// Exact value of a finite float; every float is a dyadic rational.
pub(crate) fn rat_from_big(x: &BigFloat) -> Rat {
    if x.is_zero() {
        return Rat::zero();
    }
    let (words, _, sign, e, _) = x.as_raw_parts().expect("finite value");
    let mut mag = BigUint::zero();
    for w in words.iter().rev() {
        mag = (mag << WORD_BIT_SIZE) | BigUint::from(*w);
    }
    let mut num = BigInt::from(mag);
    if sign == Sign::Neg {
        num = -num;
    }
    let shift = i64::from(e) - (words.len() * WORD_BIT_SIZE) as i64;
    if shift >= 0 {
        Rat::from_integer(num << shift as usize)
    } else {
        Rat::new(num, BigInt::one() << (-shift) as usize)
    }
}

/// One computed high-precision value, carried as the exact (dyadic) rational
/// the float solver produced, so ordering, differences, and formatting stay
/// deterministic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct HpReal(Rat);

impl HpReal {
    pub fn from_rational(r: Rat) -> Self {
        Self(r)
    }

    pub fn as_rational(&self) -> &Rat {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.0)
    }

    /// Decimal form with `sig` significant digits, trailing zeros trimmed;
    /// scientific notation outside [10⁻⁴, 10^sig).
    pub fn decimal(&self, sig: usize) -> String {
        decimal_digits(&self.0, sig)
    }
}

impl fmt::Display for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.decimal(30))
    }
}

/// Deterministic decimal rendering of a rational with `sig` significant
/// digits (round half away from zero), trailing zeros trimmed.
pub fn decimal_digits(r: &Rat, sig: usize) -> String {
    assert!(sig >= 1);
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let num = r.numer().magnitude().clone();
    let den = r.denom().magnitude().clone();

    // decimal exponent: largest d10 with 10^d10 <= |r|
    let mut d10: i64;
    if num >= den {
        d10 = (&num / &den).to_string().len() as i64 - 1;
    } else {
        d10 = -1;
        let mut scaled = &num * 10u32;
        while scaled < den {
            scaled *= 10u32;
            d10 -= 1;
        }
    }

    // integer mantissa with sig digits: round(|r| * 10^(sig-1-d10))
    let shift = sig as i64 - 1 - d10;
    let (sn, sd) = if shift >= 0 {
        (num * BigUint::from(10u32).pow(shift as u32), den)
    } else {
        (num, den * BigUint::from(10u32).pow((-shift) as u32))
    };
    let (q, rem) = sn.div_rem(&sd);
    let mut mantissa = if &rem * 2u32 >= sd { q + 1u32 } else { q };
    let mut digits = mantissa.to_string();
    if digits.len() > sig {
        // rounding carried into an extra digit (999.. -> 1000..)
        mantissa /= 10u32;
        d10 += 1;
        digits = mantissa.to_string();
    }
    debug_assert_eq!(digits.len(), sig);

    let trimmed = digits.trim_end_matches('0');
    let body = if !trimmed.is_empty() { trimmed } else { &digits[..1] };

    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if d10 >= 0 && (d10 as usize) < sig {
        let int_len = d10 as usize + 1;
        if body.len() <= int_len {
            out.push_str(body);
            for _ in body.len()..int_len {
                out.push('0');
            }
        } else {
            out.push_str(&body[..int_len]);
            out.push('.');
            out.push_str(&body[int_len..]);
        }
    } else if (-4..0).contains(&d10) {
        out.push_str("0.");
        for _ in 0..(-d10 - 1) {
            out.push('0');
        }
        out.push_str(body);
    } else {
        out.push_str(&body[..1]);
        if body.len() > 1 {
            out.push('.');
            out.push_str(&body[1..]);
        }
        out.push('e');
        out.push_str(&d10.to_string());
    }
    out
}
