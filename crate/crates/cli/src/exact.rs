//! Exact-input parsing and deterministic output rendering.

use aho2d_core::krylovrr::decimal_digits;
use aho2d_core::quadnum::{rat_to_f64, QuadraticNumber};
use aho2d_core::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Parses `p/q` (integers) or a finite decimal into an exact rational.
/// Exponent notation and anything else lossy is rejected.
pub fn parse_exact(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let fail = || format!("expected p/q or a finite decimal, got {s:?}");
    if let Some((num, den)) = s.split_once('/') {
        let p: BigInt = num.parse().map_err(|_| fail())?;
        let q: BigInt = den.parse().map_err(|_| fail())?;
        if q.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Rat::new(p, q));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(fail());
    }
    let all_digits =
        |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return Err(fail());
    }
    let digits: BigInt = format!("{int_part}{frac_part}")
        .parse()
        .expect("digit-only string");
    let value = Rat::new(digits, num_traits::pow(BigInt::from(10), frac_part.len()));
    Ok(if negative { -value } else { value })
}

/// Decimal form at 30 significant digits, trailing zeros trimmed.
pub fn dec30(r: &Rat) -> String {
    decimal_digits(r, 30)
}

/// Nearest double of an exact rational.
pub fn f64_of(r: &Rat) -> f64 {
    rat_to_f64(r)
}

/// Compact table form of a quadratic number: "20", "7/2", "(73−2√85)/4".
pub fn surd_compact(value: &QuadraticNumber) -> String {
    if value.is_rational() {
        return value.rational_part().to_string();
    }
    let p = value.rational_part();
    let q = value.surd_coeff();
    let den = p.denom().lcm(q.denom());
    let den_rat = Rat::from(den.clone());
    let pn = (p * &den_rat).to_integer();
    let qn = (q * &den_rat).to_integer();
    let mut out = String::new();
    if pn.is_negative() {
        out.push('−');
    }
    if !pn.is_zero() {
        out.push_str(&pn.magnitude().to_string());
    }
    if qn.is_negative() {
        out.push('−');
    } else if !pn.is_zero() {
        out.push('+');
    }
    if !qn.magnitude().is_one() {
        out.push_str(&qn.magnitude().to_string());
    }
    out.push('√');
    out.push_str(&value.radicand().to_string());
    if den.is_one() {
        out
    } else {
        format!("({out})/{den}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use aho2d_core::rat;

    #[test]
    fn accepts_fractions_and_finite_decimals() {
        assert_eq!(parse_exact("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_exact("-3/4").unwrap(), rat(-3, 4));
        assert_eq!(parse_exact("3/-4").unwrap(), rat(-3, 4));
        assert_eq!(parse_exact("0.05").unwrap(), rat(1, 20));
        assert_eq!(parse_exact("-2.5").unwrap(), rat(-5, 2));
        assert_eq!(parse_exact("+.5").unwrap(), rat(1, 2));
        assert_eq!(parse_exact("7.").unwrap(), rat(7, 1));
        assert_eq!(parse_exact("12").unwrap(), rat(12, 1));
        assert_eq!(parse_exact(" 1/3 ").unwrap(), rat(1, 3));
    }

    #[test]
    fn rejects_floats_and_malformed_input() {
        for bad in ["1e-3", "0x2", "nan", "inf", "1.2.3", "1/0", "", ".", "1/2/3", "a"] {
            assert!(parse_exact(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn surd_rendering_matches_hand_forms() {
        let disc = QuadraticNumber::sqrt_rational(&rat(85, 1)).unwrap();
        let v = disc.scale(&rat(-1, 2)).add_rational(&rat(73, 4));
        assert_eq!(surd_compact(&v), "(73−2√85)/4");

        let w = QuadraticNumber::sqrt_rational(&rat(7, 1))
            .unwrap()
            .neg()
            .add_rational(&rat(11, 2));
        assert_eq!(surd_compact(&w), "(11−2√7)/2");

        assert_eq!(surd_compact(&QuadraticNumber::from_rational(rat(20, 1))), "20");
        assert_eq!(surd_compact(&QuadraticNumber::from_rational(rat(7, 2))), "7/2");
        let plain = QuadraticNumber::sqrt_rational(&rat(2, 1)).unwrap();
        assert_eq!(surd_compact(&plain), "√2");
        assert_eq!(surd_compact(&plain.neg()), "−√2");
        assert_eq!(surd_compact(&plain.add_rational(&rat(1, 1))), "1+√2");
    }
}
