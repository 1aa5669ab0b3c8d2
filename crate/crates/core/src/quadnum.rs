//! Exact real numbers of the form p + q·√d with rational p, q and squarefree
//! integer d: canonical construction from √(rational), field operations
//! within one extension, exact total ordering, and a printable form that
//! round-trips through parsing.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::Rat;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuadError {
    #[error("square root of negative rational: {0}")]
    NegativeRadicand(Rat),
    #[error("squarefree extraction out of verified range (remainder has more than two prime factors beyond the trial-division bound)")]
    SquarefreeOutOfRange,
    #[error("operands lie in different quadratic extensions: sqrt({0}) vs sqrt({1})")]
    MixedExtensions(BigUint, BigUint),
    #[error("cannot parse {0:?} as p + q*sqrt(d)")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
}

/// p + q·√d, canonical: d squarefree; q = 0 forces d = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticNumber {
    p: Rat,
    q: Rat,
    d: BigUint,
}

impl QuadraticNumber {
    pub fn from_rational(p: Rat) -> Self {
        Self { p, q: Rat::zero(), d: BigUint::one() }
    }

    /// √r for rational r ≥ 0, canonicalized: √(n/m) = √(nm)/m, perfect
    /// squares folded into the rational part.
    pub fn sqrt_rational(r: &Rat) -> Result<Self, QuadError> {
        if r.is_negative() {
            return Err(QuadError::NegativeRadicand(r.clone()));
        }
        if r.is_zero() {
            return Ok(Self::from_rational(Rat::zero()));
        }
        let num = r.numer().to_biguint().expect("non-negative");
        let den = r.denom().to_biguint().expect("positive");
        let (root, free) = squarefree_split(&num * &den)?;
        let scale = Rat::new(BigInt::from(root), BigInt::from(den));
        if free.is_one() {
            Ok(Self::from_rational(scale))
        } else {
            Ok(Self { p: Rat::zero(), q: scale, d: free })
        }
    }

    /// p + q·√d with arbitrary rational q and non-negative integer d.
    pub fn new(p: Rat, q: Rat, d: BigUint) -> Result<Self, QuadError> {
        if q.is_zero() || d.is_zero() {
            return Ok(Self::from_rational(p));
        }
        let (root, free) = squarefree_split(d)?;
        let q = q * Rat::from_integer(BigInt::from(root));
        if free.is_one() {
            Ok(Self::from_rational(p + q))
        } else {
            Ok(Self { p, q, d: free })
        }
    }

    pub fn rational_part(&self) -> &Rat {
        &self.p
    }

    pub fn surd_coeff(&self) -> &Rat {
        &self.q
    }

    pub fn radicand(&self) -> &BigUint {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn add_rational(&self, r: &Rat) -> Self {
        Self { p: &self.p + r, q: self.q.clone(), d: self.d.clone() }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return Self::from_rational(Rat::zero());
        }
        Self { p: &self.p * r, q: &self.q * r, d: self.d.clone() }
    }

    pub fn neg(&self) -> Self {
        Self { p: -self.p.clone(), q: -self.q.clone(), d: self.d.clone() }
    }

    pub fn add(&self, other: &Self) -> Result<Self, QuadError> {
        if self.is_rational() || other.is_rational() || self.d == other.d {
            let d = if self.is_rational() { other.d.clone() } else { self.d.clone() };
            let q = &self.q + &other.q;
            if q.is_zero() {
                Ok(Self::from_rational(&self.p + &other.p))
            } else {
                Ok(Self { p: &self.p + &other.p, q, d })
            }
        } else {
            Err(QuadError::MixedExtensions(self.d.clone(), other.d.clone()))
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, QuadError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, QuadError> {
        if self.is_rational() {
            return Ok(other.scale(&self.p));
        }
        if other.is_rational() {
            return Ok(self.scale(&other.p));
        }
        if self.d != other.d {
            return Err(QuadError::MixedExtensions(self.d.clone(), other.d.clone()));
        }
        let d_rat = Rat::from_integer(BigInt::from(self.d.clone()));
        let p = &self.p * &other.p + &self.q * &other.q * &d_rat;
        let q = &self.p * &other.q + &self.q * &other.p;
        if q.is_zero() {
            Ok(Self::from_rational(p))
        } else {
            Ok(Self { p, q, d: self.d.clone() })
        }
    }

    /// Multiplicative inverse: (p + q√d)⁻¹ = (p − q√d)/(p² − q²d).
    /// The norm p² − q²d vanishes only for the zero value (d is squarefree).
    pub fn inverse(&self) -> Result<Self, QuadError> {
        let d_rat = Rat::from_integer(BigInt::from(self.d.clone()));
        let norm = &self.p * &self.p - &self.q * &self.q * &d_rat;
        if norm.is_zero() {
            return Err(QuadError::DivisionByZero);
        }
        let conjugate = Self {
            p: self.p.clone(),
            q: -self.q.clone(),
            d: self.d.clone(),
        };
        Ok(conjugate.scale(&norm.recip()))
    }

    pub fn div(&self, other: &Self) -> Result<Self, QuadError> {
        self.mul(&other.inverse()?)
    }

    /// Dyadic approximation within 2^(−bits) of the true value.
    pub fn approximate(&self, bits: u32) -> Rat {
        if self.q.is_zero() {
            return self.p.clone();
        }
        let (lo, hi) = sqrt_bounds(&self.d, bits + 2);
        let surd = if self.q.is_negative() { hi } else { lo };
        &self.p + &self.q * surd
    }

    pub fn to_f64(&self) -> f64 {
        let approx = self.approximate(80);
        rat_to_f64(&approx)
    }

    /// Exact sign of the value.
    pub fn sign(&self) -> Ordering {
        if self.q.is_zero() {
            return self.p.cmp(&Rat::zero());
        }
        if self.p.is_zero() {
            return self.q.cmp(&Rat::zero());
        }
        let p_pos = self.p.is_positive();
        let q_pos = self.q.is_positive();
        if p_pos == q_pos {
            return if p_pos { Ordering::Greater } else { Ordering::Less };
        }
        // opposite signs: compare p² against q²·d
        let p2 = &self.p * &self.p;
        let q2d = &self.q * &self.q * Rat::from_integer(BigInt::from(self.d.clone()));
        match p2.cmp(&q2d) {
            Ordering::Equal => Ordering::Equal, // cannot happen for squarefree d>1, kept for totality
            Ordering::Greater => {
                if p_pos {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
            Ordering::Less => {
                if q_pos {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }

    /// Exact comparison, valid across different extensions.
    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        if self.d == other.d || self.is_rational() || other.is_rational() {
            let d = if self.is_rational() { other.d.clone() } else { self.d.clone() };
            let diff = Self {
                p: &self.p - &other.p,
                q: &self.q - &other.q,
                d,
            };
            return diff.sign();
        }
        // a + b√d1 − c√d2 with d1 ≠ d2 squarefree is never zero, so interval
        // refinement terminates.
        let mut bits = 64u32;
        loop {
            let (lo1, hi1) = surd_interval(&self.q, &self.d, bits);
            let (lo2, hi2) = surd_interval(&other.q, &other.d, bits);
            let lo = &self.p + lo1 - (&other.p + hi2.clone());
            let hi = &self.p + hi1 - (&other.p + lo2);
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            bits *= 2;
            assert!(bits <= 1 << 20, "interval refinement failed to separate");
        }
    }
}

/// Lower/upper rational bounds of q·√d.
fn surd_interval(q: &Rat, d: &BigUint, bits: u32) -> (Rat, Rat) {
    let (lo, hi) = sqrt_bounds(d, bits);
    if q.is_negative() {
        (q * hi, q * lo)
    } else {
        (q * lo, q * hi)
    }
}

/// Rational bounds lo ≤ √n ≤ hi with hi − lo ≤ 2^(1−bits)·√n-ish accuracy.
fn sqrt_bounds(n: &BigUint, bits: u32) -> (Rat, Rat) {
    let scaled = n << (2 * bits as usize);
    let root = scaled.sqrt(); // floor sqrt
    let denom = BigInt::from(BigUint::one() << bits as usize);
    let lo = Rat::new(BigInt::from(root.clone()), denom.clone());
    let hi = Rat::new(BigInt::from(root + BigUint::one()), denom);
    (lo, hi)
}

/// n = root²·free with free squarefree, verified exactly.
///
/// Trial division up to 10⁶ (or √remainder); what remains has no factor below
/// the bound, so it is prime, a prime square, or a product of two distinct
/// primes whenever it is below 10¹⁸. Larger remainders are refused rather
/// than risking an incorrect squarefree part.
pub fn squarefree_split(n: BigUint) -> Result<(BigUint, BigUint), QuadError> {
    if n.is_zero() {
        return Ok((BigUint::zero(), BigUint::one()));
    }
    if let Some(small) = n.to_u64() {
        let (root, free) = squarefree_split_u64(small)?;
        return Ok((BigUint::from(root), BigUint::from(free)));
    }
    let mut rem = n;
    let mut root = BigUint::one();
    let mut free = BigUint::one();
    let bound = 1_000_000u64;
    let mut p = 2u64;
    while p <= bound {
        let pb = BigUint::from(p);
        if &pb * &pb > rem {
            break;
        }
        let mut exp = 0u32;
        loop {
            let (quot, r) = rem.div_rem(&pb);
            if r.is_zero() {
                rem = quot;
                exp += 1;
            } else {
                break;
            }
        }
        for _ in 0..exp / 2 {
            root *= &pb;
        }
        if exp % 2 == 1 {
            free *= &pb;
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
    if rem.is_one() {
        return Ok((root, free));
    }
    let bb = BigUint::from(bound);
    if &bb * &bb > rem {
        // no factor ≤ √rem, hence prime
        return Ok((root, free * rem));
    }
    let s = rem.sqrt();
    if &s * &s == rem {
        return Ok((root * s, free));
    }
    if rem < BigUint::from(10u64).pow(18) {
        // at most two prime factors, both above the bound, not a square
        return Ok((root, free * rem));
    }
    Err(QuadError::SquarefreeOutOfRange)
}

fn squarefree_split_u64(mut n: u64) -> Result<(u64, u64), QuadError> {
    let mut root = 1u64;
    let mut free = 1u64;
    let mut p = 2u64;
    while p <= 1_000_000 && p.saturating_mul(p) <= n {
        let mut exp = 0u32;
        while n.is_multiple_of(p) {
            n /= p;
            exp += 1;
        }
        for _ in 0..exp / 2 {
            root *= p;
        }
        if exp % 2 == 1 {
            free *= p;
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
    if n == 1 {
        return Ok((root, free));
    }
    if p.saturating_mul(p) > n {
        return Ok((root, free * n));
    }
    let s = n.sqrt();
    if s * s == n {
        return Ok((root * s, free));
    }
    // n < (10⁶)³ here, so at most two prime factors remain
    Ok((root, free * n))
}

/// Roots of x² − t·x + s = 0 (monic, rational t, s), ascending. The
/// discriminant must be non-negative.
pub fn solve_monic_quadratic(t: &Rat, s: &Rat) -> Result<(QuadraticNumber, QuadraticNumber), QuadError> {
    let four = Rat::from_integer(4.into());
    let disc = t * t - four * s;
    let half_t = t / Rat::from_integer(2.into());
    let half_surd = QuadraticNumber::sqrt_rational(&disc)?.scale(&Rat::new(1.into(), 2.into()));
    let lo = QuadraticNumber::from_rational(half_t.clone()).sub(&half_surd)?;
    let hi = QuadraticNumber::from_rational(half_t).add(&half_surd)?;
    Ok((lo, hi))
}

/// Round a rational to the nearest f64 through a 64-bit dyadic approximation.
pub fn rat_to_f64(r: &Rat) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let neg = r.is_negative();
    let num = r.numer().magnitude().clone();
    let den = r.denom().magnitude().clone();
    // scale the quotient into [2^52, 2^54) and track the binary exponent
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let shift = 53 - (nb - db);
    let scaled = if shift >= 0 {
        (num << shift as usize) / den
    } else {
        num / (den << (-shift) as usize)
    };
    let mant = scaled.to_u64().expect("fits in 54 bits") as f64;
    let value = mant * 2f64.powi(-shift as i32);
    if neg {
        -value
    } else {
        value
    }
}

impl fmt::Display for QuadraticNumber {
    /// Canonical form: "p", "p + q*sqrt(d)", or "p - q*sqrt(d)" with q > 0.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            return write!(f, "{}", self.p);
        }
        if self.q.is_negative() {
            write!(f, "{} - {}*sqrt({})", self.p, -self.q.clone(), self.d)
        } else {
            write!(f, "{} + {}*sqrt({})", self.p, self.q, self.d)
        }
    }
}

impl FromStr for QuadraticNumber {
    type Err = QuadError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || QuadError::Parse(s.to_string());
        let s = s.trim();
        // split at the top-level " + " or " - " separating p from the surd
        let (p_str, rest) = match s.find(" + ").map(|i| (i, false)).or_else(|| s.find(" - ").map(|i| (i, true))) {
            Some((i, negated)) => (&s[..i], Some((&s[i + 3..], negated))),
            None => (s, None),
        };
        match rest {
            None => {
                if let Some(body) = p_str.strip_prefix("sqrt(").and_then(|t| t.strip_suffix(')')) {
                    let d: BigUint = body.trim().parse().map_err(|_| bad())?;
                    return QuadraticNumber::new(Rat::zero(), Rat::one(), d);
                }
                if let Some((q_str, d_str)) = p_str.split_once("*sqrt(") {
                    let d: BigUint = d_str.strip_suffix(')').ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
                    let q: Rat = q_str.trim().parse().map_err(|_| bad())?;
                    return QuadraticNumber::new(Rat::zero(), q, d);
                }
                let p: Rat = p_str.parse().map_err(|_| bad())?;
                Ok(QuadraticNumber::from_rational(p))
            }
            Some((surd, negated)) => {
                let p: Rat = p_str.trim().parse().map_err(|_| bad())?;
                let (q_str, d_str) = surd.split_once("*sqrt(").ok_or_else(bad)?;
                let d: BigUint = d_str.strip_suffix(')').ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
                let q: Rat = q_str.trim().parse().map_err(|_| bad())?;
                let q = if negated { -q } else { q };
                QuadraticNumber::new(p, q, d)
            }
        }
    }
}

impl PartialOrd for QuadraticNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadraticNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_exact(other)
    }
}
