//! Exact algebra of functions f = P(x,y)·e^{−α(x²+y²)} with rational
//! polynomial coefficients and rational α > 0: arithmetic, application of the
//! anharmonic Hamiltonian, and closed-form Gaussian integrals over ℝ².
//!
//! Every integral of an even monomial against the Gaussian is a rational
//! multiple of π, so integration stays exact; π is carried symbolically.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::Rat;

/// Anharmonic coefficients and coupling of V = x²+y²+λ(ax⁴+by⁴+2cx²y²).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialParams {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
    pub lambda: Rat,
}

impl PotentialParams {
    pub fn new(a: Rat, b: Rat, c: Rat, lambda: Rat) -> Self {
        Self { a, b, c, lambda }
    }

    /// Same anharmonic shape with the coupling switched off.
    pub fn without_coupling(&self) -> Self {
        Self { lambda: Rat::zero(), ..self.clone() }
    }
}

/// Exact real of the form value·π.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PiScaledRational {
    pub value: Rat,
}

impl PiScaledRational {
    pub fn zero() -> Self {
        Self { value: Rat::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { value: &self.value + &other.value }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { value: &self.value - &other.value }
    }

    pub fn scale(&self, k: &Rat) -> Self {
        Self { value: &self.value * k }
    }

    /// Ratio of two π-scaled values; π cancels.
    pub fn ratio(&self, other: &Self) -> Rat {
        &self.value / &other.value
    }
}

impl fmt::Display for PiScaledRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})*pi", self.value)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("gaussian exponents differ: {left} vs {right}")]
    AlphaMismatch { left: Box<Rat>, right: Box<Rat> },
    #[error("gaussian exponent must be positive, got {0}")]
    NonPositiveAlpha(Rat),
}

/// Sparse P(x,y)·e^{−α(x²+y²)}; keys are exponent pairs (m,n), values are
/// nonzero rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyGauss {
    alpha: Rat,
    coeffs: BTreeMap<(u32, u32), Rat>,
}

impl PolyGauss {
    pub fn zero(alpha: Rat) -> Result<Self, AlgebraError> {
        if !alpha.is_positive() {
            return Err(AlgebraError::NonPositiveAlpha(alpha));
        }
        Ok(Self { alpha, coeffs: BTreeMap::new() })
    }

    /// Single monomial x^m y^n e^{−αr²} with coefficient 1.
    pub fn monomial(m: u32, n: u32, alpha: Rat) -> Result<Self, AlgebraError> {
        let mut f = Self::zero(alpha)?;
        f.coeffs.insert((m, n), Rat::one());
        Ok(f)
    }

    pub fn from_coeffs<I>(alpha: Rat, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = ((u32, u32), Rat)>,
    {
        let mut f = Self::zero(alpha)?;
        for (key, val) in terms {
            f.accumulate(key, val);
        }
        Ok(f)
    }

    pub fn alpha(&self) -> &Rat {
        &self.alpha
    }

    pub fn coeffs(&self) -> &BTreeMap<(u32, u32), Rat> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Total degree of the polynomial part, None for the zero function.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().map(|&(m, n)| m + n).max()
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    fn accumulate(&mut self, key: (u32, u32), val: Rat) {
        if val.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(key).or_insert_with(Rat::zero);
        *entry += val;
        if entry.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.alpha != other.alpha {
            return Err(AlgebraError::AlphaMismatch {
                left: Box::new(self.alpha.clone()),
                right: Box::new(other.alpha.clone()),
            });
        }
        let mut out = self.clone();
        for (&key, val) in &other.coeffs {
            out.accumulate(key, val.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, k: &Rat) -> Self {
        if k.is_zero() {
            return Self { alpha: self.alpha.clone(), coeffs: BTreeMap::new() };
        }
        Self {
            alpha: self.alpha.clone(),
            coeffs: self.coeffs.iter().map(|(&key, v)| (key, v * k)).collect(),
        }
    }

    /// Pointwise product; Gaussian exponents add.
    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Self {
            alpha: &self.alpha + &other.alpha,
            coeffs: BTreeMap::new(),
        };
        for (&(m1, n1), v1) in &self.coeffs {
            for (&(m2, n2), v2) in &other.coeffs {
                out.accumulate((m1 + m2, n1 + n2), v1 * v2);
            }
        }
        out
    }

    /// (−∂²/∂x² − ∂²/∂y² + x² + y² + λ(ax⁴+by⁴+2cx²y²)) f, exactly.
    ///
    /// On a single monomial the kinetic-plus-quadratic part acts as
    ///   x^m y^n ↦ −m(m−1)x^{m−2}y^n − n(n−1)x^m y^{n−2}
    ///            + 2α(2m+2n+2)x^m y^n + (1−4α²)(x^{m+2}y^n + x^m y^{n+2}).
    pub fn apply_hamiltonian(&self, params: &PotentialParams) -> Self {
        let alpha = &self.alpha;
        let two_alpha = alpha + alpha;
        let one_minus_4a2 = Rat::one() - &two_alpha * &two_alpha;
        let la = &params.lambda * &params.a;
        let lb = &params.lambda * &params.b;
        let l2c = &params.lambda * &params.c * Rat::from_integer(2.into());

        let mut out = Self { alpha: alpha.clone(), coeffs: BTreeMap::new() };
        for (&(m, n), v) in &self.coeffs {
            if m >= 2 {
                let k = Rat::from_integer((i64::from(m) * (i64::from(m) - 1)).into());
                out.accumulate((m - 2, n), -(&k * v));
            }
            if n >= 2 {
                let k = Rat::from_integer((i64::from(n) * (i64::from(n) - 1)).into());
                out.accumulate((m, n - 2), -(&k * v));
            }
            let diag = &two_alpha * Rat::from_integer((2 * i64::from(m) + 2 * i64::from(n) + 2).into());
            out.accumulate((m, n), &diag * v);
            if !one_minus_4a2.is_zero() {
                out.accumulate((m + 2, n), &one_minus_4a2 * v);
                out.accumulate((m, n + 2), &one_minus_4a2 * v);
            }
            if !la.is_zero() {
                out.accumulate((m + 4, n), &la * v);
            }
            if !lb.is_zero() {
                out.accumulate((m, n + 4), &lb * v);
            }
            if !l2c.is_zero() {
                out.accumulate((m + 2, n + 2), &l2c * v);
            }
        }
        out
    }

    /// ∫∫_{ℝ²} f dx dy as an exact multiple of π.
    ///
    /// Uses ∫ x^{2k} e^{−αx²} dx = (2k−1)!!/(2α)^k · √(π/α); odd moments
    /// vanish, and the two √(π/α) factors combine to π/α. Double factorials
    /// and (2α)-powers are tabulated once and shared across terms.
    pub fn integrate(&self) -> PiScaledRational {
        let mut max_m = 0;
        let mut max_n = 0;
        let mut any = false;
        for &(m, n) in self.coeffs.keys() {
            if m % 2 == 0 && n % 2 == 0 {
                any = true;
                max_m = max_m.max(m);
                max_n = max_n.max(n);
            }
        }
        if !any {
            return PiScaledRational::zero();
        }
        // df[k] = (2k−1)!!, the x^{2k} Gaussian moment numerator
        let df_table = |top: u32| {
            let mut out = Vec::with_capacity(top as usize / 2 + 1);
            out.push(BigInt::one());
            for k in 1..=top / 2 {
                let next = out.last().expect("nonempty") * BigInt::from(2 * k - 1);
                out.push(next);
            }
            out
        };
        let dfm = df_table(max_m);
        let dfn = df_table(max_n);
        let two_alpha = &self.alpha + &self.alpha;
        let mut pow = Vec::with_capacity(((max_m + max_n) / 2 + 1) as usize);
        pow.push(Rat::one());
        for _ in 0..(max_m + max_n) / 2 {
            pow.push(pow.last().expect("nonempty") * &two_alpha);
        }
        let mut total = Rat::zero();
        for (&(m, n), v) in &self.coeffs {
            if m % 2 == 1 || n % 2 == 1 {
                continue;
            }
            let numer = &dfm[(m / 2) as usize] * &dfn[(n / 2) as usize];
            total += v * Rat::from_integer(numer) / &pow[((m + n) / 2) as usize];
        }
        PiScaledRational { value: total / &self.alpha }
    }

    /// ⟨f|g⟩ = ∫∫ f·g over ℝ² (real functions, no conjugation).
    pub fn inner_product(&self, other: &Self) -> PiScaledRational {
        self.multiply(other).integrate()
    }
}

impl fmt::Display for PolyGauss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(m, n), v) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", v)?;
            if m > 0 {
                write!(f, "*x^{}", m)?;
            }
            if n > 0 {
                write!(f, "*y^{}", n)?;
            }
        }
        write!(f, " * exp(-({})*r^2)", self.alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, rint};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gauss(alpha: Rat) -> PolyGauss {
        PolyGauss::monomial(0, 0, alpha).unwrap()
    }

    #[test]
    fn integrate_pure_gaussian_is_pi() {
        assert_eq!(gauss(rint(1)).integrate(), PiScaledRational { value: rint(1) });
    }

    #[test]
    fn integrate_x2_gaussian() {
        let f = PolyGauss::monomial(2, 0, rint(1)).unwrap();
        assert_eq!(f.integrate().value, rat(1, 2));
    }

    #[test]
    fn integrate_odd_vanishes() {
        let f = PolyGauss::monomial(1, 0, rint(1)).unwrap();
        assert!(f.integrate().is_zero());
        let g = PolyGauss::monomial(3, 2, rat(1, 2)).unwrap();
        assert!(g.integrate().is_zero());
    }

    #[test]
    fn integrate_mixed_even() {
        // x²y⁴e^{−r²}: (1!!/2)·(3!!/4)·π = (1/2)(3/4)π
        let f = PolyGauss::monomial(2, 4, rint(1)).unwrap();
        assert_eq!(f.integrate().value, rat(3, 8));
    }

    /// (m−1)!!(n−1)!!/(2α)^{(m+n)/2}: one even monomial's moment, computed
    /// the slow way as an oracle for the tabulated integrate.
    fn even_moment_pair(m: u32, n: u32, alpha: &Rat) -> Rat {
        let mut numer = Rat::one();
        let mut k = m;
        while k >= 2 {
            numer *= rint(i64::from(k - 1));
            k -= 2;
        }
        let mut k = n;
        while k >= 2 {
            numer *= rint(i64::from(k - 1));
            k -= 2;
        }
        let two_alpha = alpha + alpha;
        let mut denom = Rat::one();
        for _ in 0..((m + n) / 2) {
            denom *= &two_alpha;
        }
        numer / denom
    }

    #[test]
    fn integrate_matches_per_monomial_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..5 {
            let alpha = rat(rng.gen_range(1..6), rng.gen_range(1..4));
            let mut expected = Rat::zero();
            let mut terms = Vec::new();
            for m in 0..9u32 {
                for n in 0..9u32 {
                    let v = rat(rng.gen_range(-9..10), rng.gen_range(1..5));
                    if v.is_zero() {
                        continue;
                    }
                    if m % 2 == 0 && n % 2 == 0 {
                        expected += &v * even_moment_pair(m, n, &alpha) / &alpha;
                    }
                    terms.push(((m, n), v));
                }
            }
            let f = PolyGauss::from_coeffs(alpha, terms).unwrap();
            assert_eq!(f.integrate().value, expected);
        }
    }

    #[test]
    fn multiply_adds_alpha() {
        let x = PolyGauss::monomial(1, 0, rint(1)).unwrap();
        let prod = x.multiply(&x);
        assert_eq!(prod.alpha(), &rint(2));
        assert_eq!(prod.coeffs().get(&(2, 0)), Some(&rint(1)));
    }

    #[test]
    fn add_requires_matching_alpha() {
        let f = gauss(rint(1));
        let g = gauss(rint(2));
        assert!(matches!(f.add(&g), Err(AlgebraError::AlphaMismatch { .. })));
        let h = f.add(&f.scale(&rint(-1))).unwrap();
        assert!(h.is_zero());
    }

    #[test]
    fn hamiltonian_on_exact_ground_state() {
        // α = 1/2 kills the degree-raising term; e^{−r²/2} has energy 2.
        let params = PotentialParams::new(rint(0), rint(0), rint(0), rint(0));
        let f = gauss(rat(1, 2));
        assert_eq!(f.apply_hamiltonian(&params), f.scale(&rint(2)));
    }

    #[test]
    fn hamiltonian_on_width_one_gaussian() {
        // H e^{−r²} = (4 − 3x² − 3y²) e^{−r²} at λ=0.
        let params = PotentialParams::new(rint(0), rint(0), rint(0), rint(0));
        let f = gauss(rint(1));
        let hf = f.apply_hamiltonian(&params);
        let want = PolyGauss::from_coeffs(
            rint(1),
            [((0, 0), rint(4)), ((2, 0), rint(-3)), ((0, 2), rint(-3))],
        )
        .unwrap();
        assert_eq!(hf, want);
    }

    #[test]
    fn hamiltonian_with_cross_coupling() {
        // a=b=0, c=1, λ=1 on e^{−r²/2}: (2 + 2x²y²)e^{−r²/2}.
        let params = PotentialParams::new(rint(0), rint(0), rint(1), rint(1));
        let f = gauss(rat(1, 2));
        let hf = f.apply_hamiltonian(&params);
        let want = PolyGauss::from_coeffs(rat(1, 2), [((0, 0), rint(2)), ((2, 2), rint(2))]).unwrap();
        assert_eq!(hf, want);
    }

    #[test]
    fn rayleigh_quotient_of_width_one_gaussian() {
        // ⟨Ω|HΩ⟩/⟨Ω|Ω⟩ = 5/2 for Ω = e^{−r²} at λ=0.
        let params = PotentialParams::new(rint(0), rint(0), rint(0), rint(0));
        let f = gauss(rint(1));
        let s = f.inner_product(&f);
        let h = f.inner_product(&f.apply_hamiltonian(&params));
        assert_eq!(s.value, rat(1, 2));
        assert_eq!(h.value, rat(5, 4));
        assert_eq!(h.ratio(&s), rat(5, 2));
    }

    #[test]
    fn inner_product_examples() {
        let g = gauss(rat(1, 2));
        assert_eq!(g.inner_product(&g).value, rint(1));
        let x = PolyGauss::monomial(1, 0, rat(1, 2)).unwrap();
        let y = PolyGauss::monomial(0, 1, rat(1, 2)).unwrap();
        assert!(x.inner_product(&y).is_zero());
        let x2 = PolyGauss::monomial(2, 0, rat(1, 2)).unwrap();
        assert_eq!(x2.inner_product(&g).value, rat(1, 2));
    }

    fn random_polygauss(rng: &mut ChaCha8Rng, alpha: Rat, max_deg: u32) -> PolyGauss {
        let mut f = PolyGauss::zero(alpha).unwrap();
        for _ in 0..6 {
            let m = rng.gen_range(0..=max_deg);
            let n = rng.gen_range(0..=max_deg.saturating_sub(m));
            let num = rng.gen_range(-9i64..=9);
            let den = rng.gen_range(1i64..=9);
            f = f.add(&PolyGauss::from_coeffs(f.alpha().clone(), [((m, n), rat(num, den))]).unwrap()).unwrap();
        }
        f
    }

    #[test]
    fn hamiltonian_is_linear_and_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let params = PotentialParams::new(rat(2, 3), rat(1, 5), rat(-3, 7), rat(1, 4));
        for _ in 0..20 {
            let f = random_polygauss(&mut rng, rat(1, 2), 6);
            let g = random_polygauss(&mut rng, rat(1, 2), 6);
            let af = rat(rng.gen_range(-5..=5), 3);
            let combo = f.scale(&af).add(&g).unwrap();
            let lhs = combo.apply_hamiltonian(&params);
            let rhs = f.apply_hamiltonian(&params).scale(&af).add(&g.apply_hamiltonian(&params)).unwrap();
            assert_eq!(lhs, rhs);
            // self-adjointness on this class: ⟨Hf|g⟩ = ⟨f|Hg⟩
            let left = f.apply_hamiltonian(&params).inner_product(&g);
            let right = f.inner_product(&g.apply_hamiltonian(&params));
            assert_eq!(left, right);
        }
    }
}
