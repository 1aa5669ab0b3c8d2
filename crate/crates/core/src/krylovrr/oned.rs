//! One-dimensional quartic oscillator h = p² + q² + λa·q⁴ run through the
//! same exact Krylov-moment construction and eigensolver, for the separable
//! cross-check of the two-dimensional solver.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::hp::HpReal;
use super::{escalate, hankel_pair, KrylovError};
use crate::{rint, Rat};

/// Parity sector of the 1D problem; h preserves parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisParity {
    Even,
    Odd,
}

/// Sparse p(x)·e^{−αx²} with exact coefficients.
struct Poly1 {
    alpha: Rat,
    coeffs: BTreeMap<u32, Rat>,
}

impl Poly1 {
    fn accumulate(&mut self, k: u32, v: Rat) {
        if v.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(k).or_insert_with(Rat::zero);
        *slot += v;
        if slot.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    /// (−d²/dx² + x² + w·x⁴) f, exact; w = λa.
    fn apply_h(&self, w: &Rat) -> Poly1 {
        let mut out = Poly1 {
            alpha: self.alpha.clone(),
            coeffs: BTreeMap::new(),
        };
        let two_alpha = rint(2) * &self.alpha;
        let four_alpha_sq = rint(4) * &self.alpha * &self.alpha;
        for (&k, ck) in &self.coeffs {
            if k >= 2 {
                out.accumulate(k - 2, -rint(i64::from(k) * i64::from(k - 1)) * ck);
            }
            out.accumulate(k, &two_alpha * rint(2 * i64::from(k) + 1) * ck);
            out.accumulate(k + 2, (Rat::one() - &four_alpha_sq) * ck);
            if !w.is_zero() {
                out.accumulate(k + 4, w * ck);
            }
        }
        out
    }

    /// ⟨f|g⟩ with the common factor √(π/(2α)) dropped:
    /// ∫x^{2m} e^{−2αx²} ∝ (2m−1)!!/(4α)^m.
    fn inner(&self, other: &Poly1) -> Rat {
        debug_assert_eq!(self.alpha, other.alpha);
        let top = match (self.coeffs.keys().next_back(), other.coeffs.keys().next_back()) {
            (Some(a), Some(b)) => (a + b) as usize / 2,
            _ => return Rat::zero(),
        };
        // moments[m] = (2m−1)!!/(4α)^m
        let inv_4a = (rint(4) * &self.alpha).recip();
        let mut moments = Vec::with_capacity(top + 1);
        moments.push(Rat::one());
        for m in 1..=top {
            let prev: &Rat = &moments[m - 1];
            moments.push(prev * rint(2 * m as i64 - 1) * &inv_4a);
        }
        let mut acc = Rat::zero();
        for (&j, cj) in &self.coeffs {
            for (&k, dk) in &other.coeffs {
                if (j + k) % 2 == 0 {
                    acc += cj * dk * &moments[((j + k) / 2) as usize];
                }
            }
        }
        acc
    }
}

/// Ritz values of the 1D quartic oscillator in one parity sector, ascending,
/// built from the Krylov chain Ω_n = hⁿΩ with Ω = e^{−αx²} or x·e^{−αx²}.
pub fn ritz_1d(
    parity: AxisParity,
    a: &Rat,
    lambda: &Rat,
    alpha: &Rat,
    k: usize,
    precision_bits: usize,
) -> Result<Vec<HpReal>, KrylovError> {
    if k == 0 {
        return Err(KrylovError::InvalidConfig("subspace dimension must be at least 1"));
    }
    if precision_bits < 128 {
        return Err(KrylovError::InvalidConfig("precision must be at least 128 bits"));
    }
    if !alpha.is_positive() {
        return Err(KrylovError::InvalidConfig("alpha must be positive"));
    }
    if lambda.is_negative() || a.is_negative() {
        return Err(KrylovError::UnboundedPotential);
    }
    let mut omega = Poly1 {
        alpha: alpha.clone(),
        coeffs: BTreeMap::new(),
    };
    let degree = match parity {
        AxisParity::Even => 0,
        AxisParity::Odd => 1,
    };
    omega.coeffs.insert(degree, Rat::one());

    let w = lambda * a;
    let top = 2 * k - 1;
    let mut chain = vec![omega];
    for _ in 0..top {
        chain.push(chain.last().expect("nonempty").apply_h(&w));
    }
    let mu: Vec<Rat> = chain.iter().map(|f| chain[0].inner(f)).collect();
    let (s, h) = hankel_pair(&mu, k);
    let (solve, _bits) = escalate(&s, &h, precision_bits)?;
    Ok(solve
        .values
        .into_iter()
        .map(HpReal::from_rational)
        .collect())
}
