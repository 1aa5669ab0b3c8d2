//! Rayleigh-Ritz variational spectra in Krylov spaces built from a
//! symmetry-adapted Gaussian reference: Ω_n = HⁿΩ, overlap and Hamiltonian
//! matrices assembled in exact rational arithmetic, then a rank-filtered
//! generalized eigensolve in extended precision, escalated until the
//! low-lying Ritz values stabilize.

mod eig;
mod hp;
mod oned;

pub use hp::{decimal_digits, HpReal};
pub use oned::{ritz_1d, AxisParity};

use num_traits::{One, Signed};
use thiserror::Error;

use crate::polygauss::{PiScaledRational, PolyGauss, PotentialParams};
use crate::quadnum::rat_to_f64;
use crate::symcore::{group_for_params, GroupName, IrrepLabel};
use crate::{rint, Rat};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum KrylovError {
    #[error("irrep {0} does not occur in group {1}")]
    IrrepNotInGroup(IrrepLabel, GroupName),
    #[error("potential is unbounded below: requires lambda >= 0, a >= 0, b >= 0, c >= -sqrt(ab)")]
    UnboundedPotential,
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("overlap matrix is not positive definite")]
    OverlapNotPositive,
    #[error("Ritz values did not stabilize at {0} bits of working precision")]
    PrecisionExhausted(usize),
}

/// Solver inputs. `k` is the Krylov dimension (matrices are k×k), `alpha`
/// the Gaussian width of the reference, `precision_bits` the starting
/// floating-point precision for the reduced eigenproblem.
#[derive(Clone, Debug)]
pub struct KrylovConfig {
    pub alpha: Rat,
    pub k: usize,
    pub precision_bits: usize,
    pub irrep: IrrepLabel,
    pub params: PotentialParams,
}

impl KrylovConfig {
    /// Defaults: α = 1, K = 20, 512 starting bits.
    pub fn new(irrep: IrrepLabel, params: PotentialParams) -> Self {
        Self {
            alpha: Rat::one(),
            k: 20,
            precision_bits: 512,
            irrep,
            params,
        }
    }

    fn validate(&self) -> Result<(), KrylovError> {
        if self.k == 0 {
            return Err(KrylovError::InvalidConfig("subspace dimension must be at least 1"));
        }
        if self.precision_bits < 128 {
            return Err(KrylovError::InvalidConfig("precision must be at least 128 bits"));
        }
        if !self.alpha.is_positive() {
            return Err(KrylovError::InvalidConfig("alpha must be positive"));
        }
        Ok(())
    }
}

/// Ritz values for one sector, ascending. `k_used` is the rank retained by
/// the pivoted factorization; `convergence_estimate[i]` is |E_i(K) −
/// E_i(K−2)| at the accepted precision, infinite where the smaller space
/// has no i-th value.
#[derive(Clone, Debug, PartialEq)]
pub struct RRResult {
    pub irrep: IrrepLabel,
    pub lambda: Rat,
    pub eigenvalues: Vec<HpReal>,
    pub k_used: usize,
    pub convergence_estimate: Vec<f64>,
}

/// Lowest-degree polynomial×Gaussian references per irrep, one per partner
/// of the irrep (two for E of C4v, one everywhere else).
pub fn reference_functions(
    irrep: IrrepLabel,
    group: GroupName,
    alpha: &Rat,
) -> Result<Vec<PolyGauss>, KrylovError> {
    if !alpha.is_positive() {
        return Err(KrylovError::InvalidConfig("alpha must be positive"));
    }
    let build = |terms: &[((u32, u32), i64)]| {
        PolyGauss::from_coeffs(alpha.clone(), terms.iter().map(|&(key, v)| (key, rint(v))))
            .expect("alpha already checked positive")
    };
    use GroupName::{C2v, C4v};
    use IrrepLabel::{A1, A2, B1, B2, E};
    let list = match (group, irrep) {
        (C4v, A1) => vec![build(&[((0, 0), 1)])],
        (C4v, A2) => vec![build(&[((1, 3), 1), ((3, 1), -1)])],
        (C4v, B1) => vec![build(&[((2, 0), 1), ((0, 2), -1)])],
        (C4v, B2) => vec![build(&[((1, 1), 1)])],
        (C4v, E) => vec![build(&[((1, 0), 1)]), build(&[((0, 1), 1)])],
        (C2v, A1) => vec![build(&[((0, 0), 1)])],
        (C2v, A2) => vec![build(&[((1, 1), 1)])],
        (C2v, B1) => vec![build(&[((1, 0), 1)])],
        (C2v, B2) => vec![build(&[((0, 1), 1)])],
        (C2v, E) => return Err(KrylovError::IrrepNotInGroup(irrep, group)),
    };
    Ok(list)
}

/// First partner of [`reference_functions`].
pub fn reference_function(
    irrep: IrrepLabel,
    group: GroupName,
    alpha: &Rat,
) -> Result<PolyGauss, KrylovError> {
    Ok(reference_functions(irrep, group, alpha)?
        .into_iter()
        .next()
        .expect("every admissible irrep has a reference"))
}

fn ensure_bounded(params: &PotentialParams) -> Result<(), KrylovError> {
    let quartic_ok = !params.a.is_negative()
        && !params.b.is_negative()
        && (!params.c.is_negative() || &params.c * &params.c <= &params.a * &params.b);
    if params.lambda.is_negative() || !quartic_ok {
        return Err(KrylovError::UnboundedPotential);
    }
    Ok(())
}

/// ⟨Ω_i|Ω_j⟩ depends only on i+j (H is self-adjoint on this family), so one
/// moment list μ_m = ⟨Ω|HᵐΩ⟩, m ≤ top, covers both matrices. Keeping the
/// few-term reference as the left factor makes each integral linear in the
/// size of HᵐΩ.
fn chain_moments(omega: &PolyGauss, params: &PotentialParams, top: usize) -> Vec<PiScaledRational> {
    let mut chain = Vec::with_capacity(top + 1);
    chain.push(omega.clone());
    for _ in 0..top {
        chain.push(chain.last().expect("nonempty").apply_hamiltonian(params));
    }
    let mu: Vec<PiScaledRational> = chain.iter().map(|f| omega.inner_product(f)).collect();
    // Self-adjointness: how Hᵐ splits across the two slots cannot matter.
    if chain.len() > 2 {
        debug_assert!(chain[1].inner_product(&chain[1]) == mu[2]);
    }
    if chain.len() > 3 {
        debug_assert!(chain[1].inner_product(&chain[2]) == mu[3]);
    }
    mu
}

pub(crate) fn hankel_pair(mu: &[Rat], k: usize) -> (Vec<Vec<Rat>>, Vec<Vec<Rat>>) {
    debug_assert!(mu.len() >= 2 * k);
    let s: Vec<Vec<Rat>> = (0..k)
        .map(|i| (0..k).map(|j| mu[i + j].clone()).collect())
        .collect();
    let h: Vec<Vec<Rat>> = (0..k)
        .map(|i| (0..k).map(|j| mu[i + j + 1].clone()).collect())
        .collect();
    (s, h)
}

/// Square matrix of exact π-multiples.
pub type PiMatrix = Vec<Vec<PiScaledRational>>;

/// Overlap matrix S_ij = ⟨Ω_i|Ω_j⟩ and Hamiltonian matrix Hm_ij = ⟨Ω_i|HΩ_j⟩
/// for the first reference partner, both exact multiples of π.
pub fn krylov_matrices(config: &KrylovConfig) -> Result<(PiMatrix, PiMatrix), KrylovError> {
    config.validate()?;
    ensure_bounded(&config.params)?;
    let group = group_for_params(&config.params.a, &config.params.b);
    let omega = reference_function(config.irrep, group, &config.alpha)?;
    let mu = chain_moments(&omega, &config.params, 2 * config.k - 1);
    let k = config.k;
    let s: Vec<Vec<PiScaledRational>> = (0..k)
        .map(|i| (0..k).map(|j| mu[i + j].clone()).collect())
        .collect();
    let hm: Vec<Vec<PiScaledRational>> = (0..k)
        .map(|i| (0..k).map(|j| mu[i + j + 1].clone()).collect())
        .collect();
    Ok((s, hm))
}

/// Solves the pencil at `requested_bits`, then repeatedly at doubled
/// precision (capped at 4096) until the lowest five values move by less than
/// 10⁻¹⁰ between consecutive precisions. Returns the higher-precision solve
/// and its bit count. A request at or beyond the cap is accepted as is.
pub(crate) fn escalate(
    s: &[Vec<Rat>],
    h: &[Vec<Rat>],
    requested_bits: usize,
) -> Result<(eig::SubspaceSolve, usize), KrylovError> {
    let tol = {
        let mut t = Rat::one();
        for _ in 0..10 {
            t /= rint(10);
        }
        t
    };
    let p0 = requested_bits.max(128);
    let mut prev = eig::generalized_eigenvalues(s, h, p0)?;
    if p0 >= 4096 {
        return Ok((prev, p0));
    }
    let mut p = p0;
    loop {
        let p_next = (2 * p).min(4096);
        let next = eig::generalized_eigenvalues(s, h, p_next)?;
        let m = prev.values.len().min(next.values.len()).min(5);
        let stable = prev.values.len() == next.values.len()
            && (0..m).all(|i| (&prev.values[i] - &next.values[i]).abs() < tol);
        if stable {
            return Ok((next, p_next));
        }
        if p_next >= 4096 {
            return Err(KrylovError::PrecisionExhausted(p_next));
        }
        prev = next;
        p = p_next;
    }
}

/// Ritz values from the first reference partner.
pub fn rr_eigenvalues(config: &KrylovConfig) -> Result<RRResult, KrylovError> {
    rr_eigenvalues_for(config, 0)
}

/// Ritz values from the `partner`-th reference of the irrep.
pub fn rr_eigenvalues_for(config: &KrylovConfig, partner: usize) -> Result<RRResult, KrylovError> {
    config.validate()?;
    ensure_bounded(&config.params)?;
    let group = group_for_params(&config.params.a, &config.params.b);
    let refs = reference_functions(config.irrep, group, &config.alpha)?;
    let omega = refs
        .get(partner)
        .ok_or(KrylovError::InvalidConfig("reference partner index out of range"))?;
    let mu_pi = chain_moments(omega, &config.params, 2 * config.k - 1);
    // π is a common factor of both matrices and cancels in the pencil.
    let mu: Vec<Rat> = mu_pi.into_iter().map(|v| v.value).collect();
    let (s, h) = hankel_pair(&mu, config.k);
    let (solve, bits) = escalate(&s, &h, config.precision_bits)?;
    let convergence_estimate = if config.k > 2 {
        let (s_small, h_small) = hankel_pair(&mu, config.k - 2);
        let small = eig::generalized_eigenvalues(&s_small, &h_small, bits)?;
        let shared = solve.values.len().min(small.values.len());
        let mut est: Vec<f64> = (0..shared)
            .map(|i| rat_to_f64(&(&solve.values[i] - &small.values[i]).abs()))
            .collect();
        est.resize(solve.values.len(), f64::INFINITY);
        est
    } else {
        vec![f64::INFINITY; solve.values.len()]
    };
    Ok(RRResult {
        irrep: config.irrep,
        lambda: config.params.lambda.clone(),
        eigenvalues: solve
            .values
            .into_iter()
            .map(HpReal::from_rational)
            .collect(),
        k_used: solve.rank,
        convergence_estimate,
    })
}
