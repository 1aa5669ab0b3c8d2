//! Moment-method perturbation series: exact recurrences for Gaussian-weighted
//! moments of an eigenfunction, an order-by-order solver for states that are
//! unique in their symmetry sector, and the quadratic zero-order-moment
//! closure for pairs the perturbation couples.
//!
//! I^(p)_{m,n} is the order-p coefficient of <x^m y^n e^{-r^2/2} | psi> in the
//! coupling expansion. The Gaussian width is fixed at 1/2: that is the unique
//! choice removing the degree-raising term of the recurrence, so moments close
//! downward in degree and the degree-N row becomes the solvability condition
//! that determines E^(p).

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::quadnum::{solve_monic_quadratic, QuadraticNumber};
use crate::symcore::{expected_irrep_content, GroupName, IrrepLabel};
use crate::{rint, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MomentKey {
    pub m: u32,
    pub n: u32,
    pub p: u32,
}

impl MomentKey {
    pub fn new(m: u32, n: u32, p: u32) -> Self {
        Self { m, n, p }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exchange {
    None,
    Symmetric,
    Antisymmetric,
}

/// Admissible exponent parities and the exchange relation of one irrep's
/// moment family; the recurrence closes within each family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MomentConstraints {
    pub x_parity: u8,
    pub y_parity: u8,
    pub exchange: Exchange,
}

enum CanonicalRef {
    Zero,
    Key((u32, u32), i8),
}

impl MomentConstraints {
    pub fn admits(&self, m: u32, n: u32) -> bool {
        m % 2 == u32::from(self.x_parity) && n % 2 == u32::from(self.y_parity)
    }

    /// Maps an arbitrary reference to its canonical stored key and sign;
    /// Zero marks entries the constraints force to vanish.
    fn canonical(&self, m: u32, n: u32) -> CanonicalRef {
        if !self.admits(m, n) {
            return CanonicalRef::Zero;
        }
        match self.exchange {
            Exchange::None => CanonicalRef::Key((m, n), 1),
            Exchange::Symmetric => {
                if m <= n {
                    CanonicalRef::Key((m, n), 1)
                } else {
                    CanonicalRef::Key((n, m), 1)
                }
            }
            Exchange::Antisymmetric => {
                if m == n {
                    CanonicalRef::Zero
                } else if m < n {
                    CanonicalRef::Key((m, n), 1)
                } else {
                    CanonicalRef::Key((n, m), -1)
                }
            }
        }
    }

    /// Canonical keys of one degree, lexicographically ascending.
    fn keys_of_degree(&self, d: u32) -> Vec<(u32, u32)> {
        let mut keys = Vec::new();
        for m in 0..=d {
            let n = d - m;
            if !self.admits(m, n) {
                continue;
            }
            match self.exchange {
                Exchange::None => keys.push((m, n)),
                Exchange::Symmetric => {
                    if m <= n {
                        keys.push((m, n));
                    }
                }
                Exchange::Antisymmetric => {
                    if m < n {
                        keys.push((m, n));
                    }
                }
            }
        }
        keys
    }

    fn min_degree(&self) -> u32 {
        u32::from(self.x_parity) + u32::from(self.y_parity)
    }
}

/// Exact rational-affine combination of the symbolic seed moments u_2..u_nu.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicScalar {
    pub constant: Rat,
    pub unknown_coeffs: Vec<Rat>,
}

impl SymbolicScalar {
    fn zero(k: usize) -> Self {
        Self {
            constant: Rat::zero(),
            unknown_coeffs: vec![Rat::zero(); k],
        }
    }

    fn constant(value: Rat, k: usize) -> Self {
        Self {
            constant: value,
            unknown_coeffs: vec![Rat::zero(); k],
        }
    }

    fn unknown(j: usize, k: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); k];
        coeffs[j] = Rat::one();
        Self {
            constant: Rat::zero(),
            unknown_coeffs: coeffs,
        }
    }

    fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.unknown_coeffs.iter().all(Rat::is_zero)
    }

    fn add_scaled(&mut self, other: &Self, factor: &Rat) {
        self.constant += &other.constant * factor;
        for (mine, theirs) in self.unknown_coeffs.iter_mut().zip(&other.unknown_coeffs) {
            *mine += theirs * factor;
        }
    }

    fn scale(&self, factor: &Rat) -> Self {
        Self {
            constant: &self.constant * factor,
            unknown_coeffs: self.unknown_coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    fn as_constant(&self) -> Option<&Rat> {
        if self.unknown_coeffs.iter().all(Rat::is_zero) {
            Some(&self.constant)
        } else {
            None
        }
    }
}

/// One unresolved degree-N solvability row: E1 * energy_coeff + rest = 0,
/// both parts affine in the symbolic seed moments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnsolvedRow {
    pub energy_coeff: SymbolicScalar,
    pub rest: SymbolicScalar,
}

#[derive(Debug, Error, PartialEq)]
pub enum MptError {
    #[error("irrep {0} does not occur in group {1}")]
    IrrepNotInGroup(IrrepLabel, GroupName),
    #[error("square-symmetric moment families require matching quartic weights (a = b)")]
    AnisotropicSquareGroup,
    #[error("level {n} holds no {irrep} sector")]
    EmptySector { irrep: IrrepLabel, n: u32 },
    #[error("{nu} independent degree-N seed moments: the single-seed series requires a sector with exactly one")]
    CoupledSector { nu: usize },
    #[error("sector holds {nu} seed moments, not the two the quadratic closure handles")]
    NotAPair { nu: usize },
    #[error("seed rows are dependent: accidental extra degeneracy")]
    AccidentalDegeneracy,
    #[error("{} coupled seed moments: emitting the first-order system unsolved", unknowns + 1)]
    UnsolvedSystem {
        unknowns: usize,
        rows: Vec<UnsolvedRow>,
    },
}

/// Vanishing pattern and exchange rule for one irrep's moments.
pub fn moment_constraints(
    irrep: IrrepLabel,
    group: GroupName,
) -> Result<MomentConstraints, MptError> {
    let c = |x, y, exchange| MomentConstraints {
        x_parity: x,
        y_parity: y,
        exchange,
    };
    match (group, irrep) {
        (GroupName::C4v, IrrepLabel::A1) => Ok(c(0, 0, Exchange::Symmetric)),
        (GroupName::C4v, IrrepLabel::B1) => Ok(c(0, 0, Exchange::Antisymmetric)),
        (GroupName::C4v, IrrepLabel::B2) => Ok(c(1, 1, Exchange::Symmetric)),
        (GroupName::C4v, IrrepLabel::A2) => Ok(c(1, 1, Exchange::Antisymmetric)),
        (GroupName::C4v, IrrepLabel::E) => Ok(c(0, 1, Exchange::None)),
        (GroupName::C2v, IrrepLabel::A1) => Ok(c(0, 0, Exchange::None)),
        (GroupName::C2v, IrrepLabel::A2) => Ok(c(1, 1, Exchange::None)),
        (GroupName::C2v, IrrepLabel::B1) => Ok(c(1, 0, Exchange::None)),
        (GroupName::C2v, IrrepLabel::B2) => Ok(c(0, 1, Exchange::None)),
        (GroupName::C2v, IrrepLabel::E) => {
            Err(MptError::IrrepNotInGroup(irrep, group))
        }
    }
}

/// Right-hand side of the moment identity at width 1/2:
/// sum_{q=0..p} E^(q) I^(p-q)_{m,n} =
///   -m(m-1) I^(p)_{m-2,n} - n(n-1) I^(p)_{m,n-2} + 2(m+n+1) I^(p)_{m,n}
///   + a I^(p-1)_{m+4,n} + b I^(p-1)_{m,n+4} + 2c I^(p-1)_{m+2,n+2}.
///
/// Vanishing-coefficient and negative-index terms are omitted.
pub fn recurrence_row(m: u32, n: u32, p: u32, a: &Rat, b: &Rat, c: &Rat) -> Vec<(Rat, MomentKey)> {
    let mut terms = Vec::new();
    if m >= 2 {
        terms.push((
            rint(-i64::from(m) * i64::from(m - 1)),
            MomentKey::new(m - 2, n, p),
        ));
    }
    if n >= 2 {
        terms.push((
            rint(-i64::from(n) * i64::from(n - 1)),
            MomentKey::new(m, n - 2, p),
        ));
    }
    terms.push((
        rint(2 * (i64::from(m) + i64::from(n) + 1)),
        MomentKey::new(m, n, p),
    ));
    if p >= 1 {
        if !a.is_zero() {
            terms.push((a.clone(), MomentKey::new(m + 4, n, p - 1)));
        }
        if !b.is_zero() {
            terms.push((b.clone(), MomentKey::new(m, n + 4, p - 1)));
        }
        if !c.is_zero() {
            terms.push((rint(2) * c, MomentKey::new(m + 2, n + 2, p - 1)));
        }
    }
    terms
}

/// State addressed by the moment solver: one irrep sector of one level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StateSpec {
    pub group: GroupName,
    pub irrep: IrrepLabel,
    pub n: u32,
}

/// Energy expansion E(lambda) = sum_p coefficients[p] * lambda^p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnergySeries {
    pub label: String,
    pub n: u32,
    pub irrep: IrrepLabel,
    pub coefficients: Vec<Rat>,
}

/// Resolved moment values of a unique-sector solve, one map per order.
#[derive(Clone, Debug)]
pub struct MomentTable {
    constraints: MomentConstraints,
    orders: Vec<BTreeMap<(u32, u32), Rat>>,
}

impl MomentTable {
    pub fn constraints(&self) -> &MomentConstraints {
        &self.constraints
    }

    pub fn max_order(&self) -> u32 {
        self.orders.len() as u32 - 1
    }

    /// Exact value, sign-resolved through the exchange relation; None when the
    /// entry lies beyond the computed degree cap of its order.
    pub fn value(&self, key: &MomentKey) -> Option<Rat> {
        let table = self.orders.get(key.p as usize)?;
        match self.constraints.canonical(key.m, key.n) {
            CanonicalRef::Zero => Some(Rat::zero()),
            CanonicalRef::Key(stored, sign) => table.get(&stored).map(|v| {
                if sign < 0 {
                    -v.clone()
                } else {
                    v.clone()
                }
            }),
        }
    }
}

enum OrderOutcome {
    Seeded,
    Energy,
    SeedRows(Vec<(SymbolicScalar, SymbolicScalar)>),
}

struct March {
    constraints: MomentConstraints,
    level: u32,
    k: usize,
    orders: Vec<BTreeMap<(u32, u32), SymbolicScalar>>,
    energies: Vec<Rat>,
}

impl March {
    fn new(constraints: MomentConstraints, level: u32, k: usize) -> Self {
        Self {
            constraints,
            level,
            k,
            orders: Vec::new(),
            energies: Vec::new(),
        }
    }

    fn resolve(&self, table: &BTreeMap<(u32, u32), SymbolicScalar>, m: u32, n: u32) -> SymbolicScalar {
        match self.constraints.canonical(m, n) {
            CanonicalRef::Zero => SymbolicScalar::zero(self.k),
            CanonicalRef::Key(stored, sign) => {
                let value = table
                    .get(&stored)
                    .unwrap_or_else(|| panic!("moment ({},{}) missing from table", stored.0, stored.1));
                if sign < 0 {
                    value.scale(&-Rat::one())
                } else {
                    value.clone()
                }
            }
        }
    }

    /// All right-hand-side terms except the pivot I^(p)_{m,n} itself.
    fn rhs_rest(
        &self,
        pivot: MomentKey,
        a: &Rat,
        b: &Rat,
        c: &Rat,
        current: &BTreeMap<(u32, u32), SymbolicScalar>,
    ) -> SymbolicScalar {
        let mut sum = SymbolicScalar::zero(self.k);
        for (coeff, key) in recurrence_row(pivot.m, pivot.n, pivot.p, a, b, c) {
            if key == pivot {
                continue;
            }
            let table = if key.p == pivot.p {
                current
            } else {
                &self.orders[key.p as usize]
            };
            let value = self.resolve(table, key.m, key.n);
            if !value.is_zero() {
                sum.add_scaled(&value, &coeff);
            }
        }
        sum
    }

    /// sum over q of E^(q) I^(p-q)_{m,n} for resolved orders q = 1..p
    /// (optionally stopping at p-1 when E^(p) is still the unknown).
    fn energy_terms(&self, m: u32, n: u32, p: u32, exclude_top: bool) -> SymbolicScalar {
        let mut sum = SymbolicScalar::zero(self.k);
        for q in 1..=p {
            if exclude_top && q == p {
                continue;
            }
            let moment = self.resolve(&self.orders[(p - q) as usize], m, n);
            if moment.is_zero() {
                continue;
            }
            let energy = self
                .energies
                .get((q - 1) as usize)
                .expect("energy resolved before use");
            sum.add_scaled(&moment, energy);
        }
        sum
    }

    fn run_order(&mut self, p: u32, cap: u32, a: &Rat, b: &Rat, c: &Rat) -> OrderOutcome {
        let mut table: BTreeMap<(u32, u32), SymbolicScalar> = BTreeMap::new();
        let mut seed_rows = Vec::new();
        let mut seed_count = 0usize;
        let mut resolved_energy = false;
        let mut d = self.constraints.min_degree();
        while d <= cap {
            for (m, n) in self.constraints.keys_of_degree(d) {
                if d == self.level {
                    if p == 0 {
                        let value = if seed_count == 0 {
                            SymbolicScalar::constant(Rat::one(), self.k)
                        } else {
                            SymbolicScalar::unknown(seed_count - 1, self.k)
                        };
                        seed_count += 1;
                        table.insert((m, n), value);
                    } else {
                        // Pivot coefficient vanishes at d = N: the row is the
                        // solvability condition E^(p) I^(0)_{m,n} = rest.
                        let i0 = self.resolve(&self.orders[0], m, n);
                        let mut rest = self.rhs_rest(MomentKey::new(m, n, p), a, b, c, &table);
                        let lower = self.energy_terms(m, n, p, true);
                        rest.add_scaled(&lower, &-Rat::one());
                        if self.k == 0 {
                            debug_assert_eq!(i0.as_constant(), Some(&Rat::one()));
                            self.energies
                                .push(rest.as_constant().expect("affine-free").clone());
                            resolved_energy = true;
                            // Seed normalization: I^(p)_{seed} = 0 for p >= 1.
                            table.insert((m, n), SymbolicScalar::zero(self.k));
                        } else {
                            seed_rows.push((i0, rest));
                        }
                    }
                } else {
                    let mut value = self.rhs_rest(MomentKey::new(m, n, p), a, b, c, &table);
                    let lower = self.energy_terms(m, n, p, false);
                    value.add_scaled(&lower, &-Rat::one());
                    let pivot = rint(2 * (i64::from(self.level) - i64::from(d)));
                    let value = value.scale(&pivot.recip());
                    if p == 0 && d < self.level {
                        debug_assert!(value.is_zero(), "sub-seed moments vanish at order 0");
                    }
                    table.insert((m, n), value);
                }
            }
            d += 2;
        }
        self.orders.push(table);
        if p == 0 {
            OrderOutcome::Seeded
        } else if resolved_energy {
            OrderOutcome::Energy
        } else {
            OrderOutcome::SeedRows(seed_rows)
        }
    }
}

fn irrep_appearances_through(irrep: IrrepLabel, group: GroupName, n: u32) -> u32 {
    (0..=n)
        .map(|k| {
            expected_irrep_content(k, group)
                .get(&irrep)
                .copied()
                .unwrap_or(0)
        })
        .sum()
}

fn validated_constraints(
    state: &StateSpec,
    a: &Rat,
    b: &Rat,
) -> Result<(MomentConstraints, Vec<(u32, u32)>), MptError> {
    let constraints = moment_constraints(state.irrep, state.group)?;
    if state.group == GroupName::C4v && a != b {
        return Err(MptError::AnisotropicSquareGroup);
    }
    let seeds = constraints.keys_of_degree(state.n);
    debug_assert_eq!(
        seeds.len() as u32,
        expected_irrep_content(state.n, state.group)
            .get(&state.irrep)
            .copied()
            .unwrap_or(0),
        "seed count equals the sector multiplicity"
    );
    Ok((constraints, seeds))
}

/// Independent degree-N seed moments of the sector = its multiplicity.
pub fn state_multiplicity(state: &StateSpec) -> Result<usize, MptError> {
    let constraints = moment_constraints(state.irrep, state.group)?;
    Ok(constraints.keys_of_degree(state.n).len())
}

/// Order-by-order series for a state unique in its sector: marches moments in
/// ascending degree (capped at N + 4(P-p) at order p); each degree-N row
/// yields E^(p) exactly.
pub fn solve_series(
    state: &StateSpec,
    a: &Rat,
    b: &Rat,
    c: &Rat,
    max_order: u32,
) -> Result<(EnergySeries, MomentTable), MptError> {
    let (constraints, seeds) = validated_constraints(state, a, b)?;
    match seeds.len() {
        0 => {
            return Err(MptError::EmptySector {
                irrep: state.irrep,
                n: state.n,
            })
        }
        1 => {}
        nu => return Err(MptError::CoupledSector { nu }),
    }
    let mut march = March::new(constraints, state.n, 0);
    for p in 0..=max_order {
        let cap = state.n + 4 * (max_order - p);
        march.run_order(p, cap, a, b, c);
    }
    let mut coefficients = vec![rint(2 * (i64::from(state.n) + 1))];
    coefficients.extend(march.energies.iter().cloned());
    let label = format!(
        "{}{}",
        irrep_appearances_through(state.irrep, state.group, state.n),
        state.irrep
    );
    let orders = march
        .orders
        .into_iter()
        .map(|table| {
            table
                .into_iter()
                .map(|(key, value)| {
                    (
                        key,
                        value
                            .as_constant()
                            .expect("unique-sector moments are rational")
                            .clone(),
                    )
                })
                .collect()
        })
        .collect();
    Ok((
        EnergySeries {
            label,
            n: state.n,
            irrep: state.irrep,
            coefficients,
        },
        MomentTable {
            constraints,
            orders,
        },
    ))
}

/// One root of the coupled closure: first-order energy coefficient and the
/// matching second seed moment under first-seed normalization (None when the
/// state carries no first-seed component).
#[derive(Clone, Debug)]
pub struct CoupledRoot {
    pub label: String,
    pub e1: QuadraticNumber,
    pub seed_ratio: Option<QuadraticNumber>,
}

/// First-order closure for a sector with exactly two seed moments: the two
/// degree-N solvability rows are bilinear in (E1, u); eliminating u leaves a
/// monic quadratic in E1. Roots return in ascending order.
pub fn coupled_first_order(
    state: &StateSpec,
    a: &Rat,
    b: &Rat,
    c: &Rat,
) -> Result<(CoupledRoot, CoupledRoot), MptError> {
    let (constraints, seeds) = validated_constraints(state, a, b)?;
    match seeds.len() {
        0 => {
            return Err(MptError::EmptySector {
                irrep: state.irrep,
                n: state.n,
            })
        }
        1 => return Err(MptError::NotAPair { nu: 1 }),
        _ => {}
    }
    let k = seeds.len() - 1;
    let mut march = March::new(constraints, state.n, k);
    march.run_order(0, state.n + 4, a, b, c);
    let rows = match march.run_order(1, state.n, a, b, c) {
        OrderOutcome::SeedRows(rows) => rows,
        _ => unreachable!("symbolic seeds force row collection"),
    };
    if seeds.len() > 2 {
        return Err(MptError::UnsolvedSystem {
            unknowns: k,
            rows: rows
                .into_iter()
                .map(|(energy_coeff, rest)| UnsolvedRow {
                    energy_coeff,
                    rest: rest.scale(&-Rat::one()),
                })
                .collect(),
        });
    }

    // Row 1 (seed normalized to 1): E1 = gamma1 + delta1 u.
    // Row 2 (seed u):             E1 u = gamma2 + delta2 u.
    debug_assert_eq!(rows[0].0, SymbolicScalar::constant(Rat::one(), 1));
    debug_assert_eq!(rows[1].0, SymbolicScalar::unknown(0, 1));
    let gamma1 = rows[0].1.constant.clone();
    let delta1 = rows[0].1.unknown_coeffs[0].clone();
    let gamma2 = rows[1].1.constant.clone();
    let delta2 = rows[1].1.unknown_coeffs[0].clone();

    let j_hi = irrep_appearances_through(state.irrep, state.group, state.n);
    let label = |j: u32| format!("{}{}", j, state.irrep);

    if delta1.is_zero() {
        if gamma1 == delta2 {
            return Err(MptError::AccidentalDegeneracy);
        }
        // Decoupled rows: one state is pure first seed (E1 = gamma1), the
        // other carries no first-seed component at all.
        let u_first = &gamma2 / (&gamma1 - &delta2);
        let first = (gamma1.clone(), Some(QuadraticNumber::from_rational(u_first)));
        let second = (delta2.clone(), None);
        let (lo, hi) = if gamma1 <= delta2 {
            (first, second)
        } else {
            (second, first)
        };
        return Ok((
            CoupledRoot {
                label: label(j_hi - 1),
                e1: QuadraticNumber::from_rational(lo.0),
                seed_ratio: lo.1,
            },
            CoupledRoot {
                label: label(j_hi),
                e1: QuadraticNumber::from_rational(hi.0),
                seed_ratio: hi.1,
            },
        ));
    }

    let t = &gamma1 + &delta2;
    let s = &gamma1 * &delta2 - &delta1 * &gamma2;
    let (lo, hi) = solve_monic_quadratic(&t, &s).expect("coupled pair has a real spectrum");
    let ratio = |e: &QuadraticNumber| {
        Some(
            e.add_rational(&-gamma1.clone())
                .scale(&delta1.recip()),
        )
    };
    Ok((
        CoupledRoot {
            label: label(j_hi - 1),
            seed_ratio: ratio(&lo),
            e1: lo,
        },
        CoupledRoot {
            label: label(j_hi),
            seed_ratio: ratio(&hi),
            e1: hi,
        },
    ))
}

/// Order-0 moment table with symbolic seeds, for coupled sectors; entries run
/// through degree N+4. Used to cross-check the closure against independent
/// integral evaluations.
#[cfg(test)]
pub(crate) fn order_zero_symbolic(
    state: &StateSpec,
    a: &Rat,
    b: &Rat,
) -> Result<BTreeMap<(u32, u32), SymbolicScalar>, MptError> {
    let (constraints, seeds) = validated_constraints(state, a, b)?;
    let mut march = March::new(constraints, state.n, seeds.len() - 1);
    march.run_order(0, state.n + 4, a, &Rat::zero(), &Rat::zero());
    Ok(march.orders.pop().expect("one order marched"))
}
