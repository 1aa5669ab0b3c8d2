//! Oscillator product basis, symmetry-adapted degenerate blocks, and exact
//! first-order degenerate perturbation theory for the quartic coupling.
//!
//! The unperturbed operator -d2/dx2 - d2/dy2 + x^2 + y^2 has eigenvalue
//! 2(N+1) on an (N+1)-fold degenerate level spanned by Hermite products
//! phi_{m,n} with m+n = N. The perturbation a*x^4 + b*y^4 + 2c*x^2*y^2
//! splits each level; diagonalizing it inside symmetry-adapted sectors
//! yields exact first-order coefficients, in closed form up to 2x2 sectors.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::polygauss::{PiScaledRational, PolyGauss, PotentialParams};
use crate::quadnum::{solve_monic_quadratic, QuadraticNumber};
use crate::symcore::{c2v_irrep_of_parity, expected_irrep_content, GroupName, IrrepLabel};
use crate::{rat, rint, Rat};

/// Product eigenstate phi_{m,n} of the unperturbed oscillator at width 1/2.
#[derive(Clone, Debug)]
pub struct HOState {
    m: u32,
    n: u32,
    representation: PolyGauss,
    norm_sq: PiScaledRational,
}

impl HOState {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn representation(&self) -> &PolyGauss {
        &self.representation
    }

    pub fn norm_sq(&self) -> &PiScaledRational {
        &self.norm_sq
    }
}

/// Physicists' Hermite coefficients by ascending power: H_{k+1} = 2q H_k - 2k H_{k-1}.
fn hermite_coeffs(k: u32) -> Vec<Rat> {
    let two = rint(2);
    let mut prev = vec![Rat::one()];
    if k == 0 {
        return prev;
    }
    let mut cur = vec![Rat::zero(), two.clone()];
    for j in 1..k {
        let mut next = vec![Rat::zero(); (j as usize) + 2];
        for (i, coeff) in cur.iter().enumerate() {
            next[i + 1] += coeff * &two;
        }
        let down = rint(2 * i64::from(j));
        for (i, coeff) in prev.iter().enumerate() {
            next[i] -= coeff * &down;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Unnormalized phi_{m,n} = H_m(x) H_n(y) e^{-(x^2+y^2)/2}; norm_sq = 2^{m+n} m! n! pi.
pub fn ho_state(m: u32, n: u32) -> HOState {
    let hx = hermite_coeffs(m);
    let hy = hermite_coeffs(n);
    let mut terms = Vec::new();
    for (i, ci) in hx.iter().enumerate() {
        if ci.is_zero() {
            continue;
        }
        for (j, cj) in hy.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            terms.push(((i as u32, j as u32), ci * cj));
        }
    }
    let representation = PolyGauss::from_coeffs(rat(1, 2), terms).expect("positive width");
    let norm_sq = representation.inner_product(&representation);
    HOState {
        m,
        n,
        representation,
        norm_sq,
    }
}

/// Row tag inside a two-dimensional sector: x-even/y-odd or x-odd/y-even.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PartnerParity {
    Eo,
    Oe,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateKind {
    Plain,
    Plus,
    Minus,
    Partner(PartnerParity),
}

/// Symmetry-adapted combination of product states within one degenerate level.
///
/// `representation` stores the integer combination (phi_{m,n} +/- phi_{n,m}
/// or a single product state); `norm_factor_sq` is the square of the
/// conventional prefactor (sqrt(2 - delta_{mn})/2 for +/- combinations,
/// 1 otherwise) relating the stored form to the conventional state. The
/// prefactor cancels in every normalized matrix element.
#[derive(Clone, Debug)]
pub struct SymAdaptedState {
    irrep: IrrepLabel,
    kind: StateKind,
    indices: (u32, u32),
    representation: PolyGauss,
    norm_factor_sq: Rat,
    norm_sq: PiScaledRational,
}

impl SymAdaptedState {
    fn plain(irrep: IrrepLabel, kind: StateKind, m: u32, n: u32) -> Self {
        let base = ho_state(m, n);
        SymAdaptedState {
            irrep,
            kind,
            indices: (m, n),
            norm_sq: base.norm_sq.clone(),
            representation: base.representation,
            norm_factor_sq: Rat::one(),
        }
    }

    fn combo(irrep: IrrepLabel, hi: u32, lo: u32, plus: bool) -> Self {
        let sign = if plus { Rat::one() } else { -Rat::one() };
        let first = ho_state(hi, lo);
        let second = ho_state(lo, hi);
        let representation = first
            .representation
            .add(&second.representation.scale(&sign))
            .expect("widths match");
        let norm_factor_sq = rat(1, 2);
        let norm_sq = representation
            .inner_product(&representation)
            .scale(&norm_factor_sq);
        SymAdaptedState {
            irrep,
            kind: if plus { StateKind::Plus } else { StateKind::Minus },
            indices: (hi, lo),
            representation,
            norm_factor_sq,
            norm_sq,
        }
    }

    pub fn irrep(&self) -> IrrepLabel {
        self.irrep
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn indices(&self) -> (u32, u32) {
        self.indices
    }

    pub fn representation(&self) -> &PolyGauss {
        &self.representation
    }

    pub fn norm_factor_sq(&self) -> &Rat {
        &self.norm_factor_sq
    }

    /// Norm squared of the conventional (prefactored) state.
    pub fn norm_sq(&self) -> &PiScaledRational {
        &self.norm_sq
    }
}

impl fmt::Display for SymAdaptedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, n) = self.indices;
        match self.kind {
            StateKind::Plain => write!(f, "phi({m},{n})"),
            StateKind::Plus => write!(f, "phi+({m},{n})"),
            StateKind::Minus => write!(f, "phi-({m},{n})"),
            StateKind::Partner(PartnerParity::Eo) => write!(f, "phi({m},{n})[eo]"),
            StateKind::Partner(PartnerParity::Oe) => write!(f, "phi({m},{n})[oe]"),
        }
    }
}

/// One degenerate level of the unperturbed oscillator, split into irrep sectors.
///
/// For two-dimensional sectors only the x-even/y-odd partner set is stored in
/// `sectors`; the exchange-image set lives in `partner_sector` in matching
/// order, so both produce identical perturbation matrices entry by entry.
#[derive(Clone, Debug)]
pub struct DegenerateBlock {
    n: u32,
    group: GroupName,
    sectors: BTreeMap<IrrepLabel, Vec<SymAdaptedState>>,
    partners: Vec<SymAdaptedState>,
}

impl DegenerateBlock {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn group(&self) -> GroupName {
        self.group
    }

    pub fn sectors(&self) -> &BTreeMap<IrrepLabel, Vec<SymAdaptedState>> {
        &self.sectors
    }

    /// Multiplicity of an irrep in this block (count of sector states).
    pub fn nu(&self, irrep: IrrepLabel) -> u32 {
        self.sectors.get(&irrep).map_or(0, |v| v.len() as u32)
    }

    /// Exchange-image partner set of the two-dimensional sector, if present.
    pub fn partner_sector(&self) -> Option<&[SymAdaptedState]> {
        if self.partners.is_empty() {
            None
        } else {
            Some(&self.partners)
        }
    }
}

/// Splits the (N+1)-fold degenerate level into symmetry-adapted sectors.
pub fn degenerate_block(n: u32, group: GroupName) -> DegenerateBlock {
    let mut sectors: BTreeMap<IrrepLabel, Vec<SymAdaptedState>> = BTreeMap::new();
    let mut partners = Vec::new();
    match group {
        GroupName::C2v => {
            for m in 0..=n {
                let (mx, my) = (m, n - m);
                let irrep = c2v_irrep_of_parity(mx % 2 == 1, my % 2 == 1);
                sectors
                    .entry(irrep)
                    .or_default()
                    .push(SymAdaptedState::plain(irrep, StateKind::Plain, mx, my));
            }
        }
        GroupName::C4v if n.is_multiple_of(2) => {
            let mut lo = 0;
            while lo < n - lo {
                let hi = n - lo;
                let (plus, minus) = if lo % 2 == 0 {
                    (IrrepLabel::A1, IrrepLabel::B1)
                } else {
                    (IrrepLabel::B2, IrrepLabel::A2)
                };
                sectors
                    .entry(plus)
                    .or_default()
                    .push(SymAdaptedState::combo(plus, hi, lo, true));
                sectors
                    .entry(minus)
                    .or_default()
                    .push(SymAdaptedState::combo(minus, hi, lo, false));
                lo += 1;
            }
            let mid = n / 2;
            let irrep = if mid.is_multiple_of(2) {
                IrrepLabel::A1
            } else {
                IrrepLabel::B2
            };
            sectors
                .entry(irrep)
                .or_default()
                .push(SymAdaptedState::plain(irrep, StateKind::Plus, mid, mid));
        }
        GroupName::C4v => {
            for m in (0..=n).step_by(2) {
                sectors.entry(IrrepLabel::E).or_default().push(SymAdaptedState::plain(
                    IrrepLabel::E,
                    StateKind::Partner(PartnerParity::Eo),
                    m,
                    n - m,
                ));
                partners.push(SymAdaptedState::plain(
                    IrrepLabel::E,
                    StateKind::Partner(PartnerParity::Oe),
                    n - m,
                    m,
                ));
            }
        }
    }
    debug_assert_eq!(
        sectors
            .iter()
            .map(|(s, v)| (*s, v.len() as u32))
            .collect::<BTreeMap<_, _>>(),
        expected_irrep_content(n, group),
    );
    DegenerateBlock {
        n,
        group,
        sectors,
        partners,
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SectorError {
    #[error("sector is empty")]
    Empty,
    #[error("states from different irreps in one sector")]
    MixedIrreps,
}

/// Applies the quartic perturbation a*x^4 + b*y^4 + 2c*x^2*y^2 to a state.
pub(crate) fn quartic_perturbation(f: &PolyGauss, a: &Rat, b: &Rat, c: &Rat) -> PolyGauss {
    let full = PotentialParams::new(a.clone(), b.clone(), c.clone(), Rat::one());
    let free = PotentialParams::new(Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero());
    let h = f.apply_hamiltonian(&full);
    let h0 = f.apply_hamiltonian(&free);
    h.add(&h0.scale(&-Rat::one())).expect("widths match")
}

/// Exact matrix of the perturbation inside one sector, kept in raw
/// (unnormalized) form: raw[i][j] = <s_i | V s_j>, norms[i] = <s_i | s_i>.
/// Normalized entries are raw[i][j] / sqrt(norms[i] * norms[j]).
#[derive(Clone, Debug)]
pub struct PerturbationMatrix {
    dim: usize,
    raw: Vec<Vec<PiScaledRational>>,
    norms: Vec<PiScaledRational>,
}

/// First-order coefficient: closed form, or a characteristic-polynomial root
/// for coupled sectors of dimension three and larger.
#[derive(Clone, Debug)]
pub enum FirstOrderE1 {
    Closed(QuadraticNumber),
    /// `charpoly` holds exact monic coefficients by ascending power;
    /// `value` is a floating-point root.
    Approximate { charpoly: Vec<Rat>, value: f64 },
}

impl FirstOrderE1 {
    pub fn exact(&self) -> Option<&QuadraticNumber> {
        match self {
            FirstOrderE1::Closed(q) => Some(q),
            FirstOrderE1::Approximate { .. } => None,
        }
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self, FirstOrderE1::Closed(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            FirstOrderE1::Closed(q) => q.to_f64(),
            FirstOrderE1::Approximate { value, .. } => *value,
        }
    }
}

impl fmt::Display for FirstOrderE1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FirstOrderE1::Closed(q) => write!(f, "{q}"),
            FirstOrderE1::Approximate { value, .. } => write!(f, "~{value}"),
        }
    }
}

fn e1_order(a: &FirstOrderE1, b: &FirstOrderE1) -> std::cmp::Ordering {
    match (a, b) {
        (FirstOrderE1::Closed(x), FirstOrderE1::Closed(y)) => x.cmp_exact(y),
        _ => a
            .to_f64()
            .partial_cmp(&b.to_f64())
            .expect("finite eigenvalues"),
    }
}

pub fn perturbation_matrix(
    sector: &[SymAdaptedState],
    a: &Rat,
    b: &Rat,
    c: &Rat,
) -> Result<PerturbationMatrix, SectorError> {
    let first = sector.first().ok_or(SectorError::Empty)?;
    if sector.iter().any(|s| s.irrep != first.irrep) {
        return Err(SectorError::MixedIrreps);
    }
    let dim = sector.len();
    let applied: Vec<PolyGauss> = sector
        .iter()
        .map(|s| quartic_perturbation(s.representation(), a, b, c))
        .collect();
    let norms: Vec<PiScaledRational> = sector
        .iter()
        .map(|s| s.representation().inner_product(s.representation()))
        .collect();
    let raw: Vec<Vec<PiScaledRational>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| sector[i].representation().inner_product(&applied[j]))
                .collect()
        })
        .collect();
    for (i, row) in raw.iter().enumerate() {
        for j in 0..i {
            debug_assert_eq!(row[j], raw[j][i]);
        }
    }
    Ok(PerturbationMatrix { dim, raw, norms })
}

impl PerturbationMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    fn diag(&self, i: usize) -> Rat {
        self.raw[i][i].ratio(&self.norms[i])
    }

    fn off_sq(&self, i: usize, j: usize) -> Rat {
        self.raw[i][j].ratio(&self.norms[i]) * self.raw[i][j].ratio(&self.norms[j])
    }

    /// Normalized entry <i|V|j>/sqrt(n_i n_j) as an exact quadratic number.
    pub fn entry(&self, i: usize, j: usize) -> QuadraticNumber {
        if i == j {
            return QuadraticNumber::from_rational(self.diag(i));
        }
        if self.raw[i][j].is_zero() {
            return QuadraticNumber::from_rational(Rat::zero());
        }
        let root = QuadraticNumber::sqrt_rational(&self.off_sq(i, j)).expect("square is positive");
        if self.raw[i][j] < PiScaledRational::zero() {
            root.neg()
        } else {
            root
        }
    }

    /// Connected components of the coupling graph (nonzero off-diagonals).
    fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.dim];
        let mut comps = Vec::new();
        for start in 0..self.dim {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(i) = stack.pop() {
                comp.push(i);
                for (j, seen_j) in seen.iter_mut().enumerate() {
                    if !*seen_j && !self.raw[i][j].is_zero() {
                        *seen_j = true;
                        stack.push(j);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Eigenvalues in ascending order. Coupled components of size one and two
    /// are exact; size three and larger fall back to characteristic-polynomial
    /// roots refined in floating point and carry the exact polynomial.
    pub fn eigenvalues(&self) -> Vec<FirstOrderE1> {
        let mut out = Vec::new();
        for comp in self.components() {
            match comp.len() {
                1 => out.push(FirstOrderE1::Closed(QuadraticNumber::from_rational(
                    self.diag(comp[0]),
                ))),
                2 => {
                    let (i, j) = (comp[0], comp[1]);
                    let t = self.diag(i) + self.diag(j);
                    let s = self.diag(i) * self.diag(j) - self.off_sq(i, j);
                    let (lo, hi) = solve_monic_quadratic(&t, &s).expect("real symmetric pair");
                    out.push(FirstOrderE1::Closed(lo));
                    out.push(FirstOrderE1::Closed(hi));
                }
                _ => {
                    let sub: Vec<Vec<Rat>> = comp
                        .iter()
                        .map(|&i| {
                            comp.iter()
                                .map(|&j| self.raw[i][j].ratio(&self.norms[i]))
                                .collect()
                        })
                        .collect();
                    let charpoly = charpoly_faddeev(&sub);
                    let sym: Vec<Vec<f64>> = comp
                        .iter()
                        .map(|&i| comp.iter().map(|&j| self.entry(i, j).to_f64()).collect())
                        .collect();
                    for value in jacobi_f64(sym) {
                        out.push(FirstOrderE1::Approximate {
                            charpoly: charpoly.clone(),
                            value,
                        });
                    }
                }
            }
        }
        out.sort_by(e1_order);
        out
    }
}

/// Monic characteristic polynomial of a small rational matrix, coefficients
/// by ascending power (Faddeev-LeVerrier).
fn charpoly_faddeev(a: &[Vec<Rat>]) -> Vec<Rat> {
    let s = a.len();
    let mut coeffs = vec![Rat::zero(); s + 1];
    coeffs[s] = Rat::one();
    let mut m: Vec<Vec<Rat>> = (0..s)
        .map(|i| {
            (0..s)
                .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                .collect()
        })
        .collect();
    for k in 1..=s {
        let mut am = vec![vec![Rat::zero(); s]; s];
        for i in 0..s {
            for j in 0..s {
                let mut acc = Rat::zero();
                for l in 0..s {
                    acc += &a[i][l] * &m[l][j];
                }
                am[i][j] = acc;
            }
        }
        let mut trace = Rat::zero();
        for (i, row) in am.iter().enumerate() {
            trace += &row[i];
        }
        let ck = -trace / rint(k as i64);
        for (i, row) in am.iter_mut().enumerate() {
            row[i] += &ck;
        }
        coeffs[s - k] = ck;
        m = am;
    }
    coeffs
}

/// Cyclic Jacobi eigenvalues of a small symmetric matrix, ascending.
#[allow(clippy::needless_range_loop)]
fn jacobi_f64(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let s = a.len();
    let scale: f64 = a
        .iter()
        .flat_map(|row| row.iter().map(|x| x * x))
        .sum::<f64>()
        .max(1.0);
    for _ in 0..100 {
        let mut off = 0.0;
        for i in 0..s {
            for j in (i + 1)..s {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-30 * scale {
            break;
        }
        for i in 0..s {
            for j in (i + 1)..s {
                if a[i][j].abs() < 1e-300 {
                    continue;
                }
                let tau = (a[j][j] - a[i][i]) / (2.0 * a[i][j]);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cth = 1.0 / (1.0 + t * t).sqrt();
                let sth = t * cth;
                for k in 0..s {
                    let (aki, akj) = (a[k][i], a[k][j]);
                    a[k][i] = cth * aki - sth * akj;
                    a[k][j] = sth * aki + cth * akj;
                }
                for k in 0..s {
                    let (aik, ajk) = (a[i][k], a[j][k]);
                    a[i][k] = cth * aik - sth * ajk;
                    a[j][k] = sth * aik + cth * ajk;
                }
            }
        }
    }
    let mut diag: Vec<f64> = (0..s).map(|i| a[i][i]).collect();
    diag.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    diag
}

/// One level to first order: E(lambda) = e0 + e1*lambda.
#[derive(Clone, Debug)]
pub struct FirstOrderLevel {
    pub label: String,
    pub n: u32,
    pub irrep: IrrepLabel,
    pub e0: Rat,
    pub e1: FirstOrderE1,
}

/// First-order spectrum for all levels N <= nmax. The group follows from the
/// parameters (a = b gives the richer symmetry). Labels count the j-th
/// appearance of each irrep, ordered by ascending unperturbed energy and then
/// by ascending first-order coefficient; a two-dimensional-irrep level appears
/// once per eigenvalue.
pub fn first_order_levels(a: &Rat, b: &Rat, c: &Rat, nmax: u32) -> Vec<FirstOrderLevel> {
    let group = crate::symcore::group_for_params(a, b);
    let mut counters: BTreeMap<IrrepLabel, u32> = BTreeMap::new();
    let mut out = Vec::new();
    for n in 0..=nmax {
        let block = degenerate_block(n, group);
        for (irrep, sector) in block.sectors() {
            let matrix = perturbation_matrix(sector, a, b, c).expect("sector is irrep-pure");
            for e1 in matrix.eigenvalues() {
                let j = counters.entry(*irrep).or_insert(0);
                *j += 1;
                out.push(FirstOrderLevel {
                    label: format!("{j}{irrep}"),
                    n,
                    irrep: *irrep,
                    e0: rint(2 * (i64::from(n) + 1)),
                    e1,
                });
            }
        }
    }
    out
}

/// Literature tag for one level: a catalogued (n_x, n_y, parity) label, an
/// explicit omission, or blank beyond the catalogued range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Literature {
    Label(&'static str),
    Omitted,
    Blank,
}

#[derive(Clone, Debug)]
pub struct LabelRow {
    pub n: u32,
    pub label: String,
    pub partner: Option<PartnerParity>,
    pub literature: Literature,
}

fn literature_for(n: u32, label: &str, partner: Option<PartnerParity>) -> Literature {
    if n > 4 {
        return Literature::Blank;
    }
    match (label, partner) {
        ("1A1", None) => Literature::Label("(0,0,e)"),
        ("1E", Some(PartnerParity::Eo)) => Literature::Label("(0,1,mixed)"),
        ("1E", Some(PartnerParity::Oe)) => Literature::Label("(1,0,mixed)"),
        ("1B1", None) => Literature::Label("(0,2,o)"),
        ("2A1", None) => Literature::Label("(0,2,e)"),
        ("1B2", None) => Literature::Label("(1,1,e)"),
        ("2E", Some(_)) | ("3E", Some(_)) => Literature::Omitted,
        ("3A1", None) | ("2B1", None) | ("4A1", None) => Literature::Omitted,
        ("1A2", None) => Literature::Label("(1,3,o)"),
        ("2B2", None) => Literature::Label("(1,3,e)"),
        _ => Literature::Blank,
    }
}

/// Square-symmetric label catalogue: one row per one-dimensional level, two
/// rows (partner-tagged) per two-dimensional level. Within a sector, copies
/// are numbered by ascending first-order coefficient.
pub fn label_map(nmax: u32) -> Vec<LabelRow> {
    let mut counters: BTreeMap<IrrepLabel, u32> = BTreeMap::new();
    let mut rows = Vec::new();
    for n in 0..=nmax {
        for (irrep, count) in expected_irrep_content(n, GroupName::C4v) {
            for _ in 0..count {
                let j = counters.entry(irrep).or_insert(0);
                *j += 1;
                let label = format!("{j}{irrep}");
                if irrep == IrrepLabel::E {
                    for partner in [PartnerParity::Eo, PartnerParity::Oe] {
                        rows.push(LabelRow {
                            n,
                            label: label.clone(),
                            partner: Some(partner),
                            literature: literature_for(n, &label, Some(partner)),
                        });
                    }
                } else {
                    rows.push(LabelRow {
                        n,
                        label: label.clone(),
                        partner: None,
                        literature: literature_for(n, &label, None),
                    });
                }
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygauss::PolyGauss;
    use crate::symcore::{group_data, project};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pi_times(r: Rat) -> PiScaledRational {
        PolyGauss::monomial(0, 0, Rat::one())
            .unwrap()
            .integrate()
            .scale(&r)
    }

    fn rand_rat(rng: &mut ChaCha8Rng) -> Rat {
        rat(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=9))
    }

    fn rand_pos_rat(rng: &mut ChaCha8Rng) -> Rat {
        rat(rng.gen_range(1i64..=9), rng.gen_range(1i64..=9))
    }

    fn factorial(k: u32) -> i64 {
        (1..=i64::from(k)).product::<i64>().max(1)
    }

    #[test]
    fn product_states_match_hermite_forms() {
        let ground = ho_state(0, 0);
        assert_eq!(
            ground.representation(),
            &PolyGauss::monomial(0, 0, rat(1, 2)).unwrap()
        );
        assert_eq!(ground.norm_sq(), &pi_times(Rat::one()));

        let two_zero = ho_state(2, 0);
        let expected = PolyGauss::from_coeffs(
            rat(1, 2),
            [((2, 0), rint(4)), ((0, 0), rint(-2))],
        )
        .unwrap();
        assert_eq!(two_zero.representation(), &expected);
        assert_eq!(two_zero.norm_sq(), &pi_times(rint(8)));

        let one_one = ho_state(1, 1);
        assert_eq!(
            one_one.representation(),
            &PolyGauss::from_coeffs(rat(1, 2), [((1, 1), rint(4))]).unwrap()
        );

        for m in 0..=5u32 {
            for n in 0..=5u32 {
                let state = ho_state(m, n);
                let expected = pi_times(rint(
                    (1i64 << (m + n)) * factorial(m) * factorial(n),
                ));
                assert_eq!(state.norm_sq(), &expected);
            }
        }
    }

    #[test]
    fn product_states_are_unperturbed_eigenfunctions() {
        let free = PotentialParams::new(Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero());
        for m in 0..=6u32 {
            for n in 0..=(6 - m) {
                let state = ho_state(m, n);
                let applied = state.representation().apply_hamiltonian(&free);
                let expected = state
                    .representation()
                    .scale(&rint(2 * (i64::from(m + n) + 1)));
                assert_eq!(applied, expected, "phi({m},{n})");
            }
        }
    }

    #[test]
    fn quartic_ground_state_expectation() {
        let ground = ho_state(0, 0);
        let x4 = quartic_perturbation(ground.representation(), &Rat::one(), &Rat::zero(), &Rat::zero());
        let value = ground.representation().inner_product(&x4);
        assert_eq!(value.ratio(ground.norm_sq()), rat(3, 4));
    }

    #[test]
    fn block_contents_follow_parity_rules() {
        let b2 = degenerate_block(2, GroupName::C4v);
        let a1: Vec<_> = b2.sectors()[&IrrepLabel::A1]
            .iter()
            .map(|s| (s.kind(), s.indices()))
            .collect();
        assert_eq!(a1, vec![(StateKind::Plus, (2, 0))]);
        let b1: Vec<_> = b2.sectors()[&IrrepLabel::B1]
            .iter()
            .map(|s| (s.kind(), s.indices()))
            .collect();
        assert_eq!(b1, vec![(StateKind::Minus, (2, 0))]);
        let b2s: Vec<_> = b2.sectors()[&IrrepLabel::B2]
            .iter()
            .map(|s| (s.kind(), s.indices()))
            .collect();
        assert_eq!(b2s, vec![(StateKind::Plus, (1, 1))]);

        let b3 = degenerate_block(3, GroupName::C4v);
        let eo: Vec<_> = b3.sectors()[&IrrepLabel::E]
            .iter()
            .map(|s| s.indices())
            .collect();
        assert_eq!(eo, vec![(0, 3), (2, 1)]);
        let oe: Vec<_> = b3
            .partner_sector()
            .unwrap()
            .iter()
            .map(|s| s.indices())
            .collect();
        assert_eq!(oe, vec![(3, 0), (1, 2)]);

        let c2 = degenerate_block(2, GroupName::C2v);
        let a1: Vec<_> = c2.sectors()[&IrrepLabel::A1]
            .iter()
            .map(|s| s.indices())
            .collect();
        assert_eq!(a1, vec![(0, 2), (2, 0)]);
        let a2: Vec<_> = c2.sectors()[&IrrepLabel::A2]
            .iter()
            .map(|s| s.indices())
            .collect();
        assert_eq!(a2, vec![(1, 1)]);

        for group in [GroupName::C4v, GroupName::C2v] {
            for n in 0..=8 {
                let block = degenerate_block(n, group);
                let counts: BTreeMap<_, _> = block
                    .sectors()
                    .iter()
                    .map(|(s, v)| (*s, v.len() as u32))
                    .collect();
                assert_eq!(counts, expected_irrep_content(n, group));
            }
        }
    }

    #[test]
    fn block_states_are_orthogonal_and_sector_pure() {
        for group in [GroupName::C4v, GroupName::C2v] {
            let data = group_data(group);
            for n in 0..=6 {
                let block = degenerate_block(n, group);
                let all: Vec<&SymAdaptedState> = block.sectors().values().flatten().collect();
                for (i, si) in all.iter().enumerate() {
                    for sj in all.iter().skip(i + 1) {
                        let overlap = si.representation().inner_product(sj.representation());
                        assert!(overlap.is_zero(), "N={n} {si} vs {sj}");
                    }
                }
                for state in &all {
                    let irrep = data.irrep(state.irrep()).unwrap();
                    let projected = project(irrep, &data, state.representation());
                    assert_eq!(&projected, state.representation(), "N={n} {state}");
                }
            }
        }
    }

    #[test]
    fn partner_sets_give_identical_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [3u32, 5] {
            let block = degenerate_block(n, GroupName::C4v);
            let a = rand_pos_rat(&mut rng);
            let c = rand_rat(&mut rng);
            let eo = perturbation_matrix(&block.sectors()[&IrrepLabel::E], &a, &a, &c).unwrap();
            let oe = perturbation_matrix(block.partner_sector().unwrap(), &a, &a, &c).unwrap();
            assert_eq!(eo.dim(), oe.dim());
            for i in 0..eo.dim() {
                for j in 0..eo.dim() {
                    assert_eq!(eo.entry(i, j), oe.entry(i, j), "N={n} entry {i}{j}");
                }
            }
        }
    }

    #[test]
    fn matrix_examples_match_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..5 {
            let a = rand_rat(&mut rng);
            let c = rand_rat(&mut rng);

            let b0 = degenerate_block(0, GroupName::C4v);
            let m0 = perturbation_matrix(&b0.sectors()[&IrrepLabel::A1], &a, &a, &c).unwrap();
            let expect = (rint(3) * &a + &c) / rint(2);
            assert_eq!(m0.entry(0, 0), QuadraticNumber::from_rational(expect));

            let b3 = degenerate_block(3, GroupName::C4v);
            let m3 = perturbation_matrix(&b3.sectors()[&IrrepLabel::E], &a, &a, &c).unwrap();
            let d0 = (rint(39) * &a + rint(7) * &c) / rint(2);
            let d1 = rint(3) * (rint(9) * &a + rint(5) * &c) / rint(2);
            assert_eq!(m3.entry(0, 0), QuadraticNumber::from_rational(d0));
            assert_eq!(m3.entry(1, 1), QuadraticNumber::from_rational(d1));
            let off = QuadraticNumber::new(Rat::zero(), c.clone(), 3u32.into()).unwrap();
            assert_eq!(m3.entry(0, 1), off);
            assert_eq!(m3.entry(1, 0), m3.entry(0, 1));
        }

        for (a, b, c) in [
            (rat(1, 3), rat(2, 5), rat(-3, 7)),
            (rat(2, 1), rat(1, 2), rat(5, 4)),
        ] {
            let block = degenerate_block(2, GroupName::C2v);
            let m = perturbation_matrix(&block.sectors()[&IrrepLabel::A1], &a, &b, &c).unwrap();
            let d0 = (rint(3) * &a + rint(39) * &b + rint(10) * &c) / rint(4);
            let d1 = (rint(39) * &a + rint(3) * &b + rint(10) * &c) / rint(4);
            assert_eq!(m.entry(0, 0), QuadraticNumber::from_rational(d0));
            assert_eq!(m.entry(1, 1), QuadraticNumber::from_rational(d1));
            assert_eq!(m.entry(0, 1), QuadraticNumber::from_rational(c.clone()));

            let disc = rint(81) * (&a * &a) - rint(162) * (&a * &b) + rint(81) * (&b * &b)
                + rint(4) * (&c * &c);
            let base = (rint(21) * &a + rint(21) * &b + rint(10) * &c) / rint(4);
            let surd = QuadraticNumber::sqrt_rational(&disc).unwrap();
            let lo = surd.scale(&rat(-1, 2)).add_rational(&base);
            let hi = surd.scale(&rat(1, 2)).add_rational(&base);
            let eigen = m.eigenvalues();
            assert_eq!(eigen.len(), 2);
            assert_eq!(eigen[0].exact().unwrap(), &lo);
            assert_eq!(eigen[1].exact().unwrap(), &hi);
        }
    }

    #[test]
    fn mixed_sector_rejected() {
        let block = degenerate_block(2, GroupName::C4v);
        let mixed = vec![
            block.sectors()[&IrrepLabel::A1][0].clone(),
            block.sectors()[&IrrepLabel::B1][0].clone(),
        ];
        assert_eq!(
            perturbation_matrix(&mixed, &Rat::one(), &Rat::one(), &Rat::one()).unwrap_err(),
            SectorError::MixedIrreps
        );
        assert_eq!(
            perturbation_matrix(&[], &Rat::one(), &Rat::one(), &Rat::one()).unwrap_err(),
            SectorError::Empty
        );
    }

    #[test]
    fn first_order_levels_match_published_examples() {
        let levels = first_order_levels(&Rat::one(), &Rat::one(), &Rat::one(), 3);
        let expect: BTreeMap<&str, QuadraticNumber> = [
            ("1A1", QuadraticNumber::from_rational(rint(2))),
            ("1E", QuadraticNumber::from_rational(rint(6))),
            ("1B2", QuadraticNumber::from_rational(rint(12))),
            ("2A1", QuadraticNumber::from_rational(rint(14))),
            ("1B1", QuadraticNumber::from_rational(rint(12))),
            ("2E", QuadraticNumber::from_rational(rint(20))),
            ("3E", QuadraticNumber::from_rational(rint(24))),
        ]
        .into_iter()
        .collect();
        assert_eq!(levels.len(), expect.len());
        for level in &levels {
            assert_eq!(level.e0, rint(2 * (i64::from(level.n) + 1)));
            assert_eq!(
                level.e1.exact().unwrap(),
                &expect[level.label.as_str()],
                "{}",
                level.label
            );
        }

        let levels = first_order_levels(&Rat::one(), &rint(2), &Rat::one(), 2);
        let surd = QuadraticNumber::sqrt_rational(&rint(85)).unwrap();
        let expect: BTreeMap<&str, QuadraticNumber> = [
            ("1A1", QuadraticNumber::from_rational(rat(11, 4))),
            ("1B1", QuadraticNumber::from_rational(rat(27, 4))),
            ("1B2", QuadraticNumber::from_rational(rat(39, 4))),
            (
                "2A1",
                surd.scale(&rat(-1, 2)).add_rational(&rat(73, 4)),
            ),
            (
                "3A1",
                surd.scale(&rat(1, 2)).add_rational(&rat(73, 4)),
            ),
            ("1A2", QuadraticNumber::from_rational(rat(63, 4))),
        ]
        .into_iter()
        .collect();
        assert_eq!(levels.len(), expect.len());
        for level in &levels {
            assert_eq!(
                level.e1.exact().unwrap(),
                &expect[level.label.as_str()],
                "{}",
                level.label
            );
        }
    }

    #[test]
    fn anisotropic_formulas_collapse_when_widths_match() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..2 {
            let a = rand_pos_rat(&mut rng);
            let c = rand_rat(&mut rng);
            let levels = first_order_levels(&a, &a, &c, 2);

            let find = |label: &str| {
                levels
                    .iter()
                    .find(|l| l.label == label)
                    .map(|l| l.e1.exact().unwrap().clone())
                    .unwrap()
            };

            let n0 = (rint(3) * &a + rint(3) * &a + rint(2) * &c) / rint(4);
            assert_eq!(find("1A1"), QuadraticNumber::from_rational(n0));

            let n1 = rint(3) * (rint(5) * &a + &a + rint(2) * &c) / rint(4);
            assert_eq!(find("1E"), QuadraticNumber::from_rational(n1));

            let disc = rint(4) * (&c * &c);
            let base = (rint(42) * &a + rint(10) * &c) / rint(4);
            let surd = QuadraticNumber::sqrt_rational(&disc).unwrap();
            let lo = surd.scale(&rat(-1, 2)).add_rational(&base);
            let hi = surd.scale(&rat(1, 2)).add_rational(&base);
            let pair = [find("2A1"), find("1B1")];
            assert!(pair.contains(&lo), "collapsed pair holds the lower root");
            assert!(pair.contains(&hi), "collapsed pair holds the upper root");

            let a2 = rint(3) * (rint(5) * &a + rint(5) * &a + rint(6) * &c) / rint(4);
            assert_eq!(find("1B2"), QuadraticNumber::from_rational(a2));
        }
    }

    #[test]
    fn block_trace_matches_product_basis_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for group in [GroupName::C4v, GroupName::C2v] {
            let data = group_data(group);
            for n in 0..=5u32 {
                let (a, b, c) = match group {
                    GroupName::C4v => {
                        let a = rand_rat(&mut rng);
                        (a.clone(), a, rand_rat(&mut rng))
                    }
                    GroupName::C2v => (
                        rand_rat(&mut rng),
                        rand_rat(&mut rng),
                        rand_rat(&mut rng),
                    ),
                };
                let block = degenerate_block(n, group);
                let mut sector_trace = Rat::zero();
                for (irrep, sector) in block.sectors() {
                    let matrix = perturbation_matrix(sector, &a, &b, &c).unwrap();
                    let weight = rint(i64::from(data.irrep(*irrep).unwrap().dimension));
                    for i in 0..matrix.dim() {
                        sector_trace += &weight * matrix.diag(i);
                    }
                }
                let mut basis_trace = Rat::zero();
                for m in 0..=n {
                    let state = ho_state(m, n - m);
                    let applied = quartic_perturbation(state.representation(), &a, &b, &c);
                    basis_trace += state
                        .representation()
                        .inner_product(&applied)
                        .ratio(state.norm_sq());
                }
                assert_eq!(sector_trace, basis_trace, "{group} N={n}");
            }
        }
    }

    #[test]
    fn coupled_triple_sector_reports_polynomial_roots() {
        let block = degenerate_block(4, GroupName::C2v);
        let sector = &block.sectors()[&IrrepLabel::A1];
        assert_eq!(sector.len(), 3);

        let matrix = perturbation_matrix(sector, &Rat::one(), &rint(2), &Rat::one()).unwrap();
        let eigen = matrix.eigenvalues();
        assert_eq!(eigen.len(), 3);
        let mut trace = 0.0;
        for e in &eigen {
            assert!(!e.is_closed_form());
            if let FirstOrderE1::Approximate { charpoly, value } = e {
                assert_eq!(charpoly.len(), 4);
                assert_eq!(charpoly[3], Rat::one());
                let p: f64 = charpoly
                    .iter()
                    .enumerate()
                    .map(|(k, c)| crate::quadnum::rat_to_f64(c) * value.powi(k as i32))
                    .sum();
                assert!(p.abs() < 1e-6 * value.abs().powi(3), "residual {p}");
                trace += value;
            }
        }
        let exact_trace = (0..3).map(|i| matrix.diag(i)).sum::<Rat>();
        assert!((trace - crate::quadnum::rat_to_f64(&exact_trace)).abs() < 1e-8);

        let decoupled =
            perturbation_matrix(sector, &Rat::one(), &rint(2), &Rat::zero()).unwrap();
        let eigen = decoupled.eigenvalues();
        let values: Vec<Rat> = eigen
            .iter()
            .map(|e| e.exact().unwrap().rational_part().clone())
            .collect();
        assert_eq!(values, vec![rat(117, 4), rat(129, 4), rat(249, 4)]);
    }

    #[test]
    fn label_catalogue_matches_published_table() {
        let rows = label_map(4);
        assert_eq!(rows.len(), 15);
        let omitted = rows
            .iter()
            .filter(|r| r.literature == Literature::Omitted)
            .count();
        assert_eq!(omitted, 7);

        let find = |label: &str, partner: Option<PartnerParity>| {
            rows.iter()
                .find(|r| r.label == label && r.partner == partner)
                .unwrap()
        };
        assert_eq!(find("1A1", None).literature, Literature::Label("(0,0,e)"));
        assert_eq!(find("1A1", None).n, 0);
        assert_eq!(
            find("1E", Some(PartnerParity::Eo)).literature,
            Literature::Label("(0,1,mixed)")
        );
        assert_eq!(
            find("1E", Some(PartnerParity::Oe)).literature,
            Literature::Label("(1,0,mixed)")
        );
        assert_eq!(find("1B1", None).literature, Literature::Label("(0,2,o)"));
        assert_eq!(find("2A1", None).literature, Literature::Label("(0,2,e)"));
        assert_eq!(find("1B2", None).literature, Literature::Label("(1,1,e)"));
        assert_eq!(
            find("2E", Some(PartnerParity::Eo)).literature,
            Literature::Omitted
        );
        assert_eq!(
            find("3E", Some(PartnerParity::Oe)).literature,
            Literature::Omitted
        );
        assert_eq!(find("3A1", None).literature, Literature::Omitted);
        assert_eq!(find("2B1", None).literature, Literature::Omitted);
        assert_eq!(find("4A1", None).literature, Literature::Omitted);
        assert_eq!(find("1A2", None).literature, Literature::Label("(1,3,o)"));
        assert_eq!(find("1A2", None).n, 4);
        assert_eq!(find("2B2", None).literature, Literature::Label("(1,3,e)"));

        let wide = label_map(6);
        assert!(wide
            .iter()
            .filter(|r| r.n > 4)
            .all(|r| r.literature == Literature::Blank));
    }
}
