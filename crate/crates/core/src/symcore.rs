//! Point-group machinery for C4v and C2v: explicit signed-permutation
//! operations, character tables, projection operators on polynomial-Gaussian
//! functions, and structural classification of the quartic potential.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::polygauss::PolyGauss;
use crate::{rat, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupName {
    C4v,
    C2v,
}

impl std::fmt::Display for GroupName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupName::C4v => write!(f, "C4v"),
            GroupName::C2v => write!(f, "C2v"),
        }
    }
}

/// Operation labels across both groups. C4v uses all eight; C2v uses
/// {E, C2, Sv1, Sv2} with the reflections acting as (x,−y) and (−x,y).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpName {
    E,
    C4,
    C4Cubed,
    C2,
    Sv1,
    Sv2,
    Sd1,
    Sd2,
}

impl std::fmt::Display for OpName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            OpName::E => "E",
            OpName::C4 => "C4",
            OpName::C4Cubed => "C4^3",
            OpName::C2 => "C2",
            OpName::Sv1 => "sigma_v1",
            OpName::Sv2 => "sigma_v2",
            OpName::Sd1 => "sigma_d1",
            OpName::Sd2 => "sigma_d2",
        };
        write!(f, "{}", s)
    }
}

/// A point-group operation as the coordinate map (x,y) ↦ M(x,y): a signed
/// permutation matrix, one nonzero entry of ±1 per row and column.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupOp {
    pub name: OpName,
    pub matrix: [[i8; 2]; 2],
}

impl GroupOp {
    fn new(name: OpName, matrix: [[i8; 2]; 2]) -> Self {
        let op = Self { name, matrix };
        debug_assert!(op.is_signed_permutation());
        op
    }

    pub fn is_signed_permutation(&self) -> bool {
        let m = &self.matrix;
        let row_ok = |r: &[i8; 2]| (r[0].abs() == 1) != (r[1].abs() == 1) && r[0] * r[1] == 0;
        row_ok(&m[0]) && row_ok(&m[1]) && (m[0][0].abs() != m[1][0].abs())
    }

    /// Matrix product: composition of coordinate maps.
    pub fn compose_matrix(a: [[i8; 2]; 2], b: [[i8; 2]; 2]) -> [[i8; 2]; 2] {
        let mut out = [[0i8; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    /// Operator action on functions: (Uf)(x) = f(Mᵀx). The Gaussian factor
    /// is invariant because M preserves x²+y².
    pub fn apply(&self, f: &PolyGauss) -> PolyGauss {
        let mt = [
            [self.matrix[0][0], self.matrix[1][0]],
            [self.matrix[0][1], self.matrix[1][1]],
        ];
        let mut out = PolyGauss::zero(f.alpha().clone()).expect("alpha already validated");
        for (&(m, n), v) in f.coeffs() {
            // substitution x ↦ row0 · (x,y), y ↦ row1 · (x,y); rows are signed units
            let (m_to, s1) = if mt[0][0] != 0 { (0u8, mt[0][0]) } else { (1u8, mt[0][1]) };
            let (n_to, s2) = if mt[1][0] != 0 { (0u8, mt[1][0]) } else { (1u8, mt[1][1]) };
            let mut sign = 1i8;
            if s1 < 0 && m % 2 == 1 {
                sign = -sign;
            }
            if s2 < 0 && n % 2 == 1 {
                sign = -sign;
            }
            let (mut mm, mut nn) = (0u32, 0u32);
            if m_to == 0 {
                mm += m;
            } else {
                nn += m;
            }
            if n_to == 0 {
                mm += n;
            } else {
                nn += n;
            }
            let coeff = if sign < 0 { -v.clone() } else { v.clone() };
            let term = PolyGauss::from_coeffs(f.alpha().clone(), [((mm, nn), coeff)])
                .expect("alpha already validated");
            out = out.add(&term).expect("alpha matches");
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IrrepLabel {
    A1,
    A2,
    B1,
    B2,
    E,
}

impl std::fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            IrrepLabel::A1 => "A1",
            IrrepLabel::A2 => "A2",
            IrrepLabel::B1 => "B1",
            IrrepLabel::B2 => "B2",
            IrrepLabel::E => "E",
        };
        write!(f, "{}", s)
    }
}

impl std::str::FromStr for IrrepLabel {
    type Err = GroupError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A1" => Ok(IrrepLabel::A1),
            "A2" => Ok(IrrepLabel::A2),
            "B1" => Ok(IrrepLabel::B1),
            "B2" => Ok(IrrepLabel::B2),
            "E" => Ok(IrrepLabel::E),
            _ => Err(GroupError::UnknownIrrep(s.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Irrep {
    pub label: IrrepLabel,
    pub dimension: u32,
    pub characters: BTreeMap<OpName, i64>,
}

#[derive(Clone, Debug)]
pub struct GroupData {
    pub name: GroupName,
    pub ops: Vec<GroupOp>,
    pub irreps: Vec<Irrep>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("irrep {0} does not belong to group {1}")]
    IrrepNotInGroup(IrrepLabel, GroupName),
    #[error("unknown irrep label: {0}")]
    UnknownIrrep(String),
}

/// Full operation list and character table.
pub fn group_data(name: GroupName) -> GroupData {
    match name {
        GroupName::C4v => c4v_data(),
        GroupName::C2v => c2v_data(),
    }
}

fn c4v_data() -> GroupData {
    let ops = vec![
        GroupOp::new(OpName::E, [[1, 0], [0, 1]]),
        // C4: (x,y) -> (y,−x)
        GroupOp::new(OpName::C4, [[0, 1], [-1, 0]]),
        // C4³: (x,y) -> (−y,x)
        GroupOp::new(OpName::C4Cubed, [[0, -1], [1, 0]]),
        GroupOp::new(OpName::C2, [[-1, 0], [0, -1]]),
        // σv1: (x,y) -> (x,−y)
        GroupOp::new(OpName::Sv1, [[1, 0], [0, -1]]),
        // σv2: (x,y) -> (−x,y)
        GroupOp::new(OpName::Sv2, [[-1, 0], [0, 1]]),
        // σd1: (x,y) -> (y,x)
        GroupOp::new(OpName::Sd1, [[0, 1], [1, 0]]),
        // σd2: (x,y) -> (−y,−x)
        GroupOp::new(OpName::Sd2, [[0, -1], [-1, 0]]),
    ];
    use OpName::*;
    let rows: [(IrrepLabel, u32, [i64; 8]); 5] = [
        (IrrepLabel::A1, 1, [1, 1, 1, 1, 1, 1, 1, 1]),
        (IrrepLabel::A2, 1, [1, 1, 1, 1, -1, -1, -1, -1]),
        (IrrepLabel::B1, 1, [1, -1, -1, 1, 1, 1, -1, -1]),
        (IrrepLabel::B2, 1, [1, -1, -1, 1, -1, -1, 1, 1]),
        (IrrepLabel::E, 2, [2, 0, 0, -2, 0, 0, 0, 0]),
    ];
    let op_order = [E, C4, C4Cubed, C2, Sv1, Sv2, Sd1, Sd2];
    let irreps = rows
        .into_iter()
        .map(|(label, dimension, chars)| Irrep {
            label,
            dimension,
            characters: op_order.iter().copied().zip(chars).collect(),
        })
        .collect();
    GroupData { name: GroupName::C4v, ops, irreps }
}

fn c2v_data() -> GroupData {
    let ops = vec![
        GroupOp::new(OpName::E, [[1, 0], [0, 1]]),
        GroupOp::new(OpName::C2, [[-1, 0], [0, -1]]),
        GroupOp::new(OpName::Sv1, [[1, 0], [0, -1]]),
        GroupOp::new(OpName::Sv2, [[-1, 0], [0, 1]]),
    ];
    use OpName::*;
    let rows: [(IrrepLabel, [i64; 4]); 4] = [
        (IrrepLabel::A1, [1, 1, 1, 1]),
        (IrrepLabel::A2, [1, 1, -1, -1]),
        (IrrepLabel::B1, [1, -1, 1, -1]),
        (IrrepLabel::B2, [1, -1, -1, 1]),
    ];
    let op_order = [E, C2, Sv1, Sv2];
    let irreps = rows
        .into_iter()
        .map(|(label, chars)| Irrep {
            label,
            dimension: 1,
            characters: op_order.iter().copied().zip(chars).collect(),
        })
        .collect();
    GroupData { name: GroupName::C2v, ops, irreps }
}

impl GroupData {
    pub fn order(&self) -> usize {
        self.ops.len()
    }

    pub fn irrep(&self, label: IrrepLabel) -> Result<&Irrep, GroupError> {
        self.irreps
            .iter()
            .find(|ir| ir.label == label)
            .ok_or(GroupError::IrrepNotInGroup(label, self.name))
    }
}

/// Character projector P^S f = (l_S/h)·Σᵢ χ^S(Uᵢ)·Uᵢf. For E this projects
/// onto the full two-dimensional subspace.
pub fn project(irrep: &Irrep, group: &GroupData, f: &PolyGauss) -> PolyGauss {
    let mut sum = PolyGauss::zero(f.alpha().clone()).expect("alpha already validated");
    for op in &group.ops {
        let chi = irrep.characters[&op.name];
        if chi == 0 {
            continue;
        }
        let image = op.apply(f).scale(&Rat::from_integer(chi.into()));
        sum = sum.add(&image).expect("alpha matches");
    }
    sum.scale(&rat(i64::from(irrep.dimension), group.order() as i64))
}

/// Structural classification of (a, b, c); precedence Case0 > Case1 > Case2 > Case3.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseKind {
    /// c = 0: the potential separates in cartesian coordinates.
    Case0,
    /// a = b = c ≠ 0: isotropic quartic r⁴-type coupling.
    Case1,
    /// a = b, a ≠ c, c ≠ 0: square symmetry (C4v).
    Case2,
    /// a ≠ b: rectangular symmetry (C2v).
    Case3,
}

impl std::fmt::Display for CaseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CaseKind::Case0 => write!(f, "Case 0 (separable)"),
            CaseKind::Case1 => write!(f, "Case 1 (a=b=c)"),
            CaseKind::Case2 => write!(f, "Case 2 (a=b, a≠c)"),
            CaseKind::Case3 => write!(f, "Case 3 (a≠b)"),
        }
    }
}

pub fn classify_potential(a: &Rat, b: &Rat, c: &Rat) -> CaseKind {
    if c.is_zero() {
        CaseKind::Case0
    } else if a == b && a == c {
        CaseKind::Case1
    } else if a == b {
        CaseKind::Case2
    } else {
        CaseKind::Case3
    }
}

/// The symmetry group of the potential: square-symmetric iff a = b.
pub fn group_for_params(a: &Rat, b: &Rat) -> GroupName {
    if a == b {
        GroupName::C4v
    } else {
        GroupName::C2v
    }
}

/// Irrep multiplicities inside the (N+1)-fold degenerate unperturbed level.
///
/// C4v: even N splits the even-even pairs into A1/B1 and odd-odd pairs into
/// B2/A2; odd N gives (N+1)/2 two-dimensional E levels. C2v: even N gives
/// A1 (even-even) and A2 (odd-odd); odd N gives B1 (x odd) and B2 (y odd).
pub fn expected_irrep_content(n: u32, group: GroupName) -> BTreeMap<IrrepLabel, u32> {
    let mut out = BTreeMap::new();
    let mut put = |label: IrrepLabel, count: u32| {
        if count > 0 {
            out.insert(label, count);
        }
    };
    match group {
        GroupName::C4v => {
            if n.is_multiple_of(2) {
                let even_even = n / 2 + 1;
                let odd_odd = n / 2;
                put(IrrepLabel::A1, even_even.div_ceil(2));
                put(IrrepLabel::B1, even_even / 2);
                put(IrrepLabel::B2, odd_odd.div_ceil(2));
                put(IrrepLabel::A2, odd_odd / 2);
            } else {
                put(IrrepLabel::E, n.div_ceil(2));
            }
        }
        GroupName::C2v => {
            if n.is_multiple_of(2) {
                put(IrrepLabel::A1, n / 2 + 1);
                put(IrrepLabel::A2, n / 2);
            } else {
                put(IrrepLabel::B1, n.div_ceil(2));
                put(IrrepLabel::B2, n.div_ceil(2));
            }
        }
    }
    out
}

/// C2v irrep of a monomial x^m y^n by parity.
pub fn c2v_irrep_of_parity(m_odd: bool, n_odd: bool) -> IrrepLabel {
    match (m_odd, n_odd) {
        (false, false) => IrrepLabel::A1,
        (true, true) => IrrepLabel::A2,
        (true, false) => IrrepLabel::B1,
        (false, true) => IrrepLabel::B2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rint;

    fn mono(m: u32, n: u32) -> PolyGauss {
        PolyGauss::monomial(m, n, rint(1)).unwrap()
    }

    #[test]
    fn character_tables_are_valid() {
        for name in [GroupName::C4v, GroupName::C2v] {
            let g = group_data(name);
            let h = g.order() as i64;
            // order = sum of squared dimensions
            let sum_sq: i64 = g.irreps.iter().map(|ir| i64::from(ir.dimension).pow(2)).sum();
            assert_eq!(sum_sq, h);
            for ir in &g.irreps {
                assert_eq!(ir.characters[&OpName::E], i64::from(ir.dimension));
            }
            // row orthogonality
            for s in &g.irreps {
                for t in &g.irreps {
                    let dot: i64 = g
                        .ops
                        .iter()
                        .map(|op| s.characters[&op.name] * t.characters[&op.name])
                        .sum();
                    assert_eq!(dot, if s.label == t.label { h } else { 0 });
                }
            }
        }
    }

    #[test]
    fn ops_closed_under_composition() {
        for name in [GroupName::C4v, GroupName::C2v] {
            let g = group_data(name);
            for a in &g.ops {
                assert!(a.is_signed_permutation());
                for b in &g.ops {
                    let prod = GroupOp::compose_matrix(a.matrix, b.matrix);
                    assert!(
                        g.ops.iter().any(|c| c.matrix == prod),
                        "{:?}*{:?} escapes the group",
                        a.name,
                        b.name
                    );
                }
            }
        }
    }

    #[test]
    fn c4_action_on_monomials() {
        let g = group_data(GroupName::C4v);
        let c4 = g.ops.iter().find(|op| op.name == OpName::C4).unwrap();
        // (U f)(x,y) = f(Mᵀ(x,y)) = f(−y, x) for C4: x²y ↦ (−y)²·x = xy²
        let got = c4.apply(&mono(2, 1));
        assert_eq!(got, mono(1, 2));
        // x ↦ −y
        let got = c4.apply(&mono(1, 0));
        assert_eq!(got, mono(0, 1).scale(&rint(-1)));
        let sd1 = g.ops.iter().find(|op| op.name == OpName::Sd1).unwrap();
        assert_eq!(sd1.apply(&mono(1, 0)), mono(0, 1));
    }

    #[test]
    fn projection_of_x_squared() {
        let g = group_data(GroupName::C4v);
        let f = mono(2, 0);
        let a1 = project(g.irrep(IrrepLabel::A1).unwrap(), &g, &f);
        let want = PolyGauss::from_coeffs(rint(1), [((2, 0), rat(1, 2)), ((0, 2), rat(1, 2))]).unwrap();
        assert_eq!(a1, want);
        let a2 = project(g.irrep(IrrepLabel::A2).unwrap(), &g, &f);
        assert!(a2.is_zero());
        let b1 = project(g.irrep(IrrepLabel::B1).unwrap(), &g, &f);
        let want = PolyGauss::from_coeffs(rint(1), [((2, 0), rat(1, 2)), ((0, 2), rat(-1, 2))]).unwrap();
        assert_eq!(b1, want);
    }

    #[test]
    fn projectors_idempotent_annihilating_complete() {
        for name in [GroupName::C4v, GroupName::C2v] {
            let g = group_data(name);
            for m in 0..=8u32 {
                for n in 0..=(8 - m) {
                    let f = mono(m, n);
                    let mut total = PolyGauss::zero(rint(1)).unwrap();
                    for s in &g.irreps {
                        let pf = project(s, &g, &f);
                        assert_eq!(project(s, &g, &pf), pf, "idempotency {} {}{}", s.label, m, n);
                        for t in &g.irreps {
                            if t.label != s.label {
                                assert!(
                                    project(t, &g, &pf).is_zero(),
                                    "annihilation {}->{} on x^{}y^{}",
                                    s.label,
                                    t.label,
                                    m,
                                    n
                                );
                            }
                        }
                        total = total.add(&pf).unwrap();
                    }
                    assert_eq!(total, f, "resolution of identity on x^{}y^{}", m, n);
                }
            }
        }
    }

    #[test]
    fn operations_are_isometries() {
        let g = group_data(GroupName::C4v);
        let f = PolyGauss::from_coeffs(rint(1), [((2, 1), rat(2, 3)), ((0, 3), rat(-1, 2))]).unwrap();
        let gfun = PolyGauss::from_coeffs(rint(1), [((1, 1), rint(1)), ((4, 0), rat(1, 5))]).unwrap();
        let want = f.inner_product(&gfun);
        for op in &g.ops {
            assert_eq!(op.apply(&f).inner_product(&op.apply(&gfun)), want);
            assert_eq!(op.apply(&f).integrate(), f.integrate());
        }
    }

    #[test]
    fn classify_cases() {
        assert_eq!(classify_potential(&rint(1), &rint(1), &rint(1)), CaseKind::Case1);
        assert_eq!(classify_potential(&rint(0), &rint(0), &rint(1)), CaseKind::Case2);
        assert_eq!(classify_potential(&rint(1), &rint(2), &rint(1)), CaseKind::Case3);
        assert_eq!(classify_potential(&rint(1), &rint(1), &rint(0)), CaseKind::Case0);
        assert_eq!(classify_potential(&rint(1), &rint(2), &rint(0)), CaseKind::Case0);
        assert_eq!(group_for_params(&rint(1), &rint(1)), GroupName::C4v);
        assert_eq!(group_for_params(&rint(1), &rint(2)), GroupName::C2v);
    }

    #[test]
    fn irrep_content_counts() {
        use IrrepLabel::*;
        let c3 = expected_irrep_content(3, GroupName::C4v);
        assert_eq!(c3, BTreeMap::from([(E, 2)]));
        let c2 = expected_irrep_content(2, GroupName::C4v);
        assert_eq!(c2, BTreeMap::from([(A1, 1), (B1, 1), (B2, 1)]));
        let c4 = expected_irrep_content(4, GroupName::C4v);
        assert_eq!(c4, BTreeMap::from([(A1, 2), (B1, 1), (A2, 1), (B2, 1)]));
        let v2 = expected_irrep_content(2, GroupName::C2v);
        assert_eq!(v2, BTreeMap::from([(A1, 2), (A2, 1)]));
        // dimension-weighted count is N+1
        for name in [GroupName::C4v, GroupName::C2v] {
            let g = group_data(name);
            for n in 0..=10u32 {
                let content = expected_irrep_content(n, name);
                let total: u32 = content
                    .iter()
                    .map(|(label, count)| count * g.irrep(*label).unwrap().dimension)
                    .sum();
                assert_eq!(total, n + 1, "{} N={}", name, n);
            }
        }
    }
}
