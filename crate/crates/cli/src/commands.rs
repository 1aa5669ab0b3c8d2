//! Subcommand implementations. Each returns the rendered output text or a
//! failure carrying its exit-code class.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use aho2d_core::krylovrr::{rr_eigenvalues, rr_eigenvalues_for, HpReal, KrylovConfig, KrylovError};
use aho2d_core::momentpt::{
    coupled_first_order, solve_series, state_multiplicity, MptError, StateSpec,
};
use aho2d_core::polygauss::PotentialParams;
use aho2d_core::quadnum::QuadraticNumber;
use aho2d_core::spectrumpt::{
    first_order_levels, label_map, FirstOrderE1, LabelRow, Literature, PartnerParity,
};
use aho2d_core::symcore::{
    classify_potential, expected_irrep_content, group_data, group_for_params, CaseKind,
    GroupName, IrrepLabel,
};
use aho2d_core::{rint, Rat};
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{LevelSelection, OutFormat, RunConfig, SweepSpec};
use crate::exact::{dec30, f64_of, surd_compact};

/// Failure classes map to exit codes: usage 2, method scope 3, numerical 4.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Scope(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Scope(_) => 3,
            Failure::Numerical(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Scope(m) | Failure::Numerical(m) => m,
        }
    }
}

fn krylov_failure(err: KrylovError) -> Failure {
    match err {
        KrylovError::InvalidConfig(_) => Failure::Usage(err.to_string()),
        KrylovError::OverlapNotPositive | KrylovError::PrecisionExhausted(_) => {
            Failure::Numerical(err.to_string())
        }
        KrylovError::IrrepNotInGroup(..) | KrylovError::UnboundedPotential => {
            Failure::Scope(err.to_string())
        }
    }
}

fn mpt_failure(err: MptError) -> Failure {
    Failure::Scope(err.to_string())
}

/// Exact-plus-double rendering of one rational quantity.
#[derive(Serialize)]
struct ExactFloat {
    exact: String,
    float: f64,
}

impl ExactFloat {
    fn of(r: &Rat) -> Self {
        ExactFloat { exact: r.to_string(), float: f64_of(r) }
    }
}

// ---------------------------------------------------------------- classify

pub fn cmd_classify(cfg: &RunConfig) -> Result<String, Failure> {
    let case = classify_potential(&cfg.a, &cfg.b, &cfg.c);
    let group = group_for_params(&cfg.a, &cfg.b);
    let short = match case {
        CaseKind::Case0 => "Case 0 (separable)",
        CaseKind::Case1 => "Case 1",
        CaseKind::Case2 => "Case 2",
        CaseKind::Case3 => "Case 3",
    };
    let data = group_data(group);
    let inventory = data
        .irreps
        .iter()
        .map(|ir| format!("{} (dim {})", ir.label, ir.dimension))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(format!("{short}, group {group}\nirreps: {inventory}\n"))
}

// --------------------------------------------------------------------- pt1

#[derive(Serialize)]
struct Pt1Row {
    label: String,
    n: u32,
    irrep: String,
    e0: ExactFloat,
    e1_exact: Option<String>,
    e1_float: f64,
}

fn e1_exact_string(e1: &FirstOrderE1) -> String {
    match e1.exact() {
        Some(q) => q.to_string(),
        None => format!("~{}", e1.to_f64()),
    }
}

fn e1_compact_string(e1: &FirstOrderE1) -> String {
    match e1.exact() {
        Some(q) => surd_compact(q),
        None => format!("~{}", e1.to_f64()),
    }
}

pub fn cmd_pt1(cfg: &RunConfig) -> Result<String, Failure> {
    let levels = first_order_levels(&cfg.a, &cfg.b, &cfg.c, cfg.nmax);
    Ok(match cfg.format {
        OutFormat::Text => {
            let mut s = String::new();
            for lv in &levels {
                writeln!(s, "{}, {}, {}", lv.label, lv.e0, e1_compact_string(&lv.e1)).unwrap();
            }
            s
        }
        OutFormat::Csv => {
            let mut s = String::from("label,n,irrep,e0,e1\n");
            for lv in &levels {
                writeln!(
                    s,
                    "{},{},{},{},{}",
                    lv.label,
                    lv.n,
                    lv.irrep,
                    lv.e0,
                    e1_exact_string(&lv.e1)
                )
                .unwrap();
            }
            s
        }
        OutFormat::Json => {
            let rows: Vec<Pt1Row> = levels
                .iter()
                .map(|lv| Pt1Row {
                    label: lv.label.clone(),
                    n: lv.n,
                    irrep: lv.irrep.to_string(),
                    e0: ExactFloat::of(&lv.e0),
                    e1_exact: lv.e1.exact().map(|q| q.to_string()),
                    e1_float: lv.e1.to_f64(),
                })
                .collect();
            to_json(&rows)
        }
    })
}

// --------------------------------------------------------------------- mpt

/// "2E" -> (2, E). The index counts appearances of the irrep from N = 0 up.
pub fn parse_state_label(s: &str) -> Result<(u32, IrrepLabel), Failure> {
    let bad = || Failure::Usage(format!("state label must look like 1A1 or 2E, got {s:?}"));
    let split = s.find(|ch: char| ch.is_ascii_alphabetic()).ok_or_else(bad)?;
    let (digits, irrep_text) = s.split_at(split);
    let j: u32 = digits.parse().map_err(|_| bad())?;
    if j == 0 {
        return Err(Failure::Usage(format!(
            "state index counts appearances from 1, got {s:?}"
        )));
    }
    let irrep: IrrepLabel = irrep_text.parse().map_err(|_| {
        Failure::Usage(format!("unknown irrep {irrep_text:?} in state label {s:?}"))
    })?;
    Ok((j, irrep))
}

/// Level N holding the j-th appearance of the irrep in the group.
fn level_of_appearance(j: u32, irrep: IrrepLabel, group: GroupName) -> Result<u32, Failure> {
    if group == GroupName::C2v && irrep == IrrepLabel::E {
        return Err(Failure::Scope(format!(
            "irrep {irrep} does not occur in group {group}"
        )));
    }
    let mut remaining = j;
    for n in 0.. {
        let m = expected_irrep_content(n, group)
            .get(&irrep)
            .copied()
            .unwrap_or(0);
        if remaining <= m {
            return Ok(n);
        }
        remaining -= m;
    }
    unreachable!("every irrep of the group recurs indefinitely");
}

#[derive(Serialize)]
struct MptCoefficient {
    p: u32,
    exact: String,
    float: f64,
}

#[derive(Serialize)]
struct MptReport {
    label: String,
    n: u32,
    irrep: String,
    group: String,
    coefficients: Vec<MptCoefficient>,
    #[serde(skip_serializing_if = "Option::is_none")]
    partial_sum: Option<MptPartialSum>,
}

#[derive(Serialize)]
struct MptPartialSum {
    lambda: ExactFloat,
    exact: String,
    float: f64,
}

/// Exact series terms: all rational, or rational E0 plus a quadratic E1.
enum SeriesTerms {
    Rational(Vec<Rat>),
    Pair { e0: Rat, e1: QuadraticNumber },
}

pub fn cmd_mpt(cfg: &RunConfig) -> Result<String, Failure> {
    let state_text = cfg.state.as_deref().expect("clap requires --state");
    let (j, irrep) = parse_state_label(state_text)?;
    let group = group_for_params(&cfg.a, &cfg.b);
    let n = level_of_appearance(j, irrep, group)?;
    let spec = StateSpec { group, irrep, n };
    let nu = state_multiplicity(&spec).map_err(mpt_failure)?;

    if nu >= 2 && cfg.order > 1 {
        return Err(Failure::Scope(
            "coupled pair beyond first order: unsupported".to_string(),
        ));
    }

    let terms = if nu == 1 {
        let (series, _) = solve_series(&spec, &cfg.a, &cfg.b, &cfg.c, cfg.order)
            .map_err(mpt_failure)?;
        debug_assert_eq!(series.label, state_text);
        SeriesTerms::Rational(series.coefficients)
    } else if cfg.order == 0 {
        SeriesTerms::Rational(vec![rint(2 * (i64::from(n) + 1))])
    } else {
        let (lo, hi) = coupled_first_order(&spec, &cfg.a, &cfg.b, &cfg.c)
            .map_err(mpt_failure)?;
        let root = if lo.label == state_text {
            lo
        } else if hi.label == state_text {
            hi
        } else {
            return Err(Failure::Scope(format!(
                "state {state_text} is not one of the coupled-pair roots ({}, {})",
                lo.label, hi.label
            )));
        };
        SeriesTerms::Pair { e0: rint(2 * (i64::from(n) + 1)), e1: root.e1 }
    };

    // Exact partial sum at the supplied lambda, if any.
    let partial = cfg.lambda.as_ref().map(|lambda| {
        let sum = match &terms {
            SeriesTerms::Rational(coeffs) => {
                let mut acc = Rat::zero();
                for c in coeffs.iter().rev() {
                    acc = acc * lambda + c;
                }
                QuadraticNumber::from_rational(acc)
            }
            SeriesTerms::Pair { e0, e1 } => e1.scale(lambda).add_rational(e0),
        };
        (lambda.clone(), sum)
    });

    let exact_terms: Vec<(u32, String, String, f64)> = match &terms {
        SeriesTerms::Rational(coeffs) => coeffs
            .iter()
            .enumerate()
            .map(|(p, c)| (p as u32, c.to_string(), c.to_string(), f64_of(c)))
            .collect(),
        SeriesTerms::Pair { e0, e1 } => vec![
            (0, e0.to_string(), e0.to_string(), f64_of(e0)),
            (
                1,
                e1.to_string(),
                surd_compact(e1),
                e1.to_f64(),
            ),
        ],
    };

    Ok(match cfg.format {
        OutFormat::Text => {
            let mut s = format!("state {state_text}: level N={n}, irrep {irrep}, group {group}\n");
            for (p, _, compact, _) in &exact_terms {
                writeln!(s, "E({p}) = {compact}").unwrap();
            }
            if let Some((lambda, sum)) = &partial {
                let decimal = dec30(&sum.approximate(192));
                writeln!(s, "sum at lambda = {lambda}: {decimal}").unwrap();
            }
            s
        }
        OutFormat::Csv => {
            let mut s = String::from("p,coefficient\n");
            for (p, exact, _, _) in &exact_terms {
                writeln!(s, "{p},{exact}").unwrap();
            }
            s
        }
        OutFormat::Json => {
            let report = MptReport {
                label: state_text.to_string(),
                n,
                irrep: irrep.to_string(),
                group: group.to_string(),
                coefficients: exact_terms
                    .iter()
                    .map(|(p, exact, _, float)| MptCoefficient {
                        p: *p,
                        exact: exact.clone(),
                        float: *float,
                    })
                    .collect(),
                partial_sum: partial.as_ref().map(|(lambda, sum)| MptPartialSum {
                    lambda: ExactFloat::of(lambda),
                    exact: sum.to_string(),
                    float: sum.to_f64(),
                }),
            };
            to_json(&report)
        }
    })
}

// ---------------------------------------------------------------------- rr

#[derive(Serialize)]
struct RrReport {
    irrep: String,
    lambda: ExactFloat,
    k: usize,
    k_used: usize,
    precision_bits: usize,
    eigenvalues: Vec<RrValue>,
    convergence_estimate: Vec<f64>,
}

#[derive(Serialize)]
struct RrValue {
    decimal: String,
    float: f64,
}

fn krylov_config(cfg: &RunConfig, irrep: IrrepLabel, lambda: Rat) -> KrylovConfig {
    let params = PotentialParams::new(cfg.a.clone(), cfg.b.clone(), cfg.c.clone(), lambda);
    let mut kc = KrylovConfig::new(irrep, params);
    kc.k = cfg.krylov;
    kc.alpha = cfg.alpha.clone();
    kc.precision_bits = cfg.precision_bits;
    kc
}

pub fn cmd_rr(cfg: &RunConfig) -> Result<String, Failure> {
    let irrep = cfg.irrep.expect("clap requires --irrep");
    let lambda = cfg.lambda.clone().unwrap_or_else(Rat::zero);
    let kc = krylov_config(cfg, irrep, lambda.clone());
    let result = rr_eigenvalues(&kc).map_err(krylov_failure)?;

    Ok(match cfg.format {
        OutFormat::Text => {
            let mut s = format!(
                "irrep {irrep}, lambda {lambda}, K {} (rank {}), {} starting bits\n",
                kc.k, result.k_used, kc.precision_bits
            );
            for (i, (value, est)) in result
                .eigenvalues
                .iter()
                .zip(&result.convergence_estimate)
                .enumerate()
            {
                writeln!(s, "E[{i}] = {}  [dK {est:e}]", dec30(value.as_rational())).unwrap();
            }
            s
        }
        OutFormat::Csv => {
            let mut s = String::from("index,energy,delta_k\n");
            for (i, (value, est)) in result
                .eigenvalues
                .iter()
                .zip(&result.convergence_estimate)
                .enumerate()
            {
                writeln!(s, "{i},{},{est:e}", dec30(value.as_rational())).unwrap();
            }
            s
        }
        OutFormat::Json => {
            let report = RrReport {
                irrep: irrep.to_string(),
                lambda: ExactFloat::of(&lambda),
                k: kc.k,
                k_used: result.k_used,
                precision_bits: kc.precision_bits,
                eigenvalues: result
                    .eigenvalues
                    .iter()
                    .map(|v| RrValue {
                        decimal: dec30(v.as_rational()),
                        float: v.to_f64(),
                    })
                    .collect(),
                convergence_estimate: result.convergence_estimate.clone(),
            };
            to_json(&report)
        }
    })
}

// ------------------------------------------------------------------- sweep

struct TrackedRow {
    n: u32,
    label: String,
    irrep: IrrepLabel,
    /// Reference-partner index feeding this row (E rows split eo/oe).
    partner: usize,
    /// Index into the sector's ascending Ritz list.
    rank: usize,
    witwit: String,
}

fn witwit_text(lit: &Literature) -> String {
    match lit {
        Literature::Label(s) => (*s).to_string(),
        Literature::Omitted => "omitted".to_string(),
        Literature::Blank => String::new(),
    }
}

/// Partner order in `reference_functions` for E is [x-odd (oe), y-odd (eo)].
fn partner_index(partner: Option<PartnerParity>) -> usize {
    match partner {
        None | Some(PartnerParity::Oe) => 0,
        Some(PartnerParity::Eo) => 1,
    }
}

fn c2v_label_rows(nmax: u32) -> Vec<LabelRow> {
    let mut counters: BTreeMap<IrrepLabel, u32> = BTreeMap::new();
    let mut rows = Vec::new();
    for n in 0..=nmax {
        for (irrep, count) in expected_irrep_content(n, GroupName::C2v) {
            for _ in 0..count {
                let j = counters.entry(irrep).or_insert(0);
                *j += 1;
                rows.push(LabelRow {
                    n,
                    label: format!("{j}{irrep}"),
                    partner: None,
                    literature: Literature::Blank,
                });
            }
        }
    }
    rows
}

fn tracked_rows(group: GroupName, selection: &LevelSelection) -> Result<Vec<TrackedRow>, Failure> {
    let (nmax, wanted) = match selection {
        LevelSelection::Nmax(n) => (*n, None),
        LevelSelection::Labels(labels) => {
            if labels.is_empty() {
                return Err(Failure::Usage("no levels selected".to_string()));
            }
            let mut deepest = 0;
            for label in labels {
                let (j, irrep) = parse_state_label(label)?;
                deepest = deepest.max(level_of_appearance(j, irrep, group)?);
            }
            (deepest, Some(labels))
        }
    };
    let base = match group {
        GroupName::C4v => label_map(nmax),
        GroupName::C2v => c2v_label_rows(nmax),
    };
    let rows: Vec<TrackedRow> = base
        .into_iter()
        .filter(|row| wanted.is_none_or(|list| list.contains(&row.label)))
        .map(|row| {
            let (j, irrep) = parse_state_label(&row.label).expect("generated labels are valid");
            TrackedRow {
                n: row.n,
                label: row.label,
                irrep,
                partner: partner_index(row.partner),
                rank: (j - 1) as usize,
                witwit: witwit_text(&row.literature),
            }
        })
        .collect();
    if let Some(list) = wanted {
        for label in list {
            if !rows.iter().any(|r| r.label == *label) {
                return Err(Failure::Usage(format!("no tracked level matches {label:?}")));
            }
        }
    }
    Ok(rows)
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Serialize)]
struct SweepRow {
    lambda: ExactFloat,
    label: String,
    irrep: String,
    energy: RrValue,
    witwit_label: String,
}

pub fn cmd_sweep(cfg: &RunConfig, spec: &SweepSpec) -> Result<String, Failure> {
    let group = group_for_params(&cfg.a, &cfg.b);
    let rows = tracked_rows(group, &spec.selection)?;
    if rows.is_empty() {
        return Err(Failure::Usage("no levels selected".to_string()));
    }

    // Ritz depth needed per (irrep, partner) sector.
    let mut depth: BTreeMap<(IrrepLabel, usize), usize> = BTreeMap::new();
    for row in &rows {
        let d = depth.entry((row.irrep, row.partner)).or_insert(0);
        *d = (*d).max(row.rank + 1);
    }
    for (&(irrep, _), &d) in &depth {
        if d > cfg.krylov {
            return Err(Failure::Usage(format!(
                "krylov dimension {} cannot track {d} levels of irrep {irrep}",
                cfg.krylov
            )));
        }
    }

    let lambdas = spec.points();
    // Zero coupling is the exactly known unperturbed limit; solve the rest.
    type SectorJob = (usize, IrrepLabel, usize);
    let jobs: Vec<SectorJob> = lambdas
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.is_zero())
        .flat_map(|(li, _)| depth.keys().map(move |&(irrep, p)| (li, irrep, p)))
        .collect();
    let solved: Vec<(SectorJob, Result<Vec<HpReal>, KrylovError>)> = jobs
        .par_iter()
        .map(|&(li, irrep, partner)| {
            let kc = krylov_config(cfg, irrep, lambdas[li].clone());
            ((li, irrep, partner), rr_eigenvalues_for(&kc, partner).map(|r| r.eigenvalues))
        })
        .collect();

    let mut table: BTreeMap<SectorJob, Vec<HpReal>> = BTreeMap::new();
    for ((li, irrep, partner), outcome) in solved {
        let values = outcome.map_err(|e| {
            let inner = krylov_failure(e);
            let msg = format!("at lambda = {}: {}", lambdas[li], inner.message());
            match inner {
                Failure::Usage(_) => Failure::Usage(msg),
                Failure::Scope(_) => Failure::Scope(msg),
                Failure::Numerical(_) => Failure::Numerical(msg),
            }
        })?;
        let need = depth[&(irrep, partner)];
        if values.len() < need {
            return Err(Failure::Numerical(format!(
                "sector {irrep} retained {} of {need} tracked levels at lambda = {}",
                values.len(),
                lambdas[li]
            )));
        }
        table.insert((li, irrep, partner), values);
    }

    let energy_of = |li: usize, row: &TrackedRow| -> Rat {
        if lambdas[li].is_zero() {
            rint(2 * (i64::from(row.n) + 1))
        } else {
            table[&(li, row.irrep, row.partner)][row.rank]
                .as_rational()
                .clone()
        }
    };

    Ok(match cfg.format {
        OutFormat::Json => {
            let mut out = Vec::new();
            for (li, lambda) in lambdas.iter().enumerate() {
                for row in &rows {
                    let energy = energy_of(li, row);
                    out.push(SweepRow {
                        lambda: ExactFloat::of(lambda),
                        label: row.label.clone(),
                        irrep: row.irrep.to_string(),
                        energy: RrValue { decimal: dec30(&energy), float: f64_of(&energy) },
                        witwit_label: row.witwit.clone(),
                    });
                }
            }
            to_json(&out)
        }
        // The sweep's artifact of record is the CSV; plain text equals it.
        OutFormat::Csv | OutFormat::Text => {
            let mut s = String::from("lambda,label,irrep,energy,witwit_label\n");
            for (li, lambda) in lambdas.iter().enumerate() {
                for row in &rows {
                    writeln!(
                        s,
                        "{},{},{},{},{}",
                        dec30(lambda),
                        row.label,
                        row.irrep,
                        dec30(&energy_of(li, row)),
                        csv_field(&row.witwit)
                    )
                    .unwrap();
                }
            }
            s
        }
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}
