//! Run configuration and sweep grids, assembled from exact command-line
//! strings; every numeric field is an exact rational.

use aho2d_core::symcore::IrrepLabel;
use aho2d_core::Rat;
use num_traits::Signed;

use crate::exact::parse_exact;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutFormat {
    Text,
    Csv,
    Json,
}

/// One run's inputs: potential coefficients plus subcommand options.
/// `lambda` is `None` when the flag was not supplied.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
    pub lambda: Option<Rat>,
    pub nmax: u32,
    pub order: u32,
    pub state: Option<String>,
    pub irrep: Option<IrrepLabel>,
    pub krylov: usize,
    pub alpha: Rat,
    pub precision_bits: usize,
    pub format: OutFormat,
}

#[derive(Clone, Debug)]
pub enum LevelSelection {
    Nmax(u32),
    Labels(Vec<String>),
}

/// λ grid (inclusive, exact steps) and the set of levels to track.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    start: Rat,
    stop: Rat,
    step: Rat,
    pub selection: LevelSelection,
}

impl SweepSpec {
    pub fn new(
        start: Rat,
        stop: Rat,
        step: Rat,
        selection: LevelSelection,
    ) -> Result<Self, String> {
        if !step.is_positive() {
            return Err("sweep step must be positive".to_string());
        }
        if start > stop {
            return Err("sweep start must not exceed stop".to_string());
        }
        Ok(Self { start, stop, step, selection })
    }

    /// Grid text: a single value, or START:STOP:STEP.
    pub fn parse_grid(text: &str) -> Result<(Rat, Rat, Rat), String> {
        let parts: Vec<&str> = text.split(':').collect();
        match parts.as_slice() {
            [single] => {
                let v = parse_exact(single)?;
                Ok((v.clone(), v, aho2d_core::rint(1)))
            }
            [lo, hi, st] => Ok((parse_exact(lo)?, parse_exact(hi)?, parse_exact(st)?)),
            _ => Err(format!("expected LAMBDA or START:STOP:STEP, got {text:?}")),
        }
    }

    pub fn points(&self) -> Vec<Rat> {
        let mut out = Vec::new();
        let mut next = self.start.clone();
        while next <= self.stop {
            out.push(next.clone());
            next = &next + &self.step;
        }
        out
    }
}
