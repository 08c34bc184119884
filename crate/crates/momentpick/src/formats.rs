//! Scenario, functional, experiment-spec and constraint-document formats.

use std::fmt::Write as _;
use std::path::Path;

use momentpick_core::experiments::ExperimentSpec;
use momentpick_core::sdp::BellFunctional;
use momentpick_core::{count_unique, CountConvention, EqualityPartition, LevelSpec, Monomial, Scenario};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Invalid(String),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
}

impl From<momentpick_core::Error> for FormatError {
    fn from(e: momentpick_core::Error) -> Self {
        FormatError::Invalid(e.to_string())
    }
}

pub fn read_file(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

/// `{"parties": 2, "outcomes": [[2, 2], [2, 2]]}`: outcome counts per party
/// and setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub parties: usize,
    pub outcomes: Vec<Vec<usize>>,
}

impl ScenarioFile {
    pub fn into_scenario(self) -> Result<Scenario, FormatError> {
        if self.parties != self.outcomes.len() {
            return Err(FormatError::Invalid(format!(
                "scenario declares {} parties but lists outcomes for {}",
                self.parties,
                self.outcomes.len()
            )));
        }
        Ok(Scenario::new(self.outcomes)?)
    }
}

/// `chsh`, `3322`, `X,Y:A,B` or a path to a scenario file.
pub fn parse_scenario(arg: &str) -> Result<Scenario, FormatError> {
    match arg {
        "chsh" => return Ok(Scenario::chsh()),
        "3322" => return Ok(Scenario::bipartite(3, 3, 2, 2)?),
        _ => {}
    }
    if let Some((settings, outcomes)) = arg.split_once(':') {
        let nums = |s: &str| -> Option<(usize, usize)> {
            let (a, b) = s.split_once(',')?;
            Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
        };
        if let (Some((x, y)), Some((a, b))) = (nums(settings), nums(outcomes)) {
            return Ok(Scenario::bipartite(x, y, a, b)?);
        }
        if !Path::new(arg).exists() {
            return Err(FormatError::Invalid(format!("malformed scenario {arg:?}: expected X,Y:A,B")));
        }
    }
    let text = read_file(Path::new(arg))?;
    let file: ScenarioFile = serde_json::from_str(&text).map_err(|e| FormatError::Invalid(format!("{arg}: {e}")))?;
    file.into_scenario()
}

/// One functional term; settings are 0-based, outcomes 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalTerm {
    pub x: usize,
    pub y: usize,
    pub a: usize,
    pub b: usize,
    pub c: f64,
}

/// `chsh` (correlator form) or a JSON array of [`FunctionalTerm`]s.
pub fn parse_functional(arg: &str, scenario: &Scenario) -> Result<BellFunctional, FormatError> {
    if arg == "chsh" {
        return Ok(BellFunctional::chsh_correlator());
    }
    if arg == "zero" {
        return Ok(BellFunctional::new(scenario.clone())?);
    }
    let text = read_file(Path::new(arg))?;
    functional_from_json(&text, scenario)
}

pub fn functional_from_json(text: &str, scenario: &Scenario) -> Result<BellFunctional, FormatError> {
    let terms: Vec<FunctionalTerm> =
        serde_json::from_str(text).map_err(|e| FormatError::Invalid(format!("functional: {e}")))?;
    let mut f = BellFunctional::new(scenario.clone())?;
    for t in terms {
        if t.a == 0 || t.b == 0 {
            return Err(FormatError::Invalid(format!("outcome labels are 1-based, got a={} b={}", t.a, t.b)));
        }
        f.add(t.x, t.y, t.a - 1, t.b - 1, t.c)?;
    }
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentMode {
    /// Random block pairs per trial.
    Generated,
    /// The fixed homogeneous pair at rank 1, expected to agree every time.
    Homogeneous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub spec: ExperimentSpec,
    pub mode: ExperimentMode,
}

/// Whitespace table `l1 l2 mnip r d runs tol seed [mode]`; `#` starts a
/// comment. `mode` is `generated` (default) or `homogeneous`.
pub fn parse_experiment_spec(text: &str) -> Result<Vec<ExperimentRow>, FormatError> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| FormatError::Line { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let f: Vec<&str> = content.split_whitespace().collect();
        if !(8..=9).contains(&f.len()) {
            return Err(err(format!(
                "expected 8 or 9 columns (l1 l2 mnip r d runs tol seed [mode]), found {}",
                f.len()
            )));
        }
        let int = |i: usize, name: &str| -> Result<usize, FormatError> {
            f[i].replace('_', "")
                .parse()
                .map_err(|_| err(format!("{name} must be a non-negative integer, found {:?}", f[i])))
        };
        let spec = ExperimentSpec {
            len1: int(0, "l1")?,
            len2: int(1, "l2")?,
            mnip: int(2, "mnip")?,
            rank: int(3, "r")?,
            dim: int(4, "d")?,
            runs: int(5, "runs")?,
            tol: f[6].parse().map_err(|_| err(format!("tol must be a number, found {:?}", f[6])))?,
            seed: f[7].parse().map_err(|_| err(format!("seed must be an unsigned integer, found {:?}", f[7])))?,
        };
        let mode = match f.get(8).copied() {
            None | Some("generated") => ExperimentMode::Generated,
            Some("homogeneous") => ExperimentMode::Homogeneous,
            Some(other) => return Err(err(format!("unknown mode {other:?}"))),
        };
        spec.validate().map_err(|e| err(e.to_string()))?;
        rows.push(ExperimentRow { spec, mode });
    }
    if rows.is_empty() {
        return Err(FormatError::Invalid("experiment spec has no rows".into()));
    }
    Ok(rows)
}

pub const CONSTRAINTS_SCHEMA: &str = "momentpick.constraints/1";

/// How a partition was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Source {
    Algebraic,
    Sampled { rank: usize, samples: usize, seed: u64, tol_eq: f64, tol_zero: f64 },
}

/// Everything needed to rebuild an SDP from a partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintDocument {
    pub schema: String,
    pub outcomes: Vec<Vec<usize>>,
    pub level: String,
    pub source: Source,
    pub basis: Vec<String>,
    pub num_classes: usize,
    pub unit_class: u32,
    pub zero_class: Option<u32>,
    pub conjugate: Vec<u32>,
    /// `[row, col, class]` for every cell outside the ZERO class, row-major.
    pub cells: Vec<[u32; 3]>,
    /// Count under the default convention.
    pub classes: usize,
    pub counts: Counts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub all: usize,
    pub nonzero: usize,
    pub nonzero_nonunit: usize,
    pub conjugate_merged: usize,
}

impl ConstraintDocument {
    pub fn new(
        scenario: &Scenario,
        level: &LevelSpec,
        source: Source,
        basis: &[Monomial],
        p: &EqualityPartition,
        convention: CountConvention,
    ) -> Self {
        let n = p.basis_size();
        let cells = p
            .cells()
            .iter()
            .enumerate()
            .filter(|&(_, &c)| Some(c) != p.zero_class())
            .map(|(k, &c)| [(k / n) as u32, (k % n) as u32, c])
            .collect();
        ConstraintDocument {
            schema: CONSTRAINTS_SCHEMA.into(),
            outcomes: scenario.outcome_table().to_vec(),
            level: level.to_string(),
            source,
            basis: basis.iter().map(|m| m.to_string()).collect(),
            num_classes: p.num_classes(),
            unit_class: p.unit_class(),
            zero_class: p.zero_class(),
            conjugate: p.conjugate_pairing().to_vec(),
            cells,
            classes: count_unique(p, convention),
            counts: Counts {
                all: count_unique(p, CountConvention::AllClasses),
                nonzero: count_unique(p, CountConvention::NonZero),
                nonzero_nonunit: count_unique(p, CountConvention::NonZeroNonUnit),
                conjugate_merged: count_unique(p, CountConvention::ConjugateMerged),
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        let doc: ConstraintDocument =
            serde_json::from_str(text).map_err(|e| FormatError::Invalid(format!("constraint document: {e}")))?;
        if doc.schema != CONSTRAINTS_SCHEMA {
            return Err(FormatError::Invalid(format!("unsupported schema {:?}", doc.schema)));
        }
        Ok(doc)
    }

    /// Line-oriented rendering of the same content.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
        writeln!(s, "schema {}", self.schema).unwrap();
        let outcomes: Vec<String> =
            self.outcomes.iter().map(|p| p.iter().map(usize::to_string).collect::<Vec<_>>().join(",")).collect();
        writeln!(s, "scenario {}", outcomes.join(";")).unwrap();
        writeln!(s, "level {}", self.level).unwrap();
        match &self.source {
            Source::Algebraic => writeln!(s, "source algebraic").unwrap(),
            Source::Sampled { rank, samples, seed, tol_eq, tol_zero } => writeln!(
                s,
                "source sampled rank={rank} samples={samples} seed={seed} tol_eq={tol_eq:e} tol_zero={tol_zero:e}"
            )
            .unwrap(),
        }
        writeln!(s, "basis {}", self.basis.len()).unwrap();
        for (i, b) in self.basis.iter().enumerate() {
            writeln!(s, "{i} {b}").unwrap();
        }
        writeln!(s, "num_classes {}", self.num_classes).unwrap();
        writeln!(s, "unit {}", self.unit_class).unwrap();
        match self.zero_class {
            Some(z) => writeln!(s, "zero {z}").unwrap(),
            None => writeln!(s, "zero none").unwrap(),
        }
        writeln!(s, "conjugate {}", join(&self.conjugate)).unwrap();
        let c = &self.counts;
        writeln!(
            s,
            "counts all={} nonzero={} nonzero-nonunit={} conjugate-merged={}",
            c.all, c.nonzero, c.nonzero_nonunit, c.conjugate_merged
        )
        .unwrap();
        writeln!(s, "cells {}", self.cells.len()).unwrap();
        for [r, col, class] in &self.cells {
            writeln!(s, "{r} {col} {class}").unwrap();
        }
        s
    }
}
