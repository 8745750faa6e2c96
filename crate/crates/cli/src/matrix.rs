//! Run matrices: a template configuration expanded into labelled optimizer
//! variants, executed in parallel, with a comparison CSV joining their
//! metrics on the epoch or iteration column.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::data::Dataset;
use crate::error::{CliError, CliResult};
use crate::experiment::{run_experiment, RunSummary};
use crate::output::{fmt_opt, CsvOut, CsvTable};

/// One optimizer setting of a matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variant {
    pub label: &'static str,
    pub optimizer: &'static str,
    pub alpha: f64,
    pub eta: Option<f64>,
    pub beta1: Option<f64>,
    pub lambda: Option<f64>,
}

const fn constant(label: &'static str, optimizer: &'static str, alpha: f64, beta1: f64) -> Variant {
    Variant { label, optimizer, alpha, eta: None, beta1: Some(beta1), lambda: None }
}

/// `αₙ = α₀/√n`; `lambda = None` for the momentum-free optimizers.
const fn diminishing(label: &'static str, optimizer: &'static str, alpha0: f64, lambda: Option<f64>) -> Variant {
    let beta1 = if lambda.is_none() { Some(0.0) } else { None };
    Variant { label, optimizer, alpha: alpha0, eta: Some(0.5), beta1, lambda }
}

/// The ten constant-rate settings of the embedding comparison.
pub const CONSTANT_PAPER: [Variant; 10] = [
    constant("CS1", "rsgd", 0.3, 0.0),
    constant("CS2", "rsgd", 0.1, 0.0),
    constant("CG1", "radagrad", 0.3, 0.0),
    constant("CG2", "radagrad", 0.1, 0.0),
    constant("CD1", "radam", 0.3, 0.9),
    constant("CD2", "radam", 0.1, 0.9),
    constant("CA1", "ramsgrad", 0.3, 0.9),
    constant("CA2", "ramsgrad", 0.3, 0.001),
    constant("CA3", "ramsgrad", 0.1, 0.9),
    constant("CA4", "ramsgrad", 0.1, 0.001),
];

/// The ten diminishing-rate settings (`α₀ ∈ {30, 10}`, `η = ½`).
pub const DIMINISHING_PAPER: [Variant; 10] = [
    diminishing("DS1", "rsgd", 30.0, None),
    diminishing("DS2", "rsgd", 10.0, None),
    diminishing("DG1", "radagrad", 30.0, None),
    diminishing("DG2", "radagrad", 10.0, None),
    diminishing("DD1", "radam", 30.0, Some(0.5)),
    diminishing("DD2", "radam", 10.0, Some(0.5)),
    diminishing("DA1", "ramsgrad", 30.0, Some(0.5)),
    diminishing("DA2", "ramsgrad", 30.0, Some(0.9)),
    diminishing("DA3", "ramsgrad", 10.0, Some(0.5)),
    diminishing("DA4", "ramsgrad", 10.0, Some(0.9)),
];

pub const BUILTIN: [&str; 2] = ["constant-paper", "diminishing-paper"];

pub fn builtin(name: &str) -> CliResult<Vec<Variant>> {
    match name {
        "constant-paper" => Ok(CONSTANT_PAPER.to_vec()),
        "diminishing-paper" => Ok(DIMINISHING_PAPER.to_vec()),
        _ => Err(CliError::Config(format!("unknown matrix {name:?}; expected one of {}", BUILTIN.join(", ")))),
    }
}

/// Keeps only the labels in `only` (comma-separated), in matrix order.
pub fn select(variants: Vec<Variant>, only: Option<&str>) -> CliResult<Vec<Variant>> {
    let Some(only) = only else { return Ok(variants) };
    let wanted: Vec<&str> = only.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if let Some(bad) = wanted.iter().find(|w| !variants.iter().any(|v| v.label.eq_ignore_ascii_case(w))) {
        return Err(CliError::Config(format!("no variant labelled {bad:?} in this matrix")));
    }
    let out: Vec<Variant> =
        variants.into_iter().filter(|v| wanted.iter().any(|w| v.label.eq_ignore_ascii_case(w))).collect();
    if out.is_empty() {
        return Err(CliError::Config("--only selects no variants".into()));
    }
    Ok(out)
}

/// The template with a variant's optimizer settings and output
/// subdirectory. The built-in diminishing settings with momentum break the
/// monotonicity hypotheses at `n = 2`; matrices reproduce them as published,
/// so violations are tolerated and noted rather than fatal.
pub fn variant_config(template: &ExperimentConfig, v: &Variant) -> CliResult<(ExperimentConfig, Option<String>)> {
    let cfg = ExperimentConfig {
        optimizer: v.optimizer.into(),
        alpha: v.alpha,
        eta: v.eta,
        beta1: v.beta1,
        lambda: v.lambda,
        out_dir: template.out_dir.join(v.label),
        allow_hypothesis_violation: true,
        ..template.clone()
    };
    cfg.schedule().validate().map_err(CliError::config)?;
    let note = cfg.hypothesis_check()?;
    Ok((cfg, note))
}

#[derive(Debug)]
pub struct VariantOutcome {
    pub variant: Variant,
    pub note: Option<String>,
    pub result: CliResult<RunSummary>,
}

pub fn run_matrix(template: &ExperimentConfig, variants: &[Variant], data: &Dataset) -> CliResult<Vec<VariantOutcome>> {
    if variants.is_empty() {
        return Err(CliError::Config("a matrix needs at least one variant".into()));
    }
    let outcomes: Vec<VariantOutcome> = variants
        .par_iter()
        .map(|v| match variant_config(template, v) {
            Ok((cfg, note)) => VariantOutcome { variant: *v, note, result: run_experiment(&cfg, data) },
            Err(e) => VariantOutcome { variant: *v, note: None, result: Err(e) },
        })
        .collect();
    std::fs::create_dir_all(&template.out_dir).map_err(|e| CliError::io(&template.out_dir, e))?;
    write_variants(&template.out_dir.join("variants.csv"), &outcomes)?;
    write_comparison(&template.out_dir.join("comparison.csv"), template.task.name(), &outcomes)?;
    Ok(outcomes)
}

fn write_variants(path: &Path, outcomes: &[VariantOutcome]) -> CliResult<()> {
    let mut w = CsvOut::create(
        path,
        "matrix-variants",
        &["label", "optimizer", "alpha", "eta", "beta1", "lambda", "status", "note"],
    )?;
    for o in outcomes {
        let v = &o.variant;
        let (status, note) = match &o.result {
            Ok(_) => ("ok", o.note.clone().unwrap_or_default()),
            Err(e) => ("failed", e.to_string()),
        };
        w.row([
            v.label.to_string(),
            v.optimizer.to_string(),
            v.alpha.to_string(),
            fmt_opt(v.eta),
            fmt_opt(v.beta1),
            fmt_opt(v.lambda),
            status.to_string(),
            note,
        ])?;
    }
    w.finish()
}

/// Outer join of every successful variant's metrics on the first column;
/// other columns become `<label>.<column>`.
fn write_comparison(path: &Path, task: &str, outcomes: &[VariantOutcome]) -> CliResult<()> {
    let mut tables = Vec::new();
    for o in outcomes {
        if let Ok(s) = &o.result {
            tables.push((o.variant.label, CsvTable::read(&s.out_dir.join("metrics.csv"))?));
        }
    }
    let key = tables.first().map_or("step".to_string(), |(_, t)| t.header[0].clone());
    let mut header = vec![key];
    let mut joined: BTreeMap<u64, Vec<String>> = BTreeMap::new();
    let mut offset = 0;
    for (label, t) in &tables {
        let width = t.header.len() - 1;
        header.extend(t.header[1..].iter().map(|h| format!("{label}.{h}")));
        for row in &t.rows {
            let k: u64 = row[0].parse().map_err(|_| CliError::Runtime(format!("non-integer key {:?}", row[0])))?;
            let cells = joined.entry(k).or_default();
            cells.resize(offset, String::new());
            cells.extend(row[1..].iter().cloned());
        }
        offset += width;
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut w = CsvOut::create(path, &format!("comparison-{task}"), &header)?;
    for (k, mut cells) in joined {
        cells.resize(offset, String::new());
        w.row(std::iter::once(k.to_string()).chain(cells))?;
    }
    w.finish()
}
