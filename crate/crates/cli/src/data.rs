//! Input datasets: edge lists and matrix CSVs from disk, or synthetic specs.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use ndarray::Array2;

use radopt_core::embed::{ingest_edges, synth, transitive_closure, RelationSet};
use radopt_core::pca::{spiked_problem, PcaProblem};
use radopt_core::toy::ToyConvex;

use crate::config::{ExperimentConfig, Task};
use crate::error::{CliError, CliResult};

pub enum Dataset {
    Relations(RelationSet),
    Matrix(PcaProblem<f64>),
    Toy(ToyConvex<f64>),
}

/// Loads the dataset a config refers to. Malformed input files are I/O
/// errors; malformed synthetic specs are configuration errors.
pub fn load_dataset(cfg: &ExperimentConfig) -> CliResult<Dataset> {
    match cfg.task {
        Task::Toy => Ok(Dataset::Toy(ToyConvex::standard(cfg.components, 2))),
        Task::Embed => {
            let raw = match (&cfg.data, &cfg.synthetic) {
                (Some(path), _) => read_edges(path)?,
                (None, Some(spec)) => synthetic_relations(spec, cfg.seed)?,
                (None, None) => unreachable!("validated config has a data source"),
            };
            Ok(Dataset::Relations(if cfg.closure { transitive_closure(&raw) } else { raw }))
        }
        Task::Pca => {
            let p = match (&cfg.data, &cfg.synthetic) {
                (Some(path), _) => {
                    let data = read_matrix(path)?;
                    PcaProblem::new(data, cfg.k).map_err(CliError::config)?
                }
                (None, Some(spec)) => synthetic_matrix(spec, cfg.k, cfg.seed)?,
                (None, None) => unreachable!("validated config has a data source"),
            };
            Ok(Dataset::Matrix(p))
        }
    }
}

pub fn read_edges(path: &Path) -> CliResult<RelationSet> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    ingest_edges(BufReader::new(f)).map_err(|e| CliError::io(path, e))
}

/// Dense matrix: one row of comma-separated reals per line, no header;
/// `#` lines are comments.
pub fn read_matrix(path: &Path) -> CliResult<Array2<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::io(path, e))?;
    let mut values = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::io(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if *width.get_or_insert(rec.len()) != rec.len() {
            return Err(CliError::io(
                path,
                format!("line {line}: expected {} values, found {}", width.unwrap(), rec.len()),
            ));
        }
        for field in rec.iter() {
            let x: f64 =
                field.parse().map_err(|_| CliError::io(path, format!("line {line}: not a number: {field:?}")))?;
            if !x.is_finite() {
                return Err(CliError::io(path, format!("line {line}: non-finite value {field:?}")));
            }
            values.push(x);
        }
        rows += 1;
    }
    let width = width.ok_or_else(|| CliError::io(path, "no data rows"))?;
    Ok(Array2::from_shape_vec((rows, width), values).expect("rows have equal width"))
}

fn spec_parts(spec: &str) -> (&str, Vec<&str>) {
    let mut it = spec.split(':');
    let kind = it.next().unwrap_or_default();
    (kind, it.collect())
}

fn num<T: std::str::FromStr>(spec: &str, s: &str) -> CliResult<T> {
    s.trim().parse().map_err(|_| CliError::Config(format!("synthetic spec {spec:?}: cannot parse {s:?}")))
}

pub fn synthetic_relations(spec: &str, seed: u64) -> CliResult<RelationSet> {
    let (kind, args) = spec_parts(spec);
    match (kind, args.as_slice()) {
        ("tree", [b, d]) => Ok(synth::balanced_tree(num(spec, b)?, num(spec, d)?)),
        ("random", [n]) => Ok(synth::random_relations(num(spec, n)?, seed)),
        ("mammals", []) => Ok(synth::mammals_scale(seed)),
        _ => Err(CliError::Config(format!(
            "unknown synthetic spec {spec:?} for embed; expected tree:B:D, random:N or mammals"
        ))),
    }
}

pub fn synthetic_matrix(spec: &str, k: usize, seed: u64) -> CliResult<PcaProblem<f64>> {
    let (kind, args) = spec_parts(spec);
    match (kind, args.as_slice()) {
        ("spiked", [n, d, spectrum]) => {
            let spectrum = spectrum.split(',').map(|s| num(spec, s)).collect::<CliResult<Vec<f64>>>()?;
            spiked_problem(num(spec, n)?, num(spec, d)?, k, &spectrum, seed).map_err(CliError::config)
        }
        _ => Err(CliError::Config(format!("unknown synthetic spec {spec:?} for pca; expected spiked:N:D:l1,l2,..."))),
    }
}
