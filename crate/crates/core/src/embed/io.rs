use std::io::{BufRead, Write};

use ndarray::Array1;

use super::train::EmbeddingTable;
use crate::error::{Error, Result};
use crate::poincare::BallPoint;
use crate::scalar::Real;

/// Writes `symbol<TAB>c₁<TAB>…<TAB>c_d` per noun, in shortest round-trip
/// decimal form.
pub fn write_embeddings<T: Real, W: Write>(table: &EmbeddingTable<T>, mut out: W) -> Result<()> {
    for (s, p) in table.symbols().iter().zip(table.points()) {
        write!(out, "{s}")?;
        for c in p.coords() {
            write!(out, "\t{c}")?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_embeddings<T: Real, R: BufRead>(source: R) -> Result<EmbeddingTable<T>> {
    let mut symbols = Vec::new();
    let mut points = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let symbol = fields.next().unwrap_or_default();
        let coords = fields
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map(T::lit)
                    .map_err(|e| Error::Parse { line: lineno, message: format!("coordinate {f:?}: {e}") })
            })
            .collect::<Result<Vec<T>>>()?;
        if symbol.is_empty() || coords.is_empty() {
            return Err(Error::Parse { line: lineno, message: "expected a symbol followed by coordinates".into() });
        }
        let point =
            BallPoint::new(Array1::from(coords)).map_err(|e| Error::Parse { line: lineno, message: e.to_string() })?;
        symbols.push(symbol.to_owned());
        points.push(point);
    }
    EmbeddingTable::new(symbols, points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let pts = vec![
            BallPoint::from_slice(&[0.1 + 0.2, -1.0 / 3.0]).unwrap(),
            BallPoint::from_slice(&[1e-300, 0.999_99]).unwrap(),
        ];
        let t = EmbeddingTable::new(vec!["x".into(), "y z".into()], pts).unwrap();
        let mut buf = Vec::new();
        write_embeddings(&t, &mut buf).unwrap();
        let back: EmbeddingTable<f64> = read_embeddings(buf.as_slice()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn malformed_lines_are_reported() {
        let err = read_embeddings::<f64, _>("a\t0.1\nb\tzz\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(read_embeddings::<f64, _>("a\t0.8\t0.8\n".as_bytes()).is_err());
        assert!(matches!(
            read_embeddings::<f64, _>("a\t0.1\nb\t0.1\t0.2\n".as_bytes()),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
