//! File formats: simplex JSON/CSV, dataset CSV with a JSON mirror, and ball
//! JSON.
//!
//! CSV layouts (floats are written in shortest round-trip form, so files
//! reproduce the in-memory values bitwise):
//!
//! - simplex: one header row `dim,<K>`, then K+1 rows of K floats.
//! - dataset: a names row `dim,n,sigma,seed`, one row with those four
//!   values, then n rows of K floats.

use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::bounding::BoundingBall;
use crate::error::{Error, Result};
use crate::sampling::NoisyDataset;
use crate::simplex::Simplex;

/// Dataset JSON mirror carrying the same fields as the CSV header.
#[derive(serde::Serialize, serde::Deserialize)]
struct DatasetJson {
    dim: usize,
    n: usize,
    sigma: f64,
    seed: u64,
    points: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    truth: Option<Simplex>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn parse_f64(field: &str, context: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("{context}: bad float '{field}': {e}")))
}

// ---------------------------------------------------------------------------
// Simplex files
// ---------------------------------------------------------------------------

pub fn simplex_to_csv(s: &Simplex) -> String {
    let mut out = format!("dim,{}\n", s.dim());
    for v in s.vertices() {
        let row: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn simplex_from_csv(text: &str) -> Result<Simplex> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty simplex csv".into()))?;
    let mut parts = header.split(',');
    match (parts.next().map(str::trim), parts.next()) {
        (Some("dim"), Some(k)) => {
            let dim: usize = k
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("simplex csv header: bad dim '{k}': {e}")))?;
            let mut vertices = Vec::with_capacity(dim + 1);
            for line in lines {
                let row: Result<Vec<f64>> = line
                    .split(',')
                    .map(|f| parse_f64(f, "simplex csv"))
                    .collect();
                vertices.push(row?);
            }
            if vertices.len() != dim + 1 {
                return Err(Error::Parse(format!(
                    "simplex csv: expected {} vertex rows, found {}",
                    dim + 1,
                    vertices.len()
                )));
            }
            Simplex::new(vertices)
        }
        _ => Err(Error::Parse(
            "simplex csv: first row must be 'dim,<K>'".into(),
        )),
    }
}

/// Load a simplex from `.json` or `.csv` (decided by extension, JSON
/// otherwise).
pub fn load_simplex(path: &Path) -> Result<Simplex> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => simplex_from_csv(&std::fs::read_to_string(path)?),
        _ => read_json(path),
    }
}

pub fn save_simplex(path: &Path, s: &Simplex) -> Result<()> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => {
            std::fs::write(path, simplex_to_csv(s))?;
            Ok(())
        }
        _ => write_json(path, s),
    }
}

// ---------------------------------------------------------------------------
// Dataset files
// ---------------------------------------------------------------------------

pub fn dataset_to_csv(d: &NoisyDataset) -> String {
    let mut out = String::from("dim,n,sigma,seed\n");
    let _ = writeln!(out, "{},{},{},{}", d.dim, d.len(), d.sigma, d.seed);
    for p in &d.points {
        let row: Vec<String> = p.iter().map(|x| format!("{x}")).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn dataset_from_csv(text: &str) -> Result<NoisyDataset> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let names = lines
        .next()
        .ok_or_else(|| Error::Parse("empty dataset csv".into()))?;
    if names.trim() != "dim,n,sigma,seed" {
        return Err(Error::Parse(format!(
            "dataset csv: expected header 'dim,n,sigma,seed', found '{names}'"
        )));
    }
    let values = lines
        .next()
        .ok_or_else(|| Error::Parse("dataset csv: missing header values row".into()))?;
    let fields: Vec<&str> = values.split(',').collect();
    if fields.len() != 4 {
        return Err(Error::Parse(format!(
            "dataset csv: expected 4 header values, found {}",
            fields.len()
        )));
    }
    let dim: usize = fields[0]
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("dataset csv: bad dim: {e}")))?;
    let n: usize = fields[1]
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("dataset csv: bad n: {e}")))?;
    let sigma = parse_f64(fields[2], "dataset csv sigma")?;
    let seed: u64 = fields[3]
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("dataset csv: bad seed: {e}")))?;
    let mut points = Vec::with_capacity(n);
    for line in lines {
        let row: Result<Vec<f64>> = line
            .split(',')
            .map(|f| parse_f64(f, "dataset csv"))
            .collect();
        let row = row?;
        if row.len() != dim {
            return Err(Error::Parse(format!(
                "dataset csv: point row has {} coordinates, expected {dim}",
                row.len()
            )));
        }
        points.push(row);
    }
    if points.len() != n {
        return Err(Error::Parse(format!(
            "dataset csv: header says n={n} but found {} rows",
            points.len()
        )));
    }
    Ok(NoisyDataset {
        dim,
        sigma,
        seed,
        points,
        truth: None,
    })
}

pub fn load_dataset(path: &Path) -> Result<NoisyDataset> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => dataset_from_csv(&std::fs::read_to_string(path)?),
        _ => {
            let raw: DatasetJson = read_json(path)?;
            if raw.points.len() != raw.n {
                return Err(Error::Parse(format!(
                    "dataset json: n={} but {} points",
                    raw.n,
                    raw.points.len()
                )));
            }
            Ok(NoisyDataset {
                dim: raw.dim,
                sigma: raw.sigma,
                seed: raw.seed,
                points: raw.points,
                truth: raw.truth,
            })
        }
    }
}

pub fn save_dataset(path: &Path, d: &NoisyDataset) -> Result<()> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => {
            std::fs::write(path, dataset_to_csv(d))?;
            Ok(())
        }
        _ => write_json(
            path,
            &DatasetJson {
                dim: d.dim,
                n: d.len(),
                sigma: d.sigma,
                seed: d.seed,
                points: d.points.clone(),
                truth: d.truth.clone(),
            },
        ),
    }
}

// ---------------------------------------------------------------------------
// Ball files
// ---------------------------------------------------------------------------

pub fn load_ball(path: &Path) -> Result<BoundingBall> {
    read_json(path)
}

pub fn save_ball(path: &Path, ball: &BoundingBall) -> Result<()> {
    write_json(path, ball)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::generate;

    fn standard_triangle() -> Simplex {
        Simplex::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn simplex_csv_roundtrip_is_exact() {
        let s = Simplex::new(vec![
            vec![0.1 + 0.2, -1.0 / 3.0],
            vec![1.0, 0.0],
            vec![0.0, std::f64::consts::PI],
        ])
        .unwrap();
        let text = simplex_to_csv(&s);
        assert!(text.starts_with("dim,2\n"));
        let back = simplex_from_csv(&text).unwrap();
        assert_eq!(back.vertices(), s.vertices());
    }

    #[test]
    fn simplex_csv_errors() {
        assert!(matches!(simplex_from_csv(""), Err(Error::Parse(_))));
        assert!(matches!(
            simplex_from_csv("K,2\n0,0\n1,0\n0,1\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            simplex_from_csv("dim,2\n0,0\n1,0\n"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn dataset_csv_roundtrip_is_exact() {
        let d = generate(&standard_triangle(), 50, 0.25, 77);
        let text = dataset_to_csv(&d);
        let back = dataset_from_csv(&text).unwrap();
        assert_eq!(back.dim, 2);
        assert_eq!(back.sigma, 0.25);
        assert_eq!(back.seed, 77);
        assert_eq!(back.points, d.points);
    }

    #[test]
    fn dataset_json_mirror_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.json");
        let d = generate(&standard_triangle(), 20, 0.1, 5);
        save_dataset(&path, &d).unwrap();
        let back = load_dataset(&path).unwrap();
        assert_eq!(back.points, d.points);
        assert!(back.truth.is_some());
    }

    #[test]
    fn simplex_file_roundtrip_by_extension() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["s.json", "s.csv"] {
            let path = dir.path().join(name);
            save_simplex(&path, &standard_triangle()).unwrap();
            let back = load_simplex(&path).unwrap();
            assert_eq!(back.vertices(), standard_triangle().vertices());
        }
    }
}
