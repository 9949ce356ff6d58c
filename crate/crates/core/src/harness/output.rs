use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::experiment::{quantile_curves, QuantileCurve, ResultRow};
use crate::harness::plot::emit_plot;

pub const CSV_HEADER: [&str; 9] = [
    "prior",
    "T",
    "nstar",
    "replicate",
    "seed",
    "risk",
    "excess_risk",
    "acceptance_rate",
    "theta_bar",
];

/// 17 significant digits: enough to reparse to the same `f64`.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(path: &Path, source: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn create_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
        }
        _ => Ok(()),
    }
}

/// Writes the result table, sorted by `(prior, T, nstar, replicate)`.
pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    create_parent(path)?;
    let mut sorted: Vec<&ResultRow> = rows.iter().collect();
    sorted.sort_by_key(|r| r.sort_key());
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(CSV_HEADER).map_err(|e| csv_err(path, e))?;
    for row in sorted {
        let theta = row
            .theta_bar
            .iter()
            .map(|&v| fmt_f64(v))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            row.prior.name().to_string(),
            row.t.to_string(),
            row.n_star.to_string(),
            row.replicate.to_string(),
            row.seed.to_string(),
            fmt_f64(row.risk),
            fmt_f64(row.excess_risk),
            fmt_f64(row.acceptance_rate),
            theta,
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn field<'a>(record: &'a csv::StringRecord, i: usize, path: &Path) -> Result<&'a str> {
    record.get(i).ok_or_else(|| {
        Error::invalid(format!("{}: row has {} fields, expected 9", path.display(), record.len()))
    })
}

fn parse<T: std::str::FromStr>(s: &str, what: &str, path: &Path) -> Result<T> {
    s.parse()
        .map_err(|_| Error::invalid(format!("{}: cannot parse {what} from `{s}`", path.display())))
}

/// Reads a table written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header = r.headers().map_err(|e| csv_err(path, e))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::invalid(format!(
            "{}: unexpected header {:?}",
            path.display(),
            header
        )));
    }
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let theta_field = field(&record, 8, path)?;
        let theta_bar = if theta_field.is_empty() {
            Vec::new()
        } else {
            theta_field
                .split(';')
                .map(|s| parse(s, "theta_bar", path))
                .collect::<Result<_>>()?
        };
        rows.push(ResultRow {
            prior: field(&record, 0, path)?.parse()?,
            t: parse(field(&record, 1, path)?, "T", path)?,
            n_star: parse(field(&record, 2, path)?, "nstar", path)?,
            replicate: parse(field(&record, 3, path)?, "replicate", path)?,
            seed: parse(field(&record, 4, path)?, "seed", path)?,
            risk: parse(field(&record, 5, path)?, "risk", path)?,
            excess_risk: parse(field(&record, 6, path)?, "excess_risk", path)?,
            acceptance_rate: parse(field(&record, 7, path)?, "acceptance_rate", path)?,
            theta_bar,
        });
    }
    Ok(rows)
}

/// Writes `prior,nstar,T,quantile` for each curve point.
pub fn emit_quantiles_csv(curves: &[QuantileCurve], path: &Path) -> Result<()> {
    create_parent(path)?;
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["prior", "nstar", "T", "quantile"])
        .map_err(|e| csv_err(path, e))?;
    for curve in curves {
        for &(t, q) in &curve.points {
            w.write_record([
                curve.prior.name().to_string(),
                curve.n_star.to_string(),
                t.to_string(),
                fmt_f64(q),
            ])
            .map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone)]
pub struct OutputFiles {
    pub results: PathBuf,
    pub quantiles: PathBuf,
    pub figure: PathBuf,
}

/// Writes `results.csv`, `quantiles.csv` and `figure.svg` under `dir`.
pub fn write_outputs(config: &ExperimentConfig, rows: &[ResultRow], dir: &Path) -> Result<OutputFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = OutputFiles {
        results: dir.join("results.csv"),
        quantiles: dir.join("quantiles.csv"),
        figure: dir.join("figure.svg"),
    };
    emit_csv(rows, &files.results)?;
    emit_quantiles_csv(&quantile_curves(rows, config.quantile_q)?, &files.quantiles)?;
    emit_plot(rows, config.quantile_q, &files.figure)?;
    Ok(files)
}
