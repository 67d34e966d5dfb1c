use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{line_plot, BenchError, ExperimentSpec, Reconstruction, Series, Sweep};

pub enum RunResults<'a> {
    Reconstruction(&'a Reconstruction),
    Sweep(&'a Sweep),
}

pub const SWEEP_CSV: &str = "mse_sweep.csv";
pub const SWEEP_SVG: &str = "mse_sweep.svg";
pub const RECON_TRIALS_CSV: &str = "reconstruction.csv";
pub const RECON_SVG: &str = "reconstruction.svg";
pub const MANIFEST: &str = "manifest.txt";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io { path: path.to_path_buf(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> BenchError + '_ {
    move |e| BenchError::Io { path: path.to_path_buf(), source: e.into() }
}

/// File-name-safe form of a variant name.
pub fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c.to_ascii_lowercase() } else { '_' })
        .collect()
}

// shortest round-trip representation
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_path(path)
        .map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn write_text(path: &Path, text: &str) -> Result<(), BenchError> {
    fs::write(path, text).map_err(io_err(path))
}

/// SHA-256 over the canonical (debug) rendering of the validated spec.
pub fn config_hash(spec: &ExperimentSpec) -> String {
    let digest = Sha256::digest(format!("{spec:?}").as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Writes CSVs, SVG plots and a run manifest into `out_dir`; returns the
/// written paths (manifest last).
pub fn emit_outputs(results: &RunResults<'_>, spec: &ExperimentSpec, out_dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let (mode, mut files) = match results {
        RunResults::Sweep(s) => ("sweep", emit_sweep(s, out_dir)?),
        RunResults::Reconstruction(r) => ("reconstruct", emit_reconstruction(r, out_dir)?),
    };
    if files.is_empty() {
        return Err(BenchError::validation("results", "nothing to write"));
    }
    let mut manifest = String::new();
    let _ = writeln!(manifest, "tool = blockfuse {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(manifest, "mode = {mode}");
    let _ = writeln!(manifest, "config_sha256 = {}", config_hash(spec));
    let _ = writeln!(manifest, "seed = {}", spec.sensing.seed);
    let _ = writeln!(manifest, "files:");
    for f in &files {
        let _ = writeln!(manifest, "  {}", f.file_name().and_then(|s| s.to_str()).unwrap_or_default());
    }
    let path = out_dir.join(MANIFEST);
    write_text(&path, &manifest)?;
    files.push(path);
    Ok(files)
}

fn emit_sweep(sweep: &Sweep, out_dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    if sweep.cells.is_empty() {
        return Err(BenchError::validation("results", "empty sweep"));
    }
    let csv_path = out_dir.join(SWEEP_CSV);
    write_csv(
        &csv_path,
        &["variant", "mu", "mean_mse", "stderr_mse", "mean_iters", "trials"],
        sweep.cells.iter().map(|c| {
            vec![
                c.variant.clone(),
                num(c.mu),
                num(c.mean_mse),
                num(c.stderr_mse),
                num(c.mean_iters),
                c.trials.to_string(),
            ]
        }),
    )?;

    let mut series: Vec<Series> = Vec::new();
    for c in &sweep.cells {
        match series.iter_mut().find(|s| s.name == c.variant) {
            Some(s) => s.points.push((c.mu, c.mean_mse)),
            None => series.push(Series { name: c.variant.clone(), points: vec![(c.mu, c.mean_mse)], markers: true }),
        }
    }
    let svg_path = out_dir.join(SWEEP_SVG);
    write_text(&svg_path, &line_plot("Mean MSE vs compression ratio", "compression ratio μ", "MSE", &series))?;
    Ok(vec![csv_path, svg_path])
}

fn emit_reconstruction(rec: &Reconstruction, out_dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    if rec.runs.is_empty() {
        return Err(BenchError::validation("results", "no reconstructions"));
    }
    let mut files = Vec::new();
    for run in &rec.runs {
        let path = out_dir.join(format!("signal_{}.csv", file_stem(&run.result.variant)));
        write_csv(
            &path,
            &["index", "x_true", "x_hat"],
            rec.x_true
                .iter()
                .zip(run.report.x().iter())
                .enumerate()
                .map(|(i, (t, h))| vec![i.to_string(), num(*t), num(*h)]),
        )?;
        files.push(path);
    }

    let summary = out_dir.join(RECON_TRIALS_CSV);
    write_csv(
        &summary,
        &["variant", "mu", "trial", "seed", "mse", "iterations", "converged"],
        rec.runs.iter().map(|r| {
            let t = &r.result;
            vec![
                t.variant.clone(),
                num(t.mu),
                t.trial.to_string(),
                t.seed.to_string(),
                num(t.mse),
                t.iterations.to_string(),
                t.converged.to_string(),
            ]
        }),
    )?;
    files.push(summary);

    let index = |v: &nalgebra::DVector<f64>| -> Vec<(f64, f64)> {
        v.iter().enumerate().map(|(i, y)| (i as f64, *y)).collect()
    };
    let mut series = vec![Series { name: "original".into(), points: index(rec.x_true.as_vector()), markers: false }];
    series.extend(rec.runs.iter().map(|r| Series {
        name: r.result.variant.clone(),
        points: index(r.report.x()),
        markers: false,
    }));
    let svg = out_dir.join(RECON_SVG);
    write_text(
        &svg,
        &line_plot(&format!("Reconstruction at μ = {}", rec.mu), "sample index", "amplitude", &series),
    )?;
    files.push(svg);
    Ok(files)
}
