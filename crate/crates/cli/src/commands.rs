//! The subcommands as library functions returning tables and text.

use std::fmt::Write;

use hft::branches::{check_grid, linspace, track_branches};
use hft::fermi::GroundStateCurve;
use hft::models::{by_name, describe, ModelParams, MODEL_NAMES};
use hft::symmetry::{classify, DEFAULT_CLASSIFY_TOL};
use hft::{
    find_crossings, ground_state_curve, hft_report, rotated_spectrum, FillingSpec, HftOptions,
    HftReport, ParametricModel,
};

use crate::error::CliError;
use crate::svg::Plot;
use crate::table::CsvTable;

/// `check` passes when every residual is at most this.
pub const CHECK_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub params: ModelParams,
}

impl ModelSpec {
    pub fn new(name: &str, omega: f64, n_max: usize) -> Self {
        Self {
            name: name.to_string(),
            params: ModelParams { omega, n_max },
        }
    }

    pub fn build(&self) -> Result<Box<dyn ParametricModel>, CliError> {
        Ok(by_name(&self.name, &self.params)?)
    }

    /// Scan interval used when `--lmin`/`--lmax` are omitted.
    pub fn default_range(&self) -> (f64, f64) {
        match self.name.as_str() {
            "oscillator" => {
                let w2 = self.params.omega * self.params.omega;
                (-0.5 * w2, 0.5 * w2)
            }
            _ => (0.2, 2.0),
        }
    }
}

fn check_tolerance(tol: Option<f64>) -> Result<(), CliError> {
    match tol {
        Some(t) if !(t > 0.0 && t.is_finite()) => Err(CliError::Usage(format!(
            "--tol-deg must be positive and finite, got {t}"
        ))),
        _ => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub model: ModelSpec,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub slopes: bool,
    pub sorted: bool,
    pub degeneracy_tol: Option<f64>,
}

/// Eigenvalues (and optionally HFT slopes) on a λ grid, one row per point.
/// Columns follow tracked branches unless `sorted` is set.
pub fn run_scan(cfg: &ScanConfig) -> Result<CsvTable, CliError> {
    check_tolerance(cfg.degeneracy_tol)?;
    let model = cfg.model.build()?;
    check_grid(model.as_ref(), cfg.lo, cfg.hi, cfg.steps)?;
    let points = track_branches(
        model.as_ref(),
        &linspace(cfg.lo, cfg.hi, cfg.steps),
        cfg.degeneracy_tol,
    )?;

    let d = model.dim();
    let mut header = vec!["lambda".to_string()];
    header.extend((0..d).map(|k| format!("e{k}")));
    if cfg.slopes {
        header.extend((0..d).map(|k| format!("slope{k}")));
    }
    let mut table = CsvTable::new(header);
    for p in &points {
        let mut pairs: Vec<(f64, f64)> = p
            .values()
            .iter()
            .copied()
            .zip(p.slopes.iter().copied())
            .collect();
        if cfg.sorted {
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        }
        let mut row = vec![p.lambda];
        row.extend(pairs.iter().map(|q| q.0));
        if cfg.slopes {
            row.extend(pairs.iter().map(|q| q.1));
        }
        table.push_row(row)?;
    }
    Ok(table)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FermiConfig {
    pub model: ModelSpec,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub n_particles: usize,
}

pub struct FermiOutput {
    pub table: CsvTable,
    pub curve: GroundStateCurve,
}

/// `E₀` and `dE₀/dλ` on the grid, with one `cusp` comment per crossing.
pub fn run_fermi(cfg: &FermiConfig) -> Result<FermiOutput, CliError> {
    let model = cfg.model.build()?;
    let fill = FillingSpec::new(cfg.n_particles, model.dim())?;
    let curve = ground_state_curve(model.as_ref(), cfg.lo, cfg.hi, cfg.steps, fill)?;
    let mut table = CsvTable::new(vec!["lambda".into(), "E0".into(), "dE0".into()]);
    for p in &curve.points {
        table.push_row(vec![p.lambda, p.energy, p.slope])?;
    }
    for c in &curve.cusps {
        table
            .comments
            .push(cusp_line(c.lambda0, c.slope_left, c.slope_right));
    }
    Ok(FermiOutput { table, curve })
}

pub fn cusp_line(lambda0: f64, left: f64, right: f64) -> String {
    format!("cusp,{lambda0:.10},{left:.10},{right:.10}")
}

/// `(E₀ plot, dE₀ plot)`. The slope curve is broken at every cusp and the
/// two one-sided values are circled.
pub fn fermi_plots(curve: &GroundStateCurve, n_particles: usize) -> (Plot, Plot) {
    let energy = Plot {
        title: format!("Ground-state energy, {n_particles} particles"),
        x_label: "lambda".into(),
        y_label: "E0".into(),
        segments: vec![curve.points.iter().map(|p| (p.lambda, p.energy)).collect()],
        markers: Vec::new(),
    };

    let mut segments = Vec::new();
    let mut current: Vec<(f64, f64)> = Vec::new();
    let mut cusps = curve.cusps.iter().peekable();
    for p in &curve.points {
        while let Some(c) = cusps.peek() {
            if p.lambda < c.lambda0 {
                break;
            }
            current.push((c.lambda0, c.slope_left));
            segments.push(std::mem::take(&mut current));
            current.push((c.lambda0, c.slope_right));
            cusps.next();
        }
        if current.last().is_none_or(|q| q.0 != p.lambda) {
            current.push((p.lambda, p.slope));
        }
    }
    for c in cusps {
        current.push((c.lambda0, c.slope_left));
    }
    segments.push(current);
    segments.retain(|s| !s.is_empty());

    let slope = Plot {
        title: format!("Slope of the ground-state energy, {n_particles} particles"),
        x_label: "lambda".into(),
        y_label: "dE0/dlambda".into(),
        segments,
        markers: curve
            .cusps
            .iter()
            .flat_map(|c| [(c.lambda0, c.slope_left), (c.lambda0, c.slope_right)])
            .collect(),
    };
    (energy, slope)
}

/// Crossing points at the occupation frontier, one per line.
pub fn run_crossings(cfg: &FermiConfig) -> Result<Vec<f64>, CliError> {
    let model = cfg.model.build()?;
    let fill = FillingSpec::new(cfg.n_particles, model.dim())?;
    Ok(find_crossings(
        model.as_ref(),
        cfg.lo,
        cfg.hi,
        cfg.steps,
        fill,
    )?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckConfig {
    pub model: ModelSpec,
    pub lambda: f64,
    pub degeneracy_tol: Option<f64>,
    pub fd_step: f64,
}

pub struct CheckOutput {
    pub report: HftReport,
    pub text: String,
    pub passed: bool,
}

/// Diagonal HFT check at one λ, formatted as a plain-text report.
pub fn run_check(cfg: &CheckConfig) -> Result<CheckOutput, CliError> {
    check_tolerance(cfg.degeneracy_tol)?;
    let model = cfg.model.build()?;
    let opts = HftOptions {
        degeneracy_tol: cfg.degeneracy_tol,
        fd_step: cfg.fd_step,
    };
    let report = hft_report(model.as_ref(), cfg.lambda, &opts)?;
    let passed = report.worst_residual <= CHECK_THRESHOLD;

    let mut text = String::new();
    let source = match report.source {
        hft::degenerate::ReferenceSource::Analytic => "analytic",
        hft::degenerate::ReferenceSource::FiniteDifference => "finite-difference",
    };
    let _ = writeln!(
        text,
        "model: {}  lambda: {}  reference: {source}",
        model.name(),
        cfg.lambda
    );
    let _ = writeln!(
        text,
        "{:>5} {:>22} {:>22} {:>22} {:>10}",
        "state", "eigenvalue", "hft_slope", "reference", "residual"
    );
    for s in &report.states {
        let _ = writeln!(
            text,
            "{:>5} {:>22.15e} {:>22.15e} {:>22.15e} {:>10.2e}",
            s.index, s.eigenvalue, s.lhs, s.reference, s.residual
        );
    }
    for c in report.clusters.iter().filter(|c| c.is_degenerate()) {
        let slopes: Vec<String> = report.states[c.range()]
            .iter()
            .map(|s| format!("{:.12}", s.lhs))
            .collect();
        let _ = writeln!(
            text,
            "cluster {}..{}: slopes {}",
            c.start,
            c.end() - 1,
            slopes.join(" ")
        );
    }
    for w in &report.warnings {
        let _ = writeln!(
            text,
            "warning: levels {} and {} are {:.3e} apart, within 10x the degeneracy tolerance {:.3e}",
            w.lower, w.upper, w.gap, w.tol
        );
    }
    let _ = writeln!(
        text,
        "worst residual: {:.3e} (threshold {CHECK_THRESHOLD:.0e}) {}",
        report.worst_residual,
        if passed { "PASS" } else { "FAIL" }
    );
    Ok(CheckOutput {
        report,
        text,
        passed,
    })
}

pub struct ClassifyOutput {
    pub labels: Vec<String>,
    pub text: String,
}

/// Irrep label of each state in ascending-eigenvalue order. Degenerate
/// clusters are labelled in the HFT-consistent basis.
pub fn run_classify(
    model: &ModelSpec,
    lambda: f64,
    degeneracy_tol: Option<f64>,
) -> Result<ClassifyOutput, CliError> {
    check_tolerance(degeneracy_tol)?;
    let m = model.build()?;
    let symmetry = m.symmetry().ok_or_else(|| {
        CliError::Usage(format!(
            "model '{}' has no symmetry representation",
            m.name()
        ))
    })?;
    let rs = rotated_spectrum(m.as_ref(), lambda, degeneracy_tol)?;
    let states = classify(
        &rs.rotated,
        &symmetry.rep,
        &symmetry.table,
        DEFAULT_CLASSIFY_TOL,
    )?;
    let labels: Vec<String> = states.iter().map(|s| s.to_string()).collect();
    let mut text = String::new();
    for (k, label) in labels.iter().enumerate() {
        let _ = writeln!(text, "{k}\t{:.12}\t{label}", rs.rotated.values[k]);
    }
    Ok(ClassifyOutput { labels, text })
}

/// Registry listing.
pub fn run_models() -> String {
    MODEL_NAMES
        .iter()
        .map(|name| format!("{name}\t{}\n", describe(name).unwrap_or("")))
        .collect()
}
