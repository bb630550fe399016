//! Convergence studies on regular polygons, validation runs, and file output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_disk::{enumerate_scaled, Problem};
use crate::geometry::{
    hausdorff_to_disk, regular_polygon, ConvexPolygon, Disk, Domain, Point2, PolygonMode,
};
use crate::solver::{
    cluster_multiplicities, compute_spectrum, Method, MultiplicityClusters, DEFAULT_CLUSTER_TOL,
    DEFAULT_NULL_THRESHOLD,
};

/// Marker written in place of numbers for rows whose solve failed.
pub const FAILED_MARKER: &str = "failed";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub null_threshold: f64,
    pub cluster_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            null_threshold: DEFAULT_NULL_THRESHOLD,
            cluster_tol: DEFAULT_CLUSTER_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParadoxConfig {
    pub k_list: Vec<usize>,
    pub mode: PolygonMode,
    pub radius: f64,
    pub n_max: usize,
    pub method: Method,
    pub tolerances: Tolerances,
}

impl ParadoxConfig {
    pub fn new(k_list: Vec<usize>, mode: PolygonMode, degree: usize, n_max: usize) -> Self {
        Self {
            k_list,
            mode,
            radius: 1.0,
            n_max,
            method: Method::Poly { degree },
            tolerances: Tolerances::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_list.iter().any(|&k| k < 3) {
            return Err(Error::InvalidArgument(format!(
                "every k must be >= 3, got {:?}",
                self.k_list
            )));
        }
        if self.k_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "k list must be strictly increasing, got {:?}",
                self.k_list
            )));
        }
        if self.n_max == 0 {
            return Err(Error::InvalidArgument("n_max must be >= 1".into()));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "radius must be positive, got {}",
                self.radius
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParadoxRow {
    pub k: usize,
    pub hausdorff: f64,
    /// Computed dual eigenvalues of the k-gon.
    pub deltas: Vec<f64>,
    /// `|δ_n(P_k) - λ_n(D)|`.
    pub errors: Vec<f64>,
    /// `δ_n(P_k) - μ_n(D)`.
    pub gaps: Vec<f64>,
    pub perimeter_over_area: f64,
    pub retained_dim: usize,
    pub cond_a: Option<f64>,
    /// Largest change of `δ_n` when the polynomial degree drops by one.
    pub stagnation: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub config: ParadoxConfig,
    /// DBS values of the disk, `λ_n(D)`.
    pub dbs_targets: Vec<f64>,
    /// MDBS values of the disk, `μ_n(D)`.
    pub mdbs_targets: Vec<f64>,
    pub rows: Vec<ParadoxRow>,
}

/// Shape of one error/gap column pair across the k sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnShape {
    pub n: usize,
    pub strictly_decreasing: bool,
    /// Final error over initial error.
    pub final_ratio: f64,
    pub final_gap: f64,
}

impl ConvergenceTable {
    pub fn error_column(&self, n: usize) -> Vec<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.errors.get(n - 1).copied())
            .collect()
    }

    pub fn gap_column(&self, n: usize) -> Vec<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.gaps.get(n - 1).copied())
            .collect()
    }

    pub fn failed_rows(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|r| r.failure.is_some())
            .map(|r| r.k)
            .collect()
    }

    /// Per-n summary; `None` if any row failed or the table is empty.
    pub fn column_shapes(&self) -> Option<Vec<ColumnShape>> {
        if self.rows.is_empty() || !self.failed_rows().is_empty() {
            return None;
        }
        Some(
            (1..=self.config.n_max)
                .map(|n| {
                    let err = self.error_column(n);
                    let gap = self.gap_column(n);
                    ColumnShape {
                        n,
                        strictly_decreasing: err.windows(2).all(|w| w[1] < w[0]),
                        final_ratio: err[err.len() - 1] / err[0],
                        final_gap: gap[gap.len() - 1],
                    }
                })
                .collect(),
        )
    }

    /// `(n, k)` pairs where the error failed to decrease from the previous row.
    pub fn monotonicity_violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for n in 1..=self.config.n_max {
            for w in self.rows.windows(2) {
                match (w[0].errors.get(n - 1), w[1].errors.get(n - 1)) {
                    (Some(a), Some(b)) if b < a => {}
                    _ => out.push((n, w[1].k)),
                }
            }
        }
        out
    }

    pub fn csv_header(n_max: usize) -> String {
        let mut h = String::from("k,hausdorff");
        for prefix in ["delta", "err", "gap"] {
            for n in 1..=n_max {
                let _ = write!(h, ",{prefix}_{n}");
            }
        }
        h
    }

    pub fn to_csv(&self) -> String {
        let n_max = self.config.n_max;
        let mut out = Self::csv_header(n_max);
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{},{}", row.k, fmt_sig12(row.hausdorff));
            for col in [&row.deltas, &row.errors, &row.gaps] {
                for n in 0..n_max {
                    match (&row.failure, col.get(n)) {
                        (None, Some(v)) => {
                            let _ = write!(out, ",{}", fmt_sig12(*v));
                        }
                        _ => {
                            let _ = write!(out, ",{FAILED_MARKER}");
                        }
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed,
/// independent of locale.
pub fn fmt_sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, v);
        trim_fraction(&fixed).to_string()
    } else {
        format!(
            "{}e{}{:02}",
            trim_fraction(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn paradox_row(cfg: &ParadoxConfig, k: usize, dbs: &[f64], mdbs: &[f64]) -> Result<ParadoxRow> {
    let poly = regular_polygon(k, cfg.radius, cfg.mode)?;
    let hausdorff = hausdorff_to_disk(k, cfg.radius, cfg.mode)?;
    let domain: Domain = poly.into();
    let mut row = ParadoxRow {
        k,
        hausdorff,
        deltas: Vec::new(),
        errors: Vec::new(),
        gaps: Vec::new(),
        perimeter_over_area: domain.constant_quotient(),
        retained_dim: 0,
        cond_a: None,
        stagnation: None,
        failure: None,
    };
    let spectrum = match compute_spectrum(
        &domain,
        cfg.method,
        cfg.n_max,
        cfg.tolerances.null_threshold,
    ) {
        Ok(s) => s,
        Err(e) => {
            row.failure = Some(e.to_string());
            return Ok(row);
        }
    };
    row.retained_dim = spectrum.retained_dim;
    row.cond_a = Some(spectrum.cond_a);
    if spectrum.truncated {
        row.failure = Some(format!(
            "only {} of {} eigenvalues available (retained dimension {})",
            spectrum.values.len(),
            cfg.n_max,
            spectrum.retained_dim
        ));
        return Ok(row);
    }
    row.errors = spectrum
        .values
        .iter()
        .zip(dbs)
        .map(|(d, l)| (d - l).abs())
        .collect();
    row.gaps = spectrum
        .values
        .iter()
        .zip(mdbs)
        .map(|(d, m)| d - m)
        .collect();
    if let Method::Poly { degree } = cfg.method {
        if degree > 0 {
            let coarse = compute_spectrum(
                &domain,
                Method::Poly { degree: degree - 1 },
                cfg.n_max,
                cfg.tolerances.null_threshold,
            );
            if let Ok(c) = coarse {
                row.stagnation = c
                    .values
                    .iter()
                    .zip(&spectrum.values)
                    .map(|(a, b)| (a - b).abs())
                    .reduce(f64::max);
            }
        }
    }
    row.deltas = spectrum.values;
    Ok(row)
}

/// Computes the spectrum of every regular k-gon in the configuration and
/// compares it with the disk's DBS and MDBS values.
pub fn run_paradox(cfg: &ParadoxConfig) -> Result<ConvergenceTable> {
    cfg.validate()?;
    let dbs = enumerate_scaled(cfg.n_max, 2, Problem::Dbs, cfg.radius)?;
    let mdbs = enumerate_scaled(cfg.n_max, 2, Problem::Mdbs, cfg.radius)?;
    let job = |&k: &usize| paradox_row(cfg, k, &dbs, &mdbs);
    #[cfg(feature = "parallel")]
    let rows: Result<Vec<ParadoxRow>> = {
        use rayon::prelude::*;
        cfg.k_list.par_iter().map(job).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Result<Vec<ParadoxRow>> = cfg.k_list.iter().map(job).collect();
    Ok(ConvergenceTable {
        config: cfg.clone(),
        dbs_targets: dbs,
        mdbs_targets: mdbs,
        rows: rows?,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_csv(table: &ConvergenceTable, path: &Path) -> Result<()> {
    write_file(path, &table.to_csv())
}

pub fn write_json(table: &ConvergenceTable, path: &Path) -> Result<()> {
    write_file(path, &table.to_json())
}

pub fn read_json(path: &Path) -> Result<ConvergenceTable> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskValidation {
    pub radius: f64,
    pub degree: usize,
    pub values: Vec<f64>,
    pub exact_dbs: Vec<f64>,
    pub exact_mdbs: Vec<f64>,
    pub max_abs_error: f64,
    pub clusters: MultiplicityClusters,
    pub retained_dim: usize,
    pub cond_a: f64,
}

impl DiskValidation {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,delta,exact_dbs,exact_mdbs,abs_err\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                i + 1,
                fmt_sig12(*v),
                fmt_sig12(self.exact_dbs[i]),
                fmt_sig12(self.exact_mdbs[i]),
                fmt_sig12((v - self.exact_dbs[i]).abs())
            );
        }
        out
    }
}

/// Solves on the disk with the polar tensor quadrature and compares with the
/// closed-form spectrum.
pub fn run_disk_validation(
    n_max: usize,
    degree: usize,
    radius: f64,
    tol: Tolerances,
) -> Result<DiskValidation> {
    if n_max == 0 || 2 * degree + 1 < n_max {
        return Err(Error::InvalidArgument(format!(
            "degree {degree} gives {} trial functions, fewer than n_max = {n_max}",
            2 * degree + 1
        )));
    }
    let domain: Domain = Disk::new(Point2::default(), radius)?.into();
    let spectrum = compute_spectrum(&domain, Method::Poly { degree }, n_max, tol.null_threshold)?;
    let exact_dbs = enumerate_scaled(n_max, 2, Problem::Dbs, radius)?;
    let exact_mdbs = enumerate_scaled(n_max, 2, Problem::Mdbs, radius)?;
    let max_abs_error = spectrum
        .values
        .iter()
        .zip(&exact_dbs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(DiskValidation {
        radius,
        degree,
        clusters: cluster_multiplicities(&spectrum.values, tol.cluster_tol),
        values: spectrum.values,
        exact_dbs,
        exact_mdbs,
        max_abs_error,
        retained_dim: spectrum.retained_dim,
        cond_a: spectrum.cond_a,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossValidation {
    pub degree: usize,
    pub mfs_size: usize,
    pub poly_values: Vec<f64>,
    pub mfs_values: Vec<f64>,
    /// `|poly - mfs| / |mfs|` per eigenvalue.
    pub rel_disagreement: Vec<f64>,
    pub max_rel_disagreement: f64,
}

/// Number of eigenvalues compared by [`run_cross_validation`].
pub const CROSS_VALIDATION_COUNT: usize = 5;

/// Compares polynomial and fundamental-solution spectra on the same polygon.
pub fn run_cross_validation(
    poly: &ConvexPolygon,
    degree: usize,
    mfs_size: usize,
    tol: Tolerances,
) -> Result<CrossValidation> {
    let domain: Domain = poly.clone().into();
    let p = compute_spectrum(
        &domain,
        Method::Poly { degree },
        CROSS_VALIDATION_COUNT,
        tol.null_threshold,
    )?;
    let m = compute_spectrum(
        &domain,
        Method::Mfs { size: mfs_size },
        CROSS_VALIDATION_COUNT,
        tol.null_threshold,
    )?;
    let rel: Vec<f64> = p
        .values
        .iter()
        .zip(&m.values)
        .map(|(a, b)| (a - b).abs() / b.abs())
        .collect();
    Ok(CrossValidation {
        degree,
        mfs_size,
        max_rel_disagreement: rel.iter().copied().fold(0.0, f64::max),
        rel_disagreement: rel,
        poly_values: p.values,
        mfs_values: m.values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    pub degree: usize,
    pub mfs_size: usize,
    pub cross_tol: f64,
    pub tolerances: Tolerances,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            degree: 12,
            mfs_size: 100,
            cross_tol: 1e-4,
            tolerances: Tolerances::default(),
        }
    }
}

/// Named test polygons used by the validation run.
pub fn validation_polygons() -> Vec<(&'static str, ConvexPolygon)> {
    vec![
        ("unit square", ConvexPolygon::unit_square()),
        (
            "inscribed hexagon",
            regular_polygon(6, 1.0, PolygonMode::Inscribed).expect("valid hexagon"),
        ),
    ]
}

fn check(name: impl Into<String>, passed: bool, detail: String) -> Check {
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

fn failed(name: impl Into<String>, err: Error) -> Check {
    check(name, false, format!("error: {err}"))
}

/// Disk exactness, basis cross-validation, dilation, rigid-motion and
/// constant-trial checks. Solver errors become failed checks.
pub fn run_validation(opts: &ValidateOptions) -> Vec<Check> {
    let tol = opts.tolerances;
    let mut out = Vec::new();

    match run_disk_validation(9, 6, 1.0, tol) {
        Ok(r) => out.push(check(
            "disk spectrum (n_max 9, degree 6)",
            r.max_abs_error <= 1e-8 && r.values.len() == 9,
            format!("max abs error {:e}", r.max_abs_error),
        )),
        Err(e) => out.push(failed("disk spectrum", e)),
    }

    for (name, poly) in validation_polygons() {
        let label = format!(
            "poly vs mfs on {name} (degree {}, size {})",
            opts.degree, opts.mfs_size
        );
        match run_cross_validation(&poly, opts.degree, opts.mfs_size, tol) {
            Ok(r) => out.push(check(
                label,
                r.max_rel_disagreement <= opts.cross_tol,
                format!(
                    "max rel disagreement {:e} (tolerance {:e})",
                    r.max_rel_disagreement, opts.cross_tol
                ),
            )),
            Err(e) => out.push(failed(label, e)),
        }

        let label = format!("dilation law on {name}");
        out.push(match dilation_defect(&poly, opts.degree, tol) {
            Ok(d) => check(label, d <= 1e-10, format!("max rel defect {d:e}")),
            Err(e) => failed(label, e),
        });

        let label = format!("rigid motion on {name}");
        out.push(match rigid_motion_defect(&poly, opts.degree, tol) {
            Ok(d) => check(label, d <= 1e-9, format!("max rel change {d:e}")),
            Err(e) => failed(label, e),
        });

        let label = format!("constant trial space on {name}");
        let domain: Domain = poly.clone().into();
        out.push(
            match compute_spectrum(&domain, Method::Poly { degree: 0 }, 1, tol.null_threshold) {
                Ok(s) => {
                    let d = (s.values[0] - domain.constant_quotient()).abs();
                    check(label, d <= 1e-13, format!("|δ_1 - perimeter/area| = {d:e}"))
                }
                Err(e) => failed(label, e),
            },
        );
    }
    out
}

/// Largest `|t δ_n(tP) - δ_n(P)| / δ_n(P)` over `t in {0.5, 2, 3}` and `n <= 5`.
pub fn dilation_defect(poly: &ConvexPolygon, degree: usize, tol: Tolerances) -> Result<f64> {
    let method = Method::Poly { degree };
    let base = compute_spectrum(&poly.clone().into(), method, 5, tol.null_threshold)?.values;
    let mut worst: f64 = 0.0;
    for t in [0.5, 2.0, 3.0] {
        let scaled = poly.transformed(t, 0.0, Point2::default())?;
        let s = compute_spectrum(&scaled.into(), method, 5, tol.null_threshold)?.values;
        for (a, b) in s.iter().zip(&base) {
            worst = worst.max((a * t - b).abs() / b);
        }
    }
    Ok(worst)
}

/// Largest relative eigenvalue change under a rotation plus translation.
pub fn rigid_motion_defect(poly: &ConvexPolygon, degree: usize, tol: Tolerances) -> Result<f64> {
    let method = Method::Poly { degree };
    let base = compute_spectrum(&poly.clone().into(), method, 5, tol.null_threshold)?.values;
    let mut worst: f64 = 0.0;
    for (angle, shift) in [
        (0.7, Point2::new(3.0, -2.0)),
        (2.0, Point2::new(-0.25, 10.0)),
    ] {
        let moved = poly.transformed(1.0, angle, shift)?;
        let s = compute_spectrum(&moved.into(), method, 5, tol.null_threshold)?.values;
        for (a, b) in s.iter().zip(&base) {
            worst = worst.max((a - b).abs() / b);
        }
    }
    Ok(worst)
}
