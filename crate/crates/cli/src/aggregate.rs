//! Ensemble statistics over raw task files.
//!
//! Aggregation is single-threaded and walks tasks in canonical config order, so
//! the output bytes depend only on the raw data, never on completion order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use xxladder::fits::{
    fit_error_scaling, fit_exponential, fit_log_log, fit_mbl_form, fit_power_law, half_decay_window, onset_window, MblFitOptions,
};
use xxladder::wavefront::{default_min_distance, extract_contour, fit_dynamical_exponent};
use xxladder::{Contour, FitForm, FitResult, WavefrontGrid};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::CliError;
use crate::manifest::{RunManifest, TaskStatus};
use crate::raw::{write_atomic, RawFile};
use crate::tasks::{enumerate, param_points, ParamPoint};

pub const AGGREGATE_DIR: &str = "aggregate";

/// Count, mean, sample standard deviation and standard error.
///
/// A single value has `std = 0` and an undefined (`NaN`) standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stats {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub stderr: f64,
}

impl Stats {
    pub fn of(x: &[f64]) -> Self {
        let n = x.len();
        let mean = x.iter().sum::<f64>() / n as f64;
        if n < 2 {
            return Self { n, mean, std: 0.0, stderr: f64::NAN };
        }
        let std = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        Self { n, mean, std, stderr: std / (n as f64).sqrt() }
    }
}

/// One fit attempt, successful or not.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRecord {
    pub scope: String,
    pub quantity: String,
    pub form: FitForm,
    pub fit: Option<FitResult>,
    pub error: Option<String>,
}

impl FitRecord {
    fn new(scope: String, quantity: &str, form: FitForm, r: xxladder::Result<FitResult>) -> Self {
        let (fit, error) = match r {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Self { scope, quantity: quantity.to_string(), form, fit, error }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelRow {
    pub point: ParamPoint,
    pub mean_r: Stats,
    pub dropped_pairs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OtocCurve {
    pub point: ParamPoint,
    pub probe: usize,
    pub times: Vec<f64>,
    pub re: Vec<Stats>,
    pub im_mean: Vec<f64>,
}

impl OtocCurve {
    pub fn mean(&self) -> Vec<f64> {
        self.re.iter().map(|s| s.mean).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LightconeSummary {
    pub point: ParamPoint,
    pub grid: WavefrontGrid,
    /// Contours with their fronts fitted from `min_distance` on.
    pub contours: Vec<(Contour, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingRow {
    pub point: ParamPoint,
    pub dim: usize,
    pub states: usize,
    pub eps1: Stats,
    pub eps2: Stats,
    pub de: Stats,
}

impl SamplingRow {
    pub fn ratio(&self) -> f64 {
        self.states as f64 / self.dim as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRow {
    pub point: ParamPoint,
    pub realizations: usize,
    /// Worst case over realizations, in raw column order.
    pub max: Vec<f64>,
}

pub const PROTOCOL_COLUMNS: [&str; 4] = ["sign_reversal", "interference", "interferometric_literal", "interferometric_direct"];

#[derive(Debug, Clone, PartialEq)]
pub enum Tables {
    LevelStats(Vec<LevelRow>),
    Otoc { curves: Vec<OtocCurve>, fits: Vec<FitRecord> },
    Lightcone(Vec<LightconeSummary>),
    Sampling { rows: Vec<SamplingRow>, fits: Vec<FitRecord> },
    Protocol(Vec<ProtocolRow>),
}

/// Raw files of all completed tasks, grouped by parameter point in config order.
pub fn load_raw(out: &Path) -> Result<(RunManifest, Vec<(ParamPoint, Vec<RawFile>)>), CliError> {
    let manifest = RunManifest::load(out)?.ok_or_else(|| CliError::Manifest {
        path: RunManifest::path(out),
        reason: "not found".into(),
    })?;
    let cfg = &manifest.config;
    let tasks = enumerate(cfg);
    if tasks.len() != manifest.tasks.len() {
        return Err(CliError::Manifest { path: RunManifest::path(out), reason: "task list does not match its config".into() });
    }
    let mut groups: BTreeMap<usize, Vec<RawFile>> = BTreeMap::new();
    for (task, rec) in tasks.iter().zip(&manifest.tasks) {
        if rec.status != TaskStatus::Done {
            continue;
        }
        let path = out.join(&rec.path);
        if !path.exists() {
            return Err(CliError::MissingRaw(path));
        }
        groups.entry(task.point_index).or_default().push(RawFile::read(&path)?);
    }
    if groups.is_empty() {
        return Err(CliError::Manifest { path: RunManifest::path(out), reason: "no completed tasks".into() });
    }
    let points = param_points(cfg);
    let grouped = groups.into_iter().map(|(i, files)| (points[i], files)).collect();
    Ok((manifest, grouped))
}

fn column(file: &RawFile, name: &str) -> Result<usize, CliError> {
    file.column(name).ok_or_else(|| CliError::Raw { path: PathBuf::from(&file.header.task), reason: format!("no column `{name}`") })
}

fn check_layout(files: &[RawFile]) -> Result<(), CliError> {
    let first = &files[0];
    for f in files {
        if f.columns != first.columns || f.rows.len() != first.rows.len() {
            return Err(CliError::Raw { path: PathBuf::from(&f.header.task), reason: "layout differs from its ensemble".into() });
        }
    }
    Ok(())
}

/// Values of `col` at row `k` across an ensemble.
fn across(files: &[RawFile], k: usize, col: usize) -> Vec<f64> {
    files.iter().map(|f| f.rows[k][col]).collect()
}

pub fn compute_tables(out: &Path) -> Result<(RunManifest, Tables), CliError> {
    let (manifest, groups) = load_raw(out)?;
    for (_, files) in &groups {
        check_layout(files)?;
    }
    let cfg = &manifest.config;
    let tables = match cfg.kind {
        ExperimentKind::LevelStats => Tables::LevelStats(level_rows(&groups)?),
        ExperimentKind::OtocAlphaSweep | ExperimentKind::OtocDecay => {
            let curves = otoc_curves(&groups)?;
            let fits = if cfg.kind == ExperimentKind::OtocDecay { decay_fits(cfg, &curves) } else { Vec::new() };
            Tables::Otoc { curves, fits }
        }
        ExperimentKind::Lightcone => Tables::Lightcone(lightcones(cfg, &groups)?),
        ExperimentKind::SamplingError => {
            let rows = sampling_rows(&groups)?;
            let fits = sampling_fits(cfg, &rows);
            Tables::Sampling { rows, fits }
        }
        ExperimentKind::ProtocolCheck => Tables::Protocol(protocol_rows(&groups)?),
    };
    Ok((manifest, tables))
}

fn level_rows(groups: &[(ParamPoint, Vec<RawFile>)]) -> Result<Vec<LevelRow>, CliError> {
    groups
        .iter()
        .map(|(point, files)| {
            let (r, d) = (column(&files[0], "mean_r")?, column(&files[0], "dropped")?);
            Ok(LevelRow {
                point: *point,
                mean_r: Stats::of(&across(files, 0, r)),
                dropped_pairs: across(files, 0, d).iter().sum::<f64>() as usize,
            })
        })
        .collect()
}

fn otoc_curves(groups: &[(ParamPoint, Vec<RawFile>)]) -> Result<Vec<OtocCurve>, CliError> {
    let mut curves = Vec::new();
    for (point, files) in groups {
        let f0 = &files[0];
        let (cp, ct, cr, ci) = (column(f0, "probe")?, column(f0, "t")?, column(f0, "re")?, column(f0, "im")?);
        let mut by_probe: Vec<(usize, Vec<usize>)> = Vec::new();
        for (k, row) in f0.rows.iter().enumerate() {
            let probe = row[cp] as usize;
            match by_probe.last_mut() {
                Some((p, rows)) if *p == probe => rows.push(k),
                _ => by_probe.push((probe, vec![k])),
            }
        }
        for (probe, rows) in by_probe {
            curves.push(OtocCurve {
                point: *point,
                probe,
                times: rows.iter().map(|&k| f0.rows[k][ct]).collect(),
                re: rows.iter().map(|&k| Stats::of(&across(files, k, cr))).collect(),
                im_mean: rows.iter().map(|&k| Stats::of(&across(files, k, ci)).mean).collect(),
            });
        }
    }
    Ok(curves)
}

fn decay_fits(cfg: &ExperimentConfig, curves: &[OtocCurve]) -> Vec<FitRecord> {
    let mut out = Vec::new();
    for c in curves {
        let (t, f) = (&c.times, c.mean());
        let scope = format!("{} probe={}", c.point.label(), c.probe);
        let exp = match onset_window(t, &f, cfg.fits.exponential_end) {
            Some(w) => fit_exponential(t, &f, w),
            None => Err(xxladder::Error::Empty("decay onset on the grid")),
        };
        out.push(FitRecord::new(scope.clone(), "otoc", FitForm::Exp, exp));
        let pow = match half_decay_window(t, &f, cfg.fits.power_end) {
            Some(w) => fit_power_law(t, &f, w),
            None => Err(xxladder::Error::Empty("F < 1/2 on the grid")),
        };
        out.push(FitRecord::new(scope.clone(), "otoc", FitForm::Power, pow));
        if c.point.disorder >= cfg.fits.mbl_min_disorder {
            out.push(FitRecord::new(scope, "otoc", FitForm::Mbl, fit_mbl_form(t, &f, &MblFitOptions::default())));
        }
    }
    out
}

fn lightcones(cfg: &ExperimentConfig, groups: &[(ParamPoint, Vec<RawFile>)]) -> Result<Vec<LightconeSummary>, CliError> {
    let times = cfg.times();
    groups
        .iter()
        .map(|(point, files)| {
            let f0 = &files[0];
            let cv = column(f0, "value")?;
            let rows = f0.rows.len() / times.len().max(1);
            let profiles = files
                .iter()
                .map(|f| (0..rows).map(|d| (0..times.len()).map(|k| f.rows[d * times.len() + k][cv]).collect()).collect())
                .collect();
            let seeds = files.iter().map(|f| f.header.seed).collect();
            let grid = WavefrontGrid::from_profiles(point.params(), seeds, times.clone(), profiles)?;
            let contours = cfg
                .eta_levels()
                .into_iter()
                .map(|eta| {
                    let mut c = extract_contour(&grid, eta)?;
                    let min_d = default_min_distance(eta);
                    c.fit = fit_dynamical_exponent(&c, min_d).ok();
                    Ok((c, min_d))
                })
                .collect::<xxladder::Result<Vec<_>>>()?;
            Ok(LightconeSummary { point: *point, grid, contours })
        })
        .collect()
}

fn sampling_rows(groups: &[(ParamPoint, Vec<RawFile>)]) -> Result<Vec<SamplingRow>, CliError> {
    let mut out = Vec::new();
    for (point, files) in groups {
        let f0 = &files[0];
        let (cm, c1, c2, cd) = (column(f0, "M")?, column(f0, "eps1_sat")?, column(f0, "eps2_sat")?, column(f0, "de_mean")?);
        for k in 0..f0.rows.len() {
            out.push(SamplingRow {
                point: *point,
                dim: f0.header.dim,
                states: f0.rows[k][cm] as usize,
                eps1: Stats::of(&across(files, k, c1)),
                eps2: Stats::of(&across(files, k, c2)),
                de: Stats::of(&across(files, k, cd)),
            });
        }
    }
    Ok(out)
}

fn sampling_fits(cfg: &ExperimentConfig, rows: &[SamplingRow]) -> Vec<FitRecord> {
    let mut out = Vec::new();
    let mut points: Vec<ParamPoint> = Vec::new();
    for r in rows {
        if !points.contains(&r.point) {
            points.push(r.point);
        }
    }
    let [lo, hi] = cfg.fits.exp_ratio;
    for p in &points {
        let mine: Vec<&SamplingRow> = rows.iter().filter(|r| r.point == *p).collect();
        let small: Vec<(f64, f64)> =
            mine.iter().filter(|r| r.ratio() <= cfg.fits.power_max_ratio).map(|r| (r.ratio(), r.eps1.mean)).collect();
        let large: Vec<(f64, f64)> =
            mine.iter().filter(|r| r.ratio() >= lo && r.ratio() <= hi).map(|r| (r.ratio(), r.eps1.mean)).collect();
        if small.len() >= 3 {
            out.push(FitRecord::new(p.label(), "eps1_vs_ratio", FitForm::ScalingPower, fit_error_scaling(&small, FitForm::ScalingPower)));
        }
        if large.len() >= 3 {
            out.push(FitRecord::new(p.label(), "eps1_vs_ratio", FitForm::ScalingExp, fit_error_scaling(&large, FitForm::ScalingExp)));
        }
    }
    // size scaling at fixed state count, across L for each (alpha, h)
    let mut families: Vec<(f64, f64, usize)> = Vec::new();
    for r in rows {
        let key = (r.point.alpha, r.point.disorder, r.states);
        if !families.contains(&key) {
            families.push(key);
        }
    }
    for (alpha, h, m) in families {
        let fam: Vec<&SamplingRow> =
            rows.iter().filter(|r| r.point.alpha == alpha && r.point.disorder == h && r.states == m).collect();
        if fam.len() < 3 {
            continue;
        }
        let scope = format!("alpha{alpha}_h{h}_M{m}");
        let eps: Vec<(f64, f64)> = fam.iter().map(|r| (2.0 * r.point.sites as f64, r.eps1.mean)).collect();
        out.push(FitRecord::new(scope.clone(), "eps1_vs_spins", FitForm::ScalingPower, fit_log_log(&eps)));
        let de: Vec<(f64, f64)> = fam.iter().map(|r| (r.dim as f64, r.de.mean)).collect();
        out.push(FitRecord::new(scope, "de_vs_dim", FitForm::ScalingPower, fit_log_log(&de)));
    }
    out
}

fn protocol_rows(groups: &[(ParamPoint, Vec<RawFile>)]) -> Result<Vec<ProtocolRow>, CliError> {
    groups
        .iter()
        .map(|(point, files)| {
            let cols = PROTOCOL_COLUMNS.iter().map(|c| column(&files[0], c)).collect::<Result<Vec<_>, _>>()?;
            let max = cols.iter().map(|&c| across(files, 0, c).into_iter().fold(0.0, f64::max)).collect();
            Ok(ProtocolRow { point: *point, realizations: files.len(), max })
        })
        .collect()
}

/// Shortest round-trip decimal; `NaN` for undefined values.
pub fn num(v: f64) -> String {
    v.to_string()
}

const PREFIX: &str = "L,alpha,h,legs";

/// Renders the tables as `(file name, contents)` pairs.
pub fn render(tables: &Tables) -> Vec<(String, String)> {
    let mut files = Vec::new();
    match tables {
        Tables::LevelStats(rows) => {
            let mut s = format!("{PREFIX},realizations,mean_r,std,stderr,dropped_pairs\n");
            for r in rows {
                let m = &r.mean_r;
                writeln!(s, "{},{},{},{},{},{}", r.point.csv_prefix(), m.n, num(m.mean), num(m.std), num(m.stderr), r.dropped_pairs).unwrap();
            }
            files.push(("level_stats.csv".into(), s));
        }
        Tables::Otoc { curves, fits } => {
            let mut s = format!("{PREFIX},probe,t,realizations,mean,std,stderr,mean_im\n");
            for c in curves {
                for ((t, st), im) in c.times.iter().zip(&c.re).zip(&c.im_mean) {
                    let p = c.point.csv_prefix();
                    writeln!(s, "{p},{},{},{},{},{},{},{}", c.probe, num(*t), st.n, num(st.mean), num(st.std), num(st.stderr), num(*im)).unwrap();
                }
            }
            files.push(("otoc.csv".into(), s));
            if !fits.is_empty() {
                files.push(("fits.json".into(), serde_json::to_string_pretty(fits).expect("fits serialize") + "\n"));
            }
        }
        Tables::Lightcone(summaries) => {
            let mut grid = format!("{PREFIX},dx,t,realizations,mean\n");
            let mut contours = format!("{PREFIX},eta,dx,t_cross\n");
            let mut exps = format!("{PREFIX},eta,min_distance,gamma,a,r_squared,n_points,never_crossed\n");
            for l in summaries {
                let p = l.point.csv_prefix();
                for (d, row) in l.grid.distances.iter().zip(&l.grid.values) {
                    for (t, v) in l.grid.times.iter().zip(row) {
                        writeln!(grid, "{p},{d},{},{},{}", num(*t), l.grid.meta.realizations, num(*v)).unwrap();
                    }
                }
                for (c, min_d) in &l.contours {
                    for (d, t) in &c.points {
                        writeln!(contours, "{p},{},{d},{}", num(c.eta), num(*t)).unwrap();
                    }
                    let (g, a, r2, n) = c
                        .fit
                        .as_ref()
                        .map_or((f64::NAN, f64::NAN, f64::NAN, 0), |f| (f.param("b"), f.param("a"), f.r_squared, f.n_points));
                    writeln!(exps, "{p},{},{min_d},{},{},{},{n},{}", num(c.eta), num(g), num(a), num(r2), c.never_crossed.len()).unwrap();
                }
            }
            files.push(("lightcone.csv".into(), grid));
            files.push(("contours.csv".into(), contours));
            files.push(("exponents.csv".into(), exps));
        }
        Tables::Sampling { rows, fits } => {
            let mut s = format!("{PREFIX},N,M,M_over_N,realizations,eps1_mean,eps1_std,eps1_stderr,eps2_mean,eps2_std,eps2_stderr,de_mean,de_std\n");
            for r in rows {
                let (e1, e2, de) = (&r.eps1, &r.eps2, &r.de);
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    r.point.csv_prefix(),
                    r.dim,
                    r.states,
                    num(r.ratio()),
                    e1.n,
                    num(e1.mean),
                    num(e1.std),
                    num(e1.stderr),
                    num(e2.mean),
                    num(e2.std),
                    num(e2.stderr),
                    num(de.mean),
                    num(de.std)
                )
                .unwrap();
            }
            files.push(("sampling.csv".into(), s));
            files.push(("sampling_fits.json".into(), serde_json::to_string_pretty(fits).expect("fits serialize") + "\n"));
        }
        Tables::Protocol(rows) => {
            let mut s = format!("{PREFIX},realizations,{}\n", PROTOCOL_COLUMNS.map(|c| format!("{c}_max")).join(","));
            for r in rows {
                let vals: Vec<String> = r.max.iter().map(|v| num(*v)).collect();
                writeln!(s, "{},{},{}", r.point.csv_prefix(), r.realizations, vals.join(",")).unwrap();
            }
            files.push(("protocol.csv".into(), s));
        }
    }
    files
}

/// Recomputes every aggregated table of a run directory; returns the written paths.
pub fn aggregate(out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let (_, tables) = compute_tables(out)?;
    let dir = out.join(AGGREGATE_DIR);
    render(&tables)
        .into_iter()
        .map(|(name, contents)| {
            let path = dir.join(name);
            write_atomic(&path, contents.as_bytes())?;
            Ok(path)
        })
        .collect()
}
