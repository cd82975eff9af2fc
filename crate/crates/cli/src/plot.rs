//! Plot-ready tables (wide format, one series per column) and optional gnuplot scripts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use xxladder::wavefront::{gnuplot_script, write_contours_csv};

use crate::aggregate::{compute_tables, num, Tables};
use crate::error::CliError;
use crate::raw::write_atomic;

pub const PLOT_DIR: &str = "plot";

fn script(data: &str, xlabel: &str, ylabel: &str, logx: bool, logy: bool, series: &[(usize, String)]) -> String {
    let mut s = format!("set datafile separator ','\nset key outside\nset xlabel '{xlabel}'\nset ylabel '{ylabel}'\n");
    if logx {
        s.push_str("set logscale x\n");
    }
    if logy {
        s.push_str("set logscale y\n");
    }
    let parts: Vec<String> =
        series.iter().map(|(col, title)| format!("'{data}' every ::1 using 1:{col} with linespoints title '{title}'")).collect();
    writeln!(s, "plot {}", parts.join(", \\\n     ")).unwrap();
    s
}

/// Writes plot tables (and scripts when `gnuplot` is set) under `out/plot`.
pub fn plot_data(out: &Path, gnuplot: bool) -> Result<Vec<PathBuf>, CliError> {
    let (manifest, tables) = compute_tables(out)?;
    let mut files: Vec<(String, String)> = Vec::new();
    match &tables {
        Tables::LevelStats(rows) => {
            let mut series: Vec<String> = Vec::new();
            let mut hs: Vec<f64> = Vec::new();
            for r in rows {
                let key = format!("L{} alpha{}", r.point.sites, r.point.alpha);
                if !series.contains(&key) {
                    series.push(key);
                }
                if !hs.contains(&r.point.disorder) {
                    hs.push(r.point.disorder);
                }
            }
            let mut s = String::from("h");
            for k in &series {
                write!(s, ",{k} mean_r,{k} stderr").unwrap();
            }
            s.push('\n');
            for h in &hs {
                s.push_str(&num(*h));
                for k in &series {
                    let r = rows.iter().find(|r| r.point.disorder == *h && &format!("L{} alpha{}", r.point.sites, r.point.alpha) == k);
                    let (m, e) = r.map_or((f64::NAN, f64::NAN), |r| (r.mean_r.mean, r.mean_r.stderr));
                    write!(s, ",{},{}", num(m), num(e)).unwrap();
                }
                s.push('\n');
            }
            files.push(("level_stats.csv".into(), s));
            if gnuplot {
                let cols: Vec<(usize, String)> = series.iter().enumerate().map(|(i, k)| (2 + 2 * i, k.clone())).collect();
                files.push(("level_stats.gp".into(), script("level_stats.csv", "h", "<r>", true, false, &cols)));
            }
        }
        Tables::Otoc { curves, .. } => {
            let mut s = String::from("t");
            for c in curves {
                write!(s, ",{} probe{} mean,std", c.point.label(), c.probe).unwrap();
            }
            s.push('\n');
            if let Some(first) = curves.first() {
                for (k, t) in first.times.iter().enumerate() {
                    s.push_str(&num(*t));
                    for c in curves {
                        write!(s, ",{},{}", num(c.re[k].mean), num(c.re[k].std)).unwrap();
                    }
                    s.push('\n');
                }
            }
            files.push(("otoc.csv".into(), s));
            if gnuplot {
                let cols: Vec<(usize, String)> =
                    curves.iter().enumerate().map(|(i, c)| (2 + 2 * i, format!("{} probe{}", c.point.label(), c.probe))).collect();
                let logx = manifest.config.time_grid().is_some_and(|g| matches!(g, xxladder::TimeGrid::Log { .. }));
                files.push(("otoc.gp".into(), script("otoc.csv", "t [1/J]", "Re F", logx, false, &cols)));
            }
        }
        Tables::Lightcone(summaries) => {
            for l in summaries {
                let label = l.point.label();
                let (grid, contours) = (format!("lightcone_{label}.csv"), format!("contours_{label}.csv"));
                let mut g = Vec::new();
                l.grid.write_csv(&mut g).map_err(|e| CliError::io(out, e))?;
                let mut c = Vec::new();
                let list: Vec<_> = l.contours.iter().map(|(c, _)| c.clone()).collect();
                write_contours_csv(&list, &mut c).map_err(|e| CliError::io(out, e))?;
                files.push((grid.clone(), String::from_utf8(g).expect("ascii")));
                files.push((contours.clone(), String::from_utf8(c).expect("ascii")));
                if gnuplot {
                    files.push((format!("lightcone_{label}.gp"), gnuplot_script(&grid, &contours)));
                }
            }
        }
        Tables::Sampling { rows, .. } => {
            let mut labels: Vec<String> = Vec::new();
            for r in rows {
                let label = r.point.label();
                if !labels.contains(&label) {
                    labels.push(label);
                }
            }
            for label in labels {
                let mut s = String::from("M_over_N,eps1_mean,eps1_stderr,eps2_mean,eps2_stderr\n");
                for r in rows.iter().filter(|r| r.point.label() == label) {
                    let (a, b) = (&r.eps1, &r.eps2);
                    writeln!(s, "{},{},{},{},{}", num(r.ratio()), num(a.mean), num(a.stderr), num(b.mean), num(b.stderr)).unwrap();
                }
                let name = format!("sampling_{label}.csv");
                if gnuplot {
                    let cols = [(2, "eps1".to_string()), (4, "eps2".to_string())];
                    files.push((format!("sampling_{label}.gp"), script(&name, "M/N", "saturation error", true, true, &cols)));
                }
                files.push((name, s));
            }
        }
        Tables::Protocol(_) => {
            log::info!("protocol checks have no plot tables; see aggregate/protocol.csv");
        }
    }
    let dir = out.join(PLOT_DIR);
    files
        .into_iter()
        .map(|(name, contents)| {
            let path = dir.join(name);
            write_atomic(&path, contents.as_bytes())?;
            Ok(path)
        })
        .collect()
}
