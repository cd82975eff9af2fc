//! OTOC space-time grids along the lower leg, equal-`eta` contours and
//! dynamical exponents `x ~ t^gamma`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fits::{fit_log_log, FitResult};
use crate::otoc::otoc_profile;
use crate::spin::{build_hamiltonian, build_sector_basis, diagonalize, sigma_z_operator, DisorderRealization, EigenSystem, LadderParams, SectorBasis};

/// Default contour levels.
pub const ETA_LEVELS: [f64; 8] = [0.99, 0.9, 0.75, 0.5, 0.25, 0.1, 0.05, 0.01];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub params: LadderParams,
    pub realizations: usize,
    pub seeds: Vec<u64>,
}

/// Ensemble-mean `Re F(dx, t)` between `sz_(1,1)` and `sz_(1,1+dx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefrontGrid {
    pub distances: Vec<usize>,
    pub times: Vec<f64>,
    /// `values[d][k]` for `distances[d]`, `times[k]`.
    pub values: Vec<Vec<f64>>,
    /// Same layout per realization, kept for per-realization contours.
    pub per_realization: Vec<Vec<Vec<f64>>>,
    pub meta: GridMeta,
}

/// Lower-leg OTOC rows `dx = 1..L-1` for one diagonalized realization.
pub fn realization_profile(eig: &EigenSystem, basis: &SectorBasis, times: &[f64]) -> Result<Vec<Vec<f64>>> {
    let reference = sigma_z_operator(basis, 1, 1)?;
    let probes = (2..=basis.sites()).map(|s| sigma_z_operator(basis, 1, s)).collect::<Result<Vec<_>>>()?;
    otoc_profile(eig, &reference, &probes, times)
}

impl WavefrontGrid {
    /// Averages per-realization profiles produced by [`realization_profile`].
    pub fn from_profiles(params: LadderParams, seeds: Vec<u64>, times: Vec<f64>, profiles: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let first = profiles.first().ok_or(Error::Empty("realization list"))?;
        let rows = first.len();
        if profiles.iter().any(|p| p.len() != rows || p.iter().any(|r| r.len() != times.len())) {
            return Err(Error::GridMismatch);
        }
        let m = profiles.len() as f64;
        let values = (0..rows)
            .map(|d| (0..times.len()).map(|k| profiles.iter().map(|p| p[d][k]).sum::<f64>() / m).collect())
            .collect();
        Ok(Self {
            distances: (1..=rows).collect(),
            times,
            values,
            meta: GridMeta { params, realizations: profiles.len(), seeds },
            per_realization: profiles,
        })
    }

    pub fn row(&self, dx: usize) -> Option<&[f64]> {
        self.distances.iter().position(|&d| d == dx).map(|i| &self.values[i][..])
    }

    /// CSV `dx,t,value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "dx,t,value")?;
        for (d, row) in self.distances.iter().zip(&self.values) {
            for (t, v) in self.times.iter().zip(row) {
                writeln!(out, "{d},{t},{v:.12}")?;
            }
        }
        Ok(())
    }
}

/// Ensemble grid for the given disorder realizations.
pub fn build_spacetime_grid(params: &LadderParams, disorders: &[DisorderRealization], times: &[f64]) -> Result<WavefrontGrid> {
    let basis = build_sector_basis(params.sites)?;
    let profiles = disorders
        .iter()
        .map(|d| realization_profile(&diagonalize(&build_hamiltonian(params, d, &basis)?)?, &basis, times))
        .collect::<Result<Vec<_>>>()?;
    WavefrontGrid::from_profiles(*params, disorders.iter().map(|d| d.seed).collect(), times.to_vec(), profiles)
}

/// First-crossing times of one level.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub eta: f64,
    /// `(dx, t_cross)`, ascending in `dx`.
    pub points: Vec<(usize, f64)>,
    /// Distances whose OTOC never dropped below `eta` on the grid.
    pub never_crossed: Vec<usize>,
    pub fit: Option<FitResult>,
}

impl Contour {
    /// Dynamical exponent of the attached fit.
    pub fn gamma(&self) -> Option<f64> {
        self.fit.as_ref().map(|f| f.param("b"))
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "eta", reason: format!("{eta} is outside (0, 1); eta = 1 has no first crossing") })
    }
}

/// First time `row` drops below `eta`, linearly interpolated between grid points.
pub fn first_crossing(times: &[f64], row: &[f64], eta: f64) -> Option<f64> {
    let k = row.iter().position(|&v| v < eta)?;
    if k == 0 {
        return Some(times[0]);
    }
    let (t0, t1, v0, v1) = (times[k - 1], times[k], row[k - 1], row[k]);
    Some(t0 + (v0 - eta) * (t1 - t0) / (v0 - v1))
}

/// Contour of the ensemble-mean grid.
pub fn extract_contour(grid: &WavefrontGrid, eta: f64) -> Result<Contour> {
    check_eta(eta)?;
    let mut points = Vec::new();
    let mut never_crossed = Vec::new();
    for (&d, row) in grid.distances.iter().zip(&grid.values) {
        match first_crossing(&grid.times, row, eta) {
            Some(t) => points.push((d, t)),
            None => never_crossed.push(d),
        }
    }
    Ok(Contour { eta, points, never_crossed, fit: None })
}

/// Alternative: contours of each realization, then crossing times averaged.
/// A distance is kept only if every realization crosses.
pub fn extract_contour_per_realization(grid: &WavefrontGrid, eta: f64) -> Result<Contour> {
    check_eta(eta)?;
    let mut points = Vec::new();
    let mut never_crossed = Vec::new();
    for (i, &d) in grid.distances.iter().enumerate() {
        let crossings: Option<Vec<f64>> =
            grid.per_realization.iter().map(|p| first_crossing(&grid.times, &p[i], eta)).collect();
        match crossings {
            Some(c) if !c.is_empty() => points.push((d, c.iter().sum::<f64>() / c.len() as f64)),
            _ => never_crossed.push(d),
        }
    }
    Ok(Contour { eta, points, never_crossed, fit: None })
}

/// Smallest distance included in the front fit by default: deep levels skip `dx <= 2`.
pub fn default_min_distance(eta: f64) -> usize {
    if eta < 0.9 {
        3
    } else {
        1
    }
}

/// Log-log fit of `dx` against `t_cross` over `dx >= min_distance`; `gamma` is the slope `b`.
pub fn fit_dynamical_exponent(contour: &Contour, min_distance: usize) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> =
        contour.points.iter().filter(|p| p.0 >= min_distance).map(|&(d, t)| (t, d as f64)).collect();
    if pts.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: pts.len() });
    }
    fit_log_log(&pts)
}

/// Front speeds of a fitted contour.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefrontRates {
    /// `gamma a t^(gamma-1)` at each contour time.
    pub fitted: Vec<(f64, f64)>,
    /// Finite differences between consecutive contour points, at midpoint times.
    pub raw: Vec<(f64, f64)>,
}

pub fn wavefront_rates(contour: &Contour) -> Result<WavefrontRates> {
    let fit = contour.fit.as_ref().ok_or(Error::Unfitted)?;
    let (a, g) = (fit.param("a"), fit.param("b"));
    let fitted = contour.points.iter().map(|&(_, t)| (t, g * a * t.powf(g - 1.0))).collect();
    let raw = contour
        .points
        .windows(2)
        .filter(|w| w[1].1 != w[0].1)
        .map(|w| ((w[0].1 + w[1].1) / 2.0, (w[1].0 as f64 - w[0].0 as f64) / (w[1].1 - w[0].1)))
        .collect();
    Ok(WavefrontRates { fitted, raw })
}

/// CSV `eta,dx,t_cross`.
pub fn write_contours_csv<W: Write>(contours: &[Contour], mut out: W) -> std::io::Result<()> {
    writeln!(out, "eta,dx,t_cross")?;
    for c in contours {
        for (d, t) in &c.points {
            writeln!(out, "{},{d},{t:.12}", c.eta)?;
        }
    }
    Ok(())
}

/// A gnuplot script drawing the grid as a heat map with contour points on top.
pub fn gnuplot_script(grid_csv: &str, contours_csv: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key outside\n\
         set xlabel 'distance dx'\n\
         set ylabel 't [1/J]'\n\
         set cblabel 'Re F'\n\
         set view map\n\
         plot '{grid_csv}' every ::1 using 1:2:3 with image notitle, \\\n\
         \x20    for [e in '0.99 0.9 0.75 0.5 0.25 0.1 0.05 0.01'] '{contours_csv}' every ::1 \\\n\
         \x20    using ($1 == e+0 ? $2 : 1/0):3 with linespoints title 'eta='.e\n"
    )
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            for &k in &idx[i..=j] {
                r[k] = (i + j) as f64 / 2.0;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::disorder_ensemble;
    use crate::time_grid::linear_times;

    fn synthetic(f: impl Fn(usize, f64) -> f64, step: f64) -> WavefrontGrid {
        let times = linear_times(0.0, 20.0, (20.0 / step) as usize + 1).unwrap();
        let rows: Vec<Vec<f64>> = (1..=5).map(|d| times.iter().map(|&t| f(d, t)).collect()).collect();
        let p = LadderParams::new(6, 1.0, 0.0).unwrap();
        WavefrontGrid::from_profiles(p, vec![0], times, vec![rows]).unwrap()
    }

    #[test]
    fn analytic_inversion() {
        let g = synthetic(|d, t| (-t / d as f64).exp(), 0.001);
        let c = extract_contour(&g, 0.3).unwrap();
        for &(d, t) in &c.points {
            assert!((t + d as f64 * 0.3f64.ln()).abs() < 1e-5);
        }
        let fit = fit_dynamical_exponent(&c, 1).unwrap();
        assert!((fit.param("b") - 1.0).abs() < 1e-5);
    }

    #[test]
    fn diffusive_front_and_rescaling() {
        let c = Contour { eta: 0.5, points: (1..=5).map(|d| (d, (d * d) as f64)).collect(), never_crossed: vec![], fit: None };
        let g = fit_dynamical_exponent(&c, 1).unwrap();
        assert!((g.param("b") - 0.5).abs() < 1e-12);
        let scaled = Contour { points: c.points.iter().map(|&(d, t)| (d, 3.7 * t)).collect(), ..c.clone() };
        assert!((fit_dynamical_exponent(&scaled, 1).unwrap().param("b") - 0.5).abs() < 1e-12);
        assert!(matches!(fit_dynamical_exponent(&c, 4), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn never_decaying_grid() {
        let g = synthetic(|_, _| 1.0, 0.5);
        let c = extract_contour(&g, 0.5).unwrap();
        assert!(c.points.is_empty());
        assert_eq!(c.never_crossed, vec![1, 2, 3, 4, 5]);
        assert!(extract_contour(&g, 1.0).is_err());
        assert!(extract_contour(&g, 0.0).is_err());
    }

    #[test]
    fn rates() {
        let mut c = Contour { eta: 0.5, points: (1..=4).map(|d| (d, d as f64)).collect(), never_crossed: vec![], fit: None };
        assert!(matches!(wavefront_rates(&c), Err(Error::Unfitted)));
        c.fit = Some(fit_dynamical_exponent(&c, 1).unwrap());
        let r = wavefront_rates(&c).unwrap();
        assert!(r.fitted.iter().all(|&(_, v)| (v - 1.0).abs() < 1e-12));
        assert!(r.raw.iter().all(|&(_, v)| (v - 1.0).abs() < 1e-12));

        c.points = (1..=4).map(|d| (d, (d * d) as f64)).collect();
        c.fit = Some(fit_dynamical_exponent(&c, 1).unwrap());
        let r = wavefront_rates(&c).unwrap();
        for &(t, v) in &r.fitted {
            assert!((v - 0.5 * t.powf(-0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn small_ensemble_grid() {
        let p = LadderParams::new(4, 1.0, 1.0).unwrap();
        let times = linear_times(0.0, 5.0, 11).unwrap();
        let g = build_spacetime_grid(&p, &disorder_ensemble(&p, 3, 2), &times).unwrap();
        assert_eq!(g.distances, vec![1, 2, 3]);
        for row in &g.values {
            assert!((row[0] - 1.0).abs() < 1e-9);
            assert!(row.iter().all(|v| v.is_finite() && v.abs() <= 1.0 + 1e-10));
        }
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("dx,t,value\n1,0,1.0000"));
        let per = extract_contour_per_realization(&g, 0.9).unwrap();
        assert_eq!(per.points.len() + per.never_crossed.len(), 3);
    }

    #[test]
    fn rank_correlation() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]) - 1.0).abs() < 1e-12);
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
    }
}
