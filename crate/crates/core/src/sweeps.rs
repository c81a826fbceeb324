//! Parameter scans of the time-domain resonance.
//!
//! Each grid point builds its own pole set and propagator, so the scans are
//! plain parallel maps. Results are keyed by the independent variable and
//! sorted afterwards, which makes the tables independent of grid order and
//! thread count.

use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::{find_time_domain_resonance, AnalysisError, SearchWindow, TimeDomainResonance};
use crate::propagator::{Propagator, PropagatorConfig, PropagatorError};
use crate::units::{BarrierSystem, SystemError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("empty or non-finite grid")]
    BadGrid,
    #[error("no crossing of {what} in α ∈ [{lo}, {hi}] at u = {u}")]
    NoCrossing { what: &'static str, u: f64, lo: f64, hi: f64 },
    #[error("u = {0} does not describe tunneling (u > 1 is required)")]
    NotTunneling(f64),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

impl From<PropagatorError> for SweepError {
    fn from(e: PropagatorError) -> Self {
        Self::Analysis(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    TmaxVsL,
    FreqVsX,
    FreqVsAlpha,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub independent: f64,
    pub t_max: Option<f64>,
    pub omega_ratio: Option<f64>,
    /// |Ψ|² at the peak over its stationary value.
    pub height: Option<f64>,
    pub exists: bool,
}

impl SweepRow {
    fn from_resonance(independent: f64, r: &TimeDomainResonance) -> Self {
        Self {
            independent,
            t_max: r.t_max(),
            omega_ratio: r.omega_ratio(),
            height: r.exists.then_some(r.height),
            exists: r.exists,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub kind: SweepKind,
    /// The system the scan starts from; the scanned parameter varies per row.
    pub template: BarrierSystem,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    fn sorted(kind: SweepKind, template: BarrierSystem, mut rows: Vec<SweepRow>) -> Self {
        rows.sort_by(|a, b| a.independent.total_cmp(&b.independent));
        Self { kind, template, rows }
    }

    /// (independent, t_max) for the rows with a resonance.
    pub fn peaks(&self) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter_map(|r| r.t_max.map(|t| (r.independent, t)))
            .collect()
    }
}

/// Numerical settings shared by all scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub propagator: PropagatorConfig,
    pub window: SearchWindow,
    /// The window's upper end is doubled this many times at most when the
    /// density has not settled by then.
    pub max_window_doublings: u32,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            propagator: PropagatorConfig::default(),
            window: SearchWindow::default(),
            max_window_doublings: 6,
        }
    }
}

fn check_grid(grid: &[f64]) -> Result<(), SweepError> {
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) {
        Err(SweepError::BadGrid)
    } else {
        Ok(())
    }
}

/// Resonance search that widens the window while the density is still rising.
pub fn locate_resonance(
    prop: &Propagator,
    x: f64,
    opts: &SweepOptions,
) -> Result<TimeDomainResonance, AnalysisError> {
    let mut window = opts.window;
    let mut doublings = 0;
    loop {
        match find_time_domain_resonance(prop, x, &window) {
            Err(AnalysisError::WindowTooNarrow { .. }) if doublings < opts.max_window_doublings => {
                window.t_hi *= 2.0;
                doublings += 1;
            }
            other => return other,
        }
    }
}

fn resonance_at_edge(sys: &BarrierSystem, opts: &SweepOptions) -> Result<TimeDomainResonance, SweepError> {
    let prop = Propagator::with_config(sys, opts.propagator)?;
    Ok(locate_resonance(&prop, sys.l(), opts)?)
}

/// The three indices i < j < k with t(i) > t(j) < t(k) around the deepest
/// interior minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Basin {
    pub left: usize,
    pub minimum: usize,
    pub right: usize,
    pub l_min: f64,
    pub t_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Index of the first row of the fitted suffix.
    pub start: usize,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TmaxVsL {
    pub table: SweepTable,
    pub basin: Option<Basin>,
    pub linear: Option<LinearFit>,
}

/// Ordinary least squares, returning (slope, intercept, R²).
pub fn least_squares(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, my - slope * mx, r2)
}

/// Largest suffix (at least three points) on which a line fits with
/// R² above `threshold`.
pub fn linear_suffix(points: &[(f64, f64)], threshold: f64) -> Option<LinearFit> {
    (0..points.len().saturating_sub(2)).find_map(|start| {
        let (slope, intercept, r_squared) = least_squares(&points[start..]);
        (r_squared > threshold).then_some(LinearFit {
            slope,
            intercept,
            r_squared,
            start,
            points: points.len() - start,
        })
    })
}

/// Deepest point that has a higher value somewhere on both sides.
pub fn find_basin(points: &[(f64, f64)]) -> Option<Basin> {
    let argmax = |range: std::ops::Range<usize>| {
        range.max_by(|&a, &b| points[a].1.total_cmp(&points[b].1))
    };
    (1..points.len().saturating_sub(1))
        .filter_map(|j| {
            let left = argmax(0..j)?;
            let right = argmax(j + 1..points.len())?;
            (points[left].1 > points[j].1 && points[right].1 > points[j].1).then_some(Basin {
                left,
                minimum: j,
                right,
                l_min: points[j].0,
                t_min: points[j].1,
            })
        })
        .min_by(|a, b| a.t_min.total_cmp(&b.t_min))
}

/// t_max at the barrier edge as a function of the barrier width.
pub fn sweep_tmax_vs_l(l_grid: &[f64], template: &BarrierSystem, opts: &SweepOptions) -> Result<TmaxVsL, SweepError> {
    check_grid(l_grid)?;
    let rows = l_grid
        .par_iter()
        .map(|&l| {
            let sys = template.with_width(l)?;
            Ok(SweepRow::from_resonance(l, &resonance_at_edge(&sys, opts)?))
        })
        .collect::<Result<Vec<_>, SweepError>>()?;
    let table = SweepTable::sorted(SweepKind::TmaxVsL, *template, rows);
    let peaks = table.peaks();
    Ok(TmaxVsL {
        basin: find_basin(&peaks),
        linear: linear_suffix(&peaks, 0.999),
        table,
    })
}

/// t_max and ω_av/ω_V at positions inside and beyond the barrier.
pub fn sweep_freq_vs_x(x_grid: &[f64], sys: &BarrierSystem, opts: &SweepOptions) -> Result<SweepTable, SweepError> {
    check_grid(x_grid)?;
    if x_grid.iter().any(|&x| x <= 0.0) {
        return Err(SweepError::BadGrid);
    }
    let prop = Propagator::with_config(sys, opts.propagator)?;
    let rows = x_grid
        .par_iter()
        .map(|&x| Ok(SweepRow::from_resonance(x, &locate_resonance(&prop, x, opts)?)))
        .collect::<Result<Vec<_>, SweepError>>()?;
    Ok(SweepTable::sorted(SweepKind::FreqVsX, *sys, rows))
}

/// ω_av/ω_V at the barrier edge as a function of the opacity at fixed u.
///
/// Each α is realised at the reference height `v_ref` by adjusting L.
pub fn sweep_freq_vs_alpha(
    alpha_grid: &[f64],
    u: f64,
    v_ref: f64,
    mass_ratio: f64,
    opts: &SweepOptions,
) -> Result<SweepTable, SweepError> {
    check_grid(alpha_grid)?;
    if !(u > 1.0) {
        return Err(SweepError::NotTunneling(u));
    }
    let template = BarrierSystem::from_opacity(alpha_grid[0], u, v_ref, mass_ratio)?;
    let rows = alpha_grid
        .par_iter()
        .map(|&alpha| {
            let sys = BarrierSystem::from_opacity(alpha, u, v_ref, mass_ratio)?;
            Ok(SweepRow::from_resonance(alpha, &resonance_at_edge(&sys, opts)?))
        })
        .collect::<Result<Vec<_>, SweepError>>()?;
    Ok(SweepTable::sorted(SweepKind::FreqVsAlpha, template, rows))
}

/// α values where ω_av/ω_V crosses 1 between neighbouring rows, refined by
/// bisection to `tol`.
pub fn ratio_crossings(
    table: &SweepTable,
    u: f64,
    v_ref: f64,
    mass_ratio: f64,
    tol: f64,
    opts: &SweepOptions,
) -> Result<Vec<f64>, SweepError> {
    let mut out = Vec::new();
    for pair in table.rows.windows(2) {
        let (Some(a), Some(b)) = (pair[0].omega_ratio, pair[1].omega_ratio) else {
            continue;
        };
        if (a - 1.0).signum() != (b - 1.0).signum() {
            let alpha = bisect(pair[0].independent, pair[1].independent, a < 1.0, tol, |alpha| {
                let sys = BarrierSystem::from_opacity(alpha, u, v_ref, mass_ratio)?;
                Ok(resonance_at_edge(&sys, opts)?.omega_ratio().map(|r| r < 1.0))
            })?;
            out.push(alpha);
        }
    }
    Ok(out)
}

/// Bisection on a predicate known at both ends. `lo_state` is the value at
/// `lo`; an undecided (None) midpoint counts as the `lo` side.
fn bisect(
    mut lo: f64,
    mut hi: f64,
    lo_state: bool,
    tol: f64,
    mut pred: impl FnMut(f64) -> Result<Option<bool>, SweepError>,
) -> Result<f64, SweepError> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid)?.unwrap_or(lo_state) == lo_state {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpacityWindow {
    /// Smallest opacity at which the edge density has a first maximum.
    pub alpha_c: f64,
    /// Opacity where ω_av/ω_V at the peak first rises through 1.
    pub alpha_u: f64,
}

/// Coarse α grid used to bracket the window before bisection.
pub const WINDOW_SCAN: (f64, f64, usize) = (0.5, 6.0, 45);

/// Locates [α_c, α_u] at ratio u = V/E.
pub fn opacity_window(
    u: f64,
    v_ref: f64,
    mass_ratio: f64,
    tol: f64,
    opts: &SweepOptions,
) -> Result<OpacityWindow, SweepError> {
    let (lo, hi, n) = WINDOW_SCAN;
    let grid: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let table = sweep_freq_vs_alpha(&grid, u, v_ref, mass_ratio, opts)?;
    let rows = &table.rows;

    let first = rows
        .iter()
        .position(|r| r.exists)
        .ok_or(SweepError::NoCrossing { what: "resonance existence", u, lo, hi })?;
    let alpha_c = if first == 0 {
        rows[0].independent
    } else {
        bisect(rows[first - 1].independent, rows[first].independent, false, tol, |alpha| {
            let sys = BarrierSystem::from_opacity(alpha, u, v_ref, mass_ratio)?;
            Ok(Some(resonance_at_edge(&sys, opts)?.exists))
        })?
    };

    let upper = rows[first..]
        .windows(2)
        .find(|w| matches!((w[0].omega_ratio, w[1].omega_ratio), (Some(a), Some(b)) if a < 1.0 && b >= 1.0))
        .ok_or(SweepError::NoCrossing { what: "ω_av/ω_V = 1", u, lo: rows[first].independent, hi })?;
    let alpha_u = bisect(upper[0].independent, upper[1].independent, true, tol, |alpha| {
        let sys = BarrierSystem::from_opacity(alpha, u, v_ref, mass_ratio)?;
        Ok(resonance_at_edge(&sys, opts)?.omega_ratio().map(|r| r < 1.0))
    })?;
    Ok(OpacityWindow { alpha_c, alpha_u })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basin_detection() {
        let pts: Vec<(f64, f64)> = [5.0, 4.0, 3.0, 3.5, 5.0, 6.0, 7.0]
            .iter()
            .enumerate()
            .map(|(i, &t)| (i as f64, t))
            .collect();
        let b = find_basin(&pts).unwrap();
        assert_eq!((b.left, b.minimum, b.right), (0, 2, 6));
        let monotone: Vec<(f64, f64)> = (0..5).map(|i| (f64::from(i), f64::from(i))).collect();
        assert!(find_basin(&monotone).is_none());
    }

    #[test]
    fn linear_suffix_skips_the_curved_start() {
        let pts: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let x = f64::from(i);
                (x, if i < 5 { 10.0 - x * x } else { 2.0 * x + 1.0 })
            })
            .collect();
        let fit = linear_suffix(&pts, 0.999).unwrap();
        assert!(fit.start <= 5);
        assert!((fit.slope - 2.0).abs() < 1e-12 || fit.start < 5);
        assert!(fit.r_squared > 0.999);
    }

    #[test]
    fn bisection_brackets_the_switch() {
        let x = bisect(0.0, 1.0, false, 1e-9, |a| Ok(Some(a > 0.3))).unwrap();
        assert!((x - 0.3).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        let sys = BarrierSystem::new(0.3, 0.001, 4.0, 0.067).unwrap();
        let opts = SweepOptions::default();
        assert_eq!(sweep_tmax_vs_l(&[], &sys, &opts), Err(SweepError::BadGrid));
        assert!(matches!(
            sweep_freq_vs_x(&[1.0, -2.0], &sys, &opts),
            Err(SweepError::BadGrid)
        ));
        assert_eq!(
            sweep_freq_vs_alpha(&[1.0], 0.5, 0.3, 0.067, &opts),
            Err(SweepError::NotTunneling(0.5))
        );
    }

    #[test]
    fn table_does_not_depend_on_grid_order() {
        let sys = BarrierSystem::new(0.3, 0.001, 4.0, 0.067).unwrap();
        let opts = SweepOptions::default();
        let a = sweep_tmax_vs_l(&[3.0, 4.0, 5.0], &sys, &opts).unwrap();
        let b = sweep_tmax_vs_l(&[5.0, 3.0, 4.0], &sys, &opts).unwrap();
        assert_eq!(a, b);
    }
}
