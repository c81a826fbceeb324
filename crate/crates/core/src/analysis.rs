//! Local frequency, bandwidth, and the time-domain resonance.
//!
//! Writing (1/Ψ)·∂Ψ/∂t = d ln|Ψ|/dt − i·ω_av splits the logarithmic time
//! derivative into an average frequency ω_av = −Im[Ψ′/Ψ] and an instantaneous
//! bandwidth σ = |Re[Ψ′/Ψ]|. At every extremum of |Ψ(t)| the real part is
//! zero, so σ vanishes there identically.
//!
//! The time-domain resonance is the first maximum of |Ψ(x,t)|² in t. It is
//! located from the sign of d|Ψ|²/dt = 2·Re[Ψ*·∂Ψ/∂t], which comes for free
//! with every sample, and the bracketing sign change is refined by bisection
//! on that derivative. Refining the derivative's root rather than the
//! maximum itself puts σ(t_max) at rounding level.

use rayon::prelude::*;
use thiserror::Error;

use crate::propagator::{PointExpansion, Propagator, PropagatorError, WaveSample};

pub const DEFAULT_UNDERFLOW_GUARD: f64 = 1e-150;

/// The scan starts this far past the propagator's earliest reliable time.
const EARLY_MARGIN: f64 = 1.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("|Ψ| = {abs:e} at x = {x} nm, t = {t} fs is below the underflow guard")]
    AmplitudeUnderflow { x: f64, t: f64, abs: f64 },
    #[error(
        "no maximum found and |Ψ|² reached only {fraction:.3} of its stationary value by t = {t_hi} fs"
    )]
    WindowTooNarrow { t_hi: f64, fraction: f64 },
    #[error("invalid search window: {0}")]
    BadWindow(&'static str),
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
}

/// Average frequency and bandwidth, both in fs⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrequency {
    pub omega_av: f64,
    pub sigma: f64,
}

/// ω_av and σ of one sample with the default underflow guard.
pub fn local_frequency(sample: &WaveSample) -> Result<LocalFrequency, AnalysisError> {
    local_frequency_guarded(sample, DEFAULT_UNDERFLOW_GUARD)
}

pub fn local_frequency_guarded(sample: &WaveSample, guard: f64) -> Result<LocalFrequency, AnalysisError> {
    let abs = sample.psi.norm();
    if !(abs > guard) {
        return Err(AnalysisError::AmplitudeUnderflow {
            x: sample.x,
            t: sample.t,
            abs,
        });
    }
    let log_rate = sample.dpsi_dt / sample.psi;
    Ok(LocalFrequency {
        omega_av: -log_rate.im,
        sigma: log_rate.re.abs(),
    })
}

/// Where and how finely to look for the first maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchWindow {
    pub t_lo: f64,
    pub t_hi: f64,
    /// Points of the logarithmic coarse grid.
    pub points: usize,
    /// Maxima lower than this fraction of the stationary density are ripple.
    pub ripple: f64,
    /// Without a maximum, the density at t_hi must have reached this
    /// fraction of its stationary value, or the window is too narrow.
    pub plateau_fraction: f64,
    pub underflow_guard: f64,
}

impl Default for SearchWindow {
    fn default() -> Self {
        Self {
            t_lo: 0.01,
            t_hi: 50.0,
            points: 2000,
            ripple: 1e-6,
            plateau_fraction: 0.5,
            underflow_guard: DEFAULT_UNDERFLOW_GUARD,
        }
    }
}

impl SearchWindow {
    pub fn with_range(t_lo: f64, t_hi: f64) -> Self {
        Self {
            t_lo,
            t_hi,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), AnalysisError> {
        if !(self.t_lo > 0.0 && self.t_lo.is_finite()) {
            return Err(AnalysisError::BadWindow("t_lo must be positive"));
        }
        if !(self.t_hi > self.t_lo && self.t_hi.is_finite()) {
            return Err(AnalysisError::BadWindow("t_hi must exceed t_lo"));
        }
        if self.points < 3 {
            return Err(AnalysisError::BadWindow("at least three grid points are needed"));
        }
        Ok(())
    }

    fn grid(&self, start: f64) -> Vec<f64> {
        let ratio = self.t_hi / start;
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| start * ratio.powf(i as f64 / last))
            .collect()
    }
}

/// The first maximum of |Ψ(x,·)|², or its absence.
///
/// When `exists` is false the peak fields are NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeDomainResonance {
    pub x: f64,
    pub t_max: f64,
    /// |Ψ|² at the peak over its stationary value (|T_k|² for x ≥ L).
    pub height: f64,
    pub omega_ratio_at_peak: f64,
    pub sigma_at_peak: f64,
    pub exists: bool,
}

impl TimeDomainResonance {
    fn absent(x: f64) -> Self {
        Self {
            x,
            t_max: f64::NAN,
            height: f64::NAN,
            omega_ratio_at_peak: f64::NAN,
            sigma_at_peak: f64::NAN,
            exists: false,
        }
    }

    pub fn t_max(&self) -> Option<f64> {
        self.exists.then_some(self.t_max)
    }

    pub fn omega_ratio(&self) -> Option<f64> {
        self.exists.then_some(self.omega_ratio_at_peak)
    }
}

fn slope(s: &WaveSample) -> f64 {
    2.0 * (s.psi.conj() * s.dpsi_dt).re
}

/// Samples on the grid, dropping early samples where the resonance sum has
/// not converged yet. Such failures are tolerated only while the density is
/// still below `floor`, where no peak can be accepted anyway; a failure
/// after the density has risen above it is an error.
fn scan(point: &PointExpansion<'_>, times: &[f64], floor: f64) -> Result<Vec<WaveSample>, AnalysisError> {
    let results: Vec<Result<WaveSample, PropagatorError>> =
        times.par_iter().map(|&t| point.sample(t)).collect();
    let mut start = 0;
    let mut risen = false;
    for (i, r) in results.iter().enumerate() {
        match r {
            Ok(s) => risen |= s.abs2() >= floor,
            Err(PropagatorError::NotConverged { .. }) if !risen => start = i + 1,
            Err(e) => return Err(e.clone().into()),
        }
    }
    if start == results.len() {
        return Err(AnalysisError::BadWindow("the expansion does not converge anywhere in the window"));
    }
    Ok(results.into_iter().skip(start).map(|r| r.expect("checked above")).collect())
}

/// Locates the first maximum of |Ψ(x,t)|² in the window.
pub fn find_time_domain_resonance(
    prop: &Propagator,
    x: f64,
    window: &SearchWindow,
) -> Result<TimeDomainResonance, AnalysisError> {
    window.validate()?;
    let point = prop.at(x)?;
    let start = window.t_lo.max(EARLY_MARGIN * prop.earliest_time(x));
    if start >= window.t_hi {
        return Err(AnalysisError::BadWindow("the window closes before the expansion converges"));
    }
    let times = window.grid(start);
    let plateau = point.stationary_amplitude().norm_sqr();
    let samples = scan(&point, &times, window.ripple * plateau)?;

    let bracket = samples.windows(2).find(|w| {
        slope(&w[0]) > 0.0 && slope(&w[1]) <= 0.0 && w[0].abs2().max(w[1].abs2()) >= window.ripple * plateau
    });
    let Some(bracket) = bracket else {
        let last = samples.last().expect("scan returns at least one sample");
        let fraction = last.abs2() / plateau;
        if fraction < window.plateau_fraction {
            return Err(AnalysisError::WindowTooNarrow {
                t_hi: window.t_hi,
                fraction,
            });
        }
        return Ok(TimeDomainResonance::absent(x));
    };

    let peak = refine_maximum(&point, bracket[0], bracket[1])?;
    let freq = local_frequency_guarded(&peak, window.underflow_guard)?;
    Ok(TimeDomainResonance {
        x,
        t_max: peak.t,
        height: peak.abs2() / plateau,
        omega_ratio_at_peak: freq.omega_av / prop.system().omega_v(),
        sigma_at_peak: freq.sigma,
        exists: true,
    })
}

/// Bisection on d|Ψ|²/dt between a rising and a falling sample.
fn refine_maximum(
    point: &PointExpansion<'_>,
    rising: WaveSample,
    falling: WaveSample,
) -> Result<WaveSample, AnalysisError> {
    let (mut lo, mut hi) = (rising, falling);
    for _ in 0..200 {
        let mid = 0.5 * (lo.t + hi.t);
        if mid <= lo.t || mid >= hi.t {
            break;
        }
        let s = point.sample(mid)?;
        let d = slope(&s);
        if d > 0.0 {
            lo = s;
        } else if d < 0.0 {
            hi = s;
        } else {
            return Ok(s);
        }
    }
    // The end with the smaller |slope| is the better estimate.
    Ok(if slope(&lo).abs() <= slope(&hi).abs() { lo } else { hi })
}

/// ω_av, σ and |Ψ|² along a time grid at fixed x.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub x: f64,
    pub times: Vec<f64>,
    /// Absent where |Ψ| fell below the underflow guard.
    pub omega_av: Vec<Option<f64>>,
    pub sigma: Vec<Option<f64>>,
    pub abs2: Vec<f64>,
    /// |Ψ|² over its stationary value.
    pub abs2_normalized: Vec<f64>,
    pub omega_ratio: Vec<Option<f64>>,
}

pub fn spectrogram(prop: &Propagator, x: f64, times: &[f64]) -> Result<Spectrogram, AnalysisError> {
    spectrogram_guarded(prop, x, times, DEFAULT_UNDERFLOW_GUARD)
}

pub fn spectrogram_guarded(
    prop: &Propagator,
    x: f64,
    times: &[f64],
    guard: f64,
) -> Result<Spectrogram, AnalysisError> {
    let trace = prop.trace(x, times)?;
    let plateau = prop.at(x)?.stationary_amplitude().norm_sqr();
    let omega_v = prop.system().omega_v();
    let freqs: Vec<Option<LocalFrequency>> = trace
        .samples
        .iter()
        .map(|s| local_frequency_guarded(s, guard).ok())
        .collect();
    Ok(Spectrogram {
        x,
        times: trace.times,
        omega_av: freqs.iter().map(|f| f.map(|f| f.omega_av)).collect(),
        sigma: freqs.iter().map(|f| f.map(|f| f.sigma)).collect(),
        abs2: trace.samples.iter().map(WaveSample::abs2).collect(),
        abs2_normalized: trace.samples.iter().map(|s| s.abs2() / plateau).collect(),
        omega_ratio: freqs.iter().map(|f| f.map(|f| f.omega_av / omega_v)).collect(),
    })
}
