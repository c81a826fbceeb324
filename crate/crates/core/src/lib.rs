//! Transient tunneling of a cutoff plane wave through a rectangular barrier.
//!
//! A wave Θ(−x)(e^{ikx} − e^{−ikx}) is released at t = 0 in front of a barrier
//! of height V on 0 ≤ x ≤ L. The time-dependent solution is written in closed
//! form as a sum of Moshinsky functions over the transmission poles of the
//! barrier, which gives Ψ(x,t) and ∂Ψ/∂t everywhere for x > 0 without any
//! time stepping.
//!
//! The modules build on each other:
//!
//! - [`units`]: the parameter set in eV, nm and fs.
//! - [`special`]: the Faddeeva and Moshinsky functions.
//! - [`stationary`]: the time-independent scattering solution.
//! - [`resonances`]: the complex poles and their Gamow states.
//! - [`propagator`]: Ψ(x,t) from the resonance expansion.
//! - [`analysis`]: local frequency, bandwidth and the first maximum in time.
//! - [`sweeps`]: scans over width, position and opacity.
//! - [`oracle`]: an independent Crank–Nicolson integrator for checking.
//!
//! ```
//! use qshutter::{find_time_domain_resonance, BarrierSystem, Propagator, SearchWindow};
//!
//! let sys = BarrierSystem::new(0.3, 0.001, 4.0, 0.067)?;
//! let prop = Propagator::new(&sys)?;
//! let peak = find_time_domain_resonance(&prop, sys.l(), &SearchWindow::default())?;
//! assert!((peak.t_max - 5.17).abs() < 0.05);
//! # Ok::<(), qshutter::Error>(())
//! ```

pub mod analysis;
pub mod oracle;
pub mod propagator;
pub mod resonances;
pub mod special;
pub mod stationary;
pub mod sweeps;
pub mod units;

pub use analysis::{
    find_time_domain_resonance, local_frequency, spectrogram, AnalysisError, LocalFrequency, SearchWindow,
    Spectrogram, TimeDomainResonance,
};
pub use oracle::{cn_evolve, CnConfig, CnTraces, OracleError};
pub use propagator::{Propagator, PropagatorConfig, PropagatorError, WaveSample, WaveTrace};
pub use resonances::{find_poles, PoleSet, ResonanceError, ResonancePole};
pub use special::{faddeeva, moshinsky_m, SpecialError};
pub use stationary::{StationaryError, StationaryState};
pub use sweeps::{
    opacity_window, sweep_freq_vs_alpha, sweep_freq_vs_x, sweep_tmax_vs_l, OpacityWindow, SweepError,
    SweepOptions, SweepTable,
};
pub use units::{BarrierSystem, SystemError};

/// Any error the library can return.
#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Stationary(#[from] StationaryError),
    #[error(transparent)]
    Resonance(#[from] ResonanceError),
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl Error {
    /// True when the failure is a numerical non-convergence rather than bad
    /// input.
    pub fn is_convergence(&self) -> bool {
        use PropagatorError as P;
        let prop = |e: &PropagatorError| matches!(e, P::NotConverged { .. } | P::Resonance(_) | P::Special(_));
        match self {
            Error::Special(_) | Error::Resonance(_) => true,
            Error::Propagator(e) => prop(e),
            Error::Analysis(AnalysisError::Propagator(e)) => prop(e),
            Error::Analysis(AnalysisError::AmplitudeUnderflow { .. } | AnalysisError::WindowTooNarrow { .. }) => true,
            Error::Sweep(SweepError::Analysis(a)) => Error::Analysis(a.clone()).is_convergence(),
            Error::Sweep(SweepError::NoCrossing { .. }) => true,
            Error::Oracle(OracleError::AbsorberLeak { .. }) => true,
            _ => false,
        }
    }
}
