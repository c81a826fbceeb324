//! Unit system, physical constants and the barrier parameter set.
//!
//! Everything public is expressed in eV, nm and fs. The effective mass is a
//! ratio to the bare electron mass.

use num_complex::Complex64;
use thiserror::Error;

/// ħ in eV·fs.
pub const HBAR_EV_FS: f64 = 0.658_211_956_9;

/// ħ²/2mₑ in eV·nm² for the bare electron mass.
pub const HBAR2_OVER_2ME_EV_NM2: f64 = 0.038_099_8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SystemError {
    #[error("parameter `{name}` must be strictly positive and finite (got {value})")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("incidence energy equals the barrier height (E = V = {0} eV); κ₀ is singular")]
    EEqualsV(f64),
}

/// The two constants the whole crate is built on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysConstants {
    pub hbar: f64,
    pub hbar2_over_2me: f64,
}

impl PhysConstants {
    pub const CODATA: PhysConstants = PhysConstants {
        hbar: HBAR_EV_FS,
        hbar2_over_2me: HBAR2_OVER_2ME_EV_NM2,
    };
}

impl Default for PhysConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

/// A rectangular barrier of height `v` on `0 ≤ x ≤ l`, probed by a cutoff
/// plane wave of energy `e`.
///
/// Derived quantities are filled in once by [`BarrierSystem::new`] and never
/// change afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSystem {
    v: f64,
    e: f64,
    l: f64,
    mass_ratio: f64,
    h2m: f64,
    k: f64,
    kappa0: Complex64,
    omega_v: f64,
    alpha: f64,
    u: f64,
}

fn positive(name: &'static str, value: f64) -> Result<f64, SystemError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(SystemError::NonPositiveParameter { name, value })
    }
}

impl BarrierSystem {
    pub fn new(v: f64, e: f64, l: f64, mass_ratio: f64) -> Result<Self, SystemError> {
        let v = positive("V", v)?;
        let e = positive("E", e)?;
        let l = positive("L", l)?;
        let mass_ratio = positive("mass_ratio", mass_ratio)?;
        if (v - e).abs() <= 1e-14 * v {
            return Err(SystemError::EEqualsV(v));
        }
        let h2m = HBAR2_OVER_2ME_EV_NM2 / mass_ratio;
        let k = (e / h2m).sqrt();
        // E > V is allowed; κ₀ then becomes imaginary.
        let kappa0 = Complex64::new((v - e) / h2m, 0.0).sqrt();
        Ok(Self {
            v,
            e,
            l,
            mass_ratio,
            h2m,
            k,
            kappa0,
            omega_v: v / HBAR_EV_FS,
            alpha: (v / h2m).sqrt() * l,
            u: v / e,
        })
    }

    /// Builds the system realising a given opacity `alpha` and ratio `u = V/E`
    /// at fixed barrier height, by solving the opacity relation for `L`.
    pub fn from_opacity(alpha: f64, u: f64, v: f64, mass_ratio: f64) -> Result<Self, SystemError> {
        let alpha = positive("alpha", alpha)?;
        let u = positive("u", u)?;
        let v = positive("V", v)?;
        let mass_ratio = positive("mass_ratio", mass_ratio)?;
        let h2m = HBAR2_OVER_2ME_EV_NM2 / mass_ratio;
        let l = alpha / (v / h2m).sqrt();
        Self::new(v, v / u, l, mass_ratio)
    }

    /// Same physics with a different barrier width.
    pub fn with_width(&self, l: f64) -> Result<Self, SystemError> {
        Self::new(self.v, self.e, l, self.mass_ratio)
    }

    /// Same barrier, different incidence energy.
    pub fn with_energy(&self, e: f64) -> Result<Self, SystemError> {
        Self::new(self.v, e, self.l, self.mass_ratio)
    }

    /// Barrier height (eV).
    pub fn v(&self) -> f64 {
        self.v
    }

    /// Incidence energy (eV).
    pub fn e(&self) -> f64 {
        self.e
    }

    /// Barrier width (nm).
    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn mass_ratio(&self) -> f64 {
        self.mass_ratio
    }

    /// ħ²/2m for the effective mass (eV·nm²).
    pub fn hbar2_over_2m(&self) -> f64 {
        self.h2m
    }

    /// ħ/m in nm²/fs.
    pub fn hbar_over_m(&self) -> f64 {
        2.0 * self.h2m / HBAR_EV_FS
    }

    /// Incident wavenumber k (nm⁻¹).
    pub fn k(&self) -> f64 {
        self.k
    }

    /// Under-barrier decay constant κ₀ (nm⁻¹); real for E < V.
    pub fn kappa0(&self) -> f64 {
        self.kappa0.re
    }

    /// κ₀ as a complex number, purely imaginary above the barrier.
    pub fn kappa0_complex(&self) -> Complex64 {
        self.kappa0
    }

    /// Cut-off frequency V/ħ (fs⁻¹).
    pub fn omega_v(&self) -> f64 {
        self.omega_v
    }

    /// Opacity √(2mV)·L/ħ.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Ratio V/E.
    pub fn u(&self) -> f64 {
        self.u
    }

    /// 2mV/ħ² (nm⁻²), the squared wavenumber scale of the barrier.
    pub fn barrier_k2(&self) -> f64 {
        self.v / self.h2m
    }

    pub fn is_tunneling(&self) -> bool {
        self.e < self.v
    }

    /// Stationary angular frequency E/ħ (fs⁻¹).
    pub fn omega_e(&self) -> f64 {
        self.e / HBAR_EV_FS
    }
}
