//! Plane-wave scattering off the rectangular barrier.
//!
//! With q² = k² − 2mV/ħ² inside the barrier, the solution for unit incidence
//! e^{ikx} is fixed by matching at x = 0 and x = L. The whole problem then
//! hangs on one function,
//!
//! ```text
//! P(k) = 2k·cos(qL) − i(2k² − 2mV/ħ²)·sin(qL)/q,
//! ```
//!
//! through T(k) = 2k·e^{−ikL}/P(k) and, inside the barrier,
//! Φ_k(x) = 2k·[cos(q(x−L)) + ik·sin(q(x−L))/q]/P(k).
//! cos(qL) and sin(qL)/q are entire in q², so complex k needs no branch
//! bookkeeping. The zeros of P are the resonance poles.

use num_complex::Complex64;
use thiserror::Error;

use crate::units::BarrierSystem;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum StationaryError {
    #[error("wavenumber must be non-zero")]
    ZeroWavenumber,
    #[error("x = {x} nm lies outside the barrier [0, {l}] nm")]
    XOutOfRange { x: f64, l: f64 },
}

/// cos(qx) and sin(qx)/q as entire functions of q².
pub(crate) fn cos_sinc(q2: Complex64, x: f64) -> (Complex64, Complex64) {
    let th2 = q2 * x * x;
    if th2.norm() < 1e-8 {
        let c = 1.0 - th2 / 2.0 + th2 * th2 / 24.0;
        let s = x * (1.0 - th2 / 6.0 + th2 * th2 / 120.0);
        return (c, s);
    }
    let q = q2.sqrt();
    ((q * x).cos(), (q * x).sin() / q)
}

/// (x·cos(qx) − sin(qx)/q)/q², the q-derivative companion of [`cos_sinc`].
fn sinc_slope(q2: Complex64, x: f64, c: Complex64, s: Complex64) -> Complex64 {
    let th2 = q2 * x * x;
    if th2.norm() < 1e-4 {
        return x * x * x * (-1.0 / 3.0 + th2 / 30.0 - th2 * th2 / 840.0);
    }
    (x * c - s) / q2
}

/// P(k), the denominator of the transmission amplitude.
pub fn pole_function(k: Complex64, sys: &BarrierSystem) -> Complex64 {
    let u = sys.barrier_k2();
    let l = sys.l();
    let q2 = k * k - u;
    if (q2 * l * l).norm() > 1e-4 {
        let q = parity_root(q2, k);
        let th = 0.5 * q * l;
        let (a, b) = parity_factors(k, q, u, th, th.cos(), th.sin());
        return 2.0 * a * b / q;
    }
    let (c, s) = cos_sinc(q2, l);
    2.0 * k * c - I * (2.0 * k * k - u) * s
}

/// The root of q² closest to k, so that q + k never cancels.
fn parity_root(q2: Complex64, k: Complex64) -> Complex64 {
    let q = q2.sqrt();
    if (q * k.conj()).re < 0.0 {
        -q
    } else {
        q
    }
}

/// A = k·cos θ − iq·sin θ and B = q·cos θ − ik·sin θ, θ = qL/2.
///
/// Both are written around k·e^{−iθ}, using q − k = −U/(q + k). In the lower
/// half-plane that term is small, and so are A and B near a pole, while
/// k·cos θ and q·sin θ are large. The direct forms lose digits in proportion.
fn parity_factors(
    k: Complex64,
    q: Complex64,
    u: f64,
    th: Complex64,
    c: Complex64,
    s: Complex64,
) -> (Complex64, Complex64) {
    let wave = k * (-I * th).exp();
    let shift = u / (q + k);
    (wave + I * shift * s, wave - shift * c)
}

/// P′(k), analytic.
///
/// Away from q = 0 this uses the parity factorisation P = (2/q)·A·B (see
/// [`parity_factors`]). Since A′ = (1 − ikL/2)·B/q and B′ = (1 − ikL/2)·A/q,
///
/// ```text
/// P′ = [2(1 − ikL/2)(A² + B²) − k·P]/q².
/// ```
///
/// The expanded derivative cancels badly at the resonance poles, losing up to
/// nine digits by n ≈ 40. Here one of A, B simply vanishes there.
pub fn pole_function_derivative(k: Complex64, sys: &BarrierSystem) -> Complex64 {
    let u = sys.barrier_k2();
    let l = sys.l();
    let q2 = k * k - u;
    if (q2 * l * l).norm() > 1e-4 {
        let q = parity_root(q2, k);
        let th = 0.5 * q * l;
        let (c, s) = (th.cos(), th.sin());
        let (a, b) = parity_factors(k, q, u, th, c, s);
        let p = 2.0 * a * b / q;
        return (2.0 * (1.0 - 0.5 * I * k * l) * (a * a + b * b) - k * p) / q2;
    }
    let (c, s) = cos_sinc(q2, l);
    let d = sinc_slope(q2, l, c, s);
    2.0 * c - 2.0 * k * k * l * s - 4.0 * I * k * s - I * (2.0 * k * k - u) * k * d
}

/// The two terms of P(k) in magnitude; the scale against which |P| is judged.
pub(crate) fn pole_function_scale(k: Complex64, sys: &BarrierSystem) -> f64 {
    let u = sys.barrier_k2();
    let (c, s) = cos_sinc(k * k - u, sys.l());
    (2.0 * k * c).norm() + ((2.0 * k * k - u) * s).norm()
}

/// Transmission amplitude T(k); the transmitted wave is T·e^{ikx}.
pub fn transmission(k: Complex64, sys: &BarrierSystem) -> Result<Complex64, StationaryError> {
    if k == Complex64::new(0.0, 0.0) {
        return Err(StationaryError::ZeroWavenumber);
    }
    Ok(transmission_unchecked(k, sys))
}

pub(crate) fn transmission_unchecked(k: Complex64, sys: &BarrierSystem) -> Complex64 {
    2.0 * k * (-I * k * sys.l()).exp() / pole_function(k, sys)
}

/// Internal stationary wave Φ_k(x) for 0 ≤ x ≤ L.
pub fn phi_stationary(x: f64, k: f64, sys: &BarrierSystem) -> Result<Complex64, StationaryError> {
    check_inside(x, sys)?;
    if k == 0.0 {
        return Err(StationaryError::ZeroWavenumber);
    }
    Ok(phi_unchecked(x, Complex64::new(k, 0.0), sys))
}

/// Φ_k(x) for complex k, used to sum the resonance series in closed form.
pub(crate) fn phi_unchecked(x: f64, k: Complex64, sys: &BarrierSystem) -> Complex64 {
    let u = sys.barrier_k2();
    let (c, s) = cos_sinc(k * k - u, x - sys.l());
    2.0 * k * (c + I * k * s) / pole_function(k, sys)
}

fn check_inside(x: f64, sys: &BarrierSystem) -> Result<(), StationaryError> {
    if (0.0..=sys.l()).contains(&x) {
        Ok(())
    } else {
        Err(StationaryError::XOutOfRange { x, l: sys.l() })
    }
}

/// Complete scattering state at real k.
///
/// Inside the barrier Φ_k(x) = A·e^{κx} + B·e^{−κx} with κ = √(2mV/ħ² − k²).
/// κ is real under the barrier and purely imaginary above it, so the same
/// pair covers both regimes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryState {
    pub k: f64,
    pub t: Complex64,
    pub r: Complex64,
    pub a: Complex64,
    pub b: Complex64,
    pub kappa: Complex64,
    l: f64,
}

impl StationaryState {
    pub fn new(k: f64, sys: &BarrierSystem) -> Result<Self, StationaryError> {
        if k == 0.0 {
            return Err(StationaryError::ZeroWavenumber);
        }
        let kc = Complex64::new(k, 0.0);
        let l = sys.l();
        let p = pole_function(kc, sys);
        let kappa = Complex64::new(sys.barrier_k2() - k * k, 0.0).sqrt();
        let g = I * k / kappa;
        let a = k * (1.0 + g) * (-kappa * l).exp() / p;
        let b = k * (1.0 - g) * (kappa * l).exp() / p;
        let t = transmission_unchecked(kc, sys);
        Ok(Self {
            k,
            t,
            r: a + b - 1.0,
            a,
            b,
            kappa,
            l,
        })
    }

    /// Φ_k(x) from the exponential basis.
    pub fn psi(&self, x: f64) -> Complex64 {
        self.a * (self.kappa * x).exp() + self.b * (-self.kappa * x).exp()
    }

    /// dΦ_k/dx.
    pub fn psi_prime(&self, x: f64) -> Complex64 {
        self.kappa * (self.a * (self.kappa * x).exp() - self.b * (-self.kappa * x).exp())
    }

    /// Probability current in units of ħ/m (nm⁻¹).
    pub fn current(&self, x: f64) -> f64 {
        (self.psi(x).conj() * self.psi_prime(x)).im
    }

    pub fn transmission_probability(&self) -> f64 {
        self.t.norm_sqr()
    }

    pub fn reflection_probability(&self) -> f64 {
        self.r.norm_sqr()
    }

    pub fn width(&self) -> f64 {
        self.l
    }
}
