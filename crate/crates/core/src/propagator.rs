//! The transient wavefunction after the shutter opens.
//!
//! Inside the barrier (0 ≤ x ≤ L)
//!
//! ```text
//! Ψⁱ(x,t) = Φ_k(x)·M(0,k,t) − Φ_{−k}(x)·M(0,−k,t) − Σ_n Φ_n(x)·M(0,k_n,t)
//! ```
//!
//! and beyond it (x ≥ L)
//!
//! ```text
//! Ψᵉ(x,t) = T_k·M(x,k,t) − T_{−k}·M(x,−k,t) − Σ_n T_n·M(x,k_n,t).
//! ```
//!
//! Two conventions are fixed here rather than left to the reader. The
//! resonance sum enters both forms with a plain minus sign and no extra −i,
//! and the exterior Moshinsky functions take x itself, not x − L. The interior
//! functions are evaluated at the origin. With these choices every term
//! solves the Schrödinger equation in its region and the two forms agree at
//! x = L to about 1e−11. The alternatives break that agreement at the O(1)
//! level, which `tests/conventions.rs` keeps checking.
//!
//! # Summing the poles
//!
//! For large n, M(k_n) approaches its asymptotic form
//! ½e^{iφ}·(i/√π)·Σ_j a_j·z^{−(2j+1)} with z = iγ(p − k_n),
//! γ = e^{−iπ/4}·√(ħt/2m) and p = x·m/(ħt). On its own the series then
//! converges only like 1/N². Subtracting the first K asymptotic terms pole by
//! pole, and adding them back summed over all poles at once, leaves a
//! remainder falling like n^{−(2K+2)}. The added-back sums are
//! S_m(p) = Σ_n c_n/(p − k_n)^m. For m = 1 the Mittag-Leffler expansion of
//! the stationary amplitude gives it in closed form,
//!
//! ```text
//! S(ζ) = c_k/(ζ − k) − c_{−k}/(ζ + k) − 2k·f(ζ)/(ζ² − k²),
//! ```
//!
//! with f = T outside and f(ζ) = Φ_ζ(x) inside. Higher m follow from
//! derivatives of S, taken by a Cauchy integral on a circle around p.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::resonances::{find_poles, PoleSet, ResonanceError};
use crate::special::{moshinsky_pair, SpecialError};
use crate::stationary::{phi_unchecked, transmission_unchecked};
use crate::units::BarrierSystem;

const I: Complex64 = Complex64::new(0.0, 1.0);
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
/// Coefficients of the asymptotic series of w(z), (2j − 1)!!/2^j.
const ASYMPTOTIC: [f64; 4] = [1.0, 0.5, 0.75, 1.875];
/// Poles with |z_n| below this are not subtracted.
const EXCLUDE_Z: f64 = 2.0;
/// Poles with |z_n| below this are always summed explicitly.
const DIRECT_Z: f64 = 6.0;
const CAUCHY_NODES: usize = 64;
/// Damping exponent the last retained plane-wave term must reach.
const PLANE_WAVE_DECADES: f64 = 28.0;
/// Largest |Im ζ|·L met on the Cauchy circle.
const MAX_CIRCLE_EXPONENT: f64 = 200.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PropagatorError {
    #[error("resonance sum not converged at x = {x} nm, t = {t} fs after {poles} poles (estimate {estimate:e})")]
    NotConverged {
        x: f64,
        t: f64,
        poles: usize,
        estimate: f64,
    },
    #[error("time must be strictly positive (got {0} fs)")]
    NonPositiveTime(f64),
    #[error("x = {x} nm is outside the {region} region")]
    XOutOfRange { x: f64, region: &'static str },
    #[error("time grid must be strictly increasing and positive")]
    BadGrid,
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Resonance(#[from] ResonanceError),
}

/// Sign and origin conventions of the resonance sum.
///
/// Only [`Convention::default`] is physically consistent. The other settings
/// exist so that the tests can show what goes wrong with them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convention {
    /// Factor in front of the exterior resonance sum (1 or −i).
    pub exterior_sum_factor: Complex64,
    /// Whether the exterior Moshinsky functions take x − L instead of x.
    pub exterior_shift: bool,
}

impl Default for Convention {
    fn default() -> Self {
        Self {
            exterior_sum_factor: Complex64::new(1.0, 0.0),
            exterior_shift: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorConfig {
    /// Relative truncation tolerance on Ψ.
    pub tol: f64,
    /// Hard cap on positive-index poles.
    pub max_poles: usize,
    /// Poles added per truncation block.
    pub block: usize,
    /// Below this time (fs) Ψ is returned as exactly zero for x > 0.
    pub small_t: f64,
    pub convention: Convention,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_poles: 512,
            block: 8,
            small_t: 1e-4,
            convention: Convention::default(),
        }
    }
}

/// Ψ and ∂Ψ/∂t at one space-time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSample {
    pub x: f64,
    pub t: f64,
    pub psi: Complex64,
    pub dpsi_dt: Complex64,
    /// Number of resonance terms summed, counting ±n separately.
    pub n_terms_used: usize,
    /// Relative size of the estimated neglected tail.
    pub trunc_error_est: f64,
}

impl WaveSample {
    pub fn abs2(&self) -> f64 {
        self.psi.norm_sqr()
    }
}

/// A time series at fixed x.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveTrace {
    pub x: f64,
    pub times: Vec<f64>,
    pub samples: Vec<WaveSample>,
    pub system: BarrierSystem,
}

/// Evaluator for one barrier and one incident wavenumber.
#[derive(Debug, Clone)]
pub struct Propagator {
    sys: BarrierSystem,
    poles: PoleSet,
    cfg: PropagatorConfig,
    /// 2ik·u_n(0)²/(k² − k_n²) per term, in `iter_signed` order.
    prefactor: Vec<Complex64>,
    /// Pole positions in the same order.
    q: Vec<Complex64>,
    /// Index of the first term of each truncation block.
    blocks: Vec<usize>,
}

/// Coefficients of the expansion at one fixed x.
#[derive(Debug, Clone)]
pub struct PointExpansion<'a> {
    prop: &'a Propagator,
    x: f64,
    /// Argument used in the Moshinsky functions.
    mx: f64,
    c_k: Complex64,
    c_mk: Complex64,
    coeff: Vec<Complex64>,
    sum_factor: Complex64,
    interior: bool,
}

impl Propagator {
    pub fn new(sys: &BarrierSystem) -> Result<Self, PropagatorError> {
        Self::with_config(sys, PropagatorConfig::default())
    }

    pub fn with_config(sys: &BarrierSystem, cfg: PropagatorConfig) -> Result<Self, PropagatorError> {
        let poles = find_poles(sys, cfg.max_poles.max(1))?;
        Ok(Self::from_poles(poles, cfg))
    }

    pub fn from_poles(poles: PoleSet, cfg: PropagatorConfig) -> Self {
        let sys = *poles.system();
        let k = sys.k();
        let mut prefactor = Vec::with_capacity(poles.n_terms());
        let mut q = Vec::with_capacity(poles.n_terms());
        for p in poles.iter_signed() {
            prefactor.push(2.0 * I * k * p.u0 * p.u0 / (k * k - p.k * p.k));
            q.push(p.k);
        }
        let axis = poles.axis_poles().len();
        let block = cfg.block.max(1);
        let mut blocks = vec![0];
        let mut next = axis + 2 * block;
        while next < q.len() {
            blocks.push(next);
            next += 2 * block;
        }
        blocks.push(q.len());
        Self {
            sys,
            poles,
            cfg,
            prefactor,
            q,
            blocks,
        }
    }

    pub fn system(&self) -> &BarrierSystem {
        &self.sys
    }

    pub fn poles(&self) -> &PoleSet {
        &self.poles
    }

    pub fn config(&self) -> &PropagatorConfig {
        &self.cfg
    }

    /// Stationary transmission amplitude T_k.
    pub fn transmission(&self) -> Complex64 {
        transmission_unchecked(Complex64::new(self.sys.k(), 0.0), &self.sys)
    }

    /// |T_k|², the normalisation used for densities outside the barrier.
    pub fn transmission_probability(&self) -> f64 {
        self.transmission().norm_sqr()
    }

    /// Expansion for 0 ≤ x ≤ L.
    pub fn internal_at(&self, x: f64) -> Result<PointExpansion<'_>, PropagatorError> {
        let l = self.sys.l();
        if !(0.0..=l).contains(&x) {
            return Err(PropagatorError::XOutOfRange { x, region: "internal" });
        }
        let k = Complex64::new(self.sys.k(), 0.0);
        let coeff = self
            .poles
            .iter_signed()
            .zip(&self.prefactor)
            .map(|(p, f)| f * p.u_tilde(x, &self.sys))
            .collect();
        Ok(PointExpansion {
            prop: self,
            x,
            mx: 0.0,
            c_k: phi_unchecked(x, k, &self.sys),
            c_mk: phi_unchecked(x, -k, &self.sys),
            coeff,
            sum_factor: Complex64::new(1.0, 0.0),
            interior: true,
        })
    }

    /// Expansion for x ≥ L.
    pub fn external_at(&self, x: f64) -> Result<PointExpansion<'_>, PropagatorError> {
        let l = self.sys.l();
        if !(x >= l && x.is_finite()) {
            return Err(PropagatorError::XOutOfRange { x, region: "external" });
        }
        let k = Complex64::new(self.sys.k(), 0.0);
        let coeff = self
            .poles
            .iter_signed()
            .zip(&self.prefactor)
            .map(|(p, f)| f * p.tilde_l * (-I * p.k * l).exp())
            .collect();
        let conv = self.cfg.convention;
        Ok(PointExpansion {
            prop: self,
            x,
            mx: if conv.exterior_shift { x - l } else { x },
            c_k: transmission_unchecked(k, &self.sys),
            c_mk: transmission_unchecked(-k, &self.sys),
            coeff,
            sum_factor: conv.exterior_sum_factor,
            interior: false,
        })
    }

    /// Earliest time (fs) from which `sample` can be expected to converge at x.
    ///
    /// Two conditions. The retained poles must reach past the point
    /// p = x·m/ħt that dominates the sum. Beyond p each Moshinsky term
    /// carries a plane wave damped like e^{−ħt·b_n(a_n − p)/m}, and by the last
    /// retained pole that damping must be complete.
    pub fn earliest_time(&self, x: f64) -> f64 {
        let l = self.sys.l();
        let mx = if x < l {
            0.0
        } else if self.cfg.convention.exterior_shift {
            x - l
        } else {
            x
        };
        let beta = self.sys.hbar_over_m();
        let last = self
            .q
            .iter()
            .copied()
            .max_by(|a, b| a.re.total_cmp(&b.re))
            .unwrap_or(Complex64::new(1.0, -1.0));
        let top = last.re;
        // mx/(βt) + DIRECT_Z/√(βt/2) = top is a quadratic in √t.
        let b = DIRECT_Z * (2.0 / beta).sqrt();
        let s = (b + (b * b + 4.0 * top * mx / beta).sqrt()) / (2.0 * top);
        let reach = s * s;
        // βt·b_top·(top − p) ≥ ln(1e12)
        let damping = (PLANE_WAVE_DECADES / (-last.im).max(1e-3) + mx) / (beta * top);
        reach.max(damping)
    }

    /// Interior form below L, exterior form from L on.
    pub fn at(&self, x: f64) -> Result<PointExpansion<'_>, PropagatorError> {
        if x < self.sys.l() {
            self.internal_at(x)
        } else {
            self.external_at(x)
        }
    }

    pub fn psi_internal(&self, x: f64, t: f64) -> Result<WaveSample, PropagatorError> {
        self.internal_at(x)?.sample(t)
    }

    pub fn psi_external(&self, x: f64, t: f64) -> Result<WaveSample, PropagatorError> {
        self.external_at(x)?.sample(t)
    }

    /// Ψ on a time grid at fixed x, evaluated in parallel.
    pub fn trace(&self, x: f64, times: &[f64]) -> Result<WaveTrace, PropagatorError> {
        if times.is_empty() || times[0] <= 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PropagatorError::BadGrid);
        }
        let point = self.at(x)?;
        let samples = times
            .par_iter()
            .map(|&t| point.sample(t))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(WaveTrace {
            x,
            times: times.to_vec(),
            samples,
            system: self.sys,
        })
    }
}

impl PointExpansion<'_> {
    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn is_interior(&self) -> bool {
        self.interior
    }

    /// The stationary amplitude this point relaxes to, up to e^{−iEt/ħ}.
    pub fn stationary_amplitude(&self) -> Complex64 {
        if self.interior {
            self.c_k
        } else {
            self.c_k * (I * self.prop.sys.k() * self.x).exp()
        }
    }

    /// Σ_n c_n/(ζ − k_n) over all poles, in closed form.
    fn pole_sum(&self, zeta: Complex64) -> Complex64 {
        let sys = &self.prop.sys;
        let k = sys.k();
        let f = if self.interior {
            phi_unchecked(self.x, zeta, sys)
        } else {
            transmission_unchecked(zeta, sys)
        };
        self.c_k / (zeta - k) - self.c_mk / (zeta + k) - 2.0 * k * f / (zeta * zeta - k * k)
    }

    /// S_m(p) = Σ c_n/(p − k_n)^m for m = 1..=m_max, summed over every pole
    /// except those listed in `excluded`.
    ///
    /// The excluded poles are the ones closest to p. Their terms are removed
    /// from the closed form before the Cauchy integral, so the circle can
    /// reach out to the nearest pole that is still included.
    fn outer_power_sums(&self, p: f64, excluded: &[usize], reach: f64, m_max: usize) -> Vec<Complex64> {
        let prop = self.prop;
        let k = prop.sys.k();
        let reach = reach.min(MAX_CIRCLE_EXPONENT / prop.sys.l());
        // Everything the circle should keep clear of: the cancelled poles and
        // the removable singularities of the closed form at ±k.
        let marks: Vec<f64> = excluded
            .iter()
            .map(|&i| (p - prop.q[i]).norm())
            .chain([(p - k).abs(), (p + k).abs()])
            .collect();
        let clearance = |r: f64| marks.iter().map(|d| (d - r).abs() / r).fold(f64::INFINITY, f64::min);
        let rho = (0..=12)
            .map(|i| reach * (0.3 + 0.025 * f64::from(i)))
            .max_by(|a, b| clearance(*a).total_cmp(&clearance(*b)))
            .unwrap_or(0.5 * reach);
        let values: Vec<(Complex64, Complex64)> = (0..CAUCHY_NODES)
            .map(|l| {
                let e = Complex64::from_polar(rho, 2.0 * PI * l as f64 / CAUCHY_NODES as f64);
                let zeta = p + e;
                let near: Complex64 = excluded
                    .iter()
                    .map(|&i| self.coeff[i] / (zeta - prop.q[i]))
                    .sum();
                (e, self.pole_sum(zeta) - near)
            })
            .collect();
        (1..=m_max)
            .map(|m| {
                let acc: Complex64 = values.iter().map(|(e, s)| s * e.powi(1 - m as i32)).sum();
                let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
                sign * acc / CAUCHY_NODES as f64
            })
            .collect()
    }

    /// Ψ and ∂Ψ/∂t at time t.
    pub fn sample(&self, t: f64) -> Result<WaveSample, PropagatorError> {
        let prop = self.prop;
        let cfg = &prop.cfg;
        if !(t > 0.0 && t.is_finite()) {
            return Err(PropagatorError::NonPositiveTime(t));
        }
        let zero = Complex64::new(0.0, 0.0);
        if t < cfg.small_t && self.x > 0.0 {
            return Ok(WaveSample {
                x: self.x,
                t,
                psi: zero,
                dpsi_dt: zero,
                n_terms_used: 0,
                trunc_error_est: 0.0,
            });
        }
        let beta = prop.sys.hbar_over_m();
        let k = Complex64::new(prop.sys.k(), 0.0);
        let mx = self.mx;

        let (m_k, dm_k) = moshinsky_pair(mx, k, t, beta)?;
        let (m_mk, dm_mk) = moshinsky_pair(mx, -k, t, beta)?;
        let base = self.c_k * m_k - self.c_mk * m_mk;
        let dbase = self.c_k * dm_k - self.c_mk * dm_mk;

        // Poles with |z_n| below EXCLUDE_Z are summed without subtraction,
        // and every pole below DIRECT_Z must be summed explicitly.
        let p = mx / (beta * t);
        let g = Complex64::from_polar((0.5 * beta * t).sqrt(), FRAC_PI_4);
        let gn = g.norm();
        let mut excluded = Vec::new();
        let mut reach = f64::INFINITY;
        let mut must_reach = 0;
        for (i, q) in prop.q.iter().enumerate() {
            let z = gn * (p - q).norm();
            if z < EXCLUDE_Z {
                excluded.push(i);
            } else {
                reach = reach.min((p - q).norm());
            }
            if z < DIRECT_Z {
                must_reach = i + 1;
            }
        }
        let top = prop.q.iter().map(|q| q.re).fold(0.0, f64::max);
        if p + DIRECT_Z / gn > top {
            return Err(PropagatorError::NotConverged {
                x: self.x,
                t,
                poles: prop.q.len(),
                estimate: f64::INFINITY,
            });
        }
        let is_excluded = {
            let mut flags = vec![false; prop.q.len()];
            for &i in &excluded {
                flags[i] = true;
            }
            flags
        };

        let phi = mx * mx / (2.0 * beta * t);
        let dphi = -phi / t;
        let c0 = Complex64::from_polar(0.5, phi) * Complex64::new(0.0, FRAC_1_SQRT_PI);

        let sums = self.outer_power_sums(p, &excluded, reach, 2 * ASYMPTOTIC.len());
        let mut closed = zero;
        let mut dclosed = zero;
        for (j, a) in ASYMPTOTIC.iter().enumerate() {
            let m = 2 * j + 1;
            let gm = g.powi(-(m as i32));
            closed += a * gm * sums[m - 1];
            dclosed += a * gm * (m as f64 / t) * (p * sums[m] - 0.5 * sums[m - 1]);
        }
        let closed_dt = c0 * (I * dphi * closed + dclosed);
        let closed = c0 * closed;

        let mut tail = zero;
        let mut dtail = zero;
        let mut quiet_blocks = 0;
        let mut used = 0;
        let mut estimate = f64::INFINITY;
        let mut previous = f64::INFINITY;
        let scale_floor = 1e-3 * self.c_k.norm().max(self.c_mk.norm());
        for w in prop.blocks.windows(2) {
            let mut block = zero;
            let mut dblock = zero;
            for idx in w[0]..w[1] {
                let q = prop.q[idx];
                let c = self.coeff[idx];
                let (m, dm) = moshinsky_pair(mx, q, t, beta)?;
                if is_excluded[idx] {
                    block += c * m;
                    dblock += c * dm;
                    continue;
                }
                let z = g * (p - q);
                let dz = -z * (p + q) / (2.0 * t * (p - q));
                let zi = 1.0 / z;
                let zi2 = zi * zi;
                let mut zp = zi;
                let mut asym = zero;
                let mut dasym = zero;
                for (j, a) in ASYMPTOTIC.iter().enumerate() {
                    asym += a * zp;
                    dasym -= a * (2 * j + 1) as f64 * zp * zi * dz;
                    zp *= zi2;
                }
                block += c * (m - c0 * asym);
                dblock += c * (dm - c0 * (I * dphi * asym + dasym));
            }
            tail += block;
            dtail += dblock;
            used = w[1];
            let psi = base - self.sum_factor * (tail + closed);
            let scale = psi.norm().max(scale_floor);
            // Geometric or power-law tail: the ratio of successive blocks
            // bounds how many more blocks of this size are still to come.
            let size = block.norm();
            let ratio = size / previous;
            let remaining = if ratio < 0.98 { (ratio / (1.0 - ratio)).max(1.0) } else { 50.0 };
            estimate = 2.0 * size * remaining / scale;
            previous = size;
            if used < must_reach {
                continue;
            }
            if estimate < cfg.tol {
                quiet_blocks += 1;
                if quiet_blocks >= 2 {
                    break;
                }
            } else {
                quiet_blocks = 0;
            }
        }
        let psi = base - self.sum_factor * (tail + closed);
        let dpsi_dt = dbase - self.sum_factor * (dtail + closed_dt);
        if quiet_blocks < 2 || !(psi.re.is_finite() && psi.im.is_finite()) {
            return Err(PropagatorError::NotConverged {
                x: self.x,
                t,
                poles: used,
                estimate,
            });
        }
        Ok(WaveSample {
            x: self.x,
            t,
            psi,
            dpsi_dt,
            n_terms_used: used,
            trunc_error_est: estimate,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> Propagator {
        let sys = BarrierSystem::new(0.3, 0.001, 4.0, 0.067).unwrap();
        Propagator::new(&sys).unwrap()
    }

    #[test]
    fn interface_continuity() {
        let prop = fig2();
        let l = prop.system().l();
        for t in [0.05, 0.5, 1.0, 3.0, 5.17, 10.0, 30.0, 55.0, 400.0] {
            let a = prop.psi_internal(l, t).unwrap();
            let b = prop.psi_external(l, t).unwrap();
            let rel = (a.psi - b.psi).norm() / b.psi.norm().max(1e-300);
            assert!(rel <= 1e-8, "t = {t}: {rel:e}");
            let drel = (a.dpsi_dt - b.dpsi_dt).norm() / b.dpsi_dt.norm().max(1e-300);
            assert!(drel <= 1e-7, "t = {t}: derivative {drel:e}");
        }
    }

    #[test]
    fn fig2_peak_region() {
        let prop = fig2();
        let t2 = prop.transmission_probability();
        let l = prop.system().l();
        let at = |t| prop.psi_external(l, t).unwrap().abs2() / t2;
        let peak = at(5.17);
        assert!(peak > at(4.5) && peak > at(6.0), "{} {} {}", at(4.5), peak, at(6.0));
        assert!((peak - 1.1745).abs() < 2e-3, "{peak}");
    }

    #[test]
    fn vanishes_initially() {
        let prop = fig2();
        for x in [0.5, 2.0, 4.0] {
            let s = prop.at(x).unwrap().sample(1e-5).unwrap();
            assert_eq!(s.psi, Complex64::new(0.0, 0.0));
        }
        let s = prop.psi_external(20.0, 0.1).unwrap();
        assert!(s.abs2() < 1e-6 * prop.transmission_probability(), "{}", s.abs2());
    }

    #[test]
    fn too_few_poles_is_reported() {
        // At t = 1e−3 fs the front at x = 20 nm involves poles far beyond the cap.
        let prop = fig2();
        assert!(matches!(
            prop.psi_external(20.0, 1e-3),
            Err(PropagatorError::NotConverged { .. })
        ));
    }

    #[test]
    fn time_derivative_matches_finite_difference() {
        let prop = fig2();
        for (x, t) in [(1.0, 2.0), (4.0, 5.17), (8.0, 12.0), (3.0, 0.3)] {
            let point = prop.at(x).unwrap();
            let s = point.sample(t).unwrap();
            let h = 1e-4 * t;
            let f = |dt: f64| point.sample(t + dt).unwrap().psi;
            let fd = (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h);
            assert!((fd - s.dpsi_dt).norm() <= 1e-6 * s.dpsi_dt.norm(), "{x} {t}");
        }
    }

    #[test]
    fn truncation_estimate_is_honest() {
        let sys = BarrierSystem::new(0.3, 0.001, 4.0, 0.067).unwrap();
        let small = Propagator::with_config(
            &sys,
            PropagatorConfig {
                max_poles: 512,
                tol: 1e-8,
                ..PropagatorConfig::default()
            },
        )
        .unwrap();
        let full = fig2();
        for t in [0.2, 2.0, 5.17, 20.0] {
            let a = small.psi_external(4.0, t).unwrap();
            let b = full.psi_external(4.0, t).unwrap();
            assert!(a.trunc_error_est <= 1e-8);
            let diff = (a.abs2() - b.abs2()).abs() / b.abs2();
            assert!(diff <= 1e-7, "{t}: {diff:e}");
        }
    }

    #[test]
    fn earliest_time_marks_the_coverage_limit() {
        let prop = fig2();
        for x in [1.0, 4.0, 12.0, 30.0] {
            let t0 = prop.earliest_time(x);
            assert!(prop.at(x).unwrap().sample(0.3 * t0).is_err(), "{x}");
            assert!(prop.at(x).unwrap().sample(1.5 * t0).is_ok(), "{x}");
        }
    }

    #[test]
    fn errors() {
        let prop = fig2();
        assert!(matches!(
            prop.psi_external(4.0, 0.0),
            Err(PropagatorError::NonPositiveTime(_))
        ));
        assert!(matches!(
            prop.psi_internal(4.5, 1.0),
            Err(PropagatorError::XOutOfRange { .. })
        ));
        assert!(matches!(
            prop.psi_external(3.0, 1.0),
            Err(PropagatorError::XOutOfRange { .. })
        ));
        assert_eq!(prop.trace(4.0, &[1.0, 1.0]).unwrap_err(), PropagatorError::BadGrid);
    }
}
