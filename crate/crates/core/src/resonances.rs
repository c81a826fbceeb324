//! Resonance poles of the barrier and the Gamow states attached to them.
//!
//! The poles are the zeros of [`pole_function`] in the lower half k-plane.
//! Complex ones come in pairs k_{−n} = −k_n*, so only n ≥ 1 is stored and the
//! partners are produced on demand. Thin barriers (roughly L < 1.5/κ) also
//! carry one or two zeros on the negative imaginary axis; they are their own
//! mirror images, are kept separately and carry the index n = 0.
//!
//! The unnormalised Gamow state is ũ(x) = cos(qx) − ik·sin(qx)/q, which has
//! ũ(0) = 1 and ũ′(0) = −ikũ(0). At a pole it is also outgoing at x = L. Its
//! normalisation constant
//!
//! ```text
//! N = ∫₀ᴸ ũ² dx + i[ũ(0)² + ũ(L)²]/(2k_n) = i·ũ(L)·P′(k_n)/(2k_n)
//! ```
//!
//! is taken from the right-hand side. The direct integral is kept as
//! [`gamow_norm_integral`], but it subtracts terms of size e^{2b_nL} and goes
//! bad for high poles.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::stationary::{cos_sinc, pole_function, pole_function_derivative, pole_function_scale};
use crate::units::BarrierSystem;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest normalised residual |P|/(|2kC| + |(2k² − U)S|) accepted for a pole.
pub const POLE_RESIDUAL_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 80;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResonanceError {
    #[error("pole {0} did not converge")]
    PoleNotConverged(usize),
    #[error("pole {n} coincides with pole {other}")]
    DuplicatePole { n: usize, other: usize },
    #[error("argument principle counts {counted} zeros where {found} poles were found (Re k < {re_max})")]
    CountMismatch {
        counted: i64,
        found: usize,
        re_max: f64,
    },
    #[error("Gamow normalisation vanishes for pole {0}")]
    NormalizationSingular(Complex64),
    #[error("incident k² coincides with pole {0}")]
    PoleCollision(i32),
    #[error("x = {x} nm lies outside the barrier [0, {l}] nm")]
    XOutOfRange { x: f64, l: f64 },
    #[error("at least one pole must be requested")]
    EmptyRequest,
}

/// One resonance k_n = a_n − i·b_n with its Gamow boundary data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonancePole {
    /// ±1, ±2, … for complex pairs; 0 on the imaginary axis.
    pub n: i32,
    pub k: Complex64,
    /// Complex energy ħ²k_n²/2m (eV).
    pub energy: Complex64,
    /// u_n(0) of the normalised Gamow state.
    pub u0: Complex64,
    /// u_n(L) of the normalised Gamow state.
    pub u_l: Complex64,
    /// Normalised pole-equation residual.
    pub residual: f64,
    /// P′(k_n).
    pub dp: Complex64,
    /// ũ(L) of the unnormalised state.
    pub tilde_l: Complex64,
}

impl ResonancePole {
    fn build(n: i32, k: Complex64, sys: &BarrierSystem) -> Result<Self, ResonanceError> {
        let (c, s) = cos_sinc(k * k - sys.barrier_k2(), sys.l());
        let tilde_l = c - I * k * s;
        let dp = pole_function_derivative(k, sys);
        let norm = I * tilde_l * dp / (2.0 * k);
        if !(norm.norm() > 1e-300 && norm.re.is_finite() && norm.im.is_finite()) {
            return Err(ResonanceError::NormalizationSingular(k));
        }
        let u0 = 1.0 / norm.sqrt();
        Ok(Self {
            n,
            k,
            energy: sys.hbar2_over_2m() * k * k,
            u0,
            u_l: u0 * tilde_l,
            residual: normalised_residual(k, sys),
            dp,
            tilde_l,
        })
    }

    /// The partner at −k_n*.
    pub fn mirror(&self) -> Self {
        Self {
            n: -self.n,
            k: -self.k.conj(),
            energy: self.energy.conj(),
            u0: self.u0.conj(),
            u_l: self.u_l.conj(),
            residual: self.residual,
            dp: self.dp.conj(),
            tilde_l: self.tilde_l.conj(),
        }
    }

    pub fn is_on_axis(&self) -> bool {
        self.n == 0
    }

    /// The normalisation constant N with u_n = ũ/√N.
    pub fn norm(&self) -> Complex64 {
        1.0 / (self.u0 * self.u0)
    }

    /// ũ(x), normalised to ũ(0) = 1.
    pub fn u_tilde(&self, x: f64, sys: &BarrierSystem) -> Complex64 {
        let (c, s) = cos_sinc(self.k * self.k - sys.barrier_k2(), x);
        c - I * self.k * s
    }

    /// u_n(x) of the normalised state.
    pub fn u(&self, x: f64, sys: &BarrierSystem) -> Complex64 {
        self.u0 * self.u_tilde(x, sys)
    }
}

/// Boundary data (u_n(0), u_n(L)) of the normalised Gamow state at a pole.
pub fn gamow_boundary_data(
    k: Complex64,
    sys: &BarrierSystem,
) -> Result<(Complex64, Complex64), ResonanceError> {
    ResonancePole::build(1, k, sys).map(|p| (p.u0, p.u_l))
}

/// ∫₀ᴸ ũ² dx + i[1 + ũ(L)²]/(2k) evaluated term by term in closed form.
pub fn gamow_norm_integral(k: Complex64, sys: &BarrierSystem) -> Complex64 {
    let l = sys.l();
    let q2 = k * k - sys.barrier_k2();
    let (c, s) = cos_sinc(q2, l);
    let cos2 = 0.5 * (l + s * c);
    let sin2 = 0.5 * (l - s * c) / q2;
    let integral = cos2 - I * k * s * s - k * k * sin2;
    let tilde_l = c - I * k * s;
    integral + I * (1.0 + tilde_l * tilde_l) / (2.0 * k)
}

/// |∫ũ² + i[1 + ũ(L)²]/2k − N| relative to the sum of the magnitudes of the
/// terms in the closed-form integral. For high poles those terms grow like
/// e^{2|Im q|L} and cancel, so the absolute gap says more about the check
/// than about the pole.
pub fn gamow_norm_residual(pole: &ResonancePole, sys: &BarrierSystem) -> f64 {
    let k = pole.k;
    let l = sys.l();
    let q2 = k * k - sys.barrier_k2();
    let (c, s) = cos_sinc(q2, l);
    let cos2 = 0.5 * (l + s * c);
    let sin2 = 0.5 * (l - s * c) / q2;
    let tilde_l = c - I * k * s;
    let boundary = I * (1.0 + tilde_l * tilde_l) / (2.0 * k);
    let scale = cos2.norm() + (k * s * s).norm() + (k * k * sin2).norm() + boundary.norm();
    (gamow_norm_integral(k, sys) - pole.norm()).norm() / scale
}

fn normalised_residual(k: Complex64, sys: &BarrierSystem) -> f64 {
    pole_function(k, sys).norm() / pole_function_scale(k, sys)
}

fn newton(seed: Complex64, sys: &BarrierSystem) -> Option<Complex64> {
    let mut k = seed;
    for _ in 0..NEWTON_MAX_ITER {
        let step = pole_function(k, sys) / pole_function_derivative(k, sys);
        if !(step.re.is_finite() && step.im.is_finite()) {
            return None;
        }
        k -= step;
        if step.norm() <= 4.0 * f64::EPSILON * k.norm() {
            break;
        }
    }
    if normalised_residual(k, sys) > POLE_RESIDUAL_TOL {
        return None;
    }
    let polished = polish(k, sys);
    Some(if normalised_residual(polished, sys) <= POLE_RESIDUAL_TOL {
        polished
    } else {
        k
    })
}

/// Newton steps on whichever parity factor of P vanishes at `k`.
///
/// The barrier is symmetric about L/2, so with θ = qL/2
/// P = (2/q)·(k·cos θ − iq·sin θ)·(q·cos θ − ik·sin θ). Each factor carries
/// only e^{bL/2} worth of cancellation instead of e^{bL}, which pins the
/// pole down to a few ulps and makes it a fixed point of the refinement.
fn polish(k: Complex64, sys: &BarrierSystem) -> Complex64 {
    let h = 0.5 * sys.l();
    let factors = |k: Complex64| {
        let q = (k * k - sys.barrier_k2()).sqrt();
        let th = q * h;
        let (c, s) = (th.cos(), th.sin());
        let even = k * c - I * q * s;
        let odd = q * c - I * k * s;
        let d_even = c - h * k * k / q * s - I * k / q * s - I * h * k * c;
        let d_odd = k / q * c - h * k * s - I * s - I * h * k * k / q * c;
        let rel_even = even.norm() / ((k * c).norm() + (q * s).norm());
        let rel_odd = odd.norm() / ((q * c).norm() + (k * s).norm());
        (q, [(even, d_even, rel_even), (odd, d_odd, rel_odd)])
    };
    let (q, f) = factors(k);
    if q.norm() < 1e-6 * k.norm().max(1.0) {
        return k;
    }
    let which = usize::from(f[1].2 < f[0].2);
    let mut cur = k;
    for _ in 0..6 {
        let (_, f) = factors(cur);
        let step = f[which].0 / f[which].1;
        if !(step.re.is_finite() && step.im.is_finite()) || step.norm() > 1e-6 * k.norm().max(1.0) {
            return k;
        }
        cur -= step;
        if step.norm() <= f64::EPSILON * cur.norm() {
            break;
        }
    }
    cur
}

/// The first N resonances of a barrier, ordered by ascending a_n, plus any
/// poles on the negative imaginary axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSet {
    system: BarrierSystem,
    axis: Vec<ResonancePole>,
    poles: Vec<ResonancePole>,
    /// Poles already located beyond the retained set, ascending in a_n.
    /// Never empty; its first entry bounds the audit rectangle.
    ahead: Vec<Complex64>,
}

impl PoleSet {
    pub fn system(&self) -> &BarrierSystem {
        &self.system
    }

    /// Complex poles with n ≥ 1.
    pub fn poles(&self) -> &[ResonancePole] {
        &self.poles
    }

    /// Poles on the negative imaginary axis (usually none).
    pub fn axis_poles(&self) -> &[ResonancePole] {
        &self.axis
    }

    /// Number of retained positive-index poles.
    pub fn n_max(&self) -> usize {
        self.poles.len()
    }

    /// Total number of terms in the resonance sum.
    pub fn n_terms(&self) -> usize {
        self.axis.len() + 2 * self.poles.len()
    }

    /// Complex pole n for n = ±1, ±2, …
    pub fn get(&self, n: i32) -> Option<ResonancePole> {
        let idx = usize::try_from(n.unsigned_abs()).ok()?.checked_sub(1)?;
        let p = self.poles.get(idx)?;
        Some(if n > 0 { *p } else { p.mirror() })
    }

    /// Every retained pole: axis poles first, then 1, −1, 2, −2, …
    pub fn iter_signed(&self) -> impl Iterator<Item = ResonancePole> + '_ {
        self.axis
            .iter()
            .copied()
            .chain(self.poles.iter().flat_map(|p| [*p, p.mirror()]))
    }

    /// Left edge of audit rectangles: just left of the imaginary axis, well
    /// clear of the mirror of the first complex pole.
    fn audit_left(&self) -> f64 {
        let a1 = self.poles.first().map_or(self.ahead[0].re, |p| p.k.re);
        -0.5 * a1.min(PI / self.system.l())
    }

    fn audit_floor(&self, depth: f64) -> f64 {
        let axis_depth = self.axis.iter().map(|p| -p.k.im).fold(0.0, f64::max);
        -(1.5 * depth.max(axis_depth) + 1.0 / self.system.l())
    }

    /// Grows the set to `n` positive poles and audits the added strip.
    pub fn extend_to(&mut self, n: usize) -> Result<(), ResonanceError> {
        let start = self.poles.len();
        if n <= start {
            return Ok(());
        }
        let sys = self.system;
        let mut found: Vec<Complex64> = self.poles.iter().map(|p| p.k).collect();
        found.extend_from_slice(&self.ahead);
        while found.len() < n + 1 {
            let next = next_pole(&found, &sys)?;
            found.push(next);
        }
        let (left, expected) = if start == 0 {
            (self.audit_left(), n + self.axis.len())
        } else {
            (0.5 * (found[start - 1].re + found[start].re), n - start)
        };
        let right = 0.5 * (found[n - 1].re + found[n].re);
        let depth = found[start..=n].iter().map(|k| -k.im).fold(0.0, f64::max);
        let counted = count_zeros(&sys, left, right, self.audit_floor(depth), 0.0);
        if counted != expected as i64 {
            return Err(ResonanceError::CountMismatch {
                counted,
                found: expected,
                re_max: right,
            });
        }
        for (i, &k) in found[start..n].iter().enumerate() {
            self.poles.push(ResonancePole::build((start + i + 1) as i32, k, &sys)?);
        }
        self.ahead = found[n..].to_vec();
        Ok(())
    }

    /// Argument-principle count over
    /// [−a₁/2, (a_N + a_{N+1})/2] × [−1.5·b_max − 1/L, 0]; returns the number
    /// of poles it confirms.
    pub fn audit(&self) -> Result<usize, ResonanceError> {
        let n = self.poles.len();
        let right = 0.5 * (self.poles[n - 1].k.re + self.ahead[0].re);
        let depth = self
            .poles
            .iter()
            .map(|p| -p.k.im)
            .chain([-self.ahead[0].im])
            .fold(0.0, f64::max);
        let expected = n + self.axis.len();
        let counted = count_zeros(&self.system, self.audit_left(), right, self.audit_floor(depth), 0.0);
        if counted == expected as i64 {
            Ok(expected)
        } else {
            Err(ResonanceError::CountMismatch {
                counted,
                found: expected,
                re_max: right,
            })
        }
    }
}

/// Finds the first `n` complex poles with n ≥ 1, and every axis pole.
pub fn find_poles(sys: &BarrierSystem, n: usize) -> Result<PoleSet, ResonanceError> {
    if n == 0 {
        return Err(ResonanceError::EmptyRequest);
    }
    let axis = axis_poles(sys)
        .into_iter()
        .map(|k| ResonancePole::build(0, k, sys))
        .collect::<Result<Vec<_>, _>>()?;
    let mut set = PoleSet {
        system: *sys,
        axis,
        poles: Vec::with_capacity(n),
        ahead: initial_poles(sys)?,
    };
    set.extend_to(n)?;
    Ok(set)
}

/// Zeros of P on k = −iy, y > 0.
///
/// There P(−iy) = −i·[2yQ − (2y² + U)·tanh(QL)]·cosh(QL) with Q = √(y² + U),
/// a real function of y. Its roots are bracketed on a logarithmic grid and
/// bisected.
fn axis_poles(sys: &BarrierSystem) -> Vec<Complex64> {
    let u = sys.barrier_k2();
    let l = sys.l();
    let g = |y: f64| {
        let q = (y * y + u).sqrt();
        2.0 * y * q - (2.0 * y * y + u) * (q * l).tanh()
    };
    // Beyond y_max the tanh is 1 to working precision and g > 0.
    let y_max = (40.0 + (4.0 * (50.0 / l).powi(2) / u).ln().max(1.0)) / l;
    let y_min = 1e-8 * u.sqrt();
    let steps = 20_000;
    let ratio = (y_max / y_min).ln() / f64::from(steps);
    let mut roots = Vec::new();
    let mut y0 = y_min;
    let mut g0 = g(y0);
    for i in 1..=steps {
        let y1 = y_min * (ratio * f64::from(i)).exp();
        let g1 = g(y1);
        if g0 * g1 < 0.0 {
            let (mut a, mut b, mut ga) = (y0, y1, g0);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let gm = g(m);
                if gm * ga <= 0.0 {
                    b = m;
                } else {
                    a = m;
                    ga = gm;
                }
                if b - a <= 2.0 * f64::EPSILON * b {
                    break;
                }
            }
            roots.push(Complex64::new(0.0, -0.5 * (a + b)));
        }
        y0 = y1;
        g0 = g1;
    }
    roots
}

/// All complex poles with a_n below the second barrier-top resonance,
/// located by recursive subdivision of a box under the real axis.
///
/// These are the poles a fixed seed tends to miss: wide barriers pull a
/// narrow resonance down towards the barrier top. The box is deepened until
/// its zero count stops changing. Its left edge sits a hair right of the
/// imaginary axis so that axis poles stay outside.
fn initial_poles(sys: &BarrierSystem) -> Result<Vec<Complex64>, ResonanceError> {
    let l = sys.l();
    let u = sys.barrier_k2();
    let left = 1e-3 / l;
    let right = (u + (2.0 * PI / l).powi(2)).sqrt() + 0.5 * PI / l;
    let mut depth = (2.0 + (1.0 + right * right / u).ln()) / l;
    let mut count = count_zeros(sys, left, right, -depth, 0.0);
    for _ in 0..6 {
        let deeper = count_zeros(sys, left, right, -2.0 * depth, 0.0);
        if deeper == count && count > 0 {
            break;
        }
        depth *= 2.0;
        count = deeper;
    }
    let mut roots = Vec::new();
    isolate(sys, [left, right, -depth, 0.0], count, 0, &mut roots);
    roots.sort_by(|a, b| a.re.total_cmp(&b.re));
    roots.dedup_by(|a, b| (*a - *b).norm() <= 1e-8);
    if roots.len() as i64 != count || roots.is_empty() {
        return Err(ResonanceError::PoleNotConverged(roots.len() + 1));
    }
    Ok(roots)
}

fn isolate(sys: &BarrierSystem, rect: [f64; 4], count: i64, level: u32, out: &mut Vec<Complex64>) {
    let [x0, x1, y0, y1] = rect;
    if count <= 0 || level > 40 {
        return;
    }
    if count == 1 {
        let centre = Complex64::new(0.5 * (x0 + x1), 0.5 * (y0 + y1));
        let slack = 1e-9 * (x1 - x0 + y1 - y0);
        if let Some(k) = newton(centre, sys) {
            // The count says the root is inside; one found elsewhere is a
            // neighbour and the box has to shrink further.
            let inside = k.re >= x0 - slack
                && k.re <= x1 + slack
                && k.im >= y0 - slack
                && k.im <= y1 + slack;
            if inside {
                out.push(k);
                return;
            }
        }
    }
    let halves = if x1 - x0 >= y1 - y0 {
        let xm = 0.5 * (x0 + x1);
        [[x0, xm, y0, y1], [xm, x1, y0, y1]]
    } else {
        let ym = 0.5 * (y0 + y1);
        [[x0, x1, y0, ym], [x0, x1, ym, y1]]
    };
    let [a0, a1, b0, b1] = halves[0];
    let first = count_zeros(sys, a0, a1, b0, b1);
    isolate(sys, halves[0], first, level + 1, out);
    isolate(sys, halves[1], count - first, level + 1, out);
}

/// Locates the pole following `found` (ordered by a_n, at least one entry).
fn next_pole(found: &[Complex64], sys: &BarrierSystem) -> Result<Complex64, ResonanceError> {
    let n = found.len() + 1;
    let spacing = PI / sys.l();
    let last = found[found.len() - 1];
    let seed = match found {
        [.., a, b] => 2.0 * b - a,
        _ => last + spacing,
    };
    let accept = |k: Complex64| k.im < 0.0 && k.re > last.re && (k - last).norm() > 1e-8;
    if let Some(k) = newton(seed, sys).filter(|&k| accept(k)) {
        return Ok(k);
    }
    // Fallback: scan seeds around the prediction and keep the leftmost new root.
    let mut best: Option<Complex64> = None;
    for i in -4..=4 {
        for j in 1..=6 {
            let s = Complex64::new(
                seed.re + 0.25 * f64::from(i) * spacing,
                -0.4 * f64::from(j) / sys.l(),
            );
            if let Some(k) = newton(s, sys).filter(|&k| accept(k)) {
                if best.map_or(true, |b| k.re < b.re) {
                    best = Some(k);
                }
            }
        }
    }
    if let Some(k) = best {
        if let Some(other) = found.iter().position(|p| (p - k).norm() <= 1e-8) {
            return Err(ResonanceError::DuplicatePole { n, other: other + 1 });
        }
    }
    best.ok_or(ResonanceError::PoleNotConverged(n))
}

/// Winding number of P around the rectangle [x0, x1] × [y0, y1].
fn count_zeros(sys: &BarrierSystem, x0: f64, x1: f64, y0: f64, y1: f64) -> i64 {
    let corners = [
        Complex64::new(x0, y0),
        Complex64::new(x1, y0),
        Complex64::new(x1, y1),
        Complex64::new(x0, y1),
    ];
    let h = 0.05 * (PI / sys.l()).min(1.0);
    let mut total = 0.0;
    for i in 0..4 {
        let (a, b) = (corners[i], corners[(i + 1) % 4]);
        let pieces = ((b - a).norm() / h).ceil().max(1.0) as usize;
        let mut z0 = a;
        let mut p0 = pole_function(z0, sys);
        for j in 1..=pieces {
            let z1 = a + (b - a) * (j as f64 / pieces as f64);
            let p1 = pole_function(z1, sys);
            total += arg_change(sys, z0, p0, z1, p1, 0);
            z0 = z1;
            p0 = p1;
        }
    }
    (total / (2.0 * PI)).round() as i64
}

fn arg_change(
    sys: &BarrierSystem,
    z0: Complex64,
    p0: Complex64,
    z1: Complex64,
    p1: Complex64,
    depth: u32,
) -> f64 {
    let d = (p1 / p0).arg();
    if d.abs() < PI / 4.0 || depth >= 30 {
        return d;
    }
    let zm = 0.5 * (z0 + z1);
    let pm = pole_function(zm, sys);
    arg_change(sys, z0, p0, zm, pm, depth + 1) + arg_change(sys, zm, pm, z1, p1, depth + 1)
}

/// Expansion coefficients Φ_n(x) and T_n at incident wavenumber `k`, in the
/// order of [`PoleSet::iter_signed`].
///
/// Φ_n(x) = 2ik·u_n(0)·u_n(x)/(k² − k_n²) and
/// T_n = 2ik·u_n(0)·u_n(L)·e^{−ik_nL}/(k² − k_n²), so T_n = Φ_n(L)·e^{−ik_nL}.
#[allow(clippy::type_complexity)]
pub fn expansion_coeffs(
    x: f64,
    k: f64,
    poles: &PoleSet,
) -> Result<(Vec<Complex64>, Vec<Complex64>), ResonanceError> {
    let sys = poles.system();
    if !(0.0..=sys.l()).contains(&x) {
        return Err(ResonanceError::XOutOfRange { x, l: sys.l() });
    }
    let mut phi = Vec::with_capacity(poles.n_terms());
    let mut tn = Vec::with_capacity(poles.n_terms());
    for p in poles.iter_signed() {
        let gap = k * k - p.k * p.k;
        if gap.norm() < 1e-14 * (p.k * p.k).norm().max(1.0) {
            return Err(ResonanceError::PoleCollision(p.n));
        }
        let f = 2.0 * I * k * p.u0 / gap;
        phi.push(f * p.u(x, sys));
        tn.push(f * p.u_l * (-I * p.k * sys.l()).exp());
    }
    Ok((phi, tn))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stationary::transmission;

    fn fig2() -> BarrierSystem {
        BarrierSystem::new(0.3, 0.001, 4.0, 0.067).unwrap()
    }

    #[test]
    fn first_poles_of_fig2_barrier() {
        let set = find_poles(&fig2(), 3).unwrap();
        let k: Vec<Complex64> = set.poles().iter().map(|p| p.k).collect();
        let expected = [
            Complex64::new(0.87791, -0.25705),
            Complex64::new(1.49171, -0.66117),
            Complex64::new(2.26027, -0.90050),
        ];
        for (a, b) in k.iter().zip(expected) {
            assert!((a - b).norm() < 1e-4, "{a} vs {b}");
        }
        let e1 = set.poles()[0].energy;
        assert!(e1.re > 0.0 && e1.re < 3.0 * 0.3 && e1.im < 0.0);
    }

    #[test]
    fn residuals_and_symmetry() {
        let sys = fig2();
        let set = find_poles(&sys, 60).unwrap();
        for p in set.iter_signed() {
            assert!(p.residual <= POLE_RESIDUAL_TOL);
            assert!(normalised_residual(p.k, &sys) <= POLE_RESIDUAL_TOL, "{}", p.n);
        }
        for p in set.poles() {
            assert!(p.k.re > 0.0 && p.k.im < 0.0);
        }
    }

    #[test]
    fn newton_is_stationary_at_a_converged_pole() {
        let sys = fig2();
        let set = find_poles(&sys, 20).unwrap();
        for p in set.poles() {
            let again = newton(p.k, &sys).unwrap();
            assert!((again - p.k).norm() < 1e-13 * p.k.norm().max(1.0));
        }
    }

    #[test]
    fn asymptotic_spacing() {
        let sys = fig2();
        let set = find_poles(&sys, 40).unwrap();
        let pts: Vec<(f64, f64)> = (20..=40)
            .map(|n| (f64::from(n), set.get(n).unwrap().k.re))
            .collect();
        let m = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        // 1.0010 of π/L on this window; the excess shrinks further out.
        assert!((slope / (PI / sys.l()) - 1.0).abs() < 1.5e-3, "{slope}");
        let far = find_poles(&sys, 400).unwrap();
        let far_slope = (far.get(400).unwrap().k.re - far.get(300).unwrap().k.re) / 100.0;
        assert!((far_slope / (PI / sys.l()) - 1.0).abs() < 1.5e-4, "{far_slope}");
    }

    #[test]
    fn gamow_state_is_outgoing_and_normalised() {
        let sys = fig2();
        let set = find_poles(&sys, 8).unwrap();
        let l = sys.l();
        for p in set.iter_signed() {
            let h = 1e-5;
            let d0 = (p.u(h, &sys) - p.u(-h, &sys)) / (2.0 * h);
            let dl = (p.u(l + h, &sys) - p.u(l - h, &sys)) / (2.0 * h);
            assert!((d0 + I * p.k * p.u0).norm() <= 1e-8 * (p.k * p.u0).norm());
            assert!((dl - I * p.k * p.u_l).norm() <= 1e-8 * (p.k * p.u_l).norm());
            let direct = gamow_norm_integral(p.k, &sys) * p.u0 * p.u0;
            assert!((direct - 1.0).norm() < 1e-10, "n = {}: {direct}", p.n);
        }
    }

    #[test]
    fn residue_of_transmission() {
        let sys = fig2();
        let set = find_poles(&sys, 4).unwrap();
        for p in set.iter_signed() {
            // (1/2πi)∮ T dk on a small circle, trapezoidal rule.
            let r = 1e-3;
            let m = 256;
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..m {
                let e = Complex64::from_polar(r, 2.0 * PI * j as f64 / m as f64);
                acc += transmission(p.k + e, &sys).unwrap() * e;
            }
            let residue = acc / m as f64;
            let expected = I * p.u0 * p.u_l * (-I * p.k * sys.l()).exp();
            assert!((residue - expected).norm() <= 1e-6 * expected.norm(), "{}", p.n);
        }
    }

    #[test]
    fn coefficient_identities() {
        let sys = fig2();
        let set = find_poles(&sys, 30).unwrap();
        assert!(set.axis_poles().is_empty());
        let (phi, tn) = expansion_coeffs(sys.l(), sys.k(), &set).unwrap();
        for (i, p) in set.iter_signed().enumerate() {
            let want = phi[i] * (-I * p.k * sys.l()).exp();
            assert!((tn[i] - want).norm() <= 1e-12 * want.norm());
        }
        // Conjugate pairing: the −n coefficient is minus the conjugate of +n
        // because the incident k enters as 2ik.
        for pair in tn.chunks(2) {
            assert!((pair[1] + pair[0].conj()).norm() <= 1e-12 * pair[0].norm());
        }
        // |T_n| decays, and a_n²·|T_n| levels off: the tail goes as 1/a_n².
        let tail: Vec<f64> = set
            .poles()
            .iter()
            .zip(tn.chunks(2))
            .map(|(p, c)| c[0].norm() * p.k.re * p.k.re)
            .collect();
        assert!(tn[58].norm() < 0.05 * tn[0].norm());
        assert!((tail[29] / tail[19] - 1.0).abs() < 5e-3, "{tail:?}");
    }

    #[test]
    fn extension_matches_direct_construction() {
        let sys = fig2();
        let direct = find_poles(&sys, 24).unwrap();
        let mut grown = find_poles(&sys, 8).unwrap();
        grown.extend_to(16).unwrap();
        grown.extend_to(24).unwrap();
        assert_eq!(direct, grown);
        assert_eq!(grown.audit().unwrap(), 24);
    }

    #[test]
    fn audit_passes_across_opacities() {
        for alpha in [0.3, 1.0, 2.0, 2.0653, 3.3, 5.0, 8.0] {
            for u in [1.5, 5.0, 10.0, 300.0, 3000.0] {
                let sys = BarrierSystem::from_opacity(alpha, u, 0.3, 0.067).unwrap();
                let set = find_poles(&sys, 64).unwrap_or_else(|e| panic!("α={alpha} u={u}: {e}"));
                assert_eq!(set.audit().unwrap(), 64 + set.axis_poles().len());
                assert!(set.iter_signed().all(|p| p.residual <= POLE_RESIDUAL_TOL));
            }
        }
    }

    #[test]
    fn thin_barrier_has_axis_poles() {
        let sys = BarrierSystem::new(0.3, 0.001, 1.0, 0.067).unwrap();
        let set = find_poles(&sys, 16).unwrap();
        let axis: Vec<f64> = set.axis_poles().iter().map(|p| p.k.im).collect();
        assert_eq!(axis.len(), 2, "{axis:?}");
        assert!((axis[0] + 0.291_548_240_783).abs() < 1e-9);
        assert!((axis[1] + 5.333_948_739_374).abs() < 1e-9);
        for p in set.axis_poles() {
            assert!(p.residual <= POLE_RESIDUAL_TOL);
            assert!(p.k.re == 0.0);
            let direct = gamow_norm_integral(p.k, &sys) * p.u0 * p.u0;
            assert!((direct - 1.0).norm() < 1e-10);
        }
        assert_eq!(set.audit().unwrap(), 18);
        assert!(find_poles(&sys.with_width(2.0).unwrap(), 4).unwrap().axis_poles().is_empty());
    }

    #[test]
    fn narrow_resonance_of_wide_barrier_is_found() {
        let sys = BarrierSystem::new(0.3, 0.001, 7.3, 0.067).unwrap();
        let set = find_poles(&sys, 50).unwrap();
        let k1 = set.get(1).unwrap().k;
        assert!((k1 - Complex64::new(0.81192037, -0.0663584)).norm() < 1e-6, "{k1}");
    }

    #[test]
    fn deterministic() {
        let sys = fig2().with_width(7.3).unwrap();
        assert_eq!(find_poles(&sys, 50).unwrap(), find_poles(&sys, 50).unwrap());
    }

    #[test]
    fn errors() {
        assert_eq!(find_poles(&fig2(), 0), Err(ResonanceError::EmptyRequest));
        let set = find_poles(&fig2(), 2).unwrap();
        assert!(matches!(
            expansion_coeffs(5.0, 0.1, &set),
            Err(ResonanceError::XOutOfRange { .. })
        ));
    }
}
