//! The Faddeeva function w(z) = exp(−z²)·erfc(−iz).
//!
//! Three evaluation regions, all for Im z ≥ 0 unless noted:
//!
//! * `|z| < 1`: Maclaurin series Σ (iz)ⁿ/Γ(n/2 + 1), used in every direction.
//! * `1 ≤ |z| < 7`: trapezoidal sum of the integral representation
//!   w(z) = (i/π)∫ e^{−t²}/(z − t) dt on a grid of step 0.42, plus the exact
//!   correction from the pole at t = z. The aliasing error is of order
//!   e^{−π²/a²} ≈ 5e−25. The grid is shifted by half a step whenever Re z
//!   falls close to a node.
//! * `|z| ≥ 7`: Laplace continued fraction.
//!
//! The lower half-plane goes through w(z) = 2e^{−z²} − w(−z).

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::SpecialError;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const SERIES_RADIUS: f64 = 1.0;
const CF_RADIUS: f64 = 7.0;
const STEP: f64 = 0.42;
const HALF_NODES: i32 = 18;
/// Largest exponent for which exp() is finite.
const MAX_EXP: f64 = 709.78;

struct Nodes {
    t: Vec<f64>,
    weight: Vec<f64>,
}

fn nodes(shifted: bool) -> &'static Nodes {
    static PLAIN: OnceLock<Nodes> = OnceLock::new();
    static SHIFTED: OnceLock<Nodes> = OnceLock::new();
    let cell = if shifted { &SHIFTED } else { &PLAIN };
    cell.get_or_init(|| {
        let offset = if shifted { 0.5 } else { 0.0 };
        let t: Vec<f64> = (-HALF_NODES..=HALF_NODES)
            .map(|n| (f64::from(n) + offset) * STEP)
            .collect();
        let weight = t.iter().map(|&ti| (-ti * ti).exp()).collect();
        Nodes { t, weight }
    })
}

/// w(z) for any finite z.
pub fn faddeeva(z: Complex64) -> Result<Complex64, SpecialError> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(SpecialError::NonFinite(z));
    }
    if z.norm() < SERIES_RADIUS {
        return Ok(w_series(z));
    }
    if z.im < 0.0 {
        let exponent = -(z * z);
        if exponent.re > MAX_EXP {
            return Err(SpecialError::Overflow(z));
        }
        return Ok(2.0 * exponent.exp() - w_upper(-z));
    }
    Ok(w_upper(z))
}

/// dw/dz = −2z·w(z) + 2i/√π.
pub fn faddeeva_derivative(z: Complex64, w: Complex64) -> Complex64 {
    -2.0 * z * w + Complex64::new(0.0, 2.0 * FRAC_1_SQRT_PI)
}

fn w_upper(z: Complex64) -> Complex64 {
    if z.norm() >= CF_RADIUS {
        w_continued_fraction(z)
    } else {
        w_trapezoid(z)
    }
}

pub(crate) fn w_series(z: Complex64) -> Complex64 {
    let iz = Complex64::new(-z.im, z.re);
    let iz2 = iz * iz;
    // Even and odd powers interleave with Γ(n/2 + 1) growing by n/2 + 1.
    let mut even = Complex64::new(1.0, 0.0);
    let mut odd = iz * (2.0 * FRAC_1_SQRT_PI);
    let mut sum = even + odd;
    let mut n = 0.0_f64;
    loop {
        even = even * iz2 / (n / 2.0 + 1.0);
        odd = odd * iz2 / (n / 2.0 + 1.5);
        sum += even + odd;
        n += 2.0;
        if even.norm() + odd.norm() <= 1e-18 * sum.norm() || n > 200.0 {
            break;
        }
    }
    sum
}

pub(crate) fn w_trapezoid(z: Complex64) -> Complex64 {
    let frac = (z.re / STEP).rem_euclid(1.0);
    w_trapezoid_on(z, !(0.25..=0.75).contains(&frac))
}

fn w_trapezoid_on(z: Complex64, shifted: bool) -> Complex64 {
    let grid = nodes(shifted);
    let mut sum = Complex64::new(0.0, 0.0);
    for (&t, &wt) in grid.t.iter().zip(&grid.weight) {
        sum += wt / (z - t);
    }
    sum *= Complex64::new(0.0, STEP / PI);
    // Pole correction 2e^{−z²}/(1 ∓ e^{−2πiz/a}) written with q = e^{2πiz/a},
    // |q| ≤ 1, so that nothing overflows for Im z > 0.
    let phase = Complex64::new(0.0, 2.0 * PI / STEP) * z;
    let q = phase.exp();
    let factor = if shifted { 1.0 / (1.0 + q) } else { -1.0 / (1.0 - q) };
    sum + 2.0 * (phase - z * z).exp() * factor
}

pub(crate) fn w_continued_fraction(z: Complex64) -> Complex64 {
    let r = z.norm();
    let terms = if r < 12.0 {
        24
    } else if r < 30.0 {
        14
    } else if r < 200.0 {
        8
    } else {
        4
    };
    let mut tail = Complex64::new(0.0, 0.0);
    for k in (1..=terms).rev() {
        tail = (f64::from(k) / 2.0) / (z - tail);
    }
    Complex64::new(0.0, FRAC_1_SQRT_PI) / (z - tail)
}
