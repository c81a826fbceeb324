use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use super::{faddeeva, faddeeva_derivative, SpecialError};
use crate::units::BarrierSystem;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The argument y_q(x, t) = e^{−iπ/4}·(m/2ħt)^{1/2}·(x − ħqt/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoshinskyArg {
    pub y: Complex64,
    pub q: Complex64,
    pub x: f64,
    pub t: f64,
}

impl MoshinskyArg {
    pub fn new(x: f64, q: Complex64, t: f64, sys: &BarrierSystem) -> Result<Self, SpecialError> {
        let beta = sys.hbar_over_m();
        check_time(t)?;
        Ok(Self {
            y: argument(x, q, t, beta),
            q,
            x,
            t,
        })
    }
}

fn check_time(t: f64) -> Result<(), SpecialError> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(SpecialError::NonPositiveTime(t))
    }
}

fn argument(x: f64, q: Complex64, t: f64, beta: f64) -> Complex64 {
    Complex64::from_polar(1.0, -FRAC_PI_4) * (x - beta * q * t) / (2.0 * beta * t).sqrt()
}

/// M(x, q, t) = ½·e^{imx²/2ħt}·w(iy_q).
pub fn moshinsky_m(x: f64, q: Complex64, t: f64, sys: &BarrierSystem) -> Result<Complex64, SpecialError> {
    moshinsky_pair(x, q, t, sys.hbar_over_m()).map(|(m, _)| m)
}

/// ∂M/∂t at fixed x and q.
pub fn moshinsky_m_dt(x: f64, q: Complex64, t: f64, sys: &BarrierSystem) -> Result<Complex64, SpecialError> {
    moshinsky_pair(x, q, t, sys.hbar_over_m()).map(|(_, dm)| dm)
}

/// M and ∂M/∂t together, with ħ/m (nm²/fs) passed directly.
///
/// When iy_q falls in the lower half-plane outside the unit disc the value
/// is assembled as e^{i(qx − ħq²t/2m)} − ½e^{iφ}·w(−iy_q). The Gaussian
/// factor of the reflection formula combines with the chirp e^{iφ} into that
/// plane wave exactly, so nothing of size e^{|y|²} is ever formed.
pub fn moshinsky_pair(
    x: f64,
    q: Complex64,
    t: f64,
    beta: f64,
) -> Result<(Complex64, Complex64), SpecialError> {
    check_time(t)?;
    let root = (2.0 * beta * t).sqrt();
    let rot = Complex64::from_polar(1.0, -FRAC_PI_4);
    let z = I * rot * (x - beta * q * t) / root;
    let dz = -I * rot * (x + beta * q * t) / (2.0 * t * root);
    let phi = x * x / (2.0 * beta * t);
    let dphi = -phi / t;
    let chirp = Complex64::from_polar(0.5, phi);

    if z.im >= 0.0 || z.norm() < 1.0 {
        let w = faddeeva(z)?;
        let m = chirp * w;
        let dm = chirp * (I * dphi * w + faddeeva_derivative(z, w) * dz);
        return Ok((m, dm));
    }

    let wr = faddeeva(-z)?;
    let plane = (I * (q * x - 0.5 * beta * q * q * t)).exp();
    if !(plane.re.is_finite() && plane.im.is_finite()) {
        return Err(SpecialError::Overflow(z));
    }
    let dplane = plane * (-0.5 * I * beta * q * q);
    let m = plane - chirp * wr;
    let dm = dplane - chirp * (I * dphi * wr - faddeeva_derivative(-z, wr) * dz);
    Ok((m, dm))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys() -> BarrierSystem {
        BarrierSystem::new(0.3, 0.001, 4.0, 0.067).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn argument_definition() {
        let s = sys();
        let arg = MoshinskyArg::new(3.0, c(0.5, -0.2), 2.0, &s).unwrap();
        let beta = s.hbar_over_m();
        let expected = Complex64::from_polar(1.0, -FRAC_PI_4)
            * (1.0 / (2.0 * beta * 2.0)).sqrt()
            * (3.0 - beta * c(0.5, -0.2) * 2.0);
        assert!((arg.y - expected).norm() < 1e-15);
    }

    #[test]
    fn vanishes_at_small_times() {
        let s = sys();
        for t in [1e-6, 1e-8] {
            let m = moshinsky_m(2.0, c(s.k(), 0.0), t, &s).unwrap();
            assert!(m.norm() < 1e-3, "{t}: {m}");
        }
    }

    #[test]
    fn approaches_plane_wave_at_long_times() {
        let s = sys();
        let beta = s.hbar_over_m();
        let k = 1.2;
        let x = 2.0;
        // The approach is algebraic, roughly 1/(k·sqrt(πħt/2m)).
        let mut last = f64::INFINITY;
        for t in [4e2, 4e4, 4e6] {
            let m = moshinsky_m(x, c(k, 0.0), t, &s).unwrap();
            let plane = Complex64::from_polar(1.0, k * x - 0.5 * beta * k * k * t);
            let gap = (m - plane).norm();
            assert!(gap < 0.6 / (k * (std::f64::consts::PI * beta * t / 2.0).sqrt()));
            assert!(gap < last);
            last = gap;
        }
    }

    #[test]
    fn reflection_identity() {
        // M(x, q, t) + M(−x, −q, t) = e^{i(qx − ħq²t/2m)}.
        let s = sys();
        let beta = s.hbar_over_m();
        for (x, q, t) in [
            (2.0, c(0.04, 0.0), 3.0),
            (4.0, c(1.5, -0.66), 0.7),
            (0.0, c(-2.2, -0.9), 12.0),
            (9.0, c(0.9, -0.26), 40.0),
        ] {
            let a = moshinsky_m(x, q, t, &s).unwrap();
            let b = moshinsky_m(-x, -q, t, &s).unwrap();
            let plane = (I * (q * x - 0.5 * beta * q * q * t)).exp();
            assert!((a + b - plane).norm() <= 1e-12 * plane.norm().max(a.norm()));
        }
    }

    #[test]
    fn time_derivative_matches_finite_difference() {
        let s = sys();
        for (x, q, t) in [
            (4.0, c(0.042, 0.0), 5.0),
            (4.0, c(-0.042, 0.0), 5.0),
            (0.0, c(0.878, -0.257), 2.0),
            (8.0, c(-2.26, -0.9), 0.5),
            (1.0, c(30.0, -1.2), 1.5),
        ] {
            let dm = moshinsky_m_dt(x, q, t, &s).unwrap();
            // Five-point stencil; the chirp makes M oscillate quickly at small t.
            let h = 2e-4 * t;
            let m = |dt: f64| moshinsky_m(x, q, t + dt, &s).unwrap();
            let fd = (m(-2.0 * h) - 8.0 * m(-h) + 8.0 * m(h) - m(2.0 * h)) / (12.0 * h);
            assert!((dm - fd).norm() <= 1e-8 * dm.norm().max(1e-12), "{x} {q} {t}: {dm} {fd}");
        }
    }

    #[test]
    fn solves_free_schroedinger_equation() {
        // i ∂M/∂t = −(ħ/2m) ∂²M/∂x²
        let s = sys();
        let beta = s.hbar_over_m();
        for (x, q, t) in [(2.0, c(0.5, 0.0), 3.0), (4.0, c(0.878, -0.257), 6.0)] {
            let h = 1e-3;
            let m = |x| moshinsky_m(x, q, t, &s).unwrap();
            let mxx = (m(x + h) - 2.0 * m(x) + m(x - h)) / (h * h);
            let lhs = I * moshinsky_m_dt(x, q, t, &s).unwrap();
            let rhs = -0.5 * beta * mxx;
            assert!((lhs - rhs).norm() <= 1e-6 * lhs.norm());
        }
    }

    #[test]
    fn rejects_non_positive_time() {
        let s = sys();
        assert_eq!(
            moshinsky_m(1.0, c(1.0, 0.0), 0.0, &s),
            Err(SpecialError::NonPositiveTime(0.0))
        );
        assert!(moshinsky_m_dt(1.0, c(1.0, 0.0), -1.0, &s).is_err());
    }
}
