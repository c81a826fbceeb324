//! The exterior expansion only joins the interior one at x = L with the
//! default conventions. Each alternative reading breaks the match by far
//! more than any numerical error.

use num_complex::Complex64;
use qshutter::propagator::{Convention, PropagatorConfig};
use qshutter::{BarrierSystem, Propagator};

fn mismatch(convention: Convention, t: f64) -> f64 {
    let sys = BarrierSystem::new(0.3, 0.001, 4.0, 0.067).unwrap();
    let cfg = PropagatorConfig {
        convention,
        ..PropagatorConfig::default()
    };
    let prop = Propagator::with_config(&sys, cfg).unwrap();
    let inside = prop.psi_internal(sys.l(), t).unwrap().psi;
    let outside = prop.psi_external(sys.l(), t).unwrap().psi;
    (inside - outside).norm() / inside.norm()
}

#[test]
fn default_convention_is_continuous() {
    for t in [0.5, 5.17, 40.0] {
        assert!(mismatch(Convention::default(), t) < 1e-9);
    }
}

#[test]
fn extra_phase_on_the_pole_sum_breaks_continuity() {
    let c = Convention {
        exterior_sum_factor: Complex64::new(0.0, -1.0),
        ..Convention::default()
    };
    for t in [0.5, 5.17, 40.0] {
        assert!(mismatch(c, t) > 1e-3, "t = {t}");
    }
}

#[test]
fn shifted_origin_breaks_continuity() {
    let c = Convention {
        exterior_shift: true,
        ..Convention::default()
    };
    for t in [0.5, 5.17, 40.0] {
        assert!(mismatch(c, t) > 1e-3, "t = {t}");
    }
}
