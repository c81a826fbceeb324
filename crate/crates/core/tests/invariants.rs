//! Structural properties that hold for any barrier, checked on random
//! parameter sets.

use num_complex::Complex64;
use proptest::prelude::*;
use qshutter::analysis::local_frequency;
use qshutter::propagator::PropagatorConfig;
use qshutter::{find_time_domain_resonance, BarrierSystem, Propagator, SearchWindow, StationaryState};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn tunneling_system() -> impl Strategy<Value = BarrierSystem> {
    (0.05..1.0f64, 2.0..200.0f64, 1.0..8.0f64, 0.05..1.0f64)
        .prop_map(|(v, u, l, m)| BarrierSystem::new(v, v / u, l, m).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flux_is_conserved(v in 0.05..1.0f64, e in 0.0005..2.0f64, l in 0.5..12.0f64, m in 0.05..1.0f64) {
        prop_assume!((v - e).abs() > 1e-6);
        let sys = BarrierSystem::new(v, e, l, m).unwrap();
        let st = StationaryState::new(sys.k(), &sys).unwrap();
        let total = st.transmission_probability() + st.reflection_probability();
        prop_assert!((total - 1.0).abs() <= 1e-12, "{}", total);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn interior_and_exterior_agree_at_the_edge(sys in tunneling_system(), t in 0.2..60.0f64) {
        let prop = Propagator::new(&sys).unwrap();
        prop_assume!(t > 2.0 * prop.earliest_time(sys.l()));
        let a = prop.psi_internal(sys.l(), t).unwrap();
        let b = prop.psi_external(sys.l(), t).unwrap();
        let scale = a.psi.norm().max(1e-3 * prop.transmission().norm());
        prop_assert!((a.psi - b.psi).norm() <= 1e-8 * scale, "{} vs {}", a.psi, b.psi);
    }

    #[test]
    fn solves_the_schroedinger_equation(sys in tunneling_system(), xi in 0.1..3.0f64, t in 1.0..40.0f64) {
        // iħ∂Ψ/∂t = −(ħ²/2m)∂²Ψ/∂x² + V(x)Ψ, checked away from the edges.
        let prop = Propagator::new(&sys).unwrap();
        let l = sys.l();
        let x = if xi < 1.0 { l * (0.1 + 0.8 * xi) } else { l * (0.6 + xi) };
        let v = if x < l { sys.v() } else { 0.0 };
        // Step tied to the local wavenumber x·m/ħt, which is large at early times.
        let k_local = sys.k().max(sys.kappa0().max(x / (sys.hbar_over_m() * t)));
        let h = (0.02 / k_local).min(0.02 * l);
        let psi = |x: f64| prop.at(x).unwrap().sample(t).unwrap().psi;
        let mid = prop.at(x).unwrap().sample(t).unwrap();
        let dxx = (-psi(x - 2.0 * h) + 16.0 * psi(x - h) - 30.0 * mid.psi + 16.0 * psi(x + h) - psi(x + 2.0 * h))
            / (12.0 * h * h);
        let lhs = I * qshutter::units::HBAR_EV_FS * mid.dpsi_dt;
        let rhs = -sys.hbar2_over_2m() * dxx + v * mid.psi;
        let scale = (sys.hbar2_over_2m() * dxx).norm().max(v * mid.psi.norm()).max(lhs.norm());
        prop_assume!(scale > 1e-12);
        prop_assert!((lhs - rhs).norm() <= 1e-5 * scale, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn tighter_tolerance_never_uses_fewer_terms(sys in tunneling_system(), t in 1.0..40.0f64) {
        let loose = Propagator::with_config(&sys, PropagatorConfig { tol: 1e-6, ..PropagatorConfig::default() }).unwrap();
        let tight = Propagator::from_poles(loose.poles().clone(), PropagatorConfig::default());
        let a = loose.psi_external(sys.l(), t).unwrap();
        let b = tight.psi_external(sys.l(), t).unwrap();
        prop_assert!(b.n_terms_used >= a.n_terms_used);
        prop_assert!(b.trunc_error_est <= a.trunc_error_est.max(1e-10));
        let scale = b.psi.norm().max(1e-3 * tight.transmission().norm());
        prop_assert!((a.psi - b.psi).norm() <= 1e-5 * scale);
    }

    #[test]
    fn bandwidth_is_the_log_derivative_of_the_modulus(sys in tunneling_system(), t in 1.0..40.0f64) {
        let prop = Propagator::new(&sys).unwrap();
        let point = prop.at(sys.l()).unwrap();
        let s = point.sample(t).unwrap();
        let f = local_frequency(&s).unwrap();
        let ln_abs = |t: f64| point.sample(t).unwrap().psi.norm().ln();
        let h = 1e-3 * t;
        let fd = (ln_abs(t - 2.0 * h) - 8.0 * ln_abs(t - h) + 8.0 * ln_abs(t + h) - ln_abs(t + 2.0 * h)) / (12.0 * h);
        prop_assert!((fd.abs() - f.sigma).abs() <= 1e-6 * f.sigma.max(f.omega_av.abs()), "{} vs {}", fd, f.sigma);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn relative_frequency_depends_only_on_opacity_and_u(alpha in 2.6..4.5f64, u in 5.0..300.0f64, lambda in 0.5..2.0f64) {
        let a = BarrierSystem::from_opacity(alpha, u, 0.3, 0.067).unwrap();
        let b = BarrierSystem::from_opacity(alpha, u, 0.3 * lambda * lambda, 0.067).unwrap();
        let peak = |sys: &BarrierSystem| {
            // Times scale like 1/V, so the window does too.
            let s = 0.3 / sys.v();
            let window = SearchWindow::with_range(0.01 * s, 60.0 * s);
            find_time_domain_resonance(&Propagator::new(sys).unwrap(), sys.l(), &window).unwrap()
        };
        let (pa, pb) = (peak(&a), peak(&b));
        prop_assert_eq!(pa.exists, pb.exists);
        if pa.exists {
            prop_assert!((pa.omega_ratio_at_peak - pb.omega_ratio_at_peak).abs() <= 1e-6);
            prop_assert!((pa.t_max * a.v() - pb.t_max * b.v()).abs() <= 1e-6 * pa.t_max * a.v());
        }
    }
}

#[test]
fn density_settles_on_the_stationary_value() {
    let sys = BarrierSystem::new(0.3, 0.001, 4.0, 0.067).unwrap();
    let prop = Propagator::new(&sys).unwrap();
    let t2 = prop.transmission_probability();
    let mut last = f64::INFINITY;
    for t in [1e4, 1e6, 1e8, 1e10, 1e12] {
        let gap = (prop.psi_external(sys.l(), t).unwrap().abs2() / t2 - 1.0).abs();
        assert!(gap < last * 1.5, "t = {t}: {gap}");
        last = gap;
    }
    assert!(last <= 1e-3, "{last}");
}
