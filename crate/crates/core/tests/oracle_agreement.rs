//! The resonance expansion against brute-force time stepping.

use qshutter::oracle::{cn_evolve_problem, CnProblem};
use qshutter::{cn_evolve, find_time_domain_resonance, BarrierSystem, CnConfig, Propagator, SearchWindow};

fn fig2() -> BarrierSystem {
    BarrierSystem::new(0.3, 0.001, 4.0, 0.067).unwrap()
}

#[test]
fn densities_agree_at_three_probes() {
    let sys = fig2();
    let prop = Propagator::new(&sys).unwrap();
    let l = sys.l();
    let probes = [0.5 * l, l, 2.0 * l];
    let times: Vec<f64> = (0..=44).map(|i| 1.0 + 0.25 * f64::from(i)).collect();
    let cfg = CnConfig::for_system(&sys, 2.0 * l, 12.0);
    let cn = cn_evolve(&sys, &cfg, &probes, &times).unwrap();
    for (p, &x) in probes.iter().enumerate() {
        let plateau = prop.at(x).unwrap().stationary_amplitude().norm_sqr();
        let trace = prop.trace(x, &times).unwrap();
        for (j, s) in trace.samples.iter().enumerate() {
            if s.abs2() > 1e-6 * plateau {
                let rel = (cn.psi[p][j].norm_sqr() - s.abs2()).abs() / s.abs2();
                assert!(rel < 1e-2, "x = {x}, t = {}: {rel:e}", times[j]);
            }
        }
    }
}

#[test]
fn peak_time_agrees() {
    let sys = fig2();
    let prop = Propagator::new(&sys).unwrap();
    let analytic = find_time_domain_resonance(&prop, sys.l(), &SearchWindow::default()).unwrap();
    let times: Vec<f64> = (0..=300).map(|i| 4.0 + 0.01 * f64::from(i)).collect();
    let cfg = CnConfig::for_system(&sys, sys.l(), 7.0);
    let cn = cn_evolve(&sys, &cfg, &[sys.l()], &times).unwrap();
    let (j, _) = cn.psi[0]
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
        .unwrap();
    assert!(j > 0 && j < times.len() - 1);
    assert!((times[j] - analytic.t_max).abs() < 0.1, "{} vs {}", times[j], analytic.t_max);
}

#[test]
fn halving_the_grid_shrinks_the_difference() {
    let sys = fig2();
    let prop = Propagator::new(&sys).unwrap();
    let times = [2.0, 5.0];
    let exact: Vec<f64> = times.iter().map(|&t| prop.psi_external(8.0, t).unwrap().abs2()).collect();
    let err = |dx: f64, dt: f64| {
        let cfg = CnConfig {
            dx,
            dt,
            ..CnConfig::for_system(&sys, 8.0, 5.0)
        };
        let tr = cn_evolve_problem(&CnProblem::barrier(&sys), &cfg, &[8.0], &times).unwrap();
        tr.psi[0]
            .iter()
            .zip(&exact)
            .map(|(c, e)| (c.norm_sqr() - e).abs() / e)
            .fold(0.0, f64::max)
    };
    let coarse = err(0.04, 0.008);
    let fine = err(0.02, 0.004);
    assert!(fine < 0.5 * coarse, "{coarse:e} -> {fine:e}");
}
