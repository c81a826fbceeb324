//! One function per subcommand, each turning a [`RunConfig`] into a table.

use clap::Subcommand;
use qshutter::analysis::spectrogram_guarded;
use qshutter::sweeps::{locate_resonance, ratio_crossings};
use qshutter::{
    cn_evolve, find_poles, opacity_window, sweep_freq_vs_alpha, sweep_freq_vs_x, sweep_tmax_vs_l, BarrierSystem,
    CnConfig, Error, Propagator, PropagatorConfig, ResonancePole, SearchWindow, SweepOptions,
};

use crate::config::RunConfig;
use crate::output::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// List the transmission poles and their Gamow states.
    Poles,
    /// Ψ(x,t) and ∂Ψ/∂t at one position on a time grid.
    Evolve,
    /// |Ψ|², ω_av and σ at one position on a time grid.
    Spectrogram,
    /// The first maximum of |Ψ(x,t)|² at one position.
    Tmax,
    /// t_max at the barrier edge against the barrier width.
    #[command(name = "scan-tmax-L")]
    ScanTmaxL,
    /// t_max and ω_av/ω_V against the position.
    ScanFreqX,
    /// ω_av/ω_V at the barrier edge against the opacity, for each u.
    ScanFreqAlpha,
    /// The opacity window [α_c, α_u] for each u.
    Window,
    /// The resonance expansion against a Crank–Nicolson integration.
    OracleCompare,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Poles,
        Command::Evolve,
        Command::Spectrogram,
        Command::Tmax,
        Command::ScanTmaxL,
        Command::ScanFreqX,
        Command::ScanFreqAlpha,
        Command::Window,
        Command::OracleCompare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Poles => "poles",
            Command::Evolve => "evolve",
            Command::Spectrogram => "spectrogram",
            Command::Tmax => "tmax",
            Command::ScanTmaxL => "scan-tmax-L",
            Command::ScanFreqX => "scan-freq-x",
            Command::ScanFreqAlpha => "scan-freq-alpha",
            Command::Window => "window",
            Command::OracleCompare => "oracle-compare",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn run(self, cfg: &RunConfig) -> Result<Table, Error> {
        match self {
            Command::Poles => poles(cfg),
            Command::Evolve => evolve(cfg),
            Command::Spectrogram => spectrogram(cfg),
            Command::Tmax => tmax(cfg),
            Command::ScanTmaxL => scan_tmax_l(cfg),
            Command::ScanFreqX => scan_freq_x(cfg),
            Command::ScanFreqAlpha => scan_freq_alpha(cfg),
            Command::Window => window(cfg),
            Command::OracleCompare => oracle_compare(cfg),
        }
    }
}

fn system(cfg: &RunConfig) -> Result<BarrierSystem, Error> {
    let s = &cfg.system;
    Ok(BarrierSystem::new(s.v_ev, s.e_ev, s.l_nm, s.mass_ratio)?)
}

fn propagator_config(cfg: &RunConfig) -> PropagatorConfig {
    PropagatorConfig {
        tol: cfg.numerics.tol,
        max_poles: cfg.numerics.max_poles,
        ..PropagatorConfig::default()
    }
}

fn sweep_options(cfg: &RunConfig) -> SweepOptions {
    let w = &cfg.window;
    SweepOptions {
        propagator: propagator_config(cfg),
        window: SearchWindow {
            t_lo: w.t_lo,
            t_hi: w.t_hi,
            points: w.points,
            ripple: w.ripple,
            underflow_guard: cfg.numerics.underflow_guard,
            ..SearchWindow::default()
        },
        ..SweepOptions::default()
    }
}

fn propagator(cfg: &RunConfig) -> Result<Propagator, Error> {
    Ok(Propagator::with_config(&system(cfg)?, propagator_config(cfg))?)
}

fn pole_row(p: &ResonancePole) -> Vec<Cell> {
    vec![
        Cell::I(p.n.into()),
        Cell::F(p.k.re),
        Cell::F(p.k.im),
        Cell::F(p.energy.re),
        Cell::F(p.energy.im),
        Cell::F(p.residual),
        Cell::F(p.u0.re),
        Cell::F(p.u0.im),
        Cell::F(p.u_l.re),
        Cell::F(p.u_l.im),
    ]
}

fn poles(cfg: &RunConfig) -> Result<Table, Error> {
    let set = find_poles(&system(cfg)?, cfg.poles_count)?;
    let mut t = Table::new(&[
        "n", "re_k", "im_k", "re_E", "im_E", "residual", "re_u0", "im_u0", "re_uL", "im_uL",
    ]);
    for p in set.axis_poles().iter().chain(set.poles()) {
        t.push(pole_row(p));
    }
    if !set.axis_poles().is_empty() {
        t.notes.push(format!("{} pole(s) on the negative imaginary axis (n = 0)", set.axis_poles().len()));
    }
    Ok(t)
}

fn evolve(cfg: &RunConfig) -> Result<Table, Error> {
    let prop = propagator(cfg)?;
    let x = cfg.evolve.x_nm;
    let trace = prop.trace(x, &cfg.evolve.times.values())?;
    let plateau = prop.at(x)?.stationary_amplitude().norm_sqr();
    let mut t = Table::new(&[
        "t", "re_psi", "im_psi", "abs2", "abs2_normalized", "re_dpsi_dt", "im_dpsi_dt", "n_terms", "trunc_error_est",
    ]);
    for s in &trace.samples {
        t.push(vec![
            Cell::F(s.t),
            Cell::F(s.psi.re),
            Cell::F(s.psi.im),
            Cell::F(s.abs2()),
            Cell::F(s.abs2() / plateau),
            Cell::F(s.dpsi_dt.re),
            Cell::F(s.dpsi_dt.im),
            Cell::I(s.n_terms_used as i64),
            Cell::F(s.trunc_error_est),
        ]);
    }
    Ok(t)
}

fn spectrogram(cfg: &RunConfig) -> Result<Table, Error> {
    let prop = propagator(cfg)?;
    let times = cfg.evolve.times.values();
    let sp = spectrogram_guarded(&prop, cfg.evolve.x_nm, &times, cfg.numerics.underflow_guard)?;
    let mut t = Table::new(&["t", "abs2", "abs2_normalized", "omega_av", "sigma", "omega_ratio"]);
    for j in 0..sp.times.len() {
        t.push(vec![
            Cell::F(sp.times[j]),
            Cell::F(sp.abs2[j]),
            Cell::F(sp.abs2_normalized[j]),
            Cell::opt(sp.omega_av[j]),
            Cell::opt(sp.sigma[j]),
            Cell::opt(sp.omega_ratio[j]),
        ]);
    }
    Ok(t)
}

fn tmax(cfg: &RunConfig) -> Result<Table, Error> {
    let prop = propagator(cfg)?;
    let r = locate_resonance(&prop, cfg.evolve.x_nm, &sweep_options(cfg))?;
    let mut t = Table::new(&["x", "t_max", "height", "omega_ratio", "sigma", "exists"]);
    t.push(vec![
        Cell::F(r.x),
        Cell::F(r.t_max),
        Cell::F(r.height),
        Cell::F(r.omega_ratio_at_peak),
        Cell::F(r.sigma_at_peak),
        Cell::B(r.exists),
    ]);
    if !r.exists {
        t.notes.push(format!("no maximum of |Ψ|² at x = {} nm", r.x));
    }
    Ok(t)
}

fn sweep_rows(t: &mut Table, rows: &[qshutter::sweeps::SweepRow], lead: impl Fn(f64) -> Vec<Cell>) {
    for r in rows {
        let mut row = lead(r.independent);
        row.extend([Cell::opt(r.t_max), Cell::opt(r.omega_ratio), Cell::opt(r.height), Cell::B(r.exists)]);
        t.push(row);
    }
}

fn scan_tmax_l(cfg: &RunConfig) -> Result<Table, Error> {
    let scan = sweep_tmax_vs_l(&cfg.scan.l_grid.values(), &system(cfg)?, &sweep_options(cfg))?;
    let mut t = Table::new(&["L", "t_max", "omega_ratio", "height", "exists"]);
    sweep_rows(&mut t, &scan.table.rows, |l| vec![Cell::F(l)]);
    match scan.basin {
        Some(b) => t.notes.push(format!("basin: minimum t_max = {} fs at L = {} nm", b.t_min, b.l_min)),
        None => t.notes.push("basin: no interior minimum".into()),
    }
    if let Some(f) = scan.linear {
        let peaks = scan.table.peaks();
        t.notes.push(format!(
            "linear regime: from L = {} nm, slope {} fs/nm, R² = {}",
            peaks[f.start].0, f.slope, f.r_squared
        ));
    }
    Ok(t)
}

fn scan_freq_x(cfg: &RunConfig) -> Result<Table, Error> {
    let sys = system(cfg)?;
    let l = sys.l();
    let grid: Vec<f64> = cfg.scan.x_over_l.values().iter().map(|f| f * l).collect();
    let table = sweep_freq_vs_x(&grid, &sys, &sweep_options(cfg))?;
    let mut t = Table::new(&["x", "x_over_L", "t_max", "omega_ratio", "height", "exists"]);
    sweep_rows(&mut t, &table.rows, |x| vec![Cell::F(x), Cell::F(x / l)]);
    Ok(t)
}

fn scan_freq_alpha(cfg: &RunConfig) -> Result<Table, Error> {
    let opts = sweep_options(cfg);
    let (v_ref, m) = (cfg.scan.v_ref_ev, cfg.system.mass_ratio);
    let grid = cfg.scan.alpha_grid.values();
    let mut t = Table::new(&["u", "alpha", "L_nm", "t_max", "omega_ratio", "height", "exists"]);
    for &u in &cfg.scan.u {
        let table = sweep_freq_vs_alpha(&grid, u, v_ref, m, &opts)?;
        for r in &table.rows {
            let l = BarrierSystem::from_opacity(r.independent, u, v_ref, m)?.l();
            t.push(vec![
                Cell::F(u),
                Cell::F(r.independent),
                Cell::F(l),
                Cell::opt(r.t_max),
                Cell::opt(r.omega_ratio),
                Cell::opt(r.height),
                Cell::B(r.exists),
            ]);
        }
        let crossings = ratio_crossings(&table, u, v_ref, m, cfg.scan.crossing_tol, &opts)?;
        let list: Vec<String> = crossings.iter().map(f64::to_string).collect();
        t.notes.push(format!("u = {u}: ω_av/ω_V crosses 1 at α = [{}]", list.join(", ")));
    }
    Ok(t)
}

fn window(cfg: &RunConfig) -> Result<Table, Error> {
    let opts = sweep_options(cfg);
    let mut t = Table::new(&["u", "alpha_c", "alpha_u"]);
    for &u in &cfg.scan.u {
        let w = opacity_window(u, cfg.scan.v_ref_ev, cfg.system.mass_ratio, cfg.scan.crossing_tol, &opts)?;
        t.push(vec![Cell::F(u), Cell::F(w.alpha_c), Cell::F(w.alpha_u)]);
    }
    Ok(t)
}

fn oracle_compare(cfg: &RunConfig) -> Result<Table, Error> {
    let sys = system(cfg)?;
    let prop = Propagator::with_config(&sys, propagator_config(cfg))?;
    let probes: Vec<f64> = cfg.oracle.probes_over_l.iter().map(|f| f * sys.l()).collect();
    let times = cfg.oracle.times.values();
    let x_far = probes.iter().copied().fold(0.0, f64::max);
    let t_end = times.last().copied().unwrap_or(0.0);
    let cn_cfg = CnConfig {
        dx: cfg.oracle.dx_nm,
        dt: cfg.oracle.dt_fs,
        ..CnConfig::for_system(&sys, x_far, t_end)
    };
    let cn = cn_evolve(&sys, &cn_cfg, &probes, &times)?;
    let mut t = Table::new(&["probe", "t", "abs2_analytic", "abs2_cn", "rel_err"]);
    let mut worst = 0.0_f64;
    for (p, &x) in probes.iter().enumerate() {
        let trace = prop.trace(x, &times)?;
        let plateau = prop.at(x)?.stationary_amplitude().norm_sqr();
        for (j, s) in trace.samples.iter().enumerate() {
            let analytic = s.abs2();
            let numeric = cn.psi[p][j].norm_sqr();
            let rel = (numeric - analytic).abs() / analytic;
            if analytic > 1e-6 * plateau {
                worst = worst.max(rel);
            }
            t.push(vec![Cell::F(x), Cell::F(s.t), Cell::F(analytic), Cell::F(numeric), Cell::F(rel)]);
        }
    }
    t.notes.push(format!("largest relative difference where |Ψ|² > 1e-6 of stationary: {worst:e}"));
    Ok(t)
}
