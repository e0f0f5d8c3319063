//! The pipelines behind each task.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{GalerkinData, ProfileSpec, RunConfig, Task};
use super::report::{num, Check, Summary, Table};
use crate::blocks::{build_families, BeltramiFamily};
use crate::error::{Error, Result};
use crate::galerkin::prolong;
use crate::iteration::energy::{energy_inequality_margin, energy_report};
use crate::iteration::ledger::inductive_ledger;
use crate::iteration::residual::residual;
use crate::iteration::{
    family_bounds, family_mode_lambda_bar, iterate_once, profile_family, EnergyProfile, IterationState, ParameterSchedule,
    ProfileBounds, StageOptions, StartTriple,
};
use crate::spectral::norms::{c_norm, dissipation, holder_seminorm, plancherel_l2, sup_norm};
use crate::spectral::ops::{differentiate, leray_project, DiffKind};
use crate::spectral::random::random_field;
use crate::spectral::snapshot::{file_digest, read_snapshot, write_snapshot, SnapshotMeta};
use crate::spectral::{FourierGrid, Rank, SpectralField};

/// Pointwise bounds asserted on every constructed state.
pub const DIVERGENCE_TOL: f64 = 1e-8;
pub const TRACE_TOL: f64 = 1e-8;
pub const DOUBLE_SUM_TOL: f64 = 1e-6;
pub const START_ENERGY_TOL: f64 = 1e-12;
pub const START_RESIDUAL_TOL: f64 = 1e-8;

struct Setup {
    grid: FourierGrid,
    profile: EnergyProfile,
    families: Arc<BeltramiFamily>,
    schedule: ParameterSchedule,
    strict: bool,
}

fn bounds_for(cfg: &RunConfig, profile: &EnergyProfile) -> Result<ProfileBounds> {
    Ok(match &cfg.profile {
        ProfileSpec::Family { k, count, .. } => {
            let (c1, c2) = family_bounds(&profile_family(*k, *count, cfg.seed)?);
            ProfileBounds { c1, c2, family: true }
        }
        _ => ProfileBounds { c1: profile.c1_norm(), c2: profile.c2_norm(), family: false },
    })
}

fn setup(cfg: &RunConfig) -> Result<Setup> {
    let families = Arc::new(build_families());
    let profile = cfg.profile()?;
    let bounds = bounds_for(cfg, &profile)?;
    let schedule = ParameterSchedule::build(cfg.schedule.params(), cfg.schedule.q_max, bounds, cfg.strict(), &families)?;
    Ok(Setup { grid: cfg.grid()?, profile, families, schedule, strict: cfg.strict() })
}

fn start_state(s: &Setup, profile: EnergyProfile) -> Result<IterationState> {
    let triple = StartTriple::new(s.grid, profile, s.schedule.lambda_bar_int()?, s.schedule.delta(1), s.schedule.alpha())?;
    Ok(IterationState::start(triple))
}

fn schedule_checks(summary: &mut Summary, s: &Setup) {
    for c in &s.schedule.conditions {
        let value = c.lhs;
        let pass = c.pass;
        summary.push(Check { name: format!("schedule.{}", c.label()), value, bound: c.rhs, asserted: s.strict && c.asserted, pass });
    }
}

fn ensure_dir(cfg: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.output.dir)?;
    Ok(())
}

fn meta(s: &Setup, q: usize, profile: &EnergyProfile, traceless: bool) -> SnapshotMeta {
    let (num, den) = s.grid.fraction();
    SnapshotMeta {
        q,
        schedule_hash: s.schedule.hash.clone(),
        profile_id: profile.id(),
        dealias_num: num,
        dealias_den: den,
        traceless,
    }
}

/// Write v, p and the stress of `state` at t; returns the paths.
fn write_state(cfg: &RunConfig, s: &Setup, state: &IterationState, t: f64, tag: &str) -> Result<Vec<PathBuf>> {
    let f = state.fields(t)?;
    let q = state.q();
    let alpha = state.alpha();
    let mut out = vec![];
    for (name, field, traceless) in [("v", &f.v, false), ("p", &f.p, false), ("stress", &f.stress, true)] {
        let path = cfg.output_path(&format!("{tag}q{q}_{name}_t{t:.4}.cins"));
        write_snapshot(&path, field, t, alpha, Some(&meta(s, q, state.profile(), traceless)))?;
        out.push(path);
    }
    Ok(out)
}

fn div_sup(v: &SpectralField) -> Result<f64> {
    Ok(sup_norm(&differentiate(v, DiffKind::Div)?))
}

fn trace_relative(r: &SpectralField) -> Result<f64> {
    let m = sup_norm(r);
    Ok(if m > 0.0 { sup_norm(&r.trace()?) / m } else { 0.0 })
}

const STATE_HEADER: [&str; 16] = [
    "q", "t", "e", "target", "energy", "gap", "window", "dissipation", "velocity_c0", "divergence", "stress_c0",
    "trace_rel", "residual", "residual_rel", "double_sum", "max_principle_margin",
];

struct Worst {
    div: f64,
    trace: f64,
    double_sum: f64,
    max_principle: f64,
    residual_rel: f64,
    window: f64,
}

/// One CSV row per sample time of `state`, accumulating the worst values.
fn sample_state(state: &IterationState, times: &[f64], double_sum: bool, table: &mut Table, worst: &mut Worst) -> Result<()> {
    let rows = energy_report(state, times)?;
    for (row, &t) in rows.iter().zip(times) {
        let f = state.fields(t)?;
        let div = div_sup(&f.v)?;
        let tr = trace_relative(&f.stress)?;
        let res = residual(state, t)?;
        let vsup = sup_norm(&f.v);
        let rel = res.sup / vsup.max(f64::MIN_POSITIVE);
        let (ds, mp) = if state.stage().is_some() {
            let (pert, _) = state.assemble_at(t, double_sum)?;
            let ds = pert.double_sum.map(|d| d.0).unwrap_or(f64::NAN);
            let mp = pert.slices.iter().map(|s| s.sample_max - s.allowed_max).fold(f64::NEG_INFINITY, f64::max);
            (ds, mp)
        } else {
            (f64::NAN, f64::NAN)
        };
        worst.div = worst.div.max(div);
        worst.trace = worst.trace.max(tr);
        if ds.is_finite() {
            worst.double_sum = worst.double_sum.max(ds);
        }
        if mp.is_finite() {
            worst.max_principle = worst.max_principle.max(mp);
        }
        worst.residual_rel = worst.residual_rel.max(rel);
        worst.window = worst.window.max(row.gap.abs() / row.window);
        let opt = |x: f64| if x.is_finite() { num(x) } else { String::new() };
        table.push(vec![
            state.q().to_string(),
            num(t),
            num(row.e),
            num(row.target),
            num(row.energy),
            num(row.gap),
            num(row.window),
            num(row.dissipation),
            num(vsup),
            num(div),
            num(sup_norm(&f.stress)),
            num(tr),
            num(res.sup),
            num(rel),
            opt(ds),
            opt(mp),
        ]);
    }
    Ok(())
}

fn finish(cfg: &RunConfig, mut summary: Summary) -> Result<Summary> {
    summary.finish();
    summary.write(&cfg.output_path(&cfg.output.summary))?;
    Ok(summary)
}

fn push_files(summary: &mut Summary, paths: &[PathBuf]) {
    summary.files.extend(paths.iter().map(|p| p.display().to_string()));
}

pub fn schedule_report(cfg: &RunConfig) -> Result<Summary> {
    let s = setup(cfg)?;
    ensure_dir(cfg)?;
    let mut summary = Summary::new(cfg.task.name(), if s.strict { "strict" } else { "desk" }, cfg.seed);
    let sch = &s.schedule;
    let mut t = Table::new(&["q", "delta", "lambda", "mu", "ell"]);
    for q in 0..=sch.q_max {
        t.push(vec![q.to_string(), num(sch.delta(q)), num(sch.lambda(q)), num(sch.mu(q)), num(sch.ell(q))]);
    }
    let mut c = Table::new(&["group", "name", "q", "lhs", "relation", "rhs", "pass", "asserted"]);
    for k in &sch.conditions {
        c.push(vec![
            k.group.clone(),
            k.name.clone(),
            k.q.map(|q| q.to_string()).unwrap_or_default(),
            num(k.lhs),
            format!("{:?}", k.relation),
            num(k.rhs),
            k.pass.to_string(),
            k.asserted.to_string(),
        ]);
    }
    let main = cfg.output_path(&cfg.output.diagnostics);
    let cond = cfg.output_path("conditions.csv");
    t.write_csv(&main)?;
    c.write_csv(&cond)?;
    push_files(&mut summary, &[main, cond]);
    summary.notes.push(format!(
        "beta = {:e}, eta = {:e}, M = {:e}, C0 = {:e}, a0 = {:e}, lambda_bar = {}, hash = {}",
        sch.beta, sch.eta, sch.m_const, sch.c0, sch.a0, sch.lambda_bar, sch.hash
    ));
    schedule_checks(&mut summary, &s);
    finish(cfg, summary)
}

pub fn init(cfg: &RunConfig) -> Result<Summary> {
    let s = setup(cfg)?;
    ensure_dir(cfg)?;
    let mut summary = Summary::new(cfg.task.name(), if s.strict { "strict" } else { "desk" }, cfg.seed);
    let state = start_state(&s, s.profile.clone())?;
    let times = &cfg.iterate.sample_times;
    let mut table = Table::new(&STATE_HEADER);
    let mut worst = Worst { div: 0.0, trace: 0.0, double_sum: 0.0, max_principle: f64::NEG_INFINITY, residual_rel: 0.0, window: 0.0 };
    sample_state(&state, times, false, &mut table, &mut worst)?;
    let energy_err = energy_report(&state, times)?.iter().map(|r| r.gap.abs() / r.target).fold(0.0, f64::max);
    summary.push(Check::at_most("start.energy_relative", energy_err, START_ENERGY_TOL, true));
    summary.push(Check::at_most("start.residual_relative", worst.residual_rel, START_RESIDUAL_TOL, true));
    summary.push(Check::at_most("start.divergence", worst.div, DIVERGENCE_TOL, true));
    summary.push(Check::at_most("start.trace_relative", worst.trace, TRACE_TOL, true));
    let path = cfg.output_path(&cfg.output.diagnostics);
    table.write_csv(&path)?;
    push_files(&mut summary, &[path]);
    if cfg.output.snapshots {
        for &t in &cfg.iterate.snapshot_times {
            let p = write_state(cfg, &s, &state, t, "")?;
            push_files(&mut summary, &p);
        }
    }
    schedule_checks(&mut summary, &s);
    finish(cfg, summary)
}

pub fn iterate(cfg: &RunConfig) -> Result<Summary> {
    let s = setup(cfg)?;
    ensure_dir(cfg)?;
    let mut summary = Summary::new(cfg.task.name(), if s.strict { "strict" } else { "desk" }, cfg.seed);
    let mut states = vec![start_state(&s, s.profile.clone())?];
    let opts = StageOptions { refine: cfg.iterate.refine, strict: s.strict, frequency: None };
    for _ in 0..cfg.iterate.stages {
        let next = iterate_once(states.last().expect("nonempty"), &s.schedule, s.families.clone(), opts)?;
        states.push(next);
    }
    let times = &cfg.iterate.sample_times;
    let mut table = Table::new(&STATE_HEADER);
    let mut ledger = Table::new(&["q", "estimate", "ratio", "pass", "asserted"]);
    let mut energy = Table::new(&["q", "t", "energy", "dissipation"]);
    for st in &states {
        let mut worst = Worst { div: 0.0, trace: 0.0, double_sum: 0.0, max_principle: f64::NEG_INFINITY, residual_rel: 0.0, window: 0.0 };
        sample_state(st, times, cfg.iterate.double_sum, &mut table, &mut worst)?;
        let q = st.q();
        summary.push(Check::at_most(format!("q{q}.divergence"), worst.div, DIVERGENCE_TOL, true));
        summary.push(Check::at_most(format!("q{q}.trace_relative"), worst.trace, TRACE_TOL, true));
        summary.push(Check::at_most(format!("q{q}.energy_window_ratio"), worst.window, 1.0, s.strict));
        if q > 0 {
            if cfg.iterate.double_sum {
                summary.push(Check::at_most(format!("q{q}.double_sum"), worst.double_sum, DOUBLE_SUM_TOL, true));
            }
            summary.push(Check::at_most(format!("q{q}.max_principle_excess"), worst.max_principle, 0.0, true));
            let stage = st.stage().expect("stage");
            let share = stage.anchors.iter().map(|a| a.share).fold(f64::INFINITY, f64::min);
            summary.push(Check::at_most(format!("q{q}.stress_share_deficit"), 1.0 - share, 0.0, s.strict));
        }
        summary.push(Check::at_most(format!("q{q}.residual_relative"), worst.residual_rel, 1e-6, false));
        for e in inductive_ledger(st, &s.schedule, &cfg.iterate.ledger_times, s.strict)? {
            ledger.push(vec![q.to_string(), e.name.into(), num(e.ratio()), e.pass().to_string(), e.asserted.to_string()]);
            summary.push(Check::at_most(format!("q{q}.ledger.{}", e.name), e.ratio(), 1.0, e.asserted));
        }
        let rows = energy_report(st, times)?;
        for r in &rows {
            energy.push(vec![q.to_string(), num(r.t), num(0.5 * r.energy), num(r.dissipation)]);
        }
        summary.push(Check::at_most(format!("q{q}.energy_inequality_violation"), energy_inequality_margin(&rows), 0.0, false));
        if cfg.output.snapshots {
            for &t in &cfg.iterate.snapshot_times {
                let p = write_state(cfg, &s, st, t, "")?;
                push_files(&mut summary, &p);
            }
        }
    }
    let paths = [cfg.output_path(&cfg.output.diagnostics), cfg.output_path("ledger.csv"), cfg.output_path("energy.csv")];
    table.write_csv(&paths[0])?;
    ledger.write_csv(&paths[1])?;
    energy.write_csv(&paths[2])?;
    push_files(&mut summary, &paths);
    schedule_checks(&mut summary, &s);
    finish(cfg, summary)
}

fn galerkin_table(tr: &crate::galerkin::Trajectory) -> Table {
    let mut t = Table::new(&["t", "energy", "dissipated", "balance"]);
    for r in &tr.rows {
        t.push(vec![num(r.t), num(r.energy), num(r.dissipated), num(r.balance)]);
    }
    t
}

pub fn galerkin(cfg: &RunConfig) -> Result<Summary> {
    let g = cfg.galerkin.as_ref().ok_or_else(|| Error::Config { field: "galerkin".into(), msg: "missing".into() })?;
    ensure_dir(cfg)?;
    let grid = cfg.grid()?;
    let alpha = cfg.schedule.alpha;
    let mut summary = Summary::new(cfg.task.name(), if cfg.strict() { "strict" } else { "desk" }, cfg.seed);
    let data = match &g.data {
        GalerkinData::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            leray_project(&random_field(grid, Rank::Vector, [g.radius / 2; 3], 2.0, &mut rng))?
        }
        GalerkinData::Start => {
            let s = setup(cfg)?;
            start_state(&s, s.profile.clone())?.velocity(g.start_time)?
        }
        GalerkinData::Snapshot(p) => read_snapshot(p)?.0.field,
    };
    let pr = prolong(&data, g.start_time, g.horizon, g.radius, alpha, g.tol)?;
    if let Some(w) = &pr.warning {
        summary.notes.push(format!("warning: {w}"));
    }
    let tr = &pr.trajectory;
    let e0 = tr.rows[0].energy;
    summary.push(Check::at_most("galerkin.balance_relative", tr.balance_defect(), 1e-8, true));
    summary.push(Check::at_most("galerkin.energy_increase", tr.energy_increase(), 1e-14 * e0.max(f64::MIN_POSITIVE), true));
    let div = tr.states.iter().map(|s| s.divergence_defect()).fold(0.0, f64::max);
    summary.push(Check::at_most("galerkin.divergence_relative", div, 1e-12, true));
    summary.push(Check::at_most("galerkin.projection_loss", pr.projection_loss, crate::galerkin::PROJECTION_LOSS_WARNING, false));
    let path = cfg.output_path(&cfg.output.diagnostics);
    galerkin_table(tr).write_csv(&path)?;
    push_files(&mut summary, &[path]);
    finish(cfg, summary)
}

pub fn demo_nonuniqueness(cfg: &RunConfig) -> Result<Summary> {
    let fam = cfg.family.as_ref().ok_or_else(|| Error::Config { field: "family".into(), msg: "missing".into() })?;
    ensure_dir(cfg)?;
    let profiles = profile_family(fam.k, fam.count, cfg.seed)?;
    let (e1, e2) = family_bounds(&profiles);
    let families = Arc::new(build_families());
    let bounds = ProfileBounds { c1: e1, c2: e2, family: true };
    let schedule = ParameterSchedule::build(cfg.schedule.params(), cfg.schedule.q_max, bounds, cfg.strict(), &families)?;
    let lambda_bar = family_mode_lambda_bar(e1, e2, &schedule);
    let s = Setup { grid: cfg.grid()?, profile: profiles[0].clone(), families, schedule, strict: cfg.strict() };
    let mut summary = Summary::new(cfg.task.name(), if s.strict { "strict" } else { "desk" }, cfg.seed);
    summary.notes.push(format!("family E1 = {e1:e}, E2 = {e2:e}, shared start frequency = {lambda_bar}"));
    let t_star = 1.0 / (8.0 * fam.k);
    let opts = StageOptions { refine: cfg.iterate.refine, strict: s.strict, frequency: None };
    let mut digests = vec![];
    let mut v1 = vec![];
    let mut table = Table::new(&["member", "bump", "e_at_t", "v0_digest", "stress0_digest", "v1_l2"]);
    for (j, p) in profiles.iter().enumerate() {
        let state = start_state(&s, p.clone())?;
        let paths = write_state(cfg, &s, &state, 0.0, &format!("member{j}_"))?;
        let dv = file_digest(&paths[0])?;
        let dr = file_digest(&paths[2])?;
        push_files(&mut summary, &paths);
        let next = iterate_once(&state, &s.schedule, s.families.clone(), opts)?;
        let v = next.velocity(t_star)?;
        let bump = match p.kind() {
            crate::iteration::ProfileKind::Family { bump, .. } => *bump,
            _ => 0.0,
        };
        table.push(vec![j.to_string(), num(bump), num(p.value(t_star)), dv.clone(), dr.clone(), num(plancherel_l2(&v).sqrt())]);
        digests.push((dv, dr));
        v1.push(v);
    }
    let differing = digests.iter().filter(|d| **d != digests[0]).count();
    summary.push(Check::at_most("demo.t0_snapshot_mismatches", differing as f64, 0.0, true));
    let mut min_sep = f64::INFINITY;
    let mut max_norm = 0.0f64;
    for i in 0..v1.len() {
        max_norm = max_norm.max(plancherel_l2(&v1[i]).sqrt());
        for j in i + 1..v1.len() {
            min_sep = min_sep.min(plancherel_l2(&v1[i].sub(&v1[j])?).sqrt());
        }
    }
    summary.push(Check::above("demo.separation_l2", min_sep, 1e-3 * max_norm, true));

    // continue the first two solutions past t* with the Galerkin scheme
    match &cfg.galerkin {
        Some(g) => {
            let a = prolong(&v1[0], t_star, g.horizon, g.radius, cfg.schedule.alpha, g.tol)?;
            let b = prolong(&v1[1], t_star, g.horizon, g.radius, cfg.schedule.alpha, g.tol)?;
            for w in a.warning.iter().chain(b.warning.iter()) {
                summary.notes.push(format!("warning: {w}"));
            }
            let gap = plancherel_l2(&a.trajectory.last().w.sub(&b.trajectory.last().w)?).sqrt();
            summary.push(Check::above("demo.prolonged_separation_l2", gap, 1e-3 * max_norm, false));
        }
        None => summary.notes.push("no [galerkin] section: prolongation skipped".into()),
    }

    let path = cfg.output_path(&cfg.output.diagnostics);
    table.write_csv(&path)?;
    push_files(&mut summary, &[path]);
    finish(cfg, summary)
}

/// Spatial diagnostics of one snapshot.
pub struct SnapshotDiagnostics {
    pub path: PathBuf,
    pub rank: Rank,
    pub t: f64,
    pub q: Option<usize>,
    pub c0: f64,
    pub c1: f64,
    pub holder: Vec<(f64, f64)>,
    pub l2: f64,
    pub dissipation: f64,
    pub divergence: Option<f64>,
    pub trace: Option<f64>,
    /// Rayleigh quotient of curl and the relative defect of curl v = lambda v.
    pub curl_eigen: Option<(f64, f64)>,
}

pub fn diagnose_snapshot(path: &Path, orders: &[f64]) -> Result<SnapshotDiagnostics> {
    let (snap, meta) = read_snapshot(path)?;
    let f = &snap.field;
    let mut d = SnapshotDiagnostics {
        path: path.to_path_buf(),
        rank: f.rank(),
        t: snap.time,
        q: meta.map(|m| m.q),
        c0: sup_norm(f),
        c1: c_norm(f, 1),
        holder: orders.iter().map(|&o| (o, holder_seminorm(f, o))).collect(),
        l2: plancherel_l2(f),
        dissipation: dissipation(f, snap.alpha),
        divergence: None,
        trace: None,
        curl_eigen: None,
    };
    match f.rank() {
        Rank::Vector => {
            d.divergence = Some(div_sup(f)?);
            let curl = differentiate(f, DiffKind::Curl)?;
            if d.l2 > 0.0 {
                let mut inner = 0.0;
                f.for_each_mode(|k, idx| {
                    for c in 0..3 {
                        inner += (curl.coeff(k, c).conj() * f.comp(c)[idx]).re;
                    }
                });
                let lam = inner * FourierGrid::volume() / d.l2;
                let defect = (plancherel_l2(&curl.axpy(-lam, f)?) / d.l2).sqrt();
                d.curl_eigen = Some((lam, defect));
            }
        }
        Rank::SymTensor => d.trace = Some(sup_norm(&f.trace()?)),
        Rank::Scalar => {}
    }
    Ok(d)
}

pub fn diagnose(cfg: &RunConfig) -> Result<Summary> {
    let dg = cfg.diagnose.as_ref().ok_or_else(|| Error::Config { field: "diagnose".into(), msg: "missing".into() })?;
    ensure_dir(cfg)?;
    let s = setup(cfg)?;
    let mut summary = Summary::new(cfg.task.name(), if s.strict { "strict" } else { "desk" }, cfg.seed);
    let mut header: Vec<String> = ["path", "rank", "t", "q", "c0", "c1", "l2", "dissipation", "divergence", "trace", "curl_eigenvalue", "curl_defect"]
        .iter()
        .map(|x| x.to_string())
        .collect();
    header.extend(dg.holder_orders.iter().map(|o| format!("holder_{o}")));
    header.extend(["stress_c0_ratio", "energy_gap_ratio"].iter().map(|x| x.to_string()));
    let mut table = Table { header, rows: vec![] };
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    for p in &dg.snapshots {
        let d = diagnose_snapshot(p, &dg.holder_orders)?;
        // stress against eta delta_{q+1}; velocity energy against its window
        let stress_ratio = match (d.rank, d.q) {
            (Rank::SymTensor, Some(q)) if q + 1 < s.schedule.deltas.len() => Some(d.c0 / (s.schedule.eta * s.schedule.delta(q + 1))),
            _ => None,
        };
        let gap_ratio = match (d.rank, d.q) {
            (Rank::Vector, Some(q)) if q + 1 < s.schedule.deltas.len() => {
                let e = s.profile.value(d.t);
                let dq = s.schedule.delta(q + 1);
                Some((e * (1.0 - dq) - d.l2).abs() / (0.25 * dq * e))
            }
            _ => None,
        };
        let name = p.display().to_string();
        if let Some(r) = stress_ratio {
            summary.push(Check::at_most(format!("{name}.stress_c0_ratio"), r, 1.0, s.strict));
        }
        if let Some(r) = gap_ratio {
            summary.push(Check::at_most(format!("{name}.energy_gap_ratio"), r, 1.0, s.strict));
        }
        let mut row = vec![
            name,
            d.rank.name().into(),
            num(d.t),
            d.q.map(|q| q.to_string()).unwrap_or_default(),
            num(d.c0),
            num(d.c1),
            num(d.l2),
            num(d.dissipation),
            opt(d.divergence),
            opt(d.trace),
            opt(d.curl_eigen.map(|c| c.0)),
            opt(d.curl_eigen.map(|c| c.1)),
        ];
        row.extend(d.holder.iter().map(|h| num(h.1)));
        row.push(opt(stress_ratio));
        row.push(opt(gap_ratio));
        table.push(row);
    }
    let csv = cfg.output_path(&cfg.output.diagnostics);
    let dat = csv.with_extension("dat");
    table.write_csv(&csv)?;
    table.write_columns(&dat)?;
    push_files(&mut summary, &[csv, dat]);
    summary.notes.push("fracNSR residuals need time derivatives and are reported by the init and iterate tasks".into());
    finish(cfg, summary)
}

pub fn run(cfg: &RunConfig) -> Result<Summary> {
    cfg.validate()?;
    match cfg.task {
        Task::Init => init(cfg),
        Task::Iterate => iterate(cfg),
        Task::Galerkin => galerkin(cfg),
        Task::DemoNonuniqueness => demo_nonuniqueness(cfg),
        Task::Diagnose => diagnose(cfg),
        Task::ScheduleReport => schedule_report(cfg),
    }
}
