//! Experiment configuration and the assemble → solve → reconstruct → bound
//! pipeline over grids and Fourier modes.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use mhfe::bounds::{
    combined_norm_sq, efficiency_indices, mode_fluxes, residuals_mode, BoundsReport, IndexSet,
    ModeBounds, ModeReference, ModeTarget, ReferenceKind,
};
use mhfe::femcore::{assemble_gradient_load, assemble_load, FemMatrices, NodalField};
use mhfe::saddlesolve::{direct_solve, new_cache, solve_mode, FactorCache, StopCriterion};
use mhfe::systems::{build_mode_system_i, build_mode_system_ii, ModeSolution, Problem};
use mhfe::{Constants, Error, Mesh, ModeSystem, Result, Signal};
use serde::Deserialize;

use crate::data::{example, Example};
use crate::reference::{analytic_mode_reference, analytic_total_cost, FineGrid};
use crate::table::TableRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Minres,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceMode {
    /// Exact solution when the example has one, otherwise a grid twice as fine.
    Auto,
    Analytic,
    FineGrid(usize),
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub example: usize,
    pub problem: Problem,
    /// More than one grid gives a grid sweep with one row per grid.
    pub grids: Vec<usize>,
    /// Modes listed in the table.
    pub modes: Vec<usize>,
    /// Truncation indices `N` for overall rows; modes `0..=N` are computed.
    pub truncations: Vec<usize>,
    pub lambda: f64,
    pub omega: f64,
    pub sigma: f64,
    pub nu: f64,
    pub stop: StopCriterion,
    pub solver: SolverKind,
    /// Preconditioner family for problem II.
    pub family: u8,
    pub reference: ReferenceMode,
    pub threads: usize,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn for_example(id: usize) -> Result<Self> {
        let ex = example(id)?;
        Ok(Self {
            example: id,
            problem: ex.problem,
            grids: vec![64],
            modes: vec![0],
            truncations: Vec::new(),
            lambda: ex.lambda,
            omega: ex.omega,
            sigma: ex.sigma,
            nu: ex.nu,
            stop: StopCriterion::default(),
            solver: SolverKind::Minres,
            family: 0,
            reference: ReferenceMode::Auto,
            threads: 1,
            out: None,
        })
    }

    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.omega
    }

    /// Example data with the configured parameters.
    pub fn example_data(&self) -> Result<Example> {
        let mut ex = example(self.example)?;
        ex.lambda = self.lambda;
        ex.omega = self.omega;
        ex.sigma = self.sigma;
        ex.nu = self.nu;
        Ok(ex)
    }

    /// All validation failures at once.
    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        let mut errs = Vec::new();
        match example(self.example) {
            Ok(ex) if ex.problem != self.problem => errs.push(format!(
                "example {} belongs to problem {:?}",
                self.example, ex.problem
            )),
            Err(e) => errs.push(e.to_string()),
            _ => {}
        }
        if self.grids.is_empty() {
            errs.push("no grid given".into());
        }
        if self.grids.iter().any(|&n| n < 2) {
            errs.push("grids need at least 2 cells per side".into());
        }
        if self.modes.is_empty() && self.truncations.is_empty() {
            errs.push("no mode or truncation index given".into());
        }
        if self.grids.len() > 1 && !self.truncations.is_empty() {
            errs.push("overall rows need a single grid".into());
        }
        for (name, v) in [
            ("lambda", self.lambda),
            ("omega", self.omega),
            ("sigma", self.sigma),
            ("nu", self.nu),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                errs.push(format!("{name} must be positive"));
            }
        }
        if self.family > 1 {
            errs.push("preconditioner family is 0 or 1".into());
        }
        if self.threads == 0 {
            errs.push("threads must be at least 1".into());
        }
        match self.reference {
            ReferenceMode::FineGrid(r) => {
                for &n in &self.grids {
                    if r < n || r % n != 0 {
                        errs.push(format!("reference grid {r} must be a multiple of {n}"));
                    }
                }
            }
            ReferenceMode::Analytic => {
                if !self
                    .example_data()
                    .map(|e| e.exact_applies())
                    .unwrap_or(false)
                {
                    errs.push("no exact solution for this example and parameters".into());
                }
            }
            _ => {}
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    fn resolved_reference(&self, ex: &Example, n: usize) -> ReferenceMode {
        match self.reference {
            ReferenceMode::Auto if ex.exact_applies() => ReferenceMode::Analytic,
            ReferenceMode::Auto => ReferenceMode::FineGrid(2 * n),
            r => r,
        }
    }
}

/// `(∫ S φ_i)` for problem I or `(∫ S⃗·∇φ_i)` for problem II.
pub fn unit_load(ex: &Example, mesh: &Mesh) -> NodalField<f64> {
    let space = ex.space;
    match ex.problem {
        Problem::I => assemble_load(mesh, |x| space.value(x)),
        Problem::II => assemble_gradient_load(mesh, |_, x| space.vector(x)),
    }
}

fn scaled(f: &NodalField<f64>, a: f64) -> NodalField<f64> {
    let mut out = f.clone();
    out.scale(a);
    out
}

/// Mode system with data coefficients `(c_k, s_k)`.
pub fn build_system(
    ex: &Example,
    mats: Arc<FemMatrices<f64>>,
    unit: &NodalField<f64>,
    k: usize,
    coeff: (f64, f64),
) -> Result<ModeSystem> {
    let lc = scaled(unit, coeff.0);
    let ls = (k > 0).then(|| scaled(unit, coeff.1));
    match ex.problem {
        Problem::I => build_mode_system_i(mats, k, ex.lambda, ex.omega, &lc, ls.as_ref()),
        Problem::II => build_mode_system_ii(mats, k, ex.lambda, ex.omega, &lc, ls.as_ref()),
    }
}

/// Bounds of one mode on one grid, plus its reference.
#[derive(Debug, Clone)]
pub struct ModeResult {
    pub bounds: ModeBounds<f64>,
    pub reference: Option<ModeReference<f64>>,
}

struct GridContext<'a> {
    cfg: &'a ExperimentConfig,
    ex: Example,
    mesh: Mesh,
    mats: Arc<FemMatrices<f64>>,
    unit: NodalField<f64>,
    coeffs: Signal,
    consts: Constants,
    cache: Arc<FactorCache<f64>>,
    reference: ReferenceMode,
    fine: Option<FineGrid>,
    setup_sec: f64,
}

impl GridContext<'_> {
    fn solve(
        &self,
        k: usize,
    ) -> Result<(ModeSolution<f64>, Option<mhfe::saddlesolve::SolveStats>)> {
        let system = build_system(
            &self.ex,
            self.mats.clone(),
            &self.unit,
            k,
            self.coeffs.mode(k),
        )?;
        match self.cfg.solver {
            SolverKind::Minres => {
                let (sol, stats) = solve_mode(
                    &self.mesh,
                    &system,
                    self.cfg.stop,
                    self.cfg.family,
                    &self.cache,
                )?;
                Ok((sol, Some(stats)))
            }
            SolverKind::Direct => Ok((direct_solve(&self.mesh, &system)?, None)),
        }
    }

    fn mode(&self, k: usize) -> Result<ModeResult> {
        let start = Instant::now();
        let (sol, stats) = self.solve(k)?;
        let (c, s) = self.coeffs.mode(k);
        let coef = [c, s];
        let space = self.ex.space;
        let state = move |comp: usize, _t: usize, x: [f64; 2]| coef[comp] * space.value(x);
        let grad = move |comp: usize, _t: usize, x: [f64; 2]| {
            let v = space.vector(x);
            [coef[comp] * v[0], coef[comp] * v[1]]
        };
        let target = match self.ex.problem {
            Problem::I => ModeTarget::State(&state),
            Problem::II => ModeTarget::Gradient(&grad),
        };
        let fluxes = mode_fluxes(&self.mesh, &self.mats, &sol, &target);
        let terms = residuals_mode(&self.mesh, &self.mats, &self.consts, &sol, &fluxes, &target)?;
        let mut bounds = ModeBounds::evaluate(&self.consts, terms);
        bounds.stats = stats;
        bounds.t_sec = self.setup_sec + start.elapsed().as_secs_f64();

        let reference = match (self.reference, &self.fine) {
            (ReferenceMode::Analytic, _) => {
                let exact = self
                    .ex
                    .exact
                    .ok_or_else(|| Error::Invalid("no exact solution".into()))?;
                Some(analytic_mode_reference(&self.ex, &exact, &self.mesh, &sol)?)
            }
            (ReferenceMode::FineGrid(_), Some(fine)) => {
                Some(fine.mode_reference(&self.ex, &self.mesh, &sol, (c, s))?)
            }
            _ => None,
        };
        Ok(ModeResult { bounds, reference })
    }
}

/// Results of all modes on one grid.
#[derive(Debug, Clone)]
pub struct GridResult {
    pub n: usize,
    pub reference: Option<ReferenceKind>,
    pub modes: Vec<ModeResult>,
    /// One report per truncation index.
    pub reports: Vec<BoundsReport<f64>>,
}

impl GridResult {
    pub fn mode(&self, k: usize) -> Option<&ModeResult> {
        self.modes.iter().find(|m| m.bounds.k == k)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub grids: Vec<GridResult>,
    pub rows: Vec<TableRow>,
}

fn run_parallel<R: Send>(jobs: &[usize], threads: usize, f: impl Fn(usize) -> R + Sync) -> Vec<R> {
    if threads <= 1 || jobs.len() <= 1 {
        return jobs.iter().map(|&k| f(k)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = jobs.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..threads.min(jobs.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= jobs.len() {
                    break;
                }
                let r = f(jobs[i]);
                *slots[i].lock().unwrap_or_else(|e| e.into_inner()) = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| {
            m.into_inner()
                .unwrap_or_else(|e| e.into_inner())
                .expect("every job ran")
        })
        .collect()
}

/// Runs all modes needed on grid `n`.
pub fn run_grid(cfg: &ExperimentConfig, n: usize) -> Result<GridResult> {
    let start = Instant::now();
    let ex = cfg.example_data()?;
    let mesh = Mesh::build(n)?;
    let mats = Arc::new(FemMatrices::assemble(&mesh, ex.nu, ex.sigma));
    let unit = unit_load(&ex, &mesh);
    let mut needed: BTreeSet<usize> = cfg.modes.iter().copied().collect();
    for &nt in &cfg.truncations {
        needed.extend(0..=nt);
    }
    let jobs: Vec<usize> = needed.into_iter().collect();
    let coeffs = ex.time_coeffs(jobs.last().copied().unwrap_or(0))?;
    let consts = Constants::unit_square(ex.lambda, ex.omega, ex.sigma, ex.nu);
    let setup_sec = start.elapsed().as_secs_f64();

    let reference = cfg.resolved_reference(&ex, n);
    let fine = match reference {
        ReferenceMode::FineGrid(r) => Some(FineGrid::new(&ex, r, cfg.family)?),
        _ => None,
    };
    let ctx = GridContext {
        cfg,
        ex,
        mesh,
        mats,
        unit,
        coeffs,
        consts,
        cache: new_cache(),
        reference,
        fine,
        setup_sec,
    };
    let modes = run_parallel(&jobs, cfg.threads, |k| ctx.mode(k))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let kind = match reference {
        ReferenceMode::Analytic => Some(ReferenceKind::Analytic),
        ReferenceMode::FineGrid(n_ref) => Some(ReferenceKind::FineGrid { n_ref }),
        _ => None,
    };
    let mut reports = Vec::new();
    for &nt in &cfg.truncations {
        let remainder = ctx.ex.remainder(nt)?;
        let chosen: Vec<&ModeResult> = modes.iter().filter(|m| m.bounds.k <= nt).collect();
        let refs: Vec<ModeReference<f64>> = chosen.iter().filter_map(|m| m.reference).collect();
        let overall_ref = match reference {
            ReferenceMode::Analytic => ctx.ex.exact.map(|e| analytic_total_cost(&ctx.ex, &e)),
            ReferenceMode::FineGrid(_) if refs.len() == chosen.len() => {
                let p = ctx.ex.period();
                let sum: f64 = refs
                    .iter()
                    .map(|r| {
                        if r.k == 0 {
                            p * r.cost
                        } else {
                            0.5 * p * r.cost
                        }
                    })
                    .sum();
                Some(sum + 0.5 * remainder.value)
            }
            _ => None,
        };
        let reference = kind.zip(overall_ref).map(|(kd, o)| (kd, refs, o));
        reports.push(BoundsReport::assemble(
            ctx.ex.problem,
            ctx.consts,
            chosen.iter().map(|m| m.bounds.clone()).collect(),
            remainder,
            reference,
        ));
    }
    Ok(GridResult {
        n,
        reference: kind,
        modes,
        reports,
    })
}

/// Efficiency indices of a single mode.
pub fn mode_indices(problem: Problem, consts: &Constants, m: &ModeResult) -> IndexSet<f64> {
    let b = &m.bounds;
    let comb = m
        .reference
        .map(|r| combined_norm_sq(problem, consts, b.k, r.err_l2_sq, r.err_h1_sq));
    efficiency_indices(
        b.minorant,
        b.majorant,
        b.m1,
        m.reference.map(|r| r.cost),
        comb,
    )
}

/// Runs the configured sweep and builds the table rows.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate().map_err(|e| Error::Invalid(e.join("; ")))?;
    let ex = cfg.example_data()?;
    let consts = Constants::unit_square(ex.lambda, ex.omega, ex.sigma, ex.nu);
    let mut grids = Vec::new();
    let mut rows = Vec::new();
    let sweep = cfg.grids.len() > 1;
    for &n in &cfg.grids {
        let g = run_grid(cfg, n)?;
        for &k in &cfg.modes {
            let m = g
                .mode(k)
                .ok_or_else(|| Error::Invalid(format!("mode {k} missing")))?;
            let label = match (sweep, cfg.modes.len() > 1) {
                (true, false) => format!("{n}x{n}"),
                (true, true) => format!("{n}x{n} k={k}"),
                _ => format!("k={k}"),
            };
            rows.push(TableRow::new(
                label,
                m.bounds.t_sec,
                m.bounds.minorant,
                m.bounds.majorant,
                &mode_indices(ex.problem, &consts, m),
            ));
        }
        for (nt, rep) in cfg.truncations.iter().zip(&g.reports) {
            let t: f64 = rep.modes.iter().map(|m| m.t_sec).sum();
            rows.push(TableRow::new(
                format!("overall (N={nt})"),
                t,
                rep.overall_minorant,
                rep.overall_majorant,
                &rep.overall_indices,
            ));
        }
        grids.push(g);
    }
    if let Some(path) = &cfg.out {
        crate::table::write_outputs(path, &rows)
            .map_err(|e| Error::Invalid(format!("writing {}: {e}", path.display())))?;
    }
    Ok(RunOutput { grids, rows })
}
