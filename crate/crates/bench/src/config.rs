//! Command-line flags and TOML config files.
//!
//! Example defaults are overridden by the config file, which in turn is
//! overridden by explicit flags.

use std::path::PathBuf;

use clap::Parser;
use mhfe::saddlesolve::StopCriterion;
use mhfe::systems::Problem;
use serde::Deserialize;

use crate::run::{ExperimentConfig, ReferenceMode, SolverKind};

/// Guaranteed bounds for multiharmonic optimal control examples.
#[derive(Debug, Clone, Default, Parser)]
#[command(name = "mhfe-bench", version)]
pub struct Cli {
    /// Example 1-6.
    #[arg(long)]
    pub example: Option<usize>,
    /// Grid sizes; several give a grid sweep.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<usize>>,
    /// Fourier modes listed in the table.
    #[arg(long, value_delimiter = ',')]
    pub modes: Option<Vec<usize>>,
    /// Truncation indices for overall rows.
    #[arg(long, value_delimiter = ',')]
    pub truncation: Option<Vec<usize>>,
    /// Problem I or II (must match the example).
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    /// Run exactly 8 MinRes iterations per mode.
    #[arg(long)]
    pub paper_mode: bool,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// minres or direct.
    #[arg(long)]
    pub solver: Option<String>,
    /// Preconditioner family for problem II (0 or 1).
    #[arg(long)]
    pub family: Option<u8>,
    /// Fine reference grid; 0 uses the exact solution.
    #[arg(long)]
    pub nref: Option<usize>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// CSV output path; a markdown table is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML file with any of the settings above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Settings accepted in a config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub example: Option<usize>,
    pub grid: Option<Vec<usize>>,
    pub modes: Option<Vec<usize>>,
    pub truncation: Option<Vec<usize>>,
    pub problem: Option<String>,
    pub lambda: Option<f64>,
    pub omega: Option<f64>,
    pub sigma: Option<f64>,
    pub nu: Option<f64>,
    pub paper_mode: Option<bool>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub solver: Option<SolverKind>,
    pub family: Option<u8>,
    pub nref: Option<usize>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

fn parse_problem(s: &str) -> Result<Problem, String> {
    match s.trim().to_ascii_uppercase().as_str() {
        "I" | "1" => Ok(Problem::I),
        "II" | "2" => Ok(Problem::II),
        _ => Err(format!("unknown problem '{s}'")),
    }
}

fn parse_solver(s: &str) -> Result<SolverKind, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "minres" => Ok(SolverKind::Minres),
        "direct" => Ok(SolverKind::Direct),
        _ => Err(format!("unknown solver '{s}'")),
    }
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// The file's settings as if given on the command line.
    fn into_cli(self) -> Cli {
        Cli {
            example: self.example,
            grid: self.grid,
            modes: self.modes,
            truncation: self.truncation,
            problem: self.problem,
            lambda: self.lambda,
            omega: self.omega,
            sigma: self.sigma,
            nu: self.nu,
            paper_mode: self.paper_mode.unwrap_or(false),
            tol: self.tol,
            max_iters: self.max_iters,
            solver: self.solver.map(|s| match s {
                SolverKind::Minres => "minres".into(),
                SolverKind::Direct => "direct".into(),
            }),
            family: self.family,
            nref: self.nref,
            threads: self.threads,
            out: self.out,
            config: None,
        }
    }
}

impl Cli {
    /// `self` with unset fields taken from `base`.
    fn over(self, base: Cli) -> Cli {
        Cli {
            example: self.example.or(base.example),
            grid: self.grid.or(base.grid),
            modes: self.modes.or(base.modes),
            truncation: self.truncation.or(base.truncation),
            problem: self.problem.or(base.problem),
            lambda: self.lambda.or(base.lambda),
            omega: self.omega.or(base.omega),
            sigma: self.sigma.or(base.sigma),
            nu: self.nu.or(base.nu),
            paper_mode: self.paper_mode || base.paper_mode,
            tol: self.tol.or(base.tol),
            max_iters: self.max_iters.or(base.max_iters),
            solver: self.solver.or(base.solver),
            family: self.family.or(base.family),
            nref: self.nref.or(base.nref),
            threads: self.threads.or(base.threads),
            out: self.out.or(base.out),
            config: self.config,
        }
    }

    /// Resolves flags, config file and example defaults.
    pub fn resolve(self) -> Result<ExperimentConfig, Vec<String>> {
        let merged = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| vec![format!("{}: {e}", path.display())])?;
                let file = FileConfig::parse(&text)
                    .map_err(|e| vec![format!("{}: {e}", path.display())])?;
                self.over(file.into_cli())
            }
            None => self,
        };
        merged.into_config()
    }

    fn into_config(self) -> Result<ExperimentConfig, Vec<String>> {
        let mut errs = Vec::new();
        let id = self.example.unwrap_or(1);
        let mut cfg = ExperimentConfig::for_example(id).map_err(|e| vec![e.to_string()])?;
        if let Some(g) = self.grid {
            cfg.grids = g;
        }
        let modes_given = self.modes.is_some();
        if let Some(m) = self.modes {
            cfg.modes = m;
        }
        if let Some(t) = self.truncation {
            if !modes_given {
                cfg.modes = (0..=t.iter().copied().max().unwrap_or(0)).collect();
            }
            cfg.truncations = t;
        }
        if let Some(p) = self.problem.as_deref() {
            match parse_problem(p) {
                Ok(p) => cfg.problem = p,
                Err(e) => errs.push(e),
            }
        }
        cfg.lambda = self.lambda.unwrap_or(cfg.lambda);
        cfg.omega = self.omega.unwrap_or(cfg.omega);
        cfg.sigma = self.sigma.unwrap_or(cfg.sigma);
        cfg.nu = self.nu.unwrap_or(cfg.nu);
        cfg.stop = if self.paper_mode {
            StopCriterion::fixed(8)
        } else {
            let d = StopCriterion::default();
            StopCriterion {
                tol: self.tol.unwrap_or(d.tol),
                max_iters: self.max_iters.unwrap_or(d.max_iters),
            }
        };
        if let Some(s) = self.solver.as_deref() {
            match parse_solver(s) {
                Ok(s) => cfg.solver = s,
                Err(e) => errs.push(e),
            }
        }
        cfg.family = self.family.unwrap_or(cfg.family);
        cfg.reference = match self.nref {
            Some(0) => ReferenceMode::Analytic,
            Some(r) => ReferenceMode::FineGrid(r),
            None => ReferenceMode::Auto,
        };
        cfg.threads = self.threads.unwrap_or(1);
        cfg.out = self.out;
        if let Err(e) = cfg.validate() {
            errs.extend(e);
        }
        if errs.is_empty() {
            Ok(cfg)
        } else {
            Err(errs)
        }
    }
}
