//! Experiment orchestration: convergence studies against a fine reference,
//! front sweeps under mesh refinement, reference-solution caching and CSV
//! export.

mod cache;
mod convergence;
mod export;
mod front;
mod settings;

use std::path::PathBuf;
use std::sync::Arc;

pub use cache::{problem_key, ControlCache};
pub use convergence::{
    estimate_rate, run_convergence_rpm, run_convergence_wsm, successive_ratios, ConvergenceTable,
    ZetaSelection,
};
pub use export::{
    format_float, parse_csv, short_decimal, write_convergence_csv, write_front_csv,
    write_front_error_csv, CsvData,
};
pub use front::{run_front, FrontStudy};
pub use settings::{
    parse_key_values, parse_list, parse_observations, parse_pair, parse_pair_list, RunSettings,
    SETTING_KEYS,
};

use crate::error::{Error, Result};
use crate::fem::{assemble_stiffness, StiffnessSystem};
use crate::mesh::{build_uniform_mesh_with, Diagonal};
use crate::objective::{ProblemData, Weights};
use crate::scalarize::BBConfig;

/// Finest level at which the stiffness system is factorized directly; finer
/// levels use CG alone.
pub const DIRECT_SOLVER_MAX_LEVEL: u32 = 8;

/// Sweep indices of the reference points used in the default
/// reference-point convergence study.
pub const DEFAULT_ZETA_INDICES: [usize; 4] = [2, 4, 7, 9];

/// Default weights of the weighted-sum convergence study.
pub fn default_alphas() -> Vec<Weights> {
    [0.2, 0.4, 0.6, 0.8]
        .iter()
        .map(|a1| Weights::new(*a1, 1.0 - a1).expect("valid weights"))
        .collect()
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: ProblemData,
    /// Study levels, coarse to fine.
    pub levels: Vec<u32>,
    pub reference_level: u32,
    /// Cell diagonal of every mesh in the study.
    pub diagonal: Diagonal,
    /// Entries of a weighted-sum sweep.
    pub front_size: usize,
    /// Loop cap of a reference-point sweep.
    pub rpm_front_size: usize,
    pub eps: f64,
    pub h_perp: f64,
    pub h_par: f64,
    pub bb: BBConfig,
    pub output_dir: PathBuf,
    /// Where reference controls are cached; `None` disables caching.
    pub cache_dir: Option<PathBuf>,
    /// Worker threads for independent cells.
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: ProblemData::two_point_example(0.1, 0.1).expect("valid example data"),
            levels: vec![2, 3, 4, 5],
            reference_level: 8,
            diagonal: Diagonal::Falling,
            front_size: 50,
            rpm_front_size: 15,
            eps: 1e-3,
            h_perp: 0.2,
            h_par: 0.2,
            bb: BBConfig::default(),
            output_dir: PathBuf::from("out"),
            cache_dir: Some(PathBuf::from("out/cache")),
            jobs: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.bb.validate()?;
        let Some(max) = self.levels.iter().max() else {
            return Err(Error::invalid("at least one study level is required"));
        };
        if self.reference_level <= *max {
            return Err(Error::invalid(format!(
                "reference level {} must exceed every study level (max {max})",
                self.reference_level
            )));
        }
        if self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("study levels must be strictly increasing"));
        }
        if self.front_size < 2 || self.rpm_front_size < 2 {
            return Err(Error::invalid("front sizes must be at least 2"));
        }
        if self.jobs == 0 {
            return Err(Error::invalid("jobs must be positive"));
        }
        Ok(())
    }

    pub(crate) fn cache(&self) -> Option<ControlCache> {
        self.cache_dir.as_ref().map(|d| {
            ControlCache::new(
                d.clone(),
                problem_key(&self.problem, &self.bb, self.eps, self.diagonal),
            )
        })
    }

    /// Runs `f` on a thread pool limited to `jobs` workers.
    pub(crate) fn in_pool<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }

    /// Mesh and stiffness system for `level` in this study's mesh family.
    pub fn system(&self, level: u32) -> Result<StiffnessSystem> {
        system_for_level(level, self.diagonal)
    }
}

/// Mesh and stiffness system for `level`, factorized up to
/// [`DIRECT_SOLVER_MAX_LEVEL`].
pub fn system_for_level(level: u32, diagonal: Diagonal) -> Result<StiffnessSystem> {
    let system = assemble_stiffness(Arc::new(build_uniform_mesh_with(level, diagonal)?));
    if level <= DIRECT_SOLVER_MAX_LEVEL {
        system.factorize()
    } else {
        Ok(system)
    }
}
