use rayon::prelude::*;

use super::ExperimentConfig;
use crate::error::Result;
use crate::scalarize::{rpm_front, wsm_front, Method, ParetoFront};

/// Fronts of one method on every study level plus the reference level.
#[derive(Debug, Clone)]
pub struct FrontStudy {
    pub method: Method,
    pub lambda: [f64; 2],
    pub levels: Vec<u32>,
    pub hs: Vec<f64>,
    pub fronts: Vec<ParetoFront>,
    pub reference: ParetoFront,
    /// `errors[r][i]`: distance between entry `i` on study level `r` and
    /// entry `i` of the reference front; `None` where either is missing.
    pub errors: Vec<Vec<Option<f64>>>,
}

impl FrontStudy {
    pub fn num_parameters(&self) -> usize {
        self.errors.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn error_series(&self, i: usize) -> Vec<Option<f64>> {
        self.errors
            .iter()
            .map(|row| row.get(i).copied().flatten())
            .collect()
    }

    /// Fraction of parameters whose front error decreases strictly from each
    /// level to the next.
    pub fn monotone_fraction(&self) -> f64 {
        let n = self.num_parameters();
        if n == 0 {
            return 1.0;
        }
        let good = (0..n)
            .filter(|&i| {
                let s = self.error_series(i);
                s.windows(2)
                    .all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if b < a))
            })
            .count();
        good as f64 / n as f64
    }
}

fn front_at(
    config: &ExperimentConfig,
    method: Method,
    level: u32,
    problem: &crate::objective::ProblemData,
) -> Result<ParetoFront> {
    let system = config.system(level)?;
    match method {
        Method::Wsm => wsm_front(problem, &system, config.front_size, config.eps, &config.bb),
        Method::Rpm => rpm_front(
            problem,
            &system,
            config.rpm_front_size,
            config.h_perp,
            config.h_par,
            config.eps,
            &config.bb,
        ),
    }
}

/// Sweeps `method` for the problem with weights `lambda` on every level and
/// measures the front error against the reference level by entry index.
pub fn run_front(
    config: &ExperimentConfig,
    method: Method,
    lambda: [f64; 2],
) -> Result<FrontStudy> {
    config.validate()?;
    let problem = config.problem.with_lambda(lambda)?;
    let mut all_levels = config.levels.clone();
    all_levels.push(config.reference_level);
    let mut fronts = config.in_pool(|| {
        all_levels
            .par_iter()
            .map(|l| front_at(config, method, *l, &problem))
            .collect::<Result<Vec<_>>>()
    })??;
    let reference = fronts.pop().expect("reference front present");
    let reference_j = reference.objectives();
    let errors = fronts
        .iter()
        .map(|f| {
            let j = f.objectives();
            (0..j.len().max(reference_j.len()))
                .map(|i| Some(j.get(i)?.distance(reference_j.get(i)?)))
                .collect()
        })
        .collect();
    Ok(FrontStudy {
        method,
        lambda,
        levels: config.levels.clone(),
        hs: config
            .levels
            .iter()
            .map(|l| 0.5f64.powi(*l as i32))
            .collect(),
        fronts,
        reference,
        errors,
    })
}
