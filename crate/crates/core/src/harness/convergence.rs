use rayon::prelude::*;

use super::export::short_decimal as short;
use super::ExperimentConfig;
use crate::control::l2_error;
use crate::error::{Error, Result};
use crate::objective::{ObjectivePair, Weights};
use crate::scalarize::{
    rpm_front, solve_scalarized, Method, ParetoFront, Scalarization, SolveReport,
};

/// How the reference points of a reference-point study are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum ZetaSelection {
    Explicit(Vec<[f64; 2]>),
    /// 1-based step indices `l` of `zeta^l` in the reference-level sweep;
    /// the same points are used on every study level.
    SweepIndices(Vec<usize>),
    /// 1-based step indices; every study level runs its own sweep and is
    /// compared at its own `zeta^l` against the reference-level sweep
    /// solution for the same `l`.
    PerLevelSweep(Vec<usize>),
}

/// Control errors against the reference level, one row per study level and
/// one column per parameter.
#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub method: Method,
    pub labels: Vec<String>,
    pub parameters: Vec<[f64; 2]>,
    pub levels: Vec<u32>,
    pub hs: Vec<f64>,
    pub errors: Vec<Vec<f64>>,
    pub converged: Vec<Vec<bool>>,
    /// Least-squares log-log slopes; `None` with fewer than two rows.
    pub rates: Vec<Option<f64>>,
    pub reference_objectives: Vec<ObjectivePair>,
}

impl ConvergenceTable {
    pub fn column(&self, p: usize) -> Vec<f64> {
        self.errors.iter().map(|row| row[p]).collect()
    }

    /// `log2(e_h / e_{h/2})` between consecutive rows of column `p`.
    pub fn ratios(&self, p: usize) -> Vec<Option<f64>> {
        successive_ratios(&self.column(p))
    }
}

/// Least-squares slope of `log(error)` against `log(h)`, ignoring
/// non-positive or non-finite entries.
pub fn estimate_rate(hs: &[f64], errors: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = hs
        .iter()
        .zip(errors)
        .filter(|(h, e)| h.is_finite() && e.is_finite() && **h > 0.0 && **e > 0.0)
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

pub fn successive_ratios(errors: &[f64]) -> Vec<Option<f64>> {
    errors
        .windows(2)
        .map(|w| {
            let r = (w[0] / w[1]).log2();
            r.is_finite().then_some(r)
        })
        .collect()
}

fn reference_solution(
    config: &ExperimentConfig,
    scalarization: Scalarization,
) -> Result<SolveReport> {
    let cache = config.cache();
    let system = config.system(config.reference_level)?;
    let start = cache
        .as_ref()
        .and_then(|c| c.load(&scalarization, config.reference_level));
    // A cached control is re-verified by a (near-immediate) solve from it.
    let report = solve_scalarized(
        &config.problem,
        &system,
        scalarization,
        start.as_ref(),
        &config.bb,
    )?;
    if let Some(c) = &cache {
        if start.as_ref() != Some(&report.control) {
            c.store(&scalarization, &report.control)?;
        }
    }
    Ok(report)
}

/// Solution of one table cell, or `None` when the cell has no parameter.
type Cell = Option<SolveReport>;

fn assemble_table(
    config: &ExperimentConfig,
    method: Method,
    labels: Vec<String>,
    references: &[SolveReport],
    parameters: Vec<[f64; 2]>,
    cells: Vec<Vec<Cell>>,
) -> Result<ConvergenceTable> {
    let mut errors = Vec::with_capacity(cells.len());
    let mut converged = Vec::with_capacity(cells.len());
    for row in &cells {
        let mut e = Vec::with_capacity(row.len());
        let mut c = Vec::with_capacity(row.len());
        for (cell, reference) in row.iter().zip(references) {
            match cell {
                Some(r) => {
                    e.push(l2_error(&r.control, &reference.control)?);
                    c.push(r.converged);
                }
                None => {
                    e.push(f64::NAN);
                    c.push(false);
                }
            }
        }
        errors.push(e);
        converged.push(c);
    }
    let hs: Vec<f64> = config
        .levels
        .iter()
        .map(|l| 0.5f64.powi(*l as i32))
        .collect();
    let rates = (0..references.len())
        .map(|c| estimate_rate(&hs, &errors.iter().map(|row| row[c]).collect::<Vec<_>>()))
        .collect();
    Ok(ConvergenceTable {
        method,
        labels,
        parameters,
        levels: config.levels.clone(),
        hs,
        errors,
        converged,
        rates,
        reference_objectives: references.iter().map(|r| r.objectives).collect(),
    })
}

/// Solves every scalarization on every study level.
fn solve_cells(
    config: &ExperimentConfig,
    scalarizations: &[Scalarization],
) -> Result<Vec<Vec<Cell>>> {
    let systems = config
        .levels
        .iter()
        .map(|l| config.system(*l))
        .collect::<Result<Vec<_>>>()?;
    let n = scalarizations.len();
    let jobs: Vec<(usize, usize)> = (0..systems.len())
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .collect();
    let solved = config.in_pool(|| {
        jobs.par_iter()
            .map(|&(r, c)| {
                solve_scalarized(
                    &config.problem,
                    &systems[r],
                    scalarizations[c],
                    None,
                    &config.bb,
                )
                .map(Some)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(solved.chunks(n.max(1)).map(<[Cell]>::to_vec).collect())
}

/// Weighted-sum study: `||u_ref - u_h||_U` for every weight and level.
pub fn run_convergence_wsm(
    config: &ExperimentConfig,
    alphas: &[Weights],
) -> Result<ConvergenceTable> {
    config.validate()?;
    if alphas.is_empty() {
        return Err(Error::invalid("no weights given"));
    }
    let scalarizations: Vec<Scalarization> = alphas
        .iter()
        .map(|a| Scalarization::WeightedSum(*a))
        .collect();
    let references = config.in_pool(|| {
        scalarizations
            .par_iter()
            .map(|s| reference_solution(config, *s))
            .collect::<Result<Vec<_>>>()
    })??;
    let labels = alphas
        .iter()
        .map(|a| {
            let [a1, a2] = a.get();
            format!("alpha_{}_{}", short(a1), short(a2))
        })
        .collect();
    let cells = solve_cells(config, &scalarizations)?;
    let parameters = scalarizations.iter().map(|s| s.parameter()).collect();
    assemble_table(config, Method::Wsm, labels, &references, parameters, cells)
}

fn check_indices(indices: &[usize]) -> Result<usize> {
    if indices.contains(&0) {
        return Err(Error::invalid("sweep indices are 1-based"));
    }
    indices
        .iter()
        .max()
        .copied()
        .ok_or_else(|| Error::invalid("no sweep indices given"))
}

/// Reference points and solutions of the sweep on `level`, at least
/// `max_idx + 1` entries long unless the sweep stops earlier.
fn sweep(config: &ExperimentConfig, level: u32, max_idx: usize) -> Result<ParetoFront> {
    let l_max = config.rpm_front_size.max(max_idx + 1);
    let system = config.system(level)?;
    rpm_front(
        &config.problem,
        &system,
        l_max,
        config.h_perp,
        config.h_par,
        config.eps,
        &config.bb,
    )
}

/// `zeta^l` for each index together with the reference-level solution.
fn sweep_references(
    config: &ExperimentConfig,
    indices: &[usize],
) -> Result<Vec<([f64; 2], SolveReport)>> {
    let max_idx = check_indices(indices)?;
    let l_max = config.rpm_front_size.max(max_idx + 1);
    let level = config.reference_level;
    let cache = config.cache();
    let cached = cache
        .as_ref()
        .and_then(|c| c.load_sweep(level, l_max, config.h_perp, config.h_par))
        .filter(|z| z.len() >= max_idx);
    let zetas = match cached {
        Some(z) => z,
        None => {
            let front = sweep(config, level, max_idx)?;
            let zetas = front.reference_points();
            if let Some(c) = &cache {
                c.store_sweep(level, l_max, config.h_perp, config.h_par, &zetas)?;
                for e in &front.entries {
                    c.store(&e.scalarization, &e.report.control)?;
                }
            }
            zetas
        }
    };
    indices
        .iter()
        .map(|&i| {
            let z = *zetas.get(i - 1).ok_or_else(|| {
                Error::invalid(format!(
                    "reference sweep produced only {} reference points, zeta^{i} requested",
                    zetas.len()
                ))
            })?;
            Ok((
                z,
                reference_solution(config, Scalarization::ReferencePoint(z))?,
            ))
        })
        .collect()
}

/// Reference-point study; see [`ZetaSelection`] for how the points are
/// chosen on each level.
pub fn run_convergence_rpm(
    config: &ExperimentConfig,
    zetas: &ZetaSelection,
) -> Result<ConvergenceTable> {
    config.validate()?;
    let (pairs, labels): (Vec<([f64; 2], SolveReport)>, Vec<String>) = match zetas {
        ZetaSelection::SweepIndices(idx) | ZetaSelection::PerLevelSweep(idx) => {
            let refs = sweep_references(config, idx)?;
            (refs, idx.iter().map(|i| format!("zeta_{i}")).collect())
        }
        ZetaSelection::Explicit(list) => {
            if list.is_empty() {
                return Err(Error::invalid("no reference points given"));
            }
            let refs = list
                .iter()
                .map(|z| {
                    Ok((
                        *z,
                        reference_solution(config, Scalarization::ReferencePoint(*z))?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let labels = list
                .iter()
                .map(|z| format!("zeta_{}_{}", z[0], z[1]))
                .collect();
            (refs, labels)
        }
    };
    let parameters: Vec<[f64; 2]> = pairs.iter().map(|(z, _)| *z).collect();
    let references: Vec<SolveReport> = pairs.into_iter().map(|(_, r)| r).collect();
    let cells = match zetas {
        ZetaSelection::PerLevelSweep(idx) => {
            let max_idx = check_indices(idx)?;
            let fronts = config.in_pool(|| {
                config
                    .levels
                    .par_iter()
                    .map(|l| sweep(config, *l, max_idx))
                    .collect::<Result<Vec<_>>>()
            })??;
            // Entry 0 is the initial endpoint, so zeta^l is entry l.
            fronts
                .iter()
                .map(|f| {
                    idx.iter()
                        .map(|&i| {
                            let e = f.entries.get(i)?;
                            matches!(e.scalarization, Scalarization::ReferencePoint(_))
                                .then(|| e.report.clone())
                        })
                        .collect()
                })
                .collect()
        }
        _ => {
            let scalarizations: Vec<Scalarization> = parameters
                .iter()
                .map(|z| Scalarization::ReferencePoint(*z))
                .collect();
            solve_cells(config, &scalarizations)?
        }
    };
    assemble_table(config, Method::Rpm, labels, &references, parameters, cells)
}
