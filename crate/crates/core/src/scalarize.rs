//! Projected Barzilai-Borwein solver for the weighted-sum and
//! reference-point subproblems, and the sweeps that trace Pareto fronts.

use crate::control::{clip_to_box, l2_inner, l2_norm, BoxBounds, PwcControl};
use crate::error::{Error, Result};
use crate::fem::StiffnessSystem;
use crate::objective::{
    evaluate_control, grad_rpm, grad_wsm, objectives_from_residuals, ObjectivePair, ProblemData,
    Weights, SOLVES_PER_EVALUATION,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBConfig {
    /// Stopping threshold on the projected-gradient fixed-point residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Step length used when the BB quotient is unusable.
    pub fallback_step: f64,
    /// Relative tolerance of every state/adjoint solve.
    pub linear_tol: f64,
    /// Start each sweep entry from the previous entry's solution.
    pub warm_start: bool,
}

impl Default for BBConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 5000,
            fallback_step: 1.0,
            linear_tol: 1e-12,
            warm_start: true,
        }
    }
}

impl BBConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.tol, self.fallback_step, self.linear_tol]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if !positive || self.max_iter == 0 {
            return Err(Error::invalid("solver settings must be positive"));
        }
        if self.tol <= self.linear_tol {
            return Err(Error::invalid(format!(
                "optimization tolerance {} must exceed linear tolerance {}",
                self.tol, self.linear_tol
            )));
        }
        Ok(())
    }
}

/// Gradient and objective values at one iterate.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub gradient: PwcControl,
    pub objectives: ObjectivePair,
    /// Value of the scalarized functional.
    pub value: f64,
    pub solves: usize,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub control: PwcControl,
    /// Gradient representer at `control`.
    pub gradient: PwcControl,
    pub objectives: ObjectivePair,
    pub value: f64,
    pub iterations: usize,
    /// `||u - clip(u - g(u))||_U` at the returned control.
    pub final_residual: f64,
    /// `||clip(u - g/t) - clip(u - g)||_U` of the last step taken.
    pub step_residual: f64,
    pub converged: bool,
    pub solve_count: usize,
    pub fallback_steps: usize,
    /// For reference-point solves: whether `zeta <= j` holds at the solution.
    pub reference_valid: Option<bool>,
}

/// Projected Barzilai-Borwein iteration
/// `u+ = clip(u - g / t)`, `t = |dg|^2 / (dg, du)`, started from the pair
/// `(u_minus1, u0)`. Stops once the fixed-point residual
/// `||u - clip(u - g)||_U` drops to `config.tol`.
pub fn bb_projected_gradient<F>(
    bounds: &BoxBounds,
    u0: PwcControl,
    u_minus1: PwcControl,
    config: &BBConfig,
    mut eval: F,
) -> Result<SolveReport>
where
    F: FnMut(&PwcControl) -> Result<Evaluation>,
{
    config.validate()?;
    if u0 == u_minus1 {
        return Err(Error::invalid("starting iterates must differ"));
    }
    if !u0.is_within(bounds) || !u_minus1.is_within(bounds) {
        return Err(Error::invalid("starting iterates must be feasible"));
    }
    let mut prev = eval(&u_minus1)?;
    let mut u_prev = u_minus1;
    let mut u = u0;
    let mut cur = eval(&u)?;
    let mut solves = prev.solves + cur.solves;
    let mut iterations = 0;
    let mut fallback_steps = 0;
    let mut step_residual = f64::INFINITY;
    loop {
        let u_ref = clip_to_box(&u.add_scaled(-1.0, &cur.gradient)?, bounds);
        let final_residual = l2_norm(&u.sub(&u_ref)?);
        let converged = final_residual <= config.tol;
        if converged || iterations >= config.max_iter {
            return Ok(SolveReport {
                control: u,
                gradient: cur.gradient,
                objectives: cur.objectives,
                value: cur.value,
                iterations,
                final_residual,
                step_residual,
                converged,
                solve_count: solves,
                fallback_steps,
                reference_valid: None,
            });
        }
        let dg = cur.gradient.sub(&prev.gradient)?;
        let du = u.sub(&u_prev)?;
        let num = l2_inner(&dg, &dg)?;
        let den = l2_inner(&dg, &du)?;
        let degenerate =
            num == 0.0 || den.abs() <= 1e-14 * num.sqrt() * l2_norm(&du) || !(den > 0.0);
        let step = if degenerate {
            fallback_steps += 1;
            config.fallback_step
        } else {
            den / num
        };
        let u_next = clip_to_box(&u.add_scaled(-step, &cur.gradient)?, bounds);
        step_residual = l2_norm(&u_next.sub(&u_ref)?);
        let next = eval(&u_next)?;
        solves += next.solves;
        u_prev = std::mem::replace(&mut u, u_next);
        prev = std::mem::replace(&mut cur, next);
        iterations += 1;
    }
}

/// A scalarization of the bicriterial objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalarization {
    WeightedSum(Weights),
    ReferencePoint([f64; 2]),
}

impl Scalarization {
    pub fn value(&self, j: ObjectivePair) -> f64 {
        match self {
            Scalarization::WeightedSum(w) => {
                let [a1, a2] = w.get();
                a1 * j.j1 + a2 * j.j2
            }
            Scalarization::ReferencePoint(z) => {
                0.5 * ((j.j1 - z[0]).powi(2) + (j.j2 - z[1]).powi(2))
            }
        }
    }

    pub fn parameter(&self) -> [f64; 2] {
        match self {
            Scalarization::WeightedSum(w) => w.get(),
            Scalarization::ReferencePoint(z) => *z,
        }
    }

    /// State/adjoint solves plus gradient at `u`.
    pub fn evaluate(
        &self,
        problem: &ProblemData,
        system: &StiffnessSystem,
        u: &PwcControl,
        linear_tol: f64,
    ) -> Result<Evaluation> {
        let bundle = evaluate_control(problem, system, u, linear_tol)?;
        let objectives = objectives_from_residuals(problem, u, &bundle.residuals);
        let gradient = match self {
            Scalarization::WeightedSum(w) => grad_wsm(problem, &bundle, u, *w)?,
            Scalarization::ReferencePoint(z) => grad_rpm(problem, &bundle, u, *z, objectives)?,
        };
        Ok(Evaluation {
            gradient,
            objectives,
            value: self.value(objectives),
            solves: SOLVES_PER_EVALUATION,
        })
    }
}

/// Second starting iterate: `u` shifted by `delta = 1e-2 min(1, ub - ua)` on
/// every element, downwards where an upward shift would leave the box.
pub fn perturbed_start(u: &PwcControl, bounds: &BoxBounds) -> PwcControl {
    let delta = 1e-2 * (bounds.upper() - bounds.lower()).min(1.0);
    u.map(|v| {
        if v + delta <= bounds.upper() {
            v + delta
        } else {
            v - delta
        }
    })
}

/// Solves one scalarized subproblem, from `start` if given and from
/// `clip(0)` otherwise.
pub fn solve_scalarized(
    problem: &ProblemData,
    system: &StiffnessSystem,
    scalarization: Scalarization,
    start: Option<&PwcControl>,
    config: &BBConfig,
) -> Result<SolveReport> {
    config.validate()?;
    let bounds = problem.bounds();
    let u0 = match start {
        Some(s) => clip_to_box(s, &bounds),
        None => PwcControl::constant(system.mesh().clone(), bounds.clamp(0.0)),
    };
    let mut report = if bounds.lower() == bounds.upper() {
        // The admissible set is a single point.
        let e = scalarization.evaluate(problem, system, &u0, config.linear_tol)?;
        SolveReport {
            control: u0,
            gradient: e.gradient,
            objectives: e.objectives,
            value: e.value,
            iterations: 0,
            final_residual: 0.0,
            step_residual: 0.0,
            converged: true,
            solve_count: e.solves,
            fallback_steps: 0,
            reference_valid: None,
        }
    } else {
        let u_minus1 = perturbed_start(&u0, &bounds);
        bb_projected_gradient(&bounds, u0, u_minus1, config, |u| {
            scalarization.evaluate(problem, system, u, config.linear_tol)
        })?
    };
    if let Scalarization::ReferencePoint(z) = scalarization {
        report.reference_valid = Some(report.objectives.j1 > z[0] && report.objectives.j2 > z[1]);
    }
    Ok(report)
}

pub fn solve_wsm(
    problem: &ProblemData,
    system: &StiffnessSystem,
    weights: Weights,
    config: &BBConfig,
) -> Result<SolveReport> {
    solve_scalarized(
        problem,
        system,
        Scalarization::WeightedSum(weights),
        None,
        config,
    )
}

pub fn solve_rpm(
    problem: &ProblemData,
    system: &StiffnessSystem,
    zeta: [f64; 2],
    config: &BBConfig,
) -> Result<SolveReport> {
    solve_scalarized(
        problem,
        system,
        Scalarization::ReferencePoint(zeta),
        None,
        config,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Wsm,
    Rpm,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Wsm => "wsm",
            Method::Rpm => "rpm",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wsm" => Ok(Method::Wsm),
            "rpm" => Ok(Method::Rpm),
            other => Err(Error::invalid(format!(
                "unknown method {other:?} (expected wsm or rpm)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FrontEntry {
    pub scalarization: Scalarization,
    pub report: SolveReport,
}

impl FrontEntry {
    pub fn parameter(&self) -> [f64; 2] {
        self.scalarization.parameter()
    }
}

#[derive(Debug, Clone)]
pub struct ParetoFront {
    pub method: Method,
    pub entries: Vec<FrontEntry>,
    /// Why the sweep stopped early, if it did.
    pub aborted: Option<String>,
}

impl ParetoFront {
    pub fn objectives(&self) -> Vec<ObjectivePair> {
        self.entries.iter().map(|e| e.report.objectives).collect()
    }

    /// Reference points used by the sweep, in order (`zeta^1, zeta^2, ...`).
    pub fn reference_points(&self) -> Vec<[f64; 2]> {
        self.entries
            .iter()
            .filter_map(|e| match e.scalarization {
                Scalarization::ReferencePoint(z) => Some(z),
                Scalarization::WeightedSum(_) => None,
            })
            .collect()
    }
}

/// Second weight of sweep entry `l` (1-based): `eps + (1 - 2 eps)(l-1)/(l_max-1)`.
pub fn sweep_weight(l: usize, l_max: usize, eps: f64) -> f64 {
    eps + (1.0 - 2.0 * eps) * (l - 1) as f64 / (l_max - 1) as f64
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::invalid(format!(
            "eps must lie in (0, 0.5), got {eps}"
        )));
    }
    Ok(())
}

/// Weighted-sum sweep with `a2` increasing from `eps` to `1 - eps`.
pub fn wsm_front(
    problem: &ProblemData,
    system: &StiffnessSystem,
    l_max: usize,
    eps: f64,
    config: &BBConfig,
) -> Result<ParetoFront> {
    if l_max < 2 {
        return Err(Error::invalid("a front needs at least two entries"));
    }
    check_eps(eps)?;
    let mut entries: Vec<FrontEntry> = Vec::with_capacity(l_max);
    for l in 1..=l_max {
        let scalarization =
            Scalarization::WeightedSum(Weights::from_second(sweep_weight(l, l_max, eps))?);
        let start = entries
            .last()
            .filter(|_| config.warm_start)
            .map(|e| &e.report.control);
        let report = solve_scalarized(problem, system, scalarization, start, config)?;
        entries.push(FrontEntry {
            scalarization,
            report,
        });
    }
    Ok(ParetoFront {
        method: Method::Wsm,
        entries,
        aborted: None,
    })
}

/// `zeta^1 = j(u^0) - (h_perp, h_par)`.
pub fn first_reference_point(j_init: ObjectivePair, h_perp: f64, h_par: f64) -> [f64; 2] {
    [j_init.j1 - h_perp, j_init.j2 - h_par]
}

/// Next reference point from the previous one and the objectives reached
/// for it: `j + h_par e_par + h_perp e_perp` where `e_perp` is the unit
/// vector of `zeta_prev - j` and `e_par` its counter-clockwise rotation.
pub fn next_reference_point(
    zeta_prev: [f64; 2],
    j_current: ObjectivePair,
    h_perp: f64,
    h_par: f64,
) -> Result<[f64; 2]> {
    let perp = [zeta_prev[0] - j_current.j1, zeta_prev[1] - j_current.j2];
    let norm = perp[0].hypot(perp[1]);
    if !(norm > 0.0) {
        return Err(Error::DegenerateGeometry);
    }
    let e_perp = [perp[0] / norm, perp[1] / norm];
    let e_par = [-e_perp[1], e_perp[0]];
    Ok([
        j_current.j1 + h_par * e_par[0] + h_perp * e_perp[0],
        j_current.j2 + h_par * e_par[1] + h_perp * e_perp[1],
    ])
}

/// Reference-point sweep between the two weighted-sum endpoints
/// `a = (1 - eps, eps)` and `a = (eps, 1 - eps)`. Entries are ordered
/// start point, reference-point solutions, end point.
pub fn rpm_front(
    problem: &ProblemData,
    system: &StiffnessSystem,
    l_max: usize,
    h_perp: f64,
    h_par: f64,
    eps: f64,
    config: &BBConfig,
) -> Result<ParetoFront> {
    if l_max < 2 {
        return Err(Error::invalid("a front needs at least two entries"));
    }
    if !(h_perp > 0.0 && h_par > 0.0) {
        return Err(Error::invalid(
            "reference-point step sizes must be positive",
        ));
    }
    check_eps(eps)?;
    let init_s = Scalarization::WeightedSum(Weights::new(1.0 - eps, eps)?);
    let end_s = Scalarization::WeightedSum(Weights::new(eps, 1.0 - eps)?);
    let init = solve_scalarized(problem, system, init_s, None, config)?;
    let end = solve_scalarized(problem, system, end_s, None, config)?;
    let j1_end = end.objectives.j1;

    let mut zeta = first_reference_point(init.objectives, h_perp, h_par);
    let mut inner: Vec<FrontEntry> = Vec::new();
    let mut aborted = None;
    let mut l = 1;
    while zeta[0] < j1_end && l < l_max {
        let start = match inner.last() {
            Some(e) => &e.report.control,
            None => &init.control,
        };
        let scalarization = Scalarization::ReferencePoint(zeta);
        let report = solve_scalarized(
            problem,
            system,
            scalarization,
            config.warm_start.then_some(start),
            config,
        )?;
        let reached = report.objectives;
        inner.push(FrontEntry {
            scalarization,
            report,
        });
        match next_reference_point(zeta, reached, h_perp, h_par) {
            Ok(z) => zeta = z,
            Err(e) => {
                aborted = Some(e.to_string());
                break;
            }
        }
        l += 1;
    }
    let mut entries = Vec::with_capacity(inner.len() + 2);
    entries.push(FrontEntry {
        scalarization: init_s,
        report: init,
    });
    entries.extend(inner);
    entries.push(FrontEntry {
        scalarization: end_s,
        report: end,
    });
    Ok(ParetoFront {
        method: Method::Rpm,
        entries,
        aborted,
    })
}

/// Approximate ideal vector: `j1` at `a = (1 - eps, eps)` and `j2` at
/// `a = (eps, 1 - eps)`.
pub fn ideal_vector(
    problem: &ProblemData,
    system: &StiffnessSystem,
    eps: f64,
    config: &BBConfig,
) -> Result<ObjectivePair> {
    check_eps(eps)?;
    let first = solve_wsm(problem, system, Weights::new(1.0 - eps, eps)?, config)?;
    let second = solve_wsm(problem, system, Weights::new(eps, 1.0 - eps)?, config)?;
    Ok(ObjectivePair::new(
        first.objectives.j1,
        second.objectives.j2,
    ))
}
