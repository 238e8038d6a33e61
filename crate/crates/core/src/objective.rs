//! Discrete bicriterial tracking objective, state and adjoint solves, and
//! the `U_h` gradient representers of both scalarizations.

use std::fmt;
use std::sync::Arc;

use crate::control::{l2_norm, BoxBounds, PwcControl};
use crate::error::{Error, Result};
use crate::fem::{
    assemble_load_pwc, assemble_point_load, check_same_mesh, is_strictly_interior, P1Function,
    StiffnessSystem,
};
use crate::mesh::{Point, TriMesh};

/// An observation point with its desired state value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub point: Point,
    pub target: f64,
}

impl Observation {
    pub fn new(point: Point, target: f64) -> Self {
        Self { point, target }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemData {
    obs: [Vec<Observation>; 2],
    lambda: [f64; 2],
    bounds: BoxBounds,
}

impl ProblemData {
    pub fn new(
        obs1: Vec<Observation>,
        obs2: Vec<Observation>,
        lambda: [f64; 2],
        bounds: BoxBounds,
    ) -> Result<Self> {
        if !lambda.iter().all(|l| l.is_finite() && *l > 0.0) {
            return Err(Error::invalid(format!(
                "regularization weights must be positive, got {lambda:?}"
            )));
        }
        for (k, set) in [&obs1, &obs2].into_iter().enumerate() {
            if set.is_empty() {
                return Err(Error::invalid(format!(
                    "observation set {} is empty",
                    k + 1
                )));
            }
            for o in set {
                if !is_strictly_interior(o.point) {
                    return Err(Error::PointOnBoundary { point: o.point });
                }
                if !o.target.is_finite() {
                    return Err(Error::invalid("desired values must be finite"));
                }
            }
        }
        Ok(Self {
            obs: [obs1, obs2],
            lambda,
            bounds,
        })
    }

    /// One observation per objective: `y(0.75, 0.25) -> 6`, `y(0.25, 0.75) -> -2`,
    /// with bounds `[-7, 15]`.
    pub fn two_point_example(lambda1: f64, lambda2: f64) -> Result<Self> {
        Self::new(
            vec![Observation::new([0.75, 0.25], 6.0)],
            vec![Observation::new([0.25, 0.75], -2.0)],
            [lambda1, lambda2],
            BoxBounds::new(-7.0, 15.0)?,
        )
    }

    pub fn observations(&self, k: usize) -> &[Observation] {
        &self.obs[k]
    }

    pub fn lambda(&self) -> [f64; 2] {
        self.lambda
    }

    pub fn bounds(&self) -> BoxBounds {
        self.bounds
    }

    pub fn with_lambda(&self, lambda: [f64; 2]) -> Result<Self> {
        Self::new(
            self.obs[0].clone(),
            self.obs[1].clone(),
            lambda,
            self.bounds,
        )
    }

    pub fn with_bounds(&self, bounds: BoxBounds) -> Self {
        Self {
            bounds,
            ..self.clone()
        }
    }
}

/// Strictly positive weights summing to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights([f64; 2]);

impl Weights {
    pub fn new(a1: f64, a2: f64) -> Result<Self> {
        if !(a1 > 0.0 && a2 > 0.0) || ((a1 + a2) - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "weights must be strictly positive and sum to 1, got ({a1}, {a2})"
            )));
        }
        Ok(Self([a1, a2]))
    }

    /// `(1 - a2, a2)`.
    pub fn from_second(a2: f64) -> Result<Self> {
        Self::new(1.0 - a2, a2)
    }

    pub fn get(&self) -> [f64; 2] {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectivePair {
    pub j1: f64,
    pub j2: f64,
}

impl ObjectivePair {
    pub fn new(j1: f64, j2: f64) -> Self {
        Self { j1, j2 }
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.j1, self.j2]
    }

    pub fn distance(&self, other: &ObjectivePair) -> f64 {
        (self.j1 - other.j1).hypot(self.j2 - other.j2)
    }

    /// True when `self <= other + slack` componentwise.
    pub fn le(&self, other: &ObjectivePair, slack: f64) -> bool {
        self.j1 <= other.j1 + slack && self.j2 <= other.j2 + slack
    }
}

impl fmt::Display for ObjectivePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:.6})", self.j1, self.j2)
    }
}

/// State, both adjoints and the observation residuals for one control.
#[derive(Debug, Clone)]
pub struct StateAdjointBundle {
    pub state: P1Function,
    pub adjoints: [P1Function; 2],
    pub residuals: [Vec<f64>; 2],
}

/// Linear solves performed by [`evaluate_control`].
pub const SOLVES_PER_EVALUATION: usize = 3;

/// `y_h = S_h u`.
pub fn solve_state(system: &StiffnessSystem, u: &PwcControl, tol: f64) -> Result<P1Function> {
    let rhs = assemble_load_pwc(system.mesh(), u)?;
    system.solve(&rhs, tol)
}

/// Residuals `y_h(x_k^i) - y_k^i` for both observation sets.
pub fn observation_residuals(problem: &ProblemData, state: &P1Function) -> Result<[Vec<f64>; 2]> {
    let r = |k: usize| -> Result<Vec<f64>> {
        problem.obs[k]
            .iter()
            .map(|o| Ok(state.evaluate(o.point)? - o.target))
            .collect()
    };
    Ok([r(0)?, r(1)?])
}

/// Solves both adjoint problems for the given state.
pub fn solve_adjoints(
    problem: &ProblemData,
    system: &StiffnessSystem,
    state: P1Function,
    tol: f64,
) -> Result<StateAdjointBundle> {
    check_same_mesh(system.mesh(), state.mesh())?;
    let residuals = observation_residuals(problem, &state)?;
    let adjoint = |k: usize| -> Result<P1Function> {
        let points: Vec<Point> = problem.obs[k].iter().map(|o| o.point).collect();
        let rhs = assemble_point_load(system.mesh(), &points, &residuals[k])?;
        system.solve(&rhs, tol)
    };
    let (p1, p2) = rayon::join(|| adjoint(0), || adjoint(1));
    Ok(StateAdjointBundle {
        state,
        adjoints: [p1?, p2?],
        residuals,
    })
}

/// State and adjoint solves for `u`.
pub fn evaluate_control(
    problem: &ProblemData,
    system: &StiffnessSystem,
    u: &PwcControl,
    tol: f64,
) -> Result<StateAdjointBundle> {
    let state = solve_state(system, u, tol)?;
    solve_adjoints(problem, system, state, tol)
}

/// `j_k = 1/2 sum_i (y(x_k^i) - y_k^i)^2 + lambda_k/2 ||u||^2`, where `state`
/// must be the state of `u`.
pub fn eval_objectives(
    problem: &ProblemData,
    u: &PwcControl,
    state: &P1Function,
) -> Result<ObjectivePair> {
    check_same_mesh(u.mesh(), state.mesh())?;
    let residuals = observation_residuals(problem, state)?;
    Ok(objectives_from_residuals(problem, u, &residuals))
}

pub(crate) fn objectives_from_residuals(
    problem: &ProblemData,
    u: &PwcControl,
    residuals: &[Vec<f64>; 2],
) -> ObjectivePair {
    let norm_sq = l2_norm(u).powi(2);
    let j = |k: usize| {
        0.5 * residuals[k].iter().map(|r| r * r).sum::<f64>() + 0.5 * problem.lambda[k] * norm_sq
    };
    ObjectivePair::new(j(0), j(1))
}

/// Recomputes the state before evaluating the objectives.
pub fn eval_objectives_checked(
    problem: &ProblemData,
    system: &StiffnessSystem,
    u: &PwcControl,
    tol: f64,
) -> Result<ObjectivePair> {
    let state = solve_state(system, u, tol)?;
    eval_objectives(problem, u, &state)
}

/// Representer of `w -> sum_k c_k (p_k + lambda_k u, w)_U` in `U_h`.
fn combined_gradient(
    problem: &ProblemData,
    bundle: &StateAdjointBundle,
    u: &PwcControl,
    c: [f64; 2],
) -> Result<PwcControl> {
    check_same_mesh(u.mesh(), bundle.state.mesh())?;
    let mesh: &Arc<TriMesh> = u.mesh();
    let p = P1Function::linear_combination(&[
        (c[0], &bundle.adjoints[0]),
        (c[1], &bundle.adjoints[1]),
    ])?;
    let lam = c[0] * problem.lambda[0] + c[1] * problem.lambda[1];
    let nodal = p.nodal_values();
    let values = mesh
        .triangles()
        .iter()
        .zip(u.values())
        .map(|(tri, ut)| tri.iter().map(|k| nodal[*k]).sum::<f64>() / 3.0 + lam * ut)
        .collect();
    PwcControl::new(mesh.clone(), values)
}

/// Gradient of `W_alpha = a1 j1 + a2 j2`.
pub fn grad_wsm(
    problem: &ProblemData,
    bundle: &StateAdjointBundle,
    u: &PwcControl,
    weights: Weights,
) -> Result<PwcControl> {
    combined_gradient(problem, bundle, u, weights.get())
}

/// Gradient of `R_zeta = 1/2 |j - zeta|^2`, with `j` the objectives at `u`.
pub fn grad_rpm(
    problem: &ProblemData,
    bundle: &StateAdjointBundle,
    u: &PwcControl,
    zeta: [f64; 2],
    j: ObjectivePair,
) -> Result<PwcControl> {
    combined_gradient(problem, bundle, u, [j.j1 - zeta[0], j.j2 - zeta[1]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::l2_inner;
    use crate::fem::{assemble_stiffness, LINEAR_TOL};
    use crate::mesh::build_uniform_mesh;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(level: u32) -> (Arc<TriMesh>, StiffnessSystem) {
        let m = Arc::new(build_uniform_mesh(level).unwrap());
        let s = assemble_stiffness(m.clone());
        (m, s)
    }

    fn random(m: &Arc<TriMesh>, rng: &mut ChaCha8Rng) -> PwcControl {
        PwcControl::new(
            m.clone(),
            (0..m.num_triangles())
                .map(|_| rng.gen_range(-7.0..15.0))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn problem_validation() {
        let b = BoxBounds::new(-1.0, 1.0).unwrap();
        let o = vec![Observation::new([0.5, 0.5], 1.0)];
        assert!(ProblemData::new(o.clone(), o.clone(), [0.0, 1.0], b).is_err());
        assert!(ProblemData::new(vec![], o.clone(), [1.0, 1.0], b).is_err());
        let edge = vec![Observation::new([0.0, 0.5], 1.0)];
        assert!(matches!(
            ProblemData::new(edge, o.clone(), [1.0, 1.0], b),
            Err(Error::PointOnBoundary { .. })
        ));
        assert!(ProblemData::new(o.clone(), o, [1.0, 1.0], b).is_ok());
    }

    #[test]
    fn weights_validation() {
        assert!(Weights::new(1.0, 0.0).is_err());
        assert!(Weights::new(0.5, 0.6).is_err());
        assert_eq!(Weights::from_second(0.25).unwrap().get(), [0.75, 0.25]);
    }

    #[test]
    fn state_cases() {
        let (m, s) = setup(1);
        let y = solve_state(&s, &PwcControl::constant(m.clone(), 1.0), LINEAR_TOL).unwrap();
        assert!((y.nodal_values()[4] - 0.0625).abs() < 1e-15);
        let y0 = solve_state(&s, &PwcControl::constant(m, 0.0), LINEAR_TOL).unwrap();
        assert!(y0.nodal_values().iter().all(|v| *v == 0.0));

        let (m, s) = setup(3);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (u, v) = (random(&m, &mut rng), random(&m, &mut rng));
        let yu = solve_state(&s, &u, LINEAR_TOL).unwrap();
        let yv = solve_state(&s, &v, LINEAR_TOL).unwrap();
        let yuv = solve_state(&s, &u.add_scaled(1.0, &v).unwrap(), LINEAR_TOL).unwrap();
        for k in 0..m.num_nodes() {
            let sum = yu.nodal_values()[k] + yv.nodal_values()[k];
            assert!((yuv.nodal_values()[k] - sum).abs() <= 1e-10);
        }
    }

    #[test]
    fn zero_control_objectives() {
        let (m, s) = setup(4);
        let p = ProblemData::two_point_example(0.1, 0.1).unwrap();
        let u = PwcControl::constant(m, 0.0);
        let y = solve_state(&s, &u, LINEAR_TOL).unwrap();
        let j = eval_objectives(&p, &u, &y).unwrap();
        assert_eq!((j.j1, j.j2), (18.0, 2.0));
    }

    #[test]
    fn zero_residual_objectives_and_adjoints() {
        let (m, s) = setup(3);
        let c = 2.0;
        let u = PwcControl::constant(m, c);
        let y = solve_state(&s, &u, LINEAR_TOL).unwrap();
        let t1 = y.evaluate([0.75, 0.25]).unwrap();
        let t2 = y.evaluate([0.25, 0.5]).unwrap();
        let p = ProblemData::new(
            vec![Observation::new([0.75, 0.25], t1)],
            vec![Observation::new([0.25, 0.5], t2)],
            [0.3, 0.7],
            BoxBounds::new(-10.0, 10.0).unwrap(),
        )
        .unwrap();
        let j = eval_objectives(&p, &u, &y).unwrap();
        assert!((j.j1 - 0.3 * c * c / 2.0).abs() < 1e-14);
        assert!((j.j2 - 0.7 * c * c / 2.0).abs() < 1e-14);
        let b = solve_adjoints(&p, &s, y, LINEAR_TOL).unwrap();
        for a in &b.adjoints {
            assert!(a.nodal_values().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn adjoint_is_scaled_green_function() {
        let (m, s) = setup(3);
        let a = [0.75, 0.25];
        let p = ProblemData::new(
            vec![Observation::new(a, 6.0)],
            vec![Observation::new([0.25, 0.75], -2.0)],
            [0.1, 0.1],
            BoxBounds::new(-7.0, 15.0).unwrap(),
        )
        .unwrap();
        let u = PwcControl::from_fn(m.clone(), |c| 10.0 * c[0] * c[1]);
        let b = evaluate_control(&p, &s, &u, LINEAR_TOL).unwrap();
        let r = b.residuals[0][0];
        let green = s
            .solve(&assemble_point_load(&m, &[a], &[1.0]).unwrap(), LINEAR_TOL)
            .unwrap();
        for (pa, g) in b.adjoints[0]
            .nodal_values()
            .iter()
            .zip(green.nodal_values())
        {
            assert!((pa - r * g).abs() < 1e-10);
        }
    }

    #[test]
    fn discrete_green_function_is_symmetric() {
        let (m, s) = setup(4);
        let (a, b) = ([0.75, 0.25], [0.3, 0.55]);
        let ga = s
            .solve(&assemble_point_load(&m, &[a], &[1.0]).unwrap(), LINEAR_TOL)
            .unwrap();
        let gb = s
            .solve(&assemble_point_load(&m, &[b], &[1.0]).unwrap(), LINEAR_TOL)
            .unwrap();
        assert!((ga.evaluate(b).unwrap() - gb.evaluate(a).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn objectives_match_hand_composition() {
        let (m, s) = setup(3);
        let p = ProblemData::two_point_example(0.4, 0.9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random(&m, &mut rng);
        let y = solve_state(&s, &u, LINEAR_TOL).unwrap();
        let j = eval_objectives(&p, &u, &y).unwrap();
        let n2 = l2_norm(&u).powi(2);
        let j1 = 0.5 * (y.evaluate([0.75, 0.25]).unwrap() - 6.0).powi(2) + 0.2 * n2;
        let j2 = 0.5 * (y.evaluate([0.25, 0.75]).unwrap() + 2.0).powi(2) + 0.45 * n2;
        assert!((j.j1 - j1).abs() < 1e-12 && (j.j2 - j2).abs() < 1e-12);
        assert_eq!(eval_objectives_checked(&p, &s, &u, LINEAR_TOL).unwrap(), j);
    }

    #[test]
    fn gradient_trivial_cases() {
        let (m, s) = setup(2);
        let p = ProblemData::two_point_example(0.5, 2.0).unwrap();
        let c = 1.5;
        let u = PwcControl::constant(m.clone(), c);
        let zero = P1Function::zero(m.clone());
        let bundle = StateAdjointBundle {
            state: zero.clone(),
            adjoints: [zero.clone(), zero],
            residuals: [vec![0.0], vec![0.0]],
        };
        let w = Weights::new(0.25, 0.75).unwrap();
        let g = grad_wsm(&p, &bundle, &u, w).unwrap();
        assert!(g
            .values()
            .iter()
            .all(|v| (v - (0.25 * 0.5 + 0.75 * 2.0) * c).abs() < 1e-15));

        let j = ObjectivePair::new(3.0, 4.0);
        let g = grad_rpm(&p, &bundle, &u, [0.0, 0.0], j).unwrap();
        assert!(g
            .values()
            .iter()
            .all(|v| (v - (3.0 * 0.5 + 4.0 * 2.0) * c).abs() < 1e-14));

        let b = evaluate_control(&p, &s, &u, LINEAR_TOL).unwrap();
        let j = eval_objectives(&p, &u, &b.state).unwrap();
        let g = grad_rpm(&p, &b, &u, j.as_array(), j).unwrap();
        assert!(g.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn wsm_representer_matches_adjoint_identity() {
        // (p_k, w)_U = sum_i r_k^i (S w)(x_k^i) for the discrete adjoint.
        let (m, s) = setup(3);
        let p = ProblemData::two_point_example(0.1, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = random(&m, &mut rng);
        let b = evaluate_control(&p, &s, &u, LINEAR_TOL).unwrap();
        let w = random(&m, &mut rng);
        let sw = solve_state(&s, &w, LINEAR_TOL).unwrap();
        for k in 0..2 {
            let pk = crate::control::pi0_project(&b.adjoints[k]);
            let lhs = l2_inner(&pk, &w).unwrap();
            let rhs: f64 = p
                .observations(k)
                .iter()
                .zip(&b.residuals[k])
                .map(|(o, r)| r * sw.evaluate(o.point).unwrap())
                .sum();
            assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }
    }
}
