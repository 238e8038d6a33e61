//! Browser front end for the pointwise-tracking control problem.
//!
//! [`Session`] holds one assembled level and answers the three requests the
//! page makes: a weighted-sum solve, a reference-point solve and a front
//! sweep. [`DemoSession`] is the same thing behind `wasm-bindgen`.

use std::sync::Arc;

use mo_tracking::{
    assemble_stiffness, build_uniform_mesh_with, rpm_front, solve_rpm, solve_wsm, wsm_front,
    BBConfig, Diagonal, Method, ParetoFront, ProblemData, Result, SolveReport, StiffnessSystem,
    Weights,
};
use wasm_bindgen::prelude::*;

/// Finest level the page offers; a level-7 solve already takes a while in
/// a browser tab.
pub const MAX_LEVEL: u32 = 7;

const EPS: f64 = 1e-3;
const STEP: f64 = 0.2;

/// Result of one solve in plain arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// One value per triangle, in mesh order.
    pub control: Vec<f64>,
    pub j1: f64,
    pub j2: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl From<SolveReport> for Solution {
    fn from(r: SolveReport) -> Self {
        Self {
            control: r.control.values().to_vec(),
            j1: r.objectives.j1,
            j2: r.objectives.j2,
            iterations: r.iterations,
            converged: r.converged,
        }
    }
}

pub struct Session {
    problem: ProblemData,
    system: StiffnessSystem,
    config: BBConfig,
}

impl Session {
    pub fn new(level: u32, falling: bool, lambda1: f64, lambda2: f64) -> Result<Self> {
        if level > MAX_LEVEL {
            return Err(mo_tracking::Error::LevelTooLarge {
                level,
                max: MAX_LEVEL,
            });
        }
        let diagonal = if falling {
            Diagonal::Falling
        } else {
            Diagonal::Rising
        };
        let mesh = Arc::new(build_uniform_mesh_with(level, diagonal)?);
        Ok(Self {
            problem: ProblemData::two_point_example(lambda1, lambda2)?,
            system: assemble_stiffness(mesh).factorize()?,
            config: BBConfig::default(),
        })
    }

    pub fn level(&self) -> u32 {
        self.system.mesh().level()
    }

    /// Vertex coordinates, six numbers per triangle.
    pub fn triangles(&self) -> Vec<f64> {
        let mesh = self.system.mesh();
        mesh.triangles()
            .iter()
            .flat_map(|t| t.iter().flat_map(|k| mesh.nodes()[*k]))
            .collect()
    }

    /// Observation points as `x, y, target` triples, first objective first.
    pub fn observations(&self) -> Vec<f64> {
        (0..2)
            .flat_map(|k| self.problem.observations(k).iter())
            .flat_map(|o| [o.point[0], o.point[1], o.target])
            .collect()
    }

    pub fn solve_wsm(&self, alpha1: f64) -> Result<Solution> {
        let w = Weights::new(alpha1, 1.0 - alpha1)?;
        solve_wsm(&self.problem, &self.system, w, &self.config).map(Solution::from)
    }

    pub fn solve_rpm(&self, z1: f64, z2: f64) -> Result<Solution> {
        solve_rpm(&self.problem, &self.system, [z1, z2], &self.config).map(Solution::from)
    }

    /// Objective pairs of a sweep, flattened as `j1, j2, j1, j2, ...`.
    pub fn front(&self, method: Method, size: usize) -> Result<Vec<f64>> {
        let front: ParetoFront = match method {
            Method::Wsm => wsm_front(&self.problem, &self.system, size, EPS, &self.config)?,
            Method::Rpm => rpm_front(
                &self.problem,
                &self.system,
                size,
                STEP,
                STEP,
                EPS,
                &self.config,
            )?,
        };
        Ok(front
            .objectives()
            .iter()
            .flat_map(|j| [j.j1, j.j2])
            .collect())
    }
}

fn js(e: mo_tracking::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct DemoSolution(Solution);

#[wasm_bindgen]
impl DemoSolution {
    #[wasm_bindgen(getter)]
    pub fn control(&self) -> Vec<f64> {
        self.0.control.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn j1(&self) -> f64 {
        self.0.j1
    }

    #[wasm_bindgen(getter)]
    pub fn j2(&self) -> f64 {
        self.0.j2
    }

    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        self.0.iterations
    }

    #[wasm_bindgen(getter)]
    pub fn converged(&self) -> bool {
        self.0.converged
    }
}

#[wasm_bindgen]
pub struct DemoSession(Session);

#[wasm_bindgen]
impl DemoSession {
    #[wasm_bindgen(constructor)]
    pub fn new(
        level: u32,
        falling: bool,
        lambda1: f64,
        lambda2: f64,
    ) -> Result<DemoSession, JsError> {
        Session::new(level, falling, lambda1, lambda2)
            .map(DemoSession)
            .map_err(js)
    }

    pub fn triangles(&self) -> Vec<f64> {
        self.0.triangles()
    }

    pub fn observations(&self) -> Vec<f64> {
        self.0.observations()
    }

    #[wasm_bindgen(js_name = solveWsm)]
    pub fn solve_wsm(&self, alpha1: f64) -> Result<DemoSolution, JsError> {
        self.0.solve_wsm(alpha1).map(DemoSolution).map_err(js)
    }

    #[wasm_bindgen(js_name = solveRpm)]
    pub fn solve_rpm(&self, z1: f64, z2: f64) -> Result<DemoSolution, JsError> {
        self.0.solve_rpm(z1, z2).map(DemoSolution).map_err(js)
    }

    #[wasm_bindgen(js_name = wsmFront)]
    pub fn wsm_front(&self, size: usize) -> Result<Vec<f64>, JsError> {
        self.0.front(Method::Wsm, size).map_err(js)
    }

    #[wasm_bindgen(js_name = rpmFront)]
    pub fn rpm_front(&self, size: usize) -> Result<Vec<f64>, JsError> {
        self.0.front(Method::Rpm, size).map_err(js)
    }
}
