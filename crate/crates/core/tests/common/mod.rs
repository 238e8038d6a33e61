#![allow(dead_code)]

use std::sync::Arc;

use mo_tracking::harness::system_for_level;
use mo_tracking::{
    build_uniform_mesh_with, BoxBounds, Diagonal, ObjectivePair, ProblemData, PwcControl,
    StiffnessSystem, TriMesh,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const DIAGONALS: [Diagonal; 2] = [Diagonal::Rising, Diagonal::Falling];

pub fn mesh(level: u32) -> Arc<TriMesh> {
    Arc::new(build_uniform_mesh_with(level, Diagonal::Rising).unwrap())
}

pub fn system(level: u32) -> StiffnessSystem {
    system_for_level(level, Diagonal::Rising).unwrap()
}

pub fn example() -> ProblemData {
    ProblemData::two_point_example(0.1, 0.1).unwrap()
}

pub fn random_control(m: &Arc<TriMesh>, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> PwcControl {
    PwcControl::new(
        m.clone(),
        (0..m.num_triangles())
            .map(|_| rng.gen_range(lo..hi))
            .collect(),
    )
    .unwrap()
}

pub fn random_feasible(m: &Arc<TriMesh>, rng: &mut ChaCha8Rng, b: &BoxBounds) -> PwcControl {
    random_control(m, rng, b.lower(), b.upper())
}

/// `b` dominates `a`: no worse in both objectives (up to `slack`) and better
/// by more than `slack` in at least one.
pub fn dominates(b: &ObjectivePair, a: &ObjectivePair, slack: f64) -> bool {
    b.j1 <= a.j1 + slack && b.j2 <= a.j2 + slack && (b.j1 < a.j1 - slack || b.j2 < a.j2 - slack)
}

pub fn mutually_nondominated(points: &[ObjectivePair], slack: f64) -> bool {
    points.iter().enumerate().all(|(i, a)| {
        points
            .iter()
            .enumerate()
            .all(|(k, b)| i == k || !dominates(b, a, slack))
    })
}

pub fn pareto_ordered(points: &[ObjectivePair], slack: f64) -> bool {
    points
        .windows(2)
        .all(|w| w[1].j1 >= w[0].j1 - slack && w[1].j2 <= w[0].j2 + slack)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
