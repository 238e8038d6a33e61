mod common;

use std::sync::Arc;

use common::random_control;
use mo_tracking::objective::eval_objectives_checked;
use mo_tracking::{
    assemble_load_pwc, assemble_point_load, build_uniform_mesh_with, eval_objectives,
    evaluate_control, grad_rpm, grad_wsm, l2_error, l2_inner, l2_norm, nested_element_map, prolong,
    solve_state, Diagonal, PwcControl, Weights,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn zero_control_objectives() {
    let problem = common::example();
    let system = common::system(3);
    let u = PwcControl::constant(system.mesh().clone(), 0.0);
    let j = eval_objectives_checked(&problem, &system, &u, 1e-12).unwrap();
    assert_eq!(j.as_array(), [18.0, 2.0]);
}

#[test]
fn unit_control_on_level_one() {
    let system = common::system(1);
    let u = PwcControl::constant(system.mesh().clone(), 1.0);
    let y = solve_state(&system, &u, 1e-12).unwrap();
    assert!((y.evaluate([0.5, 0.5]).unwrap() - 0.0625).abs() < 1e-15);
}

#[test]
fn state_is_linear_in_the_control() {
    let system = common::system(3);
    let m = system.mesh().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let u = random_control(&m, &mut rng, -5.0, 5.0);
    let v = random_control(&m, &mut rng, -5.0, 5.0);
    let yu = solve_state(&system, &u, 1e-12).unwrap();
    let yv = solve_state(&system, &v, 1e-12).unwrap();
    let yuv = solve_state(&system, &u.add_scaled(1.0, &v).unwrap(), 1e-12).unwrap();
    for k in 0..m.num_nodes() {
        assert!(
            (yuv.nodal_values()[k] - yu.nodal_values()[k] - yv.nodal_values()[k]).abs() <= 1e-10
        );
    }
}

#[test]
fn discrete_green_function_is_symmetric() {
    let system = common::system(4);
    let m = system.mesh().clone();
    let (a, b) = ([0.3, 0.6], [0.71, 0.2]);
    let ga = system
        .solve(&assemble_point_load(&m, &[a], &[1.0]).unwrap(), 1e-13)
        .unwrap();
    let gb = system
        .solve(&assemble_point_load(&m, &[b], &[1.0]).unwrap(), 1e-13)
        .unwrap();
    assert!((ga.evaluate(b).unwrap() - gb.evaluate(a).unwrap()).abs() <= 1e-10);
}

#[test]
fn gradients_represent_directional_derivatives() {
    let problem = common::example();
    let system = common::system(3);
    let m = system.mesh().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u = random_control(&m, &mut rng, -7.0, 15.0);
    let bundle = evaluate_control(&problem, &system, &u, 1e-13).unwrap();
    let j0 = eval_objectives(&problem, &u, &bundle.state).unwrap();
    let w = Weights::new(0.25, 0.75).unwrap();
    let zeta = [j0.j1 - 2.0, j0.j2 - 1.0];
    let gw = grad_wsm(&problem, &bundle, &u, w).unwrap();
    let gr = grad_rpm(&problem, &bundle, &u, zeta, j0).unwrap();
    let value = |v: &PwcControl| {
        let j = eval_objectives_checked(&problem, &system, v, 1e-13).unwrap();
        let wsm = 0.25 * j.j1 + 0.75 * j.j2;
        let rpm = 0.5 * ((j.j1 - zeta[0]).powi(2) + (j.j2 - zeta[1]).powi(2));
        [wsm, rpm]
    };
    let h = 1e-5;
    for _ in 0..20 {
        let d = random_control(&m, &mut rng, -1.0, 1.0);
        let p = value(&u.add_scaled(h, &d).unwrap());
        let q = value(&u.add_scaled(-h, &d).unwrap());
        for (k, g) in [&gw, &gr].into_iter().enumerate() {
            let fd = (p[k] - q[k]) / (2.0 * h);
            let an = l2_inner(g, &d).unwrap();
            assert!(
                (fd - an).abs() <= 1e-6 * (1.0 + an.abs()),
                "k={k} fd={fd} an={an}"
            );
        }
    }
}

#[test]
fn objectives_are_convex_along_segments() {
    let problem = common::example();
    let system = common::system(3);
    let m = system.mesh().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let j = |v: &PwcControl| {
        eval_objectives_checked(&problem, &system, v, 1e-13)
            .unwrap()
            .as_array()
    };
    for _ in 0..10 {
        let u = random_control(&m, &mut rng, -7.0, 15.0);
        let v = random_control(&m, &mut rng, -7.0, 15.0);
        let (ju, jv) = (j(&u), j(&v));
        for t in [0.25, 0.5, 0.75] {
            let mid = u.map(|x| t * x).add_scaled(1.0 - t, &v).unwrap();
            let jm = j(&mid);
            for k in 0..2 {
                assert!(jm[k] <= t * ju[k] + (1.0 - t) * jv[k] + 1e-12);
            }
        }
    }
}

#[test]
fn load_vector_tests_against_constants() {
    // sum of the load vector = (u, sum of interior hat functions).
    let m = common::mesh(3);
    let u = PwcControl::constant(m.clone(), 2.0);
    let rhs = assemble_load_pwc(&m, &u).unwrap();
    let interior_hat_mass: f64 = (0..m.num_triangles())
        .map(|t| {
            let inner = m.triangles()[t]
                .iter()
                .filter(|k| m.interior_mask()[**k])
                .count();
            inner as f64 * m.element_area() / 3.0
        })
        .sum();
    assert!((rhs.iter().sum::<f64>() - 2.0 * interior_hat_mass).abs() < 1e-14);
}

#[test]
fn nested_maps_partition_fine_meshes() {
    for d in common::DIAGONALS {
        let c = build_uniform_mesh_with(2, d).unwrap();
        let f = build_uniform_mesh_with(5, d).unwrap();
        let map = nested_element_map(&c, &f).unwrap();
        let mut all: Vec<usize> = map.concat();
        all.sort_unstable();
        assert_eq!(all, (0..f.num_triangles()).collect::<Vec<_>>());
    }
}

fn falling(level: u32) -> Arc<mo_tracking::TriMesh> {
    Arc::new(build_uniform_mesh_with(level, Diagonal::Falling).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn prolongation_is_an_isometry(seed in any::<u64>(), coarse in 0u32..3, extra in 0u32..3, fall in any::<bool>()) {
        let mesh = |l| if fall { falling(l) } else { common::mesh(l) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_control(&mesh(coarse), &mut rng, -10.0, 10.0);
        let fine = mesh(coarse + extra);
        let p = prolong(&u, &fine).unwrap();
        prop_assert!((l2_norm(&p) - l2_norm(&u)).abs() <= 1e-13);
        prop_assert_eq!(l2_error(&u, &p).unwrap(), 0.0);
    }

    #[test]
    fn inner_product_matches_direct_sum(seed in any::<u64>()) {
        let m = common::mesh(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_control(&m, &mut rng, -3.0, 3.0);
        let v = random_control(&m, &mut rng, -3.0, 3.0);
        let direct: f64 = (0..m.num_triangles()).map(|t| m.signed_area(t) * u.values()[t] * v.values()[t]).sum();
        prop_assert!((l2_inner(&u, &v).unwrap() - direct).abs() <= 1e-14);
    }
}
