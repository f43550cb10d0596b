use phasemax::ensembles::{gen_instance_seeded, ApproxPolicy, InstanceSpec, ProblemInstance};
use phasemax::io::{instance_from_json, instance_to_json};
use phasemax::oracles::uniqueness_check;
use phasemax::solvers::{solve_basis_pursuit, solve_phasemax, SolverConfig};
use phasemax::{Cx, Field};

fn instance(n: usize, m: usize, field: Field, beta_deg: f64, seed: u64) -> ProblemInstance {
    let spec = InstanceSpec::new(n, m, field).approx(ApproxPolicy::AtAngle(beta_deg.to_radians()));
    gen_instance_seeded(&spec, seed).unwrap()
}

fn tight() -> SolverConfig {
    SolverConfig {
        tol_objective: 1e-9,
        ..SolverConfig::default()
    }
}

#[test]
fn json_round_trip_preserves_instance() {
    for field in [Field::Real, Field::Complex] {
        let inst = instance(7, 30, field, 33.0, 8);
        let back = instance_from_json(&instance_to_json(&inst)).unwrap();
        assert_eq!(back.ensemble, inst.ensemble);
        assert_eq!(back.xhat, inst.xhat);
        // the truth is re-phased against xhat on load, which may move it by an ulp
        let d = back.truth.unwrap().distance(inst.truth.as_ref().unwrap()).unwrap();
        assert!(d < 1e-14, "{d}");
    }
}

#[test]
fn primal_and_dual_optimal_values_coincide() {
    // includes undersampled instances where recovery fails but duality still holds
    for (seed, m) in [(1, 12), (2, 20), (3, 40), (4, 60)] {
        for field in [Field::Real, Field::Complex] {
            let inst = instance(5, m, field, 40.0, seed);
            let pm = solve_phasemax(&inst, &tight()).unwrap();
            let bp = solve_basis_pursuit(&inst.ensemble, &inst.xhat, &tight()).unwrap();
            assert!(pm.converged && bp.converged, "m = {m}");
            let scale = pm.objective.abs().max(1.0);
            assert!(
                (pm.objective - bp.objective).abs() < 1e-6 * scale,
                "m = {m} {field:?}: {} vs {}",
                pm.objective,
                bp.objective
            );
        }
    }
}

#[test]
fn solution_rotates_with_the_approximation() {
    let inst = instance(6, 50, Field::Complex, 30.0, 21);
    let w = Cx::from_polar(1.0, 1.1);
    let rotated = ProblemInstance::new(inst.ensemble.clone(), inst.xhat.scale(w), inst.truth.clone()).unwrap();
    let a = solve_phasemax(&inst, &tight()).unwrap();
    let b = solve_phasemax(&rotated, &tight()).unwrap();
    let d = a.x_star.scale(w).distance(&b.x_star).unwrap();
    assert!(d < 1e-5, "distance {d}");
}

#[test]
fn uniqueness_ignores_row_order() {
    for seed in 0..6 {
        let inst = instance(4, 14 + 3 * seed as usize, Field::Complex, 35.0, seed);
        let truth = inst.truth.as_ref().unwrap();
        let mut perm: Vec<usize> = (0..inst.m()).collect();
        perm.reverse();
        perm.rotate_left(seed as usize % inst.m());
        let shuffled = inst.ensemble.select(&perm).unwrap();
        let a = uniqueness_check(&inst.ensemble, truth, &inst.xhat).unwrap();
        let b = uniqueness_check(&shuffled, truth, &inst.xhat).unwrap();
        assert_eq!(a.nontrivial, b.nontrivial, "seed {seed}");
    }
}
