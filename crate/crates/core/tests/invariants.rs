//! Property-based and seeded-random invariant tests spanning the modules:
//! cone duality, measurement validity, scoring invariances, no-signaling,
//! and soundness of the extreme-point measurement enumeration.

use proptest::prelude::*;
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;

use polygpt::chsh::{
    chsh_max, chsh_value, measurement_candidates, selected_configuration,
    Measurement,
};
use polygpt::game::{
    enumerate_responses, enumerate_wirings, wiring_distribution, NoSignalingBox,
};
use polygpt::geometry::{build_polygon_system, Cone, Family, Scheme, Vec3, UNIT};
use polygpt::lp;
use polygpt::tensor::{maximal_tensor_constraints, product_state, BipartiteState, TensorKind};

fn rotate_z(v: Vec3, theta: f64) -> Vec3 {
    let (s, c) = theta.sin_cos();
    Vec3::new(c * v.x - s * v.y, s * v.x + c * v.y, v.z)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Double dual returns the original cone for random full-dimensional
    /// generator sets.
    #[test]
    fn cone_double_dual(rays in prop::collection::vec((0.0f64..std::f64::consts::TAU, 0.1f64..2.0), 3..8)) {
        let gens: Vec<Vec3> = rays
            .iter()
            .map(|&(phi, r)| Vec3::new(r * phi.cos(), r * phi.sin(), 1.0))
            .collect();
        let cone = Cone::from_generators(&gens).unwrap();
        let dd = cone.dual().unwrap().dual().unwrap();
        prop_assert!(polygpt::geometry::same_ray_set(cone.generators(), dd.generators()));
    }

    /// Every enumerated measurement candidate is a valid binary measurement.
    #[test]
    fn candidates_are_valid_measurements(n in 3usize..16) {
        let (family, scheme, _) = selected_configuration();
        let sys = build_polygon_system(n, family, scheme).unwrap();
        for e in measurement_candidates(&sys) {
            prop_assert!(Measurement::new(e, &sys).is_ok());
        }
    }

    /// Product states of valid states satisfy every maximal-tensor constraint.
    #[test]
    fn product_states_feasible(n in 3usize..10, i in 0usize..32, j in 0usize..32) {
        let (family, scheme, _) = selected_configuration();
        let sys = build_polygon_system(n, family, scheme).unwrap();
        let k = sys.state_vertices.len();
        let w = product_state(sys.state_vertices[i % k], sys.state_vertices[j % k]).unwrap();
        let polytope = maximal_tensor_constraints(&sys, &sys, true);
        prop_assert!(polytope.feasibility_margin(&w) >= -1e-9);
    }

    /// The CHSH score is invariant under a global rotation about the z axis
    /// applied to the state and all measurement effects.
    #[test]
    fn score_rotation_invariance(
        theta in 0.0f64..std::f64::consts::TAU,
        idx in prop::array::uniform4(0usize..8),
        si in 0usize..8,
        sj in 0usize..8,
    ) {
        let (family, scheme, _) = selected_configuration();
        let sys = build_polygon_system(8, family, scheme).unwrap();
        let cands = measurement_candidates(&sys);
        let m: Vec<Measurement> = idx
            .iter()
            .map(|&i| Measurement { effect: cands[i % cands.len()] })
            .collect();
        let w = product_state(sys.state_vertices[si], sys.state_vertices[sj]).unwrap();
        let base = chsh_value(&w, &m[0], &m[1], &m[2], &m[3]);

        let rm: Vec<Measurement> = m
            .iter()
            .map(|mm| Measurement { effect: rotate_z(mm.effect, theta) })
            .collect();
        let rw = {
            // W' = R W Rᵀ preserves every pairing (R a)ᵀ W' (R c) = aᵀ W c.
            let v = w.to_vec9();
            let col = |j: usize| Vec3::new(v[j], v[3 + j], v[6 + j]);
            let cols: Vec<Vec3> = (0..3).map(|j| rotate_z(col(j), theta)).collect();
            // rows of R W are now columns; apply R on the right via rows.
            let row = |i: usize| Vec3::new(cols[0].to_array()[i], cols[1].to_array()[i], cols[2].to_array()[i]);
            let rows: Vec<Vec3> = (0..3).map(|i| rotate_z(row(i), theta)).collect();
            let mut out = [0.0f64; 9];
            for i in 0..3 {
                let r = rows[i].to_array();
                out[3 * i..3 * i + 3].copy_from_slice(&r);
            }
            BipartiteState::from_vec9(&out)
        };
        let rotated = chsh_value(&rw, &rm[0], &rm[1], &rm[2], &rm[3]);
        prop_assert!((base - rotated).abs() < 1e-10, "{base} vs {rotated}");
    }

    /// Wiring-assembled distributions never signal.
    #[test]
    fn wiring_distributions_no_signaling(wi in 0usize..4096, ai in 0usize..64, ci in 0usize..64, boxes in 0u8..4) {
        let pr = NoSignalingBox::pr();
        let cl = NoSignalingBox::classical_shared_bit();
        let pick = |b: bool| if b { &pr } else { &cl };
        let d = wiring_distribution(
            &enumerate_wirings()[wi],
            pick(boxes & 1 == 0),
            pick(boxes & 2 == 0),
            &enumerate_responses()[ai],
            &enumerate_responses()[ci],
        );
        prop_assert!(d.validate().is_ok());
    }
}

/// The extreme-point measurement enumeration is sound: no 4-tuple of valid
/// measurements sampled from the full effect polytope beats `chsh_max`.
#[test]
fn outer_enumeration_soundness() {
    let (family, scheme, options) = selected_configuration();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0123_4567_89ab);
    for n in [5usize, 6] {
        let sys = build_polygon_system(n, family, scheme).unwrap();
        let best = chsh_max(&sys, &sys, TensorKind::Maximal, options).unwrap().value;
        let polytope = maximal_tensor_constraints(&sys, &sys, options.marginal_constraints);
        let vertices: Vec<[f64; 9]> = polytope
            .enumerate_vertices()
            .unwrap()
            .iter()
            .map(|v| v.to_vec9())
            .collect();
        // Extreme points of the effect polytope [0, u]: 0, u, e_i, u − e_i.
        let mut extremes = vec![polygpt::geometry::ZERO, UNIT];
        for &e in &sys.effect_vertices {
            extremes.push(e);
            extremes.push(UNIT - e);
        }
        let sample_effect = |rng: &mut ChaCha8Rng| {
            let mut weights: Vec<f64> = (0..extremes.len()).map(|_| rng.gen::<f64>()).collect();
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
            let mut e = polygpt::geometry::ZERO;
            for (w, &x) in weights.iter().zip(&extremes) {
                e = e + x.scale(*w);
            }
            e
        };
        for _ in 0..250 {
            let tuple: Vec<Vec3> = (0..4).map(|_| sample_effect(&mut rng)).collect();
            for &e in &tuple {
                Measurement::new(e, &sys).unwrap();
            }
            let g = polygpt::chsh::score_objective(tuple[0], tuple[1], tuple[2], tuple[3]);
            let value = vertices
                .iter()
                .map(|w| g.iter().zip(w).map(|(x, y)| x * y).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(
                value <= best + 1e-8,
                "n={n}: sampled interior tuple scores {value} > chsh_max {best}"
            );
        }
    }
}

/// LP certificates on a seeded batch of random degenerate-prone programs
/// (complements the acceptance criterion with a different generator).
#[test]
fn lp_certificates_on_seeded_batch() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut seen_optimal = false;
    for _ in 0..300 {
        let vars = rng.gen_range(2..5);
        let mut prog = if rng.gen_bool(0.5) {
            lp::LinearProgram::maximize((0..vars).map(|_| rng.gen_range(-1.0..1.0)).collect())
        } else {
            lp::LinearProgram::minimize((0..vars).map(|_| rng.gen_range(-1.0..1.0)).collect())
        }
        .with_all_nonneg();
        for _ in 0..rng.gen_range(2..6) {
            let coeffs: Vec<f64> = (0..vars)
                .map(|_| f64::from(rng.gen_range(-2i32..3)))
                .collect();
            let relation = match rng.gen_range(0..3) {
                0 => lp::Relation::Le,
                1 => lp::Relation::Ge,
                _ => lp::Relation::Eq,
            };
            prog.push_constraint(coeffs, relation, f64::from(rng.gen_range(-2i32..3)));
        }
        let sol = lp::solve(&prog).unwrap();
        if sol.status == lp::LpStatus::Optimal {
            seen_optimal = true;
            assert!(lp::primal_residual(&prog, &sol.primal) <= 1e-6);
            assert!(sol.duality_gap <= 1e-6);
        }
    }
    assert!(seen_optimal);
}

/// The minimal tensor product never exceeds the maximal one.
#[test]
fn minimal_below_maximal_selected() {
    let (family, scheme, options) = selected_configuration();
    for n in 3..=8usize {
        let sys = build_polygon_system(n, family, scheme).unwrap();
        let minimal = chsh_max(&sys, &sys, TensorKind::Minimal, options).unwrap().value;
        let maximal = chsh_max(&sys, &sys, TensorKind::Maximal, options).unwrap().value;
        assert!(minimal <= maximal + 1e-8, "n={n}: {minimal} > {maximal}");
    }
}

/// Odd polygons are exactly self-dual through n = 29; even unit-radius
/// systems are GPT-self-dual by construction (effect cone = state cone).
#[test]
fn self_duality_profile() {
    for n in (3..=29usize).step_by(2) {
        let sys = build_polygon_system(n, Family::SelfDual, Scheme::UnitRadius).unwrap();
        assert!(sys.state_cone().is_self_dual().unwrap(), "n={n}");
    }
    for n in [4usize, 6, 8, 10] {
        let sys = build_polygon_system(n, Family::SelfDual, Scheme::UnitRadius).unwrap();
        let effect_rays: Vec<Vec3> = sys.effect_vertices.clone();
        let state_rays: Vec<Vec3> = sys.state_vertices.clone();
        assert!(
            polygpt::geometry::same_ray_set(&effect_rays, &state_rays),
            "n={n}: unit-radius effects must span the state cone"
        );
    }
}
