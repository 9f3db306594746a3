//! The acceptance suite: nine numbered criteria covering the classical,
//! quantum, and box-world analyses. Shared by the `verify` CLI subcommand and
//! the integration test suite; each criterion produces one pass/fail report.

use rayon::prelude::*;
use serde::Serialize;

use crate::chsh::{
    self, chsh_max, measurement_candidates, score_objective, selected_configuration, ChshOptions,
    SweepRow,
};
use crate::game::{
    classical_max, conditioned_locality_check, enumerate_wirings, ClassicalStrategy,
    NoSignalingBox,
};
use crate::geometry::{build_polygon_system, Family, Scheme};
use crate::lp::{self, LinearProgram, LpStatus, Relation, Sense};
use crate::quantum::{quantum_game_strategy, StrategyAngles};
use crate::tensor::{maximal_tensor_constraints, TensorKind};
use crate::{quantum_value, Result};

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub wall_time_ms: u128,
}

impl CriterionReport {
    /// The canonical one-line rendering, `PASS`/`FAIL` first.
    pub fn line(&self) -> String {
        format!(
            "{} criterion {}: {} — {} ({} ms)",
            if self.passed { "PASS" } else { "FAIL" },
            self.index,
            self.name,
            self.detail,
            self.wall_time_ms
        )
    }
}

/// Run all nine criteria in order. Criteria 5–7 share a single sweep of the
/// selected configuration over n = 3..=30.
pub fn run_all() -> Vec<CriterionReport> {
    fn record(
        reports: &mut Vec<CriterionReport>,
        index: usize,
        name: &'static str,
        out: Result<(bool, String)>,
        wall_time_ms: u128,
    ) {
        let (passed, detail) = match out {
            Ok(x) => x,
            Err(e) => (false, format!("error: {e}")),
        };
        reports.push(CriterionReport {
            index,
            name,
            passed,
            detail,
            wall_time_ms,
        });
    }

    let mut reports = Vec::with_capacity(9);
    macro_rules! timed {
        ($idx:expr, $name:expr, $body:expr) => {{
            let t = std::time::Instant::now();
            let out = $body;
            record(&mut reports, $idx, $name, out, t.elapsed().as_millis());
        }};
    }

    timed!(1, "classical adaptive game maximum", criterion_classical());
    timed!(2, "quantum strategy value", criterion_quantum());
    timed!(3, "box-world wirings", criterion_wirings());
    timed!(4, "gbit CHSH reaches 1", criterion_gbit_chsh());

    let t = std::time::Instant::now();
    let sweep = {
        let (family, scheme, options) = selected_configuration();
        chsh::sweep(family, scheme, 3, 30, TensorKind::Maximal, options)
    };
    let sweep_ms = t.elapsed().as_millis();
    match &sweep {
        Ok(rows) => {
            timed!(5, "mod-8 anchors of the selected scheme", {
                criterion_anchors(rows)
            });
            timed!(6, "all sweep values below the quantum bound", {
                criterion_bound(rows)
            });
            timed!(7, "convergence within residue classes", {
                criterion_convergence(rows)
            });
            // Attribute the shared sweep cost to criterion 5's report.
            if let Some(r) = reports.iter_mut().find(|r| r.index == 5) {
                r.wall_time_ms += sweep_ms;
            }
        }
        Err(e) => {
            for (index, name) in [
                (5, "mod-8 anchors of the selected scheme"),
                (6, "all sweep values below the quantum bound"),
                (7, "convergence within residue classes"),
            ] {
                record(
                    &mut reports,
                    index,
                    name,
                    Err(crate::Error::Subproblem {
                        context: "selected-configuration sweep".into(),
                        source: Box::new(crate::Error::Solver(e.to_string())),
                    }),
                    sweep_ms,
                );
            }
        }
    }

    timed!(8, "oracle equivalences", criterion_oracles());
    timed!(9, "invariant suites", criterion_invariants());
    reports
}

/// True iff every criterion passed.
pub fn all_passed(reports: &[CriterionReport]) -> bool {
    reports.len() == 9 && reports.iter().all(|r| r.passed)
}

fn criterion_classical() -> Result<(bool, String)> {
    let r = classical_max();
    let exact = r.value == 0.75;
    Ok((
        exact && r.optimal_count > 0,
        format!(
            "64-strategy enumeration gives {} with {} optima",
            r.value, r.optimal_count
        ),
    ))
}

fn criterion_quantum() -> Result<(bool, String)> {
    let r = quantum_game_strategy(StrategyAngles::optimal())?;
    let gap = (r.value - quantum_value()).abs();
    Ok((
        gap <= 1e-9,
        format!("entanglement-swapping strategy wins {:.12}, |Δ| = {gap:.1e}", r.value),
    ))
}

fn criterion_wirings() -> Result<(bool, String)> {
    let pr = NoSignalingBox::pr();
    let w = crate::game::wiring_max(&pr, &pr)?;
    if (w.value - 0.75).abs() > 1e-12 {
        return Ok((false, format!("wiring maximum {} ≠ 3/4", w.value)));
    }
    // Locality of the conditioned A–C box for every deterministic wiring.
    let wirings = enumerate_wirings();
    let nonlocal: usize = wirings
        .par_iter()
        .map(|wiring| match conditioned_locality_check(wiring, &pr, &pr) {
            Ok(true) => 0usize,
            _ => 1usize,
        })
        .sum();
    Ok((
        nonlocal == 0,
        format!(
            "wiring maximum {} over {} wirings; {} conditioned distributions nonlocal",
            w.value,
            wirings.len(),
            nonlocal
        ),
    ))
}

fn criterion_gbit_chsh() -> Result<(bool, String)> {
    let sys = build_polygon_system(4, Family::Unrestricted, Scheme::UnitRadius)?;
    let r = chsh_max(&sys, &sys, TensorKind::Maximal, ChshOptions::default())?;
    let gap = (r.value - 1.0).abs();
    Ok((
        gap <= 1e-8,
        format!("two unrestricted gbits reach {:.12}, |Δ| = {gap:.1e}", r.value),
    ))
}

fn criterion_anchors(rows: &[SweepRow]) -> Result<(bool, String)> {
    let q = quantum_value();
    let mut worst_anchor = 0.0f64;
    let mut min_off_gap = f64::INFINITY;
    for row in rows {
        let gap = q - row.p_win;
        if row.n % 8 == 0 {
            worst_anchor = worst_anchor.max(gap.abs());
        } else {
            min_off_gap = min_off_gap.min(gap);
        }
    }
    let pass = worst_anchor <= 1e-6 && min_off_gap >= 1e-4;
    Ok((
        pass,
        format!(
            "n ≡ 0 (mod 8) within {worst_anchor:.1e} of the quantum value; \
             smallest gap elsewhere {min_off_gap:.3e}"
        ),
    ))
}

fn criterion_bound(rows: &[SweepRow]) -> Result<(bool, String)> {
    let q = quantum_value();
    let worst = rows
        .iter()
        .map(|r| r.p_win - q)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((
        worst <= 1e-6,
        format!("largest excess over the quantum value {worst:+.1e}"),
    ))
}

fn criterion_convergence(rows: &[SweepRow]) -> Result<(bool, String)> {
    let q = quantum_value();
    let mut pass = true;
    let mut notes = Vec::new();
    for class in 0..8usize {
        let vals: Vec<f64> = rows
            .iter()
            .filter(|r| r.n % 8 == class)
            .map(|r| r.p_win)
            .collect();
        if vals.len() < 2 {
            continue;
        }
        let monotone = vals.windows(2).all(|w| w[1] >= w[0] - 1e-9);
        let first_gap = q - vals[0];
        let last_gap = q - vals[vals.len() - 1];
        // Classes already at the quantum value have nothing left to close.
        let closes = first_gap <= 1e-6 || last_gap < first_gap - 1e-9;
        if !(monotone && closes) {
            pass = false;
            notes.push(format!(
                "class {class}: monotone={monotone}, gap {first_gap:.2e} → {last_gap:.2e}"
            ));
        }
    }
    let detail = if notes.is_empty() {
        "every residue class is nondecreasing and closes its gap".into()
    } else {
        notes.join("; ")
    };
    Ok((pass, detail))
}

fn criterion_oracles() -> Result<(bool, String)> {
    let (family, scheme, options) = selected_configuration();
    let mut failures = Vec::new();

    // (a) LP value vs exhaustive vertex enumeration, n ∈ {3,4,5,6}.
    for n in 3..=6usize {
        let sys = build_polygon_system(n, family, scheme)?;
        let lp_value = chsh_max(&sys, &sys, TensorKind::Maximal, options)?.value;
        let polytope =
            maximal_tensor_constraints(&sys, &sys, options.marginal_constraints);
        let vertices = polytope.enumerate_vertices()?;
        let flat: Vec<[f64; 9]> = vertices.iter().map(|v| v.to_vec9()).collect();
        let cands = measurement_candidates(&sys);
        let k = cands.len();
        let tuples: Vec<[usize; 4]> = (0..k * k * k * k)
            .map(|t| [t / (k * k * k), (t / (k * k)) % k, (t / k) % k, t % k])
            .collect();
        let vertex_value = tuples
            .par_iter()
            .map(|&[a0, a1, c0, c1]| {
                let g = score_objective(cands[a0], cands[a1], cands[c0], cands[c1]);
                flat.iter()
                    .map(|w| g.iter().zip(w).map(|(x, y)| x * y).sum::<f64>())
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .reduce(|| f64::NEG_INFINITY, f64::max);
        if (lp_value - vertex_value).abs() > 1e-7 {
            failures.push(format!(
                "vertex oracle n={n}: LP {lp_value:.10} vs vertices {vertex_value:.10}"
            ));
        }
    }

    // (b) Symmetry-reduced vs full enumeration, n ≤ 8.
    for n in 3..=8usize {
        let sys = build_polygon_system(n, family, scheme)?;
        let sym = chsh_max(&sys, &sys, TensorKind::Maximal, options)?.value;
        let full = chsh_max(
            &sys,
            &sys,
            TensorKind::Maximal,
            ChshOptions {
                symmetry_reduction: false,
                ..options
            },
        )?
        .value;
        if (sym - full).abs() > 1e-10 {
            failures.push(format!("symmetry oracle n={n}: {sym:.12} vs {full:.12}"));
        }
    }

    // (c) Minimal tensor product stays classical for n ≤ 12.
    for n in 3..=12usize {
        let sys = build_polygon_system(n, family, scheme)?;
        let v = chsh_max(&sys, &sys, TensorKind::Minimal, options)?.value;
        if (v - 0.75).abs() > 1e-8 {
            failures.push(format!("minimal oracle n={n}: {v:.12} ≠ 3/4"));
        }
    }

    if failures.is_empty() {
        Ok((
            true,
            "vertex enumeration (n ≤ 6), full enumeration (n ≤ 8), and minimal \
             tensor (n ≤ 12) all agree"
                .into(),
        ))
    } else {
        Ok((false, failures.join("; ")))
    }
}

/// Deterministic 64-bit generator (SplitMix64) for the random-LP invariant.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [-1, 1).
    fn coeff(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 52) as f64 * 2.0 - 1.0
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}

fn criterion_invariants() -> Result<(bool, String)> {
    let mut failures = Vec::new();

    // Cone double-dual and effect validity across families and schemes.
    for n in 3..=12usize {
        for (family, scheme) in [
            (Family::Unrestricted, Scheme::UnitRadius),
            (Family::SelfDual, Scheme::UnitRadius),
            (Family::SelfDual, Scheme::Intersection),
            (Family::SelfDual, Scheme::RotatedPairing),
        ] {
            let sys = build_polygon_system(n, family, scheme)?;
            sys.validate()?;
            let cone = sys.state_cone();
            let dd = cone.dual()?.dual()?;
            if !crate::geometry::same_ray_set(cone.generators(), dd.generators()) {
                failures.push(format!(
                    "double dual n={n} {}/{}",
                    family.as_str(),
                    scheme.as_str()
                ));
            }
            for e in measurement_candidates(&sys) {
                for &omega in &sys.state_vertices {
                    let p = e.dot(omega);
                    if !(-1e-9..=1.0 + 1e-9).contains(&p) {
                        failures.push(format!(
                            "effect validity n={n} {}/{}: pairing {p}",
                            family.as_str(),
                            scheme.as_str()
                        ));
                    }
                }
            }
        }
    }

    // Odd-n systems are exactly self-dual up to n = 29.
    for n in (3..=29usize).step_by(2) {
        let sys = build_polygon_system(n, Family::SelfDual, Scheme::UnitRadius)?;
        if !sys.state_cone().is_self_dual()? {
            failures.push(format!("odd self-duality n={n}"));
        }
    }

    // No-signaling of assembled game distributions.
    let pr = NoSignalingBox::pr();
    let cl = NoSignalingBox::classical_shared_bit();
    let wirings = enumerate_wirings();
    let responses = crate::game::enumerate_responses();
    let mut rng = SplitMix64(0x5eed_0001);
    for _ in 0..200 {
        let w = &wirings[rng.below(wirings.len() as u64) as usize];
        let alice = &responses[rng.below(64) as usize];
        let charlie = &responses[rng.below(64) as usize];
        let boxes = [&pr, &cl];
        let d = crate::game::wiring_distribution(
            w,
            boxes[rng.below(2) as usize],
            boxes[rng.below(2) as usize],
            alice,
            charlie,
        );
        if d.validate().is_err() {
            failures.push("wiring distribution fails no-signaling".into());
            break;
        }
    }
    for bits in 0..64u32 {
        let s = ClassicalStrategy {
            a: [(bits & 1) as u8, ((bits >> 1) & 1) as u8],
            c: [((bits >> 2) & 1) as u8, ((bits >> 3) & 1) as u8],
            b: (((bits >> 4) & 1) as u8, ((bits >> 5) & 1) as u8),
        };
        if s.distribution().validate().is_err() {
            failures.push(format!("classical distribution {bits} fails validation"));
        }
    }

    // LP certificate soundness on 1000 random small programs.
    let mut rng = SplitMix64(0x5eed_1009);
    let mut statuses = [0usize; 3];
    for trial in 0..1000 {
        let vars = 2 + rng.below(4) as usize;
        let sense = if rng.below(2) == 0 {
            Sense::Maximize
        } else {
            Sense::Minimize
        };
        let objective: Vec<f64> = (0..vars).map(|_| rng.coeff() * 2.0).collect();
        let mut prog = LinearProgram::new(sense, objective.clone()).with_all_nonneg();
        let m = 2 + rng.below(5) as usize;
        for _ in 0..m {
            let coeffs: Vec<f64> = (0..vars).map(|_| rng.coeff() * 2.0).collect();
            let relation = match rng.below(4) {
                0 => Relation::Ge,
                1 => Relation::Eq,
                _ => Relation::Le,
            };
            prog.push_constraint(coeffs, relation, rng.coeff() * 2.0);
        }
        let sol = match lp::solve(&prog) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("random LP {trial}: solver error {e}"));
                continue;
            }
        };
        match sol.status {
            LpStatus::Optimal => {
                statuses[0] += 1;
                if lp::primal_residual(&prog, &sol.primal) > 1e-6 {
                    failures.push(format!("random LP {trial}: infeasible optimum"));
                }
                if sol.duality_gap > 1e-6 {
                    failures.push(format!(
                        "random LP {trial}: duality gap {}",
                        sol.duality_gap
                    ));
                }
            }
            LpStatus::Infeasible => {
                statuses[1] += 1;
                let Some(y) = &sol.certificate else {
                    failures.push(format!("random LP {trial}: missing Farkas certificate"));
                    continue;
                };
                let mut combo = vec![0.0; vars];
                let mut rhs = 0.0;
                let mut sign_ok = true;
                for (yi, con) in y.iter().zip(&prog.constraints) {
                    match con.relation {
                        Relation::Ge if *yi < -1e-9 => sign_ok = false,
                        Relation::Le if *yi > 1e-9 => sign_ok = false,
                        _ => {}
                    }
                    for (acc, a) in combo.iter_mut().zip(&con.coeffs) {
                        *acc += yi * a;
                    }
                    rhs += yi * con.rhs;
                }
                // With x ≥ 0, Σ y_i a_i ≤ 0 componentwise and Σ y_i b_i > 0
                // certifies infeasibility.
                let combo_ok = combo.iter().all(|&c| c <= 1e-7);
                if !(sign_ok && combo_ok && rhs > 1e-9) {
                    failures.push(format!("random LP {trial}: invalid Farkas certificate"));
                }
            }
            LpStatus::Unbounded => {
                statuses[2] += 1;
                let Some(d) = &sol.certificate else {
                    failures.push(format!("random LP {trial}: missing ray certificate"));
                    continue;
                };
                let improving = {
                    let g: f64 = objective.iter().zip(d).map(|(c, x)| c * x).sum();
                    match sense {
                        Sense::Maximize => g > 1e-9,
                        Sense::Minimize => g < -1e-9,
                    }
                };
                let mut feasible_dir = d.iter().all(|&x| x >= -1e-9);
                for con in &prog.constraints {
                    let adot: f64 = con.coeffs.iter().zip(d).map(|(a, x)| a * x).sum();
                    let ok = match con.relation {
                        Relation::Le => adot <= 1e-7,
                        Relation::Ge => adot >= -1e-7,
                        Relation::Eq => adot.abs() <= 1e-7,
                    };
                    feasible_dir &= ok;
                }
                if !(improving && feasible_dir) {
                    failures.push(format!("random LP {trial}: invalid unbounded ray"));
                }
            }
        }
    }
    if statuses.iter().any(|&s| s == 0) {
        failures.push(format!(
            "random LPs did not exercise all statuses: {statuses:?}"
        ));
    }

    if failures.is_empty() {
        Ok((
            true,
            format!(
                "cones, effects, self-duality, no-signaling, and 1000 random LPs \
                 (optimal/infeasible/unbounded = {}/{}/{}) all sound",
                statuses[0], statuses[1], statuses[2]
            ),
        ))
    } else {
        failures.truncate(5);
        Ok((false, failures.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_criteria_pass() {
        // The cheap criteria (1, 2, 4) run in well under a second each; the
        // full suite is exercised by the integration tests.
        assert!(criterion_classical().unwrap().0);
        assert!(criterion_quantum().unwrap().0);
        assert!(criterion_gbit_chsh().unwrap().0);
    }
}
