//! The adaptive CHSH game.
//!
//! Bob's two-bit choice `b` selects one of four relabeled CHSH games that
//! Alice and Charlie are playing without knowing `b`. This module provides the
//! winning predicate, winning-probability evaluation for arbitrary
//! conditional distributions, the classical brute force, the reduction of
//! each variant to the canonical CHSH game, box-world wiring strategies, and
//! conditioned-locality checks.

use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::PolygonSystem;
use crate::lp;
use crate::tensor::TensorKind;
use crate::{chsh, Error, Result, TAU_FEAS, TAU_GAP};

pub type Bit = u8;

/// One play of the game: referee questions, answers, and Bob's variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameRound {
    pub r_a: Bit,
    pub r_c: Bit,
    pub a: Bit,
    pub c: Bit,
    /// Bob's two-bit variant choice `(b1, b2)`.
    pub b: (Bit, Bit),
}

impl GameRound {
    fn validate(&self) -> Result<()> {
        let bits = [self.r_a, self.r_c, self.a, self.c, self.b.0, self.b.1];
        if bits.iter().any(|&x| x > 1) {
            return Err(Error::Domain("game round fields must be bits".into()));
        }
        Ok(())
    }
}

/// The winning condition `Q(a, b, c, r_A, r_C)`.
///
/// All four variants follow the single pattern
/// `((r_A ⊕ 1) · (r_C ⊕ b1 ⊕ b2)) ⊕ b2 = a ⊕ c`:
/// - `b = (0,0)`: `(r_A⊕1)·r_C = a⊕c`
/// - `b = (0,1)`: `(r_A⊕1)·(r_C⊕1) ⊕ 1 = a⊕c`
/// - `b = (1,0)`: `(r_A⊕1)·(r_C⊕1) = a⊕c`
/// - `b = (1,1)`: `(r_A⊕1)·r_C ⊕ 1 = a⊕c`
///
/// so that each variant is a relabeled copy of the CHSH condition
/// `r_A·r_C = a⊕c`, rows `(0,0)/(1,1)` and `(0,1)/(1,0)` forming
/// complementary pairs.
pub fn win_predicate(round: &GameRound) -> Result<Bit> {
    round.validate()?;
    Ok(win_bit(
        round.b.0, round.b.1, round.a, round.c, round.r_a, round.r_c,
    ))
}

#[inline]
pub(crate) fn win_bit(b1: Bit, b2: Bit, a: Bit, c: Bit, r_a: Bit, r_c: Bit) -> Bit {
    let lhs = ((r_a ^ 1) & (r_c ^ b1 ^ b2)) ^ b2;
    (lhs == (a ^ c)) as Bit
}

/// `P(a, b, c | r_A, r_C)`: four conditional distributions over the 16
/// outcomes, indexed `[r_A * 2 + r_C][a * 8 + b * 2 + c]` with
/// `b = b1 * 2 + b2`.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionalDistribution {
    pub p: [[f64; 16]; 4],
}

impl ConditionalDistribution {
    #[inline]
    pub fn get(&self, a: Bit, b: (Bit, Bit), c: Bit, r_a: Bit, r_c: Bit) -> f64 {
        self.p[(r_a * 2 + r_c) as usize][(a * 8 + (b.0 * 2 + b.1) * 2 + c) as usize]
    }

    /// Nonnegativity, normalization, and no-signaling to Alice and Charlie.
    pub fn validate(&self) -> Result<()> {
        for (q, cond) in self.p.iter().enumerate() {
            if cond.iter().any(|&x| x < -TAU_FEAS || !x.is_finite()) {
                return Err(Error::Domain(format!(
                    "negative or non-finite probability in conditional {q}"
                )));
            }
            let s: f64 = cond.iter().sum();
            if (s - 1.0).abs() > TAU_FEAS {
                return Err(Error::Domain(format!(
                    "conditional {q} sums to {s}, expected 1"
                )));
            }
        }
        // P(a | rA, rC) must not depend on rC; P(c | rA, rC) not on rA.
        for a in 0..2u8 {
            for r_a in 0..2u8 {
                let marg = |r_c: Bit| -> f64 {
                    let mut s = 0.0;
                    for b1 in 0..2 {
                        for b2 in 0..2 {
                            for c in 0..2 {
                                s += self.get(a, (b1, b2), c, r_a, r_c);
                            }
                        }
                    }
                    s
                };
                if (marg(0) - marg(1)).abs() > TAU_FEAS {
                    return Err(Error::Domain(format!(
                        "signaling to Alice: P(a={a}|r_A={r_a}, r_C) varies with r_C"
                    )));
                }
            }
        }
        for c in 0..2u8 {
            for r_c in 0..2u8 {
                let marg = |r_a: Bit| -> f64 {
                    let mut s = 0.0;
                    for b1 in 0..2 {
                        for b2 in 0..2 {
                            for a in 0..2 {
                                s += self.get(a, (b1, b2), c, r_a, r_c);
                            }
                        }
                    }
                    s
                };
                if (marg(0) - marg(1)).abs() > TAU_FEAS {
                    return Err(Error::Domain(format!(
                        "signaling to Charlie: P(c={c}|r_A, r_C={r_c}) varies with r_A"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `p_win = ¼ Σ_{r_A, r_C} Σ_{a,b,c} P(a,b,c | r_A,r_C) · Q(a,b,c,r_A,r_C)`.
pub fn win_probability(d: &ConditionalDistribution) -> Result<f64> {
    d.validate()?;
    let mut p = 0.0;
    for r_a in 0..2u8 {
        for r_c in 0..2u8 {
            for a in 0..2u8 {
                for b1 in 0..2u8 {
                    for b2 in 0..2u8 {
                        for c in 0..2u8 {
                            if win_bit(b1, b2, a, c, r_a, r_c) == 1 {
                                p += 0.25 * d.get(a, (b1, b2), c, r_a, r_c);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(p)
}

/// A deterministic classical strategy: `a = f(r_A)`, `c = g(r_C)`, constant
/// `b` (Bob has no inputs in the classical game).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassicalStrategy {
    /// `a` for `r_A = 0, 1`.
    pub a: [Bit; 2],
    /// `c` for `r_C = 0, 1`.
    pub c: [Bit; 2],
    pub b: (Bit, Bit),
}

impl ClassicalStrategy {
    pub fn distribution(&self) -> ConditionalDistribution {
        let mut p = [[0.0; 16]; 4];
        for r_a in 0..2usize {
            for r_c in 0..2usize {
                let a = self.a[r_a];
                let c = self.c[r_c];
                let b = self.b.0 * 2 + self.b.1;
                p[r_a * 2 + r_c][(a * 8 + b * 2 + c) as usize] = 1.0;
            }
        }
        ConditionalDistribution { p }
    }

    /// Number of question pairs won, out of 4 (exact integer arithmetic).
    fn wins(&self) -> u32 {
        let mut w = 0;
        for r_a in 0..2u8 {
            for r_c in 0..2u8 {
                w += win_bit(
                    self.b.0,
                    self.b.1,
                    self.a[r_a as usize],
                    self.c[r_c as usize],
                    r_a,
                    r_c,
                ) as u32;
            }
        }
        w
    }
}

/// Result of the classical brute force.
#[derive(Debug, Clone, Serialize)]
pub struct ClassicalMax {
    pub value: f64,
    /// Lexicographically first optimal strategy.
    pub argmax: ClassicalStrategy,
    /// Number of optimal deterministic strategies (out of 64).
    pub optimal_count: usize,
}

/// Exhaustive maximum over the 64 deterministic strategies. Shared randomness
/// cannot exceed the deterministic maximum (the objective is affine in the
/// strategy mixture).
pub fn classical_max() -> ClassicalMax {
    let mut best_wins = 0u32;
    let mut argmax = None;
    let mut count = 0usize;
    for bits in 0..64u32 {
        let s = ClassicalStrategy {
            a: [(bits & 1) as Bit, ((bits >> 1) & 1) as Bit],
            c: [((bits >> 2) & 1) as Bit, ((bits >> 3) & 1) as Bit],
            b: (((bits >> 4) & 1) as Bit, ((bits >> 5) & 1) as Bit),
        };
        let w = s.wins();
        if w > best_wins {
            best_wins = w;
            argmax = Some(s);
            count = 1;
        } else if w == best_wins {
            count += 1;
            if argmax.is_none() {
                argmax = Some(s);
            }
        }
    }
    ClassicalMax {
        value: f64::from(best_wins) / 4.0,
        argmax: argmax.expect("64 strategies enumerated"),
        optimal_count: count,
    }
}

/// Input/output flips reducing a variant's winning condition to the canonical
/// CHSH condition `r_A·r_C = a⊕c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Relabeling {
    pub flip_ra: Bit,
    pub flip_rc: Bit,
    pub flip_parity: Bit,
}

/// Find the flips with
/// `Q_b(a, c, r_A, r_C) ⟺ (r_A ⊕ flip_ra)·(r_C ⊕ flip_rc) = a ⊕ c ⊕ flip_parity`,
/// verified as an exact boolean identity over all 16 assignments.
pub fn variant_relabeling(b: (Bit, Bit)) -> Result<Relabeling> {
    if b.0 > 1 || b.1 > 1 {
        return Err(Error::Domain("variant bits must be 0/1".into()));
    }
    for flips in 0..8u8 {
        let r = Relabeling {
            flip_ra: flips & 1,
            flip_rc: (flips >> 1) & 1,
            flip_parity: (flips >> 2) & 1,
        };
        let ok = (0..16u8).all(|t| {
            let (a, c, r_a, r_c) = (t & 1, (t >> 1) & 1, (t >> 2) & 1, (t >> 3) & 1);
            let variant = win_bit(b.0, b.1, a, c, r_a, r_c) == 1;
            let canonical =
                ((r_a ^ r.flip_ra) & (r_c ^ r.flip_rc)) == (a ^ c ^ r.flip_parity);
            variant == canonical
        });
        if ok {
            return Ok(r);
        }
    }
    Err(Error::Domain(format!(
        "variant {b:?} admits no CHSH relabeling"
    )))
}

/// Upper bound on the adaptive game from the plain CHSH bound: the maximum
/// over the four variants of the relabeled `chshMax` between the A-side and
/// C-side systems. Since every variant is an exact relabeling of CHSH — and
/// the measurement-candidate set is closed under question swaps and outcome
/// complements — this equals the canonical `chshMax`.
///
/// The B-side systems never enter the bound: whatever joint measurement Bob
/// performs, the conditioned A–C state lies in the same tensor product.
pub fn adaptive_upper_bound(
    sys_a: &PolygonSystem,
    sys_c: &PolygonSystem,
    kind: TensorKind,
    options: chsh::ChshOptions,
) -> Result<f64> {
    for b1 in 0..2 {
        for b2 in 0..2 {
            variant_relabeling((b1, b2))?;
        }
    }
    Ok(chsh::chsh_max(sys_a, sys_c, kind, options)?.value)
}

/// A bipartite no-signaling box: `p[x][y][o_l][o_r] = P(o_l, o_r | x, y)`.
#[derive(Debug, Clone, Copy)]
pub struct NoSignalingBox {
    pub p: [[[[f64; 2]; 2]; 2]; 2],
}

impl NoSignalingBox {
    /// The PR box: `o_l ⊕ o_r = x·y`, uniform marginals.
    pub fn pr() -> Self {
        let mut p = [[[[0.0; 2]; 2]; 2]; 2];
        for x in 0..2 {
            for y in 0..2 {
                for ol in 0..2 {
                    for or in 0..2 {
                        if ol ^ or == x & y {
                            p[x][y][ol][or] = 0.5;
                        }
                    }
                }
            }
        }
        Self { p }
    }

    /// A shared uniformly random bit, output by both parties regardless of
    /// inputs.
    pub fn classical_shared_bit() -> Self {
        let mut p = [[[[0.0; 2]; 2]; 2]; 2];
        for x in 0..2 {
            for y in 0..2 {
                p[x][y][0][0] = 0.5;
                p[x][y][1][1] = 0.5;
            }
        }
        Self { p }
    }

    /// The deterministic local box `o_l = f(x)`, `o_r = g(y)`.
    pub fn local_deterministic(f: [Bit; 2], g: [Bit; 2]) -> Self {
        let mut p = [[[[0.0; 2]; 2]; 2]; 2];
        for x in 0..2 {
            for y in 0..2 {
                p[x][y][f[x] as usize][g[y] as usize] = 1.0;
            }
        }
        Self { p }
    }

    /// Nonnegativity, normalization, and two-way no-signaling.
    pub fn validate(&self) -> Result<()> {
        for x in 0..2 {
            for y in 0..2 {
                let mut s = 0.0;
                for ol in 0..2 {
                    for or in 0..2 {
                        let v = self.p[x][y][ol][or];
                        if v < -TAU_FEAS || !v.is_finite() {
                            return Err(Error::Domain("invalid box probability".into()));
                        }
                        s += v;
                    }
                }
                if (s - 1.0).abs() > TAU_FEAS {
                    return Err(Error::Domain(format!(
                        "box conditional ({x},{y}) sums to {s}"
                    )));
                }
            }
        }
        for x in 0..2 {
            for ol in 0..2 {
                let m = |y: usize| self.p[x][y][ol][0] + self.p[x][y][ol][1];
                if (m(0) - m(1)).abs() > TAU_FEAS {
                    return Err(Error::Domain("box signals left-to-right".into()));
                }
            }
        }
        for y in 0..2 {
            for or in 0..2 {
                let m = |x: usize| self.p[x][y][0][or] + self.p[x][y][1][or];
                if (m(0) - m(1)).abs() > TAU_FEAS {
                    return Err(Error::Domain("box signals right-to-left".into()));
                }
            }
        }
        Ok(())
    }
}

/// Bob's deterministic wiring of his two box halves: measure one half, feed a
/// function of its outcome into the other, output `b` as a function of both
/// outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Wiring {
    /// 0: the AB box is measured first; 1: the B'C box is measured first.
    pub order: Bit,
    /// Input to the first-measured box.
    pub x1: Bit,
    /// Second box input as a function of the first outcome.
    pub input_rule: [Bit; 2],
    /// `b = output_rule[o_first * 2 + o_second]` as `(b1, b2)`.
    pub output_rule: [(Bit, Bit); 4],
}

/// All 4096 deterministic wirings, in deterministic order.
pub fn enumerate_wirings() -> Vec<Wiring> {
    let mut out = Vec::with_capacity(4096);
    for order in 0..2u8 {
        for x1 in 0..2u8 {
            for ir in 0..4u8 {
                for orule in 0..256u32 {
                    let output_rule = std::array::from_fn(|k| {
                        let v = (orule >> (2 * k)) & 3;
                        (((v >> 1) & 1) as Bit, (v & 1) as Bit)
                    });
                    out.push(Wiring {
                        order,
                        x1,
                        input_rule: [ir & 1, (ir >> 1) & 1],
                        output_rule,
                    });
                }
            }
        }
    }
    out
}

/// Alice's (or Charlie's) deterministic response to her question and box
/// outcome: box input `x = input[r]`, answer `a = output[r][o]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResponseFunction {
    pub input: [Bit; 2],
    pub output: [[Bit; 2]; 2],
}

/// All 64 deterministic response functions, in deterministic order.
pub fn enumerate_responses() -> Vec<ResponseFunction> {
    let mut out = Vec::with_capacity(64);
    for bits in 0..64u32 {
        out.push(ResponseFunction {
            input: [(bits & 1) as Bit, ((bits >> 1) & 1) as Bit],
            output: [
                [((bits >> 2) & 1) as Bit, ((bits >> 3) & 1) as Bit],
                [((bits >> 4) & 1) as Bit, ((bits >> 5) & 1) as Bit],
            ],
        });
    }
    out
}

/// Joint distribution `T[x_A][x_C][o_A][b][o_C]` produced by a wiring of the
/// two boxes, before Alice's and Charlie's responses are applied.
fn wiring_table(
    wiring: &Wiring,
    box_ab: &NoSignalingBox,
    box_bc: &NoSignalingBox,
) -> [[[[[f64; 2]; 4]; 2]; 2]; 2] {
    let mut t = [[[[[0.0; 2]; 4]; 2]; 2]; 2];
    for xa in 0..2usize {
        for xc in 0..2usize {
            for oa in 0..2usize {
                for o1 in 0..2usize {
                    for o2 in 0..2usize {
                        for oc in 0..2usize {
                            // o1: Bob's outcome on the AB box; o2: on B'C.
                            let (first, second) = if wiring.order == 0 {
                                (o1, o2)
                            } else {
                                (o2, o1)
                            };
                            let x_first = wiring.x1 as usize;
                            let x_second = wiring.input_rule[first] as usize;
                            let (x_b_ab, x_b_bc) = if wiring.order == 0 {
                                (x_first, x_second)
                            } else {
                                (x_second, x_first)
                            };
                            let p = box_ab.p[xa][x_b_ab][oa][o1]
                                * box_bc.p[x_b_bc][xc][o2][oc];
                            if p != 0.0 {
                                let b = wiring.output_rule[first * 2 + second];
                                let bi = (b.0 * 2 + b.1) as usize;
                                t[xa][xc][oa][bi][oc] += p;
                            }
                        }
                    }
                }
            }
        }
    }
    t
}

/// Assemble the game distribution for a wiring strategy.
pub fn wiring_distribution(
    wiring: &Wiring,
    box_ab: &NoSignalingBox,
    box_bc: &NoSignalingBox,
    alice: &ResponseFunction,
    charlie: &ResponseFunction,
) -> ConditionalDistribution {
    let t = wiring_table(wiring, box_ab, box_bc);
    let mut p = [[0.0; 16]; 4];
    for r_a in 0..2usize {
        for r_c in 0..2usize {
            let xa = alice.input[r_a] as usize;
            let xc = charlie.input[r_c] as usize;
            for oa in 0..2usize {
                for b in 0..4usize {
                    for oc in 0..2usize {
                        let a = alice.output[r_a][oa] as usize;
                        let c = charlie.output[r_c][oc] as usize;
                        p[r_a * 2 + r_c][a * 8 + b * 2 + c] += t[xa][xc][oa][b][oc];
                    }
                }
            }
        }
    }
    ConditionalDistribution { p }
}

/// Result of the wiring brute force.
#[derive(Debug, Clone, Serialize)]
pub struct WiringMax {
    pub value: f64,
    pub argmax_wiring: Wiring,
    pub argmax_alice: ResponseFunction,
    pub argmax_charlie: ResponseFunction,
}

/// Exhaustive maximum of the winning probability over all deterministic
/// wirings of Bob and all deterministic response functions of Alice and
/// Charlie. Convex mixtures cannot beat the deterministic maximum (the
/// winning probability is affine in each party's strategy mixture).
pub fn wiring_max(box_ab: &NoSignalingBox, box_bc: &NoSignalingBox) -> Result<WiringMax> {
    box_ab.validate()?;
    box_bc.validate()?;
    let wirings = enumerate_wirings();
    let responses = enumerate_responses();
    // Precompute the win indicator Q[b][a][c][rA][rC].
    let mut q = [[[[[0.0f64; 2]; 2]; 2]; 2]; 4];
    for b in 0..4u8 {
        for a in 0..2u8 {
            for c in 0..2u8 {
                for r_a in 0..2u8 {
                    for r_c in 0..2u8 {
                        q[b as usize][a as usize][c as usize][r_a as usize][r_c as usize] =
                            f64::from(win_bit(b >> 1, b & 1, a, c, r_a, r_c));
                    }
                }
            }
        }
    }

    let per_wiring: Vec<(f64, usize, usize)> = wirings
        .par_iter()
        .map(|w| {
            let t = wiring_table(w, box_ab, box_bc);
            let mut best = (-1.0f64, 0usize, 0usize);
            for (ia, alice) in responses.iter().enumerate() {
                // Fold Alice in: u[rA][a][b][oC][xC].
                let mut u = [[[[[0.0f64; 2]; 2]; 4]; 2]; 2];
                for r_a in 0..2usize {
                    let xa = alice.input[r_a] as usize;
                    for oa in 0..2usize {
                        let a = alice.output[r_a][oa] as usize;
                        for b in 0..4usize {
                            for oc in 0..2usize {
                                for xc in 0..2usize {
                                    u[r_a][a][b][oc][xc] += t[xa][xc][oa][b][oc];
                                }
                            }
                        }
                    }
                }
                for (ic, charlie) in responses.iter().enumerate() {
                    let mut p = 0.0;
                    for r_a in 0..2usize {
                        for r_c in 0..2usize {
                            let xc = charlie.input[r_c] as usize;
                            for a in 0..2usize {
                                for b in 0..4usize {
                                    for oc in 0..2usize {
                                        let c = charlie.output[r_c][oc] as usize;
                                        p += u[r_a][a][b][oc][xc] * q[b][a][c][r_a][r_c];
                                    }
                                }
                            }
                        }
                    }
                    p *= 0.25;
                    if p > best.0 + 1e-12 {
                        best = (p, ia, ic);
                    }
                }
            }
            best
        })
        .collect();

    let mut best_value = -1.0f64;
    let mut best_idx = (0usize, 0usize, 0usize);
    for (iw, &(v, ia, ic)) in per_wiring.iter().enumerate() {
        if v > best_value + 1e-12 {
            best_value = v;
            best_idx = (iw, ia, ic);
        }
    }
    Ok(WiringMax {
        value: best_value,
        argmax_wiring: wirings[best_idx.0],
        argmax_alice: responses[best_idx.1],
        argmax_charlie: responses[best_idx.2],
    })
}

/// The 16 local deterministic vertices of the bipartite binary correlation
/// polytope, as vectors `P(o_A, o_C | x_A, x_C)` indexed
/// `((x_A*2 + x_C)*2 + o_A)*2 + o_C`.
pub fn local_polytope_vertices() -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(16);
    for bits in 0..16u32 {
        let f = [(bits & 1) as usize, ((bits >> 1) & 1) as usize];
        let g = [((bits >> 2) & 1) as usize, ((bits >> 3) & 1) as usize];
        let mut v = vec![0.0; 16];
        for x in 0..2 {
            for y in 0..2 {
                v[((x * 2 + y) * 2 + f[x]) * 2 + g[y]] = 1.0;
            }
        }
        out.push(v);
    }
    out
}

/// For every value of `b` with positive probability, check that the
/// conditioned A–C box outcome distribution lies in the local polytope.
pub fn conditioned_locality_check(
    wiring: &Wiring,
    box_ab: &NoSignalingBox,
    box_bc: &NoSignalingBox,
) -> Result<bool> {
    box_ab.validate()?;
    box_bc.validate()?;
    let t = wiring_table(wiring, box_ab, box_bc);
    let vertices = local_polytope_vertices();
    for b in 0..4usize {
        // P(b) is input-independent (no-signaling); take it from (0, 0).
        let pb: f64 = (0..2)
            .flat_map(|oa| (0..2).map(move |oc| t[0][0][oa][b][oc]))
            .sum();
        if pb <= TAU_GAP {
            continue;
        }
        let mut conditioned = vec![0.0; 16];
        for xa in 0..2 {
            for xc in 0..2 {
                let pb_here: f64 = (0..2)
                    .flat_map(|oa| (0..2).map(move |oc| t[xa][xc][oa][b][oc]))
                    .sum();
                if (pb_here - pb).abs() > TAU_FEAS {
                    return Err(Error::Domain(
                        "wiring output b signals the inputs; boxes invalid".into(),
                    ));
                }
                for oa in 0..2 {
                    for oc in 0..2 {
                        conditioned[((xa * 2 + xc) * 2 + oa) * 2 + oc] =
                            t[xa][xc][oa][b][oc] / pb;
                    }
                }
            }
        }
        if !lp::hull_membership(&vertices, &conditioned)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chsh::ChshOptions;
    use crate::geometry::{build_polygon_system, Family, Scheme};
    use crate::quantum_value;

    #[test]
    fn win_predicate_pinned_rows() {
        // Pinned example rows of the winning condition.
        let q = |b: (Bit, Bit), a, c, r_a, r_c| {
            win_predicate(&GameRound { r_a, r_c, a, c, b }).unwrap()
        };
        assert_eq!(q((0, 0), 0, 0, 0, 1), 0); // LHS 1 != 0
        assert_eq!(q((1, 1), 1, 0, 0, 0), 1);
        assert_eq!(q((0, 1), 0, 1, 1, 1), 1);
    }

    #[test]
    fn win_predicate_pattern_consistency() {
        // Complementary pairs: (0,0)/(1,1) and (0,1)/(1,0) are negations.
        for t in 0..16u8 {
            let (a, c, r_a, r_c) = (t & 1, (t >> 1) & 1, (t >> 2) & 1, (t >> 3) & 1);
            assert_ne!(
                win_bit(0, 0, a, c, r_a, r_c),
                win_bit(1, 1, a, c, r_a, r_c)
            );
            assert_ne!(
                win_bit(0, 1, a, c, r_a, r_c),
                win_bit(1, 0, a, c, r_a, r_c)
            );
        }
    }

    #[test]
    fn rejects_non_bits() {
        let round = GameRound {
            r_a: 2,
            r_c: 0,
            a: 0,
            c: 0,
            b: (0, 0),
        };
        assert!(win_predicate(&round).is_err());
    }

    #[test]
    fn classical_max_is_three_quarters() {
        let r = classical_max();
        assert_eq!(r.value, 0.75, "exact by integer arithmetic");
        assert_eq!(r.optimal_count, 32);
        // a = c = 0 with b = (0,0) is among the optima.
        let s = ClassicalStrategy {
            a: [0, 0],
            c: [0, 0],
            b: (0, 0),
        };
        assert_eq!(s.wins(), 3);
        assert!((win_probability(&s.distribution()).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn uniform_answer_wins_half() {
        // Alice uniformly random and independent: every condition met with
        // probability 1/2.
        let mut p = [[0.0; 16]; 4];
        for q in 0..4 {
            for a in 0..2usize {
                // c = 0, b = (0,0) deterministic; a uniform.
                p[q][a * 8] = 0.5;
            }
        }
        let d = ConditionalDistribution { p };
        assert!((win_probability(&d).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn validates_signaling_distributions() {
        // a = rC: signals to Alice.
        let mut p = [[0.0; 16]; 4];
        for r_a in 0..2usize {
            for r_c in 0..2usize {
                p[r_a * 2 + r_c][r_c * 8] = 1.0;
            }
        }
        assert!(ConditionalDistribution { p }.validate().is_err());
    }

    #[test]
    fn variant_relabelings_pinned() {
        assert_eq!(
            variant_relabeling((0, 0)).unwrap(),
            Relabeling {
                flip_ra: 1,
                flip_rc: 0,
                flip_parity: 0
            }
        );
        assert_eq!(
            variant_relabeling((0, 1)).unwrap(),
            Relabeling {
                flip_ra: 1,
                flip_rc: 1,
                flip_parity: 1
            }
        );
        for b1 in 0..2 {
            for b2 in 0..2 {
                variant_relabeling((b1, b2)).expect("every variant reduces to CHSH");
            }
        }
    }

    #[test]
    fn adaptive_bound_equals_chsh_max() {
        let sys = build_polygon_system(3, Family::SelfDual, Scheme::UnitRadius).unwrap();
        let bound =
            adaptive_upper_bound(&sys, &sys, TensorKind::Maximal, ChshOptions::default())
                .unwrap();
        assert!((bound - 0.75).abs() < 1e-8, "triangles are classical");
        let gbit = build_polygon_system(4, Family::Unrestricted, Scheme::UnitRadius).unwrap();
        let bound =
            adaptive_upper_bound(&gbit, &gbit, TensorKind::Maximal, ChshOptions::default())
                .unwrap();
        assert!((bound - 1.0).abs() < 1e-8, "gbit bound is 1");
    }

    #[test]
    fn boxes_validate() {
        NoSignalingBox::pr().validate().unwrap();
        NoSignalingBox::classical_shared_bit().validate().unwrap();
        NoSignalingBox::local_deterministic([0, 1], [1, 0])
            .validate()
            .unwrap();
        let mut bad = NoSignalingBox::pr();
        bad.p[0][0][0][0] = 0.9; // breaks normalization
        assert!(bad.validate().is_err());
    }

    #[test]
    fn wiring_enumeration_sizes() {
        assert_eq!(enumerate_wirings().len(), 4096);
        assert_eq!(enumerate_responses().len(), 64);
    }

    #[test]
    fn pr_wirings_cannot_beat_classical() {
        let pr = NoSignalingBox::pr();
        let r = wiring_max(&pr, &pr).unwrap();
        assert!(
            (r.value - 0.75).abs() < 1e-12,
            "PR ⊗ PR wiring max is 3/4, got {}",
            r.value
        );
    }

    #[test]
    fn classical_boxes_reach_classical_value() {
        let cl = NoSignalingBox::classical_shared_bit();
        let r = wiring_max(&cl, &cl).unwrap();
        assert!((r.value - 0.75).abs() < 1e-12, "got {}", r.value);
        let pr = NoSignalingBox::pr();
        let r = wiring_max(&pr, &cl).unwrap();
        assert!((r.value - 0.75).abs() < 1e-12, "got {}", r.value);
    }

    #[test]
    fn wiring_distributions_are_valid() {
        let pr = NoSignalingBox::pr();
        let w = enumerate_wirings()[137];
        let alice = enumerate_responses()[9];
        let charlie = enumerate_responses()[41];
        let d = wiring_distribution(&w, &pr, &pr, &alice, &charlie);
        d.validate().unwrap();
        let p = win_probability(&d).unwrap();
        assert!((0.0..=0.75 + TAU_GAP).contains(&p));
    }

    #[test]
    fn canonical_wirings_leave_ac_local() {
        let pr = NoSignalingBox::pr();
        // The 8 canonical wirings: both orders, both first inputs, identity
        // or negation input rule, b = outcomes verbatim.
        for order in 0..2u8 {
            for x1 in 0..2u8 {
                for neg in 0..2u8 {
                    let w = Wiring {
                        order,
                        x1,
                        input_rule: [neg, 1 ^ neg],
                        output_rule: [(0, 0), (0, 1), (1, 0), (1, 1)],
                    };
                    assert!(conditioned_locality_check(&w, &pr, &pr).unwrap());
                }
            }
        }
        let cl = NoSignalingBox::classical_shared_bit();
        let w = enumerate_wirings()[0];
        assert!(conditioned_locality_check(&w, &cl, &cl).unwrap());
    }

    #[test]
    fn pr_correlation_itself_is_nonlocal() {
        // A synthetic "wiring" that outputs the PR correlation directly must
        // fail the membership test the checker uses.
        let pr = NoSignalingBox::pr();
        let mut flat = vec![0.0; 16];
        for xa in 0..2 {
            for xc in 0..2 {
                for oa in 0..2 {
                    for oc in 0..2 {
                        flat[((xa * 2 + xc) * 2 + oa) * 2 + oc] = pr.p[xa][xc][oa][oc];
                    }
                }
            }
        }
        assert!(!lp::hull_membership(&local_polytope_vertices(), &flat).unwrap());
    }

    #[test]
    fn quantum_value_dominates_wirings() {
        let pr = NoSignalingBox::pr();
        let r = wiring_max(&pr, &pr).unwrap();
        assert!(r.value < quantum_value());
    }
}
