//! Bipartite state spaces under the minimal and maximal tensor products.
//!
//! A bipartite state is a 3×3 matrix `W`; the probability of the local effect
//! pair `(a, c)` is the bilinear pairing `aᵀ W c`. The maximal tensor product
//! is an H-representation (linear inequalities on the 9 entries of `W`); the
//! minimal tensor product is a V-representation (products of extremal states).
//! Vertex enumeration of the maximal polytope uses the double-description
//! method over the cone of unnormalized states.

use serde::Serialize;

use crate::geometry::{PolygonSystem, Vec3, UNIT};
use crate::{Error, Result, TAU_FEAS, TAU_GEOM};

/// A bipartite state. Probabilities arise as `pairing(a, c) = aᵀ W c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BipartiteState {
    /// Row index pairs with the left (A) system, column with the right (C).
    pub w: [[f64; 3]; 3],
}

impl BipartiteState {
    pub fn from_vec9(v: &[f64; 9]) -> Self {
        let mut w = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                w[i][j] = v[3 * i + j];
            }
        }
        Self { w }
    }

    pub fn to_vec9(&self) -> [f64; 9] {
        let mut v = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                v[3 * i + j] = self.w[i][j];
            }
        }
        v
    }

    /// `aᵀ W c`: the probability of observing effects `a` (left) and `c`
    /// (right) jointly.
    pub fn pairing(&self, a: Vec3, c: Vec3) -> f64 {
        let av = a.to_array();
        let cv = c.to_array();
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += av[i] * self.w[i][j] * cv[j];
            }
        }
        s
    }

    /// Left marginal state `W u`.
    pub fn marginal_left(&self) -> Vec3 {
        self.apply_right(UNIT)
    }

    /// Right marginal state `Wᵀ u`.
    pub fn marginal_right(&self) -> Vec3 {
        self.apply_left(UNIT)
    }

    /// Subnormalized conditional on the left given effect `c` on the right.
    pub fn apply_right(&self, c: Vec3) -> Vec3 {
        let cv = c.to_array();
        Vec3::new(
            self.w[0][0] * cv[0] + self.w[0][1] * cv[1] + self.w[0][2] * cv[2],
            self.w[1][0] * cv[0] + self.w[1][1] * cv[1] + self.w[1][2] * cv[2],
            self.w[2][0] * cv[0] + self.w[2][1] * cv[1] + self.w[2][2] * cv[2],
        )
    }

    /// Subnormalized conditional on the right given effect `a` on the left.
    pub fn apply_left(&self, a: Vec3) -> Vec3 {
        let av = a.to_array();
        Vec3::new(
            self.w[0][0] * av[0] + self.w[1][0] * av[1] + self.w[2][0] * av[2],
            self.w[0][1] * av[0] + self.w[1][1] * av[1] + self.w[2][1] * av[2],
            self.w[0][2] * av[0] + self.w[1][2] * av[1] + self.w[2][2] * av[2],
        )
    }
}

/// Which side of the bipartite state an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `W = ωA ωCᵀ`: the separable state preparing `ωA` and `ωC` independently.
pub fn product_state(omega_a: Vec3, omega_c: Vec3) -> Result<BipartiteState> {
    for (name, w) in [("left", omega_a), ("right", omega_c)] {
        if (UNIT.dot(w) - 1.0).abs() > TAU_GEOM {
            return Err(Error::Domain(format!("{name} input state not normalized")));
        }
    }
    let a = omega_a.to_array();
    let c = omega_c.to_array();
    let mut w = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            w[i][j] = a[i] * c[j];
        }
    }
    Ok(BipartiteState { w })
}

/// Normalized conditional state on the opposite side, with the outcome
/// probability. Returns `(None, 0)` when the conditioning probability
/// vanishes (conditional undefined).
pub fn conditional_state(
    w: &BipartiteState,
    effect: Vec3,
    side: Side,
) -> Result<(Option<Vec3>, f64)> {
    if !effect.is_finite() {
        return Err(Error::Domain("non-finite effect".into()));
    }
    let sub = match side {
        Side::Right => w.apply_right(effect),
        Side::Left => w.apply_left(effect),
    };
    let p = UNIT.dot(sub);
    if p.abs() <= TAU_FEAS {
        return Ok((None, 0.0));
    }
    Ok((Some(sub.scale(1.0 / p)), p))
}

/// Tensor-product choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TensorKind {
    Minimal,
    Maximal,
}

impl TensorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TensorKind::Minimal => "minimal",
            TensorKind::Maximal => "maximal",
        }
    }
}

impl std::str::FromStr for TensorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minimal" => Ok(TensorKind::Minimal),
            "maximal" => Ok(TensorKind::Maximal),
            other => Err(Error::Config(format!("unknown tensor kind '{other}'"))),
        }
    }
}

/// The bipartite state space of two polygon systems, LP-ready.
#[derive(Debug, Clone)]
pub struct TensorPolytope {
    pub sys_a: PolygonSystem,
    pub sys_b: PolygonSystem,
    pub kind: TensorKind,
    /// Whether marginal cone-membership rows are included (maximal only).
    pub marginal_constraints: bool,
    /// Inequality rows `k · vec(W) >= 0` (maximal only).
    pub rows: Vec<[f64; 9]>,
    /// Normalization functional: `normalization · vec(W) = 1`.
    pub normalization: [f64; 9],
    /// All products of extremal states (minimal only).
    pub vertex_list: Vec<BipartiteState>,
}

fn outer9(a: Vec3, c: Vec3) -> [f64; 9] {
    let av = a.to_array();
    let cv = c.to_array();
    let mut r = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            r[3 * i + j] = av[i] * cv[j];
        }
    }
    r
}

/// H-representation of the maximal tensor product: positivity on every pair
/// of extremal effects (with `u` paired in on each side), plus — when
/// `marginals` is set — cone membership of every conditional state.
pub fn maximal_tensor_constraints(
    sys_a: &PolygonSystem,
    sys_b: &PolygonSystem,
    marginals: bool,
) -> TensorPolytope {
    let mut rows = Vec::new();
    let left_effects: Vec<Vec3> = sys_a
        .effect_vertices
        .iter()
        .cloned()
        .chain(std::iter::once(UNIT))
        .collect();
    let right_effects: Vec<Vec3> = sys_b
        .effect_vertices
        .iter()
        .cloned()
        .chain(std::iter::once(UNIT))
        .collect();
    for a in &left_effects {
        for c in &right_effects {
            rows.push(outer9(*a, *c));
        }
    }
    if marginals {
        // Conditionals W c must lie in the left state cone, and symmetrically.
        for c in &right_effects {
            for f in sys_a.state_facets() {
                rows.push(outer9(*f, *c));
            }
        }
        for a in &left_effects {
            for f in sys_b.state_facets() {
                rows.push(outer9(*a, *f));
            }
        }
    }
    TensorPolytope {
        sys_a: sys_a.clone(),
        sys_b: sys_b.clone(),
        kind: TensorKind::Maximal,
        marginal_constraints: marginals,
        rows,
        normalization: outer9(UNIT, UNIT),
        vertex_list: Vec::new(),
    }
}

/// V-representation of the minimal tensor product: all products of extremal
/// local states.
pub fn minimal_tensor(sys_a: &PolygonSystem, sys_b: &PolygonSystem) -> Result<TensorPolytope> {
    let mut vertex_list = Vec::with_capacity(sys_a.n * sys_b.n);
    for wa in &sys_a.state_vertices {
        for wb in &sys_b.state_vertices {
            vertex_list.push(product_state(*wa, *wb)?);
        }
    }
    Ok(TensorPolytope {
        sys_a: sys_a.clone(),
        sys_b: sys_b.clone(),
        kind: TensorKind::Minimal,
        marginal_constraints: true,
        rows: Vec::new(),
        normalization: outer9(UNIT, UNIT),
        vertex_list,
    })
}

impl TensorPolytope {
    pub fn constraint_count(&self) -> usize {
        self.rows.len()
    }

    /// Feasibility of a state with margin: minimum row slack (maximal), or
    /// membership margin via the rows being absent (minimal polytopes check
    /// normalization only here; use `vertex_list` based checks for hull
    /// membership).
    pub fn feasibility_margin(&self, w: &BipartiteState) -> f64 {
        let v = w.to_vec9();
        let norm_err = -(dot9(&self.normalization, &v) - 1.0).abs();
        self.rows
            .iter()
            .map(|r| dot9(r, &v))
            .fold(norm_err, f64::min)
    }

    /// All extremal states. Minimal: the stored product vertices. Maximal:
    /// double-description vertex enumeration over the H-representation.
    pub fn enumerate_vertices(&self) -> Result<Vec<BipartiteState>> {
        match self.kind {
            TensorKind::Minimal => Ok(self.vertex_list.clone()),
            TensorKind::Maximal => {
                let rays = double_description(&self.rows)?;
                let mut out = Vec::with_capacity(rays.len());
                for r in rays {
                    let t = dot9(&self.normalization, &r);
                    if t <= TAU_GEOM {
                        return Err(Error::Domain(
                            "unnormalizable extreme ray; state space unbounded".into(),
                        ));
                    }
                    let scaled: [f64; 9] = std::array::from_fn(|i| r[i] / t);
                    out.push(BipartiteState::from_vec9(&scaled));
                }
                Ok(out)
            }
        }
    }
}

fn dot9(a: &[f64; 9], b: &[f64; 9]) -> f64 {
    (0..9).map(|i| a[i] * b[i]).sum()
}

const DD_TOL: f64 = 1e-9;

/// Extreme rays of the pointed cone `{x in R^9 : rows · x >= 0}` by the
/// double-description method with the combinatorial adjacency test.
fn double_description(rows: &[[f64; 9]]) -> Result<Vec<[f64; 9]>> {
    // 1. Pick 9 linearly independent rows (in deterministic order).
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis: Vec<[f64; 9]> = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        if basis.len() == 9 {
            break;
        }
        let mut v = *row;
        for b in &basis {
            let d = dot9(b, &v);
            for i in 0..9 {
                v[i] -= d * b[i];
            }
        }
        let n = dot9(&v, &v).sqrt();
        if n > 1e-7 {
            for i in 0..9 {
                v[i] /= n;
            }
            basis.push(v);
            chosen.push(idx);
        }
    }
    if basis.len() < 9 {
        return Err(Error::Domain(
            "constraint rows do not span R^9; cone is not pointed".into(),
        ));
    }

    // 2. Initial rays: columns of M^{-1} where M stacks the chosen rows.
    let m: Vec<[f64; 9]> = chosen.iter().map(|&i| rows[i]).collect();
    let minv = invert9(&m)?;
    let mut rays: Vec<[f64; 9]> = (0..9)
        .map(|j| {
            let col: [f64; 9] = std::array::from_fn(|i| minv[i][j]);
            normalize9(col)
        })
        .collect();

    // 3. Insert the remaining halfspaces.
    let mut processed: Vec<usize> = chosen.clone();
    for (idx, row) in rows.iter().enumerate() {
        if chosen.contains(&idx) {
            continue;
        }
        let dots: Vec<f64> = rays.iter().map(|r| dot9(row, r)).collect();
        if dots.iter().all(|&d| d >= -DD_TOL) {
            processed.push(idx);
            continue;
        }
        // Tight sets over processed constraints, for the adjacency test.
        let tight: Vec<Vec<bool>> = rays
            .iter()
            .map(|r| {
                processed
                    .iter()
                    .map(|&p| dot9(&rows[p], r).abs() <= DD_TOL)
                    .collect()
            })
            .collect();
        let mut next: Vec<[f64; 9]> = Vec::new();
        for (i, &d) in dots.iter().enumerate() {
            if d >= -DD_TOL {
                next.push(rays[i]);
            }
        }
        for (i, &di) in dots.iter().enumerate() {
            if di <= DD_TOL {
                continue;
            }
            for (j, &dj) in dots.iter().enumerate() {
                if dj >= -DD_TOL {
                    continue;
                }
                // Candidate pair (positive i, negative j): adjacent iff their
                // common tight set is maximal among all rays.
                let common: Vec<usize> = (0..processed.len())
                    .filter(|&t| tight[i][t] && tight[j][t])
                    .collect();
                if common.len() < 7 {
                    continue;
                }
                let dominated = (0..rays.len()).any(|k| {
                    k != i && k != j && common.iter().all(|&t| tight[k][t])
                });
                if dominated {
                    continue;
                }
                let combo: [f64; 9] =
                    std::array::from_fn(|t| di * rays[j][t] - dj * rays[i][t]);
                next.push(normalize9(combo));
            }
        }
        rays = next;
        processed.push(idx);
    }

    // 4. Defensive dedupe (exact adjacency should already prevent duplicates).
    let mut unique: Vec<[f64; 9]> = Vec::new();
    for r in rays {
        if !unique
            .iter()
            .any(|u| (0..9).map(|i| (u[i] - r[i]).powi(2)).sum::<f64>().sqrt() <= 1e-7)
        {
            unique.push(r);
        }
    }
    Ok(unique)
}

fn normalize9(mut v: [f64; 9]) -> [f64; 9] {
    let n = dot9(&v, &v).sqrt();
    for x in &mut v {
        *x /= n;
    }
    v
}

/// Invert a 9×9 matrix by Gauss-Jordan elimination with partial pivoting.
fn invert9(m: &[[f64; 9]]) -> Result<Vec<[f64; 9]>> {
    let mut a: Vec<[f64; 18]> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = [0.0; 18];
            r[..9].copy_from_slice(row);
            r[9 + i] = 1.0;
            r
        })
        .collect();
    for col in 0..9 {
        let piv = (col..9)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        if a[piv][col].abs() < 1e-12 {
            return Err(Error::Domain("singular matrix in DD initialization".into()));
        }
        a.swap(col, piv);
        let inv = 1.0 / a[col][col];
        for t in 0..18 {
            a[col][t] *= inv;
        }
        for r in 0..9 {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    for t in 0..18 {
                        a[r][t] -= f * a[col][t];
                    }
                }
            }
        }
    }
    Ok(a.iter()
        .map(|r| {
            let mut out = [0.0; 9];
            out.copy_from_slice(&r[9..]);
            out
        })
        .collect())
}
