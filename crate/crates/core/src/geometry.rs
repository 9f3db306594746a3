//! Convex-cone primitives and polygon GPT systems.
//!
//! States live at `z = 1` in abstract GPT coordinates `(x, y, z)`; the cone of
//! subnormalized states is the cone over the state polygon, and effects are
//! linear functionals represented in the same coordinates via the dot product.

use std::f64::consts::PI;

use serde::Serialize;

use crate::{Error, Result, TAU_GEOM};

/// A point or functional in the ambient 3-dimensional GPT space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// The unit effect `u`: evaluates to 1 on every normalized state.
pub const UNIT: Vec3 = Vec3 {
    x: 0.0,
    y: 0.0,
    z: 1.0,
};

pub const ZERO: Vec3 = Vec3 {
    x: 0.0,
    y: 0.0,
    z: 0.0,
};

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, t: f64) -> Vec3 {
        Vec3::new(t * self.x, t * self.y, t * self.z)
    }

    pub fn normalized(self) -> Vec3 {
        self.scale(1.0 / self.norm())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

/// A finitely generated convex cone in 3 dimensions, carrying both the
/// V-representation (extreme-ray generators) and the H-representation
/// (outward facet normals), cross-checked against each other on construction.
#[derive(Debug, Clone)]
pub struct Cone {
    generators: Vec<Vec3>,
    facets: Vec<Vec3>,
    /// False when the generators do not span a full-dimensional cone, in which
    /// case the dual is not pointed (it contains a line).
    full_dimensional: bool,
}

impl Cone {
    /// Build a cone from generators. Duplicated rays are merged and redundant
    /// generators (nonnegative combinations of the others) are dropped, so the
    /// stored generator list is irredundant.
    pub fn from_generators(generators: &[Vec3]) -> Result<Cone> {
        if generators.is_empty() {
            return Err(Error::Domain("cone needs at least one generator".into()));
        }
        for g in generators {
            if !g.is_finite() {
                return Err(Error::Domain("non-finite cone generator".into()));
            }
            if g.norm() <= TAU_GEOM {
                return Err(Error::Domain("zero generator in cone".into()));
            }
        }
        // Dedupe identical rays (direction-wise).
        let mut rays: Vec<Vec3> = Vec::new();
        for g in generators {
            let gn = g.normalized();
            if !rays.iter().any(|r| (*r - gn).norm() <= TAU_GEOM) {
                rays.push(gn);
            }
        }
        let full_dimensional = ray_rank(&rays) == 3;
        let facets = if full_dimensional {
            facets_of(&rays)
        } else {
            Vec::new()
        };
        // Drop redundant generators: a ray is redundant iff the facets of the
        // full set keep describing the cone without it, i.e. iff it is not
        // needed to support any facet-adjacent region. For full-dimensional
        // cones an extreme ray is exactly one lying on >= 2 facets (or the
        // cone is simplicial from the start); for lower-dimensional cones we
        // keep the angular extremes.
        // Pruning by facet-tightness is only valid for pointed cones (facet
        // normals spanning all of R³); otherwise extreme rays are not defined
        // and we keep the deduped generator list as-is.
        let pointed = full_dimensional && ray_rank(&facets) == 3;
        let kept = if pointed {
            extreme_rays(&rays, &facets)
        } else {
            rays.clone()
        };
        let cone = Cone {
            generators: kept,
            facets,
            full_dimensional,
        };
        cone.cross_check()?;
        Ok(cone)
    }

    pub fn generators(&self) -> &[Vec3] {
        &self.generators
    }

    pub fn facets(&self) -> &[Vec3] {
        &self.facets
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.full_dimensional
    }

    fn cross_check(&self) -> Result<()> {
        for g in &self.generators {
            for f in &self.facets {
                if f.dot(*g) < -TAU_GEOM {
                    return Err(Error::Domain(format!(
                        "V/H cross-check failed: generator {g:?} violates facet {f:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The dual cone `{y : y·x >= 0 for all x in self}` with irredundant
    /// generators. For a full-dimensional pointed cone this is exact; a cone
    /// that is not full-dimensional yields a non-pointed dual, which is
    /// returned with its lineality directions included among the generators
    /// and `is_full_dimensional` can be consulted on the input to detect it.
    pub fn dual(&self) -> Result<Cone> {
        if self.full_dimensional {
            return Cone::from_generators(&self.facets);
        }
        // Degenerate input: rank 1 or 2. The dual contains the orthogonal
        // complement of the span as lineality.
        let rays = &self.generators;
        let rank = ray_rank(rays);
        match rank {
            1 => {
                let g = rays[0];
                let t1 = orthogonal_to(g);
                let t2 = g.cross(t1).normalized();
                Cone::from_generators(&[g, t1, t1.scale(-1.0), t2, t2.scale(-1.0)])
            }
            2 => {
                let normal = plane_normal(rays)?;
                // Angular extremes a, b of the planar cone; dual edge rays are
                // the in-plane outward rotations of a and b.
                let (a, b) = planar_extremes(rays, normal)?;
                let ea = normal.cross(a);
                let ea = if ea.dot(b) >= 0.0 { ea } else { ea.scale(-1.0) };
                let eb = normal.cross(b);
                let eb = if eb.dot(a) >= 0.0 { eb } else { eb.scale(-1.0) };
                Cone::from_generators(&[ea, eb, normal, normal.scale(-1.0)])
            }
            _ => Err(Error::Domain("degenerate cone".into())),
        }
    }

    /// Membership test with margin: `true` iff every facet slack is
    /// `>= -TAU_GEOM`; the margin is the minimum facet slack.
    pub fn membership(&self, v: Vec3) -> (bool, f64) {
        let margin = self
            .facets
            .iter()
            .map(|f| f.dot(v))
            .fold(f64::INFINITY, f64::min);
        (margin >= -TAU_GEOM, margin)
    }

    /// True iff the cone equals its dual as a set of rays (after unit-norm
    /// scaling, greedy nearest matching, tolerance `TAU_GEOM`).
    pub fn is_self_dual(&self) -> Result<bool> {
        let dual = self.dual()?;
        Ok(same_ray_set(&self.generators, dual.generators()))
    }
}

fn ray_rank(rays: &[Vec3]) -> usize {
    // Gram-Schmidt over the ray directions.
    let mut basis: Vec<Vec3> = Vec::new();
    for r in rays {
        let mut v = *r;
        for b in &basis {
            v = v - b.scale(v.dot(*b));
        }
        if v.norm() > 1e-12 {
            basis.push(v.normalized());
        }
        if basis.len() == 3 {
            break;
        }
    }
    basis.len()
}

fn orthogonal_to(g: Vec3) -> Vec3 {
    let cand = if g.x.abs() <= g.y.abs() && g.x.abs() <= g.z.abs() {
        Vec3::new(1.0, 0.0, 0.0)
    } else if g.y.abs() <= g.z.abs() {
        Vec3::new(0.0, 1.0, 0.0)
    } else {
        Vec3::new(0.0, 0.0, 1.0)
    };
    (cand - g.scale(cand.dot(g) / g.dot(g))).normalized()
}

fn plane_normal(rays: &[Vec3]) -> Result<Vec3> {
    for i in 0..rays.len() {
        for j in (i + 1)..rays.len() {
            let n = rays[i].cross(rays[j]);
            if n.norm() > 1e-9 {
                return Ok(n.normalized());
            }
        }
    }
    Err(Error::Domain("rays do not span a plane".into()))
}

fn planar_extremes(rays: &[Vec3], normal: Vec3) -> Result<(Vec3, Vec3)> {
    // Pick the pair with the largest angular separation.
    let mut best = (f64::INFINITY, rays[0], rays[0]);
    for i in 0..rays.len() {
        for j in (i + 1)..rays.len() {
            let c = rays[i].normalized().dot(rays[j].normalized());
            if c < best.0 {
                best = (c, rays[i], rays[j]);
            }
        }
    }
    if best.0 <= -1.0 + 1e-12 {
        return Err(Error::Domain(
            "planar cone contains a line; dual has empty interior in the plane".into(),
        ));
    }
    let _ = normal;
    Ok((best.1, best.2))
}

/// Facets of a full-dimensional cone: for every generator pair, the plane
/// through them is a facet iff all generators lie (weakly) on one side.
fn facets_of(rays: &[Vec3]) -> Vec<Vec3> {
    let mut facets: Vec<Vec3> = Vec::new();
    for i in 0..rays.len() {
        for j in (i + 1)..rays.len() {
            let mut n = rays[i].cross(rays[j]);
            if n.norm() <= 1e-12 {
                continue;
            }
            n = n.normalized();
            let dots: Vec<f64> = rays.iter().map(|r| n.dot(*r)).collect();
            let min = dots.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = dots.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            // Orient outward-supporting: flip only on a genuinely negative
            // minimum (a -1e-16 from rounding must not flip the normal).
            let oriented = if min >= -TAU_GEOM {
                Some(n)
            } else if max <= TAU_GEOM {
                Some(n.scale(-1.0))
            } else {
                None
            };
            if let Some(f) = oriented {
                if !facets.iter().any(|g| (*g - f).norm() <= TAU_GEOM) {
                    facets.push(f);
                }
            }
        }
    }
    facets
}

/// Extreme rays among `rays` given the facet normals: a generator of a
/// full-dimensional pointed cone is extreme iff it is tight on at least two
/// facets with linearly independent normals; for a simplicial spanning set
/// every ray is extreme. Falls back to keeping a ray when facet information
/// is insufficient (never drops a needed generator).
fn extreme_rays(rays: &[Vec3], facets: &[Vec3]) -> Vec<Vec3> {
    if rays.len() <= 3 {
        return rays.to_vec();
    }
    rays.iter()
        .cloned()
        .filter(|r| {
            let tight: Vec<&Vec3> = facets
                .iter()
                .filter(|f| f.dot(*r).abs() <= TAU_GEOM)
                .collect();
            if tight.len() < 2 {
                return false;
            }
            tight
                .iter()
                .any(|f| f.cross(*tight[0]).norm() > TAU_GEOM)
        })
        .collect()
}

/// Set equality of two ray families after unit normalization, via greedy
/// nearest matching at tolerance `TAU_GEOM`.
pub fn same_ray_set(a: &[Vec3], b: &[Vec3]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut unmatched: Vec<Vec3> = b.iter().map(|v| v.normalized()).collect();
    for v in a {
        let vn = v.normalized();
        let Some((idx, d)) = unmatched
            .iter()
            .enumerate()
            .map(|(i, w)| (i, (*w - vn).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
        else {
            return false;
        };
        if d > TAU_GEOM {
            return false;
        }
        unmatched.swap_remove(idx);
    }
    true
}

/// Which polygon family to construct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// States form the regular n-gon of radius `r_n`; effects are the full
    /// dual cone (box-world style unrestricted effects).
    Unrestricted,
    /// Self-dual theory: automatic for odd n, by scheme for even n.
    SelfDual,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Unrestricted => "unrestricted",
            Family::SelfDual => "selfdual",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unrestricted" => Ok(Family::Unrestricted),
            "selfdual" => Ok(Family::SelfDual),
            other => Err(Error::Config(format!("unknown family '{other}'"))),
        }
    }
}

/// Self-dualization scheme for even n (ignored otherwise).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// States and effects both equal the cone `C ∩ C*` (a regular 2n-gon).
    Intersection,
    /// States are the unrestricted n-gon; effects are the full dual cone,
    /// identified with the states by the rotation mapping one polygon onto
    /// the other.
    RotatedPairing,
    /// States form the n-gon at the maximal radius with nonnegative pairwise
    /// self-pairing (radius 1 for even n, `r_n` for odd n); effects are the
    /// state vertices rescaled into the dual. This is the scheme selected by
    /// the empirical anchors (see the acceptance suite).
    UnitRadius,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Intersection => "intersection",
            Scheme::RotatedPairing => "rotated-pairing",
            Scheme::UnitRadius => "unit-radius",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "intersection" => Ok(Scheme::Intersection),
            "rotated-pairing" => Ok(Scheme::RotatedPairing),
            "unit-radius" => Ok(Scheme::UnitRadius),
            other => Err(Error::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

/// A single polygon GPT system.
#[derive(Debug, Clone)]
pub struct PolygonSystem {
    pub n: usize,
    pub family: Family,
    pub scheme: Scheme,
    /// Extremal normalized states ω_i (at z = 1).
    pub state_vertices: Vec<Vec3>,
    /// Nontrivial extremal effects e_i.
    pub effect_vertices: Vec<Vec3>,
    /// The unit effect u.
    pub unit: Vec3,
    /// Vertex radius r_n = sqrt(sec(π/n)) of the unrestricted polygon.
    pub radius: f64,
    state_cone: Cone,
}

fn polygon_vertices(count: usize, radius: f64, offset: f64) -> Vec<Vec3> {
    (0..count)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / count as f64 + offset;
            Vec3::new(radius * t.cos(), radius * t.sin(), 1.0)
        })
        .collect()
}

/// Scale each dual ray so that `max_i e·ω_i = 1`, making `e` and `u − e`
/// simultaneously valid effects.
fn scale_to_effects(rays: &[Vec3], states: &[Vec3]) -> Result<Vec<Vec3>> {
    rays.iter()
        .map(|r| {
            let m = states
                .iter()
                .map(|w| r.dot(*w))
                .fold(f64::NEG_INFINITY, f64::max);
            if m <= TAU_GEOM {
                return Err(Error::Domain(
                    "dual ray does not attain a positive value on the states".into(),
                ));
            }
            Ok(r.scale(1.0 / m))
        })
        .collect()
}

/// Sort effects by azimuthal angle for stable, reproducible indexing.
fn sort_by_angle(mut v: Vec<Vec3>) -> Vec<Vec3> {
    v.sort_by(|a, b| {
        let ta = a.y.atan2(a.x).rem_euclid(2.0 * PI);
        let tb = b.y.atan2(b.x).rem_euclid(2.0 * PI);
        ta.total_cmp(&tb)
    });
    v
}

/// Build a polygon GPT system.
pub fn build_polygon_system(n: usize, family: Family, scheme: Scheme) -> Result<PolygonSystem> {
    if n < 3 {
        return Err(Error::Domain(format!("polygon needs n >= 3, got {n}")));
    }
    let radius = (1.0 / (PI / n as f64).cos()).sqrt();
    let unrestricted_states = polygon_vertices(n, radius, 0.0);

    let (state_vertices, effect_vertices) = if family == Family::Unrestricted
        || (family == Family::SelfDual && n % 2 == 1)
    {
        let cone = Cone::from_generators(&unrestricted_states)?;
        let effects = scale_to_effects(cone.facets(), &unrestricted_states)?;
        (unrestricted_states, sort_by_angle(effects))
    } else {
        match scheme {
            Scheme::Intersection => {
                // C ∩ C*: regular 2n-gon with apothem 1/r_n, vertices between
                // the original state directions and the dual directions.
                let rho = 1.0 / (radius * (PI / (2.0 * n as f64)).cos());
                let states = polygon_vertices(2 * n, rho, PI / (2.0 * n as f64));
                let effects = scale_to_effects(&states, &states)?;
                (states, sort_by_angle(effects))
            }
            Scheme::RotatedPairing => {
                // States are the unrestricted n-gon; effects the full dual,
                // with the rotation by π/n as the state-effect identification.
                let cone = Cone::from_generators(&unrestricted_states)?;
                let effects = scale_to_effects(cone.facets(), &unrestricted_states)?;
                (unrestricted_states, sort_by_angle(effects))
            }
            Scheme::UnitRadius => {
                let states = polygon_vertices(n, 1.0, 0.0);
                // Effects e_k = ω_k / (1 + s²) with s = 1: max_i e_k·ω_i is
                // attained at i = k with value (1 + s²)/(1 + s²) = 1.
                let effects = states.iter().map(|w| w.scale(0.5)).collect();
                (states, effects)
            }
        }
    };

    let state_cone = Cone::from_generators(&state_vertices)?;
    let sys = PolygonSystem {
        n,
        family,
        scheme,
        state_vertices,
        effect_vertices,
        unit: UNIT,
        radius,
        state_cone,
    };
    sys.validate()?;
    Ok(sys)
}

impl PolygonSystem {
    /// The cone of subnormalized states.
    pub fn state_cone(&self) -> &Cone {
        &self.state_cone
    }

    /// Facet normals of the state cone (used for marginal-membership rows).
    pub fn state_facets(&self) -> &[Vec3] {
        self.state_cone.facets()
    }

    /// Check the defining invariants: normalization, effect validity, and
    /// complement validity.
    pub fn validate(&self) -> Result<()> {
        for w in &self.state_vertices {
            if (self.unit.dot(*w) - 1.0).abs() > TAU_GEOM {
                return Err(Error::Domain(format!("state {w:?} is not normalized")));
            }
        }
        for e in &self.effect_vertices {
            for w in &self.state_vertices {
                let p = e.dot(*w);
                if !(-TAU_GEOM..=1.0 + TAU_GEOM).contains(&p) {
                    return Err(Error::Domain(format!(
                        "effect {e:?} evaluates to {p} on state {w:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of nontrivial extremal effects.
    pub fn effect_count(&self) -> usize {
        self.effect_vertices.len()
    }
}
