//! Signed contours of minus-boundary configurations.
//!
//! Every bond of Λ ∪ ∂Λ whose spins disagree contributes its dual edge.
//! The resulting edge set has even degree at every dual vertex; where four
//! edges meet they are paired north↔east and south↔west, which cuts the
//! north-east and south-west corners. The loops obtained this way are in
//! bijection with configurations satisfying the minus boundary condition.
//!
//! Contour counts at degree-4 vertices depend on the corner rule; Z and all
//! probabilities do not.

mod expansion;
mod geometry;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ModelParams, DEFAULT_TAIL_TOLERANCE};
use crate::gibbs::{BoundaryCondition, Spin, SpinConfiguration};
use crate::lattice::{DualPoint, Region, Site};
use geometry::{edge_sides, enclosed_sites, step, Dir, EdgeGrid};

pub use expansion::{
    for_each_family, log_partition_contour, CONTOUR_MAX_SITES, minus_bc_plus_probability_bound,
    minus_bc_plus_probability_bound_with, PeierlsComparison,
};

/// A closed dual loop with its type and interiors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Contour {
    /// Canonical counter-clockwise walk; edge k joins vertex k and k+1.
    vertices: Vec<DualPoint>,
    sign: Spin,
    /// Sites enclosed by the loop (+1 in the configuration having this
    /// loop as its only contour).
    interior_closure: Vec<Site>,
    /// Enclosed sites at Euclidean distance > 1 from the loop.
    interior: Vec<Site>,
}

impl Contour {
    /// Builds a contour from a closed walk on Λ* (without repeating the
    /// first vertex at the end) and its type.
    pub fn from_walk(region: &Region, walk: Vec<DualPoint>, sign: Spin) -> Result<Self> {
        if walk.len() < 4 || walk.len() % 2 != 0 {
            return Err(Error::InvalidFamily(format!(
                "a closed dual loop has even length ≥ 4, got {}",
                walk.len()
            )));
        }
        let mut edges = BTreeSet::new();
        for k in 0..walk.len() {
            let (a, b) = (walk[k], walk[(k + 1) % walk.len()]);
            if !region.contains_dual(a) {
                return Err(Error::InvalidFamily(format!("vertex {a:?} outside Λ*")));
            }
            if Dir::between(a, b).is_none() {
                return Err(Error::InvalidFamily(format!("{a:?} → {b:?} is not a unit dual step")));
            }
            if !edges.insert(if a < b { (a, b) } else { (b, a) }) {
                return Err(Error::InvalidFamily(format!("edge {a:?}–{b:?} traversed twice")));
            }
        }
        Ok(Self::assemble(region, geometry::canonical_walk(walk), sign))
    }

    fn assemble(region: &Region, vertices: Vec<DualPoint>, sign: Spin) -> Self {
        let interior_closure = enclosed_sites(region, &vertices);
        let on_loop: BTreeSet<DualPoint> = vertices.iter().copied().collect();
        let interior = interior_closure
            .iter()
            .copied()
            .filter(|s| s.plaquette_corners().iter().all(|c| !on_loop.contains(c)))
            .collect();
        Self {
            vertices,
            sign,
            interior_closure,
            interior,
        }
    }

    /// |γ|, the number of unit dual segments.
    pub fn length(&self) -> usize {
        self.vertices.len()
    }

    pub fn sign(&self) -> Spin {
        self.sign
    }

    pub fn vertices(&self) -> &[DualPoint] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (DualPoint, DualPoint)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n]))
    }

    /// int̄ γ, sorted.
    pub fn interior_closure(&self) -> &[Site] {
        &self.interior_closure
    }

    /// int γ, sorted.
    pub fn interior(&self) -> &[Site] {
        &self.interior
    }

    /// vol γ = |int̄ γ|.
    pub fn volume(&self) -> usize {
        self.interior_closure.len()
    }

    /// γ ⊙ i, i.e. i ∈ int̄ γ.
    pub fn involves(&self, site: Site) -> bool {
        self.interior_closure.binary_search(&site).is_ok()
    }

    /// γ ⊙ γ′: every site involved by γ′ is involved by γ.
    pub fn involves_contour(&self, other: &Contour) -> bool {
        other.interior_closure.iter().all(|&s| self.involves(s))
    }

    /// Sites of int̄ γ sharing a plaquette edge with γ.
    pub fn inner_layer(&self) -> Vec<Site> {
        let mut out: Vec<Site> = self
            .edges()
            .map(|(a, b)| edge_sides(a, Dir::between(a, b).expect("unit step")).0)
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Whether the spins of `config` on int̄ γ \ int γ take both signs. The
    /// contour type is read from [`Contour::inner_layer`], which is always
    /// single-signed; the wider Euclidean layer can contain diagonally
    /// touching sites of a nested contour.
    pub fn euclidean_layer_is_mixed(&self, config: &SpinConfiguration) -> bool {
        let mut seen = BTreeSet::new();
        for s in &self.interior_closure {
            if self.interior.binary_search(s).is_err() {
                seen.insert(config.get(*s));
            }
        }
        seen.len() > 1
    }

    fn field_sum(&self, h: impl Fn(Site) -> f64) -> f64 {
        self.interior_closure.iter().map(|&s| h(s)).sum()
    }

    pub fn to_json(&self) -> ContourJson {
        ContourJson {
            sign: self.sign,
            length: self.length(),
            volume: self.volume(),
            edges: self
                .edges()
                .map(|(a, b)| {
                    let (ax, ay) = a.coords();
                    let (bx, by) = b.coords();
                    [[ax, ay], [bx, by]]
                })
                .collect(),
        }
    }
}

/// Serialized contour: real-plane edge list and type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourJson {
    pub sign: Spin,
    pub length: usize,
    pub volume: usize,
    pub edges: Vec<[[f64; 2]; 2]>,
}

/// log ξ(γ) = −2βJ|γ| ∓ 2β Σ_{i ∈ int̄ γ} h_i, with + for type + contours.
pub fn contour_weight_log(contour: &Contour, params: &ModelParams) -> f64 {
    weight_log_with(contour, params, |s| params.field.value(s))
}

pub(crate) fn weight_log_with(contour: &Contour, params: &ModelParams, h: impl Fn(Site) -> f64) -> f64 {
    let s = contour.sign.value() as f64;
    -2.0 * params.beta * params.coupling * contour.length() as f64
        + s * 2.0 * params.beta * contour.field_sum(h)
}

/// A Λ*-compatible set of contours.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContourFamily {
    region: Region,
    contours: Vec<Contour>,
}

impl ContourFamily {
    /// Sorts into canonical order; compatibility is checked by
    /// [`reconstruct_configuration`].
    pub fn new(region: Region, mut contours: Vec<Contour>) -> Self {
        contours.sort_by(|a, b| a.vertices.cmp(&b.vertices).then(a.sign.cmp(&b.sign)));
        Self { region, contours }
    }

    pub fn empty(region: Region) -> Self {
        Self::new(region, Vec::new())
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn contours(&self) -> &[Contour] {
        &self.contours
    }

    pub fn len(&self) -> usize {
        self.contours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contours.is_empty()
    }

    /// Σ_γ log ξ(γ).
    pub fn log_weight(&self, params: &ModelParams) -> f64 {
        self.contours.iter().map(|c| contour_weight_log(c, params)).sum()
    }

    pub fn total_length(&self) -> usize {
        self.contours.iter().map(Contour::length).sum()
    }

    /// Indices of contours whose Euclidean layer int̄ \ int is not
    /// single-signed in `config`.
    pub fn type_reading_conflicts(&self, config: &SpinConfiguration) -> Vec<usize> {
        (0..self.contours.len())
            .filter(|&k| self.contours[k].euclidean_layer_is_mixed(config))
            .collect()
    }

    pub fn to_json(&self) -> Vec<ContourJson> {
        self.contours.iter().map(Contour::to_json).collect()
    }
}

/// Contours of a minus-boundary configuration.
pub fn extract_contours(config: &SpinConfiguration) -> Result<ContourFamily> {
    if *config.bc() != BoundaryCondition::Minus {
        return Err(Error::Contract("contours are extracted under the minus boundary condition".into()));
    }
    let region = *config.region();
    let mut grid = EdgeGrid::empty(&region);
    for id in 0..grid.edge_count() {
        let (p, d) = grid.edge_start(id);
        let (left, right) = edge_sides(p, d);
        if config.get(left) != config.get(right) {
            grid.set(id);
        }
    }
    let contours = grid
        .trace_loops()
        .into_iter()
        .map(|walk| {
            let sign = config
                .get(edge_sides(walk[0], Dir::East).0)
                .expect("inner site of a traced loop is in Λ");
            Contour::assemble(&region, walk, sign)
        })
        .collect();
    Ok(ContourFamily::new(region, contours))
}

/// The unique minus-boundary configuration whose contours are `family`.
///
/// A site is +1 iff an odd number of contours enclose it. The family is
/// accepted only if it is exactly what extraction returns for that
/// configuration: loops that cross, share an edge, resolve a degree-4
/// vertex against the corner rule or carry the wrong type are rejected.
pub fn reconstruct_configuration(family: &ContourFamily) -> Result<SpinConfiguration> {
    let region = *family.region();
    let mut seen_edges = BTreeSet::new();
    let mut parity = vec![false; region.len()];
    for c in family.contours() {
        let rebuilt = Contour::from_walk(&region, c.vertices.clone(), c.sign)?;
        for (a, b) in rebuilt.edges() {
            if !seen_edges.insert(if a < b { (a, b) } else { (b, a) }) {
                return Err(Error::InvalidFamily(format!("contours share the edge {a:?}–{b:?}")));
            }
        }
        for s in rebuilt.interior_closure() {
            let k = region.index(*s).expect("enclosed site lies in the region");
            parity[k] = !parity[k];
        }
    }
    let values = parity
        .iter()
        .map(|&p| if p { Spin::Plus } else { Spin::Minus })
        .collect();
    let config = SpinConfiguration::new(region, BoundaryCondition::Minus, values)?;
    let check = extract_contours(&config)?;
    if check.contours != family.contours {
        return Err(Error::InvalidFamily(
            "contours are not mutually avoiding under the corner rule or carry inconsistent types".into(),
        ));
    }
    Ok(config)
}

/// γ ⊙ i.
pub fn involves(contour: &Contour, site: Site) -> bool {
    contour.involves(site)
}

/// Partial order of a family under ⊙; each contour's parent is the
/// smallest other contour involving it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestingForest {
    parents: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    roots: Vec<usize>,
}

impl NestingForest {
    pub fn parent(&self, k: usize) -> Option<usize> {
        self.parents[k]
    }

    pub fn children(&self, k: usize) -> &[usize] {
        &self.children[k]
    }

    /// ⊙-maximal contours.
    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn depth(&self, mut k: usize) -> usize {
        let mut d = 1;
        while let Some(p) = self.parents[k] {
            d += 1;
            k = p;
        }
        d
    }

    pub fn max_depth(&self) -> usize {
        (0..self.parents.len()).map(|k| self.depth(k)).max().unwrap_or(0)
    }
}

pub fn nesting_forest(family: &ContourFamily) -> NestingForest {
    let cs = family.contours();
    let n = cs.len();
    let parents: Vec<Option<usize>> = (0..n)
        .map(|k| {
            (0..n)
                .filter(|&j| j != k && cs[j].involves_contour(&cs[k]))
                .min_by_key(|&j| (cs[j].volume(), j))
        })
        .collect();
    let mut children = vec![Vec::new(); n];
    let mut roots = Vec::new();
    for (k, p) in parents.iter().enumerate() {
        match p {
            Some(p) => children[*p].push(k),
            None => roots.push(k),
        }
    }
    NestingForest {
        parents,
        children,
        roots,
    }
}

/// Outcome of checking e^{−2β‖h‖₁} Π e^{−2βJ|γ|} ≤ Π ξ(γ) ≤ e^{2β‖h‖₁} Π e^{−2βJ|γ|}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichCheck {
    pub holds: bool,
    /// log Π ξ − log(lower bound).
    pub slack_low: f64,
    /// log(upper bound) − log Π ξ.
    pub slack_high: f64,
}

pub fn lemma2_sandwich_check(family: &ContourFamily, params: &ModelParams) -> Result<SandwichCheck> {
    lemma2_sandwich_check_with(family, params, params.field.norms(DEFAULT_TAIL_TOLERANCE).l1)
}

/// As [`lemma2_sandwich_check`] with a precomputed upper value of ‖h‖₁.
pub fn lemma2_sandwich_check_with(family: &ContourFamily, params: &ModelParams, l1: f64) -> Result<SandwichCheck> {
    if !l1.is_finite() {
        return Err(Error::Inapplicable("the field is not summable (‖h‖₁ = ∞)".into()));
    }
    let mut bare = 0.0;
    let mut log_xi = 0.0;
    for c in family.contours() {
        let b = -2.0 * params.beta * params.coupling * c.length() as f64;
        bare += b;
        log_xi += b + c.sign.value() as f64 * 2.0 * params.beta * c.field_sum(|s| params.field.value(s));
    }
    let margin = 2.0 * params.beta * l1;
    let slack_low = log_xi - (bare - margin);
    let slack_high = (bare + margin) - log_xi;
    let tol = 1e-12 * log_xi.abs().max(1.0);
    Ok(SandwichCheck {
        holds: slack_low >= -tol && slack_high >= -tol,
        slack_low,
        slack_high,
    })
}

/// Walk of the unit loop around a single site.
pub fn unit_loop(site: Site) -> Vec<DualPoint> {
    let p = DualPoint::new(site.x, site.y);
    let mut walk = vec![p];
    for d in [Dir::East, Dir::North, Dir::West] {
        walk.push(step(*walk.last().unwrap(), d));
    }
    walk
}

#[cfg(test)]
mod tests;
