//! Dual-edge grids and loop tracing on Λ*.

use crate::lattice::{DualPoint, Region, Site};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Dir {
    East,
    North,
    West,
    South,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::East, Dir::North, Dir::West, Dir::South];

    pub fn delta(self) -> (i64, i64) {
        match self {
            Dir::East => (1, 0),
            Dir::North => (0, 1),
            Dir::West => (-1, 0),
            Dir::South => (0, -1),
        }
    }

    pub fn opposite(self) -> Dir {
        match self {
            Dir::East => Dir::West,
            Dir::North => Dir::South,
            Dir::West => Dir::East,
            Dir::South => Dir::North,
        }
    }

    /// Degree-4 pairing: north with east, south with west.
    pub fn corner_partner(self) -> Dir {
        match self {
            Dir::North => Dir::East,
            Dir::East => Dir::North,
            Dir::South => Dir::West,
            Dir::West => Dir::South,
        }
    }

    pub fn between(a: DualPoint, b: DualPoint) -> Option<Dir> {
        match (b.x - a.x, b.y - a.y) {
            (1, 0) => Some(Dir::East),
            (0, 1) => Some(Dir::North),
            (-1, 0) => Some(Dir::West),
            (0, -1) => Some(Dir::South),
            _ => None,
        }
    }
}

pub(crate) fn step(p: DualPoint, d: Dir) -> DualPoint {
    let (dx, dy) = d.delta();
    DualPoint::new(p.x + dx, p.y + dy)
}

/// Sites on either side of the dual edge leaving `p` in direction `d`,
/// returned as (left, right) with respect to the direction of travel.
pub(crate) fn edge_sides(p: DualPoint, d: Dir) -> (Site, Site) {
    // the dual point (a, b) is the south-west corner of the plaquette of site (a, b)
    match d {
        Dir::East => (Site::new(p.x, p.y), Site::new(p.x, p.y - 1)),
        Dir::West => (Site::new(p.x - 1, p.y - 1), Site::new(p.x - 1, p.y)),
        Dir::North => (Site::new(p.x - 1, p.y), Site::new(p.x, p.y)),
        Dir::South => (Site::new(p.x, p.y - 1), Site::new(p.x - 1, p.y - 1)),
    }
}

/// Presence flags for every unit dual edge of Λ*.
#[derive(Debug, Clone)]
pub(crate) struct EdgeGrid {
    origin: DualPoint,
    side: i64,
    present: Vec<bool>,
}

impl EdgeGrid {
    pub fn empty(region: &Region) -> Self {
        let o = region.origin();
        let s = region.side() as i64;
        Self {
            origin: DualPoint::new(o.x, o.y),
            side: s,
            present: vec![false; 2 * (s * (s + 1)) as usize],
        }
    }

    pub fn edge_count(&self) -> usize {
        self.present.len()
    }

    /// Identifier of the edge leaving `p` in direction `d`, if it lies in Λ*.
    pub fn edge_id(&self, p: DualPoint, d: Dir) -> Option<usize> {
        let (a, b) = (p.x - self.origin.x, p.y - self.origin.y);
        let s = self.side;
        let (a, b, horizontal) = match d {
            Dir::East => (a, b, true),
            Dir::West => (a - 1, b, true),
            Dir::North => (a, b, false),
            Dir::South => (a, b - 1, false),
        };
        if horizontal {
            ((0..s).contains(&a) && (0..=s).contains(&b)).then(|| (b * s + a) as usize)
        } else {
            ((0..=s).contains(&a) && (0..s).contains(&b)).then(|| (s * (s + 1) + b * (s + 1) + a) as usize)
        }
    }

    /// Starting point and direction of an edge identifier.
    pub fn edge_start(&self, id: usize) -> (DualPoint, Dir) {
        let s = self.side;
        let id = id as i64;
        if id < s * (s + 1) {
            let (b, a) = (id / s, id % s);
            (DualPoint::new(self.origin.x + a, self.origin.y + b), Dir::East)
        } else {
            let id = id - s * (s + 1);
            let (b, a) = (id / (s + 1), id % (s + 1));
            (DualPoint::new(self.origin.x + a, self.origin.y + b), Dir::North)
        }
    }

    pub fn has(&self, p: DualPoint, d: Dir) -> bool {
        self.edge_id(p, d).is_some_and(|id| self.present[id])
    }

    pub fn set(&mut self, id: usize) {
        self.present[id] = true;
    }

    pub fn degree(&self, p: DualPoint) -> usize {
        Dir::ALL.iter().filter(|&&d| self.has(p, d)).count()
    }

    /// The edge by which a loop leaves `p` after arriving through side `came_from`.
    pub fn next_direction(&self, p: DualPoint, came_from: Dir) -> Dir {
        if self.degree(p) == 4 {
            came_from.corner_partner()
        } else {
            *Dir::ALL
                .iter()
                .find(|&&d| d != came_from && self.has(p, d))
                .expect("dual vertex of even degree")
        }
    }

    /// Splits the edge set into closed loops, each as a vertex walk in
    /// canonical form (see [`canonical_walk`]).
    pub fn trace_loops(&self) -> Vec<Vec<DualPoint>> {
        let mut used = vec![false; self.present.len()];
        let mut loops = Vec::new();
        for id in 0..self.present.len() {
            if !self.present[id] || used[id] {
                continue;
            }
            let (start, start_dir) = self.edge_start(id);
            let mut walk = Vec::new();
            let (mut p, mut d) = (start, start_dir);
            loop {
                walk.push(p);
                let e = self.edge_id(p, d).expect("traced edge lies in the grid");
                used[e] = true;
                p = step(p, d);
                d = self.next_direction(p, d.opposite());
                if p == start && d == start_dir {
                    break;
                }
            }
            loops.push(canonical_walk(walk));
        }
        loops
    }
}

/// Rotates a closed walk to start at its lexicographically smallest vertex
/// and orients it counter-clockwise (first step east).
///
/// The smallest vertex only has north and east edges, so it occurs once.
pub(crate) fn canonical_walk(mut walk: Vec<DualPoint>) -> Vec<DualPoint> {
    let k = walk
        .iter()
        .enumerate()
        .min_by_key(|(_, p)| (p.x, p.y))
        .map(|(k, _)| k)
        .expect("non-empty walk");
    walk.rotate_left(k);
    if walk.len() > 1 && Dir::between(walk[0], walk[1]) != Some(Dir::East) {
        walk[1..].reverse();
    }
    walk
}

/// Sites of `region` enclosed by a closed walk, by horizontal ray parity.
pub(crate) fn enclosed_sites(region: &Region, walk: &[DualPoint]) -> Vec<Site> {
    let side = region.side();
    let o = region.origin();
    // per row of sites, x-positions of vertical edges crossing it
    let mut crossings: Vec<Vec<i64>> = vec![Vec::new(); side];
    for k in 0..walk.len() {
        let (a, b) = (walk[k], walk[(k + 1) % walk.len()]);
        if a.x == b.x {
            let row = a.y.min(b.y) - o.y;
            if (0..side as i64).contains(&row) {
                crossings[row as usize].push(a.x);
            }
        }
    }
    let mut inside = Vec::new();
    for (row, xs) in crossings.iter().enumerate() {
        if xs.is_empty() {
            continue;
        }
        let y = o.y + row as i64;
        for dx in 0..side as i64 {
            let x = o.x + dx;
            // dual column a sits at real x = a − ½, left of site x iff a ≤ x
            if xs.iter().filter(|&&a| a <= x).count() % 2 == 1 {
                inside.push(Site::new(x, y));
            }
        }
    }
    inside.sort();
    inside
}
