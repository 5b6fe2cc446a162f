//! Square boxes on Z², their boundaries and dual sites.
//!
//! A dual point `DualPoint { x, y }` stands for the half-integer point
//! `(x − ½, y − ½)` of Z² + (½, ½). With that convention the plaquette
//! centred on site `(x, y)` has corners `(x, y)`, `(x + 1, y)`, `(x, y + 1)`
//! and `(x + 1, y + 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub x: i64,
    pub y: i64,
}

impl Site {
    pub const ORIGIN: Site = Site { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    /// Graph (ℓ¹) norm.
    pub fn norm(self) -> i64 {
        self.x.abs() + self.y.abs()
    }

    pub fn distance(self, other: Site) -> i64 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }

    /// East, north, west, south.
    pub fn neighbors(self) -> [Site; 4] {
        [
            Site::new(self.x + 1, self.y),
            Site::new(self.x, self.y + 1),
            Site::new(self.x - 1, self.y),
            Site::new(self.x, self.y - 1),
        ]
    }

    pub fn offset(self, dx: i64, dy: i64) -> Site {
        Site::new(self.x + dx, self.y + dy)
    }

    /// Corners of the dual plaquette centred on this site.
    pub fn plaquette_corners(self) -> [DualPoint; 4] {
        [
            DualPoint::new(self.x, self.y),
            DualPoint::new(self.x + 1, self.y),
            DualPoint::new(self.x + 1, self.y + 1),
            DualPoint::new(self.x, self.y + 1),
        ]
    }
}

impl std::fmt::Display for Site {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

impl std::str::FromStr for Site {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (x, y) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("site `{s}` is not of the form x,y")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<i64>()
                .map_err(|e| Error::Parse(format!("site coordinate `{v}`: {e}")))
        };
        Ok(Site::new(parse(x)?, parse(y)?))
    }
}

/// A point of the dual lattice, stored shifted by (½, ½).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DualPoint {
    pub x: i64,
    pub y: i64,
}

impl DualPoint {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    /// Real-plane coordinates.
    pub fn coords(self) -> (f64, f64) {
        (self.x as f64 - 0.5, self.y as f64 - 0.5)
    }
}

/// An axis-aligned square box Λ ⊂ Z².
///
/// For even sides the box extends one further to the east/north of
/// `center`; boxes of growing side around the same center are nested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Region {
    center: Site,
    side: usize,
}

pub fn make_box(center: Site, side: usize) -> Result<Region> {
    Region::new(center, side)
}

impl Region {
    pub fn new(center: Site, side: usize) -> Result<Self> {
        if side == 0 {
            return Err(Error::InvalidRegion("box side must be at least 1".into()));
        }
        if side > 1 << 20 {
            return Err(Error::InvalidRegion(format!("box side {side} is unreasonably large")));
        }
        Ok(Self { center, side })
    }

    pub fn center(&self) -> Site {
        self.center
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Number of sites, side².
    pub fn len(&self) -> usize {
        self.side * self.side
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lower-left site.
    pub fn origin(&self) -> Site {
        let back = ((self.side - 1) / 2) as i64;
        self.center.offset(-back, -back)
    }

    /// Upper-right site.
    pub fn far_corner(&self) -> Site {
        let s = self.side as i64 - 1;
        self.origin().offset(s, s)
    }

    pub fn contains(&self, site: Site) -> bool {
        self.index(site).is_some()
    }

    /// Row-major index (x fastest) of a site inside the box.
    pub fn index(&self, site: Site) -> Option<usize> {
        let o = self.origin();
        let (dx, dy) = (site.x - o.x, site.y - o.y);
        let s = self.side as i64;
        if (0..s).contains(&dx) && (0..s).contains(&dy) {
            Some((dy * s + dx) as usize)
        } else {
            None
        }
    }

    pub fn site(&self, index: usize) -> Site {
        debug_assert!(index < self.len());
        let o = self.origin();
        o.offset((index % self.side) as i64, (index / self.side) as i64)
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.len()).map(move |k| self.site(k))
    }

    /// ∂Λ: sites outside the box at graph distance 1. Ordered bottom row,
    /// top row, left column, right column.
    pub fn boundary(&self) -> Vec<Site> {
        let o = self.origin();
        let f = self.far_corner();
        let s = self.side as i64;
        let mut out = Vec::with_capacity(4 * self.side);
        out.extend((0..s).map(|k| Site::new(o.x + k, o.y - 1)));
        out.extend((0..s).map(|k| Site::new(o.x + k, f.y + 1)));
        out.extend((0..s).map(|k| Site::new(o.x - 1, o.y + k)));
        out.extend((0..s).map(|k| Site::new(f.x + 1, o.y + k)));
        out
    }

    pub fn is_boundary(&self, site: Site) -> bool {
        !self.contains(site) && site.neighbors().iter().any(|&n| self.contains(n))
    }

    /// Λ*: all corners of the plaquettes of Λ, a (side+1)² grid.
    pub fn dual_sites(&self) -> Vec<DualPoint> {
        let o = self.origin();
        let n = self.side as i64 + 1;
        (0..n)
            .flat_map(|dy| (0..n).map(move |dx| DualPoint::new(o.x + dx, o.y + dy)))
            .collect()
    }

    pub fn contains_dual(&self, p: DualPoint) -> bool {
        let o = self.origin();
        let s = self.side as i64;
        (o.x..=o.x + s).contains(&p.x) && (o.y..=o.y + s).contains(&p.y)
    }

    /// Whether `inner` lies inside this box.
    pub fn contains_region(&self, inner: &Region) -> bool {
        self.contains(inner.origin()) && self.contains(inner.far_corner())
    }

    /// Number of nearest-neighbour bonds with at least one endpoint in Λ.
    pub fn bond_count(&self) -> usize {
        2 * self.side * self.side + 2 * self.side
    }
}
