use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ModelParams;
use crate::lattice::{Region, Site};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Minus,
    Plus,
}

impl Spin {
    pub fn value(self) -> i64 {
        match self {
            Spin::Plus => 1,
            Spin::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Self {
        if v > 0 {
            Spin::Plus
        } else {
            Spin::Minus
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Spin::Plus => Spin::Minus,
            Spin::Minus => Spin::Plus,
        }
    }
}

/// Frozen spins on ∂Λ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Plus,
    Minus,
    /// Must list every site of ∂Λ and nothing else.
    Explicit(BTreeMap<Site, Spin>),
}

impl BoundaryCondition {
    /// Explicit boundary built from a rule evaluated on every site of ∂Λ.
    pub fn explicit_from(region: &Region, mut rule: impl FnMut(Site) -> Spin) -> Self {
        BoundaryCondition::Explicit(region.boundary().into_iter().map(|s| (s, rule(s))).collect())
    }

    pub fn spin_at(&self, site: Site) -> Option<Spin> {
        match self {
            BoundaryCondition::Plus => Some(Spin::Plus),
            BoundaryCondition::Minus => Some(Spin::Minus),
            BoundaryCondition::Explicit(map) => map.get(&site).copied(),
        }
    }

    pub fn validate(&self, region: &Region) -> Result<()> {
        if let BoundaryCondition::Explicit(map) = self {
            let boundary = region.boundary();
            if map.len() != boundary.len() || boundary.iter().any(|s| !map.contains_key(s)) {
                return Err(Error::InvalidConfig(
                    "explicit boundary condition must cover exactly the sites of ∂Λ".into(),
                ));
            }
        }
        Ok(())
    }

    /// Spin on a boundary site; callers must have validated the condition.
    pub(crate) fn boundary_spin(&self, site: Site) -> Spin {
        self.spin_at(site).expect("boundary condition validated against region")
    }
}

/// A spin held fixed at an interior site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pin {
    pub site: Site,
    pub spin: Spin,
}

impl Pin {
    pub fn new(site: Site, spin: Spin) -> Self {
        Self { site, spin }
    }
}

/// σ on Λ ∪ ∂Λ: free values on Λ, the boundary read from `bc`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinConfiguration {
    region: Region,
    bc: BoundaryCondition,
    values: Vec<Spin>,
}

impl SpinConfiguration {
    pub fn new(region: Region, bc: BoundaryCondition, values: Vec<Spin>) -> Result<Self> {
        bc.validate(&region)?;
        if values.len() != region.len() {
            return Err(Error::InvalidConfig(format!(
                "{} spin values for a region of {} sites",
                values.len(),
                region.len()
            )));
        }
        Ok(Self { region, bc, values })
    }

    pub fn uniform(region: Region, bc: BoundaryCondition, spin: Spin) -> Result<Self> {
        Self::new(region, bc, vec![spin; region.len()])
    }

    /// Bit k of `bits` set ⇔ site with region index k is +1.
    pub fn from_bits(region: Region, bc: BoundaryCondition, bits: u64) -> Result<Self> {
        if region.len() > 64 {
            return Err(Error::InvalidConfig("bit-encoded configurations need |Λ| ≤ 64".into()));
        }
        let values = (0..region.len())
            .map(|k| if bits >> k & 1 == 1 { Spin::Plus } else { Spin::Minus })
            .collect();
        Self::new(region, bc, values)
    }

    pub fn to_bits(&self) -> u64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Spin::Plus)
            .fold(0u64, |acc, (k, _)| acc | 1 << k)
    }

    /// Configuration with the given sites set to +1 and the rest −1.
    pub fn with_plus_sites(
        region: Region,
        bc: BoundaryCondition,
        plus: impl IntoIterator<Item = Site>,
    ) -> Result<Self> {
        let mut c = Self::uniform(region, bc, Spin::Minus)?;
        for s in plus {
            c.set(s, Spin::Plus)?;
        }
        Ok(c)
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn bc(&self) -> &BoundaryCondition {
        &self.bc
    }

    pub fn values(&self) -> &[Spin] {
        &self.values
    }

    /// Spin at a site of Λ ∪ ∂Λ.
    pub fn get(&self, site: Site) -> Option<Spin> {
        match self.region.index(site) {
            Some(k) => Some(self.values[k]),
            None if self.region.is_boundary(site) => self.bc.spin_at(site),
            None => None,
        }
    }

    pub fn set(&mut self, site: Site, spin: Spin) -> Result<()> {
        let k = self
            .region
            .index(site)
            .ok_or(Error::SiteOutsideRegion { x: site.x, y: site.y })?;
        self.values[k] = spin;
        Ok(())
    }

    pub fn plus_sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.region
            .sites()
            .zip(&self.values)
            .filter(|(_, s)| **s == Spin::Plus)
            .map(|(site, _)| site)
    }
}

/// Calls `f(σ_a, σ_b)` once for every nearest-neighbour bond with at least one
/// endpoint in Λ. Bonds between two boundary sites are skipped.
pub(crate) fn for_each_bond(region: &Region, mut f: impl FnMut(Site, Site)) {
    for s in region.sites() {
        for n in [s.offset(1, 0), s.offset(0, 1)] {
            if region.contains(n) {
                f(s, n);
            }
        }
    }
    for b in region.boundary() {
        let inside = b
            .neighbors()
            .into_iter()
            .find(|n| region.contains(*n))
            .expect("boundary site has a neighbour in the box");
        f(inside, b);
    }
}

/// H(σ) = −J Σ_{bonds} σ_iσ_j − Σ_{i∈Λ} h_iσ_i, one term per unordered bond
/// with at least one endpoint in Λ.
pub fn energy(config: &SpinConfiguration, params: &ModelParams) -> f64 {
    let region = config.region();
    let mut bonds = 0i64;
    for_each_bond(region, |a, b| {
        bonds += config.get(a).unwrap().value() * config.get(b).unwrap().value();
    });
    let field: f64 = region
        .sites()
        .zip(config.values())
        .map(|(s, v)| params.field.value(s) * v.value() as f64)
        .sum();
    -params.coupling * bonds as f64 - field
}

/// H⁻(σ) = −J Σ_{bonds}(σ_iσ_j − 1) − Σ_{i∈Λ} h_i(σ_i + 1); zero on the
/// all-minus configuration.
pub fn energy_normalized_minus(config: &SpinConfiguration, params: &ModelParams) -> Result<f64> {
    if *config.bc() != BoundaryCondition::Minus {
        return Err(Error::Contract(
            "the normalized Hamiltonian is defined for the minus boundary condition only".into(),
        ));
    }
    let region = config.region();
    let mut broken = 0i64;
    for_each_bond(region, |a, b| {
        if config.get(a) != config.get(b) {
            broken += 1;
        }
    });
    let field: f64 = config.plus_sites().map(|s| params.field.value(s)).sum();
    Ok(2.0 * params.coupling * broken as f64 - 2.0 * field)
}

/// H⁻ − H, independent of the configuration: J·(#bonds) − Σ_{i∈Λ} h_i.
pub fn normalization_shift(region: &Region, params: &ModelParams) -> f64 {
    let field: f64 = region.sites().map(|s| params.field.value(s)).sum();
    params.coupling * region.bond_count() as f64 - field
}
