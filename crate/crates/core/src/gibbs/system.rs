//! The finite system left after freezing ∂Λ and any pinned interior sites.

use crate::error::{Error, Result};
use crate::field::ModelParams;
use crate::gibbs::config::{for_each_bond, BoundaryCondition, Pin, Spin};
use crate::lattice::{Region, Site};

/// −βH(σ) = β(J·(bonds(σ) + const_bonds) + field(σ) + const_field), where
/// `bonds` and `field` only involve free sites.
#[derive(Debug, Clone)]
pub(crate) struct FreeSystem {
    /// Region index of every free site.
    pub sites: Vec<usize>,
    /// Bonds between two free sites, as free-site indices.
    pub bonds: Vec<(usize, usize)>,
    /// Per free site, Σ of frozen neighbour spins.
    pub frozen_neighbors: Vec<i64>,
    pub field: Vec<f64>,
    pub const_bonds: i64,
    pub const_field: f64,
}

/// Pinned spin per region index, validated.
pub(crate) fn pin_table(region: &Region, pins: &[Pin]) -> Result<Vec<Option<Spin>>> {
    let mut table = vec![None; region.len()];
    for pin in pins {
        let k = region
            .index(pin.site)
            .ok_or(Error::SiteOutsideRegion { x: pin.site.x, y: pin.site.y })?;
        match table[k] {
            Some(s) if s != pin.spin => {
                return Err(Error::InvalidConfig(format!(
                    "site {} pinned to both signs",
                    pin.site
                )))
            }
            _ => table[k] = Some(pin.spin),
        }
    }
    Ok(table)
}

impl FreeSystem {
    pub fn build(
        region: &Region,
        bc: &BoundaryCondition,
        params: &ModelParams,
        pins: &[Pin],
    ) -> Result<Self> {
        bc.validate(region)?;
        params.validate()?;
        let pinned = pin_table(region, pins)?;

        let mut free_index = vec![usize::MAX; region.len()];
        let mut sites = Vec::new();
        for (k, p) in pinned.iter().enumerate() {
            if p.is_none() {
                free_index[k] = sites.len();
                sites.push(k);
            }
        }

        enum Slot {
            Free(usize),
            Frozen(i64),
        }
        let classify = |s: Site| match region.index(s) {
            Some(k) => match pinned[k] {
                Some(spin) => Slot::Frozen(spin.value()),
                None => Slot::Free(free_index[k]),
            },
            None => Slot::Frozen(bc.boundary_spin(s).value()),
        };

        let mut bonds = Vec::new();
        let mut frozen_neighbors = vec![0i64; sites.len()];
        let mut const_bonds = 0i64;
        for_each_bond(region, |a, b| match (classify(a), classify(b)) {
            (Slot::Free(i), Slot::Free(j)) => bonds.push((i, j)),
            (Slot::Free(i), Slot::Frozen(v)) | (Slot::Frozen(v), Slot::Free(i)) => {
                frozen_neighbors[i] += v
            }
            (Slot::Frozen(u), Slot::Frozen(v)) => const_bonds += u * v,
        });

        let field = sites
            .iter()
            .map(|&k| params.field.value(region.site(k)))
            .collect();
        let const_field = pinned
            .iter()
            .enumerate()
            .filter_map(|(k, p)| p.map(|s| params.field.value(region.site(k)) * s.value() as f64))
            .sum();

        Ok(Self {
            sites,
            bonds,
            frozen_neighbors,
            field,
            const_bonds,
            const_field,
        })
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    /// β·(J·const_bonds + const_field).
    pub fn log_weight_offset(&self, params: &ModelParams) -> f64 {
        params.beta * (params.coupling * self.const_bonds as f64 + self.const_field)
    }
}
