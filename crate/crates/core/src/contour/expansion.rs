//! Sums over compatible families, enumerated through the bijection with
//! minus-boundary configurations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{extract_contours, ContourFamily};
use crate::bounds::{peierls_bound, peierls_ratio, SeriesValue};
use crate::error::{Error, Result};
use crate::field::{ModelParams, DEFAULT_TAIL_TOLERANCE};
use crate::gibbs::{BoundaryCondition, ExactSolver, SpinConfiguration};
use crate::lattice::{Region, Site};
use crate::logsum::{tree_reduce, LogSumExp};

/// Largest |Λ| whose families are enumerated.
pub const CONTOUR_MAX_SITES: usize = 25;

const CHUNKS: u64 = 64;

/// Folds `f` over every compatible family on Λ*, together with the
/// configuration it encodes. Families are visited in 64 fixed chunks of
/// configuration indices; the chunk accumulators come back in chunk order,
/// so any reduction over them is independent of the thread pool.
pub fn for_each_family<A, I, F>(region: &Region, init: I, f: F) -> Result<Vec<A>>
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, &SpinConfiguration, &ContourFamily) + Sync,
{
    if region.len() > CONTOUR_MAX_SITES {
        return Err(Error::Capacity {
            method: "contour-family enumeration",
            requested: region.len(),
            cap: CONTOUR_MAX_SITES,
            hint: "use the transfer-matrix method",
        });
    }
    let total = 1u64 << region.len();
    let chunks = CHUNKS.min(total);
    let size = total / chunks;
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            for bits in c * size..(c + 1) * size {
                let config = SpinConfiguration::from_bits(*region, BoundaryCondition::Minus, bits)?;
                let family = extract_contours(&config)?;
                f(&mut acc, &config, &family);
            }
            Ok(acc)
        })
        .collect()
}

/// log Σ_{compatible families} Π ξ(γ), the normalized minus-boundary
/// partition function written as a contour sum.
pub fn log_partition_contour(region: &Region, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let parts = for_each_family(region, LogSumExp::new, |acc, _, family| {
        acc.add(family.log_weight(params));
    })?;
    Ok(tree_reduce(&parts).value())
}

/// Exact μ⁻(σ_i = +1) next to the Peierls bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeierlsComparison {
    pub exact: f64,
    pub bound: SeriesValue,
    /// Certified upper value of ‖h‖₁ used in the bound.
    pub l1: f64,
    pub holds: bool,
}

pub fn minus_bc_plus_probability_bound(region: &Region, params: &ModelParams, site: Site) -> Result<PeierlsComparison> {
    minus_bc_plus_probability_bound_with(&ExactSolver::default(), region, params, site)
}

/// As [`minus_bc_plus_probability_bound`], with the exact side computed by `solver`.
pub fn minus_bc_plus_probability_bound_with(
    solver: &ExactSolver,
    region: &Region,
    params: &ModelParams,
    site: Site,
) -> Result<PeierlsComparison> {
    params.validate()?;
    let l1 = params.field.norms(DEFAULT_TAIL_TOLERANCE).l1;
    if !l1.is_finite() {
        return Err(Error::Regime("J > 3‖h‖₁ fails: the field is not summable".into()));
    }
    if params.coupling <= 3.0 * l1 {
        return Err(Error::Regime(format!(
            "J > 3‖h‖₁ fails: J = {}, 3‖h‖₁ = {}",
            params.coupling,
            3.0 * l1
        )));
    }
    peierls_ratio(params.beta, params.coupling)?;
    let bound = peierls_bound(params.beta, params.coupling, l1)?;
    let exact = solver.plus_probability(region, &BoundaryCondition::Minus, params, site)?;
    Ok(PeierlsComparison {
        exact,
        bound,
        l1,
        holds: exact <= bound.value,
    })
}
