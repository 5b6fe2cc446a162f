//! Exact finite-volume Gibbs computations.
//!
//! Every probability is a ratio of constrained partition functions: the
//! quantity of interest pins one or two interior spins and both exact
//! methods (brute force, transfer matrix) evaluate `log Z` with those pins.

mod brute;
mod config;
mod system;
mod transfer;

use serde::{Deserialize, Serialize};

pub use config::{
    energy, energy_normalized_minus, normalization_shift, BoundaryCondition, Pin, Spin,
    SpinConfiguration,
};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, ModelParams};
use crate::lattice::{Region, Site};
use crate::logsum::log_add;
use system::FreeSystem;

/// Size caps of the exact methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactLimits {
    /// Largest |Λ| enumerated exhaustively.
    pub brute_max_sites: usize,
    /// Largest box side handled by the transfer matrix (2^side states).
    pub transfer_max_side: usize,
}

impl Default for ExactLimits {
    fn default() -> Self {
        Self {
            brute_max_sites: 25,
            transfer_max_side: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Transfer,
    Contour,
    Sampled,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Brute => "brute",
            Method::Transfer => "transfer",
            Method::Contour => "contour",
            Method::Sampled => "sampled",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExactMethod {
    Brute,
    Transfer,
}

impl From<ExactMethod> for Method {
    fn from(m: ExactMethod) -> Self {
        match m {
            ExactMethod::Brute => Method::Brute,
            ExactMethod::Transfer => Method::Transfer,
        }
    }
}

impl std::str::FromStr for ExactMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(ExactMethod::Brute),
            "transfer" => Ok(ExactMethod::Transfer),
            other => Err(Error::Parse(format!("unknown exact method `{other}`"))),
        }
    }
}

/// log Z, site magnetizations and how they were obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsSummary {
    pub log_z: f64,
    pub magnetizations: Vec<(Site, f64)>,
    pub method: Method,
    /// Present for sampled estimates only, aligned with `magnetizations`.
    pub stderr: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactSolver {
    pub method: ExactMethod,
    pub limits: ExactLimits,
}

impl Default for ExactSolver {
    fn default() -> Self {
        Self::new(ExactMethod::Transfer)
    }
}

impl ExactSolver {
    pub fn new(method: ExactMethod) -> Self {
        Self {
            method,
            limits: ExactLimits::default(),
        }
    }

    pub fn brute() -> Self {
        Self::new(ExactMethod::Brute)
    }

    pub fn transfer() -> Self {
        Self::new(ExactMethod::Transfer)
    }

    pub fn with_limits(mut self, limits: ExactLimits) -> Self {
        self.limits = limits;
        self
    }

    pub fn check_capacity(&self, region: &Region) -> Result<()> {
        match self.method {
            ExactMethod::Brute if region.len() > self.limits.brute_max_sites => Err(Error::Capacity {
                method: "brute-force enumeration",
                requested: region.len(),
                cap: self.limits.brute_max_sites,
                hint: "use the transfer-matrix method or the Metropolis sampler",
            }),
            ExactMethod::Transfer if region.side() > self.limits.transfer_max_side => {
                Err(Error::Capacity {
                    method: "transfer matrix",
                    requested: region.side(),
                    cap: self.limits.transfer_max_side,
                    hint: "use the Metropolis sampler (mc-gap)",
                })
            }
            _ => Ok(()),
        }
    }

    pub fn log_partition(
        &self,
        region: &Region,
        bc: &BoundaryCondition,
        params: &ModelParams,
    ) -> Result<f64> {
        self.log_partition_pinned(region, bc, params, &[])
    }

    /// log Z restricted to configurations agreeing with `pins`.
    pub fn log_partition_pinned(
        &self,
        region: &Region,
        bc: &BoundaryCondition,
        params: &ModelParams,
        pins: &[Pin],
    ) -> Result<f64> {
        self.check_capacity(region)?;
        match self.method {
            ExactMethod::Brute => {
                let system = FreeSystem::build(region, bc, params, pins)?;
                Ok(brute::log_partition(&system, params))
            }
            ExactMethod::Transfer => transfer::log_partition(region, bc, params, pins),
        }
    }

    fn require_site(region: &Region, site: Site) -> Result<()> {
        if region.contains(site) {
            Ok(())
        } else {
            Err(Error::SiteOutsideRegion { x: site.x, y: site.y })
        }
    }

    /// (log Z[σ_i = +1], log Z[σ_i = −1]).
    fn split_on(
        &self,
        region: &Region,
        bc: &BoundaryCondition,
        params: &ModelParams,
        site: Site,
    ) -> Result<(f64, f64)> {
        Self::require_site(region, site)?;
        let plus = self.log_partition_pinned(region, bc, params, &[Pin::new(site, Spin::Plus)])?;
        let minus = self.log_partition_pinned(region, bc, params, &[Pin::new(site, Spin::Minus)])?;
        Ok((plus, minus))
    }

    /// ⟨σ_i⟩ = tanh((log Z₊ − log Z₋)/2).
    pub fn magnetization(
        &self,
        region: &Region,
        bc: &BoundaryCondition,
        params: &ModelParams,
        site: Site,
    ) -> Result<f64> {
        let (plus, minus) = self.split_on(region, bc, params, site)?;
        Ok(((plus - minus) / 2.0).tanh())
    }

    /// μ({σ_i = +1}).
    pub fn plus_probability(
        &self,
        region: &Region,
        bc: &BoundaryCondition,
        params: &ModelParams,
        site: Site,
    ) -> Result<f64> {
        let (plus, minus) = self.split_on(region, bc, params, site)?;
        Ok((plus - log_add(plus, minus)).exp())
    }

    /// ⟨σ_iσ_j⟩ − ⟨σ_i⟩⟨σ_j⟩ = 4(p₊₊p₋₋ − p₊₋p₋₊).
    pub fn truncated_correlation(
        &self,
        region: &Region,
        bc: &BoundaryCondition,
        params: &ModelParams,
        i: Site,
        j: Site,
    ) -> Result<f64> {
        Self::require_site(region, i)?;
        Self::require_site(region, j)?;
        if i == j {
            let m = self.magnetization(region, bc, params, i)?;
            return Ok(1.0 - m * m);
        }
        let lz = |a: Spin, b: Spin| {
            self.log_partition_pinned(region, bc, params, &[Pin::new(i, a), Pin::new(j, b)])
        };
        let pp = lz(Spin::Plus, Spin::Plus)?;
        let mm = lz(Spin::Minus, Spin::Minus)?;
        let pm = lz(Spin::Plus, Spin::Minus)?;
        let mp = lz(Spin::Minus, Spin::Plus)?;
        let log_z = log_add(log_add(pp, mm), log_add(pm, mp));
        Ok(4.0 * ((pp + mm - 2.0 * log_z).exp() - (pm + mp - 2.0 * log_z).exp()))
    }

    /// ⟨σ_i⟩⁺ − ⟨σ_i⟩⁻ on the same box.
    pub fn magnetization_gap(&self, region: &Region, params: &ModelParams, site: Site) -> Result<f64> {
        let plus = self.magnetization(region, &BoundaryCondition::Plus, params, site)?;
        let minus = self.magnetization(region, &BoundaryCondition::Minus, params, site)?;
        Ok(plus - minus)
    }

    /// log Z of the normalized minus-boundary Hamiltonian H⁻ = H + shift.
    pub fn log_partition_normalized_minus(&self, region: &Region, params: &ModelParams) -> Result<f64> {
        let log_z = self.log_partition(region, &BoundaryCondition::Minus, params)?;
        Ok(log_z - params.beta * normalization_shift(region, params))
    }

    pub fn summary(
        &self,
        region: &Region,
        bc: &BoundaryCondition,
        params: &ModelParams,
    ) -> Result<GibbsSummary> {
        let log_z = self.log_partition(region, bc, params)?;
        let magnetizations = region
            .sites()
            .map(|s| self.magnetization(region, bc, params, s).map(|m| (s, m)))
            .collect::<Result<Vec<_>>>()?;
        Ok(GibbsSummary {
            log_z,
            magnetizations,
            method: self.method.into(),
            stderr: None,
        })
    }

    /// Residual of the single-site reweighting identity
    ///
    /// ⟨σ_i⟩^{h} = ⟨σ_i e^{β(h_k − h₀)σ_k}⟩^{h₀} · Z^{h₀} / Z^{h},
    ///
    /// where `params.field` equals the constant `h_uniform` = h₀ on Λ except
    /// at `k`. The left side is computed with the modified field, the right
    /// side from partition functions of the constant field pinned at (i, k).
    /// Returns max over i ∈ Λ of |left − right|.
    pub fn pinned_ratio_check(
        &self,
        region: &Region,
        bc: &BoundaryCondition,
        params: &ModelParams,
        k: Site,
        h_uniform: f64,
    ) -> Result<f64> {
        Self::require_site(region, k)?;
        if let Some(s) = region
            .sites()
            .find(|&s| s != k && params.field.value(s) != h_uniform)
        {
            return Err(Error::Contract(format!(
                "field at {s} is {} but must equal the uniform value {h_uniform} away from k",
                params.field.value(s)
            )));
        }
        let h_k = params.field.value(k);
        let tilt = params.beta * (h_k - h_uniform);
        let uniform = params.with_field(FieldSpec::Uniform(h_uniform));
        let log_z = self.log_partition(region, bc, params)?;

        let mut worst: f64 = 0.0;
        for i in region.sites() {
            let lhs = self.magnetization(region, bc, params, i)?;
            let mut rhs = 0.0;
            for sk in [Spin::Plus, Spin::Minus] {
                let w = tilt * sk.value() as f64 - log_z;
                if i == k {
                    let l = self.log_partition_pinned(region, bc, &uniform, &[Pin::new(k, sk)])?;
                    rhs += sk.value() as f64 * (l + w).exp();
                } else {
                    for si in [Spin::Plus, Spin::Minus] {
                        let l = self.log_partition_pinned(
                            region,
                            bc,
                            &uniform,
                            &[Pin::new(i, si), Pin::new(k, sk)],
                        )?;
                        rhs += si.value() as f64 * (l + w).exp();
                    }
                }
            }
            worst = worst.max((lhs - rhs).abs());
        }
        Ok(worst)
    }
}

/// log Z by exhaustive enumeration (default caps).
pub fn log_partition_brute(region: &Region, bc: &BoundaryCondition, params: &ModelParams) -> Result<f64> {
    ExactSolver::brute().log_partition(region, bc, params)
}

/// log Z by transfer matrix (default caps).
pub fn log_partition_transfer(
    region: &Region,
    bc: &BoundaryCondition,
    params: &ModelParams,
) -> Result<f64> {
    ExactSolver::transfer().log_partition(region, bc, params)
}

pub fn magnetization(region: &Region, bc: &BoundaryCondition, params: &ModelParams, site: Site) -> Result<f64> {
    ExactSolver::default().magnetization(region, bc, params, site)
}

pub fn truncated_correlation(
    region: &Region,
    bc: &BoundaryCondition,
    params: &ModelParams,
    i: Site,
    j: Site,
) -> Result<f64> {
    ExactSolver::default().truncated_correlation(region, bc, params, i, j)
}

pub fn magnetization_gap(region: &Region, params: &ModelParams, site: Site) -> Result<f64> {
    ExactSolver::default().magnetization_gap(region, params, site)
}

pub fn pinned_ratio_check(
    region: &Region,
    bc: &BoundaryCondition,
    params: &ModelParams,
    k: Site,
    h_uniform: f64,
) -> Result<f64> {
    ExactSolver::default().pinned_ratio_check(region, bc, params, k, h_uniform)
}
