//! Single-spin-flip Metropolis sampling with frozen boundary spins.
//!
//! Each chain owns a ChaCha8 stream selected by (seed, run, chain). Chains
//! start from independent uniformly random configurations and then consume
//! exactly one 64-bit word per site visit in raster order, so the word used
//! for (sweep t, site k) sits at a fixed position of the stream. Chains run
//! in parallel and are combined in chain order.

use std::io::Write;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ModelParams;
use crate::gibbs::{BoundaryCondition, Method, SpinConfiguration};
use crate::lattice::{Region, Site};

/// Name of the generator, reported with every estimate.
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha), stream per (seed, run, chain)";

const BATCHES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConfig {
    /// Total sweeps per chain, burn-in included.
    pub sweeps: usize,
    pub burn_in: usize,
    pub chains: usize,
    pub seed: u64,
    /// Record every `thinning`-th sweep after burn-in.
    pub thinning: usize,
}

impl ChainConfig {
    pub fn new(sweeps: usize, burn_in: usize, chains: usize, seed: u64) -> Self {
        Self {
            sweeps,
            burn_in,
            chains,
            seed,
            thinning: 1,
        }
    }

    pub fn with_thinning(mut self, thinning: usize) -> Self {
        self.thinning = thinning;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.burn_in == 0 || self.burn_in >= self.sweeps {
            return Err(Error::InvalidConfig(format!(
                "need 0 < burn_in < sweeps, got burn_in = {}, sweeps = {}",
                self.burn_in, self.sweeps
            )));
        }
        if self.chains < 2 {
            return Err(Error::InvalidConfig("at least two chains are needed for the between-chain variance".into()));
        }
        if self.thinning == 0 {
            return Err(Error::InvalidConfig("thinning must be positive".into()));
        }
        if self.recorded() < 2 {
            return Err(Error::InvalidConfig("fewer than two recorded sweeps per chain".into()));
        }
        Ok(())
    }

    /// Recorded sweeps per chain.
    pub fn recorded(&self) -> usize {
        (self.sweeps - self.burn_in).div_ceil(self.thinning)
    }
}

/// Sampled mean with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub chain_means: Vec<f64>,
    pub method: Method,
    pub rng: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapEstimate {
    pub gap: f64,
    pub stderr: f64,
    pub plus: Estimate,
    pub minus: Estimate,
}

/// Box magnetization after each sweep of one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainTrace {
    /// `single`, `plus` or `minus`.
    pub run: String,
    pub chain: usize,
    pub magnetization: Vec<f64>,
}

/// H(σ′) − H(σ) for flipping `site`: 2σ_i(J Σ_{j~i} σ_j + h_i).
pub fn flip_energy_change(config: &SpinConfiguration, params: &ModelParams, site: Site) -> Result<f64> {
    let s = config
        .get(site)
        .filter(|_| config.region().contains(site))
        .ok_or(Error::SiteOutsideRegion { x: site.x, y: site.y })?
        .value() as f64;
    let neighbors: i64 = site.neighbors().iter().map(|n| config.get(*n).unwrap().value()).sum();
    Ok(2.0 * s * (params.coupling * neighbors as f64 + params.field.value(site)))
}

/// Metropolis acceptance min(1, e^{−βΔH}).
pub fn acceptance_probability(beta: f64, delta_energy: f64) -> f64 {
    if delta_energy <= 0.0 {
        1.0
    } else {
        (-beta * delta_energy).exp()
    }
}

/// Box with a one-site frame holding the boundary spins.
struct Lattice {
    side: usize,
    spins: Vec<i8>,
    field: Vec<f64>,
}

impl Lattice {
    fn new(region: &Region, bc: &BoundaryCondition, params: &ModelParams) -> Self {
        let side = region.side();
        let w = side + 2;
        let o = region.origin();
        let mut spins = vec![0i8; w * w];
        let mut field = vec![0.0; w * w];
        for gy in 0..w {
            for gx in 0..w {
                let s = Site::new(o.x + gx as i64 - 1, o.y + gy as i64 - 1);
                if region.contains(s) {
                    field[gy * w + gx] = params.field.value(s);
                } else if region.is_boundary(s) {
                    spins[gy * w + gx] = bc.spin_at(s).expect("validated boundary").value() as i8;
                }
            }
        }
        Self { side, spins, field }
    }

    fn grid_index(&self, k: usize) -> usize {
        let w = self.side + 2;
        (k / self.side + 1) * w + k % self.side + 1
    }

    fn randomize(&mut self, rng: &mut ChaCha8Rng) {
        for k in 0..self.side * self.side {
            let g = self.grid_index(k);
            self.spins[g] = if rng.next_u64() >> 63 == 1 { 1 } else { -1 };
        }
    }

    fn sweep(&mut self, rng: &mut ChaCha8Rng, beta: f64, coupling: f64) {
        let w = self.side + 2;
        for k in 0..self.side * self.side {
            let g = self.grid_index(k);
            let u = uniform(rng.next_u64());
            let nb = self.spins[g - 1] as i32 + self.spins[g + 1] as i32 + self.spins[g - w] as i32 + self.spins[g + w] as i32;
            let s = self.spins[g] as f64;
            let delta = 2.0 * s * (coupling * nb as f64 + self.field[g]);
            if u < acceptance_probability(beta, delta) {
                self.spins[g] = -self.spins[g];
            }
        }
    }

    fn spin(&self, k: usize) -> f64 {
        self.spins[self.grid_index(k)] as f64
    }

    fn mean(&self) -> f64 {
        let n = self.side * self.side;
        (0..n).map(|k| self.spin(k)).sum::<f64>() / n as f64
    }
}

/// Uniform in [0, 1) from the top 53 bits.
fn uniform(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

struct ChainResult {
    samples: Vec<f64>,
    trace: Option<Vec<f64>>,
}

fn run_chain(
    region: &Region,
    bc: &BoundaryCondition,
    params: &ModelParams,
    cfg: &ChainConfig,
    stream: u64,
    site_index: usize,
    keep_trace: bool,
) -> ChainResult {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let mut lattice = Lattice::new(region, bc, params);
    lattice.randomize(&mut rng);
    let mut samples = Vec::with_capacity(cfg.recorded());
    let mut trace = keep_trace.then(|| Vec::with_capacity(cfg.sweeps));
    for t in 0..cfg.sweeps {
        lattice.sweep(&mut rng, params.beta, params.coupling);
        if let Some(tr) = trace.as_mut() {
            tr.push(lattice.mean());
        }
        if t >= cfg.burn_in && (t - cfg.burn_in) % cfg.thinning == 0 {
            samples.push(lattice.spin(site_index));
        }
    }
    ChainResult { samples, trace }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Variance of a chain mean from non-overlapping batch means.
fn batch_means_variance(samples: &[f64]) -> f64 {
    let batches = BATCHES.min(samples.len());
    let size = samples.len() / batches;
    let means: Vec<f64> = (0..batches).map(|b| mean(&samples[b * size..(b + 1) * size])).collect();
    sample_variance(&means) / batches as f64
}

fn combine(results: &[ChainResult]) -> Estimate {
    let chain_means: Vec<f64> = results.iter().map(|r| mean(&r.samples)).collect();
    let c = chain_means.len() as f64;
    let between = sample_variance(&chain_means) / c;
    let within = results.iter().map(|r| batch_means_variance(&r.samples)).sum::<f64>() / (c * c);
    // A mean of n spins moves in steps of 2/n, so no estimate is finer than
    // that; with zero observed variance, 3 of these steps is the rule-of-three bound.
    let n: usize = results.iter().map(|r| r.samples.len()).sum();
    let resolution = 2.0 / n as f64;
    Estimate {
        mean: mean(&chain_means),
        stderr: between.max(within).sqrt().max(resolution),
        chain_means,
        method: Method::Sampled,
        rng: RNG_NAME.to_string(),
    }
}

fn run(
    region: &Region,
    bc: &BoundaryCondition,
    params: &ModelParams,
    cfg: &ChainConfig,
    run_tag: u64,
    site: Site,
    keep_trace: bool,
) -> Result<(Estimate, Vec<ChainTrace>)> {
    let label = ["single", "plus", "minus"][run_tag as usize];
    cfg.validate()?;
    params.validate()?;
    bc.validate(region)?;
    let site_index = region.index(site).ok_or(Error::SiteOutsideRegion { x: site.x, y: site.y })?;
    let results: Vec<ChainResult> = (0..cfg.chains)
        .into_par_iter()
        .map(|c| run_chain(region, bc, params, cfg, run_tag << 32 | c as u64, site_index, keep_trace))
        .collect();
    let traces = results
        .iter()
        .enumerate()
        .filter_map(|(chain, r)| {
            r.trace.clone().map(|magnetization| ChainTrace {
                run: label.to_string(),
                chain,
                magnetization,
            })
        })
        .collect();
    Ok((combine(&results), traces))
}

/// Estimate of ⟨σ_site⟩ under the given boundary condition.
pub fn sample_magnetization(
    region: &Region,
    bc: &BoundaryCondition,
    params: &ModelParams,
    cfg: &ChainConfig,
    site: Site,
) -> Result<Estimate> {
    Ok(run(region, bc, params, cfg, 0, site, false)?.0)
}

/// As [`sample_magnetization`], also returning per-sweep box magnetizations.
pub fn sample_magnetization_traced(
    region: &Region,
    bc: &BoundaryCondition,
    params: &ModelParams,
    cfg: &ChainConfig,
    site: Site,
) -> Result<(Estimate, Vec<ChainTrace>)> {
    run(region, bc, params, cfg, 0, site, true)
}

/// ⟨σ_site⟩⁺ − ⟨σ_site⟩⁻ from two independent runs.
pub fn sample_gap(region: &Region, params: &ModelParams, cfg: &ChainConfig, site: Site) -> Result<GapEstimate> {
    Ok(gap(region, params, cfg, site, false)?.0)
}

/// As [`sample_gap`], also returning the traces of both runs.
pub fn sample_gap_traced(
    region: &Region,
    params: &ModelParams,
    cfg: &ChainConfig,
    site: Site,
) -> Result<(GapEstimate, Vec<ChainTrace>)> {
    gap(region, params, cfg, site, true)
}

fn gap(
    region: &Region,
    params: &ModelParams,
    cfg: &ChainConfig,
    site: Site,
    keep_trace: bool,
) -> Result<(GapEstimate, Vec<ChainTrace>)> {
    let (plus, mut traces) = run(region, &BoundaryCondition::Plus, params, cfg, 1, site, keep_trace)?;
    let (minus, minus_traces) = run(region, &BoundaryCondition::Minus, params, cfg, 2, site, keep_trace)?;
    traces.extend(minus_traces);
    let estimate = GapEstimate {
        gap: plus.mean - minus.mean,
        stderr: plus.stderr.hypot(minus.stderr),
        plus,
        minus,
    };
    Ok((estimate, traces))
}

/// Writes traces as `run,chain,sweep,magnetization` rows.
pub fn write_traces_csv(mut out: impl Write, traces: &[ChainTrace]) -> std::io::Result<()> {
    writeln!(out, "run,chain,sweep,magnetization")?;
    for t in traces {
        for (sweep, m) in t.magnetization.iter().enumerate() {
            writeln!(out, "{},{},{},{}", t.run, t.chain, sweep + 1, m)?;
        }
    }
    Ok(())
}
