//! Exhaustive enumeration of the free spins in Gray-code order.
//!
//! The bond part of the energy is an integer updated exactly on every single
//! flip; the field part is read from two half-tables, so each configuration
//! weight carries only a couple of roundings.

use rayon::prelude::*;

use crate::field::ModelParams;
use crate::gibbs::system::FreeSystem;
use crate::logsum::{tree_reduce, LogSumExp};

/// Fixed number of enumeration chunks (a power of two). The reduction shape
/// depends only on this, never on the thread pool.
const CHUNKS_LOG2: u32 = 6;

pub(crate) fn log_partition(system: &FreeSystem, params: &ModelParams) -> f64 {
    let n = system.len();
    assert!(n < 63, "brute-force enumeration over {n} free sites");
    let beta = params.beta;
    let coupling = params.coupling;

    let mut free_neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(i, j) in &system.bonds {
        free_neighbors[i].push(j);
        free_neighbors[j].push(i);
    }

    let low_bits = n / 2;
    let high_bits = n - low_bits;
    let half_table = |offset: usize, bits: usize| -> Vec<f64> {
        (0..1usize << bits)
            .map(|m| {
                (0..bits)
                    .map(|b| {
                        let h = system.field[offset + b];
                        if m >> b & 1 == 1 {
                            h
                        } else {
                            -h
                        }
                    })
                    .sum()
            })
            .collect()
    };
    let low_table = half_table(0, low_bits);
    let high_table = half_table(low_bits, high_bits);
    let low_mask = (1u64 << low_bits) - 1;

    let total: u64 = 1 << n;
    let chunk_count = (1u64 << CHUNKS_LOG2).min(total);
    let chunk_size = total / chunk_count;

    let parts: Vec<LogSumExp> = (0..chunk_count)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk_size;
            let gray = start ^ (start >> 1);
            let mut spins: Vec<i64> = (0..n).map(|k| if gray >> k & 1 == 1 { 1 } else { -1 }).collect();
            let mut bonds: i64 = system.bonds.iter().map(|&(i, j)| spins[i] * spins[j]).sum::<i64>()
                + spins
                    .iter()
                    .zip(&system.frozen_neighbors)
                    .map(|(s, f)| s * f)
                    .sum::<i64>();
            let mut code = gray;
            let mut acc = LogSumExp::new();
            for m in start..start + chunk_size {
                if m != start {
                    let k = m.trailing_zeros() as usize;
                    let local: i64 = free_neighbors[k].iter().map(|&j| spins[j]).sum::<i64>()
                        + system.frozen_neighbors[k];
                    bonds -= 2 * spins[k] * local;
                    spins[k] = -spins[k];
                    code ^= 1 << k;
                }
                let field = low_table[(code & low_mask) as usize] + high_table[(code >> low_bits) as usize];
                acc.add(beta * (coupling * bonds as f64 + field));
            }
            acc
        })
        .collect();

    tree_reduce(&parts).value() + system.log_weight_offset(params)
}
