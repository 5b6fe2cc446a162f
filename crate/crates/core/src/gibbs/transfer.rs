//! Column-by-column transfer matrix on a square box.
//!
//! A column state is a bit mask over the rows (bit set = spin +1). The
//! coupling between neighbouring columns factorises over rows, so it is
//! applied one row at a time in O(side · 2^side). Field, vertical bonds,
//! frozen boundary spins and pins are folded into per-column weights.

use crate::error::Result;
use crate::field::ModelParams;
use crate::gibbs::config::{BoundaryCondition, Pin};
use crate::gibbs::system::pin_table;
use crate::lattice::{Region, Site};

pub(crate) fn log_partition(
    region: &Region,
    bc: &BoundaryCondition,
    params: &ModelParams,
    pins: &[Pin],
) -> Result<f64> {
    bc.validate(region)?;
    params.validate()?;
    let pinned = pin_table(region, pins)?;
    let side = region.side();
    let states = 1usize << side;
    let origin = region.origin();
    let beta = params.beta;
    let coupling = params.coupling;
    let bspin = |s: Site| bc.boundary_spin(s).value();

    let column_log_weights = |c: usize| -> Vec<f64> {
        let x = origin.x + c as i64;
        let rows: Vec<Site> = (0..side).map(|r| Site::new(x, origin.y + r as i64)).collect();
        let field: Vec<f64> = rows.iter().map(|&s| params.field.value(s)).collect();
        // frozen neighbours of each row inside this column
        let mut frozen = vec![0i64; side];
        frozen[0] += bspin(Site::new(x, origin.y - 1));
        frozen[side - 1] += bspin(Site::new(x, origin.y + side as i64));
        if c == 0 {
            for (r, f) in frozen.iter_mut().enumerate() {
                *f += bspin(Site::new(origin.x - 1, origin.y + r as i64));
            }
        }
        if c == side - 1 {
            for (r, f) in frozen.iter_mut().enumerate() {
                *f += bspin(Site::new(origin.x + side as i64, origin.y + r as i64));
            }
        }
        let pins: Vec<(usize, bool)> = (0..side)
            .filter_map(|r| {
                let k = region.index(rows[r]).expect("column site in region");
                pinned[k].map(|s| (r, s.value() > 0))
            })
            .collect();

        (0..states)
            .map(|t| {
                if pins.iter().any(|&(r, up)| (t >> r & 1 == 1) != up) {
                    return f64::NEG_INFINITY;
                }
                let spin = |r: usize| if t >> r & 1 == 1 { 1i64 } else { -1 };
                let mut bonds = 0i64;
                let mut h = 0.0;
                for r in 0..side {
                    let s = spin(r);
                    bonds += s * frozen[r];
                    if r + 1 < side {
                        bonds += s * spin(r + 1);
                    }
                    h += field[r] * s as f64;
                }
                beta * (coupling * bonds as f64 + h)
            })
            .collect()
    };

    let mut log_scale = 0.0;
    let mut v = vec![1.0; states];
    let decay = (-2.0 * beta * coupling).exp();

    for c in 0..side {
        if c > 0 {
            for r in 0..side {
                let bit = 1usize << r;
                for t in 0..states {
                    if t & bit == 0 {
                        let a = v[t];
                        let b = v[t | bit];
                        v[t] = a + decay * b;
                        v[t | bit] = decay * a + b;
                    }
                }
            }
            log_scale += beta * coupling * side as f64;
        }
        let w = column_log_weights(c);
        let wmax = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (vt, wt) in v.iter_mut().zip(&w) {
            *vt *= (wt - wmax).exp();
        }
        log_scale += wmax;
        let vmax = v.iter().copied().fold(0.0, f64::max);
        for vt in v.iter_mut() {
            *vt /= vmax;
        }
        log_scale += vmax.ln();
    }

    let total: f64 = v.iter().sum();
    Ok(log_scale + total.ln())
}
