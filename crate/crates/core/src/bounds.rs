//! Closed forms of the Peierls series and their certified truncations.
//!
//! With x = 3e^{−2βJ}:
//!
//! * Σ_{n≥4} n xⁿ = x⁴(4 − 3x)/(1 − x)²
//! * c(β) = Σ_{n≥4} (2n+3) 3^{n−1} e^{−2βJn} = (x⁴/3)(11 − 9x)/(1 − x)²
//!
//! Both are written with the x⁴ factored out, so there is no cancellation
//! for small x.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::contour::extract_contours;
use crate::error::{Error, Result};
use crate::field::NeumaierSum;
use crate::gibbs::{BoundaryCondition, SpinConfiguration};
use crate::lattice::{Region, Site};

/// A series value with a certified bracket [value, value + truncation_error_bound]
/// (up to floating-point rounding of the summed terms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub truncation_error_bound: f64,
    pub closed_form_used: bool,
}

/// Default number of terms of the truncation oracles.
pub const TRUNCATION_TERMS: usize = 1_000_000;

/// x = 3e^{−2βJ}, required to be < 1.
pub fn peierls_ratio(beta: f64, coupling: f64) -> Result<f64> {
    if !(beta.is_finite() && beta >= 0.0 && coupling.is_finite() && coupling > 0.0) {
        return Err(Error::Regime(format!("need β ≥ 0 and J > 0, got β = {beta}, J = {coupling}")));
    }
    let x = 3.0 * (-2.0 * beta * coupling).exp();
    if x >= 1.0 {
        return Err(Error::Regime(format!(
            "series diverges: 3e^(-2βJ) = {x} ≥ 1 (need βJ > ln(3)/2 ≈ 0.5493)"
        )));
    }
    Ok(x)
}

/// 1 − 3e^{−2βJ}: how far the series is from divergence.
pub fn convergence_margin(beta: f64, coupling: f64) -> f64 {
    1.0 - 3.0 * (-2.0 * beta * coupling).exp()
}

fn closed(value: f64) -> SeriesValue {
    SeriesValue {
        value,
        // a handful of correctly rounded operations
        truncation_error_bound: 16.0 * f64::EPSILON * value,
        closed_form_used: true,
    }
}

/// Σ_{n≥4} n xⁿ for 0 ≤ x < 1.
pub fn sum_n_xn(x: f64) -> f64 {
    let x4 = (x * x) * (x * x);
    x4 * (4.0 - 3.0 * x) / ((1.0 - x) * (1.0 - x))
}

/// (1/3) Σ_{n≥4} (2n+3) xⁿ for 0 ≤ x < 1.
pub fn c_series(x: f64) -> f64 {
    let x4 = (x * x) * (x * x);
    x4 / 3.0 * (11.0 - 9.0 * x) / ((1.0 - x) * (1.0 - x))
}

/// c(β) in closed form.
pub fn c_beta(beta: f64, coupling: f64) -> Result<SeriesValue> {
    Ok(closed(c_series(peierls_ratio(beta, coupling)?)))
}

/// Σ_{n≥4} e^{−2β(Jn − 3ℓ)} n 3ⁿ = e^{6βℓ} Σ_{n≥4} n xⁿ, ℓ = ‖h‖₁.
pub fn peierls_bound(beta: f64, coupling: f64, l1_norm: f64) -> Result<SeriesValue> {
    if !(l1_norm.is_finite() && l1_norm >= 0.0) {
        return Err(Error::Inapplicable(format!("‖h‖₁ = {l1_norm} is not a finite norm")));
    }
    let base = sum_n_xn(peierls_ratio(beta, coupling)?);
    Ok(closed(base * (6.0 * beta * l1_norm).exp()))
}

/// 1 − 2c(β), the lower bound on ⟨σ_i⟩⁺ for non-negative fields.
pub fn plus_bc_lower_bound(beta: f64, coupling: f64) -> Result<f64> {
    Ok(1.0 - 2.0 * c_beta(beta, coupling)?.value)
}

/// Σ_{n=4}^{N} a(n) xⁿ with a certified tail, where the ratio of
/// consecutive terms a(n+1)x/a(n) is non-increasing in n.
fn truncated(x: f64, terms: usize, coeff: impl Fn(f64) -> f64) -> Result<SeriesValue> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Regime(format!("series ratio x = {x} outside [0, 1)")));
    }
    let mut acc = NeumaierSum::default();
    let last = 3 + terms.max(1);
    for n in 4..=last {
        let t = coeff(n as f64) * x.powi(n as i32);
        if t == 0.0 {
            break;
        }
        acc.add(t);
    }
    let next = (last + 1) as f64;
    let t_next = coeff(next) * x.powi(last as i32 + 1);
    let r = x * coeff(next + 1.0) / coeff(next);
    let tail = if t_next == 0.0 { 0.0 } else { t_next / (1.0 - r) };
    Ok(SeriesValue {
        value: acc.value(),
        truncation_error_bound: tail,
        closed_form_used: false,
    })
}

/// Σ_{n=4}^{terms+3} n xⁿ plus certified tail.
pub fn sum_n_xn_truncated(x: f64, terms: usize) -> Result<SeriesValue> {
    truncated(x, terms, |n| n)
}

/// (1/3) Σ_{n=4}^{terms+3} (2n+3) xⁿ plus certified tail.
pub fn c_series_truncated(x: f64, terms: usize) -> Result<SeriesValue> {
    truncated(x, terms, |n| (2.0 * n + 3.0) / 3.0)
}

/// Number of closed dual loops of length `n` that enclose `site`.
///
/// Each such loop is the single contour of the configuration that is +1
/// exactly on the sites it encloses, so loops are enumerated as connected
/// site sets (the loop's interior) and kept when extraction yields a single
/// contour of length `n`. Connectivity allows the anti-diagonal steps
/// (1, −1) and (−1, 1), matching the corner rule.
pub fn count_surrounding_contours(region: &Region, site: Site, n: usize) -> Result<u64> {
    if n % 2 == 1 {
        return Err(Error::Geometry(format!("contours have even length, got {n}")));
    }
    if !(4..=10).contains(&n) {
        return Err(Error::Geometry(format!("loop length {n} outside the supported range 4..=10")));
    }
    let reach = (n / 2 - 1) as i64;
    for (dx, dy) in [(-reach, -reach), (reach, reach)] {
        if !region.contains(site.offset(dx, dy)) {
            return Err(Error::Geometry(format!(
                "a length-{n} loop around {site} can reach the boundary of the region; need the box {}±{reach} inside it",
                site
            )));
        }
    }
    let half = n as i64 / 2;
    // interiors fit in offsets ±(half − 2); a margin of one keeps the loop inside Λ*
    let local = Region::new(site, 2 * reach as usize + 1)?;
    let window = reach - 1;
    let wside = 2 * window + 1;
    let bit = |dx: i64, dy: i64| ((dy + window) * wside + dx + window) as u32;
    let offsets = |mask: u64| {
        (0..(wside * wside) as u32)
            .filter(move |b| mask >> b & 1 == 1)
            .map(move |b| (b as i64 % wside - window, b as i64 / wside - window))
    };
    let span = |mask: u64| {
        let (mut x0, mut x1, mut y0, mut y1) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
        for (x, y) in offsets(mask) {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        (x1 - x0 + 1) + (y1 - y0 + 1)
    };
    const STEPS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 0), (0, -1), (1, -1), (-1, 1)];

    let start = 1u64 << bit(0, 0);
    let mut seen: HashSet<u64> = HashSet::from([start]);
    let mut frontier = vec![start];
    while let Some(mask) = frontier.pop() {
        for (x, y) in offsets(mask).collect::<Vec<_>>() {
            for (dx, dy) in STEPS {
                let (nx, ny) = (x + dx, y + dy);
                if nx.abs() > window || ny.abs() > window {
                    continue;
                }
                let grown = mask | 1u64 << bit(nx, ny);
                if grown != mask && span(grown) <= half && seen.insert(grown) {
                    frontier.push(grown);
                }
            }
        }
    }

    let mut count = 0;
    for mask in seen {
        let plus: Vec<Site> = offsets(mask).map(|(dx, dy)| site.offset(dx, dy)).collect();
        let config = SpinConfiguration::with_plus_sites(local, BoundaryCondition::Minus, plus)?;
        let family = extract_contours(&config)?;
        if family.len() == 1 && family.contours()[0].length() == n {
            count += 1;
        }
    }
    Ok(count)
}
