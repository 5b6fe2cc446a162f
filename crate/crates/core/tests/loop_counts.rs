//! Loop counts around a site, checked against a brute subset oracle.
//!
//! A loop of length n around the origin is the single interface of a
//! configuration that is +1 on a finite set S ∋ 0. Under the corner rule
//! both spin classes connect through the anti-diagonal, so S qualifies iff
//! it has n disagreeing bonds and both S and its complement are connected
//! for the 6-neighbourhood {±e₁, ±e₂, ±(e₁ − e₂)}.

use std::collections::VecDeque;

use ising_core::bounds::count_surrounding_contours;
use ising_core::{Region, Site};

const STEPS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 0), (0, -1), (1, -1), (-1, 1)];

fn connected(cells: &[Vec<bool>], want: bool) -> bool {
    let h = cells.len();
    let w = cells[0].len();
    let start = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .find(|&(x, y)| cells[y][x] == want);
    let Some(start) = start else { return true };
    let mut seen = vec![vec![false; w]; h];
    seen[start.1][start.0] = true;
    let mut queue = VecDeque::from([start]);
    let mut reached = 1;
    while let Some((x, y)) = queue.pop_front() {
        for (dx, dy) in STEPS {
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                continue;
            }
            let (nx, ny) = (nx as usize, ny as usize);
            if cells[ny][nx] == want && !seen[ny][nx] {
                seen[ny][nx] = true;
                reached += 1;
                queue.push_back((nx, ny));
            }
        }
    }
    reached == cells.iter().flatten().filter(|&&c| c == want).count()
}

/// Every qualifying S has a bounding box with width + height ≤ n/2, so the
/// oracle runs over boxes of that size placed around the origin and over
/// the subsets touching all four sides of their box.
fn oracle(n: usize) -> u64 {
    let half = n / 2;
    let mut count = 0;
    for w in 1..half {
        for h in 1..=half - w {
            for x0 in 1 - w as i64..=0 {
                for y0 in 1 - h as i64..=0 {
                    count += count_in_box(n, w, h, x0, y0);
                }
            }
        }
    }
    count
}

fn count_in_box(n: usize, w: usize, h: usize, x0: i64, y0: i64) -> u64 {
    let origin_bit = (-y0) as usize * w + (-x0) as usize;
    let mut count = 0;
    for mask in 0u64..1 << (w * h) {
        let has = |x: usize, y: usize| mask >> (y * w + x) & 1 == 1;
        if !has((-x0) as usize, (-y0) as usize) || mask >> origin_bit & 1 == 0 {
            continue;
        }
        let spans = (0..w).any(|x| has(x, 0))
            && (0..w).any(|x| has(x, h - 1))
            && (0..h).any(|y| has(0, y))
            && (0..h).any(|y| has(w - 1, y));
        if !spans {
            continue;
        }
        let (pw, ph) = (w + 4, h + 4);
        let mut cells = vec![vec![false; pw]; ph];
        for y in 0..h {
            for x in 0..w {
                cells[y + 2][x + 2] = has(x, y);
            }
        }
        let mut perimeter = 0;
        for y in 0..ph {
            for x in 0..pw {
                if x + 1 < pw && cells[y][x] != cells[y][x + 1] {
                    perimeter += 1;
                }
                if y + 1 < ph && cells[y][x] != cells[y + 1][x] {
                    perimeter += 1;
                }
            }
        }
        if perimeter == n && connected(&cells, true) && connected(&cells, false) {
            count += 1;
        }
    }
    count
}

fn big_region() -> Region {
    Region::new(Site::new(0, 0), 11).unwrap()
}

#[test]
fn counts_match_subset_oracle() {
    for n in [4, 6, 8, 10] {
        let fast = count_surrounding_contours(&big_region(), Site::new(0, 0), n).unwrap();
        assert_eq!(fast, oracle(n), "n = {n}");
    }
}

#[test]
fn frozen_counts_and_entropy_bound() {
    let expected = [(4, 1), (6, 4), (8, 24), (10, 136)];
    for (n, want) in expected {
        let got = count_surrounding_contours(&big_region(), Site::new(0, 0), n).unwrap();
        assert_eq!(got, want, "n = {n}");
        assert!(got as f64 <= n as f64 * 3f64.powi(n as i32));
    }
}

#[test]
fn counts_are_translation_invariant() {
    let region = Region::new(Site::new(3, -2), 9).unwrap();
    for n in [4, 6, 8] {
        assert_eq!(
            count_surrounding_contours(&region, Site::new(4, -1), n).unwrap(),
            count_surrounding_contours(&big_region(), Site::new(0, 0), n).unwrap()
        );
    }
}
