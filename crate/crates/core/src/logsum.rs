//! Log-domain accumulation helpers.

/// Running `log Σ exp(wᵢ)` kept as a shifted pair `(max, Σ exp(wᵢ − max))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSumExp {
    max: f64,
    sum: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSumExp {
    pub const fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    #[inline]
    pub fn add(&mut self, w: f64) {
        if w == f64::NEG_INFINITY {
            return;
        }
        if w > self.max {
            self.sum = self.sum * (self.max - w).exp() + 1.0;
            self.max = w;
        } else {
            self.sum += (w - self.max).exp();
        }
    }

    pub fn merge(self, other: LogSumExp) -> LogSumExp {
        if other.max == f64::NEG_INFINITY {
            return self;
        }
        if self.max == f64::NEG_INFINITY {
            return other;
        }
        if self.max >= other.max {
            LogSumExp {
                max: self.max,
                sum: self.sum + other.sum * (other.max - self.max).exp(),
            }
        } else {
            LogSumExp {
                max: other.max,
                sum: other.sum + self.sum * (self.max - other.max).exp(),
            }
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

/// `log(exp(a) + exp(b))`.
#[inline]
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// Reduces per-chunk partial sums with a fixed-shape binary tree, so the
/// result depends only on the chunk layout and never on thread scheduling.
pub fn tree_reduce(parts: &[LogSumExp]) -> LogSumExp {
    match parts.len() {
        0 => LogSumExp::new(),
        1 => parts[0],
        n => {
            let (l, r) = parts.split_at(n / 2);
            tree_reduce(l).merge(tree_reduce(r))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_sum_in_safe_range() {
        let ws = [0.3, -1.2, 2.5, 0.0, -7.0];
        let mut acc = LogSumExp::new();
        for &w in &ws {
            acc.add(w);
        }
        let naive: f64 = ws.iter().map(|w| w.exp()).sum::<f64>().ln();
        assert!((acc.value() - naive).abs() < 1e-15);
    }

    #[test]
    fn survives_large_exponents() {
        let mut acc = LogSumExp::new();
        acc.add(1234.0);
        acc.add(1232.0);
        // 1232 + ln(e^2 + 1)
        let expected = 1232.0 + (2f64.exp() + 1.0).ln();
        assert!((acc.value() - expected).abs() < 1e-12);
        assert!((log_add(1234.0, 1232.0) - expected).abs() < 1e-12);
    }

    #[test]
    fn empty_is_neg_infinity() {
        assert_eq!(LogSumExp::new().value(), f64::NEG_INFINITY);
        assert_eq!(tree_reduce(&[]).value(), f64::NEG_INFINITY);
    }

    #[test]
    fn tree_reduce_matches_sequential() {
        let parts: Vec<LogSumExp> = (0..7)
            .map(|k| {
                let mut a = LogSumExp::new();
                a.add(k as f64 * 0.7);
                a.add(-(k as f64));
                a
            })
            .collect();
        let seq = parts.iter().fold(LogSumExp::new(), |a, &b| a.merge(b));
        assert!((tree_reduce(&parts).value() - seq.value()).abs() < 1e-14);
    }
}
