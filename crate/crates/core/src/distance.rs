use std::fmt::Write as _;

/// Dense symmetric `n × n` matrix of pairwise distances.
///
/// Pairs that are not connected (only possible for forest releases) hold
/// `f64::INFINITY`; [`DistanceMatrix::get`] reports them as `None` so that
/// callers never mistake them for a number.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

/// Output of a distance-release mechanism.
#[derive(Debug, Clone, PartialEq)]
pub struct Release {
    pub distances: DistanceMatrix,
    /// Noisy values that came out negative and were clamped to zero.
    pub clamped_count: usize,
}

/// Summary of `|released − exact|` over unordered pairs `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats {
    pub max_abs: f64,
    pub mean_abs: f64,
}

impl DistanceMatrix {
    /// All off-diagonal pairs unreachable, zero diagonal.
    pub fn unreachable(n: usize) -> Self {
        let mut data = vec![f64::INFINITY; n * n];
        for u in 0..n {
            data[u * n + u] = 0.0;
        }
        DistanceMatrix { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        DistanceMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Builds from full rows. Entry `(u, v)` for `u < v` is taken from row
    /// `u` and mirrored, so the result is exactly symmetric.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let n = rows.len();
        let mut m = DistanceMatrix::zeros(n);
        for u in 0..n {
            assert_eq!(rows[u].len(), n);
            for v in (u + 1)..n {
                m.set(u, v, rows[u][v]);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> Option<f64> {
        let d = self.data[u * self.n + v];
        d.is_finite().then_some(d)
    }

    /// Raw entry; `f64::INFINITY` when unreachable.
    #[inline]
    pub fn raw(&self, u: usize, v: usize) -> f64 {
        self.data[u * self.n + v]
    }

    /// Sets both `(u, v)` and `(v, u)`.
    #[inline]
    pub fn set(&mut self, u: usize, v: usize, d: f64) {
        self.data[u * self.n + v] = d;
        self.data[v * self.n + u] = d;
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|u| (0..u).all(|v| self.raw(u, v).to_bits() == self.raw(v, u).to_bits()))
    }

    pub fn has_zero_diagonal(&self) -> bool {
        (0..self.n).all(|u| self.raw(u, u) == 0.0)
    }

    /// Replaces negative entries by zero and returns how many were changed.
    pub fn clamp_negative(&mut self) -> usize {
        let mut count = 0;
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if self.raw(u, v) < 0.0 {
                    self.set(u, v, 0.0);
                    count += 1;
                }
            }
        }
        count
    }

    /// Max and mean absolute difference against `exact` over `u < v`.
    /// An unreachable entry on one side only counts as infinite error.
    pub fn error_against(&self, exact: &DistanceMatrix) -> ErrorStats {
        assert_eq!(self.n, exact.n);
        let mut max_abs = 0.0f64;
        let mut sum = 0.0;
        let mut pairs = 0usize;
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                let (a, b) = (self.raw(u, v), exact.raw(u, v));
                let err = if a.is_infinite() && b.is_infinite() {
                    0.0
                } else {
                    (a - b).abs()
                };
                max_abs = max_abs.max(err);
                sum += err;
                pairs += 1;
            }
        }
        ErrorStats {
            max_abs,
            mean_abs: if pairs == 0 { 0.0 } else { sum / pairs as f64 },
        }
    }

    /// `n` lines of `n` space-separated values; unreachable entries print
    /// as `inf`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for u in 0..self.n {
            for v in 0..self.n {
                if v > 0 {
                    out.push(' ');
                }
                let d = self.raw(u, v);
                if d.is_finite() {
                    let _ = write!(out, "{d}");
                } else {
                    out.push_str("inf");
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unreachable_reports_none() {
        let m = DistanceMatrix::unreachable(3);
        assert_eq!(m.get(0, 0), Some(0.0));
        assert_eq!(m.get(0, 1), None);
    }

    #[test]
    fn error_stats_over_pairs() {
        let exact = DistanceMatrix::from_rows(vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ]);
        let mut noisy = exact.clone();
        noisy.set(0, 2, 5.0);
        let s = noisy.error_against(&exact);
        assert_eq!(s.max_abs, 3.0);
        assert!((s.mean_abs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clamp_counts_pairs() {
        let mut m = DistanceMatrix::zeros(3);
        m.set(0, 1, -2.0);
        m.set(1, 2, 4.0);
        assert_eq!(m.clamp_negative(), 1);
        assert_eq!(m.raw(1, 0), 0.0);
        assert!(m.is_symmetric());
    }

    #[test]
    fn text_rendering() {
        let mut m = DistanceMatrix::unreachable(2);
        assert_eq!(m.to_text(), "0 inf\ninf 0\n");
        m.set(0, 1, 1.5);
        assert_eq!(m.to_text(), "0 1.5\n1.5 0\n");
    }
}
