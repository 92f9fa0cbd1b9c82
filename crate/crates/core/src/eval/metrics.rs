//! Ranking metrics over a list of API positions and a set of used APIs.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

/// Depth for average precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cutoff {
    Full,
    At(usize),
}

/// 1 if any of the first `n` entries is relevant.
pub fn hit_at_n(ranked: &[usize], truth: &HashSet<usize>, n: usize) -> f64 {
    if ranked.iter().take(n).any(|a| truth.contains(a)) {
        1.0
    } else {
        0.0
    }
}

/// Mean of precision@i over the relevant positions `i ≤ M`; 0 if none.
pub fn average_precision(ranked: &[usize], truth: &HashSet<usize>, cutoff: Cutoff) -> f64 {
    let depth = match cutoff {
        Cutoff::Full => ranked.len(),
        Cutoff::At(n) => n.min(ranked.len()),
    };
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, a) in ranked[..depth].iter().enumerate() {
        if truth.contains(a) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    if hits == 0 {
        0.0
    } else {
        sum / hits as f64
    }
}

/// 1 / rank of the first relevant entry; 0 if none.
pub fn reciprocal_rank(ranked: &[usize], truth: &HashSet<usize>) -> f64 {
    ranked
        .iter()
        .position(|a| truth.contains(a))
        .map_or(0.0, |i| 1.0 / (i + 1) as f64)
}

/// Hit@N, MAP@N, MAP and MRR. Keys of the maps are the cutoffs N.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricSuite {
    pub hit_at: BTreeMap<usize, f64>,
    pub map_at: BTreeMap<usize, f64>,
    pub map: f64,
    pub mrr: f64,
}

impl MetricSuite {
    /// Metrics of a single ranked list.
    pub fn of_list(ranked: &[usize], truth: &HashSet<usize>, cutoffs: &[usize]) -> Self {
        Self {
            hit_at: cutoffs.iter().map(|&n| (n, hit_at_n(ranked, truth, n))).collect(),
            map_at: cutoffs
                .iter()
                .map(|&n| (n, average_precision(ranked, truth, Cutoff::At(n))))
                .collect(),
            map: average_precision(ranked, truth, Cutoff::Full),
            mrr: reciprocal_rank(ranked, truth),
        }
    }

    /// Arithmetic mean; all suites must share cutoffs. Empty input gives
    /// the default (empty) suite.
    pub fn mean<'a, I>(suites: I) -> Self
    where
        I: IntoIterator<Item = &'a MetricSuite>,
    {
        let suites: Vec<&MetricSuite> = suites.into_iter().collect();
        let Some(first) = suites.first() else {
            return Self::default();
        };
        let n = suites.len() as f64;
        let avg_map = |pick: fn(&MetricSuite) -> &BTreeMap<usize, f64>| -> BTreeMap<usize, f64> {
            pick(first)
                .keys()
                .map(|&k| (k, suites.iter().map(|s| pick(s)[&k]).sum::<f64>() / n))
                .collect()
        };
        Self {
            hit_at: avg_map(|s| &s.hit_at),
            map_at: avg_map(|s| &s.map_at),
            map: suites.iter().map(|s| s.map).sum::<f64>() / n,
            mrr: suites.iter().map(|s| s.mrr).sum::<f64>() / n,
        }
    }

    /// Column labels in display order: Hit@N…, MAP@N…, MAP, MRR.
    pub fn labels(&self) -> Vec<String> {
        let mut l: Vec<String> = self.hit_at.keys().map(|n| format!("Hit@{n}")).collect();
        l.extend(self.map_at.keys().map(|n| format!("MAP@{n}")));
        l.push("MAP".into());
        l.push("MRR".into());
        l
    }

    /// Values aligned with [`labels`](Self::labels).
    pub fn values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.hit_at.values().copied().collect();
        v.extend(self.map_at.values().copied());
        v.push(self.map);
        v.push(self.mrr);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truth(items: &[usize]) -> HashSet<usize> {
        items.iter().copied().collect()
    }

    #[test]
    fn hit_examples() {
        let ranked: Vec<usize> = (0..10).collect();
        assert_eq!(hit_at_n(&ranked, &truth(&[3]), 5), 1.0);
        assert_eq!(hit_at_n(&ranked, &truth(&[5]), 5), 0.0);
        assert_eq!(hit_at_n(&ranked, &truth(&[]), 5), 0.0);
    }

    #[test]
    fn ap_examples() {
        let ranked: Vec<usize> = (0..6).collect();
        assert_eq!(average_precision(&ranked, &truth(&[0]), Cutoff::Full), 1.0);
        assert_eq!(average_precision(&ranked, &truth(&[1]), Cutoff::Full), 0.5);
        let ap = average_precision(&ranked, &truth(&[0, 2]), Cutoff::Full);
        assert!((ap - (1.0 + 2.0 / 3.0) / 2.0).abs() < 1e-15);
        // relevant items below the cutoff score nothing
        assert_eq!(average_precision(&ranked, &truth(&[5]), Cutoff::At(5)), 0.0);
        assert_eq!(average_precision(&ranked, &truth(&[]), Cutoff::Full), 0.0);
    }

    #[test]
    fn rr_examples() {
        let ranked: Vec<usize> = (0..4).collect();
        assert_eq!(reciprocal_rank(&ranked, &truth(&[0])), 1.0);
        assert_eq!(reciprocal_rank(&ranked, &truth(&[1, 3])), 0.5);
        assert_eq!(reciprocal_rank(&ranked, &truth(&[9])), 0.0);
    }

    #[test]
    fn suite_mean_and_labels() {
        let ranked: Vec<usize> = (0..10).collect();
        let a = MetricSuite::of_list(&ranked, &truth(&[0]), &[5, 10]);
        let b = MetricSuite::of_list(&ranked, &truth(&[7]), &[5, 10]);
        let m = MetricSuite::mean([&a, &b]);
        assert_eq!(m.hit_at[&5], 0.5);
        assert_eq!(m.hit_at[&10], 1.0);
        assert_eq!(m.labels(), vec!["Hit@5", "Hit@10", "MAP@5", "MAP@10", "MAP", "MRR"]);
        assert_eq!(m.values().len(), 6);
        assert_eq!(MetricSuite::mean([]), MetricSuite::default());
    }
}
