//! Cross-model comparisons: Pareto frontiers, rank disagreement between
//! cost indicators, matched comparison groups and the combined misnomer
//! report.
//!
//! All costs are "lower is better". Throughput is the one higher-better
//! indicator and is negated by [`ModelRecord::cost`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indicator {
    Params,
    Flops,
    Latency,
    Throughput,
    Activation,
    Mac,
    Memory,
    Carbon,
    Cost,
}

impl Indicator {
    pub const ALL: [Indicator; 9] = [
        Indicator::Params,
        Indicator::Flops,
        Indicator::Latency,
        Indicator::Throughput,
        Indicator::Activation,
        Indicator::Mac,
        Indicator::Memory,
        Indicator::Carbon,
        Indicator::Cost,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Indicator::Params => "params",
            Indicator::Flops => "flops",
            Indicator::Latency => "latency",
            Indicator::Throughput => "throughput",
            Indicator::Activation => "activation",
            Indicator::Mac => "mac",
            Indicator::Memory => "memory",
            Indicator::Carbon => "carbon",
            Indicator::Cost => "cost",
        }
    }

    pub fn higher_is_better(self) -> bool {
        self == Indicator::Throughput
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Indicator {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Indicator::ALL
            .into_iter()
            .find(|i| i.id() == s)
            .ok_or_else(|| AnalysisError::UnknownIndicator(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("unknown indicator '{0}'")]
    UnknownIndicator(String),
    #[error("record '{name}': {reason}")]
    InvalidRecord { name: String, reason: String },
    #[error("indicator '{indicator}' missing for: {}", .models.join(", "))]
    Coverage { indicator: Indicator, models: Vec<String> },
    #[error("insufficient data: {what} needs at least {needed} records, got {found}")]
    Insufficient {
        what: String,
        needed: usize,
        found: usize,
    },
    #[error("tolerance must lie in (0, 1), got {0}")]
    InvalidTolerance(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub name: String,
    pub family: Option<String>,
    /// Higher is better.
    pub quality: f64,
    /// Raw indicator values as reported.
    pub indicators: BTreeMap<Indicator, f64>,
}

impl ModelRecord {
    pub fn new(
        name: impl Into<String>,
        family: Option<String>,
        quality: f64,
        indicators: BTreeMap<Indicator, f64>,
    ) -> Result<Self, AnalysisError> {
        let record = Self {
            name: name.into(),
            family,
            quality,
            indicators,
        };
        record.check()?;
        Ok(record)
    }

    pub fn check(&self) -> Result<(), AnalysisError> {
        let invalid = |reason: String| AnalysisError::InvalidRecord {
            name: self.name.clone(),
            reason,
        };
        if !self.quality.is_finite() {
            return Err(invalid("quality must be finite".into()));
        }
        if self.indicators.is_empty() {
            return Err(invalid("at least one indicator is required".into()));
        }
        if let Some((i, v)) = self.indicators.iter().find(|(_, v)| !v.is_finite()) {
            return Err(invalid(format!("indicator {i} is not finite ({v})")));
        }
        Ok(())
    }

    pub fn value(&self, indicator: Indicator) -> Option<f64> {
        self.indicators.get(&indicator).copied()
    }

    /// Lower-is-better view of an indicator.
    pub fn cost(&self, indicator: Indicator) -> Option<f64> {
        self.value(indicator)
            .map(|v| if indicator.higher_is_better() { -v } else { v })
    }
}

fn cmp_f64(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

/// Indices of the non-dominated (quality, cost) points, ordered by cost
/// ascending with input order breaking ties. Exact duplicates are all kept.
pub fn pareto_indices(points: &[(f64, f64)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        cmp_f64(points[a].1, points[b].1)
            .then(cmp_f64(points[b].0, points[a].0))
            .then(a.cmp(&b))
    });
    let mut frontier = Vec::new();
    // Best quality among records with strictly lower cost.
    let mut best_cheaper = f64::NEG_INFINITY;
    let mut start = 0;
    while start < order.len() {
        let cost = points[order[start]].1;
        let group_best = points[order[start]].0;
        let mut end = start;
        while end < order.len() && points[order[end]].1 == cost {
            let q = points[order[end]].0;
            if q == group_best && group_best > best_cheaper {
                frontier.push(order[end]);
            }
            end += 1;
        }
        best_cheaper = best_cheaper.max(group_best);
        start = end;
    }
    frontier
}

fn require_indicator(
    records: &[ModelRecord],
    indicator: Indicator,
) -> Result<Vec<(f64, f64)>, AnalysisError> {
    let missing: Vec<String> = records
        .iter()
        .filter(|r| r.value(indicator).is_none())
        .map(|r| r.name.clone())
        .collect();
    if !missing.is_empty() {
        return Err(AnalysisError::Coverage {
            indicator,
            models: missing,
        });
    }
    Ok(records
        .iter()
        .map(|r| (r.quality, r.cost(indicator).unwrap_or_default()))
        .collect())
}

/// Records not strictly dominated in (quality up, cost down).
pub fn pareto_frontier(
    records: &[ModelRecord],
    cost: Indicator,
) -> Result<Vec<&ModelRecord>, AnalysisError> {
    let points = require_indicator(records, cost)?;
    Ok(pareto_indices(&points).into_iter().map(|i| &records[i]).collect())
}

/// Kendall tau-b with tie correction, in O(n log n).
///
/// Returns `None` when either sequence is constant (tau undefined).
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "kendall_tau_b needs equal-length inputs");
    let n = x.len() as u64;
    if n < 2 {
        return None;
    }
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| cmp_f64(a.0, b.0).then(cmp_f64(a.1, b.1)));

    let tie_pairs = |run: u64| run * (run - 1) / 2;
    let (mut ties_x, mut ties_xy) = (0u64, 0u64);
    let (mut run_x, mut run_xy) = (1u64, 1u64);
    for w in pairs.windows(2) {
        if w[0].0 == w[1].0 {
            run_x += 1;
            if w[0].1 == w[1].1 {
                run_xy += 1;
            } else {
                ties_xy += tie_pairs(run_xy);
                run_xy = 1;
            }
        } else {
            ties_x += tie_pairs(run_x);
            ties_xy += tie_pairs(run_xy);
            run_x = 1;
            run_xy = 1;
        }
    }
    ties_x += tie_pairs(run_x);
    ties_xy += tie_pairs(run_xy);

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let swaps = merge_sort_swaps(&mut ys);

    let mut ties_y = 0u64;
    let mut run_y = 1u64;
    for w in ys.windows(2) {
        if w[0] == w[1] {
            run_y += 1;
        } else {
            ties_y += tie_pairs(run_y);
            run_y = 1;
        }
    }
    ties_y += tie_pairs(run_y);

    let total = n * (n - 1) / 2;
    if total == ties_x || total == ties_y {
        return None;
    }
    let numerator =
        total as i128 - ties_x as i128 - ties_y as i128 + ties_xy as i128 - 2 * swaps as i128;
    let denominator = (((total - ties_x) as f64) * ((total - ties_y) as f64)).sqrt();
    Some((numerator as f64 / denominator).clamp(-1.0, 1.0))
}

/// Sorts in place and returns the number of inversions.
fn merge_sort_swaps(values: &mut [f64]) -> u64 {
    let n = values.len();
    if n < 2 {
        return 0;
    }
    let mut buf = values.to_vec();
    let mut swaps = 0u64;
    let mut width = 1;
    while width < n {
        let mut lo = 0;
        while lo < n {
            let mid = (lo + width).min(n);
            let hi = (lo + 2 * width).min(n);
            let (mut i, mut j, mut k) = (lo, mid, lo);
            while i < mid && j < hi {
                if values[j] < values[i] {
                    buf[k] = values[j];
                    swaps += (mid - i) as u64;
                    j += 1;
                } else {
                    buf[k] = values[i];
                    i += 1;
                }
                k += 1;
            }
            buf[k..k + mid - i].copy_from_slice(&values[i..mid]);
            k += mid - i;
            buf[k..k + hi - j].copy_from_slice(&values[j..hi]);
            lo = hi;
        }
        values.copy_from_slice(&buf);
        width *= 2;
    }
    swaps
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvertedPair {
    /// Cheaper under the first indicator, costlier under the second.
    pub model_a: String,
    pub model_b: String,
    pub indicator_a: Indicator,
    pub indicator_b: Indicator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankDisagreement {
    pub indicator_a: Indicator,
    pub indicator_b: Indicator,
    pub compared: usize,
    /// Kendall tau-b; `None` when one ordering is constant.
    pub kendall_tau: Option<f64>,
    pub inverted_pairs: Vec<InvertedPair>,
}

pub fn rank_disagreement(
    records: &[ModelRecord],
    indicator_a: Indicator,
    indicator_b: Indicator,
) -> Result<RankDisagreement, AnalysisError> {
    let rows: Vec<(&str, f64, f64)> = records
        .iter()
        .filter_map(|r| Some((r.name.as_str(), r.cost(indicator_a)?, r.cost(indicator_b)?)))
        .collect();
    if rows.len() < 2 {
        return Err(AnalysisError::Insufficient {
            what: format!("rank disagreement {indicator_a}/{indicator_b}"),
            needed: 2,
            found: rows.len(),
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let mut inverted_pairs = Vec::new();
    for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            let (a, b) = (rows[i], rows[j]);
            let (first, second) = match (cmp_f64(a.1, b.1), cmp_f64(a.2, b.2)) {
                (Ordering::Less, Ordering::Greater) => (a.0, b.0),
                (Ordering::Greater, Ordering::Less) => (b.0, a.0),
                _ => continue,
            };
            inverted_pairs.push(InvertedPair {
                model_a: first.to_string(),
                model_b: second.to_string(),
                indicator_a,
                indicator_b,
            });
        }
    }
    Ok(RankDisagreement {
        indicator_a,
        indicator_b,
        compared: rows.len(),
        kendall_tau: kendall_tau_b(&xs, &ys),
        inverted_pairs,
    })
}

/// Maximal groups whose raw indicator values all lie within
/// `rel_tolerance × |group minimum|` of each other. Only groups of two or
/// more are returned, each sorted by value.
pub fn matched_sets(
    records: &[ModelRecord],
    indicator: Indicator,
    rel_tolerance: f64,
) -> Result<Vec<Vec<&ModelRecord>>, AnalysisError> {
    if !(rel_tolerance > 0.0 && rel_tolerance < 1.0) {
        return Err(AnalysisError::InvalidTolerance(rel_tolerance));
    }
    let mut rows: Vec<(f64, &ModelRecord)> = records
        .iter()
        .filter_map(|r| Some((r.value(indicator)?, r)))
        .collect();
    rows.sort_by(|a, b| cmp_f64(a.0, b.0));
    let mut groups = Vec::new();
    let mut prev_end = 0;
    let mut end = 0;
    for start in 0..rows.len() {
        let lo = rows[start].0;
        end = end.max(start);
        while end + 1 < rows.len() && rows[end + 1].0 - lo <= rel_tolerance * lo.abs() {
            end += 1;
        }
        // Windows ending where the previous one ended are contained in it.
        if end > start && (start == 0 || end > prev_end) {
            groups.push(rows[start..=end].iter().map(|r| r.1).collect());
        }
        prev_end = end;
    }
    Ok(groups)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoInstability {
    pub model: String,
    pub frontier_under: Vec<Indicator>,
    pub dominated_under: Vec<Indicator>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageWarning {
    pub model: String,
    pub missing: Indicator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MisnomerReport {
    pub correlation: String,
    pub indicator_pairs_examined: usize,
    pub disagreements: Vec<RankDisagreement>,
    /// Frontier member names per indicator.
    pub frontiers: BTreeMap<Indicator, Vec<String>>,
    pub pareto_instability: Vec<ParetoInstability>,
    pub coverage_warnings: Vec<CoverageWarning>,
}

impl MisnomerReport {
    pub fn inverted_pairs(&self) -> impl Iterator<Item = &InvertedPair> {
        self.disagreements.iter().flat_map(|d| d.inverted_pairs.iter())
    }
}

pub fn misnomer_report(records: &[ModelRecord]) -> Result<MisnomerReport, AnalysisError> {
    if records.len() < 2 {
        return Err(AnalysisError::Insufficient {
            what: "misnomer report".into(),
            needed: 2,
            found: records.len(),
        });
    }
    for r in records {
        r.check()?;
    }
    let present: BTreeSet<Indicator> = records
        .iter()
        .flat_map(|r| r.indicators.keys().copied())
        .collect();
    let present: Vec<Indicator> = present.into_iter().collect();

    let mut disagreements = Vec::new();
    for (i, &a) in present.iter().enumerate() {
        for &b in &present[i + 1..] {
            match rank_disagreement(records, a, b) {
                Ok(d) => disagreements.push(d),
                Err(AnalysisError::Insufficient { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }

    let mut frontiers = BTreeMap::new();
    let mut on_frontier: BTreeMap<&str, Vec<Indicator>> = BTreeMap::new();
    let mut dominated: BTreeMap<&str, Vec<Indicator>> = BTreeMap::new();
    for &indicator in &present {
        let covered: Vec<ModelRecord> = records
            .iter()
            .filter(|r| r.value(indicator).is_some())
            .cloned()
            .collect();
        let members: BTreeSet<String> = pareto_frontier(&covered, indicator)?
            .into_iter()
            .map(|r| r.name.clone())
            .collect();
        for r in records.iter().filter(|r| r.value(indicator).is_some()) {
            let bucket = if members.contains(&r.name) {
                &mut on_frontier
            } else {
                &mut dominated
            };
            bucket.entry(r.name.as_str()).or_default().push(indicator);
        }
        let ordered = pareto_frontier(&covered, indicator)?
            .into_iter()
            .map(|r| r.name.clone())
            .collect();
        frontiers.insert(indicator, ordered);
    }

    let mut pareto_instability = Vec::new();
    let mut seen = BTreeSet::new();
    for r in records {
        if !seen.insert(r.name.as_str()) {
            continue;
        }
        if let (Some(up), Some(down)) = (on_frontier.get(r.name.as_str()), dominated.get(r.name.as_str())) {
            pareto_instability.push(ParetoInstability {
                model: r.name.clone(),
                frontier_under: up.clone(),
                dominated_under: down.clone(),
            });
        }
    }

    let coverage_warnings = records
        .iter()
        .flat_map(|r| {
            present
                .iter()
                .filter(|i| r.value(**i).is_none())
                .map(|&missing| CoverageWarning {
                    model: r.name.clone(),
                    missing,
                })
        })
        .collect();

    Ok(MisnomerReport {
        correlation: "kendall_tau_b".into(),
        indicator_pairs_examined: disagreements.len(),
        disagreements,
        frontiers,
        pareto_instability,
        coverage_warnings,
    })
}
