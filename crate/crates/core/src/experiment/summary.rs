//! Per-group statistics of a record set.

use std::fmt;

use super::{CoverRecord, ExperimentError};

/// `1/(6π)`.
pub const LIMIT: f64 = 0.053051647697298;

#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub group: String,
    pub records: usize,
    pub betti_positive: usize,
    /// Over the records with vanishing Betti number.
    pub min_ratio: Option<f64>,
    pub median_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    /// Median ratio of the tenth of the Betti-zero records with largest norm.
    pub top_decile_median: Option<f64>,
    /// `top_decile_median - 1/(6π)`.
    pub deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub groups: Vec<GroupSummary>,
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    })
}

pub fn summarize(records: &[CoverRecord]) -> Result<Summary, ExperimentError> {
    if records.is_empty() {
        return Err(ExperimentError::Empty);
    }
    let mut names: Vec<&str> = records.iter().map(|r| r.group.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    let groups = names
        .into_iter()
        .map(|name| {
            let rs: Vec<&CoverRecord> = records.iter().filter(|r| r.group == name).collect();
            let mut zero: Vec<&CoverRecord> = rs.iter().copied().filter(|r| r.betti == 0).collect();
            zero.sort_by_key(|r| (r.norm, r.key()));
            let ratios: Vec<f64> = zero.iter().map(|r| r.ratio_f64()).collect();
            let decile = ratios.len().div_ceil(10);
            let top = median(&ratios[ratios.len() - decile..]);
            GroupSummary {
                group: name.to_string(),
                records: rs.len(),
                betti_positive: rs.len() - zero.len(),
                min_ratio: ratios.iter().copied().reduce(f64::min),
                median_ratio: median(&ratios),
                max_ratio: ratios.iter().copied().reduce(f64::max),
                top_decile_median: top,
                deviation: top.map(|m| m - LIMIT),
            }
        })
        .collect();
    Ok(Summary { groups })
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x:.12}"));
        writeln!(
            f,
            "group,records,betti_positive,min_ratio,median_ratio,max_ratio,top_decile_median,deviation"
        )?;
        for g in &self.groups {
            writeln!(
                f,
                "{},{},{},{},{},{},{},{}",
                g.group,
                g.records,
                g.betti_positive,
                opt(g.min_ratio),
                opt(g.median_ratio),
                opt(g.max_ratio),
                opt(g.top_decile_median),
                opt(g.deviation)
            )?;
        }
        Ok(())
    }
}
