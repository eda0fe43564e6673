//! Sweeps over groups and primes: the full pipeline from a level to a
//! [`CoverRecord`], presets, deterministic parallel execution and resume.

pub mod io;
pub mod summary;

use std::collections::BTreeSet;
use std::path::PathBuf;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{CatalogError, GroupId, GroupSpec};
use crate::cover::{build_perm_rep, build_schreier, ProjectiveLine};
use crate::decimal::{real_to_string, Decimal, Real};
use crate::gf::{primes_in, FieldElem, Gf};
use crate::reduction::{
    diagnose, enumerate_level_ideals, reduce_at, LevelIdeal, ReducedGenerators, ReductionError, Surjectivity,
};
use crate::rs::{rs_matrix, RsError};
use crate::scalar::ExactInt;
use crate::snf::{elementary_divisors, DivisorReport};

pub use io::Format;
pub use summary::{summarize, GroupSummary, Summary};

/// Significant digits of `log_torsion` and `ratio` in output.
pub const OUTPUT_DIGITS: usize = 20;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Rs(#[from] RsError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed record file {path}: {msg}")]
    Records { path: PathBuf, msg: String },
    #[error("invalid sweep configuration: {0}")]
    Config(String),
    #[error("no records to summarize")]
    Empty,
}

/// One output row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverRecord {
    pub group: String,
    pub p: u64,
    pub f: usize,
    pub norm: u64,
    pub ideal: String,
    pub index: u64,
    pub transitive: bool,
    pub surjective: bool,
    pub betti: u64,
    pub log_torsion: String,
    pub volume: String,
    pub ratio: String,
}

impl CoverRecord {
    pub fn ratio_f64(&self) -> f64 {
        self.ratio.parse().unwrap_or(f64::NAN)
    }

    pub fn log_torsion_f64(&self) -> f64 {
        self.log_torsion.parse().unwrap_or(f64::NAN)
    }

    pub fn volume_f64(&self) -> f64 {
        self.volume.parse().unwrap_or(f64::NAN)
    }

    /// Sort key `(group, p, f, root indices)`.
    pub fn key(&self) -> RecordKey {
        RecordKey {
            group: self.group.clone(),
            p: self.p,
            f: self.f,
            roots: tag_indices(&self.ideal),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RecordKey {
    pub group: String,
    pub p: u64,
    pub f: usize,
    pub roots: Vec<u64>,
}

fn tag_indices(tag: &str) -> Vec<u64> {
    tag.split(';')
        .filter_map(|kv| kv.split_once('=').and_then(|(_, v)| v.parse().ok()))
        .collect()
}

/// Volume `2 · V_T · index` of a cover.
pub fn cover_volume(g: &GroupSpec, index: u64) -> Decimal {
    g.cover_volume(index)
}

/// Homology of the cover attached to one reduction homomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverHomology<T> {
    pub index: usize,
    pub transitive: bool,
    pub surjectivity: Surjectivity,
    pub report: DivisorReport<T>,
}

pub fn cover_homology<T: ExactInt>(
    g: &GroupSpec,
    red: &ReducedGenerators,
) -> Result<CoverHomology<T>, ExperimentError> {
    let line = ProjectiveLine::new(red.field.clone());
    let rep = build_perm_rep(red, &line);
    for r in &g.presentation.relators {
        let w = r.letters();
        if (0..rep.degree as u32).any(|i| rep.apply_word(i, &w) != i) {
            return Err(ReductionError::RelatorFailure {
                group: g.id.clone(),
                p: red.field.p(),
                ideal: "(permutation check)".into(),
                relator: r.source.clone(),
            }
            .into());
        }
    }
    let surjectivity = diagnose(red, rep.transitive);
    let s = build_schreier(&rep);
    let m = rs_matrix::<T>(&g.presentation, &s, &rep)?;
    let report = elementary_divisors(&m);
    Ok(CoverHomology {
        index: s.index(),
        transitive: rep.transitive,
        surjectivity,
        report,
    })
}

/// Homology at an arbitrary root assignment.
pub fn homology_at<T: ExactInt>(
    g: &GroupSpec,
    field: &Gf,
    roots: &[FieldElem],
) -> Result<CoverHomology<T>, ExperimentError> {
    let red = reduce_at(g, field, roots)?;
    cover_homology(g, &red)
}

fn format_real(x: &Real) -> String {
    real_to_string(x, OUTPUT_DIGITS)
}

/// Run the full pipeline for one level.
pub fn compute_record(g: &GroupSpec, level: &LevelIdeal) -> Result<CoverRecord, ExperimentError> {
    let h: CoverHomology<crate::Int> = homology_at(g, &level.field, &level.roots)?;
    let volume = cover_volume(g, h.index as u64);
    let log_torsion = h.report.log_torsion();
    let ratio = &log_torsion / volume.to_real();
    Ok(CoverRecord {
        group: g.id.clone(),
        p: level.p,
        f: level.f,
        norm: level.norm,
        ideal: level.tag(),
        index: h.index as u64,
        transitive: h.transitive,
        surjective: h.surjectivity.surjective,
        betti: h.report.betti() as u64,
        log_torsion: format_real(&log_torsion),
        volume: volume.to_string(),
        ratio: format_real(&ratio),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum SkipReason {
    BadPrime(String),
    NoLevel,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Skipped {
    pub group: String,
    pub p: u64,
    pub reason: SkipReason,
}

impl Skipped {
    pub fn reason_text(&self) -> String {
        match &self.reason {
            SkipReason::BadPrime(r) => format!("bad-prime:{r}"),
            SkipReason::NoLevel => "no-level".to_string(),
        }
    }
}

/// Parameters of a sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub groups: Vec<GroupId>,
    pub p_min: u64,
    pub p_max: u64,
    pub max_norm: Option<u64>,
    pub degrees: Vec<usize>,
    pub one_per_p: bool,
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub resume: bool,
}

impl SweepConfig {
    pub fn new(groups: Vec<GroupId>, p_min: u64, p_max: u64) -> SweepConfig {
        SweepConfig {
            groups,
            p_min,
            p_max,
            max_norm: None,
            degrees: vec![1],
            one_per_p: false,
            jobs: 1,
            out: None,
            format: Format::Csv,
            resume: false,
        }
    }

    /// Named presets; `paper-set-2` and `desk-set-2` are per group and not
    /// defined for H1.
    pub fn preset(name: &str, group: GroupId) -> Result<SweepConfig, ExperimentError> {
        let table = |g: GroupId| -> Option<(u64, u64)> {
            match g {
                GroupId::H1 => None,
                GroupId::H2 => Some((150_000, 400)),
                GroupId::H3 => Some((94_200, 307)),
                GroupId::H4 => Some((66_000, 257)),
                GroupId::H5 => Some((63_000, 257)),
                GroupId::H6 => Some((55_000, 233)),
            }
        };
        let second = |cap_norm: u64, cap_p: u64| -> Result<SweepConfig, ExperimentError> {
            let (a, b) = table(group)
                .ok_or_else(|| ExperimentError::Config(format!("{name} has no ranges for {group}")))?;
            let mut c = SweepConfig::new(vec![group], 2, b.min(cap_p));
            c.max_norm = Some(a.min(cap_norm));
            c.degrees = vec![2];
            Ok(c)
        };
        match name {
            "paper-set-1" => {
                let mut c = SweepConfig::new(vec![group], 401, 50_000);
                c.max_norm = Some(50_000);
                Ok(c)
            }
            "paper-set-2" => second(u64::MAX, u64::MAX),
            "desk-set-1" => {
                let mut c = SweepConfig::new(vec![group], 401, 1000);
                c.max_norm = Some(50_000);
                Ok(c)
            }
            "desk-set-2" => second(50_000, 1000),
            _ => Err(ExperimentError::Config(format!(
                "unknown preset {name:?}; expected paper-set-1, paper-set-2, desk-set-1 or desk-set-2"
            ))),
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::Config(m.to_string()));
        if self.groups.is_empty() {
            return bad("no groups selected");
        }
        if self.p_min > self.p_max {
            return bad("empty p range");
        }
        if self.degrees.is_empty() || self.degrees.contains(&0) {
            return bad("residue degrees must be positive");
        }
        if self.max_norm.is_some_and(|n| n < 2) {
            return bad("norm cap excludes every prime");
        }
        if self.jobs == 0 {
            return bad("jobs must be at least 1");
        }
        Ok(())
    }
}

struct WorkItem {
    group: GroupId,
    level: LevelIdeal,
}

fn norm_fits(p: u64, f: usize, cap: Option<u64>) -> bool {
    let Some(cap) = cap else { return true };
    let mut n: u64 = 1;
    for _ in 0..f {
        n = match n.checked_mul(p) {
            Some(v) if v <= cap => v,
            _ => return false,
        };
    }
    true
}

/// Enumerate the levels of a sweep, with the primes that contributed none.
fn plan(cfg: &SweepConfig) -> Result<(Vec<WorkItem>, Vec<Skipped>), ExperimentError> {
    let mut items = Vec::new();
    let mut skipped = Vec::new();
    let mut groups = cfg.groups.clone();
    groups.sort();
    groups.dedup();
    for gid in groups {
        let g = crate::catalog::get_group(gid);
        for p in primes_in(cfg.p_min, cfg.p_max) {
            let max_f = cfg
                .degrees
                .iter()
                .copied()
                .filter(|&f| norm_fits(p, f, cfg.max_norm))
                .max();
            let Some(max_f) = max_f else { continue };
            let levels = match enumerate_level_ideals(&g, p, max_f) {
                Ok(l) => l,
                Err(ReductionError::BadPrime { reason, .. }) => {
                    info!("{gid}: skipping p = {p} ({reason})");
                    skipped.push(Skipped {
                        group: gid.to_string(),
                        p,
                        reason: SkipReason::BadPrime(reason.to_string()),
                    });
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            let mut levels: Vec<LevelIdeal> = levels
                .into_iter()
                .filter(|l| cfg.degrees.contains(&l.f) && norm_fits(p, l.f, cfg.max_norm))
                .collect();
            if cfg.one_per_p {
                levels.truncate(1);
            }
            if levels.is_empty() {
                info!("{gid}: no admissible level over p = {p}");
                skipped.push(Skipped {
                    group: gid.to_string(),
                    p,
                    reason: SkipReason::NoLevel,
                });
            }
            items.extend(levels.into_iter().map(|level| WorkItem { group: gid, level }));
        }
    }
    Ok((items, skipped))
}

/// Outcome of [`run_sweep`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepResult {
    /// All records of the configuration, in output order.
    pub records: Vec<CoverRecord>,
    /// Records computed by this run (the rest came from the resumed file).
    pub computed: usize,
    pub skipped: Vec<Skipped>,
}

/// Run a sweep. Records are produced in `(group, p, ideal)` order whatever
/// the job count; with an output path they are written as they complete,
/// and with `resume` records already in the file are not recomputed.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult, ExperimentError> {
    cfg.validate()?;
    let (items, skipped) = plan(cfg)?;
    let existing = match (&cfg.out, cfg.resume) {
        (Some(path), true) if path.exists() => io::read_records(path, cfg.format)?,
        _ => Vec::new(),
    };
    let done: BTreeSet<RecordKey> = existing.iter().map(CoverRecord::key).collect();
    let todo: Vec<&WorkItem> = items
        .iter()
        .filter(|w| {
            let key = RecordKey {
                group: w.group.to_string(),
                p: w.level.p,
                f: w.level.f,
                roots: w.level.roots.iter().map(|r| w.level.field.index_of(r)).collect(),
            };
            !done.contains(&key)
        })
        .collect();
    info!(
        "{} levels planned, {} already present, {} to compute",
        items.len(),
        items.len() - todo.len(),
        todo.len()
    );

    let mut writer = match &cfg.out {
        Some(path) => Some(io::RecordWriter::open(path, cfg.format, cfg.resume && !existing.is_empty())?),
        None => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    let specs: Vec<(GroupId, GroupSpec)> = cfg.groups.iter().map(|&g| (g, crate::catalog::get_group(g))).collect();
    let spec_of = |g: GroupId| &specs.iter().find(|(id, _)| *id == g).unwrap().1;

    let mut computed = Vec::with_capacity(todo.len());
    let chunk = (cfg.jobs * 4).max(1);
    for batch in todo.chunks(chunk) {
        let results: Vec<Result<CoverRecord, ExperimentError>> = pool.install(|| {
            batch
                .par_iter()
                .map(|w| compute_record(spec_of(w.group), &w.level))
                .collect()
        });
        for r in results {
            let rec = r?;
            info!("{} p={} f={} {}: betti {} ratio {}", rec.group, rec.p, rec.f, rec.ideal, rec.betti, rec.ratio);
            if let Some(w) = writer.as_mut() {
                w.write(&rec)?;
            }
            computed.push(rec);
        }
    }
    let n_computed = computed.len();
    let mut records = existing;
    let in_order = records.last().zip(computed.first()).is_none_or(|(a, b)| a.key() < b.key());
    records.extend(computed);
    if !in_order {
        records.sort_by_key(CoverRecord::key);
    }
    if let Some(w) = writer {
        w.finish()?;
        let path = cfg.out.as_ref().unwrap();
        if !in_order {
            warn!("resumed records out of order; rewriting {}", path.display());
            io::write_records(path, cfg.format, &records)?;
        }
        io::write_skipped(&io::skipped_path(path), &skipped)?;
    }
    Ok(SweepResult {
        records,
        computed: n_computed,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::get_group;

    #[test]
    fn volumes() {
        let h2 = get_group(GroupId::H2);
        assert_eq!(cover_volume(&h2, 1).to_string(), "0.3430033226");
        assert_eq!(cover_volume(&h2, 150).to_string(), "51.4504983900");
        let h6 = get_group(GroupId::H6);
        assert_eq!(cover_volume(&h6, 1).to_string(), "1.3459716090");
    }

    #[test]
    fn presets() {
        let c = SweepConfig::preset("paper-set-2", GroupId::H3).unwrap();
        assert_eq!((c.p_max, c.max_norm, c.degrees.clone()), (307, Some(94_200), vec![2]));
        assert!(SweepConfig::preset("paper-set-2", GroupId::H1).is_err());
        let c = SweepConfig::preset("paper-set-1", GroupId::H1).unwrap();
        assert_eq!((c.p_min, c.max_norm), (401, Some(50_000)));
        assert!(SweepConfig::preset("desk-set-1", GroupId::H2).unwrap().p_max <= 1000);
        assert!(SweepConfig::preset("nope", GroupId::H2).is_err());
    }

    #[test]
    fn empty_sweep_records_skip() {
        let cfg = SweepConfig::new(vec![GroupId::H2], 11, 11);
        let r = run_sweep(&cfg).unwrap();
        assert!(r.records.is_empty());
        assert_eq!(r.skipped.len(), 1);
        assert_eq!(r.skipped[0].reason, SkipReason::NoLevel);
    }

    #[test]
    fn small_sweep_records() {
        let mut cfg = SweepConfig::new(vec![GroupId::H3], 2, 100);
        cfg.jobs = 2;
        let r = run_sweep(&cfg).unwrap();
        assert!(!r.records.is_empty());
        assert!(r.skipped.iter().any(|s| s.p == 2 && matches!(s.reason, SkipReason::BadPrime(_))));
        for rec in &r.records {
            assert_eq!(rec.norm, rec.p);
            if rec.transitive {
                assert_eq!(rec.index, rec.p + 1);
            }
            let lhs = rec.ratio_f64() * rec.volume_f64();
            assert!((lhs - rec.log_torsion_f64()).abs() <= 1e-12 * rec.log_torsion_f64().max(1.0));
        }
        let keys: Vec<RecordKey> = r.records.iter().map(CoverRecord::key).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn tag_parsing() {
        assert_eq!(tag_indices("z=12;s=301"), vec![12, 301]);
    }
}
