//! Abelianized Reidemeister–Schreier relator matrix of the stabilizer of
//! the base point.
//!
//! Columns are the non-tree Schreier generators. Each relator is traced
//! from each coset; crossing the edge `(k, x)` forwards adds `+1` to its
//! column and crossing it backwards adds `-1`. Tree edges are trivial in
//! the subgroup and contribute nothing.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::catalog::Presentation;
use crate::cover::{PermRep, SchreierData};
use crate::scalar::ExactInt;
use crate::sparse::SparseIntMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RsError {
    #[error("presentation has {presentation} generators, permutation representation has {perms}")]
    GeneratorCount { presentation: usize, perms: usize },
    #[error("relator {relator:?} does not close up at coset {coset}")]
    NotClosed { relator: String, coset: usize },
}

/// Matrix rows together with the per-generator tree crossings of each row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsTrace<T> {
    pub matrix: SparseIntMatrix<T>,
    /// `tree_crossings[row][gen]`: signed number of tree edges of `gen`
    /// crossed while tracing the row.
    pub tree_crossings: Vec<Vec<i64>>,
}

pub fn rs_matrix<T: ExactInt>(
    pres: &Presentation,
    s: &SchreierData,
    rep: &PermRep,
) -> Result<SparseIntMatrix<T>, RsError> {
    Ok(trace(pres, s, rep, false)?.matrix)
}

/// As [`rs_matrix`], also recording tree-edge crossings.
pub fn rs_matrix_debug<T: ExactInt>(
    pres: &Presentation,
    s: &SchreierData,
    rep: &PermRep,
) -> Result<RsTrace<T>, RsError> {
    trace(pres, s, rep, true)
}

fn trace<T: ExactInt>(
    pres: &Presentation,
    s: &SchreierData,
    rep: &PermRep,
    debug: bool,
) -> Result<RsTrace<T>, RsError> {
    let n = pres.num_generators();
    if n != rep.num_generators() || n != s.num_generators {
        return Err(RsError::GeneratorCount {
            presentation: n,
            perms: rep.num_generators(),
        });
    }
    let index = s.index();
    let mut triples = Vec::new();
    let mut crossings = Vec::new();
    let mut acc: BTreeMap<u32, i64> = BTreeMap::new();
    for (j, r) in pres.relators.iter().enumerate() {
        let word = r.letters();
        for k in 0..index {
            acc.clear();
            let mut tree = vec![0i64; if debug { n } else { 0 }];
            let mut pt = s.cosets[k];
            for &l in &word {
                let next = rep.apply(pt, l);
                // forward edge (coset, gen) and the sign it is crossed with
                let (from, sign) = if l.inverse { (next, -1) } else { (pt, 1) };
                let coset = s.coset_of[from as usize];
                match s.column_of(coset, l.gen) {
                    Some(c) => *acc.entry(c).or_insert(0) += sign,
                    None if debug => tree[l.gen] += sign,
                    None => {}
                }
                pt = next;
            }
            if pt != s.cosets[k] {
                return Err(RsError::NotClosed {
                    relator: r.source.clone(),
                    coset: k,
                });
            }
            let row = (j * index + k) as u32;
            triples.extend(
                acc.iter()
                    .filter(|(_, &v)| v != 0)
                    .map(|(&c, &v)| (row, c, T::from(v))),
            );
            if debug {
                crossings.push(tree);
            }
        }
    }
    let matrix = SparseIntMatrix::new(pres.relators.len() * index, s.schreier_generators.len(), triples)
        .expect("indices in range");
    Ok(RsTrace {
        matrix,
        tree_crossings: crossings,
    })
}
