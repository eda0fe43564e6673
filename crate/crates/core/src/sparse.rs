//! Sparse integer matrices in coordinate form, and their text dump format.
//!
//! The dump is a header line `rows cols nnz` followed by one `row col value`
//! line per nonzero entry, sorted by `(row, col)`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::scalar::ExactInt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    OutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("bad matrix dump at line {line}: {msg}")]
    Dump { line: usize, msg: String },
}

/// Nonzero entries sorted by `(row, col)`, without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparseIntMatrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<(u32, u32, T)>,
}

impl<T: ExactInt> SparseIntMatrix<T> {
    /// Duplicate positions are summed and zeros dropped.
    pub fn new(rows: usize, cols: usize, mut triples: Vec<(u32, u32, T)>) -> Result<Self, MatrixError> {
        if let Some(&(r, c, _)) = triples
            .iter()
            .find(|(r, c, _)| *r as usize >= rows || *c as usize >= cols)
        {
            return Err(MatrixError::OutOfRange {
                row: r as usize,
                col: c as usize,
                rows,
                cols,
            });
        }
        triples.sort_by_key(|&(r, c, _)| (r, c));
        let mut entries: Vec<(u32, u32, T)> = Vec::with_capacity(triples.len());
        for (r, c, v) in triples {
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 = last.2.clone() + v,
                _ => entries.push((r, c, v)),
            }
        }
        entries.retain(|e| !e.2.is_zero());
        Ok(SparseIntMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseIntMatrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn from_dense(dense: &[Vec<i64>]) -> Self {
        let rows = dense.len();
        let cols = dense.first().map_or(0, Vec::len);
        let triples = dense
            .iter()
            .enumerate()
            .flat_map(|(r, row)| {
                assert_eq!(row.len(), cols, "ragged dense matrix");
                row.iter()
                    .enumerate()
                    .map(move |(c, &v)| (r as u32, c as u32, T::from(v)))
            })
            .collect();
        Self::new(rows, cols, triples).expect("indices in range")
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut out = vec![vec![T::zero(); self.cols]; self.rows];
        for (r, c, v) in &self.entries {
            out[*r as usize][*c as usize] = v.clone();
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(u32, u32, T)] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.entries
            .binary_search_by_key(&(row as u32, col as u32), |&(r, c, _)| (r, c))
            .map_or_else(|_| T::zero(), |i| self.entries[i].2.clone())
    }

    pub fn transpose(&self) -> Self {
        let t = self.entries.iter().map(|(r, c, v)| (*c, *r, v.clone())).collect();
        Self::new(self.cols, self.rows, t).expect("indices in range")
    }

    /// Row `r` moves to `perm[r]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        let t = self
            .entries
            .iter()
            .map(|(r, c, v)| (perm[*r as usize] as u32, *c, v.clone()))
            .collect();
        Self::new(self.rows, self.cols, t).expect("indices in range")
    }

    /// Column `c` moves to `perm[c]`.
    pub fn permute_cols(&self, perm: &[usize]) -> Self {
        let t = self
            .entries
            .iter()
            .map(|(r, c, v)| (*r, perm[*c as usize] as u32, v.clone()))
            .collect();
        Self::new(self.rows, self.cols, t).expect("indices in range")
    }

    /// Multiply row `row` by `k`.
    pub fn scale_row(&self, row: usize, k: &T) -> Self {
        let t = self
            .entries
            .iter()
            .map(|(r, c, v)| {
                let v = if *r as usize == row { v.clone() * k.clone() } else { v.clone() };
                (*r, *c, v)
            })
            .collect();
        Self::new(self.rows, self.cols, t).expect("indices in range")
    }

    /// Entries grouped by row, each row sorted by column.
    pub fn row_vectors(&self) -> Vec<Vec<(u32, T)>> {
        let mut out = vec![Vec::new(); self.rows];
        for (r, c, v) in &self.entries {
            out[*r as usize].push((*c, v.clone()));
        }
        out
    }

    pub fn dump(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} {} {}", self.rows, self.cols, self.entries.len()).unwrap();
        for (r, c, v) in &self.entries {
            writeln!(s, "{r} {c} {v}").unwrap();
        }
        s
    }

    pub fn parse_dump(text: &str) -> Result<Self, MatrixError> {
        let err = |line: usize, msg: &str| MatrixError::Dump {
            line,
            msg: msg.to_string(),
        };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| err(1, "missing header"))?;
        let h: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| err(1, "header must be `rows cols nnz`"))?;
        let [rows, cols, nnz] = h[..] else {
            return Err(err(1, "header must be `rows cols nnz`"));
        };
        let mut triples = Vec::with_capacity(nnz);
        for (i, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [r, c, v] = parts[..] else {
                return Err(err(i + 1, "expected `row col value`"));
            };
            let r: u32 = r.parse().map_err(|_| err(i + 1, "bad row"))?;
            let c: u32 = c.parse().map_err(|_| err(i + 1, "bad column"))?;
            let v = T::from_str_radix(v, 10).map_err(|_| err(i + 1, "bad value"))?;
            triples.push((r, c, v));
        }
        if triples.len() != nnz {
            return Err(err(1, "entry count does not match header"));
        }
        let m = Self::new(rows, cols, triples)?;
        if m.nnz() != nnz {
            return Err(err(1, "duplicate or zero entries"));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dashu_int::IBig;

    #[test]
    fn construction_merges_and_drops_zeros() {
        let m = SparseIntMatrix::<IBig>::new(
            2,
            3,
            vec![
                (1, 2, IBig::from(4)),
                (0, 0, IBig::from(1)),
                (1, 2, IBig::from(-4)),
                (0, 1, IBig::from(2)),
                (0, 1, IBig::from(3)),
            ],
        )
        .unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), IBig::from(5));
        assert_eq!(m.get(1, 2), IBig::ZERO);
        assert!(SparseIntMatrix::<IBig>::new(1, 1, vec![(0, 1, IBig::ONE)]).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let m = SparseIntMatrix::<IBig>::from_dense(&[vec![0, -5, 5], vec![3, 3, 0]]);
        let text = m.dump();
        assert_eq!(text, "2 3 4\n0 1 -5\n0 2 5\n1 0 3\n1 1 3\n");
        assert_eq!(SparseIntMatrix::<IBig>::parse_dump(&text).unwrap(), m);
        assert!(SparseIntMatrix::<IBig>::parse_dump("2 3 1\n").is_err());
        assert!(SparseIntMatrix::<IBig>::parse_dump("1 1 1\n0 0 x\n").is_err());
    }

    #[test]
    fn transpose_and_permute() {
        let m = SparseIntMatrix::<IBig>::from_dense(&[vec![1, 2], vec![3, 4], vec![5, 6]]);
        assert_eq!(m.transpose().to_dense()[1], vec![IBig::from(2), IBig::from(4), IBig::from(6)]);
        let p = m.permute_rows(&[2, 0, 1]);
        assert_eq!(p.get(2, 0), IBig::from(1));
        let q = m.permute_cols(&[1, 0]);
        assert_eq!(q.get(0, 0), IBig::from(2));
    }
}
