//! Brute-force invariant factors from determinantal divisors, for testing.
//!
//! `D_k` is the gcd of all `k × k` minors; the rank is the largest `k` with
//! `D_k ≠ 0` and the invariant factors are `d_k = D_k / D_{k-1}`. Cost is
//! exponential in the dimension, so this is only meant for tiny matrices.

use dashu_int::IBig;
use num_integer::Integer;

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &[Vec<IBig>]) -> IBig {
    let n = m.len();
    if n == 0 {
        return IBig::ONE;
    }
    let mut a: Vec<Vec<IBig>> = m.to_vec();
    let mut sign = IBig::ONE;
    let mut prev = IBig::ONE;
    for k in 0..n - 1 {
        if a[k][k] == IBig::ZERO {
            match (k + 1..n).find(|&r| a[r][k] != IBig::ZERO) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return IBig::ZERO,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// `(rank, [d_1, ..., d_rank])` of a dense integer matrix.
pub fn determinantal_report(m: &[Vec<i64>]) -> (usize, Vec<IBig>) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let big: Vec<Vec<IBig>> = m.iter().map(|r| r.iter().map(|&v| IBig::from(v)).collect()).collect();
    let mut prev = IBig::ONE;
    let mut divisors = Vec::new();
    for k in 1..=rows.min(cols) {
        let mut dk = IBig::ZERO;
        for rs in combinations(rows, k) {
            for cs in combinations(cols, k) {
                let sub: Vec<Vec<IBig>> = rs
                    .iter()
                    .map(|&r| cs.iter().map(|&c| big[r][c].clone()).collect())
                    .collect();
                let det = determinant(&sub);
                // dashu panics on gcd(0, 0)
                if det != IBig::ZERO {
                    dk = dk.gcd(&det);
                }
            }
        }
        if dk == IBig::ZERO {
            break;
        }
        divisors.push(&dk / &prev);
        prev = dk;
    }
    (divisors.len(), divisors)
}
