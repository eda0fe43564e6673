//! Invariant factors of a small dense integer matrix by modular methods.
//!
//! The rank `r` comes from elimination modulo word-sized primes. Two
//! nonsingular `r x r` minors are evaluated exactly by Chinese remaindering
//! under the Hadamard bound; their gcd `M` is a multiple of the product of
//! the nonzero invariant factors. Further minors, evaluated modulo `M`, cut
//! it down. Diagonalizing over `Z/MZ` then recovers the factors while
//! keeping every entry below `M`.

use std::fmt::Debug;

use dashu_int::IBig;
use log::debug;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::gf::is_prime;

/// Residue primes are taken downwards from here.
const PRIME_CEILING: u64 = 1 << 31;
/// Primes tried for the rank; the largest rank seen wins.
const RANK_PRIMES: usize = 3;
/// Minors beyond the first two used to shrink the modulus.
const EXTRA_MINORS: usize = 6;

fn next_prime_below(mut n: u64) -> u64 {
    loop {
        n -= 1;
        if is_prime(n) {
            return n;
        }
    }
}

fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    a * b % q
}

fn inv_mod(a: u64, q: u64) -> u64 {
    let (mut r0, mut r1) = (q as i64, a as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (t0, t1) = (t1, t0 - k * t1);
    }
    debug_assert_eq!(r0, 1);
    t0.rem_euclid(q as i64) as u64
}

fn residue(x: &IBig, q: u64) -> u64 {
    match i64::try_from(x) {
        Ok(v) => v.rem_euclid(q as i64) as u64,
        Err(_) => {
            let qb = IBig::from(q);
            let r = ((x % &qb) + &qb) % &qb;
            u64::try_from(&r).expect("residue fits")
        }
    }
}

fn reduce(a: &[Vec<IBig>], q: u64) -> Vec<Vec<u64>> {
    a.iter().map(|row| row.iter().map(|x| residue(x, q)).collect()).collect()
}

/// Row echelon form mod `q`, visiting rows in `order` and columns in
/// `col_order`. Returns the pivot positions as `(row, col)` in original
/// indices.
fn echelon(a: &[Vec<u64>], q: u64, order: &[usize], col_order: &[usize]) -> Vec<(usize, usize)> {
    let mut w: Vec<Vec<u64>> = order
        .iter()
        .map(|&i| col_order.iter().map(|&j| a[i][j]).collect())
        .collect();
    let mut orig: Vec<usize> = order.to_vec();
    let cols = w.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut k = 0;
    for c in 0..cols {
        let Some(i) = (k..w.len()).find(|&i| w[i][c] != 0) else {
            continue;
        };
        w.swap(k, i);
        orig.swap(k, i);
        let inv = inv_mod(w[k][c], q);
        let (top, rest) = w.split_at_mut(k + 1);
        let prow = &top[k];
        for row in rest.iter_mut() {
            if row[c] == 0 {
                continue;
            }
            let f = q - mul_mod(row[c], inv, q);
            for j in c..cols {
                row[j] = (row[j] + f * prow[j]) % q;
            }
        }
        pivots.push((orig[k], col_order[c]));
        k += 1;
        if k == w.len() {
            break;
        }
    }
    pivots
}

fn det_mod(mut w: Vec<Vec<u64>>, q: u64) -> u64 {
    let n = w.len();
    let mut det = 1u64;
    for c in 0..n {
        let Some(i) = (c..n).find(|&i| w[i][c] != 0) else {
            return 0;
        };
        if i != c {
            w.swap(c, i);
            det = (q - det) % q;
        }
        det = mul_mod(det, w[c][c], q);
        let inv = inv_mod(w[c][c], q);
        let (top, rest) = w.split_at_mut(c + 1);
        let prow = &top[c];
        for row in rest.iter_mut() {
            if row[c] == 0 {
                continue;
            }
            let f = q - mul_mod(row[c], inv, q);
            for j in c..n {
                row[j] = (row[j] + f * prow[j]) % q;
            }
        }
    }
    det
}

/// Exact determinant of a square matrix by Chinese remaindering.
pub fn determinant(b: &[Vec<IBig>]) -> IBig {
    // log2 of the Hadamard bound, rounded up
    let bound: usize = b
        .iter()
        .map(|row| {
            let sq = row.iter().fold(IBig::ZERO, |acc, x| acc + x * x);
            dashu_int::ops::BitTest::bit_len(&sq).div_ceil(2)
        })
        .sum();
    // every prime exceeds 2^30
    let count = (bound + 2).div_ceil(30);
    debug!("snf: {}x{} determinant, Hadamard bound 2^{bound}, {count} primes", b.len(), b.len());
    let mut primes = Vec::with_capacity(count);
    let mut q = PRIME_CEILING;
    for _ in 0..count {
        q = next_prime_below(q);
        primes.push(q);
    }
    let residues: Vec<u64> = primes.par_iter().map(|&q| det_mod(reduce(b, q), q)).collect();
    let (mut x, mut m) = (IBig::ZERO, IBig::ONE);
    for (&q, &r) in primes.iter().zip(&residues) {
        let t = mul_mod((r + q - residue(&x, q)) % q, inv_mod(residue(&m, q), q), q);
        x += &m * IBig::from(t);
        m *= IBig::from(q);
    }
    if IBig::from(2u8) * &x > m {
        x -= m;
    }
    x
}

/// Arithmetic on representatives of `Z/MZ`.
trait ModRing {
    type E: Clone + PartialEq + Debug;
    fn zero(&self) -> Self::E;
    fn lift(&self, x: &IBig) -> Self::E;
    /// `a*x + b*y`.
    fn comb(&self, a: &Self::E, x: &Self::E, b: &Self::E, y: &Self::E) -> Self::E;
    /// `(g, s, t, u, v)` with `s x + t y = g = gcd(x, y)`, `u = -y/g`,
    /// `v = x/g`; `(s, t) = (1, 0)` whenever `x` divides `y`.
    fn xgcd(&self, x: &Self::E, y: &Self::E) -> [Self::E; 5];
    fn is_zero(&self, x: &Self::E) -> bool {
        *x == self.zero()
    }
    fn is_one(&self, x: &Self::E) -> bool;
    /// Pivot preference: smaller is better.
    fn size(&self, x: &Self::E) -> IBig;
    fn gcd_modulus(&self, x: &Self::E) -> IBig;
}

struct WordRing(u64);

impl ModRing for WordRing {
    type E = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn lift(&self, x: &IBig) -> u64 {
        residue(x, self.0)
    }

    fn comb(&self, a: &u64, x: &u64, b: &u64, y: &u64) -> u64 {
        let m = self.0 as u128;
        ((*a as u128 * *x as u128 + *b as u128 * *y as u128) % m) as u64
    }

    fn xgcd(&self, x: &u64, y: &u64) -> [u64; 5] {
        let m = self.0;
        let neg = |v: u64| (m - v % m) % m;
        if y % x == 0 {
            return [*x, 1, 0, neg(y / x), 1];
        }
        let (mut r0, mut r1) = (*x as i128, *y as i128);
        let (mut s0, mut s1) = (1i128, 0i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let k = r0 / r1;
            (r0, r1) = (r1, r0 - k * r1);
            (s0, s1) = (s1, s0 - k * s1);
            (t0, t1) = (t1, t0 - k * t1);
        }
        let g = r0 as u64;
        let wrap = |v: i128| v.rem_euclid(m as i128) as u64;
        [g, wrap(s0), wrap(t0), neg(y / g), x / g]
    }

    fn is_one(&self, x: &u64) -> bool {
        *x == 1 || *x == self.0 - 1
    }

    fn size(&self, x: &u64) -> IBig {
        IBig::from((*x).min(self.0 - x))
    }

    fn gcd_modulus(&self, x: &u64) -> IBig {
        let (mut a, mut b) = (*x, self.0);
        while a != 0 {
            (a, b) = (b % a, a);
        }
        IBig::from(b)
    }
}

struct BigRing(IBig);

impl ModRing for BigRing {
    type E = IBig;

    fn zero(&self) -> IBig {
        IBig::ZERO
    }

    fn lift(&self, x: &IBig) -> IBig {
        ((x % &self.0) + &self.0) % &self.0
    }

    fn comb(&self, a: &IBig, x: &IBig, b: &IBig, y: &IBig) -> IBig {
        (a * x + b * y) % &self.0
    }

    fn xgcd(&self, x: &IBig, y: &IBig) -> [IBig; 5] {
        use num_integer::Integer;
        let m = &self.0;
        let neg = |v: IBig| ((m - v % m) % m).clone();
        if (y % x).is_zero() {
            return [x.clone(), IBig::ONE, IBig::ZERO, neg(y / x), IBig::ONE];
        }
        let e = x.extended_gcd(y);
        let wrap = |v: IBig| ((v % m) + m) % m;
        [e.gcd.clone(), wrap(e.x), wrap(e.y), neg(y / &e.gcd), x / &e.gcd]
    }

    fn is_one(&self, x: &IBig) -> bool {
        x.is_one() || *x == &self.0 - IBig::ONE
    }

    fn size(&self, x: &IBig) -> IBig {
        let y = &self.0 - x;
        if y < *x {
            y
        } else {
            x.clone()
        }
    }

    fn gcd_modulus(&self, x: &IBig) -> IBig {
        use num_integer::Integer;
        x.gcd(&self.0)
    }
}

/// `gcd(det b, M)`, by triangularizing with unimodular row moves.
fn det_gcd<R: ModRing>(ring: &R, b: &[Vec<IBig>]) -> IBig {
    let mut w: Vec<Vec<R::E>> = b.iter().map(|row| row.iter().map(|x| ring.lift(x)).collect()).collect();
    let n = w.len();
    let zero = ring.zero();
    let mut det = ring.lift(&IBig::ONE);
    for c in 0..n {
        let Some(i) = (c..n).filter(|&i| !ring.is_zero(&w[i][c])).min_by_key(|&i| ring.size(&w[i][c])) else {
            return ring.gcd_modulus(&zero);
        };
        w.swap(c, i);
        for t in c + 1..n {
            if ring.is_zero(&w[t][c]) {
                continue;
            }
            let [_, s, tc, u, v] = ring.xgcd(&w[c][c], &w[t][c]);
            for j in c..n {
                let (x, y) = (w[c][j].clone(), w[t][j].clone());
                w[c][j] = ring.comb(&s, &x, &tc, &y);
                w[t][j] = ring.comb(&u, &x, &v, &y);
            }
        }
        det = ring.comb(&det, &w[c][c], &zero, &zero);
    }
    ring.gcd_modulus(&det)
}

/// Diagonalize over `Z/MZ`; returns `gcd(pivot, M)` for each pivot found.
fn diagonalize<R: ModRing>(ring: &R, a: &[Vec<IBig>]) -> Vec<IBig> {
    let mut w: Vec<Vec<R::E>> = a.iter().map(|row| row.iter().map(|x| ring.lift(x)).collect()).collect();
    let mut rows: Vec<usize> = (0..w.len()).collect();
    let mut cols: Vec<usize> = (0..w.first().map_or(0, |r| r.len())).collect();
    let mut out = Vec::new();
    loop {
        let mut best: Option<(IBig, usize, usize)> = None;
        'scan: for &i in &rows {
            for &j in &cols {
                let x = &w[i][j];
                if ring.is_zero(x) {
                    continue;
                }
                if ring.is_one(x) {
                    best = Some((IBig::ONE, i, j));
                    break 'scan;
                }
                let s = ring.size(x);
                if best.as_ref().is_none_or(|b| s < b.0) {
                    best = Some((s, i, j));
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };
        loop {
            for &t in &rows {
                if t == pi || ring.is_zero(&w[t][pj]) {
                    continue;
                }
                let [_, s, tc, u, v] = ring.xgcd(&w[pi][pj], &w[t][pj]);
                let trivial = tc == ring.zero();
                for &c in &cols {
                    let (x, y) = (w[pi][c].clone(), w[t][c].clone());
                    if !trivial {
                        w[pi][c] = ring.comb(&s, &x, &tc, &y);
                    }
                    w[t][c] = ring.comb(&u, &x, &v, &y);
                }
            }
            let mut dirty = false;
            for &c in &cols {
                if c == pj || ring.is_zero(&w[pi][c]) {
                    continue;
                }
                let [_, s, tc, u, v] = ring.xgcd(&w[pi][pj], &w[pi][c]);
                if tc == ring.zero() && !dirty {
                    // the pivot divides the entry and is alone in its column
                    w[pi][c] = ring.zero();
                    continue;
                }
                dirty = true;
                for &r in &rows {
                    let (x, y) = (w[r][pj].clone(), w[r][c].clone());
                    w[r][pj] = ring.comb(&s, &x, &tc, &y);
                    w[r][c] = ring.comb(&u, &x, &v, &y);
                }
            }
            if !dirty {
                break;
            }
        }
        out.push(ring.gcd_modulus(&w[pi][pj]));
        rows.retain(|&r| r != pi);
        cols.retain(|&c| c != pj);
    }
    out
}

/// Rank and invariant factors, as a divisibility chain, of a dense matrix.
pub fn dense_invariants(a: &[Vec<IBig>]) -> (usize, Vec<IBig>) {
    let n = a.len();
    if n == 0 || a[0].is_empty() {
        return (0, Vec::new());
    }
    let forward: Vec<usize> = (0..n).collect();
    let columns: Vec<usize> = (0..a[0].len()).collect();
    let mut q = PRIME_CEILING;
    let mut best: Option<(u64, Vec<(usize, usize)>)> = None;
    for _ in 0..RANK_PRIMES {
        q = next_prime_below(q);
        let piv = echelon(&reduce(a, q), q, &forward, &columns);
        if best.as_ref().is_none_or(|b| piv.len() > b.1.len()) {
            best = Some((q, piv));
        }
    }
    let (q, first) = best.unwrap();
    let r = first.len();
    if r == 0 {
        return (0, Vec::new());
    }
    let reduced = reduce(a, q);
    let reverse: Vec<usize> = (0..n).rev().collect();
    let second = echelon(&reduced, q, &reverse, &columns);
    debug_assert_eq!(second.len(), r);
    let minor = |piv: &[(usize, usize)]| -> Vec<Vec<IBig>> {
        let mut rs: Vec<usize> = piv.iter().map(|p| p.0).collect();
        let mut cs: Vec<usize> = piv.iter().map(|p| p.1).collect();
        rs.sort_unstable();
        cs.sort_unstable();
        rs.iter().map(|&i| cs.iter().map(|&j| a[i][j].clone()).collect()).collect()
    };
    let mut modulus = {
        use num_integer::Integer;
        let d1 = determinant(&minor(&first));
        let d2 = determinant(&minor(&second));
        d1.gcd(&d2)
    };
    // further minors only need their determinant modulo the current bound
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    let mut stale = 0;
    for _ in 0..EXTRA_MINORS {
        if modulus.is_one() || stale == 2 {
            break;
        }
        let mut order: Vec<usize> = (0..n).collect();
        let mut col_order = columns.clone();
        order.shuffle(&mut rng);
        col_order.shuffle(&mut rng);
        let b = minor(&echelon(&reduced, q, &order, &col_order));
        let g = match u64::try_from(&modulus) {
            Ok(m) if m < 1 << 63 => det_gcd(&WordRing(m), &b),
            _ => det_gcd(&BigRing(modulus.clone()), &b),
        };
        if g == modulus {
            stale += 1;
        } else {
            modulus = g;
            stale = 0;
        }
    }
    debug!(
        "snf: residual {}x{} of rank {}, modulus of {} bits",
        n,
        a[0].len(),
        r,
        dashu_int::ops::BitTest::bit_len(&modulus)
    );
    if modulus.is_one() {
        return (r, vec![IBig::ONE; r]);
    }
    let mut diag = match u64::try_from(&modulus) {
        Ok(m) if m < 1 << 63 => diagonalize(&WordRing(m), a),
        _ => diagonalize(&BigRing(modulus.clone()), a),
    };
    // Z/MZ is not local: the pivots can split a factor over coprime parts,
    // so only the normalized chain is meaningful; M stands for zero
    let len = diag.len().max(r);
    diag.resize(len, modulus.clone());
    let chain = super::normalize_diagonal(&diag);
    assert!(chain[r..].iter().all(|d| *d == modulus), "modular rank below the rank over Z");
    (r, chain[..r].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ibig(m: &[Vec<i64>]) -> Vec<Vec<IBig>> {
        m.iter().map(|r| r.iter().map(|&x| IBig::from(x)).collect()).collect()
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant(&ibig(&[vec![2, 1], vec![1, 3]])), IBig::from(5));
        assert_eq!(determinant(&ibig(&[vec![0, 1], vec![1, 0]])), IBig::from(-1));
        let big = vec![vec![1i64 << 40, 3], vec![5, -(1i64 << 41)]];
        let expect = IBig::from(1i64 << 40) * IBig::from(-(1i64 << 41)) - IBig::from(15);
        assert_eq!(determinant(&ibig(&big)), expect);
    }

    #[test]
    fn invariants() {
        let (r, d) = dense_invariants(&ibig(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]));
        assert_eq!(r, 3);
        assert_eq!(d, vec![IBig::from(2), IBig::from(6), IBig::from(12)]);
        let (r, d) = dense_invariants(&ibig(&[vec![4, 0], vec![0, 0]]));
        assert_eq!((r, d), (1, vec![IBig::from(4)]));
        assert_eq!(dense_invariants(&ibig(&[vec![0, 0]])), (0, vec![]));
    }
}
#[cfg(test)]
mod against_oracle {
    use super::*;
    use crate::snf::oracle;
    use rand::{Rng, SeedableRng};

    /// Low-rank products, so that the `M`-fold duplicates show up.
    #[test]
    fn low_rank_products() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for case in 0..500 {
            let (n, m, k) = (rng.gen_range(1..7), rng.gen_range(1..7), rng.gen_range(1..4));
            let basis: Vec<Vec<i64>> = (0..k).map(|_| (0..m).map(|_| rng.gen_range(-3..4)).collect()).collect();
            let a: Vec<Vec<i64>> = (0..n)
                .map(|_| {
                    let c: Vec<i64> = (0..k).map(|_| rng.gen_range(-3..4)).collect();
                    (0..m).map(|j| (0..k).map(|t| c[t] * basis[t][j]).sum()).collect()
                })
                .collect();
            let ib: Vec<Vec<IBig>> = a.iter().map(|r| r.iter().map(|&x| IBig::from(x)).collect()).collect();
            let (rank, full) = oracle::determinantal_report(&a);
            assert_eq!(dense_invariants(&ib), (rank, full), "case {case}: {a:?}");
        }
    }
}
