//! Finite fields `F_p` and `F_{p^a}` in the power basis of a canonical modulus.
//!
//! Elements are coefficient vectors `c[0] + c[1] x + ... + c[a-1] x^{a-1}`
//! reduced modulo the monic irreducible polynomial chosen by [`Gf::new`].
//! The canonical total order on elements is lexicographic on
//! `(c[a-1], ..., c[0])`, which coincides with the order of
//! [`Gf::index_of`], the base-`p` number with `c[a-1]` as the leading digit.

mod poly;

use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

pub use poly::{poly_roots, poly_roots_exhaustive, Poly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1, got {0}")]
    InvalidDegree(usize),
    #[error("field of order {p}^{degree} does not fit in 63 bits")]
    FieldTooLarge { p: u64, degree: usize },
    #[error("inversion of zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("the zero polynomial has no finite root set")]
    ZeroPolynomial,
}

pub type Result<T> = std::result::Result<T, GfError>;

/// Description of a finite field: characteristic, degree and modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldDesc {
    pub p: u64,
    pub degree: usize,
    /// Monic modulus, ascending coefficients, length `degree + 1`.
    /// For prime fields this is the placeholder `x - 0`.
    pub modulus: Vec<u64>,
    pub order: u64,
}

/// An element of some [`Gf`]. Carries no field reference; the field
/// operations check membership by coefficient count.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    c: SmallVec<[u64; 4]>,
}

impl FieldElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&v| v == 0)
    }

    /// True when the element lies in the prime subfield.
    pub fn is_prime_field(&self) -> bool {
        self.c[1..].iter().all(|&v| v == 0)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.len() == 1 {
            return write!(f, "{}", self.c[0]);
        }
        write!(f, "[")?;
        for (i, v) in self.c.iter().enumerate().rev() {
            if i + 1 != self.c.len() {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// Binary operations exposed through [`Gf::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Inv,
    Neg,
}

/// A finite field handle. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf(Arc<FieldDesc>);

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.0.p, self.0.degree)
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    if m <= 1 << 32 {
        return a * b % m;
    }
    ((a as u128 * b as u128) % m as u128) as u64
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Inverse of the nonzero `x` modulo the irreducible `m` over `F_p`, by the
/// extended Euclidean algorithm. Coefficients ascending.
fn poly_inverse(x: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let (mut r0, mut r1) = (m.to_vec(), x.to_vec());
    trim(&mut r1);
    let (mut s0, mut s1) = (Vec::new(), vec![1u64]);
    while r1.len() > 1 {
        // r0 = q r1 + r, s = s0 - q s1
        let lead = pow_mod(r1[r1.len() - 1], p - 2, p);
        let mut q = vec![0u64; r0.len() - r1.len() + 1];
        while r0.len() >= r1.len() {
            let shift = r0.len() - r1.len();
            let t = mul_mod(r0[r0.len() - 1], lead, p);
            q[shift] = t;
            for (i, &b) in r1.iter().enumerate() {
                let slot = &mut r0[shift + i];
                *slot = (*slot + p - mul_mod(t, b, p)) % p;
            }
            trim(&mut r0);
        }
        let mut s = vec![0u64; (q.len() + s1.len() - 1).max(s0.len())];
        s[..s0.len()].copy_from_slice(&s0);
        for (i, &a) in q.iter().enumerate() {
            for (j, &b) in s1.iter().enumerate() {
                s[i + j] = (s[i + j] + p - mul_mod(a, b, p)) % p;
            }
        }
        trim(&mut s);
        // r0 now holds the remainder
        std::mem::swap(&mut r0, &mut r1);
        (s0, s1) = (s1, s);
    }
    let c = pow_mod(r1[0], p - 2, p);
    s1.iter().map(|&a| mul_mod(a, c, p)).collect()
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes in `lo..=hi`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi).filter(|&n| is_prime(n)).collect()
}

impl Gf {
    /// The canonical field of order `p^degree`.
    ///
    /// The modulus is the first monic irreducible polynomial when the
    /// coefficient vectors `(c[a-1], ..., c[0])` are scanned in
    /// lexicographic order.
    pub fn new(p: u64, degree: usize) -> Result<Gf> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if degree < 1 {
            return Err(GfError::InvalidDegree(degree));
        }
        let mut order: u64 = 1;
        for _ in 0..degree {
            order = order
                .checked_mul(p)
                .filter(|&o| o < (1 << 62))
                .ok_or(GfError::FieldTooLarge { p, degree })?;
        }
        if degree == 1 {
            return Ok(Gf(Arc::new(FieldDesc {
                p,
                degree,
                modulus: vec![0, 1],
                order,
            })));
        }
        let prime = Gf::new(p, 1)?;
        let tail_count = order;
        for code in 0..tail_count {
            // `code` in base p with the top digit being c[a-1].
            let mut coeffs = vec![0u64; degree + 1];
            let mut rest = code;
            for c in coeffs.iter_mut().take(degree) {
                *c = rest % p;
                rest /= p;
            }
            coeffs[degree] = 1;
            let f = Poly::from_coeffs(
                &prime,
                coeffs.iter().map(|&c| prime.from_u64(c)).collect(),
            );
            if f.is_irreducible(&prime) {
                return Ok(Gf(Arc::new(FieldDesc {
                    p,
                    degree,
                    modulus: coeffs,
                    order,
                })));
            }
        }
        unreachable!("every degree has an irreducible polynomial over F_p")
    }

    pub fn desc(&self) -> &FieldDesc {
        &self.0
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    /// Number of elements `q = p^degree`.
    pub fn order(&self) -> u64 {
        self.0.order
    }

    pub fn contains(&self, x: &FieldElem) -> bool {
        x.c.len() == self.0.degree && x.c.iter().all(|&v| v < self.0.p)
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem {
            c: SmallVec::from_elem(0, self.0.degree),
        }
    }

    pub fn one(&self) -> FieldElem {
        self.from_u64(1)
    }

    pub fn from_u64(&self, v: u64) -> FieldElem {
        let mut e = self.zero();
        e.c[0] = v % self.0.p;
        e
    }

    pub fn from_i64(&self, v: i64) -> FieldElem {
        let p = self.0.p as i128;
        self.from_u64((v as i128).rem_euclid(p) as u64)
    }

    /// The class of the polynomial variable `x` (generator of the power basis).
    pub fn generator(&self) -> FieldElem {
        if self.0.degree == 1 {
            // x ≡ 0 modulo the placeholder modulus.
            return self.zero();
        }
        let mut e = self.zero();
        e.c[1] = 1;
        e
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElem> {
        if coeffs.len() != self.0.degree {
            return Err(GfError::MixedFields);
        }
        Ok(FieldElem {
            c: coeffs.iter().map(|&v| v % self.0.p).collect(),
        })
    }

    /// Position of `x` in the canonical element order.
    pub fn index_of(&self, x: &FieldElem) -> u64 {
        x.c.iter().rev().fold(0u64, |acc, &v| acc * self.0.p + v)
    }

    pub fn from_index(&self, mut idx: u64) -> FieldElem {
        let mut e = self.zero();
        for c in e.c.iter_mut() {
            *c = idx % self.0.p;
            idx /= self.0.p;
        }
        e
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.order()).map(move |i| self.from_index(i))
    }

    pub fn add(&self, x: &FieldElem, y: &FieldElem) -> FieldElem {
        let p = self.0.p;
        FieldElem {
            c: x.c
                .iter()
                .zip(&y.c)
                .map(|(&a, &b)| {
                    let s = a + b;
                    if s >= p {
                        s - p
                    } else {
                        s
                    }
                })
                .collect(),
        }
    }

    pub fn sub(&self, x: &FieldElem, y: &FieldElem) -> FieldElem {
        let p = self.0.p;
        FieldElem {
            c: x.c
                .iter()
                .zip(&y.c)
                .map(|(&a, &b)| if a >= b { a - b } else { a + p - b })
                .collect(),
        }
    }

    pub fn neg(&self, x: &FieldElem) -> FieldElem {
        let p = self.0.p;
        FieldElem {
            c: x.c.iter().map(|&a| if a == 0 { 0 } else { p - a }).collect(),
        }
    }

    pub fn mul(&self, x: &FieldElem, y: &FieldElem) -> FieldElem {
        let p = self.0.p;
        let n = self.0.degree;
        if n == 1 {
            return FieldElem {
                c: SmallVec::from_elem(mul_mod(x.c[0], y.c[0], p), 1),
            };
        }
        if n == 2 && p <= 1 << 31 {
            // t² = -m₁t - m₀, every partial sum stays below 2^63
            let (m0, m1) = (self.0.modulus[0], self.0.modulus[1]);
            let (x0, x1, y0, y1) = (x.c[0], x.c[1], y.c[0], y.c[1]);
            let top = x1 * y1 % p;
            let c0 = (x0 * y0 + top * (p - m0)) % p;
            let c1 = ((x0 * y1 + x1 * y0) % p + top * (p - m1)) % p;
            return FieldElem {
                c: SmallVec::from_buf_and_len([c0, c1, 0, 0], 2),
            };
        }
        let mut prod: SmallVec<[u64; 8]> = SmallVec::from_elem(0, 2 * n - 1);
        for (i, &a) in x.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.c.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mul_mod(a, b, p)) % p;
            }
        }
        let m = &self.0.modulus;
        for k in (n..2 * n - 1).rev() {
            let top = prod[k];
            if top == 0 {
                continue;
            }
            prod[k] = 0;
            // x^k = x^{k-n} * x^n and x^n = -sum m_i x^i.
            for (i, &mi) in m.iter().take(n).enumerate() {
                let t = mul_mod(top, mi, p);
                let slot = &mut prod[k - n + i];
                *slot = (*slot + p - t) % p;
            }
        }
        FieldElem {
            c: prod[..n].iter().copied().collect(),
        }
    }

    pub fn square(&self, x: &FieldElem) -> FieldElem {
        self.mul(x, x)
    }

    pub fn pow(&self, x: &FieldElem, mut exp: u128) -> FieldElem {
        let mut acc = self.one();
        let mut base = x.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.square(&base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: &FieldElem) -> Result<FieldElem> {
        if x.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        if self.0.degree == 1 {
            return Ok(self.from_u64(pow_mod(x.c[0], self.0.p - 2, self.0.p)));
        }
        let c = poly_inverse(&x.c, &self.0.modulus, self.0.p);
        let mut e = self.zero();
        e.c[..c.len()].copy_from_slice(&c);
        Ok(e)
    }

    pub fn div(&self, x: &FieldElem, y: &FieldElem) -> Result<FieldElem> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    /// The Frobenius automorphism `x ↦ x^p`.
    pub fn frobenius(&self, x: &FieldElem) -> FieldElem {
        if self.0.degree == 1 {
            return x.clone();
        }
        self.pow(x, self.0.p as u128)
    }

    /// Degree over `F_p` of the subfield generated by `x`.
    pub fn element_degree(&self, x: &FieldElem) -> usize {
        let n = self.0.degree;
        let mut y = x.clone();
        for e in 1..=n {
            y = self.frobenius(&y);
            if n % e == 0 && &y == x {
                return e;
            }
        }
        n
    }

    /// Embed an element of the prime field into this field.
    pub fn embed_prime(&self, x: &FieldElem) -> FieldElem {
        self.from_u64(x.c[0])
    }

    /// Square root, if one exists.
    pub fn sqrt(&self, x: &FieldElem) -> Option<FieldElem> {
        let f = Poly::from_coeffs(self, vec![self.neg(x), self.zero(), self.one()]);
        poly_roots(self, &f).ok()?.into_iter().next()
    }

    /// Checked entry point for the four basic operations; `y` is ignored
    /// for the unary ones.
    pub fn apply(&self, op: ArithOp, x: &FieldElem, y: Option<&FieldElem>) -> Result<FieldElem> {
        if !self.contains(x) || y.is_some_and(|y| !self.contains(y)) {
            return Err(GfError::MixedFields);
        }
        let rhs = || y.ok_or(GfError::MixedFields);
        match op {
            ArithOp::Add => Ok(self.add(x, rhs()?)),
            ArithOp::Mul => Ok(self.mul(x, rhs()?)),
            ArithOp::Inv => self.inv(x),
            ArithOp::Neg => Ok(self.neg(x)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn prime_field_basics() {
        let f7 = Gf::new(7, 1).unwrap();
        assert_eq!(f7.modulus_poly_degree(), 1);
        let r = f7.add(&f7.from_u64(3), &f7.from_u64(5));
        assert_eq!(r, f7.from_u64(1));
        assert_eq!(f7.inv(&f7.from_u64(3)).unwrap(), f7.from_u64(5));
        assert_eq!(f7.inv(&f7.zero()), Err(GfError::DivisionByZero));
    }

    #[test]
    fn canonical_quadratic_modulus_over_f5() {
        let f25 = Gf::new(5, 2).unwrap();
        assert_eq!(f25.desc().modulus, vec![2, 0, 1]);
        let x = f25.generator();
        assert_eq!(f25.mul(&x, &x), f25.from_u64(3));
        // deterministic
        assert_eq!(Gf::new(5, 2).unwrap().desc(), f25.desc());
    }

    #[test]
    fn quadratic_modulus_matches_exhaustive_scan() {
        // Scan all monic quadratics in the documented order, test
        // irreducibility by brute-force root search.
        for p in [2u64, 3, 5, 7, 11, 13, 101] {
            let mut expected = None;
            'scan: for c1 in 0..p {
                for c0 in 0..p {
                    if (0..p).all(|x| (x * x + c1 * x + c0) % p != 0) {
                        expected = Some(vec![c0, c1, 1]);
                        break 'scan;
                    }
                }
            }
            assert_eq!(Some(Gf::new(p, 2).unwrap().desc().modulus.clone()), expected, "p={p}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(Gf::new(4, 1), Err(GfError::NotPrime(4)));
        assert_eq!(Gf::new(1, 1), Err(GfError::NotPrime(1)));
        assert_eq!(Gf::new(7, 0), Err(GfError::InvalidDegree(0)));
        assert!(matches!(Gf::new(1_000_003, 5), Err(GfError::FieldTooLarge { .. })));
    }

    #[test]
    fn checked_apply_rejects_mixed_fields() {
        let f7 = Gf::new(7, 1).unwrap();
        let f49 = Gf::new(7, 2).unwrap();
        let x = f49.generator();
        assert_eq!(
            f7.apply(ArithOp::Add, &f7.one(), Some(&x)),
            Err(GfError::MixedFields)
        );
        assert_eq!(
            f7.apply(ArithOp::Mul, &f7.from_u64(3), Some(&f7.from_u64(4))),
            Ok(f7.from_u64(5))
        );
        assert_eq!(f7.apply(ArithOp::Inv, &f7.zero(), None), Err(GfError::DivisionByZero));
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            small,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn index_round_trip_and_order() {
        let f = Gf::new(3, 2).unwrap();
        let all: Vec<_> = f.elements().collect();
        assert_eq!(all.len(), 9);
        for (i, e) in all.iter().enumerate() {
            assert_eq!(f.index_of(e), i as u64);
        }
        // lexicographic on (c1, c0)
        assert_eq!(all[1].coeffs(), &[1, 0]);
        assert_eq!(all[3].coeffs(), &[0, 1]);
    }

    #[test]
    fn inverse_and_frobenius_on_random_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (p, a) in [(2, 1), (2, 3), (3, 2), (5, 2), (149, 2), (1009, 1), (7, 3), (13, 4)] {
            let f = Gf::new(p, a).unwrap();
            for _ in 0..200 {
                let x = f.from_index(rng.gen_range(0..f.order()));
                let y = f.from_index(rng.gen_range(0..f.order()));
                if !x.is_zero() {
                    assert_eq!(f.mul(&f.inv(&x).unwrap(), &x), f.one());
                }
                // Frobenius is additive and multiplicative, fixes F_p.
                assert_eq!(f.frobenius(&f.add(&x, &y)), f.add(&f.frobenius(&x), &f.frobenius(&y)));
                assert_eq!(f.frobenius(&f.mul(&x, &y)), f.mul(&f.frobenius(&x), &f.frobenius(&y)));
                let c = f.from_u64(rng.gen_range(0..p));
                assert_eq!(f.frobenius(&c), c);
                // x^q = x
                assert_eq!(f.pow(&x, f.order() as u128), x);
            }
        }
    }

    #[test]
    fn element_degrees() {
        let f = Gf::new(5, 2).unwrap();
        assert_eq!(f.element_degree(&f.from_u64(3)), 1);
        assert_eq!(f.element_degree(&f.generator()), 2);
        let f4 = Gf::new(2, 4).unwrap();
        let degs: Vec<usize> = f4.elements().map(|e| f4.element_degree(&e)).collect();
        assert_eq!(degs.iter().filter(|&&d| d == 1).count(), 2);
        assert_eq!(degs.iter().filter(|&&d| d == 2).count(), 2);
        assert_eq!(degs.iter().filter(|&&d| d == 4).count(), 12);
    }

    impl Gf {
        fn modulus_poly_degree(&self) -> usize {
            self.desc().modulus.len() - 1
        }
    }
}
