use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FieldElem, Gf, GfError, Result};

/// Fields up to this size are root-scanned exhaustively.
const EXHAUSTIVE_LIMIT: u64 = 64;

/// Dense univariate polynomial over a [`Gf`], ascending coefficients,
/// no trailing zeros. The zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    c: Vec<FieldElem>,
}

impl Poly {
    pub fn from_coeffs(_field: &Gf, mut c: Vec<FieldElem>) -> Poly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Poly {
        Poly { c: Vec::new() }
    }

    pub fn constant(field: &Gf, v: FieldElem) -> Poly {
        Poly::from_coeffs(field, vec![v])
    }

    /// The monomial `x`.
    pub fn x(field: &Gf) -> Poly {
        Poly::from_coeffs(field, vec![field.zero(), field.one()])
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&FieldElem> {
        self.c.last()
    }

    pub fn eval(&self, field: &Gf, x: &FieldElem) -> FieldElem {
        self.c
            .iter()
            .rev()
            .fold(field.zero(), |acc, a| field.add(&field.mul(&acc, x), a))
    }

    pub fn add(&self, field: &Gf, other: &Poly) -> Poly {
        let n = self.c.len().max(other.c.len());
        let z = field.zero();
        let c = (0..n)
            .map(|i| field.add(self.c.get(i).unwrap_or(&z), other.c.get(i).unwrap_or(&z)))
            .collect();
        Poly::from_coeffs(field, c)
    }

    pub fn sub(&self, field: &Gf, other: &Poly) -> Poly {
        let n = self.c.len().max(other.c.len());
        let z = field.zero();
        let c = (0..n)
            .map(|i| field.sub(self.c.get(i).unwrap_or(&z), other.c.get(i).unwrap_or(&z)))
            .collect();
        Poly::from_coeffs(field, c)
    }

    pub fn scale(&self, field: &Gf, k: &FieldElem) -> Poly {
        Poly::from_coeffs(field, self.c.iter().map(|a| field.mul(a, k)).collect())
    }

    pub fn mul(&self, field: &Gf, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![field.zero(); self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                c[i + j] = field.add(&c[i + j], &field.mul(a, b));
            }
        }
        Poly::from_coeffs(field, c)
    }

    /// Euclidean division; panics on a zero divisor (callers check).
    pub fn div_rem(&self, field: &Gf, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = field
            .inv(divisor.leading().unwrap())
            .expect("nonzero leading coefficient");
        let mut rem = self.c.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![field.zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let coef = field.mul(&rem[k], &lead_inv);
            if coef.is_zero() {
                continue;
            }
            for (i, d) in divisor.c.iter().enumerate() {
                let slot = &mut rem[k - dd + i];
                *slot = field.sub(slot, &field.mul(&coef, d));
            }
            quot[k - dd] = coef;
        }
        rem.truncate(dd);
        (Poly::from_coeffs(field, quot), Poly::from_coeffs(field, rem))
    }

    pub fn rem(&self, field: &Gf, divisor: &Poly) -> Poly {
        self.div_rem(field, divisor).1
    }

    pub fn monic(&self, field: &Gf) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => self.scale(field, &field.inv(l).unwrap()),
        }
    }

    /// Monic greatest common divisor (zero iff both inputs are zero).
    pub fn gcd(&self, field: &Gf, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(field, &b);
            a = b;
            b = r;
        }
        a.monic(field)
    }

    pub fn derivative(&self, field: &Gf) -> Poly {
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, a)| field.mul(a, &field.from_u64(i as u64)))
            .collect();
        Poly::from_coeffs(field, c)
    }

    /// `self^exp mod modulus`.
    pub fn pow_mod(&self, field: &Gf, mut exp: u128, modulus: &Poly) -> Poly {
        let mut acc = Poly::constant(field, field.one()).rem(field, modulus);
        let mut base = self.rem(field, modulus);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(field, &base).rem(field, modulus);
            }
            base = base.mul(field, &base).rem(field, modulus);
            exp >>= 1;
        }
        acc
    }

    pub fn is_squarefree(&self, field: &Gf) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => {
                let d = self.derivative(field);
                !d.is_zero() && self.gcd(field, &d).degree() == Some(0)
            }
        }
    }

    /// Rabin's irreducibility test over `field`.
    pub fn is_irreducible(&self, field: &Gf) -> bool {
        let n = match self.degree() {
            None | Some(0) => return false,
            Some(1) => return true,
            Some(n) => n,
        };
        let q = field.order() as u128;
        let x = Poly::x(field);
        // x^{q^k} mod f for k = 1..n
        let mut frob = vec![x.clone()];
        for k in 1..=n {
            let prev = &frob[k - 1];
            frob.push(prev.pow_mod(field, q, self));
        }
        if frob[n] != x.rem(field, self) {
            return false;
        }
        for r in prime_divisors(n) {
            let g = frob[n / r].sub(field, &x).gcd(field, self);
            if g.degree() != Some(0) {
                return false;
            }
        }
        true
    }
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Distinct roots of `f` in `field`, ascending in canonical element order.
pub fn poly_roots(field: &Gf, f: &Poly) -> Result<Vec<FieldElem>> {
    if f.is_zero() {
        return Err(GfError::ZeroPolynomial);
    }
    if f.degree() == Some(0) {
        return Ok(Vec::new());
    }
    if field.order() <= EXHAUSTIVE_LIMIT {
        return poly_roots_exhaustive(field, f);
    }
    let f = f.monic(field);
    // Product of the distinct linear factors.
    let x = Poly::x(field);
    let xq = x.pow_mod(field, field.order() as u128, &f);
    let g = xq.sub(field, &x).gcd(field, &f);
    let g = if g.is_zero() { f.clone() } else { g };
    let mut rng = ChaCha8Rng::seed_from_u64(field.order() ^ 0x5eed);
    let mut roots = Vec::new();
    split_linear(field, g, &mut rng, &mut roots);
    roots.sort_by_key(|r| field.index_of(r));
    roots.dedup();
    Ok(roots)
}

/// Reference root finder by evaluation at every field element.
pub fn poly_roots_exhaustive(field: &Gf, f: &Poly) -> Result<Vec<FieldElem>> {
    if f.is_zero() {
        return Err(GfError::ZeroPolynomial);
    }
    Ok(field.elements().filter(|e| f.eval(field, e).is_zero()).collect())
}

/// Cantor–Zassenhaus equal-degree splitting of a monic product of distinct
/// linear factors.
fn split_linear(field: &Gf, g: Poly, rng: &mut ChaCha8Rng, out: &mut Vec<FieldElem>) {
    match g.degree() {
        None | Some(0) => return,
        Some(1) => {
            // x + c  =>  root -c
            out.push(field.neg(&g.coeffs()[0]));
            return;
        }
        _ => {}
    }
    let q = field.order();
    loop {
        let delta = field.from_index(rng.gen_range(0..q));
        let h = if field.p() == 2 {
            // Absolute trace map of (delta * x) into F_2.
            let k = field.degree() as u32;
            let lin = Poly::from_coeffs(field, vec![field.zero(), delta]);
            let mut term = lin.rem(field, &g);
            let mut tr = term.clone();
            for _ in 1..k {
                term = term.mul(field, &term).rem(field, &g);
                tr = tr.add(field, &term);
            }
            tr.gcd(field, &g)
        } else {
            let lin = Poly::from_coeffs(field, vec![delta, field.one()]);
            let s = lin.pow_mod(field, ((q - 1) / 2) as u128, &g);
            s.sub(field, &Poly::constant(field, field.one())).gcd(field, &g)
        };
        if let Some(d) = h.degree() {
            if d > 0 && Some(d) < g.degree() {
                let (other, _) = g.div_rem(field, &h);
                split_linear(field, h, rng, out);
                split_linear(field, other.monic(field), rng, out);
                return;
            }
        }
    }
}
