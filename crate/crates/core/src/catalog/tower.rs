//! Exact arithmetic in `Q[r0]/(m1)[r1]/(m2)`, a tower of at most two
//! simple extensions of the rationals.

use dashu_ratio::RBig;

use super::expr::{ExprError, ExprRing};

/// Elements are coefficient vectors indexed `j * d1 + i` for `r1^j r0^i`.
pub type TowerElem = Vec<RBig>;

#[derive(Debug, Clone, PartialEq)]
pub struct Tower {
    /// Monic base polynomial, ascending coefficients.
    base: Vec<RBig>,
    /// Monic second-step polynomial over the base, ascending; empty if absent.
    ext: Vec<Vec<RBig>>,
    d1: usize,
    d2: usize,
}

impl Tower {
    /// `base` and each entry of `ext` are ascending coefficient lists; the
    /// leading coefficient must be one.
    pub fn new(base: Vec<RBig>, ext: Option<Vec<Vec<RBig>>>) -> Tower {
        let d1 = base.len() - 1;
        debug_assert!(base[d1] == RBig::ONE);
        let (ext, d2) = match ext {
            Some(e) => {
                let d2 = e.len() - 1;
                (e, d2)
            }
            None => (Vec::new(), 1),
        };
        Tower { base, ext, d1, d2 }
    }

    pub fn dimension(&self) -> usize {
        self.d1 * self.d2
    }

    pub fn zero(&self) -> TowerElem {
        vec![RBig::ZERO; self.dimension()]
    }

    pub fn constant(&self, q: &RBig) -> TowerElem {
        let mut e = self.zero();
        e[0] = q.clone();
        e
    }

    /// The base root `r0`.
    pub fn base_root(&self) -> TowerElem {
        let mut e = self.zero();
        if self.d1 > 1 {
            e[1] = RBig::ONE;
        } else {
            e[0] = -self.base[0].clone();
        }
        e
    }

    /// The second-step root `r1`, if the tower has two steps.
    pub fn ext_root(&self) -> Option<TowerElem> {
        if self.ext.is_empty() {
            return None;
        }
        let mut e = self.zero();
        if self.d2 > 1 {
            e[self.d1] = RBig::ONE;
        } else {
            for (i, c) in self.ext[0].iter().enumerate() {
                e[i] = -c.clone();
            }
        }
        Some(e)
    }

    pub fn is_zero(&self, a: &TowerElem) -> bool {
        a.iter().all(|c| *c == RBig::ZERO)
    }

    fn base_mul(&self, a: &[RBig], b: &[RBig]) -> Vec<RBig> {
        let d1 = self.d1;
        let mut prod = vec![RBig::ZERO; 2 * d1 - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == RBig::ZERO {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if *y != RBig::ZERO {
                    prod[i + j] += x * y;
                }
            }
        }
        for k in (d1..prod.len()).rev() {
            let top = std::mem::replace(&mut prod[k], RBig::ZERO);
            if top == RBig::ZERO {
                continue;
            }
            for (i, m) in self.base.iter().take(d1).enumerate() {
                prod[k - d1 + i] -= &top * m;
            }
        }
        prod.truncate(d1);
        prod
    }

    fn mul_impl(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        let (d1, d2) = (self.d1, self.d2);
        let slice = |v: &TowerElem, j: usize| v[j * d1..(j + 1) * d1].to_vec();
        let mut prod: Vec<Vec<RBig>> = vec![vec![RBig::ZERO; d1]; 2 * d2 - 1];
        for i in 0..d2 {
            let ai = slice(a, i);
            if ai.iter().all(|c| *c == RBig::ZERO) {
                continue;
            }
            for j in 0..d2 {
                let bj = slice(b, j);
                if bj.iter().all(|c| *c == RBig::ZERO) {
                    continue;
                }
                let t = self.base_mul(&ai, &bj);
                for (slot, v) in prod[i + j].iter_mut().zip(t) {
                    *slot += v;
                }
            }
        }
        for k in (d2..prod.len()).rev() {
            let top = std::mem::replace(&mut prod[k], vec![RBig::ZERO; d1]);
            if top.iter().all(|c| *c == RBig::ZERO) {
                continue;
            }
            for (j, m) in self.ext.iter().take(d2).enumerate() {
                let t = self.base_mul(&top, m);
                for (slot, v) in prod[k - d2 + j].iter_mut().zip(t) {
                    *slot -= v;
                }
            }
        }
        prod.truncate(d2);
        prod.into_iter().flatten().collect()
    }

    /// Inverse by solving the linear system `a * x = 1` over Q.
    fn inv_impl(&self, a: &TowerElem) -> Option<TowerElem> {
        let n = self.dimension();
        // Column k of the multiplication matrix is a * e_k.
        let mut aug: Vec<Vec<RBig>> = vec![vec![RBig::ZERO; n + 1]; n];
        for k in 0..n {
            let mut ek = self.zero();
            ek[k] = RBig::ONE;
            let col = self.mul_impl(a, &ek);
            for (row, v) in col.into_iter().enumerate() {
                aug[row][k] = v;
            }
        }
        aug[0][n] = RBig::ONE;
        for col in 0..n {
            let pivot = (col..n).find(|&r| aug[r][col] != RBig::ZERO)?;
            aug.swap(col, pivot);
            let inv = RBig::ONE / aug[col][col].clone();
            for v in aug[col].iter_mut() {
                *v *= &inv;
            }
            for r in 0..n {
                if r != col && aug[r][col] != RBig::ZERO {
                    let f = aug[r][col].clone();
                    for c in col..=n {
                        let delta = &f * &aug[col][c];
                        aug[r][c] -= delta;
                    }
                }
            }
        }
        Some(aug.into_iter().map(|row| row[n].clone()).collect())
    }
}

impl ExprRing for Tower {
    type Elem = TowerElem;

    fn rational(&self, q: &RBig) -> Result<TowerElem, ExprError> {
        Ok(self.constant(q))
    }

    fn add(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn sub(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    fn mul(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        self.mul_impl(a, b)
    }

    fn neg(&self, a: &TowerElem) -> TowerElem {
        a.iter().map(|x| -x).collect()
    }

    fn inv(&self, a: &TowerElem) -> Result<TowerElem, ExprError> {
        self.inv_impl(a).ok_or(ExprError::NotInvertible)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dashu_int::IBig;

    fn ints(v: &[i64]) -> Vec<RBig> {
        v.iter().map(|&x| RBig::from(IBig::from(x))).collect()
    }

    #[test]
    fn twelfth_root_of_unity() {
        // Phi_12 = x^4 - x^2 + 1
        let t = Tower::new(ints(&[1, 0, -1, 0, 1]), None);
        let z = t.base_root();
        let z12 = t.pow(&z, 12).unwrap();
        assert_eq!(z12, t.one());
        assert_ne!(t.pow(&z, 6).unwrap(), t.one());
        let zinv = t.inv(&z).unwrap();
        assert_eq!(t.mul(&z, &zinv), t.one());
        assert_eq!(zinv, t.pow(&z, 11).unwrap());
    }

    #[test]
    fn two_step_tower_with_sqrt5() {
        let base = ints(&[1, 0, -1, 0, 1]);
        let five = ints(&[-5, 0, 0, 0]);
        let zero = ints(&[0, 0, 0, 0]);
        let one = ints(&[1, 0, 0, 0]);
        let t = Tower::new(base, Some(vec![five, zero, one]));
        let s = t.ext_root().unwrap();
        assert_eq!(t.mul(&s, &s), t.constant(&RBig::from(IBig::from(5))));
        let half = RBig::from_parts(IBig::ONE, dashu_int::UBig::from(2u8));
        // golden ratio phi satisfies phi^2 = phi + 1
        let phi = t.add(&t.constant(&half), &t.mul(&t.constant(&half), &s));
        assert_eq!(t.mul(&phi, &phi), t.add(&phi, &t.one()));
        let phi_inv = t.inv(&phi).unwrap();
        assert_eq!(phi_inv, t.sub(&phi, &t.one()));
    }

    #[test]
    fn zero_divisor_has_no_inverse() {
        // x^2 - 1 is reducible, x - 1 is a zero divisor
        let t = Tower::new(ints(&[-1, 0, 1]), None);
        let x = t.base_root();
        let zd = t.sub(&x, &t.one());
        assert_eq!(t.inv(&zd), Err(ExprError::NotInvertible));
    }
}
