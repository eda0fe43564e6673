//! The coset action of a catalog group on `P¹(F_q)` and its Schreier tree.
//!
//! Cosets of `Γ₀ = Stab(∞)` are identified with points: the coset `Γ₀ g`
//! corresponds to `g⁻¹ · ∞`. Right multiplication by a generator `x` then
//! sends the point `P` to `x⁻¹ · P`, and this right action is what the
//! permutations below record.

use std::collections::VecDeque;

use crate::catalog::words::Letter;
use crate::gf::{FieldElem, Gf};
use crate::reduction::{Psl2, ReducedGenerators};

/// Points of `P¹(F_q)`: index 0 is `∞ = [1:0]`, index `1 + k` is `[z:1]`
/// for the field element `z` of canonical index `k`.
#[derive(Debug, Clone)]
pub struct ProjectiveLine {
    field: Gf,
}

impl ProjectiveLine {
    pub fn new(field: Gf) -> ProjectiveLine {
        ProjectiveLine { field }
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.field.order() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Normalized homogeneous coordinates of a point.
    pub fn point(&self, idx: usize) -> (FieldElem, FieldElem) {
        if idx == 0 {
            (self.field.one(), self.field.zero())
        } else {
            (self.field.from_index(idx as u64 - 1), self.field.one())
        }
    }

    /// Index of `[x:y]`; not both zero.
    pub fn index(&self, x: &FieldElem, y: &FieldElem) -> usize {
        if y.is_zero() {
            return 0;
        }
        let z = self.field.div(x, y).expect("y is nonzero");
        1 + self.field.index_of(&z) as usize
    }

    /// `[x:y] ↦ [ax+by : cx+dy]`.
    pub fn act(&self, m: &Psl2, idx: usize) -> usize {
        let f = &self.field;
        let [a, b, c, d] = m.entries();
        let (x, y) = self.point(idx);
        let nx = f.add(&f.mul(a, &x), &f.mul(b, &y));
        let ny = f.add(&f.mul(c, &x), &f.mul(d, &y));
        self.index(&nx, &ny)
    }

    /// `act(m, ·)` on every point; `inverses` is [`inverse_table`] of the
    /// field.
    pub fn permutation(&self, m: &Psl2, inverses: &[u32]) -> Vec<u32> {
        let f = &self.field;
        let [a, b, c, d] = m.entries();
        let q = f.order();
        let mut out = Vec::with_capacity(self.len());
        out.push(self.index(a, c) as u32);
        // z runs through the field in index order; stepping past j carries
        // adds 1 + t + ... + t^j to z
        let mut unit = f.zero();
        let (mut step_a, mut step_c) = (Vec::new(), Vec::new());
        for j in 0..f.degree() {
            unit = f.add(&unit, &f.from_index(f.p().pow(j as u32)));
            step_a.push(f.mul(a, &unit));
            step_c.push(f.mul(c, &unit));
        }
        let (mut num, mut den) = (b.clone(), d.clone());
        for k in 0..q {
            if den.is_zero() {
                out.push(0);
            } else {
                let r = f.from_index(inverses[f.index_of(&den) as usize] as u64);
                out.push(1 + f.index_of(&f.mul(&num, &r)) as u32);
            }
            let (mut rest, mut j) = (k, 0);
            while j + 1 < step_a.len() && rest % f.p() == f.p() - 1 {
                rest /= f.p();
                j += 1;
            }
            num = f.add(&num, &step_a[j]);
            den = f.add(&den, &step_c[j]);
        }
        out
    }
}

/// Permutations of the generators on a finite set, with the orbit of 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermRep {
    pub degree: usize,
    pub perms: Vec<Vec<u32>>,
    pub inverse_perms: Vec<Vec<u32>>,
    /// Points of the orbit of 0, ascending.
    pub orbit: Vec<u32>,
    pub transitive: bool,
}

impl PermRep {
    /// From images `perms[g][i] = i · g`. Panics if some entry is not a
    /// permutation.
    pub fn from_perms(perms: Vec<Vec<u32>>) -> PermRep {
        let degree = perms.first().map_or(1, Vec::len);
        let inverse_perms: Vec<Vec<u32>> = perms
            .iter()
            .map(|p| {
                assert_eq!(p.len(), degree, "permutations of different degrees");
                let mut inv = vec![u32::MAX; degree];
                for (i, &j) in p.iter().enumerate() {
                    assert_eq!(inv[j as usize], u32::MAX, "not a permutation");
                    inv[j as usize] = i as u32;
                }
                inv
            })
            .collect();
        let mut seen = vec![false; degree];
        seen[0] = true;
        let mut stack = vec![0u32];
        let mut orbit = Vec::new();
        while let Some(i) = stack.pop() {
            orbit.push(i);
            for p in &perms {
                let j = p[i as usize];
                if !seen[j as usize] {
                    seen[j as usize] = true;
                    stack.push(j);
                }
            }
        }
        orbit.sort_unstable();
        let transitive = orbit.len() == degree;
        PermRep {
            degree,
            perms,
            inverse_perms,
            orbit,
            transitive,
        }
    }

    pub fn num_generators(&self) -> usize {
        self.perms.len()
    }

    pub fn index(&self) -> usize {
        self.orbit.len()
    }

    pub fn apply(&self, point: u32, l: Letter) -> u32 {
        if l.inverse {
            self.inverse_perms[l.gen][point as usize]
        } else {
            self.perms[l.gen][point as usize]
        }
    }

    pub fn apply_word(&self, point: u32, w: &[Letter]) -> u32 {
        w.iter().fold(point, |pt, &l| self.apply(pt, l))
    }

    /// Order of the permutation of generator `g`.
    pub fn generator_order(&self, g: usize) -> u64 {
        let mut order = 1u64;
        let mut seen = vec![false; self.degree];
        for start in 0..self.degree {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.perms[g][i] as usize;
                len += 1;
            }
            order = num_integer::lcm(order, len);
        }
        order
    }
}

/// Canonical index of the inverse of each element, by one batched
/// inversion; entry 0 is unused.
pub fn inverse_table(f: &Gf) -> Vec<u32> {
    let q = f.order() as usize;
    let mut prefix = Vec::with_capacity(q);
    let mut acc = f.one();
    for k in 1..q {
        prefix.push(acc.clone());
        acc = f.mul(&acc, &f.from_index(k as u64));
    }
    let mut inv = f.inv(&acc).expect("product of units");
    let mut out = vec![0u32; q];
    for k in (1..q).rev() {
        out[k] = f.index_of(&f.mul(&inv, &prefix[k - 1])) as u32;
        inv = f.mul(&inv, &f.from_index(k as u64));
    }
    out
}

/// The right coset action `P ↦ x⁻¹ · P` of the reduced generators.
pub fn build_perm_rep(red: &ReducedGenerators, line: &ProjectiveLine) -> PermRep {
    let inverses = inverse_table(line.field());
    let perms = red
        .inverses
        .iter()
        .map(|m| line.permutation(m, &inverses))
        .collect();
    PermRep::from_perms(perms)
}

const NONE: u32 = u32::MAX;

/// BFS spanning tree of the orbit of 0 and the resulting Schreier
/// generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchreierData {
    pub num_generators: usize,
    /// Orbit points in BFS order; position in this list is the coset number.
    pub cosets: Vec<u32>,
    /// Point to coset number, `u32::MAX` outside the orbit.
    pub coset_of: Vec<u32>,
    /// For each coset, the letter and coset it was reached from.
    pub parent: Vec<Option<(u32, Letter)>>,
    /// Column of each forward edge `(coset, generator)`, `u32::MAX` for tree
    /// edges; indexed `coset * num_generators + generator`.
    pub column: Vec<u32>,
    /// Non-tree edges `(coset, generator)` in column order.
    pub schreier_generators: Vec<(u32, usize)>,
}

impl SchreierData {
    pub fn index(&self) -> usize {
        self.cosets.len()
    }

    pub fn tree_edges(&self) -> usize {
        self.index() - 1
    }

    /// Word from the base coset to `coset` along the tree.
    pub fn tree_word(&self, coset: u32) -> Vec<Letter> {
        let mut w = Vec::new();
        let mut k = coset;
        while let Some((from, l)) = self.parent[k as usize] {
            w.push(l);
            k = from;
        }
        w.reverse();
        w
    }

    pub fn column_of(&self, coset: u32, gen: usize) -> Option<u32> {
        let c = self.column[coset as usize * self.num_generators + gen];
        (c != NONE).then_some(c)
    }
}

/// BFS from point 0; at each point the letters `a, b, c, a⁻¹, b⁻¹, c⁻¹`
/// are tried in that order.
pub fn build_schreier(rep: &PermRep) -> SchreierData {
    let n = rep.num_generators();
    let mut coset_of = vec![NONE; rep.degree];
    let mut cosets = Vec::with_capacity(rep.index());
    let mut parent = Vec::with_capacity(rep.index());
    let mut tree = Vec::with_capacity(rep.index());
    let letters: Vec<Letter> = (0..n)
        .map(|g| Letter::new(g, false))
        .chain((0..n).map(|g| Letter::new(g, true)))
        .collect();

    coset_of[0] = 0;
    cosets.push(0u32);
    parent.push(None);
    let mut queue = VecDeque::from([0u32]);
    while let Some(k) = queue.pop_front() {
        let pt = cosets[k as usize];
        for &l in &letters {
            let next = rep.apply(pt, l);
            if coset_of[next as usize] != NONE {
                continue;
            }
            let nk = cosets.len() as u32;
            coset_of[next as usize] = nk;
            cosets.push(next);
            parent.push(Some((k, l)));
            // record the forward edge this tree step uses
            tree.push(if l.inverse { (nk, l.gen) } else { (k, l.gen) });
            queue.push_back(nk);
        }
    }

    let index = cosets.len();
    let mut column = vec![0u32; index * n];
    for &(k, g) in &tree {
        column[k as usize * n + g] = NONE;
    }
    let mut schreier_generators = Vec::with_capacity(index * n - tree.len());
    for k in 0..index {
        for g in 0..n {
            let slot = &mut column[k * n + g];
            if *slot != NONE {
                *slot = schreier_generators.len() as u32;
                schreier_generators.push((k as u32, g));
            }
        }
    }
    SchreierData {
        num_generators: n,
        cosets,
        coset_of,
        parent,
        column,
        schreier_generators,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{get_group, GroupId};
    use crate::reduction::{enumerate_level_ideals, reduce_generators};

    #[test]
    fn point_indexing() {
        for (q, p, f) in [(2u64, 2, 1), (4, 2, 2), (9, 3, 2)] {
            let line = ProjectiveLine::new(Gf::new(p, f).unwrap());
            assert_eq!(line.len() as u64, q + 1);
            for i in 0..line.len() {
                let (x, y) = line.point(i);
                assert_eq!(line.index(&x, &y), i);
            }
        }
        let line = ProjectiveLine::new(Gf::new(3, 2).unwrap());
        let (x, y) = line.point(1);
        assert!(x.is_zero() && y == line.field().one());
    }

    #[test]
    fn actions() {
        let f = Gf::new(5, 1).unwrap();
        let line = ProjectiveLine::new(f.clone());
        let id = Psl2::identity(&f);
        let t = Psl2::from_ints(&f, [1, 1, 0, 1]);
        for i in 0..line.len() {
            assert_eq!(line.act(&id, i), i);
        }
        assert_eq!(line.act(&t, 0), 0);
        for z in 0..5usize {
            assert_eq!(line.act(&t, 1 + z), 1 + (z + 1) % 5);
        }

        let f = Gf::new(13, 1).unwrap();
        let line = ProjectiveLine::new(f.clone());
        let i = f.sqrt(&f.from_i64(-1)).unwrap();
        let c = Psl2::new(&f, [f.zero(), i.clone(), i, f.zero()]);
        assert_eq!(line.act(&c, 0), 1);
        assert_eq!(line.act(&c, 1), 0);
    }

    #[test]
    fn permutation_matches_pointwise_action() {
        let mut degrees = [0; 4];
        for (id, p) in GroupId::ALL.into_iter().flat_map(|id| crate::gf::primes_in(5, 30).into_iter().map(move |p| (id, p))) {
            let g = get_group(id);
            let Ok(levels) = enumerate_level_ideals(&g, p, if p < 12 { 3 } else { 2 }) else {
                continue;
            };
            for l in levels {
                degrees[l.field.degree()] += 1;
                let red = reduce_generators(&g, &l).unwrap();
                let line = ProjectiveLine::new(l.field.clone());
                let inv = inverse_table(line.field());
                for m in &red.inverses {
                    let want: Vec<u32> = (0..line.len()).map(|i| line.act(m, i) as u32).collect();
                    assert_eq!(line.permutation(m, &inv), want, "{id} {}", l.tag());
                }
            }
        }
        assert!(degrees[1] > 0 && degrees[2] > 0, "{degrees:?}");
        let f = Gf::new(3, 4).unwrap();
        let inv = inverse_table(&f);
        for k in 1..81 {
            let x = f.from_index(k);
            assert_eq!(f.mul(&x, &f.from_index(inv[k as usize] as u64)), f.one());
        }
    }

    fn h_rep(id: GroupId, p: u64, f: usize) -> (PermRep, crate::catalog::GroupSpec) {
        let g = get_group(id);
        let l = &enumerate_level_ideals(&g, p, f).unwrap()[0];
        let red = reduce_generators(&g, l).unwrap();
        let line = ProjectiveLine::new(l.field.clone());
        (build_perm_rep(&red, &line), g)
    }

    #[test]
    fn h3_at_thirteen_is_transitive() {
        let (rep, g) = h_rep(GroupId::H3, 13, 1);
        assert_eq!(rep.index(), 14);
        assert!(rep.transitive);
        for r in &g.presentation.relators {
            let w = r.letters();
            assert!((0..14).all(|i| rep.apply_word(i, &w) == i), "{}", r.source);
        }
        let s = build_schreier(&rep);
        assert_eq!(s.schreier_generators.len(), 3 * 14 - 13);
    }

    #[test]
    fn h2_generator_orders() {
        let (rep, _) = h_rep(GroupId::H2, 61, 1);
        assert_eq!(6 % rep.generator_order(0), 0);
        assert_eq!(2 % rep.generator_order(1), 0);
        assert_eq!(2 % rep.generator_order(2), 0);
        let s = build_schreier(&rep);
        assert_eq!(s.schreier_generators.len(), 2 * 61 + 3);
    }

    #[test]
    fn borel_image_fixes_infinity() {
        let f = Gf::new(7, 1).unwrap();
        let gens = vec![
            Psl2::from_ints(&f, [1, 1, 0, 1]),
            Psl2::from_ints(&f, [3, 0, 0, 5]),
            Psl2::from_ints(&f, [1, 4, 0, 1]),
        ];
        let red = ReducedGenerators::new(f.clone(), gens);
        let rep = build_perm_rep(&red, &ProjectiveLine::new(f));
        assert_eq!(rep.orbit, vec![0]);
        assert!(!rep.transitive);
    }

    #[test]
    fn index_one_tree() {
        let rep = PermRep::from_perms(vec![vec![0], vec![0], vec![0]]);
        let s = build_schreier(&rep);
        assert_eq!(s.index(), 1);
        assert_eq!(s.tree_edges(), 0);
        assert_eq!(s.schreier_generators, vec![(0, 0), (0, 1), (0, 2)]);
    }

    #[test]
    fn three_cycle_tree() {
        // x = (0 1 2): BFS reaches 1 by x and 2 by x^-1 from the root
        let rep = PermRep::from_perms(vec![vec![1, 2, 0]]);
        let s = build_schreier(&rep);
        assert_eq!(s.cosets, vec![0, 1, 2]);
        assert_eq!(s.parent[1], Some((0, Letter::new(0, false))));
        assert_eq!(s.parent[2], Some((0, Letter::new(0, true))));
        assert_eq!(s.schreier_generators, vec![(1, 0)]);
        assert_eq!(s.tree_word(2), vec![Letter::new(0, true)]);
    }

    #[test]
    fn schreier_is_deterministic() {
        let (rep, _) = h_rep(GroupId::H5, 41, 1);
        assert_eq!(build_schreier(&rep), build_schreier(&rep));
    }
}
