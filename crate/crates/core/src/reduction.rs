//! Reduction of a catalog group modulo primes of its trace field.
//!
//! A prime ideal of residue degree `f` over `p` is represented by a
//! Frobenius orbit of root assignments: values in `F_{p^f}` for each tower
//! root that annihilate the (reduced) minimal polynomials and together
//! generate `F_{p^f}`. Reducing the symbolic generator matrices at such an
//! assignment gives a homomorphism into `PSL₂(F_{p^f})`.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use dashu_int::IBig;
use dashu_ratio::RBig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::catalog::expr::{ExprError, ExprRing};
use crate::catalog::GroupSpec;
use crate::cover::ProjectiveLine;
use crate::gf::{is_prime, poly_roots, FieldElem, Gf, GfError, Poly};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BadPrimeReason {
    /// Divides a denominator of an entry or coefficient.
    Denominator,
    /// Divides a discriminant of a tower polynomial.
    Ramified,
}

impl fmt::Display for BadPrimeReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BadPrimeReason::Denominator => "denominator",
            BadPrimeReason::Ramified => "ramified",
        })
    }
}

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = {p} is a bad prime for {group} ({reason})")]
    BadPrime {
        group: String,
        p: u64,
        reason: BadPrimeReason,
    },
    #[error("relator {relator:?} fails for {group} at p = {p}, ideal {ideal}")]
    RelatorFailure {
        group: String,
        p: u64,
        ideal: String,
        relator: String,
    },
    #[error("generator {generator} of {group} does not reduce into SL2 at p = {p}, ideal {ideal}")]
    NotSpecialLinear {
        group: String,
        p: u64,
        ideal: String,
        generator: String,
    },
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Expressions evaluated in a finite field.
pub struct FqRing<'a> {
    pub field: &'a Gf,
}

impl FqRing<'_> {
    fn reduce_int(&self, v: &IBig) -> FieldElem {
        let r: IBig = v % IBig::from(self.field.p());
        let r: i64 = r.try_into().expect("residue fits in i64");
        self.field.from_i64(r)
    }
}

impl ExprRing for FqRing<'_> {
    type Elem = FieldElem;

    fn rational(&self, q: &RBig) -> Result<FieldElem, ExprError> {
        let num = self.reduce_int(q.numerator());
        let den_int = IBig::from(q.denominator().clone());
        let den = self.reduce_int(&den_int);
        let inv = self
            .field
            .inv(&den)
            .map_err(|_| ExprError::BadDenominator(den_int))?;
        Ok(self.field.mul(&num, &inv))
    }
    fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.field.add(a, b)
    }
    fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.field.sub(a, b)
    }
    fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.field.mul(a, b)
    }
    fn neg(&self, a: &FieldElem) -> FieldElem {
        self.field.neg(a)
    }
    fn inv(&self, a: &FieldElem) -> Result<FieldElem, ExprError> {
        self.field.inv(a).map_err(|_| ExprError::NotInvertible)
    }
    fn pow(&self, a: &FieldElem, exp: i32) -> Result<FieldElem, ExprError> {
        let base = if exp < 0 { self.inv(a)? } else { a.clone() };
        Ok(self.field.pow(&base, exp.unsigned_abs() as u128))
    }
}

/// A prime of the trace field, as a canonical root assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelIdeal {
    pub group: String,
    pub p: u64,
    pub f: usize,
    pub norm: u64,
    pub field: Gf,
    pub root_names: Vec<String>,
    /// Values of the tower roots in `F_{p^f}`, smallest in its Frobenius orbit.
    pub roots: Vec<FieldElem>,
}

impl LevelIdeal {
    /// `name=index;name=index` with indices in the canonical element order.
    pub fn tag(&self) -> String {
        assignment_tag(&self.field, &self.root_names, &self.roots)
    }

    /// The member of the orbit obtained by applying `x ↦ x^p` once.
    pub fn frobenius_conjugate(&self) -> Vec<FieldElem> {
        self.roots.iter().map(|r| self.field.frobenius(r)).collect()
    }

    /// All members of the Frobenius orbit, starting with the stored one.
    pub fn orbit(&self) -> Vec<Vec<FieldElem>> {
        frobenius_orbit(&self.field, &self.roots)
    }
}

pub fn assignment_tag(field: &Gf, names: &[String], roots: &[FieldElem]) -> String {
    names
        .iter()
        .zip(roots)
        .map(|(n, r)| format!("{n}={}", field.index_of(r)))
        .collect::<Vec<_>>()
        .join(";")
}

fn frobenius_orbit(field: &Gf, roots: &[FieldElem]) -> Vec<Vec<FieldElem>> {
    let mut orbit = vec![roots.to_vec()];
    loop {
        let next: Vec<FieldElem> = orbit.last().unwrap().iter().map(|r| field.frobenius(r)).collect();
        if next == orbit[0] {
            return orbit;
        }
        orbit.push(next);
    }
}

fn index_key(field: &Gf, roots: &[FieldElem]) -> Vec<u64> {
    roots.iter().map(|r| field.index_of(r)).collect()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Check that no prime in `p` divides the stored denominators or
/// discriminants of `g`.
pub fn check_prime(g: &GroupSpec, p: u64) -> Result<(), ReductionError> {
    if !is_prime(p) {
        return Err(ReductionError::NotPrime(p));
    }
    let reason = if g.field.bad_primes.contains(&p) {
        Some(BadPrimeReason::Denominator)
    } else if g.field.ramified_primes.contains(&p) {
        Some(BadPrimeReason::Ramified)
    } else {
        None
    };
    match reason {
        Some(reason) => Err(ReductionError::BadPrime {
            group: g.id.clone(),
            p,
            reason,
        }),
        None => Ok(()),
    }
}

/// Every root assignment in `field` annihilating the tower polynomials.
///
/// Fails with `BadPrime(Ramified)` if some reduced tower polynomial is not
/// squarefree, which the stored ramified set should already exclude.
fn root_tuples(g: &GroupSpec, field: &Gf) -> Result<Vec<Vec<FieldElem>>, ReductionError> {
    let ring = FqRing { field };
    let ramified = || ReductionError::BadPrime {
        group: g.id.clone(),
        p: field.p(),
        reason: BadPrimeReason::Ramified,
    };
    let mut tuples: Vec<Vec<FieldElem>> = vec![Vec::new()];
    for step in 0..g.field.tower.len() {
        let mut next = Vec::new();
        for prefix in &tuples {
            let coeffs = g.field.minpoly_coeffs(&ring, step, prefix)?;
            let poly = Poly::from_coeffs(field, coeffs);
            if !poly.is_squarefree(field) {
                return Err(ramified());
            }
            for r in poly_roots(field, &poly)? {
                let mut t = prefix.clone();
                t.push(r);
                next.push(t);
            }
        }
        tuples = next;
    }
    Ok(tuples)
}

/// One entry per prime of residue degree at most `max_f` above `p`, sorted
/// by degree and then by canonical root assignment.
pub fn enumerate_level_ideals(
    g: &GroupSpec,
    p: u64,
    max_f: usize,
) -> Result<Vec<LevelIdeal>, ReductionError> {
    check_prime(g, p)?;
    let names: Vec<String> = g.field.root_names().iter().map(|s| s.to_string()).collect();
    let mut out = Vec::new();
    for f in 1..=max_f {
        let field = Gf::new(p, f)?;
        let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
        let mut found = Vec::new();
        for t in root_tuples(g, &field)? {
            let generated = t.iter().fold(1, |acc, r| {
                let d = field.element_degree(r);
                acc / gcd(acc, d) * d
            });
            if generated != f {
                continue;
            }
            let canonical = frobenius_orbit(&field, &t)
                .into_iter()
                .min_by_key(|o| index_key(&field, o))
                .unwrap();
            if seen.insert(index_key(&field, &canonical)) {
                found.push(canonical);
            }
        }
        found.sort_by_key(|t| index_key(&field, t));
        out.extend(found.into_iter().map(|roots| LevelIdeal {
            group: g.id.clone(),
            p,
            f,
            norm: field.order(),
            field: field.clone(),
            root_names: names.clone(),
            roots,
        }));
    }
    Ok(out)
}

/// An element of `PSL₂(F_q)`, stored as its canonical lift `(a, b, c, d)`:
/// of `±M` the one whose first nonzero entry precedes its negation in the
/// canonical element order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Psl2 {
    m: [FieldElem; 4],
}

impl Psl2 {
    pub fn new(field: &Gf, m: [FieldElem; 4]) -> Psl2 {
        let first = m.iter().find(|e| !e.is_zero()).expect("matrix is invertible");
        if field.index_of(first) > field.index_of(&field.neg(first)) {
            Psl2 {
                m: m.map(|e| field.neg(&e)),
            }
        } else {
            Psl2 { m }
        }
    }

    pub fn from_rows(field: &Gf, rows: [[FieldElem; 2]; 2]) -> Psl2 {
        let [[a, b], [c, d]] = rows;
        Psl2::new(field, [a, b, c, d])
    }

    pub fn from_ints(field: &Gf, m: [i64; 4]) -> Psl2 {
        Psl2::new(field, m.map(|v| field.from_i64(v)))
    }

    pub fn identity(field: &Gf) -> Psl2 {
        Psl2::new(field, [field.one(), field.zero(), field.zero(), field.one()])
    }

    pub fn entries(&self) -> &[FieldElem; 4] {
        &self.m
    }

    pub fn det(&self, field: &Gf) -> FieldElem {
        let [a, b, c, d] = &self.m;
        field.sub(&field.mul(a, d), &field.mul(b, c))
    }

    pub fn trace(&self, field: &Gf) -> FieldElem {
        field.add(&self.m[0], &self.m[3])
    }

    /// `tr²`, independent of the choice of lift.
    pub fn trace_sq(&self, field: &Gf) -> FieldElem {
        field.square(&self.trace(field))
    }

    pub fn mul(&self, field: &Gf, other: &Psl2) -> Psl2 {
        let [a, b, c, d] = &self.m;
        let [e, f, g, h] = &other.m;
        let dot = |x: &FieldElem, y: &FieldElem, z: &FieldElem, w: &FieldElem| {
            field.add(&field.mul(x, y), &field.mul(z, w))
        };
        Psl2::new(
            field,
            [dot(a, e, b, g), dot(a, f, b, h), dot(c, e, d, g), dot(c, f, d, h)],
        )
    }

    /// Inverse of a determinant-one lift (the adjugate).
    pub fn inv(&self, field: &Gf) -> Psl2 {
        let [a, b, c, d] = &self.m;
        Psl2::new(field, [d.clone(), field.neg(b), field.neg(c), a.clone()])
    }

    pub fn is_identity(&self, field: &Gf) -> bool {
        *self == Psl2::identity(field)
    }

    /// Commutator `x y x⁻¹ y⁻¹`.
    pub fn commutator(&self, field: &Gf, other: &Psl2) -> Psl2 {
        self.mul(field, other)
            .mul(field, &self.inv(field))
            .mul(field, &other.inv(field))
    }
}

/// The generator images of one reduction homomorphism.
#[derive(Debug, Clone)]
pub struct ReducedGenerators {
    pub field: Gf,
    pub gens: Vec<Psl2>,
    pub inverses: Vec<Psl2>,
}

impl ReducedGenerators {
    pub fn new(field: Gf, gens: Vec<Psl2>) -> ReducedGenerators {
        let inverses = gens.iter().map(|m| m.inv(&field)).collect();
        ReducedGenerators {
            field,
            gens,
            inverses,
        }
    }

    pub fn word(&self, word: &[crate::catalog::words::Letter]) -> Psl2 {
        let mut acc = Psl2::identity(&self.field);
        for l in word {
            let m = if l.inverse {
                &self.inverses[l.gen]
            } else {
                &self.gens[l.gen]
            };
            acc = acc.mul(&self.field, m);
        }
        acc
    }
}

/// Reduce at a canonical level.
pub fn reduce_generators(g: &GroupSpec, level: &LevelIdeal) -> Result<ReducedGenerators, ReductionError> {
    reduce_at(g, &level.field, &level.roots)
}

/// Reduce at an arbitrary root assignment (e.g. a Frobenius conjugate),
/// checking determinants and every relator.
pub fn reduce_at(g: &GroupSpec, field: &Gf, roots: &[FieldElem]) -> Result<ReducedGenerators, ReductionError> {
    let names: Vec<String> = g.field.root_names().iter().map(|s| s.to_string()).collect();
    let ideal = || assignment_tag(field, &names, roots);
    let ring = FqRing { field };
    let mats = g.generator_values(&ring, roots)?;
    let mut gens = Vec::with_capacity(mats.len());
    for (spec, m) in g.generators.iter().zip(mats) {
        let m = Psl2::from_rows(field, m);
        if m.det(field) != field.one() {
            return Err(ReductionError::NotSpecialLinear {
                group: g.id.clone(),
                p: field.p(),
                ideal: ideal(),
                generator: spec.name.clone(),
            });
        }
        gens.push(m);
    }
    let red = ReducedGenerators::new(field.clone(), gens);
    for r in &g.presentation.relators {
        if !red.word(&r.letters()).is_identity(field) {
            return Err(ReductionError::RelatorFailure {
                group: g.id.clone(),
                p: field.p(),
                ideal: ideal(),
                relator: r.source.clone(),
            });
        }
    }
    Ok(red)
}

/// Why an image is a proper subgroup of `PSL₂(F_q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diagnosis {
    /// The generated group has at most 60 elements.
    SmallSubgroup,
    /// The generators share a fixed point over the algebraic closure.
    Borel,
    /// The image normalizes a torus (dihedral type).
    Torus,
    /// All traces lie in a proper subfield.
    Subfield,
    /// The action on `P¹(F_q)` is not transitive.
    NotTransitive,
}

impl fmt::Display for Diagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Diagnosis::SmallSubgroup => "small-subgroup",
            Diagnosis::Borel => "borel",
            Diagnosis::Torus => "torus",
            Diagnosis::Subfield => "subfield",
            Diagnosis::NotTransitive => "not-transitive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Surjectivity {
    pub surjective: bool,
    pub diagnosis: Option<Diagnosis>,
}

const SMALL_GROUP_BOUND: usize = 60;
const SAMPLE_WORDS: usize = 64;
const SAMPLE_LENGTH: usize = 24;

fn closure_is_small(red: &ReducedGenerators) -> bool {
    let field = &red.field;
    let mut seen: HashSet<Psl2> = HashSet::new();
    let mut queue = VecDeque::new();
    let id = Psl2::identity(field);
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(x) = queue.pop_front() {
        for g in &red.gens {
            let y = x.mul(field, g);
            if seen.insert(y.clone()) {
                if seen.len() > SMALL_GROUP_BOUND {
                    return false;
                }
                queue.push_back(y);
            }
        }
    }
    true
}

fn sample_elements(red: &ReducedGenerators) -> Vec<Psl2> {
    let field = &red.field;
    let seed = field.order() ^ 0x7e7a_11ed;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = red.gens.len();
    let mut out: Vec<Psl2> = red.gens.clone();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out.push(red.gens[i].mul(field, &red.gens[j]));
            }
        }
    }
    for _ in 0..SAMPLE_WORDS {
        let mut acc = Psl2::identity(field);
        for _ in 0..rng.gen_range(2..=SAMPLE_LENGTH) {
            let k = rng.gen_range(0..2 * n);
            let m = if k < n { &red.gens[k] } else { &red.inverses[k - n] };
            acc = acc.mul(field, m);
        }
        out.push(acc);
    }
    out
}

fn is_reducible(red: &ReducedGenerators) -> bool {
    let field = &red.field;
    let g = &red.gens;
    let mut cands = g.clone();
    if g.len() == 3 {
        cands.push(g[0].mul(field, &g[1]));
        cands.push(g[1].mul(field, &g[2]));
        cands.push(g[2].mul(field, &g[0]));
        cands.push(g[0].mul(field, &g[1]).mul(field, &g[2]));
    }
    let two = field.from_u64(2);
    for (i, x) in cands.iter().enumerate() {
        for y in &cands[i + 1..] {
            let tr = x.commutator(field, y).trace(field);
            // tr is only defined up to sign in PSL2
            if tr != two && tr != field.neg(&two) {
                return false;
            }
        }
    }
    true
}

fn normalizes_torus(red: &ReducedGenerators, sample: &[Psl2]) -> bool {
    let field = &red.field;
    let semisimple: Vec<&Psl2> = sample
        .iter()
        .filter(|m| !m.trace(field).is_zero() && !m.is_identity(field))
        .collect();
    semisimple.iter().enumerate().all(|(i, x)| {
        semisimple[i + 1..]
            .iter()
            .all(|y| x.mul(field, y) == y.mul(field, x))
    })
}

fn traces_in_subfield(red: &ReducedGenerators, sample: &[Psl2]) -> bool {
    let field = &red.field;
    let f = field.degree();
    if f == 1 {
        return false;
    }
    let deg = sample.iter().fold(1, |acc, m| {
        let d = field.element_degree(&m.trace_sq(field));
        acc / gcd(acc, d) * d
    });
    deg < f
}

/// Whether `red` generates all of `PSL₂(F_q)`, given the transitivity of
/// its action on `P¹(F_q)`.
///
/// A transitive image is either everything, dihedral, or one of the
/// exceptional groups of order at most 60; the checks below rule these out
/// in turn and name the first one that applies.
pub fn diagnose(red: &ReducedGenerators, transitive: bool) -> Surjectivity {
    let fail = |d| Surjectivity {
        surjective: false,
        diagnosis: Some(d),
    };
    if closure_is_small(red) {
        return fail(Diagnosis::SmallSubgroup);
    }
    if is_reducible(red) {
        return fail(Diagnosis::Borel);
    }
    let sample = sample_elements(red);
    if normalizes_torus(red, &sample) {
        return fail(Diagnosis::Torus);
    }
    if traces_in_subfield(red, &sample) {
        return fail(Diagnosis::Subfield);
    }
    if !transitive {
        return fail(Diagnosis::NotTransitive);
    }
    Surjectivity {
        surjective: true,
        diagnosis: None,
    }
}

pub fn is_surjective(red: &ReducedGenerators) -> Surjectivity {
    let line = ProjectiveLine::new(red.field.clone());
    let rep = crate::cover::build_perm_rep(red, &line);
    diagnose(red, rep.transitive)
}
