//! The six non-arithmetic hyperbolic tetrahedral groups and the group
//! definition file format.
//!
//! Each group is described by a presentation on generators `a, b, c`, a
//! number field given as a tower of at most two simple extensions, three
//! `2×2` generator matrices whose entries are polynomial expressions in the
//! tower roots, and the volume of the associated tetrahedron. The shipped
//! definitions live in `groups/*.toml` and double as schema documentation.

pub mod expr;
pub mod tower;
pub mod words;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use dashu_int::IBig;
use dashu_ratio::RBig;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decimal::Decimal;
use expr::{Expr, ExprError, ExprRing};
use tower::{Tower, TowerElem};
use words::{Letter, Relator, WordError};

pub const SCHEMA_VERSION: &str = "torsionlab-group/1";

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown group {0:?}; the catalog has H1..H6")]
    UnknownGroup(String),
    #[error("group file is not valid TOML: {0}")]
    Toml(String),
    #[error("unsupported schema {0:?}, expected {SCHEMA_VERSION:?}")]
    Schema(String),
    #[error("malformed number field: {0}")]
    MalformedField(String),
    #[error("malformed presentation: {0}")]
    MalformedPresentation(String),
    #[error("generator {0} does not have determinant 1")]
    DeterminantNotOne(String),
    #[error("relator {relator:?} does not hold for the generator matrices")]
    RelatorMismatch { relator: String },
    #[error("bad denominator prime {0} missing from field.bad_primes")]
    MissingBadPrime(u64),
    #[error("invalid volume: {0}")]
    Volume(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Catalog identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupId {
    H1,
    H2,
    H3,
    H4,
    H5,
    H6,
}

impl GroupId {
    pub const ALL: [GroupId; 6] = [
        GroupId::H1,
        GroupId::H2,
        GroupId::H3,
        GroupId::H4,
        GroupId::H5,
        GroupId::H6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GroupId::H1 => "H1",
            GroupId::H2 => "H2",
            GroupId::H3 => "H3",
            GroupId::H4 => "H4",
            GroupId::H5 => "H5",
            GroupId::H6 => "H6",
        }
    }

    fn source(self) -> &'static str {
        match self {
            GroupId::H1 => include_str!("../../groups/H1.toml"),
            GroupId::H2 => include_str!("../../groups/H2.toml"),
            GroupId::H3 => include_str!("../../groups/H3.toml"),
            GroupId::H4 => include_str!("../../groups/H4.toml"),
            GroupId::H5 => include_str!("../../groups/H5.toml"),
            GroupId::H6 => include_str!("../../groups/H6.toml"),
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GroupId {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<GroupId, CatalogError> {
        let norm = s.trim().to_ascii_uppercase().replace(['(', ')'], "");
        GroupId::ALL
            .into_iter()
            .find(|g| g.as_str() == norm)
            .ok_or_else(|| CatalogError::UnknownGroup(s.to_string()))
    }
}

/// Dihedral angle data `T(λ1, λ2, λ3; μ1, μ2, μ3)`: the edges `AB, AC, BC,
/// DC, DB, DA` carry angles `π/λ1, π/λ2, π/λ3, π/μ1, π/μ2, π/μ3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coxeter {
    pub lambda: [u32; 3],
    pub mu: [u32; 3],
}

impl Coxeter {
    fn sorted_orders(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.lambda.iter().chain(&self.mu).copied().collect();
        v.sort_unstable();
        v
    }
}

impl fmt::Display for Coxeter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [l1, l2, l3] = self.lambda;
        let [m1, m2, m3] = self.mu;
        write!(f, "T({l1},{l2},{l3}; {m1},{m2},{m3})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Relator>,
}

impl Presentation {
    pub fn parse(generators: &[&str], relators: &[&str]) -> Result<Presentation, CatalogError> {
        let generators: Vec<String> = generators.iter().map(|s| s.to_string()).collect();
        let relators = relators
            .iter()
            .map(|r| Relator::parse(r, &generators))
            .collect::<Result<_, _>>()?;
        Ok(Presentation {
            generators,
            relators,
        })
    }

    /// `a^{μ1} = b^{μ2} = c^{λ3} = (ca)^{λ2} = (cb^{-1})^{λ1} = (ab)^{μ3} = 1`.
    pub fn tetrahedral(cox: &Coxeter) -> Presentation {
        let [l1, l2, l3] = cox.lambda;
        let [m1, m2, m3] = cox.mu;
        let rels = [
            format!("a^{m1}"),
            format!("b^{m2}"),
            format!("c^{l3}"),
            format!("(ca)^{l2}"),
            format!("(cb^-1)^{l1}"),
            format!("(ab)^{m3}"),
        ];
        let rels: Vec<&str> = rels.iter().map(String::as_str).collect();
        Presentation::parse(&["a", "b", "c"], &rels).expect("generic presentation parses")
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// Relator-by-generator exponent sum matrix: the relation matrix of the
    /// abelianization.
    pub fn exponent_matrix(&self) -> Vec<Vec<i64>> {
        self.relators
            .iter()
            .map(|r| r.exponent_sums(self.generators.len()))
            .collect()
    }

    fn validate_tetrahedral(&self, cox: &Coxeter) -> Result<(), CatalogError> {
        let bad = |m: String| Err(CatalogError::MalformedPresentation(m));
        if self.generators.len() != 3 {
            return bad(format!("expected 3 generators, found {}", self.generators.len()));
        }
        let distinct: BTreeSet<&String> = self.generators.iter().collect();
        if distinct.len() != 3 || self.generators.iter().any(|g| g.chars().count() != 1) {
            return bad("generator names must be three distinct single letters".into());
        }
        if self.relators.len() != 6 {
            return bad(format!("expected 6 relators, found {}", self.relators.len()));
        }
        if cox.lambda.iter().chain(&cox.mu).any(|&e| e < 2) {
            return bad(format!("Coxeter exponents must be at least 2: {cox}"));
        }
        for r in &self.relators {
            if r.exponent < 2 || r.base.is_empty() || r.base.len() > 2 {
                return bad(format!("relator {:?} is not (x)^n or (xy)^n with n >= 2", r.source));
            }
        }
        let mut orders: Vec<u32> = self.relators.iter().map(|r| r.exponent).collect();
        orders.sort_unstable();
        if orders != cox.sorted_orders() {
            return bad(format!("relator orders {orders:?} do not match {cox}"));
        }
        Ok(())
    }
}

/// A coefficient of a minimal polynomial as written in the definition file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefSource {
    Int(i64),
    Expr(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coefficient {
    pub source: CoefSource,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSpec {
    pub name: String,
    /// Leading coefficient first; the leading coefficient is 1.
    pub minpoly: Vec<Coefficient>,
}

impl RootSpec {
    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedExpr {
    pub name: String,
    pub source: String,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumberFieldSpec {
    pub tower: Vec<RootSpec>,
    pub derived: Vec<NamedExpr>,
    pub bad_primes: Vec<u64>,
    pub ramified_primes: Vec<u64>,
}

/// Values of every named symbol (roots, then derived elements) in some ring.
pub struct Environment<E> {
    values: HashMap<String, E>,
}

impl<E: Clone> Environment<E> {
    pub fn get(&self, name: &str) -> Option<E> {
        self.values.get(name).cloned()
    }

    pub fn eval<R: ExprRing<Elem = E>>(&self, ring: &R, e: &Expr) -> Result<E, ExprError> {
        e.eval(ring, &|n| self.get(n))
    }
}

impl NumberFieldSpec {
    pub fn root_names(&self) -> Vec<&str> {
        self.tower.iter().map(|r| r.name.as_str()).collect()
    }

    pub fn degree(&self) -> usize {
        self.tower.iter().map(RootSpec::degree).product()
    }

    /// Bind the tower roots to `roots` and evaluate the derived elements.
    pub fn environment<R: ExprRing>(
        &self,
        ring: &R,
        roots: &[R::Elem],
    ) -> Result<Environment<R::Elem>, ExprError> {
        let mut env = Environment {
            values: HashMap::new(),
        };
        for (spec, v) in self.tower.iter().zip(roots) {
            env.values.insert(spec.name.clone(), v.clone());
        }
        for d in &self.derived {
            let v = env.eval(ring, &d.expr)?;
            env.values.insert(d.name.clone(), v);
        }
        Ok(env)
    }

    /// Ascending coefficients of tower step `step`, evaluated with the
    /// earlier roots bound as in `roots`.
    pub fn minpoly_coeffs<R: ExprRing>(
        &self,
        ring: &R,
        step: usize,
        roots: &[R::Elem],
    ) -> Result<Vec<R::Elem>, ExprError> {
        let names = self.root_names();
        let lookup = |n: &str| {
            names[..step]
                .iter()
                .position(|&k| k == n)
                .map(|i| roots[i].clone())
        };
        self.tower[step]
            .minpoly
            .iter()
            .rev()
            .map(|c| c.expr.eval(ring, &lookup))
            .collect()
    }

    /// The exact tower ring over Q together with its root elements.
    pub fn exact_tower(&self) -> Result<(Tower, Vec<TowerElem>), ExprError> {
        let rat = expr::Rationals;
        let base: Vec<RBig> = self.minpoly_coeffs(&rat, 0, &[])?;
        let provisional = Tower::new(base.clone(), None);
        let tower = if self.tower.len() > 1 {
            let r0 = provisional.base_root();
            let ext = self.minpoly_coeffs(&provisional, 1, &[r0])?;
            let d1 = base.len() - 1;
            let ext = ext.into_iter().map(|e| e[..d1].to_vec()).collect();
            Tower::new(base, Some(ext))
        } else {
            provisional
        };
        let mut roots = vec![tower.base_root()];
        if let Some(r1) = tower.ext_root() {
            roots.push(r1);
        }
        Ok((tower, roots))
    }

    fn all_exprs(&self) -> impl Iterator<Item = &Expr> {
        self.tower
            .iter()
            .flat_map(|r| r.minpoly.iter().map(|c| &c.expr))
            .chain(self.derived.iter().map(|d| &d.expr))
    }
}

/// A `2×2` matrix entry as written and as parsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub source: String,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    pub name: String,
    pub entries: [[Entry; 2]; 2],
}

pub type Mat2<E> = [[E; 2]; 2];

pub fn mat_mul<R: ExprRing>(ring: &R, x: &Mat2<R::Elem>, y: &Mat2<R::Elem>) -> Mat2<R::Elem> {
    let e = |i: usize, j: usize| ring.add(&ring.mul(&x[i][0], &y[0][j]), &ring.mul(&x[i][1], &y[1][j]));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    pub id: String,
    pub description: String,
    pub coxeter: Coxeter,
    pub presentation: Presentation,
    pub field: NumberFieldSpec,
    pub generators: Vec<GeneratorMatrix>,
    pub tetrahedron_volume: Decimal,
    pub cocompact: bool,
    pub ideal_vertices: u32,
}

impl GroupSpec {
    /// Generator matrices evaluated with the tower roots bound to `roots`.
    pub fn generator_values<R: ExprRing>(
        &self,
        ring: &R,
        roots: &[R::Elem],
    ) -> Result<Vec<Mat2<R::Elem>>, ExprError> {
        let env = self.field.environment(ring, roots)?;
        self.generators
            .iter()
            .map(|g| {
                let e = |i: usize, j: usize| env.eval(ring, &g.entries[i][j].expr);
                Ok([[e(0, 0)?, e(0, 1)?], [e(1, 0)?, e(1, 1)?]])
            })
            .collect()
    }

    /// Product of the matrices along a word.
    pub fn word_value<R: ExprRing>(
        ring: &R,
        gens: &[Mat2<R::Elem>],
        inverses: &[Mat2<R::Elem>],
        word: &[Letter],
    ) -> Mat2<R::Elem> {
        let one = ring.one();
        let zero = ring.sub(&one, &one);
        let mut acc = [[one.clone(), zero.clone()], [zero, one]];
        for l in word {
            let m = if l.inverse { &inverses[l.gen] } else { &gens[l.gen] };
            acc = mat_mul(ring, &acc, m);
        }
        acc
    }

    /// Volume `2 · V_T · index` of the cover of the given index.
    pub fn cover_volume(&self, index: u64) -> Decimal {
        self.tetrahedron_volume.mul_int(2 * index)
    }

    pub fn to_toml(&self) -> String {
        let file = GroupFile {
            schema: SCHEMA_VERSION.to_string(),
            id: self.id.clone(),
            description: self.description.clone(),
            cocompact: self.cocompact,
            ideal_vertices: self.ideal_vertices,
            coxeter: self.coxeter,
            presentation: PresentationFile {
                generators: self.presentation.generators.clone(),
                relators: self.presentation.relators.iter().map(|r| r.source.clone()).collect(),
            },
            field: FieldFile {
                bad_primes: self.field.bad_primes.clone(),
                ramified_primes: self.field.ramified_primes.clone(),
                tower: self
                    .field
                    .tower
                    .iter()
                    .map(|r| TowerStepFile {
                        root: r.name.clone(),
                        minpoly: r.minpoly.iter().map(|c| c.source.clone()).collect(),
                    })
                    .collect(),
                derived: self
                    .field
                    .derived
                    .iter()
                    .map(|d| DerivedFile {
                        name: d.name.clone(),
                        value: d.source.clone(),
                    })
                    .collect(),
            },
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorFile {
                    name: g.name.clone(),
                    matrix: [
                        [g.entries[0][0].source.clone(), g.entries[0][1].source.clone()],
                        [g.entries[1][0].source.clone(), g.entries[1][1].source.clone()],
                    ],
                })
                .collect(),
            volume: VolumeFile {
                tetrahedron: self.tetrahedron_volume.to_string(),
            },
        };
        toml::to_string(&file).expect("group files always serialize")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupFile {
    schema: String,
    id: String,
    #[serde(default)]
    description: String,
    cocompact: bool,
    ideal_vertices: u32,
    coxeter: Coxeter,
    presentation: PresentationFile,
    field: FieldFile,
    generators: Vec<GeneratorFile>,
    volume: VolumeFile,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PresentationFile {
    generators: Vec<String>,
    relators: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldFile {
    bad_primes: Vec<u64>,
    ramified_primes: Vec<u64>,
    tower: Vec<TowerStepFile>,
    #[serde(default)]
    derived: Vec<DerivedFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TowerStepFile {
    root: String,
    minpoly: Vec<CoefSource>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DerivedFile {
    name: String,
    value: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorFile {
    name: String,
    matrix: [[String; 2]; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VolumeFile {
    tetrahedron: String,
}

/// The built-in catalog entry.
pub fn get_group(id: GroupId) -> GroupSpec {
    load_group(id.source()).expect("shipped group definitions are valid")
}

/// Look a group up by name (`H2`, `h2`, `H(2)`).
pub fn get_group_by_name(name: &str) -> Result<GroupSpec, CatalogError> {
    Ok(get_group(name.parse::<GroupId>()?))
}

/// Parse and fully validate a group definition file.
pub fn load_group(text: &str) -> Result<GroupSpec, CatalogError> {
    let file: GroupFile = toml::from_str(text).map_err(|e| CatalogError::Toml(e.to_string()))?;
    if file.schema != SCHEMA_VERSION {
        return Err(CatalogError::Schema(file.schema));
    }
    let field = build_field(&file.field)?;

    let gens: Vec<&str> = file.presentation.generators.iter().map(String::as_str).collect();
    let rels: Vec<&str> = file.presentation.relators.iter().map(String::as_str).collect();
    let presentation = Presentation::parse(&gens, &rels)?;
    presentation.validate_tetrahedral(&file.coxeter)?;

    let names: Vec<&str> = file.generators.iter().map(|g| g.name.as_str()).collect();
    if names != gens {
        return Err(CatalogError::MalformedPresentation(format!(
            "matrices are given for {names:?} but the presentation has generators {gens:?}"
        )));
    }
    let generators = file
        .generators
        .iter()
        .map(|g| {
            let entry = |i: usize, j: usize| -> Result<Entry, CatalogError> {
                let source = g.matrix[i][j].clone();
                let expr = Expr::parse(&source)?;
                Ok(Entry { source, expr })
            };
            Ok(GeneratorMatrix {
                name: g.name.clone(),
                entries: [[entry(0, 0)?, entry(0, 1)?], [entry(1, 0)?, entry(1, 1)?]],
            })
        })
        .collect::<Result<Vec<_>, CatalogError>>()?;

    let tetrahedron_volume: Decimal = file.volume.tetrahedron.parse().map_err(CatalogError::Volume)?;
    if !tetrahedron_volume.is_positive() {
        return Err(CatalogError::Volume("volume must be positive".into()));
    }

    let spec = GroupSpec {
        id: file.id,
        description: file.description,
        coxeter: file.coxeter,
        presentation,
        field,
        generators,
        tetrahedron_volume,
        cocompact: file.cocompact,
        ideal_vertices: file.ideal_vertices,
    };
    check_bad_primes(&spec)?;
    check_matrices(&spec)?;
    Ok(spec)
}

fn build_field(f: &FieldFile) -> Result<NumberFieldSpec, CatalogError> {
    let bad = |m: String| Err(CatalogError::MalformedField(m));
    if f.tower.is_empty() || f.tower.len() > 2 {
        return bad(format!("tower must have 1 or 2 steps, found {}", f.tower.len()));
    }
    let mut known: Vec<String> = Vec::new();
    let mut tower = Vec::new();
    for (step, t) in f.tower.iter().enumerate() {
        if t.minpoly.len() < 2 {
            return bad(format!("minimal polynomial of {} must have degree >= 1", t.root));
        }
        let minpoly = t
            .minpoly
            .iter()
            .map(|c| {
                let expr = match c {
                    CoefSource::Int(v) => Expr::Const(RBig::from(IBig::from(*v))),
                    CoefSource::Expr(s) => Expr::parse(s)?,
                };
                Ok(Coefficient {
                    source: c.clone(),
                    expr,
                })
            })
            .collect::<Result<Vec<_>, CatalogError>>()?;
        if minpoly[0].expr.constant_value() != Some(RBig::ONE) {
            return bad(format!("minimal polynomial of {} must be monic", t.root));
        }
        for c in &minpoly {
            for s in c.expr.symbols() {
                if !known[..step].contains(&s) {
                    return bad(format!("coefficient of {} uses {s:?}, not an earlier root", t.root));
                }
            }
        }
        if known.contains(&t.root) {
            return bad(format!("duplicate symbol {:?}", t.root));
        }
        known.push(t.root.clone());
        tower.push(RootSpec {
            name: t.root.clone(),
            minpoly,
        });
    }
    let mut derived = Vec::new();
    for d in &f.derived {
        let expr = Expr::parse(&d.value)?;
        if let Some(s) = expr.symbols().into_iter().find(|s| !known.contains(s)) {
            return bad(format!("derived {:?} uses undefined symbol {s:?}", d.name));
        }
        if known.contains(&d.name) {
            return bad(format!("duplicate symbol {:?}", d.name));
        }
        known.push(d.name.clone());
        derived.push(NamedExpr {
            name: d.name.clone(),
            source: d.value.clone(),
            expr,
        });
    }
    Ok(NumberFieldSpec {
        tower,
        derived,
        bad_primes: f.bad_primes.clone(),
        ramified_primes: f.ramified_primes.clone(),
    })
}

fn prime_factors(n: &IBig) -> Vec<u64> {
    let mut n: u64 = n.clone().try_into().expect("denominators are small");
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

/// Primes dividing some denominator in the definition.
pub fn denominator_primes(spec: &GroupSpec) -> BTreeSet<u64> {
    let entries = spec
        .generators
        .iter()
        .flat_map(|g| g.entries.iter().flatten().map(|e| &e.expr));
    spec.field
        .all_exprs()
        .chain(entries)
        .flat_map(|e| e.denominators())
        .flat_map(|d| prime_factors(&d))
        .collect()
}

fn check_bad_primes(spec: &GroupSpec) -> Result<(), CatalogError> {
    for p in denominator_primes(spec) {
        if !spec.field.bad_primes.contains(&p) {
            return Err(CatalogError::MissingBadPrime(p));
        }
    }
    Ok(())
}

fn check_matrices(spec: &GroupSpec) -> Result<(), CatalogError> {
    if spec.generators.len() != spec.presentation.num_generators() {
        return Err(CatalogError::MalformedPresentation(
            "one matrix per generator is required".into(),
        ));
    }
    let (tower, roots) = spec.field.exact_tower()?;
    let mats = spec.generator_values(&tower, &roots)?;
    let one = tower.one();
    let mut inverses = Vec::new();
    for (g, m) in spec.generators.iter().zip(&mats) {
        let det = tower.sub(&tower.mul(&m[0][0], &m[1][1]), &tower.mul(&m[0][1], &m[1][0]));
        if det != one {
            return Err(CatalogError::DeterminantNotOne(g.name.clone()));
        }
        inverses.push([
            [m[1][1].clone(), tower.neg(&m[0][1])],
            [tower.neg(&m[1][0]), m[0][0].clone()],
        ]);
    }
    let zero = tower.zero();
    for r in &spec.presentation.relators {
        let v = GroupSpec::word_value(&tower, &mats, &inverses, &r.letters());
        let scalar = v[0][1] == zero && v[1][0] == zero && v[0][0] == v[1][1];
        let pm_one = v[0][0] == one || v[0][0] == tower.neg(&one);
        if !(scalar && pm_one) {
            return Err(CatalogError::RelatorMismatch {
                relator: r.source.clone(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_groups_load_and_validate() {
        for id in GroupId::ALL {
            let g = get_group(id);
            assert_eq!(g.id, id.as_str());
            assert_eq!(g.presentation.relators.len(), 6);
            assert!(g.tetrahedron_volume.is_positive());
        }
    }

    #[test]
    fn h2_entry() {
        let g = get_group(GroupId::H2);
        let srcs: Vec<&str> = g.presentation.relators.iter().map(|r| r.source.as_str()).collect();
        assert_eq!(srcs, ["a^6", "b^2", "c^2", "(ca)^2", "(cb^-1)^5", "(ab)^3"]);
        assert_eq!(g.tetrahedron_volume.to_string(), "0.1715016613");
        assert_eq!(g.field.bad_primes, vec![2]);
        assert_eq!(g.field.degree(), 8);
        assert_eq!(g.ideal_vertices, 1);
        assert!(!g.cocompact);
    }

    #[test]
    fn h1_entry() {
        let g = get_group(GroupId::H1);
        assert_eq!(g.field.root_names(), vec!["t", "alpha"]);
        assert_eq!(g.field.tower[1].degree(), 4);
        assert_eq!(g.field.bad_primes, vec![5]);
        assert_eq!(g.tetrahedron_volume.to_string(), "0.3586534401");
        assert!(g.cocompact);
        assert_eq!(denominator_primes(&g).into_iter().collect::<Vec<_>>(), vec![5]);
    }

    #[test]
    fn h6_entry() {
        let g = get_group(GroupId::H6);
        assert_eq!(g.field.root_names(), vec!["z", "s"]);
        assert_eq!(g.field.bad_primes, vec![2]);
        assert_eq!(g.tetrahedron_volume.to_string(), "0.6729858045");
    }

    #[test]
    fn generic_presentation_matches_catalog_for_h2_to_h6() {
        for id in &GroupId::ALL[1..] {
            let g = get_group(*id);
            assert_eq!(Presentation::tetrahedral(&g.coxeter), g.presentation, "{id}");
        }
        // H1 is written in a relabelled form with the same relator orders.
        let h1 = get_group(GroupId::H1);
        assert_ne!(Presentation::tetrahedral(&h1.coxeter), h1.presentation);
    }

    #[test]
    fn unknown_id() {
        assert!(matches!("H7".parse::<GroupId>(), Err(CatalogError::UnknownGroup(_))));
        assert_eq!("h(3)".parse::<GroupId>().unwrap(), GroupId::H3);
    }

    #[test]
    fn round_trip_through_toml() {
        for id in GroupId::ALL {
            let g = get_group(id);
            let again = load_group(&g.to_toml()).unwrap();
            assert_eq!(again, g);
        }
    }

    fn h3_text() -> String {
        GroupId::H3.source().to_string()
    }

    #[test]
    fn determinant_two_is_rejected() {
        let text = h3_text().replace(r#"[["z^2", "-i"], ["0", "z^-2"]]"#, r#"[["z^2", "-i"], ["0", "2*z^-2"]]"#);
        assert!(matches!(load_group(&text), Err(CatalogError::DeterminantNotOne(g)) if g == "b"));
    }

    #[test]
    fn five_relators_are_rejected() {
        let text = h3_text().replace(r#", "(ab)^2"]"#, "]");
        assert!(matches!(load_group(&text), Err(CatalogError::MalformedPresentation(_))));
    }

    #[test]
    fn wrong_relator_order_is_rejected() {
        // Orders still match the Coxeter data but the matrices disagree.
        let text = h3_text().replace(r#""(ca)^3", "(cb^-1)^3""#, r#""(ca)^2", "(cb^-1)^3""#);
        assert!(load_group(&text).is_err());
        let text = h3_text()
            .replace("lambda = [3, 3, 2]", "lambda = [3, 2, 2]")
            .replace(r#""(ca)^3""#, r#""(ca)^2""#);
        assert!(matches!(load_group(&text), Err(CatalogError::RelatorMismatch { .. })));
    }

    #[test]
    fn missing_bad_prime_is_rejected() {
        let text = GroupId::H2.source().replace("bad_primes = [2]", "bad_primes = []");
        assert!(matches!(load_group(&text), Err(CatalogError::MissingBadPrime(2))));
    }

    #[test]
    fn schema_and_syntax_errors() {
        let text = h3_text().replace("torsionlab-group/1", "torsionlab-group/0");
        assert!(matches!(load_group(&text), Err(CatalogError::Schema(_))));
        assert!(matches!(load_group("not toml = ["), Err(CatalogError::Toml(_))));
        let text = h3_text().replace(r#"value = "z^3""#, r#"value = "q^3""#);
        assert!(matches!(load_group(&text), Err(CatalogError::MalformedField(_))));
    }
}
