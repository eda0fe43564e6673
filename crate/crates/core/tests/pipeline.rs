use torsionlab::catalog::{get_group, GroupId, GroupSpec};
use torsionlab::cover::{build_perm_rep, build_schreier, PermRep, ProjectiveLine};
use torsionlab::experiment::{compute_record, homology_at};
use torsionlab::gf::primes_in;
use torsionlab::reduction::{enumerate_level_ideals, reduce_generators, LevelIdeal, ReductionError};
use torsionlab::rs::rs_matrix;
use torsionlab::snf::{elementary_divisors, oracle};
use torsionlab::{Int, SparseMatrix};

fn levels(g: &GroupSpec, p: u64, max_f: usize) -> Vec<LevelIdeal> {
    match enumerate_level_ideals(g, p, max_f) {
        Ok(l) => l,
        Err(ReductionError::BadPrime { .. }) => Vec::new(),
        Err(e) => panic!("{}: p = {p}: {e}", g.id),
    }
}

#[test]
fn index_one_gives_the_abelianization() {
    for id in GroupId::ALL {
        let g = get_group(id);
        let rep = PermRep::from_perms(vec![vec![0]; 3]);
        let s = build_schreier(&rep);
        let m: SparseMatrix = rs_matrix(&g.presentation, &s, &rep).unwrap();
        let got = elementary_divisors(&m);
        let (rank, full) = oracle::determinantal_report(&g.presentation.exponent_matrix());
        assert_eq!((got.rank, got.full_divisors()), (rank, full), "{id}");
    }
}

#[test]
fn relators_act_trivially_for_small_primes() {
    for id in GroupId::ALL {
        let g = get_group(id);
        let mut seen = 0;
        for p in primes_in(2, 60) {
            for l in levels(&g, p, 2) {
                let red = reduce_generators(&g, &l).unwrap();
                let rep = build_perm_rep(&red, &ProjectiveLine::new(l.field.clone()));
                assert_eq!(rep.degree as u64, l.norm + 1);
                for r in &g.presentation.relators {
                    let w = r.letters();
                    assert!((0..rep.degree as u32).all(|i| rep.apply_word(i, &w) == i), "{id} {} {}", l.tag(), r.source);
                }
                seen += 1;
            }
        }
        assert!(seen > 0, "{id}: no levels below 60");
    }
}

#[test]
fn frobenius_conjugates_give_the_same_homology() {
    for id in [GroupId::H2, GroupId::H3, GroupId::H6] {
        let g = get_group(id);
        let l = primes_in(20, 80)
            .into_iter()
            .flat_map(|p| levels(&g, p, 2))
            .find(|l| l.f == 2)
            .unwrap_or_else(|| panic!("{id}: no degree-2 level"));
        let a = homology_at::<Int>(&g, &l.field, &l.roots).unwrap();
        let b = homology_at::<Int>(&g, &l.field, &l.frobenius_conjugate()).unwrap();
        assert_eq!(a.report, b.report, "{id} {}", l.tag());
        assert_eq!(a.surjectivity, b.surjectivity);
    }
}

#[test]
fn records_are_consistent() {
    let g = get_group(GroupId::H2);
    let l = &levels(&g, 409, 1)[0];
    let r = compute_record(&g, l).unwrap();
    assert_eq!((r.p, r.f, r.norm, r.index), (409, 1, 409, 410));
    assert!(r.transitive && r.surjective);
    let ratio: f64 = r.log_torsion_f64() / r.volume_f64();
    assert!((ratio - r.ratio_f64()).abs() < 1e-12 * ratio);
    // 2 * V_T  * index with the catalog volume constant
    assert_eq!(r.volume, (g.cover_volume(410)).to_string());
}

#[test]
fn schreier_columns() {
    let g = get_group(GroupId::H4);
    let l = primes_in(30, 200)
        .into_iter()
        .flat_map(|p| levels(&g, p, 1))
        .next()
        .unwrap();
    let red = reduce_generators(&g, &l).unwrap();
    let rep = build_perm_rep(&red, &ProjectiveLine::new(l.field.clone()));
    let s = build_schreier(&rep);
    let n = s.index();
    // 3n generator edges, n - 1 of them in the tree
    assert_eq!(s.schreier_generators.len(), 2 * n + 1);
    assert_eq!(s.tree_edges(), n - 1);
}
