use super::*;
use crate::analysis::DesignAnalysis;
use crate::blockset::mapsearch::SearchLimits;
use crate::blockset::testing::d7;
use crate::blockset::{Block, Design, Permutation};
use crate::decomposition::decompose;
use crate::geometry::pg_hyperplane_complement_design as pg;

fn blk(v: usize, pts: &[usize]) -> Block {
    Block::from_points(v, pts.iter().copied()).unwrap()
}

fn tp(v: usize, pairs: &[(usize, usize)]) -> Permutation {
    Permutation::from_transpositions(v, pairs).unwrap()
}

fn d7_o() -> (Design, usize) {
    let d = d7();
    let oi = d.index_of(&blk(7, &[3, 4, 5, 6])).unwrap();
    (d, oi)
}

#[test]
fn alpha_on_d7() {
    let d = d7();
    let o = blk(7, &[3, 4, 5, 6]);
    let z = blk(7, &[3, 4, 5]);
    let a3 = alpha_permutation(&d, &o, &z, 3).unwrap();
    assert_eq!(a3, tp(7, &[(3, 6), (4, 5)]));
    assert!(a3.then(&a3).is_identity());
    let img = |pts: &[usize]| a3.apply_block(&blk(7, pts)).unwrap();
    assert_eq!(img(&[3, 4, 5, 6]), blk(7, &[3, 4, 5, 6]));
    assert_eq!(img(&[0, 1, 3, 4]), blk(7, &[0, 1, 5, 6]));
    assert_eq!(img(&[0, 2, 3, 5]), blk(7, &[0, 2, 4, 6]));
    assert_eq!(img(&[1, 2, 4, 5]), blk(7, &[1, 2, 4, 5]));
    assert_eq!(img(&[1, 2, 3, 6]), blk(7, &[1, 2, 3, 6]));
    let a4 = alpha_permutation(&d, &o, &z, 4).unwrap();
    assert_eq!(a4, tp(7, &[(4, 6), (3, 5)]));
    assert!(a4.is_automorphism_of(&d));
    assert!(alpha_permutation(&d, &o, &z, 6).is_err());
}

#[test]
fn klein_group_on_d7() {
    let (d, oi) = d7_o();
    let cert = build_group(&d, oi).unwrap();
    let mut expect = vec![
        Permutation::identity(7),
        tp(7, &[(3, 6), (4, 5)]),
        tp(7, &[(4, 6), (3, 5)]),
        tp(7, &[(5, 6), (3, 4)]),
    ];
    expect.sort();
    assert_eq!(cert.elements, expect);
    assert_eq!(cert.fixed, blk(7, &[0, 1, 2]));
    let report = verify_certificate(&d, &cert);
    assert!(report.passed(), "{report}");
    assert!(verify_lemma1(&d, &cert).passed());
}

#[test]
fn pg4_groups_are_elementary_abelian() {
    let d = pg(4).unwrap();
    for oi in [0, 5, 14] {
        let cert = build_group(&d, oi).unwrap();
        assert_eq!(cert.elements.len(), 8);
        assert!(cert
            .elements
            .iter()
            .filter(|g| !g.is_identity())
            .all(|g| g.is_involution()));
        assert!(verify_certificate(&d, &cert).passed());
        // Every non-identity element is a product of 4 disjoint transpositions of O.
        for g in cert.elements.iter().filter(|g| !g.is_identity()) {
            assert_eq!(g.cycles().len(), 4);
            assert_eq!(g.support(), cert.moved().bits());
        }
    }
}

#[test]
fn alpha_products_follow_lines_of_dz() {
    for d in [d7(), pg(4).unwrap()] {
        let oi = crate::analysis::center_blocks(&d)[0];
        let o = d.blocks()[oi];
        let last = 63 - o.bits().leading_zeros() as usize;
        let z = Block::from_points(d.v(), o.iter().filter(|&p| p != last)).unwrap();
        let w = decompose(&d, oi, &z).unwrap();
        let a = DesignAnalysis::new(&w.design_z).unwrap();
        let zp = z.to_vec();
        for (i, &p) in zp.iter().enumerate() {
            for (j, &q) in zp.iter().enumerate() {
                if i == j {
                    continue;
                }
                let t = zp[a.line(i, j).unwrap().unwrap().t];
                let ap = alpha_permutation(&d, &o, &z, p).unwrap();
                let aq = alpha_permutation(&d, &o, &z, q).unwrap();
                let at = alpha_permutation(&d, &o, &z, t).unwrap();
                assert_eq!(ap.then(&aq), at);
                assert_eq!(aq.then(&ap), at);
            }
        }
    }
}

#[test]
fn verify_certificate_negative_controls() {
    let (d, oi) = d7_o();
    let cert = build_group(&d, oi).unwrap();

    let mut swapped = cert.elements.clone();
    swapped[1] = tp(7, &[(3, 4)]);
    let bad = PyramidalCertificate::new(cert.fixed, swapped);
    let report = verify_certificate(&d, &bad);
    let auto = report.get("automorphisms").unwrap();
    assert!(!auto.passed);
    assert!(auto.witness.as_ref().unwrap().contains("sends block"));

    let mut short = cert.elements.clone();
    short.pop();
    let bad = PyramidalCertificate::new(cert.fixed, short);
    let report = verify_certificate(&d, &bad);
    assert!(!report.get("closure").unwrap().passed || !report.get("sharply-transitive").unwrap().passed);
}

#[test]
fn lemma1_negative_control() {
    let d = d7();
    // Moved set {0,1,2,3} is not a block of D7.
    let fake = PyramidalCertificate::new(
        blk(7, &[4, 5, 6]),
        vec![
            Permutation::identity(7),
            tp(7, &[(0, 1), (2, 3)]),
            tp(7, &[(0, 2), (1, 3)]),
            tp(7, &[(0, 3), (1, 2)]),
        ],
    );
    let report = verify_lemma1(&d, &fake);
    assert!(!report.get("moved-set-is-block").unwrap().passed);
}

#[test]
fn stabilizer_on_d7() {
    let (d, oi) = d7_o();
    let cert = build_group(&d, oi).unwrap();
    let found = stabilizer_search(&d, &blk(7, &[0, 1, 2]), SearchLimits::unlimited()).unwrap();
    assert_eq!(found, cert.elements);
    let all = stabilizer_search(&d, &d.point_set(), SearchLimits::unlimited()).unwrap();
    assert_eq!(all, vec![Permutation::identity(7)]);
}

#[test]
fn stabilizer_matches_brute_force_on_d7() {
    use itertools::Itertools;
    let d = d7();
    for fixed in [blk(7, &[0]), blk(7, &[0, 1]), blk(7, &[2, 5, 6])] {
        let moved: Vec<usize> = fixed.complement().iter().collect();
        let mut brute = Vec::new();
        for perm in moved.iter().copied().permutations(moved.len()) {
            let mut img: Vec<usize> = (0..7).collect();
            for (&a, &b) in moved.iter().zip(&perm) {
                img[a] = b;
            }
            let g = Permutation::new(img).unwrap();
            if g.is_automorphism_of(&d) {
                brute.push(g);
            }
        }
        brute.sort();
        assert_eq!(stabilizer_search(&d, &fixed, SearchLimits::unlimited()).unwrap(), brute);
    }
}

#[test]
fn abelian_subgroup_search_on_d7() {
    let (d, oi) = d7_o();
    let cert = build_group(&d, oi).unwrap();
    let stab = stabilizer_search(&d, &cert.fixed, SearchLimits::unlimited()).unwrap();
    let groups = sharply_transitive_abelian_subgroups(&stab, &cert.moved());
    assert_eq!(groups, vec![cert.elements.clone()]);
}

#[test]
fn involution_chain_on_d7() {
    let (d, oi) = d7_o();
    let cert = build_group(&d, oi).unwrap();
    let chain = extract_involution_chain(&d, &cert).unwrap();
    assert_eq!(chain.generators.len(), 2);
    assert_eq!(chain.trace_chain.iter().map(Block::len).collect::<Vec<_>>(), vec![2, 1]);
    assert_eq!(chain.subgroup_sizes, vec![2, 1]);
    assert!(chain.generators.iter().all(Permutation::is_involution));
    assert_eq!(group::generate(7, &chain.generators), cert.elements);
}

#[test]
fn involution_chain_on_pg4() {
    let d = pg(4).unwrap();
    let cert = build_group(&d, 2).unwrap();
    let chain = extract_involution_chain(&d, &cert).unwrap();
    assert_eq!(chain.generators.len(), 3);
    assert_eq!(
        chain.trace_chain.iter().map(Block::len).collect::<Vec<_>>(),
        vec![4, 2, 1]
    );
    for i in 0..3 {
        let rest = group::generate(15, &chain.generators[i + 1..]);
        assert!(!group::contains(&rest, &chain.generators[i]));
    }
}

#[test]
fn trace_family_dichotomy_and_halving() {
    let d = pg(4).unwrap();
    let cert = build_group(&d, 7).unwrap();
    let o = cert.moved();
    let traces = trace_family(&d, &o);
    assert_eq!(traces.len(), 14);
    for &y in &traces {
        for &y2 in &traces {
            if y != y2 {
                assert!(y2 == o.bits() & !y || (y & y2).count_ones() == 2);
            }
        }
        let preserving = cert.elements.iter().filter(|g| g.apply_bits(y) == y).count();
        assert_eq!(preserving, 4);
    }
    for g in cert.elements.iter().filter(|g| !g.is_identity()) {
        assert!(traces.iter().any(|&y| g.apply_bits(y) == o.bits() & !y));
    }
}

#[test]
fn theorem_on_d7() {
    let (d, oi) = d7_o();
    let cert = build_group(&d, oi).unwrap();
    let report = verify_theorem(&d, &cert);
    assert!(report.passed(), "{report}");
}

#[test]
fn normality_on_d7() {
    let (d, oi) = d7_o();
    let r = check_normality(&d, oi, SearchLimits::unlimited()).unwrap();
    assert!(r.holds());
    // Stabilizer of a block in PGL(3,2) has order 168 / 7 = 24.
    assert_eq!(r.checked, 24);
}

#[test]
fn inner_conjugation_is_trivial() {
    let (d, oi) = d7_o();
    let cert = build_group(&d, oi).unwrap();
    for f in &cert.elements {
        let conj = group::canonical(
            &cert
                .elements
                .iter()
                .map(|g| f.inverse().then(g).then(f))
                .collect::<Vec<_>>(),
        );
        assert_eq!(conj, cert.elements);
    }
}
