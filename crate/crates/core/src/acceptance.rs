//! The acceptance suite: a test corpus per tier and one check per criterion.
//!
//! Tiers are cumulative. `r3` covers everything at rank 3, `r4` adds the
//! exhaustive rank-4 corpus, `r5` adds the sampled rank-5 sums and the
//! negative path.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::analysis::{center_blocks, is_center_block, satisfies_pg_criterion};
use crate::blockset::{is_isomorphic_limited, validate_symmetric_design, Block, Design, SearchLimits};
use crate::decomposition::{
    check_prop_z, decompose, delta_search, sum_construction, transfer_delta, z_choices, DeltaSearchMode, PropZVerdict,
};
use crate::error::{DesignError, Result};
use crate::geometry::{
    enumerate_cliques, enumerate_maximal_cliques, is_singular_subspace, pg_hyperplane_complement_design as pg,
    GeometryParams, DEFAULT_VERTEX_BUDGET,
};
use crate::pyramidal::{
    build_group, check_normality, extract_involution_chain, group_for_z, sharply_transitive_abelian_subgroups,
    stabilizer_search, verify_certificate, verify_lemma1,
};
use crate::report::{Check, RunReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tier {
    R3,
    R4,
    R5,
}

impl FromStr for Tier {
    type Err = DesignError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r3" => Ok(Tier::R3),
            "r4" => Ok(Tier::R4),
            "r5" => Ok(Tier::R5),
            _ => Err(DesignError::Argument(format!(
                "unknown tier {s:?}; expected r3, r4 or r5"
            ))),
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::R3 => "r3",
            Tier::R4 => "r4",
            Tier::R5 => "r5",
        })
    }
}

/// A design together with a center block, as produced by a sum.
#[derive(Clone, Debug)]
pub struct SumSpecimen {
    pub label: String,
    pub design: Design,
    pub o_index: usize,
    /// Whether `D_Z` passed the PG criterion when the sum was assembled.
    pub z_is_pg: bool,
}

/// Seed for the sampled bijections of the rank-5 sums.
pub const R5_DELTA_SEED: u64 = 0x5eed;

/// Declared wall-clock budget for the rank-5 negative-path search.
pub const NEGATIVE_PATH_BUDGET: Duration = Duration::from_secs(60);

#[derive(Clone, Debug)]
pub struct Corpus {
    pub tier: Tier,
    /// Every size-7 clique of the `(7, 2)` collinearity graph.
    pub r3_cliques: Vec<Design>,
    /// The cliques plus `pg(3)` and `D7`, deduplicated.
    pub r3: Vec<Design>,
    /// Bijections tried by the exhaustive rank-4 delta search.
    pub r4_bijections: usize,
    /// `pg(4)` plus every distinct rank-4 delta-search output.
    pub r4: Vec<Design>,
    /// First rank-4 delta-search output failing the PG criterion, if any.
    pub r4_non_pg: Option<Design>,
    pub r5: Vec<SumSpecimen>,
}

/// The `(7,4,2)` design with center block `{3,4,5,6}` used as the running example.
pub fn d7() -> Design {
    Design::from_point_lists(
        7,
        [
            vec![3, 4, 5, 6],
            vec![0, 1, 3, 4],
            vec![0, 1, 5, 6],
            vec![0, 2, 3, 5],
            vec![0, 2, 4, 6],
            vec![1, 2, 4, 5],
            vec![1, 2, 3, 6],
        ],
    )
    .expect("valid block list")
}

fn range_block(v: usize, lo: usize, hi: usize) -> Block {
    Block::from_points(v, lo..hi).expect("in range")
}

fn dedup(designs: impl IntoIterator<Item = Design>) -> Vec<Design> {
    designs.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

impl Corpus {
    pub fn build(tier: Tier) -> Result<Corpus> {
        let cliques = enumerate_cliques(GeometryParams::new(7, 2)?, 7, DEFAULT_VERTEX_BUDGET)?;
        let r3 = dedup(cliques.iter().cloned().chain([pg(3)?, d7()]));
        let mut corpus = Corpus {
            tier,
            r3_cliques: cliques,
            r3,
            r4_bijections: 0,
            r4: Vec::new(),
            r4_non_pg: None,
            r5: Vec::new(),
        };
        if tier < Tier::R4 {
            return Ok(corpus);
        }

        // O = {7..14}, O^c = {0..6}, Z = {7..13}.
        let (o, z) = (range_block(15, 7, 15), range_block(15, 7, 14));
        let pg3 = pg(3)?;
        let hits = delta_search(&pg3, &pg3, &o, &z, DeltaSearchMode::Exhaustive, |_| true)?;
        corpus.r4_bijections = hits.len();
        corpus.r4_non_pg = hits
            .iter()
            .map(|h| &h.design)
            .find(|d| !satisfies_pg_criterion(d).unwrap_or(true))
            .cloned();
        corpus.r4 = dedup(hits.into_iter().map(|h| h.design).chain([pg(4)?]));
        if tier < Tier::R5 {
            return Ok(corpus);
        }

        // O = {15..30}, O^c = {0..14}, Z = {15..29}.
        let (o, z) = (range_block(31, 15, 31), range_block(31, 15, 30));
        let pg4 = pg(4)?;
        let identity: Vec<usize> = (0..15).collect();
        let mut specimens: Vec<(String, Design, Design, Vec<usize>)> =
            vec![("pg4+pg4 identity".into(), pg4.clone(), pg4.clone(), identity.clone())];
        let sampled = delta_search(
            &pg4,
            &pg4,
            &o,
            &z,
            DeltaSearchMode::Sampled {
                seed: R5_DELTA_SEED,
                samples: 2,
            },
            |_| true,
        )?;
        for (i, h) in sampled.into_iter().enumerate() {
            specimens.push((format!("pg4+pg4 sampled #{i}"), pg4.clone(), pg4.clone(), h.delta));
        }
        if let Some(non_pg) = &corpus.r4_non_pg {
            specimens.push((
                "non-pg+pg4 identity".into(),
                non_pg.clone(),
                pg4.clone(),
                identity.clone(),
            ));
            specimens.push(("pg4+non-pg identity".into(), pg4.clone(), non_pg.clone(), identity));
        }
        for (label, d_o, d_z, delta) in specimens {
            let design = sum_construction(&o, &d_o, &z, &d_z, &delta)?;
            let o_index = design.index_of(&o).expect("O is a block of the sum");
            corpus.r5.push(SumSpecimen {
                label,
                design,
                o_index,
                z_is_pg: satisfies_pg_criterion(&d_z)?,
            });
        }
        Ok(corpus)
    }

    fn exhaustive(&self) -> impl Iterator<Item = &Design> {
        self.r3.iter().chain(&self.r4)
    }
}

pub const CRITERIA: [&str; 8] = [
    "criterion-1 pg-constructor",
    "criterion-2 pg-criterion-equivalence",
    "criterion-3 clique-enumeration",
    "criterion-4 decomposition-round-trip",
    "criterion-5 group-construction",
    "criterion-6 main-theorem",
    "criterion-7 negative-path",
    "criterion-8 normality",
];

fn timed(name: &str, start: Instant, failure: Option<String>, note: String) -> Check {
    let note = format!("{note} in {} ms", start.elapsed().as_millis());
    match failure {
        None => Check::pass(name).with_note(note),
        Some(f) => Check::fail(name, format!("{f} ({note})")),
    }
}

fn first_err<T>(items: impl IntoIterator<Item = Result<T, String>>) -> Result<Vec<T>, String> {
    items.into_iter().collect()
}

/// PG designs for r = 3..6 have exactly the class parameters.
pub fn criterion_1() -> Check {
    let start = Instant::now();
    let run = || -> Result<(), String> {
        for r in 3..=6u32 {
            let d = pg(r).map_err(|e| e.to_string())?;
            let rep = validate_symmetric_design(&d).map_err(|e| format!("r = {r}: {e}"))?;
            let want = ((1usize << r) - 1, 1usize << (r - 1), 1usize << (r - 2));
            if (rep.v, rep.block_size, rep.lambda) != want {
                return Err(format!("r = {r}: parameters {rep:?}, expected {want:?}"));
            }
        }
        if start.elapsed() >= Duration::from_secs(1) {
            return Err("took 1 s or more".into());
        }
        Ok(())
    };
    timed(CRITERIA[0], start, run().err(), "r = 3..6".into())
}

fn pg_agreement(d: &Design, reference: &Design, limits: SearchLimits) -> Result<(), String> {
    let criterion = satisfies_pg_criterion(d).map_err(|e| e.to_string())?;
    let witness = is_isomorphic_limited(d, reference, limits).map_err(|e| e.to_string())?;
    if let Some(g) = &witness {
        if g.apply_design(d).ok().as_ref() != Some(reference) {
            return Err(format!("isomorphism witness {g} does not map the design onto pg"));
        }
    }
    if criterion != witness.is_some() {
        return Err(format!(
            "criterion says {criterion} but isomorphism search says {} for {}",
            witness.is_some(),
            crate::io::design_to_json(d)
        ));
    }
    Ok(())
}

/// The PG criterion agrees with isomorphism to `pg(r)` on every corpus design.
pub fn criterion_2(corpus: &Corpus, limits: SearchLimits) -> Check {
    use rayon::prelude::*;
    let start = Instant::now();
    let run = || -> Result<String, String> {
        let mut counts = Vec::new();
        let sets: [(u32, Vec<&Design>); 3] = [
            (3, corpus.r3.iter().collect()),
            (4, corpus.r4.iter().collect()),
            (5, corpus.r5.iter().map(|s| &s.design).collect()),
        ];
        for (r, designs) in sets {
            if designs.is_empty() {
                continue;
            }
            let reference = pg(r).map_err(|e| e.to_string())?;
            designs
                .par_iter()
                .map(|d| pg_agreement(d, &reference, limits))
                .collect::<Result<Vec<()>, String>>()?;
            let pg_count = designs
                .iter()
                .filter(|d| satisfies_pg_criterion(d).unwrap_or(false))
                .count();
            counts.push(format!("r = {r}: {} designs, {pg_count} PG", designs.len()));
        }
        Ok(counts.join("; "))
    };
    match run() {
        Ok(note) => timed(CRITERIA[1], start, None, note),
        Err(e) => timed(CRITERIA[1], start, Some(e), String::new()),
    }
}

/// 30 size-7 cliques at `(7, 2)`, all singular PG-type `(7,4,2)` designs,
/// equal to the maximal cliques, and none of size 8.
pub fn criterion_3() -> Check {
    let start = Instant::now();
    let run = || -> Result<(), String> {
        let params = GeometryParams::new(7, 2).map_err(|e| e.to_string())?;
        let cliques = enumerate_cliques(params, 7, DEFAULT_VERTEX_BUDGET).map_err(|e| e.to_string())?;
        if cliques.len() != 30 {
            return Err(format!("{} cliques of size 7, expected 30", cliques.len()));
        }
        for c in &cliques {
            if !is_singular_subspace(c.blocks(), 2) {
                return Err(format!(
                    "clique {} is not a singular subspace",
                    crate::io::design_to_json(c)
                ));
            }
            let rep = validate_symmetric_design(c).map_err(|e| e.to_string())?;
            if (rep.v, rep.block_size, rep.lambda) != (7, 4, 2) {
                return Err(format!("clique has parameters {rep:?}"));
            }
            if !satisfies_pg_criterion(c).map_err(|e| e.to_string())? {
                return Err("a size-7 clique fails the PG criterion".into());
            }
        }
        let maximal = enumerate_maximal_cliques(params, DEFAULT_VERTEX_BUDGET).map_err(|e| e.to_string())?;
        let big: Vec<&Design> = maximal.iter().filter(|d| d.len() == 7).collect();
        if dedup(big.into_iter().cloned()) != dedup(cliques.iter().cloned()) {
            return Err("size-7 cliques differ from the maximal cliques of size 7".into());
        }
        let eight = enumerate_cliques(params, 8, DEFAULT_VERTEX_BUDGET).map_err(|e| e.to_string())?;
        if !eight.is_empty() {
            return Err(format!("{} cliques of size 8", eight.len()));
        }
        if start.elapsed() >= Duration::from_secs(5) {
            return Err("took 5 s or more".into());
        }
        Ok(())
    };
    timed(CRITERIA[2], start, run().err(), "30 cliques".into())
}

fn round_trip(d: &Design) -> Result<usize, String> {
    let mut count = 0;
    for oi in center_blocks(d) {
        let o = d.blocks()[oi];
        let zs = z_choices(&o);
        let ws = first_err(zs.iter().map(|z| decompose(d, oi, z).map_err(|e| e.to_string())))?;
        for w in &ws {
            let back = w.reassemble().map_err(|e| e.to_string())?;
            if &back != d {
                return Err(format!("Z = {}: sum of the decomposition differs from the design", w.z));
            }
            for (z2, fresh) in zs.iter().zip(&ws) {
                let moved = transfer_delta(w, z2).map_err(|e| e.to_string())?;
                if &moved != fresh {
                    return Err(format!(
                        "transfer from Z = {} to {} differs from decomposition",
                        w.z, z2
                    ));
                }
            }
            count += 1;
        }
    }
    Ok(count)
}

/// Decompose, reassemble and transfer for every center block and every `Z`.
pub fn criterion_4(corpus: &Corpus) -> Check {
    use rayon::prelude::*;
    let start = Instant::now();
    let designs: Vec<&Design> = corpus.exhaustive().chain(corpus.r5.iter().map(|s| &s.design)).collect();
    let res = designs
        .par_iter()
        .map(|d| round_trip(d))
        .collect::<Result<Vec<usize>, String>>();
    match res {
        Ok(counts) => timed(
            CRITERIA[3],
            start,
            None,
            format!(
                "{} designs, {} (O, Z) decompositions",
                designs.len(),
                counts.iter().sum::<usize>()
            ),
        ),
        Err(e) => timed(CRITERIA[3], start, Some(e), String::new()),
    }
}

fn group_checks(label: &str, d: &Design, oi: usize) -> Result<(), String> {
    let ctx = |e: DesignError| format!("{label}: {e}");
    let cert = build_group(d, oi).map_err(ctx)?;
    let rep = verify_certificate(d, &cert);
    if !rep.passed() {
        return Err(format!(
            "{label}: certificate: {}",
            rep.failures().next().expect("a failure")
        ));
    }
    let rep = verify_lemma1(d, &cert);
    if !rep.passed() {
        return Err(format!(
            "{label}: lemma 1: {}",
            rep.failures().next().expect("a failure")
        ));
    }
    extract_involution_chain(d, &cert).map_err(ctx)?;
    let zs = z_choices(&d.blocks()[oi]);
    let (z1, z2) = (&zs[1], &zs[zs.len() - 2]);
    let g1 = group_for_z(d, oi, z1).map_err(ctx)?;
    let g2 = group_for_z(d, oi, z2).map_err(ctx)?;
    if g1 != g2 || g1 != cert.elements {
        return Err(format!("{label}: groups from Z = {z1} and Z = {z2} differ"));
    }
    Ok(())
}

/// Group construction on `D7`, `pg(4)`, `pg(5)` and the PG-type rank-5 sums.
pub fn criterion_5(corpus: &Corpus) -> Check {
    use rayon::prelude::*;
    let start = Instant::now();
    let mut cases: Vec<(String, Design, usize)> = Vec::new();
    let d7 = d7();
    for oi in center_blocks(&d7) {
        cases.push((format!("D7 block {oi}"), d7.clone(), oi));
    }
    if corpus.tier >= Tier::R4 {
        let p = pg(4).expect("pg(4)");
        cases.push(("pg(4) block 0".into(), p.clone(), 0));
        cases.push(("pg(4) block 14".into(), p, 14));
    }
    if corpus.tier >= Tier::R5 {
        let p = pg(5).expect("pg(5)");
        cases.push(("pg(5) block 0".into(), p.clone(), 0));
        cases.push(("pg(5) block 30".into(), p, 30));
        for s in corpus.r5.iter().filter(|s| s.z_is_pg) {
            cases.push((s.label.clone(), s.design.clone(), s.o_index));
        }
    }
    let res = cases
        .par_iter()
        .map(|(label, d, oi)| group_checks(label, d, *oi))
        .collect::<Result<Vec<()>, String>>()
        .and_then(|_| {
            if start.elapsed() >= Duration::from_secs(60) {
                Err("took 1 min or more".into())
            } else {
                Ok(())
            }
        });
    let r5_sums = corpus.r5.iter().filter(|s| s.z_is_pg).count();
    if corpus.tier >= Tier::R5 && r5_sums < 3 {
        return timed(
            CRITERIA[4],
            start,
            Some(format!("only {r5_sums} rank-5 sums with PG-type D_Z")),
            String::new(),
        );
    }
    timed(
        CRITERIA[4],
        start,
        res.err(),
        format!("{} (design, O) cases", cases.len()),
    )
}

fn theorem_case(d: &Design, oi: usize, limits: SearchLimits) -> Result<bool, String> {
    let o = d.blocks()[oi];
    let fixed = o.complement();
    let stab = stabilizer_search(d, &fixed, limits).map_err(|e| e.to_string())?;
    let found = sharply_transitive_abelian_subgroups(&stab, &o);
    let expected =
        is_center_block(d, oi) && check_prop_z(d, oi).map_err(|e| e.to_string())?.verdict == PropZVerdict::AllPg;
    match (expected, found.as_slice()) {
        (false, []) => Ok(false),
        (false, _) => Err(format!("block {o}: {} subgroups found but none expected", found.len())),
        (true, []) => Err(format!("block {o}: no subgroup found")),
        (true, [h]) => {
            let cert = build_group(d, oi).map_err(|e| e.to_string())?;
            if *h != cert.elements {
                return Err(format!("block {o}: subgroup differs from the constructed group"));
            }
            Ok(true)
        }
        (true, _) => Err(format!("block {o}: {} subgroups, expected exactly one", found.len())),
    }
}

/// Exhaustive at ranks 3 and 4: a sharply transitive abelian subgroup of the
/// `O^c`-fixing stabilizer exists iff `O` is a center block with PG-type
/// `D_Z`, and it is then unique and equal to the constructed group.
pub fn criterion_6(corpus: &Corpus, limits: SearchLimits) -> Check {
    use rayon::prelude::*;
    let start = Instant::now();
    let cases: Vec<(&Design, usize)> = corpus
        .exhaustive()
        .flat_map(|d| (0..d.len()).map(move |oi| (d, oi)))
        .collect();
    let res = cases
        .par_iter()
        .map(|&(d, oi)| theorem_case(d, oi, limits))
        .collect::<Result<Vec<bool>, String>>();
    match res {
        Ok(flags) => {
            let positive = flags.iter().filter(|&&b| b).count();
            let note = format!(
                "{} (design, block) cases at ranks {}, {positive} positive",
                cases.len(),
                if corpus.tier >= Tier::R4 { "3 and 4" } else { "3" }
            );
            timed(CRITERIA[5], start, None, note)
        }
        Err(e) => timed(CRITERIA[5], start, Some(e), String::new()),
    }
}

/// A rank-5 sum whose `D_Z` fails the PG criterion has no such subgroup and
/// `build_group` refuses it.
pub fn criterion_7(corpus: &Corpus, deadline: Option<Instant>) -> Check {
    let start = Instant::now();
    if corpus.tier < Tier::R5 {
        return Check::skip(CRITERIA[6], format!("needs tier r5, running {}", corpus.tier));
    }
    let Some(s) = corpus.r5.iter().find(|s| !s.z_is_pg) else {
        return Check::pass(CRITERIA[6]).with_note(format!(
            "vacuous: exhaustive delta search over {} bijections at rank 4 produced no non-PG design",
            corpus.r4_bijections
        ));
    };
    let budget = start + NEGATIVE_PATH_BUDGET;
    let deadline = Some(deadline.map_or(budget, |d| d.min(budget)));
    let run = || -> Result<String, String> {
        let o = s.design.blocks()[s.o_index];
        match build_group(&s.design, s.o_index) {
            Err(DesignError::Domain(_)) => {}
            Err(e) => return Err(format!("build_group failed unexpectedly: {e}")),
            Ok(_) => return Err("build_group constructed a group".into()),
        }
        let stab = stabilizer_search(&s.design, &o.complement(), SearchLimits::with_deadline(deadline))
            .map_err(|e| e.to_string())?;
        let found = sharply_transitive_abelian_subgroups(&stab, &o);
        if !found.is_empty() {
            return Err(format!("{} sharply transitive abelian subgroups found", found.len()));
        }
        Ok(format!(
            "{}: stabilizer of order {}, no sharply transitive abelian subgroup",
            s.label,
            stab.len()
        ))
    };
    match run() {
        Ok(note) => timed(CRITERIA[6], start, None, note),
        Err(e) => timed(CRITERIA[6], start, Some(e), String::new()),
    }
}

/// Conjugation by every `O`-preserving automorphism fixes the constructed
/// group, for every center block with PG-type `D_Z` at ranks 3 and 4.
pub fn criterion_8(corpus: &Corpus, limits: SearchLimits) -> Check {
    use rayon::prelude::*;
    let start = Instant::now();
    let cases: Vec<(&Design, usize)> = corpus
        .exhaustive()
        .flat_map(|d| center_blocks(d).into_iter().map(move |oi| (d, oi)))
        .filter(|&(d, oi)| matches!(check_prop_z(d, oi), Ok(p) if p.verdict == PropZVerdict::AllPg))
        .collect();
    let res = cases
        .par_iter()
        .map(|&(d, oi)| {
            let rep = check_normality(d, oi, limits).map_err(|e| e.to_string())?;
            if !rep.complete {
                return Err(format!(
                    "automorphism search for block {} hit its budget",
                    d.blocks()[oi]
                ));
            }
            if let Some(f) = rep.failures.first() {
                return Err(format!("block {}: conjugation by {f} moves the group", d.blocks()[oi]));
            }
            Ok(rep.checked)
        })
        .collect::<Result<Vec<usize>, String>>();
    match res {
        Ok(checked) => timed(
            CRITERIA[7],
            start,
            None,
            format!(
                "{} (design, O) cases, {} conjugations",
                cases.len(),
                checked.iter().sum::<usize>()
            ),
        ),
        Err(e) => timed(CRITERIA[7], start, Some(e), String::new()),
    }
}

/// Builds the tier's corpus and runs all eight criteria. Searches observe
/// `deadline`; a criterion cut short by it fails with a budget witness.
pub fn run_acceptance_suite_with(tier: Tier, deadline: Option<Instant>) -> Result<RunReport> {
    let limits = SearchLimits::with_deadline(deadline);
    let mut report = RunReport::new(format!("accept {tier}"));
    let corpus = report.time("corpus", || Corpus::build(tier))?;
    let checks = vec![
        report.time("criterion-1", criterion_1),
        report.time("criterion-2", || criterion_2(&corpus, limits)),
        report.time("criterion-3", criterion_3),
        report.time("criterion-4", || criterion_4(&corpus)),
        report.time("criterion-5", || criterion_5(&corpus)),
        report.time("criterion-6", || criterion_6(&corpus, limits)),
        report.time("criterion-7", || criterion_7(&corpus, deadline)),
        report.time("criterion-8", || criterion_8(&corpus, limits)),
    ];
    report.checks.extend(checks);
    Ok(report)
}

pub fn run_acceptance_suite(tier: Tier) -> Result<RunReport> {
    run_acceptance_suite_with(tier, None)
}
