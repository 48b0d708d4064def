//! Verification of the structure forced by an abelian group that fixes
//! `2^(r-1)-1` points and is sharply transitive on the rest.

use serde::{Deserialize, Serialize};

use super::certificate::{verify_certificate, PyramidalCertificate};
use super::construct::{alpha_from_witness, build_group};
use super::group;
use crate::analysis::is_center_block;
use crate::blockset::{Block, Design, Permutation};
use crate::decomposition::{check_prop_z, decompose, PropZVerdict};
use crate::error::{DesignError, Result};
use crate::report::{Check, CheckReport};

/// Checks that the moved set `O` is a center block and that every element
/// either fixes both `B` and `O △ B` or swaps them, for every block `B ≠ O`.
pub fn verify_lemma1(design: &Design, cert: &PyramidalCertificate) -> CheckReport {
    let mut report = CheckReport::new();
    let o = cert.moved();
    let o_index = design.index_of(&o);
    report.push(Check::from_failure(
        "moved-set-is-block",
        o_index.is_none().then(|| format!("{o} is not a block")),
    ));
    let Some(o_index) = o_index else {
        report.push(Check::fail("center-block", "moved set is not a block"));
        report.push(Check::fail("preserve-or-transpose", "moved set is not a block"));
        return report;
    };
    report.push(Check::from_failure(
        "center-block",
        (!is_center_block(design, o_index)).then(|| format!("{o} is not a center block")),
    ));

    let mut bad = None;
    'outer: for g in &cert.elements {
        for b in design.blocks().iter().filter(|&&b| b != o) {
            let partner = b.bits() ^ o.bits();
            let img = g.apply_bits(b.bits());
            let partner_img = g.apply_bits(partner);
            let ok = (img == b.bits() && partner_img == partner) || (img == partner && partner_img == b.bits());
            if !ok {
                bad = Some(format!("{g} neither fixes nor swaps {b} and its partner"));
                break 'outer;
            }
        }
    }
    report.push(Check::from_failure("preserve-or-transpose", bad));
    report
}

/// Involutions `β_0, .., β_(r-2)` generating the group, with the trace
/// chain `Y_1 ⊃ Y_2 ⊃ ..` and the orders of `G_1 ⊃ G_2 ⊃ ..`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvolutionChain {
    pub generators: Vec<Permutation>,
    pub trace_chain: Vec<Block>,
    pub subgroup_sizes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvolutionChainSummary {
    pub generators: Vec<String>,
    pub trace_chain: Vec<Vec<usize>>,
    pub subgroup_sizes: Vec<usize>,
}

impl InvolutionChain {
    pub fn summary(&self) -> InvolutionChainSummary {
        InvolutionChainSummary {
            generators: self.generators.iter().map(|g| g.to_string()).collect(),
            trace_chain: self.trace_chain.iter().map(|b| b.to_vec()).collect(),
            subgroup_sizes: self.subgroup_sizes.clone(),
        }
    }
}

/// The traces `B ∩ O` of blocks `B ≠ O`, sorted and deduplicated.
pub fn trace_family(design: &Design, o: &Block) -> Vec<u64> {
    let mut traces: Vec<u64> = design
        .blocks()
        .iter()
        .filter(|&b| b != o)
        .map(|b| b.bits() & o.bits())
        .collect();
    traces.sort_unstable();
    traces.dedup();
    traces
}

fn stall(msg: String) -> DesignError {
    DesignError::InvariantViolation(format!("involution chain stalled: {msg}"))
}

/// Runs the recursive construction of generating involutions.
///
/// At level `l` the current trace `Y_l` (starting from `Y_0 = O`) is split by
/// a trace `Y ∈ 𝒪` meeting it in a nonempty proper subset `S`. An involution
/// `β_l ∈ G_l` is taken among the elements moving `S` off itself, or failing
/// that as `γ_i γ_j^-1` for two such elements with equal squares. Then
/// `Y_(l+1) = Y_l ∩ Y'` for a trace `Y'` swapped with its complement by
/// `β_l`, and `G_(l+1)` is the part of `G_l` preserving `Y_(l+1)`.
pub fn extract_involution_chain(design: &Design, cert: &PyramidalCertificate) -> Result<InvolutionChain> {
    let o = cert.moved();
    let size = o.len();
    if !size.is_power_of_two() || size < 2 {
        return Err(DesignError::Argument(format!(
            "moved set {o} does not have power-of-two size"
        )));
    }
    let depth = size.trailing_zeros() as usize;
    let traces = trace_family(design, &o);
    if traces.iter().any(|t| t.count_ones() as usize * 2 != size) {
        return Err(stall(format!("some block meets {o} in other than {} points", size / 2)));
    }

    let mut g_cur = group::canonical(&cert.elements);
    let mut y_cur = o.bits();
    let mut generators = Vec::new();
    let mut trace_chain = Vec::new();
    let mut subgroup_sizes = Vec::new();

    for level in 0..depth {
        let y = traces
            .iter()
            .copied()
            .find(|&t| t & y_cur != 0 && y_cur & !t != 0)
            .ok_or_else(|| stall(format!("no trace splits Y_{level}")))?;
        let split = y & y_cur;
        let base = split.trailing_zeros() as usize;
        let gammas: Vec<&Permutation> = g_cur.iter().filter(|g| split >> g.apply(base) & 1 == 0).collect();
        let beta = match gammas.iter().find(|g| g.is_involution()) {
            Some(g) => (*g).clone(),
            None => {
                let squares: Vec<Permutation> = gammas.iter().map(|g| g.then(g)).collect();
                let mut found = None;
                'pairs: for i in 0..gammas.len() {
                    for j in 0..gammas.len() {
                        if i != j && squares[i] == squares[j] {
                            found = Some(gammas[i].then(&gammas[j].inverse()));
                            break 'pairs;
                        }
                    }
                }
                found.ok_or_else(|| stall(format!("no involution in G_{level}")))?
            }
        };
        if !beta.is_involution() || !group::contains(&g_cur, &beta) {
            return Err(stall(format!("{beta} is not an involution of G_{level}")));
        }

        let transposed = traces
            .iter()
            .copied()
            .find(|&t| beta.apply_bits(t) == o.bits() & !t)
            .ok_or_else(|| stall(format!("{beta} swaps no trace with its complement")))?;
        let y_next = y_cur & transposed;
        if y_next.count_ones() * 2 != y_cur.count_ones() {
            return Err(stall(format!(
                "Y_{} would have {} points",
                level + 1,
                y_next.count_ones()
            )));
        }
        let g_next: Vec<Permutation> = g_cur
            .iter()
            .filter(|g| g.apply_bits(y_next) == y_next)
            .cloned()
            .collect();
        if g_next.len() * 2 != g_cur.len() {
            return Err(stall(format!("G_{} has {} elements", level + 1, g_next.len())));
        }
        let mut gens = g_next.clone();
        gens.push(beta.clone());
        if group::generate(design.v(), &gens) != g_cur {
            return Err(stall(format!(
                "G_{level} is not generated by G_{} and {beta}",
                level + 1
            )));
        }

        generators.push(beta);
        trace_chain.push(Block::from_raw(o.v(), y_next));
        subgroup_sizes.push(g_next.len());
        g_cur = g_next;
        y_cur = y_next;
    }

    for i in 0..generators.len() {
        let rest = group::generate(design.v(), &generators[i + 1..]);
        if group::contains(&rest, &generators[i]) {
            return Err(stall(format!("beta_{i} lies in the group of later generators")));
        }
    }
    if group::generate(design.v(), &generators) != group::canonical(&cert.elements) {
        return Err(stall("generators do not generate the certificate group".into()));
    }
    Ok(InvolutionChain {
        generators,
        trace_chain,
        subgroup_sizes,
    })
}

/// Checks the three conclusions for a verified certificate: the moved set is
/// a center block, every `D_Z` is of PG type, and the group equals the one
/// built from the `α_p`. Also checks that the element swapping `p` and `p'`
/// is `α_p` for every `p ∈ Z`.
pub fn verify_theorem(design: &Design, cert: &PyramidalCertificate) -> CheckReport {
    let mut report = CheckReport::new();
    let pre = verify_certificate(design, cert);
    report.push(Check::from_failure(
        "certificate",
        (!pre.passed()).then(|| pre.failures().map(|c| c.to_string()).collect::<Vec<_>>().join("; ")),
    ));
    if !pre.passed() {
        return report;
    }

    let lemma1 = verify_lemma1(design, cert);
    let lemma1_ok = lemma1.passed();
    report.extend("lemma1/", lemma1);
    if !lemma1_ok {
        return report;
    }
    let o = cert.moved();
    let o_index = design.index_of(&o).expect("lemma 1 passed");

    report.push(Check::from_failure(
        "lemma2/involution-chain",
        extract_involution_chain(design, cert).err().map(|e| e.to_string()),
    ));

    let prop = check_prop_z(design, o_index);
    report.push(Check::from_failure(
        "sum-with-pg",
        match &prop {
            Ok(p) if p.verdict == PropZVerdict::AllPg => None,
            Ok(p) => Some(format!("D_Z verdict is {}", p.verdict)),
            Err(e) => Some(e.to_string()),
        },
    ));

    report.push(Check::from_failure(
        "group-equals-constructed",
        match build_group(design, o_index) {
            Ok(built) if built.elements == group::canonical(&cert.elements) => None,
            Ok(_) => Some("certificate group differs from the constructed group".into()),
            Err(e) => Some(e.to_string()),
        },
    ));

    let last = 63 - o.bits().leading_zeros() as usize;
    let z = Block::from_raw(o.v(), o.bits() & !(1 << last));
    let epsilon = decompose(design, o_index, &z).and_then(|w| {
        for p in z.iter() {
            let alpha = alpha_from_witness(design, &w, p)?;
            let eps = cert
                .element_mapping(p, w.p_prime)
                .ok_or_else(|| DesignError::InvariantViolation(format!("no element sends {p} to {}", w.p_prime)))?;
            if *eps != alpha {
                return Err(DesignError::InvariantViolation(format!(
                    "element {eps} swapping {p} and {} differs from alpha = {alpha}",
                    w.p_prime
                )));
            }
        }
        Ok(())
    });
    report.push(Check::from_failure(
        "epsilon-equals-alpha",
        epsilon.err().map(|e| e.to_string()),
    ));
    report
}
