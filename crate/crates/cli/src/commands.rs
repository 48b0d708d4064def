use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use serde_json::json;

use pyradesign_core::acceptance::run_acceptance_suite_with;
use pyradesign_core::analysis::{center_blocks, DesignAnalysis};
use pyradesign_core::blockset::{validate_symmetric_design, Block, Design, SearchLimits};
use pyradesign_core::catalog::Catalog as DiskCatalog;
use pyradesign_core::decomposition::{decompose, delta_search, DeltaSearchMode};
use pyradesign_core::geometry::{
    enumerate_cliques, enumerate_maximal_cliques, pg_hyperplane_complement_design, GeometryParams,
};
use pyradesign_core::io;
use pyradesign_core::pyramidal::{
    build_group, extract_involution_chain, sharply_transitive_abelian_subgroups, stabilizer_search, verify_certificate,
    verify_lemma1, verify_theorem,
};
use pyradesign_core::report::{Check, RunReport};

use crate::{Analyze, Catalog, Cli, Command, Construct, DeltaSearch, Group, Search, Stabilizer, SumFilter, Theorem};

fn load(report: &mut RunReport, path: &Path) -> Result<Design> {
    report.add_input(path).with_context(|| path.display().to_string())?;
    Ok(io::load_design(path)?)
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, format!("{text}\n")).with_context(|| p.display().to_string()),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn validity_check(d: &Design) -> Check {
    match validate_symmetric_design(d) {
        Ok(r) => Check::pass("symmetric-design").with_note(format!("({}, {}, {})", r.v, r.block_size, r.lambda)),
        Err(e) => Check::fail("symmetric-design", e.to_string()),
    }
}

fn point_block(v: usize, points: &[usize], what: &str) -> Result<Block> {
    Block::from_points(v, points.iter().copied()).with_context(|| format!("--{what}"))
}

pub fn run(cli: &Cli) -> Result<RunReport> {
    let deadline = cli.budget_seconds.map(|s| Instant::now() + Duration::from_secs(s));
    let limits = SearchLimits::with_deadline(deadline);
    let argv: Vec<String> = std::env::args().collect();
    let mut report = RunReport::new(argv.join(" "));

    match &cli.command {
        Command::Construct(Construct::Pg { rank, out }) => {
            let d = report.time("construct", || pg_hyperplane_complement_design(*rank))?;
            report.checks.push(validity_check(&d));
            emit(out.as_deref(), &io::design_to_json(&d))?;
        }
        Command::Construct(Construct::Sum { witness, out }) | Command::Sum { witness, out } => {
            report.add_input(witness)?;
            let w = io::load_witness(witness)?;
            match report.time("construct", || w.reassemble()) {
                Ok(d) => {
                    report.checks.push(validity_check(&d));
                    emit(out.as_deref(), &io::design_to_json(&d))?;
                }
                Err(e) => report.checks.push(Check::fail("sum-construction", e.to_string())),
            }
        }
        Command::Verify { design } => {
            let d = load(&mut report, design)?;
            let check = report.time("validate", || validity_check(&d));
            report.checks.push(check);
        }
        Command::Analyze(args) => analyze(&mut report, args)?,
        Command::Decompose(args) => {
            let d = load(&mut report, &args.design)?;
            let o = *d.blocks().get(args.block).context("--block out of range")?;
            let z = match &args.z {
                Some(z) => point_block(d.v(), z, "z")?,
                None => Block::from_bits(d.v(), o.bits() & !(1 << (63 - o.bits().leading_zeros())))?,
            };
            match report.time("decompose", || decompose(&d, args.block, &z)) {
                Ok(w) => {
                    let back = w.reassemble().map(|b| b == d);
                    report.checks.push(Check::from_failure(
                        "round-trip",
                        match back {
                            Ok(true) => None,
                            Ok(false) => Some("reassembled design differs".into()),
                            Err(e) => Some(e.to_string()),
                        },
                    ));
                    emit(args.out.as_deref(), &io::witness_to_json(&w))?;
                }
                Err(e) => report.checks.push(Check::fail("decompose", e.to_string())),
            }
        }
        Command::DeltaSearch(args) => delta(&mut report, args)?,
        Command::Search(Search::Cliques {
            n,
            m,
            size,
            budget,
            out,
        }) => {
            let params = GeometryParams::new(*n, *m)?;
            let found = report.time("search", || match size {
                Some(k) => enumerate_cliques(params, *k, *budget),
                None => enumerate_maximal_cliques(params, *budget),
            })?;
            report
                .checks
                .push(Check::pass("cliques").with_note(format!("{} found", found.len())));
            emit(out.as_deref(), &io::designs_to_json(&found))?;
        }
        Command::Group(Group::Build { design, block, out }) => {
            let d = load(&mut report, design)?;
            match report.time("build", || build_group(&d, *block)) {
                Ok(cert) => {
                    report.extend_checks("certificate/", verify_certificate(&d, &cert));
                    emit(out.as_deref(), &io::certificate_to_json(&cert))?;
                }
                Err(e) => report.checks.push(Check::fail("build-group", e.to_string())),
            }
        }
        Command::Group(Group::Verify { design, certificate }) => {
            let d = load(&mut report, design)?;
            report.add_input(certificate)?;
            let cert = io::load_certificate(certificate)?;
            let checks = report.time("verify", || verify_certificate(&d, &cert));
            report.extend_checks("certificate/", checks);
            report.extend_checks("lemma1/", verify_lemma1(&d, &cert));
        }
        Command::Stabilizer(Stabilizer { design, fixed, out }) => {
            let d = load(&mut report, design)?;
            let fixed = point_block(d.v(), fixed, "fixed")?;
            let group = report.time("search", || stabilizer_search(&d, &fixed, limits))?;
            let moved = fixed.complement();
            let sharp = sharply_transitive_abelian_subgroups(&group, &moved);
            report.checks.push(Check::pass("stabilizer").with_note(format!(
                "order {}, {} sharply transitive abelian subgroups on {moved}",
                group.len(),
                sharp.len()
            )));
            emit(out.as_deref(), &io::group_to_json(d.v(), &group))?;
        }
        Command::Theorem(Theorem::Verify { design, certificate }) => {
            let d = load(&mut report, design)?;
            report.add_input(certificate)?;
            let cert = io::load_certificate(certificate)?;
            let checks = report.time("verify", || verify_theorem(&d, &cert));
            report.add_checks(checks);
            if let Ok(chain) = extract_involution_chain(&d, &cert) {
                println!("{}", serde_json::to_string(&chain.summary())?);
            }
        }
        Command::Accept { tier } => {
            report = run_acceptance_suite_with(*tier, deadline)?;
            report.command = argv.join(" ");
        }
        Command::Catalog(Catalog::Add { dir, design, tags }) => {
            let d = load(&mut report, design)?;
            let entry = DiskCatalog::open(dir)?.add(&d, tags, &argv.join(" "))?;
            report
                .checks
                .push(Check::pass("catalog-add").with_note(entry.id.clone()));
            println!("{}", serde_json::to_string(&entry)?);
        }
        Command::Catalog(Catalog::List { dir }) => {
            for e in DiskCatalog::open(dir)?.list()? {
                let tags: Vec<&str> = e.tags.iter().map(String::as_str).collect();
                println!("{} {:?} [{}]", e.id, e.parameters, tags.join(","));
            }
        }
    }
    Ok(report)
}

fn analyze(report: &mut RunReport, args: &Analyze) -> Result<()> {
    let d = load(report, &args.design)?;
    let mut out = serde_json::Map::new();
    match validate_symmetric_design(&d) {
        Ok(r) => {
            out.insert("parameters".into(), json!([r.v, r.block_size, r.lambda]));
            report.checks.push(validity_check(&d));
        }
        Err(e) => {
            report.checks.push(Check::fail("symmetric-design", e.to_string()));
            emit(args.out.as_deref(), &serde_json::Value::Object(out).to_string())?;
            return Ok(());
        }
    }
    if args.center_blocks {
        let cb: Vec<Vec<usize>> = center_blocks(&d).iter().map(|&i| d.blocks()[i].to_vec()).collect();
        out.insert("centerBlocks".into(), json!(cb));
    }
    if args.pg_criterion || args.lines {
        match DesignAnalysis::new(&d) {
            Ok(a) => {
                if args.pg_criterion {
                    out.insert("pgCriterion".into(), json!(a.satisfies_pg_criterion()));
                    out.insert("centerPoints".into(), json!(a.center_points()));
                }
                if args.lines {
                    let lines: Vec<[usize; 3]> = a.lines().iter().map(|l| l.sorted()).collect();
                    out.insert("lines".into(), json!(lines));
                }
            }
            Err(e) => report.checks.push(Check::fail("pg-family", e.to_string())),
        }
    }
    emit(args.out.as_deref(), &serde_json::Value::Object(out).to_string())
}

fn delta(report: &mut RunReport, args: &DeltaSearch) -> Result<()> {
    let d_o = load(report, &args.design_o)?;
    let d_z = load(report, &args.design_z)?;
    if d_o.v() != d_z.v() {
        bail!("component designs have {} and {} points", d_o.v(), d_z.v());
    }
    let n = d_o.v();
    let v = 2 * n + 1;
    let o = Block::from_points(v, n..v)?;
    let z = Block::from_points(v, n..v - 1)?;
    let mode = match args.samples {
        Some(samples) => DeltaSearchMode::Sampled {
            seed: args.seed,
            samples,
        },
        None => DeltaSearchMode::Exhaustive,
    };
    let filter = args.filter;
    let hits = report.time("search", || {
        delta_search(&d_o, &d_z, &o, &z, mode, |d| {
            let pg = DesignAnalysis::new(d)
                .map(|a| a.satisfies_pg_criterion())
                .unwrap_or(false);
            match filter {
                SumFilter::All => true,
                SumFilter::Pg => pg,
                SumFilter::NonPg => !pg,
            }
        })
    })?;
    report
        .checks
        .push(Check::pass("delta-search").with_note(format!("{} matching sums, O = {o}, Z = {z}", hits.len())));
    let designs: Vec<Design> = hits.into_iter().map(|h| h.design).collect();
    emit(args.out.as_deref(), &io::designs_to_json(&designs))
}
