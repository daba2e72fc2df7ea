//! Acceptance suite. Runs every criterion, prints one `[PASS]`/`[FAIL]` line
//! each, and exits nonzero if any failed. Counterexamples are written under
//! `$CARGO_TARGET_TMPDIR/acceptance-counterexamples/`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use srgpa::instances::{random_instance, Instance, InstanceParams};
use srgpa::io::{write_mask_2d, write_mask_3d, write_seeds, PgmEncoding};
use srgpa::order::{random_orders, XorShift64Star};
use srgpa::*;

const PLANAR: usize = 200;
const VOLUMETRIC: usize = 20;
const PERMUTATIONS: usize = 10;
const BUDGET: Duration = Duration::from_secs(60);

type Criterion<'a> = (u32, &'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { pass: true, detail: detail.into() }
}

fn verdict(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass: ok, detail: detail.into() }
}

fn instances() -> Vec<Instance> {
    let mut rng = XorShift64Star::new(0x5eed2d);
    let mut all: Vec<Instance> = (0..PLANAR)
        .map(|k| {
            let conn = if k % 2 == 0 { Connectivity::Four } else { Connectivity::Eight };
            random_instance(&InstanceParams::planar(64, conn), &mut rng)
        })
        .collect();
    let mut rng = XorShift64Star::new(0x5eed3d);
    all.extend((0..VOLUMETRIC).map(|k| {
        let conn = if k % 2 == 0 { Connectivity::Six } else { Connectivity::TwentySix };
        random_instance(&InstanceParams::volumetric(16, conn), &mut rng)
    }));
    all
}

fn small_instances() -> Vec<Instance> {
    let mut rng = XorShift64Star::new(0x5eed16);
    (0..60)
        .map(|k| {
            let conn = if k % 2 == 0 { Connectivity::Four } else { Connectivity::Eight };
            random_instance(&InstanceParams::planar(16, conn), &mut rng)
        })
        .collect()
}

fn orders_for(index: usize, seeds: usize) -> Vec<Vec<usize>> {
    random_orders(seeds, PERMUTATIONS, 0xC0FFEE ^ index as u64)
}

fn archive_root() -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance-counterexamples")
}

/// Writes mask, seeds and a note into `criterion_<c>/instance_<k>/`.
fn archive(criterion: u32, index: usize, inst: &Instance, note: &str) {
    let dir = archive_root().join(format!("criterion_{criterion}")).join(format!("instance_{index:03}"));
    fs::create_dir_all(&dir).expect("archive dir");
    if inst.domain.dim() == 2 {
        fs::write(dir.join("mask.pgm"), write_mask_2d(&inst.domain, PgmEncoding::Plain).unwrap()).unwrap();
    } else {
        let (head, body) = write_mask_3d(&inst.domain).unwrap();
        fs::write(dir.join("mask.json"), head).unwrap();
        fs::write(dir.join("mask.raw"), body).unwrap();
    }
    fs::write(dir.join("seeds.json"), write_seeds(&inst.seeds).unwrap()).unwrap();
    let note = format!("neighborhood {}\n{note}\n", inst.neighborhood.len());
    fs::write(dir.join("note.txt"), note).unwrap();
}

fn describe(points: &PointSet) -> String {
    let shown: Vec<String> = points.iter().take(6).map(|p| p.to_string()).collect();
    let more = if points.len() > 6 { " ..." } else { "" };
    format!("{}{more}", shown.join(" "))
}

/// Canonical ambiguous-mode maps must agree across permutations.
fn criterion_1(all: &[Instance]) -> Outcome {
    let start = Instant::now();
    let failures: Vec<(usize, String)> = all
        .par_iter()
        .enumerate()
        .filter_map(|(k, inst)| {
            let grower = Grower::new(Mode::Ambiguous);
            let orders = orders_for(k, inst.seeds.len());
            let maps: Vec<_> = orders
                .iter()
                .map(|o| canonical_relabel(&grower.run_with_order(&inst.domain, &inst.seeds, &inst.neighborhood, o).unwrap()))
                .collect();
            orders.iter().zip(&maps).skip(1).find_map(|(o, m)| {
                let d = maps[0].diff(m);
                (!d.is_empty()).then(|| {
                    (k, format!("orders {:?} vs {:?}: {} points differ: {}", orders[0], o, d.len(), describe(&d)))
                })
            })
        })
        .collect();
    let elapsed = start.elapsed();
    for (k, note) in &failures {
        archive(1, *k, &all[*k], note);
    }
    let seeds: Vec<usize> = failures.iter().map(|(k, _)| all[*k].seeds.len()).collect();
    verdict(
        failures.is_empty() && elapsed < BUDGET,
        format!(
            "{} instances x {PERMUTATIONS} orders, {} not invariant (seed counts {:?}), {:.1}s",
            all.len(),
            failures.len(),
            seeds,
            elapsed.as_secs_f64()
        ),
    )
}

/// The ambiguous-mode boundary must equal the ambiguous set.
fn criterion_2(all: &[Instance]) -> Outcome {
    let results: Vec<(usize, PointSet, PointSet, bool)> = all
        .par_iter()
        .enumerate()
        .filter_map(|(k, inst)| {
            let amb = ambiguous_set(&inst.domain, &inst.seeds, &inst.neighborhood).unwrap();
            let grower = Grower::new(Mode::Ambiguous);
            orders_for(k, inst.seeds.len()).iter().find_map(|o| {
                let r = grower.run_with_order(&inst.domain, &inst.seeds, &inst.neighborhood, o).unwrap();
                let b = r.boundary_points();
                (b != amb).then(|| {
                    let missing: PointSet = amb.difference(&b).cloned().collect();
                    let extra: PointSet = b.difference(&amb).cloned().collect();
                    (k, missing, extra, b.is_subset(&amb))
                })
            })
        })
        .collect();
    for (k, missing, extra, _) in &results {
        let note = format!("in A but not boundary: {}\nboundary but not in A: {}", describe(missing), describe(extra));
        archive(2, *k, &all[*k], &note);
    }
    let subset = results.iter().filter(|r| r.3).count();
    verdict(
        results.is_empty(),
        format!(
            "{} of {} instances with boundary != A ({} of them with boundary a strict subset of A)",
            results.len(),
            all.len(),
            subset
        ),
    )
}

/// Simple-mode regions partition the reachable set.
fn criterion_3(all: &[Instance]) -> Outcome {
    let bad: Vec<usize> = all
        .par_iter()
        .enumerate()
        .filter_map(|(k, inst)| {
            let r = grow_simple(&inst.domain, &inst.seeds, &inst.neighborhood).unwrap();
            let universe = reachable(&inst.domain, &inst.seeds.all_points(), &inst.neighborhood).unwrap();
            (!is_simple_partition(&r.seed_regions(), &universe).verdict()).then_some(k)
        })
        .collect();
    verdict(bad.is_empty(), format!("{} of {} instances violate the axioms {bad:?}", bad.len(), all.len()))
}

/// V-boundary output is a V-boundary partition of the reachable set.
fn criterion_4(all: &[Instance]) -> Outcome {
    let eligible: Vec<usize> = (0..all.len())
        .filter(|&k| all[k].seeds.check_separated(&all[k].domain, &all[k].neighborhood).is_ok())
        .collect();
    let bad: Vec<(usize, String)> = eligible
        .par_iter()
        .filter_map(|&k| {
            let inst = &all[k];
            let r = grow_vboundary(&inst.domain, &inst.seeds, &inst.neighborhood).unwrap();
            let universe = reachable(&inst.domain, &inst.seeds.all_points(), &inst.neighborhood).unwrap();
            let report = is_v_boundary_partition(&r.seed_regions(), &r.boundary_points(), &inst.neighborhood, &universe);
            (!report.verdict()).then(|| (k, report.to_string()))
        })
        .collect();
    let mut axioms = std::collections::BTreeMap::new();
    for (k, report) in &bad {
        archive(4, *k, &all[*k], report);
        for line in report.lines().skip(1) {
            let name = line.trim().split([' ', ':']).next().unwrap_or("").to_string();
            *axioms.entry(name).or_insert(0usize) += 1;
        }
    }
    verdict(
        bad.is_empty(),
        format!(
            "{} of {} separated-seed instances violate the axioms; violations by axiom {:?}",
            bad.len(),
            eligible.len(),
            axioms
        ),
    )
}

fn pts(list: &[&[i64]]) -> PointSet {
    list.iter().map(|p| Point::new(p.to_vec())).collect()
}

fn seeds(list: &[(&str, &[i64])]) -> SeedList {
    SeedList::new(list.iter().map(|(id, p)| Seed::new(*id, vec![Point::new(p.to_vec())])).collect()).unwrap()
}

fn seven_line() -> (GridDomain, SeedList, Neighborhood) {
    (GridDomain::full(vec![7]).unwrap(), seeds(&[("a", &[0]), ("b", &[6])]), Neighborhood::line())
}

fn six_line() -> (GridDomain, SeedList, Neighborhood) {
    (GridDomain::full(vec![6]).unwrap(), seeds(&[("a", &[0]), ("b", &[5])]), Neighborhood::line())
}

fn corners() -> (GridDomain, SeedList, Neighborhood) {
    (
        GridDomain::full(vec![3, 3]).unwrap(),
        seeds(&[("nw", &[0, 0]), ("se", &[2, 2])]),
        Neighborhood::standard(2, Connectivity::Four).unwrap(),
    )
}

/// Simple mode depends on the initialisation order.
fn criterion_5() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for (name, (d, s, v)) in [("7-line", seven_line()), ("3x3 corners", corners())] {
        let ab = canonical_relabel(&run_with_order(Mode::Simple, &d, &s, &v, &[0, 1]).unwrap());
        let ba = canonical_relabel(&run_with_order(Mode::Simple, &d, &s, &v, &[1, 0]).unwrap());
        let diff = ab.diff(&ba);
        ok &= !diff.is_empty();
        details.push(format!("{name}: {} points flip ({})", diff.len(), describe(&diff)));
    }
    verdict(ok, details.join("; "))
}

fn criterion_6(all: &[Instance]) -> Outcome {
    let bad: Vec<usize> = all
        .par_iter()
        .enumerate()
        .filter_map(|(k, inst)| (!decomposition_check(&inst.domain, &inst.seeds, &inst.neighborhood).unwrap()).then_some(k))
        .collect();
    verdict(bad.is_empty(), format!("{} of {} instances fail {bad:?}", bad.len(), all.len()))
}

/// Incremental zones of influence match the recomputed ones after every
/// growth, in all three modes.
fn criterion_7() -> Outcome {
    let small = small_instances();
    let mut runs = 0;
    let mut errors = Vec::new();
    for (k, inst) in small.iter().enumerate() {
        for mode in [Mode::Simple, Mode::VBoundary, Mode::Ambiguous] {
            if mode == Mode::VBoundary && inst.seeds.check_separated(&inst.domain, &inst.neighborhood).is_err() {
                continue;
            }
            runs += 1;
            if let Err(e) = Grower::new(mode).check_zi(true).run(&inst.domain, &inst.seeds, &inst.neighborhood) {
                errors.push(format!("instance {k} {mode}: {e}"));
            }
        }
    }
    verdict(errors.is_empty(), format!("{runs} checked runs on {} instances, {} mismatches {errors:?}", small.len(), errors.len()))
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    for order in [[0, 1], [1, 0]] {
        let (d, s, v) = seven_line();
        let r = run_with_order(Mode::Ambiguous, &d, &s, &v, &order).unwrap();
        if r.boundary_points() != pts(&[&[3]]) || r.region_of_seed("a") != pts(&[&[0], &[1], &[2]]) {
            failures.push(format!("7-line order {order:?}"));
        }
        let (d, s, v) = six_line();
        let r = run_with_order(Mode::Ambiguous, &d, &s, &v, &order).unwrap();
        if !r.boundary_points().is_empty() || r.region_of_seed("b") != pts(&[&[3], &[4], &[5]]) {
            failures.push(format!("6-line order {order:?}"));
        }
        let (d, s, v) = corners();
        let r = run_with_order(Mode::Ambiguous, &d, &s, &v, &order).unwrap();
        if r.boundary_points() != pts(&[&[0, 2], &[1, 1], &[2, 0]]) {
            failures.push(format!("3x3 corners order {order:?}"));
        }
    }
    if failures.is_empty() {
        pass("7-line boundary {3}, 6-line no boundary, 3x3 anti-diagonal, both orders")
    } else {
        verdict(false, format!("mismatch: {failures:?}"))
    }
}

/// Repeated CLI runs write identical bytes.
fn criterion_9() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let root = dir.path();
    let mut rng = XorShift64Star::new(9);
    let inst = random_instance(&InstanceParams::planar(24, Connectivity::Eight), &mut rng);
    fs::write(root.join("mask.pgm"), write_mask_2d(&inst.domain, PgmEncoding::Raw).unwrap()).unwrap();
    fs::write(root.join("seeds.json"), write_seeds(&inst.seeds).unwrap()).unwrap();
    let run = |tag: &str, mode: &str, extra: &[&str]| -> Vec<(String, Vec<u8>)> {
        let out = root.join(format!("{tag}.json"));
        let frames = root.join(format!("{tag}-frames"));
        let status = Command::new(env!("CARGO_BIN_EXE_srgpa"))
            .args(["segment", "--mode", mode, "--neighborhood", "8", "--trace-every", "3"])
            .arg("--image")
            .arg(root.join("mask.pgm"))
            .arg("--seeds")
            .arg(root.join("seeds.json"))
            .arg("--trace")
            .arg(&frames)
            .arg("-o")
            .arg(&out)
            .args(extra)
            .output()
            .unwrap();
        assert!(status.status.success(), "segment failed");
        let mut files = vec![("labels".to_string(), fs::read(&out).unwrap())];
        let mut names: Vec<_> = fs::read_dir(&frames).unwrap().map(|e| e.unwrap().path()).collect();
        names.sort();
        files.extend(names.iter().map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(p).unwrap())));
        files
    };
    let mut checked = Vec::new();
    let mut ok = true;
    for (mode, extra) in [("ambiguous", &[][..]), ("simple", &["--shuffle", "42"][..]), ("ambiguous", &["--shuffle", "7"][..])] {
        let first = run("first", mode, extra);
        let second = run("second", mode, extra);
        ok &= first == second;
        checked.push(format!("{mode} {} files", first.len()));
        for tag in ["first", "second"] {
            fs::remove_dir_all(root.join(format!("{tag}-frames"))).unwrap();
        }
    }
    verdict(ok, format!("byte-identical label files and frames across repeated runs ({})", checked.join(", ")))
}

fn main() {
    let _ = fs::remove_dir_all(archive_root());
    let all = instances();
    let criteria: Vec<Criterion<'_>> = vec![
        (1, "order invariance of the ambiguous-point growth", Box::new(|| criterion_1(&all))),
        (2, "ambiguous-point boundary equals the ambiguous set", Box::new(|| criterion_2(&all))),
        (3, "simple growth partitions the reachable set", Box::new(|| criterion_3(&all))),
        (4, "V-boundary growth satisfies the V-boundary axioms", Box::new(|| criterion_4(&all))),
        (5, "simple growth depends on seed order", Box::new(criterion_5)),
        (6, "zones and ambiguous set decompose the reachable set", Box::new(|| criterion_6(&all))),
        (7, "incremental zones of influence match recomputation", Box::new(criterion_7)),
        (8, "golden fixtures", Box::new(criterion_8)),
        (9, "CLI output is byte-deterministic", Box::new(criterion_9)),
    ];
    let mut failed = Vec::new();
    for (n, name, check) in &criteria {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| verdict(false, "panicked"));
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {n}: {name}: {}", outcome.detail);
        if !outcome.pass {
            failed.push(*n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
    } else {
        println!(
            "acceptance: {} of {} criteria failed {failed:?}; counterexamples in {}",
            failed.len(),
            criteria.len(),
            archive_root().display()
        );
        std::process::exit(1);
    }
}
