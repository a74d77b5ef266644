//! Acceptance checks. Each test prints one verdict line of the form
//! `[PASS] criterion N: ... (elapsed)` before asserting.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use parkscope::equivalence::{generate, monodromy_equivalent, park_isomorphic, EnumerationLimits};
use parkscope::extraction::monodromy_to_park;
use parkscope::hurwitz::{interleaving_factor, park_hurwitz, single_hurwitz, single_hurwitz_naive};
use parkscope::monodromy::{genus_from_critical_points, MonodromyRep};
use parkscope::park::{Clause, EdgeKind, GardenKind, Park, Role};
use parkscope::permgroup::{orbits, Permutation};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

const HURWITZ_BUDGET: Duration = Duration::from_secs(10);
const SWEEP_BUDGET: Duration = Duration::from_secs(300);
const EXTRACTION_BUDGET: Duration = Duration::from_secs(1);
const CONJUGATE_PAIRS: usize = 1000;

fn fixture_path(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name].iter().collect()
}

fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

fn park(name: &str) -> Park {
    Park::from_json(&fixture(name)).unwrap()
}

fn monodromy(name: &str) -> MonodromyRep {
    MonodromyRep::from_json(&fixture(name)).unwrap()
}

fn report(n: usize, ok: bool, what: &str, elapsed: Duration) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {n}: {what} ({:.3}s)", elapsed.as_secs_f64());
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Every generated representation with `2d <= 8` and `t + s <= 5`.
fn sweep() -> Vec<MonodromyRep> {
    let limits = EnumerationLimits::default();
    let mut out = Vec::new();
    for d in 1..=4 {
        for t in 0..=5 {
            for s in 0..=5 - t {
                out.extend(generate(d, t, s, &limits).unwrap());
            }
        }
    }
    out
}

#[test]
fn criterion_1_single_hurwitz_values() {
    let cases: [(usize, &[usize], BigRational); 6] = [
        (0, &[1], q(1, 1)),
        (0, &[2], q(1, 2)),
        (0, &[1, 1], q(1, 2)),
        (0, &[3], q(1, 1)),
        (0, &[4], q(4, 1)),
        (1, &[1], q(0, 1)),
    ];
    let start = Instant::now();
    let mut failures = Vec::new();
    for (g, degrees, expected) in &cases {
        let t = Instant::now();
        let value = single_hurwitz(*g, degrees).unwrap();
        let elapsed = t.elapsed();
        let naive = single_hurwitz_naive(*g, degrees).unwrap();
        let mut agree = value == *expected && naive == *expected && elapsed < HURWITZ_BUDGET;
        if *g == 0 && degrees.len() == 1 {
            let d = degrees[0] as i64;
            let closed = if d >= 3 { q(d.pow(d as u32 - 3), 1) } else { q(1, d.pow(3 - d as u32)) };
            agree &= value == closed;
        }
        if !agree {
            failures.push(format!("H_{g}({degrees:?}) = {value}, naive {naive}, expected {expected}"));
        }
    }
    report(1, failures.is_empty(), "six single Hurwitz values match both oracles", start.elapsed());
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn criterion_2_genus_from_critical_value_count() {
    let start = Instant::now();
    let reps = sweep();
    let mut mismatches = Vec::new();
    for m in &reps {
        let (d, t, s) = (m.degree() as i64, m.cone_points() as i64, m.corner_points() as i64);
        let genus = monodromy_to_park(m).unwrap().genus().unwrap() as i64;
        let numerator = 2 * t + s - 2 * d + 2;
        if numerator % 2 != 0 || numerator / 2 != genus {
            mismatches.push(m);
        }
    }
    let elapsed = start.elapsed();
    let ok = mismatches.is_empty() && elapsed < SWEEP_BUDGET;
    report(
        2,
        ok,
        &format!(
            "genus = (2t+s-2d+2)/2 on {} representations; {} mismatches",
            reps.len(),
            mismatches.len()
        ),
        elapsed,
    );
    if let Some(m) = mismatches.first() {
        println!(
            "    first mismatch: {} (corner multiplicities {:?})",
            m.to_json(),
            m.corner_multiplicities()
        );
    }
    assert!(ok, "{} representations disagree with the critical value count", mismatches.len());
}

#[test]
fn criterion_2_companion_genus_from_critical_point_count() {
    let start = Instant::now();
    let reps = sweep();
    let mut bad = 0;
    let mut double_corner = 0;
    for m in &reps {
        let genus = monodromy_to_park(m).unwrap().genus().unwrap();
        if genus != genus_from_critical_points(m.degree(), m.critical_point_count()).unwrap() {
            bad += 1;
        }
        if m.corner_multiplicities().iter().any(|&k| k > 1) {
            double_corner += 1;
        }
    }
    let elapsed = start.elapsed();
    let ok = bad == 0 && elapsed < SWEEP_BUDGET;
    report(
        2,
        ok,
        &format!(
            "companion: genus = (2t+Σμ_k-2d+2)/2 on {} representations ({double_corner} with a double corner)",
            reps.len()
        ),
        elapsed,
    );
    assert!(ok);
}

#[test]
fn criterion_3_example1_park() {
    let start = Instant::now();
    let p = park("example1_park.json");
    let valid = p.validate().unwrap().ok;
    let summary = p.type_summary().unwrap();
    let expected: BTreeMap<String, String> = [("N1", "X1"), ("X1", "N1"), ("N2", "X2"), ("X2", "N2")]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    let roles_swap = p
        .involution
        .nodes
        .iter()
        .all(|(a, b)| p.node(a).unwrap().role == Role::Entrance || p.node(b).unwrap().role == Role::Entrance);
    let ok = valid
        && (summary.d, summary.g, summary.n) == (4, 1, 8)
        && p.involution.nodes == expected
        && roles_swap;
    report(
        3,
        ok,
        &format!("Example 1 park valid={valid} d={} g={} n={}, N_i <-> X_i", summary.d, summary.g, summary.n),
        start.elapsed(),
    );
    assert!(ok);
}

/// Edge-length multisets of the halves obtained by cutting a garden along
/// the edges its involution fixes.
fn half_edge_lengths(p: &Park) -> Vec<Vec<usize>> {
    let fixed = |e: &str| p.involution.edges.get(e).map(String::as_str) == Some(e);
    let lengths: BTreeMap<&str, usize> = p.edges().map(|e| (e.id.as_str(), e.length)).collect();
    let mut out = Vec::new();
    for g in &p.gardens {
        let faces: Vec<_> = g.faces.iter().collect();
        let mut component: Vec<usize> = (0..faces.len()).collect();
        fn root(c: &mut [usize], mut a: usize) -> usize {
            while c[a] != a {
                a = c[a];
            }
            a
        }
        for i in 0..faces.len() {
            for j in i + 1..faces.len() {
                let shares_free_edge = faces[i]
                    .boundary
                    .iter()
                    .any(|e| !fixed(e) && faces[j].boundary.contains(e));
                if shares_free_edge {
                    let (a, b) = (root(&mut component, i), root(&mut component, j));
                    component[a] = b;
                }
            }
        }
        let mut halves: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
        for (i, f) in faces.iter().enumerate() {
            let r = root(&mut component, i);
            let entry = halves.entry(r).or_default();
            for e in &f.boundary {
                if !entry.contains(&e.as_str()) {
                    entry.push(e);
                }
            }
        }
        for edges in halves.values() {
            let mut ls: Vec<usize> = edges.iter().map(|e| lengths[e]).collect();
            ls.sort_unstable();
            out.push(ls);
        }
    }
    out
}

#[test]
fn criterion_4_example2_reproduction() {
    let t = Instant::now();
    let simplest = monodromy_to_park(&monodromy("f3_monodromy.json")).unwrap();
    let first_elapsed = t.elapsed();
    let edges: Vec<_> = simplest.edges().collect();
    let first_ok = simplest.gardens.len() == 1
        && edges.len() == 1
        && edges[0].kind == EdgeKind::Loop
        && edges[0].length == 3
        && park_isomorphic(&simplest, &park("example2_no_real_park.json"), false).unwrap().is_some()
        && first_elapsed < EXTRACTION_BUDGET;

    let t = Instant::now();
    let two_real = monodromy_to_park(&monodromy("two_real_monodromy.json")).unwrap();
    let second_elapsed = t.elapsed();
    let halves = half_edge_lengths(&two_real);
    let second_ok = two_real.gardens.len() == 1
        && two_real.gardens[0].kind == GardenKind::Orientable
        && halves == vec![vec![0, 0, 1], vec![0, 0, 1]]
        && park_isomorphic(&two_real, &park("example2_two_real_park.json"), false).unwrap().is_some()
        && second_elapsed < EXTRACTION_BUDGET;

    let ok = first_ok && second_ok;
    report(
        4,
        ok,
        &format!("F3 -> single loop of length 3; d=3 t=1 s=2 -> semi-garden lengths {halves:?}"),
        first_elapsed + second_elapsed,
    );
    assert!(first_ok, "simplest garden not reproduced");
    assert!(second_ok, "semi-garden lengths {halves:?}");
}

fn random_relabel(d: usize, rng: &mut StdRng) -> Permutation {
    let mut whites: Vec<usize> = (0..d).collect();
    let mut blacks: Vec<usize> = (d..2 * d).collect();
    whites.shuffle(rng);
    blacks.shuffle(rng);
    whites.extend(blacks);
    Permutation::from_images(whites).unwrap()
}

/// Checks the two conditions of the sufficient criterion for a witness.
fn witness_holds(m1: &MonodromyRep, m2: &MonodromyRep, j: &Permutation) -> bool {
    let d = m1.degree();
    if !j.preserves(0..d) || m1.e().conjugate(j).unwrap() != *m2.e() || m1.c()[0].conjugate(j).unwrap() != m2.c()[0] {
        return false;
    }
    let blocks = |m: &MonodromyRep| {
        let xs: Vec<&Permutation> = m.x().iter().collect();
        let mut bs: Vec<Vec<usize>> = orbits(2 * d, &xs, None).unwrap();
        for b in &mut bs {
            b.sort_unstable();
        }
        bs.sort();
        bs
    };
    let mut mapped: Vec<Vec<usize>> = blocks(m1)
        .into_iter()
        .map(|b| {
            let mut v: Vec<usize> = b.iter().map(|&a| j.apply(a)).collect();
            v.sort_unstable();
            v
        })
        .collect();
    mapped.sort();
    mapped == blocks(m2)
}

#[test]
fn criterion_5_conjugate_pairs() {
    let start = Instant::now();
    let reps = sweep();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut failures = Vec::new();
    for _ in 0..CONJUGATE_PAIRS {
        let m = &reps[rng.gen_range(0..reps.len())];
        let j = random_relabel(m.degree(), &mut rng);
        let n = m.conjugated(&j).unwrap();
        let witnessed = match monodromy_equivalent(m, &n).unwrap() {
            Some(w) => witness_holds(m, &n, &w),
            None => false,
        };
        let (p, pn) = (monodromy_to_park(m).unwrap(), monodromy_to_park(&n).unwrap());
        let iso = park_isomorphic(&p, &pn, false).unwrap().is_some();
        if !(witnessed && iso) {
            failures.push(format!("{} under {j}", m.to_json()));
        }
    }
    let ok = failures.is_empty();
    report(
        5,
        ok,
        &format!("{CONJUGATE_PAIRS} random conjugate pairs, {} failures", failures.len()),
        start.elapsed(),
    );
    assert!(ok, "{:?}", &failures[..failures.len().min(5)]);
}

#[test]
fn criterion_6_composite_formula() {
    let start = Instant::now();
    let p = park("two_entrances_park.json");
    let signatures = p.entrance_signatures().unwrap();
    let shape_ok = signatures.len() == 2 && signatures.iter().all(|s| s.g == 0 && s.degrees == [2]);
    let value = park_hurwitz(&p).unwrap();
    let value_ok = value == q(1, 2);
    let factor_ok = interleaving_factor(&[1, 1]) == 2u32.into();

    let limits = EnumerationLimits::default();
    let mut classes = 0;
    let mut violations = Vec::new();
    for d in 1..=3 {
        for t in 0..=5 {
            for s in 0..=5 - t {
                let reps = generate(d, t, s, &limits).unwrap();
                let mut seen: Vec<(Park, BigRational)> = Vec::new();
                for m in &reps {
                    let pm = monodromy_to_park(m).unwrap();
                    let h = park_hurwitz(&pm).unwrap();
                    match seen.iter().find(|(other, _)| park_isomorphic(&pm, other, false).unwrap().is_some()) {
                        Some((_, v)) if *v != h => violations.push(m.to_json()),
                        Some(_) => {}
                        None => {
                            classes += 1;
                            seen.push((pm, h));
                        }
                    }
                }
            }
        }
    }
    let ok = shape_ok && value_ok && factor_ok && violations.is_empty();
    report(
        6,
        ok,
        &format!(
            "(0,(2))x(0,(2)) park gives {value}; interleaving(1,1) = 2; constant on {classes} classes at d <= 3"
        ),
        start.elapsed(),
    );
    assert!(ok, "shape {shape_ok} value {value} factor {factor_ok} violations {violations:?}");
}

fn mutation_flags(name: &str, clause: Clause, mutate: impl FnOnce(&mut Park)) -> Option<String> {
    let mut p = park(name);
    mutate(&mut p);
    let report = p.validate().unwrap();
    if report.ok || !report.violates(clause) {
        return Some(format!("{name}: {} not reported ({:?})", clause.name(), report.violations));
    }
    let rendered = serde_json::to_string(&report).unwrap();
    (!rendered.contains(clause.name())).then(|| format!("{name}: diagnostic does not name {}", clause.name()))
}

#[test]
fn criterion_7_validator_discrimination() {
    let start = Instant::now();
    for name in ["example1_park.json", "example2_two_real_park.json"] {
        assert!(park(name).validate().unwrap().ok, "{name} must start valid");
    }
    let mut failures = Vec::new();
    failures.extend(mutation_flags("example1_park.json", Clause::AlleyColor, |p| {
        let black = p.faces().find(|f| f.id == "BGor0").unwrap().id.clone();
        let alley = p.alleys.iter_mut().find(|a| a.node == "N1").unwrap();
        alley.face = black;
    }));
    failures.extend(mutation_flags("example1_park.json", Clause::OneAlleyPerFace, |p| {
        p.alleys.retain(|a| a.id != "n2-wor1");
    }));
    failures.extend(mutation_flags("example1_park.json", Clause::Involution, |p| {
        p.involution.nodes.insert("N1".into(), "X2".into());
        p.involution.nodes.insert("X2".into(), "N1".into());
    }));
    failures.extend(mutation_flags("example2_two_real_park.json", Clause::FourEdgeVertex, |p| {
        let edge = p.gardens[0].edges.iter_mut().find(|e| e.id == "chordW").unwrap();
        edge.ends = vec!["p1".into(), "p1".into()];
    }));
    let ok = failures.is_empty();
    report(
        7,
        ok,
        "alley colour, missing alley, broken involution and vertex degree each flagged by clause",
        start.elapsed(),
    );
    assert!(ok, "{failures:#?}");
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_parkscope"))
        .args(args)
        .env_remove("PARKSCOPE_CACHE")
        .output()
        .unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

#[test]
fn criterion_8_cli_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let f = |n: &str| fixture_path(n).to_string_lossy().into_owned();
    let extracted = dir.path().join("extracted.json").to_string_lossy().into_owned();
    let commands: Vec<Vec<String>> = vec![
        vec!["validate".into(), f("two_real_monodromy.json")],
        vec!["validate".into(), f("example1_monodromy.json"), "--strict".into()],
        vec!["extract".into(), f("example1_monodromy.json")],
        vec!["extract".into(), f("two_real_monodromy.json"), "-o".into(), extracted],
        vec!["validate-park".into(), f("example1_park.json")],
        vec!["info".into(), f("example1_park.json")],
        vec!["info".into(), f("two_entrances_monodromy.json")],
        vec!["hurwitz".into(), f("two_entrances_park.json")],
        vec!["single-hurwitz".into(), "0".into(), "2,3".into()],
        vec!["isomorphic".into(), f("example1_park.json"), f("example1_park.json")],
        vec!["isomorphic".into(), f("example2_two_real_park.json"), f("example2_no_real_park.json")],
        vec!["equivalent".into(), f("f3_monodromy.json"), f("f3_monodromy.json")],
        vec!["enumerate".into(), "--degree".into(), "3".into(), "--cone".into(), "2".into(), "--corner".into(), "2".into(), "--dedup".into(), "jequiv".into()],
        vec!["enumerate".into(), "--degree".into(), "4".into(), "--cone".into(), "2".into(), "--corner".into(), "2".into(), "--dedup".into(), "park".into()],
        vec!["enumerate".into(), "--degree".into(), "3".into(), "--cone".into(), "4".into(), "--corner".into(), "0".into()],
    ];
    let mut failures = Vec::new();
    for cmd in &commands {
        let mut outputs = Vec::new();
        for threads in [None, Some("1"), Some("4"), None] {
            let mut args: Vec<&str> = vec!["--json"];
            if let Some(n) = threads {
                args.extend(["--threads", n]);
            }
            args.extend(cmd.iter().map(String::as_str));
            outputs.push(run_cli(&args));
        }
        let parses = serde_json::from_slice::<serde_json::Value>(&outputs[0].1).is_ok();
        if !parses || outputs.iter().any(|o| *o != outputs[0]) {
            failures.push(cmd.join(" "));
        }
    }
    let ok = failures.is_empty();
    report(
        8,
        ok,
        &format!("{} --json commands byte-identical across runs and thread counts", commands.len()),
        start.elapsed(),
    );
    assert!(ok, "non-deterministic: {failures:?}");
}
