//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use backbone_core::graph::{gen_synthetic, SyntheticKind};
use backbone_core::matching::{brute_force_matching_size, max_matching};
use backbone_core::pipeline::{
    emission_order, pipeline_model, restructure_recursive, RestructureConfig,
};
use backbone_core::recouple::{generate_subgraphs, select_backbone, verify_cover};
use backbone_core::sim::{
    na_trace_baseline, na_trace_restructured, oracle_min_fetches, simulate_buffer, BufferConfig,
    SimMetrics,
};
use backbone_core::{BackboneMode, SemanticGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORPUS_SIZE: u64 = 1000;
const TAIL_BUCKET: u64 = 8;
const TAIL_GRAPH_SEED: u64 = 42;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn graph(ns: usize, nd: usize, edges: &[(u32, u32)]) -> SemanticGraph {
    SemanticGraph::from_edges(ns, nd, edges.iter().copied()).unwrap()
}

fn complete(ns: usize, nd: usize) -> SemanticGraph {
    let edges: Vec<_> = (0..ns as u32)
        .flat_map(|u| (0..nd as u32).map(move |v| (u, v)))
        .collect();
    graph(ns, nd, &edges)
}

fn four_cycle() -> SemanticGraph {
    graph(2, 2, &[(0, 0), (0, 1), (1, 0), (1, 1)])
}

/// Mixed uniform / power-law graphs with up to 1000 + 1000 vertices and
/// 10000 edges.
fn corpus_graph(i: u64) -> SemanticGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(i);
    let ns = rng.random_range(1..=1000usize);
    let nd = rng.random_range(1..=1000usize);
    let m = rng.random_range(0..=(ns * nd).min(10_000));
    let kind = if i.is_multiple_of(2) {
        SyntheticKind::Uniform
    } else {
        SyntheticKind::power_law()
    };
    gen_synthetic(kind, ns, nd, m, i).unwrap()
}

fn criterion_1() -> Outcome {
    let fixtures = [
        ("star", graph(1, 3, &[(0, 0), (0, 1), (0, 2)]), 1),
        ("path", graph(2, 2, &[(0, 0), (1, 0), (1, 1)]), 2),
        ("4-cycle", four_cycle(), 2),
        ("K2,3", complete(2, 3), 2),
        ("K3,3", complete(3, 3), 3),
    ];
    for (name, g, expected) in &fixtures {
        let fast = max_matching(g).size();
        let slow = brute_force_matching_size(g).unwrap();
        if fast != *expected || slow != *expected {
            return Outcome::new(
                false,
                format!("{name}: matching {fast}, exhaustive {slow}, expected {expected}"),
            );
        }
    }
    for i in 0..2000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1_000_000 + i);
        let ns = rng.random_range(0..=6usize);
        let nd = rng.random_range(0..=6usize);
        let m = rng.random_range(0..=(ns * nd).min(24));
        let g = gen_synthetic(SyntheticKind::Uniform, ns, nd, m, i).unwrap();
        let fast = max_matching(&g).size();
        let slow = brute_force_matching_size(&g).unwrap();
        if fast != slow {
            return Outcome::new(
                false,
                format!("instance {i}: matching {fast} vs exhaustive {slow}"),
            );
        }
    }
    Outcome::new(true, "5 fixtures + 2000 instances agree")
}

fn criterion_3() -> Outcome {
    let g = four_cycle();
    let m = max_matching(&g);
    let literal = verify_cover(
        &g,
        &select_backbone(&g, &m, BackboneMode::PaperLiteral).unwrap(),
    );
    let konig = verify_cover(&g, &select_backbone(&g, &m, BackboneMode::Konig).unwrap());
    Outcome::new(
        literal == 4 && konig == 0,
        format!("uncovered paper-literal={literal} konig={konig}"),
    )
}

#[derive(Default)]
struct CorpusResults {
    cover_failures: Vec<u64>,
    partition_failures: Vec<u64>,
    oracle_mismatches: Vec<u64>,
    shared_above_oracle: Vec<u64>,
    shared_below_oracle: usize,
    dominance_violations: Vec<(u64, u64, u64)>,
    cover_time: Duration,
}

fn run_corpus() -> CorpusResults {
    let mut r = CorpusResults::default();
    for i in 0..CORPUS_SIZE {
        let g = corpus_graph(i);

        let t0 = Instant::now();
        let m = max_matching(&g);
        let p = select_backbone(&g, &m, BackboneMode::Konig).unwrap();
        if verify_cover(&g, &p) != 0 || p.backbone_size() != m.size() {
            r.cover_failures.push(i);
        }
        r.cover_time += t0.elapsed();

        let t = generate_subgraphs(&g, &p).unwrap();
        let mut seen = BTreeSet::new();
        let mut disjoint = true;
        for sub in t.iter() {
            let injective = sub.src_ids.windows(2).all(|w| w[0] < w[1])
                && sub.dst_ids.windows(2).all(|w| w[0] < w[1]);
            disjoint &= injective;
            for e in sub.mapped_edges() {
                disjoint &= seen.insert(e);
            }
        }
        if !disjoint || !seen.iter().copied().eq(g.edges().iter().copied()) {
            r.partition_failures.push(i);
        }

        let cap = (t.max_stationary_size() + 1).max(2);
        let oracle = oracle_min_fetches(t.iter());
        let trace = na_trace_restructured(&g, t.iter());
        let pinned = BufferConfig::new(cap).pinned(true);
        let isolated = simulate_buffer(&trace, &pinned.isolated(true), 4)
            .unwrap()
            .fetches_total();
        let shared = simulate_buffer(&trace, &pinned, 4).unwrap().fetches_total();
        let baseline = simulate_buffer(&na_trace_baseline(&g), &BufferConfig::new(cap), 4)
            .unwrap()
            .fetches_total();
        if isolated != oracle {
            r.oracle_mismatches.push(i);
        }
        if shared > oracle {
            r.shared_above_oracle.push(i);
        } else if shared < oracle {
            r.shared_below_oracle += 1;
        }
        if shared > baseline {
            r.dominance_violations.push((i, shared, baseline));
        }
    }
    r
}

fn first_few<T: std::fmt::Debug>(items: &[T]) -> String {
    format!("{:?}", &items[..items.len().min(5)])
}

fn tail_fetches(m: &SimMetrics) -> u64 {
    m.histogram
        .iter()
        .filter(|row| row.lower >= TAIL_BUCKET)
        .map(|row| row.accesses)
        .sum()
}

fn criterion_7() -> Outcome {
    let g = gen_synthetic(SyntheticKind::power_law(), 10_000, 1_000, 50_000, TAIL_GRAPH_SEED).unwrap();
    let cfg = BufferConfig::new(256);
    let baseline = simulate_buffer(&na_trace_baseline(&g), &cfg, 256).unwrap();
    let plan = restructure_recursive(&g, &RestructureConfig::default(), 256).unwrap();
    let trace = na_trace_restructured(&g, emission_order(&plan));
    let restructured = simulate_buffer(&trace, &cfg, 256).unwrap();
    let pinned = simulate_buffer(&trace, &cfg.pinned(true), 256).unwrap();

    let base_tail = baseline.tail_vertex_ratio(TAIL_BUCKET);
    let re_tail = restructured.tail_vertex_ratio(TAIL_BUCKET);
    Outcome::new(
        base_tail > 0.0 && re_tail < base_tail,
        format!(
            "vertex mass in buckets >= {TAIL_BUCKET}: baseline {base_tail:.4}, restructured {re_tail:.4}; \
             tail fetches baseline {}, restructured {}, pinned {}; total fetches {} -> {}",
            tail_fetches(&baseline),
            tail_fetches(&restructured),
            tail_fetches(&pinned),
            baseline.fetches_total(),
            restructured.fetches_total()
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..100 {
        let n = rng.random_range(1..=20usize);
        let f: Vec<u64> = (0..n).map(|_| rng.random_range(0..1_000_000)).collect();
        let b: Vec<u64> = (0..n).map(|_| rng.random_range(0..1_000_000)).collect();
        let total = pipeline_model(&f, &b).unwrap();
        let (sf, sb): (u64, u64) = (f.iter().sum(), b.iter().sum());
        if !(sf.max(sb) <= total && total <= sf + sb) {
            return Outcome::new(
                false,
                format!("trial {trial}: total {total}, sums {sf}/{sb}"),
            );
        }
    }
    Outcome::new(true, "100 tallies within bounds")
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_backbone"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn full_run(root: &Path) -> Result<(), String> {
    let graphs = root.join("graphs");
    let g = graphs.to_str().unwrap();
    run_cli(&[
        "gen",
        "--kind",
        "uniform",
        "--num-src",
        "300",
        "--num-dst",
        "200",
        "--num-edges",
        "2000",
        "--seed",
        "7",
        "--name",
        "uniform",
        "--output-dir",
        g,
    ])?;
    run_cli(&[
        "gen",
        "--kind",
        "power-law",
        "--num-src",
        "800",
        "--num-dst",
        "150",
        "--num-edges",
        "4000",
        "--seed",
        "7",
        "--name",
        "skewed",
        "--output-dir",
        g,
    ])?;
    run_cli(&[
        "restructure",
        "--input",
        g,
        "--output-dir",
        root.join("restructure").to_str().unwrap(),
        "--capacity",
        "64",
    ])?;
    run_cli(&[
        "simulate",
        "--input",
        g,
        "--output-dir",
        root.join("simulate").to_str().unwrap(),
        "--capacity",
        "64",
        "--pin-backbone",
    ])?;
    run_cli(&[
        "simulate",
        "--input",
        g,
        "--output-dir",
        root.join("simulate-csv").to_str().unwrap(),
        "--capacity",
        "64",
        "--policy",
        "fifo",
        "--format",
        "csv",
    ])
}

fn snapshot(dir: &Path, base: &Path, out: &mut Vec<(String, Vec<u8>)>) {
    let mut entries: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    entries.sort();
    for path in entries {
        if path.is_dir() {
            snapshot(&path, base, out);
        } else {
            let rel = path.strip_prefix(base).unwrap().display().to_string();
            out.push((rel, fs::read(&path).unwrap()));
        }
    }
}

fn criterion_9() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        if let Err(e) = full_run(dir) {
            return Outcome::new(false, format!("cli run failed: {e}"));
        }
    }
    let (mut sa, mut sb) = (Vec::new(), Vec::new());
    snapshot(a.path(), a.path(), &mut sa);
    snapshot(b.path(), b.path(), &mut sb);
    let differing: Vec<&String> = sa
        .iter()
        .zip(&sb)
        .filter(|(x, y)| x != y)
        .map(|(x, _)| &x.0)
        .collect();
    Outcome::new(
        sa.len() == sb.len() && differing.is_empty() && !sa.is_empty(),
        format!(
            "{} artifacts compared, {} differ {}",
            sa.len(),
            differing.len(),
            first_few(&differing)
        ),
    )
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome, Duration)> = Vec::new();
    let timed = |f: &dyn Fn() -> Outcome| {
        let t0 = Instant::now();
        let o = f();
        (o, t0.elapsed())
    };

    let (o, t) = timed(&criterion_1);
    let o = Outcome::new(o.pass && t < Duration::from_secs(10), o.detail);
    results.push((1, "matching oracle equivalence", o, t));

    let t0 = Instant::now();
    let corpus = run_corpus();
    let corpus_time = t0.elapsed();

    results.push((
        2,
        "konig certification",
        Outcome::new(
            corpus.cover_failures.is_empty() && corpus.cover_time < Duration::from_secs(30),
            format!(
                "{} of {CORPUS_SIZE} graphs fail {}",
                corpus.cover_failures.len(),
                first_few(&corpus.cover_failures)
            ),
        ),
        corpus.cover_time,
    ));

    let (o, t) = timed(&criterion_3);
    results.push((3, "paper-literal divergence", o, t));

    results.push((
        4,
        "edge-partition invariant",
        Outcome::new(
            corpus.partition_failures.is_empty(),
            format!(
                "{} of {CORPUS_SIZE} graphs fail {}",
                corpus.partition_failures.len(),
                first_few(&corpus.partition_failures)
            ),
        ),
        corpus_time,
    ));

    results.push((
        5,
        "locality oracle attainment",
        Outcome::new(
            corpus.oracle_mismatches.is_empty() && corpus.shared_above_oracle.is_empty(),
            format!(
                "per-subgraph cold buffer: {} mismatches {}; shared buffer: {} above oracle, {} below (cross-subgraph reuse)",
                corpus.oracle_mismatches.len(),
                first_few(&corpus.oracle_mismatches),
                corpus.shared_above_oracle.len(),
                corpus.shared_below_oracle
            ),
        ),
        corpus_time,
    ));

    results.push((
        6,
        "dominance",
        Outcome::new(
            corpus.dominance_violations.is_empty(),
            format!(
                "{} violations {}",
                corpus.dominance_violations.len(),
                first_few(&corpus.dominance_violations)
            ),
        ),
        corpus_time,
    ));

    let (o, t) = timed(&criterion_7);
    let o = Outcome::new(o.pass && t < Duration::from_secs(60), o.detail);
    results.push((7, "replacement histogram tail", o, t));

    let (o, t) = timed(&criterion_8);
    results.push((8, "pipeline bounds", o, t));

    let (o, t) = timed(&criterion_9);
    results.push((9, "cli determinism", o, t));

    let mut failed = 0;
    for (n, name, o, t) in &results {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n} [{verdict}] {name}: {} ({:.2?})", o.detail, t);
        failed += usize::from(!o.pass);
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
