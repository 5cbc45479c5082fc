use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use backbone_core::graph::{
    gen_synthetic, read_graph, write_graph, SyntheticKind, BYTES_PER_ELEMENT,
};
use backbone_core::matching::max_matching_with_events;
use backbone_core::pipeline::{
    emission_order, pipeline_model, restructure_recursive, CycleWeights, RestructureConfig,
    RestructurePlan,
};
use backbone_core::recouple::{select_backbone, verify_cover};
use backbone_core::sim::{
    compare, default_capacity, na_trace_baseline, na_trace_restructured, oracle_min_fetches,
    simulate_buffer, BufferConfig,
};
use backbone_core::{Matching, Partition, SemanticGraph};
use rayon::prelude::*;

use crate::args::{Format, GenArgs, GenKind, PlanArgs, RestructureArgs, SimulateArgs};

pub fn gen(a: &GenArgs) -> Result<()> {
    let kind = match a.kind {
        GenKind::Uniform => SyntheticKind::Uniform,
        GenKind::PowerLaw => SyntheticKind::PowerLaw {
            exponent: a.exponent,
        },
    };
    let mut g = gen_synthetic(kind, a.num_src, a.num_dst, a.num_edges, a.seed)?;
    if let Some(dim) = a.feature_dim {
        let bytes = dim * BYTES_PER_ELEMENT;
        g = g.with_feature_bytes(bytes, bytes);
    }
    let path = write_graph(&g, &a.output_dir, &a.name)
        .with_context(|| format!("writing graph to {}", a.output_dir.display()))?;
    println!(
        "wrote {} (src={} dst={} edges={})",
        path.display(),
        g.num_src(),
        g.num_dst(),
        g.num_edges()
    );
    Ok(())
}

/// Edge-list inputs named by `--input`, sorted by path.
fn collect_inputs(input: &Path) -> Result<Vec<PathBuf>> {
    if input.is_dir() {
        let mut files = Vec::new();
        for entry in fs::read_dir(input).with_context(|| format!("reading {}", input.display()))? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "edges") {
                files.push(path);
            }
        }
        files.sort();
        if files.is_empty() {
            bail!("no .edges files in {}", input.display());
        }
        Ok(files)
    } else {
        Ok(vec![input.to_path_buf()])
    }
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "graph".to_string())
}

fn load(path: &Path) -> Result<SemanticGraph> {
    read_graph(path).with_context(|| format!("loading {}", path.display()))
}

fn vector_bytes_of(g: &SemanticGraph, explicit: Option<usize>) -> usize {
    explicit.unwrap_or_else(|| g.feature_bytes_src().max(g.feature_bytes_dst()))
}

fn restructure_config(a: &PlanArgs) -> RestructureConfig {
    RestructureConfig {
        max_depth: a.max_depth,
        fit_fraction: a.theta,
        mode: a.mode.into(),
    }
}

/// Root-level decouple/recouple result plus the recursive plan.
struct Restructured {
    matching: Matching,
    partition: Partition,
    uncovered: usize,
    plan: RestructurePlan,
}

fn run_restructure(g: &SemanticGraph, a: &PlanArgs, capacity: usize) -> Result<Restructured> {
    let cfg = restructure_config(a);
    let (matching, _) = max_matching_with_events(g);
    let partition = select_backbone(g, &matching, cfg.mode)?;
    let uncovered = verify_cover(g, &partition);
    let plan = restructure_recursive(g, &cfg, capacity)?;
    Ok(Restructured {
        matching,
        partition,
        uncovered,
        plan,
    })
}

fn summary_text(stem: &str, r: &Restructured) -> String {
    let c = r.partition.class_sizes();
    let mut out = String::new();
    let _ = writeln!(out, "graph = {stem}");
    let _ = writeln!(out, "mode = {}", r.partition.mode());
    let _ = writeln!(out, "matching = {}", r.matching.size());
    let _ = writeln!(out, "backbone = {}", r.partition.backbone_size());
    let _ = writeln!(out, "src_in = {}", c.src_in);
    let _ = writeln!(out, "src_out = {}", c.src_out);
    let _ = writeln!(out, "dst_in = {}", c.dst_in);
    let _ = writeln!(out, "dst_out = {}", c.dst_out);
    let _ = writeln!(out, "uncovered = {}", r.uncovered);
    let _ = writeln!(out, "leaves = {}", r.plan.leaves().len());
    out
}

fn warn_uncovered(stem: &str, r: &Restructured) {
    if r.uncovered > 0 {
        eprintln!(
            "warning: {stem}: {} edge(s) not covered by the {} backbone; routed to g2",
            r.uncovered,
            r.partition.mode()
        );
    }
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_restructure_outputs(dir: &Path, stem: &str, r: &Restructured) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_file(&dir.join("matching.txt"), r.matching.to_text())?;
    write_file(&dir.join("partition.txt"), r.partition.to_text())?;
    write_file(&dir.join("plan.txt"), r.plan.to_text())?;
    write_file(&dir.join("summary.txt"), summary_text(stem, r))?;
    let sub_dir = dir.join("subgraphs");
    for leaf in r.plan.leaves() {
        let name = leaf.path();
        write_graph(&leaf.subgraph.graph, &sub_dir, &name)
            .with_context(|| format!("writing subgraph {name}"))?;
        write_file(
            &sub_dir.join(format!("{name}.remap")),
            leaf.subgraph.remap_text(),
        )?;
    }
    Ok(())
}

pub fn restructure(a: &RestructureArgs) -> Result<()> {
    let a = &a.plan;
    let inputs = collect_inputs(&a.input)?;
    let results: Vec<Result<(String, Restructured)>> = inputs
        .par_iter()
        .map(|path| {
            let g = load(path)?;
            let stem = stem_of(path);
            let capacity = a
                .capacity
                .unwrap_or_else(|| default_capacity(vector_bytes_of(&g, None)));
            let r = run_restructure(&g, a, capacity)
                .with_context(|| format!("restructuring {stem}"))?;
            write_restructure_outputs(&a.output_dir.join(&stem), &stem, &r)?;
            Ok((stem, r))
        })
        .collect();
    for res in results {
        let (stem, r) = res?;
        print!("{}", summary_text(&stem, &r));
        warn_uncovered(&stem, &r);
    }
    Ok(())
}

struct Simulated {
    stem: String,
    restructured: Restructured,
    oracle: u64,
    baseline_fetches: u64,
    restructured_fetches: u64,
    dram_ratio: f64,
    frontend_cycles: u64,
    backend_cycles: u64,
}

fn simulate_one(path: &Path, a: &SimulateArgs) -> Result<Simulated> {
    let g = load(path)?;
    let stem = stem_of(path);
    let vector_bytes = vector_bytes_of(&g, a.vector_bytes);
    let capacity = a
        .plan
        .capacity
        .unwrap_or_else(|| default_capacity(vector_bytes));
    let cfg = BufferConfig::new(capacity)
        .with_policy(a.policy.into())
        .pinned(a.pin_backbone)
        .isolated(a.isolate_subgraphs);
    cfg.validate()?;

    let r =
        run_restructure(&g, &a.plan, capacity).with_context(|| format!("restructuring {stem}"))?;
    let order = emission_order(&r.plan);
    let oracle = oracle_min_fetches(order.iter().copied());
    let trace = na_trace_restructured(&g, order);
    let baseline = simulate_buffer(&na_trace_baseline(&g), &cfg, vector_bytes)?;
    let restructured = simulate_buffer(&trace, &cfg, vector_bytes)?;
    let cmp = compare(&baseline, &restructured)?;

    let dir = a.plan.output_dir.join(&stem);
    write_restructure_outputs(&dir, &stem, &r)?;
    let (ext, base_text, re_text, cmp_text) = match a.format {
        Format::Text => (
            "txt",
            baseline.to_text(),
            restructured.to_text(),
            cmp.to_text(),
        ),
        Format::Csv => (
            "csv",
            baseline.to_csv(),
            restructured.to_csv(),
            cmp.to_csv(),
        ),
    };
    write_file(&dir.join(format!("baseline.{ext}")), base_text)?;
    write_file(&dir.join(format!("restructured.{ext}")), re_text)?;
    write_file(&dir.join(format!("comparison.{ext}")), cmp_text)?;

    Ok(Simulated {
        stem,
        oracle,
        baseline_fetches: baseline.fetches_total(),
        restructured_fetches: restructured.fetches_total(),
        dram_ratio: cmp.dram_ratio,
        frontend_cycles: CycleWeights::default().frontend_cycles(&r.plan.total_events()),
        backend_cycles: trace.len() as u64,
        restructured: r,
    })
}

fn pipeline_text(runs: &[Simulated]) -> Result<String> {
    let frontend: Vec<u64> = runs.iter().map(|s| s.frontend_cycles).collect();
    let backend: Vec<u64> = runs.iter().map(|s| s.backend_cycles).collect();
    let total = pipeline_model(&frontend, &backend)?;
    let mut out = String::new();
    let _ = writeln!(out, "# graph frontend_cycles backend_cycles");
    for s in runs {
        let _ = writeln!(out, "{} {} {}", s.stem, s.frontend_cycles, s.backend_cycles);
    }
    let _ = writeln!(out, "frontend_total = {}", frontend.iter().sum::<u64>());
    let _ = writeln!(out, "backend_total = {}", backend.iter().sum::<u64>());
    let _ = writeln!(out, "pipelined_total = {total}");
    Ok(out)
}

pub fn simulate(a: &SimulateArgs) -> Result<()> {
    let inputs = collect_inputs(&a.plan.input)?;
    let runs: Vec<Simulated> = inputs
        .par_iter()
        .map(|path| simulate_one(path, a))
        .collect::<Result<_>>()?;
    fs::create_dir_all(&a.plan.output_dir)
        .with_context(|| format!("creating {}", a.plan.output_dir.display()))?;
    write_file(
        &a.plan.output_dir.join("pipeline.txt"),
        pipeline_text(&runs)?,
    )?;
    for s in &runs {
        print!("{}", summary_text(&s.stem, &s.restructured));
        println!("baseline_fetches = {}", s.baseline_fetches);
        println!("restructured_fetches = {}", s.restructured_fetches);
        println!("oracle_fetches = {}", s.oracle);
        println!("dram_ratio = {:.6}", s.dram_ratio);
        warn_uncovered(&s.stem, &s.restructured);
    }
    Ok(())
}
