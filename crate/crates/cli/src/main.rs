//! Command-line front end for the box-cover engine.
//!
//! Subcommands:
//! * `solve`  — list the tuples covered by no box of a box file;
//! * `join`   — run a natural join described by a query JSON file;
//! * `gen`    — write a named instance family as a box file plus manifest;
//! * `bench`  — sweep a family over its size parameter and fit log-log slopes;
//! * `verify` — replay a run against the brute-force oracle and its trace.
//!
//! Exit codes: 0 on success, 1 when a verification fails, 2 on usage or
//! input errors. Tuple output is sorted and byte-identical across runs.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use boxcover::balance::tetris_lb_run;
use boxcover::dyadic::{BoxFile, DyadicBox};
use boxcover::engine::{
    suggest_sao, tetris_run, EngineMode, MaterializedOracle, RunStats, Sao, SaoStrategy,
    StatsRecord, TraceEvent,
};
use boxcover::instances::{
    gen_fig_triangle, gen_geo_lb_half, gen_ord_lb_n1, gen_ord_lb_w1, gen_parity_chain,
    BcpInstance, TriangleVariant,
};
use boxcover::joins::{load_query, query_oracle, JoinInstance};
use boxcover::verify::{brute_force_bcp, log_log_slope, validate_trace};

// --- argument surface -------------------------------------------------------------

#[derive(Parser)]
#[command(name = "boxcover", version, about = "Box-cover and natural-join engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the tuples covered by no box of a box file.
    Solve(SolveArgs),
    /// Run a natural join described by a query JSON file.
    Join(JoinArgs),
    /// Generate an instance family as a box file plus JSON manifest.
    Gen(GenArgs),
    /// Sweep an instance family and fit log-log scaling slopes.
    Bench(BenchArgs),
    /// Check a run against the brute-force oracle and replay its trace.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Box file to solve.
    boxes: PathBuf,
    /// Engine mode.
    #[arg(long, default_value = "reloaded")]
    mode: EngineMode,
    /// Splitting attribute order: comma list of attribute names.
    #[arg(long, value_name = "a,b,c")]
    sao: Option<String>,
    /// Record a replayable event trace to this JSONL file.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    /// Write the run's counter record here as JSON (default: stderr).
    #[arg(long, value_name = "FILE")]
    stats: Option<PathBuf>,
    /// Write tuples here instead of stdout.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct JoinArgs {
    /// Query description (JSON); relation files resolve against its directory.
    query: PathBuf,
    /// Engine mode.
    #[arg(long, default_value = "reloaded")]
    mode: EngineMode,
    /// How to pick the splitting attribute order.
    #[arg(long, default_value = "min-width")]
    sao_strategy: SaoStrategy,
    /// Record a replayable event trace to this JSONL file.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    /// Write the run's counter record here as JSON (default: stderr).
    #[arg(long, value_name = "FILE")]
    stats: Option<PathBuf>,
    /// Write tuples here instead of stdout.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Destination box file; the manifest lands beside it.
    out: PathBuf,
    /// Instance family tag.
    #[arg(long)]
    family: String,
    /// Attribute count (parity_chain, ord_lb_n1, geo_lb_half).
    #[arg(long)]
    n: Option<usize>,
    /// Domain bit width (parity_chain, fig3_triangle, fig5_triangle).
    #[arg(long)]
    d: Option<u8>,
    /// Certificate size target (ord_lb_n1, ord_lb_w1, geo_lb_half).
    #[arg(long)]
    c: Option<u64>,
    /// Treewidth parameter (ord_lb_w1).
    #[arg(long)]
    w: Option<usize>,
    /// Manifest destination (default: `OUT` with extension `manifest.json`).
    #[arg(long, value_name = "FILE")]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance family tag (same tags as `gen`).
    #[arg(long)]
    family: String,
    /// Sweep of the family's size parameter, comma list
    /// (c for the *_lb families, d for the others).
    #[arg(long, value_name = "v1,v2,...")]
    sweep: String,
    /// Engine modes to run at every sweep point, comma list.
    #[arg(long, default_value = "reloaded")]
    modes: String,
    /// Attribute count where the family takes one.
    #[arg(long)]
    n: Option<usize>,
    /// Treewidth parameter (ord_lb_w1).
    #[arg(long)]
    w: Option<usize>,
    /// How to pick the splitting attribute order.
    #[arg(long, default_value = "fixed")]
    sao_strategy: SaoStrategy,
    /// Worker threads for sweep points.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write the CSV here instead of stdout (slopes always go to stderr).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Box file to check.
    boxes: PathBuf,
    /// Engine mode to drive.
    #[arg(long, default_value = "reloaded")]
    mode: EngineMode,
    /// Splitting attribute order: comma list of attribute names.
    #[arg(long, value_name = "a,b,c")]
    sao: Option<String>,
    /// Expected tuples, one comma-joined line each (as `solve` writes them).
    #[arg(long, value_name = "FILE")]
    expected: Option<PathBuf>,
    /// Run the brute-force oracle past the 24-bit point-count guard.
    #[arg(long)]
    force: bool,
}

// --- entry point ------------------------------------------------------------------

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Join(args) => cmd_join(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

// --- solve ------------------------------------------------------------------------

fn cmd_solve(args: &SolveArgs) -> anyhow::Result<ExitCode> {
    let file = BoxFile::read(&args.boxes)?;
    let n = file.attrs.len();
    let sao = parse_sao(args.sao.as_deref(), &file.attrs)?;
    let mode = effective_mode(args.mode, n);
    let oracle = MaterializedOracle::new(file.d, n, file.boxes.iter().cloned());

    let (tuples, stats, trace) = run_engine(&oracle, mode, &sao, args.trace.is_some())?;
    if let Some(path) = &args.trace {
        write_trace(path, &trace)?;
    }

    let mut out = String::new();
    push_raw_tuples(&tuples, &mut out);
    emit(args.output.as_deref(), &out)?;
    emit_stats(args.stats.as_deref(), &StatsRecord::new(mode, &sao, file.d, n, oracle.len(), stats))?;
    Ok(ExitCode::SUCCESS)
}

// --- join -------------------------------------------------------------------------

fn cmd_join(args: &JoinArgs) -> anyhow::Result<ExitCode> {
    let instance = load_query(&args.query)?;
    let n = instance.attributes().len();
    let sao = suggest_sao(&instance.hypergraph()?, args.sao_strategy)?;
    let mode = effective_mode(args.mode, n);
    let oracle = query_oracle(&instance)?;

    let (tuples, stats, trace) = run_engine(&oracle, mode, &sao, args.trace.is_some())?;
    if let Some(path) = &args.trace {
        write_trace(path, &trace)?;
    }

    let mut out = String::new();
    push_decoded_tuples(&instance, &tuples, &mut out);
    emit(args.output.as_deref(), &out)?;
    emit_stats(
        args.stats.as_deref(),
        &StatsRecord::new(mode, &sao, instance.d(), n, oracle.len(), stats),
    )?;
    Ok(ExitCode::SUCCESS)
}

// --- gen --------------------------------------------------------------------------

fn cmd_gen(args: &GenArgs) -> anyhow::Result<ExitCode> {
    let instance = build_instance(&args.family, args.n, args.d, args.c, args.w)?;
    instance.to_box_file().write(&args.out)?;

    let manifest_path =
        args.manifest.clone().unwrap_or_else(|| args.out.with_extension("manifest.json"));
    let mut manifest = serde_json::to_string_pretty(&instance.manifest())?;
    manifest.push('\n');
    fs::write(&manifest_path, manifest)
        .with_context(|| format!("writing {}", manifest_path.display()))?;

    println!(
        "wrote {} boxes (family {}, d={}, n={}) to {}; manifest {}",
        instance.boxes.len(),
        instance.family,
        instance.d,
        instance.n,
        args.out.display(),
        manifest_path.display()
    );
    Ok(ExitCode::SUCCESS)
}

/// Builds the named family, insisting on the parameters it takes.
fn build_instance(
    family: &str,
    n: Option<usize>,
    d: Option<u8>,
    c: Option<u64>,
    w: Option<usize>,
) -> anyhow::Result<BcpInstance> {
    fn need<T>(v: Option<T>, family: &str, flag: &str) -> anyhow::Result<T> {
        v.ok_or_else(|| anyhow!("family {family} needs {flag}"))
    }
    let instance = match family {
        "parity_chain" => {
            gen_parity_chain(need(n, family, "--n")?, need(d, family, "--d")?)?
        }
        "ord_lb_n1" => gen_ord_lb_n1(need(n, family, "--n")?, need(c, family, "--c")?)?,
        "ord_lb_w1" => gen_ord_lb_w1(need(w, family, "--w")?, need(c, family, "--c")?)?,
        "geo_lb_half" => gen_geo_lb_half(need(n, family, "--n")?, need(c, family, "--c")?)?,
        "fig3_triangle" => gen_fig_triangle(TriangleVariant::Empty, need(d, family, "--d")?)?,
        "fig5_triangle" => gen_fig_triangle(TriangleVariant::NonEmpty, need(d, family, "--d")?)?,
        other => bail!(
            "unknown family `{other}` (families: parity_chain, ord_lb_n1, ord_lb_w1, \
             geo_lb_half, fig3_triangle, fig5_triangle)"
        ),
    };
    Ok(instance)
}

// --- bench ------------------------------------------------------------------------

/// Frozen column order of the bench CSV.
const BENCH_HEADER: &str = "family,param,mode,d,n,input_boxes,resolutions_gap,\
                            resolutions_output,probes,boxes_loaded,skeleton_calls,tuples,wall_ms";

struct BenchRow {
    family: &'static str,
    param: u64,
    mode: EngineMode,
    d: u8,
    n: usize,
    input_boxes: usize,
    stats: RunStats,
    tuples: usize,
    wall_ms: f64,
}

fn cmd_bench(args: &BenchArgs) -> anyhow::Result<ExitCode> {
    let params: Vec<u64> = args
        .sweep
        .split(',')
        .map(|s| s.trim().parse().with_context(|| format!("bad sweep value `{s}`")))
        .collect::<anyhow::Result<_>>()?;
    let modes: Vec<EngineMode> = args
        .modes
        .split(',')
        .map(|s| s.trim().parse::<EngineMode>())
        .collect::<boxcover::Result<_>>()?;
    if params.is_empty() {
        bail!("empty sweep");
    }

    // Every (point, mode) pair owns its instance and engine state.
    let tasks: Vec<(u64, EngineMode)> =
        params.iter().flat_map(|&p| modes.iter().map(move |&m| (p, m))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.jobs.max(1)).build()?;
    let rows: Vec<BenchRow> = pool
        .install(|| {
            tasks
                .par_iter()
                .map(|&(param, mode)| bench_point(args, param, mode))
                .collect::<anyhow::Result<Vec<_>>>()
        })?;

    let mut csv = String::from(BENCH_HEADER);
    csv.push('\n');
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{},{:.3}",
            r.family,
            r.param,
            r.mode,
            r.d,
            r.n,
            r.input_boxes,
            r.stats.resolutions_gap,
            r.stats.resolutions_output,
            r.stats.probes,
            r.stats.boxes_loaded,
            r.stats.skeleton_calls,
            r.tuples,
            r.wall_ms
        )?;
    }
    emit(args.out.as_deref(), &csv)?;

    // One fitted exponent per mode: resolutions_gap against input boxes.
    for &mode in &modes {
        let samples: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.mode == mode)
            .map(|r| (r.input_boxes as f64, r.stats.resolutions_gap as f64))
            .collect();
        match log_log_slope(&samples) {
            Some(fit) => eprintln!(
                "slope mode={mode} points={} slope={:.4} residual={:.4}",
                fit.points, fit.slope, fit.residual
            ),
            None => eprintln!("slope mode={mode} points={} slope=not-available", samples.len()),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn bench_point(args: &BenchArgs, param: u64, mode: EngineMode) -> anyhow::Result<BenchRow> {
    let instance = bench_instance(&args.family, args.n, args.w, param)?;
    if mode.is_lb() && instance.n < 3 {
        bail!("mode {mode} needs n >= 3; family {} has n = {}", instance.family, instance.n);
    }
    let oracle = instance.oracle();
    let sao = suggest_sao(&instance.hypergraph, args.sao_strategy)?;

    let start = Instant::now();
    let (tuples, stats, _) = run_engine(&oracle, mode, &sao, false)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(BenchRow {
        family: instance.family,
        param,
        mode,
        d: instance.d,
        n: instance.n,
        input_boxes: oracle.len(),
        stats,
        tuples: tuples.len(),
        wall_ms,
    })
}

/// Slots the sweep value into the family's size parameter.
fn bench_instance(
    family: &str,
    n: Option<usize>,
    w: Option<usize>,
    param: u64,
) -> anyhow::Result<BcpInstance> {
    match family {
        "parity_chain" | "fig3_triangle" | "fig5_triangle" => {
            let d = u8::try_from(param).map_err(|_| anyhow!("sweep width {param} out of range"))?;
            build_instance(family, n, Some(d), None, w)
        }
        _ => build_instance(family, n, None, Some(param), w),
    }
}

// --- verify -----------------------------------------------------------------------

fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<ExitCode> {
    let file = BoxFile::read(&args.boxes)?;
    let (d, n) = (file.d, file.attrs.len());
    let sao = parse_sao(args.sao.as_deref(), &file.attrs)?;
    let mode = effective_mode(args.mode, n);
    let oracle = MaterializedOracle::new(d, n, file.boxes.iter().cloned());

    let (tuples, _, trace) = run_engine(&oracle, mode, &sao, true)?;
    let mut got: Vec<Vec<u64>> = tuples.iter().map(unit_values).collect();
    got.sort_unstable();
    let mut failed = false;

    let report = validate_trace(&trace);
    if report.passed() {
        println!("trace: clean ({} events)", report.checked_events);
    } else {
        failed = true;
        println!("trace: {} violations", report.violations.len());
        for v in report.violations.iter().take(10) {
            eprintln!("  {v}");
        }
    }

    let bits = u32::from(d) * n as u32;
    if bits <= 24 || args.force {
        let truth = brute_force_bcp(&file.boxes, n, d, args.force)?;
        let want: Vec<Vec<u64>> = truth.uncovered_points.iter().map(unit_values).collect();
        if got == want {
            println!("oracle: match ({} tuples)", got.len());
        } else {
            failed = true;
            println!("oracle: MISMATCH (engine {} tuples, oracle {})", got.len(), want.len());
            report_diff(&got, &want);
        }
    } else {
        println!("oracle: skipped (d*n = {bits} exceeds the 24-bit guard; pass --force)");
    }

    if let Some(path) = &args.expected {
        let want = read_tuple_file(path, n, d)?;
        if got == want {
            println!("expected: match ({} tuples)", got.len());
        } else {
            failed = true;
            println!("expected: MISMATCH (engine {} tuples, file {})", got.len(), want.len());
            report_diff(&got, &want);
        }
    }

    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

/// Prints a few tuples on each side of a mismatch.
fn report_diff(got: &[Vec<u64>], want: &[Vec<u64>]) {
    let gs: std::collections::BTreeSet<&Vec<u64>> = got.iter().collect();
    let ws: std::collections::BTreeSet<&Vec<u64>> = want.iter().collect();
    for t in gs.difference(&ws).take(5) {
        eprintln!("  extra:   {}", join_values(t));
    }
    for t in ws.difference(&gs).take(5) {
        eprintln!("  missing: {}", join_values(t));
    }
}

/// Reads a tuple-per-line file of comma-joined values, sorted.
fn read_tuple_file(path: &Path, n: usize, d: u8) -> anyhow::Result<Vec<Vec<u64>>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<u64> = line
            .split(',')
            .map(|v| v.trim().parse().with_context(|| format!("line {}: bad value `{v}`", lineno + 1)))
            .collect::<anyhow::Result<_>>()?;
        if row.len() != n {
            bail!("line {}: {} values, expected {n}", lineno + 1, row.len());
        }
        if let Some(v) = row.iter().find(|&&v| v >> d != 0) {
            bail!("line {}: value {v} outside the {d}-bit domain", lineno + 1);
        }
        rows.push(row);
    }
    rows.sort_unstable();
    Ok(rows)
}

// --- shared plumbing --------------------------------------------------------------

/// Runs the requested mode; load-balanced modes route through their module.
fn run_engine(
    oracle: &MaterializedOracle,
    mode: EngineMode,
    sao: &Sao,
    record_trace: bool,
) -> boxcover::Result<(Vec<DyadicBox>, RunStats, Vec<TraceEvent>)> {
    if mode.is_lb() {
        tetris_lb_run(oracle, mode, sao, record_trace)
    } else {
        tetris_run(oracle, mode, sao, record_trace)
    }
}

/// Load-balanced modes need at least three attributes; below that the
/// dimension map is the identity, so fall back with a warning.
fn effective_mode(mode: EngineMode, n: usize) -> EngineMode {
    if !mode.is_lb() || n >= 3 {
        return mode;
    }
    let plain = match mode {
        EngineMode::PreloadedLb => EngineMode::Preloaded,
        EngineMode::ReloadedLb => EngineMode::Reloaded,
        plain => plain,
    };
    eprintln!("warning: {mode} needs n >= 3 (got {n}); falling back to {plain}");
    plain
}

/// Resolves `--sao a,b,c` attribute names to an order over indices.
fn parse_sao(names: Option<&str>, attrs: &[String]) -> anyhow::Result<Sao> {
    let Some(names) = names else {
        return Ok(Sao::identity(attrs.len()));
    };
    let mut order = Vec::new();
    for name in names.split(',') {
        let name = name.trim();
        let k = attrs.iter().position(|a| a == name).ok_or_else(|| {
            anyhow!("unknown attribute `{name}` (file has: {})", attrs.join(", "))
        })?;
        order.push(k);
    }
    Ok(Sao::new(order)?)
}

/// The values of an output tuple; the engine only reports unit boxes.
fn unit_values(t: &DyadicBox) -> Vec<u64> {
    t.values().expect("engine outputs are unit boxes")
}

fn join_values(row: &[u64]) -> String {
    row.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// Appends sorted `v1,...,vn` lines for raw-domain tuples.
fn push_raw_tuples(tuples: &[DyadicBox], out: &mut String) {
    let mut rows: Vec<Vec<u64>> = tuples.iter().map(unit_values).collect();
    rows.sort_unstable();
    for row in &rows {
        out.push_str(&join_values(row));
        out.push('\n');
    }
}

/// Appends sorted dictionary-decoded tuple lines for a join's output.
fn push_decoded_tuples(instance: &JoinInstance, tuples: &[DyadicBox], out: &mut String) {
    let mut keyed: Vec<(Vec<u64>, &DyadicBox)> =
        tuples.iter().map(|t| (unit_values(t), t)).collect();
    keyed.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    for (_, t) in &keyed {
        out.push_str(&instance.decode_tuple(t).join(","));
        out.push('\n');
    }
}

/// Writes to the path, or stdout when no path was given.
fn emit(dest: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match dest {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

/// Writes the counter record as JSON to the path, or to stderr.
fn emit_stats(dest: Option<&Path>, record: &StatsRecord) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(record)?;
    text.push('\n');
    match dest {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => eprint!("{text}"),
    }
    Ok(())
}

/// Writes a recorded run as one JSON event per line.
fn write_trace(path: &Path, trace: &[TraceEvent]) -> anyhow::Result<()> {
    let mut text = String::new();
    for event in trace {
        text.push_str(&serde_json::to_string(event)?);
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

// --- tests ------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn attrs(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn sao_names_resolve_to_attribute_positions() {
        let attrs = attrs(&["A", "B", "C"]);
        let sao = parse_sao(Some("C, A ,B"), &attrs).unwrap();
        assert_eq!(sao.order(), &[2, 0, 1]);
        assert_eq!(parse_sao(None, &attrs).unwrap().order(), &[0, 1, 2]);

        let err = parse_sao(Some("A,Q"), &attrs).unwrap_err();
        assert!(err.to_string().contains('Q'));
        // Repeats survive name lookup but not order validation.
        assert!(parse_sao(Some("A,A,B"), &attrs).is_err());
    }

    #[test]
    fn tuple_lines_are_sorted_and_newline_terminated() {
        let tuples = [
            DyadicBox::unit_from_values(2, &[3, 0]),
            DyadicBox::unit_from_values(2, &[0, 2]),
            DyadicBox::unit_from_values(2, &[0, 1]),
        ];
        let mut out = String::new();
        push_raw_tuples(&tuples, &mut out);
        assert_eq!(out, "0,1\n0,2\n3,0\n");
    }

    #[test]
    fn families_insist_on_their_parameters() {
        assert!(build_instance("parity_chain", Some(3), Some(2), None, None).is_ok());
        let err = build_instance("parity_chain", Some(3), None, None, None).unwrap_err();
        assert!(err.to_string().contains("--d"));
        let err = build_instance("nope", None, None, None, None).unwrap_err();
        assert!(err.to_string().contains("unknown family"));
    }

    #[test]
    fn lb_modes_fall_back_below_three_attributes() {
        assert_eq!(effective_mode(EngineMode::ReloadedLb, 2), EngineMode::Reloaded);
        assert_eq!(effective_mode(EngineMode::PreloadedLb, 1), EngineMode::Preloaded);
        assert_eq!(effective_mode(EngineMode::ReloadedLb, 3), EngineMode::ReloadedLb);
        assert_eq!(effective_mode(EngineMode::Reloaded, 1), EngineMode::Reloaded);
    }

    #[test]
    fn expected_tuple_files_parse_and_validate() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("want.txt");
        fs::write(&path, "3,1\n\n0, 2\n").unwrap();
        assert_eq!(read_tuple_file(&path, 2, 2).unwrap(), vec![vec![0, 2], vec![3, 1]]);

        fs::write(&path, "1,2,3\n").unwrap();
        assert!(read_tuple_file(&path, 2, 2).is_err());
        fs::write(&path, "4,1\n").unwrap();
        assert!(read_tuple_file(&path, 2, 2).unwrap_err().to_string().contains("domain"));
    }
}
