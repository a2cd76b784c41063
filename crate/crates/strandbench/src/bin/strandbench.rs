//! strandbench command-line interface.
//!
//! Subcommands cover the workbench end to end: oligo library design,
//! Hamiltonian-path search by strand assembly, Wang-tile self-assembly,
//! circuit compilation to displacement gates, stochastic simulation of a
//! compiled circuit, and wet-lab feasibility estimates.
//!
//! Every run is reproducible: stochastic stages derive from `--seed`, and
//! two runs with the same arguments and seed write identical bytes. Output
//! starts with a metadata header (tool version, seed, SHA-256 digest of
//! the effective input) in both text and JSON formats.
//!
//! Exit codes: 0 success, 1 usage error, 2 malformed input file,
//! 3 well-formed input with no solution. Set `STRANDBENCH_NO_COLOR` to
//! disable styled diagnostics on stderr.

use std::fmt::Write as _;
use std::fs;
use std::io::{IsTerminal, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use strandbench::adleman::{
    assemble, encode_graph, select_hamiltonian, AssemblyMode, DiGraph, EncodeError, Encoding,
    NodeId, DEFAULT_NODE_LEN,
};
use strandbench::circuit::{compile, parse, CompileOptions, CompiledCircuit};
use strandbench::dsd::SimParams;
use strandbench::feasibility::{comparison_report, report, TspQuery};
use strandbench::seq::{design_library, DesignConstraints, DesignError, Sequence};
use strandbench::tiling::{
    assemble_generic, readout, run_xor, xor_seed, xor_tile_set, AssemblyGrid, ReadoutRole, Tag,
    TileSet, WangTile,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "strandbench",
    version,
    about = "Desk-scale DNA computing workbench",
    disable_help_subcommand = true
)]
struct Cli {
    /// Seed for every stochastic stage
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report to a file instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Design a library of mutually distinguishable oligos
    Design(DesignArgs),
    /// Solve a Hamiltonian-path instance with the strand protocol
    Adleman(AdlemanArgs),
    /// Run Wang-tile self-assembly (built-in XOR set or a custom one)
    Tile(TileArgs),
    /// Compile a logic circuit to displacement gate complexes
    DsdCompile(DsdCompileArgs),
    /// Simulate a compiled circuit on one input assignment
    DsdSim(DsdSimArgs),
    /// Estimate the physical cost of brute-force path search
    Feasibility(FeasibilityArgs),
}

#[derive(Args)]
struct DesignArgs {
    /// Oligo length in bases
    #[arg(long, default_value_t = DEFAULT_NODE_LEN)]
    length: usize,

    /// Number of sequences to design
    #[arg(long, default_value_t = 8)]
    count: usize,

    /// Minimum GC fraction
    #[arg(long)]
    gc_min: Option<f64>,

    /// Maximum GC fraction
    #[arg(long)]
    gc_max: Option<f64>,

    /// Minimum melting temperature (Wallace rule, C)
    #[arg(long)]
    tm_min: Option<f64>,

    /// Maximum melting temperature (Wallace rule, C)
    #[arg(long)]
    tm_max: Option<f64>,

    /// Minimum pairwise Hamming distance (also against complements)
    #[arg(long)]
    min_hamming: Option<usize>,

    /// Longest allowed single-base run
    #[arg(long)]
    max_homopolymer: Option<usize>,
}

#[derive(Args)]
struct AdlemanArgs {
    /// Graph JSON: {"nodes":[0,1,...],"edges":[[0,1],...]}
    #[arg(long)]
    input: PathBuf,

    /// Start node (default: smallest node id)
    #[arg(long)]
    start: Option<NodeId>,

    /// End node (default: largest node id)
    #[arg(long)]
    end: Option<NodeId>,

    /// Walk assembly strategy
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    mode: Mode,

    /// Stochastic mode: number of walks to sample
    #[arg(long, default_value_t = 10_000)]
    samples: u64,

    /// Exhaustive mode: walk length cap in nodes (default: node count)
    #[arg(long)]
    max_nodes: Option<usize>,

    /// Bases per node oligo (even, at least 2)
    #[arg(long, default_value_t = DEFAULT_NODE_LEN)]
    node_length: usize,

    /// Minimum pairwise Hamming distance for node oligos
    /// (default: a quarter of the oligo length)
    #[arg(long)]
    min_hamming: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exhaustive,
    Stochastic,
}

#[derive(Args)]
struct TileArgs {
    /// Input bits for the built-in cumulative-XOR set, e.g. 10110
    #[arg(long)]
    x: Option<String>,

    /// Initial parity bit for the XOR run
    #[arg(long, default_value_t = 0)]
    y0: u8,

    /// Grow the XOR row by seeded generic assembly instead of direct
    /// construction
    #[arg(long)]
    assemble: bool,

    /// Custom tile set JSON ({"palette":[...],"tiles":[...]})
    #[arg(long)]
    tileset: Option<PathBuf>,

    /// Seed placements JSON for --tileset:
    /// [{"row":0,"col":0,"tile":{...}}, ...]
    #[arg(long)]
    seed_grid: Option<PathBuf>,

    /// Attachment budget for generic assembly
    #[arg(long, default_value_t = 10_000)]
    steps: u64,
}

#[derive(Args)]
struct DsdCompileArgs {
    /// Circuit source file
    #[arg(long)]
    input: PathBuf,

    /// Compile wide ANDs as single multi-input complexes
    #[arg(long)]
    multi_input: bool,

    /// Split every wire into value rails
    #[arg(long)]
    dual_rail: bool,

    /// What to report
    #[arg(long, value_enum, default_value_t = Emit::Full)]
    emit: Emit,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Full,
    Stats,
}

#[derive(Args)]
struct DsdSimArgs {
    /// Compiled circuit JSON (from dsd-compile --format json)
    #[arg(long)]
    input: PathBuf,

    /// Input assignment, one bit per circuit input: "1,0,1" or "101"
    #[arg(long)]
    assign: String,

    /// Reaction event budget
    #[arg(long, default_value_t = 10_000)]
    max_events: u64,

    /// Rate of spurious displacement by waste strands
    #[arg(long, default_value_t = 0.0)]
    leak_rate: f64,

    /// Write the reaction trace to a file as JSON lines
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct FeasibilityArgs {
    /// Nodes in the path-search instance
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,

    /// Bases per path segment
    #[arg(long, default_value_t = 150)]
    seg_len: u64,

    /// Redundant copies of each candidate strand
    #[arg(long, default_value_t = 100)]
    copies: u64,

    /// Grams per mole per base pair
    #[arg(long, default_value_t = 660.0)]
    mass_per_bp: f64,

    /// Include the technology comparison table
    #[arg(long)]
    compare: bool,
}

enum AppError {
    Usage(String),
    Malformed(String),
    NoSolution(String),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Malformed(_) => 2,
            AppError::NoSolution(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Usage(m) | AppError::Malformed(m) | AppError::NoSolution(m) => m,
        }
    }
}

/// One finished report: the digest source, the JSON payload fields, and
/// the text body. `failure` still exits non-zero after the report is
/// written (a valid run that found no solution).
struct Report {
    digest_input: Vec<u8>,
    payload: serde_json::Map<String, Value>,
    text: String,
    failure: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{} {}", styled("error:", "31"), err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn styled(s: &str, ansi: &str) -> String {
    let plain =
        std::env::var_os("STRANDBENCH_NO_COLOR").is_some() || !std::io::stderr().is_terminal();
    if plain {
        s.to_string()
    } else {
        format!("\x1b[{ansi}m{s}\x1b[0m")
    }
}

fn run(cli: &Cli) -> Result<(), AppError> {
    let report = match &cli.command {
        Command::Design(args) => cmd_design(cli, args)?,
        Command::Adleman(args) => cmd_adleman(cli, args)?,
        Command::Tile(args) => cmd_tile(cli, args)?,
        Command::DsdCompile(args) => cmd_dsd_compile(args)?,
        Command::DsdSim(args) => cmd_dsd_sim(cli, args)?,
        Command::Feasibility(args) => cmd_feasibility(args)?,
    };
    emit(cli, &report)?;
    match report.failure {
        Some(msg) => Err(AppError::NoSolution(msg)),
        None => Ok(()),
    }
}

fn digest_hex(bytes: &[u8]) -> String {
    format!("sha256:{:x}", Sha256::digest(bytes))
}

fn emit(cli: &Cli, report: &Report) -> Result<(), AppError> {
    let input_digest = digest_hex(&report.digest_input);
    let rendered = match cli.format {
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert(
                "meta".to_string(),
                json!({
                    "tool_version": VERSION,
                    "seed": cli.seed,
                    "input_digest": input_digest,
                }),
            );
            for (k, v) in &report.payload {
                obj.insert(k.clone(), v.clone());
            }
            let mut s =
                serde_json::to_string_pretty(&Value::Object(obj)).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => format!(
            "# strandbench v{VERSION} seed={} input={}\n{}",
            cli.seed, input_digest, report.text
        ),
    };
    match &cli.output {
        Some(path) => fs::write(path, rendered)
            .map_err(|e| AppError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(rendered.as_bytes())
            .map_err(|e| AppError::Usage(format!("cannot write to stdout: {e}"))),
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, AppError> {
    fs::read(path).map_err(|e| AppError::Usage(format!("cannot read {}: {e}", path.display())))
}

// ---------------------------------------------------------------- design

fn cmd_design(cli: &Cli, args: &DesignArgs) -> Result<Report, AppError> {
    if args.count == 0 {
        return Err(AppError::Usage("--count must be at least 1".to_string()));
    }
    let mut c = DesignConstraints::any(args.length);
    if let Some(v) = args.gc_min {
        c.gc_fraction.0 = v;
    }
    if let Some(v) = args.gc_max {
        c.gc_fraction.1 = v;
    }
    if let Some(v) = args.tm_min {
        c.tm_window.0 = v;
    }
    if let Some(v) = args.tm_max {
        c.tm_window.1 = v;
    }
    if let Some(v) = args.min_hamming {
        c.min_hamming = v;
    }
    if let Some(v) = args.max_homopolymer {
        c.max_homopolymer = v;
    }

    let digest_input = format!(
        "design length={} count={} gc={}..{} tm={}..{} hamming={} homopolymer={}",
        c.length,
        args.count,
        c.gc_fraction.0,
        c.gc_fraction.1,
        c.tm_window.0,
        c.tm_window.1,
        c.min_hamming,
        c.max_homopolymer
    )
    .into_bytes();

    let library = design_library(&c, args.count, cli.seed)
        .map_err(|e: DesignError| AppError::NoSolution(e.to_string()))?;

    let mut payload = serde_json::Map::new();
    payload.insert(
        "sequences".to_string(),
        serde_json::to_value(&library).expect("sequences serialize"),
    );
    let mut text = String::new();
    for seq in &library {
        let _ = writeln!(
            text,
            "{seq}  gc={:.2} tm={}",
            seq.gc_fraction(),
            seq.melting_temp()
        );
    }
    Ok(Report {
        digest_input,
        payload,
        text,
        failure: None,
    })
}

// --------------------------------------------------------------- adleman

fn render_walk(walk: &[NodeId]) -> String {
    walk.iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(" -> ")
}

fn path_sequence(walk: &[NodeId], encoding: &Encoding) -> Sequence {
    let mut seq = Sequence::new(Vec::new());
    for node in walk {
        seq = seq.concat(
            encoding
                .node_seq(*node)
                .expect("encoding covers every graph node"),
        );
    }
    seq
}

fn cmd_adleman(cli: &Cli, args: &AdlemanArgs) -> Result<Report, AppError> {
    let bytes = read_input(&args.input)?;
    let graph: DiGraph = serde_json::from_slice(&bytes)
        .map_err(|e| AppError::Malformed(format!("{}: {e}", args.input.display())))?;

    let start = args
        .start
        .or_else(|| graph.nodes().iter().min().copied())
        .expect("graphs are non-empty");
    let end = args
        .end
        .or_else(|| graph.nodes().iter().max().copied())
        .expect("graphs are non-empty");
    for (label, node) in [("start", start), ("end", end)] {
        if !graph.contains_node(node) {
            return Err(AppError::Usage(format!(
                "{label} node {node} is not in the graph"
            )));
        }
    }

    let mut constraints = DesignConstraints::any(args.node_length);
    constraints.min_hamming = args
        .min_hamming
        .unwrap_or_else(|| (args.node_length / 4).max(1));
    let encoding = encode_graph(&graph, &constraints, cli.seed).map_err(|e| match e {
        EncodeError::Design(d) => AppError::NoSolution(d.to_string()),
        other => AppError::Usage(other.to_string()),
    })?;

    let mode = match args.mode {
        Mode::Exhaustive => AssemblyMode::Exhaustive {
            max_nodes: args.max_nodes.unwrap_or_else(|| graph.node_count()),
        },
        Mode::Stochastic => AssemblyMode::stochastic(args.samples, cli.seed),
    };
    let pool = assemble(&graph, &mode);
    let paths = select_hamiltonian(&pool, &graph, start, end);

    let strands: Vec<Value> = paths
        .iter()
        .map(|path| {
            let seq = path_sequence(path, &encoding);
            json!({
                "path": path,
                "count": pool.count(path),
                "length": seq.len(),
                "sequence": seq.to_string(),
            })
        })
        .collect();

    let mut payload = serde_json::Map::new();
    payload.insert(
        "graph".to_string(),
        json!({"nodes": graph.node_count(), "edges": graph.edge_count()}),
    );
    payload.insert(
        "mode".to_string(),
        Value::String(
            match args.mode {
                Mode::Exhaustive => "exhaustive",
                Mode::Stochastic => "stochastic",
            }
            .to_string(),
        ),
    );
    payload.insert(
        "walks".to_string(),
        json!({"distinct": pool.len(), "total": pool.total()}),
    );
    payload.insert("start".to_string(), json!(start));
    payload.insert("end".to_string(), json!(end));
    payload.insert(
        "paths".to_string(),
        serde_json::to_value(&paths).expect("paths serialize"),
    );
    payload.insert("strands".to_string(), Value::Array(strands));

    let mut text = format!(
        "graph: {} nodes, {} edges\nwalks: {} distinct, {} total\n\
         hamiltonian paths from {start} to {end}: {}\n",
        graph.node_count(),
        graph.edge_count(),
        pool.len(),
        pool.total(),
        paths.len(),
    );
    for path in &paths {
        let seq = path_sequence(path, &encoding);
        let _ = writeln!(text, "  {}  ({} bases)", render_walk(path), seq.len());
        let _ = writeln!(text, "  {seq}");
    }

    let failure = paths
        .is_empty()
        .then(|| format!("no hamiltonian path from {start} to {end} survived selection"));
    Ok(Report {
        digest_input: bytes,
        payload,
        text,
        failure,
    })
}

// ------------------------------------------------------------------ tile

fn parse_bits(s: &str) -> Result<Vec<bool>, AppError> {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(AppError::Usage(format!(
                "bit strings use only 0 and 1, found {other:?}"
            ))),
        })
        .collect()
}

fn bits_text(bits: &[bool]) -> String {
    bits.iter()
        .map(|&b| if b { "1" } else { "0" })
        .collect::<Vec<_>>()
        .join(" ")
}

fn grid_json(grid: &AssemblyGrid) -> Value {
    Value::Array(
        grid.iter()
            .map(|((row, col), tile)| json!({"row": row, "col": col, "tile": tile}))
            .collect(),
    )
}

fn tile_symbol(tile: &WangTile) -> &'static str {
    match tile.tag {
        Tag::Root => "R ",
        Tag::Input(0) => "i0",
        Tag::Input(_) => "i1",
        Tag::Output(0) => "o0",
        Tag::Output(_) => "o1",
        Tag::None => "..",
    }
}

fn grid_text(grid: &AssemblyGrid) -> String {
    let cells: Vec<((i64, i64), &WangTile)> = grid.iter().collect();
    if cells.is_empty() {
        return "grid: empty\n".to_string();
    }
    let rows: Vec<i64> = cells.iter().map(|((r, _), _)| *r).collect();
    let cols: Vec<i64> = cells.iter().map(|((_, c), _)| *c).collect();
    let (rmin, rmax) = (*rows.iter().min().unwrap(), *rows.iter().max().unwrap());
    let (cmin, cmax) = (*cols.iter().min().unwrap(), *cols.iter().max().unwrap());
    let mut text = format!("grid: {} tiles\n", grid.len());
    for row in (rmin..=rmax).rev() {
        let mut line = format!("  row {row:>3} |");
        for col in cmin..=cmax {
            match grid.get((row, col)) {
                Some(tile) => {
                    let _ = write!(line, " {}", tile_symbol(tile));
                }
                None => line.push_str("   "),
            }
        }
        text.push_str(line.trim_end());
        text.push('\n');
    }
    text
}

fn cmd_tile(cli: &Cli, args: &TileArgs) -> Result<Report, AppError> {
    match (&args.x, &args.tileset) {
        (Some(_), Some(_)) => Err(AppError::Usage(
            "--x and --tileset are mutually exclusive".to_string(),
        )),
        (Some(x), None) => tile_xor(cli, args, x),
        (None, Some(path)) => tile_generic(cli, args, path),
        (None, None) => Err(AppError::Usage(
            "pass --x BITS for the built-in XOR set, or --tileset FILE with --seed-grid FILE"
                .to_string(),
        )),
    }
}

fn tile_xor(cli: &Cli, args: &TileArgs, x: &str) -> Result<Report, AppError> {
    if args.y0 > 1 {
        return Err(AppError::Usage("--y0 must be 0 or 1".to_string()));
    }
    let bits = parse_bits(x)?;
    if bits.is_empty() {
        return Err(AppError::Usage("--x needs at least one bit".to_string()));
    }
    let y0 = args.y0 == 1;
    let digest_input = format!(
        "tile x={} y0={} assemble={}",
        x.trim(),
        args.y0,
        args.assemble
    )
    .into_bytes();

    let (y, grid, assembly) = if args.assemble {
        let run = assemble_generic(&xor_tile_set(), &xor_seed(&bits, y0), args.steps, cli.seed)
            .map_err(|e| AppError::Usage(e.to_string()))?;
        let y = readout(&run.grid, ReadoutRole::Output)
            .map_err(|e| AppError::NoSolution(e.to_string()))?;
        (y, run.grid, Some((run.attachments, run.stuck)))
    } else {
        let (y, grid) = run_xor(&bits, y0);
        (y, grid, None)
    };

    let mut payload = serde_json::Map::new();
    payload.insert("x".to_string(), json!(bits));
    payload.insert("y0".to_string(), json!(y0));
    payload.insert("y".to_string(), json!(y));
    if let Some((attachments, stuck)) = assembly {
        payload.insert("attachments".to_string(), json!(attachments));
        payload.insert("stuck".to_string(), json!(stuck));
    }
    payload.insert("grid".to_string(), grid_json(&grid));

    let mut text = format!(
        "x  = {}\ny0 = {}\ny  = {}\n",
        bits_text(&bits),
        args.y0,
        bits_text(&y)
    );
    if let Some((attachments, stuck)) = assembly {
        let _ = writeln!(text, "attachments: {attachments} (stuck: {stuck})");
    }
    text.push_str(&grid_text(&grid));
    Ok(Report {
        digest_input,
        payload,
        text,
        failure: None,
    })
}

#[derive(serde::Serialize, serde::Deserialize)]
struct Placement {
    row: i64,
    col: i64,
    tile: WangTile,
}

fn tile_generic(cli: &Cli, args: &TileArgs, tileset_path: &Path) -> Result<Report, AppError> {
    let Some(seed_path) = &args.seed_grid else {
        return Err(AppError::Usage(
            "--tileset requires --seed-grid".to_string(),
        ));
    };
    let tileset_bytes = read_input(tileset_path)?;
    let seed_bytes = read_input(seed_path)?;
    let tileset: TileSet = serde_json::from_slice(&tileset_bytes)
        .map_err(|e| AppError::Malformed(format!("{}: {e}", tileset_path.display())))?;
    tileset
        .validate()
        .map_err(|e| AppError::Malformed(format!("{}: {e}", tileset_path.display())))?;
    let placements: Vec<Placement> = serde_json::from_slice(&seed_bytes)
        .map_err(|e| AppError::Malformed(format!("{}: {e}", seed_path.display())))?;
    let seed_placements: Vec<((i64, i64), WangTile)> = placements
        .into_iter()
        .map(|p| ((p.row, p.col), p.tile))
        .collect();

    let run = assemble_generic(&tileset, &seed_placements, args.steps, cli.seed)
        .map_err(|e| AppError::Malformed(format!("{}: {e}", seed_path.display())))?;

    let mut digest_input = tileset_bytes;
    digest_input.push(b'\n');
    digest_input.extend_from_slice(&seed_bytes);

    let mut payload = serde_json::Map::new();
    payload.insert("attachments".to_string(), json!(run.attachments));
    payload.insert("stuck".to_string(), json!(run.stuck));
    let mut text = format!("attachments: {} (stuck: {})\n", run.attachments, run.stuck);
    for (key, role) in [
        ("input", ReadoutRole::Input),
        ("output", ReadoutRole::Output),
    ] {
        if let Ok(bits) = readout(&run.grid, role) {
            payload.insert(key.to_string(), json!(bits));
            let _ = writeln!(text, "{key} = {}", bits_text(&bits));
        }
    }
    payload.insert("grid".to_string(), grid_json(&run.grid));
    text.push_str(&grid_text(&run.grid));
    Ok(Report {
        digest_input,
        payload,
        text,
        failure: None,
    })
}

// ----------------------------------------------------------- dsd-compile

fn stats_lines(compiled: &CompiledCircuit) -> String {
    // stable key=value block, alphabetical
    format!(
        "complex_count={}\ncomplex_species={}\ndepth={}\ndomain_count={}\n\
         dual_rail={}\ngates={}\nmulti_input={}\nstep_bound={}\nstrand_species={}\n",
        compiled.stats.complex_count,
        compiled.stats.complex_species,
        compiled.stats.depth,
        compiled.stats.domain_count,
        compiled.dual_rail,
        compiled.stats.gates,
        compiled.multi_input,
        compiled.step_bound,
        compiled.stats.strand_species,
    )
}

fn cmd_dsd_compile(args: &DsdCompileArgs) -> Result<Report, AppError> {
    let bytes = read_input(&args.input)?;
    let source = String::from_utf8(bytes.clone())
        .map_err(|_| AppError::Malformed(format!("{}: not UTF-8", args.input.display())))?;
    let circuit = parse(&source)
        .map_err(|e| AppError::Malformed(format!("{}: {e}", args.input.display())))?;
    let options = CompileOptions {
        multi_input: args.multi_input,
        dual_rail: args.dual_rail,
    };
    let compiled = compile(&circuit, &options)
        .map_err(|e| AppError::Malformed(format!("{}: {e}", args.input.display())))?;

    for warning in &compiled.warnings {
        eprintln!("{} {warning}", styled("warning:", "33"));
    }

    let mut payload = serde_json::Map::new();
    let mut text = stats_lines(&compiled);
    match args.emit {
        Emit::Stats => {
            payload.insert(
                "stats".to_string(),
                serde_json::to_value(compiled.stats).expect("stats serialize"),
            );
            payload.insert("dual_rail".to_string(), json!(compiled.dual_rail));
            payload.insert("multi_input".to_string(), json!(compiled.multi_input));
            payload.insert("step_bound".to_string(), json!(compiled.step_bound));
        }
        Emit::Full => {
            payload.insert(
                "compiled".to_string(),
                serde_json::to_value(&compiled).expect("compiled circuits serialize"),
            );
            for warning in &compiled.warnings {
                let _ = writeln!(text, "warning: {warning}");
            }
            text.push_str("complexes:\n");
            for batch in &compiled.complexes {
                let _ = writeln!(text, "  {} x {}", batch.count, batch.complex.name);
            }
            text.push_str("injections:\n");
            for (input, plan) in circuit.inputs.iter().zip(&compiled.injections) {
                let mut line = format!(
                    "  {input}: true -> {} x{}",
                    plan.when_true.wire, plan.when_true.copies
                );
                if let Some(low) = &plan.when_false {
                    let _ = write!(line, ", false -> {} x{}", low.wire, low.copies);
                }
                text.push_str(&line);
                text.push('\n');
            }
            text.push_str("reporters:\n");
            for (output, plan) in circuit.outputs.iter().zip(&compiled.reporters) {
                let mut line = format!("  {output}: {}", plan.high);
                if let Some(low) = &plan.low {
                    let _ = write!(line, " / {low}");
                }
                text.push_str(&line);
                text.push('\n');
            }
        }
    }
    Ok(Report {
        digest_input: bytes,
        payload,
        text,
        failure: None,
    })
}

// --------------------------------------------------------------- dsd-sim

fn cmd_dsd_sim(cli: &Cli, args: &DsdSimArgs) -> Result<Report, AppError> {
    let bytes = read_input(&args.input)?;
    let value: Value = serde_json::from_slice(&bytes)
        .map_err(|e| AppError::Malformed(format!("{}: {e}", args.input.display())))?;
    let compiled_value = match value.get("compiled") {
        Some(inner) => inner.clone(),
        None => value,
    };
    let compiled: CompiledCircuit = serde_json::from_value(compiled_value)
        .map_err(|e| AppError::Malformed(format!("{}: {e}", args.input.display())))?;

    let assignment = parse_bits(&args.assign)?;
    let params = SimParams {
        seed: cli.seed,
        max_events: args.max_events,
        leak_rate: args.leak_rate,
    };
    let outcome = compiled
        .evaluate(&assignment, &params)
        .map_err(|e| AppError::Usage(e.to_string()))?;

    if let Some(path) = &args.trace {
        let mut lines = String::new();
        for event in &outcome.report.trace {
            lines.push_str(&serde_json::to_string(event).expect("events serialize"));
            lines.push('\n');
        }
        fs::write(path, lines)
            .map_err(|e| AppError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }

    let state = &outcome.report.state;
    let free: Vec<Value> = state
        .free_species()
        .map(|(s, n)| json!({"strand": s.to_string(), "count": n}))
        .collect();
    let waste: Vec<Value> = state
        .waste_species()
        .map(|(s, n)| json!({"strand": s.to_string(), "count": n}))
        .collect();

    let mut payload = serde_json::Map::new();
    payload.insert("assignment".to_string(), json!(assignment));
    payload.insert(
        "outputs".to_string(),
        Value::Array(
            compiled
                .source
                .outputs
                .iter()
                .zip(&outcome.outputs)
                .map(|(name, &bit)| json!({"wire": name, "value": bit}))
                .collect(),
        ),
    );
    payload.insert("consistent".to_string(), json!(outcome.consistent));
    payload.insert("quiescent".to_string(), json!(outcome.report.quiescent));
    payload.insert("events".to_string(), json!(outcome.report.trace.len()));
    payload.insert("free".to_string(), Value::Array(free));
    payload.insert("waste".to_string(), Value::Array(waste));
    payload.insert(
        "exposed_toeholds".to_string(),
        serde_json::to_value(state.exposed_toehold_census()).expect("census serializes"),
    );

    let mut text = format!("assignment: {}\n", bits_text(&assignment));
    text.push_str("outputs:\n");
    for (name, &bit) in compiled.source.outputs.iter().zip(&outcome.outputs) {
        let _ = writeln!(text, "  {name} = {}", u8::from(bit));
    }
    let _ = writeln!(
        text,
        "consistent: {}\nquiescent: {} after {} events",
        outcome.consistent,
        outcome.report.quiescent,
        outcome.report.trace.len()
    );
    text.push_str("free:\n");
    for (strand, n) in state.free_species() {
        let _ = writeln!(text, "  {n} x {strand}");
    }
    text.push_str("waste:\n");
    for (strand, n) in state.waste_species() {
        let _ = writeln!(text, "  {n} x {strand}");
    }
    Ok(Report {
        digest_input: bytes,
        payload,
        text,
        failure: None,
    })
}

// ------------------------------------------------------------ feasibility

fn cmd_feasibility(args: &FeasibilityArgs) -> Result<Report, AppError> {
    let query = TspQuery {
        n: args.n,
        seg_len: args.seg_len,
        copies: args.copies,
        mass_per_bp: args.mass_per_bp,
    };
    let digest_input = format!(
        "feasibility n={} seg_len={} copies={} mass_per_bp={}",
        query.n, query.seg_len, query.copies, query.mass_per_bp
    )
    .into_bytes();
    let rep = report(&query);

    let mut payload = serde_json::Map::new();
    payload.insert(
        "report".to_string(),
        serde_json::to_value(&rep).expect("reports serialize"),
    );
    let mut text = format!(
        "paths = {}\nstrand_bp = {}\nmass_kg = {:e}\nstrands_required = {}\n\
         capacity_bound_bp = {}\n",
        rep.paths, rep.strand_bp, rep.mass_kg, rep.strands_required, rep.capacity_bound_bp
    );

    if args.compare {
        let table = comparison_report();
        payload.insert(
            "technologies".to_string(),
            serde_json::to_value(&table).expect("profiles serialize"),
        );
        text.push_str("technology comparison:\n");
        for profile in &table {
            let _ = writeln!(
                text,
                "  {:<8} nm3_per_bit={:e} ops_per_second={:e}..{:e} ops_per_joule={:e}",
                profile.name,
                profile.nm3_per_bit,
                profile.ops_per_second.0,
                profile.ops_per_second.1,
                profile.ops_per_joule
            );
        }
    }
    Ok(Report {
        digest_input,
        payload,
        text,
        failure: None,
    })
}
