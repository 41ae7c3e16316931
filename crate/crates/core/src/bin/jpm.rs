use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use jumbled::bench::{self, Generator};
use jumbled::grammar::{build_global_index, Slp};
use jumbled::graph::{all_queries, all_queries_with, ColoredGraph, TreeDecomp};
use jumbled::oracle::{graph_enum_oracle, string_oracle, tree_enum_oracle};
use jumbled::string_index::{build_minmax_naive, build_minmax_packed};
use jumbled::tree::{build_centroid_index, ColoredTree, TreeBuilder};
use jumbled::{BitSeq, ChunkTable, Error, IndexBody, IndexFile, IndexKind, MinMaxIndex, QuerySet};

const DEFAULT_SEED: u64 = 0x6a70_6d31;

#[derive(Parser)]
#[command(name = "jpm", version, about = "Build and query binary jumbled pattern indexes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    String,
    Tree,
    Grammar,
    Graph,
}

impl From<Kind> for IndexKind {
    fn from(k: Kind) -> IndexKind {
        match k {
            Kind::String => IndexKind::String,
            Kind::Tree => IndexKind::Tree,
            Kind::Grammar => IndexKind::Grammar,
            Kind::Graph => IndexKind::Graph,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Builder {
    Packed,
    Naive,
    Quadratic,
    MicroMacro,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build an index file from an input file.
    Build(BuildArgs),
    /// Answer whether pattern (i, j) appears; prints yes or no.
    Query { index: PathBuf, i: usize, j: usize },
    /// Print a node lying on some occurrence of (i, j), or none.
    Locate { index: PathBuf, i: usize, j: usize },
    /// Time the builders on generated inputs.
    Bench(BenchArgs),
    /// Brute-force answers for an input file.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct BuildArgs {
    kind: Kind,
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Width of the lookup table chunks, 1..=16.
    #[arg(long, default_value_t = ChunkTable::DEFAULT_CHUNK_BITS)]
    chunk_bits: usize,
    /// Strings: packed (default) or naive. Trees: micro-macro (default) or quadratic.
    #[arg(long, value_enum)]
    builder: Option<Builder>,
    /// Micro tree size cap for the micro-macro builder.
    #[arg(long)]
    micro_cap: Option<usize>,
    /// Block length for grammar indexes.
    #[arg(long)]
    block_len: Option<usize>,
    /// Trees only: store the centroid locator used by `locate`.
    #[arg(long)]
    with_locator: bool,
    /// Graphs only: tree decomposition in PACE `.td` format.
    #[arg(long)]
    td_file: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    kind: Kind,
    /// Input family, e.g. bernoulli:0.5, bst, random:64, ktree:3.
    #[arg(long = "gen")]
    generator: Option<String>,
    /// Comma-separated sizes; `2^k` is accepted.
    #[arg(long, value_delimiter = ',', value_parser = parse_size, default_value = "2^10,2^12,2^14")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = ChunkTable::DEFAULT_CHUNK_BITS)]
    chunk_bits: usize,
    /// Write rows as CSV to this path (`-` for stdout).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    kind: Kind,
    input: PathBuf,
    /// Answer one query instead of listing everything.
    #[arg(long, num_args = 2, value_names = ["I", "J"])]
    query: Option<Vec<usize>>,
}

fn parse_size(s: &str) -> Result<usize, String> {
    let v = match s.trim().strip_prefix("2^") {
        Some(k) => k
            .parse::<u32>()
            .ok()
            .and_then(|k| 1usize.checked_shl(k))
            .ok_or_else(|| format!("bad size {s:?}"))?,
        None => s.trim().parse().map_err(|_| format!("bad size {s:?}"))?,
    };
    if v == 0 {
        return Err("sizes must be positive".into());
    }
    Ok(v)
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = Result<(), Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Io(_) => 1,
        Error::Parse { .. } => 2,
        Error::Input(_) | Error::Validation(_) | Error::CapExceeded { .. } => 3,
        Error::Range { .. } | Error::Shape(_) => 4,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn parse_bits(text: &str) -> Result<BitSeq, Error> {
    let mut s = BitSeq::new();
    for (k, line) in text.lines().enumerate() {
        let part: BitSeq = line.parse().map_err(|e: Error| match e {
            Error::Input(msg) => Error::Parse { line: k + 1, msg },
            e => e,
        })?;
        s.extend_from(&part);
    }
    Ok(s)
}

fn read_bits(path: &Path) -> Result<BitSeq, Error> {
    let s = parse_bits(&read(path)?)?;
    if s.is_empty() {
        return Err(Error::Input("string input is empty".into()));
    }
    Ok(s)
}

fn build(a: BuildArgs) -> CmdResult {
    let kind = IndexKind::from(a.kind);
    let usage = |m: &str| Err(Failure::Usage(m.into()));
    let allowed: &[Builder] = match a.kind {
        Kind::String => &[Builder::Packed, Builder::Naive],
        Kind::Tree => &[Builder::MicroMacro, Builder::Quadratic],
        _ => &[],
    };
    if let Some(b) = a.builder {
        if !allowed.contains(&b) {
            return usage("--builder does not apply to this kind");
        }
    }
    if a.micro_cap.is_some() && (!matches!(a.kind, Kind::Tree) || a.builder == Some(Builder::Quadratic)) {
        return usage("--micro-cap needs the micro-macro tree builder");
    }
    if a.block_len.is_some() && !matches!(a.kind, Kind::Grammar) {
        return usage("--block-len applies to grammar indexes only");
    }
    if a.with_locator && !matches!(a.kind, Kind::Tree) {
        return usage("--with-locator applies to tree indexes only");
    }
    if a.td_file.is_some() && !matches!(a.kind, Kind::Graph) {
        return usage("--td-file applies to graph indexes only");
    }
    let table = ChunkTable::new(a.chunk_bits)?;
    let file = match a.kind {
        Kind::String => {
            let s = read_bits(&a.input)?;
            let m = match a.builder {
                Some(Builder::Naive) => build_minmax_naive(&s)?,
                _ => build_minmax_packed(&s, &table)?,
            };
            IndexFile::new(kind, s.len(), IndexBody::MinMax(m))?
        }
        Kind::Tree => {
            let t = ColoredTree::parse(&read(&a.input)?)?;
            let builder = match a.builder {
                Some(Builder::Quadratic) => TreeBuilder::Quadratic,
                _ => TreeBuilder::MicroMacro(a.micro_cap),
            };
            let body = if a.with_locator {
                IndexBody::Centroid(build_centroid_index(&t, builder, &table)?)
            } else {
                IndexBody::MinMax(builder.build(&t, &table)?)
            };
            IndexFile::new(kind, t.len(), body)?
        }
        Kind::Grammar => {
            let slp = Slp::parse(&read(&a.input)?)?;
            let m = build_global_index(&slp, a.block_len, &table)?;
            IndexFile::new(kind, slp.len(), IndexBody::MinMax(m))?
        }
        Kind::Graph => {
            let g = ColoredGraph::parse(&read(&a.input)?)?;
            let pairs = match &a.td_file {
                Some(p) => all_queries_with(&g, &TreeDecomp::parse_pace(&read(p)?)?)?,
                None => all_queries(&g)?,
            };
            IndexFile::new(kind, g.len(), IndexBody::Pairs(pairs))?
        }
    };
    file.save(&a.output)?;
    Ok(())
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn bench_cmd(a: BenchArgs) -> CmdResult {
    let kind = IndexKind::from(a.kind);
    let generator = match &a.generator {
        Some(s) => Generator::parse(kind, s).map_err(|e| Failure::Usage(e.to_string()))?,
        None => Generator::default_for(kind),
    };
    if a.reps == 0 {
        return Err(Failure::Usage("--reps must be positive".into()));
    }
    let table = ChunkTable::new(a.chunk_bits)?;
    let mut rows = Vec::new();
    for &n in &a.sizes {
        rows.extend(bench::bench_size(kind, &generator, n, a.reps, a.seed, &table)?);
    }
    let summary = bench::summarize(&rows);
    println!("{:>10}  {:<14}{:>12}", "n", "variant", "median_ms");
    for &(n, v, ms) in &summary {
        println!("{n:>10}  {v:<14}{ms:>12.3}");
    }
    for &n in &a.sizes {
        let at: Vec<_> = summary.iter().filter(|s| s.0 == n).collect();
        if let [fast, slow] = at.as_slice() {
            let ratio = slow.2 / fast.2.max(1e-9);
            println!("n={n}: {}/{} time ratio {ratio:.2}", slow.1, fast.1);
        }
    }
    match a.csv.as_deref() {
        Some(p) if p == Path::new("-") => print!("{}", bench::to_csv(&rows)),
        Some(p) => std::fs::write(p, bench::to_csv(&rows)).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        None => {}
    }
    Ok(())
}

fn print_minmax(m: &MinMaxIndex) {
    for i in 1..=m.n() {
        println!("{i} {} {}", m.min_at(i).unwrap_or(0), m.max_at(i).unwrap_or(0));
    }
}

fn oracle_cmd(a: OracleArgs) -> CmdResult {
    let text = read(&a.input)?;
    let (m, pairs): (Option<MinMaxIndex>, Option<QuerySet>) = match a.kind {
        Kind::String => (Some(string_oracle(&parse_bits(&text)?)?), None),
        Kind::Grammar => (Some(string_oracle(&Slp::parse(&text)?.expand())?), None),
        Kind::Tree => {
            let q = tree_enum_oracle(&ColoredTree::parse(&text)?)?;
            (None, Some(q))
        }
        Kind::Graph => (None, Some(graph_enum_oracle(&ColoredGraph::parse(&text)?)?)),
    };
    if let Some(q) = a.query {
        let (i, j) = (q[0], q[1]);
        let hit = match (&m, &pairs) {
            (Some(m), _) => i >= 1 && m.query(i, j),
            (_, Some(p)) => p.contains(i, j),
            _ => unreachable!(),
        };
        println!("{}", yes_no(hit));
        return Ok(());
    }
    match (m, pairs) {
        (Some(m), _) => print_minmax(&m),
        (_, Some(p)) => {
            for (x, y) in p.iter() {
                println!("{x} {y}");
            }
        }
        _ => unreachable!(),
    }
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    match cli.cmd {
        Cmd::Build(a) => build(a),
        Cmd::Query { index, i, j } => {
            let f = IndexFile::load(&index)?;
            println!("{}", yes_no(f.query(i, j)));
            Ok(())
        }
        Cmd::Locate { index, i, j } => {
            let f = IndexFile::load(&index)?;
            match f.locate(i, j)? {
                Some(v) => println!("{v}"),
                None => println!("none"),
            }
            Ok(())
        }
        Cmd::Bench(a) => bench_cmd(a),
        Cmd::Oracle(a) => oracle_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::Usage(m))) => {
            eprintln!("jpm: {m}");
            ExitCode::from(1)
        }
        Ok(Err(Failure::Lib(e))) => {
            eprintln!("jpm: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => ExitCode::from(4),
    }
}
