//! Build-time measurements shared by `jpm bench` and the scaling checks.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use crate::bitseq::ChunkTable;
use crate::error::{Error, Result};
use crate::gen::{self, TreeShape};
use crate::grammar::build_global_index;
use crate::graph::all_queries;
use crate::persist::IndexKind;
use crate::string_index::{build_minmax_naive, build_minmax_packed};
use crate::tree::TreeBuilder;

/// One timed build; the fields follow the CSV header [`CSV_HEADER`].
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub kind: IndexKind,
    pub n: usize,
    pub variant: &'static str,
    pub seed: u64,
    pub build_ms: f64,
}

pub const CSV_HEADER: &str = "kind,n,variant,seed,build_ms";

/// Input family for a benchmark.
///
/// | kind    | text             | meaning                                 |
/// |---------|------------------|-----------------------------------------|
/// | string  | `bernoulli:P`    | independent bits, one with probability P |
/// | tree    | a [`TreeShape`]  | e.g. `bst`, `recursive`, `path`          |
/// | grammar | `random:G`       | random grammar with G rules              |
/// | graph   | `ktree:K`        | partial K-tree, 80% of edges kept        |
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    Bernoulli(f64),
    Tree(TreeShape),
    Grammar(usize),
    KTree(usize),
}

impl Generator {
    pub fn default_for(kind: IndexKind) -> Generator {
        match kind {
            IndexKind::String => Generator::Bernoulli(0.5),
            IndexKind::Tree => Generator::Tree(TreeShape::Bst),
            IndexKind::Grammar => Generator::Grammar(64),
            IndexKind::Graph => Generator::KTree(3),
        }
    }

    /// Parses a generator for `kind`; see the table on [`Generator`].
    pub fn parse(kind: IndexKind, text: &str) -> Result<Generator> {
        let bad = || Error::Input(format!("generator {text:?} does not fit kind {}", kind.name()));
        let (name, arg) = text.split_once(':').unwrap_or((text, ""));
        let num = |default: f64| -> Result<f64> {
            if arg.is_empty() {
                Ok(default)
            } else {
                arg.parse().map_err(|_| bad())
            }
        };
        let g = match (kind, name) {
            (IndexKind::String, "bernoulli") => Generator::Bernoulli(num(0.5)?),
            (IndexKind::Tree, shape) => Generator::Tree(TreeShape::from_str(shape).map_err(Error::Input)?),
            (IndexKind::Grammar, "random") => Generator::Grammar(num(64.0)? as usize),
            (IndexKind::Graph, "ktree") => Generator::KTree(num(3.0)? as usize),
            _ => return Err(bad()),
        };
        match g {
            Generator::Bernoulli(p) if !(0.0..=1.0).contains(&p) => Err(bad()),
            Generator::Grammar(g) if g < 2 => Err(bad()),
            _ => Ok(g),
        }
    }
}

/// Median of `values`; the mean of the middle two for even counts.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of nothing");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

fn time_ms<T>(f: impl FnOnce() -> Result<T>) -> Result<f64> {
    let start = Instant::now();
    let out = f()?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    std::hint::black_box(out);
    Ok(ms)
}

/// Times every variant of `kind` at size `n`, `reps` times each, on one input
/// drawn from `seed`. Variants alternate within each repetition.
pub fn bench_size(
    kind: IndexKind,
    generator: &Generator,
    n: usize,
    reps: usize,
    seed: u64,
    table: &ChunkTable,
) -> Result<Vec<BenchRow>> {
    if n == 0 {
        return Err(Error::Input("benchmark sizes must be positive".into()));
    }
    let mut rng = gen::rng(seed);
    let mut rows = Vec::new();
    let mut push = |variant, build_ms| {
        rows.push(BenchRow {
            kind,
            n,
            variant,
            seed,
            build_ms,
        })
    };
    match (kind, generator) {
        (IndexKind::String, &Generator::Bernoulli(p)) => {
            let s = gen::random_bits(&mut rng, n, p);
            for _ in 0..reps {
                push("packed", time_ms(|| build_minmax_packed(&s, table))?);
                push("naive", time_ms(|| build_minmax_naive(&s))?);
            }
        }
        (IndexKind::Tree, &Generator::Tree(shape)) => {
            let t = gen::random_tree(&mut rng, n, shape, 0.5);
            for _ in 0..reps {
                push("micro-macro", time_ms(|| TreeBuilder::MicroMacro(None).build(&t, table))?);
                push("quadratic", time_ms(|| TreeBuilder::Quadratic.build(&t, table))?);
            }
        }
        (IndexKind::Grammar, &Generator::Grammar(g)) => {
            let slp = gen::random_slp(&mut rng, g, n);
            for _ in 0..reps {
                push("grammar", time_ms(|| build_global_index(&slp, None, table))?);
                push("expand-packed", time_ms(|| build_minmax_packed(&slp.expand(), table))?);
            }
        }
        (IndexKind::Graph, &Generator::KTree(k)) => {
            let g = gen::random_partial_ktree(&mut rng, n, k, 0.8, 0.5);
            for _ in 0..reps {
                push("dp", time_ms(|| all_queries(&g))?);
            }
        }
        _ => return Err(Error::Input(format!("generator {generator:?} does not fit kind {}", kind.name()))),
    }
    Ok(rows)
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{:.3}", r.kind.name(), r.n, r.variant, r.seed, r.build_ms);
    }
    out
}

/// Median build time per `(n, variant)` in first-seen order.
pub fn summarize(rows: &[BenchRow]) -> Vec<(usize, &'static str, f64)> {
    let mut keys: Vec<(usize, &'static str)> = Vec::new();
    for r in rows {
        if !keys.contains(&(r.n, r.variant)) {
            keys.push((r.n, r.variant));
        }
    }
    keys.into_iter()
        .map(|(n, v)| {
            let times: Vec<f64> = rows
                .iter()
                .filter(|r| r.n == n && r.variant == v)
                .map(|r| r.build_ms)
                .collect();
            (n, v, median(&times))
        })
        .collect()
}
