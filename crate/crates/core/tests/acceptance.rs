//! Acceptance run: one line per criterion, thresholds pinned below.
//!
//! Runs without the libtest harness so the report is always printed and the
//! timing checks do not share the machine with other tests.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use jumbled::bench::median;
use jumbled::gen::{self, TreeShape};
use jumbled::grammar::{build_global_index, Slp};
use jumbled::graph::{all_queries, all_queries_with, min_fill_decomposition, ColoredGraph, TreeDecomp};
use jumbled::oracle::{graph_enum_oracle, string_oracle, tree_occurrences};
use jumbled::string_index::{build_minmax_naive, build_minmax_packed};
use jumbled::tree::{build_centroid_index, match_bounded, ColoredTree, TreeBuilder};
use jumbled::{BitSeq, ChunkTable, IndexBody, IndexFile, IndexKind, MinMaxIndex};

const SEED: u64 = 20_240_601;

const STRING_EXHAUSTIVE_MAX_LEN: usize = 16;
const STRING_RANDOM_COUNT: usize = 1000;
const STRING_RANDOM_MAX_LEN: usize = 1 << 14;
const STRING_BUDGET: Duration = Duration::from_secs(120);

const INTERVAL_RANDOM_TREES: usize = 500;
const INTERVAL_STRUCTURED_TREES: usize = 50;
const INTERVAL_MAX_N: usize = 18;
const INTERVAL_BUDGET: Duration = Duration::from_secs(300);

const AGREE_TREES: usize = 500;
const AGREE_MAX_N: usize = 256;
const AGREE_CAPS: [usize; 3] = [4, 8, 16];
const AGREE_BOUNDED_MAX_I: usize = 8;
const AGREE_BUDGET: Duration = Duration::from_secs(300);

const ANCHOR_TREES: usize = 200;
const ANCHOR_MAX_N: usize = 18;
const ANCHOR_BUDGET: Duration = Duration::from_secs(300);

const GRAMMAR_RANDOM: usize = 200;
const GRAMMAR_STRUCTURED: usize = 20;
const GRAMMAR_MAX_LEN: usize = 4096;
const GRAMMAR_BUDGET: Duration = Duration::from_secs(300);

const DP_RANDOM_GRAPHS: usize = 300;
const DP_RANDOM_MAX_N: usize = 12;
const DP_KTREES: usize = 100;
const DP_KTREE_MAX_N: usize = 14;
const DP_BUDGET: Duration = Duration::from_secs(600);

const DECOMP_GRAPHS: usize = 50;
const DECOMP_BUDGET: Duration = Duration::from_secs(300);

const SPACE_N: usize = 1 << 14;
/// Fixed bytes allowed on top of two bits per size (the two base words).
const SPACE_HEADER_BYTES: usize = 64;
const SPACE_DIRECTORY_RATIO: f64 = 0.5;

const SCALE_STRING_N: usize = 1 << 16;
const SCALE_STRING_RATIO: f64 = 2.0;
const SCALE_TREE_N: usize = 1 << 14;
const SCALE_TREE_CAP: usize = 14;
const SCALE_TREE_RATIO: f64 = 1.5;
const SCALE_TREE_CORPUS: usize = 3;
const SCALE_RUNS: usize = 5;

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
    /// Failure tolerated by the criterion itself.
    soft: bool,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail, soft: false }
}

fn timed(budget: Duration, f: impl FnOnce() -> Result<String, String>) -> Outcome {
    let start = Instant::now();
    let r = f();
    let took = start.elapsed();
    let within = took <= budget;
    match r {
        Ok(d) => outcome(within, format!("{d}; {:.1}s of {}s", took.as_secs_f64(), budget.as_secs())),
        Err(e) => outcome(false, format!("{e}; {:.1}s", took.as_secs_f64())),
    }
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn random_tree(rng: &mut impl Rng, n: usize) -> ColoredTree {
    let shapes = [
        TreeShape::Recursive,
        TreeShape::Recursive,
        TreeShape::Bst,
        TreeShape::Windowed(3),
        TreeShape::Caterpillar,
        TreeShape::Path,
        TreeShape::Star,
    ];
    let shape = *shapes.choose(rng).unwrap();
    let p = rng.gen_range(0.0..=1.0);
    gen::random_tree(rng, n, shape, p)
}

fn string_exactness(table: &ChunkTable) -> Result<String, String> {
    let run = |s: &BitSeq| -> Result<(), String> {
        let want = string_oracle(s).map_err(|e| e.to_string())?;
        let packed = build_minmax_packed(s, table).map_err(|e| e.to_string())?;
        let naive = build_minmax_naive(s).map_err(|e| e.to_string())?;
        check(packed == want && naive == want, || format!("disagreement on {s}"))
    };
    for len in 1..=STRING_EXHAUSTIVE_MAX_LEN {
        for w in 0..1u64 << len {
            run(&(0..len).map(|k| w >> k & 1 == 1).collect())?;
        }
    }
    let exhaustive = (1..=STRING_EXHAUSTIVE_MAX_LEN).map(|len| 1usize << len).sum::<usize>();
    let mut rng = gen::rng(SEED);
    let max_lg = (STRING_RANDOM_MAX_LEN as f64).log2();
    for _ in 0..STRING_RANDOM_COUNT {
        // log-uniform length so that short and long strings are both common
        let n = (2f64.powf(rng.gen_range(0.0..=max_lg)) as usize).clamp(1, STRING_RANDOM_MAX_LEN);
        let p = rng.gen_range(0.0..=1.0);
        run(&gen::random_bits(&mut rng, n, p))?;
    }
    Ok(format!("{exhaustive} exhaustive + {STRING_RANDOM_COUNT} random strings exact"))
}

fn enumerated_intervals(t: &ColoredTree, idx: &MinMaxIndex) -> Result<(), String> {
    let occ = tree_occurrences(t).map_err(|e| e.to_string())?;
    for i in 1..=t.len() {
        let js: BTreeSet<usize> = occ.keys().filter(|k| k.0 == i).map(|k| k.1).collect();
        let (lo, hi) = (idx.min_at(i).unwrap() as usize, idx.max_at(i).unwrap() as usize);
        let want: BTreeSet<usize> = (lo..=hi).collect();
        check(js == want, || format!("size {i} of {}: enumerated {js:?}, index {lo}..={hi}", t.to_text()))?;
    }
    Ok(())
}

fn tree_intervals(table: &ChunkTable) -> Result<String, String> {
    let mut rng = gen::rng(SEED + 2);
    for _ in 0..INTERVAL_RANDOM_TREES {
        let n = rng.gen_range(1..=INTERVAL_MAX_N);
        let t = random_tree(&mut rng, n);
        let idx = TreeBuilder::MicroMacro(None).build(&t, table).map_err(|e| e.to_string())?;
        enumerated_intervals(&t, &idx)?;
    }
    let shapes = [TreeShape::Path, TreeShape::Star, TreeShape::Caterpillar, TreeShape::CompleteBinary];
    for k in 0..INTERVAL_STRUCTURED_TREES {
        let n = 1 + k * (INTERVAL_MAX_N - 1) / (INTERVAL_STRUCTURED_TREES - 1);
        let t = gen::random_tree(&mut rng, n, shapes[k % shapes.len()], 0.5);
        let idx = TreeBuilder::Quadratic.build(&t, table).map_err(|e| e.to_string())?;
        enumerated_intervals(&t, &idx)?;
    }
    Ok(format!(
        "{INTERVAL_RANDOM_TREES} random + {INTERVAL_STRUCTURED_TREES} structured trees are intervals"
    ))
}

fn builder_agreement(table: &ChunkTable) -> Result<String, String> {
    let mut rng = gen::rng(SEED + 3);
    let mut bounded = 0usize;
    for _ in 0..AGREE_TREES {
        let n = rng.gen_range(1..=AGREE_MAX_N);
        let t = random_tree(&mut rng, n);
        let quad = TreeBuilder::Quadratic.build(&t, table).map_err(|e| e.to_string())?;
        for cap in AGREE_CAPS {
            let mm = TreeBuilder::MicroMacro(Some(cap)).build(&t, table).map_err(|e| e.to_string())?;
            check(mm == quad, || format!("cap {cap} differs on {}", t.to_text()))?;
        }
        for i in 1..=AGREE_BOUNDED_MAX_I.min(n) {
            for j in 0..=i {
                bounded += 1;
                check(match_bounded(&t, i, j) == quad.query(i, j), || {
                    format!("bounded ({i}, {j}) differs on {}", t.to_text())
                })?;
            }
        }
    }
    Ok(format!("{AGREE_TREES} trees, caps {AGREE_CAPS:?}, {bounded} bounded queries"))
}

fn anchors(table: &ChunkTable) -> Result<String, String> {
    let mut rng = gen::rng(SEED + 4);
    let mut queries = 0usize;
    let mut worst = 0usize;
    for _ in 0..ANCHOR_TREES {
        let n = rng.gen_range(1..=ANCHOR_MAX_N);
        let t = random_tree(&mut rng, n);
        let ci = build_centroid_index(&t, TreeBuilder::MicroMacro(None), table).map_err(|e| e.to_string())?;
        let occ = tree_occurrences(&t).map_err(|e| e.to_string())?;
        let limit = (n as f64).log2().ceil() as usize + 1;
        for i in 1..=n + 1 {
            for j in 0..=i + 1 {
                let trace = ci.locate(i, j);
                match (occ.get(&(i, j)), trace.anchor) {
                    (Some(sets), Some(v)) => {
                        queries += 1;
                        check(sets.iter().any(|s| s >> v & 1 == 1), || {
                            format!("anchor {v} for ({i}, {j}) lies on no occurrence in {}", t.to_text())
                        })?;
                        worst = worst.max(trace.levels);
                        check(trace.levels <= limit, || format!("walk of {} > {limit} at n = {n}", trace.levels))?;
                    }
                    (None, None) => {}
                    (want, got) => {
                        return Err(format!("({i}, {j}): occurs {}, anchor {got:?}", want.is_some()));
                    }
                }
            }
        }
    }
    Ok(format!("{queries} appearing queries anchored, longest walk {worst}"))
}

fn grammar_corpus(rng: &mut impl Rng) -> Vec<Slp> {
    let mut out = Vec::new();
    for _ in 0..GRAMMAR_RANDOM {
        let g = rng.gen_range(2..=80);
        let max_len = rng.gen_range(1..=GRAMMAR_MAX_LEN);
        out.push(gen::random_slp(rng, g, max_len));
    }
    let mut k = 0;
    while out.len() < GRAMMAR_RANDOM + GRAMMAR_STRUCTURED {
        let slp = match k % 3 {
            0 => {
                let len = rng.gen_range(1..=5);
                let pattern = gen::random_bits(rng, len, 0.5);
                let depth = (GRAMMAR_MAX_LEN / pattern.len()).ilog2() as usize;
                gen::doubling_slp(&pattern, rng.gen_range(0..=depth))
            }
            1 => gen::fibonacci_slp(2 + k % 15),
            _ => {
                let runs: Vec<(bool, usize)> = (0..rng.gen_range(1..=8)).map(|r| (r % 2 == 0, rng.gen_range(1..=400))).collect();
                gen::runs_slp(&runs)
            }
        };
        k += 1;
        if slp.len() <= GRAMMAR_MAX_LEN {
            out.push(slp);
        }
    }
    out
}

fn grammar_equivalence(table: &ChunkTable) -> Result<String, String> {
    let mut rng = gen::rng(SEED + 5);
    let corpus = grammar_corpus(&mut rng);
    for slp in &corpus {
        let want = string_oracle(&slp.expand()).map_err(|e| e.to_string())?;
        for block in [None, Some(1), Some(slp.len())] {
            let got = build_global_index(slp, block, table).map_err(|e| e.to_string())?;
            check(got == want, || format!("block length {block:?} differs on\n{}", slp.to_text()))?;
        }
    }
    let longest = corpus.iter().map(Slp::len).max().unwrap_or(0);
    Ok(format!("{} grammars up to {longest} bits, 3 block lengths each", corpus.len()))
}

fn dp_equivalence() -> Result<String, String> {
    let mut rng = gen::rng(SEED + 6);
    let compare = |g: &ColoredGraph| -> Result<(), String> {
        let got = all_queries(g).map_err(|e| e.to_string())?;
        let want = graph_enum_oracle(g).map_err(|e| e.to_string())?;
        check(got == want, || format!("disagreement on\n{}", g.to_text()))
    };
    for k in 0..DP_RANDOM_GRAPHS {
        let n = rng.gen_range(1..=DP_RANDOM_MAX_N);
        let density = (k % 11) as f64 / 10.0;
        let p = rng.gen_range(0.0..=1.0);
        compare(&gen::random_graph(&mut rng, n, density, p))?;
    }
    for _ in 0..DP_KTREES {
        let n = rng.gen_range(1..=DP_KTREE_MAX_N);
        let keep = rng.gen_range(0.5..=1.0);
        compare(&gen::random_partial_ktree(&mut rng, n, 3, keep, 0.5))?;
    }
    Ok(format!("{DP_RANDOM_GRAPHS} random graphs + {DP_KTREES} partial 3-trees exact"))
}

/// Elimination by minimum degree with random tie-breaks, one bag per vertex.
fn min_degree_decomposition(g: &ColoredGraph, rng: &mut impl Rng) -> TreeDecomp {
    let n = g.len();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    let mut bags = Vec::with_capacity(n);
    while !alive.is_empty() {
        alive.shuffle(rng);
        let (k, &v) = alive.iter().enumerate().min_by_key(|&(_, &v)| adj[v].len()).unwrap();
        alive.swap_remove(k);
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        for &a in &nb {
            adj[a].remove(&v);
            for &b in &nb {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        let mut bag = nb;
        bag.push(v);
        order.push(v);
        bags.push(bag);
    }
    let mut pos = vec![0; n];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    let edges = (0..n.saturating_sub(1))
        .map(|k| {
            let parent = bags[k].iter().filter(|&&u| u != order[k]).map(|&u| pos[u]).min().unwrap_or(k + 1);
            (k, parent)
        })
        .collect();
    TreeDecomp::new(n, bags, edges)
}

fn decomposition_independence() -> Result<String, String> {
    let mut rng = gen::rng(SEED + 7);
    let mut widths = (0, 0);
    for k in 0..DECOMP_GRAPHS {
        let g = if k % 2 == 0 {
            let (n, density) = (rng.gen_range(1..=10), rng.gen_range(0.1..0.6));
            gen::random_graph(&mut rng, n, density, 0.5)
        } else {
            let n = rng.gen_range(1..=14);
            gen::random_partial_ktree(&mut rng, n, 2, 0.8, 0.5)
        };
        let mf = min_fill_decomposition(&g);
        let alt = min_degree_decomposition(&g, &mut rng);
        // the alternative goes through the text format, as a supplied file would
        let alt = TreeDecomp::parse_pace(&alt.to_pace()).map_err(|e| e.to_string())?;
        alt.validate(&g).map_err(|e| e.to_string())?;
        widths.0 = widths.0.max(mf.width());
        widths.1 = widths.1.max(alt.width());
        let a = all_queries_with(&g, &mf).map_err(|e| e.to_string())?;
        let b = all_queries_with(&g, &alt).map_err(|e| e.to_string())?;
        check(a == b, || format!("decompositions disagree on\n{}", g.to_text()))?;
        if g.len() <= 7 {
            let whole = TreeDecomp::new(g.len(), vec![(0..g.len()).collect()], vec![]);
            check(all_queries_with(&g, &whole).map_err(|e| e.to_string())? == a, || {
                format!("single bag disagrees on\n{}", g.to_text())
            })?;
        }
    }
    Ok(format!(
        "{DECOMP_GRAPHS} graphs, min-fill (width <= {}) vs min-degree (width <= {})",
        widths.0, widths.1
    ))
}

fn space(table: &ChunkTable) -> Outcome {
    let mut rng = gen::rng(SEED + 8);
    let n = SPACE_N;
    let s = gen::random_bits(&mut rng, n, 0.5);
    let t = gen::random_tree(&mut rng, n, TreeShape::Bst, 0.5);
    let built = build_minmax_packed(&s, table).and_then(|a| Ok((a, TreeBuilder::MicroMacro(None).build(&t, table)?)));
    let (si, ti) = match built {
        Ok(x) => x,
        Err(e) => return outcome(false, e.to_string()),
    };
    let bound = 2 * n / 8 + SPACE_HEADER_BYTES;
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, kind, idx) in [("string", IndexKind::String, &si), ("tree", IndexKind::Tree, &ti)] {
        let payload = idx.payload_bytes();
        let dir = idx.directory_bytes();
        let ratio = dir as f64 / payload as f64;
        let file = IndexFile::new(kind, n, IndexBody::MinMax(idx.clone())).map(|f| f.to_text().len());
        pass &= payload <= bound && ratio <= SPACE_DIRECTORY_RATIO;
        parts.push(format!(
            "{name}: {payload} B payload (bound {bound}), directory {:.1}%, text file {} B",
            100.0 * ratio,
            file.unwrap_or(0)
        ));
    }
    outcome(pass, format!("n = {n}; {}", parts.join("; ")))
}

fn median_ms(runs: usize, mut f: impl FnMut()) -> f64 {
    let times: Vec<f64> = (0..runs)
        .map(|_| {
            let start = Instant::now();
            f();
            start.elapsed().as_secs_f64() * 1e3
        })
        .collect();
    median(&times)
}

fn scaling(table: &ChunkTable) -> Outcome {
    let mut rng = gen::rng(SEED + 9);
    let s = gen::random_bits(&mut rng, SCALE_STRING_N, 0.5);
    let packed = median_ms(SCALE_RUNS, || {
        std::hint::black_box(build_minmax_packed(&s, table).unwrap());
    });
    let naive = median_ms(SCALE_RUNS, || {
        std::hint::black_box(build_minmax_naive(&s).unwrap());
    });
    let corpus: Vec<ColoredTree> = (0..SCALE_TREE_CORPUS)
        .map(|_| gen::random_tree(&mut rng, SCALE_TREE_N, TreeShape::Bst, 0.5))
        .collect();
    let mm = median_ms(SCALE_RUNS, || {
        for t in &corpus {
            std::hint::black_box(TreeBuilder::MicroMacro(Some(SCALE_TREE_CAP)).build(t, table).unwrap());
        }
    });
    let quad = median_ms(SCALE_RUNS, || {
        for t in &corpus {
            std::hint::black_box(TreeBuilder::Quadratic.build(t, table).unwrap());
        }
    });
    let (rs, rt) = (naive / packed, quad / mm);
    let pass = rs >= SCALE_STRING_RATIO && rt >= SCALE_TREE_RATIO;
    Outcome {
        pass,
        soft: true,
        detail: format!(
            "string n = {SCALE_STRING_N}: packed {packed:.0} ms, naive {naive:.0} ms, {rs:.2}x (need {SCALE_STRING_RATIO}x); \
             tree n = {SCALE_TREE_N} cap {SCALE_TREE_CAP}: micro-macro {mm:.0} ms, quadratic {quad:.0} ms, {rt:.2}x (need {SCALE_TREE_RATIO}x); \
             medians of {SCALE_RUNS}"
        ),
    }
}

fn main() {
    // Honor `cargo test -- --list` and name filters the way libtest would.
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let filter = args.iter().find(|a| !a.starts_with('-'));
    if filter.is_some_and(|f| !"acceptance".contains(f.as_str())) {
        return;
    }

    let table = ChunkTable::default();
    let criteria: Vec<Criterion> = vec![
        ("string exactness", Box::new(|| timed(STRING_BUDGET, || string_exactness(&table)))),
        ("tree interval property", Box::new(|| timed(INTERVAL_BUDGET, || tree_intervals(&table)))),
        ("tree builder agreement", Box::new(|| timed(AGREE_BUDGET, || builder_agreement(&table)))),
        ("anchor validity", Box::new(|| timed(ANCHOR_BUDGET, || anchors(&table)))),
        ("grammar equivalence", Box::new(|| timed(GRAMMAR_BUDGET, || grammar_equivalence(&table)))),
        ("treewidth DP equivalence", Box::new(|| timed(DP_BUDGET, dp_equivalence))),
        ("decomposition independence", Box::new(|| timed(DECOMP_BUDGET, decomposition_independence))),
        ("space", Box::new(|| space(&table))),
        ("scaling (soft)", Box::new(|| scaling(&table))),
    ];
    let mut hard_failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let verdict = match (o.pass, o.soft) {
            (true, _) => "PASS",
            (false, true) => "FAIL (informational)",
            (false, false) => "FAIL",
        };
        println!("[{}] {name}: {verdict} - {}", k + 1, o.detail);
        if !o.pass && !o.soft {
            hard_failures += 1;
        }
    }
    if hard_failures > 0 {
        println!("{hard_failures} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria met");
}
