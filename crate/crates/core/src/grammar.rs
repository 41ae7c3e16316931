//! Jumbled index of a binary string given by a straight-line program.
//!
//! The expansion is cut into blocks of at most `ℓ` bits. A window either
//! lies inside one block, or starts in block `k` and ends in block `m > k`;
//! in the second case it is a straddling window of the pair
//! `(B_k, B_m)` around the fixed middle `B_{k+1} .. B_{m-1}`. Only distinct
//! blocks and distinct block pairs get their own arrays.

use std::collections::HashMap;
use std::fmt;

use crate::bitseq::{BitSeq, ChunkTable, StepArray};
use crate::error::{Error, Result};
use crate::string_index::{build_minmax_packed, split_edge_extrema, Extremum, MinMaxIndex};

/// A grammar rule. Pair ids refer to earlier rules (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Terminal(bool),
    Pair(usize, usize),
}

/// Straight-line program in Chomsky normal form; the last rule is the start symbol.
#[derive(Clone, PartialEq, Eq)]
pub struct Slp {
    rules: Vec<Rule>,
    exp_len: Vec<usize>,
    exp_ones: Vec<usize>,
}

impl Slp {
    pub fn new(rules: Vec<Rule>) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::Input("a grammar needs at least one rule".into()));
        }
        let mut exp_len: Vec<usize> = Vec::with_capacity(rules.len());
        let mut exp_ones = Vec::with_capacity(rules.len());
        for (id, r) in rules.iter().enumerate() {
            let (len, ones) = match *r {
                Rule::Terminal(b) => (1, b as usize),
                Rule::Pair(a, b) => {
                    if a >= id || b >= id {
                        return Err(Error::Validation(format!("rule {id} refers forward to {a} or {b}")));
                    }
                    let len = exp_len[a]
                        .checked_add(exp_len[b])
                        .ok_or_else(|| Error::Validation(format!("rule {id} expands past usize")))?;
                    (len, exp_ones[a] + exp_ones[b])
                }
            };
            exp_len.push(len);
            exp_ones.push(ones);
        }
        Ok(Slp {
            rules,
            exp_len,
            exp_ones,
        })
    }

    /// Reads the text format: the rule count, then one `T <bit>` or
    /// `N <left> <right>` line per rule with 1-based ids.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (first, head) = lines.next().ok_or_else(|| Error::parse(1, "empty grammar"))?;
        let g: usize = head
            .parse()
            .map_err(|_| Error::parse(first, format!("bad rule count {head:?}")))?;
        if g == 0 {
            return Err(Error::parse(first, "empty grammar"));
        }
        let mut rules = Vec::with_capacity(g);
        for (line, l) in lines {
            let id = rules.len() + 1;
            if id > g {
                return Err(Error::parse(line, format!("more than {g} rules")));
            }
            let f: Vec<&str> = l.split_whitespace().collect();
            let rule = match f.as_slice() {
                ["T", "0"] => Rule::Terminal(false),
                ["T", "1"] => Rule::Terminal(true),
                ["T", b] => return Err(Error::parse(line, format!("bad terminal {b:?}"))),
                ["N", a, b] => {
                    let id_of = |s: &str| -> Result<usize> {
                        match s.parse::<usize>() {
                            Ok(x) if x >= 1 && x < id => Ok(x - 1),
                            Ok(x) => Err(Error::parse(line, format!("rule {id} refers to {x}"))),
                            Err(_) => Err(Error::parse(line, format!("bad rule id {s:?}"))),
                        }
                    };
                    Rule::Pair(id_of(a)?, id_of(b)?)
                }
                _ => return Err(Error::parse(line, format!("expected `T <bit>` or `N <j> <k>`, got {l:?}"))),
            };
            rules.push(rule);
        }
        if rules.len() != g {
            return Err(Error::parse(text.lines().count(), format!("expected {g} rules, got {}", rules.len())));
        }
        Slp::new(rules)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.rules.len());
        for r in &self.rules {
            match *r {
                Rule::Terminal(b) => out.push_str(&format!("T {}\n", b as u8)),
                Rule::Pair(a, b) => out.push_str(&format!("N {} {}\n", a + 1, b + 1)),
            }
        }
        out
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Number of rules `g`.
    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    pub fn start(&self) -> usize {
        self.rules.len() - 1
    }

    /// Length `n` of the generated string.
    pub fn len(&self) -> usize {
        self.exp_len[self.start()]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn exp_len(&self, rule: usize) -> usize {
        self.exp_len[rule]
    }

    pub fn exp_ones(&self, rule: usize) -> usize {
        self.exp_ones[rule]
    }

    /// Streams the expansion of `rule` left to right.
    pub fn bits_of(&self, rule: usize) -> impl Iterator<Item = bool> + '_ {
        let mut stack = vec![rule];
        std::iter::from_fn(move || loop {
            match self.rules[stack.pop()?] {
                Rule::Terminal(b) => return Some(b),
                Rule::Pair(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
            }
        })
    }

    pub fn expand_rule(&self, rule: usize) -> BitSeq {
        self.bits_of(rule).collect()
    }

    pub fn expand(&self) -> BitSeq {
        self.expand_rule(self.start())
    }
}

impl fmt::Debug for Slp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Slp(g={}, n={})", self.rules.len(), self.len())
    }
}

/// `clamp(round((n/g)^(2/3) * log2(n)^(1/3)), 1, n)`.
pub fn choose_block_length(n: usize, g: usize) -> usize {
    let (nf, gf) = (n.max(1) as f64, g.max(1) as f64);
    let l = ((nf / gf).powf(2.0 / 3.0) * nf.log2().cbrt()).round();
    (l as usize).clamp(1, n.max(1))
}

/// The expansion written as a sequence of references to distinct blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecomposition {
    block_len: usize,
    basic: Vec<BitSeq>,
    seq: Vec<usize>,
    prefix_len: Vec<usize>,
    prefix_ones: Vec<usize>,
}

impl BlockDecomposition {
    /// The bound `ℓ` on block lengths.
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Distinct blocks.
    pub fn basic(&self) -> &[BitSeq] {
        &self.basic
    }

    /// Block `k` of the expansion as an index into [`Self::basic`].
    pub fn seq(&self) -> &[usize] {
        &self.seq
    }

    /// Length of the expansion before block `k`, for `k` in `0..=b`.
    pub fn prefix_len(&self) -> &[usize] {
        &self.prefix_len
    }

    pub fn prefix_ones(&self) -> &[usize] {
        &self.prefix_ones
    }

    /// Length and ones of the blocks strictly between `k` and `m`.
    pub fn span(&self, k: usize, m: usize) -> (usize, usize) {
        if m <= k + 1 {
            return (0, 0);
        }
        (
            self.prefix_len[m] - self.prefix_len[k + 1],
            self.prefix_ones[m] - self.prefix_ones[k + 1],
        )
    }

    /// Checks block lengths, prefix arrays and the concatenation against the
    /// grammar's expansion, streaming both sides.
    pub fn validate(&self, slp: &Slp) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if self.prefix_len.len() != self.seq.len() + 1 || self.prefix_len[0] != 0 || self.prefix_ones[0] != 0 {
            return bad("prefix arrays do not match the block sequence".into());
        }
        for b in &self.basic {
            if b.is_empty() || b.len() > self.block_len {
                return bad(format!("basic block of length {} with bound {}", b.len(), self.block_len));
            }
        }
        let mut it = slp.bits_of(slp.start());
        for (k, &r) in self.seq.iter().enumerate() {
            let b = &self.basic[r];
            if self.prefix_len[k + 1] != self.prefix_len[k] + b.len()
                || self.prefix_ones[k + 1] != self.prefix_ones[k] + b.count_ones()
            {
                return bad(format!("prefix arrays disagree with block {k}"));
            }
            for (p, bit) in b.iter().enumerate() {
                if it.next() != Some(bit) {
                    return bad(format!("block {k} differs from the expansion at offset {p}"));
                }
            }
        }
        if it.next().is_some() {
            return bad("blocks stop before the expansion ends".into());
        }
        Ok(())
    }
}

/// Cuts the parse tree at maximal rules expanding to at most `ℓ` bits,
/// then greedily joins neighbouring pieces while they fit in `ℓ`.
pub fn block_decompose(slp: &Slp, block_len: usize) -> Result<BlockDecomposition> {
    if block_len == 0 {
        return Err(Error::Config("block length must be at least 1".into()));
    }
    let mut memo: HashMap<usize, BitSeq> = HashMap::new();
    let mut ids: HashMap<BitSeq, usize> = HashMap::new();
    let mut bd = BlockDecomposition {
        block_len,
        basic: Vec::new(),
        seq: Vec::new(),
        prefix_len: vec![0],
        prefix_ones: vec![0],
    };
    let mut flush = |cur: &mut BitSeq, bd: &mut BlockDecomposition| {
        if cur.is_empty() {
            return;
        }
        let block = std::mem::take(cur);
        let (len, ones) = (block.len(), block.count_ones());
        let id = *ids.entry(block.clone()).or_insert_with(|| {
            bd.basic.push(block);
            bd.basic.len() - 1
        });
        bd.seq.push(id);
        bd.prefix_len.push(bd.prefix_len.last().unwrap() + len);
        bd.prefix_ones.push(bd.prefix_ones.last().unwrap() + ones);
    };
    let mut cur = BitSeq::new();
    let mut stack = vec![slp.start()];
    while let Some(r) = stack.pop() {
        if slp.exp_len(r) > block_len {
            let Rule::Pair(a, b) = slp.rules()[r] else {
                unreachable!("terminals have length 1")
            };
            stack.push(b);
            stack.push(a);
            continue;
        }
        let piece = memo.entry(r).or_insert_with(|| slp.expand_rule(r));
        if cur.len() + piece.len() > block_len {
            flush(&mut cur, &mut bd);
        }
        cur.extend_from(piece);
    }
    flush(&mut cur, &mut bd);
    Ok(bd)
}

/// Index of every distinct block, built with the packed string builder.
pub fn build_basic_arrays(bd: &BlockDecomposition, table: &ChunkTable) -> Result<Vec<MinMaxIndex>> {
    bd.basic.iter().map(|b| build_minmax_packed(b, table)).collect()
}

/// Straddling-window extrema for every ordered pair of distinct blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairTables {
    d: usize,
    max: Vec<StepArray>,
    min: Vec<StepArray>,
}

impl PairTables {
    /// Arrays over lengths `2..=|B_k| + |B_m|` of windows starting in
    /// block `k` and ending in block `m`: `(min, max)`.
    pub fn get(&self, k: usize, m: usize) -> (&StepArray, &StepArray) {
        (&self.min[k * self.d + m], &self.max[k * self.d + m])
    }

    pub fn distinct_blocks(&self) -> usize {
        self.d
    }
}

pub fn build_pair_tables(bd: &BlockDecomposition, table: &ChunkTable) -> Result<PairTables> {
    let d = bd.basic.len();
    let mut max = Vec::with_capacity(d * d);
    let mut min = Vec::with_capacity(d * d);
    for x in &bd.basic {
        for y in &bd.basic {
            max.push(split_edge_extrema(x, y, table, Extremum::Max)?);
            min.push(split_edge_extrema(x, y, table, Extremum::Min)?);
        }
    }
    Ok(PairTables { d, max, min })
}

/// Upper bound on block pairs visited by [`build_global_index`].
pub const MAX_BLOCK_PAIRS: usize = 1 << 28;

/// Index of the expansion of `slp`; `block_len` defaults to [`choose_block_length`].
pub fn build_global_index(slp: &Slp, block_len: Option<usize>, table: &ChunkTable) -> Result<MinMaxIndex> {
    let n = slp.len();
    let l = block_len.unwrap_or_else(|| choose_block_length(n, slp.rule_count()));
    let bd = block_decompose(slp, l)?;
    let blocks = bd.seq.len();
    if blocks * blocks / 2 > MAX_BLOCK_PAIRS {
        return Err(Error::Config(format!(
            "{blocks} blocks of length <= {l} give too many block pairs; use a larger block length"
        )));
    }
    let basic = build_basic_arrays(&bd, table)?;
    let pairs = build_pair_tables(&bd, table)?;

    let mut max = vec![0u32; n + 1];
    let mut min = vec![u32::MAX; n + 1];
    min[0] = 0;
    for idx in &basic {
        for i in 1..=idx.n() {
            max[i] = max[i].max(idx.max_at(i).expect("in range"));
            min[i] = min[i].min(idx.min_at(i).expect("in range"));
        }
    }
    let d = pairs.d;
    let pmax: Vec<Vec<u32>> = pairs.max.iter().map(StepArray::decode).collect();
    let pmin: Vec<Vec<u32>> = pairs.min.iter().map(StepArray::decode).collect();
    for k in 0..blocks {
        for m in k + 1..blocks {
            let (off, ones) = bd.span(k, m);
            let p = bd.seq[k] * d + bd.seq[m];
            // pair arrays start at length 2
            let from = off + 2;
            let ones = ones as u32;
            for (slot, &v) in max[from..].iter_mut().zip(&pmax[p]) {
                *slot = (*slot).max(v + ones);
            }
            for (slot, &v) in min[from..].iter_mut().zip(&pmin[p]) {
                *slot = (*slot).min(v + ones);
            }
        }
    }
    MinMaxIndex::from_values(&min, &max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::string_index::build_minmax_naive;
    use rand::{Rng, SeedableRng};

    fn doubling(depth: usize) -> Slp {
        crate::gen::doubling_slp(&"01".parse().unwrap(), depth - 1)
    }

    #[test]
    fn parse_examples() {
        assert_eq!(Slp::parse("1\nT 1\n").unwrap().expand(), "1".parse().unwrap());
        let s = Slp::parse("3\nT 1\nT 0\nN 1 2\n").unwrap();
        assert_eq!(s.expand(), "10".parse().unwrap());
        assert_eq!(Slp::parse(&s.to_text()).unwrap(), s);
        assert_eq!(doubling(12).len(), 4096);
        assert_eq!(doubling(12).exp_ones(doubling(12).start()), 2048);
        for bad in ["", "0\n", "2\nT 1\nN 1 2\n", "1\nT 2\n", "2\nT 1\n", "1\nX 1\n", "1\nT 1\nT 0\n"] {
            assert!(matches!(Slp::parse(bad), Err(Error::Parse { .. })), "{bad:?}");
        }
    }

    #[test]
    fn block_length_formula() {
        assert_eq!(choose_block_length(4096, 16), 92);
        assert_eq!(choose_block_length(1, 1), 1);
        assert!(choose_block_length(50, 50) >= 1);
        assert!(choose_block_length(3, 100) >= 1);
        assert_eq!(choose_block_length(8, 1), 6);
        assert_eq!(choose_block_length(4, 1), 3);
    }

    #[test]
    fn decomposition_examples() {
        let s = doubling(12);
        let whole = block_decompose(&s, 4096).unwrap();
        assert_eq!(whole.seq().len(), 1);
        assert_eq!(whole.basic()[0], s.expand());
        let unit = block_decompose(&s, 1).unwrap();
        assert_eq!(unit.seq().len(), 4096);
        assert!(unit.basic().len() <= 2);
        let b = block_decompose(&s, 64).unwrap();
        b.validate(&s).unwrap();
        assert_eq!(b.basic().len(), 1);
        for bd in [whole, unit] {
            bd.validate(&s).unwrap();
        }
    }

    #[test]
    fn validate_catches_corruption() {
        let s = doubling(5);
        let mut bd = block_decompose(&s, 4).unwrap();
        let first = bd.basic[0].get(0);
        bd.basic[0].set(0, !first);
        assert!(bd.validate(&s).is_err());
    }

    #[test]
    fn pair_table_examples() {
        let t = ChunkTable::default();
        let slp = Slp::parse("4\nT 0\nT 1\nN 1 2\nN 3 3\n").unwrap();
        let bd = block_decompose(&slp, 2).unwrap();
        let pairs = build_pair_tables(&bd, &t).unwrap();
        assert_eq!(pairs.distinct_blocks(), 1);
        let (lo, hi) = pairs.get(0, 0);
        // 01|01 straddling windows of lengths 2..4
        assert_eq!((2..=4).map(|i| hi.get(i).unwrap()).collect::<Vec<_>>(), vec![1, 2, 2]);
        assert_eq!((2..=4).map(|i| lo.get(i).unwrap()).collect::<Vec<_>>(), vec![1, 1, 2]);
        assert!(build_basic_arrays(&bd, &t).unwrap()[0].query(2, 1));
    }

    #[test]
    fn global_index_small() {
        let t = ChunkTable::default();
        // 1011
        let slp = Slp::parse("5\nT 1\nT 0\nN 1 2\nN 1 1\nN 3 4\n").unwrap();
        assert_eq!(slp.expand(), "1011".parse().unwrap());
        let want = build_minmax_naive(&slp.expand()).unwrap();
        for l in [None, Some(1), Some(2), Some(3), Some(4)] {
            assert_eq!(build_global_index(&slp, l, &t).unwrap(), want, "{l:?}");
        }
    }

    #[test]
    fn random_grammars_match_expansion() {
        let t = ChunkTable::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let g = rng.gen_range(2..40);
            let slp = crate::gen::random_slp(&mut rng, g, 600);
            let want = build_minmax_naive(&slp.expand()).unwrap();
            for l in [None, Some(1), Some(rng.gen_range(1..=slp.len())), Some(slp.len())] {
                let bd = block_decompose(&slp, l.unwrap_or(3)).unwrap();
                bd.validate(&slp).unwrap();
                assert_eq!(build_global_index(&slp, l, &t).unwrap(), want, "{slp:?} {l:?}");
            }
            let bd = block_decompose(&slp, rng.gen_range(1..=8)).unwrap();
            let pairs = build_pair_tables(&bd, &t).unwrap();
            for (k, x) in bd.basic().iter().enumerate() {
                for (m, y) in bd.basic().iter().enumerate() {
                    let (lo, hi) = pairs.get(k, m);
                    let full = (x.count_ones() + y.count_ones()) as u32;
                    assert_eq!((lo.last(), hi.last()), (full, full));
                }
            }
        }
    }
}
