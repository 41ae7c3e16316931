use proptest::prelude::*;

use jumbled::gen::{self, TreeShape};
use jumbled::grammar::{block_decompose, build_global_index, Slp};
use jumbled::graph::{all_queries, all_queries_with, min_fill_decomposition, to_nice, ColoredGraph};
use jumbled::oracle::{graph_enum_oracle, string_oracle, tree_enum_oracle};
use jumbled::string_index::{build_minmax_naive, build_minmax_packed};
use jumbled::tree::{binarize, build_anchored_arrays, build_centroid_index, ColoredTree, TreeBuilder};
use jumbled::{BitSeq, ChunkTable, IndexBody, IndexFile, IndexKind, MinMaxIndex, QuerySet, RankIndex, StepArray};

fn bits(max: usize) -> impl Strategy<Value = BitSeq> {
    prop::collection::vec(any::<bool>(), 1..=max).prop_map(|v| v.into_iter().collect())
}

fn tree(max: usize) -> impl Strategy<Value = ColoredTree> {
    (1..=max, any::<u64>(), 0usize..7, 0.0..=1.0f64).prop_map(|(n, seed, shape, p)| {
        let shape = [
            TreeShape::Recursive,
            TreeShape::Bst,
            TreeShape::Path,
            TreeShape::Star,
            TreeShape::Caterpillar,
            TreeShape::CompleteBinary,
            TreeShape::Windowed(2),
        ][shape];
        gen::random_tree(&mut gen::rng(seed), n, shape, p)
    })
}

fn graph(max: usize) -> impl Strategy<Value = ColoredGraph> {
    (1..=max, any::<u64>(), 0.0..=1.0f64, 0.0..=1.0f64)
        .prop_map(|(n, seed, d, p)| gen::random_graph(&mut gen::rng(seed), n, d, p))
}

fn slp() -> impl Strategy<Value = Slp> {
    (2usize..40, 1usize..600, any::<u64>()).prop_map(|(g, len, seed)| gen::random_slp(&mut gen::rng(seed), g, len))
}

fn check_unit_steps(m: &MinMaxIndex) {
    let (lo, hi) = (m.min_array().decode(), m.max_array().decode());
    for i in 1..lo.len() {
        assert!(lo[i] - lo[i - 1] <= 1 && lo[i] >= lo[i - 1]);
        assert!(hi[i] - hi[i - 1] <= 1 && hi[i] >= hi[i - 1]);
        assert!(lo[i] <= hi[i]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_counts_prefixes(s in bits(2000), at in any::<prop::sample::Index>()) {
        let p = at.index(s.len() + 1);
        let r = RankIndex::new(s.clone());
        prop_assert_eq!(r.rank(p).unwrap(), s.iter().take(p).filter(|&b| b).count());
    }

    #[test]
    fn step_arrays_roundtrip(steps in prop::collection::vec(0u32..=1, 0..500), base in 0u32..1000) {
        let values: Vec<u32> = std::iter::once(base)
            .chain(steps.iter().scan(base, |acc, &d| { *acc += d; Some(*acc) }))
            .collect();
        let a = StepArray::from_values(3, &values).unwrap();
        prop_assert_eq!(a.decode(), values.clone());
        for (k, &v) in values.iter().enumerate() {
            prop_assert_eq!(a.get(k + 3), Some(v));
        }
        prop_assert_eq!(a.get(2), None);
    }

    #[test]
    fn string_builders_match_oracle(s in bits(400), chunk in 1usize..=16) {
        let table = ChunkTable::new(chunk).unwrap();
        let want = string_oracle(&s).unwrap();
        prop_assert_eq!(&build_minmax_packed(&s, &table).unwrap(), &want);
        prop_assert_eq!(&build_minmax_naive(&s).unwrap(), &want);
        check_unit_steps(&want);
    }

    #[test]
    fn string_index_symmetries(s in bits(300)) {
        let table = ChunkTable::default();
        let m = build_minmax_packed(&s, &table).unwrap();
        prop_assert_eq!(&build_minmax_packed(&s.reversed(), &table).unwrap(), &m);
        let c = build_minmax_packed(&s.complement(), &table).unwrap();
        for i in 0..=s.len() {
            prop_assert_eq!(c.max_at(i).unwrap(), i as u32 - m.min_at(i).unwrap());
        }
        prop_assert_eq!(m.max_at(s.len()).unwrap() as usize, s.count_ones());
    }

    #[test]
    fn path_trees_index_like_strings(s in bits(200)) {
        let table = ChunkTable::default();
        let t = ColoredTree::path(&s).unwrap();
        prop_assert_eq!(TreeBuilder::MicroMacro(Some(4)).build(&t, &table).unwrap(), build_minmax_packed(&s, &table).unwrap());
    }

    #[test]
    fn tree_builders_agree(t in tree(300), cap in 2usize..20) {
        let table = ChunkTable::default();
        let q = TreeBuilder::Quadratic.build(&t, &table).unwrap();
        prop_assert_eq!(&TreeBuilder::MicroMacro(Some(cap)).build(&t, &table).unwrap(), &q);
        check_unit_steps(&q);
    }

    #[test]
    fn dummies_are_neutral(t in tree(16)) {
        let bt = binarize(&t);
        prop_assert_eq!(bt.real_count(), t.len());
        let extra: usize = (0..t.len()).map(|v| t.children(v).len().saturating_sub(2)).sum();
        prop_assert_eq!(bt.dummy_count(), extra);
        for v in 0..bt.len() {
            prop_assert!(bt.children(v).count() <= 2);
            if bt.is_dummy(v) {
                prop_assert_eq!((bt.weight(v), bt.color(v)), (0, 0));
            }
        }
        let idx = build_anchored_arrays(&bt);
        prop_assert_eq!(QuerySet::from_index(&idx), tree_enum_oracle(&t).unwrap());
        prop_assert_eq!(build_anchored_arrays(&binarize(&bt.contract())), idx);
    }

    #[test]
    fn tree_index_ignores_the_root(t in tree(60), r in any::<prop::sample::Index>()) {
        let table = ChunkTable::default();
        let root = r.index(t.len());
        prop_assert_eq!(
            TreeBuilder::Quadratic.build(&t.rerooted(root).unwrap(), &table).unwrap(),
            TreeBuilder::Quadratic.build(&t, &table).unwrap()
        );
    }

    #[test]
    fn anchor_nodes_lie_in_an_occurrence(t in tree(14), i in 1usize..=14, j in 0usize..=14) {
        let ci = build_centroid_index(&t, TreeBuilder::Quadratic, &ChunkTable::default()).unwrap();
        let trace = ci.locate(i, j);
        prop_assert_eq!(trace.anchor.is_some(), ci.query(i, j));
        if let Some(v) = trace.anchor {
            let occ = jumbled::oracle::tree_occurrences(&t).unwrap();
            prop_assert!(occ[&(i, j)].iter().any(|m| m >> v & 1 == 1));
        }
        let n = t.len() as f64;
        prop_assert!(trace.levels <= n.log2().ceil() as usize + 1);
    }

    #[test]
    fn grammar_index_is_block_length_independent(g in slp(), pick in any::<prop::sample::Index>()) {
        let table = ChunkTable::default();
        let n = g.len();
        let want = build_minmax_packed(&g.expand(), &table).unwrap();
        let block = 1 + pick.index(n);
        block_decompose(&g, block).unwrap().validate(&g).unwrap();
        prop_assert_eq!(&build_global_index(&g, Some(block), &table).unwrap(), &want);
        prop_assert_eq!(&build_global_index(&g, None, &table).unwrap(), &want);
    }

    #[test]
    fn grammar_text_roundtrip(g in slp()) {
        let back = Slp::parse(&g.to_text()).unwrap();
        prop_assert_eq!(back.expand(), g.expand());
        prop_assert_eq!(back.rule_count(), g.rule_count());
    }

    #[test]
    fn graph_dp_matches_enumeration(g in graph(9)) {
        prop_assert_eq!(all_queries(&g).unwrap(), graph_enum_oracle(&g).unwrap());
        let td = min_fill_decomposition(&g);
        td.validate(&g).unwrap();
        to_nice(&td).unwrap().audit().unwrap();
    }

    #[test]
    fn graph_answers_are_monotone(g in graph(10), extra in any::<(prop::sample::Index, prop::sample::Index)>()) {
        let q = all_queries(&g).unwrap();
        // every connected set of two or more vertices loses a leaf of a spanning tree and stays connected
        for (w, b) in q.iter() {
            if w + b >= 2 {
                prop_assert!((w > 0 && q.contains(w - 1, b)) || (b > 0 && q.contains(w, b - 1)));
            }
        }
        // adding an edge never removes an answer
        let n = g.len();
        let (u, v) = (extra.0.index(n), extra.1.index(n));
        if u != v && !g.has_edge(u, v) {
            let mut edges = g.edges().to_vec();
            edges.push((u, v));
            let h = ColoredGraph::new(g.colors().to_vec(), edges).unwrap();
            let qh = all_queries(&h).unwrap();
            prop_assert!(q.iter().all(|(w, b)| qh.contains(w, b)));
        }
        prop_assert_eq!(all_queries_with(&g, &min_fill_decomposition(&g)).unwrap(), q);
    }

    #[test]
    fn index_files_roundtrip(s in bits(500), t in tree(40), g in graph(8)) {
        let table = ChunkTable::default();
        let files = [
            IndexFile::new(IndexKind::String, s.len(), IndexBody::MinMax(build_minmax_packed(&s, &table).unwrap())).unwrap(),
            IndexFile::new(IndexKind::Tree, t.len(), IndexBody::MinMax(TreeBuilder::Quadratic.build(&t, &table).unwrap())).unwrap(),
            IndexFile::new(IndexKind::Tree, t.len(), IndexBody::Centroid(build_centroid_index(&t, TreeBuilder::Quadratic, &table).unwrap())).unwrap(),
            IndexFile::new(IndexKind::Graph, g.len(), IndexBody::Pairs(all_queries(&g).unwrap())).unwrap(),
        ];
        for f in &files {
            prop_assert_eq!(&IndexFile::parse(&f.to_text()).unwrap(), f);
        }
    }
}
