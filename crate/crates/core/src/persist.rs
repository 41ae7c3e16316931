//! The `JPMX1` index file: a line-oriented ASCII container for every index kind.
//!
//! ```text
//! JPMX1
//! version 1
//! kind tree
//! n 3
//! body centroid 3
//! c 1 3 2 0 Bw== 0 Bw==
//! c 0 1 0 0 AQ== 0 AQ==
//! c 2 1 0 0 AQ== 0 AQ==
//! ```
//!
//! A `mm` body is `base bits base bits` for the min and max arrays, the bits
//! being the increment string packed LSB-first and base64-encoded (`-` when
//! empty). Centroid records are `c centroid size children` followed by the
//! same four fields, in preorder. Graph files carry `body pairs K` and then
//! `K` sorted lines `white black`.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;

use crate::bitseq::{BitSeq, StepArray};
use crate::error::{Error, Result};
use crate::oracle::QuerySet;
use crate::string_index::MinMaxIndex;
use crate::tree::CentroidIndex;

pub const MAGIC: &str = "JPMX1";
pub const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IndexKind {
    String,
    Tree,
    Grammar,
    Graph,
}

impl IndexKind {
    pub fn name(self) -> &'static str {
        match self {
            IndexKind::String => "string",
            IndexKind::Tree => "tree",
            IndexKind::Grammar => "grammar",
            IndexKind::Graph => "graph",
        }
    }
}

impl FromStr for IndexKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "string" => IndexKind::String,
            "tree" => IndexKind::Tree,
            "grammar" => IndexKind::Grammar,
            "graph" => IndexKind::Graph,
            _ => return Err(Error::Input(format!("unknown index kind {s:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexBody {
    MinMax(MinMaxIndex),
    /// Tree index with the anchor locator.
    Centroid(CentroidIndex),
    Pairs(QuerySet),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexFile {
    kind: IndexKind,
    n: usize,
    body: IndexBody,
}

impl IndexFile {
    /// Checks that the body fits the kind and covers `n`.
    pub fn new(kind: IndexKind, n: usize, body: IndexBody) -> Result<Self> {
        let ok = match (&body, kind) {
            (IndexBody::MinMax(m), IndexKind::String | IndexKind::Tree | IndexKind::Grammar) => m.n() == n,
            (IndexBody::Centroid(c), IndexKind::Tree) => c.n() == n,
            (IndexBody::Pairs(p), IndexKind::Graph) => p.iter().all(|(a, b)| a + b >= 1 && a + b <= n),
            _ => false,
        };
        if !ok {
            return Err(Error::Validation(format!("body does not describe a {} index over n = {n}", kind.name())));
        }
        Ok(IndexFile { kind, n, body })
    }

    pub fn kind(&self) -> IndexKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn body(&self) -> &IndexBody {
        &self.body
    }

    /// For graphs `(i, j)` counts white and black vertices; otherwise size and ones.
    pub fn query(&self, i: usize, j: usize) -> bool {
        match &self.body {
            IndexBody::MinMax(m) => m.query(i, j),
            IndexBody::Centroid(c) => c.query(i, j),
            IndexBody::Pairs(p) => p.contains(i, j),
        }
    }

    /// Anchor node for `(i, j)`; an error unless the file holds a locator.
    pub fn locate(&self, i: usize, j: usize) -> Result<Option<usize>> {
        match &self.body {
            IndexBody::Centroid(c) => Ok(c.locate(i, j).anchor),
            _ => Err(Error::Validation("index was built without a locator".into())),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{MAGIC}\nversion {VERSION}\nkind {}\nn {}\n", self.kind.name(), self.n);
        match &self.body {
            IndexBody::MinMax(m) => {
                out.push_str("body mm ");
                write_mm(&mut out, m);
                out.push('\n');
            }
            IndexBody::Centroid(c) => {
                let _ = writeln!(out, "body centroid {}", c.nodes().len());
                for node in c.nodes() {
                    let _ = write!(out, "c {} {} {} ", node.centroid, node.size, node.children.len());
                    write_mm(&mut out, &node.index);
                    out.push('\n');
                }
            }
            IndexBody::Pairs(p) => {
                let _ = writeln!(out, "body pairs {}", p.len());
                for (a, b) in p.iter() {
                    let _ = writeln!(out, "{a} {b}");
                }
            }
        }
        out
    }

    /// Every failure, including an inconsistent body, is reported as a parse error.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim_end()));
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::parse(0, format!("file ends before {what}")))
        };
        let (ln, magic) = next("the magic line")?;
        if magic != MAGIC {
            return Err(Error::parse(ln, format!("expected magic {MAGIC}, found {magic:?}")));
        }
        let (ln, v) = next("the version")?;
        let version: u32 = field(ln, v, "version")?;
        if version != VERSION {
            return Err(Error::parse(ln, format!("unsupported version {version}, expected {VERSION}")));
        }
        let (ln, k) = next("the kind")?;
        let kind = IndexKind::from_str(&keyword(ln, k, "kind")?).map_err(|e| Error::parse(ln, e.to_string()))?;
        let (ln, l) = next("n")?;
        let n: usize = field(ln, l, "n")?;
        let (ln, l) = next("the body")?;
        let rest = l
            .strip_prefix("body ")
            .ok_or_else(|| Error::parse(ln, "expected `body ...`"))?;
        let toks: Vec<&str> = rest.split_whitespace().collect();
        let body = match toks.first().copied() {
            Some("mm") => IndexBody::MinMax(read_mm(ln, n, &toks[1..])?),
            Some("centroid") => {
                let count = count_of(ln, &toks)?;
                let mut records = Vec::with_capacity(count.min(1 << 20));
                for _ in 0..count {
                    let (ln, l) = next("a centroid record")?;
                    let t: Vec<&str> = l.split_whitespace().collect();
                    if t.len() != 8 || t[0] != "c" {
                        return Err(Error::parse(ln, "centroid record must be `c id size children mm`"));
                    }
                    let num = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(ln, format!("bad number {s:?}")));
                    let size = num(t[2])?;
                    if size > n {
                        return Err(Error::parse(ln, format!("component size {size} exceeds n = {n}")));
                    }
                    records.push((num(t[1])?, size, read_mm(ln, size, &t[4..])?, num(t[3])?));
                }
                let ci = CentroidIndex::from_preorder(records).map_err(|e| Error::parse(ln, e.to_string()))?;
                if ci.nodes().iter().any(|c| c.centroid >= n) {
                    return Err(Error::parse(ln, "centroid id out of range"));
                }
                IndexBody::Centroid(ci)
            }
            Some("pairs") => {
                let count = count_of(ln, &toks)?;
                let mut pairs = QuerySet::new();
                let mut last = None;
                for _ in 0..count {
                    let (ln, l) = next("a pair")?;
                    let p: Vec<usize> = l
                        .split_whitespace()
                        .map(|s| s.parse().map_err(|_| Error::parse(ln, format!("bad number {s:?}"))))
                        .collect::<Result<_>>()?;
                    let &[a, b] = p.as_slice() else {
                        return Err(Error::parse(ln, "pair line must be `white black`"));
                    };
                    if last >= Some((a, b)) {
                        return Err(Error::parse(ln, "pairs must be strictly increasing"));
                    }
                    last = Some((a, b));
                    pairs.insert(a, b);
                }
                IndexBody::Pairs(pairs)
            }
            _ => return Err(Error::parse(ln, "body must be `mm`, `centroid` or `pairs`")),
        };
        for (ln, l) in lines {
            if !l.trim().is_empty() {
                return Err(Error::parse(ln, "trailing content after the body"));
            }
        }
        IndexFile::new(kind, n, body).map_err(|e| Error::parse(0, e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        let text = String::from_utf8(bytes).map_err(|_| Error::parse(0, "index file is not ASCII"))?;
        IndexFile::parse(&text)
    }
}

fn keyword(ln: usize, line: &str, key: &str) -> Result<String> {
    match line.split_once(' ') {
        Some((k, v)) if k == key => Ok(v.trim().to_string()),
        _ => Err(Error::parse(ln, format!("expected `{key} ...`"))),
    }
}

fn field<T: FromStr>(ln: usize, line: &str, key: &str) -> Result<T> {
    let v = keyword(ln, line, key)?;
    v.parse().map_err(|_| Error::parse(ln, format!("bad {key} value {v:?}")))
}

fn count_of(ln: usize, toks: &[&str]) -> Result<usize> {
    match toks {
        [_, c] => c.parse().map_err(|_| Error::parse(ln, format!("bad record count {c:?}"))),
        _ => Err(Error::parse(ln, "expected a record count")),
    }
}

fn write_step(out: &mut String, a: &StepArray) {
    let bits = a.steps();
    let enc = if bits.is_empty() { "-".to_string() } else { STANDARD.encode(bits.to_bytes()) };
    let _ = write!(out, "{} {}", a.base(), enc);
}

fn write_mm(out: &mut String, m: &MinMaxIndex) {
    write_step(out, m.min_array());
    out.push(' ');
    write_step(out, m.max_array());
}

fn read_step(ln: usize, n: usize, base: &str, bits: &str) -> Result<StepArray> {
    let base = base.parse().map_err(|_| Error::parse(ln, format!("bad base {base:?}")))?;
    let bytes = if bits == "-" {
        Vec::new()
    } else {
        STANDARD
            .decode(bits)
            .map_err(|e| Error::parse(ln, format!("bad base64: {e}")))?
    };
    if bytes.len() != n.div_ceil(8) {
        return Err(Error::parse(ln, format!("expected {} bytes of increments, found {}", n.div_ceil(8), bytes.len())));
    }
    let steps = BitSeq::from_bytes(&bytes, n).map_err(|e| Error::parse(ln, e.to_string()))?;
    Ok(StepArray::from_parts(0, base, steps))
}

/// Reads a body over sizes `0..=n`.
fn read_mm(ln: usize, n: usize, toks: &[&str]) -> Result<MinMaxIndex> {
    let [b0, s0, b1, s1] = toks else {
        return Err(Error::parse(ln, "index body must be `base bits base bits`"));
    };
    let min = read_step(ln, n, b0, s0)?;
    let max = read_step(ln, n, b1, s1)?;
    MinMaxIndex::new(min, max).map_err(|e| Error::parse(ln, e.to_string()))
}
