//! Undirected simple graphs, instance I/O, and an exact branch-and-bound
//! oracle for the maximum independent set.
//!
//! Vertices are numbered `1..=n` everywhere in the public API. Internally
//! rows of the adjacency matrix are stored as bitsets indexed from zero.

use std::collections::BTreeSet;
use std::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A 1-based vertex index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

impl VertexId {
    /// Zero-based position of this vertex.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_index(i: usize) -> Self {
        VertexId(i as u32 + 1)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An ordered set of vertices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSet(BTreeSet<VertexId>);

impl VertexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.contains(&v)
    }

    pub fn insert(&mut self, v: VertexId) -> bool {
        self.0.insert(v)
    }

    pub fn remove(&mut self, v: VertexId) -> bool {
        self.0.remove(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.0.iter().copied()
    }

    pub fn is_superset(&self, other: &VertexSet) -> bool {
        self.0.is_superset(&other.0)
    }

    /// Members as plain 1-based integers, ascending.
    pub fn to_vec(&self) -> Vec<u32> {
        self.0.iter().map(|v| v.0).collect()
    }
}

impl FromIterator<VertexId> for VertexSet {
    fn from_iter<I: IntoIterator<Item = VertexId>>(iter: I) -> Self {
        VertexSet(iter.into_iter().collect())
    }
}

impl FromIterator<u32> for VertexSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        VertexSet(iter.into_iter().map(VertexId).collect())
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: vertex {vertex} out of range 1..={n}")]
    OutOfRange { line: usize, vertex: i64, n: usize },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: u32 },
    #[error("missing vertex-count header")]
    MissingHeader,
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(VertexId),
}

/// Undirected simple graph on vertices `1..=n`.
///
/// Edges are stored normalized (`i < j`), sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    adj: Vec<Vec<u64>>,
}

/// Result of parsing an instance file.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub graph: Graph,
    /// Number of edge records dropped as duplicates (either orientation).
    pub duplicates: usize,
    /// Edge count announced in a DIMACS header, if any.
    pub declared_edges: Option<usize>,
}

fn words(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

impl Graph {
    /// Builds a graph from 1-based pairs. Pairs are normalized and
    /// deduplicated; self-loops and out-of-range indices are rejected.
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (u32, u32)>) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (i, j) in pairs {
            check_pair(n, i as i64, j as i64, 0)?;
            set.insert((i.min(j), i.max(j)));
        }
        Ok(Self::from_normalized(n, set.into_iter().collect()))
    }

    fn from_normalized(n: usize, edges: Vec<(u32, u32)>) -> Self {
        let mut adj = vec![vec![0u64; words(n)]; n];
        for &(i, j) in &edges {
            let (a, b) = (i as usize - 1, j as usize - 1);
            adj[a][b / 64] |= 1 << (b % 64);
            adj[b][a / 64] |= 1 << (a % 64);
        }
        Graph { n, edges, adj }
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for i in 1..=n as u32 {
            for j in i + 1..=n as u32 {
                edges.push((i, j));
            }
        }
        Self::from_normalized(n, edges)
    }

    pub fn empty(n: usize) -> Self {
        Self::from_normalized(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Normalized edges `(i, j)` with `i < j`, ascending.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (1..=self.n as u32).map(VertexId)
    }

    pub fn adjacent(&self, u: VertexId, v: VertexId) -> bool {
        let (a, b) = (u.index(), v.index());
        self.adj[a][b / 64] >> (b % 64) & 1 == 1
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v.index()].iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        let row = &self.adj[v.index()];
        (0..self.n).filter(move |&b| row[b / 64] >> (b % 64) & 1 == 1).map(VertexId::from_index)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.0 >= 1 && (v.0 as usize) <= self.n
    }

    /// Subgraph with the listed vertices removed, renumbered in order.
    pub fn without(&self, removed: &VertexSet) -> (Graph, Vec<VertexId>) {
        let kept: Vec<VertexId> = self.vertices().filter(|v| !removed.contains(*v)).collect();
        let mut pos = vec![0u32; self.n];
        for (i, v) in kept.iter().enumerate() {
            pos[v.index()] = i as u32 + 1;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(i, j)| pos[i as usize - 1] != 0 && pos[j as usize - 1] != 0)
            .map(|&(i, j)| (pos[i as usize - 1], pos[j as usize - 1]))
            .collect();
        (Self::from_normalized(kept.len(), edges), kept)
    }

    /// Canonical DIMACS emission: header plus sorted `e i j` lines, `i < j`.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p edge {} {}\n", self.n, self.edges.len());
        for &(i, j) in &self.edges {
            out.push_str(&format!("e {i} {j}\n"));
        }
        out
    }

    /// Emission in the parenthesized pair-list format.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n={};\n", self.n);
        for &(i, j) in &self.edges {
            out.push_str(&format!("({i}, {j})\n"));
        }
        out.push_str(";\n");
        out
    }
}

fn check_pair(n: usize, i: i64, j: i64, line: usize) -> Result<(), GraphError> {
    for v in [i, j] {
        if v < 1 || v as usize > n {
            return Err(GraphError::OutOfRange { line, vertex: v, n });
        }
    }
    if i == j {
        return Err(GraphError::SelfLoop { line, vertex: i as u32 });
    }
    Ok(())
}

fn finish(n: usize, raw: Vec<(u32, u32)>, declared_edges: Option<usize>) -> Parsed {
    let total = raw.len();
    let set: BTreeSet<(u32, u32)> = raw.into_iter().map(|(i, j)| (i.min(j), i.max(j))).collect();
    let duplicates = total - set.len();
    if duplicates > 0 {
        log::warn!("{duplicates} duplicate edge record(s) collapsed");
    }
    Parsed { graph: Graph::from_normalized(n, set.into_iter().collect()), duplicates, declared_edges }
}

/// Parses the DIMACS `p edge N M` / `e i j` format.
pub fn parse_dimacs(text: &str) -> Result<Parsed, GraphError> {
    let mut n: Option<usize> = None;
    let mut declared = None;
    let mut raw = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let mut toks = line.split_whitespace();
        match toks.next() {
            None | Some("c") => continue,
            Some("p") => {
                let _format = toks.next();
                let nv = toks.next().and_then(|t| t.parse::<usize>().ok());
                let ne = toks.next().and_then(|t| t.parse::<usize>().ok());
                match (nv, ne) {
                    (Some(nv), Some(ne)) => {
                        n = Some(nv);
                        declared = Some(ne);
                    }
                    _ => {
                        return Err(GraphError::Syntax { line: line_no, msg: "malformed `p` header".into() })
                    }
                }
            }
            Some("e") => {
                let nv = n.ok_or(GraphError::MissingHeader)?;
                let i = toks.next().and_then(|t| t.parse::<i64>().ok());
                let j = toks.next().and_then(|t| t.parse::<i64>().ok());
                let (Some(i), Some(j)) = (i, j) else {
                    return Err(GraphError::Syntax { line: line_no, msg: "malformed `e` line".into() });
                };
                check_pair(nv, i, j, line_no)?;
                raw.push((i as u32, j as u32));
            }
            Some(other) => {
                return Err(GraphError::Syntax { line: line_no, msg: format!("unexpected token `{other}`") })
            }
        }
    }
    let n = n.ok_or(GraphError::MissingHeader)?;
    let parsed = finish(n, raw, declared);
    if let Some(m) = declared {
        if parsed.graph.edge_count() != m {
            log::warn!("header declares {m} edges, found {} distinct", parsed.graph.edge_count());
        }
    }
    Ok(parsed)
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i64),
    Word(String),
    Punct(char),
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.chars().peekable(), line: 1 }
    }

    /// Next token with the line it starts on.
    fn next(&mut self) -> Result<Option<(Tok, usize)>, GraphError> {
        loop {
            match self.chars.peek().copied() {
                None => return Ok(None),
                Some('\n') => {
                    self.line += 1;
                    self.chars.next();
                }
                Some('#') => {
                    while let Some(&c) = self.chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.chars.next();
                    }
                }
                Some(c) if c.is_whitespace() => {
                    self.chars.next();
                }
                Some(c) if c.is_ascii_digit() || c == '-' => {
                    let mut s = String::new();
                    s.push(c);
                    self.chars.next();
                    while let Some(&d) = self.chars.peek() {
                        if !d.is_ascii_digit() {
                            break;
                        }
                        s.push(d);
                        self.chars.next();
                    }
                    let v = s.parse::<i64>().map_err(|_| GraphError::Syntax {
                        line: self.line,
                        msg: format!("bad integer `{s}`"),
                    })?;
                    return Ok(Some((Tok::Int(v), self.line)));
                }
                Some(c) if c.is_alphabetic() || c == '_' => {
                    let mut s = String::new();
                    while let Some(&d) = self.chars.peek() {
                        if !(d.is_alphanumeric() || d == '_') {
                            break;
                        }
                        s.push(d);
                        self.chars.next();
                    }
                    return Ok(Some((Tok::Word(s), self.line)));
                }
                Some(c) => {
                    self.chars.next();
                    return Ok(Some((Tok::Punct(c), self.line)));
                }
            }
        }
    }
}

/// Parses the parenthesized pair-list format:
///
/// ```text
/// n=25;
/// (1, 3)
/// (1, 4) ...
/// (22, 25) ;
/// ```
///
/// The header may also be written `param N := 25;` and the pair list may be
/// introduced by `set Edges :=`. `#` starts a comment.
pub fn parse_edge_list(text: &str) -> Result<Parsed, GraphError> {
    let mut lx = Lexer::new(text);
    let syntax = |line: usize, msg: &str| GraphError::Syntax { line, msg: msg.to_string() };

    let mut n: Option<usize> = None;
    let mut raw = Vec::new();
    let mut pending: Option<(Tok, usize)> = None;
    let next = |lx: &mut Lexer, pending: &mut Option<(Tok, usize)>| match pending.take() {
        Some(t) => Ok(Some(t)),
        None => lx.next(),
    };

    // header
    while n.is_none() {
        let Some((tok, line)) = next(&mut lx, &mut pending)? else {
            return Err(GraphError::MissingHeader);
        };
        match tok {
            Tok::Word(w) if w == "param" || w == "set" => continue,
            Tok::Word(w) if w.eq_ignore_ascii_case("n") => {
                // `=` or `:=`
                let mut got = None;
                for _ in 0..3 {
                    match next(&mut lx, &mut pending)? {
                        Some((Tok::Punct(':'), _)) | Some((Tok::Punct('='), _)) => continue,
                        Some((Tok::Int(v), l)) => {
                            got = Some((v, l));
                            break;
                        }
                        _ => return Err(syntax(line, "expected vertex count after `n`")),
                    }
                }
                let Some((v, l)) = got else { return Err(syntax(line, "expected vertex count")) };
                if v < 0 {
                    return Err(syntax(l, "negative vertex count"));
                }
                n = Some(v as usize);
                match next(&mut lx, &mut pending)? {
                    Some((Tok::Punct(';'), _)) => {}
                    other => pending = other,
                }
            }
            _ => return Err(GraphError::MissingHeader),
        }
    }
    let n = n.unwrap();

    loop {
        let Some((tok, line)) = next(&mut lx, &mut pending)? else { break };
        match tok {
            Tok::Word(w) if w == "set" || w == "Edges" => continue,
            Tok::Punct(':') | Tok::Punct('=') => continue,
            Tok::Punct(';') => {
                // terminator; anything after it other than comments is an error
                if let Some((t, l)) = lx.next()? {
                    return Err(syntax(l, &format!("unexpected {t:?} after terminating `;`")));
                }
                break;
            }
            Tok::Punct('(') => {
                let i = match lx.next()? {
                    Some((Tok::Int(v), _)) => v,
                    _ => return Err(syntax(line, "malformed pair: expected integer after `(`")),
                };
                match lx.next()? {
                    Some((Tok::Punct(','), _)) => {}
                    _ => return Err(syntax(line, "malformed pair: expected `,`")),
                }
                let j = match lx.next()? {
                    Some((Tok::Int(v), _)) => v,
                    _ => return Err(syntax(line, "malformed pair: expected second integer")),
                };
                match lx.next()? {
                    Some((Tok::Punct(')'), _)) => {}
                    _ => return Err(syntax(line, "malformed pair: expected `)`")),
                }
                check_pair(n, i, j, line)?;
                raw.push((i as u32, j as u32));
            }
            other => return Err(syntax(line, &format!("unexpected {other:?}"))),
        }
    }
    Ok(finish(n, raw, None))
}

/// Detects the format from the first significant token: DIMACS files start
/// with `c` or `p` lines, anything else is treated as a pair list.
pub fn parse_auto(text: &str) -> Result<Parsed, GraphError> {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .and_then(|l| l.split_whitespace().next());
    match first {
        Some("c") | Some("p") => parse_dimacs(text),
        _ => parse_edge_list(text),
    }
}

/// Erdős–Rényi graph `G(n, p)`.
///
/// Pairs `(i, j)` with `i < j` are visited in lexicographic order and each
/// consumes one `u64` from a ChaCha8 stream seeded with `seed`; the pair is
/// kept when the top 53 bits, read as a fraction of 2^53, fall below `p`.
/// The output is therefore fixed for a given `(n, p, seed)` on every platform.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (1u64 << 53) as f64;
    let mut edges = Vec::new();
    for i in 1..=n as u32 {
        for j in i + 1..=n as u32 {
            let u = (rng.next_u64() >> 11) as f64 * scale;
            if u < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_normalized(n, edges)
}

/// True iff no edge has both endpoints in `s`.
pub fn is_independent(g: &Graph, s: &VertexSet) -> Result<bool, GraphError> {
    if let Some(v) = s.iter().find(|v| !g.contains(*v)) {
        return Err(GraphError::UnknownVertex(v));
    }
    let members: Vec<VertexId> = s.iter().collect();
    for (a, &u) in members.iter().enumerate() {
        for &v in &members[a + 1..] {
            if g.adjacent(u, v) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Min-degree greedy independent set (ties broken by lowest index).
pub fn greedy_independent_set(g: &Graph) -> VertexSet {
    let mut alive = vec![true; g.n()];
    let mut out = VertexSet::new();
    loop {
        let pick = (0..g.n())
            .filter(|&i| alive[i])
            .min_by_key(|&i| {
                let v = VertexId::from_index(i);
                (g.neighbors(v).filter(|u| alive[u.index()]).count(), i)
            });
        let Some(i) = pick else { break };
        let v = VertexId::from_index(i);
        out.insert(v);
        alive[i] = false;
        for u in g.neighbors(v) {
            alive[u.index()] = false;
        }
    }
    out
}

/// Optimal independent set and its size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    pub alpha: usize,
    pub witness: VertexSet,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExactOutcome {
    Optimal(ExactResult),
    /// Node budget exhausted before optimality was proved. The incumbent is
    /// a valid independent set but not necessarily maximum.
    Unknown { incumbent: VertexSet, nodes: u64 },
}

impl ExactOutcome {
    pub fn optimal(&self) -> Option<&ExactResult> {
        match self {
            ExactOutcome::Optimal(r) => Some(r),
            ExactOutcome::Unknown { .. } => None,
        }
    }
}

trait Bits: Clone {
    fn zero(n: usize) -> Self;
    fn set(&mut self, i: usize);
    fn clear(&mut self, i: usize);
    fn and(&self, o: &Self) -> Self;
    fn and_not(&self, o: &Self) -> Self;
    fn count(&self) -> u32;
    fn first(&self) -> Option<usize>;
    fn for_each(&self, f: impl FnMut(usize));
}

impl Bits for u64 {
    fn zero(_: usize) -> Self {
        0
    }
    fn set(&mut self, i: usize) {
        *self |= 1 << i;
    }
    fn clear(&mut self, i: usize) {
        *self &= !(1 << i);
    }
    fn and(&self, o: &Self) -> Self {
        self & o
    }
    fn and_not(&self, o: &Self) -> Self {
        self & !o
    }
    fn count(&self) -> u32 {
        self.count_ones()
    }
    fn first(&self) -> Option<usize> {
        (*self != 0).then(|| self.trailing_zeros() as usize)
    }
    fn for_each(&self, mut f: impl FnMut(usize)) {
        let mut x = *self;
        while x != 0 {
            let i = x.trailing_zeros() as usize;
            f(i);
            x &= x - 1;
        }
    }
}

/// Multi-word fallback for graphs with more than 64 vertices.
#[derive(Clone)]
struct Wide(Vec<u64>);

impl Bits for Wide {
    fn zero(n: usize) -> Self {
        Wide(vec![0; words(n)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }
    fn and(&self, o: &Self) -> Self {
        Wide(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn and_not(&self, o: &Self) -> Self {
        Wide(self.0.iter().zip(&o.0).map(|(a, b)| a & !b).collect())
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }
    fn for_each(&self, mut f: impl FnMut(usize)) {
        for (k, &w) in self.0.iter().enumerate() {
            w.for_each(|i| f(k * 64 + i));
        }
    }
}

struct BranchAndBound<B: Bits> {
    adj: Vec<B>,
    best: Vec<usize>,
    nodes: u64,
    budget: Option<u64>,
    exhausted: bool,
}

impl<B: Bits> BranchAndBound<B> {
    /// Greedy clique cover of `p`; its size bounds the independence number
    /// of the induced subgraph from above.
    fn clique_cover(&self, p: &B) -> usize {
        let mut rest = p.clone();
        let mut cliques = 0;
        while let Some(v) = rest.first() {
            rest.clear(v);
            let mut cand = rest.and(&self.adj[v]);
            while let Some(u) = cand.first() {
                rest.clear(u);
                cand = cand.and(&self.adj[u]);
            }
            cliques += 1;
        }
        cliques
    }

    fn expand(&mut self, mut p: B, cur: &mut Vec<usize>) {
        self.nodes += 1;
        if let Some(b) = self.budget {
            if self.nodes > b {
                self.exhausted = true;
                return;
            }
        }
        let base = cur.len();
        // vertices of degree <= 1 inside p can always be taken
        loop {
            let mut forced = None;
            let mut branch = None;
            let mut max_deg = 0;
            p.for_each(|v| {
                if forced.is_some() {
                    return;
                }
                let d = p.and(&self.adj[v]).count();
                if d <= 1 {
                    forced = Some(v);
                } else if d > max_deg {
                    max_deg = d;
                    branch = Some(v);
                }
            });
            if let Some(v) = forced {
                cur.push(v);
                p.clear(v);
                p = p.and_not(&self.adj[v]);
                continue;
            }
            match branch {
                None => {
                    if cur.len() > self.best.len() {
                        self.best = cur.clone();
                    }
                }
                Some(v) => {
                    if cur.len() + self.clique_cover(&p) > self.best.len() {
                        let mut with = p.and_not(&self.adj[v]);
                        with.clear(v);
                        cur.push(v);
                        self.expand(with, cur);
                        cur.pop();
                        if !self.exhausted {
                            let mut without = p.clone();
                            without.clear(v);
                            self.expand(without, cur);
                        }
                    }
                }
            }
            break;
        }
        cur.truncate(base);
    }
}

fn run_bb<B: Bits>(g: &Graph, budget: Option<u64>) -> ExactOutcome {
    let n = g.n();
    let mut adj = vec![B::zero(n); n];
    for &(i, j) in g.edges() {
        adj[i as usize - 1].set(j as usize - 1);
        adj[j as usize - 1].set(i as usize - 1);
    }
    let mut all = B::zero(n);
    for i in 0..n {
        all.set(i);
    }
    let seed: Vec<usize> = greedy_independent_set(g).iter().map(VertexId::index).collect();
    let mut bb = BranchAndBound { adj, best: seed, nodes: 0, budget, exhausted: false };
    bb.expand(all, &mut Vec::new());
    let witness: VertexSet = bb.best.iter().map(|&i| VertexId::from_index(i)).collect();
    if bb.exhausted {
        ExactOutcome::Unknown { incumbent: witness, nodes: bb.nodes }
    } else {
        ExactOutcome::Optimal(ExactResult { alpha: witness.len(), witness })
    }
}

/// Maximum independent set by branch and bound with a greedy clique-cover
/// bound. `budget` caps the number of search nodes; when it runs out the
/// outcome is [`ExactOutcome::Unknown`], never a wrong optimum.
pub fn exact_mis(g: &Graph, budget: Option<u64>) -> ExactOutcome {
    if g.n() <= 64 {
        run_bb::<u64>(g, budget)
    } else {
        run_bb::<Wide>(g, budget)
    }
}
