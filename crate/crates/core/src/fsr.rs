//! Feedback logics and the shift-register permutation they induce.
//!
//! A width-`n` register maps the `n`-tuple `(x0, x1, …, x_{n-1})` to
//! `(x1, …, x_{n-1}, x0 ⊕ f(x1, …, x_{n-1}))`. Tuples are packed into
//! integers with `x0` as the most significant bit, so an [`Edge`] is an
//! `n`-bit value and a [`Vertex`] an `(n-1)`-bit value. In de Bruijn graph
//! terms the edge `e` runs from the vertex `e >> 1` to the vertex
//! `e mod 2^(n-1)`, and the logic resolves every vertex by choosing which
//! incoming edge continues into which outgoing one.

use std::collections::HashMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::Perm;

/// Widest register whose edges fit the packed `u64` representation.
pub const MAX_EDGE_WIDTH: u32 = 63;

/// Widest register for which a full truth table is materialized.
pub const MAX_LOGIC_WIDTH: u32 = 32;

/// Default cap on `n` for [`FeedbackLogic::decompose`]: the visited map costs `2^n` bits.
pub const DEFAULT_DECOMPOSE_WIDTH: u32 = 32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FsrError {
    #[error("register width {n} is outside 1..={max}")]
    WidthOutOfRange { n: u32, max: u32 },
    #[error("edge {edge} is not an {n}-bit tuple")]
    EdgeOutOfRange { edge: u64, n: u32 },
    #[error("vertex {vertex} is not an {bits}-bit tuple", bits = n - 1)]
    VertexOutOfRange { vertex: u64, n: u32 },
    #[error("width {n} exceeds the memory budget for a 2^n-bit visited map (max width {max})")]
    MemoryBudget { n: u32, max: u32 },
    #[error("an edge sample must contain at least {min} edge(s)")]
    SampleTooSmall { min: usize },
    #[error("malformed logic dump: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Edge(pub u64);

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vertex(pub u64);

impl Edge {
    /// The vertex this edge leaves: its first `n-1` bits.
    pub fn tail(self) -> Vertex {
        Vertex(self.0 >> 1)
    }

    /// The vertex this edge enters: its last `n-1` bits.
    pub fn head(self, n: u32) -> Vertex {
        Vertex(self.0 & vertex_mask(n))
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[inline]
pub(crate) fn vertex_mask(n: u32) -> u64 {
    (1u64 << (n - 1)) - 1
}

pub(crate) fn check_edge_width(n: u32) -> Result<(), FsrError> {
    if n == 0 || n > MAX_EDGE_WIDTH {
        return Err(FsrError::WidthOutOfRange { n, max: MAX_EDGE_WIDTH });
    }
    Ok(())
}

/// A Boolean function `f: F_2^{n-1} -> F_2` stored as a packed truth table
/// indexed by vertex value.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FeedbackLogic {
    n: u32,
    table: Vec<u64>,
}

impl FeedbackLogic {
    /// The all-zero logic: the pure cycling register.
    pub fn zero(n: u32) -> Result<Self, FsrError> {
        if n == 0 || n > MAX_LOGIC_WIDTH {
            return Err(FsrError::WidthOutOfRange { n, max: MAX_LOGIC_WIDTH });
        }
        let bits = 1u64 << (n - 1);
        Ok(FeedbackLogic { n, table: vec![0; bits.div_ceil(64) as usize] })
    }

    pub fn from_fn(n: u32, mut f: impl FnMut(Vertex) -> bool) -> Result<Self, FsrError> {
        let mut logic = Self::zero(n)?;
        for v in 0..logic.num_vertices() {
            if f(Vertex(v)) {
                logic.set(Vertex(v), true);
            }
        }
        Ok(logic)
    }

    /// Truth table given vertex by vertex (`bits[v]` is `f(v)`).
    pub fn from_bits(n: u32, bits: &[bool]) -> Result<Self, FsrError> {
        let logic = Self::zero(n)?;
        if bits.len() as u64 != logic.num_vertices() {
            return Err(FsrError::Parse(format!(
                "expected {} truth-table bits for n={n}, got {}",
                logic.num_vertices(),
                bits.len()
            )));
        }
        Self::from_fn(n, |v| bits[v.0 as usize])
    }

    /// A uniformly random logic: every table bit is a fair coin.
    pub fn random<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<Self, FsrError> {
        let mut logic = Self::zero(n)?;
        for word in logic.table.iter_mut() {
            *word = rng.random();
        }
        let bits = logic.num_vertices();
        if bits < 64 {
            logic.table[0] &= (1u64 << bits) - 1;
        }
        Ok(logic)
    }

    pub fn width(&self) -> u32 {
        self.n
    }

    /// `N = 2^n`.
    pub fn num_edges(&self) -> u64 {
        1u64 << self.n
    }

    pub fn num_vertices(&self) -> u64 {
        1u64 << (self.n - 1)
    }

    #[inline]
    pub fn get(&self, v: Vertex) -> bool {
        (self.table[(v.0 >> 6) as usize] >> (v.0 & 63)) & 1 == 1
    }

    pub fn set(&mut self, v: Vertex, value: bool) {
        let word = &mut self.table[(v.0 >> 6) as usize];
        if value {
            *word |= 1 << (v.0 & 63);
        } else {
            *word &= !(1 << (v.0 & 63));
        }
    }

    pub fn flip(&mut self, v: Vertex) {
        self.table[(v.0 >> 6) as usize] ^= 1 << (v.0 & 63);
    }

    /// The logic complemented on the vertex set `u` (repeats count once).
    pub fn toggled(&self, u: &[Vertex]) -> Result<FeedbackLogic, FsrError> {
        let mut out = self.clone();
        let mut seen = std::collections::HashSet::new();
        for &v in u {
            self.check_vertex(v)?;
            if seen.insert(v) {
                out.flip(v);
            }
        }
        Ok(out)
    }

    pub fn check_edge(&self, e: Edge) -> Result<(), FsrError> {
        if e.0 >= self.num_edges() {
            return Err(FsrError::EdgeOutOfRange { edge: e.0, n: self.n });
        }
        Ok(())
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<(), FsrError> {
        if v.0 >= self.num_vertices() {
            return Err(FsrError::VertexOutOfRange { vertex: v.0, n: self.n });
        }
        Ok(())
    }

    /// Unchecked successor on packed edge values; `e` must be below `2^n`.
    #[inline]
    pub fn advance(&self, e: u64) -> u64 {
        let v = e & vertex_mask(self.n);
        let x0 = e >> (self.n - 1);
        let fb = (self.table[(v >> 6) as usize] >> (v & 63)) & 1;
        (v << 1) | (x0 ^ fb)
    }

    /// The shift-register permutation applied to one edge.
    pub fn step(&self, e: Edge) -> Result<Edge, FsrError> {
        self.check_edge(e)?;
        Ok(Edge(self.advance(e.0)))
    }

    /// `t` steps from `e`, keeping every intermediate edge.
    pub fn segment(&self, e: Edge, t: usize) -> Result<Segment, FsrError> {
        self.check_edge(e)?;
        let mut edges = Vec::with_capacity(t + 1);
        let mut x = e.0;
        edges.push(e);
        for _ in 0..t {
            x = self.advance(x);
            edges.push(Edge(x));
        }
        Ok(Segment { n: self.n, edges })
    }

    pub fn decompose(&self) -> Result<CycleDecomposition, FsrError> {
        self.decompose_with_budget(DEFAULT_DECOMPOSE_WIDTH)
    }

    /// Cycle decomposition, refusing widths whose visited map would exceed `max_width`.
    pub fn decompose_with_budget(&self, max_width: u32) -> Result<CycleDecomposition, FsrError> {
        if self.n > max_width {
            return Err(FsrError::MemoryBudget { n: self.n, max: max_width });
        }
        let cycles = self.cycles_in_discovery_order();
        let mut pairs: Vec<(u64, Edge)> = cycles.into_iter().map(|(rep, len)| (len, rep)).collect();
        pairs.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        Ok(CycleDecomposition {
            n: self.n,
            lengths: pairs.iter().map(|p| p.0).collect(),
            representatives: pairs.iter().map(|p| p.1).collect(),
        })
    }

    /// `(representative, length)` for every cycle, by increasing representative.
    fn cycles_in_discovery_order(&self) -> Vec<(Edge, u64)> {
        let total = self.num_edges();
        let mut visited = vec![0u64; total.div_ceil(64) as usize];
        let mut cycles = Vec::new();
        for start in 0..total {
            if (visited[(start >> 6) as usize] >> (start & 63)) & 1 == 1 {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            loop {
                visited[(x >> 6) as usize] |= 1 << (x & 63);
                len += 1;
                x = self.advance(x);
                if x == start {
                    break;
                }
            }
            cycles.push((Edge(start), len));
        }
        cycles
    }

    /// Number of cycles of the permutation.
    pub fn cycle_count(&self) -> Result<usize, FsrError> {
        if self.n > DEFAULT_DECOMPOSE_WIDTH {
            return Err(FsrError::MemoryBudget { n: self.n, max: DEFAULT_DECOMPOSE_WIDTH });
        }
        Ok(self.cycles_in_discovery_order().len())
    }

    /// Cycle lengths in age order: the first cycle holds a uniform random
    /// edge, each later one a uniform random edge among those not yet covered.
    pub fn age_ordered_lengths<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<AgeOrderedLengths, FsrError> {
        Ok(self.decompose()?.age_ordered(rng))
    }

    /// `π_f` relativized to `edges`: repeats are dropped left to right, then
    /// point `i` maps to the first sampled edge reached by iterating from edge `i`.
    pub fn relativize(&self, edges: &[Edge]) -> Result<Perm, FsrError> {
        if edges.is_empty() {
            return Err(FsrError::SampleTooSmall { min: 1 });
        }
        for &e in edges {
            self.check_edge(e)?;
        }
        let mut distinct: Vec<u64> = Vec::with_capacity(edges.len());
        for e in edges {
            if !distinct.contains(&e.0) {
                distinct.push(e.0);
            }
        }
        let images = if distinct.len() <= 16 {
            distinct
                .iter()
                .map(|&start| {
                    let mut x = self.advance(start);
                    loop {
                        if let Some(label) = distinct.iter().position(|&d| d == x) {
                            break label;
                        }
                        x = self.advance(x);
                    }
                })
                .collect()
        } else {
            let labels: HashMap<u64, usize> = distinct.iter().enumerate().map(|(i, &d)| (d, i)).collect();
            distinct
                .iter()
                .map(|&start| {
                    let mut x = self.advance(start);
                    loop {
                        if let Some(&label) = labels.get(&x) {
                            break label;
                        }
                        x = self.advance(x);
                    }
                })
                .collect()
        };
        Ok(Perm::from_images(images).expect("successor-of-sample map of a permutation is a bijection"))
    }

    /// Whether all `edges` lie on a single cycle.
    pub fn same_cycle_indicator(&self, edges: &[Edge]) -> Result<bool, FsrError> {
        if edges.len() < 2 {
            return Err(FsrError::SampleTooSmall { min: 2 });
        }
        Ok(self.relativize(edges)?.is_unicyclic())
    }

    /// Text dump: a `fsr n=<n>` header, then the truth table as hexadecimal,
    /// most significant vertex first, 64 digits per line.
    pub fn to_hex_dump(&self) -> String {
        let bits = self.num_vertices();
        let digits = bits.div_ceil(4);
        let mut hex = String::with_capacity(digits as usize);
        for d in (0..digits).rev() {
            let mut nibble = 0u8;
            for b in (0..4).rev() {
                let v = 4 * d + b;
                nibble <<= 1;
                if v < bits && self.get(Vertex(v)) {
                    nibble |= 1;
                }
            }
            hex.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        let mut out = format!("fsr n={}\n", self.n);
        for chunk in hex.as_bytes().chunks(64) {
            out.push_str(std::str::from_utf8(chunk).unwrap());
            out.push('\n');
        }
        out
    }

    pub fn from_hex_dump(text: &str) -> Result<Self, FsrError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| FsrError::Parse("empty input".into()))?;
        let n: u32 = header
            .trim()
            .strip_prefix("fsr n=")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| FsrError::Parse(format!("bad header {header:?}")))?;
        let mut logic = Self::zero(n)?;
        let hex: Vec<u8> = lines.flat_map(|l| l.bytes()).filter(|b| !b.is_ascii_whitespace()).collect();
        let bits = logic.num_vertices();
        let digits = bits.div_ceil(4);
        if hex.len() as u64 != digits {
            return Err(FsrError::Parse(format!("expected {digits} hex digits, found {}", hex.len())));
        }
        for (pos, &c) in hex.iter().enumerate() {
            let nibble = (c as char)
                .to_digit(16)
                .ok_or_else(|| FsrError::Parse(format!("invalid hex digit {:?}", c as char)))? as u64;
            let d = digits - 1 - pos as u64;
            for b in 0..4 {
                if (nibble >> b) & 1 == 1 {
                    let v = 4 * d + b;
                    if v >= bits {
                        return Err(FsrError::Parse(format!("bit set beyond vertex {}", bits - 1)));
                    }
                    logic.set(Vertex(v), true);
                }
            }
        }
        Ok(logic)
    }
}

/// `t+1` consecutive edges of one orbit.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Segment {
    n: u32,
    edges: Vec<Edge>,
}

impl Segment {
    /// Wraps explicit edges; consecutive edges must overlap in `n-1` bits.
    pub fn from_edges(n: u32, edges: Vec<Edge>) -> Result<Self, FsrError> {
        check_edge_width(n)?;
        if edges.is_empty() {
            return Err(FsrError::SampleTooSmall { min: 1 });
        }
        for &e in &edges {
            if e.0 >> n != 0 {
                return Err(FsrError::EdgeOutOfRange { edge: e.0, n });
            }
        }
        if edges.windows(2).any(|w| w[0].head(n) != w[1].tail()) {
            return Err(FsrError::Parse("consecutive edges do not share a vertex".into()));
        }
        Ok(Segment { n, edges })
    }

    /// Reads the `L - n + 1` overlapping `n`-bit windows of a bit string.
    pub fn from_bits(n: u32, bits: &[u8]) -> Result<Self, FsrError> {
        check_edge_width(n)?;
        if bits.len() < n as usize {
            return Err(FsrError::SampleTooSmall { min: n as usize });
        }
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut x = 0u64;
        let mut edges = Vec::with_capacity(bits.len() + 1 - n as usize);
        for (i, &b) in bits.iter().enumerate() {
            x = ((x << 1) | (b & 1) as u64) & mask;
            if i + 1 >= n as usize {
                edges.push(Edge(x));
            }
        }
        Ok(Segment { n, edges })
    }

    pub fn width(&self) -> u32 {
        self.n
    }

    /// Number of steps, `t`.
    pub fn len_steps(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn start(&self) -> Edge {
        self.edges[0]
    }

    pub fn end(&self) -> Edge {
        *self.edges.last().unwrap()
    }

    /// The `t+2` vertices `v_0 … v_{t+1}`; edge `i` runs from `v_i` to `v_{i+1}`.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = self.edges.iter().map(|e| e.tail()).collect();
        out.push(self.end().head(self.n));
        out
    }

    /// The `t+n` bits spelled by the segment.
    pub fn bits(&self) -> Vec<u8> {
        let n = self.n as usize;
        let first = self.edges[0].0;
        let mut out: Vec<u8> = (0..n).map(|i| ((first >> (n - 1 - i)) & 1) as u8).collect();
        out.extend(self.edges[1..].iter().map(|e| (e.0 & 1) as u8));
        out
    }
}

/// Cycle lengths sorted nonincreasing, each with its minimum edge.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CycleDecomposition {
    pub n: u32,
    pub lengths: Vec<u64>,
    #[serde(skip)]
    pub representatives: Vec<Edge>,
}

impl CycleDecomposition {
    pub fn num_edges(&self) -> u64 {
        1u64 << self.n
    }

    pub fn cycle_count(&self) -> usize {
        self.lengths.len()
    }

    /// Lengths divided by `N`.
    pub fn scaled(&self) -> Vec<f64> {
        let total = self.num_edges() as f64;
        self.lengths.iter().map(|&l| l as f64 / total).collect()
    }

    /// Size-biased ordering of the cycles. A uniform draw among the
    /// uncovered edges, grouped cycle by cycle in representative order,
    /// lands in a cycle with probability proportional to its length.
    pub fn age_ordered<R: Rng + ?Sized>(&self, rng: &mut R) -> AgeOrderedLengths {
        let mut pool: Vec<(Edge, u64)> = self.representatives.iter().copied().zip(self.lengths.iter().copied()).collect();
        pool.sort_by_key(|p| p.0);
        let mut remaining = self.num_edges();
        let mut lengths = Vec::with_capacity(pool.len());
        while !pool.is_empty() {
            let mut r = rng.random_range(0..remaining);
            let idx = pool
                .iter()
                .position(|&(_, len)| {
                    if r < len {
                        true
                    } else {
                        r -= len;
                        false
                    }
                })
                .expect("uncovered edge count matches remaining cycle lengths");
            let (_, len) = pool.remove(idx);
            remaining -= len;
            lengths.push(len);
        }
        AgeOrderedLengths { n: self.n, lengths }
    }

    /// `{"n":…,"lengths":[…]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("decomposition serializes")
    }
}

/// Cycle lengths `A_1, A_2, …` in age order.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AgeOrderedLengths {
    pub n: u32,
    pub lengths: Vec<u64>,
}

impl AgeOrderedLengths {
    pub fn scaled(&self) -> Vec<f64> {
        let total = (1u64 << self.n) as f64;
        self.lengths.iter().map(|&l| l as f64 / total).collect()
    }
}
