//! Coin-toss editing.
//!
//! A coin sequence `C_0 … C_{L-1}` becomes the bit sequence spelled by a
//! segment of `π_f` either sequentially (learning `f` one vertex at a time)
//! or by the shotgun rule, which complements the last bit of the right copy of
//! every leftmost `n`-repeat. The good event `G` lists conditions under which
//! the two agree; [`kt_sequential_edit`] and [`gkt_check`] do the same for `k`
//! walks carved out of one coin sequence.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fsr::{Edge, FsrError, Segment, Vertex, MAX_EDGE_WIDTH};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EditError {
    #[error("register width {n} is outside {min}..={max}")]
    WidthOutOfRange { n: usize, min: usize, max: usize },
    #[error("sequence of length {len} is shorter than {min}")]
    TooShort { len: usize, min: usize },
    #[error("expected {expected} coins, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("repeat length must be at least 1")]
    ZeroRepeatLength,
    #[error("invalid bit {0:?}; expected 0 or 1")]
    InvalidBit(char),
    #[error("segments must share one width")]
    MixedWidths,
    #[error(transparent)]
    Fsr(#[from] FsrError),
}

/// A finite 0/1 sequence, one byte per bit.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct BitSeq {
    bits: Vec<u8>,
}

impl BitSeq {
    pub fn new(bits: Vec<u8>) -> Result<Self, EditError> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(EditError::InvalidBit(char::from(b'0' + b.min(9))));
        }
        Ok(BitSeq { bits })
    }

    pub fn zeros(len: usize) -> Self {
        BitSeq { bits: vec![0; len] }
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut bits = Vec::with_capacity(len);
        while bits.len() < len {
            let word: u64 = rng.random();
            let take = (len - bits.len()).min(64);
            bits.extend((0..take).map(|k| ((word >> k) & 1) as u8));
        }
        BitSeq { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> u8 {
        self.bits[i]
    }

    /// The `m` bits from `i`, first bit most significant; `m <= 64`.
    pub fn window(&self, i: usize, m: usize) -> u64 {
        pack(&self.bits[i..i + m])
    }
}

impl fmt::Display for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitSeq {
    type Err = EditError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(EditError::InvalidBit(other)),
            })
            .collect::<Result<Vec<u8>, _>>()
            .map(|bits| BitSeq { bits })
    }
}

impl Serialize for BitSeq {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitSeq {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn pack(bits: &[u8]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
}

fn check_width(n: usize, min: usize) -> Result<(), EditError> {
    if n < min || n > MAX_EDGE_WIDTH as usize {
        return Err(EditError::WidthOutOfRange { n, min, max: MAX_EDGE_WIDTH as usize });
    }
    Ok(())
}

/// An `m`-long repeat at `(i, j)`, `i < j`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Repeat {
    pub i: usize,
    pub j: usize,
    pub m: usize,
}

/// One `{"i":…,"j":…,"m":…}` object per line.
pub fn repeats_to_json_lines(repeats: &[Repeat]) -> String {
    repeats.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect()
}

const HASH_MOD: u64 = (1 << 61) - 1;
const HASH_BASE: u64 = 0x1f3d_5b79_a2c4_e681 % HASH_MOD;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % HASH_MOD as u128) as u64
}

/// Polynomial hashes of every `m`-window, mod the Mersenne prime `2^61 - 1`.
fn rolling_hashes(s: &[u8], m: usize) -> Vec<u64> {
    if m > s.len() {
        return Vec::new();
    }
    let mut top = 1u64;
    for _ in 1..m {
        top = mul_mod(top, HASH_BASE);
    }
    let mut h = 0u64;
    for &b in &s[..m] {
        h = (mul_mod(h, HASH_BASE) + b as u64 + 1) % HASH_MOD;
    }
    let mut out = Vec::with_capacity(s.len() - m + 1);
    out.push(h);
    for i in m..s.len() {
        let drop = mul_mod(s[i - m] as u64 + 1, top);
        h = (h + HASH_MOD - drop) % HASH_MOD;
        h = (mul_mod(h, HASH_BASE) + s[i] as u64 + 1) % HASH_MOD;
        out.push(h);
    }
    out
}

/// Positions of every `m`-window, grouped by exact content (hash buckets
/// split on verification), each group in increasing order.
fn equal_window_groups(s: &[u8], m: usize) -> Vec<Vec<usize>> {
    let hashes = rolling_hashes(s, m);
    let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();
    for (p, &h) in hashes.iter().enumerate() {
        buckets.entry(h).or_default().push(p);
    }
    let mut groups = Vec::new();
    for (_, positions) in buckets {
        if positions.len() < 2 {
            continue;
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for p in positions {
            match classes.iter_mut().find(|c| s[c[0]..c[0] + m] == s[p..p + m]) {
                Some(c) => c.push(p),
                None => classes.push(vec![p]),
            }
        }
        groups.extend(classes.into_iter().filter(|c| c.len() > 1));
    }
    groups
}

fn leftmost_repeats(s: &[u8], m: usize) -> Vec<Repeat> {
    let mut out = Vec::new();
    for group in equal_window_groups(s, m) {
        for (x, &i) in group.iter().enumerate() {
            for &j in &group[x + 1..] {
                if i == 0 || s[i - 1] != s[j - 1] {
                    out.push(Repeat { i, j, m });
                }
            }
        }
    }
    out.sort_unstable();
    out
}

fn has_repeat(s: &[u8], m: usize) -> bool {
    !equal_window_groups(s, m).is_empty()
}

/// All leftmost `m`-long repeats, sorted by `(i, j)`.
pub fn find_leftmost_repeats(s: &BitSeq, m: usize) -> Result<Vec<Repeat>, EditError> {
    if m == 0 {
        return Err(EditError::ZeroRepeatLength);
    }
    if m > s.len() {
        return Err(EditError::TooShort { len: s.len(), min: m });
    }
    Ok(leftmost_repeats(&s.bits, m))
}

/// Result of sequential editing.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EditOutcome {
    pub n: usize,
    pub output: BitSeq,
    /// Feedback bits fixed along the way.
    pub learned: HashMap<Vertex, bool>,
    /// Times `i` at which `b_{i+n}` was forced and differed from `C_{i+n}`.
    pub actual_edits: Vec<usize>,
    /// Times `i` at which `b_{i+n}` was forced.
    pub potential_edits: Vec<usize>,
}

struct Editor<'a> {
    n: usize,
    coins: &'a [u8],
    out: Vec<u8>,
    learned: HashMap<Vertex, bool>,
    actual: Vec<usize>,
    potential: Vec<usize>,
}

impl<'a> Editor<'a> {
    fn new(n: usize, coins: &'a [u8]) -> Self {
        Editor { n, coins, out: vec![0; coins.len()], learned: HashMap::new(), actual: Vec::new(), potential: Vec::new() }
    }

    /// Rule 1 on `n` bits from `base`, then Rule 2 for times `base..base + steps`.
    fn run_block(&mut self, base: usize, steps: usize) {
        let n = self.n;
        self.out[base..base + n].copy_from_slice(&self.coins[base..base + n]);
        let mask = if n == 1 { 0 } else { (1u64 << (n - 1)) - 1 };
        let mut v = pack(&self.out[base + 1..base + n]);
        for i in base..base + steps {
            let vertex = Vertex(v);
            let bit = match self.learned.get(&vertex) {
                Some(&fv) => {
                    let b = self.out[i] ^ fv as u8;
                    self.potential.push(i);
                    if b != self.coins[i + n] {
                        self.actual.push(i);
                    }
                    b
                }
                None => {
                    let b = self.coins[i + n];
                    self.learned.insert(vertex, (b ^ self.out[i]) == 1);
                    b
                }
            };
            self.out[i + n] = bit;
            v = ((v << 1) | bit as u64) & mask;
        }
    }

    fn finish(self) -> EditOutcome {
        EditOutcome {
            n: self.n,
            output: BitSeq { bits: self.out },
            learned: self.learned,
            actual_edits: self.actual,
            potential_edits: self.potential,
        }
    }
}

/// Rules 1 and 2 on `n + t` coins.
pub fn sequential_edit(coins: &BitSeq, n: usize) -> Result<EditOutcome, EditError> {
    check_width(n, 1)?;
    if coins.len() < n {
        return Err(EditError::TooShort { len: coins.len(), min: n });
    }
    let mut editor = Editor::new(n, &coins.bits);
    editor.run_block(0, coins.len() - n);
    Ok(editor.finish())
}

/// Complements `C_{j+n-1}` for every leftmost `n`-repeat `(i, j)`.
pub fn shotgun_edit(coins: &BitSeq, n: usize) -> Result<(BitSeq, Vec<Repeat>), EditError> {
    check_width(n, 1)?;
    let repeats = find_leftmost_repeats(coins, n)?;
    let mut out = coins.bits.clone();
    let flips: HashSet<usize> = repeats.iter().map(|r| r.j + n - 1).collect();
    for p in flips {
        out[p] ^= 1;
    }
    Ok((BitSeq { bits: out }, repeats))
}

/// The six conditions of the good event and their conjunction.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GoodEventReport {
    pub a: bool,
    pub b: bool,
    pub c: bool,
    pub d: bool,
    pub e: bool,
    pub f: bool,
    pub overall: bool,
}

impl GoodEventReport {
    fn new(a: bool, b: bool, c: bool, d: bool, e: bool, f: bool) -> Self {
        GoodEventReport { a, b, c, d, e, f, overall: a && b && c && d && e && f }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap()
    }
}

/// Prefix counts of a 0/1 indicator, for interval queries.
struct Marks {
    prefix: Vec<usize>,
}

impl Marks {
    fn new(len: usize, positions: impl IntoIterator<Item = usize>) -> Self {
        let mut hit = vec![0usize; len];
        for p in positions {
            hit[p] = 1;
        }
        let mut prefix = vec![0; len + 1];
        for (i, h) in hit.into_iter().enumerate() {
            prefix[i + 1] = prefix[i] + h;
        }
        Marks { prefix }
    }

    /// Whether any mark lies in `lo..=hi`.
    fn any(&self, lo: usize, hi: usize) -> bool {
        self.prefix[hi + 1] > self.prefix[lo]
    }
}

/// Evaluates conditions (a)–(f) on `n + t` coins.
pub fn good_event_check(coins: &BitSeq, n: usize) -> Result<GoodEventReport, EditError> {
    check_width(n, 2)?;
    let s = &coins.bits;
    let len = s.len();
    if len < n {
        return Err(EditError::TooShort { len, min: n });
    }
    let h = n - 1;
    let repeats = leftmost_repeats(s, n);
    let mut flips: Vec<usize> = repeats.iter().map(|r| r.j + n - 1).collect();
    flips.sort_unstable();
    flips.dedup();

    // (a) the initial n-word and its 1-offs occur nowhere else
    let first = pack(&s[..n]);
    let mut a = true;
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut w = first;
    for p in 1..=len - n {
        w = ((w << 1) | s[p + n - 1] as u64) & mask;
        if (w ^ first).count_ones() <= 1 {
            a = false;
            break;
        }
    }

    // (b) no I_k meets any J_k'
    let covered_by_i = {
        let mut diff = vec![0i64; len + 1];
        for r in &repeats {
            diff[r.i] += 1;
            diff[r.i + n] -= 1;
        }
        let mut run = 0;
        let cover: Vec<usize> = (0..len)
            .filter(|&p| {
                run += diff[p];
                run > 0
            })
            .collect();
        Marks::new(len, cover)
    };
    let b = repeats.iter().all(|r| !covered_by_i.any(r.j, r.j + n - 1));

    // (c) the I's are pairwise disjoint, and so are the J's
    let disjoint = |mut starts: Vec<usize>| {
        starts.sort_unstable();
        starts.windows(2).all(|w| w[1] - w[0] >= n)
    };
    let c = disjoint(repeats.iter().map(|r| r.i).collect()) && disjoint(repeats.iter().map(|r| r.j).collect());

    // (d) first-generation (n-1)-words are new and pairwise different
    let d = if h == 0 {
        true
    } else {
        let zero_gen: HashSet<u64> = (0..=len - h).map(|p| pack(&s[p..p + h])).collect();
        let mut first_gen: HashSet<u64> = HashSet::new();
        let mut ok = true;
        'outer: for &p in &flips {
            let lo = p.saturating_sub(h - 1);
            let hi = p.min(len - h);
            for start in lo..=hi {
                let word = pack(&s[start..start + h]) ^ (1u64 << (h - 1 - (p - start)));
                if zero_gen.contains(&word) || !first_gen.insert(word) {
                    ok = false;
                    break 'outer;
                }
            }
        }
        ok
    };

    // (e) flip sites avoid every leftmost (n-1)-repeat and the bits just before it
    let e = if h == 0 {
        true
    } else {
        let marks = Marks::new(len, flips.iter().copied());
        leftmost_repeats(s, h).iter().all(|r| {
            !(marks.any(r.i, r.i + h - 1)
                || marks.any(r.j, r.j + h - 1)
                || (r.i > 0 && marks.any(r.i - 1, r.i - 1))
                || marks.any(r.j - 1, r.j - 1))
        })
    };

    // (f) no (2n-1)-repeat
    let f = 2 * n - 1 > len || !has_repeat(s, 2 * n - 1);

    Ok(GoodEventReport::new(a, b, c, d, e, f))
}

/// Outcome of checking the deterministic consequences of `G`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DetGCheck {
    pub report: GoodEventReport,
    /// Sequential and shotgun outputs agree; `None` off `G`.
    pub outputs_agree: Option<bool>,
    /// Leftmost `(n-1)`-repeats of output and coins coincide; `None` off `G`.
    pub repeats_agree: Option<bool>,
}

impl DetGCheck {
    pub fn holds(&self) -> bool {
        self.outputs_agree.unwrap_or(true) && self.repeats_agree.unwrap_or(true)
    }
}

pub fn det_g_check(coins: &BitSeq, n: usize) -> Result<DetGCheck, EditError> {
    let report = good_event_check(coins, n)?;
    if !report.overall {
        return Ok(DetGCheck { report, outputs_agree: None, repeats_agree: None });
    }
    let seq = sequential_edit(coins, n)?;
    let (shot, _) = shotgun_edit(coins, n)?;
    let repeats_out = leftmost_repeats(&seq.output.bits, n - 1);
    let repeats_in = leftmost_repeats(&coins.bits, n - 1);
    Ok(DetGCheck {
        report,
        outputs_agree: Some(seq.output == shot),
        repeats_agree: Some(repeats_out == repeats_in),
    })
}

/// On `G`, sequential and shotgun edits agree and leftmost `(n-1)`-repeats
/// stay put. Vacuously true off `G`.
pub fn verify_det_g(coins: &BitSeq, n: usize) -> Result<bool, EditError> {
    Ok(det_g_check(coins, n)?.holds())
}

/// `k` walks of length `t` from `k(n + t)` coins.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KtEditOutcome {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub starts: Vec<Edge>,
    pub segments: Vec<Segment>,
    /// The de Bruijn bits, suspension blocks included.
    pub bits: BitSeq,
    pub learned: HashMap<Vertex, bool>,
    pub actual_edits: Vec<usize>,
    pub potential_edits: Vec<usize>,
}

/// Sequential editing suspended for `n` coins at the start of each walk;
/// learned feedback bits carry over between walks.
pub fn kt_sequential_edit(coins: &BitSeq, n: usize, k: usize, t: usize) -> Result<KtEditOutcome, EditError> {
    check_width(n, 1)?;
    let expected = k * (n + t);
    if coins.len() != expected {
        return Err(EditError::LengthMismatch { expected, actual: coins.len() });
    }
    let mut editor = Editor::new(n, &coins.bits);
    for a in 0..k {
        editor.run_block(a * (n + t), t);
    }
    let out = editor.finish();
    let segments = (0..k)
        .map(|a| {
            let base = a * (n + t);
            Segment::from_bits(n as u32, &out.output.bits[base..base + n + t])
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(KtEditOutcome {
        n,
        k,
        t,
        starts: segments.iter().map(Segment::start).collect(),
        segments,
        bits: out.output,
        learned: out.learned,
        actual_edits: out.actual_edits,
        potential_edits: out.potential_edits,
    })
}

/// Start positions `a(n+t)-n+2 .. a(n+t)` (half open), `a = 1..k-1`, of the
/// `(n-1)`-words read while editing is suspended. The words just outside,
/// at `a(n+t)-n+1` and `a(n+t)`, need no entry of their own: an exact match
/// there shifts to a Hamming-1 match one step inward.
pub fn suspension_indices(n: usize, k: usize, t: usize) -> Vec<usize> {
    (1..k).flat_map(|a| a * (n + t) + 2 - n..a * (n + t)).collect()
}

/// The bad event: some `(n-1)`-word starting at a suspension index lies
/// within Hamming distance 1 of the word at some other index.
pub fn bad_event(coins: &BitSeq, n: usize, k: usize, t: usize) -> Result<bool, EditError> {
    check_width(n, 2)?;
    let expected = k * (n + t);
    if coins.len() != expected {
        return Err(EditError::LengthMismatch { expected, actual: coins.len() });
    }
    let h = n - 1;
    let s = &coins.bits;
    let mut positions: HashMap<u64, Vec<usize>> = HashMap::new();
    for p in 0..=s.len() - h {
        positions.entry(pack(&s[p..p + h])).or_default().push(p);
    }
    let hit = |word: u64, j: usize| positions.get(&word).is_some_and(|ps| ps.iter().any(|&p| p != j));
    Ok(suspension_indices(n, k, t).into_iter().any(|j| {
        let w = pack(&s[j..j + h]);
        hit(w, j) || (0..h).any(|bit| hit(w ^ (1 << bit), j))
    }))
}

/// `G` on all `k(n+t)` coins, minus the bad event.
pub fn gkt_check(coins: &BitSeq, n: usize, k: usize, t: usize) -> Result<bool, EditError> {
    let expected = k * (n + t);
    if coins.len() != expected {
        return Err(EditError::LengthMismatch { expected, actual: coins.len() });
    }
    Ok(good_event_check(coins, n)?.overall && !bad_event(coins, n, k, t)?)
}

/// Cuts one walk of `k(n+t) - n` steps into `k` walks of `t` steps,
/// walk `a` starting at step `a(n+t)`.
pub fn cut(single: &Segment, k: usize, t: usize) -> Result<Vec<Segment>, EditError> {
    let n = single.width() as usize;
    let need = k * (n + t) - n;
    if single.len_steps() != need {
        return Err(EditError::LengthMismatch { expected: need + 1, actual: single.edges().len() });
    }
    (0..k)
        .map(|a| {
            let base = a * (n + t);
            Segment::from_edges(n as u32, single.edges()[base..=base + t].to_vec()).map_err(EditError::from)
        })
        .collect()
}

/// `v_{a,i} = v_{b,j}` with colors `1 <= a < b <= k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct ColoredRepeat {
    pub i: usize,
    pub j: usize,
    pub a: usize,
    pub b: usize,
}

/// `v_{c,i} = v_{c,j}`, `i < j`, inside one walk.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct WithinRepeat {
    pub color: usize,
    pub i: usize,
    pub j: usize,
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct ColoredRepeats {
    /// Sorted by `(a, b, i, j)`.
    pub cross: Vec<ColoredRepeat>,
    /// Sorted by `(color, i, j)`.
    pub within: Vec<WithinRepeat>,
}

/// Every vertex coincidence among the walks' `t+2` vertices, split into
/// cross-color and same-color repeats.
pub fn colored_repeats(segments: &[Segment]) -> Result<ColoredRepeats, EditError> {
    let Some(first) = segments.first() else {
        return Ok(ColoredRepeats::default());
    };
    if segments.iter().any(|s| s.width() != first.width()) {
        return Err(EditError::MixedWidths);
    }
    let mut seen: HashMap<Vertex, Vec<(usize, usize)>> = HashMap::new();
    for (c, seg) in segments.iter().enumerate() {
        for (i, v) in seg.vertices().into_iter().enumerate() {
            seen.entry(v).or_default().push((c + 1, i));
        }
    }
    let mut out = ColoredRepeats::default();
    for occurrences in seen.values() {
        for (x, &(ca, i)) in occurrences.iter().enumerate() {
            for &(cb, j) in &occurrences[x + 1..] {
                // occurrences are in (color, index) order
                if ca == cb {
                    out.within.push(WithinRepeat { color: ca, i, j });
                } else {
                    out.cross.push(ColoredRepeat { i, j, a: ca, b: cb });
                }
            }
        }
    }
    out.cross.sort_unstable_by_key(|r| (r.a, r.b, r.i, r.j));
    out.within.sort_unstable();
    Ok(out)
}
