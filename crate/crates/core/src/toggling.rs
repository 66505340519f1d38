//! Toggle classes.
//!
//! For `k` walks of length `t`, the time range is split into `m` regions.
//! Region `ℓ` asks for a vertex shared by two walks at times `(i, j)` close
//! to the diagonal; the first such vertex in a fixed order is the toggle
//! vertex `v♯_ℓ`. When the choices survive every toggle of a subset of
//! themselves, the `2^m` cousin logics form a class on which the relativized
//! permutation factors as `ĝ ∘ g`, with `g` a product of transpositions read
//! off the schedule.

use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::fsr::{Edge, FeedbackLogic, FsrError, Segment, Vertex};
use crate::perm::Perm;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ToggleError {
    #[error("region {region} is malformed: {reason}")]
    BadRegion { region: usize, reason: String },
    #[error("regions {first} and {second} overlap in time")]
    RegionsOverlap { first: usize, second: usize },
    #[error("region index {0} is outside 1..=m")]
    NoSuchRegion(usize),
    #[error("need at least {min} starting edges, got {got}")]
    TooFewStarts { min: usize, got: usize },
    #[error("logic is not a cousin of the class leader")]
    NotInClass,
    #[error("walk from a male end did not return within 2^{n} steps")]
    WalkOverflow { n: u32 },
    #[error("logic width {got} differs from the parameters' width {expected}")]
    WidthMismatch { expected: u32, got: u32 },
    #[error(transparent)]
    Fsr(#[from] FsrError),
}

/// One search region in raw indices: `lo <= min(i,j) <= max(i,j) <= hi`
/// and `|i - j| <= max_disp`.
#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
pub struct Region {
    pub lo: usize,
    pub hi: usize,
    pub max_disp: usize,
    /// Real displacement scale behind `max_disp`, used by the diagnostics.
    pub d: f64,
}

impl Region {
    pub fn contains(&self, i: usize, j: usize) -> bool {
        i.min(j) >= self.lo && i.max(j) <= self.hi && i.abs_diff(j) <= self.max_disp
    }
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct RegionParams {
    pub n: u32,
    pub t: usize,
    pub m: usize,
    /// Ratio `r` of the geometric schedule, when it was used.
    pub ratio: Option<f64>,
    pub regions: Vec<Region>,
}

impl RegionParams {
    /// The geometric schedule: with `a = (t/m)/√N` and `r = a^{1/(2m+1)}`,
    /// region `ℓ` has `|i-j| < √N r^{2ℓ-2m-2}` and times between
    /// `(ℓ-1)t/m` and `(ℓ-1)t/m + (t/m) r^{-2(ℓ-1)}`.
    pub fn geometric(n: u32, t: usize, m: usize) -> Result<Self, ToggleError> {
        if m == 0 {
            return Self::with_regions(n, t, Vec::new());
        }
        let sqrt_n = (2f64).powf(n as f64 / 2.0);
        let piece = t as f64 / m as f64;
        let a = piece / sqrt_n;
        let r = a.powf(1.0 / (2 * m + 1) as f64);
        let regions = (1..=m)
            .map(|l| {
                let d = sqrt_n * r.powi(2 * l as i32 - 2 * m as i32 - 2);
                let start = (l - 1) as f64 * piece;
                let end = start + piece * r.powi(-2 * (l as i32 - 1));
                // strict bound |i-j| < d
                let max_disp = if d <= 0.0 { 0 } else { (d.ceil() - 1.0).max(0.0) as usize };
                Region { lo: start.ceil() as usize, hi: end.floor() as usize, max_disp, d }
            })
            .collect();
        let mut params = Self::with_regions(n, t, regions)?;
        params.ratio = Some(r);
        Ok(params)
    }

    /// Explicit regions as `(max |i-j|, lo, hi)` triples.
    pub fn with_overrides(n: u32, t: usize, regions: &[(usize, usize, usize)]) -> Result<Self, ToggleError> {
        let regions = regions
            .iter()
            .map(|&(max_disp, lo, hi)| Region { lo, hi, max_disp, d: max_disp as f64 })
            .collect();
        Self::with_regions(n, t, regions)
    }

    /// `m` equal windows tiling `1..=t`, with one displacement bound chosen so
    /// that each region expects about `target` cross-color vertex matches
    /// among `k` walks.
    pub fn desk(n: u32, t: usize, m: usize, k: usize, target: f64) -> Result<Self, ToggleError> {
        if m == 0 || t < m {
            return Err(ToggleError::BadRegion { region: 1, reason: format!("cannot split t={t} into m={m} windows") });
        }
        let width = t / m;
        let pairs = (k * k.saturating_sub(1) / 2).max(1) as f64;
        let vertices = (1u64 << (n - 1)) as f64;
        // a window of w times holds about w(2D+1) cells with |i-j| <= D
        let per_pair = target / pairs;
        let disp = ((per_pair * vertices / width as f64 - 1.0) / 2.0).round().max(0.0) as usize;
        let regions = (0..m)
            .map(|l| Region { lo: 1 + l * width, hi: (l + 1) * width, max_disp: disp, d: disp as f64 })
            .collect();
        Self::with_regions(n, t, regions)
    }

    fn with_regions(n: u32, t: usize, regions: Vec<Region>) -> Result<Self, ToggleError> {
        for (idx, r) in regions.iter().enumerate() {
            if r.lo > r.hi {
                return Err(ToggleError::BadRegion { region: idx + 1, reason: format!("lo {} > hi {}", r.lo, r.hi) });
            }
            if r.hi > t {
                return Err(ToggleError::BadRegion { region: idx + 1, reason: format!("hi {} > t {t}", r.hi) });
            }
        }
        // toggles must be met in region order along every strand
        for idx in 1..regions.len() {
            if regions[idx - 1].hi > regions[idx].lo {
                return Err(ToggleError::RegionsOverlap { first: idx, second: idx + 1 });
            }
        }
        Ok(RegionParams { n, t, m: regions.len(), ratio: None, regions })
    }

    pub fn region(&self, l: usize) -> Result<&Region, ToggleError> {
        l.checked_sub(1).and_then(|x| self.regions.get(x)).ok_or(ToggleError::NoSuchRegion(l))
    }
}

/// `t d / N` below this: the region probably holds no match.
pub const EMPTY_REGION_THRESHOLD: f64 = 1.0;
/// `t d^3 / N^2` above this: a displaced same-color match probably lands in the region.
pub const COLLISION_THRESHOLD: f64 = 1.0;

#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionWarning {
    LikelyEmpty { region: usize, td_over_n: f64 },
    LikelyCollision { region: usize, td3_over_n2: f64 },
}

/// Per-region diagnostics with `t` the window length and `d` the displacement scale.
pub fn validate_region_params(params: &RegionParams) -> Vec<RegionWarning> {
    let big_n = (2f64).powi(params.n as i32);
    let mut out = Vec::new();
    for (idx, r) in params.regions.iter().enumerate() {
        let w = (r.hi - r.lo) as f64;
        let td = w * r.d / big_n;
        let td3 = w * r.d.powi(3) / (big_n * big_n);
        if td < EMPTY_REGION_THRESHOLD {
            out.push(RegionWarning::LikelyEmpty { region: idx + 1, td_over_n: td });
        }
        if td3 > COLLISION_THRESHOLD {
            out.push(RegionWarning::LikelyCollision { region: idx + 1, td3_over_n2: td3 });
        }
    }
    out
}

/// The logic complemented on `u`.
pub fn toggle(f: &FeedbackLogic, u: &[Vertex]) -> Result<FeedbackLogic, ToggleError> {
    Ok(f.toggled(u)?)
}

/// `v_{a,i} = v_{b,j}` with colors `a < b` (1-based).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct Candidate {
    pub i: usize,
    pub j: usize,
    pub a: usize,
    pub b: usize,
    pub vertex: Vertex,
}

impl Candidate {
    fn order_key(&self) -> (usize, usize, usize, usize) {
        (self.i + self.j, self.i.max(self.j), self.a, self.b)
    }
}

fn walks(f: &FeedbackLogic, starts: &[Edge], t: usize) -> Result<Vec<Segment>, ToggleError> {
    Ok(starts.iter().map(|&e| f.segment(e, t)).collect::<Result<_, _>>()?)
}

/// Cross-color vertex matches in `region`, lex-first order on
/// `(i+j, max(i,j), a, b)`. Vertex indices run over `1..=t`: those are the
/// vertices whose incoming segment edge a toggle redirects.
pub fn region_candidates(segments: &[Segment], region: &Region) -> Vec<Candidate> {
    let mut seen: HashMap<Vertex, Vec<(usize, usize)>> = HashMap::new();
    for (c, seg) in segments.iter().enumerate() {
        let verts = seg.vertices();
        let t = seg.len_steps();
        let lo = region.lo.max(1);
        let hi = region.hi.min(t);
        for (i, &v) in verts.iter().enumerate().take(hi + 1).skip(lo) {
            seen.entry(v).or_default().push((c + 1, i));
        }
    }
    let mut out = Vec::new();
    for (&vertex, occ) in &seen {
        for (x, &(ca, i)) in occ.iter().enumerate() {
            for &(cb, j) in &occ[x + 1..] {
                if ca != cb && region.contains(i, j) {
                    out.push(Candidate { i, j, a: ca, b: cb, vertex });
                }
            }
        }
    }
    out.sort_by_key(Candidate::order_key);
    out
}

/// Candidates of region `l` (1-based) for the walks of `f` from `starts`.
pub fn candidates(
    f: &FeedbackLogic,
    starts: &[Edge],
    l: usize,
    params: &RegionParams,
) -> Result<Vec<Candidate>, ToggleError> {
    check_width(f, params)?;
    let region = params.region(l)?;
    Ok(region_candidates(&walks(f, starts, params.t)?, region))
}

/// The vertex of the first candidate of region `l`, if any.
pub fn choice(f: &FeedbackLogic, starts: &[Edge], l: usize, params: &RegionParams) -> Result<Option<Vertex>, ToggleError> {
    Ok(candidates(f, starts, l, params)?.first().map(|c| c.vertex))
}

fn check_width(f: &FeedbackLogic, params: &RegionParams) -> Result<(), ToggleError> {
    if f.width() != params.n {
        return Err(ToggleError::WidthMismatch { expected: params.n, got: f.width() });
    }
    Ok(())
}

fn first_candidates(segments: &[Segment], params: &RegionParams) -> Vec<Option<Candidate>> {
    params.regions.iter().map(|r| region_candidates(segments, r).first().copied()).collect()
}

fn all_edges_distinct(segments: &[Segment]) -> bool {
    let mut seen = HashSet::new();
    segments.iter().flat_map(|s| s.edges()).all(|e| seen.insert(*e))
}

/// A class of `2^m` cousin logics sharing toggle vertices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ToggleClass {
    pub n: u32,
    pub t: usize,
    /// The leader `f₀`: zero at every toggle vertex.
    pub base: FeedbackLogic,
    pub vertices: Vec<Vertex>,
    /// Color pairs `(a, b)`, `a < b`, 1-based.
    pub schedule: Vec<(usize, usize)>,
    pub starts: Vec<Edge>,
}

#[derive(Serialize)]
struct ToggleClassJson<'a> {
    n: u32,
    vertices: &'a [Vertex],
    schedule: &'a [(usize, usize)],
    starts: &'a [Edge],
}

impl ToggleClass {
    pub fn m(&self) -> usize {
        self.vertices.len()
    }

    pub fn k(&self) -> usize {
        self.starts.len()
    }

    /// The cousin toggled at `{v♯_ℓ : bit ℓ-1 of mask set}`.
    pub fn cousin(&self, mask: u64) -> FeedbackLogic {
        let u: Vec<Vertex> = (0..self.m()).filter(|&l| (mask >> l) & 1 == 1).map(|l| self.vertices[l]).collect();
        self.base.toggled(&u).expect("toggle vertices are valid for the class width")
    }

    /// `{"n":…,"vertices":[…],"schedule":[[a,b],…],"starts":[…]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ToggleClassJson {
            n: self.n,
            vertices: &self.vertices,
            schedule: &self.schedule,
            starts: &self.starts,
        })
        .unwrap()
    }
}

/// Why `(f, e)` missed the happy event.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Unhappy {
    /// Some walk revisits an edge (or two walks share one), for `f` or a cousin.
    RepeatedEdge,
    /// Region `ℓ` has no candidate.
    NullChoice(usize),
    /// Two regions chose the same vertex.
    RepeatedChoice,
    /// A cousin's choices differ from `f`'s.
    Unstable,
}

/// Membership in the happy event `H`. On success the class leader has all
/// toggle bits zeroed.
pub fn happy_check(
    f: &FeedbackLogic,
    starts: &[Edge],
    params: &RegionParams,
) -> Result<Result<ToggleClass, Unhappy>, ToggleError> {
    check_width(f, params)?;
    if starts.is_empty() {
        return Err(ToggleError::TooFewStarts { min: 1, got: 0 });
    }
    let segments = walks(f, starts, params.t)?;
    if !all_edges_distinct(&segments) {
        return Ok(Err(Unhappy::RepeatedEdge));
    }
    let mut vertices = Vec::with_capacity(params.m);
    for (idx, c) in first_candidates(&segments, params).into_iter().enumerate() {
        match c {
            Some(c) => vertices.push(c.vertex),
            None => return Ok(Err(Unhappy::NullChoice(idx + 1))),
        }
    }
    if vertices.iter().collect::<HashSet<_>>().len() != vertices.len() {
        return Ok(Err(Unhappy::RepeatedChoice));
    }
    let mut base = f.clone();
    for &v in &vertices {
        base.set(v, false);
    }
    let mut schedule = Vec::with_capacity(params.m);
    for mask in 0u64..1 << params.m {
        let u: Vec<Vertex> = (0..params.m).filter(|&l| (mask >> l) & 1 == 1).map(|l| vertices[l]).collect();
        let cousin = f.toggled(&u)?;
        let segs = walks(&cousin, starts, params.t)?;
        if !all_edges_distinct(&segs) {
            return Ok(Err(Unhappy::RepeatedEdge));
        }
        let firsts = first_candidates(&segs, params);
        if firsts.iter().zip(&vertices).any(|(c, v)| c.map(|c| c.vertex) != Some(*v)) {
            return Ok(Err(Unhappy::Unstable));
        }
        if cousin == base {
            schedule = firsts.iter().map(|c| c.map(|c| (c.a, c.b)).unwrap()).collect();
        }
    }
    Ok(Ok(ToggleClass { n: params.n, t: params.t, base, vertices, schedule, starts: starts.to_vec() }))
}

pub fn schedule_of(class: &ToggleClass) -> Vec<(usize, usize)> {
    class.schedule.clone()
}

/// `g = τ_m ∘ … ∘ τ_1`, `τ_ℓ` the transposition `α_ℓ` when `f*(v♯_ℓ) = 1`.
pub fn g_of(class: &ToggleClass, fstar: &FeedbackLogic) -> Result<Perm, ToggleError> {
    if fstar.width() != class.n {
        return Err(ToggleError::NotInClass);
    }
    let mut zeroed = fstar.clone();
    for &v in &class.vertices {
        zeroed.set(v, false);
    }
    if zeroed != class.base {
        return Err(ToggleError::NotInClass);
    }
    let k = class.k();
    let mut g = Perm::identity(k);
    for (&v, &(a, b)) in class.vertices.iter().zip(&class.schedule) {
        if fstar.get(v) {
            g = Perm::transposition(k, a - 1, b - 1).compose(&g);
        }
    }
    Ok(g)
}

/// `ĝ(a) = b` when the walk under `f₀` from the male end `e_{a,t}` first
/// meets the start `e_b`.
pub fn return_matching(class: &ToggleClass) -> Result<Perm, ToggleError> {
    let f0 = &class.base;
    let cap = f0.num_edges();
    let labels: HashMap<u64, usize> = class.starts.iter().enumerate().map(|(b, e)| (e.0, b)).collect();
    let mut images = Vec::with_capacity(class.k());
    for &start in &class.starts {
        let mut x = f0.segment(start, class.t)?.end().0;
        let mut steps = 0u64;
        let b = loop {
            x = f0.advance(x);
            steps += 1;
            if let Some(&b) = labels.get(&x) {
                break b;
            }
            if steps > cap {
                return Err(ToggleError::WalkOverflow { n: class.n });
            }
        };
        images.push(b);
    }
    Perm::from_images(images).ok_or(ToggleError::NotInClass)
}

/// Checks `relativize(f*, starts) = ĝ ∘ g(f*)` for all `2^m` cousins.
pub fn verify_matching_claim(class: &ToggleClass) -> Result<bool, ToggleError> {
    let g_hat = return_matching(class)?;
    for mask in 0u64..1 << class.m() {
        let fstar = class.cousin(mask);
        let sigma = fstar.relativize(&class.starts)?;
        if sigma != g_hat.compose(&g_of(class, &fstar)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(n: u32, bits: &str) -> Segment {
        let b: Vec<u8> = bits.bytes().map(|c| c - b'0').collect();
        Segment::from_bits(n, &b).unwrap()
    }

    #[test]
    fn toggle_examples() {
        let f = FeedbackLogic::zero(3).unwrap();
        assert_eq!(toggle(&f, &[]).unwrap(), f);
        let g = toggle(&f, &[Vertex(0)]).unwrap();
        assert_eq!(g.decompose().unwrap().lengths, vec![4, 3, 1]);
        assert_eq!(toggle(&g, &[Vertex(0)]).unwrap(), f);
        assert!(toggle(&f, &[Vertex(4)]).is_err());
    }

    #[test]
    fn candidate_order_prefers_smaller_max_on_tied_sums() {
        let mut c = [
            Candidate { i: 3, j: 5, a: 1, b: 2, vertex: Vertex(0) },
            Candidate { i: 4, j: 4, a: 1, b: 3, vertex: Vertex(1) },
        ];
        c.sort_by_key(Candidate::order_key);
        assert_eq!((c[0].i, c[0].j, c[0].a, c[0].b), (4, 4, 1, 3));
    }

    #[test]
    fn region_candidates_use_interior_indices() {
        // n=4: vertices are 3-bit words. Walk 1 spells 0001011, walk 2 1101000.
        let w1 = seg(4, "0001011");
        let w2 = seg(4, "1101000");
        let wide = Region { lo: 0, hi: 3, max_disp: 3, d: 3.0 };
        let got = region_candidates(&[w1.clone(), w2.clone()], &wide);
        // shared vertices: 010 at (2,2)... index 0 and t+1 excluded
        for c in &got {
            assert!(c.i >= 1 && c.j >= 1 && c.i <= 3 && c.j <= 3);
            assert_eq!(w1.vertices()[c.i], w2.vertices()[c.j]);
        }
        let sorted: Vec<_> = got.iter().map(Candidate::order_key).collect();
        let mut again = sorted.clone();
        again.sort();
        assert_eq!(sorted, again);
    }

    #[test]
    fn geometric_schedule_regions() {
        let n = 34;
        let big_n = (2f64).powi(n as i32);
        let t = (3.0 * big_n.powf(0.6)) as usize;
        let p = RegionParams::geometric(n, t, 3).unwrap();
        let r = p.ratio.unwrap();
        assert!((r.powi(7) - big_n.powf(0.1)).abs() < 1e-6 * big_n.powf(0.1));
        assert_eq!(p.regions[0].lo, 0);
        assert!(p.regions.windows(2).all(|w| w[0].hi <= w[1].lo));
        assert!((p.regions[1].d / p.regions[0].d - r * r).abs() < 1e-9);
        assert!(validate_region_params(&p).is_empty(), "{:?}", validate_region_params(&p));
    }

    #[test]
    fn region_warnings() {
        let empty = RegionParams::with_overrides(20, 1000, &[(0, 1, 1000)]).unwrap();
        assert!(matches!(validate_region_params(&empty)[..], [RegionWarning::LikelyEmpty { region: 1, .. }]));
        // t = N^0.9, d = N^0.45 at n = 40
        let wide = RegionParams::with_overrides(40, 1 << 36, &[(1 << 18, 0, 1 << 36)]).unwrap();
        let w = validate_region_params(&wide);
        assert!(w.iter().any(|x| matches!(x, RegionWarning::LikelyCollision { td3_over_n2, .. } if *td3_over_n2 > 1000.0)));
    }

    #[test]
    fn overlapping_windows_are_rejected() {
        assert_eq!(
            RegionParams::with_overrides(10, 100, &[(3, 1, 60), (3, 50, 100)]),
            Err(ToggleError::RegionsOverlap { first: 1, second: 2 })
        );
        assert!(RegionParams::with_overrides(10, 100, &[(3, 1, 101)]).is_err());
        assert!(RegionParams::with_overrides(10, 100, &[(3, 9, 8)]).is_err());
    }

    #[test]
    fn g_of_composes_right_to_left() {
        let base = FeedbackLogic::zero(6).unwrap();
        let class = ToggleClass {
            n: 6,
            t: 4,
            base: base.clone(),
            vertices: vec![Vertex(3), Vertex(9)],
            schedule: vec![(1, 2), (2, 3)],
            starts: vec![Edge(1), Edge(2), Edge(5)],
        };
        assert!(g_of(&class, &base).unwrap().is_identity());
        let both = class.cousin(0b11);
        // (2 3)∘(1 2): 1 -> 2 -> 3, 2 -> 1, 3 -> 2
        assert_eq!(g_of(&class, &both).unwrap(), Perm::from_cycles(3, &[&[1, 3, 2]]).unwrap());
        let first = class.cousin(0b01);
        assert_eq!(g_of(&class, &first).unwrap(), Perm::transposition(3, 0, 1));
        let outsider = base.toggled(&[Vertex(4)]).unwrap();
        assert_eq!(g_of(&class, &outsider), Err(ToggleError::NotInClass));
        assert_eq!(
            class.to_json(),
            r#"{"n":6,"vertices":[3,9],"schedule":[[1,2],[2,3]],"starts":[1,2,5]}"#
        );
    }

    #[test]
    fn return_matching_with_one_walk_is_identity() {
        let f = FeedbackLogic::from_fn(5, |v| v.0 % 3 == 0).unwrap();
        let class = ToggleClass { n: 5, t: 3, base: f, vertices: vec![], schedule: vec![], starts: vec![Edge(6)] };
        assert!(return_matching(&class).unwrap().is_identity());
        assert!(verify_matching_claim(&class).unwrap());
    }
}
