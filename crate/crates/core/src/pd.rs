//! GEM and Poisson-Dirichlet laws, Dickman's ρ, and the statistics used to
//! compare cycle structure against them.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use rand::distr::Open01;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::perm::{factorial, Perm};

pub const DEFAULT_GEM_TOL: f64 = 1e-9;
/// Longest schedule accepted by [`schedule_distance`].
pub const MAX_SCHEDULE_LEN: usize = 24;
/// Largest `k` for distributions over `S_k` (8! states).
pub const MAX_PERM_K: usize = 8;

/// Step of the ρ grid.
pub const RHO_STEP: f64 = 1e-4;
/// ρ is tabulated on `[0, RHO_MAX_U]` and taken as 0 beyond (ρ(40) < 1e-70).
pub const RHO_MAX_U: f64 = 40.0;
const RHO_STEPS_PER_UNIT: usize = 10_000;

#[derive(Debug, Error, PartialEq)]
pub enum PdError {
    #[error("tolerance {0} outside (0, 1)")]
    Tolerance(f64),
    #[error("argument {0} is not finite")]
    NonFinite(f64),
    #[error("schedule of length {m} exceeds the exact-mode cap {max}")]
    ScheduleTooLong { m: usize, max: usize },
    #[error("k = {k} outside 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("bad color pair ({a}, {b}) for k = {k}")]
    BadPair { a: usize, b: usize, k: usize },
    #[error("distribution over S_{k} needs {expected} probabilities, got {actual}")]
    DistLength { k: usize, expected: usize, actual: usize },
    #[error("probabilities must be nonnegative and sum to 1")]
    NotADistribution,
    #[error("label {0} is not in any block")]
    UnknownLabel(usize),
    #[error("label {0} appears in two blocks")]
    DuplicateLabel(usize),
    #[error("empty sample")]
    EmptySample,
    #[error("cannot parse schedule: {0}")]
    Parse(String),
}

/// A point of the simplex: explicit coordinates plus the mass not yet broken off.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct SimplexPoint {
    pub coords: Vec<f64>,
    pub tail: f64,
}

impl SimplexPoint {
    pub fn total(&self) -> f64 {
        self.coords.iter().sum::<f64>() + self.tail
    }

    /// One row, one coordinate per column, tail last.
    pub fn to_csv_row(&self) -> String {
        let mut cols: Vec<String> = self.coords.iter().map(|x| x.to_string()).collect();
        cols.push(self.tail.to_string());
        cols.join(",")
    }
}

fn check_tol(tol: f64) -> Result<(), PdError> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(PdError::Tolerance(tol))
    }
}

/// Stick breaking from a supplied stream of `U`s: coordinate `j` is
/// `U_1⋯U_{j-1}(1-U_j)`, stopping once `U_1⋯U_j < tol`.
pub fn gem_from_uniforms(mut uniforms: impl FnMut() -> f64, tol: f64) -> Result<SimplexPoint, PdError> {
    check_tol(tol)?;
    let mut coords = Vec::new();
    let mut rest = 1.0;
    while rest >= tol {
        let u = uniforms();
        coords.push(rest * (1.0 - u));
        rest *= u;
    }
    Ok(SimplexPoint { coords, tail: rest })
}

/// GEM(θ): stick breaking with `U^{1/θ}` in place of `U`.
pub fn gem_sample_theta<R: Rng + ?Sized>(rng: &mut R, theta: f64, tol: f64) -> Result<SimplexPoint, PdError> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(PdError::NonFinite(theta));
    }
    gem_from_uniforms(
        || {
            let u: f64 = rng.sample(Open01);
            if theta == 1.0 {
                u
            } else {
                u.powf(1.0 / theta)
            }
        },
        tol,
    )
}

pub fn gem_sample<R: Rng + ?Sized>(rng: &mut R, tol: f64) -> Result<SimplexPoint, PdError> {
    gem_sample_theta(rng, 1.0, tol)
}

/// `rank` of a GEM draw.
pub fn pd_sample<R: Rng + ?Sized>(rng: &mut R, tol: f64) -> Result<SimplexPoint, PdError> {
    Ok(rank(&gem_sample(rng, tol)?))
}

/// Coordinates sorted largest first (stable); the tail is left alone.
pub fn rank(x: &SimplexPoint) -> SimplexPoint {
    SimplexPoint { coords: rank_vec(&x.coords), tail: x.tail }
}

pub fn rank_vec(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// `Σ 2^{-i}|x_i - y_i|`, `i` from 1, missing coordinates read as 0.
pub fn metric_d(x: &[f64], y: &[f64]) -> f64 {
    let mut w = 1.0;
    (0..x.len().max(y.len()))
        .map(|i| {
            w *= 0.5;
            w * (x.get(i).unwrap_or(&0.0) - y.get(i).unwrap_or(&0.0)).abs()
        })
        .sum()
}

/// `Σ |x_i - y_i|`, missing coordinates read as 0.
pub fn metric_l1(x: &[f64], y: &[f64]) -> f64 {
    (0..x.len().max(y.len())).map(|i| (x.get(i).unwrap_or(&0.0) - y.get(i).unwrap_or(&0.0)).abs()).sum()
}

/// Cubic Hermite value of the grid on `[j, j+1]` at fraction `s`, slopes
/// from `ρ'(u) = -ρ(u-1)/u` (right-hand slope at `u = 1`).
fn hermite(g: &[f64], j: usize, s: f64) -> f64 {
    let m = RHO_STEPS_PER_UNIT;
    let h = RHO_STEP;
    let slope = |j: usize, right: bool| -> f64 {
        if j < m || (j == m && !right) {
            0.0
        } else {
            -g[j - m] / (j as f64 * h)
        }
    };
    let (d0, d1) = (slope(j, true), slope(j + 1, false));
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * g[j]
        + (s3 - 2.0 * s2 + s) * h * d0
        + (-2.0 * s3 + 3.0 * s2) * g[j + 1]
        + (s3 - s2) * h * d1
}

fn rho_grid() -> &'static [f64] {
    static GRID: OnceLock<Vec<f64>> = OnceLock::new();
    GRID.get_or_init(|| {
        // ρ(u) = ρ(u-h) - ∫ ρ(s-1)/s ds over [u-h, u], Simpson per step; the
        // lagged midpoint comes from Hermite interpolation. Every integer is a
        // grid point, so the kinks of ρ never fall inside a step.
        let m = RHO_STEPS_PER_UNIT;
        let len = m * RHO_MAX_U as usize + 1;
        let h = RHO_STEP;
        let mut g = vec![1.0; len];
        for i in m + 1..len {
            let u = i as f64 * h;
            let left = g[i - 1 - m] / (u - h);
            let mid = hermite(&g, i - 1 - m, 0.5) / (u - 0.5 * h);
            let right = g[i - m] / u;
            g[i] = g[i - 1] - h / 6.0 * (left + 4.0 * mid + right);
        }
        g
    })
}

/// Dickman's function, tabulated on a step-`1e-4` grid and Hermite
/// interpolated between grid points. Error well below 1e-8 on `[0, 10]`.
pub fn dickman_rho(u: f64) -> Result<f64, PdError> {
    if !u.is_finite() {
        return Err(PdError::NonFinite(u));
    }
    if !(0.0..=RHO_MAX_U).contains(&u) {
        return Ok(0.0);
    }
    if u <= 1.0 {
        return Ok(1.0);
    }
    let g = rho_grid();
    let pos = u / RHO_STEP;
    let j = (pos.floor() as usize).min(g.len() - 2);
    Ok(hermite(g, j, pos - j as f64))
}

/// Joint density of the first `k` PD coordinates; zero off
/// `x_1 > … > x_k > 0, Σx < 1`.
pub fn pd_density(x: &[f64]) -> Result<f64, PdError> {
    if let Some(&bad) = x.iter().find(|v| !v.is_finite()) {
        return Err(PdError::NonFinite(bad));
    }
    let Some(&last) = x.last() else { return Ok(0.0) };
    let sum: f64 = x.iter().sum();
    let decreasing = x.windows(2).all(|w| w[0] > w[1]);
    if !(decreasing && last > 0.0 && sum < 1.0) {
        return Ok(0.0);
    }
    let prod: f64 = x.iter().product();
    Ok(dickman_rho((1.0 - sum) / last)? / prod)
}

/// `P(X_1 ≤ x) = ρ(1/x)` for the largest PD coordinate.
pub fn largest_coordinate_cdf(x: f64) -> Result<f64, PdError> {
    if !x.is_finite() {
        return Err(PdError::NonFinite(x));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x >= 1.0 {
        return Ok(1.0);
    }
    dickman_rho(1.0 / x)
}

fn legendre_nodes() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| {
        const ORDER: usize = 20;
        (0..ORDER)
            .map(|i| {
                let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (ORDER as f64 + 0.5)).cos();
                loop {
                    let (mut p0, mut p1) = (1.0, x);
                    for j in 2..=ORDER {
                        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                        p0 = p1;
                        p1 = p2;
                    }
                    let dp = ORDER as f64 * (x * p1 - p0) / (x * x - 1.0);
                    let dx = p1 / dp;
                    x -= dx;
                    if dx.abs() < 1e-15 {
                        let w = 2.0 / ((1.0 - x * x) * dp * dp);
                        break (x, w);
                    }
                }
            })
            .collect()
    })
}

/// 20-point Gauss–Legendre on each piece `[b_i, b_{i+1}]` of `breaks`
/// (sorted), each piece further cut into `panels` equal panels.
pub fn integrate(f: impl Fn(f64) -> f64, breaks: &[f64], panels: usize) -> f64 {
    let nodes = legendre_nodes();
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let step = (w[1] - w[0]) / panels as f64;
        for p in 0..panels {
            let lo = w[0] + p as f64 * step;
            let mid = lo + 0.5 * step;
            total += 0.5 * step * nodes.iter().map(|&(x, wt)| wt * f(mid + 0.5 * step * x)).sum::<f64>();
        }
    }
    total
}

/// Breakpoints `0, 1/41, 1/40, …, 1/2, 1` where `ρ((1-x)/x)` has kinks.
fn unit_breaks() -> Vec<f64> {
    let mut b = vec![0.0];
    b.extend((2..=RHO_MAX_U as usize + 1).rev().map(|j| 1.0 / j as f64));
    b.push(1.0);
    b
}

/// `∫_0^1 f_1`, which should be 1.
pub fn pd_density_k1_mass() -> f64 {
    integrate(|x| pd_density(&[x]).unwrap(), &unit_breaks(), 4)
}

/// `E X_1 = ∫_0^1 x f_1(x) dx = ∫_0^1 ρ(1/x - 1) dx` (Golomb–Dickman constant).
pub fn largest_coordinate_mean() -> f64 {
    integrate(|x| if x > 0.0 { dickman_rho(1.0 / x - 1.0).unwrap() } else { 0.0 }, &unit_breaks(), 4)
}

/// A law on `S_k`, indexed by Lehmer rank.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct FinitePermDist {
    pub k: usize,
    pub probs: Vec<f64>,
}

fn check_k(k: usize) -> Result<(), PdError> {
    if (1..=MAX_PERM_K).contains(&k) {
        Ok(())
    } else {
        Err(PdError::KOutOfRange { k, max: MAX_PERM_K })
    }
}

impl FinitePermDist {
    pub fn new(k: usize, probs: Vec<f64>) -> Result<Self, PdError> {
        check_k(k)?;
        let expected = factorial(k);
        if probs.len() != expected {
            return Err(PdError::DistLength { k, expected, actual: probs.len() });
        }
        if probs.iter().any(|&p| p.is_nan() || p < 0.0) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(PdError::NotADistribution);
        }
        Ok(Self { k, probs })
    }

    pub fn uniform(k: usize) -> Result<Self, PdError> {
        check_k(k)?;
        let size = factorial(k);
        Ok(Self { k, probs: vec![1.0 / size as f64; size] })
    }

    /// Empirical law of a sample of permutations of `S_k`.
    pub fn empirical<'a>(k: usize, sample: impl IntoIterator<Item = &'a Perm>) -> Result<Self, PdError> {
        check_k(k)?;
        let mut counts = vec![0u64; factorial(k)];
        let mut total = 0u64;
        for p in sample {
            if p.len() != k {
                return Err(PdError::KOutOfRange { k: p.len(), max: k });
            }
            counts[p.lehmer_index()] += 1;
            total += 1;
        }
        if total == 0 {
            return Err(PdError::EmptySample);
        }
        Ok(Self { k, probs: counts.iter().map(|&c| c as f64 / total as f64).collect() })
    }

    pub fn prob(&self, p: &Perm) -> f64 {
        self.probs[p.lehmer_index()]
    }
}

/// `(1/2) Σ_τ |p_τ - 1/k!|`.
pub fn tv_distance(dist: &FinitePermDist) -> f64 {
    let u = 1.0 / dist.probs.len() as f64;
    0.5 * dist.probs.iter().map(|p| (p - u).abs()).sum::<f64>()
}

/// Exact law of `τ = τ_m ∘ … ∘ τ_1`, where `τ_ℓ` is the transposition of
/// the ℓ-th pair or the identity, each with probability 1/2.
pub fn schedule_distribution(k: usize, schedule: &[(usize, usize)]) -> Result<Vec<Ratio<i128>>, PdError> {
    check_k(k)?;
    if schedule.len() > MAX_SCHEDULE_LEN {
        return Err(PdError::ScheduleTooLong { m: schedule.len(), max: MAX_SCHEDULE_LEN });
    }
    for &(a, b) in schedule {
        if a == 0 || b == 0 || a > k || b > k || a == b {
            return Err(PdError::BadPair { a, b, k });
        }
    }
    let size = factorial(k);
    let perms: Vec<Perm> = (0..size).map(|i| Perm::from_lehmer_index(k, i)).collect();
    let mut dist = vec![Ratio::zero(); size];
    dist[Perm::identity(k).lehmer_index()] = Ratio::one();
    let half = Ratio::new(1, 2);
    for &(a, b) in schedule {
        let tau = Perm::transposition(k, a - 1, b - 1);
        let mut next = vec![Ratio::zero(); size];
        for (i, p) in perms.iter().enumerate() {
            if dist[i].is_zero() {
                continue;
            }
            let share = dist[i] * half;
            next[i] += share;
            next[tau.compose(p).lehmer_index()] += share;
        }
        dist = next;
    }
    Ok(dist)
}

/// Total variation distance of the schedule's random product from uniform.
#[derive(Clone, PartialEq, Debug)]
pub struct ScheduleDistance {
    pub exact: Ratio<i128>,
    pub value: f64,
}

pub fn schedule_distance(k: usize, schedule: &[(usize, usize)]) -> Result<ScheduleDistance, PdError> {
    let dist = schedule_distribution(k, schedule)?;
    let u = Ratio::new(1, factorial(k) as i128);
    let exact = dist.iter().map(|p| (p - u).abs()).fold(Ratio::zero(), |acc, x| acc + x) / 2;
    Ok(ScheduleDistance { exact, value: *exact.numer() as f64 / *exact.denom() as f64 })
}

/// Parses `"1-2,1-3"` into `[(1,2),(1,3)]`. An empty string is the empty word.
pub fn parse_schedule(s: &str) -> Result<Vec<(usize, usize)>, PdError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|pair| {
            let (a, b) = pair.trim().split_once('-').ok_or_else(|| PdError::Parse(pair.to_string()))?;
            let a = a.trim().parse().map_err(|_| PdError::Parse(pair.to_string()))?;
            let b = b.trim().parse().map_err(|_| PdError::Parse(pair.to_string()))?;
            Ok((a, b))
        })
        .collect()
}

/// Block counts of an ordered sample.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SampleCounts {
    /// Per block hit, in order of first appearance.
    pub c: Vec<usize>,
    /// Per block, blocks in nonincreasing size order (zeros kept).
    pub d: Vec<usize>,
    /// Block sizes, nonincreasing.
    pub m: Vec<usize>,
}

/// Counts for `sample` against the partition `blocks`. Ties in block size
/// keep the order given.
pub fn sample_counts(blocks: &[Vec<usize>], sample: &[usize]) -> Result<SampleCounts, PdError> {
    if sample.is_empty() {
        return Err(PdError::EmptySample);
    }
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by(|&a, &b| blocks[b].len().cmp(&blocks[a].len()));
    let mut size_rank = vec![0; blocks.len()];
    for (r, &b) in order.iter().enumerate() {
        size_rank[b] = r;
    }
    let mut block_of = HashMap::new();
    for (b, block) in blocks.iter().enumerate() {
        for &x in block {
            if block_of.insert(x, b).is_some() {
                return Err(PdError::DuplicateLabel(x));
            }
        }
    }
    let mut d = vec![0; blocks.len()];
    let mut first_seen: Vec<usize> = Vec::new();
    let mut c: Vec<usize> = Vec::new();
    for &x in sample {
        let &b = block_of.get(&x).ok_or(PdError::UnknownLabel(x))?;
        d[size_rank[b]] += 1;
        match first_seen.iter().position(|&s| s == b) {
            Some(p) => c[p] += 1,
            None => {
                first_seen.push(b);
                c.push(1);
            }
        }
    }
    let m = order.iter().map(|&b| blocks[b].len()).collect();
    let counts = SampleCounts { c, d, m };
    let mut rc = counts.c.clone();
    let mut rd: Vec<usize> = counts.d.iter().copied().filter(|&x| x > 0).collect();
    rc.sort_unstable_by(|a, b| b.cmp(a));
    rd.sort_unstable_by(|a, b| b.cmp(a));
    assert_eq!(rc, rd, "C and D must be the same multiset");
    Ok(counts)
}

/// `k` labels drawn uniformly with replacement from the union of `blocks`.
pub fn random_sample<R: Rng + ?Sized>(blocks: &[Vec<usize>], k: usize, rng: &mut R) -> Vec<usize> {
    let all: Vec<usize> = blocks.iter().flatten().copied().collect();
    (0..k).map(|_| all[rng.random_range(0..all.len())]).collect()
}

/// Two-sided Kolmogorov–Smirnov distance between the sample's empirical CDF and `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64, PdError> {
    if samples.is_empty() {
        return Err(PdError::EmptySample);
    }
    if let Some(&bad) = samples.iter().find(|v| !v.is_finite()) {
        return Err(PdError::NonFinite(bad));
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    Ok(s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn geometric_stick() {
        let x = gem_from_uniforms(|| 0.5, 1e-3).unwrap();
        assert_eq!(x.coords[..3], [0.5, 0.25, 0.125]);
        assert!(x.tail < 1e-3);
        assert!((x.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_tolerance() {
        assert_eq!(gem_from_uniforms(|| 0.5, 0.0), Err(PdError::Tolerance(0.0)));
        assert_eq!(gem_from_uniforms(|| 0.5, 1.0), Err(PdError::Tolerance(1.0)));
    }

    #[test]
    fn gem_coords_in_open_unit_interval() {
        let mut r = rng::seeded(1);
        for _ in 0..200 {
            let x = gem_sample(&mut r, DEFAULT_GEM_TOL).unwrap();
            assert!(x.coords.iter().all(|&c| c > 0.0 && c < 1.0));
            assert!((x.total() - 1.0).abs() < 1e-12);
            assert!(x.tail < DEFAULT_GEM_TOL);
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_vec(&[0.2, 0.5, 0.3]), vec![0.5, 0.3, 0.2]);
        let x = SimplexPoint { coords: vec![0.1, 0.6, 0.2], tail: 0.1 };
        assert_eq!(rank(&rank(&x)), rank(&x));
        assert_eq!(rank(&x).tail, 0.1);
    }

    #[test]
    fn metric_examples() {
        assert_eq!(metric_l1(&[1.0], &[0.0, 1.0]), 2.0);
        assert_eq!(metric_d(&[1.0], &[0.0, 1.0]), 0.75);
        assert_eq!(metric_d(&[0.3, 0.2], &[0.3, 0.2]), 0.0);
    }

    #[test]
    fn rho_pieces() {
        assert_eq!(dickman_rho(0.5).unwrap(), 1.0);
        assert_eq!(dickman_rho(-1.0).unwrap(), 0.0);
        assert_eq!(dickman_rho(1.0).unwrap(), 1.0);
        assert!(dickman_rho(f64::NAN).is_err());
        assert!(dickman_rho(f64::INFINITY).is_err());
        assert!((dickman_rho(1.5).unwrap() - (1.0 - 1.5f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn density_examples() {
        assert_eq!(pd_density(&[0.3, 0.4]).unwrap(), 0.0);
        assert_eq!(pd_density(&[0.6, 0.5]).unwrap(), 0.0);
        assert!((pd_density(&[0.6]).unwrap() - 1.0 / 0.6).abs() < 1e-12);
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&FinitePermDist::uniform(3).unwrap()), 0.0);
        let point = FinitePermDist::new(3, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((tv_distance(&point) - 5.0 / 6.0).abs() < 1e-15);
        let d = FinitePermDist::new(2, vec![0.6, 0.4]).unwrap();
        assert!((tv_distance(&d) - 0.1).abs() < 1e-15);
        assert!(FinitePermDist::new(2, vec![0.6, 0.6]).is_err());
    }

    #[test]
    fn schedule_examples() {
        assert_eq!(schedule_distance(2, &[(1, 2)]).unwrap().exact, Ratio::zero());
        assert_eq!(schedule_distance(3, &[]).unwrap().exact, Ratio::new(5, 6));
        assert_eq!(parse_schedule("1-2, 1-3").unwrap(), vec![(1, 2), (1, 3)]);
        assert!(parse_schedule("1-").is_err());
        assert!(schedule_distance(3, &[(1, 4)]).is_err());
        assert!(schedule_distance(3, &[(1, 2); 25]).is_err());
    }

    #[test]
    fn sample_count_example() {
        let blocks = vec![vec![1, 2, 3], vec![4, 5]];
        let c = sample_counts(&blocks, &[4, 1, 4]).unwrap();
        assert_eq!((c.c, c.d, c.m), (vec![2, 1], vec![1, 2], vec![3, 2]));
        let c = sample_counts(&blocks, &[2, 3, 1, 1]).unwrap();
        assert_eq!(c.c, vec![4]);
        assert_eq!(sample_counts(&blocks, &[9]), Err(PdError::UnknownLabel(9)));
    }

    #[test]
    fn ks_examples() {
        assert_eq!(ks_statistic(&[0.5], |x| x).unwrap(), 0.5);
        let n = 9;
        let s: Vec<f64> = (1..=n).map(|i| i as f64 / (n + 1) as f64).collect();
        assert!(ks_statistic(&s, |x| x).unwrap() <= 1.0 / (n + 1) as f64 + 1e-12);
    }
}
