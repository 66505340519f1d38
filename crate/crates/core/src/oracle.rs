//! Exhaustive ground truth at tiny widths: every logic, every start tuple,
//! every coin string, with exact rational weights.

use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::editing::{kt_sequential_edit, sequential_edit, BitSeq};
use crate::fsr::{Edge, FeedbackLogic};
use crate::perm::{factorial, Perm};

pub type Rational = Ratio<i128>;

pub const MAX_CYCLE_N: u32 = 5;
pub const MAX_MOMENT_N: u32 = 4;
pub const MAX_ORACLE_K: usize = 3;
pub const MAX_HONEST_N: u32 = 3;
pub const MAX_HONEST_T: usize = 4;
/// Cap on the number of enumerated coins, `k(n+t)`.
pub const MAX_KT_COINS: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{what} = {got} outside the exhaustive range {min}..={max}")]
    OutOfRange { what: &'static str, got: usize, min: usize, max: usize },
}

fn check(what: &'static str, got: usize, min: usize, max: usize) -> Result<(), OracleError> {
    if (min..=max).contains(&got) {
        Ok(())
    } else {
        Err(OracleError::OutOfRange { what, got, min, max })
    }
}

/// Two exactly computed sides of a claimed identity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Identity {
    pub name: String,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl Identity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Named exact quantities and identities for one parameter setting.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ExactReport {
    pub name: String,
    pub n: u32,
    pub k: Option<usize>,
    pub t: Option<usize>,
    pub quantities: BTreeMap<String, Rational>,
    pub identities: Vec<Identity>,
}

impl ExactReport {
    fn new(name: &str, n: u32, k: Option<usize>, t: Option<usize>) -> Self {
        Self { name: name.to_string(), n, k, t, ..Default::default() }
    }

    fn put(&mut self, key: impl Into<String>, value: Rational) {
        self.quantities.insert(key.into(), value);
    }

    fn claim(&mut self, name: &str, lhs: Rational, rhs: Rational) {
        self.identities.push(Identity { name: name.to_string(), lhs, rhs });
    }

    pub fn all_hold(&self) -> bool {
        self.identities.iter().all(Identity::holds)
    }

    pub fn get(&self, key: &str) -> Option<Rational> {
        self.quantities.get(key).copied()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap()
    }
}

struct Frac<'a>(&'a Rational);

impl Serialize for Frac<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Rational", 2)?;
        st.serialize_field("num", self.0.numer())?;
        st.serialize_field("den", self.0.denom())?;
        st.end()
    }
}

impl Serialize for Identity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Identity", 4)?;
        st.serialize_field("name", &self.name)?;
        st.serialize_field("lhs", &Frac(&self.lhs))?;
        st.serialize_field("rhs", &Frac(&self.rhs))?;
        st.serialize_field("holds", &self.holds())?;
        st.end()
    }
}

impl Serialize for ExactReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let q: BTreeMap<&str, Frac> = self.quantities.iter().map(|(k, v)| (k.as_str(), Frac(v))).collect();
        let mut st = s.serialize_struct("ExactReport", 6)?;
        st.serialize_field("name", &self.name)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("t", &self.t)?;
        st.serialize_field("quantities", &q)?;
        st.serialize_field("identities", &self.identities)?;
        st.end()
    }
}

/// Every feedback logic of width `n`, in truth-table order.
pub fn all_logics(n: u32) -> impl Iterator<Item = FeedbackLogic> {
    let vertices = 1u64 << (n - 1);
    (0u64..1 << vertices).map(move |table| {
        FeedbackLogic::from_fn(n, |v| (table >> v.0) & 1 == 1).expect("small widths are valid")
    })
}

/// Cycle label and cycle length of every edge.
fn cycle_labels(f: &FeedbackLogic) -> (Vec<usize>, Vec<u64>) {
    let total = f.num_edges() as usize;
    let mut label = vec![usize::MAX; total];
    let mut lengths = Vec::new();
    for start in 0..total {
        if label[start] != usize::MAX {
            continue;
        }
        let id = lengths.len();
        let mut x = start;
        let mut len = 0;
        while label[x] == usize::MAX {
            label[x] = id;
            len += 1;
            x = f.advance(x as u64) as usize;
        }
        lengths.push(len);
    }
    (label, lengths)
}

fn ratio(num: u64, den: u64) -> Rational {
    Ratio::new(num as i128, den as i128)
}

/// Law of the sorted cycle type, `P(full cycle)`, `E[A_1/N]`, `P(A_1 = 1)`
/// and `P(A_1 = N)` over all `2^{2^{n-1}}` logics.
pub fn exact_cycle_statistics(n: u32) -> Result<ExactReport, OracleError> {
    check("n", n as usize, 1, MAX_CYCLE_N as usize)?;
    let big_n = 1u64 << n;
    let logics = 1u64 << (1u64 << (n - 1));
    let mut types: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    let (mut full, mut a1_sum, mut a1_one, mut a1_full) = (0u64, 0u64, 0u64, 0u64);
    for f in all_logics(n) {
        let (label, lengths) = cycle_labels(&f);
        let mut sorted = lengths.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        *types.entry(sorted).or_default() += 1;
        full += (lengths.len() == 1) as u64;
        for &c in &label {
            let a1 = lengths[c];
            a1_sum += a1;
            a1_one += (a1 == 1) as u64;
            a1_full += (a1 == big_n) as u64;
        }
    }
    let pairs = logics * big_n;
    let mut r = ExactReport::new("cycle_statistics", n, None, None);
    let mut total = Rational::zero();
    for (ty, count) in &types {
        let p = ratio(*count, logics);
        total += p;
        let key = ty.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        r.put(format!("p_type[{key}]"), p);
    }
    r.put("total_probability", total);
    r.put("p_full_cycle", ratio(full, logics));
    r.put("mean_a1_over_n", Ratio::new(a1_sum as i128, (pairs * big_n) as i128));
    r.put("p_a1_eq_1", ratio(a1_one, pairs));
    r.put("p_a1_eq_n", ratio(a1_full, pairs));
    r.claim("total probability = 1", total, Rational::one());
    r.claim("N P(A1 = 1) = 1", ratio(a1_one, pairs) * big_n as i128, Rational::one());
    r.claim("N P(A1 = N) = 1", ratio(a1_full, pairs) * big_n as i128, Rational::one());
    Ok(r)
}

/// `E[(A_1/N)^{k-1}]` against `P(e_1, …, e_k on one cycle)`, both exact over
/// all logics and all start tuples (with repetition).
pub fn exact_moment_identity(n: u32, k: usize) -> Result<ExactReport, OracleError> {
    check("n", n as usize, 1, MAX_MOMENT_N as usize)?;
    check("k", k, 1, MAX_ORACLE_K)?;
    let big_n = 1usize << n;
    let logics = 1u128 << (1u64 << (n - 1));
    let (mut moment_num, mut cocyclic) = (0u128, 0u128);
    for f in all_logics(n) {
        let (label, lengths) = cycle_labels(&f);
        // left side: a uniform edge e_1, weight A_1^{k-1}
        for &c in &label {
            moment_num += (lengths[c] as u128).pow(k as u32 - 1);
        }
        // right side: literal enumeration of start tuples
        let tuples = big_n.pow(k as u32);
        for idx in 0..tuples {
            let first = label[idx % big_n];
            let mut rest = idx / big_n;
            let mut same = true;
            for _ in 1..k {
                same &= label[rest % big_n] == first;
                rest /= big_n;
            }
            cocyclic += same as u128;
        }
    }
    let den_left = logics * (big_n as u128).pow(k as u32);
    let den_right = logics * (big_n as u128).pow(k as u32);
    let lhs = Ratio::new(moment_num as i128, den_left as i128);
    let rhs = Ratio::new(cocyclic as i128, den_right as i128);
    let mut r = ExactReport::new("moment_identity", n, Some(k), None);
    r.put("moment", lhs);
    r.put("p_cocyclic", rhs);
    r.put("difference", lhs - rhs);
    r.claim("E (A1/N)^(k-1) = P(co-cyclic)", lhs, rhs);
    Ok(r)
}

/// Exact law of the first `t + n` bits of an FSR walk from uniform `(f, e)`,
/// keyed by bit string.
fn segment_law(n: u32, t: usize) -> BTreeMap<String, Rational> {
    let big_n = 1u64 << n;
    let logics = 1u64 << (1u64 << (n - 1));
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for f in all_logics(n) {
        for e in 0..big_n {
            let bits = f.segment(Edge(e), t).expect("edge in range").bits();
            *counts.entry(bits.iter().map(|b| (b'0' + b) as char).collect()).or_default() += 1;
        }
    }
    counts.into_iter().map(|(s, c)| (s, ratio(c, logics * big_n))).collect()
}

fn coin_strings(len: usize) -> impl Iterator<Item = BitSeq> {
    (0u64..1 << len).map(move |c| {
        let s: String = (0..len).map(|i| if (c >> (len - 1 - i)) & 1 == 1 { '1' } else { '0' }).collect();
        s.parse().expect("binary string")
    })
}

fn law_distance(a: &BTreeMap<String, Rational>, b: &BTreeMap<String, Rational>) -> Rational {
    let keys: std::collections::BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    let zero = Rational::zero();
    keys.into_iter().map(|k| (a.get(k).unwrap_or(&zero) - b.get(k).unwrap_or(&zero)).abs()).sum::<Rational>() / 2
}

/// Whether sequential editing pushes uniform coins of length `n + t` onto
/// exactly the law of FSR segments from uniform `(f, e)`.
pub fn exact_honest_t(n: u32, t: usize) -> Result<bool, OracleError> {
    Ok(exact_honest_t_report(n, t)?.all_hold())
}

pub fn exact_honest_t_report(n: u32, t: usize) -> Result<ExactReport, OracleError> {
    check("n", n as usize, 1, MAX_HONEST_N as usize)?;
    check("t", t, 0, MAX_HONEST_T)?;
    let len = n as usize + t;
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for coins in coin_strings(len) {
        let out = sequential_edit(&coins, n as usize).expect("valid width").output;
        *counts.entry(out.to_string()).or_default() += 1;
    }
    let edited: BTreeMap<String, Rational> = counts.into_iter().map(|(s, c)| (s, ratio(c, 1 << len))).collect();
    let walked = segment_law(n, t);
    let mut r = ExactReport::new("honest_t", n, None, Some(t));
    let tv = law_distance(&edited, &walked);
    r.put("support_size_edited", Rational::from_integer(edited.len() as i128));
    r.put("support_size_walked", Rational::from_integer(walked.len() as i128));
    r.put("tv_edited_vs_walked", tv);
    r.claim("edited law = walked law (TV)", tv, Rational::zero());
    Ok(r)
}

/// Same comparison for `k` walks of `t` steps from `k(n+t)` coins edited with
/// suspensions, against `k` walks from uniform `(f, e_1, …, e_k)`.
pub fn exact_kt_distribution(n: u32, k: usize, t: usize) -> Result<ExactReport, OracleError> {
    check("n", n as usize, 1, MAX_HONEST_N as usize)?;
    check("k", k, 1, MAX_ORACLE_K)?;
    let len = k * (n as usize + t);
    check("k(n+t)", len, 1, MAX_KT_COINS)?;
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for coins in coin_strings(len) {
        let out = kt_sequential_edit(&coins, n as usize, k, t).expect("length matches");
        *counts.entry(out.bits.to_string()).or_default() += 1;
    }
    let edited: BTreeMap<String, Rational> = counts.into_iter().map(|(s, c)| (s, ratio(c, 1 << len))).collect();
    let big_n = 1usize << n;
    let logics = 1u64 << (1u64 << (n - 1));
    let mut walk_counts: BTreeMap<String, u64> = BTreeMap::new();
    for f in all_logics(n) {
        for idx in 0..big_n.pow(k as u32) {
            let mut rest = idx;
            let mut s = String::with_capacity(len);
            for _ in 0..k {
                let bits = f.segment(Edge((rest % big_n) as u64), t).expect("edge in range").bits();
                s.extend(bits.iter().map(|b| (b'0' + b) as char));
                rest /= big_n;
            }
            *walk_counts.entry(s).or_default() += 1;
        }
    }
    let walked: BTreeMap<String, Rational> =
        walk_counts.into_iter().map(|(s, c)| (s, ratio(c, logics * big_n.pow(k as u32) as u64))).collect();
    let tv = law_distance(&edited, &walked);
    let mut r = ExactReport::new("kt_distribution", n, Some(k), Some(t));
    r.put("tv_edited_vs_walked", tv);
    r.claim("kt-edited law = walked law (TV)", tv, Rational::zero());
    Ok(r)
}

/// Law of the relativized permutation over all logics and all tuples of
/// `k` distinct starts, with its TV distance from uniform on `S_k`.
pub fn exact_relativized_distribution(n: u32, k: usize) -> Result<ExactReport, OracleError> {
    check("n", n as usize, 1, MAX_MOMENT_N as usize)?;
    check("k", k, 1, MAX_ORACLE_K.min(1 << n))?;
    let big_n = 1usize << n;
    let mut counts = vec![0i128; factorial(k)];
    let mut total = 0i128;
    for f in all_logics(n) {
        for idx in 0..big_n.pow(k as u32) {
            let mut rest = idx;
            let starts: Vec<Edge> = (0..k)
                .map(|_| {
                    let e = Edge((rest % big_n) as u64);
                    rest /= big_n;
                    e
                })
                .collect();
            if (1..k).any(|i| starts[..i].contains(&starts[i])) {
                continue;
            }
            counts[f.relativize(&starts).expect("valid starts").lehmer_index()] += 1;
            total += 1;
        }
    }
    let mut r = ExactReport::new("relativized_distribution", n, Some(k), None);
    let uniform = Ratio::new(1, factorial(k) as i128);
    let mut tv = Rational::zero();
    let mut mass = Rational::zero();
    for (i, &c) in counts.iter().enumerate() {
        let p = Ratio::new(c, total);
        mass += p;
        tv += (p - uniform).abs();
        r.put(format!("p[{}]", Perm::from_lehmer_index(k, i)), p);
    }
    r.put("tv_to_uniform", tv / 2);
    r.claim("total probability = 1", mass, Rational::one());
    Ok(r)
}
