//! Permutations of `{0, …, k-1}` in one-line form.
//!
//! Composition is right-to-left: `p.compose(&q)` applies `q` first. Public
//! text and JSON forms use the 1-based labels `{1, …, k}`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(k: usize) -> Self {
        Perm { images: (0..k).collect() }
    }

    /// The transposition of `a` and `b` (0-based); the identity when `a == b`.
    pub fn transposition(k: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(k);
        p.images.swap(a, b);
        p
    }

    /// Validates that `images` is a bijection of `0..images.len()`.
    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || std::mem::replace(&mut seen[x], true) {
                return None;
            }
        }
        Some(Perm { images })
    }

    /// One-line form over `{1, …, k}`.
    pub fn from_one_line(one_based: &[usize]) -> Option<Self> {
        let images = one_based
            .iter()
            .map(|&x| x.checked_sub(1))
            .collect::<Option<Vec<_>>>()?;
        Self::from_images(images)
    }

    /// Builds a permutation of `{1, …, k}` from disjoint cycles; unlisted points are fixed.
    pub fn from_cycles(k: usize, cycles: &[&[usize]]) -> Option<Self> {
        let mut images: Vec<usize> = (0..k).collect();
        let mut touched = vec![false; k];
        for cycle in cycles {
            for (idx, &x) in cycle.iter().enumerate() {
                let y = cycle[(idx + 1) % cycle.len()];
                if x == 0 || y == 0 || x > k || y > k || std::mem::replace(&mut touched[x - 1], true) {
                    return None;
                }
                images[x - 1] = y - 1;
            }
        }
        Self::from_images(images)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    /// `self ∘ other`: apply `other`, then `self`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.len(), other.len(), "composing permutations of different degree");
        Perm { images: other.images.iter().map(|&x| self.images[x]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.len()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y] = x;
        }
        Perm { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Cycles in canonical order: each cycle starts at its smallest point,
    /// cycles ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }

    pub fn is_unicyclic(&self) -> bool {
        !self.is_empty() && self.cycle_count() == 1
    }

    /// Cycle lengths, nonincreasing.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        lens.sort_unstable_by(|a, b| b.cmp(a));
        lens
    }

    /// Rank in lexicographic order of one-line forms (Lehmer code).
    pub fn lehmer_index(&self) -> usize {
        let k = self.len();
        let mut index = 0;
        for i in 0..k {
            let smaller = self.images[i + 1..].iter().filter(|&&x| x < self.images[i]).count();
            index = index * (k - i) + smaller;
        }
        index
    }

    pub fn from_lehmer_index(k: usize, mut index: usize) -> Perm {
        let mut digits = vec![0; k];
        for i in (0..k).rev() {
            let radix = k - i;
            digits[i] = index % radix;
            index /= radix;
        }
        let mut pool: Vec<usize> = (0..k).collect();
        let images = digits.into_iter().map(|d| pool.remove(d)).collect();
        Perm { images }
    }

    /// All of `S_k` in Lehmer order.
    pub fn all(k: usize) -> impl Iterator<Item = Perm> {
        (0..factorial(k)).map(move |i| Perm::from_lehmer_index(k, i))
    }
}

impl fmt::Display for Perm {
    /// Cycle notation over `{1, …, k}`, fixed points included: `(1 3)(2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "()");
        }
        for cycle in self.cycles() {
            write!(f, "(")?;
            for (i, x) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", x + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let one_based: Vec<usize> = self.images.iter().map(|x| x + 1).collect();
        one_based.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let one_based = Vec::<usize>::deserialize(deserializer)?;
        Perm::from_one_line(&one_based).ok_or_else(|| serde::de::Error::custom("not a permutation of 1..=k"))
    }
}

pub fn factorial(k: usize) -> usize {
    (1..=k).product()
}
