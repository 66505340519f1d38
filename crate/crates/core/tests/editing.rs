//! Editing checked against quadratic reference evaluators and exhaustive
//! enumeration of small coin sequences.

use fsr_core::editing::{
    bad_event, colored_repeats, cut, det_g_check, find_leftmost_repeats, gkt_check, good_event_check,
    kt_sequential_edit, sequential_edit, shotgun_edit, suspension_indices, verify_det_g, BitSeq, ColoredRepeat,
    GoodEventReport, WithinRepeat,
};
use fsr_core::fsr::Segment;
use fsr_core::rng;
use proptest::prelude::*;

mod brute {
    //! Direct transcriptions of the definitions; quadratic or worse.

    pub fn leftmost(s: &[u8], m: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        if m > s.len() {
            return out;
        }
        for i in 0..=s.len() - m {
            for j in i + 1..=s.len() - m {
                if s[i..i + m] == s[j..j + m] && (i == 0 || s[i - 1] != s[j - 1]) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn hamming(x: &[u8], y: &[u8]) -> usize {
        x.iter().zip(y).filter(|(a, b)| a != b).count()
    }

    fn meets(a: (usize, usize), b: (usize, usize)) -> bool {
        a.0 <= b.1 && b.0 <= a.1
    }

    pub fn good_event(s: &[u8], n: usize) -> [bool; 6] {
        let len = s.len();
        let reps = leftmost(s, n);
        let iv = |x: usize| (x, x + n - 1);
        let flips: Vec<usize> = reps.iter().map(|&(_, j)| j + n - 1).collect();

        let a = (1..=len - n).all(|p| hamming(&s[p..p + n], &s[..n]) > 1);
        let b = reps.iter().all(|&(i, _)| reps.iter().all(|&(_, j)| !meets(iv(i), iv(j))));
        let mut c = true;
        for x in 0..reps.len() {
            for y in x + 1..reps.len() {
                if meets(iv(reps[x].0), iv(reps[y].0)) || meets(iv(reps[x].1), iv(reps[y].1)) {
                    c = false;
                }
            }
        }
        let h = n - 1;
        let zero: Vec<&[u8]> = (0..=len - h).map(|p| &s[p..p + h]).collect();
        let mut first: Vec<((usize, usize), Vec<u8>)> = Vec::new();
        let mut sites = flips.clone();
        sites.sort();
        sites.dedup();
        for &p in &sites {
            for start in 0..=len - h {
                if start <= p && p < start + h {
                    let mut w = s[start..start + h].to_vec();
                    w[p - start] ^= 1;
                    first.push(((start, p), w));
                }
            }
        }
        let mut d = true;
        for (x, (key, w)) in first.iter().enumerate() {
            if zero.iter().any(|z| z == &w.as_slice()) {
                d = false;
            }
            for (key2, w2) in &first[x + 1..] {
                if key != key2 && w == w2 {
                    d = false;
                }
            }
        }
        let mut e = true;
        for (i, j) in leftmost(s, h) {
            for &p in &flips {
                let inside = (i..i + h).contains(&p) || (j..j + h).contains(&p);
                let before = (i > 0 && p == i - 1) || p == j - 1;
                if inside || before {
                    e = false;
                }
            }
        }
        let m = 2 * n - 1;
        let mut f = true;
        if m <= len {
            for i in 0..=len - m {
                for j in i + 1..=len - m {
                    if s[i..i + m] == s[j..j + m] {
                        f = false;
                    }
                }
            }
        }
        [a, b, c, d, e, f]
    }

    pub fn bad(s: &[u8], n: usize, k: usize, t: usize) -> bool {
        let h = n - 1;
        let mut js = Vec::new();
        for a in 1..k {
            for j in a * (n + t) + 2 - n..a * (n + t) {
                js.push(j);
            }
        }
        let last = k * (n + t) - n + 1;
        (0..=last).any(|i| js.iter().any(|&j| i != j && hamming(&s[i..i + h], &s[j..j + h]) <= 1))
    }

    /// Cuts a single sequential edit of all coins into k walks.
    pub fn cut_single(s: &[u8], n: usize, k: usize, t: usize) -> Vec<Vec<u8>> {
        let out = super::sequential_edit(&super::BitSeq::new(s.to_vec()).unwrap(), n).unwrap();
        (0..k).map(|a| out.output.as_slice()[a * (n + t)..a * (n + t) + n + t].to_vec()).collect()
    }
}

fn flags(r: &GoodEventReport) -> [bool; 6] {
    [r.a, r.b, r.c, r.d, r.e, r.f]
}

fn all_sequences(len: usize) -> impl Iterator<Item = BitSeq> {
    (0u64..1 << len).map(move |x| BitSeq::new((0..len).map(|k| ((x >> (len - 1 - k)) & 1) as u8).collect()).unwrap())
}

#[test]
fn repeat_scan_matches_pairwise_definition() {
    let mut r = rng::seeded(21);
    for trial in 0..300 {
        let len = 5 + trial % 60;
        let coins = BitSeq::random(len, &mut r);
        for m in 1..8.min(len) {
            let fast: Vec<(usize, usize)> =
                find_leftmost_repeats(&coins, m).unwrap().iter().map(|x| (x.i, x.j)).collect();
            assert_eq!(fast, brute::leftmost(coins.as_slice(), m), "{coins} m={m}");
        }
    }
}

#[test]
fn good_event_flags_match_reference_on_small_sequences() {
    let mut r = rng::seeded(22);
    let mut seen_true = 0;
    for trial in 0..2000 {
        let n = 3 + trial % 8;
        let t = 2 + (trial * 7) % 60;
        let coins = BitSeq::random(n + t, &mut r);
        let rep = good_event_check(&coins, n).unwrap();
        assert_eq!(flags(&rep), brute::good_event(coins.as_slice(), n), "{coins} n={n}");
        assert_eq!(rep.overall, flags(&rep).iter().all(|&x| x));
        seen_true += rep.overall as usize;
    }
    assert!(seen_true > 200, "campaign should visit G often, saw {seen_true}");
}

#[test]
fn good_event_flags_match_reference_at_n16_t2048() {
    let mut r = rng::seeded(23);
    for _ in 0..3 {
        let coins = BitSeq::random(16 + 2048, &mut r);
        let rep = good_event_check(&coins, 16).unwrap();
        assert_eq!(flags(&rep), brute::good_event(coins.as_slice(), 16));
    }
}

#[test]
fn every_condition_can_fail_alone_or_together() {
    // the reference and the fast checker agree flag by flag; make sure each
    // flag is exercised in both directions somewhere
    let mut r = rng::seeded(24);
    let mut false_seen = [false; 6];
    for trial in 0..4000 {
        let n = 3 + trial % 5;
        let coins = BitSeq::random(n + 4 + trial % 30, &mut r);
        let f = flags(&good_event_check(&coins, n).unwrap());
        for (k, v) in f.iter().enumerate() {
            false_seen[k] |= !v;
        }
    }
    assert_eq!(false_seen, [true; 6]);
}

#[test]
fn detg_holds_on_every_short_sequence() {
    for (n, t) in [(3, 3), (4, 5), (5, 7), (6, 9), (7, 10), (8, 10)] {
        let mut in_g = 0;
        for coins in all_sequences(n + t) {
            let check = det_g_check(&coins, n).unwrap();
            assert!(check.holds(), "n={n} coins={coins} {check:?}");
            in_g += check.report.overall as usize;
        }
        assert!(in_g > 0, "n={n}, t={t}: no sequence in G");
    }
}

#[test]
fn detg_holds_on_random_campaign() {
    let mut r = rng::seeded(25);
    let mut in_g = 0;
    for trial in 0..3000 {
        let n = 8 + trial % 7;
        let t = 16 + trial % 200;
        let coins = BitSeq::random(n + t, &mut r);
        let check = det_g_check(&coins, n).unwrap();
        assert!(check.holds(), "n={n} coins={coins}");
        in_g += check.report.overall as usize;
    }
    assert!(in_g > 1000, "{in_g}");
}

#[test]
fn shotgun_and_sequential_differ_off_g() {
    // without G the two edits need not agree; 00000 at n=2 is the canonical case
    let coins: BitSeq = "00000".parse().unwrap();
    assert!(!good_event_check(&coins, 2).unwrap().overall);
    assert_ne!(sequential_edit(&coins, 2).unwrap().output, shotgun_edit(&coins, 2).unwrap().0);
    assert!(verify_det_g(&coins, 2).unwrap());
}

#[test]
fn bad_event_matches_reference() {
    let mut r = rng::seeded(26);
    for trial in 0..1500 {
        let n = 3 + trial % 10;
        let k = 1 + trial % 4;
        let t = 1 + (trial * 5) % 40;
        let coins = BitSeq::random(k * (n + t), &mut r);
        assert_eq!(
            bad_event(&coins, n, k, t).unwrap(),
            brute::bad(coins.as_slice(), n, k, t),
            "n={n} k={k} t={t} {coins}"
        );
    }
}

#[test]
fn bad_event_reference_at_n20() {
    let mut r = rng::seeded(27);
    let (n, k, t) = (20, 2, 30);
    let mut hits = 0;
    for _ in 0..200 {
        let coins = BitSeq::random(k * (n + t), &mut r);
        let fast = bad_event(&coins, n, k, t).unwrap();
        assert_eq!(fast, brute::bad(coins.as_slice(), n, k, t));
        assert_eq!(gkt_check(&coins, n, k, t).unwrap(), good_event_check(&coins, n).unwrap().overall && !fast);
        hits += fast as usize;
    }
    assert!(hits < 20, "{hits}");
}

fn kt_walks_match_cut(coins: &BitSeq, n: usize, k: usize, t: usize) -> bool {
    let kt = kt_sequential_edit(coins, n, k, t).unwrap();
    let cut = brute::cut_single(coins.as_slice(), n, k, t);
    kt.segments.iter().zip(&cut).all(|(s, c)| &s.bits() == c)
}

#[test]
fn kt_edit_matches_cut_single_edit_on_gkt_exhaustively() {
    for (n, k, t) in [(6, 2, 2), (7, 2, 1), (6, 2, 1)] {
        let mut in_gkt = 0;
        for coins in all_sequences(k * (n + t)) {
            if gkt_check(&coins, n, k, t).unwrap() {
                in_gkt += 1;
                assert!(kt_walks_match_cut(&coins, n, k, t), "n={n} k={k} t={t} {coins}");
            }
        }
        assert!(in_gkt > 0, "n={n} k={k} t={t}");
    }
}

#[test]
fn kt_edit_matches_cut_single_edit_on_gkt_random() {
    let mut r = rng::seeded(28);
    let mut in_gkt = 0;
    for trial in 0..4000 {
        let n = 12 + trial % 9;
        let k = 2 + trial % 3;
        let t = 2 + (trial * 3) % 50;
        let coins = BitSeq::random(k * (n + t), &mut r);
        if gkt_check(&coins, n, k, t).unwrap() {
            in_gkt += 1;
            assert!(kt_walks_match_cut(&coins, n, k, t), "n={n} k={k} t={t} {coins}");
        }
    }
    assert!(in_gkt > 1500, "{in_gkt}");
}

#[test]
fn cut_follows_the_step_arithmetic() {
    let mut r = rng::seeded(29);
    let coins = BitSeq::random(3 * (8 + 20), &mut r);
    let single = sequential_edit(&coins, 8).unwrap();
    let seg = Segment::from_bits(8, single.output.as_slice()).unwrap();
    let walks = cut(&seg, 3, 20).unwrap();
    assert_eq!(walks.len(), 3);
    for (a, w) in walks.iter().enumerate() {
        assert_eq!(w.edges(), &seg.edges()[a * 28..=a * 28 + 20]);
    }
    assert!(cut(&seg, 3, 19).is_err());
}

/// 300 coins whose only repeated 9-bit windows start at (56,153), (120,260)
/// and (135,175).
const WORKED_EXAMPLE: &str = "100010101100000001001110001100100000000011011101000110100101010001111100110111101011001001001010011101001000110001001100111001111001001101101000011000011010101000000111001011010110100010111101100101111100011101011101010110111000000101110001000001010010011111011110011111100001001011101110011000111100";

#[test]
fn worked_example_cut_into_three_colors() {
    let coins: BitSeq = WORKED_EXAMPLE.parse().unwrap();
    assert_eq!(coins.len(), 300);
    let reps: Vec<(usize, usize)> = find_leftmost_repeats(&coins, 9).unwrap().iter().map(|r| (r.i, r.j)).collect();
    assert_eq!(reps, vec![(56, 153), (120, 260), (135, 175)]);
    let single = Segment::from_bits(10, coins.as_slice()).unwrap();
    assert_eq!(single.len_steps(), 290);
    let walks = cut(&single, 3, 90).unwrap();
    let got = colored_repeats(&walks).unwrap();
    assert_eq!(got.cross, vec![ColoredRepeat { i: 56, j: 53, a: 1, b: 2 }, ColoredRepeat { i: 20, j: 60, a: 2, b: 3 }]);
    assert_eq!(got.within, vec![WithinRepeat { color: 2, i: 35, j: 75 }]);
}

#[test]
fn suspension_indices_sit_strictly_inside_walk_boundaries() {
    // a(n+t)-n+1 is the last vertex of walk a, a(n+t) the first vertex of walk a+1
    let idx = suspension_indices(10, 3, 90);
    assert!(idx.contains(&92) && idx.contains(&99));
    assert!(!idx.contains(&91) && !idx.contains(&100));
}

proptest! {
    #[test]
    fn colored_repeats_relabel_symmetrically(seed in any::<u64>(), n in 4u32..9, t in 3usize..40) {
        let mut r = rng::seeded(seed);
        let walks: Vec<Segment> = (0..3)
            .map(|_| Segment::from_bits(n, BitSeq::random(n as usize + t, &mut r).as_slice()).unwrap())
            .collect();
        let base = colored_repeats(&walks).unwrap();
        // swap colors 1 and 3
        let swapped = colored_repeats(&[walks[2].clone(), walks[1].clone(), walks[0].clone()]).unwrap();
        let relabel = |c: usize| 4 - c;
        let mut mapped: Vec<ColoredRepeat> = base
            .cross
            .iter()
            .map(|x| {
                let (a, b) = (relabel(x.a), relabel(x.b));
                if a < b { ColoredRepeat { i: x.i, j: x.j, a, b } } else { ColoredRepeat { i: x.j, j: x.i, a: b, b: a } }
            })
            .collect();
        mapped.sort_by_key(|r| (r.a, r.b, r.i, r.j));
        prop_assert_eq!(mapped, swapped.cross);
        let mut within: Vec<WithinRepeat> =
            base.within.iter().map(|w| WithinRepeat { color: relabel(w.color), ..*w }).collect();
        within.sort();
        prop_assert_eq!(within, swapped.within);
    }

    #[test]
    fn k_equals_one_is_plain_sequential_editing(seed in any::<u64>(), n in 1usize..10, t in 0usize..60) {
        let coins = BitSeq::random(n + t, &mut rng::seeded(seed));
        let kt = kt_sequential_edit(&coins, n, 1, t).unwrap();
        let single = sequential_edit(&coins, n).unwrap();
        prop_assert_eq!(&kt.bits, &single.output);
        prop_assert_eq!(kt.actual_edits, single.actual_edits);
    }
}
