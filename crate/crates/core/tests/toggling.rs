//! Toggle classes on searched fixtures and random campaigns.

use fsr_core::editing::colored_repeats;
use fsr_core::fsr::{Edge, FeedbackLogic, Segment, Vertex};
use fsr_core::perm::Perm;
use fsr_core::rng::{self, TrialRng};
use fsr_core::toggling::{
    candidates, choice, g_of, happy_check, return_matching, schedule_of, toggle, verify_matching_claim, RegionParams,
    ToggleClass, Unhappy,
};
use rand::Rng;

fn random_instance(r: &mut TrialRng, n: u32, k: usize) -> (FeedbackLogic, Vec<Edge>) {
    let f = FeedbackLogic::random(n, r).unwrap();
    let starts = (0..k).map(|_| Edge(r.random_range(0..1u64 << n))).collect();
    (f, starts)
}

/// First happy instance, in seed order, that satisfies `keep`.
fn search(
    seed: u64,
    k: usize,
    params: &RegionParams,
    keep: impl Fn(&FeedbackLogic, &[Edge], &ToggleClass) -> bool,
) -> (FeedbackLogic, Vec<Edge>, ToggleClass) {
    let mut r = rng::seeded(seed);
    for _ in 0..200_000 {
        let (f, starts) = random_instance(&mut r, params.n, k);
        if let Ok(class) = happy_check(&f, &starts, params).unwrap() {
            if keep(&f, &starts, &class) {
                return (f, starts, class);
            }
        }
    }
    panic!("no instance found");
}

fn cycle_count(f: &FeedbackLogic) -> i64 {
    f.cycle_count().unwrap() as i64
}

#[test]
fn single_toggle_changes_cycle_count_by_one_exhaustively() {
    for n in 1..=4u32 {
        let vertices = 1u64 << (n - 1);
        for table in 0u64..1 << vertices {
            let f = FeedbackLogic::from_fn(n, |v| (table >> v.0) & 1 == 1).unwrap();
            let before = cycle_count(&f);
            for v in 0..vertices {
                let after = cycle_count(&toggle(&f, &[Vertex(v)]).unwrap());
                assert_eq!((after - before).abs(), 1, "n={n} table={table:b} v={v}");
            }
        }
    }
}

#[test]
fn single_toggle_changes_cycle_count_by_one_at_n16() {
    let mut r = rng::seeded(31);
    for _ in 0..200 {
        let f = FeedbackLogic::random(16, &mut r).unwrap();
        let v = Vertex(r.random_range(0..1 << 15));
        assert_eq!((cycle_count(&toggle(&f, &[v]).unwrap()) - cycle_count(&f)).abs(), 1);
    }
}

#[test]
fn toggles_commute_and_undo() {
    let mut r = rng::seeded(32);
    let f = FeedbackLogic::random(10, &mut r).unwrap();
    let u = [Vertex(3), Vertex(77)];
    let w = [Vertex(300), Vertex(12)];
    let uw = toggle(&toggle(&f, &u).unwrap(), &w).unwrap();
    let wu = toggle(&toggle(&f, &w).unwrap(), &u).unwrap();
    assert_eq!(uw, wu);
    assert_eq!(toggle(&toggle(&f, &u).unwrap(), &u).unwrap(), f);
    assert_eq!(toggle(&f, &[Vertex(5), Vertex(5)]).unwrap(), toggle(&f, &[Vertex(5)]).unwrap());
}

fn n12_two_regions() -> RegionParams {
    RegionParams::with_overrides(12, 200, &[(10, 1, 100), (10, 101, 200)]).unwrap()
}

#[test]
fn engineered_fixture_one_isolated_match_per_region() {
    let params = n12_two_regions();
    let (f, starts, class) = search(41, 2, &params, |f, starts, _| {
        (1..=2).all(|l| candidates(f, starts, l, &params).unwrap().len() == 1)
    });
    assert_eq!(class.m(), 2);
    assert_eq!(class.schedule, vec![(1, 2), (1, 2)]);
    let cousins: Vec<FeedbackLogic> = (0..4).map(|mask| class.cousin(mask)).collect();
    assert_eq!(cousins.iter().collect::<std::collections::HashSet<_>>().len(), 4);
    assert!(cousins.contains(&f));
    for c in &cousins {
        for l in 1..=2 {
            assert_eq!(choice(c, &starts, l, &params).unwrap(), Some(class.vertices[l - 1]));
        }
        // every cousin is happy with the same leader
        let again = happy_check(c, &starts, &params).unwrap().unwrap();
        assert_eq!(again, class);
    }
    // the return matching does not depend on the cousin used to walk
    let g_hat = return_matching(&class).unwrap();
    let male_ends: Vec<u64> = starts.iter().map(|&e| class.base.segment(e, params.t).unwrap().end().0).collect();
    for c in &cousins {
        let images: Vec<usize> = male_ends
            .iter()
            .map(|&end| {
                let mut x = c.advance(end);
                loop {
                    if let Some(b) = starts.iter().position(|s| s.0 == x) {
                        break b;
                    }
                    x = c.advance(x);
                }
            })
            .collect();
        assert_eq!(Perm::from_images(images).unwrap(), g_hat);
    }
    assert!(verify_matching_claim(&class).unwrap());
}

#[test]
fn single_region_fixture_verifies_both_cousins() {
    let params = RegionParams::with_overrides(12, 120, &[(12, 1, 120)]).unwrap();
    let (_, starts, class) = search(42, 2, &params, |_, _, _| true);
    assert_eq!(schedule_of(&class), vec![(1, 2)]);
    let g_hat = return_matching(&class).unwrap();
    let plain = class.cousin(0);
    let crossed = class.cousin(1);
    assert_eq!(plain.relativize(&starts).unwrap(), g_hat);
    assert_eq!(crossed.relativize(&starts).unwrap(), g_hat.compose(&Perm::transposition(2, 0, 1)));
    assert_eq!(g_of(&class, &crossed).unwrap(), Perm::transposition(2, 0, 1));
    // toggling once turns same-cycle starts into split ones and vice versa
    assert_ne!(plain.same_cycle_indicator(&starts).unwrap(), crossed.same_cycle_indicator(&starts).unwrap());
}

#[test]
fn schedule_fixture_with_two_color_pairs() {
    let params = RegionParams::with_overrides(12, 240, &[(8, 1, 120), (8, 121, 240)]).unwrap();
    let (_, _, class) = search(43, 3, &params, |_, _, c| c.schedule == vec![(1, 2), (1, 3)]);
    assert_eq!(class.schedule.len(), 2);
    let both = class.cousin(0b11);
    // (1 3)∘(1 2): 1 -> 2, 2 -> 1 -> 3, 3 -> 1
    assert_eq!(g_of(&class, &both).unwrap(), Perm::from_cycles(3, &[&[1, 2, 3]]).unwrap());
    assert!(verify_matching_claim(&class).unwrap());
}

fn full_cycle_logic(n: u32, seed: u64) -> FeedbackLogic {
    let mut r = rng::seeded(seed);
    loop {
        let f = FeedbackLogic::random(n, &mut r).unwrap();
        if f.cycle_count().unwrap() == 1 {
            return f;
        }
    }
}

#[test]
fn empty_schedule_class_is_the_relativized_permutation() {
    let f = full_cycle_logic(6, 44);
    let params = RegionParams::with_overrides(6, 4, &[]).unwrap();
    let orbit = f.segment(Edge(0), 63).unwrap();
    let e = |i: usize| orbit.edges()[i];
    for starts in [vec![e(0), e(10)], vec![e(0), e(10), e(20)], vec![e(20), e(0), e(10)]] {
        let class = happy_check(&f, &starts, &params).unwrap().unwrap();
        assert_eq!(class.m(), 0);
        let g_hat = return_matching(&class).unwrap();
        assert_eq!(f.relativize(&starts).unwrap(), g_hat);
        assert!(g_hat.is_unicyclic());
        assert!(verify_matching_claim(&class).unwrap());
    }
    // cyclic order e(0) -> e(10) -> e(20): starts listed as (20, 0, 10) map 1->2->3->1
    let class = happy_check(&f, &[e(20), e(0), e(10)], &params).unwrap().unwrap();
    assert_eq!(return_matching(&class).unwrap(), Perm::from_cycles(3, &[&[1, 2, 3]]).unwrap());
}

#[test]
fn one_walk_has_identity_return_matching() {
    let mut r = rng::seeded(45);
    let params = RegionParams::with_overrides(10, 20, &[]).unwrap();
    for _ in 0..20 {
        let (f, starts) = random_instance(&mut r, 10, 1);
        if let Ok(class) = happy_check(&f, &starts, &params).unwrap() {
            assert!(return_matching(&class).unwrap().is_identity());
        }
    }
}

#[test]
fn revisiting_walk_is_not_happy() {
    // f ≡ 0 at n=6: the walk from 000001 cycles after 6 steps
    let f = FeedbackLogic::zero(6).unwrap();
    let params = RegionParams::with_overrides(6, 10, &[(2, 1, 10)]).unwrap();
    assert_eq!(happy_check(&f, &[Edge(1), Edge(3)], &params).unwrap(), Err(Unhappy::RepeatedEdge));
    let params = RegionParams::with_overrides(6, 4, &[(0, 1, 4)]).unwrap();
    assert_eq!(happy_check(&f, &[Edge(1)], &params).unwrap(), Err(Unhappy::NullChoice(1)));
}

#[test]
fn matching_claim_campaign_n14() {
    for (k, m) in [(2, 1), (3, 2)] {
        let params = RegionParams::desk(14, 200, m, k, 2.0).unwrap();
        let mut r = rng::seeded(46 + k as u64);
        let mut happy = 0;
        for _ in 0..3000 {
            let (f, starts) = random_instance(&mut r, 14, k);
            if let Ok(class) = happy_check(&f, &starts, &params).unwrap() {
                happy += 1;
                assert!(verify_matching_claim(&class).unwrap(), "{}", class.to_json());
            }
        }
        assert!(happy > 100, "k={k} m={m}: {happy}");
    }
}

#[test]
fn toggle_splices_the_two_walks() {
    // after toggling at v = v_{1,i} = v_{2,j}, walk 1 continues along walk 2
    // from index j, displaced by d = j - i, and walk 2 along walk 1
    let mut r = rng::seeded(47);
    let (n, t) = (12u32, 150usize);
    let mut checked = 0;
    while checked < 25 {
        let (f, starts) = random_instance(&mut r, n, 2);
        let w: Vec<Segment> = starts.iter().map(|&e| f.segment(e, t).unwrap()).collect();
        let edges: std::collections::HashSet<Edge> = w.iter().flat_map(|s| s.edges().iter().copied()).collect();
        if edges.len() != 2 * (t + 1) {
            continue;
        }
        let reps = colored_repeats(&w).unwrap();
        let Some(hit) = reps.cross.iter().find(|c| c.i >= 1 && c.j >= 1 && c.i <= t && c.j <= t) else {
            continue;
        };
        let v = w[0].vertices()[hit.i];
        let occurrences = w.iter().flat_map(|s| s.vertices()).filter(|&x| x == v).count();
        if occurrences != 2 {
            continue;
        }
        let g = toggle(&f, &[v]).unwrap();
        let u: Vec<Segment> = starts.iter().map(|&e| g.segment(e, t).unwrap()).collect();
        let (i, j) = (hit.i, hit.j);
        let (old1, old2, new1, new2) = (w[0].vertices(), w[1].vertices(), u[0].vertices(), u[1].vertices());
        assert_eq!(new1[..=i], old1[..=i]);
        assert_eq!(new2[..=j], old2[..=j]);
        for s in 0..=(t + 1 - i.max(j)) {
            assert_eq!(new1[i + s], old2[j + s]);
            assert_eq!(new2[j + s], old1[i + s]);
        }
        // a same-color repeat of walk 2 past j reappears in walk 1 shifted by i - j
        let after = colored_repeats(&u).unwrap();
        for wr in reps.within.iter().filter(|x| x.color == 2 && x.i > j && x.j + i <= t + 1 + j) {
            let shifted = (wr.i + i - j, wr.j + i - j);
            assert!(after.within.iter().any(|x| x.color == 1 && (x.i, x.j) == shifted));
        }
        checked += 1;
    }
}
