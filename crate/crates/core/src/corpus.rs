//! Seeded random diagrams for fuzzing.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gauss::{ArrowId, Endpoint, GaussDiagram, Role, Sign};
use crate::moves::{apply_to_diagram, classify, r3_indices, enumerate_insertion_sites, DiagramState, MoveClass, MoveSite};
use crate::realizability::is_realizable;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_sign<R: Rng>(rng: &mut R) -> Sign {
    Sign::from_bool(rng.gen_bool(0.5))
}

/// Uniformly shuffled word on arrows `1..=n` with random signs.
pub fn random_diagram<R: Rng>(rng: &mut R, n: usize) -> GaussDiagram {
    let mut word: Vec<Endpoint> =
        (1..=n as u32).flat_map(|a| [Endpoint::tail(a), Endpoint::head(a)]).collect();
    word.shuffle(rng);
    let signs: BTreeMap<ArrowId, Sign> = (1..=n as u32).map(|a| (ArrowId(a), random_sign(rng))).collect();
    GaussDiagram::from_parts_unchecked(word, signs)
}

/// Adds three arrows forming an Ω3 triangle at the given gaps (sorted
/// non-decreasing). `signs` are `(top_mid, top_bot, mid_bot)`; `flip`
/// reverses all three within-segment orders, which flips the direction.
/// `rotation` picks which segment lands at the first gap.
pub fn plant_triangle(
    d: &GaussDiagram,
    gaps: [usize; 3],
    signs: (Sign, Sign, Sign),
    descending: bool,
    flip: bool,
    rotation: usize,
) -> (GaussDiagram, MoveSite) {
    let base = d.max_id();
    let (tm, tb, mb) = (ArrowId(base + 1), ArrowId(base + 2), ArrowId(base + 3));
    let (s_tm, s_tb, s_mb) = signs;
    let e_b = Sign::from_bool(!flip);
    let e_m = s_tm * s_tb * e_b;
    let e_t = s_tm * s_mb * e_b;
    let ordered = |e: Sign, x: Endpoint, y: Endpoint| if e == Sign::Plus { [x, y] } else { [y, x] };
    let t = |a: ArrowId| Endpoint { arrow: a, role: Role::Tail };
    let h = |a: ArrowId| Endpoint { arrow: a, role: Role::Head };
    let top = ordered(e_t, t(tm), t(tb));
    let middle = ordered(e_m, h(tm), t(mb));
    let bottom = ordered(e_b, h(tb), h(mb));
    let passage = if descending { [top, middle, bottom] } else { [top, bottom, middle] };
    let blocks: Vec<[Endpoint; 2]> = (0..3).map(|k| passage[(k + rotation) % 3]).collect();

    let word = d.word();
    let mut w = Vec::with_capacity(word.len() + 6);
    let mut next_block = 0;
    for g in 0..d.gap_count() {
        while next_block < 3 && gaps[next_block] == g {
            w.extend(blocks[next_block]);
            next_block += 1;
        }
        if let Some(e) = word.get(g) {
            w.push(*e);
        }
    }
    debug_assert_eq!(next_block, 3);
    let mut s = d.signs().clone();
    s.insert(tm, s_tm);
    s.insert(tb, s_tb);
    s.insert(mb, s_mb);
    (GaussDiagram::from_parts_unchecked(w, s), MoveSite::R3 { top_mid: tm, top_bot: tb, mid_bot: mb })
}

fn random_gaps<R: Rng>(rng: &mut R, d: &GaussDiagram) -> [usize; 3] {
    let mut g = [0; 3].map(|_| rng.gen_range(0..d.gap_count()));
    g.sort_unstable();
    g
}

/// A random diagram with a planted triangle of random class.
pub fn random_with_triangle<R: Rng>(rng: &mut R, base_arrows: usize) -> (GaussDiagram, MoveSite) {
    let d = random_diagram(rng, base_arrows);
    let gaps = random_gaps(rng, &d);
    let signs = (random_sign(rng), random_sign(rng), random_sign(rng));
    plant_triangle(&d, gaps, signs, rng.gen_bool(0.5), rng.gen_bool(0.5), rng.gen_range(0..3))
}

/// Corpus of states with at most `max_arrows` arrows. Three quarters carry a
/// planted triangle so that Ω3 sites are plentiful. With `classical`, only
/// planar diagrams are kept.
pub fn corpus(seed: u64, count: usize, max_arrows: usize, classical: bool) -> Vec<DiagramState> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let d = if max_arrows >= 3 && r.gen_range(0..4) != 0 {
            let n = r.gen_range(0..=max_arrows - 3);
            random_with_triangle(&mut r, n).0
        } else {
            let n = r.gen_range(0..=max_arrows);
            random_diagram(&mut r, n)
        };
        if classical && !is_realizable(&d) {
            continue;
        }
        out.push(DiagramState::new(d, r.gen_range(-2..=2)));
    }
    out
}

/// A planar diagram grown from the empty one by random Ω1/Ω2 insertions and
/// planted triangles, never leaving the plane.
pub fn classical_diagram<R: Rng>(rng: &mut R, target_arrows: usize) -> GaussDiagram {
    let mut d = GaussDiagram::empty();
    let mut guard = 0;
    while d.len() < target_arrows && guard < 1000 {
        guard += 1;
        let next = if target_arrows - d.len() >= 3 && rng.gen_range(0..3) == 0 {
            let gaps = random_gaps(rng, &d);
            let signs = (random_sign(rng), random_sign(rng), random_sign(rng));
            plant_triangle(&d, gaps, signs, rng.gen_bool(0.5), rng.gen_bool(0.5), rng.gen_range(0..3)).0
        } else {
            let sites: Vec<MoveSite> = enumerate_insertion_sites(&d)
                .into_iter()
                .filter(|s| matches!(s, MoveSite::R1Insert { .. }) || target_arrows - d.len() >= 2)
                .collect();
            let site = sites.choose(rng).expect("insertion sites exist");
            apply_to_diagram(&d, site).expect("valid insertion").0
        };
        if is_realizable(&next) {
            d = next;
        }
    }
    d
}

/// A diagram and site realizing the given class and direction. The site is
/// applied to `base` (after an insertion for removal moves).
pub fn instantiate<R: Rng>(rng: &mut R, base: &GaussDiagram, class: MoveClass, direction: Sign) -> (GaussDiagram, MoveSite) {
    let gap = |rng: &mut R, d: &GaussDiagram| rng.gen_range(0..d.gap_count());
    let insert = match class {
        MoveClass::R1 { i, j } => Some(MoveSite::R1Insert { gap: gap(rng, base), i, j }),
        MoveClass::R2 { i, j } => {
            let (gap_over, gap_under) = (gap(rng, base), gap(rng, base));
            Some(MoveSite::R2Insert {
                gap_over,
                gap_under,
                interleaved: i == Sign::Plus,
                sign_first: -j,
                under_first: gap_over == gap_under && !base.is_empty() && rng.gen_bool(0.5),
            })
        }
        MoveClass::R3 { .. } => None,
    };
    if let Some(site) = insert {
        if direction == Sign::Plus {
            return (base.clone(), site);
        }
        let (after, _) = apply_to_diagram(base, &site).expect("insertion applies");
        let undo = crate::moves::inverse_site(base, &site, &after).expect("insertion has an inverse");
        return (after, undo);
    }
    let MoveClass::R3 { i, j, k, m } = class else { unreachable!() };
    let gaps = random_gaps(rng, base);
    let rotation = rng.gen_range(0..3);
    for flip in [false, true] {
        let (d, site) = plant_triangle(base, gaps, r3_indices(i, j, k), m == Sign::Plus, flip, rotation);
        let got = classify(&site, &d).expect("planted triangle is a site");
        if got.class == class && got.direction == direction {
            return (d, site);
        }
    }
    panic!("no planted triangle realizes {class} with direction {direction}");
}
