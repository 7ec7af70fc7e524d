//! Worked certificates: the figure-eight knot against its inverse, and the
//! diagram sum that forces both Ω3 types and two Ω1 classes.

use std::collections::HashSet;
use std::fmt;

use crate::gauss::{canonical_form, parse_gauss_code, reverse_orientation, CanonicalForm, GaussDiagram, Sign};
use crate::invariants::{a4, d4, move_lower_bounds, profile, InvariantProfile, LowerBoundReport, DEFAULT_N_MAX};
use crate::moves::{apply_move, classify, enumerate_insertion_sites, enumerate_r3_sites, sum_states, DiagramState, MoveSite};
use crate::realizability::is_realizable;
use crate::rewriter::MoveSequence;

pub const FIGURE_EIGHT: &str = "O1+U2+O3-U4-O2+U1+O4-U3-";
pub const TREFOIL: &str = "O1+U2+O3+U1+O2+U3+";

/// Inverse knot: the circle is read backwards, so the winding flips.
pub fn reverse_state(s: &DiagramState) -> DiagramState {
    DiagramState::new(reverse_orientation(s.diagram()), -s.winding())
}

/// The member of `{F, mirror F, reverse F, mirror reverse F}` with
/// `A_4 = 1, D_4 = 0` whose reverse has `A_4 = 0, D_4 = 1`, if exactly one
/// exists.
pub fn figure_eight() -> Option<GaussDiagram> {
    let f = parse_gauss_code(FIGURE_EIGHT).expect("valid code");
    let m = crate::gauss::mirror(&f);
    let passing: Vec<GaussDiagram> = [f.clone(), m.clone(), reverse_orientation(&f), reverse_orientation(&m)]
        .into_iter()
        .filter(|d| {
            let r = reverse_orientation(d);
            (a4(d), d4(d), a4(&r), d4(&r)) == (1, 0, 0, 1)
        })
        .collect();
    if passing.contains(&f) {
        return Some(f);
    }
    let mut seen = HashSet::new();
    let distinct: Vec<GaussDiagram> = passing.into_iter().filter(|d| seen.insert(canonical_form(d))).collect();
    match distinct.as_slice() {
        [only] => Some(only.clone()),
        _ => None,
    }
}

#[derive(Debug, Clone)]
pub struct Fig8Certificate {
    pub diagram: GaussDiagram,
    pub forward: InvariantProfile,
    pub inverse: InvariantProfile,
    pub report: LowerBoundReport,
}

impl fmt::Display for Fig8Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F         = {}", self.diagram.raw_code())?;
        writeln!(f, "reverse F = {}", reverse_orientation(&self.diagram).raw_code())?;
        writeln!(f, "F:         {}", profile_line(&self.forward))?;
        writeln!(f, "reverse F: {}", profile_line(&self.inverse))?;
        write!(f, "{}", self.report)
    }
}

pub fn profile_line(p: &InvariantProfile) -> String {
    let mut s = format!("writhe {} winding {}", p.writhe, p.winding);
    for (n, v) in &p.a {
        s += &format!(" A_{n} {v}");
    }
    for (n, v) in &p.d {
        s += &format!(" D_{n} {v}");
    }
    for (n, v) in &p.w {
        s += &format!(" W_{n} {v}");
    }
    s
}

pub fn fig8(winding: i64) -> Option<Fig8Certificate> {
    let d = figure_eight()?;
    let s = DiagramState::new(d.clone(), winding);
    let forward = profile(&s, DEFAULT_N_MAX);
    let inverse = profile(&reverse_state(&s), DEFAULT_N_MAX);
    let report = move_lower_bounds(&forward, &inverse);
    Some(Fig8Certificate { diagram: d, forward, inverse, report })
}

/// `(A_4, D_4, writhe, winding)` of a state.
pub fn signature(s: &DiagramState) -> (i64, i64, i64, i64) {
    (a4(s.diagram()), d4(s.diagram()), s.writhe(), s.winding())
}

pub const UNKNOT_TARGET: (i64, i64, i64, i64) = (0, -1, -1, 0);

pub const SEARCH_DEPTH: usize = 6;
pub const SEARCH_ARROWS: usize = 7;

/// Arrows, writhe and winding after `site`, read off the site alone.
fn predicted(s: &DiagramState, site: &MoveSite) -> (usize, i64, i64) {
    let n = s.diagram().len();
    match *site {
        MoveSite::R1Insert { i, j, .. } => (n + 1, s.writhe() + j.to_i32() as i64, s.winding() + i.to_i32() as i64),
        MoveSite::R2Insert { .. } => (n + 2, s.writhe(), s.winding()),
        _ => (n, s.writhe(), s.winding()),
    }
}

#[derive(Debug, Clone)]
pub struct UnknotSearch {
    /// Winding seed of the empty diagram the moves start from.
    pub start_winding: i64,
    pub a: DiagramState,
    pub moves: MoveSequence,
}

/// Breadth-first search from the empty diagram, with winding seed `+1` or
/// `-1` (a round circle), over Ω1 and Ω2 insertions and Ω3 moves. States stay
/// planar and within `max_arrows`. `A_4` and `D_4` only change under Ω3, and
/// writhe and winding only under Ω1, each by one, so branches that cannot
/// reach `target` in the remaining depth are cut before the move is applied.
/// Returns the first state with the target signature and the moves reaching
/// it from the empty state it started from.
pub fn find_unknot(
    target: (i64, i64, i64, i64),
    max_depth: usize,
    max_arrows: usize,
) -> Option<UnknotSearch> {
    type Key = (CanonicalForm, i64);
    struct Node {
        state: DiagramState,
        ad: (i64, i64),
        parent: Option<(usize, MoveSite)>,
    }
    let (ta, td, twr, twi) = target;
    let mut nodes: Vec<Node> = Vec::new();
    let mut seen: HashSet<Key> = HashSet::new();
    for w in [1, -1] {
        let state = DiagramState::new(GaussDiagram::empty(), w);
        seen.insert((canonical_form(state.diagram()), w));
        nodes.push(Node { state, ad: (0, 0), parent: None });
    }
    let mut frontier: Vec<usize> = (0..nodes.len()).collect();
    let mut found = nodes.iter().position(|n| signature(&n.state) == target);
    for level in 0..max_depth {
        if found.is_some() {
            break;
        }
        let left = max_depth - level - 1;
        let mut next = Vec::new();
        'states: for &idx in &frontier {
            let s = nodes[idx].state.clone();
            let ad = nodes[idx].ad;
            let sites = enumerate_insertion_sites(s.diagram()).into_iter().chain(enumerate_r3_sites(s.diagram()));
            for site in sites {
                let (n, wr, wi) = predicted(&s, &site);
                if n > max_arrows || (twr - wr + twi - wi) % 2 != 0 {
                    continue;
                }
                let kinks = (twr - wr).abs().max((twi - wi).abs()) as usize;
                let is_r3 = matches!(site, MoveSite::R3 { .. });
                let need_r3 = usize::from(!is_r3 && ad != (ta, td));
                if need_r3 + kinks > left {
                    continue;
                }
                let Ok(t) = apply_move(&s, &site) else { continue };
                let t_ad = if is_r3 { (a4(t.diagram()), d4(t.diagram())) } else { ad };
                if left == 0 && (t_ad != (ta, td) || kinks != 0) {
                    continue;
                }
                if !seen.insert((canonical_form(t.diagram()), t.winding())) || !is_realizable(t.diagram()) {
                    continue;
                }
                nodes.push(Node { state: t, ad: t_ad, parent: Some((idx, site)) });
                let id = nodes.len() - 1;
                if signature(&nodes[id].state) == target {
                    found = Some(id);
                    break 'states;
                }
                next.push(id);
            }
        }
        frontier = next;
    }
    let found = found?;
    let mut path = Vec::new();
    let mut k = found;
    while let Some((prev, site)) = nodes[k].parent {
        path.push((prev, site));
        k = prev;
    }
    path.reverse();
    let mut seq = MoveSequence::new();
    for (prev, site) in path {
        seq.push(site, classify(&site, nodes[prev].state.diagram()).expect("recorded site"));
    }
    Some(UnknotSearch { start_winding: nodes[k].state.winding(), a: nodes[found].state.clone(), moves: seq })
}

#[derive(Debug, Clone)]
pub struct Thm3Certificate {
    pub search: UnknotSearch,
    pub d: DiagramState,
    pub k: DiagramState,
    pub d_profile: InvariantProfile,
    pub k_profile: InvariantProfile,
    pub report: LowerBoundReport,
}

impl fmt::Display for Thm3Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = &self.search.a;
        writeln!(f, "a = {} (winding {})", a.diagram().raw_code(), a.winding())?;
        writeln!(f, "a is reached from the empty diagram with winding {:+} by:", self.search.start_winding)?;
        for (site, class) in self.search.moves.steps() {
            writeln!(f, "  {class} @ {site}")?;
        }
        let (aa, ad, awr, awi) = signature(a);
        writeln!(f, "a: A_4 {aa} D_4 {ad} writhe {awr} winding {awi}")?;
        writeln!(f, "d = {}", self.d.diagram().raw_code())?;
        writeln!(f, "k = {}", self.k.diagram().raw_code())?;
        writeln!(f, "d: {}", profile_line(&self.d_profile))?;
        writeln!(f, "k: {}", profile_line(&self.k_profile))?;
        write!(f, "{}", self.report)
    }
}

/// `d # a # ã`, with the two cuts made in opposite styles and at
/// corresponding points of `a` and its inverse so their windings cancel.
pub fn sum_with_pair(d: &DiagramState, a: &DiagramState) -> DiagramState {
    let inv = reverse_state(a);
    let cut_a = 0;
    let cut_inv = (a.diagram().gap_count() - cut_a) % a.diagram().gap_count().max(1);
    let da = sum_states(d, Sign::Plus, a, 0, cut_a).expect("gap 0 exists");
    sum_states(&da, Sign::Minus, &inv, 0, cut_inv).expect("gap exists")
}

pub fn thm3(d: &DiagramState) -> Option<Thm3Certificate> {
    thm3_with(d, SEARCH_DEPTH, SEARCH_ARROWS)
}

pub fn thm3_with(d: &DiagramState, depth: usize, max_arrows: usize) -> Option<Thm3Certificate> {
    let search = find_unknot(UNKNOT_TARGET, depth, max_arrows)?;
    let k = sum_with_pair(d, &search.a);
    let d_profile = profile(d, DEFAULT_N_MAX);
    let k_profile = profile(&k, DEFAULT_N_MAX);
    let report = move_lower_bounds(&d_profile, &k_profile);
    Some(Thm3Certificate { search, d: d.clone(), k, d_profile, k_profile, report })
}
