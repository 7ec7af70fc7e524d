//! Rewriting arbitrary Reidemeister moves into a six-class generating set.
//!
//! A move only touches a few short segments of the circle. The segments are
//! cut out into a small template diagram, where the host between them is
//! replaced by placeholder arrows. A depth-first search over local moves
//! that follow a prescribed class trace finds the replacement movie once
//! per template shape; the movie is then transplanted back into the host
//! and every step that is still outside the generating set is expanded
//! recursively.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gauss::{serialize, ArrowId, Endpoint, GaussDiagram, Role, Sign};
use crate::moves::{
    apply_move, apply_to_diagram, classify, enumerate_removal_sites, kink_block, resolve_r2, resolve_r3, DiagramState,
    DirectedMoveClass, MoveClass, MoveError, MoveSite,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratingSet {
    /// Ω1++, Ω1+-, Ω2-+, Ω2--, Ω3-+++, Ω3--+-.
    #[default]
    Primary,
    /// Ω1-+, Ω1--, Ω2-+, Ω2+-, Ω3+--+, Ω3++--.
    Alternate,
}

impl GeneratingSet {
    pub fn classes(self) -> [MoveClass; 6] {
        use Sign::{Minus as M, Plus as P};
        match self {
            GeneratingSet::Primary => [
                MoveClass::R1 { i: P, j: P },
                MoveClass::R1 { i: P, j: M },
                MoveClass::R2 { i: M, j: P },
                MoveClass::R2 { i: M, j: M },
                MoveClass::R3 { i: M, j: P, k: P, m: P },
                MoveClass::R3 { i: M, j: M, k: P, m: M },
            ],
            GeneratingSet::Alternate => [
                MoveClass::R1 { i: M, j: P },
                MoveClass::R1 { i: M, j: M },
                MoveClass::R2 { i: M, j: P },
                MoveClass::R2 { i: P, j: M },
                MoveClass::R3 { i: P, j: M, k: M, m: P },
                MoveClass::R3 { i: P, j: P, k: M, m: M },
            ],
        }
    }

    pub fn contains(self, class: MoveClass) -> bool {
        self.classes().contains(&class)
    }

    /// The Ω3 index triple of the set's Ω3 class with the given `m`.
    pub fn core_triple(self, m: Sign) -> IndexTriple {
        self.classes()
            .into_iter()
            .find_map(|c| match c {
                MoveClass::R3 { i, j, k, m: mm } if mm == m => Some(IndexTriple { i, j, k }),
                _ => None,
            })
            .expect("one Ω3 class per m")
    }
}

impl fmt::Display for GeneratingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratingSet::Primary => "primary",
            GeneratingSet::Alternate => "alternate",
        })
    }
}

impl std::str::FromStr for GeneratingSet {
    type Err = String;

    fn from_str(s: &str) -> Result<GeneratingSet, String> {
        match s {
            "primary" => Ok(GeneratingSet::Primary),
            "alternate" => Ok(GeneratingSet::Alternate),
            _ => Err(format!("unknown generating set '{s}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error("no local expansion of {0} found")]
    NoExpansion(String),
    #[error("{0} is not a move of the expected kind")]
    WrongKind(String),
}

/// Moves addressed against the evolving diagram, each with its class.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MoveSequence {
    steps: Vec<(MoveSite, DirectedMoveClass)>,
}

impl MoveSequence {
    pub fn new() -> MoveSequence {
        MoveSequence::default()
    }

    pub fn steps(&self) -> &[(MoveSite, DirectedMoveClass)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, site: MoveSite, class: DirectedMoveClass) {
        self.steps.push((site, class));
    }

    pub fn extend(&mut self, other: MoveSequence) {
        self.steps.extend(other.steps);
    }

    pub fn classes(&self) -> Vec<MoveClass> {
        self.steps.iter().map(|(_, c)| c.class).collect()
    }

    /// Applies every step, checking each recorded class.
    pub fn replay(&self, start: &DiagramState) -> Result<DiagramState, MoveError> {
        let mut state = start.clone();
        for (site, class) in &self.steps {
            let got = classify(site, state.diagram())?;
            if got != *class {
                return Err(MoveError::Inapplicable(format!(
                    "{site} is {} dir {}, recorded as {} dir {}",
                    got.class, got.direction, class.class, class.direction
                )));
            }
            state = apply_move(&state, site)?;
        }
        Ok(state)
    }

    /// One `<class> @ <site>` line per step, then the canonical code of the
    /// end diagram.
    pub fn render(&self, start: &DiagramState) -> Result<String, MoveError> {
        let end = self.replay(start)?;
        Ok(format!("{self}{}\n", serialize(end.diagram())))
    }
}

impl fmt::Display for MoveSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (site, class) in &self.steps {
            writeln!(f, "{} @ {site}", class.class)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Ω3 index conjugation

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexTriple {
    pub i: Sign,
    pub j: Sign,
    pub k: Sign,
}

impl IndexTriple {
    pub fn all() -> Vec<IndexTriple> {
        let mut out = Vec::with_capacity(8);
        for i in Sign::BOTH {
            for j in Sign::BOTH {
                for k in Sign::BOTH {
                    out.push(IndexTriple { i, j, k });
                }
            }
        }
        out
    }

    /// Index triple and `m` of an Ω3 class.
    pub fn of(class: MoveClass) -> Option<(IndexTriple, Sign)> {
        match class {
            MoveClass::R3 { i, j, k, m } => Some((IndexTriple { i, j, k }, m)),
            _ => None,
        }
    }
}

impl fmt::Display for IndexTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.i, self.j, self.k)
    }
}

/// The three index changes an Ω2 conjugation can make to an Ω3 move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Wedge {
    /// `(i,j,k) -> (j,i,-k)`
    SwapReverse,
    /// `(i,j,k) -> (j,-i,k)`
    TurnLeft,
    /// `(i,j,k) -> (-j,i,k)`
    TurnRight,
}

impl Wedge {
    pub const ALL: [Wedge; 3] = [Wedge::SwapReverse, Wedge::TurnLeft, Wedge::TurnRight];

    pub fn apply(self, t: IndexTriple) -> IndexTriple {
        match self {
            Wedge::SwapReverse => IndexTriple { i: t.j, j: t.i, k: -t.k },
            Wedge::TurnLeft => IndexTriple { i: t.j, j: -t.i, k: t.k },
            Wedge::TurnRight => IndexTriple { i: -t.j, j: t.i, k: t.k },
        }
    }
}

/// Shortest word in the three wedges taking `current` to `target`.
pub fn conjugate_r3(current: IndexTriple, target: IndexTriple) -> Vec<Wedge> {
    let mut prev: HashMap<IndexTriple, (IndexTriple, Wedge)> = HashMap::new();
    let mut queue = VecDeque::from([current]);
    let mut seen = HashSet::from([current]);
    while let Some(t) = queue.pop_front() {
        if t == target {
            break;
        }
        for w in Wedge::ALL {
            let u = w.apply(t);
            if seen.insert(u) {
                prev.insert(u, (t, w));
                queue.push_back(u);
            }
        }
    }
    let mut path = Vec::new();
    let mut t = target;
    while t != current {
        let (p, w) = prev[&t];
        path.push(w);
        t = p;
    }
    path.reverse();
    path
}

/// Longest shortest wedge word between two triples.
pub fn conjugation_diameter() -> usize {
    let all = IndexTriple::all();
    all.iter().flat_map(|a| all.iter().map(move |b| conjugate_r3(*a, *b).len())).max().unwrap_or(0)
}

// ---------------------------------------------------------------------------
// Templates

/// A move site cut out of its host.
#[derive(Debug, Clone)]
struct Frame {
    /// Host endpoints between segment `s` and segment `s + 1`.
    pieces: Vec<Vec<Endpoint>>,
    template: GaussDiagram,
    /// Placeholder endpoints standing in for the pieces.
    dummies: Vec<Vec<Endpoint>>,
    site: MoveSite,
}

fn offsets(seg_lens: &[usize], piece_lens: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(seg_lens.len());
    let mut acc = 0;
    for (s, p) in seg_lens.iter().zip(piece_lens) {
        out.push(acc);
        acc += s + p;
    }
    out
}

fn build_frame(d: &GaussDiagram, site: &MoveSite) -> Result<Frame, MoveError> {
    classify(site, d)?;
    let word = d.word();
    let len = word.len();
    let mut segs: Vec<(usize, usize)> = match *site {
        MoveSite::R1Insert { gap, .. } => vec![(gap, 0)],
        MoveSite::R1Remove { arrow, i } => {
            let (t, h) = d.endpoints_of(arrow).expect("classified");
            let first = kink_block(arrow, i, d.sign(arrow).unwrap())[0];
            vec![(if first.role == Role::Tail { t } else { h }, 2)]
        }
        MoveSite::R2Insert { gap_over, gap_under, .. } => {
            if gap_over == gap_under {
                vec![(gap_over, 0)]
            } else {
                vec![(gap_over, 0), (gap_under, 0)]
            }
        }
        MoveSite::R2Remove { arrows: (a, b) } => {
            let pair = resolve_r2(d, a, b)?;
            vec![(pair.tail_start, 2), (pair.head_start, 2)]
        }
        MoveSite::R3 { top_mid, top_bot, mid_bot } => {
            let g = resolve_r3(d, top_mid, top_bot, mid_bot)?;
            vec![(g.top.0, 2), (g.middle.0, 2), (g.bottom.0, 2)]
        }
    };
    segs.sort_unstable();
    let k = segs.len();
    let at = |p: usize| word[p % len];
    let contents: Vec<Vec<Endpoint>> = segs.iter().map(|&(s, l)| (s..s + l).map(at).collect()).collect();
    let pieces: Vec<Vec<Endpoint>> = (0..k)
        .map(|s| {
            let end = segs[s].0 + segs[s].1;
            let next = if s + 1 < k { segs[s + 1].0 } else { segs[0].0 + len };
            (end..next).map(at).collect()
        })
        .collect();

    let mut ids: BTreeMap<ArrowId, ArrowId> = BTreeMap::new();
    for e in contents.iter().flatten() {
        let next = ArrowId(ids.len() as u32 + 1);
        ids.entry(e.arrow).or_insert(next);
    }
    let m = ids.len() as u32;
    let (x, y) = (m + 1, m + 2);
    let dummies: Vec<Vec<Endpoint>> = match k {
        1 => vec![vec![Endpoint::tail(x), Endpoint::head(x)]],
        2 => vec![vec![Endpoint::tail(x)], vec![Endpoint::head(x)]],
        _ => vec![vec![Endpoint::tail(x)], vec![Endpoint::head(x), Endpoint::tail(y)], vec![Endpoint::head(y)]],
    };
    let mut tword = Vec::new();
    let mut tsigns = BTreeMap::new();
    for s in 0..k {
        for e in &contents[s] {
            tword.push(Endpoint { arrow: ids[&e.arrow], role: e.role });
            tsigns.insert(ids[&e.arrow], d.sign(e.arrow).unwrap());
        }
        for e in &dummies[s] {
            tword.push(*e);
            tsigns.insert(e.arrow, Sign::Plus);
        }
    }
    let template = GaussDiagram::from_parts_unchecked(tword, tsigns);
    let toffs = offsets(&contents.iter().map(Vec::len).collect::<Vec<_>>(), &dummies.iter().map(Vec::len).collect::<Vec<_>>());
    let seg_of_gap = |g: usize| segs.iter().position(|&(s, _)| s == g).expect("insertion gap is a segment");
    let tsite = match *site {
        MoveSite::R1Insert { i, j, .. } => MoveSite::R1Insert { gap: 0, i, j },
        MoveSite::R1Remove { arrow, i } => MoveSite::R1Remove { arrow: ids[&arrow], i },
        MoveSite::R2Insert { gap_over, gap_under, interleaved, sign_first, under_first } => MoveSite::R2Insert {
            gap_over: toffs[seg_of_gap(gap_over)],
            gap_under: toffs[seg_of_gap(gap_under)],
            interleaved,
            sign_first,
            under_first,
        },
        MoveSite::R2Remove { arrows: (a, b) } => MoveSite::R2Remove { arrows: (ids[&a], ids[&b]) },
        MoveSite::R3 { top_mid, top_bot, mid_bot } => {
            MoveSite::R3 { top_mid: ids[&top_mid], top_bot: ids[&top_bot], mid_bot: ids[&mid_bot] }
        }
    };
    Ok(Frame { pieces, template, dummies, site: tsite })
}

fn dummy_ids(dummies: &[Vec<Endpoint>]) -> HashSet<ArrowId> {
    dummies.iter().flatten().map(|e| e.arrow).collect()
}

/// Segment contents of a template and the word position where segment 0
/// starts.
fn split_template(t: &GaussDiagram, dummies: &[Vec<Endpoint>]) -> (usize, Vec<Vec<Endpoint>>) {
    let word = t.word();
    let len = word.len();
    let last = *dummies.last().unwrap().last().unwrap();
    let start0 = (t.position(last).unwrap() + 1) % len;
    let mut segs = Vec::with_capacity(dummies.len());
    let mut p = start0;
    for piece in dummies {
        let mut seg = Vec::new();
        while word[p % len] != piece[0] {
            seg.push(word[p % len]);
            p += 1;
        }
        p += piece.len();
        segs.push(seg);
    }
    (start0, segs)
}

/// `(segment, offset)` of a template gap, if the gap touches a segment.
fn template_gap(t: &GaussDiagram, dummies: &[Vec<Endpoint>], gap: usize) -> Option<(usize, usize)> {
    let (start0, segs) = split_template(t, dummies);
    let len = t.word().len();
    let offs = offsets(&segs.iter().map(Vec::len).collect::<Vec<_>>(), &dummies.iter().map(Vec::len).collect::<Vec<_>>());
    let rel = (gap + len - start0) % len;
    (0..segs.len()).find(|&s| rel >= offs[s] && rel <= offs[s] + segs[s].len()).map(|s| (s, rel - offs[s]))
}

/// Template contents with real arrows renamed by first appearance; equal
/// keys mean equal diagrams in every host.
fn template_key(t: &GaussDiagram, dummies: &[Vec<Endpoint>]) -> String {
    let (_, segs) = split_template(t, dummies);
    let mut labels: HashMap<ArrowId, usize> = HashMap::new();
    let mut out = String::new();
    for seg in segs {
        for e in seg {
            let next = labels.len() + 1;
            let l = *labels.entry(e.arrow).or_insert(next);
            out.push_str(&format!("{}{}{}", e.role.letter(), l, t.sign(e.arrow).unwrap().symbol()));
        }
        out.push('|');
    }
    out
}

/// Where the template segments sit in a host diagram: the position of
/// segment 0 and the template-to-host arrow map. The host must hold the
/// given pieces between the segments.
fn align(
    real: &GaussDiagram,
    tpl: &GaussDiagram,
    segs: &[Vec<Endpoint>],
    pieces: &[Vec<Endpoint>],
) -> Option<(usize, HashMap<ArrowId, ArrowId>)> {
    let word = real.word();
    let len = word.len();
    if len == 0 {
        return segs.iter().all(Vec::is_empty).then(HashMap::new).map(|m| (0, m));
    }
    let offs = offsets(&segs.iter().map(Vec::len).collect::<Vec<_>>(), &pieces.iter().map(Vec::len).collect::<Vec<_>>());
    let candidates: Vec<usize> = match (0..pieces.len()).find(|&s| !pieces[s].is_empty()) {
        Some(s) => {
            let p = real.position(pieces[s][0])?;
            vec![(p + len * 2 - offs[s] - segs[s].len()) % len]
        }
        None => (0..len).collect(),
    };
    'next: for start0 in candidates {
        let mut map: HashMap<ArrowId, ArrowId> = HashMap::new();
        let mut used: HashSet<ArrowId> = HashSet::new();
        for s in 0..segs.len() {
            for (o, e) in segs[s].iter().enumerate() {
                let r = word[(start0 + offs[s] + o) % len];
                if r.role != e.role || real.sign(r.arrow) != tpl.sign(e.arrow) {
                    continue 'next;
                }
                match map.get(&e.arrow) {
                    Some(&a) if a != r.arrow => continue 'next,
                    Some(_) => {}
                    None => {
                        if !used.insert(r.arrow) {
                            continue 'next;
                        }
                        map.insert(e.arrow, r.arrow);
                    }
                }
            }
            for (o, e) in pieces[s].iter().enumerate() {
                if word[(start0 + offs[s] + segs[s].len() + o) % len] != *e {
                    continue 'next;
                }
            }
        }
        return Some((start0, map));
    }
    None
}

/// Translates a template site into the host diagram.
fn transplant(frame: &Frame, tpl: &GaussDiagram, ts: &MoveSite, real: &GaussDiagram) -> Result<MoveSite, MoveError> {
    let (_, segs) = split_template(tpl, &frame.dummies);
    let (start0, map) = align(real, tpl, &segs, &frame.pieces)
        .ok_or_else(|| MoveError::Inapplicable("host lost track of the move segments".into()))?;
    let len = real.word().len();
    let offs = offsets(&segs.iter().map(Vec::len).collect::<Vec<_>>(), &frame.pieces.iter().map(Vec::len).collect::<Vec<_>>());
    let gap = |g: usize| -> Result<usize, MoveError> {
        let (s, o) = template_gap(tpl, &frame.dummies, g).ok_or_else(|| MoveError::Inapplicable("template gap off segments".into()))?;
        Ok(if len == 0 { 0 } else { (start0 + offs[s] + o) % len })
    };
    let id = |a: ArrowId| map[&a];
    Ok(match *ts {
        MoveSite::R1Insert { gap: g, i, j } => MoveSite::R1Insert { gap: gap(g)?, i, j },
        MoveSite::R1Remove { arrow, i } => MoveSite::R1Remove { arrow: id(arrow), i },
        MoveSite::R2Insert { gap_over, gap_under, interleaved, sign_first, under_first } => {
            let (go, gu) = (gap(gap_over)?, gap(gap_under)?);
            let under_first = if go != gu || len == 0 {
                under_first && len != 0 && go == gu
            } else if gap_over == gap_under {
                under_first
            } else {
                // Distinct template gaps that meet in the host: the under
                // block comes first iff only placeholders separate it from
                // the over gap going forward.
                let tw = tpl.word();
                let dummy = dummy_ids(&frame.dummies);
                let mut p = gap_under;
                loop {
                    if p % tw.len() == gap_over {
                        break true;
                    }
                    if !dummy.contains(&tw[p % tw.len()].arrow) {
                        break false;
                    }
                    p += 1;
                }
            };
            MoveSite::R2Insert { gap_over: go, gap_under: gu, interleaved, sign_first, under_first }
        }
        MoveSite::R2Remove { arrows: (a, b) } => MoveSite::R2Remove { arrows: (id(a), id(b)) },
        MoveSite::R3 { top_mid, top_bot, mid_bot } => {
            MoveSite::R3 { top_mid: id(top_mid), top_bot: id(top_bot), mid_bot: id(mid_bot) }
        }
    })
}

// ---------------------------------------------------------------------------
// Trace search

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Want {
    Class(MoveClass),
    /// Any class of the given kind (1, 2, 3) inside the set.
    InSet(u8, GeneratingSet),
    AnyR1,
    AnyR2,
    /// An Ω3 move strictly closer to the set's core index than `dist`.
    R3Closer(usize, GeneratingSet),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Spec {
    want: Want,
    direction: Option<Sign>,
}

fn r3_distance(class: MoveClass, set: GeneratingSet) -> Option<usize> {
    let (t, m) = IndexTriple::of(class)?;
    Some(conjugate_r3(t, set.core_triple(m)).len())
}

impl Spec {
    fn kind(&self) -> u8 {
        match self.want {
            Want::Class(c) => c.strands() as u8,
            Want::InSet(k, _) => k,
            Want::AnyR1 => 1,
            Want::AnyR2 => 2,
            Want::R3Closer(..) => 3,
        }
    }

    fn admits(&self, dc: &DirectedMoveClass) -> bool {
        if self.direction.is_some_and(|d| d != dc.direction) || dc.class.strands() as u8 != self.kind() {
            return false;
        }
        match self.want {
            Want::Class(c) => c == dc.class,
            Want::InSet(_, set) => set.contains(dc.class),
            Want::AnyR1 | Want::AnyR2 => true,
            Want::R3Closer(dist, set) => r3_distance(dc.class, set).is_some_and(|d| d < dist),
        }
    }

    fn flipped(self) -> Spec {
        Spec { want: self.want, direction: self.direction.map(|d| -d) }
    }
}

fn spec(want: Want, direction: Option<Sign>) -> Spec {
    Spec { want, direction }
}

/// Candidate traces for a move outside the set, tried in order. Traces are
/// written for the inserting direction and reversed for the other.
fn traces(dc: &DirectedMoveClass, set: GeneratingSet) -> Vec<Vec<Spec>> {
    use Sign::{Minus as M, Plus as P};
    let mut out: Vec<Vec<Spec>> = Vec::new();
    match dc.class {
        MoveClass::R1 { i, j } => {
            if set == GeneratingSet::Primary && i == M {
                out.push(vec![
                    spec(Want::Class(MoveClass::R2 { i: M, j: M }), Some(P)),
                    spec(Want::Class(MoveClass::R1 { i: P, j: -j }), Some(M)),
                ]);
            }
            out.push(vec![spec(Want::InSet(2, set), Some(P)), spec(Want::InSet(1, set), Some(M))]);
        }
        MoveClass::R2 { j, .. } => {
            if set == GeneratingSet::Primary {
                let core = MoveClass::R3 { i: M, j, k: P, m: j };
                out.push(vec![
                    spec(Want::Class(MoveClass::R1 { i: M, j }), Some(P)),
                    spec(Want::Class(MoveClass::R2 { i: M, j: M }), Some(P)),
                    spec(Want::Class(core), None),
                    spec(Want::Class(MoveClass::R1 { i: M, j }), Some(M)),
                ]);
            }
            for first in [Want::InSet(1, set), Want::AnyR1] {
                out.push(vec![
                    spec(first, Some(P)),
                    spec(Want::InSet(2, set), Some(P)),
                    spec(Want::InSet(3, set), None),
                    spec(first, Some(M)),
                ]);
            }
        }
        MoveClass::R3 { m, .. } => {
            let (t, _) = IndexTriple::of(dc.class).unwrap();
            let path = conjugate_r3(t, set.core_triple(m));
            let u = path[0].apply(t);
            let inner = MoveClass::R3 { i: u.i, j: u.j, k: u.k, m };
            out.push(vec![spec(Want::AnyR2, None), spec(Want::Class(inner), None), spec(Want::AnyR2, None)]);
            let dist = path.len();
            out.push(vec![spec(Want::AnyR2, None), spec(Want::R3Closer(dist, set), None), spec(Want::AnyR2, None)]);
        }
    }
    if dc.direction == M && !matches!(dc.class, MoveClass::R3 { .. }) {
        for t in &mut out {
            t.reverse();
            for s in t.iter_mut() {
                *s = s.flipped();
            }
        }
    }
    out
}

fn candidates(t: &GaussDiagram, dummies: &[Vec<Endpoint>], spec: &Spec) -> Vec<MoveSite> {
    let blocked = dummy_ids(dummies);
    let mut out = Vec::new();
    if spec.direction != Some(Sign::Minus) && spec.kind() < 3 {
        let gaps: Vec<usize> = (0..t.gap_count()).filter(|&g| template_gap(t, dummies, g).is_some()).collect();
        if spec.kind() == 1 {
            for &gap in &gaps {
                for i in Sign::BOTH {
                    for j in Sign::BOTH {
                        out.push(MoveSite::R1Insert { gap, i, j });
                    }
                }
            }
        } else {
            for &gap_over in &gaps {
                for &gap_under in &gaps {
                    for interleaved in [false, true] {
                        for sign_first in Sign::BOTH {
                            for under_first in [false, true] {
                                if under_first && gap_over != gap_under {
                                    continue;
                                }
                                out.push(MoveSite::R2Insert { gap_over, gap_under, interleaved, sign_first, under_first });
                            }
                        }
                    }
                }
            }
        }
    }
    let touches = |s: &MoveSite| match *s {
        MoveSite::R1Remove { arrow, .. } => blocked.contains(&arrow),
        MoveSite::R2Remove { arrows: (a, b) } => blocked.contains(&a) || blocked.contains(&b),
        MoveSite::R3 { top_mid, top_bot, mid_bot } => [top_mid, top_bot, mid_bot].iter().any(|a| blocked.contains(a)),
        _ => false,
    };
    out.extend(enumerate_removal_sites(t).into_iter().map(|(s, _)| s).filter(|s| !touches(s)));
    out.retain(|s| classify(s, t).is_ok_and(|dc| spec.admits(&dc)));
    out
}

fn search(t: &GaussDiagram, dummies: &[Vec<Endpoint>], trace: &[Spec], target: &str, path: &mut Vec<MoveSite>) -> bool {
    let Some((first, rest)) = trace.split_first() else {
        return template_key(t, dummies) == target;
    };
    for site in candidates(t, dummies, first) {
        let (next, _) = apply_to_diagram(t, &site).expect("candidate applies");
        path.push(site);
        if search(&next, dummies, rest, target, path) {
            return true;
        }
        path.pop();
    }
    false
}

thread_local! {
    static MOVIES: RefCell<HashMap<String, Option<Vec<MoveSite>>>> = RefCell::new(HashMap::new());
}

/// Template movie replacing the frame's move, cached per template shape.
fn movie(frame: &Frame, dc: &DirectedMoveClass, set: GeneratingSet) -> Option<Vec<MoveSite>> {
    let key = format!("{set:?}|{}|{}", frame.template.raw_code(), frame.site);
    if let Some(hit) = MOVIES.with(|m| m.borrow().get(&key).cloned()) {
        return hit;
    }
    let (direct, _) = apply_to_diagram(&frame.template, &frame.site).expect("frame site applies");
    let target = template_key(&direct, &frame.dummies);
    let mut found = None;
    for trace in traces(dc, set) {
        let mut path = Vec::new();
        if search(&frame.template, &frame.dummies, &trace, &target, &mut path) {
            found = Some(path);
            break;
        }
    }
    MOVIES.with(|m| m.borrow_mut().insert(key, found.clone()));
    found
}

/// Replaces `site` by its movie, expanding each step again when `deeper`
/// says so. Returns the emitted moves and the state they end in.
fn rewrite_rec(
    state: &DiagramState,
    site: &MoveSite,
    set: GeneratingSet,
    deeper: &dyn Fn(&DirectedMoveClass) -> bool,
) -> Result<(MoveSequence, DiagramState), RewriteError> {
    let dc = classify(site, state.diagram())?;
    let mut seq = MoveSequence::new();
    if set.contains(dc.class) {
        seq.push(*site, dc);
        return Ok((seq, apply_move(state, site)?));
    }
    let frame = build_frame(state.diagram(), site)?;
    let steps = movie(&frame, &dc, set).ok_or_else(|| RewriteError::NoExpansion(dc.class.to_string()))?;
    let mut tpl = frame.template.clone();
    let mut real = state.clone();
    for ts in steps {
        let rs = transplant(&frame, &tpl, &ts, real.diagram())?;
        let rdc = classify(&rs, real.diagram())?;
        if deeper(&rdc) {
            let (sub, end) = rewrite_rec(&real, &rs, set, deeper)?;
            seq.extend(sub);
            real = end;
        } else {
            seq.push(rs, rdc);
            real = apply_move(&real, &rs)?;
        }
        tpl = apply_to_diagram(&tpl, &ts)?.0;
    }
    Ok((seq, real))
}

/// One level of expansion: the replacement movie for `site`, addressed in
/// the host. Moves already in the set come back unchanged.
pub fn expand(state: &DiagramState, site: &MoveSite, set: GeneratingSet) -> Result<MoveSequence, RewriteError> {
    Ok(rewrite_rec(state, site, set, &|_| false)?.0)
}

/// Expansion of an Ω1 move (one level).
pub fn expand_r1(state: &DiagramState, site: &MoveSite) -> Result<MoveSequence, RewriteError> {
    match site {
        MoveSite::R1Insert { .. } | MoveSite::R1Remove { .. } => expand(state, site, GeneratingSet::Primary),
        _ => Err(RewriteError::WrongKind(site.to_string())),
    }
}

/// Expansion of an Ω2 move, with its Ω1 steps expanded in turn.
pub fn expand_r2(state: &DiagramState, site: &MoveSite) -> Result<MoveSequence, RewriteError> {
    if !matches!(site, MoveSite::R2Insert { .. } | MoveSite::R2Remove { .. }) {
        return Err(RewriteError::WrongKind(site.to_string()));
    }
    let deeper = |dc: &DirectedMoveClass| matches!(dc.class, MoveClass::R1 { .. });
    Ok(rewrite_rec(state, site, GeneratingSet::Primary, &deeper)?.0)
}

/// Replaces a move by moves of the generating set with the same end state
/// up to rotation and relabeling, and the same winding number.
pub fn rewrite_to_generating_set(state: &DiagramState, site: &MoveSite, set: GeneratingSet) -> Result<MoveSequence, RewriteError> {
    Ok(rewrite_rec(state, site, set, &|_| true)?.0)
}

/// Inner Ω3 classes reachable by a single Ω2 conjugation of a planted
/// Ω3 move of the given class: every `[Ω2, Ω3, Ω2]` movie reproducing the
/// move, keyed by the inner class.
pub fn conjugation_classes(class: MoveClass, direction: Sign) -> Vec<(MoveClass, MoveClass, MoveClass)> {
    let mut r = crate::corpus::rng(0);
    let (d, site) = crate::corpus::instantiate(&mut r, &GaussDiagram::empty(), class, direction);
    let frame = build_frame(&d, &site).expect("planted site");
    let (direct, _) = apply_to_diagram(&frame.template, &frame.site).unwrap();
    let target = template_key(&direct, &frame.dummies);
    let any2 = spec(Want::AnyR2, None);
    let mut out = Vec::new();
    for s1 in candidates(&frame.template, &frame.dummies, &any2) {
        let c1 = classify(&s1, &frame.template).unwrap().class;
        let t1 = apply_to_diagram(&frame.template, &s1).unwrap().0;
        for (s2, dc2) in enumerate_removal_sites(&t1) {
            if !matches!(s2, MoveSite::R3 { .. }) {
                continue;
            }
            let t2 = apply_to_diagram(&t1, &s2).unwrap().0;
            for s3 in candidates(&t2, &frame.dummies, &any2) {
                let t3 = apply_to_diagram(&t2, &s3).unwrap().0;
                if template_key(&t3, &frame.dummies) == target {
                    let c3 = classify(&s3, &t2).unwrap().class;
                    if !out.contains(&(c1, dc2.class, c3)) {
                        out.push((c1, dc2.class, c3));
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{instantiate, random_diagram, rng};
    use crate::gauss::{canonical_form, parse_gauss_code};
    use rand::Rng;

    fn trace(seq: &MoveSequence) -> Vec<String> {
        seq.steps().iter().map(|(_, c)| format!("{}{}", c.class, c.direction)).collect()
    }

    fn planted(class: MoveClass, direction: Sign, seed: u64) -> (DiagramState, MoveSite) {
        let mut r = rng(seed);
        let n = r.gen_range(0..4);
        let base = random_diagram(&mut r, n);
        let (d, site) = instantiate(&mut r, &base, class, direction);
        (DiagramState::new(d, 0), site)
    }

    fn class(s: &str) -> MoveClass {
        s.parse().unwrap()
    }

    #[test]
    fn generating_set_moves_pass_through() {
        let s = DiagramState::new(GaussDiagram::empty(), 0);
        let site: MoveSite = "r1+@0:i=+1,j=+1".parse().unwrap();
        let seq = rewrite_to_generating_set(&s, &site, GeneratingSet::Primary).unwrap();
        assert_eq!(seq.len(), 1);
        assert_eq!(seq.render(&s).unwrap(), "Ω1++ @ r1+@0:i=+1,j=+1\nO1+U1+\n");
    }

    #[test]
    fn kink_expansions_follow_the_movie() {
        let s = DiagramState::new(parse_gauss_code("O1+U2-O2-U1+").unwrap(), 0);
        for (i, j, want) in [(-1, 1, ["Ω2--+", "Ω1+--"]), (-1, -1, ["Ω2--+", "Ω1++-"])] {
            let site = MoveSite::R1Insert { gap: 1, i: Sign::from_i32(i).unwrap(), j: Sign::from_i32(j).unwrap() };
            let seq = expand_r1(&s, &site).unwrap();
            assert_eq!(trace(&seq), want);
            let direct = apply_move(&s, &site).unwrap();
            let end = seq.replay(&s).unwrap();
            assert_eq!(canonical_form(end.diagram()), canonical_form(direct.diagram()));
            assert_eq!(end.winding(), direct.winding());
        }
    }

    #[test]
    fn kink_expansion_end_states_on_fuzzed_hosts() {
        for seed in 0..100 {
            for cls in ["Ω1-+", "Ω1--"] {
                for dir in Sign::BOTH {
                    let (s, site) = planted(class(cls), dir, seed);
                    let seq = expand_r1(&s, &site).unwrap();
                    let end = seq.replay(&s).unwrap();
                    let direct = apply_move(&s, &site).unwrap();
                    assert_eq!(canonical_form(end.diagram()), canonical_form(direct.diagram()), "{seed} {cls}");
                    assert_eq!(end.winding(), direct.winding());
                }
            }
        }
    }

    #[test]
    fn direct_r2_expansions_follow_the_movie() {
        for (cls, want) in [
            ("Ω2++", ["Ω1-++", "Ω2--+", "Ω3-+++", "Ω1-+-"]),
            ("Ω2+-", ["Ω1--+", "Ω2--+", "Ω3--+-", "Ω1---"]),
        ] {
            let (s, site) = planted(class(cls), Sign::Plus, 3);
            let one = expand(&s, &site, GeneratingSet::Primary).unwrap();
            let got = trace(&one);
            assert_eq!(got.len(), 4);
            assert_eq!(got[0], want[0]);
            assert_eq!(got[1], want[1]);
            assert!(got[2].starts_with(want[2]), "{got:?}");
            assert_eq!(got[3], want[3]);
            let full = expand_r2(&s, &site).unwrap();
            assert!(full.steps().iter().all(|(_, c)| GeneratingSet::Primary.contains(c.class)), "{}", full);
        }
        let (s, site) = planted(class("Ω2--"), Sign::Plus, 4);
        assert_eq!(expand_r2(&s, &site).unwrap().len(), 1);
    }

    #[test]
    fn conjugation_closure() {
        let all = IndexTriple::all();
        let diameter = conjugation_diameter();
        for a in &all {
            assert!(conjugate_r3(*a, *a).is_empty());
            for b in &all {
                let path = conjugate_r3(*a, *b);
                assert!(path.len() <= diameter);
                assert_eq!(path.iter().fold(*a, |t, w| w.apply(t)), *b);
            }
        }
        let pp = IndexTriple { i: Sign::Plus, j: Sign::Plus, k: Sign::Plus };
        let ppm = IndexTriple { k: Sign::Minus, ..pp };
        assert_eq!(conjugate_r3(pp, ppm).iter().fold(pp, |t, w| w.apply(t)), ppm);
    }

    #[test]
    fn single_conjugations_realize_the_three_wedges() {
        for c in MoveClass::all() {
            let Some((t, m)) = IndexTriple::of(c) else { continue };
            let mut want: Vec<MoveClass> = Wedge::ALL
                .iter()
                .map(|w| {
                    let u = w.apply(t);
                    MoveClass::R3 { i: u.i, j: u.j, k: u.k, m }
                })
                .collect();
            want.push(c);
            want.sort();
            want.dedup();
            let mut got: Vec<MoveClass> = conjugation_classes(c, Sign::Plus).into_iter().map(|x| x.1).collect();
            got.sort();
            got.dedup();
            assert_eq!(got, want, "{c}");
        }
    }

    #[test]
    fn every_class_rewrites_into_the_set() {
        for (n, c) in MoveClass::all().into_iter().enumerate() {
            for dir in Sign::BOTH {
                let (s, site) = planted(c, dir, n as u64);
                let seq = rewrite_to_generating_set(&s, &site, GeneratingSet::Primary).unwrap();
                assert!(seq.classes().iter().all(|x| GeneratingSet::Primary.contains(*x)));
                let end = seq.replay(&s).unwrap();
                let direct = apply_move(&s, &site).unwrap();
                assert_eq!(canonical_form(end.diagram()), canonical_form(direct.diagram()), "{c} {dir}");
                assert_eq!(end.winding(), direct.winding());
            }
        }
    }

    #[test]
    fn alternate_set_rewrites() {
        for c in ["Ω1++", "Ω2--", "Ω2++", "Ω3-+++", "Ω3++++"] {
            let (s, site) = planted(class(c), Sign::Plus, 1);
            let seq = rewrite_to_generating_set(&s, &site, GeneratingSet::Alternate).unwrap();
            assert!(seq.classes().iter().all(|x| GeneratingSet::Alternate.contains(*x)), "{c}: {seq}");
            let end = seq.replay(&s).unwrap();
            assert_eq!(canonical_form(end.diagram()), canonical_form(apply_move(&s, &site).unwrap().diagram()));
        }
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let s = DiagramState::new(GaussDiagram::empty(), 0);
        let site: MoveSite = "r1+@0:i=+1,j=+1".parse().unwrap();
        assert!(matches!(expand_r2(&s, &site), Err(RewriteError::WrongKind(_))));
    }
}
