//! Reidemeister moves on Gauss diagrams: the 24 move classes, concrete move
//! sites, enumeration, classification and application.
//!
//! Conventions used throughout:
//!
//! * An isolated arrow read tail-then-head is a kink with orientation
//!   `i = -j`; read head-then-tail it has `i = j` (`j` the crossing sign).
//! * An Ω2 pair is direct iff its chords interleave. Its `j` is the sign of
//!   the arrow whose tail comes second along the overpassing segment.
//! * An Ω3 site is named by its arrows `(top_mid, top_bot, mid_bot)`; the
//!   class indices are `i = sign(top_mid)`, `j = sign(top_bot)`,
//!   `k = sign(mid_bot)`, and `m = +1` iff the circle passes the segments in
//!   the cyclic order top, middle, bottom.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gauss::{chords_cross, connected_sum, writhe, ArrowId, Endpoint, GaussDiagram, GaussError, Role, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MoveClass {
    R1 { i: Sign, j: Sign },
    R2 { i: Sign, j: Sign },
    R3 { i: Sign, j: Sign, k: Sign, m: Sign },
}

impl MoveClass {
    /// All 24 classes, Ω1 first.
    pub fn all() -> Vec<MoveClass> {
        let mut out = Vec::with_capacity(24);
        for i in Sign::BOTH {
            for j in Sign::BOTH {
                out.push(MoveClass::R1 { i, j });
            }
        }
        for i in Sign::BOTH {
            for j in Sign::BOTH {
                out.push(MoveClass::R2 { i, j });
            }
        }
        for i in Sign::BOTH {
            for j in Sign::BOTH {
                for k in Sign::BOTH {
                    for m in Sign::BOTH {
                        out.push(MoveClass::R3 { i, j, k, m });
                    }
                }
            }
        }
        out
    }

    pub fn strands(&self) -> usize {
        match self {
            MoveClass::R1 { .. } => 1,
            MoveClass::R2 { .. } => 2,
            MoveClass::R3 { .. } => 3,
        }
    }
}

impl fmt::Display for MoveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoveClass::R1 { i, j } => write!(f, "Ω1{i}{j}"),
            MoveClass::R2 { i, j } => write!(f, "Ω2{i}{j}"),
            MoveClass::R3 { i, j, k, m } => write!(f, "Ω3{i}{j}{k}{m}"),
        }
    }
}

impl FromStr for MoveClass {
    type Err = MoveError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MoveError::SiteSyntax(format!("bad move class {s:?}"));
        let rest = s
            .strip_prefix('Ω')
            .or_else(|| s.strip_prefix("O"))
            .or_else(|| s.strip_prefix("R"))
            .ok_or_else(bad)?;
        let mut chars = rest.chars();
        let kind = chars.next().ok_or_else(bad)?;
        let signs: Vec<Sign> = chars
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                _ => Err(bad()),
            })
            .collect::<Result<_, _>>()?;
        match (kind, signs.as_slice()) {
            ('1', [i, j]) => Ok(MoveClass::R1 { i: *i, j: *j }),
            ('2', [i, j]) => Ok(MoveClass::R2 { i: *i, j: *j }),
            ('3', [i, j, k, m]) => Ok(MoveClass::R3 { i: *i, j: *j, k: *k, m: *m }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DirectedMoveClass {
    pub class: MoveClass,
    pub direction: Sign,
}

impl fmt::Display for DirectedMoveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.class, self.direction)
    }
}

/// Where and how to apply one move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveSite {
    R1Insert { gap: usize, i: Sign, j: Sign },
    R1Remove { arrow: ArrowId, i: Sign },
    /// Tails go in at `gap_over`, heads at `gap_under`. `sign_first` is the
    /// sign of the arrow whose tail comes first. `under_first` orders the two
    /// blocks when both gaps coincide.
    R2Insert { gap_over: usize, gap_under: usize, interleaved: bool, sign_first: Sign, under_first: bool },
    R2Remove { arrows: (ArrowId, ArrowId) },
    R3 { top_mid: ArrowId, top_bot: ArrowId, mid_bot: ArrowId },
}

fn fmt_pm(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "+1",
        Sign::Minus => "-1",
    }
}

impl fmt::Display for MoveSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MoveSite::R1Insert { gap, i, j } => write!(f, "r1+@{gap}:i={},j={}", fmt_pm(i), fmt_pm(j)),
            MoveSite::R1Remove { arrow, i } => write!(f, "r1-@{arrow}:i={}", fmt_pm(i)),
            MoveSite::R2Insert { gap_over, gap_under, interleaved, sign_first, under_first } => {
                write!(
                    f,
                    "r2+@{gap_over},{gap_under}:interleaved={},sign={}",
                    interleaved as u8,
                    fmt_pm(sign_first)
                )?;
                if under_first {
                    write!(f, ",under_first=1")?;
                }
                Ok(())
            }
            MoveSite::R2Remove { arrows: (a, b) } => write!(f, "r2-@{a},{b}"),
            MoveSite::R3 { top_mid, top_bot, mid_bot } => write!(f, "r3@{top_mid},{top_bot},{mid_bot}"),
        }
    }
}

impl FromStr for MoveSite {
    type Err = MoveError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |why: &str| MoveError::SiteSyntax(format!("{s:?}: {why}"));
        let s = s.trim();
        let (head, rest) = s.split_once('@').ok_or_else(|| bad("missing '@'"))?;
        let (addr, opts) = match rest.split_once(':') {
            Some((a, o)) => (a, o),
            None => (rest, ""),
        };
        let nums: Vec<usize> = addr
            .split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|_| bad("bad number")))
            .collect::<Result<_, _>>()?;
        let mut opt = std::collections::HashMap::new();
        for kv in opts.split(',').filter(|x| !x.trim().is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad("option needs '='"))?;
            opt.insert(k.trim().to_string(), v.trim().to_string());
        }
        let sign_opt = |key: &str| -> Result<Sign, MoveError> {
            let v = opt.get(key).ok_or_else(|| bad(&format!("missing option {key}")))?;
            parse_pm(v).ok_or_else(|| bad(&format!("option {key} must be ±1")))
        };
        let flag_opt = |key: &str, required: bool| -> Result<bool, MoveError> {
            match opt.get(key).map(String::as_str) {
                Some("1") | Some("true") => Ok(true),
                Some("0") | Some("false") => Ok(false),
                Some(_) => Err(bad(&format!("option {key} must be 0 or 1"))),
                None if required => Err(bad(&format!("missing option {key}"))),
                None => Ok(false),
            }
        };
        let id = |x: usize| -> Result<ArrowId, MoveError> {
            if x == 0 {
                Err(bad("arrow ids are positive"))
            } else {
                Ok(ArrowId(x as u32))
            }
        };
        match (head.trim(), nums.as_slice()) {
            ("r1+", [gap]) => Ok(MoveSite::R1Insert { gap: *gap, i: sign_opt("i")?, j: sign_opt("j")? }),
            ("r1-", [a]) => Ok(MoveSite::R1Remove { arrow: id(*a)?, i: sign_opt("i")? }),
            ("r2+", [go, gu]) => Ok(MoveSite::R2Insert {
                gap_over: *go,
                gap_under: *gu,
                interleaved: flag_opt("interleaved", true)?,
                sign_first: sign_opt("sign")?,
                under_first: flag_opt("under_first", false)?,
            }),
            ("r2-", [a, b]) => Ok(MoveSite::R2Remove { arrows: (id(*a)?, id(*b)?) }),
            ("r3", [a, b, c]) => Ok(MoveSite::R3 { top_mid: id(*a)?, top_bot: id(*b)?, mid_bot: id(*c)? }),
            _ => Err(bad("unknown move kind or wrong number of addresses")),
        }
    }
}

fn parse_pm(v: &str) -> Option<Sign> {
    match v {
        "+1" | "1" | "+" => Some(Sign::Plus),
        "-1" | "-" => Some(Sign::Minus),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("move not applicable: {0}")]
    Inapplicable(String),
    #[error("bad site syntax: {0}")]
    SiteSyntax(String),
    #[error(transparent)]
    Gauss(#[from] GaussError),
}

fn inapplicable(msg: impl Into<String>) -> MoveError {
    MoveError::Inapplicable(msg.into())
}

/// A diagram together with its tracked winding number and cached writhe.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiagramState {
    diagram: GaussDiagram,
    winding: i64,
    writhe: i64,
}

impl DiagramState {
    pub fn new(diagram: GaussDiagram, winding: i64) -> DiagramState {
        let writhe = writhe(&diagram);
        DiagramState { diagram, winding, writhe }
    }

    pub fn diagram(&self) -> &GaussDiagram {
        &self.diagram
    }

    pub fn winding(&self) -> i64 {
        self.winding
    }

    pub fn writhe(&self) -> i64 {
        self.writhe
    }

    pub fn into_diagram(self) -> GaussDiagram {
        self.diagram
    }
}

fn next(p: usize, len: usize) -> usize {
    (p + 1) % len
}

/// Returns `(first, second)` when `p` and `q` are cyclically consecutive.
fn consecutive(p: usize, q: usize, len: usize) -> Option<(usize, usize)> {
    if next(p, len) == q {
        Some((p, q))
    } else if next(q, len) == p {
        Some((q, p))
    } else {
        None
    }
}

/// Kink orientations under which arrow `a` is an isolated arrow of `d`.
pub fn isolated_orientations(d: &GaussDiagram, a: ArrowId) -> Vec<Sign> {
    let Some((t, h)) = d.endpoints_of(a) else {
        return Vec::new();
    };
    let j = d.sign(a).expect("arrow present");
    let len = d.word().len();
    let mut out = Vec::new();
    if next(t, len) == h {
        out.push(-j);
    }
    if next(h, len) == t {
        out.push(j);
    }
    out.dedup();
    out
}

/// Layout of an Ω2 pair in a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct R2Pair {
    /// Arrow whose tail is first along the overpassing segment.
    pub first: ArrowId,
    pub second: ArrowId,
    pub interleaved: bool,
    pub tail_start: usize,
    pub head_start: usize,
}

pub(crate) fn resolve_r2(d: &GaussDiagram, a: ArrowId, b: ArrowId) -> Result<R2Pair, MoveError> {
    if a == b {
        return Err(GaussError::SameArrow(a).into());
    }
    let (ta, ha) = d.endpoints_of(a).ok_or(GaussError::UnknownArrow(a))?;
    let (tb, hb) = d.endpoints_of(b).ok_or(GaussError::UnknownArrow(b))?;
    if d.sign(a) == d.sign(b) {
        return Err(inapplicable("Ω2 pair needs opposite signs"));
    }
    let len = d.word().len();
    let (t1, _) = consecutive(ta, tb, len).ok_or_else(|| inapplicable("tails not adjacent"))?;
    let (h1, _) = consecutive(ha, hb, len).ok_or_else(|| inapplicable("heads not adjacent"))?;
    let (first, second) = if t1 == ta { (a, b) } else { (b, a) };
    Ok(R2Pair {
        first,
        second,
        interleaved: chords_cross((ta, ha), (tb, hb)),
        tail_start: t1,
        head_start: h1,
    })
}

/// Resolved geometry of an Ω3 site. Segments are `(first, second)` word
/// positions in circle order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct R3Geometry {
    pub top_mid: ArrowId,
    pub top_bot: ArrowId,
    pub mid_bot: ArrowId,
    pub top: (usize, usize),
    pub middle: (usize, usize),
    pub bottom: (usize, usize),
}

impl R3Geometry {
    /// `+1` when the endpoint of `top_mid` comes first on the top segment.
    fn top_order(&self, d: &GaussDiagram) -> Sign {
        Sign::from_bool(d.word()[self.top.0].arrow == self.top_mid)
    }

    fn middle_order(&self, d: &GaussDiagram) -> Sign {
        Sign::from_bool(d.word()[self.middle.0].arrow == self.top_mid)
    }

    fn bottom_order(&self, d: &GaussDiagram) -> Sign {
        Sign::from_bool(d.word()[self.bottom.0].arrow == self.top_bot)
    }

    /// Segments in the cyclic order the circle passes them, starting at top,
    /// tagged 0 = top, 1 = middle, 2 = bottom.
    fn passage(&self) -> [(u8, (usize, usize)); 3] {
        let mut segs = [(0u8, self.top), (1u8, self.middle), (2u8, self.bottom)];
        segs.sort_by_key(|(_, s)| s.0);
        let rot = segs.iter().position(|(r, _)| *r == 0).expect("top present");
        segs.rotate_left(rot);
        segs
    }

    pub fn descending(&self) -> bool {
        self.passage()[1].0 == 1
    }
}

/// Checks the triangle template for `(top_mid, top_bot, mid_bot)`.
///
/// Besides the role layout, the three signs must be those of three lines
/// bounding a triangle: with `e_T`, `e_M`, `e_B` the within-segment orders,
/// `s_tm * s_tb = e_M * e_B` and `s_tm * s_mb = e_T * e_B`.
pub fn resolve_r3(d: &GaussDiagram, top_mid: ArrowId, top_bot: ArrowId, mid_bot: ArrowId) -> Result<R3Geometry, MoveError> {
    if top_mid == top_bot || top_mid == mid_bot {
        return Err(GaussError::SameArrow(top_mid).into());
    }
    if top_bot == mid_bot {
        return Err(GaussError::SameArrow(top_bot).into());
    }
    let (t_tm, h_tm) = d.endpoints_of(top_mid).ok_or(GaussError::UnknownArrow(top_mid))?;
    let (t_tb, h_tb) = d.endpoints_of(top_bot).ok_or(GaussError::UnknownArrow(top_bot))?;
    let (t_mb, h_mb) = d.endpoints_of(mid_bot).ok_or(GaussError::UnknownArrow(mid_bot))?;
    let len = d.word().len();
    let top = consecutive(t_tm, t_tb, len).ok_or_else(|| inapplicable("top segment not adjacent"))?;
    let middle = consecutive(h_tm, t_mb, len).ok_or_else(|| inapplicable("middle segment not adjacent"))?;
    let bottom = consecutive(h_tb, h_mb, len).ok_or_else(|| inapplicable("bottom segment not adjacent"))?;
    let g = R3Geometry { top_mid, top_bot, mid_bot, top, middle, bottom };
    let s = |a| d.sign(a).expect("arrow present");
    let (e_t, e_m, e_b) = (g.top_order(d), g.middle_order(d), g.bottom_order(d));
    if s(top_mid) * s(top_bot) != e_m * e_b || s(top_mid) * s(mid_bot) != e_t * e_b {
        return Err(inapplicable("signs do not fit the triangle"));
    }
    Ok(g)
}

/// A maximal circle arc between two consecutive site segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub start: usize,
    pub len: usize,
}

impl Arc {
    pub fn contains(&self, p: usize, word_len: usize) -> bool {
        (p + word_len - self.start) % word_len < self.len
    }
}

/// Roles, orientation data and exterior arcs of an Ω3 site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Omega3Context {
    pub site: (ArrowId, ArrowId, ArrowId),
    pub top: (usize, usize),
    pub middle: (usize, usize),
    pub bottom: (usize, usize),
    pub ascending: bool,
    pub q: Sign,
    /// Joins top and middle.
    pub a: Arc,
    /// Joins middle and bottom.
    pub b: Arc,
    /// Joins top and bottom.
    pub c: Arc,
    word_len: usize,
    arrows: usize,
}

impl Omega3Context {
    pub fn word_len(&self) -> usize {
        self.word_len
    }

    /// True if the context was computed from a diagram of this shape.
    pub fn matches(&self, d: &GaussDiagram) -> bool {
        self.word_len == d.word().len()
            && self.arrows == d.len()
            && resolve_r3(d, self.site.0, self.site.1, self.site.2)
                .map(|g| g.top == self.top && g.middle == self.middle && g.bottom == self.bottom)
                .unwrap_or(false)
    }
}

fn arnold_q_of(g: &R3Geometry, d: &GaussDiagram) -> Sign {
    let segs = g.passage();
    let word = d.word();
    // Role of the segment that holds the other end of the arrow at `p`.
    let partner = |seg_role: u8, p: usize| -> u8 {
        let a = word[p].arrow;
        let (x, y) = if a == g.top_mid {
            (0, 1)
        } else if a == g.top_bot {
            (0, 2)
        } else {
            (1, 2)
        };
        if x == seg_role {
            y
        } else {
            x
        }
    };
    let mut n = 0;
    for idx in 0..3 {
        let (role, (first, _)) = segs[idx];
        let prev_role = segs[(idx + 2) % 3].0;
        if partner(role, first) == prev_role {
            n += 1;
        }
    }
    Sign::from_bool(n % 2 == 0)
}

/// Arnold's `q = (-1)^n` for the vanishing triangle of an Ω3 site.
pub fn arnold_q(d: &GaussDiagram, site: &MoveSite) -> Result<Sign, MoveError> {
    let g = r3_of(d, site)?;
    Ok(arnold_q_of(&g, d))
}

fn r3_of(d: &GaussDiagram, site: &MoveSite) -> Result<R3Geometry, MoveError> {
    match *site {
        MoveSite::R3 { top_mid, top_bot, mid_bot } => resolve_r3(d, top_mid, top_bot, mid_bot),
        _ => Err(inapplicable("not an Ω3 site")),
    }
}

pub fn omega3_context(d: &GaussDiagram, site: &MoveSite) -> Result<Omega3Context, MoveError> {
    let g = r3_of(d, site)?;
    let len = d.word().len();
    let segs = g.passage();
    let mut arcs = [Arc { start: 0, len: 0 }; 3];
    for idx in 0..3 {
        let (r1, s1) = segs[idx];
        let (r2, s2) = segs[(idx + 1) % 3];
        let start = next(s1.1, len);
        let arc = Arc { start, len: (s2.0 + len - start) % len };
        let slot = match (r1.min(r2), r1.max(r2)) {
            (0, 1) => 0,
            (1, 2) => 1,
            _ => 2,
        };
        arcs[slot] = arc;
    }
    Ok(Omega3Context {
        site: (g.top_mid, g.top_bot, g.mid_bot),
        top: g.top,
        middle: g.middle,
        bottom: g.bottom,
        ascending: !g.descending(),
        q: arnold_q_of(&g, d),
        a: arcs[0],
        b: arcs[1],
        c: arcs[2],
        word_len: len,
        arrows: d.len(),
    })
}

/// Every Ω3 site of `d`, ordered by the lowest word position it touches.
pub fn enumerate_r3_sites(d: &GaussDiagram) -> Vec<MoveSite> {
    let ids: Vec<ArrowId> = d.arrows().collect();
    let table = d.position_table();
    let len = d.word().len();
    let mut found: Vec<(usize, MoveSite)> = Vec::new();
    for &tm in &ids {
        for &tb in &ids {
            if tb == tm || consecutive(table[&tm].0, table[&tb].0, len).is_none() {
                continue;
            }
            for &mb in &ids {
                if mb == tm || mb == tb {
                    continue;
                }
                if resolve_r3(d, tm, tb, mb).is_ok() {
                    let low = [tm, tb, mb].iter().map(|a| table[a].0.min(table[a].1)).min().unwrap();
                    found.push((low, MoveSite::R3 { top_mid: tm, top_bot: tb, mid_bot: mb }));
                }
            }
        }
    }
    found.sort_by_key(|(low, s)| (*low, site_order_key(s)));
    found.into_iter().map(|(_, s)| s).collect()
}

fn site_order_key(s: &MoveSite) -> (u8, u32, u32, u32) {
    match *s {
        MoveSite::R1Remove { arrow, i } => (0, arrow.0, (i == Sign::Minus) as u32, 0),
        MoveSite::R2Remove { arrows: (a, b) } => (1, a.0, b.0, 0),
        MoveSite::R3 { top_mid, top_bot, mid_bot } => (2, top_mid.0, top_bot.0, mid_bot.0),
        _ => (3, 0, 0, 0),
    }
}

/// All removal sites (Ω1, Ω2) and all Ω3 sites of `d`, with their classes.
pub fn enumerate_removal_sites(d: &GaussDiagram) -> Vec<(MoveSite, DirectedMoveClass)> {
    let table = d.position_table();
    let low = |a: &ArrowId| table[a].0.min(table[a].1);
    let ids: Vec<ArrowId> = d.arrows().collect();
    let mut found: Vec<(usize, MoveSite)> = Vec::new();
    for a in &ids {
        for i in isolated_orientations(d, *a) {
            found.push((low(a), MoveSite::R1Remove { arrow: *a, i }));
        }
    }
    for (x, a) in ids.iter().enumerate() {
        for b in &ids[x + 1..] {
            if resolve_r2(d, *a, *b).is_ok() {
                found.push((low(a).min(low(b)), MoveSite::R2Remove { arrows: (*a, *b) }));
            }
        }
    }
    let mut out: Vec<(MoveSite, DirectedMoveClass)> = found
        .into_iter()
        .map(|(_, s)| (s, classify(&s, d).expect("enumerated site applies")))
        .collect();
    let r3 = enumerate_r3_sites(d);
    out.extend(r3.into_iter().map(|s| (s, classify(&s, d).expect("enumerated site applies"))));
    out.sort_by_key(|(s, _)| {
        let lowest = match *s {
            MoveSite::R1Remove { arrow, .. } => low(&arrow),
            MoveSite::R2Remove { arrows: (a, b) } => low(&a).min(low(&b)),
            MoveSite::R3 { top_mid, top_bot, mid_bot } => low(&top_mid).min(low(&top_bot)).min(low(&mid_bot)),
            _ => usize::MAX,
        };
        (lowest, site_order_key(s))
    });
    out
}

/// Every insertion site of `d`: all Ω1 insertions and all Ω2 insertions.
pub fn enumerate_insertion_sites(d: &GaussDiagram) -> Vec<MoveSite> {
    let gaps = d.gap_count();
    let mut out = Vec::new();
    for gap in 0..gaps {
        for i in Sign::BOTH {
            for j in Sign::BOTH {
                out.push(MoveSite::R1Insert { gap, i, j });
            }
        }
    }
    for gap_over in 0..gaps {
        for gap_under in 0..gaps {
            for interleaved in [true, false] {
                for sign_first in Sign::BOTH {
                    out.push(MoveSite::R2Insert { gap_over, gap_under, interleaved, sign_first, under_first: false });
                    if gap_over == gap_under && !d.is_empty() {
                        out.push(MoveSite::R2Insert { gap_over, gap_under, interleaved, sign_first, under_first: true });
                    }
                }
            }
        }
    }
    out
}

/// Ω3 indices from the signs of the top-middle, top-bottom and
/// middle-bottom crossings. `i` and `j` are the two crossings on the top
/// strand, ordered by which side of the top strand the triangle lies on;
/// that side works out to the product of the three signs. The map is an
/// involution, so it also recovers the signs from the indices.
pub fn r3_indices(s_tm: Sign, s_tb: Sign, s_mb: Sign) -> (Sign, Sign, Sign) {
    if s_tm * s_tb * s_mb == Sign::Minus {
        (s_tm, s_tb, s_mb)
    } else {
        (s_tb, s_tm, s_mb)
    }
}

/// Class and direction of the move at `site`.
pub fn classify(site: &MoveSite, d: &GaussDiagram) -> Result<DirectedMoveClass, MoveError> {
    match *site {
        MoveSite::R1Insert { gap, i, j } => {
            d.check_gap(gap)?;
            Ok(DirectedMoveClass { class: MoveClass::R1 { i, j }, direction: Sign::Plus })
        }
        MoveSite::R1Remove { arrow, i } => {
            let j = d.sign(arrow).ok_or(GaussError::UnknownArrow(arrow))?;
            if !isolated_orientations(d, arrow).contains(&i) {
                return Err(inapplicable(format!("arrow {arrow} is not an isolated kink with i={i}")));
            }
            Ok(DirectedMoveClass { class: MoveClass::R1 { i, j }, direction: Sign::Minus })
        }
        MoveSite::R2Insert { gap_over, gap_under, interleaved, sign_first, .. } => {
            d.check_gap(gap_over)?;
            d.check_gap(gap_under)?;
            Ok(DirectedMoveClass {
                class: MoveClass::R2 { i: Sign::from_bool(interleaved), j: -sign_first },
                direction: Sign::Plus,
            })
        }
        MoveSite::R2Remove { arrows: (a, b) } => {
            let pair = resolve_r2(d, a, b)?;
            Ok(DirectedMoveClass {
                class: MoveClass::R2 { i: Sign::from_bool(pair.interleaved), j: d.sign(pair.second).unwrap() },
                direction: Sign::Minus,
            })
        }
        MoveSite::R3 { top_mid, top_bot, mid_bot } => {
            let g = resolve_r3(d, top_mid, top_bot, mid_bot)?;
            let s = |a| d.sign(a).unwrap();
            let q = arnold_q_of(&g, d);
            let (i, j, k) = r3_indices(s(top_mid), s(top_bot), s(mid_bot));
            Ok(DirectedMoveClass {
                class: MoveClass::R3 { i, j, k, m: Sign::from_bool(g.descending()) },
                direction: -q,
            })
        }
    }
}

pub(crate) fn kink_block(id: ArrowId, i: Sign, j: Sign) -> [Endpoint; 2] {
    let t = Endpoint { arrow: id, role: Role::Tail };
    let h = Endpoint { arrow: id, role: Role::Head };
    if i == -j {
        [t, h]
    } else {
        [h, t]
    }
}

/// Applies a move to a bare diagram, returning the new diagram and the
/// change in tracked winding number.
pub fn apply_to_diagram(d: &GaussDiagram, site: &MoveSite) -> Result<(GaussDiagram, i64), MoveError> {
    classify(site, d)?;
    let word = d.word();
    let mut signs = d.signs().clone();
    match *site {
        MoveSite::R1Insert { gap, i, j } => {
            let id = ArrowId(d.max_id() + 1);
            let mut w = word.to_vec();
            let block = kink_block(id, i, j);
            w.splice(gap..gap, block);
            signs.insert(id, j);
            Ok((GaussDiagram::from_parts_unchecked(w, signs), i.to_i32() as i64))
        }
        MoveSite::R1Remove { arrow, i } => {
            let w = word.iter().copied().filter(|e| e.arrow != arrow).collect();
            signs.remove(&arrow);
            Ok((GaussDiagram::from_parts_unchecked(w, signs), -(i.to_i32() as i64)))
        }
        MoveSite::R2Insert { gap_over, gap_under, interleaved, sign_first, under_first } => {
            let a = ArrowId(d.max_id() + 1);
            let b = ArrowId(d.max_id() + 2);
            let over = [Endpoint { arrow: a, role: Role::Tail }, Endpoint { arrow: b, role: Role::Tail }];
            let under = if interleaved {
                [Endpoint { arrow: a, role: Role::Head }, Endpoint { arrow: b, role: Role::Head }]
            } else {
                [Endpoint { arrow: b, role: Role::Head }, Endpoint { arrow: a, role: Role::Head }]
            };
            let mut w = Vec::with_capacity(word.len() + 4);
            for g in 0..d.gap_count() {
                if g == gap_over && g == gap_under {
                    if under_first {
                        w.extend(under);
                        w.extend(over);
                    } else {
                        w.extend(over);
                        w.extend(under);
                    }
                } else if g == gap_over {
                    w.extend(over);
                } else if g == gap_under {
                    w.extend(under);
                }
                if let Some(e) = word.get(g) {
                    w.push(*e);
                }
            }
            signs.insert(a, sign_first);
            signs.insert(b, -sign_first);
            Ok((GaussDiagram::from_parts_unchecked(w, signs), 0))
        }
        MoveSite::R2Remove { arrows: (a, b) } => {
            let w = word.iter().copied().filter(|e| e.arrow != a && e.arrow != b).collect();
            signs.remove(&a);
            signs.remove(&b);
            Ok((GaussDiagram::from_parts_unchecked(w, signs), 0))
        }
        MoveSite::R3 { top_mid, top_bot, mid_bot } => {
            let g = resolve_r3(d, top_mid, top_bot, mid_bot)?;
            let mut w = word.to_vec();
            for (p, q) in [g.top, g.middle, g.bottom] {
                w.swap(p, q);
            }
            Ok((GaussDiagram::from_parts_unchecked(w, signs), 0))
        }
    }
}

/// Applies `site` to `state`, updating the tracked winding number and writhe.
pub fn apply_move(state: &DiagramState, site: &MoveSite) -> Result<DiagramState, MoveError> {
    let (diagram, dw) = apply_to_diagram(&state.diagram, site)?;
    Ok(DiagramState::new(diagram, state.winding + dw))
}

/// Connected sum of two states. The winding number of the sum is
/// `w1 + w2 - cut_style`.
pub fn sum_states(
    s1: &DiagramState,
    cut_style: Sign,
    s2: &DiagramState,
    gap1: usize,
    gap2: usize,
) -> Result<DiagramState, MoveError> {
    let diagram = connected_sum(&s1.diagram, gap1, &s2.diagram, gap2)?;
    Ok(DiagramState::new(diagram, s1.winding + s2.winding - cut_style.to_i32() as i64))
}

/// The site in `after` that undoes `site`, where `after` is the result of
/// applying `site` to `before`.
pub fn inverse_site(before: &GaussDiagram, site: &MoveSite, after: &GaussDiagram) -> Result<MoveSite, MoveError> {
    // Gap in `after` in front of the kept endpoint that follows the removed
    // block starting at `start` with length `width` in `before`.
    let anchor_gap = |start: usize, width: usize, removed: &dyn Fn(ArrowId) -> bool| -> usize {
        let len = before.word().len();
        for k in width..len {
            let e = before.word()[(start + k) % len];
            if !removed(e.arrow) {
                return after.position(e).expect("kept endpoint");
            }
        }
        0
    };
    let dir = classify(site, before)?;
    Ok(match *site {
        MoveSite::R1Insert { i, .. } => MoveSite::R1Remove { arrow: ArrowId(before.max_id() + 1), i },
        MoveSite::R2Insert { .. } => {
            MoveSite::R2Remove { arrows: (ArrowId(before.max_id() + 1), ArrowId(before.max_id() + 2)) }
        }
        MoveSite::R3 { .. } => *site,
        MoveSite::R1Remove { arrow, i } => {
            let (t, h) = before.endpoints_of(arrow).unwrap();
            let len = before.word().len();
            let start = if kink_block(arrow, i, before.sign(arrow).unwrap())[0].role == Role::Tail {
                t
            } else {
                h
            };
            debug_assert!(next(start, len) == if start == t { h } else { t });
            let gap = anchor_gap(start, 2, &|x| x == arrow);
            let MoveClass::R1 { i, j } = dir.class else { unreachable!() };
            MoveSite::R1Insert { gap, i, j }
        }
        MoveSite::R2Remove { arrows: (a, b) } => {
            let pair = resolve_r2(before, a, b)?;
            let removed = |x: ArrowId| x == a || x == b;
            let gap_over = anchor_gap(pair.tail_start, 2, &removed);
            let gap_under = anchor_gap(pair.head_start, 2, &removed);
            let len = before.word().len();
            let under_first = gap_over == gap_under && (pair.head_start + 2) % len == pair.tail_start;
            MoveSite::R2Insert {
                gap_over,
                gap_under,
                interleaved: pair.interleaved,
                sign_first: before.sign(pair.first).unwrap(),
                under_first,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{canonical_form, parse_gauss_code};

    fn p(s: &str) -> GaussDiagram {
        parse_gauss_code(s).unwrap()
    }

    const TREFOIL: &str = "O1+U2+O3+U1+O2+U3+";

    #[test]
    fn twenty_four_classes() {
        let all = MoveClass::all();
        assert_eq!(all.len(), 24);
        let mut dedup = all.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 24);
        for c in all {
            assert_eq!(c.to_string().parse::<MoveClass>().unwrap(), c);
        }
    }

    #[test]
    fn site_syntax_round_trip() {
        for s in [
            "r1-@3:i=+1",
            "r1+@0:i=-1,j=+1",
            "r2-@1,2",
            "r2+@0,3:interleaved=1,sign=-1",
            "r2+@2,2:interleaved=0,sign=+1,under_first=1",
            "r3@1,2,3",
        ] {
            let site: MoveSite = s.parse().unwrap();
            assert_eq!(site.to_string(), s);
        }
        assert!("r4@1".parse::<MoveSite>().is_err());
        assert!("r1+@0:i=2,j=1".parse::<MoveSite>().is_err());
        assert!("r3@1,2".parse::<MoveSite>().is_err());
        assert!("r1-@0:i=1".parse::<MoveSite>().is_err());
    }

    #[test]
    fn removal_sites_small_cases() {
        assert!(enumerate_removal_sites(&GaussDiagram::empty()).is_empty());
        // A one-crossing curve has two lobes, each removable as a kink.
        let k = enumerate_removal_sites(&p("O1+U1+"));
        assert_eq!(k.len(), 2);
        for (site, class) in &k {
            assert!(matches!(site, MoveSite::R1Remove { .. }));
            assert_eq!(class.direction, Sign::Minus);
        }
        let kinked = enumerate_removal_sites(&p("O1+U1+O2-U3-U2-O3-"));
        let r1: Vec<_> = kinked.iter().filter(|(s, _)| matches!(s, MoveSite::R1Remove { .. })).collect();
        assert_eq!(r1.len(), 1);
        let r2 = enumerate_removal_sites(&p("O1+O2-U2-U1+"));
        let pairs: Vec<_> = r2.iter().filter(|(s, _)| matches!(s, MoveSite::R2Remove { .. })).collect();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].1.class, MoveClass::R2 { i: Sign::Minus, j: Sign::Minus });
    }

    #[test]
    fn trefoil_has_no_triangle() {
        // Every segment pair of the standard trefoil mixes a tail and a head,
        // so no top strand exists.
        assert!(enumerate_r3_sites(&p(TREFOIL)).is_empty());
        assert!(enumerate_r3_sites(&p("O1+U1+")).is_empty());
    }

    #[test]
    fn kink_classification() {
        let k = p("O1+U1+");
        let c = classify(&MoveSite::R1Remove { arrow: ArrowId(1), i: Sign::Plus }, &k).unwrap();
        assert_eq!(c, DirectedMoveClass { class: MoveClass::R1 { i: Sign::Plus, j: Sign::Plus }, direction: Sign::Minus });
        // With a second arrow the lobe orientation is fixed by the word.
        let d = p("O1+U1+O2+U3-U2+O3-");
        assert!(classify(&MoveSite::R1Remove { arrow: ArrowId(1), i: Sign::Minus }, &d).is_ok());
        assert!(classify(&MoveSite::R1Remove { arrow: ArrowId(1), i: Sign::Plus }, &d).is_err());
    }

    #[test]
    fn r2_insert_classes() {
        let e = GaussDiagram::empty();
        let nested = MoveSite::R2Insert { gap_over: 0, gap_under: 0, interleaved: false, sign_first: Sign::Plus, under_first: false };
        assert_eq!(classify(&nested, &e).unwrap().class, MoveClass::R2 { i: Sign::Minus, j: Sign::Minus });
        let direct = MoveSite::R2Insert { gap_over: 0, gap_under: 0, interleaved: true, sign_first: Sign::Minus, under_first: false };
        assert_eq!(classify(&direct, &e).unwrap().class, MoveClass::R2 { i: Sign::Plus, j: Sign::Plus });
    }

    #[test]
    fn r1_insert_into_empty() {
        let s = DiagramState::new(GaussDiagram::empty(), 5);
        let out = apply_move(&s, &MoveSite::R1Insert { gap: 0, i: Sign::Plus, j: Sign::Plus }).unwrap();
        assert_eq!(canonical_form(out.diagram()).0, "O1+U1+");
        assert_eq!(out.winding(), 6);
        assert_eq!(out.writhe(), 1);
    }

    #[test]
    fn insert_and_remove_are_inverse() {
        let d = p("O1+U2+O3-U4-O2+U1+O4-U3-");
        let s = DiagramState::new(d.clone(), 1);
        for site in enumerate_insertion_sites(&d) {
            let after = apply_move(&s, &site).unwrap();
            let inv = inverse_site(&d, &site, after.diagram()).unwrap();
            let back = apply_move(&after, &inv).unwrap();
            assert_eq!(canonical_form(back.diagram()), canonical_form(&d), "{site}");
            assert_eq!(back.winding(), 1);
            let again = inverse_site(after.diagram(), &inv, back.diagram()).unwrap();
            let fwd = apply_move(&back, &again).unwrap();
            assert_eq!(canonical_form(fwd.diagram()), canonical_form(after.diagram()), "{site}");
        }
    }

    #[test]
    fn r3_swaps_segments_and_flips_q() {
        // Planted triangle: top segment (t1 t2), middle (h1 t3), bottom (h2 h3).
        let d = p("O1+O2+U1+O3+U2+U3+");
        let sites = enumerate_r3_sites(&d);
        assert!(sites.contains(&MoveSite::R3 { top_mid: ArrowId(1), top_bot: ArrowId(2), mid_bot: ArrowId(3) }));
        let site = MoveSite::R3 { top_mid: ArrowId(1), top_bot: ArrowId(2), mid_bot: ArrowId(3) };
        let before = classify(&site, &d).unwrap();
        let (after, dw) = apply_to_diagram(&d, &site).unwrap();
        assert_eq!(dw, 0);
        assert_eq!(after.word(), p("O2+O1+O3+U1+U3+U2+").word());
        let back = classify(&site, &after).unwrap();
        assert_eq!(back.class, before.class);
        assert_eq!(back.direction, -before.direction);
        assert_eq!(arnold_q(&d, &site).unwrap(), -arnold_q(&after, &site).unwrap());
    }

    #[test]
    fn omega3_context_roles() {
        let d = p("O1+O2+U1+O3+U2+U3+");
        let site = MoveSite::R3 { top_mid: ArrowId(1), top_bot: ArrowId(2), mid_bot: ArrowId(3) };
        let ctx = omega3_context(&d, &site).unwrap();
        assert!(!ctx.ascending);
        assert_eq!(ctx.top, (0, 1));
        assert_eq!(ctx.middle, (2, 3));
        assert_eq!(ctx.bottom, (4, 5));
        assert_eq!((ctx.a.len, ctx.b.len, ctx.c.len), (0, 0, 0));
        assert!(ctx.matches(&d));
    }

    #[test]
    fn sum_states_winding() {
        let a = DiagramState::new(p("O1+U1+"), 2);
        let b = DiagramState::new(p("O1-U1-"), -1);
        for cut in Sign::BOTH {
            let s = sum_states(&a, cut, &b, 1, 0).unwrap();
            assert_eq!(s.winding(), 2 - 1 - cut.to_i32() as i64);
            assert_eq!(s.writhe(), 0);
        }
        assert!(sum_states(&a, Sign::Plus, &b, 2, 0).is_err());
    }
}
