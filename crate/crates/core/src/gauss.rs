//! Signed Gauss diagrams stored as cyclic double-occurrence words.
//!
//! An arrow joins the two preimages of a crossing and points from the
//! overpass (its tail, written `O`) to the underpass (its head, written `U`).
//! Two diagrams are considered equal when they differ only by a rotation of
//! the cyclic word and a relabeling of the arrows; see [`canonical_form`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ArrowId(pub u32);

impl fmt::Display for ArrowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i32(v: i32) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn to_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_bool(positive: bool) -> Sign {
        if positive {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_bool(self == rhs)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Which preimage of a crossing an endpoint is. The tail lies on the
/// overpass, the head on the underpass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    Tail,
    Head,
}

impl Role {
    pub fn letter(self) -> char {
        match self {
            Role::Tail => 'O',
            Role::Head => 'U',
        }
    }

    pub fn other(self) -> Role {
        match self {
            Role::Tail => Role::Head,
            Role::Head => Role::Tail,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Endpoint {
    pub arrow: ArrowId,
    pub role: Role,
}

impl Endpoint {
    pub fn tail(arrow: u32) -> Endpoint {
        Endpoint { arrow: ArrowId(arrow), role: Role::Tail }
    }

    pub fn head(arrow: u32) -> Endpoint {
        Endpoint { arrow: ArrowId(arrow), role: Role::Head }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaussError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("arrow {id} occurs {count} times, expected exactly 2")]
    Occurrence { id: u32, count: usize },
    #[error("arrow {id} has two {role:?} endpoints")]
    DuplicateRole { id: u32, role: Role },
    #[error("arrow {id} carries conflicting signs")]
    ConflictingSign { id: u32 },
    #[error("sign table does not match the arrows of the word")]
    SignTable,
    #[error("gap {gap} out of range (diagram has {gaps} gaps)")]
    GapOutOfRange { gap: usize, gaps: usize },
    #[error("unknown arrow {0}")]
    UnknownArrow(ArrowId),
    #[error("arrow {0} given twice")]
    SameArrow(ArrowId),
}

/// A signed Gauss diagram: a cyclic word of `2n` endpoints in which every
/// arrow appears once as a tail and once as a head.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussDiagram {
    word: Vec<Endpoint>,
    signs: BTreeMap<ArrowId, Sign>,
}

/// Rotation- and relabeling-minimal serialization of a diagram.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalForm(pub String);

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl GaussDiagram {
    pub fn empty() -> GaussDiagram {
        GaussDiagram::default()
    }

    /// Builds a diagram after checking the double-occurrence and sign-table
    /// invariants.
    pub fn new(word: Vec<Endpoint>, signs: BTreeMap<ArrowId, Sign>) -> Result<GaussDiagram, GaussError> {
        let mut seen: HashMap<ArrowId, (usize, usize)> = HashMap::new();
        for e in &word {
            let slot = seen.entry(e.arrow).or_insert((0, 0));
            match e.role {
                Role::Tail => slot.0 += 1,
                Role::Head => slot.1 += 1,
            }
        }
        for (id, (tails, heads)) in &seen {
            if tails + heads != 2 {
                return Err(GaussError::Occurrence { id: id.0, count: tails + heads });
            }
            if *tails == 2 {
                return Err(GaussError::DuplicateRole { id: id.0, role: Role::Tail });
            }
            if *heads == 2 {
                return Err(GaussError::DuplicateRole { id: id.0, role: Role::Head });
            }
        }
        if signs.len() != seen.len() || signs.keys().any(|k| !seen.contains_key(k)) {
            return Err(GaussError::SignTable);
        }
        Ok(GaussDiagram { word, signs })
    }

    pub(crate) fn from_parts_unchecked(word: Vec<Endpoint>, signs: BTreeMap<ArrowId, Sign>) -> GaussDiagram {
        debug_assert!(GaussDiagram::new(word.clone(), signs.clone()).is_ok());
        GaussDiagram { word, signs }
    }

    pub fn word(&self) -> &[Endpoint] {
        &self.word
    }

    pub fn signs(&self) -> &BTreeMap<ArrowId, Sign> {
        &self.signs
    }

    /// Number of arrows.
    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    /// Number of gaps between consecutive endpoints; the empty diagram has
    /// exactly one.
    pub fn gap_count(&self) -> usize {
        self.word.len().max(1)
    }

    pub fn arrows(&self) -> impl Iterator<Item = ArrowId> + '_ {
        self.signs.keys().copied()
    }

    pub fn sign(&self, a: ArrowId) -> Option<Sign> {
        self.signs.get(&a).copied()
    }

    pub fn contains(&self, a: ArrowId) -> bool {
        self.signs.contains_key(&a)
    }

    pub fn max_id(&self) -> u32 {
        self.signs.keys().next_back().map_or(0, |a| a.0)
    }

    pub fn position(&self, e: Endpoint) -> Option<usize> {
        self.word.iter().position(|x| *x == e)
    }

    /// Word positions of the tail and head of `a`.
    pub fn endpoints_of(&self, a: ArrowId) -> Option<(usize, usize)> {
        let mut tail = None;
        let mut head = None;
        for (p, e) in self.word.iter().enumerate() {
            if e.arrow == a {
                match e.role {
                    Role::Tail => tail = Some(p),
                    Role::Head => head = Some(p),
                }
            }
        }
        Some((tail?, head?))
    }

    /// Positions of every arrow's tail and head, keyed by arrow.
    pub fn position_table(&self) -> HashMap<ArrowId, (usize, usize)> {
        let mut table: HashMap<ArrowId, (usize, usize)> = HashMap::with_capacity(self.len());
        for (p, e) in self.word.iter().enumerate() {
            let slot = table.entry(e.arrow).or_insert((usize::MAX, usize::MAX));
            match e.role {
                Role::Tail => slot.0 = p,
                Role::Head => slot.1 = p,
            }
        }
        table
    }

    pub fn check_gap(&self, gap: usize) -> Result<(), GaussError> {
        if gap < self.gap_count() {
            Ok(())
        } else {
            Err(GaussError::GapOutOfRange { gap, gaps: self.gap_count() })
        }
    }

    /// The word read starting at position `start`.
    pub fn rotated(&self, start: usize) -> GaussDiagram {
        if self.word.is_empty() {
            return self.clone();
        }
        let mut word = self.word[start..].to_vec();
        word.extend_from_slice(&self.word[..start]);
        GaussDiagram { word, signs: self.signs.clone() }
    }

    fn tokens_from(&self, start: usize, out: &mut String) {
        let len = self.word.len();
        let mut labels: HashMap<ArrowId, u32> = HashMap::with_capacity(self.len());
        for k in 0..len {
            let e = self.word[(start + k) % len];
            let next = labels.len() as u32 + 1;
            let label = *labels.entry(e.arrow).or_insert(next);
            out.push(e.role.letter());
            out.push_str(&label.to_string());
            out.push(self.signs[&e.arrow].symbol());
        }
    }

    /// The word as written, with the diagram's own arrow ids and no rotation.
    /// Sites refer to these ids, so counterexamples use this form.
    pub fn raw_code(&self) -> String {
        let mut out = String::with_capacity(self.word.len() * 3);
        for e in &self.word {
            out.push(e.role.letter());
            out.push_str(&e.arrow.0.to_string());
            out.push(self.signs[&e.arrow].symbol());
        }
        out
    }

    /// Rotation start used by [`canonical_form`].
    pub fn canonical_start(&self) -> usize {
        let mut best: Option<(String, usize)> = None;
        for start in 0..self.word.len() {
            let mut s = String::with_capacity(self.word.len() * 3);
            self.tokens_from(start, &mut s);
            if best.as_ref().is_none_or(|(b, _)| s < *b) {
                best = Some((s, start));
            }
        }
        best.map_or(0, |(_, start)| start)
    }
}

impl fmt::Display for GaussDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}

impl FromStr for GaussDiagram {
    type Err = GaussError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_gauss_code(s)
    }
}

/// Parses `('O'|'U') digits ('+'|'-')` tokens, whitespace allowed between
/// tokens.
pub fn parse_gauss_code(text: &str) -> Result<GaussDiagram, GaussError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut word = Vec::new();
    let mut signs: BTreeMap<ArrowId, Sign> = BTreeMap::new();
    let syntax = |pos: usize, msg: &str| GaussError::Syntax { pos, msg: msg.to_string() };
    while pos < bytes.len() {
        let c = bytes[pos];
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let role = match c {
            b'O' => Role::Tail,
            b'U' => Role::Head,
            _ => return Err(syntax(pos, "expected 'O' or 'U'")),
        };
        pos += 1;
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(syntax(pos, "expected arrow number"));
        }
        if bytes[start] == b'0' {
            return Err(syntax(start, "arrow numbers start with a nonzero digit"));
        }
        let id: u32 = text[start..pos].parse().map_err(|_| syntax(start, "arrow number too large"))?;
        let sign = match bytes.get(pos) {
            Some(b'+') => Sign::Plus,
            Some(b'-') => Sign::Minus,
            _ => return Err(syntax(pos, "expected '+' or '-'")),
        };
        pos += 1;
        let arrow = ArrowId(id);
        if let Some(prev) = signs.insert(arrow, sign) {
            if prev != sign {
                return Err(GaussError::ConflictingSign { id });
            }
        }
        word.push(Endpoint { arrow, role });
    }
    GaussDiagram::new(word, signs)
}

/// Canonical text of `d`: starts at the rotation chosen by
/// [`canonical_form`] and numbers arrows 1..n by first appearance.
pub fn serialize(d: &GaussDiagram) -> String {
    canonical_form(d).0
}

/// Lexicographically least relabeled serialization over all rotations.
pub fn canonical_form(d: &GaussDiagram) -> CanonicalForm {
    let mut best: Option<String> = None;
    for start in 0..d.word.len() {
        let mut s = String::with_capacity(d.word.len() * 3);
        d.tokens_from(start, &mut s);
        if best.as_ref().is_none_or(|b| s < *b) {
            best = Some(s);
        }
    }
    CanonicalForm(best.unwrap_or_default())
}

/// Reverses the orientation of the circle. Roles and signs are kept.
pub fn reverse_orientation(d: &GaussDiagram) -> GaussDiagram {
    let mut word = d.word.clone();
    word.reverse();
    GaussDiagram { word, signs: d.signs.clone() }
}

/// Negates every sign.
pub fn mirror(d: &GaussDiagram) -> GaussDiagram {
    let signs = d.signs.iter().map(|(a, s)| (*a, -*s)).collect();
    GaussDiagram { word: d.word.clone(), signs }
}

/// Splices `d2`, opened at `cut2`, into `d1` at `cut1`. Arrow ids of `d2`
/// are shifted past those of `d1`.
pub fn connected_sum(d1: &GaussDiagram, cut1: usize, d2: &GaussDiagram, cut2: usize) -> Result<GaussDiagram, GaussError> {
    d1.check_gap(cut1)?;
    d2.check_gap(cut2)?;
    let shift = d1.max_id();
    let opened = d2.rotated(if d2.word.is_empty() { 0 } else { cut2 });
    let mut word = Vec::with_capacity(d1.word.len() + d2.word.len());
    word.extend_from_slice(&d1.word[..cut1.min(d1.word.len())]);
    word.extend(opened.word.iter().map(|e| Endpoint { arrow: ArrowId(e.arrow.0 + shift), role: e.role }));
    word.extend_from_slice(&d1.word[cut1.min(d1.word.len())..]);
    let mut signs = d1.signs.clone();
    signs.extend(d2.signs.iter().map(|(a, s)| (ArrowId(a.0 + shift), *s)));
    Ok(GaussDiagram { word, signs })
}

/// Keeps only the arrows in `keep`.
pub fn restrict_to_subset(d: &GaussDiagram, keep: &BTreeSet<ArrowId>) -> Result<GaussDiagram, GaussError> {
    if let Some(a) = keep.iter().find(|a| !d.contains(**a)) {
        return Err(GaussError::UnknownArrow(*a));
    }
    let word = d.word.iter().copied().filter(|e| keep.contains(&e.arrow)).collect();
    let signs = d.signs.iter().filter(|(a, _)| keep.contains(a)).map(|(a, s)| (*a, *s)).collect();
    Ok(GaussDiagram { word, signs })
}

/// True when the chords of `a` and `b` alternate around the circle.
pub fn interlaced(d: &GaussDiagram, a: ArrowId, b: ArrowId) -> Result<bool, GaussError> {
    if a == b {
        return Err(GaussError::SameArrow(a));
    }
    let (ta, ha) = d.endpoints_of(a).ok_or(GaussError::UnknownArrow(a))?;
    let (tb, hb) = d.endpoints_of(b).ok_or(GaussError::UnknownArrow(b))?;
    Ok(chords_cross((ta, ha), (tb, hb)))
}

pub(crate) fn chords_cross(a: (usize, usize), b: (usize, usize)) -> bool {
    let (lo, hi) = if a.0 < a.1 { (a.0, a.1) } else { (a.1, a.0) };
    let inside = |p: usize| lo < p && p < hi;
    inside(b.0) != inside(b.1)
}

pub fn writhe(d: &GaussDiagram) -> i64 {
    d.signs.values().map(|s| s.to_i32() as i64).sum()
}
