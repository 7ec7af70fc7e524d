//! Arrow-diagram invariants: signed counts of subdiagrams matching a fixed
//! unsigned pattern, the built-in families `A_n`, `D_n`, `W_n`, and the local
//! linking number that governs the jump of `W_3` under Ω3 moves.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gauss::{reverse_orientation, ArrowId, Endpoint, GaussDiagram, Role};
use crate::moves::{apply_move, classify, omega3_context, DiagramState, MoveError, MoveSite, Omega3Context};

/// An unsigned abstract Gauss diagram, used as a counting pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArrowPattern {
    word: Vec<Endpoint>,
    arrows: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("no built-in pattern {name}_{n}")]
    Unsupported { name: char, n: usize },
    #[error("not a double-occurrence word")]
    BadPattern,
    #[error("Ω3 context does not belong to this diagram")]
    StaleContext,
    #[error(transparent)]
    Move(#[from] MoveError),
}

impl ArrowPattern {
    /// Builds a pattern from a word in which every arrow has one tail and
    /// one head.
    pub fn new(word: Vec<Endpoint>) -> Result<ArrowPattern, InvariantError> {
        let mut counts: BTreeMap<ArrowId, (u8, u8)> = BTreeMap::new();
        for e in &word {
            let c = counts.entry(e.arrow).or_default();
            match e.role {
                Role::Tail => c.0 += 1,
                Role::Head => c.1 += 1,
            }
        }
        if counts.values().any(|c| *c != (1, 1)) {
            return Err(InvariantError::BadPattern);
        }
        Ok(ArrowPattern { arrows: counts.len(), word })
    }

    /// Pattern from compact text such as `"h1 t2 h3 t1"`.
    pub fn parse(text: &str) -> Result<ArrowPattern, InvariantError> {
        let word = text
            .split_whitespace()
            .map(|tok| {
                let (role, rest) = match tok.as_bytes().first() {
                    Some(b't') | Some(b'O') => (Role::Tail, &tok[1..]),
                    Some(b'h') | Some(b'U') => (Role::Head, &tok[1..]),
                    _ => return Err(InvariantError::BadPattern),
                };
                let id: u32 = rest.parse().map_err(|_| InvariantError::BadPattern)?;
                Ok(Endpoint { arrow: ArrowId(id), role })
            })
            .collect::<Result<Vec<_>, _>>()?;
        ArrowPattern::new(word)
    }

    pub fn word(&self) -> &[Endpoint] {
        &self.word
    }

    pub fn arrows(&self) -> usize {
        self.arrows
    }

    pub fn reversed(&self) -> ArrowPattern {
        let mut word = self.word.clone();
        word.reverse();
        ArrowPattern { word, arrows: self.arrows }
    }

    /// Same pattern with arrows numbered 1.. by first appearance.
    pub fn relabeled(&self) -> ArrowPattern {
        let mut labels: BTreeMap<ArrowId, u32> = BTreeMap::new();
        let word = self
            .word
            .iter()
            .map(|e| {
                let next = labels.len() as u32 + 1;
                Endpoint { arrow: ArrowId(*labels.entry(e.arrow).or_insert(next)), role: e.role }
            })
            .collect();
        ArrowPattern { word, arrows: self.arrows }
    }

    /// True if some arrow has its head and tail adjacent.
    pub fn has_isolated_arrow(&self) -> bool {
        let len = self.word.len();
        (0..len).any(|p| self.word[p].arrow == self.word[(p + 1) % len].arrow)
    }

    /// Relabeled keys of every rotation.
    fn rotation_keys(&self) -> Vec<Vec<u8>> {
        let len = self.word.len();
        let mut keys: Vec<Vec<u8>> = (0..len)
            .map(|start| {
                let mut labels: BTreeMap<ArrowId, u8> = BTreeMap::new();
                (0..len)
                    .map(|k| {
                        let e = self.word[(start + k) % len];
                        let next = labels.len() as u8;
                        let l = *labels.entry(e.arrow).or_insert(next);
                        encode(l, e.role)
                    })
                    .collect()
            })
            .collect();
        keys.sort();
        keys.dedup();
        keys
    }
}

impl fmt::Display for ArrowPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks: Vec<String> = self
            .word
            .iter()
            .map(|e| format!("{}{}", if e.role == Role::Tail { 't' } else { 'h' }, e.arrow))
            .collect();
        f.write_str(&toks.join(" "))
    }
}

fn encode(label: u8, role: Role) -> u8 {
    (label << 1) | (role == Role::Head) as u8
}

/// Every unsigned pattern with `n` arrows, one per rotation class.
pub fn all_patterns(n: usize) -> Vec<ArrowPattern> {
    fn grow(word: &mut Vec<Endpoint>, open: &mut Vec<ArrowId>, used: u32, n: u32, out: &mut Vec<Vec<Endpoint>>) {
        if word.len() == 2 * n as usize {
            out.push(word.clone());
            return;
        }
        if used < n {
            let a = ArrowId(used + 1);
            for role in [Role::Tail, Role::Head] {
                word.push(Endpoint { arrow: a, role });
                open.push(a);
                grow(word, open, used + 1, n, out);
                open.pop();
                word.pop();
            }
        }
        for k in 0..open.len() {
            let a = open.remove(k);
            let first = word.iter().find(|e| e.arrow == a).unwrap().role;
            word.push(Endpoint { arrow: a, role: first.other() });
            grow(word, open, used, n, out);
            word.pop();
            open.insert(k, a);
        }
    }
    let mut words = Vec::new();
    grow(&mut Vec::new(), &mut Vec::new(), 0, n as u32, &mut words);
    let mut seen = std::collections::BTreeSet::new();
    words
        .into_iter()
        .filter_map(|w| {
            let p = ArrowPattern { word: w, arrows: n };
            let key = p.rotation_keys().into_iter().next().unwrap_or_default();
            seen.insert(key).then_some(p)
        })
        .collect()
}

/// The pattern underlying `A_4`.
pub const A4_WORD: &str = "t1 h2 t3 h4 t2 h1 t4 h3";

/// Built-in patterns: `a_4`, `d_4` (the reverse of `a_4`) and `w_n` for odd
/// `n >= 3` (n diameters with tails and heads alternating).
pub fn builtin_pattern(name: char, n: usize) -> Result<ArrowPattern, InvariantError> {
    match (name, n) {
        ('a', 4) => ArrowPattern::parse(A4_WORD),
        ('d', 4) => Ok(ArrowPattern::parse(A4_WORD)?.reversed()),
        ('w', n) if n >= 3 && n % 2 == 1 => {
            let word = (0..2 * n)
                .map(|p| {
                    let role = if p % 2 == 0 { Role::Tail } else { Role::Head };
                    // Arrow number from the tail position; heads sit antipodal.
                    let tail_pos = if role == Role::Tail { p } else { (p + n) % (2 * n) };
                    Endpoint { arrow: ArrowId(tail_pos as u32 / 2 + 1), role }
                })
                .collect();
            Ok(ArrowPattern::new(word)?.relabeled())
        }
        _ => Err(InvariantError::Unsupported { name, n }),
    }
}

/// Signed count of the arrow subsets of `d` whose restriction is the
/// pattern `p` up to rotation. Each subset is counted once.
pub fn count_pattern(d: &GaussDiagram, p: &ArrowPattern) -> i64 {
    let m = p.arrows();
    let n = d.len();
    if m == 0 || m > n {
        return 0;
    }
    let keys = p.rotation_keys();
    let ids: Vec<ArrowId> = d.arrows().collect();
    let index: BTreeMap<ArrowId, usize> = ids.iter().enumerate().map(|(k, a)| (*a, k)).collect();
    let word: Vec<(usize, Role)> = d.word().iter().map(|e| (index[&e.arrow], e.role)).collect();
    let signs: Vec<i64> = ids.iter().map(|a| d.sign(*a).unwrap().to_i32() as i64).collect();

    let mut total = 0;
    let mut chosen: Vec<usize> = (0..m).collect();
    let mut member = vec![false; n];
    let mut labels = vec![u8::MAX; n];
    let mut key = Vec::with_capacity(2 * m);
    loop {
        for &c in &chosen {
            member[c] = true;
        }
        key.clear();
        let mut next_label = 0u8;
        for &(a, role) in &word {
            if member[a] {
                if labels[a] == u8::MAX {
                    labels[a] = next_label;
                    next_label += 1;
                }
                key.push(encode(labels[a], role));
            }
        }
        if keys.contains(&key) {
            total += chosen.iter().map(|&c| signs[c]).product::<i64>();
        }
        for &c in &chosen {
            member[c] = false;
            labels[c] = u8::MAX;
        }
        // Next combination in lexicographic order.
        let mut k = m;
        loop {
            if k == 0 {
                return total;
            }
            k -= 1;
            if chosen[k] != k + n - m {
                break;
            }
        }
        chosen[k] += 1;
        for x in k + 1..m {
            chosen[x] = chosen[x - 1] + 1;
        }
    }
}

/// Which family of built-in invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InvariantName {
    A,
    D,
    W,
}

impl InvariantName {
    fn pattern_letter(self) -> char {
        match self {
            InvariantName::A => 'a',
            InvariantName::D => 'd',
            InvariantName::W => 'w',
        }
    }
}

pub fn evaluate(name: InvariantName, n: usize, d: &GaussDiagram) -> Result<i64, InvariantError> {
    Ok(count_pattern(d, &builtin_pattern(name.pattern_letter(), n)?))
}

pub fn a4(d: &GaussDiagram) -> i64 {
    evaluate(InvariantName::A, 4, d).expect("a_4 is built in")
}

pub fn d4(d: &GaussDiagram) -> i64 {
    evaluate(InvariantName::D, 4, d).expect("d_4 is built in")
}

pub fn w3(d: &GaussDiagram) -> i64 {
    evaluate(InvariantName::W, 3, d).expect("w_3 is built in")
}

pub fn w5(d: &GaussDiagram) -> i64 {
    evaluate(InvariantName::W, 5, d).expect("w_5 is built in")
}

/// Local linking number of an Ω3 site: the signed count of arrows outside the
/// site that run from arc `b` (middle to bottom) to arc `a` (top to middle).
pub fn llk(d: &GaussDiagram, ctx: &Omega3Context) -> Result<i64, InvariantError> {
    if !ctx.matches(d) {
        return Err(InvariantError::StaleContext);
    }
    let len = d.word().len();
    let (x, y, z) = ctx.site;
    let mut total = 0;
    for (a, (t, h)) in d.position_table() {
        if a == x || a == y || a == z {
            continue;
        }
        if ctx.b.contains(t, len) && ctx.a.contains(h, len) {
            total += d.sign(a).unwrap().to_i32() as i64;
        }
    }
    Ok(total)
}

/// Predicted and observed change of `W_3` when the Ω3 move at `site` is
/// applied to `state`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct W3Jump {
    pub predicted: i64,
    pub actual: i64,
    pub llk: i64,
    pub direction: i32,
}

pub fn w3_jump_check(state: &DiagramState, site: &MoveSite) -> Result<W3Jump, InvariantError> {
    let d = state.diagram();
    let ctx = omega3_context(d, site)?;
    let linking = llk(d, &ctx)?;
    let direction = classify(site, d)?.direction.to_i32();
    let after = apply_move(state, site)?;
    Ok(W3Jump {
        predicted: linking * direction as i64,
        actual: w3(after.diagram()) - w3(d),
        llk: linking,
        direction,
    })
}

/// Every supported invariant of a state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantProfile {
    pub writhe: i64,
    pub winding: i64,
    #[serde(rename = "A")]
    pub a: BTreeMap<usize, i64>,
    #[serde(rename = "D")]
    pub d: BTreeMap<usize, i64>,
    #[serde(rename = "W")]
    pub w: BTreeMap<usize, i64>,
}

pub const DEFAULT_N_MAX: usize = 6;

/// `A_n`, `D_n` for the supported even `n` and `W_n` for odd `3 <= n <= n_max`.
pub fn profile(state: &DiagramState, n_max: usize) -> InvariantProfile {
    let d = state.diagram();
    let mut p = InvariantProfile {
        writhe: state.writhe(),
        winding: state.winding(),
        a: BTreeMap::new(),
        d: BTreeMap::new(),
        w: BTreeMap::new(),
    };
    for n in 3..=n_max {
        if let Ok(v) = evaluate(InvariantName::A, n, d) {
            p.a.insert(n, v);
        }
        if let Ok(v) = evaluate(InvariantName::D, n, d) {
            p.d.insert(n, v);
        }
        if let Ok(v) = evaluate(InvariantName::W, n, d) {
            p.w.insert(n, v);
        }
    }
    p
}

/// What any move sequence between two diagrams must contain.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub ascending_omega3: bool,
    pub descending_omega3: bool,
    pub min_omega3_moves: usize,
    pub min_omega1_moves: u64,
    pub two_omega1_classes: bool,
    pub reasons: Vec<String>,
}

impl LowerBoundReport {
    pub fn is_empty(&self) -> bool {
        *self == LowerBoundReport::default()
    }
}

impl fmt::Display for LowerBoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return writeln!(f, "no lower bounds: profiles agree");
        }
        for r in &self.reasons {
            writeln!(f, "- {r}")?;
        }
        Ok(())
    }
}

pub fn move_lower_bounds(p1: &InvariantProfile, p2: &InvariantProfile) -> LowerBoundReport {
    let mut r = LowerBoundReport::default();
    for (n, v1) in &p1.a {
        if let Some(v2) = p2.a.get(n) {
            if v1 != v2 && !r.ascending_omega3 {
                r.ascending_omega3 = true;
                r.reasons.push(format!(
                    "ΔA_{n} = {}: A_{n} is unchanged by Ω1, Ω2 and descending Ω3, so ≥1 ascending Ω3-move is needed",
                    v2 - v1
                ));
            }
        }
    }
    for (n, v1) in &p1.d {
        if let Some(v2) = p2.d.get(n) {
            if v1 != v2 && !r.descending_omega3 {
                r.descending_omega3 = true;
                r.reasons.push(format!(
                    "ΔD_{n} = {}: D_{n} is unchanged by Ω1, Ω2 and ascending Ω3, so ≥1 descending Ω3-move is needed",
                    v2 - v1
                ));
            }
        }
    }
    r.min_omega3_moves = r.ascending_omega3 as usize + r.descending_omega3 as usize;
    if r.min_omega3_moves == 2 {
        r.reasons.push("hence ≥2 Ω3-moves".to_string());
    }
    let dwr = p2.writhe - p1.writhe;
    let dwi = p2.winding - p1.winding;
    r.min_omega1_moves = dwr.unsigned_abs().max(dwi.unsigned_abs());
    if r.min_omega1_moves > 0 {
        r.reasons.push(format!(
            "Δwrithe = {dwr}, Δwinding = {dwi}: each Ω1-move changes both by ±1, so ≥{} Ω1-moves are needed",
            r.min_omega1_moves
        ));
    }
    if dwr.abs() != dwi.abs() {
        r.two_omega1_classes = true;
        r.reasons.push(format!(
            "moves of classes Ω1ij and Ω1(-i)(-j) only change (winding, writhe) along ±(i, j); \
             (Δwinding, Δwrithe) = ({dwi}, {dwr}) needs Ω1ij and Ω1kl with (i,j) ≠ ±(k,l)"
        ));
    }
    r
}

/// `d_4` read against `a_4`: the two patterns are exchanged by reversing
/// the circle.
pub fn reversal_swaps_a_and_d(d: &GaussDiagram) -> bool {
    let r = reverse_orientation(d);
    a4(&r) == d4(d) && d4(&r) == a4(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{canonical_form, parse_gauss_code};

    fn p(s: &str) -> GaussDiagram {
        parse_gauss_code(s).unwrap()
    }

    #[test]
    fn w3_is_the_trefoil_word() {
        let w = builtin_pattern('w', 3).unwrap();
        assert_eq!(w.to_string(), "t1 h2 t3 h1 t2 h3");
        assert!(!w.has_isolated_arrow());
        let w5 = builtin_pattern('w', 5).unwrap();
        assert_eq!(w5.arrows(), 5);
        assert!(!w5.has_isolated_arrow());
        for (k, e) in w5.word().iter().enumerate() {
            let opposite = w5.word()[(k + 5) % 10];
            assert_eq!(opposite.arrow, e.arrow);
            assert_ne!(opposite.role, e.role);
        }
    }

    #[test]
    fn unsupported_patterns() {
        assert!(matches!(builtin_pattern('w', 4), Err(InvariantError::Unsupported { .. })));
        assert!(matches!(builtin_pattern('w', 1), Err(InvariantError::Unsupported { .. })));
        assert!(matches!(builtin_pattern('a', 5), Err(InvariantError::Unsupported { .. })));
        assert!(matches!(builtin_pattern('x', 4), Err(InvariantError::Unsupported { .. })));
    }

    #[test]
    fn a4_d4_are_reverses() {
        let a = builtin_pattern('a', 4).unwrap();
        let d = builtin_pattern('d', 4).unwrap();
        assert!(!a.has_isolated_arrow());
        assert_eq!(d.reversed(), a);
    }

    #[test]
    fn counts_on_small_diagrams() {
        let w = builtin_pattern('w', 3).unwrap();
        assert_eq!(count_pattern(&GaussDiagram::empty(), &w), 0);
        assert_eq!(count_pattern(&p("O1+U2+O3+U1+O2+U3+"), &w), 1);
        assert_eq!(count_pattern(&p("O1-U2-O3+U1-O2-U3+"), &w), 1);
        assert_eq!(count_pattern(&p("O1-U2+O3+U1-O2+U3+"), &w), -1);
        assert_eq!(count_pattern(&p("O1+U1+"), &w), 0);
    }

    #[test]
    fn pattern_parse_rejects_bad_words() {
        assert_eq!(ArrowPattern::parse("t1 t1"), Err(InvariantError::BadPattern));
        assert_eq!(ArrowPattern::parse("t1 h2"), Err(InvariantError::BadPattern));
        assert_eq!(ArrowPattern::parse("x1 h1"), Err(InvariantError::BadPattern));
    }

    #[test]
    fn llk_rejects_stale_context() {
        let d = p("O1+O2+U1+O3+U2+U3+");
        let site = MoveSite::R3 { top_mid: ArrowId(1), top_bot: ArrowId(2), mid_bot: ArrowId(3) };
        let ctx = omega3_context(&d, &site).unwrap();
        assert_eq!(llk(&d, &ctx), Ok(0));
        let other = p("O1+O2+U1+O3+U2+U3+O4+U4+");
        assert_eq!(llk(&other, &ctx), Err(InvariantError::StaleContext));
    }

    #[test]
    fn llk_counts_b_over_a() {
        // Triangle with arcs: a between top and middle, b between middle and
        // bottom. Arrow 4 runs from arc b to arc a.
        for s in ["+", "-"] {
            let code = format!("O1+O2+U4{s}U1+O3+O4{s}U2+U3+");
            let d = p(&code);
            let site = MoveSite::R3 { top_mid: ArrowId(1), top_bot: ArrowId(2), mid_bot: ArrowId(3) };
            let ctx = omega3_context(&d, &site).unwrap();
            let expected = if s == "+" { 1 } else { -1 };
            assert_eq!(llk(&d, &ctx).unwrap(), expected, "{code}");
        }
    }

    #[test]
    fn lower_bounds_identical_profiles_is_empty() {
        let s = DiagramState::new(p("O1+U2+O3-U4-O2+U1+O4-U3-"), 1);
        let pr = profile(&s, DEFAULT_N_MAX);
        assert!(move_lower_bounds(&pr, &pr).is_empty());
        assert_eq!(canonical_form(s.diagram()), canonical_form(s.diagram()));
    }
}
