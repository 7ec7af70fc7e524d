//! Randomized property suites over the fuzz corpus.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{self, instantiate, random_diagram};
use crate::gauss::{canonical_form, connected_sum, mirror, parse_gauss_code, reverse_orientation, serialize, writhe, Sign};
use crate::invariants::{a4, d4, w3, w3_jump_check, w5};
use crate::moves::{
    apply_move, classify, enumerate_insertion_sites, enumerate_removal_sites, inverse_site, sum_states, DiagramState,
    MoveClass, MoveSite,
};
use crate::rewriter::{rewrite_to_generating_set, GeneratingSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Prop3,
    Prop4,
    Prop5,
    Thm2,
    Roundtrip,
    Winding,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Prop3, Suite::Prop4, Suite::Prop5, Suite::Thm2, Suite::Roundtrip, Suite::Winding];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Prop3 => "prop3",
            Suite::Prop4 => "prop4",
            Suite::Prop5 => "prop5",
            Suite::Thm2 => "thm2",
            Suite::Roundtrip => "roundtrip",
            Suite::Winding => "winding",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Suite, String> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| format!("unknown suite '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub trials: usize,
    pub max_arrows: usize,
    pub seed: u64,
    pub classical: bool,
    /// Ω2 insertions sampled per diagram; `None` tries every one. All other
    /// moves are always tried.
    pub r2_samples: Option<usize>,
}

impl Default for VerifyConfig {
    fn default() -> VerifyConfig {
        VerifyConfig { trials: 1000, max_arrows: 8, seed: 1, classical: false, r2_samples: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub trials: usize,
    /// Individual checks made.
    pub checks: usize,
    /// Counterexamples as `code | site | detail`.
    pub violations: Vec<String>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl VerificationReport {
    fn new(suite: Suite, trials: usize) -> VerificationReport {
        VerificationReport { suite: suite.name().to_string(), trials, checks: 0, violations: Vec::new(), notes: Vec::new(), pass: true }
    }

    fn check(&mut self, ok: bool, counterexample: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(counterexample());
        }
    }

    fn finish(mut self) -> VerificationReport {
        self.pass = self.pass && self.violations.is_empty();
        self
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} ({} trials, {} checks, {} violations)",
            self.suite,
            if self.pass { "pass" } else { "FAIL" },
            self.trials,
            self.checks,
            self.violations.len()
        )?;
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        for v in self.violations.iter().take(20) {
            writeln!(f, "  violation: {v}")?;
        }
        Ok(())
    }
}

pub fn run(suite: Suite, cfg: &VerifyConfig) -> VerificationReport {
    match suite {
        Suite::Prop3 => prop3(cfg),
        Suite::Prop4 => prop4(cfg),
        Suite::Prop5 => prop5(cfg),
        Suite::Thm2 => thm2(cfg, GeneratingSet::Primary),
        Suite::Roundtrip => roundtrip(cfg),
        Suite::Winding => winding(cfg),
    }
}

fn fuzz_corpus(cfg: &VerifyConfig) -> Vec<DiagramState> {
    corpus::corpus(cfg.seed, cfg.trials, cfg.max_arrows, cfg.classical)
}

/// Every removal and Ω3 site, every Ω1 insertion and a sample of Ω2
/// insertions.
pub fn fuzz_moves<R: Rng>(rng: &mut R, state: &DiagramState, r2_samples: Option<usize>) -> Vec<MoveSite> {
    let d = state.diagram();
    let mut sites: Vec<MoveSite> = enumerate_removal_sites(d).into_iter().map(|(s, _)| s).collect();
    let (r1, r2): (Vec<MoveSite>, Vec<MoveSite>) =
        enumerate_insertion_sites(d).into_iter().partition(|s| matches!(s, MoveSite::R1Insert { .. }));
    sites.extend(r1);
    match r2_samples {
        Some(k) => sites.extend(r2.choose_multiple(rng, k).copied()),
        None => sites.extend(r2),
    }
    sites
}

fn cx(state: &DiagramState, site: &MoveSite, detail: String) -> String {
    format!("{} | {} | {}", state.diagram().raw_code(), site, detail)
}

fn prop4(cfg: &VerifyConfig) -> VerificationReport {
    let mut rep = VerificationReport::new(Suite::Prop4, cfg.trials);
    let mut r = corpus::rng(cfg.seed ^ 0x9e37);
    for state in fuzz_corpus(cfg) {
        let d = state.diagram();
        let before = (a4(d), d4(d), w3(d), w5(d));
        for site in fuzz_moves(&mut r, &state, cfg.r2_samples) {
            let class = classify(&site, d).expect("enumerated site").class;
            let after_state = apply_move(&state, &site).expect("enumerated site");
            let e = after_state.diagram();
            let after = (a4(e), d4(e), w3(e), w5(e));
            let detail = || format!("{class}: (A4,D4,W3,W5) {before:?} -> {after:?}");
            match class {
                MoveClass::R3 { m, .. } => {
                    if m == Sign::Plus {
                        rep.check(before.0 == after.0, || cx(&state, &site, detail()));
                    } else {
                        rep.check(before.1 == after.1, || cx(&state, &site, detail()));
                    }
                }
                _ => rep.check(before == after, || cx(&state, &site, detail())),
            }
        }
    }
    rep.finish()
}

fn prop5(cfg: &VerifyConfig) -> VerificationReport {
    let mut rep = VerificationReport::new(Suite::Prop5, cfg.trials);
    let mut jumps = 0usize;
    let mut first_jump = None;
    for state in fuzz_corpus(cfg) {
        for (site, _) in enumerate_removal_sites(state.diagram()) {
            if !matches!(site, MoveSite::R3 { .. }) {
                continue;
            }
            let j = w3_jump_check(&state, &site).expect("enumerated site");
            if j.llk != 0 {
                jumps += 1;
                first_jump.get_or_insert_with(|| cx(&state, &site, format!("llk {} dW3 {}", j.llk, j.actual)));
            }
            rep.check(j.predicted == j.actual, || {
                cx(&state, &site, format!("predicted {} actual {} (llk {}, direction {})", j.predicted, j.actual, j.llk, j.direction))
            });
        }
    }
    rep.notes.push(format!("{jumps} Ω3 applications with llk != 0"));
    if let Some(example) = first_jump {
        rep.notes.push(format!("example jump: {example}"));
    } else {
        rep.pass = false;
        rep.notes.push("no Ω3 application with llk != 0 was seen".into());
    }
    rep.finish()
}

fn prop3(cfg: &VerifyConfig) -> VerificationReport {
    let mut rep = VerificationReport::new(Suite::Prop3, cfg.trials);
    let mut r = corpus::rng(cfg.seed ^ 0x3);
    let states = fuzz_corpus(cfg);
    for (k, state) in states.iter().enumerate() {
        let d = state.diagram();
        let m = mirror(d);
        let v = reverse_orientation(d);
        let code = serialize(d);
        let mut eq = |name: &str, lhs: i64, rhs: i64| {
            rep.check(lhs == rhs, || format!("{code} | {name}: {lhs} != {rhs}"));
        };
        eq("A4(mirror) = A4", a4(&m), a4(d));
        eq("D4(mirror) = D4", d4(&m), d4(d));
        eq("W3(mirror) = -W3", w3(&m), -w3(d));
        eq("W5(mirror) = -W5", w5(&m), -w5(d));
        eq("A4(reverse) = D4", a4(&v), d4(d));
        eq("D4(reverse) = A4", d4(&v), a4(d));
        eq("W3(reverse) = W3", w3(&v), w3(d));
        eq("W5(reverse) = W5", w5(&v), w5(d));
        eq("writhe(mirror) = -writhe", writhe(&m), -writhe(d));
        eq("writhe(reverse) = writhe", writhe(&v), writhe(d));

        let other = states[(k * 7 + 3) % states.len()].diagram();
        if d.len() + other.len() > cfg.max_arrows.max(8) {
            continue;
        }
        let cut1 = r.gen_range(0..d.gap_count());
        let cut2 = r.gen_range(0..other.gap_count());
        let s = connected_sum(d, cut1, other, cut2).expect("gaps in range");
        let sum_code = format!("{} # {} at {cut1},{cut2}", code, serialize(other));
        for (name, f) in [("A4", a4 as fn(&_) -> i64), ("D4", d4), ("W3", w3), ("writhe", writhe)] {
            let (lhs, rhs) = (f(&s), f(d) + f(other));
            rep.check(lhs == rhs, || format!("{sum_code} | {name} not additive: {lhs} != {rhs}"));
        }
    }
    rep.finish()
}

fn roundtrip(cfg: &VerifyConfig) -> VerificationReport {
    let mut rep = VerificationReport::new(Suite::Roundtrip, cfg.trials);
    let mut r = corpus::rng(cfg.seed ^ 0x77);
    for state in fuzz_corpus(cfg) {
        let d = state.diagram();
        let code = serialize(d);
        let back = parse_gauss_code(&code).map(|e| canonical_form(&e));
        rep.check(back.as_ref() == Ok(&canonical_form(d)), || format!("{code} | serialize/parse"));
        for site in fuzz_moves(&mut r, &state, cfg.r2_samples) {
            let text = site.to_string();
            rep.check(text.parse::<MoveSite>().as_ref() == Ok(&site), || cx(&state, &site, "site syntax".into()));
            let after = apply_move(&state, &site).expect("enumerated site");
            let undo = inverse_site(d, &site, after.diagram()).expect("inverse exists");
            let back = apply_move(&after, &undo).expect("inverse applies");
            rep.check(
                canonical_form(back.diagram()) == canonical_form(d) && back.winding() == state.winding(),
                || cx(&state, &site, format!("undo via {undo} gives {}", serialize(back.diagram()))),
            );
        }
    }
    rep.finish()
}

/// Winding bookkeeping: the connected-sum rule for both cut styles, Ω1
/// jumps by its first index and Ω2/Ω3 leave the winding alone.
fn winding(cfg: &VerifyConfig) -> VerificationReport {
    let mut rep = VerificationReport::new(Suite::Winding, cfg.trials);
    let mut r = corpus::rng(cfg.seed ^ 0x5);
    let states = fuzz_corpus(cfg);
    for pair in states.chunks(2).filter(|p| p.len() == 2) {
        let (s1, s2) = (&pair[0], &pair[1]);
        for cut in Sign::BOTH {
            let g1 = r.gen_range(0..s1.diagram().gap_count());
            let g2 = r.gen_range(0..s2.diagram().gap_count());
            let s = sum_states(s1, cut, s2, g1, g2).expect("gaps in range");
            let want = s1.winding() + s2.winding() - cut.to_i32() as i64;
            rep.check(s.winding() == want, || {
                format!("{} # {} cut {cut} | winding {} != {want}", serialize(s1.diagram()), serialize(s2.diagram()), s.winding())
            });
        }
    }
    for state in &states {
        for site in fuzz_moves(&mut r, state, cfg.r2_samples) {
            let dc = classify(&site, state.diagram()).expect("enumerated site");
            let after = apply_move(state, &site).expect("enumerated site");
            let want = match dc.class {
                MoveClass::R1 { i, .. } => (dc.direction * i).to_i32() as i64,
                _ => 0,
            };
            let got = after.winding() - state.winding();
            rep.check(got == want, || cx(state, &site, format!("{} changes winding by {got}, expected {want}", dc.class)));
        }
    }
    rep.finish()
}

/// Every class in both directions on random hosts, rewritten into the
/// generating set and replayed against the direct move.
pub fn thm2(cfg: &VerifyConfig, set: GeneratingSet) -> VerificationReport {
    let mut rep = VerificationReport::new(Suite::Thm2, cfg.trials);
    let mut r = corpus::rng(cfg.seed ^ 0x2);
    let hosts_per_class = (cfg.trials / 48).max(10);
    let allowed = set.classes();
    let host_arrows = cfg.max_arrows.saturating_sub(3).min(5);
    let mut longest = 0;
    for class in MoveClass::all() {
        for direction in Sign::BOTH {
            for _ in 0..hosts_per_class {
                let n = r.gen_range(0..=host_arrows);
                let base = random_diagram(&mut r, n);
                let (d, site) = instantiate(&mut r, &base, class, direction);
                let state = DiagramState::new(d, r.gen_range(-2..=2));
                let direct = apply_move(&state, &site).expect("instantiated site");
                let label = || format!("{class} dir {direction}");
                match rewrite_to_generating_set(&state, &site, set) {
                    Err(e) => rep.check(false, || cx(&state, &site, format!("{}: rewrite failed: {e}", label()))),
                    Ok(seq) => {
                        longest = longest.max(seq.len());
                        let impure: Vec<String> = seq
                            .steps()
                            .iter()
                            .filter(|(_, c)| !allowed.contains(&c.class))
                            .map(|(_, c)| c.class.to_string())
                            .collect();
                        rep.check(impure.is_empty(), || cx(&state, &site, format!("{}: emitted {impure:?}", label())));
                        match seq.replay(&state) {
                            Ok(end) => rep.check(
                                canonical_form(end.diagram()) == canonical_form(direct.diagram())
                                    && end.winding() == direct.winding(),
                                || cx(&state, &site, format!("{}: ends at {} w={}", label(), serialize(end.diagram()), end.winding())),
                            ),
                            Err(e) => rep.check(false, || cx(&state, &site, format!("{}: replay failed: {e}", label()))),
                        }
                    }
                }
            }
        }
    }
    rep.notes.push(format!("{hosts_per_class} hosts per directed class; longest expansion {longest} steps"));
    rep.finish()
}
