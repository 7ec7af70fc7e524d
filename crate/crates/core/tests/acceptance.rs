//! Acceptance run: one line per criterion, nonzero exit if any fails.

mod common;

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gaussmoves::corpus::corpus;
use gaussmoves::demo::{figure_eight, reverse_state, thm3, FIGURE_EIGHT, TREFOIL};
use gaussmoves::invariants::{a4, all_patterns, builtin_pattern, count_pattern, d4, w3};
use gaussmoves::realizability::genus;
use gaussmoves::rewriter::{conjugate_r3, GeneratingSet, IndexTriple, Wedge};
use gaussmoves::verify::{self, Suite, VerifyConfig};
use gaussmoves::{mirror, parse_gauss_code, reverse_orientation, writhe, DiagramState, GaussDiagram, MoveClass};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn acceptance_config() -> VerifyConfig {
    VerifyConfig { trials: 1000, max_arrows: 8, seed: 20_240_601, classical: false, r2_samples: None }
}

fn suite(s: Suite, cfg: &VerifyConfig) -> Outcome {
    let rep = verify::run(s, cfg);
    let mut detail = format!("{} trials, {} checks, {} violations", rep.trials, rep.checks, rep.violations.len());
    for n in &rep.notes {
        detail += &format!("; {n}");
    }
    if let Some(v) = rep.violations.first() {
        detail += &format!("; first: {v}");
    }
    outcome(rep.pass && rep.violations.is_empty(), detail)
}

fn figure_eight_certificate() -> Outcome {
    let Some(f) = figure_eight() else {
        return outcome(false, "no member of {F, mirror, reverse, both} passes");
    };
    let r = reverse_orientation(&f);
    let got = (a4(&f), d4(&f), a4(&r), d4(&r));
    let transcribed = f == parse_gauss_code(FIGURE_EIGHT).unwrap();
    outcome(
        got == (1, 0, 0, 1),
        format!("(A4 F, D4 F, A4 rev F, D4 rev F) = {got:?}, transcribed F used: {transcribed}"),
    )
}

fn prop4() -> Outcome {
    suite(Suite::Prop4, &acceptance_config())
}

fn prop5() -> Outcome {
    suite(Suite::Prop5, &acceptance_config())
}

fn prop3() -> Outcome {
    suite(Suite::Prop3, &VerifyConfig { trials: 100, ..acceptance_config() })
}

fn winding() -> Outcome {
    // 200 states give 100 pairs for the sum rule; the move checks cover
    // the full corpus below.
    let pairs = suite(Suite::Winding, &VerifyConfig { trials: 200, ..acceptance_config() });
    let moves = suite(Suite::Winding, &acceptance_config());
    outcome(pairs.pass && moves.pass, format!("100 pairs: {}; corpus: {}", pairs.detail, moves.detail))
}

fn theorem2() -> Outcome {
    let rep = verify::thm2(&VerifyConfig { trials: 480, ..acceptance_config() }, GeneratingSet::Primary);
    let all = IndexTriple::all();
    let mut reached = HashSet::new();
    let mut closure_ok = all.len() == 8;
    for a in &all {
        for b in &all {
            let path = conjugate_r3(*a, *b);
            let end = path.iter().fold(*a, |t, w: &Wedge| w.apply(t));
            closure_ok &= end == *b;
            reached.insert(end);
        }
    }
    closure_ok &= reached.len() == 8;
    let classes = MoveClass::all().len();
    outcome(
        rep.pass && closure_ok && classes == 24,
        format!(
            "{classes} classes, {} checks, {} violations, conjugation closure over {} triples: {closure_ok}; {}",
            rep.checks,
            rep.violations.len(),
            reached.len(),
            rep.notes.join("; ")
        ),
    )
}

fn derived_values() -> Outcome {
    let t = parse_gauss_code(TREFOIL).unwrap();
    let f = parse_gauss_code(FIGURE_EIGHT).unwrap();
    let w = common::w3_pattern();
    let values = (w3(&t), common::naive_count(&t, &w), w3(&f), common::naive_count(&f, &w));
    let mut patterns = vec![
        builtin_pattern('a', 4).unwrap(),
        builtin_pattern('d', 4).unwrap(),
        builtin_pattern('w', 3).unwrap(),
        builtin_pattern('w', 5).unwrap(),
    ];
    patterns.extend(all_patterns(2));
    patterns.extend(all_patterns(3));
    let diagrams: Vec<GaussDiagram> =
        corpus(acceptance_config().seed, 1000, 8, false).into_iter().map(|s| s.into_diagram()).collect();
    let mut mismatches = 0;
    let mut compared = 0;
    for d in diagrams.iter().filter(|d| d.len() <= 8) {
        for p in &patterns {
            compared += 1;
            if count_pattern(d, p) != common::naive_count(d, p) {
                mismatches += 1;
            }
        }
    }
    outcome(
        values == (1, 1, 0, 0) && mismatches == 0,
        format!(
            "W3(T) = {} (oracle {}), W3(F) = {} (oracle {}); {compared} pattern counts, {mismatches} mismatches",
            values.0, values.1, values.2, values.3
        ),
    )
}

fn realizability() -> Outcome {
    let f = parse_gauss_code(FIGURE_EIGHT).unwrap();
    let t = parse_gauss_code(TREFOIL).unwrap();
    let mut flips = Vec::new();
    for a in f.arrows() {
        let mut signs = f.signs().clone();
        let s = signs[&a];
        signs.insert(a, -s);
        let g = GaussDiagram::new(f.word().to_vec(), signs).unwrap();
        flips.push((a, genus(&g)));
    }
    let nonplanar: Vec<String> = flips.iter().filter(|(_, g)| *g > 0).map(|(a, g)| format!("flip {a}: genus {g}")).collect();
    outcome(
        genus(&f) == 0 && genus(&t) == 0 && !nonplanar.is_empty(),
        format!("genus(F) = {}, genus(T) = {}; {}", genus(&f), genus(&t), nonplanar.join(", ")),
    )
}

fn theorem3() -> Outcome {
    let f = DiagramState::new(parse_gauss_code(FIGURE_EIGHT).unwrap(), 0);
    let Some(c) = thm3(&f) else {
        return outcome(false, "search found no unknot diagram with the target signature");
    };
    let a = c.search.a.diagram();
    let a_sig = (a4(a), d4(a), writhe(a), c.search.a.winding());
    let inv = reverse_state(&c.search.a);
    let inv_sig = (a4(inv.diagram()), d4(inv.diagram()), inv.writhe(), inv.winding());
    let replayed = c.search.moves.replay(&DiagramState::new(GaussDiagram::empty(), c.search.start_winding));
    let replay_ok = replayed.as_ref().map(|s| s == &c.search.a).unwrap_or(false);
    let k = c.k.diagram();
    let k_sig = (a4(k), d4(k), writhe(k), c.k.winding());
    let want_k = (a4(f.diagram()) - 1, d4(f.diagram()) - 1, writhe(f.diagram()) - 2, f.winding());
    let mirror_ok = a4(&mirror(a)) == a4(a);
    outcome(
        a_sig == (0, -1, -1, 0) && replay_ok && k_sig == want_k && k_sig == (0, -1, -2, 0) && mirror_ok,
        format!(
            "a = {} ({} moves from winding {:+}, replays: {replay_ok}) has {a_sig:?}; reverse a has {inv_sig:?}; k has {k_sig:?}",
            a.raw_code(),
            c.search.moves.len(),
            c.search.start_winding
        ),
    )
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("figure-eight certificate", Duration::from_secs(1), figure_eight_certificate),
        ("A4/D4/W3/W5 invariance fuzz", Duration::from_secs(60), prop4),
        ("W3 jump equals direction times llk", Duration::from_secs(60), prop5),
        ("mirror, reverse and sum identities", Duration::from_secs(60), prop3),
        ("winding bookkeeping", Duration::from_secs(60), winding),
        ("rewriting into the generating set", Duration::from_secs(60), theorem2),
        ("derived values and counting oracle", Duration::from_secs(60), derived_values),
        ("realizability", Duration::from_secs(60), realizability),
        ("unknot search and diagram sum", Duration::from_secs(120), theorem3),
    ];
    let mut failed = 0;
    for (n, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let took = start.elapsed();
        let pass = o.pass && took <= *limit;
        failed += usize::from(!pass);
        println!(
            "criterion {} [{name}]: {} in {:.2}s (limit {}s): {}",
            n + 1,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            limit.as_secs(),
            o.detail
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
