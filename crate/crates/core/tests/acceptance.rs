//! The eight acceptance criteria, one PASS/FAIL line each.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use archrefine::behavior::{denote, extract_strategy, Behavior, Bounds, ChannelSet, Counterexample, Outcome};
use archrefine::calculus::{
    apply_step, digest, CheckConfig, Mode, PremiseCode, RenameKind, Rule, RuleApplication, StepError,
};
use archrefine::fixtures::{random_application, random_system, random_table};
use archrefine::model::{Component, System};
use archrefine::scriptio::{corpus, parse_architecture, parse_script, run_script, ScriptDocument, StepOutcome};
use archrefine::semantics::{black_box, black_box_oracle, invariant_valid, DenotationTable, Invariant};
use archrefine::streams::{ch, chans, Alphabet, ChannelId, NamedStreamTuple, TupleSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

const H: usize = 3;
const B: usize = 1;

fn bounds(s: &System) -> Bounds {
    s.bounds(H, B)
}

fn cfg() -> CheckConfig {
    CheckConfig::new(H, B, Mode::StructuralFirst)
}

/// `producer -> reader` per channel, with `ENV` for the environment.
fn adjacency(s: &System) -> BTreeSet<(String, String, String)> {
    let mut out = BTreeSet::new();
    for c in s.channels() {
        let from = s.producer(&c).map(|p| p.name().to_string()).unwrap_or_else(|| "ENV".into());
        for r in s.readers(&c) {
            out.insert((from.clone(), r.name().to_string(), c.to_string()));
        }
        if s.outputs.contains(&c) {
            out.insert((from, "ENV".into(), c.to_string()));
        }
    }
    out
}

fn edges(list: &[(&str, &str, &str)]) -> BTreeSet<(String, String, String)> {
    list.iter().map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string())).collect()
}

fn company() -> Check {
    let t0 = Instant::now();
    let start = parse_architecture(corpus::COMPANY_FIG1).map_err(|e| e.to_string())?;
    if start.components.len() != 3 || start.channels().len() != 8 || !start.channels().contains(&ch("ordpay'")) {
        return Err("initial architecture does not have 3 components and 8 channels".into());
    }
    let doc = parse_script(corpus::COMPANY_SCRIPT).map_err(|e| e.to_string())?;
    let report = run_script(&start, &doc, &cfg(), &corpus::loader);
    let rules: Vec<Rule> = report.steps.iter().map(|s| s.rule).collect();
    use Rule::*;
    let expected = [
        AddComponentBasic,
        AddInput,
        AddInput,
        AddOutput,
        AddInput,
        RefineWithInvariant,
        RefineWithInvariant,
        RemoveInput,
        RemoveInput,
    ];
    if rules != expected {
        return Err(format!("rule sequence {rules:?}"));
    }
    for s in &report.steps {
        match &s.outcome {
            StepOutcome::Applied(r) if r.premises.iter().all(|p| p.passed()) => {}
            other => return Err(format!("step at line {} not applied: {other:?}", s.line)),
        }
    }
    let target = edges(&[
        ("ENV", "Production", "material"),
        ("ENV", "Sales", "ordpay"),
        ("Production", "ENV", "goods"),
        ("Production", "Sales", "progress"),
        ("Production", "Accounting", "progress"),
        ("Sales", "ENV", "custinf"),
        ("Sales", "Accounting", "ordpay'"),
        ("Accounting", "Management", "reports"),
        ("Management", "Production", "sched"),
        ("Management", "Sales", "pricing"),
    ]);
    if adjacency(&report.system) != target {
        return Err(format!("final adjacency {:?}", adjacency(&report.system)));
    }
    let fig2d = parse_architecture(corpus::COMPANY_FIG2D).map_err(|e| e.to_string())?;
    if report.system != fig2d {
        return Err("final system differs from the target architecture".into());
    }
    // Refinement checked on the independent oracle tables.
    let b = bounds(&start);
    let old = black_box_oracle(&start, b).map_err(|e| e.to_string())?;
    let new = black_box_oracle(&report.system, b).map_err(|e| e.to_string())?;
    let inputs = old.len();
    if let Some((i, _)) = new.entries.iter().find(|(i, outs)| !outs.is_subset(&old.entries[*i])) {
        return Err(format!("refinement fails for {}", start.alphabet.render_tuple(i)));
    }
    let secs = t0.elapsed().as_secs_f64();
    if secs >= 60.0 {
        return Err(format!("took {secs:.1}s"));
    }
    Ok(format!("9 steps applied, adjacency matches, refinement holds on {inputs} inputs in {secs:.1}s"))
}

/// The oracle table of `old` with channels renamed as `step` does.
fn expected_table(old: &DenotationTable, step: &RuleApplication) -> DenotationTable {
    let map: BTreeMap<ChannelId, ChannelId> = match step {
        RuleApplication::Rename { kind: RenameKind::Channel, pairs } => {
            pairs.iter().map(|(a, b)| (ch(a), ch(b))).collect()
        }
        _ => return old.clone(),
    };
    DenotationTable {
        bounds: old.bounds,
        entries: old
            .entries
            .iter()
            .map(|(i, outs)| (i.renamed(&map), outs.iter().map(|o| o.renamed(&map)).collect()))
            .collect(),
    }
}

struct Sweep {
    successes: BTreeMap<Rule, usize>,
    refine_violations: Vec<String>,
    equality_violations: Vec<String>,
}

fn sweep() -> Sweep {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut out = Sweep { successes: BTreeMap::new(), refine_violations: Vec::new(), equality_violations: Vec::new() };
    for rule in Rule::ALL {
        let mut tries = 0;
        while out.successes.get(&rule).copied().unwrap_or(0) < 20 && tries < 2000 {
            tries += 1;
            let symbols = rng.gen_range(1..=2);
            let s = random_system(&mut rng, symbols);
            let Some(step) = random_application(&mut rng, &s, rule) else { continue };
            let Ok((next, _)) = apply_step(&s, &step, &cfg()) else { continue };
            *out.successes.entry(rule).or_default() += 1;
            let old = expected_table(&black_box_oracle(&s, bounds(&s)).expect("consistent"), &step);
            let new = black_box_oracle(&next, bounds(&s)).expect("result is consistent");
            let refines = new.entries.iter().all(|(i, o)| old.get(i).is_some_and(|p| o.is_subset(p)));
            if !refines {
                out.refine_violations.push(format!("{rule}: {step:?}"));
            }
            if rule.preserves_behavior() && old != new {
                out.equality_violations.push(format!("{rule}: {step:?}"));
            }
        }
    }
    out
}

fn soundness(sw: &Sweep) -> Check {
    let short: Vec<String> =
        Rule::ALL.iter().filter(|r| sw.successes.get(r).copied().unwrap_or(0) < 20).map(|r| r.to_string()).collect();
    if !short.is_empty() {
        return Err(format!("fewer than 20 successful applications for {}", short.join(", ")));
    }
    if !sw.refine_violations.is_empty() {
        return Err(format!("{} violations, first: {}", sw.refine_violations.len(), sw.refine_violations[0]));
    }
    let total: usize = sw.successes.values().sum();
    Ok(format!("{total} successful applications over 12 rules, 0 violations"))
}

fn equality(sw: &Sweep) -> Check {
    if !sw.equality_violations.is_empty() {
        return Err(format!("{} violations, first: {}", sw.equality_violations.len(), sw.equality_violations[0]));
    }
    let n: usize = sw.successes.iter().filter(|(r, _)| r.preserves_behavior()).map(|(_, n)| n).sum();
    Ok(format!("{n} applications of the ten equality rules keep the denotation"))
}

fn oracle_agreement() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut inputs = 0;
    for k in 0..60 {
        let symbols = rng.gen_range(1..=2);
        let s = random_system(&mut rng, symbols);
        let horizon = rng.gen_range(1..=H);
        let b = s.bounds(horizon, B);
        let oracle = black_box_oracle(&s, b).map_err(|e| e.to_string())?;
        let bb = black_box(&s).map_err(|e| e.to_string())?;
        for (i, expected) in &oracle.entries {
            let got = denote(&bb, i, horizon).map_err(|e| e.to_string())?;
            if &got != expected {
                return Err(format!("system {k} differs on {}", s.alphabet.render_tuple(i)));
            }
            inputs += 1;
        }
    }
    Ok(format!("60 random systems, {inputs} inputs, exact agreement"))
}

fn pipeline() -> System {
    System::new(
        "Pipe",
        Alphabet::letters(1),
        chans(&["p"]),
        chans(&["r"]),
        vec![
            Component::new("A", Behavior::copy(&[(ch("p"), ch("q"))]).unwrap()),
            Component::new("B", Behavior::copy(&[(ch("q"), ch("r"))]).unwrap()),
        ],
    )
}

fn sub(inputs: &[&str], outputs: &[&str], comps: Vec<Component>) -> Option<Arc<System>> {
    Some(Arc::new(System::new("T", Alphabet::letters(1), chans(inputs), chans(outputs), comps)))
}

fn copy(a: &str, b: &str) -> Behavior {
    Behavior::copy(&[(ch(a), ch(b))]).unwrap()
}

fn set(names: &[&str]) -> ChannelSet {
    chans(names)
}

fn negative_cases() -> Vec<(Rule, PremiseCode, System, RuleApplication)> {
    use PremiseCode as P;
    use RuleApplication as A;
    let s = pipeline();
    let chaos = Behavior::chaos(set(&["p"]), set(&["q"]), 1, 1);
    let comp = |n: &str, b: Behavior| Component::new(n, b);
    let mut inconsistent = pipeline();
    inconsistent.outputs.insert(ch("zz"));
    let c = |s: &str| s.to_string();
    let fold = |members: &[&str], i: &[&str], o: &[&str], name: &str| A::Fold {
        name: c(name),
        members: members.iter().map(|m| c(m)).collect(),
        inputs: set(i),
        outputs: set(o),
    };
    let rwi = |component: &str, behavior: Behavior, invariant: Invariant| A::RefineWithInvariant {
        component: c(component),
        behavior,
        invariant,
    };
    let rename = |a: &str, b: &str| A::Rename { kind: RenameKind::Channel, pairs: vec![(c(a), c(b))] };
    let mut v = vec![
        (P::UnknownComponent, A::RefineBehavior { component: c("X"), behavior: copy("p", "q") }),
        (P::SignatureMismatch, A::RefineBehavior { component: c("A"), behavior: copy("p", "z") }),
        (P::BehaviorNotRefined, A::RefineBehavior { component: c("A"), behavior: chaos.clone() }),
        (P::UnknownComponent, A::AddOutput { component: c("X"), channel: ch("n"), bound: None }),
        (P::OutputNotFresh, A::AddOutput { component: c("A"), channel: ch("q"), bound: None }),
        (P::UnknownComponent, A::RemoveOutput { component: c("X"), channel: ch("q") }),
        (P::UnknownChannel, A::RemoveOutput { component: c("A"), channel: ch("r") }),
        (P::OutputInSystemInterface, A::RemoveOutput { component: c("B"), channel: ch("r") }),
        (P::OutputStillRead, A::RemoveOutput { component: c("A"), channel: ch("q") }),
        (P::UnknownComponent, A::AddInput { component: c("X"), channel: ch("p") }),
        (P::InputDangling, A::AddInput { component: c("A"), channel: ch("zz") }),
        (P::InputAlreadyPresent, A::AddInput { component: c("A"), channel: ch("p") }),
        (P::UnknownComponent, A::RemoveInput { component: c("X"), channel: ch("p") }),
        (P::UnknownChannel, A::RemoveInput { component: c("A"), channel: ch("q") }),
        (P::InputDependence, A::RemoveInput { component: c("A"), channel: ch("p") }),
        (P::DuplicateName, A::AddComponentBasic { name: c("A") }),
        (
            P::DuplicateName,
            A::AddComponent { name: c("A"), inputs: set(&[]), outputs: set(&[]), behavior: Behavior::unit() },
        ),
        (
            P::SignatureMismatch,
            A::AddComponent { name: c("N"), inputs: set(&["p"]), outputs: set(&[]), behavior: copy("p", "z") },
        ),
        (
            P::OutputsNotFresh,
            A::AddComponent { name: c("N"), inputs: set(&["p"]), outputs: set(&["q"]), behavior: copy("p", "q") },
        ),
        (
            P::InputsDangling,
            A::AddComponent {
                name: c("N"),
                inputs: set(&["zz"]),
                outputs: set(&[]),
                behavior: Behavior::silent(set(&["zz"]), set(&[])),
            },
        ),
        (P::UnknownComponent, A::RemoveComponent { name: c("X") }),
        (P::ComponentHasOutputs, A::RemoveComponent { name: c("A") }),
        (
            P::UnknownComponent,
            A::Expand { component: c("X"), subsystem: sub(&["p"], &["q"], vec![comp("X1", copy("p", "q"))]) },
        ),
        (P::NoSubsystem, A::Expand { component: c("A"), subsystem: None }),
        (
            P::SubsystemInconsistent,
            A::Expand { component: c("A"), subsystem: sub(&["p"], &["q"], vec![comp("X1", copy("p", "w"))]) },
        ),
        (
            P::InterfaceMismatch,
            A::Expand { component: c("A"), subsystem: sub(&["p"], &["w"], vec![comp("X1", copy("p", "w"))]) },
        ),
        (
            P::SubsystemWritesSystemInput,
            A::Expand {
                component: c("B"),
                subsystem: sub(&["q"], &["r"], vec![comp("X1", copy("q", "p")), comp("X2", copy("p", "r"))]),
            },
        ),
        (
            P::InternalChannelClash,
            A::Expand {
                component: c("A"),
                subsystem: sub(&["p"], &["q"], vec![comp("X1", copy("p", "r")), comp("X2", copy("r", "q"))]),
            },
        ),
        (
            P::ComponentNameClash,
            A::Expand { component: c("A"), subsystem: sub(&["p"], &["q"], vec![comp("B", copy("p", "q"))]) },
        ),
        (
            P::BehaviorNotCertified,
            A::Expand {
                component: c("A"),
                subsystem: sub(&["p"], &["q"], vec![comp("X1", Behavior::silent(set(&["p"]), set(&["q"])))]),
            },
        ),
        (P::UnknownComponent, fold(&["X"], &["p"], &["q"], "F")),
        (P::FoldInputsTooSmall, fold(&["A", "B"], &[], &["r"], "F")),
        (P::FoldInputsNotAvailable, fold(&["A"], &["p", "zz"], &["q"], "F")),
        (P::FoldOutputsTooSmall, fold(&["A"], &["p"], &[], "F")),
        (P::FoldOutputsNotProduced, fold(&["A"], &["p"], &["q", "r"], "F")),
        (P::DuplicateName, fold(&["A"], &["p"], &["q"], "B")),
        (P::SubsystemInconsistent, fold(&["A", "B"], &["p", "q"], &["r"], "F")),
        (P::UnknownComponent, rwi("X", copy("p", "q"), Invariant::truth())),
        (P::SignatureMismatch, rwi("A", copy("p", "z"), Invariant::truth())),
        (P::InvariantReference, rwi("A", copy("p", "q"), Invariant::silent("quiet", ch("zz")))),
        (P::InvariantInvalid, rwi("A", copy("p", "q"), Invariant::silent("quiet", ch("q")))),
        (P::ConditionalRefinementFails, rwi("A", chaos, Invariant::truth())),
        (P::InvalidIdentifier, rename("p", "9x")),
        (P::UnknownId, rename("zz", "w")),
        (P::IdClash, rename("p", "q")),
    ]
    .into_iter()
    .map(|(code, app)| (app.rule(), code, s.clone(), app))
    .collect::<Vec<_>>();
    v.push((Rule::AddComponentBasic, P::InputInconsistent, inconsistent, A::AddComponentBasic { name: c("N") }));
    v
}

fn negative_suite() -> Check {
    let cases = negative_cases();
    let mut modes = 0;
    for (rule, code, s, app) in &cases {
        for mode in [Mode::StructuralFirst, Mode::Enumerative] {
            let before = digest(s);
            let snapshot = s.clone();
            match apply_step(s, app, &CheckConfig::new(H, B, mode)) {
                Err(StepError { code: got, digest: d, rule: r, .. }) if got == *code && r == *rule => {
                    if d != before || digest(s) != before || *s != snapshot {
                        return Err(format!("{rule}/{code}: digest changed"));
                    }
                }
                Err(e) => return Err(format!("{rule}/{code} ({mode}): got {}", e.code)),
                Ok(_) => return Err(format!("{rule}/{code} ({mode}): accepted")),
            }
            modes += 1;
        }
    }
    let rules: BTreeSet<Rule> = cases.iter().map(|c| c.0).collect();
    let pairs: BTreeSet<(Rule, PremiseCode)> = cases.iter().map(|c| (c.0, c.1)).collect();
    if rules.len() != 12 {
        return Err("some rule has no negative fixture".into());
    }
    Ok(format!("{} rule/premise pairs rejected with matching codes in {modes} runs, digests unchanged", pairs.len()))
}

fn invariants() -> Check {
    let start = parse_architecture(corpus::COMPANY_FIG1).map_err(|e| e.to_string())?;
    let full = parse_script(corpus::COMPANY_SCRIPT).map_err(|e| e.to_string())?;
    let partial = ScriptDocument { steps: full.steps[..6].to_vec(), ..full.clone() };
    let report = run_script(&start, &partial, &cfg(), &corpus::loader);
    let fig2c = report.system;
    if report.steps.len() != 6 || fig2c.component("Accounting").is_none() {
        return Err("could not reach the intermediate architecture".into());
    }
    let b = fig2c.bounds(4, B);
    let psi = Invariant::summarizes("summary", ch("reports"), ch("ordpay'"), ch("progress"), 1);
    let v = invariant_valid(&fig2c, &psi, b).map_err(|e| e.to_string())?;
    if v.outcome != Outcome::HoldsUpToBound {
        return Err(format!("invariant rejected: {v:?}"));
    }
    let wrong = Invariant::summarizes("summary0", ch("reports"), ch("ordpay'"), ch("progress"), 0);
    let w = invariant_valid(&fig2c, &wrong, b).map_err(|e| e.to_string())?;
    let witness = match &w.counterexample {
        Some(Counterexample::Valuation { tuple }) if !wrong.holds_on(tuple) => fig2c.alphabet.render_tuple(tuple),
        _ => return Err(format!("falsified variant not rejected with a witness: {w:?}")),
    };
    Ok(format!("valid at H=4; delay-0 variant refuted by {}", truncate(&witness, 60)))
}

fn truncate(s: &str, n: usize) -> String {
    if s.chars().count() <= n {
        s.to_string()
    } else {
        format!("{}...", s.chars().take(n).collect::<String>())
    }
}

fn complementarity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pairs = [
        (Rule::AddOutput, Rule::RemoveOutput),
        (Rule::AddInput, Rule::RemoveInput),
        (Rule::AddComponentBasic, Rule::RemoveComponent),
        (Rule::Fold, Rule::Expand),
    ];
    for (there, _) in pairs {
        let mut done = 0;
        let mut tries = 0;
        while done < 20 {
            tries += 1;
            if tries > 2000 {
                return Err(format!("too few fixtures for {there}"));
            }
            let s = random_system(&mut rng, 2);
            let Some(step) = random_application(&mut rng, &s, there) else { continue };
            let Ok((mid, _)) = apply_step(&s, &step, &cfg()) else { continue };
            let back = match &step {
                RuleApplication::AddOutput { component, channel, .. } => {
                    RuleApplication::RemoveOutput { component: component.clone(), channel: channel.clone() }
                }
                RuleApplication::AddInput { component, channel } => {
                    RuleApplication::RemoveInput { component: component.clone(), channel: channel.clone() }
                }
                RuleApplication::AddComponentBasic { name } => RuleApplication::RemoveComponent { name: name.clone() },
                RuleApplication::Fold { name, .. } => RuleApplication::Expand { component: name.clone(), subsystem: None },
                _ => unreachable!(),
            };
            let (end, _) = apply_step(&mid, &back, &cfg()).map_err(|e| format!("{there} undo failed: {e}"))?;
            if end != s || digest(&end) != digest(&s) {
                return Err(format!("{there} round trip is not the identity"));
            }
            done += 1;
        }
    }
    let equality_rules: Vec<Rule> = Rule::ALL
        .into_iter()
        .filter(|r| r.preserves_behavior() && *r != Rule::Rename)
        .collect();
    let mut scripts = 0;
    while scripts < 10 {
        let start = random_system(&mut rng, 2);
        let mut s = start.clone();
        let mut applied = 0;
        for _ in 0..200 {
            let rule = equality_rules[rng.gen_range(0..equality_rules.len())];
            let Some(step) = random_application(&mut rng, &s, rule) else { continue };
            if let Ok((next, _)) = apply_step(&s, &step, &cfg()) {
                s = next;
                applied += 1;
                if applied == 5 {
                    break;
                }
            }
        }
        if applied < 5 {
            continue;
        }
        let b = bounds(&start);
        let a = black_box_oracle(&start, b).map_err(|e| e.to_string())?;
        let z = black_box_oracle(&s, b).map_err(|e| e.to_string())?;
        if a != z {
            return Err("5-step equality script changed the black box".into());
        }
        scripts += 1;
    }
    Ok("4 pairs x 20 round trips are identities; 10 five-step equality scripts keep the black box".into())
}

fn prefixes(t: &NamedStreamTuple, k: usize) -> NamedStreamTuple {
    t.prefix(k).expect("within horizon")
}

/// Output prefixes of length `k + 1` depend only on input prefixes of
/// length `k`.
fn guarded(table: &BTreeMap<NamedStreamTuple, BTreeSet<NamedStreamTuple>>) -> bool {
    (0..H).all(|k| {
        let mut seen: BTreeMap<NamedStreamTuple, BTreeSet<NamedStreamTuple>> = BTreeMap::new();
        table.iter().all(|(i, outs)| {
            let o: BTreeSet<NamedStreamTuple> = outs.iter().map(|o| prefixes(o, k + 1)).collect();
            match seen.get(&prefixes(i, k)) {
                Some(prev) => *prev == o,
                None => {
                    seen.insert(prefixes(i, k), o);
                    true
                }
            }
        })
    })
}

fn behavior_layer() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let names = ["x", "y", "z"];
    for n in 0..20 {
        let symbols = rng.gen_range(1..=2);
        let ni = rng.gen_range(0..=2);
        let no = rng.gen_range(0..=2);
        let ins: ChannelSet = names[..ni].iter().map(|c| ch(c)).collect();
        let outs: ChannelSet = names[ni..ni + no].iter().map(|c| ch(c)).collect();
        let b = Behavior::table(random_table(&mut rng, "T", &ins, &outs, symbols)).map_err(|e| e.to_string())?;
        let s = extract_strategy(&b);
        let space = TupleSpace::uniform(&ins, symbols, H, B);
        let mut table = BTreeMap::new();
        let mut strat = BTreeMap::new();
        for i in space.iter() {
            let outs = denote(&b, &i, H).map_err(|e| e.to_string())?;
            if outs.is_empty() {
                return Err(format!("transducer {n} is not realizable"));
            }
            let chosen = denote(&s, &i, H).map_err(|e| e.to_string())?;
            if chosen.len() != 1 || !chosen.is_subset(&outs) {
                return Err(format!("strategy of transducer {n} is not a deterministic sub-behavior"));
            }
            table.insert(i.clone(), outs);
            strat.insert(i, chosen);
        }
        if !guarded(&table) {
            return Err(format!("transducer {n} violates the delay-1 prefix property"));
        }
        if !guarded(&strat) {
            return Err(format!("strategy of transducer {n} is not time-guarded"));
        }
    }
    Ok("20 random transducers: realizable, delay-1 causal, strategies time-guarded".into())
}

fn main() -> ExitCode {
    let t0 = Instant::now();
    let mut failed = 0;
    let mut report = |name: &str, r: Check| {
        match r {
            Ok(msg) => println!("PASS criterion {name}: {msg} ({:.1}s)", t0.elapsed().as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    };
    report("1 company scenario end-to-end", company());
    let sw = sweep();
    report("2 rule soundness sweep", soundness(&sw));
    report("3 equality preservation", equality(&sw));
    report("4 oracle agreement", oracle_agreement());
    report("5 negative premise suite", negative_suite());
    report("6 invariant machinery", invariants());
    report("7 complementarity and transitivity", complementarity());
    report("8 behavior-layer properties", behavior_layer());
    println!("acceptance: {} passed, {failed} failed in {:.1}s", 8 - failed, t0.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
