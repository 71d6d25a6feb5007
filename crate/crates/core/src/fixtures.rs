//! Seeded random tables, behaviors, systems and rule applications for
//! property tests and sweeps.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::behavior::{Behavior, ChannelSet, StepRule, Table};
use crate::calculus::{RenameKind, Rule, RuleApplication};
use crate::model::{Component, System};
use crate::semantics::Invariant;
use crate::streams::{ch, Alphabet, ChannelId, Frame, Interval, Message};

/// Interval of length at most `bound` over `symbols` messages.
pub fn random_interval<R: Rng>(rng: &mut R, symbols: usize, bound: usize) -> Interval {
    let len = rng.gen_range(0..=bound);
    Interval::new((0..len).map(|_| Message(rng.gen_range(0..symbols) as u8)).collect())
}

fn random_frame<R: Rng>(rng: &mut R, channels: &ChannelSet, symbols: usize, partial: bool) -> Frame {
    let mut f = Frame::new();
    for c in channels {
        if !partial || rng.gen_bool(0.5) {
            f.insert(c.clone(), random_interval(rng, symbols, 1));
        }
    }
    f
}

/// Transducer with at most two states and intervals of length at most one.
pub fn random_table<R: Rng>(rng: &mut R, name: &str, inputs: &ChannelSet, outputs: &ChannelSet, symbols: usize) -> Table {
    let n = rng.gen_range(1..=2);
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let emits = (0..n)
        .map(|_| {
            (0..rng.gen_range(1..=2))
                .map(|_| (random_frame(rng, outputs, symbols, false), rng.gen_range(0..n)))
                .collect()
        })
        .collect();
    let steps = (0..n)
        .map(|_| {
            (0..rng.gen_range(0..=2))
                .map(|_| StepRule {
                    pattern: random_frame(rng, inputs, symbols, true),
                    targets: (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(0..n)).collect(),
                })
                .collect()
        })
        .collect();
    Table { name: name.into(), inputs: inputs.clone(), outputs: outputs.clone(), states, initial: 0, emits, steps }
}

/// Behavior with the given signature: a random transducer, a copy or merge
/// where the signature allows, single-channel chaos, or silence.
pub fn random_behavior<R: Rng>(rng: &mut R, inputs: &ChannelSet, outputs: &ChannelSet, symbols: usize) -> Behavior {
    let ins: Vec<ChannelId> = inputs.iter().cloned().collect();
    let outs: Vec<ChannelId> = outputs.iter().cloned().collect();
    match rng.gen_range(0..10) {
        0 => Behavior::silent(inputs.clone(), outputs.clone()),
        1 if outs.len() == 1 => Behavior::chaos(inputs.clone(), outputs.clone(), 1, symbols),
        2 | 3 if !ins.is_empty() && !outs.is_empty() => {
            let routes: Vec<(ChannelId, ChannelId)> =
                outs.iter().map(|o| (ins.choose(rng).expect("nonempty").clone(), o.clone())).collect();
            let b = if rng.gen_bool(0.5) {
                Behavior::copy(&routes).expect("distinct targets")
            } else {
                Behavior::lagged(1, 2, &routes).expect("distinct targets")
            };
            b.adapt(inputs, outputs).expect("covers signature")
        }
        4 if !ins.is_empty() && outs.len() == 1 => Behavior::merge(&ins, outs[0].clone()),
        _ => Behavior::table(random_table(rng, "T", inputs, outputs, symbols)).expect("valid table"),
    }
}

fn subset<R: Rng>(rng: &mut R, pool: &[ChannelId], p: f64) -> ChannelSet {
    pool.iter().filter(|_| rng.gen_bool(p)).cloned().collect()
}

/// Consistent system with at most three components and four channels over
/// an alphabet of `symbols` letters; at most two system inputs.
pub fn random_system<R: Rng>(rng: &mut R, symbols: usize) -> System {
    let ncomp = rng.gen_range(1..=3);
    let nch = rng.gen_range(1..=4);
    let names: Vec<String> = ["A", "B", "C"][..ncomp].iter().map(|s| s.to_string()).collect();
    let pool: Vec<ChannelId> = (0..nch).map(|i| ch(&format!("c{i}"))).collect();
    let mut inputs = ChannelSet::new();
    let mut produced: Vec<ChannelSet> = vec![ChannelSet::new(); ncomp];
    for c in &pool {
        if inputs.len() < 2 && rng.gen_bool(0.35) {
            inputs.insert(c.clone());
        } else {
            produced[rng.gen_range(0..ncomp)].insert(c.clone());
        }
    }
    let all_out: Vec<ChannelId> = produced.iter().flatten().cloned().collect();
    let outputs = subset(rng, &all_out, 0.5);
    let components = names
        .iter()
        .zip(&produced)
        .map(|(n, outs)| {
            let ins = subset(rng, &pool, 0.4);
            Component::new(n.clone(), random_behavior(rng, &ins, outs, symbols))
        })
        .collect();
    let s = System::new("R", Alphabet::letters(symbols), inputs, outputs, components);
    debug_assert!(s.check_consistency().passed());
    s
}

fn fresh_channel(system: &System) -> ChannelId {
    let used = system.channels();
    (0..).map(|i| ch(&format!("n{i}"))).find(|c| !used.contains(c)).expect("unbounded")
}

fn fresh_component(system: &System, stem: &str) -> String {
    (0..)
        .map(|i| format!("{stem}{i}"))
        .find(|n| system.component(n).is_none())
        .expect("unbounded")
}

/// `in.S ∪ out.C`
fn connected(system: &System) -> ChannelSet {
    let (_, out_c) = system.interface_sets();
    system.inputs.union(&out_c).cloned().collect()
}

/// Smallest fold interface for `members`: the channels they read but do not
/// produce, and the produced channels the rest of the system observes.
pub fn fold_interface(system: &System, members: &[String]) -> (ChannelSet, ChannelSet) {
    let inside: Vec<&Component> = system.components.iter().filter(|c| members.contains(&c.name().to_string())).collect();
    let produced: ChannelSet = inside.iter().flat_map(|c| c.outputs().iter().cloned()).collect();
    let read: ChannelSet = inside.iter().flat_map(|c| c.inputs().iter().cloned()).collect();
    let ins = read.difference(&produced).cloned().collect();
    let outs = produced
        .iter()
        .filter(|c| {
            system.outputs.contains(*c)
                || system.readers(c).iter().any(|r| !members.contains(&r.name().to_string()))
        })
        .cloned()
        .collect();
    (ins, outs)
}

/// A one-component sub-architecture implementing `component`.
pub fn wrap_component(system: &System, component: &Component, inner_name: &str) -> System {
    System::new(
        component.name(),
        system.alphabet.clone(),
        component.inputs().clone(),
        component.outputs().clone(),
        vec![component.renamed(inner_name)],
    )
}

/// A random application of `rule` that has a fair chance of passing its
/// premises; `None` when the system offers no candidate.
pub fn random_application<R: Rng>(rng: &mut R, system: &System, rule: Rule) -> Option<RuleApplication> {
    let symbols = system.alphabet.len();
    let comps: Vec<&Component> = system.components.iter().collect();
    let pick = |rng: &mut R| comps.choose(rng).copied();
    Some(match rule {
        Rule::RefineBehavior | Rule::RefineWithInvariant => {
            let c = pick(rng)?;
            let behavior = match rng.gen_range(0..2) {
                0 => random_behavior(rng, c.inputs(), c.outputs(), symbols),
                _ => crate::behavior::extract_strategy(c.behavior()),
            };
            if rule == Rule::RefineBehavior {
                RuleApplication::RefineBehavior { component: c.name().into(), behavior }
            } else {
                RuleApplication::RefineWithInvariant { component: c.name().into(), behavior, invariant: Invariant::truth() }
            }
        }
        Rule::AddOutput => {
            RuleApplication::AddOutput { component: pick(rng)?.name().into(), channel: fresh_channel(system), bound: Some(1) }
        }
        Rule::RemoveOutput => {
            let c = pick(rng)?;
            let o: Vec<&ChannelId> = c.outputs().iter().collect();
            RuleApplication::RemoveOutput { component: c.name().into(), channel: (*o.choose(rng)?).clone() }
        }
        Rule::AddInput => {
            let c = pick(rng)?;
            let avail: Vec<ChannelId> = connected(system).difference(c.inputs()).cloned().collect();
            RuleApplication::AddInput { component: c.name().into(), channel: avail.choose(rng)?.clone() }
        }
        Rule::RemoveInput => {
            let c = pick(rng)?;
            let i: Vec<&ChannelId> = c.inputs().iter().collect();
            RuleApplication::RemoveInput { component: c.name().into(), channel: (*i.choose(rng)?).clone() }
        }
        Rule::AddComponentBasic => RuleApplication::AddComponentBasic { name: fresh_component(system, "N") },
        Rule::AddComponent => {
            let pool: Vec<ChannelId> = connected(system).into_iter().collect();
            let inputs = subset(rng, &pool, 0.4);
            let outputs: ChannelSet = if rng.gen_bool(0.5) { [fresh_channel(system)].into() } else { BTreeSet::new() };
            let behavior = random_behavior(rng, &inputs, &outputs, symbols);
            RuleApplication::AddComponent { name: fresh_component(system, "N"), inputs, outputs, behavior }
        }
        Rule::RemoveComponent => RuleApplication::RemoveComponent { name: pick(rng)?.name().into() },
        Rule::Expand => {
            let c = pick(rng)?;
            let sub = wrap_component(system, c, &fresh_component(system, "Inner"));
            RuleApplication::Expand { component: c.name().into(), subsystem: Some(Arc::new(sub)) }
        }
        Rule::Fold => {
            let k = rng.gen_range(1..=comps.len().clamp(1, 2));
            let members: Vec<String> = comps.choose_multiple(rng, k).map(|c| c.name().to_string()).collect();
            if members.is_empty() {
                return None;
            }
            let (inputs, outputs) = fold_interface(system, &members);
            RuleApplication::Fold { name: fresh_component(system, "F"), members, inputs, outputs }
        }
        Rule::Rename => {
            if rng.gen_bool(0.5) {
                let c = pick(rng)?;
                RuleApplication::Rename {
                    kind: RenameKind::Component,
                    pairs: vec![(c.name().into(), fresh_component(system, "Z"))],
                }
            } else {
                let chans: Vec<ChannelId> = system.channels().into_iter().collect();
                let from = chans.choose(rng)?.to_string();
                RuleApplication::Rename { kind: RenameKind::Channel, pairs: vec![(from, fresh_channel(system).to_string())] }
            }
        }
    })
}
