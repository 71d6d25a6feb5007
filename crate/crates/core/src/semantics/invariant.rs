use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use super::{channel_domains, glass_box, input_tuples, SemanticsError};
use crate::behavior::process::summarize;
use crate::behavior::{accepts, denote, Behavior, BehaviorError, Bounds, ChannelSet, Counterexample, Verdict};
use crate::model::System;
use crate::streams::{ChannelId, Frame, Interval, NamedStreamTuple};

/// `w` consecutive ticks of a channel valuation, starting at tick `start`.
pub struct Window<'a> {
    frames: &'a [Frame],
    start: usize,
}

impl Window<'_> {
    pub fn start(&self) -> usize {
        self.start
    }

    /// Interval on `channel` at tick `start + offset`; channels outside the
    /// valuation read as empty.
    pub fn at(&self, channel: &ChannelId, offset: usize) -> Interval {
        self.frames[self.start + offset].get(channel).cloned().unwrap_or_default()
    }
}

pub type Predicate = Arc<dyn Fn(&Window<'_>) -> bool + Send + Sync>;

/// Named predicate over channel histories, evaluated on every window of
/// `window` ticks that fits in the horizon.
#[derive(Clone)]
pub struct Invariant {
    name: String,
    window: usize,
    channels: ChannelSet,
    description: String,
    predicate: Predicate,
}

impl fmt::Debug for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} := {}", self.name, self.description)
    }
}

impl Invariant {
    pub fn new(
        name: impl Into<String>,
        window: usize,
        channels: ChannelSet,
        description: impl Into<String>,
        predicate: Predicate,
    ) -> Self {
        Invariant {
            name: name.into(),
            window: window.max(1),
            channels,
            description: description.into(),
            predicate,
        }
    }

    /// The maximal invariant.
    pub fn truth() -> Self {
        Invariant::new("true", 1, ChannelSet::new(), "true", Arc::new(|_| true))
    }

    /// `result` at tick `k + delay` is the summary of `first` and `second`
    /// at tick `k`.
    pub fn summarizes(
        name: impl Into<String>,
        result: ChannelId,
        first: ChannelId,
        second: ChannelId,
        delay: usize,
    ) -> Self {
        let description = format!("summarizes({result}; {first}, {second}; {delay})");
        let channels = [result.clone(), first.clone(), second.clone()].into_iter().collect();
        Invariant::new(
            name,
            delay + 1,
            channels,
            description,
            Arc::new(move |w| w.at(&result, delay) == summarize(&w.at(&first, 0), &w.at(&second, 0))),
        )
    }

    /// `channel` never carries a message.
    pub fn silent(name: impl Into<String>, channel: ChannelId) -> Self {
        let description = format!("silent({channel})");
        let channels = [channel.clone()].into_iter().collect();
        Invariant::new(name, 1, channels, description, Arc::new(move |w| w.at(&channel, 0).is_empty()))
    }

    /// `target` repeats `source` after `delay` ticks.
    pub fn copies(name: impl Into<String>, source: ChannelId, target: ChannelId, delay: usize) -> Self {
        let description = format!("copies({source} -> {target}; {delay})");
        let channels = [source.clone(), target.clone()].into_iter().collect();
        Invariant::new(
            name,
            delay + 1,
            channels,
            description,
            Arc::new(move |w| w.at(&target, delay) == w.at(&source, 0)),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn channels(&self) -> &ChannelSet {
        &self.channels
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn is_trivial(&self) -> bool {
        self.description == "true"
    }

    pub fn with_name(&self, name: impl Into<String>) -> Self {
        Invariant { name: name.into(), ..self.clone() }
    }

    /// Whether the window starting at tick `k` satisfies the predicate.
    pub fn holds_at(&self, frames: &[Frame], k: usize) -> bool {
        (self.predicate)(&Window { frames, start: k })
    }

    pub fn holds_on_frames(&self, frames: &[Frame]) -> bool {
        frames.len() < self.window || (0..=frames.len() - self.window).all(|k| self.holds_at(frames, k))
    }

    pub fn holds_on(&self, tuple: &NamedStreamTuple) -> bool {
        self.holds_on_frames(&tuple.frames())
    }

    fn check_references(&self, system: &System) -> Result<(), SemanticsError> {
        let (_, out_c) = system.interface_sets();
        let unknown: Vec<String> = self
            .channels
            .iter()
            .filter(|c| !system.inputs.contains(*c) && !out_c.contains(*c))
            .map(|c| c.to_string())
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(SemanticsError::Reference { name: self.name.clone(), channels: unknown })
        }
    }
}

/// Write-once registry of named invariants.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    entries: BTreeMap<String, Invariant>,
}

impl Registry {
    /// Registry holding only the maximal invariant `true`.
    pub fn standard() -> Self {
        let mut r = Registry::default();
        r.register(Invariant::truth()).expect("fresh registry");
        r
    }

    pub fn register(&mut self, invariant: Invariant) -> Result<(), SemanticsError> {
        if self.entries.contains_key(invariant.name()) {
            return Err(SemanticsError::DuplicateInvariant(invariant.name().to_string()));
        }
        self.entries.insert(invariant.name().to_string(), invariant);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&Invariant, SemanticsError> {
        self.entries.get(name).ok_or_else(|| SemanticsError::UnknownInvariant(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|k| k.as_str())
    }
}

/// Validity of `psi` on `system`: every valuation `l` of `in.S ∪ out.C`
/// admitted by all components satisfies `psi`.
pub fn invariant_valid(system: &System, psi: &Invariant, bounds: Bounds) -> Result<Verdict, SemanticsError> {
    system.ensure_consistent()?;
    psi.check_references(system)?;
    if psi.is_trivial() {
        return Ok(Verdict::holds(bounds));
    }
    let g = glass_box(system)?;
    let inputs = input_tuples(&system.inputs, bounds);
    let cex = inputs.par_iter().find_map_first(|i| {
        let gi = i.restrict(g.inputs()).expect("glass box reads system inputs");
        denote(&g, &gi, bounds.horizon)
            .expect("signature matches")
            .into_iter()
            .map(|o| i.merge(&o).expect("disjoint"))
            .find(|l| !psi.holds_on(l))
            .map(|l| Counterexample::Valuation { tuple: l })
    });
    Ok(match cex {
        Some(c) => Verdict::fails(bounds, c),
        None => Verdict::up_to_bound(bounds),
    })
}

/// Valuations of `channels` over the system domains whose windows all
/// satisfy `psi`, found tick by tick so violated windows prune early.
fn satisfying_valuations(
    channels: &ChannelSet,
    domains: &crate::streams::Domains,
    psi: &Invariant,
    horizon: usize,
) -> Vec<Vec<Frame>> {
    let mut tick_frames = vec![Frame::new()];
    for c in channels {
        let mut next = Vec::new();
        for f in &tick_frames {
            for i in &domains[c] {
                let mut g = f.clone();
                g.insert(c.clone(), i.clone());
                next.push(g);
            }
        }
        tick_frames = next;
    }
    let mut partial: Vec<Vec<Frame>> = vec![Vec::new()];
    for t in 0..horizon {
        partial = partial
            .into_par_iter()
            .flat_map_iter(|p| {
                let ticks = &tick_frames;
                ticks.iter().filter_map(move |f| {
                    let mut q = p.clone();
                    q.push(f.clone());
                    let ok = t + 1 < psi.window() || psi.holds_at(&q, t + 1 - psi.window());
                    ok.then_some(q)
                })
            })
            .collect();
    }
    partial
}

/// Conditional refinement: for every valuation `l` of `in.S ∪ out.C`
/// satisfying `psi`, `candidate(l|in.c) ⊆ behav.c(l|in.c)`.
pub fn conditional_refines(
    system: &System,
    component: &str,
    candidate: &Behavior,
    psi: &Invariant,
    bounds: Bounds,
) -> Result<Verdict, SemanticsError> {
    let current = system.require(component)?.behavior().clone();
    if current.inputs() != candidate.inputs() || current.outputs() != candidate.outputs() {
        return Err(BehaviorError::Interface(format!("candidate for `{component}` has a different signature")).into());
    }
    psi.check_references(system)?;
    if &current == candidate {
        return Ok(Verdict::holds(bounds));
    }
    let domains = channel_domains(system, bounds)?;
    let relevant: ChannelSet = current.inputs().union(psi.channels()).cloned().collect();
    let valuations = satisfying_valuations(&relevant, &domains, psi, bounds.horizon);
    let mut seen: BTreeMap<NamedStreamTuple, NamedStreamTuple> = BTreeMap::new();
    for frames in valuations {
        let l = NamedStreamTuple::from_frames(&relevant, &frames);
        let x = l.restrict(current.inputs()).expect("inputs are relevant");
        seen.entry(x).or_insert(l);
    }
    let cases: Vec<(NamedStreamTuple, NamedStreamTuple)> = seen.into_iter().collect();
    let cex = cases.par_iter().find_map_first(|(x, l)| {
        denote(candidate, x, bounds.horizon)
            .expect("signature matches")
            .into_iter()
            .find(|o| !accepts(&current, x, o).expect("signature matches"))
            .map(|o| Counterexample::Conditional { tuple: l.clone(), output: o })
    });
    Ok(match cex {
        Some(c) => Verdict::fails(bounds, c),
        None => Verdict::up_to_bound(bounds),
    })
}
