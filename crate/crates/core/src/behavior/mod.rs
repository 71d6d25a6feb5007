//! Executable nondeterministic behaviors.
//!
//! A [`Behavior`] is a transducer that, once per tick, first *emits* one
//! interval per output channel and then *absorbs* one interval per input
//! channel. Output at tick `t` can therefore only depend on input up to tick
//! `t - 1`: every behavior is time guarded with delay one, and because
//! `emit` and `absorb` are total every behavior is realizable.
//!
//! Behaviors are immutable expression trees. Builtins (silent, chaos, copy,
//! ...) and explicit state tables sit at the leaves; interface adaption,
//! chaos extension, input restriction, parallel composition, renaming and
//! strategy extraction are inner nodes.

mod check;
mod machine;
pub mod process;
mod vocab;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::streams::{ChannelId, Frame, Interval, NamedStreamTuple, StreamError};

pub use check::{
    accepts, continuations, denote, equivalent_within, extract_strategy, independent_of, independent_within,
    refines, refines_within, restrict_input,
};
pub(crate) use check::{equivalent_enumerative, independent_enumerative, refines_enumerative};
pub use machine::State;
pub use vocab::Vocabulary;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BehaviorError {
    #[error("interface error: {0}")]
    Interface(String),
    #[error("channel `{0}` is already an output")]
    Conflict(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid transducer: {0}")]
    InvalidTable(String),
    #[error(transparent)]
    Stream(#[from] StreamError),
}

pub type ChannelSet = BTreeSet<ChannelId>;

/// Finite checking universe: horizon `H`, per-interval bound `B` and the
/// alphabet size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bounds {
    pub horizon: usize,
    pub bound: usize,
    pub symbols: usize,
}

impl Bounds {
    pub fn new(horizon: usize, bound: usize, symbols: usize) -> Self {
        Bounds { horizon, bound, symbols }
    }

    /// Every channel ranges over all intervals of length at most `bound`.
    pub fn uniform(&self, channels: &ChannelSet) -> crate::streams::Domains {
        let all = Interval::all_up_to(self.symbols, self.bound);
        channels.iter().map(|c| (c.clone(), all.clone())).collect()
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H={} B={} |M|={}", self.horizon, self.bound, self.symbols)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Established without enumeration.
    Holds,
    /// No counterexample within the bounds.
    HoldsUpToBound,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Counterexample {
    /// `output` is produced for `input` by the candidate but not admitted by
    /// the reference.
    Output { input: NamedStreamTuple, output: NamedStreamTuple },
    /// Two inputs agreeing everywhere except on the channel under test yet
    /// producing different output sets.
    Dependence { first: NamedStreamTuple, second: NamedStreamTuple },
    /// A channel valuation violating a predicate.
    Valuation { tuple: NamedStreamTuple },
    /// A channel valuation under which the candidate produces `output`
    /// that the reference does not admit.
    Conditional { tuple: NamedStreamTuple, output: NamedStreamTuple },
}

/// Result of a bounded semantic check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub bounds: Bounds,
    pub counterexample: Option<Counterexample>,
}

impl Verdict {
    pub fn holds(bounds: Bounds) -> Self {
        Verdict { outcome: Outcome::Holds, bounds, counterexample: None }
    }

    pub fn up_to_bound(bounds: Bounds) -> Self {
        Verdict { outcome: Outcome::HoldsUpToBound, bounds, counterexample: None }
    }

    pub fn fails(bounds: Bounds, cex: Counterexample) -> Self {
        Verdict { outcome: Outcome::Fails, bounds, counterexample: Some(cex) }
    }

    pub fn passed(&self) -> bool {
        self.outcome != Outcome::Fails
    }
}

/// Explicit finite transducer. States are referenced by their index in
/// declaration order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Table {
    pub name: String,
    pub inputs: ChannelSet,
    pub outputs: ChannelSet,
    pub states: Vec<String>,
    pub initial: usize,
    /// Per state: the emit choices `(frame, intermediate state)`.
    pub emits: Vec<Vec<(Frame, usize)>>,
    /// Per intermediate state: absorb rules, tried in order. Input not
    /// matched by any rule leaves the state unchanged.
    pub steps: Vec<Vec<StepRule>>,
}

/// Absorb rule: when every channel in `pattern` carries the given interval,
/// move to one of `targets`. Channels missing from the pattern match anything.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StepRule {
    pub pattern: Frame,
    pub targets: Vec<usize>,
}

impl Table {
    pub fn validate(&self) -> Result<(), BehaviorError> {
        let bad = |m: String| Err(BehaviorError::InvalidTable(format!("{}: {m}", self.name)));
        if self.states.is_empty() {
            return bad("no states".into());
        }
        let n = self.states.len();
        if self.initial >= n {
            return bad("initial state out of range".into());
        }
        if self.emits.len() != n || self.steps.len() != n {
            return bad("emit/step tables must cover every state".into());
        }
        for (s, choices) in self.emits.iter().enumerate() {
            if choices.is_empty() {
                return bad(format!("state `{}` has no emit choice", self.states[s]));
            }
            for (frame, target) in choices {
                if *target >= n {
                    return bad("emit target out of range".into());
                }
                if frame.keys().cloned().collect::<ChannelSet>() != self.outputs {
                    return bad(format!("emit frame in `{}` must cover exactly the outputs", self.states[s]));
                }
            }
        }
        for rules in &self.steps {
            for rule in rules {
                if rule.targets.is_empty() || rule.targets.iter().any(|t| *t >= n) {
                    return bad("step targets must be nonempty and in range".into());
                }
                if rule.pattern.keys().any(|c| !self.inputs.contains(c)) {
                    return bad("step pattern mentions a non-input channel".into());
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Emits empty intervals on every output.
    Silent,
    /// Emits any interval of length at most `bound` on every output.
    Chaos { bound: usize, symbols: usize },
    /// Each target repeats its source delayed by a lag in `min..=max`,
    /// chosen afresh every tick (one choice shared by all routes).
    Lagged { min: usize, max: usize, routes: Vec<(ChannelId, ChannelId)> },
    /// Target carries the concatenation of the sources, one tick later.
    Merge { sources: Vec<ChannelId>, target: ChannelId },
    /// Target carries the summary of the two sources `delay` ticks later.
    Summary { delay: usize, first: ChannelId, second: ChannelId, target: ChannelId },
    /// Decodes summaries from `source` one tick later, ignoring the first
    /// `skip` source intervals.
    Unpack { skip: usize, source: ChannelId, first: ChannelId, second: ChannelId },
    Table(Arc<Table>),
    /// Interface adaption: extra inputs ignored, outputs restricted.
    Adapt(Behavior),
    /// Adds an unconstrained output channel.
    ChaosExtend { inner: Behavior, channel: ChannelId, bound: usize, symbols: usize },
    /// Input `channel` removed; the inner behavior sees it as always empty.
    RestrictInput { inner: Behavior, channel: ChannelId },
    /// Parallel composition with implicit feedback.
    Compose(Vec<Behavior>),
    /// Channel renaming `old -> new` over the inner signature.
    Rename { inner: Behavior, map: BTreeMap<ChannelId, ChannelId> },
    /// Deterministic resolution choosing the least option at every step.
    Strategy(Behavior),
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct Node {
    kind: Kind,
    inputs: ChannelSet,
    outputs: ChannelSet,
}

/// Executable component behavior; cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Behavior(Arc<Node>);

impl fmt::Debug for Behavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[{:?} -> {:?}]", self.0.kind, self.0.inputs, self.0.outputs)
    }
}

fn node(kind: Kind, inputs: ChannelSet, outputs: ChannelSet) -> Behavior {
    Behavior(Arc::new(Node { kind, inputs, outputs }))
}

fn names(set: &ChannelSet) -> String {
    let v: Vec<&str> = set.iter().map(|c| c.as_str()).collect();
    format!("{{{}}}", v.join(", "))
}

impl Behavior {
    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub fn inputs(&self) -> &ChannelSet {
        &self.0.inputs
    }

    pub fn outputs(&self) -> &ChannelSet {
        &self.0.outputs
    }

    /// The unique behavior with empty interfaces.
    pub fn unit() -> Behavior {
        Behavior::silent(ChannelSet::new(), ChannelSet::new())
    }

    pub fn silent(inputs: ChannelSet, outputs: ChannelSet) -> Behavior {
        node(Kind::Silent, inputs, outputs)
    }

    pub fn chaos(inputs: ChannelSet, outputs: ChannelSet, bound: usize, symbols: usize) -> Behavior {
        node(Kind::Chaos { bound, symbols }, inputs, outputs)
    }

    /// Delay-one copy along each `(source, target)` route.
    pub fn copy(routes: &[(ChannelId, ChannelId)]) -> Result<Behavior, BehaviorError> {
        Behavior::lagged(1, 1, routes)
    }

    pub fn lagged(
        min: usize,
        max: usize,
        routes: &[(ChannelId, ChannelId)],
    ) -> Result<Behavior, BehaviorError> {
        if min == 0 || max < min {
            return Err(BehaviorError::Interface(format!("lag range {min}..{max} must satisfy 1 <= min <= max")));
        }
        let inputs: ChannelSet = routes.iter().map(|(s, _)| s.clone()).collect();
        let outputs: ChannelSet = routes.iter().map(|(_, t)| t.clone()).collect();
        if outputs.len() != routes.len() {
            return Err(BehaviorError::Interface("route targets must be distinct".into()));
        }
        Ok(node(Kind::Lagged { min, max, routes: routes.to_vec() }, inputs, outputs))
    }

    pub fn merge(sources: &[ChannelId], target: ChannelId) -> Behavior {
        let inputs = sources.iter().cloned().collect();
        node(
            Kind::Merge { sources: sources.to_vec(), target: target.clone() },
            inputs,
            [target].into_iter().collect(),
        )
    }

    /// `target` at tick `t + delay` carries the summary of `first` and
    /// `second` at tick `t`. Needs an alphabet with at least two symbols.
    pub fn summary(
        delay: usize,
        first: ChannelId,
        second: ChannelId,
        target: ChannelId,
    ) -> Result<Behavior, BehaviorError> {
        if delay == 0 {
            return Err(BehaviorError::Interface("summary delay must be at least 1".into()));
        }
        if first == second {
            return Err(BehaviorError::Interface("summary sources must differ".into()));
        }
        let inputs = [first.clone(), second.clone()].into_iter().collect();
        let outputs = [target.clone()].into_iter().collect();
        Ok(node(Kind::Summary { delay, first, second, target }, inputs, outputs))
    }

    pub fn unpack(
        skip: usize,
        source: ChannelId,
        first: ChannelId,
        second: ChannelId,
    ) -> Result<Behavior, BehaviorError> {
        if first == second {
            return Err(BehaviorError::Interface("unpack targets must differ".into()));
        }
        let inputs = [source.clone()].into_iter().collect();
        let outputs = [first.clone(), second.clone()].into_iter().collect();
        Ok(node(Kind::Unpack { skip, source, first, second }, inputs, outputs))
    }

    pub fn table(table: Table) -> Result<Behavior, BehaviorError> {
        table.validate()?;
        let inputs = table.inputs.clone();
        let outputs = table.outputs.clone();
        Ok(node(Kind::Table(Arc::new(table)), inputs, outputs))
    }

    /// Interface adaption: extends the inputs to `inputs` (new ones are
    /// ignored) and restricts the outputs to `outputs`.
    pub fn adapt(&self, inputs: &ChannelSet, outputs: &ChannelSet) -> Result<Behavior, BehaviorError> {
        if !self.inputs().is_subset(inputs) {
            return Err(BehaviorError::Interface(format!(
                "adaption must keep inputs {} (got {})",
                names(self.inputs()),
                names(inputs)
            )));
        }
        if !outputs.is_subset(self.outputs()) {
            return Err(BehaviorError::Interface(format!(
                "adapted outputs {} are not among {}",
                names(outputs),
                names(self.outputs())
            )));
        }
        Ok(self.adapt_unchecked(inputs, outputs))
    }

    pub(crate) fn adapt_unchecked(&self, inputs: &ChannelSet, outputs: &ChannelSet) -> Behavior {
        if inputs == self.inputs() && outputs == self.outputs() {
            return self.clone();
        }
        match self.kind() {
            Kind::Adapt(inner) => inner.adapt_unchecked(inputs, outputs),
            Kind::ChaosExtend { inner, channel, .. } if !outputs.contains(channel) => {
                inner.adapt_unchecked(inputs, outputs)
            }
            Kind::Silent => Behavior::silent(inputs.clone(), outputs.clone()),
            Kind::Chaos { bound, symbols } => {
                Behavior::chaos(inputs.clone(), outputs.clone(), *bound, *symbols)
            }
            _ => node(Kind::Adapt(self.clone()), inputs.clone(), outputs.clone()),
        }
    }

    /// Adds output `channel` whose content is unconstrained (any interval of
    /// length at most `bound`).
    pub fn chaos_extend(
        &self,
        channel: &ChannelId,
        bound: usize,
        symbols: usize,
    ) -> Result<Behavior, BehaviorError> {
        if self.outputs().contains(channel) {
            return Err(BehaviorError::Conflict(channel.to_string()));
        }
        let mut outputs = self.outputs().clone();
        outputs.insert(channel.clone());
        Ok(node(
            Kind::ChaosExtend { inner: self.clone(), channel: channel.clone(), bound, symbols },
            self.inputs().clone(),
            outputs,
        ))
    }

    /// Removes input `channel` without checking that the behavior ignores it;
    /// the inner behavior sees that channel as permanently empty.
    pub(crate) fn restrict_input_unchecked(&self, channel: &ChannelId) -> Behavior {
        let mut inputs = self.inputs().clone();
        inputs.remove(channel);
        match self.kind() {
            Kind::Adapt(inner) if !inner.inputs().contains(channel) => {
                inner.adapt_unchecked(&inputs, self.outputs())
            }
            Kind::Silent => Behavior::silent(inputs, self.outputs().clone()),
            Kind::Chaos { bound, symbols } => {
                Behavior::chaos(inputs, self.outputs().clone(), *bound, *symbols)
            }
            _ => node(
                Kind::RestrictInput { inner: self.clone(), channel: channel.clone() },
                inputs,
                self.outputs().clone(),
            ),
        }
    }

    /// Parallel composition with implicit feedback: outputs are the union of
    /// member outputs, inputs the member inputs not produced by any member.
    pub fn compose(members: &[Behavior]) -> Result<Behavior, BehaviorError> {
        let mut outputs = ChannelSet::new();
        for m in members {
            for o in m.outputs() {
                if !outputs.insert(o.clone()) {
                    return Err(BehaviorError::Conflict(o.to_string()));
                }
            }
        }
        let inputs: ChannelSet = members
            .iter()
            .flat_map(|m| m.inputs().iter().cloned())
            .filter(|c| !outputs.contains(c))
            .collect();
        match members {
            [] => Ok(Behavior::unit()),
            [single] if single.inputs().is_disjoint(single.outputs()) => Ok(single.clone()),
            _ => Ok(node(Kind::Compose(members.to_vec()), inputs, outputs)),
        }
    }

    /// Renames channels of the signature; entries for channels outside the
    /// signature are ignored.
    pub fn rename(&self, map: &BTreeMap<ChannelId, ChannelId>) -> Result<Behavior, BehaviorError> {
        let (base, mut effective) = match self.kind() {
            Kind::Rename { inner, map: first } => {
                let mut m = BTreeMap::new();
                for c in inner.inputs().iter().chain(inner.outputs()) {
                    let mid = first.get(c).unwrap_or(c);
                    let end = map.get(mid).unwrap_or(mid);
                    m.insert(c.clone(), end.clone());
                }
                (inner.clone(), m)
            }
            _ => {
                let sig: ChannelSet = self.inputs().union(self.outputs()).cloned().collect();
                let m = map
                    .iter()
                    .filter(|(k, _)| sig.contains(*k))
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect();
                (self.clone(), m)
            }
        };
        effective.retain(|k, v| k != v);
        if effective.is_empty() {
            return Ok(base);
        }
        let apply = |set: &ChannelSet| -> ChannelSet {
            set.iter().map(|c| effective.get(c).unwrap_or(c).clone()).collect()
        };
        let inputs = apply(base.inputs());
        let outputs = apply(base.outputs());
        let before: ChannelSet = base.inputs().union(base.outputs()).cloned().collect();
        let after: ChannelSet = inputs.union(&outputs).cloned().collect();
        if before.len() != after.len() || inputs.len() != base.inputs().len() || outputs.len() != base.outputs().len() {
            return Err(BehaviorError::Interface("renaming merges distinct channels".into()));
        }
        Ok(node(Kind::Rename { inner: base, map: effective }, inputs, outputs))
    }

    /// Input channels the behavior may structurally depend on.
    pub fn reads(&self) -> ChannelSet {
        match self.kind() {
            Kind::Silent | Kind::Chaos { .. } => ChannelSet::new(),
            Kind::Lagged { routes, .. } => routes.iter().map(|(s, _)| s.clone()).collect(),
            Kind::Merge { sources, .. } => sources.iter().cloned().collect(),
            Kind::Summary { first, second, .. } => [first.clone(), second.clone()].into_iter().collect(),
            Kind::Unpack { source, .. } => [source.clone()].into_iter().collect(),
            Kind::Table(t) => t.steps.iter().flatten().flat_map(|r| r.pattern.keys().cloned()).collect(),
            Kind::Adapt(inner) | Kind::ChaosExtend { inner, .. } | Kind::Strategy(inner) => inner.reads(),
            Kind::RestrictInput { inner, channel } => {
                let mut r = inner.reads();
                r.remove(channel);
                r
            }
            Kind::Compose(members) => members
                .iter()
                .flat_map(|m| m.reads())
                .filter(|c| self.inputs().contains(c))
                .collect(),
            Kind::Rename { inner, map } => inner
                .reads()
                .into_iter()
                .map(|c| map.get(&c).cloned().unwrap_or(c))
                .collect(),
        }
    }

    /// True when no step ever chooses between alternatives.
    pub fn is_deterministic(&self) -> bool {
        match self.kind() {
            Kind::Silent | Kind::Merge { .. } | Kind::Summary { .. } | Kind::Unpack { .. } | Kind::Strategy(_) => true,
            Kind::Chaos { bound, symbols } => self.outputs().is_empty() || *bound == 0 || *symbols == 0,
            Kind::Lagged { min, max, .. } => min == max,
            Kind::Table(t) => {
                t.emits.iter().all(|e| e.len() == 1)
                    && t.steps.iter().flatten().all(|r| r.targets.len() == 1)
            }
            Kind::Adapt(inner) | Kind::RestrictInput { inner, .. } | Kind::Rename { inner, .. } => {
                inner.is_deterministic()
            }
            Kind::ChaosExtend { inner, bound, symbols, .. } => {
                inner.is_deterministic() && (*bound == 0 || *symbols == 0)
            }
            Kind::Compose(members) => members.iter().all(|m| m.is_deterministic()),
        }
    }

    /// Collects every explicit table used anywhere in the expression.
    pub fn tables(&self) -> Vec<Arc<Table>> {
        let mut out = Vec::new();
        self.collect_tables(&mut out);
        out
    }

    fn collect_tables(&self, out: &mut Vec<Arc<Table>>) {
        match self.kind() {
            Kind::Table(t) => {
                if !out.iter().any(|x| x == t) {
                    out.push(t.clone());
                }
            }
            Kind::Adapt(inner)
            | Kind::ChaosExtend { inner, .. }
            | Kind::RestrictInput { inner, .. }
            | Kind::Rename { inner, .. }
            | Kind::Strategy(inner) => inner.collect_tables(out),
            Kind::Compose(members) => members.iter().for_each(|m| m.collect_tables(out)),
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streams::{ch, chans};

    #[test]
    fn adapt_normalizes() {
        let copy = Behavior::copy(&[(ch("p"), ch("q"))]).unwrap();
        let ext = copy.adapt(&chans(&["p", "r"]), &chans(&["q"])).unwrap();
        assert_eq!(ext.adapt(copy.inputs(), copy.outputs()), Err(BehaviorError::Interface(
            "adaption must keep inputs {p, r} (got {p})".into()
        )));
        let twice = ext.adapt(&chans(&["p", "r", "s"]), &chans(&["q"])).unwrap();
        assert!(matches!(twice.kind(), Kind::Adapt(inner) if *inner == copy));
        let chaotic = copy.chaos_extend(&ch("x"), 1, 2).unwrap();
        assert_eq!(chaotic.adapt(copy.inputs(), copy.outputs()).unwrap(), copy);
    }

    #[test]
    fn chaos_extend_rejects_existing_output() {
        let copy = Behavior::copy(&[(ch("p"), ch("q"))]).unwrap();
        assert_eq!(copy.chaos_extend(&ch("q"), 1, 1), Err(BehaviorError::Conflict("q".into())));
    }

    #[test]
    fn compose_signature() {
        let a = Behavior::copy(&[(ch("p"), ch("q"))]).unwrap();
        let b = Behavior::copy(&[(ch("q"), ch("r"))]).unwrap();
        let c = Behavior::compose(&[a.clone(), b]).unwrap();
        assert_eq!(c.inputs(), &chans(&["p"]));
        assert_eq!(c.outputs(), &chans(&["q", "r"]));
        assert_eq!(Behavior::compose(&[a.clone()]).unwrap(), a);
        assert_eq!(Behavior::compose(&[]).unwrap(), Behavior::unit());
        assert!(matches!(Behavior::compose(&[a.clone(), a]), Err(BehaviorError::Conflict(_))));
    }

    #[test]
    fn rename_round_trip() {
        let a = Behavior::copy(&[(ch("p"), ch("q"))]).unwrap();
        let fwd: BTreeMap<_, _> = [(ch("q"), ch("z"))].into_iter().collect();
        let back: BTreeMap<_, _> = [(ch("z"), ch("q"))].into_iter().collect();
        let r = a.rename(&fwd).unwrap();
        assert_eq!(r.outputs(), &chans(&["z"]));
        assert_eq!(r.rename(&back).unwrap(), a);
        let clash: BTreeMap<_, _> = [(ch("q"), ch("p"))].into_iter().collect();
        assert!(a.rename(&clash).is_err());
    }

    #[test]
    fn reads_are_structural() {
        let a = Behavior::copy(&[(ch("p"), ch("q"))]).unwrap();
        let wide = a.adapt(&chans(&["p", "r"]), a.outputs()).unwrap();
        assert_eq!(wide.reads(), chans(&["p"]));
        let narrowed = wide.restrict_input_unchecked(&ch("r"));
        assert_eq!(narrowed, a);
    }
}
