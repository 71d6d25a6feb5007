//! Components, systems and the consistency conditions of the glass-box view.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::behavior::{Behavior, Bounds, ChannelSet};
use crate::streams::{Alphabet, ChannelId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("inconsistent system: {0}")]
    Inconsistent(ConsistencyReport),
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
}

/// A named box whose interface is the signature of its behavior.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Component {
    name: String,
    behavior: Behavior,
}

impl Component {
    pub fn new(name: impl Into<String>, behavior: Behavior) -> Self {
        Component { name: name.into(), behavior }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn inputs(&self) -> &ChannelSet {
        self.behavior.inputs()
    }

    pub fn outputs(&self) -> &ChannelSet {
        self.behavior.outputs()
    }

    pub fn behavior(&self) -> &Behavior {
        &self.behavior
    }

    pub fn with_behavior(&self, behavior: Behavior) -> Self {
        Component { name: self.name.clone(), behavior }
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Component { name: name.into(), behavior: self.behavior.clone() }
    }
}

/// Records that a component stands for a sub-architecture. `behavior` is the
/// component behavior at link time, so a later refinement breaks the link.
#[derive(Clone, Debug)]
pub struct Provenance {
    pub subsystem: Arc<System>,
    pub behavior: Behavior,
    /// Bounds at which the link was checked; `None` when it holds by
    /// construction.
    pub bounds: Option<Bounds>,
}

/// Glass-box view `(in.S, out.S, arch.S)`. Consistency is checked on demand
/// so that rule implementations can pass through inconsistent states.
#[derive(Clone, Debug)]
pub struct System {
    pub name: String,
    pub alphabet: Alphabet,
    pub inputs: ChannelSet,
    pub outputs: ChannelSet,
    pub components: Vec<Component>,
    pub provenance: BTreeMap<String, Provenance>,
}

/// Structural equality: interfaces, alphabet and the component set. The
/// system name and provenance annotations are ignored.
impl PartialEq for System {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.inputs == other.inputs
            && self.outputs == other.outputs
            && self.sorted_components() == other.sorted_components()
    }
}

impl Eq for System {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    /// Component names are pairwise different.
    DistinctNames,
    /// Each channel has at most one writer.
    SingleWriter,
    /// System inputs are written by the environment only.
    EnvironmentInputs,
    /// Every component input is a system input or some component's output.
    ConnectedInputs,
    /// Every system output is produced by a component.
    ProducedOutputs,
    /// System inputs and outputs are disjoint (implied by the others).
    DisjointInterface,
}

impl Condition {
    /// Number of the condition; 0 for the derived disjointness check.
    pub fn number(self) -> u8 {
        match self {
            Condition::DistinctNames => 1,
            Condition::SingleWriter => 2,
            Condition::EnvironmentInputs => 3,
            Condition::ConnectedInputs => 4,
            Condition::ProducedOutputs => 5,
            Condition::DisjointInterface => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub subjects: Vec<String>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.condition {
            Condition::DistinctNames => "duplicate component name",
            Condition::SingleWriter => "channel written by several components",
            Condition::EnvironmentInputs => "system input written by a component",
            Condition::ConnectedInputs => "component input not connected",
            Condition::ProducedOutputs => "system output not produced",
            Condition::DisjointInterface => "channel is both system input and output",
        };
        match self.condition.number() {
            0 => write!(f, "{what}: {}", self.subjects.join(", ")),
            n => write!(f, "condition {n}, {what}: {}", self.subjects.join(", ")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub violations: Vec<Violation>,
}

impl ConsistencyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, condition: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }
}

impl fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "consistent");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl System {
    pub fn new(
        name: impl Into<String>,
        alphabet: Alphabet,
        inputs: ChannelSet,
        outputs: ChannelSet,
        components: Vec<Component>,
    ) -> Self {
        System {
            name: name.into(),
            alphabet,
            inputs,
            outputs,
            components,
            provenance: BTreeMap::new(),
        }
    }

    /// Checking bounds for this system's alphabet.
    pub fn bounds(&self, horizon: usize, bound: usize) -> Bounds {
        Bounds::new(horizon, bound, self.alphabet.len())
    }

    pub fn component(&self, name: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.name == name)
    }

    pub fn require(&self, name: &str) -> Result<&Component, ModelError> {
        self.component(name).ok_or_else(|| ModelError::UnknownComponent(name.to_string()))
    }

    pub fn sorted_components(&self) -> Vec<&Component> {
        let mut v: Vec<&Component> = self.components.iter().collect();
        v.sort_by(|a, b| a.name.cmp(&b.name).then_with(|| a.outputs().cmp(b.outputs())));
        v
    }

    /// `(in.C, out.C)`: unions of the component input and output sets.
    pub fn interface_sets(&self) -> (ChannelSet, ChannelSet) {
        let mut ins = ChannelSet::new();
        let mut outs = ChannelSet::new();
        for c in &self.components {
            ins.extend(c.inputs().iter().cloned());
            outs.extend(c.outputs().iter().cloned());
        }
        (ins, outs)
    }

    /// Every channel mentioned anywhere in the system.
    pub fn channels(&self) -> ChannelSet {
        let (ins, outs) = self.interface_sets();
        let mut all: ChannelSet = self.inputs.union(&self.outputs).cloned().collect();
        all.extend(ins);
        all.extend(outs);
        all
    }

    pub fn producer(&self, channel: &ChannelId) -> Option<&Component> {
        self.components.iter().find(|c| c.outputs().contains(channel))
    }

    pub fn readers(&self, channel: &ChannelId) -> Vec<&Component> {
        self.components.iter().filter(|c| c.inputs().contains(channel)).collect()
    }

    pub fn check_consistency(&self) -> ConsistencyReport {
        let mut violations = Vec::new();
        let mut names: BTreeMap<&str, usize> = BTreeMap::new();
        for c in &self.components {
            *names.entry(&c.name).or_default() += 1;
        }
        for (n, k) in names {
            if k > 1 {
                violations.push(Violation { condition: Condition::DistinctNames, subjects: vec![n.to_string()] });
            }
        }
        let mut writers: BTreeMap<&ChannelId, Vec<&str>> = BTreeMap::new();
        for c in &self.components {
            for o in c.outputs() {
                writers.entry(o).or_default().push(&c.name);
            }
        }
        for (ch, ws) in &writers {
            if ws.len() > 1 {
                let mut subjects = vec![ch.to_string()];
                subjects.extend(ws.iter().map(|w| w.to_string()));
                violations.push(Violation { condition: Condition::SingleWriter, subjects });
            }
        }
        let (in_c, out_c) = self.interface_sets();
        let clash: Vec<String> = self.inputs.intersection(&out_c).map(|c| c.to_string()).collect();
        if !clash.is_empty() {
            violations.push(Violation { condition: Condition::EnvironmentInputs, subjects: clash });
        }
        let dangling: Vec<String> = in_c
            .iter()
            .filter(|c| !out_c.contains(*c) && !self.inputs.contains(*c))
            .map(|c| c.to_string())
            .collect();
        if !dangling.is_empty() {
            violations.push(Violation { condition: Condition::ConnectedInputs, subjects: dangling });
        }
        let missing: Vec<String> = self.outputs.difference(&out_c).map(|c| c.to_string()).collect();
        if !missing.is_empty() {
            violations.push(Violation { condition: Condition::ProducedOutputs, subjects: missing });
        }
        let both: Vec<String> = self.inputs.intersection(&self.outputs).map(|c| c.to_string()).collect();
        if !both.is_empty() {
            violations.push(Violation { condition: Condition::DisjointInterface, subjects: both });
        }
        ConsistencyReport { violations }
    }

    pub fn ensure_consistent(&self) -> Result<(), ModelError> {
        let report = self.check_consistency();
        if report.passed() {
            Ok(())
        } else {
            Err(ModelError::Inconsistent(report))
        }
    }

    /// Provenance of `name` if it is still valid (the behavior did not
    /// change since linking).
    pub fn live_provenance(&self, name: &str) -> Option<&Provenance> {
        let c = self.component(name)?;
        self.provenance.get(name).filter(|p| &p.behavior == c.behavior())
    }
}

pub fn interface_sets(system: &System) -> (ChannelSet, ChannelSet) {
    system.interface_sets()
}

pub fn check_consistency(system: &System) -> ConsistencyReport {
    system.check_consistency()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streams::{ch, chans};

    fn copy(a: &str, b: &str) -> Behavior {
        Behavior::copy(&[(ch(a), ch(b))]).unwrap()
    }

    fn sys(inputs: &[&str], outputs: &[&str], comps: Vec<Component>) -> System {
        System::new("t", Alphabet::letters(1), chans(inputs), chans(outputs), comps)
    }

    #[test]
    fn empty_system() {
        let s = sys(&[], &[], vec![]);
        assert_eq!(s.interface_sets(), (ChannelSet::new(), ChannelSet::new()));
        assert!(s.check_consistency().passed());
    }

    #[test]
    fn single_component_sets() {
        let s = sys(&["p"], &["q"], vec![Component::new("c", copy("p", "q"))]);
        assert_eq!(s.interface_sets(), (chans(&["p"]), chans(&["q"])));
        assert!(s.check_consistency().passed());
    }

    #[test]
    fn each_condition_detected() {
        let dup = sys(&["p"], &[], vec![Component::new("c", copy("p", "q")), Component::new("c", copy("p", "r"))]);
        assert!(dup.check_consistency().violates(Condition::DistinctNames));
        let two = sys(&["p"], &[], vec![Component::new("a", copy("p", "q")), Component::new("b", copy("p", "q"))]);
        assert!(two.check_consistency().violates(Condition::SingleWriter));
        let env = sys(&["p", "q"], &[], vec![Component::new("a", copy("p", "q"))]);
        assert!(env.check_consistency().violates(Condition::EnvironmentInputs));
        let dangling = sys(&[], &[], vec![Component::new("a", copy("p", "q"))]);
        assert!(dangling.check_consistency().violates(Condition::ConnectedInputs));
        let missing = sys(&[], &["q"], vec![]);
        let r = missing.check_consistency();
        assert!(r.violates(Condition::ProducedOutputs));
        assert_eq!(r.violations.len(), 1);
    }

    #[test]
    fn broadcast_self_loop_and_unread_inputs_allowed() {
        let s = sys(
            &["p", "unused"],
            &["q"],
            vec![
                Component::new("a", copy("p", "q")),
                Component::new("b", copy("q", "r")),
                Component::new("c", Behavior::merge(&[ch("q"), ch("s")], ch("s"))),
            ],
        );
        assert!(s.check_consistency().passed(), "{}", s.check_consistency());
    }

    #[test]
    fn equality_ignores_order_and_name() {
        let a = sys(&["p"], &[], vec![Component::new("a", copy("p", "q")), Component::new("b", copy("q", "r"))]);
        let mut b = sys(&["p"], &[], vec![Component::new("b", copy("q", "r")), Component::new("a", copy("p", "q"))]);
        b.name = "other".into();
        assert_eq!(a, b);
    }
}
