//! Premise-checked refinement steps on systems.
//!
//! Every rule takes a system and its parameters and either returns the
//! transformed system with a [`StepReport`] listing how each premise was
//! discharged, or a [`StepError`] naming the first premise that failed. The
//! input system is never modified.

mod rules;

use std::fmt;
use std::sync::Arc;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::behavior::{Behavior, Bounds, ChannelSet, Counterexample, Outcome, Verdict};
use crate::model::System;
use crate::semantics::Invariant;
use crate::streams::{Alphabet, ChannelId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    /// Syntactic facts where they suffice, bounded enumeration otherwise.
    #[default]
    StructuralFirst,
    /// Every semantic premise is enumerated.
    Enumerative,
    /// Semantic premises are recorded as unchecked obligations.
    Assumed,
}

impl Mode {
    pub fn keyword(self) -> &'static str {
        match self {
            Mode::StructuralFirst => "structural-first",
            Mode::Enumerative => "enumerative",
            Mode::Assumed => "assumed",
        }
    }

    pub fn parse(text: &str) -> Option<Mode> {
        [Mode::StructuralFirst, Mode::Enumerative, Mode::Assumed].into_iter().find(|m| m.keyword() == text)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CheckConfig {
    pub horizon: usize,
    pub bound: usize,
    pub mode: Mode,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { horizon: 3, bound: 1, mode: Mode::StructuralFirst }
    }
}

impl CheckConfig {
    pub fn new(horizon: usize, bound: usize, mode: Mode) -> Self {
        CheckConfig { horizon, bound, mode }
    }

    pub fn bounds(&self, alphabet: &Alphabet) -> Bounds {
        Bounds::new(self.horizon, self.bound, alphabet.len())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    RefineBehavior,
    AddOutput,
    RemoveOutput,
    AddInput,
    RemoveInput,
    AddComponentBasic,
    AddComponent,
    RemoveComponent,
    Expand,
    Fold,
    RefineWithInvariant,
    Rename,
}

impl Rule {
    pub const ALL: [Rule; 12] = [
        Rule::RefineBehavior,
        Rule::AddOutput,
        Rule::RemoveOutput,
        Rule::AddInput,
        Rule::RemoveInput,
        Rule::AddComponentBasic,
        Rule::AddComponent,
        Rule::RemoveComponent,
        Rule::Expand,
        Rule::Fold,
        Rule::RefineWithInvariant,
        Rule::Rename,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Rule::RefineBehavior => "refine",
            Rule::AddOutput => "add-output",
            Rule::RemoveOutput => "remove-output",
            Rule::AddInput => "add-input",
            Rule::RemoveInput => "remove-input",
            Rule::AddComponentBasic => "add-component-basic",
            Rule::AddComponent => "add-component",
            Rule::RemoveComponent => "remove-component",
            Rule::Expand => "expand",
            Rule::Fold => "fold",
            Rule::RefineWithInvariant => "refine-with-invariant",
            Rule::Rename => "rename",
        }
    }

    /// Rules whose result has the same black box as their input.
    pub fn preserves_behavior(self) -> bool {
        !matches!(self, Rule::RefineBehavior | Rule::RefineWithInvariant)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RenameKind {
    Channel,
    Component,
}

/// One refinement step with its parameters.
#[derive(Clone, Debug)]
pub enum RuleApplication {
    RefineBehavior { component: String, behavior: Behavior },
    /// `bound` caps the intervals of the new unconstrained output; the check
    /// bound is used when absent.
    AddOutput { component: String, channel: ChannelId, bound: Option<usize> },
    RemoveOutput { component: String, channel: ChannelId },
    AddInput { component: String, channel: ChannelId },
    RemoveInput { component: String, channel: ChannelId },
    AddComponentBasic { name: String },
    AddComponent { name: String, inputs: ChannelSet, outputs: ChannelSet, behavior: Behavior },
    RemoveComponent { name: String },
    /// Without an explicit subsystem the recorded provenance is used.
    Expand { component: String, subsystem: Option<Arc<System>> },
    Fold { name: String, members: Vec<String>, inputs: ChannelSet, outputs: ChannelSet },
    RefineWithInvariant { component: String, behavior: Behavior, invariant: Invariant },
    Rename { kind: RenameKind, pairs: Vec<(String, String)> },
}

impl RuleApplication {
    pub fn rule(&self) -> Rule {
        match self {
            RuleApplication::RefineBehavior { .. } => Rule::RefineBehavior,
            RuleApplication::AddOutput { .. } => Rule::AddOutput,
            RuleApplication::RemoveOutput { .. } => Rule::RemoveOutput,
            RuleApplication::AddInput { .. } => Rule::AddInput,
            RuleApplication::RemoveInput { .. } => Rule::RemoveInput,
            RuleApplication::AddComponentBasic { .. } => Rule::AddComponentBasic,
            RuleApplication::AddComponent { .. } => Rule::AddComponent,
            RuleApplication::RemoveComponent { .. } => Rule::RemoveComponent,
            RuleApplication::Expand { .. } => Rule::Expand,
            RuleApplication::Fold { .. } => Rule::Fold,
            RuleApplication::RefineWithInvariant { .. } => Rule::RefineWithInvariant,
            RuleApplication::Rename { .. } => Rule::Rename,
        }
    }
}

/// One code per distinct premise, plus the consistency checks that frame
/// every step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PremiseCode {
    InputInconsistent,
    ResultInconsistent,
    UnknownComponent,
    SignatureMismatch,
    BehaviorNotRefined,
    OutputNotFresh,
    UnknownChannel,
    OutputInSystemInterface,
    OutputStillRead,
    InputDangling,
    InputAlreadyPresent,
    InputDependence,
    DuplicateName,
    OutputsNotFresh,
    InputsDangling,
    ComponentHasOutputs,
    NoSubsystem,
    SubsystemInconsistent,
    InterfaceMismatch,
    InternalChannelClash,
    SubsystemWritesSystemInput,
    ComponentNameClash,
    BehaviorNotCertified,
    FoldInputsTooSmall,
    FoldInputsNotAvailable,
    FoldOutputsTooSmall,
    FoldOutputsNotProduced,
    InvariantReference,
    InvariantInvalid,
    ConditionalRefinementFails,
    UnknownInvariant,
    UnknownId,
    IdClash,
    InvalidIdentifier,
}

impl PremiseCode {
    pub fn keyword(self) -> &'static str {
        match self {
            PremiseCode::InputInconsistent => "input-inconsistent",
            PremiseCode::ResultInconsistent => "result-inconsistent",
            PremiseCode::UnknownComponent => "unknown-component",
            PremiseCode::SignatureMismatch => "signature-mismatch",
            PremiseCode::BehaviorNotRefined => "behavior-not-refined",
            PremiseCode::OutputNotFresh => "output-not-fresh",
            PremiseCode::UnknownChannel => "unknown-channel",
            PremiseCode::OutputInSystemInterface => "output-in-system-interface",
            PremiseCode::OutputStillRead => "output-still-read",
            PremiseCode::InputDangling => "input-dangling",
            PremiseCode::InputAlreadyPresent => "input-already-present",
            PremiseCode::InputDependence => "input-dependence",
            PremiseCode::DuplicateName => "duplicate-name",
            PremiseCode::OutputsNotFresh => "outputs-not-fresh",
            PremiseCode::InputsDangling => "inputs-dangling",
            PremiseCode::ComponentHasOutputs => "component-has-outputs",
            PremiseCode::NoSubsystem => "no-subsystem",
            PremiseCode::SubsystemInconsistent => "subsystem-inconsistent",
            PremiseCode::InterfaceMismatch => "interface-mismatch",
            PremiseCode::InternalChannelClash => "internal-channel-clash",
            PremiseCode::SubsystemWritesSystemInput => "subsystem-writes-system-input",
            PremiseCode::ComponentNameClash => "component-name-clash",
            PremiseCode::BehaviorNotCertified => "behavior-not-certified",
            PremiseCode::FoldInputsTooSmall => "fold-inputs-too-small",
            PremiseCode::FoldInputsNotAvailable => "fold-inputs-not-available",
            PremiseCode::FoldOutputsTooSmall => "fold-outputs-too-small",
            PremiseCode::FoldOutputsNotProduced => "fold-outputs-not-produced",
            PremiseCode::InvariantReference => "invariant-reference",
            PremiseCode::InvariantInvalid => "invariant-invalid",
            PremiseCode::ConditionalRefinementFails => "conditional-refinement-fails",
            PremiseCode::UnknownInvariant => "unknown-invariant",
            PremiseCode::UnknownId => "unknown-id",
            PremiseCode::IdClash => "id-clash",
            PremiseCode::InvalidIdentifier => "invalid-identifier",
        }
    }
}

impl fmt::Display for PremiseCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Structural,
    Enumerative(Bounds),
    Assumed,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Structural => f.write_str("structural"),
            Method::Enumerative(b) => write!(f, "enumerative(H={},B={})", b.horizon, b.bound),
            Method::Assumed => f.write_str("assumed"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Premise {
    pub code: PremiseCode,
    pub text: String,
    pub method: Method,
    pub outcome: Outcome,
    /// Rendered counterexample or violation details for failed premises.
    pub detail: Option<String>,
}

impl Premise {
    pub fn passed(&self) -> bool {
        self.outcome != Outcome::Fails
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefinementKind {
    Equality,
    Subset,
}

impl fmt::Display for RefinementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RefinementKind::Equality => "equality",
            RefinementKind::Subset => "subset",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepReport {
    pub rule: Rule,
    pub premises: Vec<Premise>,
    /// Digest of the resulting system.
    pub digest: String,
    pub kind: RefinementKind,
    pub bounds: Bounds,
}

impl StepReport {
    pub fn assumed(&self) -> usize {
        self.premises.iter().filter(|p| p.method == Method::Assumed).count()
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{rule}: premise {code} failed: {message}")]
pub struct StepError {
    pub rule: Rule,
    pub code: PremiseCode,
    pub message: String,
    /// Premises checked up to and including the failed one.
    pub premises: Vec<Premise>,
    /// Digest of the (unchanged) input system.
    pub digest: String,
}

/// SHA-256 of the canonical text of the system.
pub fn digest(system: &System) -> String {
    hex::encode(Sha256::digest(crate::scriptio::canonical_text(system).as_bytes()))
}

pub fn render_counterexample(alphabet: &Alphabet, cex: &Counterexample) -> String {
    match cex {
        Counterexample::Output { input, output } => format!(
            "input {} yields output {}",
            alphabet.render_tuple(input),
            alphabet.render_tuple(output)
        ),
        Counterexample::Dependence { first, second } => format!(
            "inputs {} and {} give different outputs",
            alphabet.render_tuple(first),
            alphabet.render_tuple(second)
        ),
        Counterexample::Valuation { tuple } => format!("valuation {} violates it", alphabet.render_tuple(tuple)),
        Counterexample::Conditional { tuple, output } => format!(
            "under {} the candidate yields {}",
            alphabet.render_tuple(tuple),
            alphabet.render_tuple(output)
        ),
    }
}

pub(crate) fn verdict_detail(alphabet: &Alphabet, verdict: &Verdict) -> Option<String> {
    verdict.counterexample.as_ref().map(|c| render_counterexample(alphabet, c))
}

/// Applies one step. On failure the input system is left as it was and the
/// error carries its digest.
pub fn apply_step(
    system: &System,
    step: &RuleApplication,
    config: &CheckConfig,
) -> Result<(System, StepReport), StepError> {
    rules::apply(system, step, config)
}

pub fn refine_behavior(
    system: &System,
    component: &str,
    behavior: Behavior,
    config: &CheckConfig,
) -> Result<(System, StepReport), StepError> {
    apply_step(system, &RuleApplication::RefineBehavior { component: component.into(), behavior }, config)
}

pub fn add_output(
    system: &System,
    component: &str,
    channel: ChannelId,
    config: &CheckConfig,
) -> Result<(System, StepReport), StepError> {
    apply_step(system, &RuleApplication::AddOutput { component: component.into(), channel, bound: None }, config)
}

pub fn remove_output(
    system: &System,
    component: &str,
    channel: ChannelId,
    config: &CheckConfig,
) -> Result<(System, StepReport), StepError> {
    apply_step(system, &RuleApplication::RemoveOutput { component: component.into(), channel }, config)
}

pub fn add_input(
    system: &System,
    component: &str,
    channel: ChannelId,
    config: &CheckConfig,
) -> Result<(System, StepReport), StepError> {
    apply_step(system, &RuleApplication::AddInput { component: component.into(), channel }, config)
}

pub fn remove_input(
    system: &System,
    component: &str,
    channel: ChannelId,
    config: &CheckConfig,
) -> Result<(System, StepReport), StepError> {
    apply_step(system, &RuleApplication::RemoveInput { component: component.into(), channel }, config)
}

pub fn add_component_basic(system: &System, name: &str, config: &CheckConfig) -> Result<(System, StepReport), StepError> {
    apply_step(system, &RuleApplication::AddComponentBasic { name: name.into() }, config)
}

pub fn add_component(
    system: &System,
    name: &str,
    behavior: Behavior,
    config: &CheckConfig,
) -> Result<(System, StepReport), StepError> {
    let (inputs, outputs) = (behavior.inputs().clone(), behavior.outputs().clone());
    apply_step(system, &RuleApplication::AddComponent { name: name.into(), inputs, outputs, behavior }, config)
}

pub fn remove_component(system: &System, name: &str, config: &CheckConfig) -> Result<(System, StepReport), StepError> {
    apply_step(system, &RuleApplication::RemoveComponent { name: name.into() }, config)
}

pub fn expand_component(
    system: &System,
    component: &str,
    subsystem: Option<Arc<System>>,
    config: &CheckConfig,
) -> Result<(System, StepReport), StepError> {
    apply_step(system, &RuleApplication::Expand { component: component.into(), subsystem }, config)
}

pub fn fold_components(
    system: &System,
    name: &str,
    members: &[&str],
    inputs: ChannelSet,
    outputs: ChannelSet,
    config: &CheckConfig,
) -> Result<(System, StepReport), StepError> {
    let members = members.iter().map(|m| m.to_string()).collect();
    apply_step(system, &RuleApplication::Fold { name: name.into(), members, inputs, outputs }, config)
}

pub fn refine_with_invariant(
    system: &System,
    component: &str,
    behavior: Behavior,
    invariant: Invariant,
    config: &CheckConfig,
) -> Result<(System, StepReport), StepError> {
    apply_step(
        system,
        &RuleApplication::RefineWithInvariant { component: component.into(), behavior, invariant },
        config,
    )
}

pub fn rename(
    system: &System,
    kind: RenameKind,
    pairs: &[(&str, &str)],
    config: &CheckConfig,
) -> Result<(System, StepReport), StepError> {
    let pairs = pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    apply_step(system, &RuleApplication::Rename { kind, pairs }, config)
}
