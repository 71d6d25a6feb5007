use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{
    digest, verdict_detail, CheckConfig, Method, Mode, Premise, PremiseCode, RefinementKind, RenameKind, Rule,
    RuleApplication, StepError, StepReport,
};
use crate::behavior::{
    equivalent_enumerative, independent_enumerative, refines_enumerative, Behavior, Bounds, ChannelSet, Outcome,
    Verdict,
};
use crate::model::{Component, Provenance, System};
use crate::semantics::{self, channel_domains, conditional_refines, invariant_valid, Invariant, SemanticsError};
use crate::streams::{is_identifier, ChannelId, Domains};

fn names(set: &ChannelSet) -> String {
    let v: Vec<&str> = set.iter().map(|c| c.as_str()).collect();
    format!("{{{}}}", v.join(", "))
}

struct Ctx<'a> {
    system: &'a System,
    rule: Rule,
    config: CheckConfig,
    bounds: Bounds,
    premises: Vec<Premise>,
    domains: Option<Domains>,
}

impl<'a> Ctx<'a> {
    fn fail(&self, code: PremiseCode, message: String) -> StepError {
        StepError {
            rule: self.rule,
            code,
            message,
            premises: self.premises.clone(),
            digest: digest(self.system),
        }
    }

    /// Records a syntactic premise.
    fn check(
        &mut self,
        code: PremiseCode,
        text: impl Into<String>,
        ok: bool,
        detail: impl FnOnce() -> String,
    ) -> Result<(), StepError> {
        let text = text.into();
        if ok {
            self.premises.push(Premise { code, text, method: Method::Structural, outcome: Outcome::Holds, detail: None });
            return Ok(());
        }
        let d = detail();
        self.premises.push(Premise {
            code,
            text: text.clone(),
            method: Method::Structural,
            outcome: Outcome::Fails,
            detail: Some(d.clone()),
        });
        Err(self.fail(code, format!("{text}: {d}")))
    }

    /// Frame check that is only reported when it fails.
    fn guard(&mut self, code: PremiseCode, text: &str, ok: bool, detail: impl FnOnce() -> String) -> Result<(), StepError> {
        if ok {
            Ok(())
        } else {
            self.check(code, text, false, detail)
        }
    }

    /// Records a semantic premise, discharged according to the mode:
    /// structurally when `evident` (except in enumerative mode), as an
    /// obligation in assumed mode, and by `enumerate` otherwise.
    fn discharge(
        &mut self,
        code: PremiseCode,
        text: impl Into<String>,
        evident: bool,
        enumerate: impl FnOnce(&mut Self) -> Result<Verdict, SemanticsError>,
    ) -> Result<(), StepError> {
        let text = text.into();
        let mode = self.config.mode;
        if evident && mode != Mode::Enumerative {
            self.premises.push(Premise { code, text, method: Method::Structural, outcome: Outcome::Holds, detail: None });
            return Ok(());
        }
        if mode == Mode::Assumed {
            self.premises.push(Premise { code, text, method: Method::Assumed, outcome: Outcome::Holds, detail: None });
            return Ok(());
        }
        let verdict = match enumerate(self) {
            Ok(v) => v,
            Err(e) => {
                self.premises.push(Premise {
                    code,
                    text: text.clone(),
                    method: Method::Enumerative(self.bounds),
                    outcome: Outcome::Fails,
                    detail: Some(e.to_string()),
                });
                return Err(self.fail(code, format!("{text}: {e}")));
            }
        };
        let detail = verdict_detail(&self.system.alphabet, &verdict);
        let outcome = verdict.outcome;
        self.premises.push(Premise {
            code,
            text: text.clone(),
            method: Method::Enumerative(self.bounds),
            outcome,
            detail: detail.clone(),
        });
        if outcome == Outcome::Fails {
            return Err(self.fail(code, format!("{text}: {}", detail.unwrap_or_default())));
        }
        Ok(())
    }

    fn component(&mut self, name: &str) -> Result<Component, StepError> {
        let found = self.system.component(name).cloned();
        self.check(PremiseCode::UnknownComponent, format!("component `{name}` exists"), found.is_some(), || {
            "no such component".into()
        })?;
        Ok(found.expect("checked"))
    }

    fn domains_for(&mut self, channels: &ChannelSet) -> Result<Domains, SemanticsError> {
        if self.domains.is_none() {
            self.domains = Some(channel_domains(self.system, self.bounds)?);
        }
        let all = self.domains.as_ref().expect("just computed");
        Ok(channels.iter().map(|c| (c.clone(), all[c].clone())).collect())
    }

    /// `in.S ∪ out.C`
    fn connected(&self) -> ChannelSet {
        let (_, out_c) = self.system.interface_sets();
        self.system.inputs.union(&out_c).cloned().collect()
    }
}

/// Copy of `system` with component `name` given a new behavior. A changed
/// behavior invalidates any provenance link.
fn with_behavior(system: &System, name: &str, behavior: Behavior) -> System {
    let mut s = system.clone();
    for c in &mut s.components {
        if c.name() == name {
            if c.behavior() != &behavior {
                s.provenance.remove(name);
            }
            *c = c.with_behavior(behavior.clone());
        }
    }
    s
}

pub(super) fn apply(
    system: &System,
    step: &RuleApplication,
    config: &CheckConfig,
) -> Result<(System, StepReport), StepError> {
    let mut ctx = Ctx {
        system,
        rule: step.rule(),
        config: *config,
        bounds: config.bounds(&system.alphabet),
        premises: Vec::new(),
        domains: None,
    };
    let before = system.check_consistency();
    ctx.guard(PremiseCode::InputInconsistent, "input system is consistent", before.passed(), || before.to_string())?;
    let (result, kind) = match step {
        RuleApplication::RefineBehavior { component, behavior } => refine_behavior(&mut ctx, component, behavior)?,
        RuleApplication::AddOutput { component, channel, bound } => add_output(&mut ctx, component, channel, *bound)?,
        RuleApplication::RemoveOutput { component, channel } => remove_output(&mut ctx, component, channel)?,
        RuleApplication::AddInput { component, channel } => add_input(&mut ctx, component, channel)?,
        RuleApplication::RemoveInput { component, channel } => remove_input(&mut ctx, component, channel)?,
        RuleApplication::AddComponentBasic { name } => add_component_basic(&mut ctx, name)?,
        RuleApplication::AddComponent { name, inputs, outputs, behavior } => {
            add_component(&mut ctx, name, inputs, outputs, behavior)?
        }
        RuleApplication::RemoveComponent { name } => remove_component(&mut ctx, name)?,
        RuleApplication::Expand { component, subsystem } => expand(&mut ctx, component, subsystem.clone())?,
        RuleApplication::Fold { name, members, inputs, outputs } => fold(&mut ctx, name, members, inputs, outputs)?,
        RuleApplication::RefineWithInvariant { component, behavior, invariant } => {
            refine_with_invariant(&mut ctx, component, behavior, invariant)?
        }
        RuleApplication::Rename { kind, pairs } => rename(&mut ctx, *kind, pairs)?,
    };
    let after = result.check_consistency();
    ctx.guard(PremiseCode::ResultInconsistent, "result is consistent", after.passed(), || after.to_string())?;
    let report = StepReport { rule: ctx.rule, premises: ctx.premises, digest: digest(&result), kind, bounds: ctx.bounds };
    Ok((result, report))
}

type Outcomes = Result<(System, RefinementKind), StepError>;

fn signature(ctx: &mut Ctx, component: &Component, behavior: &Behavior) -> Result<(), StepError> {
    let ok = behavior.inputs() == component.inputs() && behavior.outputs() == component.outputs();
    ctx.check(
        PremiseCode::SignatureMismatch,
        format!("new behavior has the signature of `{}`", component.name()),
        ok,
        || {
            format!(
                "expected {} -> {}, got {} -> {}",
                names(component.inputs()),
                names(component.outputs()),
                names(behavior.inputs()),
                names(behavior.outputs())
            )
        },
    )
}

fn refine_behavior(ctx: &mut Ctx, name: &str, behavior: &Behavior) -> Outcomes {
    let c = ctx.component(name)?;
    signature(ctx, &c, behavior)?;
    let current = c.behavior().clone();
    ctx.discharge(
        PremiseCode::BehaviorNotRefined,
        format!("new behavior refines the behavior of `{name}`"),
        &current == behavior,
        |ctx| {
            let d = ctx.domains_for(current.inputs())?;
            Ok(refines_enumerative(behavior, &current, &d, ctx.bounds)?)
        },
    )?;
    Ok((with_behavior(ctx.system, name, behavior.clone()), RefinementKind::Subset))
}

fn add_output(ctx: &mut Ctx, name: &str, channel: &ChannelId, bound: Option<usize>) -> Outcomes {
    let c = ctx.component(name)?;
    let used = ctx.connected();
    ctx.check(
        PremiseCode::OutputNotFresh,
        format!("`{channel}` is not in in.S ∪ out.C"),
        !used.contains(channel),
        || "channel already in use".into(),
    )?;
    let b = c
        .behavior()
        .chaos_extend(channel, bound.unwrap_or(ctx.bounds.bound), ctx.bounds.symbols)
        .map_err(|e| ctx.fail(PremiseCode::OutputNotFresh, e.to_string()))?;
    Ok((with_behavior(ctx.system, name, b), RefinementKind::Equality))
}

fn remove_output(ctx: &mut Ctx, name: &str, channel: &ChannelId) -> Outcomes {
    let c = ctx.component(name)?;
    ctx.check(
        PremiseCode::UnknownChannel,
        format!("`{channel}` is an output of `{name}`"),
        c.outputs().contains(channel),
        || "not an output".into(),
    )?;
    ctx.check(
        PremiseCode::OutputInSystemInterface,
        format!("`{channel}` is not a system output"),
        !ctx.system.outputs.contains(channel),
        || "channel is in out.S".into(),
    )?;
    let readers: Vec<String> = ctx.system.readers(channel).iter().map(|r| r.name().to_string()).collect();
    ctx.check(
        PremiseCode::OutputStillRead,
        format!("`{channel}` is not read by any component"),
        readers.is_empty(),
        || format!("read by {}", readers.join(", ")),
    )?;
    let mut outs = c.outputs().clone();
    outs.remove(channel);
    let b = c.behavior().adapt(c.inputs(), &outs).expect("restriction of outputs");
    Ok((with_behavior(ctx.system, name, b), RefinementKind::Equality))
}

fn add_input(ctx: &mut Ctx, name: &str, channel: &ChannelId) -> Outcomes {
    let c = ctx.component(name)?;
    let used = ctx.connected();
    ctx.check(
        PremiseCode::InputDangling,
        format!("`{channel}` is a system input or produced by a component"),
        used.contains(channel),
        || "channel is not connected".into(),
    )?;
    ctx.check(
        PremiseCode::InputAlreadyPresent,
        format!("`{channel}` is not yet an input of `{name}`"),
        !c.inputs().contains(channel),
        || "already an input".into(),
    )?;
    let mut ins = c.inputs().clone();
    ins.insert(channel.clone());
    let b = c.behavior().adapt(&ins, c.outputs()).expect("extension of inputs");
    Ok((with_behavior(ctx.system, name, b), RefinementKind::Equality))
}

fn remove_input(ctx: &mut Ctx, name: &str, channel: &ChannelId) -> Outcomes {
    let c = ctx.component(name)?;
    ctx.check(
        PremiseCode::UnknownChannel,
        format!("`{channel}` is an input of `{name}`"),
        c.inputs().contains(channel),
        || "not an input".into(),
    )?;
    let b = c.behavior().clone();
    ctx.discharge(
        PremiseCode::InputDependence,
        format!("behavior of `{name}` does not depend on `{channel}`"),
        !b.reads().contains(channel),
        |ctx| {
            let d = ctx.domains_for(b.inputs())?;
            Ok(independent_enumerative(&b, channel, &d, ctx.bounds)?)
        },
    )?;
    Ok((with_behavior(ctx.system, name, b.restrict_input_unchecked(channel)), RefinementKind::Equality))
}

fn fresh_name(ctx: &mut Ctx, name: &str, others: &[&Component]) -> Result<(), StepError> {
    ctx.check(
        PremiseCode::DuplicateName,
        format!("no other component is named `{name}`"),
        !others.iter().any(|c| c.name() == name),
        || "name taken".into(),
    )
}

fn add_component_basic(ctx: &mut Ctx, name: &str) -> Outcomes {
    let all: Vec<&Component> = ctx.system.components.iter().collect();
    fresh_name(ctx, name, &all)?;
    let mut s = ctx.system.clone();
    s.components.push(Component::new(name, Behavior::unit()));
    Ok((s, RefinementKind::Equality))
}

fn add_component(ctx: &mut Ctx, name: &str, ip: &ChannelSet, op: &ChannelSet, behavior: &Behavior) -> Outcomes {
    let all: Vec<&Component> = ctx.system.components.iter().collect();
    fresh_name(ctx, name, &all)?;
    let ok = behavior.inputs() == ip && behavior.outputs() == op;
    ctx.check(PremiseCode::SignatureMismatch, format!("behavior has signature {} -> {}", names(ip), names(op)), ok, || {
        format!("got {} -> {}", names(behavior.inputs()), names(behavior.outputs()))
    })?;
    let used = ctx.connected();
    let clash: ChannelSet = op.intersection(&used).cloned().collect();
    ctx.check(
        PremiseCode::OutputsNotFresh,
        format!("outputs {} are disjoint from in.S ∪ out.C", names(op)),
        clash.is_empty(),
        || format!("{} already in use", names(&clash)),
    )?;
    let dangling: ChannelSet = ip.iter().filter(|c| !used.contains(*c) && !op.contains(*c)).cloned().collect();
    ctx.check(
        PremiseCode::InputsDangling,
        format!("inputs {} are connected", names(ip)),
        dangling.is_empty(),
        || format!("{} not connected", names(&dangling)),
    )?;
    let mut s = ctx.system.clone();
    s.components.push(Component::new(name, behavior.clone()));
    Ok((s, RefinementKind::Equality))
}

fn remove_component(ctx: &mut Ctx, name: &str) -> Outcomes {
    let c = ctx.component(name)?;
    ctx.check(
        PremiseCode::ComponentHasOutputs,
        format!("`{name}` has no outputs"),
        c.outputs().is_empty(),
        || format!("outputs {}", names(c.outputs())),
    )?;
    let mut s = ctx.system.clone();
    s.components.retain(|x| x.name() != name);
    s.provenance.remove(name);
    Ok((s, RefinementKind::Equality))
}

fn expand(ctx: &mut Ctx, name: &str, given: Option<Arc<System>>) -> Outcomes {
    let c = ctx.component(name)?;
    let link = ctx.system.live_provenance(name).cloned();
    let sub = given.clone().or_else(|| link.as_ref().map(|p| p.subsystem.clone()));
    ctx.check(
        PremiseCode::NoSubsystem,
        format!("a sub-architecture for `{name}` is given or recorded"),
        sub.is_some(),
        || "none given and no valid provenance".into(),
    )?;
    let t = sub.expect("checked");
    let report = t.check_consistency();
    ctx.check(PremiseCode::SubsystemInconsistent, "sub-architecture is consistent", report.passed(), || {
        report.to_string()
    })?;
    let ok = t.inputs == *c.inputs() && t.outputs == *c.outputs() && t.alphabet == ctx.system.alphabet;
    ctx.check(
        PremiseCode::InterfaceMismatch,
        format!("sub-architecture interface is {} -> {}", names(c.inputs()), names(c.outputs())),
        ok,
        || format!("got {} -> {}", names(&t.inputs), names(&t.outputs)),
    )?;
    let (_, out_t) = t.interface_sets();
    let writes_input: ChannelSet = out_t.intersection(&ctx.system.inputs).cloned().collect();
    ctx.check(
        PremiseCode::SubsystemWritesSystemInput,
        "sub-architecture writes no system input",
        writes_input.is_empty(),
        || format!("writes {}", names(&writes_input)),
    )?;
    let taken = ctx.system.channels();
    let clash: ChannelSet = out_t
        .difference(&t.outputs)
        .filter(|ch| taken.contains(*ch) && !ctx.system.inputs.contains(*ch))
        .cloned()
        .collect();
    ctx.check(
        PremiseCode::InternalChannelClash,
        "internal channels of the sub-architecture are fresh",
        clash.is_empty(),
        || format!("{} already used", names(&clash)),
    )?;
    let clashing: Vec<&str> = t
        .components
        .iter()
        .map(|x| x.name())
        .filter(|n| ctx.system.components.iter().any(|y| y.name() == *n && y.name() != name))
        .collect();
    ctx.check(
        PremiseCode::ComponentNameClash,
        "sub-architecture component names are fresh",
        clashing.is_empty(),
        || clashing.join(", "),
    )?;
    let linked = link.as_ref().is_some_and(|p| *p.subsystem == *t);
    let text = if linked {
        format!("behavior of `{name}` is the black box of the sub-architecture (recorded provenance)")
    } else {
        format!("behavior of `{name}` is the black box of the sub-architecture")
    };
    let bb = semantics::black_box(&t).map_err(|e| ctx.fail(PremiseCode::SubsystemInconsistent, e.to_string()))?;
    let current = c.behavior().clone();
    ctx.discharge(PremiseCode::BehaviorNotCertified, text, linked || bb == current, |ctx| {
        let d = ctx.domains_for(current.inputs())?;
        Ok(equivalent_enumerative(&current, &bb, &d, ctx.bounds)?)
    })?;
    let mut s = ctx.system.clone();
    s.components.retain(|x| x.name() != name);
    s.components.extend(t.components.iter().cloned());
    s.provenance.remove(name);
    for (k, v) in &t.provenance {
        s.provenance.insert(k.clone(), v.clone());
    }
    Ok((s, RefinementKind::Equality))
}

fn fold(ctx: &mut Ctx, name: &str, members: &[String], it: &ChannelSet, ot: &ChannelSet) -> Outcomes {
    let mut picked: Vec<Component> = Vec::new();
    let mut seen = BTreeSet::new();
    for m in members {
        let c = ctx.component(m)?;
        if seen.insert(m.clone()) {
            picked.push(c);
        }
    }
    let (mut in_t, mut out_t) = (ChannelSet::new(), ChannelSet::new());
    for c in &picked {
        in_t.extend(c.inputs().iter().cloned());
        out_t.extend(c.outputs().iter().cloned());
    }
    let missing: ChannelSet = in_t.difference(&out_t).filter(|c| !it.contains(*c)).cloned().collect();
    ctx.check(
        PremiseCode::FoldInputsTooSmall,
        format!("inputs {} cover the channels the group reads from outside", names(it)),
        missing.is_empty(),
        || format!("{} missing", names(&missing)),
    )?;
    let available = ctx.connected();
    let bad: ChannelSet = it.iter().filter(|c| !available.contains(*c) || ot.contains(*c)).cloned().collect();
    ctx.check(
        PremiseCode::FoldInputsNotAvailable,
        format!("inputs {} lie in (in.S ∪ out.C) minus the fold outputs", names(it)),
        bad.is_empty(),
        || format!("{} not available", names(&bad)),
    )?;
    let rest: Vec<&Component> = ctx.system.components.iter().filter(|c| !seen.contains(c.name())).collect();
    let mut needed: ChannelSet = ctx.system.outputs.clone();
    for c in &rest {
        needed.extend(c.inputs().iter().cloned());
    }
    let hidden: ChannelSet = out_t.intersection(&needed).filter(|c| !ot.contains(*c)).cloned().collect();
    ctx.check(
        PremiseCode::FoldOutputsTooSmall,
        format!("outputs {} include everything used outside the group", names(ot)),
        hidden.is_empty(),
        || format!("{} would be hidden", names(&hidden)),
    )?;
    let extra: ChannelSet = ot.difference(&out_t).cloned().collect();
    ctx.check(
        PremiseCode::FoldOutputsNotProduced,
        format!("outputs {} are produced by the group", names(ot)),
        extra.is_empty(),
        || format!("{} not produced", names(&extra)),
    )?;
    fresh_name(ctx, name, &rest)?;
    let mut sub = System::new(name, ctx.system.alphabet.clone(), it.clone(), ot.clone(), picked.clone());
    for c in &picked {
        if let Some(p) = ctx.system.provenance.get(c.name()) {
            sub.provenance.insert(c.name().to_string(), p.clone());
        }
    }
    let report = sub.check_consistency();
    ctx.check(PremiseCode::SubsystemInconsistent, "folded group forms a consistent system", report.passed(), || {
        report.to_string()
    })?;
    let bb = semantics::black_box(&sub).map_err(|e| ctx.fail(PremiseCode::SubsystemInconsistent, e.to_string()))?;
    let mut s = ctx.system.clone();
    s.components.retain(|c| !seen.contains(c.name()));
    for m in &seen {
        s.provenance.remove(m);
    }
    s.components.push(Component::new(name, bb.clone()));
    s.provenance.insert(name.to_string(), Provenance { subsystem: Arc::new(sub), behavior: bb, bounds: None });
    Ok((s, RefinementKind::Equality))
}

fn refine_with_invariant(ctx: &mut Ctx, name: &str, behavior: &Behavior, psi: &Invariant) -> Outcomes {
    let c = ctx.component(name)?;
    signature(ctx, &c, behavior)?;
    let available = ctx.connected();
    let unknown: ChannelSet = psi.channels().difference(&available).cloned().collect();
    ctx.check(
        PremiseCode::InvariantReference,
        format!("invariant `{}` refers only to channels in in.S ∪ out.C", psi.name()),
        unknown.is_empty(),
        || format!("{} unknown", names(&unknown)),
    )?;
    ctx.discharge(
        PremiseCode::InvariantInvalid,
        format!("invariant `{}` holds for every admitted valuation", psi.name()),
        psi.is_trivial(),
        |ctx| invariant_valid(ctx.system, psi, ctx.bounds),
    )?;
    let current = c.behavior().clone();
    ctx.discharge(
        PremiseCode::ConditionalRefinementFails,
        format!("new behavior refines the behavior of `{name}` under `{}`", psi.name()),
        &current == behavior,
        |ctx| conditional_refines(ctx.system, name, behavior, psi, ctx.bounds),
    )?;
    Ok((with_behavior(ctx.system, name, behavior.clone()), RefinementKind::Subset))
}

fn rename(ctx: &mut Ctx, kind: RenameKind, pairs: &[(String, String)]) -> Outcomes {
    let news: BTreeSet<&str> = pairs.iter().map(|(_, n)| n.as_str()).collect();
    let olds: BTreeSet<&str> = pairs.iter().map(|(o, _)| o.as_str()).collect();
    let invalid: Vec<&str> = news.iter().copied().filter(|n| !is_identifier(n)).collect();
    ctx.check(PremiseCode::InvalidIdentifier, "new names are identifiers", invalid.is_empty(), || invalid.join(", "))?;
    match kind {
        RenameKind::Component => {
            let existing: BTreeSet<&str> = ctx.system.components.iter().map(|c| c.name()).collect();
            let unknown: Vec<&str> = olds.iter().copied().filter(|o| !existing.contains(o)).collect();
            ctx.check(PremiseCode::UnknownId, "renamed components exist", unknown.is_empty(), || unknown.join(", "))?;
            let clash: Vec<&str> = news.iter().copied().filter(|n| existing.contains(n)).collect();
            let ok = clash.is_empty() && news.len() == pairs.len() && olds.len() == pairs.len();
            ctx.check(PremiseCode::IdClash, "new component names are fresh and distinct", ok, || {
                if clash.is_empty() { "names repeat".into() } else { clash.join(", ") }
            })?;
            let map: BTreeMap<&str, &str> = pairs.iter().map(|(o, n)| (o.as_str(), n.as_str())).collect();
            let mut s = ctx.system.clone();
            s.components = s
                .components
                .iter()
                .map(|c| match map.get(c.name()) {
                    Some(n) => c.renamed(*n),
                    None => c.clone(),
                })
                .collect();
            s.provenance = s
                .provenance
                .into_iter()
                .map(|(k, v)| (map.get(k.as_str()).map(|n| n.to_string()).unwrap_or(k), v))
                .collect();
            Ok((s, RefinementKind::Equality))
        }
        RenameKind::Channel => {
            let existing = ctx.system.channels();
            let unknown: Vec<&str> =
                olds.iter().copied().filter(|o| !existing.iter().any(|c| c.as_str() == *o)).collect();
            ctx.check(PremiseCode::UnknownId, "renamed channels exist", unknown.is_empty(), || unknown.join(", "))?;
            let clash: Vec<&str> = news.iter().copied().filter(|n| existing.iter().any(|c| c.as_str() == *n)).collect();
            let ok = clash.is_empty() && news.len() == pairs.len() && olds.len() == pairs.len();
            ctx.check(PremiseCode::IdClash, "new channel names are fresh and distinct", ok, || {
                if clash.is_empty() { "names repeat".into() } else { clash.join(", ") }
            })?;
            let map: BTreeMap<ChannelId, ChannelId> = pairs
                .iter()
                .map(|(o, n)| (ChannelId::new(o).expect("existing"), ChannelId::new(n).expect("checked")))
                .collect();
            let apply = |set: &ChannelSet| -> ChannelSet { set.iter().map(|c| map.get(c).unwrap_or(c).clone()).collect() };
            let mut s = ctx.system.clone();
            s.inputs = apply(&s.inputs);
            s.outputs = apply(&s.outputs);
            let mut renamed = Vec::new();
            for c in &ctx.system.components {
                let b = c.behavior().rename(&map).map_err(|e| ctx.fail(PremiseCode::IdClash, e.to_string()))?;
                renamed.push(c.with_behavior(b));
            }
            s.components = renamed;
            let stale: Vec<String> = s
                .provenance
                .keys()
                .filter(|k| s.component(k).and_then(|c| ctx.system.component(k).map(|o| o != c)).unwrap_or(true))
                .cloned()
                .collect();
            for k in stale {
                s.provenance.remove(&k);
            }
            Ok((s, RefinementKind::Equality))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use crate::model::Component;
    use crate::streams::{ch, chans, Alphabet};

    fn copy(a: &str, b: &str) -> Behavior {
        Behavior::copy(&[(ch(a), ch(b))]).unwrap()
    }

    fn pipeline() -> System {
        System::new(
            "pipe",
            Alphabet::letters(1),
            chans(&["p"]),
            chans(&["r"]),
            vec![Component::new("A", copy("p", "q")), Component::new("B", copy("q", "r"))],
        )
    }

    fn cfg() -> CheckConfig {
        CheckConfig::new(3, 1, Mode::StructuralFirst)
    }

    #[test]
    fn add_then_remove_output_round_trips() {
        let s = pipeline();
        let (s1, r1) = add_output(&s, "A", ch("x"), &cfg()).unwrap();
        assert_eq!(r1.kind, RefinementKind::Equality);
        let (s2, _) = remove_output(&s1, "A", ch("x"), &cfg()).unwrap();
        assert_eq!(s2, s);
        assert_eq!(digest(&s2), digest(&s));
    }

    #[test]
    fn failed_step_reports_code_and_digest() {
        let s = pipeline();
        let e = remove_output(&s, "A", ch("q"), &cfg()).unwrap_err();
        assert_eq!(e.code, PremiseCode::OutputStillRead);
        assert_eq!(e.digest, digest(&s));
        let e = add_input(&s, "A", ch("zz"), &cfg()).unwrap_err();
        assert_eq!(e.code, PremiseCode::InputDangling);
    }

    #[test]
    fn fold_then_expand_round_trips() {
        let s = pipeline();
        let (f, _) = fold_components(&s, "AB", &["A", "B"], chans(&["p"]), chans(&["r"]), &cfg()).unwrap();
        assert_eq!(f.components.len(), 1);
        let (e, report) = expand_component(&f, "AB", None, &cfg()).unwrap();
        assert_eq!(e, s);
        assert_eq!(report.premises.iter().find(|p| p.code == PremiseCode::BehaviorNotCertified).unwrap().method, Method::Structural);
    }

    #[test]
    fn remove_input_needs_independence() {
        let s = pipeline();
        let e = remove_input(&s, "B", ch("q"), &cfg()).unwrap_err();
        assert_eq!(e.code, PremiseCode::InputDependence);
        let (s1, _) = add_input(&s, "B", ch("p"), &cfg()).unwrap();
        let (s2, r) = remove_input(&s1, "B", ch("p"), &cfg()).unwrap();
        assert_eq!(s2, s);
        assert_eq!(r.premises.last().unwrap().method, Method::Structural);
        let (_, r) = remove_input(&s1, "B", ch("p"), &CheckConfig::new(2, 1, Mode::Enumerative)).unwrap();
        assert!(matches!(r.premises.last().unwrap().method, Method::Enumerative(_)));
        let (_, r) = remove_input(&s, "B", ch("q"), &CheckConfig::new(2, 1, Mode::Assumed)).unwrap();
        assert_eq!(r.assumed(), 1);
    }

    #[test]
    fn rename_channel_and_back() {
        let s = pipeline();
        let (s1, _) = rename(&s, RenameKind::Channel, &[("q", "mid")], &cfg()).unwrap();
        assert!(s1.channels().contains(&ch("mid")));
        let (s2, _) = rename(&s1, RenameKind::Channel, &[("mid", "q")], &cfg()).unwrap();
        assert_eq!(s2, s);
        let e = rename(&s, RenameKind::Channel, &[("q", "r")], &cfg()).unwrap_err();
        assert_eq!(e.code, PremiseCode::IdClash);
    }
}
