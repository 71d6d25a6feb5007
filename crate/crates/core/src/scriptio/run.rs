use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use super::arch::build_tables;
use super::expr::{self, Env, Expr, Loader};
use super::script::{ScriptDocument, StepBody};
use super::Diagnostic;
use crate::behavior::{Behavior, ChannelSet, Outcome, Table};
use crate::calculus::{
    apply_step, digest, CheckConfig, Method, Mode, Premise, PremiseCode, Rule, RuleApplication, StepError, StepReport,
};
use crate::model::System;
use crate::semantics::{Invariant, Registry};
use crate::streams::ChannelId;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Applied(StepReport),
    Failed(StepError),
    /// The step could not be resolved against the current system.
    Invalid(Diagnostic),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub line: usize,
    pub rule: Rule,
    pub mode: Mode,
    pub outcome: StepOutcome,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Refined,
    Failed,
    Invalid,
}

impl Verdict {
    pub fn keyword(self) -> &'static str {
        match self {
            Verdict::Refined => "refined",
            Verdict::Failed => "failed",
            Verdict::Invalid => "invalid",
        }
    }

    /// 0 when every step applied, 1 on a failed premise, 2 on a step that
    /// could not be resolved.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Refined => 0,
            Verdict::Failed => 1,
            Verdict::Invalid => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub config: CheckConfig,
    pub symbols: usize,
    /// Number of steps in the script; the run stops at the first failure.
    pub total: usize,
    pub steps: Vec<StepRecord>,
    /// The system after the last applied step.
    pub system: System,
    pub verdict: Verdict,
}

fn outcome_text(o: Outcome) -> &'static str {
    match o {
        Outcome::Holds => "holds",
        Outcome::HoldsUpToBound => "holds-up-to-bound",
        Outcome::Fails => "fails",
    }
}

fn one_line(s: &str) -> String {
    s.replace(['\n', '\r'], " ")
}

fn premises(out: &mut String, prefix: &str, ps: &[Premise]) {
    for (i, p) in ps.iter().enumerate() {
        let k = format!("{prefix}.premise.{}", i + 1);
        let _ = writeln!(out, "{k}.code={}", p.code);
        let _ = writeln!(out, "{k}.text={}", one_line(&p.text));
        let _ = writeln!(out, "{k}.method={}", p.method);
        let _ = writeln!(out, "{k}.outcome={}", outcome_text(p.outcome));
        if let Some(d) = &p.detail {
            let _ = writeln!(out, "{k}.detail={}", one_line(d));
        }
    }
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }

    pub fn assumed(&self) -> usize {
        self.steps
            .iter()
            .map(|s| match &s.outcome {
                StepOutcome::Applied(r) => r.assumed(),
                _ => 0,
            })
            .sum()
    }

    pub fn final_digest(&self) -> String {
        digest(&self.system)
    }

    /// Line-oriented `key=value` rendering; identical runs give identical
    /// bytes.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "bounds.horizon={}", self.config.horizon);
        let _ = writeln!(out, "bounds.bound={}", self.config.bound);
        let _ = writeln!(out, "bounds.symbols={}", self.symbols);
        let _ = writeln!(out, "mode={}", self.config.mode);
        let _ = writeln!(out, "steps={}", self.total);
        for (i, s) in self.steps.iter().enumerate() {
            let k = format!("step.{}", i + 1);
            let _ = writeln!(out, "{k}.rule={}", s.rule);
            let _ = writeln!(out, "{k}.line={}", s.line);
            let _ = writeln!(out, "{k}.mode={}", s.mode);
            match &s.outcome {
                StepOutcome::Applied(r) => {
                    let _ = writeln!(out, "{k}.status=applied");
                    let _ = writeln!(out, "{k}.kind={}", r.kind);
                    premises(&mut out, &k, &r.premises);
                    let _ = writeln!(out, "{k}.digest={}", r.digest);
                }
                StepOutcome::Failed(e) => {
                    let _ = writeln!(out, "{k}.status=failed");
                    premises(&mut out, &k, &e.premises);
                    let _ = writeln!(out, "{k}.digest={}", e.digest);
                    let _ = writeln!(out, "{k}.error={}", one_line(&e.to_string()));
                }
                StepOutcome::Invalid(d) => {
                    let _ = writeln!(out, "{k}.status=invalid");
                    let _ = writeln!(out, "{k}.error={}", one_line(&d.to_string()));
                }
            }
        }
        let _ = writeln!(out, "final.digest={}", self.final_digest());
        let _ = writeln!(out, "verdict={}", self.verdict.keyword());
        out
    }
}

fn chan(name: &str, line: usize) -> Result<ChannelId, Diagnostic> {
    ChannelId::new(name).map_err(|e| Diagnostic::new(line, 1, e.to_string()))
}

fn chans(names: &[String], line: usize) -> Result<ChannelSet, Diagnostic> {
    names.iter().map(|n| chan(n, line)).collect()
}

/// Tables visible to a step: those used by the current system, overridden
/// by the ones declared in the script.
fn tables_for(
    system: &System,
    script: &BTreeMap<String, Arc<Table>>,
) -> BTreeMap<String, Arc<Table>> {
    let mut out: BTreeMap<String, Arc<Table>> = BTreeMap::new();
    for c in system.sorted_components() {
        for t in c.behavior().tables() {
            out.entry(t.name.clone()).or_insert(t);
        }
    }
    out.extend(script.iter().map(|(k, v)| (k.clone(), v.clone())));
    out
}

struct Resolver<'a> {
    system: &'a System,
    tables: BTreeMap<String, Arc<Table>>,
    loader: Loader<'a>,
}

impl Resolver<'_> {
    fn expr(&self, e: &Expr, hint: Option<(&ChannelSet, &ChannelSet)>) -> Result<Behavior, Diagnostic> {
        let env = Env { alphabet: &self.system.alphabet, tables: &self.tables, loader: self.loader };
        expr::resolve(e, &env, hint).map(|(b, _)| b)
    }

    fn signature(&self, component: &str) -> Option<(ChannelSet, ChannelSet)> {
        self.system.component(component).map(|c| (c.inputs().clone(), c.outputs().clone()))
    }

    fn expr_for(&self, component: &str, e: &Expr) -> Result<Behavior, Diagnostic> {
        let sig = self.signature(component);
        self.expr(e, sig.as_ref().map(|(i, o)| (i, o)))
    }
}

fn unknown_invariant(system: &System, rule: Rule, name: &str) -> StepError {
    let text = format!("invariant `{name}` is declared");
    StepError {
        rule,
        code: PremiseCode::UnknownInvariant,
        message: format!("{text}: not declared in the script"),
        premises: vec![Premise {
            code: PremiseCode::UnknownInvariant,
            text,
            method: Method::Structural,
            outcome: Outcome::Fails,
            detail: Some("not declared in the script".into()),
        }],
        digest: digest(system),
    }
}

enum Resolved {
    Step(RuleApplication),
    Failed(StepError),
}

fn resolve_step(
    r: &Resolver,
    registry: &Registry,
    line: usize,
    rule: Rule,
    body: &StepBody,
) -> Result<Resolved, Diagnostic> {
    let step = match body {
        StepBody::Refine { component, behavior } => {
            RuleApplication::RefineBehavior { component: component.clone(), behavior: r.expr_for(component, behavior)? }
        }
        StepBody::AddOutput { component, channel, bound } => {
            RuleApplication::AddOutput { component: component.clone(), channel: chan(channel, line)?, bound: *bound }
        }
        StepBody::RemoveOutput { component, channel } => {
            RuleApplication::RemoveOutput { component: component.clone(), channel: chan(channel, line)? }
        }
        StepBody::AddInput { component, channel } => {
            RuleApplication::AddInput { component: component.clone(), channel: chan(channel, line)? }
        }
        StepBody::RemoveInput { component, channel } => {
            RuleApplication::RemoveInput { component: component.clone(), channel: chan(channel, line)? }
        }
        StepBody::AddComponentBasic { name } => RuleApplication::AddComponentBasic { name: name.clone() },
        StepBody::AddComponent { name, inputs, outputs, behavior } => {
            let (i, o) = (chans(inputs, line)?, chans(outputs, line)?);
            let b = r.expr(behavior, Some((&i, &o)))?;
            RuleApplication::AddComponent { name: name.clone(), inputs: i, outputs: o, behavior: b }
        }
        StepBody::RemoveComponent { name } => RuleApplication::RemoveComponent { name: name.clone() },
        StepBody::Expand { component, from } => {
            let subsystem = match from {
                Some(path) => Some(Arc::new(
                    (r.loader)(path).map_err(|m| Diagnostic::new(line, 1, format!("cannot load `{path}`: {m}")))?,
                )),
                None => None,
            };
            RuleApplication::Expand { component: component.clone(), subsystem }
        }
        StepBody::Fold { name, members, inputs, outputs } => RuleApplication::Fold {
            name: name.clone(),
            members: members.clone(),
            inputs: chans(inputs, line)?,
            outputs: chans(outputs, line)?,
        },
        StepBody::RefineWithInvariant { component, invariant, behavior } => {
            let psi: Invariant = match registry.get(invariant) {
                Ok(p) => p.clone(),
                Err(_) => return Ok(Resolved::Failed(unknown_invariant(r.system, rule, invariant))),
            };
            RuleApplication::RefineWithInvariant {
                component: component.clone(),
                behavior: r.expr_for(component, behavior)?,
                invariant: psi,
            }
        }
        StepBody::Rename { kind, pairs } => RuleApplication::Rename { kind: *kind, pairs: pairs.clone() },
    };
    Ok(Resolved::Step(step))
}

/// Runs the steps of `doc` on `system` in order, stopping at the first
/// failure. Expressions are resolved against the system current at each
/// step; `loader` serves `blackbox(...)` and `expand ... from`.
pub fn run_script(system: &System, doc: &ScriptDocument, config: &CheckConfig, loader: Loader) -> RunReport {
    let mut report = RunReport {
        config: *config,
        symbols: system.alphabet.len(),
        total: doc.steps.len(),
        steps: Vec::new(),
        system: system.clone(),
        verdict: Verdict::Refined,
    };
    let mut registry = Registry::standard();
    let script_tables = match build_tables(&doc.tables, &system.alphabet) {
        Ok(t) => t,
        Err(ds) => {
            report.verdict = Verdict::Invalid;
            if let Some(s) = doc.steps.first() {
                let mode = s.mode.unwrap_or(config.mode);
                report.steps.push(StepRecord {
                    line: s.line,
                    rule: s.rule,
                    mode,
                    outcome: StepOutcome::Invalid(ds[0].clone()),
                });
            }
            return report;
        }
    };
    for d in &doc.invariants {
        // Names and channels were validated while parsing.
        if let Ok(psi) = d.build() {
            let _ = registry.register(psi);
        }
    }
    for s in &doc.steps {
        let mode = s.mode.unwrap_or(config.mode);
        let cfg = CheckConfig { mode, ..*config };
        let current = report.system.clone();
        let resolver = Resolver { system: &current, tables: tables_for(&current, &script_tables), loader };
        let outcome = match resolve_step(&resolver, &registry, s.line, s.rule, &s.body) {
            Err(d) => StepOutcome::Invalid(d),
            Ok(Resolved::Failed(e)) => StepOutcome::Failed(e),
            Ok(Resolved::Step(app)) => match apply_step(&current, &app, &cfg) {
                Ok((next, r)) => {
                    report.system = next;
                    StepOutcome::Applied(r)
                }
                Err(e) => StepOutcome::Failed(e),
            },
        };
        let stop = match &outcome {
            StepOutcome::Applied(_) => None,
            StepOutcome::Failed(_) => Some(Verdict::Failed),
            StepOutcome::Invalid(_) => Some(Verdict::Invalid),
        };
        report.steps.push(StepRecord { line: s.line, rule: s.rule, mode, outcome });
        if let Some(v) = stop {
            report.verdict = v;
            break;
        }
    }
    report
}
