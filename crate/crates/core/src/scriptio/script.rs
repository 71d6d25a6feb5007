use std::collections::BTreeSet;

use super::arch::{lines, parse_table, TableDecl};
use super::expr::{names_list, parse_expr, routes, Expr};
use super::lexer::{Cursor, Tok};
use super::{Diagnostic, FormatError};
use crate::calculus::{Mode, RenameKind, Rule};
use crate::semantics::Invariant;
use crate::streams::ChannelId;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvariantSpec {
    True,
    Summarizes { result: String, first: String, second: String, delay: usize },
    Silent(String),
    Copies { source: String, target: String, delay: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantDecl {
    pub name: String,
    pub line: usize,
    pub spec: InvariantSpec,
}

impl InvariantDecl {
    pub fn build(&self) -> Result<Invariant, Diagnostic> {
        let c = |n: &str| ChannelId::new(n).map_err(|e| Diagnostic::new(self.line, 1, e.to_string()));
        Ok(match &self.spec {
            InvariantSpec::True => Invariant::truth().with_name(&self.name),
            InvariantSpec::Summarizes { result, first, second, delay } => {
                Invariant::summarizes(&self.name, c(result)?, c(first)?, c(second)?, *delay)
            }
            InvariantSpec::Silent(p) => Invariant::silent(&self.name, c(p)?),
            InvariantSpec::Copies { source, target, delay } => {
                Invariant::copies(&self.name, c(source)?, c(target)?, *delay)
            }
        })
    }
}

/// Parameters of one scripted step; expressions stay unresolved until the
/// step runs against the then current system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepBody {
    Refine { component: String, behavior: Expr },
    AddOutput { component: String, channel: String, bound: Option<usize> },
    RemoveOutput { component: String, channel: String },
    AddInput { component: String, channel: String },
    RemoveInput { component: String, channel: String },
    AddComponentBasic { name: String },
    AddComponent { name: String, inputs: Vec<String>, outputs: Vec<String>, behavior: Expr },
    RemoveComponent { name: String },
    Expand { component: String, from: Option<String> },
    Fold { name: String, members: Vec<String>, inputs: Vec<String>, outputs: Vec<String> },
    RefineWithInvariant { component: String, invariant: String, behavior: Expr },
    Rename { kind: RenameKind, pairs: Vec<(String, String)> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptStep {
    pub line: usize,
    pub rule: Rule,
    pub mode: Option<Mode>,
    pub body: StepBody,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScriptDocument {
    pub tables: Vec<TableDecl>,
    pub invariants: Vec<InvariantDecl>,
    pub steps: Vec<ScriptStep>,
}

fn rule_list() -> String {
    let v: Vec<&str> = Rule::ALL.iter().map(|r| r.keyword()).collect();
    v.join(", ")
}

fn parse_invariant(cur: &mut Cursor, line: usize) -> Result<InvariantDecl, Diagnostic> {
    cur.expect_keyword("invariant")?;
    let name = cur.word("invariant name")?;
    cur.expect_sym(":=")?;
    let (l, col) = cur.here();
    let head = cur.word("invariant form")?;
    let spec = match head.as_str() {
        "true" => InvariantSpec::True,
        "summarizes" => {
            cur.expect_sym("(")?;
            let result = cur.word("channel name")?;
            cur.expect_sym(";")?;
            let first = cur.word("channel name")?;
            cur.expect_sym(",")?;
            let second = cur.word("channel name")?;
            cur.expect_sym(";")?;
            let delay = cur.num("delay")?;
            cur.expect_sym(")")?;
            InvariantSpec::Summarizes { result, first, second, delay }
        }
        "silent" => {
            cur.expect_sym("(")?;
            let p = cur.word("channel name")?;
            cur.expect_sym(")")?;
            InvariantSpec::Silent(p)
        }
        "copies" => {
            cur.expect_sym("(")?;
            let source = cur.word("channel name")?;
            cur.expect_sym("->")?;
            let target = cur.word("channel name")?;
            cur.expect_sym(";")?;
            let delay = cur.num("delay")?;
            cur.expect_sym(")")?;
            InvariantSpec::Copies { source, target, delay }
        }
        other => {
            return Err(Diagnostic::new(
                l,
                col,
                format!("unknown invariant form `{other}` (expected true, summarizes, silent or copies)"),
            ))
        }
    };
    cur.end()?;
    Ok(InvariantDecl { name, line, spec })
}

fn parse_step(cur: &mut Cursor, line: usize, mode: Option<Mode>) -> Result<ScriptStep, Diagnostic> {
    cur.expect_keyword("with")?;
    let (l, col) = cur.here();
    let keyword = cur.word("rule name")?;
    let rule = Rule::ALL
        .iter()
        .copied()
        .find(|r| r.keyword() == keyword)
        .ok_or_else(|| Diagnostic::new(l, col, format!("unknown rule `{keyword}`; valid rules: {}", rule_list())))?;
    let body = match rule {
        Rule::RefineBehavior => {
            let component = cur.word("component name")?;
            cur.expect_sym(":=")?;
            StepBody::Refine { component, behavior: parse_expr(cur)? }
        }
        Rule::AddOutput => {
            let component = cur.word("component name")?;
            let channel = cur.word("channel name")?;
            let bound = if cur.eat_word("bound") { Some(cur.num("interval bound")?) } else { None };
            StepBody::AddOutput { component, channel, bound }
        }
        Rule::RemoveOutput | Rule::AddInput | Rule::RemoveInput => {
            let component = cur.word("component name")?;
            let channel = cur.word("channel name")?;
            match rule {
                Rule::RemoveOutput => StepBody::RemoveOutput { component, channel },
                Rule::AddInput => StepBody::AddInput { component, channel },
                _ => StepBody::RemoveInput { component, channel },
            }
        }
        Rule::AddComponentBasic => StepBody::AddComponentBasic { name: cur.word("component name")? },
        Rule::AddComponent => {
            let name = cur.word("component name")?;
            cur.expect_keyword("in")?;
            let inputs = names_list(cur)?;
            cur.expect_keyword("out")?;
            let outputs = names_list(cur)?;
            cur.expect_sym(":=")?;
            StepBody::AddComponent { name, inputs, outputs, behavior: parse_expr(cur)? }
        }
        Rule::RemoveComponent => StepBody::RemoveComponent { name: cur.word("component name")? },
        Rule::Expand => {
            let component = cur.word("component name")?;
            let from = if cur.eat_word("from") { Some(cur.string("quoted file name")?) } else { None };
            StepBody::Expand { component, from }
        }
        Rule::Fold => {
            let name = cur.word("component name")?;
            cur.expect_sym(":=")?;
            cur.expect_sym("{")?;
            let mut members = Vec::new();
            loop {
                members.push(cur.word("component name")?);
                if cur.eat_sym("}") {
                    break;
                }
                cur.expect_sym(",")?;
            }
            cur.expect_keyword("in")?;
            let inputs = names_list(cur)?;
            cur.expect_keyword("out")?;
            let outputs = names_list(cur)?;
            StepBody::Fold { name, members, inputs, outputs }
        }
        Rule::RefineWithInvariant => {
            let component = cur.word("component name")?;
            cur.expect_keyword("under")?;
            let invariant = cur.word("invariant name")?;
            cur.expect_sym(":=")?;
            StepBody::RefineWithInvariant { component, invariant, behavior: parse_expr(cur)? }
        }
        Rule::Rename => {
            let (l, col) = cur.here();
            let kind = match cur.word("`channel` or `component`")?.as_str() {
                "channel" => RenameKind::Channel,
                "component" => RenameKind::Component,
                other => return Err(Diagnostic::new(l, col, format!("expected `channel` or `component`, found `{other}`"))),
            };
            StepBody::Rename { kind, pairs: routes(cur)? }
        }
    };
    cur.end()?;
    Ok(ScriptStep { line, rule, mode, body })
}

/// Parses a refinement script: transducer blocks, invariant declarations
/// and `with <rule> ...` steps, each optionally followed by `@ <mode>`.
pub fn parse_script(text: &str) -> Result<ScriptDocument, FormatError> {
    let lines = lines(text)?;
    let mut doc = ScriptDocument::default();
    let mut errors = Vec::new();
    let mut declared: BTreeSet<String> = ["true".to_string()].into_iter().collect();
    let mut i = 0;
    while i < lines.len() {
        let line = &lines[i];
        let first = line.tokens.first().map(|t| t.tok.clone());
        if first == Some(Tok::Word("transducer".into())) {
            let start = i;
            match parse_table(&lines, &mut i) {
                Ok(t) => doc.tables.push(t),
                Err(d) => {
                    errors.push(d);
                    i = i.max(start + 1);
                }
            }
            continue;
        }
        i += 1;
        let (tokens, mode) = match line.tokens.iter().rposition(|t| t.tok == Tok::Sym("@")) {
            Some(at) => {
                let mode = match line.tokens.get(at + 1..) {
                    Some([t]) => match &t.tok {
                        Tok::Word(w) => Mode::parse(w).ok_or_else(|| {
                            Diagnostic::new(
                                t.line,
                                t.col,
                                format!("unknown mode `{w}` (expected structural-first, enumerative or assumed)"),
                            )
                        }),
                        _ => Err(Diagnostic::new(t.line, t.col, "expected a mode name")),
                    },
                    _ => Err(Diagnostic::new(line.no, line.tokens[at].col, "expected one mode name after `@`")),
                };
                match mode {
                    Ok(m) => (&line.tokens[..at], Some(m)),
                    Err(d) => {
                        errors.push(d);
                        continue;
                    }
                }
            }
            None => (&line.tokens[..], None),
        };
        let end = tokens.last().map(|t| t.col + 1).unwrap_or(line.end);
        let mut cur = Cursor::new(tokens, line.no, end);
        let result = match first {
            Some(Tok::Word(w)) if w == "with" => parse_step(&mut cur, line.no, mode).map(|s| doc.steps.push(s)),
            Some(Tok::Word(w)) if w == "invariant" && mode.is_none() => {
                parse_invariant(&mut cur, line.no).and_then(|d| {
                    if !declared.insert(d.name.clone()) {
                        return Err(Diagnostic::new(line.no, 1, format!("invariant `{}` is already declared", d.name)));
                    }
                    d.build()?;
                    doc.invariants.push(d);
                    Ok(())
                })
            }
            _ => Err(Diagnostic::new(
                line.no,
                1,
                "expected `with <rule> ...`, `invariant NAME := ...` or a transducer block",
            )),
        };
        if let Err(d) = result {
            errors.push(d);
        }
    }
    if errors.is_empty() {
        Ok(doc)
    } else {
        Err(FormatError::Syntax(errors))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_steps_modes_and_invariants() {
        let doc = parse_script(
            "invariant s := summarizes(r; a, b; 1)\n\
             with add-output Acc r bound 4 @ enumerative\n\
             with refine-with-invariant M under s := unpack(1; r -> x, y)\n\
             with fold F := {A, B} in [p] out [q]\n\
             with rename channel a -> b, c -> d\n",
        )
        .unwrap();
        assert_eq!(doc.invariants.len(), 1);
        assert_eq!(doc.steps.len(), 4);
        assert_eq!(doc.steps[0].mode, Some(Mode::Enumerative));
        assert_eq!(
            doc.steps[0].body,
            StepBody::AddOutput { component: "Acc".into(), channel: "r".into(), bound: Some(4) }
        );
        assert_eq!(doc.steps[2].line, 4);
        assert!(matches!(&doc.steps[3].body, StepBody::Rename { kind: RenameKind::Channel, pairs } if pairs.len() == 2));
    }

    #[test]
    fn misspelled_rule_lists_the_valid_ones() {
        let e = parse_script("\nwith add-ouput C p\n").unwrap_err();
        let d = &e.diagnostics()[0];
        assert_eq!((d.line, d.column), (2, 6));
        assert!(d.message.contains("add-output") && d.message.contains("refine-with-invariant"));
    }

    #[test]
    fn rejects_duplicate_invariants_and_bad_modes() {
        assert!(parse_script("invariant true := true\n").is_err());
        assert!(parse_script("with remove-component C @ fast\n").is_err());
    }
}
