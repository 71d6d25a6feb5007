use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::expr::{self, Env, Expr};
use super::lexer::{tokenize, Cursor, Tok, Token};
use super::{corpus, Diagnostic, FormatError};
use crate::behavior::{ChannelSet, StepRule, Table};
use crate::model::{Component, Provenance, System};
use crate::streams::{Alphabet, ChannelId, Frame, Interval};

/// One non-empty source line.
pub(crate) struct Line {
    pub no: usize,
    pub tokens: Vec<Token>,
    pub end: usize,
}

impl Line {
    pub fn cursor(&self) -> Cursor<'_> {
        Cursor::new(&self.tokens, self.no, self.end)
    }
}

pub(crate) fn lines(text: &str) -> Result<Vec<Line>, FormatError> {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        match tokenize(raw, i + 1) {
            Ok(tokens) if tokens.is_empty() => {}
            Ok(tokens) => out.push(Line { no: i + 1, tokens, end: raw.chars().count() + 1 }),
            Err(d) => errors.push(d),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(FormatError::Syntax(errors))
    }
}

fn is_end(line: &Line) -> bool {
    line.tokens.first().is_some_and(|t| t.tok == Tok::Word("end".into()))
}

type Pattern = Vec<(String, Vec<String>, usize, usize)>;

/// A transducer block before its symbols and states are resolved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableDecl {
    pub name: String,
    pub line: usize,
    inputs: Vec<String>,
    outputs: Vec<String>,
    states: Vec<String>,
    initial: Option<String>,
    emits: Vec<(usize, String, Pattern, String)>,
    steps: Vec<(usize, String, Pattern, Vec<String>)>,
}

fn rest_words(cur: &mut Cursor, what: &str) -> Result<Vec<String>, Diagnostic> {
    let mut out = Vec::new();
    while !cur.at_end() {
        out.push(cur.word(what)?);
    }
    Ok(out)
}

fn pattern(cur: &mut Cursor) -> Result<Pattern, Diagnostic> {
    let mut out = Vec::new();
    while !cur.is_sym("->") && !cur.at_end() {
        let (line, col) = cur.here();
        let c = cur.word("channel name")?;
        cur.expect_sym("=")?;
        match cur.next() {
            Some(Tok::Interval(items)) => out.push((c, items.clone(), line, col)),
            _ => return Err(Diagnostic::new(line, col, "expected an interval such as <a,b> after `=`")),
        }
    }
    Ok(out)
}

/// Parses a transducer block starting at `lines[*i]` (the header line).
pub(crate) fn parse_table(lines: &[Line], i: &mut usize) -> Result<TableDecl, Diagnostic> {
    let header = &lines[*i];
    let mut cur = header.cursor();
    cur.expect_keyword("transducer")?;
    let name = cur.word("transducer name")?;
    cur.end()?;
    let mut decl = TableDecl {
        name,
        line: header.no,
        inputs: Vec::new(),
        outputs: Vec::new(),
        states: Vec::new(),
        initial: None,
        emits: Vec::new(),
        steps: Vec::new(),
    };
    *i += 1;
    while *i < lines.len() {
        let line = &lines[*i];
        *i += 1;
        let mut cur = line.cursor();
        let key = cur.word("transducer entry")?;
        match key.as_str() {
            "end" => {
                cur.end()?;
                return Ok(decl);
            }
            "in" => decl.inputs = rest_words(&mut cur, "channel name")?,
            "out" => decl.outputs = rest_words(&mut cur, "channel name")?,
            "states" => decl.states = rest_words(&mut cur, "state name")?,
            "init" => {
                decl.initial = Some(cur.word("state name")?);
                cur.end()?;
            }
            "emit" => {
                let s = cur.word("state name")?;
                let p = pattern(&mut cur)?;
                cur.expect_sym("->")?;
                let t = cur.word("state name")?;
                cur.end()?;
                decl.emits.push((line.no, s, p, t));
            }
            "step" => {
                let s = cur.word("state name")?;
                let p = pattern(&mut cur)?;
                cur.expect_sym("->")?;
                let ts = rest_words(&mut cur, "state name")?;
                if ts.is_empty() {
                    return Err(cur.error("expected at least one target state"));
                }
                decl.steps.push((line.no, s, p, ts));
            }
            other => {
                return Err(Diagnostic::new(
                    line.no,
                    1,
                    format!("unknown transducer entry `{other}` (expected in, out, states, init, emit, step or end)"),
                ))
            }
        }
    }
    Err(Diagnostic::new(decl.line, 1, format!("transducer `{}` is missing `end`", decl.name)))
}

fn channels(names: &[String], line: usize) -> Result<ChannelSet, Diagnostic> {
    names
        .iter()
        .map(|n| ChannelId::new(n).map_err(|e| Diagnostic::new(line, 1, e.to_string())))
        .collect()
}

fn interval(items: &[String], alphabet: &Alphabet, line: usize, col: usize) -> Result<Interval, Diagnostic> {
    items
        .iter()
        .map(|s| alphabet.lookup(s).ok_or_else(|| Diagnostic::new(line, col, format!("`{s}` is not in the alphabet"))))
        .collect::<Result<Vec<_>, _>>()
        .map(Interval::new)
}

impl TableDecl {
    pub(crate) fn build(&self, alphabet: &Alphabet) -> Result<Table, Diagnostic> {
        let here = |m: String| Diagnostic::new(self.line, 1, m);
        let inputs = channels(&self.inputs, self.line)?;
        let outputs = channels(&self.outputs, self.line)?;
        let index: BTreeMap<&str, usize> =
            self.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        if index.len() != self.states.len() {
            return Err(here("duplicate state name".into()));
        }
        let state = |s: &str, line: usize| {
            index.get(s).copied().ok_or_else(|| Diagnostic::new(line, 1, format!("unknown state `{s}`")))
        };
        let frame = |p: &Pattern, allowed: &ChannelSet| -> Result<Frame, Diagnostic> {
            let mut f = Frame::new();
            for (c, items, l, col) in p {
                let id = ChannelId::new(c).map_err(|e| Diagnostic::new(*l, *col, e.to_string()))?;
                if !allowed.contains(&id) {
                    return Err(Diagnostic::new(*l, *col, format!("`{c}` is not declared here")));
                }
                if f.insert(id, interval(items, alphabet, *l, *col)?).is_some() {
                    return Err(Diagnostic::new(*l, *col, format!("`{c}` appears twice")));
                }
            }
            Ok(f)
        };
        let n = self.states.len();
        let mut emits = vec![Vec::new(); n];
        for (line, s, p, t) in &self.emits {
            let mut f = frame(p, &outputs)?;
            for o in &outputs {
                f.entry(o.clone()).or_insert_with(Interval::empty);
            }
            emits[state(s, *line)?].push((f, state(t, *line)?));
        }
        let mut steps = vec![Vec::new(); n];
        for (line, s, p, ts) in &self.steps {
            let targets = ts.iter().map(|t| state(t, *line)).collect::<Result<Vec<_>, _>>()?;
            steps[state(s, *line)?].push(StepRule { pattern: frame(p, &inputs)?, targets });
        }
        let initial = match &self.initial {
            Some(s) => state(s, self.line)?,
            None => 0,
        };
        let table = Table { name: self.name.clone(), inputs, outputs, states: self.states.clone(), initial, emits, steps };
        table.validate().map_err(|e| here(e.to_string()))?;
        Ok(table)
    }
}

/// Resolves the transducer declarations of one document.
pub(crate) fn build_tables(
    decls: &[TableDecl],
    alphabet: &Alphabet,
) -> Result<BTreeMap<String, Arc<Table>>, Vec<Diagnostic>> {
    let mut out = BTreeMap::new();
    let mut errors = Vec::new();
    for d in decls {
        match d.build(alphabet) {
            Ok(t) => {
                if out.insert(d.name.clone(), Arc::new(t)).is_some() {
                    errors.push(Diagnostic::new(d.line, 1, format!("transducer `{}` is declared twice", d.name)));
                }
            }
            Err(e) => errors.push(e),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

struct ComponentDecl {
    name: String,
    line: usize,
    inputs: Option<Vec<String>>,
    outputs: Option<Vec<String>>,
    behavior: Option<Expr>,
}

fn parse_component(lines: &[Line], i: &mut usize) -> Result<ComponentDecl, Diagnostic> {
    let header = &lines[*i];
    let mut cur = header.cursor();
    cur.expect_keyword("component")?;
    let name = cur.word("component name")?;
    cur.end()?;
    let mut decl = ComponentDecl { name, line: header.no, inputs: None, outputs: None, behavior: None };
    *i += 1;
    while *i < lines.len() {
        let line = &lines[*i];
        *i += 1;
        let mut cur = line.cursor();
        let key = cur.word("component entry")?;
        match key.as_str() {
            "end" => {
                cur.end()?;
                if decl.behavior.is_none() {
                    return Err(Diagnostic::new(decl.line, 1, format!("component `{}` has no behavior", decl.name)));
                }
                return Ok(decl);
            }
            "in" => decl.inputs = Some(rest_words(&mut cur, "channel name")?),
            "out" => decl.outputs = Some(rest_words(&mut cur, "channel name")?),
            "behavior" => {
                decl.behavior = Some(expr::parse_expr(&mut cur)?);
                cur.end()?;
            }
            other => {
                return Err(Diagnostic::new(
                    line.no,
                    1,
                    format!("unknown component entry `{other}` (expected in, out, behavior or end)"),
                ))
            }
        }
    }
    Err(Diagnostic::new(decl.line, 1, format!("component `{}` is missing `end`", decl.name)))
}

/// Parses an architecture; `blackbox(...)` references are looked up in the
/// built-in corpus.
pub fn parse_architecture(text: &str) -> Result<System, FormatError> {
    parse_architecture_with(text, &corpus::loader)
}

/// Parses an architecture, resolving `blackbox(...)` through `loader`.
pub fn parse_architecture_with(text: &str, loader: expr::Loader) -> Result<System, FormatError> {
    let lines = lines(text)?;
    let mut errors = Vec::new();
    let mut name: Option<String> = None;
    let mut alphabet: Option<Alphabet> = None;
    let mut inputs: Vec<String> = Vec::new();
    let mut outputs: Vec<String> = Vec::new();
    let mut interface_line = 1;
    let mut tables = Vec::new();
    let mut comps = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let line = &lines[i];
        let start = i;
        let mut cur = line.cursor();
        let key = match cur.word("declaration") {
            Ok(k) => k,
            Err(d) => {
                errors.push(d);
                i += 1;
                continue;
            }
        };
        let result = match key.as_str() {
            "system" => cur.word("system name").and_then(|n| {
                name = Some(n);
                i += 1;
                cur.end()
            }),
            "alphabet" => rest_words(&mut cur, "symbol").and_then(|s| {
                i += 1;
                let unique: BTreeSet<&String> = s.iter().collect();
                if s.is_empty() || unique.len() != s.len() || s.len() > 255 {
                    return Err(Diagnostic::new(line.no, 1, "alphabet needs distinct symbols"));
                }
                alphabet = Some(Alphabet::new(s));
                Ok(())
            }),
            "input" => rest_words(&mut cur, "channel name").map(|c| {
                i += 1;
                interface_line = line.no;
                inputs = c;
            }),
            "output" => rest_words(&mut cur, "channel name").map(|c| {
                i += 1;
                outputs = c;
            }),
            "transducer" => parse_table(&lines, &mut i).map(|t| tables.push(t)),
            "component" => parse_component(&lines, &mut i).map(|c| comps.push(c)),
            other => {
                i += 1;
                Err(Diagnostic::new(
                    line.no,
                    1,
                    format!("unknown declaration `{other}` (expected system, alphabet, input, output, transducer or component)"),
                ))
            }
        };
        if let Err(d) = result {
            errors.push(d);
            i = i.max(start + 1);
            if key == "transducer" || key == "component" {
                while i < lines.len() && !is_end(&lines[i - 1]) {
                    i += 1;
                }
            }
        }
    }
    let Some(alphabet) = alphabet else {
        errors.push(Diagnostic::new(1, 1, "missing `alphabet` declaration"));
        return Err(FormatError::Syntax(errors));
    };
    let tables = build_tables(&tables, &alphabet).unwrap_or_else(|mut e| {
        errors.append(&mut e);
        BTreeMap::new()
    });
    let ins = channels(&inputs, interface_line).map_err(|d| errors.push(d)).unwrap_or_default();
    let outs = channels(&outputs, interface_line).map_err(|d| errors.push(d)).unwrap_or_default();
    let env = Env { alphabet: &alphabet, tables: &tables, loader };
    let mut components = Vec::new();
    let mut provenance = BTreeMap::new();
    let mut lines_of = BTreeMap::new();
    for c in &comps {
        lines_of.entry(c.name.clone()).or_insert(c.line);
        let r = (|| {
            let i = c.inputs.as_ref().map(|v| channels(v, c.line)).transpose()?;
            let o = c.outputs.as_ref().map(|v| channels(v, c.line)).transpose()?;
            let hint = match (&i, &o) {
                (Some(i), Some(o)) => Some((i, o)),
                _ => None,
            };
            let e = c.behavior.as_ref().expect("checked while parsing");
            let (b, sub) = expr::resolve(e, &env, hint)?;
            let mismatch = |what: &str| {
                Diagnostic::new(c.line, 1, format!("component `{}`: declared {what} do not match its behavior", c.name))
            };
            if i.is_some_and(|i| &i != b.inputs()) {
                return Err(mismatch("inputs"));
            }
            if o.is_some_and(|o| &o != b.outputs()) {
                return Err(mismatch("outputs"));
            }
            Ok((b, sub))
        })();
        match r {
            Ok((b, sub)) => {
                if let Some(subsystem) = sub {
                    provenance.insert(c.name.clone(), Provenance { subsystem, behavior: b.clone(), bounds: None });
                }
                components.push(Component::new(c.name.clone(), b));
            }
            Err(d) => errors.push(d),
        }
    }
    if !errors.is_empty() {
        return Err(FormatError::Syntax(errors));
    }
    let mut system = System::new(name.unwrap_or_else(|| "S".into()), alphabet, ins, outs, components);
    system.provenance = provenance;
    let report = system.check_consistency();
    if !report.passed() {
        let diags = report
            .violations
            .iter()
            .map(|v| {
                let line = v.subjects.iter().find_map(|s| lines_of.get(s).copied()).unwrap_or(interface_line);
                Diagnostic::new(line, 1, v.to_string())
            })
            .collect();
        return Err(FormatError::Inconsistent(diags));
    }
    Ok(system)
}

fn load_from(path: &Path, stack: &[PathBuf]) -> Result<System, FormatError> {
    let io = |m: String| FormatError::Io { path: path.display().to_string(), message: m };
    let canonical = path.canonicalize().map_err(|e| io(e.to_string()))?;
    if stack.contains(&canonical) {
        return Err(io("circular blackbox reference".into()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| io(e.to_string()))?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut next = stack.to_vec();
    next.push(canonical);
    parse_architecture_with(&text, &|p: &str| load_from(&dir.join(p), &next).map_err(|e| e.to_string()))
}

/// Reads an architecture file; `blackbox(...)` paths are relative to it.
pub fn load_architecture(path: impl AsRef<Path>) -> Result<System, FormatError> {
    load_from(path.as_ref(), &[])
}

fn interval_text(alphabet: &Alphabet, i: &Interval) -> String {
    alphabet.render_interval(i)
}

fn frame_text(alphabet: &Alphabet, f: &Frame) -> String {
    let v: Vec<String> = f.iter().map(|(c, i)| format!(" {c}={}", interval_text(alphabet, i))).collect();
    v.concat()
}

fn words(set: &ChannelSet) -> String {
    set.iter().map(|c| format!(" {c}")).collect()
}

fn print_table(out: &mut String, name: &str, t: &Table, alphabet: &Alphabet) {
    out.push_str(&format!("transducer {name}\n  in{}\n  out{}\n", words(&t.inputs), words(&t.outputs)));
    out.push_str(&format!("  states {}\n  init {}\n", t.states.join(" "), t.states[t.initial]));
    for (s, choices) in t.emits.iter().enumerate() {
        for (f, target) in choices {
            out.push_str(&format!("  emit {}{} -> {}\n", t.states[s], frame_text(alphabet, f), t.states[*target]));
        }
    }
    for (s, rules) in t.steps.iter().enumerate() {
        for r in rules {
            let targets: Vec<&str> = r.targets.iter().map(|i| t.states[*i].as_str()).collect();
            out.push_str(&format!(
                "  step {}{} -> {}\n",
                t.states[s],
                frame_text(alphabet, &r.pattern),
                targets.join(" ")
            ));
        }
    }
    out.push_str("end\n");
}

/// The canonical text of a system: components, transducers and channels
/// sorted. Does not require consistency.
pub fn canonical_text(system: &System) -> String {
    let comps = system.sorted_components();
    let mut names: Vec<(Arc<Table>, String)> = Vec::new();
    for c in &comps {
        for t in c.behavior().tables() {
            if names.iter().any(|(u, _)| **u == *t) {
                continue;
            }
            let mut name = t.name.clone();
            let mut k = 2;
            while names.iter().any(|(_, n)| *n == name) {
                name = format!("{}_{k}", t.name);
                k += 1;
            }
            names.push((t, name));
        }
    }
    names.sort_by(|a, b| a.1.cmp(&b.1));
    let lookup = |t: &Table| {
        names.iter().find(|(u, _)| **u == *t).map(|(_, n)| n.clone()).unwrap_or_else(|| t.name.clone())
    };
    let mut out = format!("system {}\nalphabet {}\n", system.name, system.alphabet.symbols().join(" "));
    out.push_str(&format!("input{}\noutput{}\n", words(&system.inputs), words(&system.outputs)));
    for (t, n) in &names {
        out.push('\n');
        print_table(&mut out, n, t, &system.alphabet);
    }
    for c in comps {
        out.push_str(&format!("\ncomponent {}\n  in{}\n  out{}\n", c.name(), words(c.inputs()), words(c.outputs())));
        out.push_str(&format!("  behavior {}\nend\n", expr::print_behavior(c.behavior(), &lookup, true)));
    }
    out
}

/// Prints a consistent system in canonical form.
pub fn print_architecture(system: &System) -> Result<String, FormatError> {
    let report = system.check_consistency();
    if !report.passed() {
        return Err(FormatError::Inconsistent(
            report.violations.iter().map(|v| Diagnostic::new(0, 0, v.to_string())).collect(),
        ));
    }
    Ok(canonical_text(system))
}
