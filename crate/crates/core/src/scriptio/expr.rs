//! Behavior expressions: syntax tree, parser, resolution and printing.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::lexer::{Cursor, Tok};
use super::Diagnostic;
use crate::behavior::{Behavior, ChannelSet, Kind, Table};
use crate::model::System;
use crate::semantics;
use crate::streams::{Alphabet, ChannelId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub line: usize,
    pub col: usize,
}

type Routes = Vec<(String, String)>;
type Signature = Option<(Vec<String>, Vec<String>)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Silent(Signature),
    Sink,
    Chaos(usize, Signature),
    Copy(Routes),
    Lagged(usize, usize, Routes),
    Merge(Vec<String>, String),
    Summary(usize, String, String, String),
    Unpack(usize, String, String, String),
    Table(String),
    Adapt(Vec<String>, Vec<String>, Box<Expr>),
    ChaosExtend(String, usize, Box<Expr>),
    RestrictInput(String, Box<Expr>),
    Compose(Vec<Expr>),
    Rename(Routes, Box<Expr>),
    Strategy(Box<Expr>),
    BlackBox(String),
}

pub fn names_list(cur: &mut Cursor) -> Result<Vec<String>, Diagnostic> {
    cur.expect_sym("[")?;
    let mut out = Vec::new();
    if cur.eat_sym("]") {
        return Ok(out);
    }
    loop {
        out.push(cur.word("channel name")?);
        if cur.eat_sym("]") {
            return Ok(out);
        }
        cur.expect_sym(",")?;
    }
}

pub fn routes(cur: &mut Cursor) -> Result<Routes, Diagnostic> {
    let mut out = Vec::new();
    loop {
        let a = cur.word("channel name")?;
        cur.expect_sym("->")?;
        let b = cur.word("channel name")?;
        out.push((a, b));
        if !cur.eat_sym(",") {
            return Ok(out);
        }
    }
}

fn signature(cur: &mut Cursor) -> Result<(Vec<String>, Vec<String>), Diagnostic> {
    let ins = names_list(cur)?;
    cur.expect_sym(",")?;
    let outs = names_list(cur)?;
    Ok((ins, outs))
}

pub const CONSTRUCTORS: [&str; 16] = [
    "silent", "sink", "chaos", "copy", "lagged", "merge", "summary", "unpack", "table", "adapt", "chaos_extend",
    "restrict_input", "compose", "rename", "strategy", "blackbox",
];

pub fn parse_expr(cur: &mut Cursor) -> Result<Expr, Diagnostic> {
    let (line, col) = cur.here();
    let head = cur.word("behavior expression")?;
    let mk = |kind| Ok(Expr { kind, line, col });
    match head.as_str() {
        "silent" => {
            if cur.eat_sym("(") {
                let sig = signature(cur)?;
                cur.expect_sym(")")?;
                mk(ExprKind::Silent(Some(sig)))
            } else {
                mk(ExprKind::Silent(None))
            }
        }
        "sink" => mk(ExprKind::Sink),
        "chaos" => {
            cur.expect_sym("(")?;
            let n = cur.num("interval bound")?;
            let sig = if cur.eat_sym(",") { Some(signature(cur)?) } else { None };
            cur.expect_sym(")")?;
            mk(ExprKind::Chaos(n, sig))
        }
        "copy" => {
            cur.expect_sym("(")?;
            let r = routes(cur)?;
            cur.expect_sym(")")?;
            mk(ExprKind::Copy(r))
        }
        "lagged" => {
            cur.expect_sym("(")?;
            let min = cur.num("minimal lag")?;
            cur.expect_sym(",")?;
            let max = cur.num("maximal lag")?;
            cur.expect_sym(";")?;
            let r = routes(cur)?;
            cur.expect_sym(")")?;
            mk(ExprKind::Lagged(min, max, r))
        }
        "merge" => {
            cur.expect_sym("(")?;
            let mut sources = Vec::new();
            while !cur.is_sym("->") {
                sources.push(cur.word("channel name")?);
                if !cur.eat_sym(",") {
                    break;
                }
            }
            cur.expect_sym("->")?;
            let target = cur.word("channel name")?;
            cur.expect_sym(")")?;
            mk(ExprKind::Merge(sources, target))
        }
        "summary" => {
            cur.expect_sym("(")?;
            let k = cur.num("delay")?;
            cur.expect_sym(";")?;
            let a = cur.word("channel name")?;
            cur.expect_sym(",")?;
            let b = cur.word("channel name")?;
            cur.expect_sym("->")?;
            let r = cur.word("channel name")?;
            cur.expect_sym(")")?;
            mk(ExprKind::Summary(k, a, b, r))
        }
        "unpack" => {
            cur.expect_sym("(")?;
            let k = cur.num("number of skipped intervals")?;
            cur.expect_sym(";")?;
            let r = cur.word("channel name")?;
            cur.expect_sym("->")?;
            let a = cur.word("channel name")?;
            cur.expect_sym(",")?;
            let b = cur.word("channel name")?;
            cur.expect_sym(")")?;
            mk(ExprKind::Unpack(k, r, a, b))
        }
        "table" => {
            cur.expect_sym("(")?;
            let n = cur.word("transducer name")?;
            cur.expect_sym(")")?;
            mk(ExprKind::Table(n))
        }
        "adapt" => {
            cur.expect_sym("(")?;
            let (ins, outs) = signature(cur)?;
            cur.expect_sym(",")?;
            let e = parse_expr(cur)?;
            cur.expect_sym(")")?;
            mk(ExprKind::Adapt(ins, outs, Box::new(e)))
        }
        "chaos_extend" => {
            cur.expect_sym("(")?;
            let p = cur.word("channel name")?;
            cur.expect_sym(",")?;
            let n = cur.num("interval bound")?;
            cur.expect_sym(",")?;
            let e = parse_expr(cur)?;
            cur.expect_sym(")")?;
            mk(ExprKind::ChaosExtend(p, n, Box::new(e)))
        }
        "restrict_input" => {
            cur.expect_sym("(")?;
            let p = cur.word("channel name")?;
            cur.expect_sym(",")?;
            let e = parse_expr(cur)?;
            cur.expect_sym(")")?;
            mk(ExprKind::RestrictInput(p, Box::new(e)))
        }
        "compose" => {
            cur.expect_sym("(")?;
            let mut members = Vec::new();
            if !cur.eat_sym(")") {
                loop {
                    members.push(parse_expr(cur)?);
                    if cur.eat_sym(")") {
                        break;
                    }
                    cur.expect_sym(",")?;
                }
            }
            mk(ExprKind::Compose(members))
        }
        "rename" => {
            cur.expect_sym("(")?;
            let r = routes(cur)?;
            cur.expect_sym(";")?;
            let e = parse_expr(cur)?;
            cur.expect_sym(")")?;
            mk(ExprKind::Rename(r, Box::new(e)))
        }
        "strategy" => {
            cur.expect_sym("(")?;
            let e = parse_expr(cur)?;
            cur.expect_sym(")")?;
            mk(ExprKind::Strategy(Box::new(e)))
        }
        "blackbox" => {
            cur.expect_sym("(")?;
            let p = cur.string("quoted file name")?;
            cur.expect_sym(")")?;
            mk(ExprKind::BlackBox(p))
        }
        other => Err(Diagnostic::new(
            line,
            col,
            format!("unknown behavior `{other}` (expected one of {})", CONSTRUCTORS.join(", ")),
        )),
    }
}

/// Loads the architecture behind `blackbox("...")`.
pub type Loader<'a> = &'a dyn Fn(&str) -> Result<System, String>;

pub struct Env<'a> {
    pub alphabet: &'a Alphabet,
    pub tables: &'a BTreeMap<String, Arc<Table>>,
    pub loader: Loader<'a>,
}

fn channel(name: &str, e: &Expr) -> Result<ChannelId, Diagnostic> {
    ChannelId::new(name).map_err(|err| Diagnostic::new(e.line, e.col, err.to_string()))
}

fn channel_set(names: &[String], e: &Expr) -> Result<ChannelSet, Diagnostic> {
    names.iter().map(|n| channel(n, e)).collect()
}

fn route_ids(r: &Routes, e: &Expr) -> Result<Vec<(ChannelId, ChannelId)>, Diagnostic> {
    r.iter().map(|(a, b)| Ok((channel(a, e)?, channel(b, e)?))).collect()
}

/// Resolves an expression. `hint` is the signature used by the short forms
/// `silent`, `sink` and `chaos(N)`; it is only available at the top of a
/// component definition. A top-level `blackbox` also yields the loaded
/// architecture so that the caller can record the link.
pub fn resolve(
    e: &Expr,
    env: &Env,
    hint: Option<(&ChannelSet, &ChannelSet)>,
) -> Result<(Behavior, Option<Arc<System>>), Diagnostic> {
    let err = |m: String| Diagnostic::new(e.line, e.col, m);
    let inner = |x: &Expr| resolve(x, env, None).map(|(b, _)| b);
    let symbols = env.alphabet.len();
    let needs_two = |what: &str| {
        if symbols < 2 {
            Err(err(format!("`{what}` needs an alphabet with at least two symbols")))
        } else {
            Ok(())
        }
    };
    let b = match &e.kind {
        ExprKind::Silent(Some((i, o))) => Behavior::silent(channel_set(i, e)?, channel_set(o, e)?),
        ExprKind::Silent(None) => match hint {
            Some((i, o)) => Behavior::silent(i.clone(), o.clone()),
            None => return Err(err("`silent` needs an explicit signature here: silent([ins], [outs])".into())),
        },
        ExprKind::Sink => match hint {
            Some((i, o)) if o.is_empty() => Behavior::silent(i.clone(), ChannelSet::new()),
            Some(_) => return Err(err("`sink` cannot have outputs".into())),
            None => Behavior::unit(),
        },
        ExprKind::Chaos(n, Some((i, o))) => Behavior::chaos(channel_set(i, e)?, channel_set(o, e)?, *n, symbols),
        ExprKind::Chaos(n, None) => match hint {
            Some((i, o)) => Behavior::chaos(i.clone(), o.clone(), *n, symbols),
            None => return Err(err("`chaos` needs an explicit signature here: chaos(N, [ins], [outs])".into())),
        },
        ExprKind::Copy(r) => Behavior::copy(&route_ids(r, e)?).map_err(|x| err(x.to_string()))?,
        ExprKind::Lagged(min, max, r) => {
            Behavior::lagged(*min, *max, &route_ids(r, e)?).map_err(|x| err(x.to_string()))?
        }
        ExprKind::Merge(s, t) => {
            let sources: Vec<ChannelId> = s.iter().map(|n| channel(n, e)).collect::<Result<_, _>>()?;
            Behavior::merge(&sources, channel(t, e)?)
        }
        ExprKind::Summary(k, a, b, r) => {
            needs_two("summary")?;
            Behavior::summary(*k, channel(a, e)?, channel(b, e)?, channel(r, e)?).map_err(|x| err(x.to_string()))?
        }
        ExprKind::Unpack(k, r, a, b) => {
            needs_two("unpack")?;
            Behavior::unpack(*k, channel(r, e)?, channel(a, e)?, channel(b, e)?).map_err(|x| err(x.to_string()))?
        }
        ExprKind::Table(n) => {
            let t = env.tables.get(n).ok_or_else(|| err(format!("unknown transducer `{n}`")))?;
            Behavior::table((**t).clone()).map_err(|x| err(x.to_string()))?
        }
        ExprKind::Adapt(i, o, x) => {
            inner(x)?.adapt(&channel_set(i, e)?, &channel_set(o, e)?).map_err(|x| err(x.to_string()))?
        }
        ExprKind::ChaosExtend(p, n, x) => {
            inner(x)?.chaos_extend(&channel(p, e)?, *n, symbols).map_err(|x| err(x.to_string()))?
        }
        ExprKind::RestrictInput(p, x) => {
            let b = inner(x)?;
            let p = channel(p, e)?;
            if !b.inputs().contains(&p) {
                return Err(err(format!("`{p}` is not an input")));
            }
            b.restrict_input_unchecked(&p)
        }
        ExprKind::Compose(xs) => {
            let members: Vec<Behavior> = xs.iter().map(inner).collect::<Result<_, _>>()?;
            Behavior::compose(&members).map_err(|x| err(x.to_string()))?
        }
        ExprKind::Rename(r, x) => {
            let map: BTreeMap<ChannelId, ChannelId> = route_ids(r, e)?.into_iter().collect();
            inner(x)?.rename(&map).map_err(|x| err(x.to_string()))?
        }
        ExprKind::Strategy(x) => inner(x)?.extract_strategy_node(),
        ExprKind::BlackBox(path) => {
            let sys = (env.loader)(path).map_err(|m| err(format!("cannot load `{path}`: {m}")))?;
            if &sys.alphabet != env.alphabet {
                return Err(err(format!("`{path}` declares a different alphabet")));
            }
            let b = semantics::black_box(&sys).map_err(|x| err(x.to_string()))?;
            return Ok((b, Some(Arc::new(sys))));
        }
    };
    Ok((b, None))
}

fn list(set: &ChannelSet) -> String {
    let v: Vec<&str> = set.iter().map(|c| c.as_str()).collect();
    format!("[{}]", v.join(", "))
}

fn route_text(routes: &[(ChannelId, ChannelId)]) -> String {
    let v: Vec<String> = routes.iter().map(|(a, b)| format!("{a} -> {b}")).collect();
    v.join(", ")
}

/// Prints a behavior as an expression; `table_name` gives the name under
/// which each transducer is printed. `top` enables the short forms.
pub fn print_behavior(b: &Behavior, table_name: &dyn Fn(&Table) -> String, top: bool) -> String {
    let rec = |x: &Behavior| print_behavior(x, table_name, false);
    match b.kind() {
        Kind::Silent if top => "silent".into(),
        Kind::Silent => format!("silent({}, {})", list(b.inputs()), list(b.outputs())),
        Kind::Chaos { bound, .. } if top => format!("chaos({bound})"),
        Kind::Chaos { bound, .. } => format!("chaos({bound}, {}, {})", list(b.inputs()), list(b.outputs())),
        Kind::Lagged { min: 1, max: 1, routes } => format!("copy({})", route_text(routes)),
        Kind::Lagged { min, max, routes } => format!("lagged({min}, {max}; {})", route_text(routes)),
        Kind::Merge { sources, target } => {
            let s: Vec<&str> = sources.iter().map(|c| c.as_str()).collect();
            if s.is_empty() {
                format!("merge(-> {target})")
            } else {
                format!("merge({} -> {target})", s.join(", "))
            }
        }
        Kind::Summary { delay, first, second, target } => format!("summary({delay}; {first}, {second} -> {target})"),
        Kind::Unpack { skip, source, first, second } => format!("unpack({skip}; {source} -> {first}, {second})"),
        Kind::Table(t) => format!("table({})", table_name(&**t)),
        Kind::Adapt(inner) => format!("adapt({}, {}, {})", list(b.inputs()), list(b.outputs()), rec(inner)),
        Kind::ChaosExtend { inner, channel, bound, .. } => format!("chaos_extend({channel}, {bound}, {})", rec(inner)),
        Kind::RestrictInput { inner, channel } => format!("restrict_input({channel}, {})", rec(inner)),
        Kind::Compose(members) => {
            let v: Vec<String> = members.iter().map(rec).collect();
            format!("compose({})", v.join(", "))
        }
        Kind::Rename { inner, map } => {
            let pairs: Vec<(ChannelId, ChannelId)> = map.iter().map(|(a, b)| (a.clone(), b.clone())).collect();
            format!("rename({}; {})", route_text(&pairs), rec(inner))
        }
        Kind::Strategy(inner) => format!("strategy({})", rec(inner)),
    }
}

/// True when the next token starts an expression.
pub fn starts_expr(cur: &Cursor) -> bool {
    matches!(cur.peek(), Some(Tok::Word(w)) if CONSTRUCTORS.contains(&w.as_str()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scriptio::lexer::tokenize;
    use crate::streams::{ch, chans};

    fn parse(text: &str) -> Expr {
        let toks = tokenize(text, 1).unwrap();
        let mut cur = Cursor::new(&toks, 1, text.len() + 1);
        let e = parse_expr(&mut cur).unwrap();
        cur.end().unwrap();
        e
    }

    fn resolve_text(text: &str) -> Behavior {
        let alphabet = Alphabet::letters(2);
        let tables = BTreeMap::new();
        let loader = |_: &str| -> Result<System, String> { Err("no files".into()) };
        let env = Env { alphabet: &alphabet, tables: &tables, loader: &loader };
        resolve(&parse(text), &env, None).unwrap().0
    }

    #[test]
    fn round_trips_through_printing() {
        for text in [
            "copy(p -> q, r -> s)",
            "lagged(1, 2; progress -> sched, ordpay' -> pricing)",
            "merge(a, b -> c)",
            "summary(1; ordpay', progress -> reports)",
            "unpack(1; reports -> pricing, sched)",
            "adapt([p, x], [q], copy(p -> q))",
            "chaos_extend(z, 2, copy(p -> q))",
            "restrict_input(x, compose(copy(p -> q), merge(q, x -> r)))",
            "rename(q -> w; copy(p -> q))",
            "strategy(chaos(1, [], [q]))",
            "silent([p], [q])",
        ] {
            let b = resolve_text(text);
            let printed = print_behavior(&b, &|t| t.name.clone(), false);
            assert_eq!(printed, text);
            assert_eq!(resolve_text(&printed), b);
        }
    }

    #[test]
    fn short_forms_need_a_signature() {
        let alphabet = Alphabet::letters(1);
        let tables = BTreeMap::new();
        let loader = |_: &str| -> Result<System, String> { Err("no files".into()) };
        let env = Env { alphabet: &alphabet, tables: &tables, loader: &loader };
        assert!(resolve(&parse("silent"), &env, None).is_err());
        let (ins, outs) = (chans(&["p"]), chans(&["q"]));
        let (b, _) = resolve(&parse("chaos(1)"), &env, Some((&ins, &outs))).unwrap();
        assert_eq!(b.outputs(), &chans(&["q"]));
        assert!(resolve(&parse("sink"), &env, Some((&ins, &outs))).is_err());
        assert!(resolve(&parse("summary(1; a, b -> r)"), &env, None).is_err());
        let e = resolve(&parse("table(T)"), &env, None).unwrap_err();
        assert!(e.message.contains("unknown transducer"));
        let _ = ch("p");
    }
}
