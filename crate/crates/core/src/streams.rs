//! Finite-horizon timed streams and named stream tuples.
//!
//! A timed stream is a sequence of intervals, each interval being the finite
//! ordered sequence of messages transmitted during one time slot. Streams are
//! truncated at a horizon `H`; every judgment made on top of this module is
//! therefore "up to `H`".

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StreamError {
    #[error("invalid channel identifier `{0}`")]
    InvalidChannel(String),
    #[error("prefix length {index} exceeds horizon {horizon}")]
    Range { index: usize, horizon: usize },
    #[error("channels {0:?} are not in the tuple domain")]
    Domain(Vec<String>),
    #[error("tuples disagree on channel `{0}`")]
    Conflict(String),
    #[error("stream horizons differ ({0} vs {1})")]
    Horizon(usize, usize),
}

/// Name of a channel. Identifiers follow `[A-Za-z][A-Za-z0-9_']*`, so primed
/// names such as `ordpay'` are valid.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChannelId(Arc<str>);

impl ChannelId {
    pub fn new(name: &str) -> Result<Self, StreamError> {
        if is_identifier(name) {
            Ok(ChannelId(Arc::from(name)))
        } else {
            Err(StreamError::InvalidChannel(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// Shorthand for building channel ids from literals known to be valid.
///
/// Panics on an invalid identifier.
pub fn ch(name: &str) -> ChannelId {
    ChannelId::new(name).unwrap_or_else(|e| panic!("{e}"))
}

/// Builds a channel set from literal names.
pub fn chans(names: &[&str]) -> BTreeSet<ChannelId> {
    names.iter().map(|n| ch(n)).collect()
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl fmt::Debug for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A message: the index of a symbol in the system alphabet. Ordering follows
/// the declaration order of the alphabet.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Message(pub u8);

impl fmt::Debug for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", default_symbol(self.0))
    }
}

fn default_symbol(index: u8) -> String {
    if index < 26 {
        ((b'a' + index) as char).to_string()
    } else {
        format!("m{index}")
    }
}

/// The declared finite set of messages, in declaration order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Self {
        Alphabet { symbols: symbols.into_iter().map(Into::into).collect() }
    }

    /// Alphabet `a, b, c, ...` of the given size.
    pub fn letters(size: usize) -> Self {
        Alphabet::new((0..size).map(|i| default_symbol(i as u8)))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn lookup(&self, symbol: &str) -> Option<Message> {
        self.symbols.iter().position(|s| s == symbol).map(|i| Message(i as u8))
    }

    pub fn name(&self, message: Message) -> String {
        self.symbols
            .get(message.0 as usize)
            .cloned()
            .unwrap_or_else(|| default_symbol(message.0))
    }

    pub fn render_interval(&self, interval: &Interval) -> String {
        let parts: Vec<String> = interval.items().iter().map(|m| self.name(*m)).collect();
        format!("<{}>", parts.join(","))
    }

    pub fn render_stream(&self, stream: &TimedStream) -> String {
        let parts: Vec<String> = stream.intervals().iter().map(|i| self.render_interval(i)).collect();
        parts.join(" ")
    }

    pub fn render_tuple(&self, tuple: &NamedStreamTuple) -> String {
        let parts: Vec<String> = tuple
            .iter()
            .map(|(c, s)| format!("{c}: {}", self.render_stream(s)))
            .collect();
        format!("{{{}}}", parts.join("; "))
    }
}

/// Messages transmitted within one time interval, in arrival order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Interval(Vec<Message>);

impl Interval {
    pub fn empty() -> Self {
        Interval(Vec::new())
    }

    pub fn new(items: Vec<Message>) -> Self {
        Interval(items)
    }

    pub fn of(indices: &[u8]) -> Self {
        Interval(indices.iter().map(|&i| Message(i)).collect())
    }

    pub fn items(&self) -> &[Message] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Interval) -> Interval {
        let mut items = self.0.clone();
        items.extend_from_slice(&other.0);
        Interval(items)
    }

    /// Every interval of length at most `bound` over `symbols` messages, in
    /// canonical order (shorter first, then lexicographic).
    pub fn all_up_to(symbols: usize, bound: usize) -> Vec<Interval> {
        let mut out = vec![Interval::empty()];
        let mut layer = vec![Interval::empty()];
        for _ in 0..bound {
            let mut next = Vec::with_capacity(layer.len() * symbols);
            for prefix in &layer {
                for s in 0..symbols {
                    let mut items = prefix.0.clone();
                    items.push(Message(s as u8));
                    next.push(Interval(items));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|m| format!("{m:?}")).collect();
        write!(f, "<{}>", parts.join(","))
    }
}

/// A timed stream truncated to a finite horizon.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TimedStream(Vec<Interval>);

impl TimedStream {
    pub fn new(intervals: Vec<Interval>) -> Self {
        TimedStream(intervals)
    }

    /// The stream of `horizon` empty intervals.
    pub fn silent(horizon: usize) -> Self {
        TimedStream(vec![Interval::empty(); horizon])
    }

    pub fn horizon(&self) -> usize {
        self.0.len()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.0
    }

    pub fn at(&self, tick: usize) -> &Interval {
        &self.0[tick]
    }

    pub fn prefix(&self, length: usize) -> Result<TimedStream, StreamError> {
        if length > self.0.len() {
            return Err(StreamError::Range { index: length, horizon: self.0.len() });
        }
        Ok(TimedStream(self.0[..length].to_vec()))
    }
}

impl fmt::Debug for TimedStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| format!("{i:?}")).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// The first `length` intervals of `stream`.
pub fn prefix(stream: &TimedStream, length: usize) -> Result<TimedStream, StreamError> {
    stream.prefix(length)
}

/// One tick of a tuple: the interval carried by each channel in one slot.
pub type Frame = BTreeMap<ChannelId, Interval>;

/// Assignment of equal-horizon streams to a finite channel set.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NamedStreamTuple {
    horizon: usize,
    streams: BTreeMap<ChannelId, TimedStream>,
}

impl NamedStreamTuple {
    /// The tuple over the empty domain at the given horizon.
    pub fn empty(horizon: usize) -> Self {
        NamedStreamTuple { horizon, streams: BTreeMap::new() }
    }

    pub fn new(
        horizon: usize,
        streams: BTreeMap<ChannelId, TimedStream>,
    ) -> Result<Self, StreamError> {
        for s in streams.values() {
            if s.horizon() != horizon {
                return Err(StreamError::Horizon(horizon, s.horizon()));
            }
        }
        Ok(NamedStreamTuple { horizon, streams })
    }

    /// Builds a tuple from per-tick frames; every frame must cover `domain`.
    pub fn from_frames(domain: &BTreeSet<ChannelId>, frames: &[Frame]) -> Self {
        let mut streams = BTreeMap::new();
        for c in domain {
            let intervals = frames
                .iter()
                .map(|f| f.get(c).cloned().unwrap_or_default())
                .collect();
            streams.insert(c.clone(), TimedStream(intervals));
        }
        NamedStreamTuple { horizon: frames.len(), streams }
    }

    /// All-empty tuple over `domain`.
    pub fn silent(domain: &BTreeSet<ChannelId>, horizon: usize) -> Self {
        NamedStreamTuple {
            horizon,
            streams: domain.iter().map(|c| (c.clone(), TimedStream::silent(horizon))).collect(),
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn domain(&self) -> BTreeSet<ChannelId> {
        self.streams.keys().cloned().collect()
    }

    pub fn get(&self, channel: &ChannelId) -> Option<&TimedStream> {
        self.streams.get(channel)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ChannelId, &TimedStream)> {
        self.streams.iter()
    }

    pub fn frame(&self, tick: usize) -> Frame {
        self.streams.iter().map(|(c, s)| (c.clone(), s.at(tick).clone())).collect()
    }

    pub fn frames(&self) -> Vec<Frame> {
        (0..self.horizon).map(|t| self.frame(t)).collect()
    }

    /// Truncates every stream to its first `length` intervals.
    pub fn prefix(&self, length: usize) -> Result<Self, StreamError> {
        if length > self.horizon {
            return Err(StreamError::Range { index: length, horizon: self.horizon });
        }
        let streams = self
            .streams
            .iter()
            .map(|(c, s)| (c.clone(), TimedStream(s.0[..length].to_vec())))
            .collect();
        Ok(NamedStreamTuple { horizon: length, streams })
    }

    pub fn restrict(&self, channels: &BTreeSet<ChannelId>) -> Result<Self, StreamError> {
        let missing: Vec<String> = channels
            .iter()
            .filter(|c| !self.streams.contains_key(*c))
            .map(|c| c.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(StreamError::Domain(missing));
        }
        Ok(self.restrict_lenient(channels))
    }

    /// Restriction that silently drops channels outside the domain.
    pub(crate) fn restrict_lenient(&self, channels: &BTreeSet<ChannelId>) -> Self {
        let streams = self
            .streams
            .iter()
            .filter(|(c, _)| channels.contains(*c))
            .map(|(c, s)| (c.clone(), s.clone()))
            .collect();
        NamedStreamTuple { horizon: self.horizon, streams }
    }

    pub fn merge(&self, other: &Self) -> Result<Self, StreamError> {
        if self.horizon != other.horizon && !self.streams.is_empty() && !other.streams.is_empty() {
            return Err(StreamError::Horizon(self.horizon, other.horizon));
        }
        let mut streams = self.streams.clone();
        for (c, s) in &other.streams {
            match streams.get(c) {
                Some(existing) if existing != s => return Err(StreamError::Conflict(c.to_string())),
                Some(_) => {}
                None => {
                    streams.insert(c.clone(), s.clone());
                }
            }
        }
        let horizon = if self.streams.is_empty() { other.horizon } else { self.horizon };
        Ok(NamedStreamTuple { horizon, streams })
    }

    /// Applies a channel renaming; channels outside the map keep their name.
    pub fn renamed(&self, map: &BTreeMap<ChannelId, ChannelId>) -> Self {
        let streams = self
            .streams
            .iter()
            .map(|(c, s)| (map.get(c).cloned().unwrap_or_else(|| c.clone()), s.clone()))
            .collect();
        NamedStreamTuple { horizon: self.horizon, streams }
    }
}

impl fmt::Debug for NamedStreamTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.streams.iter().map(|(c, s)| format!("{c}: {s:?}")).collect();
        write!(f, "{{{}}}", parts.join("; "))
    }
}

/// Restriction of `tuple` to `channels`, which must lie inside its domain.
pub fn restrict(
    tuple: &NamedStreamTuple,
    channels: &BTreeSet<ChannelId>,
) -> Result<NamedStreamTuple, StreamError> {
    tuple.restrict(channels)
}

/// Union of two tuples that agree on their shared channels.
pub fn merge(a: &NamedStreamTuple, b: &NamedStreamTuple) -> Result<NamedStreamTuple, StreamError> {
    a.merge(b)
}

/// Per-channel sets of admissible intervals over which tuples are enumerated.
pub type Domains = BTreeMap<ChannelId, Vec<Interval>>;

/// Lazily enumerable space of tuples whose intervals are drawn from
/// per-channel domains.
#[derive(Clone, Debug)]
pub struct TupleSpace {
    horizon: usize,
    channels: Vec<ChannelId>,
    domains: Vec<Vec<Interval>>,
}

impl TupleSpace {
    pub fn new(domains: &Domains, horizon: usize) -> Self {
        TupleSpace {
            horizon,
            channels: domains.keys().cloned().collect(),
            domains: domains.values().cloned().collect(),
        }
    }

    pub fn uniform(channels: &BTreeSet<ChannelId>, symbols: usize, horizon: usize, bound: usize) -> Self {
        let all = Interval::all_up_to(symbols, bound);
        let domains: Domains = channels.iter().map(|c| (c.clone(), all.clone())).collect();
        TupleSpace::new(&domains, horizon)
    }

    /// Number of tuples; saturates at `u128::MAX`.
    pub fn size(&self) -> u128 {
        let mut n: u128 = 1;
        for d in &self.domains {
            for _ in 0..self.horizon {
                n = n.saturating_mul(d.len() as u128);
            }
        }
        n
    }

    pub fn iter(&self) -> TupleIter<'_> {
        let slots = self.channels.len() * self.horizon;
        let exhausted = self.domains.iter().any(|d| d.is_empty()) && slots > 0;
        TupleIter { space: self, digits: vec![0; slots], done: exhausted }
    }

    fn build(&self, digits: &[usize]) -> NamedStreamTuple {
        let mut streams = BTreeMap::new();
        for (k, c) in self.channels.iter().enumerate() {
            let intervals = (0..self.horizon)
                .map(|t| self.domains[k][digits[k * self.horizon + t]].clone())
                .collect();
            streams.insert(c.clone(), TimedStream(intervals));
        }
        NamedStreamTuple { horizon: self.horizon, streams }
    }
}

pub struct TupleIter<'a> {
    space: &'a TupleSpace,
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for TupleIter<'_> {
    type Item = NamedStreamTuple;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = self.space.build(&self.digits);
        // odometer increment, last slot fastest
        let mut pos = self.digits.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            let radix = self.space.domains[pos / self.space.horizon.max(1)].len();
            self.digits[pos] += 1;
            if self.digits[pos] < radix {
                break;
            }
            self.digits[pos] = 0;
        }
        Some(item)
    }
}

/// Every tuple over `channels` whose intervals hold at most `bound` messages
/// drawn from an alphabet of `symbols` messages.
pub fn enumerate_tuples(
    channels: &BTreeSet<ChannelId>,
    symbols: usize,
    horizon: usize,
    bound: usize,
) -> Vec<NamedStreamTuple> {
    TupleSpace::uniform(channels, symbols, horizon, bound).iter().collect()
}
