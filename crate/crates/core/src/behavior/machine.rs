use std::collections::BTreeSet;

use super::process::{summarize, unsummarize};
use super::{Behavior, ChannelSet, Kind};
use crate::streams::{ChannelId, Frame, Interval};

/// Transducer state. Composite behaviors nest the states of their parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    Unit,
    Index(u32),
    Memory(Vec<Interval>),
    Product(Vec<State>),
    /// Composite state between emit and absorb: member states plus the
    /// frame they emitted, needed to feed internal channels back.
    Pending(Vec<State>, Frame),
}

fn get(frame: &Frame, channel: &ChannelId) -> Interval {
    frame.get(channel).cloned().unwrap_or_default()
}

fn restrict(frame: &Frame, channels: &ChannelSet) -> Frame {
    channels.iter().map(|c| (c.clone(), get(frame, c))).collect()
}

fn empty_frame(channels: &ChannelSet) -> Frame {
    channels.iter().map(|c| (c.clone(), Interval::empty())).collect()
}

/// Every frame over `channels` with intervals drawn from `choices`.
fn all_frames(channels: &ChannelSet, choices: &[Interval]) -> Vec<Frame> {
    let mut frames = vec![Frame::new()];
    for c in channels {
        let mut next = Vec::with_capacity(frames.len() * choices.len());
        for f in &frames {
            for i in choices {
                let mut g = f.clone();
                g.insert(c.clone(), i.clone());
                next.push(g);
            }
        }
        frames = next;
    }
    frames
}

fn dedup<T: Ord>(items: Vec<T>) -> Vec<T> {
    items.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

impl Behavior {
    pub fn initial(&self) -> State {
        match self.kind() {
            Kind::Silent | Kind::Chaos { .. } => State::Unit,
            Kind::Lagged { max, routes, .. } => State::Memory(vec![Interval::empty(); routes.len() * max]),
            Kind::Merge { .. } => State::Memory(vec![Interval::empty()]),
            Kind::Summary { delay, .. } => State::Memory(vec![Interval::empty(); *delay]),
            Kind::Unpack { .. } => State::Product(vec![State::Index(0), State::Memory(vec![Interval::empty()])]),
            Kind::Table(t) => State::Index(t.initial as u32),
            Kind::Adapt(inner)
            | Kind::ChaosExtend { inner, .. }
            | Kind::RestrictInput { inner, .. }
            | Kind::Rename { inner, .. }
            | Kind::Strategy(inner) => inner.initial(),
            Kind::Compose(members) => State::Product(members.iter().map(|m| m.initial()).collect()),
        }
    }

    /// Emit choices in `state`: the output frame of this tick paired with
    /// the intermediate state that will absorb the input.
    pub fn emit(&self, state: &State) -> Vec<(Frame, State)> {
        match (self.kind(), state) {
            (Kind::Silent, _) => vec![(empty_frame(self.outputs()), State::Unit)],
            (Kind::Chaos { bound, symbols }, _) => {
                let choices = Interval::all_up_to(*symbols, *bound);
                all_frames(self.outputs(), &choices).into_iter().map(|f| (f, State::Unit)).collect()
            }
            (Kind::Lagged { min, max, routes }, State::Memory(hist)) => {
                let frames: Vec<Frame> = (*min..=*max)
                    .map(|lag| {
                        routes
                            .iter()
                            .enumerate()
                            .map(|(r, (_, target))| (target.clone(), hist[r * max + lag - 1].clone()))
                            .collect()
                    })
                    .collect();
                dedup(frames).into_iter().map(|f| (f, state.clone())).collect()
            }
            (Kind::Merge { target, .. }, State::Memory(last)) => {
                vec![([(target.clone(), last[0].clone())].into_iter().collect(), state.clone())]
            }
            (Kind::Summary { target, .. }, State::Memory(queue)) => {
                vec![([(target.clone(), queue[0].clone())].into_iter().collect(), state.clone())]
            }
            (Kind::Unpack { skip, first, second, .. }, State::Product(parts)) => {
                let (seen, last) = match (&parts[0], &parts[1]) {
                    (State::Index(n), State::Memory(m)) => (*n as usize, &m[0]),
                    _ => unreachable!("unpack state shape"),
                };
                let (a, b) = if seen > *skip {
                    unsummarize(last).unwrap_or_default()
                } else {
                    Default::default()
                };
                vec![([(first.clone(), a), (second.clone(), b)].into_iter().collect(), state.clone())]
            }
            (Kind::Table(t), State::Index(s)) => t.emits[*s as usize]
                .iter()
                .map(|(f, target)| (f.clone(), State::Index(*target as u32)))
                .collect(),
            (Kind::Adapt(inner), _) => {
                let choices = inner
                    .emit(state)
                    .into_iter()
                    .map(|(f, s)| (restrict(&f, self.outputs()), s))
                    .collect();
                dedup(choices)
            }
            (Kind::ChaosExtend { inner, channel, bound, symbols }, _) => {
                let extra = Interval::all_up_to(*symbols, *bound);
                let mut out = Vec::new();
                for (f, s) in inner.emit(state) {
                    for i in &extra {
                        let mut g = f.clone();
                        g.insert(channel.clone(), i.clone());
                        out.push((g, s.clone()));
                    }
                }
                out
            }
            (Kind::RestrictInput { inner, .. }, _) => inner.emit(state),
            (Kind::Compose(members), State::Product(states)) => {
                let mut acc: Vec<(Frame, Vec<State>)> = vec![(Frame::new(), Vec::new())];
                for (m, s) in members.iter().zip(states) {
                    let choices = m.emit(s);
                    let mut next = Vec::with_capacity(acc.len() * choices.len());
                    for (f, ss) in &acc {
                        for (g, t) in &choices {
                            let mut f2 = f.clone();
                            f2.extend(g.iter().map(|(k, v)| (k.clone(), v.clone())));
                            let mut ss2 = ss.clone();
                            ss2.push(t.clone());
                            next.push((f2, ss2));
                        }
                    }
                    acc = next;
                }
                acc.into_iter()
                    .map(|(f, ss)| (f.clone(), State::Pending(ss, f)))
                    .collect()
            }
            (Kind::Rename { inner, map }, _) => inner
                .emit(state)
                .into_iter()
                .map(|(f, s)| {
                    let g = f.into_iter().map(|(c, i)| (map.get(&c).cloned().unwrap_or(c), i)).collect();
                    (g, s)
                })
                .collect(),
            (Kind::Strategy(inner), _) => {
                let least = inner.emit(state).into_iter().min().expect("emit is total");
                vec![least]
            }
            (kind, state) => unreachable!("state {state:?} does not belong to {kind:?}"),
        }
    }

    /// Successor states after absorbing `input` (a frame covering at least
    /// this behavior's inputs; missing channels read as empty).
    pub fn absorb(&self, state: &State, input: &Frame) -> Vec<State> {
        match (self.kind(), state) {
            (Kind::Silent | Kind::Chaos { .. }, _) => vec![State::Unit],
            (Kind::Lagged { max, routes, .. }, State::Memory(hist)) => {
                let mut next = Vec::with_capacity(hist.len());
                for (r, (source, _)) in routes.iter().enumerate() {
                    next.push(get(input, source));
                    next.extend_from_slice(&hist[r * max..r * max + max - 1]);
                }
                vec![State::Memory(next)]
            }
            (Kind::Merge { sources, .. }, _) => {
                let joined = sources.iter().fold(Interval::empty(), |acc, s| acc.concat(&get(input, s)));
                vec![State::Memory(vec![joined])]
            }
            (Kind::Summary { first, second, .. }, State::Memory(queue)) => {
                let mut next = queue[1..].to_vec();
                next.push(summarize(&get(input, first), &get(input, second)));
                vec![State::Memory(next)]
            }
            (Kind::Unpack { skip, source, .. }, State::Product(parts)) => {
                let seen = match parts[0] {
                    State::Index(n) => n as usize,
                    _ => unreachable!("unpack state shape"),
                };
                let seen = (seen + 1).min(skip + 1) as u32;
                vec![State::Product(vec![State::Index(seen), State::Memory(vec![get(input, source)])])]
            }
            (Kind::Table(t), State::Index(s)) => {
                let rule = t.steps[*s as usize]
                    .iter()
                    .find(|r| r.pattern.iter().all(|(c, i)| &get(input, c) == i));
                match rule {
                    Some(r) => r.targets.iter().map(|&x| State::Index(x as u32)).collect(),
                    None => vec![state.clone()],
                }
            }
            (Kind::Adapt(inner) | Kind::ChaosExtend { inner, .. }, _) => inner.absorb(state, input),
            (Kind::RestrictInput { inner, channel }, _) => {
                let mut f = restrict(input, self.inputs());
                f.insert(channel.clone(), Interval::empty());
                inner.absorb(state, &f)
            }
            (Kind::Compose(members), State::Pending(states, emitted)) => {
                let mut tick = restrict(input, self.inputs());
                tick.extend(emitted.iter().map(|(k, v)| (k.clone(), v.clone())));
                let mut acc: Vec<Vec<State>> = vec![Vec::new()];
                for (m, s) in members.iter().zip(states) {
                    let succ = m.absorb(s, &restrict(&tick, m.inputs()));
                    let mut next = Vec::with_capacity(acc.len() * succ.len());
                    for prefix in &acc {
                        for t in &succ {
                            let mut p = prefix.clone();
                            p.push(t.clone());
                            next.push(p);
                        }
                    }
                    acc = next;
                }
                dedup(acc).into_iter().map(State::Product).collect()
            }
            (Kind::Rename { inner, map }, _) => {
                let f: Frame = inner
                    .inputs()
                    .iter()
                    .map(|c| (c.clone(), get(input, map.get(c).unwrap_or(c))))
                    .collect();
                inner.absorb(state, &f)
            }
            (Kind::Strategy(inner), _) => {
                let least = inner.absorb(state, input).into_iter().min().expect("absorb is total");
                vec![least]
            }
            (kind, state) => unreachable!("state {state:?} does not belong to {kind:?}"),
        }
    }
}
