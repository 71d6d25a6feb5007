use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;

use super::{node, Behavior, BehaviorError, Bounds, ChannelSet, Counterexample, Kind, State, Verdict};
use crate::streams::{ChannelId, Domains, Frame, NamedStreamTuple, TupleSpace};

/// Runs the transducer on input frames and collects every reachable output
/// history. Input frames may carry extra channels.
pub(crate) fn run(behavior: &Behavior, inputs: &[Frame]) -> BTreeSet<NamedStreamTuple> {
    let mut frontier: HashSet<(Vec<Frame>, State)> = HashSet::new();
    frontier.insert((Vec::new(), behavior.initial()));
    for input in inputs {
        let mut next = HashSet::with_capacity(frontier.len());
        for (outs, state) in &frontier {
            for (frame, mid) in behavior.emit(state) {
                for succ in behavior.absorb(&mid, input) {
                    let mut o = outs.clone();
                    o.push(frame.clone());
                    next.insert((o, succ));
                }
            }
        }
        frontier = next;
    }
    frontier
        .into_iter()
        .map(|(outs, _)| NamedStreamTuple::from_frames(behavior.outputs(), &outs))
        .collect()
}

/// Membership test `output ∈ denote(behavior, input)` without materializing
/// the whole output set.
pub(crate) fn admits(behavior: &Behavior, inputs: &[Frame], outputs: &[Frame]) -> bool {
    let mut frontier: HashSet<State> = HashSet::new();
    frontier.insert(behavior.initial());
    for (input, wanted) in inputs.iter().zip(outputs) {
        let mut next = HashSet::new();
        for state in &frontier {
            for (frame, mid) in behavior.emit(state) {
                if &frame == wanted {
                    next.extend(behavior.absorb(&mid, input));
                }
            }
        }
        if next.is_empty() {
            return false;
        }
        frontier = next;
    }
    true
}

fn signature_of(b: &Behavior) -> String {
    let i: Vec<&str> = b.inputs().iter().map(|c| c.as_str()).collect();
    let o: Vec<&str> = b.outputs().iter().map(|c| c.as_str()).collect();
    format!("({}) -> ({})", i.join(", "), o.join(", "))
}

fn same_signature(a: &Behavior, b: &Behavior) -> Result<(), BehaviorError> {
    if a.inputs() != b.inputs() || a.outputs() != b.outputs() {
        return Err(BehaviorError::Interface(format!(
            "signatures differ: {} vs {}",
            signature_of(a),
            signature_of(b)
        )));
    }
    Ok(())
}

fn check_input(behavior: &Behavior, input: &NamedStreamTuple, horizon: usize) -> Result<(), BehaviorError> {
    if &input.domain() != behavior.inputs() {
        return Err(BehaviorError::Interface(format!(
            "input over {:?} does not match behavior inputs {:?}",
            input.domain(),
            behavior.inputs()
        )));
    }
    if input.horizon() != horizon {
        return Err(BehaviorError::Interface(format!(
            "input horizon {} differs from requested horizon {horizon}",
            input.horizon()
        )));
    }
    Ok(())
}

/// The set of output histories the behavior may produce for `input` within
/// `horizon` ticks.
pub fn denote(
    behavior: &Behavior,
    input: &NamedStreamTuple,
    horizon: usize,
) -> Result<BTreeSet<NamedStreamTuple>, BehaviorError> {
    check_input(behavior, input, horizon)?;
    Ok(run(behavior, &input.frames()))
}

/// Whether `output` belongs to `denote(behavior, input)`.
pub fn accepts(
    behavior: &Behavior,
    input: &NamedStreamTuple,
    output: &NamedStreamTuple,
) -> Result<bool, BehaviorError> {
    check_input(behavior, input, input.horizon())?;
    if &output.domain() != behavior.outputs() || output.horizon() != input.horizon() {
        return Err(BehaviorError::Interface("output does not match behavior outputs".into()));
    }
    Ok(admits(behavior, &input.frames(), &output.frames()))
}

/// Frames the behavior may emit at the tick after `output`, given that it
/// produced `output` while reading `input`; empty when it cannot.
pub fn continuations(
    behavior: &Behavior,
    input: &NamedStreamTuple,
    output: &NamedStreamTuple,
) -> Result<BTreeSet<Frame>, BehaviorError> {
    check_input(behavior, input, input.horizon())?;
    if &output.domain() != behavior.outputs() || output.horizon() != input.horizon() {
        return Err(BehaviorError::Interface("output does not match behavior outputs".into()));
    }
    let mut frontier: HashSet<State> = HashSet::new();
    frontier.insert(behavior.initial());
    for (input, wanted) in input.frames().iter().zip(output.frames()) {
        let mut next = HashSet::new();
        for state in &frontier {
            for (frame, mid) in behavior.emit(state) {
                if frame == wanted {
                    next.extend(behavior.absorb(&mid, input));
                }
            }
        }
        frontier = next;
    }
    Ok(frontier.iter().flat_map(|s| behavior.emit(s)).map(|(f, _)| f).collect())
}

fn input_space(channels: &ChannelSet, domains: &Domains, horizon: usize) -> Result<Vec<NamedStreamTuple>, BehaviorError> {
    let mut sub = Domains::new();
    for c in channels {
        let d = domains
            .get(c)
            .ok_or_else(|| BehaviorError::Interface(format!("no enumeration domain for channel `{c}`")))?;
        sub.insert(c.clone(), d.clone());
    }
    Ok(TupleSpace::new(&sub, horizon).iter().collect())
}

/// `candidate` refines `reference` when, for every enumerated input, each
/// candidate output is also a reference output.
pub fn refines(candidate: &Behavior, reference: &Behavior, bounds: Bounds) -> Result<Verdict, BehaviorError> {
    refines_within(candidate, reference, &bounds.uniform(candidate.inputs()), bounds)
}

/// [`refines`] over explicit per-channel input domains.
pub fn refines_within(
    candidate: &Behavior,
    reference: &Behavior,
    domains: &Domains,
    bounds: Bounds,
) -> Result<Verdict, BehaviorError> {
    same_signature(candidate, reference)?;
    if candidate == reference {
        return Ok(Verdict::holds(bounds));
    }
    refines_enumerative(candidate, reference, domains, bounds)
}

/// [`refines_within`] without the structural shortcut.
pub(crate) fn refines_enumerative(
    candidate: &Behavior,
    reference: &Behavior,
    domains: &Domains,
    bounds: Bounds,
) -> Result<Verdict, BehaviorError> {
    same_signature(candidate, reference)?;
    let inputs = input_space(candidate.inputs(), domains, bounds.horizon)?;
    let cex = inputs.par_iter().find_map_first(|i| {
        let frames = i.frames();
        run(candidate, &frames)
            .into_iter()
            .find(|o| !admits(reference, &frames, &o.frames()))
            .map(|o| Counterexample::Output { input: i.clone(), output: o })
    });
    Ok(match cex {
        Some(c) => Verdict::fails(bounds, c),
        None => Verdict::up_to_bound(bounds),
    })
}

/// Denotation equality over explicit input domains.
pub fn equivalent_within(
    left: &Behavior,
    right: &Behavior,
    domains: &Domains,
    bounds: Bounds,
) -> Result<Verdict, BehaviorError> {
    same_signature(left, right)?;
    if left == right {
        return Ok(Verdict::holds(bounds));
    }
    equivalent_enumerative(left, right, domains, bounds)
}

/// [`equivalent_within`] without the structural shortcut.
pub(crate) fn equivalent_enumerative(
    left: &Behavior,
    right: &Behavior,
    domains: &Domains,
    bounds: Bounds,
) -> Result<Verdict, BehaviorError> {
    same_signature(left, right)?;
    let inputs = input_space(left.inputs(), domains, bounds.horizon)?;
    let cex = inputs.par_iter().find_map_first(|i| {
        let frames = i.frames();
        let a = run(left, &frames);
        let b = run(right, &frames);
        a.symmetric_difference(&b)
            .next()
            .map(|o| Counterexample::Output { input: i.clone(), output: o.clone() })
    });
    Ok(match cex {
        Some(c) => Verdict::fails(bounds, c),
        None => Verdict::up_to_bound(bounds),
    })
}

/// Whether the output set never depends on input `channel`.
pub fn independent_of(behavior: &Behavior, channel: &ChannelId, bounds: Bounds) -> Result<Verdict, BehaviorError> {
    independent_within(behavior, channel, &bounds.uniform(behavior.inputs()), bounds)
}

/// [`independent_of`] over explicit input domains. Tries the structural
/// check first and only enumerates when it is inconclusive.
pub fn independent_within(
    behavior: &Behavior,
    channel: &ChannelId,
    domains: &Domains,
    bounds: Bounds,
) -> Result<Verdict, BehaviorError> {
    if !behavior.inputs().contains(channel) {
        return Err(BehaviorError::Interface(format!("`{channel}` is not an input")));
    }
    if !behavior.reads().contains(channel) {
        return Ok(Verdict::holds(bounds));
    }
    independent_enumerative(behavior, channel, domains, bounds)
}

pub(crate) fn independent_enumerative(
    behavior: &Behavior,
    channel: &ChannelId,
    domains: &Domains,
    bounds: Bounds,
) -> Result<Verdict, BehaviorError> {
    let mut rest = behavior.inputs().clone();
    rest.remove(channel);
    let others = input_space(&rest, domains, bounds.horizon)?;
    let varied = input_space(&[channel.clone()].into_iter().collect(), domains, bounds.horizon)?;
    let cex = others.par_iter().find_map_first(|r| {
        let mut base: Option<(NamedStreamTuple, BTreeSet<NamedStreamTuple>)> = None;
        for v in &varied {
            let i = r.merge(v).expect("disjoint domains");
            let d = run(behavior, &i.frames());
            match &base {
                None => base = Some((i, d)),
                Some((first, expected)) if *expected != d => {
                    return Some(Counterexample::Dependence { first: first.clone(), second: i });
                }
                Some(_) => {}
            }
        }
        None
    });
    Ok(match cex {
        Some(c) => Verdict::fails(bounds, c),
        None => Verdict::up_to_bound(bounds),
    })
}

/// Drops input `channel`, which the behavior must not depend on.
pub fn restrict_input(behavior: &Behavior, channel: &ChannelId, bounds: Bounds) -> Result<Behavior, BehaviorError> {
    let verdict = independent_of(behavior, channel, bounds)?;
    if !verdict.passed() {
        return Err(BehaviorError::Precondition(format!("behavior depends on input `{channel}`")));
    }
    Ok(behavior.restrict_input_unchecked(channel))
}

/// Deterministic strategy: at every emit and absorb the least option in the
/// canonical order (shorter intervals first, then alphabet order; states in
/// declaration order) is taken.
pub fn extract_strategy(behavior: &Behavior) -> Behavior {
    if behavior.is_deterministic() {
        behavior.clone()
    } else {
        behavior.extract_strategy_node()
    }
}

impl Behavior {
    pub(crate) fn extract_strategy_node(&self) -> Behavior {
        if let Kind::Strategy(_) = self.kind() {
            return self.clone();
        }
        node(Kind::Strategy(self.clone()), self.inputs().clone(), self.outputs().clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streams::{ch, chans, enumerate_tuples, Interval, TimedStream};

    fn b(h: usize) -> Bounds {
        Bounds::new(h, 1, 1)
    }

    fn single(channel: &str, intervals: &[&[u8]]) -> NamedStreamTuple {
        let s = TimedStream::new(intervals.iter().map(|i| Interval::of(i)).collect());
        NamedStreamTuple::new(s.horizon(), [(ch(channel), s)].into_iter().collect()).unwrap()
    }

    fn copy_pq() -> Behavior {
        Behavior::copy(&[(ch("p"), ch("q"))]).unwrap()
    }

    fn silent_q() -> Behavior {
        Behavior::silent(ChannelSet::new(), chans(&["q"]))
    }

    fn chaos_q() -> Behavior {
        Behavior::chaos(ChannelSet::new(), chans(&["q"]), 1, 1)
    }

    #[test]
    fn continuations_follow_the_given_prefix() {
        let b = copy_pq();
        let next = continuations(&b, &single("p", &[&[0], &[]]), &single("q", &[&[], &[0]])).unwrap();
        assert_eq!(next, [Frame::from([(ch("q"), Interval::empty())])].into());
        assert!(continuations(&b, &single("p", &[&[0]]), &single("q", &[&[0]])).unwrap().is_empty());
        let lagged = Behavior::lagged(1, 2, &[(ch("p"), ch("q"))]).unwrap();
        let next = continuations(&lagged, &single("p", &[&[0]]), &single("q", &[&[]])).unwrap();
        assert_eq!(next.len(), 2);
    }

    #[test]
    fn denote_copy_is_delayed() {
        let out = denote(&copy_pq(), &single("p", &[&[0], &[1]]), 2).unwrap();
        let expected: BTreeSet<_> = [single("q", &[&[], &[0]])].into_iter().collect();
        assert_eq!(out, expected);
    }

    #[test]
    fn denote_silent_and_chaos() {
        let none = NamedStreamTuple::empty(2);
        let s = denote(&silent_q(), &none, 2).unwrap();
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec![single("q", &[&[], &[]])]);
        let c = denote(&chaos_q(), &none, 2).unwrap();
        let expected: BTreeSet<_> = [
            single("q", &[&[], &[]]),
            single("q", &[&[], &[0]]),
            single("q", &[&[0], &[]]),
            single("q", &[&[0], &[0]]),
        ]
        .into_iter()
        .collect();
        assert_eq!(c, expected);
    }

    #[test]
    fn denote_rejects_wrong_signature() {
        assert!(matches!(
            denote(&copy_pq(), &single("r", &[&[]]), 1),
            Err(BehaviorError::Interface(_))
        ));
        assert!(matches!(
            denote(&copy_pq(), &single("p", &[&[]]), 2),
            Err(BehaviorError::Interface(_))
        ));
    }

    #[test]
    fn chaos_extension_of_silent() {
        let ext = silent_q().chaos_extend(&ch("p"), 1, 1).unwrap();
        let out = denote(&ext, &NamedStreamTuple::empty(1), 1).unwrap();
        assert_eq!(out.len(), 2);
        for o in &out {
            assert_eq!(o.get(&ch("q")).unwrap(), &TimedStream::silent(1));
        }
        assert_eq!(denote(&ext, &NamedStreamTuple::empty(2), 2).unwrap().len(), 4);
    }

    #[test]
    fn chaos_extension_projects_back() {
        let ext = copy_pq().chaos_extend(&ch("r"), 1, 2).unwrap();
        for i in enumerate_tuples(&chans(&["p"]), 2, 2, 1) {
            let projected: BTreeSet<_> = denote(&ext, &i, 2)
                .unwrap()
                .iter()
                .map(|o| o.restrict(copy_pq().outputs()).unwrap())
                .collect();
            assert_eq!(projected, denote(&copy_pq(), &i, 2).unwrap());
        }
        // adaption cancels the extension
        let back = ext.adapt(copy_pq().inputs(), &chans(&["q"])).unwrap();
        assert_eq!(back, copy_pq());
    }

    #[test]
    fn adapt_ignores_new_inputs() {
        let wide = silent_q().adapt(&chans(&["p"]), &chans(&["q"])).unwrap();
        let outs: BTreeSet<_> = enumerate_tuples(&chans(&["p"]), 1, 2, 1)
            .iter()
            .map(|i| denote(&wide, i, 2).unwrap())
            .collect();
        assert_eq!(outs.len(), 1);
    }

    #[test]
    fn refinement_examples() {
        assert!(refines(&silent_q(), &chaos_q(), b(2)).unwrap().passed());
        let v = refines(&chaos_q(), &silent_q(), b(1)).unwrap();
        assert!(!v.passed());
        match v.counterexample {
            Some(Counterexample::Output { output, .. }) => assert_eq!(output, single("q", &[&[0]])),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(refines(&copy_pq(), &silent_q(), b(1)), Err(BehaviorError::Interface(_))));
    }

    #[test]
    fn independence_examples() {
        let wide = silent_q().adapt(&chans(&["p"]), &chans(&["q"])).unwrap();
        assert_eq!(independent_of(&wide, &ch("p"), b(2)).unwrap(), Verdict::holds(b(2)));
        let v = independent_of(&copy_pq(), &ch("p"), b(2)).unwrap();
        match v.counterexample {
            Some(Counterexample::Dependence { first, second }) => {
                assert_eq!(first, single("p", &[&[], &[]]));
                assert_eq!(second, single("p", &[&[0], &[]]));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(independent_of(&copy_pq(), &ch("z"), b(2)).is_err());
    }

    #[test]
    fn restrict_input_examples() {
        let wide = silent_q().adapt(&chans(&["p"]), &chans(&["q"])).unwrap();
        assert_eq!(restrict_input(&wide, &ch("p"), b(2)).unwrap(), silent_q());
        let wider = silent_q().adapt(&chans(&["p", "r"]), &chans(&["q"])).unwrap();
        let once = restrict_input(&wider, &ch("p"), b(2)).unwrap();
        assert_eq!(restrict_input(&once, &ch("r"), b(2)).unwrap(), silent_q());
        assert!(matches!(
            restrict_input(&copy_pq(), &ch("p"), b(2)),
            Err(BehaviorError::Precondition(_))
        ));
    }

    #[test]
    fn strategy_examples() {
        assert_eq!(extract_strategy(&silent_q()), silent_q());
        let s = extract_strategy(&chaos_q());
        let out = denote(&s, &NamedStreamTuple::empty(3), 3).unwrap();
        assert_eq!(out.into_iter().collect::<Vec<_>>(), vec![single("q", &[&[], &[], &[]])]);
    }
}
