use std::collections::{BTreeMap, BTreeSet};

use super::process::{summarize, unsummarize};
use super::{Behavior, Kind};
use crate::streams::{ChannelId, Interval};

/// Per channel, the intervals that may appear on it.
pub type Vocabulary = BTreeMap<ChannelId, BTreeSet<Interval>>;

fn values(v: &Vocabulary, c: &ChannelId) -> Vec<Interval> {
    match v.get(c) {
        Some(set) if !set.is_empty() => set.iter().cloned().collect(),
        _ => vec![Interval::empty()],
    }
}

fn with_empty(items: impl IntoIterator<Item = Interval>) -> BTreeSet<Interval> {
    let mut s: BTreeSet<Interval> = items.into_iter().collect();
    s.insert(Interval::empty());
    s
}

impl Behavior {
    /// Over-approximates the intervals each output can carry during the
    /// first `rounds` ticks when every input only carries intervals from
    /// `inputs` (channels absent from `inputs` are taken as always empty).
    pub fn vocabulary(&self, inputs: &Vocabulary, rounds: usize) -> Vocabulary {
        let one = |c: &ChannelId, set: BTreeSet<Interval>| -> Vocabulary { [(c.clone(), set)].into_iter().collect() };
        match self.kind() {
            Kind::Silent => self.outputs().iter().map(|c| (c.clone(), with_empty([]))).collect(),
            Kind::Chaos { bound, symbols } => {
                let all: BTreeSet<Interval> = Interval::all_up_to(*symbols, *bound).into_iter().collect();
                self.outputs().iter().map(|c| (c.clone(), all.clone())).collect()
            }
            Kind::Lagged { routes, .. } => routes
                .iter()
                .map(|(s, t)| (t.clone(), with_empty(values(inputs, s))))
                .collect(),
            Kind::Merge { sources, target } => {
                let mut acc: BTreeSet<Interval> = with_empty([]);
                for s in sources {
                    acc = acc
                        .iter()
                        .flat_map(|a| values(inputs, s).into_iter().map(move |b| a.concat(&b)))
                        .collect();
                }
                one(target, with_empty(acc))
            }
            Kind::Summary { first, second, target, .. } => {
                let mut out = with_empty([]);
                for x in &values(inputs, first) {
                    for y in &values(inputs, second) {
                        out.insert(summarize(x, y));
                    }
                }
                one(target, out)
            }
            Kind::Unpack { source, first, second, .. } => {
                let (mut a, mut b) = (with_empty([]), with_empty([]));
                for r in values(inputs, source) {
                    if let Some((x, y)) = unsummarize(&r) {
                        a.insert(x);
                        b.insert(y);
                    }
                }
                [(first.clone(), a), (second.clone(), b)].into_iter().collect()
            }
            Kind::Table(t) => {
                let mut out: Vocabulary = t.outputs.iter().map(|c| (c.clone(), BTreeSet::new())).collect();
                for (frame, _) in t.emits.iter().flatten() {
                    for (c, i) in frame {
                        out.entry(c.clone()).or_default().insert(i.clone());
                    }
                }
                out
            }
            Kind::Adapt(inner) => {
                let mut v = inner.vocabulary(inputs, rounds);
                v.retain(|c, _| self.outputs().contains(c));
                v
            }
            Kind::ChaosExtend { inner, channel, bound, symbols } => {
                let mut v = inner.vocabulary(inputs, rounds);
                v.insert(channel.clone(), Interval::all_up_to(*symbols, *bound).into_iter().collect());
                v
            }
            Kind::RestrictInput { inner, channel } => {
                let mut i = inputs.clone();
                i.insert(channel.clone(), with_empty([]));
                inner.vocabulary(&i, rounds)
            }
            Kind::Strategy(inner) => inner.vocabulary(inputs, rounds),
            Kind::Rename { inner, map } => {
                let inner_in: Vocabulary = inner
                    .inputs()
                    .iter()
                    .filter_map(|c| inputs.get(map.get(c).unwrap_or(c)).map(|v| (c.clone(), v.clone())))
                    .collect();
                inner
                    .vocabulary(&inner_in, rounds)
                    .into_iter()
                    .map(|(c, v)| (map.get(&c).cloned().unwrap_or(c), v))
                    .collect()
            }
            Kind::Compose(members) => {
                let mut known: Vocabulary = self
                    .inputs()
                    .iter()
                    .map(|c| (c.clone(), inputs.get(c).cloned().unwrap_or_else(|| with_empty([]))))
                    .collect();
                for c in self.outputs() {
                    known.insert(c.clone(), with_empty([]));
                }
                for _ in 0..rounds {
                    let mut changed = false;
                    let mut next = known.clone();
                    for m in members {
                        for (c, v) in m.vocabulary(&known, rounds) {
                            let slot = next.entry(c).or_default();
                            let before = slot.len();
                            slot.extend(v);
                            changed |= slot.len() != before;
                        }
                    }
                    known = next;
                    if !changed {
                        break;
                    }
                }
                known.retain(|c, _| self.outputs().contains(c));
                known
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streams::ch;

    #[test]
    fn summary_vocabulary_covers_long_reports() {
        let s = Behavior::summary(1, ch("a"), ch("b"), ch("r")).unwrap();
        let all: BTreeSet<Interval> = Interval::all_up_to(2, 1).into_iter().collect();
        let inputs: Vocabulary = [(ch("a"), all.clone()), (ch("b"), all)].into_iter().collect();
        let v = s.vocabulary(&inputs, 3);
        // empty plus 3 x 3 summaries
        assert_eq!(v[&ch("r")].len(), 10);
        assert!(v[&ch("r")].contains(&summarize(&Interval::of(&[1]), &Interval::of(&[0]))));
    }

    #[test]
    fn compose_feeds_back() {
        let a = Behavior::copy(&[(ch("p"), ch("q"))]).unwrap();
        let b = Behavior::merge(&[ch("q"), ch("q2")], ch("r"));
        let c = Behavior::compose(&[a, b]).unwrap();
        let inputs: Vocabulary = [(ch("p"), [Interval::of(&[1])].into_iter().collect())].into_iter().collect();
        let v = c.vocabulary(&inputs, 2);
        assert!(v[&ch("r")].contains(&Interval::of(&[1])));
    }
}
