//! Black-box semantics of systems.
//!
//! [`black_box`] runs the product of all component transducers. The
//! independent [`black_box_oracle`] searches directly for channel valuations
//! `l` over `in.S ∪ out.C` that every component admits, without going
//! through composition; the two must agree.

mod invariant;
mod oracle;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::behavior::{self, Behavior, BehaviorError, Bounds, ChannelSet, Verdict, Vocabulary};
use crate::model::{ModelError, System};
use crate::streams::{Domains, Interval, NamedStreamTuple, TupleSpace};

pub use invariant::{conditional_refines, invariant_valid, Invariant, Predicate, Registry, Window};
pub use oracle::black_box_oracle;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Behavior(#[from] BehaviorError),
    #[error("interface mismatch: {0}")]
    Interface(String),
    #[error("invariant `{name}` refers to unknown channels {channels:?}")]
    Reference { name: String, channels: Vec<String> },
    #[error("invariant `{0}` is already registered")]
    DuplicateInvariant(String),
    #[error("unknown invariant `{0}`")]
    UnknownInvariant(String),
}

/// Parallel composition with implicit feedback.
pub fn compose(members: &[Behavior]) -> Result<Behavior, SemanticsError> {
    Ok(Behavior::compose(members)?)
}

/// Composition of all component behaviors, before interface adaption.
pub fn glass_box(system: &System) -> Result<Behavior, SemanticsError> {
    let members: Vec<Behavior> = system.sorted_components().iter().map(|c| c.behavior().clone()).collect();
    compose(&members)
}

/// `⟦S⟧`: the composed behaviors adapted to `(in.S, out.S)`.
pub fn black_box(system: &System) -> Result<Behavior, SemanticsError> {
    system.ensure_consistent()?;
    let composed = glass_box(system)?;
    Ok(composed.adapt(&system.inputs, &system.outputs)?)
}

/// Enumeration domains for every channel in `in.S ∪ out.C`: all intervals of
/// length at most `B`, and for internal channels additionally every interval
/// their producers can emit within the horizon from such inputs.
pub fn channel_domains(system: &System, bounds: Bounds) -> Result<Domains, SemanticsError> {
    let base: Vec<Interval> = Interval::all_up_to(bounds.symbols, bounds.bound);
    let base_set: BTreeSet<Interval> = base.iter().cloned().collect();
    let inputs: Vocabulary = system.inputs.iter().map(|c| (c.clone(), base_set.clone())).collect();
    let produced = glass_box(system)?.vocabulary(&inputs, bounds.horizon.max(1));
    let (_, out_c) = system.interface_sets();
    let mut domains: Domains = system.inputs.iter().map(|c| (c.clone(), base.clone())).collect();
    for c in out_c {
        let mut set = base_set.clone();
        if let Some(v) = produced.get(&c) {
            set.extend(v.iter().cloned());
        }
        domains.insert(c, set.into_iter().collect());
    }
    Ok(domains)
}

/// Materialized black-box denotation over all bounded inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenotationTable {
    pub bounds: Bounds,
    pub entries: BTreeMap<NamedStreamTuple, BTreeSet<NamedStreamTuple>>,
}

impl DenotationTable {
    pub fn get(&self, input: &NamedStreamTuple) -> Option<&BTreeSet<NamedStreamTuple>> {
        self.entries.get(input)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub(crate) fn input_tuples(channels: &ChannelSet, bounds: Bounds) -> Vec<NamedStreamTuple> {
    TupleSpace::new(&bounds.uniform(channels), bounds.horizon).iter().collect()
}

/// [`black_box`] evaluated on every input with intervals bounded by `B`.
pub fn denotation_table(system: &System, bounds: Bounds) -> Result<DenotationTable, SemanticsError> {
    let bb = black_box(system)?;
    let inputs = input_tuples(&system.inputs, bounds);
    let entries = inputs
        .into_par_iter()
        .map(|i| {
            let out = behavior::denote(&bb, &i, bounds.horizon).expect("signature matches");
            (i, out)
        })
        .collect();
    Ok(DenotationTable { bounds, entries })
}

fn same_interface(old: &System, new: &System) -> Result<(), SemanticsError> {
    if old.inputs != new.inputs || old.outputs != new.outputs {
        return Err(SemanticsError::Interface(format!(
            "interfaces differ: ({:?} -> {:?}) vs ({:?} -> {:?})",
            old.inputs, old.outputs, new.inputs, new.outputs
        )));
    }
    Ok(())
}

/// `⟦new⟧(i) ⊆ ⟦old⟧(i)` for every bounded input `i`.
pub fn system_refines(old: &System, new: &System, bounds: Bounds) -> Result<Verdict, SemanticsError> {
    same_interface(old, new)?;
    let (a, b) = (black_box(old)?, black_box(new)?);
    Ok(behavior::refines_within(&b, &a, &bounds.uniform(&old.inputs), bounds)?)
}

/// `⟦new⟧(i) = ⟦old⟧(i)` for every bounded input `i`.
pub fn system_equivalent(old: &System, new: &System, bounds: Bounds) -> Result<Verdict, SemanticsError> {
    same_interface(old, new)?;
    let (a, b) = (black_box(old)?, black_box(new)?);
    Ok(behavior::equivalent_within(&a, &b, &bounds.uniform(&old.inputs), bounds)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Component;
    use crate::streams::{ch, chans, Alphabet, TimedStream};

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

    fn stream(ix: &[&[u8]]) -> TimedStream {
        TimedStream::new(ix.iter().map(|i| Interval::of(i)).collect())
    }

    #[test]
    fn pipeline_delays_twice() {
        let g = glass_box(&pipeline()).unwrap();
        let i = NamedStreamTuple::new(3, [(ch("p"), stream(&[&[0], &[], &[]]))].into_iter().collect()).unwrap();
        let out = behavior::denote(&g, &i, 3).unwrap();
        assert_eq!(out.len(), 1);
        let o = out.into_iter().next().unwrap();
        assert_eq!(o.get(&ch("q")).unwrap(), &stream(&[&[], &[0], &[]]));
        assert_eq!(o.get(&ch("r")).unwrap(), &stream(&[&[], &[], &[0]]));
    }

    #[test]
    fn empty_composition_is_unit() {
        let u = compose(&[]).unwrap();
        let out = behavior::denote(&u, &NamedStreamTuple::empty(2), 2).unwrap();
        assert_eq!(out.into_iter().collect::<Vec<_>>(), vec![NamedStreamTuple::empty(2)]);
    }

    #[test]
    fn black_box_signature_and_consistency() {
        let s = pipeline();
        let bb = black_box(&s).unwrap();
        assert_eq!(bb.inputs(), &chans(&["p"]));
        assert_eq!(bb.outputs(), &chans(&["r"]));
        let mut bad = s.clone();
        bad.outputs = chans(&["zz"]);
        assert!(matches!(black_box(&bad), Err(SemanticsError::Model(_))));
    }

    #[test]
    fn refinement_is_reflexive() {
        let s = pipeline();
        assert!(system_refines(&s, &s, s.bounds(3, 1)).unwrap().passed());
        let mut other = s.clone();
        other.inputs = chans(&["x"]);
        assert!(system_refines(&s, &other, s.bounds(3, 1)).is_err());
    }

    #[test]
    fn domains_cover_produced_intervals() {
        let s = System::new(
            "sum",
            Alphabet::letters(2),
            chans(&["a", "b"]),
            chans(&["r"]),
            vec![Component::new("S", Behavior::summary(1, ch("a"), ch("b"), ch("r")).unwrap())],
        );
        let d = channel_domains(&s, s.bounds(2, 1)).unwrap();
        assert_eq!(d[&ch("a")].len(), 3);
        assert_eq!(d[&ch("r")].len(), 3 + 9 - 1);
    }
}
