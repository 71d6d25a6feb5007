use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{input_tuples, DenotationTable, SemanticsError};
use crate::behavior::{accepts, continuations, Bounds, ChannelSet};
use crate::model::{Component, System};
use crate::streams::{Frame, NamedStreamTuple};

/// `⟦S⟧` computed from the expanded characterisation: for each input `i`,
/// the restrictions to `out.S` of every valuation `l` of `in.S ∪ out.C` with
/// `l|in.S = i` and `l|out.c ∈ behav.c(l|in.c)` for every component `c`.
///
/// Valuations are grown one tick at a time. At tick `t` each component may
/// emit any frame its behavior can emit after the outputs already chosen,
/// given its inputs before `t`. Complete valuations are checked against
/// every component once more before projection.
pub fn black_box_oracle(system: &System, bounds: Bounds) -> Result<DenotationTable, SemanticsError> {
    system.ensure_consistent()?;
    let components = system.sorted_components();
    let (_, out_c) = system.interface_sets();
    let domain: ChannelSet = system.inputs.union(&out_c).cloned().collect();
    let entries = input_tuples(&system.inputs, bounds)
        .into_par_iter()
        .map(|i| {
            let mut partial: BTreeSet<Vec<Frame>> = [Vec::new()].into();
            for t in 0..bounds.horizon {
                let mut grown = BTreeSet::new();
                for l in &partial {
                    let mut frames = vec![i.frame(t)];
                    for c in &components {
                        let options = next_frames(c, l);
                        frames = frames
                            .iter()
                            .flat_map(|f| {
                                options.iter().map(move |o| {
                                    let mut g = f.clone();
                                    g.extend(o.iter().map(|(k, v)| (k.clone(), v.clone())));
                                    g
                                })
                            })
                            .collect();
                    }
                    for f in frames {
                        let mut next = l.clone();
                        next.push(f);
                        grown.insert(next);
                    }
                }
                partial = grown;
            }
            let outs = partial
                .into_iter()
                .map(|frames| NamedStreamTuple::from_frames(&domain, &frames))
                .filter(|l| components.iter().all(|c| admitted(c, l)))
                .map(|l| l.restrict(&system.outputs).expect("out.S within out.C"))
                .collect();
            (i, outs)
        })
        .collect();
    Ok(DenotationTable { bounds, entries })
}

fn project(frame: &Frame, channels: &ChannelSet) -> Frame {
    frame.iter().filter(|(c, _)| channels.contains(*c)).map(|(c, v)| (c.clone(), v.clone())).collect()
}

/// Frames `c` can emit next after the valuation prefix `l`.
fn next_frames(c: &Component, l: &[Frame]) -> BTreeSet<Frame> {
    let ins: Vec<Frame> = l.iter().map(|f| project(f, c.inputs())).collect();
    let outs: Vec<Frame> = l.iter().map(|f| project(f, c.outputs())).collect();
    let input = NamedStreamTuple::from_frames(c.inputs(), &ins);
    let output = NamedStreamTuple::from_frames(c.outputs(), &outs);
    continuations(c.behavior(), &input, &output).expect("signature matches")
}

fn admitted(c: &Component, l: &NamedStreamTuple) -> bool {
    let i = l.restrict(c.inputs()).expect("inputs assigned");
    let o = l.restrict(c.outputs()).expect("outputs assigned");
    accepts(c.behavior(), &i, &o).expect("signature matches")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::Behavior;
    use crate::semantics::denotation_table;
    use crate::streams::{ch, chans, Alphabet};

    #[test]
    fn empty_architecture_maps_to_empty_tuple() {
        let s = System::new("e", Alphabet::letters(1), chans(&["p"]), ChannelSet::new(), vec![]);
        let t = black_box_oracle(&s, s.bounds(2, 1)).unwrap();
        assert_eq!(t.len(), 4);
        for outs in t.entries.values() {
            assert_eq!(outs.iter().cloned().collect::<Vec<_>>(), vec![NamedStreamTuple::empty(2)]);
        }
    }

    #[test]
    fn feedback_loop_agrees_with_composition() {
        // q feeds back into the merge that produces it
        let s = System::new(
            "loop",
            Alphabet::letters(2),
            chans(&["p"]),
            chans(&["r"]),
            vec![
                Component::new("M", Behavior::merge(&[ch("p"), ch("r")], ch("q"))),
                Component::new("L", Behavior::lagged(1, 2, &[(ch("q"), ch("r"))]).unwrap()),
            ],
        );
        let b = s.bounds(3, 1);
        assert_eq!(black_box_oracle(&s, b).unwrap(), denotation_table(&s, b).unwrap());
    }
}
