//! Injective per-tick summary of two intervals.
//!
//! Every message of the first interval is written as the continuation tag
//! (second alphabet symbol) followed by the message; a stop tag (first
//! alphabet symbol) closes the first part, and the second interval follows
//! verbatim. The encoding of the first part is prefix-free, so the summary
//! is injective and can be decoded.

use crate::streams::{Interval, Message};

pub const STOP: Message = Message(0);
pub const CONTINUE: Message = Message(1);

pub fn summarize(first: &Interval, second: &Interval) -> Interval {
    let mut items = Vec::with_capacity(2 * first.len() + 1 + second.len());
    for m in first.items() {
        items.push(CONTINUE);
        items.push(*m);
    }
    items.push(STOP);
    items.extend_from_slice(second.items());
    Interval::new(items)
}

/// Inverse of [`summarize`]; `None` for intervals that are not summaries.
pub fn unsummarize(report: &Interval) -> Option<(Interval, Interval)> {
    let items = report.items();
    let mut first = Vec::new();
    let mut i = 0;
    loop {
        match items.get(i) {
            Some(&STOP) => break,
            Some(&CONTINUE) => {
                first.push(*items.get(i + 1)?);
                i += 2;
            }
            _ => return None,
        }
    }
    Some((Interval::new(first), Interval::new(items[i + 1..].to_vec())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn summary_is_injective_and_decodable() {
        let all = Interval::all_up_to(2, 2);
        let mut seen = BTreeSet::new();
        for x in &all {
            for y in &all {
                let s = summarize(x, y);
                assert!(seen.insert(s.clone()), "collision on {x:?} {y:?}");
                assert_eq!(unsummarize(&s), Some((x.clone(), y.clone())));
            }
        }
    }

    #[test]
    fn rejects_non_summaries() {
        assert_eq!(unsummarize(&Interval::empty()), None);
        assert_eq!(unsummarize(&Interval::of(&[1])), None);
        assert_eq!(unsummarize(&Interval::of(&[2])), None);
        assert_eq!(unsummarize(&Interval::of(&[0])), Some((Interval::empty(), Interval::empty())));
    }
}
