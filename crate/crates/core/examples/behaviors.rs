//! Executable behaviors: denotations, nondeterminism and strategies.

use archrefine::behavior::{denote, extract_strategy, refines, Behavior};
use archrefine::streams::{ch, Alphabet, Interval, NamedStreamTuple, TimedStream};

pub fn run_example() -> String {
    let alphabet = Alphabet::letters(2);
    let horizon = 4;
    let input = NamedStreamTuple::new(
        horizon,
        [(
            ch("p"),
            TimedStream::new(vec![Interval::of(&[0]), Interval::empty(), Interval::of(&[1, 0]), Interval::empty()]),
        )]
        .into_iter()
        .collect(),
    )
    .expect("well-formed input");
    let mut out = format!("input {}\n", alphabet.render_tuple(&input));

    let copy = Behavior::copy(&[(ch("p"), ch("q"))]).expect("distinct targets");
    let lagged = Behavior::lagged(1, 2, &[(ch("p"), ch("q"))]).expect("distinct targets");
    for (name, b) in [("copy", &copy), ("lagged(1, 2)", &lagged)] {
        let outs = denote(b, &input, horizon).expect("signature matches");
        out.push_str(&format!("{name}: {} possible outputs\n", outs.len()));
        for o in &outs {
            out.push_str(&format!("  {}\n", alphabet.render_tuple(o)));
        }
    }

    let strategy = extract_strategy(&lagged);
    let chosen = denote(&strategy, &input, horizon).expect("signature matches");
    out.push_str(&format!("strategy of lagged(1, 2) picks {}\n", alphabet.render_tuple(chosen.first().unwrap())));

    let b = archrefine::behavior::Bounds::new(3, 1, alphabet.len());
    let v = refines(&copy, &lagged, b).expect("same signature");
    out.push_str(&format!("copy refines lagged(1, 2): {}\n", v.passed()));
    let v = refines(&lagged, &copy, b).expect("same signature");
    out.push_str(&format!("lagged(1, 2) refines copy: {}\n", v.passed()));
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
