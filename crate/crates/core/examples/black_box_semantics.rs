//! Black-box meaning of a system with a feedback loop, computed twice: by
//! composing the components and by the brute-force oracle.

use archrefine::behavior::denote;
use archrefine::scriptio::parse_architecture;
use archrefine::semantics::{black_box, black_box_oracle};

const LOOP: &str = "\
system Loop
alphabet a
input p
output r

component Echo
  in p r
  out q
  behavior merge(p, r -> q)
end

component Relay
  in q
  out r
  behavior lagged(1, 2; q -> r)
end
";

pub fn run_example() -> String {
    let s = parse_architecture(LOOP).expect("valid architecture");
    let bounds = s.bounds(3, 1);
    let bb = black_box(&s).expect("consistent");
    let oracle = black_box_oracle(&s, bounds).expect("consistent");
    let mut out = String::new();
    let mut agree = true;
    for (input, expected) in &oracle.entries {
        let got = denote(&bb, input, bounds.horizon).expect("signature matches");
        agree &= &got == expected;
        out.push_str(&format!("{}\n", s.alphabet.render_tuple(input)));
        for o in &got {
            out.push_str(&format!("  -> {}\n", s.alphabet.render_tuple(o)));
        }
    }
    out.push_str(&format!("composition and oracle agree on {} inputs: {agree}\n", oracle.len()));
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
