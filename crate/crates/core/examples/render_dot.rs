//! Graphviz diagrams of the company before and after refinement.

use archrefine::scriptio::{corpus, parse_architecture, render_dot};

pub fn run_example() -> String {
    let mut out = String::new();
    for text in [corpus::COMPANY_FIG1, corpus::COMPANY_FIG2D] {
        let s = parse_architecture(text).expect("corpus parses");
        out.push_str(&render_dot(&s));
    }
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
