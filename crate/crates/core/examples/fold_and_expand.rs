//! Production is a black box over two production lines and a coordinator.
//! Expanding it exposes the lines; folding them hides them again.

use archrefine::calculus::{expand_component, fold_components, CheckConfig};
use archrefine::scriptio::{corpus, parse_architecture, print_architecture};
use archrefine::streams::chans;

pub fn run_example() -> String {
    let company = parse_architecture(corpus::COMPANY_LINES).expect("corpus parses");
    let config = CheckConfig::default();
    let mut out = String::new();

    let (expanded, report) = expand_component(&company, "Production", None, &config).expect("premises hold");
    for p in &report.premises {
        out.push_str(&format!("expand: {} [{}]\n", p.text, p.method));
    }
    let names: Vec<&str> = expanded.sorted_components().iter().map(|c| c.name()).collect();
    out.push_str(&format!("components after expand: {}\n", names.join(", ")));

    let (folded, _) = fold_components(
        &expanded,
        "Production",
        &["Coordinator", "LineA", "LineB"],
        chans(&["material", "sched"]),
        chans(&["goods", "progress"]),
        &config,
    )
    .expect("premises hold");
    let names: Vec<&str> = folded.sorted_components().iter().map(|c| c.name()).collect();
    out.push_str(&format!("components after fold: {}\n\n", names.join(", ")));
    out.push_str(&print_architecture(&expanded).expect("consistent"));
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
