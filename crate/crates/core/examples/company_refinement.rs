//! Runs the company refinement script on the three-department architecture
//! and checks the result against the original and the expected target.

use archrefine::calculus::CheckConfig;
use archrefine::scriptio::{corpus, parse_architecture, parse_script, print_architecture, run_script};
use archrefine::semantics::system_refines;

pub fn run_example() -> String {
    let start = parse_architecture(corpus::COMPANY_FIG1).expect("corpus parses");
    let script = parse_script(corpus::COMPANY_SCRIPT).expect("script parses");
    let config = CheckConfig::default();
    let report = run_script(&start, &script, &config, &corpus::loader);
    let mut out = report.render();

    let target = parse_architecture(corpus::COMPANY_FIG2D).expect("corpus parses");
    out.push_str(&format!("matches-target={}\n", report.system == target));

    let bounds = start.bounds(config.horizon, config.bound);
    let verdict = system_refines(&start, &report.system, bounds).expect("same interface");
    out.push_str(&format!("black-box-refines={}\n", verdict.passed()));
    out.push('\n');
    out.push_str(&print_architecture(&report.system).expect("consistent"));
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
