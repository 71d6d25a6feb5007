//! An invariant over the company architecture after accounting was added:
//! `reports` carries the summary of `ordpay'` and `progress` one tick later.

use archrefine::behavior::Counterexample;
use archrefine::calculus::CheckConfig;
use archrefine::scriptio::{corpus, parse_architecture, parse_script, run_script, ScriptDocument};
use archrefine::semantics::{invariant_valid, Invariant};
use archrefine::streams::ch;

pub fn run_example() -> String {
    let start = parse_architecture(corpus::COMPANY_FIG1).expect("corpus parses");
    let script = parse_script(corpus::COMPANY_SCRIPT).expect("script parses");
    let first_six = ScriptDocument { steps: script.steps[..6].to_vec(), ..script };
    let s = run_script(&start, &first_six, &CheckConfig::default(), &corpus::loader).system;
    let bounds = s.bounds(4, 1);

    let mut out = String::new();
    for delay in [1, 0] {
        let psi = Invariant::summarizes("summary", ch("reports"), ch("ordpay'"), ch("progress"), delay);
        let v = invariant_valid(&s, &psi, bounds).expect("channels exist");
        out.push_str(&format!("{} (delay {delay}): {:?}\n", psi.description(), v.outcome));
        if let Some(Counterexample::Valuation { tuple }) = &v.counterexample {
            out.push_str(&format!("  witness {}\n", s.alphabet.render_tuple(tuple)));
        }
    }
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
