//! Diagnostics for malformed and inconsistent architecture documents.

use archrefine::scriptio::parse_architecture;

const BROKEN: [&str; 4] = [
    // Output produced by nobody.
    "system S\nalphabet a\ninput p\noutput q r\n\ncomponent A\n  behavior copy(p -> q)\nend\n",
    // Two writers on one channel.
    "system S\nalphabet a\ninput p\noutput q\n\ncomponent A\n  behavior copy(p -> q)\nend\n\ncomponent B\n  behavior copy(p -> q)\nend\n",
    // Typo in a behavior.
    "system S\nalphabet a\ninput p\noutput q\n\ncomponent A\n  behavior cpy(p -> q)\nend\n",
    // Symbol outside the alphabet.
    "system S\nalphabet a\ninput\noutput q\n\ntransducer T\n  out q\n  states s\n  emit s q=<b> -> s\nend\n\ncomponent A\n  behavior table(T)\nend\n",
];

pub fn run_example() -> String {
    let mut out = String::new();
    for (i, text) in BROKEN.iter().enumerate() {
        match parse_architecture(text) {
            Ok(_) => out.push_str(&format!("document {i}: accepted\n")),
            Err(e) => {
                for d in e.diagnostics() {
                    out.push_str(&format!("document {i}: {d}\n"));
                }
            }
        }
    }
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
