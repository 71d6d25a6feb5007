#[path = "../examples/behaviors.rs"]
mod behaviors;
#[path = "../examples/black_box_semantics.rs"]
mod black_box_semantics;
#[path = "../examples/company_refinement.rs"]
mod company_refinement;
#[path = "../examples/consistency.rs"]
mod consistency;
#[path = "../examples/fold_and_expand.rs"]
mod fold_and_expand;
#[path = "../examples/invariants.rs"]
mod invariants;
#[path = "../examples/render_dot.rs"]
mod render_dot;

#[test]
fn behaviors_example() {
    let out = behaviors::run_example();
    assert!(out.contains("copy: 1 possible outputs"));
    assert!(out.contains("lagged(1, 2): 8 possible outputs"));
    assert!(out.contains("copy refines lagged(1, 2): true"));
    assert!(out.contains("lagged(1, 2) refines copy: false"));
}

#[test]
fn black_box_example_agrees_with_oracle() {
    let out = black_box_semantics::run_example();
    assert!(out.ends_with("composition and oracle agree on 8 inputs: true\n"), "{out}");
}

#[test]
fn company_example_reaches_target() {
    let out = company_refinement::run_example();
    assert!(out.contains("verdict=refined"), "{out}");
    assert!(out.contains("matches-target=true"));
    assert!(out.contains("black-box-refines=true"));
    assert!(out.contains("component Accounting"));
}

#[test]
fn consistency_example_reports_each_document() {
    let out = consistency::run_example();
    for i in 0..4 {
        assert!(out.contains(&format!("document {i}: ")), "{out}");
    }
    assert!(out.contains("condition 5"));
    assert!(out.contains("condition 2"));
    assert!(out.contains("unknown behavior `cpy`"));
    assert!(out.contains("`b` is not in the alphabet"));
}

#[test]
fn fold_and_expand_example() {
    let out = fold_and_expand::run_example();
    assert!(out.contains("components after expand: Coordinator, LineA, LineB, Management, Sales"));
    assert!(out.contains("components after fold: Management, Production, Sales"));
}

#[test]
fn invariants_example() {
    let out = invariants::run_example();
    assert!(out.contains("(delay 1): HoldsUpToBound"), "{out}");
    assert!(out.contains("(delay 0): Fails"));
    assert!(out.contains("witness {"));
}

#[test]
fn render_dot_example() {
    let out = render_dot::run_example();
    assert_eq!(out.matches("digraph").count(), 2);
    assert!(out.contains("\"Accounting\" -> \"Management\" [label=\"reports\"];"));
    assert!(out.contains("\"ENV\" -> \"Production\" [label=\"material\"];"));
}
