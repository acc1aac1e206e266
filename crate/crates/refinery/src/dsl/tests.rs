use super::*;

const CANONICAL: &str = include_str!("../../examples/canonical.rfn");

fn errors(src: &str) -> Vec<String> {
    parse_spec(src).unwrap_err().into_iter().map(|d| d.to_string()).collect()
}

#[test]
fn canonical_workspace_loads() {
    let ws = parse_spec(CANONICAL).unwrap();
    assert_eq!(ws.operation("MachineLearn").unwrap().rows().len(), 4);
    assert_eq!(ws.operation("RawIgnorance").unwrap().rows().len(), 8);
    assert_eq!(ws.subtypes.get("StructuredData").map(String::as_str), Some("BigData"));
    assert_eq!(ws.function("cleverprocessing").unwrap().eval("d3").unwrap(), "d1");
    assert_eq!(ws.prob_operation("MLHedged").unwrap().behavior().values().next().unwrap().len(), 2);
    assert!(ws.datatype("Raw").unwrap().all_initial());
    assert_eq!(ws.retrieve("Universal").unwrap().pairs().len(), 8);
}

#[test]
fn render_round_trips() {
    let ws = parse_spec(CANONICAL).unwrap();
    let text = render_spec(&ws);
    let again = parse_spec(&text).unwrap_or_else(|e| panic!("{e:?}\n{text}"));
    assert_eq!(again, ws);
    assert_eq!(render_spec(&again), text);
}

#[test]
fn empty_relations_render() {
    let src = "type U { u }\nop Nothing { state s:U trans { } }\n";
    let ws = parse_spec(src).unwrap();
    let text = render_spec(&ws);
    assert!(text.contains("trans { }"), "{text}");
    assert_eq!(parse_spec(&text).unwrap(), ws);
}

#[test]
fn unknown_type_is_named_with_position() {
    assert_eq!(errors("type A { x }\nop O {\n  state s:Digit\n  trans { }\n}\n"), ["3:11: error: unknown type Digit"]);
}

#[test]
fn unnormalized_distribution() {
    let src = "type A { x y }\nprob P { state s:A dist { s=x -> [0.93: s'=x | 0.08: s'=y] } }";
    assert_eq!(errors(src), ["2:34: error: distribution sums to 101/100"]);
}

#[test]
fn resolution_errors_are_collected() {
    let src = "\
type A { x y }
type A { z }
op O {
  state s:A
  in q:A
  trans { s=x, q=w -> s'=x ; s=x -> s'=y ; s=x, q=x, r=x -> s'=x }
}
";
    assert_eq!(
        errors(src),
        [
            "2:6: error: duplicate type A",
            "6:18: error: value w is not in type A",
            "6:30: error: missing value for slot q",
            "6:54: error: unknown slot r",
        ]
    );
}

#[test]
fn subtypes_check_inclusion_and_cycles() {
    assert_eq!(errors("type A { x }\nsubtype B of A { x y }"), ["2:20: error: value y of subtype B is not in A"]);
    assert_eq!(
        errors("subtype B of C { x }\nsubtype C of B { x }"),
        ["1:9: error: cyclic subtype declaration B", "2:9: error: cyclic subtype declaration C"]
    );
    assert_eq!(errors("subtype B of Nope { x }"), ["1:14: error: unknown type Nope"]);
    // a parent declared later is fine
    assert!(parse_spec("subtype B of A { x }\ntype A { x y }").is_ok());
}

#[test]
fn syntax_errors_stop_early() {
    assert_eq!(errors("type A { x }\nop O { state s:A }"), ["2:18: error: missing `trans` block"]);
    assert_eq!(errors("tipe A { x }"), ["1:1: error: expected a declaration, found `tipe`"]);
    assert_eq!(errors("type A { x"), ["1:10: error: expected value, found end of input"]);
}

#[test]
fn duplicate_rows_warn() {
    let p = parse_spec_with_warnings("type A { x }\nop O { state s:A trans { s=x -> s'=x ; s=x -> s'=x } }").unwrap();
    assert_eq!(p.warnings.len(), 1);
    assert_eq!(p.warnings[0].to_string(), "2:40: warning: duplicate transition");
}

#[test]
fn datatype_references() {
    assert_eq!(errors("type A { x }\ndatatype D { state A op Missing }"), ["2:25: error: unknown operation Missing"]);
    assert_eq!(
        errors("type A { x }\nop O { state s:A trans { } }\ndatatype D { state A init { y } op O }"),
        ["3:29: error: value y is not in type A"]
    );
}

#[test]
fn invalid_utf8_is_a_diagnostic() {
    let e = parse_spec_bytes(b"type A {\n x \xff }").unwrap_err();
    assert_eq!(e[0].to_string(), "2:4: error: spec is not valid UTF-8");
}
