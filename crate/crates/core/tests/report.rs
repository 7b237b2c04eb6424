use fqgeom::report::*;
#[allow(unused_imports)]
use fqgeom::*;

#[test]
fn upper_c_star() {
    let r = AuditReport::upper("T", 3, 2, 10, 4.0, 2.0);
    assert_eq!(r.c_star, 3.0);
    let r = AuditReport::upper("T", 3, 2, 3, 4.0, 2.0);
    assert_eq!(r.c_star, 0.0);
    let r = AuditReport::upper("T", 3, 2, 0, 0.0, 0.0);
    assert_eq!(r.c_star, 0.0);
}

#[test]
fn lower_c_star() {
    let r = AuditReport::lower("T", 3, 2, 4, 9.0, 2.0);
    assert_eq!(r.c_star, 0.5);
    assert_eq!(AuditReport::lower("T", 3, 2, 0, 9.0, 2.0).c_star, 0.0);
}

#[test]
fn side_conditions_degrade_verdict() {
    let r = AuditReport::upper("T", 3, 2, 1, 0.0, 1.0)
        .condition("a", true)
        .condition("b", false)
        .against_ceiling(Some(0.1));
    assert_eq!(r.verdict, Verdict::Informational);
    let r = AuditReport::upper("T", 3, 2, 1, 0.0, 1.0).against_ceiling(Some(0.1));
    assert_eq!(r.verdict, Verdict::Regression);
}

#[test]
fn json_and_csv_shapes() {
    let r = AuditReport::upper("T2.1", 3, 2, 648, 648.0, 1.0)
        .size("U", 9)
        .condition("q = 3 mod 4", true);
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    for key in [
        "theorem",
        "q",
        "d",
        "sizes",
        "lhs",
        "main_term",
        "error_term_unit",
        "c_star",
        "side_conditions",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let mut buf = Vec::new();
    write_csv(&mut buf, &[r]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("theorem,q,d,sizes"));
    assert!(text.contains("T2.1,3,2,U=9,upper,648"));
}
