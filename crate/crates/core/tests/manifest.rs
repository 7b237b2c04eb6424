use fqgeom::manifest::*;
#[allow(unused_imports)]
use fqgeom::*;

fn args(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

#[test]
fn args_round_trip() {
    let a = args("audit incidence --theorem T2.4 --q 7 --seed 1 --trials 50");
    let m = ExperimentManifest::from_args(&a).unwrap();
    assert_eq!(m.command, "audit incidence");
    assert_eq!(m.field, Some(FieldSpec { p: 7, r: 1 }));
    assert_eq!(m.params["theorem"], "T2.4");
    let back = ExperimentManifest::from_args(&m.to_args()).unwrap();
    assert_eq!(back, m);
    assert_eq!(ExperimentManifest::from_json(&m.to_json()).unwrap(), m);
}

#[test]
fn flags_and_prime_powers() {
    let m = ExperimentManifest::from_args(&args("field --q 27 --list --format csv")).unwrap();
    assert_eq!(m.field, Some(FieldSpec { p: 3, r: 3 }));
    assert_eq!(m.params["list"], "true");
    assert_eq!(m.output.format.as_deref(), Some("csv"));
    assert_eq!(m.to_args(), args("field --q 27 --list --format csv"));
    assert!(ExperimentManifest::from_args(&args("field --q 12")).is_err());
}

#[test]
fn reads_ceiling_header() {
    let text = "# fqgeom ceilings v1\n# manifest: {\"command\":\"calibrate\",\"seed\":3}\n";
    let m = ExperimentManifest::from_text(text).unwrap();
    assert_eq!((m.command.as_str(), m.seed), ("calibrate", Some(3)));
}
