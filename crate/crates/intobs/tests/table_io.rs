use intobs::table_io::{parse_table, write_table};
use intobs_core::correlators::{dr_correlator, ClassTag, CorrelatorKey, TableKind, TrivialCohft};
use intobs_core::exactnum::Rational;

const DR_G1: &str = r#"{"kind": "dr_D", "N": 1, "eta": [[1]], "complete": [[1, 2]], "trivial": true}
{"g": 1, "fields": [1, 1], "psi": [0, 0], "class": {"tag": "dr_d", "monomial": [2]}, "value": "-1/24"}
"#;

fn key(g: u32, fields: Vec<u16>, psi: Vec<u32>, class: ClassTag) -> CorrelatorKey {
    CorrelatorKey { g, fields, psi, class }
}

#[test]
fn parses_header_and_entries() {
    let t = parse_table(DR_G1, Some(TableKind::DrD)).unwrap();
    assert_eq!(t.kind(), TableKind::DrD);
    assert!(t.is_trivial());
    assert_eq!(t.len(), 1);
    let k = key(1, vec![1, 1], vec![0, 0], ClassTag::DrD(vec![2]));
    assert_eq!(t.lookup(&k).unwrap(), Rational::new(-1, 24));
    // declared complete: absent monomials read as zero
    let k0 = key(1, vec![1, 1], vec![0, 0], ClassTag::DrD(vec![0]));
    assert_eq!(t.lookup(&k0).unwrap(), Rational::zero());
}

#[test]
fn write_then_parse_round_trips() {
    let src = r#"{"kind": "cohft_psi", "N": 2, "eta": [[0, 1], [1, 0]], "complete": [[0, 3]], "degree_bounds": [[0, 3, 0]]}
{"g": 0, "fields": [2, 1, 1], "psi": [0, 0, 0], "class": {"tag": "plain"}, "value": 1}
{"g": 0, "fields": [1, 2, 2], "psi": [0, 0, 0], "class": {"tag": "plain"}, "value": "3/2"}
"#;
    let t = parse_table(src, None).unwrap();
    let text = write_table(&t);
    let u = parse_table(&text, None).unwrap();
    assert_eq!(write_table(&u), text);
    assert_eq!(u.degree_bound(0, 3), Some(0));
    assert!(u.is_complete(0, 3));
    let k = CorrelatorKey::plain(0, vec![2, 2, 1], vec![0, 0, 0]);
    assert_eq!(u.lookup(&k).unwrap(), Rational::new(3, 2));
}

#[test]
fn trivial_table_delegates_to_psi_engine() {
    let t = parse_table(r#"{"kind": "cohft_psi", "N": 1, "trivial": true}"#, None).unwrap();
    let k = CorrelatorKey::plain(1, vec![1, 1, 1], vec![2, 1, 0]);
    assert_eq!(t.lookup(&k).unwrap(), Rational::new(1, 12));
}

#[test]
fn permuted_entries_must_agree() {
    let src = r#"{"kind": "obs_O", "N": 1}
{"g": 0, "fields": [1, 1, 1, 1], "psi": [0, 0, 0, 0], "class": {"tag": "obs_o", "monomial": [1, 0, 0, 0]}, "value": "1"}
{"g": 0, "fields": [1, 1, 1, 1], "psi": [0, 0, 0, 0], "class": {"tag": "obs_o", "monomial": [0, 0, 1, 0]}, "value": "2"}
"#;
    let (line, msg) = parse_table(src, None).unwrap_err();
    assert_eq!(line, 3);
    assert!(msg.contains("obs_o=[0, 0, 1, 0]"), "{msg}");
    assert!(msg.contains("symmetry"), "{msg}");
}

#[test]
fn schema_is_exact() {
    let extra_header = r#"{"kind": "dr_D", "N": 1, "colour": "red"}"#;
    assert!(parse_table(extra_header, None).unwrap_err().1.contains("colour"));
    let extra_entry = r#"{"kind": "dr_D", "N": 1}
{"g": 1, "fields": [1, 1], "psi": [0, 0], "class": {"tag": "dr_d", "monomial": [2]}, "value": "1", "note": "x"}"#;
    assert_eq!(parse_table(extra_entry, None).unwrap_err().0, 2);
    let extra_class = r#"{"kind": "dr_D", "N": 1}
{"g": 1, "fields": [1, 1], "psi": [0, 0], "class": {"tag": "dr_d", "monomial": [2], "b": [1]}, "value": "1"}"#;
    assert!(parse_table(extra_class, None).is_err());
    let bad_tag = r#"{"kind": "dr_D", "N": 1}
{"g": 1, "fields": [1, 1], "psi": [0, 0], "class": {"tag": "omega"}, "value": "1"}"#;
    assert!(parse_table(bad_tag, None).is_err());
    assert!(parse_table(r#"{"kind": "nope", "N": 1}"#, None).is_err());
    assert!(parse_table("", None).is_err());
}

#[test]
fn bad_values_and_keys_name_the_entry() {
    let bad_value = r#"{"kind": "cohft_psi", "N": 1}
{"g": 0, "fields": [1, 1, 1], "psi": [0, 0, 0], "class": {"tag": "plain"}, "value": "1/0"}"#;
    let (line, msg) = parse_table(bad_value, None).unwrap_err();
    assert_eq!(line, 2);
    assert!(msg.contains("1/0"), "{msg}");
    let unstable = r#"{"kind": "cohft_psi", "N": 1}
{"g": 0, "fields": [1, 1], "psi": [0, 0], "class": {"tag": "plain"}, "value": "1"}"#;
    let (_, msg) = parse_table(unstable, None).unwrap_err();
    assert!(msg.contains("g=0 fields=[1, 1]"), "{msg}");
    let field = r#"{"kind": "cohft_psi", "N": 1}
{"g": 0, "fields": [1, 2, 1], "psi": [0, 0, 0], "class": {"tag": "plain"}, "value": "1"}"#;
    assert!(parse_table(field, None).unwrap_err().1.contains("field index 2"));
}

#[test]
fn eta_must_be_invertible_and_square() {
    assert!(parse_table(r#"{"kind": "cohft_psi", "N": 2, "eta": [[1, 1], [1, 1]]}"#, None).is_err());
    assert!(parse_table(r#"{"kind": "cohft_psi", "N": 2, "eta": [[1, 0]]}"#, None).is_err());
    let t = parse_table(r#"{"kind": "cohft_psi", "N": 2, "eta": [["1/2", 0], [0, "-3"]]}"#, None).unwrap();
    assert_eq!(t.eta().lower(1, 1), &Rational::new(1, 2));
    assert_eq!(t.eta().upper(2, 2), &Rational::new(-1, 3));
}

#[test]
fn kind_mismatch_is_rejected() {
    let (_, msg) = parse_table(DR_G1, Some(TableKind::ObsO)).unwrap_err();
    assert!(msg.contains("expected a obs_O table"), "{msg}");
}

#[test]
fn genus_zero_dr_needs_no_table_entries() {
    let t = parse_table(DR_G1, None).unwrap();
    let cohft = TrivialCohft::default();
    // n = 3, monomial a_1: +<τ_0 τ_0 τ_0 τ_1>_0
    let v = dr_correlator(&cohft, 0, &[1, 1, 1, 1], &[0, 0, 0, 0], &[1, 0, 0], Some(&t)).unwrap();
    assert_eq!(v, Rational::one());
    let v = dr_correlator(&cohft, 0, &[1, 1, 1], &[0, 0, 0], &[0, 0], Some(&t)).unwrap();
    assert_eq!(v, Rational::from(-1));
}
