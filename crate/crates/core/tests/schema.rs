use isoprofile::GroupSpec;

#[test]
fn schema_examples_parse() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../../../docs/group_spec.schema.json")).unwrap();
    let examples = schema["examples"].as_array().unwrap();
    assert_eq!(examples.len(), 4);
    for ex in examples {
        let spec: GroupSpec = serde_json::from_value(ex.clone()).unwrap();
        spec.validate().unwrap();
        assert_eq!(&serde_json::to_value(&spec).unwrap(), ex);
    }
}

#[test]
fn schema_bounds_match_validation() {
    let bad = [
        r#"{"family":"free_abelian","d":0}"#,
        r#"{"family":"iterated_wreath","depth":3,"lamp_order":2}"#,
        r#"{"family":"wreath","lamp":{"family":"cyclic","order":1},"base_rank":1}"#,
    ];
    for json in bad {
        let spec: GroupSpec = serde_json::from_str(json).unwrap();
        assert!(spec.validate().is_err(), "{json}");
    }
}
