use negotiate::format::{parse_scenario, serialize_scenario, FormatError};
use negotiate_core::scengen::rng;
use negotiate_core::{generate, random_allocation, GeneratorSpec, UtilityClass};
use proptest::prelude::*;

const CLASSES: [UtilityClass; 4] =
    [UtilityClass::Unrestricted, UtilityClass::Additive, UtilityClass::Monotonic, UtilityClass::Dichotomous];

proptest! {
    #[test]
    fn round_trip(n in 2usize..=4, m in 1usize..=4, c in 0usize..CLASSES.len(), seed in any::<u64>(), with_initial in any::<bool>()) {
        let s = generate(&GeneratorSpec::new(n, m, CLASSES[c], seed)).unwrap();
        let a = random_allocation(n, m, &mut rng(seed));
        let initial = with_initial.then_some(&a);
        let text = serialize_scenario(&s, initial);
        let (s2, a2) = parse_scenario(&text).unwrap();
        prop_assert_eq!(&s2, &s);
        prop_assert_eq!(a2.as_ref(), initial);
        prop_assert_eq!(serialize_scenario(&s2, a2.as_ref()), text);
    }
}

fn err(text: &str) -> FormatError {
    parse_scenario(text).unwrap_err()
}

#[test]
fn fractional_values_accepted() {
    let (s, _) = parse_scenario(
        r#"{"agents":["a","b"],"resources":["x"],
            "utilities":{"a":{"type":"additive","values":{"x":"3/4"}},"b":{"type":"additive","values":{"x":2}}}}"#,
    )
    .unwrap();
    assert_eq!(s.agent_count(), 2);
}

#[test]
fn rejects_malformed_input() {
    assert!(matches!(err("{"), FormatError::SyntaxError(_)));
    let partial = r#"{"agents":["a","b"],"resources":["x"],
        "utilities":{"a":{"type":"explicit","values":{"":"0"}},"b":{"type":"additive","values":{"x":"1"}}}}"#;
    assert!(matches!(err(partial), FormatError::NonTotalExplicitTable { .. }));
    let missing = r#"{"agents":["a","b"],"resources":["x","y"],
        "utilities":{"a":{"type":"additive","values":{"x":"1"}},"b":{"type":"additive","values":{"x":"1","y":"0"}}}}"#;
    assert!(matches!(err(missing), FormatError::NonTotalAdditiveTable { .. }));
    let unknown = r#"{"agents":["a","b"],"resources":["x"],
        "utilities":{"a":{"type":"explicit","values":{"":"0","z":"1","x":"1"}},"b":{"type":"additive","values":{"x":"1"}}}}"#;
    assert!(matches!(err(unknown), FormatError::UnknownResourceInBundleKey { .. }));
    let twice = r#"{"agents":["a","b"],"resources":["x"],
        "utilities":{"a":{"type":"additive","values":{"x":"1"}},"b":{"type":"additive","values":{"x":"1"}}},
        "initial_allocation":{"a":["x"],"b":["x"]}}"#;
    assert!(matches!(err(twice), FormatError::InvalidAllocation(_)));
}
