mod common;

use common::laws;

const CASES: u32 = 1000;

macro_rules! law_tests {
    ($($name:ident),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                laws::$name(CASES).unwrap();
            }
        )*
    };
}

law_tests!(
    composition,
    composition_inverse,
    composition_associative,
    inverse,
    domain_and_range,
    domain_restriction,
    range_restriction,
    image,
    set_operations,
    functions,
    partition,
);

#[test]
fn every_law_has_a_test() {
    assert_eq!(laws::LAWS.len(), 11);
}
