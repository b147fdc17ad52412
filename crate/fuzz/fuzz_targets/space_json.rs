#![no_main]

use hrflow::json::{parse_space, space_to_json};
use hrflow::space::validate;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(space) = parse_space(text) else {
        return;
    };
    let _ = validate(&space);
    let again = parse_space(&space_to_json(&space)).expect("serialized space parses");
    assert_eq!(again.dims, space.dims);
    assert_eq!(again.summands(), space.summands());
});
