#![no_main]

use libfuzzer_sys::fuzz_target;
use treespan::{parse_mapping, serialize_mapping};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(map) = parse_mapping(text) else { return };
    let printed = serialize_mapping(&map);
    let again = parse_mapping(&printed).expect("serialized mapping must parse");
    assert_eq!(map, again);
    assert_eq!(printed, serialize_mapping(&again));
});
