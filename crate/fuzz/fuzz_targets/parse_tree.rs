#![no_main]

use libfuzzer_sys::fuzz_target;
use treespan::{canonical_encoding, export_dot, parse_tree, serialize_tree};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(tree) = parse_tree(text) else { return };
    let printed = serialize_tree(&tree);
    let again = parse_tree(&printed).expect("serialized tree must parse");
    assert_eq!(tree, again);
    assert_eq!(printed, serialize_tree(&again));
    assert_eq!(canonical_encoding(&tree), canonical_encoding(&again));
    let _ = export_dot(&tree, None);
});
