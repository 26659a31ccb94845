#![no_main]

use henon_modes::polar::{parse_field_dump, render_field_dump};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(dump) = parse_field_dump(text) {
        let again = parse_field_dump(&render_field_dump(&dump.field, dump.alpha)).expect("rendered dump parses");
        assert_eq!(again.field, dump.field);
    }
});
