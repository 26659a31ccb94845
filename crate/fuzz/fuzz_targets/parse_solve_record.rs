#![no_main]

use henon_modes::parse_solve_record;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rec) = parse_solve_record(text) {
        let again = parse_solve_record(&rec.to_json()).expect("serialised record parses");
        assert_eq!(again, rec);
    }
});
