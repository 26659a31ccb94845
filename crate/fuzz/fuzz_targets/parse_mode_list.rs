#![no_main]

use henon_modes::polar::parse_mode_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(modes) = parse_mode_list(text) {
        assert!(!modes.is_empty());
        let joined: Vec<String> = modes.iter().map(|m| m.to_string()).collect();
        assert_eq!(parse_mode_list(&joined.join(",")).unwrap(), modes);
    }
});
