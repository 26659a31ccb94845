#![no_main]

use henon_modes::config::{parse_run_config, parse_run_layer};
use henon_modes::ModeClass;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(layer) = parse_run_layer(text) {
        if let Ok(cfg) = layer.resolve(&[ModeClass::Mode(1)]) {
            assert!(cfg.restarts >= 1);
            for m in &cfg.modes {
                m.check_grid(&cfg.grid).expect("resolved modes fit the grid");
            }
        }
    }
    let _ = parse_run_config(text);
});
