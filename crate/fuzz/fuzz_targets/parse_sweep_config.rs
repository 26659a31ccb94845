#![no_main]

use henon_modes::config::{parse_sweep_config, SWEEP_MAX_ROWS, SWEEP_MIN_TOTAL_POWER};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = parse_sweep_config(text) {
        assert!(cfg.rows() >= 1 && cfg.rows() <= SWEEP_MAX_ROWS);
        assert!(cfg.params.iter().all(|p| p.total_power() >= SWEEP_MIN_TOTAL_POWER));
    }
});
