#![no_main]

use libfuzzer_sys::fuzz_target;
use tensor_ising::io::{parse_spins, write_spins};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(xs) = parse_spins(text) {
        assert_eq!(parse_spins(&write_spins(&xs)).expect("written spins parse"), xs);
    }
});
