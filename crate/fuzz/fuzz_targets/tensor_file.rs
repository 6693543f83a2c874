#![no_main]

use libfuzzer_sys::fuzz_target;
use tensor_ising::io::{parse_tensor, write_tensor};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(parsed) = parse_tensor(text) {
        // accepted files must survive a write/parse cycle unchanged
        let again = parse_tensor(&write_tensor(&parsed.tensor, &parsed.family)).expect("written tensor parses");
        assert_eq!(again.tensor, parsed.tensor);
    }
});
