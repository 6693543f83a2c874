#![no_main]

use libfuzzer_sys::fuzz_target;
use tensor_ising::experiments::ExperimentManifest;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = ExperimentManifest::parse(text);
    }
});
