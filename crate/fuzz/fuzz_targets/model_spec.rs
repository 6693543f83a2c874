#![no_main]

use libfuzzer_sys::fuzz_target;
use tensor_ising::ModelSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = text.parse::<ModelSpec>() {
        let back: ModelSpec = spec.to_spec_string().parse().expect("canonical spec parses");
        assert_eq!(back, spec);
    }
});
