#![no_main]

use libfuzzer_sys::fuzz_target;
use mmsnp::textio::parse_structure_in;
use mmsnp::Signature;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let sig = Signature::from_symbols([("E", 2), ("P", 1)]).unwrap();
    let colours = vec!["M1".to_string(), "M2".to_string()];
    let _ = parse_structure_in(text, &sig, &colours);
});
