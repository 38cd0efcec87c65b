#![no_main]

use libfuzzer_sys::fuzz_target;
use mmsnp::textio::{parse_sentence, print_sentence};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(phi) = parse_sentence(text) {
        // printing must give text that parses back to the same sentence
        let again = parse_sentence(&print_sentence(&phi)).expect("printed sentence parses");
        assert_eq!(again, phi);
    }
});
