#![no_main]

use libfuzzer_sys::fuzz_target;

// The JSON space schema is the one surface fed by untrusted files.
// Parsing must never panic: either a space comes back or a clean error.
// When it parses, validation and re-serialization must hold up too.
fuzz_target!(|data: &[u8]| {
    let text = match std::str::from_utf8(data) {
        Ok(t) => t,
        Err(_) => return,
    };
    if let Ok(space) = cobar_core::space::from_json(text) {
        let _ = cobar_core::space::validate(&space);
        let round = cobar_core::space::to_json(&space);
        let _ = cobar_core::space::from_json(&round);
    }
});
