#![no_main]

use libfuzzer_sys::fuzz_target;

// Builtin names arrive from the command line; `sphere:<n>` and
// `wedge-circles:<k>` carry numeric parameters. No input may panic, and
// anything accepted must validate.
fuzz_target!(|data: &[u8]| {
    let name = match std::str::from_utf8(data) {
        Ok(t) => t,
        Err(_) => return,
    };
    // Cap the parameters: a would-be sphere:4000000 is a resource test, not
    // a parser test.
    if name.len() > 32 {
        return;
    }
    if let Some(p) = name.split(':').nth(1) {
        if p.len() > 2 {
            return;
        }
    }
    if let Ok(space) = cobar_core::space::builtin_space(name) {
        assert!(cobar_core::space::validate(&space).is_valid());
    }
});
