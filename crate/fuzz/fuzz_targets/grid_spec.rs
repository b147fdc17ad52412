#![no_main]

use hrflow::portrait::GridSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(grid) = text.parse::<GridSpec>() {
        let back: GridSpec = grid.to_string().parse().expect("displayed grid parses");
        assert_eq!(back, grid);
        assert!(grid.x1.points().all(|x| x > 0.0 && x.is_finite()));
        assert!(grid.x2.points().all(|x| x > 0.0 && x.is_finite()));
    }
});
