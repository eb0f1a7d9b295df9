//! Prints the summary of every bundled preset with timings.

use std::time::Instant;

use cwewt::{characterize, load_preset, PRESET_NAMES};

fn main() {
    for name in PRESET_NAMES {
        let start = Instant::now();
        let cfg = load_preset(name).expect("preset");
        match characterize(&cfg) {
            Ok(r) => {
                print!("{}", r.to_text());
                println!("{:<28}{:?}\n", "elapsed", start.elapsed());
            }
            Err(e) => println!("{name}: {e}"),
        }
    }
}
