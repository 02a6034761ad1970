//! Name cleaning: how raw first-name strings become dictionary candidates.
//!
//! ```bash
//! cargo run --example clean_names -- "Sonya F.P." "(Joe) Yong"
//! ```

use pubcareers::names::{clean_first_name, clean_first_name_with};

fn main() {
    let mut inputs: Vec<String> = std::env::args().skip(1).collect();
    if inputs.is_empty() {
        inputs = [
            "sonya f.p.",
            "michele luigi",
            "(joe) yong",
            "J.-P.",
            "Zoë, Ana",
            "A. B. C.",
        ]
        .map(String::from)
        .to_vec();
    }
    for raw in &inputs {
        let cleaned = clean_first_name(raw);
        let folded = clean_first_name_with(raw, true);
        print!("{raw:>16} -> {:?}", cleaned.candidates);
        if folded.candidates != cleaned.candidates {
            print!("  (ascii-folded: {:?})", folded.candidates);
        }
        println!();
    }
}
