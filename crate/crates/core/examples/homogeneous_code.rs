//! Builds a homogeneous code and prints a few codewords.
//!
//!     cargo run --example homogeneous_code [out.csv]

use siet::prelude::*;
use siet::typespace::multinomial;

fn main() -> Result<()> {
    let counts = SymbolCounts::new(vec![3, 2, 2, 1])?;
    println!(
        "capacity {} codewords of length {}",
        multinomial(&counts),
        counts.n()
    );

    let full = build_code(&counts, 1680, BuildMode::Enumerate)?;
    println!(
        "enumerated: {} codewords, rate {:.4} bits/use",
        full.messages(),
        full.rate()
    );

    let code = build_code(&counts, 16, BuildMode::Sample { seed: 42 })?;
    for i in 1..=4 {
        let w = code.codeword(i);
        println!(
            "  message {i}: {w:?}  type {:?}",
            codeword_type(w, 4)?.probs()
        );
    }
    match build_code(&counts, 1681, BuildMode::Enumerate) {
        Err(e) => println!("one more than capacity: {e}"),
        Ok(_) => unreachable!(),
    }
    if let Some(path) = std::env::args().nth(1) {
        code.write_csv(std::fs::File::create(&path)?)?;
        println!("wrote {path}");
    }
    Ok(())
}
