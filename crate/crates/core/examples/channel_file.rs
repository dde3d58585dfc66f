//! Loads a channel from its text description and runs the CSCC capacity on it.
//! Pass a file path, or run without arguments to use a built-in asymmetric
//! channel.

use subblock::capacity::{capacity_power, cscc_capacity};
use subblock::Channel;

const DEFAULT: &str = "\
# inputs outputs
2 3
0.85 0.10 0.05
0.05 0.15 0.80
# energy per input
0 1
";

fn main() -> subblock::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT.to_string(),
    };
    let ch = Channel::from_text(&text)?;
    println!("{} inputs, {} outputs, energies {:?}", ch.input_size(), ch.output_size(), ch.energies());
    for b in [0.0, 0.3, 0.6] {
        let r = cscc_capacity(&ch, 6, b)?;
        let counts = r.composition().map(|p| p.counts().to_vec()).unwrap_or_default();
        println!(
            "B = {b:.1}: CSCC(L = 6) = {:.6} with counts {counts:?}, C(B) = {:.6}",
            r.rate,
            capacity_power(&ch, b, 1e-10)?.rate
        );
    }
    Ok(())
}
