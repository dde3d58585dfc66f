//! Subblock-energy-constrained codes against constant-subblock-composition
//! codes, and the witness that the uniform SECC law is not optimal.

use subblock::capacity::cscc_capacity;
use subblock::secc::{asymmetry_witness, secc_capacity, secc_uniform_rate};
use subblock::Channel;

fn main() -> subblock::Result<()> {
    let ch = Channel::bsc(0.1)?;
    println!("{:>3} {:>5} {:>9} {:>12} {:>9}", "L", "B", "CSCC", "SECC unif.", "SECC");
    for l in [2, 3, 4] {
        for b in [0.25, 0.5, 0.75] {
            let cscc = cscc_capacity(&ch, l, b)?.rate;
            let uniform = secc_uniform_rate(&ch, l, b)?;
            let exact = secc_capacity(&ch, l, b, 1e-10)?.rate;
            println!("{l:>3} {b:>5.2} {cscc:>9.5} {uniform:>12.5} {exact:>9.5}");
        }
    }

    println!();
    println!("{:>5} {:>12} {:>12}", "p0", "I(01; Y^2)", "I(11; Y^2)");
    for p0 in [0.05, 0.1, 0.25, 0.4] {
        let (i01, i11) = asymmetry_witness(p0)?;
        println!("{p0:>5.2} {i01:>12.6} {i11:>12.6}");
    }
    Ok(())
}
