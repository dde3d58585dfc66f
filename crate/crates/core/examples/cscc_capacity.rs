//! CSCC capacity of BSC(0.1) against the energy threshold for several
//! subblock lengths, next to the capacity-power curve they approach.

use subblock::capacity::{capacity_power, cscc_capacity};
use subblock::Channel;

fn main() -> subblock::Result<()> {
    let ch = Channel::bsc(0.1)?;
    let lengths = [2, 4, 8];
    println!("{:>5} {:>9} {:>9} {:>9} {:>9}", "B", "L=2", "L=4", "L=8", "C(B)");
    for i in 0..=10 {
        let b = i as f64 / 10.0;
        print!("{b:>5.2}");
        for &l in &lengths {
            let r = cscc_capacity(&ch, l, b)?;
            print!(" {:>9.5}", r.rate);
        }
        println!(" {:>9.5}", capacity_power(&ch, b, 1e-10)?.rate);
    }

    let best = cscc_capacity(&ch, 8, 0.6)?;
    if let Some(p) = best.composition() {
        println!("optimal composition at L = 8, B = 0.6: {:?}", p.counts());
    }
    Ok(())
}
