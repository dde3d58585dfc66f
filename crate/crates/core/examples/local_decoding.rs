//! Normal-approximation rate of decoding each subblock on its own over
//! BSC(0.11), compared with the joint-decoding lower bound.

use subblock::finiteblock::{bsc_capacity, joint_decoding_lower_bound, lsd_rate_bsc};

fn main() -> subblock::Result<()> {
    let p = 0.11;
    println!("C = {:.6}", bsc_capacity(p)?);
    println!("{:>5} {:>12} {:>12} {:>12}", "n", "eps=1e-3", "eps=1e-6", "joint LB");
    for n in [8, 16, 32, 64, 128, 256] {
        println!(
            "{n:>5} {:>12.6} {:>12.6} {:>12.6}",
            lsd_rate_bsc(p, n, 1e-3)?,
            lsd_rate_bsc(p, n, 1e-6)?,
            joint_decoding_lower_bound(p, n)?
        );
    }
    Ok(())
}
