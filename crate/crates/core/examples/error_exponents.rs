//! Sphere-packing and random-coding exponents of BSC(0.1) with uniform input,
//! and the resulting CSCC error bound at blocklength 256.

use subblock::exponent::{cscc_error_bound, ExponentCurve};
use subblock::{Channel, Composition, Distribution};

fn main() -> subblock::Result<()> {
    let ch = Channel::bsc(0.1)?;
    let mut curve = ExponentCurve::new(&ch, &Distribution::uniform(2), 1e-10)?;
    println!("I(P, W) = {:.6}, critical rate = {:.6}", curve.mutual_information, curve.r_hat);

    let rates: Vec<f64> = (1..=10).map(|i| i as f64 * 0.05).collect();
    println!("{:>5} {:>10} {:>10}", "R", "E_sp", "E_r");
    for pt in curve.sample(&rates)? {
        println!("{:>5.2} {:>10.6} {:>10.6}", pt.rate, pt.e_sp, pt.e_r);
    }

    let p = Composition::new(vec![8, 8])?;
    println!();
    println!("{:>5} {:>12} {:>14}", "R", "R + r(L,P)", "log2 P_e bound");
    for r in [0.1, 0.2, 0.3] {
        let b = cscc_error_bound(&ch, &p, r, 256)?;
        println!("{r:>5.2} {:>12.6} {:>14.3}", b.shifted_rate, b.log2_bound);
    }
    Ok(())
}
