//! Energy buffer of a receiver fed by CSCC sequences: the largest outage-free
//! subblock length for a given buffer, then random and adversarial symbol
//! orders around that length.

use subblock::energy::{
    adversarial_codeword, cscc_sequence, g_value, max_subblock_length, simulate, BufferConfig, SubblockOrder,
};
use subblock::{Channel, Composition, Distribution};

fn main() -> subblock::Result<()> {
    let ch = Channel::bsc(0.1)?;
    let b = 0.5;
    let e_max = 4.0;
    let bound = max_subblock_length(&ch, &Distribution::new(vec![0.5, 0.5])?, b, e_max)?;
    println!("E_max = {e_max}, B = {b}: outage-free for subblocks up to L = {bound}");

    for l in [8usize, 10] {
        let p = Composition::new(vec![l / 2, l - l / 2])?;
        let cfg = BufferConfig::starting_at_g(&ch, &p, b, e_max)?;
        let g = g_value(&p, &ch, b);
        let worst = simulate(&cfg, &ch, &adversarial_codeword(&p, &ch, b, 4)?)?;
        let random: usize = (0..200)
            .map(|seed| {
                let seq = cscc_sequence(&p, &ch, b, 16, SubblockOrder::Random(seed))?;
                Ok(simulate(&cfg, &ch, &seq)?.outages())
            })
            .sum::<subblock::Result<usize>>()?;
        println!(
            "L = {l:>2}, G = {g}: adversarial outages {}, random outages over 200 runs {random}",
            worst.outages()
        );
    }
    Ok(())
}
