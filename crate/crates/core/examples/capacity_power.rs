//! Capacity-power function of a ternary channel, with the optimizing input law
//! and the certified residual.

use subblock::capacity::capacity_power;
use subblock::Channel;

fn main() -> subblock::Result<()> {
    let ch = Channel::new(
        vec![
            vec![0.9, 0.05, 0.05],
            vec![0.05, 0.9, 0.05],
            vec![0.05, 0.05, 0.9],
        ],
        vec![0.0, 0.5, 1.0],
    )?;
    println!("{:>5} {:>9} {:>28} {:>10}", "B", "C(B)", "input law", "residual");
    for i in 0..=10 {
        let b = i as f64 / 10.0;
        let r = capacity_power(&ch, b, 1e-10)?;
        let law = r
            .distribution()
            .map(|d| d.probs().iter().map(|p| format!("{p:.4}")).collect::<Vec<_>>().join(" "))
            .unwrap_or_default();
        println!("{b:>5.2} {:>9.6} {law:>28} {:>10.2e}", r.rate, r.diagnostics.residual);
    }
    Ok(())
}
