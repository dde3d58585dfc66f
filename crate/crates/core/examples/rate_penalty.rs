//! Rate penalty of a balanced binary composition on the BSC: the exact value
//! from the symmetry-reduced computation against the closed-form bounds.

use subblock::bounds::{penalty_bound_bsc, penalty_bound_generic};
use subblock::capacity::{ccc_capacity_fixed_p, cscc_capacity_fixed_p};
use subblock::{Channel, Composition};

fn main() -> subblock::Result<()> {
    let p = Composition::new(vec![8, 8])?;
    let generic = penalty_bound_generic(&p).upper;
    println!("r(16, (8, 8)) = {generic:.6}");
    println!("{:>5} {:>10} {:>10} {:>10}", "p0", "exact", "BSC bound", "r(L, P)");
    for i in 1..10 {
        let p0 = i as f64 * 0.05;
        let ch = Channel::bsc(p0)?;
        let exact = ccc_capacity_fixed_p(&ch, &p.distribution()) - cscc_capacity_fixed_p(&ch, &p)?.rate;
        let bound = penalty_bound_bsc(p0, &p)?.upper;
        println!("{p0:>5.2} {exact:>10.6} {bound:>10.6} {generic:>10.6}");
    }
    Ok(())
}
