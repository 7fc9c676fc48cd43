//! With transport at rate 1/ε and reversal damping at rate 2/ε², the
//! odd-in-θ part of the solution is slaved to the even part, and the even
//! part approaches a uni-directional diffusion equation with coefficient
//! ½ on (e·∇)² as ε → 0. This study integrates the scaled model for a
//! decreasing list of ε and measures the final-time L² distance to that
//! limit equation, which should shrink roughly linearly in ε.

use rodkin::harness::studies::study_diffusion_limit;
use rodkin::parse_config;

fn main() {
    let cfg = parse_config(
        "nx = 32
         ny = 32
         ntheta = 16
         dt = 0.001
         t_end = 0.25
         cadence = 0.25
         init = two-mode
         init_a1 = 0.3
         init_a2 = 0.2",
    )
    .expect("static config");

    let eps = [0.2, 0.1, 0.05];
    let table = study_diffusion_limit(&cfg, &eps).expect("study runs");

    println!(
        "Fast-reversal model vs its diffusion limit, 32×32×16 grid, T = {}\n",
        cfg.t_end
    );
    println!("{:>8} {:>16} {:>10}", "eps", "L² distance", "order");
    for (i, (&e, &err)) in table.labels.iter().zip(&table.errors).enumerate() {
        if i == 0 {
            println!("{e:>8} {err:>16.6e} {:>10}", "-");
        } else {
            println!("{e:>8} {err:>16.6e} {:>10.3}", table.orders[i - 1]);
        }
    }

    let first = table.errors[0];
    let last = *table.errors.last().unwrap();
    println!(
        "\ndistance shrank by a factor of {:.1} while eps shrank by {:.1}",
        first / last,
        table.labels[0] / table.labels.last().unwrap()
    );
    assert!(
        last < first,
        "distance to the limit equation should decrease with eps"
    );
}
