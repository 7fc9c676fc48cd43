//! The alignment rate can be evaluated from the local nematic moments or
//! from their average over a disk of radius ε around each point. As ε → 0
//! the disk average converges to the local rate at second order (it is the
//! mean of a smooth field over a symmetric neighborhood). This study runs
//! Model I both ways from the same start and reports the final-time L²
//! distances and their observed orders.

use rodkin::harness::studies::study_localization;
use rodkin::parse_config;

fn main() {
    let cfg = parse_config(
        "nx = 64
         ny = 64
         ntheta = 16
         dt = 0.001
         t_end = 0.1
         cadence = 0.1
         init = two-mode
         init_a1 = 0.2
         init_a2 = 0.3",
    )
    .expect("static config");

    let eps = [0.2, 0.1, 0.05];
    let table = study_localization(&cfg, &eps).expect("study runs");

    println!("Disk-averaged vs localized alignment, 64×64×16 grid, T = {}\n", cfg.t_end);
    println!("{:>8} {:>16} {:>10}", "eps", "L² distance", "order");
    for (i, (&e, &err)) in table.labels.iter().zip(&table.errors).enumerate() {
        if i == 0 {
            println!("{e:>8} {err:>16.6e} {:>10}", "-");
        } else {
            println!("{e:>8} {err:>16.6e} {:>10.3}", table.orders[i - 1]);
        }
    }
    println!(
        "\nnote: the smallest disk spans only a few grid cells here, so sampling\n\
         error of the disk shaves the last observed order slightly below 2;\n\
         doubling the grid (as the acceptance suite does) restores it."
    );
}
