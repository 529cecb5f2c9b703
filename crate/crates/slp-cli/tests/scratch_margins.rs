// Temporary: measure headroom for the acceptance thresholds.

use slp_cli::sim::{db_to_linear, draw_instance, substream};
use slp_core::{assemble_nnls, lift, solve_apgd, solve_exact, Constellation};

#[test]
#[ignore]
fn criterion2_headroom() {
    let c = Constellation::from_label("psk4").unwrap();
    let mut worst_gap: f64 = 0.0;
    let mut degenerate = 0;
    for trial in 0..60 {
        let mut rng = substream(1, "psk4", 8, 8, 4.0, trial);
        let instance = draw_instance(&mut rng, 8, 8, &c, db_to_linear(4.0));
        let lifted = lift(&instance).unwrap();
        if lifted.degenerate {
            degenerate += 1;
            continue;
        }
        let problem = assemble_nnls(lifted);
        let exact = solve_exact(&problem).unwrap();
        let apgd = solve_apgd(&problem, 150);
        let gap = apgd.objective - exact.objective;
        if gap > worst_gap {
            worst_gap = gap;
        }
    }
    println!("criterion2: worst absolute gap after 150 iters over 60 trials = {worst_gap:.3e} ({degenerate} degenerate)");

    let mut worst_rel: f64 = 0.0;
    for trial in 0..100 {
        let mut rng = substream(1, "psk4", 8, 8, 4.0, trial);
        let instance = draw_instance(&mut rng, 8, 8, &c, db_to_linear(4.0));
        let problem = assemble_nnls(lift(&instance).unwrap());
        let exact = solve_exact(&problem).unwrap();
        let apgd = solve_apgd(&problem, 10_000);
        let rel = (apgd.objective - exact.objective).abs() / exact.objective.max(1e-30);
        if rel > worst_rel {
            worst_rel = rel;
        }
    }
    println!("criterion1: worst relative gap after 1e4 iters over 100 trials = {worst_rel:.3e}");
}
