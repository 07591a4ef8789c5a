// Estimate the stationary law of the free Ornstein–Uhlenbeck process and
// check it against the Schwinger–Dyson equation and the semicircle moments.

use freediff::laws::{sample_stationary_law, StationaryProtocol, Tolerance};
use freediff::polylang::parse_poly;
use freediff::sde::SdeConfig;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let v = parse_poly("0.5*X1^2 + 0.5*X2^2", 2)?;
    let cfg = SdeConfig::new(v.clone(), 24, 0.02, 1.0, 3);
    let protocol = StationaryProtocol {
        burn_in: 6.0,
        sample_interval: 1.0,
        t_end: 16.0,
        replicas: 4,
    };
    let (law, _) = sample_stationary_law(&cfg, &protocol)?;
    println!("{} samples in {} groups", law.num_samples(), law.num_groups());

    for (text, catalan) in [("X1^2", 1.0), ("X1^4", 2.0), ("X1^6", 5.0)] {
        let est = law.moment(&parse_poly(text, 2)?)?;
        println!("{text:>5}: {:.4} ± {:.4}  (semicircle {catalan})", est.value.re, est.stderr);
    }

    let report = law.sd_residual_suite(&v, 3, Tolerance::new(3.0, 0.05))?;
    println!(
        "residual suite: {} entries, {} failures, max |residual| {:.4}",
        report.entries.len(),
        report.failures().count(),
        report.max_abs_deviation()
    );
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
