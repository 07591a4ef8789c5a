// Free Ornstein–Uhlenbeck process: the quadratic potential. `tr_N X1^2`
// relaxes towards 1.

use freediff::polylang::parse_poly;
use freediff::sde::{simulate, write_trajectory_csv, SdeConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let v = parse_poly("0.5*X1^2 + 0.5*X2^2", 2)?;
    let mut cfg = SdeConfig::new(v, 32, 0.01, 5.0, 11);
    cfg.record_stride = 100;
    cfg.norm_cap = Some(10.0);
    cfg.observables = vec![parse_poly("X1^2", 2)?, parse_poly("X1*X2", 2)?];

    let traj = simulate(&cfg)?;
    write_trajectory_csv(std::io::stdout().lock(), &traj)?;
    println!("max norm {:.4}, cap violations {}", traj.max_norm(), traj.cap_violations.len());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
