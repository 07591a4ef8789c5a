// Saving a state as a raw complex64 snapshot with its JSON sidecar.

use freediff::polylang::parse_poly;
use freediff::sde::{read_snapshot, simulate, write_snapshot, SdeConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SdeConfig::new(parse_poly("0.5*X1^2", 1)?, 8, 0.01, 1.0, 1);
    let traj = simulate(&cfg)?;
    let dir = tempfile::tempdir()?;
    let stem = dir.path().join("final");
    write_snapshot(&stem, &traj.final_state, cfg.t_max, cfg.seed)?;
    let (meta, back) = read_snapshot(&stem)?;
    println!("{meta:?}");
    println!("round-trip error {:e}", back.try_sub(&traj.final_state)?.norm()?);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
