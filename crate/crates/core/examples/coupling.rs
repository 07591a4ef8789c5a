// Two solutions driven by the same noise, one from `Z` and one from 0.
// For the quadratic potential the noise cancels and the difference decays
// by exactly `1 - dt/2` per step.

use freediff::matmodel::{random_selfadjoint_tuple, RngStream};
use freediff::polylang::parse_poly;
use freediff::sde::{coupled_simulate, SdeConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let z = random_selfadjoint_tuple(2, 16, 1.0, &mut RngStream::new(5))?;
    let z_norm = z.norm()?;

    for text in ["0.5*X1^2 + 0.5*X2^2", "0.5*X1^2 + 0.5*X2^2 + 0.1*X1^4 + 0.1*X2^4"] {
        let mut cfg = SdeConfig::new(parse_poly(text, 2)?, 16, 0.01, 6.0, 21);
        cfg.record_stride = 100;
        let run = coupled_simulate(&cfg, &z)?;
        assert!(run.noise_shared());
        println!("V = {text}");
        for (k, t) in run.distance.times.iter().enumerate() {
            let exact = (1.0 - cfg.dt / 2.0).powf(t / cfg.dt) * z_norm;
            println!("  t = {t:4.1}  distance {:.6e}  quadratic rate {:.6e}", run.distance.op_norm[k], exact);
        }
        println!("  log trace distance slope {:.4}", run.trace_decay_slope(0.0, 6.0).unwrap_or(f64::NAN));
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
