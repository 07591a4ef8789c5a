// How far `p(X^Z_t)` and `p(X^0_t)` drift apart along a coupled pair,
// against the Lipschitz bound `deg p · M^(deg p - 1) · d(t)`.

use freediff::matmodel::{random_selfadjoint_tuple, RngStream};
use freediff::polylang::parse_poly;
use freediff::sde::{transport_check, SdeConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let z = random_selfadjoint_tuple(2, 16, 1.0, &mut RngStream::new(8))?;
    let mut cfg = SdeConfig::new(parse_poly("0.5*X1^2 + 0.5*X2^2", 2)?, 16, 0.01, 8.0, 4);
    cfg.record_stride = 200;
    for text in ["X1", "X1*X2", "X1*X2*X1"] {
        let p = parse_poly(text, 2)?;
        let deg = p.degree().unwrap_or(0) as i32;
        let s = transport_check(&p, &cfg, &z)?;
        println!("p = {text}");
        for k in 0..s.times.len() {
            let bound = deg as f64 * s.running_norm[k].powi(deg - 1) * s.distance[k];
            println!("  t = {:4.1}  e_p {:.3e}  bound {:.3e}", s.times[k], s.error[k], bound);
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
