// Evaluating polynomials on tuples of random Hermitian matrices.

use freediff::matmodel::{frobenius_norm, ntrace, random_selfadjoint_tuple, RngStream};
use freediff::polylang::parse_poly;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = RngStream::new(7);
    let x = random_selfadjoint_tuple(2, 24, 2.0, &mut rng)?;
    let p = parse_poly("X1*X2 + 1i*X2^2", 2)?;
    let q = parse_poly("X1 - X2*X1", 2)?;

    let pq = (&p * &q).evaluate(&x)?;
    let prod = p.evaluate(&x)? * q.evaluate(&x)?;
    println!("|(PQ)(X) - P(X)Q(X)|_F = {:e}", frobenius_norm(&(pq - prod)));

    let adj = p.adjoint().evaluate(&x)?;
    let dagger = p.evaluate(&x)?.adjoint();
    println!("|P*(X) - P(X)^*|_F   = {:e}", frobenius_norm(&(adj - dagger)));

    let w = parse_poly("X1*X2*X1*X2", 2)?;
    println!("tr_N(X1 X2 X1 X2)     = {:.6}", ntrace(&w.evaluate(&x)?));
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
