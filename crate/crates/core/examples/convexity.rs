// Sampling-based (c, M)-convexity checks. A refutation carries a witness
// pair that can be checked again; a certificate is only at tolerance.

use freediff::convexity::{certify, certify_with, CertifyOptions, GapKind};
use freediff::matmodel::RngStream;
use freediff::polylang::parse_poly;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = RngStream::new(2);
    let quadratic = parse_poly("0.5*X1^2 + 0.5*X2^2", 2)?;
    let r = certify(&quadratic, 1.0, 10.0, 300, 4, &mut rng)?;
    println!("quadratic: {:?}, min gap {:e}", r.verdict, r.min_gap);

    let quartic = parse_poly("0.5*X1^2 + 0.5*X2^2 + 0.1*X1^4 + 0.1*X2^4", 2)?;
    for kind in [GapKind::Operator, GapKind::Trace] {
        for n in [1, 4] {
            let r = certify_with(&quartic, 1.0, 2.0, CertifyOptions::new(300, n).with_kind(kind), &mut rng)?;
            println!("quartic {kind:?} N = {n}: {:?}, min gap {:e}", r.verdict, r.min_gap);
        }
    }

    let cubic = parse_poly("0.5*X1^2 - X1^3", 1)?;
    let r = certify(&cubic, 1.0, 10.0, 300, 2, &mut rng)?;
    let w = r.witness.as_ref().expect("refuted reports carry a witness");
    println!("cubic: {:?}, witness gap {:e}, rechecked {:e}", r.verdict, w.gap, w.recheck(&cubic, 1.0, GapKind::Operator)?);
    let json = r.to_json();
    println!("report JSON is {} bytes", json.len());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
