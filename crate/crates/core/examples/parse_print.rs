// Text round trip through the polynomial grammar, and the diagnostics for
// malformed input.

use freediff::polylang::{parse_poly, print_poly};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for text in ["X1^2 + X2^2", "(X1 + 2i*X2)*(X1 - 2i*X2)", "X1*X2* + 0.25*X2*X1", "3 - X1**X1"] {
        let p = parse_poly(text, 2)?;
        let printed = print_poly(&p);
        assert_eq!(parse_poly(&printed, 2)?, p);
        println!("{text:>22}  ->  {printed}  (self-adjoint: {})", p.is_self_adjoint());
    }

    for bad in ["X1 + * X2", "X3", "X1^-2", "(X1 + X2", "(X1 + X2)^2"] {
        let err = parse_poly(bad, 2).unwrap_err();
        println!("{bad:>22}  !!  {err}");
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
