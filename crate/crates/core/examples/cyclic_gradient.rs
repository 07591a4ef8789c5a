// Cyclic gradient `D_i P` and free difference quotient `∂_i P` of a
// polynomial, and the identity tying them together.

use freediff::polylang::parse_poly;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = parse_poly("X1*X2*X1*X2 + 0.5*X1^3 - 2*X2", 2)?;
    for i in 1..=p.nvars() {
        let d = p.cyclic_grad(i)?;
        let dq = p.diff_quot(i)?;
        println!("D_{i} P = {d}");
        println!("d_{i} P = {dq}");
        // multiplying the tensor legs in swapped order gives back D_i P
        assert_eq!(dq.flip_contract(), d);
    }
    let grad = p.cyclic_gradient()?;
    println!("gradient has {} components", grad.len());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
