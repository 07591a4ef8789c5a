// Driving the command-line front end from a JSON config, as the
// `freediff` binary does.

use std::fs;

use freediff::cli::main_with_args;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let config = dir.path().join("ou.json");
    fs::write(
        &config,
        r#"{
  "potential": "0.5*X1^2 + 0.5*X2^2",
  "N": 8,
  "dt": 0.02,
  "t_max": 4,
  "record_stride": 50,
  "norm_cap": 10,
  "c": 1,
  "m_bound": 5,
  "trials": 200
}
"#,
    )?;
    let out = dir.path().join("out");
    let config = config.to_str().ok_or("non-UTF-8 path")?;
    let out = out.to_str().ok_or("non-UTF-8 path")?;

    for cmd in ["simulate", "couple", "convexity"] {
        let code = main_with_args(["freediff", cmd, "--config", config, "--out", out, "--seed", "9"]);
        println!("{cmd} exited with {code}");
    }
    main_with_args(["freediff", "grad", "X1*X2*X1*X2", "--index", "1"]);

    let mut files: Vec<_> = fs::read_dir(out)?.map(|e| e.map(|e| e.file_name())).collect::<Result<_, _>>()?;
    files.sort();
    println!("wrote {files:?}");
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
