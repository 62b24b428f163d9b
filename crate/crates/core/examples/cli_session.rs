//! Drive the `bsht` command line in-process: generate demands, build, verify
//! and draw, as a shell script would.
//!
//!     cargo run --release --example cli_session

use bass_serre_ht::cli::run;

fn bsht(args: &[&str]) -> i32 {
    println!("$ bsht {}", args.join(" "));
    let mut err = Vec::new();
    let code = run(std::iter::once("bsht").chain(args.iter().copied()), &mut std::io::stdout(), &mut err);
    eprint!("{}", String::from_utf8_lossy(&err));
    println!("[exit {code}]");
    code
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("bsht-cli-session");
    let out = dir.join("run");
    std::fs::create_dir_all(&dir)?;
    let demands = dir.join("demands.txt");
    let mut buf = Vec::new();
    run(["bsht", "demands", "gen", "--bs", "2", "3", "--count", "4", "--seed", "11"], &mut buf, &mut Vec::new());
    std::fs::write(&demands, &buf)?;

    let (d, o) = (demands.to_str().unwrap(), out.to_str().unwrap());
    bsht(&["reduce", "--bs", "2", "3", "T h3 t"]);
    bsht(&["reduce", "--amalgam", "2", "3", "1:1 1:1"]);
    bsht(&["build", "--bs", "2", "3", "--demands", d, "--out", o]);
    let pre = out.join("preaction.txt");
    let certs = out.join("certificates.txt");
    bsht(&["verify", pre.to_str().unwrap(), certs.to_str().unwrap()]);
    bsht(&["build", "--bs", "2", "2", "--demands", d, "--out", o]);
    bsht(&["graph", pre.to_str().unwrap(), "--radius", "0"]);
    Ok(())
}
