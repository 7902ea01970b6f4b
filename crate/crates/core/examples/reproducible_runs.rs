//! Drive the command-line interface in-process: generate with a manifest,
//! then replay the manifest and confirm the outputs match byte for byte.

use std::error::Error;

pub fn run() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let out = dir.path().join("run");
    let out = out.to_str().ok_or("non-utf8 temp path")?;
    let code = bter::cli::run([
        "bter",
        "generate",
        "--powerlaw",
        "2000,2.0,40",
        "--seed",
        "99",
        "--threads",
        "2",
        "--out-dir",
        out,
    ]);
    if code != 0 {
        return Err(format!("generate exited with {code}").into());
    }
    let manifest = format!("{out}/manifest.json");
    print!("{}", std::fs::read_to_string(&manifest)?);
    let code = bter::cli::run(["bter", "replay", "--manifest", &manifest, "--threads", "1"]);
    if code != 0 {
        return Err(format!("replay exited with {code}").into());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run()
}
