//! Writes a synthetic EM-like test image: `cargo run --example phantom -- out.pgm [size] [seed]`.

use std::env;
use std::process::ExitCode;

use active_sem::codec::save_image;
use active_sem::synth::{em_phantom, PhantomParams};
use active_sem::Image64;

fn main() -> ExitCode {
    let args: Vec<String> = env::args().skip(1).collect();
    let Some(path) = args.first() else {
        eprintln!("usage: phantom OUT.pgm [SIZE] [SEED]");
        return ExitCode::from(1);
    };
    let size = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(256);
    let seed = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0);
    let img: Image64 = match em_phantom(size, size, seed, &PhantomParams::default()) {
        Ok(img) => img,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = save_image(&img, path) {
        eprintln!("{e}");
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
