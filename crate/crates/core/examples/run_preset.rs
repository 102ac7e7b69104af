//! Run a catalogue preset into a temporary directory and print its manifest.
//!
//! `cargo run --release --example run_preset -- example-9`

use qifs::experiment::{catalogue, preset, run};

fn main() -> qifs::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "example-9".into());
    let p = preset(&name)?;
    let dir = std::env::temp_dir().join(format!("qifs-{}", p.full_name()));
    let m = run(&p.config, &dir)?;
    println!("{} ({} presets available)", p.summary, catalogue().len());
    println!("wrote {:?} to {}", m.artifacts, dir.display());
    println!("{}", serde_json::to_string_pretty(&m.results).expect("results serialize"));
    Ok(())
}
