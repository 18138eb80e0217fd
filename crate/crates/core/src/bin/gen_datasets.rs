//! Regenerates the bundled synthetic survey CSVs.
//!
//! `gen-datasets [OUT_DIR] [--seed N]`, default `crates/core/data`.

use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use wnoc_power::dataset::Dataset;
use wnoc_power::synthetic::{generate_mixer, generate_osc, generate_pa, DEFAULT_SEED};

#[derive(Parser)]
#[command(about = "Write the synthetic PA, oscillator and mixer survey datasets")]
struct Args {
    #[arg(default_value = "crates/core/data")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

fn write<E: wnoc_power::dataset::SurveyRecord>(
    dir: &Path,
    name: &str,
    entries: Vec<E>,
) -> Result<(), Box<dyn std::error::Error>> {
    let path = dir.join(name);
    let ds = Dataset::from_entries(entries, &path).ok_or("generator produced no rows")?;
    ds.write_csv(File::create(&path)?)?;
    println!("wrote {} ({} rows)", path.display(), ds.len());
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let run = || -> Result<(), Box<dyn std::error::Error>> {
        std::fs::create_dir_all(&args.out_dir)?;
        write(&args.out_dir, "pa.csv", generate_pa(args.seed))?;
        write(&args.out_dir, "osc.csv", generate_osc(args.seed))?;
        write(&args.out_dir, "mixer.csv", generate_mixer(args.seed))?;
        Ok(())
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
