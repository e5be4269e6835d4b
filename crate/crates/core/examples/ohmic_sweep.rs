//! Cutoff sweep for an Ohmic bath: full, RWA and SA measures plus the CPT
//! check, written as CSV to stdout.
//!
//! cargo run --release --example ohmic_sweep

use spinboson::toolcli::{parse_config, run_sweep};

const CONFIG: &str = r#"
family = "ohmic"
range = [0.5, 10.0]
points = 5
alpha = 0.01
horizon = 10.0
cpt_times = 20
"#;

fn main() -> spinboson::Result<()> {
    let spec = parse_config(CONFIG)?;
    let table = run_sweep(&spec)?;
    table.write_csv(std::io::stdout().lock())?;
    Ok(())
}
