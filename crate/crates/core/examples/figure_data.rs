//! Writes the fig4 and fig2a data sets into a directory (default: the
//! current one).
//!
//! cargo run --release --example figure_data -- out/

use std::path::PathBuf;

use spinboson::toolcli::{emit_figure_data, FigureOptions, FigureTag};

fn main() -> spinboson::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&dir)?;
    let opts = FigureOptions::default();
    for tag in [FigureTag::Fig4, FigureTag::Fig2a] {
        for path in emit_figure_data(tag, &opts, &dir.join(format!("{tag}.csv")))? {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
