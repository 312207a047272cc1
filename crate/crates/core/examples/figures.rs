//! Writes every figure panel as CSV into `out/figures` (or the directory given).

use spinwire::cli::{cmd_figures, Panel};

fn main() -> spinwire::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "out/figures".into());
    for path in cmd_figures(&Panel::ALL, dir.as_ref())? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
