use std::path::PathBuf;

use screen_limits::shell::figure_panels;

fn main() -> screen_limits::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("figures"));
    let manifest = figure_panels(&out, 2000, 20240601)?;
    for panel in &manifest.panels {
        println!("{} rows={}", out.join(&panel.file).display(), panel.rows);
    }
    Ok(())
}
