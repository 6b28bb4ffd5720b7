use screen_limits::shell::golden::golden_rows;

fn main() -> screen_limits::Result<()> {
    for row in golden_rows(1.0)? {
        let status = if row.pass() { "ok" } else { "off" };
        println!("{:<4} {:<28} {:>14.6} {:>12}", status, row.id, row.computed, row.expected);
    }
    Ok(())
}
