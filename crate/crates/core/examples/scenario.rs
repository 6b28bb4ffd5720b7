use std::io::Write;

use screen_limits::shell::scenario::{prepare, Scenario};

const TEXT: &str = r#"
name = "two-neighborhoods"
kind = "cohort"

[parameters]
k = 100
m = 3
groups = [
    { label = "A", n = 100000, p = 0.005 },
    { label = "B", n = 100000, p = 0.02 },
]
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut scenario = Scenario::from_toml_str(TEXT)?;
    scenario.set_param("k=50")?;
    let (table, _) = prepare(&scenario)?;
    std::io::stdout().write_all(&table.to_csv())?;
    Ok(())
}
