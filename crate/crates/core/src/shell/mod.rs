//! Scenario files, dataset emitters and the worked-example registry.

pub mod figures;
pub mod golden;
pub mod scenario;
pub mod table;

pub use figures::{figure_panels, FiguresManifest, PanelSettings};
pub use golden::{worked_examples, GoldenReport, GoldenRow};
pub use scenario::{run_scenario, Kind, RunManifest, Scenario};
pub use table::{Format, Table};
