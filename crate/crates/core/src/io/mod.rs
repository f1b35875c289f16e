//! File formats and synthetic scenario generation.

mod generate;
mod instance;
mod matrix;
mod report_files;
mod solution_file;

pub use generate::{generate, oracle_instance, GeneratorConfig, Profile, WindowStyle};
pub use instance::{instance_from_json, instance_hash, instance_to_json, load_instance, save_instance, INSTANCE_SCHEMA};
pub use matrix::{read_matrix_csv, write_matrix_csv};
pub use report_files::{
    costs_csv, fleet_csv, performance_csv, report_json, timeline_csv, write_report_csvs, write_timeline_csv,
};
pub use solution_file::{load_solution, parse_solution, save_solution, solution_to_text, SolutionFile, SOLUTION_FORMAT};
