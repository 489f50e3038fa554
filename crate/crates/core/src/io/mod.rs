//! Scenario files, trajectory CSV and convergence tables.

mod csv_io;
mod scenario_file;

pub use csv_io::{
    convergence_csv, format_f64, parse_trajectory_csv, read_trajectory, trajectory_csv,
    write_convergence_table, write_trajectory,
};
pub use scenario_file::{
    parse_scenario, parse_scenario_str, read_scenario_file, scenario_to_json, write_scenario,
    InitialSpec, PathSpec, PerturbationSpec, ScenarioFile, SetSpec, SolverSpec,
};
