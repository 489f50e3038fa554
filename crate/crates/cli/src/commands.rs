use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use serde_json::{json, Value};
use sweep_core::analysis::{
    audit_scenario, bound_check, convergence_study, residual_normal_cone_first_order,
    residual_normal_cone_seeded, AuditConfig, ResidualReport, RESIDUAL_SEED, RESIDUAL_TOL,
};
use sweep_core::dynamics::a_priori_bound;
use sweep_core::io::{parse_scenario, scenario_to_json, write_convergence_table, write_trajectory};
use sweep_core::solver::{reduce_second_to_first, solve, stack_reduced};
use sweep_core::{Quadrature, Scenario, ScenarioError, SolverError};

/// Slack applied to the a-priori envelopes in `run` reports.
const BOUND_SLACK: f64 = 1.05;
const DEFAULT_AUDIT_SEED: u64 = 0xa0d17;

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a scenario, write the trajectory CSV and print a residual/bounds report.
    Run(RunArgs),
    /// Empirical convergence study against a fine-grid reference.
    Study(StudyArgs),
    /// Seeded variation, prox, growth and Lipschitz audits; exits 1 on any violation.
    Audit(AuditArgs),
    /// Write the first-order reduction of a second-order scenario.
    Reduce(ReduceArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Override the number of time steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Override the quadrature rule (`left` or `midpoint`).
    #[arg(long)]
    quadrature: Option<String>,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Number of refinement levels, at least 3.
    #[arg(long)]
    levels: usize,
    #[arg(long)]
    output: PathBuf,
    /// Reference grid is this many times finer than the finest level.
    #[arg(long, default_value_t = 8)]
    reference_factor: usize,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Prox-inequality samples per audited time.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug)]
pub enum Failure {
    /// Bad input, unreadable or unwritable files.
    Validation(String),
    Solver(String),
    /// The audits ran and found violations.
    Violations,
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Violations => 1,
            Failure::Solver(_) => 2,
            Failure::Validation(_) => 3,
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::RefineFactor(_) | SolverError::TooFewLevels(_) => {
                Failure::Validation(e.to_string())
            }
            other => Failure::Solver(other.to_string()),
        }
    }
}

/// `SWEEP_SEED` overrides every sampling seed.
fn seed_override() -> Result<Option<u64>, Failure> {
    match std::env::var("SWEEP_SEED") {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| {
            Failure::Validation(format!("SWEEP_SEED must be an unsigned integer, got `{s}`"))
        }),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Failure::Validation(format!("SWEEP_SEED: {e}"))),
    }
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    Ok(parse_scenario(path)?)
}

fn print_json(v: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("json values serialize")
    );
}

fn residual_json(r: &ResidualReport) -> Value {
    json!({
        "tolerance": RESIDUAL_TOL,
        "max_violation": r.max_violation,
        "max_residual_norm": r.steps.iter().map(|s| s.residual_norm).fold(0.0, f64::max),
        "flagged_steps": r.flagged_steps,
        "passed": r.passed(),
    })
}

pub fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Run(a) => run(a),
        Command::Study(a) => study(a),
        Command::Audit(a) => audit(a),
        Command::Reduce(a) => reduce(a),
    }
}

fn run(a: RunArgs) -> Result<(), Failure> {
    let seed = seed_override()?.unwrap_or(RESIDUAL_SEED);
    let mut sc = load(&a.scenario)?;
    if let Some(steps) = a.steps {
        if steps == 0 {
            return Err(Failure::Validation("--steps must be positive".into()));
        }
        sc = sc.with_steps(steps);
    }
    if let Some(q) = &a.quadrature {
        let q = Quadrature::from_name(q).ok_or_else(|| {
            Failure::Validation(format!(
                "unknown quadrature `{q}`, expected `left` or `midpoint`"
            ))
        })?;
        sc = sc.with_quadrature(q);
    }
    let traj = solve(&sc)?;
    write_trajectory(&traj, &a.output)?;

    let (residual, first, stacked) = match &sc {
        Scenario::Second(s) => (
            residual_normal_cone_seeded(&traj, s, RESIDUAL_TOL, seed)?,
            reduce_second_to_first(s),
            stack_reduced(&traj).expect("second-order trajectory has positions"),
        ),
        Scenario::First(s) => (
            residual_normal_cone_first_order(&traj, s, RESIDUAL_TOL, seed)?,
            s.clone(),
            traj.clone(),
        ),
    };
    let bounds = a_priori_bound(&first);
    let check = bound_check(&stacked, &bounds, &first, BOUND_SLACK)?;
    print_json(&json!({
        "order": sc.order(),
        "steps": sc.grid().steps(),
        "step_size": sc.grid().step_size(),
        "quadrature": sc.quadrature().name(),
        "output": a.output.display().to_string(),
        "residual": residual_json(&residual),
        "bounds": {
            "l": bounds.l,
            "beta_at_zero": bounds.summary().beta_at_zero,
            "slack": BOUND_SLACK,
            "worst_force_margin": check.worst_force_margin,
            "worst_velocity_margin": check.worst_velocity_margin,
            "passed": check.passed,
        },
    }));
    Ok(())
}

fn study(a: StudyArgs) -> Result<(), Failure> {
    let sc = load(&a.scenario)?;
    let table = convergence_study(&sc, a.levels, a.reference_factor)?;
    write_convergence_table(&table, &a.output)?;
    print_json(&json!({
        "reference_steps": table.reference_steps,
        "levels": table.rows.len(),
        "min_order": table.min_order(),
        "all_exact": table.all_exact(),
        "errors_monotone": table.errors_monotone(1e-9),
        "output": a.output.display().to_string(),
    }));
    Ok(())
}

fn audit(a: AuditArgs) -> Result<(), Failure> {
    let seed = seed_override()?.unwrap_or(DEFAULT_AUDIT_SEED);
    let sc = load(&a.scenario)?;
    let mut config = AuditConfig::default();
    if let Some(n) = a.samples {
        config.prox_samples = n;
    }
    let summary = audit_scenario(&sc, &config, seed);
    print_json(&serde_json::to_value(&summary).expect("audit summary serializes"));
    if summary.passed {
        Ok(())
    } else {
        for p in summary.prox.iter().filter(|p| p.violation_count > 0) {
            eprintln!(
                "prox inequality violated {} times at t={} (declared r={})",
                p.violation_count, p.t, p.prox_radius
            );
        }
        if !summary.variation.passed {
            eprintln!("variation ratio {} exceeds 1", summary.variation.ratio);
        }
        if summary.growth.violation_count > 0 {
            eprintln!(
                "growth envelope exceeded at {} samples",
                summary.growth.violation_count
            );
        }
        Err(Failure::Violations)
    }
}

fn reduce(a: ReduceArgs) -> Result<(), Failure> {
    let sc = load(&a.scenario)?;
    let Scenario::Second(s) = &sc else {
        return Err(Failure::Validation(
            "reduce expects an order-2 scenario".into(),
        ));
    };
    let reduced: Scenario = reduce_second_to_first(s).into();
    std::fs::write(&a.output, scenario_to_json(&reduced))
        .map_err(|e| Failure::Validation(format!("cannot write {}: {e}", a.output.display())))?;
    Ok(())
}
