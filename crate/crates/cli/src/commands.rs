use std::fmt::Write as _;

use rigidcol::bound::{evaluate, scan, threshold_search, BoundReport};
use rigidcol::graph::{count_proper, count_rigid, mc_first_moment, parse_graph, sample_graph};
use rigidcol::model::ModelParams;
use rigidcol::solver::{SolverConfig, YBox};
use rigidcol::spread::{PhiTwoMode, SpreadSystem};
use rigidcol::Error;

use crate::record::{format_real, OutputRecord};
use crate::{Command, Failure, SolverArgs};

/// Densities accepted by `bound`; wider than the analytic working range.
pub const BOUND_C_RANGE: (f64, f64) = (2.30, 2.60);

pub const SCAN_HEADER: &str = "c,phi0,phi1,phi2,f_value,log_f";
pub const GRID_HEADER: &str = "y0,y1,K0,K1";

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            tol_residual: self.residual_tol,
            method: self.method.into(),
            phi_two: if self.unit_total {
                PhiTwoMode::Unit
            } else {
                PhiTwoMode::Truncated
            },
            ..SolverConfig::default()
        }
    }
}

fn emit(records: &[OutputRecord], json: bool) -> String {
    let mut out = String::new();
    for (k, r) in records.iter().enumerate() {
        if json {
            out.push_str(&r.to_json());
            out.push('\n');
        } else {
            if k > 0 {
                out.push('\n');
            }
            out.push_str(&r.to_text());
        }
    }
    out
}

fn bound_record(r: &BoundReport) -> OutputRecord {
    OutputRecord::new("bound")
        .with("c", r.c)
        .with("x_max", r.x_max)
        .with("phi0", r.phi.get(0))
        .with("phi1", r.phi.get(1))
        .with("phi2", r.phi.get(2))
        .with("residual_norm", r.residual_norm)
        .with("f_value", r.f_value)
        .with("log_f", r.log_f)
}

fn csv_row(values: &[f64]) -> String {
    let cells: Vec<String> = values.iter().map(|&v| format_real(v)).collect();
    cells.join(",")
}

pub fn run(command: Command, json: bool) -> Result<String, Failure> {
    match command {
        Command::Bound { c, solver } => {
            let (lo, hi) = BOUND_C_RANGE;
            if !(c >= lo && c <= hi) {
                return Err(Error::Parameter(format!("--c must lie in [{lo}, {hi}], got {c}")).into());
            }
            let report = evaluate(c, solver.x_max, &solver.config())?;
            Ok(emit(&[bound_record(&report)], json))
        }
        Command::Threshold { tol, solver } => {
            let t = threshold_search(solver.x_max, tol, &solver.config())?;
            let record = OutputRecord::new("threshold")
                .with("c_star", t.c_star)
                .with("bracket_lo", t.bracket.0)
                .with("bracket_hi", t.bracket.1)
                .with("f_lo", t.f_at_bracket.0)
                .with("f_hi", t.f_at_bracket.1)
                .with("tol", tol)
                .with("iterations", t.iterations)
                .with("x_max", t.x_max);
            Ok(emit(&[record], json))
        }
        Command::Scan {
            c_lo,
            c_hi,
            steps,
            grid_mode,
            c,
            solver,
        } => {
            if grid_mode {
                return residual_grid(c, steps, &solver);
            }
            let rows = scan(c_lo, c_hi, steps, solver.x_max, &solver.config())?;
            if json {
                let records: Vec<_> = rows.iter().map(bound_record).collect();
                return Ok(emit(&records, true));
            }
            let mut out = format!("{SCAN_HEADER}\n");
            for r in &rows {
                let phi = r.phi.as_array();
                let _ = writeln!(out, "{}", csv_row(&[r.c, phi[0], phi[1], phi[2], r.f_value, r.log_f]));
            }
            Ok(out)
        }
        Command::Sample { n, m, seed, out } => {
            let g = sample_graph(n, m, seed)?;
            let text = g.to_string();
            match out {
                Some(path) => {
                    std::fs::write(&path, &text)
                        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                    Ok(String::new())
                }
                None => Ok(text),
            }
        }
        Command::RigidCount { path } => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            let g = parse_graph(&text)?;
            let record = OutputRecord::new("rigid_count")
                .with("n", g.n())
                .with("m", g.m())
                .with("proper", count_proper(&g)?)
                .with("rigid", count_rigid(&g)?);
            Ok(emit(&[record], json))
        }
        Command::Mc {
            n,
            m,
            c,
            epsilon,
            x_max,
            samples,
            seed,
        } => {
            if n == 0 {
                return Err(Error::Parameter("--n must be at least 1".into()).into());
            }
            let c = c.unwrap_or(m as f64 / n as f64);
            let params = ModelParams::new(c, x_max, epsilon)?;
            let est = mc_first_moment(n, m, &params, samples, seed)?;
            let record = OutputRecord::new("mc")
                .with("n", n)
                .with("m", m)
                .with("c", c)
                .with("epsilon", epsilon)
                .with("x_max", x_max)
                .with("samples", samples)
                .with("seed", seed)
                .with("estimate", est.estimate)
                .with("stderr", est.stderr)
                .with("in_subspace_fraction", est.in_subspace_fraction);
            Ok(emit(&[record], json))
        }
    }
}

fn residual_grid(c: f64, steps: usize, solver: &SolverArgs) -> Result<String, Failure> {
    if steps < 1 {
        return Err(Error::Parameter("--steps must be at least 1".into()).into());
    }
    let params = ModelParams::for_bound(c, solver.x_max)?;
    let system = SpreadSystem::with_mode(params, solver.config().phi_two);
    let ybox = YBox::for_system(&system)?;
    let mut out = format!("{GRID_HEADER}\n");
    for y in ybox.interior_grid(steps) {
        let k = system.rotated_residual(y)?;
        let _ = writeln!(out, "{}", csv_row(&[y.y0, y.y1, k[0], k[1]]));
    }
    Ok(out)
}
