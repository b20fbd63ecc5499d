use fockwalk::analysis::{edge_eigenmodes_in_frame, edge_population, spin_expectation_x, ModeClass, ObservableRecord};
use fockwalk::lattice::{evolve_in_frame, BoundaryPhase, BulkParams, Spin, WalkerState};
use fockwalk::momentum::{phase_diagram, predict_bound_states, DiagramCell, GridSpec};
use fockwalk::pulse::verify_cycle;
use fockwalk::quench::run_quench;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, Experiment, ModeChoice, SweepAxis, WalkOutput};
use crate::table::{Cell, Table, DIAGRAM, DISTRIBUTION, REPORT, SWEEP, TIMESERIES};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Numeric(#[from] fockwalk::Error),
    #[error("{0}")]
    Invariant(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numeric(_) | RunError::Invariant(_) => 3,
            RunError::Io { .. } => 1,
        }
    }
}

/// A finished experiment. `failures` counts rows that carry an error status.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub table: Table,
    pub failures: usize,
}

fn timeseries(records: &[ObservableRecord]) -> Table {
    let mut t = Table::new("timeseries", TIMESERIES);
    for r in records {
        t.push(vec![
            r.step.into(),
            r.p_edge.into(),
            r.sx0.into(),
            r.sx1.into(),
            r.mean_n.into(),
            r.var_n.into(),
            r.norm.into(),
        ]);
    }
    t
}

fn distribution(state: &WalkerState) -> Table {
    let mut t = Table::new("distribution", DISTRIBUTION);
    for n in 0..=state.n_max() {
        let (a, b) = (state.amplitude(n, Spin::Up), state.amplitude(n, Spin::Down));
        t.push(vec![n.into(), state.population(n).into(), a.re.into(), a.im.into(), b.re.into(), b.im.into()]);
    }
    t
}

pub fn run(experiment: &Experiment) -> Result<Output, RunError> {
    let table = match *experiment {
        Experiment::Walk {
            params,
            phi,
            steps,
            frame,
            output,
        } => {
            let s0 = WalkerState::boundary_down(steps + 2)?;
            let mut records = vec![ObservableRecord::of(&s0)];
            let last = evolve_in_frame(&s0, params, phi, frame, steps, |s| records.push(ObservableRecord::of(s)))?;
            match output {
                WalkOutput::Timeseries => timeseries(&records),
                WalkOutput::Distribution => distribution(&last),
            }
        }
        Experiment::Sweep {
            axis,
            from,
            to,
            points,
            fixed,
            phi,
            steps,
            frame,
        } => {
            let rows: Vec<Vec<Cell>> = (0..points)
                .into_par_iter()
                .map(|i| {
                    let x = if points == 1 {
                        from
                    } else {
                        from + (to - from) * i as f64 / (points - 1) as f64
                    };
                    let params = match axis {
                        SweepAxis::Theta1 => BulkParams::new(x, fixed),
                        SweepAxis::Theta2 => BulkParams::new(fixed, x),
                    };
                    sweep_row(i, params, phi, steps, frame)
                })
                .collect();
            let failures = rows.iter().filter(|r| !matches!(r.last(), Some(Cell::Text(s)) if s == "ok" || s == "transition")).count();
            let mut t = Table::new("sweep", SWEEP);
            rows.into_iter().for_each(|r| t.push(r));
            return Ok(Output { table: t, failures });
        }
        Experiment::Quench { protocol } => timeseries(&run_quench(&protocol)?),
        Experiment::Eigen {
            params,
            phi,
            n_max,
            mode,
            frame,
        } => {
            let want = match mode {
                ModeChoice::Zero => ModeClass::Zero,
                ModeChoice::Pi => ModeClass::Pi,
            };
            let modes = edge_eigenmodes_in_frame(params, phi, n_max, frame)?;
            let m = modes
                .iter()
                .find(|m| m.mode_class == want)
                .ok_or_else(|| RunError::Invariant(format!("no {want:?} mode bound to the left edge")))?;
            distribution(&m.amplitudes)
        }
        Experiment::PulseVerify { params, phi, n_max, pulse } => {
            let r = verify_cycle(params, phi, n_max, &pulse)?;
            let mut t = Table::new("report", REPORT);
            let c = &r.comparison;
            for (k, v) in [
                ("deviation", c.deviation),
                ("leakage", c.leakage),
                ("global_phase_re", c.global_phase.re),
                ("global_phase_im", c.global_phase.im),
                ("unitarity_error", r.unitarity_error),
                ("fidelity_bound", r.fidelity_bound),
                ("margin", r.margin),
            ] {
                t.push(vec![k.into(), v.into()]);
            }
            t.push(vec!["adiabatic".into(), Cell::Int(r.adiabatic.into())]);
            for (n, x) in r.transfers.iter().enumerate() {
                t.push(vec![format!("transfer_{n}").into(), (*x).into()]);
            }
            if c.deviation >= 1e-12 || c.leakage >= 1e-10 || r.unitarity_error >= 1e-12 {
                return Err(RunError::Invariant(format!(
                    "compiled cycle differs from the step matrix: deviation {:e}, leakage {:e}, unitarity {:e}",
                    c.deviation, c.leakage, r.unitarity_error
                )));
            }
            t
        }
        Experiment::PhaseDiagram {
            grid,
            lo,
            hi,
            transition_tol,
        } => {
            let layout = GridSpec {
                transition_tol,
                ..GridSpec::square(grid, lo, hi)
            };
            let mut t = Table::new("diagram", DIAGRAM);
            let mut failures = 0;
            for p in phase_diagram(&layout) {
                let (nu0, nu_pi, status) = match &p.cell {
                    DiagramCell::Phase(l) => (Some(l.nu0), Some(l.nu_pi), "phase".to_string()),
                    DiagramCell::Transition => (None, None, "transition".to_string()),
                    DiagramCell::Unresolved(e) => {
                        failures += 1;
                        (None, None, format!("error: {e}"))
                    }
                };
                t.push(vec![
                    p.params.theta1.into(),
                    p.params.theta2.into(),
                    nu0.into(),
                    nu_pi.into(),
                    p.gaps.delta0.into(),
                    p.gaps.delta_pi.into(),
                    status.into(),
                ]);
            }
            return Ok(Output { table: t, failures });
        }
    };
    Ok(Output { table, failures: 0 })
}

fn sweep_row(i: usize, params: BulkParams, phi: BoundaryPhase, steps: usize, frame: fockwalk::lattice::StepFrame) -> Vec<Cell> {
    let head = vec![i.into(), params.theta1.into(), params.theta2.into(), phi.radians().into()];
    let walked = WalkerState::boundary_down(steps + 2).and_then(|s| evolve_in_frame(&s, params, phi, frame, steps, |_| {}));
    let state = match walked {
        Ok(s) => s,
        Err(e) => {
            let mut row = head;
            row.extend([Cell::Missing, Cell::Missing, Cell::Missing, Cell::Missing, format!("error: {e}").into()]);
            return row;
        }
    };
    let (zero, pi, status) = match predict_bound_states(params, params.theta1, phi) {
        Ok(c) => (Some(c.zero), Some(c.pi), "ok".to_string()),
        Err(fockwalk::Error::GapClosed { .. }) => (None, None, "transition".to_string()),
        Err(e) => (None, None, format!("error: {e}")),
    };
    let mut row = head;
    row.extend([
        edge_population(&state).into(),
        spin_expectation_x(&state, 0).ok().into(),
        zero.into(),
        pi.into(),
        status.into(),
    ]);
    row
}
