//! Sudden and ramped quenches, the survival catalog and Landau-Zener fits.

use rayon::prelude::*;
use std::f64::consts::PI;

use crate::analysis::{stabilized_value, ObservableRecord, DEFAULT_STABLE_TOL, DEFAULT_WINDOW};
use crate::error::{Error, Result};
use crate::lattice::{BoundaryPhase, BulkParams, StepFrame, WalkerState};
use crate::momentum::{predict_bound_states, quasienergy_gaps, virtual_bulk_params, Channels};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchProtocol {
    pub initial: BulkParams,
    pub final_params: BulkParams,
    pub phi_initial: BoundaryPhase,
    pub phi_final: BoundaryPhase,
    /// Steps with the initial parameters.
    pub n0: usize,
    /// Ramp length; 1 is a sudden quench.
    pub nq: usize,
    pub total_steps: usize,
    /// σ_z site applied right after step `n0`.
    pub kick: Option<usize>,
    pub frame: StepFrame,
}

impl QuenchProtocol {
    /// Sudden quench of the real bulk at φ = 0, followed by `after` steps
    /// at the final parameters.
    pub fn sudden(initial: BulkParams, final_params: BulkParams, n0: usize, after: usize) -> Self {
        Self::ramp(initial, final_params, n0, 1, after)
    }

    pub fn ramp(initial: BulkParams, final_params: BulkParams, n0: usize, nq: usize, after: usize) -> Self {
        Self {
            initial,
            final_params,
            phi_initial: BoundaryPhase::Zero,
            phi_final: BoundaryPhase::Zero,
            n0,
            nq,
            total_steps: n0 + nq - 1 + after,
            kick: None,
            frame: StepFrame::Symmetric,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n0 < 1 {
            return Err(Error::InvalidProtocol("n0 must be at least 1".into()));
        }
        if self.nq < 1 {
            return Err(Error::InvalidProtocol("nq must be at least 1".into()));
        }
        if self.total_steps < self.n0 + self.nq {
            return Err(Error::InvalidProtocol(format!(
                "total_steps {} shorter than n0 + nq = {}",
                self.total_steps,
                self.n0 + self.nq
            )));
        }
        Ok(())
    }

    /// Last step that still uses ramp parameters.
    pub fn ramp_end(&self) -> usize {
        self.n0 + self.nq
    }
}

/// Parameters of step `t` (1-based; `t = 0` reports the initial values).
///
/// Steps up to `n0` use the initial angles, step `n0 + j` uses the fraction
/// `j / nq` of the way to the final angles, later steps the final ones.
pub fn ramp_schedule(protocol: &QuenchProtocol, t: usize) -> (BulkParams, BoundaryPhase) {
    if t <= protocol.n0 {
        return (protocol.initial, protocol.phi_initial);
    }
    let f = ((t - protocol.n0) as f64 / protocol.nq as f64).min(1.0);
    let (i, e) = (protocol.initial, protocol.final_params);
    let p = if f >= 1.0 {
        e
    } else {
        BulkParams::new(
            i.theta1 + (e.theta1 - i.theta1) * f,
            i.theta2 + (e.theta2 - i.theta2) * f,
        )
    };
    (p, protocol.phi_final)
}

pub fn virtual_bulk_at(protocol: &QuenchProtocol, t: usize) -> BulkParams {
    let (p, phi) = ramp_schedule(protocol, t);
    virtual_bulk_params(p.theta1, phi)
}

/// Evolves `|0,↓⟩` and records observables for steps `0..=total_steps`.
pub fn run_quench(protocol: &QuenchProtocol) -> Result<Vec<ObservableRecord>> {
    run_quench_with(protocol, |_| {})
}

/// Like [`run_quench`], also handing each post-step state to `inspect`.
pub fn run_quench_with<F>(protocol: &QuenchProtocol, mut inspect: F) -> Result<Vec<ObservableRecord>>
where
    F: FnMut(&WalkerState),
{
    protocol.validate()?;
    let mut state = WalkerState::boundary_down(protocol.total_steps + 2)?;
    let mut out = Vec::with_capacity(protocol.total_steps + 1);
    out.push(ObservableRecord::of(&state));
    for t in 1..=protocol.total_steps {
        let (p, phi) = ramp_schedule(protocol, t);
        state.step(p, phi, protocol.frame)?;
        if t == protocol.n0 {
            if let Some(site) = protocol.kick {
                state.kick(site)?;
            }
        }
        inspect(&state);
        out.push(ObservableRecord::of(&state));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Survive,
    Die,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Start and target `ν₀ν_π` labels, e.g. `10-to-01`.
    pub name: &'static str,
    pub initial: BulkParams,
    pub final_params: BulkParams,
    pub phi_initial: BoundaryPhase,
    pub phi_final: BoundaryPhase,
    pub kick: bool,
    pub expect: Outcome,
}

impl Scenario {
    fn real(name: &'static str, i: (f64, f64), f: (f64, f64), expect: Outcome) -> Self {
        Self {
            name,
            initial: BulkParams::new(i.0, i.1),
            final_params: BulkParams::new(f.0, f.1),
            phi_initial: BoundaryPhase::Zero,
            phi_final: BoundaryPhase::Zero,
            kick: false,
            expect,
        }
    }

    fn virtual_quench(name: &'static str, p: (f64, f64), expect: Outcome) -> Self {
        Self {
            phi_final: BoundaryPhase::Pi,
            ..Self::real(name, p, p, expect)
        }
    }

    pub fn protocol(&self, n0: usize, nq: usize, after: usize) -> QuenchProtocol {
        QuenchProtocol {
            phi_initial: self.phi_initial,
            phi_final: self.phi_final,
            kick: self.kick.then_some(0),
            ..QuenchProtocol::ramp(self.initial, self.final_params, n0, nq, after)
        }
    }
}

/// Every quench experiment with its expected fate.
pub fn survival_catalog() -> Vec<Scenario> {
    use Outcome::{Die, Survive};
    let q = PI / 4.0;
    let s = (3.0 * q, q);
    let t = (-PI / 8.0, q);
    let z = (0.0, -q);
    let mut kicked = Scenario::real("10-to-01-kicked", s, (-3.0 * q, q), Survive);
    kicked.kick = true;
    vec![
        Scenario::real("10-to-10", s, (PI / 2.0, q), Survive),
        Scenario::real("10-to-11", s, (PI / 8.0, q), Survive),
        Scenario::real("10-to-01", s, (-3.0 * q, q), Die),
        Scenario::real("10-to-11-b", s, (0.0, q), Survive),
        Scenario::real("11-to-11", t, (PI / 8.0, q), Survive),
        Scenario::real("11-to-00", t, (-PI / 8.0, -q), Die),
        Scenario::real("11-to-01", t, (-PI / 2.0, q), Survive),
        Scenario::real("11-to-10", t, (PI / 2.0, q), Survive),
        Scenario::real("00-to-00", z, (0.0, -PI / 8.0), Die),
        Scenario::real("00-to-10", z, (PI / 2.0, -q), Die),
        Scenario::real("00-to-01", z, (-PI / 2.0, -q), Die),
        Scenario::real("00-to-11", z, (0.0, q), Die),
        Scenario::virtual_quench("10-phi-flip", s, Survive),
        Scenario::virtual_quench("01-phi-flip", (-3.0 * q, q), Survive),
        Scenario::virtual_quench("11-phi-flip", t, Die),
        Scenario::virtual_quench("11-phi-flip-b", (0.0, q), Die),
        kicked,
    ]
}

/// Ramp scenarios for the Landau-Zener study.
pub fn ramp_catalog() -> Vec<Scenario> {
    let q = PI / 4.0;
    vec![
        Scenario::real("ramp-10-to-11", (3.0 * q, q), (PI / 8.0, q), Outcome::Survive),
        Scenario::real("ramp-11-to-10", (PI / 8.0, q), (3.0 * q, q), Outcome::Survive),
    ]
}

/// σ_x eigenvalues carried by the bound states: `(+1 present, −1 present)`.
///
/// At φ = 0 the zero mode sits at ⟨σ_x⟩₀ = +1 and the pi mode at −1; φ = π swaps them.
pub fn polarizations(channels: Channels, phi: BoundaryPhase) -> (bool, bool) {
    match phi {
        BoundaryPhase::Zero => (channels.zero, channels.pi),
        BoundaryPhase::Pi => (channels.pi, channels.zero),
    }
}

/// Survival rule: the bound state before the quench (after an optional
/// σ_z kick) must share a polarization with one after it.
pub fn predicted_outcome(s: &Scenario) -> Result<Outcome> {
    let before = predict_bound_states(s.initial, s.initial.theta1, s.phi_initial)?;
    let after = predict_bound_states(s.final_params, s.final_params.theta1, s.phi_final)?;
    let (mut plus, mut minus) = polarizations(before, s.phi_initial);
    if s.kick {
        std::mem::swap(&mut plus, &mut minus);
    }
    let (p2, m2) = polarizations(after, s.phi_final);
    Ok(if (plus && p2) || (minus && m2) {
        Outcome::Survive
    } else {
        Outcome::Die
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LZPoint {
    pub nq: usize,
    pub p_inf: f64,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LZFit {
    pub beta: f64,
    pub amplitude: f64,
    pub r_squared: f64,
    /// Gap at E = π of the final parameters.
    pub delta_pi: f64,
    /// Stabilized P_edge just before the quench.
    pub p_pre: f64,
    pub points: Vec<LZPoint>,
}

pub const LZ_N0: usize = 20;
pub const LZ_AFTER: usize = 100;
const LOSS_FLOOR: f64 = 1e-3;

/// Mean over the last `DEFAULT_WINDOW` values, preferring a detected plateau.
fn plateau(series: &[f64]) -> f64 {
    stabilized_value(series, DEFAULT_WINDOW, DEFAULT_STABLE_TOL).unwrap_or_else(|| {
        let tail = &series[series.len().saturating_sub(DEFAULT_WINDOW)..];
        tail.iter().sum::<f64>() / tail.len() as f64
    })
}

/// Pre-quench plateau and the post-ramp plateau for each ramp length.
pub fn landau_zener_sweep(scenario: &Scenario, nqs: &[usize], n0: usize, after: usize) -> Result<(f64, Vec<LZPoint>)> {
    let runs: Vec<Result<(f64, f64)>> = nqs
        .par_iter()
        .map(|&nq| {
            let p = scenario.protocol(n0, nq, after);
            let rec = run_quench(&p)?;
            let series: Vec<f64> = rec.iter().map(|r| r.p_edge).collect();
            let pre = plateau(&series[1..=n0]);
            let post = plateau(&series[p.ramp_end()..]);
            Ok((pre, post))
        })
        .collect();
    let mut p_pre = f64::NAN;
    let mut points = Vec::with_capacity(nqs.len());
    for (&nq, r) in nqs.iter().zip(runs) {
        let (pre, post) = r?;
        p_pre = pre;
        points.push(LZPoint {
            nq,
            p_inf: post,
            loss: 1.0 - post / pre,
        });
    }
    Ok((p_pre, points))
}

/// Fits `loss(N_q) = A e^{−β N_q}` over ramp lengths with loss above the floor.
pub fn landau_zener_fit(scenario: &Scenario, nqs: &[usize]) -> Result<LZFit> {
    let mut distinct = nqs.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 5 {
        return Err(Error::InvalidProtocol("need at least 5 distinct ramp lengths".into()));
    }
    let (p_pre, points) = landau_zener_sweep(scenario, nqs, LZ_N0, LZ_AFTER)?;
    let usable: Vec<&LZPoint> = points.iter().filter(|p| p.loss > LOSS_FLOOR).collect();
    if usable.len() < 2 {
        return Err(Error::InsufficientLoss);
    }
    let xs: Vec<f64> = usable.iter().map(|p| p.nq as f64).collect();
    let ys: Vec<f64> = usable.iter().map(|p| p.loss.ln()).collect();
    let (coef, r_squared) = crate::analysis::polyfit(&xs, &ys, 1);
    Ok(LZFit {
        beta: -coef[1],
        amplitude: coef[0].exp(),
        r_squared,
        delta_pi: quasienergy_gaps(scenario.final_params).delta_pi,
        p_pre,
        points,
    })
}
