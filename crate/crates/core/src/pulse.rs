//! Pulse-level checks: Jaynes-Cummings sidebands, STIRAP, and the six-step compiler.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::{build_step_matrix, BoundaryPhase, BulkParams, Spin, WalkerState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseConfig {
    pub omega0: f64,
    pub delta0: f64,
    pub tau: f64,
    pub integrator_step: f64,
}

impl PulseConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega0", self.omega0),
            ("delta0", self.delta0),
            ("tau", self.tau),
            ("integrator_step", self.integrator_step),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidPulseConfig(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// `(Ω(t), δ(t)) = (Ω₀ sin(πt/τ), δ₀ cos(πt/τ))`
    pub fn schedule(&self, t: f64) -> (f64, f64) {
        let (s, c) = (PI * t / self.tau).sin_cos();
        (self.omega0 * s, self.delta0 * c)
    }

    /// Upper bound of the spectral norm of H(t) in sideband pair `n`.
    pub fn max_norm(&self, n: usize) -> f64 {
        0.5 * (self.delta0.powi(2) + (n as f64 + 1.0) * self.omega0.powi(2)).sqrt()
    }
}

/// H on `(|↓,n⟩, |↑,n+1⟩)` in the frame rotating with the detuning.
pub fn jc_subspace_hamiltonian(n: usize, omega: f64, delta: f64) -> Matrix2<f64> {
    let g = (n as f64 + 1.0).sqrt() * omega / 2.0;
    Matrix2::new(-delta / 2.0, g, g, delta / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StirapResult {
    pub state: Vector2<C64>,
    pub transfer: f64,
}

fn derivative(n: usize, config: &PulseConfig, t: f64, y: &Vector2<C64>) -> Vector2<C64> {
    let (om, de) = config.schedule(t);
    let h = jc_subspace_hamiltonian(n, om, de).map(|x| C64::new(0.0, -x));
    h * y
}

/// RK4 passage from `|↓,n⟩` over `[0, τ]`.
pub fn stirap_evolve(n: usize, config: &PulseConfig) -> Result<StirapResult> {
    config.validate()?;
    let product = config.integrator_step * config.max_norm(n);
    if product >= 0.01 {
        return Err(Error::StepTooCoarse { product });
    }
    let steps = (config.tau / config.integrator_step).ceil() as usize;
    let dt = config.tau / steps as f64;
    let mut y = Vector2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    let half = C64::new(dt / 2.0, 0.0);
    let full = C64::new(dt, 0.0);
    for i in 0..steps {
        let t = i as f64 * dt;
        let k1 = derivative(n, config, t, &y);
        let k2 = derivative(n, config, t + dt / 2.0, &(y + k1 * half));
        let k3 = derivative(n, config, t + dt / 2.0, &(y + k2 * half));
        let k4 = derivative(n, config, t + dt, &(y + k3 * full));
        y += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0);
    }
    Ok(StirapResult {
        state: y,
        transfer: y[1].norm_sqr(),
    })
}

/// max_t |dθ/dt| / √(Ω² + δ²) with tan θ = Ω/δ; infinite if Ω = δ = 0 anywhere.
pub fn adiabaticity_margin(config: &PulseConfig) -> f64 {
    const POINTS: usize = 20_000;
    let h = config.tau / POINTS as f64;
    let theta = |t: f64| {
        let (om, de) = config.schedule(t);
        om.atan2(de)
    };
    let mut worst = 0.0f64;
    for i in 0..=POINTS {
        let t = i as f64 * h;
        let (om, de) = config.schedule(t);
        let gap = (om * om + de * de).sqrt();
        let rate = if i == 0 {
            (theta(t + h) - theta(t)) / h
        } else if i == POINTS {
            (theta(t) - theta(t - h)) / h
        } else {
            (theta(t + h) - theta(t - h)) / (2.0 * h)
        };
        if gap == 0.0 {
            return f64::INFINITY;
        }
        worst = worst.max(rate.abs() / gap);
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Up,
    Down,
    Aux,
}

pub fn ladder_index(n: usize, level: Level) -> usize {
    3 * n
        + match level {
            Level::Up => 0,
            Level::Down => 1,
            Level::Aux => 2,
        }
}

/// Amplitudes over phonon number ⊗ {↑, ↓, a}.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeLevelLadderState {
    n_max: usize,
    amps: DVector<C64>,
}

impl ThreeLevelLadderState {
    pub fn from_walker(state: &WalkerState) -> Self {
        let n_max = state.n_max();
        let mut amps = DVector::zeros(3 * (n_max + 1));
        for n in 0..=n_max {
            amps[ladder_index(n, Level::Up)] = state.amplitude(n, Spin::Up);
            amps[ladder_index(n, Level::Down)] = state.amplitude(n, Spin::Down);
        }
        Self { n_max, amps }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn aux_population(&self) -> f64 {
        (0..=self.n_max).map(|n| self.amps[ladder_index(n, Level::Aux)].norm_sqr()).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    pub fn apply(&self, op: &DMatrix<C64>) -> Self {
        Self {
            n_max: self.n_max,
            amps: op * &self.amps,
        }
    }

    /// Drops the auxiliary level.
    pub fn to_walker(&self) -> Result<WalkerState> {
        let up = (0..=self.n_max).map(|n| self.amps[ladder_index(n, Level::Up)]).collect();
        let down = (0..=self.n_max).map(|n| self.amps[ladder_index(n, Level::Down)]).collect();
        WalkerState::from_amplitudes(up, down)
    }
}

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Rotation `[[c, −s], [s, c]]` on the pair `(first, second)` at every site.
fn pair_rotation(theta: f64, first: Level, second: Level, n_max: usize) -> DMatrix<C64> {
    let dim = 3 * (n_max + 1);
    let mut m = DMatrix::identity(dim, dim);
    let (s, c) = (theta / 2.0).sin_cos();
    for n in 0..=n_max {
        let (i, j) = (ladder_index(n, first), ladder_index(n, second));
        m[(i, i)] = r(c);
        m[(i, j)] = r(-s);
        m[(j, i)] = r(s);
        m[(j, j)] = r(c);
    }
    m
}

/// Red-sideband passage: `|n,↓⟩ → −|n−1,a⟩`, `|0,↓⟩` blocked.
fn red_passage(n_max: usize) -> DMatrix<C64> {
    let dim = 3 * (n_max + 1);
    let mut m = DMatrix::identity(dim, dim);
    for n in 1..=n_max {
        let (d, a) = (ladder_index(n, Level::Down), ladder_index(n - 1, Level::Aux));
        m[(d, d)] = r(0.0);
        m[(a, a)] = r(0.0);
        m[(a, d)] = r(-1.0);
        m[(d, a)] = r(1.0);
    }
    m
}

/// Blue-sideband passage: `|n,↓⟩ → sign·|n+1,↑⟩`, `|0,↑⟩` and `|N,↓⟩` untouched.
fn blue_passage(n_max: usize, sign: f64) -> DMatrix<C64> {
    let dim = 3 * (n_max + 1);
    let mut m = DMatrix::identity(dim, dim);
    for n in 0..n_max {
        let (d, u) = (ladder_index(n, Level::Down), ladder_index(n + 1, Level::Up));
        m[(d, d)] = r(0.0);
        m[(u, u)] = r(0.0);
        m[(u, d)] = r(sign);
        m[(d, u)] = r(-sign);
    }
    m
}

/// The six operators in application order, with the boundary phase folded
/// into the second one.
pub fn six_step_operators(params: BulkParams, phi: BoundaryPhase, n_max: usize, blue_sign: f64) -> Vec<DMatrix<C64>> {
    let mut passage = red_passage(n_max);
    if phi == BoundaryPhase::Pi {
        let i = ladder_index(0, Level::Down);
        let mut z = DMatrix::<C64>::identity(passage.nrows(), passage.ncols());
        z[(i, i)] = r(-1.0);
        passage = z * passage;
    }
    vec![
        pair_rotation(params.theta1, Level::Up, Level::Down, n_max),
        passage,
        pair_rotation(PI, Level::Up, Level::Down, n_max),
        pair_rotation(params.theta2, Level::Down, Level::Aux, n_max),
        blue_passage(n_max, blue_sign),
        pair_rotation(PI, Level::Down, Level::Aux, n_max),
    ]
}

pub fn compile_with_sign(params: BulkParams, phi: BoundaryPhase, n_max: usize, blue_sign: f64) -> Result<DMatrix<C64>> {
    if n_max < 2 {
        return Err(Error::LatticeTooSmall { n_max, required: 2 });
    }
    let ops = six_step_operators(params, phi, n_max, blue_sign);
    let dim = 3 * (n_max + 1);
    Ok(ops.into_iter().fold(DMatrix::identity(dim, dim), |acc, op| op * acc))
}

/// One full laser cycle on the ladder space.
pub fn compile_six_step_cycle(params: BulkParams, phi: BoundaryPhase, n_max: usize) -> Result<DMatrix<C64>> {
    compile_with_sign(params, phi, n_max, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleComparison {
    pub global_phase: C64,
    /// max |cycle − phase · step| on physical rows.
    pub deviation: f64,
    /// Largest auxiliary population reached from a physical input.
    pub leakage: f64,
}

/// Compares physical columns of sites `0..n_max` (the top site is excluded
/// since it carries the truncation closure).
pub fn compare_cycle(cycle: &DMatrix<C64>, params: BulkParams, phi: BoundaryPhase, n_max: usize) -> Result<CycleComparison> {
    let step = build_step_matrix(params, phi, n_max)?;
    let s = step.matrix();
    let cols: Vec<(usize, usize)> = (0..n_max)
        .flat_map(|n| {
            [
                (ladder_index(n, Level::Up), 2 * n),
                (ladder_index(n, Level::Down), 2 * n + 1),
            ]
        })
        .collect();
    let rows: Vec<(usize, usize)> = (0..=n_max)
        .flat_map(|n| {
            [
                (ladder_index(n, Level::Up), 2 * n),
                (ladder_index(n, Level::Down), 2 * n + 1),
            ]
        })
        .collect();

    let (mut best, mut phase) = (0.0, r(1.0));
    for &(lc, sc) in &cols {
        for &(lr, sr) in &rows {
            let x = s[(sr, sc)];
            if x.norm() > best {
                best = x.norm();
                phase = cycle[(lr, lc)] / x;
            }
        }
    }
    let mut deviation = 0.0f64;
    let mut leakage = 0.0f64;
    for &(lc, sc) in &cols {
        for &(lr, sr) in &rows {
            deviation = deviation.max((cycle[(lr, lc)] - phase * s[(sr, sc)]).norm());
        }
        let aux: f64 = (0..=n_max).map(|n| cycle[(ladder_index(n, Level::Aux), lc)].norm_sqr()).sum();
        leakage = leakage.max(aux);
    }
    Ok(CycleComparison {
        global_phase: phase,
        deviation,
        leakage,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleReport {
    pub comparison: CycleComparison,
    pub unitarity_error: f64,
    /// STIRAP transfer for each sideband pair `n = 0..n_max`.
    pub transfers: Vec<f64>,
    /// Worst transfer squared: two passages per cycle.
    pub fidelity_bound: f64,
    pub margin: f64,
    pub adiabatic: bool,
}

pub const MARGIN_LIMIT: f64 = 0.1;
pub const FIDELITY_LIMIT: f64 = 0.9;

pub fn verify_cycle(params: BulkParams, phi: BoundaryPhase, n_max: usize, config: &PulseConfig) -> Result<CycleReport> {
    let cycle = compile_six_step_cycle(params, phi, n_max)?;
    let comparison = compare_cycle(&cycle, params, phi, n_max)?;
    let unitarity_error = unitarity_error(&cycle);
    let transfers = (0..n_max)
        .into_par_iter()
        .map(|n| stirap_evolve(n, config).map(|s| s.transfer))
        .collect::<Result<Vec<_>>>()?;
    let worst = transfers.iter().copied().fold(1.0, f64::min);
    let fidelity_bound = worst * worst;
    let margin = adiabaticity_margin(config);
    Ok(CycleReport {
        comparison,
        unitarity_error,
        transfers,
        fidelity_bound,
        margin,
        adiabatic: margin < MARGIN_LIMIT && fidelity_bound > FIDELITY_LIMIT,
    })
}

pub fn unitarity_error(m: &DMatrix<C64>) -> f64 {
    let p = m.adjoint() * m;
    let mut e = 0.0f64;
    for i in 0..p.nrows() {
        for j in 0..p.ncols() {
            let t = if i == j { 1.0 } else { 0.0 };
            e = e.max((p[(i, j)] - r(t)).norm());
        }
    }
    e
}
