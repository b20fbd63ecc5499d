//! Walker state on the truncated half-line and the boundary-aware Floquet step.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Population allowed on the top two sites before a step is refused.
pub const GUARD_TOL: f64 = 1e-8;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Coin angles in radians. Stored as given, never wrapped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkParams {
    pub theta1: f64,
    pub theta2: f64,
}

impl BulkParams {
    pub const fn new(theta1: f64, theta2: f64) -> Self {
        Self { theta1, theta2 }
    }
}

/// Phase picked up by the blocked component at the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BoundaryPhase {
    #[default]
    Zero,
    Pi,
}

impl BoundaryPhase {
    pub fn radians(self) -> f64 {
        match self {
            BoundaryPhase::Zero => 0.0,
            BoundaryPhase::Pi => std::f64::consts::PI,
        }
    }

    /// e^{iφ}, which is real for both admissible values.
    pub fn factor(self) -> f64 {
        match self {
            BoundaryPhase::Zero => 1.0,
            BoundaryPhase::Pi => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            BoundaryPhase::Zero => BoundaryPhase::Pi,
            BoundaryPhase::Pi => BoundaryPhase::Zero,
        }
    }

    /// Accepts 0 or π modulo 2π, within `tol`.
    pub fn from_radians(phi: f64, tol: f64) -> Option<Self> {
        let r = phi.rem_euclid(2.0 * std::f64::consts::PI);
        let pi = std::f64::consts::PI;
        if r < tol || 2.0 * pi - r < tol {
            Some(BoundaryPhase::Zero)
        } else if (r - pi).abs() < tol {
            Some(BoundaryPhase::Pi)
        } else {
            None
        }
    }
}

/// Where the first coin sits inside one period.
///
/// `Standard` applies `S₊R(θ₂)S₋R(θ₁)`. `Symmetric` splits the first coin into
/// two halves around the shifts, `R(θ₁/2)S₊R(θ₂)S₋R(θ₁/2)`, a unitarily
/// equivalent chiral-symmetric frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum StepFrame {
    #[default]
    Standard,
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

/// Amplitudes `(a_n, b_n)` for sites `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState {
    up: Vec<C64>,
    down: Vec<C64>,
    step_count: usize,
}

impl WalkerState {
    /// All-zero state; only useful as a scratch buffer.
    pub fn zeros(n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::LatticeTooSmall { n_max, required: 2 });
        }
        Ok(Self {
            up: vec![ZERO; n_max + 1],
            down: vec![ZERO; n_max + 1],
            step_count: 0,
        })
    }

    pub fn basis(n_max: usize, site: usize, spin: Spin) -> Result<Self> {
        let mut s = Self::zeros(n_max)?;
        if site > n_max {
            return Err(Error::SiteOutOfRange { site, n_max });
        }
        match spin {
            Spin::Up => s.up[site] = C64::new(1.0, 0.0),
            Spin::Down => s.down[site] = C64::new(1.0, 0.0),
        }
        Ok(s)
    }

    /// |0,↓⟩, the initial state of every experiment.
    pub fn boundary_down(n_max: usize) -> Result<Self> {
        Self::basis(n_max, 0, Spin::Down)
    }

    pub fn from_amplitudes(up: Vec<C64>, down: Vec<C64>) -> Result<Self> {
        if up.len() != down.len() {
            return Err(Error::ShapeMismatch {
                up: up.len(),
                down: down.len(),
            });
        }
        if up.len() < 3 {
            return Err(Error::LatticeTooSmall {
                n_max: up.len().saturating_sub(1),
                required: 2,
            });
        }
        Ok(Self {
            up,
            down,
            step_count: 0,
        })
    }

    pub fn n_max(&self) -> usize {
        self.up.len() - 1
    }

    pub fn up(&self) -> &[C64] {
        &self.up
    }

    pub fn down(&self) -> &[C64] {
        &self.down
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn amplitude(&self, site: usize, spin: Spin) -> C64 {
        match spin {
            Spin::Up => self.up[site],
            Spin::Down => self.down[site],
        }
    }

    pub fn population(&self, site: usize) -> f64 {
        self.up[site].norm_sqr() + self.down[site].norm_sqr()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.up.len()).map(|n| self.population(n)).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.up
            .iter()
            .chain(self.down.iter())
            .map(|z| z.norm_sqr())
            .sum()
    }

    pub fn max_imag(&self) -> f64 {
        self.up
            .iter()
            .chain(self.down.iter())
            .map(|z| z.im.abs())
            .fold(0.0, f64::max)
    }

    /// Population on sites `n_max - 1` and `n_max`.
    pub fn guard_population(&self) -> f64 {
        let n = self.n_max();
        self.population(n - 1) + self.population(n)
    }

    /// Interleaved `(a_0, b_0, a_1, b_1, ...)`, the `StepMatrix` basis order.
    pub fn to_vector(&self) -> Vec<C64> {
        self.up
            .iter()
            .zip(&self.down)
            .flat_map(|(a, b)| [*a, *b])
            .collect()
    }

    pub fn from_vector(v: &[C64]) -> Result<Self> {
        let up = v.iter().step_by(2).copied().collect();
        let down = v.iter().skip(1).step_by(2).copied().collect();
        Self::from_amplitudes(up, down)
    }

    pub fn inner(&self, other: &WalkerState) -> C64 {
        self.up
            .iter()
            .zip(&other.up)
            .chain(self.down.iter().zip(&other.down))
            .map(|(x, y)| x.conj() * y)
            .sum()
    }

    fn check_guard_band(&self) -> Result<()> {
        let p = self.guard_population();
        if p >= GUARD_TOL {
            return Err(Error::GuardBandViolation {
                n_max: self.n_max(),
                population: p,
            });
        }
        Ok(())
    }

    /// In-place coin on every site.
    pub fn rotate(&mut self, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        for (a, b) in self.up.iter_mut().zip(self.down.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = x * c - y * s;
            *b = x * s + y * c;
        }
    }

    // Everything between the two coins plus the second coin: block |0,↓⟩,
    // shift ↓ left, coin θ₂, shift ↑ right, re-inject the blocked amplitude.
    fn transport(&mut self, theta2: f64, phi: BoundaryPhase) {
        let last = self.up.len() - 1;
        let blocked = self.down[0];
        for n in 0..last {
            self.down[n] = -self.down[n + 1];
        }
        self.down[last] = ZERO;
        self.rotate(theta2);
        for n in (1..=last).rev() {
            self.up[n] = -self.up[n - 1];
        }
        self.up[0] = blocked * phi.factor();
    }

    /// One Floquet period in place.
    pub fn step(&mut self, params: BulkParams, phi: BoundaryPhase, frame: StepFrame) -> Result<()> {
        self.check_guard_band()?;
        match frame {
            StepFrame::Standard => {
                self.rotate(params.theta1);
                self.transport(params.theta2, phi);
            }
            StepFrame::Symmetric => {
                self.rotate(params.theta1 / 2.0);
                self.transport(params.theta2, phi);
                self.rotate(params.theta1 / 2.0);
            }
        }
        self.step_count += 1;
        Ok(())
    }

    /// σ_z on one site.
    pub fn kick(&mut self, site: usize) -> Result<()> {
        if site > self.n_max() {
            return Err(Error::SiteOutOfRange {
                site,
                n_max: self.n_max(),
            });
        }
        self.down[site] = -self.down[site];
        Ok(())
    }
}

pub fn coin_rotation(state: &WalkerState, theta: f64) -> WalkerState {
    let mut s = state.clone();
    s.rotate(theta);
    s
}

pub fn floquet_step(state: &WalkerState, params: BulkParams, phi: BoundaryPhase) -> Result<WalkerState> {
    let mut s = state.clone();
    s.step(params, phi, StepFrame::Standard)?;
    Ok(s)
}

pub fn symmetric_step(state: &WalkerState, params: BulkParams, phi: BoundaryPhase) -> Result<WalkerState> {
    let mut s = state.clone();
    s.step(params, phi, StepFrame::Symmetric)?;
    Ok(s)
}

pub fn sigma_z_kick(state: &WalkerState, site: usize) -> Result<WalkerState> {
    let mut s = state.clone();
    s.kick(site)?;
    Ok(s)
}

/// Applies `steps` standard-frame steps, calling `recorder` after each one.
pub fn evolve<F>(
    state: &WalkerState,
    params: BulkParams,
    phi: BoundaryPhase,
    steps: usize,
    recorder: F,
) -> Result<WalkerState>
where
    F: FnMut(&WalkerState),
{
    evolve_in_frame(state, params, phi, StepFrame::Standard, steps, recorder)
}

pub fn evolve_in_frame<F>(
    state: &WalkerState,
    params: BulkParams,
    phi: BoundaryPhase,
    frame: StepFrame,
    steps: usize,
    mut recorder: F,
) -> Result<WalkerState>
where
    F: FnMut(&WalkerState),
{
    let mut s = state.clone();
    for _ in 0..steps {
        s.step(params, phi, frame)?;
        recorder(&s);
    }
    Ok(s)
}

/// Row/column of `(site, spin)` in the interleaved basis.
pub fn basis_index(site: usize, spin: Spin) -> usize {
    2 * site
        + match spin {
            Spin::Up => 0,
            Spin::Down => 1,
        }
}

/// Dense one-period operator on the truncated lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct StepMatrix {
    n_max: usize,
    matrix: DMatrix<C64>,
}

impl StepMatrix {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn apply(&self, state: &WalkerState) -> WalkerState {
        let v = nalgebra::DVector::from_vec(state.to_vector());
        let out = &self.matrix * v;
        let mut s = WalkerState::from_vector(out.as_slice()).expect("dimension preserved");
        s.step_count = state.step_count + 1;
        s
    }

    /// max |(U†U - I)_ij|
    pub fn unitarity_error(&self) -> f64 {
        let p = self.matrix.adjoint() * &self.matrix;
        let mut e = 0.0f64;
        for i in 0..p.nrows() {
            for j in 0..p.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                e = e.max((p[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        e
    }
}

/// Coin on every site as a dense block-diagonal matrix.
pub fn coin_matrix(theta: f64, n_max: usize) -> DMatrix<C64> {
    let (s, c) = (theta / 2.0).sin_cos();
    let dim = 2 * (n_max + 1);
    let mut m = DMatrix::zeros(dim, dim);
    for n in 0..=n_max {
        let (u, d) = (basis_index(n, Spin::Up), basis_index(n, Spin::Down));
        m[(u, u)] = C64::new(c, 0.0);
        m[(u, d)] = C64::new(-s, 0.0);
        m[(d, u)] = C64::new(s, 0.0);
        m[(d, d)] = C64::new(c, 0.0);
    }
    m
}

/// Link operator applied after the first coin.
///
/// Each bond `(n, n+1)` carries `-(cos(θ₂/2) S + sin(θ₂/2) C)`: the uncut part `S`
/// moves ↑ from n to n+1 and ↓ from n+1 to n, the cut part `C` reflects
/// with a spin flip. The boundary adds `e^{iφ}|0,↑⟩⟨0,↓|`; the top site is
/// closed with a mirrored cut link `|N,↓⟩⟨N,↑|`.
fn link_matrix(theta2: f64, phi: BoundaryPhase, n_max: usize) -> DMatrix<C64> {
    let (s2, c2) = (theta2 / 2.0).sin_cos();
    let dim = 2 * (n_max + 1);
    let mut m = DMatrix::zeros(dim, dim);
    let r = |x: f64| C64::new(x, 0.0);
    for n in 0..n_max {
        let up_n = basis_index(n, Spin::Up);
        let dn_n = basis_index(n, Spin::Down);
        let up_next = basis_index(n + 1, Spin::Up);
        let dn_next = basis_index(n + 1, Spin::Down);
        // uncut
        m[(up_next, up_n)] = r(-c2);
        m[(dn_n, dn_next)] = r(-c2);
        // cut
        m[(dn_n, up_n)] = r(s2);
        m[(up_next, dn_next)] = r(-s2);
    }
    m[(basis_index(0, Spin::Up), basis_index(0, Spin::Down))] = r(phi.factor());
    m[(basis_index(n_max, Spin::Down), basis_index(n_max, Spin::Up))] = r(1.0);
    m
}

pub fn build_step_matrix(params: BulkParams, phi: BoundaryPhase, n_max: usize) -> Result<StepMatrix> {
    build_step_matrix_in_frame(params, phi, n_max, StepFrame::Standard)
}

pub fn build_step_matrix_in_frame(
    params: BulkParams,
    phi: BoundaryPhase,
    n_max: usize,
    frame: StepFrame,
) -> Result<StepMatrix> {
    if n_max < 2 {
        return Err(Error::LatticeTooSmall { n_max, required: 2 });
    }
    let standard = link_matrix(params.theta2, phi, n_max) * coin_matrix(params.theta1, n_max);
    let matrix = match frame {
        StepFrame::Standard => standard,
        StepFrame::Symmetric => {
            let half = params.theta1 / 2.0;
            coin_matrix(half, n_max) * standard * coin_matrix(-half, n_max)
        }
    };
    Ok(StepMatrix { n_max, matrix })
}
