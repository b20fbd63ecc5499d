//! Bulk analytics in momentum space.

use nalgebra::{Matrix2, Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::{BoundaryPhase, BulkParams};

pub type Mat2 = Matrix2<C64>;

/// Default number of k-points for winding integration.
pub const WINDING_GRID: usize = 2048;
/// Both gaps must exceed this for invariants to be defined.
pub const GAP_TOL: f64 = 1e-6;
const AXIS_TOL: f64 = 1e-6;
const ROUNDING_TOL: f64 = 1e-3;
const DEGENERATE_SIN: f64 = 1e-8;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn coin_k(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    Mat2::new(c(co), c(-s), c(s), c(co))
}

/// ↑ hops right: `diag(e^{-ik}, 1)`.
pub fn shift_plus_k(k: f64) -> Mat2 {
    Mat2::new(C64::from_polar(1.0, -k), c(0.0), c(0.0), c(1.0))
}

/// ↓ hops left: `diag(1, e^{ik})`.
pub fn shift_minus_k(k: f64) -> Mat2 {
    Mat2::new(c(1.0), c(0.0), c(0.0), C64::from_polar(1.0, k))
}

/// `S₊(k) R(θ₂) S₋(k) R(θ₁)`
pub fn bulk_unitary_k(params: BulkParams, k: f64) -> Mat2 {
    shift_plus_k(k) * coin_k(params.theta2) * shift_minus_k(k) * coin_k(params.theta1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeFrame {
    /// `R(θ₁/2) S₊ R(θ₂) S₋ R(θ₁/2)`
    F1,
    /// `R(θ₂/2) S₋ R(θ₁) S₊ R(θ₂/2)`
    F2,
}

pub fn time_frame_unitary_k(params: BulkParams, frame: TimeFrame, k: f64) -> Mat2 {
    let (t1, t2) = (params.theta1, params.theta2);
    match frame {
        TimeFrame::F1 => {
            coin_k(t1 / 2.0) * shift_plus_k(k) * coin_k(t2) * shift_minus_k(k) * coin_k(t1 / 2.0)
        }
        TimeFrame::F2 => {
            coin_k(t2 / 2.0) * shift_minus_k(k) * coin_k(t1) * shift_plus_k(k) * coin_k(t2 / 2.0)
        }
    }
}

/// Closed-form `cos E(k)`.
pub fn cos_energy(params: BulkParams, k: f64) -> f64 {
    let (s1, c1) = (params.theta1 / 2.0).sin_cos();
    let (s2, c2) = (params.theta2 / 2.0).sin_cos();
    c2 * c1 * k.cos() - s1 * s2
}

/// Eigenvalues of a 2×2 matrix from its complex Schur form.
pub fn eigenvalues_2x2(u: &Mat2) -> [C64; 2] {
    let t = nalgebra::Schur::new(*u).unpack().1;
    [t[(0, 0)], t[(1, 1)]]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochSample {
    pub k: f64,
    /// In `[0, π]`.
    pub energy: f64,
    pub n_vec: [f64; 3],
}

fn sample_from(k: f64, cos_e: f64, v: [f64; 3]) -> Result<BlochSample> {
    let sin_e = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if sin_e < DEGENERATE_SIN {
        return Err(Error::DegeneratePoint { k, sin_e });
    }
    Ok(BlochSample {
        k,
        energy: sin_e.atan2(cos_e),
        n_vec: [v[0] / sin_e, v[1] / sin_e, v[2] / sin_e],
    })
}

/// Closed-form energy and Bloch vector.
///
/// The closed form uses the opposite Fourier sign to `bulk_unitary_k`:
/// `dispersion_bloch(p, k).n_vec` is the Bloch vector of `bulk_unitary_k(p, -k)`.
pub fn dispersion_bloch(params: BulkParams, k: f64) -> Result<BlochSample> {
    let (s1, c1) = (params.theta1 / 2.0).sin_cos();
    let (s2, c2) = (params.theta2 / 2.0).sin_cos();
    let (sk, ck) = k.sin_cos();
    let v = [c2 * s1 * sk, s2 * c1 + c2 * s1 * ck, -c2 * c1 * sk];
    sample_from(k, cos_energy(params, k), v)
}

/// Writes `u = cos E − i sin E n·σ` (det u = 1) and returns `(cos E, sin E · n)`.
pub fn bloch_components(u: &Mat2) -> (f64, [f64; 3]) {
    let tr = u[(0, 0)] + u[(1, 1)];
    let i = C64::new(0.0, 1.0);
    // tr(uσx), tr(uσy), tr(uσz)
    let tx = u[(0, 1)] + u[(1, 0)];
    let ty = i * u[(0, 1)] - i * u[(1, 0)];
    let tz = u[(0, 0)] - u[(1, 1)];
    let f = |t: C64| (i * t).re / 2.0;
    (tr.re / 2.0, [f(tx), f(ty), f(tz)])
}

pub fn bloch_of_unitary(u: &Mat2, k: f64) -> Result<BlochSample> {
    let (cos_e, v) = bloch_components(u);
    sample_from(k, cos_e, v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub delta0: f64,
    pub delta_pi: f64,
}

impl GapReport {
    pub fn min(&self) -> f64 {
        self.delta0.min(self.delta_pi)
    }

    pub fn is_open(&self, tol: f64) -> bool {
        self.min() > tol
    }
}

fn energy_closed(params: BulkParams, k: f64) -> f64 {
    let (s1, c1) = (params.theta1 / 2.0).sin_cos();
    let (s2, c2) = (params.theta2 / 2.0).sin_cos();
    let (sk, ck) = k.sin_cos();
    let v = [c2 * s1 * sk, s2 * c1 + c2 * s1 * ck, -c2 * c1 * sk];
    let sin_e = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    sin_e.atan2(cos_energy(params, k))
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    f1.min(f2)
}

fn refined_min<F: Fn(f64) -> f64 + Copy>(f: F, grid: usize) -> f64 {
    let h = 2.0 * PI / grid as f64;
    let (mut best_i, mut best) = (0, f64::INFINITY);
    for i in 0..grid {
        let v = f(-PI + h * i as f64);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let k0 = -PI + h * best_i as f64;
    best.min(golden_min(f, k0 - h, k0 + h, 1e-10))
}

/// Minimum distance of the band to E = 0 and E = π.
pub fn quasienergy_gaps(params: BulkParams) -> GapReport {
    let delta0 = refined_min(|k| energy_closed(params, k), 4096);
    let delta_pi = refined_min(|k| PI - energy_closed(params, k), 4096);
    GapReport {
        delta0: delta0.max(0.0),
        delta_pi: delta_pi.max(0.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Winding {
    pub value: i32,
    /// Chiral axis, oriented so its largest component is positive.
    pub axis: [f64; 3],
    /// max |n(k)·axis| over the grid.
    pub residual: f64,
}

/// Numeric winding of the frame Bloch vector around its chiral axis.
pub fn winding_details(params: BulkParams, frame: TimeFrame, grid: usize) -> Result<Winding> {
    let gaps = quasienergy_gaps(params);
    if !gaps.is_open(GAP_TOL) {
        return Err(Error::GapClosed {
            delta0: gaps.delta0,
            delta_pi: gaps.delta_pi,
        });
    }
    let h = 2.0 * PI / grid as f64;
    let mut samples = Vec::with_capacity(grid);
    for i in 0..grid {
        let k = -PI + h * i as f64;
        let s = bloch_of_unitary(&time_frame_unitary_k(params, frame, k), k)?;
        samples.push(Vector3::from(s.n_vec));
    }

    let mut cov = Matrix3::<f64>::zeros();
    for n in &samples {
        cov += n * n.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let imin = eig.eigenvalues.imin();
    let mut axis: Vector3<f64> = eig.eigenvectors.column(imin).into_owned();
    axis /= axis.norm();
    if axis[axis.iamax()] < 0.0 {
        axis = -axis;
    }
    let residual = samples.iter().map(|n| n.dot(&axis).abs()).fold(0.0, f64::max);
    if residual > AXIS_TOL {
        return Err(Error::ChiralAxisNotFound { residual });
    }

    let project = |v: Vector3<f64>| v - axis * axis.dot(&v);
    let mut e1 = project(Vector3::x());
    if e1.norm() < 1e-3 {
        e1 = project(Vector3::y());
    }
    e1 /= e1.norm();
    let e2 = axis.cross(&e1);

    let angles: Vec<f64> = samples.iter().map(|n| n.dot(&e2).atan2(n.dot(&e1))).collect();
    let mut total = 0.0;
    for i in 0..grid {
        let d = angles[(i + 1) % grid] - angles[i];
        total += (d + PI).rem_euclid(2.0 * PI) - PI;
    }
    let w = total / (2.0 * PI);
    let value = w.round();
    if (w - value).abs() > ROUNDING_TOL {
        return Err(Error::NonIntegerWinding { value: w });
    }
    Ok(Winding {
        value: value as i32,
        axis: [axis[0], axis[1], axis[2]],
        residual,
    })
}

pub fn winding_number(params: BulkParams, frame: TimeFrame) -> Result<i32> {
    winding_details(params, frame, WINDING_GRID).map(|w| w.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseLabel {
    pub nu_prime: i32,
    pub nu_dprime: i32,
    pub nu0: u8,
    pub nu_pi: u8,
}

impl PhaseLabel {
    /// `ν₀ = (1 + ν′ + ν″)/2`, `ν_π = (1 − ν′ + ν″)/2`, both mod 2.
    pub fn from_windings(nu_prime: i32, nu_dprime: i32) -> Result<Self> {
        let s = 1 + nu_prime + nu_dprime;
        let d = 1 - nu_prime + nu_dprime;
        if s.rem_euclid(2) != 0 {
            return Err(Error::InconsistentWindings { nu_prime, nu_dprime });
        }
        Ok(Self {
            nu_prime,
            nu_dprime,
            nu0: (s / 2).rem_euclid(2) as u8,
            nu_pi: (d / 2).rem_euclid(2) as u8,
        })
    }

    pub fn pair(&self) -> (u8, u8) {
        (self.nu0, self.nu_pi)
    }
}

pub fn z2_invariants(params: BulkParams) -> Result<PhaseLabel> {
    let a = winding_number(params, TimeFrame::F1)?;
    let b = winding_number(params, TimeFrame::F2)?;
    PhaseLabel::from_windings(a, b)
}

/// Bulk phase encoded by the boundary operator.
pub fn virtual_bulk_params(theta1: f64, phi: BoundaryPhase) -> BulkParams {
    match phi {
        BoundaryPhase::Zero => BulkParams::new(theta1, -PI),
        BoundaryPhase::Pi => BulkParams::new(theta1, PI),
    }
}

/// Which quasi-energy channels host a bound state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Channels {
    pub zero: bool,
    pub pi: bool,
}

impl Channels {
    pub fn any(&self) -> bool {
        self.zero || self.pi
    }

    pub fn count(&self) -> usize {
        self.zero as usize + self.pi as usize
    }
}

pub fn predict_bound_states(real: BulkParams, theta1: f64, phi: BoundaryPhase) -> Result<Channels> {
    let r = z2_invariants(real)?;
    let v = z2_invariants(virtual_bulk_params(theta1, phi))?;
    Ok(Channels {
        zero: r.nu0 != v.nu0,
        pi: r.nu_pi != v.nu_pi,
    })
}

/// Cell-centred grid over a rectangle of angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n1: usize,
    pub n2: usize,
    pub theta1: (f64, f64),
    pub theta2: (f64, f64),
    /// Points whose smaller gap is below this are marked as transitions.
    pub transition_tol: f64,
}

impl GridSpec {
    pub fn square(n: usize, lo: f64, hi: f64) -> Self {
        Self {
            n1: n,
            n2: n,
            theta1: (lo, hi),
            theta2: (lo, hi),
            transition_tol: GAP_TOL,
        }
    }

    pub fn point(&self, i: usize, j: usize) -> BulkParams {
        let f = |(lo, hi): (f64, f64), n: usize, i: usize| lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
        BulkParams::new(f(self.theta1, self.n1, i), f(self.theta2, self.n2, j))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DiagramCell {
    Phase(PhaseLabel),
    Transition,
    Unresolved(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagramPoint {
    pub params: BulkParams,
    pub gaps: GapReport,
    pub cell: DiagramCell,
}

pub fn classify(params: BulkParams, transition_tol: f64) -> DiagramPoint {
    let gaps = quasienergy_gaps(params);
    let cell = if gaps.min() < transition_tol.max(GAP_TOL) {
        DiagramCell::Transition
    } else {
        match z2_invariants(params) {
            Ok(l) => DiagramCell::Phase(l),
            Err(e) => DiagramCell::Unresolved(e.to_string()),
        }
    };
    DiagramPoint { params, gaps, cell }
}

/// Row-major in `(i, j)`: θ₁ index outer, θ₂ index inner.
pub fn phase_diagram(grid: &GridSpec) -> Vec<DiagramPoint> {
    (0..grid.n1 * grid.n2)
        .into_par_iter()
        .map(|idx| classify(grid.point(idx / grid.n2, idx % grid.n2), grid.transition_tol))
        .collect()
}
