//! Observables, fits and the dense eigen-oracle for edge modes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::{build_step_matrix_in_frame, BoundaryPhase, BulkParams, StepFrame, WalkerState};

/// Conditional spin expectations need at least this much population on the site.
pub const SITE_FLOOR: f64 = 1e-9;
/// Eigenphase tolerance for zero/pi classification.
pub const TOL_E: f64 = 1e-6;

/// Probability on sites 0 and 1.
pub fn edge_population(state: &WalkerState) -> f64 {
    state.population(0) + state.population(1)
}

/// `2 Re(a conj(b)) / (|a|² + |b|²)` at one site.
pub fn spin_expectation_x(state: &WalkerState, site: usize) -> Result<f64> {
    if site > state.n_max() {
        return Err(Error::SiteOutOfRange {
            site,
            n_max: state.n_max(),
        });
    }
    let p = state.population(site);
    if p < SITE_FLOOR {
        return Err(Error::SiteUnoccupied { site, population: p });
    }
    let (a, b) = (state.up()[site], state.down()[site]);
    Ok(2.0 * (a * b.conj()).re / p)
}

/// `(Σ n p_n, Σ n² p_n − mean²)`
pub fn phonon_moments(state: &WalkerState) -> (f64, f64) {
    let (mut m1, mut m2) = (0.0, 0.0);
    for (n, p) in state.populations().into_iter().enumerate() {
        let n = n as f64;
        m1 += n * p;
        m2 += n * n * p;
    }
    (m1, (m2 - m1 * m1).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableRecord {
    pub step: usize,
    pub p_edge: f64,
    pub sx0: Option<f64>,
    pub sx1: Option<f64>,
    pub mean_n: f64,
    pub var_n: f64,
    pub norm: f64,
}

impl ObservableRecord {
    pub fn of(state: &WalkerState) -> Self {
        let (mean_n, var_n) = phonon_moments(state);
        Self {
            step: state.step_count(),
            p_edge: edge_population(state),
            sx0: spin_expectation_x(state, 0).ok(),
            sx1: spin_expectation_x(state, 1).ok(),
            mean_n,
            var_n,
            norm: state.norm_sqr(),
        }
    }
}

/// Eigenvalues and unit eigenvectors (columns) of a normal matrix.
pub fn normal_eigen(m: &DMatrix<C64>) -> (Vec<C64>, DMatrix<C64>) {
    let (q, t) = nalgebra::Schur::new(m.clone()).unpack();
    let vals = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    (vals, q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeClass {
    Zero,
    Pi,
    Bulk,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenMode {
    /// In `(−π, π]`.
    pub eigenphase: f64,
    pub amplitudes: WalkerState,
    /// Probability on sites 0 and 1.
    pub edge_weight: f64,
    /// Probability on the left half of the lattice.
    pub left_weight: f64,
    pub mode_class: ModeClass,
}

impl EigenMode {
    pub fn profile(&self) -> Vec<f64> {
        self.amplitudes.populations()
    }
}

pub fn classify_phase(eigenphase: f64) -> Result<ModeClass> {
    let zero = eigenphase.abs() < TOL_E;
    let pi = (PI - eigenphase.abs()).abs() < TOL_E;
    match (zero, pi) {
        (true, true) => Err(Error::DegenerateClassification { eigenphase }),
        (true, false) => Ok(ModeClass::Zero),
        (false, true) => Ok(ModeClass::Pi),
        _ => Ok(ModeClass::Bulk),
    }
}

/// Zero and pi modes bound to the left edge, standard frame.
pub fn edge_eigenmodes(params: BulkParams, phi: BoundaryPhase, n_max: usize) -> Result<Vec<EigenMode>> {
    edge_eigenmodes_in_frame(params, phi, n_max, StepFrame::Standard)
}

pub fn edge_eigenmodes_in_frame(
    params: BulkParams,
    phi: BoundaryPhase,
    n_max: usize,
    frame: StepFrame,
) -> Result<Vec<EigenMode>> {
    if n_max < 32 {
        return Err(Error::LatticeTooSmall { n_max, required: 32 });
    }
    let u = build_step_matrix_in_frame(params, phi, n_max, frame)?;
    let (vals, q) = normal_eigen(u.matrix());
    let dim = q.nrows();
    let half = (n_max + 1) / 2;

    let mut out = Vec::new();
    for class in [ModeClass::Zero, ModeClass::Pi] {
        let mut cols = Vec::new();
        for (i, v) in vals.iter().enumerate() {
            if classify_phase(v.arg())? == class {
                cols.push(i);
            }
        }
        if cols.is_empty() {
            continue;
        }
        // Separate left and right edge modes sharing an eigenphase by
        // diagonalizing the left-half projector inside the cluster.
        let qc = DMatrix::from_fn(dim, cols.len(), |r, c| q[(r, cols[c])]);
        let mut pl = DMatrix::<C64>::zeros(dim, dim);
        for r in 0..2 * half {
            pl[(r, r)] = C64::new(1.0, 0.0);
        }
        let m = qc.adjoint() * &pl * &qc;
        let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(m);
        for (j, &lw) in eig.eigenvalues.iter().enumerate() {
            if lw <= 0.5 {
                continue;
            }
            let v: DVector<C64> = &qc * eig.eigenvectors.column(j);
            let v = &v / C64::new(v.norm(), 0.0);
            let phase = {
                let uv = u.matrix() * &v;
                v.dotc(&uv).arg()
            };
            let amplitudes = WalkerState::from_vector(v.as_slice())?;
            out.push(EigenMode {
                eigenphase: phase,
                edge_weight: amplitudes.population(0) + amplitudes.population(1),
                left_weight: lw,
                amplitudes,
                mode_class: class,
            });
        }
    }
    Ok(out)
}

/// Total probability of `state` inside the span of `modes`.
pub fn edge_span_overlap(state: &WalkerState, modes: &[EigenMode]) -> f64 {
    modes.iter().map(|m| m.amplitudes.inner(state).norm_sqr()).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationFit {
    /// `p_n ∝ e^{−n/λ}`; non-positive if the profile does not decay.
    pub lambda: f64,
    /// Fitted `p_{n+2}/p_n`.
    pub ratio_even: f64,
    pub r_squared: f64,
    /// Measured `p_{n+1}/p_n` over the window.
    pub ratios: Vec<f64>,
    pub sites_used: usize,
}

const PROFILE_FLOOR: f64 = 1e-12;

/// Log-linear fit over the leading run of sites above the floor.
pub fn fit_localization(profile: &[f64]) -> Result<LocalizationFit> {
    let used = profile.iter().take_while(|&&p| p > PROFILE_FLOOR).count();
    if used < 6 {
        return Err(Error::InsufficientSupport {
            sites: used,
            required: 6,
        });
    }
    let xs: Vec<f64> = (0..used).map(|n| n as f64).collect();
    let ys: Vec<f64> = profile[..used].iter().map(|p| p.ln()).collect();
    let (coef, r_squared) = polyfit(&xs, &ys, 1);
    let slope = coef[1];
    Ok(LocalizationFit {
        lambda: -1.0 / slope,
        ratio_even: (2.0 * slope).exp(),
        r_squared,
        ratios: profile[..used].windows(2).map(|w| w[1] / w[0]).collect(),
        sites_used: used,
    })
}

/// Least-squares polynomial, coefficients in increasing degree, plus R².
pub fn polyfit(xs: &[f64], ys: &[f64], degree: usize) -> (Vec<f64>, f64) {
    let a = DMatrix::from_fn(xs.len(), degree + 1, |r, c| xs[r].powi(c as i32));
    let b = DVector::from_column_slice(ys);
    let coef = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-14)
        .expect("svd with both factors");
    let fitted = &a * &coef;
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = ys.iter().zip(fitted.iter()).map(|(y, f)| (y - f).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    (coef.iter().copied().collect(), r2)
}

pub const DEFAULT_WINDOW: usize = 10;
pub const DEFAULT_STABLE_TOL: f64 = 0.01;

fn spread<'a>(it: impl Iterator<Item = &'a f64>) -> f64 {
    let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    hi - lo
}

/// Start of the first window of `window` entries that is flat to `tol`,
/// either as a whole or separately on its even and odd entries.
pub fn detect_stabilization(series: &[f64], window: usize, tol: f64) -> Option<usize> {
    let window = window.max(4);
    if series.len() < window {
        return None;
    }
    (0..=series.len() - window).find(|&start| {
        let w = &series[start..start + window];
        spread(w.iter()) < tol || (spread(w.iter().step_by(2)) < tol && spread(w.iter().skip(1).step_by(2)) < tol)
    })
}

/// Mean of the last `DEFAULT_WINDOW` entries once the series has stabilized.
pub fn stabilized_value(series: &[f64], window: usize, tol: f64) -> Option<f64> {
    detect_stabilization(series, window, tol)?;
    let tail = &series[series.len().saturating_sub(DEFAULT_WINDOW)..];
    Some(tail.iter().sum::<f64>() / tail.len() as f64)
}
