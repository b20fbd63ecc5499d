use fockwalk::analysis::*;
use fockwalk::lattice::*;
use fockwalk::momentum::*;
use fockwalk::pulse::*;
use fockwalk::quench::*;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::time::{Duration, Instant};

const SEED: u64 = 0x5eed_f10c;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ tag)
}

fn random_phase(r: &mut ChaCha8Rng) -> BoundaryPhase {
    if r.gen_bool(0.5) {
        BoundaryPhase::Zero
    } else {
        BoundaryPhase::Pi
    }
}

fn random_params(r: &mut ChaCha8Rng) -> BulkParams {
    BulkParams::new(r.gen_range(-2.0 * PI..2.0 * PI), r.gen_range(-2.0 * PI..2.0 * PI))
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Cut-link matrix after the first coin, written out link by link.
fn oracle_step_matrix(p: BulkParams, phi: BoundaryPhase, n_max: usize) -> DMatrix<C64> {
    let dim = 2 * (n_max + 1);
    let up = |n: usize| 2 * n;
    let dn = |n: usize| 2 * n + 1;
    let (s2, c2) = (p.theta2 / 2.0).sin_cos();
    let mut link = DMatrix::<C64>::zeros(dim, dim);
    for n in 0..n_max {
        link[(up(n + 1), up(n))] = c(-c2);
        link[(dn(n), up(n))] = c(s2);
        link[(dn(n), dn(n + 1))] = c(-c2);
        link[(up(n + 1), dn(n + 1))] = c(-s2);
    }
    link[(up(0), dn(0))] = C64::from_polar(1.0, phi.radians());
    link[(dn(n_max), up(n_max))] = c(1.0);
    let (s1, c1) = (p.theta1 / 2.0).sin_cos();
    let mut coin = DMatrix::<C64>::zeros(dim, dim);
    for n in 0..=n_max {
        coin[(up(n), up(n))] = c(c1);
        coin[(up(n), dn(n))] = c(-s1);
        coin[(dn(n), up(n))] = c(s1);
        coin[(dn(n), dn(n))] = c(c1);
    }
    link * coin
}

fn criterion_1() -> Outcome {
    const N: usize = 64;
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (p, phi) = (random_params(&mut r), random_phase(&mut r));
        let m = oracle_step_matrix(p, phi, N);
        for site in 0..=N - 2 {
            for spin in [Spin::Up, Spin::Down] {
                let col = basis_index(site, spin);
                let out = floquet_step(&WalkerState::basis(N, site, spin).unwrap(), p, phi).unwrap();
                for (row, x) in out.to_vector().iter().enumerate() {
                    worst = worst.max((x - m[(row, col)]).norm());
                }
            }
        }
    }
    let t = start.elapsed();
    outcome(
        worst < 1e-12 && t < Duration::from_secs(10),
        format!("max error {worst:.2e}, {:.2}s", t.as_secs_f64()),
    )
}

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = random_params(&mut r);
        let (s1, c1) = (p.theta1 / 2.0).sin_cos();
        let (s2, c2) = (p.theta2 / 2.0).sin_cos();
        for i in 0..1024 {
            let k = -PI + 2.0 * PI * i as f64 / 1024.0;
            let u = bulk_unitary_k(p, k);
            let tr = u[(0, 0)] + u[(1, 1)];
            let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
            let disc = (tr * tr - det * 4.0).sqrt();
            let formula = c2 * c1 * k.cos() - s1 * s2;
            for lam in [(tr + disc) / 2.0, (tr - disc) / 2.0] {
                worst = worst.max((lam.arg().cos() - formula).abs());
            }
        }
    }
    outcome(worst < 1e-10, format!("max |cos E - formula| {worst:.2e}"))
}

fn criterion_3() -> Outcome {
    let p = BulkParams::new(FRAC_PI_2, 0.0);
    let mut ok = true;
    let mut seen = Vec::new();
    for grid in [512, 1024, 2048, 4096, 8192] {
        let a = winding_details(p, TimeFrame::F1, grid).map(|w| w.value);
        let b = winding_details(p, TimeFrame::F2, grid).map(|w| w.value);
        ok &= a == Ok(1) && b == Ok(0);
        seen.push((grid, a.ok(), b.ok()));
    }
    let label = z2_invariants(p).map(|l| l.pair());
    ok &= label == Ok((1, 0));
    outcome(ok, format!("label {label:?}, windings per grid {seen:?}"))
}

fn p_edge_after(p: BulkParams, phi: BoundaryPhase, steps: usize) -> f64 {
    let s = evolve_in_frame(&WalkerState::boundary_down(steps + 2).unwrap(), p, phi, StepFrame::Symmetric, steps, |_| {}).unwrap();
    edge_population(&s)
}

fn criterion_4() -> Outcome {
    const POINTS: usize = 64;
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut forbidden_worst = 0.0f64;
    let mut checked = 0;
    for phi in [BoundaryPhase::Zero, BoundaryPhase::Pi] {
        for scan_theta2 in [true, false] {
            for i in 0..POINTS {
                let x = -2.0 * PI + 4.0 * PI * (i as f64 + 0.5) / POINTS as f64;
                let p = if scan_theta2 {
                    BulkParams::new(FRAC_PI_2, x)
                } else {
                    BulkParams::new(x, FRAC_PI_2)
                };
                let pe = p_edge_after(p, phi, 100);
                if scan_theta2 && phi == BoundaryPhase::Zero && x > -1.5 * PI && x < -FRAC_PI_2 {
                    forbidden_worst = forbidden_worst.max(pe);
                }
                let Ok(ch) = predict_bound_states(p, p.theta1, phi) else {
                    continue;
                };
                checked += 1;
                if ch.any() != (pe > 0.05) {
                    mismatches.push(format!("({:.3},{:.3},{:?}) P={pe:.3}", p.theta1, p.theta2, phi));
                }
            }
        }
    }
    let t = start.elapsed();
    outcome(
        mismatches.is_empty() && forbidden_worst < 0.01 && t < Duration::from_secs(120),
        format!(
            "{} of {checked} gapped points disagree {:?}; max P_edge in forbidden band {forbidden_worst:.4}; {:.1}s",
            mismatches.len(),
            mismatches,
            t.as_secs_f64()
        ),
    )
}

fn criterion_5() -> Outcome {
    let p = BulkParams::new(FRAC_PI_2, 0.0);
    let phi = BoundaryPhase::Zero;
    let mut states = Vec::new();
    evolve_in_frame(&WalkerState::boundary_down(102).unwrap(), p, phi, StepFrame::Symmetric, 100, |s| states.push(s.clone())).unwrap();
    let pe = edge_population(&states[99]);
    let s50 = &states[49];
    let (r10, r21) = (s50.population(1) / s50.population(0), s50.population(2) / s50.population(1));
    let modes = edge_eigenmodes_in_frame(p, phi, 64, StepFrame::Symmetric).unwrap();
    let prof = modes[0].profile();
    let (o10, o21) = (prof[1] / prof[0], prof[2] / prof[1]);
    let xs: Vec<f64> = (20..=100).map(|t| t as f64).collect();
    let means: Vec<f64> = (20..=100).map(|t| phonon_moments(&states[t - 1]).0).collect();
    let vars: Vec<f64> = (20..=100).map(|t| phonon_moments(&states[t - 1]).1).collect();
    let (_, r2_mean) = polyfit(&xs, &means, 1);
    let (_, r2_var) = polyfit(&xs, &vars, 2);
    let ok = (pe - 0.5).abs() <= 0.05
        && (r10 - o10).abs() < 1e-3
        && (r21 - o21).abs() < 1e-3
        && r2_mean > 0.99
        && r2_var > 0.99;
    outcome(
        ok,
        format!(
            "P_edge(100) {pe:.4}; step-50 ratios ({r10:.5}, {r21:.5}) vs oracle ({o10:.5}, {o21:.5}); R2 mean {r2_mean:.5}, var {r2_var:.5}"
        ),
    )
}

fn spin_series(p: BulkParams, steps: usize) -> Vec<(f64, Option<f64>, Option<f64>)> {
    let mut out = Vec::new();
    evolve_in_frame(&WalkerState::boundary_down(steps + 2).unwrap(), p, BoundaryPhase::Zero, StepFrame::Symmetric, steps, |s| {
        out.push((edge_population(s), spin_expectation_x(s, 0).ok(), spin_expectation_x(s, 1).ok()))
    })
    .unwrap();
    out
}

fn criterion_6() -> Outcome {
    let plus = spin_series(BulkParams::new(FRAC_PI_2, FRAC_PI_4), 100)[99].1;
    let minus = spin_series(BulkParams::new(-FRAC_PI_2, FRAC_PI_4), 100)[99].1;
    let both = spin_series(BulkParams::new(FRAC_PI_4, 3.0 * PI / 8.0), 100);
    let pe: Vec<f64> = both.iter().map(|x| x.0).collect();
    let stable = detect_stabilization(&pe, DEFAULT_WINDOW, DEFAULT_STABLE_TOL).is_some();
    let (sx0, sx1) = (both[99].1, both[99].2);
    let ok = plus.is_some_and(|v| (v - 1.0).abs() <= 0.02)
        && minus.is_some_and(|v| (v + 1.0).abs() <= 0.02)
        && stable
        && sx0.is_some_and(|v| v > -0.98 && v < 0.98)
        && matches!((sx0, sx1), (Some(a), Some(b)) if (a - b).abs() > 0.02);
    outcome(
        ok,
        format!("(pi/2,pi/4) {plus:?}; (-pi/2,pi/4) {minus:?}; (pi/4,3pi/8) stabilized {stable}, sites 0/1 {sx0:?} / {sx1:?}"),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut wrong = Vec::new();
    let catalog = survival_catalog();
    for s in &catalog {
        let rec = run_quench(&s.protocol(20, 1, 80)).unwrap();
        let last = rec.last().unwrap().p_edge;
        let ok = match s.expect {
            fockwalk::quench::Outcome::Survive => last > 0.05,
            fockwalk::quench::Outcome::Die => last < 0.01,
        };
        if !ok {
            wrong.push(format!("{} P={last:.4}", s.name));
        }
    }
    // φ: 0 → π swaps the single-channel phases
    let relabel = [(3.0 * FRAC_PI_4, (true, false)), (-3.0 * FRAC_PI_4, (false, true))].iter().all(|&(t1, (z, p))| {
        let q = BulkParams::new(t1, FRAC_PI_4);
        let a = predict_bound_states(q, t1, BoundaryPhase::Zero).unwrap();
        let b = predict_bound_states(q, t1, BoundaryPhase::Pi).unwrap();
        (a.zero, a.pi) == (z, p) && (b.zero, b.pi) == (p, z)
    });
    let t = start.elapsed();
    outcome(
        wrong.is_empty() && relabel && t < Duration::from_secs(120),
        format!("{} entries, failures {wrong:?}, relabeling {relabel}, {:.1}s", catalog.len(), t.as_secs_f64()),
    )
}

fn criterion_8() -> Outcome {
    const N0: usize = 20;
    let s = BulkParams::new(3.0 * FRAC_PI_4, FRAC_PI_4);
    let f = BulkParams::new(-3.0 * FRAC_PI_4, FRAC_PI_4);
    let plain = run_quench(&QuenchProtocol::sudden(s, f, N0, 80)).unwrap();
    let mut q = QuenchProtocol::sudden(s, f, N0, 80);
    q.kick = Some(0);
    let kicked = run_quench(&q).unwrap();
    let before = kicked[N0 - 1].sx0;
    let at = kicked[N0].sx0;
    let last = kicked.last().unwrap();
    let ok = plain.last().unwrap().p_edge < 0.01
        && last.p_edge > 0.05
        && before.is_some_and(|v| (v - 1.0).abs() <= 0.05)
        && at.is_some_and(|v| (v + 1.0).abs() <= 0.05)
        && last.sx0.is_some_and(|v| (v + 1.0).abs() <= 0.05);
    outcome(
        ok,
        format!(
            "no kick P {:.4}; kick P {:.4}; sx0 {before:?} -> {at:?} -> {:?}",
            plain.last().unwrap().p_edge,
            last.p_edge,
            last.sx0
        ),
    )
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let nqs = [1, 2, 3, 4, 6, 8, 10, 12];
    let scenario = ramp_catalog().into_iter().find(|s| s.name == "ramp-10-to-11").unwrap();
    let fit = landau_zener_fit(&scenario, &nqs);
    let t = start.elapsed();
    match fit {
        Ok(fit) => {
            let ps: Vec<f64> = fit.points.iter().map(|p| p.p_inf).collect();
            let monotone = ps.windows(2).all(|w| w[1] >= w[0]);
            let beta_ok = (fit.beta - 1.3).abs() <= 0.3;
            let plateau_ok = fit.points.iter().filter(|p| p.nq >= 10).all(|p| (p.p_inf - fit.p_pre).abs() <= 0.02);
            outcome(
                monotone && beta_ok && plateau_ok && t < Duration::from_secs(120),
                format!(
                    "beta {:.3} (R2 {:.3}); P_pre {:.4}; P_inf {:?}; monotone {monotone}; {:.1}s",
                    fit.beta,
                    fit.r_squared,
                    fit.p_pre,
                    ps.iter().map(|p| (p * 1e4).round() / 1e4).collect::<Vec<_>>(),
                    t.as_secs_f64()
                ),
            )
        }
        Err(e) => outcome(false, format!("fit failed: {e}")),
    }
}

fn criterion_10() -> Outcome {
    let mut r = rng(10);
    let (mut dev, mut leak) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let (p, phi) = (random_params(&mut r), random_phase(&mut r));
        let n = r.gen_range(4..16);
        let c = compare_cycle(&compile_six_step_cycle(p, phi, n).unwrap(), p, phi, n).unwrap();
        dev = dev.max(c.deviation);
        leak = leak.max(c.leakage);
    }
    let cfg = PulseConfig {
        omega0: 1.0,
        delta0: 1.0,
        tau: 100.0,
        integrator_step: 1e-3,
    };
    let transfers: Vec<f64> = (0..=10).map(|n| stirap_evolve(n, &cfg).unwrap().transfer).collect();
    let lo = transfers.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = transfers.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let reference = PulseConfig {
        omega0: 1.0,
        delta0: 1.0,
        tau: 20.0,
        integrator_step: 1e-4,
    };
    let exact = stirap_evolve(2, &reference).unwrap().state;
    let err = |h: f64| (stirap_evolve(2, &PulseConfig { integrator_step: h, ..reference }).unwrap().state - exact).norm();
    let order = (err(0.004) / err(0.002)).log2();
    let ok = dev < 1e-12 && leak < 1e-10 && lo > 0.99 && hi - lo < 1e-3 && (order - 4.0).abs() < 0.3;
    outcome(
        ok,
        format!(
            "cycle deviation {dev:.2e}, leakage {leak:.2e}; STIRAP min {lo:.5}, spread {:.5}; integrator order {order:.3}",
            hi - lo
        ),
    )
}

fn criterion_11() -> Outcome {
    let mut r = rng(11);
    let (mut imag, mut drift) = (0.0f64, 0.0f64);
    for _ in 0..10 {
        let (p, phi) = (random_params(&mut r), random_phase(&mut r));
        for frame in [StepFrame::Standard, StepFrame::Symmetric] {
            evolve_in_frame(&WalkerState::boundary_down(202).unwrap(), p, phi, frame, 200, |s| {
                imag = imag.max(s.max_imag());
                drift = drift.max((s.norm_sqr() - 1.0).abs());
            })
            .unwrap();
        }
    }
    outcome(imag < 1e-12 && drift < 1e-9, format!("max imag {imag:.2e}, norm drift {drift:.2e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("step-oracle equivalence", criterion_1),
        ("dispersion identity", criterion_2),
        ("invariant anchor", criterion_3),
        ("phase diagram vs dynamics", criterion_4),
        ("edge-state formation", criterion_5),
        ("spin readout", criterion_6),
        ("quench survival table", criterion_7),
        ("sigma_z rescue", criterion_8),
        ("Landau-Zener ramp", criterion_9),
        ("pulse verification", criterion_10),
        ("reality and unitarity", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!("{} {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
