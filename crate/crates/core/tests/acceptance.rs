//! End-to-end acceptance suite. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line.

use std::f64::consts::PI;
use std::process::ExitCode;

use nalgebra::{Matrix4, Vector4};
use qbm_teleport_core::gaussian::two_mode_omega;
use qbm_teleport_core::nonmarkov::{np_from_grid, DEFAULT_EPS};
use qbm_teleport_core::teleportation::angular_distance;
use qbm_teleport_core::{
    apply_channel_mode2, build_coefficient_grid, channel_pair, fidelity_closed_form, fidelity_det,
    intermediate_map, log_negativity, np_spectral, np_spectral_extrapolated, optimal_phase,
    optimize_phase_numeric, pt_symplectic_eig_min, run_sweep, tmsv_covariance, CoefficientGrid,
    ProtocolParams, QbmParams, SweepConfig, CLASSICAL_THRESHOLD,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn grid(x: f64, s: f64, tau_max: f64) -> CoefficientGrid {
    build_coefficient_grid(QbmParams::new(x, s, 100.0, 0.1).unwrap(), tau_max, 2001).unwrap()
}

fn within(label: &str, worst: f64, tol: f64) -> Outcome {
    let msg = format!("{label}: worst {worst:.3e}, tol {tol:.0e}");
    if worst.is_finite() && worst <= tol {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ideal_limit() -> Outcome {
    let g = grid(0.1, 1.0, 1.0);
    let mut worst = 0.0f64;
    for r in [0.0, 0.5, 1.0, 2.0] {
        let pp = ProtocolParams::with_gain(r, PI, 1.0, 1.0).unwrap();
        let target = 1.0 / (1.0 + (-2.0 * r).exp());
        worst = worst
            .max((fidelity_det(&pp, &g, 0.0).map_err(|e| e.to_string())? - target).abs())
            .max((fidelity_closed_form(&pp, &g, 0.0).map_err(|e| e.to_string())? - target).abs());
    }
    within("|F - 1/(1+e^-2r)|", worst, 1e-10)
}

fn noisy_bell() -> Outcome {
    let g = grid(0.1, 1.0, 1.0);
    let pp = ProtocolParams::new(2.0, PI, 0.9f64.sqrt()).unwrap();
    let target = 1.0 / (1.0 + (-4.0f64).exp() + 1.0 / 9.0);
    let f = fidelity_closed_form(&pp, &g, 0.0).map_err(|e| e.to_string())?;
    let fd = fidelity_det(&pp, &g, 0.0).map_err(|e| e.to_string())?;
    within(
        &format!("F = {f:.9} vs {target:.9}"),
        (f - target).abs().max((fd - target).abs()),
        1e-9,
    )
}

fn cross_form() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for x in [0.1, 1.0, 10.0] {
        let g = grid(x, 1.0, 2.0);
        for t_sq in [0.9f64, 1.0] {
            for r in [0.5, 1.0, 2.0] {
                for phi in [0.0, PI / 2.0, PI] {
                    for dtau in [0.0, 0.3, 0.7, 1.5] {
                        let pp = ProtocolParams::new(r, phi, t_sq.sqrt()).unwrap();
                        let a = fidelity_closed_form(&pp, &g, dtau).map_err(|e| e.to_string())?;
                        let b = fidelity_det(&pp, &g, dtau).map_err(|e| e.to_string())?;
                        worst = worst.max(((a - b) / b).abs());
                        count += 1;
                    }
                }
            }
        }
    }
    within(&format!("{count} points, relative"), worst, 1e-8)
}

/// Worst phase error and number of points where the positivity condition on
/// `W` held and the comparison was made.
fn phase_error(s: f64) -> Result<(f64, usize), String> {
    let pp = ProtocolParams::default();
    let mut worst = 0.0f64;
    let mut used = 0;
    for x in [0.05, 0.1, 1.0] {
        let g = grid(x, s, 2.5);
        for dtau in [0.1, 0.5, 1.0, 2.0] {
            let w = g.coefficients(dtau).map_err(|e| e.to_string())?.wbar;
            if !(w[(0, 0)] > 0.0 && w[(1, 1)] > 0.0) {
                continue;
            }
            let numeric = optimize_phase_numeric(&pp, &g, dtau).map_err(|e| e.to_string())?;
            let analytic = optimal_phase(dtau, x).map_err(|e| e.to_string())?;
            worst = worst.max(angular_distance(numeric.phi, analytic));
            used += 1;
        }
    }
    if used == 0 {
        return Err("positivity condition never held".to_string());
    }
    Ok((worst, used))
}

fn optimal_phase_check() -> Outcome {
    let (worst, used) = phase_error(1.0)?;
    within(&format!("{used} of 12 points"), worst, 1e-4)
}

/// Symplectic eigenvalues of the partial transpose from the general
/// (non-symmetric) spectrum of `Omega sigma~`, which is `+-i nu`.
fn brute_force_nu_min(sigma: &Matrix4<f64>) -> f64 {
    let p = Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, 1.0, -1.0));
    let m = two_mode_omega() * p * sigma * p;
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.im.abs())
        .fold(f64::INFINITY, f64::min)
}

fn entanglement_oracle() -> Outcome {
    let mut fresh = 0.0f64;
    for j in 0..=60 {
        let r = 0.05 * j as f64;
        let sigma = tmsv_covariance(r, 0.7 * j as f64).map_err(|e| e.to_string())?;
        let en = log_negativity(pt_symplectic_eig_min(&sigma).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        fresh = fresh.max((en - 2.0 * r).abs());
    }
    let g = grid(0.1, 1.0, 3.0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut evolved = 0.0f64;
    for _ in 0..20 {
        let r = rng.gen_range(0.1..3.0);
        let phi = rng.gen_range(0.0..2.0 * PI);
        let dtau = rng.gen_range(0.0..3.0);
        let sigma = apply_channel_mode2(
            &tmsv_covariance(r, phi).map_err(|e| e.to_string())?,
            &channel_pair(&g, dtau).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        let nu = pt_symplectic_eig_min(&sigma).map_err(|e| e.to_string())?;
        evolved = evolved.max((nu - brute_force_nu_min(sigma.matrix())).abs());
    }
    let msg = format!("fresh |E_N - 2r| {fresh:.3e}, evolved |dnu| {evolved:.3e}");
    if fresh <= 1e-10 && evolved <= 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn np_limit_error(s: f64) -> Result<f64, String> {
    let mut worst = 0.0f64;
    for x in [0.05, 0.1, 1.0, 10.0] {
        let g = grid(x, s, 2.5);
        let at_zero = np_spectral(&g, 0.0, DEFAULT_EPS).map_err(|e| e.to_string())?;
        if at_zero != 0.0 {
            return Err(format!("N_p(0) = {at_zero} at x = {x}"));
        }
        for t in [0.25, 0.5, 1.0, 2.0] {
            let spectral =
                np_spectral_extrapolated(&g, t, DEFAULT_EPS).map_err(|e| e.to_string())?;
            let closed = np_from_grid(&g, t).map_err(|e| e.to_string())?;
            worst = worst.max((spectral - closed).abs());
        }
    }
    Ok(worst)
}

fn np_limit() -> Outcome {
    within("16 points, N_p(0) = 0", np_limit_error(1.0)?, 1e-3)
}

fn composition_error(s: f64, seed: u64) -> Result<f64, String> {
    let g = grid(0.1, s, 3.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let a: f64 = rng.gen_range(0.0..3.0);
        let b: f64 = rng.gen_range(0.0..3.0);
        let (t1, t2) = (a.min(b), a.max(b));
        if t2 - t1 < 1e-6 {
            continue;
        }
        // Two intermediate maps chained after the channel up to t1; a single
        // map reproduces (0, t2) by construction.
        let tm = 0.5 * (t1 + t2);
        let first = channel_pair(&g, t1).map_err(|e| e.to_string())?;
        let second = intermediate_map(&g, t1, tm - t1)
            .map_err(|e| e.to_string())?
            .pair;
        let third = intermediate_map(&g, tm, t2 - tm)
            .map_err(|e| e.to_string())?
            .pair;
        let composed = first.then(&second).then(&third);
        let direct = channel_pair(&g, t2).map_err(|e| e.to_string())?;
        worst = worst
            .max((composed.x_mat - direct.x_mat).amax())
            .max((composed.y_mat - direct.y_mat).amax());
    }
    Ok(worst)
}

fn composition() -> Outcome {
    within("10 random (t1, t2)", composition_error(1.0, 7)?, 1e-8)
}

/// Adaptive Simpson, independent of the library's Gauss-Kronrod routine.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    step(
        f,
        a,
        b,
        fa,
        fm,
        fb,
        (b - a) / 6.0 * (fa + 4.0 * fm + fb),
        tol,
        40,
    )
}

fn coefficient_oracle() -> Outcome {
    let alpha: f64 = 0.1;
    let theta = 100.0;
    let mut worst = 0.0f64;
    for x in [0.1, 1.0] {
        let g = grid(x, 1.0, 2.5);
        for tau in [0.1, 0.5, 1.0, 2.0] {
            let c = g.coefficients(tau).map_err(|e| e.to_string())?;
            let sine = |u: f64| 2.0 * u / (1.0 + u * u).powi(2);
            let cosine = |u: f64| 1.0 / (1.0 + u * u);
            let gamma = alpha * alpha * simpson(&|u| sine(u) * (u / x).sin(), 0.0, tau, 1e-13);
            let diff = 2.0 * theta * alpha * alpha;
            let delta = diff * simpson(&|u| cosine(u) * (u / x).cos(), 0.0, tau, 1e-13);
            let pi = diff * simpson(&|u| cosine(u) * (u / x).sin(), 0.0, tau, 1e-13);
            for (got, want) in [(c.gamma, gamma), (c.delta, delta), (c.pi, pi)] {
                worst = worst.max(((got - want) / want).abs());
            }
        }
    }
    within("relative, 8 points x 3 coefficients", worst, 1e-6)
}

fn dip_and_revival() -> Outcome {
    let table = run_sweep(&SweepConfig::default()).map_err(|e| e.to_string())?;
    let f = table.column("f_opt").unwrap();
    let first = f[0];
    let top = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let bottom = f.iter().cloned().fold(f64::INFINITY, f64::min);
    let dip = (1..f.len() - 1).find(|&i| f[i] < f[i - 1] && f[i] <= f[i + 1]);
    let revival =
        dip.and_then(|d| (d + 1..f.len() - 1).find(|&i| f[i] > f[i - 1] && f[i] >= f[i + 1]));
    let msg = format!(
        "f(0) = {first:.6}, range [{bottom:.6}, {top:.6}], dip at row {dip:?}, revival at row {revival:?}"
    );
    if top - bottom > 1e-6 && top == first && revival.is_some() && first > CLASSICAL_THRESHOLD {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn grid_convergence() -> Outcome {
    let coarse = run_sweep(&SweepConfig::default()).map_err(|e| e.to_string())?;
    let fine = run_sweep(&SweepConfig {
        grid_n: 4001,
        ..SweepConfig::default()
    })
    .map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for col in ["f_opt", "e_n", "n_p"] {
        let (a, b) = (coarse.column(col).unwrap(), fine.column(col).unwrap());
        for (u, v) in a.iter().zip(&b) {
            worst = worst.max((u - v).abs());
        }
    }
    within("f_opt, e_n, n_p at 2001 vs 4001 nodes", worst, 1e-6)
}

fn determinism() -> Outcome {
    let cfg = SweepConfig::default();
    let a = run_sweep(&cfg)
        .and_then(|t| t.to_csv_string())
        .map_err(|e| e.to_string())?;
    let b = run_sweep(&cfg)
        .and_then(|t| t.to_csv_string())
        .map_err(|e| e.to_string())?;
    if a == b {
        Ok(format!("{} identical bytes", a.len()))
    } else {
        Err("CSV differs between runs".to_string())
    }
}

fn spectral_family() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for s in [0.5, 3.0] {
        let cfg = SweepConfig {
            qbm: QbmParams::new(0.1, s, 100.0, 0.1).unwrap(),
            ..SweepConfig::default()
        };
        run_sweep(&cfg).map_err(|e| format!("s = {s}: {e}"))?;
        let (phase, _) = phase_error(s)?;
        let np = np_limit_error(s)?;
        let comp = composition_error(s, 11)?;
        ok &= phase <= 1e-4 && np <= 1e-3 && comp <= 1e-8;
        parts.push(format!(
            "s = {s}: phase {phase:.1e}, N_p {np:.1e}, composition {comp:.1e}"
        ));
    }
    let msg = parts.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("ideal-limit fidelity", ideal_limit),
        ("noisy-Bell baseline", noisy_bell),
        ("cross-form equivalence", cross_form),
        ("optimal phase", optimal_phase_check),
        ("entanglement oracle", entanglement_oracle),
        ("N_p limit identity", np_limit),
        ("channel composition", composition),
        ("Ohmic coefficient oracle", coefficient_oracle),
        ("fidelity dip and revival", dip_and_revival),
        ("grid convergence", grid_convergence),
        ("determinism", determinism),
        ("sub/supra-Ohmic robustness", spectral_family),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(msg) => println!("PASS {:>2} {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
