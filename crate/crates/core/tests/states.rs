use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use bifrac::bifrac::BifracAngles;
use bifrac::fock::{displacement_exact, FockState};
use bifrac::quadrature::{QuadratureSettings, UniformGrid};
use bifrac::states::*;
use num_complex::Complex64 as C64;

fn phase_aligned_diff(a: &[C64], b: &[C64]) -> f64 {
    let k = (0..a.len())
        .max_by(|&i, &j| b[i].norm().partial_cmp(&b[j].norm()).unwrap())
        .unwrap();
    let ph = a[k] / b[k];
    let ph = ph / ph.norm();
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - ph * y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn bargmann_coefficients_match_fock_column() {
    for &(a, b, t) in &[(2.0, 2.0, 0.6), (1.0, -0.5, 0.3), (-0.4, 1.2, 0.7), (0.5, 0.5, 2.6)] {
        let params = bargmann_params(a, b, t).unwrap();
        let stats = photon_stats(&params, 20).unwrap();
        let angles = BifracAngles::new(t, 0.0).unwrap();
        let (psi, report) = bifrac_coherent(a, b, angles, 64).unwrap();
        assert!(report.trusted, "{a} {b} {t} {report:?}");
        let fock: Vec<C64> = psi.amplitudes().iter().take(21).copied().collect();
        let d = phase_aligned_diff(&stats.a_n, &fock);
        assert!(d < 1e-10, "({a},{b},{t}) deviation {d}");
    }
}

#[test]
fn bargmann_equals_scaled_glauber_overlap() {
    let (a, b, t) = (2.0, 2.0, 0.6);
    let params = bargmann_params(a, b, t).unwrap();
    let (psi, _) = bifrac_coherent(a, b, BifracAngles::new(t, 0.0).unwrap(), 96).unwrap();
    let glauber = BifracAngles::new(FRAC_PI_2, FRAC_PI_2).unwrap();
    let z = C64::new(1.0, 1.0);
    // ⟨λ|ψ⟩ = e^{−|λ|²/2} B(λ̄) for the Glauber state |λ⟩, λ = α + iβ
    let (coh, _) = bifrac_coherent(z.re, -z.im, glauber, 96).unwrap();
    let overlap = coh.inner(&psi).unwrap() * (z.norm_sqr() / 2.0).exp();
    let direct = bargmann_eval(z, &params);
    let rel = (overlap / direct).norm();
    assert!((rel - 1.0).abs() < 1e-10, "modulus ratio {rel}");
}

#[test]
fn squeeze_correspondence_at_reference_point() {
    let params = bargmann_params(2.0, 2.0, 0.6).unwrap();
    let sq = SqueezeParams::from_bargmann(&params).unwrap();
    assert!((sq.a() - 2.0 * params.a).norm() < 1e-14);
    assert!((sq.b() - params.b).norm() < 1e-14);
    assert!((sq.c() - params.gamma).norm() < 1e-12);
    for z in [C64::new(0.0, 0.0), C64::new(1.0, 0.5), C64::new(-0.7, 1.3), C64::new(2.0, -1.0), C64::new(0.3, 0.3)] {
        let u = bargmann_eval(z, &params);
        let v = squeeze_bargmann(&sq, z);
        assert!((u - v).norm() <= 1e-10 * u.norm().max(1e-300), "z={z}: {u} vs {v}");
    }
}

#[test]
fn wave_function_forms_agree() {
    let params = bargmann_params(2.0, 2.0, 0.6).unwrap();
    let s = QuadratureSettings::default().with_tol(1e-12);
    for x in [-1.0, 0.0, 1.0] {
        let closed = wavefunction(x, &params).unwrap();
        let integral = wavefunction_integral(x, &params, &s).unwrap();
        assert!((closed - integral).norm() < 1e-8, "x={x}: {closed} vs {integral}");
    }
    let m = moments_from_wavefunction(&params, &s).unwrap();
    assert!((m.norm - 1.0).abs() < 1e-6);
}

#[test]
fn wave_function_and_fock_moments_agree() {
    for &(a, b, t) in &[(2.0, 2.0, 0.6), (1.0, 0.5, 1.0), (-0.5, 1.5, 0.2)] {
        let params = bargmann_params(a, b, t).unwrap();
        let wm = moments_from_wavefunction(&params, &QuadratureSettings::default()).unwrap();
        let (psi, report) = bifrac_coherent(a, b, BifracAngles::new(t, 0.0).unwrap(), 200).unwrap();
        assert!(report.trusted);
        let fm = moments_from_state(&psi).unwrap();
        for (u, v) in [
            (wm.mean_x, fm.mean_x),
            (wm.mean_p, fm.mean_p),
            (wm.sxx, fm.sxx),
            (wm.spp, fm.spp),
            (wm.sxp, fm.sxp),
        ] {
            assert!((u - v).abs() < 1e-5, "({a},{b},{t}): {u} vs {v}");
        }
    }
}

#[test]
fn position_moments_do_not_depend_on_alpha_or_angle() {
    let beta = 2.0;
    for &a in &[-2.0, -1.0, 0.0, 1.0, 2.0] {
        for &t in &[0.2, 0.5, 0.8, 1.1, 1.4] {
            let p = bargmann_params(a, beta, t).unwrap();
            let m = moments_from_wavefunction(&p, &QuadratureSettings::default()).unwrap();
            assert!((m.mean_x - beta * SQRT_2).abs() < 1e-8);
            assert!((m.mean_x2 - (2.0 * beta * beta + 0.5)).abs() < 1e-8);
            assert!((m.sxx - 0.5).abs() < 1e-8);
            assert!(m.rs_residual().abs() < 1e-8);
        }
    }
}

#[test]
fn sweep_reproduces_antibunching_window() {
    let thetas: Vec<f64> = (1..=30).map(|k| 0.05 * k as f64).collect();
    let rows = theta_alpha_sweep(2.0, 2.0, &thetas, 30, &QuadratureSettings::default()).unwrap();
    for r in &rows {
        assert!(r.rs_residual.abs() < 1e-6);
        let sxp = r.moments.sxp;
        assert!((sxp * sxp - (r.sigma_pp / 2.0 - 0.25)).abs() < 1e-6);
        if r.theta_alpha <= 0.75 + 1e-12 {
            assert!(r.g2 < 1.0, "θα={} g2={}", r.theta_alpha, r.g2);
        }
    }
    let below = rows.iter().find(|r| (r.theta_alpha - 0.75).abs() < 1e-9).unwrap();
    let above = rows.iter().find(|r| (r.theta_alpha - 0.85).abs() < 1e-9).unwrap();
    assert!(below.g2 < 1.0 && above.g2 > 1.0);
    let csv = sweep_csv(&rows, false);
    assert!(csv.starts_with("theta_alpha,sigma_pp,mean_n,g2,norm_captured\n"));
    assert_eq!(csv.lines().count(), 31);
}

#[test]
fn analysis_and_reconstruction_follow_the_measure() {
    let dim = 24;
    let g = FockState::vacuum(dim)
        .unwrap()
        .add_scaled(C64::from(1.0), &FockState::number(2, dim).unwrap())
        .unwrap()
        .normalized()
        .unwrap();
    let axis = UniformGrid::linspace(-5.0, 5.0, 81).unwrap();
    for (ta, tb) in [(FRAC_PI_2, FRAC_PI_2), (0.6, 0.3)] {
        let angles = BifracAngles::new(ta, tb).unwrap();
        let back = reconstruct_state(&g, angles, &axis).unwrap();
        // the printed 1/(2π) reconstructs (π|cos(θα−θβ)|/2π)·g
        let c = angles.cos_diff().abs() / 2.0;
        let err = back.add_scaled(C64::from(-c), &g).unwrap().norm();
        assert!(err < 1e-3 * c, "({ta},{tb}) err {err}");
        assert!((resolution_measure(angles) * 2.0 * PI * c - 1.0).abs() < 1e-15);
    }
}

#[test]
fn family_transform_reaches_the_glauber_family() {
    let base = BifracAngles::new(0.0, 0.0).unwrap();
    let axis = UniformGrid::linspace(-6.0, 6.0, 121).unwrap();
    let out = family_transform(1.0, 0.0, FRAC_PI_2, FRAC_PI_2, base, 32, &axis).unwrap();
    let expect = displacement_exact(1.0, 0.0, 32).unwrap();
    let expect = FockState::checked_raw(expect.matrix().column(0).to_owned()).unwrap();
    let err = out.add_scaled(C64::from(-1.0), &expect).unwrap().norm();
    assert!(err < 1e-2, "L2 error {err}");
    assert!((out.norm() - 1.0).abs() < 1e-3);
}

#[test]
fn family_transform_between_regular_angles() {
    let base = BifracAngles::new(0.3, 0.1).unwrap();
    let axis = UniformGrid::linspace(-7.0, 7.0, 281).unwrap();
    let out = family_transform(0.5, -0.4, 0.4, 0.3, base, 24, &axis).unwrap();
    let (direct, _) = bifrac_coherent(0.5, -0.4, BifracAngles::new(0.7, 0.4).unwrap(), 24).unwrap();
    let err = out.add_scaled(C64::from(-1.0), &direct).unwrap().norm();
    assert!(err < 1e-3, "L2 error {err}");
}
