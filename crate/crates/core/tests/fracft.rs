use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

use bifrac::fracft::*;
use bifrac::quadrature::{QuadratureSettings, UniformGrid};
use bifrac::Error;
use num_complex::Complex64 as C64;

fn inv_sqrt_2pi() -> f64 {
    1.0 / (2.0 * PI).sqrt()
}

fn grid() -> UniformGrid {
    UniformGrid::linspace(-8.0, 8.0, 512).unwrap()
}

fn gaussian(shift: f64, width: f64, kick: f64) -> SampledFunction {
    SampledFunction::from_fn(grid(), |x| {
        let u = (x - shift) / width;
        C64::from_polar((-u * u / 2.0).exp(), kick * x)
    })
}

#[test]
fn kernel_at_half_pi_is_the_fourier_kernel() {
    let k = kernel_value(0.0, 0.0, FracAngle::new(FRAC_PI_2)).unwrap();
    assert!((k - C64::from(inv_sqrt_2pi())).norm() < 1e-15);
    let k = kernel_value(1.0, 2.0, FracAngle::new(FRAC_PI_2)).unwrap();
    assert!((k - C64::from_polar(inv_sqrt_2pi(), 2.0)).norm() < 1e-15);
}

#[test]
fn kernel_at_quarter_pi_matches_high_precision() {
    let k = kernel_value(1.0, 1.0, FracAngle::new(FRAC_PI_4)).unwrap();
    let want = C64::new(0.328_174_609_286_823_86, 0.342_608_384_104_529_79);
    assert!((k - want).norm() < 1e-14, "{k}");
}

#[test]
fn kernel_refuses_distributional_angles() {
    for t in [0.0, PI, -PI, 2.0 * PI] {
        assert!(matches!(
            kernel_value(0.3, 0.1, FracAngle::new(t)),
            Err(Error::SpecialAngle { .. })
        ));
    }
}

#[test]
fn identity_at_zero() {
    let f = gaussian(0.7, 1.0, 0.4);
    let g = apply_fracft(&f, FracAngle::new(0.0)).unwrap();
    assert_eq!(f.values(), g.values());
}

#[test]
fn vacuum_is_fourier_invariant() {
    let f = SampledFunction::from_fn(grid(), |x| C64::from((-x * x / 2.0).exp() / PI.powf(0.25)));
    let g = apply_fracft(&f, FracAngle::new(FRAC_PI_2)).unwrap();
    assert!(f.l2_distance(&g).unwrap() < 1e-8);
}

#[test]
fn pi_reverses_the_grid() {
    let f = gaussian(1.0, 0.8, 0.0);
    let g = apply_fracft(&f, FracAngle::new(PI)).unwrap();
    let want = gaussian(-1.0, 0.8, 0.0);
    assert!(g.l2_distance(&want).unwrap() < 1e-12);

    let lopsided = UniformGrid::linspace(-8.0, 9.0, 512).unwrap();
    let h = SampledFunction::from_fn(lopsided, |x| C64::from((-x * x / 2.0).exp()));
    assert!(matches!(
        apply_fracft(&h, FracAngle::new(PI)),
        Err(Error::AsymmetricGrid { .. })
    ));
}

#[test]
fn fat_tails_are_refused() {
    let f = SampledFunction::from_fn(grid(), |x| C64::from((-x * x / 40.0).exp()));
    assert!(matches!(
        apply_fracft(&f, FracAngle::new(0.5)),
        Err(Error::TailTooFat { .. })
    ));
}

#[test]
fn transforms_compose() {
    let f = gaussian(0.5, 1.0, -0.3);
    let norm = f.l2_norm();
    for &(t1, t2) in &[(0.3, 0.4), (1.1, -0.6), (2.0, 0.9), (-0.8, -1.7)] {
        let twice = apply_fracft(&apply_fracft(&f, FracAngle::new(t1)).unwrap(), FracAngle::new(t2)).unwrap();
        let once = apply_fracft(&f, FracAngle::new(t1 + t2)).unwrap();
        let rel = twice.l2_distance(&once).unwrap() / norm;
        assert!(rel < 1e-4, "{t1} {t2}: {rel}");
    }
}

#[test]
fn kernel_composition_examples() {
    let s = QuadratureSettings::default();
    let c = compose_kernels(FracAngle::new(FRAC_PI_4), FracAngle::new(FRAC_PI_4), 0.0, 0.0, &s).unwrap();
    assert!((c - C64::from(inv_sqrt_2pi())).norm() < 1e-7);

    let c = compose_kernels(FracAngle::new(FRAC_PI_3), FracAngle::new(FRAC_PI_6), 1.0, 1.0, &s).unwrap();
    assert!((c - C64::from_polar(inv_sqrt_2pi(), 1.0)).norm() < 1e-7);

    let c = compose_kernels(FracAngle::new(0.3), FracAngle::new(0.4), 0.5, -0.2, &s).unwrap();
    let k = kernel_value(0.5, -0.2, FracAngle::new(0.7)).unwrap();
    assert!((c - k).norm() < 1e-7, "{c} vs {k}");
}

#[test]
fn hermite_eigenphases_step_by_the_angle() {
    let theta = 0.8;
    let h = |n: usize| {
        SampledFunction::from_fn(grid(), move |x| {
            C64::from(bifrac::fock::hermite::hermite_functions(x, n + 1)[n])
        })
    };
    let mut phases = Vec::new();
    for n in [0, 2] {
        let f = h(n);
        let g = apply_fracft(&f, FracAngle::new(theta)).unwrap();
        let c = f.inner(&g).unwrap() / f.inner(&f).unwrap();
        assert!((c.norm() - 1.0).abs() < 1e-6, "{n}: {c}");
        phases.push(c);
    }
    assert!((phases[0] - C64::from(1.0)).norm() < 1e-6);
    let ratio = phases[1] / phases[0];
    assert!((ratio - C64::from_polar(1.0, 2.0 * theta)).norm() < 1e-6, "{ratio}");
}
