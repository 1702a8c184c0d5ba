use std::f64::consts::PI;

use bifrac::bifrac::{bifrac_operator, gaussian_fingerprint, BifracAngles};
use bifrac::fock::{self, interior_dim, FockOperator};
use bifrac::fracft::{apply_fracft, kernel_value, FracAngle, SampledFunction};
use bifrac::quadrature::UniformGrid;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn regular_angle() -> impl Strategy<Value = f64> {
    (-3.0..3.0f64).prop_filter("regular", |t| FracAngle::new(*t).is_regular())
}

fn test_function(shift: f64, kick: f64) -> SampledFunction {
    let grid = UniformGrid::linspace(-8.0, 8.0, 512).unwrap();
    SampledFunction::from_fn(grid, |x| {
        let u = x - shift;
        C64::from_polar((-u * u / 2.0).exp(), kick * x)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kernel_modulus_is_constant(t in regular_angle(), x in -5.0..5.0f64, y in -5.0..5.0f64) {
        let k = kernel_value(x, y, FracAngle::new(t)).unwrap();
        let want = C64::new(1.0, 1.0 / t.tan()).norm() / (2.0 * PI);
        prop_assert!((k.norm_sqr() - want).abs() < 1e-12 * want.max(1.0));
    }

    #[test]
    fn displacement_inverse(a in -1.5..1.5f64, b in -1.5..1.5f64) {
        let dim = 48;
        let prod = fock::displacement(a, b, dim).unwrap().dot(&fock::displacement(-a, -b, dim).unwrap()).unwrap();
        let d = prod.max_abs_diff(&FockOperator::identity(dim).unwrap(), interior_dim(dim)).unwrap();
        prop_assert!(d < 1e-8, "{}", d);
    }
}

/// Away from 0 and π the chirp `cot θ·y²/2` stays resolved on a 512-point
/// grid over [−8, 8].
fn resolvable_angle() -> impl Strategy<Value = f64> {
    (0.3..PI - 0.3, any::<bool>()).prop_map(|(t, neg)| if neg { -t } else { t })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn fracft_preserves_norm_and_inverts(t in resolvable_angle(), shift in -1.0..1.0f64, kick in -1.0..1.0f64) {
        let f = test_function(shift, kick);
        let g = apply_fracft(&f, FracAngle::new(t)).unwrap();
        prop_assert!((g.l2_norm() / f.l2_norm() - 1.0).abs() < 1e-6);
        let back = apply_fracft(&g, FracAngle::new(-t)).unwrap();
        prop_assert!(back.l2_distance(&f).unwrap() / f.l2_norm() < 1e-4);
    }

    #[test]
    fn bifrac_unitary_adjoint_and_gaussian(
        a in -2.0..2.0f64,
        b in -2.0..2.0f64,
        ta in -PI..PI,
        tb in -PI..PI,
    ) {
        let dim = 64;
        let angles = BifracAngles::new(ta, tb);
        prop_assume!(angles.is_ok());
        let angles = angles.unwrap();
        let built = bifrac_operator(a, b, angles, dim);
        prop_assume!(built.is_ok());
        let (u, report) = built.unwrap();
        let k = report.trusted_dim.min(interior_dim(dim));
        prop_assume!(k >= dim / 8);

        prop_assert!(u.unitarity_defect(k) < 1e-6);
        let (v, rv) = bifrac_operator(-a, -b, angles.neg(), dim).unwrap();
        prop_assert!(u.dagger().max_abs_diff(&v, k.min(rv.trusted_dim)).unwrap() < 1e-6);
        let (g, residual) = gaussian_fingerprint(&u).unwrap();
        prop_assert!(residual < 1e-6);
        prop_assert!((g.det() - 1.0).abs() < 1e-6);
    }
}
