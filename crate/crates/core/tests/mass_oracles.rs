use std::sync::Arc;

use alemass_core::geom::{
    metric_derivatives, AsymptoticChart, CatalogPotential, ConformalMetric, DerivativeMode,
    KahlerMetric, MetricField, MetricKind, MetricSpec, RotatedMetric,
};
use alemass_core::linalg::{self, Mat4};
use alemass_core::mass::{chrusciel_mass, default_schedule, mass_integrand_at};
use proptest::prelude::*;

fn mass(spec: &MetricSpec) -> f64 {
    let field = spec.build::<f64>().unwrap();
    chrusciel_mass(&field, &default_schedule(field.chart.inner_radius))
        .unwrap()
        .extrapolated_mass
}

fn burns_field(c: f64) -> MetricField<f64> {
    MetricField::new(
        AsymptoticChart::new(1.0, 1, 1.0).unwrap(),
        KahlerMetric {
            potential: CatalogPotential::Burns { c },
        },
    )
}

// A rotation of R⁴ that is not complex-linear: it mixes z1 and z2.
fn generic_rotation(t: f64) -> Mat4<f64> {
    let (s, c) = t.sin_cos();
    let mut a = linalg::identity();
    a[0][0] = c;
    a[0][2] = -s;
    a[2][0] = s;
    a[2][2] = c;
    let (s2, c2) = (0.7 * t).sin_cos();
    let mut b = linalg::identity();
    b[1][1] = c2;
    b[1][3] = -s2;
    b[3][1] = s2;
    b[3][3] = c2;
    linalg::matmul(&a, &b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn conformal_family_mass_is_c(c in 0.05f64..3.0) {
        let m = mass(&MetricSpec::new(MetricKind::Conformal { c, power: 2.0 }));
        prop_assert!((m - c).abs() <= 1e-10 * c);
    }

    #[test]
    fn quotient_divides_mass(c in 0.1f64..2.0, q in 2u32..8) {
        let base = MetricSpec::new(MetricKind::Conformal { c, power: 2.0 });
        let m1 = mass(&base);
        let mq = mass(&base.with_quotient(q, 1).unwrap());
        prop_assert!((mq * q as f64 - m1).abs() <= 1e-13 * m1);
    }
}

#[test]
fn burns_mass_is_a_third_of_c() {
    for c in [0.1, 0.5, 1.0] {
        let m = mass(&MetricSpec::new(MetricKind::Burns { c }));
        assert!((m - c / 3.0).abs() < 1e-8, "c = {c}: {m}");
        let m2 = mass(
            &MetricSpec::new(MetricKind::Burns { c })
                .with_quotient(3, 2)
                .unwrap(),
        );
        assert!((m2 - c / 9.0).abs() < 1e-8, "c = {c}, Z3: {m2}");
    }
}

#[test]
fn mass_is_rotation_invariant() {
    let field = burns_field(0.5);
    let schedule = default_schedule(1.0);
    let m = chrusciel_mass(&field, &schedule).unwrap().extrapolated_mass;
    for t in [0.3, 1.1, 2.5] {
        let rotated = MetricField::new(
            field.chart.clone(),
            RotatedMetric {
                inner: field.source.clone(),
                rotation: generic_rotation(t),
            },
        );
        let mr = chrusciel_mass(&rotated, &schedule)
            .unwrap()
            .extrapolated_mass;
        assert!((mr - m).abs() < 1e-9, "t = {t}: {mr} vs {m}");
    }
}

#[test]
fn finite_differences_converge_quadratically() {
    let x = [3.0, -1.0, 2.0, 4.0];
    let exact = metric_derivatives(&burns_field(0.5), &x).unwrap();
    let err = |h: f64| {
        let f = burns_field(0.5).with_mode(DerivativeMode::CentralDifference {
            rel_step: h,
            min_step: 0.0,
        });
        let d = metric_derivatives(&f, &x).unwrap();
        (0..4)
            .map(|l| linalg::max_abs(&linalg::sub(&d[l], &exact[l])))
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (err(4e-2), err(2e-2));
    let ratio = e1 / e2;
    assert!((3.5..4.5).contains(&ratio), "errors {e1:e}, {e2:e}");
    // The integrand still agrees to the same order.
    let fd = burns_field(0.5).with_mode(DerivativeMode::central_default());
    let (a, b) = (
        mass_integrand_at(&burns_field(0.5), 8.0).unwrap(),
        mass_integrand_at(&fd, 8.0).unwrap(),
    );
    assert!((a - b).abs() < 1e-9);
}

#[test]
fn single_precision_mass() {
    let chart = AsymptoticChart::<f32>::new(1.0, 1, 1.0).unwrap();
    let field = MetricField::new(
        chart,
        ConformalMetric {
            c: 0.5f32,
            power: 2.0,
        },
    );
    let est = chrusciel_mass(&field, &default_schedule(1.0f32)).unwrap();
    assert!(
        (est.extrapolated_mass - 0.5).abs() < 1e-3,
        "{}",
        est.extrapolated_mass
    );
}

#[test]
fn analytic_and_numeric_gradients_agree_under_rotation() {
    let inner: Arc<dyn alemass_core::geom::MetricSource<f64>> = Arc::new(KahlerMetric {
        potential: CatalogPotential::EguchiHanson { a: 1.0 },
    });
    let chart = AsymptoticChart::new(1.0, 2, 3.0).unwrap();
    let rotated = MetricField::new(
        chart,
        RotatedMetric {
            inner,
            rotation: generic_rotation(0.8),
        },
    );
    let fd = rotated.clone().with_mode(DerivativeMode::central_default());
    for rho in [4.0, 16.0] {
        let a = mass_integrand_at(&rotated, rho).unwrap();
        let b = mass_integrand_at(&fd, rho).unwrap();
        assert!((a - b).abs() < 1e-7, "rho = {rho}: {a:e} vs {b:e}");
    }
}
