//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use alemass_core::cohomass::{
    b_plus, crosscheck_mass, determinant, ends_bound, ends_versus_ambient, exceptional_area,
    mass_formula, penrose_check, scalar_volume_integral, signature, BlowupModel, DivisorData,
    IntersectionForm, ScalarIntegralConfig,
};
use alemass_core::geom::{
    curvature_gate, gate_radii, verify_falloff, CatalogPotential, FallOffConfig, MetricKind,
    MetricSpec,
};
use alemass_core::hj::{
    build_capsule, capsule_degree, central_quotient, hj_evaluate, hj_resolve, lens_generator,
    plumbing_matrix, OrbifoldGroupType,
};
use alemass_core::linalg;
use alemass_core::mass::{chrusciel_mass, default_schedule};
use alemass_core::moser::{
    burns_spec, convergence_order, equivariance_defect, falloff_fit, integrate_flow,
    pullback_residual, synthetic_spec, FlowMap,
};
use alemass_core::{Error, PerturbationSpec, Point, Rational};
use num_integer::Integer;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within_time(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("{what} took {t:.1?}, limit {limit:?}"))
}

fn mass_of(spec: &MetricSpec) -> Result<alemass_core::MassEstimate, String> {
    let field = spec.build::<f64>().map_err(|e| e.to_string())?;
    chrusciel_mass(&field, &default_schedule(field.chart.inner_radius)).map_err(|e| e.to_string())
}

fn exact_mass_oracle() -> Check {
    let mut notes = vec![];
    for c in [0.3, 0.7, 1.5] {
        let start = Instant::now();
        let est = mass_of(&MetricSpec::new(MetricKind::Conformal { c, power: 2.0 }))?;
        let rel = (est.extrapolated_mass - c).abs() / c;
        ensure(
            rel <= 1e-3,
            format!("c = {c}: mass {} (rel {rel:e})", est.extrapolated_mass),
        )?;
        let spread = est.spread();
        ensure(
            spread <= 1e-8,
            format!("c = {c}: integrand spread {spread:e}"),
        )?;
        within_time(start, Duration::from_secs(30), &format!("c = {c}"))?;
        notes.push(format!("c={c} rel={rel:.1e} spread={spread:.1e}"));
    }
    Ok(notes.join(", "))
}

fn flat_zero_and_quotient_law() -> Check {
    let flat = MetricSpec::new(MetricKind::Flat);
    for spec in [
        flat.clone(),
        flat.clone()
            .with_quotient(2, 1)
            .map_err(|e| e.to_string())?,
        flat.with_quotient(4, 1).map_err(|e| e.to_string())?,
    ] {
        let m = mass_of(&spec)?.extrapolated_mass;
        ensure(m.abs() <= 1e-9, format!("{spec}: mass {m:e}"))?;
    }
    let base = MetricSpec::new(MetricKind::Conformal { c: 0.7, power: 2.0 });
    let m1 = mass_of(&base)?.extrapolated_mass;
    let mut worst: f64 = 0.0;
    for (q, p) in [(2, 1), (3, 1), (4, 1), (5, 2)] {
        let spec = base
            .clone()
            .with_quotient(q, p)
            .map_err(|e| e.to_string())?;
        let mq = mass_of(&spec)?.extrapolated_mass;
        let dev = (mq * q as f64 - m1).abs() / m1;
        worst = worst.max(dev);
        ensure(
            dev <= 4.0 * f64::EPSILON,
            format!("q = {q}: q·m_q = {}, m_1 = {m1}", mq * q as f64),
        )?;
    }
    Ok(format!(
        "flat, Z2, Z4 vanish; quotient law rel dev {worst:.1e}"
    ))
}

fn ricci_flat_zero() -> Check {
    let start = Instant::now();
    let a = 1.0;
    let spec = MetricSpec::new(MetricKind::EguchiHanson { a });
    let field = spec.build::<f64>().map_err(|e| e.to_string())?;
    let gate = curvature_gate(&field, &gate_radii(a), 1e-6).map_err(|e| e.to_string())?;
    ensure(
        gate.pass && gate.radii.len() == 20,
        format!("gate max |s| = {:e}", gate.max_abs),
    )?;
    let est = chrusciel_mass(&field, &default_schedule(field.chart.inner_radius))
        .map_err(|e| e.to_string())?;
    let m = est.extrapolated_mass;
    ensure(m.abs() <= 1e-4 * a * a, format!("mass {m:e}"))?;
    within_time(start, Duration::from_secs(120), "Eguchi-Hanson")?;
    Ok(format!("max |s| = {:.1e}, mass = {m:.1e}", gate.max_abs))
}

struct BurnsRun {
    c: f64,
    mass: f64,
    mass_noise: f64,
    area: f64,
    area_noise: f64,
    scalar: f64,
}

fn burns_run(c: f64) -> Result<BurnsRun, String> {
    let spec = MetricSpec::new(MetricKind::Burns { c });
    let field = spec.build::<f64>().map_err(|e| e.to_string())?;
    let est = chrusciel_mass(&field, &default_schedule(field.chart.inner_radius))
        .map_err(|e| e.to_string())?;
    let radii: Vec<f64> = (0..6).map(|k| 0.1 * 0.5f64.powi(k)).collect();
    let area =
        exceptional_area(&CatalogPotential::Burns { c }, &radii, 24).map_err(|e| e.to_string())?;
    // Scalar-flat inside the integration sphere too.
    let scalar = scalar_volume_integral(&field, 0.0, &ScalarIntegralConfig::default())
        .map_err(|e| e.to_string())?;
    let last = est.samples.last().map(|s| s.1).unwrap_or(f64::NAN);
    Ok(BurnsRun {
        c,
        mass: est.extrapolated_mass,
        mass_noise: est.residual + (est.extrapolated_mass - last).abs(),
        area: area.area,
        area_noise: area.residual + (area.area - area.values[area.values.len() - 1]).abs(),
        scalar,
    })
}

fn mass_formula_crosscheck(runs: &[BurnsRun]) -> Check {
    let mut notes = vec![];
    for r in runs {
        let model = BlowupModel::ae_blowup(vec![r.area], r.scalar).map_err(|e| e.to_string())?;
        let rhs = mass_formula(&model).map_err(|e| e.to_string())?;
        let check = crosscheck_mass(r.mass, rhs);
        ensure(
            check.pass,
            format!(
                "c = {}: lhs {} rhs {} rel {:e}",
                r.c, r.mass, rhs, check.rel_err
            ),
        )?;
        notes.push(format!(
            "c={} rel={:.1e} S={:.1e}",
            r.c, check.rel_err, r.scalar
        ));
    }
    Ok(notes.join(", "))
}

fn penrose_equality(runs: &[BurnsRun]) -> Check {
    let mut notes = vec![];
    for r in runs {
        let divisors = DivisorData::new(vec![(1, r.area)]).map_err(|e| e.to_string())?;
        let noise = r.mass_noise + r.area_noise / (3.0 * PI);
        let v = penrose_check(r.mass, &divisors, 1e-6 + noise);
        ensure(
            v.satisfied,
            format!("c = {}: bound violated, gap {:e}", r.c, v.gap),
        )?;
        ensure(
            v.gap.abs() <= 1e-6 + noise,
            format!("c = {}: gap {:e} > {:e}", r.c, v.gap, 1e-6 + noise),
        )?;
        // Same divisor data with a positive scalar integral added.
        let bumped =
            BlowupModel::ae_blowup(vec![r.area], r.scalar + 1.0).map_err(|e| e.to_string())?;
        let m = mass_formula(&bumped).map_err(|e| e.to_string())?;
        let w = penrose_check(m, &divisors, 1e-6);
        ensure(
            w.satisfied && w.gap > 1e-6 + noise,
            format!("c = {}: s>0 gap {:e}", r.c, w.gap),
        )?;
        notes.push(format!("c={} gap={:.1e} s>0 gap={:.2e}", r.c, v.gap, w.gap));
    }
    Ok(notes.join(", "))
}

fn hj_suite() -> Check {
    let start = Instant::now();
    let mut count = 0;
    for q in 2..=200i64 {
        for p in (1..q).filter(|p| p.gcd(&q) == 1) {
            let s = hj_resolve(q, p).map_err(|e| e.to_string())?;
            ensure(s.chain.iter().all(|&e| e >= 2), format!("({q},{p}): {s}"))?;
            let back = hj_evaluate(&s.chain).map_err(|e| e.to_string())?;
            ensure(
                back == Rational::new(q.into(), p.into()),
                format!("({q},{p}) evaluates to {back}"),
            )?;
            let m = plumbing_matrix(&s.chain);
            ensure(
                b_plus(&m) == 0 && signature(&m).negative == m.dim(),
                format!("({q},{p}) not negative definite"),
            )?;
            let det = determinant(&m);
            ensure(
                det.magnitude() == &num_bigint::BigUint::from(q as u64),
                format!("({q},{p}) det {det}"),
            )?;
            if q <= 50 {
                let dual = (1..q).find(|d| (d * p) % q == 1).unwrap();
                let mut rev = hj_resolve(q, dual).map_err(|e| e.to_string())?.chain;
                rev.reverse();
                ensure(
                    rev == s.chain,
                    format!("({q},{p}) dual ({q},{dual}) not reversed"),
                )?;
            }
            count += 1;
        }
    }
    within_time(start, Duration::from_secs(10), "HJ suite")?;
    Ok(format!("{count} types in {:.2?}", start.elapsed()))
}

fn capsule_suite() -> Check {
    for ell in 1..=100u64 {
        let d = capsule_degree(ell).map_err(|e| e.to_string())?;
        ensure(d == 2 + ell, format!("degree({ell}) = {d}"))?;
    }
    let table = [
        (OrbifoldGroupType::Cyclic(7), vec![7, 7]),
        (OrbifoldGroupType::Dihedral(5), vec![2, 2, 5]),
        (OrbifoldGroupType::Tetrahedral, vec![2, 3, 3]),
        (OrbifoldGroupType::Octahedral, vec![2, 3, 4]),
        (OrbifoldGroupType::Icosahedral, vec![2, 5, 5]),
    ];
    for (kind, want) in table {
        ensure(
            kind.classify_singularities() == want,
            format!("{kind} profile"),
        )?;
    }
    let cap = build_capsule(
        2,
        OrbifoldGroupType::Tetrahedral,
        &[(2, 1), (3, 1), (3, 2)],
        None,
    )
    .map_err(|e| e.to_string())?;
    ensure(
        cap.tree.vertices.len() == 5 && cap.tree.is_tree(),
        "tetrahedral capsule tree",
    )?;
    for q in 2..=30i64 {
        let cq = central_quotient(&[lens_generator(q, 1).map_err(|e| e.to_string())?.generator()])
            .map_err(|e| e.to_string())?;
        ensure(
            cq.ell == q as usize && cq.reduced_order == 1,
            format!("lens({q},1): {cq:?}"),
        )?;
    }
    for q in [3i64, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        for p in 2..q {
            let cq =
                central_quotient(&[lens_generator(q, p).map_err(|e| e.to_string())?.generator()])
                    .map_err(|e| e.to_string())?;
            ensure(
                cq.ell == 1 && cq.reduced_order == q as usize,
                format!("lens({q},{p}): {cq:?}"),
            )?;
        }
    }
    Ok("degrees, five profiles and central quotients match".into())
}

fn seeds(c: f64, decades: i32, dir: [f64; 4]) -> Vec<Point> {
    let n = linalg::norm(&dir);
    (0..=2 * decades)
        .map(|k| linalg::vscale(&dir, 1.01 * c * 10f64.powf(k as f64 / 2.0) / n))
        .collect()
}

fn moser_suite() -> Check {
    let start = Instant::now();
    let trivial = PerturbationSpec::trivial(1.0).map_err(|e| e.to_string())?;
    for x in seeds(trivial.safety_radius, 2, [1.0, -2.0, 0.5, 3.0]) {
        let y = integrate_flow(&trivial, &x, 256).map_err(|e| e.to_string())?;
        let d = linalg::norm(&linalg::vsub(&y, &x));
        ensure(d <= 1e-12, format!("theta = 0 moved a seed by {d:e}"))?;
    }

    let burns = burns_spec(0.5).map_err(|e| e.to_string())?;
    let bseeds = seeds(burns.safety_radius, 2, [0.3, 0.4, -0.5, 0.7]);
    let bflow = FlowMap::build(&burns, &bseeds, 256, 1e-4).map_err(|e| e.to_string())?;
    ensure(bflow.invariants_hold(), "Burns flow invariants")?;
    let res = pullback_residual(&bflow, &burns).map_err(|e| e.to_string())?;
    ensure(res <= 1e-5, format!("Burns pullback residual {res:e}"))?;
    let order = convergence_order(&burns, &bseeds[0], &[4, 8, 16]).map_err(|e| e.to_string())?;
    ensure((order - 4.0).abs() <= 0.5, format!("RK4 order {order}"))?;
    let bfall = falloff_fit(&bflow, burns.epsilon, 0.1).map_err(|e| e.to_string())?;
    let (bd, bj) = (bfall.displacement_slope, bfall.jacobian_slope);
    ensure(
        bd.is_some_and(|s| (s + 1.0).abs() <= 0.1),
        format!("Burns displacement slope {bd:?}"),
    )?;
    ensure(
        bj.is_some_and(|s| (s + 2.0).abs() <= 0.2),
        format!("Burns Jacobian slope {bj:?}"),
    )?;

    let synth = synthetic_spec().map_err(|e| e.to_string())?;
    let sseeds = seeds(synth.safety_radius, 2, [0.0, 1.0, 1.0, 0.0]);
    let sflow = FlowMap::build(&synth, &sseeds, 256, 1e-4).map_err(|e| e.to_string())?;
    let sfall = falloff_fit(&sflow, synth.epsilon, 0.1).map_err(|e| e.to_string())?;
    let (sd, sj) = (sfall.displacement_slope, sfall.jacobian_slope);
    ensure(
        sd.is_some_and(|s| (s + 0.5).abs() <= 0.05),
        format!("synthetic displacement slope {sd:?}"),
    )?;
    ensure(
        sj.is_some_and(|s| (s + 1.5).abs() <= 0.15),
        format!("synthetic Jacobian slope {sj:?}"),
    )?;

    // Z2 acts by -1; both radial specs commute with it.
    let minus = linalg::scale(&linalg::identity(), -1.0);
    let mut eq: f64 = 0.0;
    for (spec, pts) in [(&burns, &bseeds), (&synth, &sseeds)] {
        eq = eq.max(equivariance_defect(spec, &minus, pts, 256).map_err(|e| e.to_string())?);
    }
    ensure(eq <= 1e-9, format!("Z2 equivariance defect {eq:e}"))?;
    within_time(start, Duration::from_secs(180), "Moser suite")?;
    Ok(format!(
        "residual {res:.1e}, order {order:.2}, Burns slopes ({:.3}, {:.3}), synthetic slopes ({:.3}, {:.3}), equivariance {eq:.1e}",
        bd.unwrap(),
        bj.unwrap(),
        sd.unwrap(),
        sj.unwrap()
    ))
}

fn negative_controls() -> Check {
    let mut sub = MetricSpec::new(MetricKind::Conformal { c: 1.0, power: 0.4 });
    sub.epsilon = Some(0.5);
    let field = sub.build::<f64>().map_err(|e| e.to_string())?;
    let fall = verify_falloff(
        &field,
        &FallOffConfig::for_inner_radius(field.chart.inner_radius),
    )
    .map_err(|e| e.to_string())?;
    ensure(
        !fall.pass,
        format!("sub-decay family passed fall-off: {:?}", fall.slope_g),
    )?;
    let est = chrusciel_mass(&field, &default_schedule(field.chart.inner_radius))
        .map_err(|e| e.to_string())?;
    ensure(
        est.non_convergent,
        format!("mass not flagged (kappa {})", est.fitted_decay),
    )?;
    match lens_generator(4, 2) {
        Err(Error::NotFree { .. }) => {}
        other => return Err(format!("lens(4,2) accepted: {other:?}")),
    }
    let ends = ends_bound(&IntersectionForm::diagonal(&[1, 1])).map_err(|e| e.to_string())?;
    let ambient = IntersectionForm::diagonal(&[1, -1, -1, -1, -1]);
    let bp = b_plus(&ambient);
    let check = ends_versus_ambient(&IntersectionForm::diagonal(&[1, 1]), &ambient)
        .map_err(|e| e.to_string())?;
    ensure(
        ends == 2 && bp == 1 && !check.consistent,
        format!("ends {ends}, b+ {bp}"),
    )?;
    Ok(format!(
        "slope_g {:.3}, kappa {:.3}, lens(4,2) rejected, ends 2 > b+ 1",
        fall.slope_g.unwrap_or(f64::NAN),
        est.fitted_decay
    ))
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, f: &dyn Fn() -> Check| {
        let start = Instant::now();
        let out = f();
        let t = start.elapsed();
        match out {
            Ok(msg) => println!("PASS {n} {name} [{t:.2?}] {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {n} {name} [{t:.2?}] {msg}");
            }
        }
    };
    let burns: Result<Vec<BurnsRun>, String> = [0.25, 0.5].into_iter().map(burns_run).collect();
    report(1, "exact-mass oracle", &exact_mass_oracle);
    report(2, "flat zero and quotient law", &flat_zero_and_quotient_law);
    report(3, "Ricci-flat zero", &ricci_flat_zero);
    report(4, "mass-formula crosscheck", &|| {
        mass_formula_crosscheck(burns.as_ref().map_err(Clone::clone)?)
    });
    report(5, "Penrose equality", &|| {
        penrose_equality(burns.as_ref().map_err(Clone::clone)?)
    });
    report(6, "Hirzebruch-Jung suite", &hj_suite);
    report(7, "capsule and degree", &capsule_suite);
    report(8, "Moser suite", &moser_suite);
    report(9, "negative controls", &negative_controls);
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
