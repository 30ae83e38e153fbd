//! Dispatch from a scenario to the core operations.

use std::f64::consts::PI;
use std::time::Instant;

use alemass_core::cohomass::{b_plus, determinant};
use alemass_core::cohomass::{
    crosscheck_mass_with, exceptional_area, mass_formula, penrose_check, scalar_volume_integral,
    BlowupModel, DivisorData, ScalarIntegralConfig,
};
use alemass_core::geom::{verify_falloff, CatalogPotential, FallOffConfig, MetricKind, MetricSpec};
use alemass_core::hj::{build_capsule, hj_resolve, lens_generator, plumbing_matrix};
use alemass_core::linalg::{self, Vec4};
use alemass_core::mass::{chrusciel_mass_with, default_schedule, MassConfig};
use alemass_core::moser::{
    burns_spec, convergence_order, equivariance_defect, falloff_fit, synthetic_spec, FlowMap,
    PerturbationSpec,
};

use crate::bundle::*;
use crate::cache::Cache;
use crate::error::{CliError, Result};
use crate::scenario::{Kind, MoserFamily, Scenario};

struct Ctx<'a> {
    name: &'a str,
}

impl Ctx<'_> {
    fn core<T>(&self, r: alemass_core::Result<T>) -> Result<T> {
        r.map_err(|source| CliError::Compute {
            scenario: self.name.to_string(),
            source,
        })
    }
}

/// Runs the scenario, or loads its bundle from `cache` when present.
pub fn run_scenario(s: &Scenario, cache: Option<&Cache>) -> Result<ReportBundle> {
    let key = Cache::key(s);
    if let Some(c) = cache {
        if let Some(b) = c.load(&key)? {
            return Ok(b);
        }
    }
    let start = Instant::now();
    let ctx = Ctx { name: &s.name };
    let (records, verdicts) = match s.kind {
        Kind::Mass => run_mass(&ctx, s)?,
        Kind::Hj => run_hj(&ctx, s)?,
        Kind::Capsule => run_capsule(&ctx, s)?,
        Kind::Moser => run_moser(&ctx, s)?,
        Kind::Crosscheck => run_crosscheck(&ctx, s)?,
        Kind::Penrose => run_penrose(&ctx, s)?,
    };
    let bundle = ReportBundle {
        name: s.name.clone(),
        scenario: s.canonical(),
        records,
        verdicts,
        provenance: Provenance {
            artifact_version: ARTIFACT_VERSION.to_string(),
            catalog_version: CATALOG_VERSION.to_string(),
            cache_key: key.clone(),
            wall_time_s: start.elapsed().as_secs_f64(),
        },
    };
    if let Some(c) = cache {
        c.store(&key, &bundle)?;
    }
    Ok(bundle)
}

type Outcome = (Records, Vec<Verdict>);

fn mass_rows(est: &alemass_core::MassEstimate, kappa: f64) -> Vec<MassRowRecord> {
    est.rows(kappa)
        .into_iter()
        .map(|r| MassRowRecord {
            rho: r.rho,
            integrand: r.integrand,
            running_extrapolation: r.running_extrapolation,
            residual: r.residual,
        })
        .collect()
}

fn estimate_mass(
    ctx: &Ctx,
    spec: &MetricSpec,
    rule_order: i64,
    radii: Option<&Vec<f64>>,
    threshold: f64,
) -> Result<(alemass_core::MetricField, alemass_core::MassEstimate, f64)> {
    let field = ctx.core(spec.build::<f64>())?;
    let schedule = radii
        .cloned()
        .unwrap_or_else(|| default_schedule(field.chart.inner_radius));
    let kappa = field.chart.falloff_epsilon;
    let cfg = MassConfig {
        rule_order: rule_order as usize,
        two_term_threshold: threshold,
        kappa_init: Some(kappa),
    };
    let est = ctx.core(chrusciel_mass_with(&field, &schedule, &cfg))?;
    Ok((field, est, kappa))
}

fn run_mass(ctx: &Ctx, s: &Scenario) -> Result<Outcome> {
    let m = s.mass.as_ref().expect("validated");
    let spec = s.metric_spec()?;
    let (field, est, kappa) = estimate_mass(
        ctx,
        &spec,
        m.rule_order,
        m.radii.as_ref(),
        m.two_term_threshold,
    )?;
    let expected = m.expected.or_else(|| spec.expected_mass());
    let mut verdicts = vec![Verdict::new(
        "mass.convergent",
        !est.non_convergent,
        format!("fitted decay {:.6}", est.fitted_decay),
    )];
    if let Some(e) = expected {
        let err = (est.extrapolated_mass - e).abs();
        let pass = err <= m.tolerance * e.abs() || err <= m.abs_tolerance;
        verdicts.push(Verdict::new(
            "mass.expected",
            pass,
            format!(
                "mass {:.12e} vs expected {e:.12e} (abs err {err:.3e})",
                est.extrapolated_mass
            ),
        ));
    }
    let falloff = if m.check_falloff {
        let rep = ctx.core(verify_falloff(
            &field,
            &FallOffConfig::for_inner_radius(field.chart.inner_radius),
        ))?;
        verdicts.push(Verdict::new(
            "mass.falloff",
            rep.pass,
            format!(
                "slopes g {}, dg {}{}",
                fmt_opt(rep.slope_g),
                fmt_opt(rep.slope_dg),
                if rep.inconclusive {
                    " (at noise floor)"
                } else {
                    ""
                }
            ),
        ));
        Some(FalloffRecord {
            slope_g: rep.slope_g,
            slope_dg: rep.slope_dg,
            pass: rep.pass,
            inconclusive: rep.inconclusive,
        })
    } else {
        None
    };
    let record = MassRecord {
        metric: spec.to_string(),
        group_order: est.group_order,
        rows: mass_rows(&est, kappa),
        extrapolated_mass: est.extrapolated_mass,
        fitted_decay: est.fitted_decay,
        residual: est.residual,
        non_convergent: est.non_convergent,
        warning: est.warning.clone(),
        expected,
        falloff,
    };
    Ok((Records::Mass(record), verdicts))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("none".into(), |s| format!("{s:.4}"))
}

fn run_hj(ctx: &Ctx, s: &Scenario) -> Result<Outcome> {
    let h = s.hj.as_ref().expect("validated");
    let string = ctx.core(hj_resolve(h.q, h.p))?;
    let dual_p = (1..h.q)
        .find(|d| (d * h.p).rem_euclid(h.q) == 1)
        .expect("coprime");
    let dual = ctx.core(hj_resolve(h.q, dual_p))?;
    let form = plumbing_matrix(&string.chain);
    let bp = b_plus(&form);
    let det = determinant(&form);
    let back = ctx.core(alemass_core::hj::hj_evaluate(&string.chain))?;
    let mut rev = dual.chain.clone();
    rev.reverse();
    let verdicts = vec![
        Verdict::new(
            "hj.roundtrip",
            back == alemass_core::Rational::new(h.q.into(), h.p.into()),
            format!("evaluates to {back}"),
        ),
        Verdict::new(
            "hj.negative_definite",
            bp == 0 && det.magnitude() == &(h.q as u64).into(),
            format!("b+ = {bp}, det = {det}"),
        ),
        Verdict::new(
            "hj.dual_reversal",
            rev == string.chain,
            format!("dual type ({},{dual_p})", h.q),
        ),
    ];
    let record = HjRecord {
        q: h.q,
        p: h.p,
        chain: string.chain.clone(),
        intermediates: string.intermediates.iter().map(|r| r.to_string()).collect(),
        dual_p,
        dual_chain: dual.chain,
        plumbing: form.matrix.clone(),
        labels: form.labels.clone(),
        b_plus: bp,
        determinant: det.to_string(),
    };
    Ok((Records::Hj(record), verdicts))
}

fn run_capsule(ctx: &Ctx, s: &Scenario) -> Result<Outcome> {
    let c = s.capsule.as_ref().expect("validated");
    let group = s.capsule_group()?;
    let local = s.capsule_local()?;
    let model = ctx.core(build_capsule(c.ell, group, &local, s.central_weight()?))?;
    let is_tree = model.tree.is_tree();
    let verdicts = vec![
        Verdict::new(
            "capsule.degree",
            model.degree == 2 + c.ell,
            format!("degree {}", model.degree),
        ),
        Verdict::new(
            "capsule.tree",
            is_tree,
            format!("{} vertices", model.tree.vertices.len()),
        ),
        Verdict::new(
            "capsule.profile",
            true,
            format!("{group} profile {:?}", group.classify_singularities()),
        ),
    ];
    let record = CapsuleRecord {
        ell: c.ell,
        group: group.to_string(),
        profile: group.classify_singularities(),
        local_types: local,
        chains: model.chains.iter().map(|h| h.chain.clone()).collect(),
        vertices: model
            .tree
            .vertices
            .iter()
            .map(|v| CapsuleVertex {
                label: v.label.clone(),
                weight: v.weight.as_ref().map(|w| w.to_string()),
            })
            .collect(),
        edges: model.tree.edges.clone(),
        degree: model.degree,
        is_tree,
        adjacency: model.tree.adjacency_list(),
    };
    Ok((Records::Capsule(record), verdicts))
}

fn run_moser(ctx: &Ctx, s: &Scenario) -> Result<Outcome> {
    let m = s.moser.as_ref().expect("validated");
    let (spec, family): (PerturbationSpec<f64>, String) = match m.family {
        MoserFamily::Trivial => (ctx.core(PerturbationSpec::trivial(1.0))?, "trivial".into()),
        MoserFamily::Burns => {
            let c = m.c.expect("validated");
            (ctx.core(burns_spec(c))?, format!("burns:c={c}"))
        }
        MoserFamily::Synthetic => (ctx.core(synthetic_spec())?, "synthetic".into()),
    };
    let dir = linalg::vscale(&m.direction, linalg::norm(&m.direction).recip());
    let radii: Vec<f64> = m.seeds.clone().unwrap_or_else(|| {
        (0..=4)
            .map(|k| 1.01 * spec.safety_radius * 10f64.powf(k as f64 / 2.0))
            .collect()
    });
    let seeds: Vec<Vec4<f64>> = radii.iter().map(|&r| linalg::vscale(&dir, r)).collect();
    let steps = m.steps as usize;
    let flow = ctx.core(FlowMap::build(&spec, &seeds, steps, m.fd_step))?;
    let w0 = linalg::standard_symplectic::<f64>();
    let mut seed_rows = Vec::with_capacity(flow.samples.len());
    for smp in &flow.samples {
        let w = ctx.core(spec.omega.eval(&smp.endpoint))?;
        let pulled = linalg::matmul(
            &linalg::transpose(&smp.jacobian),
            &linalg::matmul(&w, &smp.jacobian),
        );
        seed_rows.push(SeedRecord {
            rho: linalg::norm(&smp.seed),
            displacement: smp.displacement,
            jacobian_defect: smp.jacobian_defect,
            jacobian_det: smp.jacobian_det,
            pullback_residual: linalg::two_form_norm(&linalg::sub(&pulled, &w0)),
        });
    }
    let residual = seed_rows
        .iter()
        .map(|r| r.pullback_residual)
        .fold(0.0, f64::max);
    let order_steps: Vec<usize> = m.order_steps.iter().map(|&n| n as usize).collect();
    let mut verdicts = vec![
        Verdict::new(
            "moser.invariants",
            flow.invariants_hold(),
            "|Phi(x) - x| < 1 and det DPhi > 0 at every seed",
        ),
        Verdict::new(
            "moser.pullback",
            residual <= m.pullback_tol,
            format!("residual {residual:.3e}"),
        ),
    ];
    let trivial = m.family == MoserFamily::Trivial;
    let order = if trivial {
        let moved = seed_rows.iter().map(|r| r.displacement).fold(0.0, f64::max);
        verdicts.push(Verdict::new(
            "moser.identity",
            moved <= 1e-12,
            format!("max displacement {moved:.3e}"),
        ));
        f64::NAN
    } else {
        let order = ctx.core(convergence_order(&spec, &seeds[0], &order_steps))?;
        verdicts.push(Verdict::new(
            "moser.order",
            (order - 4.0).abs() <= m.order_tol,
            format!("observed order {order:.4}"),
        ));
        order
    };
    let (dslope, jslope) = if trivial {
        (None, None)
    } else {
        let fall = ctx.core(falloff_fit(&flow, spec.epsilon, m.slope_tol))?;
        let rel =
            |s: Option<f64>, want: f64| s.is_some_and(|s| ((s - want) / want).abs() <= m.slope_tol);
        let pass = rel(fall.displacement_slope, -spec.epsilon)
            && rel(fall.jacobian_slope, -1.0 - spec.epsilon);
        verdicts.push(Verdict::new(
            "moser.falloff",
            pass,
            format!(
                "slopes {} (want {:.3}), {} (want {:.3})",
                fmt_opt(fall.displacement_slope),
                -spec.epsilon,
                fmt_opt(fall.jacobian_slope),
                -1.0 - spec.epsilon
            ),
        ));
        (fall.displacement_slope, fall.jacobian_slope)
    };
    let equivariance = match m.quotient {
        Some([q, p]) => {
            ctx.core(lens_generator(q as i64, p as i64))?;
            let tau = std::f64::consts::TAU;
            let g = linalg::unitary_diagonal(tau / q as f64, tau * p as f64 / q as f64);
            let d = ctx.core(equivariance_defect(&spec, &g, &seeds, steps))?;
            verdicts.push(Verdict::new(
                "moser.equivariance",
                d <= m.equivariance_tol,
                format!("lens({q},{p}) defect {d:.3e}"),
            ));
            Some(d)
        }
        None => None,
    };
    let record = MoserRecord {
        family,
        working_radius: spec.working_radius,
        safety_radius: spec.safety_radius,
        epsilon: spec.epsilon,
        steps,
        seeds: seed_rows,
        pullback_residual: residual,
        convergence_order: order,
        displacement_slope: dslope,
        jacobian_slope: jslope,
        equivariance_defect: equivariance,
    };
    Ok((Records::Moser(record), verdicts))
}

fn blowup(
    ctx: &Ctx,
    s: &Scenario,
    rule_order: i64,
    area_order: i64,
    area_radii: Option<&Vec<f64>>,
) -> Result<BlowupRecord> {
    let spec = s.metric_spec()?;
    let (field, est, kappa) = estimate_mass(ctx, &spec, rule_order, None, 1e-6)?;
    let pot = match spec.kind {
        MetricKind::Burns { c } => CatalogPotential::Burns { c },
        MetricKind::Flat => CatalogPotential::Flat,
        _ => {
            return Err(CliError::Config(
                "blow-up model needs a burns or flat metric".into(),
            ))
        }
    };
    let radii = area_radii
        .cloned()
        .unwrap_or_else(|| (0..6).map(|k| 0.1 * 0.5f64.powi(k)).collect());
    let area = ctx.core(exceptional_area(&pot, &radii, area_order as usize))?;
    // Both families are scalar-flat everywhere, so nothing is missed inside
    // the integration sphere.
    let scalar = ctx.core(scalar_volume_integral(
        &field,
        0.0,
        &ScalarIntegralConfig::default(),
    ))?;
    let last = est.samples.last().map_or(f64::NAN, |s| s.1);
    Ok(BlowupRecord {
        metric: spec.to_string(),
        mass: est.extrapolated_mass,
        mass_rows: mass_rows(&est, kappa),
        exceptional_area: area.area,
        area_radii: area.radii.clone(),
        area_values: area.values.clone(),
        scalar_integral: scalar,
        mass_noise: est.residual + (est.extrapolated_mass - last).abs(),
        area_noise: area.residual + (area.area - area.values[area.values.len() - 1]).abs(),
    })
}

fn run_crosscheck(ctx: &Ctx, s: &Scenario) -> Result<Outcome> {
    let c = s.crosscheck.as_ref().expect("validated");
    let b = blowup(
        ctx,
        s,
        c.rule_order,
        c.area_rule_order,
        c.area_radii.as_ref(),
    )?;
    let model = ctx.core(BlowupModel::ae_blowup(
        vec![b.exceptional_area],
        b.scalar_integral,
    ))?;
    let rhs = ctx.core(mass_formula(&model))?;
    let check = crosscheck_mass_with(b.mass, rhs, c.tolerance, 1e-6);
    let verdicts = vec![Verdict::new(
        "crosscheck.mass_formula",
        check.pass,
        format!(
            "boundary {:.10e} vs formula {rhs:.10e} (rel {:.3e}, tol {})",
            b.mass, check.rel_err, c.tolerance
        ),
    )];
    Ok((
        Records::Crosscheck(CrosscheckRecord {
            blowup: b,
            formula_mass: rhs,
            rel_err: check.rel_err,
        }),
        verdicts,
    ))
}

fn run_penrose(ctx: &Ctx, s: &Scenario) -> Result<Outcome> {
    let p = s.penrose.as_ref().expect("validated");
    let b = blowup(
        ctx,
        s,
        p.rule_order,
        p.area_rule_order,
        p.area_radii.as_ref(),
    )?;
    let divisors = ctx.core(DivisorData::new(vec![(1, b.exceptional_area)]))?;
    let mass = b.mass + p.scalar_bump / (12.0 * PI * PI);
    let noise = b.mass_noise + b.area_noise / (3.0 * PI);
    let v = penrose_check(mass, &divisors, p.eq_tol + noise);
    let mut verdicts = vec![Verdict::new(
        "penrose.bound",
        v.satisfied,
        format!("mass {mass:.10e} >= bound {:.10e}", v.lower_bound),
    )];
    if p.scalar_bump == 0.0 {
        verdicts.push(Verdict::new(
            "penrose.equality",
            v.gap.abs() <= p.eq_tol + noise,
            format!("gap {:.3e}, allowance {:.3e}", v.gap, p.eq_tol + noise),
        ));
    } else {
        verdicts.push(Verdict::new(
            "penrose.strict",
            v.gap > p.eq_tol + noise,
            format!("gap {:.3e} with s > 0", v.gap),
        ));
    }
    let record = PenroseRecord {
        blowup: b,
        scalar_bump: p.scalar_bump,
        mass,
        lower_bound: v.lower_bound,
        gap: v.gap,
    };
    Ok((Records::Penrose(record), verdicts))
}
