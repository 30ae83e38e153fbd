use rayon::prelude::*;
use serde::Serialize;

use super::{moser_field, PerturbationSpec};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat4, Vec4};
use crate::numerics::loglog_slope;
use crate::scalar::Real;

/// Classical RK4 for `dx/dt = X_t(x)` on `[t0, t1]`. The trajectory must
/// stay within distance 1 of `x0` and see `|X_t| < 1`.
pub fn integrate_flow_range<T: Real>(
    spec: &PerturbationSpec<T>,
    x0: &Vec4<T>,
    t0: T,
    t1: T,
    steps: usize,
) -> Result<Vec4<T>> {
    rk4(spec, x0, t0, t1, steps, true)
}

fn rk4<T: Real>(
    spec: &PerturbationSpec<T>,
    x0: &Vec4<T>,
    t0: T,
    t1: T,
    steps: usize,
    check_seed: bool,
) -> Result<Vec4<T>> {
    if steps == 0 {
        return Err(Error::InvalidSchedule(
            "at least one step is required".into(),
        ));
    }
    let rho0 = linalg::norm(x0);
    if check_seed && !(rho0 >= spec.safety_radius) {
        return Err(Error::FlowEscaped(format!(
            "seed radius {rho0} is inside the safety radius {}",
            spec.safety_radius
        )));
    }
    let h = (t1 - t0) / T::from_usize_lossy(steps);
    let half = T::lit(0.5);
    let field = |x: &Vec4<T>, t: T| -> Result<Vec4<T>> {
        let v = moser_field(spec, x, t)?;
        if !(linalg::norm(&v) < T::one()) {
            return Err(Error::FlowEscaped(format!(
                "|X_t| >= 1 at radius {}",
                linalg::norm(x)
            )));
        }
        Ok(v)
    };
    let mut x = *x0;
    for i in 0..steps {
        let t = t0 + h * T::from_usize_lossy(i);
        let k1 = field(&x, t)?;
        let k2 = field(
            &linalg::vadd(&x, &linalg::vscale(&k1, h * half)),
            t + h * half,
        )?;
        let k3 = field(
            &linalg::vadd(&x, &linalg::vscale(&k2, h * half)),
            t + h * half,
        )?;
        let k4 = field(&linalg::vadd(&x, &linalg::vscale(&k3, h)), t + h)?;
        for j in 0..4 {
            x[j] = x[j] + h / T::lit(6.0) * (k1[j] + T::lit(2.0) * (k2[j] + k3[j]) + k4[j]);
        }
        if !(linalg::norm(&linalg::vsub(&x, x0)) < T::one()) {
            return Err(Error::FlowEscaped(format!(
                "trajectory from radius {rho0} left the unit ball"
            )));
        }
    }
    Ok(x)
}

/// `Φ(x0)`: the time-one map.
pub fn integrate_flow<T: Real>(
    spec: &PerturbationSpec<T>,
    x0: &Vec4<T>,
    steps: usize,
) -> Result<Vec4<T>> {
    integrate_flow_range(spec, x0, T::zero(), T::one(), steps)
}

/// One seed of a [`FlowMap`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowSample<T> {
    pub seed: Vec4<T>,
    pub endpoint: Vec4<T>,
    /// `|Φ(x) − x|`.
    pub displacement: T,
    /// `DΦ` by central differences of re-integrated flows.
    pub jacobian: Mat4<T>,
    /// Frobenius norm of `DΦ − I`.
    pub jacobian_defect: T,
    pub jacobian_det: T,
}

/// Sampled time-one map with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowMap<T> {
    pub samples: Vec<FlowSample<T>>,
    pub steps: usize,
    pub h_t: T,
    pub t_range: (T, T),
    /// Relative finite-difference step for `DΦ`.
    pub fd_rel_step: T,
}

impl<T: Real> FlowMap<T> {
    /// Integrates every seed and its eight stencil neighbours, in parallel.
    pub fn build(
        spec: &PerturbationSpec<T>,
        seeds: &[Vec4<T>],
        steps: usize,
        fd_rel_step: T,
    ) -> Result<Self> {
        let samples = seeds
            .par_iter()
            .map(|x| sample(spec, x, steps, fd_rel_step))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            samples,
            steps,
            h_t: T::one() / T::from_usize_lossy(steps.max(1)),
            t_range: (T::zero(), T::one()),
            fd_rel_step,
        })
    }

    /// `|Φ(x) − x| < 1` and `det DΦ > 0` at every sample.
    pub fn invariants_hold(&self) -> bool {
        self.samples
            .iter()
            .all(|s| s.displacement < T::one() && s.jacobian_det > T::zero())
    }
}

fn sample<T: Real>(
    spec: &PerturbationSpec<T>,
    x: &Vec4<T>,
    steps: usize,
    rel: T,
) -> Result<FlowSample<T>> {
    let endpoint = integrate_flow(spec, x, steps)?;
    let h = linalg::norm(x) * rel;
    let mut jac = linalg::zeros();
    for l in 0..4 {
        let mut xp = *x;
        let mut xm = *x;
        xp[l] = xp[l] + h;
        xm[l] = xm[l] - h;
        // Stencil points may sit a hair inside the safety radius.
        let fp = rk4(spec, &xp, T::zero(), T::one(), steps, false)?;
        let fm = rk4(spec, &xm, T::zero(), T::one(), steps, false)?;
        for i in 0..4 {
            jac[i][l] = (fp[i] - fm[i]) / (h + h);
        }
    }
    Ok(FlowSample {
        seed: *x,
        endpoint,
        displacement: linalg::norm(&linalg::vsub(&endpoint, x)),
        jacobian: jac,
        jacobian_defect: linalg::frobenius(&linalg::sub(&jac, &linalg::identity())),
        jacobian_det: linalg::determinant(&jac),
    })
}

/// `sup |(DΦ)ᵀ ω(Φ(x)) DΦ − ω₀|` over the samples.
pub fn pullback_residual<T: Real>(flow: &FlowMap<T>, spec: &PerturbationSpec<T>) -> Result<T> {
    let w0 = linalg::standard_symplectic();
    let mut worst = T::zero();
    for s in &flow.samples {
        let w = spec.omega.eval(&s.endpoint)?;
        let pulled = linalg::matmul(
            &linalg::transpose(&s.jacobian),
            &linalg::matmul(&w, &s.jacobian),
        );
        worst = worst.max(linalg::two_form_norm(&linalg::sub(&pulled, &w0)));
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowFalloff<T> {
    pub displacement_slope: Option<T>,
    pub jacobian_slope: Option<T>,
    pub pass: bool,
    /// Displacements are at round-off; no slope was fitted.
    pub inconclusive: bool,
}

/// Log–log slopes of `|Φ(x) − x|` and `|DΦ − I|` against `ρ`; pass iff
/// they are at most `−ε + tol` and `−1 − ε + tol`.
pub fn falloff_fit<T: Real>(flow: &FlowMap<T>, epsilon: T, slope_tol: T) -> Result<FlowFalloff<T>> {
    let rho: Vec<T> = flow.samples.iter().map(|s| linalg::norm(&s.seed)).collect();
    let (lo, hi) = rho.iter().fold((T::infinity(), T::zero()), |(lo, hi), r| {
        (lo.min(*r), hi.max(*r))
    });
    if rho.len() < 3 || !((hi / lo).log10() >= T::lit(1.5) - T::lit(1e-9)) {
        return Err(Error::InsufficientRange(
            "flow seeds must span at least 1.5 decades".into(),
        ));
    }
    let fit = |vals: Vec<T>, floor: &dyn Fn(T) -> T| -> Option<T> {
        let (xs, ys): (Vec<T>, Vec<T>) = rho
            .iter()
            .zip(vals)
            .filter(|(r, v)| *v > floor(**r))
            .map(|(r, v)| (*r, v))
            .unzip();
        if xs.len() < 3 {
            None
        } else {
            loglog_slope(&xs, &ys)
        }
    };
    let eps_floor = T::epsilon() * T::lit(1e3);
    let disp = fit(
        flow.samples.iter().map(|s| s.displacement).collect(),
        &|r| eps_floor * r,
    );
    let jac = fit(
        flow.samples.iter().map(|s| s.jacobian_defect).collect(),
        &|_| eps_floor / flow.fd_rel_step,
    );
    let ok_d = disp.is_none_or(|s| s <= -epsilon + slope_tol);
    let ok_j = jac.is_none_or(|s| s <= -T::one() - epsilon + slope_tol);
    Ok(FlowFalloff {
        displacement_slope: disp,
        jacobian_slope: jac,
        pass: ok_d && ok_j,
        inconclusive: disp.is_none(),
    })
}

/// `max |Φ(γx) − γΦ(x)|` over the seeds.
pub fn equivariance_defect<T: Real>(
    spec: &PerturbationSpec<T>,
    generator: &Mat4<T>,
    seeds: &[Vec4<T>],
    steps: usize,
) -> Result<T> {
    let defects = seeds
        .par_iter()
        .map(|x| {
            let a = integrate_flow(spec, &linalg::matvec(generator, x), steps)?;
            let b = linalg::matvec(generator, &integrate_flow(spec, x, steps)?);
            Ok(linalg::norm(&linalg::vsub(&a, &b)))
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(defects.into_iter().fold(T::zero(), T::max))
}

/// Observed order `p` from `|Φ_n − Φ_{2n}| ∝ n^{−p}` over the doubling
/// sequence `steps`.
pub fn convergence_order<T: Real>(
    spec: &PerturbationSpec<T>,
    x0: &Vec4<T>,
    steps: &[usize],
) -> Result<T> {
    let ends = steps
        .iter()
        .flat_map(|&n| [n, 2 * n])
        .map(|n| integrate_flow(spec, x0, n))
        .collect::<Result<Vec<_>>>()?;
    let ns: Vec<T> = steps.iter().map(|&n| T::from_usize_lossy(n)).collect();
    let diffs: Vec<T> = ends
        .chunks(2)
        .map(|p| linalg::norm(&linalg::vsub(&p[0], &p[1])))
        .collect();
    loglog_slope(&ns, &diffs)
        .map(|s| -s)
        .ok_or_else(|| Error::FitDivergence("step-doubling differences are not positive".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moser::{burns_spec, synthetic_spec};

    fn burns_exact(c: f64, x: &Vec4<f64>) -> Vec4<f64> {
        let r2 = linalg::dot(x, x);
        linalg::vscale(x, (1.0 - c / r2).sqrt())
    }

    #[test]
    fn trivial_spec_is_identity() {
        let spec = PerturbationSpec::<f64>::trivial(1.0).unwrap();
        let x = [3.0, 1.0, -2.0, 0.5];
        assert_eq!(integrate_flow(&spec, &x, 8).unwrap(), x);
    }

    #[test]
    fn burns_endpoint_matches_closed_form() {
        let c = 0.5;
        let spec = burns_spec::<f64>(c).unwrap();
        for r in [spec.safety_radius, 10.0, 100.0] {
            let x = [r * 0.6, 0.0, 0.0, r * 0.8];
            let end = integrate_flow(&spec, &x, 64).unwrap();
            let err = linalg::norm(&linalg::vsub(&end, &burns_exact(c, &x)));
            assert!(err < 1e-10, "r = {r}, err = {err:e}");
        }
    }

    #[test]
    fn rk4_order_is_four_near_safety_radius() {
        let c = 0.5;
        let spec = burns_spec::<f64>(c).unwrap();
        let x = [spec.safety_radius, 0.0, 0.0, 0.0];
        let errs: Vec<f64> = [4usize, 8, 16, 32]
            .iter()
            .map(|&n| {
                let e = integrate_flow(&spec, &x, n).unwrap();
                linalg::norm(&linalg::vsub(&e, &burns_exact(c, &x)))
            })
            .collect();
        let ns = [4.0, 8.0, 16.0, 32.0];
        let p = -loglog_slope(&ns, &errs).unwrap();
        assert!((p - 4.0).abs() < 0.3, "order {p}, errors {errs:?}");
        let q = convergence_order(&spec, &x, &[4, 8, 16]).unwrap();
        assert!((q - 4.0).abs() < 0.3, "step-doubling order {q}");
    }

    #[test]
    fn seeds_inside_safety_radius_are_rejected() {
        let spec = burns_spec::<f64>(0.5).unwrap();
        let x = [spec.safety_radius * 0.9, 0.0, 0.0, 0.0];
        assert!(matches!(
            integrate_flow(&spec, &x, 8),
            Err(Error::FlowEscaped(_))
        ));
    }

    #[test]
    fn burns_flow_map_pulls_back_and_decays() {
        let spec = burns_spec::<f64>(0.5).unwrap();
        let seeds: Vec<Vec4<f64>> = (0..7)
            .map(|k| {
                let r = spec.safety_radius * 2f64.powi(k);
                [r * 0.5, r * 0.5, r * 0.5, -r * 0.5]
            })
            .collect();
        let flow = FlowMap::build(&spec, &seeds, 32, 1e-4).unwrap();
        assert!(flow.invariants_hold());
        let res = pullback_residual(&flow, &spec).unwrap();
        assert!(res < 1e-6, "pullback residual {res:e}");
        let fall = falloff_fit(&flow, 1.0, 0.1).unwrap();
        assert!(fall.pass, "{fall:?}");
        let d = fall.displacement_slope.unwrap();
        assert!((d + 1.0).abs() < 0.05, "displacement slope {d}");
    }

    #[test]
    fn synthetic_flow_decays_at_half_rate() {
        let spec = synthetic_spec::<f64>().unwrap();
        let seeds: Vec<Vec4<f64>> = (0..7)
            .map(|k| {
                let r = spec.safety_radius * 2f64.powi(k);
                [0.0, r, 0.0, 0.0]
            })
            .collect();
        let flow = FlowMap::build(&spec, &seeds, 32, 1e-4).unwrap();
        let fall = falloff_fit(&flow, 0.5, 0.1).unwrap();
        assert!(fall.pass, "{fall:?}");
        let d = fall.displacement_slope.unwrap();
        assert!((d + 0.5).abs() < 0.1, "displacement slope {d}");
    }

    #[test]
    fn radial_flow_commutes_with_unitary_rotation() {
        let spec = burns_spec::<f64>(0.5).unwrap();
        let g = linalg::unitary_diagonal(0.5, -0.5);
        let seeds = [[5.0, 1.0, 0.0, 2.0], [0.0, 7.0, 3.0, -1.0]];
        let d = equivariance_defect(&spec, &g, &seeds, 32).unwrap();
        assert!(d < 1e-9, "defect {d:e}");
    }
}
