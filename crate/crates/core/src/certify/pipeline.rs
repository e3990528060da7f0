//! The end-to-end certificate for one instance: construction, the
//! inequality chain, the hyperbolicity report, saddle structure, critical
//! capture and the accumulation estimator comparison, folded into a single
//! deterministic verdict.

use super::checks::{
    check_angle_combinatorics, check_contract, check_critical_disjoint, check_escape_constant,
    check_escape_empirical, check_fiber_escape, check_k_box, check_reach_left, reach_scan,
    FIBER_TRAP_RADIUS,
};
use super::{CertifyError, LemmaParams, LemmaReport, Region};
use crate::biquad::{construct_example, ExampleInstance};
use crate::dynamics::{critical_points_over, Point2};
use crate::invariant::{
    axiom_a_check, classify_critical, estimate_accumulation, find_saddles, AccumulationKind,
    StableLabel, DEFAULT_CLUSTER_EPS,
};
use crate::julia::{
    boundary_extract, filled_julia_base, hausdorff_distance, CloudTag, GridSpec, PointCloud,
};
use crate::numeric::DEFAULT_ROOT_TOL;
use num_complex::Complex64;
use serde_json::{json, Value};

/// Knobs for [`full_certificate`]. The defaults are the constants the
/// checks were calibrated with; the box grid has odd pixel counts so a
/// pixel row samples the real axis exactly.
#[derive(Debug, Clone)]
pub struct CertConfig {
    /// Perturbation request handed to the constructor.
    pub eta0: f64,
    /// Excluded-disk radius around 2 for the base-side scans.
    pub r: f64,
    /// Contraction slab half-height.
    pub delta_prime: f64,
    /// Preimage tower depth for the angle check.
    pub angle_depth: usize,
    /// Step budget for the left-half-plane entry scan.
    pub reach_cap: usize,
    /// Cluster radius for the accumulation estimators.
    pub cluster_eps: f64,
    /// How close the saddle must sit to the designed fixed point.
    pub location_tol: f64,
}

impl Default for CertConfig {
    fn default() -> Self {
        CertConfig {
            eta0: 1e-3,
            r: 1.0 / 32.0,
            delta_prime: 0.2,
            angle_depth: 10,
            reach_cap: 16,
            cluster_eps: DEFAULT_CLUSTER_EPS,
            location_tol: 1e-6,
        }
    }
}

/// Everything [`full_certificate`] concluded: one report per check, sorted
/// by id, with the overall verdict and the ids that failed it.
#[derive(Debug, Clone)]
pub struct CertificateOutcome {
    pub n: usize,
    pub reports: Vec<LemmaReport>,
    pub pass: bool,
    pub failing: Vec<String>,
}

impl CertificateOutcome {
    fn from_reports(n: usize, mut reports: Vec<LemmaReport>) -> Self {
        reports.sort_by(|a, b| a.lemma_id.cmp(&b.lemma_id));
        let failing: Vec<String> = reports
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.lemma_id.clone())
            .collect();
        CertificateOutcome {
            n,
            pass: failing.is_empty(),
            failing,
            reports,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "pass": self.pass,
            "failing": self.failing,
            "reports": self.reports.iter().map(LemmaReport::to_json).collect::<Vec<_>>(),
        })
    }
}

/// The standard seed cloud for the estimator comparison: the critical
/// fiber point over the base fixed point, a geometric ladder of base
/// offsets from it, and a spread of base boundary pixels, all at the
/// critical fiber height.
fn standard_seeds(inst: &ExampleInstance) -> Result<PointCloud, CertifyError> {
    let mut pts = vec![Point2::new(
        Complex64::new(inst.beta_n, 0.0),
        Complex64::new(0.0, 0.0),
    )];
    for k in 0..=20 {
        let delta = 1e-9 * 10.0f64.powf(k as f64 * 0.25);
        pts.push(Point2::new(
            Complex64::new(inst.beta_n - delta, 0.0),
            Complex64::new(0.0, 0.0),
        ));
    }
    let b = inst.box_hull;
    let spec = GridSpec::new(
        Complex64::new(0.5 * (b[0] + b[1]), 0.5 * (b[2] + b[3])),
        0.55 * (b[1] - b[0]),
        (0.55 * (b[3] - b[2])).max(0.1),
        256,
        128,
    )?;
    let grid = filled_julia_base(inst.f.base(), &spec, 256, inst.f.base_escape_radius());
    for z in boundary_extract(&grid)?
        .plane_points()
        .ok_or_else(|| CertifyError::PreconditionViolation("boundary cloud not planar".into()))?
        .iter()
        .step_by(7)
    {
        pts.push(Point2::new(*z, Complex64::new(0.0, 0.0)));
    }
    Ok(PointCloud::space(CloudTag::Generic, pts))
}

/// Runs every check on the instance for `n` and folds the dynamical
/// estimators into the same report list.
///
/// The verdict passes only when every entry passes; entries that refuse to
/// run at the measured scales are recorded as failed with the refusal in
/// their evidence, never skipped. The report list is sorted by id and its
/// JSON form is deterministic run to run.
pub fn full_certificate(n: usize, config: &CertConfig) -> Result<CertificateOutcome, CertifyError> {
    let mut reports: Vec<LemmaReport> = Vec::new();

    let inst = match construct_example(n, config.eta0) {
        Ok(inst) => inst,
        Err(err) => {
            let report = LemmaReport::new(
                "construct",
                LemmaParams {
                    n,
                    ..Default::default()
                },
                -1.0,
                format!("construction failed: {err}"),
            );
            return Ok(CertificateOutcome::from_reports(n, vec![report]));
        }
    };
    let eps = inst.epsilon_n;
    reports.push(LemmaReport::new(
        "construct",
        LemmaParams {
            n,
            eps_n: eps,
            ..Default::default()
        },
        inst.eta,
        format!(
            "instance built at eta = {:e}; fixed point ({:.9}, {:.9} + {:.3e} i)",
            inst.eta, inst.beta_n, inst.alpha_n.re, inst.alpha_n.im
        ),
    ));

    // the base box the trap estimate needs, with room above the measured one
    let region = Region::rect([-FIBER_TRAP_RADIUS, FIBER_TRAP_RADIUS], [-0.25, 0.25])?;
    reports.push(check_fiber_escape(&region)?);

    let kbox_grid = GridSpec::new(Complex64::new(0.0, 0.0), 2.6, 0.6, 521, 241)?;
    reports.push(check_k_box(
        inst.f.base(),
        inst.f.base_escape_radius(),
        &kbox_grid,
    )?);

    reports.push(check_reach_left(&inst, config.r, config.reach_cap)?);
    let (n_obs, _) = reach_scan(&inst, config.r, config.reach_cap)?;
    let n_steps = n_obs.unwrap_or(0) + 1;

    // the largest slab height the growth budget could accept, floored at a
    // token height when the measured axis height already exhausts it
    let budget = (6.0f64.sqrt() / 10.0) / 64.0f64.powi(n_steps as i32) - 4.0 * eps / 63.0;
    let delta = if budget > 0.0 { 0.98 * budget } else { 1e-9 };

    reports.push(check_escape_constant(n_steps, delta, eps)?);

    let empirical_params = LemmaParams {
        n,
        r: config.r,
        delta,
        eps_n: eps,
        n_steps,
        ..Default::default()
    };
    reports.push(
        match check_escape_empirical(&inst, config.r, delta, n_steps) {
            Ok(report) => report,
            Err(err @ CertifyError::PreconditionViolation(_)) => {
                LemmaReport::refused("escape-empirical", empirical_params, &err)
            }
            Err(err) => return Err(err),
        },
    );

    reports.push(check_contract(config.r, config.delta_prime, eps)?);
    reports.push(check_angle_combinatorics(config.angle_depth)?);

    let disjoint_params = LemmaParams {
        n,
        r: config.r,
        delta,
        delta_prime: config.delta_prime,
        eps_n: eps,
        n_steps,
    };
    reports.push(match check_critical_disjoint(&inst, delta) {
        Ok(report) => report,
        Err(err @ CertifyError::PreconditionViolation(_)) => {
            LemmaReport::refused("critical-disjoint", disjoint_params, &err)
        }
        Err(err) => return Err(err),
    });

    let axiom = axiom_a_check(&inst.f)?;
    reports.push(LemmaReport::new(
        "hyperbolicity",
        LemmaParams {
            n,
            ..Default::default()
        },
        if axiom.pass() {
            axiom.margin_j.min(axiom.margin_a)
        } else {
            -1.0
        },
        format!(
            "base hyperbolic: {}; separation margins {:.6} over the boundary \
             fibers and {:.6} over the attracting ones; fibers sampled {}/{} \
             with {} skipped",
            axiom.base_hyperbolic,
            axiom.margin_j,
            axiom.margin_a,
            axiom.julia_fibers,
            axiom.attracting_fibers,
            axiom.skipped_fibers
        ),
    ));

    let beta = Complex64::new(inst.beta_n, 0.0);
    let target = Point2::new(beta, inst.alpha_n);
    let saddles = find_saddles(&inst.f, 2)?;
    let nearest = saddles
        .saddles
        .iter()
        .filter(|s| s.period == 1)
        .map(|s| s.location.dist(&target))
        .fold(f64::INFINITY, f64::min);
    let saddle_margin = if saddles.n_components == 1 {
        config.location_tol - nearest
    } else {
        -(saddles.n_components as f64)
    };
    reports.push(LemmaReport::new(
        "saddle-structure",
        LemmaParams {
            n,
            ..Default::default()
        },
        saddle_margin,
        format!(
            "{} saddle(s) in {} component(s); nearest period-1 saddle sits \
             {nearest:.3e} from the designed fixed point (tolerance {:.1e})",
            saddles.saddles.len(),
            saddles.n_components,
            config.location_tol
        ),
    ));

    let crit = critical_points_over(&inst.f, beta, DEFAULT_ROOT_TOL)?;
    let crit_distinct = crit.roots.len();
    let crit_off = crit
        .roots
        .iter()
        .map(|(w, _)| w.norm())
        .fold(0.0f64, f64::max);
    let classify = classify_critical(
        &inst.f,
        &saddles,
        &PointCloud::plane(CloudTag::Generic, vec![beta]),
        192,
        1e-6,
    )?;
    let captured = classify.fraction(StableLabel::Captured(1));
    let capture_margin = if crit_distinct == 1 && crit_off < config.location_tol {
        captured - 0.99
    } else {
        -1.0
    };
    reports.push(LemmaReport::new(
        "critical-capture",
        LemmaParams {
            n,
            ..Default::default()
        },
        capture_margin,
        format!(
            "critical fiber set over the fixed base point has {crit_distinct} \
             distinct point(s), largest modulus {crit_off:.3e}; fraction \
             captured by the saddle component: {captured:.3}"
        ),
    ));

    let seeds = standard_seeds(&inst)?;
    let eps_c = config.cluster_eps;
    let pt = estimate_accumulation(&inst.f, AccumulationKind::Pointwise, &seeds, 4, 7, eps_c)?;
    let cc = estimate_accumulation(&inst.f, AccumulationKind::Componentwise, &seeds, 4, 7, eps_c)?;
    let full = estimate_accumulation(&inst.f, AccumulationKind::Full, &seeds, 4, 7, eps_c)?;
    let target_cloud = PointCloud::space(CloudTag::Generic, vec![target]);

    let d_pt_cc = hausdorff_distance(&pt.cloud, &cc.cloud)?;
    let d_pt_saddle = hausdorff_distance(&pt.cloud, &target_cloud)?;
    let far_full = full
        .clusters()
        .iter()
        .map(|c| c.centroid.dist(&target))
        .fold(0.0f64, f64::max);
    let far_pt = pt
        .clusters()
        .iter()
        .map(|c| c.centroid.dist(&target))
        .fold(0.0f64, f64::max);
    let chain_pt_cc = directed_gap(&pt.cloud, &cc.cloud)?;
    let chain_cc_full = directed_gap(&cc.cloud, &full.cloud)?;
    let gap_margin = (2.0 * eps_c - d_pt_cc)
        .min(5.0 * eps_c - d_pt_saddle)
        .min(far_full - 10.0 * eps_c)
        .min(10.0 * eps_c - far_pt)
        .min(2.0 * eps_c - chain_pt_cc)
        .min(2.0 * eps_c - chain_cc_full);
    reports.push(LemmaReport::new(
        "estimator-gap",
        LemmaParams {
            n,
            ..Default::default()
        },
        gap_margin,
        format!(
            "pointwise and componentwise agree to {d_pt_cc:.3e} and hug the \
             saddle to {d_pt_saddle:.3e}; the full estimate keeps a transient \
             cluster {far_full:.3e} away while the farthest pointwise cluster \
             sits {far_pt:.3e} away; inclusion gaps {chain_pt_cc:.3e} and \
             {chain_cc_full:.3e}"
        ),
    ));

    Ok(CertificateOutcome::from_reports(n, reports))
}

/// Largest distance from a point of `a` to the set `b`: the one-sided part
/// of the Hausdorff distance, for inclusion checks.
fn directed_gap(a: &PointCloud, b: &PointCloud) -> Result<f64, CertifyError> {
    let pts = a
        .space_points()
        .ok_or_else(|| CertifyError::PreconditionViolation("expected a cloud in C^2".into()))?;
    let mut worst = 0.0f64;
    for p in pts {
        let single = PointCloud::space(CloudTag::Generic, vec![*p]);
        worst = worst.max(crate::julia::min_distance(&single, b)?);
    }
    Ok(worst)
}
