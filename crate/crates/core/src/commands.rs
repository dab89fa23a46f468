//! The five report-producing operations behind the CLI: analyze, parallel,
//! bonnet, roots and verify.

use crate::bonnet::{self, BonnetCandidate, BonnetError, CandidateReport, CandidateStatus};
use crate::expr::{self, Expression};
use crate::frame::{
    curvature_functions, frame_residuals, CurvatureSet, FrameError, NormalizationMode,
    RelativeFrame,
};
use crate::linalg::{self, Mat3};
use crate::parallel::{self, OffsetError};
use crate::report::{
    CheckRecord, NamedValue, PointRecord, Report, StarPointRecord, Summary, SurfaceInfo, SCHEMA,
};
use crate::rng::Sampler;
use crate::surface::{Orientation, SpecError, SurfaceSpec};
use crate::tol;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("at grid point {point:?}: {source}")]
    AtPoint {
        point: [f64; 3],
        source: OffsetError,
    },
    #[error(transparent)]
    Bonnet(#[from] BonnetError),
    #[error("{0}")]
    Input(String),
}

struct Sample {
    point: [f64; 3],
    frame: RelativeFrame,
    curv: CurvatureSet,
}

struct Sweep {
    orientation: f64,
    samples: Vec<Sample>,
}

fn sweep(spec: &SurfaceSpec, grid: [usize; 3]) -> Result<Sweep, CommandError> {
    let orientation = spec.resolve_orientation()?;
    let mut samples = Vec::new();
    for point in spec.grid_points(grid) {
        let (frame, curv) = spec
            .frame_at(orientation, point)
            .map_err(|source| SpecError::Validation { point, source })?;
        samples.push(Sample { point, frame, curv });
    }
    Ok(Sweep {
        orientation,
        samples,
    })
}

fn surface_info(spec: &SurfaceSpec, orientation: f64) -> SurfaceInfo {
    SurfaceInfo {
        name: spec.name.clone(),
        normalization: spec.normalization.to_string(),
        orientation,
        domain: spec.domain,
    }
}

fn base_point_record(sample: &Sample, with_residuals: bool) -> PointRecord {
    PointRecord {
        point: sample.point,
        h: sample.curv.h,
        h2: sample.curv.h2,
        k: sample.curv.k,
        kappas: sample.curv.kappas,
        radii: sample.curv.radii,
        residuals: with_residuals.then(|| frame_residuals(&sample.frame, &sample.curv)),
        star: None,
    }
}

/// Per-point curvature data, frame-law residuals and a constancy summary.
pub fn cmd_analyze(spec: &SurfaceSpec, grid: [usize; 3], tol: f64) -> Result<Report, CommandError> {
    let sweep = sweep(spec, grid)?;
    let mut points = Vec::with_capacity(sweep.samples.len());
    let mut maxima: Vec<(&str, f64)> = Vec::new();
    for sample in &sweep.samples {
        let record = base_point_record(sample, true);
        if let Some(res) = &record.residuals {
            for (name, value) in [
                ("weingarten", res.weingarten),
                ("b_symmetry", res.b_symmetry),
                ("y_tangency", res.y_tangency),
                ("conormal_orthogonality", res.conormal_orthogonality),
                ("conormal_normalization", res.conormal_normalization),
                ("conormal_scaling", res.conormal_scaling),
                ("metric_relation", res.metric_relation),
                ("mixed_consistency", res.mixed_consistency),
                ("radii_sum", res.radii_sum.unwrap_or(0.0)),
            ] {
                match maxima.iter_mut().find(|(n, _)| *n == name) {
                    Some(slot) => slot.1 = slot.1.max(value),
                    None => maxima.push((name, value)),
                }
            }
        }
        points.push(record);
    }
    let summary = Summary {
        constancy: constancy_of(&sweep.samples, tol),
        residual_max: maxima
            .into_iter()
            .map(|(name, value)| NamedValue {
                name: name.to_string(),
                value,
            })
            .collect(),
        ..Summary::default()
    };
    Ok(Report {
        schema: SCHEMA,
        surface: surface_info(spec, sweep.orientation),
        grid,
        points,
        summary,
        candidates: vec![],
    })
}

fn constancy_of(samples: &[Sample], tol: f64) -> Vec<bonnet::ConstancyReport> {
    let hs: Vec<f64> = samples.iter().map(|s| s.curv.h).collect();
    let h2s: Vec<f64> = samples.iter().map(|s| s.curv.h2).collect();
    let ks: Vec<f64> = samples.iter().map(|s| s.curv.k).collect();
    vec![
        bonnet::constancy("H", &hs, tol),
        bonnet::constancy("H2", &h2s, tol),
        bonnet::constancy("K", &ks, tol),
    ]
}

/// Starred curvature fields by both computation paths, their discrepancies,
/// the Peterson residual and the shared-quantity deviations at one offset.
pub fn cmd_parallel(spec: &SurfaceSpec, mu: f64, grid: [usize; 3]) -> Result<Report, CommandError> {
    if mu == 0.0 {
        return Err(CommandError::Input(
            "the relative distance mu must be nonzero".into(),
        ));
    }
    let sweep = sweep(spec, grid)?;
    let mut points = Vec::with_capacity(sweep.samples.len());
    let mut maxima: Vec<(&str, f64)> = vec![
        ("path_discrepancy", 0.0),
        ("operator_discrepancy", 0.0),
        ("peterson", 0.0),
        ("shared_q", 0.0),
        ("shared_conormal", 0.0),
        ("shared_b_form", 0.0),
        ("normal_identity", 0.0),
        ("invariant_drift", 0.0),
    ];
    for sample in &sweep.samples {
        let offset =
            parallel::parallel_offset(&sample.frame, &sample.curv, mu).map_err(|source| {
                CommandError::AtPoint {
                    point: sample.point,
                    source,
                }
            })?;
        let invariant_drift = match (
            parallel::invariant_j(&sample.curv),
            parallel::invariant_j(&offset.curv_star),
        ) {
            (Ok(j), Ok(j_star)) => Some((j - j_star).abs()),
            _ => None,
        };
        for (name, value) in [
            ("path_discrepancy", offset.curvature_discrepancy),
            ("operator_discrepancy", offset.operator_discrepancy),
            ("peterson", offset.peterson_residual),
            ("shared_q", offset.shared.q_deviation),
            ("shared_conormal", offset.shared.conormal_deviation),
            ("shared_b_form", offset.shared.b_form_deviation),
            ("normal_identity", offset.shared.normal_deviation),
            ("invariant_drift", invariant_drift.unwrap_or(0.0)),
        ] {
            let slot = maxima.iter_mut().find(|(n, _)| *n == name).unwrap();
            slot.1 = slot.1.max(value);
        }
        let mut record = base_point_record(sample, false);
        record.star = Some(StarPointRecord {
            a: offset.a,
            h: offset.curv_star.h,
            h2: offset.curv_star.h2,
            k: offset.curv_star.k,
            path_discrepancy: offset.curvature_discrepancy,
            operator_discrepancy: offset.operator_discrepancy,
            peterson_residual: offset.peterson_residual,
            shared: offset.shared,
            invariant_drift,
        });
        points.push(record);
    }
    let summary = Summary {
        mu: Some(mu),
        residual_max: maxima
            .into_iter()
            .map(|(name, value)| NamedValue {
                name: name.to_string(),
                value,
            })
            .collect(),
        ..Summary::default()
    };
    Ok(Report {
        schema: SCHEMA,
        surface: surface_info(spec, sweep.orientation),
        grid,
        points,
        summary,
        candidates: vec![],
    })
}

/// Applicability of each existence result, candidate distances from
/// grid-mean inputs and the measured constancy of the predicted function.
pub fn cmd_bonnet(spec: &SurfaceSpec, grid: [usize; 3], tol: f64) -> Result<Report, CommandError> {
    if grid.iter().any(|&n| n < 3) {
        return Err(CommandError::Input(format!(
            "grid {grid:?} must be at least 3x3x3 for candidate verification"
        )));
    }
    let sweep = sweep(spec, grid)?;
    let curvs: Vec<CurvatureSet> = sweep.samples.iter().map(|s| s.curv).collect();
    let outcome = bonnet::survey_curvatures(&curvs, tol);
    let nothing = outcome.candidates.iter().all(|c| c.candidate.is_none());
    let points = sweep
        .samples
        .iter()
        .map(|s| base_point_record(s, false))
        .collect();
    let summary = Summary {
        constancy: outcome.base_constancy,
        note: nothing.then(|| "nothing applicable: no curvature-function pair is constant".into()),
        ..Summary::default()
    };
    Ok(Report {
        schema: SCHEMA,
        surface: surface_info(spec, sweep.orientation),
        grid,
        points,
        summary,
        candidates: outcome.candidates,
    })
}

/// Pure formula evaluation of every candidate distance from explicit
/// curvature-function inputs.
pub fn cmd_roots(h: Option<f64>, h2: Option<f64>, k: Option<f64>) -> Report {
    let mut candidates: Vec<CandidateReport> = Vec::new();
    let mut push = |proposition: bonnet::Proposition,
                    result: Result<Vec<BonnetCandidate>, String>| match result {
        Ok(list) => {
            for candidate in list {
                candidates.push(CandidateReport {
                    proposition,
                    candidate: Some(candidate),
                    status: CandidateStatus::Formula,
                });
            }
        }
        Err(reason) => candidates.push(CandidateReport {
            proposition,
            candidate: None,
            status: CandidateStatus::NotApplicable { reason },
        }),
    };

    push(
        bonnet::Proposition::P6_1,
        match (h2, k) {
            (Some(h2), Some(k)) => bonnet::mu1(h2, k)
                .map(|c| vec![c])
                .map_err(|e| e.to_string()),
            _ => Err("requires --H2 and --K".into()),
        },
    );
    push(
        bonnet::Proposition::P6_3a,
        match (h, k) {
            (Some(h), Some(k)) => bonnet::mu2(h, k)
                .map(|c| vec![c])
                .map_err(|e| e.to_string()),
            _ => Err("requires --H and --K".into()),
        },
    );
    push(
        bonnet::Proposition::P6_3b,
        match (h, k) {
            (Some(h), Some(k)) => bonnet::mu3(h, k)
                .map(|c| {
                    let mut list = vec![c];
                    list.extend(bonnet::mu3_companion(h, k));
                    list
                })
                .map_err(|e| e.to_string()),
            _ => Err("requires --H and --K".into()),
        },
    );
    for (proposition, result) in [
        (
            bonnet::Proposition::P6_5a,
            match (h, h2) {
                (Some(h), Some(h2)) => bonnet::mu_pair_constant_k(h, h2).map_err(|e| e.to_string()),
                _ => Err("requires --H and --H2".into()),
            },
        ),
        (
            bonnet::Proposition::P6_5b,
            match (h, h2) {
                (Some(h), Some(h2)) => {
                    bonnet::mu_pair_constant_h2(h, h2).map_err(|e| e.to_string())
                }
                _ => Err("requires --H and --H2".into()),
            },
        ),
        (
            bonnet::Proposition::P6_5c,
            match (h, h2) {
                (Some(h), Some(h2)) => bonnet::mu_pair_constant_h(h, h2).map_err(|e| e.to_string()),
                _ => Err("requires --H and --H2".into()),
            },
        ),
    ] {
        push(proposition, result);
    }
    push(
        bonnet::Proposition::Minimal_5b,
        match (h, h2, k) {
            (Some(h), Some(h2), Some(k)) => bonnet::minimal_parallel_mus(h, h2, k)
                .map(|mus| {
                    mus.into_iter()
                        .map(|mu| BonnetCandidate {
                            proposition: bonnet::Proposition::Minimal_5b,
                            mu,
                            predicted: bonnet::Prediction {
                                field: bonnet::CurvatureField::H,
                                value: 0.0,
                            },
                            w: None,
                            root_residual: (mu * mu * k - 2.0 * mu * h2 + h).abs(),
                        })
                        .collect()
                })
                .map_err(|e| e.to_string()),
            _ => Err("requires --H, --H2 and --K".into()),
        },
    );
    push(
        bonnet::Proposition::H2Zero_Prop5_1,
        match (h2, k) {
            (Some(h2), Some(k)) => bonnet::h2_vanishing_mu(h2, k)
                .map_err(|e| e.to_string())
                .and_then(|mu| {
                    if mu.abs() < tol::RECIP_GUARD {
                        Err("H2 vanishes: no offset with vanishing H2*".into())
                    } else {
                        Ok(vec![BonnetCandidate {
                            proposition: bonnet::Proposition::H2Zero_Prop5_1,
                            mu,
                            predicted: bonnet::Prediction {
                                field: bonnet::CurvatureField::H2,
                                value: 0.0,
                            },
                            w: None,
                            root_residual: (-mu * k + h2).abs(),
                        }])
                    }
                }),
            _ => Err("requires --H2 and --K".into()),
        },
    );

    Report {
        schema: SCHEMA,
        surface: SurfaceInfo {
            name: "(formula inputs)".into(),
            normalization: "n/a".into(),
            orientation: 1.0,
            domain: [[0.0, 0.0]; 3],
        },
        grid: [0, 0, 0],
        points: vec![],
        summary: Summary::default(),
        candidates,
    }
}

struct Checks(Vec<CheckRecord>);

impl Checks {
    fn add(&mut self, name: &str, residual: f64, threshold: f64) {
        self.0.push(CheckRecord {
            name: name.to_string(),
            residual,
            threshold,
            pass: residual <= threshold,
        });
    }
}

/// Run the full invariant suite on a surface. The report's verdict is true
/// iff every check passes.
pub fn cmd_verify(spec: &SurfaceSpec, grid: [usize; 3]) -> Result<Report, CommandError> {
    let sweep = sweep(spec, grid)?;
    let mut checks = Checks(Vec::new());

    // frame laws: grid maxima of the per-point residuals
    let mut weingarten = 0.0f64;
    let mut b_symmetry = 0.0f64;
    let mut y_tangency = 0.0f64;
    let mut conormal_orth = 0.0f64;
    let mut conormal_norm = 0.0f64;
    let mut conormal_scaling = 0.0f64;
    let mut metric_relation = 0.0f64;
    let mut mixed_consistency = 0.0f64;
    let mut radii_sum = 0.0f64;
    for sample in &sweep.samples {
        let res = frame_residuals(&sample.frame, &sample.curv);
        weingarten = weingarten.max(res.weingarten);
        b_symmetry = b_symmetry.max(res.b_symmetry);
        y_tangency = y_tangency.max(res.y_tangency);
        conormal_orth = conormal_orth.max(res.conormal_orthogonality);
        conormal_norm = conormal_norm.max(res.conormal_normalization);
        conormal_scaling = conormal_scaling.max(res.conormal_scaling);
        metric_relation = metric_relation.max(res.metric_relation);
        mixed_consistency = mixed_consistency.max(res.mixed_consistency);
        if let Some(r) = res.radii_sum {
            radii_sum = radii_sum.max(r);
        }
    }
    checks.add("weingarten", weingarten, tol::FRAME_LAW_TOL);
    checks.add("b_symmetry", b_symmetry, tol::EXACT_LAW_TOL);
    checks.add("y_tangency", y_tangency, tol::EXACT_LAW_TOL);
    checks.add("conormal_orthogonality", conormal_orth, 1e-9);
    checks.add("conormal_normalization", conormal_norm, 1e-9);
    checks.add("conormal_scaling", conormal_scaling, 1e-9);
    checks.add("metric_relation", metric_relation, tol::EXACT_LAW_TOL);
    checks.add("mixed_consistency", mixed_consistency, tol::FRAME_LAW_TOL);
    checks.add("radii_sum", radii_sum, tol::FRAME_LAW_TOL);

    // the jet engine against finite differences of the plain evaluator,
    // on this surface's own coordinate expressions
    checks.add(
        "jet_finite_difference",
        jet_fd_residual(spec, &sweep),
        tol::FRAME_LAW_TOL,
    );

    // Euclidean reduction: with q = 1 the relative quantities coincide
    // with the classical Euclidean ones
    if matches!(spec.normalization, NormalizationMode::Euclidean) {
        let mut reduction = 0.0f64;
        for sample in &sweep.samples {
            let fr = &sample.frame;
            let (yv, xiv) = (fr.y.value(), fr.xi.value());
            for i in 0..4 {
                reduction = reduction.max((yv[i] - xiv[i]).abs());
            }
            reduction = reduction.max(linalg::max_abs_diff(&fr.rel_metric, &fr.h));
            let euclid_shape = euclidean_shape(&fr.g, &fr.h);
            if let (Some(shape), Some(kappas)) = (euclid_shape, sample.curv.kappas) {
                let euclid = curvature_functions(&shape);
                if let Some(ek) = euclid.kappas {
                    for i in 0..3 {
                        reduction = reduction.max((kappas[i] - ek[i]).abs());
                    }
                }
            }
        }
        checks.add("euclidean_reduction", reduction, tol::EXACT_LAW_TOL);
    }

    // orientation convention: an explicitly forced normal sign must agree
    // with the definiteness convention where the second fundamental form
    // is definite at the domain center
    if let Orientation::Fixed(_) = spec.orientation {
        let (center_frame, _) = spec
            .frame_at(sweep.orientation, spec.center())
            .map_err(CommandError::Frame)?;
        let neg = center_frame.h.map(|row| row.map(|v| -v));
        let wrong_sign = linalg::positive_definite(&neg);
        checks.add("weingarten_sign", if wrong_sign { 1.0 } else { 0.0 }, 0.5);
    }

    // offset laws at deterministic sampled relative distances
    let mus = sample_offsets(&sweep, 5);
    let mut peterson = 0.0f64;
    let mut shared_dev = 0.0f64;
    let mut star_path = 0.0f64;
    let mut star_operator = 0.0f64;
    let mut scaffold = 0.0f64;
    let mut a_factorization = 0.0f64;
    let mut j_drift = 0.0f64;
    let mut mu_recovery = 0.0f64;
    let mut closing = 0.0f64;
    for &mu in &mus {
        for sample in &sweep.samples {
            let offset =
                parallel::parallel_offset(&sample.frame, &sample.curv, mu).map_err(|source| {
                    CommandError::AtPoint {
                        point: sample.point,
                        source,
                    }
                })?;
            peterson = peterson.max(offset.peterson_residual);
            shared_dev = shared_dev
                .max(offset.shared.q_deviation)
                .max(offset.shared.conormal_deviation)
                .max(offset.shared.b_form_deviation)
                .max(offset.shared.normal_deviation);
            star_path = star_path.max(offset.curvature_discrepancy);
            star_operator = star_operator.max(offset.operator_discrepancy);
            for r in bonnet::scaffold_residuals(&sample.curv, mu).map_err(|source| {
                CommandError::AtPoint {
                    point: sample.point,
                    source,
                }
            })? {
                scaffold = scaffold.max(r);
            }
            if let Some(factored) = parallel::a_factored(&sample.curv, mu) {
                a_factorization =
                    a_factorization.max((offset.a - factored).abs() / offset.a.abs().max(1e-30));
            }
            if let (Ok(j), Ok(j_star)) = (
                parallel::invariant_j(&sample.curv),
                parallel::invariant_j(&offset.curv_star),
            ) {
                j_drift = j_drift.max((j - j_star).abs());
                let recovered =
                    parallel::mu_from_ratio(&sample.curv, &offset.curv_star).map_err(|source| {
                        CommandError::AtPoint {
                            point: sample.point,
                            source,
                        }
                    })?;
                mu_recovery = mu_recovery.max((recovered - mu).abs());
                let (lhs, rhs) = bonnet::closing_identity_sides(&sample.curv, &offset.curv_star);
                closing = closing.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0));
            }
        }
    }
    checks.add("peterson", peterson, tol::FRAME_LAW_TOL);
    checks.add("shared_quantities", shared_dev, tol::STAR_PATH_TOL);
    checks.add("star_path_agreement", star_path, tol::STAR_PATH_TOL);
    checks.add("star_operator_agreement", star_operator, tol::ROOT_CERT_TOL);
    checks.add("offset_identities", scaffold, tol::EXACT_LAW_TOL);
    checks.add("a_factorization", a_factorization, tol::EXACT_LAW_TOL);
    checks.add("j_invariance", j_drift, tol::STAR_PATH_TOL);
    checks.add("mu_recovery", mu_recovery, tol::EXACT_LAW_TOL);
    checks.add("closing_identity", closing, tol::STAR_PATH_TOL);

    // semigroup of offsets on the curvature functions
    if mus.len() >= 2 {
        let mut semigroup = 0.0f64;
        let (mu1, mu2) = (mus[0], mus[1] * 0.5);
        for sample in &sweep.samples {
            let one = parallel::star_curvatures(&sample.curv, mu1);
            let sum = parallel::star_curvatures(&sample.curv, mu1 + mu2);
            if let (Ok(one), Ok(sum)) = (one, sum) {
                if let Ok(two) = parallel::star_curvatures(&one, mu2) {
                    semigroup = semigroup
                        .max((two.h - sum.h).abs())
                        .max((two.h2 - sum.h2).abs())
                        .max((two.k - sum.k).abs());
                }
            }
        }
        checks.add("offset_semigroup", semigroup, tol::EXACT_LAW_TOL);
    }

    let verdict = checks.0.iter().all(|c| c.pass);
    let summary = Summary {
        constancy: constancy_of(&sweep.samples, tol::CONSTANCY_TOL),
        checks: checks.0,
        verdict: Some(verdict),
        ..Summary::default()
    };
    Ok(Report {
        schema: SCHEMA,
        surface: surface_info(spec, sweep.orientation),
        grid,
        points: vec![],
        summary,
        candidates: vec![],
    })
}

/// Deterministic admissible relative distances: drawn from [-0.3, 0.3] and
/// kept only when |A(mu)| stays above 1e-3 on the whole grid.
fn sample_offsets(sweep: &Sweep, want: usize) -> Vec<f64> {
    let mut sampler = Sampler::new(0x5eed_4e57);
    let mut out = Vec::new();
    for _ in 0..200 {
        if out.len() >= want {
            break;
        }
        let mu = sampler.range_away_from_zero(-0.3, 0.3, 1e-3);
        let admissible = sweep.samples.iter().all(|s| {
            let a = -mu.powi(3) * s.curv.k + 3.0 * mu * mu * s.curv.h2 - 3.0 * mu * s.curv.h + 1.0;
            a.abs() > 1e-3
        });
        if admissible {
            out.push(mu);
        }
    }
    out
}

/// Euclidean shape operator `h g^(-1)` (row-index convention of the
/// Weingarten equations).
fn euclidean_shape(g: &Mat3, h: &Mat3) -> Option<Mat3> {
    let inv = linalg::inv3(g, tol::RANK_GUARD)?;
    Some(linalg::mat_mul(h, &inv))
}

/// Compare order-<=2 jet partials of the surface's own expressions against
/// 5-point central finite differences of the plain evaluator; returns the
/// worst relative error.
fn jet_fd_residual(spec: &SurfaceSpec, sweep: &Sweep) -> f64 {
    let mut exprs: Vec<&Expression> = spec.x.iter().collect();
    if let NormalizationMode::Custom { expr, .. } = &spec.normalization {
        exprs.push(expr);
    }
    let step = 1e-3;
    let probes: Vec<[f64; 3]> = {
        let n = sweep.samples.len();
        [0, n / 2, n.saturating_sub(1)]
            .iter()
            .map(|&i| sweep.samples[i].point)
            .collect()
    };
    let mut worst = 0.0f64;
    for expr in exprs {
        for &p in &probes {
            let Ok(jet) = expr::eval_jet(expr, p) else {
                return f64::INFINITY;
            };
            for i in 0..3 {
                let exact = jet.partial(&[i]).expect("order within bounds");
                let fd = fd_first(expr, p, i, step);
                worst = worst.max((exact - fd).abs() / fd.abs().max(1.0));
                for j in i..3 {
                    let exact = jet.partial(&[i, j]).expect("order within bounds");
                    let fd = fd_second(expr, p, i, j, step);
                    worst = worst.max((exact - fd).abs() / fd.abs().max(1.0));
                }
            }
        }
    }
    worst
}

fn value_at(expr: &Expression, p: [f64; 3]) -> f64 {
    expr::eval_value(expr, p).unwrap_or(f64::NAN)
}

fn fd_first(expr: &Expression, p: [f64; 3], axis: usize, h: f64) -> f64 {
    let shift = |k: f64| {
        let mut q = p;
        q[axis] += k * h;
        value_at(expr, q)
    };
    (-shift(2.0) + 8.0 * shift(1.0) - 8.0 * shift(-1.0) + shift(-2.0)) / (12.0 * h)
}

fn fd_second(expr: &Expression, p: [f64; 3], i: usize, j: usize, h: f64) -> f64 {
    if i == j {
        let shift = |k: f64| {
            let mut q = p;
            q[i] += k * h;
            value_at(expr, q)
        };
        (-shift(2.0) + 16.0 * shift(1.0) - 30.0 * shift(0.0) + 16.0 * shift(-1.0) - shift(-2.0))
            / (12.0 * h * h)
    } else {
        // nested 5-point first-derivative stencils
        let d_j = |p: [f64; 3]| {
            let shift = |k: f64| {
                let mut q = p;
                q[j] += k * h;
                value_at(expr, q)
            };
            (-shift(2.0) + 8.0 * shift(1.0) - 8.0 * shift(-1.0) + shift(-2.0)) / (12.0 * h)
        };
        let shift_i = |k: f64| {
            let mut q = p;
            q[i] += k * h;
            d_j(q)
        };
        (-shift_i(2.0) + 8.0 * shift_i(1.0) - 8.0 * shift_i(-1.0) + shift_i(-2.0)) / (12.0 * h)
    }
}
