//! Closed-form relative distances at which a parallel hypersurface gains a
//! constant curvature function, and their numerical verification on a
//! sampled surface.
//!
//! Each existence result pairs a gate on the base curvature functions with
//! an explicit root of a low-degree polynomial in `mu`; the root is
//! certified by the polynomial residual and, on a surface, by measuring
//! the constancy of the predicted starred function across the grid.

use crate::cubic::quadratic_branches;
use crate::frame::CurvatureSet;
use crate::parallel::{a_of_mu, star_curvatures, OffsetError};
use crate::surface::SurfaceSpec;
use crate::tol;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BonnetError {
    #[error("precondition violated for {op}: {detail}")]
    PreconditionViolated { op: &'static str, detail: String },
    #[error("degenerate radical root W = {w:.3e}")]
    DegenerateW { w: f64 },
    #[error("candidate relative distance vanishes")]
    ZeroRoot,
    #[error("no real root: H2^2 - K H = {disc:.3e} < 0")]
    NoRealRoot { disc: f64 },
    #[error("relative curvature K = {k:.3e} vanishes")]
    ZeroRelativeCurvature { k: f64 },
    #[error("no pair of curvature functions is constant on the grid")]
    NothingApplicable,
    #[error(transparent)]
    Offset(#[from] OffsetError),
}

/// Which existence result produced a candidate.
#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Proposition {
    P6_1,
    P6_3a,
    P6_3b,
    P6_5a,
    P6_5b,
    P6_5c,
    Minimal_5b,
    H2Zero_Prop5_1,
}

pub const ALL_PROPOSITIONS: [Proposition; 8] = [
    Proposition::P6_1,
    Proposition::P6_3a,
    Proposition::P6_3b,
    Proposition::P6_5a,
    Proposition::P6_5b,
    Proposition::P6_5c,
    Proposition::Minimal_5b,
    Proposition::H2Zero_Prop5_1,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CurvatureField {
    H,
    H2,
    K,
}

pub fn field_value(curv: &CurvatureSet, field: CurvatureField) -> f64 {
    match field {
        CurvatureField::H => curv.h,
        CurvatureField::H2 => curv.h2,
        CurvatureField::K => curv.k,
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Prediction {
    pub field: CurvatureField,
    pub value: f64,
}

/// A candidate relative distance with its certificate.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BonnetCandidate {
    pub proposition: Proposition,
    pub mu: f64,
    pub predicted: Prediction,
    /// Auxiliary radical root for the cubic-rooted distances.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    /// Absolute residual of the defining polynomial at `mu`.
    pub root_residual: f64,
}

fn guard_k(k: f64, op: &'static str) -> Result<(), BonnetError> {
    if k.abs() < tol::RECIP_GUARD {
        return Err(BonnetError::PreconditionViolated {
            op,
            detail: format!("K = {k:.3e} must not vanish"),
        });
    }
    Ok(())
}

fn guard_h2(h2: f64, op: &'static str) -> Result<(), BonnetError> {
    if h2.abs() < tol::RECIP_GUARD {
        return Err(BonnetError::PreconditionViolated {
            op,
            detail: format!("H2 = {h2:.3e} must not vanish"),
        });
    }
    Ok(())
}

/// Constant `K` and `H2`: the unique real root of
/// `P(mu) = 2 mu^3 K - 3 mu^2 H2 + 1`, requiring `K^2 >= H2^3`.
/// The offset at that distance has constant `H* = -1/(3 mu)`.
pub fn mu1(h2: f64, k: f64) -> Result<BonnetCandidate, BonnetError> {
    guard_k(k, "mu1")?;
    // boundary cases (K^2 = H2^3) must stay admissible under rounding
    let gate_scale = k * k + h2.abs().powi(3);
    if k * k - h2 * h2 * h2 < -1e-12 * gate_scale {
        return Err(BonnetError::PreconditionViolated {
            op: "mu1",
            detail: format!("K^2 = {:.6e} < H2^3 = {:.6e}", k * k, h2.powi(3)),
        });
    }
    let radicand = (k * k - h2.powi(3)).max(0.0);
    let w = (2.0 * k * k - h2.powi(3) + 2.0 * k.abs() * radicand.sqrt()).cbrt();
    if w.abs() < tol::RECIP_GUARD {
        return Err(BonnetError::DegenerateW { w });
    }
    let mu = -(w + h2 * (h2 / w - 1.0)) / (2.0 * k);
    let root_residual = (2.0 * mu.powi(3) * k - 3.0 * mu * mu * h2 + 1.0).abs();
    Ok(BonnetCandidate {
        proposition: Proposition::P6_1,
        mu,
        predicted: Prediction {
            field: CurvatureField::H,
            value: -1.0 / (3.0 * mu),
        },
        w: Some(w),
        root_residual,
    })
}

/// Constant `K` and `H`: the unique real root of
/// `P(mu) = 2 mu^3 K - 3 mu H + 1`, requiring `K (K - 2 H^3) >= 0`.
/// The offset has constant `H2* = 1/(3 mu^2)`.
pub fn mu2(h: f64, k: f64) -> Result<BonnetCandidate, BonnetError> {
    guard_k(k, "mu2")?;
    let gate_scale = k.abs() * (k.abs() + 2.0 * h.abs().powi(3));
    if k * (k - 2.0 * h.powi(3)) < -1e-12 * gate_scale {
        return Err(BonnetError::PreconditionViolated {
            op: "mu2",
            detail: format!("K(K - 2H^3) = {:.6e} < 0", k * (k - 2.0 * h.powi(3))),
        });
    }
    let radicand = (k.powi(3) * (k - 2.0 * h.powi(3))).max(0.0);
    let w = (k * k + radicand.sqrt()).cbrt();
    if w.abs() < tol::RECIP_GUARD {
        return Err(BonnetError::DegenerateW { w });
    }
    let mu = -h / (2f64.cbrt() * w) - w / (4f64.cbrt() * k);
    let root_residual = (2.0 * mu.powi(3) * k - 3.0 * mu * h + 1.0).abs();
    Ok(BonnetCandidate {
        proposition: Proposition::P6_3a,
        mu,
        predicted: Prediction {
            field: CurvatureField::H2,
            value: 1.0 / (3.0 * mu * mu),
        },
        w: Some(w),
        root_residual,
    })
}

/// Constant `K` and `H`: the unique real root of
/// `P(mu) = mu^3 K - 3 mu H + 2`, requiring `K (K - H^3) >= 0`.
/// The offset has constant `H* = -2/(3 mu)`.
pub fn mu3(h: f64, k: f64) -> Result<BonnetCandidate, BonnetError> {
    guard_k(k, "mu3")?;
    let gate_scale = k.abs() * (k.abs() + h.abs().powi(3));
    if k * (k - h.powi(3)) < -1e-12 * gate_scale {
        return Err(BonnetError::PreconditionViolated {
            op: "mu3",
            detail: format!("K(K - H^3) = {:.6e} < 0", k * (k - h.powi(3))),
        });
    }
    let radicand = (k.powi(3) * (k - h.powi(3))).max(0.0);
    let w = (k * k + radicand.sqrt()).cbrt();
    if w.abs() < tol::RECIP_GUARD {
        return Err(BonnetError::DegenerateW { w });
    }
    let mu = -h / w - w / k;
    let root_residual = (mu.powi(3) * k - 3.0 * mu * h + 2.0).abs();
    Ok(BonnetCandidate {
        proposition: Proposition::P6_3b,
        mu,
        predicted: Prediction {
            field: CurvatureField::H,
            value: -2.0 / (3.0 * mu),
        },
        w: Some(w),
        root_residual,
    })
}

/// In the special case `K = H^3` the polynomial of [`mu3`] gains the
/// double root `mu = 1/H`, a second distance with constant `H* = -2H/3`.
/// It frequently lands on a focal radius (it does on every sphere), so the
/// caller's `A`-guard decides whether it survives.
pub fn mu3_companion(h: f64, k: f64) -> Option<BonnetCandidate> {
    let scale = k.abs() + h.abs().powi(3);
    if h.abs() < tol::RECIP_GUARD || (k - h.powi(3)).abs() > 1e-9 * scale.max(1e-30) {
        return None;
    }
    let mu = 1.0 / h;
    Some(BonnetCandidate {
        proposition: Proposition::P6_3b,
        mu,
        predicted: Prediction {
            field: CurvatureField::H,
            value: -2.0 * h / 3.0,
        },
        w: None,
        root_residual: (mu.powi(3) * k - 3.0 * mu * h + 2.0).abs(),
    })
}

#[allow(clippy::too_many_arguments)]
fn quadratic_candidates(
    op: &'static str,
    proposition: Proposition,
    a: f64,
    b: f64,
    c: f64,
    gate: f64,
    gate_scale: f64,
    gate_text: &str,
    poly: impl Fn(f64) -> f64,
    predict: impl Fn(f64) -> Prediction,
) -> Result<Vec<BonnetCandidate>, BonnetError> {
    if gate < -1e-12 * gate_scale {
        return Err(BonnetError::PreconditionViolated {
            op,
            detail: format!("{gate_text} = {gate:.6e} < 0"),
        });
    }
    // a gate inside the rounding window means a double root at the vertex;
    // taking the square root there would amplify rounding to ~1e-8
    let (minus, plus) = if gate.abs() <= 1e-12 * gate_scale {
        let r = -b / (2.0 * a);
        (r, r)
    } else {
        quadratic_branches(a, b, c).unwrap_or_else(|| {
            let r = -b / (2.0 * a);
            (r, r)
        })
    };
    let mut out = Vec::with_capacity(2);
    for mu in [minus, plus] {
        if mu.abs() < tol::RECIP_GUARD {
            // the relative distance must not vanish
            continue;
        }
        out.push(BonnetCandidate {
            proposition,
            mu,
            predicted: predict(mu),
            w: None,
            root_residual: poly(mu).abs(),
        });
    }
    if out.is_empty() {
        return Err(BonnetError::ZeroRoot);
    }
    Ok(out)
}

/// Constant `H` and `H2`, gate `3H^2 >= 4H2`: the roots of
/// `P1(mu) = 3 mu^2 H2 - 3 mu H + 1`; the offsets have constant
/// `K* = -1/mu^3`.
pub fn mu_pair_constant_k(h: f64, h2: f64) -> Result<Vec<BonnetCandidate>, BonnetError> {
    guard_h2(h2, "mu4/mu5")?;
    quadratic_candidates(
        "mu4/mu5",
        Proposition::P6_5a,
        3.0 * h2,
        -3.0 * h,
        1.0,
        3.0 * h * h - 4.0 * h2,
        3.0 * h * h + 4.0 * h2.abs(),
        "3H^2 - 4H2",
        |mu| 3.0 * mu * mu * h2 - 3.0 * mu * h + 1.0,
        |mu| Prediction {
            field: CurvatureField::K,
            value: -1.0 / mu.powi(3),
        },
    )
}

/// Constant `H` and `H2`, gate `9H^2 >= 8H2`: the roots of
/// `P2(mu) = 2 mu^2 H2 - 3 mu H + 1`; the offsets have constant
/// `H2* = 1/mu^2`.
pub fn mu_pair_constant_h2(h: f64, h2: f64) -> Result<Vec<BonnetCandidate>, BonnetError> {
    guard_h2(h2, "mu6/mu7")?;
    quadratic_candidates(
        "mu6/mu7",
        Proposition::P6_5b,
        2.0 * h2,
        -3.0 * h,
        1.0,
        9.0 * h * h - 8.0 * h2,
        9.0 * h * h + 8.0 * h2.abs(),
        "9H^2 - 8H2",
        |mu| 2.0 * mu * mu * h2 - 3.0 * mu * h + 1.0,
        |mu| Prediction {
            field: CurvatureField::H2,
            value: 1.0 / (mu * mu),
        },
    )
}

/// Constant `H` and `H2`, gate `H^2 >= H2`: the roots of
/// `P3(mu) = mu^2 H2 - 2 mu H + 1`; the offsets have constant
/// `H* = -1/mu`.
pub fn mu_pair_constant_h(h: f64, h2: f64) -> Result<Vec<BonnetCandidate>, BonnetError> {
    guard_h2(h2, "mu8/mu9")?;
    quadratic_candidates(
        "mu8/mu9",
        Proposition::P6_5c,
        h2,
        -2.0 * h,
        1.0,
        h * h - h2,
        h * h + h2.abs(),
        "H^2 - H2",
        |mu| mu * mu * h2 - 2.0 * mu * h + 1.0,
        |mu| Prediction {
            field: CurvatureField::H,
            value: -1.0 / mu,
        },
    )
}

/// All quadratic-rooted candidates whose gates pass.
pub fn mu_4_to_9(h: f64, h2: f64) -> Vec<BonnetCandidate> {
    [
        mu_pair_constant_k(h, h2),
        mu_pair_constant_h2(h, h2),
        mu_pair_constant_h(h, h2),
    ]
    .into_iter()
    .flatten()
    .flatten()
    .collect()
}

/// Distances at which the offset is relatively minimal (`H* = 0`): the
/// roots of `mu^2 K - 2 mu H2 + H`, the numerator of the starred mean
/// curvature. A double root is reported once; a vanishing root is dropped.
pub fn minimal_parallel_mus(h: f64, h2: f64, k: f64) -> Result<Vec<f64>, BonnetError> {
    if k.abs() < tol::RECIP_GUARD {
        return Err(BonnetError::ZeroRelativeCurvature { k });
    }
    let disc = h2 * h2 - k * h;
    let disc_scale = h2 * h2 + (k * h).abs();
    if disc < -1e-12 * disc_scale {
        return Err(BonnetError::NoRealRoot { disc });
    }
    // a discriminant inside the rounding window is a double root at H2/K
    let (minus, plus) = if disc.abs() <= 1e-12 * disc_scale {
        let r = h2 / k;
        (r, r)
    } else {
        quadratic_branches(k, -2.0 * h2, h).unwrap_or_else(|| {
            let r = h2 / k;
            (r, r)
        })
    };
    let scale = minus.abs().max(plus.abs()).max(1.0);
    let mut out = vec![minus];
    if (plus - minus).abs() > 1e-12 * scale {
        out.push(plus);
    }
    out.retain(|mu| mu.abs() > tol::RECIP_GUARD);
    Ok(out)
}

/// The unique distance with vanishing second starred curvature function,
/// `mu = H2/K` (the root of the `H2*` numerator `-mu K + H2`).
pub fn h2_vanishing_mu(h2: f64, k: f64) -> Result<f64, BonnetError> {
    if k.abs() < tol::RECIP_GUARD {
        return Err(BonnetError::ZeroRelativeCurvature { k });
    }
    Ok(h2 / k)
}

/// Residuals of the six pointwise identities tying `A(mu)`, the starred
/// functions and the candidate polynomials together; identically zero for
/// any surface and any admissible `mu`:
///
/// ```text
/// A (1 + 3 mu H*)   = 2 mu^3 K - 3 mu^2 H2 + 1
/// A (1 - 3 mu^2 H2*) = 2 mu^3 K - 3 mu H + 1
/// A (2 + 3 mu H*)   = mu^3 K - 3 mu H + 2
/// A (1 + mu^3 K*)   = 3 mu^2 H2 - 3 mu H + 1
/// A (1 - mu^2 H2*)  = 2 mu^2 H2 - 3 mu H + 1
/// A (1 + mu H*)     = mu^2 H2 - 2 mu H + 1
/// ```
pub fn scaffold_residuals(curv: &CurvatureSet, mu: f64) -> Result<[f64; 6], OffsetError> {
    let a = a_of_mu(curv, mu)?;
    let star = star_curvatures(curv, mu)?;
    let (h, h2, k) = (curv.h, curv.h2, curv.k);
    let m2 = mu * mu;
    let m3 = m2 * mu;
    Ok([
        a * (1.0 + 3.0 * mu * star.h) - (2.0 * m3 * k - 3.0 * m2 * h2 + 1.0),
        a * (1.0 - 3.0 * m2 * star.h2) - (2.0 * m3 * k - 3.0 * mu * h + 1.0),
        a * (2.0 + 3.0 * mu * star.h) - (m3 * k - 3.0 * mu * h + 2.0),
        a * (1.0 + m3 * star.k) - (3.0 * m2 * h2 - 3.0 * mu * h + 1.0),
        a * (1.0 - m2 * star.h2) - (2.0 * m2 * h2 - 3.0 * mu * h + 1.0),
        a * (1.0 + mu * star.h) - (m2 * h2 - 2.0 * mu * h + 1.0),
    ]
    .map(f64::abs))
}

/// Both sides of the closing identity obtained by eliminating `mu` between
/// the starred-function formulas; they agree for every member of the
/// family.
pub fn closing_identity_sides(curv: &CurvatureSet, star: &CurvatureSet) -> (f64, f64) {
    let (h, h2, k) = (curv.h, curv.h2, curv.k);
    let (hs, h2s, ks) = (star.h, star.h2, star.k);
    let lhs = k * ks * h2s * (k * k * h2s + 3.0 * ks * hs * (h2 * h2 - k * h))
        - k.powi(3) * h2s.powi(3) * hs;
    let rhs =
        ks.powi(3) * (2.0 * h2.powi(3) * hs + k * h2 * (h2 - 3.0 * h * hs) + k * k * (hs - h));
    (lhs, rhs)
}

/// Constancy statistics of a sampled scalar field.
#[derive(Clone, Debug, Serialize)]
pub struct ConstancyReport {
    pub field: String,
    pub mean: f64,
    pub max_abs_deviation: f64,
    pub relative_spread: f64,
    pub verdict: bool,
}

pub fn constancy(field: &str, values: &[f64], tol: f64) -> ConstancyReport {
    let n = values.len().max(1) as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut max_abs_deviation = 0.0f64;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in values {
        max_abs_deviation = max_abs_deviation.max((v - mean).abs());
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let relative_spread = if values.is_empty() {
        f64::INFINITY
    } else {
        (hi - lo) / mean.abs().max(1e-30)
    };
    ConstancyReport {
        field: field.to_string(),
        mean,
        max_abs_deviation,
        relative_spread,
        verdict: relative_spread <= tol,
    }
}

/// Outcome of one candidate on the sampled grid.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status")]
pub enum CandidateStatus {
    /// Hypotheses not met on this surface.
    NotApplicable {
        reason: String,
    },
    /// `|A(mu)|` drops below the focal guard somewhere on the grid.
    OffsetSingular {
        min_abs_a: f64,
    },
    /// Predicted function measured across the grid.
    Verified {
        constancy: ConstancyReport,
        /// Relative deviation of the measured mean from the predicted value.
        predicted_vs_measured: f64,
        verdict: bool,
    },
    Failed {
        reason: String,
    },
    /// Pure formula evaluation, no surface attached.
    Formula,
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateReport {
    pub proposition: Proposition,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidate: Option<BonnetCandidate>,
    #[serde(flatten)]
    pub status: CandidateStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct BonnetOutcome {
    pub base_constancy: Vec<ConstancyReport>,
    pub candidates: Vec<CandidateReport>,
}

/// Sweep the grid, decide which existence results apply, compute their
/// candidate distances from grid-mean inputs and measure the predicted
/// starred function of each surviving candidate.
pub fn verify_bonnet(
    spec: &SurfaceSpec,
    grid: [usize; 3],
    tol: f64,
) -> Result<BonnetOutcome, BonnetError> {
    if grid.iter().any(|&n| n < 3) {
        return Err(BonnetError::PreconditionViolated {
            op: "verify_bonnet",
            detail: format!("grid {grid:?} must be at least 3x3x3"),
        });
    }
    let orientation = spec.resolve_orientation().map_err(OffsetError::Frame)?;
    let mut curvs = Vec::new();
    for point in spec.grid_points(grid) {
        let (_, curv) = spec
            .frame_at(orientation, point)
            .map_err(OffsetError::Frame)?;
        curvs.push(curv);
    }
    let outcome = survey_curvatures(&curvs, tol);
    if outcome.candidates.iter().all(|c| c.candidate.is_none()) {
        return Err(BonnetError::NothingApplicable);
    }
    Ok(outcome)
}

/// Grid-independent core of [`verify_bonnet`]; always returns the full
/// per-result breakdown, leaving the nothing-applicable decision to the
/// caller.
pub fn survey_curvatures(curvs: &[CurvatureSet], tol: f64) -> BonnetOutcome {
    let pred_tol = (tol * 10.0).max(tol::PREDICTION_TOL);
    let hs: Vec<f64> = curvs.iter().map(|c| c.h).collect();
    let h2s: Vec<f64> = curvs.iter().map(|c| c.h2).collect();
    let ks: Vec<f64> = curvs.iter().map(|c| c.k).collect();
    let c_h = constancy("H", &hs, tol);
    let c_h2 = constancy("H2", &h2s, tol);
    let c_k = constancy("K", &ks, tol);
    let (h_mean, h2_mean, k_mean) = (c_h.mean, c_h2.mean, c_k.mean);

    let mut candidates: Vec<CandidateReport> = Vec::new();
    let mut push_formula =
        |proposition: Proposition,
         applicable: bool,
         reason: &str,
         result: Result<Vec<BonnetCandidate>, BonnetError>| {
            if !applicable {
                candidates.push(CandidateReport {
                    proposition,
                    candidate: None,
                    status: CandidateStatus::NotApplicable {
                        reason: reason.to_string(),
                    },
                });
                return;
            }
            match result {
                Ok(list) => {
                    for candidate in list {
                        candidates.push(CandidateReport {
                            proposition,
                            candidate: Some(candidate),
                            status: CandidateStatus::Verified {
                                // placeholder, filled by the measurement pass
                                constancy: constancy("", &[], tol),
                                predicted_vs_measured: f64::INFINITY,
                                verdict: false,
                            },
                        });
                    }
                }
                Err(err) => candidates.push(CandidateReport {
                    proposition,
                    candidate: None,
                    status: CandidateStatus::NotApplicable {
                        reason: err.to_string(),
                    },
                }),
            }
        };

    let both_kh2 = c_k.verdict && c_h2.verdict;
    push_formula(
        Proposition::P6_1,
        both_kh2,
        "K or H2 not constant",
        mu1(h2_mean, k_mean).map(|c| vec![c]),
    );
    let both_kh = c_k.verdict && c_h.verdict;
    push_formula(
        Proposition::P6_3a,
        both_kh,
        "K or H not constant",
        mu2(h_mean, k_mean).map(|c| vec![c]),
    );
    push_formula(
        Proposition::P6_3b,
        both_kh,
        "K or H not constant",
        mu3(h_mean, k_mean).map(|c| {
            let mut list = vec![c];
            list.extend(mu3_companion(h_mean, k_mean));
            list
        }),
    );
    let both_hh2 = c_h.verdict && c_h2.verdict;
    push_formula(
        Proposition::P6_5a,
        both_hh2,
        "H or H2 not constant",
        mu_pair_constant_k(h_mean, h2_mean),
    );
    push_formula(
        Proposition::P6_5b,
        both_hh2,
        "H or H2 not constant",
        mu_pair_constant_h2(h_mean, h2_mean),
    );
    push_formula(
        Proposition::P6_5c,
        both_hh2,
        "H or H2 not constant",
        mu_pair_constant_h(h_mean, h2_mean),
    );

    // Relative minimality: the candidate distances themselves must be
    // constant over the grid.
    {
        let per_point: Vec<Result<Vec<f64>, BonnetError>> = curvs
            .iter()
            .map(|c| minimal_parallel_mus(c.h, c.h2, c.k))
            .collect();
        let mut status = None;
        if let Some(err) = per_point.iter().find_map(|r| r.as_ref().err()) {
            status = Some(err.to_string());
        }
        let lists: Vec<&Vec<f64>> = per_point.iter().filter_map(|r| r.as_ref().ok()).collect();
        if status.is_none() {
            let count = lists[0].len();
            if lists.iter().any(|l| l.len() != count) {
                status = Some("root count varies over the grid".to_string());
            } else if count == 0 {
                status = Some("no nonvanishing minimal distance".to_string());
            } else {
                for slot in 0..count {
                    let values: Vec<f64> = lists.iter().map(|l| l[slot]).collect();
                    let c = constancy("mu", &values, tol);
                    if !c.verdict {
                        candidates.push(CandidateReport {
                            proposition: Proposition::Minimal_5b,
                            candidate: None,
                            status: CandidateStatus::NotApplicable {
                                reason: "minimal distance not constant over the grid".into(),
                            },
                        });
                        continue;
                    }
                    let mu = c.mean;
                    candidates.push(CandidateReport {
                        proposition: Proposition::Minimal_5b,
                        candidate: Some(BonnetCandidate {
                            proposition: Proposition::Minimal_5b,
                            mu,
                            predicted: Prediction {
                                field: CurvatureField::H,
                                value: 0.0,
                            },
                            w: None,
                            root_residual: (mu * mu * k_mean - 2.0 * mu * h2_mean + h_mean).abs(),
                        }),
                        status: CandidateStatus::Verified {
                            constancy: constancy("", &[], tol),
                            predicted_vs_measured: f64::INFINITY,
                            verdict: false,
                        },
                    });
                }
            }
        }
        if let Some(reason) = status {
            candidates.push(CandidateReport {
                proposition: Proposition::Minimal_5b,
                candidate: None,
                status: CandidateStatus::NotApplicable { reason },
            });
        }
    }

    // Vanishing H2*: mu = H2/K must be a nonvanishing grid constant.
    {
        let ratios: Result<Vec<f64>, BonnetError> =
            curvs.iter().map(|c| h2_vanishing_mu(c.h2, c.k)).collect();
        let report = match ratios {
            Err(err) => CandidateReport {
                proposition: Proposition::H2Zero_Prop5_1,
                candidate: None,
                status: CandidateStatus::NotApplicable {
                    reason: err.to_string(),
                },
            },
            Ok(values) => {
                let c = constancy("H2/K", &values, tol);
                if !c.verdict {
                    CandidateReport {
                        proposition: Proposition::H2Zero_Prop5_1,
                        candidate: None,
                        status: CandidateStatus::NotApplicable {
                            reason: "H2/K not constant over the grid".into(),
                        },
                    }
                } else if c.mean.abs() < tol::RECIP_GUARD {
                    CandidateReport {
                        proposition: Proposition::H2Zero_Prop5_1,
                        candidate: None,
                        status: CandidateStatus::NotApplicable {
                            reason: "H2 vanishes: no offset with vanishing H2*".into(),
                        },
                    }
                } else {
                    let mu = c.mean;
                    CandidateReport {
                        proposition: Proposition::H2Zero_Prop5_1,
                        candidate: Some(BonnetCandidate {
                            proposition: Proposition::H2Zero_Prop5_1,
                            mu,
                            predicted: Prediction {
                                field: CurvatureField::H2,
                                value: 0.0,
                            },
                            w: None,
                            root_residual: (-mu * k_mean + h2_mean).abs(),
                        }),
                        status: CandidateStatus::Verified {
                            constancy: constancy("", &[], tol),
                            predicted_vs_measured: f64::INFINITY,
                            verdict: false,
                        },
                    }
                }
            }
        };
        candidates.push(report);
    }

    // Measurement pass: evaluate each surviving candidate over the grid.
    for report in &mut candidates {
        let Some(candidate) = report.candidate else {
            continue;
        };
        let mu = candidate.mu;
        let mut min_abs_a = f64::INFINITY;
        for curv in curvs {
            let a = -mu.powi(3) * curv.k + 3.0 * mu * mu * curv.h2 - 3.0 * mu * curv.h + 1.0;
            min_abs_a = min_abs_a.min(a.abs());
        }
        if min_abs_a < tol::CANDIDATE_A_MIN {
            report.status = CandidateStatus::OffsetSingular { min_abs_a };
            continue;
        }
        let mut measured = Vec::with_capacity(curvs.len());
        let mut failure = None;
        for curv in curvs {
            match star_curvatures(curv, mu) {
                Ok(star) => measured.push(field_value(&star, candidate.predicted.field)),
                Err(err) => {
                    failure = Some(err.to_string());
                    break;
                }
            }
        }
        report.status = match failure {
            Some(reason) => CandidateStatus::Failed { reason },
            None => {
                let field_name = format!("{:?}*", candidate.predicted.field);
                let c = constancy(&field_name, &measured, pred_tol);
                let predicted_vs_measured = (c.mean - candidate.predicted.value).abs()
                    / candidate.predicted.value.abs().max(1.0);
                let verdict = c.verdict && predicted_vs_measured <= pred_tol;
                CandidateStatus::Verified {
                    constancy: c,
                    predicted_vs_measured,
                    verdict,
                }
            }
        };
    }

    BonnetOutcome {
        base_constancy: vec![c_h, c_h2, c_k],
        candidates,
    }
}
