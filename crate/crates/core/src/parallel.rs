//! Relatively parallel hypersurfaces `x_mu = x + mu*y` and their starred
//! quantities.
//!
//! The family shares the relative image, support function, conormal and
//! bilinear form with the base surface; its shape operator and curvature
//! functions transform rationally in `mu` with the common denominator
//! `A(mu) = det(I - mu*B)`. Everything is computed twice: in closed form
//! from the base curvatures, and by re-running the frame pipeline on the
//! offset jet, which is the convention-independent oracle.

use crate::frame::{
    self, curvature_functions, unit_normal, CurvatureSet, FrameError, RelativeFrame,
};
use crate::jet::{Jet, VecJet};
use crate::linalg::{self, Mat3};
use crate::tol;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OffsetError {
    #[error("offset is singular: A({mu}) = {a:.3e} (focal distance)")]
    OffsetSingular { mu: f64, a: f64 },
    #[error("star principal curvature undefined: kappa = {kappa} equals 1/mu for mu = {mu}")]
    StarPrincipalUndefined { mu: f64, kappa: f64 },
    #[error("relative curvature K = {k:.3e} vanishes")]
    ZeroRelativeCurvature { k: f64 },
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// Offset position jet `x + mu*y`.
pub fn offset_jet(x: &VecJet, y: &VecJet, mu: f64) -> VecJet {
    x.add(&y.scale(mu))
}

/// `A(mu) = -mu^3 K + 3 mu^2 H2 - 3 mu H + 1`, the determinant factor of
/// the offset tangent map. Values inside the focal guard are errors:
/// the offset fails to be an immersion there.
pub fn a_of_mu(curv: &CurvatureSet, mu: f64) -> Result<f64, OffsetError> {
    let a = -mu.powi(3) * curv.k + 3.0 * mu * mu * curv.h2 - 3.0 * mu * curv.h + 1.0;
    if a.abs() < tol::OFFSET_A_MIN {
        return Err(OffsetError::OffsetSingular { mu, a });
    }
    Ok(a)
}

/// Factored form `A(mu) = -K (mu - R1)(mu - R2)(mu - R3)`, available when
/// `K != 0` and all principal radii are defined.
pub fn a_factored(curv: &CurvatureSet, mu: f64) -> Option<f64> {
    if curv.k.abs() < tol::RECIP_GUARD {
        return None;
    }
    match curv.radii {
        [Some(r1), Some(r2), Some(r3)] => Some(-curv.k * (mu - r1) * (mu - r2) * (mu - r3)),
        _ => None,
    }
}

/// The nine closed-form components of the offset shape operator.
pub fn star_shape_operator(b_mixed: &Mat3, k: f64, mu: f64) -> Result<Mat3, OffsetError> {
    let b = b_mixed;
    let curv = curvature_functions(b);
    let a = a_of_mu(&CurvatureSet { k, ..curv }, mu)?;
    let mm = mu * mu * k;
    let num = [
        [
            b[0][0]
                - mu * (b[0][0] * b[1][1] + b[0][0] * b[2][2]
                    - b[0][1] * b[1][0]
                    - b[0][2] * b[2][0])
                + mm,
            b[0][1] + mu * (b[0][2] * b[2][1] - b[0][1] * b[2][2]),
            b[0][2] + mu * (b[0][1] * b[1][2] - b[0][2] * b[1][1]),
        ],
        [
            b[1][0] + mu * (b[1][2] * b[2][0] - b[1][0] * b[2][2]),
            b[1][1]
                - mu * (b[0][0] * b[1][1] + b[1][1] * b[2][2]
                    - b[1][2] * b[2][1]
                    - b[0][1] * b[1][0])
                + mm,
            b[1][2] + mu * (b[1][0] * b[0][2] - b[1][2] * b[0][0]),
        ],
        [
            b[2][0] + mu * (b[2][1] * b[1][0] - b[2][0] * b[1][1]),
            b[2][1] + mu * (b[2][0] * b[0][1] - b[2][1] * b[0][0]),
            b[2][2]
                - mu * (b[0][0] * b[2][2] + b[1][1] * b[2][2]
                    - b[0][2] * b[2][0]
                    - b[1][2] * b[2][1])
                + mm,
        ],
    ];
    Ok(num.map(|row| row.map(|v| v / a)))
}

/// Oracle route for the offset shape operator: solve `(I - mu*B) B* = B`.
pub fn star_shape_operator_solve(b_mixed: &Mat3, mu: f64) -> Option<Mat3> {
    let mut lhs = linalg::identity();
    for i in 0..3 {
        for j in 0..3 {
            lhs[i][j] -= mu * b_mixed[i][j];
        }
    }
    let inv = linalg::inv3(&lhs, tol::OFFSET_A_MIN)?;
    Some(linalg::mat_mul(&inv, b_mixed))
}

/// Closed-form curvature functions of the offset:
/// `K* = K/A`, `H2* = (-mu K + H2)/A`, `H* = (mu^2 K - 2 mu H2 + H)/A`,
/// `kappa* = kappa/(1 - mu kappa)`, `R* = R - mu`.
pub fn star_curvatures(curv: &CurvatureSet, mu: f64) -> Result<CurvatureSet, OffsetError> {
    let a = a_of_mu(curv, mu)?;
    let k_star = curv.k / a;
    let h2_star = (-mu * curv.k + curv.h2) / a;
    let h_star = (mu * mu * curv.k - 2.0 * mu * curv.h2 + curv.h) / a;
    let kappas = match curv.kappas {
        None => None,
        Some(kappas) => {
            let mut out = [0.0; 3];
            for (slot, &kappa) in out.iter_mut().zip(kappas.iter()) {
                let denom = 1.0 - mu * kappa;
                if denom.abs() < tol::RECIP_GUARD {
                    return Err(OffsetError::StarPrincipalUndefined { mu, kappa });
                }
                *slot = kappa / denom;
            }
            out.sort_by(|x, y| y.partial_cmp(x).unwrap());
            Some(out)
        }
    };
    let radii = match kappas {
        Some(ks) => ks.map(|kappa| (kappa.abs() > tol::RECIP_GUARD).then(|| 1.0 / kappa)),
        None => [None; 3],
    };
    Ok(CurvatureSet {
        h: h_star,
        h2: h2_star,
        k: k_star,
        kappas,
        radii,
    })
}

/// `(H2^2 - K H) / K^2`, invariant under the transition to any relatively
/// parallel hypersurface.
pub fn invariant_j(curv: &CurvatureSet) -> Result<f64, OffsetError> {
    if curv.k.abs() < tol::RECIP_GUARD {
        return Err(OffsetError::ZeroRelativeCurvature { k: curv.k });
    }
    Ok((curv.h2 * curv.h2 - curv.k * curv.h) / (curv.k * curv.k))
}

/// Recover the relative distance between two members of the family:
/// `mu = H2/K - H2*/K*`.
pub fn mu_from_ratio(curv: &CurvatureSet, star: &CurvatureSet) -> Result<f64, OffsetError> {
    if curv.k.abs() < tol::RECIP_GUARD {
        return Err(OffsetError::ZeroRelativeCurvature { k: curv.k });
    }
    if star.k.abs() < tol::RECIP_GUARD {
        return Err(OffsetError::ZeroRelativeCurvature { k: star.k });
    }
    Ok(curv.h2 / curv.k - star.h2 / star.k)
}

/// Peterson correspondence residual: the offset tangent planes must stay
/// parallel to the base ones, so every `d_i x_mu` lies in the span of the
/// base tangent vectors.
pub fn peterson_check(x: &VecJet, y: &VecJet, mu: f64) -> f64 {
    let x_mu = offset_jet(x, y, mu);
    let tangent = [
        x.derivative(0).value(),
        x.derivative(1).value(),
        x.derivative(2).value(),
    ];
    let mut residual = 0.0f64;
    for i in 0..3 {
        let v = x_mu.derivative(i).value();
        match linalg::orth_component(&tangent, &v, tol::RANK_GUARD) {
            Some(rem) => residual = residual.max(linalg::norm4(&rem)),
            None => return f64::INFINITY,
        }
    }
    residual
}

/// Offset frame rebuilt from the offset jet. The normal is re-derived from
/// the offset tangent cross product and re-oriented by `sign(A)`, which
/// keeps the starred support function continuous in `mu`; the mixed
/// components come from the Weingarten equations on `x_mu` with the shared
/// `y`.
#[derive(Clone, Debug)]
pub struct StarFrame {
    pub mu: f64,
    pub a: f64,
    pub x_star: VecJet,
    pub q_star: Jet,
    pub conormal_star: VecJet,
    pub b_form_star: Mat3,
    pub b_mixed_star: Mat3,
    pub curv_star: CurvatureSet,
    /// Value-level deviation of `sign(A) * (recomputed unit normal)` from
    /// the base normal; checks the cross-product identity behind the
    /// re-orientation.
    pub normal_deviation: f64,
}

pub fn star_frame_recompute(
    base: &RelativeFrame,
    curv: &CurvatureSet,
    mu: f64,
) -> Result<StarFrame, OffsetError> {
    let a = a_of_mu(curv, mu)?;
    let x_star = offset_jet(&base.x, &base.y, mu);

    let xi_raw = unit_normal(&x_star, base.orientation)?;
    let mut normal_deviation = 0.0f64;
    let (raw, xi_val) = (xi_raw.value(), base.xi.value());
    for i in 0..4 {
        normal_deviation = normal_deviation.max((a.signum() * raw[i] - xi_val[i]).abs());
    }

    // Shared quantities are recomputed against the sign-corrected normal,
    // which equals the base one; the base jet carries the full order.
    let xi_star = base.xi;
    let q_star = xi_star.dot(&base.y);
    let conormal_star = frame::conormal(&xi_star, &q_star)?;

    let dy = [
        base.y.derivative(0),
        base.y.derivative(1),
        base.y.derivative(2),
    ];
    let dxn = [
        conormal_star.derivative(0),
        conormal_star.derivative(1),
        conormal_star.derivative(2),
    ];
    let mut b_form_star = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b_form_star[i][j] = dy[i].dot(&dxn[j]).value();
        }
    }

    let tangent_star = [
        x_star.derivative(0).value(),
        x_star.derivative(1).value(),
        x_star.derivative(2).value(),
    ];
    let mut b_mixed_star = [[0.0; 3]; 3];
    for i in 0..3 {
        let rhs = dy[i].value().map(|v| -v);
        b_mixed_star[i] = linalg::lstsq_4x3(&tangent_star, &rhs, tol::RANK_GUARD)
            .ok_or(OffsetError::OffsetSingular { mu, a })?;
    }
    let curv_star = curvature_functions(&b_mixed_star);

    Ok(StarFrame {
        mu,
        a,
        x_star,
        q_star,
        conormal_star,
        b_form_star,
        b_mixed_star,
        curv_star,
        normal_deviation,
    })
}

/// Deviations of the quantities the family provably shares with the base
/// hypersurface.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SharedQuantities {
    /// `|q* - q|`
    pub q_deviation: f64,
    /// `max |X* - X|` componentwise
    pub conormal_deviation: f64,
    /// `max |B*_ij - B_ij|`
    pub b_form_deviation: f64,
    /// normal re-orientation identity residual
    pub normal_deviation: f64,
}

pub fn shared_quantities_check(base: &RelativeFrame, star: &StarFrame) -> SharedQuantities {
    let q_deviation = (star.q_star.value() - base.q.value()).abs();
    let mut conormal_deviation = 0.0f64;
    let (sv, bv) = (star.conormal_star.value(), base.conormal.value());
    for i in 0..4 {
        conormal_deviation = conormal_deviation.max((sv[i] - bv[i]).abs());
    }
    let b_form_deviation = linalg::max_abs_diff(&star.b_form_star, &base.b_form);
    SharedQuantities {
        q_deviation,
        conormal_deviation,
        b_form_deviation,
        normal_deviation: star.normal_deviation,
    }
}

/// Both computation paths for one offset, with their discrepancies.
#[derive(Clone, Debug)]
pub struct ParallelOffset {
    pub mu: f64,
    pub a: f64,
    /// Closed-form starred curvature functions.
    pub curv_star: CurvatureSet,
    /// Nine-component closed form of the starred shape operator.
    pub b_mixed_star: Mat3,
    /// Recompute-on-the-offset oracle.
    pub recompute: StarFrame,
    /// `max |closed - recomputed|` over `H*, H2*, K*`.
    pub curvature_discrepancy: f64,
    /// `max |closed - linear-solve|` over the operator components.
    pub operator_discrepancy: f64,
    pub peterson_residual: f64,
    pub shared: SharedQuantities,
}

pub fn parallel_offset(
    base: &RelativeFrame,
    curv: &CurvatureSet,
    mu: f64,
) -> Result<ParallelOffset, OffsetError> {
    let a = a_of_mu(curv, mu)?;
    let curv_star = star_curvatures(curv, mu)?;
    let b_mixed_star = star_shape_operator(&base.b_mixed, curv.k, mu)?;
    let recompute = star_frame_recompute(base, curv, mu)?;

    let rc = &recompute.curv_star;
    let curvature_discrepancy = (curv_star.h - rc.h)
        .abs()
        .max((curv_star.h2 - rc.h2).abs())
        .max((curv_star.k - rc.k).abs());
    let operator_discrepancy = star_shape_operator_solve(&base.b_mixed, mu)
        .map(|solved| linalg::max_abs_diff(&b_mixed_star, &solved))
        .unwrap_or(f64::INFINITY);
    let peterson_residual = peterson_check(&base.x, &base.y, mu);
    let shared = shared_quantities_check(base, &recompute);

    Ok(ParallelOffset {
        mu,
        a,
        curv_star,
        b_mixed_star,
        recompute,
        curvature_discrepancy,
        operator_discrepancy,
        peterson_residual,
        shared,
    })
}
