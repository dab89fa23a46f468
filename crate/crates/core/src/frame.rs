//! Pointwise frame of a relatively normalized hypersurface in R^4.
//!
//! From order-4 jets of the immersion and a normalization mode this module
//! builds the unit normal, support function, relative normalization `y`,
//! conormal `X = xi/q`, the fundamental forms, the relative metric
//! `G = h/q`, the bilinear form `B` and the mixed shape-operator components
//! `B_i^j` defined by the Weingarten-type equations `d_i y = -B_i^j d_j x`,
//! together with the curvature functions `H, H2, K` (normed elementary
//! symmetric functions of the relative principal curvatures).
//!
//! The support-function gradient in `y` is taken with respect to the third
//! fundamental form in the basis `d_j xi` of the spherical image; this is
//! the convention under which `<X, y> = 1` and the tangency of `d_i y`
//! hold identically for non-constant `q`.

use crate::cubic::{solve_monic_cubic, CubicRoots};
use crate::expr::{self, Expression};
use crate::jet::{Jet, JetError, VecJet};
use crate::linalg::{self, Mat3};
use crate::tol;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("degenerate immersion: tangent cross product has norm {norm:.3e} at {point:?}")]
    DegenerateImmersion { norm: f64, point: [f64; 3] },
    #[error("singular first fundamental form: det g = {det:.3e}")]
    SingularMetric { det: f64 },
    #[error("vanishing Gauss curvature: Ktilde = {ktilde:.3e}")]
    VanishingGaussCurvature { ktilde: f64 },
    #[error("support function vanishes: q = {q:.3e}")]
    ZeroSupport { q: f64 },
    #[error("singular third fundamental form: det III = {det:.3e}")]
    SingularThirdForm { det: f64 },
    #[error("singular relative metric: det G = {det:.3e}")]
    SingularRelativeMetric { det: f64 },
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Choice of the support function `q`, hence of the relative normalization.
#[derive(Clone, Debug)]
pub enum NormalizationMode {
    /// `q = 1`: the relative geometry coincides with the Euclidean one.
    Euclidean,
    /// `q = |Ktilde|^(1/5)`, the equiaffine (Blaschke) normalization in
    /// R^4. The absolute value makes the mode orientation-stable: flipping
    /// the unit normal flips the sign of `Ktilde` (odd hypersurface
    /// dimension) but leaves `q` unchanged.
    Equiaffine,
    /// User-supplied expression in the chart variables; must not vanish.
    Custom { expr: Expression, source: String },
}

impl std::fmt::Display for NormalizationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NormalizationMode::Euclidean => write!(f, "euclidean"),
            NormalizationMode::Equiaffine => write!(f, "equiaffine"),
            NormalizationMode::Custom { source, .. } => write!(f, "custom({source})"),
        }
    }
}

/// First, second and third fundamental forms as order-carrying jets, plus
/// the Euclidean Gauss curvature `Ktilde = det h / det g`.
pub struct FundamentalForms {
    pub g: [[Jet; 3]; 3],
    pub h: [[Jet; 3]; 3],
    pub third: [[Jet; 3]; 3],
    pub ktilde: Jet,
}

impl FundamentalForms {
    pub fn g_values(&self) -> Mat3 {
        jet_mat_values(&self.g)
    }
    pub fn h_values(&self) -> Mat3 {
        jet_mat_values(&self.h)
    }
    pub fn third_values(&self) -> Mat3 {
        jet_mat_values(&self.third)
    }
}

/// Everything the construction defines at one parameter point.
#[derive(Clone, Debug)]
pub struct RelativeFrame {
    pub point: [f64; 3],
    pub orientation: f64,
    /// Immersion jet (order 4).
    pub x: VecJet,
    /// Unit normal jet.
    pub xi: VecJet,
    /// Support function jet, `q = <xi, y>`.
    pub q: Jet,
    /// Relative normalization jet.
    pub y: VecJet,
    /// Conormal jet, `X = xi / q`.
    pub conormal: VecJet,
    pub g: Mat3,
    pub h: Mat3,
    pub third: Mat3,
    /// Relative metric `G = h / q`.
    pub rel_metric: Mat3,
    /// Bilinear form `B_ij = <d_i y, d_j X>`.
    pub b_form: Mat3,
    /// Mixed components `B_i^j` (row `i`) of the relative shape operator.
    pub b_mixed: Mat3,
    pub ktilde: f64,
}

/// Relative curvature functions at a point. `kappas` holds the descending
/// real eigenvalues of the shape operator, or `None` when the
/// characteristic cubic has a complex pair.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CurvatureSet {
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "H2")]
    pub h2: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub kappas: Option<[f64; 3]>,
    pub radii: [Option<f64>; 3],
}

impl CurvatureSet {
    pub fn eigenvalues_real(&self) -> bool {
        self.kappas.is_some()
    }
}

pub(crate) fn jet_mat_values(m: &[[Jet; 3]; 3]) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[i][j].value();
        }
    }
    out
}

fn det3_jet(m: &[[Jet; 3]; 3]) -> Jet {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn inv3_jet(m: &[[Jet; 3]; 3]) -> Result<[[Jet; 3]; 3], JetError> {
    let det = det3_jet(m);
    let inv_det = det.recip()?;
    let mut out = *m;
    for i in 0..3 {
        for j in 0..3 {
            let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
            let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
            out[i][j] = (m[j1][i1] * m[j2][i2] - m[j1][i2] * m[j2][i1]) * inv_det;
        }
    }
    Ok(out)
}

/// Generalized vector product in R^4: `<cross4(v1,v2,v3), w> = det[v1 v2 v3 w]`
/// for every `w` (column convention). Degenerate input yields the zero
/// vector.
pub fn cross4(v1: &VecJet, v2: &VecJet, v3: &VecJet) -> VecJet {
    let base = v1.base_point();
    let mut out = [Jet::constant(0.0, base); 4];
    for (i, slot) in out.iter_mut().enumerate() {
        let rows: Vec<usize> = (0..4).filter(|&r| r != i).collect();
        let m: Vec<[Jet; 3]> = rows
            .iter()
            .map(|&r| [v1.components[r], v2.components[r], v3.components[r]])
            .collect();
        let minor = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        // cofactor sign of row i in the last column of the 4x4 determinant
        let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
        *slot = minor.scale(sign);
    }
    VecJet::new(out)
}

/// Unit normal jet `xi = orientation * cross4(d1 x, d2 x, d3 x) / |...|`.
pub fn unit_normal(x: &VecJet, orientation: f64) -> Result<VecJet, FrameError> {
    let cross = cross4(&x.derivative(0), &x.derivative(1), &x.derivative(2));
    let norm_sq = cross.dot(&cross);
    let norm_value = norm_sq.value().max(0.0).sqrt();
    if norm_value < tol::RANK_GUARD {
        return Err(FrameError::DegenerateImmersion {
            norm: norm_value,
            point: x.base_point(),
        });
    }
    let inv_norm = norm_sq.sqrt()?.recip()?;
    Ok(cross.scale_jet(&inv_norm).scale(orientation))
}

/// First (`g`), second (`h`) and third (`III`) fundamental forms and the
/// Euclidean Gauss curvature, all as jets.
pub fn fundamental_forms(x: &VecJet, xi: &VecJet) -> Result<FundamentalForms, FrameError> {
    let dx = [x.derivative(0), x.derivative(1), x.derivative(2)];
    let dxi = [xi.derivative(0), xi.derivative(1), xi.derivative(2)];
    let base = x.base_point();
    let zero = Jet::constant(0.0, base);
    let mut g = [[zero; 3]; 3];
    let mut h = [[zero; 3]; 3];
    let mut third = [[zero; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = dx[i].dot(&dx[j]);
            h[i][j] = dx[i].derivative(j).dot(xi);
            third[i][j] = dxi[i].dot(&dxi[j]);
        }
    }
    let det_g = det3_jet(&g);
    if det_g.value().abs() < tol::RANK_GUARD {
        return Err(FrameError::SingularMetric { det: det_g.value() });
    }
    let ktilde = det3_jet(&h).div(&det_g)?;
    if ktilde.value().abs() < tol::GAUSS_CURV_MIN {
        return Err(FrameError::VanishingGaussCurvature {
            ktilde: ktilde.value(),
        });
    }
    Ok(FundamentalForms {
        g,
        h,
        third,
        ktilde,
    })
}

/// Support function jet for the requested normalization mode.
pub fn support_function(
    mode: &NormalizationMode,
    ktilde: &Jet,
    point: [f64; 3],
) -> Result<Jet, FrameError> {
    let q = match mode {
        NormalizationMode::Euclidean => Jet::constant(1.0, point),
        NormalizationMode::Equiaffine => ktilde.abs()?.powf(0.2)?,
        NormalizationMode::Custom { expr, .. } => expr::eval_jet(expr, point)?,
    };
    if q.value().abs() < tol::SUPPORT_MIN {
        return Err(FrameError::ZeroSupport { q: q.value() });
    }
    Ok(q)
}

/// Relative normalization from the support function: the third-form
/// gradient of `q` over the spherical image plus the normal component,
/// `y = III^(ij) d_i q d_j xi + q xi`.
pub fn relative_normal(xi: &VecJet, q: &Jet, third: &[[Jet; 3]; 3]) -> Result<VecJet, FrameError> {
    let det = det3_jet(third).value();
    if det.abs() < tol::RANK_GUARD {
        return Err(FrameError::SingularThirdForm { det });
    }
    let inv = inv3_jet(third)?;
    let dq = [q.derivative(0), q.derivative(1), q.derivative(2)];
    let dxi = [xi.derivative(0), xi.derivative(1), xi.derivative(2)];
    let mut y = xi.scale_jet(q);
    for i in 0..3 {
        for j in 0..3 {
            y = y.add(&dxi[j].scale_jet(&(inv[i][j] * dq[i])));
        }
    }
    Ok(y)
}

/// Conormal `X = xi / q`.
pub fn conormal(xi: &VecJet, q: &Jet) -> Result<VecJet, FrameError> {
    Ok(xi.scale_jet(&q.recip().map_err(FrameError::Jet)?))
}

/// Relative metric `G = h/q`, bilinear form `B_ij = <d_i y, d_j X>` and the
/// mixed components `B_i^j`, solved row-by-row in least squares against the
/// tangent basis.
pub fn relative_b_forms(
    x: &VecJet,
    y: &VecJet,
    conormal: &VecJet,
    q: &Jet,
    h: &Mat3,
) -> Result<(Mat3, Mat3, Mat3), FrameError> {
    let q0 = q.value();
    let mut rel_metric = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            rel_metric[i][j] = h[i][j] / q0;
        }
    }
    let det_metric = linalg::det3(&rel_metric);
    if det_metric.abs() < tol::RANK_GUARD {
        return Err(FrameError::SingularRelativeMetric { det: det_metric });
    }

    let dy = [y.derivative(0), y.derivative(1), y.derivative(2)];
    let dxn = [
        conormal.derivative(0),
        conormal.derivative(1),
        conormal.derivative(2),
    ];
    let mut b_form = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b_form[i][j] = dy[i].dot(&dxn[j]).value();
        }
    }

    let tangent = [
        x.derivative(0).value(),
        x.derivative(1).value(),
        x.derivative(2).value(),
    ];
    let mut b_mixed = [[0.0; 3]; 3];
    for i in 0..3 {
        let rhs = dy[i].value().map(|v| -v);
        let row = linalg::lstsq_4x3(&tangent, &rhs, tol::RANK_GUARD).ok_or(
            FrameError::SingularMetric {
                det: linalg::det3(&rel_metric),
            },
        )?;
        b_mixed[i] = row;
    }
    Ok((rel_metric, b_form, b_mixed))
}

/// Index-raising route to the mixed components: `B_i^j = G^(jk) B_ki`.
pub fn raise_index(rel_metric: &Mat3, b_form: &Mat3) -> Option<Mat3> {
    let inv = linalg::inv3(rel_metric, tol::RANK_GUARD)?;
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[i][j] += inv[j][k] * b_form[k][i];
            }
        }
    }
    Some(out)
}

/// Curvature functions of the mixed shape operator: `H` (mean), `H2`
/// (second), `K` (relative Gauss-Kronecker), the descending real roots of
/// the characteristic cubic and their reciprocals.
pub fn curvature_functions(b_mixed: &Mat3) -> CurvatureSet {
    let b = b_mixed;
    let h = linalg::trace(b) / 3.0;
    let h2 = (b[0][0] * b[1][1] + b[1][1] * b[2][2] + b[2][2] * b[0][0]
        - b[0][1] * b[1][0]
        - b[1][2] * b[2][1]
        - b[0][2] * b[2][0])
        / 3.0;
    let k = linalg::det3(b);
    // kappa^3 - 3H kappa^2 + 3H2 kappa - K = 0
    let kappas = match solve_monic_cubic(-3.0 * h, 3.0 * h2, -k) {
        CubicRoots::ThreeReal(r) => Some(r),
        CubicRoots::OneReal(_) => None,
    };
    let radii = match kappas {
        Some(r) => r.map(|kappa| (kappa.abs() > tol::RECIP_GUARD).then(|| 1.0 / kappa)),
        None => [None; 3],
    };
    CurvatureSet {
        h,
        h2,
        k,
        kappas,
        radii,
    }
}

/// Assemble the full frame and curvature set at a chart point.
pub fn build_frame(
    x_exprs: &[Expression; 4],
    mode: &NormalizationMode,
    orientation: f64,
    point: [f64; 3],
) -> Result<(RelativeFrame, CurvatureSet), FrameError> {
    let x = VecJet::new([
        expr::eval_jet(&x_exprs[0], point)?,
        expr::eval_jet(&x_exprs[1], point)?,
        expr::eval_jet(&x_exprs[2], point)?,
        expr::eval_jet(&x_exprs[3], point)?,
    ]);
    let xi = unit_normal(&x, orientation)?;
    let forms = fundamental_forms(&x, &xi)?;
    let q = support_function(mode, &forms.ktilde, point)?;
    let y = relative_normal(&xi, &q, &forms.third)?;
    let conormal_jet = conormal(&xi, &q)?;
    let h = forms.h_values();
    let (rel_metric, b_form, b_mixed) = relative_b_forms(&x, &y, &conormal_jet, &q, &h)?;
    let curv = curvature_functions(&b_mixed);
    let frame = RelativeFrame {
        point,
        orientation,
        x,
        xi,
        q,
        y,
        conormal: conormal_jet,
        g: forms.g_values(),
        h,
        third: forms.third_values(),
        rel_metric,
        b_form,
        b_mixed,
        ktilde: forms.ktilde.value(),
    };
    Ok((frame, curv))
}

/// Default orientation: the sign that makes the second fundamental form
/// positive definite at the probe point (the inward normal on a convex
/// surface), `+1` when neither sign is definite.
pub fn auto_orientation(x_exprs: &[Expression; 4], point: [f64; 3]) -> Result<f64, FrameError> {
    let x = VecJet::new([
        expr::eval_jet(&x_exprs[0], point)?,
        expr::eval_jet(&x_exprs[1], point)?,
        expr::eval_jet(&x_exprs[2], point)?,
        expr::eval_jet(&x_exprs[3], point)?,
    ]);
    let xi = unit_normal(&x, 1.0)?;
    let dx = [x.derivative(0), x.derivative(1), x.derivative(2)];
    let mut h = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            h[i][j] = dx[i].derivative(j).dot(&xi).value();
        }
    }
    if linalg::positive_definite(&h) {
        Ok(1.0)
    } else {
        let neg = h.map(|row| row.map(|v| -v));
        if linalg::positive_definite(&neg) {
            Ok(-1.0)
        } else {
            Ok(1.0)
        }
    }
}

/// Residuals of the frame laws; with exact jet arithmetic these are pure
/// rounding plus least-squares conditioning.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FrameResiduals {
    /// `max_i |d_i y + B_i^j d_j x|`
    pub weingarten: f64,
    /// `max |B_ij - B_ji|`
    pub b_symmetry: f64,
    /// `max_i |<d_i y, xi>|`
    pub y_tangency: f64,
    /// `max_i |<X, d_i x>|`
    pub conormal_orthogonality: f64,
    /// `|<X, y> - 1|`
    pub conormal_normalization: f64,
    /// `max |X - xi/q|` componentwise
    pub conormal_scaling: f64,
    /// `max |<d_j d_i x, X> - h_ij/q|`
    pub metric_relation: f64,
    /// `max |B_i^j - G^(jk) B_ki|` (least-squares vs index raising)
    pub mixed_consistency: f64,
    /// relative `|sum R_i - 3 H2/K|` when all radii are defined
    pub radii_sum: Option<f64>,
}

pub fn frame_residuals(frame: &RelativeFrame, curv: &CurvatureSet) -> FrameResiduals {
    let dx = [
        frame.x.derivative(0),
        frame.x.derivative(1),
        frame.x.derivative(2),
    ];
    let dy = [
        frame.y.derivative(0),
        frame.y.derivative(1),
        frame.y.derivative(2),
    ];

    let mut weingarten = 0.0f64;
    for i in 0..3 {
        let mut res = dy[i].value();
        for j in 0..3 {
            let t = dx[j].value();
            for (slot, tc) in res.iter_mut().zip(t.iter()) {
                *slot += frame.b_mixed[i][j] * tc;
            }
        }
        weingarten = weingarten.max(linalg::norm4(&res));
    }

    let mut b_symmetry = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            b_symmetry = b_symmetry.max((frame.b_form[i][j] - frame.b_form[j][i]).abs());
        }
    }

    let mut y_tangency = 0.0f64;
    let mut conormal_orthogonality = 0.0f64;
    for i in 0..3 {
        y_tangency = y_tangency.max(dy[i].dot(&frame.xi).value().abs());
        conormal_orthogonality =
            conormal_orthogonality.max(frame.conormal.dot(&dx[i]).value().abs());
    }

    let conormal_normalization = (frame.conormal.dot(&frame.y).value() - 1.0).abs();

    let mut conormal_scaling = 0.0f64;
    let q0 = frame.q.value();
    let xi_val = frame.xi.value();
    let x_val = frame.conormal.value();
    for i in 0..4 {
        conormal_scaling = conormal_scaling.max((x_val[i] - xi_val[i] / q0).abs());
    }

    let mut metric_relation = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let lhs = dx[i].derivative(j).dot(&frame.conormal).value();
            metric_relation = metric_relation.max((lhs - frame.h[i][j] / q0).abs());
        }
    }

    let mixed_consistency = raise_index(&frame.rel_metric, &frame.b_form)
        .map(|raised| linalg::max_abs_diff(&frame.b_mixed, &raised))
        .unwrap_or(f64::INFINITY);

    let radii_sum = match (curv.radii, curv.k.abs() > tol::RECIP_GUARD) {
        ([Some(r1), Some(r2), Some(r3)], true) => {
            let expected = 3.0 * curv.h2 / curv.k;
            Some(((r1 + r2 + r3) - expected).abs() / expected.abs().max(1e-30))
        }
        _ => None,
    };

    FrameResiduals {
        weingarten,
        b_symmetry,
        y_tangency,
        conormal_orthogonality,
        conormal_normalization,
        conormal_scaling,
        metric_relation,
        mixed_consistency,
        radii_sum,
    }
}
