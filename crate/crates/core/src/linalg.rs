//! Small fixed-size linear algebra over `f64`.
//!
//! Everything here is 3x3 or 4-vector sized; the jet-valued twins of these
//! routines live next to the jet type.

pub type Mat3 = [[f64; 3]; 3];
pub type Vec3 = [f64; 3];
pub type Vec4 = [f64; 4];

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Inverse via the adjugate; returns `None` when |det| <= `guard`.
pub fn inv3(m: &Mat3, guard: f64) -> Option<Mat3> {
    let det = det3(m);
    if det.abs() <= guard {
        return None;
    }
    let inv_det = 1.0 / det;
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            // cofactor of (j, i), expanded with cyclic index arithmetic
            let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
            let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
            out[i][j] = (m[j1][i1] * m[j2][i2] - m[j1][i2] * m[j2][i1]) * inv_det;
        }
    }
    Some(out)
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for (k, bk) in b.iter().enumerate() {
                out[i][j] += a[i][k] * bk[j];
            }
        }
    }
    out
}

pub fn mat_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    let mut out = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i] += m[i][j] * v[j];
        }
    }
    out
}

pub fn trace(m: &Mat3) -> f64 {
    m[0][0] + m[1][1] + m[2][2]
}

pub fn identity() -> Mat3 {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

pub fn max_abs_diff(a: &Mat3, b: &Mat3) -> f64 {
    let mut m = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

pub fn dot4(a: &Vec4, b: &Vec4) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm4(a: &Vec4) -> f64 {
    dot4(a, a).sqrt()
}

/// Least-squares solution of `T beta = v` for a 4x3 matrix `T` given by its
/// columns, via the normal equations; the Gram matrix `T^T T` must be
/// invertible.
pub fn lstsq_4x3(cols: &[Vec4; 3], v: &Vec4, guard: f64) -> Option<Vec3> {
    let mut gram = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            gram[i][j] = dot4(&cols[i], &cols[j]);
        }
        rhs[i] = dot4(&cols[i], v);
    }
    let inv = inv3(&gram, guard)?;
    Some(mat_vec(&inv, &rhs))
}

/// Component of `v` orthogonal to the span of the three columns.
pub fn orth_component(cols: &[Vec4; 3], v: &Vec4, guard: f64) -> Option<Vec4> {
    let beta = lstsq_4x3(cols, v, guard)?;
    let mut rem = *v;
    for (j, col) in cols.iter().enumerate() {
        for i in 0..4 {
            rem[i] -= beta[j] * col[i];
        }
    }
    Some(rem)
}

/// True when the symmetric matrix is positive definite (Sylvester minors).
pub fn positive_definite(m: &Mat3) -> bool {
    m[0][0] > 0.0 && (m[0][0] * m[1][1] - m[0][1] * m[1][0]) > 0.0 && det3(m) > 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let m = [[2.0, 1.0, 0.5], [1.0, 3.0, -1.0], [0.5, -1.0, 4.0]];
        let inv = inv3(&m, 1e-12).unwrap();
        let prod = mat_mul(&m, &inv);
        assert!(max_abs_diff(&prod, &identity()) < 1e-12);
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 1.0]];
        assert!(inv3(&m, 1e-12).is_none());
    }

    #[test]
    fn least_squares_recovers_exact_solution() {
        let cols = [
            [1.0, 0.0, 0.0, 2.0],
            [0.0, 1.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.5],
        ];
        let beta = [0.7, -1.3, 2.1];
        let mut v = [0.0; 4];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..4 {
                v[i] += beta[j] * col[i];
            }
        }
        let sol = lstsq_4x3(&cols, &v, 1e-12).unwrap();
        for i in 0..3 {
            assert!((sol[i] - beta[i]).abs() < 1e-12);
        }
        let rem = orth_component(&cols, &v, 1e-12).unwrap();
        assert!(norm4(&rem) < 1e-12);
    }
}
