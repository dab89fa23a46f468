//! Real-root solvers for the low-degree polynomials of the curvature
//! machinery.
//!
//! The cubic solver is discriminant-switched: three real roots go through
//! the trigonometric form, a single real root through Cardano. A triple
//! root is detected beforehand from the coefficients, because the
//! characteristic-polynomial route amplifies coefficient rounding near a
//! triple root by a cube root (an umbilic sphere would otherwise come out
//! with principal curvatures off by ~1e-6).

use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CubicRoots {
    /// All roots real, sorted descending (multiplicities repeated).
    ThreeReal([f64; 3]),
    /// One real root; the remaining pair is complex conjugate.
    OneReal(f64),
}

/// Roots of `x^3 + a2 x^2 + a1 x + a0`.
pub fn solve_monic_cubic(a2: f64, a1: f64, a0: f64) -> CubicRoots {
    let scale = a2
        .abs()
        .max(a1.abs().sqrt())
        .max(a0.abs().cbrt())
        .max(1e-30);

    // Triple root at -a2/3 iff a1 = a2^2/3 and a0 = a2^3/27.
    if (a1 - a2 * a2 / 3.0).abs() <= 1e-12 * scale * scale
        && (a0 - a2 * a2 * a2 / 27.0).abs() <= 1e-12 * scale * scale * scale
    {
        let r = -a2 / 3.0;
        return CubicRoots::ThreeReal([r, r, r]);
    }

    // Depress: x = t - a2/3.
    let shift = -a2 / 3.0;
    let p = a1 - a2 * a2 / 3.0;
    let q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;

    let disc = 0.25 * q * q + p * p * p / 27.0;
    let disc_tol = 1e-10 * scale.powi(6);

    if disc > disc_tol {
        let sq = disc.sqrt();
        let t = (-0.5 * q + sq).cbrt() + (-0.5 * q - sq).cbrt();
        CubicRoots::OneReal(t + shift)
    } else if p >= 0.0 {
        // Only reachable with p and q both ~0 after the triple-root check.
        let t = (-q).cbrt();
        let r = t + shift;
        CubicRoots::ThreeReal([r, r, r])
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let mut roots = [
            m * phi.cos() + shift,
            m * (phi - 2.0 * PI / 3.0).cos() + shift,
            m * (phi - 4.0 * PI / 3.0).cos() + shift,
        ];
        roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
        CubicRoots::ThreeReal(roots)
    }
}

/// Real roots of `a x^2 + b x + c` with `a != 0`, as the (minus, plus)
/// branch pair of the quadratic formula `(-b -+ sqrt(disc)) / (2a)`,
/// evaluated cancellation-free. `None` when the discriminant is negative.
pub fn quadratic_branches(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let qq = -0.5 * (b + sq.copysign(b));
    let (r1, r2) = if qq == 0.0 {
        (0.0, 0.0) // forces b = disc = 0, hence c = 0
    } else {
        (qq / a, c / qq)
    };
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    Some(if a > 0.0 { (lo, hi) } else { (hi, lo) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_three(roots: CubicRoots, expected: [f64; 3], tol: f64) {
        match roots {
            CubicRoots::ThreeReal(r) => {
                for (got, want) in r.iter().zip(expected.iter()) {
                    assert!((got - want).abs() < tol, "{got} vs {want}");
                }
            }
            CubicRoots::OneReal(r) => panic!("expected three real roots, got one: {r}"),
        }
    }

    #[test]
    fn distinct_real_roots() {
        // (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6, descending order
        assert_three(solve_monic_cubic(-6.0, 11.0, -6.0), [3.0, 2.0, 1.0], 1e-12);
    }

    #[test]
    fn double_root() {
        // (x-1)(x-2)^2 = x^3 - 5x^2 + 8x - 4
        assert_three(solve_monic_cubic(-5.0, 8.0, -4.0), [2.0, 2.0, 1.0], 1e-7);
    }

    #[test]
    fn triple_root_is_exact() {
        // (x-3)^3 = x^3 - 9x^2 + 27x - 27
        assert_three(solve_monic_cubic(-9.0, 27.0, -27.0), [3.0, 3.0, 3.0], 1e-15);
        // perturbed at rounding level still snaps
        assert_three(
            solve_monic_cubic(-3.0, 3.0 + 2e-16, -1.0 + 1e-16),
            [1.0, 1.0, 1.0],
            1e-12,
        );
    }

    #[test]
    fn complex_pair_detected() {
        // (x-1)(x^2+1) = x^3 - x^2 + x - 1
        match solve_monic_cubic(-1.0, 1.0, -1.0) {
            CubicRoots::OneReal(r) => assert!((r - 1.0).abs() < 1e-12),
            CubicRoots::ThreeReal(r) => panic!("expected one real root, got {r:?}"),
        }
    }

    #[test]
    fn negative_roots() {
        // (x+1)(x+2)(x-0.5)
        let (a2, a1, a0) = (2.5, 0.5, -1.0);
        assert_three(solve_monic_cubic(a2, a1, a0), [0.5, -1.0, -2.0], 1e-12);
    }

    #[test]
    fn quadratic_branch_assignment() {
        // x^2 - 3x + 2: minus branch (3-1)/2 = 1, plus branch 2
        let (lo, hi) = quadratic_branches(1.0, -3.0, 2.0).unwrap();
        assert_eq!((lo, hi), (1.0, 2.0));
        // leading coefficient negative flips the branch order:
        // -x^2 + 3x - 2 has the same roots; minus branch is (-3 - 1)/(-2) = 2
        let (m, p) = quadratic_branches(-1.0, 3.0, -2.0).unwrap();
        assert_eq!((m, p), (2.0, 1.0));
        assert!(quadratic_branches(1.0, 0.0, 1.0).is_none());
    }

    #[test]
    fn quadratic_cancellation_free() {
        // x^2 - 1e8 x + 1: naive minus branch loses all precision
        let (lo, _hi) = quadratic_branches(1.0, -1e8, 1.0).unwrap();
        assert!((lo - 1e-8).abs() < 1e-20);
    }
}
