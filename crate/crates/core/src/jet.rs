//! Truncated multivariate Taylor arithmetic ("jets") in the three chart
//! variables, at fixed total order 4.
//!
//! A [`Jet`] stores the 35 Taylor coefficients of a scalar function about a
//! base point: the coefficient of multi-index `(a,b,c)` is
//! `d^(a+b+c) f / (du1^a du2^b du3^c) / (a! b! c!)`. Arithmetic is exact
//! truncation, so a coefficient of total degree `d` in a result is exact
//! whenever all inputs are exact through degree `d`. Derivatives therefore
//! consume one order: the derivative of an order-4-exact jet is
//! order-3-exact, with the top coefficients implicitly zero.

use thiserror::Error;

/// Truncation order of every jet.
pub const JET_ORDER: usize = 4;
/// Number of monomials of total degree <= 4 in three variables.
pub const JET_TERMS: usize = 35;

/// Multi-index enumeration (graded lexicographic), its inverse lookup and
/// the total degree of every slot.
type JetTables = ([[u8; 3]; JET_TERMS], [[[u8; 5]; 5]; 5], [u8; JET_TERMS]);

const fn build_tables() -> JetTables {
    let mut multi = [[0u8; 3]; JET_TERMS];
    let mut lookup = [[[u8::MAX; 5]; 5]; 5];
    let mut deg = [0u8; JET_TERMS];
    let mut n = 0usize;
    let mut d = 0usize;
    while d <= JET_ORDER {
        let mut a = d + 1;
        while a > 0 {
            a -= 1;
            let mut b = d - a + 1;
            while b > 0 {
                b -= 1;
                let c = d - a - b;
                multi[n] = [a as u8, b as u8, c as u8];
                lookup[a][b][c] = n as u8;
                deg[n] = d as u8;
                n += 1;
            }
        }
        d += 1;
    }
    (multi, lookup, deg)
}

const TABLES: JetTables = build_tables();
const MULTI: [[u8; 3]; JET_TERMS] = TABLES.0;
const LOOKUP: [[[u8; 5]; 5]; 5] = TABLES.1;
const DEG: [u8; JET_TERMS] = TABLES.2;
const FACT: [f64; 5] = [1.0, 1.0, 2.0, 6.0, 24.0];

fn index_of(a: usize, b: usize, c: usize) -> usize {
    debug_assert!(a + b + c <= JET_ORDER);
    LOOKUP[a][b][c] as usize
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    /// An elementary function was evaluated outside its real domain.
    #[error("domain error: {func} applied to {value}")]
    Domain { func: &'static str, value: f64 },
    /// A derivative of total order beyond the truncation order was requested.
    #[error("derivative order {requested} exceeds the jet order {max}")]
    OrderExceeded { requested: usize, max: usize },
}

/// Order-4 Taylor expansion of a scalar about a point of the chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    base: [f64; 3],
    coeffs: [f64; JET_TERMS],
}

impl Jet {
    pub fn constant(value: f64, base: [f64; 3]) -> Self {
        let mut coeffs = [0.0; JET_TERMS];
        coeffs[0] = value;
        Self { base, coeffs }
    }

    /// The chart variable `u{axis+1}` as a jet: value `base[axis]`, unit
    /// first-order coefficient along its own axis.
    pub fn variable(axis: usize, base: [f64; 3]) -> Self {
        assert!(axis < 3);
        let mut jet = Self::constant(base[axis], base);
        jet.coeffs[index_of(
            (axis == 0) as usize,
            (axis == 1) as usize,
            (axis == 2) as usize,
        )] = 1.0;
        jet
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn base_point(&self) -> [f64; 3] {
        self.base
    }

    /// Taylor coefficient of the monomial `(u1-b1)^a (u2-b2)^b (u3-b3)^c`.
    pub fn coeff(&self, a: usize, b: usize, c: usize) -> f64 {
        assert!(a + b + c <= JET_ORDER, "coefficient order out of range");
        self.coeffs[index_of(a, b, c)]
    }

    /// Partial derivative for a sequence of axis indices, e.g. `[0,0,1]`
    /// for d^2/du1^2 d/du2.
    pub fn partial(&self, axes: &[usize]) -> Result<f64, JetError> {
        let mut counts = [0usize; 3];
        for &axis in axes {
            assert!(axis < 3, "axis index out of range");
            counts[axis] += 1;
        }
        self.partial_counts(counts[0], counts[1], counts[2])
    }

    /// Partial derivative `d^(a+b+c) f / du1^a du2^b du3^c` at the base point.
    pub fn partial_counts(&self, a: usize, b: usize, c: usize) -> Result<f64, JetError> {
        let total = a + b + c;
        if total > JET_ORDER {
            return Err(JetError::OrderExceeded {
                requested: total,
                max: JET_ORDER,
            });
        }
        Ok(self.coeffs[index_of(a, b, c)] * FACT[a] * FACT[b] * FACT[c])
    }

    /// Jet of the partial derivative along `axis`; exact one order below
    /// the operand.
    pub fn derivative(&self, axis: usize) -> Jet {
        assert!(axis < 3);
        let mut out = Jet::constant(0.0, self.base);
        for (n, m) in MULTI.iter().enumerate() {
            if m[axis] == 0 {
                continue;
            }
            let mut target = [m[0] as usize, m[1] as usize, m[2] as usize];
            target[axis] -= 1;
            out.coeffs[index_of(target[0], target[1], target[2])] = self.coeffs[n] * m[axis] as f64;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut out = *self;
        for c in &mut out.coeffs {
            *c *= s;
        }
        out
    }

    /// Composition with a univariate function given by its Taylor
    /// coefficients `f^(k)(value)/k!` about the jet's value.
    fn compose(&self, series: [f64; JET_ORDER + 1]) -> Jet {
        let mut w = *self;
        w.coeffs[0] = 0.0;
        let mut acc = Jet::constant(series[JET_ORDER], self.base);
        for k in (0..JET_ORDER).rev() {
            acc = acc * w + series[k];
        }
        acc
    }

    pub fn recip(&self) -> Result<Jet, JetError> {
        let v = self.value();
        if v == 0.0 {
            return Err(JetError::Domain {
                func: "recip",
                value: v,
            });
        }
        let r = 1.0 / v;
        Ok(self.compose([r, -r * r, r * r * r, -r * r * r * r, r * r * r * r * r]))
    }

    pub fn div(&self, rhs: &Jet) -> Result<Jet, JetError> {
        let v = rhs.value();
        if v == 0.0 {
            return Err(JetError::Domain {
                func: "div",
                value: v,
            });
        }
        Ok(*self * rhs.recip()?)
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose([s, c, -s / 2.0, -c / 6.0, s / 24.0])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose([c, -s, -c / 2.0, s / 6.0, c / 24.0])
    }

    pub fn tan(&self) -> Result<Jet, JetError> {
        let c = self.cos();
        if c.value() == 0.0 {
            return Err(JetError::Domain {
                func: "tan",
                value: self.value(),
            });
        }
        self.sin().div(&c)
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose([e, e, e / 2.0, e / 6.0, e / 24.0])
    }

    pub fn ln(&self) -> Result<Jet, JetError> {
        let v = self.value();
        if v <= 0.0 {
            return Err(JetError::Domain {
                func: "log",
                value: v,
            });
        }
        let r = 1.0 / v;
        Ok(self.compose([
            v.ln(),
            r,
            -r * r / 2.0,
            r * r * r / 3.0,
            -r * r * r * r / 4.0,
        ]))
    }

    pub fn sqrt(&self) -> Result<Jet, JetError> {
        let v = self.value();
        if v <= 0.0 {
            return Err(JetError::Domain {
                func: "sqrt",
                value: v,
            });
        }
        let s = v.sqrt();
        Ok(self.compose([
            s,
            s / (2.0 * v),
            -s / (8.0 * v * v),
            s / (16.0 * v * v * v),
            -5.0 * s / (128.0 * v * v * v * v),
        ]))
    }

    pub fn sinh(&self) -> Jet {
        let (sh, ch) = (self.value().sinh(), self.value().cosh());
        self.compose([sh, ch, sh / 2.0, ch / 6.0, sh / 24.0])
    }

    pub fn cosh(&self) -> Jet {
        let (sh, ch) = (self.value().sinh(), self.value().cosh());
        self.compose([ch, sh, ch / 2.0, sh / 6.0, ch / 24.0])
    }

    /// Sign-carrying absolute value; undefined (no one-sided jet) at 0.
    pub fn abs(&self) -> Result<Jet, JetError> {
        let v = self.value();
        if v == 0.0 {
            return Err(JetError::Domain {
                func: "abs",
                value: v,
            });
        }
        Ok(if v > 0.0 { *self } else { -*self })
    }

    /// Real-branch cube root, valid for either sign of the value.
    pub fn cbrt(&self) -> Result<Jet, JetError> {
        let v = self.value();
        if v == 0.0 {
            return Err(JetError::Domain {
                func: "cbrt",
                value: v,
            });
        }
        let c = v.cbrt();
        Ok(self.compose([
            c,
            c / (3.0 * v),
            -c / (9.0 * v * v),
            5.0 * c / (81.0 * v * v * v),
            -10.0 * c / (243.0 * v * v * v * v),
        ]))
    }

    /// Integer power by repeated multiplication; any base value, negative
    /// exponents through the reciprocal.
    pub fn powi(&self, n: i32) -> Result<Jet, JetError> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        let mut acc = Jet::constant(1.0, self.base);
        for _ in 0..n {
            acc = acc * *self;
        }
        Ok(acc)
    }

    /// Real power with constant exponent. Integer exponents take the
    /// repeated-multiplication path; fractional ones need a positive value.
    pub fn powf(&self, p: f64) -> Result<Jet, JetError> {
        if p.fract() == 0.0 && p.abs() <= 64.0 {
            return self.powi(p as i32);
        }
        let v = self.value();
        if v <= 0.0 {
            return Err(JetError::Domain {
                func: "pow",
                value: v,
            });
        }
        let mut series = [0.0; JET_ORDER + 1];
        let mut binom = 1.0;
        for (k, slot) in series.iter_mut().enumerate() {
            *slot = binom * v.powf(p - k as f64);
            binom *= (p - k as f64) / (k as f64 + 1.0);
        }
        Ok(self.compose(series))
    }
}

impl std::ops::Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl std::ops::Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        debug_assert_eq!(self.base, rhs.base);
        let mut out = self;
        for (c, r) in out.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *c += r;
        }
        out
    }
}

impl std::ops::Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl std::ops::Add<f64> for Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut out = self;
        out.coeffs[0] += rhs;
        out
    }
}

impl std::ops::Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        debug_assert_eq!(self.base, rhs.base);
        let mut out = Jet::constant(0.0, self.base);
        for i in 0..JET_TERMS {
            let fi = self.coeffs[i];
            if fi == 0.0 {
                continue;
            }
            let di = DEG[i];
            for j in 0..JET_TERMS {
                if di + DEG[j] > JET_ORDER as u8 {
                    continue;
                }
                let gj = rhs.coeffs[j];
                if gj == 0.0 {
                    continue;
                }
                let (a, b) = (MULTI[i], MULTI[j]);
                out.coeffs[index_of(
                    (a[0] + b[0]) as usize,
                    (a[1] + b[1]) as usize,
                    (a[2] + b[2]) as usize,
                )] += fi * gj;
            }
        }
        out
    }
}

impl std::ops::Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl std::ops::Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scale(self)
    }
}

/// Four jet components sharing a base point: a map into R^4 together with
/// its derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VecJet {
    pub components: [Jet; 4],
}

impl VecJet {
    pub fn new(components: [Jet; 4]) -> Self {
        debug_assert!(components
            .iter()
            .all(|c| c.base_point() == components[0].base_point()));
        Self { components }
    }

    pub fn constant(values: [f64; 4], base: [f64; 3]) -> Self {
        Self::new(values.map(|v| Jet::constant(v, base)))
    }

    pub fn value(&self) -> [f64; 4] {
        self.components.map(|c| c.value())
    }

    pub fn base_point(&self) -> [f64; 3] {
        self.components[0].base_point()
    }

    pub fn derivative(&self, axis: usize) -> VecJet {
        Self::new(self.components.map(|c| c.derivative(axis)))
    }

    pub fn dot(&self, other: &VecJet) -> Jet {
        let mut acc = self.components[0] * other.components[0];
        for i in 1..4 {
            acc = acc + self.components[i] * other.components[i];
        }
        acc
    }

    pub fn norm(&self) -> Result<Jet, JetError> {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> VecJet {
        Self::new(self.components.map(|c| c.scale(s)))
    }

    pub fn scale_jet(&self, s: &Jet) -> VecJet {
        Self::new(self.components.map(|c| c * *s))
    }

    pub fn add(&self, other: &VecJet) -> VecJet {
        Self::new([
            self.components[0] + other.components[0],
            self.components[1] + other.components[1],
            self.components[2] + other.components[2],
            self.components[3] + other.components[3],
        ])
    }

    pub fn sub(&self, other: &VecJet) -> VecJet {
        self.add(&other.scale(-1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const ORIGIN: [f64; 3] = [0.0; 3];

    #[test]
    fn tables_are_consistent() {
        assert_eq!(MULTI.len(), 35);
        for (n, m) in MULTI.iter().enumerate() {
            assert_eq!(
                index_of(m[0] as usize, m[1] as usize, m[2] as usize),
                n,
                "lookup must invert the enumeration"
            );
            assert_eq!(DEG[n], m[0] + m[1] + m[2]);
        }
    }

    #[test]
    fn product_of_variables() {
        // u1*u2 at (1,2,0): value 2, d1 = 2, d2 = 1, d1 d2 = 1, rest 0
        let base = [1.0, 2.0, 0.0];
        let j = Jet::variable(0, base) * Jet::variable(1, base);
        assert_eq!(j.value(), 2.0);
        assert_eq!(j.partial(&[0]).unwrap(), 2.0);
        assert_eq!(j.partial(&[1]).unwrap(), 1.0);
        assert_eq!(j.partial(&[0, 1]).unwrap(), 1.0);
        assert_eq!(j.partial(&[2]).unwrap(), 0.0);
        assert_eq!(j.partial(&[0, 0]).unwrap(), 0.0);
        assert_eq!(j.partial(&[0, 1, 2]).unwrap(), 0.0);
    }

    #[test]
    fn third_order_partial_of_monomial() {
        // u1^2 * u2 at the origin: d1 d1 d2 = 2
        let j = Jet::variable(0, ORIGIN) * Jet::variable(0, ORIGIN) * Jet::variable(1, ORIGIN);
        assert_eq!(j.partial(&[0, 0, 1]).unwrap(), 2.0);
        assert_eq!(j.partial(&[0, 1, 0]).unwrap(), 2.0);
        assert_eq!(j.value(), 0.0);
    }

    #[test]
    fn sine_series_at_origin() {
        let j = Jet::variable(0, ORIGIN).sin();
        assert_relative_eq!(j.value(), 0.0);
        assert_relative_eq!(j.partial(&[0]).unwrap(), 1.0);
        assert_relative_eq!(j.coeff(3, 0, 0), -1.0 / 6.0);
        assert_relative_eq!(j.coeff(2, 0, 0), 0.0);
    }

    #[test]
    fn exp_of_sum_coefficients() {
        // exp(u1+u3) at origin: coefficient of (a,0,c) is 1/(a! c!)
        let j = (Jet::variable(0, ORIGIN) + Jet::variable(2, ORIGIN)).exp();
        for a in 0..=4usize {
            for c in 0..=(4 - a) {
                assert_relative_eq!(
                    j.coeff(a, 0, c),
                    1.0 / (FACT[a] * FACT[c]),
                    max_relative = 1e-14
                );
            }
        }
    }

    #[test]
    fn log_and_sqrt_series() {
        // ln(1+u1): [0, 1, -1/2, 1/3, -1/4]
        let j = (Jet::variable(0, ORIGIN) + 1.0).ln().unwrap();
        assert_relative_eq!(j.coeff(1, 0, 0), 1.0);
        assert_relative_eq!(j.coeff(2, 0, 0), -0.5);
        assert_relative_eq!(j.coeff(3, 0, 0), 1.0 / 3.0);
        assert_relative_eq!(j.coeff(4, 0, 0), -0.25);
        // sqrt at a generic point matches analytic derivatives
        let base = [2.25, 0.0, 0.0];
        let s = Jet::variable(0, base).sqrt().unwrap();
        assert_relative_eq!(s.value(), 1.5);
        assert_relative_eq!(s.partial(&[0]).unwrap(), 0.5 / 1.5, max_relative = 1e-14);
        assert_relative_eq!(
            s.partial(&[0, 0]).unwrap(),
            -0.25 * 2.25f64.powf(-1.5),
            max_relative = 1e-14
        );
    }

    #[test]
    fn division_matches_geometric_series() {
        // 1/(1-u1): all coefficients 1
        let one = Jet::constant(1.0, ORIGIN);
        let denom = one - Jet::variable(0, ORIGIN);
        let j = one.div(&denom).unwrap();
        for k in 0..=4 {
            assert_relative_eq!(j.coeff(k, 0, 0), 1.0);
        }
    }

    #[test]
    fn tan_matches_sin_over_cos_derivatives() {
        let base = [0.4, 0.0, 0.0];
        let t = Jet::variable(0, base).tan().unwrap();
        let v: f64 = 0.4f64.tan();
        assert_relative_eq!(t.value(), v, max_relative = 1e-14);
        assert_relative_eq!(t.partial(&[0]).unwrap(), 1.0 + v * v, max_relative = 1e-13);
        assert_relative_eq!(
            t.partial(&[0, 0]).unwrap(),
            2.0 * v * (1.0 + v * v),
            max_relative = 1e-13
        );
    }

    #[test]
    fn cbrt_negative_branch() {
        let base = [-8.0, 0.0, 0.0];
        let j = Jet::variable(0, base).cbrt().unwrap();
        assert_relative_eq!(j.value(), -2.0);
        // d/dv v^(1/3) = 1/(3 v^(2/3)) = 1/12 at v = -8
        assert_relative_eq!(j.partial(&[0]).unwrap(), 1.0 / 12.0, max_relative = 1e-14);
    }

    #[test]
    fn fractional_power_matches_exp_log() {
        let base = [1.7, 0.0, 0.0];
        let x = Jet::variable(0, base);
        let direct = x.powf(0.2).unwrap();
        let via_exp = (x.ln().unwrap() * 0.2).exp();
        for n in 0..JET_TERMS {
            assert_relative_eq!(direct.coeffs[n], via_exp.coeffs[n], max_relative = 1e-12);
        }
    }

    #[test]
    fn order_cap_is_enforced() {
        let j = Jet::variable(0, ORIGIN).sin();
        assert_eq!(
            j.partial(&[0, 0, 0, 0, 0]),
            Err(JetError::OrderExceeded {
                requested: 5,
                max: 4
            })
        );
        assert_eq!(j.partial(&[]).unwrap(), j.value());
    }

    #[test]
    fn domain_errors() {
        let zero = Jet::constant(0.0, ORIGIN);
        assert!(matches!(zero.ln(), Err(JetError::Domain { .. })));
        assert!(matches!(zero.abs(), Err(JetError::Domain { .. })));
        assert!(matches!(zero.cbrt(), Err(JetError::Domain { .. })));
        assert!(matches!(zero.recip(), Err(JetError::Domain { .. })));
        let neg = Jet::constant(-1.0, ORIGIN);
        assert!(matches!(neg.sqrt(), Err(JetError::Domain { .. })));
        assert!(neg.abs().is_ok());
    }

    #[test]
    fn leibniz_rule_first_order() {
        let base = [0.3, -0.7, 1.1];
        let f = Jet::variable(0, base).sin() * Jet::variable(1, base);
        let g = Jet::variable(2, base).exp() + Jet::variable(0, base);
        let prod = f * g;
        for axis in 0..3 {
            let lhs = prod.partial(&[axis]).unwrap();
            let rhs =
                f.partial(&[axis]).unwrap() * g.value() + g.partial(&[axis]).unwrap() * f.value();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }

    #[test]
    fn derivative_jet_shifts_coefficients() {
        let base = [0.2, 0.1, -0.3];
        let f = (Jet::variable(0, base) * Jet::variable(1, base)).sin();
        let df = f.derivative(0);
        assert_relative_eq!(df.value(), f.partial(&[0]).unwrap());
        assert_relative_eq!(
            df.partial(&[1, 2]).unwrap(),
            f.partial(&[0, 1, 2]).unwrap(),
            max_relative = 1e-12
        );
    }
}
