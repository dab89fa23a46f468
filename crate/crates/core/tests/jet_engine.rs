//! Jet engine against independent oracles: finite differences of the plain
//! evaluator for the transcendental corpus, and exact symbolic
//! differentiation for random polynomials.

mod common;

use common::fd;
use proptest::prelude::*;
use relgeo4::expr::{self, Expression};
use relgeo4::jet::{Jet, JET_TERMS};

const FD_STEP: f64 = 1e-3;

/// Expressions covering every elementary function, with points keeping all
/// arguments inside their real domains.
fn corpus() -> Vec<(&'static str, [f64; 3])> {
    vec![
        ("sin(u1)*cos(u2) + u3", [0.3, -0.6, 1.2]),
        ("tan(u1/2) + u2*u3", [0.8, 0.4, -0.2]),
        ("exp(u1 + u3) - u2^2", [0.1, 1.3, -0.4]),
        ("log(2 + u1*u2)", [0.5, 0.7, 0.0]),
        ("sqrt(4 + u1 - u2)", [0.9, -0.3, 0.0]),
        ("sinh(u2)*cosh(u3)", [0.0, 0.6, -0.8]),
        ("abs(u1 - 2)", [0.4, 0.0, 0.0]),
        ("cbrt(u3 - 3)", [0.0, 0.0, 0.5]),
        ("(1 + u1^2)^2.5", [0.7, 0.0, 0.0]),
        ("exp(sin(u1*u2))/(2 + cos(u3))", [0.6, -0.9, 0.3]),
        ("sqrt(exp(u1) + sinh(u2)^2)", [0.2, 0.8, 0.0]),
        ("u1/(1 + u2^2) - log(3 + sin(u3))", [1.1, -0.5, 0.9]),
    ]
}

#[test]
fn transcendental_corpus_matches_finite_differences() {
    let mut worst = 0.0f64;
    for (source, p) in corpus() {
        let e = expr::parse(source).unwrap();
        let jet = expr::eval_jet(&e, p).unwrap();
        for i in 0..3 {
            let exact = jet.partial(&[i]).unwrap();
            let approx = fd::first(&e, p, i, FD_STEP);
            let err = (exact - approx).abs() / approx.abs().max(1.0);
            assert!(err <= 1e-7, "{source} d{i}: {exact} vs {approx}");
            worst = worst.max(err);
            for j in i..3 {
                let exact = jet.partial(&[i, j]).unwrap();
                let approx = fd::second(&e, p, i, j, FD_STEP);
                let err = (exact - approx).abs() / approx.abs().max(1.0);
                assert!(err <= 1e-7, "{source} d{i}d{j}: {exact} vs {approx}");
                worst = worst.max(err);
            }
        }
    }
    println!("corpus worst relative error vs finite differences: {worst:.3e}");
}

/// A sparse polynomial of total degree <= 4 as (exponents, coefficient)
/// terms.
#[derive(Clone, Debug)]
struct Poly(Vec<([usize; 3], f64)>);

impl Poly {
    fn to_expression(&self) -> Expression {
        let mut acc: Option<Expression> = None;
        for (exps, coeff) in &self.0 {
            let mut term = Expression::Number(*coeff);
            for (axis, &e) in exps.iter().enumerate() {
                if e > 0 {
                    term = Expression::Mul(
                        Box::new(term),
                        Box::new(Expression::Pow(
                            Box::new(Expression::Variable(axis)),
                            e as f64,
                        )),
                    );
                }
            }
            acc = Some(match acc {
                None => term,
                Some(prev) => Expression::Add(Box::new(prev), Box::new(term)),
            });
        }
        acc.unwrap_or(Expression::Number(0.0))
    }

    /// Exact Taylor coefficient of multi-index `alpha` about `p`: shift
    /// each monomial with the binomial theorem.
    fn taylor_coeff(&self, p: [f64; 3], alpha: [usize; 3]) -> f64 {
        let binom = |n: usize, k: usize| -> f64 {
            if k > n {
                return 0.0;
            }
            let mut out = 1.0;
            for i in 0..k {
                out = out * (n - i) as f64 / (i + 1) as f64;
            }
            out
        };
        let mut sum = 0.0;
        for (exps, coeff) in &self.0 {
            let mut term = *coeff;
            for axis in 0..3 {
                if alpha[axis] > exps[axis] {
                    term = 0.0;
                    break;
                }
                term *= binom(exps[axis], alpha[axis])
                    * p[axis].powi((exps[axis] - alpha[axis]) as i32);
            }
            sum += term;
        }
        sum
    }
}

fn poly_strategy() -> impl Strategy<Value = Poly> {
    let exponents = (0usize..=4, 0usize..=4, 0usize..=4)
        .prop_filter("total degree <= 4", |(a, b, c)| a + b + c <= 4)
        .prop_map(|(a, b, c)| [a, b, c]);
    let term = (exponents, -3.0f64..3.0);
    prop::collection::vec(term, 1..6).prop_map(Poly)
}

fn point_strategy() -> impl Strategy<Value = [f64; 3]> {
    [-1.5f64..1.5, -1.5..1.5, -1.5..1.5]
}

proptest! {
    /// Every jet coefficient of a random polynomial matches symbolic
    /// differentiation.
    #[test]
    fn polynomial_jets_match_symbolic(poly in poly_strategy(), p in point_strategy()) {
        let jet = expr::eval_jet(&poly.to_expression(), p).unwrap();
        for a in 0..=4usize {
            for b in 0..=(4 - a) {
                for c in 0..=(4 - a - b) {
                    let got = jet.coeff(a, b, c);
                    let want = poly.taylor_coeff(p, [a, b, c]);
                    prop_assert!(
                        (got - want).abs() <= 1e-12 * (1.0 + want.abs()),
                        "coeff ({a},{b},{c}): {got} vs {want}"
                    );
                }
            }
        }
    }

    /// Ring laws: distributivity coefficientwise, the product rule at
    /// order 1.
    #[test]
    fn jet_ring_laws(
        f in poly_strategy(),
        g in poly_strategy(),
        h in poly_strategy(),
        p in point_strategy(),
    ) {
        let jf = expr::eval_jet(&f.to_expression(), p).unwrap();
        let jg = expr::eval_jet(&g.to_expression(), p).unwrap();
        let jh = expr::eval_jet(&h.to_expression(), p).unwrap();
        let lhs = (jf + jg) * jh;
        let rhs = jf * jh + jg * jh;
        let scale = 1.0 + max_abs_coeff(&lhs);
        for a in 0..=4usize {
            for b in 0..=(4 - a) {
                for c in 0..=(4 - a - b) {
                    prop_assert!((lhs.coeff(a, b, c) - rhs.coeff(a, b, c)).abs() <= 1e-12 * scale);
                }
            }
        }
        let prod = jf * jg;
        for axis in 0..3 {
            let lhs = prod.partial(&[axis]).unwrap();
            let rhs = jf.partial(&[axis]).unwrap() * jg.value()
                + jg.partial(&[axis]).unwrap() * jf.value();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }
    }
}

fn max_abs_coeff(jet: &Jet) -> f64 {
    let mut m = 0.0f64;
    for a in 0..=4usize {
        for b in 0..=(4 - a) {
            for c in 0..=(4 - a - b) {
                m = m.max(jet.coeff(a, b, c).abs());
            }
        }
    }
    m
}

#[test]
fn jet_term_count_is_35() {
    assert_eq!(JET_TERMS, 35);
}
