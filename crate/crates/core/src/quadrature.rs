//! Gauss-Legendre quadrature on [0, pi].
//!
//! Every spatial inner product in the solver goes through one of these rules:
//! a small rule (6 points by default) for the state-dependent source
//! coefficients, and a larger "data" rule for projecting boundary data and
//! known forcing, where accuracy is cheap. Nodes and weights are computed by
//! Newton iteration on the Legendre recurrence, so any point count is
//! available for reference rules.

use crate::error::SolverError;

/// Nodes and weights of a Gauss-Legendre rule mapped affinely to [0, pi].
///
/// Nodes are strictly increasing and symmetric about pi/2; mirrored nodes
/// carry bitwise-equal weights because each symmetric pair is constructed
/// from a single root of the Legendre polynomial.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Legendre polynomial value and derivative at `x` by the three-term
/// recurrence: (j+1) P_{j+1} = (2j+1) x P_j - j P_{j-1}.
fn legendre_with_derivative(degree: usize, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    let mut cur = x;
    for j in 1..degree {
        let next = ((2 * j + 1) as f64 * x * cur - j as f64 * prev) / (j + 1) as f64;
        prev = cur;
        cur = next;
    }
    // P'_n(x) = n (x P_n - P_{n-1}) / (x^2 - 1); the roots never reach +-1.
    let deriv = degree as f64 * (x * cur - prev) / (x * x - 1.0);
    (cur, deriv)
}

/// Build the Gauss-Legendre rule with `point_count` nodes on [0, pi].
///
/// Roots are found to ~1e-15 with Newton's method started from the Chebyshev
/// approximation cos(pi (i + 3/4) / (n + 1/2)). Only the positive half is
/// solved; the negative half is its mirror, which keeps the mapped rule
/// exactly symmetric about pi/2.
pub fn gauss_legendre_rule(point_count: usize) -> Result<QuadratureRule, SolverError> {
    if point_count == 0 {
        return Err(SolverError::InvalidParameter(
            "quadrature rule needs at least one point".into(),
        ));
    }
    let n = point_count;
    let half = std::f64::consts::FRAC_PI_2;

    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];

    // Root i (descending in x) of P_n, for the upper half of the rule.
    for i in 0..n / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut weight = 0.0;
        for _ in 0..100 {
            let (value, deriv) = legendre_with_derivative(n, x);
            let step = value / deriv;
            x -= step;
            if step.abs() <= 1e-15 {
                let (_, deriv) = legendre_with_derivative(n, x);
                weight = 2.0 / ((1.0 - x * x) * deriv * deriv);
                break;
            }
            weight = 2.0 / ((1.0 - x * x) * deriv * deriv);
        }
        // Map the +-x pair to pi/2 +- offset with one shared offset so the
        // pair stays symmetric in floating point.
        let offset = half * x;
        let w = half * weight;
        nodes[n - 1 - i] = half + offset;
        nodes[i] = half - offset;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        // Odd rules have the central root at exactly x = 0.
        let (_, deriv) = legendre_with_derivative(n, 0.0);
        nodes[n / 2] = half;
        weights[n / 2] = half * 2.0 / (deriv * deriv);
    }

    Ok(QuadratureRule { nodes, weights })
}

/// Apply the rule: returns sum_j w_j f(x_j), accumulated in node order.
pub fn integrate(f: impl Fn(f64) -> f64, rule: &QuadratureRule) -> f64 {
    let mut acc = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        acc += w * f(x);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_empty_rule() {
        assert!(gauss_legendre_rule(0).is_err());
    }

    #[test]
    fn weights_sum_to_pi() {
        for n in [1, 2, 6, 7, 64] {
            let rule = gauss_legendre_rule(n).unwrap();
            let total: f64 = rule.weights.iter().sum();
            assert_abs_diff_eq!(total, std::f64::consts::PI, epsilon = 1e-12);
        }
    }

    #[test]
    fn six_points_exact_for_linear_integrand() {
        let rule = gauss_legendre_rule(6).unwrap();
        let value = integrate(|x| x, &rule);
        assert_abs_diff_eq!(
            value,
            std::f64::consts::PI.powi(2) / 2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn six_points_integrate_sine_to_two() {
        // Analytic value of the integral of sin over (0, pi); the 6-point
        // rule is already accurate to ~5e-10 here, well under the tolerance.
        let rule = gauss_legendre_rule(6).unwrap();
        let value = integrate(f64::sin, &rule);
        assert_abs_diff_eq!(value, 2.0, epsilon = 1e-6);
        let reference = integrate(f64::sin, &gauss_legendre_rule(64).unwrap());
        assert_abs_diff_eq!(value, reference, epsilon = 1e-6);
    }

    #[test]
    fn polynomial_exactness_up_to_degree_2n_minus_1() {
        // A rule with n nodes must integrate monomials of degree <= 2n - 1
        // exactly (mapped from [-1, 1]); check against the closed form
        // pi^(d+1) / (d+1) on [0, pi].
        for n in [2, 4, 6, 9] {
            let rule = gauss_legendre_rule(n).unwrap();
            for d in 0..2 * n {
                let value = integrate(|x| x.powi(d as i32), &rule);
                let exact = std::f64::consts::PI.powi(d as i32 + 1) / (d as f64 + 1.0);
                assert!(
                    (value - exact).abs() <= 1e-10 * exact.max(1.0),
                    "degree {d} with {n} nodes: {value} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn nodes_symmetric_about_midpoint() {
        for n in [2, 5, 6, 17, 64] {
            let rule = gauss_legendre_rule(n).unwrap();
            for i in 0..n {
                let j = n - 1 - i;
                assert!(
                    (rule.nodes[i] + rule.nodes[j] - std::f64::consts::PI).abs() <= 1e-13,
                    "node pair ({i}, {j}) asymmetric for n = {n}"
                );
                assert_eq!(rule.weights[i].to_bits(), rule.weights[j].to_bits());
            }
            for i in 1..n {
                assert!(rule.nodes[i] > rule.nodes[i - 1]);
            }
        }
    }

    #[test]
    fn zero_and_constant_integrands() {
        let rule = gauss_legendre_rule(6).unwrap();
        assert_eq!(integrate(|_| 0.0, &rule), 0.0);
        assert_abs_diff_eq!(
            integrate(|_| 1.0, &rule),
            std::f64::consts::PI,
            epsilon = 1e-12
        );
    }

    #[test]
    fn oscillatory_product_matches_dense_reference() {
        // Profile-under-sine integrand of the kind the nonlinear source
        // coefficients produce. Twelve points resolve it far below the
        // tolerance; the dense rule stands in for the analytic value.
        let f = |x: f64| ((-x).exp()).sin() * (3.5 * x).sin();
        let value = integrate(f, &gauss_legendre_rule(12).unwrap());
        let reference = integrate(f, &gauss_legendre_rule(256).unwrap());
        assert_abs_diff_eq!(value, reference, epsilon = 1e-4);
    }
}
