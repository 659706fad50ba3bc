//! Spatial operator catalog: four explicit orthonormal eigenbases on (0, pi).
//!
//! Each catalog entry is a second-order operator -u'' (possibly shifted by a
//! constant) together with boundary conditions that make its eigenfunctions
//! pure sines or cosines:
//!
//! * `DirichletDirichlet`:      phi_n = sqrt(2/pi) sin(n x),         lambda_n = n^2
//! * `NeumannDirichlet`:        phi_n = sqrt(2/pi) cos((n - 1/2) x), lambda_n = (n - 1/2)^2
//! * `DirichletNeumannShift1`:  phi_n = sqrt(2/pi) sin((n + 1/2) x), lambda_n = (n + 1/2)^2 + 1
//! * `NeumannNeumannShift2`:    phi_n = sqrt(2/pi) cos(n x),         lambda_n = n^2 + 2, n >= 1
//!
//! Modes are indexed from n = 1. The Neumann-Neumann family starts at n = 1
//! as well: the constant mode would need a different normalization
//! (1/sqrt(pi)) and nothing in the catalog's intended problems excites it.
//!
//! `project` and `synthesize` convert between physical profiles and
//! coefficient vectors; with a rule of at least 2*n_max + 8 Gauss nodes the
//! pair is an identity on coefficients to roundoff.

use crate::error::SolverError;
use crate::quadrature::QuadratureRule;

/// Normalization shared by every catalog eigenfunction.
const NORM: f64 = 0.7978845608028654; // sqrt(2/pi)

/// The four cataloged operators, tagged by their boundary conditions at
/// x = 0 and x = pi and the constant shift added to -d^2/dx^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    DirichletDirichlet,
    NeumannDirichlet,
    DirichletNeumannShift1,
    NeumannNeumannShift2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Waveform {
    Sine,
    Cosine,
}

/// One eigenpair: 1-based mode index, eigenvalue, and the eigenfunction
/// (held as frequency + waveform so evaluation is a single trig call).
#[derive(Debug, Clone, Copy)]
pub struct EigenPair {
    pub n: usize,
    pub lambda: f64,
    freq: f64,
    waveform: Waveform,
}

impl EigenPair {
    /// Evaluate phi_n at x.
    pub fn eval(&self, x: f64) -> f64 {
        let arg = self.freq * x;
        NORM * match self.waveform {
            Waveform::Sine => arg.sin(),
            Waveform::Cosine => arg.cos(),
        }
    }
}

/// An operator from the catalog, truncated to its first `n_max` modes.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    pub kind: BasisKind,
    pub n_max: usize,
    pub pairs: Vec<EigenPair>,
}

impl EigenBasis {
    /// Largest eigenvalue in the truncation.
    pub fn lambda_max(&self) -> f64 {
        self.pairs.last().map_or(0.0, |p| p.lambda)
    }

    /// Evaluate sum_n coeffs[n] phi_n(x) for one point.
    pub fn eval_series(&self, coeffs: &[f64], x: f64) -> f64 {
        assert!(
            coeffs.len() <= self.n_max,
            "coefficient vector longer than basis truncation"
        );
        coeffs
            .iter()
            .zip(&self.pairs)
            .map(|(&c, pair)| c * pair.eval(x))
            .sum()
    }
}

/// Build the first `n_max` eigenpairs of the chosen catalog operator.
pub fn make_basis(kind: BasisKind, n_max: usize) -> Result<EigenBasis, SolverError> {
    if n_max == 0 {
        return Err(SolverError::InvalidParameter(
            "basis needs at least one mode".into(),
        ));
    }
    let pairs = (1..=n_max)
        .map(|n| {
            let nf = n as f64;
            let (lambda, freq, waveform) = match kind {
                BasisKind::DirichletDirichlet => (nf * nf, nf, Waveform::Sine),
                BasisKind::NeumannDirichlet => {
                    let half = nf - 0.5;
                    (half * half, half, Waveform::Cosine)
                }
                BasisKind::DirichletNeumannShift1 => {
                    let half = nf + 0.5;
                    (half * half + 1.0, half, Waveform::Sine)
                }
                BasisKind::NeumannNeumannShift2 => (nf * nf + 2.0, nf, Waveform::Cosine),
            };
            EigenPair {
                n,
                lambda,
                freq,
                waveform,
            }
        })
        .collect();
    Ok(EigenBasis { kind, n_max, pairs })
}

/// Coefficients of `f` against the basis: component n is the quadrature
/// approximation of the inner product of f with phi_n over (0, pi).
pub fn project(f: impl Fn(f64) -> f64, basis: &EigenBasis, rule: &QuadratureRule) -> Vec<f64> {
    // Sample f once per node, then take weighted dot products per mode.
    let samples: Vec<f64> = rule.nodes.iter().map(|&x| f(x)).collect();
    basis
        .pairs
        .iter()
        .map(|pair| {
            let mut acc = 0.0;
            for ((&x, &w), &fx) in rule.nodes.iter().zip(&rule.weights).zip(&samples) {
                acc += w * fx * pair.eval(x);
            }
            acc
        })
        .collect()
}

/// Evaluate the series sum_n coeffs[n] phi_n at each requested node.
pub fn synthesize(coeffs: &[f64], basis: &EigenBasis, xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|&x| basis.eval_series(coeffs, x)).collect()
}
