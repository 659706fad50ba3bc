//! Lattice of spectral coefficients: the discrete solution u_n^{k,m}.
//!
//! A `SpectralField` stores one real coefficient per mode n and lattice point
//! (k, m), 0 <= k, m <= M. The k = 0 and m = 0 slices carry the projected
//! initial data (u(0,s) and u(t,0) respectively); interior points are filled
//! by the solvers. The squared Hilbert norm of u^{k,m} is the coefficient
//! sum of squares over modes (Parseval), which is what the stability and
//! contraction checks measure.

use crate::basis::EigenBasis;
use crate::grid::TimeGrid;
use ndarray::{Array3, ArrayView3, ArrayViewMut2, Axis};

#[derive(Debug, Clone)]
pub struct SpectralField {
    pub grid: TimeGrid,
    pub n_max: usize,
    /// Layout (mode, k, m); mode index is 0-based (mode i holds the
    /// coefficient of the basis pair with n = i + 1).
    coeff: Array3<f64>,
}

impl SpectralField {
    pub fn zeros(grid: TimeGrid, n_max: usize) -> Self {
        let extent = grid.steps + 1;
        SpectralField {
            grid,
            n_max,
            coeff: Array3::zeros((n_max, extent, extent)),
        }
    }

    pub fn coeff(&self, mode: usize, k: usize, m: usize) -> f64 {
        self.coeff[(mode, k, m)]
    }

    pub fn coeffs(&self) -> ArrayView3<'_, f64> {
        self.coeff.view()
    }

    /// Mutable (k, m)-planes, one per mode, for solver fills.
    pub(crate) fn mode_planes_mut(
        &mut self,
    ) -> ndarray::iter::AxisIterMut<'_, f64, ndarray::Ix2> {
        self.coeff.axis_iter_mut(Axis(0))
    }

    pub(crate) fn plane_mut(&mut self, mode: usize) -> ArrayViewMut2<'_, f64> {
        self.coeff.index_axis_mut(Axis(0), mode)
    }

    /// Squared Hilbert norm of u^{k,m}: sum over modes of the squared
    /// coefficient.
    pub fn mode_norm_sq(&self, k: usize, m: usize) -> f64 {
        (0..self.n_max).map(|i| self.coeff[(i, k, m)].powi(2)).sum()
    }

    /// sup over interior lattice points 1 <= k, m <= M of the squared norm.
    pub fn sup_mode_norm_sq(&self) -> f64 {
        let m_steps = self.grid.steps;
        let mut sup = 0.0_f64;
        for k in 1..=m_steps {
            for m in 1..=m_steps {
                sup = sup.max(self.mode_norm_sq(k, m));
            }
        }
        sup
    }

    /// sup over every lattice point of the Hilbert-norm distance to `other`.
    pub fn sup_increment(&self, other: &SpectralField) -> f64 {
        assert_eq!(self.coeff.dim(), other.coeff.dim(), "field shapes differ");
        let extent = self.grid.steps + 1;
        let mut sup = 0.0_f64;
        for k in 0..extent {
            for m in 0..extent {
                let mut dist_sq = 0.0;
                for i in 0..self.n_max {
                    let d = self.coeff[(i, k, m)] - other.coeff[(i, k, m)];
                    dist_sq += d * d;
                }
                sup = sup.max(dist_sq);
            }
        }
        sup.sqrt()
    }

    /// Physical samples u(x_j, t_k, s_m) on the reporting grid: x_j = j pi/L
    /// for j = 0..L, k and m from 1 to M. Output layout (j, k-1, m-1).
    pub fn sample_on_grid(&self, basis: &EigenBasis, l_intervals: usize) -> Array3<f64> {
        assert!(
            basis.n_max >= self.n_max,
            "basis truncation shorter than field"
        );
        let m_steps = self.grid.steps;
        // phi[i][j] = phi_{i+1}(x_j), tabulated once.
        let phi: Vec<Vec<f64>> = basis.pairs[..self.n_max]
            .iter()
            .map(|pair| {
                (0..=l_intervals)
                    .map(|j| pair.eval(std::f64::consts::PI * j as f64 / l_intervals as f64))
                    .collect()
            })
            .collect();
        let mut out = Array3::zeros((l_intervals + 1, m_steps, m_steps));
        for k in 1..=m_steps {
            for m in 1..=m_steps {
                for j in 0..=l_intervals {
                    let mut acc = 0.0;
                    for i in 0..self.n_max {
                        acc += self.coeff[(i, k, m)] * phi[i][j];
                    }
                    out[(j, k - 1, m - 1)] = acc;
                }
            }
        }
        out
    }
}
