//! Periodic phase-space grid and the three primitive field operations:
//! orientation-moment quadrature, the half-turn orientation shift, and
//! spectral differentiation.
//!
//! The spatial domain is the unit torus (0,1)^2 and the orientation domain
//! is the angle torus (-pi, pi]. Nodes are uniform with x1_i = i/nx,
//! x2_i = i/ny, theta_j = -pi + 2*pi*j/ntheta, and fields store nodal
//! values in an (ix, iy, itheta) array, itheta fastest.

use crate::spectral;
use ndarray::{Array2, Array3};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid dimension {name} = {value} must be an even integer >= 4")]
    BadDimension { name: &'static str, value: usize },
    #[error("theta weight table has {got} entries, grid has {want} orientation nodes")]
    WeightLength { got: usize, want: usize },
    #[error("fields live on different grids: {0:?} vs {1:?}")]
    GridMismatch(GridSpec, GridSpec),
}

/// Grid dimensions. All three must be even (the half-turn shift is an exact
/// index roll only when ntheta is even; spatial evenness keeps Nyquist
/// handling uniform) and at least 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    nx: usize,
    ny: usize,
    ntheta: usize,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, ntheta: usize) -> Result<Self, GridError> {
        for (name, value) in [("nx", nx), ("ny", ny), ("ntheta", ntheta)] {
            if value < 4 || value % 2 != 0 {
                return Err(GridError::BadDimension { name, value });
            }
        }
        Ok(GridSpec { nx, ny, ntheta })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn ntheta(&self) -> usize {
        self.ntheta
    }

    pub fn dx1(&self) -> f64 {
        1.0 / self.nx as f64
    }

    pub fn dx2(&self) -> f64 {
        1.0 / self.ny as f64
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.ntheta as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx1() * self.dx2() * self.dtheta()
    }

    pub fn x1(&self, i: usize) -> f64 {
        i as f64 / self.nx as f64
    }

    pub fn x2(&self, i: usize) -> f64 {
        i as f64 / self.ny as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        spectral::theta_node(j, self.ntheta)
    }

    pub fn theta_nodes(&self) -> Vec<f64> {
        (0..self.ntheta).map(|j| self.theta(j)).collect()
    }

    /// Samples a test function on the orientation nodes, for use as a
    /// quadrature weight in [`integrate_theta`].
    pub fn sample_theta(&self, phi: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.ntheta).map(|j| phi(self.theta(j))).collect()
    }
}

/// Nodal values of a phase-space density f(x, theta) at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticField {
    grid: GridSpec,
    pub values: Array3<f64>,
    pub time: f64,
}

impl KineticField {
    pub fn zeros(grid: GridSpec, time: f64) -> Self {
        KineticField {
            grid,
            values: Array3::zeros((grid.nx, grid.ny, grid.ntheta)),
            time,
        }
    }

    pub fn from_fn(grid: GridSpec, time: f64, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let mut field = KineticField::zeros(grid, time);
        for ((i, j, k), v) in field.values.indexed_iter_mut() {
            *v = f(grid.x1(i), grid.x2(j), grid.theta(k));
        }
        field
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs_diff(&self, other: &KineticField) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// L2(x, theta) distance, cell-volume weighted.
    pub fn l2_distance(&self, other: &KineticField) -> f64 {
        let sum: f64 = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        (sum * self.grid.cell_volume()).sqrt()
    }
}

/// Nodal values of a spatial field (density, chemoattractant) at one instant.
/// Only the x-part of the grid is meaningful here; the orientation size is
/// carried along so scalar and kinetic fields compare grids directly.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    pub values: Array2<f64>,
    pub time: f64,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec, time: f64) -> Self {
        ScalarField {
            grid,
            values: Array2::zeros((grid.nx, grid.ny)),
            time,
        }
    }

    pub fn from_fn(grid: GridSpec, time: f64, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut field = ScalarField::zeros(grid, time);
        for ((i, j), v) in field.values.indexed_iter_mut() {
            *v = f(grid.x1(i), grid.x2(j));
        }
        field
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn cell_area(&self) -> f64 {
        self.grid.dx1() * self.grid.dx2()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Orientation moment: rho(x) = sum_j f(x, theta_j) phi_j dtheta.
/// Rectangle quadrature on the periodic node set, spectrally accurate for
/// smooth integrands and exactly linear in both arguments.
pub fn integrate_theta(f: &KineticField, phi: &[f64]) -> Result<ScalarField, GridError> {
    let grid = f.grid;
    if phi.len() != grid.ntheta {
        return Err(GridError::WeightLength {
            got: phi.len(),
            want: grid.ntheta,
        });
    }
    let dtheta = grid.dtheta();
    let mut out = ScalarField::zeros(grid, f.time);
    for ((i, j), dst) in out.values.indexed_iter_mut() {
        let mut acc = 0.0;
        for (k, w) in phi.iter().enumerate() {
            acc += f.values[[i, j, k]] * w;
        }
        *dst = acc * dtheta;
    }
    Ok(out)
}

/// Spatial density n(x) = integral of f over orientations.
pub fn density(f: &KineticField) -> ScalarField {
    let ones = vec![1.0; f.grid.ntheta];
    integrate_theta(f, &ones).expect("weight table built to match the grid")
}

/// Half-turn orientation shift (tau f)(x, theta) = f(x, theta + pi).
/// A pure index roll by ntheta/2: an exact involution, bitwise.
pub fn shift_pi(f: &KineticField) -> KineticField {
    let grid = f.grid;
    let half = grid.ntheta / 2;
    let mut out = KineticField::zeros(grid, f.time);
    for ((i, j, k), dst) in out.values.indexed_iter_mut() {
        *dst = f.values[[i, j, (k + half) % grid.ntheta]];
    }
    out
}

/// Axis selector for kinetic-field differentiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldAxis {
    X1,
    X2,
    Theta,
}

/// Axis selector for scalar-field differentiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpatialAxis {
    X1,
    X2,
}

/// Spectral derivative of given order along one axis. The Nyquist mode is
/// zeroed for odd orders (its sign is not representable on the real grid).
pub fn spectral_derivative(f: &KineticField, axis: FieldAxis, order: u32) -> KineticField {
    let grid = f.grid;
    let (ax, n): (usize, usize) = match axis {
        FieldAxis::X1 => (0, grid.nx),
        FieldAxis::X2 => (1, grid.ny),
        FieldAxis::Theta => (2, grid.ntheta),
    };
    let factors = derivative_factors(n, order, matches!(axis, FieldAxis::Theta));
    let mut c = spectral::to_complex3(&f.values);
    spectral::fft_axis(&mut c, ax, false);
    for (idx, v) in c.indexed_iter_mut() {
        let i = [idx.0, idx.1, idx.2][ax];
        *v *= factors[i];
    }
    spectral::fft_axis(&mut c, ax, true);
    KineticField {
        grid,
        values: spectral::real_part3(&c),
        time: f.time,
    }
}

/// Spectral derivative of a scalar field along a spatial axis.
pub fn scalar_derivative(s: &ScalarField, axis: SpatialAxis, order: u32) -> ScalarField {
    let grid = s.grid;
    let (ax, n) = match axis {
        SpatialAxis::X1 => (0usize, grid.nx),
        SpatialAxis::X2 => (1usize, grid.ny),
    };
    let factors = derivative_factors(n, order, false);
    let mut c = ndarray::Array3::zeros((grid.nx, grid.ny, 1));
    c.index_axis_mut(ndarray::Axis(2), 0)
        .assign(&spectral::to_complex2(&s.values));
    spectral::fft_axis(&mut c, ax, false);
    for (idx, v) in c.indexed_iter_mut() {
        let i = [idx.0, idx.1][ax];
        *v *= factors[i];
    }
    spectral::fft_axis(&mut c, ax, true);
    let mut out = ScalarField::zeros(grid, s.time);
    for ((i, j), dst) in out.values.indexed_iter_mut() {
        *dst = c[[i, j, 0]].re;
    }
    out
}

fn derivative_factors(n: usize, order: u32, theta_axis: bool) -> Vec<Complex64> {
    (0..n)
        .map(|i| {
            if order % 2 == 1 && i == n / 2 {
                return Complex64::new(0.0, 0.0);
            }
            let k = if theta_axis {
                spectral::wavenumber_theta(i, n)
            } else {
                spectral::wavenumber_x(i, n)
            };
            Complex64::new(0.0, k).powu(order)
        })
        .collect()
}
