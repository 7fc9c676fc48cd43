//! Nematic interaction rates: the clamp, localized and ball-averaged
//! alignment rates for kinetic fields, and the director form used by the
//! agent model.
//!
//! The alignment kernel is sin(2(theta_1 - theta)), so every rate built
//! here is invariant under a half-turn of either argument and carries
//! orientation Fourier content only at the +-2 harmonics.

use crate::grid::{integrate_theta, GridSpec, KineticField, ScalarField};
use crate::spectral::{self, ThetaTables};
use ndarray::Array2;
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum InteractionError {
    #[error("alignment bound must be positive, got {0}")]
    BadBound(f64),
    #[error("interaction radius {0} must lie in [0, 1/2) on the unit torus")]
    BadRadius(f64),
}

/// Symmetric clamp to [-a, a].
///
/// Panics if the bound is not positive; validated call sites should go
/// through [`AlignmentSpec::new`].
pub fn clamp(r: f64, a: f64) -> f64 {
    assert!(a > 0.0, "clamp bound must be positive, got {a}");
    r.max(-a).min(a)
}

/// Which alignment torque the agent model applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignmentForm {
    /// Clamp the summed pair kernel, then scale: gamma * clamp(sum, a).
    ClampedSum,
    /// Relax toward the local nematic director at a clamped rate.
    ClampedCurrent,
}

/// Alignment configuration shared by the kinetic and agent models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentSpec {
    pub form: AlignmentForm,
    /// Clamp bound a.
    pub bound: f64,
    /// Interaction radius for the ball-averaged rate; 0 selects the
    /// localized rate.
    pub radius: f64,
}

impl AlignmentSpec {
    pub fn new(form: AlignmentForm, bound: f64, radius: f64) -> Result<Self, InteractionError> {
        if !(bound > 0.0) {
            return Err(InteractionError::BadBound(bound));
        }
        if !(0.0..0.5).contains(&radius) {
            return Err(InteractionError::BadRadius(radius));
        }
        Ok(AlignmentSpec { form, bound, radius })
    }
}

impl Default for AlignmentSpec {
    fn default() -> Self {
        AlignmentSpec {
            form: AlignmentForm::ClampedSum,
            bound: 1.0,
            radius: 0.0,
        }
    }
}

/// Bounded response applied to the alignment rate inside the kinetic flux.
/// The default is the symmetric clamp; any other bounded Lipschitz response
/// can be plugged in (the custom closure owns its own bound).
#[derive(Clone, Default)]
pub enum Psi {
    #[default]
    Clamp,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Psi {
    pub fn apply(&self, v: f64, bound: f64) -> f64 {
        match self {
            Psi::Clamp => clamp(v, bound),
            Psi::Custom(f) => f(v),
        }
    }
}

impl fmt::Debug for Psi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psi::Clamp => write!(f, "Psi::Clamp"),
            Psi::Custom(_) => write!(f, "Psi::Custom(..)"),
        }
    }
}

/// First and second nematic moments S(x) = int f sin 2theta dtheta and
/// C(x) = int f cos 2theta dtheta.
pub(crate) fn nematic_moments(f: &KineticField) -> (ScalarField, ScalarField) {
    let tables = ThetaTables::new(f.grid().ntheta());
    let s = integrate_theta(f, &tables.sin_2t).expect("table length matches grid");
    let c = integrate_theta(f, &tables.cos_2t).expect("table length matches grid");
    (s, c)
}

fn synthesize_rate(
    grid: GridSpec,
    time: f64,
    s: &Array2<f64>,
    c: &Array2<f64>,
) -> KineticField {
    let tables = ThetaTables::new(grid.ntheta());
    let mut out = KineticField::zeros(grid, time);
    for ((i, j, k), dst) in out.values.indexed_iter_mut() {
        *dst = s[[i, j]] * tables.cos_2t[k] - c[[i, j]] * tables.sin_2t[k];
    }
    out
}

/// Localized alignment rate
/// v_f(x, theta) = int f(x, theta_1) sin(2(theta_1 - theta)) dtheta_1
///               = S(x) cos 2theta - C(x) sin 2theta.
pub fn local_rate(f: &KineticField) -> KineticField {
    let (s, c) = nematic_moments(f);
    synthesize_rate(f.grid(), f.time, &s.values, &c.values)
}

/// Indicator of the radius-eps disk sampled on the periodic grid and
/// normalized by its node count, so convolution with it is an exact
/// average over the sampled disk and preserves constants exactly.
pub(crate) fn disk_kernel(grid: GridSpec, eps: f64) -> Array2<f64> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut kernel = Array2::zeros((nx, ny));
    let mut count = 0usize;
    for ((i, j), v) in kernel.indexed_iter_mut() {
        let mut y1 = i as f64 / nx as f64;
        if y1 > 0.5 {
            y1 -= 1.0;
        }
        let mut y2 = j as f64 / ny as f64;
        if y2 > 0.5 {
            y2 -= 1.0;
        }
        if y1 * y1 + y2 * y2 < eps * eps {
            *v = 1.0;
            count += 1;
        }
    }
    kernel.mapv_inplace(|v| v / count as f64);
    kernel
}

/// Periodic convolution with a kernel whose DFT is passed in.
fn convolve(field: &Array2<f64>, kernel_hat: &Array2<Complex64>) -> Array2<f64> {
    let mut c = spectral::to_complex2(field);
    spectral::fft2_scalar(&mut c, false);
    for (v, k) in c.iter_mut().zip(kernel_hat.iter()) {
        *v *= k;
    }
    spectral::fft2_scalar(&mut c, true);
    c.mapv(|v| v.re)
}

pub(crate) fn kernel_hat(kernel: &Array2<f64>) -> Array2<Complex64> {
    let mut c = spectral::to_complex2(kernel);
    spectral::fft2_scalar(&mut c, false);
    c
}

/// Ball-averaged alignment rate: the localized rate averaged over the
/// radius-eps disk around each point (grid-sampled disk, see
/// [`disk_kernel`]). Requires 0 < eps < 1/2 so the disk fits the torus.
pub fn nonlocal_rate(f: &KineticField, eps: f64) -> Result<KineticField, InteractionError> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(InteractionError::BadRadius(eps));
    }
    let grid = f.grid();
    let khat = kernel_hat(&disk_kernel(grid, eps));
    let (s, c) = nematic_moments(f);
    let s_avg = convolve(&s.values, &khat);
    let c_avg = convolve(&c.values, &khat);
    Ok(synthesize_rate(grid, f.time, &s_avg, &c_avg))
}

/// Nematic current J = sum_j exp(2 i theta_j) and the director it defines.
#[derive(Debug, Clone, Copy)]
pub struct NematicCurrent {
    pub j: Complex64,
    /// Half the argument of J, in (-pi/2, pi/2]. `None` when the current
    /// vanishes (within round-off of the summation), in which case no
    /// direction is defined and the relaxation rate is zero.
    pub director: Option<f64>,
}

/// Relative tolerance under which a nematic current counts as zero.
const CURRENT_ZERO_TOL: f64 = 1e-12;

pub fn nematic_current(angles: &[f64]) -> NematicCurrent {
    let mut j = Complex64::new(0.0, 0.0);
    for &theta in angles {
        j += Complex64::new((2.0 * theta).cos(), (2.0 * theta).sin());
    }
    NematicCurrent::from_sum(j, angles.len())
}

impl NematicCurrent {
    /// Builds the current from an already-accumulated sum of exp(2 i theta)
    /// over `count` contributors.
    pub fn from_sum(j: Complex64, count: usize) -> Self {
        let scale = count.max(1) as f64;
        let director = if j.norm() <= CURRENT_ZERO_TOL * scale {
            None
        } else {
            let mut d = 0.5 * j.arg();
            // arg returns -pi at the branch cut; fold the open end.
            if d <= -std::f64::consts::FRAC_PI_2 {
                d += std::f64::consts::PI;
            }
            Some(d)
        };
        NematicCurrent { j, director }
    }
}

/// Director-form relaxation rate gamma * clamp(|J|, a) * sin(2(director - theta)).
/// Zero when the director is undefined.
pub fn director_form_rate(current: &NematicCurrent, theta: f64, bound: f64, gamma: f64) -> f64 {
    match current.director {
        None => 0.0,
        Some(d) => gamma * clamp(current.j.norm(), bound) * (2.0 * (d - theta)).sin(),
    }
}
