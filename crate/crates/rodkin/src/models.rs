//! Spectral time steppers for the kinetic models and the chemoattractant
//! update, plus the observer-driven run loop.
//!
//! Every stepper is a Strang composition whose linear pieces are integrated
//! exactly in Fourier space:
//!
//! * transport: per-orientation phase shift exp(-i k.e(theta) dt / eps),
//! * orientation diffusion and reversals: per-mode decay
//!   exp(-(m^2 + (1 - (-1)^m) / eps^2) dt),
//! * uni-directional spatial diffusion: per-orientation decay
//!   exp(-((k.e(theta))^2 + eps_reg |k|^2) dt),
//! * chemoattractant relaxation: exact exponential integrator with the
//!   density frozen over the step.
//!
//! The nonlinear alignment flux d/dtheta (f psi(V)) sits inside the local
//! substep as an explicit midpoint update in conservative spectral form,
//! sandwiched between exact half-steps of the stiff orientation decay, so
//! the whole composition stays second order in dt and conserves mass to
//! round-off (the flux derivative has no mean mode). The chemotaxis flux
//! div(2 (e.grad s) e f) is handled the same way in the local substep.

use crate::grid::{self, GridSpec, KineticField, ScalarField};
use crate::interaction::{self, AlignmentSpec, InteractionError, Psi};
use crate::spectral::{self, AxisFft, ThetaTables};
use ndarray::Array3;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("time step must be positive and finite, got {0}")]
    BadTimeStep(f64),
    #[error("eps_scale = {got} is invalid for {model:?}: must be {want}")]
    BadScale {
        model: ModelKind,
        got: f64,
        want: &'static str,
    },
    #[error("eps_reg = {got} is invalid for {model:?}: must be {want}")]
    BadRegularization {
        model: ModelKind,
        got: f64,
        want: &'static str,
    },
    #[error("alignment parameters invalid: {0}")]
    Alignment(#[from] InteractionError),
    #[error("model III requires a chemoattractant field in the state")]
    MissingChemoField,
    #[error("state grid {0:?} does not match stepper grid {1:?}")]
    GridMismatch(GridSpec, GridSpec),
    #[error("chemoattractant grid {0:?} does not match density grid {1:?}")]
    ChemoGridMismatch(GridSpec, GridSpec),
    #[error("horizon {t_end} is not an integer number of steps of dt = {dt} from t0 = {t0}")]
    BadHorizon { t0: f64, t_end: f64, dt: f64 },
    #[error("observer cadence {cadence} is not a positive integer multiple of dt = {dt}")]
    BadCadence { cadence: f64, dt: f64 },
    #[error("solution lost finiteness in the explicit flux update at t = {time}")]
    NonFinite { time: f64 },
}

/// Which evolution equation the stepper advances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Transport + alignment + orientation diffusion + reversals.
    ModelI,
    /// Model I with transport at 1/eps and reversals at 1/eps^2.
    ModelIScaled,
    /// Uni-directional spatial diffusion + alignment + orientation
    /// diffusion; no reversals.
    ModelII,
    /// Model II plus isotropic spatial diffusion eps_reg * Laplacian.
    ModelIIRegularized,
    /// Model II plus the chemotaxis drift toward higher chemoattractant.
    ModelIII,
}

impl ModelKind {
    fn has_transport(self) -> bool {
        matches!(self, ModelKind::ModelI | ModelKind::ModelIScaled)
    }

    fn has_reversal(self) -> bool {
        matches!(self, ModelKind::ModelI | ModelKind::ModelIScaled)
    }

    fn has_x_diffusion(self) -> bool {
        matches!(
            self,
            ModelKind::ModelII | ModelKind::ModelIIRegularized | ModelKind::ModelIII
        )
    }
}

/// Verification toggles. All terms default to on; a toggle only matters for
/// models that contain the corresponding term (transport and reversals exist
/// in the Model I family, uni-directional diffusion in the Model II family,
/// chemotaxis in Model III).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Terms {
    pub transport: bool,
    pub alignment: bool,
    pub theta_diffusion: bool,
    pub reversal: bool,
    pub x_diffusion: bool,
    pub chemotaxis: bool,
}

impl Default for Terms {
    fn default() -> Self {
        Terms {
            transport: true,
            alignment: true,
            theta_diffusion: true,
            reversal: true,
            x_diffusion: true,
            chemotaxis: true,
        }
    }
}

impl Terms {
    pub fn none() -> Self {
        Terms {
            transport: false,
            alignment: false,
            theta_diffusion: false,
            reversal: false,
            x_diffusion: false,
            chemotaxis: false,
        }
    }
}

/// Whether the chemoattractant evolves with the density or stays given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChemoCoupling {
    #[default]
    GivenS,
    Coupled,
}

#[derive(Debug, Clone)]
pub struct ModelParams {
    pub model: ModelKind,
    pub dt: f64,
    pub alignment: AlignmentSpec,
    pub psi: Psi,
    /// Scaling parameter of the scaled Model I; must be 1 elsewhere.
    pub eps_scale: f64,
    /// Regularization strength; positive only for Model II-regularized,
    /// optional for Model III.
    pub eps_reg: f64,
    /// Coefficient on the uni-directional diffusion operator (e·∇)². The
    /// stand-alone Models II/III use 1; the fast-reversal asymptotics of the
    /// scaled Model I produce 1/2, which the diffusion-limit study sets here
    /// for its reference run.
    pub xdiff_coef: f64,
    pub chemo: ChemoCoupling,
    pub terms: Terms,
}

impl ModelParams {
    pub fn new(model: ModelKind, dt: f64) -> Self {
        ModelParams {
            model,
            dt,
            alignment: AlignmentSpec::default(),
            psi: Psi::Clamp,
            eps_scale: 1.0,
            eps_reg: if model == ModelKind::ModelIIRegularized {
                0.01
            } else {
                0.0
            },
            xdiff_coef: 1.0,
            chemo: ChemoCoupling::default(),
            terms: Terms::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(ModelError::BadTimeStep(self.dt));
        }
        AlignmentSpec::new(self.alignment.form, self.alignment.bound, self.alignment.radius)?;
        match self.model {
            ModelKind::ModelIScaled => {
                if !(self.eps_scale > 0.0 && self.eps_scale <= 1.0) {
                    return Err(ModelError::BadScale {
                        model: self.model,
                        got: self.eps_scale,
                        want: "in (0, 1]",
                    });
                }
            }
            _ => {
                if self.eps_scale != 1.0 {
                    return Err(ModelError::BadScale {
                        model: self.model,
                        got: self.eps_scale,
                        want: "exactly 1",
                    });
                }
            }
        }
        match self.model {
            ModelKind::ModelIIRegularized => {
                if !(self.eps_reg > 0.0) {
                    return Err(ModelError::BadRegularization {
                        model: self.model,
                        got: self.eps_reg,
                        want: "positive",
                    });
                }
            }
            ModelKind::ModelIII => {
                if self.eps_reg < 0.0 {
                    return Err(ModelError::BadRegularization {
                        model: self.model,
                        got: self.eps_reg,
                        want: "nonnegative",
                    });
                }
            }
            _ => {
                if self.eps_reg != 0.0 {
                    return Err(ModelError::BadRegularization {
                        model: self.model,
                        got: self.eps_reg,
                        want: "exactly 0",
                    });
                }
            }
        }
        if !(self.xdiff_coef > 0.0 && self.xdiff_coef.is_finite()) {
            return Err(ModelError::BadRegularization {
                model: self.model,
                got: self.xdiff_coef,
                want: "a positive uni-directional coefficient",
            });
        }
        Ok(())
    }
}

/// Full simulation state: density, optional chemoattractant, and time.
#[derive(Debug, Clone)]
pub struct SimState {
    pub f: KineticField,
    pub s: Option<ScalarField>,
    pub t: f64,
}

impl SimState {
    pub fn new(f: KineticField) -> Self {
        let t = f.time;
        SimState { f, s: None, t }
    }

    pub fn with_chemo(f: KineticField, s: ScalarField) -> Self {
        let t = f.time;
        SimState { f, s: Some(s), t }
    }
}

/// Precomputed multipliers and FFT plans for one (grid, params) pair.
pub struct Stepper {
    params: ModelParams,
    grid: GridSpec,
    fft_x1: AxisFft,
    fft_x2: AxisFft,
    fft_theta: AxisFft,
    tables: ThetaTables,
    /// Transport phase for half a step, Model I family.
    transport_half: Option<Array3<Complex64>>,
    /// Uni-directional (+ regularizing) decay for half a step, Model II/III.
    xdiff_half: Option<Array3<f64>>,
    /// Orientation-mode decay for half a step.
    local_half: Vec<f64>,
    /// i*m per orientation mode with the 2/3 dealiasing mask folded in;
    /// applied to the alignment flux before the inverse transform.
    flux_factors: Vec<Complex64>,
    /// i*k factors for the chemotaxis flux divergence (Nyquist zeroed).
    dx1_factors: Vec<Complex64>,
    dx2_factors: Vec<Complex64>,
}

impl Stepper {
    pub fn new(grid: GridSpec, params: ModelParams) -> Result<Self, ModelError> {
        params.validate()?;
        let (nx, ny, nth) = (grid.nx(), grid.ny(), grid.ntheta());
        let tables = ThetaTables::new(nth);
        let dt = params.dt;
        let model = params.model;

        let transport_half = if model.has_transport() && params.terms.transport {
            let tau = dt / (2.0 * params.eps_scale);
            let mut m = Array3::zeros((nx, ny, nth));
            for ((i, j, k), v) in m.indexed_iter_mut() {
                let speed = spectral::wavenumber_x(i, nx) * tables.cos_t[k]
                    + spectral::wavenumber_x(j, ny) * tables.sin_t[k];
                *v = Complex64::from_polar(1.0, -speed * tau);
            }
            Some(m)
        } else {
            None
        };

        let xdiff_half = if model.has_x_diffusion() && params.terms.x_diffusion {
            let mut m = Array3::zeros((nx, ny, nth));
            for ((i, j, k), v) in m.indexed_iter_mut() {
                let kx = spectral::wavenumber_x(i, nx);
                let ky = spectral::wavenumber_x(j, ny);
                let along = kx * tables.cos_t[k] + ky * tables.sin_t[k];
                let rate =
                    params.xdiff_coef * along * along + params.eps_reg * (kx * kx + ky * ky);
                *v = (-rate * dt / 2.0).exp();
            }
            Some(m)
        } else {
            None
        };

        let local_half: Vec<f64> = (0..nth)
            .map(|mi| {
                let m = spectral::freq_index(mi, nth);
                let mut rate = 0.0;
                if params.terms.theta_diffusion {
                    rate += (m * m) as f64;
                }
                if model.has_reversal() && params.terms.reversal && m.rem_euclid(2) != 0 {
                    rate += 2.0 / (params.eps_scale * params.eps_scale);
                }
                (-rate * dt / 2.0).exp()
            })
            .collect();

        let flux_factors: Vec<Complex64> = (0..nth)
            .map(|mi| {
                if spectral::keep_mode(mi, nth) && mi != nth / 2 {
                    Complex64::new(0.0, spectral::wavenumber_theta(mi, nth))
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();

        let dx_factors = |n: usize| -> Vec<Complex64> {
            (0..n)
                .map(|i| {
                    if i == n / 2 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        Complex64::new(0.0, spectral::wavenumber_x(i, n))
                    }
                })
                .collect()
        };

        Ok(Stepper {
            fft_x1: AxisFft::new(nx),
            fft_x2: AxisFft::new(ny),
            fft_theta: AxisFft::new(nth),
            dx1_factors: dx_factors(nx),
            dx2_factors: dx_factors(ny),
            tables,
            transport_half,
            xdiff_half,
            local_half,
            flux_factors,
            params,
            grid,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Advances the state by one step of dt.
    pub fn step(&self, state: &SimState) -> Result<SimState, ModelError> {
        if state.f.grid() != self.grid {
            return Err(ModelError::GridMismatch(state.f.grid(), self.grid));
        }
        let needs_chemo = self.params.model == ModelKind::ModelIII;
        if needs_chemo && state.s.is_none() {
            return Err(ModelError::MissingChemoField);
        }

        let mut f = state.f.values.clone();
        let mut s_new = state.s.clone();
        let t_new = state.t + self.params.dt;

        if let Some(phase) = &self.transport_half {
            self.apply_x_multiplier(&mut f, phase);
        }
        if let Some(decay) = &self.xdiff_half {
            self.apply_x_decay(&mut f, decay);
        }

        if needs_chemo && self.params.chemo == ChemoCoupling::Coupled {
            // Mid-cycle density drives the chemoattractant this step.
            let n = grid::density(&self.wrap(f.clone(), state.t));
            s_new = Some(step_chemo(
                s_new.as_ref().expect("presence checked above"),
                &n,
                self.params.dt,
            )?);
        }

        self.local_step(&mut f, s_new.as_ref(), state.t)?;

        if let Some(decay) = &self.xdiff_half {
            self.apply_x_decay(&mut f, decay);
        }
        if let Some(phase) = &self.transport_half {
            self.apply_x_multiplier(&mut f, phase);
        }

        let mut next = SimState {
            f: self.wrap(f, t_new),
            s: s_new,
            t: t_new,
        };
        if let Some(s) = &mut next.s {
            s.time = t_new;
        }
        Ok(next)
    }

    fn wrap(&self, values: Array3<f64>, time: f64) -> KineticField {
        let mut f = KineticField::zeros(self.grid, time);
        f.values = values;
        f
    }

    fn apply_x_multiplier(&self, f: &mut Array3<f64>, mult: &Array3<Complex64>) {
        let mut c = spectral::to_complex3(f);
        self.fft_x1.forward_axis(&mut c, 0);
        self.fft_x2.forward_axis(&mut c, 1);
        for (v, m) in c.iter_mut().zip(mult.iter()) {
            *v *= m;
        }
        self.fft_x2.inverse_axis(&mut c, 1);
        self.fft_x1.inverse_axis(&mut c, 0);
        *f = spectral::real_part3(&c);
    }

    fn apply_x_decay(&self, f: &mut Array3<f64>, mult: &Array3<f64>) {
        let mut c = spectral::to_complex3(f);
        self.fft_x1.forward_axis(&mut c, 0);
        self.fft_x2.forward_axis(&mut c, 1);
        for (v, m) in c.iter_mut().zip(mult.iter()) {
            *v *= *m;
        }
        self.fft_x2.inverse_axis(&mut c, 1);
        self.fft_x1.inverse_axis(&mut c, 0);
        *f = spectral::real_part3(&c);
    }

    fn apply_theta_decay(&self, f: &mut Array3<f64>) {
        let mut c = spectral::to_complex3(f);
        self.fft_theta.forward_axis(&mut c, 2);
        for (idx, v) in c.indexed_iter_mut() {
            *v *= self.local_half[idx.2];
        }
        self.fft_theta.inverse_axis(&mut c, 2);
        *f = spectral::real_part3(&c);
    }

    /// Exact orientation decay for dt/2, explicit midpoint step of the
    /// nonlinear fluxes for dt, exact orientation decay for dt/2.
    fn local_step(
        &self,
        f: &mut Array3<f64>,
        s: Option<&ScalarField>,
        t: f64,
    ) -> Result<(), ModelError> {
        self.apply_theta_decay(f);

        let align_on = self.params.terms.alignment;
        let chemo_on = self.params.model == ModelKind::ModelIII && self.params.terms.chemotaxis;
        if align_on || chemo_on {
            let dt = self.params.dt;
            let chemo_coef = if chemo_on {
                Some(self.chemo_coefficient(s.expect("presence checked in step")))
            } else {
                None
            };

            let k1 = self.flux_rate(f, chemo_coef.as_ref(), t)?;
            let mut mid = f.clone();
            for (m, k) in mid.iter_mut().zip(k1.iter()) {
                *m += 0.5 * dt * k;
            }
            let k2 = self.flux_rate(&mid, chemo_coef.as_ref(), t)?;
            for (v, k) in f.iter_mut().zip(k2.iter()) {
                *v += dt * k;
            }
            if f.iter().any(|v| !v.is_finite()) {
                return Err(ModelError::NonFinite { time: t });
            }
        }

        self.apply_theta_decay(f);
        Ok(())
    }

    /// 2 e(theta).grad s, the orientation-resolved drift speed.
    fn chemo_coefficient(&self, s: &ScalarField) -> Array3<f64> {
        let gs1 = grid::scalar_derivative(s, grid::SpatialAxis::X1, 1);
        let gs2 = grid::scalar_derivative(s, grid::SpatialAxis::X2, 1);
        let mut coef = Array3::zeros((self.grid.nx(), self.grid.ny(), self.grid.ntheta()));
        for ((i, j, k), v) in coef.indexed_iter_mut() {
            *v = 2.0
                * (self.tables.cos_t[k] * gs1.values[[i, j]]
                    + self.tables.sin_t[k] * gs2.values[[i, j]]);
        }
        coef
    }

    /// Right-hand side of the explicit substep:
    /// -d/dtheta (f psi(V)) - div(coef e f).
    fn flux_rate(
        &self,
        f: &Array3<f64>,
        chemo_coef: Option<&Array3<f64>>,
        t: f64,
    ) -> Result<Array3<f64>, ModelError> {
        let mut rate = Array3::zeros(f.raw_dim());

        if self.params.terms.alignment {
            let field = self.wrap(f.clone(), t);
            let v = if self.params.alignment.radius > 0.0 {
                interaction::nonlocal_rate(&field, self.params.alignment.radius)?
            } else {
                interaction::local_rate(&field)
            };
            let mut flux = v.values;
            for (p, fv) in flux.iter_mut().zip(f.iter()) {
                *p = fv * self.params.psi.apply(*p, self.params.alignment.bound);
            }
            let mut c = spectral::to_complex3(&flux);
            self.fft_theta.forward_axis(&mut c, 2);
            for (idx, v) in c.indexed_iter_mut() {
                *v *= self.flux_factors[idx.2];
            }
            self.fft_theta.inverse_axis(&mut c, 2);
            for (r, d) in rate.iter_mut().zip(c.iter()) {
                *r -= d.re;
            }
        }

        if let Some(coef) = chemo_coef {
            for (axis_factors, fft, axis, table) in [
                (&self.dx1_factors, &self.fft_x1, 0usize, &self.tables.cos_t),
                (&self.dx2_factors, &self.fft_x2, 1usize, &self.tables.sin_t),
            ] {
                let mut comp = Array3::zeros(f.raw_dim());
                for ((i, j, k), v) in comp.indexed_iter_mut() {
                    *v = coef[[i, j, k]] * table[k] * f[[i, j, k]];
                }
                let mut c = spectral::to_complex3(&comp);
                fft.forward_axis(&mut c, axis);
                for (idx, v) in c.indexed_iter_mut() {
                    let i = [idx.0, idx.1, idx.2][axis];
                    *v *= axis_factors[i];
                }
                fft.inverse_axis(&mut c, axis);
                for (r, d) in rate.iter_mut().zip(c.iter()) {
                    *r -= d.re;
                }
            }
        }

        Ok(rate)
    }
}

/// Exact exponential step of ds/dt - Laplacian s = n - s with the density
/// frozen over the step: each mode relaxes toward n_hat / (|k|^2 + 1) at
/// rate |k|^2 + 1.
pub fn step_chemo(s: &ScalarField, density: &ScalarField, dt: f64) -> Result<ScalarField, ModelError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(ModelError::BadTimeStep(dt));
    }
    if s.grid() != density.grid() {
        return Err(ModelError::ChemoGridMismatch(s.grid(), density.grid()));
    }
    let grid = s.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut s_hat = spectral::to_complex2(&s.values);
    let mut n_hat = spectral::to_complex2(&density.values);
    spectral::fft2_scalar(&mut s_hat, false);
    spectral::fft2_scalar(&mut n_hat, false);
    for ((i, j), v) in s_hat.indexed_iter_mut() {
        let kx = spectral::wavenumber_x(i, nx);
        let ky = spectral::wavenumber_x(j, ny);
        let lam = kx * kx + ky * ky + 1.0;
        let decay = (-lam * dt).exp();
        *v = *v * decay + n_hat[[i, j]] * ((1.0 - decay) / lam);
    }
    spectral::fft2_scalar(&mut s_hat, true);
    let mut out = ScalarField::zeros(grid, s.time + dt);
    for (dst, src) in out.values.iter_mut().zip(s_hat.iter()) {
        *dst = src.re;
    }
    Ok(out)
}

/// Anything that wants to see the state at observer ticks.
pub trait Observer {
    fn record(&mut self, state: &SimState);
}

/// Advances `state` to `t_end`, invoking every observer at t0 and then at
/// every cadence tick. The cadence and the horizon must both be integer
/// multiples of dt.
pub fn run(
    mut state: SimState,
    params: &ModelParams,
    t_end: f64,
    cadence: f64,
    observers: &mut [&mut dyn Observer],
) -> Result<SimState, ModelError> {
    params.validate()?;
    let dt = params.dt;
    let t0 = state.t;
    let span = t_end - t0;
    if span < -1e-12 {
        return Err(ModelError::BadHorizon { t0, t_end, dt });
    }
    let steps = (span / dt).round().max(0.0);
    if (steps * dt - span).abs() > 1e-9 * span.abs().max(1.0) {
        return Err(ModelError::BadHorizon { t0, t_end, dt });
    }
    let steps = steps as u64;
    let cadence_steps = (cadence / dt).round();
    if cadence_steps < 1.0 || (cadence_steps * dt - cadence).abs() > 1e-9 * cadence.abs().max(1.0)
    {
        return Err(ModelError::BadCadence { cadence, dt });
    }
    let cadence_steps = cadence_steps as u64;

    let stepper = Stepper::new(state.f.grid(), params.clone())?;
    for obs in observers.iter_mut() {
        obs.record(&state);
    }
    for i in 1..=steps {
        state = stepper.step(&state)?;
        // Reconstruct time from the step index so long runs do not
        // accumulate additive round-off.
        let t = t0 + i as f64 * dt;
        state.t = t;
        state.f.time = t;
        if let Some(s) = &mut state.s {
            s.time = t;
        }
        if i % cadence_steps == 0 {
            for obs in observers.iter_mut() {
                obs.record(&state);
            }
        }
    }
    Ok(state)
}
