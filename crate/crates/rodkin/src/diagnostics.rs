//! Quantitative checks of the analytical structure: mass, L2 energy
//! ledgers with dissipation accounting, nematic symmetry and order,
//! orientation-moment windows, and the fractional space-time norm that
//! measures the extra regularity of those moments.

use crate::grid::{self, FieldAxis, GridSpec, KineticField, ScalarField};
use crate::interaction;
use crate::models::{Observer, SimState};
use crate::spectral::{self, AxisFft, ThetaTables};
use ndarray::Array3;
use thiserror::Error;

/// Exponent of the parabolic weight (tau^2 + |xi|^4)^e in the fractional
/// norm; the moment-regularity estimate is proved with e = 1/7.
pub const FRACTIONAL_EXPONENT: f64 = 1.0 / 7.0;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("window samples are not uniformly spaced: step {index} spans {got}, expected {want}")]
    NonUniformCadence { index: usize, got: f64, want: f64 },
    #[error("moment window needs at least {min} samples, got {got}")]
    ShortWindow { got: usize, min: usize },
    #[error("moment weights do not match the grid: {0}")]
    Weights(#[from] grid::GridError),
}

/// Total mass: quadrature of f over the whole phase space.
pub fn total_mass(f: &KineticField) -> f64 {
    f.values.sum() * f.grid().cell_volume()
}

/// Squared L2(x, theta) norm.
pub fn l2_norm_sq(f: &KineticField) -> f64 {
    f.values.iter().map(|v| v * v).sum::<f64>() * f.grid().cell_volume()
}

pub fn l2_norm(f: &KineticField) -> f64 {
    l2_norm_sq(f).sqrt()
}

/// ||f - tau_pi f||_{L2}: zero exactly when f is nematically symmetric.
pub fn nematic_symmetry_error(f: &KineticField) -> f64 {
    let shifted = grid::shift_pi(f);
    f.l2_distance(&shifted)
}

/// Pointwise nematic order parameter |integral of f e^{2 i theta}| / n(x),
/// in [0, 1] up to quadrature error; set to 0 where the density vanishes.
pub fn nematic_order(f: &KineticField) -> ScalarField {
    let (s, c) = interaction::nematic_moments(f);
    let n = grid::density(f);
    let mut out = ScalarField::zeros(f.grid(), f.time);
    for ((i, j), dst) in out.values.indexed_iter_mut() {
        let den = n.values[[i, j]];
        if den != 0.0 {
            *dst = (s.values[[i, j]].powi(2) + c.values[[i, j]].powi(2)).sqrt() / den;
        }
    }
    out
}

/// Nematic order of a discrete angle ensemble: |sum exp(2 i theta)| / N.
pub fn agent_nematic_order(angles: &[f64]) -> f64 {
    if angles.is_empty() {
        return 0.0;
    }
    interaction::nematic_current(angles).j.norm() / angles.len() as f64
}

/// Which dissipation terms the energy ledger accumulates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LedgerLayout {
    /// Transport-reversal layout:
    /// lhs(t) = sup ||f||^2 + int ||d_theta f||^2 + int ||f - tau f||^2.
    Reversal,
    /// Uni-directional layout:
    /// lhs(t) = sup ||f||^2 + int ||d_theta f||^2 + int ||e.grad f||^2
    ///        + eps int ||grad f||^2.
    Directional { eps_reg: f64 },
}

/// Running L2 energy balance: the instantaneous norm, trapezoid-accumulated
/// dissipation integrals, and the a-priori bound 2 e^{t - t0} ||f0||^2.
#[derive(Debug, Clone)]
pub struct EnergyLedger {
    layout: LedgerLayout,
    pub times: Vec<f64>,
    pub l2_sq: Vec<f64>,
    pub dtheta_sq_cum: Vec<f64>,
    pub reversal_sq_cum: Vec<f64>,
    pub directional_sq_cum: Vec<f64>,
    pub reg_sq_cum: Vec<f64>,
    /// (time, [dtheta, reversal, directional, reg]) integrands at the last tick.
    prev: Option<(f64, [f64; 4])>,
    tables: Option<ThetaTables>,
}

impl EnergyLedger {
    pub fn new(layout: LedgerLayout) -> Self {
        EnergyLedger {
            layout,
            times: Vec::new(),
            l2_sq: Vec::new(),
            dtheta_sq_cum: Vec::new(),
            reversal_sq_cum: Vec::new(),
            directional_sq_cum: Vec::new(),
            reg_sq_cum: Vec::new(),
            prev: None,
            tables: None,
        }
    }

    pub fn layout(&self) -> LedgerLayout {
        self.layout
    }

    fn integrands(&mut self, f: &KineticField) -> [f64; 4] {
        let vol = f.grid().cell_volume();
        let dtheta = l2_norm_sq(&grid::spectral_derivative(f, FieldAxis::Theta, 1));
        match self.layout {
            LedgerLayout::Reversal => {
                let rev = nematic_symmetry_error(f).powi(2);
                [dtheta, rev, 0.0, 0.0]
            }
            LedgerLayout::Directional { eps_reg } => {
                let nth = f.grid().ntheta();
                if self.tables.as_ref().map(|t| t.cos_t.len()) != Some(nth) {
                    self.tables = Some(ThetaTables::new(nth));
                }
                let tables = self.tables.as_ref().expect("just ensured");
                let fx = grid::spectral_derivative(f, FieldAxis::X1, 1);
                let fy = grid::spectral_derivative(f, FieldAxis::X2, 1);
                let mut along = 0.0;
                let mut full = 0.0;
                for ((i, j, k), gx) in fx.values.indexed_iter() {
                    let gy = fy.values[[i, j, k]];
                    let d = tables.cos_t[k] * gx + tables.sin_t[k] * gy;
                    along += d * d;
                    full += gx * gx + gy * gy;
                }
                [dtheta, 0.0, along * vol, eps_reg * full * vol]
            }
        }
    }

    /// Appends one tick; integrals advance by the trapezoid rule from the
    /// previous tick.
    pub fn record_field(&mut self, f: &KineticField) {
        let t = f.time;
        let cur = self.integrands(f);
        let mut cums = [
            self.dtheta_sq_cum.last().copied().unwrap_or(0.0),
            self.reversal_sq_cum.last().copied().unwrap_or(0.0),
            self.directional_sq_cum.last().copied().unwrap_or(0.0),
            self.reg_sq_cum.last().copied().unwrap_or(0.0),
        ];
        if let Some((t_prev, prev)) = self.prev {
            let h = t - t_prev;
            for (acc, (a, b)) in cums.iter_mut().zip(prev.iter().zip(cur.iter())) {
                *acc += 0.5 * h * (a + b);
            }
        }
        self.times.push(t);
        self.l2_sq.push(l2_norm_sq(f));
        self.dtheta_sq_cum.push(cums[0]);
        self.reversal_sq_cum.push(cums[1]);
        self.directional_sq_cum.push(cums[2]);
        self.reg_sq_cum.push(cums[3]);
        self.prev = Some((t, cur));
    }

    /// lhs(t_i) = sup_{j <= i} ||f||^2 plus every accumulated dissipation.
    pub fn lhs_series(&self) -> Vec<f64> {
        let mut sup = f64::NEG_INFINITY;
        (0..self.times.len())
            .map(|i| {
                sup = sup.max(self.l2_sq[i]);
                sup + self.dtheta_sq_cum[i]
                    + self.reversal_sq_cum[i]
                    + self.directional_sq_cum[i]
                    + self.reg_sq_cum[i]
            })
            .collect()
    }

    /// The a-priori bound 2 e^{t - t0} ||f0||^2 at each tick.
    pub fn bound_series(&self) -> Vec<f64> {
        let (t0, e0) = match (self.times.first(), self.l2_sq.first()) {
            (Some(&t0), Some(&e0)) => (t0, e0),
            _ => return Vec::new(),
        };
        self.times
            .iter()
            .map(|&t| 2.0 * (t - t0).exp() * e0)
            .collect()
    }

    /// True when lhs(t) <= bound(t) at every recorded tick.
    pub fn satisfied(&self) -> bool {
        self.lhs_series()
            .iter()
            .zip(self.bound_series().iter())
            .all(|(l, b)| l <= b)
    }
}

impl Observer for EnergyLedger {
    fn record(&mut self, state: &SimState) {
        self.record_field(&state.f);
    }
}

/// Records total mass at every tick.
#[derive(Debug, Default, Clone)]
pub struct MassTrace {
    pub series: Vec<(f64, f64)>,
}

impl Observer for MassTrace {
    fn record(&mut self, state: &SimState) {
        self.series.push((state.t, total_mass(&state.f)));
    }
}

/// Records the inner product of the state against a fixed test field.
#[derive(Debug, Clone)]
pub struct InnerProductTrace {
    pub test_field: KineticField,
    pub series: Vec<(f64, f64)>,
}

impl InnerProductTrace {
    pub fn new(test_field: KineticField) -> Self {
        InnerProductTrace {
            test_field,
            series: Vec::new(),
        }
    }
}

impl Observer for InnerProductTrace {
    fn record(&mut self, state: &SimState) {
        let vol = state.f.grid().cell_volume();
        let ip: f64 = state
            .f
            .values
            .iter()
            .zip(self.test_field.values.iter())
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * vol;
        self.series.push((state.t, ip));
    }
}

/// Records an arbitrary scalar functional of the state.
pub struct SeriesTrace<F: FnMut(&SimState) -> f64> {
    pub series: Vec<(f64, f64)>,
    metric: F,
}

impl<F: FnMut(&SimState) -> f64> SeriesTrace<F> {
    pub fn new(metric: F) -> Self {
        SeriesTrace {
            series: Vec::new(),
            metric,
        }
    }
}

impl<F: FnMut(&SimState) -> f64> Observer for SeriesTrace<F> {
    fn record(&mut self, state: &SimState) {
        self.series.push((state.t, (self.metric)(state)));
    }
}

/// Collects the orientation moment rho^phi(x, t_k) at every observer tick.
/// `finish` validates the uniform cadence and attaches the time taper.
pub struct MomentCollector {
    phi: Vec<f64>,
    snaps: Vec<ScalarField>,
    error: Option<DiagnosticsError>,
}

impl MomentCollector {
    pub fn new(phi: Vec<f64>) -> Self {
        MomentCollector {
            phi,
            snaps: Vec::new(),
            error: None,
        }
    }

    pub fn finish(self) -> Result<MomentWindow, DiagnosticsError> {
        if let Some(e) = self.error {
            return Err(e);
        }
        let times: Vec<f64> = self.snaps.iter().map(|s| s.time).collect();
        MomentWindow::from_snaps(&self.snaps, &times)
    }
}

impl Observer for MomentCollector {
    fn record(&mut self, state: &SimState) {
        if self.error.is_some() {
            return;
        }
        match grid::integrate_theta(&state.f, &self.phi) {
            Ok(rho) => self.snaps.push(rho),
            Err(e) => self.error = Some(DiagnosticsError::Weights(e)),
        }
    }
}

/// A uniformly sampled space-time window of an orientation moment, with the
/// smooth cutoff weights psi(t) that emulate compact support in time.
pub struct MomentWindow {
    grid: GridSpec,
    pub times: Vec<f64>,
    /// rho^phi samples, shape (nx, ny, nt).
    pub rho: Array3<f64>,
    /// Time weights, length nt.
    pub psi: Vec<f64>,
}

/// Smooth cosine ramp from 0 to 1 over roughly the first and last 10% of
/// the window.
pub fn cosine_taper(nt: usize) -> Vec<f64> {
    let ramp = ((0.1 * nt as f64).round() as usize).max(1);
    (0..nt)
        .map(|i| {
            let edge = i.min(nt - 1 - i);
            if edge < ramp {
                let s = edge as f64 / ramp as f64;
                (0.5 * std::f64::consts::PI * s).sin().powi(2)
            } else {
                1.0
            }
        })
        .collect()
}

impl MomentWindow {
    const MIN_SAMPLES: usize = 4;

    /// Stacks snapshots recorded at the given uniform times and applies the
    /// default taper.
    pub fn from_snaps(snaps: &[ScalarField], times: &[f64]) -> Result<Self, DiagnosticsError> {
        let psi = cosine_taper(snaps.len());
        MomentWindow::from_parts(snaps, times, psi)
    }

    /// As `from_snaps` with caller-controlled weights (e.g. psi = 1 for
    /// closed-form cross-checks).
    pub fn from_parts(
        snaps: &[ScalarField],
        times: &[f64],
        psi: Vec<f64>,
    ) -> Result<Self, DiagnosticsError> {
        if snaps.len() < Self::MIN_SAMPLES || snaps.len() != times.len() || psi.len() != snaps.len()
        {
            return Err(DiagnosticsError::ShortWindow {
                got: snaps.len(),
                min: Self::MIN_SAMPLES,
            });
        }
        let dt = times[1] - times[0];
        for i in 2..times.len() {
            let got = times[i] - times[i - 1];
            if (got - dt).abs() > 1e-9 * dt.abs().max(1.0) {
                return Err(DiagnosticsError::NonUniformCadence {
                    index: i,
                    got,
                    want: dt,
                });
            }
        }
        let grid = snaps[0].grid();
        let mut rho = Array3::zeros((grid.nx(), grid.ny(), snaps.len()));
        for (l, s) in snaps.iter().enumerate() {
            for ((i, j), &v) in s.values.indexed_iter() {
                rho[[i, j, l]] = v;
            }
        }
        Ok(MomentWindow {
            grid,
            times: times.to_vec(),
            rho,
            psi,
        })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn sample_step(&self) -> f64 {
        self.times[1] - self.times[0]
    }
}

/// Squared fractional space-time norm of the tapered moment:
/// sum over the discrete frequency lattice of
/// (1 + (tau^2 + |xi|^4)^exponent) |FFT(psi rho)|^2 times the cell measure,
/// with xi in 2 pi Z^2 and tau in (2 pi / T) Z for the window length T.
/// `exponent = 0` selects the plain (squared) L2 norm of psi rho.
pub fn fractional_norm(window: &MomentWindow, exponent: f64) -> f64 {
    let grid = window.grid;
    let (nx, ny) = (grid.nx(), grid.ny());
    let nt = window.times.len();
    let dt = window.sample_step();
    let period = nt as f64 * dt;

    let mut g = Array3::zeros((nx, ny, nt));
    for ((i, j, l), dst) in g.indexed_iter_mut() {
        *dst = num_complex::Complex64::new(window.rho[[i, j, l]] * window.psi[l], 0.0);
    }
    AxisFft::new(nx).forward_axis(&mut g, 0);
    AxisFft::new(ny).forward_axis(&mut g, 1);
    AxisFft::new(nt).forward_axis(&mut g, 2);

    let cell = grid.dx1() * grid.dx2() * dt;
    let ntot = (nx * ny * nt) as f64;
    let mut acc = 0.0;
    for ((i, j, l), v) in g.indexed_iter() {
        let kx = spectral::wavenumber_x(i, nx);
        let ky = spectral::wavenumber_x(j, ny);
        let xi_sq = kx * kx + ky * ky;
        let tau = 2.0 * std::f64::consts::PI * spectral::freq_index(l, nt) as f64 / period;
        let weight = if exponent == 0.0 {
            1.0
        } else {
            1.0 + (tau * tau + xi_sq * xi_sq).powf(exponent)
        };
        acc += weight * v.norm_sqr();
    }
    acc * cell / ntot
}
