//! Self-propelled rod ensemble: synchronous Euler steps with a clamped
//! nematic alignment torque, uniform angular noise, and Poisson reversals,
//! plus binning back to an empirical kinetic density.
//!
//! Every random draw is a pure function of (seed, agent index, step index,
//! draw index), so trajectories are bitwise reproducible regardless of how
//! the per-agent loop is scheduled across threads.

use crate::grid::{GridSpec, KineticField};
use crate::interaction::{clamp, AlignmentForm, NematicCurrent};
use crate::rng;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

/// Interaction radii at or beyond this cover every periodic pair (the
/// farthest two points on the unit torus are sqrt(1/2) apart), so the
/// neighbor search collapses to closed-form moment sums.
pub const ALL_TO_ALL_RADIUS: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Step index reserved for initial-condition draws.
const INIT_STEP: u64 = u64::MAX;
const DRAW_NOISE: u64 = 0;
const DRAW_REVERSAL: u64 = 1;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("agent parameter {name} = {value} is out of range")]
    BadParam { name: &'static str, value: f64 },
    #[error("ensemble must contain at least one agent")]
    EmptyEnsemble,
    #[error(
        "interaction radius {0} is ambiguous: use r < 0.5 (periodic neighborhoods) or r >= {all} (all pairs)",
        all = ALL_TO_ALL_RADIUS
    )]
    AmbiguousRadius(f64),
    #[error("time step must be positive and finite, got {0}")]
    BadTimeStep(f64),
    #[error("lambda * dt = {0} exceeds 0.1; per-step Bernoulli thinning would misstate the reversal rate")]
    ReversalResolution(f64),
    #[error("cannot sample agents from a field with no positive mass")]
    BadDensity,
    #[error("position and angle arrays have different lengths: {x} vs {theta}")]
    LengthMismatch { x: usize, theta: usize },
}

/// Physical parameters of the rod ensemble. The torque bound is the derived
/// packing ratio pi r^2 / (l w): the number of rods that fit in an
/// interaction disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentParams {
    pub v0: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub lambda: f64,
    /// Interaction radius: below 1/2 neighborhoods are periodic disks;
    /// at or above [`ALL_TO_ALL_RADIUS`] every pair interacts.
    pub radius: f64,
    pub length: f64,
    pub width: f64,
    pub form: AlignmentForm,
}

impl Default for AgentParams {
    fn default() -> Self {
        AgentParams {
            v0: 1.0,
            gamma: 1.0,
            sigma: 1.0,
            lambda: 1.0,
            radius: 0.1,
            length: 0.05,
            width: 0.01,
            form: AlignmentForm::ClampedSum,
        }
    }
}

impl AgentParams {
    /// Torque clamp bound pi r^2 / (l w).
    pub fn bound(&self) -> f64 {
        PI * self.radius * self.radius / (self.length * self.width)
    }

    pub fn all_to_all(&self) -> bool {
        self.radius >= ALL_TO_ALL_RADIUS
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        for (name, value, allow_zero) in [
            ("v0", self.v0, true),
            ("gamma", self.gamma, true),
            ("sigma", self.sigma, true),
            ("lambda", self.lambda, true),
            ("radius", self.radius, false),
            ("length", self.length, false),
            ("width", self.width, false),
        ] {
            let ok = value.is_finite() && if allow_zero { value >= 0.0 } else { value > 0.0 };
            if !ok {
                return Err(AgentError::BadParam { name, value });
            }
        }
        if self.radius >= 0.5 && self.radius < ALL_TO_ALL_RADIUS {
            return Err(AgentError::AmbiguousRadius(self.radius));
        }
        Ok(())
    }
}

/// Positions on the unit torus, angles in (-pi, pi], and the per-agent
/// cumulative reversal counts. The step index feeds the counter RNG.
#[derive(Debug, Clone)]
pub struct AgentEnsemble {
    pub x: Vec<[f64; 2]>,
    pub theta: Vec<f64>,
    pub t: f64,
    pub seed: u64,
    step_index: u64,
    pub reversals: Vec<u64>,
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle(t: f64) -> f64 {
    let mut w = t.rem_euclid(2.0 * PI);
    if w >= 2.0 * PI {
        w = 0.0;
    }
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Wraps a coordinate into [0, 1).
fn wrap_unit(x: f64) -> f64 {
    let w = x.rem_euclid(1.0);
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Signed minimum-image separation on the unit torus.
fn min_image(d: f64) -> f64 {
    d - d.round()
}

impl AgentEnsemble {
    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    /// Builds an ensemble from explicit positions and angles, wrapping both
    /// into their fundamental domains.
    pub fn from_parts(x: Vec<[f64; 2]>, theta: Vec<f64>, seed: u64) -> Result<Self, AgentError> {
        if x.len() != theta.len() {
            return Err(AgentError::LengthMismatch {
                x: x.len(),
                theta: theta.len(),
            });
        }
        if theta.is_empty() {
            return Err(AgentError::EmptyEnsemble);
        }
        let n = theta.len();
        Ok(AgentEnsemble {
            x: x
                .into_iter()
                .map(|p| [wrap_unit(p[0]), wrap_unit(p[1])])
                .collect(),
            theta: theta.into_iter().map(wrap_angle).collect(),
            t: 0.0,
            seed,
            step_index: 0,
            reversals: vec![0; n],
        })
    }

    /// Agents i.i.d. uniform on the torus with uniform angles.
    pub fn sample_uniform(n: usize, seed: u64) -> Result<Self, AgentError> {
        if n == 0 {
            return Err(AgentError::EmptyEnsemble);
        }
        let x = (0..n)
            .map(|i| {
                [
                    rng::uniform01(seed, i as u64, INIT_STEP, 0),
                    rng::uniform01(seed, i as u64, INIT_STEP, 1),
                ]
            })
            .collect();
        let theta = (0..n)
            .map(|i| PI - 2.0 * PI * rng::uniform01(seed, i as u64, INIT_STEP, 2))
            .collect();
        AgentEnsemble::from_parts(x, theta, seed)
    }

    /// Agents drawn from a nodal kinetic density: a cell is selected with
    /// probability proportional to its value, then the agent is placed
    /// uniformly inside it. Cell c of the orientation axis covers
    /// [-pi + c*dtheta, -pi + (c+1)*dtheta), matching [`bin_density`].
    pub fn sample_from_field(f: &KineticField, n: usize, seed: u64) -> Result<Self, AgentError> {
        if n == 0 {
            return Err(AgentError::EmptyEnsemble);
        }
        let grid = f.grid();
        let mut cum = Vec::with_capacity(f.values.len());
        let mut total = 0.0;
        for &v in f.values.iter() {
            total += v.max(0.0);
            cum.push(total);
        }
        if !(total > 0.0) {
            return Err(AgentError::BadDensity);
        }
        let (ny, nth) = (grid.ny(), grid.ntheta());
        let mut x = Vec::with_capacity(n);
        let mut theta = Vec::with_capacity(n);
        for a in 0..n {
            let u = rng::uniform01(seed, a as u64, INIT_STEP, 0) * total;
            let c = cum.partition_point(|&acc| acc <= u).min(cum.len() - 1);
            let k = c % nth;
            let j = (c / nth) % ny;
            let i = c / (nth * ny);
            let u1 = rng::uniform01(seed, a as u64, INIT_STEP, 1);
            let u2 = rng::uniform01(seed, a as u64, INIT_STEP, 2);
            let u3 = rng::uniform01(seed, a as u64, INIT_STEP, 3);
            x.push([
                (i as f64 + u1) * grid.dx1(),
                (j as f64 + u2) * grid.dx2(),
            ]);
            theta.push(-PI + (k as f64 + u3) * grid.dtheta());
        }
        AgentEnsemble::from_parts(x, theta, seed)
    }
}

/// Neighbor search structure: uniform cells of side >= r over the periodic
/// box, or the closed-form all-pair moment sums.
enum Neighborhoods {
    /// (cells-per-side, agent ids per cell, radius^2)
    CellList(usize, Vec<Vec<u32>>, f64),
    /// Sum of exp(2 i theta) over every agent; per-agent self terms are
    /// removed in closed form.
    AllPairs(Complex64),
}

fn build_neighborhoods(ensemble: &AgentEnsemble, params: &AgentParams) -> Neighborhoods {
    if params.all_to_all() {
        let mut j = Complex64::new(0.0, 0.0);
        for &t in &ensemble.theta {
            j += Complex64::new((2.0 * t).cos(), (2.0 * t).sin());
        }
        Neighborhoods::AllPairs(j)
    } else {
        let m = ((1.0 / params.radius).floor() as usize).max(2);
        let mut cells = vec![Vec::new(); m * m];
        for (id, p) in ensemble.x.iter().enumerate() {
            let cx = ((p[0] * m as f64).floor() as usize).min(m - 1);
            let cy = ((p[1] * m as f64).floor() as usize).min(m - 1);
            cells[cx * m + cy].push(id as u32);
        }
        Neighborhoods::CellList(m, cells, params.radius * params.radius)
    }
}

/// Alignment torque on agent `i` from the pre-step snapshot.
fn torque(i: usize, ensemble: &AgentEnsemble, params: &AgentParams, nb: &Neighborhoods) -> f64 {
    let ti = ensemble.theta[i];
    let bound = params.bound();
    match nb {
        Neighborhoods::AllPairs(j_tot) => {
            // Remove the self term exp(2 i theta_i) in closed form.
            let self_term = Complex64::new((2.0 * ti).cos(), (2.0 * ti).sin());
            match params.form {
                AlignmentForm::ClampedSum => {
                    // sum_j sin(2(theta_j - theta_i)) = Im(J e^{-2 i theta_i});
                    // the self term contributes sin(0) = 0.
                    let s = (j_tot * self_term.conj()).im;
                    params.gamma * clamp(s, bound)
                }
                AlignmentForm::ClampedCurrent => {
                    let current = NematicCurrent::from_sum(j_tot - self_term, ensemble.n() - 1);
                    crate::interaction::director_form_rate(&current, ti, bound, params.gamma)
                }
            }
        }
        Neighborhoods::CellList(m, cells, r2) => {
            let m = *m;
            let cx = ((ensemble.x[i][0] * m as f64).floor() as usize).min(m - 1);
            let cy = ((ensemble.x[i][1] * m as f64).floor() as usize).min(m - 1);
            // Candidate cells deduplicated: for m = 2 the offsets -1 and +1
            // alias the same cell and must not be visited twice.
            let mut candidates = [0usize; 9];
            let mut count = 0;
            for dx in [m - 1, 0, 1] {
                for dy in [m - 1, 0, 1] {
                    let c = ((cx + dx) % m) * m + (cy + dy) % m;
                    if !candidates[..count].contains(&c) {
                        candidates[count] = c;
                        count += 1;
                    }
                }
            }
            candidates[..count].sort_unstable();

            let mut sum = 0.0;
            let mut j_local = Complex64::new(0.0, 0.0);
            let mut neighbors = 0usize;
            for &c in &candidates[..count] {
                for &jid in &cells[c] {
                    let jid = jid as usize;
                    if jid == i {
                        continue;
                    }
                    let dx = min_image(ensemble.x[jid][0] - ensemble.x[i][0]);
                    let dy = min_image(ensemble.x[jid][1] - ensemble.x[i][1]);
                    if dx * dx + dy * dy < *r2 {
                        let tj = ensemble.theta[jid];
                        match params.form {
                            AlignmentForm::ClampedSum => sum += (2.0 * (tj - ti)).sin(),
                            AlignmentForm::ClampedCurrent => {
                                j_local += Complex64::new((2.0 * tj).cos(), (2.0 * tj).sin());
                                neighbors += 1;
                            }
                        }
                    }
                }
            }
            match params.form {
                AlignmentForm::ClampedSum => params.gamma * clamp(sum, bound),
                AlignmentForm::ClampedCurrent => {
                    let current = NematicCurrent::from_sum(j_local, neighbors);
                    crate::interaction::director_form_rate(&current, ti, bound, params.gamma)
                }
            }
        }
    }
}

/// One synchronous Euler step: torque and displacement read the pre-step
/// configuration; the angle gains torque*dt plus uniform noise of variance
/// sigma^2 dt, then reverses with probability 1 - exp(-lambda dt); the
/// position moves along the pre-step orientation.
pub fn step_agents(
    ensemble: &AgentEnsemble,
    params: &AgentParams,
    dt: f64,
) -> Result<AgentEnsemble, AgentError> {
    params.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(AgentError::BadTimeStep(dt));
    }
    if params.lambda * dt > 0.1 {
        return Err(AgentError::ReversalResolution(params.lambda * dt));
    }
    if ensemble.n() == 0 {
        return Err(AgentError::EmptyEnsemble);
    }

    let active_alignment = params.gamma != 0.0;
    let nb = if active_alignment {
        Some(build_neighborhoods(ensemble, params))
    } else {
        None
    };
    let p_rev = 1.0 - (-params.lambda * dt).exp();
    let half_width = (3.0 * dt).sqrt() * params.sigma;
    let seed = ensemble.seed;
    let step = ensemble.step_index;

    let updates: Vec<([f64; 2], f64, bool)> = (0..ensemble.n())
        .into_par_iter()
        .map(|i| {
            let torque_i = match &nb {
                Some(nb) => torque(i, ensemble, params, nb),
                None => 0.0,
            };
            let noise = rng::uniform_symmetric(seed, i as u64, step, DRAW_NOISE, half_width);
            let mut theta_new = wrap_angle(ensemble.theta[i] + torque_i * dt + noise);
            let reversed = p_rev > 0.0
                && rng::uniform01(seed, i as u64, step, DRAW_REVERSAL) < p_rev;
            if reversed {
                theta_new = wrap_angle(theta_new + PI);
            }
            let told = ensemble.theta[i];
            let x_new = [
                wrap_unit(ensemble.x[i][0] + params.v0 * told.cos() * dt),
                wrap_unit(ensemble.x[i][1] + params.v0 * told.sin() * dt),
            ];
            (x_new, theta_new, reversed)
        })
        .collect();

    let mut out = AgentEnsemble {
        x: Vec::with_capacity(ensemble.n()),
        theta: Vec::with_capacity(ensemble.n()),
        t: ensemble.t + dt,
        seed,
        step_index: step + 1,
        reversals: ensemble.reversals.clone(),
    };
    for (i, (x_new, theta_new, reversed)) in updates.into_iter().enumerate() {
        out.x.push(x_new);
        out.theta.push(theta_new);
        if reversed {
            out.reversals[i] += 1;
        }
    }
    Ok(out)
}

/// Empirical kinetic density: each agent deposits 1/(N cellvolume) into its
/// (x, theta) cell, so the result integrates to exactly one.
pub fn bin_density(ensemble: &AgentEnsemble, grid: GridSpec) -> KineticField {
    let mut f = KineticField::zeros(grid, ensemble.t);
    let (nx, ny, nth) = (grid.nx(), grid.ny(), grid.ntheta());
    let weight = 1.0 / (ensemble.n() as f64 * grid.cell_volume());
    for (p, &t) in ensemble.x.iter().zip(ensemble.theta.iter()) {
        let i = ((p[0] * nx as f64).floor() as usize) % nx;
        let j = ((p[1] * ny as f64).floor() as usize) % ny;
        let k = (((t + PI) / grid.dtheta()).floor() as usize) % nth;
        f.values[[i, j, k]] += weight;
    }
    f
}

/// Empirical orientation density on `nbins` uniform cells of (-pi, pi],
/// normalized to integrate to one.
pub fn theta_histogram(ensemble: &AgentEnsemble, nbins: usize) -> Vec<f64> {
    let db = 2.0 * PI / nbins as f64;
    let mut h = vec![0.0; nbins];
    let weight = 1.0 / (ensemble.n() as f64 * db);
    for &t in &ensemble.theta {
        let k = (((t + PI) / db).floor() as usize) % nbins;
        h[k] += weight;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{self, GridSpec};

    fn free_params() -> AgentParams {
        AgentParams {
            gamma: 0.0,
            sigma: 0.0,
            lambda: 0.0,
            ..AgentParams::default()
        }
    }

    #[test]
    fn params_validation() {
        assert!(AgentParams::default().validate().is_ok());
        let bad = AgentParams {
            radius: 0.6,
            ..AgentParams::default()
        };
        assert!(matches!(
            bad.validate(),
            Err(AgentError::AmbiguousRadius(_))
        ));
        let bad = AgentParams {
            width: 0.0,
            ..AgentParams::default()
        };
        assert!(matches!(bad.validate(), Err(AgentError::BadParam { .. })));
        // Zero rates are legitimate (free streaming, no noise, no reversals).
        assert!(free_params().validate().is_ok());
    }

    #[test]
    fn wrap_angle_lands_in_half_open_interval() {
        for t in [-10.0, -PI, -1e-17, 0.0, 1.0, PI, 10.0, 1e4] {
            let w = wrap_angle(t);
            assert!(w > -PI && w <= PI, "wrap({t}) = {w}");
        }
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert_eq!(wrap_angle(3.0 * PI), PI);
    }

    #[test]
    fn free_streaming_is_exact() {
        let x0 = vec![[0.1, 0.2], [0.8, 0.9], [0.5, 0.5]];
        let th0 = vec![0.3, -2.0, PI];
        let mut e = AgentEnsemble::from_parts(x0.clone(), th0.clone(), 7).unwrap();
        let params = free_params();
        let dt = 0.01;
        let steps = 100;
        for _ in 0..steps {
            e = step_agents(&e, &params, dt).unwrap();
        }
        let t = steps as f64 * dt;
        for i in 0..3 {
            assert_eq!(e.theta[i], th0[i], "angles must not move");
            let want = [
                wrap_unit(x0[i][0] + params.v0 * t * th0[i].cos()),
                wrap_unit(x0[i][1] + params.v0 * t * th0[i].sin()),
            ];
            for d in 0..2 {
                assert!(
                    (e.x[i][d] - want[d]).abs() < 1e-12,
                    "agent {i} axis {d}: {} vs {}",
                    e.x[i][d],
                    want[d]
                );
            }
        }
    }

    #[test]
    fn two_agent_angle_sum_is_conserved() {
        let params = AgentParams {
            v0: 0.0,
            gamma: 1.3,
            sigma: 0.0,
            lambda: 0.0,
            radius: 0.2,
            ..AgentParams::default()
        };
        let mut e =
            AgentEnsemble::from_parts(vec![[0.5, 0.5], [0.55, 0.5]], vec![0.3, 0.9], 1).unwrap();
        let sum0 = e.theta[0] + e.theta[1];
        let dt = 1e-3;
        for k in 1..=1000 {
            e = step_agents(&e, &params, dt).unwrap();
            let sum = e.theta[0] + e.theta[1];
            assert!(
                (sum - sum0).abs() <= 1e-12 * k as f64,
                "step {k}: drift {}",
                (sum - sum0).abs()
            );
        }
        // And the pair actually aligned toward each other.
        assert!((e.theta[0] - e.theta[1]).abs() < (0.9f64 - 0.3).abs());
    }

    #[test]
    fn reversal_counts_match_poisson_band() {
        let n = 10_000;
        let params = AgentParams {
            v0: 0.0,
            gamma: 0.0,
            sigma: 0.0,
            lambda: 2.0,
            ..AgentParams::default()
        };
        let dt = 0.005f64;
        let t_end = 10.0f64;
        let steps = (t_end / dt).round() as usize;
        let mut e = AgentEnsemble::sample_uniform(n, 42).unwrap();
        for _ in 0..steps {
            e = step_agents(&e, &params, dt).unwrap();
        }
        let mean = e.reversals.iter().sum::<u64>() as f64 / n as f64;
        // Thinning gives exactly steps * (1 - exp(-lambda dt)) in mean.
        let p = 1.0 - (-params.lambda * dt).exp();
        let expect = steps as f64 * p;
        let se = (steps as f64 * p * (1.0 - p) / n as f64).sqrt();
        assert!(
            (mean - expect).abs() < 5.0 * se,
            "mean {mean} vs {expect} +- {se}"
        );
        // The wider nominal band around lambda * T = 20.
        assert!(mean > 19.0 && mean < 21.0, "mean {mean} outside [19, 21]");
    }

    #[test]
    fn reversals_do_not_move_positions() {
        let params = AgentParams {
            v0: 0.0,
            gamma: 0.0,
            sigma: 0.0,
            lambda: 40.0,
            ..AgentParams::default()
        };
        let mut e = AgentEnsemble::sample_uniform(200, 3).unwrap();
        let x0 = e.x.clone();
        for _ in 0..20 {
            e = step_agents(&e, &params, 2e-3).unwrap();
        }
        assert!(e.reversals.iter().sum::<u64>() > 0, "no reversals happened");
        assert_eq!(e.x, x0);
    }

    #[test]
    fn oversized_lambda_dt_is_rejected() {
        let params = AgentParams {
            lambda: 30.0,
            ..AgentParams::default()
        };
        let e = AgentEnsemble::sample_uniform(4, 0).unwrap();
        assert!(matches!(
            step_agents(&e, &params, 0.01),
            Err(AgentError::ReversalResolution(_))
        ));
    }

    /// Brute-force pairwise torque used as the oracle for the cell list.
    fn torque_all_pairs(e: &AgentEnsemble, params: &AgentParams, i: usize) -> f64 {
        let mut sum = 0.0;
        for j in 0..e.n() {
            if j == i {
                continue;
            }
            let dx = min_image(e.x[j][0] - e.x[i][0]);
            let dy = min_image(e.x[j][1] - e.x[i][1]);
            if dx * dx + dy * dy < params.radius * params.radius {
                sum += (2.0 * (e.theta[j] - e.theta[i])).sin();
            }
        }
        params.gamma * clamp(sum, params.bound())
    }

    #[test]
    fn cell_list_matches_brute_force() {
        for radius in [0.07, 0.21, 0.4] {
            let params = AgentParams {
                radius,
                gamma: 0.8,
                length: 0.2,
                width: 0.2,
                ..AgentParams::default()
            };
            let e = AgentEnsemble::sample_uniform(300, 5).unwrap();
            let nb = build_neighborhoods(&e, &params);
            for i in 0..e.n() {
                let fast = torque(i, &e, &params, &nb);
                let slow = torque_all_pairs(&e, &params, i);
                assert!(
                    (fast - slow).abs() < 1e-12,
                    "radius {radius}, agent {i}: {fast} vs {slow}"
                );
            }
        }
    }

    #[test]
    fn all_to_all_moment_sums_match_pairwise() {
        let params = AgentParams {
            radius: 1.0,
            gamma: 0.8,
            length: 0.2,
            width: 0.2,
            ..AgentParams::default()
        };
        // Same physics with an explicit pairwise radius covering the torus.
        let pairwise = AgentParams {
            radius: ALL_TO_ALL_RADIUS + 1e-9,
            ..params
        };
        let e = AgentEnsemble::sample_uniform(120, 9).unwrap();
        let nb = build_neighborhoods(&e, &params);
        for i in 0..e.n() {
            let fast = torque(i, &e, &params, &nb);
            let slow = torque_all_pairs(&e, &pairwise, i);
            assert!((fast - slow).abs() < 1e-10, "agent {i}: {fast} vs {slow}");
        }
    }

    #[test]
    fn director_form_relaxes_toward_local_director() {
        let params = AgentParams {
            v0: 0.0,
            gamma: 1.0,
            sigma: 0.0,
            lambda: 0.0,
            radius: 1.0,
            length: 1.0,
            width: 1.0,
            form: AlignmentForm::ClampedCurrent,
        };
        // Noise-free director dynamics reach consensus: every agent rotates
        // toward the instantaneous mean direction until the spread vanishes.
        let mut e = AgentEnsemble::from_parts(
            vec![[0.1, 0.1], [0.2, 0.2], [0.3, 0.3]],
            vec![0.5, 0.5, 0.8],
            0,
        )
        .unwrap();
        for _ in 0..400 {
            e = step_agents(&e, &params, 5e-3).unwrap();
        }
        let spread = e
            .theta
            .iter()
            .map(|t| e.theta.iter().map(|s| (t - s).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        assert!(spread < 1e-3, "angles {:?} did not reach consensus", e.theta);
        assert!(
            e.theta[0] > 0.5 && e.theta[0] < 0.8,
            "consensus {} escaped the initial hull",
            e.theta[0]
        );
    }

    #[test]
    fn trajectories_do_not_depend_on_thread_count() {
        let params = AgentParams {
            radius: 0.3,
            length: 0.3,
            width: 0.3,
            ..AgentParams::default()
        };
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                let mut e = AgentEnsemble::sample_uniform(500, 11).unwrap();
                for _ in 0..5 {
                    e = step_agents(&e, &params, 2e-3).unwrap();
                }
                e
            })
        };
        let a = run(1);
        let b = run(4);
        for i in 0..a.n() {
            assert_eq!(a.x[i][0].to_bits(), b.x[i][0].to_bits());
            assert_eq!(a.x[i][1].to_bits(), b.x[i][1].to_bits());
            assert_eq!(a.theta[i].to_bits(), b.theta[i].to_bits());
        }
        assert_eq!(a.reversals, b.reversals);
    }

    #[test]
    fn binning_uniform_agents_matches_isotropic_density() {
        let n = 1_000_000;
        let e = AgentEnsemble::sample_uniform(n, 17).unwrap();
        let grid = GridSpec::new(8, 8, 8).unwrap();
        let f = bin_density(&e, grid);

        let mass: f64 = f.values.sum() * grid.cell_volume();
        assert!((mass - 1.0).abs() < 1e-12, "mass {mass}");

        // Binomial standard error per cell, translated into density units.
        let cells = 8.0 * 8.0 * 8.0;
        let p = 1.0 / cells;
        let count_se = (n as f64 * p * (1.0 - p)).sqrt();
        let density_se = count_se / (n as f64 * grid.cell_volume());
        let target = 1.0 / (2.0 * PI);
        for v in f.values.iter() {
            assert!(
                (v - target).abs() < 5.0 * density_se,
                "cell density {v} vs {target} +- {density_se}"
            );
        }
    }

    #[test]
    fn binning_concentrated_agents_fills_one_cell() {
        let grid = GridSpec::new(4, 4, 4).unwrap();
        let e = AgentEnsemble::from_parts(
            vec![[0.1, 0.1]; 50],
            vec![0.1; 50],
            0,
        )
        .unwrap();
        let f = bin_density(&e, grid);
        let mut nonzero = 0;
        for &v in f.values.iter() {
            if v != 0.0 {
                nonzero += 1;
                assert!((v - 1.0 / grid.cell_volume()).abs() < 1e-9);
            }
        }
        assert_eq!(nonzero, 1);
        let spatial = grid::density(&f);
        let mass: f64 = spatial.values.sum() * spatial.cell_area();
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn field_sampling_reproduces_nematic_moment() {
        let grid = GridSpec::new(8, 8, 64).unwrap();
        let f = KineticField::from_fn(grid, 0.0, |_, _, t| {
            (1.0 + 0.4 * (2.0 * t).cos()) / (2.0 * PI)
        });
        let n = 200_000;
        let e = AgentEnsemble::sample_from_field(&f, n, 23).unwrap();
        let mean: f64 = e.theta.iter().map(|t| (2.0 * t).cos()).sum::<f64>() / n as f64;
        // E[cos 2 theta] = 0.2; MC s.e. ~ sqrt(0.48/N) ~ 1.6e-3, plus an
        // O(dtheta^2) cell-quantization bias.
        assert!((mean - 0.2).abs() < 0.01, "nematic moment {mean}");
        // Positions are uniform: spatial mean near (0.5, 0.5).
        let mx: f64 = e.x.iter().map(|p| p[0]).sum::<f64>() / n as f64;
        assert!((mx - 0.5).abs() < 0.01);
    }

    #[test]
    fn sampling_rejects_mass_free_fields() {
        let grid = GridSpec::new(4, 4, 4).unwrap();
        let f = KineticField::zeros(grid, 0.0);
        assert!(matches!(
            AgentEnsemble::sample_from_field(&f, 10, 0),
            Err(AgentError::BadDensity)
        ));
    }

    #[test]
    fn theta_histogram_integrates_to_one() {
        let e = AgentEnsemble::sample_uniform(1000, 2).unwrap();
        let h = theta_histogram(&e, 16);
        let total: f64 = h.iter().sum::<f64>() * 2.0 * PI / 16.0;
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn homogeneous_ensemble_tracks_kinetic_marginal() {
        use crate::models::{self, ModelKind, ModelParams, SimState};

        // Space-homogeneous regime: v0 = 0, all-to-all coupling with
        // gamma = 1/N and bound N, noise variance 2 (unit orientation
        // diffusion), unit reversal rate. Mean-field limit: the kinetic
        // model with the local alignment rate.
        let n = 20_000;
        let grid = GridSpec::new(4, 4, 256).unwrap();
        let f0 = KineticField::from_fn(grid, 0.0, |_, _, t| {
            (1.0 + 0.6 * (2.0 * t).cos()) / (2.0 * PI)
        });
        let dt = 2e-3f64;
        let t_end = 0.2f64;
        let steps = (t_end / dt).round() as usize;

        let side = (PI / n as f64).sqrt();
        let params = AgentParams {
            v0: 0.0,
            gamma: 1.0 / n as f64,
            sigma: std::f64::consts::SQRT_2,
            lambda: 1.0,
            radius: 1.0,
            length: side,
            width: side,
            form: AlignmentForm::ClampedSum,
        };
        let mut e = AgentEnsemble::sample_from_field(&f0, n, 31).unwrap();
        for _ in 0..steps {
            e = step_agents(&e, &params, dt).unwrap();
        }

        let mut kin = SimState::new(f0);
        let kp = ModelParams::new(ModelKind::ModelI, dt);
        kin = models::run(kin, &kp, t_end, t_end, &mut []).unwrap();
        // Aggregate the kinetic orientation marginal into 16 histogram bins.
        let nbins = 16;
        let per = grid.ntheta() / nbins;
        let mut kin_bins = vec![0.0; nbins];
        for k in 0..grid.ntheta() {
            let mut avg = 0.0;
            for i in 0..grid.nx() {
                for j in 0..grid.ny() {
                    avg += kin.f.values[[i, j, k]];
                }
            }
            kin_bins[k / per] += avg / (grid.nx() * grid.ny() * per) as f64;
        }
        let h = theta_histogram(&e, nbins);
        let db = 2.0 * PI / nbins as f64;
        let l2: f64 = h
            .iter()
            .zip(kin_bins.iter())
            .map(|(a, b)| (a - b) * (a - b) * db)
            .sum::<f64>()
            .sqrt();
        // MC error at N = 2e4 is ~7e-3 in this norm; allow a generous margin.
        assert!(l2 < 0.05, "agent histogram vs kinetic marginal: L2 = {l2}");
    }
}
