//! Internal FFT plumbing shared by grid operations, steppers, and diagnostics.
//!
//! All transforms are plain complex DFTs along one axis of a 3D array.
//! Forward transforms are unnormalized; inverse transforms divide by the
//! axis length, so a forward/inverse pair is the identity up to round-off.

use ndarray::{Array2, Array3, Axis};
use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::sync::Arc;

/// Forward/inverse plan pair for one axis length.
pub(crate) struct AxisFft {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    len: usize,
}

impl AxisFft {
    pub(crate) fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        AxisFft {
            forward: planner.plan_fft(len, FftDirection::Forward),
            inverse: planner.plan_fft(len, FftDirection::Inverse),
            len,
        }
    }

    pub(crate) fn forward_axis(&self, data: &mut Array3<Complex64>, axis: usize) {
        self.process_axis(data, axis, false);
    }

    pub(crate) fn inverse_axis(&self, data: &mut Array3<Complex64>, axis: usize) {
        self.process_axis(data, axis, true);
    }

    /// Gathers all 1D lanes along `axis` into one buffer, runs the batched
    /// transform, and scatters back. Lane order is the deterministic
    /// row-major order of `lanes`, so results are bitwise reproducible.
    fn process_axis(&self, data: &mut Array3<Complex64>, axis: usize, inverse: bool) {
        assert_eq!(data.shape()[axis], self.len, "axis length does not match plan");
        let mut buf: Vec<Complex64> = Vec::with_capacity(data.len());
        for lane in data.lanes(Axis(axis)) {
            buf.extend(lane.iter());
        }
        if inverse {
            self.inverse.process(&mut buf);
        } else {
            self.forward.process(&mut buf);
        }
        let scale = 1.0 / self.len as f64;
        let mut offset = 0;
        for mut lane in data.lanes_mut(Axis(axis)) {
            for (dst, src) in lane.iter_mut().zip(&buf[offset..offset + self.len]) {
                *dst = if inverse { *src * scale } else { *src };
            }
            offset += self.len;
        }
    }
}

/// One-shot transform along an axis; plans are rebuilt per call, which is
/// fine outside stepping loops. Steppers cache `AxisFft` instances instead.
pub(crate) fn fft_axis(data: &mut Array3<Complex64>, axis: usize, inverse: bool) {
    let fft = AxisFft::new(data.shape()[axis]);
    if inverse {
        fft.inverse_axis(data, axis);
    } else {
        fft.forward_axis(data, axis);
    }
}

pub(crate) fn fft2_scalar(data: &mut Array2<Complex64>, inverse: bool) {
    let (nx, ny) = data.dim();
    let mut cube = Array3::zeros((nx, ny, 1));
    cube.index_axis_mut(Axis(2), 0).assign(data);
    fft_axis(&mut cube, 0, inverse);
    fft_axis(&mut cube, 1, inverse);
    data.assign(&cube.index_axis(Axis(2), 0));
}

pub(crate) fn to_complex3(values: &Array3<f64>) -> Array3<Complex64> {
    values.mapv(|v| Complex64::new(v, 0.0))
}

pub(crate) fn real_part3(values: &Array3<Complex64>) -> Array3<f64> {
    values.mapv(|v| v.re)
}

pub(crate) fn to_complex2(values: &Array2<f64>) -> Array2<Complex64> {
    values.mapv(|v| Complex64::new(v, 0.0))
}

/// Signed integer frequency for index `i` of an `n`-point DFT:
/// 0, 1, ..., n/2, -(n/2 - 1), ..., -1.
pub(crate) fn freq_index(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Angular wavenumber on the unit-period spatial axes.
pub(crate) fn wavenumber_x(i: usize, n: usize) -> f64 {
    2.0 * std::f64::consts::PI * freq_index(i, n) as f64
}

/// Angular wavenumber on the 2*pi-period orientation axis.
pub(crate) fn wavenumber_theta(i: usize, n: usize) -> f64 {
    freq_index(i, n) as f64
}

/// True when mode `i` survives the 2/3 dealiasing rule for axis length `n`.
pub(crate) fn keep_mode(i: usize, n: usize) -> bool {
    3 * freq_index(i, n).unsigned_abs() as usize <= n
}

/// Trigonometric node tables with exact half-turn symmetry:
/// `cos_t[j + n/2] == -cos_t[j]` bitwise (same for `sin_t`), and the
/// double-angle tables repeat bitwise. Steppers rely on this so that the
/// half-turn orientation shift commutes with every multiplier exactly.
#[derive(Debug, Clone)]
pub(crate) struct ThetaTables {
    pub cos_t: Vec<f64>,
    pub sin_t: Vec<f64>,
    pub cos_2t: Vec<f64>,
    pub sin_2t: Vec<f64>,
}

impl ThetaTables {
    pub(crate) fn new(ntheta: usize) -> Self {
        assert!(ntheta >= 4 && ntheta % 2 == 0);
        let half = ntheta / 2;
        let mut cos_t = vec![0.0; ntheta];
        let mut sin_t = vec![0.0; ntheta];
        let mut cos_2t = vec![0.0; ntheta];
        let mut sin_2t = vec![0.0; ntheta];
        for j in 0..half {
            let theta = theta_node(j, ntheta);
            cos_t[j] = theta.cos();
            sin_t[j] = theta.sin();
            cos_2t[j] = (2.0 * theta).cos();
            sin_2t[j] = (2.0 * theta).sin();
            cos_t[j + half] = -cos_t[j];
            sin_t[j + half] = -sin_t[j];
            cos_2t[j + half] = cos_2t[j];
            sin_2t[j + half] = sin_2t[j];
        }
        ThetaTables { cos_t, sin_t, cos_2t, sin_2t }
    }
}

pub(crate) fn theta_node(j: usize, ntheta: usize) -> f64 {
    use std::f64::consts::PI;
    -PI + 2.0 * PI * j as f64 / ntheta as f64
}
