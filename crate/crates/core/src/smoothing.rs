//! Isotropic Gaussian kernel smoothing on the lattice.
//!
//! Kernels are one-dimensional tap vectors applied separably along every
//! axis. Convolution is "same" size with zero padding outside the grid, so
//! cells within the truncation radius of a boundary lose part of the kernel
//! mass: smoothed constants sag toward 0 there, and every output value lies in
//! the convex hull of the input values together with 0.

use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::error::{invalid, Result};
use crate::grid::{Grid, ScalarField, MAX_CELLS};

/// The quantity a smoothing scale is specified by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothness {
    Sigma(f64),
    Fwhm(f64),
    Lambda(f64),
}

/// Mutually consistent kernel scale σ, its FWHM = σ·sqrt(8 ln 2) and the
/// smoothness λ = 1/(2σ²) = 4 ln 2 / FWHM² of unit-variance smoothed noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessParams {
    sigma: f64,
    fwhm: f64,
    lambda: f64,
}

impl SmoothnessParams {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn fwhm(&self) -> f64 {
        self.fwhm
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

pub fn smoothness_params(input: Smoothness) -> Result<SmoothnessParams> {
    let value = match input {
        Smoothness::Sigma(v) | Smoothness::Fwhm(v) | Smoothness::Lambda(v) => v,
    };
    if !(value > 0.0 && value.is_finite()) {
        return Err(invalid!("{input:?} must be positive and finite"));
    }
    let fwhm_per_sigma = libm::sqrt(8.0 * LN_2);
    Ok(match input {
        Smoothness::Sigma(sigma) => SmoothnessParams {
            sigma,
            fwhm: sigma * fwhm_per_sigma,
            lambda: 1.0 / (2.0 * sigma * sigma),
        },
        Smoothness::Fwhm(fwhm) => SmoothnessParams {
            sigma: fwhm / fwhm_per_sigma,
            fwhm,
            lambda: 4.0 * LN_2 / (fwhm * fwhm),
        },
        Smoothness::Lambda(lambda) => SmoothnessParams {
            sigma: 1.0 / libm::sqrt(2.0 * lambda),
            fwhm: libm::sqrt(4.0 * LN_2 / lambda),
            lambda,
        },
    })
}

/// Symmetric, unit-mass, odd-length kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel1D {
    taps: Vec<f64>,
    scale_sigma: f64,
    radius: usize,
}

impl Kernel1D {
    /// The single-tap kernel `[1.0]`: smoothing with it is a no-op.
    pub fn identity() -> Self {
        Self {
            taps: alloc::vec![1.0],
            scale_sigma: 0.0,
            radius: 0,
        }
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// σ in grid units (0 for the identity kernel).
    pub fn scale_sigma(&self) -> f64 {
        self.scale_sigma
    }

    /// Taps span offsets `-radius..=radius`.
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Tap at a signed lattice offset, 0 outside the support.
    pub fn at(&self, offset: isize) -> f64 {
        let r = self.radius as isize;
        if offset < -r || offset > r {
            0.0
        } else {
            self.taps[(offset + r) as usize]
        }
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.taps.iter().map(|t| t * t).sum()
    }
}

/// Samples exp(−(kδ)²/(2σ²)) for k in −R..=R with R = ⌈4σ/δ⌉ and rescales the
/// taps to sum to 1.
pub fn gaussian_kernel_1d(params: &SmoothnessParams, delta: f64) -> Result<Kernel1D> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid!("lattice spacing must be positive, got {delta}"));
    }
    let s = params.sigma / delta;
    let radius = libm::ceil(4.0 * s);
    if !radius.is_finite() || radius > ((MAX_CELLS - 1) / 2) as f64 {
        return Err(invalid!("kernel σ/δ = {s} needs more taps than a grid can address"));
    }
    let radius = (radius as usize).max(1);
    let inv = 1.0 / (2.0 * s * s);
    let mut taps: Vec<f64> = (0..=2 * radius)
        .map(|t| {
            let k = t as f64 - radius as f64;
            libm::exp(-k * k * inv)
        })
        .collect();
    let total: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= total;
    }
    Ok(Kernel1D {
        taps,
        scale_sigma: s,
        radius,
    })
}

/// Separable same-size convolution of `field` with `kernel` along every axis.
pub fn smooth(field: &ScalarField, kernel: &Kernel1D) -> Result<ScalarField> {
    let grid = *field.grid();
    for (axis, &d) in grid.dims().iter().enumerate() {
        if kernel.len() > 2 * d + 1 {
            return Err(invalid!(
                "kernel of {} taps is longer than 2·{d}+1 on axis {axis}",
                kernel.len()
            ));
        }
    }
    let mut current = field.values().to_vec();
    let mut next = alloc::vec![0.0; current.len()];
    let mut line = Vec::new();
    for axis in 0..grid.ndim() {
        convolve_axis(&current, &grid, axis, kernel, &mut next, &mut line);
        core::mem::swap(&mut current, &mut next);
    }
    ScalarField::new(grid, current)
}

/// Applies [`smooth`] `iterations` times.
pub fn smooth_iterated(field: &ScalarField, kernel: &Kernel1D, iterations: usize) -> Result<ScalarField> {
    let mut out = field.clone();
    for _ in 0..iterations {
        out = smooth(&out, kernel)?;
    }
    Ok(out)
}

fn convolve_axis(src: &[f64], grid: &Grid, axis: usize, kernel: &Kernel1D, dst: &mut [f64], line: &mut Vec<f64>) {
    let dims = grid.dims();
    let n = dims[axis];
    let stride: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let taps = kernel.taps();
    let r = kernel.radius();
    line.resize(n, 0.0);
    for o in 0..outer {
        for s in 0..stride {
            let base = o * n * stride + s;
            for (i, v) in line.iter_mut().enumerate() {
                *v = src[base + i * stride];
            }
            for i in 0..n {
                // Source index j = i + t − r must land in [0, n).
                let t_lo = r.saturating_sub(i);
                let t_hi = (2 * r).min(r + n - 1 - i);
                let mut acc = 0.0;
                for t in t_lo..=t_hi {
                    acc += taps[t] * line[i + t - r];
                }
                dst[base + i * stride] = acc;
            }
        }
    }
}

/// Σᵢ K(x − i)·K(y − i) over the `n` sites `0..n` of one axis.
pub(crate) fn axis_cross(kernel: &Kernel1D, n: usize, x: usize, y: usize) -> f64 {
    let r = kernel.radius();
    let lo = x.max(y).saturating_sub(r);
    let hi = (x.min(y) + r).min(n.saturating_sub(1));
    if lo > hi {
        return 0.0;
    }
    (lo..=hi)
        .map(|i| kernel.at(x as isize - i as isize) * kernel.at(y as isize - i as isize))
        .sum()
}

/// Covariance between cells `x` and `y` of `smooth(white_noise(grid, σ_w))`:
/// σ_w² Σᵢ K(x − xᵢ)K(y − xᵢ) over every lattice site xᵢ of `grid`, with K the
/// separable product kernel.
pub fn smoothed_noise_covariance(
    kernel: &Kernel1D,
    sigma_w: f64,
    x: &[usize],
    y: &[usize],
    grid: &Grid,
) -> Result<f64> {
    if grid.index(x).is_none() || grid.index(y).is_none() {
        return Err(invalid!("points {x:?} and {y:?} must lie inside grid {:?}", grid.dims()));
    }
    let product: f64 = grid
        .dims()
        .iter()
        .enumerate()
        .map(|(a, &n)| axis_cross(kernel, n, x[a], y[a]))
        .product();
    Ok(sigma_w * sigma_w * product)
}
