//! Lattice geometry, scalar fields on it, and the field generators.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};

/// Largest number of lattice cells a grid may hold.
pub const MAX_CELLS: usize = 1 << 31;

/// Rectangular lattice with `ndim ∈ {1, 2, 3}` axes and one spacing `delta`
/// shared by every axis. Values are stored row-major (last axis fastest).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dims: [usize; 3],
    ndim: usize,
    delta: f64,
}

impl Grid {
    pub fn new(dims: &[usize], delta: f64) -> Result<Self> {
        if dims.is_empty() || dims.len() > 3 {
            return Err(Error::UnsupportedDimension(dims.len()));
        }
        if dims.contains(&0) {
            return Err(invalid!("every grid dimension must be at least 1, got {dims:?}"));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(invalid!("grid spacing must be positive and finite, got {delta}"));
        }
        let mut cells: usize = 1;
        for &d in dims {
            cells = cells
                .checked_mul(d)
                .filter(|&c| c <= MAX_CELLS)
                .ok_or_else(|| invalid!("grid {dims:?} exceeds {MAX_CELLS} cells"))?;
        }
        let mut padded = [1; 3];
        padded[..dims.len()].copy_from_slice(dims);
        Ok(Self {
            dims: padded,
            ndim: dims.len(),
            delta,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims[..self.ndim]
    }

    pub fn ndim(&self) -> usize {
        self.ndim
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Number of lattice cells.
    pub fn len(&self) -> usize {
        self.dims().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Measure δᴺ of one cell.
    pub fn cell_measure(&self) -> f64 {
        libm::pow(self.delta, self.ndim as f64)
    }

    /// Row-major strides, one per axis.
    pub fn strides(&self) -> [usize; 3] {
        let mut s = [1; 3];
        for a in (0..self.ndim.saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.dims[a + 1];
        }
        s
    }

    /// Linear index of `coords`, or `None` when outside the grid.
    pub fn index(&self, coords: &[usize]) -> Option<usize> {
        if coords.len() != self.ndim {
            return None;
        }
        let strides = self.strides();
        let mut idx = 0;
        for (a, &c) in coords.iter().enumerate() {
            if c >= self.dims[a] {
                return None;
            }
            idx += c * strides[a];
        }
        Some(idx)
    }

    /// Lattice coordinates of a linear index (unused axes are 0).
    pub fn coords(&self, mut idx: usize) -> [usize; 3] {
        let mut c = [0; 3];
        for a in (0..self.ndim).rev() {
            c[a] = idx % self.dims[a];
            idx /= self.dims[a];
        }
        c
    }

    /// The same lattice grown by `margin` cells on both sides of every axis.
    pub fn padded(&self, margin: usize) -> Result<Self> {
        let dims: Vec<usize> = self.dims().iter().map(|&d| d + 2 * margin).collect();
        Self::new(&dims, self.delta)
    }
}

/// A real value at every lattice point of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid!(
                "field has {} values but the grid has {} cells",
                values.len(),
                grid.len()
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self {
            grid,
            values: alloc::vec![value; grid.len()],
        }
    }

    /// Builds a field by evaluating `f` at each lattice coordinate.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                let c = grid.coords(i);
                f(&c[..grid.ndim()])
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, coords: &[usize]) -> Option<f64> {
        self.grid.index(coords).map(|i| self.values[i])
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `a·self + b·other`, pointwise.
    pub fn combine(&self, a: f64, other: &ScalarField, b: f64) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&x, &y)| a * x + b * y)
                .collect(),
        })
    }

    pub fn add(&self, other: &ScalarField) -> Result<Self> {
        self.combine(1.0, other, 1.0)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Unbiased (n − 1) sample variance; 0 for a single cell.
    pub fn sample_variance(&self) -> f64 {
        sample_variance(&self.values)
    }

    /// The sub-block of `shape` cells starting at `offset` on every axis.
    pub fn crop(&self, offset: usize, shape: &Grid) -> Result<Self> {
        if shape.ndim() != self.grid.ndim()
            || shape
                .dims()
                .iter()
                .zip(self.grid.dims())
                .any(|(&s, &d)| offset + s > d)
        {
            return Err(invalid!("crop of {:?} at offset {offset} does not fit", shape.dims()));
        }
        let src = self.grid.strides();
        let ndim = shape.ndim();
        Ok(Self::from_fn(*shape, |c| {
            let idx: usize = (0..ndim).map(|a| (c[a] + offset) * src[a]).sum();
            self.values[idx]
        }))
    }

    /// Places this field at `offset` inside a zero field on `outer`.
    pub fn embed(&self, offset: usize, outer: &Grid) -> Result<Self> {
        let inner = self.grid;
        if inner.ndim() != outer.ndim()
            || inner
                .dims()
                .iter()
                .zip(outer.dims())
                .any(|(&s, &d)| offset + s > d)
        {
            return Err(invalid!("field does not fit inside {:?} at offset {offset}", outer.dims()));
        }
        let mut out = Self::constant(*outer, 0.0);
        let dst = outer.strides();
        for (i, &v) in self.values.iter().enumerate() {
            let c = inner.coords(i);
            let idx: usize = (0..inner.ndim()).map(|a| (c[a] + offset) * dst[a]).sum();
            out.values[idx] = v;
        }
        Ok(out)
    }

    pub(crate) fn check_same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid != other.grid {
            return Err(invalid!(
                "grid mismatch: {:?} vs {:?}",
                self.grid.dims(),
                other.grid.dims()
            ));
        }
        Ok(())
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub(crate) fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Seed plus stream index. Each `(seed, stream)` pair drives its own ChaCha8
/// stream, so replicate `r` of a run is reproducible on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Distributional family of a statistic field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Gaussian,
    /// F-field with `alpha` numerator and `beta` denominator degrees of freedom.
    F { alpha: u32, beta: u32 },
}

/// Statistical identity of a field: the inputs the EC densities need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSpec {
    family: Family,
    lambda: f64,
}

impl FieldSpec {
    pub fn new(family: Family, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid!("smoothness lambda must be positive, got {lambda}"));
        }
        if let Family::F { alpha, beta } = family {
            if alpha == 0 || beta == 0 {
                return Err(invalid!("F degrees of freedom must be ≥ 1, got ({alpha}, {beta})"));
            }
        }
        Ok(Self { family, lambda })
    }

    pub fn gaussian(lambda: f64) -> Result<Self> {
        Self::new(Family::Gaussian, lambda)
    }

    pub fn f(alpha: u32, beta: u32, lambda: f64) -> Result<Self> {
        Self::new(Family::F { alpha, beta }, lambda)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        Self::new(self.family, lambda)
    }
}

/// IID N(0, σ_w²) value at every cell.
pub fn white_noise(grid: &Grid, sigma_w: f64, rng: RngSeed) -> Result<ScalarField> {
    if !(sigma_w > 0.0 && sigma_w.is_finite()) {
        return Err(invalid!("white noise standard deviation must be positive, got {sigma_w}"));
    }
    let mut gen = rng.rng();
    let values = (0..grid.len())
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut gen);
            sigma_w * z
        })
        .collect();
    Ok(ScalarField {
        grid: *grid,
        values,
    })
}

// Maps lattice index i on an axis of length n onto [0, 1].
fn unit_coordinate(i: usize, n: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        i as f64 / (n - 1) as f64
    }
}

/// cos(10x) + sin(8y) on the unit square, x along axis 0 and y along axis 1.
pub fn synthetic_signal(grid: &Grid) -> Result<ScalarField> {
    if grid.ndim() != 2 {
        return Err(Error::UnsupportedDimension(grid.ndim()));
    }
    let [rows, cols] = [grid.dims()[0], grid.dims()[1]];
    Ok(ScalarField::from_fn(*grid, |c| {
        let x = unit_coordinate(c[0], rows);
        let y = unit_coordinate(c[1], cols);
        libm::cos(10.0 * x) + libm::sin(8.0 * y)
    }))
}

/// A key-shaped 0/1 object with one hole: a rectangular ring with a stem
/// hanging below it. Geometry is laid out on a 60 × 37 reference lattice and
/// scaled to `grid`; its Euler characteristic is 0.
pub fn key_signal(grid: &Grid) -> Result<ScalarField> {
    if grid.ndim() != 2 {
        return Err(Error::UnsupportedDimension(grid.ndim()));
    }
    let [rows, cols] = [grid.dims()[0], grid.dims()[1]];
    if rows < 30 || cols < 19 {
        return Err(invalid!("key object needs at least a 30 × 19 grid, got {rows} × {cols}"));
    }
    let r = |a: usize| a * rows / 60;
    let c = |b: usize| b * cols / 37;
    let inside = |i: usize, j: usize, r0: usize, r1: usize, c0: usize, c1: usize| {
        (r(r0)..r(r1)).contains(&i) && (c(c0)..c(c1)).contains(&j)
    };
    Ok(ScalarField::from_fn(*grid, |p| {
        let (i, j) = (p[0], p[1]);
        let ring = inside(i, j, 3, 36, 3, 34) && !inside(i, j, 11, 28, 10, 27);
        let stem = inside(i, j, 36, 57, 14, 23);
        if ring || stem {
            1.0
        } else {
            0.0
        }
    }))
}

/// Covariance min(x, y) of standard Brownian motion, for x, y ≥ 0.
pub fn brownian_covariance(x: f64, y: f64) -> f64 {
    x.min(y)
}

/// Pointwise statistic built from IID unit-variance Gaussian component fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivedKind {
    /// Σᵢ Xᵢ² over `m` components.
    ChiSquared(u32),
    /// X₀ / sqrt(Σᵢ₌₁..ₘ Xᵢ² / m) over `m + 1` components, numerator first.
    T(u32),
    /// (Σ Xⱼ² / α) / (Σ Yⱼ² / β) over `α + β` components, numerator first.
    F(u32, u32),
}

impl DerivedKind {
    pub fn component_count(&self) -> usize {
        match *self {
            DerivedKind::ChiSquared(m) => m as usize,
            DerivedKind::T(m) => m as usize + 1,
            DerivedKind::F(a, b) => a as usize + b as usize,
        }
    }
}

/// A derived statistic field. `degenerate` is set when some denominator was
/// exactly zero; those cells hold ±∞.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedField {
    pub field: ScalarField,
    pub degenerate: bool,
}

pub fn derived_field(kind: DerivedKind, components: &[ScalarField]) -> Result<DerivedField> {
    let (n_num, n_den) = match kind {
        DerivedKind::ChiSquared(m) => (m as usize, 0),
        DerivedKind::T(m) => (1, m as usize),
        DerivedKind::F(a, b) => (a as usize, b as usize),
    };
    if n_num == 0 || (matches!(kind, DerivedKind::T(_) | DerivedKind::F(..)) && n_den == 0) {
        return Err(invalid!("{kind:?} needs positive degrees of freedom"));
    }
    if components.len() != kind.component_count() {
        return Err(invalid!(
            "{kind:?} needs {} component fields, got {}",
            kind.component_count(),
            components.len()
        ));
    }
    let first = &components[0];
    for c in &components[1..] {
        first.check_same_grid(c)?;
    }
    let sum_sq = |fields: &[ScalarField], i: usize| -> f64 {
        fields.iter().map(|f| f.values[i] * f.values[i]).sum()
    };
    let mut degenerate = false;
    let mut ratio = |num: f64, den: f64| -> f64 {
        if den == 0.0 {
            degenerate = true;
            if num < 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        } else {
            num / den
        }
    };
    let values = (0..first.values.len())
        .map(|i| match kind {
            DerivedKind::ChiSquared(_) => sum_sq(components, i),
            DerivedKind::T(m) => {
                let den = libm::sqrt(sum_sq(&components[1..], i) / m as f64);
                ratio(components[0].values[i], den)
            }
            DerivedKind::F(a, b) => {
                let num = sum_sq(&components[..n_num], i) / a as f64;
                let den = sum_sq(&components[n_num..], i) / b as f64;
                ratio(num, den)
            }
        })
        .collect();
    Ok(DerivedField {
        field: ScalarField {
            grid: first.grid,
            values,
        },
        degenerate,
    })
}

/// Riemann sum Σ values · δᴺ.
pub fn field_integral(field: &ScalarField) -> f64 {
    field.values.iter().sum::<f64>() * field.grid.cell_measure()
}

/// Forward difference `(Y[i+1] − Y[i]) / δ` along `axis`; the output is one
/// cell shorter on that axis.
pub fn finite_difference(field: &ScalarField, axis: usize) -> Result<ScalarField> {
    let grid = field.grid;
    if axis >= grid.ndim() {
        return Err(invalid!("axis {axis} out of range for a {}-D field", grid.ndim()));
    }
    if grid.dims()[axis] < 2 {
        return Err(invalid!("finite difference needs at least 2 cells along axis {axis}"));
    }
    let mut dims: Vec<usize> = grid.dims().to_vec();
    dims[axis] -= 1;
    let out_grid = Grid::new(&dims, grid.delta())?;
    let stride = grid.strides()[axis];
    let src = grid.strides();
    let inv_delta = 1.0 / grid.delta();
    let ndim = grid.ndim();
    Ok(ScalarField::from_fn(out_grid, |c| {
        let idx: usize = (0..ndim).map(|a| c[a] * src[a]).sum();
        (field.values[idx + stride] - field.values[idx]) * inv_delta
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn grid2(r: usize, c: usize) -> Grid {
        Grid::new(&[r, c], 1.0).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(&[], 1.0).is_err());
        assert!(Grid::new(&[2, 2, 2, 2], 1.0).is_err());
        assert!(Grid::new(&[3, 0], 1.0).is_err());
        assert!(Grid::new(&[3], 0.0).is_err());
        assert!(Grid::new(&[3], -1.0).is_err());
        assert!(Grid::new(&[1 << 16, 1 << 16], 1.0).is_err());
        let g = Grid::new(&[2, 3, 4], 0.5).unwrap();
        assert_eq!(g.len(), 24);
        assert_eq!(g.strides(), [12, 4, 1]);
        assert_eq!(g.index(&[1, 2, 3]), Some(23));
        assert_eq!(g.coords(23), [1, 2, 3]);
        assert_eq!(g.cell_measure(), 0.125);
        assert_eq!(g.index(&[2, 0, 0]), None);
    }

    #[test]
    fn white_noise_moments() {
        let g = grid2(101, 101);
        let w = white_noise(&g, 0.4, RngSeed::new(7, 0)).unwrap();
        let tol = 4.0 / (g.len() as f64).sqrt();
        assert!(w.mean().abs() < tol);
        assert!((w.sample_variance().sqrt() - 0.4).abs() < tol);
    }

    #[test]
    fn white_noise_is_deterministic_per_stream() {
        let g = grid2(20, 20);
        let a = white_noise(&g, 1.0, RngSeed::new(3, 5)).unwrap();
        let b = white_noise(&g, 1.0, RngSeed::new(3, 5)).unwrap();
        let c = white_noise(&g, 1.0, RngSeed::new(3, 6)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn white_noise_rejects_bad_sigma() {
        let g = grid2(2, 2);
        assert!(matches!(
            white_noise(&g, 0.0, RngSeed::default()),
            Err(Error::InvalidParameter(_))
        ));
        assert!(white_noise(&g, -1.0, RngSeed::default()).is_err());
    }

    #[test]
    fn pointwise_false_positive_rate() {
        let g = grid2(100, 100);
        let w = white_noise(&g, 1.0, RngSeed::new(11, 0)).unwrap();
        let frac = w.values().iter().filter(|&&v| v > 1.64).count() as f64 / g.len() as f64;
        assert!((frac - 0.05).abs() < 0.007, "{frac}");
    }

    #[test]
    fn distinct_cells_are_uncorrelated() {
        let g = grid2(4, 4);
        let n = 4000;
        let (mut a, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for r in 0..n as u64 {
            let w = white_noise(&g, 1.0, RngSeed::new(1, r)).unwrap();
            a.push(w.values()[5]);
            b.push(w.values()[6]);
        }
        let (ma, mb) = (mean(&a), mean(&b));
        let cov: f64 = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (n - 1) as f64;
        let corr = cov / (sample_variance(&a) * sample_variance(&b)).sqrt();
        assert!(corr.abs() < 4.0 / (n as f64).sqrt(), "{corr}");
    }

    #[test]
    fn synthetic_signal_values() {
        let g = grid2(101, 101);
        let s = synthetic_signal(&g).unwrap();
        assert_eq!(s.get(&[0, 0]), Some(1.0));
        assert!(s.values().iter().all(|v| (-2.0..=2.0).contains(v)));
        // Lattice point nearest x = π/10 on the 101-point axis is i = 31 (x = 0.31).
        let want = libm::cos(3.1) + libm::sin(0.0);
        assert!((s.get(&[31, 0]).unwrap() - want).abs() < 1e-15);
        assert!((want - -0.999_135_150_273_279_5).abs() < 1e-15);
        assert!(matches!(
            synthetic_signal(&Grid::new(&[5], 1.0).unwrap()),
            Err(Error::UnsupportedDimension(1))
        ));
    }

    #[test]
    fn derived_fields() {
        let g = grid2(10, 10);
        let x = white_noise(&g, 1.0, RngSeed::new(1, 0)).unwrap();
        let y = white_noise(&g, 1.0, RngSeed::new(1, 1)).unwrap();
        let chi = derived_field(DerivedKind::ChiSquared(1), &[x.clone()]).unwrap();
        for (c, v) in chi.field.values().iter().zip(x.values()) {
            assert_eq!(*c, v * v);
        }
        let f = derived_field(DerivedKind::F(1, 1), &[x.clone(), y.clone()]).unwrap();
        assert!(f.field.values().iter().all(|&v| v >= 0.0));
        assert!(!f.degenerate);
        let t = derived_field(DerivedKind::T(1), &[x.clone(), y.clone()]).unwrap();
        for ((tv, xv), yv) in t.field.values().iter().zip(x.values()).zip(y.values()) {
            assert!((tv - xv / yv.abs()).abs() < 1e-12);
        }
        assert!(derived_field(DerivedKind::ChiSquared(2), &[x.clone()]).is_err());
        let other = white_noise(&grid2(5, 5), 1.0, RngSeed::default()).unwrap();
        assert!(derived_field(DerivedKind::ChiSquared(2), &[x, other]).is_err());
    }

    #[test]
    fn f_zero_denominator_is_flagged() {
        let g = grid2(2, 2);
        let num = ScalarField::constant(g, 1.0);
        let den = ScalarField::new(g, vec![1.0, 0.0, 2.0, 1.0]).unwrap();
        let f = derived_field(DerivedKind::F(1, 1), &[num, den]).unwrap();
        assert!(f.degenerate);
        assert_eq!(f.field.values()[1], f64::INFINITY);
        assert_eq!(f.field.values()[2], 0.25);
    }

    #[test]
    fn chi_squared_mean() {
        let g = grid2(100, 100);
        let comps: Vec<_> = (0..4)
            .map(|s| white_noise(&g, 1.0, RngSeed::new(9, s)).unwrap())
            .collect();
        let chi = derived_field(DerivedKind::ChiSquared(4), &comps).unwrap();
        assert!((chi.field.mean() - 4.0).abs() < 0.2);
        // Sum of the single-component χ² fields, exactly.
        let mut sum = ScalarField::constant(g, 0.0);
        for c in &comps {
            let one = derived_field(DerivedKind::ChiSquared(1), core::slice::from_ref(c)).unwrap();
            sum = sum.add(&one.field).unwrap();
        }
        assert_eq!(sum, chi.field);
    }

    #[test]
    fn integrals() {
        assert_eq!(field_integral(&ScalarField::constant(grid2(10, 10), 1.0)), 100.0);
        let g = Grid::new(&[3, 4, 5], 0.5).unwrap();
        assert!((field_integral(&ScalarField::constant(g, 2.5)) - 2.5 * 60.0 * 0.125).abs() < 1e-12);
    }

    #[test]
    fn finite_differences() {
        let g = grid2(4, 6);
        let ramp = ScalarField::from_fn(g, |c| c[1] as f64);
        let d = finite_difference(&ramp, 1).unwrap();
        assert_eq!(d.grid().dims(), &[4, 5]);
        assert!(d.values().iter().all(|&v| v == 1.0));
        let d0 = finite_difference(&ramp, 0).unwrap();
        assert!(d0.values().iter().all(|&v| v == 0.0));
        assert!(finite_difference(&ramp, 2).is_err());
        let flat = ScalarField::constant(Grid::new(&[1, 5], 1.0).unwrap(), 0.0);
        assert!(finite_difference(&flat, 0).is_err());
        let scaled = ScalarField::from_fn(Grid::new(&[5], 0.5).unwrap(), |c| c[0] as f64 * 0.5);
        assert!(finite_difference(&scaled, 0).unwrap().values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn crop_and_embed_round_trip() {
        let g = grid2(3, 4);
        let f = ScalarField::from_fn(g, |c| (c[0] * 10 + c[1]) as f64);
        let big = f.embed(2, &g.padded(2).unwrap()).unwrap();
        assert_eq!(big.get(&[2, 2]), Some(0.0));
        assert_eq!(big.get(&[0, 0]), Some(0.0));
        assert_eq!(big.crop(2, &g).unwrap(), f);
    }

    #[test]
    fn brownian_covariance_is_min() {
        assert_eq!(brownian_covariance(0.3, 0.7), 0.3);
        assert_eq!(brownian_covariance(2.0, 2.0), 2.0);
    }

    proptest! {
        #[test]
        fn integration_is_linear(a in -5.0f64..5.0, b in -5.0f64..5.0, seed in 0u64..1000) {
            let g = grid2(7, 9);
            let x = white_noise(&g, 1.0, RngSeed::new(seed, 0)).unwrap();
            let y = white_noise(&g, 2.0, RngSeed::new(seed, 1)).unwrap();
            let lhs = field_integral(&x.combine(a, &y, b).unwrap());
            let rhs = a * field_integral(&x) + b * field_integral(&y);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs().max(rhs.abs())));
        }
    }
}
