//! Excursion sets and their topology on the lattice.
//!
//! A mask is read as a union of closed unit cells (pixels or voxels). Cells
//! sharing only a corner are therefore connected, so foreground connectivity
//! is 8-adjacency in 2D and 26-adjacency in 3D throughout this module.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::grid::{Grid, ScalarField};

#[derive(Debug, Clone, PartialEq)]
pub struct BinaryMask {
    grid: Grid,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(grid: Grid, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != grid.len() {
            return Err(invalid!("mask has {} bits for a grid of {} cells", bits.len(), grid.len()));
        }
        Ok(Self { grid, bits })
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(&[usize]) -> bool) -> Self {
        let bits = (0..grid.len()).map(|i| f(&grid.coords(i)[..grid.ndim()])).collect();
        Self { grid, bits }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, coords: &[usize]) -> Option<bool> {
        self.grid.index(coords).map(|i| self.bits[i])
    }

    /// Number of true cells.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Cells strictly above `h`.
pub fn excursion_set(field: &ScalarField, h: f64) -> BinaryMask {
    BinaryMask {
        grid: *field.grid(),
        bits: field.values().iter().map(|&v| v > h).collect(),
    }
}

/// Face counts of the closed cubical complex spanned by a mask:
/// `counts[k]` is the number of k-dimensional elements (vertices, edges,
/// squares, cubes).
pub fn cubical_counts(mask: &BinaryMask) -> [u64; 4] {
    let grid = mask.grid();
    let nd = grid.ndim();
    let n = grid.dims();
    // Surround the mask with a false border so neighbour lookups never leave it.
    let mut pdims = [1usize; 3];
    for a in 0..nd {
        pdims[a] = n[a] + 2;
    }
    let pstride = [pdims[1] * pdims[2], pdims[2], 1];
    let mut padded = alloc::vec![false; pdims.iter().product()];
    for (i, &b) in mask.bits().iter().enumerate() {
        if b {
            let c = grid.coords(i);
            let mut p = 0;
            for a in 0..3 {
                p += (c[a] + usize::from(a < nd)) * pstride[a];
            }
            padded[p] = true;
        }
    }

    let mut counts = [0u64; 4];
    // Each subset of axes along which an element has extent (bit set) is one
    // family of elements. Along a cell axis the element sits on cell k
    // (padded k+1); along a boundary axis it sits on the plane between cells
    // k-1 and k (padded k and k+1), for k in 0..=n.
    for subset in 0u32..(1 << nd) {
        let dim = subset.count_ones() as usize;
        let mut extent = [1usize; 3];
        let mut base_shift = [0usize; 3];
        let mut neighbours: Vec<usize> = alloc::vec![0];
        for a in 0..nd {
            if subset & (1 << a) != 0 {
                extent[a] = n[a];
                base_shift[a] = 1;
            } else {
                extent[a] = n[a] + 1;
                let with: Vec<usize> = neighbours.iter().map(|o| o + pstride[a]).collect();
                neighbours.extend(with);
            }
        }
        let mut count = 0u64;
        for i in 0..extent[0] {
            for j in 0..extent[1] {
                for k in 0..extent[2] {
                    let pos = [i, j, k];
                    let mut p = 0;
                    for a in 0..3 {
                        p += (pos[a] + base_shift[a]) * pstride[a];
                    }
                    if neighbours.iter().any(|&o| padded[p + o]) {
                        count += 1;
                    }
                }
            }
        }
        counts[dim] += count;
    }
    counts
}

/// χ = V − E + F (2D) or V − E + F − C (3D) of the closed-cell union.
pub fn euler_characteristic(mask: &BinaryMask) -> Result<i64> {
    match mask.grid().ndim() {
        2 | 3 => {
            let c = cubical_counts(mask);
            Ok(c[0] as i64 - c[1] as i64 + c[2] as i64 - c[3] as i64)
        }
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// Number of maximal runs of true cells in a 1D mask, its Euler characteristic.
pub fn run_count(mask: &BinaryMask) -> Result<i64> {
    if mask.grid().ndim() != 1 {
        return Err(Error::UnsupportedDimension(mask.grid().ndim()));
    }
    let bits = mask.bits();
    let starts = (0..bits.len()).filter(|&i| bits[i] && (i == 0 || !bits[i - 1])).count();
    Ok(starts as i64)
}

/// Intrinsic volumes μ₀..μ_N.
#[derive(Debug, Clone, PartialEq)]
pub struct IntrinsicVolumes {
    mu: Vec<f64>,
}

impl IntrinsicVolumes {
    /// `mu[d]` for d = 0..=N with N ≤ 3; the top entry is a volume and must be ≥ 0.
    pub fn new(mu: Vec<f64>) -> Result<Self> {
        if mu.is_empty() || mu.len() > 4 {
            return Err(invalid!("need 1 to 4 intrinsic volumes, got {}", mu.len()));
        }
        if mu.iter().any(|m| !m.is_finite()) {
            return Err(invalid!("intrinsic volumes must be finite: {mu:?}"));
        }
        if mu[mu.len() - 1] < 0.0 {
            return Err(invalid!("volume μ_{} = {} is negative", mu.len() - 1, mu[mu.len() - 1]));
        }
        Ok(Self { mu })
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// N, the dimension of the top entry.
    pub fn dimension(&self) -> usize {
        self.mu.len() - 1
    }
}

/// (V − E + F, (E − 2F)δ, Fδ²) of a 2D mask, δ taken from its grid.
pub fn lattice_intrinsic_volumes(mask: &BinaryMask) -> Result<IntrinsicVolumes> {
    if mask.grid().ndim() != 2 {
        return Err(Error::UnsupportedDimension(mask.grid().ndim()));
    }
    let [v, e, f, _] = cubical_counts(mask).map(|c| c as f64);
    let delta = mask.grid().delta();
    IntrinsicVolumes::new(alloc::vec![v - e + f, (e - 2.0 * f) * delta, f * delta * delta])
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Solid 3D ball of the given radius.
    Ball(f64),
    /// Axis-aligned box with 1 to 3 side lengths.
    Box(Vec<f64>),
}

/// Ball: (1, 4r, 2πr², 4πr³/3). Box: elementary symmetric polynomials of its
/// sides, e.g. (1, a+b+c, ab+bc+ac, abc).
pub fn closed_form_intrinsic_volumes(shape: &Shape) -> Result<IntrinsicVolumes> {
    let positive = |x: f64| x > 0.0 && x.is_finite();
    match shape {
        Shape::Ball(r) => {
            if !positive(*r) {
                return Err(invalid!("ball radius must be positive, got {r}"));
            }
            let r = *r;
            IntrinsicVolumes::new(alloc::vec![1.0, 4.0 * r, 2.0 * PI * r * r, 4.0 / 3.0 * PI * r * r * r])
        }
        Shape::Box(sides) => {
            if sides.is_empty() || sides.len() > 3 || !sides.iter().all(|&s| positive(s)) {
                return Err(invalid!("box needs 1 to 3 positive sides, got {sides:?}"));
            }
            let mut mu = alloc::vec![0.0; sides.len() + 1];
            mu[0] = 1.0;
            for &s in sides {
                for d in (1..mu.len()).rev() {
                    mu[d] += s * mu[d - 1];
                }
            }
            IntrinsicVolumes::new(mu)
        }
    }
}

/// Connected foreground components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    /// 0 for background, otherwise 1 + component number.
    pub labels: Vec<usize>,
    /// Cell count of component k at index k.
    pub sizes: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }
}

/// Labels components under 8-adjacency (2D) or 26-adjacency (3D). Components
/// are numbered by their first cell in row-major order.
pub fn connected_components(mask: &BinaryMask) -> Components {
    let grid = mask.grid();
    let nd = grid.ndim();
    let mut dims = [1usize; 3];
    dims[..nd].copy_from_slice(grid.dims());
    let mut offsets: Vec<[isize; 3]> = Vec::new();
    for a in -1isize..=1 {
        for b in -1isize..=1 {
            for c in -1isize..=1 {
                let o = [a, b, c];
                if o == [0, 0, 0] || (nd..3).any(|ax| o[ax] != 0) {
                    continue;
                }
                offsets.push(o);
            }
        }
    }
    let bits = mask.bits();
    let mut labels = alloc::vec![0usize; bits.len()];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..bits.len() {
        if !bits[start] || labels[start] != 0 {
            continue;
        }
        sizes.push(0);
        let label = sizes.len();
        labels[start] = label;
        stack.push(start);
        while let Some(i) = stack.pop() {
            sizes[label - 1] += 1;
            let c = grid.coords(i);
            'next: for o in &offsets {
                let mut nb = [0usize; 3];
                for a in 0..3 {
                    let v = c[a] as isize + o[a];
                    if v < 0 || v >= dims[a] as isize {
                        continue 'next;
                    }
                    nb[a] = v as usize;
                }
                let j = grid.index(&nb[..nd]).expect("in bounds");
                if bits[j] && labels[j] == 0 {
                    labels[j] = label;
                    stack.push(j);
                }
            }
        }
    }
    Components { labels, sizes }
}
