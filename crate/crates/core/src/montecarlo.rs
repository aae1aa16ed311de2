//! Replicated simulation of smoothed fields.
//!
//! Replicate `r` of a run draws its white noise from stream
//! `base_seed.stream + r` of `base_seed.seed`, so any replicate can be
//! regenerated alone and a run gives the same numbers however its replicates
//! are scheduled. The `rft` crate drives [`SimPlan::replicate`] in parallel
//! and feeds the records back through [`ReplicateSummary::from_records`].

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::grid::{self, white_noise, Grid, RngSeed, ScalarField};
use crate::smoothing::{axis_cross, gaussian_kernel_1d, smooth, smoothness_params, Kernel1D, Smoothness};
use crate::topology::{connected_components, euler_characteristic, excursion_set, run_count, BinaryMask};

/// Post-smoothing variance normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Standardization {
    /// Threshold the smoothed field as is.
    None,
    /// Divide every cell by its exact standard deviation, computed from the
    /// kernel. The null field then has unit variance everywhere while staying
    /// Gaussian.
    Theoretical,
    /// Subtract the field's own mean and divide by its own (n − 1) sample
    /// standard deviation.
    Sample,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub grid: Grid,
    /// Kernel FWHM in length units; 0 leaves the noise unsmoothed.
    pub fwhm: f64,
    pub sigma_w: f64,
    pub n_replicates: usize,
    /// Strictly increasing.
    pub thresholds: Vec<f64>,
    pub base_seed: RngSeed,
    /// Added to the noise before smoothing.
    pub signal: Option<ScalarField>,
    pub standardization: Standardization,
    /// Generate the noise on a grid grown by the kernel radius on every side
    /// and crop after smoothing, so the kept cells see no zero padding.
    pub stationary_padding: bool,
}

impl SimConfig {
    /// Unit white noise, theoretical standardization, stationary padding.
    pub fn null(grid: Grid, fwhm: f64, n_replicates: usize, thresholds: Vec<f64>, base_seed: RngSeed) -> Self {
        Self {
            grid,
            fwhm,
            sigma_w: 1.0,
            n_replicates,
            thresholds,
            base_seed,
            signal: None,
            standardization: Standardization::Theoretical,
            stationary_padding: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fwhm >= 0.0 && self.fwhm.is_finite()) {
            return Err(invalid!("FWHM must be ≥ 0, got {}", self.fwhm));
        }
        if !(self.sigma_w > 0.0 && self.sigma_w.is_finite()) {
            return Err(invalid!("sigma_w must be positive, got {}", self.sigma_w));
        }
        if self.n_replicates == 0 {
            return Err(invalid!("need at least one replicate"));
        }
        if self.thresholds.iter().any(|h| h.is_nan()) || self.thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid!("thresholds must be strictly increasing"));
        }
        if let Some(s) = &self.signal {
            if s.grid() != &self.grid {
                return Err(invalid!("signal grid {:?} differs from {:?}", s.grid().dims(), self.grid.dims()));
            }
        }
        Ok(())
    }

    pub fn plan(&self) -> Result<SimPlan> {
        SimPlan::new(self.clone())
    }
}

/// A validated configuration with its kernel and per-cell scales precomputed.
#[derive(Debug, Clone)]
pub struct SimPlan {
    config: SimConfig,
    kernel: Kernel1D,
    margin: usize,
    noise_grid: Grid,
    signal: Option<ScalarField>,
    /// Per axis, the standard deviation factor of every kept cell.
    axis_sd: Vec<Vec<f64>>,
}

impl SimPlan {
    fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let kernel = if config.fwhm == 0.0 {
            Kernel1D::identity()
        } else {
            gaussian_kernel_1d(&smoothness_params(Smoothness::Fwhm(config.fwhm))?, config.grid.delta())?
        };
        let margin = if config.stationary_padding { kernel.radius() } else { 0 };
        let noise_grid = config.grid.padded(margin)?;
        let signal = match &config.signal {
            Some(s) => Some(s.embed(margin, &noise_grid)?),
            None => None,
        };
        let axis_sd = config
            .grid
            .dims()
            .iter()
            .zip(noise_grid.dims())
            .map(|(&n, &m)| (0..n).map(|x| libm::sqrt(axis_cross(&kernel, m, x + margin, x + margin))).collect())
            .collect();
        Ok(Self {
            config,
            kernel,
            margin,
            noise_grid,
            signal,
            axis_sd,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn kernel(&self) -> &Kernel1D {
        &self.kernel
    }

    /// Exact standard deviation of the smoothed noise at `coords`, before
    /// any standardization.
    pub fn cell_sd(&self, coords: &[usize]) -> f64 {
        self.config.sigma_w * coords.iter().zip(&self.axis_sd).map(|(&x, sd)| sd[x]).product::<f64>()
    }

    /// Noise draw of replicate `r`, on the (possibly padded) noise grid.
    pub fn noise(&self, r: usize) -> Result<ScalarField> {
        let stream = self.config.base_seed.stream.wrapping_add(r as u64);
        white_noise(&self.noise_grid, self.config.sigma_w, self.config.base_seed.with_stream(stream))
    }

    /// Smoothed, cropped field of replicate `r` before standardization.
    pub fn smoothed_field(&self, r: usize) -> Result<ScalarField> {
        let mut field = self.noise(r)?;
        if let Some(s) = &self.signal {
            field = field.add(s)?;
        }
        if self.kernel.len() > 1 {
            field = smooth(&field, &self.kernel)?;
        }
        if self.margin > 0 {
            field = field.crop(self.margin, &self.config.grid)?;
        }
        Ok(field)
    }

    /// Field of replicate `r` as thresholded, and the divisor range applied.
    pub fn simulate_field(&self, r: usize) -> Result<(ScalarField, (f64, f64))> {
        let field = self.smoothed_field(r)?;
        match self.config.standardization {
            Standardization::None => Ok((field, (1.0, 1.0))),
            Standardization::Theoretical => {
                let grid = *field.grid();
                let nd = grid.ndim();
                let mut range = (f64::INFINITY, f64::NEG_INFINITY);
                let values = field
                    .values()
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        let sd = self.cell_sd(&grid.coords(i)[..nd]);
                        range = (range.0.min(sd), range.1.max(sd));
                        v / sd
                    })
                    .collect();
                Ok((ScalarField::new(grid, values)?, range))
            }
            Standardization::Sample => {
                let (z, sd) = z_score(&field)?;
                Ok((z, (sd, sd)))
            }
        }
    }

    /// Supremum and Euler characteristic curve of replicate `r`.
    pub fn replicate(&self, r: usize) -> Result<ReplicateRecord> {
        let (field, divisors) = self.simulate_field(r)?;
        let ec = self
            .config
            .thresholds
            .iter()
            .map(|&h| mask_euler(&excursion_set(&field, h)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ReplicateRecord {
            sup: field.max(),
            ec,
            divisors,
        })
    }
}

fn mask_euler(mask: &BinaryMask) -> Result<i64> {
    if mask.grid().ndim() == 1 {
        run_count(mask)
    } else {
        euler_characteristic(mask)
    }
}

/// `(field − mean) / sd` with the (n − 1) sample standard deviation.
pub fn z_score(field: &ScalarField) -> Result<(ScalarField, f64)> {
    let m = field.mean();
    let sd = libm::sqrt(field.sample_variance());
    if !(sd > 0.0 && sd.is_finite()) {
        return Err(invalid!("cannot standardize a field with sample variance {}", sd * sd));
    }
    Ok((field.map(|v| (v - m) / sd), sd))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRecord {
    pub sup: f64,
    /// χ of the excursion set at each configured threshold.
    pub ec: Vec<i64>,
    /// Smallest and largest divisor applied by the standardization.
    pub divisors: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandardizationRecord {
    pub mode: Standardization,
    /// Smallest and largest divisor over all cells and replicates.
    pub divisor_range: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateSummary {
    pub thresholds: Vec<f64>,
    pub sup_values: Vec<f64>,
    /// `ec_curves[r][t]`: χ of replicate r at threshold t.
    pub ec_curves: Vec<Vec<i64>>,
    pub mean_ec: Vec<f64>,
    /// Standard error of `mean_ec` (0 with a single replicate).
    pub ec_stderr: Vec<f64>,
    pub empirical_fwer: Vec<f64>,
    pub standardization: StandardizationRecord,
}

impl ReplicateSummary {
    /// Aggregates records in the order given.
    pub fn from_records(thresholds: &[f64], records: Vec<ReplicateRecord>, mode: Standardization) -> Result<Self> {
        if records.is_empty() {
            return Err(invalid!("no replicate records"));
        }
        if records.iter().any(|r| r.ec.len() != thresholds.len()) {
            return Err(invalid!("record length does not match {} thresholds", thresholds.len()));
        }
        let n = records.len();
        let mut mean_ec = Vec::with_capacity(thresholds.len());
        let mut ec_stderr = Vec::with_capacity(thresholds.len());
        let mut column = Vec::with_capacity(n);
        for t in 0..thresholds.len() {
            column.clear();
            column.extend(records.iter().map(|r| r.ec[t] as f64));
            mean_ec.push(grid::mean(&column));
            ec_stderr.push(libm::sqrt(grid::sample_variance(&column) / n as f64));
        }
        let sup_values: Vec<f64> = records.iter().map(|r| r.sup).collect();
        let empirical_fwer = thresholds
            .iter()
            .map(|&h| empirical_fwer(&sup_values, h))
            .collect::<Result<Vec<_>>>()?;
        let divisor_range = records.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, r| {
            (acc.0.min(r.divisors.0), acc.1.max(r.divisors.1))
        });
        Ok(Self {
            thresholds: thresholds.to_vec(),
            sup_values,
            ec_curves: records.into_iter().map(|r| r.ec).collect(),
            mean_ec,
            ec_stderr,
            empirical_fwer,
            standardization: StandardizationRecord { mode, divisor_range },
        })
    }
}

/// Runs every replicate in order on the calling thread.
pub fn run_replicates(config: &SimConfig) -> Result<ReplicateSummary> {
    let plan = config.plan()?;
    let records = (0..config.n_replicates)
        .map(|r| plan.replicate(r))
        .collect::<Result<Vec<_>>>()?;
    ReplicateSummary::from_records(&config.thresholds, records, config.standardization)
}

/// Fraction of `sup_values` strictly above `h`.
pub fn empirical_fwer(sup_values: &[f64], h: f64) -> Result<f64> {
    if sup_values.is_empty() {
        return Err(invalid!("no supremum values"));
    }
    Ok(sup_values.iter().filter(|&&s| s > h).count() as f64 / sup_values.len() as f64)
}

/// Number of lattice upcrossings `x[i] ≤ h < x[i+1]` along a 1D path.
pub fn count_upcrossings(values: &[f64], h: f64) -> usize {
    values.windows(2).filter(|w| w[0] <= h && w[1] > h).count()
}

/// λ̂: each field is z-scored, then the sample variance of its forward
/// differences along every axis is averaged over axes and fields.
pub fn estimate_lambda(fields: &[ScalarField]) -> Result<f64> {
    if fields.is_empty() {
        return Err(invalid!("need at least one field"));
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for f in fields {
        if f.grid().dims().iter().any(|&d| d < 2) {
            return Err(invalid!("every axis needs ≥ 2 cells, got {:?}", f.grid().dims()));
        }
        let (z, _) = z_score(f)?;
        for axis in 0..z.grid().ndim() {
            total += grid::finite_difference(&z, axis)?.sample_variance();
            count += 1;
        }
    }
    Ok(total / count as f64)
}

/// Mean measure (cells · δᴺ) of the connected components of {Y > h}, pooled
/// over every field.
pub fn estimate_mean_clump_size(fields: &[ScalarField], h: f64) -> Result<f64> {
    if fields.is_empty() {
        return Err(invalid!("need at least one field"));
    }
    let mut measure = 0.0;
    let mut clumps = 0usize;
    for f in fields {
        let comps = connected_components(&excursion_set(f, h));
        measure += comps.sizes.iter().sum::<usize>() as f64 * f.grid().cell_measure();
        clumps += comps.count();
    }
    if clumps == 0 {
        return Err(Error::NoExcursions(h));
    }
    Ok(measure / clumps as f64)
}

/// Empirical variance of `field_integral` over the replicates of `config`,
/// and its exact value Σ_x Σ_y Cov(Y(x), Y(y))·δ²ᴺ.
///
/// The covariance, including any per-cell theoretical standardization, is a
/// product over axes, so the double sum factorizes into one double sum per
/// axis.
pub fn integral_variance_check(config: &SimConfig) -> Result<(f64, f64)> {
    if config.signal.is_some() {
        return Err(invalid!("integral variance check needs a null configuration"));
    }
    if config.standardization == Standardization::Sample {
        return Err(invalid!("sample standardization pins every integral to 0"));
    }
    let plan = config.plan()?;
    let integrals = (0..config.n_replicates)
        .map(|r| Ok(grid::field_integral(&plan.simulate_field(r)?.0)))
        .collect::<Result<Vec<_>>>()?;
    let empirical = grid::sample_variance(&integrals);

    let standardized = config.standardization == Standardization::Theoretical;
    let mut theoretical = config.sigma_w * config.sigma_w;
    if standardized {
        theoretical = 1.0;
    }
    for (a, (&n, &m)) in config.grid.dims().iter().zip(plan.noise_grid.dims()).enumerate() {
        let mut axis_sum = 0.0;
        for x in 0..n {
            for y in 0..n {
                let mut c = axis_cross(&plan.kernel, m, x + plan.margin, y + plan.margin);
                if standardized {
                    c /= plan.axis_sd[a][x] * plan.axis_sd[a][y];
                }
                axis_sum += c;
            }
        }
        theoretical *= axis_sum;
    }
    let cell = config.grid.cell_measure();
    Ok((empirical, theoretical * cell * cell))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smoothing::smoothed_noise_covariance;
    use alloc::vec;

    fn grid(dims: &[usize]) -> Grid {
        Grid::new(dims, 1.0).unwrap()
    }

    #[test]
    fn fwer_convention() {
        assert_eq!(empirical_fwer(&[1.0, 2.0, 3.0], 2.0).unwrap(), 1.0 / 3.0);
        assert_eq!(empirical_fwer(&[1.0, 2.0], 5.0).unwrap(), 0.0);
        assert_eq!(empirical_fwer(&[1.0, 2.0], f64::NEG_INFINITY).unwrap(), 1.0);
        assert!(empirical_fwer(&[], 0.0).is_err());
    }

    #[test]
    fn config_validation() {
        let base = SimConfig::null(grid(&[20, 20]), 3.0, 2, vec![0.0, 1.0], RngSeed::new(1, 0));
        assert!(base.validate().is_ok());
        let mut c = base.clone();
        c.thresholds = vec![1.0, 1.0];
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.n_replicates = 0;
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.fwhm = -1.0;
        assert!(c.validate().is_err());
        let mut c = base;
        c.signal = Some(ScalarField::constant(grid(&[3, 3]), 0.0));
        assert!(c.validate().is_err());
    }

    #[test]
    fn single_replicate_summary() {
        let c = SimConfig::null(grid(&[30, 30]), 4.0, 1, vec![-1.0, 0.0, 1.0, 50.0], RngSeed::new(3, 0));
        let s = run_replicates(&c).unwrap();
        assert_eq!(s.sup_values.len(), 1);
        let curve: Vec<f64> = s.ec_curves[0].iter().map(|&e| e as f64).collect();
        assert_eq!(s.mean_ec, curve);
        assert_eq!(s.ec_stderr, vec![0.0; 4]);
        assert_eq!(s.mean_ec[3], 0.0);
    }

    #[test]
    fn summary_invariants() {
        let c = SimConfig::null(grid(&[25, 25]), 5.0, 40, vec![-0.5, 0.5, 1.5, 2.5, 10.0], RngSeed::new(9, 100));
        let s = run_replicates(&c).unwrap();
        for t in 0..5 {
            let avg = s.ec_curves.iter().map(|e| e[t] as f64).sum::<f64>() / 40.0;
            assert!((avg - s.mean_ec[t]).abs() < 1e-12);
        }
        assert!(s.empirical_fwer.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(s.mean_ec[4], 0.0);
        assert_eq!(s.standardization.mode, Standardization::Theoretical);
        // Same base seed gives the same summary; replicate r is stream 100 + r.
        assert_eq!(run_replicates(&c).unwrap(), s);
        let plan = c.plan().unwrap();
        let shifted = SimConfig {
            base_seed: RngSeed::new(9, 103),
            ..c.clone()
        };
        assert_eq!(shifted.plan().unwrap().replicate(0).unwrap(), plan.replicate(3).unwrap());
    }

    #[test]
    fn replicate_order_does_not_matter() {
        let c = SimConfig::null(grid(&[20, 20]), 4.0, 12, vec![0.0, 1.0, 2.0], RngSeed::new(4, 0));
        let plan = c.plan().unwrap();
        let mut backwards: Vec<(usize, ReplicateRecord)> =
            (0..12).rev().map(|r| (r, plan.replicate(r).unwrap())).collect();
        backwards.sort_by_key(|(r, _)| *r);
        let records = backwards.into_iter().map(|(_, rec)| rec).collect();
        let s = ReplicateSummary::from_records(&c.thresholds, records, c.standardization).unwrap();
        assert_eq!(s, run_replicates(&c).unwrap());
    }

    #[test]
    fn theoretical_standardization_gives_unit_variance() {
        // Without padding the edge cells lose kernel mass; the per-cell
        // divisor must undo exactly that.
        let mut c = SimConfig::null(grid(&[12, 12]), 4.0, 3000, vec![0.0], RngSeed::new(12, 0));
        c.stationary_padding = false;
        c.sigma_w = 2.5;
        let plan = c.plan().unwrap();
        let mut corner = Vec::new();
        let mut centre = Vec::new();
        for r in 0..c.n_replicates {
            let (f, _) = plan.simulate_field(r).unwrap();
            corner.push(f.get(&[0, 0]).unwrap());
            centre.push(f.get(&[6, 6]).unwrap());
        }
        for xs in [corner, centre] {
            let v = grid::sample_variance(&xs);
            // sd of a variance estimate from n normals is about √(2/n).
            assert!((v - 1.0).abs() < 4.0 * (2.0 / 3000.0f64).sqrt(), "{v}");
        }
        let exact = smoothed_noise_covariance(plan.kernel(), 2.5, &[0, 0], &[0, 0], &grid(&[12, 12])).unwrap();
        assert!((plan.cell_sd(&[0, 0]) - exact.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn sample_standardization_gives_unit_variance() {
        let mut c = SimConfig::null(grid(&[30, 20]), 5.0, 5, vec![0.0], RngSeed::new(2, 0));
        c.standardization = Standardization::Sample;
        let plan = c.plan().unwrap();
        for r in 0..5 {
            let (f, _) = plan.simulate_field(r).unwrap();
            assert!((f.sample_variance() - 1.0).abs() < 1e-10);
            assert!(f.mean().abs() < 1e-12);
        }
    }

    #[test]
    fn padding_keeps_the_requested_grid() {
        let c = SimConfig::null(grid(&[40, 30]), 6.0, 1, vec![0.0], RngSeed::new(1, 0));
        let (f, (lo, hi)) = c.plan().unwrap().simulate_field(0).unwrap();
        assert_eq!(f.grid().dims(), &[40, 30]);
        // Padded noise makes every kept cell equally variable.
        assert!((hi / lo - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_estimates() {
        let c = SimConfig::null(grid(&[100, 100]), 10.0, 20, vec![0.0], RngSeed::new(8, 0));
        let plan = c.plan().unwrap();
        let fields: Vec<ScalarField> = (0..20).map(|r| plan.simulate_field(r).unwrap().0).collect();
        let lam = estimate_lambda(&fields).unwrap();
        assert!((lam / 0.027_725_887 - 1.0).abs() < 0.15, "{lam}");
        let doubled: Vec<ScalarField> = fields.iter().map(|f| f.map(|v| 2.0 * v)).collect();
        assert!((estimate_lambda(&doubled).unwrap() - lam).abs() < 1e-10);

        let raw = SimConfig::null(grid(&[60, 60]), 0.0, 3, vec![0.0], RngSeed::new(8, 0));
        let plan = raw.plan().unwrap();
        let noise: Vec<ScalarField> = (0..3).map(|r| plan.simulate_field(r).unwrap().0).collect();
        assert!(estimate_lambda(&noise).unwrap() > 0.5);

        assert!(estimate_lambda(&[ScalarField::constant(grid(&[5, 5]), 1.0)]).is_err());
        assert!(estimate_lambda(&[ScalarField::constant(grid(&[1, 5]), 1.0)]).is_err());
        assert!(estimate_lambda(&[]).is_err());
    }

    #[test]
    fn clump_sizes() {
        let g = grid(&[6, 6]);
        let one = ScalarField::from_fn(g, |c| if c[0] == 2 && c[1] < 3 { 5.0 } else { 0.0 });
        assert_eq!(estimate_mean_clump_size(&[one], 1.0).unwrap(), 3.0);
        let two = ScalarField::from_fn(g, |c| if c == [0, 0] || c == [0, 1] { 5.0 } else { 0.0 });
        let four = ScalarField::from_fn(g, |c| if c[0] < 2 && c[1] < 2 { 5.0 } else { 0.0 });
        assert_eq!(estimate_mean_clump_size(&[two, four], 1.0).unwrap(), 3.0);
        let half = ScalarField::from_fn(Grid::new(&[4, 4], 0.5).unwrap(), |c| if c[0] == 0 { 1.0 } else { 0.0 });
        assert_eq!(estimate_mean_clump_size(&[half], 0.5).unwrap(), 1.0);
        assert!(matches!(
            estimate_mean_clump_size(&[ScalarField::constant(g, 0.0)], 1.0),
            Err(Error::NoExcursions(_))
        ));
    }

    #[test]
    fn upcrossings() {
        assert_eq!(count_upcrossings(&[0.0, 2.0, 0.0, 1.0, 1.5, 3.0], 1.0), 2);
        assert_eq!(count_upcrossings(&[1.0, 1.0], 1.0), 0);
    }

    /// Unfactorized double sum of the covariance over the kept cells.
    fn brute_force(config: &SimConfig) -> f64 {
        let plan = config.plan().unwrap();
        let g = config.grid;
        let noise_grid = g.padded(plan.margin).unwrap();
        let nd = g.ndim();
        let mut total = 0.0;
        for i in 0..g.len() {
            for j in 0..g.len() {
                let x: Vec<usize> = g.coords(i)[..nd].iter().map(|c| c + plan.margin).collect();
                let y: Vec<usize> = g.coords(j)[..nd].iter().map(|c| c + plan.margin).collect();
                let mut c = smoothed_noise_covariance(plan.kernel(), config.sigma_w, &x, &y, &noise_grid).unwrap();
                if config.standardization == Standardization::Theoretical {
                    c /= plan.cell_sd(&g.coords(i)[..nd]) * plan.cell_sd(&g.coords(j)[..nd]);
                }
                total += c;
            }
        }
        total * g.cell_measure() * g.cell_measure()
    }

    #[test]
    fn integral_variance_theory_factorizes() {
        for (padding, standardization) in [
            (false, Standardization::None),
            (true, Standardization::None),
            (false, Standardization::Theoretical),
        ] {
            let mut c = SimConfig::null(Grid::new(&[9, 7], 0.5).unwrap(), 1.5, 2, vec![0.0], RngSeed::new(1, 0));
            c.stationary_padding = padding;
            c.standardization = standardization;
            c.sigma_w = 1.7;
            let (_, theory) = integral_variance_check(&c).unwrap();
            let brute = brute_force(&c);
            assert!((theory - brute).abs() < 1e-12 * brute, "{theory} vs {brute}");
        }
    }

    #[test]
    fn integral_variance_scaling() {
        let mut c = SimConfig::null(grid(&[20, 20]), 3.0, 400, vec![0.0], RngSeed::new(6, 0));
        c.standardization = Standardization::None;
        c.stationary_padding = false;
        let (e1, t1) = integral_variance_check(&c).unwrap();
        c.sigma_w = 3.0;
        let (e3, t3) = integral_variance_check(&c).unwrap();
        assert!((t3 / t1 - 9.0).abs() < 1e-12);
        // Same seeds: the empirical integrals scale exactly too.
        assert!((e3 / e1 - 9.0).abs() < 1e-9);
        assert!((e1 / t1 - 1.0).abs() < 0.25);
    }

    #[test]
    fn single_cell_integral_variance() {
        let mut c = SimConfig::null(grid(&[1, 1]), 0.0, 4000, vec![0.0], RngSeed::new(10, 0));
        c.standardization = Standardization::None;
        c.sigma_w = 2.0;
        let (e, t) = integral_variance_check(&c).unwrap();
        assert_eq!(t, 4.0);
        assert!((e / 4.0 - 1.0).abs() < 4.0 * (2.0 / 4000.0f64).sqrt());
        c.standardization = Standardization::Sample;
        assert!(integral_variance_check(&c).is_err());
    }
}
