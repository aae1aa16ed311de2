//! Rayon driver for the replicate harness.
//!
//! Replicates are computed in parallel and collected in replicate order, and
//! every reduction runs sequentially over that ordered list, so summaries are
//! bit-identical for any thread count.

use rayon::prelude::*;
use rft_core::montecarlo::{ReplicateSummary, SimConfig, SimPlan};
use rft_core::ScalarField;

use crate::error::Result;

/// Runs `f` on a pool of `threads` workers, or on the global pool for `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            Ok(pool.install(f))
        }
    }
}

/// `f(0), f(1), …, f(n − 1)` evaluated in parallel, returned in index order.
pub fn map_indexed<T: Send>(n: usize, f: impl Fn(usize) -> rft_core::Result<T> + Sync + Send) -> Result<Vec<T>> {
    Ok((0..n).into_par_iter().map(f).collect::<rft_core::Result<Vec<T>>>()?)
}

pub fn run_replicates(config: &SimConfig) -> Result<ReplicateSummary> {
    let plan = config.plan()?;
    run_plan(&plan)
}

pub fn run_plan(plan: &SimPlan) -> Result<ReplicateSummary> {
    let config = plan.config();
    let records = map_indexed(config.n_replicates, |r| plan.replicate(r))?;
    Ok(ReplicateSummary::from_records(&config.thresholds, records, config.standardization)?)
}

/// The thresholded fields of replicates `0..n`.
pub fn simulate_fields(plan: &SimPlan, n: usize) -> Result<Vec<ScalarField>> {
    map_indexed(n, |r| plan.simulate_field(r).map(|(f, _)| f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rft_core::{Grid, RngSeed};

    #[test]
    fn matches_sequential_driver_for_any_thread_count() {
        let c = SimConfig::null(Grid::new(&[30, 30], 1.0).unwrap(), 5.0, 24, vec![0.0, 1.0, 2.0], RngSeed::new(5, 0));
        let seq = rft_core::montecarlo::run_replicates(&c).unwrap();
        for threads in [1, 3, 8] {
            let par = with_threads(Some(threads), || run_replicates(&c)).unwrap().unwrap();
            assert_eq!(par, seq);
        }
    }
}
