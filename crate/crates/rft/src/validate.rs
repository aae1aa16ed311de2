//! Acceptance suites run by `rft validate`.
//!
//! Every criterion draws its random numbers from its own stream block
//! (`id << 32` onwards) of the suite seed. Criteria 5, 6 and 7 share one set
//! of null replicates. Report text contains no timings, so equal seeds give
//! byte-identical reports.

use std::f64::consts::LN_2;
use std::fmt::Write as _;
use std::sync::OnceLock;

use rand::Rng;
use rft_core::grid::{key_signal, white_noise};
use rft_core::montecarlo::{count_upcrossings, empirical_fwer, estimate_lambda, integral_variance_check};
use rft_core::montecarlo::{ReplicateSummary, SimConfig, Standardization};
use rft_core::rft::{bonferroni_threshold, ec_density, expected_ec, rft_threshold, RiceInputs};
use rft_core::topology::{
    closed_form_intrinsic_volumes, euler_characteristic, excursion_set, lattice_intrinsic_volumes, BinaryMask, Shape,
};
use rft_core::{FieldSpec, Grid, IntrinsicVolumes, RngSeed};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::parallel::{map_indexed, run_plan, run_replicates, simulate_fields, with_threads};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Quick,
    Full,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Quick => "quick",
            Suite::Full => "full",
        }
    }
}

/// Replicate counts of a suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sizes {
    pub fp_seeds: usize,
    pub ec_replicates: usize,
    pub lambda_replicates: usize,
    pub rice_paths: usize,
    pub rice_length: usize,
    pub integral_replicates: usize,
    pub key_replicates: usize,
}

impl Sizes {
    pub fn for_suite(suite: Suite) -> Self {
        match suite {
            Suite::Full => Self {
                fp_seeds: 20,
                ec_replicates: 2000,
                lambda_replicates: 50,
                rice_paths: 5000,
                rice_length: 4000,
                integral_replicates: 2000,
                key_replicates: 50,
            },
            Suite::Quick => Self {
                fp_seeds: 20,
                ec_replicates: 500,
                lambda_replicates: 50,
                rice_paths: 1000,
                rice_length: 4000,
                integral_replicates: 500,
                key_replicates: 50,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub suite: Suite,
    pub seed: u64,
    pub threads: Option<usize>,
    /// Replaces the smoothness used for the expected EC in criteria 5 to 7.
    /// A negative control: a wrong λ must make criterion 5 fail.
    pub lambda_override: Option<f64>,
}

impl Options {
    pub fn new(suite: Suite, seed: u64) -> Self {
        Self {
            suite,
            seed,
            threads: None,
            lambda_override: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        format!("criterion {:>2} {verdict} {}: {}", self.id, self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub suite: Suite,
    pub seed: u64,
    pub results: Vec<CriterionResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn render(&self) -> String {
        let mut out = format!("rft validate suite={} seed={}\n", self.suite.name(), self.seed);
        for r in &self.results {
            out.push_str(&r.line());
            out.push('\n');
        }
        let passed = self.results.iter().filter(|r| r.pass).count();
        writeln!(out, "result {passed}/{} criteria passed", self.results.len()).unwrap();
        out
    }
}

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "bonferroni thresholds"),
    (2, "pointwise false-positive rate"),
    (3, "topology oracles"),
    (4, "EC density identities"),
    (5, "expected EC vs Monte Carlo"),
    (6, "FWER calibration"),
    (7, "threshold ordering"),
    (8, "smoothness recovery"),
    (9, "Rice formula"),
    (10, "integral variance"),
    (11, "key object EC curve"),
    (12, "thread-count determinism"),
];

/// Smoothness of FWHM-10 smoothed noise, 4 ln 2 / 100.
pub fn reference_lambda() -> f64 {
    4.0 * LN_2 / 100.0
}

const NULL_THRESHOLDS: [f64; 4] = [2.0, 2.5, 3.0, 3.5];

fn stream_block(id: u8) -> u64 {
    (id as u64) << 32
}

struct NullRun {
    summary: ReplicateSummary,
    h_star: f64,
}

type Outcome = Result<(bool, String), String>;

pub struct Validator {
    opts: Options,
    sizes: Sizes,
    null_run: OnceLock<Result<NullRun, String>>,
}

impl Validator {
    pub fn new(opts: Options) -> Self {
        let sizes = Sizes::for_suite(opts.suite);
        Self {
            opts,
            sizes,
            null_run: OnceLock::new(),
        }
    }

    pub fn sizes(&self) -> &Sizes {
        &self.sizes
    }

    fn seed(&self, id: u8) -> RngSeed {
        RngSeed::new(self.opts.seed, stream_block(id))
    }

    fn lambda_used(&self) -> f64 {
        self.opts.lambda_override.unwrap_or_else(reference_lambda)
    }

    /// The criterion 5 configuration: 100 × 100 null field, FWHM 10.
    pub fn null_config(&self, replicates: usize, id: u8) -> SimConfig {
        let grid = Grid::new(&[100, 100], 1.0).expect("fixed grid");
        SimConfig::null(grid, 10.0, replicates, NULL_THRESHOLDS.to_vec(), self.seed(id))
    }

    fn null_run(&self) -> Result<&NullRun, String> {
        self.null_run
            .get_or_init(|| {
                let summary = run_replicates(&self.null_config(self.sizes.ec_replicates, 5)).map_err(|e| e.to_string())?;
                let spec = FieldSpec::gaussian(self.lambda_used()).map_err(|e| e.to_string())?;
                let h_star = rft_threshold(&square_volumes(), &spec, 0.05).map_err(|e| e.to_string())?.h;
                Ok(NullRun { summary, h_star })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Runs one criterion on the configured thread pool.
    pub fn criterion(&self, id: u8) -> CriterionResult {
        let name = CRITERIA
            .iter()
            .find(|(i, _)| *i == id)
            .map(|(_, n)| *n)
            .unwrap_or("unknown criterion");
        let outcome = with_threads(self.opts.threads, || self.evaluate(id)).unwrap_or_else(|e| Err(e.to_string()));
        let (pass, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        CriterionResult { id, name, pass, detail }
    }

    pub fn run_all(&self) -> Report {
        Report {
            suite: self.opts.suite,
            seed: self.opts.seed,
            results: CRITERIA.iter().map(|&(id, _)| self.criterion(id)).collect(),
        }
    }

    fn evaluate(&self, id: u8) -> Outcome {
        match id {
            1 => self.bonferroni(),
            2 => self.false_positive_rate(),
            3 => self.topology(),
            4 => self.densities(),
            5 => self.expected_ec_agreement(),
            6 => self.fwer(),
            7 => self.ordering(),
            8 => self.smoothness(),
            9 => self.rice(),
            10 => self.integral_variance(),
            11 => self.key_curve(),
            12 => self.determinism(),
            _ => Err(format!("no criterion {id}")),
        }
    }

    fn bonferroni(&self) -> Outcome {
        let many = bonferroni_threshold(0.05, 10_000).map_err(err)?.h;
        let one = bonferroni_threshold(0.05, 1).map_err(err)?.h;
        let pass = (many - 4.4172).abs() <= 5e-4 && (one - 1.6449).abs() <= 5e-4;
        Ok((pass, format!("h(0.05, 10000) = {many:.6}, h(0.05, 1) = {one:.6}")))
    }

    fn false_positive_rate(&self) -> Outcome {
        let grid = Grid::new(&[100, 100], 1.0).map_err(err)?;
        let base = self.seed(2);
        let fractions = map_indexed(self.sizes.fp_seeds, |i| {
            let w = white_noise(&grid, 1.0, base.with_stream(base.stream + i as u64))?;
            Ok(w.values().iter().filter(|&&v| v > 1.64).count() as f64 / grid.len() as f64)
        })
        .map_err(err)?;
        let mean = fractions.iter().sum::<f64>() / fractions.len() as f64;
        Ok((
            (0.043..=0.057).contains(&mean),
            format!("mean fraction above 1.64 over {} fields = {mean:.5} (band [0.043, 0.057])", fractions.len()),
        ))
    }

    fn topology(&self) -> Outcome {
        let mut failures = Vec::new();
        let mut check = |ok: bool, what: String| {
            if !ok {
                failures.push(what);
            }
        };
        let g = Grid::new(&[12, 12], 1.0).map_err(err)?;
        let rect = BinaryMask::from_fn(g, |c| c.iter().all(|&x| (1..11).contains(&x)));
        let chi = euler_characteristic(&rect).map_err(err)?;
        check(chi == 1, format!("rectangle χ = {chi}"));
        let key_grid = Grid::new(&[60, 37], 1.0).map_err(err)?;
        let key = excursion_set(&key_signal(&key_grid).map_err(err)?, 0.5);
        let chi = euler_characteristic(&key).map_err(err)?;
        check(chi == 0, format!("key χ = {chi}"));
        let blocks = BinaryMask::from_fn(g, |c| (c[0] < 3 && c[1] < 3) || (c[0] >= 7 && c[1] >= 7));
        let chi = euler_characteristic(&blocks).map_err(err)?;
        check(chi == 2, format!("two blocks χ = {chi}"));

        let mut rng = self.seed(3).rng();
        let mut pairs = Vec::new();
        for _ in 0..5 {
            let (a, b) = (rng.random_range(1..=80usize), rng.random_range(1..=80usize));
            let delta = rng.random_range(0.25..2.0f64);
            let full = BinaryMask::from_fn(Grid::new(&[a, b], delta).map_err(err)?, |_| true);
            let iv = lattice_intrinsic_volumes(&full).map_err(err)?;
            let (af, bf) = (a as f64, b as f64);
            let want = [1.0, (af + bf) * delta, af * bf * delta * delta];
            let ok = iv.mu().iter().zip(want).all(|(m, w)| (m - w).abs() <= 1e-12 * w.abs().max(1.0));
            check(ok, format!("{a}×{b} rectangle volumes {:?}", iv.mu()));
            pairs.push(format!("{a}×{b}"));
        }
        let ball = closed_form_intrinsic_volumes(&Shape::Ball(1.0)).map_err(err)?;
        let want = [1.0, 4.0, 2.0 * std::f64::consts::PI, 4.0 / 3.0 * std::f64::consts::PI];
        check(close_all(ball.mu(), &want, 1e-12), format!("ball(1) volumes {:?}", ball.mu()));
        let unit = closed_form_intrinsic_volumes(&Shape::Box(vec![1.0, 1.0, 1.0])).map_err(err)?;
        check(close_all(unit.mu(), &[1.0, 3.0, 3.0, 1.0], 1e-12), format!("box(1,1,1) volumes {:?}", unit.mu()));

        if failures.is_empty() {
            Ok((true, format!("χ(rectangle, key, two blocks) = (1, 0, 2); rectangles {}; ball and box exact", pairs.join(" "))))
        } else {
            Ok((false, failures.join("; ")))
        }
    }

    fn densities(&self) -> Outcome {
        let lambda = reference_lambda();
        let s = FieldSpec::gaussian(lambda).map_err(err)?;
        let s2 = FieldSpec::gaussian(2.0 * lambda).map_err(err)?;
        let mut failures = Vec::new();
        let exact = [
            (0, 0.0, 0.5, ec_density(&s, 0, 0.0).map_err(err)?),
            (2, 0.0, 0.0, ec_density(&s, 2, 0.0).map_err(err)?),
            (3, 1.0, 0.0, ec_density(&s, 3, 1.0).map_err(err)?),
        ];
        for (d, h, want, got) in exact {
            if got != want {
                failures.push(format!("ρ{d}({h}) = {got}"));
            }
        }
        let mut worst_scaling: f64 = 0.0;
        for d in 1..=3 {
            for h in [0.5, 2.0, 3.5] {
                let ratio = ec_density(&s2, d, h).map_err(err)? / ec_density(&s, d, h).map_err(err)?;
                worst_scaling = worst_scaling.max((ratio - 2f64.powf(d as f64 / 2.0)).abs());
            }
        }
        if worst_scaling > 1e-12 {
            failures.push(format!("λ-scaling error {worst_scaling:e}"));
        }
        let mut worst_f: f64 = 0.0;
        for (a, b) in [(3u32, 20u32), (5, 30)] {
            let oracle = FisherSnedecor::new(a as f64, b as f64).map_err(|e| e.to_string())?;
            let spec = FieldSpec::f(a, b, lambda).map_err(err)?;
            for h in [1.0, 2.0, 4.0] {
                let diff = (ec_density(&spec, 0, h).map_err(err)? - oracle.sf(h)).abs();
                worst_f = worst_f.max(diff);
            }
        }
        if worst_f > 1e-8 {
            failures.push(format!("F ρ0 vs F tail error {worst_f:e}"));
        }
        let summary = format!("exact identities hold, max λ-scaling error {worst_scaling:.1e}, max F ρ0 error {worst_f:.1e}");
        Ok(if failures.is_empty() {
            (true, summary)
        } else {
            (false, failures.join("; "))
        })
    }

    fn expected_ec_agreement(&self) -> Outcome {
        let run = self.null_run()?;
        let spec = FieldSpec::gaussian(self.lambda_used()).map_err(err)?;
        let iv = square_volumes();
        let mut pass = true;
        let mut parts = Vec::new();
        for (t, &h) in run.summary.thresholds.iter().enumerate() {
            let want = expected_ec(&iv, &spec, h).map_err(err)?;
            let (mean, se) = (run.summary.mean_ec[t], run.summary.ec_stderr[t]);
            let z = (mean - want) / se;
            pass &= (mean - want).abs() <= 3.0 * se;
            parts.push(format!("h={h:.1} mean {mean:.4} expected {want:.4} z {z:+.2}"));
        }
        Ok((
            pass,
            format!("{} replicates, λ = {:.7}; {}", run.summary.sup_values.len(), self.lambda_used(), parts.join(", ")),
        ))
    }

    fn fwer(&self) -> Outcome {
        let run = self.null_run()?;
        let fwer = empirical_fwer(&run.summary.sup_values, run.h_star).map_err(err)?;
        Ok((
            (0.03..=0.07).contains(&fwer),
            format!("empirical FWER at h* = {:.4} is {fwer:.4} (band [0.03, 0.07])", run.h_star),
        ))
    }

    fn ordering(&self) -> Outcome {
        let run = self.null_run()?;
        let pointwise = bonferroni_threshold(0.05, 1).map_err(err)?.h;
        let bonferroni = bonferroni_threshold(0.05, 10_000).map_err(err)?.h;
        let h = run.h_star;
        let pass = pointwise < h && h < bonferroni && (h - 3.81).abs() <= 0.05;
        Ok((pass, format!("{pointwise:.4} < h* = {h:.4} < {bonferroni:.4}")))
    }

    fn smoothness(&self) -> Outcome {
        let plan = self.null_config(self.sizes.lambda_replicates, 8).plan().map_err(err)?;
        let fields = simulate_fields(&plan, self.sizes.lambda_replicates).map_err(err)?;
        let lam = estimate_lambda(&fields).map_err(err)?;
        let want = reference_lambda();
        let rel = lam / want - 1.0;
        Ok((
            rel.abs() <= 0.15,
            format!("λ̂ = {lam:.6} over {} fields vs {want:.6} ({:+.2}%)", fields.len(), 100.0 * rel),
        ))
    }

    fn rice(&self) -> Outcome {
        let n = self.sizes.rice_length;
        let grid = Grid::new(&[n], 1.0).map_err(err)?;
        let config = SimConfig::null(grid, 20.0, self.sizes.rice_paths, vec![0.0], self.seed(9));
        let plan = config.plan().map_err(err)?;
        let raw = RiceInputs::from_kernel(plan.kernel(), 1.0, 1.0).map_err(err)?;
        let inputs = RiceInputs::new(1.0, raw.r2() / raw.r0()).map_err(err)?;
        let levels = [1.0, 2.0];
        let counts = map_indexed(config.n_replicates, |r| {
            let (f, _) = plan.simulate_field(r)?;
            Ok(levels.map(|h| count_upcrossings(f.values(), h) as f64))
        })
        .map_err(err)?;
        let mut pass = true;
        let mut parts = Vec::new();
        for (i, &h) in levels.iter().enumerate() {
            let xs: Vec<f64> = counts.iter().map(|c| c[i]).collect();
            let (mean, se) = mean_and_stderr(&xs);
            let want = (n - 1) as f64 * rft_core::rft::rice_expected_upcrossings(&inputs, h);
            pass &= (mean - want).abs() <= 3.0 * se;
            parts.push(format!("h={h:.0} mean {mean:.4} Rice {want:.4} z {:+.2}", (mean - want) / se));
        }
        Ok((pass, format!("{} paths of {n} cells, FWHM 20; {}", counts.len(), parts.join(", "))))
    }

    fn integral_variance(&self) -> Outcome {
        let grid = Grid::new(&[50, 50], 1.0).map_err(err)?;
        let mut config = SimConfig::null(grid, 5.0, self.sizes.integral_replicates, vec![0.0], self.seed(10));
        config.standardization = Standardization::None;
        config.stationary_padding = false;
        let (empirical, theory) = integral_variance_check(&config).map_err(err)?;
        let ratio = empirical / theory;
        Ok((
            (0.85..=1.15).contains(&ratio),
            format!(
                "empirical {empirical:.4} vs theoretical {theory:.4} over {} replicates (ratio {ratio:.4})",
                config.n_replicates
            ),
        ))
    }

    /// The 60 × 37 key object plus FWHM-10 smoothed unit noise, z-scored.
    pub fn key_config(&self, thresholds: Vec<f64>) -> Result<SimConfig, String> {
        let grid = Grid::new(&[60, 37], 1.0).map_err(err)?;
        Ok(SimConfig {
            grid,
            fwhm: 10.0,
            sigma_w: 1.0,
            n_replicates: self.sizes.key_replicates,
            thresholds,
            base_seed: self.seed(11),
            signal: Some(key_signal(&grid).map_err(err)?),
            standardization: Standardization::Sample,
            stationary_padding: false,
        })
    }

    fn key_curve(&self) -> Outcome {
        let thresholds = crate::config::parse_thresholds("-1:0.1:1").map_err(err)?;
        let config = self.key_config(thresholds)?;
        let object = excursion_set(config.signal.as_ref().expect("key signal"), 0.5);
        let chi_object = euler_characteristic(&object).map_err(err)? as f64;
        let summary = run_replicates(&config).map_err(err)?;
        let t = summary
            .thresholds
            .iter()
            .position(|&h| h == -0.5)
            .ok_or("threshold -0.5 missing")?;
        let (mean, se) = (summary.mean_ec[t], summary.ec_stderr[t]);
        let low_ok = (mean - chi_object).abs() <= 3.0 * se;

        let top = summary.sup_values.iter().cloned().fold(1.0, f64::max) + 0.1;
        let high = run_plan(&self.key_config(vec![top])?.plan().map_err(err)?).map_err(err)?;
        let high_ok = high.mean_ec[0] == 0.0;
        Ok((
            low_ok && high_ok,
            format!(
                "object χ = {chi_object}; mean EC at h=-0.5 is {mean:.4} (se {se:.4}); at h={top:.4} above every maximum it is {}",
                high.mean_ec[0]
            ),
        ))
    }

    fn determinism(&self) -> Outcome {
        let reference = &self.null_run()?.summary;
        let config = self.null_config(self.sizes.ec_replicates, 5);
        let mut same = true;
        for threads in [1, 4] {
            let rerun = with_threads(Some(threads), || run_replicates(&config)).map_err(err)?.map_err(err)?;
            same &= &rerun == reference;
        }
        Ok((
            same,
            format!(
                "{} criterion-5 replicates on 1 and 4 threads {} the default pool",
                config.n_replicates,
                if same { "match" } else { "differ from" }
            ),
        ))
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn close_all(got: &[f64], want: &[f64], tol: f64) -> bool {
    got.len() == want.len() && got.iter().zip(want).all(|(g, w)| (g - w).abs() <= tol)
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// μ of the full 100 × 100 lattice, (1, 200, 10000).
fn square_volumes() -> IntrinsicVolumes {
    let grid = Grid::new(&[100, 100], 1.0).expect("fixed grid");
    lattice_intrinsic_volumes(&BinaryMask::from_fn(grid, |_| true)).expect("2D mask")
}

/// Runs the whole suite.
pub fn run(opts: Options) -> Report {
    Validator::new(opts).run_all()
}

