//! Seeded Monte Carlo and quadrature checks of the class properties.
//!
//! Every trial is a pure function of `(config, suite, trial_index)`: its
//! generator is `ChaCha8Rng::seed_from_u64(seed + trial_index)`, so a single
//! failing trial can be rerun with [`run_trial`] and trials can execute in
//! any order or in parallel. Reports are gathered in trial-index order.

mod oracle;
mod quadrature;
mod sample;

use std::fmt;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classcheck::{self, bernardi, convolve, margin, ClassParams, RatioEvaluator};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::series::json::complex_pair;
use crate::series::{evaluate, linear_combine, DiskGrid, HarmonicSeries};

pub use oracle::convolution_margin_oracle;
pub use quadrature::{bernardi_quadrature_oracle, QUADRATURE_TARGET};
pub use sample::{in_class_from_shares, sample_in_class};

/// Grid evaluation slack on `min Re >= σ`.
pub const SUFFICIENCY_SLACK: f64 = 1e-9;
/// Agreement required between two routes to the same margin.
pub const MARGIN_TOLERANCE: f64 = 1e-12;
/// Quadrature oracle vs coefficient map, relative to `1 + |value|`.
pub const ORACLE_TOLERANCE: f64 = 1e-8;
/// Bernardi parameters exercised by the `bernardi` suite.
pub const BERNARDI_U: [f64; 3] = [0.0, 1.0, 2.0];
/// Real evaluation points for the quadrature oracle.
pub const BERNARDI_X: [f64; 3] = [0.25, 0.5, 0.75];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Sufficiency,
    Convolution,
    Convex,
    Bernardi,
    Sense,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Sufficiency,
        Suite::Convolution,
        Suite::Convex,
        Suite::Bernardi,
        Suite::Sense,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Sufficiency => "sufficiency",
            Suite::Convolution => "convolution",
            Suite::Convex => "convex",
            Suite::Bernardi => "bernardi",
            Suite::Sense => "sense",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown suite '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub class: ClassParams,
    pub trials: u32,
    pub truncation: u32,
    pub grid: DiskGrid,
    pub seed: u64,
    pub suites: Vec<Suite>,
    /// Fixed weight for the `convex` suite; drawn per trial when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParams("trials must be >= 1".into()));
        }
        if self.truncation < self.class.ell() + 1 {
            return Err(Error::InvalidParams(format!(
                "truncation must be >= ell + 1 = {}",
                self.class.ell() + 1
            )));
        }
        if let Some(mu) = self.mu {
            if !(0.0..=1.0).contains(&mu) {
                return Err(Error::InvalidParams(format!("mu must lie in [0, 1], got {mu}")));
            }
        }
        self.class.require_nondegenerate()
    }

    /// `seed + trial_index`, wrapping.
    pub fn trial_seed(&self, trial_index: u32) -> u64 {
        self.seed.wrapping_add(u64::from(trial_index))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Singular,
}

/// Suite-specific measurements attached to a trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialDetail {
    Convex {
        mu: f64,
        margin_first: f64,
        margin_second: f64,
        affinity_error: f64,
    },
    Convolution {
        oracle_margin: f64,
        oracle_agreement: f64,
        /// `margin(f*M) >= 0`: the product passed the coefficient test.
        closed: bool,
    },
    Bernardi {
        /// `max_u (margin(f) - margin(F_u f))`; nonpositive when margins grow.
        worst_margin_drop: f64,
        /// `max_{u,x} |oracle - F_u f(x)| / |F_u f(x)|`.
        worst_oracle_error: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        quadrature_failure: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub suite: Suite,
    pub trial_index: u32,
    pub seed_used: u64,
    pub margin: f64,
    /// Absent when the grid scan hit a vanishing denominator.
    pub min_re: Option<f64>,
    pub sense_gap_min: Option<f64>,
    pub verdict: Verdict,
    #[serde(default, with = "complex_pair::option", skip_serializing_if = "Option::is_none")]
    pub witness_z: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<TrialDetail>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub config: SuiteConfig,
    pub passed: u32,
    pub failed: u32,
    pub singular: u32,
    pub trials: Vec<TrialReport>,
}

impl SuiteReport {
    /// `report-<suite>-<seed>.json`.
    pub fn file_name(&self) -> String {
        format!("report-{}-{}.json", self.suite, self.seed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// 0 when everything passed, 2 if any trial was singular, otherwise 1 if
/// any trial failed.
pub fn exit_status(reports: &[SuiteReport]) -> i32 {
    if reports.iter().any(|r| r.singular > 0) {
        2
    } else if reports.iter().any(|r| r.failed > 0) {
        1
    } else {
        0
    }
}

struct GridStats {
    min_re: f64,
    argmin_z: Complex64,
    sense_gap_min: f64,
    sense_argmin_z: Complex64,
}

/// Grid minima of `Re(A/B)` and of the sense gap, or the singular point.
fn grid_stats(f: &HarmonicSeries, cp: &ClassParams, grid: &DiskGrid) -> Result<std::result::Result<GridStats, Complex64>> {
    let exec = Execution::Sequential;
    let evaluator = RatioEvaluator::new(f, cp)?;
    let ratio = classcheck::scan_grid(grid, exec, |z| Ok(evaluator.ratio(z)?.re));
    let (min_re, argmin_z) = match ratio {
        Ok(found) => found,
        Err(Error::Singular { z }) => return Ok(Err(z)),
        Err(e) => return Err(e),
    };
    let (sense_gap_min, sense_argmin_z) = classcheck::sense_gap_min_over_grid(f, grid, exec)?;
    Ok(Ok(GridStats {
        min_re,
        argmin_z,
        sense_gap_min,
        sense_argmin_z,
    }))
}

fn singular_report(suite: Suite, margin: f64, z: Complex64, detail: Option<TrialDetail>) -> TrialReport {
    TrialReport {
        suite,
        trial_index: 0,
        seed_used: 0,
        margin,
        min_re: None,
        sense_gap_min: None,
        verdict: Verdict::Singular,
        witness_z: Some(z),
        detail,
    }
}

/// Checks `min Re(A/B) >= σ - 1e-9` and a positive sense gap on the grid.
///
/// The verdict reflects the analytic check only; the coefficient margin is
/// reported alongside. `trial_index` and `seed_used` are left at zero.
pub fn sufficiency_trial(f: &HarmonicSeries, cp: &ClassParams, grid: &DiskGrid) -> Result<TrialReport> {
    let margin = margin(f, cp)?;
    let stats = match grid_stats(f, cp, grid)? {
        Ok(stats) => stats,
        Err(z) => return Ok(singular_report(Suite::Sufficiency, margin, z, None)),
    };
    let analytic_ok = stats.min_re >= cp.sigma() - SUFFICIENCY_SLACK;
    let sense_ok = stats.sense_gap_min > 0.0;
    let (verdict, witness_z) = match (analytic_ok, sense_ok) {
        (true, true) => (Verdict::Pass, None),
        (false, _) => (Verdict::Fail, Some(stats.argmin_z)),
        (true, false) => (Verdict::Fail, Some(stats.sense_argmin_z)),
    };
    Ok(TrialReport {
        suite: Suite::Sufficiency,
        trial_index: 0,
        seed_used: 0,
        margin,
        min_re: Some(stats.min_re),
        sense_gap_min: Some(stats.sense_gap_min),
        verdict,
        witness_z,
        detail: None,
    })
}

fn sense_trial(f: &HarmonicSeries, cp: &ClassParams, grid: &DiskGrid) -> Result<TrialReport> {
    let margin = margin(f, cp)?;
    let (sense_gap_min, sense_argmin_z) =
        classcheck::sense_gap_min_over_grid(f, grid, Execution::Sequential)?;
    let min_re = match grid_stats(f, cp, grid)? {
        Ok(stats) => Some(stats.min_re),
        Err(_) => None,
    };
    let pass = sense_gap_min > 0.0;
    Ok(TrialReport {
        suite: Suite::Sense,
        trial_index: 0,
        seed_used: 0,
        margin,
        min_re,
        sense_gap_min: Some(sense_gap_min),
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        witness_z: (!pass).then_some(sense_argmin_z),
        detail: None,
    })
}

fn convex_trial(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<TrialReport> {
    let cp = &config.class;
    let f1 = sample::sample_in_class_from(cp, config.truncation, rng)?;
    let f2 = sample::sample_in_class_from(cp, config.truncation, rng)?;
    let drawn = rng.random::<f64>();
    let mu = config.mu.unwrap_or(drawn);
    let g = linear_combine(&[(mu, &f1), (1.0 - mu, &f2)])?;
    let (m1, m2) = (margin(&f1, cp)?, margin(&f2, cp)?);
    let mg = margin(&g, cp)?;
    let affinity_error = (mg - (mu * m1 + (1.0 - mu) * m2)).abs();
    let detail = Some(TrialDetail::Convex {
        mu,
        margin_first: m1,
        margin_second: m2,
        affinity_error,
    });
    let stats = match grid_stats(&g, cp, &config.grid)? {
        Ok(stats) => stats,
        Err(z) => return Ok(singular_report(Suite::Convex, mg, z, detail)),
    };
    let pass = affinity_error <= MARGIN_TOLERANCE && mg >= -MARGIN_TOLERANCE;
    Ok(TrialReport {
        suite: Suite::Convex,
        trial_index: 0,
        seed_used: 0,
        margin: mg,
        min_re: Some(stats.min_re),
        sense_gap_min: Some(stats.sense_gap_min),
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        witness_z: (!pass).then_some(stats.argmin_z),
        detail,
    })
}

fn convolution_trial(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<TrialReport> {
    let cp = &config.class;
    let f = sample::sample_in_class_from(cp, config.truncation, rng)?;
    let m = sample::sample_in_class_from(cp, config.truncation, rng)?;
    let product = convolve(&f, &m)?;
    let primary = margin(&product, cp)?;
    let oracle_margin = convolution_margin_oracle(&f, &m, cp);
    let oracle_agreement = (primary - oracle_margin).abs();
    let detail = Some(TrialDetail::Convolution {
        oracle_margin,
        oracle_agreement,
        closed: primary >= 0.0,
    });
    let stats = match grid_stats(&product, cp, &config.grid)? {
        Ok(stats) => stats,
        Err(z) => return Ok(singular_report(Suite::Convolution, primary, z, detail)),
    };
    // The closure claim itself is reported in `closed`; the verdict is
    // the agreement of the two margin computations.
    let pass = oracle_agreement <= MARGIN_TOLERANCE;
    Ok(TrialReport {
        suite: Suite::Convolution,
        trial_index: 0,
        seed_used: 0,
        margin: primary,
        min_re: Some(stats.min_re),
        sense_gap_min: Some(stats.sense_gap_min),
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        witness_z: (!pass).then_some(stats.argmin_z),
        detail,
    })
}

fn bernardi_trial(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<TrialReport> {
    let cp = &config.class;
    let f = sample::sample_in_class_from(cp, config.truncation, rng)?;
    let base = margin(&f, cp)?;
    let mut worst_margin_drop = f64::NEG_INFINITY;
    let mut worst_oracle_error: f64 = 0.0;
    let mut worst_x = Complex64::new(BERNARDI_X[0], 0.0);
    let mut quadrature_failure = None;
    let mut min_re = f64::INFINITY;
    let mut argmin_z = Complex64::new(0.0, 0.0);
    let mut sense_gap_min = f64::INFINITY;
    let mut singular_at = None;

    for u in BERNARDI_U {
        let transformed = bernardi(&f, u)?;
        worst_margin_drop = worst_margin_drop.max(base - margin(&transformed, cp)?);
        for x in BERNARDI_X {
            let value = evaluate(&transformed, Complex64::new(x, 0.0))?;
            match bernardi_quadrature_oracle(&f, u, x) {
                Ok(oracle) => {
                    let err = (oracle - value).norm() / value.norm().max(f64::MIN_POSITIVE);
                    if err > worst_oracle_error {
                        worst_oracle_error = err;
                        worst_x = Complex64::new(x, 0.0);
                    }
                }
                Err(e) => {
                    if quadrature_failure.is_none() {
                        quadrature_failure = Some(format!("u = {u}, x = {x}: {e}"));
                        worst_x = Complex64::new(x, 0.0);
                    }
                }
            }
        }
        match grid_stats(&transformed, cp, &config.grid)? {
            Ok(stats) => {
                if stats.min_re < min_re {
                    min_re = stats.min_re;
                    argmin_z = stats.argmin_z;
                }
                sense_gap_min = sense_gap_min.min(stats.sense_gap_min);
            }
            Err(z) => {
                singular_at.get_or_insert(z);
            }
        }
    }

    let margins_ok = worst_margin_drop <= MARGIN_TOLERANCE;
    let oracle_ok = quadrature_failure.is_none() && worst_oracle_error <= ORACLE_TOLERANCE;
    let detail = Some(TrialDetail::Bernardi {
        worst_margin_drop,
        worst_oracle_error,
        quadrature_failure,
    });
    if let Some(z) = singular_at {
        return Ok(singular_report(Suite::Bernardi, base, z, detail));
    }
    let (verdict, witness_z) = match (margins_ok, oracle_ok) {
        (true, true) => (Verdict::Pass, None),
        (false, _) => (Verdict::Fail, Some(argmin_z)),
        (true, false) => (Verdict::Fail, Some(worst_x)),
    };
    Ok(TrialReport {
        suite: Suite::Bernardi,
        trial_index: 0,
        seed_used: 0,
        margin: base,
        min_re: Some(min_re),
        sense_gap_min: Some(sense_gap_min),
        verdict,
        witness_z,
        detail,
    })
}

/// Runs one trial of one suite from its recorded seed.
pub fn run_trial(config: &SuiteConfig, suite: Suite, trial_index: u32) -> Result<TrialReport> {
    let seed_used = config.trial_seed(trial_index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed_used);
    let mut report = match suite {
        Suite::Sufficiency => {
            let f = sample::sample_in_class_from(&config.class, config.truncation, &mut rng)?;
            sufficiency_trial(&f, &config.class, &config.grid)?
        }
        Suite::Sense => {
            let f = sample::sample_in_class_from(&config.class, config.truncation, &mut rng)?;
            sense_trial(&f, &config.class, &config.grid)?
        }
        Suite::Convex => convex_trial(config, &mut rng)?,
        Suite::Convolution => convolution_trial(config, &mut rng)?,
        Suite::Bernardi => bernardi_trial(config, &mut rng)?,
    };
    report.trial_index = trial_index;
    report.seed_used = seed_used;
    Ok(report)
}

pub fn run_suite(config: &SuiteConfig, suite: Suite, exec: Execution) -> Result<SuiteReport> {
    config.validate()?;
    let trials = exec
        .map_indexed(config.trials as usize, |i| run_trial(config, suite, i as u32))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let count = |v: Verdict| trials.iter().filter(|t| t.verdict == v).count() as u32;
    Ok(SuiteReport {
        suite,
        seed: config.seed,
        config: config.clone(),
        passed: count(Verdict::Pass),
        failed: count(Verdict::Fail),
        singular: count(Verdict::Singular),
        trials,
    })
}

/// Every suite listed in the config, in listed order.
pub fn run_suites(config: &SuiteConfig, exec: Execution) -> Result<Vec<SuiteReport>> {
    config
        .suites
        .iter()
        .map(|&suite| run_suite(config, suite, exec))
        .collect()
}

/// Trial reports of the `convex` and `convolution` suites in the config.
pub fn closure_suite(config: &SuiteConfig) -> Result<Vec<TrialReport>> {
    let mut out = Vec::new();
    for &suite in &config.suites {
        if matches!(suite, Suite::Convex | Suite::Convolution) {
            out.extend(run_suite(config, suite, Execution::default())?.trials);
        }
    }
    Ok(out)
}
