//! Seeded multi-trial experiment runner and comparison statistics.
//!
//! Trials are seed-paired across algorithms: trial `i` of every algorithm
//! runs with `base_seed + i`, which reduces between-algorithm variance.
//! Trials execute in parallel; results are ordered deterministically by
//! algorithm, then trial index, so serial and parallel runs aggregate
//! identically.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::cspace::Environment;
use crate::planner::{plan, PlanError, PlanResult, PlannerParams};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("experiment needs at least 2 trials, got {0}")]
    TooFewTrials(u32),
    #[error("experiment has no algorithms")]
    NoAlgorithms,
    #[error("algorithm {0} checkpoints differ from {1}")]
    CheckpointMismatch(String, String),
    #[error("welch test needs at least 2 observations per sample")]
    TooFewObservations,
    #[error("trial failed for {label} (seed {seed}): {source}")]
    TrialFailed {
        label: String,
        seed: u64,
        source: PlanError,
    },
}

/// A named planner configuration entered in an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmEntry {
    pub label: String,
    pub params: PlannerParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub algorithms: Vec<AlgorithmEntry>,
    pub trials: u32,
    pub base_seed: u64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.trials < 2 {
            return Err(BenchError::TooFewTrials(self.trials));
        }
        let Some(first) = self.algorithms.first() else {
            return Err(BenchError::NoAlgorithms);
        };
        for a in &self.algorithms[1..] {
            if a.params.checkpoints != first.params.checkpoints {
                return Err(BenchError::CheckpointMismatch(
                    a.label.clone(),
                    first.label.clone(),
                ));
            }
        }
        Ok(())
    }
}

/// All trial results for one algorithm, ordered by trial index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmRuns {
    pub label: String,
    pub results: Vec<PlanResult>,
}

/// Run every (algorithm, trial) combination. Trial `i` of each algorithm
/// uses seed `base_seed + i`; output order is by algorithm declaration,
/// then trial index, regardless of scheduling.
pub fn run_experiment(
    env: &Environment,
    spec: &ExperimentSpec,
) -> Result<Vec<AlgorithmRuns>, BenchError> {
    spec.validate()?;
    let jobs: Vec<(usize, u32)> = (0..spec.algorithms.len())
        .flat_map(|a| (0..spec.trials).map(move |t| (a, t)))
        .collect();
    let outcomes: Vec<Result<PlanResult, BenchError>> = jobs
        .par_iter()
        .map(|&(a, t)| {
            let entry = &spec.algorithms[a];
            let mut params = entry.params.clone();
            params.rng_seed = spec.base_seed.wrapping_add(t as u64);
            plan(env, &params).map_err(|source| BenchError::TrialFailed {
                label: entry.label.clone(),
                seed: params.rng_seed,
                source,
            })
        })
        .collect();

    let mut runs: Vec<AlgorithmRuns> = spec
        .algorithms
        .iter()
        .map(|a| AlgorithmRuns {
            label: a.label.clone(),
            results: Vec::with_capacity(spec.trials as usize),
        })
        .collect();
    for (job, outcome) in jobs.iter().zip(outcomes) {
        runs[job.0].results.push(outcome?);
    }
    Ok(runs)
}

/// Mean, standard error and solve rate for one checkpoint cell. Cells with
/// fewer than two solved trials have no defined statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointCell {
    pub iteration: u32,
    pub mean: Option<f64>,
    pub standard_error: Option<f64>,
    pub solved: u32,
    pub trials: u32,
}

impl CheckpointCell {
    pub fn solve_rate(&self) -> f64 {
        self.solved as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub label: String,
    pub cells: Vec<CheckpointCell>,
}

fn mean_of(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with the n-1 denominator.
fn variance_of(xs: &[f64]) -> f64 {
    let m = mean_of(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Per-checkpoint mean and standard error over solved trials. The solve
/// rate records what fraction of trials had a solution at that checkpoint.
pub fn aggregate(runs: &[AlgorithmRuns]) -> Vec<AggregateRow> {
    runs.iter()
        .map(|run| {
            let checkpoints: Vec<u32> = run
                .results
                .first()
                .map(|r| r.checkpoint_costs.iter().map(|c| c.iteration).collect())
                .unwrap_or_default();
            let trials = run.results.len() as u32;
            let cells = checkpoints
                .iter()
                .map(|&iteration| {
                    let costs: Vec<f64> = run
                        .results
                        .iter()
                        .filter_map(|r| r.cost_at(iteration))
                        .collect();
                    let solved = costs.len() as u32;
                    let (mean, standard_error) = if costs.len() >= 2 {
                        let se = (variance_of(&costs) / costs.len() as f64).sqrt();
                        (Some(mean_of(&costs)), Some(se))
                    } else {
                        (None, None)
                    };
                    CheckpointCell {
                        iteration,
                        mean,
                        standard_error,
                        solved,
                        trials,
                    }
                })
                .collect();
            AggregateRow {
                label: run.label.clone(),
                cells,
            }
        })
        .collect()
}

/// Costs of solved trials at one checkpoint, in trial order.
pub fn costs_at(run: &AlgorithmRuns, iteration: u32) -> Vec<f64> {
    run.results
        .iter()
        .filter_map(|r| r.cost_at(iteration))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TTestReport {
    pub label_a: String,
    pub label_b: String,
    pub checkpoint: u32,
    pub t: f64,
    /// Welch-Satterthwaite degrees of freedom.
    pub df: f64,
    /// Two-tailed p-value.
    pub p: f64,
}

/// Welch's unequal-variance two-sample t-test with a two-tailed p-value.
/// Zero variance in both samples with equal means yields `p = 1` by
/// convention; with different means the difference is treated as certain.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTestReport, BenchError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(BenchError::TooFewObservations);
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean_of(a), mean_of(b));
    let (va, vb) = (variance_of(a), variance_of(b));
    let se2 = va / na + vb / nb;
    let (t, df, p) = if se2 == 0.0 {
        let df = na + nb - 2.0;
        if ma == mb {
            (0.0, df, 1.0)
        } else {
            (f64::INFINITY * (ma - mb).signum(), df, 0.0)
        }
    } else {
        let t = (ma - mb) / se2.sqrt();
        let df = se2 * se2
            / ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
        let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
        let p = 2.0 * dist.cdf(-t.abs());
        (t, df, p.min(1.0))
    };
    Ok(TTestReport {
        label_a: String::new(),
        label_b: String::new(),
        checkpoint: 0,
        t,
        df,
        p,
    })
}

/// Welch tests for every pair of algorithms at every shared checkpoint,
/// in declaration order.
pub fn pairwise_t_tests(runs: &[AlgorithmRuns]) -> Vec<TTestReport> {
    let checkpoints: Vec<u32> = runs
        .first()
        .and_then(|r| r.results.first())
        .map(|r| r.checkpoint_costs.iter().map(|c| c.iteration).collect())
        .unwrap_or_default();
    let mut reports = Vec::new();
    for i in 0..runs.len() {
        for j in (i + 1)..runs.len() {
            for &cp in &checkpoints {
                let a = costs_at(&runs[i], cp);
                let b = costs_at(&runs[j], cp);
                if let Ok(mut report) = welch_t_test(&a, &b) {
                    report.label_a = runs[i].label.clone();
                    report.label_b = runs[j].label.clone();
                    report.checkpoint = cp;
                    reports.push(report);
                }
            }
        }
    }
    reports
}

fn format_cell(cell: &CheckpointCell) -> String {
    match (cell.mean, cell.standard_error) {
        (Some(m), Some(se)) => {
            if cell.solved < cell.trials {
                format!("{m:.2} ({se:.2}) n={}", cell.solved)
            } else {
                format!("{m:.2} ({se:.2})")
            }
        }
        _ => "—".to_string(),
    }
}

/// Plain-text rendition of the aggregate table: one row per algorithm,
/// one column per checkpoint, cells as `mean (standard error)`.
pub fn format_table(rows: &[AggregateRow]) -> String {
    let checkpoints: Vec<u32> = rows
        .first()
        .map(|r| r.cells.iter().map(|c| c.iteration).collect())
        .unwrap_or_default();
    let mut header = vec!["Algorithm".to_string()];
    header.extend(checkpoints.iter().map(|c| format!("{c} iterations")));
    let mut body: Vec<Vec<String>> = vec![header];
    for row in rows {
        let mut line = vec![row.label.clone()];
        line.extend(row.cells.iter().map(format_cell));
        body.push(line);
    }
    let cols = body[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| body.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, line) in body.iter().enumerate() {
        let rendered: Vec<String> = line
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<width$}", width = w))
            .collect();
        out.push_str(rendered.join("  ").trim_end());
        out.push('\n');
        if i == 0 {
            let total: usize = widths.iter().sum::<usize>() + 2 * (cols - 1);
            out.push_str(&"-".repeat(total));
            out.push('\n');
        }
    }
    out
}

/// Machine-readable rendition: CSV with full-precision statistics and
/// solve rates.
pub fn format_table_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from("algorithm,iteration,mean,standard_error,solved,trials\n");
    for row in rows {
        for cell in &row.cells {
            let mean = cell.mean.map_or(String::new(), |m| m.to_string());
            let se = cell.standard_error.map_or(String::new(), |s| s.to_string());
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.label, cell.iteration, mean, se, cell.solved, cell.trials
            ));
        }
    }
    out
}

pub fn format_t_tests(reports: &[TTestReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!(
            "{} vs {} at {} iterations: t({:.2}) = {:.2}, p = {:.4}\n",
            r.label_a, r.label_b, r.checkpoint, r.df, r.t, r.p
        ));
    }
    out
}

pub fn format_t_tests_csv(reports: &[TTestReport]) -> String {
    let mut out = String::from("a,b,iteration,t,df,p\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.label_a, r.label_b, r.checkpoint, r.t, r.df, r.p
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cspace::{point2d_env, Config};
    use crate::geometry::{ObstacleRegion, Permeability, Point2, Shape, World};
    use crate::planner::CheckpointCost;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn small_env() -> Environment {
        let world = World::new(
            Point2::new(0.0, 0.0),
            Point2::new(40.0, 40.0),
            vec![ObstacleRegion::new(
                Shape::rect(Point2::new(18.0, 0.0), Point2::new(22.0, 40.0)).unwrap(),
                Permeability::Permeable(50.0),
            )
            .unwrap()],
        )
        .unwrap();
        point2d_env(
            world,
            Config::from_xy(5.0, 20.0),
            Config::from_xy(35.0, 20.0),
        )
        .unwrap()
    }

    fn small_spec() -> ExperimentSpec {
        let mut a = PlannerParams::new(200, 3.0, 0);
        a.checkpoints = vec![100, 200];
        ExperimentSpec {
            algorithms: vec![
                AlgorithmEntry {
                    label: "first".into(),
                    params: a.clone(),
                },
                AlgorithmEntry {
                    label: "second".into(),
                    params: a,
                },
            ],
            trials: 2,
            base_seed: 42,
        }
    }

    #[test]
    fn experiment_pairs_seeds_across_algorithms() {
        let env = small_env();
        let runs = run_experiment(&env, &small_spec()).unwrap();
        assert_eq!(runs.len(), 2);
        for run in &runs {
            assert_eq!(run.results.len(), 2);
            assert_eq!(run.results[0].rng_seed, 42);
            assert_eq!(run.results[1].rng_seed, 43);
        }
        // Identical params + paired seeds -> identical results across the
        // two algorithm slots.
        assert_eq!(runs[0].results, runs[1].results);
    }

    #[test]
    fn experiment_repeats_identically() {
        let env = small_env();
        let a = run_experiment(&env, &small_spec()).unwrap();
        let b = run_experiment(&env, &small_spec()).unwrap();
        assert_eq!(a, b);
        assert_eq!(aggregate(&a), aggregate(&b));
    }

    #[test]
    fn experiment_rejects_single_trial() {
        let mut spec = small_spec();
        spec.trials = 1;
        assert!(matches!(
            spec.validate(),
            Err(BenchError::TooFewTrials(1))
        ));
    }

    fn result_with_costs(iterations: &[u32], costs: &[Option<f64>], seed: u64) -> PlanResult {
        PlanResult {
            path: costs.last().and_then(|c| c.map(|_| vec![])),
            path_length: 0.0,
            n_collision: 0,
            total_cost: 0.0,
            checkpoint_costs: iterations
                .iter()
                .zip(costs)
                .map(|(&iteration, &cost)| CheckpointCost { iteration, cost })
                .collect(),
            tree_size: 1,
            rng_seed: seed,
        }
    }

    #[test]
    fn aggregate_mean_and_standard_error() {
        let runs = vec![AlgorithmRuns {
            label: "x".into(),
            results: vec![
                result_with_costs(&[100], &[Some(10.0)], 0),
                result_with_costs(&[100], &[Some(14.0)], 1),
            ],
        }];
        let rows = aggregate(&runs);
        let cell = &rows[0].cells[0];
        assert_relative_eq!(cell.mean.unwrap(), 12.0);
        assert_relative_eq!(cell.standard_error.unwrap(), 2.0);
        assert_eq!(cell.solved, 2);
    }

    #[test]
    fn aggregate_zero_spread_has_zero_standard_error() {
        let runs = vec![AlgorithmRuns {
            label: "x".into(),
            results: vec![
                result_with_costs(&[100], &[Some(7.0)], 0),
                result_with_costs(&[100], &[Some(7.0)], 1),
                result_with_costs(&[100], &[Some(7.0)], 2),
            ],
        }];
        let cell = &aggregate(&runs)[0].cells[0];
        assert_eq!(cell.standard_error.unwrap(), 0.0);
    }

    #[test]
    fn aggregate_excludes_unsolved_trials() {
        let runs = vec![AlgorithmRuns {
            label: "x".into(),
            results: vec![
                result_with_costs(&[100], &[Some(10.0)], 0),
                result_with_costs(&[100], &[None], 1),
                result_with_costs(&[100], &[Some(14.0)], 2),
            ],
        }];
        let cell = &aggregate(&runs)[0].cells[0];
        assert_eq!(cell.solved, 2);
        assert_relative_eq!(cell.mean.unwrap(), 12.0);
        assert_relative_eq!(cell.solve_rate(), 2.0 / 3.0);
    }

    #[test]
    fn aggregate_marks_undefined_cells() {
        let runs = vec![AlgorithmRuns {
            label: "x".into(),
            results: vec![
                result_with_costs(&[100], &[Some(10.0)], 0),
                result_with_costs(&[100], &[None], 1),
            ],
        }];
        let cell = &aggregate(&runs)[0].cells[0];
        assert!(cell.mean.is_none());
        assert_eq!(format_cell(cell), "—");
    }

    #[test]
    fn welch_identical_samples() {
        let a = vec![1.0, 2.0, 3.0];
        let r = welch_t_test(&a, &a).unwrap();
        assert_eq!(r.t, 0.0);
        assert_relative_eq!(r.p, 1.0);
    }

    #[test]
    fn welch_reference_case() {
        // Cross-checked against scipy.stats.ttest_ind(equal_var=False).
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [6.0, 7.0, 8.0, 9.0, 10.0];
        let r = welch_t_test(&a, &b).unwrap();
        assert_relative_eq!(r.t, -5.0, epsilon = 1e-12);
        assert_relative_eq!(r.df, 8.0, epsilon = 1e-12);
        assert_relative_eq!(r.p, 0.001052825793366539, epsilon = 1e-9);
    }

    #[test]
    fn welch_unequal_sizes_reference_case() {
        // Cross-checked against scipy.stats.ttest_ind(equal_var=False).
        let a = [10.0, 12.5, 11.1, 9.8, 13.0, 10.4];
        let b = [8.1, 9.0, 7.5, 8.8];
        let r = welch_t_test(&a, &b).unwrap();
        assert_relative_eq!(r.t, 4.315663322501288, epsilon = 1e-9);
        assert_relative_eq!(r.df, 7.718172194732031, epsilon = 1e-9);
        assert_relative_eq!(r.p, 0.002784955209450808, epsilon = 1e-9);
    }

    #[test]
    fn welch_equal_variance_equal_n_has_pooled_df() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [11.0, 12.0, 13.0, 14.0];
        let r = welch_t_test(&a, &b).unwrap();
        assert_relative_eq!(r.df, 6.0, epsilon = 1e-12);
    }

    #[test]
    fn welch_zero_variance_equal_means() {
        let a = [5.0, 5.0, 5.0];
        let r = welch_t_test(&a, &a).unwrap();
        assert_eq!(r.p, 1.0);
        assert_eq!(r.t, 0.0);
    }

    #[test]
    fn welch_rejects_tiny_samples() {
        assert!(matches!(
            welch_t_test(&[1.0], &[1.0, 2.0]),
            Err(BenchError::TooFewObservations)
        ));
    }

    #[test]
    fn table_formatting_matches_layout() {
        let rows = vec![AggregateRow {
            label: "rrtstar".into(),
            cells: vec![CheckpointCell {
                iteration: 1000,
                mean: Some(971.19),
                standard_error: Some(8.53),
                solved: 100,
                trials: 100,
            }],
        }];
        let text = format_table(&rows);
        assert!(text.contains("971.19 (8.53)"), "{text}");
        assert!(text.contains("1000 iterations"));
    }

    #[test]
    fn table_rows_follow_declaration_order() {
        let rows = vec![
            AggregateRow {
                label: "zebra".into(),
                cells: vec![],
            },
            AggregateRow {
                label: "ant".into(),
                cells: vec![],
            },
        ];
        let text = format_table(&rows);
        let zebra = text.find("zebra").unwrap();
        let ant = text.find("ant").unwrap();
        assert!(zebra < ant);
    }

    proptest! {
        #[test]
        fn welch_is_antisymmetric(
            a in proptest::collection::vec(-50.0..50.0f64, 2..20),
            b in proptest::collection::vec(-50.0..50.0f64, 2..20),
        ) {
            let ab = welch_t_test(&a, &b).unwrap();
            let ba = welch_t_test(&b, &a).unwrap();
            prop_assert!((ab.t + ba.t).abs() <= 1e-9 * ab.t.abs().max(1.0));
            prop_assert!((ab.p - ba.p).abs() <= 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab.p));
        }

        #[test]
        fn aggregation_is_permutation_invariant(order in Just(()).prop_perturb(|_, mut rng| {
            let mut idx: Vec<usize> = (0..6).collect();
            for i in (1..idx.len()).rev() {
                let j = (rng.next_u64() % (i as u64 + 1)) as usize;
                idx.swap(i, j);
            }
            idx
        })) {
            let base: Vec<PlanResult> = (0..6)
                .map(|i| result_with_costs(&[100], &[Some(10.0 + i as f64)], i as u64))
                .collect();
            let shuffled: Vec<PlanResult> = order.iter().map(|&i| base[i].clone()).collect();
            let a = aggregate(&[AlgorithmRuns { label: "x".into(), results: base }]);
            let b = aggregate(&[AlgorithmRuns { label: "x".into(), results: shuffled }]);
            prop_assert!((a[0].cells[0].mean.unwrap() - b[0].cells[0].mean.unwrap()).abs() < 1e-12);
            prop_assert!(
                (a[0].cells[0].standard_error.unwrap() - b[0].cells[0].standard_error.unwrap()).abs()
                    < 1e-12
            );
        }
    }
}
