//! L2-regularized binary logistic regression.
//!
//! The objective is `J(w, b) = 0.5*||w||^2 + C * sum_i ln(1 + exp(-y_i (w.x_i + b)))`
//! with labels mapped from {0,1} to {-1,+1} internally and the intercept left
//! out of the penalty. Two solvers are provided: a deterministic full-batch
//! gradient descent with backtracking line search (the reference), and an
//! incremental average-gradient solver that visits samples in a seeded
//! shuffled order and is validated against the batch solver.

use crate::archive::{ArchiveReader, ArchiveWriter, Encoder, SectionTag};
use crate::error::{Error, Result};
use crate::sparse::SparseVector;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::Path;

/// Training algorithm selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Solver {
    #[default]
    BatchGd,
    AvgIncremental,
}

impl Solver {
    pub fn as_str(self) -> &'static str {
        match self {
            Solver::BatchGd => "batch_gd",
            Solver::AvgIncremental => "avg_incremental",
        }
    }

    pub fn parse(s: &str) -> Result<Solver> {
        match s {
            "batch_gd" => Ok(Solver::BatchGd),
            "avg_incremental" => Ok(Solver::AvgIncremental),
            other => Err(Error::InvalidParameter(format!("unknown solver `{other}`"))),
        }
    }
}

/// Knobs for [`train`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainOptions {
    pub c: f64,
    pub solver: Solver,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            c: 1.0,
            solver: Solver::BatchGd,
            seed: 0,
            tol: 1e-6,
            max_iter: 1000,
        }
    }
}

/// Solver bookkeeping carried with the trained weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverMeta {
    pub solver: Solver,
    pub iterations: usize,
    pub final_objective: f64,
    pub converged: bool,
}

/// A trained model: dense weights, unregularized intercept and metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelWeights {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub c: f64,
    pub meta: SolverMeta,
}

impl ModelWeights {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + exp(x))` without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn signed(label: u8) -> f64 {
    if label == 1 {
        1.0
    } else {
        -1.0
    }
}

fn check_training_data(rows: &[SparseVector], labels: &[u8]) -> Result<usize> {
    if rows.len() != labels.len() {
        return Err(Error::InvalidParameter(format!(
            "{} rows but {} labels",
            rows.len(),
            labels.len()
        )));
    }
    if rows.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least two training samples".into(),
        ));
    }
    let dim = rows[0].dim();
    for row in rows {
        if row.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: row.dim(),
            });
        }
    }
    for &l in labels {
        if l > 1 {
            return Err(Error::InvalidParameter(format!("label {l} is not 0/1")));
        }
    }
    if labels.iter().all(|&l| l == 1) || labels.iter().all(|&l| l == 0) {
        return Err(Error::SingleClass);
    }
    Ok(dim)
}

/// Exact objective value and analytic gradient at `(weights, intercept)`.
/// The gradient over the intercept is returned separately since it is not
/// regularized.
pub fn objective_and_gradient(
    weights: &[f64],
    intercept: f64,
    rows: &[SparseVector],
    labels: &[u8],
    c: f64,
) -> Result<(f64, Vec<f64>, f64)> {
    if rows.len() != labels.len() {
        return Err(Error::InvalidParameter(format!(
            "{} rows but {} labels",
            rows.len(),
            labels.len()
        )));
    }
    let dim = weights.len();
    let mut loss = 0.5 * weights.iter().map(|w| w * w).sum::<f64>();
    let mut grad: Vec<f64> = weights.to_vec();
    let mut grad_b = 0.0;

    for (row, &label) in rows.iter().zip(labels) {
        if row.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: row.dim(),
            });
        }
        let y = signed(label);
        let margin = y * (row.dot_dense(weights)? + intercept);
        loss += c * softplus(-margin);
        // d/df softplus(-y f) = -y * sigmoid(-y f)
        let coeff = c * (-y) * sigmoid(-margin);
        for (i, v) in row.iter() {
            grad[i] += coeff * v;
        }
        grad_b += coeff;
    }
    Ok((loss, grad, grad_b))
}

fn grad_inf_norm(grad: &[f64], grad_b: f64) -> f64 {
    grad.iter().map(|g| g.abs()).fold(grad_b.abs(), f64::max)
}

/// Deterministic full-batch gradient descent with Armijo backtracking.
fn train_batch_gd(
    rows: &[SparseVector],
    labels: &[u8],
    dim: usize,
    opts: &TrainOptions,
) -> Result<ModelWeights> {
    const ARMIJO: f64 = 1e-4;
    let mut weights = vec![0.0; dim];
    let mut intercept = 0.0;
    let mut step: f64 = 1.0;
    let mut iterations = 0;
    let mut converged = false;

    let (mut objective, mut grad, mut grad_b) =
        objective_and_gradient(&weights, intercept, rows, labels, opts.c)?;

    while iterations < opts.max_iter {
        if grad_inf_norm(&grad, grad_b) <= opts.tol {
            converged = true;
            break;
        }
        let grad_sq: f64 = grad.iter().map(|g| g * g).sum::<f64>() + grad_b * grad_b;

        // Backtrack from a slightly optimistic warm start.
        step = (step * 2.0).min(1e6);
        let mut accepted = false;
        for _ in 0..60 {
            let trial_w: Vec<f64> = weights
                .iter()
                .zip(&grad)
                .map(|(w, g)| w - step * g)
                .collect();
            let trial_b = intercept - step * grad_b;
            let (trial_obj, trial_grad, trial_grad_b) =
                objective_and_gradient(&trial_w, trial_b, rows, labels, opts.c)?;
            if trial_obj <= objective - ARMIJO * step * grad_sq {
                weights = trial_w;
                intercept = trial_b;
                objective = trial_obj;
                grad = trial_grad;
                grad_b = trial_grad_b;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        iterations += 1;
        if !accepted {
            // Step size underflowed; the iterate is numerically stationary.
            break;
        }
    }

    if !converged && grad_inf_norm(&grad, grad_b) <= opts.tol {
        converged = true;
    }
    Ok(ModelWeights {
        weights,
        intercept,
        c: opts.c,
        meta: SolverMeta {
            solver: Solver::BatchGd,
            iterations,
            final_objective: objective,
            converged,
        },
    })
}

/// Incremental average-gradient solver: keeps one loss-gradient scalar per
/// sample and updates a running aggregate, sweeping samples in a seeded
/// shuffled order each epoch. One `max_iter` unit is one epoch.
fn train_avg_incremental(
    rows: &[SparseVector],
    labels: &[u8],
    dim: usize,
    opts: &TrainOptions,
) -> Result<ModelWeights> {
    let n = rows.len();
    let mut weights = vec![0.0; dim];
    let mut intercept = 0.0;

    // Lipschitz bound for one sample's loss gradient plus the shared
    // regularizer contribution; the step is the SAG-style 1/L.
    let max_row_sq = rows
        .iter()
        .map(|r| r.iter().map(|(_, v)| v * v).sum::<f64>() + 1.0)
        .fold(0.0, f64::max);
    let lipschitz = 0.25 * opts.c * max_row_sq + 1.0 / n as f64;
    let step = 1.0 / lipschitz;

    // Stored per-sample loss-slope scalars, initialized at the origin where
    // sigma(0) = 1/2, plus their aggregate (sum of c * g_i * x_i).
    let mut slopes: Vec<f64> = labels.iter().map(|&l| -0.5 * signed(l)).collect();
    let mut agg = vec![0.0; dim];
    let mut agg_b = 0.0;
    for (row, &slope) in rows.iter().zip(&slopes) {
        for (i, v) in row.iter() {
            agg[i] += opts.c * slope * v;
        }
        agg_b += opts.c * slope;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut epochs = 0;
    let mut converged = false;

    while epochs < opts.max_iter {
        order.shuffle(&mut rng);
        for &idx in &order {
            let row = &rows[idx];
            let y = signed(labels[idx]);
            let margin = y * (row.dot_dense(&weights)? + intercept);
            let new_slope = -y * sigmoid(-margin);
            let delta = opts.c * (new_slope - slopes[idx]);
            for (i, v) in row.iter() {
                agg[i] += delta * v;
            }
            agg_b += delta;
            slopes[idx] = new_slope;

            // Gradient estimate of J/n: (aggregate + w) / n for the weight
            // block, aggregate_b / n for the intercept.
            let scale = step / n as f64;
            for (w, a) in weights.iter_mut().zip(&agg) {
                *w -= scale * (*a + *w);
            }
            intercept -= scale * agg_b;
        }
        epochs += 1;

        let (_, grad, grad_b) = objective_and_gradient(&weights, intercept, rows, labels, opts.c)?;
        if grad_inf_norm(&grad, grad_b) <= opts.tol {
            converged = true;
            break;
        }
    }

    let (objective, _, _) = objective_and_gradient(&weights, intercept, rows, labels, opts.c)?;
    Ok(ModelWeights {
        weights,
        intercept,
        c: opts.c,
        meta: SolverMeta {
            solver: Solver::AvgIncremental,
            iterations: epochs,
            final_objective: objective,
            converged,
        },
    })
}

/// Train a model. Requires at least two samples with both classes present.
pub fn train(rows: &[SparseVector], labels: &[u8], opts: &TrainOptions) -> Result<ModelWeights> {
    let dim = check_training_data(rows, labels)?;
    if opts.c <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "regularization parameter C must be positive, got {}",
            opts.c
        )));
    }
    match opts.solver {
        Solver::BatchGd => train_batch_gd(rows, labels, dim, opts),
        Solver::AvgIncremental => train_avg_incremental(rows, labels, dim, opts),
    }
}

/// Probability of the positive class, `sigma(w.x + b)`.
pub fn predict_proba(model: &ModelWeights, x: &SparseVector) -> Result<f64> {
    Ok(sigmoid(x.dot_dense(&model.weights)? + model.intercept))
}

/// Positive-class decision at the 0.5 threshold.
pub fn predict_label(model: &ModelWeights, x: &SparseVector) -> Result<u8> {
    Ok(u8::from(predict_proba(model, x)? >= 0.5))
}

/// Append the model section to an archive under construction (pipeline and
/// model can share one file).
pub fn write_model_into(writer: &mut ArchiveWriter, model: &ModelWeights) {
    writer.add(SectionTag::Model, encode_model(model));
}

/// Extract the model section from a parsed archive.
pub fn read_model_from(reader: &ArchiveReader) -> Result<ModelWeights> {
    decode_model(reader)
}

fn encode_model(model: &ModelWeights) -> Encoder {
    let mut enc = Encoder::new();
    enc.put_f64_slice(&model.weights);
    enc.put_f64(model.intercept);
    enc.put_f64(model.c);
    enc.put_u8(match model.meta.solver {
        Solver::BatchGd => 0,
        Solver::AvgIncremental => 1,
    });
    enc.put_u64(model.meta.iterations as u64);
    enc.put_f64(model.meta.final_objective);
    enc.put_bool(model.meta.converged);
    enc
}

fn decode_model(reader: &ArchiveReader) -> Result<ModelWeights> {
    let mut dec = reader.require(SectionTag::Model)?;
    let weights = dec.f64_vec()?;
    let intercept = dec.f64()?;
    let c = dec.f64()?;
    let solver = match dec.u8()? {
        0 => Solver::BatchGd,
        1 => Solver::AvgIncremental,
        other => {
            return Err(Error::Archive {
                section: "model".into(),
                message: format!("unknown solver tag {other}"),
            })
        }
    };
    let iterations = dec.u64()? as usize;
    let final_objective = dec.f64()?;
    let converged = dec.bool()?;
    dec.finish()?;
    Ok(ModelWeights {
        weights,
        intercept,
        c,
        meta: SolverMeta {
            solver,
            iterations,
            final_objective,
            converged,
        },
    })
}

/// Serialize a model into a standalone archive.
pub fn model_to_bytes(model: &ModelWeights) -> Vec<u8> {
    let mut writer = ArchiveWriter::new();
    writer.add(SectionTag::Model, encode_model(model));
    writer.finish()
}

/// Read a model back from archive bytes (standalone or combined).
pub fn model_from_bytes(bytes: &[u8]) -> Result<ModelWeights> {
    decode_model(&ArchiveReader::parse(bytes)?)
}

pub fn save_model(model: &ModelWeights, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, model_to_bytes(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelWeights> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    model_from_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(dim: usize, pairs: &[(usize, f64)]) -> SparseVector {
        SparseVector::from_pairs(dim, pairs.iter().copied())
    }

    // 2-D linearly separable toy set.
    fn separable() -> (Vec<SparseVector>, Vec<u8>) {
        let rows = vec![
            sv(2, &[(0, 1.0), (1, 1.0)]),
            sv(2, &[(0, 2.0), (1, 1.5)]),
            sv(2, &[(0, -1.0), (1, -1.0)]),
            sv(2, &[(0, -2.0), (1, -0.5)]),
        ];
        (rows, vec![1, 1, 0, 0])
    }

    #[test]
    fn zero_weights_loss_is_ln2() {
        let rows = vec![sv(1, &[(0, 1.0)])];
        let (loss, _, _) = objective_and_gradient(&[0.0], 0.0, &rows, &[1], 1.0).unwrap();
        assert!((loss - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_weights_gradient_hand_value() {
        let rows = vec![sv(1, &[(0, 1.0)])];
        let (_, grad, grad_b) = objective_and_gradient(&[0.0], 0.0, &rows, &[1], 1.0).unwrap();
        assert!((grad[0] - (-0.5)).abs() < 1e-12);
        assert!((grad_b - (-0.5)).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let dim = rng.gen_range(1..=30);
            let n = rng.gen_range(2..=50);
            let rows: Vec<SparseVector> = (0..n)
                .map(|_| {
                    let mut pairs: Vec<(usize, f64)> = Vec::new();
                    for i in 0..dim {
                        if rng.gen_bool(0.6) {
                            pairs.push((i, rng.gen_range(-2.0..2.0)));
                        }
                    }
                    SparseVector::from_pairs(dim, pairs)
                })
                .collect();
            let labels: Vec<u8> = (0..n).map(|_| u8::from(rng.gen_bool(0.5))).collect();
            let w: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b: f64 = rng.gen_range(-1.0..1.0);
            let c = 1.0;

            let (_, grad, grad_b) = objective_and_gradient(&w, b, &rows, &labels, c).unwrap();
            let h = 1e-5;
            let f = |w: &[f64], b: f64| objective_and_gradient(w, b, &rows, &labels, c).unwrap().0;
            for j in 0..dim {
                let mut wp = w.clone();
                let mut wm = w.clone();
                wp[j] += h;
                wm[j] -= h;
                let numeric = (f(&wp, b) - f(&wm, b)) / (2.0 * h);
                let denom = numeric.abs().max(grad[j].abs()).max(1.0);
                assert!(
                    (numeric - grad[j]).abs() / denom < 1e-5,
                    "weight gradient mismatch: {} vs {}",
                    grad[j],
                    numeric
                );
            }
            let numeric_b = (f(&w, b + h) - f(&w, b - h)) / (2.0 * h);
            let denom = numeric_b.abs().max(grad_b.abs()).max(1.0);
            assert!((numeric_b - grad_b).abs() / denom < 1e-5);
        }
    }

    #[test]
    fn batch_solver_fits_separable_data() {
        let (rows, labels) = separable();
        let model = train(&rows, &labels, &TrainOptions::default()).unwrap();
        for (row, &label) in rows.iter().zip(&labels) {
            assert_eq!(predict_label(&model, row).unwrap(), label);
        }
    }

    #[test]
    fn solvers_agree_on_objective() {
        let (rows, labels) = separable();
        let reference = train(
            &rows,
            &labels,
            &TrainOptions {
                tol: 1e-10,
                max_iter: 20_000,
                ..TrainOptions::default()
            },
        )
        .unwrap();
        for solver in [Solver::BatchGd, Solver::AvgIncremental] {
            let model = train(
                &rows,
                &labels,
                &TrainOptions {
                    solver,
                    tol: 1e-6,
                    max_iter: 20_000,
                    seed: 3,
                    ..TrainOptions::default()
                },
            )
            .unwrap();
            assert!(
                (model.meta.final_objective - reference.meta.final_objective).abs() < 1e-4,
                "{:?}: {} vs {}",
                solver,
                model.meta.final_objective,
                reference.meta.final_objective
            );
        }
    }

    #[test]
    fn objective_never_increases_under_batch_gd() {
        // Re-run training capturing the objective at a few horizons.
        let (rows, labels) = separable();
        let mut last = f64::INFINITY;
        for max_iter in [1, 2, 5, 10, 50] {
            let model = train(
                &rows,
                &labels,
                &TrainOptions {
                    max_iter,
                    tol: 0.0,
                    ..TrainOptions::default()
                },
            )
            .unwrap();
            assert!(model.meta.final_objective <= last + 1e-12);
            last = model.meta.final_objective;
        }
    }

    #[test]
    fn single_class_rejected() {
        let rows = vec![sv(1, &[(0, 1.0)]), sv(1, &[(0, 2.0)])];
        assert!(matches!(
            train(&rows, &[1, 1], &TrainOptions::default()).unwrap_err(),
            Error::SingleClass
        ));
    }

    #[test]
    fn predict_symmetric_prior() {
        let model = ModelWeights {
            weights: vec![0.0, 0.0],
            intercept: 0.0,
            c: 1.0,
            meta: SolverMeta {
                solver: Solver::BatchGd,
                iterations: 0,
                final_objective: 0.0,
                converged: true,
            },
        };
        assert_eq!(predict_proba(&model, &sv(2, &[(0, 5.0)])).unwrap(), 0.5);
    }

    #[test]
    fn negating_model_flips_probability() {
        let (rows, labels) = separable();
        let model = train(&rows, &labels, &TrainOptions::default()).unwrap();
        let negated = ModelWeights {
            weights: model.weights.iter().map(|w| -w).collect(),
            intercept: -model.intercept,
            ..model.clone()
        };
        for row in &rows {
            let p = predict_proba(&model, row).unwrap();
            let q = predict_proba(&negated, row).unwrap();
            assert!((p + q - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn probability_monotone_along_weights() {
        let model = ModelWeights {
            weights: vec![1.0, -2.0],
            intercept: 0.1,
            c: 1.0,
            meta: SolverMeta {
                solver: Solver::BatchGd,
                iterations: 0,
                final_objective: 0.0,
                converged: true,
            },
        };
        let mut last = 0.0;
        for t in 0..5 {
            let x = sv(2, &[(0, t as f64), (1, -(t as f64) * 2.0)]);
            let p = predict_proba(&model, &x).unwrap();
            assert!(p > last);
            last = p;
        }
    }

    #[test]
    fn model_round_trip_is_bit_identical() {
        let (rows, labels) = separable();
        let model = train(&rows, &labels, &TrainOptions::default()).unwrap();
        let restored = model_from_bytes(&model_to_bytes(&model)).unwrap();
        assert_eq!(restored, model);
        for row in &rows {
            let a = predict_proba(&model, row).unwrap();
            let b = predict_proba(&restored, row).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(restored.c, model.c);
        assert_eq!(restored.meta.solver, model.meta.solver);
        assert_eq!(restored.meta.iterations, model.meta.iterations);
    }

    #[test]
    fn predict_dimension_mismatch() {
        let model = ModelWeights {
            weights: vec![1.0, 2.0],
            intercept: 0.0,
            c: 1.0,
            meta: SolverMeta {
                solver: Solver::BatchGd,
                iterations: 0,
                final_objective: 0.0,
                converged: true,
            },
        };
        assert!(predict_proba(&model, &sv(3, &[(0, 1.0)])).is_err());
    }

    #[test]
    fn corrupt_model_file_errors() {
        let (rows, labels) = separable();
        let model = train(&rows, &labels, &TrainOptions::default()).unwrap();
        let mut bytes = model_to_bytes(&model);
        bytes.truncate(bytes.len() / 2);
        assert!(model_from_bytes(&bytes).is_err());
    }
}
