//! Extreme-learning-machine fitness approximation.
//!
//! A single random hidden layer (weights uniform on the open interval
//! (-1,1), biases uniform on (0,1)) feeds a linear output whose weights are
//! the minimum-norm least-squares solution of `H beta = T`, computed through
//! an SVD with relative singular-value truncation. Targets are affinely
//! mapped to `[0, 1]` before solving: objective magnitudes around 1e6 would
//! otherwise dominate the conditioning of the solve.
//!
//! The module is generic over the real scalar; the crate root exports the
//! double-precision alias used by the engine.

use crate::error::{Error, Result};
use crate::instance::Individual;
use crate::rng::Sampler;
use nalgebra::{DMatrix, DVector, RealField};
use num_traits::{FromPrimitive, ToPrimitive};
use std::collections::HashMap;

/// Relative singular-value cutoff for the pseudo-inverse.
const SVD_RTOL: f64 = 1e-10;

/// Anything that can score an individual. Implemented by the ELM and by the
/// exact evaluator (for the baseline mode and for tests that want a perfect
/// "surrogate").
pub trait FitnessEstimator {
    fn estimate(&self, ind: &Individual) -> f64;

    fn estimate_many(&self, inds: &[Individual]) -> Vec<f64> {
        inds.iter().map(|ind| self.estimate(ind)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Sigmoid,
    Tanh,
}

impl Activation {
    fn apply<F: RealField + Copy>(self, u: F) -> F {
        match self {
            Activation::Sigmoid => F::one() / (F::one() + (-u).exp()),
            Activation::Tanh => u.tanh(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum HiddenPolicy {
    /// `min(2 * inputs, samples - 1)`, at least 1, re-chosen as the set grows.
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct ElmConfig {
    pub hidden: HiddenPolicy,
    pub activation: Activation,
}

impl Default for ElmConfig {
    fn default() -> Self {
        Self {
            hidden: HiddenPolicy::Auto,
            activation: Activation::Sigmoid,
        }
    }
}

impl ElmConfig {
    pub fn hidden_count(&self, n_inputs: usize, n_samples: usize) -> usize {
        match self.hidden {
            HiddenPolicy::Fixed(h) => h,
            HiddenPolicy::Auto => (2 * n_inputs).min(n_samples.saturating_sub(1)).max(1),
        }
    }
}

/// Exactly evaluated (input, fitness) pairs. A later value for an input
/// already present overwrites the earlier one.
#[derive(Debug, Clone, Default)]
pub struct TrainingSet<F> {
    inputs: Vec<Vec<bool>>,
    targets: Vec<F>,
    index: HashMap<Vec<bool>, usize>,
}

impl<F: RealField + Copy> TrainingSet<F> {
    pub fn new() -> Self {
        Self {
            inputs: Vec::new(),
            targets: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn upsert(&mut self, ind: &Individual, target: F) -> Result<()> {
        if !target.is_finite() {
            return Err(Error::Validation("non-finite training target".into()));
        }
        let key: Vec<bool> = ind.plants.iter().chain(ind.depots.iter()).copied().collect();
        match self.index.get(&key) {
            Some(&at) => self.targets[at] = target,
            None => {
                self.index.insert(key.clone(), self.inputs.len());
                self.inputs.push(key);
                self.targets.push(target);
            }
        }
        Ok(())
    }

    pub fn inputs(&self) -> &[Vec<bool>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[F] {
        &self.targets
    }
}

/// Minimum-norm least-squares solution of `a x = b` via SVD, zeroing
/// singular values below `rtol * sigma_max`.
pub fn least_squares_min_norm<F: RealField + Copy>(
    a: &DMatrix<F>,
    b: &DVector<F>,
    rtol: F,
) -> Result<DVector<F>> {
    let svd = a.clone().svd(true, true);
    let sigma_max = svd
        .singular_values
        .iter()
        .fold(F::zero(), |acc, &s| if s > acc { s } else { acc });
    let eps = rtol * sigma_max;
    svd.solve(b, eps)
        .map(|solution| DVector::from_column_slice(solution.as_slice()))
        .map_err(|msg| Error::Domain(msg.to_string()))
}

/// Random-hidden-layer regression model.
#[derive(Debug, Clone)]
pub struct ElmModel<F> {
    /// `h x n` hidden weights, one row per hidden node.
    hidden_weights: DMatrix<F>,
    hidden_bias: DVector<F>,
    /// `h + 1` output weights; index 0 is the output bias.
    output_weights: DVector<F>,
    activation: Activation,
    trained: bool,
    target_offset: F,
    target_scale: F,
}

impl<F: RealField + FromPrimitive + ToPrimitive + Copy> ElmModel<F> {
    /// Fresh random hidden layer; output weights stay zero until trained.
    ///
    /// Draws are node-major (weights of node `i`, then its bias), so two
    /// models built from the same sampler state with different `h` share
    /// their first `min(h1, h2)` nodes.
    pub fn init(n_inputs: usize, hidden: usize, sampler: &mut impl Sampler) -> Result<Self> {
        if n_inputs < 1 {
            return Err(Error::InvalidConfig("ELM needs at least one input".into()));
        }
        if hidden < 1 {
            return Err(Error::InvalidConfig(
                "ELM needs at least one hidden node".into(),
            ));
        }
        let mut weights = Vec::with_capacity(hidden * n_inputs);
        let mut biases = Vec::with_capacity(hidden);
        for _ in 0..hidden {
            for _ in 0..n_inputs {
                let u = sampler.unit_open();
                weights.push(F::from_f64(2.0 * u - 1.0).unwrap());
            }
            biases.push(F::from_f64(sampler.unit_open()).unwrap());
        }
        Ok(Self {
            hidden_weights: DMatrix::from_row_slice(hidden, n_inputs, &weights),
            hidden_bias: DVector::from_vec(biases),
            output_weights: DVector::zeros(hidden + 1),
            activation: Activation::Sigmoid,
            trained: false,
            target_offset: F::zero(),
            target_scale: F::one(),
        })
    }

    pub fn with_activation(mut self, activation: Activation) -> Self {
        self.activation = activation;
        self
    }

    pub fn n_inputs(&self) -> usize {
        self.hidden_weights.ncols()
    }

    pub fn hidden_count(&self) -> usize {
        self.hidden_weights.nrows()
    }

    pub fn hidden_weights(&self) -> &DMatrix<F> {
        &self.hidden_weights
    }

    pub fn hidden_bias(&self) -> &DVector<F> {
        &self.hidden_bias
    }

    pub fn output_weights(&self) -> &DVector<F> {
        &self.output_weights
    }

    pub fn is_trained(&self) -> bool {
        self.trained
    }

    fn feature_row(&self, bits: &[F]) -> DVector<F> {
        let h = self.hidden_count();
        let mut row = DVector::zeros(h + 1);
        row[0] = F::one();
        for i in 0..h {
            let mut u = self.hidden_bias[i];
            for (k, &x) in bits.iter().enumerate() {
                u += self.hidden_weights[(i, k)] * x;
            }
            row[i + 1] = self.activation.apply(u);
        }
        row
    }

    fn bits_of(input: &[bool]) -> Vec<F> {
        input
            .iter()
            .map(|&b| if b { F::one() } else { F::zero() })
            .collect()
    }

    /// Solve for the output weights against the given training set.
    pub fn train(&mut self, set: &TrainingSet<F>) -> Result<()> {
        if set.is_empty() {
            return Err(Error::InvalidConfig(
                "cannot train on an empty training set".into(),
            ));
        }
        let n = set.len();
        let mut t_min = set.targets()[0];
        let mut t_max = set.targets()[0];
        for &t in set.targets() {
            if t < t_min {
                t_min = t;
            }
            if t > t_max {
                t_max = t;
            }
        }
        let range = t_max - t_min;
        let scale = if range > F::zero() { range } else { F::one() };

        let mut h_mat = DMatrix::zeros(n, self.hidden_count() + 1);
        for (r, input) in set.inputs().iter().enumerate() {
            let row = self.feature_row(&Self::bits_of(input));
            h_mat.row_mut(r).copy_from(&row.transpose());
        }
        let t_vec = DVector::from_iterator(n, set.targets().iter().map(|&t| (t - t_min) / scale));

        let rtol = F::from_f64(SVD_RTOL).unwrap();
        self.output_weights = least_squares_min_norm(&h_mat, &t_vec, rtol)?;
        self.target_offset = t_min;
        self.target_scale = scale;
        self.trained = true;
        Ok(())
    }

    /// Predicted fitness, de-normalized back to target units.
    pub fn predict(&self, ind: &Individual) -> Result<F> {
        if !self.trained {
            return Err(Error::Untrained);
        }
        let bits: Vec<F> = ind
            .plants
            .iter()
            .chain(ind.depots.iter())
            .map(|&b| if b { F::one() } else { F::zero() })
            .collect();
        if bits.len() != self.n_inputs() {
            return Err(Error::Validation(format!(
                "input length {} does not match model inputs {}",
                bits.len(),
                self.n_inputs()
            )));
        }
        let features = self.feature_row(&bits);
        let raw = features.dot(&self.output_weights);
        Ok(self.target_offset + raw * self.target_scale)
    }

    /// Largest absolute residual over the training set, in target units.
    pub fn max_training_residual(&self, set: &TrainingSet<F>) -> Result<F> {
        if !self.trained {
            return Err(Error::Untrained);
        }
        let mut worst = F::zero();
        for (input, &target) in set.inputs().iter().zip(set.targets()) {
            let features = self.feature_row(&Self::bits_of(input));
            let raw = features.dot(&self.output_weights);
            let predicted = self.target_offset + raw * self.target_scale;
            let err = (predicted - target).abs();
            if err > worst {
                worst = err;
            }
        }
        Ok(worst)
    }

    /// Euclidean norm of the training residual, in target units.
    pub fn training_residual_norm(&self, set: &TrainingSet<F>) -> Result<F> {
        if !self.trained {
            return Err(Error::Untrained);
        }
        let mut sum = F::zero();
        for (input, &target) in set.inputs().iter().zip(set.targets()) {
            let features = self.feature_row(&Self::bits_of(input));
            let raw = features.dot(&self.output_weights);
            let predicted = self.target_offset + raw * self.target_scale;
            let err = predicted - target;
            sum += err * err;
        }
        Ok(sum.sqrt())
    }
}

impl<F: RealField + FromPrimitive + ToPrimitive + Copy> FitnessEstimator for ElmModel<F> {
    fn estimate(&self, ind: &Individual) -> f64 {
        self.predict(ind)
            .expect("estimator used before training")
            .to_f64()
            .expect("prediction convertible to f64")
    }
}
