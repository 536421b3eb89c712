//! Parametrized-circuit regressors.
//!
//! Two circuit families share one parameter layout (per layer, per qubit, two
//! angles) and one readout (⟨Z⟩ on qubit 0):
//!
//! * **QNN**: angle embedding RX(x_j)·RZ(x_j) on every qubit, then `layers`
//!   blocks of RX(θ)·RZ(θ) per qubit followed by an open CNOT chain.
//! * **VQC**: a fixed feature map (H, RZ(x_j), CNOT chain) followed by a
//!   variational block of `layers` × (RY(θ)·RZ(θ) per qubit + CNOT chain).
//!
//! Expectations are mapped affinely onto the training-target range. Gradients
//! come from the parameter-shift rule, which is exact here because every angle
//! drives exactly one rotation gate with a Pauli generator.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{FeatureScaler, TargetRange};
use crate::error::{Error, Result};
use crate::metrics;
use crate::statevector::{Gate, QuantumState};

/// Qubit whose Pauli-Z expectation is the circuit output.
pub const READOUT_QUBIT: usize = 0;

/// Angles per qubit per layer.
pub const ROTATIONS_PER_QUBIT: usize = 2;

/// Half-width of the uniform initialisation interval.
pub const INIT_RANGE: f64 = 0.1;

/// Maps a circuit expectation in [−1, 1] to target units.
pub type OutputMap = TargetRange;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Qnn,
    Vqc,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Qnn => "qnn",
            ModelKind::Vqc => "vqc",
        }
    }
}

/// Circuit shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub model_kind: ModelKind,
    pub num_qubits: usize,
    pub layers: usize,
}

impl CircuitSpec {
    pub fn new(model_kind: ModelKind, num_qubits: usize, layers: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > crate::statevector::MAX_QUBITS {
            return Err(Error::QubitCount(num_qubits));
        }
        if layers == 0 {
            return Err(Error::Config("layers must be at least 1".into()));
        }
        Ok(Self {
            model_kind,
            num_qubits,
            layers,
        })
    }

    pub fn num_params(&self) -> usize {
        self.layers * self.num_qubits * ROTATIONS_PER_QUBIT
    }
}

/// Circuit angles, laid out as `[layer][qubit][rotation]` in a flat vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector {
    layers: usize,
    num_qubits: usize,
    values: Vec<f64>,
}

impl ParameterVector {
    pub fn zeros(spec: &CircuitSpec) -> Self {
        Self {
            layers: spec.layers,
            num_qubits: spec.num_qubits,
            values: vec![0.0; spec.num_params()],
        }
    }

    pub fn from_values(layers: usize, num_qubits: usize, values: Vec<f64>) -> Result<Self> {
        let expected = layers * num_qubits * ROTATIONS_PER_QUBIT;
        if values.len() != expected {
            return Err(Error::Shape {
                expected,
                actual: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("parameter values must be finite".into()));
        }
        Ok(Self {
            layers,
            num_qubits,
            values,
        })
    }

    /// Uniform draw from [−`INIT_RANGE`, `INIT_RANGE`].
    pub fn random<R: Rng>(spec: &CircuitSpec, rng: &mut R) -> Self {
        let values = (0..spec.num_params())
            .map(|_| rng.gen_range(-INIT_RANGE..=INIT_RANGE))
            .collect();
        Self {
            layers: spec.layers,
            num_qubits: spec.num_qubits,
            values,
        }
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn index(&self, layer: usize, qubit: usize, rotation: usize) -> usize {
        (layer * self.num_qubits + qubit) * ROTATIONS_PER_QUBIT + rotation
    }

    pub fn get(&self, layer: usize, qubit: usize, rotation: usize) -> f64 {
        self.values[self.index(layer, qubit, rotation)]
    }

    fn check(&self, spec: &CircuitSpec) -> Result<()> {
        if self.layers != spec.layers || self.num_qubits != spec.num_qubits {
            return Err(Error::Shape {
                expected: spec.num_params(),
                actual: self.values.len(),
            });
        }
        Ok(())
    }
}

fn cnot_chain(num_qubits: usize, gates: &mut Vec<Gate>) {
    gates.extend((1..num_qubits).map(|t| Gate::Cnot {
        control: t - 1,
        target: t,
    }));
}

fn check_features(x: &[f64], num_qubits: usize) -> Result<()> {
    if x.len() != num_qubits {
        return Err(Error::Shape {
            expected: num_qubits,
            actual: x.len(),
        });
    }
    Ok(())
}

/// Angle embedding: RX(x_j) then RZ(x_j) on qubit j.
pub fn embed_features(state: &mut QuantumState, x: &[f64]) -> Result<()> {
    check_features(x, state.num_qubits())?;
    for (target, &theta) in x.iter().enumerate() {
        state.apply(&Gate::Rx { target, theta })?;
        state.apply(&Gate::Rz { target, theta })?;
    }
    Ok(())
}

/// Full gate list for one input.
pub fn circuit(params: &ParameterVector, x: &[f64], spec: &CircuitSpec) -> Result<Vec<Gate>> {
    Ok(tagged_circuit(params, x, spec)?.into_iter().map(|(g, _)| g).collect())
}

/// Gate list where each parametrized gate carries the index of its angle.
fn tagged_circuit(params: &ParameterVector, x: &[f64], spec: &CircuitSpec) -> Result<Vec<(Gate, Option<usize>)>> {
    params.check(spec)?;
    check_features(x, spec.num_qubits)?;
    let n = spec.num_qubits;
    let mut gates = Vec::with_capacity((spec.layers + 1) * 3 * n);
    let mut chain = Vec::with_capacity(n);
    cnot_chain(n, &mut chain);

    match spec.model_kind {
        ModelKind::Qnn => {
            for (target, &theta) in x.iter().enumerate() {
                gates.push((Gate::Rx { target, theta }, None));
                gates.push((Gate::Rz { target, theta }, None));
            }
        }
        ModelKind::Vqc => {
            gates.extend((0..n).map(|target| (Gate::H { target }, None)));
            gates.extend(x.iter().enumerate().map(|(target, &theta)| (Gate::Rz { target, theta }, None)));
            gates.extend(chain.iter().map(|&g| (g, None)));
        }
    }

    for layer in 0..spec.layers {
        for target in 0..n {
            let (ia, ib) = (params.index(layer, target, 0), params.index(layer, target, 1));
            let (a, b) = (params.values[ia], params.values[ib]);
            let first = match spec.model_kind {
                ModelKind::Qnn => Gate::Rx { target, theta: a },
                ModelKind::Vqc => Gate::Ry { target, theta: a },
            };
            gates.push((first, Some(ia)));
            gates.push((Gate::Rz { target, theta: b }, Some(ib)));
        }
        gates.extend(chain.iter().map(|&g| (g, None)));
    }
    Ok(gates)
}

fn shift_angle(gate: Gate, delta: f64) -> Gate {
    match gate {
        Gate::Rx { target, theta } => Gate::Rx { target, theta: theta + delta },
        Gate::Ry { target, theta } => Gate::Ry { target, theta: theta + delta },
        Gate::Rz { target, theta } => Gate::Rz { target, theta: theta + delta },
        other => other,
    }
}

/// ⟨Z_0⟩ of the configured circuit family.
pub fn forward(params: &ParameterVector, x: &[f64], spec: &CircuitSpec) -> Result<f64> {
    let gates = circuit(params, x, spec)?;
    let mut state = QuantumState::zero(spec.num_qubits)?;
    state.apply_all(&gates)?;
    state.expectation_z(READOUT_QUBIT)
}

pub fn qnn_forward(params: &ParameterVector, x: &[f64], spec: &CircuitSpec) -> Result<f64> {
    forward(params, x, &CircuitSpec { model_kind: ModelKind::Qnn, ..*spec })
}

pub fn vqc_forward(params: &ParameterVector, x: &[f64], spec: &CircuitSpec) -> Result<f64> {
    forward(params, x, &CircuitSpec { model_kind: ModelKind::Vqc, ..*spec })
}

/// d⟨Z_0⟩/dθ_k for every angle via (f(θ_k + π/2) − f(θ_k − π/2)) / 2.
pub fn expectation_gradient(params: &ParameterVector, x: &[f64], spec: &CircuitSpec) -> Result<Vec<f64>> {
    value_and_gradient(params, x, spec).map(|(_, g)| g)
}

/// ⟨Z_0⟩ together with its parameter-shift gradient.
///
/// The state just before each parametrized gate is shared by both shifted
/// evaluations, so only the gate and the remaining suffix are re-simulated.
pub fn value_and_gradient(params: &ParameterVector, x: &[f64], spec: &CircuitSpec) -> Result<(f64, Vec<f64>)> {
    let gates = tagged_circuit(params, x, spec)?;
    let mut grad = vec![0.0; params.len()];
    let mut prefix = QuantumState::zero(spec.num_qubits)?;
    for (pos, &(gate, slot)) in gates.iter().enumerate() {
        if let Some(k) = slot {
            let suffix = gates[pos + 1..].iter().map(|(g, _)| g);
            let shifted = |delta: f64| -> Result<f64> {
                let mut state = prefix.clone();
                state.apply(&shift_angle(gate, delta))?;
                state.apply_all(suffix.clone())?;
                state.expectation_z(READOUT_QUBIT)
            };
            let plus = shifted(FRAC_PI_2)?;
            let minus = shifted(-FRAC_PI_2)?;
            grad[k] = (plus - minus) / 2.0;
        }
        prefix.apply(&gate)?;
    }
    Ok((prefix.expectation_z(READOUT_QUBIT)?, grad))
}

fn check_training_set(x: &[Vec<f64>], y: &[f64]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(y.len(), x.len()));
    }
    Ok(())
}

/// Mean squared error in target units over scaled inputs `x`.
pub fn cost(
    params: &ParameterVector,
    x: &[Vec<f64>],
    y: &[f64],
    spec: &CircuitSpec,
    output: &OutputMap,
) -> Result<f64> {
    check_training_set(x, y)?;
    let preds = x
        .par_iter()
        .map(|xi| forward(params, xi, spec).map(|e| output.from_expectation(e)))
        .collect::<Result<Vec<_>>>()?;
    metrics::mse(y, &preds)
}

/// Cost, predictions and cost gradient at `params` in one pass.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub cost: f64,
    pub predictions: Vec<f64>,
    pub gradient: Vec<f64>,
}

pub fn evaluate(
    params: &ParameterVector,
    x: &[Vec<f64>],
    y: &[f64],
    spec: &CircuitSpec,
    output: &OutputMap,
) -> Result<Evaluation> {
    check_training_set(x, y)?;
    params.check(spec)?;
    let per_sample = x
        .par_iter()
        .map(|xi| value_and_gradient(params, xi, spec))
        .collect::<Result<Vec<_>>>()?;

    // ∂/∂θ mean((ŷ − y)²) with ŷ = y_min + (e + 1)/2 · span
    let n = x.len() as f64;
    let mut gradient = vec![0.0; params.len()];
    let mut predictions = Vec::with_capacity(x.len());
    for ((e, de), &target) in per_sample.iter().zip(y) {
        let pred = output.from_expectation(*e);
        let scale = (pred - target) * output.span() / n;
        for (g, d) in gradient.iter_mut().zip(de) {
            *g += scale * d;
        }
        predictions.push(pred);
    }
    let cost = metrics::mse(y, &predictions)?;
    Ok(Evaluation {
        cost,
        predictions,
        gradient,
    })
}

/// Gradient of [`cost`] with respect to every angle.
pub fn gradient(
    params: &ParameterVector,
    x: &[Vec<f64>],
    y: &[f64],
    spec: &CircuitSpec,
    output: &OutputMap,
) -> Result<Vec<f64>> {
    evaluate(params, x, y, spec, output).map(|e| e.gradient)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub layers: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            layers: 2,
            iterations: 100,
            learning_rate: 0.1,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 {
            return Err(Error::Config("layers must be at least 1".into()));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Training cost before this iteration's update.
    pub cost: f64,
    pub train_evs: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingHistory {
    pub records: Vec<IterationRecord>,
}

impl TrainingHistory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn costs(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.cost)
    }

    /// `iteration,cost,train_evs` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,cost,train_evs\n");
        for r in &self.records {
            out.push_str(&format!("{},{},{}\n", r.iteration, r.cost, r.train_evs));
        }
        out
    }
}

/// A trained regressor together with everything needed to reproduce its
/// predictions from raw feature vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationalModel {
    #[serde(flatten)]
    pub spec: CircuitSpec,
    pub params: ParameterVector,
    pub scaler: FeatureScaler,
    pub output_map: OutputMap,
    pub config: TrainConfig,
}

impl VariationalModel {
    pub fn predict(&self, raw: &[f64]) -> Result<f64> {
        let x = self.scaler.transform(raw)?;
        Ok(self.output_map.from_expectation(forward(&self.params, &x, &self.spec)?))
    }

    pub fn predict_all(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        rows.par_iter().map(|r| self.predict(r)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(text)?;
        model.params.check(&model.spec)?;
        if model.scaler.width() != model.spec.num_qubits {
            return Err(Error::Shape {
                expected: model.spec.num_qubits,
                actual: model.scaler.width(),
            });
        }
        TargetRange::new(model.output_map.y_min, model.output_map.y_max)?;
        Ok(model)
    }
}

/// Fits the feature scaler and output map on the training data, then runs
/// plain gradient descent θ ← θ − η∇cost from a seeded uniform initialisation.
pub fn train(
    model_kind: ModelKind,
    features: &[Vec<f64>],
    targets: &[f64],
    config: &TrainConfig,
) -> Result<(VariationalModel, TrainingHistory)> {
    config.validate()?;
    check_training_set(features, targets)?;
    let scaler = FeatureScaler::fit(features)?;
    let output_map = TargetRange::fit(targets)?;
    let x = scaler.transform_all(features)?;
    let spec = CircuitSpec::new(model_kind, scaler.width(), config.layers)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = ParameterVector::random(&spec, &mut rng);
    let mut history = TrainingHistory::default();

    for iteration in 0..config.iterations {
        let eval = evaluate(&params, &x, targets, &spec, &output_map)?;
        if !eval.cost.is_finite() || eval.gradient.iter().any(|g| !g.is_finite()) {
            return Err(Error::Divergence { iteration });
        }
        let train_evs = metrics::explained_variance(targets, &eval.predictions)?;
        history.records.push(IterationRecord {
            iteration,
            cost: eval.cost,
            train_evs,
        });
        for (p, g) in params.values.iter_mut().zip(&eval.gradient) {
            *p -= config.learning_rate * g;
        }
        if params.values.iter().any(|p| !p.is_finite()) {
            return Err(Error::Divergence { iteration });
        }
    }

    let model = VariationalModel {
        spec,
        params,
        scaler,
        output_map,
        config: *config,
    };
    Ok((model, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec(kind: ModelKind, n: usize, l: usize) -> CircuitSpec {
        CircuitSpec::new(kind, n, l).unwrap()
    }

    #[test]
    fn embedding_of_zeros_is_identity_on_z() {
        let mut s = QuantumState::zero(3).unwrap();
        embed_features(&mut s, &[0.0; 3]).unwrap();
        for q in 0..3 {
            assert!((s.expectation_z(q).unwrap() - 1.0).abs() < 1e-15);
        }
        let mut s = QuantumState::zero(3).unwrap();
        embed_features(&mut s, &[PI, 0.0, 0.0]).unwrap();
        assert!((s.expectation_z(0).unwrap() + 1.0).abs() < 1e-15);
        assert!(embed_features(&mut s, &[0.0; 2]).is_err());
    }

    #[test]
    fn identity_circuit_reads_plus_one() {
        let sp = spec(ModelKind::Qnn, 4, 2);
        let p = ParameterVector::zeros(&sp);
        assert!((qnn_forward(&p, &[0.0; 4], &sp).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn vqc_zero_input_is_unbiased() {
        let sp = spec(ModelKind::Vqc, 1, 1);
        let p = ParameterVector::zeros(&sp);
        assert!(vqc_forward(&p, &[0.0], &sp).unwrap().abs() < 1e-15);
    }

    #[test]
    fn shift_rule_on_single_rx() {
        let sp = spec(ModelKind::Qnn, 1, 1);
        let p = ParameterVector::from_values(1, 1, vec![FRAC_PI_2, 0.0]).unwrap();
        let g = expectation_gradient(&p, &[0.0], &sp).unwrap();
        assert!((g[0] + 1.0).abs() < 1e-12);
        assert!(g[1].abs() < 1e-12);
    }

    #[test]
    fn shape_errors() {
        let sp = spec(ModelKind::Qnn, 2, 1);
        let p = ParameterVector::zeros(&spec(ModelKind::Qnn, 3, 1));
        assert!(matches!(forward(&p, &[0.0; 2], &sp), Err(Error::Shape { .. })));
        let p = ParameterVector::zeros(&sp);
        assert!(matches!(forward(&p, &[0.0; 3], &sp), Err(Error::Shape { .. })));
        assert!(ParameterVector::from_values(1, 2, vec![0.0; 3]).is_err());
        assert!(CircuitSpec::new(ModelKind::Vqc, 0, 1).is_err());
        assert!(CircuitSpec::new(ModelKind::Vqc, 1, 0).is_err());
    }

    #[test]
    fn cost_examples() {
        let sp = spec(ModelKind::Qnn, 1, 1);
        let p = ParameterVector::zeros(&sp);
        let map = TargetRange::new(0.0, 10.0).unwrap();
        // identity circuit: e = cos(x); x = 0 → e = 1 → ŷ = 10
        assert_eq!(cost(&p, &[vec![0.0]], &[10.0], &sp, &map).unwrap(), 0.0);
        assert!((cost(&p, &[vec![0.0]], &[8.0], &sp, &map).unwrap() - 4.0).abs() < 1e-12);
        let c = cost(&p, &[vec![0.0], vec![0.0]], &[9.0, 7.0], &sp, &map).unwrap();
        assert!((c - 5.0).abs() < 1e-12);
        assert!(matches!(cost(&p, &[], &[], &sp, &map), Err(Error::EmptyTrainingSet)));
    }

    #[test]
    fn train_validates_config() {
        let x = vec![vec![0.0], vec![1.0]];
        let y = vec![1.0, 2.0];
        let bad = TrainConfig { learning_rate: 0.0, ..Default::default() };
        assert!(matches!(train(ModelKind::Qnn, &x, &y, &bad), Err(Error::Config(_))));
        let bad = TrainConfig { iterations: 0, ..Default::default() };
        assert!(train(ModelKind::Qnn, &x, &y, &bad).is_err());
        assert!(matches!(
            train(ModelKind::Qnn, &[], &[], &TrainConfig::default()),
            Err(Error::EmptyTrainingSet)
        ));
    }

    #[test]
    fn huge_learning_rate_diverges_or_stays_finite() {
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..8).map(|i| 1e150 * (i as f64).sin()).collect();
        let cfg = TrainConfig { layers: 1, iterations: 5, learning_rate: 1e300, seed: 1 };
        match train(ModelKind::Qnn, &x, &y, &cfg) {
            Err(Error::Divergence { .. }) => {}
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn single_iteration_history() {
        let x: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, 1.0 - i as f64]).collect();
        let y: Vec<f64> = (0..5).map(|i| 6.0 + i as f64 * 0.5).collect();
        let cfg = TrainConfig { iterations: 1, ..Default::default() };
        let (model, hist) = train(ModelKind::Vqc, &x, &y, &cfg).unwrap();
        assert_eq!(hist.len(), 1);
        assert_eq!(hist.records[0].iteration, 0);
        let text = model.to_json().unwrap();
        assert_eq!(VariationalModel::from_json(&text).unwrap(), model);
    }
}
