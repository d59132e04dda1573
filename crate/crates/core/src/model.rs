//! Feedforward ReLU networks, half-space output specifications and the
//! on-disk model / problem formats.
//!
//! A [`Network`] is a list of dense affine layers with a ReLU between every
//! pair of consecutive layers. Layers are indexed from zero: layer `k < N-1`
//! produces a hidden preactivation, layer `N-1` produces the output. After
//! [`fold_spec`] the output is scalar and the verification question is whether
//! `P[f(X) > 0] >= eta`.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::Covariance;

/// One dense layer `y = W x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineLayer {
    weights: DMatrix<f64>,
    bias: DVector<f64>,
}

impl AffineLayer {
    pub fn new(weights: DMatrix<f64>, bias: DVector<f64>) -> Result<Self> {
        if weights.nrows() != bias.len() {
            return Err(Error::Shape(format!(
                "weights have {} rows but bias has length {}",
                weights.nrows(),
                bias.len()
            )));
        }
        if weights.iter().chain(bias.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("layer parameters".into()));
        }
        Ok(Self { weights, bias })
    }

    /// Builds a layer from row-major nested rows.
    pub fn from_rows(rows: &[Vec<f64>], bias: &[f64]) -> Result<Self> {
        let n_out = rows.len();
        let n_in = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n_in) {
            return Err(Error::Shape(format!(
                "weight row {i} has length {} but row 0 has length {n_in}",
                r.len()
            )));
        }
        let weights = DMatrix::from_fn(n_out, n_in, |i, j| rows[i][j]);
        Self::new(weights, DVector::from_column_slice(bias))
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn bias(&self) -> &DVector<f64> {
        &self.bias
    }

    pub fn input_dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.weights * x + &self.bias
    }
}

/// Alternating affine and ReLU layers. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<AffineLayer>,
}

impl Network {
    pub fn new(layers: Vec<AffineLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Shape("network has no layers".into()));
        }
        for (k, pair) in layers.windows(2).enumerate() {
            if pair[1].input_dim() != pair[0].output_dim() {
                return Err(Error::Shape(format!(
                    "layer {} expects {} inputs but layer {k} produces {}",
                    k + 1,
                    pair[1].input_dim(),
                    pair[0].output_dim()
                )));
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[AffineLayer] {
        &self.layers
    }

    pub fn layer(&self, k: usize) -> &AffineLayer {
        &self.layers[k]
    }

    /// Number of affine layers `N`.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Number of ReLU layers, `N - 1`.
    pub fn hidden_layers(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].output_dim()
    }

    /// `n_0, n_1, ..., n_N`.
    pub fn layer_widths(&self) -> Vec<usize> {
        std::iter::once(self.input_dim())
            .chain(self.layers.iter().map(AffineLayer::output_dim))
            .collect()
    }

    /// Total number of hidden (ReLU) neurons.
    pub fn hidden_neurons(&self) -> usize {
        self.layers[..self.hidden_layers()]
            .iter()
            .map(AffineLayer::output_dim)
            .sum()
    }

    pub fn is_scalar(&self) -> bool {
        self.output_dim() == 1
    }

    fn check_input(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::Shape(format!(
                "input has length {} but network expects {}",
                x.len(),
                self.input_dim()
            )));
        }
        Ok(())
    }

    /// Preactivation of layer `k` (zero-based); `k = depth() - 1` is the output.
    pub fn preactivation(&self, x: &DVector<f64>, k: usize) -> Result<DVector<f64>> {
        self.check_input(x)?;
        if k >= self.depth() {
            return Err(Error::InvalidArgument(format!(
                "layer {k} out of range for a network of depth {}",
                self.depth()
            )));
        }
        let mut y = self.layers[0].apply(x);
        for layer in &self.layers[1..=k] {
            y.apply(|v| *v = v.max(0.0));
            y = layer.apply(&y);
        }
        Ok(y)
    }

    /// All preactivations `y^(0), ..., y^(N-1)`.
    pub fn preactivations(&self, x: &DVector<f64>) -> Result<Vec<DVector<f64>>> {
        self.check_input(x)?;
        let mut out = Vec::with_capacity(self.depth());
        let mut y = self.layers[0].apply(x);
        for layer in &self.layers[1..] {
            let mut h = y.clone();
            h.apply(|v| *v = v.max(0.0));
            out.push(y);
            y = layer.apply(&h);
        }
        out.push(y);
        Ok(out)
    }

    /// Full forward pass returning the output vector.
    pub fn forward_vec(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.preactivation(x, self.depth() - 1)
    }

    /// Forward pass of a scalar-output network.
    pub fn forward(&self, x: &DVector<f64>) -> Result<f64> {
        if !self.is_scalar() {
            return Err(Error::Shape(format!(
                "forward expects a scalar network, output width is {}",
                self.output_dim()
            )));
        }
        Ok(self.forward_vec(x)?[0])
    }
}

/// Output half-space `{ y : c^T y + d > 0 }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpaceSpec {
    pub c: Vec<f64>,
    pub d: f64,
}

impl HalfSpaceSpec {
    pub fn new(c: Vec<f64>, d: f64) -> Result<Self> {
        let spec = Self { c, d };
        spec.validate()?;
        Ok(spec)
    }

    /// Margin specification `e_target - e_attack`.
    pub fn margin(classes: usize, target: usize, attack: usize) -> Result<Self> {
        if target >= classes || attack >= classes || target == attack {
            return Err(Error::InvalidArgument(format!(
                "target {target} and attack {attack} must be distinct classes below {classes}"
            )));
        }
        let mut c = vec![0.0; classes];
        c[target] = 1.0;
        c[attack] = -1.0;
        Self::new(c, 0.0)
    }

    fn validate(&self) -> Result<()> {
        if self.c.iter().any(|v| !v.is_finite()) || !self.d.is_finite() {
            return Err(Error::NonFinite("half-space specification".into()));
        }
        if self.c.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidArgument(
                "half-space normal c must have a nonzero entry".into(),
            ));
        }
        Ok(())
    }
}

/// Folds `c^T y + d` into the last layer, yielding a scalar network with
/// `f_folded(x) = c^T f(x) + d`.
pub fn fold_spec(network: &Network, spec: &HalfSpaceSpec) -> Result<Network> {
    spec.validate()?;
    let last = network.layer(network.depth() - 1);
    if spec.c.len() != last.output_dim() {
        return Err(Error::Shape(format!(
            "specification has {} coefficients but the network has {} outputs",
            spec.c.len(),
            last.output_dim()
        )));
    }
    let c = DVector::from_column_slice(&spec.c);
    let weights = c.transpose() * last.weights();
    let bias = c.dot(last.bias()) + spec.d;
    let folded = AffineLayer::new(
        DMatrix::from_row_slice(1, weights.ncols(), weights.as_slice()),
        DVector::from_element(1, bias),
    )?;
    let mut layers = network.layers()[..network.depth() - 1].to_vec();
    layers.push(folded);
    Network::new(layers)
}

#[derive(Debug, Serialize, Deserialize)]
struct LayerFile {
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    layers: Vec<LayerFile>,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_error(path: &Path, text: &str, err: serde_json::Error) -> Error {
    // JSON has no NaN/Infinity literals, so serde rejects them as syntax
    // errors; report those as non-finite values instead.
    let bad_token = ["NaN", "Infinity", "inf"]
        .iter()
        .any(|tok| text.contains(tok));
    if bad_token {
        Error::NonFinite(format!("{} ({err})", path.display()))
    } else {
        Error::Parse {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}

fn network_from_model_file(file: ModelFile) -> Result<Network> {
    let mut layers = Vec::with_capacity(file.layers.len());
    for (k, layer) in file.layers.iter().enumerate() {
        let parsed = AffineLayer::from_rows(&layer.weights, &layer.bias).map_err(|e| match e {
            Error::Shape(msg) => Error::Shape(format!("layer {k}: {msg}")),
            Error::NonFinite(_) => Error::NonFinite(format!("layer {k}")),
            other => other,
        })?;
        layers.push(parsed);
    }
    Network::new(layers)
}

/// Parses a model from its JSON text.
pub fn parse_model(text: &str) -> Result<Network> {
    let file: ModelFile =
        serde_json::from_str(text).map_err(|e| parse_error(Path::new("<memory>"), text, e))?;
    network_from_model_file(file)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Network> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let file: ModelFile = serde_json::from_str(&text).map_err(|e| parse_error(path, &text, e))?;
    network_from_model_file(file)
}

/// Serializes a model to JSON. Floats use the shortest representation that
/// round-trips exactly.
pub fn model_to_json(network: &Network) -> String {
    let file = ModelFile {
        layers: network
            .layers()
            .iter()
            .map(|l| LayerFile {
                weights: l
                    .weights()
                    .row_iter()
                    .map(|r| r.iter().copied().collect())
                    .collect(),
                bias: l.bias().iter().copied().collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("model serialization is infallible")
}

pub fn save_model(network: &Network, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, model_to_json(network)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub const DEFAULT_TRUNCATION_Z: f64 = 3.0;

fn default_truncation_z() -> f64 {
    DEFAULT_TRUNCATION_Z
}

/// The problem file as stored on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    pub model: PathBuf,
    #[serde(default)]
    pub spec: Option<HalfSpaceSpec>,
    pub mean: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cov_diag: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cov_full: Option<Vec<Vec<f64>>>,
    pub eta: f64,
    #[serde(default = "default_truncation_z")]
    pub truncation_z: f64,
}

impl ProblemFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = read_text(path)?;
        serde_json::from_str(&text).map_err(|e| parse_error(path, &text, e))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).expect("problem serialization is infallible");
        fs::write(path, text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn covariance(&self) -> Result<Covariance> {
        match (&self.cov_diag, &self.cov_full) {
            (Some(d), None) => Ok(Covariance::Diagonal(DVector::from_column_slice(d))),
            (None, Some(rows)) => {
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(Error::Covariance("cov_full must be square".into()));
                }
                Ok(Covariance::Full(DMatrix::from_fn(n, n, |i, j| rows[i][j])))
            }
            (Some(_), Some(_)) => Err(Error::Covariance(
                "only one of cov_diag and cov_full may be given".into(),
            )),
            (None, None) => Err(Error::Covariance(
                "one of cov_diag or cov_full is required".into(),
            )),
        }
    }
}

/// A validated verification problem over a folded, scalar network.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub network: Network,
    pub input_mean: DVector<f64>,
    pub input_cov: Covariance,
    pub eta: f64,
    pub truncation_z: f64,
}

impl ProblemInstance {
    pub fn new(
        network: Network,
        input_mean: DVector<f64>,
        input_cov: Covariance,
        eta: f64,
        truncation_z: f64,
    ) -> Result<Self> {
        if !network.is_scalar() {
            return Err(Error::Shape(format!(
                "problem network must have scalar output, found width {}",
                network.output_dim()
            )));
        }
        if input_mean.len() != network.input_dim() {
            return Err(Error::Shape(format!(
                "mean has length {} but network input width is {}",
                input_mean.len(),
                network.input_dim()
            )));
        }
        if input_cov.dim() != network.input_dim() {
            return Err(Error::Shape(format!(
                "covariance has dimension {} but network input width is {}",
                input_cov.dim(),
                network.input_dim()
            )));
        }
        if input_mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("input mean".into()));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "eta must lie in (0, 1], got {eta}"
            )));
        }
        if !(truncation_z > 0.0 && truncation_z.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "truncation_z must be positive, got {truncation_z}"
            )));
        }
        input_cov.validate()?;
        Ok(Self {
            network,
            input_mean,
            input_cov,
            eta,
            truncation_z,
        })
    }

    /// Builds an instance from a parsed problem file. Relative model paths
    /// resolve against `base_dir`.
    pub fn from_file(file: &ProblemFile, base_dir: &Path) -> Result<Self> {
        let model_path = if file.model.is_absolute() {
            file.model.clone()
        } else {
            base_dir.join(&file.model)
        };
        let raw = load_model(&model_path)?;
        let network = match &file.spec {
            Some(spec) => fold_spec(&raw, spec)?,
            None => raw,
        };
        Self::new(
            network,
            DVector::from_column_slice(&file.mean),
            file.covariance()?,
            file.eta,
            file.truncation_z,
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = ProblemFile::load(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_file(&file, base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer(rows: &[&[f64]], bias: &[f64]) -> AffineLayer {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        AffineLayer::from_rows(&rows, bias).unwrap()
    }

    #[test]
    fn fold_identity_network() {
        let net = Network::new(vec![layer(&[&[1.0, 0.0], &[0.0, 1.0]], &[0.0, 0.0])]).unwrap();
        let spec = HalfSpaceSpec::new(vec![1.0, -1.0], 0.0).unwrap();
        let folded = fold_spec(&net, &spec).unwrap();
        assert_eq!(folded.layer(0).weights().as_slice(), &[1.0, -1.0]);
        assert_eq!(folded.layer(0).bias()[0], 0.0);
    }

    #[test]
    fn fold_margin_picks_target_minus_attack() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 1.0]).collect();
        let bias: Vec<f64> = (0..10).map(|i| 0.5 * i as f64).collect();
        let net = Network::new(vec![AffineLayer::from_rows(&rows, &bias).unwrap()]).unwrap();
        let folded = fold_spec(&net, &HalfSpaceSpec::margin(10, 3, 7).unwrap()).unwrap();
        let x = DVector::from_vec(vec![0.25, -2.0]);
        let y = net.forward_vec(&x).unwrap();
        assert_eq!(folded.forward(&x).unwrap(), y[3] - y[7]);
    }

    #[test]
    fn fold_rejects_dimension_mismatch() {
        let net = Network::new(vec![layer(&[&[1.0], &[2.0]], &[0.0, 0.0])]).unwrap();
        let spec = HalfSpaceSpec::new(vec![1.0, 1.0, 1.0], 0.0).unwrap();
        assert!(matches!(fold_spec(&net, &spec), Err(Error::Shape(_))));
    }

    #[test]
    fn zero_normal_is_rejected() {
        assert!(HalfSpaceSpec::new(vec![0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn forward_affine_only() {
        let net = Network::new(vec![layer(&[&[2.0]], &[-1.0])]).unwrap();
        assert_eq!(net.forward(&DVector::from_vec(vec![3.0])).unwrap(), 5.0);
    }

    #[test]
    fn forward_dead_relu() {
        let net = Network::new(vec![layer(&[&[1.0]], &[-1.0]), layer(&[&[1.0]], &[0.0])]).unwrap();
        assert_eq!(net.forward(&DVector::from_vec(vec![0.5])).unwrap(), 0.0);
    }

    #[test]
    fn forward_rejects_wrong_input_length() {
        let net = Network::new(vec![layer(&[&[1.0, 1.0]], &[0.0])]).unwrap();
        assert!(net.forward(&DVector::from_vec(vec![1.0])).is_err());
    }

    #[test]
    fn preactivation_first_layer_is_affine() {
        let net = Network::new(vec![
            layer(&[&[1.0, -2.0], &[0.5, 0.5]], &[0.1, -0.2]),
            layer(&[&[1.0, 1.0]], &[0.0]),
        ])
        .unwrap();
        let x = DVector::from_vec(vec![0.3, 0.7]);
        let y0 = net.preactivation(&x, 0).unwrap();
        assert_eq!(y0, net.layer(0).weights() * &x + net.layer(0).bias());
        assert_eq!(
            net.preactivation(&x, 1).unwrap()[0],
            net.forward(&x).unwrap()
        );
        assert!(net.preactivation(&x, 2).is_err());
    }

    #[test]
    fn mismatched_layers_rejected() {
        let err = Network::new(vec![
            layer(&[&[1.0]], &[0.0]),
            layer(&[&[1.0, 1.0]], &[0.0]),
        ]);
        assert!(matches!(err, Err(Error::Shape(_))));
    }

    #[test]
    fn load_reports_bias_mismatch_with_layer_index() {
        let text = r#"{"layers": [
            {"weights": [[1.0]], "bias": [0.0]},
            {"weights": [[1.0], [2.0]], "bias": [0.0]}
        ]}"#;
        match parse_model(text) {
            Err(Error::Shape(msg)) => assert!(msg.contains("layer 1"), "{msg}"),
            other => panic!("expected shape error, got {other:?}"),
        }
    }

    #[test]
    fn load_rejects_nan() {
        let text = r#"{"layers": [{"weights": [[NaN]], "bias": [0.0]}]}"#;
        let err = parse_model(text).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
        assert!(err.to_string().contains("non-finite"));
    }

    #[test]
    fn load_rejects_garbage() {
        assert!(matches!(
            parse_model("{\"layers\": 3}"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn problem_file_defaults_and_null_spec() {
        let text =
            r#"{"model": "m.json", "spec": null, "mean": [0.0], "cov_diag": [1.0], "eta": 0.9}"#;
        let file: ProblemFile = serde_json::from_str(text).unwrap();
        assert_eq!(file.truncation_z, DEFAULT_TRUNCATION_Z);
        assert!(file.spec.is_none());
        assert!(matches!(
            file.covariance().unwrap(),
            Covariance::Diagonal(_)
        ));
    }

    #[test]
    fn problem_instance_validates_eta() {
        let net = Network::new(vec![layer(&[&[1.0]], &[0.0])]).unwrap();
        let cov = Covariance::Diagonal(DVector::from_vec(vec![1.0]));
        let mean = DVector::from_vec(vec![0.0]);
        assert!(ProblemInstance::new(net.clone(), mean.clone(), cov.clone(), 0.0, 3.0).is_err());
        assert!(ProblemInstance::new(net.clone(), mean.clone(), cov.clone(), 1.5, 3.0).is_err());
        assert!(ProblemInstance::new(net, mean, cov, 1.0, 3.0).is_ok());
    }
}
