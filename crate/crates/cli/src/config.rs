//! Scenario configuration: one JSON document with every default embedded.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qscatter::basis::build_hamiltonian_basis;
use qscatter::dyson::window_for;
use qscatter::scattering::{PotentialShape, PotentialSpec};
use qscatter::{Geometry, Potential, QContext, QLattice, WaveBasis};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CtxConfig {
    pub q: f64,
    pub geometry: Geometry,
}

impl Default for CtxConfig {
    fn default() -> Self {
        Self {
            q: 0.9,
            geometry: Geometry::G1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    pub x0: f64,
    pub j_min: i32,
    pub j_max: i32,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            x0: qscatter::qcalc::DEFAULT_X0,
            j_min: qscatter::qcalc::DEFAULT_J_MIN,
            j_max: qscatter::qcalc::DEFAULT_J_MAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimesConfig {
    pub t_source: f64,
    pub t_target: f64,
    /// Samples of the coefficient time series written by `dyson`.
    pub samples: usize,
}

impl Default for TimesConfig {
    fn default() -> Self {
        Self {
            t_source: 0.0,
            t_target: 0.5,
            samples: 41,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QexpConfig {
    pub momenta: Vec<f64>,
    pub n_trunc: u32,
}

impl Default for QexpConfig {
    fn default() -> Self {
        Self {
            momenta: (-4..=4).map(|k| k as f64 * 0.5).collect(),
            n_trunc: 120,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub ctx: CtxConfig,
    pub lattice: LatticeConfig,
    pub mass: f64,
    pub potential: PotentialSpec,
    /// Adiabatic switching rates, refined in order.
    pub eps: Vec<f64>,
    /// Half-width `T` of the interaction window; derived from the smallest
    /// `eps` when absent.
    pub window: Option<f64>,
    pub born_order: usize,
    pub n_channels: usize,
    pub tol: f64,
    pub times: TimesConfig,
    pub qexp: QexpConfig,
    pub seed: u64,
    pub out: String,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            ctx: CtxConfig::default(),
            lattice: LatticeConfig::default(),
            mass: 1.0,
            potential: PotentialSpec::default(),
            eps: vec![0.1, 0.03, 0.01],
            window: None,
            born_order: 4,
            n_channels: 8,
            tol: 1e-8,
            times: TimesConfig::default(),
            qexp: QexpConfig::default(),
            seed: 20241014,
            out: "out".into(),
        }
    }
}

/// A rejected configuration value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: &str, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

fn positive(field: &str, x: f64) -> Result<(), ConfigError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("must be positive and finite, got {x}")))
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| {
            ConfigError::new("config", format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    /// SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let compact = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(compact.as_bytes()))
    }

    /// Smallest `eps` in the sweep.
    pub fn eps_min(&self) -> f64 {
        self.eps.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn window(&self) -> f64 {
        self.window.unwrap_or_else(|| window_for(self.eps_min()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let q = self.ctx.q;
        if !(q.is_finite() && q > 0.0) {
            return Err(ConfigError::new("ctx.q", format!("must be positive, got {q}")));
        }
        if q == 1.0 {
            return Err(ConfigError::new("ctx.q", "q = 1 is the classical point"));
        }
        positive("lattice.x0", self.lattice.x0)?;
        if self.lattice.j_min > self.lattice.j_max {
            return Err(ConfigError::new("lattice.j_max", "must not be below lattice.j_min"));
        }
        let points = 2 * (self.lattice.j_max - self.lattice.j_min + 1);
        if !(4..=400).contains(&points) {
            return Err(ConfigError::new("lattice", format!("{points} points; need 4..=400")));
        }
        positive("mass", self.mass)?;
        if !self.potential.strength.is_finite() {
            return Err(ConfigError::new("potential.strength", "must be finite"));
        }
        positive("potential.width", self.potential.width)?;
        if !self.potential.center.is_finite() {
            return Err(ConfigError::new("potential.center", "must be finite"));
        }
        if self.eps.is_empty() {
            return Err(ConfigError::new("eps", "need at least one value"));
        }
        for &e in &self.eps {
            positive("eps", e)?;
        }
        if let Some(w) = self.window {
            positive("window", w)?;
            if (-self.eps_min() * w).exp() > qscatter::dyson::WINDOW_RESIDUAL * (1.0 + 1e-12) {
                return Err(ConfigError::new(
                    "window",
                    format!("exp(-eps*T) must not exceed 1e-8; need T >= {}", window_for(self.eps_min())),
                ));
            }
        }
        if self.born_order > 32 {
            return Err(ConfigError::new("born_order", "must lie in 0..=32"));
        }
        if self.n_channels == 0 || self.n_channels as i32 > points {
            return Err(ConfigError::new("n_channels", format!("must lie in 1..={points}")));
        }
        positive("tol", self.tol)?;
        if !(self.times.t_source.is_finite() && self.times.t_target.is_finite()) {
            return Err(ConfigError::new("times", "must be finite"));
        }
        if self.times.samples < 2 {
            return Err(ConfigError::new("times.samples", "need at least 2"));
        }
        if self.qexp.momenta.iter().any(|p| !p.is_finite()) {
            return Err(ConfigError::new("qexp.momenta", "must be finite"));
        }
        if self.out.is_empty() {
            return Err(ConfigError::new("out", "must not be empty"));
        }
        Ok(())
    }
}

/// Bases and potentials of both geometries built from a configuration.
///
/// The second geometry lives on the crossed relabelling of the same points.
pub struct Scenario {
    pub config: ScenarioConfig,
    pub bases: [Arc<WaveBasis>; 2],
    pub potentials: [Potential; 2],
    /// Index map from the first lattice to the crossed one.
    pub perm: Vec<usize>,
}

impl Scenario {
    pub fn build(config: &ScenarioConfig) -> qscatter::Result<Self> {
        let ctx = QContext::braided_line(config.ctx.q)?;
        let l = &config.lattice;
        let lat1 = QLattice::new(&ctx, l.x0, l.j_min, l.j_max)?;
        let (lat2, perm) = lat1.crossed()?;
        let lat1 = Arc::new(lat1);
        let lat2 = Arc::new(lat2);
        let b1 = Arc::new(build_hamiltonian_basis(lat1.clone(), config.mass)?);
        let b2 = Arc::new(build_hamiltonian_basis(lat2.clone(), config.mass)?);
        let eps = config.eps[0];
        let p1 = Potential::from_spec(lat1, &config.potential, eps)?;
        let p2 = Potential::from_spec(lat2, &config.potential, eps)?;
        Ok(Self {
            config: config.clone(),
            bases: [b1, b2],
            potentials: [p1, p2],
            perm,
        })
    }

    pub fn index(g: Geometry) -> usize {
        match g {
            Geometry::G1 => 0,
            Geometry::G2 => 1,
        }
    }

    pub fn basis(&self, g: Geometry) -> &Arc<WaveBasis> {
        &self.bases[Self::index(g)]
    }

    pub fn potential(&self, g: Geometry) -> &Potential {
        &self.potentials[Self::index(g)]
    }

    /// The configured potential shape at another strength.
    pub fn potential_with(&self, g: Geometry, shape: PotentialShape, strength: f64) -> qscatter::Result<Potential> {
        let spec = PotentialSpec {
            shape,
            strength,
            ..self.config.potential
        };
        Potential::from_spec(self.basis(g).lattice().clone(), &spec, self.config.eps[0])
    }
}
