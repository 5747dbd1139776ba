//! Scenario configuration: flat key-value files plus command-line overrides.
//!
//! File format: one `key = value` per line, `#` starts a comment. Command
//! line flags win over file values. All quantities are in units of omega0
//! (omega0 = 1 internally).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use spinbath::model::{BathSpec, Sector};
use spinbath::{Mat2, Method};

use crate::CliError;

/// Default bath sizes for caps mirror the library defaults.
pub const EXACT_CAP: usize = 12;
pub const ENUMERATION_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// (|+> + |->)/sqrt(2) with the unpolarized bath.
    Superposition,
    /// |+><+| with the unpolarized bath (P_+(0) = 1).
    Excited,
    /// Explicit 2x2 system state and bath sector weights.
    Custom {
        rho_pp: f64,
        rho_pm: Complex64,
        bath_weights: Vec<(f64, f64)>,
    },
}

impl InitialState {
    pub fn label(&self) -> &'static str {
        match self {
            InitialState::Superposition => "superposition",
            InitialState::Excited => "excited",
            InitialState::Custom { .. } => "custom",
        }
    }

    /// System density matrix of this initial state.
    pub fn rho_s(&self) -> Mat2 {
        match self {
            InitialState::Superposition => {
                let h = Complex64::new(0.5, 0.0);
                Mat2::new(h, h, h, h)
            }
            InitialState::Excited => Mat2::new(
                Complex64::new(1.0, 0.0),
                Complex64::ZERO,
                Complex64::ZERO,
                Complex64::ZERO,
            ),
            InitialState::Custom { rho_pp, rho_pm, .. } => Mat2::new(
                Complex64::from(*rho_pp),
                *rho_pm,
                rho_pm.conj(),
                Complex64::from(1.0 - rho_pp),
            ),
        }
    }

    /// Bath specification of this initial state.
    pub fn bath_spec(&self) -> Result<BathSpec, CliError> {
        match self {
            InitialState::Superposition | InitialState::Excited => Ok(BathSpec::Unpolarized),
            InitialState::Custom { bath_weights, .. } => {
                let mut weights = Vec::with_capacity(bath_weights.len());
                for &(m, w) in bath_weights {
                    let two_m = (2.0 * m).round();
                    if ((2.0 * m) - two_m).abs() > 1e-9 {
                        return Err(CliError::Validation(format!(
                            "bath_weights: sector m = {m} is not integer or half-integer"
                        )));
                    }
                    weights.push((Sector(two_m as i32), w));
                }
                Ok(BathSpec::SectorWeights(weights))
            }
        }
    }
}

/// Fully resolved scenario.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub n_bath: usize,
    pub alpha_ratio: f64,
    pub k0: f64,
    pub exponent: f64,
    pub initial: InitialState,
    pub t_max: f64,
    pub n_points: usize,
    pub methods: Vec<Method>,
    pub out_dir: PathBuf,
    pub window: Option<(f64, f64)>,
}

impl ScenarioConfig {
    pub fn times(&self) -> Vec<f64> {
        let dt = self.t_max / (self.n_points - 1) as f64;
        (0..self.n_points).map(|i| i as f64 * dt).collect()
    }

    /// Report window clamped into [0, t_max].
    pub fn report_window(&self) -> (f64, f64) {
        match self.window {
            Some((lo, hi)) => (lo.max(0.0), hi.min(self.t_max)),
            None => (0.0, self.t_max),
        }
    }

    /// Echo of every resolved field, stable order, for the manifest.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut kv = vec![
            ("n_bath".into(), self.n_bath.to_string()),
            ("alpha_ratio".into(), self.alpha_ratio.to_string()),
            ("k0".into(), self.k0.to_string()),
            ("exponent".into(), self.exponent.to_string()),
            ("initial".into(), self.initial.label().to_string()),
            ("t_max".into(), self.t_max.to_string()),
            ("points".into(), self.n_points.to_string()),
            (
                "methods".into(),
                self.methods
                    .iter()
                    .map(|m| m.label())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
        ];
        if let InitialState::Custom {
            rho_pp,
            rho_pm,
            bath_weights,
        } = &self.initial
        {
            kv.push(("rho_pp".into(), rho_pp.to_string()));
            kv.push(("rho_pm_re".into(), rho_pm.re.to_string()));
            kv.push(("rho_pm_im".into(), rho_pm.im.to_string()));
            kv.push((
                "bath_weights".into(),
                bath_weights
                    .iter()
                    .map(|(m, w)| format!("{m}:{w}"))
                    .collect::<Vec<_>>()
                    .join(","),
            ));
        }
        if let Some((lo, hi)) = self.window {
            kv.push(("window".into(), format!("{lo},{hi}")));
        }
        kv
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n_bath < 1 {
            return Err(CliError::Validation("n_bath: must be at least 1".into()));
        }
        if self.n_bath > ENUMERATION_CAP {
            return Err(CliError::Validation(format!(
                "n_bath: {} exceeds the enumeration cap {ENUMERATION_CAP}",
                self.n_bath
            )));
        }
        if self.alpha_ratio <= 0.0 || !self.alpha_ratio.is_finite() {
            return Err(CliError::Validation(format!(
                "alpha_ratio: must be positive, got {}",
                self.alpha_ratio
            )));
        }
        if self.k0 <= 0.0 || !self.k0.is_finite() {
            return Err(CliError::Validation(format!(
                "k0: must be positive, got {}",
                self.k0
            )));
        }
        if self.exponent <= 0.0 || !self.exponent.is_finite() {
            return Err(CliError::Validation(format!(
                "exponent: must be positive, got {}",
                self.exponent
            )));
        }
        if self.t_max <= 0.0 || !self.t_max.is_finite() {
            return Err(CliError::Validation(format!(
                "t_max: must be positive, got {}",
                self.t_max
            )));
        }
        if self.n_points < 2 {
            return Err(CliError::Validation(format!(
                "points: need at least 2, got {}",
                self.n_points
            )));
        }
        if self.methods.is_empty() {
            return Err(CliError::Validation("methods: none requested".into()));
        }
        let mut seen = Vec::new();
        for m in &self.methods {
            if seen.contains(m) {
                return Err(CliError::Validation(format!("methods: `{m}` listed twice")));
            }
            seen.push(*m);
        }
        if self.methods.contains(&Method::Exact) && self.n_bath > EXACT_CAP {
            return Err(CliError::Validation(format!(
                "methods: exact propagation is capped at {EXACT_CAP} bath spins, got {}",
                self.n_bath
            )));
        }
        if self.methods.contains(&Method::LargeN) && self.initial != InitialState::Excited {
            return Err(CliError::Validation(
                "methods: largen describes only the excited initial state".into(),
            ));
        }
        if let Some((lo, hi)) = self.window {
            if !(lo >= 0.0 && hi > lo) {
                return Err(CliError::Validation(format!(
                    "window: need 0 <= lo < hi, got {lo},{hi}"
                )));
            }
        }
        if let InitialState::Custom {
            rho_pp,
            bath_weights,
            ..
        } = &self.initial
        {
            if !(0.0..=1.0).contains(rho_pp) {
                return Err(CliError::Validation(format!(
                    "rho_pp: must lie in [0, 1], got {rho_pp}"
                )));
            }
            if bath_weights.is_empty() {
                return Err(CliError::Validation(
                    "bath_weights: custom initial state needs sector weights".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Unresolved option bag: file values and flag values merge into a
/// [`ScenarioConfig`] with flags taking precedence.
#[derive(Debug, Clone, Default)]
pub struct ConfigOverlay {
    pub n_bath: Option<usize>,
    pub alpha_ratio: Option<f64>,
    pub k0: Option<f64>,
    pub exponent: Option<f64>,
    pub initial: Option<String>,
    pub t_max: Option<f64>,
    pub n_points: Option<usize>,
    pub methods: Option<String>,
    pub out_dir: Option<PathBuf>,
    pub window: Option<String>,
    pub rho_pp: Option<f64>,
    pub rho_pm_re: Option<f64>,
    pub rho_pm_im: Option<f64>,
    pub bath_weights: Option<String>,
}

impl ConfigOverlay {
    /// Parse a flat key-value config file.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        let mut kv = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Validation(format!(
                    "{}:{}: expected `key = value`, got `{raw}`",
                    path.display(),
                    lineno + 1
                )));
            };
            kv.insert(key.trim().to_string(), value.trim().to_string());
        }
        let mut overlay = ConfigOverlay::default();
        for (key, value) in kv {
            let fail = |what: &str| {
                CliError::Validation(format!(
                    "{}: bad value for {what}: `{value}`",
                    path.display()
                ))
            };
            match key.as_str() {
                "n_bath" => overlay.n_bath = Some(value.parse().map_err(|_| fail("n_bath"))?),
                "alpha_ratio" => {
                    overlay.alpha_ratio = Some(value.parse().map_err(|_| fail("alpha_ratio"))?)
                }
                "k0" => overlay.k0 = Some(value.parse().map_err(|_| fail("k0"))?),
                "exponent" => overlay.exponent = Some(value.parse().map_err(|_| fail("exponent"))?),
                "initial" => overlay.initial = Some(value),
                "t_max" => overlay.t_max = Some(value.parse().map_err(|_| fail("t_max"))?),
                "points" => overlay.n_points = Some(value.parse().map_err(|_| fail("points"))?),
                "methods" => overlay.methods = Some(value),
                "out_dir" => overlay.out_dir = Some(PathBuf::from(value)),
                "window" => overlay.window = Some(value),
                "rho_pp" => overlay.rho_pp = Some(value.parse().map_err(|_| fail("rho_pp"))?),
                "rho_pm_re" => {
                    overlay.rho_pm_re = Some(value.parse().map_err(|_| fail("rho_pm_re"))?)
                }
                "rho_pm_im" => {
                    overlay.rho_pm_im = Some(value.parse().map_err(|_| fail("rho_pm_im"))?)
                }
                "bath_weights" => overlay.bath_weights = Some(value),
                other => {
                    return Err(CliError::Validation(format!(
                        "{}: unknown config key `{other}`",
                        path.display()
                    )))
                }
            }
        }
        Ok(overlay)
    }

    /// Merge with `flags` winning over `self` (the file layer).
    pub fn merged_with(self, flags: ConfigOverlay) -> ConfigOverlay {
        ConfigOverlay {
            n_bath: flags.n_bath.or(self.n_bath),
            alpha_ratio: flags.alpha_ratio.or(self.alpha_ratio),
            k0: flags.k0.or(self.k0),
            exponent: flags.exponent.or(self.exponent),
            initial: flags.initial.or(self.initial),
            t_max: flags.t_max.or(self.t_max),
            n_points: flags.n_points.or(self.n_points),
            methods: flags.methods.or(self.methods),
            out_dir: flags.out_dir.or(self.out_dir),
            window: flags.window.or(self.window),
            rho_pp: flags.rho_pp.or(self.rho_pp),
            rho_pm_re: flags.rho_pm_re.or(self.rho_pm_re),
            rho_pm_im: flags.rho_pm_im.or(self.rho_pm_im),
            bath_weights: flags.bath_weights.or(self.bath_weights),
        }
    }

    /// Resolve defaults and parse the compound fields.
    pub fn resolve(self) -> Result<ScenarioConfig, CliError> {
        let n_bath = self.n_bath.unwrap_or(10);
        let initial = match self.initial.as_deref().unwrap_or("superposition") {
            "superposition" => InitialState::Superposition,
            "excited" => InitialState::Excited,
            "custom" => {
                let rho_pp = self.rho_pp.ok_or_else(|| {
                    CliError::Validation("initial = custom requires rho_pp".into())
                })?;
                let rho_pm =
                    Complex64::new(self.rho_pm_re.unwrap_or(0.0), self.rho_pm_im.unwrap_or(0.0));
                let spec = self.bath_weights.as_deref().ok_or_else(|| {
                    CliError::Validation("initial = custom requires bath_weights".into())
                })?;
                let mut bath_weights = Vec::new();
                for part in spec.split(',') {
                    let Some((m, w)) = part.split_once(':') else {
                        return Err(CliError::Validation(format!(
                            "bath_weights: expected m:weight, got `{part}`"
                        )));
                    };
                    let m = f64::from_str(m.trim()).map_err(|_| {
                        CliError::Validation(format!("bath_weights: bad sector `{m}`"))
                    })?;
                    let w = f64::from_str(w.trim()).map_err(|_| {
                        CliError::Validation(format!("bath_weights: bad weight `{w}`"))
                    })?;
                    bath_weights.push((m, w));
                }
                InitialState::Custom {
                    rho_pp,
                    rho_pm,
                    bath_weights,
                }
            }
            other => {
                return Err(CliError::Validation(format!(
                    "initial: expected superposition, excited or custom, got `{other}`"
                )))
            }
        };
        let methods = match self.methods.as_deref() {
            None => vec![Method::Exact, Method::Tcl2, Method::Tcl2Mod],
            Some(spec) => {
                let mut methods = Vec::new();
                for part in spec.split(',') {
                    methods.push(Method::from_str(part).map_err(CliError::Validation)?);
                }
                methods
            }
        };
        let window = match self.window.as_deref() {
            None => None,
            Some(spec) => {
                let Some((lo, hi)) = spec.split_once(',') else {
                    return Err(CliError::Validation(format!(
                        "window: expected lo,hi got `{spec}`"
                    )));
                };
                let lo = f64::from_str(lo.trim())
                    .map_err(|_| CliError::Validation(format!("window: bad bound `{lo}`")))?;
                let hi = f64::from_str(hi.trim())
                    .map_err(|_| CliError::Validation(format!("window: bad bound `{hi}`")))?;
                Some((lo, hi))
            }
        };
        let config = ScenarioConfig {
            n_bath,
            alpha_ratio: self.alpha_ratio.unwrap_or(0.01),
            k0: self.k0.unwrap_or(n_bath as f64 / 2.0),
            exponent: self.exponent.unwrap_or(2.0),
            initial,
            t_max: self.t_max.unwrap_or(3000.0),
            n_points: self.n_points.unwrap_or(3001),
            methods,
            out_dir: self.out_dir.unwrap_or_else(|| PathBuf::from("out")),
            window,
        };
        config.validate()?;
        Ok(config)
    }
}
