//! Flat key=value configuration with `#` comments.
//!
//! Every model, policy, run, sweep and shock field is one key. Unknown keys
//! are rejected so typos cannot silently fall back to defaults. Unset keys
//! take the baseline defaults (the standing parameter set of the phase-
//! diagram experiments).

use std::collections::BTreeMap;
use std::fmt;

use mark0::{ModelParams, PhaseThresholds, PolicyParams};

/// Fully resolved configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub model: ModelParams,
    pub policy: PolicyParams,
    /// Run length in steps.
    pub t: usize,
    /// Equilibration cutoff for summary statistics.
    pub t_eq: usize,
    pub seed: u64,
    /// Seeds per ensemble / sweep cell.
    pub ensemble: usize,
    pub thresholds: PhaseThresholds,
    /// Sweep axes (both required by the sweep subcommand).
    pub sweep_x: Option<AxisConfig>,
    pub sweep_y: Option<AxisConfig>,
    pub shock: ShockConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxisConfig {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShockConfig {
    /// Base rate before the shock step.
    pub pre_rate: f64,
    /// Base rate from the shock step on.
    pub post_rate: f64,
    /// Step at which the rate changes.
    pub time: usize,
    pub window_before: usize,
    pub window_after: usize,
    /// Report relative variations (divide by the pre-shock mean) rather
    /// than absolute deviations.
    pub normalize: bool,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            model: ModelParams::baseline(),
            policy: PolicyParams::baseline(),
            t: 20_000,
            t_eq: 5_000,
            seed: 0,
            ensemble: 8,
            thresholds: PhaseThresholds::default(),
            sweep_x: None,
            sweep_y: None,
            shock: ShockConfig {
                pre_rate: 0.02,
                post_rate: 0.018,
                time: 10_000,
                window_before: 2_000,
                window_after: 2_000,
                normalize: true,
            },
        }
    }
}

/// Names of the numeric model/policy parameters addressable as sweep axes
/// and key=value overrides.
pub const AXIS_KEYS: &[&str] = &[
    "R",
    "eta0_minus",
    "c0",
    "beta",
    "gamma_p",
    "gamma_w",
    "delta",
    "theta",
    "phi_revival",
    "f",
    "alpha_c",
    "alpha_gamma",
    "gamma0",
    "rho_star",
    "phi_pi",
    "phi_eps",
    "pi_star",
    "eps_star",
    "omega",
];

#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "config line {}: {}", line, self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line: Some(line),
        message: message.into(),
    }
}

fn parse_f64(key: &str, value: &str, line: usize) -> Result<f64, ConfigError> {
    let lower = value.to_ascii_lowercase();
    if lower == "inf" || lower == "+inf" || lower == "infinity" {
        return Ok(f64::INFINITY);
    }
    let v: f64 = value
        .parse()
        .map_err(|_| err(line, format!("{key}: cannot parse '{value}' as a number")))?;
    if v.is_nan() {
        return Err(err(line, format!("{key}: NaN is not a valid value")));
    }
    Ok(v)
}

fn parse_usize(key: &str, value: &str, line: usize) -> Result<usize, ConfigError> {
    value
        .parse()
        .map_err(|_| err(line, format!("{key}: cannot parse '{value}' as a non-negative integer")))
}

fn parse_u64(key: &str, value: &str, line: usize) -> Result<u64, ConfigError> {
    value
        .parse()
        .map_err(|_| err(line, format!("{key}: cannot parse '{value}' as a non-negative integer")))
}

fn parse_bool(key: &str, value: &str, line: usize) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(err(line, format!("{key}: expected true or false, got '{value}'"))),
    }
}

impl Config {
    /// Parses a key=value document, applying defaults for unset keys and
    /// validating every invariant. Later assignments win.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config = Config::default();
        let mut lines_by_key: BTreeMap<String, usize> = BTreeMap::new();
        let mut sweep_x: BTreeMap<&str, (String, usize)> = BTreeMap::new();
        let mut sweep_y: BTreeMap<&str, (String, usize)> = BTreeMap::new();

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(line_no, format!("expected key = value, got '{line}'")))?;
            let key = key.trim();
            let value = value.trim();
            if value.is_empty() {
                return Err(err(line_no, format!("{key}: empty value")));
            }
            lines_by_key.insert(key.to_string(), line_no);
            match key {
                // Model.
                "n_firms" => config.model.n_firms = parse_usize(key, value, line_no)?,
                "R" => config.model.hire_fire_ratio = parse_f64(key, value, line_no)?,
                "eta0_minus" => config.model.eta0_minus = parse_f64(key, value, line_no)?,
                "c0" => config.model.c0 = parse_f64(key, value, line_no)?,
                "beta" => config.model.beta = parse_f64(key, value, line_no)?,
                "gamma_p" => config.model.gamma_p = parse_f64(key, value, line_no)?,
                "gamma_w" => config.model.gamma_w = parse_f64(key, value, line_no)?,
                "delta" => config.model.delta = parse_f64(key, value, line_no)?,
                "theta" => config.model.theta = parse_f64(key, value, line_no)?,
                "phi_revival" => config.model.revival_prob = parse_f64(key, value, line_no)?,
                "f" => config.model.default_share = parse_f64(key, value, line_no)?,
                "alpha_c" => config.model.alpha_c = parse_f64(key, value, line_no)?,
                "alpha_gamma" => config.model.alpha_gamma = parse_f64(key, value, line_no)?,
                "gamma0" => config.model.gamma0 = parse_f64(key, value, line_no)?,
                // Policy.
                "rho_star" => config.policy.natural_rate = parse_f64(key, value, line_no)?,
                "phi_pi" => config.policy.phi_pi = parse_f64(key, value, line_no)?,
                "phi_eps" => config.policy.phi_eps = parse_f64(key, value, line_no)?,
                "pi_star" => config.policy.inflation_target = parse_f64(key, value, line_no)?,
                "eps_star" => config.policy.employment_target = parse_f64(key, value, line_no)?,
                "omega" => config.policy.ema_weight = parse_f64(key, value, line_no)?,
                // Run settings.
                "t" => config.t = parse_usize(key, value, line_no)?,
                "t_eq" => config.t_eq = parse_usize(key, value, line_no)?,
                "seed" => config.seed = parse_u64(key, value, line_no)?,
                "ensemble" => config.ensemble = parse_usize(key, value, line_no)?,
                // Phase thresholds.
                "phase_fe_max_u" => config.thresholds.fe_max_u = parse_f64(key, value, line_no)?,
                "phase_ec_min_amplitude" => {
                    config.thresholds.ec_min_amplitude = parse_f64(key, value, line_no)?
                }
                "phase_fu_min_u" => config.thresholds.fu_min_u = parse_f64(key, value, line_no)?,
                // Sweep axes.
                "sweep_x" => {
                    sweep_x.insert("name", (value.to_string(), line_no));
                }
                "sweep_x_min" | "sweep_x_max" | "sweep_x_steps" => {
                    sweep_x.insert(&key[8..], (value.to_string(), line_no));
                }
                "sweep_y" => {
                    sweep_y.insert("name", (value.to_string(), line_no));
                }
                "sweep_y_min" | "sweep_y_max" | "sweep_y_steps" => {
                    sweep_y.insert(&key[8..], (value.to_string(), line_no));
                }
                // Shock.
                "shock_pre" => config.shock.pre_rate = parse_f64(key, value, line_no)?,
                "shock_post" => config.shock.post_rate = parse_f64(key, value, line_no)?,
                "shock_time" => config.shock.time = parse_usize(key, value, line_no)?,
                "shock_window_before" => {
                    config.shock.window_before = parse_usize(key, value, line_no)?
                }
                "shock_window_after" => {
                    config.shock.window_after = parse_usize(key, value, line_no)?
                }
                "shock_normalize" => config.shock.normalize = parse_bool(key, value, line_no)?,
                _ => return Err(err(line_no, format!("unknown key '{key}'"))),
            }
        }

        config.sweep_x = Self::build_axis("sweep_x", &sweep_x)?;
        config.sweep_y = Self::build_axis("sweep_y", &sweep_y)?;
        config.validate(&lines_by_key)?;
        Ok(config)
    }

    fn build_axis(
        prefix: &str,
        fields: &BTreeMap<&str, (String, usize)>,
    ) -> Result<Option<AxisConfig>, ConfigError> {
        if fields.is_empty() {
            return Ok(None);
        }
        let (name, name_line) = fields
            .get("name")
            .cloned()
            .ok_or_else(|| ConfigError {
                line: None,
                message: format!("{prefix}_min/max/steps given without {prefix}"),
            })?;
        if !AXIS_KEYS.contains(&name.as_str()) {
            return Err(err(name_line, format!("{prefix}: '{name}' is not a sweepable parameter")));
        }
        let get_f64 = |field: &str| -> Result<Option<f64>, ConfigError> {
            match fields.get(field) {
                Some((v, line)) => Ok(Some(parse_f64(&format!("{prefix}_{field}"), v, *line)?)),
                None => Ok(None),
            }
        };
        let min = get_f64("min")?.ok_or_else(|| ConfigError {
            line: None,
            message: format!("{prefix}_min is required with {prefix}"),
        })?;
        let max = get_f64("max")?.ok_or_else(|| ConfigError {
            line: None,
            message: format!("{prefix}_max is required with {prefix}"),
        })?;
        let steps = match fields.get("steps") {
            Some((v, line)) => parse_usize(&format!("{prefix}_steps"), v, *line)?,
            None => 21,
        };
        if steps == 0 {
            return Err(ConfigError {
                line: None,
                message: format!("{prefix}_steps must be >= 1"),
            });
        }
        if steps > 1 && max <= min {
            return Err(ConfigError {
                line: None,
                message: format!("{prefix}: max must exceed min"),
            });
        }
        Ok(Some(AxisConfig {
            name,
            min,
            max,
            steps,
        }))
    }

    fn validate(&self, lines: &BTreeMap<String, usize>) -> Result<(), ConfigError> {
        if let Err(e) = self.model.validate() {
            return Err(ConfigError {
                line: lines.get(e.key).copied(),
                message: e.to_string(),
            });
        }
        if let Err(e) = self.policy.validate() {
            return Err(ConfigError {
                line: lines.get(e.key).copied(),
                message: e.to_string(),
            });
        }
        if self.t == 0 {
            return Err(ConfigError {
                line: lines.get("t").copied(),
                message: "t must be >= 1".into(),
            });
        }
        if self.t_eq >= self.t {
            return Err(ConfigError {
                line: lines.get("t_eq").copied(),
                message: "t_eq must be smaller than t".into(),
            });
        }
        if self.ensemble == 0 {
            return Err(ConfigError {
                line: lines.get("ensemble").copied(),
                message: "ensemble must be >= 1".into(),
            });
        }
        if self.shock.time <= self.t_eq {
            return Err(ConfigError {
                line: lines.get("shock_time").copied(),
                message: "shock_time must exceed t_eq".into(),
            });
        }
        if self.shock.window_before > self.shock.time {
            return Err(ConfigError {
                line: lines.get("shock_window_before").copied(),
                message: "shock_window_before must not exceed shock_time".into(),
            });
        }
        Ok(())
    }

    /// Applies one `key=value` override (the CLI override syntax).
    pub fn apply_override(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let merged = format!("{key} = {value}");
        let mut copy = self.to_text();
        copy.push('\n');
        copy.push_str(&merged);
        *self = Config::parse(&copy).map_err(|e| ConfigError {
            line: None,
            message: e.message,
        })?;
        Ok(())
    }

    /// Serializes the full configuration; `parse(to_text())` is the
    /// identity. Floats use the shortest round-trip representation.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let f = |v: f64| {
            if v.is_infinite() {
                "inf".to_string()
            } else {
                format!("{v:?}")
            }
        };
        out.push_str("# model\n");
        out.push_str(&format!("n_firms = {}\n", self.model.n_firms));
        out.push_str(&format!("R = {}\n", f(self.model.hire_fire_ratio)));
        out.push_str(&format!("eta0_minus = {}\n", f(self.model.eta0_minus)));
        out.push_str(&format!("c0 = {}\n", f(self.model.c0)));
        out.push_str(&format!("beta = {}\n", f(self.model.beta)));
        out.push_str(&format!("gamma_p = {}\n", f(self.model.gamma_p)));
        out.push_str(&format!("gamma_w = {}\n", f(self.model.gamma_w)));
        out.push_str(&format!("delta = {}\n", f(self.model.delta)));
        out.push_str(&format!("theta = {}\n", f(self.model.theta)));
        out.push_str(&format!("phi_revival = {}\n", f(self.model.revival_prob)));
        out.push_str(&format!("f = {}\n", f(self.model.default_share)));
        out.push_str(&format!("alpha_c = {}\n", f(self.model.alpha_c)));
        out.push_str(&format!("alpha_gamma = {}\n", f(self.model.alpha_gamma)));
        out.push_str(&format!("gamma0 = {}\n", f(self.model.gamma0)));
        out.push_str("# policy\n");
        out.push_str(&format!("rho_star = {}\n", f(self.policy.natural_rate)));
        out.push_str(&format!("phi_pi = {}\n", f(self.policy.phi_pi)));
        out.push_str(&format!("phi_eps = {}\n", f(self.policy.phi_eps)));
        out.push_str(&format!("pi_star = {}\n", f(self.policy.inflation_target)));
        out.push_str(&format!("eps_star = {}\n", f(self.policy.employment_target)));
        out.push_str(&format!("omega = {}\n", f(self.policy.ema_weight)));
        out.push_str("# run\n");
        out.push_str(&format!("t = {}\n", self.t));
        out.push_str(&format!("t_eq = {}\n", self.t_eq));
        out.push_str(&format!("seed = {}\n", self.seed));
        out.push_str(&format!("ensemble = {}\n", self.ensemble));
        out.push_str("# phase classifier\n");
        out.push_str(&format!("phase_fe_max_u = {}\n", f(self.thresholds.fe_max_u)));
        out.push_str(&format!(
            "phase_ec_min_amplitude = {}\n",
            f(self.thresholds.ec_min_amplitude)
        ));
        out.push_str(&format!("phase_fu_min_u = {}\n", f(self.thresholds.fu_min_u)));
        if let Some(axis) = &self.sweep_x {
            out.push_str("# sweep\n");
            out.push_str(&format!("sweep_x = {}\n", axis.name));
            out.push_str(&format!("sweep_x_min = {}\n", f(axis.min)));
            out.push_str(&format!("sweep_x_max = {}\n", f(axis.max)));
            out.push_str(&format!("sweep_x_steps = {}\n", axis.steps));
        }
        if let Some(axis) = &self.sweep_y {
            out.push_str(&format!("sweep_y = {}\n", axis.name));
            out.push_str(&format!("sweep_y_min = {}\n", f(axis.min)));
            out.push_str(&format!("sweep_y_max = {}\n", f(axis.max)));
            out.push_str(&format!("sweep_y_steps = {}\n", axis.steps));
        }
        out.push_str("# shock\n");
        out.push_str(&format!("shock_pre = {}\n", f(self.shock.pre_rate)));
        out.push_str(&format!("shock_post = {}\n", f(self.shock.post_rate)));
        out.push_str(&format!("shock_time = {}\n", self.shock.time));
        out.push_str(&format!("shock_window_before = {}\n", self.shock.window_before));
        out.push_str(&format!("shock_window_after = {}\n", self.shock.window_after));
        out.push_str(&format!("shock_normalize = {}\n", self.shock.normalize));
        out
    }

    /// Sets one sweepable parameter by axis name.
    pub fn set_axis_value(
        model: &mut ModelParams,
        policy: &mut PolicyParams,
        name: &str,
        value: f64,
    ) -> Result<(), String> {
        match name {
            "R" => model.hire_fire_ratio = value,
            "eta0_minus" => model.eta0_minus = value,
            "c0" => model.c0 = value,
            "beta" => model.beta = value,
            "gamma_p" => model.gamma_p = value,
            "gamma_w" => model.gamma_w = value,
            "delta" => model.delta = value,
            "theta" => model.theta = value,
            "phi_revival" => model.revival_prob = value,
            "f" => model.default_share = value,
            "alpha_c" => model.alpha_c = value,
            "alpha_gamma" => model.alpha_gamma = value,
            "gamma0" => model.gamma0 = value,
            "rho_star" => policy.natural_rate = value,
            "phi_pi" => policy.phi_pi = value,
            "phi_eps" => policy.phi_eps = value,
            "pi_star" => policy.inflation_target = value,
            "eps_star" => policy.employment_target = value,
            "omega" => policy.ema_weight = value,
            _ => return Err(format!("'{name}' is not a sweepable parameter")),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_baseline_defaults() {
        let config = Config::parse("").unwrap();
        assert_eq!(config, Config::default());
        assert_eq!(config.model.n_firms, 2000);
        assert_eq!(config.model.hire_fire_ratio, 2.0);
        assert_eq!(config.model.eta0_minus, 0.1);
        assert_eq!(config.model.c0, 0.5);
        assert_eq!(config.model.gamma0, 0.0);
        assert_eq!(config.model.revival_prob, 0.1);
        assert_eq!(config.model.gamma_p, 0.05);
        assert_eq!(config.model.gamma_w, 0.05);
        assert_eq!(config.model.beta, 2.0);
        assert_eq!(config.model.delta, 0.02);
        assert_eq!(config.model.default_share, 0.5);
        assert_eq!(config.policy.ema_weight, 0.2);
        assert_eq!(config.policy.natural_rate, 0.02);
        assert_eq!(config.policy.inflation_target, 0.002);
        assert_eq!(config.policy.employment_target, 0.95);
    }

    #[test]
    fn theta_inf_sentinel() {
        let config = Config::parse("theta = inf").unwrap();
        assert!(config.model.theta.is_infinite());
        let config = Config::parse("theta = 3.5").unwrap();
        assert_eq!(config.model.theta, 3.5);
    }

    #[test]
    fn invalid_ratio_names_requirement() {
        let e = Config::parse("R = -1").unwrap_err();
        assert!(e.to_string().contains("R must be > 0"), "{e}");
        assert_eq!(e.line, Some(1));
    }

    #[test]
    fn unknown_key_rejected_with_line() {
        let e = Config::parse("n_firms = 10\nbogus = 3\n").unwrap_err();
        assert!(e.to_string().contains("unknown key 'bogus'"));
        assert_eq!(e.line, Some(2));
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = "\n# full comment\n  n_firms = 12  # trailing comment\n\n";
        let config = Config::parse(text).unwrap();
        assert_eq!(config.model.n_firms, 12);
    }

    #[test]
    fn round_trip_is_identity() {
        let text = "theta = 3\nR = 1.7\nsweep_x = phi_pi\nsweep_x_min = 0\nsweep_x_max = 1.5\nsweep_x_steps = 5\nshock_normalize = false\nseed = 99\npi_star = 0.00123456789\n";
        let a = Config::parse(text).unwrap();
        let b = Config::parse(&a.to_text()).unwrap();
        assert_eq!(a, b);
        // Defaults also round-trip (including theta = inf).
        let d = Config::default();
        assert_eq!(Config::parse(&d.to_text()).unwrap(), d);
    }

    #[test]
    fn bad_values_are_diagnosed() {
        assert!(Config::parse("t = twelve").unwrap_err().to_string().contains("t:"));
        assert!(Config::parse("omega = 0").unwrap_err().to_string().contains("omega"));
        assert!(Config::parse("theta = nan").unwrap_err().to_string().contains("theta"));
        assert!(Config::parse("t = 100\nt_eq = 100").unwrap_err().to_string().contains("t_eq"));
        assert!(Config::parse("n_firms").unwrap_err().to_string().contains("key = value"));
    }

    #[test]
    fn sweep_axis_validation() {
        let e = Config::parse("sweep_x = nope\nsweep_x_min = 0\nsweep_x_max = 1").unwrap_err();
        assert!(e.to_string().contains("not a sweepable parameter"));
        let e = Config::parse("sweep_x = phi_pi\nsweep_x_max = 1").unwrap_err();
        assert!(e.to_string().contains("sweep_x_min is required"));
        let ok = Config::parse("sweep_x = phi_pi\nsweep_x_min = 0\nsweep_x_max = 1").unwrap();
        assert_eq!(ok.sweep_x.as_ref().unwrap().steps, 21);
    }

    #[test]
    fn overrides_apply_and_validate() {
        let mut config = Config::default();
        config.apply_override("theta", "2.5").unwrap();
        assert_eq!(config.model.theta, 2.5);
        assert!(config.apply_override("R", "-3").is_err());
        assert!(config.apply_override("nonsense", "1").is_err());
    }
}
