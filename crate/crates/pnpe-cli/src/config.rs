//! Flat key=value run configuration with section prefixes
//! (`source.g`, `loss.eta_D`, `optimizer.restarts`). Unknown keys are
//! rejected so typos cannot silently fall back to defaults.

use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

/// Fully-resolved run configuration; every field has a default so the
/// resolved snapshot embedded in output headers is complete.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source_g: f64,
    pub source_t_b: f64,
    pub source_t_c: f64,
    pub source_phi_a: f64,
    pub source_phi_b: f64,
    pub source_eta_s: f64,
    pub loss_eta_d: f64,
    pub loss_eta_h: f64,
    pub loss_eta_c: f64,
    pub optimizer_restarts: usize,
    pub optimizer_seed: u64,
    pub metrics_t: f64,
    pub metrics_repetition_rate: f64,
    pub sweep_eta_start: f64,
    pub sweep_eta_stop: f64,
    pub sweep_eta_step: f64,
    pub sweep_eta_c_start: f64,
    pub sweep_eta_c_stop: f64,
    pub sweep_points: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            source_g: 0.33,
            source_t_b: 0.8,
            source_t_c: 0.5,
            source_phi_a: 0.0,
            source_phi_b: 0.0,
            source_eta_s: 1.0,
            loss_eta_d: 1.0,
            loss_eta_h: 1.0,
            loss_eta_c: 1.0,
            optimizer_restarts: 8,
            optimizer_seed: 1,
            metrics_t: 0.1,
            metrics_repetition_rate: 1.0,
            sweep_eta_start: 0.65,
            sweep_eta_stop: 1.0,
            sweep_eta_step: 0.05,
            sweep_eta_c_start: 1e-4,
            sweep_eta_c_stop: 1.0,
            sweep_points: 21,
        }
    }
}

impl RunConfig {
    /// Parse `key = value` lines ('#' comments, blank lines allowed) on top
    /// of the defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key=value", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| ConfigError(format!("line {}: {}", lineno + 1, e.0)))?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let f = || -> Result<f64, ConfigError> {
            value
                .parse()
                .map_err(|_| ConfigError(format!("{key}: '{value}' is not a number")))
        };
        let u = || -> Result<u64, ConfigError> {
            value
                .parse()
                .map_err(|_| ConfigError(format!("{key}: '{value}' is not an integer")))
        };
        match key {
            "source.g" => self.source_g = f()?,
            "source.t_b" => self.source_t_b = f()?,
            "source.t_c" => self.source_t_c = f()?,
            "source.phi_a" => self.source_phi_a = f()?,
            "source.phi_b" => self.source_phi_b = f()?,
            "source.eta_s" => self.source_eta_s = f()?,
            "loss.eta_D" => self.loss_eta_d = f()?,
            "loss.eta_H" => self.loss_eta_h = f()?,
            "loss.eta_C" => self.loss_eta_c = f()?,
            "optimizer.restarts" => self.optimizer_restarts = u()? as usize,
            "optimizer.seed" => self.optimizer_seed = u()?,
            "metrics.t" => self.metrics_t = f()?,
            "metrics.repetition_rate" => self.metrics_repetition_rate = f()?,
            "sweep.eta_start" => self.sweep_eta_start = f()?,
            "sweep.eta_stop" => self.sweep_eta_stop = f()?,
            "sweep.eta_step" => self.sweep_eta_step = f()?,
            "sweep.eta_c_start" => self.sweep_eta_c_start = f()?,
            "sweep.eta_c_stop" => self.sweep_eta_c_stop = f()?,
            "sweep.points" => self.sweep_points = u()? as usize,
            _ => return Err(ConfigError(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Canonical resolved snapshot: sorted `key=value` pairs, one string.
    pub fn resolved(&self) -> String {
        let pairs: Vec<(&str, String)> = vec![
            ("loss.eta_C", format!("{}", self.loss_eta_c)),
            ("loss.eta_D", format!("{}", self.loss_eta_d)),
            ("loss.eta_H", format!("{}", self.loss_eta_h)),
            ("metrics.repetition_rate", format!("{}", self.metrics_repetition_rate)),
            ("metrics.t", format!("{}", self.metrics_t)),
            ("optimizer.restarts", format!("{}", self.optimizer_restarts)),
            ("optimizer.seed", format!("{}", self.optimizer_seed)),
            ("source.eta_s", format!("{}", self.source_eta_s)),
            ("source.g", format!("{}", self.source_g)),
            ("source.phi_a", format!("{}", self.source_phi_a)),
            ("source.phi_b", format!("{}", self.source_phi_b)),
            ("source.t_b", format!("{}", self.source_t_b)),
            ("source.t_c", format!("{}", self.source_t_c)),
            ("sweep.eta_c_start", format!("{}", self.sweep_eta_c_start)),
            ("sweep.eta_c_stop", format!("{}", self.sweep_eta_c_stop)),
            ("sweep.eta_start", format!("{}", self.sweep_eta_start)),
            ("sweep.eta_step", format!("{}", self.sweep_eta_step)),
            ("sweep.eta_stop", format!("{}", self.sweep_eta_stop)),
            ("sweep.points", format!("{}", self.sweep_points)),
        ];
        let map: BTreeMap<&str, String> = pairs.into_iter().collect();
        let mut out = String::new();
        for (i, (k, v)) in map.iter().enumerate() {
            if i > 0 {
                out.push(';');
            }
            let _ = write!(out, "{k}={v}");
        }
        out
    }

    /// The detection-efficiency sweep grid, validated.
    pub fn eta_grid(&self) -> Result<Vec<f64>, ConfigError> {
        let (start, stop, step) = (self.sweep_eta_start, self.sweep_eta_stop, self.sweep_eta_step);
        if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) {
            return Err(ConfigError(format!(
                "sweep grid [{start}, {stop}] outside [0,1]"
            )));
        }
        if step <= 0.0 || start > stop {
            return Err(ConfigError(format!(
                "malformed sweep grid start={start} stop={stop} step={step}"
            )));
        }
        let mut grid = Vec::new();
        let mut eta = start;
        while eta <= stop + 1e-12 {
            grid.push(eta.min(1.0));
            eta += step;
        }
        Ok(grid)
    }

    /// Log-spaced channel-transmittance grid, validated.
    pub fn eta_c_grid(&self) -> Result<Vec<f64>, ConfigError> {
        let (start, stop, n) = (self.sweep_eta_c_start, self.sweep_eta_c_stop, self.sweep_points);
        if start <= 0.0 || stop > 1.0 || start >= stop || n < 2 {
            return Err(ConfigError(format!(
                "malformed eta_C grid start={start} stop={stop} points={n}"
            )));
        }
        let (l0, l1) = (start.log10(), stop.log10());
        Ok((0..n)
            .map(|i| 10f64.powf(l0 + (l1 - l0) * i as f64 / (n - 1) as f64))
            .collect())
    }
}
