use std::path::{Path, PathBuf};

use lagdeconv::Estimator;
use lagdeconv_groundwater::{CovarianceConfig, DomainConfig};

use crate::error::{Error, Result};

/// Everything that determines a study run.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub realizations: usize,
    pub laguerre_terms: usize,
    pub scale_t: f64,
    pub domain: DomainConfig,
    /// `covariance.n_terms` is the number of KLE terms.
    pub covariance: CovarianceConfig,
    pub base_seed: u64,
    pub estimator: Estimator,
    pub output_dir: PathBuf,
    /// The input is `a = amplitude·(1, 0, …, 0)`.
    pub input_amplitude: f64,
    pub plots: bool,
}

impl StudyConfig {
    /// 50 realizations on the coarse grid.
    pub fn desk() -> Self {
        Self {
            realizations: 50,
            laguerre_terms: 50,
            scale_t: 100.0,
            domain: DomainConfig::desk(),
            covariance: CovarianceConfig::default(),
            base_seed: 0,
            estimator: Estimator::Averaged,
            output_dir: PathBuf::from("study-out"),
            input_amplitude: 1.0,
            plots: false,
        }
    }

    /// 500 realizations on the fine grid.
    pub fn full() -> Self {
        Self { realizations: 500, domain: DomainConfig::default(), ..Self::desk() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::Config("realizations must be at least 1".into()));
        }
        if self.laguerre_terms == 0 {
            return Err(Error::Config("laguerre_terms must be at least 1".into()));
        }
        if !(self.scale_t.is_finite() && self.scale_t > 0.0) {
            return Err(Error::Config(format!("scale_T must be positive, got {}", self.scale_t)));
        }
        if !(self.input_amplitude.is_finite() && self.input_amplitude != 0.0) {
            return Err(Error::Config(format!("input_amplitude must be finite and nonzero, got {}", self.input_amplitude)));
        }
        self.domain.validate()?;
        self.covariance.validate()?;
        Ok(())
    }

    /// Apply `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(key.trim(), value.trim()).map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text)
    }

    /// Set one field by its config-file key.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
            v.parse().map_err(|_| format!("{key}: cannot parse '{v}'"))
        }
        let d = &mut self.domain;
        let c = &mut self.covariance;
        match key {
            "realizations" => self.realizations = num(key, value)?,
            "laguerre_terms" => self.laguerre_terms = num(key, value)?,
            "scale_T" | "scale_t" => self.scale_t = num(key, value)?,
            "kle_terms" => c.n_terms = num(key, value)?,
            "variance" => c.variance = num(key, value)?,
            "eta1" => c.eta1 = num(key, value)?,
            "eta2" => c.eta2 = num(key, value)?,
            "L1" | "l1" => d.l1 = num(key, value)?,
            "L2" | "l2" => d.l2 = num(key, value)?,
            "Ss" | "ss" => d.ss = num(key, value)?,
            "nx" => d.nx = num(key, value)?,
            "ny" => d.ny = num(key, value)?,
            "dt" => d.dt = num(key, value)?,
            "t_end" => d.t_end = num(key, value)?,
            "probe_x" => d.probe.0 = num(key, value)?,
            "probe_y" => d.probe.1 = num(key, value)?,
            "base_seed" | "seed" => self.base_seed = num(key, value)?,
            "estimator" => self.estimator = value.parse().map_err(|e: lagdeconv::Error| e.to_string())?,
            "output_dir" | "out" => self.output_dir = PathBuf::from(value),
            "input_amplitude" => self.input_amplitude = num(key, value)?,
            "plots" => self.plots = num(key, value)?,
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    /// Config-file text that reproduces this configuration.
    pub fn to_text(&self) -> String {
        let d = &self.domain;
        let c = &self.covariance;
        format!(
            "realizations = {}\nlaguerre_terms = {}\nscale_T = {}\nkle_terms = {}\nvariance = {}\neta1 = {}\neta2 = {}\n\
             L1 = {}\nL2 = {}\nSs = {}\nnx = {}\nny = {}\ndt = {}\nt_end = {}\nprobe_x = {}\nprobe_y = {}\n\
             base_seed = {}\nestimator = {}\ninput_amplitude = {}\noutput_dir = {}\nplots = {}\n",
            self.realizations,
            self.laguerre_terms,
            self.scale_t,
            c.n_terms,
            c.variance,
            c.eta1,
            c.eta2,
            d.l1,
            d.l2,
            d.ss,
            d.nx,
            d.ny,
            d.dt,
            d.t_end,
            d.probe.0,
            d.probe.1,
            self.base_seed,
            self.estimator,
            self.input_amplitude,
            self.output_dir.display(),
            self.plots
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_roundtrip() {
        let mut cfg = StudyConfig::full();
        cfg.base_seed = 77;
        cfg.estimator = Estimator::LeastSquares;
        cfg.covariance.variance = 0.5;
        let mut back = StudyConfig::desk();
        back.apply_text(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn comments_and_errors() {
        let mut cfg = StudyConfig::desk();
        cfg.apply_text("# header\n\nnx = 30   # cells\n").unwrap();
        assert_eq!(cfg.domain.nx, 30);
        assert!(cfg.apply_text("bogus = 1").is_err());
        assert!(cfg.apply_text("nx 30").is_err());
        assert!(cfg.apply_text("dt = fast").is_err());
    }

    #[test]
    fn presets_validate() {
        StudyConfig::desk().validate().unwrap();
        StudyConfig::full().validate().unwrap();
        assert!(StudyConfig { realizations: 0, ..StudyConfig::desk() }.validate().is_err());
    }
}
