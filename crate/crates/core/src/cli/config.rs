//! Line-oriented `key = value` scenario files with a closed schema.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;

use crate::dynamics::{CoefficientSchedule, Sinusoid};
use crate::error::{Error, Result};
use crate::fock::AlgebraParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Float,
    Int,
    FloatList,
    IntList,
    Text,
    Bool,
}

const SCHEMA: &[(&str, Kind)] = &[
    // algebra
    ("epsilon", Kind::Float),
    ("ell", Kind::Int),
    ("l", Kind::Float),
    ("hbar", Kind::Float),
    // schedule
    ("schedule", Kind::Text),
    ("schedule_table", Kind::Text),
    ("alpha_re", Kind::Float),
    ("alpha_im", Kind::Float),
    ("beta", Kind::Float),
    ("delta", Kind::Float),
    ("alpha_re_amp", Kind::Float),
    ("alpha_re_omega", Kind::Float),
    ("alpha_re_phase", Kind::Float),
    ("alpha_im_amp", Kind::Float),
    ("alpha_im_omega", Kind::Float),
    ("alpha_im_phase", Kind::Float),
    ("beta_amp", Kind::Float),
    ("beta_omega", Kind::Float),
    ("beta_phase", Kind::Float),
    ("delta_amp", Kind::Float),
    ("delta_omega", Kind::Float),
    ("delta_phase", Kind::Float),
    // state
    ("zeta_re", Kind::Float),
    ("zeta_im", Kind::Float),
    ("zeta_abs", Kind::Float),
    ("zeta_arg", Kind::Float),
    ("xi_re", Kind::Float),
    ("xi_im", Kind::Float),
    ("xi_abs", Kind::Float),
    ("xi_arg", Kind::Float),
    // run
    ("t_final", Kind::Float),
    ("dt", Kind::Float),
    ("truncation", Kind::Int),
    ("samples", Kind::Int),
    // output
    ("out_dir", Kind::Text),
    ("digits", Kind::Int),
    ("plot_scripts", Kind::Bool),
    // figures
    ("epsilons", Kind::FloatList),
    ("ells", Kind::IntList),
    ("zetas", Kind::FloatList),
    ("n_max", Kind::Int),
    ("x_min", Kind::Float),
    ("x_max", Kind::Float),
    ("points", Kind::Int),
    ("r_max", Kind::Float),
    ("nodes", Kind::Int),
    ("omega0", Kind::Float),
    ("periods", Kind::Float),
    // verify
    ("sabotage", Kind::Bool),
];

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(u64),
    FloatList(Vec<f64>),
    IntList(Vec<u64>),
    Text(String),
    Bool(bool),
}

/// Parsed scenario. Lookups fall back to per-command defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioConfig {
    values: BTreeMap<String, Value>,
    base_dir: Option<PathBuf>,
}

fn kind_of(key: &str) -> Option<Kind> {
    SCHEMA.iter().find(|(k, _)| *k == key).map(|(_, kind)| *kind)
}

fn parse_float(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn parse_int(s: &str) -> std::result::Result<u64, String> {
    s.parse().map_err(|_| format!("'{s}' is not a non-negative integer"))
}

fn parse_value(key: &str, raw: &str) -> std::result::Result<Value, String> {
    let kind = kind_of(key).ok_or_else(|| format!("unknown key '{key}'"))?;
    let raw = raw.trim();
    if raw.is_empty() {
        return Err(format!("empty value for '{key}'"));
    }
    Ok(match kind {
        Kind::Float => Value::Float(parse_float(raw)?),
        Kind::Int => Value::Int(parse_int(raw)?),
        Kind::FloatList => Value::FloatList(raw.split(',').map(|p| parse_float(p.trim())).collect::<std::result::Result<_, _>>()?),
        Kind::IntList => Value::IntList(raw.split(',').map(|p| parse_int(p.trim())).collect::<std::result::Result<_, _>>()?),
        Kind::Text => Value::Text(raw.to_string()),
        Kind::Bool => match raw {
            "true" | "yes" | "1" => Value::Bool(true),
            "false" | "no" | "0" => Value::Bool(false),
            _ => return Err(format!("'{raw}' is not a boolean")),
        },
    })
}

impl ScenarioConfig {
    /// `#` starts a comment; blank lines are skipped; keys may appear once.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |detail: String| Error::ConfigLine { line: line_no, detail };
            let (key, raw) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got '{content}'")))?;
            let key = key.trim();
            let value = parse_value(key, raw).map_err(err)?;
            if cfg.values.insert(key.to_string(), value).is_some() {
                return Err(err(format!("duplicate key '{key}'")));
            }
        }
        cfg.check_consistency()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// Apply a `key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects key=value, got '{assignment}'")))?;
        let key = key.trim();
        let value = parse_value(key, raw).map_err(|d| Error::Config(format!("--set {assignment}: {d}")))?;
        self.values.insert(key.to_string(), value);
        self.check_consistency()
    }

    fn check_consistency(&self) -> Result<()> {
        let has = |k: &str| self.values.contains_key(k);
        if has("epsilon") && has("ell") {
            return Err(Error::Config("set either epsilon or ell, not both".into()));
        }
        for p in ["zeta", "xi"] {
            let cart = has(&format!("{p}_re")) || has(&format!("{p}_im"));
            let polar = has(&format!("{p}_abs")) || has(&format!("{p}_arg"));
            if cart && polar {
                return Err(Error::Config(format!("{p} given in both cartesian and polar form")));
            }
        }
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn float(&self, key: &str, default: f64) -> f64 {
        match self.values.get(key) {
            Some(Value::Float(v)) => *v,
            _ => default,
        }
    }

    pub fn int(&self, key: &str, default: u64) -> u64 {
        match self.values.get(key) {
            Some(Value::Int(v)) => *v,
            _ => default,
        }
    }

    pub fn float_list(&self, key: &str, default: &[f64]) -> Vec<f64> {
        match self.values.get(key) {
            Some(Value::FloatList(v)) => v.clone(),
            _ => default.to_vec(),
        }
    }

    pub fn int_list(&self, key: &str, default: &[u64]) -> Vec<u64> {
        match self.values.get(key) {
            Some(Value::IntList(v)) => v.clone(),
            _ => default.to_vec(),
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        match self.values.get(key) {
            Some(Value::Text(v)) => Some(v),
            _ => None,
        }
    }

    pub fn flag(&self, key: &str, default: bool) -> bool {
        match self.values.get(key) {
            Some(Value::Bool(v)) => *v,
            _ => default,
        }
    }

    pub fn zeta(&self, default: C64) -> C64 {
        self.complex("zeta", default)
    }

    pub fn xi(&self, default: C64) -> C64 {
        self.complex("xi", default)
    }

    fn complex(&self, p: &str, default: C64) -> C64 {
        if self.contains(&format!("{p}_abs")) || self.contains(&format!("{p}_arg")) {
            C64::from_polar(self.float(&format!("{p}_abs"), default.norm()), self.float(&format!("{p}_arg"), default.arg()))
        } else {
            C64::new(self.float(&format!("{p}_re"), default.re), self.float(&format!("{p}_im"), default.im))
        }
    }

    /// Algebra from `epsilon` or `ell`, plus `l` and `hbar`.
    pub fn algebra(&self, default_epsilon: f64) -> Result<AlgebraParams> {
        let base = if self.contains("ell") {
            let ell = u32::try_from(self.int("ell", 0)).map_err(|_| Error::Config("ell too large".into()))?;
            AlgebraParams::from_ell(ell)
        } else {
            AlgebraParams::new(self.float("epsilon", default_epsilon))?
        };
        base.with_length_scale(self.float("l", 1.0))?.with_hbar(self.float("hbar", 1.0))
    }

    /// `schedule = constant | sinusoidal | table`; constant `β = 1` by default.
    pub fn schedule(&self) -> Result<CoefficientSchedule> {
        let family = self.text("schedule").unwrap_or("constant");
        match family {
            "constant" => CoefficientSchedule::constant(
                C64::new(self.float("alpha_re", 0.0), self.float("alpha_im", 0.0)),
                self.float("beta", 1.0),
                self.float("delta", 0.0),
            ),
            "sinusoidal" => {
                let s = |name: &str, offset: f64| Sinusoid {
                    offset: self.float(name, offset),
                    amplitude: self.float(&format!("{name}_amp"), 0.0),
                    omega: self.float(&format!("{name}_omega"), 0.0),
                    phase: self.float(&format!("{name}_phase"), 0.0),
                };
                CoefficientSchedule::sinusoidal(s("alpha_re", 0.0), s("alpha_im", 0.0), s("beta", 1.0), s("delta", 0.0))
            }
            "table" => {
                let rel = self
                    .text("schedule_table")
                    .ok_or_else(|| Error::Config("schedule = table needs schedule_table".into()))?;
                let path = match &self.base_dir {
                    Some(dir) if Path::new(rel).is_relative() => dir.join(rel),
                    _ => PathBuf::from(rel),
                };
                CoefficientSchedule::from_csv(&path)
            }
            other => Err(Error::Config(format!("unknown schedule family '{other}'"))),
        }
    }

    pub fn digits(&self) -> Result<usize> {
        let d = self.int("digits", 12);
        if (1..=17).contains(&d) {
            Ok(d as usize)
        } else {
            Err(Error::Config(format!("digits must be in 1..=17, got {d}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_defaults() {
        let cfg = ScenarioConfig::parse("# scenario\nell = 2\n\nzeta_abs = 0.3  # squeeze\nepsilons = 0.5, 2.5\n").unwrap();
        assert_eq!(cfg.int("ell", 0), 2);
        assert_eq!(cfg.float_list("epsilons", &[]), vec![0.5, 2.5]);
        assert!((cfg.zeta(C64::new(0.0, 0.0)) - C64::new(0.3, 0.0)).norm() < 1e-16);
        assert_eq!(cfg.float("dt", 0.01), 0.01);
        assert_eq!(cfg.algebra(0.5).unwrap().epsilon, 4.5);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = ScenarioConfig::parse("ell = 1\n\nbogus = 3\n").unwrap_err();
        assert!(matches!(e, Error::ConfigLine { line: 3, .. }), "{e}");
        let e = ScenarioConfig::parse("dt = 1,5\n").unwrap_err();
        assert!(matches!(e, Error::ConfigLine { line: 1, .. }));
        let e = ScenarioConfig::parse("dt = 0.1\ndt = 0.2\n").unwrap_err();
        assert!(matches!(e, Error::ConfigLine { line: 2, .. }));
        assert!(ScenarioConfig::parse("just words\n").is_err());
        assert!(ScenarioConfig::parse("epsilon = 1.5\nell = 1\n").is_err());
        assert!(ScenarioConfig::parse("xi_re = 1\nxi_abs = 1\n").is_err());
    }

    #[test]
    fn overrides() {
        let mut cfg = ScenarioConfig::parse("n_max = 10\n").unwrap();
        cfg.set("n_max=30").unwrap();
        assert_eq!(cfg.int("n_max", 0), 30);
        assert!(cfg.set("nope=1").is_err());
        assert!(cfg.set("n_max").is_err());
    }

    #[test]
    fn schedules() {
        let cfg = ScenarioConfig::parse("schedule = sinusoidal\nbeta_amp = 0.2\nbeta_omega = 1\n").unwrap();
        assert_eq!(cfg.schedule().unwrap().family(), "sinusoidal");
        let bad = ScenarioConfig::parse("schedule = wiggly\n").unwrap();
        assert!(bad.schedule().is_err());
        let indefinite = ScenarioConfig::parse("beta = 0.1\nalpha_re = 0.5\n").unwrap();
        assert!(indefinite.schedule().is_err());
    }
}
