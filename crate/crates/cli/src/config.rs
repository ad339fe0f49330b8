//! Flat `key = value` experiment configuration.
//!
//! Numeric values accept arithmetic with `pi`, e.g. `h = pi/4` or `theta = 0.3*pi`.
//! Lines starting with `#` are comments.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::path::Path;

use qdynmaps::harness::CLAIM_IDS;
use qdynmaps::BlochVector;

pub const CONSTRUCTIONS: [&str; 7] = [
    "pc",
    "env_coherent",
    "correlated",
    "gp_finetuned",
    "gp_3qubit",
    "appD",
    "general2q",
];

const REAL_DEFAULTS: [(&str, f64); 32] = [
    ("J", 0.5),
    ("h", FRAC_PI_4),
    ("t", 1.0),
    ("b1", 0.0),
    ("b2", 0.0),
    ("b3", 0.3),
    ("rG", -0.2),
    ("f1", 0.2),
    ("f2", 0.1),
    ("c11", 0.0),
    ("c12", 0.0),
    ("c13", 0.0),
    ("c21", 0.0),
    ("c22", 0.0),
    ("c23", 0.0),
    ("c31", 0.0),
    ("c32", 0.0),
    ("c33", 0.0),
    ("phi0", 0.0),
    ("phi1", 0.0),
    ("phi2", 0.0),
    ("alpha", 0.0),
    ("theta", 0.0),
    ("a1", 0.0),
    ("a2", 0.0),
    ("a3", 1.0),
    ("a3_min", -1.0),
    ("a3_max", 1.0),
    ("epsilon", 1e-8),
    ("tol", 1e-10),
    // unset means "same as h"
    ("h1", f64::NAN),
    ("h2", f64::NAN),
];

const INT_DEFAULTS: [(&str, u64); 7] = [
    ("steps", 20),
    ("n_max", 10_000),
    ("sweep_points", 201),
    ("cloud_points", 200),
    ("n", 2),
    ("seed", 0),
    // 0 means the campaign default
    ("trials", 0),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub construction: String,
    pub claim: String,
    reals: BTreeMap<&'static str, f64>,
    ints: BTreeMap<&'static str, u64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            construction: "pc".into(),
            claim: "all".into(),
            reals: REAL_DEFAULTS.into_iter().collect(),
            ints: INT_DEFAULTS.into_iter().collect(),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| invalid(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "construction" => {
                if !CONSTRUCTIONS.contains(&value) {
                    return Err(invalid(format!(
                        "unknown construction `{value}`; available: {}",
                        CONSTRUCTIONS.join(", ")
                    )));
                }
                self.construction = value.to_string();
            }
            "claim" => {
                if value != "all" && !CLAIM_IDS.contains(&value) {
                    return Err(invalid(format!(
                        "unknown claim `{value}`; available: all, {}",
                        CLAIM_IDS.join(", ")
                    )));
                }
                self.claim = value.to_string();
            }
            _ => {
                if let Some((&k, _)) = self.reals.get_key_value(key) {
                    let v = eval(value).map_err(|e| invalid(format!("{key}: {e}")))?;
                    self.reals.insert(k, v);
                } else if let Some((&k, _)) = self.ints.get_key_value(key) {
                    let v = value
                        .parse::<u64>()
                        .map_err(|_| invalid(format!("{key}: expected a non-negative integer, got `{value}`")))?;
                    self.ints.insert(k, v);
                } else {
                    return Err(invalid(format!("unknown key `{key}`")));
                }
            }
        }
        Ok(())
    }

    pub fn real(&self, key: &str) -> f64 {
        self.reals[key]
    }

    pub fn int(&self, key: &str) -> u64 {
        self.ints[key]
    }

    pub fn h1(&self) -> f64 {
        self.or_h("h1")
    }

    pub fn h2(&self) -> f64 {
        self.or_h("h2")
    }

    fn or_h(&self, key: &str) -> f64 {
        let v = self.real(key);
        if v.is_nan() {
            self.real("h")
        } else {
            v
        }
    }

    fn vector(&self, prefix: &str) -> BlochVector {
        let v = |i: usize| self.real(&format!("{prefix}{i}"));
        BlochVector::new(v(1), v(2), v(3))
    }

    /// Environment Bloch vector `(b1, b2, b3)`.
    pub fn env(&self) -> BlochVector {
        self.vector("b")
    }

    /// Initial state `(a1, a2, a3)`.
    pub fn initial(&self) -> BlochVector {
        self.vector("a")
    }

    pub fn chi(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.real(&format!("c{}{}", i + 1, j + 1))))
    }

    pub fn trials(&self) -> Option<usize> {
        match self.int("trials") {
            0 => None,
            t => Some(t as usize),
        }
    }

    /// Bounds that hold for every command.
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (k, v) in &self.reals {
            if !v.is_finite() && !matches!(*k, "h1" | "h2") {
                return Err(invalid(format!("{k} is not finite")));
            }
        }
        for (name, v) in [("b", self.env()), ("a", self.initial())] {
            if v.norm() > 1.0 + 1e-12 {
                return Err(invalid(format!("Bloch vector {name} has norm {} > 1", v.norm())));
            }
        }
        let unit = |k: &str| self.real(k).abs() <= 1.0;
        for k in ["rG", "f1", "f2", "a3_min", "a3_max"] {
            if !unit(k) {
                return Err(invalid(format!("{k} = {} outside [-1, 1]", self.real(k))));
            }
        }
        if self.real("a3_min") > self.real("a3_max") {
            return Err(invalid("a3_min exceeds a3_max"));
        }
        if self.int("sweep_points") < 1 {
            return Err(invalid("sweep_points must be at least 1"));
        }
        if self.int("n_max") < 1 {
            return Err(invalid("n_max must be at least 1"));
        }
        if !(self.real("epsilon") > 0.0) || !(self.real("tol") > 0.0) {
            return Err(invalid("epsilon and tol must be positive"));
        }
        if !(2..=4).contains(&self.int("n")) {
            return Err(invalid("n must be 2, 3 or 4"));
        }
        Ok(())
    }

    /// Every effective setting as `key=value`, sorted, for output headers.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = vec![
            ("construction".into(), self.construction.clone()),
            ("claim".into(), self.claim.clone()),
        ];
        for (k, v) in &self.reals {
            let v = match *k {
                "h1" => self.h1(),
                "h2" => self.h2(),
                _ => *v,
            };
            out.push((k.to_string(), format!("{v:?}")));
        }
        for (k, v) in &self.ints {
            out.push((k.to_string(), v.to_string()));
        }
        out.sort();
        out
    }
}

/// Evaluates `+ - * /`, parentheses, decimal literals and `pi`. A literal directly followed by
/// `pi` multiplies (`2pi`).
pub fn eval(src: &str) -> Result<f64, String> {
    let mut p = Parser {
        s: src.as_bytes(),
        i: 0,
    };
    let v = p.expr()?;
    p.skip_ws();
    if p.i != p.s.len() {
        return Err(format!("unexpected `{}` in `{src}`", &src[p.i..]));
    }
    if !v.is_finite() {
        return Err(format!("`{src}` is not finite"));
    }
    Ok(v)
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }

    fn expr(&mut self) -> Result<f64, String> {
        let mut v = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.i += 1;
            let rhs = self.term()?;
            v = if op == b'+' { v + rhs } else { v - rhs };
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<f64, String> {
        let mut v = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.i += 1;
            let rhs = self.unary()?;
            v = if op == b'*' { v * rhs } else { v / rhs };
        }
        Ok(v)
    }

    fn unary(&mut self) -> Result<f64, String> {
        match self.peek() {
            Some(b'-') => {
                self.i += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.i += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn pi(&mut self) -> bool {
        if self.s[self.i..].starts_with(b"pi") {
            self.i += 2;
            true
        } else {
            false
        }
    }

    fn atom(&mut self) -> Result<f64, String> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err("missing `)`".into());
                }
                self.i += 1;
                Ok(v)
            }
            Some(b'p') if self.pi() => Ok(PI),
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.i;
                while self.i < self.s.len() {
                    let c = self.s[self.i];
                    let exp_sign = (c == b'+' || c == b'-') && matches!(self.s[self.i - 1], b'e' | b'E');
                    if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                        self.i += 1;
                    } else {
                        break;
                    }
                }
                let text = std::str::from_utf8(&self.s[start..self.i]).expect("ascii");
                let v: f64 = text.parse().map_err(|_| format!("bad number `{text}`"))?;
                Ok(if self.pi() { v * PI } else { v })
            }
            Some(c) => Err(format!("unexpected `{}`", c as char)),
            None => Err("empty expression".into()),
        }
    }
}
