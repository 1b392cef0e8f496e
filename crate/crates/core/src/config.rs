//! Run configuration: a flat INI-style key-value document with fixed
//! sections, strict unknown-key rejection, range validation, and a canonical
//! emitter such that `parse(emit(c)) == c`.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Domain, Grid, Point};
use crate::mountain::MountainPassConfig;
use crate::phi::{CoordPoly, PhiFamily};
use crate::problem::Nonlinearity;

#[derive(Debug, Clone, PartialEq)]
pub struct DomainSection {
    pub dim: usize,
    pub extent: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSection {
    pub n: [usize; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiSection {
    /// constant_power | variable_exponent | double_phase
    pub kind: String,
    pub p: f64,
    /// Affine coefficients (c0, cx, cy) of p(x) for variable_exponent.
    pub p_coeffs: [f64; 3],
    pub q: f64,
    /// Affine coefficients of the double-phase weight a(x).
    pub a_coeffs: [f64; 3],
    /// Companion exponent used by the hypothesis checkers.
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RhsSection {
    /// pure_power | weighted_power | zero
    pub kind: String,
    pub q: f64,
    /// Affine coefficients of the weight c(x) for weighted_power.
    pub coeff: [f64; 3],
    pub theta: f64,
    pub t0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpSection {
    pub path_points: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub bump_center: [f64; 2],
    pub bump_radius: f64,
    pub bump_amplitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSection {
    pub seed: u64,
    pub output_dir: String,
    pub override_hypotheses: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub domain: DomainSection,
    pub grid: GridSection,
    pub phi: PhiSection,
    pub rhs: RhsSection,
    pub mp: MpSection,
    pub run: RunSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            domain: DomainSection { dim: 1, extent: [1.0, 0.0] },
            grid: GridSection { n: [101, 0] },
            phi: PhiSection {
                kind: "constant_power".into(),
                p: 2.0,
                p_coeffs: [2.0, 0.0, 0.0],
                q: 3.0,
                a_coeffs: [0.0, 0.0, 0.0],
                alpha: 0.1,
            },
            rhs: RhsSection {
                kind: "pure_power".into(),
                q: 4.0,
                coeff: [1.0, 0.0, 0.0],
                theta: 4.0,
                t0: 1.0,
            },
            mp: MpSection {
                path_points: 16,
                tol: 1e-6,
                max_iter: 50_000,
                bump_center: [0.5, 0.0],
                bump_radius: 0.3,
                bump_amplitude: 1.0,
            },
            run: RunSection { seed: 7, output_dir: "out".into(), override_hypotheses: false },
        }
    }
}

fn bad(key: &str, what: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key}: {what}"))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>().map_err(|_| bad(key, format_args!("expected a number, got '{v}'")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>().map_err(|_| bad(key, format_args!("expected a non-negative integer, got '{v}'")))
}

fn parse_u64(key: &str, v: &str) -> Result<u64> {
    v.parse::<u64>().map_err(|_| bad(key, format_args!("expected a non-negative integer, got '{v}'")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(bad(key, format_args!("expected true or false, got '{v}'"))),
    }
}

fn parse_tuple<const K: usize>(key: &str, v: &str, min: usize) -> Result<[f64; K]> {
    let parts: Vec<&str> = v.split_whitespace().collect();
    if parts.len() < min || parts.len() > K {
        return Err(bad(
            key,
            format_args!("expected {min}..={K} space-separated numbers, got '{v}'"),
        ));
    }
    let mut out = [0.0; K];
    for (i, p) in parts.iter().enumerate() {
        out[i] = parse_f64(key, p)?;
    }
    Ok(out)
}

impl RunConfig {
    /// Parse a config document: defaults overridden by the file's keys.
    /// Unknown sections or keys, malformed values, duplicate keys, and
    /// range violations are all reported with the offending key named.
    pub fn parse_str(text: &str) -> Result<RunConfig> {
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find(['#', ';']) {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Config(format!("line {}: unterminated section header '{raw}'", lineno + 1)))?;
                section = name.trim().to_string();
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value', got '{raw}'", lineno + 1))
            })?;
            if section.is_empty() {
                return Err(Error::Config(format!(
                    "line {}: key '{}' appears before any [section]",
                    lineno + 1,
                    k.trim()
                )));
            }
            let full = format!("{section}.{}", k.trim());
            if kv.insert(full.clone(), v.trim().to_string()).is_some() {
                return Err(bad(&full, "duplicate key"));
            }
        }

        let mut cfg = RunConfig::default();
        for (key, v) in &kv {
            match key.as_str() {
                "domain.dim" => cfg.domain.dim = parse_usize(key, v)?,
                "domain.extent" => {
                    let t: [f64; 2] = parse_tuple(key, v, 1)?;
                    cfg.domain.extent = t;
                }
                "grid.n" => {
                    let parts: Vec<&str> = v.split_whitespace().collect();
                    if parts.is_empty() || parts.len() > 2 {
                        return Err(bad(key, format_args!("expected 1 or 2 integers, got '{v}'")));
                    }
                    cfg.grid.n = [parse_usize(key, parts[0])?, 0];
                    if parts.len() == 2 {
                        cfg.grid.n[1] = parse_usize(key, parts[1])?;
                    }
                }
                "phi.kind" => cfg.phi.kind = v.clone(),
                "phi.p" => cfg.phi.p = parse_f64(key, v)?,
                "phi.p_coeffs" => cfg.phi.p_coeffs = parse_tuple(key, v, 1)?,
                "phi.q" => cfg.phi.q = parse_f64(key, v)?,
                "phi.a_coeffs" => cfg.phi.a_coeffs = parse_tuple(key, v, 1)?,
                "phi.alpha" => cfg.phi.alpha = parse_f64(key, v)?,
                "rhs.kind" => cfg.rhs.kind = v.clone(),
                "rhs.q" => cfg.rhs.q = parse_f64(key, v)?,
                "rhs.coeff" => cfg.rhs.coeff = parse_tuple(key, v, 1)?,
                "rhs.theta" => cfg.rhs.theta = parse_f64(key, v)?,
                "rhs.t0" => cfg.rhs.t0 = parse_f64(key, v)?,
                "mp.path_points" => cfg.mp.path_points = parse_usize(key, v)?,
                "mp.tol" => cfg.mp.tol = parse_f64(key, v)?,
                "mp.max_iter" => cfg.mp.max_iter = parse_usize(key, v)?,
                "mp.bump_center" => cfg.mp.bump_center = parse_tuple(key, v, 1)?,
                "mp.bump_radius" => cfg.mp.bump_radius = parse_f64(key, v)?,
                "mp.bump_amplitude" => cfg.mp.bump_amplitude = parse_f64(key, v)?,
                "run.seed" => cfg.run.seed = parse_u64(key, v)?,
                "run.output_dir" => cfg.run.output_dir = v.clone(),
                "run.override_hypotheses" => cfg.run.override_hypotheses = parse_bool(key, v)?,
                _ => return Err(bad(key, "unknown key")),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config '{}': {e}", path.display()))
        })?;
        RunConfig::parse_str(&text)
    }

    /// Canonical emission: every key, fixed order, values in Rust's shortest
    /// round-trip decimal form.
    pub fn emit(&self) -> String {
        let tup2 = |v: &[f64; 2], dim: usize| -> String {
            if dim == 1 {
                format!("{}", v[0])
            } else {
                format!("{} {}", v[0], v[1])
            }
        };
        let tup3 = |v: &[f64; 3]| format!("{} {} {}", v[0], v[1], v[2]);
        let n = if self.domain.dim == 1 {
            format!("{}", self.grid.n[0])
        } else {
            format!("{} {}", self.grid.n[0], self.grid.n[1])
        };
        format!(
            "[domain]\n\
             dim = {}\n\
             extent = {}\n\
             \n\
             [grid]\n\
             n = {}\n\
             \n\
             [phi]\n\
             kind = {}\n\
             p = {}\n\
             p_coeffs = {}\n\
             q = {}\n\
             a_coeffs = {}\n\
             alpha = {}\n\
             \n\
             [rhs]\n\
             kind = {}\n\
             q = {}\n\
             coeff = {}\n\
             theta = {}\n\
             t0 = {}\n\
             \n\
             [mp]\n\
             path_points = {}\n\
             tol = {}\n\
             max_iter = {}\n\
             bump_center = {}\n\
             bump_radius = {}\n\
             bump_amplitude = {}\n\
             \n\
             [run]\n\
             seed = {}\n\
             output_dir = {}\n\
             override_hypotheses = {}\n",
            self.domain.dim,
            tup2(&self.domain.extent, self.domain.dim),
            n,
            self.phi.kind,
            self.phi.p,
            tup3(&self.phi.p_coeffs),
            self.phi.q,
            tup3(&self.phi.a_coeffs),
            self.phi.alpha,
            self.rhs.kind,
            self.rhs.q,
            tup3(&self.rhs.coeff),
            self.rhs.theta,
            self.rhs.t0,
            self.mp.path_points,
            self.mp.tol,
            self.mp.max_iter,
            tup2(&self.mp.bump_center, 2),
            self.mp.bump_radius,
            self.mp.bump_amplitude,
            self.run.seed,
            self.run.output_dir,
            self.run.override_hypotheses,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.domain.dim != 1 && self.domain.dim != 2 {
            return Err(bad("domain.dim", format_args!("must be 1 or 2, got {}", self.domain.dim)));
        }
        for d in 0..self.domain.dim {
            if !(self.domain.extent[d] > 0.0) {
                return Err(bad(
                    "domain.extent",
                    format_args!("axis {d} must be positive, got {}", self.domain.extent[d]),
                ));
            }
            if self.grid.n[d] < 9 {
                return Err(bad(
                    "grid.n",
                    format_args!("must be >= 9 per axis, got {}", self.grid.n[d]),
                ));
            }
        }

        let corners = self.domain_corners();
        match self.phi.kind.as_str() {
            "constant_power" => {
                if !(self.phi.p > 1.0) {
                    return Err(bad("phi.p", format_args!("must be > 1, got {}", self.phi.p)));
                }
            }
            "variable_exponent" => {
                let poly = CoordPoly::affine(
                    self.phi.p_coeffs[0],
                    self.phi.p_coeffs[1],
                    self.phi.p_coeffs[2],
                );
                for c in &corners {
                    if !(poly.eval(*c) > 1.0) {
                        return Err(bad(
                            "phi.p_coeffs",
                            format_args!("p(x) must stay > 1; p({:?}) = {}", c, poly.eval(*c)),
                        ));
                    }
                }
            }
            "double_phase" => {
                if !(self.phi.p > 1.0) {
                    return Err(bad("phi.p", format_args!("must be > 1, got {}", self.phi.p)));
                }
                if !(self.phi.q > self.phi.p) {
                    return Err(bad(
                        "phi.q",
                        format_args!("must exceed phi.p = {}, got {}", self.phi.p, self.phi.q),
                    ));
                }
                let poly = CoordPoly::affine(
                    self.phi.a_coeffs[0],
                    self.phi.a_coeffs[1],
                    self.phi.a_coeffs[2],
                );
                for c in &corners {
                    if poly.eval(*c) < 0.0 {
                        return Err(bad(
                            "phi.a_coeffs",
                            format_args!("weight must be nonnegative; a({:?}) = {}", c, poly.eval(*c)),
                        ));
                    }
                }
            }
            other => {
                return Err(bad(
                    "phi.kind",
                    format_args!(
                        "unknown kind '{other}'; expected constant_power | variable_exponent | double_phase"
                    ),
                ))
            }
        }
        if !(self.phi.alpha >= 0.0) {
            return Err(bad("phi.alpha", format_args!("must be >= 0, got {}", self.phi.alpha)));
        }

        match self.rhs.kind.as_str() {
            "zero" => {}
            "pure_power" | "weighted_power" => {
                if !(self.rhs.q > 1.0) {
                    return Err(bad("rhs.q", format_args!("must be > 1, got {}", self.rhs.q)));
                }
                if !(self.rhs.theta > 0.0) {
                    return Err(bad("rhs.theta", format_args!("must be positive, got {}", self.rhs.theta)));
                }
                if !(self.rhs.t0 > 0.0) {
                    return Err(bad("rhs.t0", format_args!("must be positive, got {}", self.rhs.t0)));
                }
            }
            other => {
                return Err(bad(
                    "rhs.kind",
                    format_args!("unknown kind '{other}'; expected pure_power | weighted_power | zero"),
                ))
            }
        }

        if self.mp.path_points < 8 {
            return Err(bad(
                "mp.path_points",
                format_args!("must be >= 8, got {}", self.mp.path_points),
            ));
        }
        if !(self.mp.tol > 0.0) {
            return Err(bad("mp.tol", format_args!("must be positive, got {}", self.mp.tol)));
        }
        if self.mp.max_iter == 0 {
            return Err(bad("mp.max_iter", "must be >= 1"));
        }
        if !(self.mp.bump_radius > 0.0) || !(self.mp.bump_amplitude > 0.0) {
            return Err(bad("mp.bump_radius", "bump radius and amplitude must be positive"));
        }
        Ok(())
    }

    fn domain_corners(&self) -> Vec<Point> {
        let [lx, ly] = self.domain.extent;
        if self.domain.dim == 1 {
            vec![[0.0, 0.0], [lx, 0.0]]
        } else {
            vec![[0.0, 0.0], [lx, 0.0], [0.0, ly], [lx, ly]]
        }
    }

    pub fn domain(&self) -> Domain {
        if self.domain.dim == 1 {
            Domain::interval(self.domain.extent[0])
        } else {
            Domain::rectangle(self.domain.extent[0], self.domain.extent[1])
        }
    }

    pub fn build_grid(&self) -> Result<Arc<Grid>> {
        if self.domain.dim == 1 {
            Grid::line(self.grid.n[0], self.domain.extent[0])
        } else {
            Grid::rect(self.grid.n[0], self.grid.n[1], self.domain.extent[0], self.domain.extent[1])
        }
    }

    pub fn build_family(&self) -> Result<PhiFamily> {
        let dom = self.domain();
        match self.phi.kind.as_str() {
            "constant_power" => PhiFamily::constant_power(self.phi.p, dom),
            "variable_exponent" => PhiFamily::variable_exponent(
                CoordPoly::affine(self.phi.p_coeffs[0], self.phi.p_coeffs[1], self.phi.p_coeffs[2]),
                dom,
            ),
            "double_phase" => PhiFamily::double_phase(
                self.phi.p,
                self.phi.q,
                CoordPoly::affine(self.phi.a_coeffs[0], self.phi.a_coeffs[1], self.phi.a_coeffs[2]),
                dom,
            ),
            other => Err(bad("phi.kind", format_args!("unknown kind '{other}'"))),
        }
    }

    pub fn build_nonlinearity(&self) -> Result<Nonlinearity> {
        match self.rhs.kind.as_str() {
            "zero" => Ok(Nonlinearity::zero()),
            "pure_power" => Nonlinearity::pure_power(self.rhs.q, self.rhs.theta, self.rhs.t0),
            "weighted_power" => Nonlinearity::weighted_power(
                self.rhs.q,
                CoordPoly::affine(self.rhs.coeff[0], self.rhs.coeff[1], self.rhs.coeff[2]),
                self.rhs.theta,
                self.rhs.t0,
            ),
            other => Err(bad("rhs.kind", format_args!("unknown kind '{other}'"))),
        }
    }

    pub fn mp_config(&self) -> MountainPassConfig {
        MountainPassConfig {
            path_points: self.mp.path_points,
            tol: self.mp.tol,
            max_iter: self.mp.max_iter,
            bump_center: self.mp.bump_center,
            bump_radius: self.mp.bump_radius,
            bump_amplitude: self.mp.bump_amplitude,
            seed: self.run.seed,
            ..MountainPassConfig::default()
        }
    }
}
