//! Generalized Φ-function families G(x,t) = ∫₀ᵗ g(x,s) ds and their
//! pointwise calculus: densities, inverses, Young conjugates, growth ((SC))
//! constants, the normalization (A0) and locality (A1) diagnostics, and the
//! subcritical companion function Ψ defined through Ψ⁻¹(x,t) = t^{−α}G⁻¹(x,t).
//!
//! Every family satisfies, by construction or by sampled estimate,
//!   g₀ − 1 ≤ t·g′(x,t)/g(x,t) ≤ g⁰ − 1        (SC)
//! for constants 1 < g₀ ≤ g⁰ cached on the descriptor. All derived bounds
//! (scaling sandwiches, conjugate exponents, norm–modular relations) are
//! phrased in terms of that cached pair.

use std::sync::Arc;

use serde::Serialize;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{Domain, Point};
use crate::num::{bisect_increasing, expand_bracket};

const INV_REL_TOL: f64 = 1e-12;
const INV_MAX_ITER: usize = 60;

/// Polynomial in the space coordinates: Σ c·x^i·y^j.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordPoly {
    terms: Vec<(f64, u8, u8)>,
}

impl CoordPoly {
    pub fn constant(c: f64) -> Self {
        CoordPoly { terms: vec![(c, 0, 0)] }
    }

    /// c0 + cx·x + cy·y
    pub fn affine(c0: f64, cx: f64, cy: f64) -> Self {
        CoordPoly { terms: vec![(c0, 0, 0), (cx, 1, 0), (cy, 0, 1)] }
    }

    pub fn new(terms: Vec<(f64, u8, u8)>) -> Self {
        CoordPoly { terms }
    }

    /// Coefficients of 1, x, y (for emitting configs); fails for higher-order terms.
    pub fn affine_coeffs(&self) -> Option<[f64; 3]> {
        let mut c = [0.0; 3];
        for &(coef, i, j) in &self.terms {
            match (i, j) {
                (0, 0) => c[0] += coef,
                (1, 0) => c[1] += coef,
                (0, 1) => c[2] += coef,
                _ => return None,
            }
        }
        Some(c)
    }

    pub fn eval(&self, x: Point) -> f64 {
        self.terms
            .iter()
            .map(|&(c, i, j)| c * x[0].powi(i as i32) * x[1].powi(j as i32))
            .sum()
    }

    /// Extremes over the closed domain by dense sampling plus corners; exact
    /// for affine polynomials.
    fn extremes(&self, domain: &Domain) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut visit = |p: Point| {
            let v = self.eval(p);
            lo = lo.min(v);
            hi = hi.max(v);
        };
        if domain.dim == 1 {
            let n = 4097;
            for i in 0..=n {
                visit([domain.extent[0] * i as f64 / n as f64, 0.0]);
            }
        } else {
            let n = 257;
            for j in 0..=n {
                for i in 0..=n {
                    visit([
                        domain.extent[0] * i as f64 / n as f64,
                        domain.extent[1] * j as f64 / n as f64,
                    ]);
                }
            }
        }
        (lo, hi)
    }
}

/// Log-spaced table of a density g(t) with cumulative trapezoid integral;
/// x-independent by construction.
#[derive(Debug)]
pub struct TabulatedData {
    t_min: f64,
    per_decade: usize,
    knots: Vec<f64>,
    g: Vec<f64>,
    big_g: Vec<f64>,
    /// Power-law exponent continuing g above the last knot.
    tail_exp: f64,
}

impl TabulatedData {
    fn build(density: &dyn Fn(f64) -> f64) -> Result<TabulatedData> {
        let (t_min, t_max, per_decade) = (1e-8_f64, 1e8_f64, 512usize);
        let decades = (t_max / t_min).log10().round() as usize;
        let n = decades * per_decade;
        let step = 10f64.powf(1.0 / per_decade as f64);
        let knots: Vec<f64> = (0..=n).map(|i| t_min * step.powi(i as i32)).collect();
        let g: Vec<f64> = knots.iter().map(|&t| density(t)).collect();
        for (&t, &v) in knots.iter().zip(&g) {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "tabulated density must be finite and nonnegative; got {v} at t={t}"
                )));
            }
        }
        for w in g.windows(2) {
            if w[1] < w[0] {
                return Err(Error::InvalidInput(
                    "tabulated density must be nondecreasing".into(),
                ));
            }
        }
        // Below the first knot g is taken linear from the origin, so the
        // integral up to t_min is a triangle.
        let mut big_g = Vec::with_capacity(n + 1);
        big_g.push(0.5 * g[0] * t_min);
        for i in 0..n {
            let seg = 0.5 * (g[i] + g[i + 1]) * (knots[i + 1] - knots[i]);
            big_g.push(big_g[i] + seg);
        }
        let tail_exp = if g[n - 1] > 0.0 && g[n] > g[n - 1] {
            (g[n] / g[n - 1]).ln() / (knots[n] / knots[n - 1]).ln()
        } else {
            1.0
        };
        Ok(TabulatedData { t_min, per_decade, knots, g, big_g, tail_exp })
    }

    fn interval(&self, t: f64) -> usize {
        let pos = (t / self.t_min).log10() * self.per_decade as f64;
        let mut i = pos.floor() as isize;
        let last = self.knots.len() as isize - 2;
        i = i.clamp(0, last);
        let mut i = i as usize;
        while i > 0 && t < self.knots[i] {
            i -= 1;
        }
        while i < self.knots.len() - 2 && t > self.knots[i + 1] {
            i += 1;
        }
        i
    }

    fn density(&self, t: f64) -> f64 {
        let n = self.knots.len() - 1;
        if t <= 0.0 {
            0.0
        } else if t < self.t_min {
            self.g[0] * t / self.t_min
        } else if t > self.knots[n] {
            self.g[n] * (t / self.knots[n]).powf(self.tail_exp)
        } else {
            let i = self.interval(t);
            let w = (t - self.knots[i]) / (self.knots[i + 1] - self.knots[i]);
            self.g[i] + w * (self.g[i + 1] - self.g[i])
        }
    }

    fn density_dt(&self, t: f64) -> f64 {
        let n = self.knots.len() - 1;
        if t <= 0.0 {
            0.0
        } else if t < self.t_min {
            self.g[0] / self.t_min
        } else if t > self.knots[n] {
            self.tail_exp * self.g[n] / self.knots[n] * (t / self.knots[n]).powf(self.tail_exp - 1.0)
        } else {
            let i = self.interval(t);
            (self.g[i + 1] - self.g[i]) / (self.knots[i + 1] - self.knots[i])
        }
    }

    fn eval(&self, t: f64) -> f64 {
        let n = self.knots.len() - 1;
        if t <= 0.0 {
            0.0
        } else if t < self.t_min {
            0.5 * self.g[0] * t * t / self.t_min
        } else if t > self.knots[n] {
            let m = self.tail_exp;
            let base = self.knots[n];
            self.big_g[n] + self.g[n] * base / (m + 1.0) * ((t / base).powf(m + 1.0) - 1.0)
        } else {
            let i = self.interval(t);
            let gi = self.g[i]
                + (t - self.knots[i]) / (self.knots[i + 1] - self.knots[i])
                    * (self.g[i + 1] - self.g[i]);
            self.big_g[i] + 0.5 * (self.g[i] + gi) * (t - self.knots[i])
        }
    }

    /// (SC) ratio bounds sampled at interval midpoints of the table.
    fn sc_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.knots.len() - 1 {
            let t = (self.knots[i] * self.knots[i + 1]).sqrt();
            if !(1e-6..=1e6).contains(&t) {
                continue;
            }
            let g = self.density(t);
            if g <= 0.0 {
                continue;
            }
            let r = t * self.density_dt(t) / g;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        (lo + 1.0, hi + 1.0)
    }
}

/// The structural kinds of generalized Φ-function handled by the library.
#[derive(Debug, Clone)]
pub enum PhiKind {
    /// G(x,t) = t^p
    ConstantPower { p: f64 },
    /// G(x,t) = t^{p(x)}
    VariableExponent { p_of_x: CoordPoly },
    /// G(x,t) = t^p + a(x)·t^q,  a ≥ 0, q > p
    DoublePhase { p: f64, q: f64, a_of_x: CoordPoly },
    /// G(x,t) from a tabulated density g(t)
    Tabulated(Arc<TabulatedData>),
}

/// Descriptor of a generalized Φ-function with cached (SC) constants.
#[derive(Debug, Clone)]
pub struct PhiFamily {
    kind: PhiKind,
    domain: Domain,
    g0: f64,
    g_sup: f64,
}

impl PhiFamily {
    pub fn constant_power(p: f64, domain: Domain) -> Result<PhiFamily> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidInput(format!("exponent p must be > 1, got {p}")));
        }
        Ok(PhiFamily { kind: PhiKind::ConstantPower { p }, domain, g0: p, g_sup: p })
    }

    pub fn variable_exponent(p_of_x: CoordPoly, domain: Domain) -> Result<PhiFamily> {
        let (p_minus, p_plus) = p_of_x.extremes(&domain);
        if !(p_minus > 1.0) || !p_plus.is_finite() {
            return Err(Error::InvalidInput(format!(
                "variable exponent must stay in (1, inf); sampled range [{p_minus}, {p_plus}]"
            )));
        }
        Ok(PhiFamily {
            kind: PhiKind::VariableExponent { p_of_x },
            domain,
            g0: p_minus,
            g_sup: p_plus,
        })
    }

    pub fn double_phase(p: f64, q: f64, a_of_x: CoordPoly, domain: Domain) -> Result<PhiFamily> {
        if !(p > 1.0) || !(q >= p) || !q.is_finite() {
            return Err(Error::InvalidInput(format!(
                "double-phase exponents need 1 < p <= q, got p={p}, q={q}"
            )));
        }
        let (a_min, _) = a_of_x.extremes(&domain);
        if a_min < 0.0 {
            return Err(Error::InvalidInput(format!(
                "double-phase weight must be nonnegative; sampled min {a_min}"
            )));
        }
        // t·g'/g + 1 is a weighted average of p and q, so (p, q) is a valid
        // (SC) pair for every admissible weight.
        Ok(PhiFamily { kind: PhiKind::DoublePhase { p, q, a_of_x }, domain, g0: p, g_sup: q })
    }

    pub fn tabulated(density: impl Fn(f64) -> f64, domain: Domain) -> Result<PhiFamily> {
        let data = TabulatedData::build(&density)?;
        let (g0, g_sup) = data.sc_bounds();
        if !(g0 > 1.0) || !g_sup.is_finite() {
            return Err(Error::InvalidInput(format!(
                "tabulated density violates (SC): sampled exponent range [{g0}, {g_sup}]"
            )));
        }
        Ok(PhiFamily { kind: PhiKind::Tabulated(Arc::new(data)), domain, g0, g_sup })
    }

    pub fn kind(&self) -> &PhiKind {
        &self.kind
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Cached (SC) constants (g₀, g⁰).
    pub fn sc(&self) -> (f64, f64) {
        (self.g0, self.g_sup)
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            PhiKind::ConstantPower { .. } => "constant_power",
            PhiKind::VariableExponent { .. } => "variable_exponent",
            PhiKind::DoublePhase { .. } => "double_phase",
            PhiKind::Tabulated(_) => "tabulated",
        }
    }

    /// G(x,t).
    pub fn eval(&self, x: Point, t: f64) -> f64 {
        debug_assert!(t >= 0.0, "negative argument {t}");
        match &self.kind {
            PhiKind::ConstantPower { p } => t.powf(*p),
            PhiKind::VariableExponent { p_of_x } => t.powf(p_of_x.eval(x)),
            PhiKind::DoublePhase { p, q, a_of_x } => t.powf(*p) + a_of_x.eval(x) * t.powf(*q),
            PhiKind::Tabulated(d) => d.eval(t),
        }
    }

    /// g(x,t) = ∂G/∂t.
    pub fn density(&self, x: Point, t: f64) -> f64 {
        debug_assert!(t >= 0.0, "negative argument {t}");
        if t == 0.0 {
            return 0.0;
        }
        match &self.kind {
            PhiKind::ConstantPower { p } => p * t.powf(p - 1.0),
            PhiKind::VariableExponent { p_of_x } => {
                let p = p_of_x.eval(x);
                p * t.powf(p - 1.0)
            }
            PhiKind::DoublePhase { p, q, a_of_x } => {
                p * t.powf(p - 1.0) + a_of_x.eval(x) * q * t.powf(q - 1.0)
            }
            PhiKind::Tabulated(d) => d.density(t),
        }
    }

    /// g′(x,t) = ∂g/∂t (chord slope for tabulated data).
    pub fn density_dt(&self, x: Point, t: f64) -> f64 {
        match &self.kind {
            PhiKind::ConstantPower { p } => p * (p - 1.0) * t.powf(p - 2.0),
            PhiKind::VariableExponent { p_of_x } => {
                let p = p_of_x.eval(x);
                p * (p - 1.0) * t.powf(p - 2.0)
            }
            PhiKind::DoublePhase { p, q, a_of_x } => {
                p * (p - 1.0) * t.powf(p - 2.0)
                    + a_of_x.eval(x) * q * (q - 1.0) * t.powf(q - 2.0)
            }
            PhiKind::Tabulated(d) => d.density_dt(t),
        }
    }

    /// t with G(x,t) = s; closed form for pure powers, otherwise bisection
    /// bracketed by the scaling sandwich σ^{g₀}G ≤ G(σt) ≤ σ^{g⁰}G.
    pub fn inverse(&self, x: Point, s: f64) -> Result<f64> {
        if s < 0.0 {
            return Err(Error::InvalidInput(format!("inverse needs s >= 0, got {s}")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            PhiKind::ConstantPower { p } => Ok(s.powf(1.0 / p)),
            PhiKind::VariableExponent { p_of_x } => Ok(s.powf(1.0 / p_of_x.eval(x))),
            _ => {
                let g1 = self.eval(x, 1.0);
                let r = s / g1;
                let (mut lo, mut hi) = if r >= 1.0 {
                    (r.powf(1.0 / self.g_sup), r.powf(1.0 / self.g0))
                } else {
                    (r.powf(1.0 / self.g0), r.powf(1.0 / self.g_sup))
                };
                lo *= 0.5;
                hi *= 2.0;
                if self.eval(x, lo) > s || self.eval(x, hi) < s {
                    let (l, h) = expand_bracket(|t| self.eval(x, t), lo, 4.0, s)?;
                    lo = l;
                    hi = h;
                }
                bisect_increasing(|t| self.eval(x, t), lo, hi, s, INV_REL_TOL, INV_MAX_ITER)
            }
        }
    }

    /// t with g(x,t) = s (used by the conjugate); closed form for powers.
    pub fn density_inverse(&self, x: Point, s: f64) -> Result<f64> {
        if s < 0.0 {
            return Err(Error::InvalidInput(format!("density inverse needs s >= 0, got {s}")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            PhiKind::ConstantPower { p } => Ok((s / p).powf(1.0 / (p - 1.0))),
            PhiKind::VariableExponent { p_of_x } => {
                let p = p_of_x.eval(x);
                Ok((s / p).powf(1.0 / (p - 1.0)))
            }
            _ => {
                let g1 = self.density(x, 1.0);
                let r = s / g1;
                let (mut lo, mut hi) = if r >= 1.0 {
                    (r.powf(1.0 / (self.g_sup - 1.0)), r.powf(1.0 / (self.g0 - 1.0)))
                } else {
                    (r.powf(1.0 / (self.g0 - 1.0)), r.powf(1.0 / (self.g_sup - 1.0)))
                };
                lo *= 0.5;
                hi *= 2.0;
                if self.density(x, lo) > s || self.density(x, hi) < s {
                    let (l, h) = expand_bracket(|t| self.density(x, t), lo, 4.0, s)?;
                    lo = l;
                    hi = h;
                }
                bisect_increasing(|t| self.density(x, t), lo, hi, s, INV_REL_TOL, INV_MAX_ITER)
            }
        }
    }

    /// Young conjugate G*(x,s) = sup_t (st − G(x,t)), evaluated at the
    /// stationary point t* = g⁻¹(x,s).
    pub fn conjugate(&self, x: Point, s: f64) -> Result<f64> {
        if s < 0.0 {
            return Err(Error::InvalidInput(format!("conjugate needs s >= 0, got {s}")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        let t_star = self.density_inverse(x, s)?;
        Ok((s * t_star - self.eval(x, t_star)).max(0.0))
    }

    /// Validating wrapper for externally supplied arguments.
    pub fn eval_checked(&self, x: Point, t: f64) -> Result<f64> {
        self.validate_args(x, t)?;
        Ok(self.eval(x, t))
    }

    pub fn density_checked(&self, x: Point, t: f64) -> Result<f64> {
        self.validate_args(x, t)?;
        Ok(self.density(x, t))
    }

    fn validate_args(&self, x: Point, t: f64) -> Result<()> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidInput(format!("argument t must be finite and >= 0, got {t}")));
        }
        if !self.domain.contains(x) {
            return Err(Error::InvalidInput(format!(
                "point {x:?} outside domain extent {:?}",
                self.domain.extent
            )));
        }
        Ok(())
    }
}

/// (SC) constants per the operation contract: exact values for the closed
/// families, table-sampled bounds otherwise.
pub fn estimate_sc_constants(fam: &PhiFamily) -> (f64, f64) {
    fam.sc()
}

/// Brute-force (SC) sampler: inf/sup of t·g′/g + 1 over a log-spaced t-grid
/// × domain samples. Used as an independent cross-check of the cached pair.
pub fn sample_sc_bounds(fam: &PhiFamily, x_samples: usize, t_samples: usize) -> (f64, f64) {
    let xs = fam.domain().sample_points(x_samples);
    let (t_lo, t_hi) = (1e-6_f64, 1e6_f64);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..t_samples {
        let f = k as f64 / (t_samples - 1) as f64;
        let t = t_lo * (t_hi / t_lo).powf(f);
        for &x in &xs {
            let g = fam.density(x, t);
            if g <= 0.0 {
                continue;
            }
            let r = t * fam.density_dt(x, t) / g + 1.0;
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    (lo, hi)
}

/// Sobolev conjugate g₀* = N·g₀/(N−g₀); +∞ when g₀ ≥ N.
pub fn sobolev_conjugate(g0: f64, n_dim: usize) -> f64 {
    let n = n_dim as f64;
    if g0 < n {
        n * g0 / (n - g0)
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScReport {
    pub g0: f64,
    pub g_sup: f64,
    pub sampled_lo: f64,
    pub sampled_hi: f64,
    pub pass: bool,
}

/// Confirm the cached (SC) pair brackets the sampled growth ratios.
pub fn check_sc(fam: &PhiFamily) -> ScReport {
    let (g0, g_sup) = fam.sc();
    let (lo, hi) = sample_sc_bounds(fam, 64, 97);
    let slack = 1e-9;
    ScReport {
        g0,
        g_sup,
        sampled_lo: lo,
        sampled_hi: hi,
        pass: lo >= g0 - slack && hi <= g_sup + slack && g0 > 1.0,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct A0Report {
    /// Smallest C with 1/C ≤ g(x,1) ≤ C over the sample set.
    pub constant: f64,
    pub worst_x: [f64; 2],
    pub pass: bool,
}

/// Normalization condition (A0): g(x,1) pinched between 1/C and C.
pub fn check_a0(fam: &PhiFamily, x_samples: usize, c_max: f64) -> A0Report {
    let mut constant = 1.0_f64;
    let mut worst = [0.0, 0.0];
    for x in fam.domain().sample_points(x_samples.max(2)) {
        let v = fam.density(x, 1.0);
        let c = if v > 0.0 { v.max(1.0 / v) } else { f64::INFINITY };
        if c > constant {
            constant = c;
            worst = x;
        }
    }
    A0Report { constant, worst_x: worst, pass: constant <= c_max }
}

#[derive(Debug, Clone, Serialize)]
pub struct A1Report {
    /// Smallest sampled C with G(x,t) ≤ C·G(y,t) on all tested balls; a
    /// diagnostic estimate ("no violation found at C"), never a certificate.
    pub constant: f64,
    pub trials: usize,
    pub balls_tested: usize,
    pub worst_radius: f64,
}

/// Locality condition (A1): sampled over balls B_R (R < 1) and t in the
/// window where inf_B G(·,t) spans [1, R^{−dim}].
pub fn check_a1(fam: &PhiFamily, trials: usize, seed: u64) -> Result<A1Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dom = *fam.domain();
    let mut constant = 1.0_f64;
    let mut worst_radius = 0.0;
    let mut balls = 0usize;
    for _ in 0..trials {
        let center = dom.random_point(&mut rng);
        let max_r = 0.45 * dom.extent[0].min(if dom.dim == 2 { dom.extent[1] } else { dom.extent[0] });
        let radius = rng.random_range(0.02..max_r.min(0.999));
        let pick = |rng: &mut ChaCha8Rng| -> Point {
            for _ in 0..64 {
                let dx = rng.random_range(-radius..=radius);
                let dy = if dom.dim == 2 { rng.random_range(-radius..=radius) } else { 0.0 };
                if dx * dx + dy * dy <= radius * radius {
                    let p = [center[0] + dx, center[1] + dy];
                    if dom.contains(p) {
                        return p;
                    }
                }
            }
            center
        };
        let xs: Vec<Point> = (0..6).map(|_| pick(&mut rng)).collect();
        let g_inf = |t: f64| xs.iter().map(|&p| fam.eval(p, t)).fold(f64::INFINITY, f64::min);
        // t-window where the ball infimum of G runs from 1 to R^{-dim}.
        let hi_level = radius.powi(-(dom.dim as i32));
        let (lo_b, hi_b) = expand_bracket(g_inf, 1.0, 4.0, 1.0)?;
        let t1 = bisect_increasing(g_inf, lo_b, hi_b, 1.0, 1e-10, INV_MAX_ITER)?;
        let (lo_b, hi_b) = expand_bracket(g_inf, t1.max(1e-12), 4.0, hi_level)?;
        let t2 = bisect_increasing(g_inf, lo_b, hi_b, hi_level, 1e-10, INV_MAX_ITER)?;
        balls += 1;
        let scans = 8;
        for k in 0..scans {
            let f = k as f64 / (scans - 1) as f64;
            let t = t1 * (t2 / t1).powf(f);
            for pair in xs.chunks(2) {
                if pair.len() < 2 {
                    continue;
                }
                let (ga, gb) = (fam.eval(pair[0], t), fam.eval(pair[1], t));
                if ga > 0.0 && gb > 0.0 {
                    let c = (ga / gb).max(gb / ga);
                    if c > constant {
                        constant = c;
                        worst_radius = radius;
                    }
                }
            }
        }
    }
    Ok(A1Report { constant, trials, balls_tested: balls, worst_radius })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentWindowReport {
    pub g0: f64,
    pub g_sup: f64,
    pub g0_star: f64,
    pub n_dim: usize,
    /// g⁰ < min{g₀*, N}
    pub pass: bool,
}

/// Standing exponent assumption g⁰ < min{g₀*, N}.
pub fn check_exponent_window(fam: &PhiFamily, n_dim: usize) -> ExponentWindowReport {
    let (g0, g_sup) = fam.sc();
    let g0_star = sobolev_conjugate(g0, n_dim);
    ExponentWindowReport {
        g0,
        g_sup,
        g0_star,
        n_dim,
        pass: g_sup < g0_star.min(n_dim as f64),
    }
}

/// Companion function Ψ with Ψ⁻¹(x,t) = t^{−α}·G⁻¹(x,t); the growth gauge
/// for the subcritical bound (f_α).
#[derive(Debug, Clone)]
pub struct CompanionPsi {
    base: PhiFamily,
    alpha: f64,
    n_dim: usize,
    psi_g0: f64,
    psi_gsup: f64,
    warnings: Vec<String>,
}

impl CompanionPsi {
    pub fn base(&self) -> &PhiFamily {
        &self.base
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_dim(&self) -> usize {
        self.n_dim
    }

    /// Derived (SC)-type constants (1/(1/g₀−α), 1/(1/g⁰−α)).
    pub fn sc(&self) -> (f64, f64) {
        (self.psi_g0, self.psi_gsup)
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Ψ⁻¹(x,s) = s^{−α}·G⁻¹(x,s).
    pub fn inverse(&self, x: Point, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(0.0);
        }
        Ok(s.powf(-self.alpha) * self.base.inverse(x, s)?)
    }

    /// Ψ(x,t): numeric inversion of the strictly increasing map
    /// s ↦ s^{−α}G⁻¹(x,s).
    pub fn eval(&self, x: Point, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::InvalidInput(format!("companion needs t >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        let m = |s: f64| self.inverse(x, s).unwrap_or(f64::NAN);
        // Initial guess from the power sandwich of the inverse map.
        let seed = t.powf(0.5 * (self.psi_g0 + self.psi_gsup));
        let (lo, hi) = expand_bracket(m, seed, 8.0, t)?;
        bisect_increasing(m, lo, hi, t, INV_REL_TOL, 80)
    }

    /// ψ(x,t): centered finite difference of Ψ with step max(1e-6, 1e-6·t).
    pub fn density(&self, x: Point, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        let h = 1e-6_f64.max(1e-6 * t);
        let t_lo = (t - h).max(0.0);
        let t_hi = t + h;
        Ok((self.eval(x, t_hi)? - self.eval(x, t_lo)?) / (t_hi - t_lo))
    }
}

/// Construct the companion Ψ for a given α and space dimension N, enforcing
/// the admissible window 1/g₀ − 1/g⁰ < α < 1/N (bypassable via `override_window`;
/// violations are then recorded as warnings).
pub fn build_companion(
    fam: &PhiFamily,
    alpha: f64,
    n_dim: usize,
    override_window: bool,
) -> Result<CompanionPsi> {
    if n_dim == 0 {
        return Err(Error::InvalidInput("dimension must be 1 or 2".into()));
    }
    let (g0, g_sup) = fam.sc();
    if !(alpha >= 0.0) || alpha >= 1.0 / g_sup {
        // Above 1/g⁰ the defining map s ↦ s^{−α}G⁻¹ stops being increasing,
        // so Ψ does not exist as a Φ-function; this is never overridable.
        return Err(Error::InvalidInput(format!(
            "alpha={alpha} outside [0, 1/g_sup) = [0, {})",
            1.0 / g_sup
        )));
    }
    let lo = 1.0 / g0 - 1.0 / g_sup;
    let hi = 1.0 / n_dim as f64;
    let mut warnings = Vec::new();
    if !(alpha > lo && alpha < hi) {
        let msg = format!(
            "alpha={alpha} outside admissible window ({lo}, {hi}) for g0={g0}, g_sup={g_sup}, N={n_dim}"
        );
        if override_window {
            warnings.push(msg);
        } else {
            return Err(Error::Hypothesis(msg));
        }
    }
    Ok(CompanionPsi {
        base: fam.clone(),
        alpha,
        n_dim,
        psi_g0: 1.0 / (1.0 / g0 - alpha),
        psi_gsup: 1.0 / (1.0 / g_sup - alpha),
        warnings,
    })
}
