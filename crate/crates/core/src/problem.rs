//! The Dirichlet problem −div(g(x,|∇u|)∇u/|∇u|) = f(x,u), u|∂Ω = 0, at the
//! discrete level: right-hand sides f with antiderivative F, the energy
//!   J(u) = ∫ G(x,|∇u|) dx − ∫ F(x,u) dx,
//! its exact nodal gradient, the weak-form pairing ⟨J′(u),v⟩, the structural
//! checkers (subcritical growth, superlinearity at zero, Ambrosetti-
//! Rabinowitz), and the vector-field monotonicity bounds the compactness
//! argument rests on.

use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Domain, Field, Point};
use crate::num::gauss_legendre_unit;
use crate::orlicz::{luxemburg_norm, modular};
use crate::phi::{CompanionPsi, CoordPoly, PhiFamily};

/// Regularization floor for the flux denominator.
pub const FLUX_EPS: f64 = 1e-12;

/// Tabulated odd nonlinearity: f sampled on log-spaced knots, F by
/// cumulative trapezoid, linear near the origin and beyond the last knot.
#[derive(Debug)]
pub struct FnTable {
    t_min: f64,
    per_decade: usize,
    knots: Vec<f64>,
    f: Vec<f64>,
    big_f: Vec<f64>,
}

impl FnTable {
    fn build(f_pos: &dyn Fn(f64) -> f64) -> Result<FnTable> {
        let (t_min, t_max, per_decade) = (1e-8_f64, 1e6_f64, 128usize);
        let decades = (t_max / t_min).log10().round() as usize;
        let n = decades * per_decade;
        let step = 10f64.powf(1.0 / per_decade as f64);
        let knots: Vec<f64> = (0..=n).map(|i| t_min * step.powi(i as i32)).collect();
        let f: Vec<f64> = knots.iter().map(|&t| f_pos(t)).collect();
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("table nonlinearity produced non-finite values".into()));
        }
        let mut big_f = Vec::with_capacity(n + 1);
        big_f.push(0.5 * f[0] * t_min);
        for i in 0..n {
            big_f.push(big_f[i] + 0.5 * (f[i] + f[i + 1]) * (knots[i + 1] - knots[i]));
        }
        Ok(FnTable { t_min, per_decade, knots, f, big_f })
    }

    fn interval(&self, t: f64) -> usize {
        let pos = (t / self.t_min).log10() * self.per_decade as f64;
        let mut i = (pos.floor() as isize).clamp(0, self.knots.len() as isize - 2) as usize;
        while i > 0 && t < self.knots[i] {
            i -= 1;
        }
        while i < self.knots.len() - 2 && t > self.knots[i + 1] {
            i += 1;
        }
        i
    }

    /// f at positive argument.
    fn eval_pos(&self, t: f64) -> f64 {
        let n = self.knots.len() - 1;
        if t <= 0.0 {
            0.0
        } else if t < self.t_min {
            self.f[0] * t / self.t_min
        } else if t > self.knots[n] {
            let slope = (self.f[n] - self.f[n - 1]) / (self.knots[n] - self.knots[n - 1]);
            self.f[n] + slope * (t - self.knots[n])
        } else {
            let i = self.interval(t);
            let w = (t - self.knots[i]) / (self.knots[i + 1] - self.knots[i]);
            self.f[i] + w * (self.f[i + 1] - self.f[i])
        }
    }

    /// F = ∫₀ᵗ f at positive argument.
    fn integral_pos(&self, t: f64) -> f64 {
        let n = self.knots.len() - 1;
        if t <= 0.0 {
            0.0
        } else if t < self.t_min {
            0.5 * self.f[0] * t * t / self.t_min
        } else if t > self.knots[n] {
            let slope = (self.f[n] - self.f[n - 1]) / (self.knots[n] - self.knots[n - 1]);
            let d = t - self.knots[n];
            self.big_f[n] + self.f[n] * d + 0.5 * slope * d * d
        } else {
            let i = self.interval(t);
            let fi = self.eval_pos(t);
            self.big_f[i] + 0.5 * (self.f[i] + fi) * (t - self.knots[i])
        }
    }
}

/// Right-hand-side kinds. All are odd in t (f(x,−t) = −f(x,t)), which keeps
/// F even and the variational structure symmetric.
#[derive(Debug, Clone)]
pub enum NonlinearityKind {
    /// f = |t|^{q−2} t
    PurePower { q: f64 },
    /// f = c(x)·|t|^{q−2} t, c ≥ 0
    WeightedPower { q: f64, c_of_x: CoordPoly },
    /// f tabulated in |t| with odd extension
    Table(Arc<FnTable>),
    /// f ≡ 0
    Zero,
}

/// Nonlinearity with its superlinearity metadata (θ, t₀) used by the
/// Ambrosetti-Rabinowitz checks.
#[derive(Debug, Clone)]
pub struct Nonlinearity {
    kind: NonlinearityKind,
    theta: f64,
    t0: f64,
}

impl Nonlinearity {
    pub fn pure_power(q: f64, theta: f64, t0: f64) -> Result<Nonlinearity> {
        if !(q > 1.0) {
            return Err(Error::InvalidInput(format!("power nonlinearity needs q > 1, got {q}")));
        }
        Self::validated(NonlinearityKind::PurePower { q }, theta, t0)
    }

    pub fn weighted_power(q: f64, c_of_x: CoordPoly, theta: f64, t0: f64) -> Result<Nonlinearity> {
        if !(q > 1.0) {
            return Err(Error::InvalidInput(format!("power nonlinearity needs q > 1, got {q}")));
        }
        Self::validated(NonlinearityKind::WeightedPower { q, c_of_x }, theta, t0)
    }

    pub fn table(f_pos: impl Fn(f64) -> f64, theta: f64, t0: f64) -> Result<Nonlinearity> {
        let tab = FnTable::build(&f_pos)?;
        Self::validated(NonlinearityKind::Table(Arc::new(tab)), theta, t0)
    }

    pub fn zero() -> Nonlinearity {
        Nonlinearity { kind: NonlinearityKind::Zero, theta: 2.0, t0: 1.0 }
    }

    fn validated(kind: NonlinearityKind, theta: f64, t0: f64) -> Result<Nonlinearity> {
        if !(theta > 0.0) || !(t0 > 0.0) {
            return Err(Error::InvalidInput(format!(
                "nonlinearity metadata needs theta > 0 and t0 > 0, got theta={theta}, t0={t0}"
            )));
        }
        Ok(Nonlinearity { kind, theta, t0 })
    }

    pub fn kind(&self) -> &NonlinearityKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            NonlinearityKind::PurePower { .. } => "pure_power",
            NonlinearityKind::WeightedPower { .. } => "weighted_power",
            NonlinearityKind::Table(_) => "table",
            NonlinearityKind::Zero => "zero",
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, NonlinearityKind::Zero)
    }

    /// f(x,t), odd in t.
    pub fn eval(&self, x: Point, t: f64) -> f64 {
        let s = t.signum();
        let a = t.abs();
        if a == 0.0 {
            return 0.0;
        }
        match &self.kind {
            NonlinearityKind::PurePower { q } => s * a.powf(q - 1.0),
            NonlinearityKind::WeightedPower { q, c_of_x } => s * c_of_x.eval(x) * a.powf(q - 1.0),
            NonlinearityKind::Table(tab) => s * tab.eval_pos(a),
            NonlinearityKind::Zero => 0.0,
        }
    }

    /// F(x,t) = ∫₀ᵗ f(x,s) ds, even in t.
    pub fn antiderivative(&self, x: Point, t: f64) -> f64 {
        let a = t.abs();
        if a == 0.0 {
            return 0.0;
        }
        match &self.kind {
            NonlinearityKind::PurePower { q } => a.powf(*q) / q,
            NonlinearityKind::WeightedPower { q, c_of_x } => c_of_x.eval(x) * a.powf(*q) / q,
            NonlinearityKind::Table(tab) => tab.integral_pos(a),
            NonlinearityKind::Zero => 0.0,
        }
    }
}

/// Energy value with its two parts and the residual norm.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub j: f64,
    pub g_part: f64,
    pub f_part: f64,
    /// Luxembourg norm of the assembled gradient (strong residual) field.
    pub grad_norm: f64,
}

/// J(u) = ∫ G(x,|∇u|) − ∫ F(x,u); cells carry the gradient term, nodes the
/// F term.
pub fn energy_value(fam: &PhiFamily, nl: &Nonlinearity, u: &Field) -> Result<f64> {
    let (g_part, f_part) = energy_parts(fam, nl, u)?;
    Ok(g_part - f_part)
}

pub fn energy_parts(fam: &PhiFamily, nl: &Nonlinearity, u: &Field) -> Result<(f64, f64)> {
    let grid = u.grid();
    let gu = u.grad();
    let mut g_part = 0.0;
    for ((c, pt), w) in gu
        .components()
        .iter()
        .zip(grid.cell_points())
        .zip(grid.cell_weights())
    {
        let mag = (c[0] * c[0] + c[1] * c[1]).sqrt();
        g_part += w * fam.eval(*pt, mag);
    }
    let mut f_part = 0.0;
    if !nl.is_zero() {
        for ((&v, pt), w) in u.values().iter().zip(grid.node_points()).zip(grid.node_weights()) {
            f_part += w * nl.antiderivative(*pt, v);
        }
    }
    Ok((g_part, f_part))
}

pub fn energy(fam: &PhiFamily, nl: &Nonlinearity, u: &Field) -> Result<EnergyReport> {
    let (g_part, f_part) = energy_parts(fam, nl, u)?;
    let grad_norm = residual_norm(fam, nl, u)?;
    Ok(EnergyReport { j: g_part - f_part, g_part, f_part, grad_norm })
}

/// Flux A(x,ξ) = g(x,|ξ|)·ξ/max(|ξ|, ε).
pub fn flux(fam: &PhiFamily, x: Point, xi: [f64; 2]) -> [f64; 2] {
    let mag = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
    if mag == 0.0 {
        return [0.0, 0.0];
    }
    let scale = fam.density(x, mag) / mag.max(FLUX_EPS);
    [scale * xi[0], scale * xi[1]]
}

/// Exact gradient of the discrete energy with respect to nodal values:
/// ∂J/∂u_j assembled by the chain rule through the cell gradients, minus the
/// nodal F-term; boundary rows are zeroed (Dirichlet constraint).
pub fn energy_gradient(fam: &PhiFamily, nl: &Nonlinearity, u: &Field) -> Result<Field> {
    let grid = u.grid().clone();
    let gu = u.grad();
    let mut p = vec![0.0; grid.node_count()];
    let nx = grid.n[0];
    if grid.dim == 1 {
        let hx = grid.h[0];
        for (i, (c, w)) in gu.components().iter().zip(grid.cell_weights()).enumerate() {
            let a = flux(fam, grid.cell_points()[i], *c);
            let s = w * a[0] / hx;
            p[i] -= s;
            p[i + 1] += s;
        }
    } else {
        let (hx, hy) = (grid.h[0], grid.h[1]);
        let cx = nx - 1;
        for (ci, (c, w)) in gu.components().iter().zip(grid.cell_weights()).enumerate() {
            let i = ci % cx;
            let j = ci / cx;
            let a = flux(fam, grid.cell_points()[ci], *c);
            let ax = w * a[0] / (2.0 * hx);
            let ay = w * a[1] / (2.0 * hy);
            p[j * nx + i] += -ax - ay;
            p[j * nx + i + 1] += ax - ay;
            p[(j + 1) * nx + i] += -ax + ay;
            p[(j + 1) * nx + i + 1] += ax + ay;
        }
    }
    if !nl.is_zero() {
        for (idx, ((&v, pt), w)) in u
            .values()
            .iter()
            .zip(grid.node_points())
            .zip(grid.node_weights())
            .enumerate()
        {
            p[idx] -= w * nl.eval(*pt, v);
        }
    }
    for (idx, v) in p.iter_mut().enumerate() {
        if grid.is_boundary(idx) {
            *v = 0.0;
        }
    }
    Field::from_values(&grid, p)
}

/// Strong residual as a field: (∂J/∂u_j) / w_j. For G = t²/2 this is the
/// classical −Δu − f(u) stencil.
pub fn residual_field(fam: &PhiFamily, nl: &Nonlinearity, u: &Field) -> Result<Field> {
    let p = energy_gradient(fam, nl, u)?;
    Ok(residual_from_gradient(&p))
}

/// Convert an energy gradient (∂J/∂u_j) into the strong residual field by
/// dividing out the nodal quadrature weights. Lets callers that already hold
/// the gradient skip a second assembly pass.
pub fn residual_from_gradient(p: &Field) -> Field {
    let grid = p.grid().clone();
    let vals: Vec<f64> = p
        .values()
        .iter()
        .zip(grid.node_weights())
        .map(|(v, w)| if *w > 0.0 { v / w } else { 0.0 })
        .collect();
    Field::from_values(&grid, vals).expect("gradient and grid sizes agree")
}

/// Luxembourg norm of the strong residual field; the solver's convergence
/// measure.
pub fn residual_norm(fam: &PhiFamily, nl: &Nonlinearity, u: &Field) -> Result<f64> {
    luxemburg_norm(fam, &residual_field(fam, nl, u)?)
}

/// Modular of the strong residual; used with the norm–modular sandwich as a
/// cheap prescreen before paying for the norm bisection.
pub fn residual_modular(fam: &PhiFamily, nl: &Nonlinearity, u: &Field) -> Result<f64> {
    modular(fam, &residual_field(fam, nl, u)?)
}

/// ⟨J′(u), v⟩ = ∫ A(x,∇u)·∇v − ∫ f(x,u)·v, computed from the displayed weak
/// form (an independent path from `energy_gradient`).
pub fn weak_residual(fam: &PhiFamily, nl: &Nonlinearity, u: &Field, v: &Field) -> Result<f64> {
    if u.grid().node_count() != v.grid().node_count() || u.grid().dim != v.grid().dim {
        return Err(Error::InvalidInput("test function on mismatched grid".into()));
    }
    if !v.is_dirichlet() {
        return Err(Error::InvalidInput("test function must vanish on the boundary".into()));
    }
    let grid = u.grid();
    let gu = u.grad();
    let gv = v.grad();
    let mut acc = 0.0;
    for (((cu, cv), pt), w) in gu
        .components()
        .iter()
        .zip(gv.components())
        .zip(grid.cell_points())
        .zip(grid.cell_weights())
    {
        let a = flux(fam, *pt, *cu);
        acc += w * (a[0] * cv[0] + a[1] * cv[1]);
    }
    if !nl.is_zero() {
        for (((&uv, &vv), pt), w) in u
            .values()
            .iter()
            .zip(v.values())
            .zip(grid.node_points())
            .zip(grid.node_weights())
        {
            acc -= w * nl.eval(*pt, uv) * vv;
        }
    }
    Ok(acc)
}

static GL64: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();

fn gl64() -> &'static (Vec<f64>, Vec<f64>) {
    GL64.get_or_init(|| gauss_legendre_unit(64))
}

/// Monotonicity pairing and its lower bound:
/// lhs = (A(x,ξ)−A(x,η))·(ξ−η),
/// rhs = min(1, g₀−1)·|ξ−η|²·∫₀¹ g(x,|η+t(ξ−η)|)/|η+t(ξ−η)| dt (64-point
/// Gauss-Legendre). The chain inequality asserts lhs ≥ rhs.
pub fn monotonicity_pairing(fam: &PhiFamily, x: Point, xi: [f64; 2], eta: [f64; 2]) -> (f64, f64) {
    let a_xi = flux(fam, x, xi);
    let a_eta = flux(fam, x, eta);
    let d = [xi[0] - eta[0], xi[1] - eta[1]];
    let lhs = (a_xi[0] - a_eta[0]) * d[0] + (a_xi[1] - a_eta[1]) * d[1];
    let d2 = d[0] * d[0] + d[1] * d[1];
    if d2 == 0.0 {
        return (lhs, 0.0);
    }
    let (g0, _) = fam.sc();
    let (nodes, weights) = gl64();
    let segment = |a: f64, b: f64| -> f64 {
        let len = b - a;
        let mut acc = 0.0;
        for (&t, &w) in nodes.iter().zip(weights) {
            let s = a + t * len;
            let z = [eta[0] + s * d[0], eta[1] + s * d[1]];
            let mag = (z[0] * z[0] + z[1] * z[1]).sqrt();
            if mag > 0.0 {
                acc += w * fam.density(x, mag) / mag;
            }
        }
        acc * len
    };
    // The integrand is singular where the segment grazes the origin (density
    // exponents below 2). Splitting at the closest-approach parameter puts
    // the singularity at panel endpoints, where Gauss-Legendre underestimates
    // power singularities — the safe direction for a lower bound.
    let t_star = -(eta[0] * d[0] + eta[1] * d[1]) / d2;
    let integral = if t_star > 1e-9 && t_star < 1.0 - 1e-9 {
        segment(0.0, t_star) + segment(t_star, 1.0)
    } else {
        segment(0.0, 1.0)
    };
    let rhs = 1f64.min(g0 - 1.0) * d2 * integral;
    (lhs, rhs)
}

/// Closed-form decomposition bounds below the pairing, by the range split
/// |ξ−η| ≤ 2|ξ| / |ξ−η| > 2|ξ|:
///   near: lhs ≥ min(1,g₀−1)·2^{1−g⁰}/12 · |ξ−η|²·g(x,|ξ|)/|ξ|
///   far:  lhs ≥ min(1,g₀−1)·4^{1−g⁰}·g₀/12 · G(x,|ξ−η|)
/// Returns (lhs, applicable lower bound).
pub fn split_lower_bound(fam: &PhiFamily, x: Point, xi: [f64; 2], eta: [f64; 2]) -> (f64, f64) {
    let (g0, g_sup) = fam.sc();
    let m = 1f64.min(g0 - 1.0);
    let a_xi = flux(fam, x, xi);
    let a_eta = flux(fam, x, eta);
    let d = [xi[0] - eta[0], xi[1] - eta[1]];
    let lhs = (a_xi[0] - a_eta[0]) * d[0] + (a_xi[1] - a_eta[1]) * d[1];
    let dn = (d[0] * d[0] + d[1] * d[1]).sqrt();
    let xin = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
    let bound = if dn <= 2.0 * xin && xin > 0.0 {
        m * 2f64.powf(1.0 - g_sup) / 12.0 * dn * dn * fam.density(x, xin) / xin
    } else {
        m * 4f64.powf(1.0 - g_sup) * g0 / 12.0 * fam.eval(x, dn)
    };
    (lhs, bound)
}

#[derive(Debug, Clone, Serialize)]
pub struct SubcriticalReport {
    /// sup over samples of |f(x,t)| / (1 + ψ(x,t)).
    pub constant: f64,
    pub t_at_max: f64,
    /// True when the ratio keeps growing through the top decades.
    pub divergent: bool,
    pub pass: bool,
}

/// Growth condition |f(x,t)| ≤ C(1 + ψ(x,t)); sampled over a log t-grid and
/// domain points, both signs of t.
pub fn check_subcritical(nl: &Nonlinearity, psi: &CompanionPsi, t_samples: usize) -> Result<SubcriticalReport> {
    let dom = psi.base().domain();
    let xs = dom.sample_points(12);
    let t_samples = t_samples.clamp(41, 10_000);
    let (t_lo, t_hi) = (1e-4_f64, 1e6_f64);
    let mut per_t = Vec::with_capacity(t_samples);
    let mut constant = 0.0_f64;
    let mut t_at_max = t_lo;
    for k in 0..t_samples {
        let frac = k as f64 / (t_samples - 1) as f64;
        let t = t_lo * (t_hi / t_lo).powf(frac);
        let mut c_t = 0.0_f64;
        for &x in &xs {
            let psi_v = psi.density(x, t)?;
            let f_v = nl.eval(x, t).abs().max(nl.eval(x, -t).abs());
            c_t = c_t.max(f_v / (1.0 + psi_v));
        }
        per_t.push((t, c_t));
        if c_t > constant {
            constant = c_t;
            t_at_max = t;
        }
    }
    let c_end = per_t.last().map(|&(_, c)| c).unwrap_or(0.0);
    let c_mid = per_t
        .iter()
        .min_by(|a, b| (a.0 - t_hi / 100.0).abs().partial_cmp(&(b.0 - t_hi / 100.0).abs()).unwrap())
        .map(|&(_, c)| c)
        .unwrap_or(0.0);
    let divergent = constant > 0.0
        && c_end >= constant * (1.0 - 1e-12)
        && c_end > 1.5 * c_mid.max(1e-300);
    Ok(SubcriticalReport { constant, t_at_max, divergent, pass: !divergent })
}

#[derive(Debug, Clone, Serialize)]
pub struct SuperlinearZeroReport {
    /// sup_x |f(x,±10^{−k})| / (10^{−k})^{g⁰−1}, k = 1..8.
    pub ratios: Vec<f64>,
    pub pass: bool,
}

/// Smallness at zero: f(x,t) = o(t^{g⁰−1}) as t → 0, checked on the decade
/// sequence t = 10^{−k}; passes when the ratio decays below 1e-3 of its
/// first value.
pub fn check_superlinear_zero(nl: &Nonlinearity, g_sup: f64, dom: &Domain) -> SuperlinearZeroReport {
    let xs = dom.sample_points(12);
    let ratios: Vec<f64> = (1..=8)
        .map(|k| {
            let t = 10f64.powi(-k);
            let denom = t.powf(g_sup - 1.0);
            xs.iter()
                .map(|&x| nl.eval(x, t).abs().max(nl.eval(x, -t).abs()) / denom)
                .fold(0.0_f64, f64::max)
        })
        .collect();
    let first = ratios[0];
    let last = ratios[ratios.len() - 1];
    let pass = if first == 0.0 { true } else { last < 1e-3 * first };
    SuperlinearZeroReport { ratios, pass }
}

#[derive(Debug, Clone, Serialize)]
pub struct ArReport {
    /// min over samples of (t·f − θF) / max(1, |t·f|).
    pub margin: f64,
    pub worst_t: f64,
    /// θF > 0 held at every sample.
    pub positive: bool,
    pub t_range: (f64, f64),
    pub pass: bool,
}

/// Ambrosetti-Rabinowitz condition 0 < θF(x,t) ≤ t·f(x,t) on |t| ≥ t₀,
/// sampled log-spaced up to 1e3·t₀, both signs.
pub fn check_ar(nl: &Nonlinearity, dom: &Domain) -> ArReport {
    let theta = nl.theta();
    let t0 = nl.t0();
    let t_max = 1e3 * t0;
    let xs = dom.sample_points(12);
    let samples = 200;
    let mut margin = f64::INFINITY;
    let mut worst_t = t0;
    let mut positive = true;
    for k in 0..samples {
        let frac = k as f64 / (samples - 1) as f64;
        let t_abs = t0 * (t_max / t0).powf(frac);
        for sign in [1.0, -1.0] {
            let t = sign * t_abs;
            for &x in &xs {
                let tf = t * nl.eval(x, t);
                let th_f = theta * nl.antiderivative(x, t);
                if th_f <= 0.0 {
                    positive = false;
                }
                let rel = (tf - th_f) / tf.abs().max(1.0);
                if rel < margin {
                    margin = rel;
                    worst_t = t;
                }
            }
        }
    }
    ArReport {
        margin,
        worst_t,
        positive,
        t_range: (t0, t_max),
        pass: positive && margin >= -1e-12,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ArConsequenceReport {
    /// inf over samples of F(x,t)/|t|^θ on |t| ≥ t₀.
    pub inf_ratio: f64,
    pub pass: bool,
}

/// Superlinear growth consequence F(x,t) ≥ C|t|^θ for |t| ≥ t₀.
pub fn check_ar_consequence(nl: &Nonlinearity, dom: &Domain) -> ArConsequenceReport {
    let theta = nl.theta();
    let t0 = nl.t0();
    let t_max = 1e3 * t0;
    let xs = dom.sample_points(12);
    let samples = 200;
    let mut inf = f64::INFINITY;
    for k in 0..samples {
        let frac = k as f64 / (samples - 1) as f64;
        let t_abs = t0 * (t_max / t0).powf(frac);
        for sign in [1.0, -1.0] {
            let t = sign * t_abs;
            for &x in &xs {
                inf = inf.min(nl.antiderivative(x, t) / t_abs.powf(theta));
            }
        }
    }
    ArConsequenceReport { inf_ratio: inf, pass: inf > 0.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{bump_field, random_dirichlet_field, Grid};
    use crate::phi::build_companion;

    fn dom1() -> Domain {
        Domain::unit_interval()
    }

    fn half_quadratic() -> PhiFamily {
        // G = t²/2 through the tabulated path (exact under the trapezoid table).
        PhiFamily::tabulated(|t| t, dom1()).unwrap()
    }

    fn cubic_rhs() -> Nonlinearity {
        Nonlinearity::pure_power(4.0, 4.0, 1.0).unwrap()
    }

    #[test]
    fn energy_zero_field_is_zero() {
        let fam = half_quadratic();
        let nl = cubic_rhs();
        let g = Grid::line(33, 1.0).unwrap();
        let z = Field::zeros(&g);
        assert_eq!(energy_value(&fam, &nl, &z).unwrap(), 0.0);
        let rep = energy(&fam, &nl, &z).unwrap();
        assert_eq!(rep.j, 0.0);
        assert_eq!(rep.grad_norm, 0.0);
    }

    #[test]
    fn energy_linear_ramp() {
        // u(x) = x with f = 0 (mask relaxed): J = ∫ ½|u′|² = ½.
        let fam = half_quadratic();
        let nl = Nonlinearity::zero();
        let g = Grid::line(101, 1.0).unwrap();
        let u = Field::from_fn(&g, |p| p[0]);
        let j = energy_value(&fam, &nl, &u).unwrap();
        assert!((j - 0.5).abs() < 1e-12, "{j}");
    }

    #[test]
    fn energy_bump_cross_check() {
        // Independent oracle: analytic derivative of the bump + dense Simpson.
        let fam = half_quadratic();
        let nl = cubic_rhs();
        let g = Grid::line(801, 1.0).unwrap();
        let (c, r, a) = (0.5, 0.35, 1.3);
        let u = bump_field(&g, [c, 0.0], r, a);
        let j_h = energy_value(&fam, &nl, &u).unwrap();

        let n = 20_000;
        let h = 1.0 / n as f64;
        let mut j_dense = 0.0;
        for i in 0..=n {
            let x = i as f64 * h;
            let s = (x - c) / r;
            // Simpson weights: 1,4,2,...,4,1 scaled by h/3.
            let simpson_w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let inside = s.abs() < 1.0;
            let uval = if inside { a * (1.0 - s * s).powi(2) } else { 0.0 };
            let du = if inside { a * 2.0 * (1.0 - s * s) * (-2.0 * s) / r } else { 0.0 };
            j_dense += simpson_w * (0.5 * du * du - 0.25 * uval.powi(4));
        }
        j_dense *= h / 3.0;
        assert!(
            (j_h - j_dense).abs() < 2e-4 * (1.0 + j_dense.abs()),
            "J_h = {j_h}, dense = {j_dense}"
        );
    }

    #[test]
    fn gradient_zero_at_origin() {
        let fam = half_quadratic();
        let nl = cubic_rhs();
        let g = Grid::line(17, 1.0).unwrap();
        let z = Field::zeros(&g);
        let p = energy_gradient(&fam, &nl, &z).unwrap();
        assert!(p.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gradient_matches_central_differences() {
        let fams = [
            PhiFamily::constant_power(2.5, dom1()).unwrap(),
            PhiFamily::variable_exponent(CoordPoly::affine(1.5, 1.0, 0.0), dom1()).unwrap(),
            PhiFamily::double_phase(2.0, 3.0, CoordPoly::affine(0.0, 1.0, 0.0), dom1()).unwrap(),
        ];
        let nls = [cubic_rhs(), Nonlinearity::zero()];
        let g = Grid::line(33, 1.0).unwrap();
        let delta = 1e-6;
        let mut worst = 0.0_f64;
        for fam in &fams {
            for nl in &nls {
                for seed in 0..10u64 {
                    let u = random_dirichlet_field(&g, seed, 1.0);
                    let v = random_dirichlet_field(&g, 1000 + seed, 1.0);
                    let lhs = energy_gradient(fam, nl, &u).unwrap().dot(&v);
                    let jp = energy_value(fam, nl, &u.axpy(delta, &v)).unwrap();
                    let jm = energy_value(fam, nl, &u.axpy(-delta, &v)).unwrap();
                    let fd = (jp - jm) / (2.0 * delta);
                    let rel = (lhs - fd).abs() / (1.0 + lhs.abs());
                    worst = worst.max(rel);
                }
            }
        }
        assert!(worst < 1e-6, "max relative error {worst}");
    }

    #[test]
    fn gradient_matches_linear_laplacian() {
        // G = t²/2: assembled gradient equals w_j(−Δ_h u − f(u)) on interior
        // nodes, assembled here independently by the 3-point stencil.
        let fam = half_quadratic();
        let nl = cubic_rhs();
        let g = Grid::line(41, 1.0).unwrap();
        let u = random_dirichlet_field(&g, 9, 0.8);
        let p = energy_gradient(&fam, &nl, &u).unwrap();
        let h = g.h[0];
        for i in 1..g.n[0] - 1 {
            let lap = (u.values()[i + 1] - 2.0 * u.values()[i] + u.values()[i - 1]) / (h * h);
            let expect = h * (-lap - nl.eval(g.node_points()[i], u.values()[i]));
            let got = p.values()[i];
            assert!(
                (got - expect).abs() <= 1e-12 * (1.0 + expect.abs()),
                "node {i}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn residual_field_is_strong_form() {
        let fam = half_quadratic();
        let nl = cubic_rhs();
        let g = Grid::line(41, 1.0).unwrap();
        let u = random_dirichlet_field(&g, 13, 0.8);
        let r = residual_field(&fam, &nl, &u).unwrap();
        let h = g.h[0];
        for i in 1..g.n[0] - 1 {
            let lap = (u.values()[i + 1] - 2.0 * u.values()[i] + u.values()[i - 1]) / (h * h);
            let expect = -lap - nl.eval(g.node_points()[i], u.values()[i]);
            assert!((r.values()[i] - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn weak_residual_properties() {
        let fam = PhiFamily::constant_power(2.5, dom1()).unwrap();
        let nl = cubic_rhs();
        let g = Grid::line(33, 1.0).unwrap();
        let u = random_dirichlet_field(&g, 3, 1.0);
        let z = Field::zeros(&g);
        assert_eq!(weak_residual(&fam, &nl, &u, &z).unwrap(), 0.0);

        let v1 = random_dirichlet_field(&g, 4, 1.0);
        let v2 = random_dirichlet_field(&g, 5, 1.0);
        let r1 = weak_residual(&fam, &nl, &u, &v1).unwrap();
        let r2 = weak_residual(&fam, &nl, &u, &v2).unwrap();
        let rc = weak_residual(&fam, &nl, &u, &v1.scaled(2.0).axpy(-0.5, &v2)).unwrap();
        assert!((rc - (2.0 * r1 - 0.5 * r2)).abs() < 1e-12 * (1.0 + rc.abs()));

        // Agreement with the assembled gradient pairing.
        let p = energy_gradient(&fam, &nl, &u).unwrap();
        for v in [&v1, &v2] {
            let a = weak_residual(&fam, &nl, &u, v).unwrap();
            let b = p.dot(v);
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn flux_basics() {
        let fam = half_quadratic();
        assert_eq!(flux(&fam, [0.5, 0.0], [0.0, 0.0]), [0.0, 0.0]);
        // g(t) = t: A(ξ) = ξ.
        let a = flux(&fam, [0.5, 0.0], [0.3, -0.4]);
        assert!((a[0] - 0.3).abs() < 1e-12 && (a[1] + 0.4).abs() < 1e-12);
    }

    #[test]
    fn monotonicity_chain() {
        let fams = [
            PhiFamily::constant_power(2.5, dom1()).unwrap(),
            PhiFamily::variable_exponent(CoordPoly::affine(1.5, 1.0, 0.0), dom1()).unwrap(),
            PhiFamily::double_phase(2.0, 3.0, CoordPoly::affine(0.0, 1.0, 0.0), dom1()).unwrap(),
        ];
        let mut rng = rand_pcgish(77);
        for fam in &fams {
            for _ in 0..2000 {
                let x = [rng(), 0.0];
                let xi = [4.0 * (rng() - 0.5), 4.0 * (rng() - 0.5)];
                let eta = [4.0 * (rng() - 0.5), 4.0 * (rng() - 0.5)];
                if xi == eta {
                    continue;
                }
                let (lhs, rhs) = monotonicity_pairing(fam, x, xi, eta);
                assert!(
                    lhs >= rhs - 1e-10 * (1.0 + rhs.abs()),
                    "{}: lhs {lhs} < rhs {rhs} at xi={xi:?}, eta={eta:?}",
                    fam.kind_name()
                );
                let (lhs2, bound) = split_lower_bound(fam, x, xi, eta);
                assert!(
                    lhs2 >= bound - 1e-10 * (1.0 + bound.abs()),
                    "{}: split bound fails: {lhs2} < {bound}",
                    fam.kind_name()
                );
            }
        }
        // Equality case g(t) = t: lhs = |ξ−η|² = rhs.
        let fam = half_quadratic();
        let (lhs, rhs) = monotonicity_pairing(&fam, [0.5, 0.0], [1.0, 2.0], [-0.5, 0.25]);
        assert!((lhs - rhs).abs() < 1e-9 * lhs.abs(), "{lhs} vs {rhs}");
    }

    // tiny deterministic generator for test sampling (not a statistics tool)
    fn rand_pcgish(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64)
        }
    }

    #[test]
    fn subcritical_checker() {
        let cp = PhiFamily::constant_power(2.0, dom1()).unwrap();
        // α = 0.3, N = 1 override: Ψ = t⁵, ψ ~ 5t⁴; f = t³ is dominated.
        let psi = build_companion(&cp, 0.3, 1, true).unwrap();
        let rep = check_subcritical(&cubic_rhs(), &psi, 121).unwrap();
        assert!(rep.pass && !rep.divergent, "{rep:?}");
        assert!(rep.constant > 0.1 && rep.constant < 0.25, "{}", rep.constant);

        // α = 0.1: Ψ = t^{2.5}, ψ ~ t^{1.5}; t³ escapes.
        let psi_small = build_companion(&cp, 0.1, 1, true).unwrap();
        let rep = check_subcritical(&cubic_rhs(), &psi_small, 121).unwrap();
        assert!(rep.divergent && !rep.pass, "{rep:?}");

        let rep = check_subcritical(&Nonlinearity::zero(), &psi, 121).unwrap();
        assert!(rep.pass && rep.constant == 0.0);
    }

    #[test]
    fn superlinear_zero_checker() {
        let dom = dom1();
        // f = t³, g⁰ = 2: ratio = t² → passes.
        let rep = check_superlinear_zero(&cubic_rhs(), 2.0, &dom);
        assert!(rep.pass, "{rep:?}");
        // f = t: ratio ≡ 1 → fails.
        let lin = Nonlinearity::pure_power(2.0, 2.5, 1.0).unwrap();
        let rep = check_superlinear_zero(&lin, 2.0, &dom);
        assert!(!rep.pass, "{rep:?}");
        // f = t·|log t|: the decade ratios grow like k·ln 10, so the decay
        // test fails even though f/t → ... the ratio is unbounded near 0.
        let tlog = Nonlinearity::table(|t| t * t.ln().abs(), 3.0, 1.0).unwrap();
        let rep = check_superlinear_zero(&tlog, 2.0, &dom);
        assert!(!rep.pass, "{rep:?}");
        assert!(rep.ratios[7] > rep.ratios[0]);
    }

    #[test]
    fn ar_checker() {
        let dom = dom1();
        // f = t³, θ = 4: equality, margin 0.
        let rep = check_ar(&cubic_rhs(), &dom);
        assert!(rep.pass && rep.margin.abs() < 1e-12, "{rep:?}");

        // θ = 4.5 overshoots.
        let over = Nonlinearity::pure_power(4.0, 4.5, 1.0).unwrap();
        let rep = check_ar(&over, &dom);
        assert!(!rep.pass && rep.margin < -0.1, "{rep:?}");

        // f = t³ + t with θ = 3.5: t·f − θF = t⁴/8 − 3t²/4 < 0 at t = 1, so
        // the condition fails from t₀ = 1 but holds from t₀ = 2.5 (zero at
        // t = √6).
        let mixed_lo = Nonlinearity::table(|t| t * t * t + t, 3.5, 1.0).unwrap();
        let rep = check_ar(&mixed_lo, &dom);
        assert!(!rep.pass && rep.margin < -0.05, "{rep:?}");
        let mixed_hi = Nonlinearity::table(|t| t * t * t + t, 3.5, 2.5).unwrap();
        let rep = check_ar(&mixed_hi, &dom);
        assert!(rep.pass, "{rep:?}");

        // Pure power windows: θ ∈ (g⁰, q] passes, θ > q fails.
        for theta in [2.2, 3.0, 4.0] {
            let nl = Nonlinearity::pure_power(4.0, theta, 1.0).unwrap();
            assert!(check_ar(&nl, &dom).pass, "theta = {theta}");
        }
        for theta in [4.05, 5.0] {
            let nl = Nonlinearity::pure_power(4.0, theta, 1.0).unwrap();
            assert!(!check_ar(&nl, &dom).pass, "theta = {theta}");
        }
    }

    #[test]
    fn ar_consequence_checker() {
        let dom = dom1();
        let rep = check_ar_consequence(&cubic_rhs(), &dom);
        assert!(rep.pass);
        assert!((rep.inf_ratio - 0.25).abs() < 1e-9, "{}", rep.inf_ratio);

        // Weaker exponent stays bounded below too.
        let weaker = Nonlinearity::pure_power(4.0, 3.5, 1.0).unwrap();
        let rep = check_ar_consequence(&weaker, &dom);
        assert!(rep.pass && rep.inf_ratio >= 0.25 - 1e-9, "{rep:?}");

        // Zero right-hand side: F ≡ 0 is flagged.
        let rep = check_ar_consequence(&Nonlinearity::zero(), &dom);
        assert!(!rep.pass);
    }

    #[test]
    fn table_antiderivative_consistency() {
        // F' = f at knots: central differences of F reproduce f.
        let nl = Nonlinearity::table(|t| t * t * t + t, 3.5, 1.0).unwrap();
        for &t in &[0.01_f64, 0.5, 1.0, 7.0, 300.0] {
            let h = 1e-5 * t.max(1.0);
            let fd = (nl.antiderivative([0.0; 2], t + h) - nl.antiderivative([0.0; 2], t - h))
                / (2.0 * h);
            let f = nl.eval([0.0; 2], t);
            assert!((fd - f).abs() < 1e-4 * (1.0 + f.abs()), "t={t}: {fd} vs {f}");
        }
        // Oddness/evenness.
        assert_eq!(nl.eval([0.0; 2], -2.0), -nl.eval([0.0; 2], 2.0));
        assert_eq!(nl.antiderivative([0.0; 2], -2.0), nl.antiderivative([0.0; 2], 2.0));
    }
}
