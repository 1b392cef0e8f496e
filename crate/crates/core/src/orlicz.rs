//! Integral functionals over discrete fields: modulars, Luxembourg and
//! Orlicz (Amemiya) norms, Hölder / embedding / Poincaré diagnostics.
//!
//! The modular is ρ(u) = ∫_Ω G(x,|u|) dx realized by the grid quadrature;
//! the Luxembourg norm is the smallest λ with ρ(u/λ) ≤ 1; the Orlicz norm is
//! computed through the Amemiya identity inf_{k>0} (1 + ρ(ku))/k. The two
//! are equivalent within a factor 2.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{random_dirichlet_field, Field, GradField, Grid, Point};
use crate::num::{bisect_increasing, expand_bracket, golden_min_log};
use crate::phi::PhiFamily;

/// Norm summary for one field.
#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    pub modular: f64,
    pub luxemburg: f64,
    pub amemiya: f64,
}

fn check_same_domain(fam: &PhiFamily, grid: &Grid) -> Result<()> {
    let d = fam.domain();
    let ok = d.dim == grid.dim
        && (d.extent[0] - grid.extent[0]).abs() < 1e-12
        && (grid.dim == 1 || (d.extent[1] - grid.extent[1]).abs() < 1e-12);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "family domain {:?} does not match grid extent {:?} (dim {})",
            d.extent, grid.extent, grid.dim
        )))
    }
}

/// Weighted sample view: the common core of nodal and cell modulars.
struct Samples<'a> {
    pts: &'a [Point],
    wts: &'a [f64],
    mags: &'a [f64],
}

impl Samples<'_> {
    fn modular_scaled(&self, fam: &PhiFamily, scale: f64, conjugate: bool) -> f64 {
        let mut acc = 0.0;
        for ((&p, &w), &m) in self.pts.iter().zip(self.wts).zip(self.mags) {
            let t = m.abs() * scale;
            if t > 0.0 {
                let v = if conjugate {
                    // Values here are guaranteed evaluable; conjugate failure
                    // would mean a broken family, surfaced as NaN downstream.
                    fam.conjugate(p, t).unwrap_or(f64::NAN)
                } else {
                    fam.eval(p, t)
                };
                acc += w * v;
            }
        }
        acc
    }

    fn max_abs(&self) -> f64 {
        self.mags.iter().fold(0.0_f64, |a, &b| a.max(b.abs()))
    }

    fn measure(&self) -> f64 {
        self.wts.iter().sum()
    }

    fn luxemburg(&self, fam: &PhiFamily, conjugate: bool) -> Result<f64> {
        let sup = self.max_abs();
        if sup == 0.0 {
            return Ok(0.0);
        }
        // Increasing in s = 1/λ; target modular = 1.
        let f = |s: f64| self.modular_scaled(fam, s, conjugate);
        let lam_hi = sup * self.measure() + 1.0;
        let (lo, hi) = expand_bracket(f, 1.0 / lam_hi, 4.0, 1.0)?;
        let s = bisect_increasing(f, lo, hi, 1.0, 1e-10, 80)?;
        Ok(1.0 / s)
    }

    fn amemiya(&self, fam: &PhiFamily, conjugate: bool) -> f64 {
        if self.max_abs() == 0.0 {
            return 0.0;
        }
        let (_, v) = golden_min_log(
            |k| (1.0 + self.modular_scaled(fam, k, conjugate)) / k,
            1e-8,
            1e8,
        );
        v
    }
}

fn node_samples<'a>(u: &'a Field) -> Samples<'a> {
    let g = u.grid();
    Samples { pts: g.node_points(), wts: g.node_weights(), mags: u.values() }
}

/// ρ(u) = ∫ G(x,|u|) dx over nodes (trapezoid weights).
pub fn modular(fam: &PhiFamily, u: &Field) -> Result<f64> {
    check_same_domain(fam, u.grid())?;
    Ok(node_samples(u).modular_scaled(fam, 1.0, false))
}

/// ρ(∇u) = ∫ G(x,|∇u|) dx over cells (midpoint weights).
pub fn modular_grad(fam: &PhiFamily, gu: &GradField) -> Result<f64> {
    check_same_domain(fam, gu.grid())?;
    let mags = gu.magnitudes();
    let g = gu.grid();
    let s = Samples { pts: g.cell_points(), wts: g.cell_weights(), mags: &mags };
    Ok(s.modular_scaled(fam, 1.0, false))
}

/// Luxembourg norm of a nodal field.
pub fn luxemburg_norm(fam: &PhiFamily, u: &Field) -> Result<f64> {
    check_same_domain(fam, u.grid())?;
    node_samples(u).luxemburg(fam, false)
}

/// Luxembourg norm of |∇u| (the W₀ gauge used throughout the solver).
pub fn luxemburg_norm_grad(fam: &PhiFamily, gu: &GradField) -> Result<f64> {
    check_same_domain(fam, gu.grid())?;
    let mags = gu.magnitudes();
    let g = gu.grid();
    Samples { pts: g.cell_points(), wts: g.cell_weights(), mags: &mags }.luxemburg(fam, false)
}

/// Orlicz norm through the Amemiya identity.
pub fn amemiya_norm(fam: &PhiFamily, u: &Field) -> Result<f64> {
    check_same_domain(fam, u.grid())?;
    Ok(node_samples(u).amemiya(fam, false))
}

/// Luxembourg norm taken in the conjugate family G*.
pub fn conjugate_luxemburg_norm(fam: &PhiFamily, v: &Field) -> Result<f64> {
    check_same_domain(fam, v.grid())?;
    node_samples(v).luxemburg(fam, true)
}

/// Orlicz (Amemiya) norm taken in the conjugate family G*. Pairs with the
/// Luxembourg norm of the other factor in the constant-free Hölder bound
/// |∫uv| ≤ ‖u‖_{Lux,G}·‖v‖_{Orl,G*}.
pub fn conjugate_amemiya_norm(fam: &PhiFamily, v: &Field) -> Result<f64> {
    check_same_domain(fam, v.grid())?;
    Ok(node_samples(v).amemiya(fam, true))
}

/// Modular together with both norms.
pub fn norm_report(fam: &PhiFamily, u: &Field) -> Result<NormReport> {
    Ok(NormReport {
        modular: modular(fam, u)?,
        luxemburg: luxemburg_norm(fam, u)?,
        amemiya: amemiya_norm(fam, u)?,
    })
}

/// Two-sided Luxembourg bounds implied by a modular value (norm–modular
/// relations): cheap prescreen that avoids bisection when only a threshold
/// comparison is needed.
pub fn luxemburg_bounds_from_modular(fam: &PhiFamily, m: f64) -> (f64, f64) {
    let (g0, g_sup) = fam.sc();
    if m <= 0.0 {
        (0.0, 0.0)
    } else if m >= 1.0 {
        (m.powf(1.0 / g_sup), m.powf(1.0 / g0))
    } else {
        (m.powf(1.0 / g0), m.powf(1.0 / g_sup))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HolderReport {
    pub integral: f64,
    pub bound: f64,
    /// integral / bound; the inequality asserts ≤ 1 (+ tolerance).
    pub ratio: f64,
    pub pass: bool,
}

/// Hölder inequality |∫uv| ≤ 2‖u‖_G·‖v‖_{G*}.
pub fn holder_check(fam: &PhiFamily, u: &Field, v: &Field) -> Result<HolderReport> {
    check_same_domain(fam, u.grid())?;
    if u.grid().node_count() != v.grid().node_count() || u.grid().dim != v.grid().dim {
        return Err(Error::InvalidInput("field pair on mismatched grids".into()));
    }
    let prod: Vec<f64> = u.values().iter().zip(v.values()).map(|(a, b)| a * b).collect();
    let integral = u.grid().integrate_nodes(&prod)?.abs();
    let nu = luxemburg_norm(fam, u)?;
    let nv = conjugate_luxemburg_norm(fam, v)?;
    let bound = 2.0 * nu * nv;
    let ratio = if bound > 0.0 { integral / bound } else if integral == 0.0 { 0.0 } else { f64::INFINITY };
    Ok(HolderReport { integral, bound, ratio, pass: ratio <= 1.0 + 1e-8 })
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingReport {
    /// Smallest sampled C with B(x,t) ≤ C·(A(x,t) + 1).
    pub constant: f64,
    /// True when the ratio keeps growing through the top decades (no
    /// embedding: the target grows strictly faster).
    pub divergent: bool,
    pub t_at_max: f64,
}

/// Sampled embedding diagnostic: does famB(x,t) ≤ C(famA(x,t) + 1) hold?
pub fn embedding_check(fam_a: &PhiFamily, fam_b: &PhiFamily, trials: usize) -> EmbeddingReport {
    let t_samples = trials.clamp(61, 100_000);
    let xs = fam_a.domain().sample_points(24);
    let (t_lo, t_hi) = (1e-6_f64, 1e6_f64);
    let mut constant = 0.0_f64;
    let mut t_at_max = t_lo;
    let mut per_t: Vec<(f64, f64)> = Vec::with_capacity(t_samples);
    for k in 0..t_samples {
        let f = k as f64 / (t_samples - 1) as f64;
        let t = t_lo * (t_hi / t_lo).powf(f);
        let mut c_t = 0.0_f64;
        for &x in &xs {
            let c = fam_b.eval(x, t) / (fam_a.eval(x, t) + 1.0);
            c_t = c_t.max(c);
        }
        per_t.push((t, c_t));
        if c_t > constant {
            constant = c_t;
            t_at_max = t;
        }
    }
    // Divergence: the constant at the top of the range dominates and is still
    // growing across the final two decades.
    let at = |t_target: f64| {
        per_t
            .iter()
            .min_by(|a, b| {
                (a.0 - t_target).abs().partial_cmp(&(b.0 - t_target).abs()).unwrap()
            })
            .map(|&(_, c)| c)
            .unwrap_or(0.0)
    };
    let c_end = per_t.last().map(|&(_, c)| c).unwrap_or(0.0);
    let divergent = c_end >= constant * (1.0 - 1e-12) && c_end > 1.5 * at(t_hi / 100.0).max(1e-300);
    EmbeddingReport { constant, divergent, t_at_max }
}

#[derive(Debug, Clone, Serialize)]
pub struct PoincareReport {
    /// sup over trials of ‖u‖_G / ‖∇u‖_G.
    pub sup_ratio: f64,
    pub trials: usize,
}

/// Sampled Poincaré diagnostic ‖u‖_G ≤ C‖∇u‖_G over random Dirichlet fields.
pub fn poincare_diagnostic(
    fam: &PhiFamily,
    grid: &std::sync::Arc<Grid>,
    trials: usize,
    seed: u64,
) -> Result<PoincareReport> {
    let mut sup = 0.0_f64;
    for i in 0..trials {
        let u = random_dirichlet_field(grid, seed.wrapping_add(i as u64), 1.5);
        let nu = luxemburg_norm(fam, &u)?;
        if nu == 0.0 {
            continue;
        }
        let ng = luxemburg_norm_grad(fam, &u.grad())?;
        sup = sup.max(nu / ng);
    }
    Ok(PoincareReport { sup_ratio: sup, trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Domain;
    use crate::phi::CoordPoly;

    fn quad_fam() -> PhiFamily {
        PhiFamily::constant_power(2.0, Domain::unit_interval()).unwrap()
    }

    #[test]
    fn modular_closed_forms() {
        let fam = quad_fam();
        let g = Grid::line(101, 1.0).unwrap();
        let ones = Field::from_fn(&g, |_| 1.0);
        assert!((modular(&fam, &ones).unwrap() - 1.0).abs() < 1e-10);

        let gx = Grid::line(1001, 1.0).unwrap();
        let x = Field::from_fn(&gx, |p| p[0]);
        assert!((modular(&fam, &x).unwrap() - 1.0 / 3.0).abs() < 2e-7);

        let z = Field::zeros(&g);
        assert_eq!(modular(&fam, &z).unwrap(), 0.0);
    }

    #[test]
    fn modular_grid_mismatch_is_error() {
        let fam = quad_fam();
        let g = Grid::line(11, 2.0).unwrap();
        let u = Field::from_fn(&g, |_| 1.0);
        assert!(modular(&fam, &u).is_err());
    }

    #[test]
    fn luxemburg_closed_forms() {
        let g = Grid::line(1001, 1.0).unwrap();
        // Constant field under any pure power: norm equals the constant.
        let fam23 = PhiFamily::constant_power(2.3, Domain::unit_interval()).unwrap();
        let c = Field::from_fn(&g, |_| 0.7);
        assert!((luxemburg_norm(&fam23, &c).unwrap() - 0.7).abs() < 1e-9);

        let fam = quad_fam();
        let x = Field::from_fn(&g, |p| p[0]);
        let lx = luxemburg_norm(&fam, &x).unwrap();
        assert!((lx - 1.0 / 3f64.sqrt()).abs() < 1e-6, "{lx}");

        assert_eq!(luxemburg_norm(&fam, &Field::zeros(&g)).unwrap(), 0.0);
    }

    #[test]
    fn amemiya_closed_forms() {
        let fam = quad_fam();
        let g = Grid::line(1001, 1.0).unwrap();
        assert_eq!(amemiya_norm(&fam, &Field::zeros(&g)).unwrap(), 0.0);

        let ones = Field::from_fn(&g, |_| 1.0);
        assert!((amemiya_norm(&fam, &ones).unwrap() - 2.0).abs() < 1e-7);

        let x = Field::from_fn(&g, |p| p[0]);
        let a = amemiya_norm(&fam, &x).unwrap();
        assert!((a - 2.0 / 3f64.sqrt()).abs() < 1e-6, "{a}");
    }

    #[test]
    fn unit_ball_attainment_and_sandwich() {
        let g = Grid::line(65, 1.0).unwrap();
        let fams = [
            quad_fam(),
            PhiFamily::variable_exponent(CoordPoly::affine(1.6, 0.9, 0.0), Domain::unit_interval())
                .unwrap(),
            PhiFamily::double_phase(2.0, 3.0, CoordPoly::affine(0.2, 0.7, 0.0), Domain::unit_interval())
                .unwrap(),
        ];
        for fam in &fams {
            let (g0, g_sup) = fam.sc();
            for seed in 0..30u64 {
                for amp in [0.05, 1.0, 20.0] {
                    let u = random_dirichlet_field(&g, seed, amp);
                    let rep = norm_report(fam, &u).unwrap();
                    // modular(u / ||u||) = 1
                    let scaled = u.scaled(1.0 / rep.luxemburg);
                    let m1 = modular(fam, &scaled).unwrap();
                    assert!((m1 - 1.0).abs() < 1e-8, "{m1}");
                    // norm equivalence + modular bound
                    assert!(rep.luxemburg <= rep.amemiya * (1.0 + 1e-9));
                    assert!(rep.amemiya <= 2.0 * rep.luxemburg * (1.0 + 1e-9));
                    assert!(rep.amemiya <= rep.modular + 1.0 + 1e-9);
                    // norm-modular sandwich
                    let (lo, hi) = luxemburg_bounds_from_modular(fam, rep.modular);
                    assert!(
                        rep.luxemburg >= lo - 1e-8 && rep.luxemburg <= hi + 1e-8,
                        "lux {} not in [{lo}, {hi}] (g0={g0}, g_sup={g_sup})",
                        rep.luxemburg
                    );
                }
            }
        }
    }

    #[test]
    fn scaling_limits() {
        // u/i drives both modular and norm to 0; i·u drives both up.
        let fam = quad_fam();
        let g = Grid::line(65, 1.0).unwrap();
        let u = random_dirichlet_field(&g, 3, 1.0);
        let mut prev_norm = f64::INFINITY;
        for i in [1.0, 4.0, 16.0, 64.0] {
            let rep = norm_report(&fam, &u.scaled(1.0 / i)).unwrap();
            assert!(rep.luxemburg < prev_norm);
            prev_norm = rep.luxemburg;
        }
        assert!(prev_norm < 1e-1);
        let rep_big = norm_report(&fam, &u.scaled(1e4)).unwrap();
        assert!(rep_big.luxemburg > 1e2 && rep_big.modular > 1e4);
    }

    #[test]
    fn holder_cases() {
        let fam = quad_fam();
        let g = Grid::line(201, 1.0).unwrap();
        let zero = Field::zeros(&g);
        let v = Field::from_fn(&g, |p| 1.0 - p[0]);
        let rep = holder_check(&fam, &zero, &v).unwrap();
        assert_eq!(rep.ratio, 0.0);

        // u = v = 1, G = t²: ∫uv = 1 and 2·‖u‖·‖v‖_{G*} = 2·1·(1/2) = 1.
        let ones = Field::from_fn(&g, |_| 1.0);
        let rep = holder_check(&fam, &ones, &ones).unwrap();
        assert!(rep.pass);
        assert!((rep.bound - 1.0).abs() < 1e-6, "bound {}", rep.bound);
        assert!(rep.ratio > 0.99);

        for seed in 0..50u64 {
            let u = random_dirichlet_field(&g, 100 + seed, 3.0);
            let w = random_dirichlet_field(&g, 200 + seed, 0.5);
            assert!(holder_check(&fam, &u, &w).unwrap().pass);
        }
    }

    #[test]
    fn embedding_cases() {
        let dom = Domain::unit_interval();
        let cubic = PhiFamily::constant_power(3.0, dom).unwrap();
        let square = PhiFamily::constant_power(2.0, dom).unwrap();

        let rep = embedding_check(&cubic, &square, 2001);
        assert!(!rep.divergent);
        let expect = 2f64.powf(2.0 / 3.0) / 3.0;
        assert!((rep.constant - expect).abs() < 0.05 * expect, "{} vs {expect}", rep.constant);

        let rep = embedding_check(&square, &cubic, 2001);
        assert!(rep.divergent, "{rep:?}");

        let rep = embedding_check(&square, &square, 2001);
        assert!(!rep.divergent);
        assert!((rep.constant - 1.0).abs() < 1e-6);
    }

    #[test]
    fn poincare_bounded() {
        let fam = quad_fam();
        let g = Grid::line(65, 1.0).unwrap();
        let rep = poincare_diagnostic(&fam, &g, 100, 5).unwrap();
        let rep2 = poincare_diagnostic(&fam, &g, 100, 5).unwrap();
        assert_eq!(rep.sup_ratio, rep2.sup_ratio);
        assert!(rep.sup_ratio > 0.0 && rep.sup_ratio < 1.0, "{}", rep.sup_ratio);
    }
}
