//! Small root-finding / optimization / quadrature helpers shared by the
//! function calculus and the norm machinery.

use crate::error::{Error, Result};

/// Solve f(t) = target for increasing f on [lo, hi] by bisection in log t
/// (both endpoints positive) to relative tolerance `rel_tol`, capped at
/// `max_iter` halvings. The bracket must already straddle the target; callers
/// expand brackets before calling.
pub fn bisect_increasing(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    target: f64,
    rel_tol: f64,
    max_iter: usize,
) -> Result<f64> {
    if !(lo <= hi) {
        return Err(Error::Numerics(format!("bad bracket [{lo}, {hi}]")));
    }
    let flo = f(lo);
    let fhi = f(hi);
    if flo > target || fhi < target {
        return Err(Error::Numerics(format!(
            "bracket [{lo}, {hi}] does not straddle target {target} (f: [{flo}, {fhi}])"
        )));
    }
    let log_domain = lo > 0.0;
    let (mut a, mut b) = if log_domain { (lo.ln(), hi.ln()) } else { (lo, hi) };
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        let t = if log_domain { m.exp() } else { m };
        if f(t) < target {
            a = m;
        } else {
            b = m;
        }
        let width = if log_domain { b - a } else { (b - a) / b.abs().max(1e-300) };
        if width.abs() <= rel_tol {
            break;
        }
    }
    let m = 0.5 * (a + b);
    Ok(if log_domain { m.exp() } else { m })
}

/// Expand a positive bracket geometrically until f(lo) <= target <= f(hi).
/// Starts from `seed` and multiplies/divides by `factor`.
pub fn expand_bracket(
    mut f: impl FnMut(f64) -> f64,
    seed: f64,
    factor: f64,
    target: f64,
) -> Result<(f64, f64)> {
    let seed = if seed.is_finite() && seed > 0.0 { seed } else { 1.0 };
    let mut lo = seed;
    let mut hi = seed;
    let mut guard = 0;
    while f(lo) > target {
        lo /= factor;
        guard += 1;
        if lo < 1e-300 || guard > 4000 {
            return Err(Error::Numerics(format!("no lower bracket for target {target}")));
        }
    }
    guard = 0;
    while f(hi) < target {
        hi *= factor;
        guard += 1;
        if hi > 1e300 || guard > 4000 {
            return Err(Error::Numerics(format!("no upper bracket for target {target}")));
        }
    }
    Ok((lo, hi))
}

/// Minimize a unimodal f over k in [lo, hi] by golden-section search on
/// log k. Returns (argmin, min).
pub fn golden_min_log(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = lo.ln();
    let mut b = hi.ln();
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c.exp());
    let mut fd = f(d.exp());
    // ~35 iterations shrink the log-bracket by phi^-35 ~ 5e-8, ample for
    // the smooth objectives used here.
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d.exp());
        }
        if (b - a).abs() < 1e-12 {
            break;
        }
    }
    let k = (0.5 * (a + b)).exp();
    (k, f(k))
}

/// Gauss-Legendre nodes and weights on [0, 1], by Newton iteration on the
/// Legendre polynomial (standard construction).
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess on [-1, 1].
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and its derivative by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j as f64 + 1.0) * x * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            pp = n as f64 * (x * p0 - p1) / (x * x - 1.0);
            let dx = p0 / pp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * pp * pp);
        // Map from [-1,1] to [0,1].
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}
