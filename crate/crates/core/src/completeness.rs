//! Stochastic-completeness machinery: feasibility search for the quadratic
//! growth constant c1, the Lyapunov test-function identity, and a Monte Carlo
//! non-explosion probe driven by the exactly sampled barrier process.

use crate::drifts::FoliationBounds;
use crate::error::{Error, Result};
use crate::sde::{barrier_path, SimConfig};

const C1_CEILING: f64 = 1e6;

/// Result of the c1 feasibility search. The criterion asks for a constant
/// c1 > 0 with `min(rho1(s) - kappa(s)/eps, rho2(s)/eps) >= -n (c1^2 s^2 + c1)`
/// for all s; this certificate records the smallest grid-feasible constant
/// and the sampled deficit curve at that constant.
#[derive(Clone, Debug)]
pub struct CompletenessCertificate {
    pub feasible: bool,
    pub c1: f64,
    pub n: usize,
    /// location of the worst (largest) deficit at the returned c1
    pub worst_s: f64,
    /// sampled (s, deficit) pairs; deficit = -kappa_eps(s) - n (c1^2 s^2 + c1),
    /// nonpositive everywhere when feasible
    pub deficit_curve: Vec<(f64, f64)>,
}

fn sample_grid(s_max: f64) -> Vec<f64> {
    // geometric grid reaching well below 1 so the s -> 0 constraint binds,
    // plus a uniform overlay against gaps between geometric points
    let mut grid = Vec::with_capacity(1024 + 256);
    let lo: f64 = (s_max * 1e-9).min(1e-6);
    let ratio = (s_max / lo).powf(1.0 / 1023.0);
    let mut s = lo;
    for _ in 0..1024 {
        grid.push(s);
        s *= ratio;
    }
    for i in 1..=256 {
        grid.push(s_max * i as f64 / 256.0);
    }
    grid.sort_by(|a, b| a.total_cmp(b));
    grid
}

fn deficit(bounds: &FoliationBounds, n: f64, c1: f64, s: f64) -> f64 {
    -bounds.kappa_eps(s) - n * (c1 * c1 * s * s + c1)
}

/// Largest deficit over the grid, refined by golden-section search around
/// the discrete argmax (the deficit is smooth between grid points).
fn worst_deficit(bounds: &FoliationBounds, n: f64, c1: f64, grid: &[f64]) -> (f64, f64) {
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for (i, &s) in grid.iter().enumerate() {
        let d = deficit(bounds, n, c1, s);
        if d > best {
            best = d;
            best_i = i;
        }
    }
    let mut a = grid[best_i.saturating_sub(1)];
    let mut b = grid[(best_i + 1).min(grid.len() - 1)];
    const PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - PHI * (b - a);
    let mut x2 = a + PHI * (b - a);
    let mut f1 = deficit(bounds, n, c1, x1);
    let mut f2 = deficit(bounds, n, c1, x2);
    for _ in 0..60 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - PHI * (b - a);
            f1 = deficit(bounds, n, c1, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + PHI * (b - a);
            f2 = deficit(bounds, n, c1, x2);
        }
    }
    let s_star = 0.5 * (a + b);
    let d_star = deficit(bounds, n, c1, s_star).max(best);
    if d_star >= best {
        (s_star, d_star)
    } else {
        (grid[best_i], best)
    }
}

/// Smallest grid-feasible c1 by bisection over the monotone feasibility
/// predicate (the allowance n (c1^2 s^2 + c1) is increasing in c1). Returns
/// an infeasible certificate when no c1 <= 1e6 works on the sampled grid.
/// This is a numerical check on a finite grid, not a proof.
pub fn minimal_c1(
    bounds: &FoliationBounds,
    n: usize,
    s_max: f64,
    tol: f64,
) -> Result<CompletenessCertificate> {
    if n == 0 || !(s_max > 0.0) || !(tol > 0.0) {
        return Err(Error::Config(format!(
            "need n >= 1, s_max > 0, tol > 0; got n = {n}, s_max = {s_max}, tol = {tol}"
        )));
    }
    let nf = n as f64;
    let grid = sample_grid(s_max);
    for &s in &grid {
        let v = bounds.kappa_eps(s);
        if !v.is_finite() {
            return Err(Error::Domain(format!("curvature bound not finite at s = {s}")));
        }
    }
    let feasible = |c1: f64| worst_deficit(bounds, nf, c1, &grid).1 <= 0.0;
    let mut hi = 1.0;
    while !feasible(hi) {
        hi *= 4.0;
        if hi > C1_CEILING {
            let (worst_s, _) = worst_deficit(bounds, nf, C1_CEILING, &grid);
            let curve = grid
                .iter()
                .map(|&s| (s, deficit(bounds, nf, C1_CEILING, s)))
                .collect();
            return Ok(CompletenessCertificate {
                feasible: false,
                c1: C1_CEILING,
                n,
                worst_s,
                deficit_curve: curve,
            });
        }
    }
    let mut lo = 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let c1 = hi;
    let (worst_s, _) = worst_deficit(bounds, nf, c1, &grid);
    let curve = grid.iter().map(|&s| (s, deficit(bounds, nf, c1, s))).collect();
    Ok(CompletenessCertificate {
        feasible: true,
        c1,
        n,
        worst_s,
        deficit_curve: curve,
    })
}

/// Residuals of the Lyapunov identity `G''(s) = (c1^2 s^2 + c1) G(s)` for
/// `G(s) = exp(c1 s^2 / 2)`: the analytic residual (exactly zero, since
/// G'' = c1 G + (c1 s)(c1 s G)) and a centered finite-difference residual,
/// both maximized over the grid. Residuals are relative to G(s).
pub fn g_identity_check(c1: f64, s_grid: &[f64], h: f64) -> Result<(f64, f64)> {
    if c1 < 0.0 || !(h > 0.0) {
        return Err(Error::Config(format!("need c1 >= 0 and h > 0, got c1 = {c1}, h = {h}")));
    }
    let g = |s: f64| (c1 * s * s / 2.0).exp();
    let mut analytic: f64 = 0.0;
    let mut fd: f64 = 0.0;
    for &s in s_grid {
        let gs = g(s);
        let coeff = c1 * c1 * s * s + c1;
        let g2_analytic = (c1 * c1 * s * s + c1) * gs;
        analytic = analytic.max((g2_analytic - coeff * gs).abs() / gs);
        let g2_fd = (g(s + h) - 2.0 * gs + g(s - h)) / (h * h);
        fd = fd.max((g2_fd - coeff * gs).abs() / gs);
    }
    Ok((analytic, fd))
}

/// Outcome of the barrier-process non-explosion probe.
#[derive(Clone, Debug)]
pub struct ExplosionProbe {
    /// largest value of the barrier process over all paths and steps
    pub max_sup: f64,
    /// fraction of paths that ever exceed the mean-plus-6-sigma envelope
    pub envelope_exceedance: f64,
    /// every path stayed finite and the exceedance fraction is below 1e-2
    pub finite: bool,
}

/// Simulates the comparison barrier `d r = sigma d beta + (n c1 r + C0) dt`
/// with the exact Gaussian recursion and checks every path against the
/// closed-form envelope `e^{n c1 t} (r0 + C0 t + 6 sqrt(sigma^2 t))`, which
/// dominates the exact mean plus six standard deviations.
pub fn explosion_probe(
    certificate: &CompletenessCertificate,
    c0: f64,
    r0: f64,
    sigma2: f64,
    config: &SimConfig,
) -> Result<ExplosionProbe> {
    if !certificate.feasible {
        return Err(Error::Config("explosion probe requires a feasible certificate".into()));
    }
    let c1 = certificate.c1;
    let n = certificate.n;
    let paths = barrier_path(c1, c0, n, r0, sigma2, config)?;
    let nc = n as f64 * c1;
    let mut max_sup = f64::NEG_INFINITY;
    let mut exceeded = 0usize;
    for path in &paths {
        let mut over = false;
        for (k, &v) in path.iter().enumerate() {
            if !v.is_finite() {
                return Ok(ExplosionProbe {
                    max_sup: f64::INFINITY,
                    envelope_exceedance: 1.0,
                    finite: false,
                });
            }
            max_sup = max_sup.max(v);
            if k > 0 {
                let t = k as f64 * config.dt;
                let envelope = (nc * t).exp() * (r0 + c0 * t + 6.0 * (sigma2 * t).sqrt());
                if v > envelope {
                    over = true;
                }
            }
        }
        if over {
            exceeded += 1;
        }
    }
    let frac = exceeded as f64 / paths.len() as f64;
    Ok(ExplosionProbe {
        max_sup,
        envelope_exceedance: frac,
        finite: frac < 1e-2,
    })
}
