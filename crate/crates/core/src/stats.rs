//! Statistical machinery: empirical stochastic-dominance tests with DKW
//! margins, confidence intervals, quadratic-variation summaries, log-log
//! slope fits, and the iterated-logarithm statistic.

use crate::error::{Error, Result};

/// Outcome of an empirical first-order dominance comparison at a set of
/// thresholds. `lhs` should dominate in the sense that the lhs sample is
/// stochastically smaller: `F_lhs(s) >= F_rhs(s)` for every threshold `s`.
#[derive(Clone, Debug)]
pub struct DominanceReport {
    pub thresholds: Vec<f64>,
    pub cdf_lhs: Vec<f64>,
    pub cdf_rhs: Vec<f64>,
    /// per-threshold margin subtracted from the rhs CDF before comparison
    pub margin: f64,
    /// worst signed violation max_s (F_rhs(s) - margin - F_lhs(s)), clamped at 0
    pub worst_violation: f64,
    pub pass: bool,
}

/// Two-sided DKW margin at confidence `1 - delta` for a sample of size `n`.
pub fn dkw_margin(n: usize, delta: f64) -> Result<f64> {
    if n == 0 || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Config(format!(
            "need n > 0 and delta in (0,1), got n = {n}, delta = {delta}"
        )));
    }
    Ok(((2.0 / delta).ln() / (2.0 * n as f64)).sqrt())
}

/// Empirical sub-distribution value `#{ x in sample : alive and x < s } / n`.
/// Censored entries (`alive = false`, e.g. paths that exited before the
/// comparison time) count on neither side, which only strengthens the lhs
/// requirement.
fn censored_cdf(sample: &[f64], alive: &[bool], s: f64) -> f64 {
    let hits = sample
        .iter()
        .zip(alive)
        .filter(|(x, a)| **a && **x < s)
        .count();
    hits as f64 / sample.len() as f64
}

/// First-order stochastic dominance check: passes when the lhs empirical CDF
/// sits above the rhs CDF minus the combined DKW margin at every threshold.
pub fn dominance_test(
    lhs: &[f64],
    lhs_alive: &[bool],
    rhs: &[f64],
    rhs_alive: &[bool],
    thresholds: &[f64],
    delta: f64,
) -> Result<DominanceReport> {
    if lhs.is_empty() || rhs.is_empty() {
        return Err(Error::Config("dominance test requires nonempty samples".into()));
    }
    if lhs.len() != lhs_alive.len() || rhs.len() != rhs_alive.len() {
        return Err(Error::Dimension("sample and alive-mask lengths differ".into()));
    }
    if thresholds.is_empty() {
        return Err(Error::Config("dominance test requires thresholds".into()));
    }
    let margin = dkw_margin(lhs.len(), delta / 2.0)? + dkw_margin(rhs.len(), delta / 2.0)?;
    let mut cdf_lhs = Vec::with_capacity(thresholds.len());
    let mut cdf_rhs = Vec::with_capacity(thresholds.len());
    let mut worst: f64 = 0.0;
    for &s in thresholds {
        let fl = censored_cdf(lhs, lhs_alive, s);
        let fr = censored_cdf(rhs, rhs_alive, s);
        worst = worst.max(fr - margin - fl);
        cdf_lhs.push(fl);
        cdf_rhs.push(fr);
    }
    Ok(DominanceReport {
        thresholds: thresholds.to_vec(),
        cdf_lhs,
        cdf_rhs,
        margin,
        worst_violation: worst.max(0.0),
        pass: worst <= 0.0,
    })
}

/// Kolmogorov-Smirnov distance between two empirical CDFs evaluated on the
/// merged sample points (no censoring).
pub fn ks_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Config("ks_distance requires nonempty samples".into()));
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.total_cmp(y));
    sb.sort_by(|x, y| x.total_cmp(y));
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < sa.len() && j < sb.len() {
        if sa[i] < sb[j] {
            i += 1;
        } else if sb[j] < sa[i] {
            j += 1;
        } else {
            // advance past the tied value in both samples at once
            let v = sa[i];
            while i < sa.len() && sa[i] == v {
                i += 1;
            }
            while j < sb.len() && sb[j] == v {
                j += 1;
            }
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d.max(1.0 - (i as f64 / na).min(j as f64 / nb)).min(1.0))
}

/// Sample mean with a normal-approximation confidence interval half-width at
/// the given z score (z = 1.96 for 95%).
pub fn mean_with_ci(sample: &[f64], z: f64) -> Result<(f64, f64)> {
    if sample.len() < 2 {
        return Err(Error::Config("need at least two observations".into()));
    }
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let var = sample.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    Ok((mean, z * (var / n).sqrt()))
}

/// Least-squares slope of `ln y` against `ln x`, with the standard error of
/// the slope. Points with nonpositive coordinates are rejected.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::Dimension("loglog_slope input lengths differ".into()));
    }
    if xs.len() < 3 {
        return Err(Error::Config("loglog_slope needs at least three points".into()));
    }
    if xs.iter().chain(ys).any(|v| *v <= 0.0) {
        return Err(Error::Domain("loglog_slope requires positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Config("loglog_slope abscissae are constant".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let stderr = if lx.len() > 2 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok((slope, stderr))
}

/// Iterated-logarithm surrogate: the fraction of terminal radii exceeding
/// `factor * sqrt(2 t ln ln t)`. The limsup statement itself is asymptotic
/// and not falsifiable at finite horizon; at fixed t this fraction is only
/// meaningful relative to the same fraction for the dominating comparison
/// diffusion, so callers should compare the two rather than test against an
/// absolute level.
pub fn lil_statistic(radii: &[f64], t: f64, factor: f64) -> Result<f64> {
    if !(t > std::f64::consts::E) {
        return Err(Error::Domain(format!(
            "lil_statistic needs t > e so that ln ln t > 0, got {t}"
        )));
    }
    if radii.is_empty() || !(factor > 0.0) {
        return Err(Error::Config("lil_statistic needs samples and factor > 0".into()));
    }
    let level = factor * (2.0 * t * t.ln().ln()).sqrt();
    let count = radii.iter().filter(|&&r| r > level).count();
    Ok(count as f64 / radii.len() as f64)
}

/// Realized quadratic variation of a sampled path, `sum (x_{i+1} - x_i)^2`.
pub fn realized_qv(path: &[f64]) -> f64 {
    path.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum()
}
