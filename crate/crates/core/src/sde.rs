//! Reproducible batch simulation: 1D comparison diffusions with singular
//! drift, exact Bessel-type terminal sampling, group horizontal Brownian
//! motion, and the exactly-sampled linear barrier process.

use crate::drifts::SasakianModelSpec;
use crate::error::{Error, Result};
use crate::groups::{
    cc_distance, cc_distance_upper_bound, horizontal_bm_step, GroupPoint, GroupSpec,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::io::{Read, Write};

/// Per-stream RNG keyed by (master seed, stream index). Streams are
/// independent and assignment to workers cannot change the draws.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    // SplitMix64 expansion of the (seed, index) pair into a 256-bit key
    let mut state = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let mut next = || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&next().to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Simulation batch parameters.
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub dt: f64,
    pub horizon: f64,
    pub n_paths: usize,
    pub seed: u64,
    /// Safety clamp for the positive-root implicit step; the scheme itself
    /// preserves positivity, the floor only guards degenerate parameters.
    pub r_floor: f64,
    /// Apply the half-step Brownian-bridge crossing correction when testing
    /// the absorbing level.
    pub bridge_correction: bool,
}

impl SimConfig {
    pub fn new(dt: f64, horizon: f64, n_paths: usize, seed: u64) -> Result<Self> {
        if !(dt > 0.0) || !(horizon >= 0.0) || n_paths == 0 {
            return Err(Error::Config(format!(
                "need dt > 0, horizon >= 0, n_paths >= 1; got dt = {dt}, horizon = {horizon}, n_paths = {n_paths}"
            )));
        }
        Ok(Self { dt, horizon, n_paths, seed, r_floor: 1e-8, bridge_correction: false })
    }

    pub fn n_steps(&self) -> usize {
        (self.horizon / self.dt).round().max(1.0) as usize
    }
}

/// Ensemble of radial path observables.
#[derive(Clone, Debug)]
pub struct RadialBatch {
    /// Radius at the horizon; for absorbed paths, the absorbing level.
    pub terminal_values: Vec<f64>,
    /// First time the radius reached R, linearly interpolated; None if never.
    pub hit_times: Vec<Option<f64>>,
    /// Realized quadratic variation of the radial readout on the recorded
    /// sub-partition.
    pub qv: Vec<f64>,
    /// True while t < tau_R at the horizon.
    pub alive_mask: Vec<bool>,
    /// Fraction of steps that hit the positivity floor.
    pub floor_fraction: f64,
}

impl RadialBatch {
    fn collect(paths: Vec<PathOutcome>, n_steps: usize) -> Self {
        let n = paths.len();
        let mut out = RadialBatch {
            terminal_values: Vec::with_capacity(n),
            hit_times: Vec::with_capacity(n),
            qv: Vec::with_capacity(n),
            alive_mask: Vec::with_capacity(n),
            floor_fraction: 0.0,
        };
        let mut clamped = 0u64;
        for p in paths {
            out.terminal_values.push(p.terminal);
            out.hit_times.push(p.hit_time);
            out.qv.push(p.qv);
            out.alive_mask.push(p.hit_time.is_none());
            clamped += p.floor_hits;
        }
        out.floor_fraction = clamped as f64 / (n as f64 * n_steps as f64);
        out
    }
}

struct PathOutcome {
    terminal: f64,
    hit_time: Option<f64>,
    qv: f64,
    floor_hits: u64,
}

fn checkpoint_stride(n_steps: usize) -> usize {
    // dyadic sub-partition with at most 1024 cells
    let n_cp = 1usize << 63usize.min((n_steps as f64).log2().floor() as usize).min(10);
    (n_steps / n_cp).max(1)
}

/// Euler-Maruyama for `d xi = drift(xi) dt + sqrt(2) d beta` with the `a/r`
/// singular part handled drift-implicitly (positive root of the per-step
/// quadratic), absorbed at `R`.
pub fn simulate_radial_paths(
    spec: &SasakianModelSpec,
    r0: f64,
    absorb_at: f64,
    config: &SimConfig,
) -> Result<RadialBatch> {
    if !(r0 >= 0.0) || r0 > absorb_at {
        return Err(Error::Config(format!("need 0 <= r0 <= R, got r0 = {r0}, R = {absorb_at}")));
    }
    if let Some(limit) = spec.domain_limit() {
        if absorb_at > limit {
            return Err(Error::Domain(format!(
                "absorbing level R = {absorb_at} beyond drift domain limit {limit}"
            )));
        }
    }
    let n_steps = config.n_steps();
    let stride = checkpoint_stride(n_steps);
    let a = spec.singular_coefficient();
    let spec = spec.clone();
    let cfg = config.clone();
    let outcomes: Vec<Result<PathOutcome>> = (0..config.n_paths)
        .into_par_iter()
        .map(|path| {
            let mut rng = stream_rng(cfg.seed, path as u64);
            let dt = cfg.dt;
            let sq2dt = (2.0 * dt).sqrt();
            let mut r = r0;
            if r >= absorb_at {
                return Ok(PathOutcome { terminal: r, hit_time: Some(0.0), qv: 0.0, floor_hits: 0 });
            }
            let mut hit_time = None;
            let mut floor_hits = 0u64;
            let mut qv = 0.0;
            let mut last_cp = r;
            for step in 0..n_steps {
                // bounded remainder of the drift; the a/r part goes implicit
                let g = if r > 0.0 { spec.drift(r)? - a / r } else { 0.0 };
                let noise: f64 = rng.sample(StandardNormal);
                let c = r + g * dt + sq2dt * noise;
                let mut r_new = 0.5 * (c + (c * c + 4.0 * a * dt).sqrt());
                if r_new < cfg.r_floor {
                    r_new = cfg.r_floor;
                    floor_hits += 1;
                }
                if r_new >= absorb_at {
                    let frac = if r_new > r { (absorb_at - r) / (r_new - r) } else { 1.0 };
                    hit_time = Some((step as f64 + frac) * dt);
                    r = absorb_at;
                    qv += (r - last_cp) * (r - last_cp);
                    break;
                }
                if cfg.bridge_correction && absorb_at.is_finite() {
                    // bridge crossing probability for diffusivity sigma^2 = 2:
                    // exp(-2 (R - a)(R - b) / (sigma^2 dt))
                    let p_cross = (-(absorb_at - r) * (absorb_at - r_new) / dt).exp();
                    if rng.gen::<f64>() < p_cross {
                        hit_time = Some((step as f64 + 0.5) * dt);
                        r = absorb_at;
                        qv += (r - last_cp) * (r - last_cp);
                        break;
                    }
                }
                r = r_new;
                if (step + 1) % stride == 0 {
                    qv += (r - last_cp) * (r - last_cp);
                    last_cp = r;
                }
            }
            Ok(PathOutcome { terminal: r, hit_time, qv, floor_hits })
        })
        .collect();
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(RadialBatch::collect(outcomes, n_steps))
}

/// Exact terminal sampling of the Bessel-type comparison process: the norm of
/// a d-dimensional Gaussian with mean `r0 e_1` and per-coordinate variance 2t.
pub fn sample_radial_exact(d: usize, r0: f64, t: f64, n_paths: usize, seed: u64) -> Result<Vec<f64>> {
    if d < 1 {
        return Err(Error::Config("dimension must be >= 1".into()));
    }
    let sd = (2.0 * t).sqrt();
    Ok((0..n_paths)
        .into_par_iter()
        .map(|path| {
            let mut rng = stream_rng(seed, path as u64);
            let mut s = 0.0;
            for i in 0..d {
                let mean = if i == 0 { r0 } else { 0.0 };
                let v: f64 = rng.sample::<f64, _>(StandardNormal) * sd + mean;
                s += v * v;
            }
            s.sqrt()
        })
        .collect())
}

/// Result of a group simulation: radial observables plus, when requested,
/// the CC radius of each path on the checkpoint sub-partition.
pub struct GroupSimResult {
    pub batch: RadialBatch,
    pub checkpoint_dt: f64,
    pub radii_checkpoints: Option<Vec<Vec<f64>>>,
}

/// Horizontal Brownian motion on a step-2 Carnot group, absorbed at CC radius
/// `absorb_at` (may be infinite), with the radial readout recorded on a
/// dyadic sub-partition.
pub fn simulate_group_paths(
    spec: &GroupSpec,
    start: &GroupPoint,
    absorb_at: f64,
    config: &SimConfig,
    record_checkpoints: bool,
) -> Result<GroupSimResult> {
    let n_steps = config.n_steps();
    let stride = checkpoint_stride(n_steps);
    let spec = spec.clone();
    let start = start.clone();
    let cfg = config.clone();
    let d_start = cc_distance(&start, &spec)?;
    struct GroupOutcome {
        outcome: PathOutcome,
        radii: Option<Vec<f64>>,
    }
    let runs: Vec<Result<GroupOutcome>> = (0..config.n_paths)
        .into_par_iter()
        .map(|path| {
            let mut rng = stream_rng(cfg.seed, path as u64);
            let dt = cfg.dt;
            let sdt = dt.sqrt();
            let mut p = start.clone();
            let mut d_prev = d_start;
            let mut hit_time = None;
            let mut qv = 0.0;
            let mut last_cp = d_start;
            let mut radii = record_checkpoints.then(|| {
                let mut v = Vec::with_capacity(n_steps / stride + 1);
                v.push(d_start);
                v
            });
            let mut dw = vec![0.0; spec.n];
            for step in 0..n_steps {
                for w in dw.iter_mut() {
                    *w = rng.sample::<f64, _>(StandardNormal) * sdt;
                }
                p = horizontal_bm_step(&p, &dw, &spec)?;
                let checkpoint = (step + 1) % stride == 0;
                let must_check_hit =
                    absorb_at.is_finite() && cc_distance_upper_bound(&p) >= absorb_at;
                if checkpoint || must_check_hit {
                    let d = cc_distance(&p, &spec)?;
                    if absorb_at.is_finite() && d >= absorb_at {
                        let frac = if d > d_prev { (absorb_at - d_prev) / (d - d_prev) } else { 1.0 };
                        // d_prev may be a checkpoint ago; interpolate within the step
                        hit_time = Some((step as f64 + frac.clamp(0.0, 1.0)) * dt);
                        qv += (absorb_at - last_cp) * (absorb_at - last_cp);
                        if let Some(r) = radii.as_mut() {
                            r.push(absorb_at);
                        }
                        d_prev = absorb_at;
                        break;
                    }
                    d_prev = d;
                    if checkpoint {
                        qv += (d - last_cp) * (d - last_cp);
                        last_cp = d;
                        if let Some(r) = radii.as_mut() {
                            r.push(d);
                        }
                    }
                }
            }
            let terminal = if hit_time.is_some() { absorb_at } else { d_prev };
            Ok(GroupOutcome {
                outcome: PathOutcome { terminal, hit_time, qv, floor_hits: 0 },
                radii,
            })
        })
        .collect();
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let mut outcomes = Vec::with_capacity(runs.len());
    let mut all_radii = record_checkpoints.then(|| Vec::with_capacity(runs.len()));
    for r in runs {
        outcomes.push(r.outcome);
        if let (Some(all), Some(radii)) = (all_radii.as_mut(), r.radii) {
            all.push(radii);
        }
    }
    Ok(GroupSimResult {
        batch: RadialBatch::collect(outcomes, n_steps),
        checkpoint_dt: stride as f64 * config.dt,
        radii_checkpoints: all_radii,
    })
}

/// First crossing of `level` by a sampled path, linearly interpolated within
/// the step; `None` when the path never reaches the level.
pub fn first_hitting_time(radii: &[f64], dt: f64, level: f64) -> Option<f64> {
    if radii.is_empty() {
        return None;
    }
    if radii[0] >= level {
        return Some(0.0);
    }
    for k in 1..radii.len() {
        if radii[k] >= level {
            let frac = (level - radii[k - 1]) / (radii[k] - radii[k - 1]);
            return Some(((k - 1) as f64 + frac) * dt);
        }
    }
    None
}

/// Samples the linear barrier SDE `d r = sigma d beta + (n c1 r + C0) dt`
/// exactly at the step times via its closed-form Gaussian transition.
/// Returns one value per step per path, including the initial value.
pub fn barrier_path(
    c1: f64,
    c0: f64,
    n: usize,
    r0: f64,
    sigma2: f64,
    config: &SimConfig,
) -> Result<Vec<Vec<f64>>> {
    if !(c1 > 0.0) || c0 < 0.0 {
        return Err(Error::Config(format!("need c1 > 0 and C0 >= 0, got c1 = {c1}, C0 = {c0}")));
    }
    if sigma2 != 1.0 && sigma2 != 2.0 {
        return Err(Error::Config(format!("sigma^2 must be 1 or 2, got {sigma2}")));
    }
    let n_steps = config.n_steps();
    let nc = n as f64 * c1;
    let dt = config.dt;
    let growth = (nc * dt).exp();
    let drift_gain = c0 * (growth - 1.0) / nc;
    let noise_sd = (sigma2 * (growth * growth - 1.0) / (2.0 * nc)).sqrt();
    let seed = config.seed;
    Ok((0..config.n_paths)
        .into_par_iter()
        .map(|path| {
            let mut rng = stream_rng(seed, path as u64);
            let mut v = Vec::with_capacity(n_steps + 1);
            let mut r = r0;
            v.push(r);
            for _ in 0..n_steps {
                let xi: f64 = rng.sample(StandardNormal);
                r = growth * r + drift_gain + noise_sd * xi;
                v.push(r);
            }
            v
        })
        .collect())
}

/// Per-path realized quadratic variation of the CC radius `d_0(xi_t)`,
/// accumulated at full step resolution. The checkpointed batches coarsen the
/// partition, which adds O(1/sqrt(cells)) noise per path; the quadratic
/// variation bound check needs the fluctuation of every single path under a
/// few percent, hence this dedicated accumulator. No absorption.
pub fn simulate_distance_qv(spec: &GroupSpec, config: &SimConfig) -> Result<Vec<f64>> {
    let n_steps = config.n_steps();
    let spec = spec.clone();
    let cfg = config.clone();
    (0..config.n_paths)
        .into_par_iter()
        .map(|path| {
            let mut rng = stream_rng(cfg.seed, path as u64);
            let sdt = cfg.dt.sqrt();
            let mut p = GroupPoint::identity(&spec);
            let mut d_prev = 0.0;
            let mut qv = 0.0;
            let mut dw = vec![0.0; spec.n];
            for _ in 0..n_steps {
                for v in dw.iter_mut() {
                    *v = sdt * rng.sample::<f64, _>(StandardNormal);
                }
                p = horizontal_bm_step(&p, &dw, &spec)?;
                let d = cc_distance(&p, &spec)?;
                qv += (d - d_prev) * (d - d_prev);
                d_prev = d;
            }
            Ok(qv)
        })
        .collect()
}

/// Writes the documented little-endian path dump: header
/// `{n_paths: u64, n_steps: u64, dt: f64}` then row-major `f64` radii.
pub fn write_path_dump<W: Write>(mut w: W, radii: &[Vec<f64>], dt: f64) -> Result<()> {
    let n_paths = radii.len() as u64;
    let n_steps = radii.first().map_or(0, |r| r.len()) as u64;
    w.write_all(&n_paths.to_le_bytes())?;
    w.write_all(&n_steps.to_le_bytes())?;
    w.write_all(&dt.to_le_bytes())?;
    for row in radii {
        if row.len() as u64 != n_steps {
            return Err(Error::Dimension("ragged path matrix in dump".into()));
        }
        for v in row {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Reads a path dump written by [`write_path_dump`].
pub fn read_path_dump<R: Read>(mut r: R) -> Result<(Vec<Vec<f64>>, f64)> {
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let n_paths = u64::from_le_bytes(b8) as usize;
    r.read_exact(&mut b8)?;
    let n_steps = u64::from_le_bytes(b8) as usize;
    r.read_exact(&mut b8)?;
    let dt = f64::from_le_bytes(b8);
    let mut rows = Vec::with_capacity(n_paths);
    for _ in 0..n_paths {
        let mut row = Vec::with_capacity(n_steps);
        for _ in 0..n_steps {
            r.read_exact(&mut b8)?;
            row.push(f64::from_le_bytes(b8));
        }
        rows.push(row);
    }
    Ok((rows, dt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drifts::SasakianModelSpec;

    #[test]
    fn rng_streams_are_reproducible_and_distinct() {
        let a: Vec<f64> = (0..8).map(|_| stream_rng(1, 0).gen()).collect();
        let b: f64 = stream_rng(1, 0).gen();
        assert_eq!(a[0], b);
        assert_ne!(stream_rng(1, 0).gen::<u64>(), stream_rng(1, 1).gen::<u64>());
        assert_ne!(stream_rng(1, 0).gen::<u64>(), stream_rng(2, 0).gen::<u64>());
    }

    #[test]
    fn exact_sampler_moments() {
        // E|v|^2 = 2 d t for r0 = 0
        let t = 0.3;
        let vals = sample_radial_exact(5, 0.0, t, 40_000, 42).unwrap();
        let m2 = vals.iter().map(|v| v * v).sum::<f64>() / vals.len() as f64;
        assert!((m2 - 10.0 * t).abs() < 0.05, "m2 = {m2}");
        // t = 0 returns r0 exactly
        let v0 = sample_radial_exact(3, 1.25, 0.0, 10, 1).unwrap();
        assert!(v0.iter().all(|&v| v == 1.25));
        // d = 1 from 0 is half-normal: mean = sqrt(2 * 2t / pi)
        let v1 = sample_radial_exact(1, 0.0, 0.5, 40_000, 3).unwrap();
        let mean = v1.iter().sum::<f64>() / v1.len() as f64;
        let expect = (2.0 * 1.0 / std::f64::consts::PI).sqrt();
        assert!((mean - expect).abs() < 0.01, "mean {mean} vs {expect}");
    }

    #[test]
    fn em_second_moment_matches_ito() {
        // n = 2, k = 0 from 0: E xi_t^2 = 2 (n+3) t = 10 t
        let spec = SasakianModelSpec::sasakian(2, 0.0, 0.0).unwrap();
        let t = 0.2;
        let config = SimConfig::new(1e-3, t, 20_000, 7).unwrap();
        let batch = simulate_radial_paths(&spec, 0.0, f64::INFINITY, &config).unwrap();
        let m2 = batch.terminal_values.iter().map(|v| v * v).sum::<f64>()
            / batch.terminal_values.len() as f64;
        assert!((m2 - 10.0 * t).abs() < 0.06, "m2 = {m2}");
        assert!(batch.alive_mask.iter().all(|&a| a));
        assert!(batch.terminal_values.iter().all(|v| v.is_finite() && *v > 0.0));
    }

    #[test]
    fn immediate_absorption_at_start_level() {
        let spec = SasakianModelSpec::sasakian(2, 0.0, 0.0).unwrap();
        let config = SimConfig::new(1e-3, 0.1, 8, 1).unwrap();
        let batch = simulate_radial_paths(&spec, 1.0, 1.0, &config).unwrap();
        assert!(batch.hit_times.iter().all(|h| *h == Some(0.0)));
    }

    #[test]
    fn positivity_floor_rarely_touched() {
        let spec = SasakianModelSpec::sasakian(2, 0.0, 0.0).unwrap();
        let config = SimConfig::new(1e-3, 0.2, 5_000, 11).unwrap();
        let batch = simulate_radial_paths(&spec, 0.5, f64::INFINITY, &config).unwrap();
        assert!(batch.floor_fraction < 1e-3, "floor fraction {}", batch.floor_fraction);
    }

    #[test]
    fn bessel_mean_exit_time() {
        // d = 5 from 0, R = 1: E tau = R^2 / (2 d) = 0.1
        let spec = SasakianModelSpec::sasakian(2, 0.0, 0.0).unwrap();
        let mut config = SimConfig::new(2e-4, 2.0, 20_000, 5).unwrap();
        // without the bridge correction the overshoot bias alone is ~3e-3
        config.bridge_correction = true;
        let batch = simulate_radial_paths(&spec, 0.0, 1.0, &config).unwrap();
        let mean: f64 = batch
            .hit_times
            .iter()
            .map(|h| h.expect("every path exits well before horizon"))
            .sum::<f64>()
            / batch.hit_times.len() as f64;
        assert!((mean - 0.1).abs() < 0.002, "mean exit {mean}");
    }

    #[test]
    fn reproducible_across_worker_counts() {
        let spec = SasakianModelSpec::sasakian(2, 0.0, 0.0).unwrap();
        let config = SimConfig::new(1e-3, 0.1, 500, 99).unwrap();
        let run = || {
            let b = simulate_radial_paths(&spec, 0.5, 2.0, &config).unwrap();
            (b.terminal_values, b.hit_times, b.qv)
        };
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = pool1.install(run);
        let b = pool4.install(run);
        assert_eq!(a, b);
        let c = pool4.install(run);
        assert_eq!(a, c);
    }

    #[test]
    fn hitting_time_interpolation() {
        assert_eq!(first_hitting_time(&[0.1, 0.2, 0.3], 0.5, 1.0), None);
        let t = first_hitting_time(&[0.0, 0.5, 1.5], 0.1, 1.0).unwrap();
        assert!((t - 0.15).abs() < 1e-12);
        assert_eq!(first_hitting_time(&[2.0, 0.0], 0.1, 1.0), Some(0.0));
    }

    #[test]
    fn group_paths_basic_moments() {
        let spec = GroupSpec::heisenberg();
        let start = GroupPoint::identity(&spec);
        let t = 0.25;
        let config = SimConfig::new(1e-3, t, 10_000, 21).unwrap();
        let res = simulate_group_paths(&spec, &start, f64::INFINITY, &config, false).unwrap();
        let m2 = res.batch.terminal_values.iter().map(|v| v * v).sum::<f64>()
            / res.batch.terminal_values.len() as f64;
        // bracket 4t <= E d0^2 <= 10t, with slack for MC noise
        assert!(m2 > 4.0 * t - 0.05 && m2 < 10.0 * t + 0.05, "E d0^2 = {m2}");
    }

    #[test]
    fn barrier_process_matches_closed_form_mean() {
        let (c1, c0, n, r0) = (1.0, 1.0, 2usize, 0.5);
        let t = 0.5;
        let config = SimConfig::new(0.05, t, 40_000, 77).unwrap();
        let paths = barrier_path(c1, c0, n, r0, 1.0, &config).unwrap();
        let nc = n as f64 * c1;
        let mean_formula = (nc * t).exp() * (r0 + c0 * (1.0 - (-nc * t).exp()) / nc);
        let last = paths.iter().map(|p| *p.last().unwrap()).sum::<f64>() / paths.len() as f64;
        assert!((last - mean_formula).abs() < 0.05, "mean {last} vs {mean_formula}");
        assert!(paths.iter().flatten().all(|v| v.is_finite()));
        // small-c1, C0 = 0 limit: Var -> sigma^2 t
        let cfg2 = SimConfig::new(0.05, t, 40_000, 78).unwrap();
        let p2 = barrier_path(1e-6, 0.0, 1, 0.0, 2.0, &cfg2).unwrap();
        let var = p2.iter().map(|p| p.last().unwrap().powi(2)).sum::<f64>() / p2.len() as f64;
        assert!((var - 2.0 * t).abs() < 0.03, "var {var}");
    }

    #[test]
    fn path_dump_roundtrip() {
        let radii = vec![vec![0.0, 1.0, 2.0], vec![0.5, 0.25, 0.125]];
        let mut buf = Vec::new();
        write_path_dump(&mut buf, &radii, 0.01).unwrap();
        // header layout: 8 + 8 + 8 bytes then 6 doubles
        assert_eq!(buf.len(), 24 + 6 * 8);
        assert_eq!(u64::from_le_bytes(buf[0..8].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 3);
        let (back, dt) = read_path_dump(&buf[..]).unwrap();
        assert_eq!(back, radii);
        assert_eq!(dt, 0.01);
    }
}
