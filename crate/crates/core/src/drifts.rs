//! Radial drift and sub-Laplacian bound functions for the 1D comparison
//! diffusions: the Riemannian and Sasakian branch functions, H-type and
//! warped-model drifts, and the foliation curvature bounds.

use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::sync::Arc;
use std::sync::OnceLock;

/// Series cutoff for `f_rie`: below `x = r sqrt(|k|) = 1e-3` the cot/coth
/// branches collapse to their shared Taylor expansion in `u = k r^2`.
const SERIES_CUTOFF: f64 = 1e-3;

/// Series cutoff for `f_sas`, much larger than the `f_rie` one: the direct
/// formula subtracts to an O(x^4) denominator, so its relative error grows
/// like eps/x^4 and is still ~1e-9 at x = 0.05, while the series truncation
/// error at u = x^2 = 2.5e-3 is far below machine precision.
const SAS_SERIES_CUTOFF: f64 = 0.05;

/// Riemannian comparison drift.
///
/// `sqrt(k) cot(sqrt(k) r)` for `k > 0`, `1/r` for `k = 0`,
/// `sqrt(|k|) coth(sqrt(|k|) r)` for `k < 0`.
pub fn f_rie(r: f64, k: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("f_rie requires r > 0, got r = {r}")));
    }
    let u = k * r * r; // signed (r sqrt|k|)^2
    if u.abs() < SERIES_CUTOFF * SERIES_CUTOFF {
        // cot/coth share one analytic series in the signed variable u
        return Ok((1.0 - u / 3.0 - u * u / 45.0 - 2.0 * u * u * u / 945.0) / r);
    }
    if k > 0.0 {
        let sk = k.sqrt();
        if r >= PI / sk {
            return Err(Error::Domain(format!(
                "f_rie(r={r}, k={k}): r beyond first pole pi/sqrt(k) = {}",
                PI / sk
            )));
        }
        Ok(sk / (sk * r).tan())
    } else {
        let sk = (-k).sqrt();
        Ok(sk / (sk * r).tanh())
    }
}

/// Largest admissible radius for `f_rie(., k)`; `None` when unbounded.
pub fn f_rie_domain_limit(k: f64) -> Option<f64> {
    (k > 0.0).then(|| PI / k.sqrt())
}

/// First positive root of `x -> 2 - 2 cos x - x sin x`, located by bisection.
/// The denominator of the positive-curvature Sasakian branch vanishes there.
fn sas_denominator_root() -> f64 {
    static ROOT: OnceLock<f64> = OnceLock::new();
    *ROOT.get_or_init(|| {
        let d = |x: f64| 2.0 - 2.0 * x.cos() - x * x.sin();
        let (mut lo, mut hi) = (PI, 2.0 * PI + 1.0);
        debug_assert!(d(lo) > 0.0 && d(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if d(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    })
}

/// Largest admissible radius for `f_sas(., k)`; `None` when unbounded.
pub fn f_sas_domain_limit(k: f64) -> Option<f64> {
    (k > 0.0).then(|| sas_denominator_root() / k.sqrt())
}

/// Sasakian comparison drift.
///
/// Three-branch formula with `4/r` at `k = 0`; the `k > 0` branch is only
/// defined up to the first root of its denominator.
pub fn f_sas(r: f64, k: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("f_sas requires r > 0, got r = {r}")));
    }
    let u = k * r * r;
    if u.abs() < SAS_SERIES_CUTOFF * SAS_SERIES_CUTOFF {
        return Ok(4.0 * (1.0 - u / 30.0 - 11.0 * u * u / 25200.0 - u * u * u / 108000.0) / r);
    }
    if k > 0.0 {
        let sk = k.sqrt();
        let x = sk * r;
        if x >= sas_denominator_root() {
            return Err(Error::Domain(format!(
                "f_sas(r={r}, k={k}): r beyond denominator root r* = {}",
                sas_denominator_root() / sk
            )));
        }
        Ok(sk * (x.sin() - x * x.cos()) / (2.0 - 2.0 * x.cos() - x * x.sin()))
    } else {
        let sk = (-k).sqrt();
        let x = sk * r;
        if x > 20.0 {
            // scale out e^x to avoid cosh overflow
            let e2 = (-2.0 * x).exp();
            let num = (x - 1.0) + (x + 1.0) * e2;
            let den = (x - 2.0) + 4.0 * (-x).exp() - (x + 2.0) * e2;
            Ok(sk * num / den)
        } else {
            Ok(sk * (x * x.cosh() - x.sinh()) / (2.0 - 2.0 * x.cosh() + x * x.sinh()))
        }
    }
}

/// A Greene-Wu warping function together with its first two derivatives.
#[derive(Clone)]
pub struct WarpingModel {
    pub h: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub h_prime: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub h_second: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl WarpingModel {
    pub fn new(
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
        h_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        h_second: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            h: Arc::new(h),
            h_prime: Arc::new(h_prime),
            h_second: Arc::new(h_second),
        }
    }

    /// Flat model, `h(r) = r`.
    pub fn flat() -> Self {
        Self::new(|r| r, |_| 1.0, |_| 0.0)
    }

    /// Hyperbolic model, `h = sinh`, radial curvature -1.
    pub fn hyperbolic() -> Self {
        Self::new(f64::sinh, f64::cosh, f64::sinh)
    }

    /// Spherical model, `h = sin`, radial curvature +1.
    pub fn spherical() -> Self {
        Self::new(f64::sin, f64::cos, |r| -r.sin())
    }
}

impl std::fmt::Debug for WarpingModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WarpingModel").finish_non_exhaustive()
    }
}

/// Which 1D comparison diffusion a [`SasakianModelSpec`] describes.
#[derive(Clone, Debug)]
pub enum DriftKind {
    Sasakian,
    HType { m: usize },
    Warped(WarpingModel),
}

/// Parameters of a 1D comparison diffusion: horizontal dimension and the
/// curvature lower bounds entering the drift.
#[derive(Clone, Debug)]
pub struct SasakianModelSpec {
    pub n: usize,
    pub k1: f64,
    pub k2: f64,
    pub kind: DriftKind,
}

impl SasakianModelSpec {
    pub fn sasakian(n: usize, k1: f64, k2: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("horizontal dimension n = {n} < 2")));
        }
        Ok(Self { n, k1, k2, kind: DriftKind::Sasakian })
    }

    pub fn htype(n: usize, m: usize) -> Result<Self> {
        if n < 2 || m < 1 {
            return Err(Error::Config(format!("H-type spec needs n >= 2, m >= 1; got n = {n}, m = {m}")));
        }
        Ok(Self { n, k1: 0.0, k2: 0.0, kind: DriftKind::HType { m } })
    }

    pub fn warped(n: usize, model: WarpingModel) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("horizontal dimension n = {n} < 2")));
        }
        Ok(Self { n, k1: 0.0, k2: 0.0, kind: DriftKind::Warped(model) })
    }

    /// Drift of the comparison diffusion at radius `r`.
    pub fn drift(&self, r: f64) -> Result<f64> {
        sasakian_drift(r, self)
    }

    /// Coefficient `a` of the `a/r` singular part of the drift at `r -> 0`.
    pub fn singular_coefficient(&self) -> f64 {
        match &self.kind {
            DriftKind::Sasakian => (self.n + 2) as f64,
            DriftKind::HType { m } => (self.n + 3 * m - 1) as f64,
            DriftKind::Warped(_) => self.n as f64,
        }
    }

    /// Largest radius where the drift is defined; `None` when unbounded.
    pub fn domain_limit(&self) -> Option<f64> {
        match &self.kind {
            DriftKind::Sasakian => {
                let a = f_sas_domain_limit(self.k1);
                let b = if self.n > 2 { f_rie_domain_limit(self.k2) } else { None };
                match (a, b) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (Some(x), None) | (None, Some(x)) => Some(x),
                    (None, None) => None,
                }
            }
            _ => None,
        }
    }
}

/// Drift of the 1D comparison diffusion attached to `spec`.
///
/// Sasakian: `f_sas(r, k1) + (n-2) f_rie(r, k2)`; the second term is skipped
/// entirely when `n = 2`, so `k2` can never influence the result there.
pub fn sasakian_drift(r: f64, spec: &SasakianModelSpec) -> Result<f64> {
    match &spec.kind {
        DriftKind::Sasakian => {
            let mut v = f_sas(r, spec.k1)?;
            if spec.n > 2 {
                v += (spec.n - 2) as f64 * f_rie(r, spec.k2)?;
            }
            Ok(v)
        }
        DriftKind::HType { m } => htype_drift(r, spec.n, *m),
        DriftKind::Warped(model) => model_drift(r, model, spec.n),
    }
}

/// H-type group comparison drift `(n + 3m - 1)/r`.
pub fn htype_drift(r: f64, n: usize, m: usize) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("htype_drift requires r > 0, got r = {r}")));
    }
    if n < 2 || m < 1 {
        return Err(Error::Config(format!("htype_drift needs n >= 2, m >= 1; got n = {n}, m = {m}")));
    }
    Ok((n + 3 * m - 1) as f64 / r)
}

/// Radial drift `n h'(r)/h(r)` of a warped model space.
pub fn model_drift(r: f64, model: &WarpingModel, n: usize) -> Result<f64> {
    let h = (model.h)(r);
    if h <= 0.0 {
        return Err(Error::Domain(format!("model_drift: h({r}) = {h} <= 0")));
    }
    Ok(n as f64 * (model.h_prime)(r) / h)
}

/// Radial curvature `K(r) = -h''(r)/h(r)` of a warped model space.
pub fn model_curvature(r: f64, model: &WarpingModel) -> Result<f64> {
    let h = (model.h)(r);
    if h <= 0.0 {
        return Err(Error::Domain(format!("model_curvature: h({r}) = {h} <= 0")));
    }
    Ok(-(model.h_second)(r) / h)
}

/// Curvature-bound functions of a totally geodesic foliation, plus the
/// metric-variation parameter epsilon.
#[derive(Clone)]
pub struct FoliationBounds {
    pub rho1: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub rho2: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub kappa: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub epsilon: f64,
}

impl FoliationBounds {
    pub fn new(
        rho1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        rho2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        kappa: impl Fn(f64) -> f64 + Send + Sync + 'static,
        epsilon: f64,
    ) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::Config(format!("epsilon must be > 0, got {epsilon}")));
        }
        Ok(Self {
            rho1: Arc::new(rho1),
            rho2: Arc::new(rho2),
            kappa: Arc::new(kappa),
            epsilon,
        })
    }

    /// Constant bounds; checks the sign assumptions kappa > 0, rho2 >= 0.
    pub fn constant(rho1: f64, rho2: f64, kappa: f64, epsilon: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::Config(format!("kappa must be > 0, got {kappa}")));
        }
        if !(rho2 >= 0.0) {
            return Err(Error::Config(format!("rho2 must be >= 0, got {rho2}")));
        }
        Self::new(move |_| rho1, move |_| rho2, move |_| kappa, epsilon)
    }

    /// `min(rho1 - kappa/eps, rho2/eps)` for constant bounds, evaluated at r.
    pub fn kappa_eps(&self, r: f64) -> f64 {
        let a = (self.rho1)(r) - (self.kappa)(r) / self.epsilon;
        let b = (self.rho2)(r) / self.epsilon;
        a.min(b)
    }
}

impl std::fmt::Debug for FoliationBounds {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FoliationBounds")
            .field("epsilon", &self.epsilon)
            .finish_non_exhaustive()
    }
}

/// Constant-bound sub-Laplacian estimate: computes `kappa_eps` and returns
/// the matching cot / n/r / coth branch. Identical to `n f_rie(r, kappa_eps/n)`.
pub fn kappa_eps_bound(r: f64, n: usize, bounds: &FoliationBounds) -> Result<f64> {
    let ke = bounds.kappa_eps(r);
    Ok(n as f64 * f_rie(r, ke / n as f64)?)
}

/// General sub-Laplacian bound from a test function `G`:
/// `(1/G(r)^2) * int_0^r ( n G'(s)^2 - [ (rho1 - kappa/eps) gamma_h + rho2 gamma_v ] G(s)^2 ) ds`.
#[allow(clippy::too_many_arguments)]
pub fn general_bound_integral(
    r: f64,
    g: &(dyn Fn(f64) -> f64 + Sync),
    g_prime: &(dyn Fn(f64) -> f64 + Sync),
    bounds: &FoliationBounds,
    gamma_h: f64,
    gamma_v: f64,
    n: usize,
) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("general_bound_integral requires r > 0, got {r}")));
    }
    if g(0.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("G(0) must vanish, got {}", g(0.0))));
    }
    if !(0.0..=1.0).contains(&gamma_h) || gamma_v < 0.0 {
        return Err(Error::Config(format!(
            "gamma_h must lie in [0,1] and gamma_v >= 0; got {gamma_h}, {gamma_v}"
        )));
    }
    // spot-check positivity of G on (0, r]
    for i in 1..=8 {
        let s = r * i as f64 / 8.0;
        if !(g(s) > 0.0) {
            return Err(Error::Domain(format!("G must be positive on (0, r]; G({s}) = {}", g(s))));
        }
    }
    let nf = n as f64;
    let integrand = |s: f64| {
        let coeff = ((bounds.rho1)(s) - (bounds.kappa)(s) / bounds.epsilon) * gamma_h
            + (bounds.rho2)(s) * gamma_v;
        let gs = g(s);
        nf * g_prime(s) * g_prime(s) - coeff * gs * gs
    };
    let integral = adaptive_simpson(&integrand, 0.0, r, 1e-10)?;
    let gr = g(r);
    Ok(integral / (gr * gr))
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        let err = left + right - whole;
        if err.abs() <= 15.0 * tol {
            return Ok(left + right + err / 15.0);
        }
        if depth == 0 {
            return Err(Error::Convergence(
                "adaptive Simpson recursion depth exhausted".into(),
            ));
        }
        Ok(recurse(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1)?
            + recurse(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1)?)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    if !(fa.is_finite() && fb.is_finite() && fm.is_finite()) {
        return Err(Error::Domain("non-finite integrand in quadrature".into()));
    }
    let whole = simpson(a, fa, b, fb, fm);
    recurse(f, a, fa, b, fb, fm, whole, tol, 48)
}
