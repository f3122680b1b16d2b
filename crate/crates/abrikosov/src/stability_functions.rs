//! `γ_k(τ)`, its Brillouin-zone minimum `γ(τ)`, `β(τ)`, `κ_c(τ)` and the stability verdict.

use std::collections::BTreeMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice_geometry::{
    half_lattice_points, reduce_to_fundamental_domain, wigner_seitz_vertices, Characteristic, Mobius, ShapeParameter,
};
use crate::lattice_sums::{
    gamma_01_at_radius, gamma_q1_at_radius, gamma_q2_at_radius, truncation_radius_for, CertifiedValue,
};
use crate::minimize::nelder_mead_2d;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GammaResult {
    pub gamma_k: CertifiedValue<f64>,
    pub tau: ShapeParameter,
    pub q: Characteristic,
    /// `⟨|φ₀|²|φ_k|²⟩`
    pub q1: f64,
    /// `|⟨φ₀²φ̄_kφ̄_{−k}⟩|`
    pub q2_abs: f64,
    /// `β(τ)`
    pub q01: f64,
}

/// `γ_k` at `τ` as given (no reduction), all three sums at radius `n`.
pub fn gamma_k_at_radius(tau: &ShapeParameter, ch: &Characteristic, n: usize) -> GammaResult {
    let q1 = gamma_q1_at_radius(tau, ch, n);
    let q2 = gamma_q2_at_radius(tau, ch, n);
    let q0 = gamma_01_at_radius(tau, n);
    GammaResult {
        gamma_k: CertifiedValue {
            value: 2.0 * q1.value + q2.value.norm() - q0.value,
            remainder_bound: 2.0 * q1.remainder_bound + q2.remainder_bound + q0.remainder_bound,
            truncation_radius: n,
        },
        tau: *tau,
        q: *ch,
        q1: q1.value,
        q2_abs: q2.value.norm(),
        q01: q0.value,
    }
}

/// `γ_k` at `τ` as given, with total remainder at most `tol`.
pub fn gamma_k_direct(tau: &ShapeParameter, ch: &Characteristic, tol: f64) -> Result<GammaResult> {
    let n = truncation_radius_for(tol / 4.0, tau)?;
    Ok(gamma_k_at_radius(tau, ch, n))
}

/// `γ_k(τ) = 2γ_q1 + |γ_q2| − γ_01`; unreduced `τ` is reduced and `k` transported.
pub fn gamma_k(tau: &ShapeParameter, ch: &Characteristic, tol: f64) -> Result<GammaResult> {
    let (t, g) = reduce_to_fundamental_domain(tau)?;
    let mut r = gamma_k_direct(&t, &ch.transport(&g), tol)?;
    r.q = *ch;
    Ok(r)
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaMin {
    pub value: CertifiedValue<f64>,
    /// Centred `(a, b)` at the reduced shape parameter.
    pub argmin_q: Characteristic,
    pub tau_reduced: ShapeParameter,
    pub reduction: Mobius,
    pub multistart_trace: Vec<(Characteristic, f64)>,
}

const GRID: usize = 24;

/// `γ(τ) = inf_k γ_k(τ)`: 24×24 grid, then Nelder–Mead from the best grid point,
/// the Wigner–Seitz vertices and the half-lattice points.
pub fn gamma(tau: &ShapeParameter, tol: f64) -> Result<GammaMin> {
    let (t, g) = reduce_to_fundamental_domain(tau)?;
    let n = truncation_radius_for(tol.min(1e-9) / 4.0, &t)?;
    let q0 = gamma_01_at_radius(&t, n).value;
    let f = |x: [f64; 2]| {
        let c = Characteristic::new(x[0], x[1]);
        2.0 * gamma_q1_at_radius(&t, &c, n).value + gamma_q2_at_radius(&t, &c, n).value.norm() - q0
    };

    let mut best_grid = ([0.0, 0.0], f64::INFINITY);
    for i in 0..GRID {
        for j in 0..GRID {
            let x = [-0.5 + (i as f64 + 0.5) / GRID as f64, -0.5 + (j as f64 + 0.5) / GRID as f64];
            let v = f(x);
            if v < best_grid.1 {
                best_grid = (x, v);
            }
        }
    }

    let mut starts = vec![best_grid.0];
    starts.extend(wigner_seitz_vertices(&t).iter().map(|c| [c.a, c.b]));
    starts.extend(half_lattice_points().iter().map(|c| [c.a, c.b]));

    let mut trace = Vec::with_capacity(starts.len());
    let mut best: Option<([f64; 2], f64)> = None;
    let mut converged = 0;
    for s in &starts {
        let r = nelder_mead_2d(f, *s, 0.04, 1e-14, 2000);
        if r.converged {
            converged += 1;
        }
        trace.push((Characteristic::new(s[0], s[1]), r.fx));
        if best.map_or(true, |b| r.fx < b.1) {
            best = Some((r.x, r.fx));
        }
    }
    if converged == 0 {
        return Err(Error::Convergence { starts: starts.len() });
    }
    let (x, _) = best.unwrap();
    let argmin = Characteristic::new(x[0], x[1]).centered();
    let value = gamma_k_direct(&t, &argmin, tol)?.gamma_k;
    Ok(GammaMin { value, argmin_q: argmin, tau_reduced: t, reduction: g, multistart_trace: trace })
}

/// `β(τ) = ⟨|φ₀|⁴⟩ = γ_01(τ)`.
pub fn beta(tau: &ShapeParameter, tol: f64) -> Result<CertifiedValue<f64>> {
    let b = crate::lattice_sums::gamma_01(tau, tol)?;
    if b.hi() < 1.0 {
        return Err(Error::Precision(format!("beta {} below 1", b.value)));
    }
    Ok(b)
}

fn kappa_of_beta(b: f64) -> f64 {
    (0.5 * (1.0 - 1.0 / b)).max(0.0).sqrt()
}

/// `κ_c(τ) = √(½(1 − 1/β(τ)))`.
pub fn kappa_c(tau: &ShapeParameter, tol: f64) -> Result<CertifiedValue<f64>> {
    let b = beta(tau, tol)?;
    if b.lo() < 1.0 {
        return Err(Error::Precision(format!("beta interval [{}, {}] reaches below 1", b.lo(), b.hi())));
    }
    let k = kappa_of_beta(b.value);
    let bound = (kappa_of_beta(b.hi()) - k).max(k - kappa_of_beta(b.lo()));
    Ok(CertifiedValue { value: k, remainder_bound: bound, truncation_radius: b.truncation_radius })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    AsymptoticallyStable,
    EnergeticallyUnstable,
    OutsideRegime,
    /// Sign of the leading term could not be certified.
    Indeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityVerdict {
    pub verdict: Verdict,
    pub gamma: Option<CertifiedValue<f64>>,
    pub kappa_sq_minus_half: f64,
    /// `|κ² − b| / (κ²[(2κ²−1)β + 1])`
    pub b_ratio: f64,
    pub indeterminate: bool,
}

pub const DEFAULT_B_RATIO: f64 = 0.1;

/// Smallest tolerance tried when certifying the sign of `γ(τ)`.
const SIGN_TOL_FLOOR: f64 = 1e-14;

/// Stable iff `κ² > ½` and `γ(τ) > 0`, unstable otherwise, inside the regime `ratio ≤ threshold`.
pub fn classify(tau: &ShapeParameter, kappa: f64, b_field: f64, tol: f64, threshold: f64) -> Result<StabilityVerdict> {
    if !(kappa > 0.0) || !(b_field > 0.0) {
        return Err(Error::Domain("kappa and b must be positive".into()));
    }
    let k2 = kappa * kappa;
    let beta = beta(tau, tol.min(1e-10))?.value;
    let denom = k2 * ((2.0 * k2 - 1.0) * beta + 1.0);
    let ratio = if denom > 0.0 { (k2 - b_field).abs() / denom } else { f64::INFINITY };
    let mut out = StabilityVerdict {
        verdict: Verdict::OutsideRegime,
        gamma: None,
        kappa_sq_minus_half: k2 - 0.5,
        b_ratio: ratio,
        indeterminate: false,
    };
    if !(ratio <= threshold) {
        return Ok(out);
    }
    if k2 < 0.5 {
        out.verdict = Verdict::EnergeticallyUnstable;
        return Ok(out);
    }
    if k2 == 0.5 {
        out.verdict = Verdict::Indeterminate;
        out.indeterminate = true;
        return Ok(out);
    }
    let mut t = tol;
    loop {
        match gamma(tau, t) {
            Ok(g) => {
                out.gamma = Some(g.value);
                if g.value.value.abs() > g.value.remainder_bound {
                    out.verdict = if g.value.value > 0.0 {
                        Verdict::AsymptoticallyStable
                    } else {
                        Verdict::EnergeticallyUnstable
                    };
                    return Ok(out);
                }
            }
            Err(Error::Tolerance { .. }) => break,
            Err(e) => return Err(e),
        }
        if t <= SIGN_TOL_FLOOR {
            break;
        }
        t = (t / 100.0).max(SIGN_TOL_FLOOR);
    }
    out.verdict = Verdict::Indeterminate;
    out.indeterminate = true;
    Ok(out)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Residual {
    pub residual: f64,
    pub bound: f64,
}

impl Residual {
    fn between(x: &GammaResult, y: &GammaResult) -> Residual {
        Residual {
            residual: (x.gamma_k.value - y.gamma_k.value).abs(),
            bound: x.gamma_k.remainder_bound + y.gamma_k.remainder_bound,
        }
    }

    pub fn passes(&self) -> bool {
        self.residual <= self.bound
    }
}

/// The modular and dual-lattice identities of `γ_k`, each side summed directly at its own `τ`.
pub fn symmetry_residuals(tau: &ShapeParameter, ch: &Characteristic, tol: f64) -> Result<BTreeMap<String, Residual>> {
    let base = gamma_k_direct(tau, ch, tol)?;
    let mut out = BTreeMap::new();
    let mut check = |name: &str, g: &Mobius, c: Characteristic| -> Result<()> {
        let t = g.apply_shape(tau)?;
        let other = gamma_k_direct(&t, &c, tol)?;
        out.insert(name.to_string(), Residual::between(&base, &other));
        Ok(())
    };
    check("tau_plus_one", &Mobius::t(1), ch.transport(&Mobius::t(1)))?;
    check("minus_inverse_tau", &Mobius::S, ch.transport(&Mobius::S))?;
    let st = Mobius::S.compose(&Mobius::t(1));
    check("sl2z_covariance", &st, ch.transport(&st))?;
    check("dual_shift_kappa1", &Mobius::IDENTITY, Characteristic::new(ch.a, ch.b + 1.0))?;
    check("dual_shift_kappa2", &Mobius::IDENTITY, Characteristic::new(ch.a + 1.0, ch.b))?;
    check("k_to_minus_k", &Mobius::IDENTITY, ch.neg())?;

    let refl = ShapeParameter::new(-tau.re, tau.im)?;
    let other = gamma_k_direct(&refl, &Characteristic::new(ch.a, -ch.b), tol)?;
    out.insert("reflection".to_string(), Residual::between(&base, &other));
    Ok(out)
}

const FD_STEP: f64 = 1e-3;

/// Central finite-difference gradients at the half-lattice points and of `γ(τ)`
/// at `e^{iπ/3}` and `e^{iπ/2}`; one-sided `Re τ` derivatives at `e^{iπ/2}` expose the cusp.
pub fn critical_point_residuals(tau: &ShapeParameter) -> Result<BTreeMap<String, f64>> {
    let (t, _) = reduce_to_fundamental_domain(tau)?;
    let n = truncation_radius_for(1e-14, &t)?;
    let gk = |a: f64, b: f64| gamma_k_at_radius(&t, &Characteristic::new(a, b), n).gamma_k.value;
    let mut out = BTreeMap::new();
    let h = FD_STEP;
    for p in half_lattice_points() {
        let da = (gk(p.a + h, p.b) - gk(p.a - h, p.b)) / (2.0 * h);
        let db = (gk(p.a, p.b + h) - gk(p.a, p.b - h)) / (2.0 * h);
        out.insert(format!("grad_k_at_({},{})", p.a, p.b), da.hypot(db));
    }

    let g = |re: f64, im: f64| -> Result<f64> { Ok(gamma(&ShapeParameter::new(re, im)?, 1e-12)?.value.value) };
    let hex = ShapeParameter::hexagonal();
    let d_re = (g(hex.re + h, hex.im)? - g(hex.re - h, hex.im)?) / (2.0 * h);
    let d_im = (g(hex.re, hex.im + h)? - g(hex.re, hex.im - h)?) / (2.0 * h);
    out.insert("grad_tau_hexagonal".into(), d_re.hypot(d_im));

    let g0 = g(0.0, 1.0)?;
    let d_im = (g(0.0, 1.0 + h)? - g(0.0, 1.0 - h)?) / (2.0 * h);
    out.insert("d_im_tau_square".into(), d_im.abs());
    out.insert("d_re_tau_square_right".into(), (g(h, 1.0)? - g0) / h);
    out.insert("d_re_tau_square_left".into(), (g0 - g(-h, 1.0)?) / h);
    Ok(out)
}
