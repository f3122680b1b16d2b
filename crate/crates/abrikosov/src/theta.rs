//! Theta functions with real characteristics and the lowest-Landau-level cell functions.
//!
//! In complex notation `z = x₁ + ix₂` every term of the series for `φ_k` has the form
//! `e^{−|z|²/4} e^{z²/4 + B_m z + C_m}`, so the modulus of each term is a Gaussian in
//! `m` centred near `a − Im z/(ωτ₂)`. Summation windows are centred there, which keeps
//! the truncation error uniform over the plane without reducing `z` modulo the lattice.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice_geometry::{frame, Characteristic, ShapeParameter};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaSeriesParams {
    /// Half-width of the summation window.
    pub m_max: usize,
    /// Tail bound relative to the largest series term.
    pub target_tol: f64,
}

impl Default for ThetaSeriesParams {
    fn default() -> Self {
        ThetaSeriesParams { m_max: 16, target_tol: 1e-14 }
    }
}

/// Relative tail of a Gaussian window `Σ_{|m−c|>M} e^{−πτ₂(m−c)²}`, `c` at most ½ off-centre.
pub fn window_tail(tau_im: f64, half_width: usize) -> f64 {
    let d = half_width as f64 + 0.5;
    2.0 * (-PI * tau_im * d * d).exp() / (1.0 - (-2.0 * PI * tau_im * d).exp())
}

/// Smallest window half-width meeting `params.target_tol`.
pub fn window_for(tau: &ShapeParameter, params: &ThetaSeriesParams) -> Result<usize> {
    for m in 1..=params.m_max {
        if window_tail(tau.im, m) <= params.target_tol {
            return Ok(m);
        }
    }
    Err(Error::Tolerance {
        requested: params.target_tol,
        achievable: window_tail(tau.im, params.m_max),
        radius: params.m_max,
    })
}

/// `θ_q(z,τ) = e^{πi(a²τ−2ab−2az)} Σ_m e^{2πiqm} e^{πim²τ} e^{2πimz}`.
pub fn theta_q(z: C64, tau: &ShapeParameter, ch: &Characteristic, params: &ThetaSeriesParams) -> Result<C64> {
    let m_w = window_for(tau, params)?;
    let t = tau.as_complex();
    let (a, b) = (ch.a, ch.b);
    let q = ch.q(tau);
    let i = C64::i();
    let pre = i * PI * (t * a * a - 2.0 * a * b - z * 2.0 * a);
    let c = (a - z.im / tau.im).round() as i64;
    let mut sum = C64::new(0.0, 0.0);
    for m in (c - m_w as i64)..=(c + m_w as i64) {
        let mf = m as f64;
        let e = pre + i * 2.0 * PI * q * mf + i * PI * mf * mf * t + i * 2.0 * PI * mf * z;
        sum += e.exp();
    }
    Ok(sum)
}

/// `c₀ = (2 Im τ)^{1/4}`: normalizes `⟨|φ_k|²⟩ = 1` for every `k`.
pub fn c0(tau: &ShapeParameter) -> f64 {
    (2.0 * tau.im).powf(0.25)
}

/// Values of the Landau-level functions `f_n = (c*)ⁿφ/√(2ⁿn!)` and of `c f_n` at one point.
#[derive(Debug, Clone)]
pub struct LandauValues {
    pub f: Vec<C64>,
    pub cf: Vec<C64>,
}

/// Normalized cell function `φ_k`, `k = ωiq`, with its Landau ladder.
#[derive(Debug, Clone)]
pub struct NormalizedCellFunction {
    pub tau: ShapeParameter,
    pub q: Characteristic,
    pub c0: f64,
    pub params: ThetaSeriesParams,
    omega: f64,
    window: usize,
}

impl NormalizedCellFunction {
    pub fn new(tau: &ShapeParameter, q: &Characteristic, params: ThetaSeriesParams) -> Result<Self> {
        let window = window_for(tau, &params)?;
        Ok(NormalizedCellFunction {
            tau: *tau,
            q: *q,
            c0: c0(tau),
            params,
            omega: frame(tau).omega,
            window,
        })
    }

    /// Exponents `E_m` (including `−|z|²/4` and `ln c₀`) and the slopes `B_m` of the
    /// theta series with characteristic `−q`, which carries Bloch momentum `+k`.
    fn terms(&self, z: C64, extra: usize) -> impl Iterator<Item = (C64, C64)> + '_ {
        let t = self.tau.as_complex();
        let (a, b) = (-self.q.a, -self.q.b);
        let qq = C64::new(b, 0.0) - t * a;
        let i = C64::i();
        let base = -z.norm_sqr() / 4.0 + z * z / 4.0 + i * PI * (t * a * a - 2.0 * a * b) + self.c0.ln();
        let centre = (a - z.im / (self.omega * self.tau.im)).round() as i64;
        let w = (self.window + extra) as i64;
        let omega = self.omega;
        ((centre - w)..=(centre + w)).map(move |m| {
            let mf = m as f64;
            let bm = i * 2.0 * PI * (mf - a) / omega;
            let e = base + bm * z + i * 2.0 * PI * qq * mf + i * PI * mf * mf * t;
            (e, bm)
        })
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.terms(x, 0).map(|(e, _)| e.exp()).sum()
    }

    /// `(c φ)(x)` with `c = ∂₁ + i∂₂ + ½(x₁+ix₂)`, differentiating each term analytically.
    pub fn annihilator(&self, x: C64) -> C64 {
        let z = x;
        self.terms(z, 0)
            .map(|(e, bm)| {
                let d1 = -z.conj() / 4.0 + z / 4.0 + bm;
                let d2 = C64::i() * (-z.conj() / 4.0 + z * 0.75 + bm);
                (d1 + C64::i() * d2 + z / 2.0) * e.exp()
            })
            .sum()
    }

    /// `f_0..=f_nmax` and `c f_0..=c f_nmax` at `x`.
    pub fn levels(&self, x: C64, nmax: usize) -> LandauValues {
        let z = x;
        // h_j = e^{−|z|²/4} ∂_z^j h, with h_m^{(j)} = P_j(w_m) h_m, P_{j+1} = w P_j + (j/2) P_{j−1}
        let mut hj = vec![C64::new(0.0, 0.0); nmax + 1];
        let extra = 2 + nmax / 2;
        let mut p = vec![C64::new(0.0, 0.0); nmax + 1];
        for (e, bm) in self.terms(z, extra) {
            let ex = e.exp();
            let w = z / 2.0 + bm;
            p[0] = C64::new(1.0, 0.0);
            if nmax >= 1 {
                p[1] = w;
            }
            for j in 1..nmax {
                p[j + 1] = w * p[j] + p[j - 1] * (j as f64 / 2.0);
            }
            for j in 0..=nmax {
                hj[j] += p[j] * ex;
            }
        }
        let zb = z.conj();
        let mut zbp = vec![C64::new(1.0, 0.0); nmax + 1];
        for j in 1..=nmax {
            zbp[j] = zbp[j - 1] * zb;
        }
        let mut f = Vec::with_capacity(nmax + 1);
        let mut cf = Vec::with_capacity(nmax + 1);
        let mut fact = 1.0;
        for n in 0..=nmax {
            if n > 0 {
                fact *= n as f64;
            }
            let norm = (2f64.powi(n as i32) * fact).sqrt();
            let mut g = C64::new(0.0, 0.0);
            let mut dg = C64::new(0.0, 0.0);
            let mut binom = 1.0;
            for j in 0..=n {
                let coef = binom * (-2f64).powi(j as i32);
                g += hj[j] * zbp[n - j] * coef;
                if j < n {
                    dg += hj[j] * zbp[n - j - 1] * (coef * (n - j) as f64);
                }
                binom = binom * (n - j) as f64 / (j + 1) as f64;
            }
            f.push(g / norm);
            cf.push(dg * 2.0 / norm);
        }
        LandauValues { f, cf }
    }
}

/// `φ_k(x)`, normalized so that `⟨|φ_k|²⟩ = 1`, with `φ_k(x+s) = e^{i½ s·Jx} e^{ik·s} φ_k(x)`.
pub fn phi_k(x: C64, tau: &ShapeParameter, ch: &Characteristic, params: &ThetaSeriesParams) -> Result<C64> {
    Ok(NormalizedCellFunction::new(tau, ch, *params)?.eval(x))
}

/// `max |cφ_k| / max |φ_k|` over a 16×16 grid of the fundamental cell.
pub fn annihilator_residual(tau: &ShapeParameter, ch: &Characteristic, params: &ThetaSeriesParams) -> Result<f64> {
    let f = NormalizedCellFunction::new(tau, ch, *params)?;
    let fr = frame(tau);
    let (mut num, mut den) = (0f64, 0f64);
    let n = 16;
    for i in 0..n {
        for j in 0..n {
            let x = fr.nu1 * (i as f64 / n as f64) + fr.nu2 * (j as f64 / n as f64);
            num = num.max(f.annihilator(x).norm());
            den = den.max(f.eval(x).norm());
        }
    }
    Ok(num / den)
}
