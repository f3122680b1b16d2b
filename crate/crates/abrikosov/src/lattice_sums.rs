//! The Gaussian lattice sums behind `γ_k(τ)`, with certified truncation remainders.
//!
//! ```text
//! γ_q1 = Σ e^{−(π/τ₂)|n−mτ|²} cos[2π(bm−an)]
//! γ_q2 = Σ e^{−(π/τ₂)|n−mτ+q|² − 2πi(bm−an)}
//! γ_01 = Σ e^{−(π/τ₂)|n−mτ|²}
//! ```
//!
//! Sums run over square shells `max(|m|,|n|) ≤ N`. The tail uses
//! `|x − yτ|² ≥ λ_min(x² + y²)` where `λ_min` is the smaller eigenvalue of the
//! quadratic form; this holds for every `τ`, reduced or not.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice_geometry::{reduce_to_fundamental_domain, Characteristic, ShapeParameter};
use crate::C64;

pub const DEFAULT_MAX_RADIUS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifiedValue<T> {
    pub value: T,
    pub remainder_bound: f64,
    pub truncation_radius: usize,
}

impl CertifiedValue<f64> {
    pub fn lo(&self) -> f64 {
        self.value - self.remainder_bound
    }

    pub fn hi(&self) -> f64 {
        self.value + self.remainder_bound
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.remainder_bound
    }
}

/// Radius cap, overridable through `ABRIKOSOV_MAX_RADIUS`.
pub fn max_radius() -> usize {
    std::env::var("ABRIKOSOV_MAX_RADIUS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&r: &usize| r >= 1)
        .unwrap_or(DEFAULT_MAX_RADIUS)
}

/// Smallest eigenvalue of `(x, y) ↦ |x − yτ|²`.
pub fn lambda_min(tau: &ShapeParameter) -> f64 {
    let tr = 1.0 + tau.norm_sqr();
    let det = tau.im * tau.im;
    2.0 * det / (tr + (tr * tr - 4.0 * det).max(0.0).sqrt())
}

/// `(Σ_{|n|≤N} g(n), bound on Σ_{|n|>N} g(n))` with `g(n) = e^{−s·max(|n|−δ,0)²}`.
fn one_dim(s: f64, n: usize, shift: f64) -> (f64, f64) {
    let g = |k: f64| {
        let d = (k.abs() - shift).max(0.0);
        (-s * d * d).exp()
    };
    let inner: f64 = (-(n as i64)..=n as i64).map(|k| g(k as f64)).sum();
    let d = n as f64 + 1.0 - shift;
    let ratio = (-s * (2.0 * d + 1.0)).exp();
    (inner, 2.0 * (-s * d * d).exp() / (1.0 - ratio))
}

/// Bound on the terms outside the square of radius `n`; `shifted` covers `γ_q2`
/// with centred characteristic (offsets up to ½ in both indices).
pub fn tail_bound(tau: &ShapeParameter, n: usize, shifted: bool) -> f64 {
    let s = PI * lambda_min(tau) / tau.im;
    let (inner, t) = one_dim(s, n, if shifted { 0.5 } else { 0.0 });
    t * (2.0 * inner + t)
}

fn radius_for(tol: f64, tau: &ShapeParameter, shifted: bool) -> Result<usize> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let cap = max_radius();
    for n in 1..=cap {
        if tail_bound(tau, n, shifted) <= tol {
            return Ok(n);
        }
    }
    Err(Error::Tolerance { requested: tol, achievable: tail_bound(tau, cap, shifted), radius: cap })
}

/// Radius at which all three sums have tail ≤ `tol`.
pub fn truncation_radius_for(tol: f64, tau: &ShapeParameter) -> Result<usize> {
    radius_for(tol, tau, true)
}

#[derive(Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.c
    }
}

/// Index pairs `(n, m)` with `max(|n|,|m|) = r`, in a fixed order.
fn shell(r: i64) -> Vec<(i64, i64)> {
    if r == 0 {
        return vec![(0, 0)];
    }
    let mut v = Vec::with_capacity(8 * r as usize);
    for n in -r..=r {
        v.push((n, -r));
        v.push((n, r));
    }
    for m in (-r + 1)..r {
        v.push((-r, m));
        v.push((r, m));
    }
    v
}

/// Shell-ordered compensated sum of `term(n, m)`; returns the sum and `Σ|term|`.
fn shell_sum(n_max: usize, term: impl Fn(i64, i64) -> C64) -> (C64, f64) {
    let (mut re, mut im, mut abs) = (Neumaier::default(), Neumaier::default(), 0.0);
    for r in 0..=n_max as i64 {
        let (mut sre, mut sim) = (Neumaier::default(), Neumaier::default());
        for (n, m) in shell(r) {
            let t = term(n, m);
            sre.add(t.re);
            sim.add(t.im);
            abs += t.norm();
        }
        re.add(sre.total());
        im.add(sim.total());
    }
    (C64::new(re.total(), im.total()), abs)
}

fn rounding(abs_sum: f64) -> f64 {
    8.0 * f64::EPSILON * abs_sum
}

/// `Σ e^{−(π/τ₂)|n−mτ|²} e^{2πi(bm−an)}` over the square of radius `n`, no reduction.
pub fn gamma_q1_accumulated(tau: &ShapeParameter, ch: &Characteristic, n: usize) -> C64 {
    let t = tau.as_complex();
    shell_sum(n, |nn, m| {
        let d = (t * m as f64 - nn as f64).norm_sqr();
        C64::from_polar((-PI / tau.im * d).exp(), 2.0 * PI * (ch.b * m as f64 - ch.a * nn as f64))
    })
    .0
}

pub fn gamma_q1_at_radius(tau: &ShapeParameter, ch: &Characteristic, n: usize) -> CertifiedValue<f64> {
    let t = tau.as_complex();
    let (s, abs) = shell_sum(n, |nn, m| {
        let d = (t * m as f64 - nn as f64).norm_sqr();
        let phase = 2.0 * PI * (ch.b * m as f64 - ch.a * nn as f64);
        C64::new((-PI / tau.im * d).exp() * phase.cos(), 0.0)
    });
    CertifiedValue { value: s.re, remainder_bound: tail_bound(tau, n, false) + rounding(abs), truncation_radius: n }
}

/// Uses the centred characteristic; the modulus does not depend on the representative.
pub fn gamma_q2_at_radius(tau: &ShapeParameter, ch: &Characteristic, n: usize) -> CertifiedValue<C64> {
    let c = ch.centered();
    let t = tau.as_complex();
    let q = c.q(tau);
    let (s, abs) = shell_sum(n, |nn, m| {
        let d = (q + nn as f64 - t * m as f64).norm_sqr();
        C64::from_polar((-PI / tau.im * d).exp(), -2.0 * PI * (c.b * m as f64 - c.a * nn as f64))
    });
    CertifiedValue { value: s, remainder_bound: tail_bound(tau, n, true) + rounding(abs), truncation_radius: n }
}

pub fn gamma_01_at_radius(tau: &ShapeParameter, n: usize) -> CertifiedValue<f64> {
    let t = tau.as_complex();
    let (s, abs) = shell_sum(n, |nn, m| C64::new((-PI / tau.im * (t * m as f64 - nn as f64).norm_sqr()).exp(), 0.0));
    CertifiedValue { value: s.re, remainder_bound: tail_bound(tau, n, false) + rounding(abs), truncation_radius: n }
}

fn reduced(tau: &ShapeParameter, ch: &Characteristic) -> Result<(ShapeParameter, Characteristic)> {
    if tau.is_reduced() {
        return Ok((*tau, *ch));
    }
    let (t, g) = reduce_to_fundamental_domain(tau)?;
    Ok((t, ch.transport(&g)))
}

/// Unreduced `τ` is reduced first and `q` transported along.
pub fn gamma_q1(tau: &ShapeParameter, ch: &Characteristic, tol: f64) -> Result<CertifiedValue<f64>> {
    let (t, c) = reduced(tau, ch)?;
    let n = radius_for(tol, &t, false)?;
    Ok(gamma_q1_at_radius(&t, &c, n))
}

/// For unreduced `τ` the value is the one at the reduced point, which can differ
/// by a unimodular phase; `|γ_q2|` is unaffected.
pub fn gamma_q2(tau: &ShapeParameter, ch: &Characteristic, tol: f64) -> Result<CertifiedValue<C64>> {
    let (t, c) = reduced(tau, ch)?;
    let n = radius_for(tol, &t, true)?;
    Ok(gamma_q2_at_radius(&t, &c, n))
}

pub fn gamma_01(tau: &ShapeParameter, tol: f64) -> Result<CertifiedValue<f64>> {
    let (t, _) = reduced(tau, &Characteristic::ZERO)?;
    let n = radius_for(tol, &t, false)?;
    Ok(gamma_01_at_radius(&t, n))
}

/// Seven-term approximant of `γ_q1`: the shells `(0,0)`, `(0,±1)`, `(±1,0)`, `±(1,1)`.
pub fn gamma_q1_approx(tau: &ShapeParameter, ch: &Characteristic) -> f64 {
    let t = tau.as_complex();
    let e = |d: f64| (-PI / tau.im * d).exp();
    1.0 + 2.0
        * (e(1.0) * (2.0 * PI * ch.a).cos()
            + e(t.norm_sqr()) * (2.0 * PI * ch.b).cos()
            + e((C64::new(1.0, 0.0) - t).norm_sqr()) * (2.0 * PI * (ch.b - ch.a)).cos())
}

pub fn gamma_01_approx(tau: &ShapeParameter) -> f64 {
    gamma_q1_approx(tau, &Characteristic::ZERO)
}

/// `γ_q2` summed over `m, n = −2..2`.
pub fn gamma_q2_approx(tau: &ShapeParameter, ch: &Characteristic) -> C64 {
    gamma_q2_at_radius(tau, ch, 2).value
}

/// The index pairs `(0,0)`, `(±1,0)`, `(0,±1)` of the `γ_q2` series.
pub fn gamma_q2_five_term(tau: &ShapeParameter, ch: &Characteristic) -> C64 {
    let c = ch.centered();
    let t = tau.as_complex();
    let q = c.q(tau);
    [(0i64, 0i64), (1, 0), (-1, 0), (0, 1), (0, -1)]
        .iter()
        .map(|&(n, m)| {
            let d = (q + n as f64 - t * m as f64).norm_sqr();
            C64::from_polar((-PI / tau.im * d).exp(), -2.0 * PI * (c.b * m as f64 - c.a * n as f64))
        })
        .sum()
}

pub fn gamma_k_approx(tau: &ShapeParameter, ch: &Characteristic) -> f64 {
    2.0 * gamma_q1_approx(tau, ch) + gamma_q2_approx(tau, ch).norm() - gamma_01_approx(tau)
}
