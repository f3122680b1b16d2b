//! Truncated Galerkin matrix of `K_k = K⁰ + εW¹ + ε²W²`.
//!
//! Components 1 and 2 (`ξ`, `ξ̄`) use the Landau levels `f_n` of `φ_k` and the conjugated
//! levels of `φ_{−k}`; components 3 and 4 (`α`, `ᾱ`) use plane waves `e^{i(k+t*)·x}` over the
//! square dual shells `|n|, |m| ≤ n_fourier`. The `k = 0` constant mode is included.

use nalgebra::DMatrix;
use serde::Serialize;

use super::{a1_fourier, plane};
use crate::error::{Error, Result};
use crate::lattice_geometry::{frame, Characteristic, ShapeParameter};
use crate::lattice_sums::gamma_01;
use crate::quadrature_oracle::{cell_grid, mean};
use crate::theta::NormalizedCellFunction;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GalerkinBasis {
    pub n_landau: usize,
    pub n_fourier: usize,
}

impl GalerkinBasis {
    pub fn plane_waves(&self) -> usize {
        (2 * self.n_fourier + 1).pow(2)
    }

    pub fn dim(&self) -> usize {
        2 * self.n_landau + 2 * self.plane_waves()
    }
}

impl Default for GalerkinBasis {
    fn default() -> Self {
        GalerkinBasis { n_landau: 6, n_fourier: 3 }
    }
}

const GRID: usize = 128;
const A1_SHELLS: usize = 8;
/// Largest admissible weight of the selected eigenvectors on the outermost basis elements.
const EDGE_WEIGHT_MAX: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct FiberHessian {
    pub tau: ShapeParameter,
    pub q: Characteristic,
    pub kappa: f64,
    pub basis: GalerkinBasis,
    pub k0: DMatrix<C64>,
    pub w1: DMatrix<C64>,
    pub w2: DMatrix<C64>,
    /// `|k + t*|²` of the plane waves, in basis order.
    pub plane_energies: Vec<f64>,
    edge: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GalerkinSpectrum {
    pub eps: f64,
    /// All eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Larger of the two eigenvalues with the largest lowest-Landau-level weight.
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub edge_weight: f64,
}

fn avg2(a: &[C64], b: &[C64]) -> C64 {
    mean(a.iter().zip(b).map(|(x, y)| x.conj() * y))
}

impl FiberHessian {
    pub fn assemble(tau: &ShapeParameter, q: &Characteristic, kappa: f64, basis: GalerkinBasis) -> Result<Self> {
        if basis.n_landau < 4 || basis.n_fourier < 2 {
            return Err(Error::Truncation(format!(
                "basis ({} Landau levels, {} shells) below the minimum (4, 2)",
                basis.n_landau, basis.n_fourier
            )));
        }
        let nl = basis.n_landau;
        let s = basis.n_fourier as i64;
        let fr = frame(tau);
        let k = q.k(tau);
        let grid = cell_grid(tau, GRID);
        let np = grid.len();

        let fk = NormalizedCellFunction::new(tau, q, Default::default())?;
        let fm = NormalizedCellFunction::new(tau, &q.neg(), Default::default())?;
        let f0 = NormalizedCellFunction::new(tau, &Characteristic::ZERO, Default::default())?;
        let mut lk = vec![vec![C64::new(0.0, 0.0); np]; nl + 1];
        let mut ck = lk.clone();
        let mut lm = lk.clone();
        let mut cm = lk.clone();
        let mut phi0 = vec![C64::new(0.0, 0.0); np];
        let mut dphi0 = phi0.clone();
        for (p, x) in grid.iter().enumerate() {
            let a = fk.levels(*x, nl);
            let b = fm.levels(*x, nl);
            for n in 0..=nl {
                lk[n][p] = a.f[n];
                ck[n][p] = a.cf[n];
                lm[n][p] = b.f[n];
                cm[n][p] = b.cf[n];
            }
            let z = f0.levels(*x, 1);
            phi0[p] = z.f[0];
            // ∂_{a⁰}φ₀ = −c*φ₀ = −√2 f₁
            dphi0[p] = -(2f64.sqrt()) * z.f[1];
        }
        let rho: Vec<f64> = phi0.iter().map(|v| v.norm_sqr()).collect();
        let a1f = a1_fourier(tau, A1_SHELLS)?;
        let a1: Vec<C64> = grid.iter().map(|x| a1f.eval(*x)).collect();

        let k2 = kappa * kappa;
        let beta = gamma_01(tau, 1e-13)?.value;
        let lam1 = 0.5 + (k2 - 0.5) * beta;

        let mut ts = Vec::new();
        for m in -s..=s {
            for n in -s..=s {
                ts.push((n, m, fr.dual_point(n, m)));
            }
        }
        let npw = ts.len();
        let waves: Vec<Vec<C64>> =
            ts.iter().map(|(_, _, t)| grid.iter().map(|x| plane(k + t, *x)).collect()).collect();

        // ĝ(n, m) = ⟨g e^{−it*·x}⟩ for g = 1 and g = |φ₀|², over the difference shells
        let span = 2 * s;
        let width = (2 * span + 1) as usize;
        let mut one_hat = vec![C64::new(0.0, 0.0); width * width];
        let mut rho_hat = one_hat.clone();
        for m in -span..=span {
            for n in -span..=span {
                let t = fr.dual_point(n, m);
                let idx = ((m + span) as usize) * width + (n + span) as usize;
                let e: Vec<C64> = grid.iter().map(|x| plane(-t, *x)).collect();
                one_hat[idx] = mean(e.iter().cloned());
                rho_hat[idx] = mean(e.iter().zip(&rho).map(|(v, r)| v * *r));
            }
        }
        let hat_idx = |j: usize, l: usize| {
            let (dn, dm) = (ts[j].0 - ts[l].0, ts[j].1 - ts[l].1);
            ((dm + span) as usize) * width + (dn + span) as usize
        };

        let dim = basis.dim();
        let i1 = |n: usize| n;
        let i2 = |n: usize| nl + n;
        let i3 = |j: usize| 2 * nl + j;
        let i4 = |j: usize| 2 * nl + npw + j;
        let mut k0 = DMatrix::<C64>::zeros(dim, dim);
        let mut w1 = DMatrix::<C64>::zeros(dim, dim);
        let mut w2 = DMatrix::<C64>::zeros(dim, dim);

        // ⟨f_n, B⁰ f_m⟩ with B⁰ = (2κ²+½)|φ₀|² + i a¹ c − i ā¹ c*, c* f_m = √(2(m+1)) f_{m+1}
        let b_op = |f: &[Vec<C64>], cf: &[Vec<C64>], n: usize, m: usize| -> C64 {
            let r = (2.0 * (m + 1) as f64).sqrt();
            mean((0..np).map(|p| {
                let v = (2.0 * k2 + 0.5) * rho[p] * f[m][p] + C64::i() * a1[p] * cf[m][p]
                    - C64::i() * a1[p].conj() * r * f[m + 1][p];
                f[n][p].conj() * v
            }))
        };
        let cross_w: Vec<C64> = phi0.iter().map(|v| (k2 - 0.5) * v * v).collect();
        for n in 0..nl {
            for m in 0..nl {
                k0[(i1(n), i1(m))] = avg2(&ck[n], &ck[m]);
                k0[(i2(n), i2(m))] = avg2(&cm[n], &cm[m]).conj();
                w2[(i1(n), i1(m))] = b_op(&lk, &ck, n, m) - lam1 * avg2(&lk[n], &lk[m]);
                w2[(i2(n), i2(m))] = b_op(&lm, &cm, n, m).conj() - lam1 * avg2(&lm[n], &lm[m]).conj();
                let v = mean((0..np).map(|p| lk[n][p].conj() * cross_w[p] * lm[m][p].conj()));
                w2[(i1(n), i2(m))] = v;
                w2[(i2(m), i1(n))] = v.conj();
            }
        }
        let mut energies = Vec::with_capacity(npw);
        for j in 0..npw {
            energies.push((k + ts[j].2).norm_sqr());
        }
        for j in 0..npw {
            for l in 0..npw {
                let h = hat_idx(j, l);
                let kv = one_hat[h] * energies[l];
                k0[(i3(j), i3(l))] = kv;
                k0[(i4(j), i4(l))] = kv;
                w2[(i3(j), i3(l))] = rho_hat[h];
                w2[(i4(j), i4(l))] = rho_hat[h];
            }
        }
        for n in 0..nl {
            let u: Vec<C64> = (0..np).map(|p| lk[n][p].conj() * C64::i() * dphi0[p]).collect();
            let w: Vec<C64> = (0..np).map(|p| lm[n][p] * (-C64::i()) * dphi0[p].conj()).collect();
            for j in 0..npw {
                let v = mean(u.iter().zip(&waves[j]).map(|(a, e)| a * e));
                w1[(i1(n), i4(j))] = v;
                w1[(i4(j), i1(n))] = v.conj();
                let v = mean(w.iter().zip(&waves[j]).map(|(a, e)| a * e));
                w1[(i2(n), i3(j))] = v;
                w1[(i3(j), i2(n))] = v.conj();
            }
        }

        let mut edge = vec![i1(nl - 1), i2(nl - 1)];
        for (j, (n, m, _)) in ts.iter().enumerate() {
            if n.abs() == s || m.abs() == s {
                edge.push(i3(j));
                edge.push(i4(j));
            }
        }
        Ok(FiberHessian { tau: *tau, q: *q, kappa, basis, k0, w1, w2, plane_energies: energies, edge })
    }

    pub fn matrix(&self, eps: f64) -> DMatrix<C64> {
        let m = &self.k0 + &self.w1 * C64::new(eps, 0.0) + &self.w2 * C64::new(eps * eps, 0.0);
        (&m + m.adjoint()) * C64::new(0.5, 0.0)
    }

    /// `max |⟨v⁰_i, W¹ v⁰_j⟩|` over the lowest-level pair.
    pub fn f1_max(&self) -> f64 {
        let idx = [0, self.basis.n_landau];
        let mut m = 0f64;
        for &i in &idx {
            for &j in &idx {
                m = m.max(self.w1[(i, j)].norm());
            }
        }
        m
    }

    /// Max distance between the `ε = 0` spectrum and `{2n} ∪ {|k+t*|²}`, each doubled.
    pub fn unperturbed_deviation(&self) -> f64 {
        let mut want: Vec<f64> = (0..self.basis.n_landau).map(|n| 2.0 * n as f64).collect();
        want.extend(&self.plane_energies);
        let mut want: Vec<f64> = want.iter().flat_map(|v| [*v, *v]).collect();
        want.sort_by(f64::total_cmp);
        let mut got: Vec<f64> = self.matrix(0.0).symmetric_eigen().eigenvalues.iter().cloned().collect();
        got.sort_by(f64::total_cmp);
        got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn spectrum(&self, eps: f64) -> Result<GalerkinSpectrum> {
        let e = self.matrix(eps).symmetric_eigen();
        let nl = self.basis.n_landau;
        let n = e.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        let weight = |c: usize| e.eigenvectors[(0, c)].norm_sqr() + e.eigenvectors[(nl, c)].norm_sqr();
        order.sort_by(|a, b| weight(*b).total_cmp(&weight(*a)));
        let (x, y) = (e.eigenvalues[order[0]], e.eigenvalues[order[1]]);
        let edge_weight = [order[0], order[1]]
            .iter()
            .map(|c| self.edge.iter().map(|r| e.eigenvectors[(*r, *c)].norm_sqr()).sum::<f64>())
            .fold(0.0, f64::max);
        if edge_weight > EDGE_WEIGHT_MAX {
            return Err(Error::Truncation(format!(
                "weight {edge_weight:.3e} on the outermost basis elements at eps = {eps}"
            )));
        }
        let mut eigenvalues: Vec<f64> = e.eigenvalues.iter().cloned().collect();
        eigenvalues.sort_by(f64::total_cmp);
        Ok(GalerkinSpectrum { eps, eigenvalues, lambda_plus: x.max(y), lambda_minus: x.min(y), edge_weight })
    }
}

/// Assemble and diagonalize at one `ε`.
pub fn galerkin_fiber_spectrum(
    tau: &ShapeParameter,
    q: &Characteristic,
    kappa: f64,
    eps: f64,
    basis: GalerkinBasis,
) -> Result<GalerkinSpectrum> {
    FiberHessian::assemble(tau, q, kappa, basis)?.spectrum(eps)
}
