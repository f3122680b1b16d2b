//! Lattice shapes, SL(2,ℤ) reduction, normalized frames and distinguished k-points.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

const BOUNDARY_EPS: f64 = 1e-12;

/// A point `τ` of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeParameter {
    pub re: f64,
    pub im: f64,
}

impl ShapeParameter {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(im > 0.0) || !re.is_finite() || !im.is_finite() {
            return Err(Error::Domain(format!("Im tau must be positive, got {re}+{im}i")));
        }
        Ok(ShapeParameter { re, im })
    }

    pub fn from_complex(z: C64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    /// `r·e^{iθ}` with θ in degrees.
    pub fn polar(r: f64, deg: f64) -> Result<Self> {
        let t = deg.to_radians();
        Self::new(r * t.cos(), r * t.sin())
    }

    pub fn hexagonal() -> Self {
        ShapeParameter { re: 0.5, im: 3f64.sqrt() / 2.0 }
    }

    pub fn square() -> Self {
        ShapeParameter { re: 0.0, im: 1.0 }
    }

    pub fn as_complex(&self) -> C64 {
        C64::new(self.re, self.im)
    }

    /// `|τ| ≥ 1` and `−½ < Re τ ≤ ½`, up to boundary rounding.
    pub fn is_reduced(&self) -> bool {
        self.norm_sqr() >= 1.0 - BOUNDARY_EPS && self.re > -0.5 + BOUNDARY_EPS && self.re <= 0.5 + BOUNDARY_EPS
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

impl fmt::Display for ShapeParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.re < 0.0 {
            write!(f, "-{}+{}i", -self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl FromStr for ShapeParameter {
    type Err = Error;

    /// Accepts `RE+IMi`, `IMi`, `i`, or polar `r@deg`.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Domain(format!("cannot parse tau from '{s}'"));
        if let Some((r, d)) = s.split_once('@') {
            let r: f64 = r.parse().map_err(|_| bad())?;
            let d: f64 = d.parse().map_err(|_| bad())?;
            return Self::polar(r, d);
        }
        let body = s.strip_suffix('i').ok_or_else(bad)?;
        let bytes = body.as_bytes();
        let mut split = None;
        for p in (1..bytes.len()).rev() {
            let c = bytes[p] as char;
            if (c == '+' || c == '-') && !matches!(bytes[p - 1] as char, 'e' | 'E') {
                split = Some(p);
                break;
            }
        }
        let parse_im = |t: &str| -> Result<f64> {
            match t {
                "" | "+" => Ok(1.0),
                "-" => Ok(-1.0),
                _ => t.parse().map_err(|_| bad()),
            }
        };
        let (re, im) = match split {
            Some(p) => (body[..p].parse().map_err(|_| bad())?, parse_im(&body[p..])?),
            None => (0.0, parse_im(body)?),
        };
        Self::new(re, im)
    }
}

/// Integer matrix `[[α, β], [γ, δ]]` acting by `τ ↦ (ατ+β)/(γτ+δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mobius {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Mobius {
    pub const IDENTITY: Mobius = Mobius { a: 1, b: 0, c: 0, d: 1 };
    pub const S: Mobius = Mobius { a: 0, b: -1, c: 1, d: 0 };

    pub fn t(n: i64) -> Mobius {
        Mobius { a: 1, b: n, c: 0, d: 1 }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    /// Matrix product `self · other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn apply(&self, tau: C64) -> C64 {
        (tau * self.a as f64 + self.b as f64) / (tau * self.c as f64 + self.d as f64)
    }

    pub fn apply_shape(&self, tau: &ShapeParameter) -> Result<ShapeParameter> {
        ShapeParameter::from_complex(self.apply(tau.as_complex()))
    }
}

/// Gauss reduction into the half-open fundamental domain.
///
/// Ties: `Re τ = ½` is kept over `−½`; on `|τ| = 1` the point with `Re τ ≥ 0` is kept.
pub fn reduce_to_fundamental_domain(tau: &ShapeParameter) -> Result<(ShapeParameter, Mobius)> {
    let mut z = ShapeParameter::new(tau.re, tau.im)?.as_complex();
    let mut g = Mobius::IDENTITY;
    for _ in 0..10_000 {
        let n = (0.5 - z.re).floor();
        if n != 0.0 {
            z.re += n;
            g = Mobius::t(n as i64).compose(&g);
        }
        if (z.re + 0.5).abs() <= BOUNDARY_EPS {
            z.re += 1.0;
            g = Mobius::t(1).compose(&g);
        }
        if z.norm_sqr() < 1.0 - BOUNDARY_EPS {
            z = -z.inv();
            g = Mobius::S.compose(&g);
            continue;
        }
        if (z.norm_sqr() - 1.0).abs() <= BOUNDARY_EPS && z.re < -BOUNDARY_EPS {
            z = -z.inv();
            g = Mobius::S.compose(&g);
        }
        return Ok((ShapeParameter::from_complex(z)?, g));
    }
    Err(Error::Domain(format!("reduction of {tau} did not terminate")))
}

/// Normalized lattice `ω(ℤ+τℤ)`, `ω = √(2π/Im τ)`, and its dual `ωi(ℤ+τℤ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeFrame {
    pub omega: f64,
    pub nu1: C64,
    pub nu2: C64,
    pub kappa1: C64,
    pub kappa2: C64,
}

impl LatticeFrame {
    pub fn cell_area(&self) -> f64 {
        (self.nu1.conj() * self.nu2).im.abs()
    }

    /// Euclidean pairing `κᵢ·νⱼ`; always a multiple of `2π`.
    pub fn pairing(&self, i: usize, j: usize) -> f64 {
        let k = [self.kappa1, self.kappa2][i];
        let n = [self.nu1, self.nu2][j];
        (k.conj() * n).re
    }

    pub fn lattice_point(&self, n: i64, m: i64) -> C64 {
        self.nu1 * n as f64 + self.nu2 * m as f64
    }

    /// Dual vector `t* = ωi(n + mτ)`.
    pub fn dual_point(&self, n: i64, m: i64) -> C64 {
        self.kappa1 * n as f64 - self.kappa2 * m as f64
    }
}

pub fn frame(tau: &ShapeParameter) -> LatticeFrame {
    let omega = (2.0 * PI / tau.im).sqrt();
    let t = tau.as_complex();
    let i = C64::i();
    LatticeFrame {
        omega,
        nu1: C64::new(omega, 0.0),
        nu2: t * omega,
        kappa1: i * omega,
        kappa2: -i * t * omega,
    }
}

/// Bloch characteristic `q = b − aτ`, `k = ωiq`.
///
/// The stored `(a, b)` are not reduced; [`Characteristic::centered`] maps them
/// into `(−½, ½]²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Characteristic {
    pub a: f64,
    pub b: f64,
}

fn center(x: f64) -> f64 {
    x + (0.5 - x).floor()
}

impl Characteristic {
    pub const ZERO: Characteristic = Characteristic { a: 0.0, b: 0.0 };

    pub fn new(a: f64, b: f64) -> Self {
        Characteristic { a, b }
    }

    pub fn centered(&self) -> Self {
        Characteristic { a: center(self.a), b: center(self.b) }
    }

    pub fn q(&self, tau: &ShapeParameter) -> C64 {
        C64::new(self.b, 0.0) - tau.as_complex() * self.a
    }

    pub fn k(&self, tau: &ShapeParameter) -> C64 {
        C64::i() * self.q(tau) * frame(tau).omega
    }

    pub fn from_q(q: C64, tau: &ShapeParameter) -> Self {
        let a = -q.im / tau.im;
        Characteristic { a, b: q.re + a * tau.re }
    }

    pub fn neg(&self) -> Self {
        Characteristic { a: -self.a, b: -self.b }
    }

    /// `k = 0` in the dual torus.
    pub fn is_zero_mod_lattice(&self) -> bool {
        let c = self.centered();
        c.a.abs() < 1e-14 && c.b.abs() < 1e-14
    }

    /// Characteristic at `gτ` describing the same fiber as `self` at `τ`.
    pub fn transport(&self, g: &Mobius) -> Self {
        Characteristic {
            a: g.d as f64 * self.a + g.c as f64 * self.b,
            b: g.b as f64 * self.a + g.a as f64 * self.b,
        }
    }

    /// Distance in `(a, b)` modulo the lattice and the reflection `k → −k`.
    pub fn distance_mod(&self, other: &Characteristic) -> f64 {
        let d = |x: f64| x - x.round();
        [1.0, -1.0]
            .iter()
            .map(|s| d(self.a - s * other.a).hypot(d(self.b - s * other.b)))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Vertices of the Voronoi cell of `ℤ+τℤ` about 0, in the `q`-plane, ordered by angle.
pub fn wigner_seitz_vertices(tau: &ShapeParameter) -> Vec<Characteristic> {
    let t = tau.as_complex();
    let near: Vec<C64> = (-1i64..=1)
        .flat_map(|n| (-1i64..=1).map(move |m| (n, m)))
        .filter(|&(n, m)| (n, m) != (0, 0))
        .map(|(n, m)| t * m as f64 + n as f64)
        .collect();
    let wide: Vec<C64> = (-2i64..=2)
        .flat_map(|n| (-2i64..=2).map(move |m| (n, m)))
        .filter(|&(n, m)| (n, m) != (0, 0))
        .map(|(n, m)| t * m as f64 + n as f64)
        .collect();
    let mut verts: Vec<C64> = Vec::new();
    for (i, u) in near.iter().enumerate() {
        for v in near.iter().skip(i + 1) {
            // Re(p ū) = |u|²/2, Re(p v̄) = |v|²/2
            let det = u.re * v.im - u.im * v.re;
            if det.abs() < 1e-12 {
                continue;
            }
            let (r1, r2) = (u.norm_sqr() / 2.0, v.norm_sqr() / 2.0);
            let p = C64::new((r1 * v.im - r2 * u.im) / det, (u.re * r2 - v.re * r1) / det);
            let inside = wide.iter().all(|w| (p * w.conj()).re <= w.norm_sqr() / 2.0 + 1e-9);
            if inside && verts.iter().all(|x| (x - p).norm() > 1e-9) {
                verts.push(p);
            }
        }
    }
    verts.sort_by(|x, y| x.arg().partial_cmp(&y.arg()).unwrap());
    verts.into_iter().map(|p| Characteristic::from_q(p, tau)).collect()
}

/// The four points of `½ℒ*` modulo `ℒ*`, as `(a, b)`.
pub fn half_lattice_points() -> [Characteristic; 4] {
    [
        Characteristic::new(0.0, 0.0),
        Characteristic::new(0.5, 0.0),
        Characteristic::new(0.0, 0.5),
        Characteristic::new(0.5, 0.5),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_examples() {
        let (t, g) = reduce_to_fundamental_domain(&ShapeParameter::new(5.0, 1.0).unwrap()).unwrap();
        assert_eq!((t.re, t.im), (0.0, 1.0));
        assert_eq!(g, Mobius::t(-5));

        let (t, g) = reduce_to_fundamental_domain(&ShapeParameter::new(0.0, 0.5).unwrap()).unwrap();
        assert!((t.im - 2.0).abs() < 1e-15 && t.re.abs() < 1e-15);
        assert_eq!(g, Mobius::S);

        let h = 3f64.sqrt() / 2.0;
        let (t, _) = reduce_to_fundamental_domain(&ShapeParameter::new(1.5, h).unwrap()).unwrap();
        assert!((t.re - 0.5).abs() < 1e-15 && (t.im - h).abs() < 1e-15);
    }

    #[test]
    fn tie_breaks() {
        let (t, _) = reduce_to_fundamental_domain(&ShapeParameter::new(-0.5, 1.2).unwrap()).unwrap();
        assert_eq!(t.re, 0.5);
        let s = ShapeParameter::polar(1.0, 110.0).unwrap();
        let (t, _) = reduce_to_fundamental_domain(&s).unwrap();
        assert!(t.re >= 0.0);
        assert!((t.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parse_forms() {
        let t: ShapeParameter = "0.5+0.8660254i".parse().unwrap();
        assert_eq!((t.re, t.im), (0.5, 0.8660254));
        let t: ShapeParameter = "i".parse().unwrap();
        assert_eq!((t.re, t.im), (0.0, 1.0));
        let t: ShapeParameter = "-0.2+1.1i".parse().unwrap();
        assert_eq!((t.re, t.im), (-0.2, 1.1));
        let t: ShapeParameter = "2i".parse().unwrap();
        assert_eq!((t.re, t.im), (0.0, 2.0));
        let t: ShapeParameter = "1@90".parse().unwrap();
        assert!(t.re.abs() < 1e-15 && (t.im - 1.0).abs() < 1e-15);
        assert!("0.3-1i".parse::<ShapeParameter>().is_err());
        assert!("abc".parse::<ShapeParameter>().is_err());
        let t: ShapeParameter = "1e-1+2E+0i".parse().unwrap();
        assert_eq!((t.re, t.im), (0.1, 2.0));
    }

    #[test]
    fn frame_examples() {
        let f = frame(&ShapeParameter::square());
        assert!((f.omega - (2.0 * PI).sqrt()).abs() < 1e-15);
        assert!((f.cell_area() - 2.0 * PI).abs() < 1e-12);
        let f = frame(&ShapeParameter::hexagonal());
        assert!((f.omega - 2.6936).abs() < 1e-4);
    }

    #[test]
    fn ws_vertices() {
        let hex = ShapeParameter::hexagonal();
        let v = wigner_seitz_vertices(&hex);
        assert_eq!(v.len(), 6);
        let target = C64::new(0.5, -0.5 / 3f64.sqrt());
        assert!(v.iter().any(|c| (c.q(&hex) - target).norm() < 1e-12));

        let sq = ShapeParameter::square();
        let v = wigner_seitz_vertices(&sq);
        assert_eq!(v.len(), 4);
        assert!(v.iter().any(|c| (c.q(&sq) - C64::new(0.5, 0.5)).norm() < 1e-12));

        let t = ShapeParameter::new(0.0, 2.0).unwrap();
        let v = wigner_seitz_vertices(&t);
        for c in &v {
            let mq = -c.q(&t);
            assert!(v.iter().any(|d| (d.q(&t) - mq).norm() < 1e-12));
        }
    }

    #[test]
    fn half_lattice() {
        let tau = ShapeParameter::new(0.2, 1.3).unwrap();
        let pts = half_lattice_points();
        assert!(pts.iter().any(|p| p.is_zero_mod_lattice()));
        for p in pts {
            let two = Characteristic::new(2.0 * p.a, 2.0 * p.b);
            assert!(two.is_zero_mod_lattice());
            let _ = p.k(&tau);
        }
    }
}
