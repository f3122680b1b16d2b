use abrikosov::fiber_spectrum::{mu_pm, FiberHessian, GalerkinBasis};
use abrikosov::lattice_geometry::reduce_to_fundamental_domain;
use abrikosov::quadrature_oracle::gamma_k_quadrature;
use abrikosov::stability_functions::{self as sf, Verdict};
use abrikosov::{Characteristic, Error, ShapeParameter};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::output::{certified, num, Report, Table};
use crate::{Failure, Global};

fn tau_json(t: &ShapeParameter) -> Value {
    json!({ "re": t.re, "im": t.im })
}

pub fn reduce(tau: &ShapeParameter) -> Result<Report, Failure> {
    let (t, g) = reduce_to_fundamental_domain(tau)?;
    let mut table = Table::new(&["tau_re", "tau_im", "reduced_re", "reduced_im", "a", "b", "c", "d"]);
    table.push(vec![num(tau.re), num(tau.im), num(t.re), num(t.im), g.a.to_string(), g.b.to_string(), g.c.to_string(), g.d.to_string()]);
    Ok(Report { json: json!({ "tau": tau_json(tau), "reduced": tau_json(&t), "matrix": [[g.a, g.b], [g.c, g.d]] }), table })
}

/// Record shared by `gamma`, `minimize` and `scan`.
pub struct PointRecord {
    pub tau: ShapeParameter,
    pub reduced: bool,
    pub gamma: abrikosov::CertifiedValue<f64>,
    pub argmin: Characteristic,
    pub beta: abrikosov::CertifiedValue<f64>,
    pub kappa_c: abrikosov::CertifiedValue<f64>,
}

pub const POINT_HEADERS: [&str; 8] = ["tau_re", "tau_im", "gamma", "bound", "argmin_a", "argmin_b", "beta", "kappa_c"];

impl PointRecord {
    pub fn compute(tau: &ShapeParameter, tol: f64) -> Result<Self, Error> {
        let m = sf::gamma(tau, tol)?;
        Ok(PointRecord {
            tau: *tau,
            reduced: !tau.is_reduced(),
            gamma: m.value,
            argmin: m.argmin_q,
            beta: sf::beta(tau, tol)?,
            kappa_c: sf::kappa_c(tau, tol)?,
        })
    }

    pub fn row(&self) -> Vec<String> {
        vec![
            num(self.tau.re),
            num(self.tau.im),
            num(self.gamma.value),
            num(self.gamma.remainder_bound),
            num(self.argmin.a),
            num(self.argmin.b),
            num(self.beta.value),
            num(self.kappa_c.value),
        ]
    }

    pub fn json(&self) -> Value {
        json!({
            "tau": tau_json(&self.tau),
            "reduced": self.reduced,
            "gamma": certified(&self.gamma),
            "argmin": { "a": self.argmin.a, "b": self.argmin.b },
            "beta": certified(&self.beta),
            "kappa_c": certified(&self.kappa_c),
        })
    }
}

pub fn gamma(tau: &ShapeParameter, q: Option<&Characteristic>, g: &Global) -> Result<Report, Failure> {
    let (t, m) = reduce_to_fundamental_domain(tau)?;
    let note = (!tau.is_reduced()).then(|| format!("reduced to {t} by [[{}, {}], [{}, {}]]", m.a, m.b, m.c, m.d));
    if let Some(q) = q {
        let r = sf::gamma_k(tau, q, g.tol)?;
        let mut table = Table::new(&["tau_re", "tau_im", "a", "b", "gamma_k", "bound"]);
        table.push(vec![num(tau.re), num(tau.im), num(q.a), num(q.b), num(r.gamma_k.value), num(r.gamma_k.remainder_bound)]);
        let json = json!({
            "tau": tau_json(tau),
            "q": { "a": q.a, "b": q.b },
            "gamma_k": certified(&r.gamma_k),
            "note": note,
        });
        return Ok(Report { json, table });
    }
    let rec = PointRecord::compute(tau, g.tol)?;
    let mut table = Table::new(&POINT_HEADERS);
    table.push(rec.row());
    let mut json = rec.json();
    json["note"] = json!(note);
    Ok(Report { json, table })
}

pub fn beta(tau: &ShapeParameter, g: &Global) -> Result<Report, Failure> {
    let b = sf::beta(tau, g.tol)?;
    let mut table = Table::new(&["tau_re", "tau_im", "beta", "bound"]);
    table.push(vec![num(tau.re), num(tau.im), num(b.value), num(b.remainder_bound)]);
    Ok(Report { json: json!({ "tau": tau_json(tau), "beta": certified(&b) }), table })
}

pub fn kappa_c(tau: &ShapeParameter, g: &Global) -> Result<Report, Failure> {
    let k = sf::kappa_c(tau, g.tol)?;
    let mut table = Table::new(&["tau_re", "tau_im", "kappa_c", "bound"]);
    table.push(vec![num(tau.re), num(tau.im), num(k.value), num(k.remainder_bound)]);
    Ok(Report { json: json!({ "tau": tau_json(tau), "kappa_c": certified(&k) }), table })
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::AsymptoticallyStable => "asymptotically_stable",
        Verdict::EnergeticallyUnstable => "energetically_unstable",
        Verdict::OutsideRegime => "outside_regime",
        Verdict::Indeterminate => "indeterminate",
    }
}

pub fn classify(tau: &ShapeParameter, kappa: f64, b: f64, g: &Global) -> Result<Report, Failure> {
    let v = sf::classify(tau, kappa, b, g.tol, g.b_ratio)?;
    let mut table = Table::new(&["tau_re", "tau_im", "kappa", "b", "verdict", "gamma", "bound", "b_ratio"]);
    table.push(vec![
        num(tau.re),
        num(tau.im),
        num(kappa),
        num(b),
        verdict_name(v.verdict).into(),
        v.gamma.map_or(String::new(), |c| num(c.value)),
        v.gamma.map_or(String::new(), |c| num(c.remainder_bound)),
        num(v.b_ratio),
    ]);
    let json = json!({
        "tau": tau_json(tau),
        "kappa": kappa,
        "b": b,
        "verdict": verdict_name(v.verdict),
        "gamma": v.gamma.as_ref().map(certified),
        "kappa_sq_minus_half": v.kappa_sq_minus_half,
        "b_ratio": v.b_ratio,
    });
    Ok(Report { json, table })
}

pub fn minimize(tau: &ShapeParameter, g: &Global) -> Result<Report, Failure> {
    let m = sf::gamma(tau, g.tol)?;
    let mut table = Table::new(&["start_a", "start_b", "value"]);
    for (s, v) in &m.multistart_trace {
        table.push(vec![num(s.a), num(s.b), num(*v)]);
    }
    let json = json!({
        "tau": tau_json(tau),
        "tau_reduced": tau_json(&m.tau_reduced),
        "gamma": certified(&m.value),
        "argmin": { "a": m.argmin_q.a, "b": m.argmin_q.b },
        "trace": m.multistart_trace.iter().map(|(s, v)| json!({ "a": s.a, "b": s.b, "value": v })).collect::<Vec<_>>(),
    });
    Ok(Report { json, table })
}

pub fn zeroset(re: Option<f64>, im: Option<f64>, bracket: (f64, f64), g: &Global) -> Result<Report, Failure> {
    let point = |s: f64| -> Result<ShapeParameter, Error> {
        match (re, im) {
            (Some(r), None) => ShapeParameter::new(r, s),
            (None, Some(i)) => ShapeParameter::new(s, i),
            _ => Err(Error::Domain("exactly one of --re, --im is required".into())),
        }
    };
    let eval = |s: f64| -> Result<abrikosov::CertifiedValue<f64>, Error> { Ok(sf::gamma(&point(s)?, g.tol)?.value) };
    let (mut lo, mut hi) = bracket;
    let (glo, ghi) = (eval(lo)?, eval(hi)?);
    let certified_sign = |c: &abrikosov::CertifiedValue<f64>| c.value.abs() > c.remainder_bound;
    if !certified_sign(&glo) || !certified_sign(&ghi) || glo.value.signum() == ghi.value.signum() {
        return Err(Error::Bracket { lo, hi }.into());
    }
    let s_lo = glo.value.signum();
    let mut mid_val = glo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        mid_val = eval(mid)?;
        if mid_val.value.abs() <= 10.0 * mid_val.remainder_bound || hi - lo < 1e-12 {
            lo = mid;
            hi = mid;
            break;
        }
        if mid_val.value.signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let p = point(root)?;
    let mut table = Table::new(&["tau_re", "tau_im", "gamma", "bound"]);
    table.push(vec![num(p.re), num(p.im), num(mid_val.value), num(mid_val.remainder_bound)]);
    let json = json!({
        "root": tau_json(&p),
        "interval": [lo, hi],
        "gamma": certified(&mid_val),
    });
    Ok(Report { json, table })
}

const ORACLE_SAMPLES: usize = 5;

pub fn audit(tau: &ShapeParameter, samples: usize, g: &Global) -> Result<(Report, bool), Failure> {
    let (t, _) = reduce_to_fundamental_domain(tau)?;
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let mut table = Table::new(&["check", "a", "b", "residual", "bound", "pass"]);
    let mut entries = Vec::new();
    let mut all = true;
    let tol = g.tol.min(1e-10);
    let mut record = |name: &str, q: Option<Characteristic>, residual: f64, bound: Option<f64>, pass: Option<bool>| {
        if pass == Some(false) {
            all = false;
        }
        table.push(vec![
            name.to_string(),
            q.map_or(String::new(), |c| num(c.a)),
            q.map_or(String::new(), |c| num(c.b)),
            num(residual),
            bound.map_or(String::new(), num),
            pass.map_or("info".into(), |p| p.to_string()),
        ]);
        entries.push(json!({
            "check": name,
            "q": q.map(|c| json!({ "a": c.a, "b": c.b })),
            "residual": residual,
            "bound": bound,
            "pass": pass,
        }));
    };
    for i in 0..samples {
        let q = Characteristic::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        for (name, r) in sf::symmetry_residuals(&t, &q, tol)? {
            record(&name, Some(q), r.residual, Some(r.bound), Some(r.passes()));
        }
        if i < ORACLE_SAMPLES {
            let s = sf::gamma_k(&t, &q, 1e-10)?.gamma_k;
            let o = gamma_k_quadrature(&t, &q, 1e-9)?;
            let bound = 1e-6f64.max(s.remainder_bound);
            record("oracle_equivalence", Some(q), (s.value - o).abs(), Some(bound), Some((s.value - o).abs() <= bound));
        }
    }
    for (name, v) in sf::critical_point_residuals(&t)? {
        let bound = if name.starts_with("grad_k") {
            Some(1e-4)
        } else if name == "grad_tau_hexagonal" || name == "d_im_tau_square" {
            Some(1e-3)
        } else {
            None
        };
        record(&name, None, v, bound, bound.map(|b| v <= b));
    }
    let json = json!({ "tau": tau_json(tau), "tau_reduced": tau_json(&t), "seed": g.seed, "checks": entries, "all_pass": all });
    Ok((Report { json, table }, all))
}

pub fn spectrum(
    tau: &ShapeParameter,
    q: &Characteristic,
    kappa: f64,
    eps: &[f64],
    landau: usize,
    shells: usize,
    g: &Global,
) -> Result<Report, Failure> {
    let h = FiberHessian::assemble(tau, q, kappa, GalerkinBasis { n_landau: landau, n_fourier: shells })?;
    let mu = mu_pm(tau, q, kappa, g.tol.min(1e-10))?;
    let mut table = Table::new(&["eps", "lambda_plus", "lambda_minus", "lambda_plus_over_eps2", "mu_plus", "error"]);
    let dev = h.unperturbed_deviation();
    table.push(vec!["0".into(), "0".into(), "0".into(), String::new(), num(mu.plus), num(dev)]);
    let mut rows = Vec::new();
    for &e in eps {
        let s = h.spectrum(e)?;
        let r = s.lambda_plus / (e * e);
        table.push(vec![num(e), num(s.lambda_plus), num(s.lambda_minus), num(r), num(mu.plus), num(r - mu.plus)]);
        rows.push(json!({
            "eps": e,
            "lambda_plus": s.lambda_plus,
            "lambda_minus": s.lambda_minus,
            "lambda_plus_over_eps2": r,
            "lambda_minus_over_eps2": s.lambda_minus / (e * e),
            "error": r - mu.plus,
            "edge_weight": s.edge_weight,
        }));
    }
    // field b for the smallest nonzero ε, fed through classify
    let classify = match eps.iter().cloned().filter(|e| *e > 0.0).reduce(f64::min) {
        Some(e) => {
            let beta = sf::beta(tau, 1e-12)?.value;
            let k2 = kappa * kappa;
            let b = k2 * (1.0 - e * e * ((2.0 * k2 - 1.0) * beta + 1.0));
            let v = sf::classify(tau, kappa, b, g.tol, g.b_ratio)?;
            json!({ "b": b, "verdict": verdict_name(v.verdict) })
        }
        None => Value::Null,
    };
    let json = json!({
        "tau": tau_json(tau),
        "q": { "a": q.a, "b": q.b },
        "kappa": kappa,
        "basis": { "landau_levels": landau, "shells": shells, "dim": h.basis.dim() },
        "unperturbed_deviation": dev,
        "f1_max": h.f1_max(),
        "mu_plus": mu.plus,
        "mu_minus": mu.minus,
        "mu_bound": mu.remainder_bound,
        "rows": rows,
        "classify": classify,
    });
    Ok(Report { json, table })
}
