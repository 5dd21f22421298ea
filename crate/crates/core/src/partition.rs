//! Homogeneous and semi-homogeneous partition functions, one-point functions,
//! closed forms and recursion residuals.

use std::fmt;
use std::str::FromStr;

use rug::{Integer, Rational};

use crate::error::{ArcticError, Result};
use crate::trig_core::{
    default_precision, det, factorial, factorial_square_product, m_derivatives,
    mu_derivative_matrix, near_zero_angle, seed_mixed, seed_second, Dual, Mp, Real,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    SixV,
    SixVP,
    TwentyV,
    Dt,
}

impl Model {
    /// Path-count multiplier: height of the rescaled domain in units of `n`.
    pub fn mu(self) -> usize {
        match self {
            Model::SixV | Model::Dt => 1,
            Model::SixVP | Model::TwentyV => 2,
        }
    }
    pub fn name(self) -> &'static str {
        match self {
            Model::SixV => "6v",
            Model::SixVP => "6vp",
            Model::TwentyV => "20v",
            Model::Dt => "dt",
        }
    }
    pub const ALL: [Model; 4] = [Model::SixV, Model::SixVP, Model::TwentyV, Model::Dt];
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = ArcticError;
    fn from_str(s: &str) -> Result<Model> {
        match s.trim().to_ascii_lowercase().as_str() {
            "6v" | "sixv" => Ok(Model::SixV),
            "6vp" | "6v'" | "sixvp" => Ok(Model::SixVP),
            "20v" | "twentyv" => Ok(Model::TwentyV),
            "dt" | "domino" => Ok(Model::Dt),
            other => Err(ArcticError::Argument(format!("unknown model '{other}'"))),
        }
    }
}

/// Model id, spectral parameters and normalisations.
#[derive(Clone, Debug)]
pub struct ModelParams {
    pub model: Model,
    pub eta: Mp,
    pub u: Mp,
    pub v: Mp,
    pub rho: Mp,
    pub rho_o: Mp,
    pub rho_e: Mp,
    pub nu: Mp,
}

impl ModelParams {
    /// Validated parameters with all normalisations set to 1.
    pub fn new(model: Model, eta: Mp, u: Mp, v: Mp) -> Result<ModelParams> {
        let one = Mp::one(eta.prec());
        let p = ModelParams {
            model,
            eta,
            u,
            v,
            rho: one.clone(),
            rho_o: one.clone(),
            rho_e: one.clone(),
            nu: one,
        };
        p.validate()?;
        Ok(p)
    }

    /// Same as [`ModelParams::new`] without the domain check (used for perturbed or limiting points).
    pub fn unchecked(model: Model, eta: Mp, u: Mp, v: Mp) -> ModelParams {
        let one = Mp::one(eta.prec());
        ModelParams {
            model,
            eta,
            u,
            v,
            rho: one.clone(),
            rho_o: one.clone(),
            rho_e: one.clone(),
            nu: one,
        }
    }

    pub fn with_rho(mut self, rho: Mp) -> Self {
        self.rho = rho;
        self
    }
    pub fn with_rho_oe(mut self, rho_o: Mp, rho_e: Mp) -> Self {
        self.rho_o = rho_o;
        self.rho_e = rho_e;
        self
    }
    pub fn with_nu(mut self, nu: Mp) -> Self {
        self.nu = nu;
        self
    }
    pub fn with_model(&self, model: Model) -> Self {
        ModelParams { model, ..self.clone() }
    }
    pub fn with_uv(&self, u: Mp, v: Mp) -> Self {
        ModelParams { u, v, ..self.clone() }
    }

    pub fn prec(&self) -> u32 {
        self.eta.prec()
    }

    pub fn at_precision(&self, prec: u32) -> ModelParams {
        let p = |x: &Mp| x.with_prec(prec);
        ModelParams {
            model: self.model,
            eta: p(&self.eta),
            u: p(&self.u),
            v: p(&self.v),
            rho: p(&self.rho),
            rho_o: p(&self.rho_o),
            rho_e: p(&self.rho_e),
            nu: p(&self.nu),
        }
    }

    /// `u - v`.
    pub fn w(&self) -> Mp {
        &self.u - &self.v
    }

    pub fn validate(&self) -> Result<()> {
        let prec = self.prec();
        let pi = Mp::pi(prec);
        let zero = Mp::zero(prec);
        let half_pi = Mp::pi_frac(1, 2, prec);
        let eta = &self.eta;
        let bad = |what: &str| {
            Err(ArcticError::Argument(format!(
                "parameters out of the {} domain: {what} (eta={}, u={}, v={})",
                self.model,
                eta.to_sig(12),
                self.u.to_sig(12),
                self.v.to_sig(12)
            )))
        };
        for (name, x) in [("rho", &self.rho), ("rho_o", &self.rho_o), ("rho_e", &self.rho_e), ("nu", &self.nu)] {
            if x.sign() <= 0 {
                return bad(&format!("{name} must be positive"));
            }
        }
        if !(eta > &zero && eta < &half_pi) {
            return bad("need 0 < eta < pi/2");
        }
        let w = self.w();
        let s = &self.u + &self.v;
        if !(&w > eta && w < &pi - eta) {
            return bad("need eta < u-v < pi-eta");
        }
        if matches!(self.model, Model::SixVP | Model::TwentyV | Model::Dt) && !(s > eta - &pi && s < -eta.clone()) {
            return bad("need eta-pi < u+v < -eta");
        }
        if matches!(self.model, Model::TwentyV | Model::Dt) && !(self.u > zero && self.u < &half_pi - eta) {
            return bad("need 0 < u < pi/2-eta");
        }
        if self.model == Model::Dt {
            let uni = NamedPoint::Uniform20V.params(prec);
            let tol = Mp::pow2(-60, prec);
            for (a, b) in [(&self.eta, &uni.eta), (&self.u, &uni.u), (&self.v, &uni.v), (&self.nu, &uni.nu)] {
                if (a - b).abs() > tol {
                    return Err(ArcticError::Argument(
                        "domino tilings are only defined at the uniform point eta=u=pi/8, v=-pi/2, nu=sqrt2".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Combinatorial points with their literature labels.
#[derive(Clone, Debug, PartialEq)]
pub enum NamedPoint {
    Asm,
    TauAsm(f64),
    Vsasm,
    TauVsasm(f64),
    TwentyVDwbc12,
    TwentyVDwbc3,
    Uniform20V,
    FreeFermion6VP,
}

impl NamedPoint {
    pub fn label(&self) -> &'static str {
        match self {
            NamedPoint::Asm => "ASM",
            NamedPoint::TauAsm(_) => "tau-ASM",
            NamedPoint::Vsasm => "VSASM",
            NamedPoint::TauVsasm(_) => "tau-VSASM",
            NamedPoint::TwentyVDwbc12 => "20V-DWBC1,2",
            NamedPoint::TwentyVDwbc3 => "20V-DWBC3",
            NamedPoint::Uniform20V => "uniform-20V",
            NamedPoint::FreeFermion6VP => "free-fermion",
        }
    }

    /// Parses `asm`, `vsasm`, `20v-dwbc12`, `20v-dwbc3`, `uniform`, `free-fermion`,
    /// and `tau-asm` / `tau-vsasm` (which take `eta`).
    pub fn parse(s: &str, eta: Option<f64>) -> Result<NamedPoint> {
        let need_eta = || eta.ok_or_else(|| ArcticError::Argument(format!("point '{s}' needs --eta")));
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "asm" => Ok(NamedPoint::Asm),
            "tau-asm" => Ok(NamedPoint::TauAsm(need_eta()?)),
            "vsasm" => Ok(NamedPoint::Vsasm),
            "tau-vsasm" => Ok(NamedPoint::TauVsasm(need_eta()?)),
            "20v-dwbc12" | "dwbc12" => Ok(NamedPoint::TwentyVDwbc12),
            "20v-dwbc3" | "dwbc3" => Ok(NamedPoint::TwentyVDwbc3),
            "uniform" | "uniform-20v" | "uniform20v" => Ok(NamedPoint::Uniform20V),
            "free-fermion" | "ff" => Ok(NamedPoint::FreeFermion6VP),
            other => Err(ArcticError::Argument(format!("unknown named point '{other}'"))),
        }
    }

    pub fn params(&self, prec: u32) -> ModelParams {
        let pf = |a, b| Mp::pi_frac(a, b, prec);
        let sqrt2 = Mp::int(2, prec).sqrt();
        match self {
            NamedPoint::Asm => {
                let eta = pf(1, 6);
                let rho = eta.cos().recip();
                ModelParams::unchecked(Model::SixV, eta, pf(1, 2), Mp::zero(prec)).with_rho(rho)
            }
            NamedPoint::TauAsm(e) => {
                let eta = Mp::new(*e, prec);
                let rho = eta.cos().recip();
                ModelParams::unchecked(Model::SixV, eta, pf(1, 2), Mp::zero(prec)).with_rho(rho)
            }
            NamedPoint::Vsasm => {
                let eta = pf(1, 6);
                let r = eta.cos().recip();
                ModelParams::unchecked(Model::SixVP, eta, Mp::zero(prec), pf(-1, 2)).with_rho_oe(r.clone(), r)
            }
            NamedPoint::TauVsasm(e) => {
                let eta = Mp::new(*e, prec);
                let r = eta.cos().recip();
                ModelParams::unchecked(Model::SixVP, eta, Mp::zero(prec), pf(-1, 2)).with_rho_oe(r.clone(), r)
            }
            NamedPoint::TwentyVDwbc12 => {
                ModelParams::unchecked(Model::SixV, pf(1, 8), pf(5, 8), Mp::zero(prec)).with_rho(sqrt2)
            }
            NamedPoint::TwentyVDwbc3 => ModelParams::unchecked(Model::SixVP, pf(1, 8), pf(1, 8), pf(-1, 2))
                .with_rho_oe(sqrt2.clone(), sqrt2),
            NamedPoint::Uniform20V => {
                ModelParams::unchecked(Model::TwentyV, pf(1, 8), pf(1, 8), pf(-1, 2)).with_nu(sqrt2)
            }
            NamedPoint::FreeFermion6VP => ModelParams::unchecked(Model::SixVP, pf(1, 4), Mp::zero(prec), pf(-1, 2)),
        }
    }
}

/// Vertex weights per class.
#[derive(Clone, Debug)]
pub enum WeightTable {
    SixV { a: Mp, b: Mp, c: Mp },
    SixVP { a_o: Mp, b_o: Mp, c_o: Mp, a_e: Mp, b_e: Mp, c_e: Mp },
    TwentyV { omega: [Mp; 7] },
}

impl WeightTable {
    pub fn all(&self) -> Vec<Mp> {
        match self {
            WeightTable::SixV { a, b, c } => vec![a.clone(), b.clone(), c.clone()],
            WeightTable::SixVP { a_o, b_o, c_o, a_e, b_e, c_e } => {
                vec![a_o.clone(), b_o.clone(), c_o.clone(), a_e.clone(), b_e.clone(), c_e.clone()]
            }
            WeightTable::TwentyV { omega } => omega.to_vec(),
        }
    }
}

/// `ω_0..ω_6` without the overall `ν`.
pub fn omega20<T: Real>(u: &T, v: &T, eta: &T) -> [T; 7] {
    let w = u.clone() - v.clone();
    let s = u.clone() + v.clone();
    let two = |x: &T| x.clone() + x.clone();
    let s2e = two(eta).sin();
    let s2u2e = two(&(u.clone() + eta.clone())).sin();
    let s2u = two(u).sin();
    let wp = (w.clone() + eta.clone()).sin();
    let wm = (w - eta.clone()).sin();
    let ep = (eta.clone() - s.clone()).sin(); // sin(η-u-v)
    let em = (-s - eta.clone()).sin(); // sin(-u-v-η)
    [
        wp.clone() * ep.clone() * s2u2e.clone(),
        wm.clone() * em.clone() * s2u2e.clone(),
        wm.clone() * s2u2e.clone() * s2e.clone(),
        s2e.clone() * s2e.clone() * s2e.clone() + wp * em * s2u.clone(),
        s2u2e * ep.clone() * s2e.clone(),
        wm.clone() * ep.clone() * s2e,
        wm * ep * s2u,
    ]
}

pub fn weights(params: &ModelParams) -> WeightTable {
    let (eta, w) = (&params.eta, params.w());
    let s = &params.u + &params.v;
    let s2e = (eta + eta).sin();
    match params.model {
        Model::SixV => WeightTable::SixV {
            a: &params.rho * &(&w + eta).sin(),
            b: &params.rho * &(&w - eta).sin(),
            c: &params.rho * &s2e,
        },
        Model::SixVP => WeightTable::SixVP {
            a_o: &params.rho_o * &(&w + eta).sin(),
            b_o: &params.rho_o * &(&w - eta).sin(),
            c_o: &params.rho_o * &s2e,
            a_e: &params.rho_e * &(eta - &s).sin(),
            b_e: &params.rho_e * &(-s - eta.clone()).sin(),
            c_e: &params.rho_e * &s2e,
        },
        Model::TwentyV | Model::Dt => {
            let om = omega20(&params.u, &params.v, eta);
            WeightTable::TwentyV { omega: om.map(|x| &params.nu * &x) }
        }
    }
}

fn sign_pow(e: usize) -> i64 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

fn inv_fact_sq<T: Real>(like: &T, n: usize) -> T {
    like.lift(Mp::from_integer(&factorial_square_product(n), like.prec())).recip()
}

/// 6V `Δ_n[w] = det(∂^{i+j} m(w)) / ∏(i!)²`, generic in the scalar type.
pub fn delta_6v<T: Real>(w: &T, eta: &T, n: usize) -> Result<T> {
    if n == 0 {
        return Ok(w.one_like());
    }
    let md = m_derivatives(w, eta, 2 * n - 2)?;
    let m: Vec<Vec<T>> = (0..n).map(|i| (0..n).map(|j| md[i + j].clone()).collect()).collect();
    Ok(det(m) * inv_fact_sq(w, n))
}

/// 6V′ `Δ_n[u,v] = D_n[u,v] / ∏(i!)²`, generic (vanishes on `u = 0` and `v = -π/2`).
pub fn delta_6vp<T: Real>(u: &T, v: &T, eta: &T, n: usize) -> Result<T> {
    if n == 0 {
        return Ok(u.one_like());
    }
    let m = mu_derivative_matrix(u, v, eta, n)?;
    Ok(det(m) * inv_fact_sq(u, n))
}

/// 6V reduced one-point function `(-1)^{n-1}(n-1)! D_n[w;ξ]/D_n[w]`.
pub fn reduced_one_point_6v<T: Real>(w: &T, eta: &T, n: usize, xi: &T) -> Result<T> {
    if n == 0 {
        return Err(ArcticError::Argument("n must be at least 1".into()));
    }
    let md = m_derivatives(w, eta, 2 * n - 2)?;
    let ms = m_derivatives(&(w.clone() - xi.clone()), eta, n - 1)?;
    let d0: Vec<Vec<T>> = (0..n).map(|i| (0..n).map(|j| md[i + j].clone()).collect()).collect();
    let d1: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if j + 1 < n { md[i + j].clone() } else { ms[i].clone() }).collect())
        .collect();
    let f = w.lift(Mp::from_integer(&factorial(n as u32 - 1), w.prec())).scale(sign_pow(n - 1));
    Ok(f * det(d1) / det(d0))
}

/// 6V′ reduced one-point function `(-1)^{n-1}(n-1)! D_n[u,v;ξ]/D_n[u,v]`, generic (off the singular lines).
pub fn reduced_one_point_6vp<T: Real>(u: &T, v: &T, eta: &T, n: usize, xi: &T) -> Result<T> {
    if n == 0 {
        return Err(ArcticError::Argument("n must be at least 1".into()));
    }
    let d0 = mu_derivative_matrix(u, v, eta, n)?;
    let ms = m_derivatives(&(u.clone() - v.clone() - xi.clone()), eta, n - 1)?;
    let ps = m_derivatives(&(u.clone() + v.clone() + xi.clone()), eta, n - 1)?;
    let mut d1 = d0.clone();
    for (i, row) in d1.iter_mut().enumerate() {
        row[n - 1] = ms[i].clone() - ps[i].clone();
    }
    let f = u.lift(Mp::from_integer(&factorial(n as u32 - 1), u.prec())).scale(sign_pow(n - 1));
    Ok(f * det(d1) / det(d0))
}

/// Mixed derivatives of `m_U` at a point: `raw(i,j) = ∂_u^i ∂_v^j m_U(u,v)`.
struct MuTable {
    dm: Vec<Mp>,
    dp: Vec<Mp>,
}

impl MuTable {
    fn new(u: &Mp, v: &Mp, eta: &Mp, k: usize) -> Result<MuTable> {
        Ok(MuTable { dm: m_derivatives(&(u - v), eta, k)?, dp: m_derivatives(&(u + v), eta, k)? })
    }
    fn raw(&self, i: usize, j: usize) -> Mp {
        let a = &self.dm[i + j];
        let b = &self.dp[i + j];
        if j % 2 == 0 {
            a - b
        } else {
            -(a.clone()) - b.clone()
        }
    }
}

fn fact_mp(k: usize, prec: u32) -> Mp {
    Mp::from_integer(&factorial(k as u32), prec)
}

fn on_u_line(u: &Mp) -> bool {
    near_zero_angle(u)
}

fn on_v_line(v: &Mp) -> bool {
    near_zero_angle(&(v + &Mp::pi_frac(1, 2, v.prec())))
}

/// `Δ̃_n = Δ_n[u,v] / (sin 2u sin 2v)^{n(n+1)/2}`, finite and positive in the domain,
/// with explicit limits on `u = 0` and `v = -π/2`.
pub fn delta_tilde(u: &Mp, v: &Mp, eta: &Mp, n: usize) -> Result<Mp> {
    let prec = u.prec().max(v.prec()).max(eta.prec());
    if n == 0 {
        return Ok(Mp::one(prec));
    }
    let (onu, onv) = (on_u_line(u), on_v_line(v));
    // near (but off) a singular line the determinant cancels like (sin 2u sin 2v)^N
    let lost = |x: &Mp, on: bool| {
        if on {
            0
        } else {
            let s = (x + x).sin().abs();
            (-s.0.log2().to_f64()).max(0.0).ceil() as u32
        }
    };
    let extra = (n * (n + 1) / 2) as u32 * (lost(u, onu) + lost(v, onv));
    if extra > 16 {
        let wp = prec + extra + 64;
        let r = delta_tilde_raw(&u.with_prec(wp), &v.with_prec(wp), &eta.with_prec(wp), n, onu, onv)?;
        return Ok(r.with_prec(prec));
    }
    delta_tilde_raw(u, v, eta, n, onu, onv)
}

fn delta_tilde_raw(u: &Mp, v: &Mp, eta: &Mp, n: usize, onu: bool, onv: bool) -> Result<Mp> {
    let prec = u.prec().max(v.prec()).max(eta.prec());
    let tab = MuTable::new(u, v, eta, 4 * n + 2)?;
    let ri: Vec<usize> = (0..n).map(|i| if onu { 2 * i + 1 } else { i }).collect();
    let cj: Vec<usize> = (0..n).map(|j| if onv { 2 * j + 1 } else { j }).collect();
    let m: Vec<Vec<Mp>> = ri
        .iter()
        .map(|&i| cj.iter().map(|&j| tab.raw(i, j) / (fact_mp(i, prec) * fact_mp(j, prec))).collect())
        .collect();
    let mut val = det(m).scale(sign_pow(n * (n - 1) / 2));
    let big_n = (n * (n + 1) / 2) as i64;
    let two_u = u + u;
    let two_v = v + v;
    if onu {
        val = val * Mp::pow2(-(n as i64), prec);
    } else {
        val = val / two_u.sin().powi(big_n);
    }
    if onv {
        val = val.scale(sign_pow(big_n as usize)) * Mp::pow2(-(n as i64), prec);
    } else {
        val = val / two_v.sin().powi(big_n);
    }
    Ok(val)
}

/// `H_n[u,v;ξ] · sin(2v)^n`, with limits on the singular lines.
fn reduced_6vp_times_s2v(u: &Mp, v: &Mp, eta: &Mp, n: usize, xi: &Mp) -> Result<Mp> {
    let prec = u.prec().max(v.prec()).max(eta.prec()).max(xi.prec());
    let (onu, onv) = (on_u_line(u), on_v_line(v));
    let k = 4 * n + 2;
    let tab = MuTable::new(u, v, eta, k)?;
    let ms = m_derivatives(&(u - v - xi.clone()), eta, 2 * n)?;
    let ps = m_derivatives(&(u + v + xi.clone()), eta, 2 * n)?;
    let ri: Vec<usize> = (0..n).map(|i| if onu { 2 * i + 1 } else { i }).collect();
    let last = |i: usize| &ms[i] - &ps[i];
    if !onv {
        let row0 = |i: usize| -> Vec<Mp> {
            (0..n).map(|j| tab.raw(i, j).scale(sign_pow(j))).collect()
        };
        let m0: Vec<Vec<Mp>> = ri.iter().map(|&i| row0(i)).collect();
        let m1: Vec<Vec<Mp>> = ri
            .iter()
            .map(|&i| {
                let mut r = row0(i);
                r[n - 1] = last(i);
                r
            })
            .collect();
        let f = fact_mp(n - 1, prec).scale(sign_pow(n - 1));
        return Ok(f * det(m1) / det(m0) * (v + v).sin().powi(n as i64));
    }
    let cell = |i: usize, j: usize| tab.raw(i, j) / (fact_mp(i, prec) * fact_mp(j, prec));
    let m1: Vec<Vec<Mp>> = ri
        .iter()
        .map(|&i| {
            let mut r: Vec<Mp> = (0..n - 1).map(|j| cell(i, 2 * j + 1)).collect();
            r.push(last(i) / fact_mp(i, prec));
            r
        })
        .collect();
    let m0: Vec<Vec<Mp>> = ri.iter().map(|&i| (0..n).map(|j| cell(i, 2 * j + 1)).collect()).collect();
    let num = det(m1) * Mp::pow2(((n - 1) * n.saturating_sub(2) / 2) as i64, prec);
    let den = det(m0) * Mp::pow2((n * (n - 1) / 2) as i64, prec);
    Ok(num / den * Mp::int(-2, prec).powi(n as i64))
}

/// Generic (raw) delta for 6V / 6V′.
pub fn delta(params: &ModelParams, n: usize) -> Result<Mp> {
    match params.model {
        Model::SixV => delta_6v(&params.w(), &params.eta, n),
        Model::SixVP => delta_6vp(&params.u, &params.v, &params.eta, n),
        m => Err(ArcticError::Argument(format!("delta is defined for 6v and 6vp, not {m}"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedFormCase {
    Classical,
    FreeFermion,
}

/// Closed-form 6V′ `Δ_n[u,v]` at `η = 0` or `η = π/4`.
pub fn delta_closed_form(case: ClosedFormCase, u: &Mp, v: &Mp, n: usize) -> Result<Mp> {
    let prec = u.prec().max(v.prec());
    if n == 0 {
        return Ok(Mp::one(prec));
    }
    let big_n = (n * (n + 1) / 2) as i64;
    let s2u = (u + u).sin();
    let s2v = (v + v).sin();
    match case {
        ClosedFormCase::Classical => {
            let den = (u - v).sin().sq() * (u + v).sin().sq();
            if den.is_zero() {
                return Err(ArcticError::Singularity("sin(u-v) sin(u+v) = 0".into()));
            }
            Ok(fact_mp(n, prec) * (s2u * s2v / den).powi(big_n))
        }
        ClosedFormCase::FreeFermion => {
            let two = Mp::int(2, prec);
            let den = (&two * &(u - v)).cos() * (&two * &(u + v)).cos();
            if den.is_zero() {
                return Err(ArcticError::Singularity("cos 2(u-v) cos 2(u+v) = 0".into()));
            }
            let four = Mp::int(4, prec);
            let a = (&four * &s2u * s2v).powi(big_n);
            let b = (-(four * (u + u).cos() * (v + v).cos())).powi((n * (n - 1) / 2) as i64);
            Ok(a * b / den.powi((n * n) as i64))
        }
    }
}

/// `2^{n(n-1)/2} ∏_{i<n} (4i+2)!/(n+2i+1)!`.
pub fn z20v_formula(n: usize) -> Integer {
    let mut r = Rational::from(Integer::from(1) << (n * n.saturating_sub(1) / 2) as u32);
    for i in 0..n {
        r *= Rational::from((factorial((4 * i + 2) as u32), factorial((n + 2 * i + 1) as u32)));
    }
    let (num, den) = r.into_numer_denom();
    debug_assert_eq!(den, 1);
    num
}

fn four_sines(u: &Mp, v: &Mp, eta: &Mp) -> Mp {
    let w = u - v;
    let s = u + v;
    (&w + eta).sin() * (&w - eta).sin() * (&s + eta).sin() * (&s - eta).sin()
}

fn z_6vp(u: &Mp, v: &Mp, eta: &Mp, rho_o: &Mp, rho_e: &Mp, n: usize) -> Result<Mp> {
    let nn = (n * n) as i64;
    let dt = delta_tilde(u, v, eta, n)?;
    Ok(rho_e.powi(nn - n as i64)
        * rho_o.powi(nn)
        * (eta + eta).sin().powi(n as i64)
        * dt
        * four_sines(u, v, eta).powi(nn))
}

/// Factor relating the 20V partition function to the 6V′ one at `ρ_o = ρ_e = 1`.
fn twenty_v_factor(p: &ModelParams, n: usize) -> Mp {
    let (u, v, eta) = (&p.u, &p.v, &p.eta);
    let e1 = (n * (3 * n - 1) / 2) as i64;
    let s2u2e = (&(u + eta) + &(u + eta)).sin();
    p.nu.powi(e1)
        * s2u2e.powi(e1)
        * (&(u - v) - eta).sin().powi((n * (n - 1) / 2) as i64)
        * (&(eta - u) - v).sin().powi((n * (n + 1) / 2) as i64)
}

/// Homogeneous partition function `Z_n`.
pub fn partition_fn(params: &ModelParams, n: usize) -> Result<Mp> {
    params.validate()?;
    if n == 0 {
        return Ok(Mp::one(params.prec()));
    }
    let eta = &params.eta;
    match params.model {
        Model::SixV => {
            let w = params.w();
            let d = delta_6v(&w, eta, n)?;
            let base = &params.rho * &((&w + eta).sin() * (&w - eta).sin());
            Ok((eta + eta).sin().powi(n as i64) * d * base.powi((n * n) as i64))
        }
        Model::SixVP => z_6vp(&params.u, &params.v, eta, &params.rho_o, &params.rho_e, n),
        Model::TwentyV | Model::Dt => {
            let one = Mp::one(params.prec());
            let z = z_6vp(&params.u, &params.v, eta, &one, &one, n)?;
            Ok(z * twenty_v_factor(params, n))
        }
    }
}

fn require_vertex(params: &ModelParams) -> Result<()> {
    if params.model == Model::Dt {
        return Err(ArcticError::Argument(
            "one-point functions are defined for the vertex models (use 20v at the uniform point)".into(),
        ));
    }
    Ok(())
}

/// One-point function `H_n[…;ξ] = Z_n[…;ξ]/Z_n`; `ξ = 0` gives 1 exactly.
pub fn one_point(params: &ModelParams, n: usize, xi: &Mp) -> Result<Mp> {
    params.validate()?;
    require_vertex(params)?;
    if n == 0 {
        return Err(ArcticError::Argument("n must be at least 1".into()));
    }
    let out_prec = params.prec().max(xi.prec());
    if xi.is_zero() {
        return Ok(Mp::one(out_prec));
    }
    // the bordered determinant vanishes like ξ^{n-1} (ξ^{2n-1} on v = -π/2); pay for the cancellation in bits
    let lost = (-xi.abs().0.clone().log2().to_f64()).max(0.0).ceil() as u32;
    let prec = out_prec + 2 * n as u32 * lost + 32;
    let params = &params.at_precision(prec);
    let xi = &xi.with_prec(prec);
    let (u, v, eta) = (&params.u, &params.v, &params.eta);
    let w = u - v;
    let ni = n as i64;
    match params.model {
        Model::SixV => {
            let h = reduced_one_point_6v(&w, eta, n, xi)?;
            let ws = &w - xi;
            let r = (&ws + eta).sin() * (&ws - eta).sin() / ((&w + eta).sin() * (&w - eta).sin());
            Ok((h * xi.sin().powi(1 - ni) * r.powi(ni)).with_prec(out_prec))
        }
        Model::SixVP => Ok(h_6vp(u, v, eta, n, xi)?.with_prec(out_prec)),
        Model::TwentyV => {
            let h = h_6vp(u, v, eta, n, xi)?;
            let ws = &w - xi;
            let s = u + v;
            let f1 = (&ws - eta).sin() / (&w - eta).sin();
            let f2 = (&(eta - &s) - xi).sin() / (eta - &s).sin();
            Ok((f1.powi(ni - 1) * f2.powi(ni) * h).with_prec(out_prec))
        }
        Model::Dt => unreachable!(),
    }
}

fn h_6vp(u: &Mp, v: &Mp, eta: &Mp, n: usize, xi: &Mp) -> Result<Mp> {
    let hs = reduced_6vp_times_s2v(u, v, eta, n, xi)?;
    let sx = xi.sin();
    let sx2v = (&(v + v) + xi).sin();
    let s2x2v = (&(xi + v) + &(xi + v)).sin();
    let r = four_sines(u, &(v + xi), eta) / four_sines(u, v, eta);
    let ni = n as i64;
    Ok(hs * &sx * &sx2v / s2x2v / (sx * sx2v).powi(ni) * r.powi(ni))
}

/// Semi-homogeneous partition function `Z_n[…;ξ]`.
pub fn refined_partition(params: &ModelParams, n: usize, xi: &Mp) -> Result<Mp> {
    require_vertex(params)?;
    let z = partition_fn(params, n)?;
    if xi.is_zero() {
        return Ok(z);
    }
    Ok(one_point(params, n, xi)? * z)
}

/// Offset applied to points on the singular lines before evaluating recursion residuals.
pub const LINE_OFFSET: f64 = 0.01;

/// Default `ξ` used by [`recursion_residual`].
pub const RECURSION_XI: f64 = -0.3;

/// `(Δ-recursion residual, H-relation residual)` at the default `ξ`.
pub fn recursion_residual(params: &ModelParams, n: usize) -> Result<(Mp, Mp)> {
    let xi = Mp::new(RECURSION_XI, params.prec());
    recursion_residual_at(params, n, &xi)
}

/// Residuals of the Desnanot–Jacobi recursions for `Δ_n` and for the reduced
/// one-point function at size `n`. Points on `u = 0` or `v = -π/2` (where `Δ_n`
/// vanishes identically) are moved into the interior by [`LINE_OFFSET`].
pub fn recursion_residual_at(params: &ModelParams, n: usize, xi: &Mp) -> Result<(Mp, Mp)> {
    if n == 0 {
        return Err(ArcticError::Argument("n must be at least 1".into()));
    }
    let nf = n as i64;
    match params.model {
        Model::SixV => {
            let prec = params.prec().max(default_precision(n)).max(512);
            let p = params.at_precision(prec);
            let xi = xi.with_prec(prec);
            let (w, eta) = (p.w(), p.eta.clone());
            let d = |k: usize| delta_6v(&w, &eta, k);
            let lhs = d(n + 1)? * d(n - 1)? / d(n)?.sq();
            let s = seed_second(&w);
            let e2 = Dual::constant(Dual::constant(eta.clone()));
            let logd = delta_6v(&s, &e2, n)?.ln();
            let rhs = logd.d[0].d[0].clone() / Mp::int(nf * nf, prec);
            let r1 = (lhs.clone() - rhs).abs();
            // H relation: ∂_w at fixed ξ
            let hn = |k: usize| reduced_one_point_6v(&w, &eta, k, &xi);
            let wd = Dual::var(w.clone(), 0, 1);
            let ed = Dual::constant(eta.clone());
            let xd = Dual::constant(xi.clone());
            let dlog = reduced_one_point_6v(&wd, &ed, n, &xd)?.ln().tangent(0);
            let r2 = (hn(n + 1)? / hn(n)? * lhs + dlog / Mp::int(nf, prec)).abs();
            Ok((r1, r2))
        }
        Model::SixVP => {
            let mut u = params.u.clone();
            let mut v = params.v.clone();
            let moved = on_u_line(&u) || on_v_line(&v);
            let base = params.prec().max(default_precision(n)).max(512);
            let prec = if moved { base.max(1024) } else { base };
            if on_u_line(&u) {
                u = u + Mp::new(LINE_OFFSET, prec);
            }
            if on_v_line(&v) {
                v = v + Mp::new(LINE_OFFSET, prec);
            }
            let (u, v, eta) = (u.with_prec(prec), v.with_prec(prec), params.eta.with_prec(prec));
            let xi = xi.with_prec(prec);
            let d = |k: usize| delta_6vp(&u, &v, &eta, k);
            let ratio = d(n + 1)? * d(n - 1)? / d(n)?.sq();
            let (ud, vd) = seed_mixed(&u, &v);
            let e2 = Dual::constant(Dual::constant(eta.clone()));
            let logd = delta_6vp(&ud, &vd, &e2, n)?.ln();
            let mixed = logd.d[0].d[0].clone() / Mp::int(nf * nf, prec);
            let r1 = (ratio.clone() + mixed).abs();
            let hn = |k: usize| reduced_one_point_6vp(&u, &v, &eta, k, &xi);
            let u1 = Dual::var(u.clone(), 0, 1);
            let c = |x: &Mp| Dual::constant(x.clone());
            let dlog = reduced_one_point_6vp(&u1, &c(&v), &c(&eta), n, &c(&xi))?.ln().tangent(0);
            let r2 = (hn(n + 1)? / hn(n)? * ratio + dlog / Mp::int(nf, prec)).abs();
            Ok((r1, r2))
        }
        m => Err(ArcticError::Argument(format!("recursions are defined for 6v and 6vp, not {m}"))),
    }
}

/// Reduced one-point function `H_n` (6V or 6V′), line-aware for 6V′.
pub fn reduced_one_point(params: &ModelParams, n: usize, xi: &Mp) -> Result<Mp> {
    match params.model {
        Model::SixV => reduced_one_point_6v(&params.w(), &params.eta, n, xi),
        Model::SixVP => {
            let s2v = (&params.v + &params.v).sin();
            if on_v_line(&params.v) {
                return Err(ArcticError::Singularity("reduced 6vp one-point function is infinite on v=-pi/2".into()));
            }
            Ok(reduced_6vp_times_s2v(&params.u, &params.v, &params.eta, n, xi)? / s2v.powi(n as i64))
        }
        m => Err(ArcticError::Argument(format!("reduced one-point function is defined for 6v and 6vp, not {m}"))),
    }
}
