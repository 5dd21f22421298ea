//! Large-N closed forms: free energies, one-point exponents, tangent-method
//! saddle data, and residual checks for the relations tying them together.
//!
//! Every formula is generic over [`Real`] so that `ξ`, `u`, `v` derivatives come
//! from dual numbers rather than finite differences.

use crate::error::{ArcticError, Result};
use crate::partition::{Model, ModelParams, NamedPoint};
use crate::paths::PathWeights;
use crate::trig_core::{near_zero_angle, seed_mixed, seed_second, Dual, Mp, Real};

/// Which one-point exponent to return.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExponentKind {
    /// `H_N[ξ] ≃ e^{-Nψ}` for the full one-point function.
    Psi,
    /// `ψ` shifted by the `ā`-type prefactor that enters the refined generating function.
    Phi,
    /// Exponent of the reduced (determinant-ratio) one-point function, `∂_u e^ψ = e^{-2f}`;
    /// returned as `log|e^ψ|` since `e^ψ` changes sign with `ξ`.
    Reduced,
}

/// Free energy, `ψ` and `φ` at one `ξ`.
#[derive(Clone, Debug)]
pub struct ExponentSet {
    pub f: Mp,
    pub psi: Mp,
    pub phi: Mp,
}

/// Saddle point of the tangent-method action at parameter `ξ`.
///
/// `p` holds `p_2` (6V), `p_2, p_3, p_4` (6V′), `p_3..p_6` (20V) or `p_3` (DT).
#[derive(Clone, Debug)]
pub struct SaddleData {
    pub xi: Mp,
    pub t: Mp,
    pub kappa: Mp,
    pub lambda: Mp,
    pub p: Vec<Mp>,
}

/// `α = π/(π - 2η)`.
pub fn alpha(eta: &Mp) -> Result<Mp> {
    let pi = Mp::pi(eta.prec());
    let half = Mp::pi_frac(1, 2, eta.prec());
    if !(eta.sign() > 0 && eta < &half) {
        return Err(ArcticError::Argument(format!("alpha needs 0 < eta < pi/2, got {}", eta.to_sig(12))));
    }
    Ok(pi.clone() / (pi - eta.scale(2)))
}

fn finite<T: Real>(x: T, what: &str) -> Result<T> {
    if x.val().is_finite() {
        Ok(x)
    } else {
        Err(ArcticError::Singularity(format!("{what} is singular here")))
    }
}

fn log_pos<T: Real>(x: T, what: &str) -> Result<T> {
    let x = finite(x, what)?;
    if x.sign() <= 0 {
        return Err(ArcticError::Singularity(format!("{what}: logarithm of a non-positive quantity")));
    }
    Ok(x.ln())
}

/// Shared constants of one parameter point, lifted to the scalar type in use.
struct Ctx<T> {
    eta: T,
    u: T,
    v: T,
    w: T,
    s: T,
    al: T,
    /// `sin 2v / sin 2α(v+η)`, written as `sin 2δ / sin 2αδ` with `δ = v + π/2`.
    rv: T,
}

impl<T: Real> Ctx<T> {
    fn from_parts(eta: T, u: T, v: T) -> Ctx<T> {
        let pi = eta.pi();
        let al = pi.clone() / (pi.clone() - eta.scale(2));
        let delta = v.clone() + pi / eta.ci(2);
        let rv = if delta.val().is_zero() {
            al.recip()
        } else {
            delta.scale(2).sin() / (al.clone() * delta.scale(2)).sin()
        };
        Ctx { w: u.clone() - v.clone(), s: u.clone() + v.clone(), eta, u, v, al, rv }
    }

    fn lifted(params: &ModelParams, like: &T) -> Ctx<T> {
        let l = |x: &Mp| like.lift(x.clone());
        Ctx::from_parts(l(&params.eta), l(&params.u), l(&params.v))
    }

    fn e(&self, k: i64) -> T {
        self.eta.scale(k)
    }
    fn asin(&self, x: T) -> T {
        (self.al.clone() * x).sin()
    }
    fn acot(&self, x: T) -> T {
        (self.al.clone() * x).cot()
    }

    /// `-α cot(αy) sin(y+2η)`; both factors vanish/blow up together at `αy = π`.
    fn pole_pair(&self, y: &T) -> T {
        let al = &self.al;
        let t = y.pi() - al.clone() * y.clone();
        let prec = t.prec() as i64;
        let ratio = if t.val().abs() < Mp::pow2(-prec / 3, t.prec()) {
            let c2 = (t.one_like() - (al.clone() * al.clone()).recip()) / t.ci(6);
            (t.one_like() + c2 * t.clone() * t.clone()) / al.clone()
        } else {
            (t.clone() / al.clone()).sin() / t.sin()
        };
        al.clone() * t.cos() * ratio
    }

    // ---- 6V (depends on w = u - v only)

    fn t_6v(&self, x: &T) -> T {
        let wx = self.w.clone() - x.clone();
        (wx.clone() - self.eta.clone()).sin() / (wx + self.eta.clone()).sin()
    }

    fn phi_6v(&self, x: &T) -> Result<T> {
        let (w, e, al) = (&self.w, &self.eta, &self.al);
        let wme = w.clone() - e.clone();
        let wxe = wme.clone() - x.clone();
        let arg = self.asin(x.clone()) * self.asin(wme.clone()) * wxe.sin()
            / (al.clone() * x.sin() * wme.sin() * self.asin(wxe));
        Ok(-log_pos(arg, "phi(6V)")?)
    }

    fn psi_6v(&self, x: &T) -> Result<T> {
        let (w, e, al) = (&self.w, &self.eta, &self.al);
        let wme = w.clone() - e.clone();
        let wx = w.clone() - x.clone();
        let arg = self.asin(x.clone())
            * self.asin(wme.clone())
            * (wx.clone() + e.clone()).sin()
            * (wx.clone() - e.clone()).sin()
            / (al.clone()
                * self.asin(wx - e.clone())
                * x.sin()
                * (w.clone() + e.clone()).sin()
                * wme.sin());
        Ok(-log_pos(arg, "psi(6V)")?)
    }

    /// `e^ψ` of the reduced 6V one-point function (negative for `ξ < 0`).
    fn reduced_exp_6v(&self, x: &T) -> T {
        let wme = self.w.clone() - self.eta.clone();
        self.al.clone() * self.asin(wme.clone() - x.clone()) / (self.asin(x.clone()) * self.asin(wme))
    }

    fn kappa_6v(&self, x: &T) -> T {
        let (e, al) = (&self.eta, &self.al);
        let wx = self.w.clone() - x.clone();
        let brace = (wx.clone() - e.clone()).cot() + x.cot() - al.clone() * self.acot(x.clone());
        let swm = (wx.clone() - e.clone()).sin();
        (brace * (wx.clone() + e.clone()).sin() + self.pole_pair(&(wx - e.clone()))) * swm / self.e(2).sin()
    }

    fn slope_6v(&self, x: &T) -> T {
        let wx = self.w.clone() - x.clone();
        (wx.clone() + self.eta.clone()).sin() * (wx - self.eta.clone()).sin()
            / (x.sin() * (x.clone() - self.e(2)).sin())
    }

    // ---- 6V′

    fn t_6vp(&self, x: &T) -> T {
        let e = &self.eta;
        let wx = self.w.clone() - x.clone();
        let sx = self.s.clone() + x.clone();
        (wx.clone() - e.clone()).sin() * (sx.clone() + e.clone()).sin()
            / ((wx + e.clone()).sin() * (sx - e.clone()).sin())
    }

    /// Part of the 6V′ exponents built from `α`; shared by `φ` and `ψ`.
    fn alpha_part_6vp(&self, x: &T) -> T {
        let (e, v, al) = (&self.eta, &self.v, &self.al);
        let wme = self.w.clone() - e.clone();
        let spe = self.s.clone() + e.clone();
        self.asin(x.clone())
            * self.asin(x.clone() + v.scale(2) + e.scale(2))
            * self.asin(wme.clone())
            * self.asin(spe.clone())
            / (al.clone() * self.asin(wme - x.clone()) * self.asin(spe + x.clone()))
    }

    fn phi_6vp(&self, x: &T) -> Result<T> {
        let (e, v) = (&self.eta, &self.v);
        let wme = self.w.clone() - e.clone();
        let spe = self.s.clone() + e.clone();
        let trig = self.rv.clone() * (wme.clone() - x.clone()).sin() * (spe.clone() + x.clone()).sin()
            / ((v.scale(2) + x.clone()).sin() * wme.sin() * spe.sin() * x.sin());
        Ok(-log_pos(trig * self.alpha_part_6vp(x), "phi(6V')")?)
    }

    fn psi_6vp(&self, x: &T) -> Result<T> {
        let (e, v) = (&self.eta, &self.v);
        let wx = self.w.clone() - x.clone();
        let sx = self.s.clone() + x.clone();
        let w = &self.w;
        let s = &self.s;
        let trig = self.rv.clone()
            * (wx.clone() + e.clone()).sin()
            * (wx - e.clone()).sin()
            * (sx.clone() - e.clone()).sin()
            * (sx + e.clone()).sin()
            / (x.sin()
                * (x.clone() + v.scale(2)).sin()
                * (w.clone() + e.clone()).sin()
                * (w.clone() - e.clone()).sin()
                * (s.clone() - e.clone()).sin()
                * (s.clone() + e.clone()).sin());
        Ok(-log_pos(trig * self.alpha_part_6vp(x), "psi(6V')")?)
    }

    fn reduced_exp_6vp(&self, x: &T) -> T {
        let (e, v, al) = (&self.eta, &self.v, &self.al);
        let wme = self.w.clone() - e.clone();
        let spe = self.s.clone() + e.clone();
        al.clone()
            * self.asin(v.scale(2) + e.scale(2))
            * self.asin(wme.clone() - x.clone())
            * self.asin(spe.clone() + x.clone())
            / (self.asin(wme) * self.asin(spe) * self.asin(x.clone()) * self.asin(x.clone() + v.scale(2) + e.scale(2)))
    }

    /// `cos 2η - cos 2u cos(2v+2ξ)`.
    fn den_6vp(&self, x: &T) -> T {
        self.e(2).cos() - self.u.scale(2).cos() * (self.v.scale(2) + x.scale(2)).cos()
    }

    /// `sin(s-η+ξ) sin(s+η+ξ) sin(w-η-ξ) sin(w+η-ξ)`.
    fn four_shifted(&self, x: &T) -> T {
        let e = &self.eta;
        let wx = self.w.clone() - x.clone();
        let sx = self.s.clone() + x.clone();
        (sx.clone() - e.clone()).sin() * (sx + e.clone()).sin() * (wx.clone() - e.clone()).sin() * (wx + e.clone()).sin()
    }

    fn kappa_6vp(&self, x: &T) -> T {
        let (e, v, al) = (&self.eta, &self.v, &self.al);
        let wxe = self.w.clone() - e.clone() - x.clone();
        let sxe = self.s.clone() + e.clone() + x.clone();
        let x2v = x.clone() + v.scale(2);
        let brace = wxe.cot() + x.cot() + x2v.cot()
            - sxe.cot()
            - al.clone() * (self.acot(x.clone()) + self.acot(x2v + e.scale(2)) - self.acot(sxe));
        let sx = self.s.clone() + x.clone();
        let three = (sx.clone() - e.clone()).sin() * (sx + e.clone()).sin() * wxe.sin();
        let wpe = (self.w.clone() + e.clone() - x.clone()).sin();
        (brace * wpe + self.pole_pair(&wxe)) * three / (self.e(2).sin() * self.den_6vp(x))
    }

    /// `κ/λ` for 6V′.
    fn kl_6vp(&self, x: &T) -> T {
        self.four_shifted(x) / ((x.clone() - self.e(2)).sin() * x.sin() * self.den_6vp(x))
    }

    fn p_6vp(&self, x: &T, k: &T) -> [T; 3] {
        let e = &self.eta;
        let s2e = self.e(2).sin();
        let sx = x.sin();
        let spe = self.s.clone() + e.clone();
        let p2 = -(k.clone() * spe.sin() * sx.clone() / (s2e.clone() * (self.s.clone() - e.clone() + x.clone()).sin()));
        let p3 = k.clone() * (self.w.clone() - self.e(3)).sin() * sx.clone()
            / (s2e.clone() * (self.w.clone() - e.clone() - x.clone()).sin());
        let p4 = k.clone() * (self.s.clone() + self.e(3)).sin() * sx / (s2e * (spe + x.clone()).sin());
        [p2, p3, p4]
    }

    // ---- 20V

    fn phi_20v(&self, x: &T) -> Result<T> {
        let (e, v) = (&self.eta, &self.v);
        let w = &self.w;
        let wme = w.clone() - e.clone();
        let spe = self.s.clone() + e.clone();
        let trig = self.rv.clone()
            * (wme.clone() - x.clone()).sin().sq()
            * (spe.clone() + x.clone()).sin()
            * (w.clone() + e.clone()).sin()
            / ((v.scale(2) + x.clone()).sin()
                * wme.sin().sq()
                * spe.sin()
                * (w.clone() - x.clone() + e.clone()).sin()
                * x.sin());
        Ok(-log_pos(trig * self.alpha_part_6vp(x), "phi(20V)")?)
    }


    fn kappa_20v(&self, x: &T) -> T {
        let e = &self.eta;
        let sx = self.s.clone() + x.clone();
        let half = self.eta.ci(2);
        // (cot(w-ξ+η) - cot(w-ξ-η)) t/∂t with the sin(w-ξ±η) factors cancelled
        let corr = (sx.clone() - e.clone()).sin() * (sx + e.clone()).sin() / self.den_6vp(x);
        (self.kappa_6vp(x) + corr) / half
    }

    /// `cos 2η - cos(s+η) cos(s+2ξ-η)`.
    fn f_20v(&self, x: &T) -> T {
        let e = &self.eta;
        self.e(2).cos() - (self.s.clone() + e.clone()).cos() * (self.s.clone() + x.scale(2) - e.clone()).cos()
    }

    fn slope_20v(&self, x: &T) -> T {
        let e = &self.eta;
        let wx = self.w.clone() - x.clone();
        self.f_20v(x) / self.den_6vp(x) * (wx.clone() - e.clone()).sin() * (wx + e.clone()).sin()
            / (x.sin() * (x.clone() - self.e(2)).sin())
    }

    fn p_20v(&self, x: &T, k: &T) -> [T; 4] {
        let (e, u, v) = (&self.eta, &self.u, &self.v);
        let (w, s) = (&self.w, &self.s);
        let s2e = self.e(2).sin();
        let s2e2 = s2e.sq();
        let sx = x.sin();
        let sx2e = (x.clone() - self.e(2)).sin();
        let sxm = (s.clone() + x.clone() - e.clone()).sin();
        let sxp = (s.clone() + x.clone() + e.clone()).sin();
        let wxm = (w.clone() - x.clone() - e.clone()).sin();
        let wxp = (w.clone() - x.clone() + e.clone()).sin();
        let swe = (w.clone() - e.clone()).sin();
        let s2u2e = (u.scale(2) - self.e(2)).sin();
        let big_e = u.scale(2).cos() * (s.clone() + e.clone()).cos()
            - self.e(2).cos() * (w.clone() - x.scale(2) + e.clone()).cos();
        let f = self.f_20v(x);
        let two = e.ci(2);
        let p3 = k.clone() * two.clone() * sx2e.clone() * sx.clone() * sxm.clone() * sxp.clone()
            / (s2e.clone() * swe.clone() * big_e.clone())
            * (u.scale(2).cos().sq() - self.e(4).cos() - u.scale(2).sin() * (v.scale(2) + self.e(2)).sin())
            / f.clone();
        let p4 = two.clone() * k.clone() * u.scale(2).sin() * (s.clone() + self.e(3)).sin() * wxp.clone()
            / (s2e2.clone() * wxm.clone() * big_e.clone())
            * sx2e
            * sx.clone()
            * sxm.sq()
            / f.clone();
        let p5 = k.clone() * two.clone() * s2u2e.clone() * (s.clone() + e.clone()).sin() / (s2e2.clone() * big_e.clone())
            * sx.sq()
            * sxp.sq()
            / f.clone();
        let p6 = -(k.clone()
            * two
            * s2u2e
            * (w.clone() - self.e(3)).sin()
            * (s.clone() + self.e(3)).sin()
            * sx.sq()
            / (s2e2 * swe * big_e)
            * wxp
            * sxm
            * sxp
            / (wxm * f));
        [p3, p4, p5, p6]
    }
}

/// Admissible `ξ` interval of the NE tangent family (`A[ξ] ≥ 0`); DT returns its full analytic range.
pub fn branch_range(params: &ModelParams) -> (Mp, Mp) {
    let prec = params.prec();
    let pi = Mp::pi(prec);
    let zero = Mp::zero(prec);
    let e = &params.eta;
    let lo = match params.model {
        Model::SixV => &(&params.w() + e) - &pi,
        Model::SixVP => &(&(e + &params.u.abs()) - &params.v) - &pi,
        Model::TwentyV => &(&(e + &params.u) - &params.v) - &pi,
        Model::Dt => Mp::pi_frac(-3, 8, prec),
    };
    (lo, zero)
}

fn check_range(params: &ModelParams, xi: &Mp) -> Result<()> {
    let (lo, hi) = branch_range(params);
    if xi < &lo || xi > &hi {
        return Err(ArcticError::Argument(format!(
            "xi = {} outside the {} branch range [{}, {}]",
            xi.to_sig(12),
            params.model,
            lo.to_sig(12),
            hi.to_sig(12)
        )));
    }
    Ok(())
}

/// DT formulas live on the uniform 20V point.
fn effective(params: &ModelParams) -> ModelParams {
    if params.model == Model::Dt {
        NamedPoint::Uniform20V.params(params.prec())
    } else {
        params.clone()
    }
}

/// Free energy `f` with `Z_N ≃ e^{-N² f}`.
pub fn free_energy(params: &ModelParams) -> Result<Mp> {
    params.validate()?;
    let p = effective(params);
    let (e, u) = (&p.eta, &p.u);
    let al = alpha(e)?;
    let c = Ctx::<Mp>::lifted(&p, e);
    let (w, s) = (&c.w, &c.s);
    match p.model {
        Model::SixV => {
            let arg = &al * &p.rho * (w + e).sin() * (w - e).sin() / (&al * &(w - e)).sin();
            Ok(-log_pos(arg, "f(6V)")?)
        }
        Model::SixVP => f_6vp(&c, &al, &(&p.rho_o * &p.rho_e)),
        Model::TwentyV | Model::Dt => {
            let f6 = f_6vp(&c, &al, &Mp::one(p.prec()))?;
            let corr = p.nu.powi(3) * (&(u + e) * &Mp::int(2, p.prec())).sin().powi(3) * (w - e).sin() * (e - s).sin();
            Ok(f6 - log_pos(corr, "f(20V)")? / Mp::int(2, p.prec()))
        }
    }
}

fn f_6vp(c: &Ctx<Mp>, al: &Mp, rho: &Mp) -> Result<Mp> {
    let (e, u) = (&c.eta, &c.u);
    let (w, s) = (&c.w, &c.s);
    let two = Mp::int(2, e.prec());
    let ru = if u.is_zero() { al.recip() } else { (u * &two).sin() / (&(u * &two) * al).sin() };
    let abs_part = log_pos((ru * &c.rv).abs(), "f(6V')")? / two;
    let num = (al * &(w - e)).sin() * (al * &(-(s + e))).sin();
    let den = al * rho * (w + e).sin() * (w - e).sin() * (s + e).sin() * (s - e).sin();
    Ok(abs_part + log_pos(num / den, "f(6V')")?)
}

fn exponent_t<T: Real>(c: &Ctx<T>, model: Model, x: &T, kind: ExponentKind) -> Result<T> {
    match (model, kind) {
        (Model::SixV, ExponentKind::Psi) => c.psi_6v(x),
        (Model::SixV, ExponentKind::Phi) => c.phi_6v(x),
        (Model::SixV, ExponentKind::Reduced) => log_pos(c.reduced_exp_6v(x).abs(), "reduced psi(6V)"),
        (Model::SixVP, ExponentKind::Psi) => c.psi_6vp(x),
        (Model::SixVP, ExponentKind::Phi) => c.phi_6vp(x),
        (Model::SixVP, ExponentKind::Reduced) => log_pos(c.reduced_exp_6vp(x).abs(), "reduced psi(6V')"),
        (Model::TwentyV, ExponentKind::Psi) => {
            // H^{20V} = (sin(w-ξ-η)/sin(w-η))^{N-1} ā_e^N H^{6V′}
            let e = &c.eta;
            let f1 = (c.w.clone() - x.clone() - e.clone()).sin() / (c.w.clone() - e.clone()).sin();
            let ae = (c.s.clone() + x.clone() - e.clone()).sin() / (c.s.clone() - e.clone()).sin();
            Ok(c.psi_6vp(x)? - log_pos(f1, "psi(20V)")? - log_pos(ae, "psi(20V)")?)
        }
        (Model::TwentyV | Model::Dt, ExponentKind::Phi) => c.phi_20v(x),
        (m, k) => Err(ArcticError::Argument(format!("no {k:?} exponent for model {m}"))),
    }
}

/// One-point exponent at `ξ`. `ξ = 0` returns 0 for `Psi` and `Phi` (the one-point function is 1).
pub fn one_point_exponent(params: &ModelParams, xi: &Mp, kind: ExponentKind) -> Result<Mp> {
    params.validate()?;
    let p = effective(params);
    if xi.is_zero() && kind != ExponentKind::Reduced {
        return Ok(Mp::zero(p.prec()));
    }
    let xi = xi.with_prec(p.prec());
    let c = Ctx::lifted(&p, &xi);
    exponent_t(&c, params.model, &xi, kind)
}

/// `f`, `ψ`, `φ` together (vertex models).
pub fn exponent_set(params: &ModelParams, xi: &Mp) -> Result<ExponentSet> {
    Ok(ExponentSet {
        f: free_energy(params)?,
        psi: one_point_exponent(params, xi, ExponentKind::Psi)?,
        phi: one_point_exponent(params, xi, ExponentKind::Phi)?,
    })
}

/// `t[ξ]`, `κ[ξ]`, `A[ξ] = κ/λ·μ`-type slope and intercept `B[ξ]` of the tangent family,
/// at any scalar type. No range check.
pub fn tangent_coefficients<T: Real>(params: &ModelParams, xi: &T) -> (T, T) {
    let p = effective(params);
    let c = Ctx::lifted(&p, xi);
    match params.model {
        Model::SixV => (c.slope_6v(xi), c.kappa_6v(xi)),
        Model::SixVP => (c.kl_6vp(xi).scale(2), c.kappa_6vp(xi).scale(2)),
        Model::TwentyV => (c.slope_20v(xi), c.kappa_20v(xi).scale(2)),
        Model::Dt => (-(xi.scale(2).cot()), c.kappa_20v(xi).scale(2) - xi.one_like()),
    }
}

/// `cos 2η - cos 2u cos(2v+2ξ)`, the denominator of the 6V′/20V/DT tangent coefficients.
pub fn tangent_denominator(params: &ModelParams, xi: &Mp) -> Mp {
    let p = effective(params);
    Ctx::lifted(&p, xi).den_6vp(xi)
}

fn t_of<T: Real>(c: &Ctx<T>, model: Model, x: &T) -> T {
    match model {
        Model::SixV => c.t_6v(x),
        _ => c.t_6vp(x),
    }
}

fn kappa_of<T: Real>(c: &Ctx<T>, model: Model, x: &T) -> T {
    match model {
        Model::SixV => c.kappa_6v(x),
        Model::SixVP => c.kappa_6vp(x),
        Model::TwentyV => c.kappa_20v(x),
        Model::Dt => c.kappa_20v(x).scale(2) - x.one_like(),
    }
}

/// `κ[ξ]` without the range check (used for continuation and root finding).
pub fn kappa_unchecked(params: &ModelParams, xi: &Mp) -> Mp {
    let p = effective(params);
    let c = Ctx::lifted(&p, xi);
    kappa_of(&c, params.model, xi)
}

fn saddle_t<T: Real>(params: &ModelParams, x: &T) -> (T, T, T, Vec<T>) {
    let p = effective(params);
    let c = Ctx::lifted(&p, x);
    let t = t_of(&c, params.model, x);
    let k = kappa_of(&c, params.model, x);
    match params.model {
        Model::SixV => {
            let lam = k.clone() / c.slope_6v(x);
            let p2 = k.clone() * (c.w.clone() - c.e(3)).sin() * x.sin()
                / ((c.w.clone() - x.clone() - c.eta.clone()).sin() * c.e(2).sin());
            (t, k, lam, vec![p2])
        }
        Model::SixVP => {
            let lam = k.clone() / c.kl_6vp(x);
            let ps = c.p_6vp(x, &k);
            (t, k, lam, ps.to_vec())
        }
        Model::TwentyV => {
            let lam = k.scale(2) / c.slope_20v(x);
            let ps = c.p_20v(x, &k);
            (t, k, lam, ps.to_vec())
        }
        Model::Dt => {
            let lam = -(k.clone() / x.scale(2).cot());
            let p3 = k.clone() * (t.clone() - t.one_like()) / t.scale(2);
            (t, k, lam, vec![p3])
        }
    }
}

/// Closed-form saddle unknowns at `ξ` in the branch range.
pub fn saddle_data(params: &ModelParams, xi: &Mp) -> Result<SaddleData> {
    params.validate()?;
    check_range(params, xi)?;
    let xi = xi.with_prec(params.prec());
    let (t, kappa, lambda, p) = saddle_t(params, &xi);
    for (name, x) in [("t", &t), ("kappa", &kappa), ("lambda", &lambda)] {
        if !x.is_finite() {
            return Err(ArcticError::Singularity(format!("{name} is singular at xi = {}", xi.to_sig(12))));
        }
    }
    Ok(SaddleData { xi, t, kappa, lambda, p })
}

/// `∂_ξ S_0` at the closed-form `κ[ξ]`, by dual differentiation of `φ` and `log t`.
fn action_slope(params: &ModelParams, xi: &Mp, kappa: &Mp) -> Result<Mp> {
    let p = effective(params);
    let x = Dual::var(xi.clone(), 0, 1);
    let c = Ctx::lifted(&p, &x);
    let phi = exponent_t(&c, params.model, &x, ExponentKind::Phi)?;
    let t = t_of(&c, params.model, &x);
    let dlogt = finite(t.tangent(0) / t.v, "t")?;
    let weight = match params.model {
        Model::SixV | Model::SixVP => kappa.clone(),
        Model::TwentyV => kappa * &Mp::int(2, xi.prec()),
        Model::Dt => kappa + &Mp::one(xi.prec()),
    };
    Ok(phi.tangent(0) + weight * dlogt)
}

/// Differences of the two sides of each saddle equation (cross-multiplied so that
/// vanishing weights do not divide), followed by `∂_ξ S_0`.
pub fn saddle_residuals(params: &ModelParams, xi: &Mp) -> Result<Vec<Mp>> {
    let sd = saddle_data(params, xi)?;
    let (t, k, l) = (&sd.t, &sd.kappa, &sd.lambda);
    let mut r = match params.model {
        Model::SixV => {
            let PathWeights::SixV { gamma: [g1, g2], .. } = PathWeights::new(params)? else { unreachable!() };
            let p2 = &sd.p[0];
            let klp = &(k + l) - p2;
            vec![
                t * &(k - p2) - &g1 * &klp,
                &g1 * p2 * &klp - &g2 * &(k - p2) * &(l - p2),
            ]
        }
        Model::SixVP => {
            let PathWeights::SixVP { gamma: [g1, g2, g3, g4], .. } = PathWeights::new(params)? else {
                unreachable!()
            };
            let [p2, p3, p4] = [&sd.p[0], &sd.p[1], &sd.p[2]];
            let sum = &(p2 + p3) + p4;
            let kls = &(k + l) - &sum;
            let ls = l - &sum;
            vec![
                t * &(p3 - k) * &(p4 - k) - &g1 * &g2 * &(p2 + k) * &kls,
                &g1 * p2 * &kls - &g2 * &(p2 + k) * &ls,
                &g1 * p3 * &kls - &g3 * &(k - p3) * &ls,
                &g1 * p4 * &kls - &g4 * &(k - p4) * &ls,
            ]
        }
        Model::TwentyV => {
            let PathWeights::TwentyV { alpha: a, .. } = PathWeights::new(params)? else { unreachable!() };
            let [p3, p4, p5, p6] = [&sd.p[0], &sd.p[1], &sd.p[2], &sd.p[3]];
            let i = |n: i64| Mp::int(n, xi.prec());
            let q = &(k * &i(2)) + l - p3.clone() - p4 * &i(2) - p5 * &i(2) - p6 * &i(3);
            let kk = k * &i(2) - p3.clone() - p4 * &i(2) - p5.clone() - p6 * &i(2);
            let ll = l - p3 - p4.clone() - p5 * &i(2) - p6 * &i(2);
            let (a1, a2) = (&a[0], &a[1]);
            vec![
                t * &kk - a1 * &q,
                a1 * a2 * p3 * &q - &a[2] * &kk * &ll,
                a1.sq() * a2 * p4 * &q.sq() - &a[3] * &kk.sq() * &ll,
                a1 * &a2.sq() * p5 * &q.sq() - &a[4] * &kk * &ll.sq(),
                a1.sq() * a2.sq() * p6 * &q.powi(3) - &a[5] * &kk.sq() * &ll.sq(),
            ]
        }
        Model::Dt => {
            let p3 = &sd.p[0];
            vec![
                t * &(k - p3) - (&(k + l) - p3),
                p3 * &(&(k + l) - p3) - &(k - p3) * &(l - p3),
            ]
        }
    };
    r.push(action_slope(params, &sd.xi, k)?);
    Ok(r)
}

/// `κ[ξ] + (t/∂_ξ t)·∂_ξ φ` (scaled per model): zero when `κ` solves the saddle equation in `ξ`.
pub fn kappa_consistency(params: &ModelParams, xi: &Mp) -> Result<Mp> {
    params.validate()?;
    let p = effective(params);
    let x = Dual::var(xi.with_prec(p.prec()), 0, 1);
    let c = Ctx::lifted(&p, &x);
    let phi = exponent_t(&c, params.model, &x, ExponentKind::Phi)?;
    let t = t_of(&c, params.model, &x);
    let ratio = -(t.v.clone() / t.tangent(0)) * phi.tangent(0);
    let k = kappa_of(&c, params.model, &x).v;
    let two = Mp::int(2, xi.prec());
    let one = Mp::one(xi.prec());
    Ok(match params.model {
        Model::SixV | Model::SixVP => k - ratio,
        Model::TwentyV => k - ratio / two,
        Model::Dt => k - (ratio - one),
    })
}

/// Inverts `κ[ξ] = κ` on the branch by bisection, after checking that `κ` is
/// monotone on a sample of the branch.
pub fn xi_of_kappa(params: &ModelParams, kappa: &Mp) -> Result<Mp> {
    params.validate()?;
    let prec = params.prec();
    let (lo, hi) = branch_range(params);
    let span = &hi - &lo;
    let eps = &span * &Mp::pow2(-30, prec);
    let a0 = &lo + &eps;
    let b0 = &hi - &eps;
    const SAMPLES: i64 = 64;
    let samples: Vec<Mp> = (0..=SAMPLES)
        .map(|i| {
            let x = &a0 + &(&(&b0 - &a0) * &Mp::ratio(i, SAMPLES, prec));
            kappa_unchecked(params, &x)
        })
        .collect();
    let incr = samples[SAMPLES as usize] > samples[0];
    if samples.windows(2).any(|w| (w[1] > w[0]) != incr) {
        return Err(ArcticError::Degenerate("kappa is not monotone on the branch".into()));
    }
    let (kmin, kmax) = if incr { (&samples[0], &samples[SAMPLES as usize]) } else { (&samples[SAMPLES as usize], &samples[0]) };
    if kappa < kmin || kappa > kmax {
        return Err(ArcticError::Argument(format!(
            "kappa = {} outside [{}, {}]",
            kappa.to_sig(12),
            kmin.to_sig(12),
            kmax.to_sig(12)
        )));
    }
    let (mut a, mut b) = (a0, b0);
    for _ in 0..prec {
        let m = (&a + &b) / Mp::int(2, prec);
        let below = &kappa_unchecked(params, &m) < kappa;
        if below == incr {
            a = m;
        } else {
            b = m;
        }
    }
    Ok((a + b) / Mp::int(2, prec))
}

/// `σ = sgn(sin 2αu · sin 2α(v+η))`, the constant of the 6V′ Liouville equation.
pub fn liouville_sign(params: &ModelParams) -> Result<i32> {
    let al = alpha(&params.eta)?;
    let two = Mp::int(2, params.prec());
    let a = (&(&al * &params.u) * &two).sin();
    let b = (&(&al * &(&params.v + &params.eta)) * &two).sin();
    let sg = |x: &Mp| if near_zero_angle(x) { 0 } else { x.sign() };
    Ok(sg(&a) * sg(&b))
}

/// Exponential of the free-energy density factor `W` (so that `e^{-2f} = W^{-2}` up to normalisation).
fn w_6vp<T: Real>(c: &Ctx<T>) -> T {
    let e = &c.eta;
    let al = &c.al;
    let num = c.asin(c.w.clone() - e.clone()) * c.asin(-(c.s.clone() + e.clone()));
    let den = al.clone() * (c.asin(c.u.scale(2)) * c.asin((c.v.clone() + e.clone()).scale(2))).abs().sqrt();
    num / den
}

fn w_6v<T: Real>(c: &Ctx<T>) -> T {
    c.asin(c.w.clone() - c.eta.clone()) / c.al.clone()
}

/// Residual of `∂_u e^ψ = σ W^{-2}` for the reduced exponent at `ξ` (σ = 1 for 6V).
pub fn psi_ode_residual(params: &ModelParams, xi: &Mp) -> Result<Mp> {
    params.validate()?;
    let prec = params.prec();
    let xi = xi.with_prec(prec);
    match params.model {
        Model::SixV => {
            let u = Dual::var(params.u.clone(), 0, 1);
            let l = |x: &Mp| u.lift(x.clone());
            let c = Ctx::from_parts(l(&params.eta), u.clone(), l(&params.v));
            let x = l(&xi);
            let e_psi = finite(c.reduced_exp_6v(&x), "reduced psi(6V)")?;
            let w = w_6v(&c);
            Ok(e_psi.tangent(0) - w.v.sq().recip())
        }
        Model::SixVP => {
            let sigma = liouville_sign(params)?;
            if sigma == 0 {
                return Err(ArcticError::Singularity("W is infinite on u = 0 or v = -pi/2".into()));
            }
            let u = Dual::var(params.u.clone(), 0, 1);
            let l = |x: &Mp| u.lift(x.clone());
            let c = Ctx::from_parts(l(&params.eta), u.clone(), l(&params.v));
            let x = l(&xi);
            let e_psi = finite(c.reduced_exp_6vp(&x), "reduced psi(6V')")?;
            let w = w_6vp(&c);
            Ok(e_psi.tangent(0) - Mp::int(sigma as i64, prec) * w.v.sq().recip())
        }
        m => Err(ArcticError::Argument(format!("no Liouville structure for model {m}"))),
    }
}

/// Default `ξ` values for the ψ-ODE check.
pub const PSI_ODE_XIS: [f64; 3] = [-0.1, -0.2, -0.3];

/// `(Wronskian or Liouville residual of W, largest ψ-ODE residual over PSI_ODE_XIS)`.
///
/// 6V: `W W'' - W'^2 + 1` with `W = sin(α(w-η))/α`.
/// 6V′: `W ∂_u∂_v W - ∂_u W ∂_v W - σ` with the absolute value taken literally in `W`.
pub fn liouville_residuals(params: &ModelParams) -> Result<(Mp, Mp)> {
    params.validate()?;
    let prec = params.prec();
    let wr = match params.model {
        Model::SixV => {
            let u = seed_second(&params.u);
            let l = |x: &Mp| u.lift(x.clone());
            let c = Ctx::from_parts(l(&params.eta), u.clone(), l(&params.v));
            let w = w_6v(&c);
            let (w0, w1, w2) = (w.v.v.clone(), w.v.tangent(0), w.tangent(0).tangent(0));
            &w0 * &w2 - w1.sq() + Mp::one(prec)
        }
        Model::SixVP => {
            let sigma = liouville_sign(params)?;
            if sigma == 0 {
                return Err(ArcticError::Singularity("W is infinite on u = 0 or v = -pi/2".into()));
            }
            let (u, v) = seed_mixed(&params.u, &params.v);
            let c = Ctx::from_parts(u.lift(params.eta.clone()), u, v);
            let w = w_6vp(&c);
            let w0 = w.v.v.clone();
            let wu = w.v.tangent(0);
            let wv = w.tangent(0).v.clone();
            let wuv = w.tangent(0).tangent(0);
            &w0 * &wuv - wu * wv - Mp::int(sigma as i64, prec)
        }
        m => return Err(ArcticError::Argument(format!("no Liouville structure for model {m}"))),
    };
    let mut worst = Mp::zero(prec);
    for x in PSI_ODE_XIS {
        let r = psi_ode_residual(params, &Mp::new(x, prec))?.abs();
        if r > worst {
            worst = r;
        }
    }
    Ok((wr, worst))
}

/// `φ - ψ` minus its closed-form prefactor (`log ā` for 6V, `log ā_o ā_e` for 6V′),
/// and for 20V `φ^{20V} - φ^{6V′}` minus its correction.
pub fn phi_psi_consistency(params: &ModelParams, xi: &Mp) -> Result<Mp> {
    params.validate()?;
    let p = effective(params);
    let x = xi.with_prec(p.prec());
    let c = Ctx::lifted(&p, &x);
    let (w, s, e) = (&c.w, &c.s, &c.eta);
    let wx = w - &x;
    let a_o = (&wx + e).sin() / (w + e).sin();
    let a_e = (&(s + &x) - e).sin() / (s - e).sin();
    match params.model {
        Model::SixV => Ok(c.phi_6v(&x)? - c.psi_6v(&x)? - log_pos(a_o, "a")?),
        Model::SixVP => Ok(c.phi_6vp(&x)? - c.psi_6vp(&x)? - log_pos(a_o * a_e, "a")?),
        Model::TwentyV | Model::Dt => {
            let corr = (&wx - e).sin() * (w + e).sin() / ((&wx + e).sin() * (w - e).sin());
            Ok(c.phi_20v(&x)? - c.phi_6vp(&x)? + log_pos(corr, "20V correction")?)
        }
    }
}
