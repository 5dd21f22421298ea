//! Tangent families `y + A x - B = 0`, their envelopes, and assembled arctic-curve branches.

use rayon::prelude::*;

use crate::asymptotics::{branch_range, tangent_coefficients, tangent_denominator};
use crate::error::{ArcticError, Result};
use crate::partition::{Model, ModelParams};
use crate::trig_core::{Dual, Mp, Real};

/// Line `y + a x - b = 0` of the tangent family at parameter `xi`.
#[derive(Clone, Debug)]
pub struct TangentLine {
    pub a: Mp,
    pub b: Mp,
    pub xi: Mp,
}

impl TangentLine {
    /// `y + a x - b` at `p`.
    pub fn eval(&self, p: &CurvePoint) -> Mp {
        &(&p.y + &(&self.a * &p.x)) - &self.b
    }
}

/// Point in rescaled coordinates, origin at the SE corner of the domain.
#[derive(Clone, Debug)]
pub struct CurvePoint {
    pub x: Mp,
    pub y: Mp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BranchId {
    Ne,
    Se,
    /// Whole curve from one analytic parametrisation (domino tilings).
    FullAnalytic,
    /// 6V central-symmetry images of SE and NE.
    Nw,
    Sw,
}

impl BranchId {
    pub fn name(self) -> &'static str {
        match self {
            BranchId::Ne => "NE",
            BranchId::Se => "SE",
            BranchId::FullAnalytic => "FULL",
            BranchId::Nw => "NW",
            BranchId::Sw => "SW",
        }
    }

    pub fn parse(s: &str) -> Result<BranchId> {
        match s.trim().to_ascii_uppercase().as_str() {
            "NE" => Ok(BranchId::Ne),
            "SE" => Ok(BranchId::Se),
            "FULL" | "FULL_ANALYTIC" => Ok(BranchId::FullAnalytic),
            "NW" => Ok(BranchId::Nw),
            "SW" => Ok(BranchId::Sw),
            o => Err(ArcticError::Argument(format!("unknown branch '{o}'"))),
        }
    }
}

/// Envelope point together with the line it was generated from (in the branch's own frame).
#[derive(Clone, Debug)]
pub struct BranchSample {
    pub xi: Mp,
    pub point: CurvePoint,
    pub line: TangentLine,
}

#[derive(Clone, Debug)]
pub struct Branch {
    pub model: Model,
    pub id: BranchId,
    pub range: (Mp, Mp),
    pub samples: Vec<BranchSample>,
}

/// `ξ` range of the NE family; for DT the NE part of its full range.
pub fn ne_range(params: &ModelParams) -> (Mp, Mp) {
    let (lo, hi) = branch_range(params);
    if params.model == Model::Dt {
        return (Mp::pi_frac(-1, 4, params.prec()), hi);
    }
    (lo, hi)
}

fn check_in(range: &(Mp, Mp), xi: &Mp, model: Model) -> Result<()> {
    // endpoints computed from π in working precision: allow a few ulps of slack
    let prec = range.0.prec().min(xi.prec());
    let slack = Mp::pow2(8 - prec as i64, prec);
    if xi < &(&range.0 - &slack) || xi > &(&range.1 + &slack) {
        return Err(ArcticError::Argument(format!(
            "xi = {} outside the {model} tangent range [{}, {}]",
            xi.to_sig(12),
            range.0.to_sig(12),
            range.1.to_sig(12)
        )));
    }
    Ok(())
}

/// `(A, B)` at `ξ` in the (full) branch range.
pub fn tangent_line(params: &ModelParams, xi: &Mp) -> Result<TangentLine> {
    params.validate()?;
    check_in(&branch_range(params), xi, params.model)?;
    let xi = xi.with_prec(params.prec());
    let (a, b) = tangent_coefficients(params, &xi);
    if !a.is_finite() || !b.is_finite() {
        return Err(ArcticError::Singularity(format!("tangent line singular at xi = {}", xi.to_sig(12))));
    }
    Ok(TangentLine { a, b, xi })
}

/// `(A, B, A', B')` at `ξ` by forward-mode differentiation, with no range check.
pub fn tangent_jet(params: &ModelParams, xi: &Mp) -> (Mp, Mp, Mp, Mp) {
    let x = Dual::var(xi.with_prec(params.prec()), 0, 1);
    let (a, b) = tangent_coefficients(params, &x);
    (a.v.clone(), b.v.clone(), a.tangent(0), b.tangent(0))
}

/// `(A', B')` by central differences with step `h` (cross-check of [`tangent_jet`]).
pub fn tangent_jet_fd(params: &ModelParams, xi: &Mp, h: &Mp) -> (Mp, Mp) {
    let xi = xi.with_prec(params.prec());
    let (ap, bp) = tangent_coefficients(params, &(&xi + h));
    let (am, bm) = tangent_coefficients(params, &(&xi - h));
    let two_h = h * &Mp::int(2, h.prec());
    ((ap - am) / two_h.clone(), (bp - bm) / two_h)
}

/// Envelope point without a range check (analytic continuation).
pub fn envelope_point_unchecked(params: &ModelParams, xi: &Mp) -> Result<(CurvePoint, TangentLine)> {
    let prec = params.prec();
    if params.model != Model::SixV && tangent_denominator(params, xi).abs() < Mp::pow2(-(prec as i64) / 2, prec) {
        // 0/0 in the coefficients: symmetric average of the two sides, error O(δ²)
        let d = Mp::pow2(-(prec as i64) / 4, prec);
        let (p, l) = envelope_point_unchecked(params, &(xi + &d))?;
        let (q, m) = envelope_point_unchecked(params, &(xi - &d))?;
        let half = |x: Mp, y: Mp| (x + y) / Mp::int(2, prec);
        return Ok((
            CurvePoint { x: half(p.x, q.x), y: half(p.y, q.y) },
            TangentLine { a: half(l.a, m.a), b: half(l.b, m.b), xi: xi.with_prec(prec) },
        ));
    }
    let (a, b, da, db) = tangent_jet(params, xi);
    if da.is_zero() {
        return Err(ArcticError::Degenerate(format!("A'(xi) vanishes at xi = {}", xi.to_sig(12))));
    }
    let x = &db / &da;
    let y = &b - &(&a * &x);
    if !x.is_finite() || !y.is_finite() {
        return Err(ArcticError::Singularity(format!("envelope singular at xi = {}", xi.to_sig(12))));
    }
    Ok((CurvePoint { x, y }, TangentLine { a, b, xi: xi.with_prec(params.prec()) }))
}

/// `X = B'/A'`, `Y = B - A B'/A'`.
pub fn envelope_point(params: &ModelParams, xi: &Mp) -> Result<CurvePoint> {
    params.validate()?;
    check_in(&branch_range(params), xi, params.model)?;
    Ok(envelope_point_unchecked(params, xi)?.0)
}

/// Weight-swapping involution used to reach the SE branch.
pub fn star_involution(params: &ModelParams) -> Result<ModelParams> {
    params.validate()?;
    let prec = params.prec();
    let pi = Mp::pi(prec);
    let (u, v) = (&params.u, &params.v);
    let out = match params.model {
        // u - v ↦ π - (u - v)
        Model::SixV => params.with_uv(&(&pi - &params.w()) + v, v.clone()),
        Model::SixVP => params.with_uv(-u.clone(), -(&pi + v)),
        Model::TwentyV => params.with_uv(u.clone(), -(v + &pi)),
        Model::Dt => return Err(ArcticError::Argument("no star involution for domino tilings".into())),
    };
    out.validate()?;
    Ok(out)
}

/// Coordinate change taking the NE branch of the starred model to the SE branch.
pub fn se_branch_map(model: Model, p: &CurvePoint) -> CurvePoint {
    let prec = p.x.prec();
    let i = |k| Mp::int(k, prec);
    match model {
        Model::SixV | Model::Dt => CurvePoint { x: p.x.clone(), y: &i(1) - &p.y },
        Model::SixVP => CurvePoint { x: p.x.clone(), y: &i(2) - &p.y },
        Model::TwentyV => CurvePoint { x: p.x.clone(), y: &(&i(2) - &p.x) - &p.y },
    }
}

/// Image of a tangent line under [`se_branch_map`].
pub fn se_line_map(model: Model, l: &TangentLine) -> TangentLine {
    let prec = l.a.prec();
    let i = |k| Mp::int(k, prec);
    let (a, b) = match model {
        Model::SixV | Model::Dt => (-l.a.clone(), &i(1) - &l.b),
        Model::SixVP => (-l.a.clone(), &i(2) - &l.b),
        Model::TwentyV => (&i(1) - &l.a, &i(2) - &l.b),
    };
    TangentLine { a, b, xi: l.xi.clone() }
}

/// 6V central symmetry `(x, y) ↦ (-1-x, 1-y)`.
pub fn central_symmetry(p: &CurvePoint) -> CurvePoint {
    let one = Mp::one(p.x.prec());
    CurvePoint { x: -(&one + &p.x), y: &one - &p.y }
}

fn central_line(l: &TangentLine) -> TangentLine {
    let one = Mp::one(l.a.prec());
    TangentLine { a: l.a.clone(), b: &(&one - &l.a) - &l.b, xi: l.xi.clone() }
}

/// Relative offset of the first and last sample from the open ends of the range.
pub const ENDPOINT_OFFSET: f64 = 1e-8;

/// Chebyshev–Lobatto nodes on `[lo, hi]`, ascending, endpoints pulled inside by
/// `ENDPOINT_OFFSET · (hi - lo)`.
pub fn chebyshev_nodes(lo: &Mp, hi: &Mp, num: usize) -> Vec<Mp> {
    let prec = lo.prec().max(hi.prec());
    let span = hi - lo;
    let mid = (lo + hi) / Mp::int(2, prec);
    let half = &span / &Mp::int(2, prec);
    let eps = &span * &Mp::new(ENDPOINT_OFFSET, prec);
    let m = (num - 1) as i64;
    (0..num)
        .map(|i| {
            if i == 0 {
                lo + &eps
            } else if i + 1 == num {
                hi - &eps
            } else {
                let c = Mp::pi_frac(i as i64, m, prec).cos();
                &mid - &(&half * &c)
            }
        })
        .collect()
}

fn sample(params: &ModelParams, range: (Mp, Mp), num: usize) -> Result<Vec<BranchSample>> {
    chebyshev_nodes(&range.0, &range.1, num)
        .into_par_iter()
        .map(|xi| {
            let (point, line) = envelope_point_unchecked(params, &xi)?;
            Ok(BranchSample { xi, point, line })
        })
        .collect()
}

/// Samples a branch at `num_points` Chebyshev nodes of its `ξ` range.
///
/// NE: the tangent family directly. SE: NE of the starred parameters, then [`se_branch_map`].
/// FullAnalytic: the whole domino-tiling curve. NW/SW: 6V only, central images of SE/NE.
pub fn branch_curve(params: &ModelParams, branch: BranchId, num_points: usize) -> Result<Branch> {
    if num_points < 2 {
        return Err(ArcticError::Argument("need at least 2 points per branch".into()));
    }
    params.validate()?;
    let model = params.model;
    match branch {
        BranchId::Ne => {
            let range = ne_range(params);
            let samples = sample(params, range.clone(), num_points)?;
            Ok(Branch { model, id: branch, range, samples })
        }
        BranchId::Se => {
            let star = star_involution(params)?;
            let range = ne_range(&star);
            let samples = sample(&star, range.clone(), num_points)?
                .into_iter()
                .map(|s| BranchSample {
                    point: se_branch_map(model, &s.point),
                    line: se_line_map(model, &s.line),
                    xi: s.xi,
                })
                .collect();
            Ok(Branch { model, id: branch, range, samples })
        }
        BranchId::FullAnalytic => {
            if model != Model::Dt {
                return Err(ArcticError::Argument(format!(
                    "a single analytic parametrisation is only available for domino tilings, not {model}"
                )));
            }
            let range = branch_range(params);
            let samples = sample(params, range.clone(), num_points)?;
            Ok(Branch { model, id: branch, range, samples })
        }
        BranchId::Nw | BranchId::Sw => {
            if model != Model::SixV {
                return Err(ArcticError::Argument(format!("central-symmetry completion is specific to 6V, not {model}")));
            }
            let source = branch_curve(params, if branch == BranchId::Nw { BranchId::Se } else { BranchId::Ne }, num_points)?;
            Ok(central_image(&source, branch))
        }
    }
}

fn central_image(b: &Branch, id: BranchId) -> Branch {
    Branch {
        model: b.model,
        id,
        range: b.range.clone(),
        samples: b
            .samples
            .iter()
            .map(|s| BranchSample { xi: s.xi.clone(), point: central_symmetry(&s.point), line: central_line(&s.line) })
            .collect(),
    }
}

/// Which coordinate shift to apply before evaluating the algebraic curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebraicShift {
    /// 20V NE branch: evaluate at `(x+2, y-1)`.
    TwentyV,
    /// Domino curve: evaluate at `(x+2, y)`.
    Dt,
    /// No shift.
    None,
}

/// `3⁶ r⁵ - 5³3³ r³ - 2·3²·5⁴ r² - 2²·5⁵ (x² + y² - 4x²y²)` with `r = x² + y² - 2/3`.
pub fn algebraic_polynomial(x: &Mp, y: &Mp) -> Mp {
    let prec = x.prec();
    let i = |k| Mp::int(k, prec);
    let x2 = x.sq();
    let y2 = y.sq();
    let r = &(&x2 + &y2) - &Mp::ratio(2, 3, prec);
    i(729) * r.powi(5) - i(3375) * r.powi(3) - i(11250) * r.sq()
        - i(12500) * (&(&x2 + &y2) - &(&i(4) * &(&x2 * &y2)))
}

/// Algebraic-curve residual at a branch point after the given shift.
pub fn algebraic_residual_20v(p: &CurvePoint, shift: AlgebraicShift) -> Mp {
    let prec = p.x.prec();
    let i = |k| Mp::int(k, prec);
    match shift {
        AlgebraicShift::TwentyV => algebraic_polynomial(&(&p.x + &i(2)), &(&p.y - &i(1))),
        AlgebraicShift::Dt => algebraic_polynomial(&(&p.x + &i(2)), &p.y),
        AlgebraicShift::None => algebraic_polynomial(&p.x, &p.y),
    }
}

/// Continuation `ξ` of the NE family whose envelope has abscissa `x`, searched on `(a, b)`.
/// Returns the `y` of every match.
pub fn match_x(params: &ModelParams, x: &Mp, a: &Mp, b: &Mp, grid: usize) -> Vec<Mp> {
    let prec = params.prec();
    let at = |xi: &Mp| envelope_point_unchecked(params, xi).ok().map(|(p, _)| p);
    let nodes: Vec<Mp> = (0..=grid as i64).map(|i| a + &(&(b - a) * &Mp::ratio(i, grid as i64, prec))).collect();
    let vals: Vec<Option<Mp>> = nodes.iter().map(|n| at(n).map(|p| &p.x - x)).collect();
    let mut out = Vec::new();
    for k in 0..grid {
        let (Some(f0), Some(f1)) = (&vals[k], &vals[k + 1]) else { continue };
        if f0.sign() * f1.sign() > 0 {
            continue;
        }
        let (mut lo, mut hi) = (nodes[k].clone(), nodes[k + 1].clone());
        let s0 = f0.sign();
        let mut ok = true;
        for _ in 0..(prec / 2) {
            let m = (&lo + &hi) / Mp::int(2, prec);
            match at(&m) {
                Some(p) => {
                    if (&p.x - x).sign() == s0 {
                        lo = m;
                    } else {
                        hi = m;
                    }
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if let (true, Some(p)) = (ok, at(&((&lo + &hi) / Mp::int(2, prec)))) {
            out.push(p.y);
        }
    }
    out
}

/// Largest distance between SE samples and the analytic continuation of the NE family
/// (matched by abscissa), for the free-fermion 6V′ and 20V models.
pub fn free_fermion_continuation_deviation(params: &ModelParams, num_points: usize) -> Result<Mp> {
    params.validate()?;
    if !matches!(params.model, Model::SixVP | Model::TwentyV) {
        return Err(ArcticError::Argument("continuation check applies to 6V' and 20V".into()));
    }
    let prec = params.prec();
    let se = branch_curve(params, BranchId::Se, num_points)?;
    // the continuation runs past ξ = 0 into ξ > 0, as far as the SE range is long
    let len = -se.range.0.clone();
    let a = Mp::new(1e-9, prec);
    let b = &len + &(&len.abs() * &Mp::new(0.05, prec));
    let inner: Vec<&BranchSample> = se.samples.iter().skip(1).take(num_points.saturating_sub(2)).collect();
    let devs: Vec<Result<Mp>> = inner
        .par_iter()
        .map(|s| {
            let ys = match_x(params, &s.point.x, &a, &b, 200);
            ys.iter()
                .map(|y| (y - &s.point.y).abs())
                .min_by(|p, q| p.partial_cmp(q).unwrap())
                .ok_or_else(|| ArcticError::Degenerate(format!("no continuation point with x = {}", s.point.x.to_sig(12))))
        })
        .collect();
    let mut worst = Mp::zero(prec);
    for d in devs {
        let d = d?;
        if d > worst {
            worst = d;
        }
    }
    Ok(worst)
}
