use arctic_core::arctic::*;
use arctic_core::asymptotics::*;
use arctic_core::enumerate::*;
use arctic_core::partition::*;
use arctic_core::paths::{closed_row, dp_row, PathWeights};
use arctic_core::{ArcticError, Model, ModelParams, Mp, NamedPoint, Real, Result};
use rayon::prelude::*;
use rug::Integer;

use crate::args::Suite;
use crate::report::{worst, Check};

type Task<'a> = Box<dyn Fn() -> Vec<Check> + Send + Sync + 'a>;

fn run(tasks: Vec<Task<'_>>) -> Vec<Check> {
    tasks.par_iter().flat_map_iter(|t| t()).collect()
}

const BASE: u32 = 256;
const HIGH: u32 = 512;

fn params(model: Model, eta: f64, u: f64, v: f64, prec: u32) -> ModelParams {
    let m = |x| Mp::new(x, prec);
    ModelParams::new(model, m(eta), m(u), m(v)).expect("built-in point lies in its domain")
}

fn dt(prec: u32) -> ModelParams {
    NamedPoint::Uniform20V.params(prec).with_model(Model::Dt)
}

fn label(p: &ModelParams) -> String {
    format!(
        "{}({}, {}, {})",
        p.model,
        p.eta.to_sig(6),
        p.u.to_sig(6),
        p.v.to_sig(6)
    )
}

/// Runs one suite (or all). `user` replaces the built-in parameter points where a suite supports it.
pub fn run_suite(suite: Suite, user: Option<&ModelParams>, prec: u32) -> Vec<Check> {
    match suite {
        Suite::All => Suite::EACH.iter().flat_map(|s| run_suite(*s, user, prec)).collect(),
        Suite::Counts => counts(prec),
        Suite::Recursions => recursions(user, prec),
        Suite::ClosedForms => closed_forms(user, prec),
        Suite::SumRules => sum_rules(user, prec),
        Suite::Saddles => saddles(user, prec.max(HIGH)),
        Suite::Curves => curves(user, prec),
        Suite::AsymptoticConvergence => asymptotic_convergence(prec),
    }
}

// ---- counts

pub fn counts(prec: u32) -> Vec<Check> {
    const S: &str = "counts";
    let mut tasks: Vec<Task> = Vec::new();
    for (np, seq) in [(NamedPoint::Asm, vec![1, 2, 7, 42]), (NamedPoint::Vsasm, vec![1, 3, 26])] {
        for (i, z) in seq.into_iter().enumerate() {
            let np = np.clone();
            tasks.push(Box::new(move || {
                let n = i + 1;
                let p = np.params(prec);
                let name = format!("{} n={n}", np.label());
                let mut out = Vec::new();
                match (partition_fn(&p, n), enumerate_vertex_model(&p, n)) {
                    (Ok(d), Ok(e)) => {
                        out.push(Check::rel(S, format!("{name} determinant vs enumeration"), &d, &e.total, 1e-20, "enumeration"));
                        out.push(Check::rel(S, format!("{name} determinant"), &d, &Mp::int(z, prec), 1e-20, "exact"));
                    }
                    (Err(e), _) | (_, Err(e)) => out.push(Check::failed(S, name, e)),
                }
                out
            }));
        }
    }
    for n in 1..=3usize {
        tasks.push(Box::new(move || {
            let p = NamedPoint::Uniform20V.params(prec);
            let f = Mp::from_integer(&z20v_formula(n), prec);
            let name = format!("uniform-20V n={n}");
            match (partition_fn(&p, n), enumerate_vertex_model(&p, n)) {
                (Ok(d), Ok(e)) => vec![
                    Check::rel(S, format!("{name} relation vs enumeration"), &d, &e.total, 1e-20, "enumeration"),
                    Check::rel(S, format!("{name} relation vs product formula"), &d, &f, 1e-20, "formula"),
                ],
                (Err(e), _) | (_, Err(e)) => vec![Check::failed(S, name, e)],
            }
        }));
    }
    for n in 1..=4usize {
        tasks.push(Box::new(move || {
            let name = format!("domino n={n}");
            match count_aztec_triangle(n) {
                Ok(c) => {
                    let mut out = vec![Check::equal(S, format!("{name} vs product formula"), &c.total, &z20v_formula(n), "formula")];
                    if n <= MAX_N_20V {
                        match count_vertex_model(Model::TwentyV, n) {
                            Ok(t) => out.push(Check::equal(S, format!("{name} vs 20V count"), &c.total, &t.total, "enumeration")),
                            Err(e) => out.push(Check::failed(S, name, e)),
                        }
                    }
                    out
                }
                Err(e) => vec![Check::failed(S, name, e)],
            }
        }));
    }
    for n in 1..=3usize {
        tasks.push(Box::new(move || {
            let name = format!("refined domino/20V identity n={n}");
            match refined_dt_identity(n) {
                Ok(d) => vec![Check::equal(S, name, &d, &Integer::new(), "identity")],
                Err(e) => vec![Check::failed(S, name, e)],
            }
        }));
    }
    run(tasks)
}

// ---- recursions and symmetries

fn recursion_points(prec: u32) -> Vec<ModelParams> {
    vec![
        NamedPoint::Asm.params(prec),
        params(Model::SixV, 0.3, 0.9, 0.0, prec),
        params(Model::SixV, 1.0, 1.9, 0.0, prec),
        NamedPoint::Vsasm.params(prec),
        params(Model::SixVP, 0.3, 0.2, -1.1, prec),
        params(Model::SixVP, 0.6, -0.15, -1.9, prec),
    ]
}

pub fn recursions(user: Option<&ModelParams>, prec: u32) -> Vec<Check> {
    const S: &str = "recursions";
    let pts = match user {
        Some(p) if matches!(p.model, Model::SixV | Model::SixVP) => vec![p.clone()],
        Some(p) => return vec![Check::failed(S, label(p), "recursions are defined for 6v and 6vp")],
        None => recursion_points(prec),
    };
    let mut tasks: Vec<Task> = Vec::new();
    for p in pts.clone() {
        for n in 1..=6usize {
            let p = p.clone();
            tasks.push(Box::new(move || {
                let name = format!("{} n={n}", label(&p));
                match recursion_residual(&p, n) {
                    Ok((a, b)) => vec![
                        Check::small(S, format!("{name} determinant recursion"), &a, 1e-20, "identity"),
                        Check::small(S, format!("{name} one-point relation"), &b, 1e-20, "identity"),
                    ],
                    Err(e) => vec![Check::failed(S, name, e)],
                }
            }));
        }
    }
    for p in pts {
        let pi = Mp::pi(p.prec());
        let q = match p.model {
            Model::SixV => p.with_uv(&pi - &p.w(), Mp::zero(p.prec())),
            _ => p.with_uv(-p.u.clone(), -(&pi + &p.v)),
        };
        tasks.push(Box::new(move || {
            (1..=6usize)
                .map(|n| {
                    let name = format!("{} reflection symmetry n={n}", label(&p));
                    match (partition_fn(&p, n), partition_fn(&q, n)) {
                        (Ok(a), Ok(b)) => Check::rel(S, name, &a, &b, 1e-25, "identity"),
                        (Err(e), _) | (_, Err(e)) => Check::failed(S, name, e),
                    }
                })
                .collect()
        }));
    }
    run(tasks)
}

// ---- closed forms

const CLOSED_FORM_UV: [(f64, f64); 5] = [(0.1, -1.45), (-0.2, -1.6), (0.3, -1.4), (0.05, -1.5), (-0.35, -1.7)];

fn path_points(prec: u32) -> Vec<ModelParams> {
    vec![
        NamedPoint::Asm.params(prec),
        params(Model::SixV, 0.3, 1.2, 0.0, prec),
        params(Model::SixV, 0.5, 1.6, 0.0, prec),
        params(Model::SixV, 0.2, 0.9, 0.0, prec),
        params(Model::SixV, 1.0, 1.8, 0.0, prec),
        NamedPoint::Vsasm.params(prec),
        params(Model::SixVP, 0.3, 0.2, -1.1, prec),
        params(Model::SixVP, 0.5, -0.1, -1.9, prec),
        params(Model::SixVP, 0.2, 0.1, -1.5, prec),
        params(Model::SixVP, 0.25, -0.2, -1.2, prec),
        NamedPoint::Uniform20V.params(prec),
        params(Model::TwentyV, 0.3, 0.2, -1.3, prec),
        params(Model::TwentyV, 0.25, 0.4, -1.0, prec),
        params(Model::TwentyV, 0.1, 0.7, -1.6, prec),
        params(Model::TwentyV, 0.35, 0.3, -1.2, prec),
    ]
}

/// Largest relative deviation between closed-form and DP path partition functions, `k, l ≤ kmax`.
pub fn path_deviation(p: &ModelParams, kmax: usize) -> Result<Mp> {
    let pw = PathWeights::new(p)?;
    let rows: Vec<Mp> = (0..=kmax)
        .into_par_iter()
        .map(|k| {
            let c = closed_row(&pw, k, kmax);
            let d = dp_row(&pw, k, kmax);
            c.iter().zip(&d).map(|(a, b)| Mp::rel_diff(a, b)).fold(Mp::zero(p.prec()), |x, y| Mp::max(&x, &y))
        })
        .collect();
    Ok(rows.into_iter().fold(Mp::zero(p.prec()), |x, y| Mp::max(&x, &y)))
}

pub fn closed_forms(user: Option<&ModelParams>, prec: u32) -> Vec<Check> {
    const S: &str = "closed_forms";
    let hp = prec.max(HIGH);
    let mut tasks: Vec<Task> = Vec::new();
    for (case, eta, tag) in [(ClosedFormCase::Classical, Mp::zero(hp), "eta=0"), (ClosedFormCase::FreeFermion, Mp::pi_frac(1, 4, hp), "eta=pi/4")] {
        for (u, v) in CLOSED_FORM_UV {
            let eta = eta.clone();
            tasks.push(Box::new(move || {
                let (um, vm) = (Mp::new(u, hp), Mp::new(v, hp));
                (1..=8usize)
                    .map(|n| {
                        let name = format!("delta closed form {tag} u={u} v={v} n={n}");
                        match (delta_6vp(&um, &vm, &eta, n), delta_closed_form(case, &um, &vm, n)) {
                            (Ok(d), Ok(c)) => Check::rel(S, name, &d, &c, 1e-30, "formula"),
                            (Err(e), _) | (_, Err(e)) => Check::failed(S, name, e),
                        }
                    })
                    .collect()
            }));
        }
    }
    let pts = match user {
        Some(p) if p.model != Model::Dt => vec![p.clone()],
        _ => path_points(prec),
    };
    for p in pts {
        tasks.push(Box::new(move || {
            let name = format!("{} paths closed form vs transfer DP, k,l <= 30", label(&p));
            vec![worst(S, name, [path_deviation(&p, 30)], 1e-25, "formula")]
        }));
    }
    tasks.push(Box::new(move || {
        let p = NamedPoint::Uniform20V.params(prec);
        let pw = match PathWeights::new(&p) {
            Ok(pw) => pw,
            Err(e) => return vec![Check::failed(S, "uniform-20V path integrality", e)],
        };
        let mut dev = Mp::zero(prec);
        for k in 0..=12 {
            for y in dp_row(&pw, k, 12) {
                let r = Mp(y.0.clone().round());
                dev = Mp::max(&dev, &(&y - &r).abs());
            }
        }
        vec![Check::small(S, "uniform-20V path counts are integers, k,l <= 12", &dev, 1e-20, "exact")]
    }));
    run(tasks)
}

// ---- refined sum rules

/// `Σ_k Z_{n,k}` with the last column's weights moved to `v + ξ`, from weighted enumeration.
pub fn refined_sum(params: &ModelParams, n: usize, xi: &Mp) -> Result<Mp> {
    let rc = enumerate_vertex_model(params, n)?;
    let w = weights(params).all();
    let shifted = params.with_uv(params.u.clone(), &params.v + xi);
    let wb = weights(&shifted).all();
    let r = |i: usize| &wb[i] / &w[i];
    let prec = params.prec();
    let mut acc = Mp::zero(prec);
    match params.model {
        Model::SixV => {
            for k in 1..=n {
                let f = r(1).powi(k as i64 - 1) * r(2) * r(0).powi((n - k) as i64);
                acc = acc + &rc.by_exit[k - 1] * &f;
            }
        }
        Model::SixVP => {
            let rows = 2 * n - 1;
            for k in 1..=rows {
                let mut f = Mp::one(prec);
                for row in 1..=rows {
                    let base = if row % 2 == 1 { 0 } else { 3 };
                    let t = if row > k {
                        0
                    } else if row == k {
                        2
                    } else {
                        1
                    };
                    f = f * r(base + t);
                }
                acc = acc + &rc.by_exit[k - 1] * &f;
            }
        }
        Model::TwentyV => {
            let (h, d) = rc.split.clone().ok_or_else(|| ArcticError::Argument("missing 20V split".into()))?;
            let rows = 2 * n - 1;
            for y in 1..=rows {
                let rest = r(1).powi(y as i64 - 1) * r(0).powi((rows - y) as i64);
                acc = acc + (&h[y - 1] * &r(4) + &d[y - 1] * &r(2)) * rest;
            }
        }
        Model::Dt => return Err(ArcticError::Argument("refined sums are for vertex models".into())),
    }
    Ok(acc)
}

pub fn sum_rules(user: Option<&ModelParams>, prec: u32) -> Vec<Check> {
    const S: &str = "sum_rules";
    let cases: Vec<(ModelParams, Vec<usize>)> = match user {
        Some(p) if p.model != Model::Dt => {
            let ns = match p.model {
                Model::SixV => vec![2, 3, 4],
                _ => vec![2, 3],
            };
            vec![(p.clone(), ns)]
        }
        _ => vec![
            (NamedPoint::Asm.params(prec), vec![3, 4, 5]),
            (params(Model::SixV, 0.4, 1.1, 0.0, prec), vec![2, 3]),
            (NamedPoint::Vsasm.params(prec), vec![2, 3]),
            (params(Model::SixVP, 0.3, 0.2, -1.1, prec), vec![2, 3]),
            (NamedPoint::Uniform20V.params(prec), vec![2, 3]),
            (params(Model::TwentyV, 0.3, 0.2, -1.3, prec), vec![2]),
        ],
    };
    let mut tasks: Vec<Task> = Vec::new();
    for (p, ns) in cases {
        for n in ns {
            let p = p.clone();
            tasks.push(Box::new(move || {
                let mut out = Vec::new();
                for x in [-0.3, -0.2, -0.05] {
                    let xi = Mp::new(x, prec);
                    let name = format!("{} n={n} xi={x} refined sum", label(&p));
                    match (refined_partition(&p, n, &xi), refined_sum(&p, n, &xi)) {
                        (Ok(a), Ok(b)) => out.push(Check::rel(S, name, &a, &b, 1e-20, "enumeration")),
                        (Err(e), _) | (_, Err(e)) => out.push(Check::failed(S, name, e)),
                    }
                }
                let name = format!("{} n={n} one-point at xi=0", label(&p));
                match one_point(&p, n, &Mp::zero(prec)) {
                    Ok(h) => out.push(Check::rel(S, name, &h, &Mp::one(prec), 1e-60, "exact")),
                    Err(e) => out.push(Check::failed(S, name, e)),
                }
                out
            }));
        }
    }
    for n in 1..=5usize {
        tasks.push(Box::new(move || {
            let name = format!("6V refined counts sum to total n={n}");
            match count_vertex_model(Model::SixV, n) {
                Ok(r) => {
                    let s: Integer = r.by_exit.iter().sum();
                    vec![Check::equal(S, name, &s, &r.total, "enumeration")]
                }
                Err(e) => vec![Check::failed(S, name, e)],
            }
        }));
    }
    run(tasks)
}

// ---- saddles, Liouville

fn interior_xis(p: &ModelParams, count: usize) -> Vec<Mp> {
    let (lo, hi) = branch_range(p);
    let prec = p.prec();
    (1..=count).map(|i| &lo + &(&(&hi - &lo) * &Mp::ratio(i as i64, count as i64 + 1, prec))).collect()
}

fn saddle_points(prec: u32) -> Vec<ModelParams> {
    let pf = |a, b| Mp::pi_frac(a, b, prec);
    vec![
        NamedPoint::Asm.params(prec),
        params(Model::SixV, 0.4, 1.0, -0.3, prec),
        ModelParams::new(Model::SixVP, pf(1, 3), pf(1, 12), pf(-1, 2)).expect("in domain"),
        params(Model::SixVP, 0.5, 0.2, -1.4, prec),
        params(Model::SixVP, 0.5, -0.2, -1.1, prec),
        NamedPoint::Uniform20V.params(prec),
        params(Model::TwentyV, 0.35, 0.3, -1.2, prec),
        dt(prec),
    ]
}

fn liouville_points(prec: u32) -> Vec<ModelParams> {
    let pf = |a, b| Mp::pi_frac(a, b, prec);
    let m = |x| Mp::new(x, prec);
    vec![
        ModelParams::new(Model::SixV, pf(1, 6), pf(2, 3), Mp::zero(prec)).expect("in domain"),
        params(Model::SixV, 0.4, 1.3, 0.0, prec),
        ModelParams::new(Model::SixVP, pf(1, 5), pf(1, 7), &pf(-1, 2) + &m(0.13)).expect("in domain"),
        ModelParams::new(Model::SixVP, pf(1, 3), pf(1, 12), m(-1.4)).expect("in domain"),
        params(Model::SixVP, 0.5, -0.2, -1.1, prec),
    ]
}

pub fn saddles(user: Option<&ModelParams>, prec: u32) -> Vec<Check> {
    const S: &str = "saddles";
    let (pts, lpts) = match user {
        Some(p) => {
            let p = p.at_precision(prec.max(p.prec()));
            let l = if matches!(p.model, Model::SixV | Model::SixVP) { vec![p.clone()] } else { vec![] };
            (vec![p], l)
        }
        None => (saddle_points(prec), liouville_points(prec)),
    };
    let mut tasks: Vec<Task> = Vec::new();
    for p in pts {
        tasks.push(Box::new(move || {
            let xis = interior_xis(&p, 10);
            let res = xis.iter().flat_map(|xi| match saddle_residuals(&p, xi) {
                Ok(v) => v.into_iter().map(Ok).collect::<Vec<_>>(),
                Err(e) => vec![Err(e)],
            });
            let k = xis.iter().map(|xi| kappa_consistency(&p, xi));
            vec![
                worst(S, format!("{} saddle residuals at 10 xi", label(&p)), res, 1e-25, "identity"),
                worst(S, format!("{} kappa consistency at 10 xi", label(&p)), k, 1e-25, "identity"),
            ]
        }));
    }
    for p in lpts {
        tasks.push(Box::new(move || match liouville_residuals(&p) {
            Ok((w, ode)) => vec![
                Check::small(S, format!("{} Liouville/Wronskian residual", label(&p)), &w, 1e-25, "identity"),
                Check::small(S, format!("{} psi ODE residual", label(&p)), &ode, 1e-25, "identity"),
            ],
            Err(e) => vec![Check::failed(S, format!("{} Liouville", label(&p)), e)],
        }));
    }
    run(tasks)
}

// ---- curves

fn curve_points(prec: u32) -> Vec<(ModelParams, Vec<BranchId>)> {
    let ne_se = vec![BranchId::Ne, BranchId::Se];
    let all6 = vec![BranchId::Ne, BranchId::Se, BranchId::Nw, BranchId::Sw];
    vec![
        (NamedPoint::Asm.params(prec), all6.clone()),
        (params(Model::SixV, 0.6, 1.9, 0.0, prec), all6),
        (NamedPoint::Vsasm.params(prec), ne_se.clone()),
        (params(Model::SixVP, 0.6, 0.1, -1.4, prec), ne_se.clone()),
        (NamedPoint::FreeFermion6VP.params(prec), ne_se.clone()),
        (NamedPoint::Uniform20V.params(prec), ne_se.clone()),
        (params(Model::TwentyV, 0.45, 0.2, -1.3, prec), ne_se),
        (dt(prec), vec![BranchId::FullAnalytic]),
    ]
}

fn tangency_checks(p: &ModelParams, ids: &[BranchId]) -> Vec<Check> {
    const S: &str = "curves";
    let mut out = Vec::new();
    for &id in ids {
        let name = format!("{} {} tangency |y + A x - B|, 41 points", label(p), id.name());
        match branch_curve(p, id, 41) {
            Ok(b) => out.push(worst(S, name, b.samples.iter().map(|s| Ok(s.line.eval(&s.point))), 1e-20, "identity")),
            Err(e) => out.push(Check::failed(S, name, e)),
        }
    }
    out
}

fn jet_check(p: &ModelParams) -> Check {
    const S: &str = "curves";
    let hp = HIGH.max(p.prec());
    let p = p.at_precision(hp);
    let h = Mp::new(1e-10, hp);
    let id = if p.model == Model::Dt { BranchId::FullAnalytic } else { BranchId::Ne };
    let name = format!("{} dual vs central-difference (A', B'), step 1e-10", label(&p));
    let b = match branch_curve(&p, id, 21) {
        Ok(b) => b,
        Err(e) => return Check::failed(S, name, e),
    };
    let inner = &b.samples[1..b.samples.len() - 1];
    let devs = inner.iter().flat_map(|s| {
        let (_, _, da, db) = tangent_jet(&p, &s.xi);
        let (fa, fb) = tangent_jet_fd(&p, &s.xi, &h);
        [Ok(Mp::rel_diff(&da, &fa)), Ok(Mp::rel_diff(&db, &fb))]
    });
    worst(S, name, devs, 1e-8, "identity")
}

pub fn curves(user: Option<&ModelParams>, prec: u32) -> Vec<Check> {
    const S: &str = "curves";
    let prec = prec.max(BASE);
    if let Some(p) = user {
        let ids = match p.model {
            Model::SixV => vec![BranchId::Ne, BranchId::Se, BranchId::Nw, BranchId::Sw],
            Model::Dt => vec![BranchId::FullAnalytic],
            _ => vec![BranchId::Ne, BranchId::Se],
        };
        let mut out = tangency_checks(p, &ids);
        out.push(jet_check(p));
        return out;
    }
    let mut tasks: Vec<Task> = Vec::new();
    for (p, ids) in curve_points(prec) {
        tasks.push(Box::new(move || {
            let mut out = tangency_checks(&p, &ids);
            out.push(jet_check(&p));
            out
        }));
    }
    tasks.push(Box::new(move || {
        let p = NamedPoint::FreeFermion6VP.params(prec);
        let one = Mp::one(prec);
        let mut res = Vec::new();
        for id in [BranchId::Ne, BranchId::Se] {
            match branch_curve(&p, id, 41) {
                Ok(b) => res.extend(b.samples.iter().map(|s| Ok((&s.point.x + &one).sq() + (&s.point.y - &one).sq() - one.clone()))),
                Err(e) => res.push(Err(e)),
            }
        }
        vec![worst(S, "free-fermion 6vp (pi/4, 0, -pi/2) half-circle (x+1)^2+(y-1)^2=1", res, 1e-20, "formula")]
    }));
    tasks.push(Box::new(move || {
        let pf = |a, b| Mp::pi_frac(a, b, prec);
        let p = ModelParams::new(Model::SixVP, pf(1, 4), &pf(1, 4) - &Mp::new(1e-6, prec), pf(-1, 2));
        let name = "free-fermion 6vp u = pi/4 - 1e-6 near ellipse (2x+1)^2+(y-1)^2=1";
        let p = match p {
            Ok(p) => p,
            Err(e) => return vec![Check::failed(S, name, e)],
        };
        let one = Mp::one(prec);
        let mut res = Vec::new();
        for id in [BranchId::Ne, BranchId::Se] {
            match branch_curve(&p, id, 31) {
                Ok(b) => res.extend(
                    b.samples.iter().map(|s| Ok((s.point.x.scale(2) + one.clone()).sq() + (&s.point.y - &one).sq() - one.clone())),
                ),
                Err(e) => res.push(Err(e)),
            }
        }
        vec![worst(S, name, res, 1e-4, "limit")]
    }));
    tasks.push(Box::new(move || {
        let mut out = Vec::new();
        let p = NamedPoint::Uniform20V.params(prec);
        let name = "uniform-20V NE algebraic curve residual, shift (x+2, y-1)";
        match branch_curve(&p, BranchId::Ne, 41) {
            Ok(b) => out.push(worst(
                S,
                name,
                b.samples.iter().map(|s| Ok(algebraic_residual_20v(&s.point, AlgebraicShift::TwentyV))),
                1e-8,
                "formula",
            )),
            Err(e) => out.push(Check::failed(S, name, e)),
        }
        let name = "domino curve algebraic residual, shift (x+2, y)";
        match branch_curve(&dt(prec), BranchId::FullAnalytic, 41) {
            Ok(b) => out.push(worst(
                S,
                name,
                b.samples.iter().map(|s| Ok(algebraic_residual_20v(&s.point, AlgebraicShift::Dt))),
                1e-8,
                "formula",
            )),
            Err(e) => out.push(Check::failed(S, name, e)),
        }
        out
    }));
    for b in [6i64, 4, 3] {
        tasks.push(Box::new(move || {
            let eta = Mp::pi_frac(1, b, prec);
            let name = format!("6vp (pi/{b}, 0, -pi/2) branch = 2 x 6v (pi/{b}, w = pi/2) branch");
            let p6 = ModelParams::new(Model::SixV, eta.clone(), Mp::pi_frac(1, 2, prec), Mp::zero(prec));
            let pp = ModelParams::new(Model::SixVP, eta, Mp::zero(prec), Mp::pi_frac(-1, 2, prec));
            let (p6, pp) = match (p6, pp) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return vec![Check::failed(S, name, e)],
            };
            let mut res = Vec::new();
            for id in [BranchId::Ne, BranchId::Se] {
                match (branch_curve(&p6, id, 25), branch_curve(&pp, id, 25)) {
                    (Ok(c6), Ok(cp)) => {
                        for (s, t) in c6.samples.iter().zip(&cp.samples) {
                            let dx = &t.point.x - &s.point.x.scale(2);
                            let dy = &t.point.y - &s.point.y.scale(2);
                            res.push(Ok(Mp::max(&dx.abs(), &dy.abs())));
                        }
                    }
                    (Err(e), _) | (_, Err(e)) => res.push(Err(e)),
                }
            }
            vec![worst(S, name, res, 1e-10, "identity")]
        }));
    }
    tasks.push(Box::new(move || {
        let p = dt(prec);
        let two_thirds = Mp::ratio(2, 3, prec);
        let sqrt2 = Mp::int(2, prec).sqrt();
        let sqrt3 = Mp::int(3, prec).sqrt();
        let targets = [
            ("domino NW endpoint xi=-3pi/8", Mp::pi_frac(-3, 8, prec), &(&two_thirds * &sqrt2) - &Mp::int(2, prec), &two_thirds * &sqrt2),
            ("domino horizontal tangent xi=-pi/4", Mp::pi_frac(-1, 4, prec), &two_thirds * &(&sqrt3 - &Mp::int(3, prec)), Mp::one(prec)),
            ("domino vertical tangent xi=-1e-15", Mp::new(-1e-15, prec), Mp::zero(prec), Mp::zero(prec)),
        ];
        targets
            .into_iter()
            .flat_map(|(name, xi, x, y)| match envelope_point(&p, &xi) {
                Ok(q) => vec![
                    Check::small(S, format!("{name} x - {}", x.to_sig(12)), &(&q.x - &x), 1e-10, "formula"),
                    Check::small(S, format!("{name} y - {}", y.to_sig(12)), &(&q.y - &y), 1e-10, "formula"),
                ],
                Err(e) => vec![Check::failed(S, name, e)],
            })
            .collect()
    }));
    for (model, v) in [(Model::SixVP, -1.3), (Model::TwentyV, -1.4)] {
        tasks.push(Box::new(move || {
            let p = ModelParams::new(model, Mp::pi_frac(1, 4, prec), Mp::new(0.15, prec), Mp::new(v, prec));
            let name = format!("free-fermion {model} (pi/4, 0.15, {v}) SE = continuation of NE");
            match p {
                Ok(p) => vec![worst(S, name, [free_fermion_continuation_deviation(&p, 12)], 1e-8, "identity")],
                Err(e) => vec![Check::failed(S, name, e)],
            }
        }));
    }
    run(tasks)
}

// ---- asymptotic convergence

pub fn asymptotic_convergence(prec: u32) -> Vec<Check> {
    const S: &str = "asymptotic_convergence";
    let mut out = Vec::new();
    let p = NamedPoint::Uniform20V.params(prec);
    match free_energy(&p) {
        Ok(f) => {
            let errs: Vec<(usize, Mp)> = [8usize, 16, 32]
                .iter()
                .map(|&n| {
                    let z = Mp::from_integer(&z20v_formula(n), prec);
                    let est = -(z.ln() / Mp::int((n * n) as i64, prec));
                    (n, (est - f.clone()).abs())
                })
                .collect();
            for (n, e) in &errs {
                out.push(Check::small(S, format!("uniform-20V |-(1/N^2) log Z_N - f| N={n}"), e, if *n == 32 { 0.05 } else { 1.0 }, "limit"));
            }
            let dec = errs.windows(2).all(|w| w[1].1 < w[0].1);
            let seq: Vec<String> = errs.iter().map(|(_, e)| format!("{:.4e}", e.to_f64())).collect();
            out.push(Check::boolean(S, "uniform-20V free-energy error decreasing over N = 8, 16, 32", dec, seq.join(" > "), "limit"));
        }
        Err(e) => out.push(Check::failed(S, "uniform-20V free energy", e)),
    }
    let asm = NamedPoint::Asm.params(prec);
    let n = 32usize;
    let rows: Vec<Check> = [-0.3f64, -0.6, -1.0]
        .par_iter()
        .map(|&x| {
            let xi = Mp::new(x, prec);
            let name = format!("ASM |-(1/N) log H_N - psi| N={n} xi={x}");
            match (one_point(&asm, n, &xi), one_point_exponent(&asm, &xi, ExponentKind::Psi)) {
                (Ok(h), Ok(psi)) => {
                    let est = -(h.ln() / Mp::int(n as i64, prec));
                    Check::small(S, name, &(est - psi), 0.05, "limit")
                }
                (Err(e), _) | (_, Err(e)) => Check::failed(S, name, e),
            }
        })
        .collect();
    out.extend(rows);
    out
}
