//! Single-path partition functions `Y_{k,ℓ}` in the empty quadrant: the path enters
//! at `(0,k)` after a preliminary step and leaves `(ℓ,0)` with a final vertical step.
//! Closed-form series extraction plus an independent step-state DP.

use rug::Integer;

use crate::error::{ArcticError, Result};
use crate::partition::{omega20, Model, ModelParams};
use crate::trig_core::{Mp, Real};

/// Relative step weights of a single path.
#[derive(Clone, Debug)]
pub enum PathWeights {
    /// `b0, c0` and `γ1 = b0`, `γ2 = (c0²-b0²)/b0`.
    SixV { b0: Mp, c0: Mp, gamma: [Mp; 2] },
    /// Even rows `(b0, c0)`, odd rows `(b1, c1)`; `γ1 = b0`, `γ2 = b1`,
    /// `γ3 = (c0²-b0²)/b0`, `γ4 = (c1²-b1²)/b1`.
    SixVP { b0: Mp, c0: Mp, b1: Mp, c1: Mp, gamma: [Mp; 4] },
    /// `ω_i/ω_0`, denominator coefficients `α_1..α_6` and entry weights `(β1, β2)`.
    TwentyV { rel: [Mp; 7], alpha: [Mp; 6], beta: [Mp; 2] },
}

impl PathWeights {
    pub fn new(params: &ModelParams) -> Result<PathWeights> {
        let one = Mp::one(params.prec());
        PathWeights::with_beta(params, one.clone(), one)
    }

    pub fn with_beta(params: &ModelParams, beta1: Mp, beta2: Mp) -> Result<PathWeights> {
        params.validate()?;
        let (u, v, eta) = (&params.u, &params.v, &params.eta);
        let w = u - v;
        let s = u + v;
        let s2e = (eta + eta).sin();
        match params.model {
            Model::SixV => {
                let b0 = (&w - eta).sin() / (&w + eta).sin();
                let c0 = &s2e / &(&w + eta).sin();
                let g2 = (c0.sq() - b0.sq()) / b0.clone();
                Ok(PathWeights::SixV { gamma: [b0.clone(), g2], b0, c0 })
            }
            Model::SixVP => {
                let b0 = (&w - eta).sin() / (&w + eta).sin();
                let c0 = &s2e / &(&w + eta).sin();
                let b1 = (&s + eta).sin() / (&s - eta).sin();
                let c1 = &s2e / &(eta - &s).sin();
                let g3 = (c0.sq() - b0.sq()) / b0.clone();
                let g4 = (c1.sq() - b1.sq()) / b1.clone();
                Ok(PathWeights::SixVP { gamma: [b0.clone(), b1.clone(), g3, g4], b0, c0, b1, c1 })
            }
            Model::TwentyV => {
                let om = omega20(u, v, eta);
                let o0 = om[0].clone();
                let rel = om.clone().map(|x| x / o0.clone());
                let [w0, w1, w2, w3, w4, w5, w6] = om;
                let sq0 = w0.sq();
                let alpha = [
                    &w1 / &w0,
                    &w6 / &w0,
                    (&w0 * &w3 + w4.sq() - &w1 * &w6) / sq0.clone(),
                    (w2.sq() - &w1 * &w3) / sq0.clone(),
                    (w5.sq() - &w6 * &w3) / sq0.clone(),
                    (Mp::int(2, w0.prec()) * &w2 * &w4 * &w5 + &w1 * &w6 * &w3
                        - &w3 * &w4.sq()
                        - &w1 * &w5.sq()
                        - &w6 * &w2.sq())
                        / (sq0 * w0),
                ];
                Ok(PathWeights::TwentyV { rel, alpha, beta: [beta1, beta2] })
            }
            Model::Dt => Err(ArcticError::Argument("single-path functions are defined for vertex models".into())),
        }
    }

    fn prec(&self) -> u32 {
        match self {
            PathWeights::SixV { b0, .. } | PathWeights::SixVP { b0, .. } => b0.prec(),
            PathWeights::TwentyV { rel, .. } => rel[0].prec(),
        }
    }
}

fn binom(n: i64, k: i64) -> Integer {
    if k < 0 || n < 0 || k > n {
        return Integer::new();
    }
    Integer::from(Integer::binomial_u(n as u32, k as u32))
}

fn int_mp(i: &Integer, prec: u32) -> Mp {
    Mp::from_integer(i, prec)
}

/// Coefficients `[z^0..z^l]` of `(1 + g z)^a`.
fn series_pow_poly(g: &Mp, a: i64, l: usize) -> Vec<Mp> {
    let p = g.prec();
    (0..=l as i64).map(|i| int_mp(&binom(a, i), p) * g.powi(i)).collect()
}

/// Coefficients `[z^0..z^l]` of `(1 - g z)^{-m}`.
fn series_inv_pow(g: &Mp, m: i64, l: usize) -> Vec<Mp> {
    let p = g.prec();
    if m == 0 {
        let mut r = vec![Mp::zero(p); l + 1];
        r[0] = Mp::one(p);
        return r;
    }
    (0..=l as i64).map(|i| int_mp(&binom(m - 1 + i, i), p) * g.powi(i)).collect()
}

fn mul_trunc(a: &[Mp], b: &[Mp]) -> Vec<Mp> {
    let l = a.len().min(b.len());
    let p = a[0].prec();
    (0..l)
        .map(|n| {
            let mut s = Mp::zero(p);
            for i in 0..=n {
                s = s + &a[i] * &b[n - i];
            }
            s
        })
        .collect()
}

fn check(k: i64, l: i64) -> Result<(usize, usize)> {
    if k < 0 || l < 0 {
        return Err(ArcticError::Argument(format!("path indices must be non-negative, got (k,l)=({k},{l})")));
    }
    Ok((k as usize, l as usize))
}

/// `Y_{k,ℓ}` for `ℓ = 0..=lmax` from the closed forms.
pub fn closed_row(pw: &PathWeights, k: usize, lmax: usize) -> Vec<Mp> {
    let prec = pw.prec();
    match pw {
        PathWeights::SixV { c0, gamma, .. } => {
            let (g1, g2) = (&gamma[0], &gamma[1]);
            (0..=lmax as i64)
                .map(|l| {
                    let mut s = Mp::zero(prec);
                    for p2 in 0..=l.min(k as i64) {
                        let p1 = l - p2;
                        let c = binom(p1 + k as i64, k as i64) * binom(k as i64, p2);
                        s = s + int_mp(&c, prec) * g1.powi(k as i64 + p1) * g2.powi(p2);
                    }
                    c0 * &s
                })
                .collect()
        }
        PathWeights::SixVP { c0, c1, gamma, .. } => {
            let [g1, g2, g3, g4] = gamma;
            let eps = (k % 2) as i64;
            let k = k as i64;
            let (hp, hm) = ((k + eps) / 2, (k - eps) / 2);
            let ce = if eps == 0 { c0 } else { c1 };
            let pref = ce * &(g1.powi(hp) * g2.powi(hm));
            let s = mul_trunc(
                &mul_trunc(&series_pow_poly(g3, hp, lmax), &series_pow_poly(g4, hm, lmax)),
                &mul_trunc(&series_inv_pow(g1, 1 + hm, lmax), &series_inv_pow(g2, hp, lmax)),
            );
            s.into_iter().map(|x| &pref * &x).collect()
        }
        PathWeights::TwentyV { .. } => {
            let t = twenty_v_series(pw, k, lmax);
            t[k].clone()
        }
    }
}

/// 20V coefficients `Y_{k',ℓ}` for `k' ≤ kmax`, `ℓ ≤ lmax` by the denominator recurrence.
/// Indexing: result `[k'][ℓ]`.
pub fn twenty_v_series(pw: &PathWeights, kmax: usize, lmax: usize) -> Vec<Vec<Mp>> {
    let PathWeights::TwentyV { rel, alpha, beta } = pw else {
        panic!("twenty_v_series needs 20V path weights");
    };
    let prec = rel[0].prec();
    let zero = Mp::zero(prec);
    let [_, _, r2, r3, r4, r5, r6] = rel;
    // numerator coefficients N[a = z power][b = w power]
    let mut num = vec![vec![zero.clone(); kmax + 2]; lmax + 1];
    let put = |num: &mut Vec<Vec<Mp>>, a: usize, b: usize, x: Mp| {
        if a <= lmax && b <= kmax + 1 {
            num[a][b] = &num[a][b] + &x;
        }
    };
    put(&mut num, 0, 1, &beta[0] * r4 + &beta[1] * r2);
    put(&mut num, 1, 2, &beta[0] * &(r2 * r5 - r3 * r4));
    put(&mut num, 1, 1, &beta[1] * &(r4 * r5 - r2 * r6));
    let mut c = vec![vec![zero.clone(); kmax + 2]; lmax + 1];
    let terms: [(usize, usize, &Mp); 6] = [
        (0, 1, &alpha[0]),
        (1, 0, &alpha[1]),
        (1, 1, &alpha[2]),
        (1, 2, &alpha[3]),
        (2, 1, &alpha[4]),
        (2, 2, &alpha[5]),
    ];
    for a in 0..=lmax {
        for b in 0..=kmax + 1 {
            let mut s = num[a][b].clone();
            for (da, db, al) in terms {
                if a >= da && b >= db {
                    s = s + al * &c[a - da][b - db];
                }
            }
            c[a][b] = s;
        }
    }
    (0..=kmax).map(|k| (0..=lmax).map(|l| c[l][k + 1].clone()).collect()).collect()
}

/// `Y_{k,ℓ}` for `ℓ = 0..=lmax` by explicit step-state dynamic programming.
pub fn dp_row(pw: &PathWeights, k: usize, lmax: usize) -> Vec<Mp> {
    let prec = pw.prec();
    let zero = Mp::zero(prec);
    // directions: 0 = horizontal, 1 = vertical, 2 = diagonal (20V only)
    let nd = if matches!(pw, PathWeights::TwentyV { .. }) { 3 } else { 2 };
    // weight for passing vertex at height y with incoming d and outgoing e
    let vw = |y: usize, d: usize, e: usize| -> Mp {
        match pw {
            PathWeights::SixV { b0, c0, .. } => if d == e { b0.clone() } else { c0.clone() },
            PathWeights::SixVP { b0, c0, b1, c1, .. } => {
                let (b, c) = if y % 2 == 0 { (b0, c0) } else { (b1, c1) };
                if d == e { b.clone() } else { c.clone() }
            }
            PathWeights::TwentyV { rel, .. } => {
                // in: H=W, V=N, D=NW ; out: H=E, V=S, D=SE
                let cls = match (d, e) {
                    (0, 0) => 6,
                    (0, 2) | (2, 0) => 5,
                    (0, 1) | (1, 0) => 4,
                    (2, 2) => 3,
                    (2, 1) | (1, 2) => 2,
                    (1, 1) => 1,
                    _ => unreachable!(),
                };
                rel[cls].clone()
            }
        }
    };
    let step = |e: usize| -> (usize, usize) {
        match e {
            0 => (1, 0),
            1 => (0, 1),
            _ => (1, 1),
        }
    };
    // f[x][y][d]: weight of arriving at (x,y) with incoming direction d
    let mut f = vec![vec![vec![zero.clone(); nd]; k + 1]; lmax + 1];
    match pw {
        PathWeights::TwentyV { beta, .. } => {
            f[0][k][0] = beta[0].clone();
            f[0][k][2] = beta[1].clone();
        }
        _ => f[0][k][0] = Mp::one(prec),
    }
    let mut out = vec![zero.clone(); lmax + 1];
    for x in 0..=lmax {
        for y in (0..=k).rev() {
            for d in 0..nd {
                if f[x][y][d].is_zero() {
                    continue;
                }
                let here = f[x][y][d].clone();
                for e in 0..nd {
                    let w = &here * &vw(y, d, e);
                    let (dx, dy) = step(e);
                    if e == 1 && y == 0 {
                        out[x] = &out[x] + &w;
                        continue;
                    }
                    if y < dy || x + dx > lmax {
                        continue;
                    }
                    let (nx, ny) = (x + dx, y - dy);
                    f[nx][ny][e] = &f[nx][ny][e] + &w;
                }
            }
        }
    }
    out
}

/// `Y_{k,ℓ}` from the closed form (entry weights `(1,1)` for 20V).
pub fn path_partition_closed(params: &ModelParams, k: i64, l: i64) -> Result<Mp> {
    let (k, l) = check(k, l)?;
    let pw = PathWeights::new(params)?;
    Ok(closed_row(&pw, k, l).swap_remove(l))
}

/// `Y_{k,ℓ}` from the step-state DP (entry weights `(1,1)` for 20V).
pub fn path_partition_dp(params: &ModelParams, k: i64, l: i64) -> Result<Mp> {
    let (k, l) = check(k, l)?;
    let pw = PathWeights::new(params)?;
    Ok(dp_row(&pw, k, l).swap_remove(l))
}

/// 20V transfer matrix entries `T[out][in]` as `(ω_cls/ω_0, z power, w power)`,
/// states ordered (horizontal, diagonal, vertical).
pub fn transfer_20v(pw: &PathWeights) -> Result<[[(Mp, usize, usize); 3]; 3]> {
    let PathWeights::TwentyV { rel, .. } = pw else {
        return Err(ArcticError::Argument("transfer_20v needs 20V weights".into()));
    };
    let cls = [[6, 5, 4], [5, 3, 2], [4, 2, 1]];
    let pw_of = [(1, 0), (1, 1), (0, 1)];
    Ok(std::array::from_fn(|i| std::array::from_fn(|j| (rel[cls[i][j]].clone(), pw_of[i].0, pw_of[i].1))))
}

/// Applies `I - T` to a truncated vector series `r[state][z][w]` and returns the
/// result truncated to the same orders.
pub fn apply_one_minus_t(t: &[[(Mp, usize, usize); 3]; 3], r: &[Vec<Vec<Mp>>]) -> Vec<Vec<Vec<Mp>>> {
    let (za, wa) = (r[0].len(), r[0][0].len());
    let mut out: Vec<Vec<Vec<Mp>>> = r.to_vec();
    for i in 0..3 {
        for j in 0..3 {
            let (c, dz, dw) = &t[i][j];
            for a in *dz..za {
                for b in *dw..wa {
                    out[i][a][b] = &out[i][a][b] - &(c * &r[j][a - dz][b - dw]);
                }
            }
        }
    }
    out
}

/// Truncated resolvent `Σ_m T^m s` with `s = (β1, β2, 0)`, orders `< za` in `z` and `< wa` in `w`.
pub fn resolvent_series(pw: &PathWeights, za: usize, wa: usize) -> Result<Vec<Vec<Vec<Mp>>>> {
    let PathWeights::TwentyV { beta, .. } = pw else {
        return Err(ArcticError::Argument("resolvent_series needs 20V weights".into()));
    };
    let t = transfer_20v(pw)?;
    let prec = pw.prec();
    let zero = Mp::zero(prec);
    let blank = || vec![vec![vec![zero.clone(); wa]; za]; 3];
    let mut term = blank();
    term[0][0][0] = beta[0].clone();
    term[1][0][0] = beta[1].clone();
    let mut acc = term.clone();
    // every factor of T raises the total degree by at least 1
    for _ in 0..za + wa {
        let mut next = blank();
        for i in 0..3 {
            for j in 0..3 {
                let (c, dz, dw) = &t[i][j];
                for a in *dz..za {
                    for b in *dw..wa {
                        next[i][a][b] = &next[i][a][b] + &(c * &term[j][a - dz][b - dw]);
                    }
                }
            }
        }
        for i in 0..3 {
            for a in 0..za {
                for b in 0..wa {
                    acc[i][a][b] = &acc[i][a][b] + &next[i][a][b];
                }
            }
        }
        term = next;
    }
    Ok(acc)
}
