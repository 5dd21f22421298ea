//! Multiprecision scalars, forward-mode duals, and exact derivative towers
//! for the kernels `m(w) = 1/(sin(w+η) sin(w-η))` and `m_U(u,v) = m(u-v) - m(u+v)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{OnceLock, RwLock};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::{ArcticError, Result};

/// Smallest precision accepted anywhere.
pub const MIN_PRECISION: u32 = 128;

/// Environment variable overriding the default working precision.
pub const PRECISION_ENV: &str = "ARCTIC_PRECISION_BITS";

/// Default working precision for lattice size `n`: `max(256, 64 + 12 n)` bits,
/// unless `ARCTIC_PRECISION_BITS` is set.
pub fn default_precision(n: usize) -> u32 {
    if let Ok(s) = std::env::var(PRECISION_ENV) {
        if let Ok(p) = s.trim().parse::<u32>() {
            return p.max(MIN_PRECISION);
        }
    }
    (64 + 12 * n as u32).max(256)
}

/// Arbitrary-precision real. Binary operations run at the larger of the two precisions.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Mp(pub Float);

impl fmt::Debug for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sig(25))
    }
}

impl fmt::Display for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sig(30))
    }
}

impl Mp {
    pub fn new(x: f64, prec: u32) -> Mp {
        Mp(Float::with_val(prec.max(MIN_PRECISION), x))
    }
    pub fn zero(prec: u32) -> Mp {
        Mp::new(0.0, prec)
    }
    pub fn one(prec: u32) -> Mp {
        Mp::new(1.0, prec)
    }
    pub fn int(i: i64, prec: u32) -> Mp {
        Mp(Float::with_val(prec.max(MIN_PRECISION), i))
    }
    pub fn from_integer(i: &Integer, prec: u32) -> Mp {
        Mp(Float::with_val(prec.max(MIN_PRECISION), i))
    }
    pub fn ratio(num: i64, den: i64, prec: u32) -> Mp {
        let p = prec.max(MIN_PRECISION);
        Mp(Float::with_val(p, num) / Float::with_val(p, den))
    }
    pub fn pi(prec: u32) -> Mp {
        Mp(Float::with_val(prec.max(MIN_PRECISION), Constant::Pi))
    }
    /// `num/den · π`, e.g. `pi_frac(-1, 2)` is `-π/2`.
    pub fn pi_frac(num: i64, den: i64, prec: u32) -> Mp {
        Mp::pi(prec) * Mp::int(num, prec) / Mp::int(den, prec)
    }
    pub fn parse(s: &str, prec: u32) -> Result<Mp> {
        let p = prec.max(MIN_PRECISION);
        Float::parse(s.trim())
            .map(|v| Mp(Float::with_val(p, v)))
            .map_err(|e| ArcticError::Argument(format!("cannot parse number '{s}': {e}")))
    }
    pub fn prec(&self) -> u32 {
        self.0.prec()
    }
    pub fn with_prec(&self, prec: u32) -> Mp {
        Mp(Float::with_val(prec.max(MIN_PRECISION), &self.0))
    }
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
    pub fn sign(&self) -> i32 {
        match self.0.cmp0() {
            Some(Ordering::Less) => -1,
            Some(Ordering::Greater) => 1,
            _ => 0,
        }
    }
    pub fn abs(&self) -> Mp {
        Mp(self.0.clone().abs())
    }
    pub fn max(a: &Mp, b: &Mp) -> Mp {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }
    /// `2^e` at the given precision.
    pub fn pow2(e: i64, prec: u32) -> Mp {
        let p = prec.max(MIN_PRECISION);
        Mp(Float::with_val(p, 1) << (e as i32))
    }
    /// Decimal string with `digits` significant digits in scientific notation.
    pub fn to_sig(&self, digits: usize) -> String {
        if self.0.is_zero() {
            return "0".to_string();
        }
        self.0.to_string_radix(10, Some(digits.max(1)))
    }
    /// Relative difference `|a-b| / max(|a|,|b|,tiny)`.
    pub fn rel_diff(a: &Mp, b: &Mp) -> Mp {
        let p = a.prec().max(b.prec());
        let d = (a.clone() - b.clone()).abs();
        let m = Mp::max(&a.abs(), &b.abs());
        if m.is_zero() {
            return Mp::zero(p);
        }
        d / m
    }
    pub fn lt_f64(&self, x: f64) -> bool {
        self.0 < x
    }
}

fn pmax(a: &Mp, b: &Mp) -> u32 {
    a.prec().max(b.prec())
}

macro_rules! mp_binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for Mp {
            type Output = Mp;
            fn $m(self, rhs: Mp) -> Mp {
                let p = pmax(&self, &rhs);
                Mp(Float::with_val(p, &self.0 $op &rhs.0))
            }
        }
        impl<'a> $tr<&'a Mp> for Mp {
            type Output = Mp;
            fn $m(self, rhs: &'a Mp) -> Mp {
                let p = pmax(&self, rhs);
                Mp(Float::with_val(p, &self.0 $op &rhs.0))
            }
        }
        impl<'a, 'b> $tr<&'b Mp> for &'a Mp {
            type Output = Mp;
            fn $m(self, rhs: &'b Mp) -> Mp {
                let p = pmax(self, rhs);
                Mp(Float::with_val(p, &self.0 $op &rhs.0))
            }
        }
    };
}
mp_binop!(Add, add, +);
mp_binop!(Sub, sub, -);
mp_binop!(Mul, mul, *);
mp_binop!(Div, div, /);

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(-self.0)
    }
}

/// Scalar interface shared by [`Mp`] and [`Dual`], so every formula can be
/// evaluated plainly or differentiated.
pub trait Real:
    Clone
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A constant with the same shape as `self` (zero tangents).
    fn lift(&self, c: Mp) -> Self;
    /// Underlying primal value.
    fn val(&self) -> Mp;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn sqrt(&self) -> Self;

    fn prec(&self) -> u32 {
        self.val().prec()
    }
    fn c(&self, x: f64) -> Self {
        self.lift(Mp::new(x, self.prec()))
    }
    fn ci(&self, i: i64) -> Self {
        self.lift(Mp::int(i, self.prec()))
    }
    fn zero_like(&self) -> Self {
        self.ci(0)
    }
    fn one_like(&self) -> Self {
        self.ci(1)
    }
    fn pi(&self) -> Self {
        self.lift(Mp::pi(self.prec()))
    }
    fn cot(&self) -> Self {
        self.cos() / self.sin()
    }
    fn tan(&self) -> Self {
        self.sin() / self.cos()
    }
    fn recip(&self) -> Self {
        self.one_like() / self.clone()
    }
    fn sq(&self) -> Self {
        self.clone() * self.clone()
    }
    fn sign(&self) -> i32 {
        self.val().sign()
    }
    fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn powi(&self, n: i64) -> Self {
        if n < 0 {
            return self.recip().powi(-n);
        }
        let mut base = self.clone();
        let mut acc = self.one_like();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.sq();
            }
        }
        acc
    }
    fn scale(&self, k: i64) -> Self {
        self.clone() * self.ci(k)
    }
}

impl Real for Mp {
    fn lift(&self, c: Mp) -> Self {
        c.with_prec(self.prec())
    }
    fn val(&self) -> Mp {
        self.clone()
    }
    fn sin(&self) -> Self {
        Mp(self.0.clone().sin())
    }
    fn cos(&self) -> Self {
        Mp(self.0.clone().cos())
    }
    fn cot(&self) -> Self {
        Mp(self.0.clone().cot())
    }
    fn tan(&self) -> Self {
        Mp(self.0.clone().tan())
    }
    fn ln(&self) -> Self {
        Mp(self.0.clone().ln())
    }
    fn exp(&self) -> Self {
        Mp(self.0.clone().exp())
    }
    fn sqrt(&self) -> Self {
        Mp(self.0.clone().sqrt())
    }
    fn powi(&self, n: i64) -> Self {
        Mp(self.0.clone().pow(n as i32))
    }
    fn prec(&self) -> u32 {
        self.0.prec()
    }
}

/// Forward-mode dual number with one tangent per differentiation direction.
/// Missing tangent entries are zero. Nesting (`Dual<Dual<Mp>>`) gives second derivatives.
#[derive(Clone, Debug)]
pub struct Dual<T> {
    pub v: T,
    pub d: Vec<T>,
}

impl<T: Real> Dual<T> {
    pub fn constant(v: T) -> Self {
        Dual { v, d: Vec::new() }
    }
    /// Independent variable number `i` (of `n`).
    pub fn var(v: T, i: usize, n: usize) -> Self {
        let mut d: Vec<T> = (0..n).map(|_| v.zero_like()).collect();
        d[i] = v.one_like();
        Dual { v, d }
    }
    pub fn tangent(&self, i: usize) -> T {
        self.d.get(i).cloned().unwrap_or_else(|| self.v.zero_like())
    }
    fn map_d(&self, f: impl Fn(&T) -> T) -> Vec<T> {
        self.d.iter().map(f).collect()
    }
}

fn zip_d<T: Real>(a: &[T], b: &[T], f: impl Fn(Option<&T>, Option<&T>) -> T) -> Vec<T> {
    let n = a.len().max(b.len());
    (0..n).map(|i| f(a.get(i), b.get(i))).collect()
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        let d = zip_d(&self.d, &r.d, |x, y| match (x, y) {
            (Some(x), Some(y)) => x.clone() + y.clone(),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            _ => unreachable!(),
        });
        Dual { v: self.v + r.v, d }
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        let d = zip_d(&self.d, &r.d, |x, y| match (x, y) {
            (Some(x), Some(y)) => x.clone() - y.clone(),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => -y.clone(),
            _ => unreachable!(),
        });
        Dual { v: self.v - r.v, d }
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        let (a, b) = (&self.v, &r.v);
        let d = zip_d(&self.d, &r.d, |x, y| match (x, y) {
            (Some(x), Some(y)) => x.clone() * b.clone() + a.clone() * y.clone(),
            (Some(x), None) => x.clone() * b.clone(),
            (None, Some(y)) => a.clone() * y.clone(),
            _ => unreachable!(),
        });
        Dual { v: self.v * r.v, d }
    }
}

impl<T: Real> Div for Dual<T> {
    type Output = Self;
    fn div(self, r: Self) -> Self {
        let q = self.v.clone() / r.v.clone();
        let (qq, b) = (&q, &r.v);
        let d = zip_d(&self.d, &r.d, |x, y| match (x, y) {
            (Some(x), Some(y)) => (x.clone() - qq.clone() * y.clone()) / b.clone(),
            (Some(x), None) => x.clone() / b.clone(),
            (None, Some(y)) => -(qq.clone() * y.clone()) / b.clone(),
            _ => unreachable!(),
        });
        Dual { v: q, d }
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { v: -self.v, d: self.d.into_iter().map(|x| -x).collect() }
    }
}

impl<T: Real> Real for Dual<T> {
    fn lift(&self, c: Mp) -> Self {
        Dual::constant(self.v.lift(c))
    }
    fn val(&self) -> Mp {
        self.v.val()
    }
    fn sin(&self) -> Self {
        let c = self.v.cos();
        Dual { v: self.v.sin(), d: self.map_d(|x| x.clone() * c.clone()) }
    }
    fn cos(&self) -> Self {
        let s = self.v.sin();
        Dual { v: self.v.cos(), d: self.map_d(|x| -(x.clone() * s.clone())) }
    }
    fn cot(&self) -> Self {
        let ct = self.v.cot();
        let k = -(self.v.one_like() + ct.sq());
        Dual { v: ct, d: self.map_d(|x| x.clone() * k.clone()) }
    }
    fn ln(&self) -> Self {
        let v = self.v.clone();
        Dual { v: self.v.ln(), d: self.map_d(|x| x.clone() / v.clone()) }
    }
    fn exp(&self) -> Self {
        let e = self.v.exp();
        Dual { d: self.map_d(|x| x.clone() * e.clone()), v: e }
    }
    fn sqrt(&self) -> Self {
        let s = self.v.sqrt();
        let two_s = s.clone() + s.clone();
        Dual { d: self.map_d(|x| x.clone() / two_s.clone()), v: s }
    }
}

/// Second-order dual used for mixed and repeated derivatives.
pub type Dual2 = Dual<Dual<Mp>>;

/// Seeds `(x, y)` so that `f(x, y).d[0].d[0]` is `∂_x ∂_y f`, `f.d[0].v` is `∂_y f`
/// and `f.v.d[0]` is `∂_x f`.
pub fn seed_mixed(x: &Mp, y: &Mp) -> (Dual2, Dual2) {
    let xi = Dual::var(x.clone(), 0, 1);
    let xd = Dual { v: xi, d: vec![] };
    let yi = Dual::constant(y.clone());
    let yd = Dual { v: yi, d: vec![Dual::constant(Mp::one(y.prec()))] };
    (xd, yd)
}

/// Seeds `x` so that `f(x).d[0].d[0]` is `f''(x)` and `f.v.d[0]` is `f'(x)`.
pub fn seed_second(x: &Mp) -> Dual2 {
    let xi = Dual::var(x.clone(), 0, 1);
    Dual { v: xi, d: vec![Dual::constant(Mp::one(x.prec()))] }
}

/// First derivative of a scalar function via a dual.
pub fn derivative(x: &Mp, f: impl Fn(&Dual<Mp>) -> Dual<Mp>) -> (Mp, Mp) {
    let r = f(&Dual::var(x.clone(), 0, 1));
    let d = r.tangent(0);
    (r.v, d)
}

/// Integer-coefficient polynomials `P_0..P_k` in `c = cot(x)` with
/// `P_j(cot x) = d^j/dx^j cot(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivTower {
    pub polys: Vec<Vec<Integer>>,
}

impl DerivTower {
    pub fn k_max(&self) -> usize {
        self.polys.len() - 1
    }
    /// Evaluates `P_k(c)` by Horner's rule.
    pub fn eval<T: Real>(&self, k: usize, c: &T) -> T {
        let p = &self.polys[k];
        let prec = c.prec();
        let mut acc = c.zero_like();
        for coef in p.iter().rev() {
            acc = acc * c.clone() + c.lift(Mp::from_integer(coef, prec));
        }
        acc
    }
}

fn next_poly(p: &[Integer]) -> Vec<Integer> {
    // -(1+c²)·P'
    let dp: Vec<Integer> = (1..p.len()).map(|i| Integer::from(&p[i] * i as u32)).collect();
    let mut r = vec![Integer::new(); dp.len() + 2];
    for (i, x) in dp.iter().enumerate() {
        r[i] -= x;
        r[i + 2] -= x;
    }
    while r.len() > 1 && r.last().map_or(false, |x| *x == 0) {
        r.pop();
    }
    r
}

static TOWER: OnceLock<RwLock<DerivTower>> = OnceLock::new();

/// Builds the tower up to `k_max`. Cached process-wide; grows on demand.
pub fn cot_derivative_polynomials(k_max: i64) -> Result<DerivTower> {
    if k_max < 0 {
        return Err(ArcticError::Argument(format!("k_max must be non-negative, got {k_max}")));
    }
    let k = k_max as usize;
    let cell = TOWER.get_or_init(|| {
        RwLock::new(DerivTower { polys: vec![vec![Integer::from(0), Integer::from(1)]] })
    });
    {
        let t = cell.read().expect("tower lock");
        if t.polys.len() > k {
            return Ok(DerivTower { polys: t.polys[..=k].to_vec() });
        }
    }
    let mut t = cell.write().expect("tower lock");
    while t.polys.len() <= k {
        let np = next_poly(t.polys.last().unwrap());
        t.polys.push(np);
    }
    Ok(DerivTower { polys: t.polys[..=k].to_vec() })
}

fn tiny_angle(x: &Mp) -> bool {
    // |x| < 2^-60 π
    let lim = Mp::pi(64) * Mp::pow2(-60, 64);
    x.abs() < lim
}

/// Reduces `x` modulo π to `(-π/2, π/2]` and reports whether it is (numerically) zero.
fn is_pole(x: &Mp) -> bool {
    let p = x.prec();
    let pi = Mp::pi(p);
    let k = Mp((x.clone() / pi.clone()).0.round());
    let r = x.clone() - k * pi;
    tiny_angle(&r)
}

/// `∂_w^k m(w)` for `k = 0..=k_max`, where `m(w) = 1/(sin(w+η) sin(w-η))`.
/// At `η = 0` the limit `m = 1/sin² w` is used.
pub fn m_derivatives<T: Real>(w: &T, eta: &T, k_max: usize) -> Result<Vec<T>> {
    let tower = cot_derivative_polynomials(k_max as i64 + 1)?;
    if tiny_angle(&eta.val()) {
        if is_pole(&w.val()) {
            return Err(ArcticError::Singularity(format!("m has a pole at w={}", w.val())));
        }
        let c = w.cot();
        return Ok((0..=k_max).map(|k| -tower.eval(k + 1, &c)).collect());
    }
    let a = w.clone() - eta.clone();
    let b = w.clone() + eta.clone();
    if is_pole(&a.val()) || is_pole(&b.val()) {
        return Err(ArcticError::Singularity(format!(
            "m has a pole at w={}, eta={}",
            w.val(),
            eta.val()
        )));
    }
    let ca = a.cot();
    let cb = b.cot();
    let s = (eta.clone() + eta.clone()).sin();
    Ok((0..=k_max).map(|k| (tower.eval(k, &ca) - tower.eval(k, &cb)) / s.clone()).collect())
}

/// `m(w)` itself.
pub fn m_value<T: Real>(w: &T, eta: &T) -> Result<T> {
    Ok(m_derivatives(w, eta, 0)?.remove(0))
}

/// `n×n` matrix with entry `(i,j) = (-1)^j ∂_u^i ∂_v^j m_U(u,v)
///  = m^{(i+j)}(u-v) - (-1)^j m^{(i+j)}(u+v)`.
pub fn mu_derivative_matrix<T: Real>(u: &T, v: &T, eta: &T, n: usize) -> Result<Vec<Vec<T>>> {
    let k = if n == 0 { 0 } else { 2 * n - 2 };
    let dm = m_derivatives(&(u.clone() - v.clone()), eta, k)?;
    let dp = m_derivatives(&(u.clone() + v.clone()), eta, k)?;
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if j % 2 == 0 {
                        dm[i + j].clone() - dp[i + j].clone()
                    } else {
                        dm[i + j].clone() + dp[i + j].clone()
                    }
                })
                .collect()
        })
        .collect())
}

/// Determinant by LU factorisation with partial pivoting (pivot chosen on primal magnitude).
pub fn det<T: Real>(mut a: Vec<Vec<T>>) -> T {
    let n = a.len();
    if n == 0 {
        panic!("det of an empty matrix needs a reference scalar; use det_or_one");
    }
    let mut sign = 1i64;
    let mut acc = a[0][0].one_like();
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col][col].val().abs();
        for r in col + 1..n {
            let m = a[r][col].val().abs();
            if m > best {
                best = m;
                piv = r;
            }
        }
        if best.is_zero() {
            return a[0][0].zero_like();
        }
        if piv != col {
            a.swap(piv, col);
            sign = -sign;
        }
        let p = a[col][col].clone();
        acc = acc * p.clone();
        for r in col + 1..n {
            let f = a[r][col].clone() / p.clone();
            for c in col + 1..n {
                let t = a[r][c].clone() - f.clone() * a[col][c].clone();
                a[r][c] = t;
            }
        }
    }
    if sign < 0 {
        -acc
    } else {
        acc
    }
}

/// Determinant with the empty-matrix convention `det([]) = 1` (at the precision of `like`).
pub fn det_or_one<T: Real>(a: Vec<Vec<T>>, like: &T) -> T {
    if a.is_empty() {
        like.one_like()
    } else {
        det(a)
    }
}

/// `n!` as a big integer.
pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// `∏_{i<n} (i!)²`.
pub fn factorial_square_product(n: usize) -> Integer {
    let mut r = Integer::from(1);
    for i in 0..n {
        let f = factorial(i as u32);
        r *= &f;
        r *= &f;
    }
    r
}

/// Removable-singularity guard: true when `|x| < 2^-60 π`.
pub fn near_zero_angle(x: &Mp) -> bool {
    tiny_angle(x)
}
