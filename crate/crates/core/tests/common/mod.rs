#![allow(dead_code)]

use arctic_core::Mp;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const P: u32 = 256;

pub fn mp(x: f64) -> Mp {
    Mp::new(x, P)
}

pub fn mpp(x: f64, prec: u32) -> Mp {
    Mp::new(x, prec)
}

pub fn pf(a: i64, b: i64) -> Mp {
    Mp::pi_frac(a, b, P)
}

pub fn rel(a: &Mp, b: &Mp) -> f64 {
    Mp::rel_diff(a, b).to_f64()
}

pub fn assert_rel(a: &Mp, b: &Mp, tol: f64) {
    let r = rel(a, b);
    assert!(r < tol, "relative difference {r:e} >= {tol:e}: {a} vs {b}");
}

pub fn assert_small(a: &Mp, tol: f64) {
    let r = a.abs().to_f64();
    assert!(r < tol, "|{a}| = {r:e} >= {tol:e}");
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn uniform(r: &mut StdRng, lo: f64, hi: f64) -> f64 {
    r.gen_range(lo..hi)
}
