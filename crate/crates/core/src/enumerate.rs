//! Brute-force oracles: transfer-matrix enumeration of 6V, 6V′ and 20V
//! configurations, and non-intersecting Schröder paths for Aztec-triangle tilings.

use std::collections::HashMap;
use std::hash::Hash;

use rug::Integer;

use crate::error::{ArcticError, Result};
use crate::partition::{weights, Model, ModelParams, WeightTable};
use crate::trig_core::Mp;

/// Largest `n` accepted by the 6V sweep.
pub const MAX_N_6V: usize = 8;
/// Largest `n` accepted by the 6V′ sweep.
pub const MAX_N_6VP: usize = 6;
/// Largest `n` accepted by the 20V sweep.
pub const MAX_N_20V: usize = 4;
/// Largest `n` accepted by the domino-tiling path count.
pub const MAX_N_DT: usize = 12;

/// Minimal commutative semiring used by the sweeps.
pub trait Semiring: Clone + Send + Sync {
    fn zero_like(&self) -> Self;
    fn add_to(&mut self, o: &Self);
    fn times(&self, o: &Self) -> Self;
}

impl Semiring for Mp {
    fn zero_like(&self) -> Self {
        Mp::zero(self.prec())
    }
    fn add_to(&mut self, o: &Self) {
        *self = &*self + o;
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
}

impl Semiring for Integer {
    fn zero_like(&self) -> Self {
        Integer::new()
    }
    fn add_to(&mut self, o: &Self) {
        *self += o;
    }
    fn times(&self, o: &Self) -> Self {
        Integer::from(self * o)
    }
}

/// Totals plus counts refined by where the topmost path first enters the last column.
///
/// Vertex models: `by_exit[k-1]` for the entry row `k` counted from the bottom
/// (`k = 1..n` for 6V, `k = 1..2n-1` for 6V′ and 20V). For 20V, `split` holds the
/// horizontal-entry and diagonal-entry parts. Domino tilings: `by_exit[k]`, `k = 0..n-1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinedCounts<T> {
    pub total: T,
    pub by_exit: Vec<T>,
    pub split: Option<(Vec<T>, Vec<T>)>,
}

fn add_into<K: Hash + Eq, T: Semiring>(m: &mut HashMap<K, T>, k: K, v: T) {
    match m.get_mut(&k) {
        Some(x) => x.add_to(&v),
        None => {
            m.insert(k, v);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VType {
    A,
    B,
    C,
}

/// Osculating-path sweep on an `nrows × ncols` grid, rows numbered from the bottom.
/// Paths enter on the W edges of rows with `enters(r)`, exit through every S edge of
/// the bottom row. Rows are processed top-down, vertices left to right.
fn six_vertex_sweep<T: Semiring>(
    nrows: usize,
    ncols: usize,
    enters: impl Fn(usize) -> bool,
    w: impl Fn(usize, VType) -> T,
    one: &T,
) -> RefinedCounts<T> {
    // state: (vertical bits above the current row, horizontal bit, topmost entry row)
    let mut st: HashMap<(u32, u8, u8), T> = HashMap::new();
    st.insert((0, 0, 0), one.clone());
    for r in (1..=nrows).rev() {
        let mut row: HashMap<(u32, u8, u8), T> = HashMap::new();
        for ((mask, _, tag), val) in st {
            add_into(&mut row, (mask, enters(r) as u8, tag), val);
        }
        for c in 0..ncols {
            let mut next: HashMap<(u32, u8, u8), T> = HashMap::new();
            for ((mask, h, tag), val) in &row {
                let nb = ((mask >> c) & 1) as u8;
                for e in 0..=1u8 {
                    if c + 1 == ncols && e == 1 {
                        continue;
                    }
                    let s = h + nb;
                    if s < e || s - e > 1 {
                        continue;
                    }
                    let s = s - e;
                    let t = match (h + nb, (*h == 1 && e == 1) || (nb == 1 && s == 1)) {
                        (0, _) | (2, _) => VType::A,
                        (_, true) => VType::B,
                        _ => VType::C,
                    };
                    let mut tg = *tag;
                    if c + 1 == ncols && nb == 0 && s == 1 && tg == 0 {
                        tg = r as u8;
                    }
                    let m2 = (mask & !(1 << c)) | ((s as u32) << c);
                    add_into(&mut next, (m2, e, tg), val.times(&w(r, t)));
                }
            }
            row = next;
        }
        st = row;
    }
    let full = (1u32 << ncols) - 1;
    let zero = one.zero_like();
    let mut by_exit = vec![zero.clone(); nrows];
    let mut total = zero;
    for ((mask, _, tag), val) in st {
        if mask == full && tag > 0 {
            by_exit[tag as usize - 1].add_to(&val);
            total.add_to(&val);
        }
    }
    RefinedCounts { total, by_exit, split: None }
}

// 20V: in-edges (W, N, NW) and out-edges (E, S, SE) as 3-bit tuples.
fn omega_class(inn: [u8; 3], out: [u8; 3]) -> usize {
    let k: u8 = inn.iter().sum();
    if k == 0 || k == 3 {
        return 0;
    }
    let (inn, out) = if k == 2 { (inn.map(|a| 1 - a), out.map(|a| 1 - a)) } else { (inn, out) };
    let i = inn.iter().position(|&a| a == 1).unwrap();
    let o = out.iter().position(|&a| a == 1).unwrap();
    match (i, o) {
        (0, 0) => 6,
        (0, 2) | (2, 0) => 5,
        (0, 1) | (1, 0) => 4,
        (2, 2) => 3,
        (2, 1) | (1, 2) => 2,
        (1, 1) => 1,
        _ => unreachable!(),
    }
}

/// 20V DWBC3 sweep on the quadrangle: column `x = 1..n` spans rows `n-x+1..2n-1`;
/// paths enter through the W edges of column 1 and exit through the S edge of
/// each column's bottom vertex. Entry tag: `(row, diagonal?)` in the last column.
fn twenty_vertex_sweep<T: Semiring>(n: usize, om: &[T; 7], one: &T) -> RefinedCounts<T> {
    type Key = (u64, u64, u8, u64, u64, u16);
    let top = 2 * n - 1;
    let bit = |y: usize| 1u64 << y;
    // (H into column, D into column) keyed by row y
    let mut cols: HashMap<(u64, u64, u16), T> = HashMap::new();
    let h0: u64 = (n..=top).map(bit).sum();
    cols.insert((h0, 0, 0), one.clone());
    for x in 1..=n {
        let bottom = n - x + 1;
        let mut work: HashMap<Key, T> = HashMap::new();
        for ((hm, dm, tag), v) in cols {
            add_into(&mut work, (hm, dm, 0, 0, 0, tag), v);
        }
        for y in (bottom..=top).rev() {
            let mut next: HashMap<Key, T> = HashMap::new();
            for ((hm, dm, vb, oe, ose, tag), val) in &work {
                let inn = [((hm >> y) & 1) as u8, *vb, ((dm >> y) & 1) as u8];
                let k: u8 = inn.iter().sum();
                for o in 0..8u8 {
                    let out = [o & 1, (o >> 1) & 1, (o >> 2) & 1];
                    if out.iter().sum::<u8>() != k {
                        continue;
                    }
                    if x == n && (out[0] == 1 || out[2] == 1) {
                        continue;
                    }
                    if y == bottom && out[1] != 1 {
                        continue;
                    }
                    let mut tg = *tag;
                    if x == n && inn[1] == 0 && out[1] == 1 {
                        tg = ((y as u16) << 1) | (inn[0] == 0) as u16;
                    }
                    let key = (
                        hm & !bit(y),
                        dm & !bit(y),
                        out[1],
                        oe | ((out[0] as u64) << y),
                        ose | ((out[2] as u64) << (y - 1)),
                        tg,
                    );
                    add_into(&mut next, key, val.times(&om[omega_class(inn, out)]));
                }
            }
            work = next;
        }
        let mut nc: HashMap<(u64, u64, u16), T> = HashMap::new();
        for ((_, _, _, oe, ose, tag), v) in work {
            add_into(&mut nc, (oe, ose, tag), v);
        }
        cols = nc;
    }
    let zero = one.zero_like();
    let len = 2 * n - 1;
    let mut h = vec![zero.clone(); len];
    let mut d = vec![zero.clone(); len];
    let mut by_exit = vec![zero.clone(); len];
    let mut total = zero;
    for ((_, _, tag), v) in cols {
        if tag == 0 {
            continue;
        }
        let y = (tag >> 1) as usize;
        if tag & 1 == 1 {
            d[y - 1].add_to(&v);
        } else {
            h[y - 1].add_to(&v);
        }
        by_exit[y - 1].add_to(&v);
        total.add_to(&v);
    }
    RefinedCounts { total, by_exit, split: Some((h, d)) }
}

fn capacity(model: Model, n: usize) -> Result<()> {
    let cap = match model {
        Model::SixV => MAX_N_6V,
        Model::SixVP => MAX_N_6VP,
        Model::TwentyV => MAX_N_20V,
        Model::Dt => MAX_N_DT,
    };
    if n == 0 {
        return Err(ArcticError::Argument("n must be at least 1".into()));
    }
    if n > cap {
        return Err(ArcticError::Capacity(format!("{model} enumeration is capped at n={cap}, got n={n}")));
    }
    Ok(())
}

/// Weighted enumeration with an explicit weight table.
pub fn enumerate_with_weights(model: Model, table: &WeightTable, n: usize) -> Result<RefinedCounts<Mp>> {
    capacity(model, n)?;
    match (model, table) {
        (Model::SixV, WeightTable::SixV { a, b, c }) => {
            let one = Mp::one(a.prec());
            Ok(six_vertex_sweep(n, n, |_| true, |_, t| pick(t, a, b, c), &one))
        }
        (Model::SixVP, WeightTable::SixVP { a_o, b_o, c_o, a_e, b_e, c_e }) => {
            let one = Mp::one(a_o.prec());
            Ok(six_vertex_sweep(
                2 * n - 1,
                n,
                |r| r % 2 == 1,
                |r, t| if r % 2 == 1 { pick(t, a_o, b_o, c_o) } else { pick(t, a_e, b_e, c_e) },
                &one,
            ))
        }
        (Model::TwentyV, WeightTable::TwentyV { omega }) => {
            let one = Mp::one(omega[0].prec());
            Ok(twenty_vertex_sweep(n, omega, &one))
        }
        _ => Err(ArcticError::Argument(format!("weight table does not match model {model}"))),
    }
}

fn pick(t: VType, a: &Mp, b: &Mp, c: &Mp) -> Mp {
    match t {
        VType::A => a.clone(),
        VType::B => b.clone(),
        VType::C => c.clone(),
    }
}

/// Weighted enumeration at the model's Boltzmann weights.
pub fn enumerate_vertex_model(params: &ModelParams, n: usize) -> Result<RefinedCounts<Mp>> {
    params.validate()?;
    if params.model == Model::Dt {
        return Err(ArcticError::Argument("use count_aztec_triangle for domino tilings".into()));
    }
    enumerate_with_weights(params.model, &weights(params), n)
}

/// Unweighted configuration counts (all weights 1) as exact integers.
pub fn count_vertex_model(model: Model, n: usize) -> Result<RefinedCounts<Integer>> {
    capacity(model, n)?;
    let one = Integer::from(1);
    match model {
        Model::SixV => Ok(six_vertex_sweep(n, n, |_| true, |_, _| Integer::from(1), &one)),
        Model::SixVP => Ok(six_vertex_sweep(2 * n - 1, n, |r| r % 2 == 1, |_, _| Integer::from(1), &one)),
        Model::TwentyV => {
            let om: [Integer; 7] = std::array::from_fn(|_| Integer::from(1));
            Ok(twenty_vertex_sweep(n, &om, &one))
        }
        Model::Dt => count_aztec_triangle(n),
    }
}

/// Determinant over the integers by fraction-free (Bareiss) elimination.
pub fn bareiss_det(mut a: Vec<Vec<Integer>>) -> Integer {
    let n = a.len();
    if n == 0 {
        return Integer::from(1);
    }
    let mut sign = 1;
    let mut prev = Integer::from(1);
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Integer::new(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = Integer::from(&a[i][j] * &a[k][k]) - Integer::from(&a[i][k] * &a[k][j]);
                a[i][j] = t / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Schröder-path region for `𝒯_n`: `x ≤ 0`, `0 ≤ y ≤ h`, `y - x ≤ c`.
struct DtGeometry {
    h: i64,
    c: i64,
    starts: Vec<(i64, i64)>,
    ends: Vec<(i64, i64)>,
}

impl DtGeometry {
    fn new(n: usize) -> DtGeometry {
        let n = n as i64;
        let (h, c) = (n - 1, 2 * n - 1);
        DtGeometry {
            h,
            c,
            starts: (0..=h).rev().map(|y| (y - c, y)).collect(),
            ends: (0..n).map(|i| (-2 * i, 0)).collect(),
        }
    }

    /// Path counts from `start` to every lattice point, steps E, S, SE.
    fn counts_from(&self, start: (i64, i64)) -> HashMap<(i64, i64), Integer> {
        let mut f: HashMap<(i64, i64), Integer> = HashMap::new();
        let inside = |x: i64, y: i64| x <= 0 && (0..=self.h).contains(&y) && y - x <= self.c;
        for x in start.0..=0 {
            for y in (0..=start.1).rev() {
                if !inside(x, y) {
                    continue;
                }
                let mut v = Integer::from(((x, y) == start) as u32);
                for (dx, dy) in [(1, 0), (0, -1), (1, -1)] {
                    if let Some(p) = f.get(&(x - dx, y - dy)) {
                        v += p;
                    }
                }
                if v != 0 {
                    f.insert((x, y), v);
                }
            }
        }
        f
    }
}

/// Domino tilings of the Aztec triangle via non-intersecting Schröder paths (LGV),
/// refined by the height `k` at which the topmost path first reaches `x = 0`.
pub fn count_aztec_triangle(n: usize) -> Result<RefinedCounts<Integer>> {
    capacity(Model::Dt, n)?;
    let g = DtGeometry::new(n);
    let tables: Vec<_> = g.starts.iter().map(|&s| g.counts_from(s)).collect();
    let get = |i: usize, p: (i64, i64)| tables[i].get(&p).cloned().unwrap_or_default();
    let base: Vec<Vec<Integer>> = (0..n).map(|i| (0..n).map(|j| get(i, g.ends[j])).collect()).collect();
    let total = bareiss_det(base.clone());
    let by_exit: Vec<Integer> = (0..n as i64)
        .map(|k| {
            let mut m = base.clone();
            for (i, row) in m.iter_mut().enumerate() {
                let mut v = get(i, (-1, k));
                if k < g.h {
                    v += get(i, (-1, k + 1));
                }
                row[0] = v;
            }
            bareiss_det(m)
        })
        .collect();
    Ok(RefinedCounts { total, by_exit, split: None })
}

/// `max_k |Z^{DT}_{n,k} - Z^{20V}_{n,n+k+1} - Z^{20V}_{n,n+k}|` on exact integers.
pub fn refined_dt_identity(n: usize) -> Result<Integer> {
    let dt = count_aztec_triangle(n)?;
    let tv = count_vertex_model(Model::TwentyV, n)?;
    let z = |k: usize| tv.by_exit.get(k.wrapping_sub(1)).cloned().unwrap_or_default();
    let mut worst = Integer::new();
    for (k, lhs) in dt.by_exit.iter().enumerate() {
        let r = Integer::from(lhs - z(n + k + 1)) - z(n + k);
        let r = r.abs();
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}
