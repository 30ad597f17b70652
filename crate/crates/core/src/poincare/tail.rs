//! Upper bounds for the omitted terms of the coefficient sum.
//!
//! Write `K = k - 1`, `beta_i = e x_i / (2K)` and `g(beta) = min(1, beta^K)`,
//! so `|J_K(x_i)| <= g(beta_i)`. Along the unit orbit `eps_plus^j` the product
//! `P0 = beta_1 beta_2 = kappa / |N(c)|` is constant while `beta_1` grows by
//! `s = sqrt(rho)`, `rho = sigma_1(eps_plus)`, per step. Summing over all `j`
//! gives
//!
//! ```text
//! G(P0) = P0^K (2 log(1/P0) / log rho + geo)     P0 < 1
//!       = 2 log(P0) / log rho + geo               P0 >= 1
//! geo   = 1 + 2 / (1 - rho^(-K/2))
//! ```
//!
//! Over moduli `c = g b` with `N(b) = t`, the Weil bound is at most
//! `W0 2^{pr(n)} 2^{pr(b)} sqrt(N(n) t)`, and `h(t) = sum_{N b = t} 2^{pr(b)}`
//! is multiplicative with `h <= tau^2`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::{Round, Special};
use rug::Float;

use crate::arith;
use crate::interval::Interval;

pub(crate) const PREC: u32 = 128;
const EXPLICIT_LIMIT: u64 = 1_000_000;
const EXPLICIT_MAX: u64 = 10_000_000;
const SIDE_STEPS: u32 = 400;

/// Multiplicative function over ideal norms from its prime-power values,
/// `local(chi, e)` with `chi` the Kronecker symbol of `p`.
pub(crate) fn norm_sieve(disc: i64, limit: u64, local: fn(i32, u32) -> u64) -> Vec<u64> {
    let n = limit as usize;
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    let mut chi = vec![0i8; n + 1];
    let mut h = vec![0u64; n + 1];
    if n >= 1 {
        h[1] = 1;
    }
    for t in 2..=n {
        let p = spf[t] as usize;
        if p == t {
            chi[p] = arith::kronecker_prime(disc as i128, p as u64) as i8;
        }
        let mut m = t;
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        h[t] = h[m] * local(chi[p] as i32, e);
    }
    h
}

fn h_local(chi: i32, e: u32) -> u64 {
    match chi {
        1 => 4 * e as u64,
        -1 if e.is_multiple_of(2) => 2,
        -1 => 0,
        _ => 2,
    }
}

/// Prefix sums `H(t) = sum_{s <= t} h(s)`, shared per discriminant.
fn h_prefix(disc: i64, limit: u64) -> Arc<Vec<u64>> {
    static CACHE: OnceLock<Mutex<HashMap<i64, Arc<Vec<u64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&disc) {
        if v.len() as u64 > limit {
            return v.clone();
        }
    }
    let h = norm_sieve(disc, limit, h_local);
    let mut pre = Vec::with_capacity(h.len());
    let mut acc = 0u64;
    for (i, x) in h.iter().enumerate() {
        if i > 0 {
            acc += x;
        }
        pre.push(acc);
    }
    let pre = Arc::new(pre);
    cache.lock().unwrap().insert(disc, pre.clone());
    pre
}

/// `C` with `tau(n) <= C n^{1/4}`.
pub(crate) fn divisor_constant(prec: u32) -> Interval {
    let mut c = Interval::one(prec);
    for p in [2i64, 3, 5, 7, 11, 13] {
        let mut best = Interval::one(prec);
        for e in 1..64 {
            let v = Interval::from_i64(prec, e + 1).div(&Interval::from_i64(prec, p).pow_f64(e as f64 / 4.0));
            if v.hi() > best.hi() {
                best = v;
            }
        }
        c = c.mul(&best);
    }
    c
}

fn up(x: &Interval) -> Float {
    x.hi().clone()
}

/// Unit-orbit geometry for one weight.
pub(crate) struct UnitGeometry {
    k1: u32,
    ln_rho: Interval,
    step: Interval,
    geo: Interval,
    /// `1 / (1 - s^{-K})`
    geo_side: Interval,
}

impl UnitGeometry {
    pub fn new(rho: &Interval, k: u32) -> UnitGeometry {
        let k1 = k - 1;
        let ln_rho = rho.ln();
        let step = rho.sqrt();
        let one = Interval::one(PREC);
        let q = rho.pow_f64(-(k1 as f64) / 2.0);
        let geo_side = one.sub(&q).recip();
        let geo = one.add(&geo_side.mul_f64(2.0));
        // G is increasing in P0 when K geo log(rho) > 2, true for every real
        // quadratic field since rho >= (3 + sqrt 5) / 2.
        debug_assert!(geo.mul(&ln_rho).mul_f64(k1 as f64).lo_f64() > 2.0);
        UnitGeometry {
            k1,
            ln_rho,
            step,
            geo,
            geo_side,
        }
    }

    /// Upper bound of `G` at every point of `[0, p0]`.
    pub fn g_upper(&self, p0: &Float) -> Float {
        if p0.is_zero() {
            return Float::with_val(PREC, 0);
        }
        if p0.is_infinite() || p0.is_nan() {
            return Float::with_val(PREC, Special::Infinity);
        }
        let p = Interval::new(Float::with_val(PREC, p0), Float::with_val(PREC, p0));
        let two = 2.0;
        let v = if *p0 < 1 {
            let l = p.recip().ln().mul_f64(two).div(&self.ln_rho);
            p.powi(self.k1 as i32).mul(&l.add(&self.geo))
        } else {
            p.ln().mul_f64(two).div(&self.ln_rho).add(&self.geo)
        };
        up(&v)
    }

    fn g1(&self, beta: &Interval) -> Float {
        if *beta.hi() >= 1 {
            Float::with_val(PREC, 1)
        } else {
            up(&beta.powi(self.k1 as i32))
        }
    }

    /// `sum_{i >= 0} g(b_grow s^i) g(b_shrink s^-i)`.
    pub fn side_sum(&self, b_grow: &Interval, b_shrink: &Interval) -> Float {
        let mut acc = Float::with_val(PREC, 0);
        let mut bg = b_grow.clone();
        let mut bs = b_shrink.clone();
        for _ in 0..SIDE_STEPS {
            if *bg.lo() >= 1 && *bs.hi() < 1 {
                let t = bs.powi(self.k1 as i32).mul(&self.geo_side);
                return Float::with_val_round(PREC, &acc + t.hi(), Round::Up).0;
            }
            let term = Float::with_val_round(PREC, self.g1(&bg) * self.g1(&bs), Round::Up).0;
            acc = Float::with_val_round(PREC, &acc + &term, Round::Up).0;
            bg = bg.mul(&self.step);
            bs = bs.div(&self.step);
        }
        Float::with_val(PREC, Special::Infinity)
    }

    pub fn g(&self, beta: &Interval) -> Float {
        self.g1(beta)
    }
}

/// Upper bound for `sum_{t > cut} h(t) t^{-1/2} G(kappa / t)`.
///
/// Explicit block sums on a fixed grid of ratio `2^{1/4}` up to `L`, then
/// `h <= C^2 t^{1/2}` and `log y <= y^eta / (e eta)` beyond.
pub(crate) fn norm_tail(disc: i64, geo: &UnitGeometry, cut: u64, kappa: &Interval, eta: f64) -> Float {
    let kap = kappa.hi_f64();
    let limit = EXPLICIT_LIMIT.max((2.0 * kap).ceil() as u64 + 1);
    if limit > EXPLICIT_MAX {
        return Float::with_val(PREC, Special::Infinity);
    }
    let inflate = 1.0 + 2f64.powi(-40);
    let f_at = |t: u64| -> Float {
        let tt = Interval::from_i64(PREC, t as i64);
        let p0 = kappa.div(&tt);
        let g = geo.g_upper(p0.hi());
        let gi = Interval::new(g.clone(), g);
        up(&gi.div(&tt.sqrt()).mul_f64(inflate))
    };
    let mut total = Float::with_val(PREC, 0);
    let mut add = |x: Float| {
        total = Float::with_val_round(PREC, &total + &x, Round::Up).0;
    };
    if cut < limit {
        let pre = h_prefix(disc, limit);
        let count = |a: u64, b: u64| -> u64 { pre[b as usize] - pre[a as usize - 1] };
        // grid points ceil(2^{i/4})
        let mut grid: Vec<u64> = Vec::new();
        let mut i = 0i32;
        loop {
            let g = 2f64.powf(i as f64 / 4.0).ceil() as u64;
            if g > limit {
                break;
            }
            if grid.last() != Some(&g) {
                grid.push(g);
            }
            i += 1;
        }
        grid.push(limit + 1);
        let start = cut + 1;
        let mut pos = grid.partition_point(|&g| g <= start);
        let first_end = grid[pos] - 1;
        let c0 = count(start, first_end);
        if c0 > 0 {
            let fv = f_at(cut.max(1));
            add(Float::with_val_round(PREC, &fv * c0, Round::Up).0);
        }
        while pos + 1 < grid.len() {
            let a = grid[pos];
            let b = grid[pos + 1] - 1;
            let c = count(a, b);
            if c > 0 {
                let fv = f_at(a);
                add(Float::with_val_round(PREC, &fv * c, Round::Up).0);
            }
            pos += 1;
        }
    }
    // analytic part over t > s with s > kappa
    let s = Interval::from_i64(PREC, cut.max(limit) as i64);
    let k1 = geo.k1 as f64;
    let c2 = divisor_constant(PREC).sqr();
    let kap_k = kappa.powi(geo.k1 as i32);
    let etai = Interval::from_f64(PREC, eta);
    let sum_pow = |sigma: f64| -> Interval {
        s.pow_f64(1.0 - sigma).div(&Interval::from_f64(PREC, sigma - 1.0))
    };
    let log_part = kappa
        .pow_f64(-eta)
        .mul_f64(2.0)
        .div(&Interval::e(PREC).mul(&etai).mul(&geo.ln_rho))
        .mul(&sum_pow(k1 - eta));
    let geo_part = geo.geo.mul(&sum_pow(k1));
    let analytic = c2.mul(&kap_k).mul(&log_part.add(&geo_part));
    add(up(&analytic));
    total
}
