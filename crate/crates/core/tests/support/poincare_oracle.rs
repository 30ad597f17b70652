//! Direct summation of `c_k(1, 1)` for Q(sqrt 5) at level one, in 200-bit
//! MPFR arithmetic with plain integer residue enumeration. Shares nothing
//! with the library beyond `rug`.
//!
//! Elements are pairs `(a, b) = a + b w`, `w^2 = w + 1`.

use rug::float::Constant;
use rug::Float;

pub const PREC: u32 = 200;

type E = (i128, i128);

fn mul(x: E, y: E) -> E {
    // (a + b w)(c + d w) = ac + bd + (ad + bc + bd) w
    (x.0 * y.0 + x.1 * y.1, x.0 * y.1 + x.1 * y.0 + x.1 * y.1)
}

fn conj(x: E) -> E {
    (x.0 + x.1, -x.1)
}

fn norm(x: E) -> i128 {
    x.0 * x.0 + x.0 * x.1 - x.1 * x.1
}

fn phi() -> Float {
    (Float::with_val(PREC, 5).sqrt() + 1u32) / 2u32
}

fn sigma(x: E) -> (Float, Float) {
    let p = phi();
    let s1 = Float::with_val(PREC, &p * x.1) + x.0;
    let s2 = Float::with_val(PREC, 1u32 - &p) * x.1 + x.0;
    (s1, s2)
}

/// Associate of `x` (under `+-w^n`) with `|log |s1/s2|| <= log(phi)` and
/// positive first embedding; returns it with the unit `+-w^n` used.
fn balance(x: E) -> (E, E) {
    let lphi = phi().ln();
    let mut y = x;
    let mut u: E = (1, 0);
    loop {
        let (s1, s2) = sigma(y);
        let r = Float::with_val(PREC, s1.abs() / s2.abs()).ln();
        if r > lphi {
            // times w^{-1} = w - 1 shrinks s1 and grows s2
            y = mul(y, (-1, 1));
            u = mul(u, (-1, 1));
        } else if r < -Float::with_val(PREC, &lphi) {
            y = mul(y, (0, 1));
            u = mul(u, (0, 1));
        } else {
            break;
        }
    }
    if sigma(y).0 < 0 {
        y = (-y.0, -y.1);
        u = (-u.0, -u.1);
    }
    (y, u)
}

/// Residue system of the principal ideal `(g)` in HNF coordinates.
struct Residues {
    n: i128,
    a: i128,
    b: i128,
    c: i128,
}

impl Residues {
    fn new(g: E) -> Residues {
        let n = norm(g).abs();
        let gc = conj(g);
        let contains = |z: E| {
            let t = mul(z, gc);
            t.0 % n == 0 && t.1 % n == 0
        };
        let a = (1..=n).find(|&t| contains((t, 0))).unwrap();
        let c = n / a;
        let b = (0..a).find(|&t| contains((t, c))).unwrap();
        Residues { n, a, b, c }
    }

    fn reduce(&self, z: E) -> (i128, i128) {
        let q = z.1.div_euclid(self.c);
        let u = (z.0 - q * self.b).rem_euclid(self.a);
        (u, z.1 - q * self.c)
    }

    fn reps(&self) -> Vec<E> {
        let mut out = Vec::with_capacity(self.n as usize);
        for v in 0..self.c {
            for u in 0..self.a {
                out.push((u, v));
            }
        }
        out
    }

    /// Pairs `(x, x^{-1})` over the unit group.
    fn unit_pairs(&self) -> Vec<(E, E)> {
        let reps = self.reps();
        let one = self.reduce((1, 0));
        let mut out = Vec::new();
        for &x in &reps {
            if let Some(&y) = reps.iter().find(|&&y| self.reduce(mul(x, y)) == one) {
                out.push((x, y));
            }
        }
        out
    }
}

fn eps_power(j: i64) -> E {
    // eps_plus = w^2
    let mut e: E = (1, 0);
    let step: E = if j >= 0 { (1, 1) } else { (2, -1) };
    for _ in 0..j.unsigned_abs() {
        e = mul(e, step);
    }
    e
}

/// `sum_{x} cos(2 pi Tr((x + eps x^{-1}) / c))` over units modulo `c / delta`.
fn kloosterman(pairs: &[(E, E)], eps: E, c: E) -> Float {
    let nc = norm(c);
    let cc = conj(c);
    let two_pi = Float::with_val(PREC, Constant::Pi) * 2u32;
    let mut acc = Float::with_val(PREC, 0);
    for &(x, y) in pairs {
        let ey = mul(eps, y);
        let z = (x.0 + ey.0, x.1 + ey.1);
        let t = mul(z, cc);
        // Tr(p + q w) = 2p + q
        let tr = (2 * t.0 + t.1).rem_euclid(nc.abs());
        let arg = Float::with_val(PREC, &two_pi * tr) / nc.abs();
        acc += arg.cos();
    }
    acc
}

/// Truncated `c_k(1, 1)` over moduli `c = delta g` with `|N(c)| <= x`,
/// balanced by `w`, and units `eps_plus^j` with `|j| <= m`.
pub fn coefficient(k: u32, x: u64, m: i64) -> Float {
    let t = (x / 5) as i128;
    let delta: E = (2, 1);
    let mut seen = std::collections::BTreeSet::new();
    let mut moduli: Vec<(E, E)> = Vec::new();
    let bound = 4 * (t as f64).sqrt() as i128 + 4;
    for a in -bound..=bound {
        for b in -bound..=bound {
            let ng = norm((a, b)).abs();
            if ng == 0 || ng > t {
                continue;
            }
            let (c, u) = balance(mul(delta, (a, b)));
            if seen.insert(c) {
                moduli.push((c, mul((a, b), u)));
            }
        }
    }
    let pi = Float::with_val(PREC, Constant::Pi);
    let four_pi = Float::with_val(PREC, &pi * 4u32);
    let mut sum = Float::with_val(PREC, 0);
    for (c, g) in moduli {
        let res = Residues::new(g);
        let pairs = res.unit_pairs();
        let (c1, c2) = sigma(c);
        let nc = Float::with_val(PREC, norm(c).abs());
        for j in -m..=m {
            let eps = eps_power(j);
            let s = kloosterman(&pairs, eps, c);
            let (e1, e2) = sigma(eps);
            let x1 = Float::with_val(PREC, &four_pi * e1.sqrt()) / c1.clone().abs();
            let x2 = Float::with_val(PREC, &four_pi * e2.sqrt()) / c2.clone().abs();
            let jj = x1.jn(k as i32 - 1) * x2.jn(k as i32 - 1);
            sum += s * jj / &nc;
        }
    }
    // (2 pi)^2 N(d) / sqrt(D) = 4 pi^2 sqrt 5
    let pref = Float::with_val(PREC, &pi * &pi) * 4u32 * Float::with_val(PREC, 5).sqrt();
    pref * sum + 1u32
}
