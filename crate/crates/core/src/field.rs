//! Arithmetic in `GF(p^k)`, represented as `F_p[t]/(f)` for a monic
//! irreducible `f` of degree `k`.

use rand::Rng;

use crate::scalar::is_odd_prime;

/// Polynomials over F_p, low degree first, no trailing zeros.
type Poly = Vec<u32>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_sub(a: &[u32], b: &[u32], p: u32) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    trim(out.into_iter().map(|v| v as u32).collect())
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let (mut b, mut e) = (a as u64 % p as u64, p as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Poly {
    let mut r: Poly = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod(*m.last().expect("nonzero modulus"), p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = (*r.last().unwrap() as u64 * lead_inv as u64 % p as u64) as u32;
        for (i, &mi) in m.iter().enumerate() {
            let v = &mut r[shift + i];
            *v = ((*v as u64 + p as u64 * p as u64 - c as u64 * mi as u64) % p as u64) as u32;
        }
        r = trim(r);
    }
    r
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Poly {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn poly_powmod(base: &[u32], mut e: u128, m: &[u32], p: u32) -> Poly {
    let mut acc: Poly = vec![1];
    let mut b = poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem(&poly_mul(&acc, &b, p), m, p);
        }
        b = poly_rem(&poly_mul(&b, &b, p), m, p);
        e >>= 1;
    }
    acc
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test for a monic polynomial of degree `k`.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let k = (f.len() - 1) as u32;
    let x: Poly = vec![0, 1];
    let pk = (p as u128).pow(k);
    if poly_sub(&poly_powmod(&x, pk, f, p), &x, p) != Vec::<u32>::new() {
        return false;
    }
    prime_factors(k).into_iter().all(|q| {
        let e = (p as u128).pow(k / q);
        let h = poly_sub(&poly_powmod(&x, e, f, p), &x, p);
        poly_gcd(f, &h, p).len() == 1
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisField {
    p: u32,
    k: u32,
    modulus: Poly,
}

/// Element of a [`GaloisField`]: `k` coefficients, low degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gf(Vec<u32>);

impl GaloisField {
    /// The field with `p^k` elements, using the first irreducible modulus in
    /// lexicographic order.
    pub fn new(p: u32, k: u32) -> Option<Self> {
        if !is_odd_prime(p) || k == 0 || (p as f64).powi(k as i32) > 1e15 {
            return None;
        }
        if k == 1 {
            return Some(GaloisField { p, k, modulus: vec![0, 1] });
        }
        let total = (p as u64).pow(k);
        for code in 0..total {
            let mut f: Poly = (0..k).map(|i| ((code / (p as u64).pow(i)) % p as u64) as u32).collect();
            f.push(1);
            if f[0] != 0 && is_irreducible(&f, p) {
                return Some(GaloisField { p, k, modulus: f });
            }
        }
        None
    }

    /// Smallest extension degree with at least `min_size` elements.
    pub fn with_min_size(p: u32, min_size: u64) -> Option<Self> {
        let mut k = 1;
        while (p as u64).checked_pow(k)? < min_size {
            k += 1;
        }
        Self::new(p, k)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn size(&self) -> u64 {
        (self.p as u64).pow(self.k)
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> Gf {
        Gf(vec![0; self.k as usize])
    }

    pub fn one(&self) -> Gf {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> Gf {
        let mut v = vec![0; self.k as usize];
        v[0] = n.rem_euclid(self.p as i64) as u32;
        Gf(v)
    }

    pub fn is_zero(&self, a: &Gf) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    fn pack(&self, poly: Poly) -> Gf {
        let mut v = poly;
        v.resize(self.k as usize, 0);
        Gf(v)
    }

    pub fn add(&self, a: &Gf, b: &Gf) -> Gf {
        Gf(a.0.iter().zip(&b.0).map(|(x, y)| (x + y) % self.p).collect())
    }

    pub fn sub(&self, a: &Gf, b: &Gf) -> Gf {
        Gf(a.0.iter().zip(&b.0).map(|(x, y)| (x + self.p - y) % self.p).collect())
    }

    pub fn neg(&self, a: &Gf) -> Gf {
        self.sub(&self.zero(), a)
    }

    pub fn scale(&self, a: &Gf, c: i64) -> Gf {
        let c = c.rem_euclid(self.p as i64) as u64;
        Gf(a.0.iter().map(|&x| (x as u64 * c % self.p as u64) as u32).collect())
    }

    pub fn mul(&self, a: &Gf, b: &Gf) -> Gf {
        if self.k == 1 {
            return Gf(vec![(a.0[0] as u64 * b.0[0] as u64 % self.p as u64) as u32]);
        }
        self.pack(poly_rem(&poly_mul(&trim(a.0.clone()), &trim(b.0.clone()), self.p), &self.modulus, self.p))
    }

    pub fn pow(&self, a: &Gf, mut e: u64) -> Gf {
        let mut acc = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Gf {
        Gf((0..self.k).map(|_| rng.gen_range(0..self.p)).collect())
    }
}

impl Gf {
    pub fn coefficients(&self) -> &[u32] {
        &self.0
    }
}
