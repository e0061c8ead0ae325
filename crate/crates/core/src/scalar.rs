//! Fixed-precision p-adic scalars, Teichmüller lifts, and the coefficient
//! ring `Z_p[v3]/(v3^2)`.
//!
//! A nonzero [`PAdicScalar`] is stored as `p^val * unit` where `unit` is a
//! residue modulo `p^prec` prime to `p`. Multiplication and division keep the
//! relative precision of the less precise operand; addition works at the
//! smaller absolute precision and drops digits when leading terms cancel.
//! Results that cancel completely are treated as exact zero.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("result precision {got} is below the configured floor {floor}")]
    PrecisionFloor { got: u32, floor: u32 },
    #[error("valuation {0} is negative: not a p-adic integer")]
    NotIntegral(i64),
    #[error("residue is zero modulo p")]
    ZeroResidue,
    #[error("{p} is not an odd prime")]
    NotOddPrime { p: u32 },
    #[error("precision {digits} does not fit in machine words for p = {p}")]
    PrecisionTooLarge { p: u32, digits: u32 },
}

pub fn is_odd_prime(p: u32) -> bool {
    p >= 3 && p % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// `p^k` as a machine word. Callers guarantee it fits.
pub fn pow_u64(p: u32, k: u32) -> u64 {
    (p as u64).pow(k)
}

/// Largest relative precision for which residue products fit in `u128`.
pub fn max_digits(p: u32) -> u32 {
    let mut k = 0u32;
    let mut acc: u128 = 1;
    while acc * (p as u128) < (1u128 << 63) {
        acc *= p as u128;
        k += 1;
    }
    k
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "inverse of a non-unit");
    t.rem_euclid(m as i128) as u64
}

/// Splits the p-power out of a nonzero residue.
fn split_p(p: u32, mut x: u64) -> (u32, u64) {
    let mut t = 0;
    while x % p as u64 == 0 {
        x /= p as u64;
        t += 1;
    }
    (t, x)
}

/// Element of `Q_p` known to a finite number of significant digits.
#[derive(Clone, Copy, Debug)]
pub struct PAdicScalar {
    p: u32,
    val: i64,
    unit: u64,
    prec: u32,
}

impl PAdicScalar {
    pub fn zero(p: u32) -> Self {
        PAdicScalar { p, val: 0, unit: 0, prec: u32::MAX }
    }

    /// Builds `p^val * unit` with `unit` taken modulo `p^prec`.
    pub fn from_parts(p: u32, val: i64, unit: u64, prec: u32) -> Self {
        let m = pow_u64(p, prec);
        let u = unit % m;
        if u == 0 {
            return Self::zero(p);
        }
        let (t, u) = split_p(p, u);
        PAdicScalar { p, val: val + t as i64, unit: u, prec: prec - t }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.unit == 0
    }

    /// `None` for zero (valuation `+∞`).
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    pub fn unit(&self) -> Option<u64> {
        (!self.is_zero()).then_some(self.unit)
    }

    /// Significant digits of the unit part; `None` for exact zero.
    pub fn precision(&self) -> Option<u32> {
        (!self.is_zero()).then_some(self.prec)
    }

    fn modulus(&self) -> u64 {
        pow_u64(self.p, self.prec)
    }

    pub fn checked_add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let p = self.p;
        let v = self.val.min(other.val);
        let abs = (self.val + self.prec as i64).min(other.val + other.prec as i64);
        let digits = (abs - v) as u32;
        let m = pow_u64(p, digits);
        let term = |x: &Self| -> u64 {
            let shift = (x.val - v) as u32;
            if shift >= digits {
                0
            } else {
                mul_mod(x.unit % m, pow_u64(p, shift), m)
            }
        };
        let s = (term(self) as u128 + term(other) as u128) % m as u128;
        Self::from_parts(p, v, s as u64, digits)
    }

    pub fn checked_mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        let prec = self.prec.min(other.prec);
        let m = pow_u64(self.p, prec);
        PAdicScalar {
            p: self.p,
            val: self.val + other.val,
            unit: mul_mod(self.unit % m, other.unit % m, m),
            prec,
        }
    }

    pub fn inverse(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(PAdicScalar {
            p: self.p,
            val: -self.val,
            unit: inv_mod(self.unit, self.modulus()),
            prec: self.prec,
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ScalarError> {
        Ok(self.checked_mul(&other.inverse()?))
    }

    /// Division that also enforces a precision floor on the result.
    pub fn div_with_floor(&self, other: &Self, floor: u32) -> Result<Self, ScalarError> {
        let q = self.checked_div(other)?;
        q.ensure_precision(floor)?;
        Ok(q)
    }

    pub fn ensure_precision(&self, floor: u32) -> Result<(), ScalarError> {
        match self.precision() {
            Some(got) if got < floor => Err(ScalarError::PrecisionFloor { got, floor }),
            _ => Ok(()),
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        if self.is_zero() {
            return if e == 0 { PAdicScalar::from_parts(self.p, 0, 1, max_digits(self.p)) } else { *self };
        }
        let mut acc = PAdicScalar { p: self.p, val: 0, unit: 1, prec: self.prec };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base);
            }
            base = base.checked_mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Multiplies by `p^k` (k may be negative).
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return *self;
        }
        PAdicScalar { val: self.val + k, ..*self }
    }

    /// Image in `F_p`.
    pub fn reduce_mod_p(&self) -> Result<u32, ScalarError> {
        if self.is_zero() {
            return Ok(0);
        }
        if self.val < 0 {
            return Err(ScalarError::NotIntegral(self.val));
        }
        if self.val > 0 {
            return Ok(0);
        }
        Ok((self.unit % self.p as u64) as u32)
    }

    /// Representative of the residue mod `p` in `(-p/2, p/2]`.
    pub fn symmetric_mod_p(&self) -> Result<i64, ScalarError> {
        let r = self.reduce_mod_p()? as i64;
        let p = self.p as i64;
        Ok(if r > p / 2 { r - p } else { r })
    }

    /// Residue modulo `p^k` of an integral element.
    pub fn residue(&self, k: u32) -> Result<u64, ScalarError> {
        if self.is_zero() {
            return Ok(0);
        }
        if self.val < 0 {
            return Err(ScalarError::NotIntegral(self.val));
        }
        if self.val >= k as i64 {
            return Ok(0);
        }
        let m = pow_u64(self.p, k);
        Ok(mul_mod(self.unit % m, pow_u64(self.p, self.val as u32), m))
    }

    /// Splits an integral element as `r + p * q` with `0 <= r < p`.
    pub fn split_residue(&self) -> Result<(u32, Self), ScalarError> {
        let r = self.reduce_mod_p()?;
        let lift = PAdicScalar::from_parts(self.p, 0, r as u64, self.prec.min(max_digits(self.p)));
        let rest = (*self - lift).shift(-1);
        Ok((r, rest))
    }
}

impl PartialEq for PAdicScalar {
    fn eq(&self, other: &Self) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        if self.val != other.val {
            return false;
        }
        let m = pow_u64(self.p, self.prec.min(other.prec));
        self.unit % m == other.unit % m
    }
}

impl Add for PAdicScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs)
    }
}

impl Sub for PAdicScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.checked_add(&-rhs)
    }
}

impl Mul for PAdicScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs)
    }
}

impl Neg for PAdicScalar {
    type Output = Self;
    fn neg(self) -> Self {
        if self.is_zero() {
            return self;
        }
        let m = self.modulus();
        PAdicScalar { unit: m - self.unit % m, ..self }
    }
}

impl fmt::Display for PAdicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let m = self.modulus() as i128;
        let u = self.unit as i128;
        let s = if u > m / 2 { u - m } else { u };
        match self.val {
            0 => write!(f, "{s}"),
            v if v > 0 => write!(f, "{s}*{}^{v}", self.p),
            v => write!(f, "{s}/{}^{}", self.p, -v),
        }
    }
}

/// Arithmetic context: a prime and the default number of significant digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ring {
    pub p: u32,
    pub digits: u32,
}

impl Ring {
    pub fn new(p: u32, digits: u32) -> Result<Self, ScalarError> {
        if !is_odd_prime(p) {
            return Err(ScalarError::NotOddPrime { p });
        }
        if digits == 0 || digits > max_digits(p) {
            return Err(ScalarError::PrecisionTooLarge { p, digits });
        }
        Ok(Ring { p, digits })
    }

    pub fn zero(&self) -> PAdicScalar {
        PAdicScalar::zero(self.p)
    }

    pub fn one(&self) -> PAdicScalar {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> PAdicScalar {
        self.big(&BigInt::from(n))
    }

    pub fn big(&self, n: &BigInt) -> PAdicScalar {
        if n.is_zero() {
            return self.zero();
        }
        let pb = BigInt::from(self.p);
        let mut n = n.clone();
        let mut v = 0i64;
        loop {
            let (q, r) = n.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            n = q;
            v += 1;
        }
        let m = BigInt::from(pow_u64(self.p, self.digits));
        let u = n.mod_floor(&m).to_u64().expect("residue fits");
        PAdicScalar { p: self.p, val: v, unit: u, prec: self.digits }
    }

    pub fn biguint(&self, n: &BigUint) -> PAdicScalar {
        self.big(&BigInt::from(n.clone()))
    }

    /// `num / den` for integers, `den != 0`.
    pub fn ratio(&self, num: i64, den: i64) -> Result<PAdicScalar, ScalarError> {
        self.int(num).checked_div(&self.int(den))
    }

    /// `p^k` for any integer `k`.
    pub fn p_power(&self, k: i64) -> PAdicScalar {
        self.one().shift(k)
    }
}

/// `n choose k` over arbitrary-precision integers.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `n choose k` mod `p` by Lucas' theorem; zero when `k < 0` or `k > n`.
pub fn binomial_mod_p(n: i64, k: i64, p: u32) -> u32 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let p64 = p as i64;
    let (mut n, mut k) = (n, k);
    let mut acc: u64 = 1;
    while k > 0 || n > 0 {
        let (nd, kd) = (n % p64, k % p64);
        if kd > nd {
            return 0;
        }
        // small binomial nd choose kd < p
        let mut c: u64 = 1;
        for i in 0..kd {
            c = c * (nd - i) as u64 / (i + 1) as u64;
        }
        acc = acc * (c % p as u64) % p as u64;
        n /= p64;
        k /= p64;
    }
    acc as u32
}

/// A Teichmüller representative: the root of unity in `Z_p` lifting a unit residue.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TeichmullerRoot {
    pub omega: PAdicScalar,
    pub order: u32,
}

impl TeichmullerRoot {
    /// Lift of the smallest primitive root modulo `p`.
    pub fn primitive(ring: &Ring) -> Self {
        teichmuller(ring, primitive_root(ring.p)).expect("primitive root is a unit")
    }

    pub fn power(&self, i: u64) -> PAdicScalar {
        self.omega.pow(i)
    }
}

/// Lift of `residue` fixed by Frobenius `a -> a^p`, to `ring.digits` digits.
pub fn teichmuller(ring: &Ring, residue: u32) -> Result<TeichmullerRoot, ScalarError> {
    if residue % ring.p == 0 {
        return Err(ScalarError::ZeroResidue);
    }
    let mut a = ring.int((residue % ring.p) as i64);
    // converges after at most `digits` steps
    for _ in 0..=ring.digits {
        let next = a.pow(ring.p as u64);
        if next == a {
            break;
        }
        a = next;
    }
    Ok(TeichmullerRoot { omega: a, order: ring.p - 1 })
}

/// Smallest generator of `F_p^×`.
pub fn primitive_root(p: u32) -> u32 {
    let n = p - 1;
    let mut factors = Vec::new();
    let mut m = n;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            factors.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    let powmod = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        b %= p as u64;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r
    };
    (2..p)
        .find(|&g| factors.iter().all(|&q| powmod(g as u64, (n / q) as u64) != 1))
        .unwrap_or(1)
}

/// Element `plain + v3part * v3` of `Z_p[v3]/(v3^2)` (tensored with `Q_p` when
/// valuations go negative).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoeffV3 {
    pub plain: PAdicScalar,
    pub v3part: PAdicScalar,
}

impl CoeffV3 {
    pub fn new(plain: PAdicScalar, v3part: PAdicScalar) -> Self {
        CoeffV3 { plain, v3part }
    }

    pub fn zero(p: u32) -> Self {
        CoeffV3 { plain: PAdicScalar::zero(p), v3part: PAdicScalar::zero(p) }
    }

    pub fn scalar(c: PAdicScalar) -> Self {
        CoeffV3 { plain: c, v3part: PAdicScalar::zero(c.prime()) }
    }

    pub fn v3(c: PAdicScalar) -> Self {
        CoeffV3 { plain: PAdicScalar::zero(c.prime()), v3part: c }
    }

    pub fn prime(&self) -> u32 {
        self.plain.prime()
    }

    pub fn is_zero(&self) -> bool {
        self.plain.is_zero() && self.v3part.is_zero()
    }

    pub fn scale(&self, c: &PAdicScalar) -> Self {
        CoeffV3 { plain: self.plain * *c, v3part: self.v3part * *c }
    }

    /// Smallest precision among the nonzero parts.
    pub fn min_precision(&self) -> Option<u32> {
        [self.plain.precision(), self.v3part.precision()].into_iter().flatten().min()
    }

    /// Smallest valuation among the nonzero parts.
    pub fn min_valuation(&self) -> Option<i64> {
        [self.plain.valuation(), self.v3part.valuation()].into_iter().flatten().min()
    }

    /// Inverse, defined when the plain part is a nonzero scalar.
    pub fn inverse(&self) -> Result<Self, ScalarError> {
        let a_inv = self.plain.inverse()?;
        Ok(CoeffV3 { plain: a_inv, v3part: -(self.v3part * a_inv * a_inv) })
    }
}

impl Add for CoeffV3 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        CoeffV3 { plain: self.plain + rhs.plain, v3part: self.v3part + rhs.v3part }
    }
}

impl AddAssign for CoeffV3 {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for CoeffV3 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl SubAssign for CoeffV3 {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl Neg for CoeffV3 {
    type Output = Self;
    fn neg(self) -> Self {
        CoeffV3 { plain: -self.plain, v3part: -self.v3part }
    }
}

impl Mul for CoeffV3 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        // v3^2 = 0
        CoeffV3 {
            plain: self.plain * rhs.plain,
            v3part: self.plain * rhs.v3part + self.v3part * rhs.plain,
        }
    }
}

impl fmt::Display for CoeffV3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.plain.is_zero(), self.v3part.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.plain),
            (true, false) => write!(f, "{}*v3", self.v3part),
            (false, false) => write!(f, "{} + {}*v3", self.plain, self.v3part),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(p: u32, k: u32) -> Ring {
        Ring::new(p, k).unwrap()
    }

    #[test]
    fn add_carries_into_valuation() {
        let r = ring(5, 4);
        let s = r.int(1) + r.int(4);
        assert_eq!(s.valuation(), Some(1));
        assert_eq!(s.unit(), Some(1));
        assert_eq!(s.precision(), Some(3));
    }

    #[test]
    fn div_by_p_shifts_valuation() {
        let r = ring(7, 6);
        for u in [1i64, 3, 13, 20] {
            let pu = r.int(7 * u);
            assert_eq!(pu.checked_div(&r.int(7)).unwrap(), r.int(u));
        }
    }

    #[test]
    fn mul_mod_625() {
        let r = ring(5, 4);
        let sq = r.int(182) * r.int(182);
        assert_eq!(sq.residue(4).unwrap(), 624);
        assert_eq!(sq, r.int(-1));
    }

    #[test]
    fn division_by_zero_errors() {
        let r = ring(3, 8);
        assert_eq!(r.one().checked_div(&r.zero()), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn precision_floor_is_enforced() {
        let r = ring(3, 8);
        let close = r.int(1) - r.int(1 + 3i64.pow(6));
        assert_eq!(close.precision(), Some(2));
        assert!(matches!(close.ensure_precision(4), Err(ScalarError::PrecisionFloor { got: 2, floor: 4 })));
        assert!(r.one().div_with_floor(&close, 4).is_err());
    }

    #[test]
    fn teichmuller_examples() {
        assert_eq!(teichmuller(&ring(3, 2), 2).unwrap().omega.residue(2).unwrap(), 8);
        let w = teichmuller(&ring(5, 4), 2).unwrap().omega;
        assert_eq!(w.residue(4).unwrap(), 182);
        assert_eq!(w.pow(4), ring(5, 4).one());
        assert_eq!(teichmuller(&ring(7, 8), 1).unwrap().omega, ring(7, 8).one());
        assert_eq!(teichmuller(&ring(7, 8), 14), Err(ScalarError::ZeroResidue));
    }

    #[test]
    fn reduce_mod_p_examples() {
        let r = ring(5, 4);
        assert_eq!(r.int(182).reduce_mod_p().unwrap(), 2);
        assert_eq!(r.int(5 * 3).reduce_mod_p().unwrap(), 0);
        let r3 = ring(3, 8);
        let c = r3.biguint(&binomial(6, 2)).checked_div(&r3.int(3)).unwrap();
        assert_eq!(c.reduce_mod_p().unwrap(), 2);
        assert_eq!(r3.ratio(1, 3).unwrap().reduce_mod_p(), Err(ScalarError::NotIntegral(-1)));
    }

    #[test]
    fn wolstenholme_type_congruences() {
        for p in [3u32, 5, 7, 11, 13] {
            let r = ring(p, 6);
            let a = r.biguint(&binomial(2 * p as u64, 2)).checked_div(&r.int(p as i64)).unwrap();
            let b = r.biguint(&binomial((p * p) as u64, p as u64)).checked_div(&r.int(p as i64)).unwrap();
            assert_eq!(a.symmetric_mod_p().unwrap(), -1, "p = {p}");
            assert_eq!(b.symmetric_mod_p().unwrap(), 1, "p = {p}");
        }
    }

    #[test]
    fn lucas_matches_bigint() {
        for p in [3u32, 5, 7] {
            for n in 0..60u64 {
                for k in 0..=n {
                    let big = binomial(n, k) % BigUint::from(p);
                    assert_eq!(binomial_mod_p(n as i64, k as i64, p), big.to_u32().unwrap());
                }
            }
        }
        assert_eq!(binomial_mod_p(4, -1, 3), 0);
        assert_eq!(binomial_mod_p(4, 5, 3), 0);
    }

    #[test]
    fn v3_is_nilpotent() {
        let r = ring(5, 6);
        let v = CoeffV3::v3(r.one());
        assert!((v * v).is_zero());
        let a = CoeffV3::new(r.int(3), r.int(7));
        assert_eq!(a * a.inverse().unwrap(), CoeffV3::scalar(r.one()));
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(3), 2);
        assert_eq!(primitive_root(5), 2);
        assert_eq!(primitive_root(7), 3);
        assert_eq!(primitive_root(13), 2);
    }

    fn arb_scalar(p: u32) -> impl Strategy<Value = PAdicScalar> {
        (-3i64..4, 0u64..(p as u64).pow(8)).prop_map(move |(v, u)| {
            PAdicScalar::from_parts(p, v, u, 8)
        })
    }

    proptest! {
        #[test]
        fn ring_laws_hold(a in arb_scalar(5), b in arb_scalar(5), c in arb_scalar(5)) {
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a * (b + c), a * b + a * c);
        }

        #[test]
        fn teichmuller_is_root_and_multiplicative(a in 1u32..7, b in 1u32..7) {
            let r = Ring::new(7, 8).unwrap();
            let ta = teichmuller(&r, a).unwrap().omega;
            let tb = teichmuller(&r, b).unwrap().omega;
            let tab = teichmuller(&r, (a * b) % 7).unwrap().omega;
            prop_assert_eq!(ta.pow(6), r.one());
            prop_assert_eq!(ta * tb, tab);
        }

        #[test]
        fn coeff_v3_part_never_feeds_plain(a in arb_scalar(3), b in arb_scalar(3), c in arb_scalar(3), d in arb_scalar(3)) {
            let x = CoeffV3::new(a, b);
            let y = CoeffV3::new(c, d);
            prop_assert_eq!((x * y).plain, a * c);
            let z = CoeffV3::v3(b);
            prop_assert!((z * CoeffV3::v3(d)).is_zero());
        }
    }
}
