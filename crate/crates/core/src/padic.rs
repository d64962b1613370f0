//! Exact p-adic scalar arithmetic with relative-precision tracking and exact
//! norm values in p^Q ∪ {0}.
//!
//! A nonzero scalar is `u·p^v + O(p^{v+n})` with the unit residue `u` stored
//! canonically in `[1, p^n)` coprime to p. The exact zero remembers the
//! absolute precision at which it was certified, so cancellation never turns
//! into silent garbage. Division by p is allowed (coefficients live in Q_p),
//! which is what the relative-precision model buys.

use crate::error::{Error, Result};
use num_rational::Ratio;
use std::cmp::Ordering;
use std::fmt;

pub type Rational = Ratio<i64>;

/// Largest unit modulus we allow; p^n must stay below this.
const UNIT_CAP: u128 = 1 << 63;

fn checked_pow(p: u64, n: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..n {
        acc = acc
            .checked_mul(p as u128)
            .filter(|&x| x < UNIT_CAP)
            .unwrap_or_else(|| panic!("p^n overflow: {p}^{n} exceeds the unit cap"));
    }
    acc
}

/// Largest n with p^n below the unit cap.
pub(crate) fn max_digits(p: u64) -> u32 {
    let mut n = 0u32;
    let mut acc: u128 = 1;
    while acc.saturating_mul(p as u128) < UNIT_CAP {
        acc *= p as u128;
        n += 1;
    }
    n
}

fn val_of(mut x: u128, p: u64) -> u32 {
    debug_assert!(x != 0);
    let mut v = 0;
    while x.is_multiple_of(p as u128) {
        x /= p as u128;
        v += 1;
    }
    v
}

/// Modular inverse of `a` mod `m` (gcd(a, m) = 1), by extended Euclid.
fn inv_mod(a: u128, m: u128) -> u128 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        let tmp_r = old_r - q * r;
        old_r = r;
        r = tmp_r;
        let tmp_s = old_s - q * s;
        old_s = s;
        s = tmp_s;
    }
    debug_assert_eq!(old_r, 1, "inverse of non-unit");
    old_s.rem_euclid(m as i128) as u128
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    /// Certified ≡ 0 mod p^abs.
    Zero { abs: i64 },
    /// u·p^v + O(p^{v+n}); u in [1, p^n), gcd(u, p) = 1, n ≥ 1.
    Unit { v: i64, u: u128, n: u32 },
}

/// An exact p-adic number at tracked relative precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    p: u64,
    repr: Repr,
}

impl PadicScalar {
    /// The exact zero certified mod p^abs.
    pub fn zero(p: u64, abs: i64) -> Self {
        PadicScalar { p, repr: Repr::Zero { abs } }
    }

    pub fn one(p: u64, n: u32) -> Self {
        Self::from_unit_parts(p, 0, 1, n)
    }

    /// Build u·p^v at relative precision n, normalizing the unit.
    pub fn from_unit_parts(p: u64, v: i64, u: u128, n: u32) -> Self {
        assert!(n >= 1, "relative precision must be at least 1");
        let m = checked_pow(p, n);
        let u = u % m;
        assert!(u != 0 && !u.is_multiple_of(p as u128), "unit residue must be coprime to p");
        PadicScalar { p, repr: Repr::Unit { v, u, n } }
    }

    /// An integer (or p-power multiple) viewed at absolute precision `abs`.
    pub fn from_int(p: u64, value: i128, abs: u32) -> Self {
        if value == 0 {
            return Self::zero(p, abs as i64);
        }
        let neg = value < 0;
        let mut mag = value.unsigned_abs();
        let mut v = 0i64;
        while mag.is_multiple_of(p as u128) {
            mag /= p as u128;
            v += 1;
        }
        if v >= abs as i64 {
            return Self::zero(p, abs as i64);
        }
        let n = (abs as i64 - v) as u32;
        let m = checked_pow(p, n);
        let mut u = mag % m;
        if neg {
            u = (m - u) % m;
        }
        PadicScalar { p, repr: Repr::Unit { v, u, n } }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    /// Valuation; None for the certified zero.
    pub fn valuation(&self) -> Option<i64> {
        match self.repr {
            Repr::Zero { .. } => None,
            Repr::Unit { v, .. } => Some(v),
        }
    }

    /// Unit residue in [1, p^n); None for zero.
    pub fn unit(&self) -> Option<u128> {
        match self.repr {
            Repr::Zero { .. } => None,
            Repr::Unit { u, .. } => Some(u),
        }
    }

    /// Relative precision in p-digits (0 for the certified zero).
    pub fn rel_prec(&self) -> u32 {
        match self.repr {
            Repr::Zero { .. } => 0,
            Repr::Unit { n, .. } => n,
        }
    }

    /// Absolute precision: the scalar is known mod p^abs_prec.
    pub fn abs_prec(&self) -> i64 {
        match self.repr {
            Repr::Zero { abs } => abs,
            Repr::Unit { v, n, .. } => v + n as i64,
        }
    }

    /// |x| as an exact norm value; the certified zero maps to Zero.
    pub fn norm(&self) -> NormValue {
        match self.repr {
            Repr::Zero { .. } => NormValue::Zero,
            Repr::Unit { v, .. } => NormValue::from_exponent(Rational::from_integer(v)),
        }
    }

    /// Truncate to absolute precision `abs` (no-op if already coarser).
    pub fn truncate_abs(&self, abs: i64) -> Self {
        match self.repr {
            Repr::Zero { abs: a } => Self::zero(self.p, a.min(abs)),
            Repr::Unit { v, u, n } => {
                if v >= abs {
                    Self::zero(self.p, abs)
                } else {
                    let n2 = ((v + n as i64).min(abs) - v) as u32;
                    let u2 = u % checked_pow(self.p, n2);
                    if u2 == 0 {
                        // cannot happen for coprime u with n2 >= 1
                        Self::zero(self.p, abs)
                    } else {
                        PadicScalar { p: self.p, repr: Repr::Unit { v, u: u2, n: n2 } }
                    }
                }
            }
        }
    }

    /// True when both scalars agree modulo the coarser absolute precision.
    pub fn agrees_with(&self, other: &Self) -> bool {
        if self.p != other.p {
            return false;
        }
        let abs = self.abs_prec().min(other.abs_prec());
        self.truncate_abs(abs) == other.truncate_abs(abs)
    }

    fn require_same_prime(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_same_prime(other)?;
        let p = self.p;
        let out = match (&self.repr, &other.repr) {
            (Repr::Zero { abs: a }, Repr::Zero { abs: b }) => Self::zero(p, *(a.min(b))),
            (Repr::Zero { abs }, Repr::Unit { v, u, n }) | (Repr::Unit { v, u, n }, Repr::Zero { abs }) => {
                if *v >= *abs {
                    Self::zero(p, *abs)
                } else {
                    let a = (*abs).min(v + *n as i64);
                    PadicScalar {
                        p,
                        repr: Repr::Unit { v: *v, u: u % checked_pow(p, (a - v) as u32), n: (a - v) as u32 },
                    }
                }
            }
            (Repr::Unit { v: v1, u: u1, n: n1 }, Repr::Unit { v: v2, u: u2, n: n2 }) => {
                let (v1, u1, n1, v2, u2, n2) = if v1 <= v2 {
                    (*v1, *u1, *n1, *v2, *u2, *n2)
                } else {
                    (*v2, *u2, *n2, *v1, *u1, *n1)
                };
                let abs = (v1 + n1 as i64).min(v2 + n2 as i64);
                if v2 >= abs {
                    // the higher-valuation summand is invisible at shared precision
                    let n = (abs - v1) as u32;
                    PadicScalar { p, repr: Repr::Unit { v: v1, u: u1 % checked_pow(p, n), n } }
                } else {
                    let n = (abs - v1) as u32;
                    let m = checked_pow(p, n);
                    let shifted = (u2 % checked_pow(p, (abs - v2) as u32))
                        .checked_mul(checked_pow(p, (v2 - v1) as u32))
                        .expect("shift overflow")
                        % m;
                    let s = (u1 % m + shifted) % m;
                    if s == 0 {
                        Self::zero(p, abs)
                    } else {
                        let w = val_of(s, p);
                        let v = v1 + w as i64;
                        let n = (abs - v) as u32;
                        PadicScalar { p, repr: Repr::Unit { v, u: (s / checked_pow(p, w)) % checked_pow(p, n), n } }
                    }
                }
            }
        };
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        match self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Unit { v, u, n } => {
                let m = checked_pow(self.p, n);
                PadicScalar { p: self.p, repr: Repr::Unit { v, u: (m - u) % m, n } }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.require_same_prime(other)?;
        let p = self.p;
        let out = match (&self.repr, &other.repr) {
            (Repr::Zero { abs: a }, Repr::Zero { abs: b }) => Self::zero(p, a + b),
            (Repr::Zero { abs }, Repr::Unit { v, .. }) | (Repr::Unit { v, .. }, Repr::Zero { abs }) => {
                Self::zero(p, abs + v)
            }
            (Repr::Unit { v: v1, u: u1, n: n1 }, Repr::Unit { v: v2, u: u2, n: n2 }) => {
                let n = (*n1).min(*n2);
                let m = checked_pow(p, n);
                PadicScalar { p, repr: Repr::Unit { v: v1 + v2, u: (u1 % m) * (u2 % m) % m, n } }
            }
        };
        Ok(out)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.require_same_prime(other)?;
        let p = self.p;
        match (&self.repr, &other.repr) {
            (_, Repr::Zero { abs }) => Err(Error::DivisionByZeroAtPrecision { abs_prec: *abs }),
            (Repr::Zero { abs }, Repr::Unit { v, .. }) => Ok(Self::zero(p, abs - v)),
            (Repr::Unit { v: v1, u: u1, n: n1 }, Repr::Unit { v: v2, u: u2, n: n2 }) => {
                let n = (*n1).min(*n2);
                let m = checked_pow(p, n);
                let inv = inv_mod(u2 % m, m);
                Ok(PadicScalar { p, repr: Repr::Unit { v: v1 - v2, u: (u1 % m) * inv % m, n } })
            }
        }
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Self> {
        Self::one(self.p, self.rel_prec().max(1)).div(self)
    }

    pub fn mul_int(&self, k: i128) -> Self {
        let prec = (self.rel_prec().max(1) + 12).min(max_digits(self.p));
        let kk = PadicScalar::from_int(self.p, k, prec);
        self.mul(&kk).expect("same prime")
    }

    /// Binomial coefficient C(a, k) = a(a−1)…(a−k+1)/k! for a p-adic integer a.
    ///
    /// Exact at the propagated precision; satisfies val C(a,k) ≥ val(a) − val(k)
    /// for k ≥ 1.
    pub fn binom(a: &Self, k: u64) -> Result<Self> {
        let p = a.p;
        if let Some(v) = a.valuation() {
            if v < 0 {
                return Err(Error::InvalidArgument("binom requires a p-adic integer".into()));
            }
        }
        if k == 0 {
            // C(a, 0) = 1 exactly, whatever is known about a
            return Ok(Self::one(p, max_digits(p)));
        }
        // work at a precision wide enough to absorb the k! division
        let e_k: i64 = {
            let mut e = 0i64;
            let mut q = p as u128;
            while q <= k as u128 {
                e += (k as u128 / q) as i64;
                q *= p as u128;
            }
            e
        };
        let work = (a.abs_prec() + e_k + 2).clamp(1, max_digits(p) as i64);
        let mut num = Self::one(p, work.max(1) as u32);
        for i in 0..k {
            let ai = a.sub(&Self::from_int(p, i as i128, work.max(1) as u32))?;
            num = num.mul(&ai)?;
        }
        let mut fact = Self::one(p, work.max(1) as u32);
        for i in 1..=k {
            fact = fact.mul(&Self::from_int(p, i as i128, work.max(1) as u32))?;
        }
        let out = num.div(&fact)?;
        if out.is_zero() && out.abs_prec() <= 0 {
            return Err(Error::PrecisionExhausted(format!(
                "binomial C(a,{k}): k! division consumed all digits"
            )));
        }
        Ok(out)
    }

    /// The row C(a, 0), …, C(a, max_k), sharing partial products so the whole
    /// row costs O(max_k) ring operations.
    pub fn binom_row(a: &Self, max_k: u64) -> Result<Vec<Self>> {
        let p = a.p;
        if a.valuation().is_some_and(|v| v < 0) {
            return Err(Error::InvalidArgument("binom requires a p-adic integer".into()));
        }
        let e_max: i64 = {
            let mut e = 0i64;
            let mut q = p as u128;
            while q <= max_k.max(1) as u128 {
                e += (max_k as u128 / q) as i64;
                q *= p as u128;
            }
            e
        };
        let work = (a.abs_prec() + e_max + 2).clamp(1, max_digits(p) as i64) as u32;
        let mut out = Vec::with_capacity(max_k as usize + 1);
        out.push(Self::one(p, max_digits(p)));
        let mut num = Self::one(p, work);
        let mut fact = Self::one(p, work);
        for k in 1..=max_k {
            let factor = a.sub(&Self::from_int(p, (k - 1) as i128, work))?;
            num = num.mul(&factor)?;
            fact = fact.mul(&Self::from_int(p, k as i128, work))?;
            out.push(num.div(&fact)?);
        }
        Ok(out)
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.repr {
            Repr::Zero { abs } => write!(f, "O({}^{})", self.p, abs),
            Repr::Unit { v, u, n } => write!(f, "{}*{}^{} + O({}^{})", u, self.p, v, self.p, v + n as i64),
        }
    }
}

/// An exact value of a multiplicative norm: 0 or p^(−e) with e rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NormValue {
    Zero,
    /// p^(−e)
    Val { e: Rational },
}

impl NormValue {
    pub fn from_exponent(e: Rational) -> Self {
        NormValue::Val { e }
    }

    pub fn one() -> Self {
        NormValue::Val { e: Rational::from_integer(0) }
    }

    pub fn exponent(&self) -> Option<Rational> {
        match self {
            NormValue::Zero => None,
            NormValue::Val { e } => Some(*e),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (NormValue::Zero, _) | (_, NormValue::Zero) => NormValue::Zero,
            (NormValue::Val { e: a }, NormValue::Val { e: b }) => NormValue::Val { e: a + b },
        }
    }

    pub fn max(&self, other: &Self) -> Self {
        match self.cmp_norm(other) {
            Ordering::Less => other.clone(),
            _ => self.clone(),
        }
    }

    pub fn pow(&self, k: i64) -> Self {
        match self {
            NormValue::Zero => {
                assert!(k > 0, "0^k needs k > 0");
                NormValue::Zero
            }
            NormValue::Val { e } => NormValue::Val { e: e * Rational::from_integer(k) },
        }
    }

    /// Total order: Zero is smallest; otherwise reverse order of exponents.
    pub fn cmp_norm(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NormValue::Zero, NormValue::Zero) => Ordering::Equal,
            (NormValue::Zero, _) => Ordering::Less,
            (_, NormValue::Zero) => Ordering::Greater,
            (NormValue::Val { e: a }, NormValue::Val { e: b }) => b.cmp(a),
        }
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormValue::Zero => write!(f, "0"),
            NormValue::Val { e } => write!(f, "p^(-{})", e),
        }
    }
}

/// Exponent e with 0 < e < 1 denoting the norm parameter ρ = p^(−e).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RhoExponent {
    e: Rational,
}

impl RhoExponent {
    pub fn new(e: Rational) -> Result<Self> {
        if e <= Rational::from_integer(0) || e >= Rational::from_integer(1) {
            return Err(Error::InvalidArgument(format!(
                "rho exponent must satisfy 0 < e < 1, got {e}"
            )));
        }
        Ok(RhoExponent { e })
    }

    pub fn from_parts(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidArgument("rho exponent with zero denominator".into()));
        }
        Self::new(Rational::new(num, den))
    }

    pub fn exponent(&self) -> Rational {
        self.e
    }

    /// ρ as a norm value.
    pub fn rho(&self) -> NormValue {
        NormValue::Val { e: self.e }
    }

    /// ρ^k as a norm value (k may be negative).
    pub fn rho_pow(&self, k: i64) -> NormValue {
        NormValue::Val { e: self.e * Rational::from_integer(k) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(p: u64, value: i128, abs: u32) -> PadicScalar {
        PadicScalar::from_int(p, value, abs)
    }

    #[test]
    fn add_integers() {
        // 1 + 2 = 3 = unit 1 at v=1 for p=3
        let s = sc(3, 1, 6).add(&sc(3, 2, 6)).unwrap();
        assert_eq!(s.valuation(), Some(1));
        assert_eq!(s.unit(), Some(1));
    }

    #[test]
    fn mul_valuations_add() {
        let x = PadicScalar::from_unit_parts(2, -1, 1, 5);
        let y = PadicScalar::from_unit_parts(2, 3, 1, 5);
        let z = x.mul(&y).unwrap();
        assert_eq!(z.valuation(), Some(2));
        assert_eq!(z.unit(), Some(1));
    }

    #[test]
    fn div_by_three_mod_sixteen() {
        // extended-gcd oracle: 3·11 = 33 ≡ 1 mod 16
        let z = sc(2, 1, 4).div(&sc(2, 3, 4)).unwrap();
        assert_eq!(z.valuation(), Some(0));
        assert_eq!(z.unit(), Some(11));
        assert_eq!(z.rel_prec(), 4);
    }

    #[test]
    fn cancellation_certifies_zero() {
        let x = sc(5, 7, 6);
        let z = x.sub(&x).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.abs_prec(), 6);
    }

    #[test]
    fn add_with_valuation_cancellation() {
        // (1 + 2) at p=2: 3 is a unit; (1 + 1) = 2 loses one digit of relative precision
        let s = sc(2, 1, 5).add(&sc(2, 1, 5)).unwrap();
        assert_eq!(s.valuation(), Some(1));
        assert_eq!(s.abs_prec(), 5);
        assert_eq!(s.rel_prec(), 4);
    }

    #[test]
    fn binom_examples() {
        // C(a, 0) = 1
        let a = sc(2, 5, 6);
        assert_eq!(PadicScalar::binom(&a, 0).unwrap().unit(), Some(1));
        // C(2, 1) = 2
        let b = PadicScalar::binom(&sc(2, 2, 6), 1).unwrap();
        assert_eq!(b.valuation(), Some(1));
        assert_eq!(b.unit(), Some(1));
        // C(−1, 2) = (−1)(−2)/2 = 1, checked mod 2^4
        let c = PadicScalar::binom(&sc(2, -1, 6), 2).unwrap();
        assert_eq!(c.truncate_abs(4), sc(2, 1, 4));
    }

    #[test]
    fn binom_pascal_rule() {
        let mut rng: u64 = 0x9e3779b97f4a7c15;
        let mut next = move || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            rng
        };
        for &p in &[2u64, 3, 5] {
            for _ in 0..60 {
                let a = sc(p, (next() % 10_000) as i128, 10);
                let am1 = a.sub(&PadicScalar::one(p, 12)).unwrap();
                for k in 1..=8u64 {
                    let lhs = PadicScalar::binom(&a, k).unwrap();
                    let rhs = PadicScalar::binom(&am1, k)
                        .unwrap()
                        .add(&PadicScalar::binom(&am1, k - 1).unwrap())
                        .unwrap();
                    assert!(lhs.agrees_with(&rhs), "Pascal fails p={p} a={a} k={k}: {lhs} vs {rhs}");
                }
            }
        }
    }

    #[test]
    fn binom_valuation_estimate() {
        // val C(a,k) ≥ val(a) − val(k) for k ≥ 1
        let mut rng: u64 = 0xdeadbeefcafe1234;
        let mut next = move || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            rng
        };
        for &p in &[2u64, 3, 5] {
            let mut cases = 0;
            while cases < 500 {
                let raw = (next() % 50_000) as i128;
                if raw == 0 {
                    continue;
                }
                let a = sc(p, raw, 14);
                let k = 1 + (next() % 20) as u64;
                let c = PadicScalar::binom(&a, k).unwrap();
                let va = a.valuation().unwrap();
                let vk = {
                    let mut v = 0i64;
                    let mut kk = k;
                    while kk % p == 0 {
                        kk /= p;
                        v += 1;
                    }
                    v
                };
                let bound = va - vk;
                let ok = match c.valuation() {
                    Some(vc) => vc >= bound,
                    None => c.abs_prec() >= bound,
                };
                assert!(ok, "estimate fails p={p} a={a} k={k} C={c}");
                cases += 1;
            }
        }
    }

    #[test]
    fn norm_value_arithmetic() {
        let half = NormValue::from_exponent(Rational::new(1, 2));
        assert_eq!(half.mul(&half), NormValue::from_exponent(Rational::from_integer(1)));
        let three = NormValue::from_exponent(Rational::from_integer(3));
        assert_eq!(NormValue::Zero.max(&three), three);
        let eighth = NormValue::from_exponent(Rational::new(1, 8));
        assert_eq!(eighth.pow(9), NormValue::from_exponent(Rational::new(9, 8)));
        // total order: p^0 > p^(-1) > 0
        assert_eq!(NormValue::one().cmp_norm(&three), Ordering::Greater);
        assert_eq!(three.cmp_norm(&NormValue::Zero), Ordering::Greater);
    }

    #[test]
    fn scalar_ring_axioms_random() {
        let mut rng: u64 = 42;
        let mut next = move || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            rng
        };
        for &p in &[2u64, 3, 5] {
            for _ in 0..200 {
                let x = sc(p, (next() % 9973) as i128 - 4986, 8);
                let y = sc(p, (next() % 9973) as i128 - 4986, 8);
                let z = sc(p, (next() % 9973) as i128 - 4986, 8);
                let assoc_l = x.add(&y).unwrap().add(&z).unwrap();
                let assoc_r = x.add(&y.add(&z).unwrap()).unwrap();
                assert!(assoc_l.agrees_with(&assoc_r));
                let dist_l = x.mul(&y.add(&z).unwrap()).unwrap();
                let dist_r = x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap();
                assert!(dist_l.agrees_with(&dist_r), "distributivity p={p}: {dist_l} vs {dist_r}");
                let massoc_l = x.mul(&y).unwrap().mul(&z).unwrap();
                let massoc_r = x.mul(&y.mul(&z).unwrap()).unwrap();
                assert!(massoc_l.agrees_with(&massoc_r));
            }
        }
    }

    #[test]
    fn rho_exponent_bounds() {
        assert!(RhoExponent::from_parts(1, 2).is_ok());
        assert!(RhoExponent::from_parts(0, 2).is_err());
        assert!(RhoExponent::from_parts(3, 2).is_err());
        assert!(RhoExponent::from_parts(1, 1).is_err());
    }
}
