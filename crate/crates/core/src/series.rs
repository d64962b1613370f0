//! Truncated one-variable coefficient rings: windowed Laurent polynomials
//! standing for elements of o[[T]], the p-adic completion of o((T)), its
//! overconvergent subrings, and the Robba ring, with the Frobenius
//! φ(T) = (1+T)^p − 1, the Γ-action γ_a(T) = (1+T)^a − 1, and the étale
//! decomposition R = ⊕_{i<p^c} (1+T)^i φ^c(R).
//!
//! Window semantics: a series carries a half-open exponent window [lo, hi).
//! Coefficients below lo are certified ≡ 0 mod p^prec, coefficients on the
//! window are the stored scalars, and coefficients at or above hi are not
//! defined. Every operation computes the largest window on which its output
//! is determined by the inputs under this convention and cuts support there.

use crate::error::{Error, Result};
use crate::padic::{max_digits, PadicScalar, Rational};
use std::collections::BTreeMap;
use std::fmt;

/// Sentinel for "no upper truncation": the element is exact above its support.
pub const WINDOW_INF: i64 = i64::MAX / 4;

fn wadd(a: i64, b: i64) -> i64 {
    if a >= WINDOW_INF || b >= WINDOW_INF {
        WINDOW_INF
    } else {
        (a + b).min(WINDOW_INF)
    }
}

fn wmul(a: i64, b: i64) -> i64 {
    if a >= WINDOW_INF {
        WINDOW_INF
    } else {
        a.saturating_mul(b).min(WINDOW_INF)
    }
}

/// Declared analyticity class of a truncation, ordered by inclusion of the
/// rings they model (Iwasawa ⊂ OEdagger ⊂ {OE, Edagger}, Edagger ⊂ Robba).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AnalyticityClass {
    Iwasawa,
    OEdagger,
    OE,
    Edagger,
    Robba,
}

impl AnalyticityClass {
    /// Least upper bound in the inclusion order, when one exists.
    pub fn join(self, other: Self) -> Result<Self> {
        use AnalyticityClass::*;
        if self == other {
            return Ok(self);
        }
        let leq = |a: Self, b: Self| -> bool {
            matches!(
                (a, b),
                (Iwasawa, _) | (OEdagger, OE) | (OEdagger, Edagger) | (OEdagger, Robba) | (Edagger, Robba)
            )
        };
        if leq(self, other) {
            Ok(other)
        } else if leq(other, self) {
            Ok(self)
        } else {
            Err(Error::CertificateViolation(format!(
                "no common analyticity class above {self:?} and {other:?}"
            )))
        }
    }

    /// val ≥ 0 constraint on coefficients.
    pub fn integral(self) -> bool {
        matches!(self, AnalyticityClass::Iwasawa | AnalyticityClass::OEdagger | AnalyticityClass::OE)
    }
}

/// Window-verifiable certificate: the class tag plus an optional declared
/// inner-radius exponent for the dagger/Robba classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Certificate {
    pub class: AnalyticityClass,
    pub radius: Option<Rational>,
}

impl Certificate {
    pub fn plain(class: AnalyticityClass) -> Self {
        Certificate { class, radius: None }
    }

    pub fn join(self, other: Self) -> Result<Self> {
        let class = self.class.join(other.class)?;
        let radius = match (self.radius, other.radius) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Ok(Certificate { class, radius })
    }
}

/// A windowed Laurent polynomial over exact p-adic scalars.
#[derive(Clone, Debug)]
pub struct LaurentSeries {
    p: u64,
    /// Absolute precision floor: absent coefficients are certified ≡ 0 mod p^prec.
    prec: i64,
    lo: i64,
    hi: i64,
    coeffs: BTreeMap<i64, PadicScalar>,
    cert: Certificate,
}

impl LaurentSeries {
    pub fn zero_on(p: u64, prec: i64, class: AnalyticityClass, lo: i64, hi: i64) -> Self {
        LaurentSeries { p, prec, lo, hi, coeffs: BTreeMap::new(), cert: Certificate::plain(class) }
    }

    pub fn constant(p: u64, c: PadicScalar, prec: i64, class: AnalyticityClass) -> Self {
        let mut s = Self::zero_on(p, prec, class, 0, WINDOW_INF);
        if !c.is_zero() {
            s.coeffs.insert(0, c);
            s.lo = 0;
        }
        s
    }

    pub fn one(p: u64, prec: i64, class: AnalyticityClass) -> Self {
        Self::constant(p, PadicScalar::one(p, prec.max(1) as u32), prec, class)
    }

    /// Exact monomial T^e.
    pub fn monomial(p: u64, e: i64, prec: i64, class: AnalyticityClass) -> Self {
        let mut s = Self::zero_on(p, prec, class, e.min(0), WINDOW_INF);
        s.coeffs.insert(e, PadicScalar::one(p, prec.max(1) as u32));
        s
    }

    /// Build from integer terms; window defaults to [min(support,0), WINDOW_INF).
    pub fn from_int_terms(p: u64, prec: i64, class: AnalyticityClass, terms: &[(i64, i128)]) -> Self {
        let mut s = Self::zero_on(p, prec, class, 0, WINDOW_INF);
        for &(e, v) in terms {
            let c = PadicScalar::from_int(p, v, (prec.max(1) as u32 + 4).min(max_digits(p)));
            if !c.is_zero() {
                s.coeffs.insert(e, c);
            }
        }
        if let Some((&min_e, _)) = s.coeffs.iter().next() {
            s.lo = min_e.min(0);
        }
        s
    }

    /// Build from explicit scalar coefficients.
    pub fn from_coeffs(
        p: u64,
        prec: i64,
        cert: Certificate,
        lo: i64,
        hi: i64,
        coeffs: BTreeMap<i64, PadicScalar>,
    ) -> Result<Self> {
        let mut s = LaurentSeries { p, prec, lo, hi, coeffs, cert };
        s.drop_zeros();
        if s.coeffs.keys().next().is_some_and(|&e| e < lo)
            || s.coeffs.keys().next_back().is_some_and(|&e| e >= hi)
        {
            return Err(Error::InvalidArgument("support outside the declared window".into()));
        }
        s.class_check()?;
        Ok(s)
    }

    pub fn with_window(mut self, lo: i64, hi: i64) -> Self {
        self.lo = lo;
        self.hi = hi;
        self.coeffs.retain(|&e, _| e >= lo && e < hi);
        self
    }

    pub fn with_class(mut self, cert: Certificate) -> Self {
        self.cert = cert;
        self
    }

    pub fn prime(&self) -> u64 {
        self.p
    }
    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }
    pub fn prec_floor(&self) -> i64 {
        self.prec
    }
    pub fn certificate(&self) -> Certificate {
        self.cert
    }
    pub fn support(&self) -> impl Iterator<Item = (&i64, &PadicScalar)> {
        self.coeffs.iter()
    }

    pub fn is_zero_at_prec(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient at exponent e; None when e is above the window.
    pub fn coeff(&self, e: i64) -> Option<PadicScalar> {
        if e >= self.hi {
            return None;
        }
        Some(self.coeffs.get(&e).cloned().unwrap_or_else(|| PadicScalar::zero(self.p, self.prec)))
    }

    /// Tight lower window edge: below the first stored exponent everything is
    /// certified zero, so the support minimum is as good a lower bound as lo.
    fn effective_lo(&self) -> i64 {
        self.coeffs.keys().next().map_or(self.hi, |&e| e).clamp(self.lo, self.hi)
    }

    /// Minimal stored valuation (precision floor when empty), capped at 0.
    fn min_val(&self) -> i64 {
        self.coeffs
            .values()
            .filter_map(|c| c.valuation())
            .min()
            .unwrap_or(self.prec)
            .min(0)
    }

    fn drop_zeros(&mut self) {
        self.coeffs.retain(|_, c| !c.is_zero());
    }

    /// Fold `term` into the coefficient at `e`, keeping certified zeros so
    /// their precision caps survive until `normalized` accounts for them.
    fn insert_add(map: &mut BTreeMap<i64, PadicScalar>, e: i64, term: PadicScalar) -> Result<()> {
        match map.remove(&e) {
            Some(acc) => {
                map.insert(e, acc.add(&term)?);
            }
            None => {
                map.insert(e, term);
            }
        }
        Ok(())
    }

    /// Validate the stored truncation against the declared certificate.
    pub fn class_check(&self) -> Result<()> {
        use AnalyticityClass::*;
        match self.cert.class {
            Iwasawa => {
                if self.coeffs.keys().next().is_some_and(|&e| e < 0) {
                    return Err(Error::CertificateViolation(
                        "Iwasawa class requires exponents >= 0".into(),
                    ));
                }
                self.check_integral()?;
            }
            OE => self.check_integral()?,
            OEdagger => {
                self.check_integral()?;
                if let Some(e) = self.cert.radius {
                    for (&n, c) in &self.coeffs {
                        if n < 0 {
                            if let Some(v) = c.valuation() {
                                let lhs = Rational::from_integer(v) + Rational::from_integer(n) * e;
                                if lhs < Rational::from_integer(0) {
                                    return Err(Error::CertificateViolation(format!(
                                        "overconvergence bound fails at T^{n}: valuation {v}"
                                    )));
                                }
                            }
                        }
                    }
                }
            }
            Edagger | Robba => {}
        }
        Ok(())
    }

    fn check_integral(&self) -> Result<()> {
        for (&e, c) in &self.coeffs {
            if let Some(v) = c.valuation() {
                if v < 0 {
                    return Err(Error::CertificateViolation(format!(
                        "integral class violated at T^{e}: valuation {v}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn require_compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        Ok(())
    }

    /// True when the two truncations agree coefficientwise, modulo the coarser
    /// precision floor, on the intersection of their windows.
    pub fn agrees_with(&self, other: &Self) -> bool {
        if self.p != other.p {
            return false;
        }
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if hi <= lo {
            return true; // vacuous: no shared window
        }
        let floor = self.prec.min(other.prec);
        let mut exps: Vec<i64> = Vec::new();
        exps.extend(self.coeffs.range(lo..hi).map(|(&e, _)| e));
        exps.extend(other.coeffs.range(lo..hi).map(|(&e, _)| e));
        exps.sort_unstable();
        exps.dedup();
        for e in exps {
            let a = self.coeff(e).unwrap_or_else(|| PadicScalar::zero(self.p, floor));
            let b = other.coeff(e).unwrap_or_else(|| PadicScalar::zero(self.p, floor));
            if !a.truncate_abs(floor).agrees_with(&b.truncate_abs(floor)) {
                return false;
            }
        }
        true
    }

    /// Width of the overlap of defined windows (tests use this to reject
    /// vacuous comparisons).
    pub fn overlap_width(&self, other: &Self) -> i64 {
        (self.hi.min(other.hi) - self.lo.max(other.lo)).max(0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_compatible(other)?;
        let lo = self.lo.min(other.lo);
        let hi = self.hi.min(other.hi);
        if hi <= lo {
            return Err(Error::WindowUnderflow(format!(
                "add: windows [{},{}) and [{},{}) leave nothing",
                self.lo, self.hi, other.lo, other.hi
            )));
        }
        let cert = self.cert.join(other.cert)?;
        let prec = self.prec.min(other.prec);
        let mut coeffs = BTreeMap::new();
        let mut exps: Vec<i64> = self.coeffs.range(..hi).map(|(&e, _)| e).collect();
        exps.extend(other.coeffs.range(..hi).map(|(&e, _)| e));
        exps.sort_unstable();
        exps.dedup();
        for e in exps {
            let a = self.coeffs.get(&e).cloned().unwrap_or_else(|| PadicScalar::zero(self.p, self.prec));
            let b = other.coeffs.get(&e).cloned().unwrap_or_else(|| PadicScalar::zero(other.p, other.prec));
            coeffs.insert(e, a.add(&b)?);
        }
        Ok(LaurentSeries { p: self.p, prec, lo, hi, coeffs, cert }.normalized())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &PadicScalar) -> Result<Self> {
        let mut out = self.clone();
        if k.is_zero() {
            out.coeffs.clear();
            return Ok(out);
        }
        out.prec = wadd(self.prec, k.valuation().unwrap_or(0).min(0));
        let mut coeffs = BTreeMap::new();
        for (&e, c) in &self.coeffs {
            let s = c.mul(k)?;
            if !s.is_zero() {
                coeffs.insert(e, s);
            }
        }
        out.coeffs = coeffs;
        Ok(out)
    }

    /// Shift exponents by m (multiplication by the exact monomial T^m).
    pub fn shift(&self, m: i64) -> Self {
        let mut out = self.clone();
        out.lo = wadd(self.lo, m);
        out.hi = wadd(self.hi, m);
        out.coeffs = self.coeffs.iter().map(|(&e, c)| (e + m, c.clone())).collect();
        out
    }

    /// Product, with the truncation rule window [lo1+lo2, min(lo1+hi2, lo2+hi1))
    /// computed on support-tight lower edges.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.require_compatible(other)?;
        let lo1 = self.effective_lo();
        let lo2 = other.effective_lo();
        let lo = wadd(lo1, lo2);
        let hi = wadd(lo1, other.hi).min(wadd(lo2, self.hi));
        let cert = self.cert.join(other.cert)?;
        let prec = wadd(self.prec, other.min_val()).min(wadd(other.prec, self.min_val()));
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            // a certified zero factor: the product is zero wherever defined
            let (zlo, zhi) = if self.hi >= WINDOW_INF && other.hi >= WINDOW_INF {
                (0, WINDOW_INF)
            } else if hi > lo {
                (lo.min(hi - 1), hi)
            } else {
                (hi - 1, hi)
            };
            return Ok(Self::zero_on(self.p, prec, cert.class, zlo, zhi).with_class(cert));
        }
        if hi <= lo {
            return Err(Error::WindowUnderflow(format!("mul: product window [{lo},{hi}) is empty")));
        }
        let mut coeffs: BTreeMap<i64, PadicScalar> = BTreeMap::new();
        for (&e1, c1) in &self.coeffs {
            for (&e2, c2) in &other.coeffs {
                let e = e1 + e2;
                if e >= hi {
                    continue;
                }
                Self::insert_add(&mut coeffs, e, c1.mul(c2)?)?;
            }
        }
        Ok(LaurentSeries { p: self.p, prec, lo, hi, coeffs, cert }.normalized())
    }

    /// Clip support to the window and drop coefficients below the floor.
    fn normalized(mut self) -> Self {
        let (lo, hi) = (self.lo, self.hi);
        for (&e, c) in &self.coeffs {
            if e >= lo && e < hi && c.is_zero() {
                // cancellation certified only up to abs_prec: lower the floor
                self.prec = self.prec.min(c.abs_prec());
            }
        }
        let prec = self.prec;
        self.coeffs.retain(|&e, c| {
            e >= lo && e < hi && !c.is_zero() && c.valuation().is_some_and(|v| v < prec)
        });
        self
    }

    /// Inverse of a series with an invertible leading term c·T^m·(1+h), where h
    /// has positive window valuation or positive p-valuation.
    pub fn invert(&self) -> Result<Self> {
        self.invert_to(None)
    }

    /// Like `invert`, but asking for the output window to extend to `want_hi`
    /// (honored fully when the input is exact above its support; otherwise
    /// clamped to what the input window determines).
    pub fn invert_to(&self, want_hi: Option<i64>) -> Result<Self> {
        if self.coeffs.is_empty() {
            return Err(Error::NotAUnit("zero series at precision".into()));
        }
        // pivot: smallest exponent among minimal-valuation terms
        let (pivot_e, pivot_c) = self
            .coeffs
            .iter()
            .min_by_key(|(&e, c)| (c.valuation().unwrap_or(i64::MAX), e))
            .map(|(&e, c)| (e, c.clone()))
            .unwrap();
        let pv = pivot_c.valuation().unwrap_or(0);
        match self.cert.class {
            AnalyticityClass::Iwasawa => {
                if pivot_e != 0 || pv != 0 {
                    return Err(Error::NotAUnit(format!(
                        "not a unit in the Iwasawa model (pivot T^{pivot_e}, valuation {pv})"
                    )));
                }
            }
            AnalyticityClass::OE | AnalyticityClass::OEdagger
                if pv != 0 => {
                    return Err(Error::NotAUnit(format!(
                        "not a unit in an integral model (minimal valuation {pv})"
                    )));
                }
            _ => {}
        }
        // everything below the pivot must be strictly dominated
        for (&e, c) in self.coeffs.range(..pivot_e) {
            let v = c.valuation().unwrap_or(i64::MAX);
            if v <= pv {
                return Err(Error::NotAUnit(format!(
                    "leading term not dominant: T^{e} has valuation {v} <= pivot valuation {pv}"
                )));
            }
        }
        let n_eff = (self.prec - pv).max(1);
        // h := self/(c·T^m) − 1
        let pivot_inv = pivot_c.inv()?;
        let mut h = self.shift(-pivot_e).scale(&pivot_inv)?;
        let one = Self::one(self.p, self.prec, self.cert.class).with_class(self.cert);
        h = h.sub(&one)?.normalized();

        let width = if self.hi >= WINDOW_INF { n_eff + 8 } else { (self.hi - self.lo).max(1) };
        let neg_reach = (pivot_e - self.effective_lo()).max(0);
        let out_lo = -pivot_e - n_eff * neg_reach;
        // an exact input whose correction part sits below the pivot has an
        // inverse supported in (−∞, −pivot]: no upper truncation needed
        let top_exp = self.coeffs.keys().next_back().copied().unwrap_or(pivot_e);
        let natural_hi = if self.hi >= WINDOW_INF {
            if top_exp <= pivot_e {
                WINDOW_INF
            } else {
                -pivot_e + width
            }
        } else {
            wadd(self.hi, -2 * pivot_e)
        };
        let out_hi = match want_hi {
            _ if natural_hi >= WINDOW_INF => WINDOW_INF,
            Some(w) if self.hi >= WINDOW_INF => w.max(natural_hi),
            Some(w) => w.min(natural_hi),
            None => natural_hi,
        };
        if out_hi <= out_lo {
            return Err(Error::WindowUnderflow("invert: output window is empty".into()));
        }
        // (1+h)^{-1} on the work window
        let w_lo = out_lo + pivot_e;
        let w_hi = wadd(out_hi, pivot_e);
        let mut acc = Self::one(self.p, self.prec, self.cert.class)
            .with_class(self.cert)
            .with_window(w_lo, w_hi);
        let mut pow = acc.clone();
        let neg_h = h.neg();
        let cap = n_eff + (w_hi.min(WINDOW_INF - 1) - w_lo).max(0) + n_eff * neg_reach + 8;
        for _ in 0..cap {
            if pow.coeffs.is_empty() || neg_h.coeffs.is_empty() {
                break;
            }
            pow = {
                let mut q = pow.mul(&neg_h)?;
                q.lo = w_lo;
                q.hi = w_hi;
                q.normalized()
            };
            if pow.coeffs.is_empty() {
                break;
            }
            let mut s = acc.add(&pow)?;
            s.lo = w_lo;
            s.hi = w_hi;
            acc = s;
        }
        let mut out = acc.shift(-pivot_e).scale(&pivot_inv)?;
        out.lo = out_lo;
        out.hi = out_hi;
        Ok(out.normalized())
    }

    /// Composition f∘g for g supported in exponents ≥ 1; negative exponents of
    /// f go through the inverse of g.
    pub fn subst(&self, g: &Self) -> Result<Self> {
        self.subst_with_inverse(g, None)
    }

    fn subst_with_inverse(&self, g: &Self, pre_inv: Option<&Self>) -> Result<Self> {
        self.require_compatible(g)?;
        if g.lo < 0 || g.coeffs.keys().next().is_some_and(|&e| e < 1) {
            return Err(Error::SubstitutionDiverges(format!(
                "substitution target must have window valuation >= 1 (window [{}, {}))",
                g.lo, g.hi
            )));
        }
        let cert = self.cert.join(g.cert)?;
        let v_g = g.coeffs.keys().next().copied().unwrap_or(1).max(1);
        // the undefined tail of f at exponents >= hi pollutes from hi·v_g upward
        let hi_cap = wmul(self.hi, v_g);
        let mut acc: Option<LaurentSeries> = None;
        // nonnegative exponents
        let mut pow = Self::one(self.p, self.prec, cert.class).with_class(cert);
        let mut cur = 0i64;
        for (&e, c) in self.coeffs.range(0..) {
            while cur < e {
                pow = pow.mul(g)?;
                cur += 1;
            }
            let term = pow.scale(c)?;
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term)?,
            });
        }
        // negative exponents through g^{-1}, inverted in the joined class and
        // wide enough that the needed powers still cover the output window
        if self.coeffs.keys().next().is_some_and(|&e| e < 0) {
            let deep = -self.coeffs.keys().next().copied().unwrap_or(0);
            let g_top = g.coeffs.keys().next_back().copied().unwrap_or(1);
            let base = if hi_cap >= WINDOW_INF { self.prec + 8 } else { hi_cap };
            let want = wadd(base, deep.saturating_mul(g_top) + 4);
            let g_inv = match pre_inv {
                Some(inv) => inv.clone().with_class(cert),
                None => g.clone().with_class(cert).invert_to(Some(want))?,
            };
            let mut pow = g_inv.clone();
            let mut cur = -1i64;
            for (&e, c) in self.coeffs.range(..0).rev() {
                while cur > e {
                    pow = pow.mul(&g_inv)?;
                    cur -= 1;
                }
                let term = pow.scale(c)?;
                acc = Some(match acc {
                    None => term,
                    Some(a) => a.add(&term)?,
                });
            }
        }
        let mut out = match acc {
            Some(a) => a,
            None => Self::zero_on(self.p, self.prec, cert.class, 0, hi_cap),
        };
        out.hi = out.hi.min(hi_cap);
        out.cert = cert;
        if out.hi <= out.lo {
            return Err(Error::WindowUnderflow("subst: output window is empty".into()));
        }
        Ok(out.normalized())
    }

    /// Exact polynomial (1+T)^k − 1 for an integer k ≥ 1; this is φ^c(T) when k = p^c.
    pub fn one_plus_t_pow_int(p: u64, k: u64, prec: i64) -> Self {
        let digits = (prec.max(1) as u32 + 2 + 64 - k.leading_zeros()).min(max_digits(p));
        let a = PadicScalar::from_int(p, k as i128, digits);
        let mut terms = BTreeMap::new();
        let row = PadicScalar::binom_row(&a, k).expect("integer binomial");
        for (n, c) in row.into_iter().enumerate().skip(1) {
            if !c.is_zero() {
                terms.insert(n as i64, c);
            }
        }
        LaurentSeries {
            p,
            prec: prec.max(1),
            lo: 0,
            hi: WINDOW_INF,
            coeffs: terms,
            cert: Certificate::plain(AnalyticityClass::Iwasawa),
        }
    }

    /// (1+T)^a − 1 for a p-adic integer a, truncated at T^width.
    pub fn one_plus_t_pow_scalar(a: &PadicScalar, width: i64, prec: i64) -> Result<Self> {
        let p = a.prime();
        if a.valuation().is_some_and(|v| v < 0) {
            return Err(Error::InvalidArgument("exponent must be a p-adic integer".into()));
        }
        let mut coeffs = BTreeMap::new();
        let row = PadicScalar::binom_row(a, (width.max(2) - 1) as u64)?;
        for (n, c) in row.into_iter().enumerate().skip(1) {
            if !c.is_zero() && c.valuation().is_some_and(|v| v < prec) {
                coeffs.insert(n as i64, c);
            }
        }
        Ok(LaurentSeries {
            p,
            prec: prec.max(1),
            lo: 0,
            hi: width.max(2),
            coeffs,
            cert: Certificate::plain(AnalyticityClass::Iwasawa),
        })
    }

    /// φ^c(f) = f((1+T)^{p^c} − 1). Injective on exact representatives.
    pub fn frobenius(&self, c: u32) -> Result<Self> {
        if c == 0 {
            return Ok(self.clone());
        }
        let mut k: u64 = 1;
        for _ in 0..c {
            k = k
                .checked_mul(self.p)
                .ok_or_else(|| Error::InvalidArgument("frobenius depth overflow".into()))?;
        }
        let phi_t = Self::one_plus_t_pow_int(self.p, k, self.prec);
        let cert = self.cert;
        // φ^c(T) is exact with its correction below the pivot, so its inverse
        // does not depend on the requested width and can be cached
        let pre_inv = if self.coeffs.keys().next().is_some_and(|&e| e < 0) {
            Some(phi_inverse_cached(self.p, k, self.prec)?)
        } else {
            None
        };
        Ok(self.subst_with_inverse(&phi_t, pre_inv.as_ref())?.with_class(cert))
    }

    /// γ_a(f) = f((1+T)^a − 1) for a ∈ Z_p^×.
    pub fn gamma_act(&self, a: &PadicScalar) -> Result<Self> {
        if a.prime() != self.p {
            return Err(Error::PrimeMismatch(a.prime(), self.p));
        }
        if a.valuation() != Some(0) {
            return Err(Error::InvalidArgument("gamma action needs a unit exponent".into()));
        }
        let span = if self.hi >= WINDOW_INF {
            self.coeffs.keys().next_back().map_or(2, |&e| e.max(1)) + self.prec + 4
        } else {
            self.hi - self.lo.min(0) + self.prec + 4
        };
        let g = Self::one_plus_t_pow_scalar(a, span.max(4), self.prec)?;
        let cert = self.cert;
        Ok(self.subst(&g)?.with_class(cert))
    }

    /// Decompose f = Σ_{i<p^c} (1+T)^i φ^c(r_i), returning (r_0, …, r_{p^c−1}).
    ///
    /// Negative exponents are cleared through T^{−m} = φ^c(T^{−m})·q(T)^m with
    /// q = φ^c(T)/T; the remaining polynomial is rewritten in u = 1+T
    /// (binomial transform), u-exponents are split by residue mod p^c,
    /// contracted by p^c, and rewritten back. Exact on the stored
    /// representative; the output window is the contraction
    /// [−m, ceil((hi+m)/p^c) − m) of the input window.
    ///
    /// Sensitivity to the undefined tail above hi: a tail term T^D of an
    /// integral-class element moves the output at exponent e by a quantity of
    /// valuation at least ceil((D+m−p^c(e+m))/(p^{c−1}(p−1))) − c, so outputs
    /// are honest mod p^N whenever the input window clears that bound.
    pub fn etale_decompose(&self, c: u32) -> Result<Vec<Self>> {
        if c == 0 {
            return Ok(vec![self.clone()]);
        }
        let p = self.p;
        let mut pc: i64 = 1;
        for _ in 0..c {
            pc = pc
                .checked_mul(p as i64)
                .ok_or_else(|| Error::InvalidArgument("decomposition depth overflow".into()))?;
        }
        // clear through the smallest exponent actually present: the result is
        // independent of the clearing depth and tighter m keeps the output
        // least sensitive to the truncation tail
        let m = (-self.coeffs.keys().next().copied().unwrap_or(0)).max(0);
        let hi = if self.hi >= WINDOW_INF {
            self.coeffs.keys().next_back().map_or(1, |&e| e + 1).max(1)
        } else {
            self.hi
        };
        let out_hi = div_ceil(hi + m, pc) - m;
        let out_lo = -m;
        if out_hi <= out_lo {
            return Err(Error::WindowUnderflow(format!(
                "decompose: contracted window [{out_lo},{out_hi}) is empty"
            )));
        }

        // P := (f·T^m)·q^m as an exact polynomial of the stored representative
        let mut shifted = self.shift(m);
        shifted.lo = 0;
        shifted.hi = WINDOW_INF;
        let poly = if m > 0 {
            let q = Self::one_plus_t_pow_int(p, pc as u64, self.prec).shift(-1);
            let mut qm = Self::one(p, self.prec, self.cert.class).with_class(self.cert);
            for _ in 0..m {
                qm = qm.mul(&q)?;
            }
            shifted.mul(&qm)?
        } else {
            shifted
        };

        // binomial transform to the u = 1+T basis: b_e = Σ_n a_n·C(n,e)·(−1)^{n−e},
        // accumulated densely (supports here are contiguous polynomials)
        let deg = poly.coeffs.keys().next_back().copied().unwrap_or(0).max(0) as usize;
        let mut u_dense: Vec<Option<PadicScalar>> = vec![None; deg + 1];
        for (&n, a_n) in &poly.coeffs {
            let digits = (self.prec.max(1) as u32 + n as u32 / (p as u32 - 1) + 4).min(max_digits(p));
            let nn = PadicScalar::from_int(p, n as i128, digits);
            let row = PadicScalar::binom_row(&nn, n as u64)?;
            for (e, b) in row.into_iter().enumerate() {
                let b = if (n - e as i64) % 2 == 1 { b.neg() } else { b };
                let term = a_n.mul(&b)?;
                u_dense[e] = Some(match u_dense[e].take() {
                    None => term,
                    Some(acc) => acc.add(&term)?,
                });
            }
        }
        let mut u_coeffs: BTreeMap<i64, PadicScalar> = BTreeMap::new();
        for (e, c) in u_dense.into_iter().enumerate() {
            if let Some(c) = c {
                u_coeffs.insert(e as i64, c);
            }
        }

        if std::env::var("SKEWLAB_TRACE").is_ok() {
            for (e, b) in &u_coeffs {
                eprintln!("TRACE u[{e}] = {b}");
            }
        }
        // split residues mod p^c, contract exponents, rewrite back in T, shift
        // by −m; everything is representative-exact, so the support is kept in
        // full and the window covers it
        let top = u_coeffs.keys().next_back().map_or(out_hi, |&e| e / pc - m + 1);
        let win_hi = if self.hi >= WINDOW_INF { WINDOW_INF } else { out_hi.max(top) };
        let mut parts = Vec::with_capacity(pc as usize);
        for i in 0..pc {
            let width = u_coeffs.keys().next_back().map_or(0, |&e| (e / pc) as usize) + 1;
            let mut dense: Vec<Option<PadicScalar>> = vec![None; width];
            for (&e, b) in u_coeffs.iter().filter(|(&e, _)| e % pc == i) {
                let j = e / pc;
                let digits = (self.prec.max(1) as u32 + j as u32 / (p as u32 - 1) + 4).min(max_digits(p));
                let jj = PadicScalar::from_int(p, j as i128, digits);
                let row = PadicScalar::binom_row(&jj, j as u64)?;
                for (d, w) in row.into_iter().enumerate() {
                    let term = w.mul(b)?;
                    dense[d] = Some(match dense[d].take() {
                        None => term,
                        Some(acc) => acc.add(&term)?,
                    });
                }
            }
            let mut part =
                Self::zero_on(p, self.prec, self.cert.class, out_lo, win_hi).with_class(self.cert);
            for (d, c) in dense.into_iter().enumerate() {
                if let Some(c) = c {
                    part.coeffs.insert(d as i64 - m, c);
                }
            }
            parts.push(part.normalized());
        }
        Ok(parts)
    }

    /// Largest exponent bound below which `etale_decompose(c)` outputs are
    /// unaffected, modulo p^digits, by cutting this series at exponent `cut`:
    /// the contraction of a tail term T^D (D ≥ cut, integral coefficients)
    /// reaches exponent e only with valuation
    /// ceil((D + m − p^c(e+m))/(p^{c−1}(p−1))) − c.
    pub fn decompose_certified_hi(&self, c: u32, cut: i64, digits: i64) -> i64 {
        let p = self.p as i64;
        let pc = p.pow(c);
        let m = (-self.coeffs.keys().next().copied().unwrap_or(0)).max(0);
        let gain_den = p.pow(c - 1) * (p - 1);
        // e + m <= (cut + m − (digits + c)·gain_den)/p^c
        let num = cut + m - (digits + c as i64) * gain_den;
        if num < 0 {
            return -m; // nothing certified
        }
        num.div_euclid(pc) - m + 1
    }

    /// Recombine Σ_i (1+T)^i φ^c(r_i); exact inverse of `etale_decompose` on
    /// shared windows.
    pub fn etale_recombine(parts: &[Self], c: u32) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument("recombine needs at least one part".into()));
        }
        let p = parts[0].p;
        if c == 0 {
            if parts.len() != 1 {
                return Err(Error::InvalidArgument("depth 0 takes exactly one part".into()));
            }
            return Ok(parts[0].clone());
        }
        let mut pc: i64 = 1;
        for _ in 0..c {
            pc *= p as i64;
        }
        if parts.len() as i64 != pc {
            return Err(Error::InvalidArgument(format!(
                "recombine at depth {c} needs {pc} parts, got {}",
                parts.len()
            )));
        }
        let mut acc: Option<LaurentSeries> = None;
        for (i, r) in parts.iter().enumerate() {
            let phi_r = r.frobenius(c)?;
            let term = if i == 0 {
                phi_r
            } else {
                let chi = Self::one_plus_t_pow_int(p, i as u64, r.prec)
                    .add(&Self::one(p, r.prec, AnalyticityClass::Iwasawa))?;
                chi.mul(&phi_r)?
            };
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term)?,
            });
        }
        Ok(acc.unwrap().normalized())
    }
}

thread_local! {
    static PHI_INV_CACHE: std::cell::RefCell<std::collections::HashMap<(u64, u64, i64), LaurentSeries>> =
        std::cell::RefCell::new(std::collections::HashMap::new());
}

/// Inverse of φ^c(T) = (1+T)^{p^c} − 1 at floor `prec`, cached per thread.
fn phi_inverse_cached(p: u64, k: u64, prec: i64) -> Result<LaurentSeries> {
    PHI_INV_CACHE.with(|cache| {
        if let Some(hit) = cache.borrow().get(&(p, k, prec)) {
            return Ok(hit.clone());
        }
        let phi_t = LaurentSeries::one_plus_t_pow_int(p, k, prec)
            .with_class(Certificate::plain(AnalyticityClass::OE));
        let inv = phi_t.invert()?;
        cache.borrow_mut().insert((p, k, prec), inv.clone());
        Ok(inv)
    })
}

fn div_ceil(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    if a >= 0 {
        (a + b - 1) / b
    } else {
        -((-a) / b)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        } else {
            let mut first = true;
            for (e, c) in &self.coeffs {
                if !first {
                    write!(f, " + ")?;
                }
                write!(f, "({c})T^{e}")?;
                first = false;
            }
        }
        write!(f, "  on [{}, {}) mod p^{}", self.lo, self.hi, self.prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use AnalyticityClass::*;

    fn ser(p: u64, prec: i64, class: AnalyticityClass, terms: &[(i64, i128)]) -> LaurentSeries {
        LaurentSeries::from_int_terms(p, prec, class, terms)
    }

    #[test]
    fn mul_monomials() {
        let t = LaurentSeries::monomial(2, 1, 6, OE);
        let t2 = t.mul(&t).unwrap();
        assert!(t2.agrees_with(&ser(2, 6, OE, &[(2, 1)])));
    }

    #[test]
    fn geometric_inverse_times_one_plus_t() {
        // (1+T)·(1−T+T²−…) = 1 on the shared window
        let p = 2;
        let one_plus_t = ser(p, 6, OE, &[(0, 1), (1, 1)]).with_window(0, 12);
        let geo: Vec<(i64, i128)> = (0..12).map(|n| (n, if n % 2 == 0 { 1 } else { -1 })).collect();
        let g = ser(p, 6, OE, &geo).with_window(0, 12);
        let prod = one_plus_t.mul(&g).unwrap();
        assert!(prod.agrees_with(&LaurentSeries::one(p, 6, OE)), "got {prod}");
    }

    #[test]
    fn mul_with_negative_exponent() {
        // T^(−1)·(T² + pT) = T + p
        let p = 3;
        let tinv = LaurentSeries::monomial(p, -1, 6, OE);
        let f = ser(p, 6, OE, &[(2, 1), (1, 3)]).with_window(0, 10);
        let prod = tinv.mul(&f).unwrap();
        assert!(prod.agrees_with(&ser(p, 6, OE, &[(1, 1), (0, 3)])));
    }

    #[test]
    fn invert_monomial_and_one_plus_t() {
        let t = LaurentSeries::monomial(2, 1, 5, OE).with_window(0, 10);
        let ti = t.invert().unwrap();
        assert!(ti.agrees_with(&ser(2, 5, OE, &[(-1, 1)])));
        let f = ser(2, 5, OE, &[(0, 1), (1, 1)]).with_window(0, 10);
        let fi = f.invert().unwrap();
        let expect: Vec<(i64, i128)> = (0..10).map(|n| (n, if n % 2 == 0 { 1 } else { -1 })).collect();
        assert!(fi.agrees_with(&ser(2, 5, OE, &expect)), "got {fi}");
        assert!(f.mul(&fi).unwrap().agrees_with(&LaurentSeries::one(2, 5, OE)));
    }

    #[test]
    fn invert_t_squared_plus_two_t() {
        // p=2: (T²+2T)^{-1} = T^(−2) − 2T^(−3) + 4T^(−4) − … mod 2³; multiply-back oracle
        let p = 2;
        let f = ser(p, 3, OE, &[(2, 1), (1, 2)]).with_window(0, 12);
        let fi = f.invert().unwrap();
        assert!(fi.agrees_with(&ser(p, 3, OE, &[(-2, 1), (-3, -2), (-4, 4)])), "got {fi}");
        let prod = f.mul(&fi).unwrap();
        assert!(prod.agrees_with(&LaurentSeries::one(p, 3, OE)), "got {prod}");
        assert!(prod.overlap_width(&LaurentSeries::one(p, 3, OE)) > 0);
    }

    #[test]
    fn iwasawa_t_is_not_a_unit() {
        let t = LaurentSeries::monomial(2, 1, 5, Iwasawa).with_window(0, 8);
        assert!(matches!(t.invert(), Err(Error::NotAUnit(_))));
    }

    #[test]
    fn subst_identity_and_frobenius_square() {
        let p = 2;
        let g = ser(p, 6, OE, &[(1, 2), (2, 1)]).with_window(1, 12); // φ(T) = T²+2T
        let t = LaurentSeries::monomial(p, 1, 6, OE).with_window(0, 12);
        assert!(t.subst(&g).unwrap().agrees_with(&g));
        let phi_t = t.frobenius(1).unwrap();
        assert!(phi_t.agrees_with(&ser(p, 6, OE, &[(1, 2), (2, 1)])));
        // φ²(T) = (1+T)⁴−1 = T⁴+4T³+6T²+4T, expanded binomially
        let phi2_t = t.frobenius(2).unwrap();
        assert!(phi2_t.agrees_with(&ser(p, 6, OE, &[(4, 1), (3, 4), (2, 6), (1, 4)])), "got {phi2_t}");
        // subst(T^{-1}, T²+2T) equals the inverse from the previous test
        let tinv = LaurentSeries::monomial(p, -1, 3, OE).with_window(-2, 12);
        let sub = tinv.subst(&g).unwrap();
        assert!(sub.agrees_with(&ser(p, 3, OE, &[(-2, 1), (-3, -2), (-4, 4)])), "got {sub}");
    }

    #[test]
    fn gamma_minus_one_is_alternating() {
        // γ_{−1}(T) = (1+T)^{−1} − 1 = −T + T² − T³ + … since C(−1,n) = (−1)^n
        let p = 3;
        let a = PadicScalar::from_int(p, -1, 8);
        let t = LaurentSeries::monomial(p, 1, 6, OE).with_window(0, 9);
        let g = t.gamma_act(&a).unwrap();
        let expect: Vec<(i64, i128)> = (1..9).map(|n| (n, if n % 2 == 0 { 1 } else { -1 })).collect();
        assert!(g.agrees_with(&ser(p, 6, OE, &expect)), "got {g}");
    }

    #[test]
    fn gamma_roundtrip() {
        // γ_a ∘ γ_{a^{-1}} = id for a = 3, p = 2, N = 5
        let p = 2;
        let a = PadicScalar::from_int(p, 3, 8);
        let ainv = a.inv().unwrap();
        let f = ser(p, 5, OE, &[(0, 1), (1, 1), (3, 5), (4, 2)]).with_window(0, 10);
        let round = f.gamma_act(&ainv).unwrap().gamma_act(&a).unwrap();
        assert!(round.agrees_with(&f), "got {round}");
        assert!(round.overlap_width(&f) >= 5);
    }

    #[test]
    fn decompose_examples() {
        let p = 2;
        // f = 1, c = 1 → (1, 0)
        let one = LaurentSeries::one(p, 6, OE).with_window(0, 16);
        let parts = one.etale_decompose(1).unwrap();
        assert!(parts[0].agrees_with(&LaurentSeries::one(p, 6, OE)));
        assert!(parts[1].is_zero_at_prec());
        // f = T, c = 1 → (−1, 1) since −1 + (1+T) = T
        let t = LaurentSeries::monomial(p, 1, 6, OE).with_window(0, 16);
        let parts = t.etale_decompose(1).unwrap();
        assert!(parts[0].agrees_with(&ser(p, 6, OE, &[(0, -1)])));
        assert!(parts[1].agrees_with(&LaurentSeries::one(p, 6, OE)));
        // f = T^(−1), c=1 → (T^(−1), T^(−1)); recombination oracle
        let tinv = LaurentSeries::monomial(p, -1, 6, OE).with_window(-1, 16);
        let parts = tinv.etale_decompose(1).unwrap();
        assert!(parts[0].agrees_with(&ser(p, 6, OE, &[(-1, 1)])), "got {}", parts[0]);
        assert!(parts[1].agrees_with(&ser(p, 6, OE, &[(-1, 1)])), "got {}", parts[1]);
        let back = LaurentSeries::etale_recombine(&parts, 1).unwrap();
        assert!(back.agrees_with(&tinv), "got {back}");
        assert!(back.overlap_width(&tinv) > 0);
    }

    #[test]
    fn chi_one_pow_pc_is_chi_pc() {
        // (1+T)^{p^c} − 1 = φ^c(T)
        for p in [2u64, 3] {
            for c in 1..=2u32 {
                let pc = p.pow(c);
                let lhs = LaurentSeries::one_plus_t_pow_int(p, pc, 8);
                let rhs = LaurentSeries::monomial(p, 1, 8, Iwasawa).frobenius(c).unwrap();
                assert!(lhs.agrees_with(&rhs));
            }
        }
    }

    #[test]
    fn depth_two_matches_iterated_depth_one() {
        let p = 2;
        let f = ser(p, 6, OE, &[(-2, 7), (0, 3), (1, 1), (4, 9), (7, 2)]).with_window(-4, 24);
        let direct = f.etale_decompose(2).unwrap();
        let first = f.etale_decompose(1).unwrap();
        for (k, r) in first.iter().enumerate() {
            let second = r.etale_decompose(1).unwrap();
            for (j, s) in second.iter().enumerate() {
                let i = k + (p as usize) * j;
                assert!(
                    direct[i].agrees_with(s),
                    "mismatch at i={i}: direct {} vs iterated {}",
                    direct[i],
                    s
                );
                assert!(direct[i].overlap_width(s) > 0);
            }
        }
    }

    #[test]
    fn frobenius_is_ring_hom_on_random_pairs() {
        let mut state: u64 = 0xabcdef12;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for &p in &[2u64, 3] {
            for _ in 0..40 {
                let mut mk = || {
                    let terms: Vec<(i64, i128)> = (0..4)
                        .map(|_| ((next() % 9) as i64, (next() % 40) as i128 - 20))
                        .collect();
                    ser(p, 5, OE, &terms).with_window(0, 16)
                };
                let f = mk();
                let g = mk();
                let lhs = f.mul(&g).unwrap().frobenius(1).unwrap();
                let rhs = f.frobenius(1).unwrap().mul(&g.frobenius(1).unwrap()).unwrap();
                assert!(lhs.agrees_with(&rhs), "hom fails p={p}: {lhs} vs {rhs}");
                if !lhs.is_zero_at_prec() || !rhs.is_zero_at_prec() {
                    assert!(lhs.overlap_width(&rhs) > 0, "empty comparison p={p}: {lhs} vs {rhs}");
                }
            }
        }
    }

    #[test]
    fn frobenius_commutes_with_gamma() {
        let p = 2;
        let a = PadicScalar::from_int(p, 5, 9);
        let f = ser(p, 5, OE, &[(-1, 3), (0, 1), (2, 2)]).with_window(-2, 14);
        let lhs = f.frobenius(1).unwrap().gamma_act(&a).unwrap();
        let rhs = f.gamma_act(&a).unwrap().frobenius(1).unwrap();
        assert!(lhs.agrees_with(&rhs), "{lhs} vs {rhs}");
        assert!(lhs.overlap_width(&rhs) > 0);
    }

    #[test]
    fn decompose_recombine_roundtrip_random() {
        let mut state: u64 = 77;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for &p in &[2u64, 3] {
            for _ in 0..25 {
                let terms: Vec<(i64, i128)> = (0..6)
                    .map(|_| ((next() % 20) as i64 - 6, (next() % 200) as i128 - 100))
                    .collect();
                let f = ser(p, 6, OE, &terms).with_window(-8, 24);
                let parts = f.etale_decompose(1).unwrap();
                let back = LaurentSeries::etale_recombine(&parts, 1).unwrap();
                assert!(back.agrees_with(&f), "roundtrip p={p}: {f} vs {back}");
                assert!(back.overlap_width(&f) > 0);
                // directness: decompose(recombine(parts)) = parts on the window
                // certified against recombine's storage cut at back.hi
                let cert_hi = back.decompose_certified_hi(1, back.window().1, 6);
                let again = back.etale_decompose(1).unwrap();
                for (r, s) in parts.iter().zip(&again) {
                    let (lo, _) = s.window();
                    let rc = r.clone().with_window(lo, cert_hi);
                    let sc = s.clone().with_window(lo, cert_hi);
                    assert!(rc.agrees_with(&sc), "directness p={p}: {rc} vs {sc}");
                }
            }
        }
    }
}
