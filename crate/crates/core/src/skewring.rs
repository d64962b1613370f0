//! Finite levels R[H₁/H_k, ℓ, ι] of the completed skew group ring: the free
//! R-module on canonical coset representatives with multiplication twisted so
//! that φ^{c_k}(R) is central and χ(i) acts on H₁/H_k through ι-conjugation.

use crate::error::{Error, Result};
use crate::groups::{GroupId, QuotKey, QuotientSpec};
use crate::padic::{max_digits, PadicScalar};
use crate::series::{AnalyticityClass, LaurentSeries, WINDOW_INF};
use std::collections::BTreeMap;
use std::fmt;

/// Level-k element: a finitely supported map from canonical representatives
/// of H₁/H_k to coefficient series.
#[derive(Clone, Debug)]
pub struct SkewElt {
    spec: QuotientSpec,
    body: BTreeMap<QuotKey, LaurentSeries>,
}

/// Label of a component in the φ-decomposition: the group part v ∈ J(φ(H₁)\H₁)
/// and the digit i of ι({0, …, p−1}).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PhiCosetLabel {
    pub v: QuotKey,
    pub digit: u64,
}

impl SkewElt {
    pub fn zero(spec: QuotientSpec) -> Self {
        SkewElt { spec, body: BTreeMap::new() }
    }

    /// r·1: the coefficient ring embedded at the identity coset.
    pub fn from_series(spec: QuotientSpec, r: LaurentSeries) -> Self {
        let mut body = BTreeMap::new();
        if !r.is_zero_at_prec() {
            body.insert(QuotKey::identity(spec.group), r);
        }
        SkewElt { spec, body }
    }

    /// r·h for a single canonical coset.
    pub fn from_term(spec: QuotientSpec, key: QuotKey, r: LaurentSeries) -> Self {
        let key = spec.canonical(&key);
        let mut body = BTreeMap::new();
        if !r.is_zero_at_prec() {
            body.insert(key, r);
        }
        SkewElt { spec, body }
    }

    pub fn one(spec: QuotientSpec, prec: i64, class: AnalyticityClass) -> Self {
        let p = spec.p;
        Self::from_series(spec, LaurentSeries::one(p, prec, class))
    }

    pub fn spec(&self) -> &QuotientSpec {
        &self.spec
    }

    pub fn level(&self) -> u32 {
        self.spec.level
    }

    pub fn terms(&self) -> impl Iterator<Item = (&QuotKey, &LaurentSeries)> {
        self.body.iter()
    }

    pub fn coeff(&self, key: &QuotKey) -> Option<&LaurentSeries> {
        self.body.get(&self.spec.canonical(key))
    }

    pub fn is_zero_at_prec(&self) -> bool {
        self.body.values().all(|r| r.is_zero_at_prec())
    }

    pub fn support_size(&self) -> usize {
        self.body.len()
    }

    fn require_compatible(&self, other: &Self) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::InvalidArgument(
                "skew elements live at different levels or groups".into(),
            ));
        }
        Ok(())
    }

    fn insert_add(&mut self, key: QuotKey, r: LaurentSeries) -> Result<()> {
        if r.is_zero_at_prec() {
            // still merge windows through add when a value is present
            if let Some(cur) = self.body.remove(&key) {
                self.body.insert(key, cur.add(&r)?);
            }
            return Ok(());
        }
        match self.body.remove(&key) {
            Some(cur) => {
                let s = cur.add(&r)?;
                self.body.insert(key, s);
            }
            None => {
                self.body.insert(key, r);
            }
        }
        Ok(())
    }

    fn cleaned(mut self) -> Self {
        self.body.retain(|_, r| !r.is_zero_at_prec());
        self
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_compatible(other)?;
        let mut out = self.clone();
        for (k, r) in &other.body {
            out.insert_add(k.clone(), r.clone())?;
        }
        Ok(out.cleaned())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for r in out.body.values_mut() {
            *r = r.neg();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale_series(&self, r: &LaurentSeries) -> Result<Self> {
        // left multiplication by ι(r): keys untouched, coefficients multiplied
        let mut out = Self::zero(self.spec.clone());
        for (k, c) in &self.body {
            out.insert_add(k.clone(), r.mul(c)?)?;
        }
        Ok(out.cleaned())
    }

    /// χ(i) = (1+T)^i as a coefficient series (exact for i ≥ 0, truncated
    /// alternating expansion for i < 0).
    pub fn chi_series(p: u64, i: i128, prec: i64, width: i64) -> Result<LaurentSeries> {
        if i >= 0 {
            let mut out = LaurentSeries::one(p, prec, AnalyticityClass::Iwasawa);
            if i > 0 {
                let pow = LaurentSeries::one_plus_t_pow_int(p, i as u64, prec)
                    .add(&LaurentSeries::one(p, prec, AnalyticityClass::Iwasawa))?;
                out = pow;
            }
            Ok(out)
        } else {
            let digits = (prec.max(1) as u32 + 8).min(max_digits(p));
            let a = PadicScalar::from_int(p, i, digits);
            let g = LaurentSeries::one_plus_t_pow_scalar(&a, width.max(4), prec)?
                .add(&LaurentSeries::one(p, prec, AnalyticityClass::Iwasawa))?;
            Ok(g)
        }
    }

    /// The twisted product: expand the right coefficient through the étale
    /// decomposition at depth c_k (or any deeper m, which must give the same
    /// result) and conjugate the left keys by ι(i).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_at_depth(other, self.spec.c_k, &[])
    }

    /// Like `mul`, with explicit expansion depth m ≥ c_k and optional
    /// representative shifts: digit i is replaced by i + p^m·shift[i].
    pub fn mul_at_depth(&self, other: &Self, depth: u32, shifts: &[i128]) -> Result<Self> {
        self.require_compatible(other)?;
        if depth < self.spec.c_k {
            return Err(Error::DepthTooShallow(format!(
                "expansion depth {depth} below c_k = {}",
                self.spec.c_k
            )));
        }
        let p = self.spec.p;
        let pm = (p as i128).pow(depth);
        let mut out = Self::zero(self.spec.clone());
        for (h2, r2) in &other.body {
            let parts = r2.etale_decompose(depth)?;
            // χ(digit)·φ^depth(part) is independent of the left keys: hoist it
            let mut prepared: Vec<(i128, LaurentSeries)> = Vec::new();
            for (i, part) in parts.iter().enumerate() {
                if part.is_zero_at_prec() {
                    continue;
                }
                let shift = shifts.get(i).copied().unwrap_or(0);
                let digit = i as i128 + pm * shift;
                // a shifted representative is compensated inside the φ-image:
                // χ(i)φ(r) = χ(i')φ(χ(−shift)·r)
                let adjusted = if shift == 0 {
                    part.clone()
                } else {
                    let (lo, hi) = part.window();
                    let width = if hi >= WINDOW_INF {
                        part.prec_floor() + 8
                    } else {
                        hi - lo.min(0) + part.prec_floor() + 4
                    };
                    let chi_neg = Self::chi_series(p, -shift, part.prec_floor(), width)?;
                    chi_neg.mul(part)?
                };
                if adjusted.is_zero_at_prec() {
                    continue;
                }
                let phi_part = adjusted.frobenius(depth)?;
                if phi_part.is_zero_at_prec() {
                    continue;
                }
                let chi = Self::chi_series(p, digit, phi_part.prec_floor(), 8)?;
                prepared.push((digit, chi.mul(&phi_part)?));
            }
            for (h1, r1) in &self.body {
                for (digit, chi_phi) in &prepared {
                    let coeff = r1.mul(chi_phi)?;
                    let key = self.spec.key_mul(&self.spec.conj_by_iota(*digit, h1), h2);
                    out.insert_add(key, coeff)?;
                }
            }
        }
        Ok(out.cleaned())
    }

    /// φ(r·h) = φ(r)·φ(h), coefficientwise Frobenius and the induced map on keys.
    pub fn phi(&self) -> Result<Self> {
        let mut out = Self::zero(self.spec.clone());
        for (k, r) in &self.body {
            out.insert_add(self.spec.key_phi(k), r.frobenius(1)?)?;
        }
        Ok(out.cleaned())
    }

    /// φ_t-transport for t ∈ T₊ with p-power entries: coefficients move by the
    /// series action through ℓ, keys scale rootwise by β(t).
    pub fn phi_t(&self, t: &crate::groups::TorusElt) -> Result<Self> {
        let datum = self.spec.group.datum();
        if !crate::groups::in_tplus(&datum, t)? {
            return Err(Error::NotInTPlus("skew transport needs t ∈ T₊".into()));
        }
        let mut out = Self::zero(self.spec.clone());
        let scale: Vec<u64> = match self.spec.group {
            GroupId::Gl2 => vec![],
            GroupId::Gl3 => {
                // key order (y, z) = (β, γ)
                let mb = crate::groups::root_eval(&datum, (2, 3), t)?.1;
                let mg = crate::groups::root_eval(&datum, (1, 3), t)?.1;
                if mb < 0 || mg < 0 {
                    return Err(Error::NotInTPlus("negative root valuation".into()));
                }
                vec![self.spec.p.pow(mb as u32), self.spec.p.pow(mg as u32)]
            }
        };
        let modulus = self.spec.coord_modulus().max(1);
        for (k, r) in &self.body {
            let key = QuotKey(
                k.0.iter().zip(&scale).map(|(&x, &s)| x.wrapping_mul(s) % modulus).collect(),
            );
            let coeff = crate::groups::tplus_act_series(&datum, t, r)?;
            out.insert_add(key, coeff)?;
        }
        Ok(out.cleaned())
    }

    /// Reduce to a coarser level l ≤ k by summing over fibers of H₁/H_k → H₁/H_l.
    pub fn reduce_level(&self, l: u32) -> Result<Self> {
        if l > self.spec.level {
            return Err(Error::InvalidArgument("reduce_level goes downward only".into()));
        }
        let coarse = QuotientSpec::new(self.spec.group, self.spec.p, l)?;
        let mut out = Self::zero(coarse.clone());
        for (k, r) in &self.body {
            out.insert_add(coarse.canonical(k), r.clone())?;
        }
        Ok(out.cleaned())
    }

    /// Membership in I_l = Ker(level k → level l), decided at precision.
    pub fn ideal_member(&self, l: u32) -> Result<bool> {
        Ok(self.reduce_level(l)?.is_zero_at_prec())
    }

    /// The augmentation ℓ_R: collapse all keys to the identity (image in R).
    pub fn augmentation(&self) -> Result<LaurentSeries> {
        let reduced = self.reduce_level(1)?;
        let id = QuotKey::identity(self.spec.group);
        match reduced.body.get(&id) {
            Some(r) => Ok(r.clone()),
            None => Ok(LaurentSeries::zero_on(
                self.spec.p,
                self.prec_floor(),
                self.class(),
                0,
                WINDOW_INF,
            )),
        }
    }

    pub fn prec_floor(&self) -> i64 {
        self.body.values().map(|r| r.prec_floor()).min().unwrap_or(1)
    }

    pub fn class(&self) -> AnalyticityClass {
        self.body
            .values()
            .map(|r| r.certificate().class)
            .max()
            .unwrap_or(AnalyticityClass::OE)
    }

    /// χ_k(g) for g = ι(i)·h ∈ H₀ with exact coordinates: the single term
    /// (1+T)^i at the class of h.
    pub fn chi_embed(
        spec: &QuotientSpec,
        datum: &crate::groups::RootDatum,
        g: &crate::groups::UnitriangularElt,
        prec: i64,
        width: i64,
    ) -> Result<Self> {
        let i = g.ell(datum);
        let iota_inv = crate::groups::iota(datum, spec.p, g.level(), -i);
        let h = iota_inv.mul(g)?;
        let key = spec.key_of(&h, datum)?;
        let chi = Self::chi_series(spec.p, i, prec, width)?;
        Ok(Self::from_term(spec.clone(), key, chi))
    }

    /// Decompose x = Σ_w φ(y_w)·χ_k(w) over w = v·ι(i), v ∈ J(φ(H₁)\H₁),
    /// i ∈ {0, …, p−1}. Requires H_k ⊆ φ(H₀) (level ≥ 3 for GL₃).
    pub fn phi_decompose(&self) -> Result<BTreeMap<PhiCosetLabel, SkewElt>> {
        if self.spec.group == GroupId::Gl3 && self.spec.level < 3 {
            return Err(Error::LevelTooSmall(format!(
                "phi-decomposition needs H_k ⊆ φ(H₀): level ≥ 3, got {}",
                self.spec.level
            )));
        }
        let mut out: BTreeMap<PhiCosetLabel, SkewElt> = BTreeMap::new();
        for (h, r) in &self.body {
            let parts = r.etale_decompose(1)?;
            for (i, part) in parts.iter().enumerate() {
                if part.is_zero_at_prec() {
                    continue;
                }
                // ι(i)·h·ι(i)^{-1} = φ(u)·v
                let conj = self.spec.conj_by_iota(-(i as i128), h);
                let (u, v) = self.spec.factor_phi(&conj)?;
                let label = PhiCosetLabel { v, digit: i as u64 };
                let component = Self::from_term(self.spec.clone(), u, part.clone());
                match out.remove(&label) {
                    Some(acc) => {
                        out.insert(label, acc.add(&component)?);
                    }
                    None => {
                        out.insert(label, component);
                    }
                }
            }
        }
        out.retain(|_, y| !y.is_zero_at_prec());
        Ok(out)
    }

    /// Recombine Σ_w φ(y_w)·χ_k(w).
    pub fn phi_recombine(
        spec: &QuotientSpec,
        components: &BTreeMap<PhiCosetLabel, SkewElt>,
    ) -> Result<Self> {
        let mut acc = Self::zero(spec.clone());
        for (label, y) in components {
            let phi_y = y.phi()?;
            // χ_k(v·ι(i)) = (1+T)^i at the key ι(i)^{-1}·v·ι(i)
            let prec = if y.body.is_empty() { 6 } else { y.prec_floor() };
            let chi = Self::chi_series(spec.p, label.digit as i128, prec, 8)?;
            let key = spec.conj_by_iota(label.digit as i128, &label.v);
            let group_term = Self::from_term(spec.clone(), key, chi);
            acc = acc.add(&phi_y.mul(&group_term)?)?;
        }
        Ok(acc)
    }

    /// Transport from the skew ring built on a second splitting ι′ (given by
    /// δ(1) = ι(1)^{-1}ι′(1) ∈ H₁) to the one built on ι, at expansion depth m.
    pub fn iota_transport(&self, delta1: &QuotKey, depth: u32) -> Result<Self> {
        let k = self.spec.level;
        let m_k = k.saturating_sub(1);
        let need = m_k + self.spec.c_k.max(1).max(self.spec.c_k);
        let need = if self.spec.group == GroupId::Gl2 { 1 } else { need };
        if depth < need {
            return Err(Error::DepthTooShallow(format!(
                "iota transport needs depth ≥ m_k + max(c_k, c_k') = {need}, got {depth}"
            )));
        }
        let p = self.spec.p;
        let pm = p.pow(depth);
        // δ(i) = ι(i)^{-1}ι′(i) by the cocycle recursion δ(i+1) = conj_ι(1)(δ(i))·δ(1)
        let mut deltas = Vec::with_capacity(pm as usize);
        let mut cur = QuotKey::identity(self.spec.group);
        for _ in 0..pm {
            deltas.push(cur.clone());
            cur = self.spec.key_mul(&self.spec.conj_by_iota(1, &cur), delta1);
        }
        let mut out = Self::zero(self.spec.clone());
        for (h, r) in &self.body {
            let parts = r.etale_decompose(depth)?;
            for (i, part) in parts.iter().enumerate() {
                if part.is_zero_at_prec() {
                    continue;
                }
                let chi = Self::chi_series(p, i as i128, part.prec_floor(), 8)?;
                let coeff = chi.mul(&part.frobenius(depth)?)?;
                let key = self.spec.key_mul(&deltas[i], h);
                out.insert_add(key, coeff)?;
            }
        }
        Ok(out.cleaned())
    }

    /// Coefficientwise agreement at shared precision on shared windows.
    pub fn agrees_with(&self, other: &Self) -> bool {
        if self.spec != other.spec {
            return false;
        }
        let mut keys: Vec<&QuotKey> = self.body.keys().collect();
        keys.extend(other.body.keys());
        keys.sort();
        keys.dedup();
        let floor = self.prec_floor().min(other.prec_floor());
        for k in keys {
            let zero = || {
                LaurentSeries::zero_on(self.spec.p, floor, self.class(), -(1 << 20), 1 << 20)
            };
            let a = self.body.get(k).cloned().unwrap_or_else(zero);
            let b = other.body.get(k).cloned().unwrap_or_else(zero);
            if !a.agrees_with(&b) {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for SkewElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.body.is_empty() {
            return write!(f, "0 (level {})", self.spec.level);
        }
        for (i, (k, r)) in self.body.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{k}: {r}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::RootDatum;
    use crate::series::AnalyticityClass::OE;

    fn spec(group: GroupId, p: u64, k: u32) -> QuotientSpec {
        QuotientSpec::new(group, p, k).unwrap()
    }

    // exact Laurent-polynomial representatives: ring identities are exact on
    // these; finite windows model truncations and are exercised in series tests
    fn ser(p: u64, terms: &[(i64, i128)]) -> LaurentSeries {
        LaurentSeries::from_int_terms(p, 6, OE, terms)
    }

    fn rand_elt(spec: &QuotientSpec, next: &mut dyn FnMut() -> u64) -> SkewElt {
        let mut x = SkewElt::zero(spec.clone());
        let keys = spec.keys();
        for _ in 0..2 {
            let key = keys[(next() % keys.len() as u64) as usize].clone();
            let terms: Vec<(i64, i128)> = (0..2)
                .map(|_| ((next() % 7) as i64 - 1, (next() % 18) as i128 - 9))
                .collect();
            let r = ser(spec.p, &terms);
            x = x.add(&SkewElt::from_term(spec.clone(), key, r)).unwrap();
        }
        x
    }

    #[test]
    fn central_phi_ck_coefficient() {
        // (1·h)·(φ^{c_k}(T)·1) = φ^{c_k}(T)·h
        let sp = spec(GroupId::Gl3, 3, 2);
        let h = QuotKey(vec![1, 2]);
        let lhs = SkewElt::from_term(sp.clone(), h.clone(), LaurentSeries::one(3, 6, OE));
        let phi_t = LaurentSeries::monomial(3, 1, 6, OE)
            .with_window(0, 24)
            .frobenius(sp.c_k)
            .unwrap();
        let rhs = SkewElt::from_series(sp.clone(), phi_t.clone());
        let prod = lhs.mul(&rhs).unwrap();
        let expect = SkewElt::from_term(sp, h, phi_t);
        assert!(prod.agrees_with(&expect), "got {prod}\nexpected {expect}");
    }

    #[test]
    fn chi_conjugates_keys() {
        // GL₃ level 2, p = 3: (1·n_β(1))·((1+T)·1) = (1+T)·(n_β(1)n_γ(−1))
        let p = 3;
        let sp = spec(GroupId::Gl3, p, 2);
        let x = SkewElt::from_term(sp.clone(), QuotKey(vec![1, 0]), LaurentSeries::one(p, 6, OE));
        let one_plus_t = LaurentSeries::from_int_terms(p, 6, OE, &[(0, 1), (1, 1)]).with_window(0, 24);
        let y = SkewElt::from_series(sp.clone(), one_plus_t.clone());
        let prod = x.mul(&y).unwrap();
        // n_β(1)n_γ(−1): key (1, p−1)
        let expect = SkewElt::from_term(sp, QuotKey(vec![1, p - 1]), one_plus_t);
        assert!(prod.agrees_with(&expect), "got {prod}\nexpected {expect}");
    }

    #[test]
    fn commutative_sector() {
        // (T·1)·(T·1) = T²·1
        let sp = spec(GroupId::Gl3, 3, 2);
        let t = SkewElt::from_series(sp.clone(), LaurentSeries::monomial(3, 1, 6, OE).with_window(0, 24));
        let prod = t.mul(&t).unwrap();
        let expect = SkewElt::from_series(sp, LaurentSeries::monomial(3, 2, 6, OE).with_window(0, 24));
        assert!(prod.agrees_with(&expect));
    }

    #[test]
    fn associativity_random() {
        let mut state: u64 = 31337;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let sp = spec(GroupId::Gl3, 3, 2);
        for _ in 0..12 {
            let x = rand_elt(&sp, &mut next);
            let y = rand_elt(&sp, &mut next);
            let z = rand_elt(&sp, &mut next);
            let lhs = x.mul(&y).unwrap().mul(&z).unwrap();
            let rhs = x.mul(&y.mul(&z).unwrap()).unwrap();
            assert!(lhs.agrees_with(&rhs), "assoc fails:\n{lhs}\nvs\n{rhs}");
        }
    }

    #[test]
    fn representative_independence() {
        let mut state: u64 = 555;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let sp = spec(GroupId::Gl3, 3, 2);
        for _ in 0..6 {
            let x = rand_elt(&sp, &mut next);
            let y = rand_elt(&sp, &mut next);
            let base = x.mul(&y).unwrap();
            let shifts: Vec<i128> = (0..3).map(|_| (next() % 3) as i128).collect();
            let shifted = x.mul_at_depth(&y, sp.c_k, &shifts).unwrap();
            assert!(base.agrees_with(&shifted), "digit shift changed the product");
            // deeper expansion must agree as well
            let deeper = x.mul_at_depth(&y, sp.c_k + 1, &[]).unwrap();
            assert!(base.agrees_with(&deeper), "deeper expansion changed the product");
        }
    }

    #[test]
    fn phi_examples_and_homomorphism() {
        let p = 2;
        let sp = spec(GroupId::Gl3, p, 3);
        // φ(1·1) = 1
        let one = SkewElt::one(sp.clone(), 6, OE);
        assert!(one.phi().unwrap().agrees_with(&one));
        // φ(T·n_β(1)) = (T²+2T)·n_β(p)
        let x = SkewElt::from_term(
            sp.clone(),
            QuotKey(vec![1, 0]),
            LaurentSeries::monomial(p, 1, 6, OE).with_window(0, 24),
        );
        let px = x.phi().unwrap();
        let expect = SkewElt::from_term(
            sp.clone(),
            QuotKey(vec![p, 0]),
            LaurentSeries::from_int_terms(p, 6, OE, &[(2, 1), (1, 2)]).with_window(0, 24),
        );
        assert!(px.agrees_with(&expect), "got {px}");
        // multiplicativity on random pairs
        let mut state: u64 = 777;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let sp2 = spec(GroupId::Gl3, 3, 2);
        for _ in 0..10 {
            let x = rand_elt(&sp2, &mut next);
            let y = rand_elt(&sp2, &mut next);
            let lhs = x.mul(&y).unwrap().phi().unwrap();
            let rhs = x.phi().unwrap().mul(&y.phi().unwrap()).unwrap();
            assert!(lhs.agrees_with(&rhs), "phi not multiplicative");
        }
    }

    #[test]
    fn chi_embed_homomorphism() {
        let p = 3;
        let d = RootDatum::gl(3).unwrap();
        let sp = spec(GroupId::Gl3, p, 2);
        // χ_k(ι(1)) = (1+T)·1
        let g = crate::groups::iota(&d, p, None, 1);
        let e = SkewElt::chi_embed(&sp, &d, &g, 6, 16).unwrap();
        let expect = SkewElt::from_series(
            sp.clone(),
            LaurentSeries::from_int_terms(p, 6, OE, &[(0, 1), (1, 1)]),
        );
        assert!(e.agrees_with(&expect));
        // χ_k(n_β(1)) = 1·n_β(1)
        let nb = crate::groups::UnitriangularElt::generator(p, 3, None, (2, 3), 1);
        let e2 = SkewElt::chi_embed(&sp, &d, &nb, 6, 16).unwrap();
        let expect2 = SkewElt::from_term(sp.clone(), QuotKey(vec![1, 0]), LaurentSeries::one(p, 6, OE));
        assert!(e2.agrees_with(&expect2));
        // χ_k(g₁g₂) = χ_k(g₁)·χ_k(g₂), including a negative ι-digit
        let g1 = g.mul(&nb).unwrap();
        let g2 = crate::groups::iota(&d, p, None, -1);
        let lhs = SkewElt::chi_embed(&sp, &d, &g1.mul(&g2).unwrap(), 6, 20).unwrap();
        let rhs = SkewElt::chi_embed(&sp, &d, &g1, 6, 20)
            .unwrap()
            .mul(&SkewElt::chi_embed(&sp, &d, &g2, 6, 20).unwrap())
            .unwrap();
        assert!(lhs.agrees_with(&rhs), "chi not multiplicative:\n{lhs}\nvs\n{rhs}");
        // kernel contains H_k: an H_k element embeds as 1
        let hk = crate::groups::UnitriangularElt::generator(p, 3, None, (2, 3), p as i128);
        let ek = SkewElt::chi_embed(&sp, &d, &hk, 6, 16).unwrap();
        assert!(ek.agrees_with(&SkewElt::one(sp, 6, OE)));
    }

    #[test]
    fn reduce_and_ideals() {
        let p = 3;
        let sp = spec(GroupId::Gl3, p, 2);
        // reduce to k=1 kills group structure
        let x = SkewElt::from_term(sp.clone(), QuotKey(vec![1, 2]), ser(p, &[(0, 2), (1, 1)]))
            .add(&SkewElt::from_term(sp.clone(), QuotKey(vec![0, 1]), ser(p, &[(0, 5)])))
            .unwrap();
        let red = x.reduce_level(1).unwrap();
        assert_eq!(red.support_size(), 1);
        let total = red.coeff(&QuotKey::identity(GroupId::Gl3)).unwrap();
        assert!(total.agrees_with(&ser(p, &[(0, 7), (1, 1)])));
        // (h − 1) lies in I₁ but not I₂ (at level 2)
        let h_minus_1 = SkewElt::from_term(sp.clone(), QuotKey(vec![1, 0]), LaurentSeries::one(p, 6, OE))
            .sub(&SkewElt::one(sp.clone(), 6, OE))
            .unwrap();
        assert!(h_minus_1.ideal_member(1).unwrap());
        assert!(!h_minus_1.ideal_member(2).unwrap());
        // 0 ∈ I_k
        assert!(SkewElt::zero(sp.clone()).ideal_member(1).unwrap());
        // φ(I_k) ⊆ I_{k+1}: check at level 3 with x = h − 1, h ∈ H₁\H₂
        let sp3 = spec(GroupId::Gl3, p, 3);
        let y = SkewElt::from_term(sp3.clone(), QuotKey(vec![1, 0]), LaurentSeries::one(p, 6, OE))
            .sub(&SkewElt::one(sp3.clone(), 6, OE))
            .unwrap();
        assert!(y.ideal_member(1).unwrap());
        let py = y.phi().unwrap();
        assert!(py.ideal_member(2).unwrap());
    }

    #[test]
    fn reduce_is_multiplicative() {
        let mut state: u64 = 4242;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let sp = spec(GroupId::Gl3, 2, 3);
        for _ in 0..8 {
            let x = rand_elt(&sp, &mut next);
            let y = rand_elt(&sp, &mut next);
            let lhs = x.mul(&y).unwrap().reduce_level(2).unwrap();
            let rhs = x.reduce_level(2).unwrap().mul(&y.reduce_level(2).unwrap()).unwrap();
            assert!(lhs.agrees_with(&rhs), "reduction not multiplicative");
        }
    }

    #[test]
    fn phi_injectivity_surrogate() {
        // if φ(x) = 0 at level l then x = 0 at level l − 1
        let p = 2;
        let l = 3;
        let sp = spec(GroupId::Gl3, p, l);
        // probe: h − 1 with h = n_β(p^{l−2}) maps to zero under φ at level l
        let h = QuotKey(vec![p.pow(l - 2), 0]);
        let x = SkewElt::from_term(sp.clone(), h, LaurentSeries::one(p, 6, OE))
            .sub(&SkewElt::one(sp, 6, OE))
            .unwrap();
        assert!(x.phi().unwrap().is_zero_at_prec());
        assert!(x.reduce_level(l - 1).unwrap().is_zero_at_prec());
    }

    #[test]
    fn phi_decompose_examples() {
        let p = 3;
        let sp = spec(GroupId::Gl3, p, 3);
        // x = φ(y)·1 → a single component at w = 1; the level-k φ forgets the
        // γ-digit beyond p^{k−1}/p², so the component is the canonical factor
        let y = SkewElt::from_term(sp.clone(), QuotKey(vec![1, 1]), ser(p, &[(0, 2), (2, 1)]));
        let x = y.phi().unwrap();
        let comps = x.phi_decompose().unwrap();
        assert_eq!(comps.len(), 1);
        let label = PhiCosetLabel { v: QuotKey::identity(GroupId::Gl3), digit: 0 };
        let canonical = SkewElt::from_term(sp.clone(), QuotKey(vec![1, 0]), ser(p, &[(0, 2), (2, 1)]));
        assert!(comps[&label].agrees_with(&canonical), "got {}", comps[&label]);
        // recombination recovers x itself
        let back = SkewElt::phi_recombine(&sp, &comps).unwrap();
        assert!(back.agrees_with(&x));
        // x = T·1: components from the series decomposition of T
        let t = SkewElt::from_series(sp.clone(), LaurentSeries::monomial(p, 1, 6, OE).with_window(0, 24));
        let comps = t.phi_decompose().unwrap();
        let parts = LaurentSeries::monomial(p, 1, 6, OE)
            .with_window(0, 24)
            .etale_decompose(1)
            .unwrap();
        for (i, part) in parts.iter().enumerate() {
            if part.is_zero_at_prec() {
                continue;
            }
            let label = PhiCosetLabel { v: QuotKey::identity(GroupId::Gl3), digit: i as u64 };
            assert!(comps[&label].agrees_with(&SkewElt::from_series(sp.clone(), part.clone())));
        }
        // x = 1·n_β(1) → component 1 at w = n_β(1)
        let nb = SkewElt::from_term(sp.clone(), QuotKey(vec![1, 0]), LaurentSeries::one(p, 6, OE));
        let comps = nb.phi_decompose().unwrap();
        assert_eq!(comps.len(), 1);
        let label = PhiCosetLabel { v: QuotKey(vec![1, 0]), digit: 0 };
        assert!(comps[&label].agrees_with(&SkewElt::one(sp.clone(), 6, OE)));
        // roundtrip both ways on a random element
        let mut state: u64 = 909;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..4 {
            let x = rand_elt(&sp, &mut next);
            let comps = x.phi_decompose().unwrap();
            let back = SkewElt::phi_recombine(&sp, &comps).unwrap();
            assert!(back.agrees_with(&x), "phi recombination failed:\n{x}\nvs\n{back}");
        }
    }

    #[test]
    fn iota_transport_properties() {
        let p = 3;
        let sp = spec(GroupId::Gl3, p, 2);
        let depth = 2; // m ≥ m_k + max(c_k, c_k') = 1 + 1
        // ι′ = ι (δ(1) = 1) → identity
        let mut state: u64 = 616;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let x = rand_elt(&sp, &mut next);
        let same = x.iota_transport(&QuotKey::identity(GroupId::Gl3), depth).unwrap();
        assert!(same.agrees_with(&x));
        // transport of 1 is 1
        let one = SkewElt::one(sp.clone(), 6, OE);
        let delta = QuotKey(vec![1, 1]);
        assert!(one.iota_transport(&delta, depth).unwrap().agrees_with(&one));
        // too-shallow depth is refused
        assert!(matches!(
            x.iota_transport(&delta, 1),
            Err(Error::DepthTooShallow(_))
        ));
        // multiplicativity on random pairs
        for _ in 0..6 {
            let a = rand_elt(&sp, &mut next);
            let b = rand_elt(&sp, &mut next);
            let lhs = a.mul(&b).unwrap().iota_transport(&delta, depth).unwrap();
            let rhs = a
                .iota_transport(&delta, depth)
                .unwrap()
                .mul(&b.iota_transport(&delta, depth).unwrap())
                .unwrap();
            assert!(lhs.agrees_with(&rhs), "transport not multiplicative:\n{lhs}\nvs\n{rhs}");
        }
        // φ-equivariance
        let a = rand_elt(&sp, &mut next);
        let lhs = a.phi().unwrap().iota_transport(&delta, depth).unwrap();
        let rhs = a.iota_transport(&delta, depth).unwrap().phi().unwrap();
        assert!(lhs.agrees_with(&rhs), "transport not φ-equivariant");
    }

    #[test]
    fn microlocal_monomial_probe() {
        // over the OE model T is invertible and interacts with group keys the
        // way the microlocalized group algebra prescribes: (T^{-1}·h)·(T·h')
        // multiplies back through the twisted law and (T·1)·(T^{-1}·1) = 1
        let p = 3;
        let sp = spec(GroupId::Gl3, p, 2);
        let t = LaurentSeries::monomial(p, 1, 6, OE).with_window(0, 20);
        let t_inv = t.invert().unwrap();
        let one = SkewElt::one(sp.clone(), 6, OE);
        let prod = SkewElt::from_series(sp.clone(), t.clone())
            .mul(&SkewElt::from_series(sp.clone(), t_inv.clone()))
            .unwrap();
        assert!(prod.agrees_with(&one), "T·T^{{-1}} must be 1, got {prod}");
        // monomial with keys: (T^{-1}·h)·(T·h₂): coefficient lands back in the
        // commutative sector when the conjugation is trivial on h
        let h = QuotKey(vec![0, 1]); // central n_γ-key: ι-conjugation fixes it
        let x = SkewElt::from_term(sp.clone(), h.clone(), t_inv.clone());
        let y = SkewElt::from_series(sp.clone(), t.clone());
        let xy = x.mul(&y).unwrap();
        let expect = SkewElt::from_term(sp.clone(), h, t_inv.mul(&t).unwrap());
        assert!(xy.agrees_with(&expect), "got {xy}");
    }

    #[test]
    fn gl2_collapses_to_series() {
        let p = 2;
        let sp = spec(GroupId::Gl2, p, 1);
        let f = ser(p, &[(0, 3), (1, 1)]);
        let g = ser(p, &[(-1, 1), (2, 5)]);
        let prod = SkewElt::from_series(sp.clone(), f.clone())
            .mul(&SkewElt::from_series(sp.clone(), g.clone()))
            .unwrap();
        let expect = SkewElt::from_series(sp, f.mul(&g).unwrap());
        assert!(prod.agrees_with(&expect));
    }
}
