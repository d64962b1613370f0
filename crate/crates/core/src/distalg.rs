//! Truncated distribution algebra D(N₀, K) for the built-in groups, in the
//! dual pair of representations: a sparse group-algebra vector over exact
//! group coordinates, and ordered monomial coordinates in b_β = n_β − 1
//! (root order γ < β < α for GL₃) through the Mahler transform
//! g = Π n_β(x_β) ↦ Σ Π C(x_β, k_β)·b^k.

use crate::error::{Error, Result};
use crate::groups::{in_tplus, root_eval, GroupId, TorusElt};
use crate::padic::{max_digits, PadicScalar};
use std::collections::BTreeMap;
use std::fmt;

/// Exact group coordinates in the fixed root order (γ, β, α for GL₃; α for GL₂).
pub type GroupCoords = Vec<i128>;

/// The uniformity constant: 1 for odd p, 2 for p = 2. The norm layer follows
/// the convention ‖b_β‖_ρ = ρ uniformly and does not weight degrees by ε_p;
/// the constant is surfaced for callers that need the weighted variant.
pub fn epsilon_p(p: u64) -> u32 {
    if p == 2 {
        2
    } else {
        1
    }
}

/// Monomial exponent vector in the same root order; the α-slot (last) may be
/// negative in microlocal contexts, the others are ≥ 0.
pub type ExpVec = Vec<i64>;

fn roots_count(group: GroupId) -> usize {
    match group {
        GroupId::Gl2 => 1,
        GroupId::Gl3 => 3,
    }
}

/// Group law on exact coordinates (chart order γ, β, α):
/// (z₁,y₁,a₁)·(z₂,y₂,a₂) = (z₁+z₂+a₁y₂, y₁+y₂, a₁+a₂).
fn coords_mul(group: GroupId, a: &GroupCoords, b: &GroupCoords) -> GroupCoords {
    match group {
        GroupId::Gl2 => vec![a[0] + b[0]],
        GroupId::Gl3 => vec![a[0] + b[0] + a[2] * b[1], a[1] + b[1], a[2] + b[2]],
    }
}

/// Element of D(N₀, K) with polynomial (finite) support on exact group
/// coordinates. The declared level L is the certification bound for the
/// monomial representation, not a reduction of the coordinates.
#[derive(Clone, Debug)]
pub struct DistElt {
    group: GroupId,
    p: u64,
    level: u32,
    prec: i64,
    body: BTreeMap<GroupCoords, PadicScalar>,
}

impl DistElt {
    pub fn zero(group: GroupId, p: u64, level: u32, prec: i64) -> Self {
        DistElt { group, p, level, prec, body: BTreeMap::new() }
    }

    pub fn delta(group: GroupId, p: u64, level: u32, prec: i64, coords: GroupCoords) -> Self {
        let mut e = Self::zero(group, p, level, prec);
        e.body.insert(coords, PadicScalar::one(p, prec.max(1) as u32));
        e
    }

    pub fn one(group: GroupId, p: u64, level: u32, prec: i64) -> Self {
        Self::delta(group, p, level, prec, vec![0; roots_count(group)])
    }

    /// b at the root with index `idx` in the fixed order: n_idx(1) − 1.
    pub fn b_gen(group: GroupId, p: u64, level: u32, prec: i64, idx: usize) -> Self {
        let mut coords = vec![0i128; roots_count(group)];
        coords[idx] = 1;
        let mut e = Self::delta(group, p, level, prec, coords);
        let one = PadicScalar::one(p, prec.max(1) as u32);
        e.body.insert(vec![0; roots_count(group)], one.neg());
        e
    }

    pub fn group(&self) -> GroupId {
        self.group
    }
    pub fn prime(&self) -> u64 {
        self.p
    }
    pub fn level(&self) -> u32 {
        self.level
    }
    pub fn prec(&self) -> i64 {
        self.prec
    }
    pub fn terms(&self) -> impl Iterator<Item = (&GroupCoords, &PadicScalar)> {
        self.body.iter()
    }
    pub fn support_size(&self) -> usize {
        self.body.len()
    }
    pub fn is_zero_at_prec(&self) -> bool {
        self.body.is_empty()
    }

    pub fn coeff(&self, coords: &GroupCoords) -> PadicScalar {
        self.body.get(coords).cloned().unwrap_or_else(|| PadicScalar::zero(self.p, self.prec))
    }

    pub fn set_coeff(&mut self, coords: GroupCoords, c: PadicScalar) {
        if c.is_zero() {
            self.body.remove(&coords);
        } else {
            self.body.insert(coords, c);
        }
    }

    fn require_compatible(&self, other: &Self) -> Result<()> {
        if self.group != other.group || self.p != other.p || self.level != other.level {
            return Err(Error::InvalidArgument("distribution operands disagree".into()));
        }
        Ok(())
    }

    fn insert_add(&mut self, coords: GroupCoords, c: PadicScalar) -> Result<()> {
        match self.body.remove(&coords) {
            Some(acc) => {
                let s = acc.add(&c)?;
                if !s.is_zero() {
                    self.body.insert(coords, s);
                } else {
                    self.prec = self.prec.min(s.abs_prec());
                }
            }
            None => {
                if !c.is_zero() {
                    self.body.insert(coords, c);
                } else {
                    self.prec = self.prec.min(c.abs_prec());
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_compatible(other)?;
        let mut out = self.clone();
        out.prec = self.prec.min(other.prec);
        for (k, c) in &other.body {
            out.insert_add(k.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.body.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &PadicScalar) -> Result<Self> {
        let mut out = Self::zero(self.group, self.p, self.level, self.prec);
        for (g, c) in &self.body {
            out.insert_add(g.clone(), c.mul(k)?)?;
        }
        Ok(out)
    }

    /// Convolution product, exact on the group law.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.require_compatible(other)?;
        let mut out = Self::zero(self.group, self.p, self.level, self.prec.min(other.prec));
        for (g, c) in &self.body {
            for (h, d) in &other.body {
                out.insert_add(coords_mul(self.group, g, h), c.mul(d)?)?;
            }
        }
        Ok(out)
    }

    /// φ_t-transport: every group coordinate x_β scales by β(t). Requires
    /// p-power torus entries so coordinates stay exact integers.
    pub fn phi_t(&self, t: &TorusElt) -> Result<Self> {
        let datum = self.group.datum();
        if !in_tplus(&datum, t)? {
            return Err(Error::NotInTPlus("distribution transport needs t ∈ T₊".into()));
        }
        let roots = datum.ordered_roots();
        let mut scales = Vec::with_capacity(roots.len());
        for &r in &roots {
            let (val, m) = root_eval(&datum, r, t)?;
            if val.unit() != Some(1) {
                return Err(Error::InvalidArgument(
                    "exact transport needs p-power torus entries".into(),
                ));
            }
            if m >= self.level as i64 {
                return Err(Error::LevelOverflow(format!(
                    "valuation shift {m} exceeds level {}",
                    self.level
                )));
            }
            scales.push((self.p as i128).pow(m as u32));
        }
        let mut out = Self::zero(self.group, self.p, self.level, self.prec);
        for (g, c) in &self.body {
            let coords: GroupCoords = g.iter().zip(&scales).map(|(x, s)| x * s).collect();
            out.insert_add(coords, c.clone())?;
        }
        Ok(out)
    }

    /// Decompose x = Σ_n n·φ_t(x_n) over the digit transversal of N₀/φ_t(N₀);
    /// keys are the digit vectors of n in the fixed root order.
    pub fn coset_decompose(&self, t: &TorusElt) -> Result<BTreeMap<Vec<u64>, DistElt>> {
        let datum = self.group.datum();
        if !in_tplus(&datum, t)? {
            return Err(Error::NotInTPlus("coset decomposition needs t ∈ T₊".into()));
        }
        let roots = datum.ordered_roots();
        let mut pm = Vec::with_capacity(roots.len());
        for &r in &roots {
            let (val, m) = root_eval(&datum, r, t)?;
            if val.unit() != Some(1) {
                return Err(Error::CertificationFailed(
                    "coset decomposition needs p-power torus entries".into(),
                ));
            }
            pm.push((self.p as i128).pow(m as u32));
        }
        let mut out: BTreeMap<Vec<u64>, DistElt> = BTreeMap::new();
        for (g, c) in &self.body {
            let (digits, h) = match self.group {
                GroupId::Gl2 => {
                    let a = g[0];
                    let an = a.rem_euclid(pm[0]);
                    (vec![an as u64], vec![(a - an) / pm[0]])
                }
                GroupId::Gl3 => {
                    // order (γ, β, α) = (z, y, a)
                    let (z, y, a) = (g[0], g[1], g[2]);
                    let (pm_z, pm_y, pm_a) = (pm[0], pm[1], pm[2]);
                    let an = a.rem_euclid(pm_a);
                    let ah = (a - an) / pm_a;
                    let yn = y.rem_euclid(pm_y);
                    let yh = (y - yn) / pm_y;
                    // n·φ_t(h) has γ-coordinate zn + γ(t)·zh + an·β(t)·yh
                    let z_rest = z - an * pm_y * yh;
                    let zn = z_rest.rem_euclid(pm_z);
                    let zh = (z_rest - zn) / pm_z;
                    (vec![zn as u64, yn as u64, an as u64], vec![zh, yh, ah])
                }
            };
            let entry = out
                .entry(digits)
                .or_insert_with(|| Self::zero(self.group, self.p, self.level, self.prec));
            entry.insert_add(h, c.clone())?;
        }
        out.retain(|_, x| !x.is_zero_at_prec());
        Ok(out)
    }

    /// Recombine Σ_n n·φ_t(x_n).
    pub fn coset_recombine(
        group: GroupId,
        p: u64,
        level: u32,
        prec: i64,
        t: &TorusElt,
        components: &BTreeMap<Vec<u64>, DistElt>,
    ) -> Result<Self> {
        let mut acc = Self::zero(group, p, level, prec);
        for (digits, x) in components {
            let n = Self::delta(group, p, level, prec, digits.iter().map(|&d| d as i128).collect());
            acc = acc.add(&n.mul(&x.phi_t(t)?)?)?;
        }
        Ok(acc)
    }

    /// Mahler transform to ordered monomial coordinates, truncated at total
    /// degree `cert.degree_cap`.
    pub fn to_monomial(&self, cert: &BasisCert) -> Result<MonElt> {
        cert.check_compatible(self)?;
        let nroots = roots_count(self.group);
        let cap = cert.degree_cap;
        let mut out = MonElt {
            group: self.group,
            p: self.p,
            prec: self.prec,
            degree_cap: cap,
            complete: true,
            tail_val: i64::MAX,
            body: BTreeMap::new(),
        };
        let digits = (self.prec.max(1) as u32 + cap as u32 + 4).min(max_digits(self.p));
        for (g, c) in &self.body {
            // the expansion of a group element terminates at k ≤ coords when
            // all coordinates are nonnegative
            let terminates = g.iter().all(|&x| (0..=cap as i128).contains(&x));
            if !terminates {
                out.complete = false;
                out.tail_val = out.tail_val.min(c.valuation().unwrap_or(self.prec));
            }
            let mut stack: Vec<(ExpVec, PadicScalar)> = vec![(vec![], c.clone())];
            for &x in g.iter() {
                let xi = PadicScalar::from_int(self.p, x, digits);
                let row = PadicScalar::binom_row(&xi, cap as u64)?;
                let mut next = Vec::new();
                for (exps, coef) in &stack {
                    let used: i64 = exps.iter().sum();
                    for k in 0..=(cap - used) {
                        let b = &row[k as usize];
                        if b.is_zero() && k as i128 > x.abs() {
                            break;
                        }
                        let w = coef.mul(b)?;
                        let mut e2 = exps.clone();
                        e2.push(k);
                        next.push((e2, w));
                    }
                    // unseen tail in this variable
                    if x < 0 || x > (cap - used) as i128 {
                        out.complete = false;
                        out.tail_val =
                            out.tail_val.min(coef.valuation().unwrap_or(self.prec));
                    }
                }
                stack = next;
            }
            for (exps, w) in stack {
                debug_assert_eq!(exps.len(), nroots);
                if w.is_zero() {
                    continue;
                }
                let key: ExpVec = exps;
                match out.body.remove(&key) {
                    Some(acc) => {
                        let s = acc.add(&w)?;
                        if !s.is_zero() {
                            out.body.insert(key, s);
                        } else {
                            out.prec = out.prec.min(s.abs_prec());
                        }
                    }
                    None => {
                        out.body.insert(key, w);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        if self.group != other.group || self.p != other.p {
            return false;
        }
        let floor = self.prec.min(other.prec);
        let mut keys: Vec<&GroupCoords> = self.body.keys().collect();
        keys.extend(other.body.keys());
        keys.sort();
        keys.dedup();
        for k in keys {
            let a = self.coeff(k).truncate_abs(floor);
            let b = other.coeff(k).truncate_abs(floor);
            if !a.agrees_with(&b) {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for DistElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.body.is_empty() {
            return write!(f, "0");
        }
        for (i, (g, c)) in self.body.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})·n{g:?}")?;
        }
        Ok(())
    }
}

/// Ordered-monomial coordinates with a certified degree window.
#[derive(Clone, Debug)]
pub struct MonElt {
    group: GroupId,
    p: u64,
    prec: i64,
    pub degree_cap: i64,
    /// true when the element is exactly the stored finite sum
    pub complete: bool,
    /// minimal valuation of coefficients hidden beyond the cap
    pub tail_val: i64,
    body: BTreeMap<ExpVec, PadicScalar>,
}

impl MonElt {
    pub fn from_coeffs(
        group: GroupId,
        p: u64,
        prec: i64,
        coeffs: BTreeMap<ExpVec, PadicScalar>,
    ) -> Result<Self> {
        let nroots = roots_count(group);
        let mut cap = 0i64;
        for k in coeffs.keys() {
            if k.len() != nroots {
                return Err(Error::InvalidArgument("exponent vector of wrong arity".into()));
            }
            for (i, &e) in k.iter().enumerate() {
                if e < 0 && i + 1 != nroots {
                    return Err(Error::InvalidArgument(
                        "negative exponents are only allowed in the α slot".into(),
                    ));
                }
            }
            cap = cap.max(k.iter().map(|&e| e.abs()).sum());
        }
        Ok(MonElt { group, p, prec, degree_cap: cap, complete: true, tail_val: i64::MAX, body: coeffs })
    }

    pub fn monomial(group: GroupId, p: u64, prec: i64, exps: ExpVec, coeff: PadicScalar) -> Result<Self> {
        let mut m = BTreeMap::new();
        m.insert(exps, coeff);
        Self::from_coeffs(group, p, prec, m)
    }

    pub fn group(&self) -> GroupId {
        self.group
    }
    pub fn prime(&self) -> u64 {
        self.p
    }
    pub fn prec(&self) -> i64 {
        self.prec
    }
    pub fn terms(&self) -> impl Iterator<Item = (&ExpVec, &PadicScalar)> {
        self.body.iter()
    }
    pub fn coeff(&self, k: &ExpVec) -> PadicScalar {
        self.body.get(k).cloned().unwrap_or_else(|| PadicScalar::zero(self.p, self.prec))
    }
    pub fn is_zero_at_prec(&self) -> bool {
        self.body.is_empty()
    }

    /// Expand back into the group algebra; requires a polynomial element
    /// (all exponents ≥ 0).
    pub fn to_group(&self, level: u32) -> Result<DistElt> {
        let nroots = roots_count(self.group);
        let mut out = DistElt::zero(self.group, self.p, level, self.prec);
        for (k, c) in &self.body {
            if k.iter().any(|&e| e < 0) {
                return Err(Error::CertificationFailed(
                    "negative α-exponent has no group-algebra expansion".into(),
                ));
            }
            // Π (n_i − 1)^{k_i} expanded coordinatewise: the ordered chart
            // makes the product of 1-variable expansions exact
            let mut stack: Vec<(GroupCoords, PadicScalar)> = vec![(vec![], c.clone())];
            let digits = (self.prec.max(1) as u32 + k.iter().sum::<i64>() as u32 + 4)
                .min(max_digits(self.p));
            for &ki in k.iter() {
                let kk = PadicScalar::from_int(self.p, ki as i128, digits);
                let row = PadicScalar::binom_row(&kk, ki as u64)?;
                let mut next = Vec::new();
                for (coords, coef) in &stack {
                    for (x, b0) in row.iter().enumerate() {
                        let b = if (ki - x as i64) % 2 == 1 { b0.neg() } else { b0.clone() };
                        let w = coef.mul(&b)?;
                        if w.is_zero() {
                            continue;
                        }
                        let mut c2 = coords.clone();
                        c2.push(x as i128);
                        next.push((c2, w));
                    }
                }
                stack = next;
            }
            for (coords, w) in stack {
                debug_assert_eq!(coords.len(), nroots);
                out.insert_add(coords, w)?;
            }
        }
        Ok(out)
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        if self.group != other.group || self.p != other.p {
            return false;
        }
        let floor = self.prec.min(other.prec);
        let cap = self.degree_cap.min(other.degree_cap);
        let mut keys: Vec<&ExpVec> = self.body.keys().collect();
        keys.extend(other.body.keys());
        keys.sort();
        keys.dedup();
        for k in keys {
            if k.iter().map(|&e| e.abs()).sum::<i64>() > cap {
                continue;
            }
            let a = self.coeff(k).truncate_abs(floor);
            let b = other.coeff(k).truncate_abs(floor);
            if !a.agrees_with(&b) {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for MonElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.body.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.body.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})·b^{k:?}")?;
        }
        Ok(())
    }
}

/// Certificate that the ordered monomials up to total degree M are linearly
/// independent over Z/p^N in the level-L group algebra, so the truncated
/// monomial coordinates are faithful.
#[derive(Clone, Debug)]
pub struct BasisCert {
    pub group: GroupId,
    pub p: u64,
    pub level: u32,
    pub degree_cap: i64,
    pub digits: i64,
}

impl BasisCert {
    /// The default heuristic level L ≥ N + ceil(log_p M) + 1; a suggestion
    /// only, `certify` always validates honestly.
    pub fn default_level(p: u64, degree_cap: i64, digits: i64) -> u32 {
        let mut log_term = 0u32;
        let mut acc = 1i64;
        while acc < degree_cap.max(1) {
            acc *= p as i64;
            log_term += 1;
        }
        (digits + log_term as i64 + 1).max(1) as u32
    }

    /// Validate by expanding every b^k honestly (repeated convolution), folding
    /// coordinates into the level-L group, and checking the echelon shape:
    /// support only at coordinates ≤ k componentwise and a unit coefficient on
    /// the diagonal entry k.
    pub fn certify(group: GroupId, p: u64, level: u32, degree_cap: i64, digits: i64) -> Result<Self> {
        if (p as i128).checked_pow(level).is_none_or(|m| m <= degree_cap as i128) {
            return Err(Error::CertificationFailed("degree cap at or above p^L".into()));
        }
        let modulus = (p as i128).pow(level);
        let nroots = roots_count(group);
        let prec = digits;
        let gens: Vec<DistElt> =
            (0..nroots).map(|i| DistElt::b_gen(group, p, level, prec, i)).collect();
        // walk monomials in graded order, reusing partial products
        let mut table: BTreeMap<ExpVec, DistElt> = BTreeMap::new();
        table.insert(vec![0; nroots], DistElt::one(group, p, level, prec));
        let mut frontier: Vec<ExpVec> = vec![vec![0; nroots]];
        while let Some(k) = frontier.pop() {
            let deg: i64 = k.iter().sum();
            if deg >= degree_cap {
                continue;
            }
            // extend in the last nonzero slot or later to keep the order fixed
            let start = k.iter().rposition(|&e| e > 0).unwrap_or(0);
            for i in start..nroots {
                let mut k2 = k.clone();
                k2[i] += 1;
                if table.contains_key(&k2) {
                    continue;
                }
                let prod = table[&k].mul(&gens[i])?;
                // fold into the level-L group algebra
                let mut folded: BTreeMap<GroupCoords, PadicScalar> = BTreeMap::new();
                for (g, c) in prod.terms() {
                    let key: GroupCoords = g.iter().map(|&x| x.rem_euclid(modulus)).collect();
                    match folded.remove(&key) {
                        Some(acc) => {
                            folded.insert(key, acc.add(c)?);
                        }
                        None => {
                            folded.insert(key, c.clone());
                        }
                    }
                }
                let diag: GroupCoords = k2.iter().map(|&e| e as i128).collect();
                let mut diag_ok = false;
                for (g, c) in &folded {
                    if c.is_zero() {
                        continue;
                    }
                    let inside = g.iter().zip(&k2).all(|(&x, &e)| x >= 0 && x <= e as i128);
                    if !inside {
                        return Err(Error::CertificationFailed(format!(
                            "monomial b^{k2:?} leaves the echelon block at {g:?} (level {level})"
                        )));
                    }
                    if *g == diag {
                        if c.valuation() != Some(0) {
                            return Err(Error::CertificationFailed(format!(
                                "diagonal coefficient of b^{k2:?} is not a unit"
                            )));
                        }
                        diag_ok = true;
                    }
                }
                if !diag_ok {
                    return Err(Error::CertificationFailed(format!(
                        "diagonal entry of b^{k2:?} vanished"
                    )));
                }
                table.insert(k2.clone(), prod);
                frontier.push(k2);
            }
        }
        Ok(BasisCert { group, p, level, degree_cap, digits })
    }

    fn check_compatible(&self, x: &DistElt) -> Result<()> {
        if self.group != x.group || self.p != x.p || self.level != x.level {
            return Err(Error::CertificationFailed(
                "certificate does not match the element's group/level".into(),
            ));
        }
        Ok(())
    }
}
