//! GL_n root data, the torus monoid T₊ with its ≤_α pre-order, unipotent
//! groups N₀ in coordinates, the functional ℓ with its splitting ι, and the
//! finite quotients H₁/H_k with their coset combinatorics.
//!
//! Built-in quotient towers exist for GL₂ (trivial: H₁ = 1) and GL₃ (the
//! Heisenberg group over Z_p). The unitriangular arithmetic itself is generic
//! in n.

use crate::error::{Error, Result};
use crate::padic::PadicScalar;
use std::collections::BTreeMap;
use std::fmt;

pub type RootPair = (usize, usize);

/// Positive-root combinatorics of GL_n with a distinguished simple root α
/// (the microlocal direction; ℓ = ℓ_α projects onto its coordinate).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDatum {
    n: usize,
    alpha: RootPair,
}

impl RootDatum {
    /// The GL_n datum with ξ(x) = diag(x^{n−1}, …, 1) and α the first simple root.
    pub fn gl(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("root datum needs n >= 2".into()));
        }
        Ok(RootDatum { n, alpha: (1, 2) })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> RootPair {
        self.alpha
    }

    /// Positive roots (i, j), i < j, as pairs of 1-based indices.
    pub fn positive_roots(&self) -> Vec<RootPair> {
        let mut v = Vec::new();
        for i in 1..=self.n {
            for j in (i + 1)..=self.n {
                v.push((i, j));
            }
        }
        v
    }

    pub fn simple_roots(&self) -> Vec<RootPair> {
        (1..self.n).map(|i| (i, i + 1)).collect()
    }

    pub fn is_simple(&self, beta: RootPair) -> bool {
        beta.1 == beta.0 + 1
    }

    /// Degree m_β of β∘ξ (for (i,j) this is j − i).
    pub fn degree(&self, beta: RootPair) -> i64 {
        (beta.1 - beta.0) as i64
    }

    /// ξ exponents (n−1, n−2, …, 0).
    pub fn xi_exponents(&self) -> Vec<i64> {
        (0..self.n).map(|i| (self.n - 1 - i) as i64).collect()
    }

    /// Roots in the fixed total order: larger degree first, α last among the
    /// rest ties broken lexicographically. For GL₃ this is γ < β < α.
    pub fn ordered_roots(&self) -> Vec<RootPair> {
        let mut roots = self.positive_roots();
        let alpha = self.alpha;
        roots.sort_by_key(|&r| (-(self.degree(r)), (r == alpha) as u8, r));
        roots
    }

    /// s = ξ(p) as a torus element.
    pub fn s_elt(&self, p: u64, prec: u32) -> TorusElt {
        TorusElt::from_valuations(p, &self.xi_exponents(), prec)
    }

    /// s_ᾱ: |α(·)| = 1 and |β(·)| < 1 for every other positive root.
    pub fn s_bar_alpha(&self, p: u64, prec: u32) -> TorusElt {
        let mut vals = vec![0i64; self.n];
        for i in (0..self.n - 1).rev() {
            let w = if (i + 1, i + 2) == self.alpha { 0 } else { 1 };
            vals[i] = vals[i + 1] + w;
        }
        TorusElt::from_valuations(p, &vals, prec)
    }
}

/// A diagonal torus element; the valuation vector carries the arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusElt {
    p: u64,
    entries: Vec<PadicScalar>,
}

impl TorusElt {
    pub fn new(p: u64, entries: Vec<PadicScalar>) -> Result<Self> {
        if entries.iter().any(|e| e.is_zero()) {
            return Err(Error::InvalidArgument("torus element with zero entry".into()));
        }
        Ok(TorusElt { p, entries })
    }

    pub fn from_valuations(p: u64, vals: &[i64], prec: u32) -> Self {
        let entries = vals.iter().map(|&v| PadicScalar::from_unit_parts(p, v, 1, prec)).collect();
        TorusElt { p, entries }
    }

    pub fn identity(p: u64, n: usize, prec: u32) -> Self {
        Self::from_valuations(p, &vec![0; n], prec)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn entries(&self) -> &[PadicScalar] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.entries.len() != other.entries.len() {
            return Err(Error::InvalidArgument("torus dimension mismatch".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.mul(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(TorusElt { p: self.p, entries })
    }

    pub fn inv(&self) -> Result<Self> {
        let entries = self.entries.iter().map(|a| a.inv()).collect::<Result<Vec<_>>>()?;
        Ok(TorusElt { p: self.p, entries })
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = Self::identity(self.p, self.entries.len(), 8);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }
}

/// β(t) = t_i/t_j together with its valuation m(β, t).
pub fn root_eval(datum: &RootDatum, beta: RootPair, t: &TorusElt) -> Result<(PadicScalar, i64)> {
    if t.dim() != datum.rank() {
        return Err(Error::InvalidArgument("torus element has wrong rank".into()));
    }
    let v = t.entries[beta.0 - 1].div(&t.entries[beta.1 - 1])?;
    let m = v.valuation().expect("nonzero entries");
    Ok((v, m))
}

/// t ∈ T₊ ⟺ m(α', t) ≥ 0 for every simple root α'.
pub fn in_tplus(datum: &RootDatum, t: &TorusElt) -> Result<bool> {
    for a in datum.simple_roots() {
        if root_eval(datum, a, t)?.1 < 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// t₁ ≤_α t₂ ⟺ m(β, t₂t₁⁻¹) ≥ m(α, t₂t₁⁻¹) ≥ 0 for every β ∈ Φ⁺.
pub fn leq_alpha(datum: &RootDatum, t1: &TorusElt, t2: &TorusElt) -> Result<bool> {
    let d = t2.mul(&t1.inv()?)?;
    let ma = root_eval(datum, datum.alpha(), &d)?.1;
    if ma < 0 {
        return Ok(false);
    }
    for b in datum.positive_roots() {
        if root_eval(datum, b, &d)?.1 < ma {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A common ≤_α upper bound of t₁ and t₂ of the form base·s_ᾱ^k for the
/// smallest sufficient k, base being whichever argument contracts the α
/// direction more.
pub fn upper_bound(datum: &RootDatum, t1: &TorusElt, t2: &TorusElt) -> Result<TorusElt> {
    if !in_tplus(datum, t1)? || !in_tplus(datum, t2)? {
        return Err(Error::NotInTPlus("upper_bound needs T₊ arguments".into()));
    }
    let a = datum.alpha();
    let m1 = root_eval(datum, a, t1)?.1;
    let m2 = root_eval(datum, a, t2)?.1;
    let (base, other) = if m1 >= m2 { (t1, t2) } else { (t2, t1) };
    let sbar = datum.s_bar_alpha(base.p, 8);
    let d = base.mul(&other.inv()?)?;
    let ma = root_eval(datum, a, &d)?.1;
    let mut k = 0i64;
    for b in datum.positive_roots() {
        let mb = root_eval(datum, b, &d)?.1;
        let step = root_eval(datum, b, &sbar)?.1;
        if step == 0 {
            if mb < ma {
                return Err(Error::NotInTPlus("no bound along a flat direction".into()));
            }
            continue;
        }
        let need = ma - mb; // need mb + k·step ≥ ma
        if need > 0 {
            k = k.max((need + step - 1) / step);
        }
    }
    base.mul(&sbar.pow(k as u32)?)
}

/// Element of the unitriangular group in root coordinates. `level = Some(L)`
/// works modulo p^L; `level = None` keeps exact integer coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitriangularElt {
    p: u64,
    n: usize,
    level: Option<u32>,
    coords: BTreeMap<RootPair, i128>,
}

impl UnitriangularElt {
    pub fn identity(p: u64, n: usize, level: Option<u32>) -> Self {
        UnitriangularElt { p, n, level, coords: BTreeMap::new() }
    }

    pub fn generator(p: u64, n: usize, level: Option<u32>, beta: RootPair, x: i128) -> Self {
        let mut g = Self::identity(p, n, level);
        g.set_coord(beta, x);
        g
    }

    pub fn prime(&self) -> u64 {
        self.p
    }
    pub fn rank(&self) -> usize {
        self.n
    }
    pub fn level(&self) -> Option<u32> {
        self.level
    }

    fn modulus(&self) -> Option<i128> {
        self.level.map(|l| (self.p as i128).pow(l))
    }

    fn reduce(&mut self) {
        if let Some(m) = self.modulus() {
            let mut out = BTreeMap::new();
            for (&r, &x) in &self.coords {
                let y = x.rem_euclid(m);
                if y != 0 {
                    out.insert(r, y);
                }
            }
            self.coords = out;
        } else {
            self.coords.retain(|_, &mut x| x != 0);
        }
    }

    pub fn set_coord(&mut self, beta: RootPair, x: i128) {
        self.coords.insert(beta, x);
        self.reduce();
    }

    pub fn coord(&self, beta: RootPair) -> i128 {
        self.coords.get(&beta).copied().unwrap_or(0)
    }

    /// Full matrix entries above the diagonal.
    fn matrix(&self) -> Vec<Vec<i128>> {
        let n = self.n;
        let mut m = vec![vec![0i128; n]; n];
        for i in 0..n {
            m[i][i] = 1;
        }
        for (&(i, j), &x) in &self.coords {
            m[i - 1][j - 1] = x;
        }
        m
    }

    fn from_matrix(p: u64, level: Option<u32>, m: &[Vec<i128>]) -> Self {
        let n = m.len();
        let mut g = Self::identity(p, n, level);
        for i in 0..n {
            for j in (i + 1)..n {
                if m[i][j] != 0 {
                    g.coords.insert((i + 1, j + 1), m[i][j]);
                }
            }
        }
        g.reduce();
        g
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.p != other.p || self.n != other.n || self.level != other.level {
            return Err(Error::InvalidArgument("unitriangular operands disagree".into()));
        }
        let (a, b) = (self.matrix(), other.matrix());
        let n = self.n;
        let mut c = vec![vec![0i128; n]; n];
        for i in 0..n {
            for j in i..n {
                let mut acc: i128 = 0;
                for k in i..=j {
                    acc = acc
                        .checked_add(a[i][k].checked_mul(b[k][j]).ok_or_else(overflow)?)
                        .ok_or_else(overflow)?;
                }
                c[i][j] = acc;
            }
        }
        Ok(Self::from_matrix(self.p, self.level, &c))
    }

    pub fn inv(&self) -> Result<Self> {
        // (1 + N)^{-1} = Σ (−N)^k, N strictly upper triangular and nilpotent
        let n = self.n;
        let a = self.matrix();
        let mut nil = vec![vec![0i128; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                nil[i][j] = a[i][j];
            }
        }
        let mut acc = vec![vec![0i128; n]; n];
        for (i, row) in acc.iter_mut().enumerate() {
            row[i] = 1;
        }
        let mut pow = nil.clone();
        let mut sign = -1i128;
        for _ in 1..n {
            for i in 0..n {
                for j in 0..n {
                    acc[i][j] += sign * pow[i][j];
                }
            }
            // pow ← pow·nil
            let mut next = vec![vec![0i128; n]; n];
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0i128;
                    for k in 0..n {
                        s += pow[i][k] * nil[k][j];
                    }
                    next[i][j] = s;
                }
            }
            pow = next;
            sign = -sign;
        }
        Ok(Self::from_matrix(self.p, self.level, &acc))
    }

    /// ℓ(g): the α-coordinate.
    pub fn ell(&self, datum: &RootDatum) -> i128 {
        self.coord(datum.alpha())
    }

    /// Conjugation by t: every coordinate x_β scales by β(t). Requires t to
    /// have p-power entries when the element is exact; at level L the unit
    /// part acts through its residue.
    pub fn phi_t(&self, datum: &RootDatum, t: &TorusElt) -> Result<Self> {
        if !in_tplus(datum, t)? {
            return Err(Error::NotInTPlus("phi_t needs t in T₊".into()));
        }
        let mut out = Self::identity(self.p, self.n, self.level);
        for (&r, &x) in &self.coords {
            let (val, m) = root_eval(datum, r, t)?;
            if m < 0 {
                return Err(Error::NotInTPlus("negative root valuation".into()));
            }
            let scale: i128 = match self.level {
                Some(l) => {
                    if m >= l as i64 {
                        0
                    } else {
                        let unit = val.unit().expect("nonzero") as i128;
                        let pm = (self.p as i128).pow(m as u32);
                        let modl = (self.p as i128).pow(l);
                        unit % modl * pm % modl
                    }
                }
                None => {
                    if val.unit() != Some(1) {
                        return Err(Error::LevelOverflow(
                            "exact coordinates support only p-power torus entries".into(),
                        ));
                    }
                    if m > 90 {
                        return Err(Error::LevelOverflow("p-power shift too large".into()));
                    }
                    (self.p as i128).pow(m as u32)
                }
            };
            out.coords.insert(r, x * scale);
        }
        out.reduce();
        Ok(out)
    }
}

fn overflow() -> Error {
    Error::LevelOverflow("integer overflow in exact unitriangular arithmetic".into())
}

/// ι(x) = n_α(x), the fixed φ-equivariant splitting of ℓ.
pub fn iota(datum: &RootDatum, p: u64, level: Option<u32>, x: i128) -> UnitriangularElt {
    UnitriangularElt::generator(p, datum.rank(), level, datum.alpha(), x)
}

/// Which built-in quotient tower a skew ring lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupId {
    Gl2,
    Gl3,
}

impl GroupId {
    pub fn rank(self) -> usize {
        match self {
            GroupId::Gl2 => 2,
            GroupId::Gl3 => 3,
        }
    }

    pub fn datum(self) -> RootDatum {
        RootDatum::gl(self.rank()).expect("rank >= 2")
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupId::Gl2 => write!(f, "GL2"),
            GroupId::Gl3 => write!(f, "GL3"),
        }
    }
}

/// Canonical representative of a class in H₁/H_k: digit coordinates per
/// non-α root in the fixed root order (empty for GL₂).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuotKey(pub Vec<u64>);

impl QuotKey {
    pub fn identity(group: GroupId) -> Self {
        match group {
            GroupId::Gl2 => QuotKey(vec![]),
            GroupId::Gl3 => QuotKey(vec![0, 0]),
        }
    }
}

impl fmt::Display for QuotKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// The finite level H₁/H_k of a built-in group: for GL₃ the coordinates are
/// (y, z) for n_β(y)n_γ(z) modulo p^{k−1}, with H_k the normal closure of
/// φ^{k−1}(H₁); for GL₂ every quotient is trivial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientSpec {
    pub group: GroupId,
    pub p: u64,
    pub level: u32,
    /// conjugation exponent: ι(p^{c_k}) centralizes H₁/H_k
    pub c_k: u32,
}

impl QuotientSpec {
    pub fn new(group: GroupId, p: u64, level: u32) -> Result<Self> {
        if level < 1 {
            return Err(Error::InvalidArgument("quotient level k >= 1".into()));
        }
        let c_k = match group {
            GroupId::Gl2 => 0,
            GroupId::Gl3 => level - 1,
        };
        Ok(QuotientSpec { group, p, level, c_k })
    }

    /// Modulus p^{k−1} of each coordinate (1 for GL₂ or k = 1).
    pub fn coord_modulus(&self) -> u64 {
        match self.group {
            GroupId::Gl2 => 1,
            GroupId::Gl3 => self.p.pow(self.level - 1),
        }
    }

    pub fn size(&self) -> u64 {
        match self.group {
            GroupId::Gl2 => 1,
            GroupId::Gl3 => self.coord_modulus().pow(2),
        }
    }

    pub fn keys(&self) -> Vec<QuotKey> {
        match self.group {
            GroupId::Gl2 => vec![QuotKey(vec![])],
            GroupId::Gl3 => {
                let m = self.coord_modulus();
                let mut v = Vec::with_capacity((m * m) as usize);
                for y in 0..m {
                    for z in 0..m {
                        v.push(QuotKey(vec![y, z]));
                    }
                }
                v
            }
        }
    }

    pub fn canonical(&self, key: &QuotKey) -> QuotKey {
        match self.group {
            GroupId::Gl2 => QuotKey(vec![]),
            GroupId::Gl3 => {
                let m = self.coord_modulus();
                QuotKey(vec![key.0[0] % m, key.0[1] % m])
            }
        }
    }

    /// Class of an H₁ element given by exact coordinates.
    pub fn key_of(&self, h: &UnitriangularElt, datum: &RootDatum) -> Result<QuotKey> {
        if h.ell(datum) != 0 {
            return Err(Error::InvalidArgument("element not in H₁ (nonzero ℓ)".into()));
        }
        match self.group {
            GroupId::Gl2 => Ok(QuotKey(vec![])),
            GroupId::Gl3 => {
                let m = self.coord_modulus() as i128;
                let y = h.coord((2, 3)).rem_euclid(m) as u64;
                let z = h.coord((1, 3)).rem_euclid(m) as u64;
                Ok(QuotKey(vec![y, z]))
            }
        }
    }

    /// Group law of the (abelian) H₁/H_k.
    pub fn key_mul(&self, a: &QuotKey, b: &QuotKey) -> QuotKey {
        match self.group {
            GroupId::Gl2 => QuotKey(vec![]),
            GroupId::Gl3 => {
                let m = self.coord_modulus();
                QuotKey(vec![(a.0[0] + b.0[0]) % m, (a.0[1] + b.0[1]) % m])
            }
        }
    }

    pub fn key_inv(&self, a: &QuotKey) -> QuotKey {
        match self.group {
            GroupId::Gl2 => QuotKey(vec![]),
            GroupId::Gl3 => {
                let m = self.coord_modulus();
                QuotKey(vec![(m - a.0[0] % m) % m, (m - a.0[1] % m) % m])
            }
        }
    }

    /// Conjugation ι(x)⁻¹·h·ι(x): for GL₃, (y, z) ↦ (y, z − x·y).
    pub fn conj_by_iota(&self, x: i128, key: &QuotKey) -> QuotKey {
        match self.group {
            GroupId::Gl2 => QuotKey(vec![]),
            GroupId::Gl3 => {
                let m = self.coord_modulus() as i128;
                let y = key.0[0] as i128;
                let z = key.0[1] as i128;
                let z2 = (z - x.rem_euclid(m) * y).rem_euclid(m) as u64;
                QuotKey(vec![key.0[0], z2])
            }
        }
    }

    /// Induced φ on H₁/H_k: for GL₃, (y, z) ↦ (p·y, p²·z).
    pub fn key_phi(&self, key: &QuotKey) -> QuotKey {
        match self.group {
            GroupId::Gl2 => QuotKey(vec![]),
            GroupId::Gl3 => {
                let m = self.coord_modulus();
                QuotKey(vec![key.0[0] * self.p % m, key.0[1] * self.p % m * self.p % m])
            }
        }
    }

    /// Reduce a key to a coarser level l ≤ k.
    pub fn key_reduce(&self, key: &QuotKey, coarser: &QuotientSpec) -> QuotKey {
        coarser.canonical(key)
    }

    /// Representatives of φ(H₁)\H₁ modulo H_k: for GL₃ digit pairs (j₁, j₂)
    /// with j₁ < p, j₂ < p².
    pub fn reps_phi_h1_in_h1(&self) -> Vec<QuotKey> {
        match self.group {
            GroupId::Gl2 => vec![QuotKey(vec![])],
            GroupId::Gl3 => {
                let (p, p2) = (self.p, self.p * self.p);
                let mut v = Vec::new();
                for j1 in 0..p {
                    for j2 in 0..p2 {
                        v.push(QuotKey(vec![j1, j2]));
                    }
                }
                v
            }
        }
    }

    /// Write h = φ(u)·v with v the canonical representative of φ(H₁)\H₁.
    pub fn factor_phi(&self, key: &QuotKey) -> Result<(QuotKey, QuotKey)> {
        match self.group {
            GroupId::Gl2 => Ok((QuotKey(vec![]), QuotKey(vec![]))),
            GroupId::Gl3 => {
                if self.level < 3 {
                    return Err(Error::LevelTooSmall(format!(
                        "factor_phi needs H_k ⊆ φ(H₀), i.e. level ≥ 3 (got {})",
                        self.level
                    )));
                }
                let m = self.coord_modulus();
                let (p, p2) = (self.p, self.p * self.p);
                let (y, z) = (key.0[0], key.0[1]);
                let vy = y % p;
                let vz = z % p2;
                // u is determined modulo the preimage of H_k
                let uy = (y - vy) / p % m;
                let uz = (z - vz) / p2 % m;
                Ok((QuotKey(vec![uy, uz]), QuotKey(vec![vy, vz])))
            }
        }
    }
}

/// The T₊-action on the series coefficient ring through ℓ: writing
/// α(t) = p^m·u, the action is γ_u ∘ φ^m.
pub fn tplus_act_series(
    datum: &RootDatum,
    t: &TorusElt,
    f: &crate::series::LaurentSeries,
) -> Result<crate::series::LaurentSeries> {
    if !in_tplus(datum, t)? {
        return Err(Error::NotInTPlus("series action needs t ∈ T₊".into()));
    }
    let (val, m) = root_eval(datum, datum.alpha(), t)?;
    let phi_part = f.frobenius(m as u32)?;
    let unit = val.div(&PadicScalar::from_unit_parts(t.prime(), m, 1, val.rel_prec().max(1)))?;
    if unit.unit() == Some(1) {
        Ok(phi_part)
    } else {
        phi_part.gamma_act(&unit)
    }
}

/// Digit representatives of N₀/φ_t(N₀): vectors (j_β)_{β} with
/// 0 ≤ j_β < p^{m(β,t)}, indexed in the fixed root order.
pub fn reps_n0_mod_phi_t(datum: &RootDatum, p: u64, t: &TorusElt) -> Result<Vec<Vec<u64>>> {
    if !in_tplus(datum, t)? {
        return Err(Error::NotInTPlus("coset representatives need t ∈ T₊".into()));
    }
    let mut sizes = Vec::new();
    for r in datum.ordered_roots() {
        let m = root_eval(datum, r, t)?.1;
        sizes.push(p.pow(m as u32));
    }
    let mut out = vec![vec![]];
    for &s in &sizes {
        let mut next = Vec::with_capacity(out.len() * s as usize);
        for v in &out {
            for d in 0..s {
                let mut w = v.clone();
                w.push(d);
                next.push(w);
            }
        }
        out = next;
    }
    Ok(out)
}
