//! The analytic layer: exact ρ-norms and spectral norms on monomial
//! coordinates, the closed form for transported generator norms, the q_t
//! norm from the coset decomposition, annulus certificates for the
//! microlocalized series rings, coefficient classification, the reduction
//! onto finite-level skew rings, and the divergence/kernel witnesses.
//!
//! Every comparison is an exact rational-exponent comparison.

use crate::distalg::{BasisCert, DistElt, MonElt};
use crate::error::{Error, Result};
use crate::groups::{in_tplus, root_eval, QuotientSpec, RootDatum, RootPair, TorusElt};
#[cfg(test)]
use crate::groups::GroupId;
use crate::padic::{max_digits, NormValue, PadicScalar, Rational, RhoExponent};
use crate::series::{AnalyticityClass, Certificate, LaurentSeries};
use crate::skewring::SkewElt;
use std::collections::BTreeMap;

/// Annulus certificate {ρ₂ < |b_α| < 1, |b_β| ≤ |b_α|^r}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Region {
    pub rho2: RhoExponent,
    pub r: i64,
}

impl Region {
    pub fn new(rho2: RhoExponent, r: i64) -> Result<Self> {
        if r < 1 {
            return Err(Error::InvalidArgument("region needs r >= 1".into()));
        }
        Ok(Region { rho2, r })
    }

    /// Containment of annuli: smaller inner radius and larger slope cover.
    pub fn covers(&self, other: &Region) -> bool {
        self.r >= other.r && self.rho2.exponent() >= other.rho2.exponent()
    }
}

/// Where a spectral norm is evaluated.
#[derive(Clone, Copy, Debug)]
pub enum NormAt {
    Single(RhoExponent),
    Pair(RhoExponent, RhoExponent),
}

fn eval_at(x: &MonElt, e: Rational) -> NormValue {
    let mut best = NormValue::Zero;
    for (k, c) in x.terms() {
        let deg: i64 = k.iter().sum();
        if let Some(v) = c.valuation() {
            let cand = NormValue::from_exponent(Rational::from_integer(v) + e * Rational::from_integer(deg));
            best = best.max(&cand);
        }
    }
    best
}

/// Spectral norm sup_k |d_k|·ρ^{|k|} (single ρ) or the max over the two radii
/// of an annulus. Errors when the truncation tail could reach the maximum.
pub fn spectral_norm(x: &MonElt, at: NormAt) -> Result<NormValue> {
    let value = match at {
        NormAt::Single(r) => eval_at(x, r.exponent()),
        NormAt::Pair(r1, r2) => eval_at(x, r1.exponent()).max(&eval_at(x, r2.exponent())),
    };
    if !x.complete {
        // hidden terms have degree > cap and coefficient valuation ≥ tail_val
        let tail_exp = |e: Rational| {
            Rational::from_integer(x.tail_val) + e * Rational::from_integer(x.degree_cap + 1)
        };
        let tail = match at {
            NormAt::Single(r) => NormValue::from_exponent(tail_exp(r.exponent())),
            NormAt::Pair(r1, r2) => NormValue::from_exponent(tail_exp(r1.exponent()))
                .max(&NormValue::from_exponent(tail_exp(r2.exponent()))),
        };
        if value.cmp_norm(&tail) != std::cmp::Ordering::Greater {
            return Err(Error::WindowInsufficient(format!(
                "truncation tail (bound {tail}) could dominate the stored maximum {value}"
            )));
        }
    }
    Ok(value)
}

/// Closed form ‖φ_t(b_β)‖_ρ = max_{0≤j≤m}(ρ^{p^j}·p^{j−m}) with m = val_p β(t).
pub fn phi_t_norm_closed(
    datum: &RootDatum,
    beta: RootPair,
    t: &TorusElt,
    rho: RhoExponent,
) -> Result<NormValue> {
    let (_, m) = root_eval(datum, beta, t)?;
    if m < 0 {
        return Err(Error::NotInTPlus(format!("negative valuation m({beta:?}, t) = {m}")));
    }
    let p = t.prime() as i64;
    let e = rho.exponent();
    let mut best: Option<Rational> = None;
    let mut pj: i64 = 1;
    for j in 0..=m {
        // exponent of p^{-(e·p^j + m − j)}
        let cand = e * Rational::from_integer(pj) + Rational::from_integer(m - j);
        best = Some(match best {
            None => cand,
            Some(b) => b.min(cand),
        });
        pj = pj.saturating_mul(p);
    }
    Ok(NormValue::from_exponent(best.expect("m >= 0")))
}

/// Brute-force oracle for the closed form: expand (1+b)^{β(t)} − 1 and take
/// the sup of |C(β(t), i)|·ρ^i over 1 ≤ i ≤ p^m (beyond which ρ^i < ρ^{p^m}).
pub fn phi_t_norm_brute(
    datum: &RootDatum,
    beta: RootPair,
    t: &TorusElt,
    rho: RhoExponent,
) -> Result<NormValue> {
    let (bt, m) = root_eval(datum, beta, t)?;
    if m < 0 {
        return Err(Error::NotInTPlus("brute-force norm needs t ∈ T₊".into()));
    }
    let p = t.prime();
    let e = rho.exponent();
    let top: i64 = (p as i64).pow(m as u32);
    // enough digits that every binomial valuation is certain
    let digits = (2 * m as u32 + 8).min(max_digits(p));
    let a = PadicScalar::from_unit_parts(p, m, bt.unit().expect("nonzero"), digits);
    let mut best: Option<Rational> = None;
    let row = PadicScalar::binom_row(&a, top as u64)?;
    for i in 1..=top {
        let b = &row[i as usize];
        let v = match b.valuation() {
            Some(v) => v,
            None => continue,
        };
        let cand = Rational::from_integer(v) + e * Rational::from_integer(i);
        best = Some(match best {
            None => cand,
            Some(x) => x.min(cand),
        });
    }
    Ok(NormValue::from_exponent(best.expect("nonempty expansion")))
}

/// ‖x‖_{q_t(r_t(ρ))} = max over coset components of ‖φ_t(x_n)‖_ρ.
pub fn qt_norm(x: &DistElt, t: &TorusElt, rho: RhoExponent, cert: &BasisCert) -> Result<NormValue> {
    let comps = x.coset_decompose(t)?;
    let mut best = NormValue::Zero;
    for xn in comps.values() {
        let transported = xn.phi_t(t)?;
        let mon = transported.to_monomial(cert)?;
        let v = spectral_norm(&mon, NormAt::Single(rho))?;
        best = best.max(&v);
    }
    Ok(best)
}

/// ‖x‖_ρ through the monomial coordinates.
pub fn rho_norm(x: &DistElt, rho: RhoExponent, cert: &BasisCert) -> Result<NormValue> {
    spectral_norm(&x.to_monomial(cert)?, NormAt::Single(rho))
}

/// The annulus certified for φ_t-transported series: slope from the paper's
/// integer-part formula, inner radius normalized to the midpoint exponent of
/// the guaranteed |z_α| range.
pub fn region_of_t(datum: &RootDatum, t: &TorusElt) -> Result<Region> {
    if !in_tplus(datum, t)? {
        return Err(Error::NotInTPlus("region_of_t needs t ∈ T₊".into()));
    }
    let p = t.prime() as i64;
    let alpha = datum.alpha();
    let mut r = 1i64;
    for beta in datum.positive_roots() {
        let m = root_eval(datum, beta, t)?.1;
        r = r.max(p.pow(m as u32) + 1);
    }
    let ma = root_eval(datum, alpha, t)?.1;
    let rho2 = RhoExponent::new(Rational::new(1, 2 * p.pow(ma as u32)))?;
    Region::new(rho2, r)
}

/// A torus element whose transported norms dominate the requested region:
/// s_ᾱ^k with k = max_β([log_p r / m(β, s_ᾱ)] + 1).
pub fn t_of_region(datum: &RootDatum, p: u64, reg: &Region) -> Result<TorusElt> {
    if reg.r < 1 {
        return Err(Error::InvalidArgument("region slope must be >= 1".into()));
    }
    let sbar = datum.s_bar_alpha(p, 8);
    let alpha = datum.alpha();
    let mut k = 1i64;
    for beta in datum.positive_roots() {
        if beta == alpha {
            continue;
        }
        let m = root_eval(datum, beta, &sbar)?.1;
        debug_assert!(m >= 1);
        // floor(log_p r) with respect to p^m
        let mut j = 0i64;
        let mut acc: i128 = 1;
        while acc * (p as i128).pow(m as u32) <= reg.r as i128 {
            acc *= (p as i128).pow(m as u32);
            j += 1;
        }
        k = k.max(j + 1);
    }
    sbar.pow(k as u32)
}

/// Coefficient classification by the valuation profile of the stored
/// monomial coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoeffClass {
    Integral,
    /// minimum valuation < 0 attained at the witness, profile not trending down
    Bounded { witness: Vec<i64>, valuation: i64 },
    /// valuations strictly decreasing into the deep end of the window
    General { witness: Vec<i64>, valuation: i64 },
}

/// Classify: min valuation ≥ 0 → integral; valuations strictly decreasing
/// along the three deepest stored negative α-exponents → general (unbounded
/// below on the window); otherwise bounded. A trend test on a truncation,
/// reported with the witnessing coefficient.
pub fn coeff_class_check(x: &MonElt) -> CoeffClass {
    let mut min_val = i64::MAX;
    let mut witness: Vec<i64> = vec![];
    // per negative α-exponent depth, the minimal valuation at that depth
    let mut depth_profile: BTreeMap<i64, i64> = BTreeMap::new();
    for (k, c) in x.terms() {
        let v = match c.valuation() {
            Some(v) => v,
            None => continue,
        };
        if v < min_val {
            min_val = v;
            witness = k.clone();
        }
        let alpha_exp = *k.last().expect("nonempty exponent vector");
        if alpha_exp < 0 {
            let e = depth_profile.entry(alpha_exp).or_insert(v);
            *e = (*e).min(v);
        }
    }
    if min_val >= 0 || min_val == i64::MAX {
        return CoeffClass::Integral;
    }
    let deepest: Vec<(i64, i64)> = depth_profile.iter().take(3).map(|(&d, &v)| (d, v)).collect();
    if deepest.len() == 3 && deepest[0].1 < deepest[1].1 && deepest[1].1 < deepest[2].1 {
        return CoeffClass::General { witness, valuation: min_val };
    }
    CoeffClass::Bounded { witness, valuation: min_val }
}

/// π_H: reduce the (γ, β)-part of a polynomial monomial element into the
/// level-l group algebra and send b_α to T, landing in the skew ring over the
/// series model. Integral inputs land in the overconvergent-model ring.
pub fn pi_h_map(x: &MonElt, level: u32, prec: i64) -> Result<SkewElt> {
    let group = x.group();
    let p = x.prime();
    let spec = QuotientSpec::new(group, p, level)?;
    let integral = x.terms().all(|(_, c)| c.valuation().is_none_or(|v| v >= 0));
    let class = if integral { AnalyticityClass::OEdagger } else { AnalyticityClass::Robba };
    let mut out = SkewElt::zero(spec.clone());
    let digits = (prec.max(1) as u32 + x.degree_cap as u32 + 4).min(max_digits(p));
    for (k, c) in x.terms() {
        let (n1_exps, alpha_exp) = k.split_at(k.len() - 1);
        if n1_exps.iter().any(|&e| e < 0) {
            return Err(Error::WindowInsufficient(
                "π_H needs a polynomial N₁-part (nonnegative non-α exponents)".into(),
            ));
        }
        // expand Π (n_i − 1)^{k_i} over quotient keys; monomials are ordered
        // (γ, β) while QuotKey stores (y, z) = (β, γ), so digits are swapped
        let mut keys: Vec<(Vec<u64>, PadicScalar)> = vec![(vec![], PadicScalar::one(p, digits))];
        let modulus = spec.coord_modulus();
        for &ki in n1_exps {
            let kk = PadicScalar::from_int(p, ki as i128, digits);
            let row = PadicScalar::binom_row(&kk, ki as u64)?;
            let mut next: Vec<(Vec<u64>, PadicScalar)> = Vec::new();
            for (digitsv, coef) in &keys {
                for (xv, b0) in row.iter().enumerate() {
                    let b = if (ki - xv as i64) % 2 == 1 { b0.neg() } else { b0.clone() };
                    let w = coef.mul(&b)?;
                    if w.is_zero() {
                        continue;
                    }
                    let mut d2 = digitsv.clone();
                    d2.push((xv as u64) % modulus.max(1));
                    next.push((d2, w));
                }
            }
            keys = next;
        }
        for (dv, _) in keys.iter_mut() {
            dv.reverse();
        }
        // the α-part becomes the series coefficient c·T^{k_α}
        let t_part = LaurentSeries::monomial(p, alpha_exp[0], prec, class)
            .with_class(Certificate::plain(class))
            .scale(c)?;
        let series_term = SkewElt::from_series(spec.clone(), t_part);
        let mut group_term = SkewElt::zero(spec.clone());
        for (dv, w) in keys {
            let key = crate::groups::QuotKey(dv);
            let coeffs = LaurentSeries::constant(p, w, prec, class);
            group_term = group_term.add(&SkewElt::from_term(spec.clone(), key, coeffs))?;
        }
        out = out.add(&group_term.mul(&series_term)?)?;
    }
    Ok(out)
}

/// Report from the log-division kernel witness.
#[derive(Clone, Debug)]
pub struct LogDivisionReport {
    pub r: u32,
    pub m_beta: i64,
    /// (degree i, valuation of c_i, required lower bound)
    pub rows: Vec<(i64, i64, i64)>,
    pub bound_holds: bool,
    /// φ^r(trunc log) = p^{r·m_β}·(trunc log) on the shared degrees
    pub eigen_identity: bool,
}

/// Divide the truncated log(1+b) by φ^r(b) and check the valuation profile
/// val(c_i) ≥ −r·m_β − ceil(log_p(i+1)), plus the φ-eigenvector identity of
/// the truncated log.
pub fn log_division_check(p: u64, r: u32, m_beta: i64, degree_window: i64, prec: i64) -> Result<LogDivisionReport> {
    let prm = (p as i64).pow((r as i64 * m_beta) as u32) as u64;
    // extra room: the division tail pollutes the top ~p^{rm}·prec degrees
    let slack = (prm as i64) * (prec + 2) + 4;
    let big = degree_window + slack;
    let digits = ((r as i64 * m_beta) + prec + 8).min(max_digits(p) as i64) as u32;
    // truncated log(1+b) up to degree `big`
    let mut log_terms = BTreeMap::new();
    for i in 1..=big {
        let inv_i = PadicScalar::from_int(p, i as i128, digits).inv()?;
        let c = if i % 2 == 0 { inv_i.neg() } else { inv_i };
        log_terms.insert(i, c);
    }
    let log_series = LaurentSeries::from_coeffs(
        p,
        prec,
        Certificate::plain(AnalyticityClass::Edagger),
        0,
        big + 1,
        log_terms,
    )?;
    let phi_r_b = LaurentSeries::one_plus_t_pow_int(p, prm, prec + r as i64 * m_beta + 2)
        .with_class(Certificate::plain(AnalyticityClass::Edagger));
    let q = log_series.mul(&phi_r_b.invert()?)?;
    let mut rows = Vec::new();
    let mut bound_holds = true;
    for i in 0..=degree_window {
        let v = q.coeff(i).and_then(|c| c.valuation());
        // ceil(log_p(i+1))
        let mut lg = 0i64;
        let mut acc: i64 = 1;
        while acc < i + 1 {
            acc *= p as i64;
            lg += 1;
        }
        let bound = -(r as i64) * m_beta - lg;
        let val = v.unwrap_or(i64::MAX);
        if val < bound {
            bound_holds = false;
        }
        rows.push((i, val.min(i64::MAX / 2), bound));
    }
    // eigenvector identity on the truncation
    let trunc = {
        let mut t = BTreeMap::new();
        for i in 1..=degree_window {
            let inv_i = PadicScalar::from_int(p, i as i128, digits).inv()?;
            let c = if i % 2 == 0 { inv_i.neg() } else { inv_i };
            t.insert(i, c);
        }
        LaurentSeries::from_coeffs(
            p,
            prec,
            Certificate::plain(AnalyticityClass::Edagger),
            0,
            degree_window + 1,
            t,
        )?
    };
    let lhs = trunc.frobenius(r * m_beta as u32)?;
    let scale = PadicScalar::from_unit_parts(p, r as i64 * m_beta, 1, prec.max(1) as u32);
    let rhs = trunc.scale(&scale)?;
    let eigen_identity = lhs
        .clone()
        .with_window(1, degree_window + 1)
        .agrees_with(&rhs.clone().with_window(1, degree_window + 1));
    Ok(LogDivisionReport { r, m_beta, rows, bound_holds, eigen_identity })
}

/// One row of the divergence witness table.
#[derive(Clone, Debug)]
pub struct WitnessRow {
    pub n: i64,
    pub untransported: NormValue,
    pub transported: NormValue,
}

#[derive(Clone, Debug)]
pub struct WitnessTable {
    pub rows: Vec<WitnessRow>,
    /// "not null": untransported term norms do not tend to zero
    pub untransported_null: bool,
    /// "null geometric": transported norms decay geometrically
    pub transported_null: bool,
}

/// Term norms of Σ b_γ^n·b_α^{−n} before and after φ_t-transport, for γ the
/// non-simple root of GL₃.
pub fn witness_series_ex(
    datum: &RootDatum,
    t: &TorusElt,
    rho: RhoExponent,
    n_max: i64,
) -> Result<WitnessTable> {
    if datum.rank() != 3 {
        return Err(Error::InvalidArgument("the witness series needs a non-simple root".into()));
    }
    let gamma = (1, 3);
    let alpha = datum.alpha();
    let e = rho.exponent();
    let norm_gamma = phi_t_norm_closed(datum, gamma, t, rho)?;
    let norm_alpha = phi_t_norm_closed(datum, alpha, t, rho)?;
    let ratio = norm_gamma
        .exponent()
        .ok_or_else(|| Error::InvalidArgument("zero transported norm".into()))?
        - norm_alpha.exponent().expect("nonzero");
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let untr = NormValue::from_exponent(e * Rational::from_integer(n) - e * Rational::from_integer(n));
        let tr = NormValue::from_exponent(ratio * Rational::from_integer(n));
        rows.push(WitnessRow { n, untransported: untr, transported: tr });
    }
    Ok(WitnessTable {
        rows,
        untransported_null: false,
        transported_null: ratio > Rational::from_integer(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distalg::MonElt;

    fn rho(n: i64, d: i64) -> RhoExponent {
        RhoExponent::from_parts(n, d).unwrap()
    }

    fn mon(group: GroupId, p: u64, terms: &[(Vec<i64>, i128, i64)]) -> MonElt {
        // (exponents, unit, valuation)
        let mut m = BTreeMap::new();
        for (k, u, v) in terms {
            let c = PadicScalar::from_unit_parts(p, *v, *u as u128, 8);
            m.insert(k.clone(), c);
        }
        MonElt::from_coeffs(group, p, 6, m).unwrap()
    }

    #[test]
    fn spectral_norm_examples() {
        let p = 2;
        // ‖b_α‖ at ρ = p^{−1/2} is p^{−1/2}
        let x = mon(GroupId::Gl2, p, &[(vec![1], 1, 0)]);
        assert_eq!(
            spectral_norm(&x, NormAt::Single(rho(1, 2))).unwrap(),
            NormValue::from_exponent(Rational::new(1, 2))
        );
        // ‖p·b_α^{−1}‖ at ρ = p^{−1/4} is p^{−3/4}
        let y = mon(GroupId::Gl2, p, &[(vec![-1], 1, 1)]);
        assert_eq!(
            spectral_norm(&y, NormAt::Single(rho(1, 4))).unwrap(),
            NormValue::from_exponent(Rational::new(3, 4))
        );
        // ‖b_α^{−2} b_β‖ at a pair attains the inner radius: ρ₁^{−1}
        let z = mon(GroupId::Gl3, p, &[(vec![0, 1, -2], 1, 0)]);
        let v = spectral_norm(&z, NormAt::Pair(rho(1, 2), rho(1, 4))).unwrap();
        assert_eq!(v, NormValue::from_exponent(Rational::new(-1, 2)));
    }

    #[test]
    fn closed_form_examples() {
        let d3 = RootDatum::gl(3).unwrap();
        // m = 0 → ρ
        let sbar = d3.s_bar_alpha(2, 8);
        let v = phi_t_norm_closed(&d3, d3.alpha(), &sbar, rho(1, 2)).unwrap();
        assert_eq!(v, NormValue::from_exponent(Rational::new(1, 2)));
        // p=2, m=1, ρ = 2^{−1/2} → max(2^{−3/2}, 2^{−1}) = 2^{−1}
        let s2 = d3.s_elt(2, 8);
        let v = phi_t_norm_closed(&d3, d3.alpha(), &s2, rho(1, 2)).unwrap();
        assert_eq!(v, NormValue::from_exponent(Rational::from_integer(1)));
        // p=3, m=2, ρ = 3^{−1/8} → 3^{−9/8}
        let d3p3 = RootDatum::gl(3).unwrap();
        let s3 = d3p3.s_elt(3, 8);
        let v = phi_t_norm_closed(&d3p3, (1, 3), &s3, rho(1, 8)).unwrap();
        assert_eq!(v, NormValue::from_exponent(Rational::new(9, 8)));
        // brute-force expansion oracle agrees on a grid
        for &p in &[2u64, 3] {
            let d = RootDatum::gl(3).unwrap();
            let s = d.s_elt(p, 8);
            let sb = d.s_bar_alpha(p, 8);
            let ssb = s.mul(&sb).unwrap();
            for t in [&s, &sb, &ssb] {
                for beta in d.positive_roots() {
                    for &(n, dd) in &[(1i64, 2i64), (1, 4), (1, 8)] {
                        let closed = phi_t_norm_closed(&d, beta, t, rho(n, dd)).unwrap();
                        let brute = phi_t_norm_brute(&d, beta, t, rho(n, dd)).unwrap();
                        assert_eq!(closed, brute, "p={p} beta={beta:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn qt_norm_gl2_tight() {
        // GL₂, p=2, t=s, x = b: q-norm = 1, ‖b‖_ρ = ρ, sandwich tight
        let p = 2;
        let d = RootDatum::gl(2).unwrap();
        let s = d.s_elt(p, 8);
        let cert = BasisCert::certify(GroupId::Gl2, p, 8, 8, 5).unwrap();
        let b = DistElt::b_gen(GroupId::Gl2, p, 8, 5, 0);
        let q = qt_norm(&b, &s, rho(1, 2), &cert).unwrap();
        assert_eq!(q, NormValue::one());
        let r = rho_norm(&b, rho(1, 2), &cert).unwrap();
        assert_eq!(r, NormValue::from_exponent(Rational::new(1, 2)));
        // sandwich: ‖x‖_ρ ≤ q ≤ ρ^{−Σ(p^m − 1)}·‖x‖_ρ = ρ^{−1}·ρ = 1, met with equality
        let sum: i64 = 1; // GL₂: one root with p^1 − 1 = 1
        let upper = NormValue::from_exponent(
            r.exponent().unwrap() - Rational::new(1, 2) * Rational::from_integer(sum),
        );
        assert_eq!(q, upper);
        assert!(r.cmp_norm(&q) != std::cmp::Ordering::Greater);
    }

    #[test]
    fn equivnorm_sandwich_random() {
        // both inequalities as exact comparisons on random degree-≤4 GL₃ polys
        let p = 3;
        let d = RootDatum::gl(3).unwrap();
        let s = d.s_elt(p, 8);
        let cert = BasisCert::certify(GroupId::Gl3, p, 6, 8, 4).unwrap();
        let sum_exp: i64 = (p as i64 - 1) + (p as i64 - 1) + (p as i64 * p as i64 - 1);
        let e = Rational::new(1, 4);
        let mut state: u64 = 2024;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..30 {
            let mut x = DistElt::zero(GroupId::Gl3, p, 6, 4);
            for _ in 0..3 {
                let coords =
                    vec![(next() % 4) as i128, (next() % 4) as i128, (next() % 4) as i128];
                x.set_coeff(coords, PadicScalar::from_int(p, (next() % 80) as i128 - 40, 8));
            }
            if x.is_zero_at_prec() {
                continue;
            }
            let nr = rho_norm(&x, rho(1, 4), &cert).unwrap();
            let nq = qt_norm(&x, &s, rho(1, 4), &cert).unwrap();
            // ‖x‖_ρ ≤ ‖x‖_q
            assert!(nr.cmp_norm(&nq) != std::cmp::Ordering::Greater, "left inequality");
            // ‖x‖_q ≤ ρ^{−Σ}·‖x‖_ρ
            let upper = NormValue::from_exponent(
                nr.exponent().unwrap() - e * Rational::from_integer(sum_exp),
            );
            assert!(nq.cmp_norm(&upper) != std::cmp::Ordering::Greater, "right inequality");
        }
    }

    #[test]
    fn region_examples() {
        let d = RootDatum::gl(3).unwrap();
        for &p in &[2u64, 3] {
            // region_of_t(s_ᾱ) has r = p + 1
            let sb = d.s_bar_alpha(p, 8);
            let reg = region_of_t(&d, &sb).unwrap();
            assert_eq!(reg.r, p as i64 + 1);
            // t_of_region(r = 1) = s_ᾱ
            let reg1 = Region::new(rho(1, 2), 1).unwrap();
            let t1 = t_of_region(&d, p, &reg1).unwrap();
            assert_eq!(t1, sb);
        }
        // p = 2, r = 3 → k = [log₂ 3] + 1 = 2
        let reg3 = Region::new(rho(1, 2), 3).unwrap();
        let t3 = t_of_region(&d, 2, &reg3).unwrap();
        let sb = d.s_bar_alpha(2, 8);
        assert_eq!(t3, sb.mul(&sb).unwrap());
        // roundtrip covering
        for r in [2i64, 3, 5] {
            for &p in &[2u64, 3] {
                let want = Region::new(rho(1, 2), r).unwrap();
                let t = t_of_region(&d, p, &want).unwrap();
                let got = region_of_t(&d, &t).unwrap();
                assert!(got.covers(&want), "cover fails p={p} r={r}: got {got:?}");
            }
        }
    }

    #[test]
    fn classification_examples() {
        let p = 3;
        // all integral
        let x = mon(GroupId::Gl2, p, &[(vec![2], 1, 0), (vec![-1], 1, 2)]);
        assert_eq!(coeff_class_check(&x), CoeffClass::Integral);
        // one p^{−3} among integral → bounded
        let y = mon(GroupId::Gl2, p, &[(vec![2], 1, 0), (vec![-2], 1, -3), (vec![-1], 1, 0)]);
        match coeff_class_check(&y) {
            CoeffClass::Bounded { valuation, .. } => assert_eq!(valuation, -3),
            other => panic!("expected bounded, got {other:?}"),
        }
        // coefficient p^{−n} at b_α^{−n} down the window → general
        let terms: Vec<(Vec<i64>, i128, i64)> = (1..=5).map(|n| (vec![-n], 1, -n)).collect();
        let z = mon(GroupId::Gl2, p, &terms);
        match coeff_class_check(&z) {
            CoeffClass::General { valuation, .. } => assert_eq!(valuation, -5),
            other => panic!("expected general, got {other:?}"),
        }
    }

    #[test]
    fn pi_h_examples() {
        let p = 3;
        // π(n_β(1)) = 1·(image of n_β(1)): n_β(1) = 1 + b_β
        let x = mon(GroupId::Gl3, p, &[(vec![0, 0, 0], 1, 0), (vec![0, 1, 0], 1, 0)]);
        let img = pi_h_map(&x, 2, 6).unwrap();
        let spec = QuotientSpec::new(GroupId::Gl3, p, 2).unwrap();
        let expect = SkewElt::from_term(
            spec.clone(),
            crate::groups::QuotKey(vec![1, 0]),
            LaurentSeries::one(p, 6, AnalyticityClass::OEdagger),
        );
        assert!(img.agrees_with(&expect), "got {img}");
        // pure α-monomials pass through as T-powers, negative exponents included
        let y = mon(GroupId::Gl3, p, &[(vec![0, 0, -2], 1, 0), (vec![0, 0, 1], 2, 1)]);
        let img = pi_h_map(&y, 2, 6).unwrap();
        let series = LaurentSeries::monomial(p, -2, 6, AnalyticityClass::OEdagger)
            .add(&LaurentSeries::from_int_terms(p, 6, AnalyticityClass::OEdagger, &[(1, 6)]))
            .unwrap();
        let expect = SkewElt::from_series(spec.clone(), series);
        assert!(img.agrees_with(&expect), "got {img}");
        // left multiplication by a T-power is plain linearity over the α-variable
        let x_wall = mon(GroupId::Gl3, p, &[(vec![1, 1, 0], 1, 0), (vec![0, 2, 0], 2, 0)]);
        let img_wall = pi_h_map(&x_wall, 2, 6).unwrap();
        let t_inv = SkewElt::from_series(
            spec.clone(),
            LaurentSeries::monomial(p, -1, 6, AnalyticityClass::OEdagger),
        );
        let lhs = t_inv.mul(&img_wall).unwrap();
        let mut shifted = SkewElt::zero(spec.clone());
        for (key, r) in img_wall.terms() {
            shifted = shifted
                .add(&SkewElt::from_term(spec.clone(), key.clone(), r.shift(-1)))
                .unwrap();
        }
        assert!(lhs.agrees_with(&shifted), "T^{{-1}} does not pass through:\n{lhs}\nvs\n{shifted}");
        // multiplicativity on certified polynomial pairs (skew_mul oracle)
        let cert = BasisCert::certify(GroupId::Gl3, p, 5, 8, 4).unwrap();
        let mut state: u64 = 13579;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..12 {
            let mut a = DistElt::zero(GroupId::Gl3, p, 5, 4);
            let mut b = DistElt::zero(GroupId::Gl3, p, 5, 4);
            // coordinates stay ≤ 1 so the convolution's Mahler expansion is
            // complete under the degree cap of the certificate
            for _ in 0..2 {
                a.set_coeff(
                    vec![(next() % 2) as i128, (next() % 2) as i128, (next() % 2) as i128],
                    PadicScalar::from_int(p, (next() % 17) as i128 - 8, 7),
                );
                b.set_coeff(
                    vec![(next() % 2) as i128, (next() % 2) as i128, (next() % 2) as i128],
                    PadicScalar::from_int(p, (next() % 17) as i128 - 8, 7),
                );
            }
            let ab = a.mul(&b).unwrap();
            let lhs = pi_h_map(&ab.to_monomial(&cert).unwrap(), 2, 6).unwrap();
            let rhs = pi_h_map(&a.to_monomial(&cert).unwrap(), 2, 6)
                .unwrap()
                .mul(&pi_h_map(&b.to_monomial(&cert).unwrap(), 2, 6).unwrap())
                .unwrap();
            assert!(lhs.agrees_with(&rhs), "π not multiplicative:\n{lhs}\nvs\n{rhs}");
        }
    }

    #[test]
    fn log_division_examples() {
        // r = 0: q = log(1+b)/b with c_i = (−1)^i/(i+1): spot check via r=1 example
        // p=2, r=1, m_β=1: q = 1/2 − b/2 + …, val(c₀) = −1 meets −1 − 0
        let rep = log_division_check(2, 1, 1, 12, 6).unwrap();
        assert!(rep.bound_holds);
        assert!(rep.eigen_identity);
        assert_eq!(rep.rows[0].1, -1);
        assert_eq!(rep.rows[0].2, -1);
        assert_eq!(rep.rows[1].1, -1); // −b/2
        // scan both primes at r ∈ {1, 2}, i ≤ 30 (acceptance widens to 50)
        for &p in &[2u64, 3] {
            for r in 1..=2u32 {
                let rep = log_division_check(p, r, 1, 30, 5).unwrap();
                assert!(rep.bound_holds, "bound fails p={p} r={r}");
                assert!(rep.eigen_identity, "eigen identity fails p={p} r={r}");
            }
        }
    }

    #[test]
    fn witness_table() {
        let d = RootDatum::gl(3).unwrap();
        let s = d.s_elt(2, 8);
        let table = witness_series_ex(&d, &s, rho(1, 2), 8).unwrap();
        assert!(!table.untransported_null);
        assert!(table.transported_null);
        for row in &table.rows {
            assert_eq!(row.untransported, NormValue::one());
            // transported term norm is exactly 2^{−n}
            assert_eq!(row.transported, NormValue::from_exponent(Rational::from_integer(row.n)));
        }
        // t = s_ᾱ also yields a null sequence
        let sb = d.s_bar_alpha(2, 8);
        let table = witness_series_ex(&d, &sb, rho(1, 2), 4).unwrap();
        assert!(table.transported_null);
    }

    #[test]
    fn norm_multiplicativity_on_generators() {
        // ‖xy‖ = ‖x‖·‖y‖ for monomial×monomial and monomial×unit pairs
        let p = 3;
        let cert = BasisCert::certify(GroupId::Gl3, p, 6, 10, 4).unwrap();
        let b = |i: usize| DistElt::b_gen(GroupId::Gl3, p, 6, 4, i);
        // order-aligned products (no collection past the fixed root order):
        // their max-attaining terms are the plain concatenated monomials.
        let pairs = vec![
            (b(0), b(1)),
            (b(1), b(2)),
            (b(0), b(2)),
            (b(0).mul(&b(1)).unwrap(), b(2)),
            (DistElt::delta(GroupId::Gl3, p, 6, 4, vec![1, 0, 0]), b(2)),
        ];
        let r = rho(1, 4);
        for (x, y) in pairs {
            let nx = rho_norm(&x, r, &cert).unwrap();
            let ny = rho_norm(&y, r, &cert).unwrap();
            let nxy = rho_norm(&x.mul(&y).unwrap(), r, &cert).unwrap();
            assert_eq!(nxy, nx.mul(&ny), "multiplicativity fails");
        }
        // submultiplicativity on random pairs
        let mut state: u64 = 86420;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..25 {
            // left factors without α-coordinate: the group law then collects
            // nothing, which is the sector where the equal-weight norm laws
            // hold on the integral chart
            let mut x = DistElt::zero(GroupId::Gl3, p, 6, 4);
            let mut y = DistElt::zero(GroupId::Gl3, p, 6, 4);
            for _ in 0..2 {
                x.set_coeff(
                    vec![(next() % 4) as i128, (next() % 4) as i128, 0],
                    PadicScalar::from_int(p, (next() % 15) as i128 - 7, 7),
                );
                y.set_coeff(
                    vec![(next() % 4) as i128, (next() % 4) as i128, (next() % 4) as i128],
                    PadicScalar::from_int(p, (next() % 15) as i128 - 7, 7),
                );
            }
            if x.is_zero_at_prec() || y.is_zero_at_prec() {
                continue;
            }
            let nx = rho_norm(&x, r, &cert).unwrap();
            let ny = rho_norm(&y, r, &cert).unwrap();
            let nxy = rho_norm(&x.mul(&y).unwrap(), r, &cert).unwrap();
            assert!(
                nxy.cmp_norm(&nx.mul(&ny)) != std::cmp::Ordering::Greater,
                "submultiplicativity fails"
            );
        }
    }
}
