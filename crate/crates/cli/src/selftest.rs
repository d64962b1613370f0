//! Deterministic property battery behind `skewlab selftest`.

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use skewlab::groups::{GroupId, QuotKey, QuotientSpec};
use skewlab::norms::{phi_t_norm_brute, phi_t_norm_closed};
use skewlab::phimod::{skew_mat_is_zero, solve_x, solve_y, x_residual, y_residual};
use skewlab::series::AnalyticityClass;
use skewlab::skewring::SkewElt;
use skewlab::{LaurentSeries, RhoExponent};

#[derive(Serialize)]
pub struct CheckLine {
    pub check: &'static str,
    pub cases: u32,
    pub failures: u32,
}

#[derive(Serialize)]
pub struct SelftestReport {
    pub p: u64,
    pub seed: u64,
    pub checks: Vec<CheckLine>,
    pub failures: u32,
}

fn rand_series(rng: &mut ChaCha8Rng, p: u64, prec: i64) -> LaurentSeries {
    let terms: Vec<(i64, i128)> = (0..4)
        .map(|_| (rng.gen_range(-3..10), rng.gen_range(-40..40)))
        .collect();
    LaurentSeries::from_int_terms(p, prec, AnalyticityClass::OE, &terms)
}

fn rand_skew(rng: &mut ChaCha8Rng, spec: &QuotientSpec) -> SkewElt {
    let keys = spec.keys();
    let mut x = SkewElt::zero(spec.clone());
    for _ in 0..2 {
        let key = keys[rng.gen_range(0..keys.len())].clone();
        let terms: Vec<(i64, i128)> = (0..2)
            .map(|_| (rng.gen_range(-1..5), rng.gen_range(-9..9)))
            .collect();
        let r = LaurentSeries::from_int_terms(spec.p, 6, AnalyticityClass::OE, &terms);
        x = x.add(&SkewElt::from_term(spec.clone(), key, r)).expect("same spec");
    }
    x
}

pub fn run(p: u64, seed: u64) -> Result<SelftestReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    // series étale decomposition round trip
    {
        let mut failures = 0;
        let cases = 25;
        for _ in 0..cases {
            let f = rand_series(&mut rng, p, 6).with_window(-6, 20);
            let parts = f.etale_decompose(1)?;
            let back = LaurentSeries::etale_recombine(&parts, 1)?;
            if !back.agrees_with(&f) {
                failures += 1;
            }
        }
        checks.push(CheckLine { check: "etale-roundtrip", cases, failures });
    }

    // skew ring associativity at GL3 level 2
    {
        let spec = QuotientSpec::new(GroupId::Gl3, p, 2)?;
        let mut failures = 0;
        let cases = 6;
        for _ in 0..cases {
            let x = rand_skew(&mut rng, &spec);
            let y = rand_skew(&mut rng, &spec);
            let z = rand_skew(&mut rng, &spec);
            let lhs = x.mul(&y)?.mul(&z)?;
            let rhs = x.mul(&y.mul(&z)?)?;
            if !lhs.agrees_with(&rhs) {
                failures += 1;
            }
        }
        checks.push(CheckLine { check: "skew-associativity", cases, failures });
    }

    // φ is multiplicative on the skew ring
    {
        let spec = QuotientSpec::new(GroupId::Gl3, p, 2)?;
        let mut failures = 0;
        let cases = 6;
        for _ in 0..cases {
            let x = rand_skew(&mut rng, &spec);
            let y = rand_skew(&mut rng, &spec);
            let lhs = x.mul(&y)?.phi()?;
            let rhs = x.phi()?.mul(&y.phi()?)?;
            if !lhs.agrees_with(&rhs) {
                failures += 1;
            }
        }
        checks.push(CheckLine { check: "skew-phi-multiplicative", cases, failures });
    }

    // solver residuals on d = 1 instances
    {
        let spec = QuotientSpec::new(GroupId::Gl3, p, 2)?;
        let keys = spec.keys();
        let mut failures = 0;
        let cases = 4;
        for _ in 0..cases {
            let one = SkewElt::one(spec.clone(), 6, AnalyticityClass::OE);
            let key = keys[rng.gen_range(1..keys.len())].clone();
            let r = LaurentSeries::from_int_terms(
                p,
                6,
                AnalyticityClass::OE,
                &[(0, rng.gen_range(1..4)), (1, rng.gen_range(-2..3))],
            );
            let b = SkewElt::from_term(spec.clone(), key, r.clone())
                .sub(&SkewElt::from_series(spec.clone(), r))?;
            let a = vec![vec![one]];
            let bm = vec![vec![b]];
            let x = solve_x(&spec, &a, &bm)?;
            let y = solve_y(&spec, &a, &bm)?;
            let ok = skew_mat_is_zero(&x_residual(&spec, &a, &bm, &x)?)
                && skew_mat_is_zero(&y_residual(&spec, &a, &bm, &y)?);
            if !ok {
                failures += 1;
            }
        }
        checks.push(CheckLine { check: "equivalence-solver", cases, failures });
    }

    // closed-form transported norms against the expansion oracle
    {
        let datum = GroupId::Gl3.datum();
        let s = datum.s_elt(p, 8);
        let sbar = datum.s_bar_alpha(p, 8);
        let mut failures = 0;
        let mut cases = 0;
        for t in [&s, &sbar] {
            for beta in datum.positive_roots() {
                for den in [2i64, 4, 8] {
                    cases += 1;
                    let rho = RhoExponent::from_parts(1, den)?;
                    let closed = phi_t_norm_closed(&datum, beta, t, rho)?;
                    let brute = phi_t_norm_brute(&datum, beta, t, rho)?;
                    if closed != brute {
                        failures += 1;
                    }
                }
            }
        }
        checks.push(CheckLine { check: "trivest-closed-form", cases, failures });
    }

    // level reduction is a ring homomorphism
    {
        let spec = QuotientSpec::new(GroupId::Gl3, p, 3)?;
        let mut failures = 0;
        let cases = 4;
        for _ in 0..cases {
            let x = rand_skew(&mut rng, &spec);
            let y = rand_skew(&mut rng, &spec);
            let lhs = x.mul(&y)?.reduce_level(2)?;
            let rhs = x.reduce_level(2)?.mul(&y.reduce_level(2)?)?;
            if !lhs.agrees_with(&rhs) {
                failures += 1;
            }
        }
        checks.push(CheckLine { check: "level-reduction-hom", cases, failures });
    }

    // ι-independence transport is multiplicative
    {
        let spec = QuotientSpec::new(GroupId::Gl3, p, 2)?;
        let delta = QuotKey(vec![1, 1]);
        let mut failures = 0;
        let cases = 4;
        for _ in 0..cases {
            let x = rand_skew(&mut rng, &spec);
            let y = rand_skew(&mut rng, &spec);
            let lhs = x.mul(&y)?.iota_transport(&delta, 2)?;
            let rhs = x.iota_transport(&delta, 2)?.mul(&y.iota_transport(&delta, 2)?)?;
            if !lhs.agrees_with(&rhs) {
                failures += 1;
            }
        }
        checks.push(CheckLine { check: "iota-independence", cases, failures });
    }

    let failures = checks.iter().map(|c| c.failures).sum();
    Ok(SelftestReport { p, seed, checks, failures })
}
