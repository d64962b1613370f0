//! φ-modules over the series rings and over skew-ring levels: matrices of φ
//! in a fixed basis, the functors induced by the augmentation ℓ and its
//! splitting ι, the basis-change solvers from the equivalence of categories,
//! and étaleness checks by explicit inversion with residual verification.

use crate::error::{Error, Result};
use crate::groups::{QuotientSpec, TorusElt};
use crate::series::{AnalyticityClass, LaurentSeries};
use crate::skewring::SkewElt;
use std::collections::BTreeMap;

pub type SeriesMatrix = Vec<Vec<LaurentSeries>>;
pub type SkewMatrix = Vec<Vec<SkewElt>>;

/// A free module over the series ring with the matrix of φ in a fixed basis,
/// plus optionally tracked torus-action matrices.
#[derive(Clone, Debug)]
pub struct SeriesModule {
    pub rank: usize,
    pub phi: SeriesMatrix,
    pub actions: Vec<(TorusElt, SeriesMatrix)>,
}

/// A free module over the level-k skew ring with the matrix P = A + B of φ:
/// A is the ι-embedded augmentation part, B has entries in I₁.
#[derive(Clone, Debug)]
pub struct SkewModule {
    pub spec: QuotientSpec,
    pub rank: usize,
    pub phi: SkewMatrix,
    pub actions: Vec<(TorusElt, SkewMatrix)>,
}

pub fn series_identity(p: u64, d: usize, prec: i64, class: AnalyticityClass) -> SeriesMatrix {
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    if i == j {
                        LaurentSeries::one(p, prec, class)
                    } else {
                        LaurentSeries::zero_on(p, prec, class, 0, crate::series::WINDOW_INF)
                    }
                })
                .collect()
        })
        .collect()
}

pub fn skew_identity(spec: &QuotientSpec, d: usize, prec: i64, class: AnalyticityClass) -> SkewMatrix {
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    if i == j {
                        SkewElt::one(spec.clone(), prec, class)
                    } else {
                        SkewElt::zero(spec.clone())
                    }
                })
                .collect()
        })
        .collect()
}

pub fn series_mat_mul(a: &SeriesMatrix, b: &SeriesMatrix) -> Result<SeriesMatrix> {
    let d = a.len();
    let mut out = Vec::with_capacity(d);
    for row_a in a.iter() {
        let mut row = Vec::with_capacity(d);
        for j in 0..b[0].len() {
            let mut acc: Option<LaurentSeries> = None;
            for (k, ak) in row_a.iter().enumerate() {
                let term = ak.mul(&b[k][j])?;
                acc = Some(match acc {
                    None => term,
                    Some(s) => s.add(&term)?,
                });
            }
            row.push(acc.expect("nonempty matrices"));
        }
        out.push(row);
    }
    Ok(out)
}

pub fn skew_mat_mul(a: &SkewMatrix, b: &SkewMatrix) -> Result<SkewMatrix> {
    let d = a.len();
    let mut out = Vec::with_capacity(d);
    for row_a in a.iter() {
        let mut row = Vec::with_capacity(d);
        for j in 0..b[0].len() {
            let mut acc: Option<SkewElt> = None;
            for (k, ak) in row_a.iter().enumerate() {
                let term = ak.mul(&b[k][j])?;
                acc = Some(match acc {
                    None => term,
                    Some(s) => s.add(&term)?,
                });
            }
            row.push(acc.expect("nonempty matrices"));
        }
        out.push(row);
    }
    Ok(out)
}

pub fn skew_mat_add(a: &SkewMatrix, b: &SkewMatrix) -> Result<SkewMatrix> {
    let mut out = Vec::with_capacity(a.len());
    for (ra, rb) in a.iter().zip(b) {
        let mut row = Vec::with_capacity(ra.len());
        for (x, y) in ra.iter().zip(rb) {
            row.push(x.add(y)?);
        }
        out.push(row);
    }
    Ok(out)
}

pub fn skew_mat_sub(a: &SkewMatrix, b: &SkewMatrix) -> Result<SkewMatrix> {
    let mut out = Vec::with_capacity(a.len());
    for (ra, rb) in a.iter().zip(b) {
        let mut row = Vec::with_capacity(ra.len());
        for (x, y) in ra.iter().zip(rb) {
            row.push(x.sub(y)?);
        }
        out.push(row);
    }
    Ok(out)
}

pub fn skew_mat_phi(a: &SkewMatrix) -> Result<SkewMatrix> {
    a.iter().map(|r| r.iter().map(|x| x.phi()).collect()).collect()
}

pub fn skew_mat_phi_t(a: &SkewMatrix, t: &TorusElt) -> Result<SkewMatrix> {
    a.iter().map(|r| r.iter().map(|x| x.phi_t(t)).collect()).collect()
}

pub fn skew_mat_is_zero(a: &SkewMatrix) -> bool {
    a.iter().all(|r| r.iter().all(|x| x.is_zero_at_prec()))
}

pub fn skew_mat_agrees(a: &SkewMatrix, b: &SkewMatrix) -> bool {
    a.iter().zip(b).all(|(ra, rb)| ra.iter().zip(rb).all(|(x, y)| x.agrees_with(y)))
}

/// Invert a matrix over the commutative series ring by Gaussian elimination.
pub fn series_mat_invert(a: &SeriesMatrix) -> Result<SeriesMatrix> {
    let d = a.len();
    let p = a[0][0].prime();
    let prec = a.iter().flatten().map(|x| x.prec_floor()).min().unwrap_or(1);
    let class = a
        .iter()
        .flatten()
        .map(|x| x.certificate().class)
        .max()
        .unwrap_or(AnalyticityClass::OE);
    let mut work: Vec<Vec<LaurentSeries>> = a.clone();
    let mut inv = series_identity(p, d, prec, class);
    for col in 0..d {
        // pick an invertible pivot in this column
        let mut pivot_row = None;
        for (r, row) in work.iter().enumerate().skip(col) {
            if row[col].invert().is_ok() {
                pivot_row = Some(r);
                break;
            }
        }
        let r0 = pivot_row.ok_or_else(|| {
            Error::NotEtale(format!("no invertible pivot in column {col} at precision"))
        })?;
        work.swap(col, r0);
        inv.swap(col, r0);
        let pivot_inv = work[col][col].invert()?;
        for j in 0..d {
            work[col][j] = work[col][j].mul(&pivot_inv)?;
            inv[col][j] = inv[col][j].mul(&pivot_inv)?;
        }
        for r in 0..d {
            if r == col || work[r][col].is_zero_at_prec() {
                continue;
            }
            let factor = work[r][col].clone();
            for j in 0..d {
                let tw = factor.mul(&work[col][j])?;
                work[r][j] = work[r][j].sub(&tw)?;
                let ti = factor.mul(&inv[col][j])?;
                inv[r][j] = inv[r][j].sub(&ti)?;
            }
        }
    }
    Ok(inv)
}

/// ι-embed a series matrix into the level of `spec`.
pub fn embed_matrix(spec: &QuotientSpec, a: &SeriesMatrix) -> SkewMatrix {
    a.iter()
        .map(|r| r.iter().map(|x| SkewElt::from_series(spec.clone(), x.clone())).collect())
        .collect()
}

/// Entrywise augmentation ℓ of a skew matrix.
pub fn augment_matrix(m: &SkewMatrix) -> Result<SeriesMatrix> {
    m.iter().map(|r| r.iter().map(|x| x.augmentation()).collect()).collect()
}

/// Invert id + N for a skew matrix N with entries in I₁, by Newton–Schulz
/// iteration Z ← Z(2·id − (id+N)Z). The residual valuations double each step,
/// so the loop terminates quickly at finite level and precision.
pub fn skew_neumann_invert(spec: &QuotientSpec, n: &SkewMatrix, cap: usize) -> Result<SkewMatrix> {
    let d = n.len();
    let prec = n
        .iter()
        .flatten()
        .map(|x| x.prec_floor())
        .min()
        .unwrap_or(6);
    let class = n.iter().flatten().map(|x| x.class()).max().unwrap_or(AnalyticityClass::OE);
    let id = skew_identity(spec, d, prec, class);
    let one_plus_n = skew_mat_add(&id, n)?;
    let mut z = id.clone();
    for _ in 0..cap.max(40) {
        let resid = skew_mat_sub(&skew_mat_mul(&one_plus_n, &z)?, &id)?;
        if skew_mat_is_zero(&resid) {
            return Ok(z);
        }
        // Z ← Z(2·id − (id+N)Z) = Z(id − resid)
        let correction = skew_mat_sub(&id, &resid)?;
        z = skew_mat_mul(&z, &correction)?;
    }
    Err(Error::PrecisionExhausted(
        "matrix inversion did not terminate within the iteration cap".into(),
    ))
}

impl SkewModule {
    pub fn new(spec: QuotientSpec, phi: SkewMatrix) -> Result<Self> {
        let rank = phi.len();
        if phi.iter().any(|r| r.len() != rank) {
            return Err(Error::InvalidArgument("φ-matrix must be square".into()));
        }
        Ok(SkewModule { spec, rank, phi, actions: Vec::new() })
    }

    /// Split P = A + B with A the ι-embedded augmentation and B ∈ I₁.
    pub fn split(&self) -> Result<(SkewMatrix, SkewMatrix)> {
        let a_series = augment_matrix(&self.phi)?;
        let a = embed_matrix(&self.spec, &a_series);
        let b = skew_mat_sub(&self.phi, &a)?;
        for row in &b {
            for x in row {
                if !x.ideal_member(1)? {
                    return Err(Error::InvalidArgument("B-part does not lie in I₁".into()));
                }
            }
        }
        Ok((a, b))
    }
}

/// 𝔻: reduce a skew module to a series module through ℓ. NotEtale when the
/// augmented matrix fails inversion at precision.
pub fn functor_d(m: &SkewModule) -> Result<SeriesModule> {
    let a = augment_matrix(&m.phi)?;
    series_mat_invert(&a).map_err(|_| Error::NotEtale("ℓ(P) is not invertible at precision".into()))?;
    let mut actions = Vec::new();
    for (t, q) in &m.actions {
        actions.push((t.clone(), augment_matrix(q)?));
    }
    Ok(SeriesModule { rank: m.rank, phi: a, actions })
}

/// 𝕄: base change a series module to a level-k skew module along ι.
pub fn functor_m(d: &SeriesModule, spec: &QuotientSpec) -> Result<SkewModule> {
    let phi = embed_matrix(spec, &d.phi);
    let mut m = SkewModule::new(spec.clone(), phi)?;
    for (t, q) in &d.actions {
        m.actions.push((t.clone(), embed_matrix(spec, q)));
    }
    Ok(m)
}

/// The matrix X with entries in I₁ solving φ(id+X)(A+B) = A(id+X) modulo I_K,
/// as the truncated series whose k-th term lies in φ^k(I₁) ⊆ I_{k+1}.
/// Truncation at K−1 terms is exact at level K.
pub fn solve_x(spec: &QuotientSpec, a: &SkewMatrix, b: &SkewMatrix) -> Result<SkewMatrix> {
    let terms = solve_x_terms(spec, a, b)?;
    let mut x = terms[0].clone();
    for term in &terms[1..] {
        x = skew_mat_add(&x, term)?;
    }
    Ok(x)
}

/// Term-by-term view of the X-series (for the I_{k+1}-membership property).
pub fn solve_x_terms(spec: &QuotientSpec, a: &SkewMatrix, b: &SkewMatrix) -> Result<Vec<SkewMatrix>> {
    let k_level = spec.level;
    let a_series = augment_matrix(a)?;
    let a_inv = embed_matrix(
        spec,
        &series_mat_invert(&a_series).map_err(|_| Error::NotEtale("A is not invertible".into()))?,
    );
    let a_plus_b = skew_mat_add(a, b)?;
    let mut term = skew_mat_mul(&a_inv, b)?;
    let mut terms = vec![term.clone()];
    for _ in 1..k_level.saturating_sub(1) {
        term = skew_mat_mul(&skew_mat_mul(&a_inv, &skew_mat_phi(&term)?)?, &a_plus_b)?;
        terms.push(term.clone());
    }
    Ok(terms)
}

/// The matrix Y with (A+B)(id+Y) = φ(id+Y)A modulo I_K, by the convergent sum
/// of terms −(A+B)^{-1}…φ^k((A+B)^{-1}B)…A.
pub fn solve_y(spec: &QuotientSpec, a: &SkewMatrix, b: &SkewMatrix) -> Result<SkewMatrix> {
    let k_level = spec.level;
    let a_series = augment_matrix(a)?;
    let a_inv = embed_matrix(spec, &series_mat_invert(&a_series)?);
    // (A+B)^{-1} = (id + A^{-1}B)^{-1}·A^{-1}
    let m = skew_mat_mul(&a_inv, b)?;
    let neumann = skew_neumann_invert(spec, &m, neumann_cap(spec))?;
    let apb_inv = skew_mat_mul(&neumann, &a_inv)?;
    let mut term = skew_mat_mul(&apb_inv, b)?;
    for row in term.iter_mut() {
        for x in row.iter_mut() {
            *x = x.neg();
        }
    }
    let mut y = term.clone();
    for _ in 1..k_level.saturating_sub(1) {
        term = skew_mat_mul(&skew_mat_mul(&apb_inv, &skew_mat_phi(&term)?)?, a)?;
        y = skew_mat_add(&y, &term)?;
    }
    Ok(y)
}

fn neumann_cap(spec: &QuotientSpec) -> usize {
    // with quadratic convergence the depth only grows logarithmically in the
    // augmentation-ideal nilpotency bound
    (64 - spec.size().leading_zeros() as usize + 24).max(40)
}

/// Residual of the X-equation φ(id+X)(A+B) − A(id+X); zero at level K means
/// the equation holds modulo I_K.
pub fn x_residual(
    spec: &QuotientSpec,
    a: &SkewMatrix,
    b: &SkewMatrix,
    x: &SkewMatrix,
) -> Result<SkewMatrix> {
    let d = a.len();
    let prec = a.iter().flatten().map(|e| e.prec_floor()).min().unwrap_or(6);
    let class = a.iter().flatten().map(|e| e.class()).max().unwrap_or(AnalyticityClass::OE);
    let id = skew_identity(spec, d, prec, class);
    let one_x = skew_mat_add(&id, x)?;
    let lhs = skew_mat_mul(&skew_mat_phi(&one_x)?, &skew_mat_add(a, b)?)?;
    let rhs = skew_mat_mul(a, &one_x)?;
    skew_mat_sub(&lhs, &rhs)
}

/// Residual of the Y-equation (A+B)(id+Y) − φ(id+Y)A.
pub fn y_residual(
    spec: &QuotientSpec,
    a: &SkewMatrix,
    b: &SkewMatrix,
    y: &SkewMatrix,
) -> Result<SkewMatrix> {
    let d = a.len();
    let prec = a.iter().flatten().map(|e| e.prec_floor()).min().unwrap_or(6);
    let class = a.iter().flatten().map(|e| e.class()).max().unwrap_or(AnalyticityClass::OE);
    let id = skew_identity(spec, d, prec, class);
    let one_y = skew_mat_add(&id, y)?;
    let lhs = skew_mat_mul(&skew_mat_add(a, b)?, &one_y)?;
    let rhs = skew_mat_mul(&skew_mat_phi(&one_y)?, a)?;
    skew_mat_sub(&lhs, &rhs)
}

/// (id+X)(id+Y) − id and (id+Y)(id+X) − id.
pub fn inverse_residuals(
    spec: &QuotientSpec,
    x: &SkewMatrix,
    y: &SkewMatrix,
) -> Result<(SkewMatrix, SkewMatrix)> {
    let d = x.len();
    let prec = x.iter().flatten().map(|e| e.prec_floor()).min().unwrap_or(6);
    let class = x.iter().flatten().map(|e| e.class()).max().unwrap_or(AnalyticityClass::OE);
    let id = skew_identity(spec, d, prec, class);
    let one_x = skew_mat_add(&id, x)?;
    let one_y = skew_mat_add(&id, y)?;
    let xy = skew_mat_sub(&skew_mat_mul(&one_x, &one_y)?, &id)?;
    let yx = skew_mat_sub(&skew_mat_mul(&one_y, &one_x)?, &id)?;
    Ok((xy, yx))
}

/// Étaleness of a series-module action matrix: explicit inversion with a
/// residual check; false (with the failure reason) instead of an error.
pub fn etale_check_series(q: &SeriesMatrix) -> (bool, Option<String>) {
    match series_mat_invert(q) {
        Ok(inv) => match series_mat_mul(q, &inv) {
            Ok(prod) => {
                for (i, row) in prod.iter().enumerate() {
                    for (j, x) in row.iter().enumerate() {
                        let expect = if i == j {
                            LaurentSeries::one(x.prime(), x.prec_floor(), x.certificate().class)
                        } else {
                            LaurentSeries::zero_on(
                                x.prime(),
                                x.prec_floor(),
                                x.certificate().class,
                                0,
                                crate::series::WINDOW_INF,
                            )
                        };
                        if !x.agrees_with(&expect) {
                            return (false, Some(format!("residual at ({i},{j})")));
                        }
                    }
                }
                (true, None)
            }
            Err(e) => (false, Some(e.to_string())),
        },
        Err(e) => (false, Some(e.to_string())),
    }
}

/// Étaleness of a skew-module action matrix: split off the augmentation part,
/// invert it over the series ring, and finish with the Neumann-type inversion
/// of the I₁-remainder; verified by a residual check. Returns false with the
/// failure reason instead of erroring.
pub fn etale_check_skew(spec: &QuotientSpec, q: &SkewMatrix) -> (bool, Option<String>) {
    let attempt = || -> Result<bool> {
        let a_series = augment_matrix(q)?;
        let a_inv = embed_matrix(&spec.clone(), &series_mat_invert(&a_series)?);
        let a = embed_matrix(spec, &a_series);
        let b = skew_mat_sub(q, &a)?;
        let m = skew_mat_mul(&a_inv, &b)?;
        let neumann = skew_neumann_invert(spec, &m, neumann_cap(spec))?;
        let q_inv = skew_mat_mul(&neumann, &a_inv)?;
        let d = q.len();
        let prec = q.iter().flatten().map(|e| e.prec_floor()).min().unwrap_or(6);
        let class = q.iter().flatten().map(|e| e.class()).max().unwrap_or(AnalyticityClass::OE);
        let id = skew_identity(spec, d, prec, class);
        let resid = skew_mat_sub(&skew_mat_mul(q, &q_inv)?, &id)?;
        Ok(skew_mat_is_zero(&resid))
    };
    match attempt() {
        Ok(true) => (true, None),
        Ok(false) => (false, Some("inverse residual nonzero at precision".into())),
        Err(e) => (false, Some(e.to_string())),
    }
}

/// Report of the η-basis verification and the Θ-commutator checks.
#[derive(Clone, Debug)]
pub struct ThetaReport {
    pub eta_residual_zero: bool,
    /// per tracked action: the commutator Q·(id+Y) − φ_t(id+Y)·ι(ℓ(Q))
    /// vanishes at the working level
    pub action_residual_zero: Vec<bool>,
}

/// Verify η := (id+X)ε satisfies φ(η) = Aη mod I_K, and for each tracked t
/// that Θ commutes with φ_t at the working level.
pub fn theta_verify(m: &SkewModule, x: &SkewMatrix, y: &SkewMatrix) -> Result<ThetaReport> {
    let (a, b) = m.split()?;
    let resid = x_residual(&m.spec, &a, &b, x)?;
    let eta_residual_zero = skew_mat_is_zero(&resid);
    let d = m.rank;
    let prec = m.phi.iter().flatten().map(|e| e.prec_floor()).min().unwrap_or(6);
    let class = m.phi.iter().flatten().map(|e| e.class()).max().unwrap_or(AnalyticityClass::OE);
    let id = skew_identity(&m.spec, d, prec, class);
    let theta = skew_mat_add(&id, y)?; // matrix of Θ in the ε-bases
    let mut action_residual_zero = Vec::new();
    for (t, q) in &m.actions {
        let lhs = skew_mat_mul(q, &theta)?;
        let q_bar = embed_matrix(&m.spec, &augment_matrix(q)?);
        let rhs = skew_mat_mul(&skew_mat_phi_t(&theta, t)?, &q_bar)?;
        let resid = skew_mat_sub(&lhs, &rhs)?;
        action_residual_zero.push(skew_mat_is_zero(&resid));
    }
    Ok(ThetaReport { eta_residual_zero, action_residual_zero })
}

/// Fixture descriptor for a module at a level (used by the CLI codecs).
#[derive(Clone, Debug)]
pub struct ModuleFixture {
    pub spec: QuotientSpec,
    pub rank: usize,
    pub phi: BTreeMap<(usize, usize), SkewElt>,
}
