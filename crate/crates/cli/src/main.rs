//! Batch front end: parse fixtures, dispatch kernel operations, emit reports.
//! Thin adapter by design; no arithmetic beyond dispatch.

mod selftest;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use skewlab::error::Error as CoreError;
use skewlab::groups::{in_tplus, leq_alpha, root_eval, upper_bound, RootDatum, TorusElt};
use skewlab::io::{
    decode, encode, group_of_name, DistDto, ModuleDto, NormRowDto, NormValueDto, RegionDto,
    SeriesDto, SkewDto, TorusDto,
};
use skewlab::norms::{
    coeff_class_check, log_division_check, phi_t_norm_closed, pi_h_map, qt_norm, region_of_t,
    spectral_norm, t_of_region, witness_series_ex, CoeffClass, NormAt, Region,
};
use skewlab::phimod::{
    inverse_residuals, skew_mat_is_zero, solve_x, solve_y, theta_verify, x_residual, y_residual,
};
use skewlab::{BasisCert, RhoExponent};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_PRECONDITION: u8 = 2;
const EXIT_PROPERTY: u8 = 3;

#[derive(Parser)]
#[command(name = "skewlab", about = "exact p-adic skew group ring calculator", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output path (stdout when absent); files are written atomically.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct GroupArgs {
    /// Prime p.
    #[arg(long, default_value_t = 3)]
    p: u64,
    /// Built-in group.
    #[arg(long, default_value = "GL3")]
    group: String,
    /// Quotient level k.
    #[arg(long, default_value_t = 2)]
    level: u32,
    /// Coefficient precision in p-digits.
    #[arg(long, default_value_t = 6)]
    prec: i64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Étale decomposition of a series (or level decomposition of a skew element).
    Decompose {
        /// Fixture path (series or skew element).
        input: PathBuf,
        /// Decomposition depth c (series) — ignored for skew fixtures.
        #[arg(long, default_value_t = 1)]
        depth: u32,
        /// Input kind: series | skew.
        #[arg(long, default_value = "series")]
        kind: String,
        /// Override the series window as lo:hi before decomposing.
        #[arg(long)]
        window: Option<String>,
    },
    /// Product of two fixtures of the same kind: series | skew | dist.
    Mul {
        #[arg(long)]
        kind: String,
        lhs: PathBuf,
        rhs: PathBuf,
    },
    /// Run the X/Y solvers on a module fixture and report residuals.
    Solvex { module: PathBuf },
    /// Norm tables: closed-form transported norms, or spectral/q_t norms of a fixture.
    Norm {
        #[command(flatten)]
        grp: GroupArgs,
        /// Closed-form table over all positive roots.
        #[arg(long)]
        closed_form: bool,
        /// Spectral norm of a monomial-representation dist fixture.
        #[arg(long)]
        spectral: Option<PathBuf>,
        /// q_t norm of a group-representation dist fixture.
        #[arg(long)]
        qt: Option<PathBuf>,
        /// Torus element by diagonal valuations, e.g. --t 2,1,0.
        #[arg(long, value_delimiter = ',')]
        t: Vec<i64>,
        /// ρ as a rational exponent pair a/b meaning p^(−a/b).
        #[arg(long, default_value = "1/2")]
        rho: String,
    },
    /// Region calculus: annulus of a torus element or a torus element for an annulus.
    Region {
        #[command(flatten)]
        grp: GroupArgs,
        #[arg(long, value_delimiter = ',')]
        t: Vec<i64>,
        /// Requested region as rho2 exponent and slope: a/b:r.
        #[arg(long)]
        to_t: Option<String>,
    },
    /// ≤_α queries and bounds.
    Poset {
        #[command(flatten)]
        grp: GroupArgs,
        /// Query: in-tplus | leq | s-bar | upper-bound.
        #[arg(long)]
        query: String,
        #[arg(long, value_delimiter = ',')]
        t1: Vec<i64>,
        #[arg(long, value_delimiter = ',')]
        t2: Vec<i64>,
    },
    /// Divergence/kernel witnesses: term-norm tables and log-division reports.
    Witness {
        #[command(flatten)]
        grp: GroupArgs,
        /// Emit the transported-series term-norm table.
        #[arg(long)]
        table: bool,
        #[arg(long, value_delimiter = ',')]
        t: Vec<i64>,
        #[arg(long, default_value = "1/2")]
        rho: String,
        #[arg(long, default_value_t = 20)]
        n_max: i64,
        /// Run the log-division kernel check at this φ-power instead.
        #[arg(long)]
        log_division: Option<u32>,
        /// Degree window for the log-division scan.
        #[arg(long, default_value_t = 50)]
        window: i64,
    },
    /// Reductions: π_H of a monomial dist fixture, or level reduction of a skew fixture.
    Reduce {
        input: PathBuf,
        /// pi-h | level.
        #[arg(long, default_value = "level")]
        mode: String,
        #[arg(long, default_value_t = 1)]
        level: u32,
        #[arg(long, default_value_t = 6)]
        prec: i64,
    },
    /// Deterministic property battery.
    Selftest {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Classify the coefficient profile of a monomial dist fixture.
    Classify { input: PathBuf },
}

fn parse_rho(s: &str) -> anyhow::Result<RhoExponent> {
    let (a, b) = s
        .split_once('/')
        .ok_or_else(|| anyhow!("rho must be a rational pair a/b, got {s:?}"))?;
    Ok(RhoExponent::from_parts(a.trim().parse()?, b.trim().parse()?)?)
}

fn torus(p: u64, vals: &[i64]) -> TorusElt {
    TorusElt::from_valuations(p, vals, 8)
}

fn write_out(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        None => {
            println!("{text}");
            Ok(())
        }
        Some(path) => {
            let tmp = path.with_extension("tmp");
            fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
            fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
            Ok(())
        }
    }
}

fn read_to_string(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

#[derive(Serialize)]
struct Diagnostic {
    error: String,
    precondition: String,
}

#[derive(Serialize)]
struct SolveReport {
    check: &'static str,
    x: Vec<Vec<SkewDto>>,
    y: Vec<Vec<SkewDto>>,
    x_residual_zero: bool,
    y_residual_zero: bool,
    inverse_residual_zero: bool,
    eta_residual_zero: bool,
    action_residual_zero: Vec<bool>,
}

#[derive(Serialize)]
struct ClosedFormRow {
    root: String,
    m: i64,
    value: NormValueDto,
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.cmd {
        Cmd::Decompose { input, depth, kind, window } => {
            let text = read_to_string(&input)?;
            match kind.as_str() {
                "series" => {
                    let dto: SeriesDto = decode(&text)?;
                    let mut f = dto.to_series()?;
                    if let Some(w) = &window {
                        let (lo, hi) = w
                            .split_once(':')
                            .ok_or_else(|| anyhow!("--window takes lo:hi, got {w:?}"))?;
                        f = f.with_window(lo.trim().parse()?, hi.trim().parse()?);
                    }
                    let parts = f.etale_decompose(depth)?;
                    let dtos: Vec<SeriesDto> = parts.iter().map(SeriesDto::from_series).collect();
                    write_out(&cli.out, &encode(&dtos)?)?;
                }
                "skew" => {
                    let dto: SkewDto = decode(&text)?;
                    let x = dto.to_skew()?;
                    let comps = x.phi_decompose()?;
                    let dtos: Vec<(Vec<u64>, u64, SkewDto)> = comps
                        .iter()
                        .map(|(w, y)| (w.v.0.clone(), w.digit, SkewDto::from_skew(y)))
                        .collect();
                    write_out(&cli.out, &encode(&dtos)?)?;
                }
                other => return Err(anyhow!("unknown decompose kind {other:?}")),
            }
            Ok(0)
        }
        Cmd::Mul { kind, lhs, rhs } => {
            let (a, b) = (read_to_string(&lhs)?, read_to_string(&rhs)?);
            match kind.as_str() {
                "series" => {
                    let x: SeriesDto = decode(&a)?;
                    let y: SeriesDto = decode(&b)?;
                    let prod = x.to_series()?.mul(&y.to_series()?)?;
                    write_out(&cli.out, &encode(&SeriesDto::from_series(&prod))?)?;
                }
                "skew" => {
                    let x: SkewDto = decode(&a)?;
                    let y: SkewDto = decode(&b)?;
                    let prod = x.to_skew()?.mul(&y.to_skew()?)?;
                    write_out(&cli.out, &encode(&SkewDto::from_skew(&prod))?)?;
                }
                "dist" => {
                    let x: DistDto = decode(&a)?;
                    let y: DistDto = decode(&b)?;
                    let prod = x.to_dist()?.mul(&y.to_dist()?)?;
                    write_out(&cli.out, &encode(&DistDto::from_dist(&prod))?)?;
                }
                other => return Err(anyhow!("unknown mul kind {other:?}")),
            }
            Ok(0)
        }
        Cmd::Solvex { module } => {
            let dto: ModuleDto = decode(&read_to_string(&module)?)?;
            let m = dto.to_module()?;
            let (a, b) = m.split()?;
            let x = solve_x(&m.spec, &a, &b)?;
            let y = solve_y(&m.spec, &a, &b)?;
            let (xy, yx) = inverse_residuals(&m.spec, &x, &y)?;
            let theta = theta_verify(&m, &x, &y)?;
            let report = SolveReport {
                check: "equivalence-solver",
                x: x.iter().map(|r| r.iter().map(SkewDto::from_skew).collect()).collect(),
                y: y.iter().map(|r| r.iter().map(SkewDto::from_skew).collect()).collect(),
                x_residual_zero: skew_mat_is_zero(&x_residual(&m.spec, &a, &b, &x)?),
                y_residual_zero: skew_mat_is_zero(&y_residual(&m.spec, &a, &b, &y)?),
                inverse_residual_zero: skew_mat_is_zero(&xy) && skew_mat_is_zero(&yx),
                eta_residual_zero: theta.eta_residual_zero,
                action_residual_zero: theta.action_residual_zero,
            };
            let ok = report.x_residual_zero
                && report.y_residual_zero
                && report.inverse_residual_zero
                && report.eta_residual_zero;
            write_out(&cli.out, &encode(&report)?)?;
            Ok(if ok { 0 } else { EXIT_PROPERTY })
        }
        Cmd::Norm { grp, closed_form, spectral, qt, t, rho } => {
            let rho = parse_rho(&rho)?;
            let group = group_of_name(&grp.group)?;
            let datum = group.datum();
            if closed_form {
                let tv = torus(grp.p, &t);
                let mut rows = Vec::new();
                for beta in datum.positive_roots() {
                    let (_, m) = root_eval(&datum, beta, &tv)?;
                    let v = phi_t_norm_closed(&datum, beta, &tv, rho)?;
                    rows.push(ClosedFormRow {
                        root: format!("{beta:?}"),
                        m,
                        value: NormValueDto::from_norm(&v),
                    });
                }
                write_out(&cli.out, &encode(&rows)?)?;
            } else if let Some(path) = spectral {
                let dto: DistDto = decode(&read_to_string(&path)?)?;
                let mon = dto.to_mon()?;
                let v = spectral_norm(&mon, NormAt::Single(rho))?;
                write_out(&cli.out, &encode(&NormValueDto::from_norm(&v))?)?;
            } else if let Some(path) = qt {
                let dto: DistDto = decode(&read_to_string(&path)?)?;
                let x = dto.to_dist()?;
                let cert = BasisCert::certify(group, grp.p, x.level(), 8, x.prec())?;
                let tv = torus(grp.p, &t);
                let v = qt_norm(&x, &tv, rho, &cert)?;
                write_out(&cli.out, &encode(&NormValueDto::from_norm(&v))?)?;
            } else {
                return Err(anyhow!("choose one of --closed-form, --spectral, --qt"));
            }
            Ok(0)
        }
        Cmd::Region { grp, t, to_t } => {
            let group = group_of_name(&grp.group)?;
            let datum: RootDatum = group.datum();
            match to_t {
                Some(s) => {
                    let (rho_part, r_part) = s
                        .split_once(':')
                        .ok_or_else(|| anyhow!("--to-t takes a/b:r, got {s:?}"))?;
                    let rho2 = parse_rho(rho_part)?;
                    let reg = Region::new(rho2, r_part.trim().parse()?)?;
                    let tv = t_of_region(&datum, grp.p, &reg)?;
                    write_out(&cli.out, &encode(&TorusDto::from_torus(&tv))?)?;
                }
                None => {
                    let tv = torus(grp.p, &t);
                    let reg = region_of_t(&datum, &tv)?;
                    write_out(&cli.out, &encode(&RegionDto::from_region(&reg))?)?;
                }
            }
            Ok(0)
        }
        Cmd::Poset { grp, query, t1, t2 } => {
            let group = group_of_name(&grp.group)?;
            let datum = group.datum();
            #[derive(Serialize)]
            #[serde(untagged)]
            enum PosetOut {
                Bool(bool),
                Torus(TorusDto),
            }
            let out = match query.as_str() {
                "in-tplus" => PosetOut::Bool(in_tplus(&datum, &torus(grp.p, &t1))?),
                "leq" => PosetOut::Bool(leq_alpha(&datum, &torus(grp.p, &t1), &torus(grp.p, &t2))?),
                "s-bar" => PosetOut::Torus(TorusDto::from_torus(&datum.s_bar_alpha(grp.p, 8))),
                "upper-bound" => PosetOut::Torus(TorusDto::from_torus(&upper_bound(
                    &datum,
                    &torus(grp.p, &t1),
                    &torus(grp.p, &t2),
                )?)),
                other => return Err(anyhow!("unknown poset query {other:?}")),
            };
            write_out(&cli.out, &encode(&out)?)?;
            Ok(0)
        }
        Cmd::Witness { grp, table, t, rho, n_max, log_division, window } => {
            let group = group_of_name(&grp.group)?;
            let datum = group.datum();
            if let Some(r) = log_division {
                let rep = log_division_check(grp.p, r, 1, window, grp.prec)?;
                #[derive(Serialize)]
                struct LogRow {
                    i: i64,
                    val: i64,
                    bound: i64,
                }
                #[derive(Serialize)]
                struct LogReport {
                    check: &'static str,
                    bound_holds: bool,
                    eigen_identity: bool,
                    rows: Vec<LogRow>,
                }
                let rep_out = LogReport {
                    check: "log-division-kernel",
                    bound_holds: rep.bound_holds,
                    eigen_identity: rep.eigen_identity,
                    rows: rep.rows.iter().map(|&(i, val, bound)| LogRow { i, val, bound }).collect(),
                };
                let ok = rep_out.bound_holds && rep_out.eigen_identity;
                write_out(&cli.out, &encode(&rep_out)?)?;
                return Ok(if ok { 0 } else { EXIT_PROPERTY });
            }
            if table {
                let tv = torus(grp.p, &t);
                let rho = parse_rho(&rho)?;
                let tab = witness_series_ex(&datum, &tv, rho, n_max)?;
                let rows: Vec<(NormRowDto, NormRowDto)> = tab
                    .rows
                    .iter()
                    .map(|r| {
                        (
                            NormRowDto { n: r.n, value: NormValueDto::from_norm(&r.untransported) },
                            NormRowDto { n: r.n, value: NormValueDto::from_norm(&r.transported) },
                        )
                    })
                    .collect();
                // aligned text table alongside the machine rows
                let mut text = String::from("n  untransported  transported\n");
                for r in &tab.rows {
                    text.push_str(&format!("{:<3}{:<15}{}\n", r.n, r.untransported.to_string(), r.transported));
                }
                eprintln!("{text}");
                write_out(&cli.out, &encode(&rows)?)?;
                return Ok(0);
            }
            Err(anyhow!("choose --table or --log-division"))
        }
        Cmd::Reduce { input, mode, level, prec } => {
            let text = read_to_string(&input)?;
            match mode.as_str() {
                "level" => {
                    let dto: SkewDto = decode(&text)?;
                    let reduced = dto.to_skew()?.reduce_level(level)?;
                    write_out(&cli.out, &encode(&SkewDto::from_skew(&reduced))?)?;
                }
                "pi-h" => {
                    let dto: DistDto = decode(&text)?;
                    let mon = dto.to_mon()?;
                    let img = pi_h_map(&mon, level, prec)?;
                    write_out(&cli.out, &encode(&SkewDto::from_skew(&img))?)?;
                }
                other => return Err(anyhow!("unknown reduce mode {other:?}")),
            }
            Ok(0)
        }
        Cmd::Selftest { p, seed } => {
            let report = selftest::run(p, seed)?;
            let ok = report.failures == 0;
            write_out(&cli.out, &encode(&report)?)?;
            Ok(if ok { 0 } else { EXIT_PROPERTY })
        }
        Cmd::Classify { input } => {
            let dto: DistDto = decode(&read_to_string(&input)?)?;
            let mon = dto.to_mon()?;
            #[derive(Serialize)]
            struct ClassOut {
                class: String,
                witness: Option<Vec<i64>>,
                valuation: Option<i64>,
            }
            let out = match coeff_class_check(&mon) {
                CoeffClass::Integral => ClassOut { class: "integral".into(), witness: None, valuation: None },
                CoeffClass::Bounded { witness, valuation } => ClassOut {
                    class: "bounded".into(),
                    witness: Some(witness),
                    valuation: Some(valuation),
                },
                CoeffClass::General { witness, valuation } => ClassOut {
                    class: "general".into(),
                    witness: Some(witness),
                    valuation: Some(valuation),
                },
            };
            write_out(&cli.out, &encode(&out)?)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            let code = match err.downcast_ref::<CoreError>() {
                Some(_) => EXIT_PRECONDITION,
                None => EXIT_PRECONDITION,
            };
            let diag = Diagnostic { error: err.to_string(), precondition: format!("{err:#}") };
            eprintln!("{}", serde_json::to_string(&diag).unwrap_or_else(|_| err.to_string()));
            ExitCode::from(code)
        }
    }
}

