//! Command line front end. Every subcommand maps to one library operation
//! or sweep; results go to standard output in CSV or JSON, diagnostics to
//! standard error. Output is deterministic for fixed flags and seed.
//!
//! The modulus is capped at 2^62 so that all modular products fit in
//! 128-bit intermediates.

use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use valsets::bounds::{
    pigeonhole_check, ratio_sweep, rhs_nfig, rhs_quadr, summarize, write_reports_csv, BoundKind,
    SweepGrid,
};
use valsets::field::FieldContext;
use valsets::poly::{build_q_lambda, PolySpec, RationalSpec};
use valsets::quadrics::{centered_lift, IntConic};
use valsets::small_residues::ReductionProblem;
use valsets::value_sets::{
    count_intersection, product_set_cardinality, t_r, IntervalSpec, DEFAULT_WORK_CAP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "valsets",
    about = "Exact value-set, subgroup, and conic computations over prime fields (p < 2^62)",
    version
)]
struct Cli {
    /// Output format for result records.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count the intersection of a value set with a subgroup: N_r(I, G).
    Count {
        #[arg(long)]
        p: u64,
        /// Numerator coefficients, highest degree first, comma separated.
        #[arg(long, value_delimiter = ',')]
        f: Vec<u64>,
        /// Optional denominator coefficients for a rational function.
        #[arg(long, value_delimiter = ',')]
        g: Option<Vec<u64>>,
        #[arg(long, default_value_t = 0)]
        u: u64,
        #[arg(long = "H")]
        h: u64,
        /// Subgroup order; must divide p - 1.
        #[arg(long = "T")]
        t: u64,
    },
    /// Find the smallest subgroup order containing all values on some
    /// interval of the given length.
    Tf {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',')]
        f: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        g: Option<Vec<u64>>,
        #[arg(long = "H")]
        h: u64,
    },
    /// Cardinality of the nu-fold product set of f(I).
    Prodset {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',')]
        f: Vec<u64>,
        #[arg(long, default_value_t = 0)]
        u: u64,
        #[arg(long = "H")]
        h: u64,
        #[arg(long)]
        nu: u32,
        #[arg(long, default_value_t = DEFAULT_WORK_CAP)]
        work_cap: u64,
    },
    /// Solve the simultaneous small-residue problem: least v with
    /// <b_i v>_p <= V_i for all i.
    Lred {
        #[arg(long)]
        p: u64,
        /// Linear forms b_1,...,b_m, comma separated.
        #[arg(long, value_delimiter = ',')]
        b: Vec<u64>,
        /// Caps V_1,...,V_m, comma separated.
        #[arg(long = "V", value_delimiter = ',')]
        caps: Vec<u64>,
    },
    /// Classify an integer conic and count its zeros in [0, H]^2.
    Conic {
        /// Coefficients A,B,C,D,E,F of A X^2 + B X Y + C Y^2 + D X + E Y + F.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coeffs: Vec<i64>,
        #[arg(long = "box")]
        box_size: u64,
    },
    /// Build the conic f(X) - lambda f(Y); with --v and --H also produce
    /// its centered integer lift and z-range.
    Qlambda {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',')]
        f: Vec<u64>,
        #[arg(long)]
        lambda: u64,
        #[arg(long)]
        v: Option<u64>,
        #[arg(long = "H")]
        h: Option<u64>,
    },
    /// Exact pigeonhole inequality check for a quadratic on an interval
    /// against a subgroup.
    Pigeonhole {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',')]
        f: Vec<u64>,
        #[arg(long, default_value_t = 0)]
        u: u64,
        #[arg(long = "H")]
        h: u64,
        #[arg(long = "T")]
        t: u64,
    },
    /// Ratio sweep: exact counts against a reference bound over a grid of
    /// primes, polynomials, lengths, and subgroup orders. CSV to stdout,
    /// summary JSON to stderr.
    Sweep {
        /// Inclusive prime range start.
        #[arg(long)]
        p_min: u64,
        /// Inclusive prime range end.
        #[arg(long)]
        p_max: u64,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long, default_value_t = 3)]
        polys: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Interval lengths, comma separated.
        #[arg(long = "H", value_delimiter = ',', default_value = "1,2,4,8,16,32,64")]
        h_values: Vec<u64>,
        /// Interval offsets, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        u_values: Vec<u64>,
        /// Keep only subgroup orders up to this value.
        #[arg(long)]
        max_t: Option<u64>,
        #[arg(long, value_enum, default_value = "nfig")]
        bound: Bound,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Bound {
    Nfig,
    Quadr,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn rational(p: u64, f: &[u64], g: Option<&Vec<u64>>) -> Result<RationalSpec> {
    let num = PolySpec::new(p, f);
    match g {
        None => Ok(RationalSpec::from_poly(num)),
        Some(g) => RationalSpec::new(num, PolySpec::new(p, g)).context("invalid rational"),
    }
}

fn coeff_string(coeffs: &[u64]) -> String {
    coeffs
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn emit<T: Serialize>(format: Format, record: &T, csv_header: &str, csv_row: String) -> Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string(record)?),
        Format::Csv => {
            println!("{csv_header}");
            println!("{csv_row}");
        }
    }
    Ok(())
}

fn warn_if_wrapping(interval: &IntervalSpec, p: u64) {
    if interval.wraps(p) {
        eprintln!(
            "warning: interval wraps past p-1 (u={} H={} p={p}); residues are no longer consecutive integers",
            interval.offset(),
            interval.len()
        );
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Count { p, f, g, u, h, t } => {
            let ctx = FieldContext::new(p)?;
            let r = rational(p, &f, g.as_ref())?;
            let group = ctx.subgroup(t)?;
            let interval = IntervalSpec::new(u, h, p)?;
            warn_if_wrapping(&interval, p);
            let count = count_intersection(&r, &interval, &group);
            let record = valsets::value_sets::CountRecord {
                p,
                f: coeff_string(&f),
                u,
                h,
                t,
                count,
            };
            emit(
                cli.format,
                &record,
                "p,f,u,H,T,count",
                format!("{p},{},{u},{h},{t},{count}", coeff_string(&f).replace(',', ":")),
            )
        }
        Command::Tf { p, f, g, h } => {
            let ctx = FieldContext::new(p)?;
            let r = rational(p, &f, g.as_ref())?;
            let result = t_r(&r, h, &ctx)?;
            #[derive(Serialize)]
            struct TfRecord {
                p: u64,
                f: String,
                #[serde(rename = "H")]
                h: u64,
                #[serde(rename = "T")]
                t: u64,
                u: u64,
                generator: u64,
            }
            let record = TfRecord {
                p,
                f: coeff_string(&f),
                h,
                t: result.order,
                u: result.offset,
                generator: result.subgroup.generator(),
            };
            emit(
                cli.format,
                &record,
                "p,f,H,T,u,generator",
                format!(
                    "{p},{},{h},{},{},{}",
                    coeff_string(&f).replace(',', ":"),
                    result.order,
                    result.offset,
                    result.subgroup.generator()
                ),
            )
        }
        Command::Prodset {
            p,
            f,
            u,
            h,
            nu,
            work_cap,
        } => {
            FieldContext::new(p)?;
            if nu == 0 {
                bail!("--nu must be at least 1");
            }
            let f = PolySpec::new(p, &f);
            let interval = IntervalSpec::new(u, h, p)?;
            warn_if_wrapping(&interval, p);
            let result = product_set_cardinality(&f, &interval, nu, work_cap)?;
            #[derive(Serialize)]
            struct ProdRecord {
                p: u64,
                f: String,
                u: u64,
                #[serde(rename = "H")]
                h: u64,
                nu: u32,
                cardinality: u64,
            }
            let record = ProdRecord {
                p,
                f: coeff_string(f.coeffs()),
                u,
                h,
                nu,
                cardinality: result.cardinality,
            };
            emit(
                cli.format,
                &record,
                "p,f,u,H,nu,cardinality",
                format!(
                    "{p},{},{u},{h},{nu},{}",
                    coeff_string(f.coeffs()).replace(',', ":"),
                    result.cardinality
                ),
            )
        }
        Command::Lred { p, b, caps } => {
            FieldContext::new(p)?;
            let prob = ReductionProblem::new(p, b, caps)?;
            let sol = prob.solve()?;
            emit(
                cli.format,
                &sol,
                "v,residues,condition_met",
                format!(
                    "{},{},{}",
                    sol.v,
                    sol.residues
                        .iter()
                        .map(|r| r.to_string())
                        .collect::<Vec<_>>()
                        .join(":"),
                    sol.condition_met
                ),
            )
        }
        Command::Conic { coeffs, box_size } => {
            if coeffs.len() != 6 {
                bail!("--coeffs needs exactly 6 values A,B,C,D,E,F");
            }
            let conic = IntConic::new(
                coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4], coeffs[5],
            );
            let class = conic.classify()?;
            let count = conic.count_points_box(box_size);
            #[derive(Serialize)]
            struct ConicRecord {
                coeffs: [i64; 6],
                classification: String,
                delta: i128,
                det3: i128,
                #[serde(rename = "box")]
                box_size: u64,
                count: u64,
            }
            let record = ConicRecord {
                coeffs: conic.coeffs(),
                classification: format!("{class:?}"),
                delta: conic.delta(),
                det3: conic.det3(),
                box_size,
                count,
            };
            emit(
                cli.format,
                &record,
                "coeffs,classification,delta,det3,box,count",
                format!(
                    "{},{:?},{},{},{box_size},{count}",
                    conic
                        .coeffs()
                        .iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(":"),
                    class,
                    conic.delta(),
                    conic.det3()
                ),
            )
        }
        Command::Qlambda { p, f, lambda, v, h } => {
            FieldContext::new(p)?;
            let f = PolySpec::new(p, &f);
            let q = build_q_lambda(&f, lambda)?;
            #[derive(Serialize)]
            struct QRecord {
                p: u64,
                lambda: u64,
                conic_mod_p: [u64; 6],
                det3_mod_p: u64,
                #[serde(skip_serializing_if = "Option::is_none")]
                lift: Option<[i64; 6]>,
                #[serde(skip_serializing_if = "Option::is_none")]
                v: Option<u64>,
                #[serde(skip_serializing_if = "Option::is_none")]
                z_range: Option<i128>,
            }
            let mut record = QRecord {
                p,
                lambda: lambda % p,
                conic_mod_p: q.coeffs,
                det3_mod_p: q.det3_mod(),
                lift: None,
                v: None,
                z_range: None,
            };
            if let Some(v) = v {
                let h = h.context("--H is required together with --v for the centered lift")?;
                let lift = centered_lift(&f, lambda, v, h)?;
                record.lift = Some(lift.conic.coeffs());
                record.v = Some(lift.v);
                record.z_range = Some(lift.z_range);
            }
            let lift_str = record
                .lift
                .map(|c| {
                    c.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(":")
                })
                .unwrap_or_else(|| "-".into());
            emit(
                cli.format,
                &record,
                "p,lambda,conic_mod_p,det3_mod_p,lift,v,z_range",
                format!(
                    "{p},{},{},{},{lift_str},{},{}",
                    record.lambda,
                    record
                        .conic_mod_p
                        .iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(":"),
                    record.det3_mod_p,
                    record.v.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                    record
                        .z_range
                        .map(|z| z.to_string())
                        .unwrap_or_else(|| "-".into()),
                ),
            )
        }
        Command::Pigeonhole { p, f, u, h, t } => {
            let ctx = FieldContext::new(p)?;
            let f = PolySpec::new(p, &f);
            let group = ctx.subgroup(t)?;
            let interval = IntervalSpec::new(u, h, p)?;
            warn_if_wrapping(&interval, p);
            let report = pigeonhole_check(&f, &interval, &group)?;
            #[derive(Serialize)]
            struct PigeonRecord {
                p: u64,
                #[serde(rename = "T")]
                t: u64,
                k: u64,
                lambda_star: u64,
                pairs: u64,
                threshold: f64,
                pass: bool,
            }
            let record = PigeonRecord {
                p,
                t,
                k: report.k,
                lambda_star: report.lambda_star,
                pairs: report.pairs,
                threshold: report.threshold(),
                pass: report.pass,
            };
            emit(
                cli.format,
                &record,
                "p,T,k,lambda_star,pairs,threshold,pass",
                format!(
                    "{p},{t},{},{},{},{:.6e},{}",
                    report.k,
                    report.lambda_star,
                    report.pairs,
                    report.threshold(),
                    report.pass
                ),
            )
        }
        Command::Sweep {
            p_min,
            p_max,
            d,
            polys,
            seed,
            h_values,
            u_values,
            max_t,
            bound,
        } => {
            let primes: Vec<u64> = (p_min..=p_max)
                .filter(|&p| valsets::field::is_prime(p) && p >= 3)
                .collect();
            let grid = SweepGrid {
                primes,
                degree: d,
                polys_per_prime: polys,
                seed,
                h_values,
                u_values,
                max_order: max_t,
                bound: match bound {
                    Bound::Nfig => BoundKind::Nfig,
                    Bound::Quadr => BoundKind::Quadr,
                },
            };
            let rows = ratio_sweep(&grid)?;
            eprintln!(
                "note: {} (reference values: nfig(H=16,T=4,p=2^20,d=2) = {:.6}, quadr(H=16,T=9,p=2^16) = {:.6})",
                valsets::bounds::SWEEP_NOTE,
                rhs_nfig(16, 4, 1 << 20, 2),
                rhs_quadr(16, 9, 1 << 16),
            );
            let mut stdout = std::io::stdout().lock();
            write_reports_csv(&mut stdout, &rows)?;
            eprintln!("{}", serde_json::to_string(&summarize(&rows))?);
            Ok(())
        }
    }
}
