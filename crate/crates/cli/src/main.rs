use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use telescope_core::character::reduced_class_is_zero;
use telescope_core::complexes::{
    equivariant_euler, euler_characteristic, homology, mapping_torus, specialize, ChainMap,
};
use telescope_core::exact::{parse_rational, rational_to_f64};
use telescope_core::fixtures;
use telescope_core::group::GroupAlgebraMatrix;
use telescope_core::io::{
    certificate_json, character_json, error_json, laurent_complex_json, novikov_json, AnyComplex, InputDoc,
};
use telescope_core::laurent::{LaurentMatrix, Weight};
use telescope_core::spectral::{
    default_k_grid, fredholm_threshold, geometric_grid, index_window_experiment, lambda_circle_scan, sigma_min_scan,
    CsvReport, NumericalRankPolicy,
};
use telescope_core::telescope::{
    chain_map_norm, default_weight, minus_contraction, novikov_vanishing, plus_contraction, wall_euler_class,
    wall_transpose_certificate, NovikovSide,
};
use telescope_core::{Error, Result};

/// Exact mapping-telescope computations and weighted-window scans.
#[derive(Parser, Debug)]
#[command(name = "telescope", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Truncation depth N.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Weight k (or circle radius), as "num/den".
    #[arg(long, global = true)]
    weight: Option<String>,
    /// Relative singular-value tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Samples on the circle for scan-lambda.
    #[arg(long, global = true, default_value_t = 16)]
    samples: usize,
    /// Weight grid: "a,b,c" or "lo:hi:count" (geometric).
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized surfaces; echoed in scan reports.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Side {
    Z,
    #[value(name = "z^-1")]
    ZInverse,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that the input complex (and self-map, if any) is valid.
    Validate { input: PathBuf },
    /// Exact homology with characters; Laurent complexes need --weight as the specialization point.
    Homology { input: PathBuf },
    /// Euler characteristic, or the Euler class of a Wall section.
    Euler { input: PathBuf },
    /// Mapping torus of the self-map.
    Torus { input: PathBuf },
    /// Plus-side contraction certificate.
    ContractPlus { input: PathBuf },
    /// Minus-side contraction certificate.
    ContractMinus { input: PathBuf },
    /// Novikov vanishing certificate.
    Novikov {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Side::Z)]
        side: Side,
    },
    /// Wall complex class and transpose certificate.
    Wall { input: PathBuf },
    /// Smallest singular values of I - z h over a weight grid.
    ScanSigma { input: PathBuf },
    /// Homology of the specialized torus around a circle.
    ScanLambda { input: PathBuf },
    /// Finite-window index experiment.
    IndexWindow {
        input: PathBuf,
        /// Scan the dual window complex of this formal dimension.
        #[arg(long)]
        dual: Option<i64>,
    },
    /// Built-in worked examples.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Subcommand, Debug)]
enum FixtureAction {
    List,
    Run { name: String },
}

enum Report {
    Json(Value, bool),
    Csv(String, bool),
}

fn read_doc(path: &PathBuf) -> Result<InputDoc> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse { what: "input file", detail: format!("{}: {e}", path.display()) })?;
    InputDoc::from_json(&text)
}

fn weight(cli: &Cli) -> Result<Option<Weight>> {
    cli.weight.as_deref().map(|w| parse_rational(w).and_then(Weight::new)).transpose()
}

fn parse_number(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .or_else(|_| parse_rational(s).map(|q| rational_to_f64(&q)))
        .map_err(|_| Error::Parse { what: "number", detail: s.to_string() })
}

fn grid(cli: &Cli, k_star: f64) -> Result<Vec<f64>> {
    match cli.grid.as_deref() {
        None => default_k_grid(k_star, 9),
        Some(g) => {
            let parts: Vec<&str> = g.split(':').collect();
            if parts.len() == 3 {
                let count = parts[2].trim().parse().map_err(|_| Error::Parse { what: "grid", detail: g.into() })?;
                geometric_grid(parse_number(parts[0])?, parse_number(parts[1])?, count)
            } else {
                g.split(',').map(parse_number).collect()
            }
        }
    }
}

fn policy(cli: &Cli) -> Result<NumericalRankPolicy> {
    NumericalRankPolicy::new(cli.tolerance, 1)
}

fn block_diagonal(h: &ChainMap<GroupAlgebraMatrix>) -> Result<GroupAlgebraMatrix> {
    let g = h.source().group().clone();
    let mut acc = GroupAlgebraMatrix::zeros(g.clone(), 0, 0);
    for m in h.maps() {
        let (r, c) = (acc.nrows(), m.ncols());
        acc = GroupAlgebraMatrix::block2(
            &acc,
            &GroupAlgebraMatrix::zeros(g.clone(), r, c),
            &GroupAlgebraMatrix::zeros(g.clone(), m.nrows(), acc.ncols()),
            m,
        )?;
    }
    Ok(acc)
}

fn k_star(h: &ChainMap<GroupAlgebraMatrix>) -> f64 {
    let norm = chain_map_norm(h);
    if norm > 0.0 {
        1.0 / norm
    } else {
        1.0
    }
}

fn depths(top: usize, parts: &[usize]) -> Vec<usize> {
    let mut d: Vec<usize> = parts.iter().map(|p| (top / p).max(1)).collect();
    d.sort_unstable();
    d.dedup();
    d
}

fn ensure_json(cli: &Cli) -> Result<()> {
    if cli.format == Format::Csv {
        return Err(Error::InvalidArgument("CSV output is only available for scans".into()));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Report> {
    let depth = cli.depth.unwrap_or(8);
    if depth == 0 {
        return Err(Error::DepthTooSmall { depth, slack: 1 });
    }
    if !matches!(cli.command, Command::ScanSigma { .. } | Command::ScanLambda { .. } | Command::IndexWindow { .. }) {
        ensure_json(cli)?;
    }
    let report = match &cli.command {
        Command::Validate { input } => {
            let doc = read_doc(input)?;
            let (ring, d_min, ranks) = match doc.complex()? {
                AnyComplex::GroupRing(c) => (c.ring(), c.d_min(), c.ranks().to_vec()),
                AnyComplex::Laurent(c) => (c.ring(), c.d_min(), c.ranks().to_vec()),
            };
            let map = if doc.map.is_some() { Some(doc.self_map().is_ok()) } else { None };
            if doc.map.is_some() {
                doc.self_map()?;
            }
            json!({"valid": true, "ring": ring.as_str(), "d_min": d_min, "ranks": ranks, "self_map": map})
        }
        Command::Homology { input } => {
            let doc = read_doc(input)?;
            let (ring, degrees) = match doc.complex()? {
                AnyComplex::GroupRing(c) => {
                    let h = homology(&c)?;
                    (h.ring, degree_json(&h.degrees))
                }
                AnyComplex::Laurent(c) => {
                    let lambda = weight(cli)?.ok_or(Error::LaurentRing)?;
                    let h = homology(&specialize(&c, lambda.exact())?)?;
                    (h.ring, degree_json(&h.degrees))
                }
            };
            json!({"ring": ring.as_str(), "degrees": degrees})
        }
        Command::Euler { input } => {
            let doc = read_doc(input)?;
            if doc.wall.is_some() {
                let (p, ell) = doc.wall_element()?;
                let class = wall_euler_class(&p, ell, depth)?;
                json!({
                    "chi_equivariant": character_json(&class.character),
                    "reduced_nonzero": !class.reduced_zero,
                    "depth": depth,
                })
            } else {
                let c = doc.group_ring_complex()?;
                let chi = equivariant_euler(&c)?;
                json!({
                    "chi": euler_characteristic(&c),
                    "chi_equivariant": character_json(&chi),
                    "reduced_nonzero": !reduced_class_is_zero(&chi),
                })
            }
        }
        Command::Torus { input } => {
            let h = read_doc(input)?.self_map()?;
            json!({"torus": laurent_complex_json(&mapping_torus(&h)?)})
        }
        Command::ContractPlus { input } | Command::ContractMinus { input } => {
            let h = read_doc(input)?.self_map()?;
            let k = match weight(cli)? {
                Some(k) => k,
                None => Weight::new(default_weight(&h))?,
            };
            let cert = if matches!(cli.command, Command::ContractPlus { .. }) {
                plus_contraction(&h, &k, depth)?
            } else {
                minus_contraction(&h, &k, depth)?
            };
            let verified = cert.verified;
            return Ok(Report::Json(certificate_json(&cert), verified));
        }
        Command::Novikov { input, side } => {
            let doc = read_doc(input)?;
            let h = doc.self_map()?;
            let inverse = doc.inverse_map()?;
            let side = match side {
                Side::Z => NovikovSide::Z,
                Side::ZInverse => NovikovSide::ZInverse,
            };
            novikov_json(&novikov_vanishing(&h, side, depth, inverse.as_ref())?)
        }
        Command::Wall { input } => {
            let (p, ell) = read_doc(input)?.wall_element()?;
            let class = wall_euler_class(&p, ell, depth)?;
            let t = wall_transpose_certificate(&p, ell, depth)?;
            json!({
                "depth": depth,
                "class": character_json(&class.character),
                "reduced_nonzero": !class.reduced_zero,
                "image_of_p": character_json(&class.image_character),
                "transpose": {
                    "ell": t.ell,
                    "class": character_json(&t.character),
                    "remainder_exponent": t.remainder_exponent,
                    "overflow_band": t.overflow,
                    "verified": true,
                },
            })
        }
        Command::ScanSigma { input } => {
            let h = read_doc(input)?.self_map()?;
            let hb = block_diagonal(&h)?;
            let g = hb.group().clone();
            let m = LaurentMatrix::identity(g, hb.nrows()).sub(&LaurentMatrix::monomial(1, hb.clone()))?;
            let ks = grid(cli, k_star(&h))?;
            let scan = sigma_min_scan(&m, &ks, &depths(cli.depth.unwrap_or(32), &[4, 2, 1]), &policy(cli)?)?;
            if cli.format == Format::Csv {
                return Ok(Report::Csv(scan.to_csv(), true));
            }
            let threshold = if hb.is_zero() { Value::Null } else { json!(fredholm_threshold(&hb)?) };
            json!({"seed": cli.seed, "threshold": threshold, "scan": scan})
        }
        Command::ScanLambda { input } => {
            let h = read_doc(input)?.self_map()?;
            let radius = weight(cli)?.map_or(1.0, |w| w.float());
            let scan = lambda_circle_scan(&h, radius, cli.samples, &policy(cli)?)?;
            if cli.format == Format::Csv {
                return Ok(Report::Csv(scan.to_csv(), true));
            }
            json!({"seed": cli.seed, "scan": scan})
        }
        Command::IndexWindow { input, dual } => {
            let doc = read_doc(input)?;
            let model = doc.index_model()?;
            let ks = grid(cli, k_star(&model.h))?;
            let scan = index_window_experiment(&model, &ks, &depths(cli.depth.unwrap_or(32), &[2, 1]), *dual, &policy(cli)?)?;
            if cli.format == Format::Csv {
                return Ok(Report::Csv(scan.to_csv(), true));
            }
            json!({"seed": cli.seed, "scan": scan})
        }
        Command::Fixtures { action } => match action {
            FixtureAction::List => {
                let list: Vec<Value> =
                    fixtures::list().into_iter().map(|(n, d)| json!({"name": n, "description": d})).collect();
                json!({"fixtures": list})
            }
            FixtureAction::Run { name } => {
                let v = fixtures::run(name)?;
                let passed = v.passed;
                return Ok(Report::Json(serde_json::to_value(&v).expect("serializable"), passed));
            }
        },
    };
    Ok(Report::Json(report, true))
}

fn degree_json(degrees: &[telescope_core::complexes::HomologyDegree<impl telescope_core::exact::Field>]) -> Value {
    degrees
        .iter()
        .map(|d| {
            json!({
                "degree": d.degree,
                "dim": d.dim,
                "character": d.character.as_ref().map(character_json),
            })
        })
        .collect()
}

fn emit(cli: &Cli, text: &str) -> std::io::Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("TELESCOPE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    configure_threads();
    let (text, code) = match run(&cli) {
        Ok(Report::Json(v, ok)) => (pretty(&v), if ok { 0 } else { 1 }),
        Ok(Report::Csv(s, ok)) => (s, if ok { 0 } else { 1 }),
        Err(e) => {
            eprintln!("telescope: {e}");
            (pretty(&error_json(&e)), if e.is_input_error() { 2 } else { 1 })
        }
    };
    if let Err(e) = emit(&cli, &text) {
        eprintln!("telescope: cannot write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
