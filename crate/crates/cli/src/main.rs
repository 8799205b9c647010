mod input;

use std::io::{BufWriter, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use nilmod::bracket::{
    self, degeneration_search, format_salamon, jmap, BracketError, DegenerationWitness, LieBracket,
};
use nilmod::classify::{self, reduce_to_jform, Classification, ClassifyError, CLASSIFY_TOL};
use nilmod::geometry::{self, GeometryError, RankResult, DEFAULT_RANK_SAMPLES};
use nilmod::moduli::{self, normalize_trace, CanonicalForm, ModuliError, ModuliPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::input::InputError;

#[derive(Debug, Parser)]
#[command(name = "nilmod", version, about = "Classify and measure metric 2-step nilpotent Lie algebras")]
struct Cli {
    /// Classification tolerance.
    #[arg(long, global = true, default_value_t = CLASSIFY_TOL)]
    tol: f64,
    /// Emit JSON (the only format).
    #[arg(long, global = true)]
    json: bool,
    /// Include wall-clock timings in the output.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Isomorphism class and orthogonal invariants of a bracket.
    Classify {
        /// Structure equations such as `(0,0,0,0,12,34)`, or a coefficient file.
        input: String,
    },
    /// Random points of the moduli space, one JSON object per line.
    Sample {
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Commutator dimension; random in 1..=3 when omitted.
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=3))]
        stratum: Option<u8>,
    },
    /// Search for a diagonal-family degeneration from SOURCE to TARGET.
    Degenerate {
        source: String,
        target: String,
        #[arg(long, default_value_t = 3)]
        max_exp: u32,
    },
    /// Classification plus curvature and infinitesimal rank.
    Geometry {
        input: String,
        #[arg(long, default_value_t = DEFAULT_RANK_SAMPLES)]
        rank_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Input(String),
    NotTwoStep(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::NotTwoStep(_) => 3,
            Failure::Runtime(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::NotTwoStep(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<BracketError> for Failure {
    fn from(e: BracketError) -> Self {
        match e {
            BracketError::NotTwoStep(_) | BracketError::CommutatorNotCentral(_) => Failure::NotTwoStep(e.to_string()),
            BracketError::Parse { .. }
            | BracketError::NotUnitCoefficients { .. }
            | BracketError::DimensionMismatch(..)
            | BracketError::UnsupportedDimension(_) => Failure::Input(e.to_string()),
            BracketError::SingularMatrix(_) => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        match e {
            InputError::Bracket(b) => b.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<ModuliError> for Failure {
    fn from(e: ModuliError) -> Self {
        match e {
            ModuliError::Bracket(b) => b.into(),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Bracket(b) => b.into(),
            ClassifyError::Moduli(m) => m.into(),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::NotLieAlgebra(_) => Failure::NotTwoStep(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

#[derive(Serialize)]
struct Timings {
    total_ms: f64,
}

#[derive(Serialize)]
struct Report {
    input: String,
    dim: usize,
    stratum: usize,
    moduli: ModuliPoint,
    canonical: Option<CanonicalForm>,
    classification: Classification,
    #[serde(skip_serializing_if = "Option::is_none")]
    curvature: Option<Vec<(usize, usize, usize, usize, f64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rank: Option<RankResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<Timings>,
}

#[derive(Serialize)]
struct ShearReport {
    row: usize,
    col: usize,
    sign: i8,
}

#[derive(Serialize)]
struct WitnessReport {
    shear: Option<ShearReport>,
    exponents: Vec<i32>,
    permutation: Vec<usize>,
    signs: Vec<i8>,
    limit: Vec<(usize, usize, usize, f64)>,
    limit_notation: Option<String>,
}

impl From<&DegenerationWitness> for WitnessReport {
    fn from(w: &DegenerationWitness) -> Self {
        WitnessReport {
            shear: w.shear.map(|s| ShearReport { row: s.row + 1, col: s.col + 1, sign: s.sign }),
            exponents: w.exponents.clone(),
            permutation: w.permutation.iter().map(|p| p + 1).collect(),
            signs: w.signs.clone(),
            limit: w.limit.nonzero_entries(0.0).into_iter().map(|(i, j, k, v)| (i + 1, j + 1, k + 1, v)).collect(),
            limit_notation: format_salamon(&w.limit).ok(),
        }
    }
}

#[derive(Serialize)]
struct DegenerationReport {
    source: String,
    target: String,
    max_exp: u32,
    found: bool,
    witness: Option<WitnessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<Timings>,
}

fn report(input: &str, c: &LieBracket, tol: f64) -> Result<Report, Failure> {
    let k = bracket::stratum(c)?;
    let moduli = moduli::normalized_invariants(c)?;
    let canonical = if k == 2 {
        let j = normalize_trace(&jmap(c)?, 2.0)?;
        Some(reduce_to_jform(&j)?)
    } else {
        None
    };
    let classification = classify::classify_tol(c, tol)?;
    Ok(Report {
        input: input.to_string(),
        dim: c.dim(),
        stratum: k,
        moduli,
        canonical,
        classification,
        curvature: None,
        rank: None,
        timings: None,
    })
}

fn elapsed(start: Instant, enabled: bool) -> Option<Timings> {
    enabled.then(|| Timings { total_ms: start.elapsed().as_secs_f64() * 1e3 })
}

fn emit<T: Serialize>(out: &mut impl Write, value: &T) -> Result<(), Failure> {
    serde_json::to_writer(&mut *out, value).map_err(|e| Failure::Runtime(e.to_string()))?;
    writeln!(out).map_err(|e| Failure::Runtime(e.to_string()))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(Failure::Input(format!("tolerance must be positive, got {}", cli.tol)));
    }
    let start = Instant::now();
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let code = match cli.command {
        Command::Classify { input } => {
            let c = input::load(&input)?;
            let mut r = report(&input, &c, cli.tol)?;
            r.timings = elapsed(start, cli.timings);
            emit(&mut out, &r)?;
            0
        }
        Command::Sample { count, seed, stratum } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let k = stratum.map_or_else(|| rng.random_range(1..=3), usize::from);
                let p = moduli::sample_point(k, &mut rng)?;
                emit(&mut out, &p)?;
            }
            0
        }
        Command::Degenerate { source, target, max_exp } => {
            let c = input::load(&source)?;
            let d = input::load(&target)?;
            let outcome = degeneration_search(&c, &d, max_exp)?;
            let witness = outcome.witness().map(WitnessReport::from);
            let found = witness.is_some();
            let r = DegenerationReport { source, target, max_exp, found, witness, timings: elapsed(start, cli.timings) };
            emit(&mut out, &r)?;
            if found {
                0
            } else {
                1
            }
        }
        Command::Geometry { input, rank_samples, seed } => {
            let c = input::load(&input)?;
            let mut r = report(&input, &c, cli.tol)?;
            let curv = geometry::curvature(&c)?;
            let tol = 1e-12 * curv.max_abs().max(1.0);
            r.curvature = Some(curv.components(tol));
            r.rank = Some(geometry::rank_of(&curv, rank_samples, seed));
            r.timings = elapsed(start, cli.timings);
            emit(&mut out, &r)?;
            0
        }
    };
    out.flush().map_err(|e| Failure::Runtime(e.to_string()))?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
