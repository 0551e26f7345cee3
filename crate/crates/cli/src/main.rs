use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use quadres::ext::{injective_dimension_evidence, ExtError};
use quadres::homology::{exactness_report, h0_check};
use quadres::hunt::{conjecture_hunt, CaseResult};
use quadres::oracles::{compare, oracle_complex, OracleKind};
use quadres::{Diagram, DiagramError, Field, FreeComplex, RingSpec};

/// Free resolutions of R/(x_i) over quotients by quadratic monomials.
#[derive(Parser, Debug)]
#[command(name = "quadres", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the diagram and write diagram.json, complex.json (and diagram.dot) into --out.
    Build {
        #[command(flatten)]
        input: BuildInput,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write diagram.dot.
        #[arg(long)]
        dot: bool,
    },
    /// Verify d∘d = 0 at every level.
    Check {
        #[command(flatten)]
        input: BuildInput,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Graded homology table up to --max-degree.
    Homology {
        #[command(flatten)]
        input: BuildInput,
        #[command(flatten)]
        grading: Grading,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Nonzero Ext^i(R/(x_i), R) positions and vv occurrences.
    Ext {
        #[command(flatten)]
        input: BuildInput,
        #[command(flatten)]
        grading: Grading,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the construction with a closed-form complex.
    Oracle {
        /// fibonacci | binary | o<N>
        #[arg(long)]
        oracle: OracleKind,
        #[arg(long, default_value_t = 8)]
        levels: usize,
        #[command(flatten)]
        grading: Grading,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every ring on at most --max-vars variables and every valid initial map.
    Hunt {
        #[arg(long, default_value_t = 4)]
        max_vars: usize,
        #[arg(long, default_value_t = 6)]
        levels: usize,
        #[arg(long, default_value_t = 8)]
        max_degree: usize,
        #[arg(long, default_value_t = Field::default())]
        field: Field,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hilbert function of the ring.
    Hilbert {
        #[arg(long)]
        ring: PathBuf,
        #[arg(long, default_value_t = 10)]
        max_degree: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Graphviz rendering of a built diagram, or of a saved diagram.json.
    ExportDot {
        #[arg(long, conflicts_with_all = ["ring", "initial"])]
        diagram: Option<PathBuf>,
        #[arg(long, required_unless_present = "diagram")]
        ring: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        initial: usize,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct BuildInput {
    #[arg(long)]
    ring: PathBuf,
    #[arg(long, default_value_t = 1)]
    initial: usize,
    #[arg(long, default_value_t = 8)]
    levels: usize,
}

#[derive(Args, Debug)]
struct Grading {
    /// Largest internal degree; defaults to levels + 4.
    #[arg(long)]
    max_degree: Option<usize>,
    #[arg(long, default_value_t = Field::default())]
    field: Field,
}

impl Grading {
    fn max_degree(&self, levels: usize) -> usize {
        self.max_degree.unwrap_or(levels + 4)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Tsv,
    Json,
}

enum Failure {
    /// Bad arguments or files: exit 2.
    Invalid(String),
    /// The mathematics disagreed with expectations: exit 3, witness on stderr.
    Anomaly(serde_json::Value),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<DiagramError> for Failure {
    fn from(e: DiagramError) -> Self {
        match e {
            DiagramError::SignConflict { level, cycle } => {
                Failure::Anomaly(json!({"anomaly": "sign_conflict", "level": level, "cycle": cycle}))
            }
            DiagramError::NotAComplex { level, failure } => Failure::Anomaly(json!({
                "anomaly": "not_a_complex",
                "level": level,
                "position": failure.position,
                "row": failure.row,
                "col": failure.col,
                "element": failure.element.to_string(),
            })),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn emit(out: Option<&Path>, text: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn load_ring(path: &Path) -> Result<RingSpec, Failure> {
    RingSpec::load(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn build(input: &BuildInput) -> Result<Diagram, Failure> {
    let spec = load_ring(&input.ring)?;
    Ok(Diagram::build(&spec, input.initial, input.levels)?)
}

fn joined(xs: &[usize]) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn cmd_build(input: &BuildInput, out: Option<&Path>, dot: bool) -> Outcome {
    let diagram = build(input)?;
    let complex = FreeComplex::from_diagram(&diagram);
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("diagram.json"), diagram.to_json())?;
        fs::write(dir.join("complex.json"), complex.to_json())?;
        if dot {
            fs::write(dir.join("diagram.dot"), diagram.to_dot())?;
        }
    }
    println!("ranks {}", joined(&diagram.level_counts()));
    Ok(())
}

fn cmd_check(input: &BuildInput, out: Option<&Path>) -> Outcome {
    let complex = FreeComplex::from_diagram(&build(input)?);
    if let Err(f) = complex.verify_all() {
        return Err(Failure::Anomaly(json!({
            "anomaly": "not_a_complex",
            "position": f.position,
            "row": f.row,
            "col": f.col,
            "element": f.element.to_string(),
        })));
    }
    let text = format!("d∘d = 0 at every level 2..={} (ranks {})\n", complex.levels(), joined(complex.ranks()));
    Ok(emit(out, &text)?)
}

fn cmd_homology(input: &BuildInput, grading: &Grading, format: Format, out: Option<&Path>) -> Outcome {
    let complex = FreeComplex::from_diagram(&build(input)?);
    let report = exactness_report(&complex, grading.max_degree(input.levels), grading.field);
    let text = match format {
        Format::Tsv => report.to_tsv(),
        Format::Json => report.to_json() + "\n",
    };
    emit(out, &text)?;
    eprintln!(
        "{} (position {} not assessable)",
        report.verdict(),
        report.not_assessable_position
    );
    let h0 = h0_check(&complex, grading.max_degree(input.levels), grading.field);
    if !report.consistent || h0.as_ref().is_some_and(|h| !h.matches) {
        return Err(Failure::Anomaly(json!({
            "anomaly": "homology",
            "nonzero": report.defects(),
            "h0": h0,
        })));
    }
    Ok(())
}

fn cmd_ext(input: &BuildInput, grading: &Grading, out: Option<&Path>) -> Outcome {
    let spec = load_ring(&input.ring)?;
    let span = grading.max_degree(input.levels);
    match injective_dimension_evidence(&spec, input.initial, input.levels, span, grading.field) {
        Ok(report) => Ok(emit(out, &(report.to_json() + "\n"))?),
        Err(ExtError::Diagram(e)) => Err(e.into()),
        Err(ExtError::DetectorUnsound { occurrence, degree }) => Err(Failure::Anomaly(json!({
            "anomaly": "detector_unsound",
            "occurrence": occurrence,
            "degree": degree,
        }))),
    }
}

fn cmd_oracle(kind: OracleKind, levels: usize, grading: &Grading, out: Option<&Path>) -> Outcome {
    let oracle = oracle_complex(kind, levels).map_err(|e| Failure::Invalid(e.to_string()))?;
    let built = FreeComplex::from_diagram(&Diagram::build(&kind.spec(), 1, levels)?);
    let verdict = compare(&built, &oracle, grading.max_degree(levels), grading.field);
    let text = serde_json::to_string_pretty(&json!({"oracle": kind.to_string(), "comparison": verdict}))
        .expect("verdict serializes");
    emit(out, &(text + "\n"))?;
    if verdict.equal {
        Ok(())
    } else {
        Err(Failure::Anomaly(json!({"anomaly": "oracle_mismatch", "comparison": verdict})))
    }
}

fn case_line(c: &CaseResult) -> String {
    if c.anomalies.is_empty() {
        format!("ok\t{}\tx{}\t{}", c.ring, c.initial, joined(&c.ranks))
    } else {
        format!("ANOMALY\t{}", serde_json::to_string(c).expect("case serializes"))
    }
}

fn cmd_hunt(max_vars: usize, levels: usize, max_degree: usize, field: Field, out: Option<&Path>) -> Outcome {
    if max_vars == 0 || max_vars > 5 {
        return Err(Failure::Invalid(format!("--max-vars must be in 1..=5, got {max_vars}")));
    }
    if levels == 0 {
        return Err(Failure::Invalid("--levels must be at least 1".into()));
    }
    let report = conjecture_hunt(max_vars, levels, max_degree, field);
    let mut text: String = report.cases.iter().map(|c| case_line(c) + "\n").collect();
    text.push_str(&report.summary());
    text.push('\n');
    emit(out, &text)?;
    if report.anomaly_count() > 0 {
        let witness: Vec<&CaseResult> = report.anomalous().collect();
        return Err(Failure::Anomaly(json!({"anomaly": "hunt", "cases": witness})));
    }
    Ok(())
}

fn cmd_hilbert(ring: &Path, max_degree: usize, out: Option<&Path>) -> Outcome {
    let spec = load_ring(ring)?;
    let mut text = String::from("d\tdim\n");
    for (d, h) in spec.hilbert_function(max_degree).iter().enumerate() {
        text.push_str(&format!("{d}\t{h}\n"));
    }
    Ok(emit(out, &text)?)
}

fn cmd_export_dot(
    diagram: Option<&Path>,
    ring: Option<&Path>,
    initial: usize,
    levels: usize,
    out: Option<&Path>,
) -> Outcome {
    let d = match (diagram, ring) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)?;
            Diagram::from_json(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?
        }
        (None, Some(ring)) => Diagram::build(&load_ring(ring)?, initial, levels)?,
        (None, None) => unreachable!("clap requires --ring or --diagram"),
    };
    Ok(emit(out, &d.to_dot())?)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("QUADRES_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Invalid(format!("QUADRES_THREADS={raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Invalid(e.to_string()))
}

fn run(cli: Cli) -> Outcome {
    configure_threads()?;
    match &cli.command {
        Command::Build { input, out, dot } => cmd_build(input, out.as_deref(), *dot),
        Command::Check { input, out } => cmd_check(input, out.as_deref()),
        Command::Homology { input, grading, format, out } => cmd_homology(input, grading, *format, out.as_deref()),
        Command::Ext { input, grading, out } => cmd_ext(input, grading, out.as_deref()),
        Command::Oracle { oracle, levels, grading, out } => cmd_oracle(*oracle, *levels, grading, out.as_deref()),
        Command::Hunt { max_vars, levels, max_degree, field, out } => {
            cmd_hunt(*max_vars, *levels, *max_degree, *field, out.as_deref())
        }
        Command::Hilbert { ring, max_degree, out } => cmd_hilbert(ring, *max_degree, out.as_deref()),
        Command::ExportDot { diagram, ring, initial, levels, out } => {
            cmd_export_dot(diagram.as_deref(), ring.as_deref(), *initial, *levels, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Anomaly(witness)) => {
            eprintln!("{}", serde_json::to_string_pretty(&witness).expect("witness serializes"));
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
