//! Acceptance gate. Each criterion prints one `PASS`/`FAIL` line; any failure makes
//! the process exit nonzero. Runtime limits are wall-clock and include building.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quadres::ext::injective_dimension_evidence;
use quadres::homology::{exactness_report, h0_check, kernel_dim};
use quadres::hunt::{conjecture_hunt, enumerate_cases};
use quadres::oracles::{compare, oracle_complex, OracleKind};
use quadres::{Diagram, Field, FreeComplex, RingSpec};

const FIBONACCI_LIMIT: Duration = Duration::from_secs(1);
const DOUBLING_LIMIT: Duration = Duration::from_secs(1);
const CHAIN_LIMIT: Duration = Duration::from_secs(60);
const EXACTNESS_LIMIT: Duration = Duration::from_secs(120);
const EXT_LIMIT: Duration = Duration::from_secs(60);
const HUNT_LIMIT: Duration = Duration::from_secs(300);
const RANDOM_SPECS: usize = 200;
const SEED: u64 = 0x5155_4144;

type Verdict = Result<String, String>;
type Criterion = (&'static str, Box<dyn Fn() -> Verdict>);

fn built(spec: &RingSpec, initial: usize, levels: usize) -> Result<FreeComplex, String> {
    let d = Diagram::build(spec, initial, levels).map_err(|e| e.to_string())?;
    Ok(FreeComplex::from_diagram(&d))
}

fn within(limit: Duration, start: Instant, detail: String) -> Verdict {
    let took = start.elapsed();
    if took <= limit {
        Ok(format!("{detail} in {took:.2?}"))
    } else {
        Err(format!("{detail} but took {took:.2?} (limit {limit:?})"))
    }
}

fn named_rings() -> Vec<(&'static str, RingSpec)> {
    vec![
        ("ex31", OracleKind::Fibonacci.spec()),
        ("ex32", OracleKind::Binary.spec()),
        ("o3", OracleKind::OFamily(3).spec()),
    ]
}

fn fixture_complexes() -> Vec<(&'static str, RingSpec, usize)> {
    vec![
        ("ex31", OracleKind::Fibonacci.spec(), 8),
        ("ex32", OracleKind::Binary.spec(), 8),
        ("o2", OracleKind::OFamily(2).spec(), 7),
        ("o3", OracleKind::OFamily(3).spec(), 7),
        ("o4", OracleKind::OFamily(4).spec(), 7),
    ]
}

fn fibonacci_ranks() -> Verdict {
    let start = Instant::now();
    let c = built(&OracleKind::Fibonacci.spec(), 1, 10)?;
    let want = [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89];
    if c.ranks() != want {
        return Err(format!("ranks {:?}", c.ranks()));
    }
    within(FIBONACCI_LIMIT, start, format!("ranks {:?}", c.ranks()))
}

fn doubling_ranks() -> Verdict {
    let start = Instant::now();
    let c = built(&OracleKind::Binary.spec(), 1, 10)?;
    let want: Vec<usize> = std::iter::once(1).chain((0..10).map(|k| 1 << k)).collect();
    if c.ranks() != want {
        return Err(format!("ranks {:?}", c.ranks()));
    }
    within(DOUBLING_LIMIT, start, format!("ranks {:?}", c.ranks()))
}

fn chain_complex_property() -> Verdict {
    let start = Instant::now();
    let mut checked = 0;
    for (name, spec) in named_rings() {
        let c = built(&spec, 1, 10)?;
        c.verify_all().map_err(|f| format!("{name}: {f}"))?;
        checked += 1;
    }
    let cases = enumerate_cases(4);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..RANDOM_SPECS {
        let (spec, initial) = cases.choose(&mut rng).expect("cases exist");
        let levels = rng.gen_range(1..=8);
        let c = built(spec, *initial, levels).map_err(|e| format!("{spec} x{initial}: {e}"))?;
        c.verify_all().map_err(|f| format!("{spec} x{initial}: {f}"))?;
        checked += 1;
    }
    within(CHAIN_LIMIT, start, format!("{checked} complexes, 0 failures"))
}

fn exactness() -> Verdict {
    let start = Instant::now();
    let mut pieces = 0;
    for (name, spec, levels) in fixture_complexes() {
        let c = built(&spec, 1, levels)?;
        for field in [Field::default(), Field::Rational] {
            let r = exactness_report(&c, levels + 4, field);
            if !r.consistent {
                return Err(format!("{name} over {field}: nonzero (n, t, dim) {:?}", r.defects()));
            }
            pieces += r.rows.iter().filter(|row| row.n >= 1).count();
        }
    }
    within(EXACTNESS_LIMIT, start, format!("{pieces} graded pieces all zero"))
}

fn h0_identification() -> Verdict {
    for (name, spec, levels) in fixture_complexes() {
        let c = built(&spec, 1, levels)?;
        let h = h0_check(&c, 12, Field::default()).ok_or("d_1 is not a single variable")?;
        if !h.matches {
            return Err(format!("{name}: H0 {:?} vs R/(x1) {:?}", h.observed, h.expected));
        }
    }
    Ok("5 complexes match R/(x1) for t <= 12".into())
}

fn oracle_equivalence() -> Verdict {
    let cases = [
        (OracleKind::Fibonacci, 8),
        (OracleKind::Binary, 8),
        (OracleKind::OFamily(3), 6),
        (OracleKind::OFamily(4), 6),
    ];
    for (kind, levels) in cases {
        let oracle = oracle_complex(kind, levels).map_err(|e| e.to_string())?;
        let c = compare(&built(&kind.spec(), 1, levels)?, &oracle, levels + 4, Field::default());
        if !c.equal {
            return Err(format!("{kind}: {c:?}"));
        }
    }
    Ok("fibonacci, binary, o3, o4 equal".into())
}

fn ext_nonvanishing() -> Verdict {
    let start = Instant::now();
    let mut summary = Vec::new();
    for (name, spec) in named_rings() {
        let r = injective_dimension_evidence(&spec, 1, 8, 12, Field::default()).map_err(|e| format!("{name}: {e}"))?;
        let low: Vec<usize> = r.nonzero_ext_positions.iter().copied().filter(|&p| p <= 7).collect();
        if low.len() < 4 {
            return Err(format!("{name}: nonzero positions {low:?}"));
        }
        summary.push(format!("{name} {low:?} ({} vv)", r.vv_occurrences.len()));
    }
    within(EXT_LIMIT, start, summary.join(", "))
}

fn kernel_splitting() -> Verdict {
    let mut checks = 0;
    for (name, spec, _) in fixture_complexes() {
        for &(i, j) in spec.generators().iter().filter(|(i, j)| i != j) {
            for t in 0..=10 {
                let f = Field::default();
                let (a, b, ab) = (kernel_dim(&spec, &[i], t, f), kernel_dim(&spec, &[j], t, f), kernel_dim(&spec, &[i, j], t, f));
                if ab != a + b {
                    return Err(format!("{name}: x{i}x{j} t={t}: {ab} != {a} + {b}"));
                }
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} (pair, degree) checks"))
}

fn hunt() -> Verdict {
    let start = Instant::now();
    let first = conjecture_hunt(3, 6, 8, Field::default());
    let second = conjecture_hunt(3, 6, 8, Field::default());
    if first != second {
        return Err("two runs differ".into());
    }
    if first.anomaly_count() > 0 {
        let witness: Vec<_> = first.anomalous().take(3).collect();
        return Err(format!("{}; first: {witness:?}", first.summary()));
    }
    within(HUNT_LIMIT, start, first.summary())
}

fn run(bin: &Path, args: &[&str]) -> Output {
    Command::new(bin).args(args).env("QUADRES_THREADS", "4").output().expect("binary runs")
}

fn round_trip_and_determinism(bin: &Path, rings: &Path) -> Verdict {
    for (name, spec, levels) in fixture_complexes() {
        let d = Diagram::build(&spec, 1, levels.min(6)).map_err(|e| e.to_string())?;
        let text = d.to_json();
        let again = Diagram::from_json(&text).map_err(|e| e.to_string())?.to_json();
        let c = FreeComplex::from_diagram(&d);
        let ctext = c.to_json();
        let cagain = FreeComplex::from_json(&spec, &ctext).map_err(|e| e.to_string())?.to_json();
        if again != text || cagain != ctext {
            return Err(format!("{name}: re-export differs"));
        }
    }
    let ring = |f: &str| rings.join(f).display().to_string();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = |k: usize| dir.path().join(format!("build{k}")).display().to_string();
    let commands: Vec<Vec<String>> = vec![
        vec!["build".into(), "--ring".into(), ring("ex31.json"), "--levels".into(), "7".into(), "--dot".into(), "--out".into()],
        vec!["check".into(), "--ring".into(), ring("o3.json"), "--levels".into(), "6".into()],
        vec!["homology".into(), "--ring".into(), ring("ex32.json"), "--levels".into(), "8".into(), "--max-degree".into(), "10".into()],
        vec!["homology".into(), "--ring".into(), ring("o3.json"), "--levels".into(), "5".into(), "--format".into(), "json".into(), "--field".into(), "q".into()],
        vec!["ext".into(), "--ring".into(), ring("ex31.json"), "--levels".into(), "8".into()],
        vec!["oracle".into(), "--oracle".into(), "o3".into(), "--levels".into(), "6".into()],
        vec!["hunt".into(), "--max-vars".into(), "2".into(), "--levels".into(), "6".into(), "--max-degree".into(), "8".into()],
        vec!["hilbert".into(), "--ring".into(), ring("ex31.json")],
        vec!["export-dot".into(), "--ring".into(), ring("ex32.json"), "--levels".into(), "4".into()],
    ];
    for cmd in &commands {
        let mut outputs = Vec::new();
        for k in 0..2 {
            let mut args: Vec<String> = cmd.clone();
            if args.last().is_some_and(|a| a == "--out") {
                args.push(out(k));
            }
            let refs: Vec<&str> = args.iter().map(String::as_str).collect();
            let o = run(bin, &refs);
            if !o.status.success() {
                return Err(format!("{} exited {:?}: {}", cmd[0], o.status.code(), String::from_utf8_lossy(&o.stderr)));
            }
            outputs.push(o.stdout);
        }
        if outputs[0] != outputs[1] {
            return Err(format!("{} output differs between runs", cmd[0]));
        }
    }
    for file in ["diagram.json", "complex.json", "diagram.dot"] {
        let a = std::fs::read(PathBuf::from(out(0)).join(file)).map_err(|e| e.to_string())?;
        let b = std::fs::read(PathBuf::from(out(1)).join(file)).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("build wrote different {file}"));
        }
    }
    Ok(format!("{} commands byte-identical across runs; JSON re-export stable", commands.len()))
}

fn main() {
    let bin = PathBuf::from(env!("CARGO_BIN_EXE_quadres"));
    let rings = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/rings");
    let criteria: Vec<Criterion> = vec![
        ("AC1 fibonacci ranks through L=10", Box::new(fibonacci_ranks)),
        ("AC2 doubling ranks through L=10", Box::new(doubling_ranks)),
        ("AC3 d∘d = 0 on named rings and random specs", Box::new(chain_complex_property)),
        ("AC4 exactness over F_32003 and Q", Box::new(exactness)),
        ("AC5 H0 equals R/(x1)", Box::new(h0_identification)),
        ("AC6 oracle equivalence", Box::new(oracle_equivalence)),
        ("AC7 Ext nonvanishing and detector soundness", Box::new(ext_nonvanishing)),
        ("AC8 kernel splitting", Box::new(kernel_splitting)),
        ("AC9 conjecture hunt n <= 3", Box::new(hunt)),
        ("AC10 round trip and determinism", Box::new(move || round_trip_and_determinism(&bin, &rings))),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
