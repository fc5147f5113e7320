//! `coinv` — exact coinvariant torsion computations from the command line.
//!
//! Subcommands: `predict` (wedge-square prediction for a group), `torsion`
//! (build a presentation and compare computed vs predicted), `skew`
//! (stage-by-stage analysis of a skew product given two diagram files),
//! `snf` (Smith normal form of an integer matrix), `classify` (residue
//! vector of a torsion class), and `example` (built-in diagram pairs).
//!
//! Exit codes: 0 all verdicts match, 1 a verdict failed (mismatch,
//! degenerate cocycle, non-torsion class), 2 usage or input errors.

mod report;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use coinv::abelian::FinAbGroup;
use coinv::bv::{self, DiagramError, OrderedBvDiagram};
use coinv::generators;
use coinv::linalg::IntMatrix;
use coinv::morphism;
use coinv::presentation::{self, CocycleData, PresError, Presentation};
use coinv::sampling::Sampler;
use num_bigint::BigInt;
use report::{digest_bytes, RunReport, Status};
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "coinv", version, about = "Exact coinvariant torsion of skew products")]
struct Cli {
    /// Emit the run report as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized test-data generation.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Predicted torsion (the wedge square G ∧ G) for a group.
    Predict {
        /// Comma-separated moduli, e.g. "2,2" or "6,4".
        #[arg(long)]
        group: String,
    },
    /// Compute the torsion of N(A,B) and compare with the prediction.
    Torsion {
        #[arg(long)]
        group: Option<String>,
        /// Cocycle data fixture; defaults to standard data for --group.
        #[arg(long)]
        fixture: Option<PathBuf>,
        /// Run this many seeded random (A,B,μ) draws instead of one fixture.
        #[arg(long)]
        trials: Option<u32>,
        /// Largest label-set size for random draws.
        #[arg(long, default_value_t = 4)]
        max_side: usize,
    },
    /// Stage-by-stage skew product analysis of two diagram files.
    Skew {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        /// Number of stages; defaults to all levels both diagrams have.
        #[arg(long)]
        levels: Option<usize>,
    },
    /// Smith normal form of a whitespace/line-delimited integer matrix.
    Snf {
        /// Matrix file; standard input when omitted.
        file: Option<PathBuf>,
    },
    /// Residue classification of a torsion class given an element file.
    Classify {
        #[arg(long)]
        group: Option<String>,
        /// Element file: lines "aLabel bLabel: ringElement".
        #[arg(long)]
        element: PathBuf,
        /// Cocycle data fixture; defaults to standard data.
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
    /// Built-in example generators.
    Example {
        #[command(subcommand)]
        which: ExampleCommand,
    },
}

#[derive(Subcommand)]
enum ExampleCommand {
    /// The octagonal pair: two rotation-by-√2 diagrams with Z_2 × Z_2
    /// cocycle labels.
    Octagonal {
        #[arg(long, default_value_t = 4)]
        levels: usize,
        /// Write the first diagram here instead of printing both.
        #[arg(long)]
        x: Option<PathBuf>,
        /// Write the second diagram here instead of printing both.
        #[arg(long)]
        y: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Mismatch) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Status> {
    match &cli.command {
        Command::Predict { group } => cmd_predict(cli, group),
        Command::Torsion {
            group,
            fixture,
            trials,
            max_side,
        } => cmd_torsion(cli, group.as_deref(), fixture.as_deref(), *trials, *max_side),
        Command::Skew { x, y, levels } => cmd_skew(cli, x, y, *levels),
        Command::Snf { file } => cmd_snf(cli, file.as_deref()),
        Command::Classify {
            group,
            element,
            fixture,
        } => cmd_classify(cli, group.as_deref(), element, fixture.as_deref()),
        Command::Example { which } => match which {
            ExampleCommand::Octagonal { levels, x, y } => cmd_example_octagonal(cli, *levels, x, y),
        },
    }
}

/// Presentations materialize |G|·|A|·|B| columns and |G|·(|A|+|B|)
/// relation rows; keep untrusted groups small enough that those fit.
const MAX_PRESENTATION_ORDER: u64 = 1000;

fn ensure_presentation_scale(group: &FinAbGroup) -> Result<()> {
    match group.checked_order() {
        Some(order) if order <= MAX_PRESENTATION_ORDER => Ok(()),
        _ => bail!(
            "group order exceeds the supported presentation scale ({MAX_PRESENTATION_ORDER})"
        ),
    }
}

/// Applies the scale guard to a fixture's `group:` line before the full
/// (and potentially enumeration-heavy) parse runs.
fn guard_fixture_scale(text: &str) -> Result<()> {
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| l.starts_with("group:"))
        .ok_or_else(|| anyhow!("fixture is missing a group: line"))?;
    let group = FinAbGroup::parse(line.trim_start_matches("group:"))?;
    ensure_presentation_scale(&group)
}

fn fmt_big_factors(factors: &[BigInt]) -> String {
    let parts: Vec<String> = factors.iter().map(|f| f.to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn fmt_u64_factors(factors: &[u64]) -> String {
    let parts: Vec<String> = factors.iter().map(|f| f.to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn big_factor_strings(factors: &[BigInt]) -> Vec<String> {
    factors.iter().map(|f| f.to_string()).collect()
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_file_or_stdin(path: Option<&Path>) -> Result<(String, String)> {
    match path {
        Some(p) => Ok((read_file(p)?, p.display().to_string())),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .context("cannot read standard input")?;
            Ok((buf, "<stdin>".to_string()))
        }
    }
}

fn emit<T: Serialize>(
    cli: &Cli,
    command: &str,
    inputs: BTreeMap<String, String>,
    result: T,
    status: Status,
    human: &str,
) -> Result<Status> {
    if cli.json {
        println!("{}", RunReport::new(command, inputs, result, status).to_json());
    } else {
        println!("{human}");
    }
    Ok(status)
}

#[derive(Serialize)]
struct PredictResult {
    group: String,
    torsion: Vec<u64>,
}

fn cmd_predict(cli: &Cli, group_str: &str) -> Result<Status> {
    let group = FinAbGroup::parse(group_str)?;
    let torsion = group.predicted_torsion();
    let human = format!("torsion: {}", fmt_u64_factors(&torsion));
    let mut inputs = BTreeMap::new();
    inputs.insert("group".into(), group.moduli_string());
    let result = PredictResult {
        group: group.moduli_string(),
        torsion,
    };
    emit(cli, "predict", inputs, result, Status::Ok, &human)
}

#[derive(Serialize)]
struct TorsionResult {
    group: String,
    source: String,
    predicted: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    free_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    computed: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<TrialSummary>,
    verdict: String,
}

#[derive(Serialize)]
struct TrialSummary {
    requested: u32,
    matching: u32,
    seed: u64,
    max_side: usize,
}

fn cmd_torsion(
    cli: &Cli,
    group_str: Option<&str>,
    fixture: Option<&Path>,
    trials: Option<u32>,
    max_side: usize,
) -> Result<Status> {
    let mut inputs = BTreeMap::new();
    let (data, source) = match fixture {
        Some(path) => {
            let text = read_file(path)?;
            inputs.insert("fixture".into(), path.display().to_string());
            inputs.insert("fixture.digest".into(), digest_bytes(text.as_bytes()));
            guard_fixture_scale(&text)?;
            let data = CocycleData::parse_fixture(&text)?;
            if let Some(gs) = group_str {
                let g = FinAbGroup::parse(gs)?;
                if g != *data.group() {
                    bail!("--group disagrees with the fixture's group");
                }
            }
            (data, path.display().to_string())
        }
        None => {
            let gs = group_str.ok_or_else(|| anyhow!("need --group or --fixture"))?;
            let group = FinAbGroup::parse(gs)?;
            (CocycleData::standard(&group), "standard".to_string())
        }
    };
    let group = data.group().clone();
    ensure_presentation_scale(&group)?;
    inputs.insert("group".into(), group.moduli_string());
    let predicted = group.predicted_torsion();

    if let Some(count) = trials {
        if fixture.is_some() {
            bail!("--trials draws random data and cannot be combined with --fixture");
        }
        inputs.insert("trials".into(), count.to_string());
        inputs.insert("seed".into(), cli.seed.to_string());
        let mut sampler = Sampler::new(cli.seed);
        let predicted_big: Vec<BigInt> = predicted.iter().map(|&d| BigInt::from(d)).collect();
        let mut matching = 0u32;
        for _ in 0..count {
            let data = sampler.cocycle_data(&group, max_side);
            let pres = Presentation::build(data);
            if pres.invariants().torsion_factors == predicted_big {
                matching += 1;
            }
        }
        let verdict = if matching == count { "MATCH" } else { "MISMATCH" };
        let human = format!(
            "group: {}\npredicted: {}\ntrials: {} (seed {}, max side {})\nmatching trials: {}/{}\nverdict: {}",
            group.moduli_string(),
            fmt_u64_factors(&predicted),
            count,
            cli.seed,
            max_side,
            matching,
            count,
            verdict
        );
        let status = if matching == count {
            Status::Ok
        } else {
            Status::Mismatch
        };
        let result = TorsionResult {
            group: group.moduli_string(),
            source,
            predicted,
            free_rank: None,
            computed: None,
            trials: Some(TrialSummary {
                requested: count,
                matching,
                seed: cli.seed,
                max_side,
            }),
            verdict: verdict.to_string(),
        };
        return emit(cli, "torsion", inputs, result, status, &human);
    }

    let pres = Presentation::build(data);
    let inv = pres.invariants();
    let matches = pres.matches_predicted();
    let verdict = if matches { "MATCH" } else { "MISMATCH" };
    let human = format!(
        "group: {}\ndata: {}\nfree rank: {}\ncomputed: {}\npredicted: {}\nverdict: {}",
        group.moduli_string(),
        source,
        inv.free_rank,
        fmt_big_factors(&inv.torsion_factors),
        fmt_u64_factors(&predicted),
        verdict
    );
    let status = if matches { Status::Ok } else { Status::Mismatch };
    let result = TorsionResult {
        group: group.moduli_string(),
        source,
        predicted,
        free_rank: Some(inv.free_rank),
        computed: Some(big_factor_strings(&inv.torsion_factors)),
        trials: None,
        verdict: verdict.to_string(),
    };
    emit(cli, "torsion", inputs, result, status, &human)
}

#[derive(Serialize)]
struct SkewStageRow {
    level: usize,
    nondegenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    free_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    torsion: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iso_to_next: Option<bool>,
}

#[derive(Serialize)]
struct SkewResult {
    group: String,
    levels: usize,
    predicted: Vec<u64>,
    stages: Vec<SkewStageRow>,
    verdict: String,
}

fn cmd_skew(cli: &Cli, x: &Path, y: &Path, levels: Option<usize>) -> Result<Status> {
    let x_text = read_file(x)?;
    let y_text = read_file(y)?;
    let dx = OrderedBvDiagram::from_json_str(&x_text).context("in the --x diagram")?;
    let dy = OrderedBvDiagram::from_json_str(&y_text).context("in the --y diagram")?;
    if dx.group() != dy.group() {
        bail!(
            "diagram groups differ: {} vs {}",
            dx.group().moduli_string(),
            dy.group().moduli_string()
        );
    }
    ensure_presentation_scale(dx.group())?;
    let available = dx.num_levels().min(dy.num_levels());
    let levels = levels.unwrap_or(available);
    if levels < 1 || levels > available {
        bail!("--levels must be between 1 and {available}");
    }
    let group = dx.group().clone();
    let predicted = group.predicted_torsion();
    let predicted_big: Vec<BigInt> = predicted.iter().map(|&d| BigInt::from(d)).collect();

    let mut presentations: Vec<Presentation> = Vec::new();
    let mut degenerate_at: Option<usize> = None;
    for level in 1..=levels {
        match bv::skew_stage(&dx, &dy, level) {
            Ok(data) => presentations.push(Presentation::build(data)),
            Err(DiagramError::Degenerate { level }) => {
                degenerate_at = Some(level);
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let mut isos: Vec<Option<bool>> = Vec::new();
    for idx in 0..presentations.len() {
        if idx + 1 < presentations.len() {
            let map = bv::skew_connecting_map(
                &dx,
                &dy,
                idx + 1,
                &presentations[idx],
                &presentations[idx + 1],
            )?;
            isos.push(Some(morphism::induced_torsion_iso_check(&map).is_iso));
        } else {
            isos.push(None);
        }
    }

    let mut rows: Vec<SkewStageRow> = Vec::new();
    let mut lines: Vec<String> = Vec::new();
    lines.push(format!("group: {}", group.moduli_string()));
    lines.push(format!("predicted: {}", fmt_u64_factors(&predicted)));
    let mut all_match = degenerate_at.is_none();
    for (idx, pres) in presentations.iter().enumerate() {
        let inv = pres.invariants();
        let matches = inv.torsion_factors == predicted_big;
        let iso = isos[idx];
        all_match &= matches && iso.unwrap_or(true);
        let iso_text = match iso {
            Some(true) => ", iso-to-next yes",
            Some(false) => ", iso-to-next NO",
            None => "",
        };
        lines.push(format!(
            "stage {}: nondegenerate yes, free rank {}, torsion {}{}",
            idx + 1,
            inv.free_rank,
            fmt_big_factors(&inv.torsion_factors),
            iso_text
        ));
        rows.push(SkewStageRow {
            level: idx + 1,
            nondegenerate: true,
            free_rank: Some(inv.free_rank),
            torsion: Some(big_factor_strings(&inv.torsion_factors)),
            iso_to_next: iso,
        });
    }
    if let Some(level) = degenerate_at {
        lines.push(format!(
            "stage {level}: DEGENERATE (tower products do not generate the group)"
        ));
        rows.push(SkewStageRow {
            level,
            nondegenerate: false,
            free_rank: None,
            torsion: None,
            iso_to_next: None,
        });
    }
    let verdict = if degenerate_at.is_some() {
        "DEGENERATE"
    } else if all_match {
        "MATCH"
    } else {
        "MISMATCH"
    };
    lines.push(format!("verdict: {verdict}"));

    let mut inputs = BTreeMap::new();
    inputs.insert("x".into(), x.display().to_string());
    inputs.insert("x.digest".into(), digest_bytes(x_text.as_bytes()));
    inputs.insert("y".into(), y.display().to_string());
    inputs.insert("y.digest".into(), digest_bytes(y_text.as_bytes()));
    inputs.insert("levels".into(), levels.to_string());
    let status = if verdict == "MATCH" {
        Status::Ok
    } else {
        Status::Mismatch
    };
    let result = SkewResult {
        group: group.moduli_string(),
        levels,
        predicted,
        stages: rows,
        verdict: verdict.to_string(),
    };
    emit(cli, "skew", inputs, result, status, &lines.join("\n"))
}

#[derive(Serialize)]
struct SnfResultPayload {
    diagonal: Vec<String>,
    free_rank: usize,
    torsion: Vec<String>,
}

fn cmd_snf(cli: &Cli, file: Option<&Path>) -> Result<Status> {
    let (text, source) = read_file_or_stdin(file)?;
    let matrix = IntMatrix::parse_text(&text)?;
    let snf = coinv::linalg::smith_normal_form(&matrix);
    let diagonal = snf.diagonal();
    let free_rank = matrix.cols() - snf.rank();
    let torsion = snf.torsion_factors();
    let diag_text: Vec<String> = diagonal.iter().map(|d| d.to_string()).collect();
    let human = format!(
        "S: {}; coker: free {}, torsion {}",
        diag_text.join(" "),
        free_rank,
        fmt_big_factors(&torsion)
    );
    let mut inputs = BTreeMap::new();
    inputs.insert("matrix".into(), source);
    inputs.insert("matrix.digest".into(), digest_bytes(text.as_bytes()));
    let result = SnfResultPayload {
        diagonal: diag_text,
        free_rank,
        torsion: big_factor_strings(&torsion),
    };
    emit(cli, "snf", inputs, result, Status::Ok, &human)
}

#[derive(Serialize)]
struct ClassifyResult {
    group: String,
    residues: Vec<ClassifyEntry>,
    verdict: String,
}

#[derive(Serialize)]
struct ClassifyEntry {
    i: usize,
    j: usize,
    modulus: u64,
    residue: u64,
}

fn cmd_classify(
    cli: &Cli,
    group_str: Option<&str>,
    element: &Path,
    fixture: Option<&Path>,
) -> Result<Status> {
    let text = read_file(element)?;
    let mut inputs = BTreeMap::new();
    inputs.insert("element".into(), element.display().to_string());
    inputs.insert("element.digest".into(), digest_bytes(text.as_bytes()));
    let data = match fixture {
        Some(path) => {
            let ftext = read_file(path)?;
            inputs.insert("fixture".into(), path.display().to_string());
            inputs.insert("fixture.digest".into(), digest_bytes(ftext.as_bytes()));
            guard_fixture_scale(&ftext)?;
            CocycleData::parse_fixture(&ftext)?
        }
        None => {
            let group = match group_str {
                Some(gs) => FinAbGroup::parse(gs)?,
                None => {
                    let line = text
                        .lines()
                        .map(str::trim)
                        .find(|l| l.starts_with("group:"))
                        .ok_or_else(|| anyhow!("need --group, --fixture, or a group: line"))?;
                    FinAbGroup::parse(line.trim_start_matches("group:"))?
                }
            };
            CocycleData::standard(&group)
        }
    };
    let group = data.group().clone();
    ensure_presentation_scale(&group)?;
    inputs.insert("group".into(), group.moduli_string());
    let r = presentation::parse_element_text(&data, &text)?;
    let pres = Presentation::build(data);
    match presentation::torsion_class_invariant(&pres, &r) {
        Ok(res) => {
            let human = format!(
                "group: {}\nresidues: {}\nverdict: TORSION",
                group.moduli_string(),
                res
            );
            let entries = res
                .entries
                .iter()
                .map(|e| ClassifyEntry {
                    i: e.i + 1,
                    j: e.j + 1,
                    modulus: e.modulus,
                    residue: e.residue,
                })
                .collect();
            let result = ClassifyResult {
                group: group.moduli_string(),
                residues: entries,
                verdict: "TORSION".to_string(),
            };
            emit(cli, "classify", inputs, result, Status::Ok, &human)
        }
        Err(PresError::NotTorsionClass) => {
            let human = format!(
                "group: {}\nverdict: NOT-TORSION (the class generates a free summand)",
                group.moduli_string()
            );
            let result = ClassifyResult {
                group: group.moduli_string(),
                residues: Vec::new(),
                verdict: "NOT-TORSION".to_string(),
            };
            emit(cli, "classify", inputs, result, Status::Mismatch, &human)
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct ExampleResult {
    levels: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    x_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    y_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagrams: Option<serde_json::Value>,
}

fn cmd_example_octagonal(
    cli: &Cli,
    levels: usize,
    x: &Option<PathBuf>,
    y: &Option<PathBuf>,
) -> Result<Status> {
    let (dx, dy) = generators::octagonal_pair(levels)?;
    let mut inputs = BTreeMap::new();
    inputs.insert("example".into(), "octagonal".into());
    inputs.insert("levels".into(), levels.to_string());
    if x.is_some() != y.is_some() {
        bail!("--x and --y must be given together");
    }
    if let (Some(xp), Some(yp)) = (x, y) {
        std::fs::write(xp, dx.to_json_string())
            .with_context(|| format!("cannot write {}", xp.display()))?;
        std::fs::write(yp, dy.to_json_string())
            .with_context(|| format!("cannot write {}", yp.display()))?;
        let human = format!(
            "wrote {} and {} ({} levels each)",
            xp.display(),
            yp.display(),
            levels
        );
        let result = ExampleResult {
            levels,
            x_path: Some(xp.display().to_string()),
            y_path: Some(yp.display().to_string()),
            diagrams: None,
        };
        return emit(cli, "example", inputs, result, Status::Ok, &human);
    }
    let combined = serde_json::json!({
        "x": serde_json::from_str::<serde_json::Value>(&dx.to_json_string())?,
        "y": serde_json::from_str::<serde_json::Value>(&dy.to_json_string())?,
    });
    let human = serde_json::to_string_pretty(&combined)?;
    let result = ExampleResult {
        levels,
        x_path: None,
        y_path: None,
        diagrams: Some(combined),
    };
    emit(cli, "example", inputs, result, Status::Ok, &human)
}
