//! `parkscope`: command-line front end for monodromy representations and parks.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use parkscope::equivalence::{enumerate_monodromies, monodromy_equivalent, park_isomorphic, Dedup, EnumerationLimits};
use parkscope::extraction::{extract_nodes, monodromy_to_park};
use parkscope::hurwitz::{format_rational, HurwitzCache, HurwitzCalculator};
use parkscope::monodromy::{GenericityMode, MonodromyRep};
use parkscope::park::{NodeSignature, Park};
use parkscope::{Error, Result};
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "parkscope", version, about = "Monodromies, parks and Hurwitz numbers of generic real meromorphic functions")]
struct Cli {
    /// Emit machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Largest degree for which Hurwitz numbers are computed.
    #[arg(long, global = true, default_value_t = 6)]
    max_degree: usize,

    /// Largest number of sheets (2d) accepted for monodromy input.
    #[arg(long, global = true, default_value_t = 10)]
    max_sheets: usize,

    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the relations and genericity of a monodromy representation.
    Validate {
        file: PathBuf,
        /// Require every real critical value to carry a single critical point.
        #[arg(long)]
        strict: bool,
    },
    /// Extract the park of a monodromy representation.
    Extract {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check the park conditions and garden rules.
    ValidatePark { file: PathBuf },
    /// Print d, g, n, t, s and the entrance signatures of a monodromy or park.
    Info { file: PathBuf },
    /// Composite Hurwitz number of a park.
    Hurwitz { file: PathBuf },
    /// Hurwitz number of a single entrance.
    SingleHurwitz {
        genus: usize,
        /// Comma-separated face degrees.
        degrees: String,
    },
    /// Decide whether two parks are isomorphic.
    Isomorphic {
        first: PathBuf,
        second: PathBuf,
        /// Also accept a reversal of the cyclic order of corner labels.
        #[arg(long)]
        allow_reflection: bool,
    },
    /// Decide whether two monodromies are conjugate by a colour-preserving relabeling.
    Equivalent { first: PathBuf, second: PathBuf },
    /// Enumerate valid generic monodromies up to a chosen equivalence.
    Enumerate {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        cone: usize,
        #[arg(long)]
        corner: usize,
        #[arg(long, default_value = "raw")]
        dedup: Dedup,
    },
}

/// Result of a well-formed run.
enum Verdict {
    Yes,
    No,
}

struct Output {
    verdict: Verdict,
    text: String,
    json: Value,
}

impl Output {
    fn new(verdict: Verdict, text: impl Into<String>, json: Value) -> Self {
        Output {
            verdict,
            text: text.into(),
            json,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(out) => {
            let body = if cli.json {
                serde_json::to_string_pretty(&out.json).expect("json values serialize")
            } else {
                out.text.trim_end().to_string()
            };
            if !body.is_empty() {
                emit(&body);
            }
            match out.verdict {
                Verdict::Yes => ExitCode::SUCCESS,
                Verdict::No => ExitCode::from(1),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if cli.json {
                emit(&json!({ "error": error_kind(&e), "message": e.to_string() }).to_string());
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Writes one line to stdout; a closed pipe is not an error.
fn emit(body: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{body}");
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonRealizable(_) | Error::Inconsistent(_) => 1,
        Error::ResourceLimit(_) => 3,
        _ => 2,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidArgument(_) => "invalid_argument",
        Error::NonRealizable(_) => "non_realizable",
        Error::ResourceLimit(_) => "resource_limit",
        Error::Inconsistent(_) => "inconsistent",
        Error::Internal(_) => "internal",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_monodromy(path: &Path, max_sheets: usize) -> Result<MonodromyRep> {
    let m = MonodromyRep::from_json(&read(path)?)?;
    check_sheets(m.degree(), max_sheets)?;
    Ok(m)
}

fn load_park(path: &Path) -> Result<Park> {
    Park::from_json(&read(path)?)
}

fn check_sheets(degree: usize, max_sheets: usize) -> Result<()> {
    if 2 * degree > max_sheets {
        return Err(Error::ResourceLimit(format!(
            "{} sheets exceed --max-sheets {max_sheets}",
            2 * degree
        )));
    }
    Ok(())
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Yes
    } else {
        Verdict::No
    }
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Validate { file, strict } => validate(&load_monodromy(file, cli.max_sheets)?, *strict),
        Command::Extract { file, output } => extract(&load_monodromy(file, cli.max_sheets)?, output.as_deref()),
        Command::ValidatePark { file } => validate_park(&load_park(file)?),
        Command::Info { file } => info(file, cli.max_sheets),
        Command::Hurwitz { file } => hurwitz(&load_park(file)?, cli.max_degree),
        Command::SingleHurwitz { genus, degrees } => single_hurwitz(*genus, degrees, cli.max_degree),
        Command::Isomorphic {
            first,
            second,
            allow_reflection,
        } => isomorphic(&load_park(first)?, &load_park(second)?, *allow_reflection),
        Command::Equivalent { first, second } => equivalent(
            &load_monodromy(first, cli.max_sheets)?,
            &load_monodromy(second, cli.max_sheets)?,
        ),
        Command::Enumerate {
            degree,
            cone,
            corner,
            dedup,
        } => enumerate(*degree, *cone, *corner, *dedup, cli.max_sheets),
    }
}

fn validate(m: &MonodromyRep, strict: bool) -> Result<Output> {
    let mode = if strict {
        GenericityMode::Strict
    } else {
        GenericityMode::Geometric
    };
    let relations = m.validate_relations();
    let transitive = m.is_transitive();
    let genericity = m.validate_genericity(mode);
    let ok = relations.ok && transitive && genericity.ok;

    let mut text = format!("relations: {}\n", if relations.ok { "ok" } else { "FAILED" });
    for f in &relations.failures {
        text += &format!("  {f}\n");
    }
    text += &format!("transitive: {}\n", if transitive { "yes" } else { "no" });
    text += &format!("genericity ({mode:?}): {}\n", if genericity.ok { "ok" } else { "FAILED" });
    for v in &genericity.violations {
        text += &format!("  {}: {}\n", v.site, v.reason);
    }
    text += if ok { "valid" } else { "invalid" };
    let json = json!({
        "valid": ok,
        "transitive": transitive,
        "relations": relations,
        "genericity": genericity,
    });
    Ok(Output::new(verdict(ok), text, json))
}

fn extract(m: &MonodromyRep, output: Option<&Path>) -> Result<Output> {
    let park = monodromy_to_park(m)?;
    let body = park.to_json();
    match output {
        Some(path) => {
            fs::write(path, format!("{body}\n"))?;
            let summary = park.type_summary()?;
            let text = format!("wrote {}: {summary}", path.display());
            Ok(Output::new(Verdict::Yes, text, json!({ "summary": summary })))
        }
        None => {
            let value: Value = serde_json::from_str(&body)?;
            Ok(Output::new(Verdict::Yes, body, value))
        }
    }
}

fn validate_park(park: &Park) -> Result<Output> {
    let report = park.validate()?;
    let mut text = String::new();
    for v in &report.violations {
        text += &format!("{}: {}\n", v.clause.name(), v.detail);
    }
    text += if report.ok { "valid" } else { "invalid" };
    Ok(Output::new(verdict(report.ok), text, to_value(&report)))
}

fn signature_lines(sigs: &[NodeSignature]) -> String {
    sigs.iter()
        .map(|s| {
            format!(
                "  {:?} g={} degrees={:?} b={}\n",
                s.role, s.signature.g, s.signature.degrees, s.signature.b
            )
            .to_lowercase()
        })
        .collect()
}

fn info(path: &Path, max_sheets: usize) -> Result<Output> {
    let text = read(path)?;
    let raw: Value = serde_json::from_str(&text)?;
    if raw.get("gardens").is_some() {
        let park = Park::from_json(&text)?;
        let summary = park.type_summary()?;
        let mut out = format!("{summary}\n");
        out += &signature_lines(&summary.nodes);
        return Ok(Output::new(Verdict::Yes, out, json!({ "kind": "park", "summary": summary })));
    }
    if raw.get("degree").is_none() {
        return Err(Error::InvalidArgument(
            "neither a monodromy (\"degree\") nor a park (\"gardens\")".into(),
        ));
    }
    let m = MonodromyRep::from_json(&text)?;
    check_sheets(m.degree(), max_sheets)?;
    let (d, t, s) = (m.degree(), m.cone_points(), m.corner_points());
    let g = m.genus_from_counts()?;
    let n = 2 * t + s;
    let signatures: Option<Vec<NodeSignature>> = extract_nodes(&m).ok().map(|nodes| {
        let mut sigs: Vec<NodeSignature> = nodes
            .into_iter()
            .map(|node| NodeSignature {
                role: node.role,
                signature: node.signature,
            })
            .collect();
        sigs.sort();
        sigs
    });
    let mut out = format!("d={d} g={g} n={n} t={t} s={s}\n");
    match &signatures {
        Some(sigs) => out += &signature_lines(sigs),
        None => out += "  signatures unavailable: not a valid generic representation\n",
    }
    let json = json!({
        "kind": "monodromy",
        "summary": { "d": d, "g": g, "n": n, "t": t, "s": s, "nodes": signatures },
    });
    Ok(Output::new(Verdict::Yes, out, json))
}

fn hurwitz(park: &Park, max_degree: usize) -> Result<Output> {
    let report = park.validate()?;
    if !report.ok {
        let detail: Vec<String> = report
            .violations
            .iter()
            .map(|v| format!("{}: {}", v.clause.name(), v.detail))
            .collect();
        return Err(Error::NonRealizable(format!("invalid park ({})", detail.join("; "))));
    }
    let calc = HurwitzCalculator::new(max_degree, HurwitzCache::from_env()?);
    let value = format_rational(&calc.park(park)?);
    Ok(Output::new(Verdict::Yes, value.clone(), json!({ "hurwitz": value })))
}

fn single_hurwitz(g: usize, degrees: &str, max_degree: usize) -> Result<Output> {
    let degrees = degrees
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .ok()
                .filter(|&d| d > 0)
                .ok_or_else(|| Error::InvalidArgument(format!("bad degree {s:?}")))
        })
        .collect::<Result<Vec<usize>>>()?;
    let calc = HurwitzCalculator::new(max_degree, HurwitzCache::from_env()?);
    let value = format_rational(&calc.single(g, &degrees)?);
    let json = json!({ "g": g, "degrees": degrees, "hurwitz": value });
    Ok(Output::new(Verdict::Yes, value, json))
}

fn isomorphic(a: &Park, b: &Park, allow_reflection: bool) -> Result<Output> {
    match park_isomorphic(a, b, allow_reflection)? {
        Some(map) => {
            let value = to_value(&map);
            let text = format!("isomorphic\n{}", serde_json::to_string_pretty(&value)?);
            Ok(Output::new(Verdict::Yes, text, json!({ "isomorphic": true, "witness": value })))
        }
        None => Ok(Output::new(
            Verdict::No,
            "not isomorphic",
            json!({ "isomorphic": false, "witness": null }),
        )),
    }
}

fn equivalent(a: &MonodromyRep, b: &MonodromyRep) -> Result<Output> {
    match monodromy_equivalent(a, b)? {
        Some(j) => {
            let text = format!("equivalent\nj = {j}");
            Ok(Output::new(Verdict::Yes, text, json!({ "equivalent": true, "witness": j })))
        }
        None => Ok(Output::new(
            Verdict::No,
            "not equivalent",
            json!({ "equivalent": false, "witness": null }),
        )),
    }
}

fn enumerate(d: usize, t: usize, s: usize, dedup: Dedup, max_sheets: usize) -> Result<Output> {
    let limits = EnumerationLimits {
        max_sheets,
        ..EnumerationLimits::default()
    };
    let result = enumerate_monodromies(d, t, s, dedup, &limits)?;
    let mut text = format!(
        "d={d} t={t} s={s} dedup={dedup:?}: {} representations, {} classes\n",
        result.raw_count,
        result.classes.len()
    );
    if let Some(r) = result.reflection_classes {
        text += &format!("classes allowing reflection: {r}\n");
    }
    for (i, class) in result.classes.iter().enumerate() {
        text += &format!("class {} (size {}): {}\n", i + 1, class.size, class.representative.to_json());
    }
    let classes: Vec<Value> = result
        .classes
        .iter()
        .map(|c| json!({ "size": c.size, "representative": to_value(&c.representative.to_file()) }))
        .collect();
    let json = json!({
        "degree": d,
        "cone_points": t,
        "corner_points": s,
        "dedup": dedup,
        "raw_count": result.raw_count,
        "class_count": classes.len(),
        "reflection_classes": result.reflection_classes,
        "classes": classes,
    });
    Ok(Output::new(Verdict::Yes, text, json))
}
