//! `rht` — command-line front end for the exact-arithmetic CDGA toolkit.
//!
//! Thin orchestration over `rht-core`: parse the line-based `.cdga` /
//! `.galg` / `.cert` formats, run the requested computation, print a
//! human-readable account (or the deterministic JSON report), and exit
//! with a code that downstream tooling can branch on:
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success; for verdict commands: Formal     |
//! | 1    | a non-formality witness was found         |
//! | 2    | inconclusive (certificates insufficient)  |
//! | 3    | input error (parse, validation, usage)    |
//! | 4    | internal limit hit (degree cap)           |

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use rht_core::cdga::CdgaError;
use rht_core::cohomology::CohomologyError;
use rht_core::formality::{
    fm_degree, s_formality, triple_massey, CertFamily, FormalityError, FormalityReport, Verdict,
};
use rht_core::joyce;
use rht_core::model::{build_minimal_model, ModelError, SullivanModel, Target};
use rht_core::report;
use rht_core::scalar::format_scalar;
use rht_core::textio::{
    assemble_model, emit_cdga, parse_cdga, parse_cert, parse_galg, parse_poly, ParsedCdga,
    TextIoError,
};
use rht_core::FiniteGradedAlgebra;

#[derive(Parser)]
#[command(
    name = "rht",
    version,
    about = "Exact-arithmetic toolkit for CDGAs: minimal models, formality certificates, Massey products"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a .cdga, .galg, or .cert file and report what it contains.
    Check {
        /// Input file; the format is chosen by extension.
        file: PathBuf,
    },
    /// Betti numbers of a CDGA file, degrees 0 through --max.
    Betti {
        file: PathBuf,
        /// Highest cohomological degree to compute.
        #[arg(long)]
        max: usize,
    },
    /// One cohomology group of a CDGA file: dimension and representatives.
    Cohomology {
        file: PathBuf,
        /// Cohomological degree.
        #[arg(long)]
        degree: usize,
        /// Also print a representative cocycle for each class.
        #[arg(long)]
        reps: bool,
    },
    /// Build the minimal Sullivan model of a simply-connected CDGA.
    Model {
        file: PathBuf,
        /// Build the model through this generator degree.
        #[arg(long = "up-to", value_name = "S")]
        up_to: usize,
        /// Write the model as an annotated .cdga file.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Decide formality of an n-manifold presentation via s-formality.
    Formality {
        /// Plain CDGA (the model is built from scratch) or a C/N-annotated
        /// model file (requires --galg for the target cohomology table).
        file: PathBuf,
        /// Ambient manifold dimension n; the threshold is s = ceil(n/2) - 1.
        #[arg(long, value_name = "N")]
        dim: usize,
        /// Cohomology ring as a .galg table (enables the finite-target and
        /// Poincare-descent routes).
        #[arg(long, value_name = "FILE")]
        galg: Option<PathBuf>,
        /// Geometric exactness facts as a .cert file.
        #[arg(long, value_name = "FILE")]
        certs: Option<PathBuf>,
        /// Write the JSON report here in addition to the human summary.
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
    },
    /// Triple Massey product of three closed classes of a CDGA file.
    Massey {
        file: PathBuf,
        /// Three comma-separated polynomials in the file's generators,
        /// e.g. `x,x,y`.
        #[arg(long, value_name = "A,B,C")]
        classes: String,
    },
    /// Tensor product of two CDGA files.
    Tensor {
        file1: PathBuf,
        file2: PathBuf,
        /// Where to write the resulting .cdga file.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Run the built-in case study: formality of a compact G2 manifold
    /// obtained by resolving T^7/Gamma.
    Joyce {
        /// Emit the JSON report instead of the human summary; with a FILE
        /// argument the report is written there and the summary still
        /// prints.
        #[arg(long, value_name = "FILE")]
        json: Option<Option<PathBuf>>,
        /// Also verify and print the worked identities of the degree-5
        /// quotient computation.
        #[arg(long)]
        appendix: bool,
    },
}

/// Failures are split by who must act: `Input` means the invocation or a
/// file is wrong (exit 3); `Limit` means the computation hit a configured
/// resource bound (exit 4).
enum CliError {
    Input(String),
    Limit(String),
}

fn limit_cdga(e: &CdgaError) -> bool {
    matches!(e, CdgaError::DegreeOverflow(..))
}

fn limit_cohomology(e: &CohomologyError) -> bool {
    matches!(e, CohomologyError::Cdga(c) if limit_cdga(c))
}

fn limit_model(e: &ModelError) -> bool {
    match e {
        ModelError::Cdga(c) => limit_cdga(c),
        ModelError::Cohomology(c) => limit_cohomology(c),
        _ => false,
    }
}

fn limit_formality(e: &FormalityError) -> bool {
    match e {
        FormalityError::Cdga(c) => limit_cdga(c),
        FormalityError::Cohomology(c) => limit_cohomology(c),
        FormalityError::Model(m) => limit_model(m),
        _ => false,
    }
}

macro_rules! classify {
    ($ty:ty, $pred:path) => {
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                if $pred(&e) {
                    CliError::Limit(e.to_string())
                } else {
                    CliError::Input(e.to_string())
                }
            }
        }
    };
}

classify!(CdgaError, limit_cdga);
classify!(CohomologyError, limit_cohomology);
classify!(ModelError, limit_model);
classify!(FormalityError, limit_formality);

impl From<TextIoError> for CliError {
    fn from(e: TextIoError) -> Self {
        match e {
            TextIoError::Cdga(c) if limit_cdga(&c) => CliError::Limit(c.to_string()),
            TextIoError::Model(m) if limit_model(&m) => CliError::Limit(m.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            // Usage mistakes are input errors; keep exit 2 reserved for
            // inconclusive verdicts.
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Limit(msg)) => {
            eprintln!("error (internal limit): {msg}");
            ExitCode::from(4)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Check { file } => cmd_check(&file),
        Command::Betti { file, max } => cmd_betti(&file, max),
        Command::Cohomology { file, degree, reps } => cmd_cohomology(&file, degree, reps),
        Command::Model { file, up_to, out } => cmd_model(&file, up_to, out.as_deref()),
        Command::Formality { file, dim, galg, certs, json } => {
            cmd_formality(&file, dim, galg.as_deref(), certs.as_deref(), json.as_deref())
        }
        Command::Massey { file, classes } => cmd_massey(&file, &classes),
        Command::Tensor { file1, file2, out } => cmd_tensor(&file1, &file2, &out),
        Command::Joyce { json, appendix } => cmd_joyce(json, appendix),
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn read_cdga(path: &Path) -> Result<ParsedCdga, CliError> {
    let text = read_input(path)?;
    parse_cdga(&text).map_err(|e| prefix_file(path, e))
}

fn read_galg(path: &Path) -> Result<FiniteGradedAlgebra, CliError> {
    let text = read_input(path)?;
    parse_galg(&text).map_err(|e| prefix_file(path, e))
}

/// File diagnostics from the parsers say "line N: ..."; prepend which file.
fn prefix_file(path: &Path, e: TextIoError) -> CliError {
    match CliError::from(e) {
        CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
        CliError::Limit(msg) => CliError::Limit(format!("{}: {msg}", path.display())),
    }
}

// ---------------------------------------------------------------------------
// check / betti / cohomology
// ---------------------------------------------------------------------------

fn cmd_check(file: &Path) -> Result<ExitCode, CliError> {
    let ext = file.extension().and_then(|e| e.to_str()).unwrap_or("");
    match ext {
        "cdga" => {
            let parsed = read_cdga(file)?;
            let cdga = &parsed.cdga;
            let ctx = cdga.context();
            let top = ctx.generators().iter().map(|g| g.degree).max().unwrap_or(0);
            let nonzero_d =
                (0..ctx.len()).filter(|&i| !cdga.differential_of(i).is_zero()).count();
            let annotation = match &parsed.c_flags {
                Some(flags) => {
                    let c = flags.iter().filter(|&&b| b).count();
                    format!(", annotated ({} C / {} N)", c, flags.len() - c)
                }
                None => String::new(),
            };
            println!(
                "ok: cdga `{}` — {} generators through degree {}, {} nonzero differentials, {} relations{}",
                cdga.name(),
                ctx.len(),
                top,
                nonzero_d,
                cdga.relations().len(),
                annotation
            );
        }
        "galg" => {
            let f = read_galg(file)?;
            let pd = f.pd_check();
            println!(
                "ok: galg `{}` — {} basis classes, top degree {}, {} associativity repairs, Poincaré pairing {}",
                f.name(),
                f.basis().len(),
                f.top_degree(),
                f.repairs().len(),
                if pd.all_nondegenerate() { "nondegenerate" } else { "DEGENERATE" }
            );
        }
        "cert" => {
            let text = read_input(file)?;
            let certs = parse_cert(&text).map_err(|e| prefix_file(file, e))?;
            let counts = CertFamily::ALL
                .iter()
                .map(|&fam| format!("{} {}", certs.family_len(fam), fam.name()))
                .collect::<Vec<_>>()
                .join(", ");
            println!("ok: cert `{}` — {} facts ({})", certs.name, certs.len(), counts);
        }
        "" => {
            return Err(CliError::Input(format!(
                "{} has no extension: expected .cdga, .galg, or .cert",
                file.display()
            )));
        }
        other => {
            return Err(CliError::Input(format!(
                "unrecognized extension `.{other}` on {}: expected .cdga, .galg, or .cert",
                file.display()
            )));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_betti(file: &Path, max: usize) -> Result<ExitCode, CliError> {
    let parsed = read_cdga(file)?;
    let dims = parsed.cdga.betti(max)?;
    let rendered = dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ");
    println!("betti of `{}`, degrees 0..={}: ({})", parsed.cdga.name(), max, rendered);
    Ok(ExitCode::SUCCESS)
}

fn cmd_cohomology(file: &Path, degree: usize, reps: bool) -> Result<ExitCode, CliError> {
    let parsed = read_cdga(file)?;
    let hm = parsed.cdga.cohomology(degree)?;
    println!("dim H^{degree}(`{}`) = {}", parsed.cdga.name(), hm.dim);
    if reps {
        for (i, rep) in hm.representatives.iter().enumerate() {
            println!("  class {i}: [{}]", rep.render());
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// model
// ---------------------------------------------------------------------------

fn cmd_model(file: &Path, up_to: usize, out: Option<&Path>) -> Result<ExitCode, CliError> {
    let parsed = read_cdga(file)?;
    let target = Target::Cdga(Arc::new(parsed.cdga));
    let model = build_minimal_model(&target, up_to)?;

    println!(
        "minimal model `{}` built through degree {}:",
        model.cdga().name(),
        model.built_through()
    );
    for step in model.steps() {
        println!(
            "  degree {}: {} closed generators, {} kernel-killing generators",
            step.degree,
            step.c_added.len(),
            step.n_added.len()
        );
        for (name, image) in &step.c_added {
            println!("    {name}  ↦  {image}");
        }
        for (name, diff) in &step.n_added {
            println!("    d({name}) = {diff}");
        }
    }

    if let Some(out) = out {
        let ctx = model.cdga().context();
        let flags: Vec<bool> = (0..ctx.len()).map(|i| model.is_c(i)).collect();
        write_output(out, &emit_cdga(model.cdga(), Some(&flags)))?;
        println!("wrote annotated model to {}", out.display());
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// formality
// ---------------------------------------------------------------------------

fn cmd_formality(
    file: &Path,
    dim: usize,
    galg: Option<&Path>,
    certs: Option<&Path>,
    json: Option<&Path>,
) -> Result<ExitCode, CliError> {
    let s = fm_degree(dim)?;
    let parsed = read_cdga(file)?;
    let table = galg.map(|p| read_galg(p).map(Arc::new)).transpose()?;
    let certs = certs
        .map(|p| {
            let text = read_input(p)?;
            parse_cert(&text).map_err(|e| prefix_file(p, e))
        })
        .transpose()?;

    let model = if parsed.c_flags.is_some() {
        let table = table.clone().ok_or_else(|| {
            CliError::Input(format!(
                "{} carries C/N annotations, so it is a model file: pass the target \
                 cohomology table with --galg",
                file.display()
            ))
        })?;
        assemble_model(&parsed, table).map_err(|e| prefix_file(file, e))?
    } else {
        let target = Target::Cdga(Arc::new(parsed.cdga));
        build_minimal_model(&target, s)?
    };

    let report = s_formality(&model, dim, table.as_deref(), certs.as_ref())?;
    print_formality(&report, &model);
    if let Some(json) = json {
        write_output(json, &report::to_text(&report::formality_json(&report)))?;
        println!("wrote JSON report to {}", json.display());
    }
    Ok(verdict_exit(&report.verdict))
}

fn verdict_exit(verdict: &Verdict) -> ExitCode {
    match verdict {
        Verdict::Formal => ExitCode::SUCCESS,
        Verdict::NonFormal(_) => ExitCode::from(1),
        Verdict::Inconclusive(_) => ExitCode::from(2),
    }
}

fn print_formality(report: &FormalityReport, model: &SullivanModel) {
    println!(
        "s-formality of `{}`: dimension {}, threshold s = {}",
        model.cdga().name(),
        report.dimension,
        report.s
    );
    let mut entries: Vec<_> = report.ledger.iter().collect();
    entries.sort_by_key(|e| e.degree);
    for entry in entries {
        let certs = if entry.certificates.is_empty() {
            String::new()
        } else {
            format!(" [{}]", summarize_certs(&entry.certificates))
        };
        let note = if entry.note.is_empty() {
            String::new()
        } else {
            format!(" — {}", entry.note)
        };
        println!(
            "  degree {}: ideal {}, closed {} → {}{}{}",
            entry.degree, entry.ideal_dim, entry.closed_dim, entry.method, certs, note
        );
    }
    match &report.verdict {
        Verdict::Formal => println!("verdict: formal (certified)"),
        Verdict::NonFormal(witness) => {
            println!(
                "verdict: NOT formal — Massey product of degree {} with nonzero class \
                 and representative {}",
                witness.degree,
                witness.representative.render()
            );
        }
        Verdict::Inconclusive(reason) => println!("verdict: inconclusive — {reason}"),
    }
}

/// Short ledger lines: few facts are listed verbatim, long lists are
/// collapsed to per-family counts (the JSON report keeps every descriptor).
fn summarize_certs(descriptors: &[String]) -> String {
    if descriptors.len() <= 8 {
        return descriptors.join(", ");
    }
    let mut counts: Vec<(&str, usize)> = Vec::new();
    for d in descriptors {
        let family = d.split('(').next().unwrap_or(d);
        match counts.iter_mut().find(|(f, _)| *f == family) {
            Some((_, n)) => *n += 1,
            None => counts.push((family, 1)),
        }
    }
    let breakdown =
        counts.iter().map(|(f, n)| format!("{n} {f}")).collect::<Vec<_>>().join(", ");
    format!("{} facts: {breakdown}", descriptors.len())
}

// ---------------------------------------------------------------------------
// massey
// ---------------------------------------------------------------------------

fn cmd_massey(file: &Path, classes: &str) -> Result<ExitCode, CliError> {
    let parsed = read_cdga(file)?;
    let alg = &parsed.cdga;
    let parts: Vec<&str> = classes.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Input(format!(
            "--classes expects exactly three comma-separated polynomials, got {}",
            parts.len()
        )));
    }
    let mut elems = Vec::with_capacity(3);
    for part in &parts {
        let e = parse_poly(alg.context(), part.trim(), 0).map_err(|e| {
            let detail = match e {
                TextIoError::Parse { message, .. } => message,
                other => other.to_string(),
            };
            CliError::Input(format!("in --classes `{}`: {detail}", part.trim()))
        })?;
        elems.push(e);
    }

    let result = triple_massey(alg, &elems[0], &elems[1], &elems[2])?;
    let coords = alg.class_of_in_degree(&result.representative, result.degree)?;
    let class = coords.iter().map(format_scalar).collect::<Vec<_>>().join(", ");
    println!(
        "triple Massey product <[{}], [{}], [{}]> in degree {}:",
        result.inputs[0].render(),
        result.inputs[1].render(),
        result.inputs[2].render(),
        result.degree
    );
    println!("  representative: {}", result.representative.render());
    println!("  class in H^{}: ({})", result.degree, class);
    println!("  indeterminacy dimension: {}", result.indeterminacy.dim());
    if result.vanishes {
        println!("  vanishes: the class lies in the indeterminacy subspace");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("  NONZERO modulo indeterminacy: the algebra is not formal");
        Ok(ExitCode::from(1))
    }
}

// ---------------------------------------------------------------------------
// tensor
// ---------------------------------------------------------------------------

fn cmd_tensor(file1: &Path, file2: &Path, out: &Path) -> Result<ExitCode, CliError> {
    let a = read_cdga(file1)?;
    let b = read_cdga(file2)?;
    let t = a.cdga.tensor(&b.cdga)?;
    write_output(out, &emit_cdga(&t, None))?;
    println!(
        "wrote `{}` ({} generators) to {}",
        t.name(),
        t.context().len(),
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// joyce
// ---------------------------------------------------------------------------

fn cmd_joyce(json: Option<Option<PathBuf>>, appendix: bool) -> Result<ExitCode, CliError> {
    let betti = joyce::joyce_betti();
    let model = joyce::joyce_model();
    let target = joyce::joyce_target();
    let report = joyce::joyce_formality();
    let appendix_report = joyce::appendix_report()?;
    let identities = if appendix { Some(joyce::appendix_identities()?) } else { None };

    if let Some(path) = &json {
        let value = report::joyce_json(&betti, report, &appendix_report, identities.as_ref());
        let text = report::to_text(&value);
        match path {
            Some(path) => {
                write_output(path, &text)?;
            }
            None => {
                // Bare --json: the report itself is the output.
                print!("{text}");
                return Ok(verdict_exit(&report.verdict));
            }
        }
    }

    println!("case study: resolution of T^7/Γ with holonomy G2");
    println!();
    let rendered = betti.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ");
    println!("betti numbers, degrees 0..=7: ({rendered})");
    println!(
        "cohomology table: {} basis classes, {} associativity repairs",
        target.basis().len(),
        target.repairs().len()
    );
    println!(
        "model through degree {}: dim V² = {}, dim V³ = {} ({} closed + {} kernel-killing)",
        model.built_through(),
        model.generators_of_degree(2).len(),
        model.generators_of_degree(3).len(),
        model.c_generators_of_degree(3).len(),
        model.n_generators_of_degree(3).len()
    );
    println!();
    print_formality(report, model);
    println!();
    println!("degree-5 quotient of the closed ideal:");
    println!("  closed ideal dimension:              {}", appendix_report.closed_ideal_dim);
    println!("  spherical part:                      {}", appendix_report.spherical_part_dim);
    println!("  quotient dimension (projection):     {}", appendix_report.quotient_dim);
    println!("  quotient dimension (effective cplx): {}", appendix_report.effective_closed_dim);
    println!("  recorded in the original account:    {}", appendix_report.reported_quotient_dim);

    if let Some(ids) = &identities {
        println!();
        println!("worked identities in the effective complex:");
        for p in &ids.prototypes {
            println!("  prototype {}", p.element);
            println!(
                "    closed: {}; effective image {} (expected {}): {}",
                yes_no(p.closed_in_effective),
                p.effective_image,
                p.expected_image,
                if p.image_matches { "match" } else { "MISMATCH" }
            );
        }
        println!(
            "  differential identity {} — {}",
            ids.differential_identity,
            if ids.differential_identity_holds { "holds" } else { "FAILS" }
        );
        println!(
            "  exactness after subtracting certified monomials [{}]: {} (certificates on file: {})",
            ids.correction_monomials.join(", "),
            yes_no(ids.membership_holds),
            yes_no(ids.corrections_certified)
        );
    }

    if let Some(Some(path)) = &json {
        println!();
        println!("wrote JSON report to {}", path.display());
    }
    Ok(verdict_exit(&report.verdict))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
