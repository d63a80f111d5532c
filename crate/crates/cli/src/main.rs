use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use forms2mvc::codegen::SkeletonFile;
use forms2mvc::diagnostics::{codes, Diagnostic, Severity};
use forms2mvc::flowgraph::{emit, FlowFormat};
use forms2mvc::kdm::CodeModel;
use forms2mvc::oo::{OOModel, OoOptions};
use forms2mvc::pipeline::{self, FormOutput, Models, PipelineOptions};
use forms2mvc::platform::TargetPlatformModel;
use forms2mvc::primitives::PrimitivesRoot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
enum Emit {
    Kdm,
    Primitives,
    Platform,
    Oo,
    Java,
    Metrics,
    Flowgraph,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Cypher,
    Dot,
}

/// Migrates form descriptors with PL/SQL triggers to managed beans and services.
#[derive(Debug, Parser)]
#[command(name = "forms2mvc", version)]
struct Cli {
    /// Form descriptor files.
    #[arg(long, num_args = 1.., required_unless_present = "resume")]
    input: Vec<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Artifacts to write.
    #[arg(long, value_delimiter = ',', default_value = "java")]
    emit: Vec<Emit>,
    /// Directory of managed-bean skeletons with `// BODY:<method>` markers.
    #[arg(long)]
    skeletons: Option<PathBuf>,
    /// Builtin mapping file (`PLSQL_NAME javaName` per line).
    #[arg(long)]
    builtins: Option<PathBuf>,
    /// Type mapping overrides (`PLSQL_TYPE JavaType` per line).
    #[arg(long)]
    type_map: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "cypher")]
    flow_format: Format,
    /// Treat warnings as errors.
    #[arg(long)]
    strict: bool,
    /// Continue from a dumped model (`models/<Form>/<stage>.json`); earlier
    /// models are read from the same directory.
    #[arg(long, conflicts_with = "input")]
    resume: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, Diagnostic> {
    fs::read_to_string(path)
        .map_err(|e| Diagnostic::error(codes::IO, format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, content: &str) -> Result<(), Diagnostic> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)
            .map_err(|e| Diagnostic::error(codes::IO, format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, content).map_err(|e| Diagnostic::error(codes::IO, format!("cannot write {}: {e}", path.display())))
}

fn json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Diagnostic> {
    let text = read(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Diagnostic::error(codes::CONFIG, format!("{}: invalid model: {e}", path.display())))
}

fn load_skeletons(dir: &Path) -> Result<Vec<SkeletonFile>, Diagnostic> {
    let entries =
        fs::read_dir(dir).map_err(|e| Diagnostic::error(codes::IO, format!("cannot read {}: {e}", dir.display())))?;
    let mut out = Vec::new();
    for entry in entries.flatten() {
        let path = entry.path();
        if path.extension().is_some_and(|e| e == "java") {
            out.push(SkeletonFile {
                path: path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
                content: read(&path)?,
            });
        }
    }
    out.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(out)
}

fn options(cli: &Cli) -> Result<PipelineOptions, Diagnostic> {
    let mut oo = OoOptions::default();
    if let Some(p) = &cli.builtins {
        oo.builtins = pipeline::parse_builtins(&read(p)?, &p.display().to_string())?;
    }
    if let Some(p) = &cli.type_map {
        oo.type_map = pipeline::parse_type_map(&read(p)?, &p.display().to_string())?;
    }
    let skeletons = match &cli.skeletons {
        Some(dir) => load_skeletons(dir)?,
        None => Vec::new(),
    };
    Ok(PipelineOptions { oo, skeletons })
}

fn resume(path: &Path, opts: &PipelineOptions) -> Result<FormOutput, Vec<Diagnostic>> {
    let stage = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
    let order = ["kdm", "primitives", "platform", "oo"];
    let Some(level) = order.iter().position(|s| *s == stage) else {
        return Err(vec![Diagnostic::error(
            codes::CONFIG,
            format!("{}: expected one of kdm.json, primitives.json, platform.json, oo.json", path.display()),
        )]);
    };
    let dir = path.parent().unwrap_or(Path::new("."));
    let kdm: CodeModel = json(&dir.join("kdm.json")).map_err(|d| vec![d])?;
    let primitives: Option<PrimitivesRoot> = if level >= 1 {
        Some(json(&dir.join("primitives.json")).map_err(|d| vec![d])?)
    } else {
        None
    };
    let platform: Option<TargetPlatformModel> = if level >= 2 {
        Some(json(&dir.join("platform.json")).map_err(|d| vec![d])?)
    } else {
        None
    };
    let oo: Option<OOModel> = if level >= 3 {
        Some(json(&dir.join("oo.json")).map_err(|d| vec![d])?)
    } else {
        None
    };
    pipeline::complete(
        Models {
            kdm,
            primitives,
            platform,
            oo,
        },
        opts,
    )
}

fn write_outputs(cli: &Cli, out: &FormOutput) -> Result<(), Diagnostic> {
    let form = &out.primitives.form_name;
    let wants = |e: Emit| cli.emit.contains(&e);
    let models = cli.out.join("models").join(form);
    if wants(Emit::Kdm) {
        write(&models.join("kdm.json"), &out.kdm.to_json())?;
    }
    if wants(Emit::Primitives) {
        write(&models.join("primitives.json"), &out.primitives.to_json())?;
    }
    if wants(Emit::Platform) {
        write(&models.join("platform.json"), &out.platform.to_json())?;
    }
    if wants(Emit::Oo) {
        write(&models.join("oo.json"), &out.oo.to_json())?;
    }
    if wants(Emit::Java) {
        let src = cli.out.join("src").join(form);
        for f in out.java.files.iter().chain(&out.support.files) {
            write(&src.join(&f.path), &f.content)?;
        }
    }
    if wants(Emit::Metrics) {
        let dir = cli.out.join("metrics");
        write(&dir.join(format!("{form}.json")), &out.metrics.to_json())?;
        write(&dir.join(format!("{form}.txt")), &out.metrics.to_table())?;
    }
    if wants(Emit::Flowgraph) {
        let format = match cli.flow_format {
            Format::Cypher => FlowFormat::Cypher,
            Format::Dot => FlowFormat::Dot,
        };
        let dir = cli.out.join("flowgraph");
        for f in &out.flows {
            write(
                &dir.join(format!("{}.{}", f.name, format.extension())),
                &emit(&f.graph, format, &f.name),
            )?;
        }
    }
    Ok(())
}

fn report(diagnostics: &[Diagnostic], strict: bool) -> bool {
    let mut failed = false;
    for d in diagnostics {
        let mut d = d.clone();
        if strict {
            d.severity = Severity::Error;
        }
        failed |= d.is_error();
        eprintln!("{d}");
    }
    failed
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = match options(&cli) {
        Ok(o) => o,
        Err(d) => {
            report(&[d], cli.strict);
            return ExitCode::FAILURE;
        }
    };
    let mut failed = false;
    let runs: Vec<Result<FormOutput, Vec<Diagnostic>>> = match &cli.resume {
        Some(p) => vec![resume(p, &opts)],
        None => cli
            .input
            .iter()
            .map(|path| {
                let text = read(path).map_err(|d| vec![d])?;
                pipeline::run(&text, &path.display().to_string(), &opts)
            })
            .collect(),
    };
    for run in runs {
        match run {
            Ok(out) => {
                failed |= report(&out.diagnostics, cli.strict);
                if let Err(d) = write_outputs(&cli, &out) {
                    failed |= report(&[d], cli.strict);
                }
            }
            Err(ds) => failed |= report(&ds, cli.strict),
        }
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
