//! Command-line front end. Exit codes: 0 ok, 2 parse, 3 domain invariant,
//! 4 algorithm failure, 5 I/O.

use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::flips::algorithm::{flipping_algorithm, FlipStep};
use crate::flips::glued::Face;
use crate::geom::Mat2;
use crate::inverse::{self, TargetTriple};
use crate::sample;
use crate::surface::{
    angle_pairs, classify_combinatorics, glue, status_from_sums, to_marked_triangle, DelaunayStatus, MarkedTriple,
    Orientation, Partition, RawTriple,
};
use crate::svg;
use crate::tol::Tolerances;
use crate::veech::{delaunay_equivalent, delaunay_normalize, trace_audit, veech_generators, AuditRecord, ElementKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_ALGORITHM: i32 = 4;
pub const EXIT_IO: i32 = 5;

/// Componentwise tolerance for the two normalizers to agree.
const CROSS_ORACLE_TOL: f64 = 1e-8;
/// Longest random Φ word applied before a `--random` sweep instance.
const SCRAMBLE_LEN: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "pillowcase", version, about = "Half-dilation pillowcases from marked triangles")]
pub struct Cli {
    /// Input file; stdin when absent.
    #[arg(long = "in", global = true, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = crate::flips::algorithm::DEFAULT_MAX_STEPS, value_parser = parse_max_steps)]
    pub max_steps: usize,
    /// Tolerance override, repeatable.
    #[arg(long = "tol", global = true, value_name = "KEY=VAL", value_parser = parse_tol)]
    pub tol: Vec<(String, f64)>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build or check a marked triple.
    #[command(subcommand)]
    Surface(SurfaceCmd),
    /// Flip to a Delaunay triangulation.
    Delaunay(DelaunayArgs),
    /// Veech-group generators at the Delaunay representative.
    Veech(VeechArgs),
    /// Dilation ratios realizing a target trace triple.
    Inverse(InverseArgs),
    /// Render a surface or a flip trace.
    #[command(subcommand)]
    Export(ExportCmd),
}

#[derive(Debug, Subcommand)]
pub enum SurfaceCmd {
    Build(BuildArgs),
    Validate,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
    pub v1: [f64; 2],
    #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
    pub v2: [f64; 2],
    #[arg(long, allow_hyphen_values = true, value_parser = parse_triple, default_value = "1,1,1")]
    pub lambda: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Phi,
    Glued,
    Both,
}

#[derive(Debug, Args)]
pub struct DelaunayArgs {
    #[arg(long, value_enum, default_value_t = Engine::Glued)]
    pub engine: Engine,
    /// Ignore the input and sweep N seeded random surfaces.
    #[arg(long, value_name = "N")]
    pub random: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VeechArgs {
    /// Report arccosh lengths of hyperbolic generators.
    #[arg(long)]
    pub lengths: bool,
}

#[derive(Debug, Args)]
pub struct InverseArgs {
    /// Target a,b,c; read {"target":[a,b,c]} from the input when absent.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_triple)]
    pub target: Option<[f64; 3]>,
}

#[derive(Debug, Subcommand)]
pub enum ExportCmd {
    Svg,
}

fn parse_floats<const N: usize>(s: &str) -> std::result::Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers, got {:?}", s));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| format!("{p:?} is not a number"))?;
    }
    Ok(out)
}

fn parse_pair(s: &str) -> std::result::Result<[f64; 2], String> {
    parse_floats::<2>(s)
}

fn parse_triple(s: &str) -> std::result::Result<[f64; 3], String> {
    parse_floats::<3>(s)
}

fn parse_max_steps(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("expected a positive integer, got {s:?}")),
    }
}

fn parse_tol(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VAL, got {s:?}"))?;
    if !Tolerances::KEYS.contains(&k) {
        return Err(format!("unknown tolerance {k:?}; known: {}", Tolerances::KEYS.join(", ")));
    }
    let v: f64 = v.parse().map_err(|_| format!("{v:?} is not a number"))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(format!("tolerance {k} must be positive"));
    }
    Ok((k.to_string(), v))
}

/// Resolved global settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub tol: Tolerances,
    pub max_steps: usize,
    pub seed: u64,
    pub format: Format,
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Self { code: EXIT_PARSE, message: message.into() }
    }

    fn io(message: impl Into<String>) -> Self {
        Self { code: EXIT_IO, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_algorithmic() { EXIT_ALGORITHM } else { EXIT_DOMAIN };
        Self { code, message: e.to_string() }
    }
}

type CmdResult<T> = std::result::Result<T, Failure>;

/// Parses `args` and runs one command. Help and version go to `stdout`.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_PARSE
                }
            };
        }
    };
    match execute(&cli, stdin) {
        Ok((bytes, code)) => {
            if let Err(f) = emit(&cli, &bytes) {
                let _ = writeln!(stderr, "error: {}", f.message);
                return f.code;
            }
            let _ = match &cli.out {
                None => stdout.write_all(&bytes),
                Some(_) => Ok(()),
            };
            if code != EXIT_OK {
                let _ = writeln!(stderr, "error: cross-oracle disagreement");
            }
            code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(cli: &Cli, bytes: &[u8]) -> CmdResult<()> {
    if let Some(path) = &cli.out {
        fs::write(path, bytes).map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn config(cli: &Cli) -> RunConfig {
    let mut tol = Tolerances::default();
    for (k, v) in &cli.tol {
        tol.set(k, *v).expect("keys are checked while parsing");
    }
    let format = cli.format.unwrap_or(match cli.command {
        Command::Export(_) => Format::Svg,
        _ => Format::Json,
    });
    RunConfig { tol, max_steps: cli.max_steps, seed: cli.seed, format }
}

fn read_input(cli: &Cli, stdin: &mut dyn Read) -> CmdResult<String> {
    let mut s = String::new();
    match &cli.input {
        Some(path) => {
            s = fs::read_to_string(path).map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
        }
        None => {
            stdin.read_to_string(&mut s).map_err(|e| Failure::io(format!("cannot read stdin: {e}")))?;
        }
    }
    Ok(s)
}

/// Two-stage decode: shape errors exit 2, invariant violations exit 3.
fn read_triple(text: &str) -> CmdResult<MarkedTriple> {
    let raw: RawTriple = serde_json::from_str(text).map_err(|e| Failure::parse(format!("surface JSON: {e}")))?;
    Ok(MarkedTriple::try_from(raw)?)
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("plain data serializes");
    out.push(b'\n');
    out
}

fn csv_bytes<R: Serialize>(rows: &[R]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("flat rows serialize");
    }
    w.into_inner().expect("in-memory writer")
}

fn unsupported(cfg: &RunConfig, command: &str) -> Failure {
    Failure::parse(format!("format {:?} is not supported by {command}", cfg.format).to_lowercase())
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> CmdResult<(Vec<u8>, i32)> {
    let cfg = config(cli);
    match &cli.command {
        Command::Surface(SurfaceCmd::Build(a)) => Ok((surface_build(a, &cfg)?, EXIT_OK)),
        Command::Surface(SurfaceCmd::Validate) => {
            let t = read_triple(&read_input(cli, stdin)?)?;
            Ok((surface_validate(&t, &cfg)?, EXIT_OK))
        }
        Command::Delaunay(a) => {
            let inputs = match a.random {
                Some(n) => {
                    let mut rng = sample::rng(cfg.seed);
                    (0..n).map(|_| sample::random_scrambled(&mut rng, SCRAMBLE_LEN)).collect()
                }
                None => vec![read_triple(&read_input(cli, stdin)?)?],
            };
            delaunay(&inputs, a.random.is_some(), a.engine, &cfg)
        }
        Command::Veech(a) => {
            let t = read_triple(&read_input(cli, stdin)?)?;
            Ok((veech(&t, a.lengths, &cfg)?, EXIT_OK))
        }
        Command::Inverse(a) => {
            let target = match a.target {
                Some(t) => t,
                None => {
                    #[derive(Deserialize)]
                    #[serde(deny_unknown_fields)]
                    struct Input {
                        target: [f64; 3],
                    }
                    let text = read_input(cli, stdin)?;
                    serde_json::from_str::<Input>(&text)
                        .map_err(|e| Failure::parse(format!("target JSON: {e}")))?
                        .target
                }
            };
            Ok((inverse_cmd(target, &cfg)?, EXIT_OK))
        }
        Command::Export(ExportCmd::Svg) => {
            if cfg.format != Format::Svg {
                return Err(unsupported(&cfg, "export svg"));
            }
            Ok((export_svg(&read_input(cli, stdin)?, &cfg)?.into_bytes(), EXIT_OK))
        }
    }
}

fn surface_build(a: &BuildArgs, cfg: &RunConfig) -> CmdResult<Vec<u8>> {
    let t = MarkedTriple::new(a.v1.into(), a.v2.into(), a.lambda)?;
    match cfg.format {
        Format::Json => Ok(json(&t)),
        Format::Csv => Ok(csv_bytes(&[TripleRow::from(&t)])),
        Format::Svg => Err(unsupported(cfg, "surface build")),
    }
}

#[derive(Serialize)]
struct TripleRow {
    v1x: f64,
    v1y: f64,
    v2x: f64,
    v2y: f64,
    v3x: f64,
    v3y: f64,
    lambda1: f64,
    lambda2: f64,
    lambda3: f64,
}

impl From<&MarkedTriple> for TripleRow {
    fn from(t: &MarkedTriple) -> Self {
        let [v1, v2, v3] = t.vectors();
        let [l1, l2, l3] = t.lambda();
        Self { v1x: v1.x, v1y: v1.y, v2x: v2.x, v2y: v2.y, v3x: v3.x, v3y: v3.y, lambda1: l1, lambda2: l2, lambda3: l3 }
    }
}

#[derive(Serialize)]
struct ValidateReport {
    triple: MarkedTriple,
    orientation: Orientation,
    /// [γ + γ′, α + α′, β + β′], indexed by flip index.
    angle_sums: [f64; 3],
    status: DelaunayStatus,
    partition: Partition,
    cone_angles: [f64; 4],
    harmonic_index: f64,
}

fn surface_validate(t: &MarkedTriple, cfg: &RunConfig) -> CmdResult<Vec<u8>> {
    if cfg.format != Format::Json {
        return Err(unsupported(cfg, "surface validate"));
    }
    let m = to_marked_triangle(t);
    let sums = angle_pairs(&m, &cfg.tol)?.sums();
    let g = glue(&m, &cfg.tol)?;
    let mut cone_angles = [0.0; 4];
    for (s, a) in g.cone_angles() {
        cone_angles[s.index() - 1] = a;
    }
    let report = ValidateReport {
        triple: *t,
        orientation: t.orientation(),
        angle_sums: sums,
        status: status_from_sums(sums, &cfg.tol)?,
        partition: classify_combinatorics(&g)?,
        cone_angles,
        harmonic_index: g.harmonic_index(&cfg.tol)?,
    };
    Ok(json(&report))
}

/// One normalization. `steps`, `phi_word`, `phi_final` and `agree` appear
/// only for the engines that produce them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelaunayReport {
    pub engine: String,
    pub initial: MarkedTriple,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<FlipStep>>,
    pub phi_pairs: Vec<usize>,
    #[serde(rename = "final")]
    pub final_: Option<MarkedTriple>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_final: Option<MarkedTriple>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agree: Option<bool>,
}

fn normalize_one(t: &MarkedTriple, engine: Engine, cfg: &RunConfig) -> CmdResult<DelaunayReport> {
    let phi = match engine {
        Engine::Glued => None,
        _ => Some(delaunay_normalize(t, cfg.max_steps, &cfg.tol)?),
    };
    let glued = match engine {
        Engine::Phi => None,
        _ => {
            let g = glue(&to_marked_triangle(t), &cfg.tol)?;
            let tr = flipping_algorithm(&g, cfg.max_steps, &cfg.tol)?;
            let fin = if tr.final_.is_tetrahedral() { Some(tr.final_.to_marked_triple(&cfg.tol)?) } else { None };
            Some((tr.steps, tr.phi_pairs, fin))
        }
    };
    Ok(match (phi, glued) {
        (Some((pf, word)), None) => DelaunayReport {
            engine: "phi".into(),
            initial: *t,
            steps: None,
            phi_pairs: word,
            final_: Some(pf),
            phi_final: None,
            agree: None,
        },
        (None, Some((steps, pairs, fin))) => DelaunayReport {
            engine: "glued".into(),
            initial: *t,
            steps: Some(steps),
            phi_pairs: pairs,
            final_: fin,
            phi_final: None,
            agree: None,
        },
        (Some((pf, word)), Some((steps, pairs, fin))) => {
            let agree = match &fin {
                Some(f) => delaunay_equivalent(f, &pf, CROSS_ORACLE_TOL, &cfg.tol)?,
                None => false,
            };
            let _ = word;
            DelaunayReport {
                engine: "both".into(),
                initial: *t,
                steps: Some(steps),
                phi_pairs: pairs,
                final_: fin,
                phi_final: Some(pf),
                agree: Some(agree),
            }
        }
        (None, None) => unreachable!("every engine runs at least one normalizer"),
    })
}

#[derive(Serialize)]
struct StepRow {
    instance: usize,
    step: usize,
    edge: usize,
    hrm_before: f64,
    hrm_after: f64,
}

fn delaunay(inputs: &[MarkedTriple], sweep: bool, engine: Engine, cfg: &RunConfig) -> CmdResult<(Vec<u8>, i32)> {
    if cfg.format == Format::Svg || (cfg.format == Format::Csv && engine == Engine::Phi) {
        return Err(unsupported(cfg, "delaunay"));
    }
    let reports = inputs.iter().map(|t| normalize_one(t, engine, cfg)).collect::<CmdResult<Vec<_>>>()?;
    let code = if reports.iter().any(|r| r.agree == Some(false)) { EXIT_ALGORITHM } else { EXIT_OK };
    let bytes = match cfg.format {
        Format::Csv => {
            let rows: Vec<StepRow> = reports
                .iter()
                .enumerate()
                .flat_map(|(n, r)| {
                    r.steps.iter().flatten().enumerate().map(move |(i, s)| StepRow {
                        instance: n,
                        step: i,
                        edge: s.edge,
                        hrm_before: s.hrm_before,
                        hrm_after: s.hrm_after,
                    })
                })
                .collect();
            csv_bytes(&rows)
        }
        _ if sweep => json(&reports),
        _ => json(&reports[0]),
    };
    Ok((bytes, code))
}

#[derive(Debug, Serialize)]
struct GeneratorRecord {
    pair: (usize, usize),
    matrix: Mat2,
    class: ElementKind,
    trace_sq: f64,
    length: Option<f64>,
}

#[derive(Debug, Serialize)]
struct VeechReport {
    input: MarkedTriple,
    delaunay: MarkedTriple,
    /// Φ word taking the input to `delaunay`.
    word: Vec<usize>,
    /// Which composition the generator matrices come from.
    trace_source: &'static str,
    length_source: Option<&'static str>,
    generators: Vec<GeneratorRecord>,
    audit: Vec<AuditRecord>,
}

#[derive(Serialize)]
struct GeneratorRow {
    j: usize,
    i: usize,
    class: ElementKind,
    trace_sq: f64,
    length: Option<f64>,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

fn veech(t: &MarkedTriple, lengths: bool, cfg: &RunConfig) -> CmdResult<Vec<u8>> {
    let (d, word) = delaunay_normalize(t, cfg.max_steps, &cfg.tol)
        .map_err(|e| Failure { code: EXIT_ALGORITHM, message: format!("normalization failed: {e}") })?;
    let set = veech_generators(&d, &cfg.tol)?;
    let generators: Vec<GeneratorRecord> = set
        .generators
        .iter()
        .map(|g| GeneratorRecord {
            pair: g.pair,
            matrix: g.matrix.matrix(),
            class: g.class.kind,
            trace_sq: g.class.normalized_trace_sq,
            length: if lengths { g.class.length } else { None },
        })
        .collect();
    match cfg.format {
        Format::Json => Ok(json(&VeechReport {
            input: *t,
            delaunay: d,
            word,
            trace_source: "surface_flip_composition",
            length_source: lengths.then_some("arccosh(sqrt(trace_sq)/2)"),
            generators,
            audit: trace_audit(&d)?,
        })),
        Format::Csv => {
            let rows: Vec<GeneratorRow> = generators
                .iter()
                .map(|g| GeneratorRow {
                    j: g.pair.0,
                    i: g.pair.1,
                    class: g.class,
                    trace_sq: g.trace_sq,
                    length: g.length,
                    a: g.matrix.a,
                    b: g.matrix.b,
                    c: g.matrix.c,
                    d: g.matrix.d,
                })
                .collect();
            Ok(csv_bytes(&rows))
        }
        Format::Svg => Err(unsupported(cfg, "veech")),
    }
}

#[derive(Debug, Serialize)]
struct InverseReport {
    target: [f64; 3],
    solutions: Vec<[f64; 3]>,
    classes: Vec<Vec<usize>>,
    lambda4: Vec<f64>,
    lengths: [f64; 3],
}

#[derive(Serialize)]
struct SolutionRow {
    index: usize,
    class: usize,
    lambda1: f64,
    lambda2: f64,
    lambda3: f64,
    lambda4: f64,
}

fn inverse_cmd(target: [f64; 3], cfg: &RunConfig) -> CmdResult<Vec<u8>> {
    let [a, b, c] = target;
    let t = TargetTriple::new(a, b, c, &cfg.tol)?;
    let f = inverse::solve(&t, &cfg.tol)?;
    match cfg.format {
        Format::Json => Ok(json(&InverseReport {
            target: t.values(),
            solutions: f.solutions.clone(),
            classes: f.classes.clone(),
            lambda4: f.lambda4.clone(),
            lengths: t.lengths(),
        })),
        Format::Csv => {
            let mut rows = Vec::new();
            for (k, class) in f.classes.iter().enumerate() {
                for &i in class {
                    let [l1, l2, l3] = f.solutions[i];
                    rows.push(SolutionRow {
                        index: i,
                        class: k,
                        lambda1: l1,
                        lambda2: l2,
                        lambda3: l3,
                        lambda4: f.lambda4[k],
                    });
                }
            }
            rows.sort_by_key(|r| r.index);
            Ok(csv_bytes(&rows))
        }
        Format::Svg => Err(unsupported(cfg, "inverse")),
    }
}

/// Trace input: only the fields needed to replay the flips.
#[derive(Deserialize)]
struct TraceInput {
    initial: RawTriple,
    #[serde(default)]
    steps: Vec<StepInput>,
}

#[derive(Deserialize)]
struct StepInput {
    edge: usize,
}

/// A surface renders as one marked triangle; a trace (an object with
/// `initial` and `steps`) renders one panel per state, replayed from the
/// initial surface.
fn export_svg(text: &str, cfg: &RunConfig) -> CmdResult<String> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Failure::parse(format!("input JSON: {e}")))?;
    if value.get("initial").is_none() {
        let t = read_triple(text)?;
        return Ok(svg::render_surface(&to_marked_triangle(&t)));
    }
    let trace: TraceInput = serde_json::from_value(value).map_err(|e| Failure::parse(format!("trace JSON: {e}")))?;
    let t = MarkedTriple::try_from(trace.initial)?;
    let mut g = glue(&to_marked_triangle(&t), &cfg.tol)?;
    let mut states: Vec<(Vec<Face>, String)> = vec![(g.develop(), "initial".into())];
    for (i, s) in trace.steps.iter().enumerate() {
        g = g.flip_edge(s.edge, &cfg.tol)?;
        states.push((g.develop(), format!("step {}: edge {}", i + 1, s.edge)));
    }
    Ok(svg::render_sequence(&states))
}
