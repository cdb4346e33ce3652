//! Command-line front end.
//!
//! One job per invocation; identical invocations produce byte-identical
//! reports (fixed orderings, fixed seeds, no timestamps). Exit codes:
//! 0 success, 2 input error, 3 a size cap was exceeded, 4 an internal
//! verification failed.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use crate::error::Error;
use crate::futaki::{asymptotic_consistency_check, log_futaki_toric, ConvexPLFunction};
use crate::geometry::LatticePolytope;
use crate::io;
use crate::obstruction::{self, AsymptoticVerdict, DivisorSpec};
use crate::rational::{format_rat, Rat};
use crate::stability::{decide_semistable, DecideOptions, Decision, DecisionMode};

pub const SCHEMA: &str = "toric-stab/1";

#[derive(Parser, Debug)]
#[command(
    name = "toric-stab",
    about = "Exact semistability obstructions for polarized toric manifolds with toric divisors",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Polytope file (JSON; halfspaces or vertices)
    #[arg(long, global = true, value_name = "FILE")]
    polytope: Option<PathBuf>,

    /// Built-in fixture: cp1-unit, cp1-sym, square-sym, simplex2,
    /// hirzebruch1
    #[arg(long, global = true, value_name = "NAME")]
    fixture: Option<String>,

    /// Divisors as a JSON file or inline "0:13/14,2:5/7"; overrides
    /// fixture defaults
    #[arg(long, global = true, value_name = "FILE|INLINE")]
    divisors: Option<String>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Linear,
    Sampled,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate the polytope and run the vertex smoothness test
    Validate,
    /// Enumerate the scale-i lattice points
    Count {
        #[arg(long)]
        i: u64,
    },
    /// Exact volumes and moments of the polytope and its facets
    Measures,
    /// The obstruction vector at one dilation (--i) or in closed
    /// polynomial form (--poly)
    Q {
        #[arg(long, conflicts_with = "poly")]
        i: Option<u64>,
        #[arg(long)]
        poly: bool,
    },
    /// Decide torus semistability at dilation i
    Decide {
        #[arg(long)]
        i: u64,
        #[arg(long, value_enum, default_value_t = Mode::Linear)]
        mode: Mode,
        /// Cap on generated constraints / intermediate rays
        #[arg(long, default_value_t = 1_000_000)]
        max_constraints: usize,
        /// Seed for sampled mode
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Log Futaki invariant of a rational convex piecewise-linear function
    Futaki {
        /// Function file {"scale": k, "values": [[[x...], v], ...]}
        #[arg(long, value_name = "FILE")]
        h: PathBuf,
    },
    /// Exact margins along a dilation ladder against the Futaki value
    FutakiConsistency {
        #[arg(long, value_name = "FILE")]
        h: PathBuf,
        /// Base dilation (must be a multiple of the function's scale)
        #[arg(long)]
        k: u64,
        /// Margins are sampled at j*k for j = 1..=imax
        #[arg(long, default_value_t = 6)]
        imax: u64,
    },
    /// Emit a built-in fixture as a polytope+divisors JSON bundle
    Examples { name: String },
}

/// Runs the command line; returns (exit code, stdout, stderr).
pub fn run(argv: &[String]) -> (i32, String, String) {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            // --help/--version are successful exits in clap's model.
            return if e.exit_code() == 0 {
                (0, rendered, String::new())
            } else {
                (2, String::new(), rendered)
            };
        }
    };
    if let Err(message) = check_thread_cap() {
        return (2, String::new(), format!("error: {message}\n"));
    }
    match execute(cli) {
        Ok((code, stdout)) => (code, stdout, String::new()),
        Err(e) => {
            let code = match e {
                Error::TooLarge(_) => 3,
                Error::VerificationFailed(_) => 4,
                _ => 2,
            };
            (code, String::new(), format!("error: {e}\n"))
        }
    }
}

/// TORIC_STAB_THREADS caps internal workers. Evaluation is sequential, so
/// any positive cap is honored; the variable is still validated.
fn check_thread_cap() -> Result<(), String> {
    validate_thread_cap(std::env::var("TORIC_STAB_THREADS").ok().as_deref())
}

fn validate_thread_cap(raw: Option<&str>) -> Result<(), String> {
    match raw {
        None => Ok(()),
        Some(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(()),
            _ => Err(format!(
                "TORIC_STAB_THREADS must be a positive integer, got {raw:?}"
            )),
        },
    }
}

struct Job {
    polytope: LatticePolytope,
    divisors: Vec<DivisorSpec>,
    digest: String,
}

fn load_job(cli: &Cli) -> Result<Job, Error> {
    let (polytope, default_divisors) = match (&cli.polytope, &cli.fixture) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidInput(
                "give either --polytope or --fixture, not both".into(),
            ))
        }
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::InvalidInput(format!("cannot read {}: {e}", path.display()))
            })?;
            io::parse_polytope_document(&text)?
        }
        (None, Some(name)) => crate::fixtures::load_fixture(name)?,
        (None, None) => {
            return Err(Error::InvalidInput(
                "a polytope is required: --polytope FILE or --fixture NAME".into(),
            ))
        }
    };
    let divisors = match &cli.divisors {
        Some(arg) => io::parse_divisors_arg(arg)?,
        None => default_divisors,
    };
    obstruction::validate_divisors(&polytope, &divisors)?;
    let canonical = format!(
        "{}|{}",
        io::polytope_to_value(&polytope),
        io::divisors_to_value(&divisors)
    );
    Ok(Job {
        polytope,
        divisors,
        digest: io::fnv1a_hex(canonical.as_bytes()),
    })
}

fn delzant_warnings(polytope: &LatticePolytope) -> Vec<String> {
    let report = polytope.is_delzant();
    if report.is_delzant {
        Vec::new()
    } else {
        vec![
            "polytope is not Delzant: semistability statements assume smooth vertices".into(),
        ]
    }
}

struct Report {
    command: String,
    digest: String,
    warnings: Vec<String>,
    /// (key, value, text rendering) — text lines print in order.
    body: Vec<(String, Value)>,
    text: Vec<String>,
}

impl Report {
    fn new(command: &str, digest: &str) -> Self {
        Self {
            command: command.to_string(),
            digest: digest.to_string(),
            warnings: Vec::new(),
            body: Vec::new(),
            text: Vec::new(),
        }
    }

    fn field(&mut self, key: &str, value: Value, line: String) {
        self.body.push((key.to_string(), value));
        self.text.push(line);
    }

    fn render(self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut object = Map::new();
                object.insert("schema".into(), Value::String(SCHEMA.into()));
                object.insert("command".into(), Value::String(self.command));
                object.insert("inputs_digest".into(), Value::String(self.digest));
                object.insert(
                    "warnings".into(),
                    Value::Array(self.warnings.into_iter().map(Value::String).collect()),
                );
                let mut results = Map::new();
                for (k, v) in self.body {
                    results.insert(k, v);
                }
                object.insert("results".into(), Value::Object(results));
                let mut out = serde_json::to_string_pretty(&Value::Object(object))
                    .expect("report serializes");
                out.push('\n');
                out
            }
            Format::Text => {
                let mut lines = vec![
                    format!("schema: {SCHEMA}"),
                    format!("command: {}", self.command),
                    format!("inputs: fnv1a:{}", self.digest),
                ];
                for w in &self.warnings {
                    lines.push(format!("warning: {w}"));
                }
                lines.extend(self.text);
                let mut out = lines.join("\n");
                out.push('\n');
                out
            }
        }
    }
}

fn execute(cli: Cli) -> Result<(i32, String), Error> {
    if let Command::Examples { name } = &cli.command {
        let (polytope, divisors) = crate::fixtures::load_fixture(name)?;
        let mut object = Map::new();
        object.insert("polytope".into(), io::polytope_to_value_numeric(&polytope)?);
        object.insert("divisors".into(), io::divisors_to_value(&divisors));
        let mut out = serde_json::to_string_pretty(&Value::Object(object))
            .expect("fixture serializes");
        out.push('\n');
        return Ok((0, out));
    }

    let job = load_job(&cli)?;
    let polytope = &job.polytope;
    let divisors = &job.divisors;

    match &cli.command {
        Command::Examples { .. } => unreachable!("handled above"),
        Command::Validate => {
            let mut report = Report::new("validate", &job.digest);
            let delzant = polytope.is_delzant();
            report.field(
                "dim",
                Value::Number(polytope.dim().into()),
                format!("dim: {}", polytope.dim()),
            );
            report.field(
                "facets",
                Value::Number(polytope.facet_count().into()),
                format!("facets: {}", polytope.facet_count()),
            );
            let vertices: Vec<Value> = polytope
                .vertices()
                .iter()
                .map(|v| {
                    Value::Array(v.iter().map(|c| Value::String(c.to_string())).collect())
                })
                .collect();
            let vertex_text = polytope
                .vertices()
                .iter()
                .map(|v| {
                    let coords: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                    format!("({})", coords.join(", "))
                })
                .collect::<Vec<_>>()
                .join(" ");
            report.field(
                "vertices",
                Value::Array(vertices),
                format!("vertices: {vertex_text}"),
            );
            report.field(
                "is_delzant",
                Value::Bool(delzant.is_delzant),
                format!("delzant: {}", delzant.is_delzant),
            );
            let failures: Vec<Value> = delzant
                .failures
                .iter()
                .map(|f| {
                    let mut object = Map::new();
                    object.insert(
                        "vertex".into(),
                        Value::Array(
                            f.vertex.iter().map(|c| Value::String(c.to_string())).collect(),
                        ),
                    );
                    object.insert(
                        "determinant".into(),
                        Value::String(f.determinant.to_string()),
                    );
                    Value::Object(object)
                })
                .collect();
            for f in &delzant.failures {
                let coords: Vec<String> = f.vertex.iter().map(|c| c.to_string()).collect();
                report.text.push(format!(
                    "failure: vertex ({}) has edge determinant {}",
                    coords.join(", "),
                    f.determinant
                ));
            }
            report.body.push(("failures".into(), Value::Array(failures)));
            report.field(
                "divisors",
                io::divisors_to_value(divisors),
                format!("divisors: {}", render_divisors(divisors)),
            );
            Ok((0, report.render(cli.format)))
        }
        Command::Count { i } => {
            if *i == 0 {
                return Err(Error::InvalidInput("--i must be >= 1".into()));
            }
            let points = polytope.lattice_points(*i);
            let mut report = Report::new(&format!("count --i {i}"), &job.digest);
            report.field(
                "i",
                Value::Number((*i).into()),
                format!("i: {i}"),
            );
            report.field(
                "count",
                Value::Number(points.len().into()),
                format!("count: {}", points.len()),
            );
            let values: Vec<Value> = points.iter().map(|p| io::point_value(p)).collect();
            for p in &points {
                report.text.push(format!("point: {}", io::render_vector(p)));
            }
            report.body.push(("points".into(), Value::Array(values)));
            Ok((0, report.render(cli.format)))
        }
        Command::Measures => {
            let m = crate::measures::measure_report(polytope);
            let mut report = Report::new("measures", &job.digest);
            report.field(
                "volume",
                io::rat_value(&m.volume),
                format!("volume: {}", format_rat(&m.volume)),
            );
            report.field(
                "moment",
                io::point_value(&m.moment),
                format!("moment: {}", io::render_vector(&m.moment)),
            );
            report.field(
                "facet_volumes",
                Value::Array(m.facet_volumes.iter().map(io::rat_value).collect()),
                format!(
                    "facet volumes: {}",
                    m.facet_volumes
                        .iter()
                        .map(format_rat)
                        .collect::<Vec<_>>()
                        .join(" ")
                ),
            );
            report.field(
                "facet_moments",
                Value::Array(m.facet_moments.iter().map(|p| io::point_value(p)).collect()),
                format!(
                    "facet moments: {}",
                    m.facet_moments
                        .iter()
                        .map(|p| io::render_vector(p))
                        .collect::<Vec<_>>()
                        .join(" ")
                ),
            );
            report.field(
                "boundary_volume",
                io::rat_value(&m.boundary_volume),
                format!("boundary volume: {}", format_rat(&m.boundary_volume)),
            );
            Ok((0, report.render(cli.format)))
        }
        Command::Q { i, poly } => {
            let mut report = Report::new(
                &match i {
                    Some(i) => format!("q --i {i}"),
                    None => "q --poly".to_string(),
                },
                &job.digest,
            );
            report.warnings = delzant_warnings(polytope);
            if let Some(i) = i {
                if *i == 0 {
                    return Err(Error::InvalidInput("--i must be >= 1".into()));
                }
                let q = obstruction::q_vector(polytope, divisors, *i)?;
                report.field(
                    "i",
                    Value::Number((*i).into()),
                    format!("i: {i}"),
                );
                report.field(
                    "q",
                    io::point_value(&q),
                    format!("Q_{i} = {}", io::render_vector(&q)),
                );
                let zero = q.iter().all(num_traits::Zero::is_zero);
                report.field(
                    "is_zero",
                    Value::Bool(zero),
                    format!("vanishes: {zero}"),
                );
            } else {
                if !poly {
                    return Err(Error::InvalidInput(
                        "q needs --i K or --poly".into(),
                    ));
                }
                let q = obstruction::q_polynomial(polytope, divisors)?;
                let coeffs = q.coefficient_vectors();
                let degree = q.degree();
                report.field(
                    "degree",
                    match degree {
                        Some(d) => Value::Number(d.into()),
                        None => Value::Null,
                    },
                    format!(
                        "degree: {}",
                        degree.map_or("none (zero polynomial)".into(), |d| d.to_string())
                    ),
                );
                report.field(
                    "coefficients",
                    Value::Array(coeffs.iter().map(|v| io::point_value(v)).collect()),
                    format!("Q_i = {}", render_vector_poly(&coeffs)),
                );
                let verdict = obstruction::asymptotic_verdict(polytope, divisors)?;
                let (verdict_value, verdict_line) = match verdict {
                    AsymptoticVerdict::ObstructionVanishes => (
                        Value::String("obstruction-vanishes".into()),
                        "verdict: obstruction vanishes identically (necessary condition holds)"
                            .to_string(),
                    ),
                    AsymptoticVerdict::ObstructedAt(i) => (
                        Value::String(format!("asymptotically log Chow unstable (i = {i})")),
                        format!(
                            "verdict: asymptotically log Chow unstable (first nonzero at i = {i})"
                        ),
                    ),
                };
                report.field("verdict", verdict_value, verdict_line);
                if polytope.dim() == 1 && divisors.len() == 2 {
                    let note = "interval normalization: on [0,1] with endpoint divisors the \
                         obstruction is (i+1)(beta_0-beta_1)/2; on [-1,1] it is \
                         (2i+1)(beta_0-beta_1); both vanish exactly when the angles agree";
                    report.field(
                        "normalization_note",
                        Value::String(note.into()),
                        format!("note: {note}"),
                    );
                }
            }
            Ok((0, report.render(cli.format)))
        }
        Command::Decide {
            i,
            mode,
            max_constraints,
            seed,
        } => {
            if *i == 0 {
                return Err(Error::InvalidInput("--i must be >= 1".into()));
            }
            let mode_enum = match mode {
                Mode::Exact => DecisionMode::Exact,
                Mode::Linear => DecisionMode::LinearOnly,
                Mode::Sampled => DecisionMode::Sampled,
            };
            let options = DecideOptions {
                mode: mode_enum,
                max_constraints: *max_constraints,
                seed: *seed,
                samples: 500,
            };
            let mode_name = match mode {
                Mode::Exact => "exact",
                Mode::Linear => "linear",
                Mode::Sampled => "sampled",
            };
            let mut report = Report::new(
                &format!("decide --i {i} --mode {mode_name}"),
                &job.digest,
            );
            report.warnings = delzant_warnings(polytope);
            // Exact mode beyond its caps degrades to the linear check plus
            // a sampled search, flagged as not a certificate, and the run
            // still signals the cap through its exit code.
            let mut capped: Option<String> = None;
            let verdict = match decide_semistable(polytope, divisors, *i, &options) {
                Ok(v) => v,
                Err(Error::TooLarge(msg)) if mode_enum == DecisionMode::Exact => {
                    capped = Some(msg);
                    let linear = decide_semistable(
                        polytope,
                        divisors,
                        *i,
                        &DecideOptions {
                            mode: DecisionMode::LinearOnly,
                            ..options.clone()
                        },
                    )?;
                    if linear.decision == Decision::Unstable {
                        linear
                    } else {
                        decide_semistable(
                            polytope,
                            divisors,
                            *i,
                            &DecideOptions {
                                mode: DecisionMode::Sampled,
                                ..options.clone()
                            },
                        )?
                    }
                }
                Err(e) => return Err(e),
            };
            if let Some(msg) = &capped {
                report.warnings.push(format!(
                    "exact mode exceeded its caps ({msg}); reporting linear and sampled \
                     results instead — not a certificate"
                ));
            }
            let decision = match verdict.decision {
                Decision::Semistable => "semistable",
                Decision::Unstable => "unstable",
                Decision::Inconclusive => "inconclusive",
            };
            report.field(
                "decision",
                Value::String(decision.into()),
                format!("decision: {decision}"),
            );
            // the mode that actually produced the verdict, which differs
            // from the requested one after a cap fallback
            let effective_mode = match verdict.mode {
                DecisionMode::Exact => "exact",
                DecisionMode::LinearOnly => "linear",
                DecisionMode::Sampled => "sampled",
            };
            report.field(
                "mode",
                Value::String(effective_mode.into()),
                format!("mode: {effective_mode}"),
            );
            report.field(
                "certified",
                Value::Bool(verdict.certified),
                format!("certified: {}", verdict.certified),
            );
            if let Some(m) = &verdict.margin_minimum {
                report.field(
                    "margin_minimum",
                    io::rat_value(m),
                    format!("margin minimum: {}", format_rat(m)),
                );
            }
            if let Some(w) = &verdict.witness {
                report.field(
                    "witness",
                    io::lattice_function_to_value(&w.values),
                    format!(
                        "witness values: {}",
                        io::render_vector(&w.values.values)
                    ),
                );
            }
            if let Some(note) = &verdict.note {
                report.field(
                    "note",
                    Value::String(note.clone()),
                    format!("note: {note}"),
                );
            }
            let code = if capped.is_some() { 3 } else { 0 };
            Ok((code, report.render(cli.format)))
        }
        Command::Futaki { h } => {
            let text = std::fs::read_to_string(h).map_err(|e| {
                Error::InvalidInput(format!("cannot read {}: {e}", h.display()))
            })?;
            let data = io::parse_pl_function_json(&text, polytope)?;
            let h_fn = ConvexPLFunction::new(polytope, data)?;
            let value = log_futaki_toric(polytope, divisors, &h_fn)?;
            let mut report = Report::new("futaki", &job.digest);
            report.warnings = delzant_warnings(polytope);
            report.field(
                "log_futaki",
                io::rat_value(&value),
                format!("log Futaki expression: {}", format_rat(&value)),
            );
            let negated = -value.clone();
            report.field(
                "expansion_combination",
                io::rat_value(&negated),
                format!(
                    "expansion-coefficient combination: {} (equals the negative of the \
                     expression above; the shift cancels)",
                    format_rat(&negated)
                ),
            );
            let direction = if io::is_negative(&value) || value == Rat::from_integer(0.into()) {
                "consistent with log K-semistability for toric degenerations (needs <= 0 \
                 for every rational convex piecewise-linear function)"
            } else {
                "positive: this function obstructs log K-semistability for toric degenerations"
            };
            report.field(
                "direction",
                Value::String(direction.into()),
                format!("direction: {direction}"),
            );
            Ok((0, report.render(cli.format)))
        }
        Command::FutakiConsistency { h, k, imax } => {
            if *k == 0 || *imax == 0 {
                return Err(Error::InvalidInput("--k and --imax must be >= 1".into()));
            }
            let text = std::fs::read_to_string(h).map_err(|e| {
                Error::InvalidInput(format!("cannot read {}: {e}", h.display()))
            })?;
            let data = io::parse_pl_function_json(&text, polytope)?;
            let h_fn = ConvexPLFunction::new(polytope, data)?;
            let j_list: Vec<u64> = (1..=*imax).collect();
            let c = asymptotic_consistency_check(polytope, divisors, &h_fn, *k, &j_list)?;
            let mut report = Report::new(
                &format!("futaki-consistency --k {k} --imax {imax}"),
                &job.digest,
            );
            report.warnings = delzant_warnings(polytope);
            let margins: Vec<Value> = c
                .margins
                .iter()
                .map(|(j, m)| {
                    Value::Array(vec![Value::Number((*j).into()), io::rat_value(m)])
                })
                .collect();
            for (j, m) in &c.margins {
                report
                    .text
                    .push(format!("margin at dilation {}: {}", j * k, format_rat(m)));
            }
            report.body.push(("margins".into(), Value::Array(margins)));
            report.field(
                "fitted",
                Value::String(c.fitted.render("j")),
                format!("fitted margin polynomial: {}", c.fitted.render("j")),
            );
            report.field(
                "leading_normalized",
                io::rat_value(&c.leading_normalized),
                format!(
                    "leading coefficient / (k^n Vol): {}",
                    format_rat(&c.leading_normalized)
                ),
            );
            report.field(
                "leading_over_half_volume",
                io::rat_value(&c.leading_over_half_volume),
                format!(
                    "leading coefficient / (k^n Vol/2): {}",
                    format_rat(&c.leading_over_half_volume)
                ),
            );
            report.field(
                "log_futaki",
                io::rat_value(&c.futaki_value),
                format!("log Futaki expression: {}", format_rat(&c.futaki_value)),
            );
            report.field(
                "pass",
                Value::Bool(c.pass),
                format!("pass: {}", c.pass),
            );
            Ok((0, report.render(cli.format)))
        }
    }
}

fn render_divisors(divisors: &[DivisorSpec]) -> String {
    if divisors.is_empty() {
        return "none".to_string();
    }
    divisors
        .iter()
        .map(|d| format!("{}:{}", d.facet_index, format_rat(&d.beta)))
        .collect::<Vec<_>>()
        .join(",")
}

fn render_vector_poly(coeffs: &[Vec<Rat>]) -> String {
    if coeffs.is_empty() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (k, v) in coeffs.iter().enumerate().rev() {
        if v.iter().all(num_traits::Zero::is_zero) {
            continue;
        }
        let vec_str = io::render_vector(v);
        let term = match k {
            0 => vec_str,
            1 => format!("{vec_str}*i"),
            _ => format!("{vec_str}*i^{k}"),
        };
        parts.push(term);
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

/// Sanity entry point used by the fuzz harness: parse-only, never panics.
pub fn parse_args_for_fuzzing(argv: &[String]) -> bool {
    Cli::try_parse_from(argv).is_ok()
}
