//! Command-line front end. [`run`] is the whole program minus process I/O so
//! that it can be driven from tests.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::approximation::{
    approx_delta, approx_elasticity, approx_length_set, approx_local_elasticity, AtomStream,
    Stabilization, SweepOptions,
};
use crate::error::{Error, Result};
use crate::families::{truncated_monoid, FamilySpec};
use crate::invariants::{self, default_delta_bound};
use crate::monoid::{normalize_with, Limits, Normalized};
use crate::rational::Rat;
use crate::report::{
    AtomsReport, ElementDeltaReport, ElementElasticityReport, LengthsReport, Report,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID_SPEC: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "puiseux", version, about = "Factorization invariants of Puiseux monoids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimal generators and integer normal form.
    Atoms(Common),
    /// Set of lengths, distances and elasticity of one element (needs --x).
    Lengths(Common),
    /// Delta set of an element (--x) or bounded delta set of the monoid.
    Delta(Common),
    /// Elasticity of the monoid with acceptance witness, or of one element.
    Elasticity(Common),
    /// Union of sets of lengths U_n and local elasticity (needs --n).
    Union(Common),
    /// Sweep an invariant along the prefix chain of an atom stream.
    Approx(Common),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Invariant {
    Lengths,
    Elasticity,
    LocalElasticity,
    Delta,
}

#[derive(Args, Debug)]
struct Common {
    /// Comma-separated generators, e.g. 4,6,9 or 1/2,1/3.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["family", "spec"])]
    atoms: Option<Vec<Rat>>,
    /// Built-in family: cyclic, example46, multicyclic, unit_fraction_primes, explicit.
    #[arg(long, conflicts_with = "spec")]
    family: Option<String>,
    /// Ratio for cyclic and example46.
    #[arg(long)]
    r: Option<Rat>,
    /// Number of odd powers for example46.
    #[arg(long)]
    i: Option<u32>,
    /// Base list for the multicyclic family.
    #[arg(long = "B", value_delimiter = ',')]
    b: Option<Vec<Rat>>,
    /// Number of primes for unit_fraction_primes.
    #[arg(long)]
    count: Option<usize>,
    /// JSON monoid or family document.
    #[arg(long)]
    spec: Option<std::path::PathBuf>,
    /// Element to factor.
    #[arg(long)]
    x: Option<Rat>,
    /// Length for unions of sets of lengths.
    #[arg(long)]
    n: Option<u64>,
    /// Number of prefix steps (or stream atoms when nothing bounds them).
    #[arg(long, default_value_t = 5)]
    depth: usize,
    /// Upper bound on elements searched by delta and elasticity.
    #[arg(long)]
    bound: Option<Rat>,
    /// Stabilization window for sweeps.
    #[arg(long, default_value_t = 3)]
    window: usize,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Also list every factorization.
    #[arg(long)]
    show_factorizations: bool,
    /// Invariant swept by `approx`.
    #[arg(long, value_enum)]
    invariant: Option<Invariant>,
}

/// Program output: exit code plus the two streams.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Usage(String);

enum Failure {
    Usage(Usage),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(Usage(msg.into()))
}

/// Parse `argv` (including the program name) and execute.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // a value that fails to parse (e.g. a malformed rational) is a spec error
            let code = match e.kind() {
                _ if !e.use_stderr() => EXIT_OK,
                clap::error::ErrorKind::ValueValidation => EXIT_INVALID_SPEC,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(cli.command) {
        Ok(stdout) => Outcome { code: EXIT_OK, stdout, stderr: String::new() },
        Err(Failure::Usage(Usage(msg))) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n\nRun with --help for usage.\n"),
        },
        Err(Failure::Lib(e)) => Outcome {
            code: if e.is_cap() { EXIT_CAP } else { EXIT_INVALID_SPEC },
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn family_spec(c: &Common) -> std::result::Result<FamilySpec, Failure> {
    if let Some(atoms) = &c.atoms {
        return Ok(FamilySpec::Explicit { atoms: atoms.clone() });
    }
    if let Some(path) = &c.spec {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        return Ok(FamilySpec::from_json(&text)?);
    }
    let name = c
        .family
        .as_deref()
        .ok_or_else(|| usage("one of --atoms, --family or --spec is required"))?;
    let need_r = || c.r.clone().ok_or_else(|| usage(format!("--family {name} requires --r")));
    Ok(match name {
        "cyclic" => FamilySpec::Cyclic { r: need_r()? },
        "example46" => FamilySpec::Example46 {
            r: need_r()?,
            i: c.i.ok_or_else(|| usage("--family example46 requires --i"))?,
        },
        "multicyclic" => FamilySpec::Multicyclic {
            b: c.b.clone().ok_or_else(|| usage("--family multicyclic requires --B"))?,
        },
        "unit_fraction_primes" => FamilySpec::UnitFractionPrimes {
            count: c.count.ok_or_else(|| usage("--family unit_fraction_primes requires --count"))?,
        },
        "explicit" => return Err(usage("use --atoms for an explicit monoid")),
        other => return Err(usage(format!("unknown family {other:?}"))),
    })
}

/// A finitely generated monoid for the one-shot subcommands. Infinite
/// streams are cut at `cut` when one is given (exact for elements up to it),
/// otherwise at the first `depth` atoms.
fn resolve_monoid(
    spec: &FamilySpec,
    cut: Option<&Rat>,
    depth: usize,
    limits: &Limits,
    notes: &mut Vec<String>,
) -> Result<Normalized> {
    if let FamilySpec::Explicit { atoms } = spec {
        return normalize_with(atoms, limits);
    }
    let stream: AtomStream = spec.stream()?;
    if let Some(len) = stream.len() {
        return normalize_with(&stream.prefix(len)?, limits);
    }
    if let Some(x) = cut {
        if stream.meta.ascending {
            notes.push(format!("stream truncated to atoms <= {x}"));
            return truncated_monoid(&stream, x, limits);
        }
    }
    notes.push(format!("infinite stream: using its first {depth} atoms"));
    normalize_with(&stream.prefix(depth)?, limits)
}

fn execute(cmd: Command) -> std::result::Result<String, Failure> {
    let limits = Limits::from_env()?;
    let (c, report, mut notes) = match cmd {
        Command::Approx(c) => {
            let (report, notes) = approx(&c, &limits)?;
            (c, report, notes)
        }
        Command::Atoms(c) => {
            let mut notes = Vec::new();
            let n = resolve_monoid(&family_spec(&c)?, None, c.depth, &limits, &mut notes)?;
            (c, Report::Atoms(AtomsReport::from(&n)), notes)
        }
        Command::Lengths(c) => {
            let x = c.x.clone().ok_or_else(|| usage("lengths requires --x"))?;
            let mut notes = Vec::new();
            let n = resolve_monoid(&family_spec(&c)?, Some(&x), c.depth, &limits, &mut notes)?;
            let m = &n.monoid;
            let l = m.length_set(&x, &limits)?;
            let factorizations = if c.show_factorizations {
                Some(
                    m.factorizations(&x, &limits)?
                        .into_iter()
                        .map(|z| z.counts)
                        .collect(),
                )
            } else {
                None
            };
            let rep = LengthsReport {
                delta: l.deltas(),
                rho: l.elasticity().map(Into::into),
                member: !l.is_empty(),
                lengths: l.as_slice().to_vec(),
                factorizations,
            };
            if c.show_factorizations {
                notes.push(format!(
                    "factorizations are count vectors over atoms [{}]",
                    join(m.atoms())
                ));
            }
            (c, Report::Lengths(rep), notes)
        }
        Command::Delta(c) => {
            let mut notes = Vec::new();
            let spec = family_spec(&c)?;
            let report = match &c.x {
                Some(x) => {
                    let n = resolve_monoid(&spec, Some(x), c.depth, &limits, &mut notes)?;
                    let d = n.monoid.delta_of_element(x, &limits)?;
                    Report::ElementDelta(ElementDeltaReport {
                        x: x.clone(),
                        member: d.is_some(),
                        delta: d.unwrap_or_default(),
                    })
                }
                None => {
                    let n = resolve_monoid(&spec, c.bound.as_ref(), c.depth, &limits, &mut notes)?;
                    let bound = c.bound.clone().unwrap_or_else(|| default_delta_bound(&n.monoid));
                    Report::Delta(invariants::monoid_delta_bounded(&n.monoid, &bound, &limits)?)
                }
            };
            (c, report, notes)
        }
        Command::Elasticity(c) => {
            let mut notes = Vec::new();
            let spec = family_spec(&c)?;
            let report = match &c.x {
                Some(x) => {
                    let n = resolve_monoid(&spec, Some(x), c.depth, &limits, &mut notes)?;
                    let rho = n.monoid.elasticity_of_element(x, &limits)?;
                    Report::ElementElasticity(ElementElasticityReport {
                        x: x.clone(),
                        member: rho.is_some(),
                        rho,
                    })
                }
                None => {
                    let n = resolve_monoid(&spec, None, c.depth, &limits, &mut notes)?;
                    Report::Elasticity(invariants::monoid_elasticity(
                        &n.monoid,
                        c.bound.as_ref(),
                        &limits,
                    )?)
                }
            };
            (c, report, notes)
        }
        Command::Union(c) => {
            let n_len = c.n.ok_or_else(|| usage("union requires --n"))?;
            let mut notes = Vec::new();
            let n = resolve_monoid(&family_spec(&c)?, None, c.depth, &limits, &mut notes)?;
            let rep = invariants::union_of_lengths(&n.monoid, n_len, &limits)?;
            (c, Report::Union(rep), notes)
        }
    };
    let mut out = render(&report, c.format)?;
    if c.format == Format::Table {
        for note in notes.drain(..) {
            let _ = writeln!(out, "note: {note}");
        }
    }
    Ok(out)
}

fn approx(c: &Common, limits: &Limits) -> std::result::Result<(Report, Vec<String>), Failure> {
    let stream = family_spec(c)?.stream()?;
    let opts = SweepOptions {
        window: c.window,
        limits: *limits,
        ..SweepOptions::default()
    };
    let invariant = c.invariant.unwrap_or(if c.x.is_some() {
        Invariant::Lengths
    } else {
        Invariant::Elasticity
    });
    let rep = match invariant {
        Invariant::Lengths => {
            let x = c.x.as_ref().ok_or_else(|| usage("--invariant lengths requires --x"))?;
            approx_length_set(&stream, x, c.depth, &opts)?
        }
        Invariant::Elasticity => approx_elasticity(&stream, c.depth, c.x.as_ref(), &opts)?,
        Invariant::LocalElasticity => {
            let n = c.n.ok_or_else(|| usage("--invariant local-elasticity requires --n"))?;
            approx_local_elasticity(&stream, n, c.depth, &opts)?
        }
        Invariant::Delta => approx_delta(&stream, c.depth, c.x.as_ref(), c.bound.as_ref(), &opts)?,
    };
    Ok((Report::Approx(Box::new(rep)), Vec::new()))
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn set(xs: &[u64]) -> String {
    format!("{{{}}}", join(xs))
}

fn approx_decimal(q: &Rat) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{q} (≈ {:.6})", q.to_f64())
    }
}

fn render(report: &Report, format: Format) -> std::result::Result<String, Failure> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string(report).expect("reports always serialize");
            s.push('\n');
            Ok(s)
        }
        Format::Table => Ok(render_table(report)),
        Format::Csv => render_csv(report).map_err(|e| usage(format!("csv output failed: {e}"))),
    }
}

fn render_table(report: &Report) -> String {
    let mut s = String::new();
    match report {
        Report::Atoms(a) => {
            let _ = writeln!(s, "atoms      {}", join(&a.atoms));
            let _ = writeln!(s, "scale      {}", a.scale);
            let _ = writeln!(s, "integer    {}", join(&a.gens_int));
            let _ = writeln!(s, "content    {}", a.content);
            if !a.eliminated.is_empty() {
                let _ = writeln!(s, "eliminated {}", join(&a.eliminated));
            }
            if !a.duplicates.is_empty() {
                let _ = writeln!(s, "duplicates {}", join(&a.duplicates));
            }
            if a.trivial {
                let _ = writeln!(s, "note: empty generator list, the monoid is {{0}}");
            }
        }
        Report::Lengths(l) => {
            if !l.member {
                let _ = writeln!(s, "not a member of the monoid");
            }
            let _ = writeln!(s, "L      {}", set(&l.lengths));
            let _ = writeln!(s, "delta  {}", set(&l.delta));
            if let Some(rho) = &l.rho {
                let text = rho.finite().map_or_else(|| rho.to_string(), approx_decimal);
                let _ = writeln!(s, "rho    {text}");
            }
            if let Some(zs) = &l.factorizations {
                let _ = writeln!(s, "factorizations ({})", zs.len());
                for z in zs {
                    let _ = writeln!(s, "  {:?}", z);
                }
            }
        }
        Report::ElementDelta(d) => {
            if !d.member {
                let _ = writeln!(s, "{} is not a member of the monoid", d.x);
            }
            let _ = writeln!(s, "delta({})  {}", d.x, set(&d.delta));
        }
        Report::Delta(d) => {
            let _ = writeln!(s, "delta (elements <= {}, not exact)  {}", approx_decimal(&d.bound), set(&d.deltas));
            for w in &d.witnesses {
                let _ = writeln!(s, "  d = {}: x = {}, lengths {} and {}", w.d, w.x, w.l, w.l + w.d);
            }
        }
        Report::ElementElasticity(e) => match &e.rho {
            Some(rho) => {
                let text = rho.finite().map_or_else(|| rho.to_string(), approx_decimal);
                let _ = writeln!(s, "rho({})  {text}", e.x);
            }
            None => {
                let _ = writeln!(s, "{} is not a member of the monoid", e.x);
            }
        },
        Report::Elasticity(e) => {
            let text = e.value.finite().map_or_else(|| e.value.to_string(), approx_decimal);
            let _ = writeln!(s, "rho       {text}");
            match &e.witness {
                Some(w) => {
                    let _ = writeln!(s, "accepted  yes, witness x = {w}");
                }
                None => {
                    let _ = writeln!(s, "accepted  no witness found below {}", e.search_bound);
                }
            }
        }
        Report::Union(u) => {
            let _ = writeln!(s, "U_{}      {}", u.n, set(&u.members));
            let _ = writeln!(s, "rho_{}    {}", u.n, u.rho_n);
            let _ = writeln!(s, "lambda_{} {}", u.n, u.lambda_n);
        }
        Report::Approx(a) => {
            let _ = writeln!(s, "{} sweep, chain {}", a.kind, a.valid);
            for step in &a.steps {
                let member = match step.member {
                    Some(false) => "  (x not in N_i)",
                    _ => "",
                };
                let _ = writeln!(s, "  i={:<3} {:<24} atoms {}{member}", step.i, step.value.to_string(), join(&step.atoms));
            }
            let le = &a.limit_estimate;
            if let Some(v) = &le.value {
                let _ = writeln!(s, "limit estimate  {v}");
            }
            let status = match &le.stabilization {
                Stabilization::Stabilized { at } => format!("stabilized at step {at}"),
                Stabilization::Increasing => "increasing".into(),
                Stabilization::Varying => "varying".into(),
                Stabilization::Insufficient => "insufficient data".into(),
            };
            let _ = writeln!(s, "status          {status} (window {})", le.window);
            if let Some(d) = &le.divergence {
                if d.suspected {
                    let _ = writeln!(
                        s,
                        "divergence      suspected{}",
                        d.side_condition.as_ref().map(|c| format!("; {c}")).unwrap_or_default()
                    );
                }
            }
            if let Some(li) = &le.liminf_estimate {
                let _ = writeln!(s, "liminf estimate {}", set(li));
            }
            if let Some(ls) = &le.limsup_estimate {
                let _ = writeln!(s, "limsup estimate {}", set(ls));
            }
            if let Some(c) = &le.containment {
                let _ = writeln!(s, "note: {c}");
            }
            for n in &a.notes {
                let _ = writeln!(s, "note: {n}");
            }
        }
    }
    s
}

fn render_csv(report: &Report) -> std::result::Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match report {
        Report::Approx(a) => {
            w.write_record(["i", "atoms", "value", "member"])?;
            for step in &a.steps {
                let member = step.member.map(|m| m.to_string()).unwrap_or_default();
                w.write_record([
                    step.i.to_string(),
                    step.atoms.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
                    step.value.to_string(),
                    member,
                ])?;
            }
        }
        other => {
            w.write_record(["key", "value"])?;
            let value = serde_json::to_value(other).expect("reports always serialize");
            if let serde_json::Value::Object(map) = value {
                for (k, v) in map {
                    let text = match v {
                        serde_json::Value::String(s) => s,
                        v => v.to_string(),
                    };
                    w.write_record([k, text])?;
                }
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}
