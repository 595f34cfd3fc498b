//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 mathematical negative (not a cocycle, obstructed,
//! violated law), 2 malformed input or size limit.

pub mod emit;
pub mod problem;

use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::algebra::{adjoint_bimodule, trivial_bimodule, verify_algebra, verify_bimodule, Bimodule};
use crate::cochain::{cochain_dim, Complex};
use crate::deform::{
    apply_gauge, obstruction, try_extend, trivialize, verify_deformation, ExtendOutcome, TrivializeOutcome,
};
use crate::error::{Error, Result};
use crate::exactlin::Matrix;
use crate::extensions::{
    classify_central, cocycle_defect, cocycle_from_section, extension_from_cocycle, induced_bimodule, verify_extension,
    TwoCocycle,
};
use crate::freecons::{induced_tensor_hder, universal_extension, word_label};
use crate::hder::verify_hder;
use crate::report::CheckReport;

pub use problem::{Limits, ModuleSource, Problem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "hderlab", version, about = "Exact cohomology, extensions and deformations of algebras with higher derivations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Io {
    /// Problem file (JSON); `-` reads standard input.
    pub file: PathBuf,
    /// Emit the JSON report instead of a summary.
    #[arg(long)]
    pub json: bool,
    /// Record wall-clock time in `timing_ms` (otherwise null, so reports stay byte-identical).
    #[arg(long)]
    pub timing: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficients {
    Adjoint,
    Trivial,
    File,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Verify the algebra, higher derivation and bimodule.
    Check {
        #[command(flatten)]
        io: Io,
    },
    /// Cohomology of the AssHDer complex in one degree.
    Cohomology {
        #[arg(long)]
        degree: usize,
        #[arg(long, value_enum)]
        coefficients: Option<Coefficients>,
        #[command(flatten)]
        io: Io,
    },
    /// Central extensions up to equivalence, one per class of H².
    ClassifyCentral {
        #[arg(long, value_enum)]
        coefficients: Option<Coefficients>,
        #[command(flatten)]
        io: Io,
    },
    /// Abelian extension built from a named 2-cocycle.
    ExtendAbelian {
        #[arg(long)]
        cocycle: Option<String>,
        #[command(flatten)]
        io: Io,
    },
    /// 2-cocycle of an extension with respect to a section.
    CocycleFromSection {
        #[command(flatten)]
        io: Io,
    },
    /// Check the deformation equations.
    DeformVerify {
        #[command(flatten)]
        io: Io,
    },
    /// Obstruction to extending the deformation by one order.
    DeformObstruct {
        #[command(flatten)]
        io: Io,
    },
    /// Extend the deformation order by order.
    DeformExtend {
        #[arg(long)]
        to: Option<usize>,
        #[command(flatten)]
        io: Io,
    },
    /// Gauge the deformation to the trivial one.
    DeformTrivialize {
        #[arg(long)]
        to: usize,
        #[command(flatten)]
        io: Io,
    },
    /// Induced higher derivation on the truncated tensor algebra.
    FreeTensor {
        #[arg(long)]
        degree: Option<usize>,
        #[command(flatten)]
        io: Io,
    },
}

impl Command {
    pub fn io(&self) -> &Io {
        match self {
            Command::Check { io }
            | Command::Cohomology { io, .. }
            | Command::ClassifyCentral { io, .. }
            | Command::ExtendAbelian { io, .. }
            | Command::CocycleFromSection { io }
            | Command::DeformVerify { io }
            | Command::DeformObstruct { io }
            | Command::DeformExtend { io, .. }
            | Command::DeformTrivialize { io, .. }
            | Command::FreeTensor { io, .. } => io,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Cohomology { .. } => "cohomology",
            Command::ClassifyCentral { .. } => "classify-central",
            Command::ExtendAbelian { .. } => "extend-abelian",
            Command::CocycleFromSection { .. } => "cocycle-from-section",
            Command::DeformVerify { .. } => "deform-verify",
            Command::DeformObstruct { .. } => "deform-obstruct",
            Command::DeformExtend { .. } => "deform-extend",
            Command::DeformTrivialize { .. } => "deform-trivialize",
            Command::FreeTensor { .. } => "free-tensor",
        }
    }

    /// Parses `<command> [flags…]` without a file argument (the problem is
    /// supplied separately); used by embedders.
    pub fn from_words<S: AsRef<str>>(command: &str, args: &[S]) -> Result<Command> {
        let argv = ["hderlab", command, "-"].into_iter().map(str::to_string).chain(args.iter().map(|s| s.as_ref().to_string()));
        Cli::try_parse_from(argv).map(|c| c.command).map_err(|e| Error::Parse(e.to_string().trim().to_string()))
    }
}

/// Machine-readable outcome of one command.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub ok: bool,
    pub command: String,
    pub results: Value,
    pub violations: Vec<Value>,
    pub timing_ms: Option<f64>,
    pub exit_code: i32,
}

impl Report {
    pub fn to_json(&self) -> Value {
        json!({
            "ok": self.ok,
            "command": self.command,
            "results": self.results,
            "violations": self.violations,
            "timing_ms": self.timing_ms,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("reports serialize")
    }

    fn from_error(command: &str, e: &Error) -> Report {
        let kind = match e {
            Error::Parse(_) => "parse",
            Error::Shape(_) => "shape",
            Error::TooLarge(_) => "size",
            Error::Precondition(_) => "precondition",
            Error::NotCocycle(_) => "not-a-cocycle",
            Error::BrokenComplex(_) => "broken-complex",
        };
        Report {
            ok: false,
            command: command.to_string(),
            results: Value::Null,
            violations: vec![json!({ "error": kind, "message": e.to_string() })],
            timing_ms: None,
            exit_code: if e.is_input_error() { EXIT_INPUT } else { EXIT_NEGATIVE },
        }
    }

    /// Short human summary.
    pub fn to_human(&self) -> String {
        let mut out = format!("{}: {}\n", self.command, if self.ok { "ok" } else { "FAILED" });
        if let Value::Object(m) = &self.results {
            for (k, v) in m {
                out.push_str(&format!("  {k}: {}\n", summarize(v)));
            }
        }
        for v in &self.violations {
            let line = match (v.get("law"), v.get("message")) {
                (Some(law), _) => format!(
                    "{} at {} : lhs {} != rhs {}",
                    law.as_str().unwrap_or("?"),
                    v["indices"],
                    v["lhs"],
                    v["rhs"]
                ),
                (_, Some(msg)) => msg.as_str().unwrap_or("?").to_string(),
                _ => v.to_string(),
            };
            out.push_str(&format!("  violation: {line}\n"));
        }
        if let Some(t) = self.timing_ms {
            out.push_str(&format!("  timing_ms: {t:.3}\n"));
        }
        out
    }
}

fn summarize(v: &Value) -> String {
    match v {
        Value::Array(items) if items.iter().all(|x| !x.is_array() && !x.is_object()) && items.len() <= 8 => v.to_string(),
        Value::Array(items) => format!("[{} items]", items.len()),
        Value::Object(m) => match m.get("ok") {
            Some(ok) => format!("ok={ok}"),
            None => format!("{{{}}}", m.keys().cloned().collect::<Vec<_>>().join(", ")),
        },
        other => other.to_string(),
    }
}

struct Outcome {
    ok: bool,
    results: Map<String, Value>,
    violations: Vec<Value>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { ok: true, results: Map::new(), violations: Vec::new() }
    }

    fn put(&mut self, key: &str, v: Value) {
        self.results.insert(key.to_string(), v);
    }

    fn absorb(&mut self, label: &str, r: &CheckReport) {
        self.put(label, emit::check_report(r));
        if let Some(v) = &r.first_violation {
            self.ok = false;
            let mut j = emit::violation(v);
            j["section"] = json!(label);
            self.violations.push(j);
        }
    }

    fn fail(&mut self, message: impl Into<String>) {
        self.ok = false;
        self.violations.push(json!({ "message": message.into() }));
    }
}

fn coefficient_module(p: &Problem, choice: Option<Coefficients>) -> Result<(ModuleSource, Bimodule)> {
    let (a, d) = p.pair()?;
    let choice = choice.unwrap_or(if p.bimodule.is_some() { Coefficients::File } else { Coefficients::Adjoint });
    match choice {
        Coefficients::Adjoint => Ok((ModuleSource::Adjoint, adjoint_bimodule(a, d))),
        Coefficients::Trivial => Ok((ModuleSource::Trivial, trivial_bimodule(a, 1, vec![Matrix::zeros(1, 1); d.rank()])?)),
        Coefficients::File => p.bimodule.clone().ok_or_else(|| Error::Parse("bimodule: missing".into())),
    }
}

fn guard_cochains(limits: &Limits, degree: usize, dim: usize, mdim: usize, rank: usize) -> Result<()> {
    let size = cochain_dim(degree, dim, mdim, rank);
    if size > limits.max_cochain_dim() {
        return Err(Error::TooLarge(format!(
            "C^{degree} has dimension {size}, above the cap {} derived from HDERLAB_MAX_DIM",
            limits.max_cochain_dim()
        )));
    }
    Ok(())
}

fn run_command(cmd: &Command, p: &Problem, limits: &Limits) -> Result<Outcome> {
    let mut out = Outcome::new();
    match cmd {
        Command::Check { .. } => {
            let (a, d) = p.pair()?;
            let ra = verify_algebra(a);
            out.absorb("algebra", &ra);
            out.absorb("hder", &verify_hder(a, d)?);
            if let Some((_, m)) = &p.bimodule {
                out.absorb("bimodule", &verify_bimodule(a, d, m)?);
            }
        }
        Command::Cohomology { degree, coefficients, .. } => {
            limits.check("degree", *degree)?;
            let (a, d) = p.verified_pair()?;
            let (src, m) = coefficient_module(p, *coefficients)?;
            guard_cochains(limits, degree + 1, a.dim(), m.mdim(), d.rank())?;
            let cx = Complex::new(a, d, &m)?;
            let h = cx.cohomology(*degree)?;
            out.put("coefficients", emit::bimodule(&src, &m));
            for (k, v) in emit::cohomology(&h).as_object().expect("object") {
                out.put(k, v.clone());
            }
        }
        Command::ClassifyCentral { coefficients, .. } => {
            let (a, d) = p.verified_pair()?;
            let (_, m) = coefficient_module(p, *coefficients)?;
            guard_cochains(limits, 3, a.dim(), m.mdim(), d.rank())?;
            let c = classify_central(a, d, &m)?;
            out.put("betti", json!(c.betti));
            out.put("class_count", json!(c.classes.len()));
            let classes: Vec<Value> = c
                .classes
                .iter()
                .map(|(z, e)| json!({ "cocycle": emit::two_cocycle(z), "extension": emit::extension(e) }))
                .collect();
            out.put("classes", Value::Array(classes));
        }
        Command::ExtendAbelian { cocycle, .. } => {
            let (a, d) = p.verified_pair()?;
            let (_, m) = coefficient_module(p, None)?;
            let c = p.cochain(cocycle.as_deref())?;
            let z = TwoCocycle::from_cochain(c)?;
            let cx = Complex::new(a, d, &m)?;
            if let Some(msg) = cocycle_defect(&cx, &z) {
                out.put("is_cocycle", json!(false));
                out.fail(format!("not a cocycle: {msg}"));
            } else {
                let e = extension_from_cocycle(a, d, &m, &z)?;
                out.put("is_cocycle", json!(true));
                out.put("is_coboundary", json!(cx.preimage(c)?.is_some()));
                out.put("extension", emit::extension(&e));
                out.absorb("verification", &verify_extension(&e)?);
            }
        }
        Command::CocycleFromSection { .. } => {
            p.verified_pair()?;
            let e = p.extension.as_ref().ok_or_else(|| Error::Parse("extension: missing".into()))?;
            let s = p.section.as_ref().unwrap_or(&e.section);
            let z = cocycle_from_section(e, s)?;
            let m = induced_bimodule(e)?;
            let cx = Complex::new(&e.base, &e.base_hder, &m)?;
            out.put("induced_bimodule", emit::explicit_bimodule(&m));
            out.put("cocycle", emit::two_cocycle(&z));
            match cocycle_defect(&cx, &z) {
                None => {
                    out.put("is_cocycle", json!(true));
                    out.put("is_coboundary", json!(cx.preimage(&z.to_cochain())?.is_some()));
                }
                Some(msg) => {
                    out.put("is_cocycle", json!(false));
                    out.fail(format!("not a cocycle: {msg}"));
                }
            }
        }
        Command::DeformVerify { .. } => {
            let (a, d) = p.verified_pair()?;
            let def = deformation(p)?;
            out.put("order", json!(def.order()));
            out.absorb("deformation", &verify_deformation(a, d, def)?);
        }
        Command::DeformObstruct { .. } => {
            let (a, d) = p.verified_pair()?;
            let def = deformation(p)?;
            guard_cochains(limits, 3, a.dim(), a.dim(), d.rank())?;
            let ob = obstruction(a, d, def)?;
            let m = adjoint_bimodule(a, d);
            let cx = Complex::new(a, d, &m)?;
            out.put("order", json!(def.order()));
            out.put("obstruction", emit::cochain(&ob));
            out.put("obstruction_is_cocycle", json!(cx.is_cocycle(&ob)));
            out.put("extensible", json!(cx.preimage(&ob)?.is_some()));
        }
        Command::DeformExtend { to, .. } => {
            let (a, d) = p.verified_pair()?;
            let mut def = deformation(p)?.clone();
            let target = to.unwrap_or(def.order() + 1);
            limits.check("target order", target)?;
            guard_cochains(limits, 3, a.dim(), a.dim(), d.rank())?;
            out.put("from_order", json!(def.order()));
            let mut candidates = Vec::new();
            let mut blocked = None;
            while def.order() < target {
                match try_extend(a, d, &def)? {
                    ExtendOutcome::Extended { candidate, deformation } => {
                        candidates.push(emit::cochain(&candidate));
                        def = deformation;
                    }
                    ExtendOutcome::Obstructed { obstruction, obstruction_is_cocycle } => {
                        blocked = Some(json!({
                            "order": def.order() + 1,
                            "obstruction": emit::cochain(&obstruction),
                            "obstruction_is_cocycle": obstruction_is_cocycle,
                        }));
                        break;
                    }
                }
            }
            out.put("reached_order", json!(def.order()));
            out.put("candidates", Value::Array(candidates));
            out.put("deformation", emit::deformation(&def));
            if let Some(b) = blocked {
                out.put("obstructed", b);
                out.fail(format!("obstructed at order {}", def.order() + 1));
            } else {
                out.absorb("verification", &verify_deformation(a, d, &def)?);
            }
        }
        Command::DeformTrivialize { to, .. } => {
            limits.check("target order", *to)?;
            let (a, d) = p.verified_pair()?;
            let def = deformation(p)?;
            guard_cochains(limits, 2, a.dim(), a.dim(), d.rank())?;
            match trivialize(a, d, def, *to)? {
                TrivializeOutcome::Trivialized { gauge } => {
                    let gauged = apply_gauge(&def.truncated(gauge.order()), &gauge)?;
                    out.put("order", json!(gauge.order()));
                    out.put("gauge", emit::gauge(&gauge));
                    out.put("trivial_after_gauge", json!(gauged.is_trivial()));
                }
                TrivializeOutcome::Blocked { order, class, gauge_so_far } => {
                    out.put("blocked_order", json!(order));
                    out.put("class", emit::cochain(&class));
                    out.put("gauge_so_far", emit::gauge(&gauge_so_far));
                    out.fail(format!("order-{order} coefficient is a non-trivial class in H²"));
                }
            }
        }
        Command::FreeTensor { degree, .. } => {
            let t = p.tensor.as_ref().ok_or_else(|| Error::Parse("tensor: missing".into()))?;
            let deg = degree.or(t.degree).ok_or_else(|| Error::Parse("free-tensor needs --degree or tensor.degree".into()))?;
            limits.check("tensor degree", deg)?;
            let words = (0..=deg).map(|l| t.vdim.pow(l as u32)).sum::<usize>();
            if words > limits.max_cochain_dim() {
                return Err(Error::TooLarge(format!("truncated tensor algebra has {words} basis words")));
            }
            let (tta, induced) = induced_tensor_hder(t.vdim, deg, &t.thetas)?;
            out.put("vdim", json!(t.vdim));
            out.put("degree", json!(deg));
            out.put("basis", json!(tta.words().iter().map(|w| word_label(w)).collect::<Vec<_>>()));
            out.put("maps", emit::matrices(induced.maps()));
            out.absorb("hder", &verify_hder(tta.algebra(), &induced)?);
            if let Some(f) = &t.f {
                let (a, d) = p.pair()?;
                let (rep, ext) = universal_extension(&tta, &t.thetas, a, d, f)?;
                out.put("extension_map", emit::matrix(&ext));
                out.absorb("universal_extension", &rep);
            }
        }
    }
    Ok(out)
}

fn deformation(p: &Problem) -> Result<&crate::deform::Deformation> {
    p.deformation.as_ref().ok_or_else(|| Error::Parse("deformation: missing".into()))
}

/// Runs a command on an already-parsed problem.
pub fn run_problem(cmd: &Command, p: &Problem, limits: &Limits) -> Report {
    let started = Instant::now();
    let mut report = match run_command(cmd, p, limits) {
        Ok(o) => Report {
            ok: o.ok,
            command: cmd.name().to_string(),
            results: Value::Object(o.results),
            violations: o.violations,
            timing_ms: None,
            exit_code: if o.ok { EXIT_OK } else { EXIT_NEGATIVE },
        },
        Err(e) => Report::from_error(cmd.name(), &e),
    };
    if cmd.io().timing {
        report.timing_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    report
}

/// Parses `text` and runs `cmd` on it.
pub fn run_text(cmd: &Command, text: &str, limits: &Limits) -> Report {
    match Problem::parse(text, limits) {
        Ok(p) => run_problem(cmd, &p, limits),
        Err(e) => Report::from_error(cmd.name(), &e),
    }
}

fn read_input(path: &PathBuf) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cmd = &cli.command;
    let report = match Limits::from_env().and_then(|limits| read_input(&cmd.io().file).map(|t| (t, limits))) {
        Ok((text, limits)) => run_text(cmd, &text, &limits),
        Err(e) => Report::from_error(cmd.name(), &e),
    };
    if cmd.io().json {
        println!("{}", report.to_json_string());
    } else {
        print!("{}", report.to_human());
    }
    report.exit_code
}
