mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use report::{Envelope, InputDigest};
use supcheck_core::annotations::bind_lenient;
use supcheck_core::criterion::{check_binding, generate_obligations, render_point, BrotherlyReport, Overall};
use supcheck_core::interp::{execute, numeral_decode, value_of_term, ExecConfig, Frame, RuntimeFault, Trace};
use supcheck_core::lang::{flatten, well_formed, Diagnostics, Program, Severity};
use supcheck_core::maxpoly::{CompareConfig, CompareVerdict};
use supcheck_core::parser::{parse_annotations, parse_maxpoly, parse_program, parse_term, pretty_print, AnnotationSet};
use supcheck_core::validator::{validate, GrowthConfig, GrowthVerdict, ValidateConfig, ValidationReport};

#[derive(Parser)]
#[command(name = "supcheck", version, about = "Polynomial size bounds for a small object-oriented language")]
struct Cli {
    /// Print the JSON report envelope instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the annotations against every weighted command of main.
    Check(CheckArgs),
    /// Print the inequalities to prove, without checking them.
    Obligations(CheckArgs),
    /// Execute main from an initial store.
    Run(RunArgs),
    /// Test the annotations and the size growth on sampled runs.
    Validate(ValidateArgs),
    /// Rewrite nested calls in main into outermost ones.
    Flatten {
        program: PathBuf,
    },
}

#[derive(Args, Clone, Serialize)]
struct CompareArgs {
    /// Seed for every sampler.
    #[arg(long, env = "SUPCHECK_SEED", default_value_t = 0)]
    seed: u64,
    /// Random points per inequality, or sampled runs per validator test.
    #[arg(long)]
    samples: Option<usize>,
    /// Upper end of the random sampling box.
    #[arg(long, default_value_t = 1000)]
    bound: u64,
}

impl CompareArgs {
    fn compare(&self) -> CompareConfig {
        CompareConfig {
            bound: self.bound,
            samples: self.samples.unwrap_or(1000),
            seed: self.seed,
            ..CompareConfig::default()
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    program: PathBuf,
    annotations: PathBuf,
    #[command(flatten)]
    compare: CompareArgs,
}

#[derive(Args)]
struct RunArgs {
    program: PathBuf,
    /// Initial value `ATTR=TERM`; a decimal term is a numeral.
    #[arg(long = "set", value_name = "ATTR=TERM")]
    set: Vec<String>,
    /// Budget of method calls and loop iterations.
    #[arg(long, default_value_t = 1_000_000)]
    fuel: u64,
    /// Attach the per-command trace.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct ValidateArgs {
    program: PathBuf,
    annotations: PathBuf,
    #[command(flatten)]
    compare: CompareArgs,
    /// Input scales: `A..B` doubles from A up to B, or a comma list.
    #[arg(long, default_value = "2..256")]
    scales: String,
    /// Attributes set to the scale numeral (comma separated).
    #[arg(long)]
    inputs: Option<String>,
    /// Polynomial over the main attributes bounding every final size.
    #[arg(long)]
    candidate: Option<String>,
    /// Budget per sampled run and per scale point.
    #[arg(long, default_value_t = 1_000_000)]
    fuel: u64,
    /// Largest numeral drawn by the samplers.
    #[arg(long, default_value_t = 100)]
    max_numeral: u64,
}

/// A pipeline stage that stops the command.
struct Fail {
    status: &'static str,
    message: String,
    payload: Value,
}

impl Fail {
    fn new(status: &'static str, message: impl Into<String>) -> Self {
        Fail {
            status,
            message: message.into(),
            payload: Value::Null,
        }
    }

    fn with(mut self, payload: impl Serialize) -> Self {
        self.payload = serde_json::to_value(payload).expect("serializable");
        self
    }
}

const EXIT_ERROR: i32 = 3;

struct Ctx {
    env: Envelope,
    text: Vec<String>,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> Result<String, Fail> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| Fail::new("io_error", format!("{}: {e}", path.display())))?;
        self.env.inputs.push(InputDigest::of(path, &s));
        Ok(s)
    }

    fn program(&mut self, path: &Path) -> Result<Program, Fail> {
        let src = self.read(path)?;
        parse_program(&src, &path.display().to_string())
            .map_err(|e| Fail::new("parse_error", e.to_string()).with(&e))
    }

    fn annotations(&mut self, path: &Path) -> Result<AnnotationSet, Fail> {
        let src = self.read(path)?;
        let a = parse_annotations(&src, &path.display().to_string())
            .map_err(|e| Fail::new("parse_error", e.to_string()).with(&e))?;
        self.env.known_discrepancies = a.discrepancies.clone();
        Ok(a)
    }

    /// Errors stop the pipeline; warnings are echoed.
    fn well_formed(&mut self, p: &Program) -> Result<Diagnostics, Fail> {
        let d = well_formed(p);
        if d.has_errors() {
            let lines: Vec<String> = d.iter().map(|x| x.to_string()).collect();
            return Err(Fail::new("ill_formed", lines.join("\n")).with(&d));
        }
        for w in d.iter().filter(|x| x.severity == Severity::Warning) {
            self.text.push(format!("warning: {w}"));
        }
        Ok(d)
    }

    fn say(&mut self, line: impl Into<String>) {
        self.text.push(line.into());
    }
}

fn verdict_word(v: &CompareVerdict) -> &'static str {
    match v {
        CompareVerdict::Verified => "verified",
        CompareVerdict::Falsified(_) => "falsified",
        CompareVerdict::Unknown => "unknown",
    }
}

fn describe_check(ctx: &mut Ctx, r: &BrotherlyReport) {
    ctx.say(format!("verdict: {}", r.overall.name()));
    ctx.say(format!("obligations: {}", r.obligations.len()));
    for c in &r.obligations {
        let o = &c.obligation;
        ctx.say(format!("  [{}] {}  {}", o.label, o.render(), verdict_word(&c.verdict)));
        if let CompareVerdict::Falsified(w) = &c.verdict {
            ctx.say(format!("      at {}: {} < {}", render_point(&w.point), w.lhs, w.rhs));
        }
    }
    match &r.overall {
        Overall::NotBrotherly { reasons } => reasons.iter().for_each(|x| ctx.say(format!("  reason: {x}"))),
        Overall::Inconclusive { unknowns } => unknowns
            .iter()
            .for_each(|x| ctx.say(format!("  undecided: {x} (raise --samples or review by hand)"))),
        Overall::Brotherly => {}
    }
    if let Some(c) = &r.claim {
        ctx.say(format!("claim: {c}"));
    }
    for w in &r.warnings {
        ctx.say(format!("warning: {w}"));
    }
}

fn cmd_check(ctx: &mut Ctx, a: &CheckArgs) -> Result<(), Fail> {
    let p = ctx.program(&a.program)?;
    let ann = ctx.annotations(&a.annotations)?;
    let diags = ctx.well_formed(&p)?;
    let cfg = a.compare.compare();
    let b = bind_lenient(&ann, &p, &cfg).map_err(|e| Fail::new("bind_error", e.to_string()).with(&e))?;
    let r = check_binding(&p, &b, &cfg).map_err(|e| Fail::new("obligation_error", e.to_string()).with(&e))?;
    describe_check(ctx, &r);
    let code = match r.overall {
        Overall::Brotherly => 0,
        Overall::NotBrotherly { .. } => 1,
        Overall::Inconclusive { .. } => 2,
    };
    let status = r.overall.name();
    let payload = json!({ "diagnostics": diags, "report": r });
    finish(ctx, status, code, payload);
    Ok(())
}

fn cmd_obligations(ctx: &mut Ctx, a: &CheckArgs) -> Result<(), Fail> {
    let p = ctx.program(&a.program)?;
    let ann = ctx.annotations(&a.annotations)?;
    ctx.well_formed(&p)?;
    let b = bind_lenient(&ann, &p, &a.compare.compare()).map_err(|e| Fail::new("bind_error", e.to_string()).with(&e))?;
    let obs = generate_obligations(&p, &b).map_err(|e| Fail::new("obligation_error", e.to_string()).with(&e))?;
    for o in &obs {
        let sites: Vec<String> = o.provenance.iter().map(|pv| format!("{} `{}`", pv.span, pv.expression)).collect();
        ctx.say(format!("[{}] {}", o.label, o.render()));
        ctx.say(format!("    from {}", sites.join(", ")));
    }
    if obs.is_empty() {
        ctx.say("no obligations");
    }
    finish(ctx, "ok", 0, json!({ "obligations": obs }));
    Ok(())
}

#[derive(Serialize)]
struct StoreEntry {
    attribute: String,
    term: String,
    size: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    numeral: Option<String>,
}

#[derive(Serialize)]
struct RunPayload {
    initial: Vec<StoreEntry>,
    /// Attributes not given with `--set`, started at the zero numeral.
    defaulted: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_store: Option<Vec<StoreEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fault: Option<RuntimeFault>,
    steps: u64,
    calls: u64,
    peak_sizes: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Trace>,
}

fn store(p: &Program, f: &Frame) -> Vec<StoreEntry> {
    f.attrs
        .iter()
        .map(|(a, v)| StoreEntry {
            attribute: a.clone(),
            term: v.display_bounded(10_000),
            size: v.size(),
            numeral: numeral_decode(v, &p.numerals).ok().map(|n| n.to_string()),
        })
        .collect()
}

fn cmd_run(ctx: &mut Ctx, a: &RunArgs) -> Result<(), Fail> {
    if a.fuel == 0 {
        return Err(Fail::new("usage_error", "--fuel must be positive"));
    }
    let p = ctx.program(&a.program)?;
    let diags = well_formed(&p);
    for d in diags.iter() {
        ctx.say(format!("{}: {d}", if d.severity == Severity::Error { "error" } else { "warning" }));
    }
    let mut bindings = Vec::new();
    for s in &a.set {
        let (attr, term) = s
            .split_once('=')
            .ok_or_else(|| Fail::new("usage_error", format!("--set expects ATTR=TERM, got `{s}`")))?;
        let attr = attr.trim();
        if !p.main.attributes.iter().any(|x| x == attr) {
            return Err(Fail::new("usage_error", format!("`{attr}` is not an attribute of main")));
        }
        let t = parse_term(term).map_err(|e| Fail::new("parse_error", e.to_string()))?;
        let v = value_of_term(&t, &p).map_err(|e| Fail::new("usage_error", e.to_string()))?;
        bindings.push((attr.to_string(), v));
    }
    let defaulted: Vec<String> = p
        .main
        .attributes
        .iter()
        .filter(|x| !bindings.iter().any(|(b, _)| b == *x))
        .cloned()
        .collect();
    let init = Frame::for_main(&p, bindings);
    let cfg = ExecConfig {
        fuel: a.fuel,
        trace: true,
        ..ExecConfig::default()
    };
    let run = execute(&p, init.clone(), &cfg);
    let mut payload = RunPayload {
        initial: store(&p, &init),
        defaulted,
        final_store: None,
        fault: None,
        steps: run.trace.steps,
        calls: run.trace.calls,
        peak_sizes: run.trace.peak_sizes.clone(),
        trace: None,
    };
    if a.trace {
        for e in &run.trace.events {
            ctx.say(format!("  step {:>6} {:<10} sizes {:?}", e.step, e.path.to_string(), e.sizes));
        }
        payload.trace = Some(run.trace.clone());
    }
    match run.outcome {
        Ok(f) => {
            let fs = store(&p, &f);
            for e in &fs {
                match &e.numeral {
                    Some(n) => ctx.say(format!("{} = {} (numeral {n}, size {})", e.attribute, e.term, e.size)),
                    None => ctx.say(format!("{} = {} (size {})", e.attribute, e.term, e.size)),
                }
            }
            payload.final_store = Some(fs);
            finish(ctx, "ok", 0, payload);
        }
        Err(fault) => {
            ctx.say(format!("runtime fault: {fault}"));
            payload.fault = Some(fault);
            finish(ctx, "runtime_fault", EXIT_ERROR, payload);
        }
    }
    Ok(())
}

fn parse_scales(s: &str) -> Result<Vec<u64>, Fail> {
    let bad = || Fail::new("usage_error", format!("bad --scales `{s}`"));
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
        if lo == 0 || lo > hi {
            return Err(bad());
        }
        let mut out = vec![lo];
        while let Some(n) = out.last().unwrap().checked_mul(2).filter(|n| *n <= hi) {
            out.push(n);
        }
        Ok(out)
    } else {
        s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
    }
}

fn describe_validation(ctx: &mut Ctx, r: &ValidationReport) {
    let line = |o: &supcheck_core::validator::Outcome| {
        let mut s = format!(
            "{}: {} ({} passed, {} failed, {} inconclusive of {})",
            o.name,
            if o.failed == 0 { "pass" } else { "fail" },
            o.passed,
            o.failed,
            o.inconclusive,
            o.samples
        );
        if let Some(c) = &o.counterexample {
            s += &format!("\n    sample {}: {} with inputs [{}]: bound {} < observed {}", c.sample, c.what, c.inputs.join(", "), c.bound, c.observed);
        }
        s
    };
    ctx.say(line(&r.lemma1));
    for o in r.supinterp.iter().chain(&r.lemma2) {
        ctx.say(line(o));
    }
    if let Some(g) = &r.growth {
        let v = match &g.verdict {
            GrowthVerdict::PolyConsistent { degree } => format!("poly_consistent (degree {degree})"),
            GrowthVerdict::SuperPolySuspect { reason } => format!("super_poly_suspect: {reason}"),
            GrowthVerdict::Insufficient { points } => format!("insufficient ({points} points)"),
        };
        ctx.say(format!("growth: {v}"));
        for pt in &g.points {
            ctx.say(format!(
                "    scale {:>5}: max final size {}, peak {}, steps {}",
                pt.scale, pt.max_final, pt.peak, pt.steps
            ));
        }
        if let Some(t) = &g.truncated {
            ctx.say(format!("    stopped at scale {}: {}", t.scale, t.fault));
        }
        if let Some(h) = g.candidate_holds {
            ctx.say(format!("    candidate bound {}", if h { "holds" } else { "fails" }));
        }
        ctx.say("    (a growth fit is evidence, not proof)");
    }
    if let Some(e) = &r.growth_error {
        ctx.say(format!("growth: {e}"));
    }
    ctx.say(format!("validation: {}", if r.pass { "pass" } else { "fail" }));
}

fn cmd_validate(ctx: &mut Ctx, a: &ValidateArgs) -> Result<(), Fail> {
    let p = ctx.program(&a.program)?;
    let ann = ctx.annotations(&a.annotations)?;
    ctx.well_formed(&p)?;
    let b = bind_lenient(&ann, &p, &a.compare.compare()).map_err(|e| Fail::new("bind_error", e.to_string()).with(&e))?;
    let candidate = a
        .candidate
        .as_deref()
        .map(parse_maxpoly)
        .transpose()
        .map_err(|e| Fail::new("parse_error", e.to_string()))?;
    let inputs = a
        .inputs
        .as_deref()
        .map(|s| s.split(',').map(|x| x.trim().to_string()).collect())
        .unwrap_or_default();
    let exec = ExecConfig {
        fuel: a.fuel,
        trace: false,
        ..ExecConfig::default()
    };
    let cfg = ValidateConfig {
        seed: a.compare.seed,
        samples: a.compare.samples.unwrap_or(1000),
        max_numeral: a.max_numeral,
        exec: exec.clone(),
        growth: GrowthConfig {
            scales: parse_scales(&a.scales)?,
            inputs,
            candidate,
            exec: ExecConfig { trace: true, ..exec },
            ..GrowthConfig::default()
        },
        ..ValidateConfig::default()
    };
    let r = validate(&p, &b, &cfg);
    describe_validation(ctx, &r);
    let (status, code) = if r.pass { ("pass", 0) } else { ("fail", 1) };
    finish(ctx, status, code, &r);
    Ok(())
}

fn cmd_flatten(ctx: &mut Ctx, program: &Path) -> Result<(), Fail> {
    let p = ctx.program(program)?;
    let f = flatten(&p).map_err(|e| Fail::new("flatten_error", e.to_string()))?;
    let src = pretty_print(&f);
    ctx.say(src.trim_end().to_string());
    finish(ctx, "ok", 0, json!({ "source": src }));
    Ok(())
}

fn finish(ctx: &mut Ctx, status: &str, code: i32, payload: impl Serialize) {
    let env = std::mem::replace(&mut ctx.env, Envelope::new("", Value::Null));
    ctx.env = env.finish(status, code, payload);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, config) = match &cli.cmd {
        Cmd::Check(a) | Cmd::Obligations(a) => (
            if matches!(cli.cmd, Cmd::Check(_)) { "check" } else { "obligations" },
            json!({ "compare": a.compare.compare() }),
        ),
        Cmd::Run(a) => ("run", json!({ "set": a.set, "fuel": a.fuel, "trace": a.trace })),
        Cmd::Validate(a) => (
            "validate",
            json!({
                "seed": a.compare.seed,
                "samples": a.compare.samples.unwrap_or(1000),
                "scales": a.scales,
                "inputs": a.inputs,
                "candidate": a.candidate,
                "fuel": a.fuel,
                "max_numeral": a.max_numeral,
            }),
        ),
        Cmd::Flatten { .. } => ("flatten", Value::Null),
    };
    let mut ctx = Ctx {
        env: Envelope::new(name, config),
        text: Vec::new(),
    };
    let result = match &cli.cmd {
        Cmd::Check(a) => cmd_check(&mut ctx, a),
        Cmd::Obligations(a) => cmd_obligations(&mut ctx, a),
        Cmd::Run(a) => cmd_run(&mut ctx, a),
        Cmd::Validate(a) => cmd_validate(&mut ctx, a),
        Cmd::Flatten { program } => cmd_flatten(&mut ctx, program),
    };
    if let Err(f) = result {
        ctx.say(format!("error: {}", f.message));
        let payload = json!({ "error": f.status, "message": f.message, "detail": f.payload });
        finish(&mut ctx, f.status, EXIT_ERROR, payload);
    }
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&ctx.env).expect("envelope serializes"));
    } else {
        for d in &ctx.env.known_discrepancies {
            ctx.text.push(format!("known discrepancy: {d}"));
        }
        let (out, err): (Vec<&String>, Vec<&String>) = ctx.text.iter().partition(|l| !l.starts_with("error:"));
        for l in out {
            println!("{l}");
        }
        for l in err {
            eprintln!("{l}");
        }
    }
    ExitCode::from(ctx.env.exit_code as u8)
}

#[cfg(test)]
mod tests {
    use super::parse_scales;

    #[test]
    fn scale_syntax() {
        assert_eq!(parse_scales("2..256").ok(), Some(vec![2, 4, 8, 16, 32, 64, 128, 256]));
        assert_eq!(parse_scales("3..20").ok(), Some(vec![3, 6, 12]));
        assert_eq!(parse_scales("1, 5,9").ok(), Some(vec![1, 5, 9]));
        assert!(parse_scales("0..8").is_err());
        assert!(parse_scales("a").is_err());
    }
}
