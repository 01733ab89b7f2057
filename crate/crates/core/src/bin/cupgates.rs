use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cupgates::code::CssCode;
use cupgates::data::resolve_complex;
use cupgates::grpcoh::{cohomology_counts, shipped_boundary_scripts, u1_cohomology_orders, BoundaryScript, FiniteAbelianGroup};
use cupgates::homology::{betti_numbers, integral_homology};
use cupgates::ringeval::{ring_evaluate, shipped_scenarios, CohomologyRing, FlatConnection};
use cupgates::scenarios::{filtered_catalog, run_scenario};
use cupgates::synth::{synthesize_diagonal, Constants, GateExpression};
use cupgates::verify::logical::cohomology_generators;
use cupgates::verify::{
    brute_force_oracle, cartan_suite, check_circuit_commutation, extract_logical_action, pontryagin_property_suite,
    steenrod_suite, CheckOptions, OracleOp,
};
use cupgates::{CellComplex, Cochain, Error};

/// Homological codes, cup-product gates and their verification.
#[derive(Parser)]
#[command(name = "cupgates", version)]
struct Cli {
    /// Also write the report as JSON to this file.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load or build a complex and validate it.
    Build(ComplexArg),
    /// Integral homology, or Betti numbers mod a prime.
    Homology {
        #[command(flatten)]
        complex: ComplexArg,
        /// Prime for Betti numbers; integral homology when omitted.
        #[arg(long = "mod")]
        modulus: Option<u64>,
    },
    /// Synthesize the diagonal circuit of a gate expression.
    Synthesize(CodeArgs),
    /// Check commutation and extract the logical gate, for an expression or a shipped scenario.
    Verify {
        #[command(flatten)]
        code: OptionalCodeArgs,
        /// Run a shipped scenario instead.
        #[arg(long, conflicts_with_all = ["complex", "expr"])]
        scenario: Option<String>,
    },
    /// Randomized property suites.
    Suite {
        kind: SuiteKind,
        #[command(flatten)]
        complex: ComplexArg,
        #[arg(long, default_value_t = 25)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Coefficient modulus N (pontryagin).
        #[arg(long = "mod", default_value_t = 2)]
        modulus: u64,
        /// Power n (pontryagin).
        #[arg(long, default_value_t = 2)]
        power: usize,
    },
    /// Evaluate an expression in a presented cohomology ring.
    Ring {
        /// Ring such as cp2*cp2, cp4^4 or t3*rp5.
        #[arg(long, required_unless_present = "scenario")]
        ring: Option<String>,
        #[arg(long, required_unless_present = "scenario")]
        expr: Option<String>,
        /// Field `modulus:var=monomial,var=monomial`, once per field a0, a1, ...
        #[arg(long = "field")]
        fields: Vec<String>,
        /// Flat connection as a JSON file, instead of --field.
        #[arg(long, conflicts_with = "fields")]
        connection: Option<PathBuf>,
        /// Run a shipped ring scenario instead.
        #[arg(long, conflicts_with_all = ["ring", "expr"])]
        scenario: Option<String>,
    },
    /// Boundary-operation scripts and group cohomology counts.
    Boundary {
        /// Shipped script name or path to a script file.
        #[arg(long, required_unless_present = "group")]
        script: Option<String>,
        /// Count H^n(G; Z_M) for G given by comma-separated orders.
        #[arg(long, conflicts_with = "script")]
        group: Option<String>,
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[arg(long = "mod", default_value_t = 2)]
        modulus: u64,
        /// Also derive U(1) orders up to --degree.
        #[arg(long)]
        u1: bool,
    },
    /// List shipped scenarios, optionally running them.
    Scenarios {
        /// Substring of the name or title.
        #[arg(default_value = "")]
        filter: String,
        #[arg(long)]
        run: bool,
    },
    /// Logical matrix of a synthesized circuit by brute force (small codes only).
    Oracle(CodeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteKind {
    Pontryagin,
    Steenrod,
    Cartan,
}

#[derive(Args)]
struct ComplexArg {
    /// Shipped name (rp2, cp2, ...), t<n> for a triangulated torus,
    /// torus:<n>x<L> for a cubical one, or a JSON file.
    #[arg(long)]
    complex: String,
}

#[derive(Args)]
struct CodeArgs {
    #[arg(long)]
    complex: String,
    #[arg(long)]
    expr: String,
    #[arg(long = "mod", default_value_t = 2)]
    modulus: u64,
    #[arg(long, default_value_t = 1)]
    copies: usize,
    /// Form degree of the code; defaults to 1.
    #[arg(long, default_value_t = 1)]
    degree: usize,
    /// Constant cochain `name=file.json`.
    #[arg(long = "const")]
    consts: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct OptionalCodeArgs {
    #[arg(long, required_unless_present = "scenario")]
    complex: Option<String>,
    #[arg(long, required_unless_present = "scenario")]
    expr: Option<String>,
    #[arg(long = "mod", default_value_t = 2)]
    modulus: u64,
    #[arg(long, default_value_t = 1)]
    copies: usize,
    #[arg(long, default_value_t = 1)]
    degree: usize,
    #[arg(long = "const")]
    consts: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Lines for stdout, a JSON value for --json-out and the verdict.
struct Outcome {
    lines: Vec<String>,
    json: serde_json::Value,
    passed: bool,
}

impl Outcome {
    fn new(lines: Vec<String>, json: impl Serialize, passed: bool) -> Result<Outcome, Error> {
        Ok(Outcome {
            lines,
            json: serde_json::to_value(json).map_err(|e| Error::Input(e.to_string()))?,
            passed,
        })
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

/// Attaches the file name to positioned parse errors.
fn in_file<T>(path: &Path, r: Result<T, Error>) -> Result<T, Error> {
    r.map_err(|e| match e {
        Error::Parse { line, column, message } => {
            // serde_json repeats the position at the end of its messages
            let tail = format!(" at line {line} column {column}");
            let message = message.strip_suffix(&tail).unwrap_or(&message);
            Error::Parse {
                line,
                column,
                message: format!("{}:{line}:{column}: {message}", path.display()),
            }
        }
        other => other,
    })
}

fn complex(arg: &str) -> Result<Arc<CellComplex>, Error> {
    in_file(Path::new(arg), resolve_complex(arg))
}

fn constants(c: &Arc<CellComplex>, specs: &[String]) -> Result<Constants, Error> {
    let mut out = Constants::new();
    for s in specs {
        let (name, file) = s
            .split_once('=')
            .ok_or_else(|| Error::Input(format!("--const expects name=file, got \"{s}\"")))?;
        let path = Path::new(file);
        out.insert(name.to_string(), in_file(path, Cochain::from_json(c, &read(path)?))?);
    }
    Ok(out)
}

fn cmd_build(arg: &ComplexArg) -> Result<Outcome, Error> {
    let c = complex(&arg.complex)?;
    let report = c.validate();
    let mut lines = vec![
        format!("complex {} (dimension {})", c.name(), c.dim()),
        format!("f-vector {:?}, Euler characteristic {}", c.f_vector(), c.euler_characteristic()),
    ];
    for check in &report.checks {
        let detail = if check.detail.is_empty() || check.detail == check.name { String::new() } else { format!(" ({})", check.detail) };
        lines.push(format!("{:<4} {}{detail}", if check.pass { "ok" } else { "FAIL" }, check.name));
    }
    let json: serde_json::Value = serde_json::from_str(&c.to_json()).map_err(|e| Error::Input(e.to_string()))?;
    Outcome::new(lines, json, report.pass())
}

fn cmd_homology(arg: &ComplexArg, modulus: Option<u64>) -> Result<Outcome, Error> {
    let c = complex(&arg.complex)?;
    match modulus {
        Some(p) => {
            let b = betti_numbers(&c, p)?;
            let line = b.iter().enumerate().map(|(k, v)| format!("b{k}={v}")).collect::<Vec<_>>().join(" ");
            Outcome::new(vec![line], &b, true)
        }
        None => {
            let h = integral_homology(&c)?;
            let lines = h.iter().enumerate().map(|(k, g)| format!("H{k} = {g}")).collect();
            Outcome::new(lines, &h, true)
        }
    }
}

fn cmd_synthesize(a: &CodeArgs) -> Result<Outcome, Error> {
    let c = complex(&a.complex)?;
    let code = CssCode::from_chain_complex(&c, a.degree, a.modulus, a.copies)?;
    let consts = constants(&c, &a.consts)?;
    let e = GateExpression::parse(&a.expr)?;
    let circ = synthesize_diagonal(&e, &code, &consts)?;
    let mut counts = std::collections::BTreeMap::<String, usize>::new();
    for g in &circ.gates {
        let name = cupgates::synth::gate_name(g.qudits.len(), g.num, g.den).unwrap_or_else(|| format!("phase/{}", g.den));
        *counts.entry(name).or_default() += 1;
    }
    let mut lines = vec![
        format!("{} qudits, {} gates, at most {} per qudit", code.num_qudits(), circ.gates.len(), circ.max_gates_per_qudit()),
    ];
    lines.extend(counts.iter().map(|(n, k)| format!("{k:>8} {n}")));
    let json: serde_json::Value = serde_json::from_str(&circ.to_json()).map_err(|e| Error::Input(e.to_string()))?;
    Outcome::new(lines, json, true)
}

fn verify_expression(
    complex_arg: &str,
    expr: &str,
    modulus: u64,
    copies: usize,
    degree: usize,
    consts: &[String],
    seed: u64,
) -> Result<Outcome, Error> {
    let c = complex(complex_arg)?;
    let code = CssCode::from_chain_complex(&c, degree, modulus, copies)?;
    let consts = constants(&c, consts)?;
    let e = GateExpression::parse(expr)?;
    let circ = synthesize_diagonal(&e, &code, &consts)?;
    let opts = CheckOptions {
        seed,
        ..CheckOptions::default()
    };
    let report = check_circuit_commutation(&circ, &code, &opts)?;
    let mut lines = vec![format!(
        "commutation with {} X-checks: {} ({:?})",
        report.checks,
        if report.passed { "pass" } else { "FAIL" },
        report.guarantee
    )];
    if let Some(w) = &report.witness {
        lines.push(format!("witness: check {} shifts the phase by {}/{}", w.check, w.delta, w.denominator));
    }
    let logical = if report.passed {
        let p = extract_logical_action(&circ, &code, seed)?;
        lines.push(format!("logical action: {}", p.describe()));
        Some(p)
    } else {
        None
    };
    #[derive(Serialize)]
    struct Json<'a> {
        commutation: &'a cupgates::verify::CommutationReport,
        logical: Option<cupgates::verify::PhasePolynomial>,
    }
    let passed = report.passed;
    Outcome::new(lines, Json { commutation: &report, logical }, passed)
}

fn cmd_verify(a: &OptionalCodeArgs, scenario: &Option<String>) -> Result<Outcome, Error> {
    if let Some(name) = scenario {
        let r = run_scenario(name)?;
        let mut lines = vec![
            format!("{} {} ({})", if r.passed { "pass" } else { "FAIL" }, r.name, r.kind),
            format!("expected: {}", r.expected),
            format!("computed: {}", r.computed),
        ];
        lines.extend(r.details.iter().map(|d| format!("  {d}")));
        let passed = r.passed;
        return Outcome::new(lines, &r, passed);
    }
    let (Some(c), Some(e)) = (&a.complex, &a.expr) else {
        return Err(Error::Input("verify needs --complex and --expr, or --scenario".into()));
    };
    verify_expression(c, e, a.modulus, a.copies, a.degree, &a.consts, a.seed)
}

fn cmd_suite(kind: SuiteKind, arg: &ComplexArg, trials: usize, seed: u64, modulus: u64, power: usize) -> Result<Outcome, Error> {
    let c = complex(&arg.complex)?;
    let r = match kind {
        SuiteKind::Pontryagin => pontryagin_property_suite(&c, modulus, power, trials, seed)?,
        SuiteKind::Steenrod => steenrod_suite(&c, trials, seed)?,
        SuiteKind::Cartan => cartan_suite(&c, trials, seed)?,
    };
    let mut lines = vec![format!("{} suite on {} ({}), {} trials, seed {seed}", r.suite, r.complex, r.parameters, r.trials)];
    for ch in &r.checks {
        lines.push(format!(
            "{:<4} {}: {} passed, {} failed",
            if ch.failed == 0 && ch.passed > 0 { "ok" } else { "FAIL" },
            ch.name,
            ch.passed,
            ch.failed
        ));
    }
    lines.push(if r.passed() { "all checks pass".into() } else { "some checks FAIL".into() });
    let passed = r.passed();
    Outcome::new(lines, &r, passed)
}

/// `modulus:var=monomial,var=monomial`
fn parse_field(s: &str) -> Result<(u64, Vec<(String, String)>), Error> {
    let bad = || Error::Input(format!("--field expects modulus:var=monomial,..., got \"{s}\""));
    let (m, rest) = s.split_once(':').ok_or_else(bad)?;
    let m: u64 = m.trim().parse().map_err(|_| bad())?;
    let mut terms = Vec::new();
    for part in rest.split(',') {
        let (v, mono) = part.split_once('=').ok_or_else(bad)?;
        terms.push((v.trim().to_string(), mono.trim().to_string()));
    }
    Ok((m, terms))
}

fn cmd_ring(
    ring: &Option<String>,
    expr: &Option<String>,
    fields: &[String],
    connection: &Option<PathBuf>,
    scenario: &Option<String>,
) -> Result<Outcome, Error> {
    if let Some(name) = scenario {
        let s = shipped_scenarios()
            .into_iter()
            .find(|s| &s.name == name)
            .ok_or_else(|| Error::Input(format!("no ring scenario \"{name}\"")))?;
        let o = s.run()?;
        let mut lines = vec![
            format!("{} {}", if o.passed { "pass" } else { "FAIL" }, o.name),
            format!("expected: {}", o.expected),
            format!("computed: {}", o.computed),
        ];
        if let Some(n) = &o.note {
            lines.push(format!("note: {n}"));
        }
        let passed = o.passed;
        return Outcome::new(lines, &o, passed);
    }
    let (Some(ring), Some(expr)) = (ring, expr) else {
        return Err(Error::Input("ring needs --ring and --expr, or --scenario".into()));
    };
    let r = CohomologyRing::from_spec(ring)?;
    let conn = match connection {
        Some(p) => in_file(p, serde_json::from_str::<FlatConnection>(&read(p)?).map_err(Error::from))?,
        None => {
            let parsed = fields.iter().map(|f| parse_field(f)).collect::<Result<Vec<_>, _>>()?;
            let borrowed: Vec<Vec<(&str, &str)>> = parsed
                .iter()
                .map(|(_, ts)| ts.iter().map(|(v, m)| (v.as_str(), m.as_str())).collect())
                .collect();
            let spec: Vec<(u64, &[(&str, &str)])> =
                parsed.iter().zip(&borrowed).map(|((m, _), ts)| (*m, ts.as_slice())).collect();
            FlatConnection::simple(&spec, &r)?
        }
    };
    let p = ring_evaluate(&GateExpression::parse(expr)?, &r, &conn)?;
    let lines = vec![format!("ring {} (top degree {})", r.name(), r.top_degree()), format!("logical action: {}", p.describe())];
    Outcome::new(lines, &p, true)
}

fn cmd_boundary(script: &Option<String>, group: &Option<String>, degree: usize, modulus: u64, u1: bool) -> Result<Outcome, Error> {
    if let Some(g) = group {
        let orders = g
            .split(',')
            .map(|x| x.trim().parse::<u64>().map_err(|_| Error::Input(format!("bad group orders \"{g}\""))))
            .collect::<Result<Vec<_>, _>>()?;
        let grp = FiniteAbelianGroup::new(orders)?;
        let c = cohomology_counts(&grp, degree, modulus)?;
        let order = c.order.map_or("> 2^128".into(), |o| o.to_string());
        let mut lines = vec![format!("|H^{degree}(Z{:?}; Z_{modulus})| = {order}", grp.orders())];
        let mut u1_orders = None;
        if u1 {
            let o = u1_cohomology_orders(&grp, degree, modulus)?;
            for (n, v) in o.iter().enumerate() {
                lines.push(format!("|H^{}(G; U(1))| = {v}", n + 1));
            }
            u1_orders = Some(o);
        }
        #[derive(Serialize)]
        struct Json {
            count: cupgates::grpcoh::CohomologyCount,
            u1: Option<Vec<u128>>,
        }
        return Outcome::new(lines, Json { count: c, u1: u1_orders }, true);
    }
    let Some(name) = script else {
        return Err(Error::Input("boundary needs --script or --group".into()));
    };
    let s = match shipped_boundary_scripts().into_iter().find(|s| &s.name == name) {
        Some(s) => s,
        None => {
            let p = Path::new(name);
            in_file(p, BoundaryScript::from_json(&read(p)?))?
        }
    };
    let o = s.run()?;
    let mut lines = vec![format!("{} {}", if o.passed { "pass" } else { "FAIL" }, o.name)];
    for (label, m, den) in &o.stages {
        lines.push(format!("  {label}: over Z_{m}, denominator {den}"));
    }
    if let Some(m) = &o.mismatch {
        lines.push(format!("  {m}"));
    }
    let passed = o.passed;
    Outcome::new(lines, &o, passed)
}

fn cmd_scenarios(filter: &str, run: bool) -> Result<Outcome, Error> {
    let entries = filtered_catalog(filter);
    let mut lines = Vec::new();
    if !run {
        for e in &entries {
            lines.push(format!("{:<20} {:<8} {:<9} {}", e.name, e.kind.to_string(), e.source, e.title));
            lines.push(format!("{:<20} anchor: {}", "", e.anchor));
        }
        return Outcome::new(lines, &entries, true);
    }
    let mut reports = Vec::new();
    for e in &entries {
        let r = run_scenario(&e.name)?;
        lines.push(format!("{:<4} {:<20} {}", if r.passed { "pass" } else { "FAIL" }, r.name, r.computed));
        reports.push(r);
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    lines.push(format!("{} scenarios, {failed} failed", reports.len()));
    Outcome::new(lines, &reports, failed == 0)
}

fn cmd_oracle(a: &CodeArgs) -> Result<Outcome, Error> {
    let c = complex(&a.complex)?;
    let code = CssCode::from_chain_complex(&c, a.degree, a.modulus, a.copies)?;
    let consts = constants(&c, &a.consts)?;
    let circ = synthesize_diagonal(&GateExpression::parse(&a.expr)?, &code, &consts)?;
    let gens = cohomology_generators(&code)?;
    let m = brute_force_oracle(OracleOp::Diagonal(&circ), &code, &gens)?;
    let mut lines = vec![format!("{} logical states, phases in units of 2π/{}", m.dim, m.denominator)];
    let mut ok = true;
    for s in 0..m.dim {
        match m.entries[s][s] {
            Some(v) => lines.push(format!("  |{s}> -> {v}")),
            None => {
                ok = false;
                lines.push(format!("  |{s}> is not mapped to itself"));
            }
        }
    }
    #[derive(Serialize)]
    struct Json {
        dim: usize,
        denominator: u64,
        diagonal: Vec<Option<u64>>,
    }
    let diagonal = (0..m.dim).map(|s| m.entries[s][s]).collect();
    Outcome::new(lines, Json { dim: m.dim, denominator: m.denominator, diagonal }, ok)
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Homology { complex, modulus } => cmd_homology(complex, *modulus),
        Command::Synthesize(a) => cmd_synthesize(a),
        Command::Verify { code, scenario } => cmd_verify(code, scenario),
        Command::Suite {
            kind,
            complex,
            trials,
            seed,
            modulus,
            power,
        } => cmd_suite(*kind, complex, *trials, *seed, *modulus, *power),
        Command::Ring {
            ring,
            expr,
            fields,
            connection,
            scenario,
        } => cmd_ring(ring, expr, fields, connection, scenario),
        Command::Boundary {
            script,
            group,
            degree,
            modulus,
            u1,
        } => cmd_boundary(script, group, *degree, *modulus, *u1),
        Command::Scenarios { filter, run } => cmd_scenarios(filter, *run),
        Command::Oracle(a) => cmd_oracle(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            for l in &out.lines {
                // a closed pipe (e.g. `| head`) is not an error
                if writeln!(stdout, "{l}").is_err() {
                    break;
                }
            }
            if let Some(p) = &cli.json_out {
                let text = serde_json::to_string_pretty(&out.json).expect("report serializes");
                if let Err(e) = std::fs::write(p, text + "\n") {
                    eprintln!("error: cannot write {}: {e}", p.display());
                    return ExitCode::from(2);
                }
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Error::Parse { message, .. }) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_syntax() {
        let (m, t) = parse_field("4:n1=w1, m1=w2").unwrap();
        assert_eq!(m, 4);
        assert_eq!(t, vec![("n1".to_string(), "w1".to_string()), ("m1".to_string(), "w2".to_string())]);
        assert!(parse_field("n=w").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
