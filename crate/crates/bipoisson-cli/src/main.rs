//! Command-line front end for the `bipoisson` library: catalog access,
//! tensor-equation checking, bracket-table construction, identity
//! verification, and gauge transforms, with deterministic text or JSON
//! reports.
//!
//! Exit codes: 0 — every requested check passed; 1 — at least one
//! verification failed; 2 — malformed input (unreadable or invalid files,
//! bad arguments, non-admissible datums where admissibility is required).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use bipoisson::brackets::{linear_bracket, quadratic_bracket, BracketTable};
use bipoisson::io::{self, Symmetry, TableProvenance};
use bipoisson::poly::{parse_rational, Polynomial, Rational, VarId};
use bipoisson::report::Report;
use bipoisson::sl3::{
    b_of_y, basis_c, bind_params, c_of_y, catalog_keys, normal_form,
    rmatrix_example_basis_combination, rmatrix_example_parts, y_symbolic, CaseKey,
};
use bipoisson::tensor::{fp4_residual, gauge_transform, validate_b, validate_c, Tensor4};
use bipoisson::verify::{
    casimir_check, certified_lambda, compatibility_check, coordinate_triples, decomposition_check,
    decomposition_data, eqbasic2_followup_check, jacobi_check, s0_flow_check, s_members,
    schouten_factor_check, table_sum, VerifyError,
};

#[derive(Parser)]
#[command(
    name = "bipoisson",
    version,
    about = "Exact construction and symbolic certification of a compatible \
             linear/quadratic Poisson bracket pair"
)]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for the verification passes (default: all cores).
    #[arg(long, global = true, value_name = "K")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// List or export the built-in dimension-3 catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogCmd,
    },
    /// Evaluate the defining tensor equation's residual for a datum (c, b).
    CheckFp4 {
        /// Skew tensor file (JSON).
        #[arg(long = "c", value_name = "FILE")]
        c_path: PathBuf,
        /// Symmetric tensor file (JSON).
        #[arg(long = "b", value_name = "FILE")]
        b_path: PathBuf,
        /// Parameter binding `t=<rational>`, `a=<rational>` (repeatable;
        /// unbound parameters stay symbolic).
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
    },
    /// Build a quadratic bracket table from a catalog case or a tensor pair.
    Build {
        /// Catalog case key (a1..a4, b1, b2, c1..c3).
        #[arg(long, value_name = "KEY", conflicts_with_all = ["c_path", "b_path"])]
        case: Option<String>,
        /// Skew tensor file (JSON).
        #[arg(long = "c", value_name = "FILE", requires = "b_path")]
        c_path: Option<PathBuf>,
        /// Symmetric tensor file (JSON).
        #[arg(long = "b", value_name = "FILE", requires = "c_path")]
        b_path: Option<PathBuf>,
        /// Parameter binding `t=<rational|symbolic>`, `a=...` (repeatable).
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
        /// S0-row scale (no default; the normalization is an explicit choice.
        /// The certified value is 1/3 at dimension 3).
        #[arg(long, value_name = "P/Q")]
        lambda: String,
        /// Output table file.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Keep all N^2+1 coordinates instead of restricting to the
        /// traceless subspace.
        #[arg(long)]
        full: bool,
    },
    /// Verify identities of a bracket-table file.
    Verify {
        /// Bracket table file (JSON).
        #[arg(long, value_name = "FILE")]
        table: PathBuf,
        /// Run every applicable check (default when no check is selected).
        #[arg(long)]
        all: bool,
        /// Jacobi identity over all coordinate triples.
        #[arg(long)]
        jacobi: bool,
        /// Pencil compatibility with the linear bracket, symbolic in the
        /// pencil parameter.
        #[arg(long)]
        compat: bool,
        /// Decomposition identities of the datum (needs datum context).
        #[arg(long)]
        decomp: bool,
        /// Trace Casimir.
        #[arg(long)]
        casimir: bool,
        /// S0-row flow identity of the datum (needs datum context).
        #[arg(long)]
        s0flow: bool,
        /// Datum context: catalog case key.
        #[arg(long, value_name = "KEY", conflicts_with_all = ["c_path", "b_path"])]
        case: Option<String>,
        /// Datum context: skew tensor file.
        #[arg(long = "c", value_name = "FILE", requires = "b_path")]
        c_path: Option<PathBuf>,
        /// Datum context: symmetric tensor file.
        #[arg(long = "b", value_name = "FILE", requires = "c_path")]
        b_path: Option<PathBuf>,
        /// Parameter binding for the datum context (repeatable).
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
    },
    /// Gauge-transform a datum by a traceless generator and report (without
    /// asserting) what the transform preserved.
    Gauge {
        /// Skew tensor file (JSON).
        #[arg(long = "c", value_name = "FILE")]
        c_path: PathBuf,
        /// Symmetric tensor file (JSON).
        #[arg(long = "b", value_name = "FILE")]
        b_path: PathBuf,
        /// Gauge generator file (JSON matrix, traceless).
        #[arg(long = "x", value_name = "FILE")]
        x_path: PathBuf,
        /// Output prefix; writes <prefix>.c.json and <prefix>.b.json.
        #[arg(long, value_name = "PREFIX")]
        out_prefix: PathBuf,
    },
    /// Run the built-in symbolic certification suite over the catalog.
    Selftest,
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Print every catalog key.
    List,
    /// Write a catalog entry to tensor JSON files.
    Export {
        /// Catalog key (basis-c0..basis-c9, a1..a4, b1, b2, c1..c3,
        /// rmatrix-example).
        key: String,
        /// Output path prefix (default: the key itself).
        #[arg(long, value_name = "PREFIX")]
        out_prefix: Option<PathBuf>,
        /// Parameter binding `t=<rational|symbolic>`, `a=...` (repeatable).
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: cannot configure {jobs} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Print a line to stdout, tolerating a reader that has gone away
/// (e.g. output piped into `head`): a failed write is dropped instead of
/// panicking, and the process still exits with its real verdict.
fn say(line: impl AsRef<str>) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{}", line.as_ref());
}

/// Accumulated output of one invocation; rendered once at the end so text
/// and JSON have identical content.
#[derive(Default)]
struct Output {
    reports: Vec<Report>,
    notes: Vec<String>,
    written: Vec<PathBuf>,
    /// When set, the exit code ignores report outcomes (gauge semantics:
    /// report, don't assert).
    advisory: bool,
}

impl Output {
    fn push(&mut self, r: Report) {
        self.reports.push(r);
    }

    fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    fn wrote(&mut self, p: &Path) {
        self.written.push(p.to_path_buf());
    }

    fn emit(self, command: &str, format: Format) -> Result<bool> {
        let all_passed = self.reports.iter().all(|r| r.passed);
        let verdict = self.advisory || all_passed;
        match format {
            Format::Text => {
                for n in &self.notes {
                    say(format!("note: {n}"));
                }
                for r in &self.reports {
                    say(r.summary());
                }
                for p in &self.written {
                    say(format!("wrote {}", p.display()));
                }
                if !self.reports.is_empty() {
                    if all_passed {
                        say("all checks passed");
                    } else if self.advisory {
                        say("some reported properties do not hold (not asserted)");
                    } else {
                        say("FAILED");
                    }
                }
            }
            Format::Json => {
                let doc = serde_json::json!({
                    "command": command,
                    "passed": verdict,
                    "reports": self.reports,
                    "notes": self.notes,
                    "written": self.written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
                });
                say(serde_json::to_string_pretty(&doc)?);
            }
        }
        Ok(verdict)
    }
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Cmd::Catalog { action } => match action {
            CatalogCmd::List => {
                match cli.format {
                    Format::Text => {
                        for k in catalog_keys() {
                            say(k);
                        }
                    }
                    Format::Json => {
                        let doc = serde_json::json!({
                            "command": "catalog-list",
                            "keys": catalog_keys(),
                        });
                        say(serde_json::to_string_pretty(&doc)?);
                    }
                }
                Ok(true)
            }
            CatalogCmd::Export {
                key,
                out_prefix,
                params,
            } => cmd_export(cli, key, out_prefix.as_deref(), params),
        },
        Cmd::CheckFp4 {
            c_path,
            b_path,
            params,
        } => cmd_check_fp4(cli, c_path, b_path, params),
        Cmd::Build {
            case,
            c_path,
            b_path,
            params,
            lambda,
            out,
            full,
        } => cmd_build(
            cli,
            case.as_deref(),
            c_path.as_deref(),
            b_path.as_deref(),
            params,
            lambda,
            out,
            *full,
        ),
        Cmd::Verify {
            table,
            all,
            jacobi,
            compat,
            decomp,
            casimir,
            s0flow,
            case,
            c_path,
            b_path,
            params,
        } => {
            let explicit = *jacobi || *compat || *decomp || *casimir || *s0flow;
            let everything = *all || !explicit;
            let selection = Selection {
                jacobi: everything || *jacobi,
                compat: everything || *compat,
                casimir: everything || *casimir,
                decomp: everything || *decomp,
                s0flow: everything || *s0flow,
                context_required: *decomp || *s0flow,
            };
            cmd_verify(
                cli,
                table,
                selection,
                case.as_deref(),
                c_path.as_deref(),
                b_path.as_deref(),
                params,
            )
        }
        Cmd::Gauge {
            c_path,
            b_path,
            x_path,
            out_prefix,
        } => cmd_gauge(cli, c_path, b_path, x_path, out_prefix),
        Cmd::Selftest => cmd_selftest(cli),
    }
}

/// Parsed `--param` bindings; `None` means "keep symbolic".
#[derive(Default, Clone)]
struct Bindings {
    t: Option<Rational>,
    a: Option<Rational>,
}

impl Bindings {
    fn parse(specs: &[String]) -> Result<Bindings> {
        let mut out = Bindings::default();
        for spec in specs {
            let (key, value) = spec
                .split_once('=')
                .ok_or_else(|| anyhow!("--param needs the form k=v, got {spec:?}"))?;
            let slot = match key.trim() {
                "t" => &mut out.t,
                "a" => &mut out.a,
                other => bail!("unknown parameter {other:?} (expected t or a)"),
            };
            let value = value.trim();
            *slot = if value == "symbolic" {
                None
            } else {
                Some(
                    parse_rational(value)
                        .map_err(|_| anyhow!("parameter value {value:?} is not a rational"))?,
                )
            };
        }
        Ok(out)
    }

    fn apply(&self, t: &Tensor4) -> Tensor4 {
        bind_params(t, self.t.as_ref(), self.a.as_ref())
    }

    fn is_empty(&self) -> bool {
        self.t.is_none() && self.a.is_none()
    }

    /// Specialize every entry of a stored table, so an explicit binding
    /// governs the whole verification session (the stored polynomials and
    /// any rebuilt datum see the same values).
    fn apply_table(&self, table: &BracketTable) -> BracketTable {
        let mut out = BracketTable::empty(*table.coords(), table.lambda().cloned());
        for (&(u, v), p) in table.entries() {
            let mut p = p.clone();
            if let Some(tv) = &self.t {
                p = p.substitute(VarId::T, &Polynomial::constant(tv.clone()));
            }
            if let Some(av) = &self.a {
                p = p.substitute(VarId::A, &Polynomial::constant(av.clone()));
            }
            out.set_entry(u, v, p);
        }
        out
    }

    fn summary(&self) -> String {
        let mut parts = Vec::new();
        if let Some(t) = &self.t {
            parts.push(format!("t = {t}"));
        }
        if let Some(a) = &self.a {
            parts.push(format!("a = {a}"));
        }
        parts.join(", ")
    }

    /// Provenance strings for the parameters a case depends on.
    fn describe(&self, case_params: &[VarId]) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        for p in case_params {
            let (name, value) = match p {
                VarId::T => ("t", &self.t),
                VarId::A => ("a", &self.a),
                _ => continue,
            };
            let rendered = value
                .as_ref()
                .map(|v| v.to_string())
                .unwrap_or_else(|| "symbolic".to_string());
            out.insert(name.to_string(), rendered);
        }
        out
    }
}

fn parse_case(key: &str) -> Result<CaseKey> {
    key.parse::<CaseKey>().map_err(|e| anyhow!(e))
}

/// Check that explicit bindings only name parameters the case actually has.
fn check_case_bindings(case: CaseKey, bindings: &Bindings, specs: &[String]) -> Result<()> {
    for (name, var, bound) in [
        ("t", VarId::T, bindings.t.is_some()),
        ("a", VarId::A, bindings.a.is_some()),
    ] {
        let mentioned = specs
            .iter()
            .any(|s| s.split_once('=').is_some_and(|(k, _)| k.trim() == name));
        if (bound || mentioned) && !case.params().contains(&var) {
            bail!("case {case} has no parameter {name}");
        }
    }
    Ok(())
}

fn load_datum(c_path: &Path, b_path: &Path, bindings: &Bindings) -> Result<(Tensor4, Tensor4)> {
    let c = io::read_tensor(c_path).with_context(|| format!("reading {}", c_path.display()))?;
    let b = io::read_tensor(b_path).with_context(|| format!("reading {}", b_path.display()))?;
    Ok((bindings.apply(&c), bindings.apply(&b)))
}

fn cmd_export(cli: &Cli, key: &str, out_prefix: Option<&Path>, params: &[String]) -> Result<bool> {
    let bindings = Bindings::parse(params)?;
    let prefix = out_prefix
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(key));
    let mut out = Output::default();
    if let Some(alpha) = key
        .strip_prefix("basis-c")
        .and_then(|s| s.parse::<u8>().ok())
    {
        if alpha > 9 {
            bail!("unknown catalog key {key:?}");
        }
        if params.iter().any(|_| true) {
            bail!("basis tensors have no parameters");
        }
        let path = prefix.with_extension("json");
        io::write_tensor(&path, &basis_c(alpha), Symmetry::Skew)?;
        out.wrote(&path);
    } else if key == "rmatrix-example" {
        if !params.is_empty() {
            bail!("the example datum has no parameters");
        }
        let (c, b) = rmatrix_example_parts();
        let c_path = prefix.with_extension("c.json");
        let b_path = prefix.with_extension("b.json");
        io::write_tensor(&c_path, &c, Symmetry::Skew)?;
        io::write_tensor(&b_path, &b, Symmetry::Sym)?;
        out.wrote(&c_path);
        out.wrote(&b_path);
    } else {
        let case = parse_case(key)
            .map_err(|_| anyhow!("unknown catalog key {key:?} (see `catalog list`)"))?;
        check_case_bindings(case, &bindings, params)?;
        let nf = normal_form(case);
        let c_path = prefix.with_extension("c.json");
        let b_path = prefix.with_extension("b.json");
        io::write_tensor(&c_path, &bindings.apply(&nf.c), Symmetry::Skew)?;
        io::write_tensor(&b_path, &bindings.apply(&nf.b), Symmetry::Sym)?;
        out.wrote(&c_path);
        out.wrote(&b_path);
        out.note(nf.note);
    }
    out.emit("catalog-export", cli.format)
}

fn cmd_check_fp4(cli: &Cli, c_path: &Path, b_path: &Path, params: &[String]) -> Result<bool> {
    let bindings = Bindings::parse(params)?;
    let (c, b) = load_datum(c_path, b_path, &bindings)?;
    let mut out = Output::default();
    out.push(validate_c(&c));
    out.push(validate_b(&b));
    let residual = fp4_residual(&c, &b)?;
    let nonzero = residual.entries().count();
    out.note(format!("{nonzero} nonzero residual entries"));
    out.push(residual.to_report("fp4"));
    out.emit("check-fp4", cli.format)
}

#[allow(clippy::too_many_arguments)]
fn cmd_build(
    cli: &Cli,
    case: Option<&str>,
    c_path: Option<&Path>,
    b_path: Option<&Path>,
    params: &[String],
    lambda: &str,
    out_path: &Path,
    full: bool,
) -> Result<bool> {
    let bindings = Bindings::parse(params)?;
    let lambda = parse_rational(lambda)
        .map_err(|_| anyhow!("--lambda must be a rational like 1/3, got {lambda:?}"))?;
    let (c, b, provenance) = match (case, c_path, b_path) {
        (Some(key), None, None) => {
            let case = parse_case(key)?;
            check_case_bindings(case, &bindings, params)?;
            let nf = normal_form(case);
            let prov = TableProvenance {
                case: Some(case.label().to_string()),
                params: bindings.describe(case.params()),
            };
            (bindings.apply(&nf.c), bindings.apply(&nf.b), prov)
        }
        (None, Some(cp), Some(bp)) => {
            let (c, b) = load_datum(cp, bp, &bindings)?;
            (c, b, TableProvenance::default())
        }
        _ => bail!("give either --case KEY or both --c FILE and --b FILE"),
    };
    // The table formulas presuppose an admissible datum (skew c, symmetric
    // b, vanishing partial traces); refuse anything else as malformed input.
    for rep in [validate_c(&c), validate_b(&b)] {
        if !rep.passed {
            bail!("datum is not admissible — {}", rep.summary());
        }
    }
    let mut out = Output::default();
    let residual = fp4_residual(&c, &b)?;
    if residual.is_empty() {
        out.note("datum solves the defining tensor equation");
    } else {
        out.note(format!(
            "datum does NOT solve the defining tensor equation ({} residual entries); building anyway",
            residual.entries().count()
        ));
    }
    let table = quadratic_bracket(&c, &b, &lambda)?;
    let table = if full { table } else { table.restrict_sl()? };
    io::write_table(out_path, &table, Some(&provenance))?;
    out.wrote(out_path);
    out.emit("build", cli.format)
}

struct Selection {
    jacobi: bool,
    compat: bool,
    casimir: bool,
    decomp: bool,
    s0flow: bool,
    /// The user explicitly asked for a context-dependent check.
    context_required: bool,
}

/// Resolve the datum for context-dependent checks: explicit flags first,
/// then the table's embedded provenance.
fn resolve_context(
    case: Option<&str>,
    c_path: Option<&Path>,
    b_path: Option<&Path>,
    params: &[String],
    embedded: &TableProvenance,
) -> Result<Option<(Tensor4, Tensor4, String)>> {
    let bindings = Bindings::parse(params)?;
    if let (Some(cp), Some(bp)) = (c_path, b_path) {
        let (c, b) = load_datum(cp, bp, &bindings)?;
        return Ok(Some((
            c,
            b,
            format!("files {} + {}", cp.display(), bp.display()),
        )));
    }
    if let Some(key) = case {
        let case = parse_case(key)?;
        check_case_bindings(case, &bindings, params)?;
        let nf = normal_form(case);
        let desc = describe_case(case, &bindings.describe(case.params()));
        return Ok(Some((bindings.apply(&nf.c), bindings.apply(&nf.b), desc)));
    }
    if let Some(key) = &embedded.case {
        let case = parse_case(key).with_context(|| "table carries an unknown case label")?;
        let nf = normal_form(case);
        // Embedded bindings, overridden by any explicit --param.
        let mut merged = Bindings::default();
        for (k, v) in &embedded.params {
            if v != "symbolic" {
                let value = parse_rational(v)
                    .map_err(|_| anyhow!("embedded parameter {k}={v:?} is not a rational"))?;
                match k.as_str() {
                    "t" => merged.t = Some(value),
                    "a" => merged.a = Some(value),
                    other => bail!("embedded parameter {other:?} is not recognised"),
                }
            }
        }
        let explicit = Bindings::parse(params)?;
        if explicit.t.is_some() {
            merged.t = explicit.t;
        }
        if explicit.a.is_some() {
            merged.a = explicit.a;
        }
        let desc = describe_case(case, &merged.describe(case.params()));
        return Ok(Some((
            merged.apply(&nf.c),
            merged.apply(&nf.b),
            format!("{desc} (embedded provenance)"),
        )));
    }
    Ok(None)
}

fn describe_case(case: CaseKey, params: &BTreeMap<String, String>) -> String {
    if params.is_empty() {
        format!("case {case}")
    } else {
        let rendered: Vec<String> = params.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        format!("case {case} ({})", rendered.join(", "))
    }
}

/// Entry-for-entry agreement between a stored table and the one rebuilt
/// from its datum.
fn table_agreement(stored: &BracketTable, rebuilt: &BracketTable) -> Report {
    let members = stored.coords().members();
    let mut checked = 0usize;
    for (i, &u) in members.iter().enumerate() {
        for &v in &members[i + 1..] {
            checked += 1;
            let mut d = stored.entry(u, v);
            d.sub_assign(&rebuilt.entry(u, v));
            if !d.is_zero() {
                return Report::fail(
                    "table-matches-datum",
                    checked,
                    format!("({u}, {v})"),
                    d.to_string(),
                );
            }
        }
    }
    Report::pass("table-matches-datum", checked)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    cli: &Cli,
    table_path: &Path,
    selection: Selection,
    case: Option<&str>,
    c_path: Option<&Path>,
    b_path: Option<&Path>,
    params: &[String],
) -> Result<bool> {
    let (table, embedded) =
        io::read_table(table_path).with_context(|| format!("reading {}", table_path.display()))?;
    let mut out = Output::default();
    let explicit = Bindings::parse(params)?;
    let table = if explicit.is_empty() {
        table
    } else {
        out.note(format!(
            "stored table specialized at {}",
            explicit.summary()
        ));
        explicit.apply_table(&table)
    };
    if selection.jacobi {
        out.push(jacobi_check(&table));
    }
    if selection.compat {
        let lin = linear_bracket(table.n());
        let lin = if table.is_restricted() {
            lin.restrict_sl()?
        } else {
            lin
        };
        out.push(compatibility_check(&lin, &table)?);
    }
    if selection.casimir {
        out.push(casimir_check(&table));
    }
    if selection.decomp || selection.s0flow {
        let context = resolve_context(case, c_path, b_path, params, &embedded)?;
        match context {
            Some((c, b, desc)) => {
                out.note(format!("datum context: {desc}"));
                if c.n() != table.n() {
                    bail!(
                        "datum dimension {} does not match the table dimension {}",
                        c.n(),
                        table.n()
                    );
                }
                let lambda = table
                    .lambda()
                    .cloned()
                    .ok_or_else(|| anyhow!("table carries no lambda; flow and decomposition checks need the S0-row scale"))?;
                let rebuilt = quadratic_bracket(&c, &b, &lambda)?;
                let rebuilt = if table.is_restricted() {
                    rebuilt.restrict_sl()?
                } else {
                    rebuilt
                };
                out.push(table_agreement(&table, &rebuilt));
                if selection.s0flow {
                    out.push(s0_flow_check(&c, &b, &lambda)?);
                }
                if selection.decomp {
                    match decomposition_check(&c, &b, &lambda) {
                        Ok(rep) => {
                            let all = rep.all_passed();
                            for r in rep.reports() {
                                out.push(r.clone());
                            }
                            if all && c.n() >= 3 {
                                out.push(eqbasic2_followup_check(&c, &b, &lambda)?);
                            }
                        }
                        Err(VerifyError::Precondition(msg)) => {
                            out.push(Report::fail("decomposition", 0, "precondition", msg));
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            }
            None if selection.context_required => {
                bail!(
                    "--decomp/--s0flow need a datum: give --case KEY or --c/--b, \
                     or verify a table with embedded provenance"
                );
            }
            None => {
                out.note("skipped flow/decomposition checks (no datum context)");
            }
        }
    }
    out.emit("verify", cli.format)
}

fn cmd_gauge(
    cli: &Cli,
    c_path: &Path,
    b_path: &Path,
    x_path: &Path,
    out_prefix: &Path,
) -> Result<bool> {
    let (c, b) = load_datum(c_path, b_path, &Bindings::default())?;
    let x = io::read_matrix(x_path).with_context(|| format!("reading {}", x_path.display()))?;
    let (c2, b2) = gauge_transform(&c, &b, &x)?;
    let mut out = Output {
        advisory: true,
        ..Output::default()
    };
    out.note("properties of the transformed pair are reported, not asserted");
    let vc = validate_c(&c2);
    let vb = validate_b(&b2);
    let residual = fp4_residual(&c2, &b2)?;
    out.note(format!(
        "transformed residual: {} nonzero entries",
        residual.entries().count()
    ));
    // Write with the tightest header that actually holds, so the files
    // remain loss-free even when a symmetry broke.
    let c_sym = if vc.passed {
        Symmetry::Skew
    } else {
        Symmetry::Plain
    };
    let b_sym = if vb.passed {
        Symmetry::Sym
    } else {
        Symmetry::Plain
    };
    out.push(vc);
    out.push(vb);
    out.push(residual.to_report("fp4"));
    let c_out = out_prefix.with_extension("c.json");
    let b_out = out_prefix.with_extension("b.json");
    io::write_tensor(&c_out, &c2, c_sym)?;
    io::write_tensor(&b_out, &b2, b_sym)?;
    out.wrote(&c_out);
    out.wrote(&b_out);
    out.emit("gauge", cli.format)
}

/// Merge a sequence of named sub-reports into one, keeping the first
/// failure's witness.
fn merged(name: &str, items: impl IntoIterator<Item = Report>) -> Report {
    let mut total = 0usize;
    for r in items {
        total += r.checked;
        if !r.passed {
            let mut out = r.clone();
            out.name = name.to_string();
            out.checked = total;
            let context = format!("within {}", r.name);
            out.detail = Some(match out.detail {
                Some(d) => format!("{context}; {d}"),
                None => context,
            });
            return out;
        }
    }
    Report::pass(name, total)
}

/// Entry-for-entry equality of two tensors as a report.
fn tensors_equal(name: &str, lhs: &Tensor4, rhs: &Tensor4) -> Report {
    match lhs.add(&rhs.scale(&-Rational::from_integer(1.into()))) {
        Err(e) => Report::fail(name, 0, "dimensions", e.to_string()),
        Ok(diff) => {
            let n = lhs.num_entries().max(rhs.num_entries());
            match diff.entries().next() {
                None => Report::pass(name, n),
                Some((&(i, j, k, l), p)) => {
                    Report::fail(name, n, format!("({i},{j},{k},{l})"), p.to_string())
                }
            }
        }
    }
}

fn cmd_selftest(cli: &Cli) -> Result<bool> {
    let mut out = Output::default();
    let lambda = certified_lambda();
    out.note(format!("certified S0-row scale: lambda = {lambda}"));

    // Basis admissibility and the fully symbolic family identity.
    out.push(merged(
        "basis-admissible",
        (0..=9).map(|alpha| validate_c(&basis_c(alpha))),
    ));
    let y = y_symbolic();
    let (cy, by) = (c_of_y(&y), b_of_y(&y));
    out.push(validate_b(&by));
    out.push(fp4_residual(&cy, &by)?.to_report("family-solves"));

    // Every normal form solves the equation and matches the family at its
    // parameter assignment.
    out.push(merged(
        "normal-forms-solve",
        CaseKey::all()
            .into_iter()
            .map(|k| {
                let nf = normal_form(k);
                Ok(fp4_residual(&nf.c, &nf.b)?.to_report(format!("fp4[{k}]")))
            })
            .collect::<Result<Vec<_>>>()?,
    ));
    out.push(merged(
        "normal-forms-match-family",
        CaseKey::all().into_iter().flat_map(|k| {
            let nf = normal_form(k);
            [
                tensors_equal(&format!("c[{k}]"), &nf.c, &c_of_y(&nf.y)),
                tensors_equal(&format!("b[{k}]"), &nf.b, &b_of_y(&nf.y)),
            ]
        }),
    ));

    // The example datum: solves the equation, constant part is the claimed
    // basis combination.
    let (ce, be) = rmatrix_example_parts();
    out.push(fp4_residual(&ce, &be)?.to_report("example-solves"));
    out.push(tensors_equal(
        "example-constant-part",
        &ce,
        &rmatrix_example_basis_combination(),
    ));

    // Schouten factor: the direct and polarized trilinear routes agree on
    // the linear bracket, the quadratic part of the constant-datum case,
    // and their sum.
    let nf = normal_form(CaseKey::A1);
    let data = decomposition_data(&nf.c, &nf.b, &lambda)?;
    let triples = coordinate_triples(&s_members(data.pi.coords()));
    out.push(merged(
        "schouten-factor",
        [
            schouten_factor_check(&data.pi1, &triples)?,
            schouten_factor_check(&data.pi, &triples)?,
            schouten_factor_check(&table_sum(&data.pi, &data.pi1)?, &triples)?,
        ],
    ));

    out.emit("selftest", cli.format)
}
