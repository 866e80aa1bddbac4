//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 verification failure, 3 internal
//! invariant violation.

use crate::contfrac::FieldContext;
use crate::error::Error;
use crate::fixtures::{self, Body, Fixture, GridCache};
use crate::oracle::{enumerate_partitions, render_partition};
use crate::parity::{cumulative_p, parity_check};
use crate::partition::{asymptotic_estimate, Parallelism, PartitionGrid};
use crate::quadfield::{Congruence, FieldId, QElement};
use crate::search::{
    complete_n, dm_scan, search_m, squarefree_up_to, verify_thresholds, witness_m4, witness_m6,
    witness_m6_d5, ElementDoc,
};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Pretty,
    Csv,
    Json,
    Tex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum View {
    Xy,
    Ky,
}

#[derive(Debug, Parser)]
#[command(
    name = "quadpart",
    version,
    about = "Partitions of totally positive integers in real quadratic fields"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Pretty, global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of p_K(x + yω) for y ≥ 0, or the (k, y) slice with `--view ky`.
    Grid {
        #[arg(long = "D", visible_alias = "d", allow_negative_numbers = true)]
        d: i64,
        #[arg(long, default_value_t = 10)]
        max_x: u64,
        #[arg(long, value_enum, default_value_t = View::Xy)]
        view: View,
        #[arg(long, default_value_t = 6)]
        kmax: u64,
        #[arg(long, default_value_t = 10)]
        ymax: u64,
        /// Evaluate the cells of each column one at a time.
        #[arg(long)]
        sequential: bool,
    },
    /// Continued fraction, convergents and indecomposable elements.
    Indecomposables {
        #[arg(long = "D", visible_alias = "d", allow_negative_numbers = true)]
        d: i64,
    },
    /// Fundamental unit and smallest totally positive unit.
    Units {
        #[arg(long = "D", visible_alias = "d", allow_negative_numbers = true)]
        d: i64,
    },
    /// All elements with at most m partitions, up to conjugation and units.
    Search {
        #[arg(long = "D", visible_alias = "d", allow_negative_numbers = true)]
        d: i64,
        #[arg(long, default_value_t = 11)]
        m: u64,
        /// List the partitions of representatives of small norm.
        #[arg(long)]
        explain: bool,
    },
    /// Squarefree D ≤ Dmax having no element with exactly m partitions.
    Dm {
        #[arg(long)]
        m: u64,
        #[arg(long = "Dmax", visible_alias = "dmax")]
        d_max: u64,
    },
    /// Parity of p_K(n) against the cumulative trace count.
    Parity {
        #[arg(long = "D", visible_alias = "d", allow_negative_numbers = true)]
        d: i64,
        #[arg(long = "N", visible_alias = "n")]
        n: u64,
    },
    /// Elements with four, six or nine partitions.
    Witness {
        #[arg(
            long = "D",
            visible_alias = "d",
            allow_negative_numbers = true,
            conflicts_with = "d_max"
        )]
        d: Option<i64>,
        /// Sweep every squarefree D up to this bound.
        #[arg(long = "Dmax", visible_alias = "dmax")]
        d_max: Option<u64>,
    },
    /// Leading-order estimate of log p_K(tα) against the exact value.
    Estimate {
        #[arg(long = "D", visible_alias = "d", allow_negative_numbers = true)]
        d: i64,
        /// Coordinates of α = x + yω.
        #[arg(long, allow_negative_numbers = true)]
        x: i64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0)]
        y: i64,
        #[arg(long, default_value_t = 1)]
        steps: u64,
    },
    /// Checks where p_K(n) = p(n) against the bounds E_n and F_n.
    Thresholds {
        #[arg(long)]
        n: u64,
        #[arg(long = "Dmax", visible_alias = "dmax")]
        d_max: u64,
    },
    /// Recomputes reference tables; without a path the built-in set is used.
    Verify {
        /// A fixture file or a directory of fixture files.
        path: Option<PathBuf>,
    },
}

/// A plain table for the pretty, csv and tex renderers.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(title: impl Into<String>, header: &[&str]) -> Self {
        Table {
            title: title.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn pretty(&self, out: &mut String) {
        let n = self.header.len();
        let mut width = vec![0; n];
        for row in std::iter::once(&self.header).chain(&self.rows) {
            for (i, c) in row.iter().enumerate() {
                width[i] = width[i].max(c.chars().count());
            }
        }
        if !self.title.is_empty() {
            out.push_str(&self.title);
            out.push('\n');
        }
        let line = |row: &[String]| {
            let cells: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(i, c)| format!("{}{c}", " ".repeat(width[i] - c.chars().count())))
                .collect();
            cells.join("  ").trim_end().to_string()
        };
        out.push_str(&line(&self.header));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
    }

    fn csv(&self, out: &mut String) {
        let esc = |c: &String| {
            if c.contains([',', '"']) {
                format!("\"{}\"", c.replace('"', "\"\""))
            } else {
                c.clone()
            }
        };
        for row in std::iter::once(&self.header).chain(&self.rows) {
            out.push_str(&row.iter().map(esc).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
    }

    fn tex(&self, out: &mut String) {
        let tex_cell = |c: &String| {
            if c.contains('√') {
                let parts: Vec<String> = c.split(", ").map(surd_to_tex).collect();
                format!("${}$", parts.join(",\\ "))
            } else {
                c.clone()
            }
        };
        if !self.title.is_empty() {
            out.push_str(&format!("% {}\n", self.title));
        }
        out.push_str(&format!(
            "\\begin{{tabular}}{{{}}}\n\\hline\n",
            "c".repeat(self.header.len())
        ));
        let line = |row: &[String]| row.iter().map(tex_cell).collect::<Vec<_>>().join(" & ");
        out.push_str(&format!("{} \\\\\n\\hline\n", line(&self.header)));
        for row in &self.rows {
            out.push_str(&format!("{} \\\\\n", line(row)));
        }
        out.push_str("\\hline\n\\end{tabular}\n");
    }
}

/// `(11+3√13)/2` → `\frac{11+3\sqrt{13}}{2}`.
fn surd_to_tex(s: &str) -> String {
    let body = |t: &str| {
        let mut out = String::new();
        let mut chars = t.chars().peekable();
        while let Some(c) = chars.next() {
            if c == '√' {
                let mut digits = String::new();
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    digits.push(*d);
                    chars.next();
                }
                out.push_str(&format!("\\sqrt{{{digits}}}"));
            } else {
                out.push(c);
            }
        }
        out
    };
    match s.strip_prefix('(').and_then(|t| t.strip_suffix(")/2")) {
        Some(inner) => format!("\\frac{{{}}}{{2}}", body(inner)),
        None => body(s),
    }
}

/// Everything a command produces, before formatting.
#[derive(Default)]
struct Output {
    json: Value,
    notes: Vec<String>,
    tables: Vec<Table>,
    code: i32,
}

impl Output {
    fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Json => {
                out.push_str(&serde_json::to_string_pretty(&self.json).expect("serializable"));
                out.push('\n');
            }
            Format::Pretty => {
                for n in &self.notes {
                    out.push_str(n);
                    out.push('\n');
                }
                for t in &self.tables {
                    out.push('\n');
                    t.pretty(&mut out);
                }
            }
            Format::Csv => {
                for n in &self.notes {
                    out.push_str(&format!("# {n}\n"));
                }
                for (i, t) in self.tables.iter().enumerate() {
                    if i > 0 {
                        out.push('\n');
                    }
                    t.csv(&mut out);
                }
            }
            Format::Tex => {
                for n in &self.notes {
                    out.push_str(&format!("% {n}\n"));
                }
                for t in &self.tables {
                    t.tex(&mut out);
                }
            }
        }
        out
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

/// Exit code for an engine error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::DiscriminantTooSmall(_)
        | Error::NotSquarefree(_)
        | Error::NotTotallyPositive(_)
        | Error::OutsideGrid(_)
        | Error::ZeroElement
        | Error::BudgetExceeded(_)
        | Error::Unsupported(_) => EXIT_USAGE,
        Error::AssertionFailure(_) => EXIT_VERIFY,
        Error::NegativeSqrt(_)
        | Error::NotIntegral { .. }
        | Error::ContinuedFraction { .. }
        | Error::DivisibilityViolation { .. }
        | Error::Invariant(_) => EXIT_INTERNAL,
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// its output. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(output) => {
            let _ = out.write_all(output.render(cli.format).as_bytes());
            output.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cmd: &Command) -> crate::Result<Output> {
    match cmd {
        Command::Grid {
            d,
            max_x,
            view,
            kmax,
            ymax,
            sequential,
        } => cmd_grid(*d, *max_x, *view, *kmax, *ymax, *sequential),
        Command::Indecomposables { d } => cmd_indecomposables(*d),
        Command::Units { d } => cmd_units(*d),
        Command::Search { d, m, explain } => cmd_search(*d, *m, *explain),
        Command::Dm { m, d_max } => cmd_dm(*m, *d_max),
        Command::Parity { d, n } => cmd_parity(*d, *n),
        Command::Witness { d, d_max } => cmd_witness(*d, *d_max),
        Command::Estimate { d, x, y, steps } => cmd_estimate(*d, *x, *y, *steps),
        Command::Thresholds { n, d_max } => cmd_thresholds(*n, *d_max),
        Command::Verify { path } => cmd_verify(path.as_deref()),
    }
}

fn cmd_grid(
    d: i64,
    max_x: u64,
    view: View,
    kmax: u64,
    ymax: u64,
    sequential: bool,
) -> crate::Result<Output> {
    let ctx = FieldContext::new(d)?;
    let par = if sequential {
        Parallelism::Sequential
    } else {
        Parallelism::Parallel
    };
    let mut grid = PartitionGrid::with_parallelism(ctx, par);
    let body =
        match view {
            View::Xy => {
                grid.extend_to(max_x)?;
                fixtures::xy_doc(&grid)
            }
            View::Ky => {
                let mut rows = Vec::new();
                for y in 0..=ymax {
                    let mut row = Vec::new();
                    for k in 0..=kmax {
                        let c = grid.count_ky(k, y)?;
                        row.push(c.to_u64().ok_or_else(|| {
                            Error::Unsupported(format!("count {c} exceeds 64 bits"))
                        })?);
                    }
                    rows.push(row);
                }
                Body::KyGrid {
                    d: d as u64,
                    k_max: kmax,
                    y_max: ymax,
                    rows,
                }
            }
        };
    let field = *grid.field();
    let mut table;
    match &body {
        Body::XyGrid { max_x, rows, .. } => {
            let mut header = vec!["y\\x".to_string()];
            header.extend((0..=*max_x).map(|x| x.to_string()));
            table = Table {
                title: format!("p_K(x + y{}) for D = {d}", omega_name(&field)),
                header,
                rows: Vec::new(),
            };
            for (y, row) in rows.iter().enumerate().rev() {
                let mut r = vec![y.to_string()];
                r.extend(
                    row.iter()
                        .map(|&c| if c == 0 { String::new() } else { c.to_string() }),
                );
                table.push(r);
            }
        }
        Body::KyGrid { k_max, rows, .. } => {
            let mut header = vec!["y\\k".to_string()];
            header.extend((0..=*k_max).map(|k| k.to_string()));
            table = Table {
                title: format!("p_K((⌈yξ⌉ + k) + y{}) for D = {d}", omega_name(&field)),
                header,
                rows: Vec::new(),
            };
            for (y, row) in rows.iter().enumerate() {
                let mut r = vec![y.to_string()];
                r.extend(row.iter().map(u64::to_string));
                table.push(r);
            }
        }
        _ => unreachable!("grid bodies only"),
    }
    let doc = Fixture {
        provenance: format!("computed D={d}"),
        body,
    };
    Ok(Output {
        json: to_json(&doc),
        tables: vec![table],
        ..Output::default()
    })
}

fn omega_name(field: &FieldId) -> String {
    match field.class() {
        Congruence::TwoThree => format!("√{}", field.d()),
        Congruence::One => "ω".to_string(),
    }
}

fn cmd_indecomposables(d: i64) -> crate::Result<Output> {
    let ctx = FieldContext::new(d)?;
    let k = &ctx.field;
    let period: Vec<String> = ctx.period.iter().map(BigInt::to_string).collect();
    let mut conv = Table::new("convergents α_i = p_i + q_i ξ", &["i", "p_i", "q_i", "α_i"]);
    for (j, (p, q)) in ctx.convergents.iter().enumerate() {
        conv.push(vec![
            (j as i64 - 1).to_string(),
            p.to_string(),
            q.to_string(),
            k.render(&ctx.alphas[j]),
        ]);
    }
    let mut ind = Table::new("indecomposables", &["element", "a", "b", "norm"]);
    for e in &ctx.indecomposables {
        ind.push(vec![
            k.render(e),
            e.a.to_string(),
            e.b.to_string(),
            k.norm(e).to_string(),
        ]);
    }
    let reps: Vec<ElementDoc> = ctx
        .indecomposable_reps()
        .iter()
        .map(|e| ElementDoc::new(e, k))
        .collect();
    let mut rep_table = Table::new("up to conjugation and totally positive units", &["element"]);
    for r in &reps {
        rep_table.push(vec![r.text.clone()]);
    }
    let notes = vec![
        format!("D = {d}"),
        format!("period of σ_D: [{}]", period.join(", ")),
        format!(
            "ε = {}, ε₊ = {}",
            k.render(&ctx.eps),
            k.render(&ctx.eps_plus)
        ),
    ];
    let json = json!({
        "d": d,
        "period": ctx.period.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "convergents": ctx.convergents.iter().map(|(p, q)| [p.to_string(), q.to_string()]).collect::<Vec<_>>(),
        "indecomposables": ctx.indecomposables.iter().map(|e| to_json(&ElementDoc::new(e, k))).collect::<Vec<_>>(),
        "representatives": to_json(&reps),
        "eps": to_json(&ElementDoc::new(&ctx.eps, k)),
        "eps_plus": to_json(&ElementDoc::new(&ctx.eps_plus, k)),
    });
    Ok(Output {
        json,
        notes,
        tables: vec![conv, ind, rep_table],
        code: EXIT_OK,
    })
}

fn cmd_units(d: i64) -> crate::Result<Output> {
    let ctx = FieldContext::new(d)?;
    let k = &ctx.field;
    let norm = k.norm(&ctx.eps);
    let mut t = Table::new(format!("D = {d}"), &["quantity", "value"]);
    t.push(vec!["ε".into(), k.render(&ctx.eps)]);
    t.push(vec!["N(ε)".into(), norm.to_string()]);
    t.push(vec!["ε₊".into(), k.render(&ctx.eps_plus)]);
    t.push(vec!["⌊ε₊/(ξ+ω)⌋".into(), ctx.floor_ratio_eps().to_string()]);
    t.push(vec!["period length".into(), ctx.period_len().to_string()]);
    let json = json!({
        "d": d,
        "eps": to_json(&ElementDoc::new(&ctx.eps, k)),
        "norm_eps": norm.to_string(),
        "eps_plus": to_json(&ElementDoc::new(&ctx.eps_plus, k)),
        "floor_ratio": ctx.floor_ratio_eps().to_string(),
        "period_len": ctx.period_len(),
    });
    Ok(Output {
        json,
        tables: vec![t],
        ..Output::default()
    })
}

const EXPLAIN_MAX_NORM: u64 = 10_000;

fn cmd_search(d: i64, m: u64, explain: bool) -> crate::Result<Output> {
    let field = FieldId::new(d)?;
    let report = search_m(field, m)?;
    let ctx = FieldContext::build(field)?;
    report.check_invariants(&ctx)?;
    let mut slice = Table::new(
        format!("p_K((⌈yξ⌉ + k) + y{})", omega_name(&field)),
        &["y\\k"],
    );
    slice
        .header
        .extend((0..=report.k_max).map(|k| k.to_string()));
    for row in &report.slice {
        let mut r = vec![row.y.to_string()];
        r.extend(row.counts.iter().map(|c| c.to_string()));
        slice.push(r);
    }
    let mut reps = Table::new(
        format!("elements with m partitions, D = {d}"),
        &["m", "elements"],
    );
    for row in &report.representatives {
        let els: Vec<&str> = row.elements.iter().map(|e| e.text.as_str()).collect();
        reps.push(vec![row.m.to_string(), els.join(", ")]);
    }
    let mut notes = vec![
        format!("D = {d}, M = {m}"),
        format!(
            "k_max = {}, y_max = {}, ε₊ = {}",
            report.k_max, report.y_max, report.eps_plus.text
        ),
    ];
    let mut tables = vec![slice, reps];
    let mut explained = Vec::new();
    if explain {
        let mut t = Table::new("partitions", &["element", "partition"]);
        for row in &report.representatives {
            for doc in &row.elements {
                let e = doc.element();
                if field.norm(&e) > BigInt::from(EXPLAIN_MAX_NORM) {
                    continue;
                }
                let parts = enumerate_partitions(&e, &field)?;
                let rendered: Vec<String> =
                    parts.iter().map(|p| render_partition(p, &field)).collect();
                for p in &rendered {
                    t.push(vec![doc.text.clone(), p.clone()]);
                }
                explained.push(json!({"element": to_json(doc), "partitions": rendered}));
            }
        }
        notes.push(format!(
            "partitions listed for representatives of norm ≤ {EXPLAIN_MAX_NORM}"
        ));
        tables.push(t);
    }
    let mut json = to_json(&report);
    if explain {
        json["explain"] = Value::Array(explained);
    }
    Ok(Output {
        json,
        notes,
        tables,
        code: EXIT_OK,
    })
}

fn cmd_dm(m: u64, d_max: u64) -> crate::Result<Output> {
    let ds = squarefree_up_to(d_max);
    let scan = dm_scan(m, &ds)?;
    let members: Vec<String> = scan.members.iter().map(u64::to_string).collect();
    let mut notes = vec![format!(
        "D({m}) ∩ [2, {d_max}] = {{{}}}",
        members.join(", ")
    )];
    if scan.exhaustive {
        notes.push("exhaustive: every larger D is covered by the threshold bounds".into());
    } else if complete_n(m).is_some() {
        notes.push("not exhaustive: raise --Dmax to cover the threshold bounds".into());
    } else {
        notes.push(format!(
            "not exhaustive: no threshold closes the scan for m = {m}"
        ));
    }
    let mut t = Table::new("", &["D", "method", "member"]);
    for e in &scan.entries {
        t.push(vec![
            e.d.to_string(),
            if e.searched { "search" } else { "threshold" }.into(),
            if e.member { "yes" } else { "no" }.into(),
        ]);
    }
    Ok(Output {
        json: to_json(&scan),
        notes,
        tables: vec![t],
        code: EXIT_OK,
    })
}

fn cmd_parity(d: i64, n: u64) -> crate::Result<Output> {
    let field = FieldId::new(d)?;
    let mut profile = cumulative_p(&field, n)?;
    let grid = PartitionGrid::build(FieldContext::build(field)?, n)?;
    let report = parity_check(&mut profile, &grid)?;
    let mut t = Table::new(
        "",
        &[
            "n",
            "a_n",
            "P_K(n)",
            "P_K(n) mod 2",
            "p_K(n)",
            "p_K(n) mod 2",
        ],
    );
    for i in 0..=n as usize {
        let p = grid.get(i as i64, 0).expect("grid covers n");
        t.push(vec![
            i.to_string(),
            if i == 0 {
                String::new()
            } else {
                profile.a[i - 1].to_string()
            },
            profile.cumulative[i].to_string(),
            profile.parity_bits[i].to_string(),
            p.to_string(),
            profile.p_diag[i].to_string(),
        ]);
    }
    let bits: Vec<String> = report.bits.iter().map(u8::to_string).collect();
    let mut notes = vec![
        format!("D = {d}, N = {n}"),
        format!("P_K(n) ≡ p_K(n) (mod 2) for all n ≤ {n}"),
        format!("p_K(n) mod 2 for n = 1..{n}: {}", bits.join(",")),
        format!("odd: {}, even: {}", report.odd, report.even),
    ];
    if field.class() == Congruence::One {
        notes.push("D ≡ 1 (mod 4): data only, no claim about infinitely many odd values".into());
    }
    Ok(Output {
        json: json!({"profile": to_json(&profile), "report": to_json(&report)}),
        notes,
        tables: vec![t],
        code: EXIT_OK,
    })
}

fn cmd_witness(d: Option<i64>, d_max: Option<u64>) -> crate::Result<Output> {
    let ds: Vec<u64> = match (d, d_max) {
        (Some(d), _) => vec![FieldId::new(d)?.d()],
        (None, Some(m)) => squarefree_up_to(m),
        (None, None) => return Err(Error::Unsupported("pass --D or --Dmax".into())),
    };
    let mut t = Table::new("", &["D", "α₄", "p_K(α₄)", "α₆", "p_K(α₆)", "⌈ξ⌉-ξ > 1/2"]);
    let mut docs = Vec::new();
    for &d in &ds {
        let field = FieldId::new(d as i64)?;
        let w4 = witness_m4(field)?;
        let w6 = if d == 5 {
            witness_m6_d5()?
        } else {
            witness_m6(field)?
        };
        let branch = match (d, w6.above_half) {
            (5, _) => "excluded".to_string(),
            (_, Some(true)) => "yes".into(),
            _ => "no".into(),
        };
        t.push(vec![
            d.to_string(),
            w4.alpha.text.clone(),
            w4.count.to_string(),
            w6.alpha.text.clone(),
            w6.count.to_string(),
            branch,
        ]);
        docs.push(json!({"m4": to_json(&w4), "m6": to_json(&w6)}));
    }
    let mut notes = Vec::new();
    if ds.contains(&5) {
        notes.push("D = 5: the six/nine construction gives 10 partitions".into());
    }
    Ok(Output {
        json: Value::Array(docs),
        notes,
        tables: vec![t],
        code: EXIT_OK,
    })
}

fn cmd_estimate(d: i64, x: i64, y: i64, steps: u64) -> crate::Result<Output> {
    let ctx = FieldContext::new(d)?;
    let field = ctx.field;
    let alpha = QElement::from_i64(x, y);
    if !field.is_totally_positive(&alpha) {
        return Err(Error::NotTotallyPositive(field.render(&alpha)));
    }
    let top = field.scale(&alpha, &BigInt::from(steps));
    let mut grid = PartitionGrid::new(ctx.clone());
    grid.count_extending(&top)?;
    let mut t = Table::new("", &["t", "tα", "p_K(tα)", "log p_K", "estimate", "ratio"]);
    let mut rows = Vec::new();
    for s in 1..=steps {
        let e = field.scale(&alpha, &BigInt::from(s));
        let p = grid.count(&e)?;
        let log_p = big_ln(&p);
        let est = asymptotic_estimate(&e, &ctx)?;
        let ratio = if est > 0.0 { log_p / est } else { f64::NAN };
        t.push(vec![
            s.to_string(),
            field.render(&e),
            p.to_string(),
            format!("{log_p:.4}"),
            format!("{est:.4}"),
            format!("{ratio:.4}"),
        ]);
        rows.push(json!({
            "t": s,
            "element": to_json(&ElementDoc::new(&e, &field)),
            "count": p.to_string(),
            "log_count": log_p,
            "estimate": est,
        }));
    }
    Ok(Output {
        json: json!({"d": d, "rows": rows}),
        notes: vec![format!(
            "log p_K(α) ~ 3(ζ(3)N(α)/√Δ)^(1/3), Δ = {}",
            ctx.discriminant
        )],
        tables: vec![t],
        code: EXIT_OK,
    })
}

/// Natural logarithm of a big integer, exact enough for display.
fn big_ln(v: &num_bigint::BigUint) -> f64 {
    let bits = v.bits();
    if bits < 1000 {
        return v.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    (v >> shift).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

fn cmd_thresholds(n: u64, d_max: u64) -> crate::Result<Output> {
    if n == 0 {
        return Err(Error::Unsupported("n must be at least 1".into()));
    }
    let rows = verify_thresholds(n, &squarefree_up_to(d_max))?;
    let mut t = Table::new("", &["D", "bound", "p_K(n)", "p(n)"]);
    for r in &rows {
        t.push(vec![
            r.d.to_string(),
            r.bound.to_string(),
            r.p_k.to_string(),
            r.p.to_string(),
        ]);
    }
    Ok(Output {
        json: to_json(&rows),
        notes: vec![format!(
            "n = {n}: p_K(n) = p(n) exactly above the bound, for all D ≤ {d_max}"
        )],
        tables: vec![t],
        code: EXIT_OK,
    })
}

fn cmd_verify(path: Option<&std::path::Path>) -> crate::Result<Output> {
    let docs = match path {
        Some(p) => fixtures::load(p)?,
        None => fixtures::embedded(),
    };
    let mut cache = GridCache::default();
    let mut t = Table::new("", &["fixture", "values", "status"]);
    let mut mismatches = Vec::new();
    let mut results = Vec::new();
    for fx in &docs {
        let bad = fixtures::verify(fx, &mut cache)?;
        let status = if bad.is_empty() { "PASS" } else { "FAIL" };
        t.push(vec![
            fx.provenance.clone(),
            fixtures::cell_count(fx).to_string(),
            status.into(),
        ]);
        results.push(json!({"fixture": fx.provenance, "values": fixtures::cell_count(fx), "pass": bad.is_empty()}));
        mismatches.extend(bad);
    }
    let mut notes = Vec::new();
    let code = if mismatches.is_empty() {
        notes.push(format!("PASS, {} fixtures", docs.len()));
        EXIT_OK
    } else {
        notes.push(format!("FAIL, {} mismatches", mismatches.len()));
        notes.extend(mismatches.iter().map(|m| m.to_string()));
        EXIT_VERIFY
    };
    Ok(Output {
        json: json!({"fixtures": results, "mismatches": to_json(&mismatches)}),
        notes,
        tables: vec![t],
        code,
    })
}
