//! The `semdiff` command line: argument handling, file loading, and the
//! history report. [`run`] is the whole program minus the process wrapper,
//! so tests can drive it in-process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use semdiff_core::ad::{addiff, compare_ad, parse_ad, parse_trace, ActivityDiagram};
use semdiff_core::cd::{cddiff, compare_cd, parse_cd, parse_om, ClassDiagram};
use semdiff_core::render::{
    render_ad_diff, render_cd_diff, render_om, render_trace, Direction, Format,
};
use semdiff_core::{ParseError, Verdict, VerdictValue};

/// Exit code for an empty diff or equivalent models.
pub const SAME: i32 = 0;
/// Exit code when semantic differences were found.
pub const DIFFERENT: i32 = 1;
/// Exit code for usage, parse and input errors.
pub const ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "semdiff",
    version,
    about = "Semantic differences between class diagrams or activity diagrams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Class diagrams: object models one version admits and the other does not.
    #[command(subcommand)]
    Cd(CdCommand),
    /// Activity diagrams: traces one version allows and the other does not.
    #[command(subcommand)]
    Ad(AdCommand),
    /// Compare each consecutive pair in a list of versions.
    History(HistoryArgs),
    /// Render a single object model or trace.
    #[command(subcommand)]
    Render(RenderCommand),
}

#[derive(Subcommand, Debug)]
enum CdCommand {
    /// Witness object models in A but not in B.
    Diff {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        bound: Bound,
        /// Stop after this many witnesses.
        #[arg(long, default_value_t = 10)]
        max_witnesses: usize,
        #[arg(long, value_enum, default_value_t = OutFormat::Text)]
        format: OutFormat,
        /// Diff B against A instead.
        #[arg(long)]
        reverse: bool,
    },
    /// Print the bounded comparison verdict.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        bound: Bound,
    },
}

#[derive(Subcommand, Debug)]
enum AdCommand {
    /// Shortest witness traces possible in A but not in B.
    Diff {
        a: PathBuf,
        b: PathBuf,
        /// Stop after this many witnesses.
        #[arg(long, default_value_t = 10)]
        max_witnesses: usize,
        /// Longest trace to consider (default: no limit).
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long, value_enum, default_value_t = OutFormat::Text)]
        format: OutFormat,
        /// Diff B against A instead.
        #[arg(long)]
        reverse: bool,
    },
    /// Print the exact comparison verdict.
    Compare { a: PathBuf, b: PathBuf },
}

#[derive(Args, Debug, Clone, Copy)]
struct Bound {
    /// Maximum number of objects per class.
    #[arg(long = "bound", short = 'k', default_value_t = 3)]
    k: usize,
}

#[derive(Args, Debug)]
struct HistoryArgs {
    kind: Kind,
    #[arg(required = true, num_args = 2..)]
    files: Vec<PathBuf>,
    #[command(flatten)]
    bound: Bound,
    /// Cap on the witnesses counted per direction.
    #[arg(long, default_value_t = 10)]
    max_witnesses: usize,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    format: TableFormat,
}

#[derive(Subcommand, Debug)]
enum RenderCommand {
    Om {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = OutFormat::Text)]
        format: OutFormat,
    },
    Trace {
        ad: PathBuf,
        trace: PathBuf,
        #[arg(long, value_enum, default_value_t = OutFormat::Text)]
        format: OutFormat,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Cd,
    Ad,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum OutFormat {
    Text,
    Dot,
    Json,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Text => Format::Text,
            OutFormat::Dot => Format::Dot,
            OutFormat::Json => Format::Json,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum TableFormat {
    Text,
    Json,
}

/// A user-facing failure: printed to the error stream, exit code 2.
#[derive(Debug)]
pub struct Failure(String);

impl Failure {
    fn parse(file: &Path, e: ParseError) -> Self {
        let mut s = String::new();
        for (i, d) in e.diagnostics.iter().enumerate() {
            if i > 0 {
                s.push('\n');
            }
            let _ = write!(s, "{}:{d}", file.display());
        }
        Failure(s)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn read(file: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(file)
        .map_err(|e| Failure(format!("{}: cannot read: {e}", file.display())))
}

/// The first word of a model file, skipping comments.
fn sniff(text: &str) -> Option<&str> {
    text.lines()
        .map(|l| l.split("//").next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .and_then(|l| l.split(|c: char| !c.is_alphanumeric()).next())
}

fn check_kind(file: &Path, text: &str, kind: Kind) -> Result<(), Failure> {
    let found = match sniff(text) {
        Some("classdiagram") => Kind::Cd,
        Some("activity") => Kind::Ad,
        _ => return Ok(()),
    };
    if found == kind {
        return Ok(());
    }
    let name = |k| {
        if k == Kind::Cd {
            "a class diagram"
        } else {
            "an activity diagram"
        }
    };
    Err(Failure(format!(
        "{}: is {}, expected {}",
        file.display(),
        name(found),
        name(kind)
    )))
}

pub fn load_cd(file: &Path) -> Result<ClassDiagram, Failure> {
    let text = read(file)?;
    check_kind(file, &text, Kind::Cd)?;
    parse_cd(&text).map_err(|e| Failure::parse(file, e))
}

pub fn load_ad(file: &Path) -> Result<ActivityDiagram, Failure> {
    let text = read(file)?;
    check_kind(file, &text, Kind::Ad)?;
    parse_ad(&text).map_err(|e| Failure::parse(file, e))
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| p.display().to_string())
}

/// One consecutive pair of versions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HistoryRow {
    pub from: String,
    pub to: String,
    pub verdict: VerdictValue,
    /// Witnesses from `from` to `to`, up to the cap.
    pub forward: usize,
    pub backward: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HistoryReport {
    pub kind: Kind,
    /// Per-class bound for class diagrams; absent for activity diagrams.
    pub bound: Option<usize>,
    pub rows: Vec<HistoryRow>,
}

impl HistoryReport {
    pub fn all_equivalent(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.verdict == VerdictValue::Equivalent)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}

impl std::fmt::Display for HistoryReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let header = ["FROM", "TO", "VERDICT", "FORWARD", "BACKWARD"];
        let cells: Vec<[String; 5]> = self
            .rows
            .iter()
            .map(|r| {
                let verdict = Verdict {
                    value: r.verdict,
                    bound: self.bound,
                };
                [
                    r.from.clone(),
                    r.to.clone(),
                    verdict.to_string(),
                    r.forward.to_string(),
                    r.backward.to_string(),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |f: &mut std::fmt::Formatter<'_>, row: &[&str]| -> std::fmt::Result {
            let mut s = String::new();
            for (i, (c, w)) in row.iter().zip(widths).enumerate() {
                if i > 0 {
                    s.push_str("  ");
                }
                if i >= 3 {
                    let _ = write!(s, "{c:>w$}");
                } else {
                    let _ = write!(s, "{c:<w$}");
                }
            }
            writeln!(f, "{}", s.trim_end())
        };
        line(f, &header)?;
        for row in &cells {
            line(f, &row.each_ref().map(String::as_str))?;
        }
        Ok(())
    }
}

/// Verdicts and witness counts for each consecutive pair of `files`.
pub fn history_report(
    files: &[PathBuf],
    kind: Kind,
    k: usize,
    max_witnesses: usize,
) -> Result<HistoryReport, Failure> {
    if files.len() < 2 {
        return Err(Failure("history needs at least two files".into()));
    }
    let mut rows = Vec::new();
    match kind {
        Kind::Cd => {
            let cds = files
                .iter()
                .map(|f| load_cd(f))
                .collect::<Result<Vec<_>, _>>()?;
            for (i, w) in cds.windows(2).enumerate() {
                let forward = cddiff(&w[0], &w[1], k, max_witnesses).witnesses.len();
                let backward = cddiff(&w[1], &w[0], k, max_witnesses).witnesses.len();
                rows.push(HistoryRow {
                    from: file_name(&files[i]),
                    to: file_name(&files[i + 1]),
                    verdict: compare_cd(&w[0], &w[1], k).value,
                    forward,
                    backward,
                });
            }
        }
        Kind::Ad => {
            let ads = files
                .iter()
                .map(|f| load_ad(f))
                .collect::<Result<Vec<_>, _>>()?;
            for (i, w) in ads.windows(2).enumerate() {
                let ctx = |e: semdiff_core::ad::AdError| {
                    Failure(format!(
                        "{} vs {}: {e}",
                        file_name(&files[i]),
                        file_name(&files[i + 1])
                    ))
                };
                let forward = addiff(&w[0], &w[1], max_witnesses, None)
                    .map_err(ctx)?
                    .witnesses
                    .len();
                let backward = addiff(&w[1], &w[0], max_witnesses, None)
                    .map_err(ctx)?
                    .witnesses
                    .len();
                rows.push(HistoryRow {
                    from: file_name(&files[i]),
                    to: file_name(&files[i + 1]),
                    verdict: compare_ad(&w[0], &w[1]).map_err(ctx)?.value,
                    forward,
                    backward,
                });
            }
        }
    }
    Ok(HistoryReport {
        kind,
        bound: (kind == Kind::Cd).then_some(k),
        rows,
    })
}

fn diff_code(count: usize, exhausted: bool, cap: usize) -> i32 {
    if count > 0 || (!exhausted && count >= cap) {
        DIFFERENT
    } else {
        SAME
    }
}

fn verdict_code(v: Verdict) -> i32 {
    if v.value == VerdictValue::Equivalent {
        SAME
    } else {
        DIFFERENT
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let mut emit = |s: &str| {
        out.write_all(s.as_bytes())
            .map_err(|e| Failure(format!("cannot write output: {e}")))
    };
    let ad_err = |e: semdiff_core::ad::AdError| Failure(e.to_string());
    match cli.command {
        Command::Cd(CdCommand::Diff {
            a,
            b,
            bound,
            max_witnesses,
            format,
            reverse,
        }) => {
            let (x, y) = (load_cd(&a)?, load_cd(&b)?);
            let (left, right, dir) = if reverse {
                (&y, &x, Direction::BtoA)
            } else {
                (&x, &y, Direction::AtoB)
            };
            let d = cddiff(left, right, bound.k, max_witnesses);
            emit(&render_cd_diff(&d, dir, format.into()).payload)?;
            Ok(diff_code(d.witnesses.len(), d.exhausted, max_witnesses))
        }
        Command::Cd(CdCommand::Compare { a, b, bound }) => {
            let v = compare_cd(&load_cd(&a)?, &load_cd(&b)?, bound.k);
            emit(&format!("{v}\n"))?;
            Ok(verdict_code(v))
        }
        Command::Ad(AdCommand::Diff {
            a,
            b,
            max_witnesses,
            max_len,
            format,
            reverse,
        }) => {
            let (x, y) = (load_ad(&a)?, load_ad(&b)?);
            let (left, right, dir) = if reverse {
                (&y, &x, Direction::BtoA)
            } else {
                (&x, &y, Direction::AtoB)
            };
            let d = addiff(left, right, max_witnesses, max_len).map_err(ad_err)?;
            emit(&render_ad_diff(left, &d, dir, format.into()).payload)?;
            Ok(diff_code(d.witnesses.len(), d.exhausted, max_witnesses))
        }
        Command::Ad(AdCommand::Compare { a, b }) => {
            let v = compare_ad(&load_ad(&a)?, &load_ad(&b)?).map_err(ad_err)?;
            emit(&format!("{v}\n"))?;
            Ok(verdict_code(v))
        }
        Command::History(h) => {
            let report = history_report(&h.files, h.kind, h.bound.k, h.max_witnesses)?;
            match h.format {
                TableFormat::Text => emit(&report.to_string())?,
                TableFormat::Json => emit(&report.to_json())?,
            }
            Ok(if report.all_equivalent() {
                SAME
            } else {
                DIFFERENT
            })
        }
        Command::Render(RenderCommand::Om { file, format }) => {
            let text = read(&file)?;
            let om = parse_om(&text).map_err(|e| Failure::parse(&file, e))?;
            emit(&render_om(&om, format.into()).payload)?;
            Ok(SAME)
        }
        Command::Render(RenderCommand::Trace { ad, trace, format }) => {
            let diagram = load_ad(&ad)?;
            let text = read(&trace)?;
            let t = parse_trace(&text).map_err(|e| Failure::parse(&trace, e))?;
            emit(&render_trace(&diagram, &t, format.into()).payload)?;
            Ok(SAME)
        }
    }
}

/// Runs `semdiff` with `args` (including the program name) and returns
/// the exit code: 0 for no differences, 1 for differences, 2 for errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
                ERROR
            } else {
                let _ = out.write_all(rendered.as_bytes());
                SAME
            };
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "semdiff: {f}");
            ERROR
        }
    }
}
