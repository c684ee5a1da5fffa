//! The `qcusp` command line: series and tower file formats and the
//! subcommands built on them.
//!
//! A series file is a header of `key=value` lines followed by one term per
//! line:
//!
//! ```text
//! kind=frac
//! p=3
//! k=6
//! s=2
//! prec=6
//! depth_bound=2
//! deg_bound=4
//! laurent=false
//! cusp_label=inf
//! e=1
//! 1/p^2 : 1
//! 1 : p^1*(1 + 2*z)
//! ```
//!
//! `kind=charp` files hold residues in `0..p` and omit `k`, `s` and `prec`.
//! Only `p` is mandatory; lines starting with `#` are comments. Exit codes:
//! 0 for yes or success, 1 for no, 2 for unknown at precision, 64 for usage
//! and input errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::action::{act_cusp, ht, CuspPoint, Mat2};
use crate::coeff::{CycloCoeff, RingCtx};
use crate::error::{Error, Result};
use crate::modular::{j_inverse_series, j_series};
use crate::principles::{detect_level, extends_to_cusp, is_integral, PrincipleVerdict};
use crate::series::{Exponent, FracSeries};
use crate::tiltperf::{charp_from_tower, tower_from_charp, CharPSeries, TiltTower};
use crate::trace::tate_trace;
use crate::valuation::{classify_point, generise, v1minus};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Header values that replace those found in input files.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub p: Option<u64>,
    pub k: Option<u32>,
    pub s: Option<u32>,
    pub depth: Option<u32>,
    pub deg: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SeriesBody {
    Frac(FracSeries),
    CharP(CharPSeries),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesFile {
    pub body: SeriesBody,
    pub cusp_label: String,
    pub e: i64,
}

impl SeriesFile {
    pub fn frac(f: FracSeries) -> Self {
        SeriesFile {
            body: SeriesBody::Frac(f),
            cusp_label: String::new(),
            e: 1,
        }
    }

    pub fn charp(f: CharPSeries) -> Self {
        SeriesFile {
            body: SeriesBody::CharP(f),
            cusp_label: String::new(),
            e: 1,
        }
    }

    fn expect_frac(&self) -> Result<&FracSeries> {
        match &self.body {
            SeriesBody::Frac(f) => Ok(f),
            SeriesBody::CharP(_) => Err(Error::Usage("expected a kind=frac series file".into())),
        }
    }

    fn to_charp(&self) -> Result<CharPSeries> {
        match &self.body {
            SeriesBody::Frac(f) => CharPSeries::from_frac(f),
            SeriesBody::CharP(g) => Ok(g.clone()),
        }
    }
}

const HEADER_KEYS: [&str; 10] = [
    "kind",
    "p",
    "k",
    "s",
    "prec",
    "depth_bound",
    "deg_bound",
    "laurent",
    "cusp_label",
    "e",
];

fn is_comment_or_blank(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

struct RawTerm {
    line: usize,
    column: usize,
    exponent: Exponent,
    coeff: String,
}

fn parse_value<T: std::str::FromStr>(header: &BTreeMap<&str, (usize, String)>, key: &str) -> Result<Option<T>> {
    match header.get(key) {
        None => Ok(None),
        Some((line, v)) => v
            .parse()
            .map(Some)
            .map_err(|_| Error::parse(*line, key.len() + 2, format!("bad value {v:?} for {key}"))),
    }
}

/// Parses a series file, applying `ov` on top of the header.
pub fn parse_series_with(text: &str, ov: &Overrides) -> Result<SeriesFile> {
    let mut header: BTreeMap<&str, (usize, String)> = BTreeMap::new();
    let mut body: Vec<(usize, &str)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        if is_comment_or_blank(line) {
            continue;
        }
        if line.contains(':') || !body.is_empty() {
            body.push((n, line));
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(n, 1, "expected key=value or a term line"))?;
        let key = key.trim();
        let key = HEADER_KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| Error::parse(n, 1, format!("unknown header key {key:?}")))?;
        if header.insert(key, (n, value.trim().to_string())).is_some() {
            return Err(Error::parse(n, 1, format!("repeated header key {key}")));
        }
    }
    let kind = header.get("kind").map(|(_, v)| v.as_str()).unwrap_or("frac");
    let p: u64 = match ov.p {
        Some(p) => p,
        None => parse_value(&header, "p")?.ok_or_else(|| Error::parse(1, 1, "missing header key p"))?,
    };
    let mut terms: Vec<RawTerm> = Vec::new();
    let mut seen: BTreeMap<Exponent, usize> = BTreeMap::new();
    for (n, line) in body {
        let (lhs, rhs) = line
            .split_once(':')
            .ok_or_else(|| Error::parse(n, 1, "expected '<exponent> : <coefficient>'"))?;
        let exponent = Exponent::parse(lhs, p).map_err(|(c, m)| Error::parse(n, c + 1, m))?;
        if let Some(first) = seen.insert(exponent, n) {
            return Err(Error::parse(
                n,
                1,
                format!("exponent {} already given on line {first}", exponent.to_text(p)),
            ));
        }
        terms.push(RawTerm {
            line: n,
            column: lhs.len() + 2,
            exponent,
            coeff: rhs.to_string(),
        });
    }
    let depth_bound = match ov.depth {
        Some(d) => d,
        None => parse_value(&header, "depth_bound")?
            .unwrap_or_else(|| terms.iter().map(|t| t.exponent.depth(p)).max().unwrap_or(0)),
    };
    let (deg_bound, deg_overridden) = match &ov.deg {
        Some(d) => (Exponent::parse(d, p).map_err(|(_, m)| Error::Usage(format!("--deg: {m}")))?, true),
        None => match header.get("deg_bound") {
            Some((n, v)) => (Exponent::parse(v, p).map_err(|(c, m)| Error::parse(*n, c + 11, m))?, false),
            None => (
                terms.iter().map(|t| t.exponent).max().unwrap_or_else(Exponent::zero),
                false,
            ),
        },
    };
    if deg_overridden {
        terms.retain(|t| t.exponent <= deg_bound);
    }
    let laurent = parse_value::<bool>(&header, "laurent")?.unwrap_or(false);
    let cusp_label = header.get("cusp_label").map(|(_, v)| v.clone()).unwrap_or_default();
    let e = parse_value::<i64>(&header, "e")?.unwrap_or(1);
    let body = match kind {
        "frac" => {
            let k = match ov.k {
                Some(k) => k,
                None => parse_value(&header, "k")?.ok_or_else(|| Error::parse(1, 1, "missing header key k"))?,
            };
            let s = ov.s.map_or_else(|| parse_value(&header, "s").map(|s| s.unwrap_or(0)), Ok)?;
            let ctx = RingCtx::new(p, k, s)?;
            let mut parsed = Vec::with_capacity(terms.len());
            for t in &terms {
                let c = CycloCoeff::parse(&ctx, &t.coeff).map_err(|(c, m)| Error::parse(t.line, t.column + c, m))?;
                parsed.push((t.exponent, c));
            }
            let f = FracSeries::from_terms(&ctx, parsed, deg_bound, depth_bound, laurent)?;
            let f = match parse_value::<i64>(&header, "prec")? {
                Some(prec) => f.truncate_abs(prec),
                None => f,
            };
            SeriesBody::Frac(f)
        }
        "charp" => {
            let mut parsed = Vec::with_capacity(terms.len());
            for t in &terms {
                let c: i64 = t
                    .coeff
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(t.line, t.column, format!("bad residue {:?}", t.coeff.trim())))?;
                parsed.push((t.exponent, c.rem_euclid(p as i64) as u64));
            }
            SeriesBody::CharP(CharPSeries::new(p, parsed, deg_bound, depth_bound, laurent)?)
        }
        other => {
            let line = header.get("kind").map_or(1, |(n, _)| *n);
            return Err(Error::parse(line, 6, format!("unknown kind {other:?}")));
        }
    };
    Ok(SeriesFile { body, cusp_label, e })
}

pub fn parse_series(text: &str) -> Result<SeriesFile> {
    parse_series_with(text, &Overrides::default())
}

/// Canonical text: fixed header order, terms by increasing exponent.
pub fn emit_series(file: &SeriesFile) -> String {
    let mut out = String::new();
    match &file.body {
        SeriesBody::Frac(f) => {
            let ctx = f.ctx();
            let p = ctx.p();
            let _ = write!(
                out,
                "kind=frac\np={p}\nk={}\ns={}\nprec={}\ndepth_bound={}\ndeg_bound={}\nlaurent={}\n",
                ctx.k(),
                ctx.s(),
                f.abs_prec(),
                f.depth_bound(),
                f.deg_bound().to_text(p),
                f.is_laurent()
            );
            let _ = write!(out, "cusp_label={}\ne={}\n", file.cusp_label, file.e);
            for (e, c) in f.terms() {
                let _ = writeln!(out, "{} : {}", e.to_text(p), c.to_text());
            }
        }
        SeriesBody::CharP(g) => {
            let p = g.p();
            let _ = write!(
                out,
                "kind=charp\np={p}\ndepth_bound={}\ndeg_bound={}\nlaurent={}\n",
                g.depth_bound(),
                g.deg_bound().to_text(p),
                g.is_laurent()
            );
            let _ = write!(out, "cusp_label={}\ne={}\n", file.cusp_label, file.e);
            for (e, c) in g.terms() {
                let _ = writeln!(out, "{} : {c}", e.to_text(p));
            }
        }
    }
    out
}

/// `tower T`, `p=…`, then one `component i` block per component.
pub fn emit_tower(t: &TiltTower) -> String {
    let mut out = format!("tower {}\np={}\neffective_depth={}\n", t.depth(), t.p(), t.effective_depth());
    for (i, f) in t.components().iter().enumerate() {
        let _ = writeln!(out, "component {i}");
        let p = f.p();
        let _ = write!(
            out,
            "depth_bound={}\ndeg_bound={}\nlaurent={}\n",
            f.depth_bound(),
            f.deg_bound().to_text(p),
            f.is_laurent()
        );
        for (e, c) in f.terms() {
            let _ = writeln!(out, "{} : {c}", e.to_text(p));
        }
    }
    out
}

pub fn parse_tower(text: &str) -> Result<TiltTower> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !is_comment_or_blank(l));
    let (n, first) = lines.next().ok_or_else(|| Error::parse(1, 1, "empty tower file"))?;
    let depth: usize = first
        .trim()
        .strip_prefix("tower ")
        .and_then(|d| d.trim().parse().ok())
        .ok_or_else(|| Error::parse(n + 1, 1, "expected 'tower <depth>'"))?;
    let mut p_line = None;
    let mut blocks: Vec<(usize, String)> = Vec::new();
    for (n, line) in lines {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix("component ") {
            if rest.trim().parse::<usize>().ok() != Some(blocks.len()) {
                return Err(Error::parse(n + 1, 11, format!("expected component {}", blocks.len())));
            }
            blocks.push((n + 1, String::new()));
        } else if let Some((_, block)) = blocks.last_mut() {
            block.push_str(line);
            block.push('\n');
        } else if let Some(v) = t.strip_prefix("p=") {
            p_line = Some(v.trim().to_string());
        } else if t.starts_with("effective_depth=") {
            continue;
        } else {
            return Err(Error::parse(n + 1, 1, "expected p=… or a component block"));
        }
    }
    let p = p_line.ok_or_else(|| Error::parse(1, 1, "missing p= line"))?;
    if blocks.len() != depth {
        return Err(Error::parse(n + 1, 7, format!("header says {depth} components, found {}", blocks.len())));
    }
    let mut components = Vec::with_capacity(depth);
    for (start, block) in blocks {
        let text = format!("kind=charp\np={p}\n{block}");
        let file = parse_series(&text).map_err(|e| match e {
            Error::Parse { line, column, message } => Error::Parse {
                line: start + line.saturating_sub(2),
                column,
                message,
            },
            other => other,
        })?;
        components.push(file.to_charp()?);
    }
    TiltTower::new(components)
}

fn verdict_record(v: &PrincipleVerdict, p: u64) -> String {
    let mut out = format!("verdict={}\n", v.verdict);
    if let Some((e, c)) = &v.witness {
        let _ = writeln!(out, "witness={} : {}", e.to_text(p), c.to_text());
    }
    if let Some(note) = &v.note {
        let _ = writeln!(out, "note={note}");
    }
    out
}

#[derive(Parser, Debug)]
#[command(name = "qcusp", version, about = "Exact q-expansions at the cusps of p-adic modular curves")]
struct Cli {
    /// Prime, overriding file headers.
    #[arg(long, global = true)]
    p: Option<u64>,
    /// p-adic precision.
    #[arg(long, global = true)]
    k: Option<u32>,
    /// Cyclotomic depth of the coefficient ring.
    #[arg(long, global = true)]
    s: Option<u32>,
    /// Depth bound of input series; for `tilt`, the tower depth.
    #[arg(long, global = true)]
    depth: Option<u32>,
    /// Degree bound of input series, e.g. `5` or `7/p^2`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    deg: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit the j-invariant, optionally as j(q^e).
    Jseries {
        #[arg(long, default_value_t = 12)]
        terms: usize,
        #[arg(long, default_value_t = 1)]
        e: i64,
    },
    /// Emit q as a series in w = 1/j.
    RevertJ {
        #[arg(long, default_value_t = 10)]
        terms: usize,
    },
    /// Apply the normalized trace to level n.
    Trace {
        #[arg(long)]
        n: u32,
        file: PathBuf,
    },
    /// Does the function extend over the cusp?
    CheckExtends { file: PathBuf },
    /// Smallest level the expansion comes from.
    Level { file: PathBuf },
    /// Are all coefficients integral?
    Integral { file: PathBuf },
    /// Act by a matrix in Gamma0(p) on the cusp point (at, series).
    Act {
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long)]
        ex: Option<i64>,
        /// Upper triangular matrix of the starting point; identity by default.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        /// Matrix precision; defaults to the cyclotomic depth (at least 1).
        #[arg(long)]
        m: Option<u32>,
        file: PathBuf,
    },
    /// Hodge-Tate period of the cusp point with the given upper triangular matrix.
    Ht {
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long)]
        m: Option<u32>,
        file: Option<PathBuf>,
    },
    /// Build the tilt tower of a mod-p series.
    Tilt { file: PathBuf },
    /// Classify the point by the value of the given j-expansion.
    ClassifyPoint { file: PathBuf },
    /// Take p-th roots (or powers) of a mod-p series, or read back a tower.
    Perfection {
        #[arg(long, default_value_t = 1)]
        steps: u32,
        #[arg(long)]
        frobenius: bool,
        file: PathBuf,
    },
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn read_input(path: &PathBuf) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
            .map_err(|e| Error::Usage(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutput {
                    stdout: String::new(),
                    stderr: text,
                    code: EXIT_USAGE,
                }
            } else {
                CliOutput {
                    stdout: text,
                    stderr: String::new(),
                    code: EXIT_YES,
                }
            };
        }
    };
    match execute(cli) {
        Ok((stdout, code)) => CliOutput {
            stdout,
            stderr: String::new(),
            code,
        },
        Err(e) => CliOutput {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: EXIT_USAGE,
        },
    }
}

fn execute(cli: Cli) -> Result<(String, i32)> {
    let ov = Overrides {
        p: cli.p,
        k: cli.k,
        s: cli.s,
        depth: cli.depth,
        deg: cli.deg.clone(),
    };
    let load = |path: &PathBuf| parse_series_with(&read_input(path)?, &ov);
    let need_p = || cli.p.ok_or_else(|| Error::Usage("--p is required".into()));
    match &cli.command {
        Command::Jseries { terms, e } => {
            let ctx = RingCtx::new(need_p()?, cli.k.unwrap_or(10), cli.s.unwrap_or(0))?;
            let terms = match &cli.deg {
                Some(d) => d.parse().map_err(|_| Error::Usage(format!("--deg {d:?} is not an integer")))?,
                None => *terms,
            };
            let j = j_series(&ctx, terms)?.rescale(*e)?;
            let file = SeriesFile {
                body: SeriesBody::Frac(j),
                cusp_label: "inf".into(),
                e: *e,
            };
            Ok((emit_series(&file), EXIT_YES))
        }
        Command::RevertJ { terms } => {
            let ctx = RingCtx::new(need_p()?, cli.k.unwrap_or(10), cli.s.unwrap_or(0))?;
            let q = j_inverse_series(&ctx, *terms)?;
            Ok((emit_series(&SeriesFile::frac(q)), EXIT_YES))
        }
        Command::Trace { n, file } => {
            let mut f = load(file)?;
            let t = tate_trace(f.expect_frac()?, *n)?;
            f.body = SeriesBody::Frac(t);
            Ok((emit_series(&f), EXIT_YES))
        }
        Command::CheckExtends { file } => {
            let f = load(file)?;
            let f = f.expect_frac()?;
            let v = extends_to_cusp(f);
            Ok((verdict_record(&v, f.p()), v.verdict.exit_code()))
        }
        Command::Level { file } => {
            let f = load(file)?;
            Ok((format!("{}\n", detect_level(f.expect_frac()?)?), EXIT_YES))
        }
        Command::Integral { file } => {
            let f = load(file)?;
            let f = f.expect_frac()?;
            let v = is_integral(f)?;
            Ok((verdict_record(&v, f.p()), v.verdict.exit_code()))
        }
        Command::Act { gamma, ex, at, m, file } => {
            let x = load(file)?;
            let f = x.expect_frac()?;
            let p = f.p();
            let m = m.unwrap_or(f.ctx().s().max(1));
            let g = Mat2::parse(p, m, gamma)?;
            let start = match at {
                Some(a) => Mat2::parse(p, m, a)?,
                None => Mat2::identity(p, m)?,
            };
            let point = CuspPoint::new(start, f.clone(), ex.unwrap_or(x.e), x.cusp_label.clone())?;
            let y = act_cusp(&g, &point)?;
            let [a, b, c, d] = y.gamma().entries();
            let file = SeriesFile {
                body: SeriesBody::Frac(y.series().clone()),
                cusp_label: y.label().to_string(),
                e: y.e(),
            };
            Ok((format!("gamma={a},{b},{c},{d}\n{}", emit_series(&file)), EXIT_YES))
        }
        Command::Ht { gamma, m, file } => {
            let (p, s, series, e) = match file {
                Some(path) => {
                    let x = load(path)?;
                    let f = x.expect_frac()?.clone();
                    (f.p(), f.ctx().s(), Some(f), x.e)
                }
                None => (need_p()?, cli.s.unwrap_or(0), None, 1),
            };
            let m = m.unwrap_or(s.max(1));
            let g = Mat2::parse(p, m, gamma)?;
            let series = match series {
                Some(f) => f,
                None => {
                    let ctx = RingCtx::new(p, cli.k.unwrap_or(1), 0)?;
                    FracSeries::monomial(&ctx, Exponent::integer(1), CycloCoeff::one(&ctx), Exponent::integer(1))?
                }
            };
            let x = CuspPoint::new(g, series, e, "")?;
            Ok((format!("{}\n", ht(&x)), EXIT_YES))
        }
        Command::Tilt { file } => {
            let depth = cli
                .depth
                .ok_or_else(|| Error::Usage("tilt needs --depth <T>".into()))?;
            // --depth names the tower depth here, not a header override.
            let ov = Overrides { depth: None, ..ov.clone() };
            let g = parse_series_with(&read_input(file)?, &ov)?.to_charp()?;
            let t = tower_from_charp(&g, depth as usize)?;
            Ok((emit_tower(&t), EXIT_YES))
        }
        Command::ClassifyPoint { file } => {
            let f = load(file)?;
            let v = v1minus(f.expect_frac()?)?;
            Ok((
                format!("type={}\nv1minus={v}\ngenerised={}\n", classify_point(&v), generise(&v)),
                EXIT_YES,
            ))
        }
        Command::Perfection { steps, frobenius, file } => {
            let text = read_input(file)?;
            let g = if text.trim_start().starts_with("tower") {
                charp_from_tower(&parse_tower(&text)?)
            } else {
                let mut g = parse_series_with(&text, &ov)?.to_charp()?;
                for _ in 0..*steps {
                    g = if *frobenius { g.frobenius() } else { g.frobenius_inv()? };
                }
                g
            };
            Ok((emit_series(&SeriesFile::charp(g)), EXIT_YES))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "kind=frac\np=3\nk=6\ns=2\nprec=6\ndepth_bound=2\ndeg_bound=4\nlaurent=false\ncusp_label=inf\ne=1\n1/p^2 : 1\n1 : p^1*(1 + 2*z)\n";

    #[test]
    fn round_trip() {
        let f = parse_series(SAMPLE).unwrap();
        assert_eq!(emit_series(&f), SAMPLE);
        let minimal = parse_series("p=3\nk=4\n1/p^1 : 1\n").unwrap();
        let f = minimal.expect_frac().unwrap();
        assert_eq!(f.terms().count(), 1);
        assert_eq!(f.min_exponent(), Some(Exponent::new(1, 1, 3)));
    }

    #[test]
    fn parse_errors() {
        let bad = parse_series("p=3\nk=4\n-1 : 1\n");
        assert!(matches!(bad, Err(Error::NegativeExponent(_))));
        match parse_series("p=3\nk=4\n1 : 1\n1 : 2\n") {
            Err(Error::Parse { line: 4, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_series("p=3\nk=4\n1 : 3*q\n") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_series("p=3\nk=4\nfoo=1\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(
            parse_series("p=3\nk=4\ndepth_bound=0\n1/p^1 : 1\n"),
            Err(Error::DepthExceedsBound { .. })
        ));
    }

    #[test]
    fn tower_round_trip() {
        let g = parse_series("kind=charp\np=2\ndeg_bound=4\n1 : 1\n2 : 1\n").unwrap().to_charp().unwrap();
        let t = tower_from_charp(&g, 3).unwrap();
        let text = emit_tower(&t);
        assert_eq!(parse_tower(&text).unwrap(), t);
        assert!(text.starts_with("tower 3\n"));
    }

    #[test]
    fn usage_errors() {
        let out = run(["qcusp", "frobnicate"]);
        assert_eq!(out.code, EXIT_USAGE);
        let out = run(["qcusp", "jseries"]);
        assert_eq!(out.code, EXIT_USAGE);
        assert!(out.stderr.contains("--p"));
        assert_eq!(run(["qcusp", "--help"]).code, EXIT_YES);
    }
}
