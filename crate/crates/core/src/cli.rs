//! Command-line front end. `run` executes a parsed command and returns the
//! exit code: 0 on success, 1 when a verification fails, 2 on bad input.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::b2::{Bit, render_truth_table};
use crate::carrier::FiniteSet;
use crate::catalog::{self, CatalogMeasure, CounterexampleCase, ElementarySet, SetValue};
use crate::derivable::{LocallyFiniteSet, derivative_at, mu_locfin};
use crate::integration::{
    IndefiniteIntegral, MeasurableFunction, MeasurableSpace, RealFunction, SpaceMeasure, Support,
    dual_left_integral, integral, integral_on, left_integral, left_primitive,
};
use crate::interval::{IntervalOp, iv_op};
use crate::literal;
use crate::ls::LSMeasure;
use crate::rational::{ExtRational, q};
use crate::set_function::{
    DisjointFamily, TabulatedSetFunction, TailCertificate, TailReason, additivity_report, additivity_star_report,
    check_countable_family,
};
use crate::set_ring::{FiniteUniverse, LawPair, SetRingFamily, is_set_algebra, ring_verdict};
use crate::step::SparsePointFunction;
use crate::verify::{CliConfig, verify_all};

#[derive(Parser, Debug)]
#[command(name = "binmeasure", version, about = "Binary measures, integrals and their checks")]
pub struct Cli {
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 64)]
    pub depth: usize,
    #[arg(long, global = true, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, global = true, default_value_t = crate::set_ring::DEFAULT_UNIVERSE_CAP)]
    pub universe_cap: usize,
    #[arg(long, global = true, default_value_t = crate::derivable::DEFAULT_DIMENSION_CAP)]
    pub dimension_cap: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// B₂ operations.
    B2 {
        #[command(subcommand)]
        cmd: B2Cmd,
    },
    /// Set rings over a finite universe.
    Ring {
        #[command(subcommand)]
        cmd: RingCmd,
    },
    /// Binary set functions.
    Setfn {
        #[command(subcommand)]
        cmd: SetfnCmd,
    },
    /// The catalog of measures and counterexamples.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
    /// Symmetric interval unions.
    Interval {
        #[command(subcommand)]
        cmd: IntervalCmd,
    },
    /// Left-continuous step functions.
    Stepfn {
        #[command(subcommand)]
        cmd: StepfnCmd,
    },
    /// Lebesgue–Stieltjes binary measures.
    Ls {
        #[command(subcommand)]
        cmd: LsCmd,
    },
    /// μ_H(A) = π(|A ∩ H|) on box unions.
    Parity {
        #[arg(long = "H")]
        h: String,
        #[arg(long)]
        set: String,
    },
    /// The derivative of μ_H at a point.
    Deriv {
        #[arg(long = "H")]
        h: String,
        #[arg(long)]
        x: String,
    },
    /// Left Riemann integral over [[from, to)).
    Riemann {
        #[arg(long)]
        f: String,
        #[command(flatten)]
        window: Window,
    },
    /// Left primitive as a step function.
    Primitive {
        #[arg(long)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        origin: String,
        #[arg(long)]
        emit: bool,
    },
    /// Dual left integral of the function vanishing exactly on the zeros.
    DualRiemann {
        #[arg(long)]
        zeros: String,
        #[command(flatten)]
        window: Window,
    },
    /// Binary integral of a function against a measure.
    Integrate(IntegrateArgs),
    /// The acceptance suite.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
}

#[derive(Args, Debug)]
pub struct Window {
    #[arg(long, allow_hyphen_values = true)]
    pub from: String,
    #[arg(long, allow_hyphen_values = true)]
    pub to: String,
}

#[derive(Subcommand, Debug)]
pub enum B2Cmd {
    Table,
}

#[derive(Subcommand, Debug)]
pub enum RingCmd {
    Check {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value = "delta-cap")]
        laws: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum SetfnCmd {
    CheckAdditive {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value = "delta-cap")]
        laws: String,
    },
    CheckCountable {
        #[arg(long)]
        measure: String,
        /// basis, telescope, unit-steps or halving
        #[arg(long)]
        family: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum CatalogCmd {
    List,
    Run {
        #[arg(long)]
        case: String,
    },
    Eval {
        #[arg(long)]
        spec: String,
        #[arg(long, allow_hyphen_values = true)]
        arg: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum IntervalCmd {
    Op {
        #[arg(long)]
        op: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum StepfnCmd {
    Eval {
        #[arg(long)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum LsCmd {
    Eval {
        #[arg(long)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        set: String,
    },
    Cdf {
        #[arg(long)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        origin: String,
        #[arg(long)]
        emit: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    All,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpaceKind {
    Finite,
    Interval,
    Box,
}

#[derive(Args, Debug)]
pub struct IntegrateArgs {
    #[arg(long, value_enum)]
    pub space: SpaceKind,
    /// A catalog spec, `ls(<stepfn>)`, `indefinite(<points>)` or `parity(<locfin>)`.
    #[arg(long)]
    pub measure: String,
    #[arg(long, allow_hyphen_values = true)]
    pub f: String,
    #[arg(long, allow_hyphen_values = true)]
    pub on: Option<String>,
}

/// Bad input of any kind; exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type CliResult = Result<i32, UsageError>;

struct Out<'a> {
    w: &'a mut dyn Write,
    format: Format,
}

impl Out<'_> {
    fn line(&mut self, text: impl fmt::Display) {
        let _ = writeln!(self.w, "{text}");
    }

    /// `label = value` in text form, the bare value in machine form.
    fn value(&mut self, label: impl fmt::Display, value: impl fmt::Display) {
        match self.format {
            Format::Text => self.line(format_args!("{label} = {value}")),
            Format::Machine => self.line(value),
        }
    }
}

fn config(cli: &Cli) -> Result<CliConfig, UsageError> {
    let cfg = CliConfig {
        seed: cli.seed,
        depth: cli.depth,
        sample_count: cli.samples,
        universe_cap: cli.universe_cap,
        dimension_cap: cli.dimension_cap,
    };
    cfg.validate().map_err(UsageError)?;
    Ok(cfg)
}

fn read(path: &PathBuf) -> Result<String, UsageError> {
    std::fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn laws(s: &str) -> Result<LawPair, UsageError> {
    s.parse::<LawPair>().map_err(|e| UsageError(e.to_string()))
}

fn check_universe(u: &FiniteUniverse, cap: usize) -> Result<(), UsageError> {
    if u.len() > cap {
        return Err(UsageError(format!("universe of {} labels exceeds the cap {cap}", u.len())));
    }
    Ok(())
}

/// A named disjoint family with its union. The certificate index is the
/// depth itself, so the verdict covers the inspected prefix.
fn named_family(name: &str, depth: usize) -> Result<DisjointFamily<SetValue>, UsageError> {
    let tail = TailCertificate { index: depth, reason: TailReason::MeasureZeroAfter };
    Ok(match name {
        "basis" => DisjointFamily::new(
            "canonical basis e(n)",
            |n| SetValue::Sequence(catalog::BinarySequence::basis(n as u64)),
            SetValue::Sequence(catalog::BinarySequence::constant(Bit::ONE)),
            tail,
        ),
        "telescope" => DisjointFamily::new(
            "[1/(n+2), 1/(n+1))",
            |n| {
                let k = n as i128;
                SetValue::Elementary(ElementarySet::left_closed(q(1, k + 2), q(1, k + 1)))
            },
            SetValue::Elementary(ElementarySet::open(0.into(), 1.into())),
            tail,
        ),
        "unit-steps" => DisjointFamily::new(
            "[[n, n+1))",
            |n| SetValue::Intervals(crate::interval::IntervalUnion::interval(n as i128, n as i128 + 1)),
            SetValue::Intervals(crate::interval::IntervalUnion::interval(0, ExtRational::PosInf)),
            tail,
        ),
        "halving" => DisjointFamily::new(
            "[[1 - 2^-n, 1 - 2^-(n+1)))",
            |n| {
                let p = 1i128 << n.min(100);
                SetValue::Intervals(crate::interval::IntervalUnion::interval(q(p - 1, p), q(2 * p - 1, 2 * p)))
            },
            SetValue::Intervals(crate::interval::IntervalUnion::interval(0, 1)),
            tail,
        ),
        _ => return Err(UsageError(format!("unknown family `{name}` (basis, telescope, unit-steps, halving)"))),
    })
}

/// A set literal of the requested space.
fn space_set(space: &MeasurableSpace, text: &str) -> Result<Support, UsageError> {
    Ok(match space {
        MeasurableSpace::Boxes(n) => Support::Boxes(literal::parse_box_union(text)?.with_dim(*n)),
        _ if text.trim_start().starts_with('[') => Support::Intervals(literal::parse_interval_union(text)?),
        _ => Support::Points(literal::parse_points(text)?),
    })
}

fn inner_args<'a>(spec: &'a str, head: &str) -> Option<&'a str> {
    spec.trim().strip_prefix(head)?.trim_start().strip_prefix('(')?.strip_suffix(')')
}

fn integrate(args: &IntegrateArgs, out: &mut Out<'_>) -> CliResult {
    let (space, mu, f) = match args.space {
        SpaceKind::Box => {
            let inner = inner_args(&args.measure, "parity")
                .ok_or_else(|| UsageError("box measures are written parity(<locfin literal>)".into()))?;
            let h = literal::parse_locfin(inner)?;
            let f = literal::parse_box_union(&args.f)?;
            let dim = if h.dim() == 0 { f.dim().max(1) } else { h.dim() };
            let h = if h.dim() == 0 { LocallyFiniteSet::finite(dim, [])? } else { h };
            (
                MeasurableSpace::Boxes(dim),
                SpaceMeasure::Derivable(mu_locfin(h)),
                MeasurableFunction::Boxes(f.with_dim(dim)),
            )
        }
        kind => {
            let space = if kind == SpaceKind::Finite { MeasurableSpace::FiniteSubsets } else { MeasurableSpace::SymIntervals };
            let mu = if let Some(inner) = inner_args(&args.measure, "ls") {
                SpaceMeasure::Ls(LSMeasure::new(literal::parse_stepfn(inner)?))
            } else if let Some(inner) = inner_args(&args.measure, "indefinite") {
                SpaceMeasure::Indefinite(IndefiniteIntegral::new(SparsePointFunction::from_support(
                    literal::parse_points(inner)?,
                )))
            } else {
                SpaceMeasure::Catalog(CatalogMeasure::parse(&args.measure)?)
            };
            let t = args.f.trim_start();
            let f = if t.starts_with("init=") {
                MeasurableFunction::Step(literal::parse_stepfn(t)?)
            } else if t.starts_with('[') || t.starts_with('{') && kind == SpaceKind::Interval {
                MeasurableFunction::Intervals(literal::parse_interval_union(t)?)
            } else {
                MeasurableFunction::Sparse(SparsePointFunction::from_support(literal::parse_points(t)?))
            };
            (space, mu, f)
        }
    };
    let v = match &args.on {
        None => integral(&f, &space, &mu)?,
        Some(a) => integral_on(&space_set(&space, a)?, &f, &space, &mu)?,
    };
    out.value("integral", v);
    Ok(0)
}

fn verify(cfg: &CliConfig, out: &mut Out<'_>) -> CliResult {
    let report = verify_all(cfg);
    let _ = write!(out.w, "{}", report.machine());
    if out.format == Format::Text {
        out.line(report.summary());
    }
    Ok(report.exit_code())
}

pub fn run(cli: &Cli, w: &mut dyn Write) -> CliResult {
    let cfg = config(cli)?;
    let mut out = Out { w, format: cli.format };
    let out = &mut out;
    match &cli.command {
        Command::B2 { cmd: B2Cmd::Table } => {
            let _ = write!(out.w, "{}", render_truth_table());
        }
        Command::Ring { cmd: RingCmd::Check { file, laws: l } } => {
            let (u, members) = literal::parse_family(&read(file)?)?;
            check_universe(&u, cfg.universe_cap)?;
            let pair = laws(l)?;
            let v = ring_verdict(&u, &members, pair)?;
            out.value(format!("ring ({pair})"), v.verdict);
            if let Some((a, b)) = v.witness_first {
                out.line(format_args!("witness: A={} B={}", u.render(a), u.render(b)));
                return Ok(1);
            }
            out.value("algebra", is_set_algebra(&u, &members, pair)?);
        }
        Command::Setfn { cmd: SetfnCmd::CheckAdditive { file, laws: l } } => {
            let (u, values) = literal::parse_tabfn(&read(file)?)?;
            check_universe(&u, cfg.universe_cap)?;
            let pair = laws(l)?;
            let ring = SetRingFamily::new(u.clone(), values.iter().map(|(m, _)| *m), pair)?;
            let mu = TabulatedSetFunction::new(ring, values)?;
            let r = match pair {
                LawPair::DeltaCap => additivity_report(&mu)?,
                LawPair::ThetaCup => additivity_star_report(&mu)?,
            };
            let label = if pair == LawPair::DeltaCap { "additive" } else { "additive*" };
            out.value(label, r.verdict);
            if let Some((a, b)) = r.pair_witness {
                out.line(format_args!("witness: A={} B={}", u.render(a), u.render(b)));
                return Ok(1);
            }
        }
        Command::Setfn { cmd: SetfnCmd::CheckCountable { measure, family } } => {
            let m = CatalogMeasure::parse(measure)?;
            let fam = named_family(family, cfg.depth)?;
            let r = check_countable_family(&m, &fam, cfg.depth)?;
            match out.format {
                Format::Text => out.line(format_args!(
                    "{m} on {} to depth {}: finitely_many_ones={} xor_equality={} union_value={} xor_sum={}",
                    fam.label, cfg.depth, r.finitely_many_ones, r.xor_equality, r.union_value, r.xor_sum
                )),
                Format::Machine => out.line(format_args!("{} {}", r.finitely_many_ones, r.xor_equality)),
            }
            if !r.passes() {
                out.line(format_args!("witness: {}", r.witness.unwrap_or_default()));
                return Ok(1);
            }
        }
        Command::Catalog { cmd: CatalogCmd::List } => {
            for e in catalog::catalog_entries() {
                let head = if e.params.is_empty() { e.name.to_string() } else { format!("{}({})", e.name, e.params) };
                out.line(format_args!("{head:<32} {:<40} {}", e.carrier, e.claim));
            }
        }
        Command::Catalog { cmd: CatalogCmd::Run { case } } => {
            let case: CounterexampleCase = case.parse().map_err(UsageError)?;
            let r = catalog::counterexample_divergence(case, cfg.depth)?;
            out.line(&r);
            if r.countably_additive.is_one() {
                return Ok(1);
            }
        }
        Command::Catalog { cmd: CatalogCmd::Eval { spec, arg } } => {
            let m = CatalogMeasure::parse(spec)?;
            let set = catalog::parse_set_value(&m.carrier(), arg)?;
            let v = m.eval(&set)?;
            out.value(format_args!("{m}({set})"), v);
        }
        Command::Interval { cmd: IntervalCmd::Op { op, a, b } } => {
            let op: IntervalOp = op.parse().map_err(UsageError)?;
            let a = literal::parse_interval_union(a)?;
            let b = literal::parse_interval_union(b)?;
            out.line(iv_op(op, &a, &b));
        }
        Command::Stepfn { cmd: StepfnCmd::Eval { f, t } } => {
            let f = literal::parse_stepfn(f)?;
            let t = literal::parse_ext(t)?;
            out.value(format_args!("f({t})"), f.eval(t));
        }
        Command::Ls { cmd: LsCmd::Eval { f, set } } => {
            let mu = LSMeasure::new(literal::parse_stepfn(f)?);
            let a = literal::parse_interval_union(set)?;
            out.value(format_args!("mu({a})"), mu.eval(&a));
        }
        Command::Ls { cmd: LsCmd::Cdf { f, origin, emit } } => {
            let mu = LSMeasure::new(literal::parse_stepfn(f)?);
            let origin = literal::parse_ext(origin)?;
            let g = mu.cdf(origin);
            if *emit { out.line(g) } else { out.value(format_args!("g (origin {origin})"), g) }
        }
        Command::Parity { h, set } => {
            let h = literal::parse_locfin(h)?;
            let a = literal::parse_box_union(set)?;
            let dim = if h.dim() == 0 { a.dim().max(1) } else { h.dim() };
            if dim > cfg.dimension_cap {
                return Err(UsageError(format!("dimension {dim} exceeds the cap {}", cfg.dimension_cap)));
            }
            let h = if h.dim() == 0 { LocallyFiniteSet::finite(dim, [])? } else { h };
            let a = a.with_dim(dim);
            out.value(format_args!("mu_H({a})"), mu_locfin(h).eval(&a)?);
        }
        Command::Deriv { h, x } => {
            let h = literal::parse_locfin(h)?;
            let pts = literal::parse_point_tuples(x)?;
            let [p] = pts.0.into_iter().collect::<Vec<_>>().try_into().map_err(|_| UsageError("--x takes one point".into()))?;
            let h = if h.dim() == 0 { LocallyFiniteSet::finite(p.dim(), [])? } else { h };
            out.value(format_args!("d mu_H({p})"), derivative_at(&mu_locfin(h), &p)?);
        }
        Command::Riemann { f, window } => {
            let f = RealFunction::Sparse(SparsePointFunction::from_support(literal::parse_points(f)?));
            let (a, b) = (literal::parse_ext(&window.from)?, literal::parse_ext(&window.to)?);
            out.value(format_args!("integral over [[{a},{b}))"), left_integral(&f, a, b)?);
        }
        Command::Primitive { f, origin, emit } => {
            let f = SparsePointFunction::from_support(literal::parse_points(f)?);
            let origin = literal::parse_ext(origin)?;
            let p = left_primitive(&f, origin);
            if *emit { out.line(p) } else { out.value(format_args!("F (origin {origin})"), p) }
        }
        Command::DualRiemann { zeros, window } => {
            let z: FiniteSet<_> = literal::parse_points(zeros)?;
            let (a, b) = (literal::parse_ext(&window.from)?, literal::parse_ext(&window.to)?);
            out.value(format_args!("dual integral over [[{a},{b}))"), dual_left_integral(&z, a, b));
        }
        Command::Integrate(args) => return integrate(args, out),
        Command::Verify { cmd: VerifyCmd::All } => return verify(&cfg, out),
    }
    Ok(0)
}

/// Parses `args`, runs, and reports errors on `err`; returns the exit code.
pub fn main_with<I, T>(args: I, w: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 2;
            }
            let _ = write!(w, "{}", e.render());
            return 0;
        }
    };
    match run(&cli, w) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
