//! Command-line front end. Exit codes: 0 when every requested check passes,
//! 1 on a verification failure, 2 on a usage error.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::certificates::{
    embedded_cell_signatures, embedded_checksums, verify_m3_certificate, CertifierRegistry,
    SYMBOLIC_THRESHOLD,
};
use crate::error::Error;
use crate::firstreturn::{first_return_table, induced_cycle, total_excursion};
use crate::hamilton::{
    export_decomposition, return_criterion_crosscheck, verify_decomposition, ExportFormat,
};
use crate::modring::{Color, Modulus, Z5};
use crate::returnmap::check_identities;
use crate::schedule::{latin_row_check, Schedule, ScheduleRegistry};
use crate::selector::{check_selector, LatinTable, Selector};

pub const TORUS_CAP: u64 = 15u64.pow(5);
pub const ROOT_FLAT_CAP: u64 = 11u64.pow(4);

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "d5torus",
    version,
    about = "Hamilton decomposition of the directed 5-torus D5(m), odd m"
)]
pub struct Cli {
    /// Emit a JSON report instead of the text summary.
    #[arg(long, global = true)]
    json: bool,

    /// Schedule to use, by registered name.
    #[arg(long, global = true, default_value = "auto")]
    schedule: String,

    /// Override the default state-space caps (15^5 torus vertices, 11^4 root-flat points).
    #[arg(long, global = true)]
    max_states: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the five color cycles and write them out.
    Decompose(DecomposeArgs),
    /// Verify the decomposition, or one of its ingredients.
    Verify(VerifyArgs),
    /// Check a finite certificate.
    Certify {
        #[command(subcommand)]
        what: CertifyCommand,
    },
    /// Tabulate the first-return map on the section.
    FirstReturn(FirstReturnArgs),
    /// Check the rotation and conjugacy identities.
    Identities {
        #[arg(long, value_parser = parse_modulus)]
        m: Modulus,
    },
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[arg(long, value_parser = parse_modulus)]
    m: Modulus,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Export even if verification fails.
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
    Arcs,
}

impl From<Format> for ExportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ExportFormat::Json,
            Format::Text => ExportFormat::Text,
            Format::Arcs => ExportFormat::Arcs,
        }
    }
}

#[derive(Args, Debug)]
#[command(subcommand_negates_reqs = true, args_conflicts_with_subcommands = true)]
struct VerifyArgs {
    #[arg(long, value_parser = parse_modulus, required = true)]
    m: Option<Modulus>,
    /// Only walk this color.
    #[arg(long, value_parser = parse_color)]
    color: Option<Color>,
    #[command(subcommand)]
    check: Option<VerifyCommand>,
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Every layer row is a permutation of the colors.
    Latin {
        #[arg(long, value_parser = parse_modulus)]
        m: Modulus,
    },
    /// Rotation and conjugacy identities.
    Identities {
        #[arg(long, value_parser = parse_modulus)]
        m: Modulus,
    },
    /// Cycle type of the return map, lifted to the torus.
    Return {
        #[arg(long, value_parser = parse_modulus)]
        m: Modulus,
        #[arg(long, value_parser = parse_color)]
        color: Color,
    },
}

#[derive(Subcommand, Debug)]
enum CertifyCommand {
    /// The selector table and its consistency checks.
    Selector,
    /// Exact-cover form of the layer-1 matching.
    Matching {
        #[arg(long, default_value = "enumerate")]
        mode: String,
        #[arg(long, value_parser = parse_modulus)]
        m: Option<Modulus>,
    },
    /// The explicit 81-cycle for m = 3.
    M3,
}

#[derive(Args, Debug)]
struct FirstReturnArgs {
    #[arg(long, value_parser = parse_modulus)]
    m: Modulus,
    /// Compare every simulated return against the closed form (m ≥ 5).
    #[arg(long)]
    check_closed_form: bool,
}

fn parse_modulus(s: &str) -> Result<Modulus, String> {
    let v: u32 = s
        .parse()
        .map_err(|_| format!("odd m ≥ 3 required (got `{s}`)"))?;
    Modulus::new(v).map_err(|e| e.to_string())
}

fn parse_color(s: &str) -> Result<Color, String> {
    match s.parse::<u8>() {
        Ok(v) if v < 5 => Ok(Z5::new(v as i64)),
        _ => Err(format!("color must be in 0..5 (got `{s}`)")),
    }
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    json: bool,
    schedule: String,
    max_states: Option<u64>,
}

enum Outcome {
    Pass,
    Fail,
}

impl From<bool> for Outcome {
    fn from(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

impl Ctx<'_> {
    fn cap(&self, states: u64, default: u64) -> Result<(), Error> {
        let cap = self.max_states.unwrap_or(default);
        if states > cap {
            return Err(Error::TooLarge { states, cap });
        }
        Ok(())
    }

    fn torus_cap(&self, m: Modulus) -> Result<(), Error> {
        self.cap(m.torus_size() as u64, TORUS_CAP)
    }

    fn root_flat_cap(&self, m: Modulus) -> Result<(), Error> {
        self.cap(m.root_flat_size() as u64, ROOT_FLAT_CAP)
    }

    fn schedule(&self, m: Modulus) -> Result<Box<dyn Schedule>, Error> {
        ScheduleRegistry::default().build(&self.schedule, m, Arc::new(Selector::standard().clone()))
    }

    fn emit<T: Serialize>(
        &mut self,
        report: &T,
        text: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
    ) -> std::io::Result<()> {
        if self.json {
            serde_json::to_writer_pretty(&mut *self.out, report)?;
            writeln!(self.out)
        } else {
            text(self.out)
        }
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Parses `argv` (including the program name), runs the command, and returns
/// the exit code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_PASS
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let mut ctx = Ctx {
        out,
        json: cli.json,
        schedule: cli.schedule,
        max_states: cli.max_states,
    };
    match dispatch(&mut ctx, cli.command) {
        Ok(Outcome::Pass) => EXIT_PASS,
        Ok(Outcome::Fail) => EXIT_FAIL,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Unverified(_)
                | Error::NotBijective { .. }
                | Error::Structural(_)
                | Error::StepCapExceeded { .. } => EXIT_FAIL,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn dispatch(ctx: &mut Ctx<'_>, command: Command) -> Result<Outcome, Error> {
    let io = |e: std::io::Error| Error::Precondition(format!("write failed: {e}"));
    match command {
        Command::Decompose(args) => decompose(ctx, args),
        Command::Verify(args) => match args.check {
            Some(VerifyCommand::Latin { m }) => verify_latin(ctx, m),
            Some(VerifyCommand::Identities { m }) => identities(ctx, m),
            Some(VerifyCommand::Return { m, color }) => verify_return(ctx, m, color),
            None => {
                let m = args.m.expect("clap enforces --m");
                ctx.torus_cap(m)?;
                let schedule = ctx.schedule(m)?;
                let colors = args.color.map(|c| vec![c]);
                let report = verify_decomposition(schedule.as_ref(), colors.as_deref());
                ctx.emit(&report, |o| {
                    writeln!(o, "D5({}) with schedule {}", report.m, report.schedule)?;
                    for w in &report.colors {
                        match &w.early_revisit {
                            None => writeln!(
                                o,
                                "  color {}: {} (cycle length {})",
                                w.color,
                                verdict(w.pass),
                                w.verified_length
                            )?,
                            Some(r) => writeln!(
                                o,
                                "  color {}: FAIL (revisits {} at step {})",
                                w.color, r.vertex, r.step
                            )?,
                        }
                    }
                    let p = &report.partition;
                    writeln!(o, "  arc partition ({} arcs): {}", p.arcs, verdict(p.pass))?;
                    if let Some(wit) = &p.witness {
                        writeln!(o, "    {wit}")?;
                    }
                    writeln!(o, "{} in {} ms", verdict(report.pass), report.elapsed_ms)
                })
                .map_err(io)?;
                Ok(report.pass.into())
            }
        },
        Command::Certify { what } => certify(ctx, what),
        Command::FirstReturn(args) => first_return(ctx, args),
        Command::Identities { m } => identities(ctx, m),
    }
}

fn decompose(ctx: &mut Ctx<'_>, args: DecomposeArgs) -> Result<Outcome, Error> {
    ctx.torus_cap(args.m)?;
    let schedule = ctx.schedule(args.m)?;
    let text = export_decomposition(schedule.as_ref(), args.format.into(), args.force)?;
    match &args.out {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| Error::Precondition(format!("cannot write {}: {e}", path.display())))?,
        None => ctx
            .out
            .write_all(text.as_bytes())
            .map_err(|e| Error::Precondition(format!("write failed: {e}")))?,
    }
    Ok(Outcome::Pass)
}

fn verify_latin(ctx: &mut Ctx<'_>, m: Modulus) -> Result<Outcome, Error> {
    ctx.torus_cap(m)?;
    let schedule = ctx.schedule(m)?;
    let rows = latin_row_check(schedule.as_ref());
    let partition = crate::hamilton::verify_partition(schedule.as_ref());
    #[derive(Serialize)]
    struct Report<'a> {
        rows: &'a crate::schedule::LatinRowVerdict,
        partition: &'a crate::hamilton::PartitionVerdict,
        pass: bool,
    }
    let pass = rows.pass && partition.pass;
    let report = Report {
        rows: &rows,
        partition: &partition,
        pass,
    };
    ctx.emit(&report, |o| {
        writeln!(
            o,
            "Latin rows ({} checked): {}",
            rows.rows_checked,
            verdict(rows.pass)
        )?;
        if let Some(w) = &rows.witness {
            writeln!(
                o,
                "  layer {} zero-set {} at {}: row {:?}",
                w.layer, w.zero_set, w.point, w.row
            )?;
        }
        writeln!(
            o,
            "out-rows {}, in-colors {}",
            verdict(partition.out_rows),
            verdict(partition.in_colors)
        )?;
        writeln!(o, "{}", verdict(pass))
    })
    .map_err(|e| Error::Precondition(e.to_string()))?;
    Ok(pass.into())
}

fn identities(ctx: &mut Ctx<'_>, m: Modulus) -> Result<Outcome, Error> {
    ctx.root_flat_cap(m)?;
    let report = check_identities(m, Selector::standard());
    ctx.emit(&report, |o| {
        for c in &report.checks {
            writeln!(
                o,
                "{:<20} {:>8} cases  {}",
                c.name,
                c.cases,
                verdict(c.pass)
            )?;
            if let Some(w) = &c.witness {
                writeln!(o, "  {w}")?;
            }
        }
        writeln!(o, "{}", verdict(report.pass))
    })
    .map_err(|e| Error::Precondition(e.to_string()))?;
    Ok(report.pass.into())
}

fn verify_return(ctx: &mut Ctx<'_>, m: Modulus, color: Color) -> Result<Outcome, Error> {
    ctx.root_flat_cap(m)?;
    ctx.torus_cap(m)?;
    let schedule = ctx.schedule(m)?;
    let v = return_criterion_crosscheck(schedule.as_ref(), color)?;
    let fmt = |cs: &crate::returnmap::CycleStructure| {
        cs.iter()
            .map(|(len, k)| format!("{len}^{k}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    ctx.emit(&v, |o| {
        writeln!(
            o,
            "return map R_{} on A_{}: {{{}}}",
            v.color,
            v.m,
            fmt(&v.return_cycles)
        )?;
        writeln!(
            o,
            "color {} on the torus: {{{}}}",
            v.color,
            fmt(&v.torus_cycles)
        )?;
        writeln!(o, "{}", verdict(v.pass))
    })
    .map_err(|e| Error::Precondition(e.to_string()))?;
    Ok(v.pass.into())
}

fn certify(ctx: &mut Ctx<'_>, what: CertifyCommand) -> Result<Outcome, Error> {
    let io = |e: std::io::Error| Error::Precondition(e.to_string());
    match what {
        CertifyCommand::Selector => {
            let report = check_selector(&LatinTable::standard());
            ctx.emit(&report, |o| {
                writeln!(o, "{:<12} {:>7} {:>7}", "Z", "derived", "printed")?;
                for r in &report.rows {
                    writeln!(
                        o,
                        "{:<12} {:>7} {:>7}",
                        r.zero_set.to_string(),
                        r.derived,
                        r.printed
                    )?;
                }
                writeln!(
                    o,
                    "latin {}, equivariant {}, matches printed {}",
                    verdict(report.latin),
                    verdict(report.equivariant),
                    verdict(report.matches_printed)
                )?;
                for mm in &report.mismatches {
                    writeln!(o, "  {mm}")?;
                }
                writeln!(o, "{}", verdict(report.pass))
            })
            .map_err(io)?;
            Ok(report.pass.into())
        }
        CertifyCommand::Matching { mode, m } => {
            let registry = CertifierRegistry::default();
            let certifier = registry.get(&mode)?;
            if certifier.needs_modulus() {
                let mm =
                    m.ok_or_else(|| Error::Precondition(format!("--mode {mode} needs --m")))?;
                ctx.root_flat_cap(mm)?;
            }
            let report = certifier.certify(Selector::standard(), &embedded_cell_signatures(), m)?;
            ctx.emit(&report, |o| {
                match report.m {
                    Some(mm) => {
                        writeln!(o, "matching certificate, mode {}, m = {mm}", report.mode)?
                    }
                    None => writeln!(
                        o,
                        "matching certificate, mode {} (all odd m ≥ {SYMBOLIC_THRESHOLD})",
                        report.mode
                    )?,
                }
                writeln!(o, "  cells: {}", report.cells)?;
                writeln!(o, "  points checked: {}", report.points_checked)?;
                if let Some(s) = report.skipped_unrealizable {
                    writeln!(o, "  unrealizable class vectors skipped: {s}")?;
                }
                for c in &report.counter_examples {
                    writeln!(
                        o,
                        "  counter-example {}: directions {:?}, cells {:?}",
                        c.point, c.valid_directions, c.cells
                    )?;
                }
                writeln!(o, "{}", verdict(report.pass))
            })
            .map_err(io)?;
            Ok(report.pass.into())
        }
        CertifyCommand::M3 => {
            let v = verify_m3_certificate();
            let checksums = embedded_checksums();
            let digest_ok = checksums.iter().all(|(_, ok)| *ok);
            #[derive(Serialize)]
            struct Report<'a> {
                #[serde(flatten)]
                verdict: &'a crate::certificates::M3Verdict,
                checksums_ok: bool,
            }
            let report = Report {
                verdict: &v,
                checksums_ok: digest_ok,
            };
            ctx.emit(&report, |o| {
                writeln!(o, "m = 3 cycle table: {} entries", v.entries)?;
                writeln!(o, "  distinct {}", verdict(v.distinct))?;
                writeln!(o, "  on the root flat {}", verdict(v.on_root_flat))?;
                writeln!(o, "  G(α_r) = α_(r+1) {}", verdict(v.steps_ok))?;
                writeln!(o, "  embedded checksums {}", verdict(digest_ok))?;
                if let Some(w) = &v.witness {
                    writeln!(o, "  {w}")?;
                }
                writeln!(o, "{}", verdict(v.pass && digest_ok))
            })
            .map_err(io)?;
            Ok((v.pass && digest_ok).into())
        }
    }
}

fn first_return(ctx: &mut Ctx<'_>, args: FirstReturnArgs) -> Result<Outcome, Error> {
    let m = args.m;
    ctx.root_flat_cap(m)?;
    if args.check_closed_form && m.get() < 5 {
        return Err(Error::Precondition(
            "--check-closed-form needs m ≥ 5".into(),
        ));
    }
    let rows = first_return_table(Selector::standard(), m, args.check_closed_form)?;
    let mm = m.get() as u64;
    let mut row_sums = vec![0u64; m.get() as usize];
    for r in &rows {
        row_sums[r.start.b as usize] += r.length;
    }
    let total: u64 = row_sums.iter().sum();
    let sums_ok = total == mm.pow(4) && (mm < 5 || row_sums.iter().all(|&s| s == mm.pow(3)));
    let closed_form_ok = rows.iter().all(|r| r.closed_form_agrees != Some(false));
    let (cycle_ok, totals_ok) = if m.get() >= 5 {
        (Some(induced_cycle(m)?.pass), Some(total_excursion(m)?.pass))
    } else {
        (None, None)
    };
    let pass = sums_ok && closed_form_ok && cycle_ok != Some(false) && totals_ok != Some(false);

    #[derive(Serialize)]
    struct Report<'a> {
        m: u32,
        rows: &'a [crate::firstreturn::FirstReturnRow],
        row_sums: &'a [u64],
        total: u64,
        #[serde(skip_serializing_if = "Option::is_none")]
        induced_cycle: Option<bool>,
        pass: bool,
    }
    let report = Report {
        m: m.get(),
        rows: &rows,
        row_sums: &row_sums,
        total,
        induced_cycle: cycle_ok,
        pass,
    };
    ctx.emit(&report, |o| {
        writeln!(o, "{:>10} {:>10} {:>8}", "(a,b)", "Φ(a,b)", "ℓ")?;
        for r in &rows {
            let mark = match r.closed_form_agrees {
                Some(true) => "  closed form ok",
                Some(false) => "  closed form DIFFERS",
                None => "",
            };
            writeln!(
                o,
                "{:>10} {:>10} {:>8}{mark}",
                r.start.to_string(),
                r.end.to_string(),
                r.length
            )?;
        }
        for (b, s) in row_sums.iter().enumerate() {
            writeln!(o, "row b = {b}: {s}")?;
        }
        writeln!(o, "total: {total} (m^4 = {})", mm.pow(4))?;
        if let Some(c) = cycle_ok {
            writeln!(o, "induced cycle: {}", verdict(c))?;
        }
        writeln!(o, "{}", verdict(pass))
    })
    .map_err(|e| Error::Precondition(e.to_string()))?;
    Ok(pass.into())
}
