use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use astd_core::control::Event;
use astd_core::data::DataState;
use astd_core::engine::{self, Bounds, EngineError, System, Violation};
use astd_core::refinement::{self, Mode, RefinementConfig, RefinementError, Verdict};
use astd_core::spec_lang::{self, check_static, load_file, parse_expr, LoadError, SpecDoc};
use astd_core::translate::{self, TranslateError};
use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::server::{self, App};
use crate::session::Session;

/// All checks passed.
pub const EXIT_OK: i32 = 0;
/// A violation or counterexample was found.
pub const EXIT_FAIL: i32 = 1;
/// Bad usage, unreadable or malformed input.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "astd", version, about = "Animate, model-check, refine and translate ASTD specifications")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and statically check a specification.
    Check { file: PathBuf },
    /// Explore the reachable states and run the selected checks.
    Explore {
        file: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        max_states: usize,
        #[arg(long)]
        max_depth: Option<usize>,
        /// Check every invariant on every state.
        #[arg(long)]
        invariants: bool,
        /// Check the event theorems on every transition.
        #[arg(long)]
        theorems: bool,
        /// Report events the ASTD offers but the data layer refuses.
        #[arg(long)]
        calling: bool,
        /// Write the state graph as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write the state graph in Graphviz format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Step through a specification interactively.
    Simulate { file: PathBuf },
    /// Compare the traces of an abstract and a concrete specification.
    Refine {
        abs: PathBuf,
        conc: PathBuf,
        /// preservation, inclusion or projection:<instance>
        #[arg(long, default_value = "preservation", value_parser = parse_mode)]
        mode: Mode,
        /// Concrete labels treated as internal steps.
        #[arg(long, value_delimiter = ',')]
        new: Vec<String>,
        /// Abstract labels treated as internal steps.
        #[arg(long, value_delimiter = ',')]
        hide: Vec<String>,
        /// Show abstract label `a` under the argument-less concrete label `b`.
        #[arg(long, value_delimiter = ',', value_name = "A=B")]
        rename: Vec<String>,
        #[arg(long, default_value_t = 1_000_000)]
        max_states: usize,
    },
    /// Check data-event relations over the reachable data states.
    Relcheck {
        file: PathBuf,
        /// Two ground events whose relations must commute.
        #[arg(long, num_args = 2, value_names = ["E1", "E2"])]
        commute: Vec<String>,
        /// `whole=part`: firing `whole` equals firing `part(x)` for each x of `--over`.
        #[arg(long, value_name = "WHOLE=PART")]
        seq: Option<String>,
        /// Set expression listing the arguments of `part`.
        #[arg(long, requires = "seq")]
        over: Option<String>,
    },
    /// Translate to classical B.
    Translate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Backend::State)]
        backend: Backend,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Explore the generated machine and compare it with the specification.
        #[arg(long)]
        verify: bool,
    },
    /// Serve the JSON animation API.
    Serve {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Backend {
    /// One state variable per automaton.
    State,
    /// One set of instances per label.
    Enabled,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "preservation" => Ok(Mode::Preservation),
        "inclusion" => Ok(Mode::Inclusion),
        _ => match s.strip_prefix("projection:") {
            Some(atom) if !atom.is_empty() => Ok(Mode::Projection(atom.to_string())),
            _ => Err(format!("expected preservation, inclusion or projection:<instance>, got `{s}`")),
        },
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Refinement(#[from] RefinementError),
    #[error("{0}")]
    Translate(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Terminal streams of one invocation.
pub struct Io<'a> {
    pub input: &'a mut dyn BufRead,
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

/// Runs one command line and returns the exit code.
pub fn run<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = write!(if e.use_stderr() { &mut *io.err } else { &mut *io.out }, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command, io) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn load_system(path: &Path) -> Result<System, CliError> {
    Ok(System::new(load_file(path)?)?)
}

fn bounds(max_states: usize, max_depth: Option<usize>) -> Bounds {
    Bounds {
        max_states,
        max_depth: max_depth.unwrap_or(usize::MAX),
        ..Bounds::default()
    }
}

fn execute(cmd: Command, io: &mut Io<'_>) -> Result<bool, CliError> {
    match cmd {
        Command::Check { file } => check(&file, io),
        Command::Explore {
            file,
            max_states,
            max_depth,
            invariants,
            theorems,
            calling,
            json,
            dot,
        } => {
            let sys = load_system(&file)?;
            let lts = engine::explore(&sys, bounds(max_states, max_depth))?;
            writeln!(
                io.out,
                "{}: {} states, {} transitions{}",
                sys.doc.name,
                lts.states.len(),
                lts.edges.len(),
                if lts.truncated { " (truncated)" } else { "" }
            )?;
            let mut all = Vec::new();
            if invariants {
                all.extend(report(io, "invariants", engine::check_invariants(&sys, &lts)?)?);
            }
            if theorems {
                all.extend(report(io, "theorems", engine::check_theorems(&sys, &lts)?)?);
            }
            if calling {
                all.extend(report(io, "calling consistency", engine::check_calling_consistency(&sys, &lts))?);
            }
            if let Some(p) = json {
                let j = engine::lts_to_json(&sys, &lts, &all);
                std::fs::write(p, serde_json::to_string_pretty(&j).expect("json"))?;
            }
            if let Some(p) = dot {
                std::fs::write(p, engine::lts_to_dot(&sys, &lts))?;
            }
            Ok(all.is_empty())
        }
        Command::Simulate { file } => {
            let sys = load_system(&file)?;
            simulate(Arc::new(sys), io)?;
            Ok(true)
        }
        Command::Refine {
            abs,
            conc,
            mode,
            new,
            hide,
            rename,
            max_states,
        } => refine(&abs, &conc, mode, new, hide, rename, max_states, io),
        Command::Relcheck {
            file,
            commute,
            seq,
            over,
        } => relcheck(&file, commute, seq, over, io),
        Command::Translate {
            file,
            backend,
            out,
            verify,
        } => translate_cmd(&file, backend, out.as_deref(), verify, io),
        Command::Serve { files, port, host } => {
            let systems = files.iter().map(|f| load_system(f)).collect::<Result<Vec<_>, _>>()?;
            let addr = format!("{host}:{port}");
            writeln!(io.out, "serving {} spec(s) on http://{addr}", systems.len())?;
            io.out.flush()?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(server::serve(Arc::new(App::new(systems)), &addr))?;
            Ok(true)
        }
    }
}

fn check(file: &Path, io: &mut Io<'_>) -> Result<bool, CliError> {
    let src = std::fs::read_to_string(file).map_err(|source| LoadError::Io {
        path: file.display().to_string(),
        source,
    })?;
    let shown = file.display().to_string();
    let doc = spec_lang::parse(&src).map_err(|diagnostics| LoadError::Invalid {
        path: shown.clone(),
        diagnostics,
    })?;
    let diags = check_static(&doc);
    for d in &diags {
        writeln!(io.err, "{shown}:{d}")?;
    }
    if diags.iter().any(|d| d.is_error()) {
        return Err(CliError::Usage(format!("{shown} has errors")));
    }
    writeln!(io.out, "{}: ok", doc.name)?;
    Ok(true)
}

const SHOWN_VIOLATIONS: usize = 10;

fn report(io: &mut Io<'_>, what: &str, v: Vec<Violation>) -> Result<Vec<Violation>, CliError> {
    if v.is_empty() {
        writeln!(io.out, "{what}: ok")?;
    } else {
        writeln!(io.out, "{what}: {} violation(s)", v.len())?;
        for x in v.iter().take(SHOWN_VIOLATIONS) {
            writeln!(io.out, "  {x}")?;
        }
    }
    Ok(v)
}

fn print_verdict(io: &mut Io<'_>, what: &str, v: &Verdict) -> Result<(), CliError> {
    match v.counterexample() {
        None => writeln!(io.out, "{what}: pass")?,
        Some(t) => writeln!(io.out, "{what}: fail, counterexample [{}]", t.join(", "))?,
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn refine(
    abs: &Path,
    conc: &Path,
    mode: Mode,
    new: Vec<String>,
    hide: Vec<String>,
    rename: Vec<String>,
    max_states: usize,
    io: &mut Io<'_>,
) -> Result<bool, CliError> {
    let mut cfg = RefinementConfig {
        new_labels: new.into_iter().collect(),
        abstract_hidden: hide.into_iter().collect(),
        ..Default::default()
    };
    for r in rename {
        let (a, b) = r
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--rename expects A=B, got `{r}`")))?;
        cfg.renames.insert(a.to_string(), b.to_string());
    }
    let b = bounds(max_states, None);
    let conc_sys = load_system(conc)?;
    let conc_lts = engine::explore(&conc_sys, b)?;
    let abs_doc: SpecDoc = load_file(abs)?;
    let verdict = match &mode {
        Mode::Preservation => {
            let abs_lts = engine::explore(&System::new(abs_doc)?, b)?;
            let v = refinement::trace_preservation(&abs_lts, &conc_lts, &cfg)?;
            print_verdict(io, "trace preservation", &v)?;
            v
        }
        Mode::Inclusion => {
            let abs_lts = engine::explore(&System::new(abs_doc)?, b)?;
            let v = refinement::trace_inclusion(&conc_lts, &abs_lts, &cfg)?;
            print_verdict(io, "trace inclusion", &v)?;
            v
        }
        Mode::Projection(atom) => {
            let single = System::single_instance(abs_doc, atom)?;
            let abs_lts = engine::explore(&single, b)?;
            let v = refinement::projection_refinement(&abs_lts, &conc_sys, &conc_lts, atom, &cfg)?;
            print_verdict(io, &format!("projection on {atom}"), &v.preservation)?;
            print_verdict(io, &format!("projection on {atom}, converse"), &v.inclusion)?;
            v.preservation
        }
    };
    Ok(verdict.passed())
}

fn relcheck(
    file: &Path,
    commute: Vec<String>,
    seq: Option<String>,
    over: Option<String>,
    io: &mut Io<'_>,
) -> Result<bool, CliError> {
    if commute.is_empty() && seq.is_none() {
        return Err(CliError::Usage("relcheck needs --commute or --seq".into()));
    }
    let sys = load_system(file)?;
    let lts = engine::explore(&sys, Bounds::default())?;
    if lts.truncated {
        return Err(CliError::Usage("state space truncated".into()));
    }
    let reach: BTreeSet<DataState> = lts.states.iter().map(|s| s.data.clone()).collect();
    let mut ok = true;
    if !commute.is_empty() {
        let evs = commute
            .iter()
            .map(|e| Event::parse(e).map_err(|m| CliError::Usage(format!("bad event `{e}`: {m}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let universe = refinement::close_universe(&sys, &reach, &evs)?;
        let r1 = refinement::event_relation(&sys, &evs[0], &universe)?;
        let r2 = refinement::event_relation(&sys, &evs[1], &universe)?;
        let c = refinement::relations_commute(&r1.pairs, &r2.pairs);
        writeln!(
            io.out,
            "{} and {} {} over {} data states",
            evs[0],
            evs[1],
            if c { "commute" } else { "do not commute" },
            universe.len()
        )?;
        ok &= c;
    }
    if let Some(s) = seq {
        let (whole, part) = s
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--seq expects WHOLE=PART, got `{s}`")))?;
        let over = over.ok_or_else(|| CliError::Usage("--seq needs --over".into()))?;
        let over = parse_expr(&over).map_err(|d| CliError::Usage(format!("--over: {d}")))?;
        let whole = Event::parse(whole).map_err(|m| CliError::Usage(format!("bad event `{whole}`: {m}")))?;
        let v = refinement::seq_equivalence(&sys, &reach, &whole, part, &over)?;
        match v.counterexample() {
            None => writeln!(io.out, "{whole} = sequence of {part}: pass over {} data states", reach.len())?,
            Some(c) => writeln!(io.out, "{whole} = sequence of {part}: fail\n  {}", c.join("\n  "))?,
        }
        ok &= v.passed();
    }
    Ok(ok)
}

fn translate_cmd(
    file: &Path,
    backend: Backend,
    out: Option<&Path>,
    verify: bool,
    io: &mut Io<'_>,
) -> Result<bool, CliError> {
    let sys = load_system(file)?;
    let unsupported = |e: TranslateError, io: &mut Io<'_>| -> Result<bool, CliError> {
        match e {
            TranslateError::Unsupported(ds) => {
                for d in ds {
                    writeln!(io.err, "{}:{d}", file.display())?;
                }
                Ok(false)
            }
            e => Err(CliError::Translate(e.to_string())),
        }
    };
    let (text, ok) = match backend {
        Backend::State => {
            let enc = match translate::translate_state_encoding(&sys.doc) {
                Ok(e) => e,
                Err(e) => return unsupported(e, io),
            };
            let mut ok = true;
            if verify {
                let f = translate::check_fidelity(&sys, &enc, Bounds::default())
                    .map_err(|e| CliError::Translate(e.to_string()))?;
                match &f.mismatch {
                    None => writeln!(
                        io.err,
                        "verified: {} states and {} transitions on both sides",
                        f.engine_states, f.engine_edges
                    )?,
                    Some(m) => writeln!(io.err, "verification failed: {m}")?,
                }
                ok = f.isomorphic();
            }
            (enc.spec.render(), ok)
        }
        Backend::Enabled => {
            if verify {
                return Err(CliError::Usage("--verify applies to the state backend".into()));
            }
            let (m, warnings) = match translate::translate_enabled_sets(&sys) {
                Ok(x) => x,
                Err(e) => return unsupported(e, io),
            };
            for w in warnings {
                writeln!(io.err, "{}:{w}", file.display())?;
            }
            (m.spec.render(), true)
        }
    };
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => io.out.write_all(text.as_bytes())?,
    }
    Ok(ok)
}

const HELP: &str = "commands: <n> or <n>.<k> step (k picks a successor), u undo, r reset, s state, t trace, q quit";

fn show(io: &mut Io<'_>, s: &Session) -> Result<Vec<(String, usize)>, CliError> {
    writeln!(io.out, "state: {}", s.system().describe(s.current()))?;
    let enabled = s.enabled()?;
    if enabled.is_empty() {
        writeln!(io.out, "no enabled events")?;
    }
    for (i, e) in enabled.iter().enumerate() {
        match e.successor_count {
            1 => writeln!(io.out, "  [{i}] {}", e.event)?,
            n => writeln!(io.out, "  [{i}] {} ({n} successors)", e.event)?,
        }
    }
    Ok(enabled.into_iter().map(|e| (e.event, e.successor_count)).collect())
}

fn simulate(sys: Arc<System>, io: &mut Io<'_>) -> Result<(), CliError> {
    let mut s = Session::new(sys)?;
    writeln!(io.out, "{HELP}")?;
    let mut enabled = show(io, &s)?;
    let mut line = String::new();
    loop {
        write!(io.out, "> ")?;
        io.out.flush()?;
        line.clear();
        if io.input.read_line(&mut line)? == 0 {
            writeln!(io.out)?;
            return Ok(());
        }
        match line.trim() {
            "" => continue,
            "q" | "quit" => return Ok(()),
            "h" | "help" => {
                writeln!(io.out, "{HELP}")?;
                continue;
            }
            "u" | "undo" => {
                if !s.undo() {
                    writeln!(io.out, "nothing to undo")?;
                }
            }
            "r" | "reset" => s.reset(),
            "t" | "trace" => {
                let t: Vec<String> = s.trace().iter().map(|t| t.event.clone()).collect();
                writeln!(io.out, "trace: [{}]", t.join(", "))?;
                continue;
            }
            "s" | "state" => {
                let snap = s.snapshot()?;
                for v in &snap.data_vars {
                    writeln!(io.out, "  {} = {}", v.name, v.value)?;
                }
                for i in &snap.invariant_status {
                    let st = match i.holds {
                        Some(true) => "holds",
                        Some(false) => "VIOLATED",
                        None => "cannot be evaluated",
                    };
                    writeln!(io.out, "  invariant {}: {st}", i.name)?;
                }
                continue;
            }
            cmd => {
                let (n, k) = match cmd.split_once('.') {
                    Some((n, k)) => (n.parse::<usize>(), k.parse::<usize>().map(Some)),
                    None => (cmd.parse::<usize>(), Ok(None)),
                };
                let (Ok(n), Ok(k)) = (n, k) else {
                    writeln!(io.out, "unknown command `{cmd}`; {HELP}")?;
                    continue;
                };
                let Some((event, count)) = enabled.get(n).cloned() else {
                    writeln!(io.out, "no event [{n}]")?;
                    continue;
                };
                let choice = match k {
                    Some(k) => k,
                    None if count == 1 => 0,
                    None => {
                        for (j, x) in s.successors(&event).map_err(|e| CliError::Usage(e.to_string()))?.iter().enumerate() {
                            writeln!(io.out, "  [{n}.{j}] {}", s.system().describe(x))?;
                        }
                        continue;
                    }
                };
                if let Err(e) = s.step(&event, choice) {
                    writeln!(io.out, "{e}")?;
                    continue;
                }
            }
        }
        enabled = show(io, &s)?;
    }
}
