use std::fs;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Duration;

use clap::Parser;

use mintej::shell::{self, bench_sample, ConsoleIo, Io, ScriptIo, Session};
use mintej::syntaxdb::SyntaxDb;

/// Minimalistic modal terminal editor for a Julia-like language.
#[derive(Debug, Parser)]
#[command(name = "mintej", version)]
struct Cli {
    /// Replay the prompts from FILE and print the transcript.
    #[arg(long, value_name = "FILE")]
    script: Option<PathBuf>,

    /// Working directory for file operations.
    #[arg(long, value_name = "PATH")]
    workdir: Option<PathBuf>,

    /// Snippet database for syntax mode.
    #[arg(long, value_name = "PATH")]
    syntax_db: Option<PathBuf>,

    /// Sample memory and CPU of PID every INTERVAL seconds with a moving
    /// average over WINDOW samples, writing CSV to stdout.
    #[arg(long, num_args = 3, value_names = ["PID", "INTERVAL", "WINDOW"])]
    bench: Option<Vec<String>>,

    /// Stop benchmarking after this many seconds.
    #[arg(long, value_name = "SECONDS", requires = "bench")]
    duration: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let interrupt = Arc::new(AtomicBool::new(false));
    {
        let flag = Arc::clone(&interrupt);
        if let Err(e) = ctrlc::set_handler(move || flag.store(true, Ordering::SeqCst)) {
            eprintln!("warning: cannot install interrupt handler: {e}");
        }
    }
    let result = match &cli.bench {
        Some(args) => run_bench(args, cli.duration, &interrupt),
        None => run_editor(&cli, interrupt),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mintej: {e}");
            ExitCode::FAILURE
        }
    }
}

type AnyError = Box<dyn std::error::Error>;

fn run_bench(args: &[String], duration: Option<f64>, stop: &AtomicBool) -> Result<(), AnyError> {
    let pid: u32 = args[0].parse().map_err(|_| format!("invalid PID '{}'", args[0]))?;
    let interval: f64 = args[1].parse().map_err(|_| format!("invalid interval '{}'", args[1]))?;
    let window: usize = args[2].parse().map_err(|_| format!("invalid window '{}'", args[2]))?;
    if !(interval.is_finite() && interval > 0.0) {
        return Err("interval must be a positive number of seconds".into());
    }
    let duration = match duration {
        Some(d) if d.is_finite() && d >= 0.0 => Some(Duration::from_secs_f64(d)),
        Some(_) => return Err("duration must be a non-negative number of seconds".into()),
        None => None,
    };
    bench_sample(pid, Duration::from_secs_f64(interval), window, duration, stop, io::stdout().lock())?;
    Ok(())
}

fn syntax_db_path(cli: &Cli) -> Option<PathBuf> {
    cli.syntax_db.clone().or_else(|| {
        std::env::current_exe()
            .ok()
            .and_then(|exe| exe.parent().map(|d| d.join("syntax_db.txt")))
    })
}

fn run_editor(cli: &Cli, interrupt: Arc<AtomicBool>) -> Result<(), AnyError> {
    let workdir = match &cli.workdir {
        Some(w) => w.clone(),
        None => std::env::current_dir()?,
    };
    let syntax = match syntax_db_path(cli) {
        Some(path) => SyntaxDb::open_or_stock(&path).map_err(|e| format!("{}: {e}", path.display()))?,
        None => SyntaxDb::stock(),
    };
    let configure = |s: &mut Session<'_>| {
        s.syntax = syntax;
        s.external_runtime = std::env::var_os("MINTEJ_EXTERNAL_RUNTIME").map(PathBuf::from);
        s.terminal_command = std::env::var("MINTEJ_TERMINAL").ok();
    };
    match &cli.script {
        Some(script) => {
            let text = fs::read_to_string(script).map_err(|e| format!("{}: {e}", script.display()))?;
            let mut io = ScriptIo::from_text(&text);
            {
                let mut session = Session::new(&mut io, &workdir)?.with_interrupt(interrupt);
                configure(&mut session);
                shell::main_loop(&mut session);
            }
            for line in shell::normalize_workdir(io.transcript(), &workdir.canonicalize()?) {
                println!("{line}");
            }
        }
        None => {
            let mut io = ConsoleIo::new(Arc::clone(&interrupt));
            let io_ref: &mut dyn Io = &mut io;
            let mut session = Session::new(io_ref, &workdir)?.with_interrupt(interrupt);
            configure(&mut session);
            shell::main_loop(&mut session);
        }
    }
    Ok(())
}
