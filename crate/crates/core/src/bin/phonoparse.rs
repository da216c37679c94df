use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use phonoparse::{OutputFormat, Session};

#[derive(Parser)]
#[command(version, about = "Parse words with ordered generative phonological rules")]
struct Cli {
    /// Command file defining the feature system, alphabets and rules.
    #[arg(long, global = true)]
    grammar: Vec<PathBuf>,
    /// Command file of lexical entries, loaded after the grammar.
    #[arg(long, global = true)]
    lexicon: Vec<PathBuf>,
    /// Trace a rule: NAME traces analysis and synthesis, NAME:a only
    /// analysis, NAME:s only synthesis.
    #[arg(long = "trace-rule", value_name = "NAME[:a|s|as]", global = true)]
    trace_rule: Vec<String>,
    /// Trace lexical lookup.
    #[arg(long = "trace-lookup", global = true)]
    trace_lookup: bool,
    /// Simultaneous undeletion passes per deletion rule.
    #[arg(long = "max-undeletions", value_name = "N", global = true)]
    max_undeletions: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a command file.
    Run { file: PathBuf },
    /// Parse a surface word.
    Parse { word: String },
    /// Derive the surface form of an underlying shape.
    Generate { shape: String },
}

fn trace_flags(spec: &str) -> Result<(String, bool, bool), String> {
    let (name, which) = spec.rsplit_once(':').unwrap_or((spec, "as"));
    let flags = match which {
        "a" => (true, false),
        "s" => (false, true),
        "as" | "sa" => (true, true),
        _ => return Err(format!("bad trace selector `{which}` in `{spec}`")),
    };
    Ok((name.to_string(), flags.0, flags.1))
}

fn load(session: &mut Session, path: &PathBuf) -> Result<String, String> {
    let src = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    session.run(&src).map_err(|e| format!("{}:{e}", path.display()))
}

fn run(cli: Cli) -> Result<String, String> {
    let mut session = Session::new();
    let mut out = String::new();
    for path in cli.grammar.iter().chain(&cli.lexicon) {
        out += &load(&mut session, path)?;
    }
    session.trace.lexical_lookup = cli.trace_lookup;
    for spec in &cli.trace_rule {
        let (name, a, s) = trace_flags(spec)?;
        session.trace.rules.insert(name, (a, s));
    }
    if let Some(n) = cli.max_undeletions {
        session.config_mut().max_deletion_unapplications = n;
    }
    session.format = match cli.format {
        Format::Text => OutputFormat::Text,
        Format::Structured => OutputFormat::Structured,
    };
    match &cli.command {
        Command::Run { file } => out += &load(&mut session, file)?,
        Command::Parse { word } => session.morph_and_lookup(word, &mut out).map_err(|e| e.to_string())?,
        Command::Generate { shape } => {
            let surface = session.generate(shape).map_err(|e| e.to_string())?;
            out.push_str(&surface);
            out.push('\n');
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
