use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kahlerlab::profile::Family;
use kahlerlab_cli::{parse_grid, CliError, Format, Output, RunConfig};

#[derive(Parser)]
#[command(name = "kahlerlab", version, about = "Curvature, obstruction and Bergman checks for scalar-flat momentum-construction metrics")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Flat base C^N with parameter BETA.
    #[arg(long, num_args = 2, value_names = ["N", "BETA"], allow_negative_numbers = true, conflicts_with = "ok", global = true)]
    flat: Option<Vec<String>>,
    /// Line bundle O(-K) over CP^1.
    #[arg(long, value_name = "K", global = true)]
    ok: Option<u32>,
    #[arg(long, global = true)]
    mu0: Option<f64>,
    /// Momentum grid: `a..b`, `a..b:step`, `x,y,z` or one value.
    #[arg(long, allow_hyphen_values = true, global = true)]
    tau: Option<String>,
    /// Comma-separated quantization parameters.
    #[arg(long, global = true)]
    alpha: Option<String>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, value_enum, global = true)]
    format: Option<FormatArg>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Read a JSON run configuration; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, hide = true, global = true)]
    inject_fault: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate phi and Q.
    Profile,
    /// Tabulate the momentum coordinates t(tau) and f(tau).
    Solve,
    /// Curvature invariants along a momentum grid.
    Curvature,
    /// Compare a2 from the tensor path with its closed form.
    A2,
    /// Calabi diastasis obstruction tests.
    Obstruct,
    /// Bergman epsilon-function and its large-alpha fit.
    Epsilon,
    /// Run the built-in self-checks.
    Verify,
}

fn build_config(g: &Global) -> Result<RunConfig, CliError> {
    let mut cfg = match &g.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::new(None),
    };
    if let Some(v) = &g.flat {
        let n = v[0].parse().map_err(|_| CliError::usage(format!("--flat: bad N '{}'", v[0])))?;
        let beta = v[1].parse().map_err(|_| CliError::usage(format!("--flat: bad BETA '{}'", v[1])))?;
        cfg.family = Some(Family::Flat { n, beta });
    }
    if let Some(k) = g.ok {
        cfg.family = Some(Family::OMinusK { k });
    }
    if let Some(v) = g.mu0 {
        cfg.mu0 = v;
    }
    if let Some(s) = &g.tau {
        cfg.tau = parse_grid(s)?;
    }
    if let Some(s) = &g.alpha {
        cfg.alpha = parse_grid(s)?;
    }
    if let Some(v) = g.tol {
        cfg.tol = v;
    }
    if let Some(v) = g.seed {
        cfg.seed = v;
    }
    if let Some(f) = g.format {
        cfg.format = match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        };
    }
    if g.inject_fault.is_some() {
        cfg.inject_fault = g.inject_fault.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn render(out: &Output, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&out.json).expect("serializable output") + "\n",
        Format::Csv => {
            let mut s = out.table.header.join(",") + "\n";
            for row in &out.table.rows {
                s += &row.iter().map(|c| if c.contains(',') { format!("\"{c}\"") } else { c.clone() }).collect::<Vec<_>>().join(",");
                s += "\n";
            }
            s
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let cfg = build_config(&cli.global)?;
    let out = match cli.command {
        Command::Profile => kahlerlab_cli::cmd_profile(&cfg),
        Command::Solve => kahlerlab_cli::cmd_solve(&cfg),
        Command::Curvature => kahlerlab_cli::cmd_curvature(&cfg),
        Command::A2 => kahlerlab_cli::cmd_a2(&cfg),
        Command::Obstruct => kahlerlab_cli::cmd_obstruct(&cfg),
        Command::Epsilon => kahlerlab_cli::cmd_epsilon(&cfg),
        Command::Verify => kahlerlab_cli::cmd_verify(&cfg),
    }?;
    let text = render(&out, cfg.format);
    let io = |e: std::io::Error| CliError { code: 1, message: e.to_string() };
    match &cli.global.out {
        Some(path) => std::fs::write(path, text).map_err(io)?,
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io)?,
    }
    Ok(out.ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("kahlerlab: one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("kahlerlab: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
