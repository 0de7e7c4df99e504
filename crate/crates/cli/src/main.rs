use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use humannav::harness::{Environment, PolicyRef};
use humannav::sim::ActionSpace;
use humannav_cli::{datagen, eval, generate, serve, EvalArgs};

#[derive(Parser)]
#[command(
    name = "humannav",
    version,
    about = "Navigation among moving humans on viewpoint graphs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate buildings with humans plus an episode suite.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        buildings: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a scripted policy over an episode suite.
    Eval {
        /// oracle-optimal, oracle-suboptimal, random or greedy.
        #[arg(long)]
        policy: PolicyRef,
        #[arg(long)]
        scenarios: PathBuf,
        #[arg(long)]
        episodes: PathBuf,
        #[arg(long, default_value = "egocentric")]
        mode: ActionSpace,
        #[arg(long, default_value = "dynamic")]
        env: Environment,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON report path; the CSV and the log directory go beside it.
        #[arg(long)]
        report: PathBuf,
    },
    /// Roll out random walks into a JSONL dataset.
    Datagen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long)]
        scenarios: PathBuf,
        #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
        host: IpAddr,
    },
}

fn run(cli: Cli) -> humannav::Result<()> {
    match cli.cmd {
        Cmd::Generate {
            seed,
            buildings,
            out,
        } => {
            let n = generate(seed, buildings, &out)?;
            println!(
                "wrote {buildings} scenarios and {n} episodes to {}",
                out.display()
            );
        }
        Cmd::Eval {
            policy,
            scenarios,
            episodes,
            mode,
            env,
            seed,
            report,
        } => {
            let r = eval(&EvalArgs {
                policy,
                scenarios,
                episodes,
                mode,
                env,
                seed,
                report,
            })?;
            print!("{}", humannav::metrics::to_csv(&r.rows));
            if r.errors() > 0 {
                eprintln!("{} episodes failed", r.errors());
            }
        }
        Cmd::Datagen { config, out } => {
            let n = datagen(&config, &out)?;
            println!("wrote {n} trajectories to {}", out.display());
        }
        Cmd::Serve {
            port,
            scenarios,
            host,
        } => {
            let addr = SocketAddr::new(host, port);
            eprintln!("listening on http://{addr}");
            serve(addr, &scenarios)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
