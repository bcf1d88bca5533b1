use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use coaplan::service::{router, AppState};
use coaplan::{run_plan, PlanArgs};
use coaplan_core::{parse_kb, PlannerConfig};

#[derive(Parser)]
#[command(
    name = "coaplan",
    version,
    about = "Expand a course of action into a scheduled plan"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Synchronization matrix period in minutes.
    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u32).range(1..))]
    period: u32,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    arc_depth_cap: u32,
    #[arg(long, default_value_t = 2000)]
    node_cap: usize,
}

impl ConfigArgs {
    fn config(&self) -> PlannerConfig {
        PlannerConfig {
            arc_depth_cap: self.arc_depth_cap,
            node_cap: self.node_cap,
            sync_period_min: self.period,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Plan a scenario and write the plan as JSON.
    Plan {
        scenario: PathBuf,
        kb: PathBuf,
        /// Plan JSON destination; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the synchronization matrix as CSV.
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Serve the HTTP/JSON API.
    Serve {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

fn serve(kb: PathBuf, addr: SocketAddr, cfg: PlannerConfig) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&kb).with_context(|| format!("reading {}", kb.display()))?;
    let kb = parse_kb(&text).map_err(|e| anyhow::anyhow!("{}:{}: {e}", kb.display(), e.span()))?;
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        eprintln!("listening on {}", listener.local_addr()?);
        axum::serve(listener, router(AppState::new(kb, cfg))).await?;
        Ok(())
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Plan {
            scenario,
            kb,
            out,
            matrix,
            config,
        } => {
            let args = PlanArgs {
                scenario,
                kb,
                out,
                matrix,
                cfg: config.config(),
            };
            let code = run_plan(
                &args,
                &mut std::io::stdout().lock(),
                &mut std::io::stderr().lock(),
            );
            ExitCode::from(code as u8)
        }
        Command::Serve { kb, addr, config } => match serve(kb, addr, config.config()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
    }
}
