//! `poincare`: Kloosterman sums, Selberg identity checks, Poincare series
//! coefficients and certificates over real quadratic fields.

mod cache;
mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use poincare_core::kloosterman::Kloosterman;
use poincare_core::RealQuadraticField;

use cache::JsonlCache;
use commands::{Grid, KloostermanArgs, RecurrenceArgs, SeriesArgs};
use config::{parse_field_spec, Config};
use output::Format;

const ELEMENT_HELP: &str = "\
Elements: integers, w (the second basis element), delta (totally positive
generator of the different), eps (totally positive fundamental unit), pairs
(a,b) meaning a+b*w, combined with + - * / and parentheses.
Examples: 3+2*w, 1/delta, (2,1)/5, -(1+w)*eps.
Ideals: an element (its principal ideal) or hnf:a,b,c for aZ + (b+c*w)Z.

Exit codes: 0 success, 1 identity or bound violation, 2 usage or
precondition error, 3 inconclusive.

Cache: exact Kloosterman sums persist in <dir>/kloosterman-v1.jsonl, with
dir from --cache-dir, else $POINCARE_CACHE_DIR, else the config file.";

#[derive(Parser)]
#[command(name = "poincare", version, about, after_help = ELEMENT_HELP)]
struct Cli {
    /// Field Q(sqrt d), as d or Qsqrt:d [default: config, else 5]
    #[arg(long, global = true, value_parser = parse_field_spec)]
    d: Option<i64>,
    /// Output format [default: config, else json]
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// TOML configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory of the persistent Kloosterman cache
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct Series {
    /// Even weight, at least 4
    #[arg(long)]
    k: u32,
    /// Level ideal n
    #[arg(long, default_value = "1")]
    level: String,
    /// Totally positive generator of c
    #[arg(long, default_value = "1")]
    q: String,
    #[arg(long, default_value_t = 0.5)]
    eta: f64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Discriminant, units, different and class data
    FieldInfo,
    /// One Kloosterman sum S_m(nu, mu; c)
    Kloosterman {
        #[arg(long)]
        nu: String,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        c: String,
        /// Modulus ideal m [default: (c)]
        #[arg(long)]
        modulus: Option<String>,
        /// Fail instead of falling back to intervals when the cyclotomic order is too large
        #[arg(long)]
        exact: bool,
    },
    /// Selberg's identity over every modulus up to a norm bound
    SelbergCheck {
        #[arg(long, default_value_t = 200)]
        max_norm_q: u64,
        #[arg(long, value_enum, default_value_t = Grid::Small)]
        grid: Grid,
    },
    /// |S| against the Weil-type bound on random queries
    WeilAudit {
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 60)]
        max_norm: i64,
    },
    /// Non-vanishing certificate for the coefficient c_k(mu, mu)
    Certify {
        #[command(flatten)]
        series: Series,
        #[arg(long, default_value = "1")]
        mu: String,
        /// Cutoff ladder as X:M steps, X a multiple of N(c n d), e.g. 25:2,50:3
        #[arg(long, value_parser = commands::parse_ladder)]
        ladder: Option<commands::Ladder>,
    },
    /// Constants ledger and non-vanishing thresholds
    Thresholds {
        #[command(flatten)]
        series: Series,
        /// Totally positive alpha with alpha*c integral
        #[arg(long, default_value = "1")]
        alpha: String,
    },
    /// The coefficient recurrence at a prime p
    Recurrence {
        #[command(flatten)]
        series: Series,
        #[arg(long, default_value = "1")]
        nu: String,
        #[arg(long, default_value = "1")]
        mu: String,
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Norm cutoff
        #[arg(long, default_value_t = 10_000)]
        x: u64,
        /// Unit window
        #[arg(long = "M", default_value_t = 3)]
        window: u32,
        #[arg(long, default_value_t = 1e-3)]
        tolerance: f64,
    },
    /// Hecke pairing symmetry, identity and multiplicativity on random functions
    HeckeCheck {
        #[arg(long, default_value_t = 8)]
        k: u32,
        #[arg(long, default_value = "1")]
        level: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Largest ideal norm in the random functions
        #[arg(long, default_value_t = 200)]
        max_norm: u64,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::FieldInfo => "field-info",
            Cmd::Kloosterman { .. } => "kloosterman",
            Cmd::SelbergCheck { .. } => "selberg-check",
            Cmd::WeilAudit { .. } => "weil-audit",
            Cmd::Certify { .. } => "certify",
            Cmd::Thresholds { .. } => "thresholds",
            Cmd::Recurrence { .. } => "recurrence",
            Cmd::HeckeCheck { .. } => "hecke-check",
        }
    }
}

fn series(s: &Series) -> SeriesArgs<'_> {
    SeriesArgs {
        k: s.k,
        level: &s.level,
        q: &s.q,
        eta: s.eta,
    }
}

fn run(cli: &Cli, cfg: &Config, f: &RealQuadraticField, kl: &Kloosterman) -> commands::CmdResult {
    match &cli.cmd {
        Cmd::FieldInfo => commands::field_info(f),
        Cmd::Kloosterman {
            nu,
            mu,
            c,
            modulus,
            exact,
        } => commands::kloosterman(
            f,
            kl,
            &KloostermanArgs {
                nu,
                mu,
                c,
                modulus: modulus.as_deref(),
                exact: *exact,
            },
        ),
        Cmd::SelbergCheck { max_norm_q, grid } => commands::selberg_check(f, kl, *max_norm_q, *grid),
        Cmd::WeilAudit {
            samples,
            seed,
            max_norm,
        } => commands::weil_audit(f, kl, *samples, *seed, *max_norm),
        Cmd::Certify { series: s, mu, ladder } => commands::certify(f, cfg, &series(s), mu, ladder.clone()),
        Cmd::Thresholds { series: s, alpha } => commands::thresholds(f, &series(s), alpha),
        Cmd::Recurrence {
            series: s,
            nu,
            mu,
            p,
            m,
            n,
            x,
            window,
            tolerance,
        } => commands::recurrence(
            f,
            cfg,
            &series(s),
            &RecurrenceArgs {
                nu,
                mu,
                p,
                m: *m,
                n: *n,
                x: *x,
                window: *window,
                tolerance: *tolerance,
            },
        ),
        Cmd::HeckeCheck {
            k,
            level,
            samples,
            seed,
            max_norm,
        } => commands::hecke_check(f, *k, level, *samples, *seed, *max_norm),
    }
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let cfg = match &cli.config {
        Some(p) => match Config::load(p) {
            Ok(c) => c,
            Err(e) => return usage_error(e),
        },
        None => Config::default(),
    };
    let d = cli.d.or(cfg.field).unwrap_or(5);
    let field = match RealQuadraticField::new(d) {
        Ok(f) => f,
        Err(e) => return usage_error(e),
    };
    let format = cli.format.unwrap_or(cfg.format);
    let cache_dir = cli
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("POINCARE_CACHE_DIR").map(PathBuf::from))
        .or_else(|| cfg.cache_dir.clone());
    let cache = match cache_dir.as_deref().map(JsonlCache::open).transpose() {
        Ok(c) => c,
        Err(e) => return usage_error(format!("cache: {e}")),
    };
    if let Some(c) = &cache {
        if c.skipped() > 0 {
            eprintln!("warning: skipped {} unreadable cache lines in {}", c.skipped(), c.path().display());
        }
    }
    let kl = match &cache {
        Some(c) => Kloosterman::with_cache(cfg.kloosterman(), c),
        None => Kloosterman::new(cfg.kloosterman()),
    };
    let start = Instant::now();
    let result = run(&cli, &cfg, &field, &kl);
    eprintln!("{}: {:.3} s", cli.cmd.name(), start.elapsed().as_secs_f64());
    match result {
        Ok((body, outcome)) => {
            let spec = field.spec_string();
            let doc = output::document(cli.cmd.name(), Some((&spec, field.basis_string())), body);
            print!("{}", output::render(&doc, format));
            ExitCode::from(outcome.code() as u8)
        }
        Err(e) => usage_error(e),
    }
}
