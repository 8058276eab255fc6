mod table;

use clap::{Args, Parser, Subcommand};
use edgewave::acceptance;
use edgewave::asymptotics::{
    g2_family, proof_scaffold, theorem_expansion, theta, transition_eval, GFunctionData, IhInput,
};
use edgewave::fredholm::{dlog_det_ds, large_gap_asymptote, log_det, DEFAULT_NODES};
use edgewave::hierarchy::lenard_l;
use edgewave::painleve2::{hamiltonian_pII, solve_hastings_mcleod};
use edgewave::pi2k_profile::{h_asy, solve_tritronquee, I_h, I_h_from_expansion};
use edgewave::{Error, Result};
use rayon::prelude::*;
use std::path::PathBuf;
use std::process::ExitCode;
use table::{render, Format, Record};

#[derive(Parser, Debug)]
#[command(name = "edgewave", version, about = "Soft-edge gap probabilities and their large-gap asymptotics")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

/// A uniform grid from `--from` to `--to`. With `--points 1` only `--from`
/// is used.
#[derive(Args, Debug, Clone, Copy)]
struct Grid {
    #[arg(long, allow_hyphen_values = true)]
    from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    to: Option<f64>,
    #[arg(long, default_value_t = 1)]
    points: usize,
}

impl Grid {
    fn values(&self, single: Option<f64>, name: &str) -> Result<Vec<f64>> {
        if let Some(v) = single {
            return Ok(vec![v]);
        }
        let (Some(a), Some(b)) = (self.from, self.to.or(self.from)) else {
            return Err(Error::Domain(format!("give --{name} or --from/--to")));
        };
        if self.points == 0 {
            return Err(Error::Domain("--points must be positive".into()));
        }
        if self.points == 1 {
            return Ok(vec![a]);
        }
        Ok((0..self.points)
            .map(|i| a + (b - a) * i as f64 / (self.points - 1) as f64)
            .collect())
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// log det(I - K_Ai) on (s, inf), its s-derivative and the large-gap asymptote.
    Tw {
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
        #[command(flatten)]
        grid: Grid,
        #[arg(long, default_value_t = DEFAULT_NODES)]
        nodes: usize,
    },
    /// Hastings-McLeod solution of Painleve II and its Hamiltonian.
    Hm {
        /// Half-width of the solve window.
        #[arg(long = "L", default_value_t = 10.0)]
        half_width: f64,
        /// Grid intervals of the solve.
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
        #[command(flatten)]
        grid: Grid,
    },
    /// Tritronquee solution of the k = 1 equation, its Hamiltonian and I_h.
    Pi2 {
        #[arg(long = "L", default_value_t = 40.0)]
        half_width: f64,
        #[arg(long, default_value_t = 4000)]
        n: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t1: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
        #[command(flatten)]
        grid: Grid,
    },
    /// Symbolic members of the Lenard hierarchy.
    Hierarchy {
        #[command(subcommand)]
        action: HierarchyAction,
    },
    /// theta, g_1 and g_2 with their matching remainders on a log grid of eta.
    Gfun {
        #[arg(long)]
        k: u32,
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[arg(long, default_value_t = 100.0)]
        eta_min: f64,
        #[arg(long, default_value_t = 10000.0)]
        eta_max: f64,
        #[arg(long, default_value_t = 21)]
        points: usize,
    },
    /// The large-gap expansion at (s, x), term by term.
    Asy {
        #[arg(long)]
        k: u32,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
        #[command(flatten)]
        grid: Grid,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        /// Supply I_h(x) directly.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "profile")]
        ih: Option<f64>,
        /// For k = 1, compute I_h from a tritronquee solve on [-L, L], or from
        /// the expansion when |x| >= 20.
        #[arg(long)]
        profile: bool,
        #[arg(long = "L", default_value_t = 40.0)]
        half_width: f64,
        #[arg(long, default_value_t = 4000)]
        n: usize,
    },
    /// The expansion along the transition curve minus the Airy asymptote in s~.
    Transition {
        #[arg(long)]
        k: u32,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
        #[command(flatten)]
        grid: Grid,
        #[arg(long, allow_hyphen_values = true)]
        stilde: f64,
        /// Replace log(x^2+1) by 2 log x.
        #[arg(long)]
        simplify_log: bool,
    },
    /// Intermediate quantities of the integral decomposition.
    Scaffold {
        #[arg(long)]
        k: u32,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
        #[command(flatten)]
        grid: Grid,
        /// Sign of x_0.
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        sign: i32,
    },
    /// Run the acceptance criteria.
    Verify {
        /// Coarser grids; same tolerances.
        #[arg(long)]
        quick: bool,
        /// Exit 0 when the only failures are documented as unattainable.
        #[arg(long)]
        allow_known: bool,
    },
}

#[derive(Subcommand, Debug)]
enum HierarchyAction {
    /// Print L_j in canonical form.
    Show {
        #[arg(long)]
        j: usize,
    },
}

enum Output {
    Table(Vec<Record>),
    Text(String),
    /// Text plus the exit code to use.
    Verdict(String, u8),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("edgewave: {e}");
        return ExitCode::from(2);
    }
    let (text, code) = match run(&cli.command) {
        Ok(Output::Table(rows)) => (render(&rows, cli.format), 0),
        Ok(Output::Text(t)) => (t, 0),
        Ok(Output::Verdict(t, code)) => (t, code),
        Err(e) => {
            eprintln!("edgewave: {e}");
            return ExitCode::from(1);
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("edgewave: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("EDGEWAVE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("EDGEWAVE_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(cmd: &Command) -> Result<Output> {
    let rows = match *cmd {
        Command::Tw { s, grid, nodes } => grid
            .values(s, "s")?
            .par_iter()
            .map(|&s| {
                let logdet = log_det(s, nodes)?;
                let asymptote = large_gap_asymptote(s);
                Ok(Record::new()
                    .with("s", s)
                    .with("logdet", logdet)
                    .with("dlogdet_ds", dlog_det_ds(s, nodes)?)
                    .with("asymptote", asymptote)
                    .with("residual", logdet - asymptote))
            })
            .collect::<Result<Vec<_>>>()?,
        Command::Hm { half_width, n, x, grid } => {
            let p = solve_hastings_mcleod(half_width, n)?;
            let xs = if x.is_none() && grid.from.is_none() {
                p.grid.clone()
            } else {
                grid.values(x, "x")?
            };
            xs.iter()
                .map(|&x| {
                    let (q, dq) = p.eval(x)?;
                    Ok(Record::new()
                        .with("x", x)
                        .with("q", q)
                        .with("q_prime", dq)
                        .with("hamiltonian", hamiltonian_pII(&p, x)?))
                })
                .collect::<Result<Vec<_>>>()?
        }
        Command::Pi2 { half_width, n, t1, x, grid } => {
            let p = solve_tritronquee(half_width, n, t1)?;
            let xs = if x.is_none() && grid.from.is_none() {
                p.grid.clone()
            } else {
                grid.values(x, "x")?
            };
            xs.iter()
                .map(|&x| {
                    let (q, dq) = p.eval_q(x)?;
                    let ih = I_h(&p, x).ok();
                    Ok(Record::new()
                        .with("x", x)
                        .with("q", q)
                        .with("q_prime", dq)
                        .with("h", p.eval_h(x)?)
                        .with("h_asy", h_asy(1, x, t1)?)
                        .with("I_h", ih.map(|e| e.value))
                        .with("I_h_error", ih.map(|e| e.error)))
                })
                .collect::<Result<Vec<_>>>()?
        }
        Command::Hierarchy { action: HierarchyAction::Show { j } } => {
            return Ok(Output::Text(format!("{}\n", lenard_l(j)?)));
        }
        Command::Gfun { k, r, y, eta_min, eta_max, points } => gfun(k, r, y, eta_min, eta_max, points)?,
        Command::Asy { k, s, grid, x, ih, profile, half_width, n } => {
            let ih = match (ih, profile) {
                (Some(v), _) => IhInput::Value(v),
                (None, true) => {
                    if k != 1 {
                        return Err(Error::Domain("--profile is only available for k = 1".into()));
                    }
                    // Far out the expansion is more accurate than any window.
                    let est = if x.abs() >= 20.0 {
                        I_h_from_expansion(0.0, x)?
                    } else {
                        I_h(&solve_tritronquee(half_width, n, 0.0)?, x)?
                    };
                    IhInput::Value(est.value)
                }
                (None, false) => IhInput::Omitted,
            };
            grid.values(s, "s")?
                .iter()
                .map(|&s| {
                    let b = theorem_expansion(k, s, x, ih)?;
                    let mut rec = Record::new().with("k", k).with("s", s).with("x", x);
                    for (name, v) in b.terms() {
                        rec = rec.with(name, v);
                    }
                    Ok(rec
                        .with("total", b.total)
                        .with("ih_supplied", b.ih_supplied)
                        .with("in_window", b.in_window))
                })
                .collect::<Result<Vec<_>>>()?
        }
        Command::Transition { k, s, grid, stilde, simplify_log } => grid
            .values(s, "s")?
            .iter()
            .map(|&s| {
                let t = transition_eval(k, s, stilde, simplify_log)?;
                Ok(Record::new()
                    .with("k", k)
                    .with("s", s)
                    .with("stilde", stilde)
                    .with("x", t.x)
                    .with("delta", t.delta)
                    .with("power_block", t.power_block)
                    .with("log_block", t.log_block)
                    .with("ih_term", t.ih_term)
                    .with("ih_included", t.ih_included)
                    .with("defect", t.defect))
            })
            .collect::<Result<Vec<_>>>()?,
        Command::Scaffold { k, s, grid, sign } => grid
            .values(s, "s")?
            .iter()
            .map(|&s| {
                let sc = proof_scaffold(k, s, sign)?;
                Ok(Record::new()
                    .with("k", k)
                    .with("s", s)
                    .with("x0", sc.x0)
                    .with("s0", sc.s0)
                    .with("s1", sc.s1)
                    .with("s2", sc.s2)
                    .with("j2_s1", sc.j2_s1)
                    .with("j2_s2", sc.j2_s2)
                    .with("relation_lhs", sc.relation_lhs)
                    .with("relation_rhs", sc.relation_rhs)
                    .with("cancellation", sc.cancellation)
                    .with("cancellation_direct", sc.cancellation_direct))
            })
            .collect::<Result<Vec<_>>>()?,
        Command::Verify { quick, allow_known } => return Ok(verify(quick, allow_known)),
    };
    Ok(Output::Table(rows))
}

fn gfun(k: u32, r: f64, y: f64, eta_min: f64, eta_max: f64, points: usize) -> Result<Vec<Record>> {
    if !(eta_min > 0.0 && eta_max >= eta_min) || points < 2 {
        return Err(Error::Domain("need 0 < eta_min <= eta_max and points >= 2".into()));
    }
    let g = GFunctionData::new(k, r, y, eta_max)?;
    let g2 = g2_family(k, y)?;
    (0..points)
        .map(|i| {
            let eta = eta_min * (eta_max / eta_min).powf(i as f64 / (points - 1) as f64);
            Ok(Record::new()
                .with("eta", eta)
                .with("theta", theta(k, eta, y)?)
                .with("g1", g.g1(eta)?)
                .with("g1_remainder", g.matching_remainder(eta)?)
                .with("d1", g.d1)
                .with("g2", g2.g2(eta)?)
                .with("g2_remainder", g2.matching_remainder(eta)?)
                .with("d2", g2.d2)
                .with("region", g.region.name()))
        })
        .collect()
}

fn verify(quick: bool, allow_known: bool) -> Output {
    let results = acceptance::run_all(quick);
    let mut text = String::new();
    for r in &results {
        text.push_str(&r.line());
        text.push('\n');
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let unexplained = results.iter().filter(|r| !r.failures_are_known()).count();
    text.push_str(&format!(
        "{} of {} criteria passed, {failed} failed, {} of them documented as unattainable\n",
        results.len() - failed,
        results.len(),
        failed - unexplained
    ));
    let code = if unexplained > 0 || (failed > 0 && !allow_known) { 1 } else { 0 };
    Output::Verdict(text, code)
}
