//! `mvno-sim`: drives the harness from the command line.
//!
//! Exit codes: 0 when every scenario assertion held, 1 when one failed,
//! 2 for configuration errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use super::bench::{bench, bench_concurrent, CSV_HEADER, REFERENCE_MS};
use super::{
    attack_fake_gnb, attack_replay, experiment_linkability, ConfigInvalid, Protocol, RunKind,
    RunRecord, RunStatus, ScenarioConfig, Step, Transcript, World,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "mvno-sim",
    version,
    about = "Anonymous MVNO authentication simulator"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Flat `key = value` file; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    ues: Option<usize>,
    #[arg(long, global = true)]
    gnbs: Option<usize>,
    #[arg(long, global = true)]
    list_size: Option<usize>,
    #[arg(long, global = true)]
    skew_ms: Option<u64>,
    /// Comma-separated; only `session-keys` exists.
    #[arg(long, global = true)]
    features: Option<String>,
    /// Writes the transcript as a hex dump.
    #[arg(long, global = true, value_name = "PATH")]
    transcript_out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AttackType {
    Replay,
    FakeGnb,
    Linkability,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Registration only: operators, cells and users.
    Setup,
    /// Initial authentication for every UE.
    RunAka,
    /// Initial authentication, then a handover to the next cell.
    RunHo,
    /// Revokes UE 0 and checks it is locked out while the others are not.
    Revoke,
    /// Runs one adversary scenario and checks the protocol holds.
    Attack {
        #[arg(long = "type", value_enum)]
        kind: AttackType,
        /// Linkability trials per protocol.
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        /// Random certificate forgeries for `fake-gnb`.
        #[arg(long, default_value_t = 1000)]
        forgeries: usize,
    },
    /// Per-message timings and sizes as CSV or JSON, with a reference table.
    Bench {
        /// Timed iterations after warm-up.
        #[arg(long, default_value_t = 50)]
        iterations: usize,
        /// Also measure threaded throughput with this many runs per UE.
        #[arg(long, value_name = "RUNS")]
        concurrent: Option<usize>,
    },
}

enum Failure {
    Config(String),
    Io(std::io::Error),
}

impl From<ConfigInvalid> for Failure {
    fn from(e: ConfigInvalid) -> Self {
        Failure::Config(e.0)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn load_config(c: &Common) -> Result<ScenarioConfig, Failure> {
    let mut cfg = match &c.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
            ScenarioConfig::parse(&text)?
        }
        None => ScenarioConfig::default(),
    };
    let flags = [
        ("seed", c.seed.map(|v| v.to_string())),
        ("ues", c.ues.map(|v| v.to_string())),
        ("gnbs", c.gnbs.map(|v| v.to_string())),
        ("list-size", c.list_size.map(|v| v.to_string())),
        ("skew-ms", c.skew_ms.map(|v| v.to_string())),
        ("features", c.features.clone()),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    command: &'static str,
    passed: bool,
    config: ScenarioConfig,
    result: T,
}

#[derive(Serialize)]
struct SetupSummary {
    users: usize,
    cells: usize,
    aka_list_len: usize,
    ho_list_len: usize,
    aka_list_version: u32,
    ho_list_version: u32,
}

fn runs_csv(runs: &[RunRecord]) -> String {
    let mut out = String::from("run,kind,ue,gnb,status,reason\n");
    for r in runs {
        let kind = match r.kind {
            RunKind::Aka => "aka",
            RunKind::Handover => "handover",
            RunKind::Adversarial => "adversarial",
        };
        let (status, reason) = match r.status {
            RunStatus::Accepted => ("accepted".to_owned(), String::new()),
            RunStatus::Pending => ("pending".to_owned(), String::new()),
            RunStatus::Failed { at, reason } => (
                format!("failed@{at}"),
                reason.map(|e| e.name().to_owned()).unwrap_or_default(),
            ),
        };
        out.push_str(&format!(
            "{},{kind},{},{},{status},{reason}\n",
            r.id, r.ue, r.gnb
        ));
    }
    out
}

struct Ctx<'a> {
    common: &'a Common,
    cfg: ScenarioConfig,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn emit<T: Serialize>(
        &mut self,
        command: &'static str,
        passed: bool,
        result: T,
        csv: String,
    ) -> Result<bool, Failure> {
        match self.common.output {
            Output::Csv => self.out.write_all(csv.as_bytes())?,
            Output::Json => {
                let r = Report {
                    command,
                    passed,
                    config: self.cfg.clone(),
                    result,
                };
                let text = serde_json::to_string_pretty(&r).map_err(std::io::Error::other)?;
                writeln!(self.out, "{text}")?;
            }
        }
        Ok(passed)
    }

    fn save(&self, t: &Transcript) -> Result<(), Failure> {
        if let Some(p) = &self.common.transcript_out {
            std::fs::write(p, t.to_hex_dump())?;
        }
        Ok(())
    }

    fn runs(
        &mut self,
        command: &'static str,
        w: World,
        expect: impl Fn(&RunRecord) -> bool,
    ) -> Result<bool, Failure> {
        let t = w.into_transcript();
        self.save(&t)?;
        let passed = t.runs.iter().all(&expect);
        let csv = runs_csv(&t.runs);
        self.emit(command, passed, &t.runs, csv)
    }
}

fn setup(ctx: &mut Ctx) -> Result<bool, Failure> {
    let w = World::new(ctx.cfg.clone())?;
    let s = SetupSummary {
        users: w.mvno().user_count(),
        cells: w.n_gnbs(),
        aka_list_len: w.mvno().aka_list().len(),
        ho_list_len: w.cn().ho_list().len(),
        aka_list_version: w.mvno().aka_list().version(),
        ho_list_version: w.cn().ho_list().version(),
    };
    ctx.save(w.transcript())?;
    let passed = w.transcript().errors.is_empty();
    let csv = format!(
        "users,cells,aka_list_len,ho_list_len,aka_list_version,ho_list_version\n{},{},{},{},{},{}\n",
        s.users, s.cells, s.aka_list_len, s.ho_list_len, s.aka_list_version, s.ho_list_version
    );
    ctx.emit("setup", passed, s, csv)
}

fn run_aka(ctx: &mut Ctx) -> Result<bool, Failure> {
    let mut w = World::new(ctx.cfg.clone())?;
    let g = w.n_gnbs();
    let steps: Vec<Step> = (0..w.n_ues())
        .map(|ue| Step::Aka { ue, gnb: ue % g })
        .collect();
    w.run_steps(&steps);
    ctx.runs("run-aka", w, RunRecord::accepted)
}

fn run_ho(ctx: &mut Ctx) -> Result<bool, Failure> {
    let mut w = World::new(ctx.cfg.clone())?;
    let steps = ctx.cfg.steps();
    w.run_steps(&steps);
    ctx.runs("run-ho", w, RunRecord::accepted)
}

fn revoke(ctx: &mut Ctx) -> Result<bool, Failure> {
    let mut w = World::new(ctx.cfg.clone())?;
    w.run_steps(&ctx.cfg.steps());
    let first = w.transcript().runs.len();
    w.run_steps(&[Step::Revoke { ue: 0 }]);
    let g = w.n_gnbs();
    let after: Vec<Step> = (0..w.n_ues())
        .flat_map(|ue| {
            [
                Step::Aka { ue, gnb: ue % g },
                Step::Handover {
                    ue,
                    gnb: (ue + 1) % g,
                },
            ]
        })
        .collect();
    w.run_steps(&after);
    let t = w.into_transcript();
    ctx.save(&t)?;
    let passed = t.runs.iter().enumerate().all(|(i, r)| {
        if i < first {
            r.accepted()
        } else {
            r.accepted() != (r.ue == 0)
        }
    });
    let csv = runs_csv(&t.runs);
    ctx.emit("revoke", passed, &t.runs, csv)
}

fn attack(
    ctx: &mut Ctx,
    kind: AttackType,
    trials: usize,
    forgeries: usize,
) -> Result<bool, Failure> {
    match kind {
        AttackType::Replay => {
            let v = attack_replay(&ctx.cfg)?;
            ctx.save(&v.transcript)?;
            let mut csv = String::from("message,window,outcome\n");
            for c in &v.cases {
                csv.push_str(&format!("{},{:?},{:?}\n", c.message, c.window, c.outcome));
            }
            let held = v.held();
            ctx.emit("attack", held, &v, csv)
        }
        AttackType::FakeGnb => {
            let v = attack_fake_gnb(&ctx.cfg, forgeries)?;
            ctx.save(&v.transcript)?;
            let csv = format!(
                "kind,attempts,accepts\nself-keyed,{},{}\nstale,{},{}\nforgery,{},{}\n",
                v.self_keyed_attempts,
                v.self_keyed_accepts,
                v.stale_attempts,
                v.stale_accepts,
                v.forgery_attempts,
                v.forgery_accepts
            );
            let held = v.accepts() == 0;
            ctx.emit("attack", held, &v, csv)
        }
        AttackType::Linkability => {
            let reports = [
                experiment_linkability(&ctx.cfg, Protocol::Aka, trials)?,
                experiment_linkability(&ctx.cfg, Protocol::Handover, trials)?,
            ];
            let mut csv = String::from(
                "protocol,trials,completed,repeated_fields,matcher_advantage,classifier_accuracy\n",
            );
            for r in &reports {
                csv.push_str(&format!(
                    "{:?},{},{},{},{:.4},{:.4}\n",
                    r.protocol,
                    r.trials,
                    r.completed,
                    r.repeated_fields,
                    r.matcher_advantage,
                    r.classifier_accuracy
                ));
            }
            let held = reports.iter().all(|r| r.held());
            ctx.emit("attack", held, &reports, csv)
        }
    }
}

#[derive(Serialize)]
struct BenchOut {
    report: super::bench::BenchReport,
    reference_ms: Vec<(&'static str, f64)>,
    ordering_holds: bool,
    throughput: Option<super::bench::ThroughputReport>,
}

fn run_bench(ctx: &mut Ctx, iterations: usize, concurrent: Option<usize>) -> Result<bool, Failure> {
    let report = bench(&ctx.cfg, iterations)?;
    let throughput = concurrent
        .map(|n| bench_concurrent(&ctx.cfg, n))
        .transpose()?;
    let csv = report.to_csv();
    debug_assert!(csv.starts_with(CSV_HEADER));
    let out = BenchOut {
        ordering_holds: report.ordering_holds(),
        reference_ms: REFERENCE_MS.to_vec(),
        report,
        throughput,
    };
    // Timings are reported, not asserted.
    ctx.emit("bench", true, out, csv)
}

/// Parses `args` (program name first) and runs the command, writing the
/// report to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let cfg = match load_config(&cli.common) {
        Ok(c) => c,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            return EXIT_CONFIG;
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let mut ctx = Ctx {
        common: &cli.common,
        cfg,
        out,
    };
    let r = match cli.command {
        Command::Setup => setup(&mut ctx),
        Command::RunAka => run_aka(&mut ctx),
        Command::RunHo => run_ho(&mut ctx),
        Command::Revoke => revoke(&mut ctx),
        Command::Attack {
            kind,
            trials,
            forgeries,
        } => attack(&mut ctx, kind, trials, forgeries),
        Command::Bench {
            iterations,
            concurrent,
        } => run_bench(&mut ctx, iterations, concurrent),
    };
    match r {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_ASSERTION,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            EXIT_CONFIG
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_ASSERTION
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os(), &mut std::io::stdout().lock())
}
