//! The `check`, `fuzz` and `mc` commands.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Subcommand, ValueEnum};
use pseudostop_core::campaign::{barrier_record, run_instance, CampaignConfig, CampaignSummary, ModeSelection, Tally};
use pseudostop_core::filtration::is_stopping_time;
use pseudostop_core::lab::{gstoping_d_check, honest_pseudo_check, is_immersed, ny2_check, pseudo_h_check};
use pseudostop_core::montecarlo::{
    cox_uniformity, poisson_example, williams_tau, CoxParams, McReport, PoissonParams, WilliamsParams,
};
use pseudostop_core::projections::hloc_check;
use pseudostop_core::{CheckReport, Process};
use rayon::prelude::*;
use serde::Serialize;

use crate::instance::{InputError, Instance};
use crate::output::{is_counterexample, write_check, write_footer, write_mc, Footer, Sci, Subject, Timing};
use crate::{CliError, EXIT_COUNTEREXAMPLE, EXIT_OK};

/// Instances evaluated in parallel between two writes.
const FUZZ_CHUNK: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
pub enum CheckName {
    #[value(name = "ny2")]
    #[serde(rename = "ny2")]
    Ny2,
    #[value(name = "hloc")]
    #[serde(rename = "hloc")]
    Hloc,
    #[value(name = "pseudoH")]
    #[serde(rename = "pseudoH")]
    PseudoH,
    #[value(name = "honest")]
    #[serde(rename = "honest")]
    Honest,
    #[value(name = "barrier")]
    #[serde(rename = "barrier")]
    Barrier,
    #[value(name = "gstoping-d")]
    #[serde(rename = "gstoping-d")]
    GstopingD,
}

impl CheckName {
    pub const ALL: [CheckName; 6] = [
        CheckName::PseudoH,
        CheckName::Ny2,
        CheckName::Hloc,
        CheckName::Honest,
        CheckName::Barrier,
        CheckName::GstopingD,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckName::Ny2 => "ny2",
            CheckName::Hloc => "hloc",
            CheckName::PseudoH => "pseudoH",
            CheckName::Honest => "honest",
            CheckName::Barrier => "barrier",
            CheckName::GstopingD => "gstoping-d",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CheckArgs {
    /// Instance file (JSON).
    pub path: PathBuf,
    /// Checks to run; default is every check applicable to the file.
    #[arg(long, value_delimiter = ',')]
    pub checks: Vec<CheckName>,
    /// Enumeration cap for G-stopping times.
    #[arg(long, default_value_t = 100_000)]
    pub cap: u64,
}

struct Plan<'a> {
    explicit: &'a [CheckName],
}

impl Plan<'_> {
    fn wants(&self, check: CheckName) -> bool {
        self.explicit.is_empty() || self.explicit.contains(&check)
    }

    /// Explicitly requested checks must be applicable.
    fn require(&self, check: CheckName, applicable: bool, location: &str, message: &str) -> Result<bool, CliError> {
        if !applicable && self.explicit.contains(&check) {
            return Err(InputError::new(location, format!("{} {message}", check.name())).into());
        }
        Ok(applicable && self.wants(check))
    }
}

fn subject_time(name: &str) -> Subject {
    Subject {
        time: Some(name.to_string()),
        ..Subject::default()
    }
}

/// Runs the selected checks on one instance file. Exit 1 iff some record is
/// a counterexample.
pub fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    if args.cap == 0 {
        return Err(CliError::Parameter("--cap must be positive".into()));
    }
    let text = fs::read_to_string(&args.path).map_err(|e| InputError::new(args.path.display().to_string(), e))?;
    let inst = Instance::parse(&text)?;
    let plan = Plan { explicit: &args.checks };
    let space = &inst.space;
    let f = inst
        .reference()
        .ok_or_else(|| InputError::new("filtrations", "no filtration named F"))?;
    let pair = inst.pair();
    let has_times = !inst.times.is_empty();

    let mut records: Vec<(CheckReport, Subject)> = Vec::new();
    let mut ran: Vec<CheckName> = Vec::new();

    if plan.require(CheckName::PseudoH, pair.is_some(), "filtrations", "needs filtrations F and G")? {
        let pair = pair.as_ref().expect("checked");
        records.push((pseudo_h_check(pair, args.cap)?, Subject::default()));
        ran.push(CheckName::PseudoH);
    }

    let per_time = [CheckName::Ny2, CheckName::Honest, CheckName::Barrier];
    for check in per_time {
        if plan.require(check, has_times, "times", "needs at least one random time")? {
            ran.push(check);
        }
    }
    let hloc = plan.require(
        CheckName::Hloc,
        has_times || !inst.processes.is_empty(),
        "times",
        "needs a random time or a process",
    )?;
    if hloc {
        ran.push(CheckName::Hloc);
    }

    let immersed = match &pair {
        Some(p) => is_immersed(p)?.holds,
        None => false,
    };
    let mut gstoping_ran = false;
    for (name, tau) in &inst.times {
        if ran.contains(&CheckName::Ny2) {
            records.push((ny2_check(tau, f, space)?, subject_time(name)));
        }
        if hloc {
            let a = Process::indicator_from(tau, inst.horizon);
            records.push((hloc_check(&a, f, space)?, subject_time(name)));
        }
        if ran.contains(&CheckName::Honest) {
            records.push((honest_pseudo_check(tau, f, space)?, subject_time(name)));
        }
        if ran.contains(&CheckName::Barrier) {
            records.push((barrier_record(tau, f, space, "F")?, subject_time(name)));
            if let Some(p) = &pair {
                records.push((barrier_record(tau, &p.g, space, "G")?, subject_time(name)));
            }
        }
        let location = format!("times.{name}");
        let applicable = pair.is_some() && immersed && pair.as_ref().is_some_and(|p| is_stopping_time(tau, &p.g));
        let message = if pair.is_none() {
            "needs filtrations F and G"
        } else if !immersed {
            "needs F immersed in G"
        } else {
            "needs a G-stopping time"
        };
        if plan.require(CheckName::GstopingD, applicable, &location, message)? {
            let p = pair.as_ref().expect("checked");
            records.push((gstoping_d_check(tau, p)?, subject_time(name)));
            gstoping_ran = true;
        }
    }
    if gstoping_ran {
        ran.push(CheckName::GstopingD);
    }
    if hloc {
        for (name, v) in &inst.processes {
            let subject = Subject {
                process: Some(name.clone()),
                ..Subject::default()
            };
            records.push((hloc_check(v, f, space)?, subject));
        }
    }

    let mut failures = 0u64;
    let mut counterexamples = 0u64;
    for (report, subject) in &records {
        failures += !report.agree as u64;
        counterexamples += is_counterexample(report) as u64;
        write_check(out, report, subject, true, None)?;
    }
    ran.sort();
    #[derive(Serialize)]
    struct CheckParameters {
        file: String,
        checks: Vec<&'static str>,
        cap: u64,
        records: usize,
    }
    let footer: Footer<_, ()> = Footer {
        trials: 1,
        failures,
        counterexamples: Some(counterexamples),
        seed: None,
        parameters: CheckParameters {
            file: args.path.display().to_string(),
            checks: ran.iter().map(|c| c.name()).collect(),
            cap: args.cap,
            records: records.len(),
        },
        summary: None,
    };
    write_footer(out, &footer)?;
    Ok(if counterexamples > 0 { EXIT_COUNTEREXAMPLE } else { EXIT_OK })
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FuzzArgs {
    #[arg(long)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub omega_max: usize,
    #[arg(long, default_value_t = 4)]
    pub horizon_max: usize,
    /// free, refining, product_immersed, or mixed (cycles all three).
    #[arg(long, default_value = "mixed")]
    #[serde(serialize_with = "serialize_mode")]
    pub mode: ModeSelection,
    /// Enumeration cap for G-stopping times.
    #[arg(long, default_value_t = 100_000)]
    pub cap: u64,
    /// Bound on the G-stopping-time count of generated instances.
    #[arg(long, default_value_t = 100_000)]
    pub max_stopping_times: u64,
    /// Write only records with agree = false.
    #[arg(long)]
    pub failures_only: bool,
    /// Add per-instance wall-clock times to the records.
    #[arg(long)]
    pub timing: bool,
}

fn serialize_mode<S: serde::Serializer>(mode: &ModeSelection, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(mode.name())
}

impl FuzzArgs {
    pub fn config(&self) -> CampaignConfig {
        CampaignConfig {
            trials: self.trials,
            seed: self.seed,
            omega_max: self.omega_max,
            horizon_max: self.horizon_max,
            mode: self.mode,
            cap: self.cap,
            max_stopping_times: self.max_stopping_times,
            ..CampaignConfig::default()
        }
    }
}

#[derive(Serialize)]
struct FuzzSummary {
    failing_instances: u64,
    max_stopping_times: u64,
    checks: BTreeMap<String, Tally>,
    flags: BTreeMap<String, u64>,
}

/// Streams every record of every generated instance, in index order, then
/// the footer. Exit 0 iff no record has `agree = false`.
pub fn cmd_fuzz(args: &FuzzArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let config = args.config();
    config
        .validate()
        .map_err(|e| CliError::Parameter(e.to_string()))?;
    let mut summary = CampaignSummary::new(0);
    let mut start = 0u64;
    while start < config.trials {
        let end = (start + FUZZ_CHUNK).min(config.trials);
        let chunk: Vec<_> = (start..end)
            .into_par_iter()
            .map(|i| {
                let clock = Instant::now();
                run_instance(&config, i).map(|o| (o, clock.elapsed().as_secs_f64() * 1e3))
            })
            .collect::<Result<_, _>>()?;
        for (outcome, ms) in &chunk {
            summary.add(outcome);
            let subject = Subject {
                index: Some(outcome.index),
                seed: Some(outcome.seed),
                mode: Some(outcome.mode.name()),
                ..Subject::default()
            };
            let timing = args.timing.then_some(Timing { instance_ms: *ms });
            for record in &outcome.records {
                if !args.failures_only || !record.agree {
                    write_check(out, record, &subject, false, timing.as_ref())?;
                }
            }
        }
        start = end;
    }
    let footer = Footer {
        trials: summary.trials,
        failures: summary.failures,
        counterexamples: None,
        seed: Some(config.seed),
        parameters: args,
        summary: Some(FuzzSummary {
            failing_instances: summary.failing_instances,
            max_stopping_times: summary.max_stopping_times,
            checks: summary.checks.clone(),
            flags: summary.flags.clone(),
        }),
    };
    write_footer(out, &footer)?;
    Ok(if summary.failures == 0 { EXIT_OK } else { EXIT_COUNTEREXAMPLE })
}

#[derive(Debug, Clone, Subcommand)]
pub enum McCommand {
    /// Last maximum before the last zero preceding the first hitting of 1.
    Williams(WilliamsArgs),
    /// Midpoint of the first two jumps of a Poisson process.
    Poisson(PoissonArgs),
    /// Cox default time: uniform law of the barrier at tau.
    Cox(CoxArgs),
}

#[derive(Debug, Clone, Args)]
pub struct WilliamsArgs {
    #[arg(long)]
    pub paths: u64,
    #[arg(long)]
    pub dt: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Skip the rerun at dt / 2.
    #[arg(long)]
    pub no_refine: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PoissonArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub paths: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct CoxArgs {
    #[arg(long)]
    pub paths: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Serialize)]
struct McParameters {
    example: &'static str,
    paths: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    dt: Option<Sci>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<Sci>,
    #[serde(skip_serializing_if = "Option::is_none")]
    refine: Option<bool>,
}

/// Runs one Monte Carlo example. Exit 0 iff every estimator passes.
pub fn cmd_mc(command: &McCommand, out: &mut dyn Write) -> Result<u8, CliError> {
    let (reports, seed, parameters): (Vec<McReport>, u64, McParameters) = match command {
        McCommand::Williams(a) => {
            let params = WilliamsParams {
                refine: !a.no_refine,
                ..WilliamsParams::new(a.paths, a.dt, a.seed)
            };
            let p = McParameters {
                example: "williams",
                paths: a.paths,
                dt: Some(Sci(a.dt)),
                lambda: None,
                refine: Some(params.refine),
            };
            (williams_tau(&params)?, a.seed, p)
        }
        McCommand::Poisson(a) => {
            let p = McParameters {
                example: "poisson",
                paths: a.paths,
                dt: None,
                lambda: Some(Sci(a.lambda)),
                refine: None,
            };
            (poisson_example(&PoissonParams::new(a.lambda, a.paths, a.seed))?, a.seed, p)
        }
        McCommand::Cox(a) => {
            let p = McParameters {
                example: "cox",
                paths: a.paths,
                dt: None,
                lambda: None,
                refine: None,
            };
            let params = CoxParams {
                n_paths: a.paths,
                seed: a.seed,
            };
            (cox_uniformity(&params)?, a.seed, p)
        }
    };
    let mut failures = 0u64;
    for r in &reports {
        failures += !r.passed as u64;
        write_mc(out, r)?;
    }
    let footer: Footer<_, ()> = Footer {
        trials: reports.len() as u64,
        failures,
        counterexamples: None,
        seed: Some(seed),
        parameters,
        summary: None,
    };
    write_footer(out, &footer)?;
    Ok(if failures == 0 { EXIT_OK } else { EXIT_COUNTEREXAMPLE })
}
