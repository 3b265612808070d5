use clap::{Args, Parser, Subcommand};
use gerbekit::cli::{error_exit_code, run, CommandName, JobSpec};
use gerbekit::error::Error;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gerbekit", version, about = "Equivariant bundle gerbes: cohomology, obstructions and reduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// hopf, lens:n, su2:k or loop:M,k
    #[arg(long)]
    model: Option<String>,
    /// Simplicial complex JSON file
    #[arg(long)]
    input: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here
    #[arg(long)]
    output: Option<String>,
    /// Print the JSON report instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integer or rational cohomology of a complex or model quotient
    Cohomology {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value = "Z")]
        coeff: String,
        /// Use the total space instead of the quotient
        #[arg(long)]
        total: bool,
    },
    /// The obstruction class to strong equivariance
    Obstruction {
        #[command(flatten)]
        common: Common,
    },
    /// Reduce a strongly equivariant gerbe along λ and Ξ
    Reduce {
        #[command(flatten)]
        common: Common,
        /// r=<real>
        #[arg(long)]
        lambda: Option<String>,
        /// standard or perturbed[:eps]
        #[arg(long)]
        xi: Option<String>,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Compare two λ or two Ξ choices
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        lambda: Vec<String>,
        #[arg(long)]
        xi: Vec<String>,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Run a verification suite
    Verify {
        #[command(flatten)]
        common: Common,
        /// hopf, algebraic, loop, su2, lens or all
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Run one check on a model
    ModelCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        check: String,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Run a JSON job spec
    Run {
        job: String,
        #[arg(long)]
        json: bool,
    },
}

fn job(command: CommandName, common: &Common, params: Vec<(&str, Option<Value>)>) -> JobSpec {
    let params: BTreeMap<String, Value> = params.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))).collect();
    JobSpec {
        command,
        model: common.model.clone(),
        input: common.input.clone(),
        params,
        output: common.output.clone(),
        seed: common.seed,
    }
}

fn list(v: &[String]) -> Option<Value> {
    (!v.is_empty()).then(|| json!(v))
}

fn build(cli: Cli) -> Result<(JobSpec, bool), Error> {
    Ok(match cli.command {
        Command::Cohomology { common, degree, coeff, total } => (
            job(
                CommandName::Cohomology,
                &common,
                vec![("degree", Some(json!(degree))), ("coeff", Some(json!(coeff))), ("space", total.then(|| json!("total")))],
            ),
            common.json,
        ),
        Command::Obstruction { common } => (job(CommandName::Obstruction, &common, vec![]), common.json),
        Command::Reduce { common, lambda, xi, level } => (
            job(
                CommandName::Reduce,
                &common,
                vec![("lambda", lambda.map(|l| json!([l]))), ("xi", xi.map(|x| json!([x]))), ("level", level.map(|l| json!(l)))],
            ),
            common.json,
        ),
        Command::Compare { common, lambda, xi, level } => (
            job(CommandName::Compare, &common, vec![("lambda", list(&lambda)), ("xi", list(&xi)), ("level", level.map(|l| json!(l)))]),
            common.json,
        ),
        Command::Verify { common, suite } => (job(CommandName::Verify, &common, vec![("suite", Some(json!(suite)))]), common.json),
        Command::ModelCheck { common, check, tolerance, level } => (
            job(
                CommandName::ModelCheck,
                &common,
                vec![("check", Some(json!(check))), ("tolerance", tolerance.map(|t| json!(t))), ("level", level.map(|l| json!(l)))],
            ),
            common.json,
        ),
        Command::Run { job, json } => {
            let text = std::fs::read_to_string(&job).map_err(|e| Error::Io(format!("{job}: {e}")))?;
            (JobSpec::parse(&text)?, json)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = build(cli).and_then(|(job, as_json)| {
        let report = run(&job)?;
        if let Some(path) = &job.output {
            report.write_atomic(path)?;
        }
        print!("{}", if as_json { report.to_json() } else { report.to_text() });
        Ok(report.exit_code())
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("gerbekit: {e}");
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}
