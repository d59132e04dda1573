use std::fs;
use std::path::Path;
use std::time::Duration;

use anyhow::{bail, ensure, Context, Result};
use probverif_core::model::model_to_json;
use probverif_core::oracle::{oracle_probability, oracle_verdict};
use probverif_core::{
    load_model, verify as run_bab, verify_no_split, Budget, GaussianInput, HalfSpaceSpec,
    ProblemFile, ProblemInstance, ToyConfig, Verdict, VerificationReport,
};
use serde::Serialize;

use crate::{
    EngineArgs, MakeProblemArgs, Mode, OracleArgs, ToyCorpusArgs, VerifyArgs, EXIT_FALSE,
    EXIT_TRUE, EXIT_UNDECIDED,
};

pub fn exit_code(verdict: Verdict) -> u8 {
    match verdict {
        Verdict::True => EXIT_TRUE,
        Verdict::False => EXIT_FALSE,
        Verdict::Timeout => EXIT_UNDECIDED,
    }
}

/// Loads a problem and applies the command-line overrides.
pub fn load_problem(path: &Path, engine: &EngineArgs) -> Result<ProblemInstance> {
    let p = ProblemInstance::load(path)
        .with_context(|| format!("loading problem {}", path.display()))?;
    let problem = ProblemInstance::new(
        p.network,
        p.input_mean,
        p.input_cov,
        engine.eta.unwrap_or(p.eta),
        engine.z.unwrap_or(p.truncation_z),
    )?;
    Ok(problem)
}

pub fn budget(engine: &EngineArgs) -> Result<Budget> {
    ensure!(
        engine.time_limit >= 0.0 && engine.time_limit.is_finite(),
        "--time-limit must be a nonnegative number of seconds"
    );
    let budget = Budget {
        time_limit: (engine.time_limit > 0.0).then(|| Duration::from_secs_f64(engine.time_limit)),
        n_samples: engine.samples,
        split_depth: engine.split_depth,
        batch_size: engine.batch,
        max_samples: engine
            .max_samples
            .unwrap_or(engine.samples.saturating_mul(64)),
        ..Budget::default()
    };
    budget.validate()?;
    Ok(budget)
}

#[derive(Debug, Serialize)]
struct OracleReport {
    verdict: Verdict,
    #[serde(rename = "P")]
    probability: f64,
    std_error: f64,
    n_samples: u64,
    eta: f64,
    seed: u64,
}

fn print_json<T: Serialize>(value: &T, output: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    println!("{text}");
    if let Some(path) = output {
        fs::write(path, format!("{text}\n"))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

pub fn run_mode(
    problem: &ProblemInstance,
    mode: Mode,
    strategy: probverif_core::Strategy,
    engine: &EngineArgs,
) -> Result<VerificationReport> {
    let budget = budget(engine)?;
    let report = match mode {
        Mode::Bab => run_bab(problem, strategy, &budget, engine.seed)?,
        Mode::NoSplit => verify_no_split(problem, &budget, engine.seed)?,
        Mode::Oracle => bail!("oracle mode does not produce a verification report"),
    };
    Ok(report)
}

pub fn verify(args: &VerifyArgs) -> Result<u8> {
    ensure!(args.engine.tau >= 0.0, "--tau must be nonnegative");
    let problem = load_problem(&args.problem, &args.engine)?;
    if args.mode == Mode::Oracle {
        let v = oracle_verdict(&problem, args.engine.seed)?;
        let verdict = if v.holds {
            Verdict::True
        } else {
            Verdict::False
        };
        let report = OracleReport {
            verdict,
            probability: v.estimate.value,
            std_error: v.estimate.std_error,
            n_samples: v.estimate.n_samples,
            eta: problem.eta,
            seed: args.engine.seed,
        };
        print_json(&report, args.output.as_deref())?;
        return Ok(exit_code(verdict));
    }
    let report = run_mode(
        &problem,
        args.mode,
        args.strategy.with_tau(args.engine.tau),
        &args.engine,
    )?;
    print_json(&report, args.output.as_deref())?;
    Ok(exit_code(report.verdict))
}

pub fn oracle(args: &OracleArgs) -> Result<u8> {
    let problem = ProblemInstance::load(&args.problem)
        .with_context(|| format!("loading problem {}", args.problem.display()))?;
    let estimate = match args.samples {
        Some(n) => {
            let g = GaussianInput::new(problem.input_mean.clone(), problem.input_cov.clone())?;
            oracle_probability(&problem.network, &g, None, n, args.seed)?
        }
        None => oracle_verdict(&problem, args.seed)?.estimate,
    };
    let verdict = if estimate.value >= problem.eta {
        Verdict::True
    } else {
        Verdict::False
    };
    print_json(
        &OracleReport {
            verdict,
            probability: estimate.value,
            std_error: estimate.std_error,
            n_samples: estimate.n_samples,
            eta: problem.eta,
            seed: args.seed,
        },
        None,
    )?;
    Ok(exit_code(verdict))
}

pub fn make_problem(args: &MakeProblemArgs) -> Result<u8> {
    let model = load_model(&args.model)
        .with_context(|| format!("loading model {}", args.model.display()))?;
    let classes = model.output_dim();
    ensure!(
        args.x0.len() == model.input_dim(),
        "x0 has {} entries but the model takes {}",
        args.x0.len(),
        model.input_dim()
    );
    ensure!(
        args.target < classes && args.attack < classes,
        "classes must be below {classes}"
    );
    ensure!(args.target != args.attack, "target and attack must differ");
    let x0 = nalgebra::DVector::from_column_slice(&args.x0);
    let logits = model.forward_vec(&x0)?;
    let target_logit = logits[args.target];
    let beaten = logits
        .iter()
        .enumerate()
        .any(|(i, &v)| i != args.target && v >= target_logit);
    if beaten {
        bail!(
            "x0 is not classified as class {} (logits {:?}); refusing to build the problem",
            args.target,
            logits.as_slice()
        );
    }
    let dim = model.input_dim();
    let cov_diag = match (args.sigma, &args.cov_diag, args.radius) {
        (Some(s), None, None) => vec![s * s; dim],
        (None, Some(d), None) => {
            ensure!(
                d.len() == dim,
                "--cov-diag has {} entries but the model takes {dim}",
                d.len()
            );
            d.clone()
        }
        (None, None, Some(r)) => vec![(r / 3.0).powi(2); dim],
        _ => bail!("exactly one of --sigma, --cov-diag or --radius-99.7 is required"),
    };
    let model_path = fs::canonicalize(&args.model)
        .with_context(|| format!("resolving {}", args.model.display()))?;
    let file = ProblemFile {
        model: model_path,
        spec: Some(HalfSpaceSpec::margin(classes, args.target, args.attack)?),
        mean: args.x0.clone(),
        cov_diag: Some(cov_diag),
        cov_full: None,
        eta: args.eta,
        truncation_z: args.z,
    };
    // Validate before writing.
    ProblemInstance::from_file(&file, Path::new("."))?;
    file.save(&args.out)?;
    eprintln!("wrote {}", args.out.display());
    Ok(0)
}

pub fn toy_corpus(args: &ToyCorpusArgs) -> Result<u8> {
    let cfg = ToyConfig::default();
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    for (i, p) in cfg.corpus(args.count, args.seed)?.into_iter().enumerate() {
        let model_name = format!("toy_{i:02}.model.json");
        fs::write(args.out.join(&model_name), model_to_json(&p.network))?;
        let file = ProblemFile {
            model: model_name.into(),
            spec: None,
            mean: p.input_mean.as_slice().to_vec(),
            cov_diag: Some(p.input_cov.variances().as_slice().to_vec()),
            cov_full: None,
            eta: p.eta,
            truncation_z: p.truncation_z,
        };
        file.save(args.out.join(format!("toy_{i:02}.json")))?;
    }
    eprintln!("wrote {} problems to {}", args.count, args.out.display());
    Ok(0)
}
