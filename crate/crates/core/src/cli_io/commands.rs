use std::path::{Path, PathBuf};
use std::time::Instant;

use super::config::RunConfig;
use super::csv::{norms_to_csv, table_to_csv};
use super::manifest::{self, RunManifest};
use super::{exit_code, RunArgs, SampleNoiseArgs, StudyArgs, EXIT_CHECKS_FAILED, EXIT_OK, OUT_DIR_ENV};
use crate::experiments::{monte_carlo_sweep, StudyPlan};
use crate::noise_field::record::{encode_field, encode_noise, FieldMeta};
use crate::noise_field::sample_noise_scaled;
use crate::parallel::with_jobs;
use crate::{Error, Result};

fn read_config(path: &Path) -> Result<(Vec<u8>, String)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Error::Config(format!("{} is not UTF-8", path.display())))?;
    Ok((bytes, text))
}

fn report(err: &Error) -> i32 {
    eprintln!("error: {err}");
    exit_code(err)
}

fn default_noise_path(seed: u64, k: u64) -> PathBuf {
    let dir = std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(super::DEFAULT_OUT_DIR));
    dir.join(format!("noise_s{seed}_k{k}.bin"))
}

pub fn cmd_sample_noise(args: &SampleNoiseArgs) -> i32 {
    let start = Instant::now();
    let out = args.out.clone().unwrap_or_else(|| default_noise_path(args.seed, args.lattice));
    let result = (|| -> Result<String> {
        let noise = sample_noise_scaled(args.seed, args.lattice as i64, args.amplitude)?;
        let bytes = encode_noise(&noise);
        manifest::write_atomic(&out, &bytes)?;
        let digest = manifest::sha256_hex(&bytes);
        let mut m = RunManifest::new("sample-noise", args.seed);
        m.lattice = Some(args.lattice as usize);
        let name = out.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        m.outputs.insert(
            name.clone(),
            manifest::OutputEntry {
                path: name,
                format: manifest::NOISE_RECORD_SCHEMA.to_string(),
                sha256: digest.clone(),
            },
        );
        m.wall_clock_seconds = start.elapsed().as_secs_f64();
        m.write(&out.with_extension("manifest.json"))?;
        Ok(digest)
    })();
    match result {
        Ok(digest) => {
            println!("K = {}  seed = {}  sha256 = {digest}", args.lattice, args.seed);
            EXIT_OK
        }
        Err(e) => report(&e),
    }
}

pub fn cmd_run(args: &RunArgs) -> i32 {
    let start = Instant::now();
    let (bytes, text) = match read_config(&args.config) {
        Ok(x) => x,
        Err(e) => return report(&e),
    };
    let cfg = match RunConfig::from_toml(&text) {
        Ok(c) => c,
        Err(e) => return report(&e),
    };
    let mut m = RunManifest::new("run", cfg.seed).with_config(&args.config, &bytes);
    m.grid = Some(cfg.solver.n);
    m.lattice = Some(cfg.lattice());
    m.epsilon = vec![cfg.epsilon];
    let outcome = cfg.execute();
    let code = match &outcome {
        Ok(traj) => {
            let written = m
                .emit(&args.out, "norms.csv", manifest::NORMS_CSV_SCHEMA, norms_to_csv(&traj.norms).as_bytes())
                .and_then(|_| {
                    let meta = FieldMeta {
                        seed: cfg.seed,
                        epsilon: cfg.epsilon,
                        amplitude: cfg.noise.amplitude,
                    };
                    m.emit(
                        &args.out,
                        "final_state.bin",
                        manifest::FIELD_RECORD_SCHEMA,
                        &encode_field(traj.last(), meta, false),
                    )
                });
            match written {
                Ok(()) => EXIT_OK,
                Err(e) => return report(&e),
            }
        }
        Err(e) => {
            m.status = match e {
                Error::BlowUp { time, .. } => {
                    m.blowup_time = Some(*time);
                    "blowup".to_string()
                }
                _ => "failed".to_string(),
            };
            m.message = Some(e.to_string());
            eprintln!("error: {e}");
            exit_code(e)
        }
    };
    m.wall_clock_seconds = start.elapsed().as_secs_f64();
    if let Err(e) = m.write(&args.out.join("manifest.json")) {
        return report(&e);
    }
    code
}

pub fn cmd_study(args: &StudyArgs) -> i32 {
    let start = Instant::now();
    let (bytes, text) = match read_config(&args.plan) {
        Ok(x) => x,
        Err(e) => return report(&e),
    };
    let plan = match StudyPlan::from_toml(&text) {
        Ok(p) => p,
        Err(e) => return report(&e),
    };
    let report_result = with_jobs(args.jobs, || monte_carlo_sweep(&plan, args.study));
    let study = match report_result {
        Ok(r) => r,
        Err(e) => return report(&e),
    };
    let mut m = RunManifest::new("study", plan.base_seed).with_config(&args.plan, &bytes);
    m.sample_count = Some(plan.sample_count);
    m.grid = Some(plan.solver.n);
    m.lattice = Some(plan.dynamics_lattice());
    m.epsilon = plan.eps_grid.clone();
    m.jobs = Some(args.jobs);
    let written = (|| -> Result<()> {
        for table in study.tables() {
            m.emit(
                &args.out,
                &format!("{}.csv", table.name),
                manifest::TABLE_CSV_SCHEMA,
                table_to_csv(&table).as_bytes(),
            )?;
        }
        let mut json = serde_json::to_string_pretty(&study).expect("report serializes");
        json.push('\n');
        m.emit(&args.out, "report.json", manifest::REPORT_JSON_SCHEMA, json.as_bytes())
    })();
    if let Err(e) = written {
        return report(&e);
    }
    for c in &study.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed_seeds = study.failures().count();
    if failed_seeds > 0 {
        println!("{failed_seeds} of {} seeds failed", study.outcomes.len());
    }
    let pass = study.all_checks_pass();
    m.status = if pass { "ok" } else { "checks_failed" }.to_string();
    m.wall_clock_seconds = start.elapsed().as_secs_f64();
    if let Err(e) = m.write(&args.out.join("manifest.json")) {
        return report(&e);
    }
    if pass {
        EXIT_OK
    } else {
        EXIT_CHECKS_FAILED
    }
}
