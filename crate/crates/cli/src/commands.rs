use std::path::{Path, PathBuf};

use lzslab::propagator::IntegratorConfig;
use lzslab::ssh::{bloch_period_final, lzs_prediction, SshParams};
use lzslab::twolevel::{asymptotic_band_populations, band_populations, AsymptoticBranch, GenericLZParams};
use lzslab::waveguide::{
    analytic_com, band_decompose, center_of_mass, init_gaussian, propagate, ComAt, WaveguideConfig,
};
use rayon::prelude::*;

use crate::config::{linspace, Job, LzPopulations, LzsSweep, RunConfig, Selftest, Waveguide};
use crate::output::{num, write_header, Series, SweepResult};
use crate::CliError;

/// Flags that apply to every command.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out_dir: PathBuf,
    /// Worker threads for sweeps; `None` uses every core.
    pub jobs: Option<usize>,
    pub strict: bool,
    pub quick: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub path: PathBuf,
    pub contents: String,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub warnings: Vec<String>,
    /// Lines for the terminal.
    pub summary: Vec<String>,
    /// Set when the run completed but a check failed.
    pub failure: Option<String>,
}

impl Outcome {
    pub fn write(&self) -> Result<(), CliError> {
        for a in &self.artifacts {
            if let Some(dir) = a.path.parent() {
                std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
            }
            std::fs::write(&a.path, &a.contents).map_err(|e| io_error(&a.path, e))?;
        }
        Ok(())
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn run(config: &RunConfig, opts: &Options) -> Result<Outcome, CliError> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.jobs {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    let primary = opts.out_dir.join(&config.output_path);
    let mut outcome = pool.install(|| match &config.job {
        Job::LzPopulations(p) => lz_populations(config, p).map(|r| single(primary.clone(), &r)),
        Job::LzsSweep(p) => lzs_sweep(config, p).map(|r| single(primary.clone(), &r)),
        Job::Waveguide(p) if p.sweep.is_some() => waveguide_sweep(config, p, &primary),
        Job::Waveguide(p) => waveguide_run(config, p, &primary),
        Job::Selftest(p) => selftest(p, opts.quick, &primary),
    })?;
    if opts.strict && outcome.failure.is_none() {
        if let Some(w) = outcome.warnings.first() {
            outcome.failure = Some(format!("strict mode: {w}"));
        }
    }
    Ok(outcome)
}

fn single(path: PathBuf, result: &SweepResult) -> Outcome {
    Outcome {
        artifacts: vec![csv_artifact(path, result)],
        ..Default::default()
    }
}

fn csv_artifact(path: PathBuf, result: &SweepResult) -> Artifact {
    let mut buf = Vec::new();
    result.write_csv(&mut buf).expect("writing to memory");
    Artifact {
        path,
        contents: String::from_utf8(buf).expect("CSV is ASCII"),
    }
}

/// Numerical P_{−+}, P_{−−} on the z_a grid, one pair per δ′, plus the
/// large-T asymptote. Power-law asymptotes are anchored at the last point.
pub fn lz_populations(config: &RunConfig, p: &LzPopulations) -> Result<SweepResult, CliError> {
    let zs = if p.log_grid {
        linspace(p.z_min.ln(), p.z_max.ln(), p.points)
            .into_iter()
            .map(f64::exp)
            .collect()
    } else {
        linspace(p.z_min, p.z_max, p.points)
    };
    let mut curves = Vec::new();
    for &dp in &p.delta_primes {
        let params = GenericLZParams::from_adiabatic(p.delta, dp)?;
        let pops = zs
            .par_iter()
            .map(|&z| band_populations(&params, z, p.basis))
            .collect::<lzslab::Result<Vec<_>>>()?;
        let up: Vec<f64> = pops.iter().map(|q| q.p_minus_plus).collect();
        let down: Vec<f64> = pops.iter().map(|q| q.p_minus_minus).collect();
        let asym = asymptotic_band_populations(p.delta, dp, &params, p.basis);
        let overlay_up = overlay(&asym.to_upper, p.delta, &zs, &up);
        let overlay_down = overlay(&asym.to_lower, p.delta, &zs, &down);
        curves.push(Series {
            name: format!("p_minus_plus[dp={dp}]"),
            values: up,
        });
        curves.push(Series {
            name: format!("p_minus_minus[dp={dp}]"),
            values: down,
        });
        curves.push(Series {
            name: format!("asymptote_p_minus_plus[dp={dp}]"),
            values: overlay_up,
        });
        curves.push(Series {
            name: format!("asymptote_p_minus_minus[dp={dp}]"),
            values: overlay_down,
        });
    }
    SweepResult::new(
        Series {
            name: "z_a".into(),
            values: zs,
        },
        curves,
        config,
    )
}

fn overlay(branch: &AsymptoticBranch, delta: f64, zs: &[f64], numeric: &[f64]) -> Vec<f64> {
    match *branch {
        AsymptoticBranch::PowerLaw { exponent } => {
            let (z1, p1) = (zs[zs.len() - 1], numeric[numeric.len() - 1]);
            zs.iter().map(|z| p1 * (z / z1).powf(exponent)).collect()
        }
        _ => zs
            .iter()
            .map(|&z| branch.value_at(delta, z).expect("bounded branch"))
            .collect(),
    }
}

/// Exact single-k populations after one Bloch period against the
/// adiabatic-impulse prediction.
pub fn lzs_sweep(config: &RunConfig, p: &LzsSweep) -> Result<SweepResult, CliError> {
    let fields = p.field.values();
    let rows = fields
        .par_iter()
        .map(|&e| -> Result<[f64; 4], CliError> {
            let ssh = SshParams::new(p.j, p.alpha, p.gamma, e, p.d, 2)?;
            let traj = bloch_period_final(&ssh, &IntegratorConfig::default())?;
            let w = traj
                .populations
                .as_ref()
                .and_then(|ps| *ps.last().expect("two samples"))
                .ok_or_else(|| {
                    CliError::Numerical(lzslab::Error::Degeneracy(format!(
                        "bands coalesce at the end of the period for field {e}"
                    )))
                })?;
            let a = lzs_prediction(&ssh)?.populations;
            Ok([w.upper, a.p_minus_plus, w.lower, a.p_minus_minus])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let col = |i: usize| rows.iter().map(|r| r[i]).collect::<Vec<f64>>();
    let diff = |i: usize, j: usize| rows.iter().map(|r| (r[i] - r[j]).abs()).collect::<Vec<f64>>();
    SweepResult::new(
        Series {
            name: "e_field".into(),
            values: fields,
        },
        vec![
            Series { name: "exact_p_minus_plus".into(), values: col(0) },
            Series { name: "analytic_p_minus_plus".into(), values: col(1) },
            Series { name: "abs_diff_p_minus_plus".into(), values: diff(0, 1) },
            Series { name: "exact_p_minus_minus".into(), values: col(2) },
            Series { name: "analytic_p_minus_minus".into(), values: col(3) },
            Series { name: "abs_diff_p_minus_minus".into(), values: diff(2, 3) },
        ],
        config,
    )
}

fn waveguide_config(p: &Waveguide, e_field: f64) -> Result<WaveguideConfig, CliError> {
    let ssh = SshParams::new(p.j, p.alpha, p.gamma, e_field, p.d, p.sites / 2)?;
    let x0 = p.x0.unwrap_or((p.sites as f64 - 40.0) * p.d);
    let mut cfg = WaveguideConfig::new(ssh, x0);
    if let Some(l) = p.l {
        cfg.l = l;
    }
    if let Some(z) = p.z_max {
        cfg.z_max = z;
    }
    if let Some(s) = p.sample_every {
        cfg.sample_every = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Single propagation: CoM series as the primary CSV, intensity snapshots
/// next to it.
pub fn waveguide_run(config: &RunConfig, p: &Waveguide, primary: &Path) -> Result<Outcome, CliError> {
    let cfg = waveguide_config(p, p.e_field)?;
    let beam = init_gaussian(&cfg)?;
    let run = propagate(&cfg, &beam, &IntegratorConfig::default())?;
    let rows = run
        .snapshots
        .par_iter()
        .map(|s| -> Result<[f64; 4], CliError> {
            let b = band_decompose(s, &cfg.ssh, s.z)?;
            Ok([s.z, center_of_mass(s)?, b.upper_weight, b.lower_weight])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let col = |i: usize| rows.iter().map(|r| r[i]).collect::<Vec<f64>>();
    let com = SweepResult::new(
        Series { name: "z".into(), values: col(0) },
        vec![
            Series { name: "com".into(), values: col(1) },
            Series { name: "upper_weight".into(), values: col(2) },
            Series { name: "lower_weight".into(), values: col(3) },
        ],
        config,
    )?;

    let mut snap = String::new();
    let mut header = Vec::new();
    write_header(&mut header, config).expect("writing to memory");
    snap.push_str(&String::from_utf8(header).expect("ASCII"));
    snap.push_str("z,site,re_psi,im_psi,intensity,normalized_intensity\n");
    for s in &run.snapshots {
        let peak = s.psi.iter().map(|c| c.norm_sqr()).fold(0.0, f64::max);
        for (m, c) in s.psi.iter().enumerate() {
            let i = c.norm_sqr();
            let rel = if peak > 0.0 { i / peak } else { 0.0 };
            snap.push_str(&format!(
                "{},{m},{},{},{},{}\n",
                num(s.z),
                num(c.re),
                num(c.im),
                num(i),
                num(rel)
            ));
        }
    }

    let mut outcome = single(primary.to_path_buf(), &com);
    outcome.artifacts.push(Artifact {
        path: sibling(primary, "snapshots"),
        contents: snap,
    });
    outcome.warnings.extend(run.contamination.map(|e| e.to_string()));
    Ok(outcome)
}

/// `dir/name.csv` → `dir/name-<tag>.csv`
pub fn sibling(primary: &Path, tag: &str) -> PathBuf {
    let stem = primary
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = primary
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    primary.with_file_name(format!("{stem}-{tag}{ext}"))
}

/// Centre of mass after one Bloch period, propagated and predicted, over
/// the field grid.
pub fn waveguide_sweep(config: &RunConfig, p: &Waveguide, primary: &Path) -> Result<Outcome, CliError> {
    let fields = p.sweep.expect("sweep grid").values();
    let rows = fields
        .par_iter()
        .map(|&e| -> Result<([f64; 2], Option<String>), CliError> {
            let mut cfg = waveguide_config(p, e)?;
            cfg.z_max = cfg.ssh.period();
            cfg.sample_every = cfg.z_max;
            let beam = init_gaussian(&cfg)?;
            let run = propagate(&cfg, &beam, &IntegratorConfig::default())?;
            let exact = center_of_mass(run.snapshots.last().expect("final snapshot"))?;
            let analytic = analytic_com(&cfg.ssh, cfg.x0, ComAt::FullPeriod)?;
            let warn = run.contamination.map(|w| format!("field {e}: {w}"));
            Ok(([exact, analytic], warn))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let exact: Vec<f64> = rows.iter().map(|r| r.0[0]).collect();
    let analytic: Vec<f64> = rows.iter().map(|r| r.0[1]).collect();
    let diff = exact.iter().zip(&analytic).map(|(a, b)| (a - b).abs()).collect();
    let result = SweepResult::new(
        Series { name: "e_field".into(), values: fields },
        vec![
            Series { name: "com_exact".into(), values: exact },
            Series { name: "com_analytic".into(), values: analytic },
            Series { name: "abs_diff".into(), values: diff },
        ],
        config,
    )?;
    let mut outcome = single(primary.to_path_buf(), &result);
    outcome.warnings = rows.into_iter().filter_map(|r| r.1).collect();
    Ok(outcome)
}

pub fn selftest(p: &Selftest, quick_flag: bool, primary: &Path) -> Result<Outcome, CliError> {
    let report = lzslab::selftest::run(p.quick || quick_flag);
    let mut summary = Vec::new();
    for c in &report.checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        let mut line = format!(
            "{status} {:<32} residual {:.3e} tol {:.1e} ({:.2} s)",
            c.name, c.residual, c.tolerance, c.seconds
        );
        if let Some(e) = &c.error {
            line.push_str(&format!(" error: {e}"));
        }
        summary.push(line);
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    summary.push(format!(
        "{} checks, {failed} failed, {:.1} s",
        report.checks.len(),
        report.seconds
    ));
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    Ok(Outcome {
        artifacts: vec![Artifact {
            path: primary.to_path_buf(),
            contents: json,
        }],
        warnings: Vec::new(),
        summary,
        failure: (failed > 0).then(|| format!("{failed} self-test checks failed")),
    })
}
