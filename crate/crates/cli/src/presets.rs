//! Named parameter sets.

use crate::config::{
    FieldGrid, Job, LzPopulations, LzsSweep, RunConfig, Selftest, Waveguide,
};
use lzslab::twolevel::Basis;

pub const NAMES: [&str; 7] = [
    "lz-branches",
    "lzs-balanced",
    "lzs-strong-gain",
    "waveguide-profile",
    "waveguide-com",
    "waveguide-com-strong-gain",
    "selftest",
];

pub fn preset(name: &str) -> Option<RunConfig> {
    let (job, out) = match name {
        "lz-branches" => (
            Job::LzPopulations(LzPopulations {
                delta: 9.0 / 32.0,
                delta_primes: vec![0.0, 1.0, 1.5, 2.0],
                z_min: 1.0,
                z_max: 40.0,
                points: 400,
                basis: Basis::Adiabatic,
                log_grid: false,
            }),
            "lz-branches.csv",
        ),
        "lzs-balanced" => (
            Job::LzsSweep(LzsSweep {
                j: 1.0,
                alpha: 0.2,
                gamma: 0.2,
                d: 1.0,
                field: FieldGrid {
                    e_min: 0.01,
                    e_max: 0.2,
                    points: 39,
                },
            }),
            "lzs-balanced.csv",
        ),
        "lzs-strong-gain" => (
            Job::LzsSweep(LzsSweep {
                j: 1.0,
                alpha: 0.1,
                gamma: 0.3,
                d: 1.0,
                field: FieldGrid {
                    e_min: 0.02,
                    e_max: 0.15,
                    points: 27,
                },
            }),
            "lzs-strong-gain.csv",
        ),
        "waveguide-profile" => (waveguide(160, 0.1, None), "waveguide-profile.csv"),
        "waveguide-com" => (
            waveguide(
                240,
                0.1,
                Some(FieldGrid {
                    e_min: 0.03,
                    e_max: 0.1,
                    points: 15,
                }),
            ),
            "waveguide-com.csv",
        ),
        "waveguide-com-strong-gain" => (
            waveguide(
                240,
                0.3,
                Some(FieldGrid {
                    e_min: 0.03,
                    e_max: 0.1,
                    points: 15,
                }),
            ),
            "waveguide-com-strong-gain.csv",
        ),
        "selftest" => (Job::Selftest(Selftest::default()), "selftest.json"),
        _ => return None,
    };
    Some(RunConfig::new(job, out))
}

fn waveguide(sites: usize, gamma: f64, sweep: Option<FieldGrid>) -> Job {
    Job::Waveguide(Waveguide {
        j: 1.0,
        alpha: 0.1,
        gamma,
        d: 1.0,
        sites,
        x0: None,
        l: None,
        e_field: 0.05,
        z_max: None,
        sample_every: None,
        sweep,
    })
}

/// Default configuration of each command.
pub fn for_command(command: &str) -> Option<RunConfig> {
    let name = match command {
        "lz-populations" => "lz-branches",
        "lzs-sweep" => "lzs-balanced",
        "waveguide" => "waveguide-profile",
        "selftest" => "selftest",
        _ => return None,
    };
    preset(name)
}
