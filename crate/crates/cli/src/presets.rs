//! Named configurations.

use serde_json::{json, Value};

use crate::config::{ExperimentConfig, GOLDEN};
use crate::error::RunError;

/// Preset names with a one-line description.
pub const PRESETS: &[(&str, &str)] = &[
    ("z2-lazy", "Z/2, steps 1/2 d_0 + 1/2 d_1, character observable"),
    ("z4-lazy", "Z/4, steps 1/2 d_0 + 1/2 d_1, character observable"),
    ("z8-lazy", "Z/8, steps 1/2 d_0 + 1/2 d_1, character observable"),
    ("z6-coset", "Z/6, steps 1/2 d_1 + 1/2 d_3, confined to cosets of {0, 2, 4}"),
    ("torus-golden", "circle, steps 1/2 d_0 + 1/2 d_g with g the golden mean (declared irrational)"),
    ("dirac-rotation", "circle, step d_a with a the golden mean: aperiodic orbit, no Haar limit"),
    ("shrinking-support", "circle, steps 1/2 d_0 + 1/2 d_(a/2^n): each aperiodic, support stays in [0, a)"),
];

fn lazy(m: u64) -> Value {
    json!({"group": {"finite": [m]}, "family": [{"preset": "lazy-step"}], "seed": 1})
}

fn value(name: &str) -> Option<Value> {
    Some(match name {
        "z2-lazy" => lazy(2),
        "z4-lazy" => lazy(4),
        "z8-lazy" => lazy(8),
        "z6-coset" => json!({
            "group": {"finite": [6]},
            "family": [{"atoms": [[[1.0], 0.5], [[3.0], 0.5]]}],
            "seed": 1
        }),
        "torus-golden" => json!({
            "group": {"torus": 1},
            "family": [{"preset": "lazy-step", "at": [GOLDEN], "irrational": [[true]]}],
            "seed": 1
        }),
        "dirac-rotation" => json!({
            "group": {"torus": 1},
            "family": [{"preset": "dirac", "at": [GOLDEN], "irrational": [[true]]}],
            "seed": 1,
            "run": {"alpha": GOLDEN, "rotation_n": 100, "steps": 100}
        }),
        "shrinking-support" => {
            let k = 12;
            let family: Vec<Value> = (1..=k)
                .map(|j| json!({"preset": "lazy-step", "at": [GOLDEN / f64::from(1u32 << j)], "irrational": [[true]]}))
                .collect();
            json!({
                "group": {"torus": 1},
                "family": family,
                "schedule": {"explicit": (0..k).collect::<Vec<usize>>()},
                "seed": 1,
                "run": {"alpha": GOLDEN, "shrinking_n": 30, "steps": k}
            })
        }
        _ => return None,
    })
}

pub fn preset(name: &str) -> Result<ExperimentConfig, RunError> {
    let v = value(name).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
        RunError::Config(format!("unknown preset {name:?}; available: {}", names.join(", ")))
    })?;
    ExperimentConfig::from_json(&v.to_string())
}
