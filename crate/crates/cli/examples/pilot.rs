//! Pilot ensemble for the acceptance suite's calibrated thresholds. Uses its
//! own seed, never the acceptance seeds. Rewrites `tests/data/pilot.json`.

use zerosum::limitlaw::cauchy_reference;
use zerosum_cli::experiments::*;

const PILOT_SEED: u64 = 0x9170_7a11;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bumps = axis_bumps();
    let zeros = empirical_zeros(&disk_pair(), LINEAR_N, LINEAR_TRIALS, PILOT_SEED)?;
    let linear = linear_statistics(&zeros, &bumps)
        .iter()
        .zip(&bumps)
        .map(|(est, phi)| PilotBump {
            center_im: phi.center.im,
            radius: phi.radius,
            mean: est.estimate,
            stderr: est.stderr,
            reference: cauchy_reference(phi),
            stderr_ceiling: STDERR_CEILING_FACTOR * est.stderr,
        })
        .collect();

    let circles = empirical_zeros(&circle_pair(), ESCAPE_N, ESCAPE_TRIALS, PILOT_SEED + 1)?;
    let fr = fractions_within(&circles, 1.0 + 3.0 * ESCAPE_EPS);
    let escape = PilotEscape {
        mean_fraction: fr.iter().sum::<f64>() / fr.len() as f64,
        max_fraction: fr.iter().copied().fold(0.0, f64::max),
    };

    let disks = empirical_zeros(&disk_pair(), KS_N, KS_TRIALS, PILOT_SEED + 2)?;
    let d = ks_distances(&disks);
    let ks = PilotKs {
        median: quantile(&d, 0.5),
        q90: quantile(&d, 0.9),
        max: quantile(&d, 1.0),
        fraction_within_0_15: d.iter().filter(|&&x| x <= 0.15).count() as f64 / d.len() as f64,
    };

    let pilot = Pilot { seed: PILOT_SEED, linear, escape, ks };
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/pilot.json");
    let mut text = serde_json::to_string_pretty(&pilot)?;
    text.push('\n');
    std::fs::write(path, &text)?;
    print!("{text}");
    Ok(())
}
