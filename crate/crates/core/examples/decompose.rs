//! EEMD of a two-tone signal; the IMFs and residual add back to the input.

use lcdsc::{eemd, reconstruct, EmdConfig, TimeSeries};

fn main() -> lcdsc::Result<()> {
    let x: Vec<f64> = (0..1024)
        .map(|t| {
            let t = t as f64;
            (t * 0.4).sin() + 2.0 * (t * 0.03).sin() + 0.001 * t
        })
        .collect();
    let config = EmdConfig {
        ensemble_size: 50,
        seed: 1,
        ..EmdConfig::default()
    };
    let d = eemd(&TimeSeries::new(x.clone()), &config)?;
    for imf in &d.imfs {
        let energy: f64 = imf.samples.iter().map(|v| v * v).sum();
        println!("IMF {:>2}: energy {energy:12.3}", imf.index);
    }
    let err = reconstruct(&d)
        .iter()
        .zip(&x)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("max reconstruction error {err:.2e}");
    Ok(())
}
