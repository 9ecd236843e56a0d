//! The test signals: a local Doppler, a chirp and two separated Dopplers.

use lcdsc::simulation::{chirp, double_doppler, local_doppler, locality_ratio, LocalSignalSpec};

fn main() -> lcdsc::Result<()> {
    let spec = LocalSignalSpec::with_locality(2500, 0.25, 0.2, 1)?;
    let s = local_doppler(&spec)?;
    println!(
        "local Doppler: active {}..={}, ratio {:.3}",
        s.active.start,
        s.active.end,
        locality_ratio(s.active, 2500)?
    );

    let c = chirp(2500, 0.005, 0.1, 0.2, 1)?;
    println!("chirp: {} samples", c.len());

    let d = double_doppler(500, 0.25, 1)?;
    println!(
        "double Doppler: {}..={} and {}..={}, {} samples",
        d.first.start,
        d.first.end,
        d.second.start,
        d.second.end,
        d.noisy.len()
    );
    Ok(())
}
