//! Instantaneous amplitude and frequency of a chirp.

use lcdsc::simulation::chirp;
use lcdsc::{instantaneous_amplitude, instantaneous_frequency};

fn main() -> lcdsc::Result<()> {
    let x = chirp(2000, 0.01, 0.1, 0.0, 0)?.samples;
    let amp = instantaneous_amplitude(&x)?;
    let freq = instantaneous_frequency(&x, 1.0)?;
    for t in (100..2000).step_by(300) {
        println!("t={t:>4}  amplitude {:.3}  frequency {:.4}", amp[t], freq[t]);
    }
    Ok(())
}
