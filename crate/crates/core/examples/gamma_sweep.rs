//! Raising gamma demands a larger variance increase, so output only shrinks.

use lcdsc::simulation::{local_doppler, LocalSignalSpec};
use lcdsc::{gamma_sweep, LcdscConfig};

fn main() -> lcdsc::Result<()> {
    let s = local_doppler(&LocalSignalSpec::centered(2500, 0.3, 11))?;
    let gammas = [1.0, 1.5, 2.0, 3.0, 4.0, 8.0];
    let reports = gamma_sweep(&s.noisy, &gammas, &LcdscConfig::default())?;
    for (g, r) in gammas.iter().zip(&reports) {
        let kept = r.decisions.iter().filter(|d| d.significant).count();
        println!("gamma {g:>3}: {kept:>2} segments kept, {:>4} nonzero samples", r.nonzero_count());
    }
    Ok(())
}
