//! Cleans a noisy Doppler that is active on the middle fifth of the record.

use lcdsc::simulation::{local_doppler, rss, LocalSignalSpec};
use lcdsc::{lcdsc_clean, LcdscConfig};

fn main() -> lcdsc::Result<()> {
    let s = local_doppler(&LocalSignalSpec::centered(2500, 0.2, 7))?;
    let report = lcdsc_clean(&s.noisy, &LcdscConfig::default())?;
    println!("true support     {}..={}", s.active.start, s.active.end);
    println!("first nonzero    {:?}", report.first_nonzero());
    println!("nonzero samples  {}", report.nonzero_count());
    println!("significant IMFs {:?}", report.significant_imfs);
    for d in report.decisions.iter().filter(|d| d.significant) {
        println!(
            "  IMF {} [{}, {}]  p = {:.2e}",
            d.test.imf_index, d.test.seg_start, d.test.seg_end, d.test.p_value
        );
    }
    println!("RSS cleaned {:.1}", rss(&report.cleaned_signal, &s.truth)?);
    println!("RSS noisy   {:.1}", rss(&s.noisy.samples, &s.truth)?);
    Ok(())
}
