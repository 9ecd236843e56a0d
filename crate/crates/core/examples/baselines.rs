//! Oracle IMF subsets and wavelet thresholding on a shared decomposition.

use lcdsc::baselines::{oracle_select, threshold_all, wavelet_hard_threshold, wavelet_interval_threshold, RuleFamily};
use lcdsc::simulation::{local_doppler, rss, LocalSignalSpec};
use lcdsc::{eemd, EmdConfig};

fn main() -> lcdsc::Result<()> {
    let s = local_doppler(&LocalSignalSpec::centered(2500, 0.3, 5))?;
    let d = eemd(&s.noisy, &EmdConfig::default())?;
    for family in [RuleFamily::KHighest, RuleFamily::LLowest, RuleFamily::Band, RuleFamily::PowerSet] {
        let (rule, value) = oracle_select(&d, &s.truth, family)?;
        println!("{family:?}: {rule:?}, RSS {value:.1}");
    }
    let wht = threshold_all(&d, wavelet_hard_threshold)?;
    let wit = threshold_all(&d, wavelet_interval_threshold)?;
    println!("hard threshold RSS     {:.1}", rss(&wht, &s.truth)?);
    println!("interval threshold RSS {:.1}", rss(&wit, &s.truth)?);
    Ok(())
}
