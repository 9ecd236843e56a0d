//! A small benchmark: every method on a few replicates, mean RSS per method.

use lcdsc::simulation::{mean_rss, run_benchmark, Method, Scenario};
use lcdsc::{EmdConfig, LcdscConfig};

fn main() -> lcdsc::Result<()> {
    let grid = [
        Scenario::Centered { total_len: 1500, sigma: 0.3 },
        Scenario::Gap { delta: 300, sigma: 0.25 },
    ];
    let config = LcdscConfig {
        emd: EmdConfig {
            ensemble_size: 20,
            ..EmdConfig::default()
        },
        ..LcdscConfig::default()
    };
    for scenario in grid {
        let rows = run_benchmark(&Method::ALL, &[scenario], 3, 0, &config)?;
        println!("{scenario:?}");
        for m in Method::ALL {
            println!("  {:>8} {:10.1}", m.name(), mean_rss(&rows, m));
        }
    }
    Ok(())
}
