//! Variance change points in a series that gets noisier halfway through.

use lcdsc::{detect_changepoints, PenaltyKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> lcdsc::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let quiet = Normal::new(0.0, 1.0).unwrap();
    let loud = Normal::new(0.0, 3.0).unwrap();
    let x: Vec<f64> = (0..400)
        .map(|t| if t < 250 { quiet.sample(&mut rng) } else { loud.sample(&mut rng) })
        .collect();
    for kind in [PenaltyKind::Aic { beta: 2.0 }, PenaltyKind::Bic, PenaltyKind::Mbic] {
        let cps = detect_changepoints(&x, kind, 10)?;
        println!("{:>4}: taus {:?}, cost {:.2}", kind.name(), cps.taus, cps.total_cost);
    }
    Ok(())
}
