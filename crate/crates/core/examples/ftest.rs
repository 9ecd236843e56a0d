//! Segment F-tests followed by Holm-Bonferroni over the family.

use lcdsc::holm_bonferroni;
use lcdsc::inference::{f_test_segment, VarianceSample};

fn main() -> lcdsc::Result<()> {
    // (before, during, after) variances, 40 samples each
    let cases = [(1.0, 1.1, 0.9), (1.0, 4.0, 1.2), (1.0, 1.8, 1.0), (0.5, 9.0, 0.7)];
    let mut p = Vec::new();
    for (b, d, a) in cases {
        let s = |v| Some(VarianceSample::new(v, 40));
        let test = f_test_segment(s(b), VarianceSample::new(d, 40), s(a), 1.0)?;
        println!("s2 {b} / {d} / {a}: F = {:.3}, p = {:.3e}", test.f_stat, test.p_value);
        p.push(test.p_value);
    }
    let holm = holm_bonferroni(&p, 0.05)?;
    println!("significant after Holm: {:?}", holm.significant);
    Ok(())
}
