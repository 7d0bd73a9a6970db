//! Distributional checks on the channel and the matching stage.

use delsync::harness::draw;
use delsync::{apply_deletion_channel, rng, synchronize_with_truth, BitSeq, ProtocolParams};

#[test]
fn deletion_count_is_binomial() {
    let (n, beta) = (1_000_000usize, 0.01);
    let x = BitSeq::zeros(n);
    let out = apply_deletion_channel(&x, beta, &mut rng::stream(99, rng::LABEL_CHANNEL));
    let mean = n as f64 * beta;
    let sd = (n as f64 * beta * (1.0 - beta)).sqrt();
    let z = (out.deletions() as f64 - mean) / sd;
    assert!(z.abs() < 5.0, "z = {z}");

    // Variance across repeated short runs.
    let counts: Vec<f64> = (0..400u64)
        .map(|s| apply_deletion_channel(&BitSeq::zeros(2000), 0.05, &mut rng::stream(s, rng::LABEL_CHANNEL)).deletions() as f64)
        .collect();
    let m = counts.iter().sum::<f64>() / counts.len() as f64;
    let var = counts.iter().map(|c| (c - m).powi(2)).sum::<f64>() / (counts.len() - 1) as f64;
    let want: f64 = 2000.0 * 0.05 * 0.95;
    assert!((m - 100.0).abs() < 5.0 * (want / 400.0).sqrt(), "mean {m}");
    assert!((var / want - 1.0).abs() < 0.3, "variance {var} vs {want}");
}

#[test]
fn deletion_positions_are_uniform() {
    let n = 200_000usize;
    let out = apply_deletion_channel(&BitSeq::zeros(n), 0.02, &mut rng::stream(5, rng::LABEL_CHANNEL));
    let mut bins = [0f64; 10];
    for &p in &out.deleted_positions {
        bins[p * 10 / n] += 1.0;
    }
    let e = out.deletions() as f64 / 10.0;
    let chi2: f64 = bins.iter().map(|o| (o - e).powi(2) / e).sum();
    // 99.9th percentile of chi-square with 9 degrees of freedom.
    assert!(chi2 < 27.88, "chi2 = {chi2}");
}

#[test]
fn source_bits_are_balanced() {
    let x = rng::random_bits(&mut rng::stream(3, rng::LABEL_SOURCE), 1_000_000);
    let z = (x.count_ones() as f64 - 500_000.0) / 500.0;
    assert!(z.abs() < 5.0, "z = {z}");
}

#[test]
fn intact_pivots_are_selected() {
    // A pivot untouched by the channel and with no false pivot around it is
    // always selectable, so the selected fraction should not fall below the
    // chance that all L_P bits survive.
    let (n, beta, s) = (50_000usize, 0.01, 1.0);
    let mut frac = 0.0;
    let seeds = 10u64;
    let mut lp = 0;
    for seed in 0..seeds {
        let (x, ch) = draw(n, beta, 300 + seed);
        let p = ProtocolParams::improved(n, beta, s, seed);
        lp = p.pivot_len();
        let out = synchronize_with_truth(&x, &ch, &p).unwrap();
        frac += out.metrics.selected_pivots as f64 / (out.layout.k - 1) as f64 / seeds as f64;
    }
    let intact = (1.0 - beta).powi(lp as i32);
    assert!(frac >= intact - 0.03, "selected {frac:.3} vs intact {intact:.3}");
    assert!(frac <= 1.0);
}

#[test]
fn residual_rate_is_small() {
    let (n, beta) = (50_000usize, 0.01);
    let mut total = 0u64;
    for seed in 0..10u64 {
        let (x, ch) = draw(n, beta, 700 + seed);
        let out = synchronize_with_truth(&x, &ch, &ProtocolParams::improved(n, beta, 2.0, seed)).unwrap();
        total += out.metrics.residual_errors;
    }
    let rate = total as f64 / (10 * n) as f64;
    assert!(rate <= 2.0 * beta, "residual rate {rate}");
}
