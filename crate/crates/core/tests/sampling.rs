use proptest::prelude::*;
use signed_geomean::sbm::{sample, SbmParams};

/// Edge counts per block type: (positive in, positive out, negative in, negative out).
fn block_counts(p: &SbmParams, seed: u64) -> [u64; 4] {
    let g = sample(p, seed).unwrap();
    let c = p.cluster_size;
    let mut out = [0u64; 4];
    for (slot, w) in [(0, g.w_plus()), (2, g.w_minus())] {
        for i in 0..g.n() {
            for (j, _) in w.row(i) {
                if j > i {
                    out[slot + (i / c != j / c) as usize] += 1;
                }
            }
        }
    }
    out
}

#[test]
fn edge_counts_within_three_sigma() {
    let p = SbmParams::new(3, 300, 0.05, 0.01, 0.02, 0.04).unwrap();
    let (k, c) = (p.k as f64, p.cluster_size as f64);
    let pairs_in = k * c * (c - 1.0) / 2.0;
    let pairs_out = k * (k - 1.0) / 2.0 * c * c;
    let probs = [p.p_in_plus, p.p_out_plus, p.p_in_minus, p.p_out_minus];
    let pairs = [pairs_in, pairs_out, pairs_in, pairs_out];
    for seed in 0..5 {
        let got = block_counts(&p, seed);
        for b in 0..4 {
            let mean = pairs[b] * probs[b];
            let sd = (pairs[b] * probs[b] * (1.0 - probs[b])).sqrt();
            let z = (got[b] as f64 - mean) / sd;
            assert!(
                z.abs() < 3.0,
                "seed {seed} block {b}: {} vs {mean} (z = {z})",
                got[b]
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn samples_are_valid_signed_graphs(
        k in 2usize..5,
        c in 1usize..15,
        probs in prop::array::uniform4(0.0f64..=1.0),
        seed in any::<u64>(),
    ) {
        let p = SbmParams::new(k, c, probs[0], probs[1], probs[2], probs[3]).unwrap();
        let g = sample(&p, seed).unwrap();
        prop_assert_eq!(g.n(), k * c);
        for w in [g.w_plus(), g.w_minus()] {
            for i in 0..g.n() {
                for (j, v) in w.row(i) {
                    prop_assert!(i != j);
                    prop_assert_eq!(v, 1.0);
                    prop_assert_eq!(w.get(j, i), Some(1.0));
                }
            }
        }
        // probability-one blocks are complete, probability-zero blocks empty
        let counts = block_counts(&p, seed);
        let pairs_in = (k * c * (c - 1) / 2) as u64;
        let pairs_out = (k * (k - 1) / 2 * c * c) as u64;
        for (b, pairs) in [pairs_in, pairs_out, pairs_in, pairs_out].into_iter().enumerate() {
            if probs[b] == 1.0 {
                prop_assert_eq!(counts[b], pairs);
            }
            if probs[b] == 0.0 {
                prop_assert_eq!(counts[b], 0);
            }
        }
    }
}
