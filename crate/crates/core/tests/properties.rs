use proptest::collection::vec;
use proptest::prelude::*;

use delsync::analysis::{redundancy_coefficient, ModuleCoefficients};
use delsync::codes::{encode, multi_decode, vt_decode, vt_syndrome, CodeSpec};
use delsync::harness::{sweep, ExperimentConfig, Variant};
use delsync::matching::{all_candidates, form_sections, partition_encoder, select_pivots};
use delsync::recovery::{recover_section, RecoveryTask};
use delsync::{apply_deletion_channel, rng, synchronize_with_truth, BitSeq, Module, ProtocolParams, Transcript};

fn bits(max: usize) -> impl Strategy<Value = BitSeq> {
    vec(any::<bool>(), 0..=max).prop_map(BitSeq::from_bits)
}

/// A string and a sorted set of distinct positions to delete from it.
fn with_deletions(min_len: usize, max_len: usize, max_t: usize) -> impl Strategy<Value = (BitSeq, Vec<usize>)> {
    vec(any::<bool>(), min_len..=max_len).prop_flat_map(move |x| {
        let len = x.len();
        (Just(BitSeq::from_bits(x)), proptest::sample::subsequence((0..len).collect::<Vec<_>>(), 0..=max_t.min(len)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bitseq_text_round_trip(x in bits(200)) {
        let parsed: BitSeq = x.to_string().parse().unwrap();
        prop_assert_eq!(parsed, x);
    }

    #[test]
    fn channel_output_is_a_subsequence(x in bits(500), beta in 0.0f64..0.5, seed in any::<u64>()) {
        let out = apply_deletion_channel(&x, beta, &mut rng::stream(seed, rng::LABEL_CHANNEL));
        prop_assert!(out.y.is_subsequence_of(&x));
        prop_assert_eq!(out.y.len() + out.deletions(), x.len());
        prop_assert!(out.deleted_positions.windows(2).all(|w| w[0] < w[1]));
        // Surviving bits land at their images.
        for i in 0..x.len() {
            if out.deleted_positions.binary_search(&i).is_err() {
                prop_assert_eq!(out.y[out.image(i)], x[i]);
            }
        }
    }

    #[test]
    fn vt_corrects_any_single_deletion(x in vec(any::<bool>(), 1..300), pick in any::<prop::sample::Index>()) {
        let x = BitSeq::from_bits(x);
        let i = pick.index(x.len());
        prop_assert_eq!(vt_decode(&x.delete_positions(&[i]), vt_syndrome(&x), x.len()), Ok(x));
    }

    #[test]
    fn two_deletion_code_round_trip((x, del) in with_deletions(8, 96, 2), key in any::<u64>()) {
        let spec = CodeSpec::two_deletion(key);
        let t = del.len();
        let syn = encode(&x, t, &spec);
        prop_assert_eq!(multi_decode(&x.delete_positions(&del), t, &syn, x.len(), &spec), Ok(x));
    }

    #[test]
    fn recovery_restores_true_subsequences((x, del) in with_deletions(1, 600, 9), w in 1usize..=2) {
        let spec = if w == 1 { CodeSpec::new(vec![1.0], 5) } else { CodeSpec::two_deletion(5) };
        let y = x.delete_positions(&del);
        let out = recover_section(&RecoveryTask::new(0, &x, &y, 3.0), &spec);
        prop_assert_eq!(out.output.len(), x.len());
        prop_assert_eq!(out.stats.decode_failures, 0);
        prop_assert_eq!(&out.output, &x);
        prop_assert!(out.messages.iter().all(|m| m.module == Module::Recovery));
    }

    #[test]
    fn recovery_output_length_for_arbitrary_y(x in bits(300), y in bits(300)) {
        let out = recover_section(&RecoveryTask::new(0, &x, &y, 3.0), &CodeSpec::two_deletion(1));
        prop_assert_eq!(out.output.len(), x.len());
    }

    #[test]
    fn pivot_selection_is_a_valid_chain(n in 400usize..3000, beta in 0.01f64..0.08, seed in any::<u64>()) {
        let (ls, lp) = (((1.0 / beta).round() as usize).max(60), 20usize);
        prop_assume!(n >= ls);
        let x = rng::random_bits(&mut rng::stream(seed, rng::LABEL_SOURCE), n);
        let ch = apply_deletion_channel(&x, beta, &mut rng::stream(seed, rng::LABEL_CHANNEL));
        let layout = partition_encoder(n, ls, lp).unwrap();
        let sel = select_pivots(&all_candidates(&x, &ch.y, &layout), &layout, ch.y.len());
        for w in sel.windows(2) {
            prop_assert!(w[1].pivot_index > w[0].pivot_index);
            prop_assert!(w[1].y_start >= w[0].y_start + lp);
            prop_assert!(w[1].y_start - w[0].y_start <= w[1].x_start - w[0].x_start);
        }
        for m in &sel {
            prop_assert!(m.y_start <= m.x_start);
            prop_assert_eq!(ch.y.slice(m.y_start..m.y_start + lp), layout.pivot_bits(&x, m.pivot_index));
        }
        let sections = form_sections(&sel, &layout, ch.y.len());
        prop_assert_eq!(sections.len(), sel.len() + 1);
        let x_total: usize = sections.iter().map(|s| s.x_len()).sum();
        prop_assert_eq!(x_total + sel.len() * lp, n);
        let y_total: usize = sections.iter().map(|s| s.y_len()).sum();
        prop_assert_eq!(y_total + sel.len() * lp, ch.y.len());
    }

    #[test]
    fn sessions_always_synchronize(n in 200usize..4000, beta in 0.005f64..0.06, s in 0.5f64..3.0, seed in any::<u64>(), two in any::<bool>()) {
        let p = if two { ProtocolParams::improved(n, beta, s, seed) } else { ProtocolParams::baseline(n, beta, s, seed) };
        prop_assume!(p.validate().is_ok());
        let x = rng::random_bits(&mut rng::stream(seed, rng::LABEL_SOURCE), n);
        let ch = apply_deletion_channel(&x, beta, &mut rng::stream(seed, rng::LABEL_CHANNEL));
        let out = synchronize_with_truth(&x, &ch, &p).unwrap();
        let m = &out.metrics;
        prop_assert!(m.synchronized);
        prop_assert_eq!(&out.x_hat, &x);
        prop_assert_eq!(out.x_partial.len(), n);
        prop_assert_eq!(m.residual_errors as usize, out.x_partial.hamming_distance(&x));
        prop_assert_eq!(m.bits_total, m.bits_i + m.bits_ii + m.bits_iii);
        prop_assert_eq!(m.bits_total, out.transcript.total_bits());
        prop_assert!(m.rounds_parallel <= m.rounds_sequential);
        prop_assert!(m.false_pivots <= m.selected_pivots);
        let k = out.layout.k as u64;
        if k > 1 {
            prop_assert_eq!(m.bits_i, (k - 1) * (p.pivot_len() as u64 + 1));
        } else {
            prop_assert_eq!(m.bits_i, 0);
        }
    }

    #[test]
    fn transcript_jsonl_round_trip(n in 300usize..2000, seed in any::<u64>()) {
        let x = rng::random_bits(&mut rng::stream(seed, rng::LABEL_SOURCE), n);
        let ch = apply_deletion_channel(&x, 0.03, &mut rng::stream(seed, rng::LABEL_CHANNEL));
        let out = synchronize_with_truth(&x, &ch, &ProtocolParams::improved(n, 0.03, 1.0, seed)).unwrap();
        let entries = Transcript::read_jsonl(out.transcript.to_jsonl().as_bytes()).unwrap();
        prop_assert_eq!(entries.as_slice(), out.transcript.entries());
    }

    #[test]
    fn coefficient_is_monotone(s in 0.1f64..10.0, ds in 0.01f64..5.0, w in 1usize..12, a in 1.0f64..8.0, c in 0.1f64..6.0) {
        prop_assert!(redundancy_coefficient(s + ds, w, a, c) < redundancy_coefficient(s, w, a, c));
        prop_assert!(redundancy_coefficient(s, w + 1, a, c) < redundancy_coefficient(s, w, a, c));
        let k = ModuleCoefficients::new(s, w, a, c);
        prop_assert!(k.sum() <= redundancy_coefficient(s, w, a, c) + 1e-9);
    }
}

#[test]
fn sweep_is_order_independent_and_repeatable() {
    let cfg = ExperimentConfig {
        n: 3000,
        beta_grid: vec![0.02, 0.01],
        s_grid: vec![1.0, 2.0],
        variants: vec![Variant::baseline(), Variant::improved()],
        trials: 3,
        seed: 40,
        ..Default::default()
    };
    let a = sweep(&cfg).unwrap();
    let mut reversed = cfg.clone();
    reversed.beta_grid.reverse();
    let b = sweep(&reversed).unwrap();
    assert_eq!(a.rows.len(), 2 * 2 * 2 * 3);
    assert!(a.all_synchronized());
    let key = |r: &delsync::harness::Row| (r.beta.to_bits(), r.s.to_bits(), r.seed, r.w, r.bits_total, r.rounds_par);
    let mut ka: Vec<_> = a.rows.iter().map(key).collect();
    let mut kb: Vec<_> = b.rows.iter().map(key).collect();
    ka.sort();
    kb.sort();
    assert_eq!(ka, kb);
    let again = sweep(&cfg).unwrap();
    assert_eq!(a.rows.iter().map(key).collect::<Vec<_>>(), again.rows.iter().map(key).collect::<Vec<_>>());
}
