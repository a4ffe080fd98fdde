use proptest::prelude::*;

use cttm::baselines::{dtw_distance, frequency, movement};
use cttm::encoding::{
    ewma_smooth, prefix_len, quantize_value, resample_indices, Matrix, RawEvent, TurnLabel,
};
use cttm::features::nhnf;
use cttm::harness::{cohen_kappa, f1_score, Confusion};
use cttm::snn::{FiringMap, Spike};

fn label() -> impl Strategy<Value = TurnLabel> {
    prop_oneof![Just(TurnLabel::Keep), Just(TurnLabel::Give)]
}

fn seq(max: usize, m: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(prop::collection::vec(-10.0f64..10.0, m), 1..=max)
        .prop_map(|rows| Matrix::from_rows(&rows).unwrap())
}

proptest! {
    #[test]
    fn f1_is_bounded_and_matches_confusion(tp in 0u64..500, fp in 0u64..500, fn_ in 0u64..500) {
        let f = f1_score(tp, fp, fn_);
        prop_assert!((0.0..=1.0).contains(&f));
        let c = Confusion { tp, fp, fn_, tn: 0 };
        if c.precision() + c.recall() > 0.0 {
            let h = 2.0 * c.precision() * c.recall() / (c.precision() + c.recall());
            prop_assert!((f - h).abs() < 1e-12);
        }
    }

    #[test]
    fn kappa_symmetric_and_bounded(pairs in prop::collection::vec((label(), label()), 1..200)) {
        let (a, b): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let k = cohen_kappa(&a, &b).unwrap();
        prop_assert!((k - cohen_kappa(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&k));
        prop_assert_eq!(cohen_kappa(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn dtw_bounded_by_lockstep_cost(a in seq(8, 2), b in seq(8, 2)) {
        let d = dtw_distance(&a, &b).unwrap();
        prop_assert!(d >= 0.0);
        if a.rows() == b.rows() {
            let lockstep: f64 = (0..a.rows())
                .map(|i| a.row(i).iter().zip(b.row(i)).map(|(x, y)| (x - y).abs()).sum::<f64>())
                .sum();
            prop_assert!(d <= lockstep + 1e-9);
        }
    }

    #[test]
    fn quantize_in_range(s in -1e6f64..1e6, r1 in -10.0f64..10.0, w in 1e-6f64..100.0, levels in 1usize..100) {
        prop_assert!(quantize_value(s, r1, r1 + w, levels) < levels);
    }

    #[test]
    fn prefix_len_is_ceiling(len in 1usize..500, tau in 0.001f64..=1.0) {
        let n = prefix_len(len, tau).unwrap();
        prop_assert!(n >= 1 && n <= len);
        prop_assert!(n as f64 >= tau * len as f64 - 1e-9);
        prop_assert!((n as f64) < tau * len as f64 + 1.0 || n == 1);
    }

    #[test]
    fn truncate_is_prefix(rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 1..50), tau in 0.01f64..=1.0) {
        let e = RawEvent { event_id: 0, subject_id: 0, label: TurnLabel::Give, samples: Matrix::from_rows(&rows).unwrap() };
        let t = e.truncate(tau).unwrap();
        for r in 0..t.len() {
            prop_assert_eq!(t.samples.row(r), e.samples.row(r));
        }
    }

    #[test]
    fn ewma_stays_within_range(x in prop::collection::vec(-100.0f64..100.0, 1..100), alpha in 0.01f64..=1.0) {
        let y = ewma_smooth(&x, alpha).unwrap();
        let (lo, hi) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
        prop_assert!(y.iter().all(|v| *v >= lo - 1e-9 && *v <= hi + 1e-9));
        prop_assert_eq!(y[0], x[0]);
    }

    #[test]
    fn resampling_keeps_endpoints(len in 1usize..300, max in 1usize..60) {
        let idx = resample_indices(len, max);
        prop_assert_eq!(idx.len(), len.min(max));
        prop_assert_eq!(idx[0], 0);
        if max > 1 || len == 1 {
            prop_assert_eq!(*idx.last().unwrap(), len - 1);
        }
        prop_assert!(idx.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn nhnf_mass_balance(spikes in prop::collection::vec((0u32..250, 0u32..250), 0..500), dur in 250u32..260) {
        let map = FiringMap::from_spikes(
            250,
            dur,
            spikes.into_iter().map(|(t, n)| Spike { t: t.min(dur - 1), neuron: n }).collect(),
        ).unwrap();
        let h = nhnf(&map, 50).unwrap();
        let mass: f64 = h.values.iter().sum::<f64>() * f64::from(dur);
        prop_assert!((mass - map.firing_count() as f64).abs() < 1e-9);
    }

    #[test]
    fn ishii_stats_on_unit_range(x in prop::collection::vec(0.0f64..=1.0, 0..60)) {
        prop_assert!((0.0..=1.0).contains(&movement(&x)));
        prop_assert!((0.0..=1.0).contains(&frequency(&x)));
    }
}
