use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use motvec_core::viz::tsne::{conditional_affinities, joint_probabilities, squared_distances};
use motvec_core::viz::{build_plot, kmeans, tsne, TsneConfig, VizRequest};
use motvec_core::{EmbeddingSet, Error, NormalizedView, Vocabulary};

fn points() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 6..20)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kmeans_assignments_survive_translation(
        pts in prop::collection::vec(prop::collection::vec((-20i32..20).prop_map(|q| q as f64 / 4.0), 3), 6..20),
        shift in prop::array::uniform3((-100i32..100).prop_map(f64::from)),
        seed in any::<u64>(),
    ) {
        let moved: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().zip(&shift).map(|(x, s)| x + s).collect()).collect();
        let a = kmeans(&pts, 3, seed).unwrap();
        let b = kmeans(&moved, 3, seed).unwrap();
        prop_assert_eq!(&a.assignments, &b.assignments);
        prop_assert!(a.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn joint_probabilities_are_symmetric_and_normalized(pts in points(), perplexity in 1.5f64..3.0) {
        let n = pts.len();
        let (cond, entropies) = conditional_affinities(&squared_distances(&pts), n, perplexity);
        for h in &entropies {
            prop_assert!((h - perplexity.ln()).abs() <= 1e-5);
        }
        let p = joint_probabilities(&cond, n);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        for i in 0..n {
            for j in 0..n {
                prop_assert!(p[i * n + j] >= 0.0);
                prop_assert_eq!(p[i * n + j], p[j * n + i]);
            }
        }
    }
}

#[test]
fn two_blobs_stay_apart() {
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let pts: Vec<Vec<f64>> = (0..60)
            .map(|i| {
                let center = if i < 30 { 0.0 } else { 50.0 };
                (0..10).map(|_| center + noise.sample(&mut rng)).collect()
            })
            .collect();
        let res = tsne(
            &pts,
            &TsneConfig {
                perplexity: 10.0,
                seed,
                ..TsneConfig::default()
            },
        )
        .unwrap();
        assert!(res.kl_final <= res.kl_initial);
        let d2 = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
        let same_blob = (0..60)
            .filter(|&i| {
                let nn = (0..60)
                    .filter(|&j| j != i)
                    .min_by(|&a, &b| {
                        d2(res.coords[i], res.coords[a])
                            .total_cmp(&d2(res.coords[i], res.coords[b]))
                    })
                    .unwrap();
                (nn < 30) == (i < 30)
            })
            .count();
        assert!(same_blob * 10 >= 60 * 9, "seed {seed}: {same_blob}/60");
        assert!(res
            .coords
            .iter()
            .all(|c| c[0].is_finite() && c[1].is_finite()));
    }
}

#[test]
fn perplexity_bound_is_enforced() {
    let pts: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
    let err = tsne(
        &pts,
        &TsneConfig {
            perplexity: 4.0,
            ..TsneConfig::default()
        },
    )
    .unwrap_err();
    assert!(matches!(err, Error::PerplexityTooLarge { .. }));
}

fn view(v: usize) -> NormalizedView {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let vocab = Vocabulary::from_words((0..v).map(|i| format!("w{i}")).collect()).unwrap();
    let data = (0..v * 8).map(|_| noise.sample(&mut rng) as f32).collect();
    NormalizedView::new(&EmbeddingSet::new(vocab, 8, data).unwrap())
}

#[test]
fn plots_include_the_query_word_first() {
    let view = view(50);
    let plot = build_plot(&view, &VizRequest::new("w3", 3, 2, 1)).unwrap();
    assert_eq!(plot.points.len(), 4);
    assert_eq!(plot.points[0].word, "w3");
    assert!(plot.points.iter().all(|p| p.cluster < 2));
    assert!(plot.kl_final <= plot.kl_initial);

    let big = VizRequest::new("w0", 30, 4, 7);
    assert_eq!(
        build_plot(&view, &big).unwrap(),
        build_plot(&view, &big).unwrap()
    );

    assert!(matches!(
        build_plot(&view, &VizRequest::new("w0", 3, 3, 1)),
        Err(Error::TooFewPoints { .. })
    ));
    assert!(matches!(
        build_plot(&view, &VizRequest::new("nope", 3, 2, 1)),
        Err(Error::OovWord(_))
    ));

    let json = serde_json::to_value(&plot).unwrap();
    for key in ["word", "points", "klInitial", "klFinal", "inertia"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    assert!(json["points"][0].get("cluster").is_some());
}
