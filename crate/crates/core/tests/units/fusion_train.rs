use fusedet::detector::Source;
use fusedet::fusion::N_POOLED;
use fusedet::fusion::*;
use fusedet::Error;

fn toy() -> Vec<FusionSample<f64>> {
    (0..40)
        .map(|i| {
            let label = i % 2 == 0;
            let f = if label { 0.8 } else { 0.05 };
            FusionSample {
                source: if i % 3 == 0 {
                    Source::Radar
                } else {
                    Source::Image
                },
                v1: if i % 3 == 0 {
                    vec![0.5, 0.5]
                } else {
                    vec![0.4, 0.6]
                },
                pooled: [f; N_POOLED],
                label,
            }
        })
        .collect()
}

#[test]
fn zero_lr_keeps_params() {
    let init = FusionParams::init(1, 8, 2);
    let cfg = TrainConfig {
        lr: 0.0,
        epochs: 3,
        ..Default::default()
    };
    let (p, rep) = train_refinement(&toy(), init.clone(), &cfg).unwrap();
    assert_eq!(p.to_vec(), init.to_vec());
    assert_eq!(rep.final_loss, rep.initial_loss);
}

#[test]
fn needs_both_labels() {
    let only_pos: Vec<_> = toy().into_iter().filter(|s| s.label).collect();
    let r = train_refinement(
        &only_pos,
        FusionParams::init(1, 8, 0),
        &TrainConfig::default(),
    );
    assert!(matches!(r, Err(Error::Training(_))));
}

#[test]
fn loss_does_not_increase() {
    let (_, rep) =
        train_refinement(&toy(), FusionParams::init(1, 8, 5), &TrainConfig::default()).unwrap();
    assert!(rep.final_loss <= rep.initial_loss);
    assert!(rep.final_loss < 0.5 * rep.initial_loss);
}

#[test]
fn divergence_is_reported() {
    let cfg = TrainConfig {
        lr: f64::MAX,
        epochs: 5,
        ..Default::default()
    };
    let r = train_refinement(&toy(), FusionParams::init(1, 8, 5), &cfg);
    assert!(matches!(r, Err(Error::Training(_))), "{r:?}");
}
