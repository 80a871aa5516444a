use fusedet::camera::Box2D;
use fusedet::detector::{Detection2D, Source};
use fusedet::fusion::*;

fn det(b: Box2D<f64>, s: f64, source: Source) -> Detection2D {
    Detection2D {
        bbox: b,
        scores: vec![1.0 - s, s],
        source,
    }
}

#[test]
fn empty_candidates() {
    let hm = RadarHeatmap::zeros(4, 4, 16.0);
    let out = refine(&[], &hm, &FusionParams::zeros(1, 8), &Thresholds::default()).unwrap();
    assert!(out.is_empty());
}

#[test]
fn radar_candidates_skip_integration() {
    let hm = RadarHeatmap::zeros(4, 4, 16.0);
    let mut params = FusionParams::zeros(1, 8);
    params.b2 = -50.0;
    params.radar_b = 1.0;
    let b = Box2D::new(0.0, 0.0, 30.0, 30.0).unwrap();
    let out = refine(
        &[det(b, 0.0, Source::Radar)],
        &hm,
        &params,
        &Thresholds::default(),
    )
    .unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].provenance, Provenance::Radar);
    let out = refine(
        &[det(b, 0.9, Source::Image)],
        &hm,
        &params,
        &Thresholds::default(),
    )
    .unwrap();
    assert!(out.is_empty(), "image candidate blocked by p");
}

#[test]
fn nms_keeps_the_most_confident_of_a_pair() {
    let b = Box2D::new(0.0, 0.0, 10.0, 10.0).unwrap();
    let mk = |bbox, confidence, provenance| RefinedDetection {
        bbox,
        confidence,
        keep_score: confidence,
        provenance,
        identity: None,
    };
    let out = nms(
        vec![
            mk(b, 0.7, Provenance::Radar),
            mk(b.translate(1.0, 0.0), 0.9, Provenance::Image),
            mk(b.translate(50.0, 0.0), 0.6, Provenance::Radar),
        ],
        0.5,
    );
    assert_eq!(out.len(), 2);
    assert_eq!(out[0].provenance, Provenance::Image);
    assert_eq!(out[1].bbox, b.translate(50.0, 0.0));
}
