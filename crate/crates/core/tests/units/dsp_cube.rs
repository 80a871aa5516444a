use fusedet::dsp::*;
use fusedet::Error;
use num_complex::Complex;

fn small_config() -> RadarConfig {
    RadarConfig {
        n_samples_per_chirp: 8,
        n_chirps_per_frame: 4,
        n_rx_channels: 2,
        ..RadarConfig::default()
    }
}

fn ramp_cube() -> AdcCube<f64> {
    let cfg = small_config();
    let n = 2 * 4 * 8;
    let samples = (0..n)
        .map(|i| Complex::new(i as f64, -(i as f64) * 0.5))
        .collect();
    AdcCube::from_samples(cfg, samples).unwrap()
}

#[test]
fn identity_calibration_is_noop() {
    let cube = ramp_cube();
    let out = calibrate_adc(&cube, &ChannelCalibration::identity(2)).unwrap();
    assert_eq!(out, cube);
}

#[test]
fn gain_two_doubles_channel() {
    let cube = ramp_cube();
    let cal = ChannelCalibration::new(
        vec![Complex::new(2.0, 0.0), Complex::new(1.0, 0.0)],
        vec![Complex::new(0.0, 0.0); 2],
    )
    .unwrap();
    let out = calibrate_adc(&cube, &cal).unwrap();
    for (a, b) in out.channel(0).iter().zip(cube.channel(0)) {
        assert_eq!(*a, b * 2.0);
    }
    assert_eq!(out.channel(1), cube.channel(1));
}

#[test]
fn channel_mismatch_is_config_error() {
    let cube = ramp_cube();
    let cal = ChannelCalibration::<f64>::identity(3);
    assert!(matches!(calibrate_adc(&cube, &cal), Err(Error::Config(_))));
}

#[test]
fn zero_gain_is_rejected() {
    let r = ChannelCalibration::new(
        vec![Complex::new(0.0_f64, 0.0)],
        vec![Complex::new(0.0, 0.0)],
    );
    assert!(r.is_err());
}

#[test]
fn offset_removal_leaves_zero_mean() {
    // zero-mean alternating signal plus a DC offset of 0.1
    let cfg = small_config();
    let n = 2 * 4 * 8;
    let samples = (0..n)
        .map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            Complex::new(s + 0.1, 0.0)
        })
        .collect();
    let cube = AdcCube::from_samples(cfg, samples).unwrap();
    let cal = ChannelCalibration::new(
        vec![Complex::new(1.0, 0.0); 2],
        vec![Complex::new(0.1, 0.0); 2],
    )
    .unwrap();
    let out = calibrate_adc(&cube, &cal).unwrap();
    for k in 0..2 {
        let ch = out.channel(k);
        let mean = ch.iter().sum::<Complex<f64>>() / ch.len() as f64;
        assert!(mean.norm() < 1e-9, "channel {k} mean {mean}");
    }
}

#[test]
fn binary_roundtrip_preserves_f32_samples() {
    let cube = ramp_cube();
    let mut buf = Vec::new();
    cube.write_to(&mut buf).unwrap();
    assert_eq!(&buf[..4], b"ADC1");
    assert_eq!(buf.len(), 4 + 12 + 72 + 64 * 8);
    let back = AdcCube::<f64>::read_from(&buf[..]).unwrap();
    assert_eq!(back, cube);
}

#[test]
fn truncated_file_is_an_error() {
    let cube = ramp_cube();
    let mut buf = Vec::new();
    cube.write_to(&mut buf).unwrap();
    buf.truncate(buf.len() - 3);
    assert!(AdcCube::<f64>::read_from(&buf[..]).is_err());
    assert!(AdcCube::<f64>::read_from(&b"XXXX"[..]).is_err());
}
