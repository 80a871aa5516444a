use fusedet::dsp::RadarConfig;
use fusedet::dsp::*;
use num_complex::Complex;
use std::f64::consts::PI;

fn cfg(samples: usize, chirps: usize) -> RadarConfig {
    RadarConfig {
        n_samples_per_chirp: samples,
        n_chirps_per_frame: chirps,
        n_rx_channels: 1,
        ..RadarConfig::default()
    }
}

fn peak(v: &[Complex<f64>]) -> usize {
    v.iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .unwrap()
        .0
}

#[test]
fn zero_input_gives_zero_spectrum() {
    let cube = AdcCube::<f64>::zeros(cfg(16, 4));
    let rs = range_fft(&cube, WindowKind::Hann).unwrap();
    assert!(rs.data.iter().all(|c| c.norm() == 0.0));
    let rd = doppler_fft(&rs, WindowKind::Hann).unwrap();
    assert!(rd.cells.iter().all(|c| c.norm() == 0.0));
}

#[test]
fn tone_at_eighth_of_sample_rate_peaks_at_bin_n_over_8() {
    let n = 64;
    let samples = (0..4 * n)
        .map(|i| {
            let k = (i % n) as f64;
            Complex::from_polar(1.0, 2.0 * PI * k / 8.0)
        })
        .collect();
    let cube = AdcCube::from_samples(cfg(n, 4), samples).unwrap();
    let rs = range_fft(&cube, WindowKind::Rectangular).unwrap();
    assert_eq!(peak(rs.chirp(0, 0)), n / 8);
    assert!((rs.chirp(0, 0)[n / 8].norm() - n as f64).abs() < 1e-9);
}

#[test]
fn non_power_of_two_is_zero_padded() {
    let cube = AdcCube::<f64>::zeros(cfg(100, 3));
    let rs = range_fft(&cube, WindowKind::Hann).unwrap();
    assert_eq!(rs.n_fft, 128);
    let rd = doppler_fft(&rs, WindowKind::Hann).unwrap();
    assert_eq!(rd.n_doppler, 4);
}

#[test]
fn static_scene_lands_in_zero_doppler_bin() {
    let n = 16;
    let chirps = 8;
    let samples = (0..chirps * n)
        .map(|i| Complex::from_polar(1.0, 2.0 * PI * (i % n) as f64 * 3.0 / n as f64))
        .collect();
    let cube = AdcCube::from_samples(cfg(n, chirps), samples).unwrap();
    let rs = range_fft(&cube, WindowKind::Rectangular).unwrap();
    let rd = doppler_fft(&rs, WindowKind::Rectangular).unwrap();
    let total: f64 = rd.cells.iter().map(|c| c.norm_sqr()).sum();
    let zero_bin: f64 = (0..rd.n_range)
        .map(|r| rd.cell(0, chirps / 2, r).norm_sqr())
        .sum();
    assert!((total - zero_bin).abs() / total < 1e-12);
}

#[test]
fn degenerate_sizes_are_rejected() {
    let cube = AdcCube::<f64>::zeros(cfg(1, 4));
    assert!(range_fft(&cube, WindowKind::Hann).is_err());
    let cube = AdcCube::<f64>::zeros(cfg(8, 1));
    let rs = range_fft(&cube, WindowKind::Hann).unwrap();
    assert!(doppler_fft(&rs, WindowKind::Hann).is_err());
}

#[test]
fn hann_window_is_symmetric_and_tapered() {
    let w = WindowKind::Hann.coefficients::<f64>(9);
    assert_eq!(w[0], 0.0);
    assert!((w[4] - 1.0).abs() < 1e-15);
    for i in 0..9 {
        assert!((w[i] - w[8 - i]).abs() < 1e-15);
    }
}
