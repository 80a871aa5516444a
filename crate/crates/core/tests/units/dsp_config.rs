use fusedet::dsp::*;
use fusedet::Error;

#[test]
fn default_config_is_consistent() {
    let cfg = RadarConfig::default();
    cfg.validate().unwrap();
    assert!(cfg.range_resolution <= 0.05);
    assert!((cfg.range_resolution - 0.0375).abs() < 1e-3);
    assert_eq!(cfg.range_fft_size(), 512);
    assert_eq!(cfg.doppler_fft_size(), 64);
}

#[test]
fn inconsistent_bandwidth_is_rejected() {
    let mut cfg = RadarConfig::default();
    cfg.bandwidth *= 1.05;
    assert!(matches!(cfg.validate(), Err(Error::Config(_))));
}

#[test]
fn zero_counts_are_rejected() {
    let mut cfg = RadarConfig::default();
    cfg.n_rx_channels = 0;
    assert!(cfg.validate().is_err());
    let mut cfg = RadarConfig::default();
    cfg.sample_rate = 0.0;
    assert!(cfg.validate().is_err());
}
