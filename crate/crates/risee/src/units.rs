//! Decibel and unit conversions. Everything internal is watts and Hz;
//! conversions happen once at the configuration boundary.

/// dB ratio to linear.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

pub fn dbw_to_watts(dbw: f64) -> f64 {
    10f64.powf(dbw / 10.0)
}

pub fn watts_to_dbw(w: f64) -> f64 {
    10.0 * w.log10()
}

/// Thermal noise floor over `bandwidth` Hz: -174 dBm/Hz integrated.
pub fn thermal_noise_watts(bandwidth: f64) -> f64 {
    dbm_to_watts(-174.0 + 10.0 * bandwidth.log10())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-12);
        assert!((dbw_to_watts(20.0) - 100.0).abs() < 1e-9);
        assert!((watts_to_dbm(dbm_to_watts(17.3)) - 17.3).abs() < 1e-12);
        assert!((watts_to_dbw(dbw_to_watts(-3.2)) + 3.2).abs() < 1e-12);
    }

    #[test]
    fn thermal_floor_at_180khz() {
        // -174 dBm/Hz + 10 log10(180e3) = -121.4 dBm
        let w = thermal_noise_watts(180e3);
        assert!((watts_to_dbm(w) + 121.447).abs() < 1e-2);
    }
}
