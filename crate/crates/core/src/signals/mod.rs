//! Multichannel time-series data model and session recordings.
//!
//! A [`TimeSeries`] is uniformly sampled: timestamps are derived from
//! `start_time_s + k / sample_rate_hz`, never stored. A [`SessionRecording`]
//! bundles one subject's trial: raw sensor streams, the metabolic trace,
//! per-side ground-truth ankle moment, control-law transitions and
//! perturbation events. All types are immutable after construction and the
//! operations here are pure.

mod bundle;

pub use bundle::{fmt_g9, load_session, quantize_g9, save_session, BundleError};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default acquisition rates, Hz. The source hardware never published its
/// rates; these are consistent with the sEMG bandwidth (20-450 Hz needs
/// > 900 Hz) and commodity IMU parts.
pub const EMG_RATE_HZ: f64 = 1000.0;
pub const IMU_RATE_HZ: f64 = 100.0;
pub const STRAIN_RATE_HZ: f64 = 100.0;
pub const FSR_RATE_HZ: f64 = 100.0;
pub const MET_RATE_HZ: f64 = 1.0;
pub const MOMENT_RATE_HZ: f64 = 100.0;

/// Perturbation pulses stay strictly below this cap (Nm/kg).
pub const PERTURBATION_MAGNITUDE_CAP: f64 = 0.3;

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("{what} = {value} out of range [{lo}, {hi}]")]
    Range { what: &'static str, value: f64, lo: f64, hi: f64 },
    #[error("channel mismatch: {0}")]
    ChannelMismatch(String),
    #[error("non-finite sample in channel {channel} at index {index}")]
    NonFinite { channel: usize, index: usize },
    #[error("unknown stream {0}")]
    UnknownStream(String),
    #[error("{0}")]
    Contract(String),
}

/// Sensing modality of a raw stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Emg,
    Imu,
    Strain,
    Fsr,
}

impl Modality {
    pub const ALL: [Modality; 4] = [Modality::Emg, Modality::Imu, Modality::Strain, Modality::Fsr];

    pub fn as_str(&self) -> &'static str {
        match self {
            Modality::Emg => "emg",
            Modality::Imu => "imu",
            Modality::Strain => "strain",
            Modality::Fsr => "fsr",
        }
    }

    pub fn rate_hz(&self) -> f64 {
        match self {
            Modality::Emg => EMG_RATE_HZ,
            Modality::Imu => IMU_RATE_HZ,
            Modality::Strain => STRAIN_RATE_HZ,
            Modality::Fsr => FSR_RATE_HZ,
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Body side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Uniformly sampled multichannel signal. `data` is channels x samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub sample_rate_hz: f64,
    pub start_time_s: f64,
    pub channel_names: Vec<String>,
    pub units: Vec<String>,
    pub data: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn new(
        sample_rate_hz: f64,
        start_time_s: f64,
        channel_names: Vec<String>,
        units: Vec<String>,
        data: Vec<Vec<f64>>,
    ) -> Result<Self, SignalError> {
        if !(sample_rate_hz > 0.0) || !sample_rate_hz.is_finite() {
            return Err(SignalError::Range {
                what: "sample_rate_hz",
                value: sample_rate_hz,
                lo: f64::MIN_POSITIVE,
                hi: f64::INFINITY,
            });
        }
        if data.len() != channel_names.len() {
            return Err(SignalError::ChannelMismatch(format!(
                "{} data rows vs {} channel names",
                data.len(),
                channel_names.len()
            )));
        }
        if units.len() != channel_names.len() {
            return Err(SignalError::ChannelMismatch(format!(
                "{} units vs {} channel names",
                units.len(),
                channel_names.len()
            )));
        }
        let n = data.first().map_or(0, Vec::len);
        for (c, row) in data.iter().enumerate() {
            if row.len() != n {
                return Err(SignalError::ChannelMismatch(format!(
                    "channel {c} has {} samples, expected {n}",
                    row.len()
                )));
            }
            if let Some(index) = row.iter().position(|v| !v.is_finite()) {
                return Err(SignalError::NonFinite { channel: c, index });
            }
        }
        Ok(Self { sample_rate_hz, start_time_s, channel_names, units, data })
    }

    pub fn n_channels(&self) -> usize {
        self.data.len()
    }

    /// Samples per channel.
    pub fn len(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / self.sample_rate_hz
    }

    pub fn end_time_s(&self) -> f64 {
        self.start_time_s + self.duration_s()
    }

    /// Timestamp of sample `k`, derived (never stored).
    pub fn timestamp(&self, k: usize) -> f64 {
        self.start_time_s + k as f64 / self.sample_rate_hz
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        &self.data[c]
    }

    pub fn channel_by_name(&self, name: &str) -> Option<&[f64]> {
        self.channel_names.iter().position(|n| n == name).map(|i| self.channel(i))
    }

    /// Index of the sample at or immediately before absolute time `t_s`.
    pub fn index_at(&self, t_s: f64) -> usize {
        (((t_s - self.start_time_s) * self.sample_rate_hz) + 1e-9).floor().max(0.0) as usize
    }
}

/// Extract `[t_start_s, t_start_s + duration_s]` as a new series.
///
/// The returned series has `round(duration_s * rate)` samples starting at
/// index `floor((t_start_s - start_time_s) * rate)`.
pub fn slice(series: &TimeSeries, t_start_s: f64, duration_s: f64) -> Result<TimeSeries, SignalError> {
    if !(duration_s > 0.0) {
        return Err(SignalError::Range { what: "duration_s", value: duration_s, lo: 0.0, hi: f64::INFINITY });
    }
    if t_start_s < series.start_time_s - 1e-9 {
        return Err(SignalError::Range {
            what: "t_start_s",
            value: t_start_s,
            lo: series.start_time_s,
            hi: series.end_time_s(),
        });
    }
    let start_idx = series.index_at(t_start_s);
    let count = (duration_s * series.sample_rate_hz).round() as usize;
    if start_idx + count > series.len() {
        return Err(SignalError::Range {
            what: "t_start_s + duration_s",
            value: t_start_s + duration_s,
            lo: series.start_time_s,
            hi: series.end_time_s(),
        });
    }
    let data = series.data.iter().map(|row| row[start_idx..start_idx + count].to_vec()).collect();
    Ok(TimeSeries {
        sample_rate_hz: series.sample_rate_hz,
        start_time_s: series.timestamp(start_idx),
        channel_names: series.channel_names.clone(),
        units: series.units.clone(),
        data,
    })
}

/// Linear-interpolation resampling onto a `target_hz` grid; duration is
/// preserved to within one target-period.
pub fn resample_linear(series: &TimeSeries, target_hz: f64) -> Result<TimeSeries, SignalError> {
    if !(target_hz > 0.0) || !target_hz.is_finite() {
        return Err(SignalError::Range { what: "target_hz", value: target_hz, lo: 0.0, hi: f64::INFINITY });
    }
    let n = series.len();
    let n_out = (series.duration_s() * target_hz).round() as usize;
    let ratio = series.sample_rate_hz / target_hz;
    let mut data = Vec::with_capacity(series.n_channels());
    for row in &series.data {
        let mut out = Vec::with_capacity(n_out);
        for j in 0..n_out {
            let p = j as f64 * ratio;
            let i0 = (p.floor() as usize).min(n.saturating_sub(1));
            let i1 = (i0 + 1).min(n.saturating_sub(1));
            let frac = p - i0 as f64;
            out.push(row[i0] + frac * (row[i1] - row[i0]));
        }
        data.push(out);
    }
    Ok(TimeSeries {
        sample_rate_hz: target_hz,
        start_time_s: series.start_time_s,
        channel_names: series.channel_names.clone(),
        units: series.units.clone(),
        data,
    })
}

/// Bilateral sensor layout of the leg sleeve. Per side: 3 sEMG electrodes,
/// 2 strain channels, 2 nine-axis IMUs (shank, foot), 8 FSR channels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelLayout {
    pub emg_channels: Vec<String>,
    pub strain_channels: Vec<String>,
    pub imu_units: Vec<String>,
    pub fsr_channels: usize,
}

pub const IMU_AXES: [&str; 9] = [
    "accel_x", "accel_y", "accel_z", "gyro_x", "gyro_y", "gyro_z", "mag_x", "mag_y", "mag_z",
];

impl Default for ChannelLayout {
    fn default() -> Self {
        Self {
            emg_channels: vec![
                "tibialis_anterior".into(),
                "fibularis_brevis".into(),
                "gastrocnemius".into(),
            ],
            strain_channels: vec!["heel_lateral".into(), "heel_posterior".into()],
            imu_units: vec!["shank".into(), "foot".into()],
            fsr_channels: 8,
        }
    }
}

impl ChannelLayout {
    /// Flat channel-name list for one side of a modality.
    pub fn channel_names(&self, modality: Modality) -> Vec<String> {
        match modality {
            Modality::Emg => self.emg_channels.clone(),
            Modality::Strain => self.strain_channels.clone(),
            Modality::Imu => self
                .imu_units
                .iter()
                .flat_map(|unit| IMU_AXES.iter().map(move |ax| format!("{unit}_{ax}")))
                .collect(),
            Modality::Fsr => (0..self.fsr_channels).map(|i| format!("fsr_{i}")).collect(),
        }
    }

    pub fn channel_units(&self, modality: Modality) -> Vec<String> {
        match modality {
            Modality::Emg => vec!["mV".into(); self.emg_channels.len()],
            Modality::Strain => vec!["rel".into(); self.strain_channels.len()],
            Modality::Imu => self
                .imu_units
                .iter()
                .flat_map(|_| {
                    ["m/s^2", "m/s^2", "m/s^2", "rad/s", "rad/s", "rad/s", "uT", "uT", "uT"]
                        .iter()
                        .map(|u| u.to_string())
                })
                .collect(),
            Modality::Fsr => vec!["N".into(); self.fsr_channels],
        }
    }

    pub fn channel_count(&self, modality: Modality) -> usize {
        match modality {
            Modality::Emg => self.emg_channels.len(),
            Modality::Strain => self.strain_channels.len(),
            Modality::Imu => self.imu_units.len() * IMU_AXES.len(),
            Modality::Fsr => self.fsr_channels,
        }
    }
}

/// Assistance condition: torque scaling factor and actuation delay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlLaw {
    pub alpha: f64,
    pub delay_ms: f64,
}

impl ControlLaw {
    pub const ZERO_TORQUE: ControlLaw = ControlLaw { alpha: 0.0, delay_ms: 0.0 };

    pub fn new(alpha: f64, delay_ms: f64) -> Result<Self, SignalError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(SignalError::Range { what: "alpha", value: alpha, lo: 0.0, hi: 1.0 });
        }
        if !(0.0..=500.0).contains(&delay_ms) {
            return Err(SignalError::Range { what: "delay_ms", value: delay_ms, lo: 0.0, hi: 500.0 });
        }
        Ok(Self { alpha, delay_ms })
    }
}

/// One control-law switch and the end of its transition segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub t_switch_s: f64,
    pub law_before: ControlLaw,
    pub law_after: ControlLaw,
    pub steady_time_s: f64,
}

/// A torque pulse injected at a phase where minimal ankle force is expected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationEvent {
    pub onset_s: f64,
    pub gait_phase_pct: f64,
    pub magnitude_nm_per_kg: f64,
    pub button_press_s: Option<f64>,
}

/// One subject trial: streams, physiology, events.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionRecording {
    pub subject_id: String,
    pub body_mass_kg: f64,
    pub layout: ChannelLayout,
    pub streams: BTreeMap<(Modality, Side), TimeSeries>,
    pub metabolic: TimeSeries,
    pub ground_truth_moment: BTreeMap<Side, TimeSeries>,
    pub transitions: Vec<Transition>,
    pub perturbations: Vec<PerturbationEvent>,
    pub zero_torque_baseline_w_per_kg: f64,
}

impl SessionRecording {
    pub fn stream(&self, modality: Modality, side: Side) -> Result<&TimeSeries, SignalError> {
        self.streams
            .get(&(modality, side))
            .ok_or_else(|| SignalError::UnknownStream(format!("{modality}_{side}")))
    }

    /// Common time interval covered by every stream (raw + metabolic + moment).
    pub fn extent(&self) -> (f64, f64) {
        let mut t0 = f64::NEG_INFINITY;
        let mut t1 = f64::INFINITY;
        let mut visit = |s: &TimeSeries| {
            t0 = t0.max(s.start_time_s);
            t1 = t1.min(s.end_time_s());
        };
        self.streams.values().for_each(&mut visit);
        self.ground_truth_moment.values().for_each(&mut visit);
        visit(&self.metabolic);
        (t0, t1)
    }
}

/// A single invariant violation: machine-readable code plus location.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: String,
    pub location: String,
    pub message: String,
}

impl Violation {
    fn new(code: &str, location: impl Into<String>, message: impl Into<String>) -> Self {
        Self { code: code.into(), location: location.into(), message: message.into() }
    }
}

/// Check every session invariant; returns an empty list iff all hold.
/// Violations are data, not errors, and the function is pure.
pub fn validate_session(session: &SessionRecording) -> Vec<Violation> {
    let mut out = Vec::new();

    if !(session.body_mass_kg > 0.0) {
        out.push(Violation::new("mass_nonpositive", "session", "body_mass_kg must be positive"));
    }
    if !(session.zero_torque_baseline_w_per_kg > 0.0) {
        out.push(Violation::new("baseline_nonpositive", "session", "zero-torque baseline must be positive"));
    }

    for (&(modality, side), series) in &session.streams {
        let loc = format!("streams.{modality}_{side}");
        let want = session.layout.channel_count(modality);
        if series.n_channels() != want {
            out.push(Violation::new(
                "channel_count",
                &loc,
                format!("{} channels, layout expects {want}", series.n_channels()),
            ));
        }
        check_series(series, &loc, &mut out);
    }
    check_series(&session.metabolic, "metabolic", &mut out);
    for (side, series) in &session.ground_truth_moment {
        check_series(series, &format!("moment_{side}"), &mut out);
    }

    // Streams must overlap a common interval.
    let (t0, t1) = session.extent();
    if !(t0 < t1) {
        out.push(Violation::new("stream_overlap", "session", "streams share no common time interval"));
    }

    for (i, tr) in session.transitions.iter().enumerate() {
        let loc = format!("transitions[{i}]");
        if !(tr.steady_time_s > tr.t_switch_s) {
            out.push(Violation::new("steady_before_switch", &loc, "steady_time_s must exceed t_switch_s"));
        }
        for law in [tr.law_before, tr.law_after] {
            if !(0.0..=1.0).contains(&law.alpha) {
                out.push(Violation::new("alpha_range", &loc, format!("alpha {} outside [0,1]", law.alpha)));
            }
            if !(0.0..=500.0).contains(&law.delay_ms) {
                out.push(Violation::new("delay_range", &loc, format!("delay {} ms outside [0,500]", law.delay_ms)));
            }
        }
        if i > 0 {
            let prev = &session.transitions[i - 1];
            if tr.t_switch_s < prev.t_switch_s {
                out.push(Violation::new("transition_order", &loc, "transitions not sorted by switch time"));
            }
            if tr.t_switch_s < prev.steady_time_s - 1e-9 {
                out.push(Violation::new("transition_overlap", &loc, "segment overlaps previous transition"));
            }
        }
    }

    for (i, ev) in session.perturbations.iter().enumerate() {
        let loc = format!("perturbations[{i}]");
        if ev.magnitude_nm_per_kg >= PERTURBATION_MAGNITUDE_CAP || ev.magnitude_nm_per_kg <= 0.0 {
            out.push(Violation::new(
                "magnitude_cap",
                &loc,
                format!("magnitude {} >= {PERTURBATION_MAGNITUDE_CAP} Nm/kg cap", ev.magnitude_nm_per_kg),
            ));
        }
        let p = ev.gait_phase_pct;
        if !((0.0..=20.0).contains(&p) || (80.0..=100.0).contains(&p)) {
            out.push(Violation::new("phase_window", &loc, format!("gait phase {p} outside [0,20] u [80,100]")));
        }
        if let Some(bp) = ev.button_press_s {
            if bp <= ev.onset_s {
                out.push(Violation::new("button_precedes_onset", &loc, "button press precedes onset"));
            }
        }
        if ev.onset_s < t0 || ev.onset_s > t1 {
            out.push(Violation::new("onset_outside", &loc, "onset outside session extent"));
        }
    }

    out
}

fn check_series(series: &TimeSeries, loc: &str, out: &mut Vec<Violation>) {
    if !(series.sample_rate_hz > 0.0) {
        out.push(Violation::new("rate_nonpositive", loc, "sample_rate_hz must be positive"));
    }
    if series.channel_names.len() != series.data.len() {
        out.push(Violation::new("channel_count", loc, "channel-name count differs from data rows"));
    }
    if series.units.len() != series.channel_names.len() {
        out.push(Violation::new("units_count", loc, "units count differs from channel count"));
    }
    for (c, row) in series.data.iter().enumerate() {
        if row.iter().any(|v| !v.is_finite()) {
            out.push(Violation::new("nonfinite_sample", loc, format!("non-finite sample in channel {c}")));
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp_series(n: usize, rate: f64) -> TimeSeries {
        let data: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        TimeSeries::new(rate, 0.0, vec!["x".into()], vec!["v".into()], vec![data]).unwrap()
    }

    #[test]
    fn slice_index_arithmetic() {
        // 10 s @ 100 Hz, slice(2.0, 0.2) -> 20 samples starting at index 200.
        let s = ramp_series(1000, 100.0);
        let w = slice(&s, 2.0, 0.2).unwrap();
        assert_eq!(w.len(), 20);
        assert_eq!(w.data[0][0], s.data[0][200]);
        assert_eq!(w.data[0][19], s.data[0][219]);
        assert!((w.start_time_s - 2.0).abs() < 1e-12);
    }

    #[test]
    fn slice_identity() {
        let s = ramp_series(500, 100.0);
        let w = slice(&s, s.start_time_s, s.duration_s()).unwrap();
        assert_eq!(w, s);
    }

    #[test]
    fn slice_out_of_range() {
        let s = ramp_series(100, 100.0);
        let err = slice(&s, -1.0, 0.2).unwrap_err();
        assert!(err.to_string().contains("t_start_s"), "{err}");
        let err = slice(&s, 0.9, 0.2).unwrap_err();
        assert!(err.to_string().contains("t_start_s + duration_s"), "{err}");
    }

    #[test]
    fn resample_identity_and_constant() {
        let s = ramp_series(100, 100.0);
        let same = resample_linear(&s, 100.0).unwrap();
        assert_eq!(same, s);

        let c = TimeSeries::new(50.0, 0.0, vec!["c".into()], vec!["v".into()], vec![vec![2.5; 75]]).unwrap();
        for hz in [10.0, 33.0, 200.0] {
            let r = resample_linear(&c, hz).unwrap();
            assert!(r.data[0].iter().all(|&v| (v - 2.5).abs() < 1e-12));
        }
    }

    #[test]
    fn resample_ramp_matches_formula() {
        // 1 s ramp 0 -> 1 @ 100 Hz, resampled to 50 Hz: x[j] = j*2/99.
        let s = ramp_series(100, 100.0);
        let r = resample_linear(&s, 50.0).unwrap();
        assert_eq!(r.len(), 50);
        for (j, &v) in r.data[0].iter().enumerate() {
            let expect = (j as f64 * 2.0) / 99.0;
            assert!((v - expect).abs() < 1e-9, "j={j} got {v} want {expect}");
        }
    }

    #[test]
    fn timestamps_derived_from_rate() {
        let s = ramp_series(64, 128.0);
        for k in 1..64 {
            let dt = s.timestamp(k) - s.timestamp(k - 1);
            assert!((dt - 1.0 / 128.0).abs() < 1e-15);
        }
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(TimeSeries::new(0.0, 0.0, vec!["x".into()], vec!["v".into()], vec![vec![0.0]]).is_err());
        assert!(TimeSeries::new(1.0, 0.0, vec![], vec![], vec![vec![0.0]]).is_err());
        assert!(matches!(
            TimeSeries::new(1.0, 0.0, vec!["x".into()], vec!["v".into()], vec![vec![f64::NAN]]),
            Err(SignalError::NonFinite { .. })
        ));
    }

    #[test]
    fn layout_totals_are_bilateral() {
        let layout = ChannelLayout::default();
        let per_side: usize = Modality::ALL.iter().map(|&m| layout.channel_count(m)).sum();
        assert_eq!(layout.channel_count(Modality::Emg) * 2, 6);
        assert_eq!(layout.channel_count(Modality::Strain) * 2, 4);
        assert_eq!(layout.imu_units.len() * 2, 4);
        assert_eq!(layout.channel_count(Modality::Fsr) * 2, 16);
        assert_eq!(per_side, 3 + 2 + 18 + 8);
        assert_eq!(layout.channel_names(Modality::Imu).len(), 18);
        assert_eq!(layout.channel_units(Modality::Imu).len(), 18);
    }

    #[test]
    fn control_law_bounds() {
        assert!(ControlLaw::new(0.6, 350.0).is_ok());
        assert!(ControlLaw::new(1.2, 0.0).is_err());
        assert!(ControlLaw::new(0.5, 600.0).is_err());
    }
}
