//! Zero-phase low-pass filtering and numerical differentiation of position
//! trajectories.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::motion_model::{BodySegment, MotionSequence};
use crate::Point3;

pub const DEFAULT_CUTOFF_HZ: f64 = 1.5;
pub const MIN_FILTER_SAMPLES: usize = 8;
pub const MIN_DIFF_SAMPLES: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum SignalError {
    #[error("signal too short: {found} samples, need at least {needed}")]
    TooShort { needed: usize, found: usize },
    #[error("cutoff {cutoff_hz} Hz must lie in (0, {nyquist_hz}) Hz")]
    InvalidCutoff { cutoff_hz: f64, nyquist_hz: f64 },
}

/// Second-order Butterworth low-pass, always applied forward and backward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub cutoff_hz: f64,
}

impl Default for FilterSpec {
    fn default() -> Self {
        FilterSpec {
            cutoff_hz: DEFAULT_CUTOFF_HZ,
        }
    }
}

impl FilterSpec {
    pub const ORDER: usize = 2;

    pub fn new(cutoff_hz: f64) -> Self {
        FilterSpec { cutoff_hz }
    }

    pub fn check(&self, frame_rate: f64) -> Result<(), SignalError> {
        let nyquist_hz = frame_rate / 2.0;
        if !(self.cutoff_hz.is_finite() && self.cutoff_hz > 0.0 && self.cutoff_hz < nyquist_hz) {
            return Err(SignalError::InvalidCutoff {
                cutoff_hz: self.cutoff_hz,
                nyquist_hz,
            });
        }
        Ok(())
    }
}

/// Direct-form II transposed biquad with `a0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    /// Bilinear-transform Butterworth design with pre-warping, so the
    /// digital response is exactly -3.01 dB at `cutoff_hz`.
    pub fn butterworth_lowpass(cutoff_hz: f64, sample_rate: f64) -> Self {
        let k = (PI * cutoff_hz / sample_rate).tan();
        let k2 = k * k;
        let norm = 1.0 / (1.0 + SQRT_2 * k + k2);
        let b0 = k2 * norm;
        Biquad {
            b: [b0, 2.0 * b0, b0],
            a: [2.0 * (k2 - 1.0) * norm, (1.0 - SQRT_2 * k + k2) * norm],
        }
    }

    /// Samples for the pole envelope to decay by a factor e.
    pub fn time_constant(&self) -> f64 {
        // complex-conjugate poles: |p|^2 = a2
        let radius = self.a[1].abs().sqrt();
        -1.0 / radius.ln()
    }

    /// Filter state that makes a constant input pass through unchanged.
    fn steady_state(&self, level: f64) -> [f64; 2] {
        let [_, b1, b2] = self.b;
        let [a1, a2] = self.a;
        let z1 = (b1 + b2 - a1 - a2) * level;
        let z2 = (b2 - a2) * level;
        [z1, z2]
    }

    fn run(&self, x: &[f64]) -> Vec<f64> {
        let [b0, b1, b2] = self.b;
        let [a1, a2] = self.a;
        let [mut z1, mut z2] = self.steady_state(x[0]);
        x.iter()
            .map(|&xi| {
                let y = b0 * xi + z1;
                z1 = b1 * xi - a1 * y + z2;
                z2 = b2 * xi - a2 * y;
                y
            })
            .collect()
    }

    /// Forward-backward filtering with odd reflection padding at both ends.
    pub fn filtfilt(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let pad = ((3.0 * self.time_constant()).ceil() as usize).min(n - 1);
        let mut ext = Vec::with_capacity(n + 2 * pad);
        ext.extend((1..=pad).rev().map(|i| 2.0 * x[0] - x[i]));
        ext.extend_from_slice(x);
        ext.extend((1..=pad).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));

        let mut y = self.run(&ext);
        y.reverse();
        let mut y = self.run(&y);
        y.reverse();
        y.drain(..pad);
        y.truncate(n);
        y
    }
}

/// Zero-phase low-pass of a scalar signal.
pub fn lowpass_scalar(x: &[f64], frame_rate: f64, spec: &FilterSpec) -> Result<Vec<f64>, SignalError> {
    if x.len() < MIN_FILTER_SAMPLES {
        return Err(SignalError::TooShort {
            needed: MIN_FILTER_SAMPLES,
            found: x.len(),
        });
    }
    spec.check(frame_rate)?;
    Ok(Biquad::butterworth_lowpass(spec.cutoff_hz, frame_rate).filtfilt(x))
}

/// Zero-phase low-pass of each coordinate of a 3D trajectory.
pub fn lowpass(positions: &[Point3], frame_rate: f64, spec: &FilterSpec) -> Result<Vec<Point3>, SignalError> {
    let mut out = vec![[0.0; 3]; positions.len()];
    for axis in 0..3 {
        let coord: Vec<f64> = positions.iter().map(|p| p[axis]).collect();
        for (o, v) in out.iter_mut().zip(lowpass_scalar(&coord, frame_rate, spec)?) {
            o[axis] = v;
        }
    }
    Ok(out)
}

/// Central differences inside, first-order one-sided differences at both ends.
pub fn differentiate(positions: &[Point3], frame_rate: f64) -> Result<Vec<Point3>, SignalError> {
    let n = positions.len();
    if n < MIN_DIFF_SAMPLES {
        return Err(SignalError::TooShort {
            needed: MIN_DIFF_SAMPLES,
            found: n,
        });
    }
    let diff = |a: &Point3, b: &Point3, scale: f64| -> Point3 {
        [(b[0] - a[0]) * scale, (b[1] - a[1]) * scale, (b[2] - a[2]) * scale]
    };
    let mut v = Vec::with_capacity(n);
    v.push(diff(&positions[0], &positions[1], frame_rate));
    for i in 1..n - 1 {
        v.push(diff(&positions[i - 1], &positions[i + 1], frame_rate / 2.0));
    }
    v.push(diff(&positions[n - 2], &positions[n - 1], frame_rate));
    Ok(v)
}

/// Euclidean norm per frame.
pub fn speed(velocities: &[Point3]) -> Vec<f64> {
    velocities
        .iter()
        .map(|v| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt())
        .collect()
}

/// Filter, differentiate and take the norm of one trajectory.
pub fn speed_of(positions: &[Point3], frame_rate: f64, spec: &FilterSpec) -> Result<Vec<f64>, SignalError> {
    let smooth = lowpass(positions, frame_rate, spec)?;
    Ok(speed(&differentiate(&smooth, frame_rate)?))
}

/// Per-segment speed traces in m/s.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedTrace {
    pub frame_rate: f64,
    pub speeds: BTreeMap<BodySegment, Vec<f64>>,
}

impl SpeedTrace {
    /// Speeds of the given segments; segments missing from the motion are skipped.
    pub fn compute(
        motion: &MotionSequence,
        spec: &FilterSpec,
        segments: &[BodySegment],
    ) -> Result<Self, SignalError> {
        let speeds = std::thread::scope(|s| {
            let handles: Vec<_> = segments
                .iter()
                .filter_map(|&seg| motion.trajectory(seg).map(|t| (seg, t)))
                .map(|(seg, t)| s.spawn(move || speed_of(t, motion.frame_rate(), spec).map(|v| (seg, v))))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("speed worker panicked"))
                .collect::<Result<BTreeMap<_, _>, _>>()
        })?;
        Ok(SpeedTrace {
            frame_rate: motion.frame_rate(),
            speeds,
        })
    }

    pub fn end_effectors(motion: &MotionSequence, spec: &FilterSpec) -> Result<Self, SignalError> {
        Self::compute(motion, spec, &BodySegment::END_EFFECTORS)
    }

    pub fn get(&self, segment: BodySegment) -> Option<&[f64]> {
        self.speeds.get(&segment).map(Vec::as_slice)
    }

    /// `frame,RightFoot,LeftFoot,RightHand,LeftHand` with six decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("frame");
        let cols: Vec<(&BodySegment, &Vec<f64>)> = BodySegment::END_EFFECTORS
            .iter()
            .filter_map(|s| self.speeds.get_key_value(s))
            .collect();
        for (seg, _) in &cols {
            out.push(',');
            out.push_str(seg.as_str());
        }
        out.push('\n');
        let n = cols.first().map(|(_, v)| v.len()).unwrap_or(0);
        for i in 0..n {
            write!(out, "{i}").unwrap();
            for (_, v) in &cols {
                write!(out, ",{:.6}", v[i]).unwrap();
            }
            out.push('\n');
        }
        out
    }
}
