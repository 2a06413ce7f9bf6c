//! Trigger-driven segmentation of lecture recordings.
//!
//! A recording is modelled by its loudness envelope: one dB level per
//! `sample_period` seconds, sample `i` covering `[i·p, (i+1)·p)`. Slide
//! changes fire triggers; each trigger is moved to the longest speaker pause
//! within `±window` seconds, and the stream is cut at the pause midpoint.
//! Pauses are runs of samples strictly below a watermark: the
//! `watermark_percentile` quantile of the trailing `watermark_window`
//! seconds.

// `!(x > 0)` is used on purpose below: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{approx_eq, lit, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoudnessEnvelope<T> {
    /// Seconds per sample.
    pub sample_period: T,
    /// Loudness levels in dB.
    pub values: Vec<T>,
}

impl<T: Real> LoudnessEnvelope<T> {
    pub fn new(sample_period: T, values: Vec<T>) -> Result<Self> {
        let env = Self { sample_period, values };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_period > T::zero()) || !self.sample_period.is_finite() {
            return Err(Error::InvalidInput(format!(
                "sample period must be positive, got {:?}",
                self.sample_period
            )));
        }
        if self.values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(bad) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite loudness sample {bad:?}")));
        }
        Ok(())
    }

    pub fn duration(&self) -> T {
        self.time_at(self.values.len())
    }

    /// Start time of sample `index`.
    pub fn time_at(&self, index: usize) -> T {
        lit::<T>(index as f64) * self.sample_period
    }

    /// Nearest sample boundary for a time, clamped to the stream.
    fn index_at(&self, time: T) -> usize {
        let raw = (time / self.sample_period).round();
        if raw <= T::zero() {
            0
        } else {
            raw.to_usize().unwrap_or(usize::MAX).min(self.values.len())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriggerEvent<T> {
    /// Seconds from stream start.
    pub time: T,
    /// e.g. `slide-change`
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmenterConfig<T> {
    /// Half-width of the search interval around a trigger, seconds.
    pub window: T,
    /// Shortest silence that counts as a pause, seconds.
    pub min_pause: T,
    /// Length of the trailing window the watermark is computed over, seconds.
    pub watermark_window: T,
    /// Quantile of the trailing window used as the watermark.
    pub watermark_percentile: T,
    /// Target RMS level of speech after normalization, dB.
    pub target_rms: T,
    /// Longest pause kept by normalization, seconds.
    pub max_pause: T,
}

impl<T: Real> Default for SegmenterConfig<T> {
    fn default() -> Self {
        Self {
            window: lit(10.0),
            min_pause: lit(0.5),
            watermark_window: lit(60.0),
            watermark_percentile: lit(0.2),
            target_rms: lit(-20.0),
            max_pause: lit(1.0),
        }
    }
}

impl<T: Real> SegmenterConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidConfig(msg.to_owned()));
        if !(self.window > T::zero()) {
            return fail("window must be positive");
        }
        if !(self.min_pause > T::zero()) || self.min_pause > self.window {
            return fail("min_pause must lie in (0, window]");
        }
        if !(self.watermark_window > T::zero()) {
            return fail("watermark_window must be positive");
        }
        if !(self.watermark_percentile > T::zero() && self.watermark_percentile < T::one()) {
            return fail("watermark_percentile must lie in (0, 1)");
        }
        if !(self.max_pause > T::zero()) {
            return fail("max_pause must be positive");
        }
        if !self.target_rms.is_finite() {
            return fail("target_rms must be finite");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pause<T> {
    pub start: T,
    pub end: T,
}

impl<T: Real> Pause<T> {
    pub fn duration(&self) -> T {
        self.end - self.start
    }

    pub fn midpoint(&self) -> T {
        (self.start + self.end) / lit(2.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment<T> {
    pub start: T,
    pub end: T,
    /// Index of the trigger whose cut opens this segment; `None` for the
    /// segment starting the stream.
    pub trigger: Option<usize>,
}

fn at_least<T: Real>(value: T, bound: T) -> bool {
    value >= bound || approx_eq(value, bound)
}

/// Per-sample watermark: the configured quantile of the trailing window.
pub fn watermarks<T: Real>(env: &LoudnessEnvelope<T>, config: &SegmenterConfig<T>) -> Result<Vec<T>> {
    env.validate()?;
    config.validate()?;
    let span = (config.watermark_window / env.sample_period)
        .floor()
        .to_usize()
        .unwrap_or(usize::MAX)
        .max(1);
    let mut window: Vec<T> = Vec::new();
    let mut out = Vec::with_capacity(env.values.len());
    for (i, &value) in env.values.iter().enumerate() {
        let at = window.partition_point(|x| *x < value);
        window.insert(at, value);
        if i >= span {
            // drop the sample that left the trailing window
            let leaving = env.values[i - span];
            let at = window.partition_point(|x| *x < leaving);
            window.remove(at);
        }
        let rank = (config.watermark_percentile * lit::<T>((window.len() - 1) as f64))
            .floor()
            .to_usize()
            .unwrap_or(0);
        out.push(window[rank]);
    }
    Ok(out)
}

/// Maximal runs of samples strictly below the watermark lasting at least
/// `min_pause`, in time order.
#[allow(clippy::needless_range_loop)]
pub fn detect_pauses<T: Real>(env: &LoudnessEnvelope<T>, config: &SegmenterConfig<T>) -> Result<Vec<Pause<T>>> {
    let marks = watermarks(env, config)?;
    let mut pauses = Vec::new();
    let mut run_start = None;
    for i in 0..=env.values.len() {
        let quiet = i < env.values.len() && env.values[i] < marks[i];
        match (quiet, run_start) {
            (true, None) => run_start = Some(i),
            (false, Some(start)) => {
                let pause = Pause {
                    start: env.time_at(start),
                    end: env.time_at(i),
                };
                if at_least(pause.duration(), config.min_pause) {
                    pauses.push(pause);
                }
                run_start = None;
            }
            _ => {}
        }
    }
    Ok(pauses)
}

/// Cut time for one trigger: the midpoint of the longest qualifying pause
/// meeting `[time - window, time + window]`; ties go to the pause nearest the
/// trigger, then the earliest. Without a qualifying pause the trigger time
/// itself is used.
pub fn select_cut<T: Real>(trigger: &TriggerEvent<T>, pauses: &[Pause<T>], config: &SegmenterConfig<T>) -> T {
    let lo = trigger.time - config.window;
    let hi = trigger.time + config.window;
    let mut best: Option<&Pause<T>> = None;
    for pause in pauses {
        if pause.end < lo || pause.start > hi || !at_least(pause.duration(), config.min_pause) {
            continue;
        }
        let better = match best {
            None => true,
            Some(current) => {
                let (d, dc) = (pause.duration(), current.duration());
                if !approx_eq(d, dc) {
                    d > dc
                } else {
                    let (n, nc) = (
                        (pause.midpoint() - trigger.time).abs(),
                        (current.midpoint() - trigger.time).abs(),
                    );
                    if !approx_eq(n, nc) {
                        n < nc
                    } else {
                        pause.start < current.start
                    }
                }
            }
        };
        if better {
            best = Some(pause);
        }
    }
    best.map_or(trigger.time, Pause::midpoint)
}

/// Splits the stream at the cut of every trigger.
///
/// Segments tile `[0, duration)`; coinciding cuts collapse into one and
/// zero-length segments are dropped.
pub fn segment<T: Real>(
    env: &LoudnessEnvelope<T>,
    triggers: &[TriggerEvent<T>],
    config: &SegmenterConfig<T>,
) -> Result<Vec<Segment<T>>> {
    let pauses = detect_pauses(env, config)?;
    let duration = env.duration();
    for pair in triggers.windows(2) {
        if pair[1].time < pair[0].time {
            return Err(Error::InvalidInput("triggers must be sorted by time".into()));
        }
    }
    if let Some(t) = triggers.iter().find(|t| !(t.time >= T::zero() && at_least(duration, t.time))) {
        return Err(Error::InvalidInput(format!("trigger at {:?} lies outside the stream", t.time)));
    }
    let mut cuts: Vec<(T, usize)> = triggers
        .iter()
        .enumerate()
        .map(|(i, t)| (select_cut(t, &pauses, config).max(T::zero()).min(duration), i))
        .collect();
    cuts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite cuts"));
    cuts.dedup_by(|later, earlier| approx_eq(later.0, earlier.0));

    let mut segments = Vec::with_capacity(cuts.len() + 1);
    let mut start = T::zero();
    let mut opened_by = None;
    for (cut, trigger) in cuts {
        if !approx_eq(cut, start) {
            segments.push(Segment {
                start,
                end: cut,
                trigger: opened_by,
            });
        }
        start = cut;
        opened_by = Some(trigger);
    }
    if !approx_eq(duration, start) {
        segments.push(Segment {
            start,
            end: duration,
            trigger: opened_by,
        });
    }
    Ok(segments)
}

/// RMS level of dB samples: `10·log10(mean(10^(v/10)))`.
pub fn rms_db<T: Real>(values: &[T]) -> Option<T> {
    let peak = values.iter().copied().fold(None, |m: Option<T>, v| Some(m.map_or(v, |m| m.max(v))))?;
    let ten: T = lit(10.0);
    let mean = values
        .iter()
        .map(|&v| ten.powf((v - peak) / ten))
        .fold(T::zero(), |a, b| a + b)
        / lit::<T>(values.len() as f64);
    Some(peak + ten * mean.log10())
}

/// Output of [`normalize`]: the rescaled envelope and where the given pauses
/// ended up in it.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized<T> {
    pub envelope: LoudnessEnvelope<T>,
    pub pauses: Vec<Pause<T>>,
}

/// Evens out volume and rhythm: speech samples get one dB offset bringing
/// their RMS to `target_rms`, and pauses longer than `max_pause` lose
/// interior samples until they last `max_pause`.
pub fn normalize<T: Real>(
    env: &LoudnessEnvelope<T>,
    pauses: &[Pause<T>],
    config: &SegmenterConfig<T>,
) -> Result<Normalized<T>> {
    env.validate()?;
    config.validate()?;
    let mut ranges: Vec<(usize, usize)> = pauses
        .iter()
        .map(|p| (env.index_at(p.start), env.index_at(p.end)))
        .filter(|(s, e)| s < e)
        .collect();
    ranges.sort_unstable();
    // overlapping pauses merge
    let mut merged: Vec<(usize, usize)> = Vec::with_capacity(ranges.len());
    for (s, e) in ranges {
        match merged.last_mut() {
            Some(last) if s <= last.1 => last.1 = last.1.max(e),
            _ => merged.push((s, e)),
        }
    }

    let mut in_pause = vec![false; env.values.len()];
    for &(s, e) in &merged {
        in_pause[s..e].iter_mut().for_each(|f| *f = true);
    }
    let speech: Vec<T> = env
        .values
        .iter()
        .zip(&in_pause)
        .filter(|(_, p)| !**p)
        .map(|(v, _)| *v)
        .collect();
    let offset = match rms_db(&speech) {
        Some(rms) if (config.target_rms - rms).abs() > lit(1e-9) => config.target_rms - rms,
        _ => T::zero(),
    };
    let keep = (config.max_pause / env.sample_period)
        .round()
        .to_usize()
        .unwrap_or(usize::MAX)
        .max(1);

    let mut values = Vec::with_capacity(env.values.len());
    let mut out_pauses = Vec::with_capacity(merged.len());
    let mut cursor = 0;
    for &(s, e) in &merged {
        values.extend(env.values[cursor..s].iter().map(|&v| v + offset));
        let begin = values.len();
        let len = e - s;
        if len > keep {
            let head = keep / 2;
            let tail = keep - head;
            values.extend_from_slice(&env.values[s..s + head]);
            values.extend_from_slice(&env.values[e - tail..e]);
        } else {
            values.extend_from_slice(&env.values[s..e]);
        }
        out_pauses.push((begin, values.len()));
        cursor = e;
    }
    values.extend(env.values[cursor..].iter().map(|&v| v + offset));

    let envelope = LoudnessEnvelope {
        sample_period: env.sample_period,
        values,
    };
    let pauses = out_pauses
        .into_iter()
        .map(|(s, e)| Pause {
            start: envelope.time_at(s),
            end: envelope.time_at(e),
        })
        .collect();
    Ok(Normalized { envelope, pauses })
}
