//! Paced frame replay through a bounded queue.
//!
//! A producer thread releases frames on an absolute schedule (frame `i` at
//! `i / rate_hz` seconds after start, so timing errors do not accumulate) into
//! a FIFO holding at most [`REPLAY_BUFFER_FRAMES`] frames. When the consumer
//! falls behind, the oldest queued frame is dropped; the producer never
//! blocks, which is how a live interrogator behaves. The consumer runs on the
//! caller's thread and hands each surviving frame to the sink in order.

use std::collections::VecDeque;
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::simulator::{Frame, FrameSeries};

/// Queue capacity, in frames. Matches a small interrogator-side buffer.
pub const REPLAY_BUFFER_FRAMES: usize = 3;

/// Outcome of a replay run.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayReport {
    /// Frames delivered to the sink without error.
    pub frames_emitted: usize,
    /// Frames discarded because the queue was full.
    pub frames_dropped: usize,
    /// Wall-clock duration of the whole run in seconds.
    pub elapsed_s: f64,
    /// Mean absolute difference between scheduled and actual release, ms.
    pub mean_abs_jitter_ms: f64,
    /// Worst-case release jitter, ms.
    pub max_abs_jitter_ms: f64,
    /// First sink failure, if any. Replay stops at the first sink error.
    pub sink_error: Option<String>,
}

struct Shared {
    queue: VecDeque<(usize, Frame)>,
    producer_done: bool,
    abort: bool,
    dropped: usize,
    jitter_ms: Vec<f64>,
}

/// Replay `series` at `rate_hz` frames per second, feeding each frame to
/// `sink` in index order. Returns once every frame has been released and the
/// queue drained, or earlier if the sink fails.
pub fn replay<F>(series: &FrameSeries, rate_hz: f64, mut sink: F) -> Result<ReplayReport>
where
    F: FnMut(usize, &Frame) -> Result<()>,
{
    series.validate()?;
    if !rate_hz.is_finite() || rate_hz <= 0.0 {
        return Err(Error::domain(format!(
            "replay rate must be positive and finite, got {rate_hz}"
        )));
    }
    let shared = Mutex::new(Shared {
        queue: VecDeque::with_capacity(REPLAY_BUFFER_FRAMES),
        producer_done: false,
        abort: false,
        dropped: 0,
        jitter_ms: Vec::with_capacity(series.frames.len()),
    });
    let ready = Condvar::new();
    let start = Instant::now();

    let mut emitted = 0usize;
    let mut sink_error: Option<String> = None;

    std::thread::scope(|scope| {
        scope.spawn(|| {
            for (idx, frame) in series.frames.iter().enumerate() {
                let target = start + Duration::from_secs_f64(idx as f64 / rate_hz);
                let now = Instant::now();
                if now < target {
                    std::thread::sleep(target - now);
                }
                let mut state = shared.lock().expect("replay lock poisoned");
                if state.abort {
                    break;
                }
                let jitter = Instant::now().saturating_duration_since(target);
                state.jitter_ms.push(jitter.as_secs_f64() * 1e3);
                if state.queue.len() == REPLAY_BUFFER_FRAMES {
                    state.queue.pop_front();
                    state.dropped += 1;
                }
                state.queue.push_back((idx, frame.clone()));
                drop(state);
                ready.notify_one();
            }
            let mut state = shared.lock().expect("replay lock poisoned");
            state.producer_done = true;
            drop(state);
            ready.notify_one();
        });

        loop {
            let mut state = shared.lock().expect("replay lock poisoned");
            while state.queue.is_empty() && !state.producer_done {
                state = ready.wait(state).expect("replay lock poisoned");
            }
            let item = state.queue.pop_front();
            let done = state.producer_done;
            drop(state);
            match item {
                Some((idx, frame)) => match sink(idx, &frame) {
                    Ok(()) => emitted += 1,
                    Err(e) => {
                        sink_error = Some(e.to_string());
                        shared.lock().expect("replay lock poisoned").abort = true;
                        ready.notify_one();
                        break;
                    }
                },
                None if done => break,
                None => {}
            }
        }
    });

    let state = shared.into_inner().expect("replay lock poisoned");
    let elapsed_s = start.elapsed().as_secs_f64();
    let (mean_abs_jitter_ms, max_abs_jitter_ms) = if state.jitter_ms.is_empty() {
        (0.0, 0.0)
    } else {
        let sum: f64 = state.jitter_ms.iter().map(|j| j.abs()).sum();
        let max = state
            .jitter_ms
            .iter()
            .map(|j| j.abs())
            .fold(0.0_f64, f64::max);
        (sum / state.jitter_ms.len() as f64, max)
    };
    Ok(ReplayReport {
        frames_emitted: emitted,
        frames_dropped: state.dropped,
        elapsed_s,
        mean_abs_jitter_ms,
        max_abs_jitter_ms,
        sink_error,
    })
}

// ====================================================================
// Tests
// ====================================================================
