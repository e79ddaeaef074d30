//! Exact constellation counting up to a bound.
//!
//! The range `[1, limit]` is cut into segments of `segment_length` numbers.
//! Each segment is sieved together with a lookahead of `span` numbers past its
//! end, and a constellation is attributed to the segment holding its smallest
//! element `p`. Constellations count toward `limit` when `p <= limit`; the
//! other members may lie beyond it.
//!
//! Segments are handed to worker threads through a shared atomic cursor.
//! Per-segment counts are integers merged by addition, so the total does not
//! depend on thread count or completion order. Completed segments advance a
//! contiguous watermark under a mutex, which is also where checkpoints are
//! written.

mod checkpoint;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use checkpoint::{Checkpoint, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};

use crate::error::{Error, Result};
use crate::patterns::OffsetPattern;
use crate::sieve::{self, PrimeSegment, RangeBounds, Sieve, SieveConfig, SieveWindow};

pub use crate::sieve::DEFAULT_SEGMENT_LENGTH;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountJob {
    pattern: OffsetPattern,
    limit: u64,
    segment_length: u64,
}

impl CountJob {
    pub fn new(pattern: OffsetPattern, limit: u64, segment_length: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::domain(format!(
                "limit must be at least 2, got {limit}"
            )));
        }
        if segment_length <= pattern.span() {
            return Err(Error::domain(format!(
                "segment length {segment_length} must exceed the pattern span {}",
                pattern.span()
            )));
        }
        Ok(CountJob {
            pattern,
            limit,
            segment_length,
        })
    }

    /// Job with the default segment length.
    pub fn with_default_segments(pattern: OffsetPattern, limit: u64) -> Result<Self> {
        CountJob::new(pattern, limit, DEFAULT_SEGMENT_LENGTH)
    }

    pub fn pattern(&self) -> &OffsetPattern {
        &self.pattern
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn segment_length(&self) -> u64 {
        self.segment_length
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstellationCount {
    pub job: CountJob,
    pub count: u64,
    /// Segments sieved to produce `count`, including those of earlier runs
    /// restored from a checkpoint.
    pub segments_processed: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Counts constellations whose smallest element lies in `bounds`, given a
/// window that reaches at least `bounds.hi() + span`.
pub fn count_in_window(
    pattern: &OffsetPattern,
    bounds: RangeBounds,
    window: &SieveWindow,
) -> Result<u64> {
    window.count_shifted(bounds.lo(), bounds.hi(), &pattern.half_offsets())
}

/// Like [`count_in_window`] but from an explicit prime list. `extended` must
/// hold every prime of `[bounds.lo(), bounds.hi() + span]`.
pub fn count_in_segment(
    pattern: &OffsetPattern,
    bounds: RangeBounds,
    extended: &PrimeSegment,
) -> Result<u64> {
    let window = SieveWindow::from_segment(extended)?;
    count_in_window(pattern, bounds, &window)
}

#[derive(Debug, Clone)]
pub struct CountOptions {
    pub threads: usize,
    pub checkpoint: Option<PathBuf>,
    /// Write the checkpoint whenever the watermark has advanced by this many
    /// segments since the last write.
    pub checkpoint_every: u64,
    /// Stop after dispatching this many segments in the current run.
    pub halt_after: Option<u64>,
    pub buffer_budget: u64,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            threads: default_threads(),
            checkpoint: None,
            checkpoint_every: 16,
            halt_after: None,
            buffer_budget: sieve::DEFAULT_BUFFER_BUDGET,
        }
    }
}

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CountOutcome {
    Complete(ConstellationCount),
    /// The run stopped early; the checkpoint (if any) holds this state.
    Halted {
        covered_through: u64,
        partial_count: u64,
        segments_processed: u64,
    },
}

/// Counts with default options: all cores, no checkpoint.
pub fn count_up_to(job: &CountJob) -> Result<ConstellationCount> {
    match run(job, &CountOptions::default())? {
        CountOutcome::Complete(c) => Ok(c),
        CountOutcome::Halted { .. } => unreachable!("no halt requested"),
    }
}

/// Counts with explicit options, resuming from `options.checkpoint` when the
/// file exists.
pub fn run(job: &CountJob, options: &CountOptions) -> Result<CountOutcome> {
    let started = Instant::now();
    if options.threads == 0 {
        return Err(Error::domain("thread count must be at least 1"));
    }

    let (covered, prior_count, prior_segments) = match &options.checkpoint {
        Some(path) if path.exists() => {
            let cp = Checkpoint::load(path)?;
            resume_state(&cp, job, path)?
        }
        _ => (0, 0, 0),
    };

    let sieve = Sieve::new(SieveConfig {
        segment_length: job.segment_length,
        buffer_budget: options.buffer_budget,
    })?;

    let segments: Vec<RangeBounds> = if covered >= job.limit {
        Vec::new()
    } else {
        sieve::split(
            RangeBounds::new(covered + 1, job.limit)?,
            job.segment_length,
        )
        .collect()
    };
    let dispatch = match options.halt_after {
        Some(h) => segments.len().min(usize::try_from(h).unwrap_or(usize::MAX)),
        None => segments.len(),
    };

    // Warm the base-prime cache once so workers only read it.
    let span = job.pattern.span();
    sieve.window(RangeBounds::new(job.limit, job.limit + span)?)?;

    let save = |covered_through: u64, segments_done: u64, partial: u64| -> Result<()> {
        match &options.checkpoint {
            Some(path) => Checkpoint::new(
                job.pattern.clone(),
                job.limit,
                job.segment_length,
                covered_through,
                segments_done,
                partial,
            )
            .save(path),
            None => Ok(()),
        }
    };

    let progress = Mutex::new(Progress {
        pending: BTreeMap::new(),
        watermark: 0,
        partial: prior_count,
        last_saved: 0,
        error: None,
    });
    let cursor = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let covered_at = |w: usize| {
        if w == 0 {
            covered
        } else {
            segments[w - 1].hi()
        }
    };

    let worker = || {
        while !abort.load(Ordering::Relaxed) {
            let i = cursor.fetch_add(1, Ordering::Relaxed);
            if i >= dispatch {
                break;
            }
            let bounds = segments[i];
            let result = RangeBounds::new(bounds.lo(), bounds.hi() + span)
                .and_then(|ext| sieve.window(ext))
                .and_then(|window| count_in_window(&job.pattern, bounds, &window));

            let mut guard = progress.lock().expect("progress lock poisoned");
            let p = &mut *guard;
            let n = match result {
                Ok(n) => n,
                Err(e) => {
                    p.error.get_or_insert(e);
                    abort.store(true, Ordering::Relaxed);
                    break;
                }
            };
            p.pending.insert(i, n);
            while let Some(n) = p.pending.remove(&p.watermark) {
                p.partial += n;
                p.watermark += 1;
            }
            if (p.watermark - p.last_saved) as u64 >= options.checkpoint_every.max(1) {
                let w = p.watermark;
                if let Err(e) = save(covered_at(w), prior_segments + w as u64, p.partial) {
                    p.error.get_or_insert(e);
                    abort.store(true, Ordering::Relaxed);
                    break;
                }
                p.last_saved = w;
            }
        }
    };

    let threads = options.threads.min(dispatch.max(1));
    std::thread::scope(|scope| {
        for _ in 1..threads {
            scope.spawn(worker);
        }
        worker();
    });

    let p = progress.into_inner().expect("progress lock poisoned");
    if let Some(e) = p.error {
        return Err(e);
    }
    debug_assert!(p.pending.is_empty());
    let segments_processed = prior_segments + p.watermark as u64;
    let covered_through = covered_at(p.watermark);
    save(covered_through, segments_processed, p.partial)?;

    if covered_through < job.limit {
        return Ok(CountOutcome::Halted {
            covered_through,
            partial_count: p.partial,
            segments_processed,
        });
    }
    Ok(CountOutcome::Complete(ConstellationCount {
        job: job.clone(),
        count: p.partial,
        segments_processed,
        elapsed: started.elapsed(),
    }))
}

struct Progress {
    /// Finished segments not yet contiguous with the watermark.
    pending: BTreeMap<usize, u64>,
    /// Number of leading segments fully merged.
    watermark: usize,
    partial: u64,
    last_saved: usize,
    error: Option<Error>,
}

fn resume_state(
    cp: &Checkpoint,
    job: &CountJob,
    path: &std::path::Path,
) -> Result<(u64, u64, u64)> {
    let integrity = |reason: String| Error::Integrity {
        path: path.to_path_buf(),
        reason,
    };
    if cp.pattern != job.pattern {
        return Err(integrity(format!(
            "checkpoint is for pattern {} but the job counts {}",
            cp.pattern, job.pattern
        )));
    }
    if cp.covered_through > job.limit {
        return Err(integrity(format!(
            "checkpoint already covers {} which is beyond the requested limit {}",
            cp.covered_through, job.limit
        )));
    }
    Ok((cp.covered_through, cp.partial_count, cp.segments_completed))
}
