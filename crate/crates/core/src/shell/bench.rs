use std::collections::VecDeque;
use std::io::Write;
use std::sync::atomic::{AtomicBool, Ordering};
use std::thread;
use std::time::{Duration, Instant};

use sysinfo::{Pid, System};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("moving-average window must be at least 1")]
    ZeroWindow,
    #[error("sampling interval must be positive")]
    ZeroInterval,
    #[error("process {0} not found")]
    NoProcess(u32),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Mean of the last `window` values; undefined until the window fills.
#[derive(Debug, Clone)]
pub struct MovingAverage {
    window: usize,
    values: VecDeque<f64>,
}

impl MovingAverage {
    pub fn new(window: usize) -> Self {
        Self {
            window,
            values: VecDeque::with_capacity(window),
        }
    }

    pub fn push(&mut self, v: f64) -> Option<f64> {
        if self.values.len() == self.window {
            self.values.pop_front();
        }
        self.values.push_back(v);
        (self.values.len() == self.window).then(|| self.values.iter().sum::<f64>() / self.window as f64)
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    /// Seconds since sampling began.
    pub timestamp: f64,
    pub rss_bytes: u64,
    pub cpu_pct: f32,
    pub rss_ma: Option<f64>,
    pub cpu_pct_ma: Option<f64>,
}

impl BenchRow {
    fn record(&self) -> [String; 5] {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_default();
        [
            format!("{:.3}", self.timestamp),
            self.rss_bytes.to_string(),
            format!("{:.2}", self.cpu_pct),
            opt(self.rss_ma),
            opt(self.cpu_pct_ma),
        ]
    }
}

/// Samples resident memory and CPU of `pid` every `interval`, writing CSV
/// rows to `out` as they are taken. Stops when the process exits, `duration`
/// elapses, or `stop` is set. Rows already written stay valid.
pub fn bench_sample<W: Write>(
    pid: u32,
    interval: Duration,
    window: usize,
    duration: Option<Duration>,
    stop: &AtomicBool,
    out: W,
) -> Result<Vec<BenchRow>, BenchError> {
    if window == 0 {
        return Err(BenchError::ZeroWindow);
    }
    if interval.is_zero() {
        return Err(BenchError::ZeroInterval);
    }
    let pid_s = Pid::from_u32(pid);
    let mut sys = System::new();
    if !sys.refresh_process(pid_s) {
        return Err(BenchError::NoProcess(pid));
    }
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(["timestamp", "rss_bytes", "cpu_pct", "rss_ma", "cpu_pct_ma"])?;
    csv.flush().map_err(csv::Error::from)?;
    let (mut rss_ma, mut cpu_ma) = (MovingAverage::new(window), MovingAverage::new(window));
    let mut rows = Vec::new();
    let start = Instant::now();
    for i in 1u32.. {
        let due = start + interval * i;
        while Instant::now() < due {
            if stop.load(Ordering::SeqCst) {
                return Ok(rows);
            }
            thread::sleep((due - Instant::now()).min(Duration::from_millis(50)));
        }
        if duration.is_some_and(|d| start.elapsed() > d + interval / 2) {
            break;
        }
        if !sys.refresh_process(pid_s) {
            break;
        }
        let Some(proc_) = sys.process(pid_s) else { break };
        let (rss, cpu) = (proc_.memory(), proc_.cpu_usage());
        let row = BenchRow {
            timestamp: start.elapsed().as_secs_f64(),
            rss_bytes: rss,
            cpu_pct: cpu,
            rss_ma: rss_ma.push(rss as f64),
            cpu_pct_ma: cpu_ma.push(cpu as f64),
        };
        csv.write_record(row.record())?;
        csv.flush().map_err(csv::Error::from)?;
        rows.push(row);
    }
    Ok(rows)
}
