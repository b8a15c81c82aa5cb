//! Decimation of quantized signals into event trains.
//!
//! A train stores one sample per maximal run of equal levels. The run
//! containing `k = 0` is carried as `initial_level`; each later run is an
//! [`EventSample`] holding its level and the number of clock ticks since the
//! previous kept sample. All tick arithmetic is integral.
//!
//! Two keep policies are supported. [`KeepPolicy::LastOfRun`] keeps the last
//! index of each run, so a kept sample is only emitted once its run is over.
//! [`KeepPolicy::FirstOfRun`] keeps `k_0 = 0` and then the first index where
//! the level changes. Both keep the same number of samples; only the
//! timestamps differ.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::grid::DyadicGrid;
use crate::quantize::{QuantizationConfig, QuantizedSignal};
use crate::signal::UniformSignal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum KeepPolicy {
    #[default]
    LastOfRun,
    FirstOfRun,
}

/// One kept sample: delay in ticks since the previous kept sample and the
/// level index of its amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EventSample {
    pub delta_ticks: u64,
    pub level: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventTrain {
    grid: DyadicGrid,
    config: QuantizationConfig,
    policy: KeepPolicy,
    initial_level: i64,
    events: Vec<EventSample>,
}

impl EventTrain {
    /// Validates and assembles a train.
    ///
    /// Every delay must be at least one tick, consecutive events must carry
    /// distinct levels, all levels must fit the M-bit register, and the
    /// total delay must fit inside the `2^j` ticks of the grid.
    pub fn new(
        grid: DyadicGrid,
        config: QuantizationConfig,
        policy: KeepPolicy,
        initial_level: i64,
        events: Vec<EventSample>,
    ) -> Result<Self> {
        let in_register = |l: i64| (0..config.levels()).contains(&l);
        if !in_register(initial_level) {
            return Err(Error::Corrupt(format!(
                "initial level {initial_level} outside 0..{}",
                config.levels()
            )));
        }
        let mut total: u64 = 0;
        for (i, e) in events.iter().enumerate() {
            if e.delta_ticks == 0 {
                return Err(Error::Corrupt(format!("event {i} has zero delay")));
            }
            if !in_register(e.level) {
                return Err(Error::Corrupt(format!(
                    "event {i} level {} outside 0..{}",
                    e.level,
                    config.levels()
                )));
            }
            if i > 0 && events[i - 1].level == e.level {
                return Err(Error::Corrupt(format!(
                    "events {} and {i} repeat level {}",
                    i - 1,
                    e.level
                )));
            }
            total = total.saturating_add(e.delta_ticks);
        }
        let span = grid.len() as u64 - 1;
        if total > span {
            return Err(Error::Corrupt(format!(
                "delays sum to {total} ticks but the grid only spans {span}"
            )));
        }
        Ok(Self {
            grid,
            config,
            policy,
            initial_level,
            events,
        })
    }

    pub fn grid(&self) -> DyadicGrid {
        self.grid
    }

    pub fn config(&self) -> QuantizationConfig {
        self.config
    }

    pub fn policy(&self) -> KeepPolicy {
        self.policy
    }

    pub fn initial_level(&self) -> i64 {
        self.initial_level
    }

    pub fn events(&self) -> &[EventSample] {
        &self.events
    }

    /// Total ticks on the grid, `2^j`.
    pub fn total_ticks(&self) -> u64 {
        self.grid.len() as u64
    }

    /// Grid index of the first kept sample.
    pub fn first_index(&self) -> u64 {
        match self.policy {
            KeepPolicy::FirstOfRun => 0,
            KeepPolicy::LastOfRun => self.total_ticks() - 1 - self.delay_sum(),
        }
    }

    /// Grid indices of all kept samples, initial sample included.
    pub fn kept_indices(&self) -> Vec<u64> {
        let mut k = self.first_index();
        let mut out = Vec::with_capacity(self.events.len() + 1);
        out.push(k);
        for e in &self.events {
            k += e.delta_ticks;
            out.push(k);
        }
        out
    }

    /// Kept samples as `(time, amplitude)` pairs, for display.
    pub fn timed_samples(&self) -> Vec<(f64, f64)> {
        let levels = std::iter::once(self.initial_level).chain(self.events.iter().map(|e| e.level));
        self.kept_indices()
            .into_iter()
            .zip(levels)
            .map(|(k, l)| (self.grid.point(k as usize), self.config.amplitude(l)))
            .collect()
    }

    fn delay_sum(&self) -> u64 {
        self.events.iter().map(|e| e.delta_ticks).sum()
    }

    /// Text form: `j=<int> M=<int> level0=<int>` then `<delta> <level>` per
    /// line. First-of-run trains add a trailing `policy=first` to the header.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        write!(
            w,
            "j={} M={} level0={}",
            self.grid.scale(),
            self.config.bits(),
            self.initial_level
        )?;
        if self.policy == KeepPolicy::FirstOfRun {
            write!(w, " policy=first")?;
        }
        writeln!(w)?;
        for e in &self.events {
            writeln!(w, "{} {}", e.delta_ticks, e.level)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let header = header?;
        let (mut j, mut m, mut level0) = (None, None, None);
        let mut policy = KeepPolicy::LastOfRun;
        for tok in header.split_whitespace() {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| Error::parse(1, format!("malformed header token `{tok}`")))?;
            let bad = || Error::parse(1, format!("invalid value in `{tok}`"));
            match key {
                "j" => j = Some(value.parse::<u32>().map_err(|_| bad())?),
                "M" => m = Some(value.parse::<u32>().map_err(|_| bad())?),
                "level0" => level0 = Some(value.parse::<i64>().map_err(|_| bad())?),
                "policy" => {
                    policy = match value {
                        "first" => KeepPolicy::FirstOfRun,
                        "last" => KeepPolicy::LastOfRun,
                        _ => return Err(bad()),
                    }
                }
                _ => return Err(Error::parse(1, format!("unknown header key `{key}`"))),
            }
        }
        let missing = |k: &str| Error::parse(1, format!("header lacks `{k}=`"));
        let grid = DyadicGrid::new(j.ok_or_else(|| missing("j"))?)?;
        let config = QuantizationConfig::new(m.ok_or_else(|| missing("M"))?)?;
        let initial_level = level0.ok_or_else(|| missing("level0"))?;

        let mut events = Vec::new();
        for (idx, line) in lines {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let mut it = t.split_whitespace();
            let parsed = match (it.next(), it.next(), it.next()) {
                (Some(d), Some(l), None) => d.parse::<u64>().ok().zip(l.parse::<i64>().ok()),
                _ => None,
            };
            let (delta_ticks, level) =
                parsed.ok_or_else(|| Error::parse(idx + 1, format!("expected `<delta> <level>`, found `{t}`")))?;
            events.push(EventSample { delta_ticks, level });
        }
        Self::new(grid, config, policy, initial_level, events)
    }
}

/// Keeps the last sample of each constant-level run.
pub fn decimate(q: &QuantizedSignal) -> Result<EventTrain> {
    decimate_with(q, KeepPolicy::LastOfRun)
}

pub fn decimate_with(q: &QuantizedSignal, policy: KeepPolicy) -> Result<EventTrain> {
    let levels = q.levels();
    if levels.is_empty() {
        return Err(Error::Empty);
    }
    let n = levels.len();
    // Run boundaries: indices k where levels[k] != levels[k-1].
    let starts: Vec<usize> = (1..n).filter(|&k| levels[k] != levels[k - 1]).collect();
    let kept: Vec<usize> = match policy {
        KeepPolicy::FirstOfRun => std::iter::once(0).chain(starts.iter().copied()).collect(),
        KeepPolicy::LastOfRun => starts
            .iter()
            .map(|&s| s - 1)
            .chain(std::iter::once(n - 1))
            .collect(),
    };
    let events = kept
        .windows(2)
        .map(|w| EventSample {
            delta_ticks: (w[1] - w[0]) as u64,
            level: levels[w[1]],
        })
        .collect();
    Ok(EventTrain {
        grid: q.grid(),
        config: q.config(),
        policy,
        initial_level: levels[0],
        events,
    })
}

/// Rebuilds the full level sequence from a train.
pub fn reconstruct(e: &EventTrain) -> Result<QuantizedSignal> {
    let n = e.grid.len();
    let span = n as u64 - 1;
    let total = e.delay_sum();
    if total > span {
        return Err(Error::Corrupt(format!(
            "delays sum to {total} ticks but the grid only spans {span}"
        )));
    }
    let mut levels = Vec::with_capacity(n);
    match e.policy {
        KeepPolicy::LastOfRun => {
            // Each kept index closes its run; the last one must land on n-1.
            let first = (span - total) as usize;
            levels.resize(first + 1, e.initial_level);
            for ev in &e.events {
                levels.resize(levels.len() + ev.delta_ticks as usize, ev.level);
            }
        }
        KeepPolicy::FirstOfRun => {
            let mut current = e.initial_level;
            for ev in &e.events {
                levels.resize(levels.len() + ev.delta_ticks as usize, current);
                current = ev.level;
            }
            levels.resize(n, current);
        }
    }
    debug_assert_eq!(levels.len(), n);
    QuantizedSignal::new(e.grid, e.config, levels)
}

/// Number of kept samples, the initial one included.
pub fn count_samples(e: &EventTrain) -> usize {
    e.events.len() + 1
}

/// `min(2^j, C · 2^(M + (1 - α) j))`, evaluated as `2^j · min(1, C · 2^(M - α j))`.
pub fn worst_case_bound(j: u32, m: u32, alpha: f64, c: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("Hölder exponent {alpha} outside (0, 1]")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::domain(format!("constant C={c} must be positive")));
    }
    let full = 2f64.powi(j as i32);
    Ok(full * 1f64.min(c * (m as f64 - alpha * j as f64).exp2()))
}

/// Simulates an asynchronous ADC watching the linear interpolant of `s`.
///
/// Whenever the interpolant crosses one or more level lines between ticks
/// `k-1` and `k`, a sample is taken at tick `k` carrying the last line
/// crossed: `floor(2^M f_k)` when rising, `floor(2^M f_k) + 1` when falling.
/// A line that is only touched, with no change of floor level between the
/// two ticks, does not count. Consecutive samples on the same line are then
/// collapsed to the last one. The returned train uses first-of-run timing:
/// each sample holds from its tick onward.
pub fn aadc_sample(s: &UniformSignal, cfg: QuantizationConfig) -> Result<EventTrain> {
    let q = crate::quantize::quantize(s, cfg)?;
    let levels = q.levels();
    if levels.is_empty() {
        return Err(Error::Empty);
    }
    let mut raw: Vec<(usize, i64)> = Vec::new();
    for k in 1..levels.len() {
        let (prev, cur) = (levels[k - 1], levels[k]);
        if cur > prev {
            raw.push((k, cur));
        } else if cur < prev {
            raw.push((k, cur + 1));
        }
    }
    let mut kept: Vec<(usize, i64)> = Vec::with_capacity(raw.len());
    for (i, &(k, l)) in raw.iter().enumerate() {
        let repeated_next = raw.get(i + 1).is_some_and(|&(_, nl)| nl == l);
        if !repeated_next {
            kept.push((k, l));
        }
    }
    let mut prev = 0usize;
    let events = kept
        .into_iter()
        .map(|(k, level)| {
            let ev = EventSample {
                delta_ticks: (k - prev) as u64,
                level,
            };
            prev = k;
            ev
        })
        .collect();
    EventTrain::new(q.grid(), cfg, KeepPolicy::FirstOfRun, levels[0], events)
}
