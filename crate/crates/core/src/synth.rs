//! Seeded synthetic edit streams with planted behavioral parameters.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`)
//! and is consumed only through [`Draw`], which turns each 64-bit output
//! into a uniform `f64` in `[0, 1)` from its top 53 bits. Together with the
//! fixed draw order below this makes a `(config, seed)` pair reproduce the
//! same stream on every platform.
//!
//! Per page, the draw order is: page length (geometric only), page start
//! time, first editor; then for each later edit: the self-loop coin, the
//! return coin (if no self-loop), a fresh editor (if neither), the
//! fast-gap coin and the gap itself. Editor anonymity is drawn once per
//! editor, before any page.

use std::collections::HashMap;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{EditEvent, EditStream};

/// Slow gaps are drawn from `(window, SLOW_GAP_SPAN · window]`.
pub const SLOW_GAP_SPAN: u64 = 24;

/// Page histories start within this many seconds after [`EPOCH_BASE`].
const START_SPREAD: u64 = 365 * 24 * 3600;
const EPOCH_BASE: u64 = 1_000_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("{0} must lie in [0, 1], got {1}")]
    Probability(&'static str, f64),
    #[error("{0} must be at least 1")]
    Count(&'static str),
    #[error("mean events per page must be finite and at least 1, got {0}")]
    GeometricMean(f64),
    #[error("activity skew must be finite and non-negative, got {0}")]
    Skew(f64),
    #[error("at most {max} editors are supported, got {got}")]
    TooManyEditors { max: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EventsPerPage {
    Fixed { count: u32 },
    /// Geometric on `{1, 2, …}` with the given mean.
    Geometric { mean: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub pages: u32,
    pub events_per_page: EventsPerPage,
    pub editors: u32,
    /// Probability that an edit repeats the page's previous editor.
    pub p_self_loop: f64,
    /// Probability that a non-self-loop edit goes to the partner of the
    /// page's most frequent dyad so far.
    pub p_return: f64,
    /// Per-editor probability of being unregistered.
    pub p_anonymous: f64,
    /// Probability that an inter-edit gap is at most `window`.
    pub gap_fast: f64,
    /// Seconds.
    pub window: u64,
    /// Zipf exponent over editor rank for fresh editor draws.
    pub activity_skew: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            pages: 100,
            events_per_page: EventsPerPage::Fixed { count: 20 },
            editors: 500,
            p_self_loop: 0.5,
            p_return: 0.3,
            p_anonymous: 0.3,
            gap_fast: 0.7,
            window: 3600,
            activity_skew: 1.0,
            seed: 42,
        }
    }
}

// 10.x.y.z addresses cover 2^24 editors
const MAX_EDITORS: usize = 1 << 24;

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        for (name, p) in [
            ("p_self_loop", self.p_self_loop),
            ("p_return", self.p_return),
            ("p_anonymous", self.p_anonymous),
            ("gap_fast", self.gap_fast),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SynthError::Probability(name, p));
            }
        }
        if self.pages == 0 {
            return Err(SynthError::Count("pages"));
        }
        if self.editors == 0 {
            return Err(SynthError::Count("editors"));
        }
        if self.editors as usize > MAX_EDITORS {
            return Err(SynthError::TooManyEditors {
                max: MAX_EDITORS,
                got: self.editors as usize,
            });
        }
        if self.window == 0 {
            return Err(SynthError::Count("window"));
        }
        match self.events_per_page {
            EventsPerPage::Fixed { count: 0 } => return Err(SynthError::Count("events_per_page")),
            EventsPerPage::Geometric { mean } if !(mean.is_finite() && mean >= 1.0) => {
                return Err(SynthError::GeometricMean(mean))
            }
            _ => {}
        }
        if !(self.activity_skew.is_finite() && self.activity_skew >= 0.0) {
            return Err(SynthError::Skew(self.activity_skew));
        }
        Ok(())
    }
}

/// The documented uniform source.
struct Draw(ChaCha8Rng);

impl Draw {
    fn new(seed: u64) -> Self {
        Draw(ChaCha8Rng::seed_from_u64(seed))
    }

    fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn coin(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Uniform integer in `lo..=hi`.
    fn between(&mut self, lo: u64, hi: u64) -> u64 {
        let span = (hi - lo + 1) as f64;
        lo + ((self.uniform() * span) as u64).min(hi - lo)
    }
}

/// Inverse-CDF sampler over ranks `0..n` with weight `(rank+1)^-skew`.
struct Zipf {
    cdf: Vec<f64>,
}

impl Zipf {
    fn new(n: usize, skew: f64) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = (1..=n)
            .map(|r| {
                acc += (r as f64).powf(-skew);
                acc
            })
            .collect();
        for c in &mut cdf {
            *c /= acc;
        }
        Zipf { cdf }
    }

    fn sample(&self, draw: &mut Draw) -> usize {
        let u = draw.uniform();
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }
}

fn editor_name(index: usize, anonymous: bool) -> String {
    if anonymous {
        format!("10.{}.{}.{}", (index >> 16) & 0xff, (index >> 8) & 0xff, index & 0xff)
    } else {
        format!("user{index}")
    }
}

/// Tracks dyad counts on one page and its current most frequent dyad.
#[derive(Default)]
struct PageDyads {
    counts: HashMap<(usize, usize), u32>,
    dominant: Option<((usize, usize), u32)>,
}

impl PageDyads {
    fn record(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let key = (a.min(b), a.max(b));
        let c = self.counts.entry(key).or_insert(0);
        *c += 1;
        // earliest dyad to reach a count keeps the lead on ties
        if self.dominant.is_none_or(|(_, best)| *c > best) {
            self.dominant = Some((key, *c));
        }
    }

    /// The dominant dyad's member other than `prev`; when `prev` is not in
    /// the dyad, its lower-indexed member.
    fn partner(&self, prev: usize) -> Option<usize> {
        let ((a, b), _) = self.dominant?;
        Some(if prev == a { b } else { a })
    }
}

/// Generates a stream; identical `(config, seed)` give identical streams.
pub fn generate(config: &SynthConfig) -> Result<EditStream, SynthError> {
    config.validate()?;
    let mut draw = Draw::new(config.seed);
    let editors = config.editors as usize;
    let anonymous: Vec<bool> = (0..editors).map(|_| draw.coin(config.p_anonymous)).collect();
    let names: Vec<String> = (0..editors).map(|i| editor_name(i, anonymous[i])).collect();
    let zipf = Zipf::new(editors, config.activity_skew);

    let fresh = |draw: &mut Draw, prev: Option<usize>| -> usize {
        if editors == 1 {
            return 0;
        }
        loop {
            let e = zipf.sample(draw);
            if Some(e) != prev {
                return e;
            }
        }
    };

    let mut events = Vec::new();
    for page in 0..config.pages {
        let len = match config.events_per_page {
            EventsPerPage::Fixed { count } => count as u64,
            EventsPerPage::Geometric { mean } => {
                if mean <= 1.0 {
                    1
                } else {
                    let p = 1.0 / mean;
                    // 1 - u is in (0, 1]
                    let u = 1.0 - draw.uniform();
                    1 + (u.ln() / (1.0 - p).ln()).floor() as u64
                }
            }
        };
        let page_id = format!("page{page}");
        let mut t = EPOCH_BASE + draw.between(0, START_SPREAD);
        let mut prev = fresh(&mut draw, None);
        let mut dyads = PageDyads::default();
        events.push(EditEvent {
            page_id: page_id.clone(),
            editor_id: names[prev].clone(),
            timestamp: t,
            anonymous: anonymous[prev],
        });
        for _ in 1..len {
            let editor = if draw.coin(config.p_self_loop) {
                prev
            } else if draw.coin(config.p_return) {
                match dyads.partner(prev) {
                    Some(p) => p,
                    None => fresh(&mut draw, Some(prev)),
                }
            } else {
                fresh(&mut draw, Some(prev))
            };
            let gap = if draw.coin(config.gap_fast) {
                draw.between(0, config.window)
            } else {
                draw.between(config.window + 1, config.window * SLOW_GAP_SPAN)
            };
            t += gap;
            dyads.record(prev, editor);
            events.push(EditEvent {
                page_id: page_id.clone(),
                editor_id: names[editor].clone(),
                timestamp: t,
                anonymous: anonymous[editor],
            });
            prev = editor;
        }
    }
    Ok(EditStream::from_events(events))
}
