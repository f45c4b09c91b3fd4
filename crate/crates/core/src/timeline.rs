//! Busy/free bookkeeping for a single capacity-1 resource.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::model::{Interval, EPS};

/// Sorted, pairwise-disjoint busy intervals inside a horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteTimeline {
    horizon: Interval,
    busy: Vec<Interval>,
}

impl SiteTimeline {
    pub fn new(horizon: Interval) -> Self {
        Self {
            horizon,
            busy: Vec::new(),
        }
    }

    pub fn horizon(&self) -> Interval {
        self.horizon
    }

    pub fn busy(&self) -> &[Interval] {
        &self.busy
    }

    /// Free time of the resource inside `query`, clipped to the horizon.
    pub fn free_time(&self, query: &Interval) -> f64 {
        let total = query.overlap(&self.horizon);
        let used: f64 = self.busy.iter().map(|b| b.overlap(query)).sum();
        (total - used).max(0.0)
    }

    /// True if `span` lies in the horizon and touches no busy interval.
    pub fn is_free(&self, span: &Interval) -> bool {
        span.within(&self.horizon) && self.first_conflict(span).is_none()
    }

    fn first_conflict(&self, span: &Interval) -> Option<&Interval> {
        if span.is_empty() {
            return None;
        }
        // busy is sorted by start; skip everything that ends before the span.
        let from = self.busy.partition_point(|b| b.end <= span.start + EPS);
        self.busy[from..]
            .iter()
            .take_while(|b| b.start < span.end - EPS)
            .find(|b| b.conflicts(span))
    }

    /// Marks `span` busy. Fails with the conflicting interval if any part of
    /// `span` is already taken. Zero-length spans are accepted and ignored.
    pub fn mark_busy(&mut self, span: Interval) -> Result<(), Interval> {
        if let Some(c) = self.first_conflict(&span) {
            return Err(*c);
        }
        if span.is_empty() {
            return Ok(());
        }
        let at = self.busy.partition_point(|b| b.start < span.start);
        self.busy.insert(at, span);
        // Coalesce with touching neighbours.
        if at + 1 < self.busy.len() && self.busy[at + 1].start <= self.busy[at].end + EPS {
            self.busy[at].end = self.busy[at].end.max(self.busy[at + 1].end);
            self.busy.remove(at + 1);
        }
        if at > 0 && self.busy[at].start <= self.busy[at - 1].end + EPS {
            self.busy[at - 1].end = self.busy[at - 1].end.max(self.busy[at].end);
            self.busy.remove(at);
        }
        Ok(())
    }
}

/// Earliest `t >= from` such that `[t, t + len]` is free on every timeline and
/// `t + len <= deadline`.
pub fn earliest_common_fit(timelines: &[&SiteTimeline], from: f64, len: f64, deadline: f64) -> Option<f64> {
    let mut t = from;
    loop {
        if t + len > deadline + EPS {
            return None;
        }
        let span = Interval::new(t, t + len);
        let blocker = timelines
            .iter()
            .filter_map(|tl| tl.first_conflict(&span))
            .map(|b| b.end)
            .fold(None, |acc: Option<f64>, e| Some(acc.map_or(e, |a| a.max(e))));
        match blocker {
            Some(end) => t = end,
            None => return Some(t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b)
    }

    #[test]
    fn free_time_subtracts_busy() {
        let mut tl = SiteTimeline::new(iv(0.0, 10.0));
        tl.mark_busy(iv(2.0, 4.0)).unwrap();
        tl.mark_busy(iv(6.0, 7.0)).unwrap();
        assert_eq!(tl.free_time(&iv(0.0, 10.0)), 7.0);
        assert_eq!(tl.free_time(&iv(3.0, 6.5)), 2.0);
        assert_eq!(tl.free_time(&iv(-5.0, 1.0)), 1.0);
    }

    #[test]
    fn overlapping_mark_is_refused() {
        let mut tl = SiteTimeline::new(iv(0.0, 10.0));
        tl.mark_busy(iv(2.0, 4.0)).unwrap();
        assert_eq!(tl.mark_busy(iv(3.0, 5.0)), Err(iv(2.0, 4.0)));
        tl.mark_busy(iv(4.0, 5.0)).unwrap();
        assert_eq!(tl.busy(), &[iv(2.0, 5.0)]);
    }

    #[test]
    fn common_fit_scans_past_both_timelines() {
        let mut a = SiteTimeline::new(iv(0.0, 20.0));
        let mut b = SiteTimeline::new(iv(0.0, 20.0));
        a.mark_busy(iv(0.0, 2.0)).unwrap();
        b.mark_busy(iv(3.0, 5.0)).unwrap();
        assert_eq!(earliest_common_fit(&[&a, &b], 0.0, 1.0, 20.0), Some(2.0));
        assert_eq!(earliest_common_fit(&[&a, &b], 0.0, 2.0, 20.0), Some(5.0));
        assert_eq!(earliest_common_fit(&[&a, &b], 0.0, 2.0, 6.0), None);
        assert_eq!(earliest_common_fit(&[&a, &b], 0.0, 0.0, 0.0), Some(0.0));
    }

    proptest! {
        #[test]
        fn free_time_never_increases(spans in proptest::collection::vec((0.0..100.0f64, 0.1..10.0f64), 1..20),
                                     q in (0.0..100.0f64, 0.0..50.0f64)) {
            let mut tl = SiteTimeline::new(iv(0.0, 120.0));
            let query = iv(q.0, q.0 + q.1);
            let mut last = tl.free_time(&query);
            prop_assert!(last >= 0.0);
            for (s, l) in spans {
                let _ = tl.mark_busy(iv(s, s + l));
                let now = tl.free_time(&query);
                prop_assert!(now <= last + EPS);
                prop_assert!(now >= 0.0);
                last = now;
            }
            for w in tl.busy().windows(2) {
                prop_assert!(w[0].end < w[1].start);
            }
        }
    }
}
