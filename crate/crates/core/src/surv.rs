//! Two-sample right-censored data model: subjects, risk/event tables and the
//! pooled left-continuous Kaplan-Meier CDF.

use crate::error::{Error, Result};

/// One observed right-censored record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Subject {
    /// Observed time (event or censoring), in study time units.
    pub time: f64,
    /// `true` if the event was observed, `false` if censored.
    pub event: bool,
    /// Group label, 0 or 1.
    pub group: u8,
}

impl Subject {
    pub fn new(time: f64, event: bool, group: u8) -> Result<Self> {
        if !time.is_finite() || time < 0.0 {
            return Err(Error::Domain(format!("subject time must be finite and >= 0, got {time}")));
        }
        if group > 1 {
            return Err(Error::Domain(format!("group must be 0 or 1, got {group}")));
        }
        Ok(Self { time, event, group })
    }
}

/// Counts at one pooled distinct event time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRow {
    pub time: f64,
    /// At-risk counts per group ("observed time >= t").
    pub y0: u32,
    pub y1: u32,
    /// Event counts per group at this time.
    pub d0: u32,
    pub d1: u32,
    /// Pooled left-continuous Kaplan-Meier CDF value F̂(t−).
    pub f_minus: f64,
}

impl EventRow {
    pub fn pooled_at_risk(&self) -> u32 {
        self.y0 + self.y1
    }

    pub fn pooled_events(&self) -> u32 {
        self.d0 + self.d1
    }

    /// Both groups still at risk; rows failing this carry zero weight in all
    /// statistics.
    pub fn both_at_risk(&self) -> bool {
        self.y0 > 0 && self.y1 > 0
    }
}

/// Risk/event counts at the pooled distinct event times, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EventTable {
    rows: Vec<EventRow>,
    n0: u32,
    n1: u32,
}

impl EventTable {
    pub fn rows(&self) -> &[EventRow] {
        &self.rows
    }

    /// Group sample sizes (n0, n1).
    pub fn group_sizes(&self) -> (u32, u32) {
        (self.n0, self.n1)
    }

    /// √((n1+n0)/(n1·n0)), the normalizing constant of the statistics.
    pub fn norm_constant(&self) -> f64 {
        let n0 = f64::from(self.n0);
        let n1 = f64::from(self.n1);
        ((n1 + n0) / (n1 * n0)).sqrt()
    }
}

/// Tabulate pooled distinct event times with per-group risk and event counts
/// and the pooled left-continuous KM CDF.
///
/// Ties between censorings and events at the same time keep the censored
/// subject in the risk set at that time. Times are compared exactly.
pub fn build_event_table(subjects: &[Subject]) -> Result<EventTable> {
    let n0 = subjects.iter().filter(|s| s.group == 0).count() as u32;
    let n1 = subjects.iter().filter(|s| s.group == 1).count() as u32;
    if n0 == 0 || n1 == 0 {
        return Err(Error::DegenerateData(format!(
            "both groups must be non-empty (n0 = {n0}, n1 = {n1})"
        )));
    }
    if subjects.iter().any(|s| !s.time.is_finite() || s.time < 0.0) {
        return Err(Error::Domain("subject times must be finite and >= 0".into()));
    }
    if !subjects.iter().any(|s| s.event) {
        return Err(Error::DegenerateData("no events in the pooled sample".into()));
    }

    let mut sorted: Vec<&Subject> = subjects.iter().collect();
    sorted.sort_by(|a, b| a.time.total_cmp(&b.time));

    let mut rows = Vec::new();
    let mut at_risk0 = n0;
    let mut at_risk1 = n1;
    let mut i = 0;
    while i < sorted.len() {
        let t = sorted[i].time;
        let (y0, y1) = (at_risk0, at_risk1);
        let mut d0 = 0u32;
        let mut d1 = 0u32;
        let mut leaving0 = 0u32;
        let mut leaving1 = 0u32;
        while i < sorted.len() && sorted[i].time == t {
            let s = sorted[i];
            if s.group == 0 {
                leaving0 += 1;
                if s.event {
                    d0 += 1;
                }
            } else {
                leaving1 += 1;
                if s.event {
                    d1 += 1;
                }
            }
            i += 1;
        }
        if d0 + d1 > 0 {
            rows.push(EventRow { time: t, y0, y1, d0, d1, f_minus: 0.0 });
        }
        at_risk0 -= leaving0;
        at_risk1 -= leaving1;
    }

    let mut table = EventTable { rows, n0, n1 };
    let f = pooled_km_cdf(&table);
    for (row, f_minus) in table.rows.iter_mut().zip(f) {
        row.f_minus = f_minus;
    }
    Ok(table)
}

/// Pooled left-continuous KM CDF at each event time:
/// F̂(tⱼ−) = 1 − Π_{k<j} (1 − dₖ/yₖ) over the preceding event rows.
pub fn pooled_km_cdf(table: &EventTable) -> Vec<f64> {
    let mut out = Vec::with_capacity(table.rows.len());
    let mut surv = 1.0;
    for row in &table.rows {
        out.push(1.0 - surv);
        let y = f64::from(row.pooled_at_risk());
        let d = f64::from(row.pooled_events());
        surv *= 1.0 - d / y;
    }
    out
}

/// Fraction of censored (non-event) records per group: (rate_g0, rate_g1).
pub fn censoring_rates(subjects: &[Subject]) -> Result<(f64, f64)> {
    let mut n = [0u32; 2];
    let mut censored = [0u32; 2];
    for s in subjects {
        let g = usize::from(s.group.min(1));
        n[g] += 1;
        if !s.event {
            censored[g] += 1;
        }
    }
    if n[0] == 0 || n[1] == 0 {
        return Err(Error::DegenerateData("both groups must be non-empty".into()));
    }
    Ok((f64::from(censored[0]) / f64::from(n[0]), f64::from(censored[1]) / f64::from(n[1])))
}

/// The same subjects with the group labels swapped (testing helper).
pub fn relabel_groups(subjects: &[Subject]) -> Vec<Subject> {
    subjects.iter().map(|s| Subject { group: 1 - s.group, ..*s }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn s(time: f64, event: bool, group: u8) -> Subject {
        Subject { time, event, group }
    }

    fn four_subject_example() -> Vec<Subject> {
        vec![s(1.0, true, 0), s(2.0, true, 1), s(3.0, false, 0), s(4.0, true, 1)]
    }

    #[test]
    fn hand_tabulated_counts() {
        let table = build_event_table(&four_subject_example()).unwrap();
        let got: Vec<(f64, u32, u32, u32, u32)> =
            table.rows().iter().map(|r| (r.time, r.y0, r.y1, r.d0, r.d1)).collect();
        assert_eq!(
            got,
            vec![(1.0, 2, 2, 1, 0), (2.0, 1, 2, 0, 1), (4.0, 0, 1, 0, 1)]
        );
        assert_eq!(table.group_sizes(), (2, 2));
    }

    #[test]
    fn hand_km_cdf() {
        // The censored subject at t=3 shrinks the risk set before t=4, so the
        // product runs over the event rows: 1 − (3/4)(2/3) = 0.5 (not 0.4375).
        let table = build_event_table(&four_subject_example()).unwrap();
        let f: Vec<f64> = table.rows().iter().map(|r| r.f_minus).collect();
        assert_abs_diff_eq!(f[0], 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(f[1], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(f[2], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn no_censoring_gives_empirical_cdf() {
        let subjects: Vec<Subject> =
            (1..=8).map(|i| s(i as f64, true, (i % 2) as u8)).collect();
        let table = build_event_table(&subjects).unwrap();
        for (j, row) in table.rows().iter().enumerate() {
            assert_abs_diff_eq!(row.f_minus, j as f64 / 8.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn all_censored_is_degenerate() {
        let subjects = vec![s(1.0, false, 0), s(2.0, false, 1)];
        assert!(matches!(build_event_table(&subjects), Err(Error::DegenerateData(_))));
    }

    #[test]
    fn single_group_is_degenerate() {
        let subjects = vec![s(1.0, true, 0), s(2.0, true, 0)];
        assert!(matches!(build_event_table(&subjects), Err(Error::DegenerateData(_))));
    }

    #[test]
    fn duplicating_subjects_doubles_counts() {
        let mut doubled = four_subject_example();
        doubled.extend(four_subject_example());
        let base = build_event_table(&four_subject_example()).unwrap();
        let twice = build_event_table(&doubled).unwrap();
        assert_eq!(base.rows().len(), twice.rows().len());
        for (a, b) in base.rows().iter().zip(twice.rows()) {
            assert_eq!(a.time, b.time);
            assert_eq!((b.y0, b.y1, b.d0, b.d1), (2 * a.y0, 2 * a.y1, 2 * a.d0, 2 * a.d1));
        }
    }

    #[test]
    fn permutation_invariant() {
        let mut shuffled = four_subject_example();
        shuffled.reverse();
        assert_eq!(build_event_table(&four_subject_example()).unwrap(), build_event_table(&shuffled).unwrap());
    }

    #[test]
    fn event_total_matches() {
        let subjects = vec![
            s(1.0, true, 0),
            s(1.0, true, 1),
            s(2.0, false, 0),
            s(2.0, true, 1),
            s(3.0, true, 0),
        ];
        let table = build_event_table(&subjects).unwrap();
        let total: u32 = table.rows().iter().map(|r| r.pooled_events()).sum();
        assert_eq!(total, subjects.iter().filter(|x| x.event).count() as u32);
    }

    #[test]
    fn tied_censoring_stays_at_risk() {
        // A censored record at an event time remains in the risk set there.
        let subjects = vec![s(2.0, true, 0), s(2.0, false, 1), s(3.0, true, 1)];
        let table = build_event_table(&subjects).unwrap();
        assert_eq!((table.rows()[0].y0, table.rows()[0].y1), (1, 2));
    }

    #[test]
    fn relabel_swaps_counts_keeps_cdf() {
        let table = build_event_table(&four_subject_example()).unwrap();
        let swapped = build_event_table(&relabel_groups(&four_subject_example())).unwrap();
        for (a, b) in table.rows().iter().zip(swapped.rows()) {
            assert_eq!((a.y0, a.d0), (b.y1, b.d1));
            assert_eq!((a.y1, a.d1), (b.y0, b.d0));
            assert_eq!(a.f_minus, b.f_minus);
        }
    }

    #[test]
    fn f_minus_in_unit_interval_and_monotone() {
        let subjects: Vec<Subject> = (0..40)
            .map(|i| s((i * 7 % 13) as f64 + 0.5, i % 3 != 0, (i % 2) as u8))
            .collect();
        let table = build_event_table(&subjects).unwrap();
        let mut prev = -1.0;
        for row in table.rows() {
            assert!(row.f_minus >= 0.0 && row.f_minus < 1.0);
            assert!(row.f_minus >= prev);
            prev = row.f_minus;
        }
    }

    #[test]
    fn censoring_rate_counts() {
        assert_eq!(censoring_rates(&four_subject_example()).unwrap(), (0.5, 0.0));
        let all_events = vec![s(1.0, true, 0), s(2.0, true, 1)];
        assert_eq!(censoring_rates(&all_events).unwrap(), (0.0, 0.0));
        let all_censored = vec![s(1.0, false, 0), s(2.0, false, 1)];
        assert_eq!(censoring_rates(&all_censored).unwrap(), (1.0, 1.0));
    }
}
