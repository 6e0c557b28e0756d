//! Effective-crossover matrix.
//!
//! Cell `(donor, assignee)` is the fraction of crossover matings between a
//! parent specialized in `donor` and one specialized in `assignee`, with the
//! children evaluated on `assignee`, that improved the best cost known for
//! `assignee`. Same-skill matings fill the diagonal.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mfea::CrossoverEvent;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix {
    /// Matings per cell, donor-major.
    pub totals: Vec<Vec<usize>>,
    pub effective: Vec<Vec<usize>>,
}

impl TransferMatrix {
    pub fn size(&self) -> usize {
        self.totals.len()
    }

    /// Effective ratio of a cell, `None` when no mating fell in it.
    pub fn ratio(&self, donor: usize, assignee: usize) -> Option<f64> {
        let n = self.totals[donor][assignee];
        (n > 0).then(|| self.effective[donor][assignee] as f64 / n as f64)
    }

    pub fn ratios(&self) -> Vec<Vec<Option<f64>>> {
        let k = self.size();
        (0..k).map(|d| (0..k).map(|a| self.ratio(d, a)).collect()).collect()
    }

    /// Matrix CSV: header row of assignee labels, one row per donor, empty
    /// fields for undefined cells.
    pub fn write_csv<W: Write>(&self, labels: &[String], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["donor\\assignee".to_string()];
        header.extend(labels.iter().cloned());
        w.write_record(&header)?;
        for (d, row) in self.ratios().into_iter().enumerate() {
            let mut rec = vec![labels[d].clone()];
            rec.extend(row.into_iter().map(|c| c.map(|v| v.to_string()).unwrap_or_default()));
            w.write_record(&rec)?;
        }
        w.flush()
            .map_err(|e| Error::usage(format!("cannot write transfer matrix: {e}")))?;
        Ok(())
    }
}

/// Tally `events` into a `k × k` matrix.
pub fn compute_transfer_matrix(events: &[CrossoverEvent], k: usize) -> Result<TransferMatrix> {
    let mut totals = vec![vec![0; k]; k];
    let mut effective = vec![vec![0; k]; k];
    for e in events {
        let (d, a) = (e.donor(), e.offspring_assigned_task);
        if d >= k || a >= k || e.parent_skill_a >= k || e.parent_skill_b >= k {
            return Err(Error::usage(format!("event refers to a task outside 0..{k}: {e:?}")));
        }
        if a != e.parent_skill_a && a != e.parent_skill_b {
            return Err(Error::usage(format!("event assigned to a non-parent task: {e:?}")));
        }
        totals[d][a] += 1;
        if e.improved {
            effective[d][a] += 1;
        }
    }
    Ok(TransferMatrix { totals, effective })
}

pub fn write_events_csv<W: Write>(events: &[CrossoverEvent], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for e in events {
        w.serialize(e)?;
    }
    if events.is_empty() {
        w.write_record([
            "generation",
            "parent_skill_a",
            "parent_skill_b",
            "offspring_assigned_task",
            "improved",
        ])?;
    }
    w.flush()
        .map_err(|e| Error::usage(format!("cannot write events: {e}")))?;
    Ok(())
}

pub fn read_events_csv<R: Read>(input: R) -> Result<Vec<CrossoverEvent>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn ev(a: usize, b: usize, to: usize, improved: bool) -> CrossoverEvent {
        CrossoverEvent {
            generation: 1,
            parent_skill_a: a,
            parent_skill_b: b,
            offspring_assigned_task: to,
            improved,
        }
    }

    #[test]
    fn quarter_ratio() {
        let events = vec![
            ev(0, 1, 1, true),
            ev(1, 0, 1, false),
            ev(0, 1, 1, false),
            ev(0, 1, 1, false),
        ];
        let m = compute_transfer_matrix(&events, 2).unwrap();
        assert_eq!(m.ratio(0, 1), Some(0.25));
        assert_eq!(m.ratio(1, 0), None);
        assert_eq!(m.ratio(0, 0), None);
    }

    #[test]
    fn empty_log_is_all_null() {
        let m = compute_transfer_matrix(&[], 3).unwrap();
        assert!(m.ratios().iter().flatten().all(Option::is_none));
    }

    #[test]
    fn matches_hand_tally() {
        let mut rng = crate::seeds::rng(12);
        let k = 4;
        let events: Vec<_> = (0..100)
            .map(|_| {
                let a = rng.gen_range(0..k);
                let b = rng.gen_range(0..k);
                let to = if rng.gen_bool(0.5) { a } else { b };
                ev(a, b, to, rng.gen_bool(0.3))
            })
            .collect();
        let m = compute_transfer_matrix(&events, k).unwrap();
        for d in 0..k {
            for a in 0..k {
                let cell: Vec<_> = events
                    .iter()
                    .filter(|e| {
                        let other = if e.parent_skill_a == e.offspring_assigned_task {
                            e.parent_skill_b
                        } else {
                            e.parent_skill_a
                        };
                        e.offspring_assigned_task == a && other == d
                    })
                    .collect();
                let expect = if cell.is_empty() {
                    None
                } else {
                    Some(cell.iter().filter(|e| e.improved).count() as f64 / cell.len() as f64)
                };
                assert_eq!(m.ratio(d, a), expect);
            }
        }
        assert_eq!(m.totals.iter().flatten().sum::<usize>(), 100);
    }

    #[test]
    fn out_of_range_event_rejected() {
        assert!(compute_transfer_matrix(&[ev(0, 3, 3, true)], 2).is_err());
        assert!(compute_transfer_matrix(&[ev(0, 1, 2, true)], 3).is_err());
    }

    #[test]
    fn events_csv_round_trip() {
        let events = vec![ev(0, 1, 1, true), ev(2, 2, 2, false)];
        let mut buf = Vec::new();
        write_events_csv(&events, &mut buf).unwrap();
        assert_eq!(read_events_csv(buf.as_slice()).unwrap(), events);
    }

    #[test]
    fn matrix_csv_layout() {
        let m = compute_transfer_matrix(&[ev(0, 1, 1, true), ev(0, 1, 1, false)], 2).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&["a".into(), "b".into()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "donor\\assignee,a,b\na,,0.5\nb,,\n");
    }
}
