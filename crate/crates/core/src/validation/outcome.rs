//! Qualitative search outcomes and term selection frequencies.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::narx::{ModelSet, StructureMask};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OutcomeKind {
    ExactFitting,
    OverFitting,
    UnderFitting1,
    UnderFitting2,
}

impl OutcomeKind {
    pub const ALL: [OutcomeKind; 4] =
        [OutcomeKind::ExactFitting, OutcomeKind::OverFitting, OutcomeKind::UnderFitting1, OutcomeKind::UnderFitting2];

    pub fn label(self) -> &'static str {
        match self {
            OutcomeKind::ExactFitting => "exact_fitting",
            OutcomeKind::OverFitting => "over_fitting",
            OutcomeKind::UnderFitting1 => "under_fitting_1",
            OutcomeKind::UnderFitting2 => "under_fitting_2",
        }
    }
}

/// Found structure compared with the true one, as term indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub kind: OutcomeKind,
    pub spurious: Vec<usize>,
    pub missing: Vec<usize>,
}

pub fn classify_outcome(found: &StructureMask, truth: &StructureMask) -> Result<SearchOutcome> {
    let spurious: Vec<usize> = found.and_not(truth)?.set_indices().collect();
    let missing: Vec<usize> = truth.and_not(found)?.set_indices().collect();
    let kind = match (missing.is_empty(), spurious.is_empty()) {
        (true, true) => OutcomeKind::ExactFitting,
        (true, false) => OutcomeKind::OverFitting,
        (false, true) => OutcomeKind::UnderFitting1,
        (false, false) => OutcomeKind::UnderFitting2,
    };
    Ok(SearchOutcome { kind, spurious, missing })
}

/// Counts of each outcome kind over a set of runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeTally {
    pub exact_fitting: usize,
    pub over_fitting: usize,
    pub under_fitting_1: usize,
    pub under_fitting_2: usize,
}

impl OutcomeTally {
    pub fn add(&mut self, kind: OutcomeKind) {
        *self.slot(kind) += 1;
    }

    fn slot(&mut self, kind: OutcomeKind) -> &mut usize {
        match kind {
            OutcomeKind::ExactFitting => &mut self.exact_fitting,
            OutcomeKind::OverFitting => &mut self.over_fitting,
            OutcomeKind::UnderFitting1 => &mut self.under_fitting_1,
            OutcomeKind::UnderFitting2 => &mut self.under_fitting_2,
        }
    }

    pub fn get(&self, kind: OutcomeKind) -> usize {
        match kind {
            OutcomeKind::ExactFitting => self.exact_fitting,
            OutcomeKind::OverFitting => self.over_fitting,
            OutcomeKind::UnderFitting1 => self.under_fitting_1,
            OutcomeKind::UnderFitting2 => self.under_fitting_2,
        }
    }

    pub fn total(&self) -> usize {
        self.exact_fitting + self.over_fitting + self.under_fitting_1 + self.under_fitting_2
    }
}

impl FromIterator<OutcomeKind> for OutcomeTally {
    fn from_iter<I: IntoIterator<Item = OutcomeKind>>(iter: I) -> Self {
        let mut t = Self::default();
        iter.into_iter().for_each(|k| t.add(k));
        t
    }
}

/// Writes `system,algorithm,kind,count` rows.
pub fn write_outcomes_csv<W: Write>(w: W, rows: &[(String, String, OutcomeTally)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["system", "algorithm", "kind", "count"]).map_err(csv_err)?;
    for (system, algorithm, tally) in rows {
        for kind in OutcomeKind::ALL {
            let count = tally.get(kind).to_string();
            out.write_record([system.as_str(), algorithm.as_str(), kind.label(), count.as_str()]).map_err(csv_err)?;
        }
    }
    out.flush().map_err(|e| Error::InvalidConfig(e.to_string()))
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::InvalidConfig(format!("csv: {e}"))
}

/// Fraction of runs selecting each term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyReport {
    pub runs: usize,
    pub counts: Vec<usize>,
}

impl FrequencyReport {
    pub fn nu(&self, term: usize) -> f64 {
        self.counts[term] as f64 / self.runs as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|i| self.nu(i)).collect()
    }

    /// Writes `term,nu` rows for every candidate term.
    pub fn write_csv<W: Write>(&self, w: W, model_set: &ModelSet) -> Result<()> {
        if model_set.len() != self.counts.len() {
            return Err(Error::LengthMismatch { expected: model_set.len(), actual: self.counts.len() });
        }
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["term", "nu"]).map_err(csv_err)?;
        for (i, t) in model_set.terms().iter().enumerate() {
            out.write_record([t.to_string(), self.nu(i).to_string()]).map_err(csv_err)?;
        }
        out.flush().map_err(|e| Error::InvalidConfig(e.to_string()))
    }
}

pub fn selection_frequency(runs: &[StructureMask]) -> Result<FrequencyReport> {
    let first = runs.first().ok_or(Error::Degenerate("no runs"))?;
    let mut counts = vec![0usize; first.len()];
    for m in runs {
        if m.len() != counts.len() {
            return Err(Error::LengthMismatch { expected: counts.len(), actual: m.len() });
        }
        for i in m.set_indices() {
            counts[i] += 1;
        }
    }
    Ok(FrequencyReport { runs: runs.len(), counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits(b: &[u8]) -> StructureMask {
        StructureMask::from_bits(b)
    }

    #[test]
    fn examples() {
        let t = bits(&[1, 1, 0, 0]);
        assert_eq!(classify_outcome(&t, &t).unwrap().kind, OutcomeKind::ExactFitting);
        assert_eq!(classify_outcome(&bits(&[1, 1, 1, 0]), &t).unwrap().kind, OutcomeKind::OverFitting);
        let o = classify_outcome(&bits(&[1, 0, 0]), &bits(&[0, 1, 0])).unwrap();
        assert_eq!(o, SearchOutcome { kind: OutcomeKind::UnderFitting2, spurious: vec![0], missing: vec![1] });
        assert_eq!(classify_outcome(&bits(&[1, 0, 0, 0]), &t).unwrap().kind, OutcomeKind::UnderFitting1);
    }

    #[test]
    fn taxonomy_is_total_over_four_bit_pairs() {
        let mut tally = OutcomeTally::default();
        for f in 0u8..16 {
            for t in 0u8..16 {
                let m = |x: u8| StructureMask::from_bools((0..4).map(|i| x >> i & 1 == 1).collect());
                let o = classify_outcome(&m(f), &m(t)).unwrap();
                let exact = f == t;
                let over = f & t == t && f != t;
                let under1 = f & t == f && f != t;
                let expected = match (exact, over, under1) {
                    (true, _, _) => OutcomeKind::ExactFitting,
                    (_, true, _) => OutcomeKind::OverFitting,
                    (_, _, true) => OutcomeKind::UnderFitting1,
                    _ => OutcomeKind::UnderFitting2,
                };
                assert_eq!(o.kind, expected, "{f:04b} vs {t:04b}");
                assert_eq!(o.spurious.len(), (f & !t).count_ones() as usize);
                assert_eq!(o.missing.len(), (t & !f).count_ones() as usize);
                tally.add(o.kind);
            }
        }
        assert_eq!(tally.total(), 256);
        // 81 = 3⁴ subset pairs, 16 of which are equal.
        assert_eq!((tally.exact_fitting, tally.over_fitting, tally.under_fitting_1), (16, 65, 65));
    }

    #[test]
    fn frequencies() {
        let mut runs = vec![bits(&[1, 0, 1]); 26];
        runs.extend(vec![bits(&[1, 0, 0]); 14]);
        let f = selection_frequency(&runs).unwrap();
        assert_eq!(f.values(), vec![1.0, 0.0, 0.65]);
        assert!(selection_frequency(&[]).is_err());
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        let tally: OutcomeTally = [OutcomeKind::ExactFitting; 10].into_iter().collect();
        write_outcomes_csv(&mut buf, &[("S1".into(), "2d-upso".into(), tally)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("system,algorithm,kind,count\nS1,2d-upso,exact_fitting,10\n"));
        let set = ModelSet::generate(1, 1, 1);
        let mut buf = Vec::new();
        selection_frequency(&[bits(&[0, 1, 1]), bits(&[0, 1, 0])]).unwrap().write_csv(&mut buf, &set).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "term,nu\n1,0\ny(k-1),1\nu(k-1),0.5\n");
    }

    proptest! {
        #[test]
        fn frequency_ignores_order(masks in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 6), 1..12)) {
            let runs: Vec<StructureMask> = masks.into_iter().map(StructureMask::from_bools).collect();
            let mut rev = runs.clone();
            rev.reverse();
            let f = selection_frequency(&runs).unwrap();
            prop_assert_eq!(&f, &selection_frequency(&rev).unwrap());
            prop_assert!(f.values().iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}
