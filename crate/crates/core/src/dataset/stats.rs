use std::collections::BTreeMap;
use std::fmt;

use super::manifest::Manifest;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetStats {
    pub total: usize,
    pub per_class: BTreeMap<String, usize>,
    /// Count descending, then class name ascending.
    pub top_k: Vec<(String, usize)>,
}

pub fn compute_stats(manifest: &Manifest, k: usize) -> DatasetStats {
    let mut per_class: BTreeMap<String, usize> = BTreeMap::new();
    for r in &manifest.records {
        *per_class.entry(r.label.clone()).or_default() += 1;
    }
    let mut ranked: Vec<(String, usize)> = per_class.iter().map(|(c, &n)| (c.clone(), n)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(k);
    DatasetStats {
        total: manifest.len(),
        per_class,
        top_k: ranked,
    }
}

impl fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.per_class.keys().map(String::len).max().unwrap_or(5).max(5);
        writeln!(f, "{:<w$}  {:>10}", "Total Instances", self.total, w = width.max(15))?;
        writeln!(f, "{:<w$}  {:>10}", "Classes", self.per_class.len(), w = width.max(15))?;
        writeln!(f)?;
        writeln!(f, "Class distribution")?;
        for (class, n) in &self.per_class {
            let pct = if self.total > 0 { 100.0 * *n as f64 / self.total as f64 } else { 0.0 };
            writeln!(f, "  {class:<width$}  {n:>8}  {pct:>6.2}%")?;
        }
        writeln!(f)?;
        writeln!(f, "Top {} classes", self.top_k.len())?;
        for (rank, (class, n)) in self.top_k.iter().enumerate() {
            writeln!(f, "  {:>3}. {class:<width$}  {n:>8}", rank + 1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::manifest::SampleRecord;

    fn manifest(labels: &[&str]) -> Manifest {
        Manifest::new(
            labels
                .iter()
                .enumerate()
                .map(|(i, l)| SampleRecord::new(format!("{l}/{i:06}").into(), l.to_string(), "0".repeat(64), 1))
                .collect(),
        )
    }

    #[test]
    fn counts_and_ranking() {
        let s = compute_stats(&manifest(&["A", "A", "B"]), 10);
        assert_eq!(s.total, 3);
        assert_eq!(s.top_k, vec![("A".to_string(), 2), ("B".to_string(), 1)]);
        assert_eq!(s.per_class.values().sum::<usize>(), s.total);
    }

    #[test]
    fn ties_break_by_name() {
        let s = compute_stats(&manifest(&["zeta", "alpha", "mid", "mid"]), 2);
        assert_eq!(s.top_k, vec![("mid".to_string(), 2), ("alpha".to_string(), 1)]);
    }

    #[test]
    fn empty_manifest() {
        let s = compute_stats(&manifest(&[]), 10);
        assert_eq!((s.total, s.top_k.len()), (0, 0));
        assert!(s.to_string().contains("Total Instances"));
    }
}
