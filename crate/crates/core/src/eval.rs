//! Classification metrics and a nearest-centroid baseline over extracted images.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{Manifest, Split, SplitAssignment, Status};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grayscale::{resize_bicubic, ImageSpec, PixelMatrix};
use crate::imaging::read_gray_png;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub label: String,
}

/// Block-mean pools `image` down to `side x side`, flattened row-major.
///
/// Block edges sit at `floor(i * image.side / side)`, so sides that do not
/// divide evenly get blocks differing by at most one pixel.
pub fn featurize(image: &PixelMatrix, side: usize) -> Result<Vec<f64>> {
    if side == 0 || side > image.side {
        return Err(Error::FeatureSide {
            feature: side,
            image: image.side,
        });
    }
    let edge = |i: usize| i * image.side / side;
    let mut out = Vec::with_capacity(side * side);
    for by in 0..side {
        for bx in 0..side {
            let (y0, y1, x0, x1) = (edge(by), edge(by + 1), edge(bx), edge(bx + 1));
            let mut sum = 0u64;
            for y in y0..y1 {
                sum += image.values[y * image.side + x0..y * image.side + x1]
                    .iter()
                    .map(|&v| v as u64)
                    .sum::<u64>();
            }
            out.push(sum as f64 / ((y1 - y0) * (x1 - x0)) as f64);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentroidModel {
    /// Sorted class names.
    pub classes: Vec<String>,
    pub centroids: Vec<Vec<f64>>,
}

pub fn train_centroids(features: &[FeatureVector]) -> Result<CentroidModel> {
    let mut classes: Vec<String> = features.iter().map(|f| f.label.clone()).collect();
    classes.sort();
    classes.dedup();
    train_centroids_for(&classes, features)
}

/// Like [`train_centroids`] but every class in `classes` must have a sample.
pub fn train_centroids_for(classes: &[String], features: &[FeatureVector]) -> Result<CentroidModel> {
    if classes.is_empty() {
        return Err(Error::EmptyClass(String::new()));
    }
    let dim = features.first().map(|f| f.values.len()).unwrap_or(0);
    let mut sums: BTreeMap<&str, (Vec<f64>, usize)> =
        classes.iter().map(|c| (c.as_str(), (vec![0.0; dim], 0))).collect();
    for f in features {
        if f.values.len() != dim {
            return Err(Error::InvalidConfig(format!(
                "feature length {} differs from {dim}",
                f.values.len()
            )));
        }
        let Some((sum, n)) = sums.get_mut(f.label.as_str()) else {
            return Err(Error::InvalidConfig(format!("undeclared class {:?}", f.label)));
        };
        for (s, v) in sum.iter_mut().zip(&f.values) {
            *s += v;
        }
        *n += 1;
    }
    let mut model = CentroidModel {
        classes: Vec::with_capacity(sums.len()),
        centroids: Vec::with_capacity(sums.len()),
    };
    for (class, (sum, n)) in sums {
        if n == 0 {
            return Err(Error::EmptyClass(class.to_string()));
        }
        model.classes.push(class.to_string());
        model.centroids.push(sum.into_iter().map(|s| s / n as f64).collect());
    }
    Ok(model)
}

impl CentroidModel {
    /// Nearest centroid by Euclidean distance; ties go to the smaller class name.
    pub fn predict(&self, feature: &[f64]) -> &str {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, c) in self.centroids.iter().enumerate() {
            let d: f64 = c.iter().zip(feature).map(|(a, b)| (a - b) * (a - b)).sum();
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        &self.classes[best]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<String>,
    /// `counts[truth][predicted]`
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(classes: Vec<String>) -> Self {
        let n = classes.len();
        ConfusionMatrix {
            classes,
            counts: vec![vec![0; n]; n],
        }
    }

    /// Builds from aligned truth/prediction labels; classes are the sorted union.
    pub fn from_labels<S: AsRef<str>>(truth: &[S], predicted: &[S]) -> Self {
        Self::from_labels_with::<S>(&[], truth, predicted)
    }

    /// As [`ConfusionMatrix::from_labels`], also listing `extra` classes.
    pub fn from_labels_with<S: AsRef<str>>(extra: &[String], truth: &[S], predicted: &[S]) -> Self {
        let mut classes: Vec<String> = truth
            .iter()
            .chain(predicted)
            .map(|s| s.as_ref().to_string())
            .chain(extra.iter().cloned())
            .collect();
        classes.sort();
        classes.dedup();
        let mut cm = ConfusionMatrix::new(classes);
        for (t, p) in truth.iter().zip(predicted) {
            let i = cm.index(t.as_ref()).expect("class collected above");
            let j = cm.index(p.as_ref()).expect("class collected above");
            cm.counts[i][j] += 1;
        }
        cm
    }

    fn index(&self, class: &str) -> Option<usize> {
        self.classes.binary_search_by(|c| c.as_str().cmp(class)).ok()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

impl fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.classes.iter().map(String::len).max().unwrap_or(1).max(6);
        write!(f, "{:>w$}", "true\\pred")?;
        for c in &self.classes {
            write!(f, " {c:>w$}")?;
        }
        writeln!(f)?;
        for (c, row) in self.classes.iter().zip(&self.counts) {
            write!(f, "{c:>w$}")?;
            for n in row {
                write!(f, " {n:>w$}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub per_class: Vec<ClassMetrics>,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Accuracy plus unweighted (macro) means of per-class precision, recall and F1.
/// A zero denominator yields 0 for that class metric.
pub fn compute_metrics(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    let total = cm.total();
    if total == 0 || cm.classes.is_empty() {
        return Err(Error::EmptyConfusion);
    }
    let n = cm.classes.len();
    let trace: u64 = (0..n).map(|i| cm.counts[i][i]).sum();
    let per_class: Vec<ClassMetrics> = (0..n)
        .map(|c| {
            let tp = cm.counts[c][c];
            let predicted: u64 = cm.counts.iter().map(|row| row[c]).sum();
            let actual: u64 = cm.counts[c].iter().sum();
            let precision = ratio(tp, predicted);
            let recall = ratio(tp, actual);
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            ClassMetrics {
                class: cm.classes[c].clone(),
                precision,
                recall,
                f1,
                support: actual,
            }
        })
        .collect();
    let mean = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).sum::<f64>() / n as f64;
    Ok(MetricsReport {
        accuracy: trace as f64 / total as f64,
        macro_precision: mean(|m| m.precision),
        macro_recall: mean(|m| m.recall),
        macro_f1: mean(|m| m.f1),
        per_class,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSource {
    Entropy,
    Grayscale,
}

impl std::str::FromStr for FeatureSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entropy" => Ok(FeatureSource::Entropy),
            "grayscale" => Ok(FeatureSource::Grayscale),
            other => Err(Error::InvalidConfig(format!("unknown bench mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub mode: FeatureSource,
    pub feature_side: usize,
    pub train_samples: usize,
    pub test_samples: usize,
    pub metrics: MetricsReport,
    pub confusion: ConfusionMatrix,
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pct = |x: f64| 100.0 * x;
        writeln!(
            f,
            "mode {:?}, feature side {}, {} train / {} test",
            self.mode, self.feature_side, self.train_samples, self.test_samples
        )?;
        writeln!(
            f,
            "accuracy {:.2}%  precision {:.2}%  recall {:.2}%  f1 {:.2}%",
            pct(self.metrics.accuracy),
            pct(self.metrics.macro_precision),
            pct(self.metrics.macro_recall),
            pct(self.metrics.macro_f1)
        )?;
        write!(f, "{}", self.confusion)
    }
}

/// Loads one image and pools it. Images smaller than `side` are first
/// upsampled bicubically to `side`.
pub fn load_features(path: &Path, side: usize) -> Result<Vec<f64>> {
    let mut image = read_gray_png(path)?;
    if image.side < side {
        image = resize_bicubic(&image, ImageSpec { target_side: side })?;
    }
    featurize(&image, side)
}

/// Trains on the `train` split and evaluates on `test`.
///
/// `images_root` is the directory the manifest's artifact paths are relative to.
pub fn run_bench(
    manifest: &Manifest,
    split: &SplitAssignment,
    mode: FeatureSource,
    feature_side: usize,
    images_root: &Path,
    exec: Exec,
) -> Result<BenchReport> {
    let lookup = split.lookup();
    let mut samples: Vec<(PathBuf, String, Split)> = Vec::new();
    for r in manifest.records.iter().filter(|r| r.status == Status::Ok) {
        let Some(&which) = lookup.get(r.source_path.as_path()) else {
            continue;
        };
        if which == Split::Val {
            continue;
        }
        let rel = match mode {
            FeatureSource::Entropy => r.entropy_raw_path.as_ref(),
            FeatureSource::Grayscale => r.gray_image_path.as_ref(),
        };
        let Some(rel) = rel else {
            return Err(Error::InvalidConfig(format!(
                "{} has no {mode:?} image; extract with a matching mode",
                r.source_path.display()
            )));
        };
        samples.push((images_root.join(rel), r.label.clone(), which));
    }

    let features: Vec<Result<FeatureVector>> = exec.map(&samples, |(path, label, _)| {
        Ok(FeatureVector {
            values: load_features(path, feature_side)?,
            label: label.clone(),
        })
    });
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (f, (_, _, which)) in features.into_iter().zip(&samples) {
        match which {
            Split::Train => train.push(f?),
            _ => test.push(f?),
        }
    }
    if test.is_empty() {
        return Err(Error::EmptyConfusion);
    }

    let model = train_centroids(&train)?;
    let predicted: Vec<String> = exec.map(&test, |f| model.predict(&f.values).to_string());
    let truth: Vec<String> = test.iter().map(|f| f.label.clone()).collect();
    let confusion = ConfusionMatrix::from_labels_with(&model.classes, &truth, &predicted);
    let metrics = compute_metrics(&confusion)?;
    Ok(BenchReport {
        mode,
        feature_side,
        train_samples: train.len(),
        test_samples: test.len(),
        metrics,
        confusion,
    })
}
