//! Classification metrics and a nearest-centroid baseline.
//!
//! The metric set matches the usual multi-class reporting: accuracy,
//! macro-averaged precision/recall/F-1, and a row-normalized confusion
//! matrix. Macro averaging weights every class equally, which keeps the
//! numbers meaningful under heavy class imbalance; classes absent from both
//! the truth and the predictions are excluded from the averages.

use ndarray::Array2;
use std::collections::BTreeMap;

use crate::dataset::ClassLabel;
use crate::error::{Error, Result};
use crate::stack::StackedTensor;

/// Raw confusion counts. Rows are true classes, columns predicted, in the
/// order of `classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionMatrix {
    counts: Array2<u64>,
    classes: Vec<ClassLabel>,
}

/// Count co-occurrences of true and predicted labels.
pub fn confusion(
    y_true: &[ClassLabel],
    y_pred: &[ClassLabel],
    classes: &[ClassLabel],
) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} true labels vs {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    let index: BTreeMap<&ClassLabel, usize> =
        classes.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut counts = Array2::zeros((classes.len(), classes.len()));
    for (t, p) in y_true.iter().zip(y_pred) {
        let ti = *index
            .get(t)
            .ok_or_else(|| Error::UnknownLabel(t.to_string()))?;
        let pi = *index
            .get(p)
            .ok_or_else(|| Error::UnknownLabel(p.to_string()))?;
        counts[(ti, pi)] += 1;
    }
    Ok(ConfusionMatrix {
        counts,
        classes: classes.to_vec(),
    })
}

impl ConfusionMatrix {
    pub fn counts(&self) -> &Array2<u64> {
        &self.counts
    }

    pub fn classes(&self) -> &[ClassLabel] {
        &self.classes
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Each row divided by its sum; all-zero rows stay zero rather than NaN.
    pub fn row_normalized(&self) -> Array2<f64> {
        let n = self.classes.len();
        let mut out = Array2::zeros((n, n));
        for i in 0..n {
            let row_sum: u64 = self.counts.row(i).iter().sum();
            if row_sum > 0 {
                for j in 0..n {
                    out[(i, j)] = self.counts[(i, j)] as f64 / row_sum as f64;
                }
            }
        }
        out
    }

    /// Plain-text table of row-normalized values.
    pub fn to_text_grid(&self) -> String {
        let normalized = self.row_normalized();
        let width = self
            .classes
            .iter()
            .map(|c| c.as_str().len())
            .max()
            .unwrap_or(2)
            .max(5);
        let mut out = String::new();
        out.push_str(&format!("{:>width$} |", "t\\p"));
        for c in &self.classes {
            out.push_str(&format!(" {:>width$}", c.as_str()));
        }
        out.push('\n');
        for (i, c) in self.classes.iter().enumerate() {
            out.push_str(&format!("{:>width$} |", c.as_str()));
            for j in 0..self.classes.len() {
                out.push_str(&format!(" {:>width$.3}", normalized[(i, j)]));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassMetrics {
    pub label: ClassLabel,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Number of true instances of the class.
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub accuracy: f64,
    /// Macro averages over classes present in truth or predictions.
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_class: Vec<ClassMetrics>,
}

/// Derive the metric report from a confusion matrix.
///
/// Per class: precision = diagonal/column sum, recall = diagonal/row sum,
/// both 0 when their denominator is 0; F-1 is the harmonic mean (0 when
/// precision + recall is 0).
pub fn metrics(cm: &ConfusionMatrix) -> MetricsReport {
    let n = cm.classes.len();
    let total = cm.total();
    let trace: u64 = (0..n).map(|i| cm.counts[(i, i)]).sum();
    let accuracy = if total > 0 {
        trace as f64 / total as f64
    } else {
        0.0
    };

    let mut per_class = Vec::with_capacity(n);
    let mut macro_acc = (0.0, 0.0, 0.0);
    let mut present = 0usize;
    for i in 0..n {
        let row_sum: u64 = cm.counts.row(i).iter().sum();
        let col_sum: u64 = cm.counts.column(i).iter().sum();
        let diag = cm.counts[(i, i)] as f64;
        let precision = if col_sum > 0 { diag / col_sum as f64 } else { 0.0 };
        let recall = if row_sum > 0 { diag / row_sum as f64 } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        if row_sum + col_sum > 0 {
            present += 1;
            macro_acc.0 += precision;
            macro_acc.1 += recall;
            macro_acc.2 += f1;
        }
        per_class.push(ClassMetrics {
            label: cm.classes[i].clone(),
            precision,
            recall,
            f1,
            support: row_sum,
        });
    }
    let scale = if present > 0 { present as f64 } else { 1.0 };
    MetricsReport {
        accuracy,
        precision: macro_acc.0 / scale,
        recall: macro_acc.1 / scale,
        f1: macro_acc.2 / scale,
        per_class,
    }
}

impl MetricsReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "accuracy  {:.4}\nprecision {:.4} (macro)\nrecall    {:.4} (macro)\nf1        {:.4} (macro)\n\n",
            self.accuracy, self.precision, self.recall, self.f1
        ));
        out.push_str("class  precision  recall  f1      support\n");
        for c in &self.per_class {
            out.push_str(&format!(
                "{:<6} {:<10.4} {:<7.4} {:<7.4} {}\n",
                c.label.as_str(),
                c.precision,
                c.recall,
                c.f1,
                c.support
            ));
        }
        out
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("class,precision,recall,f1,support\n");
        for c in &self.per_class {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                c.label.as_str(),
                c.precision,
                c.recall,
                c.f1,
                c.support
            ));
        }
        out.push_str(&format!(
            "macro,{},{},{},\naccuracy,{},,,\n",
            self.precision, self.recall, self.f1, self.accuracy
        ));
        out
    }
}

/// Nearest-centroid classifier over flattened, per-feature-standardized
/// tensors.
#[derive(Debug, Clone)]
pub struct CentroidModel {
    classes: Vec<ClassLabel>,
    shape: (usize, usize, usize),
    mean: Vec<f64>,
    std: Vec<f64>,
    /// Per-class centroids in standardized feature space.
    centroids: Vec<Vec<f64>>,
}

impl CentroidModel {
    pub fn classes(&self) -> &[ClassLabel] {
        &self.classes
    }

    /// Nearest centroid by Euclidean distance; exact ties go to the class
    /// earliest in [`Self::classes`] order.
    pub fn predict(&self, tensor: &StackedTensor) -> Result<ClassLabel> {
        if tensor.shape() != self.shape {
            return Err(Error::ShapeMismatch(format!(
                "tensor {:?} vs model {:?}",
                tensor.shape(),
                self.shape
            )));
        }
        let mut best = 0usize;
        let mut best_dist = f64::INFINITY;
        for (c, centroid) in self.centroids.iter().enumerate() {
            let mut dist = 0.0;
            for ((&v, &mu), (&sigma, &cv)) in tensor
                .values()
                .iter()
                .zip(&self.mean)
                .zip(self.std.iter().zip(centroid))
            {
                let z = (v - mu) / sigma;
                let d = z - cv;
                dist += d * d;
            }
            if dist < best_dist {
                best_dist = dist;
                best = c;
            }
        }
        Ok(self.classes[best].clone())
    }
}

/// Streaming builder for [`CentroidModel`]: tensors are folded into per-class
/// sums one at a time, so the training set never has to sit in memory.
#[derive(Debug, Clone, Default)]
pub struct CentroidFit {
    shape: Option<(usize, usize, usize)>,
    class_sums: BTreeMap<ClassLabel, (Vec<f64>, usize)>,
    total_sum: Vec<f64>,
    total_sq: Vec<f64>,
    n: usize,
}

impl CentroidFit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, tensor: &StackedTensor, label: &ClassLabel) -> Result<()> {
        match self.shape {
            None => {
                let len = tensor.values().len();
                self.shape = Some(tensor.shape());
                self.total_sum = vec![0.0; len];
                self.total_sq = vec![0.0; len];
            }
            Some(shape) if shape != tensor.shape() => {
                return Err(Error::ShapeMismatch(format!(
                    "tensor {:?} vs earlier {:?}",
                    tensor.shape(),
                    shape
                )))
            }
            _ => {}
        }
        let (sums, count) = self
            .class_sums
            .entry(label.clone())
            .or_insert_with(|| (vec![0.0; self.total_sum.len()], 0));
        for (i, &v) in tensor.values().iter().enumerate() {
            sums[i] += v;
            self.total_sum[i] += v;
            self.total_sq[i] += v * v;
        }
        *count += 1;
        self.n += 1;
        Ok(())
    }

    pub fn finish(self) -> Result<CentroidModel> {
        let shape = self
            .shape
            .ok_or_else(|| Error::InvalidParameter("no training samples".into()))?;
        let n = self.n as f64;
        let mean: Vec<f64> = self.total_sum.iter().map(|s| s / n).collect();
        let std: Vec<f64> = self
            .total_sq
            .iter()
            .zip(&mean)
            .map(|(&sq, &mu)| {
                let var = (sq / n - mu * mu).max(0.0);
                let sigma = var.sqrt();
                // Constant features carry no signal; any positive stand-in
                // keeps them at zero contribution.
                if sigma > 1e-12 {
                    sigma
                } else {
                    1.0
                }
            })
            .collect();

        let mut classes = Vec::with_capacity(self.class_sums.len());
        let mut centroids = Vec::with_capacity(self.class_sums.len());
        for (label, (sums, count)) in self.class_sums {
            let c = count as f64;
            centroids.push(
                sums.iter()
                    .zip(mean.iter().zip(&std))
                    .map(|(&s, (&mu, &sigma))| (s / c - mu) / sigma)
                    .collect(),
            );
            classes.push(label);
        }
        Ok(CentroidModel {
            classes,
            shape,
            mean,
            std,
            centroids,
        })
    }
}

/// Fit a nearest-centroid model from an in-memory sample list.
pub fn centroid_fit(samples: &[(StackedTensor, ClassLabel)]) -> Result<CentroidModel> {
    let mut fit = CentroidFit::new();
    for (tensor, label) in samples {
        fit.add(tensor, label)?;
    }
    fit.finish()
}

/// Convenience wrapper mirroring [`CentroidModel::predict`].
pub fn centroid_predict(model: &CentroidModel, tensor: &StackedTensor) -> Result<ClassLabel> {
    model.predict(tensor)
}
