use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Result};

use super::standardize;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PcaResult {
    /// Unit-length component directions, one per kept component.
    pub components: Vec<Vec<f64>>,
    /// All eigenvalues of the correlation matrix, descending.
    pub eigenvalues: Vec<f64>,
    /// Share of total variance per kept component, non-increasing.
    pub explained_ratio: Vec<f64>,
    /// Projection of each standardized row onto the kept components.
    pub scores: Vec<Vec<f64>>,
    pub feature_names: Vec<String>,
}

/// Principal components of the correlation matrix of `rows`. Columns are
/// standardized first; each direction is signed so that its largest-magnitude
/// coordinate is positive.
pub fn pca(rows: &[Vec<f64>], names: &[&str], keep: usize) -> Result<PcaResult> {
    let z = standardize(rows, names)?;
    let (n, dim) = (z.len(), z[0].len());
    if keep == 0 || keep > dim {
        return Err(invalid(
            "stats",
            alloc::format!("keep must be in 1..={dim}, got {keep}"),
        ));
    }
    let data = DMatrix::from_fn(n, dim, |i, j| z[i][j]);
    let corr = (data.transpose() * &data) / (n as f64 - 1.0);
    let eig = SymmetricEigen::new(corr);

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let total: f64 = eigenvalues.iter().sum();

    let mut components = Vec::with_capacity(keep);
    for &i in order.iter().take(keep) {
        let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
        let pivot = v
            .iter()
            .enumerate()
            .fold(0, |best, (j, x)| if x.abs() > v[best].abs() { j } else { best });
        if v[pivot] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        components.push(v);
    }
    let explained_ratio = eigenvalues.iter().take(keep).map(|l| l / total).collect();
    let scores = z
        .iter()
        .map(|row| {
            components
                .iter()
                .map(|c| row.iter().zip(c).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    let feature_names = if names.len() == dim {
        names.iter().map(|s| String::from(*s)).collect()
    } else {
        (0..dim).map(|j| alloc::format!("column {j}")).collect()
    };
    Ok(PcaResult {
        components,
        eigenvalues,
        explained_ratio,
        scores,
        feature_names,
    })
}
