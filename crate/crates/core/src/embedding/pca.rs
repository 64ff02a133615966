use log::warn;
use nalgebra::{DMatrix, SymmetricEigen};

use super::EmbeddingMatrix;
use crate::{Error, Result};

/// Two-dimensional PCA coordinates for each embedded node.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection2d {
    pub coords: Vec<[f64; 2]>,
    /// Variance along the two retained components, largest first.
    pub explained_variance: [f64; 2],
    /// Total variance of the centered data.
    pub total_variance: f64,
}

/// Projects mean-centered rows onto the top two principal components.
///
/// Each component is signed so that its largest-magnitude loading is
/// positive. If the data has rank below two the second coordinate is zero.
pub fn pca_project_2d(emb: &EmbeddingMatrix) -> Result<Projection2d> {
    let (n, d) = (emb.rows(), emb.dimension());
    if n < 2 {
        return Err(Error::input(format!(
            "PCA needs at least 2 points, got {n}"
        )));
    }
    let mut x = DMatrix::<f64>::from_fn(n, d, |i, j| emb.row(i)[j] as f64);
    for j in 0..d {
        let mean = x.column(j).mean();
        x.column_mut(j).add_scalar_mut(-mean);
    }
    let cov = x.transpose() * &x / (n as f64 - 1.0);
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let total: f64 = eig.eigenvalues.iter().map(|v| v.max(0.0)).sum();
    let tol = 1e-12 * total.max(f64::MIN_POSITIVE);

    let mut coords = vec![[0.0; 2]; n];
    let mut explained = [0.0; 2];
    for (c, &k) in order.iter().take(2).enumerate() {
        let lambda = eig.eigenvalues[k].max(0.0);
        if lambda <= tol {
            warn!(
                "embedding has rank {c}; PCA component {} set to zero",
                c + 1
            );
            continue;
        }
        let mut v = eig.eigenvectors.column(k).into_owned();
        let lead = v
            .iter()
            .copied()
            .fold(0.0f64, |m, a| if a.abs() > m.abs() { a } else { m });
        if lead < 0.0 {
            v.neg_mut();
        }
        let proj = &x * v;
        for (row, p) in coords.iter_mut().zip(proj.iter()) {
            row[c] = *p;
        }
        explained[c] = lambda;
    }
    Ok(Projection2d {
        coords,
        explained_variance: explained,
        total_variance: total,
    })
}
