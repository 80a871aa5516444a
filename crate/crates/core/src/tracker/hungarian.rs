use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<T> {
    /// (row, col) pairs sorted by row
    pub pairs: Vec<(usize, usize)>,
    pub total: T,
}

/// Minimum-cost assignment (Kuhn-Munkres with potentials, O(n²m)).
///
/// Rectangular matrices are handled by solving on the shorter side, so
/// exactly `min(rows, cols)` pairs are returned.
pub fn hungarian_assign<T: Scalar>(cost: &Matrix<T>) -> Result<Assignment<T>> {
    if let Some(i) = cost.as_slice().iter().position(|c| c.is_nan()) {
        return Err(Error::Input(format!(
            "NaN cost at ({}, {})",
            i / cost.cols().max(1),
            i % cost.cols().max(1)
        )));
    }
    if cost.as_slice().iter().any(|c| c.is_infinite()) {
        return Err(Error::Input(
            "infinite cost; use a finite sentinel for infeasible pairs".into(),
        ));
    }
    if cost.rows() == 0 || cost.cols() == 0 {
        return Ok(Assignment {
            pairs: Vec::new(),
            total: T::zero(),
        });
    }
    let transposed = cost.rows() > cost.cols();
    let a = if transposed {
        cost.transpose()
    } else {
        cost.clone()
    };
    let (n, m) = (a.rows(), a.cols());

    // 1-based arrays; index 0 is the virtual column.
    let inf = T::infinity();
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = a[(i0 - 1, j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut pairs: Vec<(usize, usize)> = (1..=m)
        .filter(|&j| p[j] != 0)
        .map(|j| {
            if transposed {
                (j - 1, p[j] - 1)
            } else {
                (p[j] - 1, j - 1)
            }
        })
        .collect();
    pairs.sort_unstable();
    let total = pairs
        .iter()
        .fold(T::zero(), |acc, &(r, c)| acc + cost[(r, c)]);
    Ok(Assignment { pairs, total })
}
