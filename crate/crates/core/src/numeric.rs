//! Small numerical kernels: deterministic summation, symmetric eigensolver,
//! vector helpers.

/// Pairwise (tree) summation with a fixed shape: the slice is split at
/// `len / 2` recursively down to single elements.
///
/// The shape depends only on the length, so the result is bitwise
/// reproducible regardless of how the inputs were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        len => {
            let (left, right) = values.split_at(len / 2);
            pairwise_sum(left) + pairwise_sum(right)
        }
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Eigen-decomposition of a real symmetric `dim × dim` matrix (row-major)
/// by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order together with the matching unit
/// eigenvectors. A rotation is applied only to a nonzero off-diagonal entry,
/// so coordinates that are exactly decoupled (zero rows and columns) keep
/// exactly zero eigenvalues and exact coordinate eigenvectors.
pub fn symmetric_eigen(matrix: &[f64], dim: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert_eq!(matrix.len(), dim * dim);
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; dim * dim];
    for i in 0..dim {
        v[i * dim + i] = 1.0;
    }

    for _sweep in 0..100 {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..dim {
            diag += a[i * dim + i] * a[i * dim + i];
            for j in (i + 1)..dim {
                off += a[i * dim + j] * a[i * dim + j];
            }
        }
        if off == 0.0 || off <= 1e-32 * diag {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = a[p * dim + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * dim + p];
                let aqq = a[q * dim + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let akp = a[k * dim + p];
                    let akq = a[k * dim + q];
                    a[k * dim + p] = c * akp - s * akq;
                    a[k * dim + q] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = a[p * dim + k];
                    let aqk = a[q * dim + k];
                    a[p * dim + k] = c * apk - s * aqk;
                    a[q * dim + k] = s * apk + c * aqk;
                }
                a[p * dim + q] = 0.0;
                a[q * dim + p] = 0.0;
                for k in 0..dim {
                    let vkp = v[k * dim + p];
                    let vkq = v[k * dim + q];
                    v[k * dim + p] = c * vkp - s * vkq;
                    v[k * dim + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    // Eigenvalues at rounding level are tied at zero and keep index order, so
    // an exactly decoupled coordinate is not outranked by a rounding residue.
    let scale = (0..dim).map(|i| a[i * dim + i].abs()).fold(0.0, f64::max);
    let key = |i: usize| {
        let v = a[i * dim + i];
        if v.abs() <= 1e-14 * scale {
            0.0
        } else {
            v
        }
    };
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| key(j).total_cmp(&key(i)).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[i * dim + i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..dim).map(|k| v[k * dim + i]).collect())
        .collect();
    (values, vectors)
}
