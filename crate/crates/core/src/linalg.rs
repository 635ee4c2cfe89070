//! Singular value decomposition of real 3x3 matrices (one-sided Jacobi).

use crate::scalar::Scalar;

pub type Mat3<T> = [[T; 3]; 3];

/// `m = U diag(values) V^T` with values sorted in descending order.
///
/// `u[k]` and `v[k]` are the k-th left and right singular vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Svd3<T> {
    pub values: [T; 3],
    pub u: [[T; 3]; 3],
    pub v: [[T; 3]; 3],
}

const MAX_SWEEPS: usize = 60;

pub fn svd3<T: Scalar>(m: &Mat3<T>) -> Svd3<T> {
    // work on columns: cols[j][i] = m[i][j]
    let mut cols = [[T::zero(); 3]; 3];
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            cols[j][i] = *v;
        }
    }
    let mut vcols = [[T::zero(); 3]; 3];
    for (j, c) in vcols.iter_mut().enumerate() {
        c[j] = T::one();
    }

    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..2 {
            for q in (p + 1)..3 {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == T::zero() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut vcols, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order = [0usize, 1, 2];
    let norms = cols.map(|c| dot(&c, &c).sqrt());
    order.sort_by(|&a, &b| {
        norms[b]
            .partial_cmp(&norms[a])
            .expect("finite singular values")
    });

    let values = order.map(|k| norms[k]);
    let v = order.map(|k| vcols[k]);
    let mut u = [[T::zero(); 3]; 3];
    for (slot, &k) in order.iter().enumerate() {
        if norms[k] > T::min_positive_value() {
            u[slot] = cols[k].map(|x| x / norms[k]);
        }
    }
    complete_basis(&mut u, &values);
    Svd3 { values, u, v }
}

fn dot<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn rotate<T: Scalar>(cols: &mut [[T; 3]; 3], p: usize, q: usize, c: T, s: T) {
    for i in 0..3 {
        let cp = cols[p][i];
        let cq = cols[q][i];
        cols[p][i] = c * cp - s * cq;
        cols[q][i] = s * cp + c * cq;
    }
}

fn cross<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Fills left vectors belonging to zero singular values with an orthonormal completion.
fn complete_basis<T: Scalar>(u: &mut [[T; 3]; 3], values: &[T; 3]) {
    let tiny = T::min_positive_value();
    for k in 0..3 {
        if values[k] > tiny {
            continue;
        }
        let mut candidate = [T::zero(); 3];
        for axis in 0..3 {
            let mut e = [T::zero(); 3];
            e[axis] = T::one();
            for j in 0..k {
                let d = dot(&e, &u[j]);
                for i in 0..3 {
                    e[i] = e[i] - d * u[j][i];
                }
            }
            let n = dot(&e, &e).sqrt();
            if n > T::lit(0.5) {
                candidate = e.map(|x| x / n);
                break;
            }
        }
        if k == 2 {
            candidate = cross(&u[0], &u[1]);
        }
        u[k] = candidate;
    }
}
