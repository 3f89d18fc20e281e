//! Dense null-space extraction by Gaussian elimination with complete pivoting.
//!
//! Deliberately independent of the sparse factorization used by the direct
//! solver, so the two can serve as cross-checks of each other.

use crate::C64;

pub(crate) struct NullVector {
    pub vector: Vec<C64>,
    /// `|U[n-1, n-1]| / |U[0, 0]|`, small for a singular input.
    pub last_pivot: f64,
    /// `|U[n-2, n-2]| / |U[0, 0]|`, small when the null space has dimension > 1.
    pub second_last_pivot: f64,
}

/// Null vector of the `n x n` row-major matrix `a`.
pub(crate) fn null_vector(mut a: Vec<C64>, n: usize) -> NullVector {
    assert_eq!(a.len(), n * n);
    let mut cols: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (mut pi, mut pj, mut best) = (k, k, -1.0);
        for i in k..n {
            for j in k..n {
                let v = a[i * n + j].norm_sqr();
                if v > best {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if pi != k {
            for j in 0..n {
                a.swap(k * n + j, pi * n + j);
            }
        }
        if pj != k {
            for i in 0..n {
                a.swap(i * n + k, i * n + pj);
            }
            cols.swap(k, pj);
        }
        let pivot = a[k * n + k];
        if pivot.norm() == 0.0 {
            continue;
        }
        for i in k + 1..n {
            let f = a[i * n + k] / pivot;
            if f.norm() == 0.0 {
                continue;
            }
            a[i * n + k] = C64::new(0.0, 0.0);
            for j in k + 1..n {
                let u = a[k * n + j];
                a[i * n + j] -= f * u;
            }
        }
    }
    let scale = a[0].norm();
    let ratio = |k: usize| {
        if scale == 0.0 {
            0.0
        } else {
            a[k * n + k].norm() / scale
        }
    };
    let last_pivot = ratio(n - 1);
    let second_last_pivot = if n > 1 { ratio(n - 2) } else { 1.0 };

    let mut y = vec![C64::new(0.0, 0.0); n];
    y[n - 1] = C64::new(1.0, 0.0);
    for i in (0..n - 1).rev() {
        let mut s = C64::new(0.0, 0.0);
        for j in i + 1..n {
            s += a[i * n + j] * y[j];
        }
        let d = a[i * n + i];
        y[i] = if d.norm() == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            -s / d
        };
    }
    let mut vector = vec![C64::new(0.0, 0.0); n];
    for (k, &c) in cols.iter().enumerate() {
        vector[c] = y[k];
    }
    NullVector {
        vector,
        last_pivot,
        second_last_pivot,
    }
}
