//! Tiny dense linear algebra for the 2-4 dimensional operators this crate
//! works with. Matrices are row-major `Vec<Vec<f64>>`.

use rand::Rng;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| s * x).collect()
}

pub fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

pub fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

pub fn scale_matrix(n: usize, s: f64) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { s } else { 0.0 }).collect()).collect()
}

pub fn matvec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, x)).collect()
}

/// `M^t x`.
pub fn matvec_t(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let n = m[0].len();
    let mut out = vec![0.0; n];
    for (row, &xi) in m.iter().zip(x) {
        for (o, &v) in out.iter_mut().zip(row) {
            *o += v * xi;
        }
    }
    out
}

pub fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for l in 0..k {
            let v = a[i][l];
            if v != 0.0 {
                for j in 0..m {
                    out[i][j] += v * b[l][j];
                }
            }
        }
    }
    out
}

/// Gauss-Jordan inverse with partial pivoting; `None` when the matrix is
/// singular (pivot below 1e-12).
pub fn mat_inverse(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv = identity(n);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        })?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                if f != 0.0 {
                    for j in 0..n {
                        a[i][j] -= f * a[col][j];
                        inv[i][j] -= f * inv[col][j];
                    }
                }
            }
        }
    }
    Some(inv)
}

/// Rank of a set of row vectors via Gaussian elimination.
pub fn rank(rows: &[Vec<f64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let cols = a[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).max_by(|&i, &j| {
            a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap()
        }) else {
            break;
        };
        if a[p][c].abs() < 1e-9 {
            continue;
        }
        a.swap(r, p);
        for i in (r + 1)..a.len() {
            let f = a[i][c] / a[r][c];
            for j in c..cols {
                a[i][j] -= f * a[r][j];
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

/// Random orthogonal matrix from Gram-Schmidt on Gaussian columns.
pub fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> Vec<Vec<f64>> {
    loop {
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
        'outer: for _ in 0..n {
            let mut v: Vec<f64> = (0..n).map(|_| crate::norm::gaussian(rng)).collect();
            for c in &cols {
                let p = dot(c, &v);
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= p * ci;
                }
            }
            let nv = norm2(&v);
            if nv < 1e-6 {
                break 'outer;
            }
            cols.push(v.iter().map(|x| x / nv).collect());
        }
        if cols.len() == n {
            // Columns to rows: transpose (orthogonal either way).
            let mut m = vec![vec![0.0; n]; n];
            for (j, c) in cols.iter().enumerate() {
                for i in 0..n {
                    m[i][j] = c[i];
                }
            }
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn inverse_round_trip() {
        let m = vec![vec![2.0, 1.0, 0.0], vec![0.5, 3.0, -1.0], vec![0.0, 1.0, 1.0]];
        let inv = mat_inverse(&m).unwrap();
        let prod = mat_mul(&m, &inv);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((prod[i][j] - expect).abs() < 1e-10);
            }
        }
        assert!(mat_inverse(&[vec![1.0, 2.0], vec![2.0, 4.0]]).is_none());
    }

    #[test]
    fn rank_detects_degeneracy() {
        assert_eq!(rank(&[vec![1.0, 0.0], vec![0.0, 1.0]]), 2);
        assert_eq!(rank(&[vec![1.0, 2.0], vec![2.0, 4.0]]), 1);
        assert_eq!(rank(&[vec![1.0, 0.0], vec![-1.0, 0.0]]), 1);
    }

    #[test]
    fn random_orthogonal_is_orthogonal() {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(1);
        for n in 2..=4 {
            let q = random_orthogonal(n, &mut rng);
            let qt: Vec<Vec<f64>> =
                (0..n).map(|i| (0..n).map(|j| q[j][i]).collect()).collect();
            let prod = mat_mul(&q, &qt);
            for i in 0..n {
                for j in 0..n {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((prod[i][j] - expect).abs() < 1e-9);
                }
            }
        }
    }
}
