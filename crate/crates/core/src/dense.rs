//! Small dense helpers generic over the scalar: determinants and ranks of
//! matrices stored as row vectors.

use crate::scalar::Scalar;

/// Determinant by cofactor expansion along the first row. Intended for the
/// handful of sizes (≤ 6) that appear here.
pub fn det<T: Scalar>(m: &[Vec<T>]) -> T {
    let n = m.len();
    match n {
        0 => T::one(),
        1 => m[0][0].clone(),
        2 => m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone(),
        _ => {
            let mut acc = T::zero();
            for c in 0..n {
                if m[0][c].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<T>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = m[0][c].clone() * det(&minor);
                if c % 2 == 0 {
                    acc = acc + term;
                } else {
                    acc = acc - term;
                }
            }
            acc
        }
    }
}

/// Rank by Gaussian elimination with partial pivoting. A pivot counts as zero
/// when it is negligible at `tol · max|entry|` (floats) or exactly zero.
pub fn rank<T: Scalar>(rows: &[Vec<T>], tol: f64) -> usize {
    let mut a: Vec<Vec<T>> = rows.to_vec();
    let nr = a.len();
    if nr == 0 {
        return 0;
    }
    let nc = a[0].len();
    let scale = a.iter().flatten().map(|x| x.abs().as_f64()).fold(0.0_f64, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let thresh = tol * scale;
    let mut r = 0;
    for c in 0..nc {
        if r == nr {
            break;
        }
        let piv = (r..nr).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap()).unwrap();
        if a[piv][c].negligible(thresh) {
            continue;
        }
        a.swap(r, piv);
        for i in r + 1..nr {
            let f = a[i][c].clone() / a[r][c].clone();
            let (top, rest) = a.split_at_mut(i);
            for (x, p) in rest[0][c..].iter_mut().zip(&top[r][c..]) {
                *x = x.clone() - f.clone() * p.clone();
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_matches_known_values() {
        let m = vec![vec![2.0, 0.0, 1.0], vec![1.0, 3.0, 2.0], vec![1.0, 1.0, 1.0]];
        // 2(3-2) - 0 + 1(1-3) = 0
        assert!(det::<f64>(&m).abs() < 1e-15);
        let m = vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
        assert_eq!(det(&m), 2.0);
    }

    #[test]
    fn rank_of_repeated_rows() {
        let m = vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![0.0, 1.0, 0.0]];
        assert_eq!(rank(&m, 1e-12), 2);
        assert_eq!(rank::<f64>(&[vec![0.0; 3]], 1e-12), 0);
    }
}
