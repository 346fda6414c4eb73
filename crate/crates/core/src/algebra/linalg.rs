//! Exact linear algebra over the tower.

use super::field::Fe;

/// Reduced row echelon form in place; returns pivot columns. Pivots are
/// chosen by smallest representation size among the candidate rows.
pub fn rref(m: &mut [Vec<Fe>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).filter(|&i| !m[i][c].is_zero()).min_by_key(|&i| m[i][c].size()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv();
        for x in &mut m[r][c..] {
            *x = &*x * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                if !p.is_zero() {
                    *x = &*x - &(p * &f);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Fe>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

/// Basis of `{v : M v = 0}`, each vector scaled so its first nonzero entry
/// is 1. `cols` is needed when `m` has no rows.
pub fn nullspace(m: &[Vec<Fe>], cols: usize) -> Vec<Vec<Fe>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Fe::zero(); cols];
        v[free] = Fe::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -&a[row][free];
        }
        let lead = v.iter().find(|x| !x.is_zero()).unwrap().inv();
        basis.push(v.iter().map(|x| x * &lead).collect());
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_of_rank_one() {
        let m = vec![vec![Fe::from_int(1), Fe::from_int(2), Fe::from_int(3)], vec![Fe::from_int(2), Fe::from_int(4), Fe::from_int(6)]];
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &m {
                let dot = row.iter().zip(v).fold(Fe::zero(), |acc, (a, b)| &acc + &(a * b));
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn empty_system_is_everything() {
        assert_eq!(nullspace(&[], 2).len(), 2);
    }
}
