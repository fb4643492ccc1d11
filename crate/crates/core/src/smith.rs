//! Smith and Hermite normal forms of integer matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMat = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> IntMat {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect()
}

pub fn mat_mul(a: &IntMat, b: &IntMat, inner: usize, cols: usize) -> IntMat {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Result of a Smith normal form computation `U·R·V = S`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMat,
    pub v: IntMat,
    /// Diagonal of `S`, of length `min(rows, cols)`; zeros last.
    pub diag: Vec<BigInt>,
}

/// Smith normal form of an `m × n` integer matrix with unimodular transforms.
pub fn smith(r: &IntMat, m: usize, n: usize) -> Smith {
    let mut a: IntMat = r.clone();
    let mut u = identity(m);
    let mut v = identity(n);
    let k = m.min(n);
    for t in 0..k {
        loop {
            // smallest nonzero entry in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !a[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                // trailing block is zero
                return finish(a, u, v, m, n);
            };
            a.swap(t, pi);
            u.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..m {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the rest by the pivot
            let mut bad = None;
            'outer: for i in t + 1..m {
                for j in t + 1..n {
                    if !a[i][j].is_multiple_of(&a[t][t]) {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => {
                    // row_t += row_i then repeat
                    let one = -BigInt::one();
                    row_axpy(&mut a, t, i, &one);
                    row_axpy(&mut u, t, i, &one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
    }
    finish(a, u, v, m, n)
}

fn finish(a: IntMat, u: IntMat, v: IntMat, m: usize, n: usize) -> Smith {
    let diag = (0..m.min(n)).map(|i| a[i][i].clone()).collect();
    Smith { u, v, diag }
}

/// row_i -= q * row_src
fn row_axpy(a: &mut IntMat, i: usize, src: usize, q: &BigInt) {
    let s = a[src].clone();
    for (x, y) in a[i].iter_mut().zip(s.iter()) {
        *x -= q * y;
    }
}

/// col_j -= q * col_src
fn col_axpy(a: &mut IntMat, j: usize, src: usize, q: &BigInt) {
    for row in a.iter_mut() {
        let y = row[src].clone();
        row[j] -= q * y;
    }
}

/// Row-style Hermite normal form: returns the nonzero rows of an upper
/// echelon basis of the row lattice, with positive pivots and entries above
/// each pivot reduced into `[0, pivot)`.
pub fn hermite_rows(rows: &[Vec<BigInt>], n: usize) -> IntMat {
    let mut a: IntMat = rows
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    let mut out: IntMat = Vec::new();
    let mut col = 0;
    while col < n && !a.is_empty() {
        // gcd-combine the column among remaining rows
        loop {
            let nz: Vec<usize> = (0..a.len()).filter(|&i| !a[i][col].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| a[i][col].abs()).unwrap();
            for &i in &nz {
                if i != p {
                    let q = a[i][col].div_floor(&a[p][col]);
                    row_axpy(&mut a, i, p, &q);
                }
            }
        }
        if let Some(p) = (0..a.len()).find(|&i| !a[i][col].is_zero()) {
            let mut row = a.swap_remove(p);
            if row[col].is_negative() {
                for x in row.iter_mut() {
                    *x = -&*x;
                }
            }
            out.push(row);
            a.retain(|r| r.iter().any(|x| !x.is_zero()));
        }
        col += 1;
    }
    // reduce above pivots
    for i in 0..out.len() {
        let pc = out[i].iter().position(|x| !x.is_zero()).unwrap();
        let piv = out[i][pc].clone();
        for k in 0..i {
            let q = out[k][pc].div_floor(&piv);
            if !q.is_zero() {
                let s = out[i].clone();
                for (x, y) in out[k].iter_mut().zip(s.iter()) {
                    *x -= &q * y;
                }
            }
        }
    }
    out
}

/// Extended gcd over a list: returns `(g, c)` with `Σ c_i x_i = g ≥ 0`.
pub fn gcd_combination(xs: &[i64]) -> (i64, Vec<i64>) {
    let mut g: i64 = 0;
    let mut c = vec![0i64; xs.len()];
    for (i, &x) in xs.iter().enumerate() {
        if x == 0 {
            continue;
        }
        if g == 0 {
            g = x.abs();
            c[i] = x.signum();
            continue;
        }
        let e = g.extended_gcd(&x);
        // e.gcd = e.x * g + e.y * x
        for ck in c.iter_mut().take(i) {
            *ck *= e.x;
        }
        c[i] = e.y;
        g = e.gcd;
        if g < 0 {
            g = -g;
            for ck in c.iter_mut() {
                *ck = -*ck;
            }
        }
    }
    (g, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMat {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn smith_identity_holds() {
        let r = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith(&r, 3, 3);
        let urv = mat_mul(&mat_mul(&s.u, &r, 3, 3), &s.v, 3, 3);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j {
                    s.diag[i].clone()
                } else {
                    BigInt::zero()
                };
                assert_eq!(urv[i][j], expect);
            }
        }
        let d: Vec<i64> = s.diag.iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(d, vec![2, 6, 12]);
    }

    #[test]
    fn hermite_basic() {
        let h = hermite_rows(&m(&[&[2, 1], &[0, 3], &[4, 0]]), 2);
        assert_eq!(h, m(&[&[2, 0], &[0, 1]]));
    }

    #[test]
    fn gcd_comb() {
        let xs = [6, 10, 15];
        let (g, c) = gcd_combination(&xs);
        assert_eq!(g, 1);
        assert_eq!(xs.iter().zip(&c).map(|(a, b)| a * b).sum::<i64>(), 1);
    }
}
