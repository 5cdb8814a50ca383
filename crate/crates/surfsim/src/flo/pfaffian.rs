//! Pfaffian of a real antisymmetric matrix via skew-symmetric elimination
//! (Parlett–Reid) with partial pivoting.
//!
//! The Pfaffian obeys Pf(B A Bᵀ) = det(B) Pf(A). Eliminating the k-th
//! column below row k+1 with unit-determinant row/column operations, and
//! tracking row/column swaps (each flips the sign), reduces the matrix to a
//! form whose Pfaffian is the product of the (k, k+1) pivots.

/// Pfaffian of the `n`×`n` antisymmetric matrix stored row-major in `a`.
/// `a` is destroyed. Returns 0.0 for odd `n` and 1.0 for `n == 0`.
pub fn pfaffian_in_place(a: &mut [f64], n: usize) -> f64 {
    assert_eq!(a.len(), n * n, "matrix buffer has wrong length");
    if n % 2 == 1 {
        return 0.0;
    }
    if n == 0 {
        return 1.0;
    }
    let idx = |i: usize, j: usize| i * n + j;
    let mut pf = 1.0;
    let mut k = 0;
    while k + 1 < n {
        // Partial pivot: bring the largest entry of column k (rows > k)
        // into position (k+1, k).
        let mut ip = k + 1;
        let mut best = a[idx(k + 1, k)].abs();
        for i in (k + 2)..n {
            let v = a[idx(i, k)].abs();
            if v > best {
                best = v;
                ip = i;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if ip != k + 1 {
            for j in 0..n {
                a.swap(idx(k + 1, j), idx(ip, j));
            }
            for i in 0..n {
                a.swap(idx(i, k + 1), idx(i, ip));
            }
            pf = -pf;
        }
        pf *= a[idx(k, k + 1)];
        // Zero column k below row k+1 (and, by the matching column
        // operations, row k to the right of column k+1).
        let denom = a[idx(k + 1, k)];
        for i in (k + 2)..n {
            let mu = a[idx(i, k)] / denom;
            if mu != 0.0 {
                for j in 0..n {
                    a[idx(i, j)] -= mu * a[idx(k + 1, j)];
                }
                for r in 0..n {
                    a[idx(r, i)] -= mu * a[idx(r, k + 1)];
                }
            }
        }
        k += 2;
    }
    pf
}

/// Pfaffian computed by recursive cofactor expansion along the first row:
/// Pf(A) = Σ_j (−1)^j a_{0j} Pf(A with rows/cols 0 and j removed).
/// Exponential cost — reference implementation for small matrices only.
pub fn pfaffian_cofactor(a: &[f64], n: usize) -> f64 {
    assert_eq!(a.len(), n * n);
    if n % 2 == 1 {
        return 0.0;
    }
    if n == 0 {
        return 1.0;
    }
    if n == 2 {
        return a[1];
    }
    let mut total = 0.0;
    let mut sign = 1.0;
    for j in 1..n {
        let coeff = a[j];
        if coeff != 0.0 {
            let m = n - 2;
            let mut sub = vec![0.0; m * m];
            let keep: Vec<usize> = (1..n).filter(|&r| r != j).collect();
            for (si, &ri) in keep.iter().enumerate() {
                for (sj, &rj) in keep.iter().enumerate() {
                    sub[si * m + sj] = a[ri * n + rj];
                }
            }
            total += sign * coeff * pfaffian_cofactor(&sub, m);
        }
        sign = -sign;
    }
    total
}
