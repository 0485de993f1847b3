//! Spitzer aperiodicity: is the walk confined to a proper subgroup of the lattice?

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, u, v) = ext_gcd(b, a % b);
        (g, v, u - (a / b) * v)
    }
}

/// Hermite basis of the subgroup of ℤ² generated by `vectors`.
///
/// Returns `(a, b, c)` such that the subgroup is spanned by the rows
/// `(a, b)` and `(0, c)` with `a, c ≥ 0`.
pub fn hermite_basis(vectors: &[(i64, i64)]) -> (i64, i64, i64) {
    let (mut a, mut b, mut c) = (0i128, 0i128, 0i128);
    for &(x, y) in vectors {
        let (x, y) = (i128::from(x), i128::from(y));
        if x == 0 {
            c = ext_gcd(c, y).0;
        } else if a == 0 {
            // The old (0, b) row, if any, is pure second-coordinate.
            c = ext_gcd(c, b).0;
            a = x;
            b = y;
        } else {
            let (g, u, v) = ext_gcd(a, x);
            let nb = u * b + v * y;
            // (x/g)·(a,b) − (a/g)·(x,y) has first coordinate zero.
            let residue = (x / g) * b - (a / g) * y;
            a = g;
            b = nb;
            c = ext_gcd(c, residue).0;
        }
        if c != 0 {
            b = b.rem_euclid(c);
        }
    }
    if a < 0 {
        a = -a;
        b = -b;
    }
    if c != 0 {
        b = b.rem_euclid(c);
    }
    (a as i64, b as i64, c as i64)
}

/// True iff the `support` points generate ℤ² as a group.
pub fn generates_plane(support: &[(i64, i64)]) -> bool {
    let (a, _, c) = hermite_basis(support);
    a == 1 && c == 1
}

/// True iff the `support` points generate ℤ as a group.
pub fn generates_line(support: &[i64]) -> bool {
    support
        .iter()
        .fold(0i128, |g, &x| ext_gcd(g, i128::from(x)).0)
        == 1
}
