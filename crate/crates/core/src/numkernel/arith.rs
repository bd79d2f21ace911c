//! Small exact integer routines: gcds, Kronecker symbol, divisor sums,
//! fundamental discriminants.

/// Non-negative gcd.
pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

/// Extended gcd: returns `(g, x, y)` with `a*x + b*y = g >= 0`.
pub fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Kronecker symbol `(a/n)` with the full extension to `n <= 0`.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
        n >>= twos;
    }
    result * jacobi(a.rem_euclid(n), n)
}

/// Jacobi symbol for odd positive `n`.
fn jacobi(a: i64, n: i64) -> i32 {
    debug_assert!(n > 0 && n % 2 == 1);
    let (mut a, mut n) = (a.rem_euclid(n), n);
    let mut result = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Prime factorization by trial division, as `(p, exponent)` pairs.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut n = n;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `σ_k(n)` by divisor enumeration.
pub fn sigma(k: u32, n: u64) -> u64 {
    let mut s = 0u64;
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            s += d.pow(k);
            let e = n / d;
            if e != d {
                s += e.pow(k);
            }
        }
        d += 1;
    }
    s
}

/// Memoized table `σ_k(0..=n)` (entry 0 is unused and set to 0).
pub fn sigma_table(k: u32, n: usize) -> Vec<u64> {
    let mut t = vec![0u64; n + 1];
    for d in 1..=n {
        let dk = (d as u64).pow(k);
        let mut m = d;
        while m <= n {
            t[m] += dk;
            m += d;
        }
    }
    t
}

pub fn is_square(n: i64) -> bool {
    if n < 0 {
        return false;
    }
    let r = (n as f64).sqrt() as i64;
    (r.saturating_sub(2)..=r + 2).any(|x| x >= 0 && x * x == n)
}

/// True for 1 and for discriminants of quadratic fields.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    let squarefree = |m: u64| factorize(m).iter().all(|&(_, e)| e == 1);
    match d.rem_euclid(4) {
        1 => squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// Decomposition of a fundamental discriminant into prime discriminants
/// (`-4`, `8`, `-8`, and `(-1)^{(p-1)/2} p` for odd `p`). Empty for `1`.
pub fn prime_discriminants(d: i64) -> Vec<i64> {
    assert!(is_fundamental_discriminant(d), "{d} is not fundamental");
    let mut out = Vec::new();
    let mut odd_product = 1i64;
    for (p, _) in factorize(d.unsigned_abs()) {
        if p == 2 {
            continue;
        }
        let p = p as i64;
        let pd = if p % 4 == 1 { p } else { -p };
        odd_product *= pd;
        out.push(pd);
    }
    if d % 4 == 0 {
        out.insert(0, d / odd_product);
    }
    out
}

/// Mathematical modulus into `[0, m)`.
pub fn modp(a: i64, m: i64) -> i64 {
    a.rem_euclid(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Legendre symbol by Euler's criterion, independent of the reciprocity loop.
    fn legendre_euler(a: i64, p: i64) -> i32 {
        let a = a.rem_euclid(p);
        if a == 0 {
            return 0;
        }
        let mut r = 1i64;
        let mut b = a;
        let mut e = (p - 1) / 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        if r == 1 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(12, 5), -1);
        for d in [-23, 1, 5, -4, 8, 13] {
            assert_eq!(kronecker(d, 1), 1);
        }
        assert_eq!(kronecker(-23, 6), 1);
        assert_eq!(kronecker(-23, 2), 1);
        assert_eq!(kronecker(-23, 3), 1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(-3, -1), -1);
        assert_eq!(kronecker(4, 0), 0);
        assert_eq!(kronecker(1, 0), 1);
    }

    #[test]
    fn kronecker_matches_euler_for_odd_primes() {
        for p in [3i64, 5, 7, 11, 13, 23, 47, 101] {
            for a in -60..60 {
                assert_eq!(kronecker(a, p), legendre_euler(a, p), "({a}/{p})");
            }
        }
    }

    proptest! {
        #[test]
        fn kronecker_completely_multiplicative(a in -500i64..500, m in -200i64..200, n in -200i64..200) {
            prop_assert_eq!(kronecker(a, m * n), kronecker(a, m) * kronecker(a, n));
        }
    }

    #[test]
    fn egcd_identity() {
        for (a, b) in [(12, 18), (-7, 5), (0, 9), (6, -1), (13, 0)] {
            let (g, x, y) = egcd(a, b);
            assert_eq!(g, gcd(a, b));
            assert_eq!(a * x + b * y, g);
        }
    }

    #[test]
    fn divisor_sums() {
        assert_eq!(sigma(3, 6), 252);
        assert_eq!(sigma(1, 12), 28);
        let t = sigma_table(3, 30);
        for n in 1..=30 {
            assert_eq!(t[n], sigma(3, n as u64));
        }
    }

    #[test]
    fn fundamental_discriminants() {
        for d in [1, -3, -4, 5, -7, 8, -8, 12, -23, -47, -71, -95, 24] {
            assert!(is_fundamental_discriminant(d), "{d}");
        }
        for d in [-12, 4, 9, -27, 0, 2, -16, 20] {
            assert!(!is_fundamental_discriminant(d), "{d}");
        }
        assert_eq!(prime_discriminants(-95), vec![5, -19]);
        assert_eq!(prime_discriminants(24), vec![-8, -3]);
        assert_eq!(prime_discriminants(-4), vec![-4]);
        assert!(prime_discriminants(1).is_empty());
    }
}
