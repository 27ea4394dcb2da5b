// SPDX-License-Identifier: MIT OR Apache-2.0

//! Antidiagonal pairing of ℕ×ℕ with ℕ and the zigzag coding of ℤ.
//!
//! `pair(i, j) = (i + j)(i + j + 1)/2 + i`. The first coordinate `i` is the
//! "row"; its fiber `{pair(i, j) : j ∈ ℕ}` has minimum `i(i + 3)/2`.

/// Antidiagonal pairing. Panics if the code does not fit in `u64`.
pub fn pair(i: u64, j: u64) -> u64 {
    let s = i.checked_add(j).expect("pairing overflow");
    let tri = if s.is_multiple_of(2) {
        (s / 2).checked_mul(s + 1)
    } else {
        s.checked_mul(s.div_ceil(2))
    }
    .expect("pairing overflow");
    tri.checked_add(i).expect("pairing overflow")
}

/// Inverse of [`pair`].
pub fn unpair(k: u64) -> (u64, u64) {
    // largest s with s(s+1)/2 <= k
    let mut s = ((((k as f64) * 8.0 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while triangle(s + 1) <= k {
        s += 1;
    }
    while triangle(s) > k {
        s -= 1;
    }
    let i = k - triangle(s);
    (i, s - i)
}

fn triangle(s: u64) -> u64 {
    let (a, b) = if s.is_multiple_of(2) {
        (s / 2, s + 1)
    } else {
        (s, s.div_ceil(2))
    };
    a.saturating_mul(b)
}

/// First coordinate of the unpairing of `k`.
pub fn row(k: u64) -> u64 {
    unpair(k).0
}

/// Zigzag code of an integer: 0, 1, -1, 2, -2, ... get codes 0, 1, 2, 3, 4, ...
pub fn zigzag(x: i64) -> u64 {
    if x > 0 {
        (x as u64).checked_mul(2).map(|v| v - 1).expect("zigzag overflow")
    } else {
        x.unsigned_abs().checked_mul(2).expect("zigzag overflow")
    }
}

/// Inverse of [`zigzag`].
pub fn unzigzag(code: u64) -> i64 {
    if code % 2 == 1 {
        ((code - 1) / 2 + 1) as i64
    } else {
        -((code / 2) as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_is_a_bijection_on_a_prefix() {
        for k in 0..5000 {
            let (i, j) = unpair(k);
            assert_eq!(pair(i, j), k);
        }
    }

    #[test]
    fn row_minima() {
        let minima: Vec<u64> = (0..4).map(|n| pair(n, 0)).collect();
        assert_eq!(minima, vec![0, 2, 5, 9]);
        assert_eq!(row(0), 0);
        assert_eq!(row(2), 1);
        assert_eq!(row(5), 2);
        assert_eq!(row(9), 3);
    }

    #[test]
    fn zigzag_codes() {
        assert_eq!((0..5).map(unzigzag).collect::<Vec<_>>(), vec![0, 1, -1, 2, -2]);
        for x in -100..100 {
            assert_eq!(unzigzag(zigzag(x)), x);
        }
    }

    #[test]
    fn unpair_large() {
        let k = pair(123_456, 7_890_123);
        assert_eq!(unpair(k), (123_456, 7_890_123));
    }
}
