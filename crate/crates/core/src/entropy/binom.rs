use num_bigint::BigUint;
use num_traits::One;

/// Primes up to `n` by a plain sieve.
pub(crate) fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn product(mut xs: Vec<BigUint>) -> BigUint {
    if xs.is_empty() {
        return BigUint::one();
    }
    while xs.len() > 1 {
        let mut next = Vec::with_capacity(xs.len().div_ceil(2));
        let mut it = xs.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a * b,
                None => a,
            });
        }
        xs = next;
    }
    xs.pop().expect("non-empty")
}

/// Exact `C(n, k)` via prime exponents and a product tree.
pub fn binomial(n: u64, k: u64) -> BigUint {
    assert!(k <= n, "k > n");
    let k = k.min(n - k);
    if k == 0 {
        return BigUint::one();
    }
    let mut factors = Vec::new();
    for p in primes_up_to(n) {
        // Kummer: exponent of p is the number of borrows in n − k.
        let mut e = 0u32;
        let mut pk = p;
        loop {
            e += (n / pk - k / pk - (n - k) / pk) as u32;
            match pk.checked_mul(p) {
                Some(v) if v <= n => pk = v,
                _ => break,
            }
        }
        if e > 0 {
            factors.push(BigUint::from(p).pow(e));
        }
    }
    product(factors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(n: u64, k: u64) -> BigUint {
        let mut c = BigUint::one();
        for i in 0..k {
            c = c * (n - i) / (i + 1);
        }
        c
    }

    #[test]
    fn matches_multiplicative_formula() {
        for n in 0..60 {
            for k in 0..=n {
                assert_eq!(binomial(n, k), naive(n, k), "C({n},{k})");
            }
        }
        assert_eq!(binomial(8, 4), BigUint::from(70u32));
        assert_eq!(binomial(1000, 500), naive(1000, 500));
    }
}
