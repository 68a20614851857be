//! Small number theory over machine integers and [`Exact`] scalars.


use crate::scalar::{mod_pow, Exact};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Odd primes in `[lo, hi]`, ascending.
pub fn odd_primes(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi).filter(|&q| q % 2 == 1 && is_prime(q)).collect()
}

/// Positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Distinct prime factors, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Multiplicative order of a unit `r` modulo `p^m`, where `p_pow_m = p^m`.
pub fn unit_order_mod_prime_power<T: Exact>(r: &T, p: u64, p_pow_m: &T) -> T {
    let pt = T::from_u64_exact(p);
    // |(Z/p^m)^*| = p^(m-1) (p - 1)
    let mut order = p_pow_m.clone() / pt.clone() * T::from_u64_exact(p - 1);
    let mut primes = prime_factors(p - 1);
    primes.push(p);
    for q in primes {
        let qt = T::from_u64_exact(q);
        while order.is_multiple_of(&qt) {
            let candidate = order.clone() / qt.clone();
            if mod_pow(r, &candidate, p_pow_m).is_one() {
                order = candidate;
            } else {
                break;
            }
        }
    }
    order
}

/// Least primitive root modulo `p^m` for an odd prime `p`.
pub fn least_primitive_root<T: Exact>(p: u64, p_pow_m: &T) -> T {
    let phi = p_pow_m.clone() / T::from_u64_exact(p) * T::from_u64_exact(p - 1);
    let mut g = T::one() + T::one();
    loop {
        if !g.is_multiple_of(&T::from_u64_exact(p)) && unit_order_mod_prime_power(&g, p, p_pow_m) == phi {
            return g;
        }
        g = g + T::one();
    }
}
