//! Exact integer arithmetic: factorization, square-freeness, Jacobi/Kronecker
//! symbols, modular square roots with Hensel lifting, CRT, and a segmented
//! square-free sieve over arithmetic progressions.
//!
//! All operations are pure and exact. Inputs are capped at 2^94 so that every
//! intermediate product downstream (form composition in particular) stays in
//! 128-bit signed range.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::{Error, Result};

/// Default magnitude cap for factorization inputs. Keeps all downstream
/// intermediates within i128.
pub const DEFAULT_MAGNITUDE_CAP: u128 = 1 << 94;

/// Trial-division bound used before switching to Pollard rho.
const TRIAL_DIVISION_BOUND: u128 = 100_000;

/// Exact prime factorization, primes strictly increasing, exponents >= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pairs: Vec<(u128, u32)>,
}

impl Factorization {
    /// Build from (prime, exponent) pairs; sorts and validates the invariants.
    pub fn from_pairs(mut pairs: Vec<(u128, u32)>) -> Result<Self> {
        pairs.sort_unstable();
        for window in pairs.windows(2) {
            if window[0].0 == window[1].0 {
                return Err(Error::Domain(format!(
                    "duplicate prime {} in factorization",
                    window[0].0
                )));
            }
        }
        for &(p, e) in &pairs {
            if e == 0 {
                return Err(Error::Domain(format!("zero exponent for prime {p}")));
            }
            if !is_prime(p) {
                return Err(Error::Domain(format!("{p} is not prime")));
            }
        }
        Ok(Factorization { pairs })
    }

    /// The (prime, exponent) pairs in strictly increasing prime order.
    pub fn pairs(&self) -> &[(u128, u32)] {
        &self.pairs
    }

    /// Product of prime^exponent.
    pub fn value(&self) -> u128 {
        self.pairs
            .iter()
            .fold(1u128, |acc, &(p, e)| acc * p.pow(e))
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.pairs.len()
    }

    /// Number of distinct odd prime factors.
    pub fn odd_omega(&self) -> usize {
        self.pairs.iter().filter(|&&(p, _)| p != 2).count()
    }

    /// Divisor-count function tau.
    pub fn divisor_count(&self) -> u128 {
        self.pairs
            .iter()
            .fold(1u128, |acc, &(_, e)| acc * (e as u128 + 1))
    }

    /// True when every exponent is 1.
    pub fn is_squarefree(&self) -> bool {
        self.pairs.iter().all(|&(_, e)| e == 1)
    }

    /// Exponent of `p` in the factored integer (0 when p does not divide it).
    pub fn exponent_of(&self, p: u128) -> u32 {
        self.pairs
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }
}

/// Greatest common divisor on u128.
pub fn gcd_u128(a: u128, b: u128) -> u128 {
    a.gcd(&b)
}

/// Greatest common divisor on u64.
pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Least common multiple on u64; errors on overflow past the magnitude cap.
pub fn lcm_u64(a: u64, b: u64) -> Result<u64> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    (a / gcd_u64(a, b))
        .checked_mul(b)
        .ok_or_else(|| Error::Size("lcm overflow".into()))
}

/// Extended gcd: returns (g, x, y) with a*x + b*y = g >= 0.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        return if a < 0 { (-a, -1, 0) } else { (a, 1, 0) };
    }
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
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

/// Modular inverse of a mod m, when gcd(a, m) = 1.
pub fn mod_inverse(a: i128, m: u128) -> Option<u128> {
    if m == 0 {
        return None;
    }
    if m == 1 {
        return Some(0);
    }
    let a_red = a.rem_euclid(m as i128);
    let (g, x, _) = ext_gcd(a_red, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u128)
}

/// a * b mod m without overflow; m must be below 2^127.
pub fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    debug_assert!(m > 0 && m < (1 << 127));
    if m <= u64::MAX as u128 {
        return ((a % m) * (b % m)) % m;
    }
    // Peasant multiplication; a + a stays below 2^128 because m < 2^127.
    let mut result = 0u128;
    let mut a = a % m;
    let mut b = b % m;
    while b > 0 {
        if b & 1 == 1 {
            result = (result + a) % m;
        }
        a = (a + a) % m;
        b >>= 1;
    }
    result
}

/// a^e mod m on u128.
pub fn pow_mod_u128(mut a: u128, mut e: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u128;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod_u128(result, a, m);
        }
        a = mul_mod_u128(a, a, m);
        e >>= 1;
    }
    result
}

/// a^e mod m on u64.
pub fn pow_mod_u64(a: u64, e: u64, m: u64) -> u64 {
    pow_mod_u128(a as u128, e as u128, m as u128) as u64
}

/// Deterministic Miller-Rabin. The 12-prime base set is a proven witness set
/// below 2^64; above that it is a strong pseudoprime test.
pub fn is_prime(n: u128) -> bool {
    const BASES: [u128; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod_u128(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u128(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// u64 convenience wrapper for [`is_prime`].
pub fn is_prime_u64(n: u64) -> bool {
    is_prime(n as u128)
}

/// Pollard rho with Brent cycle detection. Returns a nontrivial factor of a
/// composite odd n > 1.
fn pollard_rho_brent(n: u128) -> u128 {
    debug_assert!(n > 3 && n & 1 == 1 && !is_prime(n));
    for c in 1u128.. {
        let mut y = 2u128;
        let mut r = 1u128;
        let mut q = 1u128;
        let mut g = 1u128;
        let mut x = 0u128;
        let mut ys = 0u128;
        const BATCH: u128 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = (mul_mod_u128(y, y, n) + c) % n;
            }
            let mut k = 0u128;
            while k < r && g == 1 {
                ys = y;
                let steps = BATCH.min(r - k);
                for _ in 0..steps {
                    y = (mul_mod_u128(y, y, n) + c) % n;
                    q = mul_mod_u128(q, x.abs_diff(y), n);
                }
                g = gcd_u128(q, n);
                k += steps;
            }
            r *= 2;
        }
        if g == n {
            // Backtrack one step at a time.
            loop {
                ys = (mul_mod_u128(ys, ys, n) + c) % n;
                g = gcd_u128(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

/// Exact prime factorization of n >= 1 under the default magnitude cap.
pub fn factorize(n: u128) -> Result<Factorization> {
    factorize_with_cap(n, DEFAULT_MAGNITUDE_CAP)
}

/// Exact prime factorization with an explicit magnitude cap.
pub fn factorize_with_cap(n: u128, cap: u128) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain("factorize requires n >= 1".into()));
    }
    if n > cap {
        return Err(Error::Size(format!("{n} exceeds magnitude cap {cap}")));
    }
    let mut pairs: Vec<(u128, u32)> = Vec::new();
    let mut m = n;
    let push = |p: u128, e: u32, pairs: &mut Vec<(u128, u32)>| {
        if e > 0 {
            pairs.push((p, e));
        }
    };
    let mut e2 = 0;
    while m & 1 == 0 {
        m >>= 1;
        e2 += 1;
    }
    push(2, e2, &mut pairs);
    let mut d = 3u128;
    while d <= TRIAL_DIVISION_BOUND && d * d <= m {
        if m % d == 0 {
            let mut e = 0;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            push(d, e, &mut pairs);
        }
        d += 2;
    }
    if m > 1 {
        // Remaining cofactor has no prime factor below the trial bound.
        let mut stack = vec![m];
        let mut large: Vec<u128> = Vec::new();
        while let Some(v) = stack.pop() {
            if is_prime(v) {
                large.push(v);
                continue;
            }
            // Perfect powers of a prime defeat rho's gcd trick less often than
            // they defeat naive splitting; peel squares first.
            let r = isqrt_u128(v);
            if r * r == v {
                stack.push(r);
                stack.push(r);
                continue;
            }
            let f = pollard_rho_brent(v);
            stack.push(f);
            stack.push(v / f);
        }
        large.sort_unstable();
        let mut i = 0;
        while i < large.len() {
            let p = large[i];
            let mut e = 0;
            while i < large.len() && large[i] == p {
                e += 1;
                i += 1;
            }
            push(p, e, &mut pairs);
        }
    }
    pairs.sort_unstable();
    debug_assert_eq!(
        pairs.iter().fold(1u128, |acc, &(p, e)| acc * p.pow(e)),
        n
    );
    Ok(Factorization { pairs })
}

/// True iff no prime square divides n.
pub fn is_squarefree(n: u128) -> Result<bool> {
    if n == 0 {
        return Err(Error::Domain("is_squarefree requires n >= 1".into()));
    }
    Ok(factorize(n)?.is_squarefree())
}

/// Infallible u64 variant of [`is_squarefree`].
pub fn is_squarefree_u64(n: u64) -> bool {
    is_squarefree(n as u128).expect("u64 inputs are below the cap")
}

/// Jacobi symbol (a/n) for odd n >= 1.
pub fn jacobi(a: i128, n: u128) -> Result<i32> {
    if n == 0 || n & 1 == 0 {
        return Err(Error::Domain(format!(
            "jacobi requires an odd positive modulus, got {n}"
        )));
    }
    let mut a = a.rem_euclid(n as i128) as u128;
    let mut n = n;
    let mut result = 1i32;
    while a != 0 {
        while a & 1 == 0 {
            a >>= 1;
            let r = n & 7;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a & 3 == 3 && n & 3 == 3 {
            result = -result;
        }
        a %= n;
    }
    Ok(if n == 1 { result } else { 0 })
}

/// Kronecker symbol (a/n), the total extension of the Jacobi symbol.
pub fn kronecker(a: i128, n: i128) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut n_abs = n.unsigned_abs();
    if n < 0 && a < 0 {
        result = -result;
    }
    let mut twos = 0u32;
    while n_abs & 1 == 0 {
        n_abs >>= 1;
        twos += 1;
    }
    if twos > 0 {
        if a & 1 == 0 {
            return 0;
        }
        if twos & 1 == 1 {
            // (a/2) for odd a depends on a mod 8.
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    result * jacobi(a, n_abs).expect("odd modulus by construction")
}

/// Integer square root (floor) on u128.
pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = 1u128 << (n.ilog2() / 2 + 1);
    loop {
        let y = (x + n / x) / 2;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// Integer square root (floor) on u64.
pub fn isqrt_u64(n: u64) -> u64 {
    isqrt_u128(n as u128) as u64
}

/// Floor of the k-th root of n.
pub fn nth_root(n: u128, k: u32) -> u128 {
    assert!(k >= 1);
    if k == 1 || n < 2 {
        return n;
    }
    if k == 2 {
        return isqrt_u128(n);
    }
    let mut lo = 1u128;
    let mut hi = 1u128 << (n.ilog2() / k + 1);
    while lo < hi {
        let mid = lo + (hi - lo + 1) / 2;
        match mid.checked_pow(k) {
            Some(v) if v <= n => lo = mid,
            _ => hi = mid - 1,
        }
    }
    lo
}

/// Floor of x^(p/q) computed exactly (big-integer comparison, no floats).
pub fn floor_root_of_pow(x: u128, p: u32, q: u32) -> u128 {
    assert!(q >= 1);
    if x == 0 {
        return 0;
    }
    let g = p.gcd(&q);
    let (p, q) = (p / g, q / g);
    if p == 0 {
        return 1;
    }
    let target = BigUint::from(x).pow(p);
    let mut lo = BigUint::from(0u32);
    let mut hi = BigUint::from(1u32) << (target.bits() as usize / q as usize + 1);
    let one = BigUint::from(1u32);
    while lo < hi {
        let mid: BigUint = (&lo + &hi + &one) >> 1;
        if mid.pow(q) <= target {
            lo = mid;
        } else {
            hi = mid - &one;
        }
    }
    lo.to_u128().expect("root of a u128 power fits in u128")
}

/// Smallest square root of a modulo an odd prime p, when one exists.
///
/// Tonelli-Shanks; ties broken as min(r, p - r) for determinism.
pub fn sqrt_mod(a: i128, p: u64) -> Result<Option<u64>> {
    if p < 3 || p & 1 == 0 || !is_prime_u64(p) {
        return Err(Error::Domain(format!("sqrt_mod requires an odd prime, got {p}")));
    }
    let a = a.rem_euclid(p as i128) as u64;
    if a == 0 {
        return Ok(Some(0));
    }
    if pow_mod_u64(a, (p - 1) / 2, p) != 1 {
        return Ok(None);
    }
    let r = if p & 3 == 3 {
        pow_mod_u64(a, (p + 1) / 4, p)
    } else {
        // Split p - 1 = d * 2^s with d odd.
        let mut d = p - 1;
        let mut s = 0u32;
        while d & 1 == 0 {
            d >>= 1;
            s += 1;
        }
        // Smallest quadratic non-residue; deterministic.
        let mut z = 2u64;
        while pow_mod_u64(z, (p - 1) / 2, p) != p - 1 {
            z += 1;
        }
        let mut m = s;
        let mut c = pow_mod_u64(z, d, p);
        let mut t = pow_mod_u64(a, d, p);
        let mut r = pow_mod_u64(a, (d + 1) / 2, p);
        while t != 1 {
            let mut i = 0u32;
            let mut t2 = t;
            while t2 != 1 {
                t2 = mul_mod_u64(t2, t2, p);
                i += 1;
            }
            let b = pow_mod_u64(c, 1 << (m - i - 1), p);
            m = i;
            c = mul_mod_u64(b, b, p);
            t = mul_mod_u64(t, c, p);
            r = mul_mod_u64(r, b, p);
        }
        r
    };
    Ok(Some(r.min(p - r)))
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// All x modulo p^k with x^2 = a (mod p^k), ascending. Empty when a is not a
/// square modulo p^k.
pub fn hensel_sqrt(a: i128, p: u64, k: u32) -> Result<Vec<u64>> {
    if !is_prime_u64(p) {
        return Err(Error::Domain(format!("hensel_sqrt requires a prime, got {p}")));
    }
    if k == 0 {
        return Err(Error::Domain("hensel_sqrt requires k >= 1".into()));
    }
    let q = (p as u128)
        .checked_pow(k)
        .filter(|&q| q <= u64::MAX as u128)
        .ok_or_else(|| Error::Size(format!("modulus {p}^{k} exceeds u64")))? as u64;
    let a = a.rem_euclid(q as i128) as u64;

    if a == 0 {
        // x^2 = 0 mod p^k iff p^ceil(k/2) divides x.
        let step = (p as u128).pow(k.div_ceil(2)) as u64;
        let count = (p as u128).pow(k / 2) as u64;
        return Ok((0..count).map(|m| m * step).collect());
    }

    // Split a = p^e * u with u a unit; odd valuation means no roots.
    let mut e = 0u32;
    let mut u = a;
    while u % p == 0 {
        u /= p;
        e += 1;
    }
    if e & 1 == 1 {
        return Ok(Vec::new());
    }
    let h = k - e;
    let ph = (p as u128).pow(h) as u64;
    let unit_roots: Vec<u64> = if p == 2 {
        match h {
            1 => vec![1],
            2 => {
                if u & 3 == 1 {
                    vec![1, 3]
                } else {
                    vec![]
                }
            }
            _ => {
                if u & 7 != 1 {
                    vec![]
                } else {
                    // Lift 1 from mod 8 upward one bit at a time.
                    let mut r = 1u64;
                    for j in 3..h {
                        let modulus = 1u64 << (j + 1);
                        if (mul_mod_u64(r, r, modulus) + modulus - u % modulus) % modulus != 0 {
                            r += 1 << (j - 1);
                        }
                    }
                    let half = 1u64 << (h - 1);
                    let mut roots = vec![r, ph - r, (r + half) % ph, (ph - r + half) % ph];
                    roots.sort_unstable();
                    roots
                }
            }
        }
    } else {
        match sqrt_mod(u as i128, p)? {
            None => vec![],
            Some(r0) => {
                // Hensel: the root doubles in precision each step.
                let mut r = r0 as u128;
                let mut prec = 1u32;
                while prec < h {
                    let next_prec = (2 * prec).min(h);
                    let modulus = (p as u128).pow(next_prec);
                    let f = (mul_mod_u128(r, r, modulus) + modulus as u128
                        - (u as u128) % modulus)
                        % modulus;
                    let inv = mod_inverse(2 * r as i128, modulus).expect("unit root");
                    r = (r + modulus - mul_mod_u128(f, inv, modulus)) % modulus;
                    prec = next_prec;
                }
                let r = r as u64;
                let mut roots = vec![r % ph, ph - r % ph];
                roots.sort_unstable();
                roots.dedup();
                roots
            }
        }
    };
    if unit_roots.is_empty() {
        return Ok(Vec::new());
    }
    // x = p^(e/2) * y with y ranging modulo p^(k - e/2) over lifts of the unit
    // roots modulo p^h.
    let scale = (p as u128).pow(e / 2) as u64;
    let copies = (p as u128).pow(e / 2) as u64;
    let mut out = Vec::with_capacity(unit_roots.len() * copies as usize);
    for &r in &unit_roots {
        for t in 0..copies {
            out.push(((r as u128 + t as u128 * ph as u128) * scale as u128 % q as u128) as u64);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Combine pairwise-coprime congruences x = r_i (mod m_i) into one class.
///
/// The empty list yields (0, 1).
pub fn crt(congruences: &[(i128, u128)]) -> Result<(u128, u128)> {
    let mut r0: u128 = 0;
    let mut m0: u128 = 1;
    for &(r, m) in congruences {
        if m == 0 {
            return Err(Error::Domain("zero modulus in crt".into()));
        }
        let r = r.rem_euclid(m as i128) as u128;
        let g = gcd_u128(m0, m);
        if g != 1 {
            return Err(Error::Domain(format!(
                "crt moduli are not pairwise coprime (gcd {g})"
            )));
        }
        let combined = m0
            .checked_mul(m)
            .ok_or_else(|| Error::Size("crt modulus overflow".into()))?;
        let inv = mod_inverse(m0 as i128, m).expect("coprime moduli");
        let diff = (r + m - r0 % m) % m;
        let k = mul_mod_u128(diff, inv, m);
        r0 += m0 * k;
        m0 = combined;
    }
    Ok((r0, m0))
}

/// Number of solutions n mod ell of n^2 = a (mod ell).
pub fn count_sqrt_mod(a: i128, ell: u64) -> Result<u64> {
    if ell == 0 {
        return Err(Error::Domain("zero modulus".into()));
    }
    if ell == 1 {
        return Ok(1);
    }
    let fact = factorize(ell as u128)?;
    let mut count = 1u64;
    for &(p, e) in fact.pairs() {
        let roots = hensel_sqrt(a, p as u64, e)?;
        if roots.is_empty() {
            return Ok(0);
        }
        count *= roots.len() as u64;
    }
    Ok(count)
}

/// Square-free sieve with a reusable prime table.
///
/// Segments are independent, so disjoint ranges can be sieved on different
/// threads and concatenated deterministically.
pub struct SquarefreeSieve {
    primes: Vec<u64>,
    limit: u64,
}

impl SquarefreeSieve {
    /// Prepare a sieve able to answer queries up to `limit`.
    pub fn new(limit: u64) -> Self {
        let root = isqrt_u64(limit) + 1;
        let mut composite = vec![false; root as usize + 1];
        let mut primes = Vec::new();
        for p in 2..=root {
            if !composite[p as usize] {
                primes.push(p);
                let mut m = p * p;
                while m <= root {
                    composite[m as usize] = true;
                    m += p;
                }
            }
        }
        SquarefreeSieve { primes, limit }
    }

    /// Square-freeness flags for the inclusive range [lo, hi], lo >= 1.
    pub fn segment_flags(&self, lo: u64, hi: u64) -> Vec<bool> {
        assert!(lo >= 1 && hi <= self.limit && lo <= hi);
        let mut flags = vec![true; (hi - lo + 1) as usize];
        for &p in &self.primes {
            let p2 = p * p;
            if p2 > hi {
                break;
            }
            let mut m = lo.div_ceil(p2) * p2;
            while m <= hi {
                flags[(m - lo) as usize] = false;
                m += p2;
            }
        }
        flags
    }

    /// Ascending square-free D <= x with D = a (mod b) in [lo, hi].
    pub fn in_ap_segment(&self, lo: u64, hi: u64, a: u64, b: u64) -> Vec<u64> {
        assert!(b >= 1);
        if lo > hi {
            return Vec::new();
        }
        let flags = self.segment_flags(lo.max(1), hi);
        let lo = lo.max(1);
        let a = a % b;
        let mut first = lo + ((a + b - lo % b) % b);
        let mut out = Vec::new();
        while first <= hi {
            if flags[(first - lo) as usize] {
                out.push(first);
            }
            first += b;
        }
        out
    }
}

/// Ascending square-free D <= x with D = a (mod b).
pub fn squarefree_in_ap(x: u64, a: u64, b: u64) -> Vec<u64> {
    if x == 0 {
        return Vec::new();
    }
    SquarefreeSieve::new(x).in_ap_segment(1, x, a, b)
}
