//! Brute-force reference implementations, written directly from the group
//! presentation and independent of the library.

#![allow(dead_code)]

use std::collections::VecDeque;

/// Above this order the oracles use generator-based shortcuts.
pub const FULL_SCAN_MAX: usize = 2187;

/// `D = <x, y | x^(p^m) = y^(p^n) = 1, y x y^-1 = x^(1+p^l)>` on pairs `(a, b)`
/// meaning `x^a y^b`, indexed by `a p^n + b`.
pub struct Brute {
    pub p: u64,
    pub m: u32,
    pub n: u32,
    pub l: u32,
    pub pm: u64,
    pub pn: u64,
    /// `(1+p^l)^b mod p^m` for `b < p^n`, by repeated multiplication.
    twist: Vec<u64>,
}

impl Brute {
    pub fn new(p: u64, m: u32, n: u32, l: u32) -> Self {
        let pm = p.pow(m);
        let pn = p.pow(n);
        let s = 1 + p.pow(l);
        let mut twist = Vec::with_capacity(pn as usize);
        let mut acc = 1 % pm;
        for _ in 0..pn {
            twist.push(acc);
            acc = acc * s % pm;
        }
        Brute { p, m, n, l, pm, pn, twist }
    }

    pub fn order(&self) -> usize {
        (self.pm * self.pn) as usize
    }

    pub fn elem(&self, i: usize) -> (u64, u64) {
        (i as u64 / self.pn, i as u64 % self.pn)
    }

    pub fn index(&self, g: (u64, u64)) -> usize {
        (g.0 * self.pn + g.1) as usize
    }

    /// `y^b x^c = x^(c s^b) y^b`.
    pub fn mul(&self, g: (u64, u64), h: (u64, u64)) -> (u64, u64) {
        ((g.0 + h.0 * self.twist[g.1 as usize]) % self.pm, (g.1 + h.1) % self.pn)
    }

    pub fn inv(&self, g: (u64, u64)) -> (u64, u64) {
        let b = (self.pn - g.1) % self.pn;
        let a = (self.pm - g.0 * self.twist[b as usize] % self.pm) % self.pm;
        let h = (a, b);
        debug_assert_eq!(self.mul(g, h), (0, 0));
        h
    }

    pub fn conj(&self, g: (u64, u64), h: (u64, u64)) -> (u64, u64) {
        self.mul(self.mul(h, g), self.inv(h))
    }

    pub fn all(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (0..self.order()).map(|i| self.elem(i))
    }

    /// Subgroup generated by `gens`, as a membership vector.
    pub fn closure(&self, gens: &[(u64, u64)]) -> Vec<bool> {
        let mut member = vec![false; self.order()];
        member[0] = true;
        let mut queue = VecDeque::from([(0u64, 0u64)]);
        while let Some(g) = queue.pop_front() {
            for &s in gens {
                let h = self.mul(g, s);
                let i = self.index(h);
                if !member[i] {
                    member[i] = true;
                    queue.push_back(h);
                }
            }
        }
        member
    }

    pub fn x(&self) -> (u64, u64) {
        (1 % self.pm, 0)
    }

    pub fn y(&self) -> (u64, u64) {
        (0, 1 % self.pn)
    }

    fn commutator(&self, g: (u64, u64), h: (u64, u64)) -> (u64, u64) {
        self.mul(self.mul(g, h), self.mul(self.inv(g), self.inv(h)))
    }

    /// Closure of every commutator `g h g^-1 h^-1` for small groups. Larger
    /// groups use the normal closure of `{[g, x], [g, y]}`: modulo a normal
    /// subgroup containing these, `x` and `y` are central, so the quotient is
    /// abelian.
    pub fn derived(&self) -> Vec<bool> {
        let mut seen = vec![false; self.order()];
        let mut gens = Vec::new();
        let partners: Vec<(u64, u64)> = if self.order() <= FULL_SCAN_MAX { self.all().collect() } else { vec![self.x(), self.y()] };
        for g in self.all() {
            for &h in &partners {
                let c = self.commutator(g, h);
                let i = self.index(c);
                if !seen[i] {
                    seen[i] = true;
                    gens.push(c);
                }
            }
        }
        loop {
            let span = self.closure(&gens);
            let outside: Vec<(u64, u64)> = (0..self.order())
                .filter(|&i| span[i])
                .flat_map(|i| [self.conj(self.elem(i), self.x()), self.conj(self.elem(i), self.y())])
                .filter(|c| !span[self.index(*c)])
                .collect();
            if outside.is_empty() {
                return span;
            }
            gens.extend(outside);
        }
    }

    pub fn centralizer(&self, u: (u64, u64)) -> Vec<bool> {
        self.all().map(|g| self.mul(g, u) == self.mul(u, g)).collect()
    }

    /// Elements commuting with `x` and `y`, hence with everything.
    pub fn center(&self) -> Vec<bool> {
        let (x, y) = (self.x(), self.y());
        self.all().map(|g| self.mul(g, x) == self.mul(x, g) && self.mul(g, y) == self.mul(y, g)).collect()
    }

    /// Class of each element, named by its least member. Small groups
    /// conjugate by every element; larger ones take orbits under
    /// conjugation by `x` and `y`, which generate the inner automorphisms.
    pub fn classes(&self) -> Vec<usize> {
        let conjugators: Vec<(u64, u64)> = if self.order() <= FULL_SCAN_MAX { self.all().collect() } else { vec![self.x(), self.y()] };
        let mut class = vec![usize::MAX; self.order()];
        for i in 0..self.order() {
            if class[i] != usize::MAX {
                continue;
            }
            class[i] = i;
            let mut queue = VecDeque::from([self.elem(i)]);
            while let Some(g) = queue.pop_front() {
                for &h in &conjugators {
                    let c = self.conj(g, h);
                    let j = self.index(c);
                    if class[j] == usize::MAX {
                        class[j] = i;
                        queue.push_back(c);
                    }
                }
            }
        }
        class
    }

    /// The least unit of multiplicative order exactly `e` mod `p^m`.
    pub fn unit_of_order(&self, e: u64) -> u64 {
        (2..self.pm)
            .chain([1])
            .find(|&r| {
                r % self.p != 0 && {
                    let mut acc = 1;
                    let mut ord = 0;
                    loop {
                        acc = acc * r % self.pm;
                        ord += 1;
                        if acc == 1 {
                            break ord == e;
                        }
                    }
                }
            })
            .expect("the unit group is cyclic of order divisible by e")
    }

    /// `x^a y^b -> x^(r a) y^b`.
    pub fn alpha(&self, r: u64, g: (u64, u64)) -> (u64, u64) {
        (g.0 * r % self.pm, g.1)
    }

    /// Closure of `{f(a) a^-1}` over the maps `f` given.
    pub fn focal(&self, maps: &[&dyn Fn((u64, u64)) -> (u64, u64)]) -> Vec<bool> {
        let mut seen = vec![false; self.order()];
        let mut gens = Vec::new();
        for a in self.all() {
            for f in maps {
                let z = self.mul(f(a), self.inv(a));
                let i = self.index(z);
                if !seen[i] {
                    seen[i] = true;
                    gens.push(z);
                }
            }
        }
        self.closure(&gens)
    }
}

/// Odd primes in `[lo, hi]` by trial division.
pub fn odd_primes(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi).filter(|&q| q % 2 == 1 && (2..q).take_while(|d| d * d <= q).all(|d| q % d != 0)).collect()
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Exact fraction with positive denominator, compared by cross-multiplication.
#[derive(Clone, Copy, Debug)]
pub struct Frac(pub i128, pub i128);

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Frac {
    fn reduced(num: i128, den: i128) -> Frac {
        let g = gcd(num, den).max(1);
        Frac(num / g, den / g)
    }
    pub fn int(v: i128) -> Self {
        Frac(v, 1)
    }
    pub fn add(self, o: Frac) -> Frac {
        Frac::reduced(self.0 * o.1 + o.0 * self.1, self.1 * o.1)
    }
    pub fn sub(self, o: Frac) -> Frac {
        Frac::reduced(self.0 * o.1 - o.0 * self.1, self.1 * o.1)
    }
    pub fn mul(self, o: Frac) -> Frac {
        Frac::reduced(self.0 * o.0, self.1 * o.1)
    }
    pub fn div(self, d: i128) -> Frac {
        Frac::reduced(self.0, self.1 * d)
    }
    pub fn le(self, o: Frac) -> bool {
        self.0 * o.1 <= o.0 * self.1
    }
    pub fn lt(self, o: Frac) -> bool {
        self.0 * o.1 < o.0 * self.1
    }
}

/// `p^k` as a fraction; negative `k` allowed.
pub fn ppow(p: i128, k: i32) -> Frac {
    if k >= 0 {
        Frac::int(p.pow(k as u32))
    } else {
        Frac(1, p.pow((-k) as u32))
    }
}
