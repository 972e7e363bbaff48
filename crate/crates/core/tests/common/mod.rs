//! Test-only reference implementations, independent of the library's
//! evaluation paths.

#![allow(dead_code)]

/// Unevaluated sum `hi + lo` carrying roughly 106 bits of precision.
#[derive(Clone, Copy, Debug)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };

    pub fn from(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }

    pub fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }

    pub fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p, e) = two_prod(q1, b);
        let (s, f) = two_sum(self.hi, -p);
        let r = (s - e + f + self.lo) / b;
        let (hi, lo) = quick_two_sum(q1, r);
        Self { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// `J_n(x)` from the ascending power series in double-double arithmetic with
/// a fixed number of terms (at least 200).
pub fn bessel_series_oracle(n: u32, x: f64) -> f64 {
    const TERMS: usize = 240;
    let half = DoubleDouble::from(x).div_f64(2.0);
    let mut lead = DoubleDouble::from(1.0);
    for i in 1..=n {
        lead = lead.mul(half).div_f64(i as f64);
    }
    let q = half.mul(half).neg();
    let mut term = lead;
    let mut sum = lead;
    for k in 1..TERMS {
        term = term.mul(q).div_f64(k as f64).div_f64(k as f64 + n as f64);
        sum = sum.add(term);
    }
    sum.to_f64()
}

/// First zero of `J_0` by bisection on the series oracle.
pub fn first_j0_zero_oracle() -> f64 {
    let (mut lo, mut hi) = (2.0f64, 3.0f64);
    assert!(bessel_series_oracle(0, lo) > 0.0 && bessel_series_oracle(0, hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if bessel_series_oracle(0, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Closed-form FID over the same `(N, D)` grid: normalized
/// `(1/N) sum_k cos(2 D cos(k) t)` evaluated by brute-force summation, kept
/// here only to pin small cases independently of `ModeSet`.
pub fn mode_sum_reference(n: usize, d: f64, t: f64) -> f64 {
    let mut s = 0.0;
    for i in 1..=n {
        let k = std::f64::consts::PI * i as f64 / (n + 1) as f64;
        s += (2.0 * d * k.cos() * t).cos();
    }
    s / n as f64
}
