//! Shared helpers for the integration suites: double-double products for
//! ill-conditioned matrix chains and a per-criterion reporter.

#![allow(dead_code)]

use std::io::Write;
use std::ops::{Add, Mul, Neg, Sub};

use cavityio::linalg::ModeMatrix;
use num_complex::Complex64;

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn from_f64(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = two_sum(s, e + t);
        let (hi, lo) = two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = two_sum(p, e);
        Dd { hi, lo }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub fn from_c64(z: Complex64) -> Self {
        DdComplex { re: Dd::from_f64(z.re), im: Dd::from_f64(z.im) }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(self) -> Self {
        DdComplex { re: self.re, im: -self.im }
    }
}

impl Add for DdComplex {
    type Output = DdComplex;
    fn add(self, o: DdComplex) -> DdComplex {
        DdComplex { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Mul for DdComplex {
    type Output = DdComplex;
    fn mul(self, o: DdComplex) -> DdComplex {
        DdComplex { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

pub type DdMatrix = [[DdComplex; 2]; 2];

pub fn dd(m: &ModeMatrix) -> DdMatrix {
    m.entries().map(|row| row.map(DdComplex::from_c64))
}

pub fn dd_mul(a: &DdMatrix, b: &DdMatrix) -> DdMatrix {
    let mut out = [[DdComplex::default(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn dd_adjoint(a: &DdMatrix) -> DdMatrix {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn dd_transpose(a: &DdMatrix) -> DdMatrix {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// Product of the stored factors carried out in double-double.
pub fn dd_chain(factors: &[DdMatrix]) -> DdMatrix {
    factors.iter().skip(1).fold(factors[0], |acc, f| dd_mul(&acc, f))
}

/// `‖A − I‖_F` with the subtraction done before rounding.
pub fn dd_distance_from_identity(a: &DdMatrix) -> f64 {
    let mut sum = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mut z = a[i][j];
            if i == j {
                z.re = z.re - Dd::from_f64(1.0);
            }
            sum += z.to_c64().norm_sqr();
        }
    }
    sum.sqrt()
}

pub fn dd_round(a: &DdMatrix) -> ModeMatrix {
    ModeMatrix::new(a.map(|row| row.map(DdComplex::to_c64))).expect("finite product")
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start + (stop - start) * i as f64 / (count - 1) as f64).collect()
}

/// `count` phases `2πk/count`, `k = 0..count`.
pub fn phases(count: usize) -> Vec<f64> {
    (0..count).map(|k| 2.0 * std::f64::consts::PI * k as f64 / count as f64).collect()
}

/// Collects named checks for one criterion and prints a single verdict line.
pub struct Report {
    id: u32,
    title: &'static str,
    checks: Vec<(String, bool)>,
    notes: Vec<String>,
}

impl Report {
    pub fn new(id: u32, title: &'static str) -> Self {
        Report { id, title, checks: Vec::new(), notes: Vec::new() }
    }

    pub fn check(&mut self, label: impl Into<String>, ok: bool) -> bool {
        self.checks.push((label.into(), ok));
        ok
    }

    /// `value < bound`, recording both.
    pub fn below(&mut self, label: &str, value: f64, bound: f64) -> bool {
        self.check(format!("{label} = {value:.3e} (< {bound:.0e})"), value < bound)
    }

    /// Informational value that does not affect the verdict.
    pub fn note(&mut self, label: impl Into<String>) {
        self.notes.push(label.into());
    }

    pub fn finish(self) {
        let passed = self.checks.iter().all(|(_, ok)| *ok);
        let mut detail: Vec<String> = self
            .checks
            .iter()
            .map(|(l, ok)| if *ok { l.clone() } else { format!("FAILED {l}") })
            .collect();
        detail.extend(self.notes.iter().map(|n| format!("info: {n}")));
        let line = format!(
            "criterion {:>2} [{}] {}: {}\n",
            self.id,
            if passed { "PASS" } else { "FAIL" },
            self.title,
            detail.join("; ")
        );
        // written to the process stdout directly so the line survives test capture
        let mut out = std::io::stdout().lock();
        let _ = out.write_all(line.as_bytes()).and_then(|_| out.flush());
        assert!(passed, "criterion {} failed", self.id);
    }
}
