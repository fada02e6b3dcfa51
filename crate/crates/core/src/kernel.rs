//! Spectral measure of `P = (Δ - 1)_+^{1/2}` on H³ and the envelopes it is
//! compared against.
//!
//! On H³ the kernel depends only on the distance `r`:
//! `dE_P(λ)(r) = λ sin(λr) / (2π² sinh r)`, obtained from the outgoing
//! resolvent `e^{iλr} / (4π sinh r)` by Stone's formula. λ-derivatives are
//! closed form up to order [`MAX_ORDER`].

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub const MAX_ORDER: u32 = 4;

/// `n` in H^{n+1} = H³.
const N: f64 = 2.0;
const SERIES_CUTOFF: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelQuery {
    pub lambda: f64,
    pub r: f64,
    pub j: u32,
}

impl KernelQuery {
    pub fn new(lambda: f64, r: f64, j: u32) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(domain("lambda must be finite and nonnegative"));
        }
        if !(r >= 0.0) || !r.is_finite() {
            return Err(domain("distance must be finite and nonnegative"));
        }
        Ok(Self { lambda, r, j })
    }

    /// `λ ≥ 1`; lower energies are evaluated but lie outside the high-energy regime.
    pub fn is_high_energy(&self) -> bool {
        self.lambda >= 1.0
    }
}

/// `r / sinh r`, stable at both ends.
pub fn r_over_sinh(r: f64) -> f64 {
    if r < SERIES_CUTOFF {
        let r2 = r * r;
        1.0 - r2 / 6.0 + 7.0 * r2 * r2 / 360.0
    } else {
        // 2r e^{-r} / (1 - e^{-2r})
        2.0 * r * (-r).exp() / -(-2.0 * r).exp_m1()
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `∂_λ^j [λ sin(λr) / r]`, written so that `r = 0` needs no special case.
fn numerator_derivative(lambda: f64, r: f64, j: u32) -> f64 {
    let x = lambda * r;
    let (s, c) = (x.sin(), x.cos());
    match j {
        0 => lambda * lambda * sinc(x),
        1 => lambda * c + lambda * sinc(x),
        2 => 2.0 * c - x * s,
        3 => -3.0 * r * s - x * r * c,
        _ => -4.0 * r * r * c + x * r * r * s,
    }
}

/// `∂_λ^j dE_P(λ)(r)` on H³.
pub fn kernel_h3(q: &KernelQuery) -> Result<f64> {
    if q.j > MAX_ORDER {
        return Err(Error::UnsupportedOrder(q.j));
    }
    Ok(numerator_derivative(q.lambda, q.r, q.j) * r_over_sinh(q.r) / (2.0 * PI * PI))
}

/// Termwise magnitude bound `(λ r^j + j r^{j-1}) / (2π² sinh r)` for `r > 0`;
/// at `r = 0` the analytic limit of `|kernel_h3|` bound is returned.
pub fn kernel_h3_majorant(lambda: f64, r: f64, j: u32) -> f64 {
    let jf = j as f64;
    if r == 0.0 {
        return match j {
            0 => lambda * lambda,
            1 => 2.0 * lambda,
            2 => 2.0,
            _ => 0.0,
        } / (2.0 * PI * PI);
    }
    // (λ r^j + j r^{j-1}) / r · (r / sinh r)
    let num = lambda * r.powi(j as i32 - 1)
        + if j > 0 {
            jf * r.powi(j as i32 - 2)
        } else {
            0.0
        };
    num * r_over_sinh(r) / (2.0 * PI * PI)
}

/// Two-regime envelope with cutoff at `r = l₀/2` (no constant):
/// `λ^{n-j} (1 + λr)^{-n/2 + j}` below, `λ^{n/2} r^j e^{-nr/2}` above, `n = 2`.
pub fn bound_h3(q: &KernelQuery, l0: f64) -> Result<f64> {
    if !(l0 > 0.0) || !l0.is_finite() {
        return Err(domain("l0 must be positive and finite"));
    }
    if !(q.lambda > 0.0) {
        return Err(domain("bound_h3 needs lambda > 0"));
    }
    let j = q.j as i32;
    let n = N;
    Ok(if q.r < l0 / 2.0 {
        q.lambda.powf(n - j as f64) * (1.0 + q.lambda * q.r).powf(-n / 2.0 + j as f64)
    } else {
        q.lambda.powf(n / 2.0) * q.r.powi(j) * (-n * q.r / 2.0).exp()
    })
}

/// Euclidean magnitude `λ^{d-1-j} (1 + λr)^{-(d-1)/2 + j}` on ℝ^d.
pub fn euclidean_envelope(lambda: f64, r: f64, d: u32, j: u32) -> Result<f64> {
    if d < 2 {
        return Err(domain("euclidean envelope needs d >= 2"));
    }
    if !(lambda > 0.0) || !(r >= 0.0) || !lambda.is_finite() || !r.is_finite() {
        return Err(domain("lambda must be positive and r nonnegative"));
    }
    let df = d as f64;
    let jf = j as f64;
    Ok(lambda.powf(df - 1.0 - jf) * (1.0 + lambda * r).powf(-(df - 1.0) / 2.0 + jf))
}

/// Exponent bookkeeping for restriction estimates in dimension `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestrictionExponents {
    pub p: f64,
    pub m: u32,
    /// Conjugate exponent (`+∞` at `p = 1`).
    pub p_prime: f64,
    /// `2(m+1)/(m+3)`.
    pub p_c: f64,
    /// `m(1/p - 1/p') - 1`, the power of λ for `p ≤ p_c`.
    pub exponent_low: f64,
    /// `(m-1)(1/p - 1/2)`, the power of λ for `p_c ≤ p < 2`.
    pub exponent_high: f64,
}

impl RestrictionExponents {
    /// The λ-power governing the high-energy estimate at this `p`.
    pub fn exponent(&self) -> f64 {
        if self.p <= self.p_c {
            self.exponent_low
        } else {
            self.exponent_high
        }
    }
}

pub fn critical_exponent(m: u32) -> f64 {
    let mf = m as f64;
    2.0 * (mf + 1.0) / (mf + 3.0)
}

pub fn ts_exponents(p: f64, m: u32) -> Result<RestrictionExponents> {
    if !(1.0..2.0).contains(&p) {
        return Err(domain("p must lie in [1, 2)"));
    }
    if m == 0 {
        return Err(domain("dimension must be positive"));
    }
    let mf = m as f64;
    let inv_p = 1.0 / p;
    let inv_p_prime = 1.0 - inv_p;
    Ok(RestrictionExponents {
        p,
        m,
        p_prime: if inv_p_prime == 0.0 {
            f64::INFINITY
        } else {
            p / (p - 1.0)
        },
        p_c: critical_exponent(m),
        exponent_low: mf * (inv_p - inv_p_prime) - 1.0,
        exponent_high: (mf - 1.0) * (inv_p - 0.5),
    })
}

/// Derivative orders the abstract restriction theorem asks about in dimension `m`:
/// `{0, m/2 - 1, m/2}` for even `m`, `{0, (m-3)/2, (m+1)/2}` for odd `m`.
pub fn hypothesis_orders(m: u32) -> Vec<u32> {
    let mut orders: Vec<u32> = if m.is_multiple_of(2) {
        [Some(0), (m / 2).checked_sub(1), Some(m / 2)]
            .into_iter()
            .flatten()
            .collect()
    } else {
        [
            Some(0),
            m.checked_sub(3).map(|v| v / 2),
            Some(m.div_ceil(2)),
        ]
        .into_iter()
        .flatten()
        .collect()
    };
    orders.sort_unstable();
    orders.dedup();
    orders
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn k(lambda: f64, r: f64, j: u32) -> f64 {
        kernel_h3(&KernelQuery::new(lambda, r, j).unwrap()).unwrap()
    }

    /// Stone's formula on the outgoing resolvent `R(λ) = e^{iλr}/(4π sinh r)`:
    /// `dE(λ) = (2λ / 2πi) (R(λ) - R(-λ))`.
    fn stone_oracle(lambda: f64, r: f64) -> f64 {
        let res = |l: f64| Complex64::new(0.0, l * r).exp() / (4.0 * PI * r.sinh());
        let jump = res(lambda) - res(-lambda);
        (jump * (2.0 * lambda) / Complex64::new(0.0, 2.0 * PI)).re
    }

    #[test]
    fn matches_stone_formula() {
        for &(l, r) in &[(1.0, 0.5), (2.0, 1.3), (7.5, 0.01), (30.0, 4.0), (0.3, 9.0)] {
            let a = k(l, r, 0);
            let b = stone_oracle(l, r);
            assert!(
                (a - b).abs() <= 1e-13 * (1.0 + b.abs()),
                "{l} {r}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn plancherel_limit() {
        assert!((k(2.0, 0.0, 0) - 2.0 / (PI * PI)).abs() < 1e-15);
        assert!((k(2.0, 0.0, 0) - 0.20264).abs() < 1e-5);
        for &l in &[1.0, 3.0, 10.0] {
            // numerically approach r -> 0 through the Stone oracle
            let near = stone_oracle(l, 1e-6);
            assert!((near - l * l / (2.0 * PI * PI)).abs() < 1e-9 * l * l);
            assert!((k(l, 0.0, 1) - l / (PI * PI)).abs() < 1e-15);
            assert!((k(l, 0.0, 2) - 1.0 / (PI * PI)).abs() < 1e-15);
        }
    }

    /// Heat kernel of H³: `∫₀^∞ e^{-tλ²} dE(λ)(r) dλ = (4πt)^{-3/2} (r/sinh r) e^{-r²/4t}`.
    #[test]
    fn integrates_to_heat_kernel() {
        let t: f64 = 0.35;
        for &r in &[0.0, 0.4, 1.7, 3.0] {
            let upper = 12.0 / t.sqrt();
            let n = 20_000;
            let h = upper / n as f64;
            // Simpson
            let mut acc = 0.0;
            for i in 0..=n {
                let lam = i as f64 * h;
                let w = if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += w * (-t * lam * lam).exp() * k(lam, r, 0);
            }
            acc *= h / 3.0;
            let heat = (4.0 * PI * t).powf(-1.5) * r_over_sinh(r) * (-r * r / (4.0 * t)).exp();
            assert!((acc - heat).abs() < 1e-10, "r={r}: {acc} vs {heat}");
        }
    }

    #[test]
    fn zeros_and_orders() {
        let lambda = 3.0;
        assert!(k(lambda, PI / lambda, 0).abs() < 1e-16);
        assert!(matches!(
            kernel_h3(&KernelQuery::new(1.0, 1.0, 5).unwrap()),
            Err(Error::UnsupportedOrder(5))
        ));
        assert!(KernelQuery::new(-1.0, 0.0, 0).is_err());
        assert!(!KernelQuery::new(0.5, 0.0, 0).unwrap().is_high_energy());
    }

    #[test]
    fn small_r_branch_is_continuous() {
        for j in 0..=4 {
            let a = k(5.0, 0.999e-4, j);
            let b = k(5.0, 1.001e-4, j);
            assert!((a - b).abs() < 1e-6 * (1.0 + a.abs()), "j={j}");
        }
        // large r stays finite
        assert!(k(10.0, 800.0, 3).is_finite());
    }

    #[test]
    fn even_in_lambda() {
        // λ sin(λr) = λ² r - λ⁴ r³/6 + ...: only even powers of λ
        let r = 0.7;
        for &l in &[1e-3, 1e-2, 0.05] {
            let direct = numerator_derivative(l, r, 0);
            let mirrored = numerator_derivative(-l, r, 0);
            assert!((direct - mirrored).abs() < 1e-18);
            let series = l * l - l.powi(4) * r * r / 6.0 + l.powi(6) * r.powi(4) / 120.0;
            assert!((direct - series).abs() < 1e-12 * l * l);
        }
    }

    #[test]
    fn envelope_values() {
        let q = KernelQuery::new(1.0, 0.0, 0).unwrap();
        assert_eq!(bound_h3(&q, 0.7).unwrap(), 1.0);
        let q = KernelQuery::new(4.0, 2.0, 1).unwrap();
        assert!((bound_h3(&q, 1.0).unwrap() - 4.0 * 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!(bound_h3(&q, 0.0).is_err());

        assert_eq!(euclidean_envelope(1.0, 0.0, 2, 1).unwrap(), 1.0);
        for &(l, r) in &[(1.0, 2.0), (5.0, 0.3)] {
            let e = euclidean_envelope(l, r, 2, 1).unwrap();
            assert!((e - (1.0 + l * r).sqrt()).abs() < 1e-14);
            // doubling λ at fixed λr scales by 2^{d-1-j}
            let e2 = euclidean_envelope(2.0 * l, r / 2.0, 3, 0).unwrap();
            let e1 = euclidean_envelope(l, r, 3, 0).unwrap();
            assert!((e2 / e1 - 4.0).abs() < 1e-12);
        }
        assert!(euclidean_envelope(1.0, 1.0, 1, 0).is_err());
    }

    #[test]
    fn exponents() {
        let e = ts_exponents(4.0 / 3.0, 3).unwrap();
        assert_eq!(e.p_c, 4.0 / 3.0);
        assert!((e.exponent_low - 0.5).abs() < 1e-12);
        assert!((e.exponent_high - 0.5).abs() < 1e-12);
        let e1 = ts_exponents(1.0, 3).unwrap();
        assert_eq!(e1.exponent_low, 2.0);
        assert!(e1.p_prime.is_infinite());
        let e = ts_exponents(1.5, 3).unwrap();
        assert!((1.0 / e.p + 1.0 / e.p_prime - 1.0).abs() < 1e-15);
        assert_eq!(e.exponent(), e.exponent_high);
        assert!(ts_exponents(2.0, 3).is_err());
        assert!(ts_exponents(0.9, 3).is_err());
        assert_eq!(hypothesis_orders(3), alloc::vec![0, 2]);
        assert_eq!(hypothesis_orders(4), alloc::vec![0, 1, 2]);
        assert_eq!(hypothesis_orders(5), alloc::vec![0, 1, 3]);
    }
}
