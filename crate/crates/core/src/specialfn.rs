//! Complete elliptic integrals and the special-function core of the
//! axisymmetric ring kernel.
//!
//! Conventions: everything here takes the *modulus* `k` (not the parameter
//! `m = k²`). Functions that are evaluated close to `k = 1` also accept the
//! complementary modulus `k' = √(1 − k²)` directly, because forming `1 − k²`
//! from `k` destroys the digits that decide the logarithmic singularity.
//!
//! Away from `k = 1` the integrals come from the arithmetic–geometric mean.
//! For `k'² < 0.05` the logarithmic expansions in `k'` are summed instead:
//!
//! ```text
//! K(k) = Σ c_j k'^{2j} (ln(1/k') + d_j)
//! E(k) = 1 + ½ Σ e_j k'^{2j+2} (ln(1/k') + d_j − 1/((2j+1)(2j+2)))
//! c_j = ((½)_j / j!)²,  e_j = (½)_j (3/2)_j / ((2)_j j!),  d_j = ψ(1+j) − ψ(½+j)
//! ```

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use thiserror::Error;

/// Below this value of `k'²` the complementary expansion replaces the AGM.
const COMPLEMENT_SERIES_LIMIT: f64 = 0.05;

/// Below this value of `k²` the ring kernel is summed as a hypergeometric
/// series; the closed form cancels like `1/k⁴` there.
const SMALL_MODULUS_SERIES_LIMIT: f64 = 0.25;

const MAX_AGM_STEPS: usize = 40;
const MAX_SERIES_TERMS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpecialFnError {
    #[error("elliptic modulus {0} outside [0, 1)")]
    InvalidModulus(f64),
    #[error("complementary modulus {0} outside (0, 1]")]
    InvalidComplement(f64),
}

/// `K(k)` and `E(k)` for one modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticPair {
    pub k: f64,
    /// `k' = √(1 − k²)`, carried at full precision.
    pub k_complement: f64,
    /// First kind, `∫₀^{π/2} dθ / √(1 − k² sin²θ)`.
    pub first: f64,
    /// Second kind, `∫₀^{π/2} √(1 − k² sin²θ) dθ`.
    pub second: f64,
}

/// Complete elliptic integrals of the first and second kind for `0 ≤ k < 1`.
pub fn complete_elliptic(k: f64) -> Result<EllipticPair, SpecialFnError> {
    if !(0.0..1.0).contains(&k) {
        return Err(SpecialFnError::InvalidModulus(k));
    }
    let kp = ((1.0 - k) * (1.0 + k)).sqrt();
    Ok(pair_unchecked(k, kp))
}

/// Same as [`complete_elliptic`], parameterized by the complementary
/// modulus `0 < k' ≤ 1`. Use this whenever `k'` is known more accurately
/// than `k`.
pub fn complete_elliptic_complementary(kp: f64) -> Result<EllipticPair, SpecialFnError> {
    if !(kp > 0.0 && kp <= 1.0) {
        return Err(SpecialFnError::InvalidComplement(kp));
    }
    let k = ((1.0 - kp) * (1.0 + kp)).sqrt();
    Ok(pair_unchecked(k, kp))
}

/// Evaluates the pair from a consistent `(k, k')`; no domain checks.
pub(crate) fn pair_unchecked(k: f64, kp: f64) -> EllipticPair {
    let m1 = kp * kp;
    let (first, second) = if m1 < COMPLEMENT_SERIES_LIMIT {
        complement_series(kp)
    } else {
        agm(k, kp)
    };
    EllipticPair {
        k,
        k_complement: kp,
        first,
        second,
    }
}

fn agm(k: f64, kp: f64) -> (f64, f64) {
    let mut a = 1.0_f64;
    let mut b = kp;
    // Σ 2^{j-1} c_j² with c_0 = k.
    let mut sum = 0.5 * k * k;
    let mut weight = 0.5;
    for _ in 0..MAX_AGM_STEPS {
        let c = 0.5 * (a - b);
        let a_next = 0.5 * (a + b);
        let b_next = (a * b).sqrt();
        weight *= 2.0;
        sum += weight * c * c;
        a = a_next;
        b = b_next;
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
    }
    let first = PI / (2.0 * a);
    (first, first * (1.0 - sum))
}

fn complement_series(kp: f64) -> (f64, f64) {
    let m1 = kp * kp;
    let log_term = -kp.ln();
    let mut c = 1.0_f64;
    let mut e = 1.0_f64;
    let mut d = 2.0 * LN_2;
    let mut power = 1.0_f64;
    let mut first = 0.0;
    let mut second_tail = 0.0;
    for j in 0..MAX_SERIES_TERMS {
        let jf = j as f64;
        let term_k = c * power * (log_term + d);
        let term_e = e * power * m1 * (log_term + d - 1.0 / ((2.0 * jf + 1.0) * (2.0 * jf + 2.0)));
        first += term_k;
        second_tail += term_e;
        if term_k.abs() <= 1e-17 * first.abs() && term_e.abs() <= 1e-17 {
            break;
        }
        c *= ((jf + 0.5) / (jf + 1.0)).powi(2);
        e *= (jf + 0.5) * (jf + 1.5) / ((jf + 1.0) * (jf + 2.0));
        d += 1.0 / (jf + 1.0) - 1.0 / (jf + 0.5);
        power *= m1;
    }
    (first, 1.0 + 0.5 * second_tail)
}

/// `dK/dm` and `dE/dm` with respect to the parameter `m = k²`, together
/// with `K` and `E` themselves: `(K, E, dK/dm, dE/dm)`.
///
/// Requires `0 ≤ m < 1`; `k' = √(1 − m)` is passed explicitly.
pub(crate) fn parameter_derivatives(m: f64, k: f64, kp: f64) -> (f64, f64, f64, f64) {
    if m < 1e-2 {
        // Power series in m: K = π/2 Σ a_j m^j, E = π/2 Σ −a_j/(2j−1) m^j.
        let mut a = 1.0_f64;
        let mut power = 1.0_f64;
        let (mut big_k, mut big_e, mut dk, mut de) = (0.0, 0.0, 0.0, 0.0);
        for j in 0..60 {
            let jf = j as f64;
            let b = -a / (2.0 * jf - 1.0);
            big_k += a * power;
            big_e += b * power;
            if j > 0 {
                let dpow = jf * power / m.max(f64::MIN_POSITIVE);
                dk += a * dpow;
                de += b * dpow;
            }
            a *= ((jf + 0.5) / (jf + 1.0)).powi(2);
            power *= m;
            if power < 1e-20 {
                break;
            }
        }
        if m == 0.0 {
            // Derivative series starts at j = 1 with coefficient a_1.
            return (FRAC_PI_2, FRAC_PI_2, FRAC_PI_2 * 0.25, -FRAC_PI_2 * 0.25);
        }
        return (
            FRAC_PI_2 * big_k,
            FRAC_PI_2 * big_e,
            FRAC_PI_2 * dk,
            FRAC_PI_2 * de,
        );
    }
    let pair = pair_unchecked(k, kp);
    let (big_k, big_e) = (pair.first, pair.second);
    let m1 = kp * kp;
    let dk = (big_e - m1 * big_k) / (2.0 * m * m1);
    let de = (big_e - big_k) / (2.0 * m);
    (big_k, big_e, dk, de)
}

/// The ring-kernel profile `F(k) = (2/k − k) K(k) − (2/k) E(k)` and its
/// derivative `dF/dk`.
///
/// `F` is the Legendre function `Q_{1/2}` written in the modulus; the
/// axisymmetric stream-function kernel is `√(r r̄)/(2π) · F(k)`.
/// Requires `0 < k < 1` and `k' = √(1 − k²)`.
pub fn ring_profile(k: f64, kp: f64) -> (f64, f64) {
    let m = k * k;
    if m < SMALL_MODULUS_SERIES_LIMIT {
        // F = (π k³/16) ₂F₁(3/2, 3/2; 3; k²)
        let mut term = 1.0_f64;
        let mut sum = 1.0_f64;
        let mut weighted = 0.0_f64; // Σ j t_j
        for j in 0..MAX_SERIES_TERMS {
            let jf = j as f64;
            term *= (jf + 1.5) * (jf + 1.5) / ((jf + 1.0) * (jf + 3.0)) * m;
            sum += term;
            weighted += (jf + 1.0) * term;
            if term < 1e-18 * sum {
                break;
            }
        }
        let f = PI * k * m / 16.0 * sum;
        let df = PI * m / 16.0 * (3.0 * sum + 2.0 * weighted);
        return (f, df);
    }
    let pair = pair_unchecked(k, kp);
    let m1 = kp * kp;
    let f = (2.0 / k - k) * pair.first - 2.0 / k * pair.second;
    let df = ((2.0 - m) * pair.second - 2.0 * m1 * pair.first) / (m * m1);
    (f, df)
}

/// Coefficient of `ln(1/k')` in [`ring_profile`], as a function of
/// `m₁ = k'²`, and its derivative in `m₁`.
///
/// ```text
/// F(k) = Φ(m₁) ln(1/k') + (analytic in m₁),
/// Φ(m₁) = (2/π) [ −k K(k') + (2/k) E(k') ],  Φ(0) = 1.
/// ```
///
/// Requires `0 ≤ k' < 1` and the matching `k`.
pub fn ring_log_coefficient(k: f64, kp: f64) -> (f64, f64) {
    let m1 = kp * kp;
    // K, E evaluated at modulus k', so parameter m1 and complement k.
    let (kc, ec, dkc, dec) = parameter_derivatives(m1, kp, k);
    let scale = 2.0 / PI;
    let phi = scale * (-k * kc + 2.0 / k * ec);
    // dk/dm1 = −1/(2k)
    let dphi = scale * (kc / (2.0 * k) - k * dkc + ec / (k * k * k) + 2.0 / k * dec);
    (phi, dphi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gauss_quad::GaussLegendre;
    use proptest::prelude::*;

    /// Adaptive Gauss–Legendre on [a, b]: accept a panel when one 24-point
    /// rule agrees with two half-panel rules.
    fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
        let rule = GaussLegendre::new(24).unwrap();
        let whole = rule.integrate(a, b, f);
        let mid = 0.5 * (a + b);
        let halves = rule.integrate(a, mid, f) + rule.integrate(mid, b, f);
        if (whole - halves).abs() <= tol * halves.abs() || depth == 0 {
            halves
        } else {
            adaptive(f, a, mid, tol, depth - 1) + adaptive(f, mid, b, tol, depth - 1)
        }
    }

    /// Quadrature of the defining integrals written with `k'` so the
    /// integrand stays accurate near `k = 1`.
    fn quadrature_oracle(kp: f64) -> (f64, f64) {
        let m1 = kp * kp;
        let denom = move |t: f64| {
            let (s, c) = t.sin_cos();
            (c * c + m1 * s * s).sqrt()
        };
        let big_k = adaptive(&|t| 1.0 / denom(t), 0.0, FRAC_PI_2, 1e-15, 40);
        let big_e = adaptive(&denom, 0.0, FRAC_PI_2, 1e-15, 40);
        (big_k, big_e)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn zero_modulus() {
        let p = complete_elliptic(0.0).unwrap();
        assert_eq!(p.first, FRAC_PI_2);
        assert!((p.second - FRAC_PI_2).abs() < 1e-16);
    }

    #[test]
    fn second_kind_tends_to_one() {
        let p = complete_elliptic_complementary(1e-150).unwrap();
        assert!((p.second - 1.0).abs() < 1e-15);
        assert!(p.first > 340.0);
    }

    #[test]
    fn domain_errors() {
        assert!(complete_elliptic(-0.1).is_err());
        assert!(complete_elliptic(1.0).is_err());
        assert!(complete_elliptic(f64::NAN).is_err());
        assert!(complete_elliptic_complementary(0.0).is_err());
    }

    #[test]
    fn matches_quadrature_at_point_eight() {
        let p = complete_elliptic(0.8).unwrap();
        let (qk, qe) = quadrature_oracle(0.6);
        assert!(rel(p.first, qk) < 1e-13, "{} vs {}", p.first, qk);
        assert!(rel(p.second, qe) < 1e-13, "{} vs {}", p.second, qe);
    }

    #[test]
    fn matches_quadrature_approaching_one() {
        // log-spaced 1 − k from 1e-1 down to 1e-8
        for i in 0..=28 {
            let one_minus_k = 10f64.powf(-1.0 - 7.0 * i as f64 / 28.0);
            let kp = (one_minus_k * (2.0 - one_minus_k)).sqrt();
            let p = complete_elliptic_complementary(kp).unwrap();
            let (qk, qe) = quadrature_oracle(kp);
            assert!(rel(p.first, qk) < 1e-12, "K at 1-k={one_minus_k}");
            assert!(rel(p.second, qe) < 1e-12, "E at 1-k={one_minus_k}");
        }
    }

    #[test]
    fn series_and_agm_agree_at_switch() {
        let kp = COMPLEMENT_SERIES_LIMIT.sqrt();
        let k = ((1.0 - kp) * (1.0 + kp)).sqrt();
        let (sk, se) = complement_series(kp);
        let (ak, ae) = agm(k, kp);
        assert!(rel(sk, ak) < 2e-15);
        assert!(rel(se, ae) < 2e-15);
    }

    #[test]
    fn ring_profile_branches_agree() {
        let k = SMALL_MODULUS_SERIES_LIMIT.sqrt();
        let kp = ((1.0 - k) * (1.0 + k)).sqrt();
        let (fs, dfs) = ring_profile(k * (1.0 - 1e-15), kp);
        let pair = pair_unchecked(k, kp);
        let fc = (2.0 / k - k) * pair.first - 2.0 / k * pair.second;
        assert!(rel(fs, fc) < 1e-12);
        let dfc = ((2.0 - k * k) * pair.second - 2.0 * kp * kp * pair.first) / (k * k * kp * kp);
        assert!(rel(dfs, dfc) < 1e-12);
    }

    #[test]
    fn ring_profile_derivative_finite_difference() {
        for &k in &[0.05, 0.3, 0.6, 0.9, 0.99] {
            let h = 1e-6 * k;
            let f = |x: f64| ring_profile(x, ((1.0 - x) * (1.0 + x)).sqrt()).0;
            let fd = (f(k + h) - f(k - h)) / (2.0 * h);
            let (_, df) = ring_profile(k, ((1.0 - k) * (1.0 + k)).sqrt());
            assert!(rel(df, fd) < 1e-7, "k={k}: {df} vs {fd}");
        }
    }

    #[test]
    fn log_coefficient_matches_expansion() {
        // Φ(0) = 1 and F − Φ ln(1/k') stays bounded as k' → 0.
        let (phi0, _) = ring_log_coefficient(1.0, 0.0);
        assert!((phi0 - 1.0).abs() < 1e-15);
        let mut prev: Option<f64> = None;
        for &kp in &[1e-3f64, 1e-4, 1e-5, 1e-6] {
            let k = ((1.0 - kp) * (1.0 + kp)).sqrt();
            let (f, _) = ring_profile(k, kp);
            let (phi, _) = ring_log_coefficient(k, kp);
            let rest = f - phi * (1.0 / kp).ln();
            if let Some(p) = prev {
                assert!((rest - p).abs() < 1e-5);
            }
            prev = Some(rest);
        }
        // regular part tends to ln 4 − 2
        assert!((prev.unwrap() - (4f64.ln() - 2.0)).abs() < 1e-9);
    }

    #[test]
    fn log_coefficient_derivative_finite_difference() {
        for &m1 in &[0.003, 0.02, 0.2, 0.5, 0.9] {
            let eval = |m: f64| {
                let kp = m.sqrt();
                let k = (1.0 - m).sqrt();
                ring_log_coefficient(k, kp)
            };
            let h = 1e-6 * m1;
            let fd = (eval(m1 + h).0 - eval(m1 - h).0) / (2.0 * h);
            let (_, d) = eval(m1);
            assert!((d - fd).abs() < 1e-7 * (1.0 + d.abs()), "m1={m1}: {d} vs {fd}");
        }
    }

    #[test]
    fn parameter_derivative_branches_agree() {
        let m: f64 = 1e-2;
        let (k, kp) = (m.sqrt(), (1.0 - m).sqrt());
        let series = parameter_derivatives(m * (1.0 - 1e-14), k, kp);
        let pair = pair_unchecked(k, kp);
        let dk = (pair.second - kp * kp * pair.first) / (2.0 * m * kp * kp);
        let de = (pair.second - pair.first) / (2.0 * m);
        assert!(rel(series.2, dk) < 1e-10);
        assert!(rel(series.3, de) < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn legendre_relation(k in 0.0..0.999f64) {
            let p = complete_elliptic(k).unwrap();
            let q = complete_elliptic(p.k_complement).unwrap();
            let lhs = p.second * q.first + q.second * p.first - p.first * q.first;
            prop_assert!(rel(lhs, FRAC_PI_2) < 1e-12);
        }

        #[test]
        fn bounds_and_monotonicity(k in 0.0..0.998f64, dk in 1e-6..1e-3f64) {
            let p = complete_elliptic(k).unwrap();
            let q = complete_elliptic(k + dk).unwrap();
            prop_assert!(p.first >= FRAC_PI_2 && p.second <= FRAC_PI_2 + 1e-15);
            prop_assert!(q.first > p.first);
            prop_assert!(q.second < p.second);
        }
    }
}
