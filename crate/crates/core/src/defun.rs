//! The Differentiated Error Function (a, b) distribution.
//!
//! The symmetric law on ℝ whose MGF is (e^{bt²} − e^{at²}) / ((b − a)t²),
//! i.e. the Uniform(a, b) MGF evaluated at t². Equivalently Y = √(2V)·Z with
//! V ~ Uniform(a, b) and Z standard normal, which is how it is sampled.
//!
//! The density
//!
//! ```text
//! f(y) = y/(2(b−a))·[erf(y/2√b) − erf(y/2√a)]
//!      + 1/(2(b−a))·[√b·erf′(y/2√b) − √a·erf′(y/2√a)]
//! ```
//!
//! is evaluated in the equivalent cancellation-free form
//! f(y) = (√b·ierfc(|y|/2√b) − √a·ierfc(|y|/2√a)) / (b − a),
//! where ierfc is the integrated complementary error function.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain, input, Error, Result};
use crate::special::{ierfc, ierfc_scaled};
use crate::transforms::quad::integrate;

/// Below this |t| or |ω| the MGF and CF use their Taylor series.
const SERIES_CUTOFF: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferentiatedErrorFunction {
    a: f64,
    b: f64,
}

impl DifferentiatedErrorFunction {
    /// Requires 0 ≤ a < b. The a = b limit is Normal(0, 2a) and is rejected.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a < 0.0 || b <= 0.0 {
            return Err(domain!("defun: need 0 <= a < b, got a={a} b={b}"));
        }
        if a == b {
            return Err(domain!(
                "defun: degenerate parameters a = b = {a} (the limit is Normal(0, {}))",
                2.0 * a
            ));
        }
        if a > b {
            return Err(domain!("defun: need a < b, got a={a} b={b}"));
        }
        Ok(DifferentiatedErrorFunction { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Density at y. Symmetric; continuous everywhere, with a corner at 0 when a = 0.
    pub fn pdf(&self, y: f64) -> f64 {
        let y = y.abs();
        if y > 8.0 * self.b.sqrt() {
            return self.ln_pdf(y).exp();
        }
        let (a, b) = (self.a, self.b);
        let sb = b.sqrt();
        let head = sb * ierfc(y / (2.0 * sb));
        if a == 0.0 {
            return head / b;
        }
        let sa = a.sqrt();
        (head - sa * ierfc(y / (2.0 * sa))) / (b - a)
    }

    /// Log-density, accurate far into the tails.
    pub fn ln_pdf(&self, y: f64) -> f64 {
        let y = y.abs();
        let (a, b) = (self.a, self.b);
        let sb = b.sqrt();
        let ub = y / (2.0 * sb);
        let mut inner = sb * ierfc_scaled(ub);
        if a > 0.0 {
            let sa = a.sqrt();
            let ua = y / (2.0 * sa);
            // relative weight e^{ub² − ua²} ≤ 1
            inner -= sa * ierfc_scaled(ua) * (ub * ub - ua * ua).exp();
        }
        -ub * ub + inner.ln() - (b - a).ln()
    }

    /// Characteristic function (e^{−aω²} − e^{−bω²}) / ((b − a)ω²). Real and even.
    pub fn cf(&self, omega: f64) -> f64 {
        let (a, b) = (self.a, self.b);
        let x = omega * omega;
        if omega.abs() < SERIES_CUTOFF {
            return 1.0 - 0.5 * (a + b) * x + (a * a + a * b + b * b) * x * x / 6.0;
        }
        let w = (b - a) * x;
        (-a * x).exp() * -(-w).exp_m1() / w
    }

    /// Moment-generating function (e^{bt²} − e^{at²}) / ((b − a)t²). Even in t.
    pub fn mgf(&self, t: f64) -> Result<f64> {
        let (a, b) = (self.a, self.b);
        let x = t * t;
        if t.abs() < SERIES_CUTOFF {
            return Ok(1.0 + 0.5 * (a + b) * x + (a * a + a * b + b * b) * x * x / 6.0);
        }
        let w = (b - a) * x;
        let v = (a * x).exp() * w.exp_m1() / w;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Range(format!("defun MGF overflows at t={t}")))
        }
    }

    /// Mean and variance: (0, a + b).
    pub fn moments(&self) -> (f64, f64) {
        (0.0, self.a + self.b)
    }

    /// CDF by quadrature of the density, anchored at F(0) = 1/2.
    pub fn cdf(&self, y: f64) -> f64 {
        if y.is_nan() {
            return f64::NAN;
        }
        if y.is_infinite() {
            return if y > 0.0 { 1.0 } else { 0.0 };
        }
        let sb = self.b.sqrt();
        let u = y.abs();
        let pdf = |x: f64| self.pdf(x);
        if u > 2.0 * sb {
            let tail = integrate(pdf, u, u + 16.0 * sb, 1e-300, 1e-14, 200).value;
            if y > 0.0 {
                1.0 - tail
            } else {
                tail
            }
        } else {
            // the corner at 0 (a = 0) sits on the interval endpoint
            let half = integrate(pdf, 0.0, u, 1e-16, 1e-14, 200).value;
            if y >= 0.0 {
                0.5 + half
            } else {
                0.5 - half
            }
        }
    }

    /// CF of the sampler's construction, ∫ₐᵇ e^{−vω²} dv/(b − a), by quadrature
    /// over v rather than through the closed form.
    pub fn scale_mixture_cf(&self, omega: f64) -> f64 {
        let w2 = omega * omega;
        let r = integrate(|v: f64| (-v * w2).exp(), self.a, self.b, 1e-17, 1e-15, 200);
        r.value / (self.b - self.a)
    }

    /// Draws `n` values deterministically from `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(input!("sample size must be >= 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..n).map(|_| self.draw(&mut rng)).collect())
    }

    /// V ~ Uniform(a, b), then Y | V ~ Normal(0, 2V).
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let v = self.a + (self.b - self.a) * u;
        let z: f64 = StandardNormal.sample(rng);
        (2.0 * v).sqrt() * z
    }

    /// Checks the tail order f(y) = O(y⁻² e^{−y²/4b}) on a grid in [y_lo, y_hi].
    pub fn tail_envelope_check(&self, y_lo: f64, y_hi: f64, samples: usize) -> Result<TailReport> {
        let sb = self.b.sqrt();
        if !(y_lo < y_hi) {
            return Err(input!("tail check: need y_lo < y_hi, got [{y_lo}, {y_hi}]"));
        }
        // small slack for grids built as k·√b in floating point
        let slack = 1e-12 * sb;
        if y_lo < 5.0 * sb - slack || y_hi > 10.0 * sb + slack {
            return Err(input!(
                "tail check: grid [{y_lo}, {y_hi}] must lie in [5√b, 10√b] = [{}, {}]",
                5.0 * sb,
                10.0 * sb
            ));
        }
        if samples < 2 {
            return Err(input!("tail check: need at least 2 grid points"));
        }
        let mut min_r = f64::INFINITY;
        let mut max_r: f64 = 0.0;
        let mut underflow = 0;
        for i in 0..samples {
            let y = y_lo + (y_hi - y_lo) * i as f64 / (samples - 1) as f64;
            if self.pdf(y) == 0.0 {
                underflow += 1;
            }
            let ln_r = self.ln_pdf(y) + 2.0 * y.ln() + y * y / (4.0 * self.b);
            let r = ln_r.exp();
            min_r = min_r.min(r);
            max_r = max_r.max(r);
        }
        let inconclusive = underflow == samples;
        let bounded = min_r > 0.0 && max_r.is_finite();
        let ratio = if bounded { max_r / min_r } else { f64::INFINITY };
        Ok(TailReport {
            min_ratio: min_r,
            max_ratio: max_r,
            spread: ratio,
            passed: !inconclusive && bounded && ratio <= 4.0,
            inconclusive,
        })
    }
}

/// Outcome of [`DifferentiatedErrorFunction::tail_envelope_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailReport {
    /// min and max of f(y)·y²·e^{y²/4b} over the grid
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// max / min
    pub spread: f64,
    pub passed: bool,
    /// the density underflowed to zero over the whole grid
    pub inconclusive: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Survival function from the closed-form i²erfc antiderivative,
    /// independent of the quadrature path used by `cdf`.
    fn survival_oracle(d: &DifferentiatedErrorFunction, y: f64) -> f64 {
        use crate::special::erfc;
        let i2erfc = |u: f64| 0.25 * ((1.0 + 2.0 * u * u) * erfc(u) - 2.0 / PI.sqrt() * u * (-u * u).exp());
        let (a, b) = (d.a, d.b);
        let mut s = 2.0 * b * i2erfc(y / (2.0 * b.sqrt()));
        if a > 0.0 {
            s -= 2.0 * a * i2erfc(y / (2.0 * a.sqrt()));
        }
        s / (b - a)
    }

    /// The density written out directly, for comparison against the stable form.
    fn pdf_literal(a: f64, b: f64, y: f64) -> f64 {
        use crate::special::{erf, erf_deriv};
        let (sa, sb) = (a.sqrt(), b.sqrt());
        if a == 0.0 {
            return (y * (erf(y / (2.0 * sb)) - y.signum()) + sb * erf_deriv(y / (2.0 * sb))) / (2.0 * b);
        }
        y / (2.0 * (b - a)) * (erf(y / (2.0 * sb)) - erf(y / (2.0 * sa)))
            + (sb * erf_deriv(y / (2.0 * sb)) - sa * erf_deriv(y / (2.0 * sa))) / (2.0 * (b - a))
    }

    #[test]
    fn peak_value() {
        let d = DifferentiatedErrorFunction::new(1.0, 4.0).unwrap();
        let want = 1.0 / (3.0 * PI.sqrt());
        assert!((d.pdf(0.0) - want).abs() < 1e-15);
        assert!((want - 0.188_063).abs() < 1e-6);
    }

    // 30-digit values of the scale-mixture integral (1/(b−a))∫ₐᵇ e^{−y²/4v}/√(4πv) dv
    #[test]
    fn pdf_reference_values() {
        let cases = [
            (0.0, 1.0, 0.3, 0.426_836_459_039_516_447),
            (0.0, 1.0, 3.0, 0.008_622_864_324_780_776_366),
            (0.0, 1.0, 7.0, 9.886_908_549_744_664_646e-8),
            (0.5, 1.0, 1.0, 0.232_651_515_573_118_735),
            (0.5, 1.0, 7.0, 1.977_378_189_296_909_654e-7),
            (1.0, 4.0, 3.0, 0.067_013_885_116_899_750_03),
            (1.0, 4.0, 7.0, 0.002_041_915_442_734_476_806),
        ];
        for (a, b, y, want) in cases {
            let d = DifferentiatedErrorFunction::new(a, b).unwrap();
            let got = d.pdf(y);
            assert!(((got - want) / want).abs() < 1e-13, "({a},{b}) y={y}: {got} vs {want}");
        }
    }

    #[test]
    fn stable_form_matches_literal_formula() {
        for (a, b) in [(0.0, 1.0), (0.5, 1.0), (1.0, 4.0), (2.0, 3.0)] {
            let d = DifferentiatedErrorFunction::new(a, b).unwrap();
            for i in -40..=40 {
                let y = i as f64 * 0.1 * b.sqrt();
                let lit = pdf_literal(a, b, y);
                assert!((d.pdf(y) - lit).abs() < 1e-14, "({a},{b}) y={y}");
            }
        }
    }

    #[test]
    fn symmetric_and_unimodal() {
        for (a, b) in [(0.0, 1.0), (0.5, 1.0), (1.0, 4.0)] {
            let d = DifferentiatedErrorFunction::new(a, b).unwrap();
            let mut prev = f64::INFINITY;
            for i in 0..400 {
                let y = i as f64 * 0.05;
                assert_eq!(d.pdf(y), d.pdf(-y));
                let f = d.pdf(y);
                assert!(f <= prev, "not decreasing at {y}");
                prev = f;
            }
        }
    }

    #[test]
    fn log_space_branch_is_continuous() {
        let d = DifferentiatedErrorFunction::new(1.0, 4.0).unwrap();
        let y = 8.0 * 2.0;
        let below = d.pdf(y * (1.0 - 1e-12));
        let above = d.pdf(y * (1.0 + 1e-12));
        assert!(((below - above) / above).abs() < 1e-9);
        assert!((d.ln_pdf(3.0) - d.pdf(3.0).ln()).abs() < 1e-13);
    }

    #[test]
    fn far_tail_does_not_underflow_in_log_space() {
        let d = DifferentiatedErrorFunction::new(0.5, 1.0).unwrap();
        let l = d.ln_pdf(80.0);
        assert!(l.is_finite());
        // leading order: -y²/4b - 2 ln y + ln(2 b^{3/2} / ((b-a)√π))
        let lead = -1600.0 - 2.0 * 80f64.ln() + (2.0 / (0.5 * PI.sqrt())).ln();
        assert!((l - lead).abs() < 1e-2);
    }

    #[test]
    fn cf_and_mgf_series_branches() {
        let d = DifferentiatedErrorFunction::new(1.0, 4.0).unwrap();
        assert_eq!(d.cf(0.0), 1.0);
        assert_eq!(d.mgf(0.0).unwrap(), 1.0);
        let e: f64 = 0.99e-4;
        let x = e * e;
        let direct = (-x).exp() * -(-3.0 * x).exp_m1() / (3.0 * x);
        assert!((d.cf(e) - direct).abs() < 1e-12);
        assert!((d.cf(e) - d.cf(1.01e-4)).abs() < 1e-7);
        assert_eq!(d.cf(0.7), d.cf(-0.7));
        assert_eq!(d.mgf(0.7).unwrap(), d.mgf(-0.7).unwrap());
    }

    #[test]
    fn cf_value_a0_b1() {
        let d = DifferentiatedErrorFunction::new(0.0, 1.0).unwrap();
        assert!((d.cf(1.0) - (1.0 - (-1f64).exp())).abs() < 1e-15);
        assert!((d.cf(1.0) - 0.632_121).abs() < 1e-6);
    }

    #[test]
    fn mgf_value_and_curvature() {
        let d = DifferentiatedErrorFunction::new(1.0, 4.0).unwrap();
        let want = (4f64.exp() - 1f64.exp()) / 3.0;
        assert!((d.mgf(1.0).unwrap() - want).abs() < 1e-12);
        assert!((want - 17.293_289).abs() < 1e-6);
        // second derivative at 0 by central differences ≈ a + b
        let h = 1e-3;
        let m2 = (d.mgf(h).unwrap() - 2.0 + d.mgf(-h).unwrap()) / (h * h);
        assert!((m2 - 5.0).abs() < 1e-4);
    }

    #[test]
    fn mgf_overflow_is_range_error() {
        let d = DifferentiatedErrorFunction::new(1.0, 4.0).unwrap();
        assert!(matches!(d.mgf(20.0), Err(Error::Range(_))));
    }

    #[test]
    fn degenerate_and_invalid_parameters() {
        assert!(matches!(DifferentiatedErrorFunction::new(1.0, 1.0), Err(Error::Domain(_))));
        assert!(DifferentiatedErrorFunction::new(2.0, 1.0).is_err());
        assert!(DifferentiatedErrorFunction::new(-0.1, 1.0).is_err());
        assert!(DifferentiatedErrorFunction::new(0.0, 1.0).is_ok());
    }

    #[test]
    fn moments_exact() {
        let d = DifferentiatedErrorFunction::new(1.0, 4.0).unwrap();
        assert_eq!(d.moments(), (0.0, 5.0));
        let d = DifferentiatedErrorFunction::new(0.0, 1.0).unwrap();
        assert_eq!(d.moments(), (0.0, 1.0));
    }

    #[test]
    fn cdf_matches_closed_form_survival() {
        for (a, b) in [(0.0, 1.0), (0.5, 1.0), (1.0, 4.0)] {
            let d = DifferentiatedErrorFunction::new(a, b).unwrap();
            assert_eq!(d.cdf(0.0), 0.5);
            for i in 1..60 {
                let y = i as f64 * 0.2 * b.sqrt();
                let s = survival_oracle(&d, y);
                assert!((1.0 - d.cdf(y) - s).abs() < 1e-13, "({a},{b}) y={y}");
                // the oracle cancels in the far tail
                assert!((d.cdf(-y) - s).abs() <= 1e-11 * s, "({a},{b}) y=-{y}");
            }
        }
    }

    #[test]
    fn lower_tail_reference_values() {
        let d = DifferentiatedErrorFunction::new(0.0, 1.0).unwrap();
        for (y, want) in [
            (3.0, 4.013_130_275_173_471_92e-3),
            (6.2, 4.898_624_477_479_537_62e-7),
            (9.0, 4.344_650_406_939_191_93e-12),
        ] {
            assert!(((d.cdf(-y) - want) / want).abs() < 1e-13, "y={y}");
        }
    }

    #[test]
    fn tail_check_cases() {
        let d = DifferentiatedErrorFunction::new(1.0, 4.0).unwrap();
        let r = d.tail_envelope_check(10.0, 20.0, 50).unwrap();
        assert!(r.passed, "{r:?}");
        let d = DifferentiatedErrorFunction::new(0.5, 1.0).unwrap();
        assert!(d.tail_envelope_check(5.0, 10.0, 50).unwrap().passed);
        assert!(matches!(d.tail_envelope_check(7.0, 7.0, 50), Err(Error::Input(_))));
        assert!(d.tail_envelope_check(1.0, 7.0, 50).is_err());
    }

    #[test]
    fn sampler_cf_identity() {
        for (a, b) in [(0.0, 1.0), (0.5, 1.0), (1.0, 4.0)] {
            let d = DifferentiatedErrorFunction::new(a, b).unwrap();
            for k in 0..=200 {
                let w = 0.05 * k as f64;
                assert!((d.scale_mixture_cf(w) - d.cf(w)).abs() <= 1e-12, "({a},{b}) ω={w}");
            }
        }
    }

    #[test]
    fn sampler_moment_bands() {
        let d = DifferentiatedErrorFunction::new(1.0, 4.0).unwrap();
        let xs = d.sample(1_000_000, 3).unwrap();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        // E[Y⁴] = 12·E[V²] = 4(a² + ab + b²)
        let m4 = 4.0 * (1.0 + 4.0 + 16.0);
        let band = 4.0 * ((m4 - 25.0) / n).sqrt();
        assert!((var - 5.0).abs() < band, "{var} ± {band}");
        let xs = d.sample(100_000, 3).unwrap();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() <= 0.03, "{mean}");
    }

    #[test]
    fn sampler_is_seed_deterministic() {
        let d = DifferentiatedErrorFunction::new(1.0, 4.0).unwrap();
        assert_eq!(d.sample(100, 9).unwrap(), d.sample(100, 9).unwrap());
        assert_ne!(d.sample(100, 9).unwrap(), d.sample(100, 10).unwrap());
        assert!(d.sample(0, 1).is_err());
    }
}
