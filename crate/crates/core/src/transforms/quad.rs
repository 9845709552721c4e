//! Adaptive Gauss-Kronrod quadrature, pairwise summation and Wynn's epsilon
//! extrapolation. These are the numerical workhorses behind every integral
//! in the crate.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

// 21-point Kronrod abscissae on [0, 1]; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_634_342,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Result of a (possibly adaptive) quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub converged: bool,
}

impl Integral {
    pub const ZERO: Integral = Integral {
        value: 0.0,
        abs_error: 0.0,
        converged: true,
    };
}

/// One 21-point Gauss-Kronrod panel. Returns `(value, error_estimate)`.
pub fn gauss_kronrod21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let (v, e, _) = gk21(f, a, b);
    (v, e)
}

/// As [`gauss_kronrod21`], also returning the rounding floor 50ε·∫|f|.
fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;

    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    (value, err, floor)
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    floor: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Globally adaptive quadrature of `f` over the finite interval `[a, b]`.
///
/// The segment with the largest error estimate is bisected until the summed
/// error drops below `max(abs_tol, rel_tol * |I|)` or `max_subdivisions`
/// bisections have been spent. The final value is a pairwise sum over the
/// segments in left-to-right order, so the result is reproducible.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Integral {
    if a == b {
        return Integral::ZERO;
    }
    let (v0, e0, r0) = gk21(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value: v0,
        error: e0,
        floor: r0,
    });
    let mut total = v0;
    let mut total_err = e0;
    let mut total_floor = r0;
    // errors at the rounding floor cannot be reduced by bisection
    let done = |v: f64, e: f64, fl: f64| e <= abs_tol.max(rel_tol * v.abs()).max(2.0 * fl);
    let mut converged = done(total, total_err, total_floor);
    let mut splits = 0;

    while !converged && splits < max_subdivisions {
        let seg = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a.min(seg.b) && mid < seg.a.max(seg.b)) {
            // interval exhausted at machine precision
            heap.push(seg);
            break;
        }
        let (v1, e1, r1) = gk21(&mut f, seg.a, mid);
        let (v2, e2, r2) = gk21(&mut f, mid, seg.b);
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        total_floor += r1 + r2 - seg.floor;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
            floor: r1,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
            floor: r2,
        });
        splits += 1;
        // periodic resummation keeps the running totals honest
        if splits % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
            total_floor = heap.iter().map(|s| s.floor).sum();
        }
        converged = done(total, total_err, total_floor);
    }

    let mut segs = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let values: Vec<f64> = segs.iter().map(|s| s.value).collect();
    let errors: Vec<f64> = segs.iter().map(|s| s.error).collect();
    let value = pairwise_sum(&values);
    let abs_error = pairwise_sum(&errors);
    Integral {
        value,
        abs_error,
        converged: converged || done(value, abs_error, total_floor),
    }
}

/// Pairwise (cascade) summation; deterministic for a fixed input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (l, r) = xs.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums.
///
/// Returns the highest-order even-column estimate together with the
/// difference to the previous even-column estimate as an error proxy.
pub fn wynn_epsilon(partial_sums: &[f64]) -> Option<(f64, f64)> {
    let n = partial_sums.len();
    if n < 3 {
        return None;
    }
    // prev: column k-1, cur: column k
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = partial_sums.to_vec();
    let mut best = *partial_sums.last().unwrap();
    let mut best_err = (partial_sums[n - 1] - partial_sums[n - 2]).abs();
    let mut k = 0;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 || !d.is_finite() {
                return Some((best, best_err));
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        k += 1;
        prev = cur;
        cur = next;
        if k % 2 == 0 && !cur.is_empty() {
            let est = *cur.last().unwrap();
            if !est.is_finite() {
                break;
            }
            let err = if cur.len() >= 2 {
                (est - cur[cur.len() - 2]).abs()
            } else {
                (est - best).abs()
            };
            best_err = err.max(4.0 * f64::EPSILON * est.abs());
            best = est;
        }
    }
    Some((best, best_err))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x, 0.0, 3.0, 1e-14, 1e-14, 10);
        assert!((r.value - (81.0 / 4.0 - 9.0)).abs() < 1e-13);
        assert!(r.converged);
    }

    #[test]
    fn peaked_integrand() {
        // ∫ exp(-x²/(2σ²)) over ±1 with σ = 1e-3
        let s = 1e-3;
        let r = integrate(|x: f64| (-x * x / (2.0 * s * s)).exp(), -1.0, 1.0, 1e-14, 1e-12, 500);
        let exact = s * (2.0 * std::f64::consts::PI).sqrt();
        assert!((r.value - exact).abs() < 1e-13, "{} vs {}", r.value, exact);
    }

    #[test]
    fn reversed_bounds_negate() {
        let f = |x: f64| x.cos();
        let a = integrate(f, 0.0, 1.0, 1e-14, 1e-14, 50).value;
        let b = integrate(f, 1.0, 0.0, 1e-14, 1e-14, 50).value;
        assert!((a + b).abs() < 1e-15);
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // ln 2 = 1 - 1/2 + 1/3 - ...
        let mut s = 0.0;
        let sums: Vec<f64> = (1..=20)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                s
            })
            .collect();
        let (est, _) = wynn_epsilon(&sums).unwrap();
        assert!((est - 2f64.ln()).abs() < 1e-12, "{est}");
    }

    #[test]
    fn pairwise_matches_naive_on_small_inputs() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 4950.0);
    }
}
