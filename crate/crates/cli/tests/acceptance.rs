//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::ffi::OsString;
use std::f64::consts::PI;
use std::process::ExitCode;

use mixident::accessibility::{builtin_mappings, lookup, transport_mixed_mgf, verify_default};
use mixident::mixtures::mixture_cdf;
use mixident::transforms::gil_pelaez_pdf;
use mixident::transforms::quad::integrate;
use mixident::{
    CharacteristicFunction, DifferentiatedErrorFunction, KernelDistribution, MixingDensity, MixtureModel,
    QuadratureConfig, Result, SGrid,
};

const DE_SETS: [(f64, f64); 3] = [(0.0, 1.0), (0.5, 1.0), (1.0, 4.0)];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn kernel(s: &str) -> KernelDistribution {
    s.parse().expect("kernel spec")
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn mapping_identities() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut failed = Vec::new();
    for m in builtin_mappings() {
        let r = verify_default(&m, 1e-10)?;
        worst = worst.max(r.max_abs_residual);
        if !r.passed {
            failed.push(m.name().to_string());
        }
    }
    outcome(failed.is_empty(), format!("max residual {worst:.2e} over 5 mappings {failed:?}"))
}

fn de_inversion() -> Result<Outcome> {
    let cfg = QuadratureConfig::default();
    let mut worst: f64 = 0.0;
    for (a, b) in DE_SETS {
        let d = kernel(&format!("defun:a={a},b={b}"));
        let de = DifferentiatedErrorFunction::new(a, b)?;
        let cf = CharacteristicFunction::of_kernel(&d);
        let half = 10.0 * b.sqrt();
        for y in linspace(-half, half, 200) {
            let inv = gil_pelaez_pdf(&cf, y, &cfg)?;
            worst = worst.max((inv.value - de.pdf(y)).abs());
        }
    }
    outcome(worst <= 1e-6, format!("max |pdf - inversion| {worst:.2e}"))
}

fn de_moments() -> Result<Outcome> {
    let mut worst = [0.0f64; 3];
    for (a, b) in DE_SETS {
        let de = DifferentiatedErrorFunction::new(a, b)?;
        let l = 40.0 * b.sqrt();
        // split at the origin, where a = 0 puts a corner
        let q = |f: &dyn Fn(f64) -> f64| {
            integrate(f, -l, 0.0, 1e-16, 1e-14, 400).value + integrate(f, 0.0, l, 1e-16, 1e-14, 400).value
        };
        let mass = q(&|y| de.pdf(y));
        let mean = q(&|y| y * de.pdf(y));
        let var = q(&|y| y * y * de.pdf(y)) - mean * mean;
        worst[0] = worst[0].max(mean.abs());
        worst[1] = worst[1].max((var - (a + b)).abs());
        worst[2] = worst[2].max((mass - 1.0).abs());
    }
    outcome(
        worst[0] <= 1e-8 && worst[1] <= 1e-6 && worst[2] <= 1e-8,
        format!("|mean| {:.2e}, |var - (a+b)| {:.2e}, |mass - 1| {:.2e}", worst[0], worst[1], worst[2]),
    )
}

fn de_sampler() -> Result<Outcome> {
    let mut cf_worst: f64 = 0.0;
    let mut z_worst: f64 = 0.0;
    let n = 1_000_000;
    for (a, b) in DE_SETS {
        let de = DifferentiatedErrorFunction::new(a, b)?;
        for w in linspace(0.0, 10.0, 201) {
            cf_worst = cf_worst.max((de.scale_mixture_cf(w) - de.cf(w)).abs());
        }
        let xs = de.sample(n, 20_240_601)?;
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        // Var(Y²) = E[Y⁴] - (a+b)², with E[Y⁴] = 12 E[V²] = 4(a² + ab + b²)
        let fourth = 4.0 * (a * a + a * b + b * b);
        let sd = ((fourth - (a + b).powi(2)) / n as f64).sqrt();
        z_worst = z_worst.max((var - (a + b)).abs() / sd);
    }
    outcome(
        cf_worst <= 1e-12 && z_worst <= 4.0,
        format!("CF residual {cf_worst:.2e}, variance within {z_worst:.2} sd"),
    )
}

fn gamma_poisson() -> Result<Outcome> {
    let cfg = QuadratureConfig::default();
    let mut worst: f64 = 0.0;
    for r in [1.0, 2.0, 5.0] {
        for theta in [0.5, 1.0, 2.0] {
            let g = MixingDensity::parse(&format!("gamma:r={r},theta={theta}"))?;
            let mm = MixtureModel::new(kernel("poisson:lambda=1"), g)?;
            let nb = kernel(&format!("negbin:r={r},p={}", theta / (1.0 + theta)));
            let mut prev = 0.0;
            for x in 0..=50 {
                let c = mixture_cdf(&mm, x as f64, &cfg)?;
                worst = worst.max((c - prev - nb.density(x as f64)).abs());
                prev = c;
            }
        }
    }
    outcome(worst <= 1e-10, format!("max |pmf difference| {worst:.2e}"))
}

fn transport() -> Result<Outcome> {
    let m = lookup("exp-to-laplace")?;
    let g = MixingDensity::parse("gamma:r=2,theta=1")?;
    let grid = SGrid::Scaled {
        points: 20,
        fraction: 0.9,
    };
    let r = transport_mixed_mgf(&m, &g, &grid, 1e-8, &QuadratureConfig::default())?;
    outcome(r.passed, format!("max residual {:.2e}", r.max_abs_residual))
}

fn family_identities() -> Result<Outcome> {
    let xs: Vec<f64> = linspace(-3.0, 12.0, 61).collect();
    let mut scale: f64 = 0.0;
    for (base, fam) in [("r=2.5", "gamma"), ("tau=1.5", "weibull"), ("alpha=3", "pareto1")] {
        let unit = kernel(&format!("{fam}:{base},theta=1"));
        for theta in [0.5, 1.0, 2.0, 3.5] {
            let d = kernel(&format!("{fam}:{base},theta={theta}"));
            for &x in &xs {
                scale = scale.max((d.cdf(x) - unit.cdf(x / theta)).abs());
            }
        }
    }
    let mut location: f64 = 0.0;
    for (fam, rest) in [("normal", "var=2"), ("laplace", "sigma=1.5"), ("gumbel", "sigma=0.7")] {
        let zero = kernel(&format!("{fam}:m=0,{rest}"));
        for m in [-2.0, 0.5, 3.0] {
            let d = kernel(&format!("{fam}:m={m},{rest}"));
            for &x in &xs {
                location = location.max((d.cdf(x) - zero.cdf(x - m)).abs());
            }
        }
    }
    let mut closure: f64 = 0.0;
    for (fam, rest) in [("poisson", ""), ("negbin", ",p=0.4"), ("gamma", ",theta=1.3")] {
        let shape = if fam == "poisson" { "lambda" } else { "r" };
        for r in [0.5, 1.0, 2.5] {
            let one = kernel(&format!("{fam}:{shape}={r}{rest}"));
            let two = kernel(&format!("{fam}:{shape}={}{rest}", 2.0 * r));
            for w in linspace(-5.0, 5.0, 41) {
                let c = one.cf(w);
                closure = closure.max((two.cf(w) - c * c).norm());
            }
        }
    }
    let mut over = true;
    for r in [0.3, 1.0, 2.0, 7.5] {
        for p in [0.05, 0.3, 0.5, 0.8, 0.95] {
            let d = kernel(&format!("negbin:r={r},p={p}"));
            over &= d.variance() > d.mean();
        }
    }
    outcome(
        scale <= 1e-12 && location <= 1e-12 && closure <= 1e-12 && over,
        format!("scale {scale:.2e}, location {location:.2e}, closure {closure:.2e}, overdispersion {over}"),
    )
}

fn tail_order() -> Result<Outcome> {
    let mut spreads = Vec::new();
    let mut passed = true;
    for (a, b) in [(0.5, 1.0), (1.0, 4.0)] {
        let de = DifferentiatedErrorFunction::new(a, b)?;
        let sb: f64 = b.sqrt();
        let r = de.tail_envelope_check(5.0 * sb, 10.0 * sb, 101)?;
        passed &= r.passed;
        spreads.push(format!("{:.3}", r.spread));
    }
    outcome(passed, format!("max/min envelope ratio {}", spreads.join(", ")))
}

fn figure1() -> Result<Outcome> {
    let (a, b) = (1.0f64, 4.0f64);
    let argv: Vec<OsString> = ["mixident", "figure1", "--a", "1", "--b", "4", "--grid", "-10:10:0.1"]
        .iter()
        .map(OsString::from)
        .collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    if mixident_cli::run(argv, &mut out, &mut err) != 0 {
        return outcome(false, String::from_utf8_lossy(&err).into_owned());
    }
    let text = String::from_utf8(out).expect("utf-8 csv");
    let f: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).and_then(|c| c.parse().ok()).expect("f column"))
        .collect();
    let n = f.len();
    let symmetric = (0..n / 2).all(|i| (f[i] - f[n - 1 - i]).abs() <= 1e-12);
    let unimodal = (0..n / 2).all(|i| f[i] <= f[i + 1]) && (n / 2..n - 1).all(|i| f[i] >= f[i + 1]);
    let peak = (2.0 / PI.sqrt()) / (2.0 * (a.sqrt() + b.sqrt()));
    let peak_err = (f[n / 2] - peak).abs();
    let vars: Vec<f64> = [1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|&bb| DifferentiatedErrorFunction::new(0.5, bb).map(|d| d.moments().1))
        .collect::<Result<_>>()?;
    let increasing = vars.windows(2).all(|w| w[0] < w[1]);
    outcome(
        n == 201 && symmetric && unimodal && peak_err <= 1e-9 && increasing,
        format!("{n} rows, symmetric {symmetric}, unimodal {unimodal}, |f(0) - peak| {peak_err:.2e}, variance increasing {increasing}"),
    )
}

fn round_trip() -> Result<Outcome> {
    let cfg = QuadratureConfig::default();
    let mut worst: f64 = 0.0;
    for spec in ["normal:m=0,var=1", "normal:m=1,var=4", "laplace:m=0,sigma=1", "laplace:m=-1,sigma=0.5"] {
        let d = kernel(spec);
        let cf = CharacteristicFunction::of_kernel(&d);
        let (m, sd) = (d.mean(), d.variance().sqrt());
        for y in linspace(m - 6.0 * sd, m + 6.0 * sd, 121) {
            let inv = gil_pelaez_pdf(&cf, y, &cfg)?;
            worst = worst.max((inv.value - d.density(y)).abs());
        }
    }
    outcome(worst <= 1e-6, format!("max |density - inversion| {worst:.2e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("mapping identities", mapping_identities),
        ("DE inversion", de_inversion),
        ("DE moments", de_moments),
        ("DE sampler", de_sampler),
        ("Gamma-Poisson = NegBin", gamma_poisson),
        ("mixed-MGF transport", transport),
        ("family identities", family_identities),
        ("tail order", tail_order),
        ("figure1 curve", figure1),
        ("inversion round-trip", round_trip),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (passed, detail) = match check() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!passed);
        println!("criterion {:>2} {:<24} {}  {detail}", i + 1, name, if passed { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {}/10 passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
