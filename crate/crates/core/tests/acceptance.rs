//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use dbs_core::exact_disk::{enumerate_ball_spectrum, Problem};
use dbs_core::experiments::ConvergenceTable;
use dbs_core::geometry::{
    regular_polygon, ConvexPolygon, Disk, Domain, Point2, PolygonMode, Triangle,
};
use dbs_core::quadrature::{
    disk_rule, gauss_legendre, integrate_circle, integrate_disk, triangle_rule,
};
use dbs_core::solver::{compute_spectrum, Method, DEFAULT_NULL_THRESHOLD};

const BIN: &str = env!("CARGO_BIN_EXE_dbs");

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn dbs(args: &[&str]) -> (String, Duration) {
    let start = Instant::now();
    let out = Command::new(BIN)
        .args(args)
        .output()
        .expect("run dbs binary");
    let elapsed = start.elapsed();
    assert!(
        out.status.success(),
        "dbs {args:?} exited with {}: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    (
        String::from_utf8(out.stdout).expect("utf-8 output"),
        elapsed,
    )
}

fn spectrum(domain: &Domain, method: Method, n: usize) -> Vec<f64> {
    compute_spectrum(domain, method, n, DEFAULT_NULL_THRESHOLD)
        .expect("solve")
        .values
}

fn disk_exactness() -> Outcome {
    let (text, elapsed) = dbs(&["disk", "--n-max", "9", "--degree", "6", "--format", "json"]);
    let report: serde_json::Value = serde_json::from_str(&text).expect("json report");
    let values: Vec<f64> = serde_json::from_value(report["values"].clone()).expect("values");
    let expected = [2.0, 4.0, 4.0, 6.0, 6.0, 8.0, 8.0, 10.0, 10.0];
    let err = values
        .iter()
        .zip(expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    outcome(
        values.len() == 9 && err <= 1e-8 && elapsed < Duration::from_millis(100),
        format!("max abs error {err:e}, runtime {elapsed:?}"),
    )
}

fn shift_identity() -> Outcome {
    let dbs = enumerate_ball_spectrum(20, 2, Problem::Dbs).unwrap();
    let mdbs = enumerate_ball_spectrum(20, 2, Problem::Mdbs).unwrap();
    let diffs: Vec<f64> = dbs.iter().zip(&mdbs).map(|(a, b)| a - b).collect();
    outcome(
        diffs.len() == 20 && diffs.iter().all(|&d| d == 1.0),
        format!("differences {diffs:?}"),
    )
}

fn paradox_convergence(mode: &str) -> (Outcome, Duration) {
    let (text, elapsed) = dbs(&[
        "paradox",
        "--k-list",
        "8,16,32,64,128",
        "--mode",
        mode,
        "--degree",
        "16",
        "--n-max",
        "5",
        "--format",
        "json",
    ]);
    let table: ConvergenceTable = serde_json::from_str(&text).expect("json table");
    let Some(shapes) = table.column_shapes() else {
        return (
            outcome(false, format!("rows failed: {:?}", table.failed_rows())),
            elapsed,
        );
    };
    let mut passed = true;
    let mut detail = Vec::new();
    for s in &shapes {
        let ok =
            s.strictly_decreasing && s.final_ratio <= 0.25 && (0.75..=1.25).contains(&s.final_gap);
        passed &= ok;
        detail.push(format!(
            "n={} {} decreasing={} final/initial={:.3e} final gap={:.6}",
            s.n,
            if ok { "ok" } else { "BAD" },
            s.strictly_decreasing,
            s.final_ratio,
            s.final_gap
        ));
        if !s.strictly_decreasing {
            detail.push(format!(
                "    err_{} column {:?}",
                s.n,
                table.error_column(s.n)
            ));
        }
    }
    (
        outcome(
            passed,
            format!("runtime {elapsed:?}\n    {}", detail.join("\n    ")),
        ),
        elapsed,
    )
}

fn test_polygons() -> Vec<(String, ConvexPolygon)> {
    let mut out = vec![
        ("unit square".to_string(), ConvexPolygon::unit_square()),
        (
            "inscribed hexagon".to_string(),
            regular_polygon(6, 1.0, PolygonMode::Inscribed).unwrap(),
        ),
        (
            "scalene triangle".to_string(),
            ConvexPolygon::new(vec![
                Point2::new(0.0, 0.0),
                Point2::new(2.0, 0.1),
                Point2::new(0.4, 1.3),
            ])
            .unwrap(),
        ),
    ];
    for k in [3, 8, 16, 32, 64, 128] {
        for mode in [PolygonMode::Inscribed, PolygonMode::Circumscribed] {
            out.push((
                format!("{mode} {k}-gon"),
                regular_polygon(k, 1.0, mode).unwrap(),
            ));
        }
    }
    out
}

fn constant_trial_bound() -> Outcome {
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_equality: f64 = 0.0;
    let mut domains: Vec<(String, Domain)> = test_polygons()
        .into_iter()
        .map(|(n, p)| (n, p.into()))
        .collect();
    domains.push(("unit disk".into(), Disk::unit().into()));
    for (_, domain) in &domains {
        let bound = domain.constant_quotient();
        for p in [0, 1, 2, 4, 8, 12, 16] {
            let d1 = spectrum(domain, Method::Poly { degree: p }, 1)[0];
            worst_excess = worst_excess.max(d1 - bound);
            if p == 0 {
                worst_equality = worst_equality.max((d1 - bound).abs());
            }
        }
        let d1 = spectrum(domain, Method::Mfs { size: 40 }, 1)[0];
        worst_excess = worst_excess.max(d1 - bound);
    }
    outcome(
        worst_excess <= 1e-10 && worst_equality <= 1e-13,
        format!(
            "{} domains: max(δ_1 - perimeter/area) = {worst_excess:e}, p=0 equality defect {worst_equality:e}",
            domains.len()
        ),
    )
}

fn ritz_monotonicity() -> Outcome {
    let sq: Domain = ConvexPolygon::unit_square().into();
    let mut worst_increase = f64::NEG_INFINITY;
    let mut prev: Option<Vec<f64>> = None;
    for p in [4, 6, 8, 10, 12] {
        let s = spectrum(&sq, Method::Poly { degree: p }, 5);
        if let Some(prev) = &prev {
            for (a, b) in s.iter().zip(prev) {
                worst_increase = worst_increase.max(a - b);
            }
        }
        prev = Some(s);
    }
    let disk: Domain = Disk::unit().into();
    let exact = enumerate_ball_spectrum(33, 2, Problem::Dbs).unwrap();
    let mut worst_undershoot = f64::NEG_INFINITY;
    for p in 0..=16 {
        for (v, e) in spectrum(&disk, Method::Poly { degree: p }, 2 * p + 1)
            .iter()
            .zip(&exact)
        {
            worst_undershoot = worst_undershoot.max(e - v);
        }
    }
    outcome(
        worst_increase <= 1e-10 && worst_undershoot <= 1e-10,
        format!("square max increase {worst_increase:e}; disk max undershoot {worst_undershoot:e}"),
    )
}

fn dilation_law() -> Outcome {
    let mut worst: f64 = 0.0;
    for (_, poly) in test_polygons().into_iter().take(2) {
        let base = spectrum(&poly.clone().into(), Method::Poly { degree: 12 }, 5);
        for t in [0.5, 2.0, 3.0] {
            let scaled = poly.transformed(t, 0.0, Point2::default()).unwrap();
            for (a, b) in spectrum(&scaled.into(), Method::Poly { degree: 12 }, 5)
                .iter()
                .zip(&base)
            {
                worst = worst.max((a * t - b).abs() / b);
            }
        }
    }
    outcome(worst <= 1e-10, format!("max relative defect {worst:e}"))
}

fn oracle_agreement() -> Outcome {
    let sq: Domain = ConvexPolygon::unit_square().into();
    let square = (
        spectrum(&sq, Method::Poly { degree: 12 }, 5),
        spectrum(&sq, Method::Mfs { size: 100 }, 5),
    );
    let parse = |text: String| -> Vec<f64> {
        text.lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect()
    };
    let common = [
        "polygon",
        "--k",
        "6",
        "--mode",
        "inscribed",
        "--degree",
        "12",
        "--n-max",
        "5",
    ];
    let hex_poly = parse(dbs(&[&common[..], &["--basis", "poly"]].concat()).0);
    let hex_mfs = parse(dbs(&[&common[..], &["--basis", "mfs", "--mfs-size", "100"]].concat()).0);
    let mut passed = true;
    let mut detail = Vec::new();
    for (name, (p, m)) in [
        ("unit square", square),
        ("inscribed hexagon", (hex_poly, hex_mfs)),
    ] {
        let rel: Vec<f64> = p.iter().zip(&m).map(|(a, b)| (a - b).abs() / b).collect();
        let worst = rel.iter().copied().fold(0.0, f64::max);
        passed &= rel.len() == 5 && worst <= 1e-4;
        let rel_text: Vec<String> = rel.iter().map(|r| format!("{r:.2e}")).collect();
        detail.push(format!(
            "{name}: poly {p:.8?} mfs {m:.8?} rel [{}]",
            rel_text.join(", ")
        ));
    }
    outcome(passed, detail.join("\n    "))
}

fn quadrature_exactness() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=40 {
        let g = gauss_legendre(n).unwrap();
        for m in 0..=g.exact_degree {
            let exact = if m % 2 == 0 {
                2.0 / (m as f64 + 1.0)
            } else {
                0.0
            };
            worst = worst.max((g.integrate(|t| t.powi(m as i32)) - exact).abs() / exact.max(1.0));
        }
    }
    let tri = Triangle::new(
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(0.0, 1.0),
    )
    .unwrap();
    let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
    for q in 0..=30u32 {
        let rule = triangle_rule(q as usize);
        for a in 0..=q {
            for b in 0..=(q - a) {
                let exact = fact(a) * fact(b) / fact(a + b + 2);
                let got = rule.integrate(&tri, |p| p.x.powi(a as i32) * p.y.powi(b as i32));
                worst = worst.max((got - exact).abs() / exact);
            }
        }
    }
    let disk = Disk::unit();
    for (n, m) in [(1, 1), (4, 9), (10, 21)] {
        let rule = disk_rule(n, m).unwrap();
        for a in 0..=rule.radial_exact_degree {
            for j in 0..=rule.trig_degree {
                let f = |p: Point2| p.norm().powi(a as i32) * (j as f64 * p.y.atan2(p.x)).cos();
                let exact = if j == 0 {
                    2.0 * PI / (a as f64 + 2.0)
                } else {
                    0.0
                };
                worst = worst.max((integrate_disk(&disk, f, &rule) - exact).abs() / exact.max(1.0));
            }
        }
        for j in 0..=rule.trig_degree {
            let f = |p: Point2| (j as f64 * p.y.atan2(p.x)).cos();
            let exact = if j == 0 { 2.0 * PI } else { 0.0 };
            worst = worst.max((integrate_circle(&disk, f, &rule) - exact).abs() / exact.max(1.0));
        }
    }
    let t180 = triangle_rule(4).integrate(&tri, |p| p.x * p.x * p.y * p.y);
    let quarter = integrate_disk(&disk, |p| p.x * p.x, &disk_rule(3, 8).unwrap());
    let (e180, epi) = ((t180 - 1.0 / 180.0).abs(), (quarter - PI / 4.0).abs());
    outcome(
        worst <= 1e-12 && e180 <= 1e-13 && epi <= 1e-13,
        format!("worst relative error {worst:e}; 1/180 case {e180:e}; π/4 case {epi:e}"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.csv"), dir.path().join("b.csv")];
    for p in &paths {
        dbs(&[
            "paradox",
            "--k-list",
            "8,16,32,64,128",
            "--mode",
            "inscribed",
            "--degree",
            "16",
            "--n-max",
            "5",
            "--output",
            p.to_str().unwrap(),
        ]);
    }
    let a = std::fs::read(&paths[0]).unwrap();
    let b = std::fs::read(&paths[1]).unwrap();
    outcome(
        !a.is_empty() && a == b,
        format!("{} bytes, identical: {}", a.len(), a == b),
    )
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = vec![
        ("1 disk exactness", disk_exactness()),
        ("2 shift identity", shift_identity()),
    ];
    let (ins, t_ins) = paradox_convergence("inscribed");
    let (circ, t_circ) = paradox_convergence("circumscribed");
    results.push(("3a paradox convergence, inscribed", ins));
    results.push(("3b paradox convergence, circumscribed", circ));
    let total = t_ins + t_circ;
    results.push((
        "3c paradox runtime",
        outcome(
            total < Duration::from_secs(30),
            format!("{total:?} for both modes"),
        ),
    ));
    results.push(("4 constant-trial bound", constant_trial_bound()));
    results.push(("5 Rayleigh-Ritz monotonicity", ritz_monotonicity()));
    results.push(("6 dilation law", dilation_law()));
    results.push(("7 oracle agreement", oracle_agreement()));
    results.push(("8 quadrature exactness", quadrature_exactness()));
    results.push(("9 determinism", determinism()));

    let mut failures = 0;
    for (name, o) in &results {
        println!(
            "[{}] criterion {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        failures += usize::from(!o.passed);
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failures,
        results.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
