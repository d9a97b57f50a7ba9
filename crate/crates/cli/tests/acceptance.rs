//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ssf_core::divdiff::{divided_difference, exponential_simplex_dd, KnotMultiset};
use ssf_core::funcspace::{DerivativeOf, SmoothFunction};
use ssf_core::moi::{kernel_trace_identity, trace_derivative, PerturbedPair, TraceMethod};
use ssf_core::multimeasure::{build_m, build_m1};
use ssf_core::piecewise::PiecewisePolynomial;
use ssf_core::sample::{function_suite, random_function, random_knots, random_pair};
use ssf_core::spectral::{hs_norm, trace_norm, HermitianOperator};
use ssf_core::splines::{basic_spline, dd_via_antiderivative, dd_via_peano, spline_antiderivative};
use ssf_core::ssf::{ssf_density, trace_formula_against, uniform_grid, Variant};
use ssf_core::{factorial, rel_err};

const SWEEP_SEED: u64 = 20_240_601;
const SWEEP_PAIRS: usize = 20;
const ORDERS: std::ops::RangeInclusive<usize> = 1..=4;
const VARIANTS: [Variant; 2] = [Variant::Nup1, Variant::Nup2];

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }
}

/// Largest value seen, with a label for the worst case.
#[derive(Default)]
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn see(&mut self, value: f64, at: impl FnOnce() -> String) {
        if value > self.value || value.is_nan() {
            self.value = value;
            self.at = at();
        }
    }

    fn within(&self, tol: f64) -> bool {
        self.value <= tol
    }

    fn show(&self) -> String {
        if self.at.is_empty() {
            format!("{:.2e}", self.value)
        } else {
            format!("{:.2e} ({})", self.value, self.at)
        }
    }
}

fn sweep_pairs() -> Vec<PerturbedPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(SWEEP_SEED);
    (0..SWEEP_PAIRS)
        .map(|k| {
            let n = 2 + k % 4;
            let norm = rng.gen_range(0.3..=1.0);
            let (h0, v) = random_pair(&mut rng, n, norm);
            PerturbedPair::new(h0, v).unwrap()
        })
        .collect()
}

fn sweep_functions(pair_index: usize, p: usize) -> Vec<SmoothFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(SWEEP_SEED ^ ((pair_index as u64) << 8) ^ p as u64);
    function_suite(&mut rng, p)
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

fn criterion_1(pairs: &[PerturbedPair]) -> Verdict {
    let start = Instant::now();
    let mut exact = Worst::default();
    let mut smooth = Worst::default();
    let mut count = 0;
    for (i, pair) in pairs.iter().enumerate() {
        for p in ORDERS {
            let fs = sweep_functions(i, p);
            for variant in VARIANTS {
                let eta = ssf_density(pair, p, variant).unwrap();
                for f in &fs {
                    let c = trace_formula_against(pair, &eta, f).unwrap();
                    count += 1;
                    let at = || format!("pair {i} p={p} {variant} {f}");
                    if f.is_polynomial() || f.is_rational() {
                        exact.see(c.rel_err, at);
                    } else {
                        smooth.see(c.rel_err, at);
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Verdict::new(
        exact.within(1e-8) && smooth.within(1e-6) && secs <= 60.0,
        format!(
            "{count} checks in {secs:.1}s; poly/rational worst {} (tol 1e-8), other worst {} (tol 1e-6)",
            exact.show(),
            smooth.show()
        ),
    )
}

fn criterion_2(pairs: &[PerturbedPair]) -> Verdict {
    let exact_methods = [
        TraceMethod::M1Form,
        TraceMethod::MForm,
        TraceMethod::OperatorTrace,
    ];
    let mut pairwise = Worst::default();
    let mut fd = Worst::default();
    for (i, pair) in pairs.iter().enumerate() {
        for p in ORDERS {
            for f in sweep_functions(i, p) {
                let vals: Vec<Complex64> = exact_methods
                    .iter()
                    .map(|&m| trace_derivative(pair, &f, p, m).unwrap())
                    .collect();
                for a in 0..3 {
                    for b in 0..3 {
                        if a != b {
                            pairwise
                                .see(rel_err(vals[a], vals[b]), || format!("pair {i} p={p} {f}"));
                        }
                    }
                }
                let numeric = trace_derivative(pair, &f, p, TraceMethod::FiniteDifference).unwrap();
                fd.see(rel_err(numeric, vals[2]), || format!("pair {i} p={p} {f}"));
            }
        }
    }
    Verdict::new(
        pairwise.within(1e-9) && fd.within(1e-5),
        format!(
            "exact methods pairwise worst {} (tol 1e-9), finite difference worst {} (tol 1e-5)",
            pairwise.show(),
            fd.show()
        ),
    )
}

fn criterion_3(pairs: &[PerturbedPair]) -> Verdict {
    let mut worst = Worst::default();
    for (i, pair) in pairs.iter().enumerate() {
        let (c, d) = pair.hull();
        for p in ORDERS {
            for f in sweep_functions(i, p) {
                let k = kernel_trace_identity(pair, &f, p, c, d).unwrap();
                let e = rel_err(k.rhs_m1, k.lhs)
                    .max(rel_err(k.rhs_m, k.lhs))
                    .max(rel_err(k.rhs_m1, k.rhs_m));
                worst.see(e, || format!("pair {i} p={p} {f}"));
            }
        }
    }
    Verdict::new(
        worst.within(1e-8),
        format!("three-way worst {} (tol 1e-8)", worst.show()),
    )
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = Worst::default();
    for k in 0..1000 {
        let p = rng.gen_range(2..=4);
        let f = random_function(&mut rng);
        let base = random_knots(&mut rng, p, -3.0, 3.0);
        let lhs: Complex64 = (0..p)
            .map(|i| {
                let mut knots = base.clone();
                knots.push(base[i]);
                divided_difference(&f, &KnotMultiset::new(knots).unwrap()).unwrap()
            })
            .sum();
        let df = DerivativeOf {
            inner: &f,
            order: 1,
        };
        let rhs = divided_difference(&df, &KnotMultiset::new(base).unwrap()).unwrap();
        worst.see(rel_err(lhs, rhs), || format!("instance {k} p={p} {f}"));
    }
    Verdict::new(
        worst.within(1e-9),
        format!("1000 instances, worst {} (tol 1e-9)", worst.show()),
    )
}

/// `p + 1` knots in `[-3, 3]`, occasionally with a repeated value.
fn spline_knots(rng: &mut ChaCha8Rng, p: usize) -> KnotMultiset {
    let mut knots = random_knots(rng, p + 1, -3.0, 3.0);
    if p >= 2 && rng.gen_bool(0.3) {
        knots[1] = knots[0];
    }
    KnotMultiset::new(knots).unwrap()
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);

    let mut integral = Worst::default();
    let mut boundary_failures = 0;
    let mut coincident_failures = 0;
    let mut peano = Worst::default();
    let mut anti = Worst::default();
    for k in 0..500 {
        let p = rng.gen_range(1..=4);
        let knots = spline_knots(&mut rng, p);
        let b = basic_spline(&knots).unwrap();
        integral.see((b.integral().unwrap() - 1.0 / p as f64).norm(), || {
            format!("instance {k}")
        });

        let knots = spline_knots(&mut rng, p);
        let a = spline_antiderivative(&knots).unwrap();
        let (lo, hi) = (knots.min(), knots.max());
        if a.left_value() != one
            || a.right_value() != zero
            || a.eval(lo - 0.5) != one
            || a.eval(hi) != zero
        {
            boundary_failures += 1;
        }

        let c = rng.gen_range(-3.0..3.0);
        let m = rng.gen_range(0..=4);
        let a = spline_antiderivative(&KnotMultiset::new(vec![c; m + 1]).unwrap()).unwrap();
        let left_ok = [1e-12, 1e-3, 1.0].iter().all(|d| a.eval(c - d) == one);
        let right_ok = [0.0, 1e-12, 1.0].iter().all(|d| a.eval(c + d) == zero);
        if !(left_ok && right_ok) {
            coincident_failures += 1;
        }

        let f = random_function(&mut rng);
        let knots = spline_knots(&mut rng, p);
        let exact = divided_difference(&f, &knots).unwrap();
        peano.see(rel_err(dd_via_peano(&f, &knots).unwrap(), exact), || {
            format!("instance {k} {f}")
        });
        let knots = spline_knots(&mut rng, p);
        let exact = divided_difference(&f, &knots).unwrap();
        anti.see(
            rel_err(dd_via_antiderivative(&f, &knots).unwrap(), exact),
            || format!("instance {k} {f}"),
        );
    }
    Verdict::new(
        integral.within(1e-10)
            && boundary_failures == 0
            && coincident_failures == 0
            && peano.within(1e-9)
            && anti.within(1e-9),
        format!(
            "500 each: basic integral worst {}, boundary failures {boundary_failures}, coincident failures {coincident_failures}, peano worst {}, antiderivative worst {}",
            integral.show(),
            peano.show(),
            anti.show()
        ),
    )
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut mass = Worst::default();
    let mut excess = Worst::default();
    let mut cyclic = Worst::default();
    let mut marginal = Worst::default();
    let mut first_order_hs_exceed = 0;
    let mut first_order_count = 0;
    for k in 0..100 {
        let n = rng.gen_range(1..=5);
        let p = rng.gen_range(1..=4);
        let norm = rng.gen_range(0.3..=1.0);
        let (h0, v) = random_pair(&mut rng, n, norm);
        let pair = PerturbedPair::new(h0, v).unwrap();
        let m = build_m(pair.d0(), pair.v(), p).unwrap();
        let m1 = build_m1(pair.d0(), pair.v(), p).unwrap();
        let trace = pair.v().power_trace(p);
        mass.see(
            (m.total_mass() - trace)
                .norm()
                .max((m1.total_mass() - trace).norm()),
            || format!("instance {k}"),
        );
        let hs = hs_norm(pair.v()).powi(p as i32);
        // The Hilbert-Schmidt bound is stated for p >= 2; at p = 1 the
        // weights Tr[P_i V] are controlled by the trace norm instead.
        let bound = if p == 1 {
            first_order_count += 1;
            if m.total_variation() > hs + 1e-9 {
                first_order_hs_exceed += 1;
            }
            trace_norm(pair.v()).unwrap()
        } else {
            hs
        };
        excess.see(
            m.total_variation().max(m1.total_variation()) - bound,
            || format!("instance {k} p={p}"),
        );
        for (idx, w) in m.tuples() {
            let mut rotated = idx.clone();
            rotated.rotate_left(1);
            cyclic.see((m.weight(&rotated) - w).norm(), || format!("instance {k}"));
        }
        marginal.see(max_abs_diff(&m1.marginal_last(), m.weights()), || {
            format!("instance {k}")
        });
    }
    Verdict::new(
        mass.within(1e-10) && excess.value <= 1e-9 && cyclic.within(1e-12) && marginal.within(1e-12),
        format!(
            "100 instances: mass worst {}, variation minus bound worst {:.2e}, cyclic worst {}, marginal worst {}; \
             p=1 instances exceeding the p>=2 Hilbert-Schmidt bound: {first_order_hs_exceed}/{first_order_count}",
            mass.show(),
            excess.value,
            cyclic.show(),
            marginal.show()
        ),
    )
}

fn criterion_7(pairs: &[PerturbedPair]) -> Verdict {
    let mut mass = Worst::default();
    let mut exterior = Worst::default();
    let mut agreement = Worst::default();
    for (i, pair) in pairs.iter().enumerate() {
        let (c, d) = pair.hull();
        let width = d - c;
        let outside: Vec<f64> = (1..=50)
            .flat_map(|k| {
                let s = width * k as f64 / 50.0;
                [c - s, d + s]
            })
            .collect();
        let grid = uniform_grid(c, d, 1000);
        for p in ORDERS {
            let expect = pair.v().power_trace(p) / factorial(p);
            let mut samples = Vec::new();
            for variant in VARIANTS {
                let eta = ssf_density(pair, p, variant).unwrap();
                mass.see((eta.mass - expect).norm(), || {
                    format!("pair {i} p={p} {variant}")
                });
                let worst = eta
                    .density
                    .sample(&outside)
                    .iter()
                    .fold(0.0_f64, |m, z| m.max(z.norm()));
                exterior.see(worst, || format!("pair {i} p={p} {variant}"));
                samples.push(eta.density.sample(&grid));
            }
            agreement.see(max_abs_diff(&samples[0], &samples[1]), || {
                format!("pair {i} p={p}")
            });
        }
    }
    Verdict::new(
        mass.within(1e-9) && exterior.within(1e-12) && agreement.within(1e-9),
        format!(
            "mass worst {} (tol 1e-9), exterior worst {} (tol 1e-12), nup1 vs nup2 worst {} (tol 1e-9)",
            mass.show(),
            exterior.show(),
            agreement.show()
        ),
    )
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = Worst::default();
    for k in 0..20 {
        let a = rng.gen_range(-2.0..2.0);
        let v = rng.gen_range(0.1..1.5) * if k % 2 == 0 { 1.0 } else { -1.0 };
        let pair = PerturbedPair::new(
            HermitianOperator::diagonal(&[a]).unwrap(),
            HermitianOperator::diagonal(&[v]).unwrap(),
        )
        .unwrap();
        let (lo, hi) = if v > 0.0 { (a, a + v) } else { (a + v, a) };
        let inside: Vec<f64> = (1..200)
            .map(|j| lo + (hi - lo) * j as f64 / 200.0)
            .collect();
        let outside: Vec<f64> = (1..=20)
            .flat_map(|j| [lo - 0.05 * j as f64, hi + 0.05 * j as f64])
            .collect();
        for p in 1..=5 {
            for variant in VARIANTS {
                let eta = ssf_density(&pair, p, variant).unwrap();
                for &t in &inside {
                    let expect = v.signum() * (a + v - t).powi(p as i32 - 1) / factorial(p - 1);
                    worst.see((eta.density.eval(t) - expect).norm(), || {
                        format!("a={a} v={v} p={p} t={t}")
                    });
                }
                for &t in &outside {
                    worst.see(eta.density.eval(t).norm(), || {
                        format!("a={a} v={v} p={p} t={t}")
                    });
                }
            }
        }
    }
    Verdict::new(
        worst.within(1e-12),
        format!(
            "20 scalar pairs, p=1..5, worst pointwise {} (tol 1e-12)",
            worst.show()
        ),
    )
}

fn criterion_9() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = Worst::default();
    for k in 0..100 {
        let p = rng.gen_range(1..=3);
        let s = rng.gen_range(-2.0..2.0);
        let knots = spline_knots(&mut rng, p);
        let exact = divided_difference(&SmoothFunction::exponential(s), &knots).unwrap();
        let simplex = exponential_simplex_dd(s, &knots).unwrap();
        worst.see((simplex - exact).norm(), || {
            format!("instance {k} p={p} s={s}")
        });
    }
    Verdict::new(
        worst.within(1e-4),
        format!("100 instances, worst absolute {} (tol 1e-4)", worst.show()),
    )
}

// ---- CLI contract ----

fn ssf() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ssf"))
}

fn fixtures() -> Vec<(String, PathBuf, PathBuf)> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    ["scalar", "two_level", "degenerate", "complex4", "real5"]
        .iter()
        .map(|name| {
            (
                name.to_string(),
                root.join(name).join("h0.json"),
                root.join(name).join("v.json"),
            )
        })
        .collect()
}

fn status(cmd: &mut Command) -> i32 {
    cmd.output()
        .expect("binary runs")
        .status
        .code()
        .unwrap_or(-1)
}

fn stdout_of(cmd: &mut Command) -> String {
    String::from_utf8(cmd.output().expect("binary runs").stdout).unwrap()
}

fn criterion_10() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut problems: Vec<String> = Vec::new();
    let mut note = |ok: bool, what: String| {
        if !ok {
            problems.push(what);
        }
    };

    // determinism
    let mut reports = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("seeded{run}.jsonl"));
        let code = status(
            ssf()
                .args([
                    "verify", "--seed", "11", "--pairs", "2", "--dim", "3", "--p", "3", "--out",
                ])
                .arg(&out),
        );
        note(code == 0, format!("seeded verify exited {code}"));
        reports.push(std::fs::read(&out).unwrap_or_default());
    }
    note(
        !reports[0].is_empty() && reports[0] == reports[1],
        "seeded verify reports differ".into(),
    );
    for (name, h0, v) in fixtures() {
        let mut runs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{name}{run}.jsonl"));
            let code = status(
                ssf()
                    .arg("verify")
                    .arg("--h0")
                    .arg(&h0)
                    .arg("--v")
                    .arg(&v)
                    .args(["--p", "3", "--out"])
                    .arg(&out),
            );
            note(code == 0, format!("verify on {name} exited {code}"));
            runs.push(std::fs::read(&out).unwrap_or_default());
        }
        note(
            !runs[0].is_empty() && runs[0] == runs[1],
            format!("verify reports on {name} differ"),
        );
    }

    // exit codes
    let dd = |f: &str, knots: &str| stdout_of(ssf().args(["dd", "--f", f, "--knots", knots]));
    note(
        dd("poly:0,0,1", "1,3") == "4 0\n",
        "dd poly:0,0,1 at 1,3".into(),
    );
    note(
        dd("exp:1", "0,0,0") == "-0.5 0\n",
        "dd exp:1 at 0,0,0".into(),
    );
    note(
        dd("poly:-5,0,2,1", "0,1,2,7") == "1 0\n",
        "dd cubic leading coefficient".into(),
    );
    note(
        status(ssf().args(["dd", "--f", "sin:1", "--knots", "0,1"])) == 2,
        "bad spec exit".into(),
    );
    note(
        status(ssf().args(["dd", "--f", "poly:0,0,1e200", "--knots", "-1e200,1e200"])) == 3,
        "overflow exit".into(),
    );
    note(
        status(
            ssf()
                .args([
                    "compute-ssf",
                    "--h0",
                    "missing.json",
                    "--v",
                    "missing.json",
                    "--p",
                    "1",
                    "--out",
                ])
                .arg(dir.path().join("x")),
        ) == 2,
        "missing file exit".into(),
    );

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n":2,"re":[[0,1],[0.5,0]]}"#).unwrap();
    let prefix = dir.path().join("bad_out");
    let code = status(
        ssf()
            .arg("compute-ssf")
            .arg("--h0")
            .arg(&bad)
            .arg("--v")
            .arg(&bad)
            .args(["--p", "2", "--out"])
            .arg(&prefix),
    );
    note(code == 2, format!("non-Hermitian exit {code}"));
    note(
        !prefix.with_extension("csv").exists() && !prefix.with_extension("json").exists(),
        "partial output after failure".into(),
    );

    let big = HermitianOperator::diagonal(&(0..10).map(|i| i as f64).collect::<Vec<_>>()).unwrap();
    let big_path = dir.path().join("big.json");
    big.save(&big_path).unwrap();
    let prefix = dir.path().join("big_out");
    let code = status(
        ssf()
            .arg("compute-ssf")
            .arg("--h0")
            .arg(&big_path)
            .arg("--v")
            .arg(&big_path)
            .args(["--p", "8", "--out"])
            .arg(&prefix),
    );
    note(code == 4, format!("envelope exit {code}"));
    note(
        !prefix.with_extension("csv").exists(),
        "partial output after envelope failure".into(),
    );

    let code = status(
        ssf()
            .args([
                "verify",
                "--seed",
                "11",
                "--dim",
                "3",
                "--p",
                "2",
                "--corrupt-eta",
                "--out",
            ])
            .arg(dir.path().join("corrupt.jsonl")),
    );
    note(code == 1, format!("corrupted verify exit {code}"));

    // serialize, load, evaluate
    let mut roundtrip = Worst::default();
    for (name, h0, v) in fixtures() {
        let pair = PerturbedPair::new(
            HermitianOperator::load(&h0).unwrap(),
            HermitianOperator::load(&v).unwrap(),
        )
        .unwrap();
        for p in ORDERS {
            for variant in VARIANTS {
                let prefix = dir.path().join(format!("{name}_{p}_{variant}"));
                let code = status(
                    ssf()
                        .arg("compute-ssf")
                        .arg("--h0")
                        .arg(&h0)
                        .arg("--v")
                        .arg(&v)
                        .args([
                            "--p",
                            &p.to_string(),
                            "--variant",
                            &variant.to_string(),
                            "--out",
                        ])
                        .arg(&prefix),
                );
                note(
                    code == 0,
                    format!("compute-ssf on {name} p={p} exited {code}"),
                );
                let json =
                    std::fs::read_to_string(prefix.with_extension("json")).unwrap_or_default();
                let Ok(loaded) = PiecewisePolynomial::from_json(&json) else {
                    note(false, format!("{name} p={p}: density JSON does not load"));
                    continue;
                };
                let direct = ssf_density(&pair, p, variant).unwrap().density;
                let csv = std::fs::read_to_string(prefix.with_extension("csv")).unwrap_or_default();
                let mut lines = csv.lines();
                note(
                    lines.next() == Some("t,eta_re,eta_im"),
                    format!("{name}: CSV header"),
                );
                for line in lines {
                    let cols: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
                    let t = cols[0];
                    let written = Complex64::new(cols[1], cols[2]);
                    let e = (loaded.eval(t) - written)
                        .norm()
                        .max((direct.eval(t) - written).norm());
                    roundtrip.see(e, || format!("{name} p={p} {variant} t={t}"));
                }
            }
        }
    }
    note(
        roundtrip.within(1e-12),
        format!("round-trip worst {}", roundtrip.show()),
    );

    let pass = problems.is_empty();
    Verdict::new(
        pass,
        if pass {
            format!(
                "determinism, exit codes and round-trip on 5 fixtures; round-trip worst {}",
                roundtrip.show()
            )
        } else {
            problems.join("; ")
        },
    )
}

type Criterion<'a> = Box<dyn Fn() -> Verdict + 'a>;

fn main() {
    let pairs = sweep_pairs();
    let criteria: Vec<(&str, Criterion)> = vec![
        ("trace formula", Box::new(|| criterion_1(&pairs))),
        ("trace method agreement", Box::new(|| criterion_2(&pairs))),
        (
            "spline-kernel trace identities",
            Box::new(|| criterion_3(&pairs)),
        ),
        (
            "divided-difference reduction identity",
            Box::new(criterion_4),
        ),
        ("spline facts", Box::new(criterion_5)),
        ("multiple spectral measure facts", Box::new(criterion_6)),
        (
            "density mass, support and variant agreement",
            Box::new(|| criterion_7(&pairs)),
        ),
        ("scalar closed form", Box::new(criterion_8)),
        ("simplex representation", Box::new(criterion_9)),
        ("command-line contract", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let secs = start.elapsed().as_secs_f64();
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {} [{secs:.1}s]",
            k + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
