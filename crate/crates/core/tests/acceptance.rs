//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails or overruns its time budget.

use std::fmt::Display;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qdwitness_core::channels::{
    average_gate_fidelity, pauli_basis_average_fidelity, noisy_cnot_operator_map, NoiseConfig,
    NoiseMode, OperatorExtension,
};
use qdwitness_core::hilbert::PureState;
use qdwitness_core::info::{spectrum_broadcast_state, verify_appendix_a_reduction};
use qdwitness_core::objectivity::Framework;
use qdwitness_core::protocol::{
    cost_model, isbs_layout, max_subset_witness, outcome_differences, run_protocol, witness_exact,
    ProtocolConfig, DEFAULT_SEED,
};
use qdwitness_core::random::{haar_unitary, random_density, random_simplex};
use qdwitness_core::{CMatrix, DensityOperator, Error, TensorLayout};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;
use common::random_experiment;

type Outcome = Result<String, String>;

fn err(e: impl Display) -> String {
    e.to_string()
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    check: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { name: "objective fixed point", budget: secs(1), check: objective_fixed_point },
        Criterion { name: "closed-form noise law", budget: secs(5), check: closed_form_noise_law },
        Criterion { name: "full-fragment non-objectivity", budget: secs(1), check: full_fragment },
        Criterion { name: "witness bound", budget: secs(60), check: witness_bound },
        Criterion { name: "max-subset formula", budget: secs(30), check: max_subset_formula },
        Criterion { name: "CNOT fidelity", budget: secs(1), check: cnot_fidelity },
        Criterion { name: "cost model", budget: secs(1), check: cost },
        Criterion { name: "Monte Carlo consistency", budget: secs(120), check: monte_carlo },
        Criterion { name: "equal-dimension reduction", budget: secs(30), check: equal_dimension_reduction },
        Criterion { name: "GHZ endpoint", budget: secs(10), check: ghz_endpoint },
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(c.check))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {msg}"))
            })
            .and_then(|detail| {
                let took = start.elapsed();
                if took > c.budget {
                    Err(format!("{detail}; took {took:.2?}, budget {:?}", c.budget))
                } else {
                    Ok(detail)
                }
            });
        let took = start.elapsed();
        match result {
            Ok(detail) => println!("AC{:<2} PASS  {}: {detail} [{took:.2?}]", k + 1, c.name),
            Err(why) => {
                failed += 1;
                println!("AC{:<2} FAIL  {}: {why} [{took:.2?}]", k + 1, c.name);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn mix(p: f64) -> NoiseConfig {
    NoiseConfig::ideal(p, NoiseMode::MixGlobal)
}

fn objective_fixed_point() -> Outcome {
    let r = witness_exact(&ProtocolConfig::new(Framework::Sqd, &["E1"])).map_err(err)?;
    ensure!(r.measure.abs() <= 1e-10, "measure {}", r.measure);
    ensure!(r.witness_max_subset.abs() <= 1e-10, "witness {}", r.witness_max_subset);
    Ok(format!("M = {:.1e}, W = {:.1e}", r.measure, r.witness_max_subset))
}

/// Cyclic Jacobi eigenvalues of a real symmetric matrix.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
                for k in 0..n {
                    let (pk, qk) = (a[p][k], a[q][k]);
                    a[p][k] = c * pk - s * qk;
                    a[q][k] = s * pk + c * qk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// `‖ρ_SF − Γρ_SF‖₁` for the fragment E1 of the noisy initial state, built from
/// the four basis strings with real arithmetic only.
fn noise_law_oracle(p: f64) -> f64 {
    let support = [0b00000, 0b01111, 0b11010, 0b10101];
    let rho = |a: usize, b: usize| {
        let pure = if support.contains(&a) && support.contains(&b) { 0.25 } else { 0.0 };
        (1.0 - p) * pure + if a == b { p / 32.0 } else { 0.0 }
    };
    // S E1_1 E1_2 index with E2 traced out
    let reduced = |a: usize, b: usize| (0..4).map(|e| rho(a * 4 + e, b * 4 + e)).sum::<f64>();
    let allowed = |a: usize| {
        let (s, e1, e2) = (a >> 2, (a >> 1) & 1, a & 1);
        (e1 ^ e2) == s
    };
    let delta: Vec<Vec<f64>> = (0..8)
        .map(|a| {
            (0..8)
                .map(|b| {
                    let kept = allowed(a) && allowed(b) && (a >> 2) == (b >> 2);
                    if kept { 0.0 } else { reduced(a, b) }
                })
                .collect()
        })
        .collect();
    jacobi_eigenvalues(delta).iter().map(|l| l.abs()).sum()
}

fn closed_form_noise_law() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..=20 {
        let p = k as f64 * 0.05;
        let cfg = ProtocolConfig::new(Framework::Sqd, &["E1"]).with_noise(mix(p));
        let m = witness_exact(&cfg).map_err(err)?.measure;
        let oracle = noise_law_oracle(p);
        ensure!((oracle - p / 2.0).abs() <= 1e-9, "oracle {oracle} at p = {p}");
        ensure!((m - oracle).abs() <= 1e-9, "M = {m}, oracle {oracle} at p = {p}");
        worst = worst.max((m - oracle).abs());
    }
    Ok(format!("21 points, max |M − oracle| = {worst:.1e}"))
}

fn full_fragment() -> Outcome {
    let r = witness_exact(&ProtocolConfig::new(Framework::Sqd, &["E1", "E2"])).map_err(err)?;
    ensure!((r.measure - 1.0).abs() <= 1e-9, "measure {}", r.measure);
    ensure!(r.witness_max_subset < r.measure, "witness {} not below measure", r.witness_max_subset);
    Ok(format!("M = {:.12}, W = {:.6}", r.measure, r.witness_max_subset))
}

fn witness_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1801);
    let mut tightest = f64::INFINITY;
    let instances = 250;
    for n in 0..instances {
        let exp = random_experiment(&mut rng, true);
        let rho = random_density(exp.layout(), &mut rng);
        let id = exp.marginalize(&exp.run_branch(&rho, false).map_err(err)?);
        let g = exp.marginalize(&exp.run_branch(&rho, true).map_err(err)?);
        let d = outcome_differences(&id, &g);
        let m = exp.measure(&rho).map_err(err)?;
        let subset: f64 = d.iter().filter(|_| rng.gen_bool(0.5)).sum::<f64>().abs();
        let w = max_subset_witness(&d);
        ensure!(w <= m + 1e-9 && subset <= m + 1e-9, "instance {n}: W = {w}, subset {subset}, M = {m}");
        tightest = tightest.min(m - w);
    }
    Ok(format!("{instances} instances, 0 violations, smallest M − W = {tightest:.2e}"))
}

fn max_subset_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2201);
    for n in 0..50 {
        let exp = random_experiment(&mut rng, false);
        let rho = random_density(exp.layout(), &mut rng);
        let id = exp.marginalize(&exp.run_branch(&rho, false).map_err(err)?);
        let g = exp.marginalize(&exp.run_branch(&rho, true).map_err(err)?);
        let d = outcome_differences(&id, &g);
        ensure!(d.len() <= 8, "instance {n}: {} outcomes", d.len());
        let brute = (0u32..1 << d.len())
            .map(|mask| {
                d.iter()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << k) != 0)
                    .map(|(_, x)| x)
                    .sum::<f64>()
                    .abs()
            })
            .fold(0.0, f64::max);
        ensure!(brute == max_subset_witness(&d), "instance {n}: brute {brute} vs formula {}", max_subset_witness(&d));
    }
    Ok("50 instances, exact agreement".into())
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca, rb, cb) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    CMatrix::from_fn(ra * rb, ca * cb, |r, c| a[(r / rb, c / cb)] * b[(r % rb, c % cb)])
}

fn cnot_fidelity() -> Outcome {
    let f = 0.733;
    let re = |x: f64| Complex64::new(x, 0.0);
    let m2 = |v: [Complex64; 4]| CMatrix::from_row_slice(2, 2, &v);
    let (o, l, i) = (re(0.0), re(1.0), Complex64::new(0.0, 1.0));
    let paulis = [m2([l, o, o, l]), m2([o, l, l, o]), m2([o, -i, i, o]), m2([l, o, o, -l])];
    let mut u = CMatrix::zeros(4, 4);
    for (r, c) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        u[(r, c)] = l;
    }
    let channel = |x: &CMatrix| &u * x * u.adjoint() * re(f) + CMatrix::identity(4, 4) * re((1.0 - f) / 4.0);
    let mut sum = re(0.0);
    for a in &paulis {
        for b in &paulis {
            let uj = kron(a, b);
            sum += (&u * uj.adjoint() * u.adjoint() * channel(&uj)).trace();
        }
    }
    let brute = (sum.re + 16.0) / 80.0;
    let formula = average_gate_fidelity(f);
    let library = pauli_basis_average_fidelity(&u, 2, |x| {
        noisy_cnot_operator_map(x, f, OperatorExtension::Affine)
    });
    ensure!((formula - 0.79).abs() <= 0.0005, "F = {formula}");
    ensure!((formula - brute).abs() <= 1e-12, "formula {formula} vs Pauli sum {brute}");
    ensure!((library - brute).abs() <= 1e-12, "library sum {library} vs {brute}");
    Ok(format!("F = {formula:.7}, Pauli sum {brute:.7}"))
}

fn cost() -> Outcome {
    let c = 1000;
    let e = cost_model(1, c, 0.5, 1.0).map_err(err)?;
    let ratio = e.witness_runs / e.tomography_runs;
    ensure!((ratio - 5.0 / 27.0).abs() <= 1e-12, "ratio {ratio}");
    ensure!(e.tomography_runs == 27.0 * c as f64 && e.witness_runs == 5.0 * c as f64, "{e:?}");
    let x = cost_model(1, c, 0.5, 0.79).map_err(err)?.crossover_p;
    ensure!((0.41..=0.43).contains(&x), "crossover {x}");
    Ok(format!("witness/tomography = 5/27, crossover {x:.4}"))
}

fn monte_carlo() -> Outcome {
    let noise = NoiseConfig {
        f: NoiseConfig::PHOTONIC_CNOT_F,
        p_cnot: 0.5,
        ..mix(0.4)
    };
    let exact_cfg = ProtocolConfig::new(Framework::Sqd, &["E1"]).with_noise(noise);
    let mc_cfg = exact_cfg.clone().with_shots(6000, DEFAULT_SEED);
    let exact = witness_exact(&exact_cfg).map_err(err)?;
    let mc = run_protocol(&mc_cfg).map_err(err)?;
    let runs = mc.runs.ok_or("no run statistics")?;

    let mut within = 0;
    let mut total = 0;
    for (est, truth, n) in [
        (&mc.p_identity, &exact.p_identity, runs.identity_runs),
        (&mc.p_gamma, &exact.p_gamma, runs.gamma_runs),
    ] {
        for (q, p) in est.iter().zip(truth) {
            let se = (p * (1.0 - p) / n as f64).sqrt();
            total += 1;
            if (q - p).abs() <= 4.0 * se {
                within += 1;
            }
        }
    }
    let share = within as f64 / total as f64;
    ensure!(share >= 0.95, "{within}/{total} outcomes within 4 SE");

    let se = mc.stderr_max_subset.ok_or("no bootstrap stderr")?;
    let gap = (mc.witness_max_subset - exact.witness_max_subset).abs();
    ensure!(gap <= 4.0 * se, "W = {} vs exact {}, stderr {se}", mc.witness_max_subset, exact.witness_max_subset);

    let again = run_protocol(&mc_cfg).map_err(err)?;
    ensure!(format!("{mc:?}") == format!("{again:?}"), "repeat run differs");
    Ok(format!(
        "{within}/{total} outcomes within 4 SE, W = {:.4} vs exact {:.4} ({:.1} stderr), {} attempts, repeat identical",
        mc.witness_max_subset,
        exact.witness_max_subset,
        gap / se,
        runs.attempts
    ))
}

/// Pure, mutually orthogonal conditional states: the columns of a Haar unitary.
fn orthogonal_pure(rng: &mut ChaCha8Rng, label: &str, d: usize) -> Vec<DensityOperator> {
    let layout = TensorLayout::new(&[(label, d)]).unwrap();
    let u = haar_unitary(d, rng);
    (0..d)
        .map(|i| {
            let col = u.column(i);
            DensityOperator::new(layout.clone(), col * col.adjoint()).unwrap()
        })
        .collect()
}

fn equal_dimension_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 0..100 {
        let (d, envs) = if n % 4 == 3 { (3, 1 + n % 2) } else { (2, 1 + n % 3) };
        let p = random_simplex(d, &mut rng);
        let conds: Vec<_> = (0..envs)
            .map(|k| orthogonal_pure(&mut rng, &format!("E{}", k + 1), d))
            .collect();
        let rho = spectrum_broadcast_state("S", &p, &conds).map_err(err)?;
        ensure!(verify_appendix_a_reduction(&rho).map_err(err)?, "state {n} fails the pure-conditional check");
    }

    // a mixed conditional block leaves no room for orthogonal partners
    let mut refused = 0;
    for n in 0..100 {
        let d = if n % 2 == 0 { 2 } else { 3 };
        let mut conds = orthogonal_pure(&mut rng, "E1", d);
        let w = rng.gen_range(0.05..0.95);
        let mixed = conds[0].matrix() * Complex64::new(w, 0.0) + conds[1].matrix() * Complex64::new(1.0 - w, 0.0);
        conds[0] = DensityOperator::new(conds[0].layout().clone(), mixed).unwrap();
        let p = random_simplex(d, &mut rng);
        match spectrum_broadcast_state("S", &p, &[conds]) {
            Err(Error::HypothesisUnmet(_)) => refused += 1,
            other => return Err(format!("attempt {n} was not refused: {other:?}")),
        }
    }
    Ok(format!("100 states reduce, {refused}/100 mixed-block constructions refused"))
}

fn ghz_endpoint() -> Outcome {
    let fragment = ["E1", "E2", "E3", "E4"];
    let base = ProtocolConfig::new(Framework::Isbs, &fragment);
    let ghz = PureState::ghz(isbs_layout()).map_err(err)?.to_density();
    let prepared = base.prepare().map_err(err)?;
    let dev = (prepared.matrix() - ghz.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    ensure!(dev <= 1e-12, "prepared state is {dev} from GHZ");

    let mut curve = Vec::new();
    for k in 0..=20 {
        let p = k as f64 * 0.05;
        curve.push(witness_exact(&base.clone().with_noise(mix(p))).map_err(err)?.measure);
    }
    ensure!((curve[0] - 1.0).abs() <= 1e-9, "M = {} at p = 0", curve[0]);
    if let Some(k) = (1..curve.len()).find(|&k| curve[k] > curve[k - 1] + 1e-12) {
        return Err(format!("M rises between p = {} and {}", (k - 1) as f64 * 0.05, k as f64 * 0.05));
    }
    Ok(format!("M = {:.12} at p = 0, non-increasing to {:.4} at p = 1", curve[0], curve[20]))
}
