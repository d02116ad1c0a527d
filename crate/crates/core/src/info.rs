//! Entropies, mutual information, discord and the structure checkers for
//! quantum Darwinism, its strong form and spectrum broadcast structures.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // libm math under no_std; std inherent methods win when linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    eigvals_unchecked, partial_trace, CMatrix, CVector, DensityOperator, TensorLayout,
};
use crate::objectivity::ObjectiveSubspaceSpec;
use crate::tolerance::Tolerances;

const THETA_STEPS: usize = 64;
const PHI_STEPS: usize = 128;
const REFINE_FTOL: f64 = 1e-9;
const REFINE_MAX_ITER: usize = 400;

fn entropy_of(eigs: &[f64], cutoff: f64) -> f64 {
    -eigs
        .iter()
        .filter(|&&l| l > cutoff)
        .map(|&l| l * l.log2())
        .sum::<f64>()
}

fn check_normalized(rho: &DensityOperator) -> Result<()> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > Tolerances::DEFAULT.normalized_trace {
        return Err(Error::InvalidTrace(tr));
    }
    Ok(())
}

/// `−Σ λ log₂ λ` over eigenvalues above the entropy cutoff.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    check_normalized(rho)?;
    Ok(entropy_of(&rho.eigenvalues(), Tolerances::DEFAULT.entropy_cutoff))
}

fn disjoint<A: AsRef<str>, B: AsRef<str>>(a: &[A], b: &[B]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("both parts must be nonempty".into()));
    }
    if let Some(x) = a.iter().find(|x| b.iter().any(|y| y.as_ref() == x.as_ref())) {
        return Err(Error::InvalidArgument(format!(
            "subsystem `{}` is in both parts",
            x.as_ref()
        )));
    }
    Ok(())
}

fn union<A: AsRef<str>, B: AsRef<str>>(a: &[A], b: &[B]) -> Vec<String> {
    a.iter()
        .map(|x| x.as_ref().to_string())
        .chain(b.iter().map(|x| x.as_ref().to_string()))
        .collect()
}

/// `H(A) + H(B) − H(AB)`. Subsystems outside both parts are traced out.
pub fn mutual_information<A: AsRef<str>, B: AsRef<str>>(
    rho: &DensityOperator,
    part_a: &[A],
    part_b: &[B],
) -> Result<f64> {
    disjoint(part_a, part_b)?;
    check_normalized(rho)?;
    let ab = partial_trace(rho, &union(part_a, part_b))?;
    Ok(von_neumann_entropy(&partial_trace(&ab, part_a)?)?
        + von_neumann_entropy(&partial_trace(&ab, part_b)?)?
        - von_neumann_entropy(&ab)?)
}

/// Family of system measurements the discord minimization ranged over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementClass {
    /// Rank-one projective qubit measurements along a Bloch direction.
    RankOneProjective,
    /// Only the preferred system basis was tried, so the value is an upper bound.
    FixedBasis,
}

/// Projective qubit measurement along the Bloch direction `(θ, φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitMeasurement {
    pub theta: f64,
    pub phi: f64,
    pub class: MeasurementClass,
}

impl QubitMeasurement {
    pub fn bloch_vector(&self) -> [f64; 3] {
        bloch(self.theta, self.phi)
    }
}

fn bloch(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn block(m: &CMatrix, i: usize, j: usize, d: usize) -> CMatrix {
    m.view((i * d, j * d), (d, d)).into_owned()
}

/// Reduces `rho` to `system ∪ environment` with the system first.
fn system_first<S: AsRef<str>>(
    rho: &DensityOperator,
    system: &str,
    environment: &[S],
) -> Result<DensityOperator> {
    disjoint(&[system], environment)?;
    let mut order = alloc::vec![system.to_string()];
    order.extend(environment.iter().map(|e| e.as_ref().to_string()));
    partial_trace(rho, &order)?.permute(&order)
}

/// Discord objective for a qubit system: the environment marginal and the
/// Pauli moments `tr_S[(σ_a ⊗ 1) ρ]` make each conditional state linear in the Bloch vector.
struct QubitDiscord {
    rho_e: CMatrix,
    moments: [CMatrix; 3],
    offset: f64,
}

impl QubitDiscord {
    fn new(rho_se: &DensityOperator) -> Result<Self> {
        let d = rho_se.dim() / 2;
        let m = rho_se.matrix();
        let (a, b, c) = (block(m, 0, 0, d), block(m, 0, 1, d), block(m, 1, 1, d));
        let i = Complex64::new(0.0, 1.0);
        let x = &b + b.adjoint();
        let y = (&b - b.adjoint()) * i;
        let z = &a - &c;
        let rho_s = partial_trace(rho_se, &[rho_se.layout().labels().next().unwrap_or("")])?;
        let offset = von_neumann_entropy(&rho_s)? - von_neumann_entropy(rho_se)?;
        Ok(Self {
            rho_e: a + c,
            moments: [x, y, z],
            offset,
        })
    }

    fn objective(&self, theta: f64, phi: f64) -> f64 {
        let n = bloch(theta, phi);
        let m = &self.moments[0] * Complex64::new(n[0], 0.0)
            + &self.moments[1] * Complex64::new(n[1], 0.0)
            + &self.moments[2] * Complex64::new(n[2], 0.0);
        let half = Complex64::new(0.5, 0.0);
        let plus = (&self.rho_e + &m) * half;
        let minus = (&self.rho_e - &m) * half;
        conditional_entropy_term(&plus) + conditional_entropy_term(&minus) + self.offset
    }
}

/// `p H(σ/p)` for an unnormalized conditional state `σ` with trace `p`.
fn conditional_entropy_term(sigma: &CMatrix) -> f64 {
    let cutoff = Tolerances::DEFAULT.entropy_cutoff;
    let p = sigma.trace().re;
    if p <= cutoff {
        return 0.0;
    }
    entropy_of(&eigvals_unchecked(sigma), cutoff) + p * p.log2()
}

/// Two-dimensional Nelder–Mead search started from `start` with edge `step`.
fn nelder_mead<F: Fn(f64, f64) -> f64>(f: F, start: (f64, f64), step: f64) -> ((f64, f64), f64) {
    let mut pts = [
        start,
        (start.0 + step, start.1),
        (start.0, start.1 + step),
    ];
    let mut vals = pts.map(|p| f(p.0, p.1));
    for _ in 0..REFINE_MAX_ITER {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = idx.map(|k| pts[k]);
        vals = idx.map(|k| vals[k]);
        if vals[2] - vals[0] <= REFINE_FTOL {
            break;
        }
        let centroid = ((pts[0].0 + pts[1].0) / 2.0, (pts[0].1 + pts[1].1) / 2.0);
        let along = |t: f64| {
            (
                centroid.0 + t * (pts[2].0 - centroid.0),
                centroid.1 + t * (pts[2].1 - centroid.1),
            )
        };
        let r = along(-1.0);
        let fr = f(r.0, r.1);
        if fr < vals[0] {
            let e = along(-2.0);
            let fe = f(e.0, e.1);
            if fe < fr {
                (pts[2], vals[2]) = (e, fe);
            } else {
                (pts[2], vals[2]) = (r, fr);
            }
        } else if fr < vals[1] {
            (pts[2], vals[2]) = (r, fr);
        } else {
            let c = if fr < vals[2] { along(-0.5) } else { along(0.5) };
            let fc = f(c.0, c.1);
            if fc < vals[2].min(fr) {
                (pts[2], vals[2]) = (c, fc);
            } else {
                for k in 1..3 {
                    pts[k] = (
                        (pts[0].0 + pts[k].0) / 2.0,
                        (pts[0].1 + pts[k].1) / 2.0,
                    );
                    vals[k] = f(pts[k].0, pts[k].1);
                }
            }
        }
    }
    let best = (0..3)
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .unwrap_or(0);
    (pts[best], vals[best])
}

/// Maps any angle pair to `θ ∈ [0, π]`, `φ ∈ [0, 2π)` describing the same direction.
fn canonical_angles(theta: f64, phi: f64) -> (f64, f64) {
    let n = bloch(theta, phi);
    let t = n[2].clamp(-1.0, 1.0).acos();
    if t.sin().abs() < 1e-12 {
        return (t, 0.0);
    }
    let mut p = n[1].atan2(n[0]);
    if p < 0.0 {
        p += 2.0 * PI;
    }
    (t, p)
}

/// Discord `D(S:E)` minimized over rank-one projective measurements of a qubit
/// system: a 64 × 128 grid in `(θ, φ)` followed by simplex refinement.
/// Ties on the grid go to the smallest `(θ, φ)`.
pub fn quantum_discord<S: AsRef<str>>(
    rho: &DensityOperator,
    system: &str,
    environment: &[S],
) -> Result<(f64, QubitMeasurement)> {
    check_normalized(rho)?;
    let d = rho.layout().dim_of(system)?;
    if d != 2 {
        return Err(Error::Unsupported(format!(
            "discord is only minimized for qubit systems, `{system}` has dimension {d}"
        )));
    }
    let rho_se = system_first(rho, system, environment)?;
    let problem = QubitDiscord::new(&rho_se)?;
    let f = |t: f64, p: f64| problem.objective(t, p);
    let measurement = |(t, p): (f64, f64)| QubitMeasurement {
        theta: t,
        phi: p,
        class: MeasurementClass::RankOneProjective,
    };

    // A zero at the computational axis cannot be improved on.
    let at_pole = f(0.0, 0.0);
    if at_pole <= Tolerances::DEFAULT.entropy_cutoff * 100.0 {
        return Ok((at_pole.max(0.0), measurement((0.0, 0.0))));
    }

    let mut best = ((0.0, 0.0), at_pole);
    for i in 0..THETA_STEPS {
        let theta = PI * i as f64 / (THETA_STEPS - 1) as f64;
        for j in 0..PHI_STEPS {
            let phi = 2.0 * PI * j as f64 / PHI_STEPS as f64;
            let v = f(theta, phi);
            if v < best.1 {
                best = ((theta, phi), v);
            }
        }
    }
    let step = PI / (THETA_STEPS - 1) as f64;
    let (pt, v) = nelder_mead(f, best.0, step);
    let (pt, v) = if v < best.1 { (pt, v) } else { best };
    Ok((v.max(0.0), measurement(canonical_angles(pt.0, pt.1))))
}

/// `χ = I − D`.
pub fn holevo_information<S: AsRef<str>>(
    rho: &DensityOperator,
    system: &str,
    environment: &[S],
) -> Result<f64> {
    Ok(correlation_report(rho, system, environment)?.holevo)
}

/// Mutual information, discord and Holevo information between a qubit system and an environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub mutual_information: f64,
    pub discord: f64,
    pub holevo: f64,
    pub system_entropy: f64,
    pub minimizing_measurement: QubitMeasurement,
}

pub fn correlation_report<S: AsRef<str>>(
    rho: &DensityOperator,
    system: &str,
    environment: &[S],
) -> Result<CorrelationReport> {
    let mutual_information = mutual_information(rho, &[system], environment)?;
    let (discord, minimizing_measurement) = quantum_discord(rho, system, environment)?;
    Ok(CorrelationReport {
        mutual_information,
        discord,
        holevo: mutual_information - discord,
        system_entropy: von_neumann_entropy(&partial_trace(rho, &[system])?)?,
        minimizing_measurement,
    })
}

/// `Σ_i p_i H(ρ_{E|i}) + H(S) − H(SE)` for the projective measurement onto `basis`.
fn fixed_basis_discord(rho_se: &DensityOperator, basis: &[CVector]) -> Result<f64> {
    let rotated = rotate_system(rho_se, basis);
    let d = rho_se.dim() / basis.len();
    let cond: f64 = (0..basis.len())
        .map(|i| conditional_entropy_term(&block(rotated.matrix(), i, i, d)))
        .sum();
    let label = rho_se.layout().labels().next().unwrap_or("");
    let h_s = von_neumann_entropy(&partial_trace(rho_se, &[label])?)?;
    Ok((cond + h_s - von_neumann_entropy(rho_se)?).max(0.0))
}

/// Expresses the first subsystem in `basis`, so that block `(i, j)` is `⟨i|ρ|j⟩_S`.
fn rotate_system(rho: &DensityOperator, basis: &[CVector]) -> DensityOperator {
    let d = basis.len();
    let u_dag = CMatrix::from_fn(d, d, |r, c| basis[r][c].conj());
    rho.conjugate_embedded(&u_dag, &[0])
}

/// Tolerances applied by [`check_structure`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureTolerances {
    /// Bound on `|I − H(S)|` and on discord.
    pub information: f64,
    /// Bound on off-diagonal system blocks, conditional overlaps, impurity and support leakage.
    pub structure: f64,
    /// Conditional blocks with smaller weight are skipped.
    pub probability_floor: f64,
}

impl Default for StructureTolerances {
    fn default() -> Self {
        let t = Tolerances::DEFAULT;
        Self {
            information: t.information,
            structure: t.structure,
            probability_floor: t.probability_floor,
        }
    }
}

/// Diagnostics for one bipartition `S : U`, where `U` is a single
/// environment or the whole fragment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartitionCheck {
    pub environments: Vec<String>,
    pub mutual_information: f64,
    pub discord: f64,
    pub block_diagonal: bool,
    pub orthogonal: bool,
    pub pure: bool,
}

/// Which objectivity structures a state satisfies on `S ∪ F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureVerdict {
    pub qd: bool,
    pub sqd: bool,
    pub bipartite_sbs: bool,
    pub isbs: bool,
    /// Conditional states sit inside the spec's subspaces, i.e. `Γ(ρ) = ρ`.
    pub objective_in_spec: bool,
    pub system_entropy: f64,
    pub per_environment: Vec<BipartitionCheck>,
    pub joint: BipartitionCheck,
    pub discord_search: MeasurementClass,
    pub tolerances: StructureTolerances,
}

struct Analysis<'a> {
    system: &'a str,
    basis: &'a [CVector],
    tol: StructureTolerances,
}

impl Analysis<'_> {
    /// Weights and normalized conditional states `ρ_{U|i}` (None below the floor),
    /// plus the Frobenius norm of the largest off-diagonal system block.
    fn conditionals(&self, rotated: &DensityOperator) -> (Vec<Option<CMatrix>>, f64) {
        let ds = self.basis.len();
        let d = rotated.dim() / ds;
        let m = rotated.matrix();
        let mut off = 0.0f64;
        for i in 0..ds {
            for j in 0..ds {
                if i != j {
                    off = off.max(block(m, i, j, d).norm());
                }
            }
        }
        let conds = (0..ds)
            .map(|i| {
                let b = block(m, i, i, d);
                let p = b.trace().re;
                (p > self.tol.probability_floor).then(|| b * Complex64::new(1.0 / p, 0.0))
            })
            .collect();
        (conds, off)
    }

    fn bipartition<S: AsRef<str>>(
        &self,
        rho: &DensityOperator,
        names: Vec<String>,
        labels: &[S],
    ) -> Result<(BipartitionCheck, Vec<Option<CMatrix>>)> {
        let rho_su = system_first(rho, self.system, labels)?;
        let mutual_information = mutual_information(&rho_su, &[self.system], labels)?;
        let discord = if self.basis.len() == 2 {
            quantum_discord(&rho_su, self.system, labels)?.0
        } else {
            fixed_basis_discord(&rho_su, self.basis)?
        };
        let (conds, off) = self.conditionals(&rotate_system(&rho_su, self.basis));
        let present: Vec<&CMatrix> = conds.iter().flatten().collect();
        let mut orthogonal = true;
        for a in 0..present.len() {
            for b in (a + 1)..present.len() {
                if product_trace_norm(present[a], present[b]) > self.tol.structure {
                    orthogonal = false;
                }
            }
        }
        let pure = present
            .iter()
            .all(|c| eigvals_unchecked(c).iter().skip(1).all(|l| l.abs() <= self.tol.structure));
        Ok((
            BipartitionCheck {
                environments: names,
                mutual_information,
                discord,
                block_diagonal: off <= self.tol.structure,
                orthogonal,
                pure,
            },
            conds,
        ))
    }
}

/// `‖AB‖₁` for Hermitian `A`, `B`, via the eigenvalues of `B A² B`.
fn product_trace_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    let m = b * a * a * b;
    eigvals_unchecked(&m).iter().map(|l| l.max(0.0).sqrt()).sum()
}

fn structure_verdict(
    rho: &DensityOperator,
    analysis: &Analysis<'_>,
    groups: &[(String, Vec<String>)],
    projectors: Option<&dyn Fn(usize) -> Result<CMatrix>>,
) -> Result<StructureVerdict> {
    check_normalized(rho)?;
    let tol = analysis.tol;
    let system_entropy = von_neumann_entropy(&partial_trace(rho, &[analysis.system])?)?;
    let is_qd = |c: &BipartitionCheck| (c.mutual_information - system_entropy).abs() <= tol.information;
    let is_sqd = |c: &BipartitionCheck| is_qd(c) && c.discord <= tol.information;
    let is_sbs = |c: &BipartitionCheck| c.block_diagonal && c.orthogonal;

    let mut per_env = Vec::with_capacity(groups.len());
    let mut env_conds = Vec::with_capacity(groups.len());
    for (name, labels) in groups {
        let (check, conds) = analysis.bipartition(rho, alloc::vec![name.clone()], labels)?;
        per_env.push(check);
        env_conds.push(conds);
    }
    let all_labels: Vec<String> = groups.iter().flat_map(|(_, l)| l.clone()).collect();
    let names = groups.iter().map(|(n, _)| n.clone()).collect();
    let (joint, joint_conds) = analysis.bipartition(rho, names, &all_labels)?;

    // conditional states on F must be products of the per-environment ones
    let mut product = true;
    for (i, cond) in joint_conds.iter().enumerate() {
        let Some(cond) = cond else { continue };
        let mut kron = CMatrix::identity(1, 1);
        for conds in &env_conds {
            match &conds[i] {
                Some(c) => kron = kron.kronecker(c),
                None => product = false,
            }
        }
        if kron.nrows() == cond.nrows() {
            let diff = crate::hilbert::trace_norm(&(cond - kron));
            product &= diff <= tol.structure;
        } else {
            product = false;
        }
    }

    let objective_in_spec = match projectors {
        None => false,
        Some(proj) => {
            let mut ok = joint.block_diagonal;
            for (i, cond) in joint_conds.iter().enumerate() {
                if let Some(c) = cond {
                    let inside = (proj(i)? * c).trace().re;
                    ok &= 1.0 - inside <= tol.structure;
                }
            }
            ok
        }
    };

    let qd = per_env.iter().all(is_qd);
    let sqd = qd && per_env.iter().all(is_sqd) && is_sqd(&joint);
    let bipartite_sbs = per_env.iter().all(is_sbs) && is_sbs(&joint);
    let isbs = sqd
        && bipartite_sbs
        && product
        && joint.pure
        && per_env.iter().all(|c| c.pure);
    Ok(StructureVerdict {
        qd,
        sqd,
        bipartite_sbs,
        isbs,
        objective_in_spec,
        system_entropy,
        per_environment: per_env,
        joint,
        discord_search: if analysis.basis.len() == 2 {
            MeasurementClass::RankOneProjective
        } else {
            MeasurementClass::FixedBasis
        },
        tolerances: tol,
    })
}

/// Evaluates the structure conditions on `S ∪ F` for the given fragment,
/// per environment and for the fragment as a whole. Environments outside
/// the fragment are traced out first.
pub fn check_structure<S: AsRef<str>>(
    rho: &DensityOperator,
    spec: &ObjectiveSubspaceSpec,
    fragment: &[S],
) -> Result<StructureVerdict> {
    let envs = spec.fragment_environments(fragment)?;
    let groups: Vec<(String, Vec<String>)> = envs
        .iter()
        .map(|e| (e.name().to_string(), e.labels().map(String::from).collect()))
        .collect();
    let analysis = Analysis {
        system: spec.system(),
        basis: spec.system_basis(),
        tol: StructureTolerances::default(),
    };
    let proj = |i: usize| crate::objectivity::fragment_projector(spec, fragment, i).map(|p| p.matrix);
    structure_verdict(rho, &analysis, &groups, Some(&proj))
}

fn computational_basis(d: usize) -> Vec<CVector> {
    (0..d)
        .map(|i| {
            let mut v = CVector::zeros(d);
            v[i] = Complex64::new(1.0, 0.0);
            v
        })
        .collect()
}

/// For equal subsystem dimensions, confirms that a state with strong quantum
/// Darwinism (first subsystem as the system, every other subsystem an
/// environment, computational system basis) has the invariant spectrum
/// broadcast form. States without the strong form are rejected.
pub fn verify_appendix_a_reduction(rho: &DensityOperator) -> Result<bool> {
    let subs = rho.layout().subsystems();
    if subs.len() < 2 {
        return Err(Error::HypothesisUnmet(
            "need a system and at least one environment".into(),
        ));
    }
    let d = subs[0].dim;
    if let Some(s) = subs.iter().find(|s| s.dim != d) {
        return Err(Error::HypothesisUnmet(format!(
            "subsystem `{}` has dimension {}, the system has {d}",
            s.label, s.dim
        )));
    }
    let basis = computational_basis(d);
    let analysis = Analysis {
        system: &subs[0].label,
        basis: &basis,
        tol: StructureTolerances::default(),
    };
    let groups: Vec<(String, Vec<String>)> = subs[1..]
        .iter()
        .map(|s| (s.label.clone(), alloc::vec![s.label.clone()]))
        .collect();
    let verdict = structure_verdict(rho, &analysis, &groups, None)?;
    if !verdict.sqd {
        return Err(Error::HypothesisUnmet(
            "state lacks strong quantum Darwinism".into(),
        ));
    }
    Ok(verdict.isbs)
}

/// `Σ_i p_i |i⟩⟨i|_S ⊗ ρ_{E₁|i} ⊗ ⋯` with `conditionals[k][i] = ρ_{E_k|i}`.
/// Conditional states of one environment must be mutually orthogonal.
pub fn spectrum_broadcast_state(
    system: &str,
    probabilities: &[f64],
    conditionals: &[Vec<DensityOperator>],
) -> Result<DensityOperator> {
    let d = probabilities.len();
    if d == 0 || probabilities.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::InvalidProbability {
            name: "p_i",
            value: probabilities.iter().copied().find(|p| !(0.0..=1.0).contains(p)).unwrap_or(0.0),
        });
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > Tolerances::DEFAULT.trace {
        return Err(Error::InvalidTrace(total));
    }
    let mut layout = TensorLayout::new(&[(system, d)])?;
    for (k, conds) in conditionals.iter().enumerate() {
        if conds.len() != d {
            return Err(Error::InvalidArgument(format!(
                "environment {k} has {} conditional states, expected {d}",
                conds.len()
            )));
        }
        for c in conds {
            check_normalized(c)?;
            if c.layout() != conds[0].layout() {
                return Err(Error::LayoutMismatch(format!(
                    "conditional states of environment {k} disagree on layout"
                )));
            }
        }
        for i in 0..d {
            for j in (i + 1)..d {
                if product_trace_norm(conds[i].matrix(), conds[j].matrix())
                    > Tolerances::DEFAULT.structure
                {
                    return Err(Error::HypothesisUnmet(format!(
                        "conditional states {i} and {j} of environment {k} are not orthogonal"
                    )));
                }
            }
        }
        layout = layout.concat(conds[0].layout())?;
    }
    let n = layout.total_dim();
    let mut m = CMatrix::zeros(n, n);
    let denv = n / d;
    for (i, &p) in probabilities.iter().enumerate() {
        let mut cond = CMatrix::identity(1, 1) * Complex64::new(p, 0.0);
        for conds in conditionals {
            cond = cond.kronecker(conds[i].matrix());
        }
        m.view_mut((i * denv, i * denv), (denv, denv)).copy_from(&cond);
    }
    DensityOperator::new(layout, m)
}
