//! Preferred objective subspaces, the objectivity operations that project onto
//! them, and the trace-norm non-objectivity measures.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{trace_norm_distance, CMatrix, CVector, DensityOperator, TensorLayout};
use crate::tolerance::Tolerances;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn basis_ket(d: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[i] = ONE;
    v
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_orthonormal_basis(kets: &[CVector], dim: usize, what: &str) -> Result<()> {
    if kets.len() != dim || kets.iter().any(|k| k.len() != dim) {
        return Err(Error::InvalidSpec(format!(
            "{what}: expected {dim} kets of length {dim}"
        )));
    }
    let tol = Tolerances::DEFAULT.hermitian;
    for (a, ka) in kets.iter().enumerate() {
        for (b, kb) in kets.iter().enumerate() {
            let overlap = ka.dotc(kb);
            let target = if a == b { 1.0 } else { 0.0 };
            if (overlap - Complex64::new(target, 0.0)).norm() > tol {
                return Err(Error::InvalidSpec(format!(
                    "{what}: kets {a} and {b} are not orthonormal"
                )));
            }
        }
    }
    Ok(())
}

/// Conditional subspaces `Π_{E|i}` of one environment.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentSubspaces {
    name: String,
    layout: TensorLayout,
    projectors: Vec<CMatrix>,
}

impl EnvironmentSubspaces {
    /// Validates that every projector is Hermitian and idempotent and that
    /// projectors for different indices are mutually orthogonal.
    pub fn new(name: &str, layout: TensorLayout, projectors: Vec<CMatrix>) -> Result<Self> {
        let d = layout.total_dim();
        let tol = Tolerances::DEFAULT.hermitian;
        for (i, p) in projectors.iter().enumerate() {
            if p.nrows() != d || p.ncols() != d {
                return Err(Error::InvalidSpec(format!(
                    "environment `{name}`: projector {i} is {}x{}, expected {d}x{d}",
                    p.nrows(),
                    p.ncols()
                )));
            }
            if max_abs(&(p - p.adjoint())) > tol || max_abs(&(p * p - p)) > tol {
                return Err(Error::InvalidSpec(format!(
                    "environment `{name}`: operator {i} is not an orthogonal projector"
                )));
            }
        }
        for i in 0..projectors.len() {
            for j in (i + 1)..projectors.len() {
                if max_abs(&(&projectors[i] * &projectors[j])) > tol {
                    return Err(Error::InvalidSpec(format!(
                        "environment `{name}`: subspaces {i} and {j} overlap"
                    )));
                }
            }
        }
        Ok(Self {
            name: name.to_string(),
            layout,
            projectors,
        })
    }

    /// Builds each `Π_{E|i}` from an orthonormal spanning list of kets.
    pub fn from_subspace_bases(
        name: &str,
        layout: TensorLayout,
        subspaces: &[Vec<CVector>],
    ) -> Result<Self> {
        let d = layout.total_dim();
        let mut projectors = Vec::with_capacity(subspaces.len());
        for (i, kets) in subspaces.iter().enumerate() {
            let mut p = CMatrix::zeros(d, d);
            for k in kets {
                if k.len() != d {
                    return Err(Error::InvalidSpec(format!(
                        "environment `{name}`: subspace {i} ket has length {}, expected {d}",
                        k.len()
                    )));
                }
                p += k * k.adjoint();
            }
            projectors.push(p);
        }
        Self::new(name, layout, projectors)
    }

    /// Two-photon parity partition: even `{|00⟩,|11⟩}` for index 0, odd `{|01⟩,|10⟩}` for index 1.
    pub fn parity(name: &str, first: &str, second: &str) -> Result<Self> {
        let layout = TensorLayout::qubits(&[first, second])?;
        let k = |i| basis_ket(4, i);
        Self::from_subspace_bases(name, layout, &[alloc::vec![k(0), k(3)], alloc::vec![k(1), k(2)]])
    }

    /// Rank-one projectors `|i⟩⟨i|` on a single subsystem.
    pub fn computational(name: &str, label: &str, dim: usize, count: usize) -> Result<Self> {
        let layout = TensorLayout::new(&[(label, dim)])?;
        if count > dim {
            return Err(Error::InvalidSpec(format!(
                "environment `{name}` has dimension {dim} but needs {count} orthogonal states"
            )));
        }
        let subspaces: Vec<Vec<CVector>> =
            (0..count).map(|i| alloc::vec![basis_ket(dim, i)]).collect();
        Self::from_subspace_bases(name, layout, &subspaces)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn layout(&self) -> &TensorLayout {
        &self.layout
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> + '_ {
        self.layout.labels()
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }
}

/// Preferred system basis `{|i⟩_S}` together with per-environment conditional subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveSubspaceSpec {
    system: String,
    system_dim: usize,
    system_basis: Vec<CVector>,
    environments: Vec<EnvironmentSubspaces>,
}

impl ObjectiveSubspaceSpec {
    pub fn new(
        system: &str,
        system_basis: Vec<CVector>,
        environments: Vec<EnvironmentSubspaces>,
    ) -> Result<Self> {
        let d = system_basis.len();
        check_orthonormal_basis(&system_basis, d, "system basis")?;
        let mut seen: Vec<&str> = alloc::vec![system];
        for env in &environments {
            if env.projectors.len() != d {
                return Err(Error::InvalidSpec(format!(
                    "environment `{}` has {} subspaces, the system basis has {d} states",
                    env.name,
                    env.projectors.len()
                )));
            }
            if environments.iter().filter(|e| e.name == env.name).count() > 1 {
                return Err(Error::InvalidSpec(format!(
                    "environment `{}` listed twice",
                    env.name
                )));
            }
            for l in env.labels() {
                if seen.contains(&l) {
                    return Err(Error::InvalidSpec(format!(
                        "subsystem `{l}` appears in more than one place"
                    )));
                }
                seen.push(l);
            }
        }
        Ok(Self {
            system: system.to_string(),
            system_dim: d,
            system_basis,
            environments,
        })
    }

    /// Computational system basis with the two-photon parity partition on
    /// each environment, given as `(name, first photon, second photon)`.
    pub fn parity2(system: &str, environments: &[(&str, &str, &str)]) -> Result<Self> {
        let envs = environments
            .iter()
            .map(|(n, a, b)| EnvironmentSubspaces::parity(n, a, b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(system, (0..2).map(|i| basis_ket(2, i)).collect(), envs)
    }

    /// Computational basis on the system and rank-one `|i⟩⟨i|` on each
    /// single-subsystem environment.
    pub fn computational(system: &str, dim: usize, environments: &[&str]) -> Result<Self> {
        let envs = environments
            .iter()
            .map(|e| EnvironmentSubspaces::computational(e, e, dim, dim))
            .collect::<Result<Vec<_>>>()?;
        Self::new(system, (0..dim).map(|i| basis_ket(dim, i)).collect(), envs)
    }

    pub fn system(&self) -> &str {
        &self.system
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn system_basis(&self) -> &[CVector] {
        &self.system_basis
    }

    pub fn environments(&self) -> &[EnvironmentSubspaces] {
        &self.environments
    }

    pub fn environment(&self, name: &str) -> Result<&EnvironmentSubspaces> {
        self.environments
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::UnknownEnvironment(name.to_string()))
    }

    /// Fragment environments in spec order; rejects unknown or repeated names.
    pub fn fragment_environments<S: AsRef<str>>(
        &self,
        fragment: &[S],
    ) -> Result<Vec<&EnvironmentSubspaces>> {
        if fragment.is_empty() {
            return Err(Error::InvalidArgument("fragment is empty".into()));
        }
        for (k, f) in fragment.iter().enumerate() {
            self.environment(f.as_ref())?;
            if fragment[..k].iter().any(|g| g.as_ref() == f.as_ref()) {
                return Err(Error::InvalidArgument(format!(
                    "environment `{}` repeated in fragment",
                    f.as_ref()
                )));
            }
        }
        Ok(self
            .environments
            .iter()
            .filter(|e| fragment.iter().any(|f| f.as_ref() == e.name))
            .collect())
    }

    /// Subsystem labels of the fragment, in spec order.
    pub fn fragment_labels<S: AsRef<str>>(&self, fragment: &[S]) -> Result<Vec<String>> {
        Ok(self
            .fragment_environments(fragment)?
            .iter()
            .flat_map(|e| e.labels().map(String::from))
            .collect())
    }

    /// Environments present in `layout`. Every non-system subsystem must
    /// belong to a fully present environment.
    pub fn environments_in(&self, layout: &TensorLayout) -> Result<Vec<String>> {
        if !layout.contains(&self.system) {
            return Err(Error::UnknownLabel(self.system.clone()));
        }
        let mut names = Vec::new();
        for env in &self.environments {
            let present = env.labels().filter(|l| layout.contains(l)).count();
            if present == env.layout.len() {
                names.push(env.name.clone());
            } else if present > 0 {
                return Err(Error::LayoutMismatch(format!(
                    "environment `{}` is only partially present",
                    env.name
                )));
            }
        }
        for l in layout.labels() {
            if l != self.system && !self.environments.iter().any(|e| e.layout.contains(l)) {
                return Err(Error::UnknownLabel(l.to_string()));
            }
        }
        Ok(names)
    }
}

/// A projector together with the labels of the subsystems it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    pub labels: Vec<String>,
    pub matrix: CMatrix,
}

/// `Π_{F|i} = ⊗_k Π_{E_k|i}` over the fragment, in spec order.
pub fn fragment_projector<S: AsRef<str>>(
    spec: &ObjectiveSubspaceSpec,
    fragment: &[S],
    i: usize,
) -> Result<Projector> {
    if i >= spec.system_dim {
        return Err(Error::InvalidArgument(format!(
            "index {i} exceeds system dimension {}",
            spec.system_dim
        )));
    }
    let envs = spec.fragment_environments(fragment)?;
    let mut matrix = CMatrix::identity(1, 1);
    let mut labels = Vec::new();
    for env in envs {
        matrix = matrix.kronecker(&env.projectors[i]);
        labels.extend(env.labels().map(String::from));
    }
    Ok(Projector { labels, matrix })
}

/// `Σ_i (|i⟩⟨i|_S ⊗ Π_{F|i} ⊗ 1) ρ (|i⟩⟨i|_S ⊗ Π_{F|i} ⊗ 1)`. The result may have trace below one.
pub fn objectivity_operation_sqd<S: AsRef<str>>(
    rho: &DensityOperator,
    spec: &ObjectiveSubspaceSpec,
    fragment: &[S],
) -> Result<DensityOperator> {
    let mut targets: Vec<String> = alloc::vec![spec.system.clone()];
    targets.extend(spec.fragment_labels(fragment)?);
    let pos = rho.layout().positions(&targets)?;
    check_dims(rho.layout(), &pos, spec)?;
    let ops: Vec<CMatrix> = (0..spec.system_dim)
        .map(|i| {
            let ket = &spec.system_basis[i];
            let sys = ket * ket.adjoint();
            fragment_projector(spec, fragment, i).map(|p| sys.kronecker(&p.matrix))
        })
        .collect::<Result<_>>()?;
    Ok(rho.sandwich_sum(&ops, &pos))
}

fn check_dims(layout: &TensorLayout, pos: &[usize], spec: &ObjectiveSubspaceSpec) -> Result<()> {
    let s = &layout.subsystems()[pos[0]];
    if s.dim != spec.system_dim {
        return Err(Error::LayoutMismatch(format!(
            "system `{}` has dimension {}, spec expects {}",
            s.label, s.dim, spec.system_dim
        )));
    }
    for env in &spec.environments {
        for sub in env.layout.subsystems() {
            if let Ok(d) = layout.dim_of(&sub.label) {
                if d != sub.dim {
                    return Err(Error::LayoutMismatch(format!(
                        "subsystem `{}` has dimension {d}, spec expects {}",
                        sub.label, sub.dim
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Preferred basis `{|i⟩}` on the system and on every single-subsystem environment.
#[derive(Debug, Clone, PartialEq)]
pub struct IsbsBasis {
    system: String,
    system_basis: Vec<CVector>,
    environments: Vec<(String, Vec<CVector>)>,
}

impl IsbsBasis {
    pub fn new(
        system: &str,
        system_basis: Vec<CVector>,
        environments: Vec<(String, Vec<CVector>)>,
    ) -> Result<Self> {
        let d = system_basis.len();
        check_orthonormal_basis(&system_basis, d, "system basis")?;
        for (k, (name, kets)) in environments.iter().enumerate() {
            if name == system || environments[..k].iter().any(|(n, _)| n == name) {
                return Err(Error::InvalidSpec(format!("label `{name}` repeated")));
            }
            check_orthonormal_basis(kets, d, name)?;
        }
        Ok(Self {
            system: system.to_string(),
            system_basis,
            environments,
        })
    }

    /// Computational basis on the system and on each environment.
    pub fn computational(system: &str, dim: usize, environments: &[&str]) -> Result<Self> {
        let basis = || (0..dim).map(|i| basis_ket(dim, i)).collect::<Vec<_>>();
        Self::new(
            system,
            basis(),
            environments
                .iter()
                .map(|e| (e.to_string(), basis()))
                .collect(),
        )
    }

    pub fn system(&self) -> &str {
        &self.system
    }

    pub fn dim(&self) -> usize {
        self.system_basis.len()
    }

    pub fn environment_names(&self) -> impl Iterator<Item = &str> + '_ {
        self.environments.iter().map(|(n, _)| n.as_str())
    }

    /// The equivalent subspace spec with rank-one `|i⟩⟨i|` environment projectors.
    pub fn to_subspace_spec(&self) -> Result<ObjectiveSubspaceSpec> {
        let d = self.dim();
        let envs = self
            .environments
            .iter()
            .map(|(name, kets)| {
                let layout = TensorLayout::new(&[(name.as_str(), d)])?;
                let subspaces: Vec<Vec<CVector>> =
                    kets.iter().map(|k| alloc::vec![k.clone()]).collect();
                EnvironmentSubspaces::from_subspace_bases(name, layout, &subspaces)
            })
            .collect::<Result<Vec<_>>>()?;
        ObjectiveSubspaceSpec::new(&self.system, self.system_basis.clone(), envs)
    }

    fn fragment_order<S: AsRef<str>>(&self, fragment: &[S]) -> Result<Vec<usize>> {
        if fragment.is_empty() {
            return Err(Error::InvalidArgument("fragment is empty".into()));
        }
        let mut idx = Vec::new();
        for f in fragment {
            let k = self
                .environments
                .iter()
                .position(|(n, _)| n == f.as_ref())
                .ok_or_else(|| Error::UnknownEnvironment(f.as_ref().to_string()))?;
            if idx.contains(&k) {
                return Err(Error::InvalidArgument(format!(
                    "environment `{}` repeated in fragment",
                    f.as_ref()
                )));
            }
            idx.push(k);
        }
        idx.sort_unstable();
        Ok(idx)
    }
}

/// `Σ_i (|i⋯i⟩⟨i⋯i|_{SF} ⊗ 1) ρ (|i⋯i⟩⟨i⋯i|_{SF} ⊗ 1)`.
pub fn objectivity_operation_isbs<S: AsRef<str>>(
    rho: &DensityOperator,
    basis: &IsbsBasis,
    fragment: &[S],
) -> Result<DensityOperator> {
    let envs = basis.fragment_order(fragment)?;
    let mut targets: Vec<&str> = alloc::vec![basis.system.as_str()];
    targets.extend(envs.iter().map(|&k| basis.environments[k].0.as_str()));
    let pos = rho.layout().positions(&targets)?;
    let d = basis.dim();
    for &p in &pos {
        let s = &rho.layout().subsystems()[p];
        if s.dim != d {
            return Err(Error::LayoutMismatch(format!(
                "subsystem `{}` has dimension {}, basis expects {d}",
                s.label, s.dim
            )));
        }
    }
    let ops: Vec<CMatrix> = (0..d)
        .map(|i| {
            let mut ket = basis.system_basis[i].clone();
            for &k in &envs {
                ket = ket.kronecker(&basis.environments[k].1[i]);
            }
            &ket * ket.adjoint()
        })
        .collect();
    Ok(rho.sandwich_sum(&ops, &pos))
}

/// Which objectivity framework the preferred structure belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Framework {
    Sqd,
    Isbs,
}

/// A framework together with its preferred structure.
#[derive(Debug, Clone, PartialEq)]
pub enum Objectivity {
    Sqd(ObjectiveSubspaceSpec),
    Isbs(IsbsBasis),
}

impl Objectivity {
    pub fn framework(&self) -> Framework {
        match self {
            Objectivity::Sqd(_) => Framework::Sqd,
            Objectivity::Isbs(_) => Framework::Isbs,
        }
    }

    pub fn system(&self) -> &str {
        match self {
            Objectivity::Sqd(s) => s.system(),
            Objectivity::Isbs(b) => b.system(),
        }
    }

    pub fn environment_names(&self) -> Vec<String> {
        match self {
            Objectivity::Sqd(s) => s.environments().iter().map(|e| e.name.clone()).collect(),
            Objectivity::Isbs(b) => b.environment_names().map(String::from).collect(),
        }
    }

    /// Subsystem labels of the named environments, in canonical order.
    pub fn labels_of<S: AsRef<str>>(&self, environments: &[S]) -> Result<Vec<String>> {
        match self {
            Objectivity::Sqd(s) => {
                let mut out = Vec::new();
                for env in s.environments() {
                    if environments.iter().any(|e| e.as_ref() == env.name) {
                        out.extend(env.labels().map(String::from));
                    }
                }
                for e in environments {
                    s.environment(e.as_ref())?;
                }
                Ok(out)
            }
            Objectivity::Isbs(b) => {
                for e in environments {
                    if !b.environment_names().any(|n| n == e.as_ref()) {
                        return Err(Error::UnknownEnvironment(e.as_ref().to_string()));
                    }
                }
                Ok(b.environment_names()
                    .filter(|n| environments.iter().any(|e| e.as_ref() == *n))
                    .map(String::from)
                    .collect())
            }
        }
    }

    /// Environments whose subsystems appear in `layout`.
    pub fn environments_in(&self, layout: &TensorLayout) -> Result<Vec<String>> {
        match self {
            Objectivity::Sqd(s) => s.environments_in(layout),
            Objectivity::Isbs(b) => {
                if !layout.contains(b.system()) {
                    return Err(Error::UnknownLabel(b.system().to_string()));
                }
                for l in layout.labels() {
                    if l != b.system() && !b.environment_names().any(|n| n == l) {
                        return Err(Error::UnknownLabel(l.to_string()));
                    }
                }
                Ok(b.environment_names()
                    .filter(|n| layout.contains(n))
                    .map(String::from)
                    .collect())
            }
        }
    }

    /// The objectivity operation Γ on `fragment`, identity elsewhere.
    pub fn apply<S: AsRef<str>>(&self, rho: &DensityOperator, fragment: &[S]) -> Result<DensityOperator> {
        match self {
            Objectivity::Sqd(s) => objectivity_operation_sqd(rho, s, fragment),
            Objectivity::Isbs(b) => objectivity_operation_isbs(rho, b, fragment),
        }
    }
}

/// `‖ρ_SF − Γ(ρ_SF)‖₁` where the fragment is every environment present in `rho_sf`.
pub fn nonobjectivity_measure(rho_sf: &DensityOperator, objectivity: &Objectivity) -> Result<f64> {
    let fragment = objectivity.environments_in(rho_sf.layout())?;
    if fragment.is_empty() {
        return Err(Error::InvalidArgument(
            "state holds no environment of the spec".into(),
        ));
    }
    let projected = objectivity.apply(rho_sf, &fragment)?;
    trace_norm_distance(rho_sf, &projected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{partial_trace, PureState};
    use crate::random::random_density;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn parity_spec() -> ObjectiveSubspaceSpec {
        ObjectiveSubspaceSpec::parity2("S", &[("E1", "E1_1", "E1_2"), ("E2", "E2_1", "E2_2")]).unwrap()
    }

    fn rank(p: &CMatrix) -> usize {
        p.trace().re.round() as usize
    }

    fn max_diff(a: &DensityOperator, b: &DensityOperator) -> f64 {
        max_abs(&(a.matrix() - b.matrix()))
    }

    /// The five-qubit initial state, built amplitude by amplitude.
    fn initial_state() -> DensityOperator {
        let l = TensorLayout::qubits(&["S", "E1_1", "E1_2", "E2_1", "E2_2"]).unwrap();
        let mut v = CVector::zeros(32);
        for idx in [0b00000, 0b01111, 0b11010, 0b10101] {
            v[idx] = c(0.5);
        }
        PureState::new(l, v).unwrap().to_density()
    }

    #[test]
    fn parity_fragment_projectors() {
        let spec = parity_spec();
        let p = fragment_projector(&spec, &["E1"], 0).unwrap();
        assert_eq!(rank(&p.matrix), 2);
        assert_eq!(p.matrix[(0, 0)], c(1.0));
        assert_eq!(p.matrix[(3, 3)], c(1.0));
        let p1 = fragment_projector(&spec, &["E2", "E1"], 1).unwrap();
        assert_eq!(rank(&p1.matrix), 4);
        assert_eq!(p1.labels, ["E1_1", "E1_2", "E2_1", "E2_2"]);
        let p0 = fragment_projector(&spec, &["E1", "E2"], 0).unwrap();
        assert!(max_abs(&(&p0.matrix * &p1.matrix)) < 1e-15);
        assert!(max_abs(&(&p1.matrix * &p1.matrix - &p1.matrix)) < 1e-15);
        assert!(matches!(
            fragment_projector(&spec, &["E3"], 0),
            Err(Error::UnknownEnvironment(_))
        ));
    }

    #[test]
    fn spec_validation_is_eager() {
        let l = TensorLayout::qubits(&["A"]).unwrap();
        let overlapping = alloc::vec![
            alloc::vec![basis_ket(2, 0)],
            alloc::vec![basis_ket(2, 0)],
        ];
        assert!(EnvironmentSubspaces::from_subspace_bases("E", l.clone(), &overlapping).is_err());
        let not_proj = alloc::vec![CMatrix::identity(2, 2) * c(0.5)];
        assert!(EnvironmentSubspaces::new("E", l, not_proj).is_err());
        let bad_basis = alloc::vec![basis_ket(2, 0), basis_ket(2, 0)];
        assert!(ObjectiveSubspaceSpec::new("S", bad_basis, Vec::new()).is_err());
    }

    #[test]
    fn reduced_initial_state_is_fixed_point() {
        let spec = parity_spec();
        let rho = initial_state();
        let sf = partial_trace(&rho, &["S", "E1_1", "E1_2"]).unwrap();
        let g = objectivity_operation_sqd(&sf, &spec, &["E1"]).unwrap();
        assert!(max_diff(&g, &sf) < 1e-15);
        assert!(nonobjectivity_measure(&sf, &Objectivity::Sqd(spec)).unwrap() < 1e-12);
    }

    #[test]
    fn full_fragment_projection_of_initial_state() {
        let spec = parity_spec();
        let rho = initial_state();
        let g = objectivity_operation_sqd(&rho, &spec, &["E1", "E2"]).unwrap();
        assert!((g.trace() - 1.0).abs() < 1e-14);
        // the S = 0 and S = 1 branches survive, coherences between them do not
        let mut expected = CMatrix::zeros(32, 32);
        for a in [0b00000usize, 0b01111] {
            for b in [0b00000usize, 0b01111] {
                expected[(a, b)] = c(0.25);
            }
        }
        for a in [0b11010usize, 0b10101] {
            for b in [0b11010usize, 0b10101] {
                expected[(a, b)] = c(0.25);
            }
        }
        assert!(max_abs(&(g.matrix() - expected)) < 1e-15);
        let m = nonobjectivity_measure(&rho, &Objectivity::Sqd(spec)).unwrap();
        assert!((m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_of_maximally_mixed_halves_trace() {
        let spec = ObjectiveSubspaceSpec::parity2("S", &[("E1", "E1_1", "E1_2")]).unwrap();
        let l = TensorLayout::qubits(&["S", "E1_1", "E1_2"]).unwrap();
        let g = objectivity_operation_sqd(&DensityOperator::maximally_mixed(l), &spec, &["E1"]).unwrap();
        assert!((g.trace() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn isbs_examples() {
        let envs = ["E1", "E2", "E3", "E4"];
        let basis = IsbsBasis::computational("S", 2, &envs).unwrap();
        let mut labels = alloc::vec!["S"];
        labels.extend(envs);
        let layout = TensorLayout::qubits(&labels).unwrap();
        let ghz = PureState::ghz(layout.clone()).unwrap().to_density();
        let g = objectivity_operation_isbs(&ghz, &basis, &envs).unwrap();
        let mut expected = CMatrix::zeros(32, 32);
        expected[(0, 0)] = c(0.5);
        expected[(31, 31)] = c(0.5);
        assert!(max_abs(&(g.matrix() - expected)) < 1e-15);
        let gg = objectivity_operation_isbs(&g, &basis, &envs).unwrap();
        assert!(max_diff(&gg, &g) < 1e-15);

        // |+⟩ on S and two environments
        let l3 = TensorLayout::qubits(&["S", "E1", "E2"]).unwrap();
        let plus = PureState::new(l3, CVector::from_element(8, c(8f64.sqrt().recip())))
            .unwrap()
            .to_density();
        let g = objectivity_operation_isbs(&plus, &basis, &["E1", "E2"]).unwrap();
        assert!((g.trace() - 0.25).abs() < 1e-15);
        assert!((g.matrix()[(0, 0)].re - 0.125).abs() < 1e-15);
        assert!((g.matrix()[(7, 7)].re - 0.125).abs() < 1e-15);
    }

    #[test]
    fn isbs_matches_rank_one_sqd() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let basis = IsbsBasis::computational("S", 2, &["E1", "E2", "E3"]).unwrap();
        let spec = basis.to_subspace_spec().unwrap();
        let l = TensorLayout::qubits(&["S", "E1", "E2", "E3"]).unwrap();
        for frag in [&["E1"][..], &["E1", "E3"], &["E1", "E2", "E3"]] {
            let rho = random_density(&l, &mut rng);
            let a = objectivity_operation_isbs(&rho, &basis, frag).unwrap();
            let b = objectivity_operation_sqd(&rho, &spec, frag).unwrap();
            assert!(max_diff(&a, &b) < 1e-12);
        }
    }

    #[test]
    fn gamma_is_idempotent_and_trace_nonincreasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let spec = parity_spec();
        let l = TensorLayout::qubits(&["S", "E1_1", "E1_2", "E2_1", "E2_2"]).unwrap();
        for frag in [&["E1"][..], &["E2"], &["E1", "E2"]] {
            let rho = random_density(&l, &mut rng);
            let g = objectivity_operation_sqd(&rho, &spec, frag).unwrap();
            let gg = objectivity_operation_sqd(&g, &spec, frag).unwrap();
            assert!(max_diff(&g, &gg) < 1e-12);
            assert!(g.trace() <= rho.trace() + 1e-12);
        }
    }

    #[test]
    fn measure_requires_known_subsystems() {
        let spec = parity_spec();
        let l = TensorLayout::qubits(&["S", "E1_1"]).unwrap();
        let rho = DensityOperator::maximally_mixed(l);
        assert!(nonobjectivity_measure(&rho, &Objectivity::Sqd(spec)).is_err());
    }
}
