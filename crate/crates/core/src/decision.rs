//! Group-level verdicts: openly almost-elliptic or not almost-elliptic.
//!
//! Three presentation kinds are supported: `V ⋊ K` with `V` a vector group,
//! `L ⋊ K` with `L` simply connected solvable, and a general connected group
//! given by its Lie algebra together with a torus of derivations. For the
//! first two, the verdict is trivial-weight-freeness of the torus action; the
//! other equivalent conditions are evaluated by independent routes and any
//! disagreement is an error. For the general kind the semisimple quotient must
//! be of compact type and every layer of the derived series of the radical,
//! with declared compact directions factored out, must be trivial-weight-free.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::ellipticity::{self, SemidirectElement, SemidirectGroup};
use crate::error::{Error, Result};
use crate::lie_algebra::{LieAlgebra, Subspace};
use crate::linalg;
use crate::sampling::{self, DensityReport, Parallelism};
use crate::solvable_group::{SolvablePresentation, SolvablePresentationJson};
use crate::torus_rep::{CompactPart, CompactPartJson, TorusRep, WeightMultiset};

/// Sampled densities at or above this count as "dense".
pub const DENSITY_THRESHOLD: f64 = 0.999;
pub const DERIVATION_TOL: f64 = 1e-8;
pub const INVARIANCE_TOL: f64 = 1e-8;
const PROBE_LEVELS: std::ops::RangeInclusive<u32> = 1..=20;
const PROBE_SAMPLES: usize = 16;
const RAY_LEVELS: std::ops::RangeInclusive<u32> = 12..=20;
const OPENNESS_RADIUS: f64 = 1e-3;
const OPENNESS_SAMPLES: usize = 100;
const OPENNESS_CENTERS: usize = 8;
const OPENNESS_CANDIDATES: usize = 64;
/// Stream offsets keep probe randomness disjoint from the per-sample streams.
const PROBE_STREAM: u64 = 1 << 40;
const OPENNESS_STREAM: u64 = 1 << 41;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    VectorByCompact,
    SolvableByCompact,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    OpenlyAlmostElliptic,
    NotAlmostElliptic,
}

impl Verdict {
    pub fn from_bool(positive: bool) -> Self {
        if positive {
            Verdict::OpenlyAlmostElliptic
        } else {
            Verdict::NotAlmostElliptic
        }
    }

    pub fn is_positive(self) -> bool {
        self == Verdict::OpenlyAlmostElliptic
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    /// `V = R^d` with `d` the dimension of the compact part's representation.
    Vector,
    /// The compact part acts on the Lie algebra of `L` by derivations.
    Solvable(SolvablePresentation),
    /// The compact part acts on `g` by derivations.
    General {
        algebra: LieAlgebra,
        radical: Option<Subspace>,
        /// Declared compact directions, one entry per derived layer of the radical.
        layer_compact_directions: Vec<Subspace>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupPresentation {
    pub name: Option<String>,
    pub body: Body,
    pub compact: CompactPart,
    pub semisimple_part: Option<LieAlgebra>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Condition {
    pub holds: bool,
    pub statement: &'static str,
    pub method: &'static str,
    pub evidence: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct LayerReport {
    pub layer: usize,
    pub dim: usize,
    pub compact_dim: usize,
    pub nc_dim: usize,
    pub weights: WeightMultiset,
    pub trivial_weight_free: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecisionReport {
    pub name: Option<String>,
    pub kind: Kind,
    pub verdict: Verdict,
    pub conditions: BTreeMap<String, Condition>,
    pub layer_reports: Vec<LayerReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampling: Option<DensityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semisimple_compact: Option<bool>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BatteryReport {
    pub name: Option<String>,
    pub kind: Kind,
    pub value: bool,
    pub conditions: BTreeMap<String, Condition>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PermanenceReport {
    pub name: Option<String>,
    pub layer_index: usize,
    pub subgroup_dim: usize,
    pub group: Verdict,
    pub quotient: Verdict,
    pub restricted: Verdict,
    pub consistent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightReport {
    pub weights: WeightMultiset,
    pub fixed_dim: usize,
    pub has_trivial_weight: bool,
    pub layers: Vec<LayerReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PresentationValidation {
    pub kind: Kind,
    pub compact_accepted: bool,
    pub commutation_residual: f64,
    pub skew_residual: f64,
    pub derivation_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jacobi_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub homomorphism_residual: Option<f64>,
    pub accepted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionOptions {
    pub samples: usize,
    pub seed: u64,
    pub translation_scale: f64,
    pub parallelism: Parallelism,
    /// Cross-check the symbolic verdict against the sampled elliptic density.
    pub density_check: bool,
}

impl Default for DecisionOptions {
    fn default() -> Self {
        DecisionOptions {
            samples: 10_000,
            seed: 0,
            translation_scale: 1.0,
            parallelism: Parallelism::default(),
            density_check: true,
        }
    }
}

fn ray_direction(rank: usize) -> Vec<f64> {
    // square roots of distinct squarefree integers are linearly independent over Q
    const SQUAREFREE: [f64; 8] = [1.0, 2.0, 3.0, 5.0, 6.0, 7.0, 10.0, 11.0];
    let raw: Vec<f64> = (0..rank).map(|i| SQUAREFREE[i % SQUAREFREE.len()].sqrt()).collect();
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    raw.into_iter().map(|v| v / norm).collect()
}

/// Torus representation in orthogonal form, averaging an invariant inner
/// product when the given generators are not skew.
fn orthogonal_rep(rank: usize, dim: usize, gens: Vec<DMatrix<f64>>) -> Result<TorusRep> {
    let rep = TorusRep::new(rank, dim, gens)?;
    let v = rep.validate()?;
    if v.commutation_residual > crate::torus_rep::COMMUTATION_TOL {
        return Err(Error::invalid(format!(
            "torus generators do not commute (residual {:e})",
            v.commutation_residual
        )));
    }
    if v.accepted || rank == 0 {
        return Ok(rep);
    }
    Ok(TorusRep::from_commuting_generators(rep.generators().to_vec())?.0)
}

/// Conditions (a)–(e) for a torus representation, each by its own route.
fn rep_conditions(rep: &TorusRep, opts: &DecisionOptions) -> Result<BTreeMap<String, Condition>> {
    let mut out = BTreeMap::new();
    let rank = rep.rank();
    let weights = rep.weights()?;

    let (a_holds, a_evidence) = if rank == 0 {
        let free = rep.fr_membership(&[])?;
        (free, json!({ "rank": 0, "identity_acts_freely": free }))
    } else {
        let d = rep.fr_density_estimate(opts.samples, opts.seed, opts.parallelism)?;
        (d.fraction >= DENSITY_THRESHOLD, serde_json::to_value(&d).expect("serializable"))
    };
    out.insert(
        "a".into(),
        Condition {
            holds: a_holds,
            statement: "elements acting freely on nonzero vectors are dense in K",
            method: "haar_sampling",
            evidence: a_evidence,
        },
    );

    let mut min_members = usize::MAX;
    let mut first_empty = None;
    for k in PROBE_LEVELS {
        let radius = 0.5f64.powi(k as i32);
        let mut rng = sampling::sample_rng(opts.seed, PROBE_STREAM + k as u64);
        let mut members = 0;
        for _ in 0..PROBE_SAMPLES {
            let t: Vec<f64> = (0..rank).map(|_| radius * (2.0 * rng.random::<f64>() - 1.0)).collect();
            if rep.fr_membership(&t)? {
                members += 1;
            }
        }
        min_members = min_members.min(members);
        if members == 0 && first_empty.is_none() {
            first_empty = Some(k);
        }
    }
    out.insert(
        "b".into(),
        Condition {
            holds: first_empty.is_none(),
            statement: "the identity is a cluster point of the freely acting elements",
            method: "shrinking_ball_probe",
            evidence: json!({
                "radii": format!("2^-k, k = {}..{}", PROBE_LEVELS.start(), PROBE_LEVELS.end()),
                "samples_per_ball": PROBE_SAMPLES,
                "min_members": min_members,
                "first_empty_level": first_empty,
            }),
        },
    );

    // A weight space whose character has zero differential is fixed by a
    // neighbourhood of 1, so {det(ρ(t) − 1) = 0} has interior.
    let spaces = rep.weight_spaces()?;
    let scale = rep
        .generators()
        .iter()
        .map(linalg::sigma_max)
        .fold(1.0f64, f64::max);
    let mut constant = 0;
    for ws in &spaces {
        let moving = rep
            .generators()
            .iter()
            .any(|a| linalg::sigma_max_c(&(linalg::to_complex(a) * &ws.basis)) > linalg::RANK_CUTOFF * scale);
        if !moving {
            constant += ws.basis.ncols();
        }
    }
    out.insert(
        "c".into(),
        Condition {
            holds: constant == 0,
            statement: "the torus elements acting freely are dense in the torus",
            method: "weight_space_hyperplanes",
            evidence: json!({
                "weight_spaces": spaces.len(),
                "dimension_with_constant_character": constant,
            }),
        },
    );

    let xi = ray_direction(rank);
    let mut ray_free = Vec::new();
    for k in RAY_LEVELS {
        let s = 0.5f64.powi(k as i32);
        let t: Vec<f64> = xi.iter().map(|v| v * s).collect();
        ray_free.push(rep.fr_membership(&t)?);
    }
    out.insert(
        "d".into(),
        Condition {
            holds: ray_free.iter().all(|&f| f),
            statement: "the identity is a cluster point of the freely acting torus elements",
            method: "generic_ray",
            evidence: json!({
                "direction": xi,
                "levels": format!("2^-k, k = {}..{}", RAY_LEVELS.start(), RAY_LEVELS.end()),
                "free": ray_free,
            }),
        },
    );

    let trivial = rep.has_trivial_weight()?;
    out.insert(
        "e".into(),
        Condition {
            holds: !trivial,
            statement: "all weights are non-trivial",
            method: "weight_multiset",
            evidence: serde_json::to_value(&weights).expect("serializable"),
        },
    );
    Ok(out)
}

fn dump(conditions: &BTreeMap<String, Condition>) -> String {
    serde_json::to_string(conditions).expect("serializable")
}

fn require_all_equal(conditions: &BTreeMap<String, Condition>) -> Result<bool> {
    let mut values = conditions.values().map(|c| c.holds);
    let first = values.next().unwrap_or(true);
    if values.any(|v| v != first) {
        return Err(Error::EquivalenceViolation(dump(conditions)));
    }
    Ok(first)
}

/// Projects the subspace `top ⊖ next` out of `top` and returns an orthonormal basis.
fn layer_basis(top: &Subspace, next: &Subspace) -> Result<DMatrix<f64>> {
    let n = top.ambient_dim();
    let proj = DMatrix::identity(n, n) - next.basis() * next.basis().transpose();
    linalg::column_space(&(proj * top.basis()))
}

struct LayerAnalysis {
    reports: Vec<LayerReport>,
    warnings: Vec<String>,
}

fn check_derivations(algebra: &LieAlgebra, derivations: &[DMatrix<f64>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, d) in derivations.iter().enumerate() {
        if d.nrows() != algebra.dim() || d.ncols() != algebra.dim() {
            return Err(Error::DimensionMismatch {
                expected: algebra.dim(),
                found: d.nrows(),
            });
        }
        let r = algebra.derivation_residual(d);
        if r > DERIVATION_TOL * linalg::max_abs(d).max(1.0) {
            return Err(Error::invalid(format!(
                "torus generator {i} is not a derivation (residual {r:e})"
            )));
        }
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Induced torus actions on the layers `D^k / D^{k+1}` of the derived series
/// of `radical`, with declared compact directions factored out.
fn analyze_layers(
    algebra: &LieAlgebra,
    derivations: &[DMatrix<f64>],
    radical: &Subspace,
    compact_dirs: &[Subspace],
) -> Result<LayerAnalysis> {
    let rank = derivations.len();
    let series = algebra.derived_series_from(radical)?;
    if !series.solvable {
        return Err(Error::invalid("declared radical is not solvable"));
    }
    let terms = &series.terms;
    let layer_count = series.nonzero_terms().len();
    if compact_dirs.len() > layer_count {
        return Err(Error::invalid(format!(
            "{} layers of compact directions declared, but the radical has {layer_count} derived layers",
            compact_dirs.len()
        )));
    }
    let mut reports = Vec::new();
    let mut warnings = Vec::new();
    for k in 0..layer_count {
        let q = layer_basis(&terms[k], &terms[k + 1])?;
        let dim = q.ncols();
        let induced: Vec<DMatrix<f64>> = derivations.iter().map(|d| q.transpose() * d * &q).collect();
        let (nc_basis, compact_dim) = match compact_dirs.get(k) {
            Some(c) if c.dim() > 0 => {
                if !terms[k].contains(c, INVARIANCE_TOL) {
                    return Err(Error::invalid(format!(
                        "declared compact directions of layer {k} are not contained in the layer"
                    )));
                }
                let cq = linalg::column_space(&(q.transpose() * c.basis()))?;
                for b in &induced {
                    let leak = (DMatrix::identity(dim, dim) - &cq * cq.transpose()) * b * &cq;
                    if linalg::max_abs(&leak) > INVARIANCE_TOL * linalg::max_abs(b).max(1.0) {
                        return Err(Error::invalid(format!(
                            "declared compact directions of layer {k} are not invariant under the torus"
                        )));
                    }
                }
                (linalg::orthogonal_complement(&cq, dim)?, cq.ncols())
            }
            _ => (DMatrix::identity(dim, dim), 0),
        };
        let nc_dim = nc_basis.ncols();
        let gens: Vec<DMatrix<f64>> = induced.iter().map(|b| nc_basis.transpose() * b * &nc_basis).collect();
        let rep = orthogonal_rep(rank, nc_dim, gens)?;
        let weights = rep.weights()?;
        let twf = !rep.has_trivial_weight()?;
        if !twf {
            let fixed = rep.fixed_dim()?;
            warnings.push(format!(
                "layer {k}: {fixed}-dimensional subspace fixed by the torus; if it comes from a compact factor, declare it in layer_compact_directions"
            ));
        }
        reports.push(LayerReport {
            layer: k,
            dim,
            compact_dim,
            nc_dim,
            weights,
            trivial_weight_free: twf,
        });
    }
    Ok(LayerAnalysis { reports, warnings })
}

/// Probe for openness: around sampled elliptic elements, every nearby element is elliptic.
fn openness_probe(group: SemidirectGroup<'_>, opts: &DecisionOptions) -> Result<Condition> {
    let dim = group.translation_dim();
    let rank = group.torus_rank();
    let mut centers = Vec::new();
    for i in 0..OPENNESS_CANDIDATES as u64 {
        if centers.len() == OPENNESS_CENTERS {
            break;
        }
        let mut rng = sampling::sample_rng(opts.seed, OPENNESS_STREAM + i);
        let e = SemidirectElement {
            translation: (0..dim)
                .map(|_| opts.translation_scale * rng.sample::<f64, _>(StandardNormal))
                .collect(),
            torus: (0..rank).map(|_| rng.random::<f64>()).collect(),
            component: None,
        };
        match group.is_elliptic(&e) {
            Ok(v) if v.elliptic => centers.push(e),
            Ok(_) | Err(Error::Undetermined { .. }) | Err(Error::NoConvergence { .. }) => {}
            Err(err) => return Err(err),
        }
    }
    let mut fractions = Vec::new();
    for (i, c) in centers.iter().enumerate() {
        let d = ellipticity::local_elliptic_density(
            group,
            c,
            OPENNESS_RADIUS,
            OPENNESS_SAMPLES,
            opts.seed.wrapping_add(i as u64 + 1),
            opts.parallelism,
        )?;
        fractions.push((d.fraction, d.undetermined));
    }
    let holds = !centers.is_empty() && fractions.iter().all(|&(f, u)| f == 1.0 && u == 0);
    Ok(Condition {
        holds,
        statement: "G is openly almost-elliptic",
        method: "local_density_around_elliptic_samples",
        evidence: json!({
            "centers": centers.len(),
            "radius": OPENNESS_RADIUS,
            "samples_per_center": OPENNESS_SAMPLES,
            "fractions": fractions.iter().map(|f| f.0).collect::<Vec<_>>(),
        }),
    })
}

fn density_condition(d: &DensityReport) -> Condition {
    Condition {
        holds: d.fraction >= DENSITY_THRESHOLD && d.undetermined == 0,
        statement: "G is almost-elliptic",
        method: "elliptic_density",
        evidence: serde_json::to_value(d).expect("serializable"),
    }
}

impl GroupPresentation {
    pub fn vector(compact: CompactPart) -> Self {
        GroupPresentation {
            name: None,
            body: Body::Vector,
            compact,
            semisimple_part: None,
        }
    }

    pub fn solvable(presentation: SolvablePresentation, action: CompactPart) -> Self {
        GroupPresentation {
            name: None,
            body: Body::Solvable(presentation),
            compact: action,
            semisimple_part: None,
        }
    }

    pub fn general(algebra: LieAlgebra, derivations: TorusRep) -> Self {
        GroupPresentation {
            name: None,
            body: Body::General {
                algebra,
                radical: None,
                layer_compact_directions: Vec::new(),
            },
            compact: CompactPart::connected(derivations),
            semisimple_part: None,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_layer_compact_directions(mut self, dirs: Vec<Subspace>) -> Self {
        if let Body::General {
            layer_compact_directions,
            ..
        } = &mut self.body
        {
            *layer_compact_directions = dirs;
        }
        self
    }

    pub fn kind(&self) -> Kind {
        match self.body {
            Body::Vector => Kind::VectorByCompact,
            Body::Solvable(_) => Kind::SolvableByCompact,
            Body::General { .. } => Kind::General,
        }
    }

    /// The solvable group, for the solvable kind.
    pub fn solvable_presentation(&self) -> Option<&SolvablePresentation> {
        match &self.body {
            Body::Solvable(p) => Some(p),
            _ => None,
        }
    }

    /// Dimension of the space the compact part acts on.
    pub fn acted_dim(&self) -> usize {
        match &self.body {
            Body::Vector => self.compact.torus.dim(),
            Body::Solvable(p) => p.dim(),
            Body::General { algebra, .. } => algebra.dim(),
        }
    }

    fn semidirect(&self) -> Option<SemidirectGroup<'_>> {
        match &self.body {
            Body::Vector => Some(SemidirectGroup::Vector(&self.compact)),
            Body::Solvable(p) => Some(SemidirectGroup::Solvable {
                presentation: p,
                action: &self.compact,
            }),
            Body::General { .. } => None,
        }
    }

    /// Algebra, derivations, radical and declared compact directions as general data.
    fn general_view(&self) -> Result<(LieAlgebra, Vec<DMatrix<f64>>, Subspace, Vec<Subspace>)> {
        let gens = self.compact.torus.generators().to_vec();
        match &self.body {
            Body::Vector => {
                let n = self.compact.torus.dim();
                Ok((LieAlgebra::abelian(n), gens, Subspace::full(n), Vec::new()))
            }
            Body::Solvable(p) => Ok((p.algebra().clone(), gens, Subspace::full(p.dim()), Vec::new())),
            Body::General {
                algebra,
                radical,
                layer_compact_directions,
            } => {
                let computed = algebra.radical()?;
                let radical = match radical {
                    Some(r) => {
                        if r.ambient_dim() != algebra.dim() {
                            return Err(Error::DimensionMismatch {
                                expected: algebra.dim(),
                                found: r.ambient_dim(),
                            });
                        }
                        if r.dim() != computed.dim() || !computed.contains(r, 1e-8) {
                            return Err(Error::invalid(format!(
                                "declared radical (dim {}) differs from the computed radical (dim {})",
                                r.dim(),
                                computed.dim()
                            )));
                        }
                        r.clone()
                    }
                    None => computed,
                };
                Ok((algebra.clone(), gens, radical, layer_compact_directions.clone()))
            }
        }
    }

    pub fn validate(&self) -> Result<PresentationValidation> {
        let n = self.acted_dim();
        if self.compact.torus.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.compact.torus.dim(),
            });
        }
        let cv = self.compact.validate()?;
        let (derivation_residual, jacobi, hom, body_ok) = match &self.body {
            Body::Vector => (0.0, None, None, true),
            Body::Solvable(p) => {
                let r = check_derivations(p.algebra(), self.compact.torus.generators())?;
                let v = p.validate()?;
                (r, None, Some(v.homomorphism_residual), v.accepted)
            }
            Body::General { algebra, .. } => {
                let v = algebra.validate();
                let r = check_derivations(algebra, self.compact.torus.generators())?;
                (r, Some(v.jacobi_residual), None, v.accepted)
            }
        };
        // derivations need not be skew in the given basis; only commutation and integrality matter there
        let compact_ok = match self.body {
            Body::Vector => cv.accepted,
            _ => cv.torus.commutation_residual <= crate::torus_rep::COMMUTATION_TOL,
        };
        Ok(PresentationValidation {
            kind: self.kind(),
            compact_accepted: compact_ok,
            commutation_residual: cv.torus.commutation_residual,
            skew_residual: cv.torus.skew_residual,
            derivation_residual,
            jacobi_residual: jacobi,
            homomorphism_residual: hom,
            accepted: compact_ok && body_ok,
        })
    }

    fn require_valid(&self) -> Result<()> {
        let v = self.validate()?;
        if !v.accepted {
            return Err(Error::invalid(format!(
                "presentation failed validation: {}",
                serde_json::to_string(&v).expect("serializable")
            )));
        }
        Ok(())
    }

    fn require_connected(&self) -> Result<()> {
        if !self.compact.is_connected() {
            return Err(Error::DisconnectedCompactPart {
                components: self.compact.components.len(),
            });
        }
        Ok(())
    }

    fn semisimple_part_compact(&self) -> Result<Option<bool>> {
        self.semisimple_part
            .as_ref()
            .map(|s| if s.dim() == 0 { Ok(true) } else { s.is_compact_type() })
            .transpose()
    }

    pub fn decide(&self, opts: &DecisionOptions) -> Result<DecisionReport> {
        match self.kind() {
            Kind::VectorByCompact => self.decide_vector_by_compact(opts),
            Kind::SolvableByCompact => self.decide_solvable_by_compact(opts),
            Kind::General => self.decide_general(opts),
        }
    }

    fn decide_semidirect(&self, opts: &DecisionOptions) -> Result<DecisionReport> {
        self.require_connected()?;
        self.require_valid()?;
        let n = self.acted_dim();
        let rep = orthogonal_rep(
            self.compact.torus.rank(),
            n,
            self.compact.torus.generators().to_vec(),
        )?;
        let conditions = rep_conditions(&rep, opts)?;
        let positive = conditions["e"].holds;
        require_all_equal(&conditions)?;

        let (algebra, gens, radical, dirs) = self.general_view()?;
        let layers = analyze_layers(&algebra, &gens, &radical, &dirs)?;
        let layer_positive = layers.reports.iter().all(|l| l.trivial_weight_free);
        if layer_positive != positive {
            return Err(Error::InternalDisagreement(format!(
                "weights on the whole algebra say {positive}, layer-wise weights say {layer_positive}"
            )));
        }

        let sampling = if opts.density_check {
            let group = self.semidirect().expect("semidirect kind");
            let d = ellipticity::elliptic_density(group, opts.samples, opts.seed, opts.translation_scale, opts.parallelism)?;
            let sampled = d.fraction >= DENSITY_THRESHOLD && d.undetermined == 0;
            if sampled != positive {
                return Err(Error::EquivalenceViolation(format!(
                    "symbolic verdict {positive} but sampled elliptic density {} with {} undetermined",
                    d.fraction, d.undetermined
                )));
            }
            Some(d)
        } else {
            None
        };
        let semisimple_compact = self.semisimple_part_compact()?;
        if semisimple_compact == Some(false) {
            return Err(Error::invalid("the semisimple part of a compact factor must be of compact type"));
        }
        Ok(DecisionReport {
            name: self.name.clone(),
            kind: self.kind(),
            verdict: Verdict::from_bool(positive),
            conditions,
            layer_reports: layers.reports,
            sampling,
            semisimple_compact,
            warnings: Vec::new(),
        })
    }

    /// `V ⋊ K`: openly almost-elliptic iff no weight of `K` on `V` is trivial.
    pub fn decide_vector_by_compact(&self, opts: &DecisionOptions) -> Result<DecisionReport> {
        if self.kind() != Kind::VectorByCompact {
            return Err(Error::precondition("presentation is not of kind vector_by_compact"));
        }
        self.decide_semidirect(opts)
    }

    /// `L ⋊ K`: openly almost-elliptic iff no weight of `K` on the Lie algebra of `L` is trivial.
    pub fn decide_solvable_by_compact(&self, opts: &DecisionOptions) -> Result<DecisionReport> {
        if self.kind() != Kind::SolvableByCompact {
            return Err(Error::precondition("presentation is not of kind solvable_by_compact"));
        }
        self.decide_semidirect(opts)
    }

    /// General connected group: compact semisimple quotient and
    /// trivial-weight-free non-compact parts of all radical layers.
    pub fn decide_general(&self, _opts: &DecisionOptions) -> Result<DecisionReport> {
        if self.kind() != Kind::General {
            return Err(Error::precondition("presentation is not of kind general"));
        }
        self.require_connected()?;
        self.require_valid()?;
        let (algebra, gens, radical, dirs) = self.general_view()?;
        let quotient = algebra.quotient(&radical)?;
        let ss_compact = quotient.algebra.dim() == 0 || quotient.algebra.is_compact_type()?;
        if let Some(declared) = self.semisimple_part_compact()? {
            if declared != ss_compact {
                return Err(Error::invalid(format!(
                    "declared semisimple part has compact type {declared}, but g/rad has compact type {ss_compact}"
                )));
            }
        }
        let layers = analyze_layers(&algebra, &gens, &radical, &dirs)?;
        let layers_ok = layers.reports.iter().all(|l| l.trivial_weight_free);
        let mut conditions = BTreeMap::new();
        conditions.insert(
            "a".into(),
            Condition {
                holds: ss_compact,
                statement: "the semisimple quotient is compact",
                method: "killing_form_of_quotient_by_radical",
                evidence: json!({
                    "radical_dim": radical.dim(),
                    "quotient_dim": quotient.algebra.dim(),
                    "killing_eigenvalues": quotient.algebra.killing_form().eigenvalues(),
                }),
            },
        );
        conditions.insert(
            "b".into(),
            Condition {
                holds: layers_ok,
                statement: "the non-compact parts of the radical layers are trivial-weight-free",
                method: "layer_weights",
                evidence: json!({
                    "layers": layers.reports.len(),
                    "failing_layers": layers
                        .reports
                        .iter()
                        .filter(|l| !l.trivial_weight_free)
                        .map(|l| l.layer)
                        .collect::<Vec<_>>(),
                }),
            },
        );
        Ok(DecisionReport {
            name: self.name.clone(),
            kind: Kind::General,
            verdict: Verdict::from_bool(ss_compact && layers_ok),
            conditions,
            layer_reports: layers.reports,
            sampling: None,
            semisimple_compact: Some(ss_compact),
            warnings: layers.warnings,
        })
    }

    /// Weights of the torus on the acted-on space and on each radical layer.
    pub fn weight_report(&self) -> Result<WeightReport> {
        let (algebra, gens, radical, dirs) = self.general_view()?;
        let rep = orthogonal_rep(self.compact.torus.rank(), self.acted_dim(), gens.clone())?;
        let layers = analyze_layers(&algebra, &gens, &radical, &dirs)?;
        Ok(WeightReport {
            weights: rep.weights()?,
            fixed_dim: rep.fixed_dim()?,
            has_trivial_weight: rep.has_trivial_weight()?,
            layers: layers.reports,
        })
    }

    /// Evaluates conditions (a)–(g) independently and requires them to agree.
    pub fn equivalence_battery(&self, opts: &DecisionOptions) -> Result<BatteryReport> {
        let group = self
            .semidirect()
            .ok_or_else(|| Error::precondition("the equivalence battery needs a vector_by_compact or solvable_by_compact presentation"))?;
        self.require_connected()?;
        self.require_valid()?;
        let rep = orthogonal_rep(
            self.compact.torus.rank(),
            self.acted_dim(),
            self.compact.torus.generators().to_vec(),
        )?;
        let mut conditions = rep_conditions(&rep, opts)?;
        let d = ellipticity::elliptic_density(group, opts.samples, opts.seed, opts.translation_scale, opts.parallelism)?;
        conditions.insert("f".into(), density_condition(&d));
        conditions.insert("g".into(), openness_probe(group, opts)?);
        let value = require_all_equal(&conditions)?;
        Ok(BatteryReport {
            name: self.name.clone(),
            kind: self.kind(),
            value,
            conditions,
        })
    }

    /// Compares the verdicts for `G`, `G/L` and `L ⋊ K`, where `L` is the
    /// derived term of index `layer_index` of the radical, which must be abelian.
    pub fn permanence_check(&self, layer_index: usize, opts: &DecisionOptions) -> Result<PermanenceReport> {
        if self.kind() == Kind::VectorByCompact {
            return Err(Error::precondition("permanence needs a solvable_by_compact or general presentation"));
        }
        self.require_connected()?;
        let (algebra, gens, radical, dirs) = self.general_view()?;
        let series = algebra.derived_series_from(&radical)?;
        let term = series.terms.get(layer_index).ok_or_else(|| {
            Error::precondition(format!(
                "layer index {layer_index} out of range ({} derived terms)",
                series.terms.len()
            ))
        })?;
        if algebra.bracket_span(term, term)?.dim() != 0 {
            return Err(Error::precondition(format!(
                "derived term {layer_index} is not abelian, so it is not a vector group"
            )));
        }
        let l = term.clone();
        let rank = self.compact.torus.rank();
        let sub_opts = DecisionOptions {
            density_check: false,
            ..*opts
        };
        let group = self.decide(&sub_opts)?.verdict;

        let q = algebra.quotient(&l)?;
        let q_gens: Vec<DMatrix<f64>> = gens.iter().map(|d| q.induced(d)).collect();
        let q_radical = Subspace::span(q.algebra.dim(), &(q.complement.basis().transpose() * radical.basis()))?;
        let q_dirs = dirs
            .iter()
            .take(layer_index)
            .map(|c| Subspace::span(q.algebra.dim(), &(q.complement.basis().transpose() * c.basis())))
            .collect::<Result<Vec<_>>>()?;
        let quotient = GroupPresentation {
            name: None,
            body: Body::General {
                algebra: q.algebra.clone(),
                radical: Some(q_radical),
                layer_compact_directions: q_dirs,
            },
            compact: CompactPart::connected(TorusRep::new(rank, q.algebra.dim(), q_gens)?),
            semisimple_part: None,
        };
        let quotient_verdict = quotient.decide_general(&sub_opts)?.verdict;

        let lb = l.basis();
        let restricted_gens: Vec<DMatrix<f64>> = gens.iter().map(|d| lb.transpose() * d * lb).collect();
        let (nc_basis, _) = match dirs.get(layer_index) {
            Some(c) if c.dim() > 0 => {
                let cl = linalg::column_space(&(lb.transpose() * c.basis()))?;
                (linalg::orthogonal_complement(&cl, l.dim())?, cl.ncols())
            }
            _ => (DMatrix::identity(l.dim(), l.dim()), 0),
        };
        let nc_gens: Vec<DMatrix<f64>> = restricted_gens
            .iter()
            .map(|b| nc_basis.transpose() * b * &nc_basis)
            .collect();
        let restricted = GroupPresentation::vector(CompactPart::connected(orthogonal_rep(
            rank,
            nc_basis.ncols(),
            nc_gens,
        )?));
        let restricted_verdict = restricted.decide_vector_by_compact(&sub_opts)?.verdict;

        let consistent =
            group.is_positive() == (quotient_verdict.is_positive() && restricted_verdict.is_positive());
        if !consistent {
            return Err(Error::EquivalenceViolation(format!(
                "G is {group:?}, G/L is {quotient_verdict:?}, L ⋊ K is {restricted_verdict:?}"
            )));
        }
        Ok(PermanenceReport {
            name: self.name.clone(),
            layer_index,
            subgroup_dim: l.dim(),
            group,
            quotient: quotient_verdict,
            restricted: restricted_verdict,
            consistent,
        })
    }

    /// The same group in the basis `f_a = Σ_i p[i][a] e_i` of the acted-on space.
    pub fn change_basis(&self, p: &DMatrix<f64>) -> Result<GroupPresentation> {
        let n = self.acted_dim();
        if p.nrows() != n || p.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.nrows(),
            });
        }
        let p_inv = p
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::precondition("change of basis is singular"))?;
        let torus = self.compact.torus.conjugated(&p_inv)?;
        let components = self.compact.components.iter().map(|g| &p_inv * g * p).collect();
        let move_sub = |s: &Subspace| Subspace::span(n, &(&p_inv * s.basis()));
        let body = match &self.body {
            Body::Vector => Body::Vector,
            Body::Solvable(_) => {
                return Err(Error::precondition(
                    "basis changes of solvable presentations would also need a new adapted order",
                ))
            }
            Body::General {
                algebra,
                radical,
                layer_compact_directions,
            } => Body::General {
                algebra: algebra.change_basis(p)?,
                radical: radical.as_ref().map(move_sub).transpose()?,
                layer_compact_directions: layer_compact_directions
                    .iter()
                    .map(move_sub)
                    .collect::<Result<Vec<_>>>()?,
            },
        };
        Ok(GroupPresentation {
            name: self.name.clone(),
            body,
            compact: CompactPart { torus, components },
            semisimple_part: self.semisimple_part.clone(),
        })
    }

    /// Replaces the torus generators by `B_j = Σ_i m[i][j] A_i`.
    pub fn reparameterize_torus(&self, m: &[Vec<i64>]) -> Result<GroupPresentation> {
        Ok(GroupPresentation {
            compact: CompactPart {
                torus: self.compact.torus.recombined(m)?,
                components: self.compact.components.clone(),
            },
            ..self.clone()
        })
    }
}

/// Wire form. `kind` selects which of `solvable` / `algebra` must be present.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupPresentationJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub kind: Kind,
    pub compact: CompactPartJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solvable: Option<SolvablePresentationJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<LieAlgebra>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radical: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub layer_compact_directions: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semisimple_part: Option<LieAlgebra>,
}

impl TryFrom<GroupPresentationJson> for GroupPresentation {
    type Error = Error;

    fn try_from(j: GroupPresentationJson) -> Result<Self> {
        let compact = CompactPart::try_from(j.compact)?;
        let body = match j.kind {
            Kind::VectorByCompact => {
                if let Some(d) = j.vector_dim {
                    if d != compact.torus.dim() {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            found: compact.torus.dim(),
                        });
                    }
                }
                Body::Vector
            }
            Kind::SolvableByCompact => {
                let s = j
                    .solvable
                    .ok_or_else(|| Error::invalid("kind solvable_by_compact needs a `solvable` field"))?;
                Body::Solvable(SolvablePresentation::try_from(s)?)
            }
            Kind::General => {
                let algebra = j
                    .algebra
                    .ok_or_else(|| Error::invalid("kind general needs an `algebra` field"))?;
                let n = algebra.dim();
                let radical = j.radical.map(|r| Subspace::from_vectors(n, &r)).transpose()?;
                let dirs = j
                    .layer_compact_directions
                    .iter()
                    .map(|vs| Subspace::from_vectors(n, vs))
                    .collect::<Result<Vec<_>>>()?;
                Body::General {
                    algebra,
                    radical,
                    layer_compact_directions: dirs,
                }
            }
        };
        Ok(GroupPresentation {
            name: j.name,
            body,
            compact,
            semisimple_part: j.semisimple_part,
        })
    }
}

impl From<&GroupPresentation> for GroupPresentationJson {
    fn from(g: &GroupPresentation) -> Self {
        let mut j = GroupPresentationJson {
            name: g.name.clone(),
            kind: g.kind(),
            compact: CompactPartJson::from(&g.compact),
            vector_dim: None,
            solvable: None,
            algebra: None,
            radical: None,
            layer_compact_directions: Vec::new(),
            semisimple_part: g.semisimple_part.clone(),
        };
        match &g.body {
            Body::Vector => j.vector_dim = Some(g.compact.torus.dim()),
            Body::Solvable(p) => j.solvable = Some(SolvablePresentationJson::from(p)),
            Body::General {
                algebra,
                radical,
                layer_compact_directions,
            } => {
                j.algebra = Some(algebra.clone());
                j.radical = radical.as_ref().map(Subspace::basis_vectors);
                j.layer_compact_directions = layer_compact_directions.iter().map(Subspace::basis_vectors).collect();
            }
        }
        j
    }
}

impl Serialize for GroupPresentation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GroupPresentationJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupPresentation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        GroupPresentation::try_from(GroupPresentationJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Translation vector as a column; helper for callers building elements.
pub fn column(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}
