//! Torus representations `rho(t) = exp(sum_i 2π t_i A_i)` on `R^n`.
//!
//! Generators are commuting real matrices with spectrum in `iZ`. Validated
//! representations are orthogonal (skew generators); arbitrary commuting
//! semisimple generators can be brought to that form with
//! [`TorusRep::from_commuting_generators`], which averages an inner product
//! over a 64-point-per-circle grid of the torus.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Schur};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::sampling::{self, DensityReport, Parallelism, SamplerSpec};

pub const COMMUTATION_TOL: f64 = 1e-10;
pub const SKEW_TOL: f64 = 1e-10;
pub const INTEGRALITY_TOL: f64 = 1e-6;
/// Cutoff on the smallest singular value of `rho(t) - 1` for free action.
pub const FREE_ACTION_TOL: f64 = 1e-8;
pub const ORTHOGONALITY_TOL: f64 = 1e-10;
pub const NORMALIZER_TOL: f64 = 1e-8;
/// Grid points per circle used when averaging an invariant inner product.
pub const AVERAGING_GRID: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct TorusRep {
    rank: usize,
    dim: usize,
    generators: Vec<DMatrix<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorusValidation {
    pub commutation_residual: f64,
    pub skew_residual: f64,
    pub integrality_residual: f64,
    pub accepted: bool,
}

/// One isotypic piece of the complexified representation.
#[derive(Debug, Clone)]
pub struct WeightSpace {
    pub weight: Vec<i64>,
    /// Orthonormal basis (columns) of the weight space in `C^n`.
    pub basis: DMatrix<C64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightEntry {
    pub weight: Vec<i64>,
    pub multiplicity: usize,
}

/// Weights with multiplicities, sorted lexicographically by weight.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct WeightMultiset {
    pub entries: Vec<WeightEntry>,
}

impl WeightMultiset {
    fn from_counts(counts: BTreeMap<Vec<i64>, usize>) -> Self {
        WeightMultiset {
            entries: counts
                .into_iter()
                .map(|(weight, multiplicity)| WeightEntry {
                    weight,
                    multiplicity,
                })
                .collect(),
        }
    }

    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    pub fn multiplicity(&self, weight: &[i64]) -> usize {
        self.entries
            .iter()
            .find(|e| e.weight == weight)
            .map_or(0, |e| e.multiplicity)
    }

    pub fn has_zero(&self) -> bool {
        self.entries
            .iter()
            .any(|e| e.weight.iter().all(|&w| w == 0))
    }

    pub fn is_negation_closed(&self) -> bool {
        self.entries.iter().all(|e| {
            let neg: Vec<i64> = e.weight.iter().map(|w| -w).collect();
            self.multiplicity(&neg) == e.multiplicity
        })
    }

    /// Distinct weights, as tuples.
    pub fn weights(&self) -> impl Iterator<Item = &[i64]> {
        self.entries.iter().map(|e| e.weight.as_slice())
    }

    /// Smallest `|e^{2πi w·t} - 1|` over the weights (infinite when there are none).
    pub fn min_character_gap(&self, t: &[f64]) -> f64 {
        self.weights()
            .map(|w| {
                let phase: f64 = w.iter().zip(t).map(|(&wi, &ti)| wi as f64 * ti).sum();
                2.0 * (std::f64::consts::PI * phase).sin().abs()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

impl TorusRep {
    pub fn new(rank: usize, dim: usize, generators: Vec<DMatrix<f64>>) -> Result<Self> {
        if generators.len() != rank {
            return Err(Error::DimensionMismatch {
                expected: rank,
                found: generators.len(),
            });
        }
        for g in &generators {
            if g.nrows() != dim || g.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: g.nrows().max(g.ncols()),
                });
            }
        }
        Ok(TorusRep {
            rank,
            dim,
            generators,
        })
    }

    /// Trivial torus of rank 0 on `R^dim`.
    pub fn trivial(dim: usize) -> Self {
        TorusRep {
            rank: 0,
            dim,
            generators: Vec::new(),
        }
    }

    /// Orthogonal sum of rotation planes with the given integer weight
    /// vectors, followed by `trivial_lines` fixed lines.
    pub fn from_blocks(rank: usize, planes: &[Vec<i64>], trivial_lines: usize) -> Result<Self> {
        let dim = 2 * planes.len() + trivial_lines;
        let mut gens = vec![DMatrix::zeros(dim, dim); rank];
        for (b, w) in planes.iter().enumerate() {
            if w.len() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    found: w.len(),
                });
            }
            for (i, &wi) in w.iter().enumerate() {
                gens[i][(2 * b, 2 * b + 1)] = -(wi as f64);
                gens[i][(2 * b + 1, 2 * b)] = wi as f64;
            }
        }
        TorusRep::new(rank, dim, gens)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[DMatrix<f64>] {
        &self.generators
    }

    /// Conjugates every generator by an invertible `p`: `A_i -> p A_i p^{-1}`.
    pub fn conjugated(&self, p: &DMatrix<f64>) -> Result<TorusRep> {
        let inv = p
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::precondition("conjugating matrix is singular"))?;
        TorusRep::new(
            self.rank,
            self.dim,
            self.generators.iter().map(|a| p * a * &inv).collect(),
        )
    }

    /// Replaces the generators by `B_j = sum_i m[i][j] A_i` (a reparameterization of the torus
    /// when `m` is unimodular).
    pub fn recombined(&self, m: &[Vec<i64>]) -> Result<TorusRep> {
        let r = self.rank;
        if m.len() != r || m.iter().any(|row| row.len() != r) {
            return Err(Error::DimensionMismatch {
                expected: r,
                found: m.len(),
            });
        }
        let gens = (0..r)
            .map(|j| {
                let mut b = DMatrix::zeros(self.dim, self.dim);
                for (i, a) in self.generators.iter().enumerate() {
                    b += a * m[i][j] as f64;
                }
                b
            })
            .collect();
        TorusRep::new(r, self.dim, gens)
    }

    pub fn validate(&self) -> Result<TorusValidation> {
        let mut comm: f64 = 0.0;
        for i in 0..self.rank {
            for j in (i + 1)..self.rank {
                let c = linalg::commutator(&self.generators[i], &self.generators[j]);
                comm = comm.max(linalg::max_abs(&c));
            }
        }
        let skew = self
            .generators
            .iter()
            .map(|a| linalg::max_abs(&(a + a.transpose())))
            .fold(0.0, f64::max);
        let integrality = self.integrality_residual()?;
        Ok(TorusValidation {
            commutation_residual: comm,
            skew_residual: skew,
            integrality_residual: integrality,
            accepted: comm <= COMMUTATION_TOL && skew <= SKEW_TOL,
        })
    }

    fn integrality_residual(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        if self.dim == 0 {
            return Ok(0.0);
        }
        for (g, a) in self.generators.iter().enumerate() {
            let ev = Schur::new(a.clone()).complex_eigenvalues();
            for z in ev.iter() {
                let miss = z.re.abs().max((z.im - z.im.round()).abs());
                if miss > INTEGRALITY_TOL {
                    return Err(Error::NonIntegralGenerator {
                        generator: g,
                        re: z.re,
                        im: z.im,
                    });
                }
                worst = worst.max(miss);
            }
        }
        Ok(worst)
    }

    /// Simultaneous unitary diagonalization of the generators over `C`.
    ///
    /// The Hermitian matrices `-i A_k` are diagonalized one after another,
    /// each restricted to the joint eigenspaces found so far; eigenvalues are
    /// integers for a genuine torus action and group the eigenvectors.
    pub fn weight_spaces(&self) -> Result<Vec<WeightSpace>> {
        let n = self.dim;
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut blocks = vec![(Vec::<i64>::new(), DMatrix::<C64>::identity(n, n))];
        let minus_i = C64::new(0.0, -1.0);
        for a in &self.generators {
            let h = linalg::to_complex(a) * minus_i;
            let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
            let mut next = Vec::new();
            for (w, q) in blocks {
                let restricted = q.adjoint() * &h * &q;
                let restricted = (&restricted + restricted.adjoint()) * C64::new(0.5, 0.0);
                let eig = restricted.symmetric_eigen();
                let mut groups: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
                for (idx, &ev) in eig.eigenvalues.iter().enumerate() {
                    let m = ev.round();
                    if (ev - m).abs() > INTEGRALITY_TOL {
                        let mut tuple: Vec<f64> = w.iter().map(|&x| x as f64).collect();
                        tuple.push(ev);
                        return Err(Error::WeightRoundingAmbiguity {
                            tuple,
                            distance: (ev - m).abs(),
                        });
                    }
                    groups.entry(m as i64).or_default().push(idx);
                }
                for (m, idxs) in groups {
                    let cols: Vec<_> = idxs
                        .iter()
                        .map(|&i| eig.eigenvectors.column(i).into_owned())
                        .collect();
                    let v = DMatrix::from_columns(&cols);
                    let mut wm = w.clone();
                    wm.push(m);
                    next.push((wm, &q * v));
                }
            }
            blocks = next;
        }
        Ok(blocks
            .into_iter()
            .map(|(weight, basis)| WeightSpace { weight, basis })
            .collect())
    }

    pub fn weights(&self) -> Result<WeightMultiset> {
        let mut counts: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
        for ws in self.weight_spaces()? {
            *counts.entry(ws.weight).or_default() += ws.basis.ncols();
        }
        Ok(WeightMultiset::from_counts(counts))
    }

    /// Dimension of the joint kernel of the generators.
    pub fn fixed_dim(&self) -> Result<usize> {
        if self.rank == 0 {
            return Ok(self.dim);
        }
        let stacked = DMatrix::from_fn(self.rank * self.dim, self.dim, |r, c| {
            self.generators[r / self.dim][(r % self.dim, c)]
        });
        Ok(self.dim - linalg::rank_split(&stacked)?)
    }

    /// Whether the zero weight occurs, computed from the weight multiset and
    /// from the joint kernel; the two must agree.
    pub fn has_trivial_weight(&self) -> Result<bool> {
        let by_weights = self.weights()?.has_zero();
        let by_kernel = self.fixed_dim()? > 0;
        if by_weights != by_kernel {
            return Err(Error::InternalDisagreement(format!(
                "trivial weight: weight multiset says {by_weights}, joint kernel says {by_kernel}"
            )));
        }
        Ok(by_weights)
    }

    fn check_torus_point(&self, t: &[f64]) -> Result<()> {
        if t.len() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: t.len(),
            });
        }
        Ok(())
    }

    /// `exp(sum_i 2π t_i A_i)`, with `t` reduced modulo `Z^r` first.
    pub fn rho(&self, t: &[f64]) -> Result<DMatrix<f64>> {
        self.check_torus_point(t)?;
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (a, &ti) in self.generators.iter().zip(t) {
            let reduced = ti - ti.floor();
            m += a * (std::f64::consts::TAU * reduced);
        }
        Ok(linalg::expm(&m))
    }

    /// Whether `rho(t) - 1` is invertible, computed from singular values and
    /// from the weights (`w·t ∉ Z` for all weights); the two must agree.
    pub fn fr_membership(&self, t: &[f64]) -> Result<bool> {
        let weights = self.weights()?;
        self.fr_membership_with(&weights, t)
    }

    pub(crate) fn fr_membership_with(&self, weights: &WeightMultiset, t: &[f64]) -> Result<bool> {
        let rho = self.rho(t)?;
        if self.dim == 0 {
            return Ok(true);
        }
        let shifted = rho - DMatrix::identity(self.dim, self.dim);
        let by_svd = linalg::sigma_min(&shifted) > FREE_ACTION_TOL;
        let by_weights = weights.min_character_gap(t) > FREE_ACTION_TOL;
        if by_svd != by_weights {
            return Err(Error::InternalDisagreement(format!(
                "free action at t = {t:?}: singular values say {by_svd}, weights say {by_weights}"
            )));
        }
        Ok(by_svd)
    }

    /// Fraction of Haar-random torus points acting freely on `V \ {0}`.
    pub fn fr_density_estimate(&self, n: usize, seed: u64, par: Parallelism) -> Result<DensityReport> {
        sampling::check_sample_count(n)?;
        if self.rank == 0 {
            return Err(Error::precondition("free-set sampling needs a torus of positive rank"));
        }
        let weights = self.weights()?;
        let results = sampling::map_samples(n, seed, par, |_, rng| {
            let t: Vec<f64> = (0..self.rank).map(|_| rng.random::<f64>()).collect();
            self.fr_membership_with(&weights, &t)
        });
        let mut hits = 0;
        for r in results {
            if r? {
                hits += 1;
            }
        }
        Ok(DensityReport::new(hits, 0, n, seed, SamplerSpec::global(0.0)))
    }

    /// Brings commuting generators with spectrum in `iZ` to skew form.
    ///
    /// Returns the representation in new coordinates `y = S x` together with
    /// `S`, the square root of the Gram matrix averaged over the torus grid.
    pub fn from_commuting_generators(generators: Vec<DMatrix<f64>>) -> Result<(TorusRep, DMatrix<f64>)> {
        let rank = generators.len();
        let dim = generators.first().map_or(0, |g| g.nrows());
        let raw = TorusRep::new(rank, dim, generators)?;
        let v = raw.validate()?;
        if v.commutation_residual > COMMUTATION_TOL {
            return Err(Error::precondition(format!(
                "generators do not commute (residual {:e})",
                v.commutation_residual
            )));
        }
        if v.skew_residual <= SKEW_TOL {
            return Ok((raw, DMatrix::identity(dim, dim)));
        }
        let gram = raw.averaged_gram();
        let (s, s_inv) = linalg::spd_sqrt(&gram)?;
        let gens = raw.generators.iter().map(|a| &s * a * &s_inv).collect();
        let rep = TorusRep::new(rank, dim, gens)?;
        let check = rep.validate()?;
        if check.skew_residual > 1e-8 {
            return Err(Error::precondition(format!(
                "averaged inner product did not make the action orthogonal (skew residual {:e})",
                check.skew_residual
            )));
        }
        // clean the rounding left over from averaging
        let gens = rep.generators.iter().map(|a| (a - a.transpose()) * 0.5).collect();
        Ok((TorusRep::new(rank, dim, gens)?, s))
    }

    fn averaged_gram(&self) -> DMatrix<f64> {
        let n = self.dim;
        let steps: Vec<Vec<DMatrix<f64>>> = self
            .generators
            .iter()
            .map(|a| {
                let step = linalg::expm(&(a * (std::f64::consts::TAU / AVERAGING_GRID as f64)));
                let mut powers = Vec::with_capacity(AVERAGING_GRID);
                let mut p = DMatrix::identity(n, n);
                for _ in 0..AVERAGING_GRID {
                    powers.push(p.clone());
                    p = &p * &step;
                }
                powers
            })
            .collect();
        let total = AVERAGING_GRID.pow(self.rank as u32);
        let mut gram = DMatrix::zeros(n, n);
        for flat in 0..total {
            let mut rho = DMatrix::identity(n, n);
            let mut rest = flat;
            for powers in &steps {
                rho = &rho * &powers[rest % AVERAGING_GRID];
                rest /= AVERAGING_GRID;
            }
            gram += rho.transpose() * &rho;
        }
        gram / total as f64
    }
}

/// Compact group data: a torus plus optional extra component representatives.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactPart {
    pub torus: TorusRep,
    /// Orthogonal matrices normalizing the torus image; empty for connected groups.
    pub components: Vec<DMatrix<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompactValidation {
    pub torus: TorusValidation,
    pub orthogonality_residual: f64,
    pub normalizer_residual: f64,
    pub accepted: bool,
}

impl CompactPart {
    pub fn connected(torus: TorusRep) -> Self {
        CompactPart {
            torus,
            components: Vec::new(),
        }
    }

    pub fn is_connected(&self) -> bool {
        self.components.is_empty()
    }

    pub fn validate(&self) -> Result<CompactValidation> {
        let torus = self.torus.validate()?;
        let n = self.torus.dim();
        let mut orth: f64 = 0.0;
        let mut norm: f64 = 0.0;
        let span = DMatrix::from_fn(n * n, self.torus.rank(), |i, j| {
            self.torus.generators()[j][(i % n, i / n)]
        });
        for g in &self.components {
            if g.nrows() != n || g.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: g.nrows(),
                });
            }
            orth = orth.max(linalg::max_abs(&(g.transpose() * g - DMatrix::identity(n, n))));
            for a in self.torus.generators() {
                let image = linalg::vec_of(&(g * a * g.transpose()));
                let (_, res) = linalg::lstsq(&span, &image);
                norm = norm.max(res);
            }
        }
        Ok(CompactValidation {
            torus,
            orthogonality_residual: orth,
            normalizer_residual: norm,
            accepted: torus.accepted && orth <= ORTHOGONALITY_TOL && norm <= NORMALIZER_TOL,
        })
    }

    /// `rho(t) g_c` for component `c` (identity component when `None`).
    pub fn rho(&self, t: &[f64], component: Option<usize>) -> Result<DMatrix<f64>> {
        let r = self.torus.rho(t)?;
        match component {
            None => Ok(r),
            Some(c) => {
                let g = self.components.get(c).ok_or_else(|| {
                    Error::precondition(format!(
                        "component index {c} out of range ({} declared)",
                        self.components.len()
                    ))
                })?;
                Ok(r * g)
            }
        }
    }
}

/// Wire form: `{"rank": r, "dim": n, "generators": [...], "components": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompactPartJson {
    pub rank: usize,
    pub dim: usize,
    #[serde(default)]
    pub generators: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    pub components: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<CompactPartJson> for CompactPart {
    type Error = Error;

    fn try_from(j: CompactPartJson) -> Result<Self> {
        let gens = j
            .generators
            .iter()
            .map(|g| linalg::matrix_from_rows(g, j.dim))
            .collect::<Result<Vec<_>>>()?;
        let comps = j
            .components
            .iter()
            .map(|g| linalg::matrix_from_rows(g, j.dim))
            .collect::<Result<Vec<_>>>()?;
        Ok(CompactPart {
            torus: TorusRep::new(j.rank, j.dim, gens)?,
            components: comps,
        })
    }
}

impl From<&CompactPart> for CompactPartJson {
    fn from(c: &CompactPart) -> Self {
        CompactPartJson {
            rank: c.torus.rank(),
            dim: c.torus.dim(),
            generators: c.torus.generators().iter().map(linalg::matrix_to_rows).collect(),
            components: c.components.iter().map(linalg::matrix_to_rows).collect(),
        }
    }
}

impl Serialize for CompactPart {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CompactPartJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CompactPart {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        CompactPart::try_from(CompactPartJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Vector `e^{2πi θ}` helper used in tests and the power-norm gallery.
pub fn unit_phase(theta: f64) -> C64 {
    C64::from_polar(1.0, std::f64::consts::TAU * theta)
}

/// Real part of `sum_w e^{2πi w·t} P_w`, rebuilding `rho(t)` from the weight
/// decomposition. Used as an independent path to `rho`.
pub fn rho_from_weight_spaces(spaces: &[WeightSpace], dim: usize, t: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for ws in spaces {
        let phase: f64 = ws.weight.iter().zip(t).map(|(&w, &ti)| w as f64 * ti).sum();
        let z = unit_phase(phase);
        m += &ws.basis * ws.basis.adjoint() * z;
    }
    m.map(|z| z.re)
}

/// Applies `rho(t)` to a real vector; convenience for callers holding a vector.
pub fn apply(rho: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    rho * v
}
