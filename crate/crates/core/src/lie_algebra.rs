//! Finite-dimensional real Lie algebras given by structure constants.
//!
//! `[e_i, e_j] = sum_k c[i][j][k] e_k`. Besides brackets this module computes
//! the derived series, the Killing form, the solvable radical (as the
//! Killing-orthogonal of `[L, L]`), the compact-type test for semisimple
//! algebras, and quotients by ideals.
//!
//! The derived series is computed at the Lie-algebra level. For the
//! simply-connected solvable groups handled by this crate the closed derived
//! series of the group is the series of connected subgroups integrating
//! these ideals, so nothing is lost by working with the algebra.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Acceptance threshold for antisymmetry and Jacobi residuals.
pub const STRUCTURE_TOL: f64 = 1e-10;
/// Residual allowed when checking that a subspace is an ideal.
pub const IDEAL_TOL: f64 = 1e-9;
/// Eigenvalue threshold for negative definiteness of the Killing form.
pub const KILLING_DEFINITE_TOL: f64 = 1e-8;

/// A linear subspace of `R^ambient_dim` stored by an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: DMatrix<f64>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: DMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: DMatrix::identity(ambient_dim, ambient_dim),
        }
    }

    /// Span of the given column vectors. Dependent spanning sets are reduced.
    pub fn span(ambient_dim: usize, vectors: &DMatrix<f64>) -> Result<Self> {
        if vectors.nrows() != ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                found: vectors.nrows(),
            });
        }
        Ok(Subspace {
            ambient_dim,
            basis: linalg::column_space(vectors)?,
        })
    }

    pub fn from_vectors(ambient_dim: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        for v in vectors {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: v.len(),
                });
            }
        }
        let m = DMatrix::from_fn(ambient_dim, vectors.len(), |i, j| vectors[j][i]);
        Self::span(ambient_dim, &m)
    }

    /// Wraps columns that are already orthonormal.
    pub(crate) fn from_orthonormal(basis: DMatrix<f64>) -> Self {
        Subspace {
            ambient_dim: basis.nrows(),
            basis,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthonormal basis as columns.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|j| self.basis.column(j).iter().copied().collect())
            .collect()
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis * (self.basis.transpose() * v)
    }

    /// Distance from `v` to the subspace.
    pub fn distance(&self, v: &DVector<f64>) -> f64 {
        (v - self.project(v)).norm()
    }

    pub fn contains(&self, other: &Subspace, tol: f64) -> bool {
        (0..other.dim()).all(|j| self.distance(&other.basis.column(j).into_owned()) <= tol)
    }

    pub fn complement(&self) -> Result<Subspace> {
        Ok(Subspace {
            ambient_dim: self.ambient_dim,
            basis: linalg::orthogonal_complement(&self.basis, self.ambient_dim)?,
        })
    }
}

impl Serialize for Subspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.basis_vectors().serialize(s)
    }
}

/// Residuals of the structure-constant checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub antisymmetry_residual: f64,
    pub jacobi_residual: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    /// Flattened `c[i][j][k]` at index `(i * dim + j) * dim + k`.
    c: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl LieAlgebra {
    /// Builds an algebra from a dense tensor without completing or checking
    /// antisymmetry; use [`LieAlgebra::validate`] to check it.
    pub fn from_dense(c: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let n = c.len();
        let mut flat = Vec::with_capacity(n * n * n);
        for (i, plane) in c.iter().enumerate() {
            if plane.len() != n {
                return Err(Error::MalformedTensor(format!(
                    "c[{i}] has {} rows, expected {n}",
                    plane.len()
                )));
            }
            for (j, row) in plane.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::MalformedTensor(format!(
                        "c[{i}][{j}] has {} entries, expected {n}",
                        row.len()
                    )));
                }
                flat.extend_from_slice(row);
            }
        }
        Ok(LieAlgebra {
            dim: n,
            c: flat,
            labels: None,
        })
    }

    /// Builds an algebra from sparse `(i, j, k, value)` triples, completing
    /// antisymmetrically. An explicit pair that conflicts with the completion
    /// is rejected.
    pub fn from_triples(dim: usize, triples: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let mut c = vec![0.0; dim * dim * dim];
        let mut set = vec![false; dim * dim * dim];
        let idx = |i: usize, j: usize, k: usize| (i * dim + j) * dim + k;
        for &(i, j, k, v) in triples {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::MalformedTensor(format!(
                    "index ({i}, {j}, {k}) out of range for dimension {dim}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::MalformedTensor(format!(
                    "non-finite constant at ({i}, {j}, {k})"
                )));
            }
            if i == j && v != 0.0 {
                return Err(Error::MalformedTensor(format!(
                    "c[{i}][{i}][{k}] = {v} violates antisymmetry"
                )));
            }
            for (a, b, val) in [(i, j, v), (j, i, -v)] {
                let p = idx(a, b, k);
                if set[p] && c[p] != val {
                    return Err(Error::MalformedTensor(format!(
                        "conflicting explicit values for c[{a}][{b}][{k}]"
                    )));
                }
                c[p] = val;
                set[p] = true;
            }
        }
        Ok(LieAlgebra {
            dim,
            c,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn abelian(dim: usize) -> Self {
        LieAlgebra {
            dim,
            c: vec![0.0; dim * dim * dim],
            labels: None,
        }
    }

    /// `[x, y] = z` on the basis `(x, y, z)`.
    pub fn heisenberg() -> Self {
        Self::from_triples(3, &[(0, 1, 2, 1.0)]).expect("static constants")
    }

    /// `[e_i, e_j] = eps_ijk e_k`.
    pub fn su2() -> Self {
        Self::from_triples(3, &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)])
            .expect("static constants")
    }

    /// Standard basis `(h, e, f)`: `[h, e] = 2e`, `[h, f] = -2f`, `[e, f] = h`.
    pub fn sl2r() -> Self {
        Self::from_triples(3, &[(0, 1, 1, 2.0), (0, 2, 2, -2.0), (1, 2, 0, 1.0)])
            .expect("static constants")
    }

    /// Direct sum `a ⊕ b`, basis of `a` first.
    pub fn direct_sum(a: &LieAlgebra, b: &LieAlgebra) -> LieAlgebra {
        let n = a.dim + b.dim;
        let mut out = LieAlgebra::abelian(n);
        for i in 0..a.dim {
            for j in 0..a.dim {
                for k in 0..a.dim {
                    out.c[(i * n + j) * n + k] = a.constant(i, j, k);
                }
            }
        }
        let o = a.dim;
        for i in 0..b.dim {
            for j in 0..b.dim {
                for k in 0..b.dim {
                    out.c[((i + o) * n + j + o) * n + k + o] = b.constant(i, j, k);
                }
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    #[inline]
    pub fn constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    /// Nonzero constants as `(i, j, k, value)` with `i < j`.
    pub fn triples(&self) -> Vec<(usize, usize, usize, f64)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let v = self.constant(i, j, k);
                    if v != 0.0 {
                        out.push((i, j, k, v));
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.dim;
        let mut anti: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    anti = anti.max((self.constant(i, j, k) + self.constant(j, i, k)).abs());
                }
            }
        }
        let mut jac: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    for m in 0..n {
                        let mut s = 0.0;
                        for k in 0..n {
                            s += self.constant(i, j, k) * self.constant(k, l, m)
                                + self.constant(j, l, k) * self.constant(k, i, m)
                                + self.constant(l, i, k) * self.constant(k, j, m);
                        }
                        jac = jac.max(s.abs());
                    }
                }
            }
        }
        ValidationReport {
            antisymmetry_residual: anti,
            jacobi_residual: jac,
            accepted: anti <= STRUCTURE_TOL && jac <= STRUCTURE_TOL,
        }
    }

    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        Ok(self.bracket_unchecked(x, y))
    }

    pub(crate) fn bracket_unchecked(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        let mut out = DVector::zeros(n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                let base = (i * n + j) * n;
                for k in 0..n {
                    out[k] += self.c[base + k] * w;
                }
            }
        }
        out
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: len,
            });
        }
        Ok(())
    }

    /// `ad(e_i)` as a matrix: `(ad e_i)[k][j] = c[i][j][k]`.
    pub fn ad_basis(&self, i: usize) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |k, j| self.constant(i, j, k))
    }

    pub fn ad(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            if x[i] != 0.0 {
                m += self.ad_basis(i) * x[i];
            }
        }
        m
    }

    /// Span of all brackets of basis vectors of `sub` with each other.
    pub fn bracket_span(&self, a: &Subspace, b: &Subspace) -> Result<Subspace> {
        let n = self.dim;
        let floor = STRUCTURE_TOL * self.c.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let mut cols = Vec::new();
        for p in 0..a.dim() {
            let x = a.basis().column(p).into_owned();
            for q in 0..b.dim() {
                let y = b.basis().column(q).into_owned();
                let z = self.bracket_unchecked(&x, &y);
                // roundoff from basis changes must not create spurious directions
                if z.norm() > floor {
                    cols.push(z);
                }
            }
        }
        if cols.is_empty() {
            return Ok(Subspace::zero(n));
        }
        let m = DMatrix::from_columns(&cols);
        Subspace::span(n, &m)
    }

    pub fn derived_series(&self) -> Result<DerivedSeries> {
        self.derived_series_from(&Subspace::full(self.dim))
    }

    /// Derived series of the subalgebra `start`.
    pub fn derived_series_from(&self, start: &Subspace) -> Result<DerivedSeries> {
        let mut terms = vec![start.clone()];
        loop {
            let current = terms.last().expect("nonempty");
            if current.dim() == 0 {
                return Ok(DerivedSeries {
                    terms,
                    solvable: true,
                });
            }
            let next = self.bracket_span(current, current)?;
            let stalled = next.dim() == current.dim();
            terms.push(next);
            if stalled {
                return Ok(DerivedSeries {
                    terms,
                    solvable: false,
                });
            }
        }
    }

    pub fn killing_form(&self) -> KillingForm {
        let n = self.dim;
        let ads: Vec<DMatrix<f64>> = (0..n).map(|i| self.ad_basis(i)).collect();
        let mut k = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let t = (&ads[i] * &ads[j]).trace();
                k[(i, j)] = t;
                k[(j, i)] = t;
            }
        }
        KillingForm { matrix: k }
    }

    /// Solvable radical, computed as `{x : K(x, [L, L]) = 0}`.
    pub fn radical(&self) -> Result<Subspace> {
        let n = self.dim;
        let derived = self.bracket_span(&Subspace::full(n), &Subspace::full(n))?;
        let radical = if derived.dim() == 0 {
            Subspace::full(n)
        } else {
            let kill = self.killing_form();
            let system = (&kill.matrix * derived.basis()).transpose();
            Subspace::from_orthonormal(linalg::kernel(&system)?)
        };
        let ideal_residual = self.ideal_residual(&radical);
        if ideal_residual > IDEAL_TOL {
            return Err(Error::InternalDisagreement(format!(
                "computed radical is not an ideal (residual {ideal_residual:e})"
            )));
        }
        if !self.derived_series_from(&radical)?.solvable {
            return Err(Error::InternalDisagreement(
                "computed radical is not solvable".into(),
            ));
        }
        Ok(radical)
    }

    /// Largest distance of `[e_i, u]` from `sub`, over basis vectors `e_i` and `u ∈ sub`.
    pub fn ideal_residual(&self, sub: &Subspace) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let ad = self.ad_basis(i);
            for q in 0..sub.dim() {
                let r = &ad * sub.basis().column(q);
                worst = worst.max(sub.distance(&r));
            }
        }
        worst
    }

    /// True iff the Killing form is negative definite. Requires a semisimple algebra.
    pub fn is_compact_type(&self) -> Result<bool> {
        let rad = self.radical()?;
        if rad.dim() > 0 {
            return Err(Error::NotSemisimple {
                radical_dim: rad.dim(),
            });
        }
        Ok(self.killing_form().is_negative_definite())
    }

    /// Compact-type test of `L / rad(L)`; true for solvable `L`.
    pub fn semisimple_quotient_is_compact(&self) -> Result<bool> {
        let rad = self.radical()?;
        let q = self.quotient(&rad)?;
        q.algebra.is_compact_type()
    }

    pub fn quotient(&self, ideal: &Subspace) -> Result<Quotient> {
        if ideal.ambient_dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: ideal.ambient_dim(),
            });
        }
        let residual = self.ideal_residual(ideal);
        if residual > IDEAL_TOL {
            return Err(Error::NotAnIdeal { residual });
        }
        let complement = ideal.complement()?;
        let w = complement.basis();
        let m = w.ncols();
        let mut c = vec![0.0; m * m * m];
        for a in 0..m {
            let x = w.column(a).into_owned();
            for b in 0..m {
                let y = w.column(b).into_owned();
                let z = w.transpose() * self.bracket_unchecked(&x, &y);
                for k in 0..m {
                    c[(a * m + b) * m + k] = z[k];
                }
            }
        }
        Ok(Quotient {
            algebra: LieAlgebra {
                dim: m,
                c,
                labels: None,
            },
            complement,
        })
    }

    /// Structure constants in the basis `f_a = sum_i p[i][a] e_i`.
    pub fn change_basis(&self, p: &DMatrix<f64>) -> Result<LieAlgebra> {
        let n = self.dim;
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
        let mut c = vec![0.0; n * n * n];
        for a in 0..n {
            let x = p.column(a).into_owned();
            for b in 0..n {
                let y = p.column(b).into_owned();
                let z = &p_inv * self.bracket_unchecked(&x, &y);
                for d in 0..n {
                    c[(a * n + b) * n + d] = z[d];
                }
            }
        }
        Ok(LieAlgebra {
            dim: n,
            c,
            labels: None,
        })
    }

    /// Largest violation of the derivation rule `D[x,y] = [Dx,y] + [x,Dy]` on basis pairs.
    pub fn derivation_residual(&self, d: &DMatrix<f64>) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let ei = DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 });
            for j in 0..n {
                let ej = DVector::from_fn(n, |r, _| if r == j { 1.0 } else { 0.0 });
                let lhs = d * self.bracket_unchecked(&ei, &ej);
                let rhs = self.bracket_unchecked(&(d * &ei), &ej)
                    + self.bracket_unchecked(&ei, &(d * &ej));
                worst = worst.max((lhs - rhs).amax());
            }
        }
        worst
    }

    /// Largest violation of `phi[x,y] = [phi x, phi y]` on basis pairs.
    pub fn automorphism_residual(&self, phi: &DMatrix<f64>) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let ei = DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 });
            for j in 0..n {
                let ej = DVector::from_fn(n, |r, _| if r == j { 1.0 } else { 0.0 });
                let lhs = phi * self.bracket_unchecked(&ei, &ej);
                let rhs = self.bracket_unchecked(&(phi * &ei), &(phi * &ej));
                worst = worst.max((lhs - rhs).amax());
            }
        }
        worst
    }
}

#[derive(Debug, Clone)]
pub struct DerivedSeries {
    pub terms: Vec<Subspace>,
    /// False when the series stabilizes at a nonzero term.
    pub solvable: bool,
}

impl DerivedSeries {
    pub fn dims(&self) -> Vec<usize> {
        self.terms.iter().map(Subspace::dim).collect()
    }

    /// Nonzero terms, i.e. the chain down to (excluding) the zero term.
    pub fn nonzero_terms(&self) -> &[Subspace] {
        let end = self
            .terms
            .iter()
            .position(|t| t.dim() == 0)
            .unwrap_or(self.terms.len());
        &self.terms[..end]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KillingForm {
    pub matrix: DMatrix<f64>,
}

impl KillingForm {
    pub fn eval(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.matrix * y)[(0, 0)]
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.matrix.is_empty() {
            return Vec::new();
        }
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `(positive, negative, zero)` eigenvalue counts at threshold
    /// [`KILLING_DEFINITE_TOL`] scaled by the largest eigenvalue magnitude.
    pub fn signature(&self) -> (usize, usize, usize) {
        let ev = self.eigenvalues();
        let scale = ev.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let tol = KILLING_DEFINITE_TOL * scale;
        let pos = ev.iter().filter(|&&v| v > tol).count();
        let neg = ev.iter().filter(|&&v| v < -tol).count();
        (pos, neg, ev.len() - pos - neg)
    }

    pub fn is_negative_definite(&self) -> bool {
        self.eigenvalues().iter().all(|&v| v < -KILLING_DEFINITE_TOL)
    }

    pub fn symmetry_residual(&self) -> f64 {
        linalg::max_abs(&(&self.matrix - self.matrix.transpose()))
    }
}

/// `L / I`, realized on the orthogonal complement of `I`.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub algebra: LieAlgebra,
    /// Orthonormal basis (columns, in `L` coordinates) of the complement used as quotient basis.
    pub complement: Subspace,
}

impl Quotient {
    /// Image of `x ∈ L` in quotient coordinates.
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        self.complement.basis().transpose() * x
    }

    /// Induced action on `L / I` of a linear map preserving `I`.
    pub fn induced(&self, map: &DMatrix<f64>) -> DMatrix<f64> {
        let w = self.complement.basis();
        w.transpose() * map * w
    }
}

// ---------------------------------------------------------------------------
// JSON schema: {"dim": n, "c": [[i, j, k, value], ...], "labels": [...]}
// ---------------------------------------------------------------------------

/// Wire form of a Lie algebra. Values may be JSON numbers or strings of the
/// form `"p/q"`; `exact: true` requests rational arithmetic.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieAlgebraJson {
    pub dim: usize,
    #[serde(default)]
    pub c: Vec<(usize, usize, usize, serde_json::Value)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub exact: bool,
}

pub(crate) fn parse_coefficient(v: &serde_json::Value) -> Result<f64> {
    match v {
        serde_json::Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::MalformedTensor(format!("unrepresentable number {n}"))),
        serde_json::Value::String(s) => {
            let r = crate::exact::parse_rational(s)?;
            Ok(crate::exact::rational_to_f64(&r))
        }
        other => Err(Error::MalformedTensor(format!(
            "structure constant must be a number or \"p/q\" string, got {other}"
        ))),
    }
}

impl TryFrom<LieAlgebraJson> for LieAlgebra {
    type Error = Error;

    fn try_from(j: LieAlgebraJson) -> Result<Self> {
        let triples = j
            .c
            .iter()
            .map(|(i, jj, k, v)| Ok((*i, *jj, *k, parse_coefficient(v)?)))
            .collect::<Result<Vec<_>>>()?;
        let alg = LieAlgebra::from_triples(j.dim, &triples)?;
        match j.labels {
            Some(l) => alg.with_labels(l),
            None => Ok(alg),
        }
    }
}

impl From<&LieAlgebra> for LieAlgebraJson {
    fn from(a: &LieAlgebra) -> Self {
        LieAlgebraJson {
            dim: a.dim,
            c: a
                .triples()
                .into_iter()
                .map(|(i, j, k, v)| (i, j, k, serde_json::json!(v)))
                .collect(),
            labels: a.labels.clone(),
            exact: false,
        }
    }
}

impl Serialize for LieAlgebra {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LieAlgebraJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LieAlgebra {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = LieAlgebraJson::deserialize(d)?;
        LieAlgebra::try_from(j).map_err(serde::de::Error::custom)
    }
}
