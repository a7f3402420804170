//! Simply connected solvable groups realized as matrix groups.
//!
//! Elements carry second-kind exponential coordinates
//! `g = exp(x_{o(1)} M_{o(1)}) ··· exp(x_{o(n)} M_{o(n)})` along an ordering
//! `o` of the basis in which every derived-series term is spanned by a suffix.
//! Matrix products are pulled back to coordinates by Newton's method on this
//! chart, and the twisted coboundary `δ(s) = s⁻¹ φ(s)` is inverted by solving
//! layer by layer along the derived series and then polishing with Newton.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_algebra::{LieAlgebra, Subspace, ValidationReport};
use crate::linalg;

pub const HOMOMORPHISM_TOL: f64 = 1e-9;
pub const AUTOMORPHISM_TOL: f64 = 1e-8;
/// Smallest admissible singular value of `1 - φ` for [`SolvablePresentation::delta_solve`].
pub const INVERTIBILITY_TOL: f64 = 1e-8;
pub const DELTA_SOLVE_TOL: f64 = 1e-9;
const NEWTON_MAX_ITER: usize = 100;
const NEWTON_CONVERGED: f64 = 1e-12;
const MAX_HALVINGS: usize = 30;
/// Relative matrix residual accepted when pulling a product back to coordinates.
const RECOORDINATIZE_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub struct SolvablePresentation {
    algebra: LieAlgebra,
    realization: Vec<DMatrix<f64>>,
    adapted_order: Vec<usize>,
    /// Positions in `adapted_order` where each nonzero derived term starts, plus `n`.
    layer_starts: Vec<usize>,
    /// Left inverse of the matrix whose columns are `vec(M_i)`.
    coord_map: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolvableValidation {
    pub homomorphism_residual: f64,
    pub faithful: bool,
    pub solvable: bool,
    pub adapted: bool,
    pub accepted: bool,
}

/// `g = Π exp(x_i M_i)` in adapted order; `coords[i]` belongs to basis vector `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    coords: DVector<f64>,
    matrix: DMatrix<f64>,
}

impl GroupElement {
    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

impl Serialize for GroupElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("GroupElement", 2)?;
        st.serialize_field("coords", self.coords.as_slice())?;
        st.serialize_field("matrix", &linalg::matrix_to_rows(&self.matrix))?;
        st.end()
    }
}

/// Linear map on algebra coordinates: column `i` holds the image of `e_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraAutomorphism {
    matrix: DMatrix<f64>,
}

impl AlgebraAutomorphism {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        Ok(AlgebraAutomorphism { matrix })
    }

    pub fn identity(n: usize) -> Self {
        AlgebraAutomorphism {
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `exp(D)` for a derivation `D`.
    pub fn exp_of_derivation(d: &DMatrix<f64>) -> Self {
        AlgebraAutomorphism {
            matrix: linalg::expm(d),
        }
    }
}

/// Outcome of [`SolvablePresentation::delta_solve`].
#[derive(Debug, Clone, Serialize)]
pub struct DeltaSolution {
    pub x: GroupElement,
    /// `‖matrix(δ(x)) − matrix(v)‖_F`.
    pub residual: f64,
    pub iterations: usize,
    pub sigma_min: f64,
    /// Condition number of `1 − φ`.
    pub condition: f64,
}

/// Outcome of the layer-by-layer solve of `δ(x) = v`.
#[derive(Debug, Clone)]
pub struct LayeredSolve {
    pub x: GroupElement,
    /// Least-squares residual of each layer's linear system, relative to its right-hand side.
    pub layer_obstructions: Vec<f64>,
}

impl LayeredSolve {
    pub fn obstruction(&self) -> f64 {
        self.layer_obstructions.iter().cloned().fold(0.0, f64::max)
    }
}

impl SolvablePresentation {
    pub fn new(
        algebra: LieAlgebra,
        realization: Vec<DMatrix<f64>>,
        adapted_order: Vec<usize>,
    ) -> Result<Self> {
        let n = algebra.dim();
        if realization.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: realization.len(),
            });
        }
        let d = realization.first().map_or(0, |m| m.nrows());
        for m in &realization {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: m.nrows().max(m.ncols()),
                });
            }
        }
        let mut seen = vec![false; n];
        if adapted_order.len() != n {
            return Err(Error::invalid(format!(
                "adapted order has {} entries, expected {n}",
                adapted_order.len()
            )));
        }
        for &i in &adapted_order {
            if i >= n || seen[i] {
                return Err(Error::invalid("adapted order is not a permutation of the basis"));
            }
            seen[i] = true;
        }
        let stacked = if n == 0 {
            DMatrix::zeros(d * d, 0)
        } else {
            DMatrix::from_columns(&realization.iter().map(linalg::vec_of).collect::<Vec<_>>())
        };
        let faithful = linalg::rank_split(&stacked)? == n;
        let coord_map = if n == 0 {
            DMatrix::zeros(0, d * d)
        } else if faithful {
            let gram = stacked.transpose() * &stacked;
            let inv = gram
                .try_inverse()
                .ok_or_else(|| Error::invalid("realization is not faithful"))?;
            inv * stacked.transpose()
        } else {
            DMatrix::zeros(n, d * d)
        };
        let series = algebra.derived_series()?;
        let mut layer_starts = Vec::new();
        if series.solvable {
            for term in series.nonzero_terms() {
                layer_starts.push(n - term.dim());
            }
        }
        layer_starts.push(n);
        let p = SolvablePresentation {
            algebra,
            realization,
            adapted_order,
            layer_starts,
            coord_map,
        };
        let v = p.validate()?;
        if !v.accepted {
            return Err(Error::invalid(format!(
                "solvable presentation rejected: homomorphism residual {:e}, faithful {}, solvable {}, adapted {}",
                v.homomorphism_residual, v.faithful, v.solvable, v.adapted
            )));
        }
        Ok(p)
    }

    /// `R^n` realized by translations of `R^{n+1}` (`M_i = E_{i,n}`).
    pub fn abelian(n: usize) -> Self {
        let realization = (0..n)
            .map(|i| {
                let mut m = DMatrix::zeros(n + 1, n + 1);
                m[(i, n)] = 1.0;
                m
            })
            .collect();
        SolvablePresentation::new(LieAlgebra::abelian(n), realization, (0..n).collect())
            .expect("translation realization is valid")
    }

    /// Heisenberg group as 3×3 upper unitriangular matrices with
    /// `x = E_12`, `y = E_23`, `z = E_13`.
    pub fn heisenberg() -> Self {
        let unit = |r: usize, c: usize| {
            let mut m = DMatrix::zeros(3, 3);
            m[(r, c)] = 1.0;
            m
        };
        SolvablePresentation::new(
            LieAlgebra::heisenberg(),
            vec![unit(0, 1), unit(1, 2), unit(0, 2)],
            vec![0, 1, 2],
        )
        .expect("Heisenberg realization is valid")
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn realization(&self) -> &[DMatrix<f64>] {
        &self.realization
    }

    pub fn adapted_order(&self) -> &[usize] {
        &self.adapted_order
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn realization_dim(&self) -> usize {
        self.realization.first().map_or(0, |m| m.nrows())
    }

    /// Basis indices of derived layer `k` (the complement of `D^{k+1}` in `D^k`).
    pub fn layer(&self, k: usize) -> &[usize] {
        &self.adapted_order[self.layer_starts[k]..self.layer_starts[k + 1]]
    }

    pub fn layer_count(&self) -> usize {
        self.layer_starts.len() - 1
    }

    pub fn validate(&self) -> Result<SolvableValidation> {
        let n = self.dim();
        let mut hom: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut expected = DMatrix::zeros(self.realization_dim(), self.realization_dim());
                for k in 0..n {
                    let c = self.algebra.constant(i, j, k);
                    if c != 0.0 {
                        expected += &self.realization[k] * c;
                    }
                }
                let actual = linalg::commutator(&self.realization[i], &self.realization[j]);
                hom = hom.max(linalg::max_abs(&(actual - expected)));
            }
        }
        let stacked_rank = if n == 0 {
            0
        } else {
            linalg::rank_split(&DMatrix::from_columns(
                &self.realization.iter().map(linalg::vec_of).collect::<Vec<_>>(),
            ))?
        };
        let faithful = stacked_rank == n;
        let series = self.algebra.derived_series()?;
        let solvable = series.solvable;
        let mut adapted = solvable;
        if solvable {
            for term in series.nonzero_terms() {
                let m = term.dim();
                let suffix: Vec<Vec<f64>> = self.adapted_order[n - m..]
                    .iter()
                    .map(|&i| (0..n).map(|r| if r == i { 1.0 } else { 0.0 }).collect())
                    .collect();
                let span = Subspace::from_vectors(n, &suffix)?;
                if !span.contains(term, 1e-9) {
                    adapted = false;
                }
            }
        }
        Ok(SolvableValidation {
            homomorphism_residual: hom,
            faithful,
            solvable,
            adapted,
            accepted: hom <= HOMOMORPHISM_TOL && faithful && solvable && adapted,
        })
    }

    fn check_coords(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    fn product_matrix(&self, x: &DVector<f64>, gens: &[DMatrix<f64>]) -> DMatrix<f64> {
        let d = self.realization_dim();
        let mut m = DMatrix::identity(d, d);
        for &i in &self.adapted_order {
            if x[i] != 0.0 {
                m *= linalg::expm(&(&gens[i] * x[i]));
            }
        }
        m
    }

    /// Element with the given second-kind coordinates.
    pub fn element(&self, coords: DVector<f64>) -> Result<GroupElement> {
        self.check_coords(&coords)?;
        let matrix = self.product_matrix(&coords, &self.realization);
        Ok(GroupElement { coords, matrix })
    }

    pub fn identity(&self) -> GroupElement {
        let d = self.realization_dim();
        GroupElement {
            coords: DVector::zeros(self.dim()),
            matrix: DMatrix::identity(d, d),
        }
    }

    /// `exp(X)` for `X = Σ x_i e_i`, pulled back to second-kind coordinates.
    pub fn exp(&self, x: &DVector<f64>) -> Result<GroupElement> {
        self.check_coords(x)?;
        let mut m = DMatrix::zeros(self.realization_dim(), self.realization_dim());
        for (i, g) in self.realization.iter().enumerate() {
            m += g * x[i];
        }
        self.recoordinatize(&linalg::expm(&m), x.clone())
    }

    /// Algebra coordinates of a matrix in the span of the realization.
    pub fn algebra_coords(&self, m: &DMatrix<f64>) -> DVector<f64> {
        &self.coord_map * linalg::vec_of(m)
    }

    pub fn algebra_matrix(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let d = self.realization_dim();
        let mut m = DMatrix::zeros(d, d);
        for (i, g) in self.realization.iter().enumerate() {
            m += g * x[i];
        }
        m
    }

    /// `Ad_g` on algebra coordinates.
    pub fn adjoint(&self, g: &GroupElement) -> Result<DMatrix<f64>> {
        let inv = self.matrix_inverse(&g.matrix)?;
        let n = self.dim();
        let mut ad = DMatrix::zeros(n, n);
        for (i, m) in self.realization.iter().enumerate() {
            ad.set_column(i, &self.algebra_coords(&(&g.matrix * m * &inv)));
        }
        Ok(ad)
    }

    fn matrix_inverse(&self, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        m.clone()
            .try_inverse()
            .ok_or_else(|| Error::precondition("group element matrix is singular"))
    }

    /// Columns: coordinates of `Ad_{P_{<p}}(M_{o(p)})`, the left-trivialized
    /// differential of the chart at `x`.
    fn left_jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let d = self.realization_dim();
        let mut jac = DMatrix::zeros(n, n);
        let mut prefix = DMatrix::identity(d, d);
        let mut prefix_inv = DMatrix::identity(d, d);
        for &i in &self.adapted_order {
            let col = self.algebra_coords(&(&prefix * &self.realization[i] * &prefix_inv));
            jac.set_column(i, &col);
            if x[i] != 0.0 {
                prefix *= linalg::expm(&(&self.realization[i] * x[i]));
                prefix_inv = linalg::expm(&(&self.realization[i] * -x[i])) * prefix_inv;
            }
        }
        jac
    }

    fn solve_left_jacobian(&self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        let jac = self.left_jacobian(x);
        match jac.clone().lu().solve(u) {
            Some(dx) if dx.iter().all(|v| v.is_finite()) => dx,
            _ => linalg::lstsq(&jac, u).0,
        }
    }

    /// Second-kind coordinates of a matrix in the realized group, starting
    /// Newton's method from `guess`.
    pub fn recoordinatize(&self, target: &DMatrix<f64>, guess: DVector<f64>) -> Result<GroupElement> {
        self.check_coords(&guess)?;
        let scale = target.norm().max(1.0);
        let residual_of = |m: &DMatrix<f64>| (target - m).norm() / scale;
        let mut x = guess;
        let mut current = self.product_matrix(&x, &self.realization);
        let mut res = residual_of(&current);
        for _ in 0..NEWTON_MAX_ITER {
            if res <= 1e-15 {
                break;
            }
            let inv = self.matrix_inverse(&current)?;
            let d = self.realization_dim();
            let eta = self.algebra_coords(&(target * inv - DMatrix::identity(d, d)));
            let dx = self.solve_left_jacobian(&x, &eta);
            let mut step = 1.0;
            let mut improved = false;
            for _ in 0..MAX_HALVINGS {
                let trial = &x + &dx * step;
                let m = self.product_matrix(&trial, &self.realization);
                let r = residual_of(&m);
                if r < res {
                    x = trial;
                    current = m;
                    res = r;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if res > RECOORDINATIZE_TOL || !res.is_finite() {
            return Err(Error::RecoordinatizationFailure { residual: res });
        }
        Ok(GroupElement {
            coords: x,
            matrix: current,
        })
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        let m = &g.matrix * &h.matrix;
        self.recoordinatize(&m, &g.coords + &h.coords)
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        let m = self.matrix_inverse(&g.matrix)?;
        self.recoordinatize(&m, -&g.coords)
    }

    /// Bracket-preservation residual of `φ` on basis pairs.
    pub fn check_automorphism(&self, phi: &AlgebraAutomorphism) -> Result<ValidationReport> {
        self.check_phi_dim(phi)?;
        let r = self.algebra.automorphism_residual(&phi.matrix);
        let invertible = linalg::sigma_min(&phi.matrix) > INVERTIBILITY_TOL;
        Ok(ValidationReport {
            antisymmetry_residual: 0.0,
            jacobi_residual: r,
            accepted: r <= AUTOMORPHISM_TOL && invertible,
        })
    }

    fn check_phi_dim(&self, phi: &AlgebraAutomorphism) -> Result<()> {
        if phi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: phi.dim(),
            });
        }
        Ok(())
    }

    fn phi_generators(&self, phi: &AlgebraAutomorphism) -> Vec<DMatrix<f64>> {
        (0..self.dim())
            .map(|i| self.algebra_matrix(&phi.matrix.column(i).into_owned()))
            .collect()
    }

    /// Matrix of `φ(g)`, computed factor by factor as `Π exp(x_p φ(M_p))`.
    pub(crate) fn phi_matrix(&self, phi: &AlgebraAutomorphism, g: &GroupElement) -> DMatrix<f64> {
        self.product_matrix(&g.coords, &self.phi_generators(phi))
    }

    pub fn apply_automorphism(&self, phi: &AlgebraAutomorphism, g: &GroupElement) -> Result<GroupElement> {
        self.check_phi_dim(phi)?;
        let m = self.phi_matrix(phi, g);
        self.recoordinatize(&m, &phi.matrix * &g.coords)
    }

    fn delta_matrix(&self, phi_gens: &[DMatrix<f64>], x: &DVector<f64>) -> Result<DMatrix<f64>> {
        let s = self.product_matrix(x, &self.realization);
        let phi_s = self.product_matrix(x, phi_gens);
        Ok(self.matrix_inverse(&s)? * phi_s)
    }

    /// `δ(s) = s⁻¹ φ(s)`.
    pub fn delta(&self, phi: &AlgebraAutomorphism, s: &GroupElement) -> Result<GroupElement> {
        self.check_phi_dim(phi)?;
        let gens = self.phi_generators(phi);
        let m = self.delta_matrix(&gens, &s.coords)?;
        let n = self.dim();
        let guess = (&phi.matrix - DMatrix::identity(n, n)) * &s.coords;
        self.recoordinatize(&m, guess)
    }

    /// Solves `δ(x) = v` one derived layer at a time.
    ///
    /// After layers `< k` are fixed, `w = δ(x)` agrees with `v` modulo
    /// `D^k`; writing the correction as `x ← x·c` with `c` in layer `k` turns
    /// `c⁻¹ w φ(c) = v` into the linear system `(φ − Ad_{w⁻¹}) Y = [w⁻¹ v]_k`
    /// on the abelian quotient `D^k / D^{k+1}`. Each system is solved in the
    /// least-squares sense and its residual reported.
    pub fn layered_delta_solve(&self, phi: &AlgebraAutomorphism, v: &GroupElement) -> Result<LayeredSolve> {
        self.check_phi_dim(phi)?;
        let gens = self.phi_generators(phi);
        let mut x = DVector::zeros(self.dim());
        let mut obstructions = Vec::with_capacity(self.layer_count());
        for k in 0..self.layer_count() {
            let idx = self.layer(k);
            let w_m = self.delta_matrix(&gens, &x)?;
            let guess = (&phi.matrix - DMatrix::identity(self.dim(), self.dim())) * &x;
            let w = self.recoordinatize(&w_m, guess)?;
            let w_inv = self.inverse(&w)?;
            let gap_m = &w_inv.matrix * &v.matrix;
            let gap = self.recoordinatize(&gap_m, &v.coords - &w.coords)?;
            let ad = self.adjoint(&w_inv)?;
            let m = idx.len();
            let block = DMatrix::from_fn(m, m, |r, c| {
                phi.matrix[(idx[r], idx[c])] - ad[(idx[r], idx[c])]
            });
            let rhs = DVector::from_fn(m, |r, _| gap.coords[idx[r]]);
            let (y, res) = linalg::lstsq(&block, &rhs);
            obstructions.push(res / rhs.norm().max(1.0));
            // x ← x · Π_{layer k} exp(y M): the layer-k factors come after all earlier layers
            // and before deeper ones, which are still zero.
            for (r, &i) in idx.iter().enumerate() {
                x[i] += y[r];
            }
        }
        Ok(LayeredSolve {
            x: self.element(x)?,
            layer_obstructions: obstructions,
        })
    }

    /// Newton polishing of `δ(x) = v` from a starting point.
    ///
    /// A left perturbation `x ← exp(u) x` changes `δ(x)` to first order by
    /// `δ(x) exp(Ad_{φ(x)⁻¹} (φ − 1) u)`, so the step solves
    /// `u = (φ − 1)⁻¹ Ad_{φ(x)} η` with `η ≈ log(δ(x)⁻¹ v)`.
    fn delta_newton(
        &self,
        phi: &AlgebraAutomorphism,
        v: &GroupElement,
        start: DVector<f64>,
    ) -> Result<(DVector<f64>, f64, usize)> {
        let n = self.dim();
        let d = self.realization_dim();
        let gens = self.phi_generators(phi);
        let shifted = &phi.matrix - DMatrix::identity(n, n);
        let shifted_lu = shifted.clone().lu();
        let scale = v.matrix.norm().max(1.0);
        let residual_of = |x: &DVector<f64>| -> Result<(DMatrix<f64>, f64)> {
            let m = self.delta_matrix(&gens, x)?;
            let r = (&m - &v.matrix).norm();
            Ok((m, r))
        };
        let mut x = start;
        let (mut current, mut res) = residual_of(&x)?;
        let mut iterations = 0;
        while iterations < NEWTON_MAX_ITER && res > NEWTON_CONVERGED * scale {
            iterations += 1;
            let eta = self.algebra_coords(&(self.matrix_inverse(&current)? * &v.matrix - DMatrix::identity(d, d)));
            let phi_x = self.product_matrix(&x, &gens);
            let phi_x_inv = self.matrix_inverse(&phi_x)?;
            let ad_eta = self.algebra_coords(&(&phi_x * self.algebra_matrix(&eta) * phi_x_inv));
            let u = shifted_lu
                .solve(&ad_eta)
                .unwrap_or_else(|| linalg::lstsq(&shifted, &ad_eta).0);
            let dx = self.solve_left_jacobian(&x, &u);
            let mut step = 1.0;
            let mut improved = false;
            for _ in 0..MAX_HALVINGS {
                let trial = &x + &dx * step;
                let (m, r) = residual_of(&trial)?;
                if r < res {
                    x = trial;
                    current = m;
                    res = r;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        Ok((x, res, iterations))
    }

    /// Finds `x` with `x⁻¹ φ(x) = v` when `1 − φ` is invertible.
    pub fn delta_solve(&self, phi: &AlgebraAutomorphism, v: &GroupElement) -> Result<DeltaSolution> {
        self.check_phi_dim(phi)?;
        let n = self.dim();
        let shifted = DMatrix::identity(n, n) - &phi.matrix;
        let sigma_min = linalg::sigma_min(&shifted);
        let sigma_max = linalg::sigma_max(&shifted);
        if n > 0 && sigma_min <= INVERTIBILITY_TOL {
            return Err(Error::NotInvertible { sigma_min });
        }
        let layered = self.layered_delta_solve(phi, v)?;
        let (x, residual, iterations) = self.delta_newton(phi, v, layered.x.coords.clone())?;
        if !(residual <= DELTA_SOLVE_TOL * v.matrix.norm().max(1.0)) {
            return Err(Error::NoConvergence {
                iterations,
                residual,
            });
        }
        Ok(DeltaSolution {
            x: self.element(x)?,
            residual,
            iterations,
            sigma_min: if n == 0 { f64::INFINITY } else { sigma_min },
            condition: if n == 0 { 1.0 } else { sigma_max / sigma_min },
        })
    }

    /// Newton polishing from an arbitrary start; used by the ellipticity
    /// fallback when `1 − φ` is singular but the layered solve succeeded.
    pub(crate) fn polish_delta(
        &self,
        phi: &AlgebraAutomorphism,
        v: &GroupElement,
        start: &GroupElement,
    ) -> Result<(GroupElement, f64)> {
        let n = self.dim();
        let shifted = &phi.matrix - DMatrix::identity(n, n);
        if n > 0 && linalg::sigma_min(&shifted) <= INVERTIBILITY_TOL {
            // Newton's linearization is singular; keep the layered point.
            let gens = self.phi_generators(phi);
            let r = (self.delta_matrix(&gens, &start.coords)? - &v.matrix).norm();
            return Ok((start.clone(), r));
        }
        let (x, r, _) = self.delta_newton(phi, v, start.coords.clone())?;
        Ok((self.element(x)?, r))
    }
}

/// Wire form: `{"algebra": {...}, "realization_dim": d, "realization": [...], "adapted_order": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolvablePresentationJson {
    pub algebra: LieAlgebra,
    pub realization_dim: usize,
    pub realization: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    pub adapted_order: Option<Vec<usize>>,
}

impl TryFrom<SolvablePresentationJson> for SolvablePresentation {
    type Error = Error;

    fn try_from(j: SolvablePresentationJson) -> Result<Self> {
        let n = j.algebra.dim();
        let realization = j
            .realization
            .iter()
            .map(|m| linalg::matrix_from_rows(m, j.realization_dim))
            .collect::<Result<Vec<_>>>()?;
        let order = j.adapted_order.unwrap_or_else(|| (0..n).collect());
        SolvablePresentation::new(j.algebra, realization, order)
    }
}

impl From<&SolvablePresentation> for SolvablePresentationJson {
    fn from(p: &SolvablePresentation) -> Self {
        SolvablePresentationJson {
            algebra: p.algebra.clone(),
            realization_dim: p.realization_dim(),
            realization: p.realization.iter().map(linalg::matrix_to_rows).collect(),
            adapted_order: Some(p.adapted_order.clone()),
        }
    }
}

impl Serialize for SolvablePresentation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SolvablePresentationJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SolvablePresentation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SolvablePresentation::try_from(SolvablePresentationJson::deserialize(d)?)
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v3(a: f64, b: f64, c: f64) -> DVector<f64> {
        DVector::from_vec(vec![a, b, c])
    }

    fn unitriangular(x: f64, y: f64, z: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[1.0, x, z, 0.0, 1.0, y, 0.0, 0.0, 1.0])
    }

    #[test]
    fn heisenberg_chart_matches_unitriangular_form() {
        let p = SolvablePresentation::heisenberg();
        // exp(xX) exp(yY) exp(zZ) = [[1, x, z + xy], [0, 1, y], [0, 0, 1]]
        let g = p.element(v3(2.0, 3.0, 5.0)).unwrap();
        assert!((g.matrix() - unitriangular(2.0, 3.0, 11.0)).amax() < 1e-12);
    }

    #[test]
    fn heisenberg_commutator_lands_in_center() {
        let p = SolvablePresentation::heisenberg();
        let a = p.element(v3(1.0, 0.0, 0.0)).unwrap();
        let b = p.element(v3(0.0, 1.0, 0.0)).unwrap();
        let ab = p.multiply(&a, &b).unwrap();
        let ba = p.multiply(&b, &a).unwrap();
        assert!((ab.coords() - v3(1.0, 1.0, 0.0)).amax() < 1e-12);
        assert!((ba.coords() - v3(1.0, 1.0, -1.0)).amax() < 1e-12);
    }

    #[test]
    fn identity_and_inverse() {
        let p = SolvablePresentation::heisenberg();
        let g = p.element(v3(0.3, -1.2, 0.7)).unwrap();
        let e = p.identity();
        assert!((p.multiply(&g, &e).unwrap().coords() - g.coords()).amax() < 1e-12);
        let gi = p.inverse(&g).unwrap();
        assert!(p.multiply(&g, &gi).unwrap().coords().amax() < 1e-10);
    }

    #[test]
    fn abelian_automorphism_is_linear() {
        let p = SolvablePresentation::abelian(2);
        let rot = AlgebraAutomorphism::new(DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])).unwrap();
        let g = p.element(DVector::from_vec(vec![1.0, 0.0])).unwrap();
        let h = p.apply_automorphism(&rot, &g).unwrap();
        assert!((h.coords() - DVector::from_vec(vec![0.0, 1.0])).amax() < 1e-14);
        assert!(p.check_automorphism(&rot).unwrap().accepted);
    }

    #[test]
    fn swapping_x_and_z_is_not_an_automorphism() {
        let p = SolvablePresentation::heisenberg();
        let swap = AlgebraAutomorphism::new(DMatrix::from_row_slice(
            3,
            3,
            &[0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0],
        ))
        .unwrap();
        assert!(!p.check_automorphism(&swap).unwrap().accepted);
        assert!(p.check_automorphism(&AlgebraAutomorphism::identity(3)).unwrap().accepted);
    }

    #[test]
    fn grading_automorphism_matches_conjugation() {
        // diag(a, b, ab) is conjugation by diag(1, 1/a, 1/(ab)) on unitriangular matrices
        let (a, b) = (2.0, -0.5);
        let p = SolvablePresentation::heisenberg();
        let phi = AlgebraAutomorphism::new(DMatrix::from_diagonal(&v3(a, b, a * b))).unwrap();
        let g = p.element(v3(0.4, 1.1, -0.9)).unwrap();
        let via_coords = p.apply_automorphism(&phi, &g).unwrap();
        let c = DMatrix::from_diagonal(&v3(1.0, 1.0 / a, 1.0 / (a * b)));
        let ci = c.clone().try_inverse().unwrap();
        let via_matrix = &c * g.matrix() * ci;
        assert!((via_coords.matrix() - via_matrix).amax() < 1e-12);
    }

    #[test]
    fn delta_in_abelian_case_is_phi_minus_one() {
        let p = SolvablePresentation::abelian(2);
        let phi = AlgebraAutomorphism::new(DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])).unwrap();
        let s = p.element(DVector::from_vec(vec![1.5, -0.5])).unwrap();
        let d = p.delta(&phi, &s).unwrap();
        let expected = (phi.matrix() - DMatrix::identity(2, 2)) * s.coords();
        assert!((d.coords() - expected).amax() < 1e-10);
        let sol = p.delta_solve(&phi, &d).unwrap();
        assert!((sol.x.coords() - s.coords()).amax() < 1e-10);
    }

    #[test]
    fn delta_solve_on_heisenberg_rotation() {
        let p = SolvablePresentation::heisenberg();
        // rotation by 1 rad in (x, y), determinant 1 on the center, composed with scaling by 2
        let (c, s) = (1.0f64.cos(), 1.0f64.sin());
        let phi = AlgebraAutomorphism::new(DMatrix::from_row_slice(
            3,
            3,
            &[2.0 * c, -2.0 * s, 0.0, 2.0 * s, 2.0 * c, 0.0, 0.0, 0.0, 4.0],
        ))
        .unwrap();
        assert!(p.check_automorphism(&phi).unwrap().accepted);
        let v = p.element(v3(0.7, -1.3, 2.2)).unwrap();
        let sol = p.delta_solve(&phi, &v).unwrap();
        assert!(sol.residual <= 1e-9);
        let back = p.delta(&phi, &sol.x).unwrap();
        assert!((back.matrix() - v.matrix()).norm() <= 1e-9);
    }

    #[test]
    fn delta_solve_refuses_fixed_directions() {
        let p = SolvablePresentation::heisenberg();
        let rot = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let phi = AlgebraAutomorphism::new(rot).unwrap();
        let v = p.element(v3(0.0, 0.0, 1.0)).unwrap();
        assert!(matches!(p.delta_solve(&phi, &v), Err(Error::NotInvertible { .. })));
        let layered = p.layered_delta_solve(&phi, &v).unwrap();
        assert!((layered.obstruction() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unadapted_order_is_rejected() {
        let p = SolvablePresentation::heisenberg();
        let r = SolvablePresentation::new(p.algebra().clone(), p.realization().to_vec(), vec![2, 0, 1]);
        assert!(matches!(r, Err(Error::InvalidPresentation(_))));
    }

    #[test]
    fn json_round_trip() {
        let p = SolvablePresentation::heisenberg();
        let s = serde_json::to_string(&p).unwrap();
        let q: SolvablePresentation = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }
}
