//! Element-level ellipticity tests and Monte Carlo densities of the elliptic set.
//!
//! In `V ⋊ K` (and `L ⋊ K` with `L` solvable) an element `(v, s)` is elliptic
//! exactly when it is conjugate into `K`, which happens iff
//! `v = x⁻¹ φ_s(x)` for some `x`; for a vector group this reads
//! `v ∈ im(ρ(s) − 1)`. The conjugator `(x, 1)` is kept as a witness.

use nalgebra::{DMatrix, DVector, Schur};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::sampling::{self, DensityReport, LocalWindow, Parallelism, SamplerSpec};
use crate::solvable_group::{AlgebraAutomorphism, GroupElement, SolvablePresentation};
use crate::torus_rep::CompactPart;

/// Default tolerance on `||λ| − 1|` for spectral ellipticity.
pub const SPECTRAL_TOL: f64 = 1e-8;
/// Eigenvalues closer than this are treated as one cluster.
pub const CLUSTER_RADIUS: f64 = 1e-6;
pub const SINGULAR_DET: f64 = 1e-12;
/// Relative residual accepted for `v ∈ im(ρ(s) − 1)` and for witness checks.
pub const IMAGE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EllipticMethod {
    Spectral,
    AbelianImage,
    SolvableDelta,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EllipticVerdict {
    pub elliptic: bool,
    /// Coordinates of `x` in the conjugator `(x, 1)`.
    pub witness: Option<Vec<f64>>,
    pub residual: f64,
    pub method: EllipticMethod,
    /// Size of the layered linear obstruction when the fallback path ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<f64>,
}

/// `(v, s)` with `s = ρ(t)·g_c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemidirectElement {
    pub translation: Vec<f64>,
    pub torus: Vec<f64>,
    pub component: Option<usize>,
}

impl SemidirectElement {
    pub fn new(translation: Vec<f64>, torus: Vec<f64>, component: Option<usize>) -> Result<Self> {
        if translation.iter().chain(&torus).any(|v| !v.is_finite()) {
            return Err(Error::precondition("element coordinates must be finite"));
        }
        Ok(SemidirectElement {
            translation,
            torus,
            component,
        })
    }
}

/// A semidirect product `N ⋊ K` whose elements can be tested for ellipticity.
///
/// For the solvable kind the compact part acts on the Lie algebra of `N`:
/// its torus generators are derivations and its components automorphisms.
#[derive(Debug, Clone, Copy)]
pub enum SemidirectGroup<'a> {
    Vector(&'a CompactPart),
    Solvable {
        presentation: &'a SolvablePresentation,
        action: &'a CompactPart,
    },
}

impl SemidirectGroup<'_> {
    fn compact(&self) -> &CompactPart {
        match self {
            SemidirectGroup::Vector(c) => c,
            SemidirectGroup::Solvable { action, .. } => action,
        }
    }

    pub fn translation_dim(&self) -> usize {
        self.compact().torus.dim()
    }

    pub fn torus_rank(&self) -> usize {
        self.compact().torus.rank()
    }

    pub fn component_count(&self) -> usize {
        self.compact().components.len()
    }

    fn check(&self, e: &SemidirectElement) -> Result<()> {
        if e.translation.len() != self.translation_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.translation_dim(),
                found: e.translation.len(),
            });
        }
        if let Some(c) = e.component {
            if c >= self.component_count() {
                return Err(Error::precondition(format!(
                    "component index {c} out of range ({} declared)",
                    self.component_count()
                )));
            }
        }
        Ok(())
    }

    /// Ellipticity verdict for a single element.
    pub fn is_elliptic(&self, e: &SemidirectElement) -> Result<EllipticVerdict> {
        self.check(e)?;
        match self {
            SemidirectGroup::Vector(cp) => {
                is_elliptic_abelian(&DVector::from_column_slice(&e.translation), cp, &e.torus, e.component)
            }
            SemidirectGroup::Solvable {
                presentation,
                action,
            } => {
                let phi = AlgebraAutomorphism::new(action.rho(&e.torus, e.component)?)?;
                let v = presentation.element(DVector::from_column_slice(&e.translation))?;
                is_elliptic_solvable(&v, &phi, presentation)
            }
        }
    }
}

fn complex_eigenvalues(g: &DMatrix<C64>) -> Result<Vec<C64>> {
    let schur = Schur::try_new(g.clone(), f64::EPSILON, 100_000)
        .ok_or_else(|| Error::precondition("Schur decomposition did not converge"))?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

fn cluster(eigs: &[C64]) -> Vec<(C64, usize)> {
    let mut clusters: Vec<(C64, Vec<C64>)> = Vec::new();
    for &z in eigs {
        match clusters.iter_mut().find(|(c, _)| (c - z).norm() <= CLUSTER_RADIUS) {
            Some((_, members)) => members.push(z),
            None => clusters.push((z, vec![z])),
        }
    }
    clusters
        .into_iter()
        .map(|(_, m)| {
            let mean = m.iter().sum::<C64>() / m.len() as f64;
            (mean, m.len())
        })
        .collect()
}

/// Spectral test for a complex matrix: diagonalizable with unimodular spectrum.
pub fn is_elliptic_complex_matrix(g: &DMatrix<C64>, tol: f64) -> Result<EllipticVerdict> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch {
            expected: g.nrows(),
            found: g.ncols(),
        });
    }
    let n = g.nrows();
    let verdict = |elliptic, residual| EllipticVerdict {
        elliptic,
        witness: None,
        residual,
        method: EllipticMethod::Spectral,
        obstruction: None,
    };
    if n == 0 {
        return Ok(verdict(true, 0.0));
    }
    let eigs = complex_eigenvalues(g)?;
    let det: C64 = eigs.iter().product();
    if det.norm() <= SINGULAR_DET {
        return Err(Error::SingularMatrix { det: det.norm() });
    }
    let norm = linalg::sigma_max_c(g);
    let cutoff = linalg::RANK_CUTOFF * norm;
    for (lambda, mult) in cluster(&eigs) {
        let shifted = g - DMatrix::<C64>::identity(n, n) * lambda;
        let sv = shifted.singular_values();
        let rank = sv.iter().filter(|&&s| s > cutoff).count();
        if rank != n - mult {
            return Ok(verdict(false, (rank + mult - n) as f64));
        }
    }
    let mut worst: f64 = 0.0;
    for z in &eigs {
        let dev = (z.norm() - 1.0).abs();
        if dev > tol / 10.0 && dev < tol * 10.0 {
            return Err(Error::SpectralAmbiguity { modulus: z.norm() });
        }
        worst = worst.max(dev);
    }
    Ok(verdict(worst <= tol, worst))
}

pub fn is_elliptic_matrix(g: &DMatrix<f64>, tol: f64) -> Result<EllipticVerdict> {
    is_elliptic_complex_matrix(&linalg::to_complex(g), tol)
}

/// `(v, s)` in `V ⋊ K` is elliptic iff `(ρ(s) − 1) x = v` is solvable.
pub fn is_elliptic_abelian(
    v: &DVector<f64>,
    compact: &CompactPart,
    t: &[f64],
    component: Option<usize>,
) -> Result<EllipticVerdict> {
    let n = compact.torus.dim();
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    let a = compact.rho(t, component)? - DMatrix::identity(n, n);
    let (x, res) = linalg::lstsq(&a, v);
    let scale = v.norm();
    let relative = if scale == 0.0 { 0.0 } else { res / scale };
    let elliptic = relative <= IMAGE_TOL;
    Ok(EllipticVerdict {
        elliptic,
        witness: elliptic.then(|| x.as_slice().to_vec()),
        residual: relative,
        method: EllipticMethod::AbelianImage,
        obstruction: None,
    })
}

/// `(v, s)` in `L ⋊ K` with `φ_s = Ad_s` on the Lie algebra of `L`.
///
/// Tries the δ-solver first. When `1 − φ_s` is singular the layered solve
/// is used instead; a clear obstruction means not elliptic, a borderline one
/// is reported as [`Error::Undetermined`].
pub fn is_elliptic_solvable(
    v: &GroupElement,
    phi: &AlgebraAutomorphism,
    p: &SolvablePresentation,
) -> Result<EllipticVerdict> {
    let scale = v.matrix().norm().max(1.0);
    let make = |elliptic: bool, witness: Option<&GroupElement>, residual, obstruction| EllipticVerdict {
        elliptic,
        witness: witness.map(|x| x.coords().as_slice().to_vec()),
        residual,
        method: EllipticMethod::SolvableDelta,
        obstruction,
    };
    match p.delta_solve(phi, v) {
        Ok(sol) => {
            let r = witness_residual(p, phi, v, &sol.x)?;
            Ok(make(true, Some(&sol.x), r, None))
        }
        Err(Error::NotInvertible { .. }) => {
            let layered = p.layered_delta_solve(phi, v)?;
            let obstruction = layered.obstruction();
            if obstruction > 10.0 * IMAGE_TOL {
                return Ok(make(false, None, obstruction, Some(obstruction)));
            }
            if obstruction > IMAGE_TOL {
                return Err(Error::Undetermined { obstruction });
            }
            let (x, _) = p.polish_delta(phi, v, &layered.x)?;
            let r = witness_residual(p, phi, v, &x)?;
            if r <= IMAGE_TOL * scale {
                Ok(make(true, Some(&x), r, Some(obstruction)))
            } else {
                Err(Error::Undetermined { obstruction: r })
            }
        }
        Err(e) => Err(e),
    }
}

/// `‖x v φ(x)⁻¹ − 1‖`, the translation part left after conjugating by `(x, 1)`.
fn witness_residual(
    p: &SolvablePresentation,
    phi: &AlgebraAutomorphism,
    v: &GroupElement,
    x: &GroupElement,
) -> Result<f64> {
    let phi_x = p.phi_matrix(phi, x);
    let inv = phi_x
        .try_inverse()
        .ok_or_else(|| Error::precondition("automorphism image is singular"))?;
    let d = p.realization_dim();
    Ok((x.matrix() * v.matrix() * inv - DMatrix::identity(d, d)).norm())
}

/// Conjugator `u = (x, 1)` with `u e u⁻¹ ∈ K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conjugator {
    pub translation: Vec<f64>,
    /// Norm of the translation part of `u e u⁻¹`.
    pub residual: f64,
}

/// For `e = (v, s)` in `V ⋊ K`: `u e u⁻¹ = (x + v − ρ(s) x, s)`.
pub fn conjugate_into_k(e: &SemidirectElement, compact: &CompactPart) -> Result<Conjugator> {
    let v = DVector::from_column_slice(&e.translation);
    let verdict = is_elliptic_abelian(&v, compact, &e.torus, e.component)?;
    let x = match verdict.witness {
        Some(x) if verdict.elliptic => DVector::from_vec(x),
        _ => return Err(Error::NoWitness),
    };
    let rho = compact.rho(&e.torus, e.component)?;
    let translation_after = &x + &v - rho * &x;
    Ok(Conjugator {
        translation: x.as_slice().to_vec(),
        residual: translation_after.norm(),
    })
}

/// Solvable analogue: returns `x` with `x v φ(x)⁻¹ = 1`.
pub fn conjugate_into_k_solvable(
    v: &GroupElement,
    phi: &AlgebraAutomorphism,
    p: &SolvablePresentation,
) -> Result<Conjugator> {
    let verdict = is_elliptic_solvable(v, phi, p)?;
    match verdict.witness {
        Some(x) if verdict.elliptic => Ok(Conjugator {
            translation: x,
            residual: verdict.residual,
        }),
        _ => Err(Error::NoWitness),
    }
}

fn tally(
    results: Vec<Result<EllipticVerdict>>,
    n: usize,
    seed: u64,
    sampler: SamplerSpec,
) -> Result<DensityReport> {
    let mut hits = 0;
    let mut undetermined = 0;
    for r in results {
        match r {
            Ok(v) if v.elliptic => hits += 1,
            Ok(_) => {}
            Err(Error::Undetermined { .. })
            | Err(Error::NoConvergence { .. })
            | Err(Error::SpectralAmbiguity { .. }) => undetermined += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(DensityReport::new(hits, undetermined, n, seed, sampler))
}

/// One draw from Gaussian(translation) × Haar(torus) × uniform(cosets).
fn draw_global<R: Rng>(group: SemidirectGroup<'_>, translation_scale: f64, rng: &mut R) -> SemidirectElement {
    let comps = group.component_count();
    let translation: Vec<f64> = (0..group.translation_dim())
        .map(|_| translation_scale * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let torus: Vec<f64> = (0..group.torus_rank()).map(|_| rng.random::<f64>()).collect();
    let component = if comps == 0 {
        None
    } else {
        match rng.random_range(0..=comps) {
            0 => None,
            c => Some(c - 1),
        }
    };
    SemidirectElement {
        translation,
        torus,
        component,
    }
}

/// Same sample stream as [`elliptic_density`] on `V ⋊ K`, classified instead
/// by the spectral test on the affine matrix `[[ρ(s), v], [0, 1]]`.
pub fn spectral_elliptic_density(
    compact: &CompactPart,
    n: usize,
    seed: u64,
    translation_scale: f64,
    tol: f64,
    par: Parallelism,
) -> Result<DensityReport> {
    sampling::check_sample_count(n)?;
    if !(translation_scale > 0.0) {
        return Err(Error::precondition("translation scale must be positive"));
    }
    let group = SemidirectGroup::Vector(compact);
    let d = compact.torus.dim();
    let results = sampling::map_samples(n, seed, par, |_, rng| {
        let e = draw_global(group, translation_scale, rng);
        let rho = compact.rho(&e.torus, e.component)?;
        let mut affine = DMatrix::identity(d + 1, d + 1);
        affine.view_mut((0, 0), (d, d)).copy_from(&rho);
        for (i, v) in e.translation.iter().enumerate() {
            affine[(i, d)] = *v;
        }
        is_elliptic_matrix(&affine, tol)
    });
    tally(results, n, seed, SamplerSpec::global(translation_scale))
}

/// Fraction of elliptic elements under Gaussian(translation) × Haar(torus) ×
/// uniform(components), where the identity component counts as one of the
/// `components + 1` cosets.
pub fn elliptic_density(
    group: SemidirectGroup<'_>,
    n: usize,
    seed: u64,
    translation_scale: f64,
    par: Parallelism,
) -> Result<DensityReport> {
    sampling::check_sample_count(n)?;
    if !(translation_scale > 0.0) {
        return Err(Error::precondition("translation scale must be positive"));
    }
    let results = sampling::map_samples(n, seed, par, |_, rng| {
        group.is_elliptic(&draw_global(group, translation_scale, rng))
    });
    tally(results, n, seed, SamplerSpec::global(translation_scale))
}

/// Density of elliptic elements near `center`: translation uniform in the
/// ball of the given radius, torus coordinates uniform in the cube of that
/// half-width, component fixed.
pub fn local_elliptic_density(
    group: SemidirectGroup<'_>,
    center: &SemidirectElement,
    radius: f64,
    n: usize,
    seed: u64,
    par: Parallelism,
) -> Result<DensityReport> {
    sampling::check_sample_count(n)?;
    if !(radius > 0.0) {
        return Err(Error::precondition("local window radius must be positive"));
    }
    group.check(center)?;
    if center.torus.len() != group.torus_rank() {
        return Err(Error::DimensionMismatch {
            expected: group.torus_rank(),
            found: center.torus.len(),
        });
    }
    let dim = group.translation_dim();
    let results = sampling::map_samples(n, seed, par, |_, rng| {
        let dir: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let r = radius * rng.random::<f64>().powf(1.0 / dim.max(1) as f64);
        let translation: Vec<f64> = center
            .translation
            .iter()
            .zip(&dir)
            .map(|(c, d)| if norm > 0.0 { c + r * d / norm } else { *c })
            .collect();
        let torus: Vec<f64> = center
            .torus
            .iter()
            .map(|c| c + radius * (2.0 * rng.random::<f64>() - 1.0))
            .collect();
        group.is_elliptic(&SemidirectElement {
            translation,
            torus,
            component: center.component,
        })
    });
    let mut sampler = SamplerSpec::global(0.0);
    sampler.local = Some(LocalWindow {
        radius,
        center_translation: center.translation.clone(),
        center_torus: center.torus.clone(),
        component: center.component,
    });
    tally(results, n, seed, sampler)
}

/// `max_{1 ≤ k ≤ k_max} ‖t^k − 1‖₂` for each matrix of the family.
pub fn power_norm_divergence(family: &[DMatrix<C64>], k_max: usize) -> Result<Vec<f64>> {
    if k_max == 0 {
        return Err(Error::precondition("k_max must be at least 1"));
    }
    family
        .iter()
        .map(|t| {
            if !t.is_square() {
                return Err(Error::DimensionMismatch {
                    expected: t.nrows(),
                    found: t.ncols(),
                });
            }
            let n = t.nrows();
            let id = DMatrix::<C64>::identity(n, n);
            let mut power = id.clone();
            let mut sup: f64 = 0.0;
            for _ in 0..k_max {
                power = &power * t;
                sup = sup.max(linalg::sigma_max_c(&(&power - &id)));
            }
            Ok(sup)
        })
        .collect()
}

/// The matrix on `C^n` acting by `λ` on the line spanned by
/// `u = e_1 + ε e_n` and trivially on the hyperplane `e_n^⊥`:
/// `t = 1 + (λ − 1)/ε · u e_nᵀ`. As `ε → 0` the line tilts into the hyperplane.
pub fn tilted_line_element(n: usize, lambda: C64, tilt: f64) -> Result<DMatrix<C64>> {
    if n < 2 {
        return Err(Error::precondition("the tilted-line family needs n ≥ 2"));
    }
    if !(tilt > 0.0) {
        return Err(Error::precondition("tilt must be positive"));
    }
    let mut t = DMatrix::<C64>::identity(n, n);
    let c = (lambda - C64::new(1.0, 0.0)) / tilt;
    t[(0, n - 1)] += c;
    t[(n - 1, n - 1)] += c * tilt;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus_rep::TorusRep;

    fn rot2() -> CompactPart {
        CompactPart::connected(TorusRep::from_blocks(1, &[vec![1]], 0).unwrap())
    }

    #[test]
    fn spectral_examples() {
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(is_elliptic_matrix(&rot, SPECTRAL_TOL).unwrap().elliptic);
        let unip = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(!is_elliptic_matrix(&unip, SPECTRAL_TOL).unwrap().elliptic);
        let hyp = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]);
        assert!(!is_elliptic_matrix(&hyp, SPECTRAL_TOL).unwrap().elliptic);
        let sing = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(is_elliptic_matrix(&sing, SPECTRAL_TOL), Err(Error::SingularMatrix { .. })));
        let near = DMatrix::from_row_slice(1, 1, &[1.0 + 5e-8]);
        assert!(matches!(is_elliptic_matrix(&near, SPECTRAL_TOL), Err(Error::SpectralAmbiguity { .. })));
    }

    #[test]
    fn abelian_examples() {
        let cp = rot2();
        let zero = DVector::zeros(2);
        assert!(is_elliptic_abelian(&zero, &cp, &[0.3], None).unwrap().elliptic);
        let v = DVector::from_vec(vec![1.0, -2.0]);
        let half = is_elliptic_abelian(&v, &cp, &[0.5], None).unwrap();
        assert!(half.elliptic);
        let x = DVector::from_vec(half.witness.unwrap());
        assert!((x + &v / 2.0).amax() < 1e-12);
        assert!(!is_elliptic_abelian(&v, &cp, &[0.0], None).unwrap().elliptic);

        let line = CompactPart::connected(TorusRep::from_blocks(1, &[vec![1]], 1).unwrap());
        let fixed = DVector::from_vec(vec![0.0, 0.0, 1.0]);
        for t in [0.1, 0.5, 0.77] {
            assert!(!is_elliptic_abelian(&fixed, &line, &[t], None).unwrap().elliptic);
        }
    }

    #[test]
    fn conjugator_clears_translation() {
        let cp = rot2();
        let e = SemidirectElement::new(vec![0.4, 1.0], vec![0.5], None).unwrap();
        let u = conjugate_into_k(&e, &cp).unwrap();
        assert!(u.residual < 1e-12);
        assert!((u.translation[0] + 0.2).abs() < 1e-12);
        let id = SemidirectElement::new(vec![0.0, 0.0], vec![0.3], None).unwrap();
        assert_eq!(conjugate_into_k(&id, &cp).unwrap().translation, vec![0.0, 0.0]);
        let line = CompactPart::connected(TorusRep::from_blocks(1, &[vec![1]], 1).unwrap());
        let bad = SemidirectElement::new(vec![0.0, 0.0, 1.0], vec![0.3], None).unwrap();
        assert!(matches!(conjugate_into_k(&bad, &line), Err(Error::NoWitness)));
    }

    #[test]
    fn densities_for_rotation_and_trivial_line() {
        let par = Parallelism::default();
        let cp = rot2();
        let d = elliptic_density(SemidirectGroup::Vector(&cp), 10_000, 0, 1.0, par).unwrap();
        assert_eq!((d.fraction, d.undetermined), (1.0, 0));
        let line = CompactPart::connected(TorusRep::from_blocks(1, &[vec![1]], 1).unwrap());
        let d = elliptic_density(SemidirectGroup::Vector(&line), 10_000, 0, 1.0, par).unwrap();
        assert_eq!(d.fraction, 0.0);
        assert!(elliptic_density(SemidirectGroup::Vector(&cp), 99, 0, 1.0, par).is_err());
    }

    #[test]
    fn local_density_examples() {
        let par = Parallelism::default();
        let cp = rot2();
        let center = SemidirectElement::new(vec![1.0, 0.0], vec![0.5], None).unwrap();
        let g = SemidirectGroup::Vector(&cp);
        assert_eq!(local_elliptic_density(g, &center, 0.01, 1000, 0, par).unwrap().fraction, 1.0);
        assert!(local_elliptic_density(g, &center, 0.0, 1000, 0, par).is_err());
    }

    #[test]
    fn power_norms() {
        let id = DMatrix::<C64>::identity(2, 2);
        assert_eq!(power_norm_divergence(&[id], 100).unwrap(), vec![0.0]);
        let lambda = C64::from_polar(1.0, std::f64::consts::TAU / 3.0);
        let d = DMatrix::from_diagonal_element(2, 2, lambda);
        assert!(power_norm_divergence(&[d], 2).unwrap()[0] >= 3f64.sqrt() - 1e-9);
        assert!(power_norm_divergence(&[], 0).is_err());
    }

    #[test]
    fn tilted_line_has_closed_form_powers() {
        let lambda = C64::from_polar(1.0, std::f64::consts::TAU * 0.1);
        let eps = 0.05;
        let t = tilted_line_element(3, lambda, eps).unwrap();
        // t^k − 1 = (λ^k − 1)/ε · u e_nᵀ, with ‖u‖ = √(1 + ε²)
        let sup = power_norm_divergence(&[t], 10).unwrap()[0];
        let expected = (1..=10)
            .map(|k| (lambda.powu(k) - 1.0).norm())
            .fold(0.0, f64::max)
            * (1.0 + eps * eps).sqrt()
            / eps;
        assert!((sup - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn spectral_route_matches_image_route() {
        for trivial in [0, 1] {
            let k = CompactPart::connected(TorusRep::from_blocks(1, &[vec![1]], trivial).unwrap());
            let par = Parallelism::sequential();
            let a = elliptic_density(SemidirectGroup::Vector(&k), 500, 3, 1.0, par).unwrap();
            let b = spectral_elliptic_density(&k, 500, 3, 1.0, SPECTRAL_TOL, par).unwrap();
            assert_eq!((a.hits, a.undetermined), (b.hits, b.undetermined));
        }
    }
}
