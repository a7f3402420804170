//! Exact rational arithmetic for structure-constant computations.
//!
//! Algebras whose constants are rational (every algebra in the bundled
//! gallery has integer constants) can be analyzed here without any
//! tolerance: validation, derived series, Killing form, radical and the
//! compact-type test all run over `Q`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lie_algebra::{LieAlgebra, LieAlgebraJson};

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::MalformedTensor(format!("cannot parse rational `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(p))
        }
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn rational_from_json(v: &serde_json::Value) -> Result<BigRational> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(i.into()))
            } else {
                let f = n.as_f64().unwrap_or(f64::NAN);
                BigRational::from_float(f)
                    .ok_or_else(|| Error::MalformedTensor(format!("non-finite constant {n}")))
            }
        }
        serde_json::Value::String(s) => parse_rational(s),
        other => Err(Error::MalformedTensor(format!(
            "structure constant must be a number or \"p/q\" string, got {other}"
        ))),
    }
}

type Matrix = Vec<Vec<BigRational>>;

/// A Lie algebra with rational structure constants.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalLieAlgebra {
    dim: usize,
    c: Vec<BigRational>,
}

impl RationalLieAlgebra {
    pub fn from_triples(dim: usize, triples: &[(usize, usize, usize, BigRational)]) -> Result<Self> {
        let mut c = vec![BigRational::zero(); dim * dim * dim];
        let mut set = vec![false; dim * dim * dim];
        for (i, j, k, v) in triples {
            let (i, j, k) = (*i, *j, *k);
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::MalformedTensor(format!(
                    "index ({i}, {j}, {k}) out of range for dimension {dim}"
                )));
            }
            if i == j && !v.is_zero() {
                return Err(Error::MalformedTensor(format!(
                    "c[{i}][{i}][{k}] violates antisymmetry"
                )));
            }
            for (a, b, val) in [(i, j, v.clone()), (j, i, -v.clone())] {
                let p = (a * dim + b) * dim + k;
                if set[p] && c[p] != val {
                    return Err(Error::MalformedTensor(format!(
                        "conflicting explicit values for c[{a}][{b}][{k}]"
                    )));
                }
                c[p] = val;
                set[p] = true;
            }
        }
        Ok(RationalLieAlgebra { dim, c })
    }

    pub fn from_json(j: &LieAlgebraJson) -> Result<Self> {
        let triples = j
            .c
            .iter()
            .map(|(i, jj, k, v)| Ok((*i, *jj, *k, rational_from_json(v)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_triples(j.dim, &triples)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn constant(&self, i: usize, j: usize, k: usize) -> &BigRational {
        &self.c[(i * self.dim + j) * self.dim + k]
    }

    pub fn to_float(&self) -> LieAlgebra {
        let n = self.dim;
        let mut triples = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let v = self.constant(i, j, k);
                    if !v.is_zero() {
                        triples.push((i, j, k, rational_to_f64(v)));
                    }
                }
            }
        }
        LieAlgebra::from_triples(n, &triples).expect("completed tensor is consistent")
    }

    /// Exact antisymmetry and Jacobi check.
    pub fn is_valid(&self) -> bool {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if !(self.constant(i, j, k) + self.constant(j, i, k)).is_zero() {
                        return false;
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    for m in 0..n {
                        let mut s = BigRational::zero();
                        for k in 0..n {
                            s += self.constant(i, j, k) * self.constant(k, l, m)
                                + self.constant(j, l, k) * self.constant(k, i, m)
                                + self.constant(l, i, k) * self.constant(k, j, m);
                        }
                        if !s.is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn bracket(&self, x: &[BigRational], y: &[BigRational]) -> Vec<BigRational> {
        let n = self.dim;
        let mut out = vec![BigRational::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let w = &x[i] * &y[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.constant(i, j, k);
                    if !c.is_zero() {
                        *o += c * &w;
                    }
                }
            }
        }
        out
    }

    /// Dimensions of the derived series and whether it reaches zero.
    pub fn derived_series_dims(&self) -> (Vec<usize>, bool) {
        let n = self.dim;
        let mut current = identity(n);
        let mut dims = vec![n];
        loop {
            if current.is_empty() {
                return (dims, true);
            }
            let mut brackets = Vec::new();
            for a in 0..current.len() {
                for b in (a + 1)..current.len() {
                    brackets.push(self.bracket(&current[a], &current[b]));
                }
            }
            let next = row_basis(brackets);
            let stalled = next.len() == current.len();
            dims.push(next.len());
            if stalled {
                return (dims, false);
            }
            current = next;
        }
    }

    pub fn killing_form(&self) -> Matrix {
        let n = self.dim;
        let ad: Vec<Matrix> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| (0..n).map(|j| self.constant(i, j, k).clone()).collect())
                    .collect()
            })
            .collect();
        let mut k = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut t = BigRational::zero();
                for a in 0..n {
                    for b in 0..n {
                        t += &ad[i][a][b] * &ad[j][b][a];
                    }
                }
                k[i][j] = t;
            }
        }
        k
    }

    /// Basis of the radical `{x : K(x, [L, L]) = 0}` as row vectors.
    pub fn radical(&self) -> Matrix {
        let n = self.dim;
        let full = identity(n);
        let mut brackets = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                brackets.push(self.bracket(&full[a], &full[b]));
            }
        }
        let derived = row_basis(brackets);
        if derived.is_empty() {
            return full;
        }
        let k = self.killing_form();
        // rows: (K d)^T for each d in derived
        let system: Matrix = derived
            .iter()
            .map(|d| {
                (0..n)
                    .map(|i| {
                        let mut s = BigRational::zero();
                        for (j, dj) in d.iter().enumerate() {
                            s += &k[i][j] * dj;
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        null_space(system, n)
    }

    /// Negative definiteness of the Killing form by Sylvester's criterion.
    /// Errors when the algebra has a nonzero radical.
    pub fn is_compact_type(&self) -> Result<bool> {
        let rad = self.radical();
        if !rad.is_empty() {
            return Err(Error::NotSemisimple {
                radical_dim: rad.len(),
            });
        }
        let k = self.killing_form();
        let neg: Matrix = k.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
        for size in 1..=self.dim {
            let minor: Matrix = neg[..size].iter().map(|r| r[..size].to_vec()).collect();
            if !determinant(minor).is_positive() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect()
}

/// Reduced row echelon form; returns the nonzero rows and pivot columns.
fn rref(mut rows: Matrix) -> (Matrix, Vec<usize>) {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..ncols {
                    let delta = &f * &rows[r][j];
                    rows[i][j] -= delta;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

fn row_basis(rows: Matrix) -> Matrix {
    if rows.is_empty() {
        return rows;
    }
    rref(rows).0
}

fn null_space(system: Matrix, ncols: usize) -> Matrix {
    let (rows, pivots) = rref(system);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); ncols];
            v[f] = BigRational::one();
            for (row, &p) in rows.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

fn determinant(mut m: Matrix) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !m[i][col].is_zero()) else {
            return BigRational::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det *= &pivot;
        for i in (col + 1)..n {
            if m[i][col].is_zero() {
                continue;
            }
            let f = &m[i][col] / &pivot;
            for j in col..n {
                let delta = &f * &m[col][j];
                m[i][j] -= delta;
            }
        }
    }
    det
}
