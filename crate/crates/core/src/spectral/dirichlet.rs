use std::collections::HashMap;

use serde::Serialize;

use super::eigen::{dense_eigenvalues, lanczos_smallest, DENSE_CAP};
use crate::error::{Error, Result};
use crate::group::{Ball, GroupElement};
use crate::walk::Measure;

/// `Δ_μ = I - R_μ` restricted to functions supported in `Ω`, in CSR form.
#[derive(Clone, Debug)]
pub struct DirichletOperator {
    pub omega: Vec<GroupElement>,
    /// `1 - μ(e)`.
    pub diagonal: f64,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<u32>,
    /// Off-diagonal entries, all negative.
    pub vals: Vec<f64>,
}

impl DirichletOperator {
    /// Builds the operator on `Ω` (duplicates rejected). The entry between
    /// `x` and `x·γ` is `-μ(γ)`, summed over support elements `γ ≠ e`.
    pub fn new(m: &Measure, omega: &[GroupElement]) -> Result<DirichletOperator> {
        if omega.is_empty() {
            return Err(Error::Precondition("Ω must be nonempty".into()));
        }
        let mut index: HashMap<&GroupElement, u32> = HashMap::with_capacity(omega.len());
        for (i, g) in omega.iter().enumerate() {
            m.spec.check(g)?;
            if index.insert(g, i as u32).is_some() {
                return Err(Error::Precondition(format!("Ω lists {g} twice")));
            }
        }
        let e = m.spec.identity();
        let steps: Vec<(GroupElement, f64)> = m
            .support
            .iter()
            .filter(|(g, _)| *g != e)
            .map(|(g, w)| (g.clone(), Measure::to_f64(w)))
            .collect();
        let mut row_ptr = Vec::with_capacity(omega.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for x in omega {
            let mut row: Vec<(u32, f64)> = Vec::with_capacity(steps.len());
            for (g, w) in &steps {
                let y = m.spec.multiply(x, g)?;
                if let Some(&j) = index.get(&y) {
                    row.push((j, -w));
                }
            }
            row.sort_by_key(|&(j, _)| j);
            // merge repeated targets
            for (j, v) in row {
                match cols.last() {
                    Some(&last) if last == j && vals.len() > row_ptr[row_ptr.len() - 1] => {
                        *vals.last_mut().expect("nonempty") += v;
                    }
                    _ => {
                        cols.push(j);
                        vals.push(v);
                    }
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(DirichletOperator {
            omega: omega.to_vec(),
            diagonal: 1.0 - Measure::to_f64(&m.identity_weight()),
            row_ptr,
            cols,
            vals,
        })
    }

    /// Operator on the ball elements with the given indices.
    pub fn from_ball(ball: &Ball, indices: &[usize], m: &Measure) -> Result<DirichletOperator> {
        let omega = indices
            .iter()
            .map(|&i| {
                ball.elements
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::Precondition(format!("index {i} outside the ball")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(m, &omega)
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.len() {
            let mut v = self.diagonal * x[i];
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                v += self.vals[k] * x[self.cols[k] as usize];
            }
            y[i] = v;
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.len();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = self.diagonal;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                a[i * n + self.cols[k] as usize] += self.vals[k];
            }
        }
        a
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.diagonal + self.vals[self.row_ptr[i]..self.row_ptr[i + 1]].iter().sum::<f64>())
            .collect()
    }

    /// Exact structural symmetry check.
    pub fn is_symmetric(&self) -> bool {
        let entry = |i: usize, j: u32| -> Option<f64> {
            let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
            row.binary_search(&j).ok().map(|k| self.vals[self.row_ptr[i] + k])
        };
        (0..self.len()).all(|i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).all(|k| entry(self.cols[k] as usize, i as u32) == Some(self.vals[k]))
        })
    }
}

/// Sorted spectrum of a Dirichlet operator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumSummary {
    pub size: usize,
    pub lambda1: f64,
    pub eigenvalues: Vec<f64>,
}

pub fn spectrum(op: &DirichletOperator) -> Result<SpectrumSummary> {
    let eigenvalues = dense_eigenvalues(&op.to_dense(), op.len())?;
    Ok(SpectrumSummary {
        size: op.len(),
        lambda1: eigenvalues[0],
        eigenvalues,
    })
}

/// How `λ₁` was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lambda1Method {
    Dense,
    Lanczos,
}

/// Smallest eigenvalue: dense for `|Ω| ≤ 4000`, Lanczos beyond.
pub fn lambda1(op: &DirichletOperator) -> Result<(f64, Lambda1Method)> {
    let n = op.len();
    if n <= DENSE_CAP {
        let ev = dense_eigenvalues(&op.to_dense(), n)?;
        return Ok((ev[0], Lambda1Method::Dense));
    }
    // the ground state is positive on connected Ω
    let start = vec![1.0; n];
    let r = lanczos_smallest(n, &|x, y| op.apply(x, y), &start)?;
    Ok((r.value, Lambda1Method::Lanczos))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use std::f64::consts::PI;

    fn z_interval(n: usize) -> Vec<GroupElement> {
        (0..n as i64).map(|i| GroupElement::vector(&[i])).collect()
    }

    fn z_srw() -> Measure {
        let z = GroupSpec::free_abelian(1);
        Measure::srw(&z, &z.canonical_generators()).unwrap()
    }

    #[test]
    fn singleton_is_one() {
        let op = DirichletOperator::new(&z_srw(), &[GroupElement::vector(&[0])]).unwrap();
        assert_eq!(op.to_dense(), vec![1.0]);
        assert_eq!(lambda1(&op).unwrap().0, 1.0);
        assert!(matches!(DirichletOperator::new(&z_srw(), &[]), Err(Error::Precondition(_))));
    }

    #[test]
    fn interval_is_tridiagonal() {
        let n = 7;
        let op = DirichletOperator::new(&z_srw(), &z_interval(n)).unwrap();
        let a = op.to_dense();
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j {
                    1.0
                } else if i.abs_diff(j) == 1 {
                    -0.5
                } else {
                    0.0
                };
                assert_eq!(a[i * n + j], expect);
            }
        }
        assert!(op.is_symmetric());
        assert_eq!(op.row_sums()[3], 0.0);
    }

    #[test]
    fn interval_lambda1_closed_form() {
        for n in [1usize, 2, 10, 57, 200] {
            let op = DirichletOperator::new(&z_srw(), &z_interval(n)).unwrap();
            let l = lambda1(&op).unwrap().0;
            assert!((l - (1.0 - (PI / (n + 1) as f64).cos())).abs() < 1e-12);
        }
    }

    #[test]
    fn nested_boxes_monotone() {
        let z2 = GroupSpec::free_abelian(2);
        let m = Measure::srw(&z2, &z2.canonical_generators()).unwrap();
        let mut prev = f64::INFINITY;
        for k in 1..8i64 {
            let omega: Vec<_> = (0..k).flat_map(|a| (0..k).map(move |b| GroupElement::vector(&[a, b]))).collect();
            let l = lambda1(&DirichletOperator::new(&m, &omega).unwrap()).unwrap().0;
            assert!(l <= prev);
            prev = l;
        }
    }

    #[test]
    fn lanczos_path_agrees_with_closed_form() {
        let z2 = GroupSpec::free_abelian(2);
        let m = Measure::srw(&z2, &z2.canonical_generators()).unwrap();
        let k = 64i64;
        let omega: Vec<_> = (0..k).flat_map(|a| (0..k).map(move |b| GroupElement::vector(&[a, b]))).collect();
        let op = DirichletOperator::new(&m, &omega).unwrap();
        let (l, method) = lambda1(&op).unwrap();
        assert_eq!(method, Lambda1Method::Lanczos);
        let exact = 1.0 - (PI / (k + 1) as f64).cos();
        assert!((l - exact).abs() <= 1e-9 * exact);
    }
}
