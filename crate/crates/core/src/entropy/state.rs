use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};

/// Eigenvalues below this count as zero, with `0·log 0 = 0`.
pub const EIGEN_FLOOR: f64 = 1e-14;
/// Tolerance for symmetry and positivity of density matrices.
pub const PSD_TOL: f64 = 1e-10;
/// Tolerance on the total mass of a state.
pub const STATE_MASS_TOL: f64 = 1e-12;

/// `η(t) = −t log t`, with `η(t) = 0` below the eigenvalue floor.
pub fn eta(t: f64) -> f64 {
    if t < EIGEN_FLOOR {
        0.0
    } else {
        -t * t.ln()
    }
}

/// A unital inclusion `N ⊂ M` of multi-matrix algebras: `N = ⊕_k Mat_{n_k}`,
/// `M = ⊕_l Mat_{m_l}`, multiplicity matrix `A = (a_{kl})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Inclusion {
    sub_dims: Vec<usize>,
    amb_dims: Vec<usize>,
    mult: Vec<Vec<u64>>,
}

impl Inclusion {
    pub fn new(sub_dims: Vec<usize>, amb_dims: Vec<usize>, mult: Vec<Vec<u64>>) -> Result<Self> {
        let (kk, ll) = (sub_dims.len(), amb_dims.len());
        if kk == 0 || ll == 0 {
            return Err(Error::Validation(
                "inclusion needs at least one block on each side".into(),
            ));
        }
        if sub_dims.iter().chain(&amb_dims).any(|&d| d == 0) {
            return Err(Error::Validation("block dimensions must be ≥ 1".into()));
        }
        if mult.len() != kk || mult.iter().any(|row| row.len() != ll) {
            return Err(Error::ShapeMismatch(format!(
                "multiplicity matrix must be {kk}×{ll}"
            )));
        }
        for l in 0..ll {
            let total: u64 = (0..kk).map(|k| mult[k][l] * sub_dims[k] as u64).sum();
            if total != amb_dims[l] as u64 {
                return Err(Error::Validation(format!(
                    "unital consistency fails at block {l}: Σ_k a_kl n_k = {total}, m_l = {}",
                    amb_dims[l]
                )));
            }
        }
        if let Some(k) = (0..kk).find(|&k| mult[k].iter().all(|&a| a == 0)) {
            return Err(Error::Validation(format!(
                "row {k} of the multiplicity matrix is zero"
            )));
        }
        Ok(Self {
            sub_dims,
            amb_dims,
            mult,
        })
    }

    /// `N = M` embedded identically.
    pub fn identity(dims: Vec<usize>) -> Self {
        let n = dims.len();
        let mult = (0..n)
            .map(|k| (0..n).map(|l| u64::from(k == l)).collect())
            .collect();
        Self::new(dims.clone(), dims, mult).expect("identity inclusion is consistent")
    }

    pub fn sub_dims(&self) -> &[usize] {
        &self.sub_dims
    }

    pub fn amb_dims(&self) -> &[usize] {
        &self.amb_dims
    }

    pub fn mult(&self, k: usize, l: usize) -> u64 {
        self.mult[k][l]
    }

    pub fn multiplicities(&self) -> &[Vec<u64>] {
        &self.mult
    }

    pub fn n_sub(&self) -> usize {
        self.sub_dims.len()
    }

    pub fn n_amb(&self) -> usize {
        self.amb_dims.len()
    }

    /// `A` as a real `K × L` matrix.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n_sub(), self.n_amb(), |k, l| self.mult[k][l] as f64)
    }

    // offset of the (k, l) sub-block inside block l
    fn offset(&self, k: usize, l: usize) -> usize {
        (0..k)
            .map(|j| self.sub_dims[j] * self.mult[j][l] as usize)
            .sum()
    }

    /// `ψ(z_k w_l)`: traces of the diagonal `(k, l)` sub-blocks, as a `K × L`
    /// table.
    pub fn joint_masses(&self, psi: &BlockState) -> Result<Vec<Vec<f64>>> {
        self.check_amb(psi)?;
        let mut out = vec![vec![0.0; self.n_amb()]; self.n_sub()];
        for l in 0..self.n_amb() {
            let q = &psi.blocks[l];
            for (k, row) in out.iter_mut().enumerate() {
                let off = self.offset(k, l);
                let size = self.sub_dims[k] * self.mult[k][l] as usize;
                row[l] = (off..off + size).map(|i| q[(i, i)]).sum();
            }
        }
        Ok(out)
    }

    fn check_amb(&self, psi: &BlockState) -> Result<()> {
        let dims: Vec<usize> = psi.blocks.iter().map(|b| b.nrows()).collect();
        if dims != self.amb_dims {
            return Err(Error::ShapeMismatch(format!(
                "state has blocks {dims:?}, algebra has {:?}",
                self.amb_dims
            )));
        }
        Ok(())
    }

    /// Canonical embedding `x ↦ ⊕_l ⊕_k x_k ⊗ 1_{a_kl}`.
    pub fn embed(&self, x: &[DMatrix<f64>]) -> Result<Vec<DMatrix<f64>>> {
        if x.len() != self.n_sub()
            || x.iter()
                .zip(&self.sub_dims)
                .any(|(m, &n)| m.nrows() != n || m.ncols() != n)
        {
            return Err(Error::ShapeMismatch(
                "element does not match the subalgebra".into(),
            ));
        }
        Ok((0..self.n_amb())
            .map(|l| {
                let mut out = DMatrix::zeros(self.amb_dims[l], self.amb_dims[l]);
                for (k, xk) in x.iter().enumerate() {
                    let a = self.mult[k][l] as usize;
                    let off = self.offset(k, l);
                    for i in 0..self.sub_dims[k] {
                        for i2 in 0..self.sub_dims[k] {
                            for j in 0..a {
                                out[(off + i * a + j, off + i2 * a + j)] = xk[(i, i2)];
                            }
                        }
                    }
                }
                out
            })
            .collect())
    }
}

/// A positive functional on a multi-matrix algebra, given by its block
/// density matrices relative to the canonical trace.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockState {
    blocks: Vec<DMatrix<f64>>,
}

impl BlockState {
    /// Accepts square, symmetric, positive semidefinite blocks.
    pub fn positive(blocks: Vec<DMatrix<f64>>) -> Result<Self> {
        for (l, q) in blocks.iter().enumerate() {
            if q.nrows() != q.ncols() || q.nrows() == 0 {
                return Err(Error::ShapeMismatch(format!(
                    "block {l} is not a nonempty square matrix"
                )));
            }
            let asym = (q - q.transpose()).abs().max();
            if asym > PSD_TOL {
                return Err(Error::Validation(format!(
                    "block {l} is not symmetric ({asym:e})"
                )));
            }
            let min = SymmetricEigen::new(symmetrize(q)).eigenvalues.min();
            if min < -PSD_TOL {
                return Err(Error::Validation(format!(
                    "block {l} is not positive semidefinite (eigenvalue {min:e})"
                )));
            }
        }
        Ok(Self { blocks })
    }

    /// A positive functional of total mass one.
    pub fn state(blocks: Vec<DMatrix<f64>>) -> Result<Self> {
        let s = Self::positive(blocks)?;
        let total = s.total_mass();
        if (total - 1.0).abs() > STATE_MASS_TOL {
            return Err(Error::Validation(format!(
                "state has total mass {total}, not 1"
            )));
        }
        Ok(s)
    }

    /// The state with the given joint masses that is a multiple of the
    /// identity on every `(k, l)` sub-block.
    pub fn from_masses(inc: &Inclusion, masses: &[Vec<f64>]) -> Result<Self> {
        check_mass_shape(inc, masses)?;
        let blocks = (0..inc.n_amb())
            .map(|l| {
                let mut q = DMatrix::zeros(inc.amb_dims[l], inc.amb_dims[l]);
                for k in 0..inc.n_sub() {
                    let size = inc.sub_dims[k] * inc.mult[k][l] as usize;
                    if size == 0 {
                        if masses[k][l] > 0.0 {
                            return Err(Error::SupportViolation { k, l });
                        }
                        continue;
                    }
                    let off = inc.offset(k, l);
                    for i in off..off + size {
                        q[(i, i)] = masses[k][l] / size as f64;
                    }
                }
                Ok(q)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::state(blocks)
    }

    /// The tracial state `Tr(·)/Σ_l m_l`.
    pub fn trace_state(dims: &[usize]) -> Self {
        let total: usize = dims.iter().sum();
        Self {
            blocks: dims
                .iter()
                .map(|&m| DMatrix::identity(m, m) / total as f64)
                .collect(),
        }
    }

    pub fn blocks(&self) -> &[DMatrix<f64>] {
        &self.blocks
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.nrows()).collect()
    }

    pub fn block_mass(&self, l: usize) -> f64 {
        self.blocks[l].trace()
    }

    pub fn total_mass(&self) -> f64 {
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    /// `ψ(x) = Σ_l Tr(x_l Q_l)`.
    pub fn evaluate(&self, x: &[DMatrix<f64>]) -> f64 {
        self.blocks
            .iter()
            .zip(x)
            .map(|(q, x)| (x * q).trace())
            .sum()
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.dims() != other.dims() {
            return Err(Error::ShapeMismatch(
                "states live on different algebras".into(),
            ));
        }
        Ok(Self {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

pub(crate) fn check_mass_shape(inc: &Inclusion, masses: &[Vec<f64>]) -> Result<()> {
    if masses.len() != inc.n_sub() || masses.iter().any(|r| r.len() != inc.n_amb()) {
        return Err(Error::ShapeMismatch(format!(
            "masses must be {}×{}",
            inc.n_sub(),
            inc.n_amb()
        )));
    }
    Ok(())
}

fn symmetrize(q: &DMatrix<f64>) -> DMatrix<f64> {
    (q + q.transpose()) * 0.5
}

fn eigen(q: &DMatrix<f64>) -> SymmetricEigen<f64, nalgebra::Dyn> {
    SymmetricEigen::new(symmetrize(q))
}

/// `S(ψ) = −Σ_l Tr(Q_l log Q_l)`, in nats.
pub fn vn_entropy(psi: &BlockState) -> f64 {
    psi.blocks
        .iter()
        .map(|q| eigen(q).eigenvalues.iter().map(|&x| eta(x)).sum::<f64>())
        .sum()
}

/// Relative entropy, with `+∞` as its own variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelativeEntropy {
    Finite(f64),
    Infinite,
}

impl RelativeEntropy {
    pub fn value(self) -> f64 {
        match self {
            RelativeEntropy::Finite(x) => x,
            RelativeEntropy::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, RelativeEntropy::Finite(_))
    }
}

/// Mass of `φ` in a `ψ`-eigendirection with eigenvalue below the floor,
/// above which the support of `Q_φ` counts as not dominated.
pub const SUPPORT_MASS_TOL: f64 = 1e-12;

/// `S(φ, ψ) = Σ_l Tr(Q_φ(log Q_φ − log Q_ψ))`, blockwise, in nats.
pub fn rel_entropy(phi: &BlockState, psi: &BlockState) -> Result<RelativeEntropy> {
    if phi.dims() != psi.dims() {
        return Err(Error::ShapeMismatch(format!(
            "blocks {:?} vs {:?}",
            phi.dims(),
            psi.dims()
        )));
    }
    let mut total = 0.0;
    for (qp, qs) in phi.blocks.iter().zip(&psi.blocks) {
        let ep = eigen(qp);
        total -= ep.eigenvalues.iter().map(|&x| eta(x)).sum::<f64>();
        let es = eigen(qs);
        for (j, &mu) in es.eigenvalues.iter().enumerate() {
            let v = es.eigenvectors.column(j);
            let weight = (v.transpose() * qp * v)[(0, 0)];
            if mu < EIGEN_FLOOR {
                if weight > SUPPORT_MASS_TOL {
                    return Ok(RelativeEntropy::Infinite);
                }
            } else {
                total -= weight * mu.ln();
            }
        }
    }
    Ok(RelativeEntropy::Finite(total))
}

/// `ψ|_N`: `Qᴺ_k = Σ_l Tr_{a_kl}` of the diagonal `(k, l)` sub-block of `Q_l`.
pub fn restrict_state(inc: &Inclusion, psi: &BlockState) -> Result<BlockState> {
    inc.check_amb(psi)?;
    let blocks = (0..inc.n_sub())
        .map(|k| {
            let n = inc.sub_dims[k];
            let mut out = DMatrix::zeros(n, n);
            for l in 0..inc.n_amb() {
                let a = inc.mult[k][l] as usize;
                let off = inc.offset(k, l);
                let q = &psi.blocks[l];
                for i in 0..n {
                    for i2 in 0..n {
                        out[(i, i2)] += (0..a)
                            .map(|j| q[(off + i * a + j, off + i2 * a + j)])
                            .sum::<f64>();
                    }
                }
            }
            out
        })
        .collect();
    Ok(BlockState { blocks })
}
