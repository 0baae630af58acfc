use crate::error::{check_dim, Error, Result};
use crate::jets::Scalar;

/// Dense symmetric multilinear map `dⁱψ(x) : (ℝⁿ)ⁱ → ℝᵐ`.
///
/// Entries are stored output-major, then argument indices with the first
/// argument most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor {
    order: usize,
    dim_in: usize,
    dim_out: usize,
    data: Vec<f64>,
}

impl SymTensor {
    pub fn from_fn(
        order: usize,
        dim_in: usize,
        dim_out: usize,
        mut f: impl FnMut(usize, &[usize]) -> f64,
    ) -> Self {
        let per_out = dim_in.pow(order as u32);
        let mut data = Vec::with_capacity(dim_out * per_out);
        let mut idx = vec![0usize; order];
        for out in 0..dim_out {
            for flat in 0..per_out {
                let mut r = flat;
                for slot in (0..order).rev() {
                    idx[slot] = r % dim_in;
                    r /= dim_in;
                }
                data.push(f(out, &idx));
            }
        }
        Self {
            order,
            dim_in,
            dim_out,
            data,
        }
    }

    pub fn zeros(order: usize, dim_in: usize, dim_out: usize) -> Self {
        Self::from_fn(order, dim_in, dim_out, |_, _| 0.0)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn entry(&self, out: usize, idx: &[usize]) -> f64 {
        let flat = idx.iter().fold(0, |acc, &i| acc * self.dim_in + i);
        self.data[out * self.dim_in.pow(self.order as u32) + flat]
    }

    /// Applies the multilinear map to `args`, one contraction per argument.
    pub fn apply<S: Scalar>(&self, args: &[&[S]]) -> Result<Vec<S>> {
        if args.len() != self.order {
            return Err(Error::OrderMismatch {
                expected: self.order,
                found: args.len(),
            });
        }
        for a in args {
            check_dim(self.dim_in, a.len())?;
        }
        let n = self.dim_in;
        let Some(last) = args.last() else {
            return Ok(self.data.iter().map(|&v| S::constant(v)).collect());
        };
        let mut cur: Vec<S> = self
            .data
            .chunks(n)
            .map(|row| {
                row.iter()
                    .zip(last.iter())
                    .filter(|(c, _)| **c != 0.0)
                    .fold(S::zero(), |acc, (c, a)| acc + a.scale(*c))
            })
            .collect();
        for a in args[..args.len() - 1].iter().rev() {
            cur = cur
                .chunks(n)
                .map(|row| {
                    row.iter()
                        .zip(a.iter())
                        .fold(S::zero(), |acc, (c, v)| acc + c.clone() * v.clone())
                })
                .collect();
        }
        Ok(cur)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest entry change under swapping any two argument slots.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let per_out = self.dim_in.pow(self.order as u32);
        let mut idx = vec![0usize; self.order];
        for out in 0..self.dim_out {
            for flat in 0..per_out {
                let mut r = flat;
                for slot in (0..self.order).rev() {
                    idx[slot] = r % self.dim_in;
                    r /= self.dim_in;
                }
                let base = self.entry(out, &idx);
                for a in 0..self.order {
                    for b in a + 1..self.order {
                        let mut sw = idx.clone();
                        sw.swap(a, b);
                        worst = worst.max((self.entry(out, &sw) - base).abs());
                    }
                }
            }
        }
        worst
    }

    /// The matrix of a first-order tensor, row `out`, column `in`.
    pub fn as_matrix(&self) -> crate::linalg::Mat<f64> {
        assert_eq!(self.order, 1, "only first-order tensors are matrices");
        crate::linalg::Mat::from_fn(self.dim_out, self.dim_in, |r, c| self.entry(r, &[c]))
    }
}
