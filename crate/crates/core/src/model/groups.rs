use std::ops::Range;

use nalgebra::DVector;

use crate::error::{check_len, Error, Result};

/// `g` contiguous, equal-size, disjoint groups covering `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupPartition {
    n: usize,
    groups: usize,
}

pub fn build_partition(n: usize, g: usize) -> Result<GroupPartition> {
    if n == 0 || g == 0 {
        return Err(Error::InvalidPartition(format!(
            "signal length and group count must be positive (n={n}, g={g})"
        )));
    }
    if !n.is_multiple_of(g) {
        return Err(Error::InvalidPartition(format!(
            "{g} groups do not divide a signal of length {n}"
        )));
    }
    Ok(GroupPartition { n, groups: g })
}

impl GroupPartition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_groups(&self) -> usize {
        self.groups
    }

    pub fn group_size(&self) -> usize {
        self.n / self.groups
    }

    pub fn group(&self, i: usize) -> Range<usize> {
        let s = self.group_size();
        i * s..(i + 1) * s
    }

    pub fn ranges(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        (0..self.groups).map(|i| self.group(i))
    }
}

/// Overlapping groups of fixed size where each group repeats the last
/// `overlap` indices of its predecessor.
///
/// Group `i` covers `i·stride .. i·stride + group_size` with
/// `stride = group_size - overlap`. The stacked group space has length
/// `num_groups · group_size`; [`gather`](Self::gather) is `W x` and
/// [`scatter_add`](Self::scatter_add) is `Wᵀ v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatentGroupLayout {
    n: usize,
    group_size: usize,
    overlap: usize,
    num_groups: usize,
    membership: Vec<usize>,
}

pub fn build_latent_layout(n: usize, group_size: usize, k: usize) -> Result<LatentGroupLayout> {
    if group_size < 2 || group_size > n {
        return Err(Error::InvalidLayout(format!(
            "group size {group_size} must lie in 2..={n}"
        )));
    }
    if k == 0 || k >= group_size {
        return Err(Error::InvalidLayout(format!(
            "overlap {k} must lie in 1..={} (use a partition for disjoint groups)",
            group_size - 1
        )));
    }
    let stride = group_size - k;
    if !(n - group_size).is_multiple_of(stride) {
        return Err(Error::InvalidLayout(format!(
            "stride {stride} does not divide n - group_size = {}; the last group would not end at index {}",
            n - group_size,
            n - 1
        )));
    }
    let num_groups = (n - group_size) / stride + 1;
    let mut membership = vec![0usize; n];
    for i in 0..num_groups {
        for c in &mut membership[i * stride..i * stride + group_size] {
            *c += 1;
        }
    }
    if let Some(j) = membership.iter().position(|&c| c == 0) {
        return Err(Error::InvalidLayout(format!("index {j} is not covered by any group")));
    }
    Ok(LatentGroupLayout {
        n,
        group_size,
        overlap: k,
        num_groups,
        membership,
    })
}

impl LatentGroupLayout {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn group_size(&self) -> usize {
        self.group_size
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }

    pub fn stride(&self) -> usize {
        self.group_size - self.overlap
    }

    pub fn num_groups(&self) -> usize {
        self.num_groups
    }

    /// Length of the stacked group space.
    pub fn stacked_len(&self) -> usize {
        self.num_groups * self.group_size
    }

    /// Signal indices of group `i`.
    pub fn group(&self, i: usize) -> Range<usize> {
        let start = i * self.stride();
        start..start + self.group_size
    }

    /// Slots of group `i` in the stacked space.
    pub fn stacked_group(&self, i: usize) -> Range<usize> {
        i * self.group_size..(i + 1) * self.group_size
    }

    /// Number of groups containing each index: the diagonal of `WᵀW`.
    pub fn membership_counts(&self) -> &[usize] {
        &self.membership
    }

    pub fn gather(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_len("W·x", self.n, x.len())?;
        Ok(self.gather_unchecked(x))
    }

    pub(crate) fn gather_unchecked(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.stacked_len());
        for i in 0..self.num_groups {
            out.rows_mut(i * self.group_size, self.group_size)
                .copy_from(&x.rows(i * self.stride(), self.group_size));
        }
        out
    }

    pub fn scatter_add(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        check_len("Wᵀ·v", self.stacked_len(), v.len())?;
        Ok(self.scatter_add_unchecked(v))
    }

    pub(crate) fn scatter_add_unchecked(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.n);
        for i in 0..self.num_groups {
            let mut dst = out.rows_mut(i * self.stride(), self.group_size);
            dst += v.rows(i * self.group_size, self.group_size);
        }
        out
    }
}
