//! Dense potentials over discrete variables.
//!
//! A [`Table`] stores one `f64` per configuration of its [`Domain`], row-major
//! with the last domain variable varying fastest. Domains are kept sorted by
//! [`VarId`]; since diagrams number their variables by ascending
//! `(stage rank, name)`, this is the canonical variable order everywhere.
//!
//! Binary operations auto-extend both operands to the union domain.

mod contraction;

pub use contraction::{
    elimination_sequence, marg_all, marg_all_in_order, MaxStep, PairContraction,
};

use std::fmt;

use crate::error::{Error, Result};

/// Index of a variable inside its influence diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Sorted set of variables together with their state counts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Domain {
    vars: Vec<VarId>,
    cards: Vec<usize>,
}

impl Domain {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a domain from `(variable, state count)` pairs in any order.
    /// Repeated variables are merged; conflicting state counts are an error.
    pub fn new(pairs: impl IntoIterator<Item = (VarId, usize)>) -> Result<Self> {
        let mut pairs: Vec<(VarId, usize)> = pairs.into_iter().collect();
        pairs.sort_by_key(|&(v, _)| v);
        let mut vars = Vec::with_capacity(pairs.len());
        let mut cards: Vec<usize> = Vec::with_capacity(pairs.len());
        for (v, c) in pairs {
            if c == 0 {
                return Err(Error::DomainMismatch(format!("variable {v} has no states")));
            }
            if vars.last() == Some(&v) {
                if cards.last() != Some(&c) {
                    return Err(Error::DomainMismatch(format!(
                        "variable {v} given state counts {} and {c}",
                        cards.last().unwrap()
                    )));
                }
                continue;
            }
            vars.push(v);
            cards.push(c);
        }
        Ok(Self { vars, cards })
    }

    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    /// Number of configurations (1 for the empty domain).
    pub fn size(&self) -> usize {
        self.cards.iter().product()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, usize)> + '_ {
        self.vars.iter().copied().zip(self.cards.iter().copied())
    }

    pub fn position(&self, v: VarId) -> Option<usize> {
        self.vars.binary_search(&v).ok()
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.position(v).is_some()
    }

    pub fn card(&self, v: VarId) -> Option<usize> {
        self.position(v).map(|i| self.cards[i])
    }

    pub fn is_subset(&self, other: &Domain) -> bool {
        self.vars.iter().all(|&v| other.contains(v))
    }

    pub fn union(&self, other: &Domain) -> Result<Domain> {
        Domain::new(self.iter().chain(other.iter()))
    }

    pub fn without(&self, v: VarId) -> Domain {
        let (vars, cards) = self.iter().filter(|&(w, _)| w != v).unzip();
        Domain { vars, cards }
    }

    /// Row-major strides of this domain's own layout.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.len()];
        for i in (0..self.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.cards[i + 1];
        }
        strides
    }

    /// For each variable of `target`, the stride of that variable in this
    /// domain's layout, or 0 when it does not occur here.
    fn strides_along(&self, target: &Domain) -> Vec<usize> {
        let own = self.strides();
        target
            .vars
            .iter()
            .map(|&v| self.position(v).map_or(0, |i| own[i]))
            .collect()
    }

    /// Flat offset of a configuration given as one state index per domain
    /// variable.
    pub fn offset(&self, states: &[usize]) -> usize {
        debug_assert_eq!(states.len(), self.len());
        states
            .iter()
            .zip(&self.cards)
            .fold(0, |acc, (&s, &c)| acc * c + s)
    }

    /// Flat offset of the projection of a full assignment (indexed by
    /// `VarId.0`) onto this domain.
    pub fn offset_of_assignment(&self, full: &[usize]) -> usize {
        self.vars
            .iter()
            .zip(&self.cards)
            .fold(0, |acc, (v, &c)| acc * c + full[v.0])
    }

    /// Decodes a flat offset into per-variable state indices.
    pub fn states_at(&self, mut offset: usize) -> Vec<usize> {
        let mut states = vec![0; self.len()];
        for i in (0..self.len()).rev() {
            states[i] = offset % self.cards[i];
            offset /= self.cards[i];
        }
        states
    }
}

/// Strides of an arbitrary-order `layout`, listed along the sorted `target`.
fn layout_strides(layout: &[(VarId, usize)], target: &Domain) -> Vec<usize> {
    let mut strides = vec![0; layout.len()];
    let mut acc = 1;
    for i in (0..layout.len()).rev() {
        strides[i] = acc;
        acc *= layout[i].1;
    }
    target
        .vars
        .iter()
        .map(|v| {
            layout
                .iter()
                .position(|p| p.0 == *v)
                .map_or(0, |i| strides[i])
        })
        .collect()
}

/// Mixed-radix counter walking a domain in row-major order while tracking
/// the matching offsets into several operand layouts.
struct Walker {
    cards: Vec<usize>,
    counters: Vec<usize>,
    strides: Vec<Vec<usize>>,
    offsets: Vec<usize>,
}

impl Walker {
    fn new(domain: &Domain, strides: Vec<Vec<usize>>) -> Self {
        let offsets = vec![0; strides.len()];
        Self {
            cards: domain.cards.clone(),
            counters: vec![0; domain.len()],
            strides,
            offsets,
        }
    }

    fn advance(&mut self) {
        for d in (0..self.cards.len()).rev() {
            self.counters[d] += 1;
            for (off, s) in self.offsets.iter_mut().zip(&self.strides) {
                *off += s[d];
            }
            if self.counters[d] < self.cards[d] {
                return;
            }
            for (off, s) in self.offsets.iter_mut().zip(&self.strides) {
                *off -= s[d] * self.cards[d];
            }
            self.counters[d] = 0;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    domain: Domain,
    values: Vec<f64>,
}

impl Table {
    pub fn new(domain: Domain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.size() {
            return Err(Error::DomainMismatch(format!(
                "{} values for a domain of {} cells",
                values.len(),
                domain.size()
            )));
        }
        Ok(Self { domain, values })
    }

    /// Builds a table from values laid out row-major over `layout` (last
    /// entry fastest), which need not be in canonical order.
    pub fn from_layout(layout: &[(VarId, usize)], values: Vec<f64>) -> Result<Self> {
        let domain = Domain::new(layout.iter().copied())?;
        if domain.len() != layout.len() {
            return Err(Error::DomainMismatch("repeated variable in layout".into()));
        }
        if values.len() != domain.size() {
            return Err(Error::DomainMismatch(format!(
                "{} values for a domain of {} cells",
                values.len(),
                domain.size()
            )));
        }
        let strides = layout_strides(layout, &domain);
        let mut walker = Walker::new(&domain, vec![strides]);
        let mut out = Vec::with_capacity(domain.size());
        for _ in 0..domain.size() {
            out.push(values[walker.offsets[0]]);
            walker.advance();
        }
        Ok(Self {
            domain,
            values: out,
        })
    }

    /// The values laid out row-major over `layout`, a permutation of the
    /// domain.
    pub fn values_in_layout(&self, layout: &[VarId]) -> Result<Vec<f64>> {
        let pairs = layout
            .iter()
            .map(|&v| {
                self.domain
                    .card(v)
                    .map(|c| (v, c))
                    .ok_or(Error::NotInDomain { var: v })
            })
            .collect::<Result<Vec<_>>>()?;
        if pairs.len() != self.domain.len() {
            return Err(Error::DomainMismatch(
                "layout is not a permutation of the domain".into(),
            ));
        }
        let target = Domain {
            vars: layout.to_vec(),
            cards: pairs.iter().map(|p| p.1).collect(),
        };
        // Walk the layout order; look up canonical offsets.
        let own = self.domain.strides();
        let strides = layout
            .iter()
            .map(|&v| own[self.domain.position(v).unwrap()])
            .collect();
        let mut walker = Walker::new(&target, vec![strides]);
        let mut out = Vec::with_capacity(self.values.len());
        for _ in 0..self.values.len() {
            out.push(self.values[walker.offsets[0]]);
            walker.advance();
        }
        Ok(out)
    }

    pub fn constant(domain: Domain, value: f64) -> Self {
        let values = vec![value; domain.size()];
        Self { domain, values }
    }

    /// The all-ones probability potential.
    pub fn unit(domain: Domain) -> Self {
        Self::constant(domain, 1.0)
    }

    /// The all-zeros utility potential.
    pub fn null(domain: Domain) -> Self {
        Self::constant(domain, 0.0)
    }

    pub fn scalar(value: f64) -> Self {
        Self::constant(Domain::empty(), value)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at a configuration given as one state index per domain variable.
    pub fn get(&self, states: &[usize]) -> f64 {
        self.values[self.domain.offset(states)]
    }

    /// Value at the projection of a full assignment indexed by `VarId.0`.
    pub fn eval(&self, full: &[usize]) -> f64 {
        self.values[self.domain.offset_of_assignment(full)]
    }

    /// The single value of a scalar table.
    pub fn as_scalar(&self) -> Option<f64> {
        self.domain.is_empty().then(|| self.values[0])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Table {
        Table {
            domain: self.domain.clone(),
            values: self.values.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Extends the table to `target` by ignoring the extra variables.
    pub fn extend(&self, target: &Domain) -> Result<Table> {
        for (v, c) in self.domain.iter() {
            match target.card(v) {
                Some(tc) if tc == c => {}
                Some(tc) => {
                    return Err(Error::DomainMismatch(format!(
                        "variable {v} has {c} states here and {tc} in the target"
                    )))
                }
                None => return Err(Error::NotInDomain { var: v }),
            }
        }
        let strides = self.domain.strides_along(target);
        let mut walker = Walker::new(target, vec![strides]);
        let mut values = Vec::with_capacity(target.size());
        for _ in 0..target.size() {
            values.push(self.values[walker.offsets[0]]);
            walker.advance();
        }
        Ok(Table {
            domain: target.clone(),
            values,
        })
    }

    fn zip_with<T>(&self, other: &Table, mut f: impl FnMut(f64, f64) -> T) -> (Domain, Vec<T>) {
        let domain = self
            .domain
            .union(&other.domain)
            .expect("operands disagree on a variable's state count");
        let strides = vec![
            self.domain.strides_along(&domain),
            other.domain.strides_along(&domain),
        ];
        let mut walker = Walker::new(&domain, strides);
        let mut out = Vec::with_capacity(domain.size());
        for _ in 0..domain.size() {
            out.push(f(
                self.values[walker.offsets[0]],
                other.values[walker.offsets[1]],
            ));
            walker.advance();
        }
        (domain, out)
    }

    /// Pointwise product over the union domain.
    pub fn multiply(&self, other: &Table) -> Table {
        let (domain, values) = self.zip_with(other, |a, b| a * b);
        Table { domain, values }
    }

    /// Pointwise sum over the union domain.
    pub fn add(&self, other: &Table) -> Table {
        let (domain, values) = self.zip_with(other, |a, b| a + b);
        Table { domain, values }
    }

    /// Pointwise quotient with `0/0 = 0`; `x/0` for `x != 0` is an error.
    pub fn divide(&self, den: &Table) -> Result<Table> {
        let mut bad = None;
        let (domain, values) = self.zip_with(den, |n, d| {
            if d == 0.0 {
                if n != 0.0 && bad.is_none() {
                    bad = Some(n);
                }
                0.0
            } else {
                n / d
            }
        });
        match bad {
            Some(numerator) => Err(Error::UndefinedDivision { numerator }),
            None => Ok(Table { domain, values }),
        }
    }

    fn reduce_over(
        &self,
        v: VarId,
        mut fold: impl FnMut(&mut dyn Iterator<Item = (usize, f64)>) -> f64,
    ) -> Result<Table> {
        let pos = self
            .domain
            .position(v)
            .ok_or(Error::NotInDomain { var: v })?;
        let out_domain = self.domain.without(v);
        let stride = self.domain.strides()[pos];
        let card = self.domain.cards[pos];
        let mut walker = Walker::new(&out_domain, vec![self.domain.strides_along(&out_domain)]);
        let mut values = Vec::with_capacity(out_domain.size());
        for _ in 0..out_domain.size() {
            let base = walker.offsets[0];
            let mut slice = (0..card).map(|s| (s, self.values[base + s * stride]));
            values.push(fold(&mut slice));
            walker.advance();
        }
        Ok(Table {
            domain: out_domain,
            values,
        })
    }

    pub fn sum_out(&self, v: VarId) -> Result<Table> {
        self.reduce_over(v, |slice| slice.map(|(_, x)| x).sum())
    }

    pub fn max_out(&self, v: VarId) -> Result<Table> {
        if self.values.is_empty() {
            return Err(Error::EmptyMax);
        }
        self.reduce_over(v, |slice| {
            slice.map(|(_, x)| x).fold(f64::NEG_INFINITY, f64::max)
        })
    }

    /// For each configuration of the other variables, the lowest state index
    /// of `v` attaining the maximum.
    pub fn argmax_over(&self, v: VarId) -> Result<IndexTable> {
        let mut indices = Vec::new();
        let shape = self.reduce_over(v, |slice| {
            let (best, _) = slice.fold((0, f64::NEG_INFINITY), |(bi, bx), (i, x)| {
                if x > bx {
                    (i, x)
                } else {
                    (bi, bx)
                }
            });
            indices.push(best);
            0.0
        })?;
        Ok(IndexTable {
            domain: shape.domain,
            indices,
        })
    }

    /// Largest pointwise difference after extending both tables to their
    /// union domain.
    pub fn max_abs_diff(&self, other: &Table) -> f64 {
        let (_, diffs) = self.zip_with(other, |a, b| (a - b).abs());
        diffs.into_iter().fold(0.0, f64::max)
    }
}

/// A table of state indices, used for decision policies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexTable {
    domain: Domain,
    indices: Vec<usize>,
}

impl IndexTable {
    pub fn new(domain: Domain, indices: Vec<usize>) -> Result<Self> {
        if indices.len() != domain.size() {
            return Err(Error::DomainMismatch(format!(
                "{} indices for a domain of {} cells",
                indices.len(),
                domain.size()
            )));
        }
        Ok(Self { domain, indices })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn get(&self, states: &[usize]) -> usize {
        self.indices[self.domain.offset(states)]
    }

    pub fn eval(&self, full: &[usize]) -> usize {
        self.indices[self.domain.offset_of_assignment(full)]
    }
}
