//! Generalized marginalization of a (probability, utility) pair.
//!
//! Chance variables are summed out and decisions maximized out, highest
//! temporal rank first. The pair is carried as `(phi, rho)` with
//! `rho = phi * psi`, so a chance step is two plain sums and the utility is
//! recovered at the end as `rho / phi` (with `0/0 = 0`).

use crate::error::{Error, Result};
use crate::model::TemporalPartition;

use super::{Table, VarId};

/// The state of a contraction just before a decision is maximized out.
#[derive(Debug, Clone, Copy)]
pub struct MaxStep<'a> {
    pub decision: VarId,
    pub phi: &'a Table,
    pub rho: &'a Table,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairContraction {
    phi: Table,
    rho: Table,
}

impl PairContraction {
    pub fn new(phi: &Table, psi: &Table) -> Self {
        Self {
            rho: phi.multiply(psi),
            phi: phi.clone(),
        }
    }

    /// Assembles a pair from `phi` and an already multiplied `rho`, whose
    /// domain must cover `phi`'s.
    pub fn from_parts(phi: Table, rho: Table) -> Result<Self> {
        if !phi.domain().is_subset(rho.domain()) {
            return Err(Error::DomainMismatch(
                "rho must be defined on every variable of phi".into(),
            ));
        }
        Ok(Self { phi, rho })
    }

    pub fn phi(&self) -> &Table {
        &self.phi
    }

    /// The contracted product `phi * psi`.
    pub fn rho(&self) -> &Table {
        &self.rho
    }

    /// Eliminates a single variable; `observer` sees the pair right before a
    /// decision is maximized out.
    pub fn eliminate(
        &mut self,
        v: VarId,
        partition: &TemporalPartition,
        observer: &mut dyn FnMut(MaxStep<'_>) -> Result<()>,
    ) -> Result<()> {
        if !self.rho.domain().contains(v) {
            return Err(Error::NotInDomain { var: v });
        }
        let decision = partition
            .is_decision(v)
            .ok_or_else(|| Error::UnknownVariable(v.to_string()))?;
        if decision {
            observer(MaxStep {
                decision: v,
                phi: &self.phi,
                rho: &self.rho,
            })?;
            if self.phi.domain().contains(v) {
                self.phi = self.phi.max_out(v)?;
            }
            self.rho = self.rho.max_out(v)?;
        } else {
            self.phi = if self.phi.domain().contains(v) {
                self.phi.sum_out(v)?
            } else {
                let card = self.rho.domain().card(v).unwrap() as f64;
                self.phi.map(|x| x * card)
            };
            self.rho = self.rho.sum_out(v)?;
        }
        Ok(())
    }

    /// Eliminates `vars` in the default order (see [`elimination_sequence`]).
    pub fn eliminate_all(
        &mut self,
        vars: &[VarId],
        partition: &TemporalPartition,
        observer: &mut dyn FnMut(MaxStep<'_>) -> Result<()>,
    ) -> Result<()> {
        for v in elimination_sequence(vars, partition)? {
            self.eliminate(v, partition, observer)?;
        }
        Ok(())
    }

    /// Eliminates variables in exactly the given order, which must have
    /// non-increasing temporal rank.
    pub fn eliminate_in_order(
        &mut self,
        sequence: &[VarId],
        partition: &TemporalPartition,
        observer: &mut dyn FnMut(MaxStep<'_>) -> Result<()>,
    ) -> Result<()> {
        check_sequence(sequence, partition)?;
        for &v in sequence {
            self.eliminate(v, partition, observer)?;
        }
        Ok(())
    }

    /// The utility component `rho / phi`.
    pub fn utility(&self) -> Result<Table> {
        self.rho.divide(&self.phi)
    }

    pub fn into_pair(self) -> Result<(Table, Table)> {
        let psi = self.utility()?;
        Ok((self.phi, psi))
    }
}

/// Orders `vars` for elimination: decreasing temporal rank, ties (members of
/// one information set) by decreasing id.
pub fn elimination_sequence(vars: &[VarId], partition: &TemporalPartition) -> Result<Vec<VarId>> {
    let mut keyed = vars
        .iter()
        .map(|&v| {
            partition
                .rank(v)
                .map(|r| (r, v))
                .ok_or_else(|| Error::UnknownVariable(v.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    keyed.sort_unstable_by(|a, b| b.cmp(a));
    keyed.dedup();
    let sequence: Vec<VarId> = keyed.into_iter().map(|(_, v)| v).collect();
    check_sequence(&sequence, partition)?;
    Ok(sequence)
}

fn check_sequence(sequence: &[VarId], partition: &TemporalPartition) -> Result<()> {
    for pair in sequence.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let ra = partition
            .rank(a)
            .ok_or_else(|| Error::UnknownVariable(a.to_string()))?;
        let rb = partition
            .rank(b)
            .ok_or_else(|| Error::UnknownVariable(b.to_string()))?;
        if ra < rb {
            return Err(Error::InvalidOrder(format!(
                "{b} (rank {rb}) eliminated after {a} (rank {ra})"
            )));
        }
        if ra == rb && partition.is_decision(a) == Some(true) {
            return Err(Error::DecisionTie(a, b));
        }
    }
    Ok(())
}

/// Generalized marginalization of `(phi, psi)` over `vars`.
pub fn marg_all(
    phi: &Table,
    psi: &Table,
    vars: &[VarId],
    partition: &TemporalPartition,
) -> Result<(Table, Table)> {
    let mut pair = PairContraction::new(phi, psi);
    pair.eliminate_all(vars, partition, &mut |_| Ok(()))?;
    pair.into_pair()
}

/// [`marg_all`] with an explicit elimination order.
pub fn marg_all_in_order(
    phi: &Table,
    psi: &Table,
    sequence: &[VarId],
    partition: &TemporalPartition,
) -> Result<(Table, Table)> {
    let mut pair = PairContraction::new(phi, psi);
    pair.eliminate_in_order(sequence, partition, &mut |_| Ok(()))?;
    pair.into_pair()
}
