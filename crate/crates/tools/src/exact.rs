//! The exact oracle, with the `T2` enumeration split across threads by the
//! first image of `σ`.

use permconc::oracle::{self, ExactDistribution};
use permconc::{Array, StatKind};
use rayon::prelude::*;

use crate::error::Result;

pub fn exact_distribution(array: &Array, kind: StatKind) -> Result<ExactDistribution> {
    match (kind, array) {
        (StatKind::T2, Array::Three(a)) if a.n() <= oracle::MAX_N_T2 => {
            let parts = (0..a.n())
                .into_par_iter()
                .map(|first| oracle::exact_distribution_t2_part(a, first))
                .collect::<permconc::Result<Vec<_>>>()?;
            Ok(ExactDistribution::merge(parts))
        }
        _ => Ok(oracle::exact_distribution(array, kind)?),
    }
}
