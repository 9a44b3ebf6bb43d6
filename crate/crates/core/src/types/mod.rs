//! External types: valid triples over finite hosts, and limit types over
//! oracle-backed infinite hosts.

pub mod adapter;
pub mod limits;
pub mod triple;

use thiserror::Error;

use crate::poset::PosetError;

pub use adapter::{
    adapter_by_name, words_up_to, ChainRank, Closure, CofinalityAdapter, GenWord, LimitRule,
    Opposite, RankKind, RankSet, BUILTIN_ADAPTERS,
};
pub use limits::{
    fixed_limit, is_lower_limit, is_upper_limit, resolve_upper_limit, LimitDescriptor, LimitMode,
};
pub use triple::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("sets do not partition the host")]
    NotAPartition,
    #[error("triple is not valid over the host")]
    InvalidTriple,
    #[error("types are over different hosts")]
    HostMismatch,
    #[error("type is not in lambda (U is nonempty)")]
    NotInLambda,
    #[error("type is not in mu (W is nonempty)")]
    NotInMu,
    #[error("adapter cannot answer the query for this descriptor")]
    OracleUnavailable,
    #[error("limit operations need an infinite host")]
    FiniteHost,
    #[error("no infinite chain-rank level below a finite supremum")]
    NoInfiniteLevel,
    #[error(transparent)]
    Poset(#[from] PosetError),
}
