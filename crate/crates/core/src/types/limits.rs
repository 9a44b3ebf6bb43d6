//! Limit types in `λ(A)` for oracle-backed hosts.

use serde::{Deserialize, Serialize};

use super::adapter::{ChainRank, Closure, CofinalityAdapter, LimitRule, RankKind, RankSet};
use super::triple::ValidTriple;
use super::TypeError;
use crate::poset::{ElemId, ElementSet};

/// A type `(∅, V, W)` in `λ(A)` defined by a chain-rank rule.
///
/// `V = {a | rule(rank_kind(a))}` and `W` is the rest; `swapped` exchanges the
/// two, which is what `shift_down ∘ op_type` does to a descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LimitDescriptor {
    #[serde(flatten)]
    pub rule: LimitRule,
    pub kind: RankKind,
    pub swapped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LimitMode {
    Upper,
    NeedsOpReduction,
}

impl LimitDescriptor {
    pub fn new(rule: LimitRule) -> Self {
        LimitDescriptor {
            rule,
            kind: RankKind::Own,
            swapped: false,
        }
    }

    pub fn v_set(&self) -> RankSet {
        RankSet {
            rule: self.rule,
            kind: self.kind,
            complement: self.swapped,
        }
    }

    pub fn w_set(&self) -> RankSet {
        RankSet {
            complement: !self.swapped,
            ..self.v_set()
        }
    }

    pub fn in_v(&self, adapter: &dyn CofinalityAdapter, a: u64) -> bool {
        adapter.in_set(self.v_set(), a)
    }

    /// The same type read over the opposite host, shifted back into `λ`:
    /// `shift_down(op_type(p)) = (∅, W_p, V_p)`, with ranks of the opposite.
    pub fn reduce_to_opposite(&self) -> LimitDescriptor {
        LimitDescriptor {
            rule: self.rule,
            kind: self.kind.flip(),
            swapped: !self.swapped,
        }
    }

    /// Extensional triple on the truncation `a_0 … a_{n-1}`.
    pub fn on_truncation(&self, adapter: &dyn CofinalityAdapter, n: usize) -> ValidTriple {
        let mut v = ElementSet::new();
        let mut w = ElementSet::new();
        for a in 0..n as u64 {
            if self.in_v(adapter, a) {
                v.insert(a as ElemId);
            } else {
                w.insert(a as ElemId);
            }
        }
        ValidTriple::from_parts(ElementSet::new(), v, w)
    }

    /// Whether every adapter generator maps `V` onto `V` on a window.
    pub fn is_generator_fixed(&self, adapter: &dyn CofinalityAdapter, window: u64) -> bool {
        (0..adapter.generator_count()).all(|g| {
            (0..window).all(|a| {
                self.in_v(adapter, a) == self.in_v(adapter, adapter.apply_generator(g, false, a))
            })
        })
    }
}

fn require_infinite(adapter: &dyn CofinalityAdapter) -> Result<(), TypeError> {
    if adapter.is_infinite() {
        Ok(())
    } else {
        Err(TypeError::FiniteHost)
    }
}

/// True iff no finite `V₀ ⊆ V_p` has `V₀⁻ = V_p`.
pub fn is_upper_limit(
    adapter: &dyn CofinalityAdapter,
    p: &LimitDescriptor,
) -> Result<bool, TypeError> {
    require_infinite(adapter)?;
    adapter
        .finitely_generated(p.v_set(), Closure::Down)
        .map(|fg| !fg)
        .ok_or(TypeError::OracleUnavailable)
}

/// True iff no finite `W₀ ⊆ W_p` has `W₀⁺ = W_p`.
pub fn is_lower_limit(
    adapter: &dyn CofinalityAdapter,
    p: &LimitDescriptor,
) -> Result<bool, TypeError> {
    require_infinite(adapter)?;
    adapter
        .finitely_generated(p.w_set(), Closure::Up)
        .map(|fg| !fg)
        .ok_or(TypeError::OracleUnavailable)
}

/// The generator-fixed limit type from chain ranks.
pub fn fixed_limit(
    adapter: &dyn CofinalityAdapter,
) -> Result<(LimitDescriptor, LimitMode), TypeError> {
    require_infinite(adapter)?;
    let rule = match adapter.sup_rank() {
        ChainRank::Infinite => LimitRule::CFinite,
        ChainRank::Finite(sup) => {
            let n = (1..=sup)
                .find(|&n| adapter.level_is_infinite(n))
                .ok_or(TypeError::NoInfiniteLevel)?;
            LimitRule::CAtMost { n }
        }
    };
    let p = LimitDescriptor::new(rule);
    let mode = if is_upper_limit(adapter, &p)? {
        LimitMode::Upper
    } else {
        LimitMode::NeedsOpReduction
    };
    Ok((p, mode))
}

/// Runs [`fixed_limit`] and, if needed, switches to the opposite host.
/// Returns the host the construction should run over and its upper-limit
/// descriptor.
pub fn resolve_upper_limit(
    adapter: Box<dyn CofinalityAdapter>,
) -> Result<(Box<dyn CofinalityAdapter>, LimitDescriptor, LimitMode), TypeError> {
    let (p, mode) = fixed_limit(adapter.as_ref())?;
    match mode {
        LimitMode::Upper => Ok((adapter, p, mode)),
        LimitMode::NeedsOpReduction => {
            let op: Box<dyn CofinalityAdapter> =
                Box::new(super::adapter::Opposite { base: adapter });
            let q = p.reduce_to_opposite();
            if !is_upper_limit(op.as_ref(), &q)? {
                return Err(TypeError::OracleUnavailable);
            }
            Ok((op, q, mode))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::adapter::{adapter_by_name, BUILTIN_ADAPTERS};
    use crate::types::triple::{op_type, shift_down};

    #[test]
    fn spec_modes() {
        let up = adapter_by_name("chain-up").unwrap();
        let (p, m) = fixed_limit(up.as_ref()).unwrap();
        assert_eq!(p.rule, LimitRule::CFinite);
        assert_eq!(m, LimitMode::Upper);

        let anti = adapter_by_name("antichain").unwrap();
        let (p, m) = fixed_limit(anti.as_ref()).unwrap();
        assert_eq!(p.rule, LimitRule::CAtMost { n: 1 });
        assert_eq!(m, LimitMode::Upper);

        let down = adapter_by_name("chain-down").unwrap();
        let (p, m) = fixed_limit(down.as_ref()).unwrap();
        assert_eq!(m, LimitMode::NeedsOpReduction);
        assert!(p.on_truncation(down.as_ref(), 5).v.is_empty());
        assert!(!is_upper_limit(down.as_ref(), &p).unwrap());
        assert!(is_lower_limit(down.as_ref(), &p).unwrap());
    }

    #[test]
    fn reduction_matches_shift_of_op() {
        let down = adapter_by_name("chain-down").unwrap();
        let (p, _) = fixed_limit(down.as_ref()).unwrap();
        let (op, q, _) = resolve_upper_limit(down).unwrap();
        let base = adapter_by_name("chain-down").unwrap();
        let expect = shift_down(&op_type(&p.on_truncation(base.as_ref(), 8))).unwrap();
        assert_eq!(q.on_truncation(op.as_ref(), 8), expect);
        assert!(is_upper_limit(op.as_ref(), &q).unwrap());
    }

    #[test]
    fn all_builtins_resolve_and_are_fixed() {
        for name in BUILTIN_ADAPTERS {
            let a = adapter_by_name(name).unwrap();
            let (host, p, _) = resolve_upper_limit(a).unwrap();
            assert!(p.is_generator_fixed(host.as_ref(), 60), "{name}");
            assert!(is_upper_limit(host.as_ref(), &p).unwrap(), "{name}");
        }
    }

    #[test]
    fn descriptor_serializes_as_named_rule() {
        let d = LimitDescriptor::new(LimitRule::CAtMost { n: 1 });
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains("\"rule\":\"c_le_n\""), "{s}");
        let back: LimitDescriptor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }
}
