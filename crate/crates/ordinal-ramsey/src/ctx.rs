//! Session configuration: the choice of `ζ` with its base fundamental
//! sequences, the norm strategy, fuel limits and the shared `α[n]` cache.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::ordinal::{gamma, BaseIdx, OrdError, Ordinal};

/// The ordinal `ζ` indexing the top notation `Γ_ζ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Zeta {
    /// A finite `ζ = k`; `Γ` indices range over `0..k`.
    Finite(u64),
    /// `ζ = ω`; every finite `Γ` index is available.
    #[default]
    Omega,
    /// `ζ = ω + 1`; finite indices and the index `ω` are available.
    OmegaPlusOne,
}

/// How `|β|` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormStrategy {
    /// `2 + max coefficient + node count` of the representation.
    #[default]
    Structural,
    /// Least `n > 1` with `Γ_ζ ⇒_n β`, falling back to the structural value
    /// when the fueled search does not finish.
    Canonical,
}

/// Resource limits for fueled searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fuel {
    /// Maximum number of principal `α[n]` steps in one `⇒_n` descent.
    pub max_descent_steps: u64,
    /// Largest `n` tried by the canonical norm search.
    pub max_search_n: u64,
    /// Largest representation (in term nodes) a descent may reach before it
    /// counts as out of fuel.
    #[serde(default = "default_max_nodes")]
    pub max_nodes: u64,
}

fn default_max_nodes() -> u64 {
    4096
}

impl Default for Fuel {
    fn default() -> Self {
        Fuel { max_descent_steps: 1_000_000, max_search_n: 64, max_nodes: default_max_nodes() }
    }
}

const MEMO_CAP: usize = 1 << 18;

type Memo = Arc<Mutex<HashMap<(Ordinal, u64), Ordinal>>>;

/// Configuration shared by the fundamental-sequence operations.
///
/// Cloning is cheap and clones share the memo cache.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeqCtx {
    /// The index of the top ordinal `Γ_ζ`.
    #[serde(default)]
    pub zeta: Zeta,
    /// Strategy used by [`crate::fundseq::good_norm`].
    #[serde(default)]
    pub norm: NormStrategy,
    /// Fuel limits.
    #[serde(default)]
    pub fuel: Fuel,
    #[serde(skip)]
    memo: Memo,
}

impl Default for SeqCtx {
    fn default() -> Self {
        SeqCtx::with_zeta(Zeta::Omega)
    }
}

impl SeqCtx {
    /// A context for the given `ζ` with default strategy and fuel.
    pub fn with_zeta(zeta: Zeta) -> Self {
        SeqCtx { zeta, norm: NormStrategy::default(), fuel: Fuel::default(), memo: Memo::default() }
    }

    /// The same context with different fuel limits.
    pub fn with_fuel(mut self, fuel: Fuel) -> Self {
        self.fuel = fuel;
        self
    }

    /// The same context with a different norm strategy.
    pub fn with_norm(mut self, norm: NormStrategy) -> Self {
        self.norm = norm;
        self
    }

    /// Whether `ξ < ζ`.
    pub fn index_in_range(&self, xi: &BaseIdx) -> bool {
        match (self.zeta, xi) {
            (Zeta::Finite(k), BaseIdx::Fin(j)) => *j < k,
            (Zeta::Finite(_), BaseIdx::Omega) => false,
            (Zeta::Omega, BaseIdx::Fin(_)) => true,
            (Zeta::Omega, BaseIdx::Omega) => false,
            (Zeta::OmegaPlusOne, _) => true,
        }
    }

    /// `Γ_ξ`, rejecting indices at or above `ζ`.
    pub fn gamma(&self, xi: BaseIdx) -> Result<Ordinal, OrdError> {
        if self.index_in_range(&xi) {
            Ok(gamma(xi))
        } else {
            Err(OrdError::GammaIndexOutOfRange(xi, self.zeta_name()))
        }
    }

    /// Human-readable `ζ`.
    pub fn zeta_name(&self) -> String {
        match self.zeta {
            Zeta::Finite(k) => k.to_string(),
            Zeta::Omega => "w".into(),
            Zeta::OmegaPlusOne => "w+1".into(),
        }
    }

    /// Base fundamental sequence `ξ⌈n⌉` on `ζ`. Returns `None` for `ξ = 0`.
    pub fn base_fs(xi: &BaseIdx, n: u64) -> Option<BaseIdx> {
        match xi {
            BaseIdx::Fin(0) => None,
            BaseIdx::Fin(k) => Some(BaseIdx::Fin(k - 1)),
            BaseIdx::Omega => Some(BaseIdx::Fin(n)),
        }
    }

    /// `ζ⌈n⌉` for the top ordinal, or `None` when `ζ = 0`.
    pub fn top_base_fs(&self, n: u64) -> Option<BaseIdx> {
        match self.zeta {
            Zeta::Finite(k) => Self::base_fs(&BaseIdx::Fin(k), n),
            Zeta::Omega => Self::base_fs(&BaseIdx::Omega, n),
            Zeta::OmegaPlusOne => Some(BaseIdx::Omega),
        }
    }

    pub(crate) fn memo_get(&self, key: &(Ordinal, u64)) -> Option<Ordinal> {
        self.memo.lock().ok().and_then(|m| m.get(key).cloned())
    }

    pub(crate) fn memo_put(&self, key: (Ordinal, u64), v: Ordinal) {
        if let Ok(mut m) = self.memo.lock() {
            if m.len() >= MEMO_CAP {
                m.clear();
            }
            m.insert(key, v);
        }
    }
}
