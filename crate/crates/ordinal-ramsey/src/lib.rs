//! Ordinal notations below `Γ_ζ`, their fundamental sequences, barrier-based
//! largeness, and finite Ramsey constructions over fronts.
//!
//! The crate is organized bottom-up:
//!
//! * [`ordinal`] and [`parse`]: normal forms, arithmetic and text syntax;
//! * [`ctx`], [`finite_set`] and [`fundseq`]: fundamental sequences, descent
//!   and largeness;
//! * [`front`] and [`frontexpr`]: fronts as lazy classifiers with height
//!   annotations;
//! * [`pigeon`]: bad colorings, pigeonhole fronts and brute-force arrows;
//! * [`lower`]: peeling functions and the lower-bound coloring;
//! * [`upper`]: Ramsey closures and the prehomogeneous extraction;
//! * [`sample`] and [`verify`]: seeded generators and property campaigns.

pub mod ctx;
pub mod finite_set;
pub mod front;
pub mod frontexpr;
pub mod fundseq;
pub mod lower;
pub mod ordinal;
pub mod parse;
pub mod pigeon;
pub mod sample;
pub mod upper;
pub mod verify;

pub use ctx::{Fuel, NormStrategy, SeqCtx, Zeta};
pub use finite_set::{parse_set, FiniteSet};
pub use front::{make_alpha_size, make_uniform, oplus, BaseStream, Class, Front, FrontError};
pub use frontexpr::{parse_front, parse_front_list, FrontExprError};
pub use fundseq::{
    classify_large, estimation_check, fs_path, fs_step, fs_top, good_norm, implies_n, uplus_classify,
    Implies, LargenessVerdict, Verdict,
};
pub use ordinal::{
    add, compare, gamma, geqq, nat_prod_fin, nat_sum, omega_pow, philog_apply, sub_multiset,
    times_omega, veblen, BaseIdx, Head, OrdError, Ordinal, SubMultiset, Term,
};
pub use parse::{parse_ordinal, ParseError};
pub use lower::{
    build_m, color_sets, homog_absence_check, make_d_partition, DPartition, HomogSearch, LowerColoring,
    LowerError, LowerParams, PeelMode, Peeler,
};
pub use pigeon::{arrow_check, pigeon_front, ram_pigeon, ArrowReport, ArrowVerdict, Coloring, ColorEntry};
pub use sample::{FuzzConfig, Sampler};
pub use upper::{homog_from_prehomog, prehomog_extract, ram_limit, ram_upper, ramsey_closure, UpperError};
pub use verify::{fuzz_campaign, CampaignKind, CampaignOptions, Outcome, Report};
