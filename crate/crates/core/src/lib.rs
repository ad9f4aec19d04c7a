//! Exact permanents of (0,1)-matrices, the extremal families that maximize
//! them for a given number of ones, and search engines that check the
//! closed forms.

pub mod bound;
pub mod canon;
pub mod error;
pub mod families;
pub mod formulas;
pub mod matrix;
pub mod permanent;
pub mod report;
pub mod search;
mod serde_str;
pub mod verify;

pub use bound::{bound_at_least, bound_exceeds, bregman_bound, BoundValue};
pub use canon::{canonical_form, is_equivalent, is_equivalent_with_transpose};
pub use error::{Error, Result};
pub use families::{build_family, build_regular_family, list_valid_families, FamilyId, FamilySpec};
pub use formulas::{
    classify_sigma, factorial_root_inequality_holds, mu_all, mu_balanced, mu_dispatch, mu_mid,
    mu_sparse, CaseTag, Coverage, MuValue, Regime,
};
pub use matrix::{BinMatrix, RowProfile};
pub use permanent::{permanent_expansion, permanent_ryser};
pub use report::{window_table, Report, Verdict, WindowTable};
pub use search::{
    exhaustive_max, hillclimb_lower_bound, regular_exhaustive_max, search, Engine, SearchOptions,
    SearchResult,
};
pub use verify::{verify_suite, Suite, VerifyLimits};
