//! Citation strings carried by reports. The report format requires every
//! check and conclusion to name the result it relies on; they live here as
//! data and nowhere else.

pub const SN_BOUND: &str = "Theorem 2.5";
pub const SN_BOUND_CY: &str = "Theorem 2.5(3)";
pub const SOCLE: &str = "Lemma 2.1";
pub const CY_PREFIX_BOUND: &str = "Corollary 2.7";
pub const FANO_VANISHING: &str = "Corollary 2.8";
pub const FANO_TAIL_VANISHING: &str = "Theorem 2.9";
pub const CY_SPLIT: &str = "Theorem 3.2";
pub const K3_SPLIT: &str = "Theorem 3.4(1)";
pub const FANO_PLUS_REGULAR: &str = "Theorem 3.5";
pub const FANO_TABLE: &str = "Proposition 3.8";
pub const FANO_THREEFOLD: &str = "Corollary 3.9";
pub const FANO_PREFIX_ROUTE: &str = "Theorem 3.10";
pub const NONE: &str = "";
