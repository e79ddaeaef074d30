//! Numerical side: Hardy-Littlewood constants, the log-integral density,
//! distribution-factor estimates and the search for rational factors.

mod compensated;
mod hl;
mod logint;
mod pdf;
mod rational;

pub use compensated::CompensatedSum;
pub use hl::{hl_constant, hl_constants, HlConstant, HlTable, DEFAULT_PRIME_BOUND};
pub use logint::{log_integral, log_integral_between, LogIntegralValue, DEFAULT_REL_TOL};
pub use pdf::{
    conjectured_factor, estimate_pdf, estimate_pdf_for, gap_factor, ratio_to_hl, PdfEstimate,
    PdfRecord, MIN_ESTIMATE_LIMIT, RELIABLE_ESTIMATE_LIMIT,
};
pub use rational::{convergents, rational_candidates, RationalCandidate};
