// Copyright 2026 The qacz Developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.


//! Command-line harness for qacz: exact-arithmetic claim sweeps, primitive certification,
//! the acceptance suite and synthesis commands.
//!
//! Every check produces [`ClaimVerdict`] rows with `{id, params, lhs, relation, rhs, verdict,
//! seconds}`. Row order is fixed by the grid, so reports are byte-identical for a fixed config.

pub mod accept;
pub mod certify;
pub mod claims;
pub mod config;
pub mod report;

pub use accept::{run_acceptance, AcceptanceReport, CriterionResult};
pub use claims::{run_claims, SweepError, CLAIM_IDS};
pub use config::{Fault, Grid, SweepConfig};
pub use report::{ClaimVerdict, Quantity, Verdict};
