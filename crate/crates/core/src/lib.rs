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

//! Constant-depth preparation of Dicke and symmetric states with bounded fanout.
//!
//! * [`ir`]: layered circuits, gates, library gates and cost accounting.
//! * [`sim`]: exact dense statevector simulation and verification.
//! * [`dist`]: exact rational pmfs for the damped binomial and occupancy distributions.
//! * [`prim`]: amplification, amplitude adjustment, one-hot and controlled-circuit builders.
//! * [`synth`]: Dicke, occupancy and symmetric-state synthesis.

pub mod dist;
pub mod ir;
pub mod prim;
pub mod sim;
pub mod synth;
