// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! The guide in `book/` as doc-tests: each chapter becomes the docs of an
//! empty module, so `cargo test -p hessgrape-book` compiles and runs every
//! Rust snippet in it.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/propagators.md")]
pub mod propagators {}

#[doc = include_str!("../../../book/src/objective.md")]
pub mod objective {}

#[doc = include_str!("../../../book/src/optimizers.md")]
pub mod optimizers {}

#[doc = include_str!("../../../book/src/transmon.md")]
pub mod transmon {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
