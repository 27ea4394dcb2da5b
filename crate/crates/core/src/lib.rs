// SPDX-License-Identifier: MIT OR Apache-2.0

pub mod abelian;
pub mod cli;
pub mod config;
pub mod duality;
pub mod genericity;
pub mod marked;
pub mod oracles;
pub mod pairing;
pub mod transfer;
pub mod words;
