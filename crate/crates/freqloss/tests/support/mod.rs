#![allow(dead_code)]

pub mod oracles;
pub mod schema;
pub mod suite;
