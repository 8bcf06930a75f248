#![allow(dead_code)]
pub mod e2e;
pub mod gen;
pub mod oracles;
pub mod server;
pub mod tables;
