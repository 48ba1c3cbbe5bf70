//! Random constraint satisfaction instances, exact backbone/spine order
//! parameters, minimally unsatisfiable subformula extraction, DPLL and
//! tree-resolution proof measurement, extremal-optimization ground-state
//! sampling, and phase-transition sweep machinery.
//!
//! The crate is organized around a small core model: a constraint
//! *template* is a k-ary relation over a finite domain; applying templates
//! to ordered variable tuples yields constraints; a formula is a multiset
//! of constraints. Everything else (generation, exact decision and
//! optimization, order parameters, structural analyzers, sweeps) is built
//! on that model.

pub mod error;
pub mod gen;
pub mod harness;
pub mod heuristics;
pub mod io;
pub mod model;
pub mod order;
pub mod solver;
pub mod structure;

pub use error::{Error, Result};
