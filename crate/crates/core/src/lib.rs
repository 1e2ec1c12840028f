//! A kernel and checker for a calculus of constructions extended with
//! symbols defined by rewrite rules, where rewriting and type conversion
//! work modulo a set of equations (such as associativity and
//! commutativity).
//!
//! The crate provides:
//!
//! - terms, typing and conversion modulo beta, the rules and the
//!   equations ([`term`], [`typing`]);
//! - the rewrite engine with class enumeration, normal forms and
//!   joinability ([`reduction`]);
//! - the termination conditions: symbol classification, the
//!   computability-closure criterion for rules and equations, and the
//!   aggregated condition report ([`signature`], [`closure`],
//!   [`conditions`]);
//! - critical pairs and confluence-modulo analysis ([`confluence`]);
//! - the concrete syntax and the command-line driver ([`syntax`],
//!   [`cli`]).

pub mod closure;
pub mod cli;
pub mod conditions;
pub mod confluence;
pub mod limits;
pub mod reduction;
pub mod report;
pub mod signature;
pub mod syntax;
pub mod term;
pub mod typing;

pub use limits::Limits;
pub use signature::{Equation, RewriteRule, Signature, SymbolKind};
pub use term::{Position, Sort, Substitution, SymId, Term};
pub use typing::TypingEnv;
