//! `.bnet` network definition format: parser, canonical serializer, JSON
//! mirror, and compilation into a [`BayesianNetwork`](crate::bn::BayesianNetwork).
//!
//! ```text
//! version 1
//! meta source = "expert panel"
//!
//! variable head_trauma { wound, normal }
//! variable ocular_alertness { open, closed, nt }
//!
//! cpt head_trauma {
//!   : 0.200000 0.800000
//! }
//!
//! cpt ocular_alertness | head_trauma {
//!   wound : 0.200000 0.700000 0.100000
//!   normal : 0.750000 0.150000 0.100000 [band=weak]
//! }
//! ```
//!
//! Row keys always spell out parent states by name, in the order the parents
//! are listed after `|`.

mod compile;
mod document;
mod error;
mod lexer;
mod parser;
mod serialize;

pub use compile::compile;
pub use document::{CptDecl, NetworkDocument, Position, RowDecl, VariableDecl};
pub use error::{CompileError, LocatedError, NetSpecError};
pub use parser::{parse_network, parse_network_json};
pub use serialize::serialize_network;

/// The only format version this crate reads or writes.
pub const FORMAT_VERSION: u32 = 1;

/// Parse and compile `.bnet` text in one step.
pub fn load_network(text: &str) -> Result<crate::bn::BayesianNetwork, CompileError> {
    compile(&parse_network(text)?)
}
