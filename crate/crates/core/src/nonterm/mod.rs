//! Loop detection on moded trees.

mod candidates;
mod relations;

pub use candidates::{class_query, expand_cons_definitions, find_candidates, LoopCandidate};
pub use relations::{
    check_pair, is_integer_similar, is_moded_more_general, positions, subterm, InvalidPosition, Position,
};
