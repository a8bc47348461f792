//! The seven-piece inventory and the TCE document model.

mod congruence;
mod document;
mod pieces;

pub use congruence::{congruent_silhouettes, silhouette_key, ApproximateOutline};
pub use document::{
    normalize_adjacency, outline_json, parse_document, parse_outline, parse_tce, piece_json, serialize_tce, state_json, tce_json, to_canonical_text,
    Field, Outline, ParsedDocument, TceInstance, TseReport, Violation, ViolationKind,
};
pub use pieces::{canonical_pieces, recover_transform, PieceKind, PieceState, Shape};
