use std::fmt::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::tangram::{outline_json, serialize_tce, state_json, to_canonical_text, TceInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Full,
    VisualCentric,
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "full" => Ok(Variant::Full),
            "visual_centric" => Ok(Variant::VisualCentric),
            other => Err(format!("unknown variant {other:?} (full, visual_centric)")),
        }
    }
}

/// Everything sent to a model for one construction query.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub instance_id: String,
    pub variant: Variant,
    pub text: String,
    pub image_svg: String,
    pub exemplars: Vec<String>,
}

pub const EXAMPLE_HEADER: &str = "### Solved example";
pub const OUTLINE_HEADER: &str = "### Target outline";
pub const PIECES_HEADER: &str = "### Initial pieces";

const TASK: &str = "Assemble the seven tangram pieces so that they exactly fill the target outline shown in the image. \
Pieces may be translated, rotated and reflected, but not scaled or deformed; they must not overlap and together they must cover the outline without gaps. \
Coordinates are exact values written in LaTeX (for example \\frac{\\sqrt{2}}{2}).";

const ANSWER: &str = "Answer with the complete Tangram Construction Expression as a single JSON object. \
Its final_state must list all seven pieces with their type, vertex coordinates and edges.";

/// Task-2 prompt. Exemplars are prepended as solved documents in the given
/// order; the visual-centric variant leaves out the outline text.
pub fn gen_task2(i: &TceInstance, variant: Variant, exemplars: &[TceInstance]) -> PromptBundle {
    let mut text = String::new();
    text.push_str(TASK);
    text.push_str("\n\n");
    for (k, e) in exemplars.iter().enumerate() {
        let _ = writeln!(text, "{EXAMPLE_HEADER} {}\n```json\n{}```\n", k + 1, serialize_tce(e));
    }
    if variant == Variant::Full {
        let _ = writeln!(text, "{OUTLINE_HEADER}\nVertices in order:");
        for (k, v) in i.target_outline.polygon.vertices().iter().enumerate() {
            let _ = writeln!(text, "  v{k} = ({}, {})", v.x, v.y);
        }
        let _ = writeln!(text, "Edges [from, to, length]:\n```json\n{}```\n", to_canonical_text(&outline_json(&i.target_outline)["edges"]));
    }
    let _ = writeln!(text, "{PIECES_HEADER}\n```json\n{}```\n", to_canonical_text(&state_json(&i.initial_state)));
    text.push_str(ANSWER);
    text.push('\n');
    PromptBundle {
        instance_id: i.instance_id.clone(),
        variant,
        text,
        image_svg: super::render::render_outline(&i.target_outline, true),
        exemplars: exemplars.iter().map(|e| e.instance_id.clone()).collect(),
    }
}
