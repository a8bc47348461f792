//! Data construction: snapping, canonical placement, task items and
//! rendering.

mod normalize;
pub mod render;
mod snap;
mod task1;
mod task2;

pub use normalize::{default_instance_id, filter_raw, normalize, normalize_pieces, read_raw_jsonl, NormalizeError, RawAssembly, RawPiece, RejectReason};
pub use render::{render_mc, render_outline, render_pieces};
pub use snap::{snap, snap_point, snap_scalar, SnapError, SNAP_BOUND, SNAP_DENOMINATORS, SNAP_TOL};
pub use task1::{gen_task1, instance_seed, DistractorPool, McItem, McOption, Task1Error, LABELS};
pub use task2::{gen_task2, PromptBundle, Variant, EXAMPLE_HEADER, OUTLINE_HEADER, PIECES_HEADER};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{ExactValue, Scalar};
    use crate::geom::{count_components, Point, Polygon};
    use crate::solver::{generate_instances, solve, GenerateConfig, SolverConfig};
    use crate::tangram::{Outline, PieceKind, PieceState, TceInstance};

    fn square_outline() -> Outline {
        let (z, s) = (ExactValue::zero(), ExactValue::from_parts((0, 1), (2, 1)));
        let pts = [(z.clone(), z.clone()), (s.clone(), z.clone()), (s.clone(), s.clone()), (z.clone(), s)];
        Outline::new(Polygon::new(pts.into_iter().map(|(x, y)| Point::exact(x, y)).collect()).unwrap())
    }

    fn square_assembly() -> Vec<PieceState> {
        solve(&square_outline(), &SolverConfig::default()).unwrap().solution().unwrap().to_vec()
    }

    fn raw(pieces: &[(&str, &[(f64, f64)])]) -> RawAssembly {
        RawAssembly {
            pieces: pieces.iter().map(|(k, v)| RawPiece { kind: k.to_string(), vertices: v.iter().map(|&(x, y)| [x, y]).collect() }).collect(),
        }
    }

    /// Seven pieces closing a triangular gap between ST1, SQ and LT2.
    fn ring_enclosure() -> RawAssembly {
        raw(&[
            ("large_triangle_1", &[(2.0, 0.0), (0.0, 0.0), (2.0, -2.0)]),
            ("large_triangle_2", &[(3.0, 0.0), (3.0, -2.0), (5.0, 0.0)]),
            ("medium_triangle", &[(0.0, 2.0), (1.0, 1.0), (1.0, 3.0)]),
            ("small_triangle_1", &[(2.0, -2.0), (3.0, -2.0), (2.0, -1.0)]),
            ("small_triangle_2", &[(1.0, 1.0), (2.0, 1.0), (1.0, 2.0)]),
            ("square", &[(2.0, -1.0), (3.0, -1.0), (3.0, 0.0), (2.0, 0.0)]),
            ("parallelogram", &[(2.0, 1.0), (1.0, 1.0), (0.0, 0.0), (1.0, 0.0)]),
        ])
    }

    #[test]
    fn filter_accepts_and_rejects() {
        let a = RawAssembly::from_pieces(&square_assembly());
        assert_eq!(filter_raw(&a, SNAP_TOL).unwrap().len(), 7);
        let mut detached = a.clone();
        detached.pieces[3].vertices.iter_mut().for_each(|v| v[0] += 10.0);
        assert_eq!(filter_raw(&detached, SNAP_TOL).unwrap_err().code(), "disconnected");
        assert_eq!(filter_raw(&ring_enclosure(), SNAP_TOL).unwrap_err().code(), "holes");
        let mut short = a.clone();
        short.pieces.pop();
        assert_eq!(filter_raw(&short, SNAP_TOL).unwrap_err().code(), "incomplete");
        let mut noisy = a.clone();
        noisy.pieces[0].vertices[0][0] += 0.123;
        assert!(matches!(filter_raw(&noisy, SNAP_TOL), Err(RejectReason::Unsnappable { piece: 0, vertex: 0, .. })));
        let mut renamed = a;
        renamed.pieces[0].kind = "large_triangle".into();
        renamed.pieces[1].kind = "LT2".into();
        assert!(filter_raw(&renamed, SNAP_TOL).is_ok());
    }

    #[test]
    fn raw_lines_round_trip() {
        let a = RawAssembly::from_pieces(&square_assembly());
        let text = format!("{}\n\n{}\n", a.to_line(), "{\"pieces\": 3}");
        let parsed = read_raw_jsonl(&text);
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0].as_ref().unwrap(), &a);
        assert!(parsed[1].is_err());
    }

    #[test]
    fn normalize_offset_square() {
        let a = RawAssembly::from_pieces(&square_assembly()).translate(0.37, 1.12);
        let inst = normalize(&a, SNAP_TOL, None).unwrap();
        assert_eq!(inst.target_outline, square_outline());
        assert!(inst.instance_id.starts_with("tce-") && inst.instance_id.len() == 16);
        let kinds: Vec<PieceKind> = inst.final_state.iter().map(|p| p.kind).collect();
        assert_eq!(kinds, PieceKind::ALL);
        assert!(inst.final_state.iter().all(|p| p.transform_consistent() == Some(true)));
        let nodes: Vec<PieceKind> = PieceKind::ALL.to_vec();
        assert_eq!(count_components(&nodes, |a, b| inst.adjacency_graph.contains(&(*a.min(b), *a.max(b)))), 1);
    }

    #[test]
    fn normalize_is_idempotent() {
        let inst = normalize(&RawAssembly::from_pieces(&square_assembly()), SNAP_TOL, Some("sq")).unwrap();
        assert_eq!(inst.instance_id, "sq");
        assert_eq!(normalize_pieces(inst.final_state.clone(), Some("sq")).unwrap(), inst);
        assert_eq!(normalize(&RawAssembly::from_pieces(&inst.final_state), SNAP_TOL, Some("sq")).unwrap(), inst);
        let id = normalize_pieces(inst.final_state.clone(), None).unwrap().instance_id;
        assert_eq!(id, default_instance_id(&inst.final_state));
    }

    #[test]
    fn outline_starts_at_smallest_vertex() {
        for inst in generate_instances(10, 3, &GenerateConfig::default()).instances {
            let v = inst.target_outline.polygon.vertices();
            let key = |p: &Point| (p.x.as_exact().cloned(), p.y.as_exact().cloned());
            assert!(v.iter().all(|p| key(&v[0]) <= key(p)));
            assert_eq!(inst.target_outline.polygon.signed_area(), Scalar::from(8));
        }
    }

    fn corpus() -> Vec<TceInstance> {
        generate_instances(12, 11, &GenerateConfig::default()).instances
    }

    fn pool(c: &[TceInstance]) -> Vec<(String, Outline)> {
        c.iter().map(|i| (i.instance_id.clone(), i.target_outline.clone())).collect()
    }

    #[test]
    fn task1_items() {
        let c = corpus();
        let mut p = pool(&c);
        let truth = &c[0];
        let moved = truth.target_outline.polygon.translate(&Scalar::from(5), &Scalar::from(-2));
        p.push(("congruent-copy".into(), Outline::new(moved)));
        let dp = DistractorPool::new(&p).unwrap();
        for seed in 0..40 {
            let item = gen_task1(truth, &dp, seed).unwrap();
            assert_eq!(item, gen_task1(truth, &dp, seed).unwrap());
            assert_eq!(item.options.len(), 4);
            assert!(item.options.iter().all(|o| o.source_id != "congruent-copy"));
            let answer = item.options.iter().find(|o| o.label == item.answer).unwrap();
            assert_eq!(answer.source_id, truth.instance_id);
            assert_eq!(item.sidecar()["options"].as_array().unwrap().len(), 4);
        }
        assert_eq!(gen_task1(truth, &DistractorPool::new(&p[..3]).unwrap(), 0), Err(Task1Error::InsufficientPool { available: 2 }));
    }

    #[test]
    fn task2_variants() {
        let c = corpus();
        let i = &c[0];
        let vertex_strings: Vec<String> = i.target_outline.polygon.vertices().iter().map(|v| format!("({}, {})", v.x, v.y)).collect();
        let full = gen_task2(i, Variant::Full, &[]);
        assert!(vertex_strings.iter().all(|s| full.text.contains(s.as_str())));
        let visual = gen_task2(i, Variant::VisualCentric, &[]);
        assert!(vertex_strings.iter().all(|s| !visual.text.contains(s.as_str())));
        assert!(vertex_strings.iter().all(|s| visual.image_svg.contains(s.as_str())));
        assert!(visual.text.contains(PIECES_HEADER) && !visual.text.contains(OUTLINE_HEADER));
        let icl = gen_task2(i, Variant::Full, &c[1..4]);
        assert_eq!(icl.text.matches(EXAMPLE_HEADER).count(), 3);
        assert_eq!(icl.exemplars, c[1..4].iter().map(|e| e.instance_id.clone()).collect::<Vec<_>>());
        let last_example = icl.text.rfind(EXAMPLE_HEADER).unwrap();
        assert!(last_example < icl.text.find(OUTLINE_HEADER).unwrap());
        assert_eq!("visual-centric".parse::<Variant>(), Ok(Variant::VisualCentric));
    }

    #[test]
    fn rendering() {
        let unit = Outline::new(Polygon::new(vec![Point::new(0, 0), Point::new(1, 0), Point::new(1, 1), Point::new(0, 1)]).unwrap());
        let svg = render_outline(&unit, false);
        assert_eq!(svg.matches("<path").count(), 1);
        let d = svg.split("d=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!((d.matches('M').count(), d.matches('L').count(), d.matches('Z').count()), (1, 3, 1));
        assert_eq!(svg, render_outline(&unit, false));
        assert!(svg.contains("viewBox=\"-0.0500 -0.0500 1.1000 1.1000\""));
        let pieces = render_pieces(&square_assembly());
        assert_eq!(pieces.matches("data-piece=").count(), 7);
        let c = corpus();
        let item = gen_task1(&c[0], &DistractorPool::new(&pool(&c)).unwrap(), 5).unwrap();
        let mc = item.render_svg();
        assert_eq!(mc.matches("class=\"panel\"").count(), 4);
        for l in LABELS {
            assert!(mc.contains(&format!("data-label=\"{l}\"")));
        }
        assert_eq!(mc, gen_task1(&c[0], &DistractorPool::new(&pool(&c)).unwrap(), 5).unwrap().render_svg());
    }
}
